//! Error functions for real arguments and the overflow-safe product
//! e^a·erfc(b).
//!
//! erf, erfc and erfcx follow W. J. Cody's rational Chebyshev
//! approximations (Math. Comp. 23, 1969), split at |x| = 0.46875 and 4.
//! The factor e^{-x²} is formed in two pieces so its relative error stays at
//! a few ulps even for x near 26.

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948;
const THRESHOLD: f64 = 0.468_75;
/// erfc underflows to zero beyond this argument.
const XBIG: f64 = 26.543;
/// Largest exponent accepted by [`exp_erfc`].
pub const MAX_EXPONENT: f64 = 700.0;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_156,
    377.485_237_685_302_021,
    3_209.377_589_138_469_47,
    0.185_777_706_184_603_153,
];
const B: [f64; 4] = [
    23.601_290_952_344_120_9,
    244.024_637_934_444_173,
    1_282.616_526_077_372_28,
    2_844.236_833_439_170_62,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_089,
    8.883_149_794_388_375_94,
    66.119_190_637_141_629_5,
    298.635_138_197_400_131,
    881.952_221_241_769_09,
    1_712.047_612_634_070_58,
    2_051.078_377_826_071_47,
    1_230.339_354_797_997_25,
    2.153_115_354_744_038_46e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_834_7,
    117.693_950_891_312_499,
    537.181_101_862_009_858,
    1_621.389_574_566_690_19,
    3_290.799_235_733_459_63,
    4_362.619_090_143_247_16,
    3_439.367_674_143_721_64,
    1_230.339_354_803_749_42,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_344,
    0.360_344_899_949_804_439,
    0.125_781_726_111_229_246,
    0.016_083_785_148_742_276_6,
    6.587_491_615_298_378_03e-4,
    0.016_315_387_137_302_097_8,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_42,
    1.872_952_849_923_460_47,
    0.527_905_102_951_428_412,
    0.060_518_341_312_441_319_1,
    0.002_335_204_976_268_691_85,
];

/// erf(x)/x for |x| <= THRESHOLD, as a function of z = x².
fn small_ratio(z: f64) -> f64 {
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    (num + A[3]) / (den + B[3])
}

/// erfcx(y) for THRESHOLD < y <= 4.
fn mid_scaled(y: f64) -> f64 {
    let mut num = C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + C[i]) * y;
        den = (den + D[i]) * y;
    }
    (num + C[7]) / (den + D[7])
}

/// erfcx(y) for y > 4.
fn large_scaled(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let mut num = P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + P[i]) * z;
        den = (den + Q[i]) * z;
    }
    let r = z * (num + P[4]) / (den + Q[4]);
    (FRAC_1_SQRT_PI - r) / y
}

/// erfcx(y) for y > THRESHOLD.
fn scaled_tail(y: f64) -> f64 {
    if y <= 4.0 {
        mid_scaled(y)
    } else {
        large_scaled(y)
    }
}

/// e^{-y²} with y split into a 1/16-grid part and a remainder.
fn exp_neg_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    (-head * head).exp() * (-(y - head) * (y + head)).exp()
}

fn exp_pos_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    (head * head).exp() * ((y - head) * (y + head)).exp()
}

/// erfc(|x|) for |x| > THRESHOLD.
fn erfc_tail(y: f64) -> f64 {
    if y >= XBIG {
        0.0
    } else {
        scaled_tail(y) * exp_neg_square(y)
    }
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESHOLD {
        return x * small_ratio(y * y);
    }
    let t = 1.0 - erfc_tail(y);
    if x < 0.0 {
        -t
    } else {
        t
    }
}

pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESHOLD {
        return 1.0 - x * small_ratio(y * y);
    }
    let t = erfc_tail(y);
    if x < 0.0 {
        2.0 - t
    } else {
        t
    }
}

/// Scaled complementary error function e^{x²}·erfc(x).
///
/// Returns +∞ once 2e^{x²} overflows (x below about −26.6).
pub fn erfcx(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESHOLD {
        let z = y * y;
        return z.exp() * (1.0 - x * small_ratio(z));
    }
    if x >= 0.0 {
        return scaled_tail(y);
    }
    if y * y > 709.0 {
        return f64::INFINITY;
    }
    2.0 * exp_pos_square(y) - scaled_tail(y)
}

/// `a - b*b` with the square carried to twice working precision.
fn exponent_gap(a: f64, b: f64) -> f64 {
    let sq = b * b;
    let err = b.mul_add(b, -sq);
    (a - sq) - err
}

/// e^a·erfc(b) without forming e^a or erfc(b) separately when b ≥ 0.
///
/// For b ≥ 0 this is e^{a−b²}·erfcx(b); for b < 0, where erfc(b) ∈ (1, 2),
/// it is e^a·(2 − erfc(|b|)).
pub fn exp_erfc(a: f64, b: f64) -> Result<f64> {
    let controlling = if b >= 0.0 { exponent_gap(a, b) } else { a };
    if controlling > MAX_EXPONENT {
        return Err(Error::Overflow { exponent: controlling });
    }
    Ok(exp_erfc_unchecked(a, b))
}

/// [`exp_erfc`] for callers whose exponents are bounded by construction.
pub(crate) fn exp_erfc_unchecked(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        exponent_gap(a, b).exp() * erfcx(b)
    } else {
        a.exp() * erfc(b)
    }
}

/// A resolved e^a·erfc(b) product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableErfcProduct {
    pub log_prefactor: f64,
    pub erfc_arg: f64,
    pub value: f64,
}

impl StableErfcProduct {
    pub fn new(log_prefactor: f64, erfc_arg: f64) -> Result<Self> {
        let value = exp_erfc(log_prefactor, erfc_arg)?;
        Ok(StableErfcProduct {
            log_prefactor,
            erfc_arg,
            value,
        })
    }
}
