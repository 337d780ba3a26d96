//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::density::ImpurityDensity;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Limit on the number of subintervals before giving up.
pub const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Piece> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            intervals: 0,
            error_estimate: f64::INFINITY,
        });
    }
    Ok(Piece { lo, hi, value, error })
}

/// Integral and error estimate from [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Integrates `f` over [lo, hi] until the estimated error is below
/// max(abs_tol, rel_tol·|I|). `breaks` inside (lo, hi) are always interval
/// boundaries, so kinks placed there do not slow convergence.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(gk15(&mut f, w[0], w[1])?);
    }
    loop {
        // re-sum each round so the totals carry no drift
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence {
                intervals: heap.len(),
                error_estimate: error,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::QuadratureNonConvergence {
                intervals: heap.len() + 1,
                error_estimate: error,
            });
        }
        heap.push(gk15(&mut f, worst.lo, mid)?);
        heap.push(gk15(&mut f, mid, worst.hi)?);
    }
}

/// Half-width, in σ, of the window each gaussian is integrated over.
const GAUSS_WINDOW: f64 = 12.0;

/// ∫ (1/2η) e^{−η|x−x′|} ρ(x′) dx′ by quadrature, one window per impurity.
pub fn convolve_green(eta: f64, rho: &ImpurityDensity, x: f64) -> Result<f64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", "must be finite and > 0"));
    }
    let sigma = rho.sigma;
    let norm = 1.0 / (std::f64::consts::PI.sqrt() * sigma);
    let mut total = 0.0;
    for (&c, &n) in rho.centers.iter().zip(&rho.occupations) {
        if n == 0.0 {
            continue;
        }
        let integrand = |y: f64| {
            let u = (y - c) / sigma;
            (-eta * (x - y).abs() - u * u).exp()
        };
        let lo = c - GAUSS_WINDOW * sigma;
        let hi = c + GAUSS_WINDOW * sigma;
        // positive integrand: a purely relative target also holds far out in the tails
        let est = integrate(integrand, lo, hi, &[x, c], 0.0, 1e-13)?;
        total += n * norm * est.value / (2.0 * eta);
    }
    Ok(total)
}

/// Overlap ∫ F_i(y) F_j(y − d) dy of two single-impurity deformation kernels
/// (unit gaussians at 0 and at d), computed with nested quadratures.
pub fn q_quadrature(sigma: f64, eta_i: f64, eta_j: f64, d: f64) -> Result<f64> {
    for (name, v) in [("sigma", sigma), ("eta_i", eta_i), ("eta_j", eta_j)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, "must be finite and > 0"));
        }
    }
    let at_origin = ImpurityDensity::single(sigma)?;
    let shifted = ImpurityDensity::new(vec![d], vec![1.0], sigma)?;
    let reach = 40.0 / eta_i.min(eta_j) + GAUSS_WINDOW * sigma;
    let lo = d.min(0.0) - reach;
    let hi = d.max(0.0) + reach;
    let mut failure = None;
    let integrand = |y: f64| {
        let a = convolve_green(eta_i, &at_origin, y);
        let b = convolve_green(eta_j, &shifted, y);
        match (a, b) {
            (Ok(a), Ok(b)) => a * b,
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let est = integrate(integrand, lo, hi, &[0.0, d], 0.0, 1e-10);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}
