//! Mean-field energies of static impurities.
//!
//! With θ_A = Σ_k a_k (G_k ∗ ρ) and θ_B = Σ_k b_k (G_k ∗ ρ), where
//! a_k = S_{Ak}𝒦_k and b_k = S_{Bk}𝒦_k, the energy of a lattice filling is
//!
//! ```text
//! E = A₀ Σ_m n_m + Σ_{m,l} n_m n_l [ Σ_k B_k C_k(x_m − x_l) − ħΩ W(x_m − x_l) ]
//! ```
//!
//! with A₀ = Σ_i g_i ñ_i, B_k = P_k 𝒦_k and P_k = Σ_i g_i √ñ_i S_{ik}. Here
//! C_k is the pair kernel (the Green function smeared over both impurity
//! densities) and W = Σ_k a_k b_k ℛ_k + (a₊b₋ + a₋b₊) 𝒬 the overlap of the
//! two condensate deformations. Since 𝒦_k = −(2m/ħ²) P_k, every B_k ≤ 0.

use crate::density::ImpurityDensity;
use crate::error::{Error, Result};
use crate::modes::{effective_modes, threshold_omega, EffectiveModes};
use crate::profiles::f_kernel;
use crate::specfun::{erfcx, exp_erfc_unchecked};
use crate::units::{MixtureParams, RamanDrive, HBAR};

/// Relative gap |η_i − η_j| / max(η_i, η_j) below which 𝒬 is replaced by ℛ.
pub const DEGENERATE_GAP: f64 = 1e-5;

/// Coefficients of the lattice energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCoefficients {
    /// Energy per impurity from the uniform condensates (J).
    pub a0: f64,
    /// In-phase prefactor B₊ (J/m).
    pub b_plus: f64,
    /// Out-of-phase prefactor B₋ (J/m).
    pub b_minus: f64,
    /// Mode amplitudes, B_k = P_k L_k with P_k the projected impurity coupling.
    pub l_plus: f64,
    pub l_minus: f64,
    pub mix_kplus: f64,
    pub mix_kminus: f64,
    /// Weights of each mode in θ_A and θ_B.
    pub weight_a: [f64; 2],
    pub weight_b: [f64; 2],
    pub modes: EffectiveModes,
}

impl EnergyCoefficients {
    pub fn eta(&self) -> [f64; 2] {
        [self.modes.eta_plus, self.modes.eta_minus]
    }

    pub fn b(&self) -> [f64; 2] {
        [self.b_plus, self.b_minus]
    }
}

pub fn coefficients(p: &MixtureParams) -> Result<EnergyCoefficients> {
    coefficients_with_drive(p, &RamanDrive::OFF)
}

pub fn coefficients_with_drive(p: &MixtureParams, drive: &RamanDrive) -> Result<EnergyCoefficients> {
    let modes = effective_modes(p, drive)?;
    let n = p.closed_form_density()?;
    let half = 0.5 * n;
    let root = half.sqrt();
    let [sp, sm] = modes.transform.columns;
    let project = |s: [f64; 2]| root * (p.g_imp_a * s[0] + p.g_imp_b * s[1]);
    Ok(EnergyCoefficients {
        a0: half * (p.g_imp_a + p.g_imp_b),
        b_plus: project(sp) * modes.k_plus,
        b_minus: project(sm) * modes.k_minus,
        l_plus: modes.k_plus,
        l_minus: modes.k_minus,
        mix_kplus: modes.mix_kplus,
        mix_kminus: modes.mix_kminus,
        weight_a: [sp[0] * modes.k_plus, sm[0] * modes.k_minus],
        weight_b: [sp[1] * modes.k_plus, sm[1] * modes.k_minus],
        modes,
    })
}

/// ∫ρ(x)(G ∗ ρ)(x)dx for one impurity: (1/2η) e^{η²σ²/2} erfc(ησ/√2).
pub fn self_kernel(sigma: f64, eta: f64) -> f64 {
    erfcx(eta * sigma / std::f64::consts::SQRT_2) / (2.0 * eta)
}

/// Green function smeared over two impurity densities a distance d apart:
///
/// ```text
/// C(d) = (1/4η)[e^{η²σ²/2 − ηd} erfc((ησ² − d)/(√2σ)) + e^{η²σ²/2 + ηd} erfc((ησ² + d)/(√2σ))]
/// ```
pub fn pair_kernel(sigma: f64, eta: f64, d: f64) -> f64 {
    if d == 0.0 {
        self_kernel(sigma, eta)
    } else {
        f_kernel(std::f64::consts::SQRT_2 * sigma, eta, d.abs())
    }
}

/// Overlap ℛ_{σ,η}(d) = ∫F_η(x)F_η(x − d)dx of two identical kernels, equal to −∂C/∂(η²).
pub fn r_integral(sigma: f64, eta: f64, d: f64) -> f64 {
    let d = d.abs();
    let s2 = sigma * sigma;
    let root2s = std::f64::consts::SQRT_2 * sigma;
    let base = 0.5 * eta * eta * s2;
    let gauss = 2.0 * (2.0 / std::f64::consts::PI).sqrt() * sigma * eta * (-d * d / (2.0 * s2)).exp();
    let near = exp_erfc_unchecked(base - eta * d, (s2 * eta - d) / root2s) * (1.0 + eta * (d - s2 * eta));
    let far = exp_erfc_unchecked(base + eta * d, (s2 * eta + d) / root2s) * (-1.0 + eta * (d + s2 * eta));
    (gauss + near - far) / (8.0 * eta.powi(3))
}

/// Cross overlap 𝒬_{σ,η_i,η_j}(d) = ∫F_{η_i}(x)F_{η_j}(x − d)dx
/// = (C_j(d) − C_i(d))/(η_i² − η_j²), switching to ℛ at the mean η² when the
/// rates nearly coincide.
pub fn q_integral(sigma: f64, eta_i: f64, eta_j: f64, d: f64) -> f64 {
    let gap = (eta_i - eta_j).abs() / eta_i.max(eta_j);
    if gap < DEGENERATE_GAP {
        let mean = (0.5 * (eta_i * eta_i + eta_j * eta_j)).sqrt();
        return r_integral(sigma, mean, d);
    }
    (pair_kernel(sigma, eta_j, d) - pair_kernel(sigma, eta_i, d)) / ((eta_i - eta_j) * (eta_i + eta_j))
}

/// W(d) = ∫θ_A(x)θ_B(x − d)dx per unit occupation.
fn raman_overlap(c: &EnergyCoefficients, sigma: f64, d: f64) -> f64 {
    let [ep, em] = c.eta();
    let (a, b) = (c.weight_a, c.weight_b);
    a[0] * b[0] * r_integral(sigma, ep, d)
        + a[1] * b[1] * r_integral(sigma, em, d)
        + (a[0] * b[1] + a[1] * b[0]) * q_integral(sigma, ep, em, d)
}

/// Energy per occupation pair at separation d, excluding A₀.
fn pair_term(c: &EnergyCoefficients, sigma: f64, drive: &RamanDrive, d: f64) -> f64 {
    let [ep, em] = c.eta();
    let mut e = c.b_plus * pair_kernel(sigma, ep, d) + c.b_minus * pair_kernel(sigma, em, d);
    if drive.omega_rabi > 0.0 {
        e -= HBAR * drive.omega_rabi * raman_overlap(c, sigma, d);
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleImpurityEnergy {
    /// Ground-state energy (J).
    pub total: f64,
    /// total − A₀ (J).
    pub binding: f64,
    /// Part of the binding from direct deformation overlap, −ħΩ W(0) (J).
    pub raman: f64,
}

pub fn single_impurity_energy(p: &MixtureParams, drive: &RamanDrive) -> Result<SingleImpurityEnergy> {
    let c = coefficients_with_drive(p, drive)?;
    let raman = if drive.omega_rabi > 0.0 {
        -HBAR * drive.omega_rabi * raman_overlap(&c, p.sigma, 0.0)
    } else {
        0.0
    };
    let binding = pair_term(&c, p.sigma, drive, 0.0);
    Ok(SingleImpurityEnergy {
        total: c.a0 + binding,
        binding,
        raman,
    })
}

/// Interaction energy of two impurities, E(d) − E(∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEnergy {
    pub delta_e: f64,
    /// 2 B₊ C₊(d) (J).
    pub branch_plus: f64,
    /// 2 B₋ C₋(d) (J).
    pub branch_minus: f64,
    /// −2ħΩ W(d) (J), exactly zero without drive.
    pub raman_cross: f64,
}

pub fn pair_energy(p: &MixtureParams, drive: &RamanDrive, d: f64) -> Result<PairEnergy> {
    let c = coefficients_with_drive(p, drive)?;
    pair_energy_from(&c, p.sigma, drive, d)
}

/// [`pair_energy`] with precomputed coefficients.
pub fn pair_energy_from(c: &EnergyCoefficients, sigma: f64, drive: &RamanDrive, d: f64) -> Result<PairEnergy> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::invalid(
            "d",
            format!("separation must be finite and >= 0, got {d:e}"),
        ));
    }
    let [ep, em] = c.eta();
    let branch_plus = 2.0 * c.b_plus * pair_kernel(sigma, ep, d);
    let branch_minus = 2.0 * c.b_minus * pair_kernel(sigma, em, d);
    let raman_cross = if drive.omega_rabi > 0.0 {
        -2.0 * HBAR * drive.omega_rabi * raman_overlap(c, sigma, d)
    } else {
        0.0
    };
    Ok(PairEnergy {
        delta_e: branch_plus + branch_minus + raman_cross,
        branch_plus,
        branch_minus,
        raman_cross,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeEnergy {
    pub total: f64,
    /// Entry (m, l) is n_m n_l [Σ_k B_k C_k − ħΩ W] at |x_m − x_l| (J).
    pub pairwise: Vec<Vec<f64>>,
}

pub fn lattice_energy(p: &MixtureParams, drive: &RamanDrive, rho: &ImpurityDensity) -> Result<LatticeEnergy> {
    let c = coefficients_with_drive(p, drive)?;
    let pairwise: Vec<Vec<f64>> = rho
        .centers
        .iter()
        .zip(&rho.occupations)
        .map(|(&xm, &nm)| {
            rho.centers
                .iter()
                .zip(&rho.occupations)
                .map(|(&xl, &nl)| nm * nl * pair_term(&c, rho.sigma, drive, (xm - xl).abs()))
                .collect()
        })
        .collect();
    let mut total = c.a0 * rho.total_occupation();
    for row in &pairwise {
        total += row.iter().sum::<f64>();
    }
    Ok(LatticeEnergy { total, pairwise })
}

/// |ΔE(Ω = 0, d = 0)|, the scale used to normalise interaction curves.
pub fn normalization(p: &MixtureParams) -> Result<f64> {
    Ok(pair_energy(p, &RamanDrive::OFF, 0.0)?.delta_e.abs())
}

/// Direction in which a sampled curve changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Neither,
}

pub fn monotonicity(values: &[f64]) -> Monotonicity {
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if !steps.is_empty() && steps.iter().all(|s| *s > 0.0) {
        Monotonicity::Increasing
    } else if !steps.is_empty() && steps.iter().all(|s| *s < 0.0) {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Neither
    }
}

/// ∂ΔE/∂d at `d` by a centred difference.
pub fn pair_slope(p: &MixtureParams, drive: &RamanDrive, d: f64) -> Result<f64> {
    let c = coefficients_with_drive(p, drive)?;
    let step = 1e-4 * d.min(1.0 / c.modes.eta_max());
    let up = pair_energy_from(&c, p.sigma, drive, d + step)?.delta_e;
    let down = pair_energy_from(&c, p.sigma, drive, d - step)?.delta_e;
    Ok((up - down) / (2.0 * step))
}

/// Points of the coarse scan preceding bisection in [`crossover_omega`].
pub const CROSSOVER_SCAN: usize = 200;

/// Smallest Ω in [0, 10 Ω_lim] at which ∂ΔE/∂d at `d_probe` changes sign.
pub fn crossover_omega(p: &MixtureParams, d_probe: f64) -> Result<f64> {
    if !(d_probe > 0.0 && d_probe <= 5.0 * p.lattice_a) {
        return Err(Error::invalid("d_probe", "must lie in (0, 5 lattice_a]"));
    }
    let hi = 10.0 * threshold_omega(p)?;
    let slope = |omega: f64| -> Result<f64> { pair_slope(p, &RamanDrive::new(omega)?, d_probe) };
    let sign = |v: f64| {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut prev = (0.0, sign(slope(0.0)?));
    for i in 1..=CROSSOVER_SCAN {
        let omega = hi * i as f64 / CROSSOVER_SCAN as f64;
        let s = sign(slope(omega)?);
        if prev.1 != 0 && s != 0 && s != prev.1 {
            let (mut a, mut b) = (prev.0, omega);
            let sa = prev.1;
            while b - a > 1e-12 * b {
                let mid = 0.5 * (a + b);
                if sign(slope(mid)?) == sa {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        if s != 0 {
            prev = (omega, s);
        }
    }
    Err(Error::NoSignChange { lo: 0.0, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::uniform_grid;
    use crate::specfun::erfc;
    use crate::units::reference_params;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn no_impurity_coupling() {
        let mut p = reference_params();
        p.g_imp_a = 0.0;
        p.g_imp_b = 0.0;
        let c = coefficients(&p).unwrap();
        assert_eq!((c.a0, c.b_plus, c.b_minus), (0.0, 0.0, 0.0));
        assert!(matches!(
            crossover_omega(&p, p.lattice_a),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn symmetric_mixture_coefficients() {
        let mut p = reference_params();
        p.g_bb = p.g_aa;
        p.g_imp_b = 0.3 * p.g_imp_a;
        let c = coefficients(&p).unwrap();
        assert!((c.mix_kplus - 1.0).abs() < 1e-15 && (c.mix_kminus + 1.0).abs() < 1e-15);
        let n = p.closed_form_density().unwrap();
        let scale = -p.kinetic_scale() * 0.5 * n * 0.5;
        assert!(rel(c.b_plus, scale * (p.g_imp_a + p.g_imp_b).powi(2)) < 1e-13);
        assert!(rel(c.b_minus, scale * (p.g_imp_a - p.g_imp_b).powi(2)) < 1e-13);
        assert_eq!(c.a0, 0.5 * n * (p.g_imp_a + p.g_imp_b));
    }

    #[test]
    fn prefactors_attract() {
        let c = coefficients(&reference_params()).unwrap();
        assert!(c.b_plus < 0.0 && c.b_minus <= 0.0);
    }

    #[test]
    fn kernels() {
        let (s, eta): (f64, f64) = (2e-7, 4e6);
        let es = eta * s;
        let direct = (0.5 * es * es).exp() * erfc(es / 2f64.sqrt()) / (2.0 * eta);
        assert!(rel(self_kernel(s, eta), direct) < 1e-14);
        assert!(rel(pair_kernel(s, eta, 1e-15), self_kernel(s, eta)) < 1e-9);
        assert!(rel(self_kernel(1e-20, eta), 1.0 / (2.0 * eta)) < 1e-12);
        assert!(pair_kernel(s, eta, 40.0 / eta) < 1e-15 * self_kernel(s, eta));
    }

    #[test]
    fn r_is_minus_derivative_of_c() {
        let s = 2e-7;
        for (eta, d) in [(4e6, 0.0), (5e6, 3e-7), (6e6, 1e-6)] {
            let x: f64 = eta * eta;
            let hx = 1e-5 * x;
            let num = (pair_kernel(s, (x - hx).sqrt(), d) - pair_kernel(s, (x + hx).sqrt(), d)) / (2.0 * hx);
            assert!(rel(r_integral(s, eta, d), num) < 1e-7, "eta {eta} d {d}");
        }
    }

    #[test]
    fn q_symmetry_and_limit() {
        let (s, a, b, d) = (2e-7, 4e6, 7e6, 5e-7);
        assert!(rel(q_integral(s, a, b, d), q_integral(s, b, a, d)) < 1e-12);
        let r = r_integral(s, a, d);
        for gap in [1e-2, 1e-3, 1e-4, 2e-5] {
            let q = q_integral(s, a * (1.0 + gap), a * (1.0 - gap), d);
            assert!(rel(q, r) < 2.0 * gap * gap + 1e-9, "gap {gap}");
        }
        // both sides of the switch agree
        let below = q_integral(
            s,
            a * (1.0 + 0.49 * DEGENERATE_GAP),
            a * (1.0 - 0.49 * DEGENERATE_GAP),
            d,
        );
        let above = q_integral(
            s,
            a * (1.0 + 0.51 * DEGENERATE_GAP),
            a * (1.0 - 0.51 * DEGENERATE_GAP),
            d,
        );
        assert!(rel(below, above) < 1e-6);
    }

    #[test]
    fn pair_energy_limits() {
        let p = reference_params();
        let pe = pair_energy(&p, &RamanDrive::OFF, 0.0).unwrap();
        let single = single_impurity_energy(&p, &RamanDrive::OFF).unwrap();
        assert!(rel(pe.delta_e, 2.0 * single.binding) < 1e-14);
        assert_eq!(pe.raman_cross, 0.0);
        let far = pair_energy(&p, &RamanDrive::OFF, 50e-6).unwrap();
        assert!(far.delta_e.abs() < 1e-30);
        let ds = uniform_grid(0.0, 5.0 * p.lattice_a, 50);
        let curve: Vec<f64> = ds
            .iter()
            .map(|&d| pair_energy(&p, &RamanDrive::OFF, d).unwrap().delta_e)
            .collect();
        assert_eq!(monotonicity(&curve), Monotonicity::Increasing);
        assert!(pair_energy(&p, &RamanDrive::OFF, -1.0).is_err());
    }

    #[test]
    fn point_impurity_limit() {
        let mut p = reference_params();
        p.sigma = 1e-15;
        let c = coefficients(&p).unwrap();
        let e = single_impurity_energy(&p, &RamanDrive::OFF).unwrap();
        let point = c.b_plus / (2.0 * c.modes.eta_plus) + c.b_minus / (2.0 * c.modes.eta_minus);
        assert!(rel(e.binding, point) < 1e-7);
    }

    #[test]
    fn lattice_additivity() {
        let p = reference_params();
        let drive = RamanDrive::new(0.7 * threshold_omega(&p).unwrap()).unwrap();
        let d = 2.0 * p.lattice_a;
        let one = lattice_energy(&p, &drive, &ImpurityDensity::single(p.sigma).unwrap()).unwrap();
        let single = single_impurity_energy(&p, &drive).unwrap();
        assert!(rel(one.total, single.total) < 1e-14);
        let two = lattice_energy(&p, &drive, &ImpurityDensity::pair(d, p.sigma).unwrap()).unwrap();
        let pair = pair_energy(&p, &drive, d).unwrap();
        assert!(rel(two.total, 2.0 * single.total + pair.delta_e) < 1e-12);
        assert_eq!(two.pairwise[0][1], two.pairwise[1][0]);
    }

    #[test]
    fn slope_sign_at_zero_drive() {
        let p = reference_params();
        assert!(pair_slope(&p, &RamanDrive::OFF, p.lattice_a).unwrap() > 0.0);
        assert!(crossover_omega(&p, 0.0).is_err());
    }
}
