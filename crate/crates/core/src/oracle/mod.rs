//! Numerical reference solutions, written without the closed forms.
//!
//! Only [`crate::units`], [`crate::density`] and [`crate::specfun`] are shared
//! with the analytic modules.

pub mod fd;
pub mod quadrature;

pub use fd::{solve_fd, FdSolution, FdSystem};
pub use quadrature::{convolve_green, integrate, q_quadrature, Estimate};

use crate::density::ImpurityDensity;
use crate::error::{Error, Result};
use crate::units::{MixtureParams, RamanDrive, HBAR};

/// Mean-field energy of the solved deformations:
///
/// ```text
/// E = Σ_i g_i ñ_i Σ_m n_m + Σ_i g_i √ñ_i ∫ ρ θ_i dx − ħΩ ∫ θ_A θ_B dx
/// ```
///
/// The integrals use the trapezoid rule on the solution grid.
pub fn energy_from_profiles(
    p: &MixtureParams,
    drive: &RamanDrive,
    rho: &ImpurityDensity,
    sol: &FdSolution,
) -> Result<f64> {
    p.validate()?;
    if sol.grid.len() < 3 || sol.theta_a.len() != sol.grid.len() || sol.theta_b.len() != sol.grid.len() {
        return Err(Error::NonUniformGrid);
    }
    let (na, nb) = p.component_densities();
    let uniform = (p.g_imp_a * na + p.g_imp_b * nb) * rho.total_occupation();
    let (ca, cb) = (p.g_imp_a * na.sqrt(), p.g_imp_b * nb.sqrt());
    let last = sol.grid.len() - 1;
    let mut impurity = 0.0;
    let mut overlap = 0.0;
    for j in 0..=last {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        let r = rho.density(sol.grid[j]);
        impurity += w * r * (ca * sol.theta_a[j] + cb * sol.theta_b[j]);
        overlap += w * sol.theta_a[j] * sol.theta_b[j];
    }
    Ok(uniform + sol.h * impurity - HBAR * drive.omega_rabi * sol.h * overlap)
}

/// One Richardson step for a second-order quantity computed at h and h/2.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Energy from two FD solves at `h` and `h/2`, extrapolated in h².
pub fn extrapolated_energy(
    p: &MixtureParams,
    drive: &RamanDrive,
    rho: &ImpurityDensity,
    h: f64,
    extent: f64,
) -> Result<f64> {
    let coarse = solve_fd(p, drive, rho, h, extent)?;
    let fine = solve_fd(p, drive, rho, 0.5 * h, extent)?;
    Ok(richardson(
        energy_from_profiles(p, drive, rho, &coarse)?,
        energy_from_profiles(p, drive, rho, &fine)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::reference_params;

    #[test]
    fn empty_lattice_has_zero_energy() {
        let p = reference_params();
        let rho = ImpurityDensity::empty(p.sigma).unwrap();
        let (slow, fast) = FdSystem::new(&p, &RamanDrive::OFF).unwrap().decay_rates().unwrap();
        let sol = solve_fd(&p, &RamanDrive::OFF, &rho, 0.05 / fast, 30.0 / slow).unwrap();
        assert_eq!(energy_from_profiles(&p, &RamanDrive::OFF, &rho, &sol).unwrap(), 0.0);
    }

    #[test]
    fn richardson_removes_quadratic_error() {
        let f = |h: f64| 2.0 + 3.0 * h * h;
        assert!((richardson(f(0.1), f(0.05)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn binding_lowers_energy() {
        let p = reference_params();
        let rho = ImpurityDensity::single(p.sigma).unwrap();
        let (slow, fast) = FdSystem::new(&p, &RamanDrive::OFF).unwrap().decay_rates().unwrap();
        let e = extrapolated_energy(&p, &RamanDrive::OFF, &rho, 0.04 / fast, 30.0 / slow).unwrap();
        let (na, nb) = p.component_densities();
        assert!(e < p.g_imp_a * na + p.g_imp_b * nb);
    }
}
