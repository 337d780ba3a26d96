//! Deformation profiles θ'±(x) and θ_{A,B}(x).
//!
//! The 1D Green function G(x) = e^{−η|x|}/(2η) solves (d²/dx² − η²)G = −δ.
//! With the equation written as (d²/dx² − M)θ = γρ the normal-mode solution is
//! θ'_k = 𝒦_k Σ_m n_m 𝓕_{σ,η_k}(x − x_m) with 𝒦_k = −(S_kᵀγ), which makes
//! both components depleted at a repulsive impurity.

use std::io::Write;

use rayon::prelude::*;

pub use crate::density::{grid_spacing, uniform_grid, ImpurityDensity};
use crate::error::{Error, Result};
use crate::modes::{coupling_matrix, effective_modes, EffectiveModes};
use crate::specfun::exp_erfc_unchecked;
use crate::units::{MixtureParams, RamanDrive};

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 1 << 14;
/// Default tail length in units of the slowest healing length 1/η_min.
pub const DEFAULT_TAIL: f64 = 30.0;

/// Convolution of G(x) with the unit gaussian (πσ²)^{-1/2} e^{−x²/σ²}:
///
/// ```text
/// 𝓕(x) = (1/4η) [ e^{η(ησ²+4x)/4} erfc(ησ/2 + x/σ) + e^{η(ησ²−4x)/4} erfc(ησ/2 − x/σ) ]
/// ```
///
/// Both exponent gaps are ≤ 0 by construction, so the products stay finite.
pub fn f_kernel(sigma: f64, eta: f64, x: f64) -> f64 {
    let es = eta * sigma;
    let u = x / sigma;
    let first = exp_erfc_unchecked(eta * (eta * sigma * sigma + 4.0 * x) / 4.0, 0.5 * es + u);
    let second = exp_erfc_unchecked(eta * (eta * sigma * sigma - 4.0 * x) / 4.0, 0.5 * es - u);
    (first + second) / (4.0 * eta)
}

/// Sampled deformations on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationProfile {
    pub grid: Vec<f64>,
    pub theta_eff_plus: Vec<f64>,
    pub theta_eff_minus: Vec<f64>,
    pub theta_a: Vec<f64>,
    pub theta_b: Vec<f64>,
    pub modes: EffectiveModes,
}

/// Symmetric grid reaching `DEFAULT_TAIL / η_min` beyond the outermost impurity.
pub fn default_grid(modes: &EffectiveModes, rho: &ImpurityDensity) -> Vec<f64> {
    let half = rho.outermost() + DEFAULT_TAIL / modes.eta_min();
    uniform_grid(-half, half, DEFAULT_POINTS)
}

/// Evaluates the closed-form profiles on `grid` (equal densities only).
pub fn effective_deformations(
    p: &MixtureParams,
    drive: &RamanDrive,
    rho: &ImpurityDensity,
    grid: &[f64],
) -> Result<DeformationProfile> {
    let modes = effective_modes(p, drive)?;
    Ok(profile_from_modes(modes, rho, grid))
}

pub fn profile_from_modes(modes: EffectiveModes, rho: &ImpurityDensity, grid: &[f64]) -> DeformationProfile {
    let samples: Vec<[f64; 4]> = grid
        .par_iter()
        .map(|&x| {
            let mut fp = 0.0;
            let mut fm = 0.0;
            for (c, n) in rho.centers.iter().zip(&rho.occupations) {
                fp += n * f_kernel(rho.sigma, modes.eta_plus, x - c);
                fm += n * f_kernel(rho.sigma, modes.eta_minus, x - c);
            }
            let tp = modes.k_plus * fp;
            let tm = modes.k_minus * fm;
            let (ta, tb) = modes.transform.to_physical(tp, tm);
            [tp, tm, ta, tb]
        })
        .collect();
    let column = |k: usize| samples.iter().map(|s| s[k]).collect::<Vec<_>>();
    DeformationProfile {
        grid: grid.to_vec(),
        theta_eff_plus: column(0),
        theta_eff_minus: column(1),
        theta_a: column(2),
        theta_b: column(3),
        modes,
    }
}

/// Max-norm residual of (d²/dx² − M)θ − γρ on interior points, divided by max|γρ|.
///
/// Returns the unscaled residual when the source vanishes identically.
pub fn residual(
    profile: &DeformationProfile,
    p: &MixtureParams,
    drive: &RamanDrive,
    rho: &ImpurityDensity,
) -> Result<f64> {
    let h = grid_spacing(&profile.grid)?;
    let m = coupling_matrix(p, drive)?;
    let eig = m.eigen();
    let eta_max = eig.values[0].max(eig.values[1]).max(0.0).sqrt();
    let limit = 0.05 / eta_max;
    if h > limit {
        return Err(Error::GridTooCoarse { spacing: h, limit });
    }
    let (a, b) = (&profile.theta_a, &profile.theta_b);
    let inv_h2 = 1.0 / (h * h);
    let mut worst: f64 = 0.0;
    let mut source_max: f64 = 0.0;
    for j in 1..profile.grid.len() - 1 {
        let r = rho.density(profile.grid[j]);
        let (sa, sb) = (m.gamma_a * r, m.gamma_b * r);
        let lap_a = (a[j + 1] - 2.0 * a[j] + a[j - 1]) * inv_h2;
        let lap_b = (b[j + 1] - 2.0 * b[j] + b[j - 1]) * inv_h2;
        let [ma, mb] = m.apply([a[j], b[j]]);
        worst = worst.max((lap_a - ma - sa).abs()).max((lap_b - mb - sb).abs());
        source_max = source_max.max(sa.abs()).max(sb.abs());
    }
    Ok(if source_max > 0.0 { worst / source_max } else { worst })
}

impl DeformationProfile {
    /// Writes the profile as CSV. `comments` are emitted first as `# ` lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "x,theta_eff_plus,theta_eff_minus,theta_A,theta_B")?;
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                self.grid[i], self.theta_eff_plus[i], self.theta_eff_minus[i], self.theta_a[i], self.theta_b[i]
            )?;
        }
        Ok(())
    }
}
