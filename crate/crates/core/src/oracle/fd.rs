//! Second-order finite differences for (d²/dx² − M)θ = γρ with θ = 0 at the
//! domain ends, solved by block-tridiagonal elimination.

use crate::density::{uniform_grid, ImpurityDensity};
use crate::error::{Error, Result};
use crate::units::{MixtureParams, RamanDrive, HBAR};

/// Largest accepted spacing times the fastest decay rate.
pub const MAX_H_ETA: f64 = 0.05;
/// Smallest accepted tail length times the slowest decay rate.
pub const MIN_EXTENT_ETA: f64 = 12.0;

type Mat2 = [[f64; 2]; 2];

fn inverse(m: &Mat2) -> Result<Mat2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[1][1].abs()).max(m[0][1].abs()).max(m[1][0].abs());
    if !(det.abs() > 1e-14 * scale * scale) {
        return Err(Error::SingularSystem(format!("pivot block determinant {det:e}")));
    }
    Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

fn mul_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// The linear system written out from the mean-field functional.
#[derive(Debug, Clone, Copy)]
pub struct FdSystem {
    pub matrix: Mat2,
    pub source: [f64; 2],
}

impl FdSystem {
    pub fn new(p: &MixtureParams, drive: &RamanDrive) -> Result<Self> {
        p.validate()?;
        let (na, nb) = p.component_densities();
        let scale = 2.0 * p.m_b / (HBAR * HBAR);
        let raman = 0.5 * HBAR * drive.omega_rabi;
        let cross = scale * (2.0 * p.g_ab * (na * nb).sqrt() - raman);
        Ok(FdSystem {
            matrix: [
                [scale * (4.0 * p.g_aa * na + raman * (nb / na).sqrt()), cross],
                [cross, scale * (4.0 * p.g_bb * nb + raman * (na / nb).sqrt())],
            ],
            source: [scale * p.g_imp_a * na.sqrt(), scale * p.g_imp_b * nb.sqrt()],
        })
    }

    /// Square roots of the two eigenvalues, (slowest, fastest).
    pub fn decay_rates(&self) -> Result<(f64, f64)> {
        let m = &self.matrix;
        let mean = 0.5 * (m[0][0] + m[1][1]);
        let radius = (0.5 * (m[0][0] - m[1][1])).hypot(0.5 * (m[0][1] + m[1][0]));
        let low = mean - radius;
        if !(low > 0.0) {
            return Err(Error::SingularSystem(format!(
                "coupling matrix eigenvalue {low:e} m^-2 is not positive"
            )));
        }
        Ok((low.sqrt(), (mean + radius).sqrt()))
    }
}

/// Converged finite-difference deformations including the zero end points.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub grid: Vec<f64>,
    pub theta_a: Vec<f64>,
    pub theta_b: Vec<f64>,
    pub h: f64,
    /// Max-norm residual of the discrete equations divided by max|γρ|.
    pub residual_norm: f64,
}

impl FdSolution {
    /// Largest |θ| next to the boundary relative to the peak |θ|.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self
            .theta_a
            .iter()
            .chain(&self.theta_b)
            .fold(0.0f64, |a, v| a.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.grid.len();
        [
            self.theta_a[1],
            self.theta_b[1],
            self.theta_a[n - 2],
            self.theta_b[n - 2],
        ]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
            / peak
    }
}

/// Solves on [−(outer + extent), outer + extent] where `outer` is the
/// outermost impurity. The spacing used is the largest one not above `h`
/// that divides the domain into an even number of intervals.
pub fn solve_fd(
    p: &MixtureParams,
    drive: &RamanDrive,
    rho: &ImpurityDensity,
    h: f64,
    extent: f64,
) -> Result<FdSolution> {
    let sys = FdSystem::new(p, drive)?;
    let (slow, fast) = sys.decay_rates()?;
    let limit = MAX_H_ETA / fast;
    if !(h > 0.0) || h > limit {
        return Err(Error::GridTooCoarse { spacing: h, limit });
    }
    let required = MIN_EXTENT_ETA / slow;
    if !(extent >= required) {
        return Err(Error::DomainTooShort { extent, required });
    }
    let half = rho.outermost() + extent;
    // an even count keeps x = 0 on the grid
    let intervals = 2 * (half / h).ceil() as usize;
    let grid = uniform_grid(-half, half, intervals + 1);
    let h = 2.0 * half / intervals as f64;
    let e = 1.0 / (h * h);
    let m = sys.matrix;
    let diag: Mat2 = [[-2.0 * e - m[0][0], -m[0][1]], [-m[1][0], -2.0 * e - m[1][1]]];

    let source: Vec<[f64; 2]> = grid
        .iter()
        .map(|&x| {
            let r = rho.density(x);
            [sys.source[0] * r, sys.source[1] * r]
        })
        .collect();

    // forward sweep over the interior nodes 1..intervals
    let n = intervals - 1;
    let mut inv_w: Vec<Mat2> = Vec::with_capacity(n);
    let mut y: Vec<[f64; 2]> = Vec::with_capacity(n);
    for j in 0..n {
        let f = source[j + 1];
        let (w, rhs) = if j == 0 {
            (diag, f)
        } else {
            let prev = &inv_w[j - 1];
            let w = [
                [diag[0][0] - e * e * prev[0][0], diag[0][1] - e * e * prev[0][1]],
                [diag[1][0] - e * e * prev[1][0], diag[1][1] - e * e * prev[1][1]],
            ];
            let carried = mul_vec(prev, y[j - 1]);
            (w, [f[0] - e * carried[0], f[1] - e * carried[1]])
        };
        inv_w.push(inverse(&w)?);
        y.push(rhs);
    }
    let mut theta = vec![[0.0; 2]; intervals + 1];
    for j in (0..n).rev() {
        let next = theta[j + 2];
        let rhs = [y[j][0] - e * next[0], y[j][1] - e * next[1]];
        theta[j + 1] = mul_vec(&inv_w[j], rhs);
    }

    let mut worst: f64 = 0.0;
    let mut source_max: f64 = 0.0;
    for j in 1..intervals {
        for c in 0..2 {
            let lap = (theta[j + 1][c] - 2.0 * theta[j][c] + theta[j - 1][c]) * e;
            let mt = m[c][0] * theta[j][0] + m[c][1] * theta[j][1];
            worst = worst.max((lap - mt - source[j][c]).abs());
            source_max = source_max.max(source[j][c].abs());
        }
    }
    let residual_norm = if source_max > 0.0 { worst / source_max } else { worst };
    Ok(FdSolution {
        grid,
        theta_a: theta.iter().map(|t| t[0]).collect(),
        theta_b: theta.iter().map(|t| t[1]).collect(),
        h,
        residual_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::reference_params;

    fn sized(p: &MixtureParams, drive: &RamanDrive, h_eta: f64) -> (f64, f64) {
        let (slow, fast) = FdSystem::new(p, drive).unwrap().decay_rates().unwrap();
        (h_eta / fast, 30.0 / slow)
    }

    #[test]
    fn zero_source() {
        let p = reference_params();
        let rho = ImpurityDensity::empty(p.sigma).unwrap();
        let (h, ext) = sized(&p, &RamanDrive::OFF, 0.05);
        let sol = solve_fd(&p, &RamanDrive::OFF, &rho, h, ext).unwrap();
        assert!(sol.theta_a.iter().chain(&sol.theta_b).all(|v| *v == 0.0));
        assert_eq!(sol.residual_norm, 0.0);
    }

    #[test]
    fn preconditions() {
        let p = reference_params();
        let rho = ImpurityDensity::single(p.sigma).unwrap();
        let (h, ext) = sized(&p, &RamanDrive::OFF, 0.05);
        assert!(matches!(
            solve_fd(&p, &RamanDrive::OFF, &rho, 2.0 * h, ext),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(matches!(
            solve_fd(&p, &RamanDrive::OFF, &rho, h, 0.2 * ext),
            Err(Error::DomainTooShort { .. })
        ));
        let mut bad = p.clone();
        bad.g_ab = 5.0 * bad.g_aa;
        assert!(matches!(
            solve_fd(&bad, &RamanDrive::OFF, &rho, h, ext),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn solution_is_decaying_and_depleted() {
        let p = reference_params();
        let drive = RamanDrive::new(2000.0).unwrap();
        let rho = ImpurityDensity::single(p.sigma).unwrap();
        let (h, ext) = sized(&p, &drive, 0.04);
        let sol = solve_fd(&p, &drive, &rho, h, ext).unwrap();
        assert!(sol.residual_norm < 1e-10);
        assert!(sol.edge_ratio() < 1e-10);
        let mid = sol.grid.len() / 2;
        assert!(sol.grid[mid].abs() < 1e-12 * sol.grid[0].abs());
        assert!(sol.theta_a[mid] < 0.0 && sol.theta_b[mid] < 0.0);
        // mirror symmetry of a centred source
        let last = sol.grid.len() - 1;
        assert!((sol.theta_a[10] - sol.theta_a[last - 10]).abs() < 1e-10 * sol.theta_a[mid].abs());
    }
}
