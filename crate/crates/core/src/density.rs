//! Impurity density in the deep-lattice limit and uniform grids.

use crate::error::{Error, Result};

/// ρ(x) = Σ_m n_m (πσ²)^{-1/2} exp(−(x − x_m)²/σ²).
///
/// Note that σ here is √2 times the standard deviation of each gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpurityDensity {
    pub centers: Vec<f64>,
    pub occupations: Vec<f64>,
    pub sigma: f64,
}

impl ImpurityDensity {
    pub fn new(centers: Vec<f64>, occupations: Vec<f64>, sigma: f64) -> Result<Self> {
        if centers.len() != occupations.len() {
            return Err(Error::invalid("occupations", "need one occupation per center"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(
                "sigma",
                format!("must be finite and > 0, got {sigma:e}"),
            ));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("centers", "must be finite"));
        }
        if occupations.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
            return Err(Error::invalid("occupations", "must be finite and >= 0"));
        }
        Ok(ImpurityDensity {
            centers,
            occupations,
            sigma,
        })
    }

    pub fn empty(sigma: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), sigma)
    }

    /// One atom at the origin.
    pub fn single(sigma: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![1.0], sigma)
    }

    /// One atom each at ±d/2.
    pub fn pair(d: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![-0.5 * d, 0.5 * d], vec![1.0, 1.0], sigma)
    }

    /// Sites spaced by `spacing`, centred on the origin.
    pub fn lattice(spacing: f64, occupations: Vec<f64>, sigma: f64) -> Result<Self> {
        let mid = 0.5 * (occupations.len() as f64 - 1.0);
        let centers = (0..occupations.len()).map(|m| (m as f64 - mid) * spacing).collect();
        Self::new(centers, occupations, sigma)
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn total_occupation(&self) -> f64 {
        self.occupations.iter().sum()
    }

    /// Largest |x_m|, zero without impurities.
    pub fn outermost(&self) -> f64 {
        self.centers.iter().fold(0.0, |acc: f64, c| acc.max(c.abs()))
    }

    pub fn density(&self, x: f64) -> f64 {
        let norm = 1.0 / (std::f64::consts::PI.sqrt() * self.sigma);
        self.centers
            .iter()
            .zip(&self.occupations)
            .map(|(c, n)| {
                let u = (x - c) / self.sigma;
                n * norm * (-u * u).exp()
            })
            .sum()
    }

    /// Same centers and width, occupations multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.centers.clone(),
            self.occupations.iter().map(|n| n * factor).collect(),
            self.sigma,
        )
    }
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Spacing of a uniform grid with at least three points.
pub fn grid_spacing(grid: &[f64]) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::NonUniformGrid);
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::NonUniformGrid);
    }
    let scale = grid[0].abs().max(grid[grid.len() - 1].abs());
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h + 4.0 * f64::EPSILON * scale {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok(h)
}
