//! Closed forms checked against the numerical oracles.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::density::{uniform_grid, ImpurityDensity};
use crate::energy::{lattice_energy, pair_energy, q_integral, r_integral, single_impurity_energy, DEGENERATE_GAP};
use crate::error::{Error, Result};
use crate::modes::{
    chemical_potential, effective_modes, eta_with_drive, eta_zero_drive, numeric_modes, threshold_omega,
    width_asymptotics,
};
use crate::oracle::{convolve_green, extrapolated_energy, q_quadrature, solve_fd, FdSystem};
use crate::profiles::{effective_deformations, f_kernel, residual};
use crate::units::{Component, MixtureParams, RamanDrive, HBAR};

/// Seed of every randomised check.
pub const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level `{other}` (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub level: Level,
    /// Perturbs every closed-form value by one part in 10³ before comparing.
    pub tamper: bool,
}

impl VerifyOptions {
    fn closed(&self, v: f64) -> f64 {
        if self.tamper {
            v * (1.0 + 1e-3)
        } else {
            v
        }
    }

    fn draws(&self, quick: usize, full: usize) -> usize {
        match self.level {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            tolerance,
            measured,
            passed: measured <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "WARN  {w}")?;
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{tag}  {:<44} measured {:.3e}  tolerance {:.1e}",
                c.name, c.measured, c.tolerance
            )?;
        }
        for n in &self.notes {
            writeln!(f, "NOTE  {n}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    let peak = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / peak
}

/// Grid spacing and tail length for the FD oracle: h = h_eta/η_max, 30/η_min.
pub fn fd_grid(p: &MixtureParams, drive: &RamanDrive, h_eta: f64) -> Result<(f64, f64)> {
    let (slow, fast) = FdSystem::new(p, drive)?.decay_rates()?;
    Ok((h_eta / fast, 30.0 / slow))
}

/// Max relative deviation of FD from closed-form θ_A, θ_B for one impurity.
pub fn profile_deviation(p: &MixtureParams, drive: &RamanDrive, h_eta: f64, tamper: bool) -> Result<f64> {
    let rho = ImpurityDensity::single(p.sigma)?;
    let (h, ext) = fd_grid(p, drive, h_eta)?;
    let sol = solve_fd(p, drive, &rho, h, ext)?;
    let prof = effective_deformations(p, drive, &rho, &sol.grid)?;
    let scale = if tamper { 1.0 + 1e-3 } else { 1.0 };
    let a: Vec<f64> = prof.theta_a.iter().map(|v| v * scale).collect();
    let b: Vec<f64> = prof.theta_b.iter().map(|v| v * scale).collect();
    Ok(max_rel_dev(&sol.theta_a, &a).max(max_rel_dev(&sol.theta_b, &b)))
}

/// Parameters with every coupling, the density and σ scaled by factors in [0.8, 1.2].
pub fn perturbed_params(base: &MixtureParams, rng: &mut impl Rng) -> MixtureParams {
    let mut p = base.clone();
    let mut f = || rng.gen_range(0.8..1.2);
    p.g_aa *= f();
    p.g_bb *= f();
    p.g_ab *= f();
    p.g_imp_a *= f();
    p.g_imp_b *= f();
    p.sigma *= f();
    let n = f();
    p.n0_a *= n;
    p.n0_b *= n;
    p
}

/// Worst relative deviation of the single-impurity binding and the pair
/// interaction from the Richardson-extrapolated FD energies.
pub fn energy_assembly_deviation(
    p: &MixtureParams,
    drive: &RamanDrive,
    d: f64,
    opts: &VerifyOptions,
) -> Result<(f64, f64)> {
    let (h, ext) = fd_grid(p, drive, 0.02)?;
    let single = ImpurityDensity::single(p.sigma)?;
    let pair = ImpurityDensity::pair(d, p.sigma)?;
    let e1 = extrapolated_energy(p, drive, &single, h, ext)?;
    let e2 = extrapolated_energy(p, drive, &pair, h, ext)?;
    let s = single_impurity_energy(p, drive)?;
    let pe = pair_energy(p, drive, d)?;
    let a0 = s.total - s.binding;
    let d_single = rel(e1 - a0, opts.closed(s.binding));
    let d_pair = rel(e2 - 2.0 * e1, opts.closed(pe.delta_e));
    Ok((d_single, d_pair))
}

/// Energy density of the uniform mixture as a function of the two amplitudes.
fn uniform_energy(p: &MixtureParams, drive: &RamanDrive, psi_a: f64, psi_b: f64) -> f64 {
    let (a2, b2) = (psi_a * psi_a, psi_b * psi_b);
    p.g_aa * a2 * a2 + p.g_bb * b2 * b2 + p.g_ab * a2 * b2 - HBAR * drive.omega_rabi * psi_a * psi_b
}

/// μ_A from a centred derivative of the uniform energy density, ∂e/∂ψ_A / (2ψ_A).
pub fn numeric_chemical_potential(p: &MixtureParams, drive: &RamanDrive) -> f64 {
    let (na, nb) = p.component_densities();
    let (pa, pb) = (na.sqrt(), nb.sqrt());
    let h = 1e-4 * pa;
    let de = (uniform_energy(p, drive, pa + h, pb) - uniform_energy(p, drive, pa - h, pb)) / (2.0 * h);
    de / (2.0 * pa)
}

pub fn run(cfg: &RunConfig, opts: &VerifyOptions) -> Result<VerifyReport> {
    let p = &cfg.params;
    let mut report = VerifyReport {
        warnings: p.warnings(),
        ..Default::default()
    };
    let checks = &mut report.checks;
    let lim = threshold_omega(p)?;
    let drive_at = |f: f64| RamanDrive::new(f * lim);

    // modes
    let (zp, zm) = eta_zero_drive(p)?;
    let m0 = effective_modes(p, &RamanDrive::OFF)?;
    checks.push(Check::at_most(
        "eta at zero drive vs zero-drive closed form",
        rel(opts.closed(m0.eta_plus), zp).max(rel(m0.eta_minus, zm)),
        1e-12,
    ));
    let small = effective_modes(p, &drive_at(1e-6)?)?;
    checks.push(Check::at_most(
        "eta at 1e-6 omega_lim vs zero drive",
        rel(opts.closed(small.eta_plus), zp).max(rel(small.eta_minus, zm)),
        1e-5,
    ));
    let mut worst: f64 = 0.0;
    for i in 0..=24 {
        let drive = drive_at(10f64.powf(-3.0 + 0.25 * i as f64))?;
        let (cp, cm) = eta_with_drive(p, &drive)?;
        let num = numeric_modes(p, &drive)?;
        worst = worst
            .max(rel(opts.closed(cp), num.eta_plus))
            .max(rel(cm, num.eta_minus));
    }
    checks.push(Check::at_most(
        "eta closed form vs eigensolver, 1e-3..1e3 lim",
        worst,
        1e-10,
    ));
    let asym = width_asymptotics(p)?;
    let strong = drive_at(1e3)?;
    let ms = effective_modes(p, &strong)?;
    checks.push(Check::at_most(
        "d_plus plateau at 1e3 omega_lim",
        rel(opts.closed(1.0 / ms.eta_plus), asym.d_plus_limit),
        1e-2,
    ));
    checks.push(Check::at_most(
        "d_minus sqrt(omega) at 1e3 omega_lim",
        rel(opts.closed(strong.omega_rabi.sqrt() / ms.eta_minus), asym.d_minus_scale),
        1e-2,
    ));
    let mu = chemical_potential(p, &drive_at(1.0)?, Component::A)?;
    checks.push(Check::at_most(
        "mu_A vs derivative of uniform energy",
        rel(opts.closed(mu), numeric_chemical_potential(p, &drive_at(1.0)?)),
        1e-7,
    ));

    // profiles
    let rho = ImpurityDensity::single(p.sigma)?;
    for f in [0.0, 0.5, 1.0, 2.0] {
        let drive = drive_at(f)?;
        let coarse = profile_deviation(p, &drive, 0.02, opts.tamper)?;
        let fine = profile_deviation(p, &drive, 0.01, opts.tamper)?;
        checks.push(Check::at_most(
            format!("FD profile deviation, omega = {f} lim"),
            fine,
            1e-4,
        ));
        checks.push(Check::at_most(
            format!("FD convergence order - 2, omega = {f} lim"),
            ((coarse / fine).log2() - 2.0).abs(),
            0.1,
        ));
    }
    let drive = drive_at(0.5)?;
    let (h, ext) = fd_grid(p, &drive, 0.04)?;
    let mut res = Vec::new();
    for k in 0..3 {
        let hk = h / f64::from(1 << k);
        let n = (2.0 * ext / hk).round() as usize + 1;
        let grid = uniform_grid(-ext, ext, n);
        let mut prof = effective_deformations(p, &drive, &rho, &grid)?;
        if opts.tamper {
            prof.theta_a.iter_mut().for_each(|v| *v *= 1.0 + 1e-3);
        }
        res.push(residual(&prof, p, &drive, &rho)?);
    }
    checks.push(Check::at_most(
        "closed-form residual order - 2",
        ((res[1] / res[2]).log2() - 2.0).abs(),
        0.1,
    ));

    // kernel
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.draws(20, 100) {
        let eta = m0.eta_minus * rng.gen_range(0.5..3.0);
        let x = rng.gen_range(-8.0..8.0) / eta;
        let quad = convolve_green(eta, &rho, x)?;
        worst = worst.max(rel(opts.closed(f_kernel(p.sigma, eta, x)), quad));
    }
    checks.push(Check::at_most("F kernel vs quadrature convolution", worst, 1e-8));

    // Q and R
    let mut worst: f64 = 0.0;
    for _ in 0..opts.draws(10, 50) {
        let sigma = p.sigma * rng.gen_range(0.5..1.5);
        let ei = m0.eta_minus * rng.gen_range(0.5..4.0);
        let ej = m0.eta_minus * rng.gen_range(0.5..4.0);
        let d = rng.gen_range(0.0..5.0) * p.lattice_a;
        worst = worst.max(rel(
            opts.closed(q_integral(sigma, ei, ej, d)),
            q_quadrature(sigma, ei, ej, d)?,
        ));
    }
    checks.push(Check::at_most("Q closed form vs triple integral", worst, 1e-7));
    let mut worst: f64 = 0.0;
    for d in [0.0, p.lattice_a, 3.0 * p.lattice_a] {
        let e = m0.eta_minus;
        let r = r_integral(p.sigma, e, d);
        let q = |gap: f64| q_integral(p.sigma, e * (1.0 + 0.5 * gap), e * (1.0 - 0.5 * gap), d);
        // both sides of the switch to the degenerate form, then the approach to R
        let above = q(DEGENERATE_GAP * 1.001);
        let below = q(DEGENERATE_GAP * 0.999);
        worst = worst.max(((opts.closed(above) - below) / r).abs());
        for gap in [1e-4, 3e-5] {
            worst = worst.max(rel(opts.closed(q(gap)), r));
        }
    }
    checks.push(Check::at_most("Q -> R degenerate limit", worst, 1e-6));

    // energies
    let mut worst_single: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    for i in 0..opts.draws(4, 20) {
        let q = if i == 0 {
            p.clone()
        } else {
            perturbed_params(p, &mut rng)
        };
        let f = [0.0, 0.5, 1.0, 2.0][i % 4];
        let drive = RamanDrive::new(f * threshold_omega(&q)?)?;
        let d = rng.gen_range(0.0..3.0) * q.lattice_a;
        let (s, pr) = energy_assembly_deviation(&q, &drive, d, opts)?;
        worst_single = worst_single.max(s);
        worst_pair = worst_pair.max(pr);
    }
    checks.push(Check::at_most(
        "single-impurity energy vs FD assembly",
        worst_single,
        1e-5,
    ));
    checks.push(Check::at_most("pair interaction vs FD assembly", worst_pair, 1e-5));
    let drive = drive_at(1.0)?;
    let d = p.lattice_a;
    let two = lattice_energy(p, &drive, &ImpurityDensity::pair(d, p.sigma)?)?;
    let s = single_impurity_energy(p, &drive)?;
    let pe = pair_energy(p, &drive, d)?;
    checks.push(Check::at_most(
        "lattice additivity, two sites",
        rel(opts.closed(two.total), 2.0 * s.total + pe.delta_e),
        1e-12,
    ));

    // interaction at zero drive
    let eta_slow = m0.eta_min();
    let e0 = pair_energy(p, &RamanDrive::OFF, 0.0)?.delta_e;
    let tail = pair_energy(p, &RamanDrive::OFF, 30.0 / eta_slow)?.delta_e;
    checks.push(Check::at_most(
        "|dE(30/eta_min)| / |dE(0)|",
        (tail / opts.closed(e0)).abs(),
        1e-8,
    ));
    let mut min_at_zero = true;
    for i in 1..=50 {
        let d = 5.0 * p.lattice_a * f64::from(i) / 50.0;
        min_at_zero &= pair_energy(p, &RamanDrive::OFF, d)?.delta_e > opts.closed(e0);
    }
    checks.push(Check::at_most(
        "dE minimum at d = 0 (0 = yes)",
        if min_at_zero { 0.0 } else { 1.0 },
        0.0,
    ));

    report.notes.push(format!(
        "omega_lim / 2pi = {:.2} Hz",
        lim / (2.0 * std::f64::consts::PI)
    ));
    match crate::energy::crossover_omega(p, p.lattice_a) {
        Ok(w) => report.notes.push(format!(
            "slope of dE at d = a changes sign at omega = {:.4} omega_lim",
            w / lim
        )),
        Err(Error::NoSignChange { .. }) => report
            .notes
            .push("slope of dE at d = a keeps its sign over [0, 10 omega_lim]".to_string()),
        Err(e) => return Err(e),
    }
    Ok(report)
}
