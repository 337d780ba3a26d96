use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use polaron_core::config::{load_config, RunConfig};
use polaron_core::density::{uniform_grid, ImpurityDensity};
use polaron_core::energy::{normalization, pair_energy, single_impurity_energy};
use polaron_core::modes::{chemical_potential, effective_modes, threshold_omega, width_asymptotics};
use polaron_core::profiles::{default_grid, effective_deformations};
use polaron_core::sweep::{manifest, parse_axis, parse_value, write_sweep, SweepSpec, SweepVariable};
use polaron_core::units::{Component, Dimension};
use polaron_core::verification::{self, Level, VerifyOptions};
use polaron_core::{ErrorKind, RamanDrive};

#[derive(Parser)]
#[command(
    name = "polaron",
    version,
    about = "Static impurities in a Raman-coupled 1D Bose mixture"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` parameter file; reference mixture when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Raman coupling, e.g. `500 Hz`, `3e3 rad/s` or `1.5lim`. Overrides the config.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Impurity separation, e.g. `1.2 um` or `2a`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    distance: Option<String>,
    /// Output file; stdout when omitted (required for `sweep`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Divide energies by |dE(omega = 0, d = 0)|.
    #[arg(long, global = true)]
    normalize: bool,
    /// Sample grid `min,max,count[,log]`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Omega grid of a `sweep both`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_grid: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Effective modes, widths, threshold and chemical potentials.
    Modes,
    /// Deformation profiles of one impurity, or of two with `--distance`.
    Profile,
    /// Ground-state energy of one impurity.
    EnergySingle,
    /// Interaction energy of two impurities at `--distance`.
    EnergyPair,
    /// Energies over a grid of distances, couplings or both.
    Sweep {
        #[arg(value_enum)]
        variable: Variable,
    },
    /// Closed forms against the numerical oracles.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: VerifyLevel,
        /// Perturb the closed forms; the suite must then fail. Debug builds only.
        #[arg(long, hide = true)]
        tamper: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variable {
    Distance,
    Omega,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

/// Exit status for an error anywhere in the chain.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<polaron_core::Error>() {
            return match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Io => 4,
            };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return 4;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let c = &cli.common;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut cfg = match &c.config {
        Some(path) => load_config(path).with_context(|| format!("reading {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(w) = &c.omega {
        cfg.drive = RamanDrive::new(parse_value(w, Dimension::AngularFrequency, &cfg.params)?)?;
    }
    let distance = c
        .distance
        .as_deref()
        .map(|d| parse_value(d, Dimension::Length, &cfg.params))
        .transpose()?;

    match cli.command {
        Command::Modes => {
            let lines = modes_report(&cfg)?;
            emit(c, |out| lines.iter().try_for_each(|l| writeln!(out, "{l}")))?;
        }
        Command::Profile => {
            let p = &cfg.params;
            let rho = match distance {
                Some(d) => ImpurityDensity::pair(d, p.sigma)?,
                None => ImpurityDensity::single(p.sigma)?,
            };
            let grid = match &c.grid {
                Some(g) => {
                    let axis = parse_axis(g, Dimension::Length, p)?;
                    if axis.log {
                        bail!(polaron_core::Error::NonUniformGrid);
                    }
                    uniform_grid(axis.min, axis.max, axis.count)
                }
                None => default_grid(&effective_modes(p, &cfg.drive)?, &rho),
            };
            let profile = effective_deformations(p, &cfg.drive, &rho, &grid)?;
            emit(c, |out| profile.write_csv(out, &manifest(&cfg)))?;
        }
        Command::EnergySingle => {
            let e = single_impurity_energy(&cfg.params, &cfg.drive)?;
            let scale = if c.normalize { normalization(&cfg.params)? } else { 1.0 };
            emit(c, |out| {
                writeln!(out, "omega      = {:e} rad/s", cfg.drive.omega_rabi)?;
                writeln!(out, "total      = {:e}", e.total / scale)?;
                writeln!(out, "binding    = {:e}", e.binding / scale)?;
                writeln!(out, "raman      = {:e}", e.raman / scale)?;
                writeln!(out, "units      = {}", if c.normalize { "|dE(0,0)|" } else { "J" })
            })?;
        }
        Command::EnergyPair => {
            let Some(d) = distance else {
                bail!(polaron_core::Error::Config {
                    line: 0,
                    message: "energy-pair needs --distance".into()
                });
            };
            let e = pair_energy(&cfg.params, &cfg.drive, d)?;
            let norm = normalization(&cfg.params)?;
            let scale = if c.normalize { norm } else { 1.0 };
            emit(c, |out| {
                writeln!(out, "omega        = {:e} rad/s", cfg.drive.omega_rabi)?;
                writeln!(out, "distance     = {d:e} m")?;
                writeln!(out, "delta_e      = {:e}", e.delta_e / scale)?;
                writeln!(out, "branch_plus  = {:e}", e.branch_plus / scale)?;
                writeln!(out, "branch_minus = {:e}", e.branch_minus / scale)?;
                writeln!(out, "raman_cross  = {:e}", e.raman_cross / scale)?;
                writeln!(out, "normalized   = {:e}", e.delta_e / norm)?;
                writeln!(out, "units        = {}", if c.normalize { "|dE(0,0)|" } else { "J" })
            })?;
        }
        Command::Sweep { variable } => {
            let Some(path) = c.out.clone() else {
                bail!(polaron_core::Error::Config {
                    line: 0,
                    message: "sweep needs --out".into()
                });
            };
            let spec = sweep_spec(c, &cfg, variable, distance, path)?;
            let written =
                write_sweep(&cfg, &spec).with_context(|| format!("writing {}", spec.output_path.display()))?;
            for written in written {
                eprintln!("wrote {}", written.display());
            }
        }
        Command::Verify { level, tamper } => {
            if tamper && !cfg!(debug_assertions) {
                bail!(polaron_core::Error::Config {
                    line: 0,
                    message: "--tamper is only available in debug builds".into()
                });
            }
            let opts = VerifyOptions {
                level: match level {
                    VerifyLevel::Quick => Level::Quick,
                    VerifyLevel::Full => Level::Full,
                },
                tamper,
            };
            let report = verification::run(&cfg, &opts)?;
            emit(c, |out| writeln!(out, "{report}"))?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_spec(
    c: &Common,
    cfg: &RunConfig,
    variable: Variable,
    distance: Option<f64>,
    output_path: PathBuf,
) -> Result<SweepSpec> {
    let p = &cfg.params;
    let axis = |text: Option<&String>, default: &str, dim| -> Result<Vec<f64>> {
        Ok(parse_axis(text.map_or(default, String::as_str), dim, p)?.values())
    };
    let (variable, distances, omegas) = match variable {
        Variable::Distance => (
            SweepVariable::Distance,
            axis(c.grid.as_ref(), "0,5a,201", Dimension::Length)?,
            vec![cfg.drive.omega_rabi],
        ),
        Variable::Omega => (
            SweepVariable::Omega,
            vec![distance.unwrap_or(p.lattice_a)],
            axis(c.grid.as_ref(), "0.001lim,1000lim,121,log", Dimension::AngularFrequency)?,
        ),
        Variable::Both => (
            SweepVariable::Both,
            axis(c.grid.as_ref(), "0,5a,101", Dimension::Length)?,
            axis(c.omega_grid.as_ref(), "0,2lim,41", Dimension::AngularFrequency)?,
        ),
    };
    Ok(SweepSpec {
        variable,
        distances,
        omegas,
        output_path,
        normalize: c.normalize,
    })
}

/// Runs `body` against `--out` or stdout.
fn emit(c: &Common, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match &c.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
        }
    }
    Ok(())
}

fn modes_report(cfg: &RunConfig) -> polaron_core::Result<Vec<String>> {
    let p = &cfg.params;
    {
        let m = effective_modes(p, &cfg.drive)?;
        let lim = threshold_omega(p)?;
        let asym = width_asymptotics(p)?;
        let mut lines = vec![
            format!("omega        = {:.12e} rad/s", cfg.drive.omega_rabi),
            format!("omega_lim    = {lim:.12e} rad/s"),
            format!("omega_lim/2pi = {:.12e} Hz", lim / (2.0 * std::f64::consts::PI)),
            format!("eta_plus     = {:.12e} 1/m", m.eta_plus),
            format!("eta_minus    = {:.12e} 1/m", m.eta_minus),
            format!("d_plus       = {:.12e} m", 1.0 / m.eta_plus),
            format!("d_minus      = {:.12e} m", 1.0 / m.eta_minus),
            format!("K_plus       = {:.12e} 1/m", m.k_plus),
            format!("K_minus      = {:.12e} 1/m", m.k_minus),
            format!(
                "mu_A         = {:.12e} J",
                chemical_potential(p, &cfg.drive, Component::A)?
            ),
            format!(
                "mu_B         = {:.12e} J",
                chemical_potential(p, &cfg.drive, Component::B)?
            ),
            format!("d_plus_limit = {:.12e} m", asym.d_plus_limit),
        ];
        if m.degenerate {
            lines.push("note: branches degenerate, mode basis fixed by convention".into());
        }
        lines.extend(p.warnings().into_iter().map(|w| format!("warning: {w}")));
        Ok(lines)
    }
}
