//! Parameter sweeps and their CSV output.
//!
//! Points are evaluated in parallel and written in abscissa order, so the
//! bytes depend only on the inputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::energy::{coefficients_with_drive, normalization, pair_energy_from, single_impurity_energy, PairEnergy};
use crate::error::{Error, Result};
use crate::modes::{effective_modes, threshold_omega};
use crate::units::{parse_quantity, Dimension, MixtureParams, RamanDrive};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Distance,
    Omega,
    Both,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(SweepVariable::Distance),
            "omega" => Ok(SweepVariable::Omega),
            "both" => Ok(SweepVariable::Both),
            other => Err(Error::InvalidSweep(format!("unknown sweep variable `{other}`"))),
        }
    }
}

/// Sample points `min..=max`, linear or logarithmic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize, log: bool) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidSweep(format!("count must be >= 2, got {count}")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidSweep(format!("need min < max, got {min:e} and {max:e}")));
        }
        if log && min <= 0.0 {
            return Err(Error::InvalidSweep("logarithmic spacing needs min > 0".into()));
        }
        Ok(Axis { min, max, count, log })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                if i == self.count - 1 {
                    self.max
                } else if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// Parses a single value. Besides the SI units, a trailing `lim` means
/// multiples of the Raman threshold and, for lengths, a trailing `a` means
/// lattice spacings.
pub fn parse_value(text: &str, dim: Dimension, p: &MixtureParams) -> Result<f64> {
    let t = text.trim();
    let scaled = |suffix: &str, unit: f64| -> Option<Result<f64>> {
        let head = t.strip_suffix(suffix)?.trim();
        Some(
            head.parse::<f64>()
                .map(|v| v * unit)
                .map_err(|_| Error::InvalidSweep(format!("cannot parse `{t}`"))),
        )
    };
    if dim == Dimension::AngularFrequency && t.ends_with("lim") {
        let lim = threshold_omega(p)?;
        return scaled("lim", lim).expect("suffix present");
    }
    if dim == Dimension::Length && t.ends_with('a') {
        return scaled("a", p.lattice_a).expect("suffix present");
    }
    parse_quantity(t, dim).map_err(Error::InvalidSweep)
}

/// Parses `min,max,count[,log]`.
pub fn parse_axis(text: &str, dim: Dimension, p: &MixtureParams) -> Result<Axis> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(Error::InvalidSweep(format!(
            "expected `min,max,count[,log]`, got `{text}`"
        )));
    }
    let min = parse_value(parts[0], dim, p)?;
    let max = parse_value(parts[1], dim, p)?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|_| Error::InvalidSweep(format!("bad count `{}`", parts[2])))?;
    let log = match parts.get(3) {
        None | Some(&"lin") => false,
        Some(&"log") => true,
        Some(other) => return Err(Error::InvalidSweep(format!("unknown spacing `{other}`"))),
    };
    Axis::new(min, max, count, log)
}

/// What to sweep. The single-valued axis of a one-dimensional sweep holds
/// the fixed value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub distances: Vec<f64>,
    pub omegas: Vec<f64>,
    pub output_path: PathBuf,
    /// Divide every energy column by |ΔE(Ω = 0, d = 0)|.
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    VsDistance,
    VsOmega,
    Surface,
}

/// ΔE over distances, couplings or both. `points` is ordered with the
/// distance index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve {
    pub kind: CurveKind,
    pub distances: Vec<f64>,
    pub omegas: Vec<f64>,
    pub points: Vec<PairEnergy>,
    /// |ΔE(Ω = 0, d = 0)| (J).
    pub scale: f64,
}

fn surface_points(p: &MixtureParams, distances: &[f64], omegas: &[f64]) -> Result<Vec<PairEnergy>> {
    let rows: Vec<Result<Vec<PairEnergy>>> = omegas
        .par_iter()
        .map(|&w| {
            let drive = RamanDrive::new(w)?;
            let c = coefficients_with_drive(p, &drive)?;
            distances
                .iter()
                .map(|&d| pair_energy_from(&c, p.sigma, &drive, d))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(distances.len() * omegas.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

pub fn distance_curve(p: &MixtureParams, drive: &RamanDrive, distances: &[f64]) -> Result<EnergyCurve> {
    let c = coefficients_with_drive(p, drive)?;
    let points = distances
        .par_iter()
        .map(|&d| pair_energy_from(&c, p.sigma, drive, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyCurve {
        kind: CurveKind::VsDistance,
        distances: distances.to_vec(),
        omegas: vec![drive.omega_rabi],
        points,
        scale: normalization(p)?,
    })
}

pub fn omega_curve(p: &MixtureParams, d: f64, omegas: &[f64]) -> Result<EnergyCurve> {
    Ok(EnergyCurve {
        kind: CurveKind::VsOmega,
        distances: vec![d],
        omegas: omegas.to_vec(),
        points: surface_points(p, &[d], omegas)?,
        scale: normalization(p)?,
    })
}

pub fn surface(p: &MixtureParams, distances: &[f64], omegas: &[f64]) -> Result<EnergyCurve> {
    Ok(EnergyCurve {
        kind: CurveKind::Surface,
        distances: distances.to_vec(),
        omegas: omegas.to_vec(),
        points: surface_points(p, distances, omegas)?,
        scale: normalization(p)?,
    })
}

pub fn evaluate(p: &MixtureParams, spec: &SweepSpec) -> Result<EnergyCurve> {
    let first = |v: &[f64], what: &str| {
        v.first()
            .copied()
            .ok_or_else(|| Error::InvalidSweep(format!("no {what} given")))
    };
    match spec.variable {
        SweepVariable::Distance => {
            let drive = RamanDrive::new(first(&spec.omegas, "omega")?)?;
            distance_curve(p, &drive, &spec.distances)
        }
        SweepVariable::Omega => omega_curve(p, first(&spec.distances, "distance")?, &spec.omegas),
        SweepVariable::Both => surface(p, &spec.distances, &spec.omegas),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "sweep".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    body(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Runs the sweep and writes its output path. An omega sweep also writes the
/// mode widths to `<stem>.modes.csv` and the single-impurity energy to
/// `<stem>.single.csv`. Returns every file written.
pub fn write_sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<Vec<PathBuf>> {
    let p = &cfg.params;
    let path = spec.output_path.as_path();
    let comments = manifest(cfg);
    let curve = evaluate(p, spec)?;
    write_file(path, |out| curve.write_csv(out, &comments, spec.normalize))?;
    let mut written = vec![path.to_path_buf()];
    if spec.variable == SweepVariable::Omega {
        let modes = mode_curve(p, &spec.omegas)?;
        let single = single_curve(p, &spec.omegas)?;
        let mp = with_suffix(path, "modes");
        write_file(&mp, |out| modes.write_csv(out, &comments))?;
        let sp = with_suffix(path, "single");
        write_file(&sp, |out| single.write_csv(out, &comments))?;
        written.extend([mp, sp]);
    }
    Ok(written)
}

/// Comment lines shared by every CSV: units, threshold and resolved config.
pub fn manifest(cfg: &RunConfig) -> Vec<String> {
    let mut out = vec!["units: SI (m, rad/s, J)".to_string()];
    match threshold_omega(&cfg.params) {
        Ok(lim) => out.push(format!("omega_lim = {lim:e} rad/s")),
        Err(e) => out.push(format!("omega_lim unavailable: {e}")),
    }
    for w in cfg.params.warnings() {
        out.push(format!("warning: {w}"));
    }
    out.extend(cfg.resolved_lines().into_iter().map(|l| format!("config: {l}")));
    out
}

impl EnergyCurve {
    pub fn normalized(&self) -> Vec<f64> {
        self.points.iter().map(|pt| pt.delta_e / self.scale).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String], normalize: bool) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "# normalization: |delta_e(omega=0, d=0)| = {:e} J", self.scale)?;
        let unit = if normalize {
            "energies in units of the normalization"
        } else {
            "energies in J"
        };
        writeln!(out, "# {unit}; normalized = delta_e_total / normalization")?;
        let head = match self.kind {
            CurveKind::VsDistance => "d",
            CurveKind::VsOmega => "omega",
            CurveKind::Surface => "d,omega",
        };
        writeln!(
            out,
            "{head},delta_e_total,branch_plus,branch_minus,raman_cross,normalized"
        )?;
        let divisor = if normalize { self.scale } else { 1.0 };
        let nd = self.distances.len();
        for (i, pt) in self.points.iter().enumerate() {
            let (d, w) = (self.distances[i % nd], self.omegas[i / nd]);
            match self.kind {
                CurveKind::VsDistance => write!(out, "{d:e},")?,
                CurveKind::VsOmega => write!(out, "{w:e},")?,
                CurveKind::Surface => write!(out, "{d:e},{w:e},")?,
            }
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                pt.delta_e / divisor,
                pt.branch_plus / divisor,
                pt.branch_minus / divisor,
                pt.raman_cross / divisor,
                pt.delta_e / self.scale
            )?;
        }
        Ok(())
    }
}

/// Mode widths and depths against the drive, each normalised to Ω = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCurve {
    pub omegas: Vec<f64>,
    pub omega_lim: f64,
    /// (d₊, d₋) in m.
    pub widths: Vec<(f64, f64)>,
    /// (|𝒦₊/η₊|, |𝒦₋/η₋|).
    pub depths: Vec<(f64, f64)>,
}

pub fn mode_curve(p: &MixtureParams, omegas: &[f64]) -> Result<ModeCurve> {
    let rows = std::iter::once(&0.0)
        .chain(omegas)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&w| {
            let m = effective_modes(p, &RamanDrive::new(w)?)?;
            Ok((
                (1.0 / m.eta_plus, 1.0 / m.eta_minus),
                ((m.k_plus / m.eta_plus).abs(), (m.k_minus / m.eta_minus).abs()),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeCurve {
        omegas: omegas.to_vec(),
        omega_lim: threshold_omega(p)?,
        widths: rows.iter().map(|r| r.0).collect(),
        depths: rows.iter().map(|r| r.1).collect(),
    })
}

impl ModeCurve {
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(
            out,
            "# depth = |K/eta|; *_norm columns are divided by their omega = 0 values"
        )?;
        writeln!(
            out,
            "omega,omega_over_lim,d_plus,d_minus,d_plus_norm,d_minus_norm,depth_plus_norm,depth_minus_norm"
        )?;
        let (w0, k0) = (self.widths[0], self.depths[0]);
        for (i, w) in self.omegas.iter().enumerate() {
            let (dp, dm) = self.widths[i + 1];
            let (kp, km) = self.depths[i + 1];
            writeln!(
                out,
                "{w:e},{:e},{dp:e},{dm:e},{:e},{:e},{:e},{:e}",
                w / self.omega_lim,
                dp / w0.0,
                dm / w0.1,
                kp / k0.0,
                km / k0.1
            )?;
        }
        Ok(())
    }
}

/// Single-impurity energy against the drive.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleCurve {
    pub omegas: Vec<f64>,
    pub omega_lim: f64,
    /// (total, binding, raman part) in J.
    pub values: Vec<(f64, f64, f64)>,
    pub binding_at_zero: f64,
}

pub fn single_curve(p: &MixtureParams, omegas: &[f64]) -> Result<SingleCurve> {
    let values = omegas
        .par_iter()
        .map(|&w| {
            let e = single_impurity_energy(p, &RamanDrive::new(w)?)?;
            Ok((e.total, e.binding, e.raman))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SingleCurve {
        omegas: omegas.to_vec(),
        omega_lim: threshold_omega(p)?,
        values,
        binding_at_zero: single_impurity_energy(p, &RamanDrive::OFF)?.binding,
    })
}

impl SingleCurve {
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "# binding_norm = binding / binding(omega = 0)")?;
        writeln!(out, "omega,omega_over_lim,total,binding,raman,binding_norm")?;
        for (w, (t, b, r)) in self.omegas.iter().zip(&self.values) {
            writeln!(
                out,
                "{w:e},{:e},{t:e},{b:e},{r:e},{:e}",
                w / self.omega_lim,
                b / self.binding_at_zero
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::reference_params;

    #[test]
    fn axes() {
        let a = Axis::new(1.0, 100.0, 3, true).unwrap();
        let v = a.values();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert_eq!(v[2], 100.0);
        assert!(Axis::new(0.0, 1.0, 1, false).is_err());
        assert!(Axis::new(1.0, 1.0, 3, false).is_err());
        assert!(Axis::new(0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn axis_parsing() {
        let p = reference_params();
        let d = parse_axis("0, 5a, 11", Dimension::Length, &p).unwrap();
        assert_eq!(d.max, 5.0 * p.lattice_a);
        let w = parse_axis("0.001lim,1000lim,7,log", Dimension::AngularFrequency, &p).unwrap();
        assert!(w.log && (w.max / threshold_omega(&p).unwrap() - 1000.0).abs() < 1e-9);
        let w = parse_axis("0,2 kHz,5", Dimension::AngularFrequency, &p).unwrap();
        assert_eq!(w.max, 2.0 * std::f64::consts::PI * 2e3);
        assert!(parse_axis("0,1", Dimension::Length, &p).is_err());
        assert!(parse_axis("0,1 Hz,3", Dimension::Length, &p).is_err());
        assert!(parse_axis("0,1 nm,3,cubic", Dimension::Length, &p).is_err());
    }

    #[test]
    fn distance_curve_normalisation() {
        let p = reference_params();
        let ds = Axis::new(0.0, 5.0 * p.lattice_a, 21, false).unwrap().values();
        let c = distance_curve(&p, &RamanDrive::OFF, &ds).unwrap();
        let n = c.normalized();
        assert_eq!(n[0], -1.0);
        assert!(n.iter().all(|v| *v >= -1.0));
    }

    #[test]
    fn surface_order_and_determinism() {
        let p = reference_params();
        let lim = threshold_omega(&p).unwrap();
        let ds = [0.0, 1e-6];
        let ws = [0.0, lim, 2.0 * lim];
        let s = surface(&p, &ds, &ws).unwrap();
        assert_eq!(s.points.len(), 6);
        let direct = crate::energy::pair_energy(&p, &RamanDrive::new(lim).unwrap(), 1e-6).unwrap();
        assert_eq!(s.points[3], direct);
        let mut a = Vec::new();
        let mut b = Vec::new();
        s.write_csv(&mut a, &[], false).unwrap();
        surface(&p, &ds, &ws).unwrap().write_csv(&mut b, &[], false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mode_and_single_curves() {
        let p = reference_params();
        let lim = threshold_omega(&p).unwrap();
        let ws = Axis::new(1e-3 * lim, 1e3 * lim, 13, true).unwrap().values();
        let m = mode_curve(&p, &ws).unwrap();
        let plateau = crate::modes::width_asymptotics(&p).unwrap().d_plus_limit;
        let last = m.widths[m.widths.len() - 1];
        assert!((last.0 / plateau - 1.0).abs() < 0.01);
        assert!(last.1 < 0.1 * m.widths[0].1);
        let s = single_curve(&p, &ws).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["x".into()]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3 + ws.len());
    }
}
