//! `key = value` run configuration.
//!
//! ```text
//! # reference mixture, stronger impurity coupling on B
//! g_abB = 2.5e-35 J*m
//! omega_rabi = 500 Hz
//! density_convention = per_component
//! ```
//!
//! Missing keys take their reference values. Unknown or repeated keys are
//! errors. Instead of `omega_rabi` the drive may be given by `omega1`,
//! `omega2` and `detuning` together.

use std::path::Path;

use crate::error::{Error, Result};
use crate::units::{
    parse_quantity, raman_from_two_photon, reference_params, DensityConvention, Dimension, MixtureParams, RamanDrive,
};

/// Resolved parameters and drive.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: MixtureParams,
    pub drive: RamanDrive,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: reference_params(),
            drive: RamanDrive::OFF,
        }
    }
}

const KEYS: [(&str, Dimension); 17] = [
    ("m_b", Dimension::Mass),
    ("m_a", Dimension::Mass),
    ("n0_A", Dimension::LineDensity),
    ("n0_B", Dimension::LineDensity),
    ("g_AA", Dimension::Coupling),
    ("g_BB", Dimension::Coupling),
    ("g_AB", Dimension::Coupling),
    ("g_abA", Dimension::Coupling),
    ("g_abB", Dimension::Coupling),
    ("omega_perp", Dimension::AngularFrequency),
    ("omega_long", Dimension::AngularFrequency),
    ("lattice_a", Dimension::Length),
    ("sigma", Dimension::Length),
    ("omega_rabi", Dimension::AngularFrequency),
    ("omega1", Dimension::AngularFrequency),
    ("omega2", Dimension::AngularFrequency),
    ("detuning", Dimension::AngularFrequency),
];

fn config_error(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn field<'a>(p: &'a mut MixtureParams, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "m_b" => &mut p.m_b,
        "m_a" => &mut p.m_a,
        "n0_A" => &mut p.n0_a,
        "n0_B" => &mut p.n0_b,
        "g_AA" => &mut p.g_aa,
        "g_BB" => &mut p.g_bb,
        "g_AB" => &mut p.g_ab,
        "g_abA" => &mut p.g_imp_a,
        "g_abB" => &mut p.g_imp_b,
        "omega_perp" => &mut p.omega_perp,
        "omega_long" => &mut p.omega_long,
        "lattice_a" => &mut p.lattice_a,
        "sigma" => &mut p.sigma,
        _ => return None,
    })
}

/// Line on which `name` was set, zero when it kept its default.
fn line_of(seen: &[(String, usize)], name: &str) -> usize {
    seen.iter().find(|(k, _)| k == name).map_or(0, |(_, l)| *l)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<(String, usize)> = Vec::new();
    let mut two_photon = [None::<f64>; 3];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_error(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|(k, _)| k == key) {
            return Err(config_error(line, format!("`{key}` is set twice")));
        }
        seen.push((key.to_string(), line));
        if key == "density_convention" {
            cfg.params.density_convention = value.parse::<DensityConvention>().map_err(|e| config_error(line, e))?;
            continue;
        }
        let dim = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, d)| *d)
            .ok_or_else(|| config_error(line, format!("unknown key `{key}`")))?;
        let v = parse_quantity(value, dim).map_err(|e| config_error(line, format!("`{key}`: {e}")))?;
        match key {
            "omega_rabi" => {
                cfg.drive = RamanDrive::new(v).map_err(|e| config_error(line, e.to_string()))?;
            }
            "omega1" => two_photon[0] = Some(v),
            "omega2" => two_photon[1] = Some(v),
            "detuning" => two_photon[2] = Some(v),
            _ => *field(&mut cfg.params, key).expect("listed key") = v,
        }
    }

    let given = two_photon.iter().filter(|v| v.is_some()).count();
    if given > 0 {
        let last = ["omega1", "omega2", "detuning"]
            .iter()
            .map(|k| line_of(&seen, k))
            .max()
            .unwrap_or(0);
        if given < 3 {
            return Err(config_error(last, "omega1, omega2 and detuning must be given together"));
        }
        if line_of(&seen, "omega_rabi") > 0 {
            return Err(config_error(last, "give either omega_rabi or omega1/omega2/detuning"));
        }
        let [o1, o2, det] = two_photon.map(|v| v.expect("checked"));
        cfg.drive = raman_from_two_photon(o1, o2, det).map_err(|e| config_error(last, e.to_string()))?;
    }

    if let Err(e) = cfg.params.validate() {
        let line = match &e {
            Error::InvalidParameter { name, .. } => line_of(&seen, name),
            _ => 0,
        };
        return Err(config_error(line, e.to_string()));
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

impl RunConfig {
    /// The resolved configuration in SI units, one `key = value` per entry,
    /// suitable for feeding back to [`parse_config`].
    pub fn resolved_lines(&self) -> Vec<String> {
        let p = &self.params;
        let values = [
            ("m_b", p.m_b, "kg"),
            ("m_a", p.m_a, "kg"),
            ("n0_A", p.n0_a, "m^-1"),
            ("n0_B", p.n0_b, "m^-1"),
            ("g_AA", p.g_aa, "J*m"),
            ("g_BB", p.g_bb, "J*m"),
            ("g_AB", p.g_ab, "J*m"),
            ("g_abA", p.g_imp_a, "J*m"),
            ("g_abB", p.g_imp_b, "J*m"),
            ("omega_perp", p.omega_perp, "rad/s"),
            ("omega_long", p.omega_long, "rad/s"),
            ("lattice_a", p.lattice_a, "m"),
            ("sigma", p.sigma, "m"),
            ("omega_rabi", self.drive.omega_rabi, "rad/s"),
        ];
        let mut out: Vec<String> = values.iter().map(|(k, v, u)| format!("{k} = {v:e} {u}")).collect();
        out.push(format!("density_convention = {}", p.density_convention.as_str()));
        out
    }
}
