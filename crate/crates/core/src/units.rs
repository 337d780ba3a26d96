//! Physical inputs: constants, the mixture parameter set, the Raman drive and
//! the conversions that feed them.
//!
//! Everything stored here is SI. Frequencies are angular (rad/s); a value
//! given in Hz is multiplied by 2π once, when it is parsed.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Unified atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Bohr radius (m).
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Mass of a ⁸⁷Rb atom (kg).
pub const MASS_RB87: f64 = 86.909_180_520 * ATOMIC_MASS_UNIT;
/// Mass of a ⁴¹K atom (kg).
pub const MASS_K41: f64 = 40.961_825_257_9 * ATOMIC_MASS_UNIT;
/// Confinement-induced renormalisation constant, |ζ(1/2)|/√2.
pub const OLSHANII_C: f64 = 1.0326;

/// Ratio n0·g / (ħ ω⊥) above which the quasi-1D condition is reported as doubtful.
pub const QUASI_1D_WARN_RATIO: f64 = 0.1;

/// How the configured line densities map onto the condensate densities ψ0ᵢ².
///
/// The closed-form expressions are written in terms of a single density `n`
/// with each component carrying `n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityConvention {
    /// `n0_A`, `n0_B` are the component densities; `n = n0_A + n0_B`.
    Total,
    /// The configured per-component value is `n` itself; each component
    /// carries `n0/2`. This is the reading under which the reference set
    /// gives a Raman threshold of ≈ 2π·923 Hz.
    PerComponent,
}

impl DensityConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            DensityConvention::Total => "total",
            DensityConvention::PerComponent => "per_component",
        }
    }
}

impl std::str::FromStr for DensityConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "total" => Ok(DensityConvention::Total),
            "per_component" => Ok(DensityConvention::PerComponent),
            other => Err(format!(
                "unknown density convention `{other}` (expected `total` or `per_component`)"
            )),
        }
    }
}

/// The two condensate components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    A,
    B,
}

/// Condensate, impurity and trap parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    /// BEC atom mass (kg).
    pub m_b: f64,
    /// Impurity mass (kg). Not used by any 1D expression.
    pub m_a: f64,
    /// Configured line density of component A (1/m).
    pub n0_a: f64,
    /// Configured line density of component B (1/m).
    pub n0_b: f64,
    /// Intra-component coupling of A (J m).
    pub g_aa: f64,
    /// Intra-component coupling of B (J m).
    pub g_bb: f64,
    /// Inter-component coupling (J m).
    pub g_ab: f64,
    /// Impurity coupling to component A (J m).
    pub g_imp_a: f64,
    /// Impurity coupling to component B (J m).
    pub g_imp_b: f64,
    /// Transverse trap angular frequency (rad/s).
    pub omega_perp: f64,
    /// Longitudinal (lattice site) trap angular frequency (rad/s).
    pub omega_long: f64,
    /// Lattice spacing (m).
    pub lattice_a: f64,
    /// Width parameter of the gaussian Wannier density (m).
    pub sigma: f64,
    pub density_convention: DensityConvention,
}

/// The reference parameter set: ⁸⁷Rb hyperfine mixture with ⁴¹K impurities
/// in a 532 nm lattice.
pub fn reference_params() -> MixtureParams {
    let g_aa = 2.08e-37;
    let p = MixtureParams {
        m_b: MASS_RB87,
        m_a: MASS_K41,
        n0_a: 3.0e6,
        n0_b: 3.0e6,
        g_aa,
        g_bb: 1.99e-37,
        g_ab: 2.03e-37,
        g_imp_a: 100.0 * g_aa,
        g_imp_b: 100.0 * g_aa,
        omega_perp: 2.0 * PI * 34.0e3,
        omega_long: 2.0 * PI * 18.0e3,
        lattice_a: 532e-9,
        sigma: 200e-9,
        density_convention: DensityConvention::PerComponent,
    };
    debug_assert!(p.validate().is_ok());
    p
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value:e}")))
    }
}

impl MixtureParams {
    /// Checks the hard invariants. Soft conditions are reported by [`Self::warnings`].
    pub fn validate(&self) -> Result<()> {
        positive("m_b", self.m_b)?;
        positive("m_a", self.m_a)?;
        positive("n0_A", self.n0_a)?;
        positive("n0_B", self.n0_b)?;
        positive("g_AA", self.g_aa)?;
        positive("g_BB", self.g_bb)?;
        if !(self.g_ab.is_finite() && self.g_ab >= 0.0) {
            return Err(Error::invalid(
                "g_AB",
                format!("must be finite and >= 0, got {:e}", self.g_ab),
            ));
        }
        for (name, v) in [("g_abA", self.g_imp_a), ("g_abB", self.g_imp_b)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        positive("omega_perp", self.omega_perp)?;
        positive("omega_long", self.omega_long)?;
        positive("lattice_a", self.lattice_a)?;
        positive("sigma", self.sigma)?;
        Ok(())
    }

    /// Soft-invariant violations: wide Wannier functions and a doubtful
    /// quasi-1D regime. These never stop a computation.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.sigma >= self.lattice_a {
            out.push(format!(
                "sigma = {:e} m is not shorter than the lattice spacing {:e} m; neighbouring impurities overlap",
                self.sigma, self.lattice_a
            ));
        }
        let (na, nb) = self.component_densities();
        let e_perp = HBAR * self.omega_perp;
        let pairs = [
            ("n0_A g_AA", na * self.g_aa),
            ("n0_B g_BB", nb * self.g_bb),
            ("n0_A g_AB", na * self.g_ab),
            ("n0_B g_AB", nb * self.g_ab),
        ];
        for (label, e) in pairs {
            let ratio = e / e_perp;
            if ratio > QUASI_1D_WARN_RATIO {
                out.push(format!(
                    "{label} / (hbar omega_perp) = {ratio:.3} exceeds {QUASI_1D_WARN_RATIO}; quasi-1D condition doubtful"
                ));
            }
        }
        out
    }

    /// Condensate densities ψ0ᵢ² (1/m) entering the mean-field equations.
    pub fn component_densities(&self) -> (f64, f64) {
        match self.density_convention {
            DensityConvention::Total => (self.n0_a, self.n0_b),
            DensityConvention::PerComponent => (0.5 * self.n0_a, 0.5 * self.n0_b),
        }
    }

    pub fn component_density(&self, c: Component) -> f64 {
        let (na, nb) = self.component_densities();
        match c {
            Component::A => na,
            Component::B => nb,
        }
    }

    pub fn has_equal_densities(&self) -> bool {
        (self.n0_a - self.n0_b).abs() <= 1e-12 * self.n0_a.max(self.n0_b)
    }

    /// The density `n` of the closed forms (each component carries `n/2`).
    pub fn closed_form_density(&self) -> Result<f64> {
        if !self.has_equal_densities() {
            return Err(Error::UnequalDensities {
                n0_a: self.n0_a,
                n0_b: self.n0_b,
            });
        }
        let (na, nb) = self.component_densities();
        Ok(na + nb)
    }

    /// 2 m_b / ħ² (1/(J m²)).
    pub fn kinetic_scale(&self) -> f64 {
        2.0 * self.m_b / (HBAR * HBAR)
    }
}

/// Effective two-photon Rabi coupling Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanDrive {
    /// Ω in rad/s.
    pub omega_rabi: f64,
}

impl RamanDrive {
    pub const OFF: RamanDrive = RamanDrive { omega_rabi: 0.0 };

    pub fn new(omega_rabi: f64) -> Result<Self> {
        if !omega_rabi.is_finite() || omega_rabi < 0.0 {
            return Err(Error::invalid(
                "omega_rabi",
                format!("must be finite and >= 0, got {omega_rabi:e}"),
            ));
        }
        Ok(RamanDrive { omega_rabi })
    }

    /// ħΩ/2 (J).
    pub fn half_energy(&self) -> f64 {
        0.5 * HBAR * self.omega_rabi
    }
}

impl Default for RamanDrive {
    fn default() -> Self {
        RamanDrive::OFF
    }
}

/// Ω = 4 Ω₁ Ω₂ / Δ for a far-detuned Λ scheme with equal laser frequencies.
pub fn raman_from_two_photon(omega1: f64, omega2: f64, detuning: f64) -> Result<RamanDrive> {
    if omega1 < 0.0 || omega2 < 0.0 {
        return Err(Error::invalid(
            "omega1/omega2",
            "single-photon Rabi frequencies must be >= 0",
        ));
    }
    if detuning == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let value = 4.0 * omega1 * omega2 / detuning;
    if value < 0.0 {
        return Err(Error::NegativeCoupling { value });
    }
    // 4·0/(-Δ) gives -0.0
    RamanDrive::new(value.abs())
}

/// Transverse harmonic oscillator length √(ħ/(m ω⊥)).
pub fn transverse_length(mass: f64, omega_perp: f64) -> f64 {
    (HBAR / (mass * omega_perp)).sqrt()
}

/// Quasi-1D coupling from a 3D scattering length under tight transverse
/// confinement, g = (2ħ² a / (m a⊥²)) / (1 − C a / a⊥).
///
/// `mass` is the mass entering the oscillator length; for two identical
/// bosons this is the atomic mass, which makes the prefactor 2ħω⊥a.
pub fn g1d_from_3d(a3d: f64, mass: f64, omega_perp: f64) -> Result<f64> {
    positive("mass", mass)?;
    positive("omega_perp", omega_perp)?;
    if !a3d.is_finite() {
        return Err(Error::invalid("a3d", "must be finite"));
    }
    let a_perp = transverse_length(mass, omega_perp);
    let denom = 1.0 - OLSHANII_C * a3d / a_perp;
    if denom.abs() < 1e-12 {
        return Err(Error::ConfinementResonance { a3d, a_perp });
    }
    Ok(2.0 * HBAR * HBAR * a3d / (mass * a_perp * a_perp) / denom)
}

/// Physical dimension of a configurable quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Mass,
    Length,
    LineDensity,
    Coupling,
    AngularFrequency,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Mass => "mass",
            Dimension::Length => "length",
            Dimension::LineDensity => "line density",
            Dimension::Coupling => "1D coupling",
            Dimension::AngularFrequency => "angular frequency",
        };
        f.write_str(s)
    }
}

fn unit_factor(unit: &str) -> Option<(Dimension, f64)> {
    use Dimension::*;
    let two_pi = 2.0 * PI;
    Some(match unit {
        "kg" => (Mass, 1.0),
        "u" | "amu" | "Da" => (Mass, ATOMIC_MASS_UNIT),
        "m" => (Length, 1.0),
        "um" | "μm" | "µm" => (Length, 1e-6),
        "nm" => (Length, 1e-9),
        "a0" => (Length, BOHR_RADIUS),
        "m^-1" | "1/m" => (LineDensity, 1.0),
        "um^-1" | "μm^-1" | "µm^-1" | "1/um" => (LineDensity, 1e6),
        "nm^-1" | "1/nm" => (LineDensity, 1e9),
        "J*m" | "J.m" | "J·m" | "Jm" => (Coupling, 1.0),
        "rad/s" | "s^-1" | "1/s" => (AngularFrequency, 1.0),
        "Hz" => (AngularFrequency, two_pi),
        "kHz" => (AngularFrequency, two_pi * 1e3),
        "MHz" => (AngularFrequency, two_pi * 1e6),
        _ => return None,
    })
}

/// Parses `value[unit]` (whitespace between the two optional) into SI.
/// A bare number is taken to be SI already.
pub fn parse_quantity(text: &str, dim: Dimension) -> std::result::Result<f64, String> {
    let text = text.trim();
    // longest numeric prefix; the remainder is the unit
    let (value, unit) = text
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(text.len()))
        .rev()
        .filter(|&i| i > 0)
        .find_map(|i| text[..i].trim().parse::<f64>().ok().map(|v| (v, &text[i..])))
        .ok_or_else(|| format!("cannot parse number from `{text}`"))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    let unit = unit.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    match unit_factor(unit) {
        Some((d, factor)) if d == dim => Ok(value * factor),
        Some((d, _)) => Err(format!("unit `{unit}` is a {d}, expected a {dim}")),
        None => Err(format!("unknown unit `{unit}`")),
    }
}
