use thiserror::Error;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Domain,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("closed-form expressions require equal component densities (n0_A = {n0_a:e}, n0_B = {n0_b:e})")]
    UnequalDensities { n0_a: f64, n0_b: f64 },

    #[error("ConfinementResonance: 1 - C a3d / a_perp vanishes (a3d = {a3d:e} m, a_perp = {a_perp:e} m)")]
    ConfinementResonance { a3d: f64, a_perp: f64 },

    #[error("ZeroDetuning: two-photon detuning must be nonzero")]
    ZeroDetuning,

    #[error("NegativeCoupling: 4 Omega1 Omega2 / Delta = {value:e} rad/s is negative")]
    NegativeCoupling { value: f64 },

    #[error("Overflow: exp({exponent}) * erfcx(..) exceeds double precision")]
    Overflow { exponent: f64 },

    #[error("DynamicalInstability: coupling matrix eigenvalue {eigenvalue:e} m^-2 is not positive")]
    DynamicalInstability { eigenvalue: f64 },

    #[error("ZeroInterComponentCoupling: g_AB must be nonzero for the Raman threshold")]
    ZeroInterComponentCoupling,

    #[error("GridTooCoarse: spacing {spacing:e} m exceeds the limit {limit:e} m")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("DomainTooShort: half-extent {extent:e} m is below the required {required:e} m")]
    DomainTooShort { extent: f64, required: f64 },

    #[error("grid must be uniform with at least three points")]
    NonUniformGrid,

    #[error("SingularSystem: {0}")]
    SingularSystem(String),

    #[error("QuadratureNonConvergence: error estimate {error_estimate:e} after {intervals} intervals")]
    QuadratureNonConvergence { intervals: usize, error_estimate: f64 },

    #[error("NoSignChange: pair-interaction slope keeps one sign over [{lo:e}, {hi:e}] rad/s")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{}", config_message(*line, message))]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Line zero stands for the command line or the file as a whole.
fn config_message(line: usize, message: &str) -> String {
    if line == 0 {
        format!("config: {message}")
    } else {
        format!("config line {line}: {message}")
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config { .. } => ErrorKind::Config,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Domain,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
