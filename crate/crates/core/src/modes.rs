//! The coupled deformation system and its normal modes.
//!
//! The linearised stationarity condition for the deformations θ = (θ_A, θ_B)
//! is `[d²/dx² − M] θ = γ ρ` with
//!
//! ```text
//! M_ii = (2m/ħ²) [4 g_ii n_i + (ħΩ/2) √(n_j/n_i)]
//! M_ij = (2m/ħ²) [2 g_AB √(n_i n_j) − ħΩ/2]
//! γ_i  = (2m/ħ²) g_i^(ab) √n_i
//! ```
//!
//! Diagonalising M by an orthogonal transform S gives two decoupled modified
//! Helmholtz equations for θ' = Sᵀθ with inverse healing lengths η± = √λ±.
//!
//! Branch labels follow the phase of the eigenvector: `Plus` is the in-phase
//! mode (both components of the same sign), `Minus` the out-of-phase mode.
//! While the off-diagonal element is positive (ħΩ < 2 g_AB n) the in-phase
//! mode is also the stiffer one, so η₊ ≥ η₋ there. Beyond that point the
//! labels keep following the mode character: η₊ saturates and η₋ grows
//! like √Ω.

use crate::error::{Error, Result};
use crate::units::{Component, MixtureParams, RamanDrive, HBAR};

/// Mode label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn index(self) -> usize {
        match self {
            Branch::Plus => 0,
            Branch::Minus => 1,
        }
    }
}

/// Entries of M (1/m²) and the source coefficients γ (m^{-3/2} per J m of coupling folded in).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub m_aa: f64,
    pub m_ab: f64,
    pub m_ba: f64,
    pub m_bb: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

/// Eigen-decomposition of a symmetric 2×2 matrix, labelled by eigenvector phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricEigen2 {
    /// Eigenvalues of the in-phase and out-of-phase modes.
    pub values: [f64; 2],
    /// Unit eigenvectors (A, B components), same order as `values`.
    pub vectors: [[f64; 2]; 2],
    pub degenerate: bool,
}

impl CouplingMatrix {
    pub fn is_symmetric(&self) -> bool {
        (self.m_ab - self.m_ba).abs() <= 1e-12 * self.m_aa.abs().max(self.m_bb.abs())
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.m_aa * v[0] + self.m_ab * v[1], self.m_ba * v[0] + self.m_bb * v[1]]
    }

    /// Jacobi-rotation eigensolver for the symmetrised matrix.
    pub fn eigen(&self) -> SymmetricEigen2 {
        let off = 0.5 * (self.m_ab + self.m_ba);
        let (a, b) = (self.m_aa, self.m_bb);
        let half_diff = 0.5 * (a - b);
        let mean = 0.5 * (a + b);
        let radius = half_diff.hypot(off);
        let scale = a.abs().max(b.abs());
        if radius <= 1e-15 * scale {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            return SymmetricEigen2 {
                values: [mean, mean],
                vectors: [[s, s], [s, -s]],
                degenerate: true,
            };
        }
        // rotation angle of the eigenvector belonging to mean + radius
        let theta = 0.5 * off.atan2(half_diff);
        let upper = normalise_sign([theta.cos(), theta.sin()]);
        let lower = normalise_sign([-upper[1], upper[0]]);
        let (vals, vecs) = if off >= 0.0 {
            ([mean + radius, mean - radius], [upper, lower])
        } else {
            // upper mode is out of phase once the off-diagonal turns negative
            ([mean - radius, mean + radius], [lower, upper])
        };
        SymmetricEigen2 {
            values: vals,
            vectors: vecs,
            degenerate: false,
        }
    }
}

/// First nonzero entry positive.
fn normalise_sign(v: [f64; 2]) -> [f64; 2] {
    let lead = if v[0] != 0.0 { v[0] } else { v[1] };
    if lead < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Assembles M and γ for arbitrary component densities.
pub fn coupling_matrix(p: &MixtureParams, drive: &RamanDrive) -> Result<CouplingMatrix> {
    p.validate()?;
    let (na, nb) = p.component_densities();
    let c = p.kinetic_scale();
    let half = drive.half_energy();
    let off = c * (2.0 * p.g_ab * (na * nb).sqrt() - half);
    Ok(CouplingMatrix {
        m_aa: c * (4.0 * p.g_aa * na + half * (nb / na).sqrt()),
        m_bb: c * (4.0 * p.g_bb * nb + half * (na / nb).sqrt()),
        m_ab: off,
        m_ba: off,
        gamma_a: c * p.g_imp_a * na.sqrt(),
        gamma_b: c * p.g_imp_b * nb.sqrt(),
    })
}

/// Orthogonal mode matrix S with columns (in-phase, out-of-phase).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTransform {
    pub columns: [[f64; 2]; 2],
}

impl ModeTransform {
    /// θ = S θ'.
    pub fn to_physical(&self, plus: f64, minus: f64) -> (f64, f64) {
        let [s0, s1] = self.columns;
        (s0[0] * plus + s1[0] * minus, s0[1] * plus + s1[1] * minus)
    }

    /// θ' = Sᵀ θ.
    pub fn to_effective(&self, theta_a: f64, theta_b: f64) -> (f64, f64) {
        let [s0, s1] = self.columns;
        (s0[0] * theta_a + s0[1] * theta_b, s1[0] * theta_a + s1[1] * theta_b)
    }

    pub fn column(&self, branch: Branch) -> [f64; 2] {
        self.columns[branch.index()]
    }
}

/// Normal-mode representation of the deformation system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModes {
    /// Inverse healing length of the in-phase mode (1/m).
    pub eta_plus: f64,
    /// Inverse healing length of the out-of-phase mode (1/m).
    pub eta_minus: f64,
    /// Deformation amplitude 𝒦₊: θ'₊ = 𝒦₊ · (Green function ∗ ρ).
    pub k_plus: f64,
    pub k_minus: f64,
    /// Mixing constant k₊ = (2Δg n + β) / (2(g_AB n − ħΩ/2)); infinite when the
    /// off-diagonal element vanishes.
    pub mix_kplus: f64,
    pub mix_kminus: f64,
    pub transform: ModeTransform,
    pub degenerate: bool,
}

impl EffectiveModes {
    pub fn eta(&self, b: Branch) -> f64 {
        match b {
            Branch::Plus => self.eta_plus,
            Branch::Minus => self.eta_minus,
        }
    }

    pub fn amplitude(&self, b: Branch) -> f64 {
        match b {
            Branch::Plus => self.k_plus,
            Branch::Minus => self.k_minus,
        }
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_plus.max(self.eta_minus)
    }

    pub fn eta_min(&self) -> f64 {
        self.eta_plus.min(self.eta_minus)
    }

    /// Healing lengths d± = 1/η± (m).
    pub fn widths(&self) -> (f64, f64) {
        (1.0 / self.eta_plus, 1.0 / self.eta_minus)
    }
}

/// Equal-density energy scales of the closed forms (all in J).
struct ClosedForm {
    n: f64,
    c: f64,
    /// (g_AA + g_BB) n + ħΩ/2
    mean: f64,
    /// (g_AA − g_BB) n
    split: f64,
    /// g_AB n − ħΩ/2
    off: f64,
    /// β/2 = √(split² + off²)
    half_beta: f64,
}

impl ClosedForm {
    fn new(p: &MixtureParams, drive: &RamanDrive) -> Result<Self> {
        p.validate()?;
        let n = p.closed_form_density()?;
        let half = drive.half_energy();
        let split = (p.g_aa - p.g_bb) * n;
        let off = p.g_ab * n - half;
        Ok(ClosedForm {
            n,
            c: p.kinetic_scale(),
            mean: (p.g_aa + p.g_bb) * n + half,
            split,
            off,
            half_beta: split.hypot(off),
        })
    }

    /// +1 while the in-phase mode is the stiffer one.
    fn phase_sign(&self) -> f64 {
        if self.off >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    fn eigenvalues(&self) -> (f64, f64) {
        let s = self.phase_sign();
        (
            self.c * (self.mean + s * self.half_beta),
            self.c * (self.mean - s * self.half_beta),
        )
    }

    /// Unit in-phase eigenvector, from (off, λ/c − M_AA/c) or (λ/c − M_BB/c, off).
    fn in_phase_vector(&self) -> Option<[f64; 2]> {
        let lift = self.phase_sign() * self.half_beta;
        let v1 = [self.off, lift - self.split];
        let v2 = [lift + self.split, self.off];
        let n1 = v1[0].hypot(v1[1]);
        let n2 = v2[0].hypot(v2[1]);
        let (v, norm) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if norm <= 1e-300 || norm <= 1e-15 * self.mean.abs() {
            return None;
        }
        Some(normalise_sign([v[0] / norm, v[1] / norm]))
    }
}

/// Equal-density inverse healing lengths without drive:
/// η±² = (2m n/ħ²)[g_AA + g_BB ± √((g_AA − g_BB)² + g_AB²)].
pub fn eta_zero_drive(p: &MixtureParams) -> Result<(f64, f64)> {
    p.validate()?;
    let n = p.closed_form_density()?;
    let pref = p.kinetic_scale() * n;
    let beta0 = (p.g_aa - p.g_bb).hypot(p.g_ab);
    let sum = p.g_aa + p.g_bb;
    check_stable((pref * (sum + beta0)).sqrt(), pref * (sum - beta0))
}

fn check_stable(plus: f64, lower_sq: f64) -> Result<(f64, f64)> {
    if !(lower_sq > 0.0) {
        return Err(Error::DynamicalInstability { eigenvalue: lower_sq });
    }
    Ok((plus, lower_sq.sqrt()))
}

/// Equal-density inverse healing lengths with drive:
/// η±² = (2m/ħ²)[(g_AA+g_BB)n + ħΩ/2 ± s √((g_AA−g_BB)²n² + (ħΩ/2 − g_AB n)²)],
/// with s = sign(g_AB n − ħΩ/2) so that labels follow the eigenvector phase.
pub fn eta_with_drive(p: &MixtureParams, drive: &RamanDrive) -> Result<(f64, f64)> {
    let cf = ClosedForm::new(p, drive)?;
    let (lp, lm) = cf.eigenvalues();
    for v in [lp, lm] {
        if !(v > 0.0) {
            return Err(Error::DynamicalInstability { eigenvalue: v });
        }
    }
    Ok((lp.sqrt(), lm.sqrt()))
}

/// Closed-form normal modes for equal component densities.
pub fn effective_modes(p: &MixtureParams, drive: &RamanDrive) -> Result<EffectiveModes> {
    let cf = ClosedForm::new(p, drive)?;
    let (eta_plus, eta_minus) = eta_with_drive(p, drive)?;
    let (vplus, degenerate) = match cf.in_phase_vector() {
        Some(v) => (v, false),
        None => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            ([s, s], true)
        }
    };
    let vminus = normalise_sign([vplus[1], -vplus[0]]);
    let transform = ModeTransform {
        columns: [vplus, vminus],
    };
    let half_n = 0.5 * cf.n;
    let root = half_n.sqrt();
    let project = |v: [f64; 2]| cf.c * root * (p.g_imp_a * v[0] + p.g_imp_b * v[1]);
    let beta = 2.0 * cf.half_beta;
    let mix = |sign: f64| (2.0 * cf.split + sign * beta) / (2.0 * cf.off);
    Ok(EffectiveModes {
        eta_plus,
        eta_minus,
        k_plus: -project(vplus),
        k_minus: -project(vminus),
        mix_kplus: mix(1.0),
        mix_kminus: mix(-1.0),
        transform,
        degenerate,
    })
}

/// Normal modes from a numerical eigen-decomposition, valid for any densities.
pub fn numeric_modes(p: &MixtureParams, drive: &RamanDrive) -> Result<EffectiveModes> {
    let m = coupling_matrix(p, drive)?;
    let eig = m.eigen();
    for v in eig.values {
        if !(v > 0.0) {
            return Err(Error::DynamicalInstability { eigenvalue: v });
        }
    }
    let transform = ModeTransform { columns: eig.vectors };
    let project = |v: [f64; 2]| m.gamma_a * v[0] + m.gamma_b * v[1];
    // mixing constants are defined for the equal-density closed form only
    let (kp, km) = match ClosedForm::new(p, drive) {
        Ok(cf) => {
            let beta = 2.0 * cf.half_beta;
            (
                (2.0 * cf.split + beta) / (2.0 * cf.off),
                (2.0 * cf.split - beta) / (2.0 * cf.off),
            )
        }
        Err(_) => (f64::NAN, f64::NAN),
    };
    Ok(EffectiveModes {
        eta_plus: eig.values[0].sqrt(),
        eta_minus: eig.values[1].sqrt(),
        k_plus: -project(eig.vectors[0]),
        k_minus: -project(eig.vectors[1]),
        mix_kplus: kp,
        mix_kminus: km,
        transform,
        degenerate: eig.degenerate,
    })
}

/// Raman coupling above which one mode width saturates and the other
/// collapses: ħΩ_lim/2 = n[(g_AA − g_BB)² + g_AB²] / (2 g_AB).
///
/// Depends on the condensate only.
pub fn threshold_omega(p: &MixtureParams) -> Result<f64> {
    p.validate()?;
    if p.g_ab == 0.0 {
        return Err(Error::ZeroInterComponentCoupling);
    }
    let n = p.closed_form_density()?;
    let dg = p.g_aa - p.g_bb;
    let half_energy = n * (dg * dg + p.g_ab * p.g_ab) / (2.0 * p.g_ab);
    Ok(2.0 * half_energy / HBAR)
}

/// Strong-drive limits of the mode widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthAsymptotics {
    /// Saturated in-phase width √[(ħ²/2m)/((g_AA + g_BB + g_AB) n)] (m).
    pub d_plus_limit: f64,
    /// √(ħ/2m); the out-of-phase width behaves as this divided by √Ω.
    pub d_minus_scale: f64,
}

impl WidthAsymptotics {
    pub fn d_minus(&self, omega: f64) -> f64 {
        self.d_minus_scale / omega.sqrt()
    }
}

pub fn width_asymptotics(p: &MixtureParams) -> Result<WidthAsymptotics> {
    p.validate()?;
    let n = p.closed_form_density()?;
    let kinetic = HBAR * HBAR / (2.0 * p.m_b);
    Ok(WidthAsymptotics {
        d_plus_limit: (kinetic / ((p.g_aa + p.g_bb + p.g_ab) * n)).sqrt(),
        d_minus_scale: (HBAR / (2.0 * p.m_b)).sqrt(),
    })
}

/// Uniform-state chemical potential μ_i = 2 g_ii n_i + g_AB n_j − (ħΩ/2)√(n_j/n_i) (J).
pub fn chemical_potential(p: &MixtureParams, drive: &RamanDrive, component: Component) -> Result<f64> {
    p.validate()?;
    let (na, nb) = p.component_densities();
    let half = drive.half_energy();
    Ok(match component {
        Component::A => 2.0 * p.g_aa * na + p.g_ab * nb - half * (nb / na).sqrt(),
        Component::B => 2.0 * p.g_bb * nb + p.g_ab * na - half * (na / nb).sqrt(),
    })
}
