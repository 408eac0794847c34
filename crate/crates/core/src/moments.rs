//! Symmetry selection of the mesoscopic moments and Gaussian-envelope
//! estimates for the moments that are neglected.
//!
//! Parities are per Cartesian axis (x, y, z): +1 even, -1 odd, 0 for no
//! definite parity. A moment survives unless its integrand is odd along some
//! axis.

use crate::error::{Error, Result};

/// Per-axis parity: +1, -1 or 0 (undefined).
pub type Parity = [i8; 3];

fn product(a: Parity, b: Parity) -> Parity {
    [a[0] * b[0], a[1] * b[1], a[2] * b[2]]
}

fn check(p: Parity) -> Result<Parity> {
    if p.iter().all(|v| matches!(v, -1..=1)) {
        Ok(p)
    } else {
        Err(Error::InvalidArgument(format!("parity entries must be -1, 0 or 1, got {p:?}")))
    }
}

/// Bloch and envelope parities of the ground and excited states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityTable {
    pub u_g: Parity,
    pub psi_g: Parity,
    pub u_e: Parity,
    pub psi_e: Parity,
}

impl ParityTable {
    pub fn new(u_g: Parity, psi_g: Parity, u_e: Parity, psi_e: Parity) -> Result<Self> {
        Ok(Self { u_g: check(u_g)?, psi_g: check(psi_g)?, u_e: check(u_e)?, psi_e: check(psi_e)? })
    }

    /// Lens-shaped dot: in-plane envelope parity, none along the growth axis.
    pub fn lens_dot() -> Self {
        Self { u_g: [-1, 1, 1], psi_g: [1, 1, 0], u_e: [1, 1, 1], psi_e: [1, 1, 0] }
    }

    /// Envelopes with full inversion symmetry, as for atomic states.
    pub fn parity_symmetric() -> Self {
        Self { psi_g: [1, 1, 1], psi_e: [1, 1, 1], ..Self::lens_dot() }
    }

    /// No symmetry at all.
    pub fn unconstrained() -> Self {
        Self { u_g: [0; 3], psi_g: [0; 3], u_e: [0; 3], psi_e: [0; 3] }
    }

    pub fn big_psi_g(&self) -> Parity {
        product(self.u_g, self.psi_g)
    }

    pub fn big_psi_e(&self) -> Parity {
        product(self.u_e, self.psi_e)
    }
}

/// Which entries of μ and Λ are symmetry-allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentPattern {
    pub mu: [bool; 3],
    pub lambda: [[bool; 3]; 3],
}

impl MomentPattern {
    pub fn lambda_entries(&self) -> Vec<(usize, usize)> {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| self.lambda[i][j])
            .collect()
    }
}

fn flip(mut p: Parity, axis: usize) -> Parity {
    p[axis] = -p[axis];
    p
}

fn survives(p: Parity) -> bool {
    p.iter().all(|&v| v >= 0)
}

/// Allowed entries: μ_i ~ Ψ_g* ∂_i Ψ_e and Λ_ij ~ Ψ_g* x_i ∂_j Ψ_e.
pub fn allowed_moments(table: &ParityTable) -> MomentPattern {
    let base = product(table.big_psi_g(), table.big_psi_e());
    let mut pattern = MomentPattern { mu: [false; 3], lambda: [[false; 3]; 3] };
    for j in 0..3 {
        pattern.mu[j] = survives(flip(base, j));
        for i in 0..3 {
            pattern.lambda[i][j] = survives(flip(flip(base, i), j));
        }
    }
    pattern
}

/// Out-of-plane Gaussian envelopes of electron and hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelopes {
    /// Electron HWHM of the density |ψ_e|², nm.
    pub sigma_e: f64,
    /// Hole-to-electron mass ratio ξ.
    pub mass_ratio: f64,
    /// Center offset z_e - z_g, nm.
    pub shift: f64,
}

impl GaussianEnvelopes {
    pub fn new(sigma_e: f64, mass_ratio: f64, shift: f64) -> Result<Self> {
        if !(sigma_e > 0.0 && sigma_e.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma_e must be positive, got {sigma_e}")));
        }
        if !(mass_ratio > 0.0 && mass_ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass ratio must be positive, got {mass_ratio}")));
        }
        if !shift.is_finite() {
            return Err(Error::InvalidArgument("shift must be finite".into()));
        }
        Ok(Self { sigma_e, mass_ratio, shift })
    }

    pub fn sigma_h(&self) -> f64 {
        self.sigma_e / self.mass_ratio.sqrt()
    }
}

/// Amplitude width a of ψ ∝ exp(-z²/(2a²)) whose density has half-width `hwhm`.
fn amplitude_width(hwhm: f64) -> f64 {
    hwhm / std::f64::consts::LN_2.sqrt()
}

/// Normalized overlap ⟨ψ_g|ψ_e⟩ and centroid ⟨ψ_g|z|ψ_e⟩/⟨ψ_g|ψ_e⟩ with z_g = 0.
pub fn gaussian_overlap(env: &GaussianEnvelopes) -> (f64, f64) {
    let ag2 = amplitude_width(env.sigma_h()).powi(2);
    let ae2 = amplitude_width(env.sigma_e).powi(2);
    let a2 = 1.0 / (1.0 / ag2 + 1.0 / ae2);
    let overlap = (2.0 * a2 / (ag2 * ae2).sqrt()).sqrt() * (-env.shift * env.shift / (2.0 * (ag2 + ae2))).exp();
    let centroid = a2 * env.shift / ae2;
    (overlap, centroid)
}

/// |Λ_zx/μ| in nm: offset of the matrix-element centroid from the
/// mass-weighted center z0 = (z_e + ξ z_g)/(1 + ξ).
pub fn lambda_zx_estimate(env: &GaussianEnvelopes) -> Result<f64> {
    let (overlap, centroid) = gaussian_overlap(env);
    if !(overlap > f64::MIN_POSITIVE) {
        return Err(Error::ZeroOverlap);
    }
    let z0 = env.shift / (1.0 + env.mass_ratio);
    Ok((centroid - z0).abs())
}

/// Figure of merit 2k|Λ_zx/μ| for dropping Λ_zx.
pub fn lambda_zx_significance(estimate: f64, k: f64) -> Result<f64> {
    if !(estimate >= 0.0) {
        return Err(Error::InvalidArgument(format!("estimate must be non-negative, got {estimate}")));
    }
    Ok(2.0 * k * estimate)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaCheck {
    pub value: f64,
    pub negligible: bool,
}

/// k²L² and whether the second-order moment can be dropped.
pub fn omega_negligibility(k: f64, l_qd: f64) -> OmegaCheck {
    let value = (k * l_qd).powi(2);
    OmegaCheck { value, negligible: value < 0.1 }
}
