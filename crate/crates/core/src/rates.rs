//! Rate ladder Γ⁽⁰⁾, Γ⁽¹⁾, Γ⁽²⁾ from a Green bundle, the magnetic-dipole /
//! electric-quadrupole split of Γ⁽¹⁾, and field extraction by orientation flip.
//!
//! The second-order mesoscopic moment Ω is left out; see
//! [`crate::moments::omega_negligibility`].

use crate::error::{Error, Result};
use crate::halfspace::GreenBundle;
use crate::model::EmitterMoments;
use std::f64::consts::PI;

/// Normalized rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateLadder {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl RateLadder {
    pub fn total(&self) -> f64 {
        self.gamma0 + self.gamma1 + self.gamma2
    }

    /// Ladder for the opposite orientation.
    pub fn flipped(&self) -> Self {
        Self { gamma1: -self.gamma1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipoleSplit {
    pub gamma1_md: f64,
    pub gamma1_eq: f64,
    /// Magnetic-dipole moment ratio m/μ = Λ/2 [nm].
    pub m: f64,
    /// Quadrupole moment ratio Q/μ = Λ/2 [nm].
    pub q: f64,
}

/// Γ orders without validity checks, for partial bundles such as single channels.
pub fn ladder_terms(bundle: &GreenBundle, ratio: f64, norm: f64) -> RateLadder {
    RateLadder {
        gamma0: bundle.g_xx / norm,
        gamma1: 2.0 * ratio * bundle.d_g_zx / norm,
        gamma2: ratio * ratio * bundle.dd_g_zz / norm,
    }
}

fn check_norm(norm: f64) -> Result<()> {
    if norm > 0.0 && norm.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("normalization must be positive, got {norm}")))
    }
}

/// Assemble the ladder. `norm` is the homogeneous Im G_xx = k/(6π) of the host,
/// which also fixes the k used for the kL < 1 validity check.
pub fn rate_ladder(bundle: &GreenBundle, moments: &EmitterMoments, norm: f64) -> Result<RateLadder> {
    check_norm(norm)?;
    let k = 6.0 * PI * norm;
    let kl = k * moments.l_qd;
    if kl >= 1.0 {
        return Err(Error::ExpansionInvalid { kl });
    }
    let l = ladder_terms(bundle, moments.ratio(), norm);
    if !(l.gamma0.is_finite() && l.gamma1.is_finite() && l.gamma2.is_finite()) {
        return Err(Error::InconsistentBundle("non-finite entries".into()));
    }
    if l.gamma0 < 0.0 {
        return Err(Error::InconsistentBundle(format!("Γ⁽⁰⁾ = {} < 0", l.gamma0)));
    }
    if l.total() < 0.0 {
        return Err(Error::NegativeTotal { total: l.total() });
    }
    Ok(l)
}

pub fn md_eq_split(bundle: &GreenBundle, moments: &EmitterMoments, norm: f64) -> Result<MultipoleSplit> {
    check_norm(norm)?;
    let scale = bundle.b_yx.abs().max(bundle.q_xz.abs()).max(bundle.d_g_zx.abs());
    let resid = bundle.b_yx + bundle.q_xz - 2.0 * bundle.d_g_zx;
    if resid.abs() > 1e-9 * scale {
        return Err(Error::InconsistentBundle(format!(
            "b_yx + q_xz - 2 d_g_zx = {resid:.3e} (scale {scale:.3e})"
        )));
    }
    let half = 0.5 * moments.ratio();
    Ok(MultipoleSplit {
        gamma1_md: 2.0 * half * bundle.b_yx / norm,
        gamma1_eq: 2.0 * half * bundle.q_xz / norm,
        m: half,
        q: half,
    })
}

/// From the totals of the two orientations recover (Γ⁽⁰⁾ + Γ⁽²⁾, Γ⁽¹⁾).
pub fn extract_fields(gamma_up: f64, gamma_down: f64) -> (f64, f64) {
    (0.5 * (gamma_up + gamma_down), 0.5 * (gamma_up - gamma_down))
}
