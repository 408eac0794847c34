//! Electrostatic point-dipole background of a metal cylinder.
//!
//! The scattered field is a sum over azimuthal harmonics m of axial-wavevector
//! integrals, G^sc = -(1/(4π k1²)) (2/π) [T0 + 2 Σ_{m>=1} T_m] with
//! T_m = ∫ dq q² A_m(q) K_m(q r0)² for the axial component (K_m' for radial),
//! A_m = -(ε2-ε1) I_m I_m' / (ε2 I_m' K_m - ε1 I_m K_m') at qa.
//! The m = 0 harmonic carries the quasi-static plasmon pole, which is already
//! counted by the guided mode and is removed here as iπ times its residue.

use crate::error::{Error, Result};
use crate::nanowire::{quasistatic_d0_prime, quasistatic_root, WireGeometry, WireOrientation};
use crate::quadrature::{integrate, Tolerance};
use crate::specfun::{bessel_ik_scaled_seq, bessel_ik_seq, cdiv};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
pub const DEFAULT_M_MAX: usize = 30;
pub const M_LIMIT: usize = 50;
const TAIL_EXPONENT: f64 = 90.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundOptions {
    pub m_max: usize,
    pub rel_tol: f64,
}

impl Default for BackgroundOptions {
    fn default() -> Self {
        Self { m_max: DEFAULT_M_MAX, rel_tol: 1e-10 }
    }
}

/// Normalized background rate contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Background {
    /// Radiative floor, the homogeneous host rate.
    pub radiative: f64,
    /// Nonradiative loss with the plasmon pole removed.
    pub lossy: f64,
    /// Full electrostatic nonradiative rate, pole included.
    pub nonradiative: f64,
    /// Pole part removed from `nonradiative`.
    pub pole: f64,
    pub m_used: usize,
}

impl Background {
    pub fn total(&self) -> f64 {
        self.radiative + self.lossy
    }
}

struct Cyl {
    a: f64,
    r0: f64,
    e1: Complex64,
    e2: Complex64,
    radial: bool,
}

impl Cyl {
    /// q² A_m K_m(q r0)² (or K_m'²) for m = 0..=m_max, assembled from scaled
    /// functions so that only the factor e^{-2qd} carries the size.
    fn terms(&self, q: Complex64, m_lo: usize, m_max: usize) -> Vec<Complex64> {
        let x = q * self.a;
        let y = q * self.r0;
        let (ix, kx) = bessel_ik_scaled_seq(m_max + 1, x).expect("Re q >= 0 on all paths");
        let (_, ky) = bessel_ik_scaled_seq(m_max + 1, y).expect("Re q >= 0 on all paths");
        let damp = (2.0 * (x - y)).exp();
        (m_lo..=m_max)
            .map(|m| {
                let mf = m as f64;
                // Scaled derivatives e^{-x} I_m' and e^{x} K_m'.
                let (ipx, kpx, kpy) = if m == 0 {
                    (ix[1], -kx[1], -ky[1])
                } else {
                    (ix[m - 1] - mf / x * ix[m], -kx[m - 1] - mf / x * kx[m], -ky[m - 1] - mf / y * ky[m])
                };
                let kyv = if self.radial { kpy } else { ky[m] };
                let denom = self.e2 * kx[m] - self.e1 * kpx * cdiv(ix[m], ipx);
                // Paired so that large K_m(q r0) never appears squared.
                -(self.e2 - self.e1) * (ix[m] * kyv) * cdiv(kyv, denom) * damp * q * q
            })
            .collect()
    }
}

fn prefactor(k1: f64) -> f64 {
    -(1.0 / (4.0 * PI * k1 * k1)) * (2.0 / PI)
}

/// Electrostatic background at distance d from the wire surface.
pub fn quasistatic_background(geom: &WireGeometry, d: f64, orientation: WireOrientation) -> Result<Background> {
    quasistatic_background_with(geom, d, orientation, &BackgroundOptions::default())
}

pub fn quasistatic_background_with(
    geom: &WireGeometry,
    d: f64,
    orientation: WireOrientation,
    opts: &BackgroundOptions,
) -> Result<Background> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("distance must be positive, got {d}")));
    }
    if opts.m_max == 0 || opts.m_max > M_LIMIT {
        return Err(Error::InvalidArgument(format!("m_max must be in 1..={M_LIMIT}")));
    }
    let cyl = Cyl {
        a: geom.rho,
        r0: geom.rho + d,
        e1: geom.host.eps(),
        e2: geom.metal.eps(),
        radial: orientation == WireOrientation::Radial,
    };
    let k1 = geom.k1();
    let pref = prefactor(k1);
    let to_rate = |g: Complex64| (6.0 * PI / k1) * (pref * g).im;

    // m = 0 on an ellipse below the pole, then the real tail.
    let qp = if geom.metal.eps().re < 0.0 && (geom.metal.eps() + cyl.e1).re < 0.0 {
        Some(quasistatic_root(cyl.e2, cyl.e1)? / cyl.a)
    } else {
        None
    };
    let q_ref = qp.map(|q| q.re).unwrap_or(1.0 / cyl.a);
    let q_e = 2.0 * q_ref;
    let b = 0.5 * q_ref;
    let mut m_max = opts.m_max;
    let q_max = |m: usize| TAIL_EXPONENT / (2.0 * d) + m as f64 / cyl.r0 + q_e;
    let tol0 = Tolerance::rel(opts.rel_tol, 1);
    let ell = integrate(
        |th| {
            let q = Complex64::new(0.5 * q_e * (1.0 - th.cos()), -b * th.sin());
            let jac = Complex64::new(0.5 * q_e * th.sin(), -b * th.cos());
            vec![cyl.terms(q, 0, 0)[0] * jac]
        },
        &[0.0, 0.5 * PI, PI],
        1,
        &tol0,
    )?;
    let tail0 = integrate(|q| cyl.terms(Complex64::new(q, 0.0), 0, 0), &[q_e, q_max(0)], 1, &tol0)?;
    let t0 = ell.value[0] + tail0.value[0];

    let pole = match qp {
        Some(q) => {
            let x = q * cyl.a;
            let (i, _) = bessel_ik_seq(1, x)?;
            let (_, ky) = bessel_ik_seq(1, q * cyl.r0)?;
            let kyv = if cyl.radial { ky[1] } else { ky[0] };
            let dd = quasistatic_d0_prime(x, cyl.e2, cyl.e1)?;
            let num = -(cyl.e2 - cyl.e1) * i[0] * i[1] * kyv * kyv * q * q;
            to_rate(I * PI * num / (dd * cyl.a))
        }
        None => 0.0,
    };

    loop {
        // Harmonics m >= 1 on the real axis, all at once.
        let n = m_max;
        let tol = Tolerance::rel(opts.rel_tol, n).with_scale(vec![1e-6 * t0.norm(); n]);
        let q_lo = 1e-2 / cyl.a;
        let r = integrate(|q| cyl.terms(Complex64::new(q, 0.0), 1, m_max), &[q_lo, q_e, q_max(m_max)], n, &tol)?;
        let mut partial = Vec::with_capacity(n + 1);
        let mut acc = t0;
        partial.push(to_rate(acc));
        for v in &r.value {
            acc += 2.0 * v;
            partial.push(to_rate(acc));
        }
        let total_nr = *partial.last().expect("non-empty");
        let last = (partial[n] - partial[n - 1]).abs();
        if last <= 1e-7 * total_nr.abs().max(1e-6) {
            return Ok(Background {
                radiative: 1.0,
                lossy: total_nr - pole,
                nonradiative: total_nr,
                pole,
                m_used: m_max,
            });
        }
        if m_max >= M_LIMIT {
            return Err(Error::HarmonicSum { m_max, partial });
        }
        m_max = (2 * m_max).min(M_LIMIT);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Material;

    #[test]
    fn far_field_background() {
        let g = WireGeometry::reference();
        for o in [WireOrientation::Axial, WireOrientation::Radial] {
            let b = quasistatic_background(&g, 1000.0, o).unwrap();
            assert!((b.total() - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn lossless_metal_has_no_loss() {
        let metal = Material::from_eps("lossless Ag", Complex64::new(-48.96, 0.0)).unwrap();
        let g = WireGeometry::new(30.0, metal, Material::gaas(), 1000.0).unwrap();
        for o in [WireOrientation::Axial, WireOrientation::Radial] {
            let b = quasistatic_background(&g, 20.0, o).unwrap();
            assert!(b.lossy.abs() < 1e-10, "{o:?}: {}", b.lossy);
        }
    }

    #[test]
    fn harmonic_convergence() {
        let g = WireGeometry::reference();
        let a = quasistatic_background_with(&g, 20.0, WireOrientation::Axial, &BackgroundOptions { m_max: 20, rel_tol: 1e-10 }).unwrap();
        let b = quasistatic_background_with(&g, 20.0, WireOrientation::Axial, &BackgroundOptions { m_max: 40, rel_tol: 1e-10 }).unwrap();
        assert!((a.total() / b.total() - 1.0).abs() < 1e-3);
        assert!(a.lossy > 0.0 && a.pole > 0.0);
    }

    #[test]
    fn unconverged_sum_reports_partials() {
        let g = WireGeometry::reference();
        match quasistatic_background(&g, 0.5, WireOrientation::Axial) {
            Err(Error::HarmonicSum { m_max, partial }) => {
                assert_eq!(m_max, M_LIMIT);
                assert_eq!(partial.len(), M_LIMIT + 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
