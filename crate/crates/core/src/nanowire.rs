//! Fundamental (m = 0, TM) plasmon of a metal nanowire in a dielectric host,
//! and the emitter decay rates into it.
//!
//! The complex propagation constant is the root of
//! (ε_in/κ_in) I1/I0(κ_in ρ) + (ε_out/κ_out) K1/K0(κ_out ρ) = 0.
//! Field profiles, the energy normalization ∫ε|e|² dA = 1 and the group
//! velocity are evaluated for the lossless companion mode (metal Im ε set to
//! zero), where the profiles are real.

use crate::error::{Error, Result};
use crate::halfspace::GreenBundle;
use crate::model::{homogeneous_im_gxx, vacuum_wavevector, EmitterMoments, Material, C0};
use crate::rates::{rate_ladder, RateLadder};
use crate::specfun::{bessel_ik_scaled_seq, bessel_ik_seq};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Relative wavelength step of the group-velocity difference quotient.
pub const GROUP_VELOCITY_STEP: f64 = 1e-3;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WireGeometry {
    /// Wire radius [nm].
    pub rho: f64,
    pub metal: Material,
    pub host: Material,
    pub lambda0: f64,
}

impl WireGeometry {
    pub fn new(rho: f64, metal: Material, host: Material, lambda0: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("wire radius must be positive, got {rho}")));
        }
        vacuum_wavevector(lambda0)?;
        if host.n().im != 0.0 || host.n().re <= 0.0 {
            return Err(Error::InvalidArgument("the host must be a lossless dielectric".into()));
        }
        Ok(Self { rho, metal, host, lambda0 })
    }

    pub fn reference() -> Self {
        Self::new(30.0, Material::silver(), Material::gaas(), 1000.0).expect("valid preset")
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.lambda0
    }

    pub fn k1(&self) -> f64 {
        self.host.n().re * self.k0()
    }

    /// Homogeneous-host Im G_xx used to normalize rates.
    pub fn norm(&self) -> f64 {
        homogeneous_im_gxx(self.k1())
    }

    fn check_plasmonic(&self) -> Result<()> {
        let e = self.metal.eps();
        if e.re >= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "metal needs Re ε < 0 to guide a plasmon, got {}",
                e.re
            )));
        }
        if (e + self.host.eps()).re >= 0.0 {
            return Err(Error::NoBoundMode("Re(ε_metal + ε_host) >= 0".into()));
        }
        Ok(())
    }
}

/// Emitter orientation with respect to the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WireOrientation {
    /// Dipole along the wire axis, growth axis radial.
    Axial,
    /// Dipole radial, growth axis azimuthal.
    Radial,
}

/// Real-valued profile data of the lossless companion mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Companion {
    pub beta: f64,
    pub kappa_in: f64,
    pub kappa_out: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidedMode {
    /// Complex propagation constant of the lossy wire [rad/nm].
    pub k_sp: Complex64,
    pub kappa_in: Complex64,
    pub kappa_out: Complex64,
    /// |F| relative to the magnitude of its outer term, at k_sp.
    pub residual: f64,
    pub companion: Companion,
    /// Amplitude 𝒩 giving ∫ε|e|² dA = 1 [1/nm].
    pub norm: f64,
    /// Group velocity [nm/fs].
    pub v_g: f64,
    rho: f64,
    eps_in: f64,
    eps_out: f64,
    k0: f64,
    k1: f64,
}

/// Field components at a point: e_r, e_z at z = 0 (times e^{iβz}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub r: f64,
    pub z: f64,
    pub e_r: Complex64,
    pub e_z: Complex64,
}

/// Rectangular sampling window in (r, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub nr: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
}

fn principal_kappa(k: Complex64, eps: Complex64, k0: f64) -> Complex64 {
    let mut kap = (k * k - eps * k0 * k0).sqrt();
    if kap.re < 0.0 {
        kap = -kap;
    }
    kap
}

/// Characteristic function and the magnitude of its outer term.
fn dispersion(k: Complex64, eps_in: Complex64, eps_out: Complex64, rho: f64, k0: f64) -> Result<(Complex64, f64)> {
    let ki = principal_kappa(k, eps_in, k0);
    let ko = principal_kappa(k, eps_out, k0);
    let (iv, _) = bessel_ik_scaled_seq(1, ki * rho)?;
    let (_, kv) = bessel_ik_scaled_seq(1, ko * rho)?;
    let inner = eps_in / ki * iv[1] / iv[0];
    let outer = eps_out / ko * kv[1] / kv[0];
    Ok((inner + outer, outer.norm()))
}

fn dispersion_real(beta: f64, eps_in: f64, eps_out: f64, rho: f64, k0: f64) -> Result<f64> {
    Ok(dispersion(Complex64::new(beta, 0.0), eps_in.into(), eps_out.into(), rho, k0)?.0.re)
}

/// ε_in I1(x)K0(x) + ε_out I0(x)K1(x), the quasi-static m = 0 condition in x = qρ.
pub(crate) fn quasistatic_d0(x: Complex64, eps_in: Complex64, eps_out: Complex64) -> Result<Complex64> {
    let (i, k) = bessel_ik_seq(1, x)?;
    Ok(eps_in * i[1] * k[0] + eps_out * i[0] * k[1])
}

pub(crate) fn quasistatic_d0_prime(x: Complex64, eps_in: Complex64, eps_out: Complex64) -> Result<Complex64> {
    let (i, k) = bessel_ik_seq(1, x)?;
    let (i0, i1, k0, k1) = (i[0], i[1], k[0], k[1]);
    Ok(eps_in * ((i0 - i1 / x) * k0 - i1 * k1) + eps_out * (i1 * k1 - i0 * k0 - i0 * k1 / x))
}

/// Root x = qρ of the quasi-static m = 0 condition, continued from the lossless root.
pub(crate) fn quasistatic_root(eps_in: Complex64, eps_out: Complex64) -> Result<Complex64> {
    let f = |x: f64| -> Result<f64> { Ok(quasistatic_d0(Complex64::new(x, 0.0), eps_in.re.into(), eps_out)?.re) };
    let n = 600;
    let (lo, hi) = (1e-4_f64.ln(), 60.0_f64.ln());
    let grid: Vec<f64> = (0..=n).map(|j| (lo + (hi - lo) * j as f64 / n as f64).exp()).collect();
    let vals = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let brackets: Vec<(f64, f64)> = (0..n)
        .filter(|&j| vals[j].signum() != vals[j + 1].signum())
        .map(|j| (grid[j], grid[j + 1]))
        .collect();
    let (a, b) = match brackets.as_slice() {
        [] => return Err(Error::NoBoundMode("no quasi-static m = 0 resonance".into())),
        [one] => *one,
        many => return Err(Error::MultipleRoots { roots: many.iter().map(|p| 0.5 * (p.0 + p.1)).collect() }),
    };
    let x_real = bisect(f, a, b)?;
    let mut x = Complex64::new(x_real, 0.0);
    for _ in 0..60 {
        let d = quasistatic_d0(x, eps_in, eps_out)?;
        let dp = quasistatic_d0_prime(x, eps_in, eps_out)?;
        let step = d / dp;
        x -= step;
        if step.norm() < 1e-15 * x.norm() {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence { what: "quasi-static resonance".into(), achieved: f64::NAN })
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = f(a)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Propagation constant of the lossless wire, with a uniqueness scan over β > k_host.
fn lossless_beta(rho: f64, eps_in: f64, eps_out: f64, k0: f64) -> Result<f64> {
    let k1 = eps_out.sqrt() * k0;
    let span = 400.0 / rho + 60.0 * k1;
    let n = 3000;
    let (lo, hi) = ((1e-9 * k1).ln(), span.ln());
    let grid: Vec<f64> = (0..=n).map(|j| k1 + (lo + (hi - lo) * j as f64 / n as f64).exp()).collect();
    let vals = grid
        .iter()
        .map(|&b| dispersion_real(b, eps_in, eps_out, rho, k0))
        .collect::<Result<Vec<_>>>()?;
    let brackets: Vec<(f64, f64)> = (0..n)
        .filter(|&j| vals[j].signum() != vals[j + 1].signum())
        .map(|j| (grid[j], grid[j + 1]))
        .collect();
    match brackets.as_slice() {
        [] => Err(Error::NoBoundMode("no guided plasmon in the search region".into())),
        [(a, b)] => bisect(|x| dispersion_real(x, eps_in, eps_out, rho, k0), *a, *b),
        many => Err(Error::MultipleRoots { roots: many.iter().map(|p| 0.5 * (p.0 + p.1)).collect() }),
    }
}

/// Damped complex Newton iteration with a central-difference derivative.
fn newton(
    mut k: Complex64,
    eps_in: Complex64,
    eps_out: Complex64,
    rho: f64,
    k0: f64,
) -> Result<(Complex64, f64)> {
    let f = |k: Complex64| dispersion(k, eps_in, eps_out, rho, k0);
    let (mut fk, mut scale) = f(k)?;
    for _ in 0..100 {
        let h = 1e-6 * k.norm();
        let d = (f(k + h)?.0 - f(k - h)?.0) / (2.0 * h);
        let step = -fk / d;
        let mut lam = 1.0;
        let (mut kn, (mut fn_, mut sn)) = (k + step, f(k + step)?);
        while fn_.norm() >= fk.norm() && lam > 1e-4 {
            lam *= 0.5;
            kn = k + step * lam;
            (fn_, sn) = f(kn)?;
        }
        let moved = (kn - k).norm();
        k = kn;
        fk = fn_;
        scale = sn;
        if fk.norm() <= 1e-14 * scale || (moved < 1e-15 * k.norm() && fk.norm() < RESIDUAL_TOL * scale) {
            return Ok((k, fk.norm() / scale));
        }
    }
    let achieved = fk.norm() / scale;
    if achieved < RESIDUAL_TOL {
        Ok((k, achieved))
    } else {
        Err(Error::NonConvergence { what: "plasmon dispersion Newton".into(), achieved })
    }
}

/// Lommel-integral energy W = ∫ε(ℰ_r² + ℰ_z²) dA for the profile with ℰ_z(ρ) = 1.
fn energy(c: &Companion, rho: f64, eps_in: f64, eps_out: f64) -> Result<f64> {
    let (b, ki, ko) = (c.beta, c.kappa_in, c.kappa_out);
    let (iv, _) = bessel_ik_scaled_seq(2, Complex64::new(ki * rho, 0.0))?;
    let (_, kv) = bessel_ik_scaled_seq(2, Complex64::new(ko * rho, 0.0))?;
    let (i0, i1, i2) = (iv[0].re, iv[1].re, iv[2].re);
    let (k0, k1, k2) = (kv[0].re, kv[1].re, kv[2].re);
    let r2 = 0.5 * rho * rho;
    // Outside, divided by K0(κρ)²; inside, divided by I0(κ_in ρ)².
    let out_z = r2 * (k1 * k1 - k0 * k0) / (k0 * k0);
    let out_r = (b / ko).powi(2) * r2 * (k0 * k2 - k1 * k1) / (k0 * k0);
    let in_z = r2 * (i0 * i0 - i1 * i1) / (i0 * i0);
    let in_r = (b / ki).powi(2) * r2 * (i1 * i1 - i0 * i2) / (i0 * i0);
    Ok(2.0 * PI * (eps_out * (out_z + out_r) + eps_in * (in_z + in_r)))
}

fn companion(beta: f64, eps_in: f64, eps_out: f64, k0: f64) -> Companion {
    Companion {
        beta,
        kappa_in: (beta * beta - eps_in * k0 * k0).sqrt(),
        kappa_out: (beta * beta - eps_out * k0 * k0).sqrt(),
    }
}

/// Solve for the single guided plasmon and attach its normalization and group velocity.
pub fn solve_dispersion(geom: &WireGeometry) -> Result<GuidedMode> {
    geom.check_plasmonic()?;
    let k0 = geom.k0();
    let eps_m = geom.metal.eps();
    let eps_h = geom.host.eps();
    let (eps_in, eps_out) = (eps_m.re, eps_h.re);
    let beta = lossless_beta(geom.rho, eps_in, eps_out, k0)?;

    let x = quasistatic_root(eps_m, eps_h)?;
    let q = x / geom.rho;
    let seed = (q * q + eps_h * k0 * k0).sqrt();
    let near = |k: Complex64| (k.re - beta).abs() < 0.2 * beta && k.im >= -1e-12 * k.re;
    let root = match newton(seed, eps_m, eps_h, geom.rho, k0) {
        Ok(r) if near(r.0) => r,
        _ => {
            log::debug!("quasi-static seed {seed} failed; seeding from lossless root {beta}");
            newton(Complex64::new(beta, 0.0), eps_m, eps_h, geom.rho, k0)?
        }
    };
    let (k_sp, residual) = root;
    if !near(k_sp) {
        return Err(Error::NoBoundMode(format!("Newton root {k_sp} is not the continuation of β = {beta}")));
    }
    let kappa_out = principal_kappa(k_sp, eps_h, k0);
    if kappa_out.re <= 0.0 {
        return Err(Error::NoBoundMode(format!("Re κ_out = {} <= 0", kappa_out.re)));
    }
    let comp = companion(beta, eps_in, eps_out, k0);
    let w = energy(&comp, geom.rho, eps_in, eps_out)?;
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Unnormalized(format!("mode energy {w} is not positive")));
    }
    let v_g = group_velocity_with(geom, GROUP_VELOCITY_STEP)?;
    Ok(GuidedMode {
        k_sp,
        kappa_in: principal_kappa(k_sp, eps_m, k0),
        kappa_out,
        residual,
        companion: comp,
        norm: 1.0 / w.sqrt(),
        v_g,
        rho: geom.rho,
        eps_in,
        eps_out,
        k0,
        k1: geom.k1(),
    })
}

/// Group velocity dω/dβ by a symmetric difference at λ0(1 ± δ), ε frozen.
pub fn group_velocity(geom: &WireGeometry) -> Result<f64> {
    group_velocity_with(geom, GROUP_VELOCITY_STEP)
}

pub fn group_velocity_with(geom: &WireGeometry, delta: f64) -> Result<f64> {
    geom.check_plasmonic()?;
    let (eps_in, eps_out) = (geom.metal.eps().re, geom.host.eps().re);
    let lp = geom.lambda0 * (1.0 + delta);
    let lm = geom.lambda0 * (1.0 - delta);
    let (k0p, k0m) = (2.0 * PI / lp, 2.0 * PI / lm);
    let bp = lossless_beta(geom.rho, eps_in, eps_out, k0p)?;
    let bm = lossless_beta(geom.rho, eps_in, eps_out, k0m)?;
    Ok(C0 * (k0p - k0m) / (bp - bm))
}

impl GuidedMode {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Effective index k_sp/k0.
    pub fn n_eff(&self) -> Complex64 {
        self.k_sp / self.k0
    }

    /// Real profile (ℰ_r, ℰ_z) with ℰ_z(ρ) = 1; amplitudes of e = 𝒩(-ℰ_r, 0, iℰ_z).
    pub fn profile(&self, r: f64) -> Result<(f64, f64)> {
        let c = &self.companion;
        if r >= self.rho {
            let (_, kr) = bessel_ik_scaled_seq(1, Complex64::new(c.kappa_out * r, 0.0))?;
            let (_, ka) = bessel_ik_scaled_seq(0, Complex64::new(c.kappa_out * self.rho, 0.0))?;
            let damp = (-c.kappa_out * (r - self.rho)).exp() / ka[0].re;
            Ok((c.beta / c.kappa_out * kr[1].re * damp, kr[0].re * damp))
        } else {
            let (ir, _) = bessel_ik_scaled_seq(1, Complex64::new((c.kappa_in * r).max(1e-300), 0.0))?;
            let (ia, _) = bessel_ik_scaled_seq(0, Complex64::new(c.kappa_in * self.rho, 0.0))?;
            let grow = (c.kappa_in * (r - self.rho)).exp() / ia[0].re;
            Ok((-c.beta / c.kappa_in * ir[1].re * grow, ir[0].re * grow))
        }
    }

    /// d(ℰ_z)/dr.
    fn dez_dr(&self, r: f64) -> Result<f64> {
        let c = &self.companion;
        let (er, _) = self.profile(r)?;
        let kap2 = if r >= self.rho { c.kappa_out.powi(2) } else { -c.kappa_in.powi(2) };
        Ok(-kap2 / c.beta * er)
    }

    /// Permittivity of the companion at radius r.
    pub fn eps_at(&self, r: f64) -> f64 {
        if r < self.rho {
            self.eps_in
        } else {
            self.eps_out
        }
    }

    /// Normalized (e_r, e_z) at (r, z).
    pub fn field(&self, r: f64, z: f64) -> Result<(Complex64, Complex64)> {
        let (er, ez) = self.profile(r)?;
        let ph = (I * self.companion.beta * z).exp() * self.norm;
        Ok((-er * ph, I * ez * ph))
    }

    /// Per-photon coupling constant C = 3πc/(n k0² v_g).
    pub fn coupling(&self) -> f64 {
        3.0 * PI * C0 / (self.eps_out.sqrt() * self.k0 * self.k0 * self.v_g)
    }

    /// Interface-style bundle of the plasmon field at distance d from the surface.
    pub fn green_bundle(&self, d: f64, orientation: WireOrientation) -> Result<GreenBundle> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("distance must be positive, got {d}")));
        }
        if !(self.norm > 0.0 && self.norm.is_finite() && self.v_g > 0.0) {
            return Err(Error::Unnormalized("mode amplitude or group velocity not set".into()));
        }
        let r = self.rho + d;
        let n = homogeneous_im_gxx(self.k1);
        let cc = self.coupling();
        let (e_r, e_z) = self.field(r, 0.0)?;
        Ok(match orientation {
            WireOrientation::Axial => {
                let dz_er = I * self.companion.beta * e_r;
                let dr_ez = I * self.norm * self.dez_dr(r)?;
                let grad = (dz_er.conj() * e_z).re;
                GreenBundle {
                    g_xx: n * cc * e_z.norm_sqr(),
                    d_g_zx: n * cc * grad,
                    dd_g_zz: n * cc * dz_er.norm_sqr(),
                    b_yx: n * cc * ((dz_er.conj() - dr_ez.conj()) * e_z).re,
                    q_xz: n * cc * ((dz_er.conj() + dr_ez.conj()) * e_z).re,
                }
            }
            // The field probed by Λ is e_φ, which vanishes for the m = 0 mode.
            WireOrientation::Radial => GreenBundle { g_xx: n * cc * e_r.norm_sqr(), ..Default::default() },
        })
    }

    /// Γ⁽¹⁾ of the axial emitter from the closed form -2C(Λ/μ)β𝒩²ℰ_rℰ_z.
    pub fn axial_gamma1_reduced(&self, d: f64, ratio: f64) -> Result<f64> {
        let (er, ez) = self.profile(self.rho + d)?;
        Ok(-2.0 * self.coupling() * ratio * self.companion.beta * self.norm * self.norm * er * ez)
    }
}

/// Plasmon decay rates normalized to the homogeneous host rate.
pub fn plasmon_rates(
    mode: &GuidedMode,
    d: f64,
    moments: &EmitterMoments,
    orientation: WireOrientation,
) -> Result<RateLadder> {
    let b = mode.green_bundle(d, orientation)?;
    rate_ladder(&b, moments, homogeneous_im_gxx(mode.k1))
}

/// Sample the normalized mode field on a window. Moments are not used by the
/// field itself and are accepted for symmetry with the rate calls.
pub fn field_map(mode: &GuidedMode, _moments: &EmitterMoments, window: &FieldWindow) -> Result<Vec<FieldSample>> {
    if window.nr == 0 || window.nz == 0 || !(window.r_max >= window.r_min) || window.r_min < 0.0 {
        return Err(Error::InvalidArgument("empty or inverted field window".into()));
    }
    let step = |lo: f64, hi: f64, n: usize, j: usize| if n == 1 { lo } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(window.nr * window.nz);
    for iz in 0..window.nz {
        let z = step(window.z_min, window.z_max, window.nz, iz);
        for ir in 0..window.nr {
            let r = step(window.r_min, window.r_max, window.nr, ir);
            let (e_r, e_z) = mode.field(r, z)?;
            out.push(FieldSample { r, z, e_r, e_z });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::{spp_pole, InterfaceGeometry};
    use crate::quadrature::{integrate, Tolerance};

    #[test]
    fn reference_dispersion() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let g1 = 2.0 * m.k_sp.re * 10.0;
        let g2 = (m.k_sp.re * 10.0).powi(2);
        assert!((0.73..=0.79).contains(&g1), "g1 = {g1}");
        assert!((0.12..=0.16).contains(&g2), "g2 = {g2}");
        assert!(m.residual < 1e-10);
        assert!(m.kappa_out.re > 0.0 && m.k_sp.im > 0.0);
        let kap2 = m.k_sp * m.k_sp - Material::gaas().eps() * m.k0 * m.k0;
        assert!((m.kappa_out * m.kappa_out - kap2).norm() < 1e-14);
    }

    #[test]
    fn thick_wire_approaches_planar() {
        let g = WireGeometry::new(5000.0, Material::silver(), Material::gaas(), 1000.0).unwrap();
        let m = solve_dispersion(&g).unwrap();
        let p = spp_pole(&InterfaceGeometry::reference(50.0).unwrap()).unwrap();
        assert!((m.k_sp.re / p.re - 1.0).abs() < 0.01, "{} vs {}", m.k_sp, p);
    }

    #[test]
    fn no_plasmon_without_metal() {
        let g = WireGeometry::new(30.0, Material::gaas(), Material::gaas(), 1000.0).unwrap();
        assert!(matches!(solve_dispersion(&g), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn normalization_by_quadrature() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let dens = |r: f64| {
            let (er, ez) = m.field(r, 0.0).unwrap();
            Complex64::new(2.0 * PI * r * m.eps_at(r) * (er.norm_sqr() + ez.norm_sqr()), 0.0)
        };
        let tol = Tolerance::rel(1e-12, 1);
        let inside = integrate(|r| vec![dens(r)], &[0.0, m.rho()], 1, &tol).unwrap().value[0].re;
        // Map [ρ, ∞) to [0, 1) with r = ρ + s/(1-s).
        let outside = integrate(
            |s| {
                let r = m.rho() + s / (1.0 - s);
                vec![dens(r) / ((1.0 - s) * (1.0 - s))]
            },
            &[0.0, 0.5, 0.9, 1.0 - 1e-12],
            1,
            &tol,
        )
        .unwrap()
        .value[0]
            .re;
        assert!((inside + outside - 1.0).abs() < 1e-8, "{}", inside + outside);
    }

    #[test]
    fn group_velocity_consistency() {
        let g = WireGeometry::reference();
        let m = solve_dispersion(&g).unwrap();
        assert!(m.v_g > 0.0 && m.v_g < C0);
        let half = group_velocity_with(&g, 0.5 * GROUP_VELOCITY_STEP).unwrap();
        assert!((half / m.v_g - 1.0).abs() < 1e-3);
        // Energy transport: v_g = (ω/β) ∫ε|E_r|² / ∫ε(|E_r|² + |E_z|²).
        let tol = Tolerance::rel(1e-12, 2);
        let f = |r: f64| {
            let (er, ez) = m.profile(r).unwrap();
            let w = 2.0 * PI * r * m.eps_at(r);
            vec![Complex64::new(w * er * er, 0.0), Complex64::new(w * (er * er + ez * ez), 0.0)]
        };
        let a = integrate(f, &[0.0, m.rho()], 2, &tol).unwrap().value;
        let b = integrate(
            |s| {
                let r = m.rho() + s / (1.0 - s);
                f(r).into_iter().map(|v| v / ((1.0 - s) * (1.0 - s))).collect()
            },
            &[0.0, 0.5, 0.9, 1.0 - 1e-12],
            2,
            &tol,
        )
        .unwrap()
        .value;
        let v = C0 * m.k0 / m.companion.beta * (a[0].re + b[0].re) / (a[1].re + b[1].re);
        assert!((v / m.v_g - 1.0).abs() < 1e-5, "{v} vs {}", m.v_g);
    }

    #[test]
    fn group_velocity_below_phase_velocity() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let vp = C0 / m.n_eff().re;
        assert!(m.v_g < vp, "v_g = {} nm/fs exceeds c0/Re(n_eff) = {vp} nm/fs", m.v_g);
    }

    #[test]
    fn displacement_continuity() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let (ein, _) = m.field(m.rho() * (1.0 - 1e-15), 0.0).unwrap();
        let (eout, _) = m.field(m.rho(), 0.0).unwrap();
        let dr_in = m.eps_in * ein;
        let dr_out = m.eps_out * eout;
        assert!((dr_in - dr_out).norm() < 1e-8 * dr_out.norm());
        let (_, zin) = m.profile(m.rho() * (1.0 - 1e-15)).unwrap();
        assert!((zin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profiles_positive_and_decaying() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let mut prev = f64::INFINITY;
        for j in 0..200 {
            let r = m.rho() + 0.5 * j as f64;
            let (er, ez) = m.profile(r).unwrap();
            assert!(er > 0.0 && ez > 0.0);
            let mag = er * er + ez * ez;
            assert!(mag < prev);
            prev = mag;
        }
    }

    #[test]
    fn translation_phase() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let (r0, z0) = m.field(45.0, 3.0).unwrap();
        let (r1, z1) = m.field(45.0, 3.0 + 17.0).unwrap();
        let ph = (I * m.companion.beta * 17.0).exp();
        assert!((r1 - r0 * ph).norm() < 1e-14 * r0.norm());
        assert!((z1 - z0 * ph).norm() < 1e-14 * z0.norm());
    }

    #[test]
    fn rates_orientation_and_sign() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let up = EmitterMoments::reference();
        for d in [20.0, 55.0] {
            let rad = plasmon_rates(&m, d, &up, WireOrientation::Radial).unwrap();
            assert_eq!(rad.gamma1, 0.0);
            let a = plasmon_rates(&m, d, &up, WireOrientation::Axial).unwrap();
            let b = plasmon_rates(&m, d, &up.flipped(), WireOrientation::Axial).unwrap();
            assert_eq!(a.gamma1, -b.gamma1);
            assert_eq!((a.gamma0, a.gamma2), (b.gamma0, b.gamma2));
            assert!(a.gamma1 < 0.0);
            let red = m.axial_gamma1_reduced(d, up.ratio()).unwrap();
            assert!((red - a.gamma1).abs() < 1e-10 * red.abs());
        }
        let mut bad = m.clone();
        bad.norm = 0.0;
        assert!(matches!(plasmon_rates(&bad, 20.0, &up, WireOrientation::Axial), Err(Error::Unnormalized(_))));
        assert!(plasmon_rates(&m, 0.0, &up, WireOrientation::Axial).is_err());
    }

    #[test]
    fn field_map_grid() {
        let m = solve_dispersion(&WireGeometry::reference()).unwrap();
        let w = FieldWindow { r_min: 0.0, r_max: 90.0, nr: 10, z_min: 0.0, z_max: 100.0, nz: 3 };
        let s = field_map(&m, &EmitterMoments::reference(), &w).unwrap();
        assert_eq!(s.len(), 30);
        assert_eq!(s[9].r, 90.0);
        assert_eq!(s[29].z, 100.0);
        let bad = FieldWindow { nr: 0, ..w };
        assert!(field_map(&m, &EmitterMoments::reference(), &bad).is_err());
    }
}
