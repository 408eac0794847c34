//! Reflected Green's tensor of a two-medium planar interface and its
//! derivatives at the source point, from one-dimensional k_par integrals.
//!
//! The emitter sits at height h in the upper medium. All integrands are
//! written in the dk_par measure with E = exp(2i k_z1 h):
//!
//! * G_xx:         (i/8π) (k/k_z) (r_s - r_p k_z²/k1²) E
//! * ∂x G_zx:      -(1/(8π k1²)) k³ r_p E
//! * ∂z G_xx:      -(1/8π) k (r_s - r_p k_z²/k1²) E
//! * ∂x∂x' G_zz:   (i/(8π k1²)) k⁵ r_p / k_z E
//!
//! The total is integrated along an ellipse below the real axis that passes
//! beneath the plasmon pole, followed by a real tail. The channel split uses
//! the real axis: k_par < k1 is radiative, the rest is evanescent, and the
//! plasmon part is iπ times the pole residue.

use crate::error::{Error, Result};
use crate::model::{homogeneous_im_gxx, vacuum_wavevector, Material};
use crate::quadrature::{integrate, Tolerance};
use crate::specfun::bessel_j01;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Tail cutoff: integrate until 2 h Im k_z reaches this value.
const TAIL_EXPONENT: f64 = 90.0;
/// Heights below this are accepted with a warning.
pub const MIN_RECOMMENDED_HEIGHT: f64 = 10.0;
pub const DEFAULT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceGeometry {
    pub upper: Material,
    pub lower: Material,
    /// Emitter height above the interface [nm].
    pub h: f64,
    pub lambda0: f64,
}

impl InterfaceGeometry {
    pub fn new(upper: Material, lower: Material, h: f64, lambda0: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("height must be positive, got {h}")));
        }
        vacuum_wavevector(lambda0)?;
        if upper.n().im != 0.0 {
            return Err(Error::InvalidArgument("the emitter host must be lossless".into()));
        }
        if upper.n().re <= 0.0 {
            return Err(Error::InvalidArgument("the emitter host needs Re n > 0".into()));
        }
        Ok(Self { upper, lower, h, lambda0 })
    }

    pub fn reference(h: f64) -> Result<Self> {
        Self::new(Material::gaas(), Material::silver(), h, 1000.0)
    }

    pub fn with_height(&self, h: f64) -> Result<Self> {
        Self::new(self.upper.clone(), self.lower.clone(), h, self.lambda0)
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.lambda0
    }

    /// Real wavevector in the upper medium.
    pub fn k1(&self) -> f64 {
        self.upper.n().re * self.k0()
    }

    pub fn eps1(&self) -> Complex64 {
        self.upper.eps()
    }

    pub fn eps2(&self) -> Complex64 {
        self.lower.eps()
    }

    /// Normalization Im G_xx of the homogeneous upper medium.
    pub fn norm(&self) -> f64 {
        homogeneous_im_gxx(self.k1())
    }
}

/// Imaginary parts of the field factors at the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GreenBundle {
    /// Im G_xx(r0, r0), homogeneous part included [1/nm].
    pub g_xx: f64,
    /// ∂_x Im G_zx(r, r0) at r = r0 [1/nm²].
    pub d_g_zx: f64,
    /// ∂_x ∂_x' Im G_zz(r, r') at r = r' = r0 [1/nm³].
    pub dd_g_zz: f64,
    /// ω Re ℬ_yx, stored as Im[∂_x G_zx - ∂_z G_xx] [1/nm²].
    pub b_yx: f64,
    /// Im 𝒬_xz = Im[∂_x G_zx + ∂_z G_xx] [1/nm²].
    pub q_xz: f64,
}

impl GreenBundle {
    /// Bundle of the homogeneous medium with wavevector k.
    pub fn homogeneous(k: f64) -> Self {
        Self { g_xx: homogeneous_im_gxx(k), ..Default::default() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            g_xx: self.g_xx * s,
            d_g_zx: self.d_g_zx * s,
            dd_g_zz: self.dd_g_zz * s,
            b_yx: self.b_yx * s,
            q_xz: self.q_xz * s,
        }
    }
}

/// Complex tensor entries before taking imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexBundle {
    pub g_xx: Complex64,
    pub dx_g_zx: Complex64,
    pub dz_g_xx: Complex64,
    pub dd_g_zz: Complex64,
}

impl ComplexBundle {
    fn from_vec(v: &[Complex64]) -> Self {
        Self { g_xx: v[0], dx_g_zx: v[1], dz_g_xx: v[2], dd_g_zz: v[3] }
    }

    /// ∂_x G_zx - ∂_z G_xx.
    pub fn ed_md(&self) -> Complex64 {
        self.dx_g_zx - self.dz_g_xx
    }

    /// ∂_x G_zx + ∂_z G_xx.
    pub fn ed_eq(&self) -> Complex64 {
        self.dx_g_zx + self.dz_g_xx
    }

    pub fn to_bundle(&self) -> GreenBundle {
        GreenBundle {
            g_xx: self.g_xx.im,
            d_g_zx: self.dx_g_zx.im,
            dd_g_zz: self.dd_g_zz.im,
            b_yx: self.ed_md().im,
            q_xz: self.ed_eq().im,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            g_xx: self.g_xx + o.g_xx,
            dx_g_zx: self.dx_g_zx + o.dx_g_zx,
            dz_g_xx: self.dz_g_xx + o.dz_g_xx,
            dd_g_zz: self.dd_g_zz + o.dd_g_zz,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    fn scale(&self, s: Complex64) -> Self {
        Self { g_xx: self.g_xx * s, dx_g_zx: self.dx_g_zx * s, dz_g_xx: self.dz_g_xx * s, dd_g_zz: self.dd_g_zz * s }
    }
}

/// Three-way split of each expansion order into radiative, plasmon and lossy parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDecomposition {
    /// `rad[n]`, `pl[n]`, `ls[n]` are the order-n contributions to the normalized rate.
    pub rad: [f64; 3],
    pub pl: [f64; 3],
    pub ls: [f64; 3],
    /// Order totals from the independent contour integration.
    pub total: [f64; 3],
}

impl ChannelDecomposition {
    pub fn order_sum(&self, n: usize) -> f64 {
        self.rad[n] + self.pl[n] + self.ls[n]
    }
}

/// Scattered tensors split by integration region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTensors {
    /// k_par in [0, k1], homogeneous part included.
    pub rad: ComplexBundle,
    /// k_par in [k1, ∞).
    pub evanescent: ComplexBundle,
    /// iπ times the plasmon pole residue.
    pub pl: ComplexBundle,
    /// Contour result, homogeneous part included.
    pub total: ComplexBundle,
}

impl ChannelTensors {
    pub fn ls(&self) -> ComplexBundle {
        self.evanescent.sub(&self.pl)
    }
}

/// Principal k_z with Im k_z >= 0.
fn kz(eps: Complex64, k0: f64, kr: Complex64) -> Complex64 {
    let mut z = (eps * k0 * k0 - kr * kr).sqrt();
    if z.im < 0.0 || (z.im == 0.0 && z.re < 0.0) {
        z = -z;
    }
    z
}

fn fresnel_c(eps1: Complex64, eps2: Complex64, kz1: Complex64, kz2: Complex64) -> (Complex64, Complex64) {
    let rs = (kz1 - kz2) / (kz1 + kz2);
    let rp = (eps2 * kz1 - eps1 * kz2) / (eps2 * kz1 + eps1 * kz2);
    (rs, rp)
}

/// Fresnel coefficients (r_s, r_p) at real in-plane wavevector.
///
/// Convention: a perfect conductor gives r_s = -1, r_p = +1, so that at normal
/// incidence r_p = (n2 - n1)/(n2 + n1) = -r_s.
pub fn fresnel(k_par: f64, geom: &InterfaceGeometry) -> Result<(Complex64, Complex64)> {
    if !(k_par >= 0.0 && k_par.is_finite()) {
        return Err(Error::InvalidArgument(format!("k_par must be non-negative, got {k_par}")));
    }
    let kr = Complex64::new(k_par, 0.0);
    let k0 = geom.k0();
    let kz1 = kz(geom.eps1(), k0, kr);
    let kz2 = kz(geom.eps2(), k0, kr);
    Ok(fresnel_c(geom.eps1(), geom.eps2(), kz1, kz2))
}

/// Plasmon propagation constant of the planar interface.
pub fn spp_pole(geom: &InterfaceGeometry) -> Result<Complex64> {
    let (e1, e2) = (geom.eps1(), geom.eps2());
    let sum = e1 + e2;
    if sum.re >= 0.0 {
        return Err(Error::NoBoundMode(format!("Re(ε1 + ε2) = {} >= 0", sum.re)));
    }
    if sum.norm() < 1e-6 * e1.norm() {
        return Err(Error::NoBoundMode("ε2 ≈ -ε1: surface plasmon resonance".into()));
    }
    let mut k = (e1 * e2 / sum).sqrt() * geom.k0();
    if k.re < 0.0 {
        k = -k;
    }
    if k.im < 0.0 {
        return Err(Error::NoBoundMode(format!("pole {k} has Im < 0")));
    }
    Ok(k)
}

/// Integrand vector [G_xx, ∂xG_zx, ∂zG_xx, ∂x∂x'G_zz] at (k, k_z1) for given r_s, r_p.
fn integrand(kr: Complex64, kz1: Complex64, k1: f64, h: f64, rs: Complex64, rp: Complex64) -> [Complex64; 4] {
    let e = (2.0 * I * kz1 * h).exp();
    let k1s = k1 * k1;
    let mix = rs - rp * kz1 * kz1 / k1s;
    let kr2 = kr * kr;
    [
        I / (8.0 * PI) * kr / kz1 * mix * e,
        -kr2 * kr * rp * e / (8.0 * PI * k1s),
        -kr * mix * e / (8.0 * PI),
        I * kr2 * kr2 * kr * rp / kz1 * e / (8.0 * PI * k1s),
    ]
}

/// Accuracy options for the Sommerfeld integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: DEFAULT_REL_TOL, max_intervals: 4000 }
    }
}

struct Setup {
    k0: f64,
    k1: f64,
    eps1: Complex64,
    eps2: Complex64,
    h: f64,
    pole: Option<Complex64>,
    k_max: f64,
    tol: Tolerance,
}

fn setup(geom: &InterfaceGeometry, opts: &QuadOptions, dim_powers: &[i32]) -> Setup {
    if geom.h < MIN_RECOMMENDED_HEIGHT {
        log::warn!("height {} nm below {} nm: lossy near field dominates and quadrature is slow", geom.h, MIN_RECOMMENDED_HEIGHT);
    }
    let k1 = geom.k1();
    let norm = geom.norm();
    let pole = spp_pole(geom).ok();
    let k_max = (k1 * k1 + (0.5 * TAIL_EXPONENT / geom.h).powi(2)).sqrt();
    // Floors keep components that pass through zero from stalling the refinement.
    let scale = dim_powers.iter().map(|&p| 1e-3 * norm * k1.powi(p)).collect();
    let tol = Tolerance { rel: opts.rel_tol, scale, max_intervals: opts.max_intervals };
    Setup { k0: geom.k0(), k1, eps1: geom.eps1(), eps2: geom.eps2(), h: geom.h, pole, k_max, tol }
}

const POWERS: [i32; 4] = [0, 1, 1, 2];

impl Setup {
    fn eval(&self, kr: Complex64, kz1: Complex64) -> [Complex64; 4] {
        let kz2 = kz(self.eps2, self.k0, kr);
        let (rs, rp) = fresnel_c(self.eps1, self.eps2, kz1, kz2);
        integrand(kr, kz1, self.k1, self.h, rs, rp)
    }

    /// Real branch point of k_z2 inside (lo, hi), if the lower medium is transparent.
    fn lower_branch_point(&self) -> Option<f64> {
        let e2 = self.eps2;
        (e2.im == 0.0 && e2.re > 0.0).then(|| e2.re.sqrt() * self.k0)
    }

    fn radiative(&self) -> Result<ComplexBundle> {
        let k1 = self.k1;
        let mut pts = vec![0.0, 0.5 * PI];
        if let Some(kb) = self.lower_branch_point() {
            if kb < k1 {
                pts.insert(1, (kb / k1).asin());
            }
        }
        let r = integrate(
            |t| {
                let kr = Complex64::new(k1 * t.sin(), 0.0);
                let kz1 = Complex64::new(k1 * t.cos(), 0.0);
                let jac = k1 * t.cos();
                self.eval(kr, kz1).iter().map(|v| v * jac).collect()
            },
            &pts,
            4,
            &self.tol,
        )?;
        Ok(ComplexBundle::from_vec(&r.value))
    }

    /// ∫ over k_par in [k_lo, k_max] via k_par = k1 cosh t, with break points.
    fn cosh_segment(&self, k_lo: f64, breaks: &[f64]) -> Result<ComplexBundle> {
        let k1 = self.k1;
        if self.k_max <= k_lo {
            return Ok(ComplexBundle::default());
        }
        let t_lo = (k_lo / k1).max(1.0).acosh();
        let t_hi = (self.k_max / k1).acosh();
        let mut pts = vec![t_lo];
        let mut inner: Vec<f64> = breaks
            .iter()
            .filter(|&&b| b > k_lo && b < self.k_max)
            .map(|&b| (b / k1).acosh())
            .collect();
        inner.sort_by(f64::total_cmp);
        pts.extend(inner);
        pts.push(t_hi);
        let r = integrate(
            |t| {
                let kr = Complex64::new(k1 * t.cosh(), 0.0);
                let kz1 = Complex64::new(0.0, k1 * t.sinh());
                let jac = k1 * t.sinh();
                self.eval(kr, kz1).iter().map(|v| v * jac).collect()
            },
            &pts,
            4,
            &self.tol,
        )?;
        Ok(ComplexBundle::from_vec(&r.value))
    }

    fn evanescent(&self) -> Result<ComplexBundle> {
        let mut breaks = vec![];
        if let Some(p) = self.pole {
            breaks.push(p.re);
        }
        if let Some(kb) = self.lower_branch_point() {
            breaks.push(kb);
        }
        self.cosh_segment(self.k1, &breaks)
    }

    fn ellipse_end(&self) -> f64 {
        let mut m = self.k1;
        if let Some(p) = self.pole {
            m = m.max(p.re);
        }
        if let Some(kb) = self.lower_branch_point() {
            if kb < 20.0 * self.k1 {
                m = m.max(kb);
            }
        }
        1.3 * m
    }

    fn contour(&self) -> Result<ComplexBundle> {
        let ke = self.ellipse_end();
        let a = 0.5 * ke;
        let b = 0.25 * a.min(self.k1);
        let r = integrate(
            |th| {
                let kr = Complex64::new(a * (1.0 - th.cos()), -b * th.sin());
                let jac = Complex64::new(a * th.sin(), -b * th.cos());
                let kz1 = kz(self.eps1, self.k0, kr);
                self.eval(kr, kz1).iter().map(|v| v * jac).collect()
            },
            &[0.0, 0.5 * PI, PI],
            4,
            &self.tol,
        )?;
        let ell = ComplexBundle::from_vec(&r.value);
        let tail = self.cosh_segment(ke, &[])?;
        Ok(ell.add(&tail))
    }

    fn pole_part(&self) -> ComplexBundle {
        let Some(kp) = self.pole else { return ComplexBundle::default() };
        // Bound-mode sheet: both k_z evanescent.
        let kz1 = I * (kp * kp - self.eps1 * self.k0 * self.k0).sqrt();
        let kz2 = I * (kp * kp - self.eps2 * self.k0 * self.k0).sqrt();
        let num = self.eps2 * kz1 - self.eps1 * kz2;
        let dden = -kp * (self.eps2 / kz1 + self.eps1 / kz2);
        let res_rp = num / dden;
        let v = integrand(kp, kz1, self.k1, self.h, Complex64::default(), res_rp);
        ComplexBundle::from_vec(&v).scale(I * PI)
    }
}

fn homogeneous_part(k1: f64) -> ComplexBundle {
    ComplexBundle { g_xx: Complex64::new(0.0, homogeneous_im_gxx(k1)), ..Default::default() }
}

/// Complex scattered tensors plus the homogeneous Im G_xx.
pub fn green_tensors(geom: &InterfaceGeometry, opts: &QuadOptions) -> Result<ComplexBundle> {
    let s = setup(geom, opts, &POWERS);
    Ok(s.contour()?.add(&homogeneous_part(s.k1)))
}

pub fn green_bundle(geom: &InterfaceGeometry) -> Result<GreenBundle> {
    green_bundle_with(geom, &QuadOptions::default())
}

pub fn green_bundle_with(geom: &InterfaceGeometry, opts: &QuadOptions) -> Result<GreenBundle> {
    Ok(green_tensors(geom, opts)?.to_bundle())
}

/// Region-resolved tensors used for the channel decomposition.
pub fn channel_tensors(geom: &InterfaceGeometry, opts: &QuadOptions) -> Result<ChannelTensors> {
    let s = setup(geom, opts, &POWERS);
    let hom = homogeneous_part(s.k1);
    Ok(ChannelTensors {
        rad: s.radiative()?.add(&hom),
        evanescent: s.evanescent()?,
        pl: s.pole_part(),
        total: s.contour()?.add(&hom),
    })
}

fn orders(b: &GreenBundle, ratio: f64, norm: f64) -> [f64; 3] {
    [b.g_xx / norm, 2.0 * ratio * b.d_g_zx / norm, ratio * ratio * b.dd_g_zz / norm]
}

pub fn decompose_channels(geom: &InterfaceGeometry, moments: &crate::model::EmitterMoments) -> Result<ChannelDecomposition> {
    decompose_channels_with(geom, moments, &QuadOptions::default())
}

pub fn decompose_channels_with(
    geom: &InterfaceGeometry,
    moments: &crate::model::EmitterMoments,
    opts: &QuadOptions,
) -> Result<ChannelDecomposition> {
    let t = channel_tensors(geom, opts)?;
    let norm = geom.norm();
    let r = moments.ratio();
    Ok(ChannelDecomposition {
        rad: orders(&t.rad.to_bundle(), r, norm),
        pl: orders(&t.pl.to_bundle(), r, norm),
        ls: orders(&t.ls().to_bundle(), r, norm),
        total: orders(&t.total.to_bundle(), r, norm),
    })
}

/// Scattered G_xx and G_zx between the source and a field point displaced
/// laterally by `x` at the same height, for checks of the coincident-point
/// derivatives.
pub fn offset_tensors(geom: &InterfaceGeometry, x: f64, opts: &QuadOptions) -> Result<(Complex64, Complex64)> {
    let s = setup(geom, opts, &[0, 0]);
    let k1 = s.k1;
    let k1s = k1 * k1;
    let f = |kr: Complex64, kz1: Complex64| -> Vec<Complex64> {
        let kz2 = kz(s.eps2, s.k0, kr);
        let (rs, rp) = fresnel_c(s.eps1, s.eps2, kz1, kz2);
        let u = kr * x;
        let (j0, j1) = if u.norm() == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::default())
        } else {
            bessel_j01(u).unwrap_or_default()
        };
        let j2 = if u.norm() == 0.0 { Complex64::default() } else { 2.0 * j1 / u - j0 };
        let e = (2.0 * I * kz1 * s.h).exp();
        let gxx = I / (8.0 * PI) * kr * e * (rs * (j0 + j2) / kz1 - rp * kz1 * (j0 - j2) / k1s);
        let gzx = -kr * kr * rp * j1 * e / (4.0 * PI * k1s);
        vec![gxx, gzx]
    };
    let ke = s.ellipse_end();
    let a = 0.5 * ke;
    let b = 0.25 * a.min(k1);
    let scale = vec![1e-3 * geom.norm(), 1e-3 * geom.norm() * k1 * x.abs().max(1e-3)];
    let tol = Tolerance { rel: opts.rel_tol, scale, max_intervals: opts.max_intervals };
    let ell = integrate(
        |th| {
            let kr = Complex64::new(a * (1.0 - th.cos()), -b * th.sin());
            let jac = Complex64::new(a * th.sin(), -b * th.cos());
            let kz1 = kz(s.eps1, s.k0, kr);
            f(kr, kz1).into_iter().map(|v| v * jac).collect()
        },
        &[0.0, 0.5 * PI, PI],
        2,
        &tol,
    )?;
    let mut out = [ell.value[0], ell.value[1]];
    if s.k_max > ke {
        let tail = integrate(
            |t| {
                let kr = Complex64::new(k1 * t.cosh(), 0.0);
                let kz1 = Complex64::new(0.0, k1 * t.sinh());
                let jac = k1 * t.sinh();
                f(kr, kz1).into_iter().map(|v| v * jac).collect()
            },
            &[(ke / k1).acosh(), (s.k_max / k1).acosh()],
            2,
            &tol,
        )?;
        out[0] += tail.value[0];
        out[1] += tail.value[1];
    }
    Ok((out[0], out[1]))
}
