//! Units, materials, emitter moments and figures of merit.
//!
//! Lengths are in nm and wavevectors in rad/nm. Every rate exposed by the
//! crate is divided by the electric-dipole rate in the homogeneous host, so
//! the prefactor 2e²/(ε0 ħ m0² c0²) and |μ|² cancel and never need values.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Speed of light in nm/fs.
pub const C0: f64 = 299.792_458;

/// Fixed unit conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c0: f64,
    pub length_unit: &'static str,
    pub time_unit: &'static str,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { c0: C0, length_unit: "nm", time_unit: "fs" }
    }
}

/// Single-frequency optical material.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    n: Complex64,
    eps: Complex64,
}

impl Material {
    pub fn new(name: impl Into<String>, n: Complex64) -> Result<Self> {
        if !(n.re.is_finite() && n.im.is_finite()) {
            return Err(Error::InvalidArgument("refractive index must be finite".into()));
        }
        if n.im < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "active medium: Im n = {} < 0",
                n.im
            )));
        }
        Ok(Self { name: name.into(), n, eps: n * n })
    }

    /// Build from a permittivity; the root with Im n >= 0 is taken.
    pub fn from_eps(name: impl Into<String>, eps: Complex64) -> Result<Self> {
        let mut n = eps.sqrt();
        if n.im < 0.0 {
            n = -n;
        }
        let mut m = Self::new(name, n)?;
        m.eps = eps;
        Ok(m)
    }

    pub fn n(&self) -> Complex64 {
        self.n
    }

    pub fn eps(&self) -> Complex64 {
        self.eps
    }

    pub fn gaas() -> Self {
        Self::new("GaAs", Complex64::new(3.42, 0.0)).expect("valid")
    }

    pub fn silver() -> Self {
        Self::new("Ag", Complex64::new(0.2, 7.0)).expect("valid")
    }

    /// Same material with the absorptive part of ε removed.
    pub fn lossless(&self) -> Self {
        Self::from_eps(format!("{} (lossless)", self.name), Complex64::new(self.eps.re, 0.0))
            .expect("real permittivity is passive")
    }
}

/// Orientation of the quantum dot relative to the nanostructure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Direct,
    Inverted,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Direct => 1.0,
            Orientation::Inverted => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Direct => Orientation::Inverted,
            Orientation::Inverted => Orientation::Direct,
        }
    }
}

/// Mesoscopic moment ratio of the emitter. Only μ_x and Λ_xz are nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterMoments {
    /// Λ/μ in nm for the direct orientation.
    pub lambda_over_mu: f64,
    /// In-plane dot size in nm.
    pub l_qd: f64,
    pub orientation: Orientation,
}

impl EmitterMoments {
    pub fn new(lambda_over_mu: f64, l_qd: f64, orientation: Orientation) -> Result<Self> {
        if !lambda_over_mu.is_finite() {
            return Err(Error::InvalidArgument("Λ/μ must be finite".into()));
        }
        if !(l_qd.is_finite() && l_qd >= 0.0) {
            return Err(Error::InvalidArgument("L_QD must be finite and non-negative".into()));
        }
        Ok(Self { lambda_over_mu, l_qd, orientation })
    }

    pub fn reference() -> Self {
        Self { lambda_over_mu: 10.0, l_qd: 20.0, orientation: Orientation::Direct }
    }

    /// Signed Λ/μ entering the rates, including the orientation sign.
    pub fn ratio(&self) -> f64 {
        self.orientation.sign() * self.lambda_over_mu
    }

    pub fn flipped(&self) -> Self {
        Self { orientation: self.orientation.flipped(), ..*self }
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Self { orientation, ..*self }
    }
}

/// Dimensionless strength of the first- and second-order corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiguresOfMerit {
    pub g1: f64,
    pub g2: f64,
    pub k_used: f64,
}

/// k = 2πn/λ0.
pub fn wavevector(material: &Material, lambda0: f64) -> Result<Complex64> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavelength must be positive, got {lambda0}")));
    }
    Ok(material.n() * (2.0 * PI / lambda0))
}

/// Vacuum wavevector k0 = 2π/λ0.
pub fn vacuum_wavevector(lambda0: f64) -> Result<f64> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavelength must be positive, got {lambda0}")));
    }
    Ok(2.0 * PI / lambda0)
}

pub fn figures_of_merit(k: f64, moments: &EmitterMoments) -> Result<FiguresOfMerit> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavevector must be positive, got {k}")));
    }
    let x = k * moments.lambda_over_mu.abs();
    Ok(FiguresOfMerit { g1: 2.0 * x, g2: x * x, k_used: k })
}

/// Homogeneous-medium Im G_xx at coincidence, k/(6π), used to normalize rates.
pub fn homogeneous_im_gxx(k: f64) -> f64 {
    k / (6.0 * PI)
}

/// Parameters of the reference configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub lambda0: f64,
    pub host: Material,
    pub metal: Material,
    pub moments: EmitterMoments,
    pub wire_radius: f64,
}

impl Preset {
    pub fn reference() -> Self {
        Self {
            lambda0: 1000.0,
            host: Material::gaas(),
            metal: Material::silver(),
            moments: EmitterMoments::reference(),
            wire_radius: 30.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavevector_values() {
        let vac = Material::new("vac", Complex64::new(1.0, 0.0)).unwrap();
        assert!((wavevector(&vac, 1000.0).unwrap().re - 0.006_283_185_307).abs() < 1e-12);
        let k = wavevector(&Material::gaas(), 1000.0).unwrap();
        assert!((k.re - 2.0 * PI * 3.42 / 1000.0).abs() < 1e-15);
        let k = wavevector(&Material::silver(), 1000.0).unwrap();
        assert!((k.re - 0.001_256_637).abs() < 1e-9);
        assert!((k.im - 0.043_982_297).abs() < 1e-9);
        assert!(wavevector(&vac, 0.0).is_err());
        assert!(wavevector(&vac, -5.0).is_err());
    }

    #[test]
    fn wavevector_scales_inversely() {
        let m = Material::silver();
        let a = wavevector(&m, 700.0).unwrap();
        let b = wavevector(&m, 1400.0).unwrap();
        assert!((a / 2.0 - b).norm() < 1e-15);
    }

    #[test]
    fn material_invariants() {
        let ag = Material::silver();
        assert_eq!(ag.eps(), ag.n() * ag.n());
        assert!((ag.eps() - Complex64::new(-48.96, 2.8)).norm() < 1e-12);
        assert!(Material::new("gain", Complex64::new(1.0, -0.1)).is_err());
        let l = ag.lossless();
        assert_eq!(l.eps().im, 0.0);
        assert!(l.n().im > 0.0);
    }

    #[test]
    fn figures_of_merit_interface() {
        let k = 2.0 * PI * 3.42 / 1000.0;
        let f = figures_of_merit(k, &EmitterMoments::reference()).unwrap();
        assert!(f.g1 >= 0.42 && f.g1 <= 0.44, "g1 = {}", f.g1);
        assert!((f.g2 - 0.046).abs() < 0.001);
        let f = figures_of_merit(0.038, &EmitterMoments::reference()).unwrap();
        assert!((f.g1 - 0.76).abs() < 1e-12);
        assert!((f.g2 - 0.1444).abs() < 1e-12);
        let zero = EmitterMoments::new(0.0, 20.0, Orientation::Direct).unwrap();
        let f = figures_of_merit(0.02, &zero).unwrap();
        assert_eq!((f.g1, f.g2), (0.0, 0.0));
        assert!(figures_of_merit(0.0, &zero).is_err());
    }

    #[test]
    fn inversion_only_flips_sign() {
        let m = EmitterMoments::reference();
        let f = m.flipped();
        assert_eq!(f.ratio(), -m.ratio());
        assert_eq!(f.l_qd, m.l_qd);
        assert_eq!(f.flipped(), m);
    }
}
