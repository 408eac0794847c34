//! Complex-argument Bessel functions of integer order.
//!
//! For |z| <= 2 the ascending series are summed directly. Beyond that, K0 and
//! K1 come from Steed's continued fraction (Temme's CF2), higher K_n from
//! forward recurrence, and I_n from the CF1 ratio combined with the Wronskian
//! I_n K_{n+1} + I_{n+1} K_n = 1/z. All of this works on e^{-z} I and e^{z} K
//! for Re z >= 0; the left half-plane is reached by the reflection formulas.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const MAX_ITER: usize = 200_000;
/// Largest |Re z| for which unscaled I and K are returned.
pub const OVERFLOW_BOUND: f64 = 700.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// a/b by Smith's algorithm, safe when |b|² would under- or overflow.
pub fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        c((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.re * r + b.im;
        c((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// e^{-z} I_n(z) and e^{z} K_n(z) for n = 0..=nmax, Re z >= 0, z != 0.
fn ik_scaled_right(nmax: usize, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    debug_assert!(z.re >= 0.0 && z.norm() > 0.0);
    let mut k = vec![Complex64::default(); nmax + 2];
    let (k0, k1) = if z.norm() <= SERIES_RADIUS { k01_series(z) } else { k01_steed(z)? };
    let ez = z.exp();
    if z.norm() <= SERIES_RADIUS {
        k[0] = k0 * ez;
        k[1] = k1 * ez;
    } else {
        k[0] = k0;
        k[1] = k1;
    }
    for n in 1..=nmax {
        k[n + 1] = k[n - 1] + k[n] * (2.0 * n as f64) / z;
    }

    let mut i = vec![Complex64::default(); nmax + 1];
    if z.norm() <= SERIES_RADIUS {
        let emz = (-z).exp();
        for (n, slot) in i.iter_mut().enumerate() {
            *slot = i_series(n, z) * emz;
        }
    } else {
        // r_n = I_{n+1}/I_n, top order by CF1, then downward.
        let mut r = cf1_ratio(nmax, z)?;
        for n in (0..=nmax).rev() {
            i[n] = 1.0 / (z * (k[n + 1] + r * k[n]));
            if n > 0 {
                r = 1.0 / (2.0 * n as f64 / z + r);
            }
        }
    }
    k.truncate(nmax + 1);
    Ok((i, k))
}

fn i_series(n: usize, z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let half = z * 0.5;
    let mut lead = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        lead = lead * half / j as f64;
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for j in 1..500 {
        term = term * q / (j as f64 * (j + n) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

fn k01_series(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z * 0.25;
    let lnz = (z * 0.5).ln();
    let i0 = i_series(0, z);
    let i1 = i_series(1, z);

    // K0: Σ H_k q^k/(k!)²
    let mut t = Complex64::new(1.0, 0.0);
    let mut h = 0.0;
    let mut s0 = Complex64::default();
    // K1: Σ [ψ(k+1)+ψ(k+2)] q^k/(k!(k+1)!)
    let mut t1 = Complex64::new(1.0, 0.0);
    let mut s1 = Complex64::default();
    for j in 0..500 {
        if j > 0 {
            h += 1.0 / j as f64;
            t = t * q / (j as f64 * j as f64);
            t1 = t1 * q / (j as f64 * (j + 1) as f64);
        }
        let psi_sum = 2.0 * (h - EULER_GAMMA) + 1.0 / (j + 1) as f64;
        let a = t * h;
        let b = t1 * psi_sum;
        s0 += a;
        s1 += b;
        if j > 2 && a.norm() <= 1e-17 * s0.norm().max(1e-300) && b.norm() <= 1e-17 * s1.norm() {
            break;
        }
    }
    let k0 = -(lnz + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + lnz * i1 - z * 0.25 * s1;
    (k0, k1)
}

/// Scaled e^{z} K0, e^{z} K1 by Steed's method, |z| > 2, Re z >= 0.
fn k01_steed(z: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let mut b = 2.0 * (one + z);
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::default();
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = c(a1, 0.0);
    let mut cc = c(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        cc = -cc * a / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += cc * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            let k0 = (PI / (2.0 * z)).sqrt() / s;
            let k1 = k0 * (z + 0.5 - a1 * h) / z;
            return Ok((k0, k1));
        }
    }
    Err(Error::NonConvergence { what: format!("K continued fraction at z = {z}"), achieved: f64::NAN })
}

/// I_{n+1}(z)/I_n(z) by modified Lentz.
fn cf1_ratio(n: usize, z: Complex64) -> Result<Complex64> {
    let tiny = 1e-300;
    let b = |j: usize| 2.0 * (n + j) as f64 / z;
    let mut f = b(1);
    if f.norm() < tiny {
        f = c(tiny, 0.0);
    }
    let mut cc = f;
    let mut d = Complex64::default();
    for j in 2..MAX_ITER {
        let bj = b(j);
        d = bj + d;
        if d.norm() < tiny {
            d = c(tiny, 0.0);
        }
        cc = bj + 1.0 / cc;
        if cc.norm() < tiny {
            cc = c(tiny, 0.0);
        }
        d = 1.0 / d;
        let delta = cc * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok(1.0 / f);
        }
    }
    Err(Error::NonConvergence { what: format!("I ratio continued fraction at z = {z}"), achieved: f64::NAN })
}

fn check_finite(func: &'static str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { func, z })
    }
}

/// Scaled functions e^{-z} I_n(z) and e^{z} K_n(z), n = 0..=nmax, on Re z >= 0.
pub fn bessel_ik_scaled_seq(nmax: usize, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_finite("bessel_ik_scaled", z)?;
    if z.re < 0.0 {
        return Err(Error::OutOfRange { func: "bessel_ik_scaled", z });
    }
    if z.norm() == 0.0 {
        return Err(Error::OutOfRange { func: "bessel_ik_scaled", z });
    }
    ik_scaled_right(nmax, z)
}

/// I_n(z) for n = 0..=nmax; entire, so any finite z with |Re z| <= 700.
pub fn bessel_i_seq(nmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check_finite("bessel_i", z)?;
    if z.re.abs() > OVERFLOW_BOUND {
        return Err(Error::OutOfRange { func: "bessel_i", z });
    }
    if z.norm() == 0.0 {
        let mut v = vec![Complex64::default(); nmax + 1];
        v[0] = c(1.0, 0.0);
        return Ok(v);
    }
    let w = if z.re < 0.0 { -z } else { z };
    let (i, _) = ik_scaled_right(nmax, w)?;
    let ew = w.exp();
    Ok(i
        .into_iter()
        .enumerate()
        .map(|(n, v)| {
            let v = v * ew;
            if z.re < 0.0 && n % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect())
}

/// I_n(z) and K_n(z) for n = 0..=nmax on the principal branch.
pub fn bessel_ik_seq(nmax: usize, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_finite("bessel_ik", z)?;
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut { func: "bessel_k", z });
    }
    if z.re.abs() > OVERFLOW_BOUND {
        return Err(Error::OutOfRange { func: "bessel_ik", z });
    }
    if z.re >= 0.0 {
        let (i, k) = ik_scaled_right(nmax, z)?;
        let ez = z.exp();
        let emz = (-z).exp();
        return Ok((i.into_iter().map(|v| v * ez).collect(), k.into_iter().map(|v| v * emz).collect()));
    }
    // K_n(z) = (-1)^n K_n(-z) -/+ iπ I_n(-z) for Im z > 0 / Im z < 0.
    let w = -z;
    let (iw, kw) = ik_scaled_right(nmax, w)?;
    let ew = w.exp();
    let emw = (-w).exp();
    let sign_pi = if z.im > 0.0 { -PI } else { PI };
    let mut i = Vec::with_capacity(nmax + 1);
    let mut k = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let par = if n % 2 == 0 { 1.0 } else { -1.0 };
        let iwn = iw[n] * ew;
        i.push(iwn * par);
        k.push(kw[n] * emw * par + c(0.0, sign_pi) * iwn);
    }
    Ok((i, k))
}

/// I_order(z) and K_order(z).
pub fn bessel_ik(order: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    let (i, k) = bessel_ik_seq(order, z)?;
    Ok((i[order], k[order]))
}

/// J_order(z) = i^order I_order(-iz); supported for |Im z| <= 700.
pub fn bessel_j(order: usize, z: Complex64) -> Result<Complex64> {
    let w = c(z.im, -z.re);
    let i = bessel_i_seq(order, w).map_err(|e| match e {
        Error::OutOfRange { .. } => Error::OutOfRange { func: "bessel_j", z },
        other => other,
    })?;
    let phase = match order % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    Ok(phase * i[order])
}

/// J_0(z) and J_1(z) together.
pub fn bessel_j01(z: Complex64) -> Result<(Complex64, Complex64)> {
    let w = c(z.im, -z.re);
    let i = bessel_i_seq(1, w).map_err(|_| Error::OutOfRange { func: "bessel_j", z })?;
    Ok((i[0], c(0.0, 1.0) * i[1]))
}

/// Hankel function H_order^(1)(z) for order 0 or 1, -π/2 < arg z <= π.
pub fn hankel1(order: usize, z: Complex64) -> Result<Complex64> {
    if order > 1 {
        return Err(Error::InvalidArgument(format!("hankel1 supports orders 0 and 1, got {order}")));
    }
    let w = c(z.im, -z.re);
    let (_, k) = bessel_ik_seq(1, w).map_err(|e| match e {
        Error::BranchCut { .. } => Error::BranchCut { func: "hankel1", z },
        Error::OutOfRange { .. } => Error::OutOfRange { func: "hankel1", z },
        other => other,
    })?;
    Ok(if order == 0 { c(0.0, -2.0 / PI) * k[0] } else { k[1] * (-2.0 / PI) })
}
