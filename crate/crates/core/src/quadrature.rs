//! Globally adaptive 21-point Gauss–Kronrod quadrature for vector-valued
//! complex integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Accuracy request for [`integrate`].
#[derive(Debug, Clone)]
pub struct Tolerance {
    /// Relative tolerance per component.
    pub rel: f64,
    /// Per-component magnitude floor below which `rel` is applied to the floor instead.
    pub scale: Vec<f64>,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn rel(rel: f64, dim: usize) -> Self {
        Self { rel, scale: vec![0.0; dim], max_intervals: 4000 }
    }

    pub fn with_scale(mut self, scale: Vec<f64>) -> Self {
        self.scale = scale;
        self
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Vec<Complex64>,
    pub error: Vec<f64>,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: Vec<f64>,
}

fn gk21<F>(f: &mut F, a: f64, b: f64, dim: usize) -> Segment
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![Complex64::default(); dim];
    let mut gauss = vec![Complex64::default(); dim];
    let fc = f(center);
    for d in 0..dim {
        kron[d] = fc[d] * WGK[10];
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for d in 0..dim {
            let s = f1[d] + f2[d];
            kron[d] += s * WGK[j];
            if j % 2 == 1 {
                gauss[d] += s * WG[j / 2];
            }
        }
    }
    let mut error = vec![0.0; dim];
    for d in 0..dim {
        kron[d] *= half;
        gauss[d] *= half;
        error[d] = (kron[d] - gauss[d]).norm();
    }
    Segment { a, b, value: kron, error }
}

/// Integrate `f` over consecutive pieces `[p0, p1], [p1, p2], ...`.
///
/// On failure the error carries the worst achieved relative accuracy.
pub fn integrate<F>(mut f: F, points: &[f64], dim: usize, tol: &Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Vec<Complex64>,
{
    if points.len() < 2 {
        return Err(Error::InvalidArgument("integration needs at least two points".into()));
    }
    let mut segs: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| gk21(&mut f, w[0], w[1], dim))
        .collect();
    let mut evals = 21 * segs.len();

    let totals = |segs: &[Segment]| {
        let mut v = vec![Complex64::default(); dim];
        let mut e = vec![0.0; dim];
        for s in segs {
            for d in 0..dim {
                v[d] += s.value[d];
                e[d] += s.error[d];
            }
        }
        (v, e)
    };
    let target = |v: &[Complex64]| -> Vec<f64> {
        (0..dim)
            .map(|d| tol.rel * v[d].norm().max(tol.scale.get(d).copied().unwrap_or(0.0)).max(1e-300))
            .collect()
    };

    loop {
        let (v, e) = totals(&segs);
        if v.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) || e.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonConvergence { what: "adaptive quadrature (non-finite integrand)".into(), achieved: f64::INFINITY });
        }
        let t = target(&v);
        if (0..dim).all(|d| e[d] <= t[d]) {
            return Ok(QuadResult { value: v, error: e, evaluations: evals });
        }
        if segs.len() >= tol.max_intervals {
            let achieved = (0..dim)
                .map(|d| e[d] / (t[d] / tol.rel))
                .fold(0.0_f64, f64::max);
            return Err(Error::NonConvergence { what: "adaptive quadrature".into(), achieved });
        }
        // Split the segment with the largest normalized error.
        let mut worst = 0;
        let mut worst_val = -1.0;
        for (i, s) in segs.iter().enumerate() {
            let w: f64 = (0..dim).map(|d| s.error[d] / t[d]).fold(0.0, f64::max);
            if w > worst_val {
                worst_val = w;
                worst = i;
            }
        }
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            let achieved = (0..dim)
                .map(|d| e[d] / (t[d] / tol.rel))
                .fold(0.0_f64, f64::max);
            return Err(Error::NonConvergence { what: "adaptive quadrature (interval underflow)".into(), achieved });
        }
        segs.push(gk21(&mut f, s.a, mid, dim));
        segs.push(gk21(&mut f, mid, s.b, dim));
        evals += 42;
    }
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, rel: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let r = integrate(|x| vec![f(x)], &[a, b], 1, &Tolerance::rel(rel, 1))?;
    Ok(r.value[0])
}
