//! Run configuration: preset defaults, a flat `key = value` file, then
//! command-line overrides.

use crate::CliError;
use mesoqed::model::{EmitterMoments, Material, Orientation, Preset};
use mesoqed::nanowire::WireOrientation;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Relative tolerances accepted for quadrature overrides.
pub const TOL_RANGE: (f64, f64) = (1e-13, 1e-4);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self, CliError> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(CliError::Config("range bounds must be finite".into()));
        }
        if !(min < max) {
            return Err(CliError::Config(format!("empty range: min {min} >= max {max}")));
        }
        if !(step > 0.0) {
            return Err(CliError::Config(format!("range step must be positive, got {step}")));
        }
        if (max - min) / step > 1e6 {
            return Err(CliError::Config("range has more than 10^6 points".into()));
        }
        Ok(Self { min, max, step })
    }

    /// Grid points min, min + step, ... up to max inclusive.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min + i as f64 * self.step).collect()
    }
}

impl FromStr for SweepRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("range must be MIN:MAX:STEP, got '{s}'")));
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad number '{p}' in range"))))
            .collect::<Result<_, _>>()?;
        Self::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for SweepRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

pub fn parse_orientation(s: &str) -> Result<WireOrientation, CliError> {
    match s.trim() {
        "axial" => Ok(WireOrientation::Axial),
        "radial" => Ok(WireOrientation::Radial),
        other => Err(CliError::Config(format!("orientation must be axial or radial, got '{other}'"))),
    }
}

pub fn orientation_name(o: WireOrientation) -> &'static str {
    match o {
        WireOrientation::Axial => "axial",
        WireOrientation::Radial => "radial",
    }
}

/// Fully resolved inputs of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub lambda0: f64,
    pub n_host: Complex64,
    pub n_metal: Complex64,
    pub ratio: f64,
    pub l_qd: f64,
    pub radius: f64,
    pub range: Option<SweepRange>,
    pub orientation: WireOrientation,
    pub tol: f64,
    pub max_intervals: usize,
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        match name {
            "paper" => {
                let p = Preset::reference();
                Ok(Self {
                    preset: name.into(),
                    lambda0: p.lambda0,
                    n_host: p.host.n(),
                    n_metal: p.metal.n(),
                    ratio: p.moments.lambda_over_mu,
                    l_qd: p.moments.l_qd,
                    radius: p.wire_radius,
                    range: None,
                    orientation: WireOrientation::Axial,
                    tol: 1e-10,
                    max_intervals: 4000,
                })
            }
            other => Err(CliError::Config(format!("unknown preset '{other}'"))),
        }
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let num = |v: &str| {
            v.trim().parse::<f64>().map_err(|_| CliError::Config(format!("'{key}': bad number '{v}'")))
        };
        let cplx = |v: &str| {
            Complex64::from_str(v.trim()).map_err(|_| CliError::Config(format!("'{key}': bad complex '{v}'")))
        };
        match key.trim() {
            "preset" => {
                let keep = (self.range, self.orientation);
                *self = Self::preset(value.trim())?;
                (self.range, self.orientation) = keep;
            }
            "lambda0" => self.lambda0 = num(value)?,
            "n_host" => self.n_host = cplx(value)?,
            "n_metal" => self.n_metal = cplx(value)?,
            "ratio" => self.ratio = num(value)?,
            "l_qd" => self.l_qd = num(value)?,
            "radius" => self.radius = num(value)?,
            "range" => self.range = Some(value.parse()?),
            "orientation" => self.orientation = parse_orientation(value)?,
            "tol" => self.tol = num(value)?,
            "max_intervals" => {
                self.max_intervals = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("'{key}': bad integer '{value}'")))?
            }
            other => return Err(CliError::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Read a flat config file: one `key = value` per line, `#` comments.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("lambda0", self.lambda0)?;
        positive("radius", self.radius)?;
        if !(self.l_qd >= 0.0 && self.l_qd.is_finite()) || !self.ratio.is_finite() {
            return Err(CliError::Config("ratio and l_qd must be finite, l_qd >= 0".into()));
        }
        if !(self.tol >= TOL_RANGE.0 && self.tol <= TOL_RANGE.1) {
            return Err(CliError::Config(format!(
                "tol {} outside [{:e}, {:e}]",
                self.tol, TOL_RANGE.0, TOL_RANGE.1
            )));
        }
        if !(100..=1_000_000).contains(&self.max_intervals) {
            return Err(CliError::Config("max_intervals must be in 100..=1000000".into()));
        }
        self.host()?;
        self.metal()?;
        Ok(())
    }

    pub fn host(&self) -> Result<Material, CliError> {
        Ok(Material::new("host", self.n_host)?)
    }

    pub fn metal(&self) -> Result<Material, CliError> {
        Ok(Material::new("metal", self.n_metal)?)
    }

    pub fn moments(&self) -> Result<EmitterMoments, CliError> {
        Ok(EmitterMoments::new(self.ratio, self.l_qd, Orientation::Direct)?)
    }

    pub fn range_or(&self, default: SweepRange) -> SweepRange {
        self.range.unwrap_or(default)
    }

    /// Resolved settings in a fixed order, for output headers.
    pub fn entries(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("preset", self.preset.clone());
        m.insert("lambda0", format!("{:?}", self.lambda0));
        m.insert("n_host", self.n_host.to_string());
        m.insert("n_metal", self.n_metal.to_string());
        m.insert("ratio", format!("{:?}", self.ratio));
        m.insert("l_qd", format!("{:?}", self.l_qd));
        m.insert("radius", format!("{:?}", self.radius));
        m.insert("range", self.range.map(|r| r.to_string()).unwrap_or_else(|| "default".into()));
        m.insert("orientation", orientation_name(self.orientation).into());
        m.insert("tol", format!("{:?}", self.tol));
        m.insert("max_intervals", self.max_intervals.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: SweepRange = "10:20:5".parse().unwrap();
        assert_eq!(r.points(), vec![10.0, 15.0, 20.0]);
        let r: SweepRange = "0:1:0.1".parse().unwrap();
        assert_eq!(r.points().len(), 11);
        assert!("5:5:1".parse::<SweepRange>().is_err());
        assert!("1:5:0".parse::<SweepRange>().is_err());
        assert!("1:5".parse::<SweepRange>().is_err());
        assert!("a:5:1".parse::<SweepRange>().is_err());
    }

    #[test]
    fn file_overrides() {
        let mut c = RunConfig::preset("paper").unwrap();
        c.apply_text("# comment\nlambda0 = 900\nn_metal = 0.1+6i # inline\norientation = radial\n").unwrap();
        assert_eq!(c.lambda0, 900.0);
        assert_eq!(c.n_metal, Complex64::new(0.1, 6.0));
        assert_eq!(c.orientation, WireOrientation::Radial);
        assert!(c.apply_text("bogus = 1").is_err());
        assert!(c.apply_text("no equals sign").is_err());
        c.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::preset("paper").unwrap();
        c.tol = 1.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::preset("paper").unwrap();
        c.n_metal = Complex64::new(0.2, -7.0);
        assert!(c.validate().is_err());
        assert!(RunConfig::preset("other").is_err());
    }
}
