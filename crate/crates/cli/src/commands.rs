//! Subcommand implementations. Each returns the full output document so the
//! caller decides where it goes.

use crate::config::{RunConfig, SweepRange};
use crate::{CliError, VERSION};
use mesoqed::halfspace::{channel_tensors, spp_pole, InterfaceGeometry, QuadOptions};
use mesoqed::model::{figures_of_merit, C0};
use mesoqed::moments::{
    allowed_moments, lambda_zx_estimate, lambda_zx_significance, omega_negligibility, GaussianEnvelopes, ParityTable,
};
use mesoqed::nanowire::{self, solve_dispersion, FieldWindow, GuidedMode, WireGeometry};
use mesoqed::quasistatic::{quasistatic_background_with, BackgroundOptions};
use mesoqed::rates::{ladder_terms, rate_ladder};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const DEFAULT_INTERFACE_RANGE: SweepRange = SweepRange { min: 10.0, max: 2000.0, step: 5.0 };
pub const DEFAULT_WIRE_RANGE: SweepRange = SweepRange { min: 20.0, max: 200.0, step: 2.0 };
pub const DEFAULT_R_RANGE: SweepRange = SweepRange { min: 0.0, max: 150.0, step: 2.5 };
pub const DEFAULT_Z_RANGE: SweepRange = SweepRange { min: 0.0, max: 200.0, step: 10.0 };

const CONVENTIONS: &str = "lengths in nm; rates divided by the electric-dipole rate in the homogeneous host; \
gamma columns for the direct orientation (signed ratio > 0)";

fn header(command: &str, cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut s = format!("# mesoqed {VERSION}\n# command = {command}\n");
    for (k, v) in cfg.entries() {
        let _ = writeln!(s, "# {k} = {v}");
    }
    for (k, v) in extra {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let _ = writeln!(s, "# conventions: {CONVENTIONS}");
    s
}

fn csv_line(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.11e}")).collect();
    cells.join(",") + "\n"
}

fn quad_options(cfg: &RunConfig) -> QuadOptions {
    QuadOptions { rel_tol: cfg.tol, max_intervals: cfg.max_intervals }
}

/// Evaluate `f` on every point in parallel and return results in input order.
fn sweep<T: Send>(
    points: &[f64],
    param: &'static str,
    f: impl Fn(f64) -> mesoqed::Result<T> + Sync,
) -> Result<Vec<T>, CliError> {
    points
        .par_iter()
        .map(|&x| f(x).map_err(|source| CliError::AtPoint { param, value: x, source }))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceRow {
    pub h: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub total_direct: f64,
    pub total_inverted: f64,
    pub rad: f64,
    pub pl: f64,
    pub ls: f64,
    /// b_yx and q_xz times L_QD, in units of the homogeneous Im G_xx.
    pub b_yx_norm: f64,
    pub q_xz_norm: f64,
}

impl InterfaceRow {
    fn values(&self) -> [f64; 11] {
        [
            self.h,
            self.gamma0,
            self.gamma1,
            self.gamma2,
            self.total_direct,
            self.total_inverted,
            self.rad,
            self.pl,
            self.ls,
            self.b_yx_norm,
            self.q_xz_norm,
        ]
    }
}

pub fn interface_rows(cfg: &RunConfig) -> Result<Vec<InterfaceRow>, CliError> {
    cfg.validate()?;
    let base = InterfaceGeometry::new(cfg.host()?, cfg.metal()?, 1.0, cfg.lambda0)?;
    let moments = cfg.moments()?;
    let opts = quad_options(cfg);
    let points = cfg.range_or(DEFAULT_INTERFACE_RANGE).points();
    sweep(&points, "h", |h| {
        let geom = base.with_height(h)?;
        let norm = geom.norm();
        let t = channel_tensors(&geom, &opts)?;
        let total = t.total.to_bundle();
        let direct = rate_ladder(&total, &moments, norm)?;
        let inverted = rate_ladder(&total, &moments.flipped(), norm)?;
        let r = moments.ratio();
        let sum = |b| ladder_terms(&b, r, norm).total();
        Ok(InterfaceRow {
            h,
            gamma0: direct.gamma0,
            gamma1: direct.gamma1,
            gamma2: direct.gamma2,
            total_direct: direct.total(),
            total_inverted: inverted.total(),
            rad: sum(t.rad.to_bundle()),
            pl: sum(t.pl.to_bundle()),
            ls: sum(t.ls().to_bundle()),
            b_yx_norm: total.b_yx * moments.l_qd / norm,
            q_xz_norm: total.q_xz * moments.l_qd / norm,
        })
    })
}

pub fn interface_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = interface_rows(cfg)?;
    let mut s = header("interface-sweep", cfg, &[]);
    s.push_str("h,gamma0,gamma1,gamma2,total_direct,total_inverted,rad,pl,ls,b_yx_norm,q_xz_norm\n");
    for r in &rows {
        s.push_str(&csv_line(&r.values()));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireRow {
    pub d: f64,
    pub gamma0_pl: f64,
    pub gamma1_pl: f64,
    pub gamma2_pl: f64,
    pub background: f64,
    pub total_direct: f64,
    pub total_inverted: f64,
}

impl WireRow {
    fn values(&self) -> [f64; 7] {
        [
            self.d,
            self.gamma0_pl,
            self.gamma1_pl,
            self.gamma2_pl,
            self.background,
            self.total_direct,
            self.total_inverted,
        ]
    }
}

pub fn wire_geometry(cfg: &RunConfig) -> Result<WireGeometry, CliError> {
    Ok(WireGeometry::new(cfg.radius, cfg.metal()?, cfg.host()?, cfg.lambda0)?)
}

pub fn wire_rows(cfg: &RunConfig) -> Result<Vec<WireRow>, CliError> {
    cfg.validate()?;
    let geom = wire_geometry(cfg)?;
    let mode = solve_dispersion(&geom)?;
    let moments = cfg.moments()?;
    let bg_opts = BackgroundOptions { rel_tol: cfg.tol, ..Default::default() };
    let o = cfg.orientation;
    let points = cfg.range_or(DEFAULT_WIRE_RANGE).points();
    sweep(&points, "d", |d| {
        let pl = nanowire::plasmon_rates(&mode, d, &moments, o)?;
        let background = quasistatic_background_with(&geom, d, o, &bg_opts)?.total();
        Ok(WireRow {
            d,
            gamma0_pl: pl.gamma0,
            gamma1_pl: pl.gamma1,
            gamma2_pl: pl.gamma2,
            background,
            total_direct: pl.total() + background,
            total_inverted: pl.flipped().total() + background,
        })
    })
}

pub fn nanowire_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = wire_rows(cfg)?;
    let mut s = header("nanowire-sweep", cfg, &[]);
    s.push_str("d,gamma0_pl,gamma1_pl,gamma2_pl,background,total_direct,total_inverted\n");
    for r in &rows {
        s.push_str(&csv_line(&r.values()));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionReport {
    pub version: String,
    pub radius: f64,
    pub k_sp: ComplexValue,
    pub n_eff: ComplexValue,
    pub residual: f64,
    pub beta_lossless: f64,
    pub kappa_in: ComplexValue,
    pub kappa_out: ComplexValue,
    pub propagation_length_nm: f64,
    pub v_g_nm_per_fs: f64,
    pub v_g_over_c0: f64,
    pub config: BTreeMap<&'static str, String>,
}

pub fn dispersion_report(cfg: &RunConfig) -> Result<DispersionReport, CliError> {
    cfg.validate()?;
    let m = solve_dispersion(&wire_geometry(cfg)?)?;
    Ok(DispersionReport {
        version: VERSION.into(),
        radius: cfg.radius,
        k_sp: m.k_sp.into(),
        n_eff: m.n_eff().into(),
        residual: m.residual,
        beta_lossless: m.companion.beta,
        kappa_in: m.kappa_in.into(),
        kappa_out: m.kappa_out.into(),
        propagation_length_nm: 1.0 / (2.0 * m.k_sp.im),
        v_g_nm_per_fs: m.v_g,
        v_g_over_c0: m.v_g / C0,
        config: cfg.entries(),
    })
}

pub fn dispersion(cfg: &RunConfig) -> Result<String, CliError> {
    to_json(&dispersion_report(cfg)?)
}

pub fn field_map(cfg: &RunConfig, r_range: SweepRange, z_range: SweepRange) -> Result<String, CliError> {
    cfg.validate()?;
    if r_range.min < 0.0 {
        return Err(CliError::Config("r range must start at r >= 0".into()));
    }
    let mode: GuidedMode = solve_dispersion(&wire_geometry(cfg)?)?;
    let (rs, zs) = (r_range.points(), z_range.points());
    let window = FieldWindow {
        r_min: rs[0],
        r_max: *rs.last().expect("non-empty"),
        nr: rs.len(),
        z_min: zs[0],
        z_max: *zs.last().expect("non-empty"),
        nz: zs.len(),
    };
    let samples = nanowire::field_map(&mode, &cfg.moments()?, &window)?;
    let extra = [("r_range", r_range.to_string()), ("z_range", z_range.to_string())];
    let mut s = header("field-map", cfg, &extra);
    s.push_str("r,z,e_r_re,e_r_im,e_z_re,e_z_im\n");
    for p in &samples {
        s.push_str(&csv_line(&[p.r, p.z, p.e_r.re, p.e_r.im, p.e_z.re, p.e_z.im]));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaZxCheck {
    pub sigma_e: f64,
    pub mass_ratio: f64,
    pub shift: f64,
    pub estimate_nm: f64,
    pub significance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaValue {
    pub kl: f64,
    pub value: f64,
    pub negligible: bool,
}

fn lambda_check(env: &GaussianEnvelopes, k: f64) -> Result<LambdaZxCheck, CliError> {
    let est = lambda_zx_estimate(env)?;
    Ok(LambdaZxCheck {
        sigma_e: env.sigma_e,
        mass_ratio: env.mass_ratio,
        shift: env.shift,
        estimate_nm: est,
        significance: lambda_zx_significance(est, k)?,
    })
}

/// k²L² with L the moment arm L_QD/2 about the dot center.
fn omega_check(k: f64, l_qd: f64) -> OmegaValue {
    let o = omega_negligibility(k, 0.5 * l_qd);
    OmegaValue { kl: k * 0.5 * l_qd, value: o.value, negligible: o.negligible }
}

pub fn default_envelopes() -> GaussianEnvelopes {
    GaussianEnvelopes { sigma_e: 2.0, mass_ratio: 5.0, shift: 2.5 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsReport {
    pub version: String,
    pub table: String,
    pub psi_g_parity: [i8; 3],
    pub psi_e_parity: [i8; 3],
    pub mu_allowed: Vec<String>,
    pub lambda_allowed: Vec<String>,
    pub lambda_zx_check: LambdaZxCheck,
    pub omega_check: OmegaValue,
}

const AXES: [&str; 3] = ["x", "y", "z"];

pub fn parity_table(name: &str) -> Result<ParityTable, CliError> {
    match name {
        "lens" => Ok(ParityTable::lens_dot()),
        "symmetric" => Ok(ParityTable::parity_symmetric()),
        "unconstrained" => Ok(ParityTable::unconstrained()),
        other => Err(CliError::Config(format!("table must be lens, symmetric or unconstrained, got '{other}'"))),
    }
}

pub fn moments_report(cfg: &RunConfig, table: &str, env: &GaussianEnvelopes) -> Result<MomentsReport, CliError> {
    cfg.validate()?;
    let t = parity_table(table)?;
    let env = GaussianEnvelopes::new(env.sigma_e, env.mass_ratio, env.shift).map_err(|e| CliError::Config(e.to_string()))?;
    let p = allowed_moments(&t);
    let k = InterfaceGeometry::new(cfg.host()?, cfg.metal()?, 1.0, cfg.lambda0)?.k1();
    Ok(MomentsReport {
        version: VERSION.into(),
        table: table.into(),
        psi_g_parity: t.big_psi_g(),
        psi_e_parity: t.big_psi_e(),
        mu_allowed: (0..3).filter(|&i| p.mu[i]).map(|i| AXES[i].to_string()).collect(),
        lambda_allowed: p.lambda_entries().into_iter().map(|(i, j)| format!("{}{}", AXES[i], AXES[j])).collect(),
        lambda_zx_check: lambda_check(&env, k)?,
        omega_check: omega_check(k, cfg.l_qd),
    })
}

pub fn moments(cfg: &RunConfig, table: &str, env: &GaussianEnvelopes) -> Result<String, CliError> {
    to_json(&moments_report(cfg, table, env)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    pub length_unit: &'static str,
    pub wavevector_unit: &'static str,
    pub velocity_unit: &'static str,
    pub rates: &'static str,
    pub figures_of_merit: &'static str,
    pub omega_length: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupVelocity {
    pub nm_per_fs: f64,
    pub over_c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub conventions: Conventions,
    pub g1_interface: f64,
    pub g2_interface: f64,
    pub g1_wire: f64,
    pub g2_wire: f64,
    pub k_spp_planar: ComplexValue,
    pub k_sp_wire: ComplexValue,
    pub v_g: GroupVelocity,
    pub lambda_zx_check: LambdaZxCheck,
    pub omega_check: OmegaValue,
    pub config: BTreeMap<&'static str, String>,
}

pub fn report_data(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let moments = cfg.moments()?;
    let planar = InterfaceGeometry::new(cfg.host()?, cfg.metal()?, 10.0, cfg.lambda0)?;
    let k1 = planar.k1();
    let fi = figures_of_merit(k1, &moments)?;
    let mode = solve_dispersion(&wire_geometry(cfg)?)?;
    let fw = figures_of_merit(mode.k_sp.re, &moments)?;
    Ok(Report {
        version: VERSION.into(),
        conventions: Conventions {
            length_unit: "nm",
            wavevector_unit: "rad/nm",
            velocity_unit: "nm/fs",
            rates: "normalized to the homogeneous host electric-dipole rate",
            figures_of_merit: "g1 = 2k|ratio|, g2 = (k ratio)^2; host k for the interface, Re k_sp for the wire",
            omega_length: "moment arm L_QD/2",
        },
        g1_interface: fi.g1,
        g2_interface: fi.g2,
        g1_wire: fw.g1,
        g2_wire: fw.g2,
        k_spp_planar: spp_pole(&planar)?.into(),
        k_sp_wire: mode.k_sp.into(),
        v_g: GroupVelocity { nm_per_fs: mode.v_g, over_c0: mode.v_g / C0 },
        lambda_zx_check: lambda_check(&default_envelopes(), k1)?,
        omega_check: omega_check(k1, moments.l_qd),
        config: cfg.entries(),
    })
}

pub fn report(cfg: &RunConfig) -> Result<String, CliError> {
    to_json(&report_data(cfg)?)
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mesoqed::nanowire::WireOrientation;

    fn reference() -> RunConfig {
        RunConfig::preset("paper").unwrap()
    }

    #[test]
    fn interface_flip_identity() {
        let mut c = reference();
        c.range = Some(SweepRange::new(20.0, 200.0, 45.0).unwrap());
        for r in interface_rows(&c).unwrap() {
            assert!((r.total_direct - r.total_inverted - 2.0 * r.gamma1).abs() < 1e-12);
            assert!((r.rad + r.pl + r.ls - r.total_direct).abs() < 1e-6);
        }
    }

    #[test]
    fn radial_wire_rows_have_no_first_order() {
        let mut c = reference();
        c.orientation = WireOrientation::Radial;
        c.range = Some(SweepRange::new(20.0, 60.0, 20.0).unwrap());
        for r in wire_rows(&c).unwrap() {
            assert_eq!(r.gamma1_pl, 0.0);
        }
    }

    #[test]
    fn sweep_reports_offending_point() {
        let mut c = reference();
        c.orientation = WireOrientation::Axial;
        c.range = Some(SweepRange::new(0.5, 20.0, 19.5).unwrap());
        match wire_rows(&c) {
            Err(CliError::AtPoint { param: "d", value, .. }) => assert_eq!(value, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(csv_line(&[1.0, -0.25]), "1.00000000000e0,-2.50000000000e-1\n");
    }

    #[test]
    fn report_reference_values() {
        let r = report_data(&reference()).unwrap();
        assert!((0.42..=0.44).contains(&r.g1_interface));
        assert!((0.73..=0.79).contains(&r.g1_wire));
        assert!(r.omega_check.value < 0.1);
    }
}
