use std::io::Write;
use std::process::{Command, Output};

fn mesoqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesoqed")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn interface_sweep_csv_layout() {
    let o = mesoqed(&["interface-sweep", "--range", "20:60:20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# mesoqed "));
    assert!(text.contains("# range = 20:60:20"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "h,gamma0,gamma1,gamma2,total_direct,total_inverted,rad,pl,ls,b_yx_norm,q_xz_norm");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r.len(), 11);
        assert!((r[4] - r[5] - 2.0 * r[2]).abs() < 1e-10);
    }
}

#[test]
fn far_field_interface_row_is_bulk_like() {
    let rows = data_rows(&stdout(&mesoqed(&["interface-sweep", "--range", "1990:2000:10"])));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 2000.0);
    assert!((last[4] - 1.0).abs() < 0.1 && (last[5] - 1.0).abs() < 0.1);
}

#[test]
fn nanowire_sweeps() {
    let rows = data_rows(&stdout(&mesoqed(&["nanowire-sweep", "--range", "20:100:20", "--orientation", "radial"])));
    assert!(rows.iter().all(|r| r[2] == 0.0));
    let rows = data_rows(&stdout(&mesoqed(&["nanowire-sweep", "--range", "990:1000:10"])));
    assert!((rows[1][4] - 1.0).abs() < 0.02);
}

#[test]
fn negative_ratio_reverses_first_order() {
    let a = data_rows(&stdout(&mesoqed(&["nanowire-sweep", "--range", "20:40:20"])));
    let b = data_rows(&stdout(&mesoqed(&["nanowire-sweep", "--range", "20:40:20", "--ratio", "-10"])));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[2], -y[2]);
        assert_eq!(x[5], y[6]);
    }
}

#[test]
fn report_json() {
    let o = mesoqed(&["report"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let g1 = v["g1_interface"].as_f64().unwrap();
    assert!((0.42..=0.44).contains(&g1));
    assert!(v["omega_check"]["value"].as_f64().unwrap() < 0.1);
    for key in ["g2_interface", "g1_wire", "g2_wire", "k_spp_planar", "k_sp_wire", "v_g", "lambda_zx_check", "conventions"] {
        assert!(!v[key].is_null(), "missing {key}");
    }
}

#[test]
fn other_subcommands_run() {
    let d: serde_json::Value = serde_json::from_slice(&mesoqed(&["dispersion"]).stdout).unwrap();
    assert!(d["residual"].as_f64().unwrap() < 1e-10);
    let m: serde_json::Value = serde_json::from_slice(&mesoqed(&["moments"]).stdout).unwrap();
    assert_eq!(m["lambda_allowed"], serde_json::json!(["xz", "zx"]));
    let f = stdout(&mesoqed(&["field-map", "--r-range", "0:60:30", "--z-range", "0:10:10"]));
    assert_eq!(data_rows(&f).len(), 6);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let mut f = std::fs::File::create(&cfg).unwrap();
    writeln!(f, "# wire study\nradius = 25\nrange = 20:40:10\norientation = radial").unwrap();
    let out = dir.path().join("wire.csv");
    let o = mesoqed(&["nanowire-sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# radius = 25.0") && text.contains("# orientation = radial"));
    assert_eq!(data_rows(&text).len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(mesoqed(&["interface-sweep", "--range", "50:10:5"]).status.code(), Some(2));
    assert_eq!(mesoqed(&["report", "--tol", "0.5"]).status.code(), Some(2));
    assert_eq!(mesoqed(&["report", "--preset", "unknown"]).status.code(), Some(2));
    assert_eq!(mesoqed(&["bogus"]).status.code(), Some(2));
    let o = mesoqed(&["nanowire-sweep", "--range", "0.5:1:0.5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d = 0.5"));
}
