use mesoqed::halfspace::{green_bundle, green_tensors, offset_tensors, InterfaceGeometry, QuadOptions};
use mesoqed::model::{EmitterMoments, Material};
use mesoqed::nanowire::{solve_dispersion, WireGeometry, WireOrientation};
use mesoqed::quasistatic::quasistatic_background;
use mesoqed::rates::{md_eq_split, rate_ladder};
use mesoqed::specfun::bessel_ik;
use num_complex::Complex64;

const HEIGHTS: [f64; 5] = [15.0, 30.0, 60.0, 120.0, 300.0];

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn height_derivative_matches_finite_difference() {
    let o = QuadOptions::default();
    for h in HEIGHTS {
        let g = InterfaceGeometry::reference(h).unwrap();
        let t = green_tensors(&g, &o).unwrap();
        let dh = 1e-3 * h;
        let up = green_tensors(&g.with_height(h + dh).unwrap(), &o).unwrap().g_xx;
        let down = green_tensors(&g.with_height(h - dh).unwrap(), &o).unwrap().g_xx;
        // The scattered part depends on z + z', so ∂z at the field point is half of d/dh.
        let fd = 0.5 * (up - down) / (2.0 * dh);
        assert!(rel(t.dz_g_xx, fd) < 1e-4, "h = {h}: {} vs {fd}", t.dz_g_xx);
    }
}

#[test]
fn lateral_derivative_matches_finite_difference() {
    let o = QuadOptions::default();
    for h in HEIGHTS {
        let g = InterfaceGeometry::reference(h).unwrap();
        let t = green_tensors(&g, &o).unwrap();
        let dx = 1e-3 * h;
        let (_, zp) = offset_tensors(&g, dx, &o).unwrap();
        let (_, zm) = offset_tensors(&g, -dx, &o).unwrap();
        let fd = (zp - zm) / (2.0 * dx);
        assert!(rel(t.dx_g_zx, fd) < 1e-4, "h = {h}: {} vs {fd}", t.dx_g_zx);
    }
}

#[test]
fn tolerance_halving_is_stable() {
    for h in [10.0, 50.0, 500.0] {
        let g = InterfaceGeometry::reference(h).unwrap();
        let a = green_tensors(&g, &QuadOptions { rel_tol: 1e-9, ..Default::default() }).unwrap();
        let b = green_tensors(&g, &QuadOptions { rel_tol: 5e-10, ..Default::default() }).unwrap();
        for (x, y) in [(a.g_xx, b.g_xx), (a.dx_g_zx, b.dx_g_zx), (a.dz_g_xx, b.dz_g_xx), (a.dd_g_zz, b.dd_g_zz)] {
            assert!(rel(x, y) < 1e-6, "h = {h}");
        }
    }
}

#[test]
fn interface_split_sum_rule() {
    let m = EmitterMoments::reference();
    for h in HEIGHTS {
        let g = InterfaceGeometry::reference(h).unwrap();
        let b = green_bundle(&g).unwrap();
        let l = rate_ladder(&b, &m, g.norm()).unwrap();
        let s = md_eq_split(&b, &m, g.norm()).unwrap();
        assert!((s.gamma1_md + s.gamma1_eq - l.gamma1).abs() < 1e-12);
    }
}

#[test]
fn rates_return_to_bulk_far_from_the_interface() {
    let m = EmitterMoments::reference();
    let g = InterfaceGeometry::reference(3000.0).unwrap();
    let l = rate_ladder(&green_bundle(&g).unwrap(), &m, g.norm()).unwrap();
    assert!((l.gamma0 - 1.0).abs() < 0.02);
    assert!(l.gamma1.abs() < 0.01 && l.gamma2.abs() < 0.01);
}

#[test]
fn lossless_host_only_interface_is_homogeneous() {
    let g = InterfaceGeometry::new(Material::gaas(), Material::gaas(), 25.0, 1000.0).unwrap();
    let l = rate_ladder(&green_bundle(&g).unwrap(), &EmitterMoments::reference(), g.norm()).unwrap();
    assert!((l.gamma0 - 1.0).abs() < 1e-12);
    assert_eq!((l.gamma1, l.gamma2), (0.0, 0.0));
}

#[test]
fn wire_plasmon_decays_with_distance() {
    let geom = WireGeometry::reference();
    let mode = solve_dispersion(&geom).unwrap();
    let near = mode.green_bundle(20.0, WireOrientation::Axial).unwrap().g_xx;
    let far = mode.green_bundle(100.0, WireOrientation::Axial).unwrap().g_xx;
    let kappa = Complex64::new(mode.companion.kappa_out, 0.0);
    let k0 = |r: f64| bessel_ik(0, kappa * r).unwrap().1.re;
    let expected = (k0(130.0) / k0(50.0)).powi(2);
    assert!((far / near / expected - 1.0).abs() < 1e-10);
    let bg = quasistatic_background(&geom, 20.0, WireOrientation::Axial).unwrap();
    assert!(bg.lossy > 0.0 && bg.total() > 1.0);
}
