use proptest::prelude::*;
use robin_spectra::curve::*;
use robin_spectra::profile::ProfileSpec;
use robin_spectra::Curve;

fn circle(r: f64) -> Curve {
    CurveSpec::Circle { radius: r }.build().unwrap()
}

#[test]
fn constant_curvatures() {
    let c = circle(1.0);
    let line: Curve = CurveSpec::Straight.build().unwrap();
    for s in [0.0, 0.7, 3.0, 6.0] {
        assert!((c.curvature(s).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(line.curvature(s).unwrap(), 0.0);
    }
    let st = curvature_stats(&circle(2.0), (0.0, 4.0 * std::f64::consts::PI), 200).unwrap();
    assert!((st.gamma_star - 0.5).abs() < 1e-12 && (st.gamma_lowstar - 0.5).abs() < 1e-12);
}

#[test]
fn parabola_decay() {
    let p: Curve = CurveSpec::Parabola { c: 0.5 }.build().unwrap();
    let bound = (10..=100).map(|i| i as f64).map(|s| p.curvature(s).unwrap().abs() * (1.0 + s * s).powf(0.75)).fold(0.0, f64::max);
    assert!(bound < 2.0, "{bound}");
}

#[test]
fn line_bump_peak() {
    let c: Curve = CurveSpec::LineBump { separation: 8.0 }.build().unwrap();
    let st = curvature_stats(&c, (-12.0, 20.0), 4001).unwrap();
    // Dense sampling of sech(s) − sech(s − 8); the peak sits just left of 0.
    let peak = (-20000..=20000).map(|i| i as f64 * 1e-6).map(|s| 1.0 / s.cosh() - 1.0 / (s - 8.0).cosh()).fold(f64::MIN, f64::max);
    assert!((st.gamma_star - peak).abs() < 1e-9 && st.s_star.abs() < 1e-3);
    assert!(c.total_turning(-16.0, 24.0).unwrap().abs() < 1e-6);
}

#[test]
fn wedge_turning() {
    let alpha = std::f64::consts::PI / 6.0;
    let w: Curve = CurveSpec::WedgeSmoothed { half_angle: alpha, fillet: 1.0 }.build().unwrap();
    let turning = w.total_turning(-20.0, 20.0).unwrap();
    assert!((turning.abs() - 2.0 * alpha).abs() < 1e-8, "{turning}");
}

#[test]
fn reconstruction_examples() {
    let sech: Curve = curve_from_curvature(ProfileSpec::Sech { amp: 1.0, center: 0.0, width: 1.0 }, [-40.0, 40.0], 0.0).unwrap();
    let turn = sech.total_turning(-40.0, 40.0).unwrap();
    assert!((turn - std::f64::consts::PI).abs() < 1e-8);
    let ring: Curve = curve_from_curvature(ProfileSpec::Constant { value: 0.5 }, [0.0, 4.0 * std::f64::consts::PI], 0.0).unwrap();
    let end = ring.point(4.0 * std::f64::consts::PI).unwrap();
    let start = ring.point(0.0).unwrap();
    assert!((end[0] - start[0]).hypot(end[1] - start[1]) < 1e-8);
}

#[test]
fn tube_map_examples() {
    let line: Curve = CurveSpec::Straight.build().unwrap();
    let p = line.tube_map(1.5, 0.25, Side::Interior).unwrap();
    assert!((p[0] - 1.5).abs() < 1e-12 && (p[1] - 0.25).abs() < 1e-12);
    let c = circle(1.0);
    let q = c.tube_map(0.0, 0.3, Side::Exterior).unwrap();
    assert!((q[0].hypot(q[1]) - 1.3).abs() < 1e-12);
    let r = c.tube_map(2.0, 0.5, Side::Interior).unwrap();
    assert!((r[0].hypot(r[1]) - 0.5).abs() < 1e-12);
}

#[test]
fn injectivity_checks() {
    assert!(check_assumptions(&circle(1.0), Side::Interior, 0.5, 400).unwrap().injective);
    assert!(!check_assumptions(&circle(1.0), Side::Interior, 1.5, 400).unwrap().injective);
    let bump: Curve = CurveSpec::LineBump { separation: 8.0 }.build().unwrap();
    assert!(check_assumptions(&bump, Side::Interior, 0.4, 1000).unwrap().injective);
}

#[test]
fn parallel_curvature_examples() {
    assert_eq!(parallel_curvature(0.0, 0.7).unwrap(), 0.0);
    assert!((parallel_curvature(1.0f64, 0.5).unwrap() - 2.0).abs() < 1e-15);
    assert!((parallel_curvature(-1.0f64, 0.5).unwrap() + 2.0 / 3.0).abs() < 1e-15);
    assert!(parallel_curvature(2.0, 0.5).is_err());
}

#[test]
fn config_json_round_trip() {
    let spec: CurveSpec = serde_json::from_str(r#"{"family":"from_curvature","profile":{"kind":"sech","amp":0.5},"window":[-20,20],"anchor":0}"#).unwrap();
    let back: CurveSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, back);
    assert!(serde_json::from_str::<CurveSpec>(r#"{"family":"circle","radius":1,"extra":2}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unit_speed_and_frame(r in 0.3f64..5.0, s in 0.0f64..30.0) {
        let c = circle(r);
        let t = c.tangent(s).unwrap();
        let n = c.normal(s).unwrap();
        prop_assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-10);
        prop_assert!((t[0] * n[0] + t[1] * n[1]).abs() < 1e-10);
        prop_assert!((c.curvature(s).unwrap() - 1.0 / r).abs() < 1e-10);
    }

    #[test]
    fn parallel_curvature_inverts(g in -3.0f64..3.0, d in 0.01f64..0.3) {
        let gd = parallel_curvature(g, d).unwrap();
        // Offsetting back by −d restores the original curvature.
        prop_assert!((parallel_curvature(gd, -d).unwrap() - g).abs() < 1e-10 * (1.0 + g.abs()));
    }
}
