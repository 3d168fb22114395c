use hele_shaw_web::{check_domain, preset, solve};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("valid JSON")
}

#[test]
fn single_bubble_at_u_two_is_a_unit_circle() {
    let out = parse(&solve("free_space", &[], 2.0, 0.0, 0.0, 64, 0, 0));
    let xy: Vec<f64> = serde_json::from_value(out["bubbles"][0].clone()).unwrap();
    for p in xy.chunks(2) {
        assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
    }
    assert_eq!(out["streamlines"].as_array().unwrap().len(), 0);
}

#[test]
fn presets_solve_with_streamlines() {
    for name in ["free_space_pair", "half_plane_pair", "channel_pair", "channel_three"] {
        let p = parse(&preset(name));
        let circles: Vec<f64> = serde_json::from_value(p["circles"].clone()).unwrap();
        let out = parse(&solve(
            p["geometry"].as_str().unwrap(),
            &circles,
            2.0,
            p["alpha"][0].as_f64().unwrap(),
            p["alpha"][1].as_f64().unwrap(),
            128,
            6,
            60,
        ));
        assert!(out.get("error").is_none(), "{name}: {out}");
        assert!(out["converged"].as_bool().unwrap());
        assert!(out["residual"].as_f64().unwrap() < 1e-8);
        assert!(!out["streamlines"].as_array().unwrap().is_empty());
    }
}

#[test]
fn errors_come_back_as_json() {
    let out = parse(&solve("torus", &[], 2.0, 0.0, 0.0, 64, 0, 0));
    assert!(out["error"].as_str().unwrap().contains("torus"));
    assert!(check_domain(&[0.0, 0.0, 0.3]).is_empty());
    assert!(check_domain(&[0.0, 0.0, 0.3, 0.2, 0.0, 0.3]).contains("overlap"));
    assert!(!check_domain(&[0.0, 0.0]).is_empty());
}
