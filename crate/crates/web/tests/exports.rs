use pulseforge_web::{bang_bang_schedule, locality_probe, synthesize_pulse};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).expect("exports return JSON")
}

#[test]
fn approximate_pulse_for_quarter_turn() {
    let v = parse(synthesize_pulse(std::f64::consts::FRAC_PI_2, 0.0, 200.0, "approximate"));
    assert_eq!(v["strategy"], "approximate");
    assert!((v["duration"].as_f64().unwrap() - std::f64::consts::PI / 100.0).abs() < 1e-15);
    assert!(v["fidelity"].as_f64().unwrap() > 0.998);
    assert_eq!(v["omega1"][0].as_f64(), Some(100.0));
    assert_eq!(v["t"].as_array().unwrap().len(), v["omega1"].as_array().unwrap().len());
}

#[test]
fn errors_come_back_as_json() {
    let v = parse(synthesize_pulse(1.0, 0.0, 200.0, "fastest"));
    assert!(v["error"].as_str().unwrap().contains("fastest"));
    let v = parse(bang_bang_schedule(1.0, 200.0, 5.0, -5.0));
    assert!(v["error"].is_string());
}

#[test]
fn bang_bang_levels_are_bounds() {
    let v = parse(bang_bang_schedule(std::f64::consts::FRAC_PI_2, 200.0, -1000.0, 1000.0));
    let levels = v["levels"].as_array().unwrap();
    assert!(levels.iter().all(|l| l.as_f64().unwrap().abs() == 1000.0));
    assert_eq!(levels.len(), v["switch_times"].as_array().unwrap().len() + 1);
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-6);
}

#[test]
fn locality_of_free_evolution() {
    // J T = π/2 gives (I − iZ⊗Z)/√2, equal Schmidt weights; J T = π gives −iZ⊗Z.
    let pi = std::f64::consts::PI;
    let v = parse(locality_probe(0.0, 1.0, pi / 400.0, 200.0));
    assert!((v["locality_residual"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let v = parse(locality_probe(0.0, 1.0, pi / 200.0, 200.0));
    assert!(v["locality_residual"].as_f64().unwrap() < 1e-9);
    assert!(v["nearest_product_fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
}
