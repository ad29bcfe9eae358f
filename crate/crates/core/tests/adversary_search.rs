use nonunital::adversary::{minimize_negativity_2q, minimize_negativity_4q, SearchSettings};
use nonunital::protocols::{four_qubit_protocol, DiagonalInputParams};

/// Minimum over local unitaries on A and B for `q = 1, r = 0`, derived by
/// taking `V_B = I` and minimizing the off-diagonal sum over `V_A` by hand.
fn closed_form_minimum(p: f64, eta: f64) -> f64 {
    p.min(1.0 - p) * eta * (1.0 - eta).sqrt() / (eta * eta - eta + 1.0).sqrt()
}

#[test]
fn four_qubit_search_reaches_closed_form() {
    let settings = SearchSettings::new(16, 3);
    for p in [0.25, 0.5] {
        for eta in [0.2, 0.5, 0.8] {
            let params = DiagonalInputParams::new(p, 1.0, 0.0).unwrap();
            let out = minimize_negativity_4q(&params, eta, &settings).unwrap();
            let want = closed_form_minimum(p, eta);
            assert!(out.min_negativity <= want + 1e-6, "p={p} eta={eta}: {} vs {want}", out.min_negativity);
            assert!(out.min_negativity >= want - 1e-6, "p={p} eta={eta}: {} vs {want}", out.min_negativity);
            assert!(out.min_negativity <= eta / 2.0 + 1e-12);
        }
    }
    assert!((closed_form_minimum(0.5, 0.5) - 0.2041241452).abs() < 1e-9);
}

#[test]
fn reported_gates_reproduce_the_minimum() {
    let params = DiagonalInputParams::default();
    let out = minimize_negativity_4q(&params, 0.6, &SearchSettings::new(8, 1)).unwrap();
    let gates = out.gates();
    let r = four_qubit_protocol(&params, 0.6, Some(&gates[0]), Some(&gates[1])).unwrap();
    assert!((r.negativity - out.min_negativity).abs() < 1e-12);
}

#[test]
fn stable_across_seeds() {
    let params = DiagonalInputParams::default();
    let a = minimize_negativity_4q(&params, 0.4, &SearchSettings::new(16, 100)).unwrap();
    let b = minimize_negativity_4q(&params, 0.4, &SearchSettings::new(16, 200)).unwrap();
    assert!((a.min_negativity - b.min_negativity).abs() < 1e-4);
}

#[test]
fn deterministic_for_fixed_seed() {
    let params = DiagonalInputParams::new(0.3, 0.9, 0.2).unwrap();
    let s = SearchSettings::new(6, 42);
    assert_eq!(minimize_negativity_4q(&params, 0.7, &s).unwrap(), minimize_negativity_4q(&params, 0.7, &s).unwrap());
    assert_eq!(minimize_negativity_2q(0.7, &s).unwrap(), minimize_negativity_2q(0.7, &s).unwrap());
}

#[test]
fn factorized_inputs_are_fragile() {
    let settings = SearchSettings::new(8, 5);
    for eta in [0.1, 0.5, 0.9] {
        for (p, q, r) in [(0.5, 0.7, 0.7), (0.0, 1.0, 0.0), (1.0, 1.0, 0.0)] {
            let params = DiagonalInputParams::new(p, q, r).unwrap();
            let out = minimize_negativity_4q(&params, eta, &settings).unwrap();
            assert!(out.min_negativity < 1e-6, "p={p} q={q} r={r} eta={eta}: {}", out.min_negativity);
        }
    }
}

#[test]
fn two_qubit_always_fragile() {
    let settings = SearchSettings::new(8, 9);
    for k in 0..=10 {
        let eta = k as f64 / 10.0;
        let out = minimize_negativity_2q(eta, &settings).unwrap();
        assert!(out.min_negativity < 1e-6);
        assert_eq!(out.best_angles.len(), 3);
        assert!(out.best_angles.iter().all(|a| (0.0..std::f64::consts::TAU).contains(a)));
    }
}

#[test]
fn rejects_bad_eta() {
    assert!(minimize_negativity_2q(1.2, &SearchSettings::default()).is_err());
    assert!(minimize_negativity_4q(&DiagonalInputParams::default(), -0.5, &SearchSettings::default()).is_err());
}
