use statrs::function::beta::beta;
use vacuumfront::{BarenblattProfile, Dim};

/// `A` from the closed-form mass `c · A^{α + n/2} B^{−n/2}`, with `c` a Beta
/// function value.
fn amplitude_from_beta(gamma: f64, mass: f64, dim: Dim) -> f64 {
    let alpha = 1.0 / (gamma - 1.0);
    let p = BarenblattProfile::solve(gamma, mass, dim).unwrap();
    let (c, half_n) = match dim {
        Dim::One => (beta(0.5, alpha + 1.0), 0.5),
        Dim::Three => (2.0 * std::f64::consts::PI * beta(1.5, alpha + 1.0), 1.5),
    };
    (mass * p.b.powf(half_n) / c).powf(1.0 / (alpha + half_n))
}

#[test]
fn amplitude_matches_beta_closed_form() {
    for gamma in [1.25, 1.5, 2.0, 3.0, 5.0] {
        for dim in [Dim::One, Dim::Three] {
            for mass in [0.5, 1.0, 7.0] {
                let p = BarenblattProfile::solve(gamma, mass, dim).unwrap();
                let want = amplitude_from_beta(gamma, mass, dim);
                assert!((p.a / want - 1.0).abs() < 1e-10, "γ={gamma} {dim} M={mass}: {} vs {want}", p.a);
            }
        }
    }
}

#[test]
fn gamma_two_amplitudes() {
    // 1D: M = A^{3/2} B^{−1/2} · 4/3 with B = 1/12
    let a1 = (0.75f64 / 12f64.sqrt()).powf(2.0 / 3.0);
    assert!((a1 - 0.36056).abs() < 5e-6);
    let p1 = BarenblattProfile::solve(2.0, 1.0, Dim::One).unwrap();
    assert!((p1.a - a1).abs() < 1e-12);
    let p3 = BarenblattProfile::solve(2.0, 1.0, Dim::Three).unwrap();
    assert!((p3.a - amplitude_from_beta(2.0, 1.0, Dim::Three)).abs() < 1e-12);
    assert!((p3.a - 0.1348).abs() < 5e-5);
}

#[test]
fn mass_is_conserved_in_time() {
    for dim in [Dim::One, Dim::Three] {
        let p = BarenblattProfile::solve(1.5, 3.0, dim).unwrap();
        for t in [0.0, 0.3, 40.0, 1e5] {
            assert!((p.mass_at(t, 1e-12).unwrap() - 3.0).abs() < 1e-9);
        }
    }
}
