use num_bigint::BigUint;
use sqrt2_collatz::duffing::{
    classify_winding, energy, equilibria, homoclinic_profile, max_sample_gap, melnikov,
    return_distance, separatrix_crossing, separatrix_velocity, simulate, twin_run_separation,
    DuffingError, DuffingParams, ForcingSignal, ForcingTransform, Stability, Winding,
};

#[test]
fn equilibria_residuals() {
    for (a, b, c) in [(1.0, 1.0, 1.0), (1.0, 0.0, 1.0), (2.0, -1.0, 0.5), (0.3, 2.0, 3.0)] {
        let p = DuffingParams::with_coefficients(a, b, c);
        let eq = equilibria(&p).unwrap();
        for &(x, _) in &eq {
            let scale = (a * x).abs().max(1.0);
            assert!(p.restoring(x).abs() <= 1e-12 * scale, "{a} {b} {c} x={x}");
        }
    }
    let eq = equilibria(&DuffingParams::with_coefficients(1.0, 0.0, 1.0)).unwrap();
    assert_eq!(eq, vec![(-1.0, Stability::Center), (0.0, Stability::Saddle), (1.0, Stability::Center)]);
    assert_eq!(
        equilibria(&DuffingParams::with_coefficients(0.0, 0.0, 1.0)),
        Err(DuffingError::DegenerateParams)
    );
    assert_eq!(
        equilibria(&DuffingParams::with_coefficients(1.0, 1.0, 0.0)),
        Err(DuffingError::DegenerateParams)
    );
}

#[test]
fn separatrix_round_trip() {
    let p = DuffingParams::default();
    assert_eq!(separatrix_velocity(&p, 0.0).unwrap(), 0.0);
    let edge = separatrix_crossing(&p).unwrap();
    for i in 0..=100 {
        let x = edge * i as f64 / 100.0;
        let v = separatrix_velocity(&p, x).unwrap();
        assert!(energy(&p, x, v).abs() < 1e-12);
        assert!(energy(&p, -x, -v).abs() < 1e-12);
    }
}

#[test]
fn profile_derivative_and_decay() {
    let mut p = DuffingParams::default();
    p.a_amp = 1.3;
    p.lambda = 0.7;
    p.k = 2.0;
    let (x0, _) = homoclinic_profile(&p, 0.0).unwrap();
    assert!((x0 - 1.3 / 1.7f64.sqrt()).abs() < 1e-15);
    for t in [50.0 / 2f64.sqrt(), -50.0 / 2f64.sqrt()] {
        assert!(homoclinic_profile(&p, t).unwrap().0.abs() < 1e-15 * 1.3);
    }
    let h = 1e-5;
    for i in 0..100 {
        let t = -5.0 + 0.1 * i as f64;
        let (_, v) = homoclinic_profile(&p, t).unwrap();
        let fd = (homoclinic_profile(&p, t + h).unwrap().0 - homoclinic_profile(&p, t - h).unwrap().0) / (2.0 * h);
        assert!((v - fd).abs() < 1e-6, "t={t}");
    }
    p.lambda = -1.5;
    assert!(matches!(homoclinic_profile(&p, 0.0), Err(DuffingError::InvalidProfile { .. })));
}

#[test]
fn melnikov_special_cases() {
    let mut p = DuffingParams::default();
    p.gamma = 0.0;
    let m0 = melnikov(&p, 0.0).unwrap();
    assert!(m0 < 0.0);
    for t0 in [0.5, 1.7, -3.0] {
        assert!((melnikov(&p, t0).unwrap() - m0).abs() < 1e-12);
    }
    p.delta_damp = 0.0;
    assert_eq!(melnikov(&p, 1.0).unwrap(), 0.0);

    // δ = 0: M(t₀) = −γ I sin(ωt₀) with I = ∫ ẋ⁰ sin ωt
    let mut p = DuffingParams::default();
    p.delta_damp = 0.0;
    p.omega = 1.5;
    let quarter = std::f64::consts::FRAC_PI_2 / p.omega;
    let amp = melnikov(&p, quarter).unwrap();
    for i in 0..24 {
        let t0 = i as f64 * 0.37;
        let fit = amp * (p.omega * t0).sin();
        assert!((melnikov(&p, t0).unwrap() - fit).abs() < 1e-6, "t0={t0}");
    }
}

#[test]
fn melnikov_is_linear_in_gamma_and_delta() {
    let base = DuffingParams::default();
    let t0 = 0.8;
    let with = |gamma: f64, delta: f64| {
        let mut p = base;
        p.gamma = gamma;
        p.delta_damp = delta;
        melnikov(&p, t0).unwrap()
    };
    let g1 = with(1.0, 0.0);
    let d1 = with(0.0, 1.0);
    for s in [0.1, 0.25, 0.5, 1.5, 3.0] {
        assert!((with(s, 0.0) - s * g1).abs() < 1e-9 * s.max(1.0));
        assert!((with(0.0, s) - s * d1).abs() < 1e-9 * s.max(1.0));
        assert!((with(s, s) - s * (g1 + d1)).abs() < 1e-9 * s.max(1.0));
    }
}

#[test]
fn energy_is_conserved_unforced() {
    let p = DuffingParams::default();
    let x0 = 0.5;
    let v0 = separatrix_velocity(&p, x0).unwrap();
    let pts = simulate(&p, &ForcingSignal::none(), 100.0, 1e-3, x0, v0).unwrap();
    assert!(pts.len() >= 100_000);
    let k0 = energy(&p, x0, v0);
    let drift = pts.iter().map(|pt| (energy(&p, pt.x, pt.v) - k0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-6, "drift {drift}");
}

#[test]
fn rest_points_stay_put() {
    let p = DuffingParams::default();
    let xe = equilibria(&p).unwrap()[2].0;
    let pts = simulate(&p, &ForcingSignal::none(), 50.0, 1e-2, xe, 0.0).unwrap();
    assert!(pts.iter().all(|pt| (pt.x - xe).abs() < 1e-9 && pt.v.abs() < 1e-9));

    let pts = simulate(&p, &ForcingSignal::none(), 10.0, 1e-2, 0.0, 0.0).unwrap();
    let portrait: std::collections::BTreeSet<(u64, u64)> =
        pts.iter().map(|pt| (pt.x.to_bits(), pt.v.to_bits())).collect();
    assert_eq!(portrait.len(), 1);
}

#[test]
fn center_orbits_close() {
    let p = DuffingParams::default();
    let xe = equilibria(&p).unwrap()[2].0;
    let pts = simulate(&p, &ForcingSignal::none(), 20.0, 1e-3, xe + 0.1, 0.0).unwrap();
    assert!(max_sample_gap(&pts) < 1e-2);
    assert!(return_distance(&pts, 0.05).unwrap() < 1e-2);
    assert_eq!(classify_winding(&p, &pts).unwrap(), Winding::OneCenter(1));
}

#[test]
fn winding_flips_at_the_separatrix() {
    let p = DuffingParams::default();
    let edge = separatrix_crossing(&p).unwrap();
    for (x0, inside) in [(edge - 1e-3, true), (edge + 1e-3, false), (0.3, true), (1.4, false)] {
        let k = energy(&p, x0, 0.0);
        assert_eq!(k < 0.0, inside);
        let pts = simulate(&p, &ForcingSignal::none(), 60.0, 1e-3, x0, 0.0).unwrap();
        let expected = if inside { Winding::OneCenter(1) } else { Winding::BothCenters };
        assert_eq!(classify_winding(&p, &pts).unwrap(), expected, "x0={x0}");
    }
}

#[test]
fn blowup_is_reported() {
    let p = DuffingParams::with_coefficients(1.0, -1.0, -1.0);
    let result = simulate(&p, &ForcingSignal::none(), 10.0, 1e-3, 2.0, 0.0);
    assert!(matches!(result, Err(DuffingError::Blowup { .. })));
}

#[test]
fn forcing_is_bounded() {
    let n = BigUint::from(73u32);
    let sign = ForcingSignal::from_orbit(&n, 500, ForcingTransform::ParitySign, 0.5).unwrap();
    assert!(sign.levels.iter().all(|&l| l == 1.0 || l == -1.0));
    let log = ForcingSignal::from_orbit(&n, 500, ForcingTransform::LogScaled, 0.5).unwrap();
    assert!(log.levels.iter().all(|&l| (0.0..=1.0).contains(&l)));
    assert_eq!(log.levels.iter().copied().fold(0.0, f64::max), 1.0);
}

#[test]
fn twin_runs_separate_under_parity_forcing() {
    let p = DuffingParams::default();
    let forcing =
        ForcingSignal::from_orbit(&BigUint::from(73u32), 400, ForcingTransform::ParitySign, 0.5).unwrap();
    let sep = twin_run_separation(&p, &forcing, 200.0, 1e-3, 0.0, 0.0, 1e-8).unwrap();
    assert!(sep[0].1 <= 1.1e-8);
    let late = sep.iter().filter(|s| s.0 > 150.0).map(|s| s.1).fold(0.0, f64::max);
    assert!(late > 0.5, "separation only reached {late}");
}
