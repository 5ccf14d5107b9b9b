use virial_ansatz::potentials::PotentialSpec;
use virial_ansatz::refsolver::{
    auto_half_width, refine, refine_with, solve_grid, solve_grid_with, three_grid_order, virial_residual,
    RefineOptions, Scheme,
};
use virial_ansatz::spectra::{ansatz, ansatz_virial_residual, build_basis};
use virial_ansatz::Error;

#[test]
fn harmonic_ground_state_on_a_single_grid() {
    let spec = PotentialSpec::harmonic(1.0);
    let sol = solve_grid_with(&spec, 1, 8.0, 8.0 / 1600.0, Scheme::Numerov).unwrap();
    assert!((sol.eigenvalues[0] - 0.5).abs() < 1e-8);
    let r = refine(&spec, 1, 1e-10).unwrap();
    assert!((r.eigenvalues[0] - 0.5).abs() < 1e-8);
}

#[test]
fn harmonic_ladder() {
    let r = refine(&PotentialSpec::harmonic(1.0), 6, 1e-10).unwrap();
    for (n, e) in r.eigenvalues.iter().enumerate() {
        assert!((e - (n as f64 + 0.5)).abs() < 1e-9, "level {n}: {e}");
    }
}

#[test]
fn quartic_levels() {
    let r = refine(&PotentialSpec::monomial(2, 1.0), 1, 1e-10).unwrap();
    assert!((r.eigenvalues[0] - 0.66798626).abs() < 1e-6 * 0.66798626);
    let r = refine(&PotentialSpec::monomial(2, 0.1), 6, 1e-10).unwrap();
    assert!((r.eigenvalues[5] - 6.21013792).abs() < 1e-6 * 6.21013792);
    let r = refine(&PotentialSpec::monomial(2, 1.5), 6, 1e-10).unwrap();
    assert!((r.eigenvalues[5] - 15.31551711).abs() < 1e-7);
}

#[test]
fn schemes_agree() {
    let spec = PotentialSpec::monomial(3, 0.8);
    let fd = refine(&spec, 5, 1e-10).unwrap();
    let nv = refine_with(
        &spec,
        5,
        &RefineOptions {
            scheme: Scheme::Numerov,
            ..RefineOptions::default()
        },
    )
    .unwrap();
    for (a, b) in fd.eigenvalues.iter().zip(&nv.eigenvalues) {
        assert!((a - b).abs() < 1e-8 * a, "{a} vs {b}");
    }
}

#[test]
fn larger_box_leaves_levels_unchanged() {
    let spec = PotentialSpec::monomial(2, 1.0);
    let tol = 1e-10;
    let base = refine(&spec, 6, tol).unwrap();
    let wide = refine_with(
        &spec,
        6,
        &RefineOptions {
            tol,
            half_width: Some(1.25 * base.report.half_width),
            ..RefineOptions::default()
        },
    )
    .unwrap();
    for (a, b) in base.eigenvalues.iter().zip(&wide.eigenvalues) {
        assert!((a - b).abs() < 1e-9 * a.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn shifted_spectrum_matches_unshifted() {
    let spec = PotentialSpec::quartic_anharmonic(1.0, 0.4);
    let shifted = spec.clone().translate(-1.3).unwrap();
    let a = refine(&spec, 4, 1e-10).unwrap();
    let b = refine(&shifted, 4, 1e-10).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-9 * x, "{x} vs {y}");
    }
    assert_eq!(b.finest.center, -1.3);
}

#[test]
fn eigenfunction_invariants() {
    let spec = PotentialSpec::monomial(2, 1.0);
    let r = refine(&spec, 6, 1e-10).unwrap();
    let sol = &r.finest;
    assert!(sol.eigenvalues.windows(2).all(|w| w[1] > w[0]));
    for n in 0..6 {
        assert_eq!(sol.node_count(n), n);
        assert!((sol.norm_sq(n) - 1.0).abs() < 1e-10);
        assert!(sol.parity_defect(n) < 1e-8, "level {n}: {}", sol.parity_defect(n));
        // sign convention: first non-negligible value positive
        let psi = &sol.eigenfunctions[n];
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let first = psi.iter().find(|v| v.abs() > 1e-8 * peak).unwrap();
        assert!(*first > 0.0);
    }
}

#[test]
fn virial_residual_is_second_order_for_the_three_point_scheme() {
    let spec = PotentialSpec::harmonic(1.0);
    let l = auto_half_width(&spec, 3).unwrap();
    let coarse = solve_grid(&spec, 3, l, 2.0 * l / 800.0).unwrap();
    let fine = solve_grid(&spec, 3, l, 2.0 * l / 1600.0).unwrap();
    let rc = virial_residual(&coarse, &spec);
    let rf = virial_residual(&fine, &spec);
    for n in 0..3 {
        let ratio = rc[n] / rf[n];
        assert!((ratio - 4.0).abs() < 0.2, "level {n}: ratio {ratio}");
    }
}

#[test]
fn virial_residual_small_at_converged_resolution() {
    let spec = PotentialSpec::monomial(2, 1.0);
    let r = refine_with(
        &spec,
        6,
        &RefineOptions {
            scheme: Scheme::Numerov,
            ..RefineOptions::default()
        },
    )
    .unwrap();
    for (n, v) in virial_residual(&r.finest, &spec).iter().enumerate() {
        assert!(*v <= 1e-6, "level {n}: {v}");
    }
}

#[test]
fn ansatz_ground_state_has_zero_virial_residual() {
    for spec in [
        PotentialSpec::monomial(2, 1.0),
        PotentialSpec::quartic_anharmonic(1.0, 2.0),
        PotentialSpec::even_polynomial(vec![0.5, 0.0, 0.1]),
    ] {
        let basis = build_basis(&spec, 0, Default::default()).unwrap();
        let r = ansatz_virial_residual(&ansatz(&basis, 0).unwrap(), &spec).unwrap();
        assert!(r < 1e-12, "{spec}: {r}");
    }
}

#[test]
fn convergence_orders() {
    let spec = PotentialSpec::monomial(2, 1.0);
    let l = auto_half_width(&spec, 4).unwrap();
    for p in three_grid_order(&spec, 4, l, 800, Scheme::SecondDifference).unwrap() {
        assert!((p - 2.0).abs() < 0.4, "{p}");
    }
    for p in three_grid_order(&spec, 4, l, 200, Scheme::Numerov).unwrap() {
        assert!((p - 4.0).abs() < 0.8, "{p}");
    }
}

#[test]
fn undersized_box_is_detected() {
    let err = solve_grid(&PotentialSpec::monomial(2, 1.0), 6, 1.5, 1.5 / 400.0).unwrap_err();
    assert!(matches!(err, Error::DomainTooSmall { level: 5, .. }), "{err:?}");
    // refinement grows the box instead of failing
    let r = refine_with(
        &PotentialSpec::monomial(2, 1.0),
        6,
        &RefineOptions {
            half_width: Some(1.5),
            ..RefineOptions::default()
        },
    )
    .unwrap();
    assert!(r.report.half_width > 1.5);
    assert!((r.eigenvalues[5] - 13.37933656).abs() < 1e-6 * 13.4);
}

#[test]
fn bad_inputs_are_rejected() {
    let spec = PotentialSpec::harmonic(1.0);
    assert!(solve_grid(&spec, 1, 8.0, 0.1).is_err());
    assert!(solve_grid(&spec, 0, 8.0, 0.01).is_err());
    assert!(refine(&spec, 2, 1e-14).is_err());
}

#[test]
fn eigenfunction_csv() {
    let sol = solve_grid(&PotentialSpec::harmonic(1.0), 2, 8.0, 0.02).unwrap();
    let mut buf = Vec::new();
    sol.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,psi_0,psi_1"));
    assert_eq!(lines.count(), sol.len());
}
