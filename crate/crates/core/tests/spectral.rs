use num_complex::Complex64;
use twomat::equilibrium::solve_vector_equilibrium;
use twomat::equilibrium::vector::{default_grids, wide_grids};
use twomat::model::Polynomial;
use twomat::spectral::examples::{example2_analysis, example2_w, solver_curve, CurveExample, Example2Reading};
use twomat::spectral::{
    root_multiplicity, sheet_structure, w_effective, xi_from_mu1, BivariateCurve, DEFAULT_MULTIPLICITY_TOL,
};

fn half_square() -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, 0.5])
}

fn multicritical_curve() -> BivariateCurve {
    BivariateCurve::new(vec![vec![0.0, 0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, -1.0], vec![1.0]])
}

#[test]
fn quartic_example_gives_multicritical_curve() {
    let ex = CurveExample::One;
    let curve = solver_curve(&ex.w(ex.tau()), ex.tau()).unwrap();
    let d = curve.distance(&multicritical_curve());
    eprintln!("distance {d:.3e}");
    assert!(d <= 1e-3);
    assert_eq!(root_multiplicity(&curve, 0.0, 0.0, 1e-3).unwrap(), 4);
}

#[test]
fn cubic_example_has_quadruple_root() {
    let ex = CurveExample::Three;
    let tau = ex.tau();
    let curve = solver_curve(&ex.w(tau), tau).unwrap();
    // (−32 + 16ξ − 8ξ² + 4ξ³ − ξ⁴) + √5(8 + 4ξ − 4ξ² + ξ³)x − 5x²
    let s5 = 5f64.sqrt();
    let displayed = BivariateCurve::new(vec![
        vec![-32.0, 16.0, -8.0, 4.0, -1.0],
        vec![8.0 * s5, 4.0 * s5, -4.0 * s5, s5],
        vec![-5.0],
    ]);
    let d = curve.distance(&displayed);
    eprintln!("distance {d:.3e}");
    assert!(d <= 1e-3);
    let (x0, xi0, m) = ex.marked_point();
    let found = root_multiplicity(&curve, x0, xi0, DEFAULT_MULTIPLICITY_TOL).unwrap();
    eprintln!("table {:?}", twomat::spectral::derivative_table(&curve, x0, xi0));
    assert_eq!(found, m);
}

#[test]
fn sextic_example_readings() {
    let rep = example2_analysis(DEFAULT_MULTIPLICITY_TOL).unwrap();
    for r in &rep.rows {
        eprintln!("{:?} tau={} m={} {:?}", r.reading, r.tau_label, r.multiplicity, r.derivatives);
    }
    // the displayed potential has positive density at 0, so ξ = 0 is not a root at x = 0
    for r in rep.rows.iter().filter(|r| r.reading == Example2Reading::Displayed) {
        assert_eq!(r.multiplicity, 0);
    }
    let hits: Vec<_> = rep.sextuple().collect();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].reading, Example2Reading::CurveConsistent);
    assert_eq!(hits[0].tau_label, "2^(-1/3)");
    assert!(!rep.displayed_reproduces());

    // the curve-consistent reading reproduces the general displayed curve:
    // 2^{−4/3}ξ² + ξ⁴ + τ(x − τξ)(τx + 2^{1/3}ξ − τ²ξ + 2^{2/3}ξ³ − ξ⁵)
    let tau = hits[0].tau;
    let (a, b, c) = (2f64.powf(-4.0 / 3.0), 2f64.powf(1.0 / 3.0), 2f64.powf(2.0 / 3.0));
    let t2 = tau * tau;
    let displayed = BivariateCurve::new(vec![
        vec![0.0, 0.0, a - t2 * (b - t2), 0.0, 1.0 - t2 * c, 0.0, t2],
        vec![0.0, tau * (b - t2) - tau * t2, 0.0, tau * c, 0.0, -tau],
        vec![t2],
    ]);
    let d = hits[0].curve.distance(&displayed);
    eprintln!("general curve distance {d:.3e}");
    assert!(d <= 1e-3);
    let w = example2_w(tau, Example2Reading::CurveConsistent);
    assert!((w_effective(&w, tau).coeff(2) + 0.5 * b).abs() < 1e-15);
}

#[test]
fn xi_satisfies_multicritical_curve() {
    let grids = wide_grids(4.0, 32.0, 400).unwrap();
    let sol = solve_vector_equilibrium(-1.0, 1.0, &half_square(), grids, 5000, 1e-3).unwrap();
    let curve = multicritical_curve();
    for z in [Complex64::new(0.0, 2.0), Complex64::new(3.5, 0.0), Complex64::new(-3.5, 0.0)] {
        let xi = xi_from_mu1(z, &half_square(), &sol.mu1).unwrap();
        let scale = [xi.powi(4).norm(), (z * xi.powi(3)).norm(), (z * z).norm()]
            .into_iter()
            .fold(0.0, f64::max);
        let res = curve.eval(z, xi).norm() / scale;
        eprintln!("z={z} xi={xi} residual {res:.3e}");
        assert!(res <= 1e-3);
    }
    let sheets = sheet_structure(&sol);
    eprintln!("{:?} {:?}", sol.endpoints, sheets);
    assert!(sheets.all_sheets_meet_at_origin());
}

#[test]
fn sheets_in_cases_one_and_three() {
    let one = solve_vector_equilibrium(0.0, 1.0, &half_square(), default_grids(400), 5000, 5e-3).unwrap();
    let s = sheet_structure(&one);
    assert_eq!(s.cuts[0].len(), 1);
    assert!(s.cuts[0][0].contains_origin());
    assert!(one.endpoints.c2 > 0.0);
    assert!(!s.cuts[2].iter().any(|c| matches!(c, twomat::spectral::Cut::Imaginary(_)) && c.contains_origin()));
    // sheets share their connecting cuts
    for j in 0..3 {
        assert!(s.cuts[j].iter().any(|c| s.cuts[j + 1].contains(c)));
    }
    let three = solve_vector_equilibrium(-2.0, 1.0, &half_square(), default_grids(400), 5000, 5e-3).unwrap();
    let s = sheet_structure(&three);
    eprintln!("{:?} {:?}", three.endpoints, s);
    assert_eq!(three.endpoints.c2, 0.0);
    assert!(three.endpoints.c1 > 0.0 && three.endpoints.c3 > 0.0);
    assert!(s.cuts[1].iter().any(|c| matches!(c, twomat::spectral::Cut::Imaginary(_)) && c.contains_origin()));
}

#[test]
fn xi_residual_shrinks_under_refinement() {
    use twomat::equilibrium::{solve_one_matrix, Axis, GridMeasure};
    let semicircle = BivariateCurve::new(vec![vec![1.0, 0.0, 1.0], vec![0.0, -1.0]]);
    let z = Complex64::new(0.0, 3.0);
    let residual = |cells: usize| {
        let t = GridMeasure::template(-3.0, 3.0, cells, Axis::Real, 1.0).unwrap();
        let sol = solve_one_matrix(&half_square(), &t, 20_000, 1e-10).unwrap();
        let xi = xi_from_mu1(z, &half_square(), &sol.measure).unwrap();
        semicircle.eval(z, xi).norm()
    };
    let (coarse, fine) = (residual(100), residual(400));
    eprintln!("{coarse:.3e} {fine:.3e}");
    assert!(fine <= 1e-3);
    assert!(fine < 0.5 * coarse);
}
