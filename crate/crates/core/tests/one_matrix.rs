use std::f64::consts::PI;
use std::time::Instant;

use twomat::equilibrium::one_matrix::{aligned_moments, density_from_curve, solve_one_matrix};
use twomat::equilibrium::singularity::{detect_singularity, SingularKind};
use twomat::equilibrium::{Axis, GridMeasure};
use twomat::model::quadrature::QuadratureRule;
use twomat::model::Polynomial;

fn grid(cells: usize) -> GridMeasure {
    GridMeasure::template(-3.0, 3.0, cells, Axis::Real, 1.0).unwrap()
}

fn double_well(lambda: f64) -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, -lambda, 0.0, 0.25 * lambda])
}

/// Exact cell averages of a density supported on `[-r, r]`, with tanh-sinh
/// on cells that contain an edge.
fn exact_cell_averages(g: &GridMeasure, r: f64, rho: impl Fn(f64) -> f64) -> Vec<f64> {
    let ts = QuadratureRule::tanh_sinh(6);
    (0..g.cells)
        .map(|i| {
            let (a, b) = (g.edge(i).max(-r), g.edge(i + 1).min(r));
            if a >= b {
                return 0.0;
            }
            ts.on_interval(a, b).integrate(&rho) / g.width()
        })
        .collect()
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn semicircle_density_and_edges() {
    let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
    let start = Instant::now();
    let sol = solve_one_matrix(&v, &grid(400), 20_000, 1e-3).unwrap();
    assert!(start.elapsed().as_secs() < 30);
    let exact = exact_cell_averages(&sol.measure, 2.0, |x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI));
    let err = sup_gap(&exact, &sol.measure.density);
    assert!(err <= 2e-2, "sup error {err}");
    assert!((sol.measure.density_at(0.0) - 1.0 / PI).abs() < 2e-2);
    assert_eq!(sol.support_intervals.len(), 1);
    let [lo, hi] = sol.support_intervals[0];
    let h = sol.measure.width();
    assert!((hi - 2.0).abs() <= h && (lo + 2.0).abs() <= h, "{lo} {hi}");
    assert!(sol.residual <= 1e-3);
    assert!(sol.energies.windows(2).all(|w| w[1] <= w[0]));
    assert!((sol.measure.total_mass() - 1.0).abs() < 1e-10);
    assert!(sol.measure.asymmetry() < 1e-6);

    let (q, r, gap) = density_from_curve(&v, &sol.measure);
    assert!((q.coeff(0) - 1.0).abs() < 1e-3 && q.degree() == 0, "{q}");
    assert!((r.coeff(2) - 0.25).abs() < 1e-12 && (r.coeff(0) + 1.0).abs() < 1e-3);
    assert!(gap <= 2e-2, "{gap}");
}

#[test]
fn grid_refinement_converges() {
    let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
    let rho = |x: f64| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI);
    let mut errs = Vec::new();
    for cells in [100, 200, 400] {
        let sol = solve_one_matrix(&v, &grid(cells), 20_000, 1e-3).unwrap();
        let exact = exact_cell_averages(&sol.measure, 2.0, rho);
        // interior sup error, away from the square-root edges
        let err = (0..cells)
            .filter(|&i| sol.measure.center(i).abs() < 1.5)
            .map(|i| (exact[i] - sol.measure.density[i]).abs())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    let order = (errs[0] / errs[2]).log2() / 2.0;
    assert!(order >= 1.0, "observed order {order} from {errs:?}");
}

#[test]
fn double_well_critical_density() {
    // equilibrium density of x⁴/4 − x²: (1/2π) x² √(4 − x²)
    let sol = solve_one_matrix(&double_well(1.0), &grid(400), 20_000, 1e-3).unwrap();
    let exact = exact_cell_averages(&sol.measure, 2.0, |x| x * x * (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI));
    let err = sup_gap(&exact, &sol.measure.density);
    assert!(err <= 2e-2, "sup error {err}");
    let (_, _, gap) = density_from_curve(&double_well(1.0), &sol.measure);
    assert!(gap <= 2e-2, "{gap}");
    let sing = detect_singularity(&sol, &double_well(1.0));
    let interior: Vec<_> = sing.iter().filter(|s| s.kind == SingularKind::InteriorZero).collect();
    assert_eq!(interior.len(), 1, "{sing:?}");
    assert!(interior[0].location.abs() < 0.05);
    assert!((interior[0].exponent - 2.0).abs() <= 0.3, "{sing:?}");
}

#[test]
fn double_well_gap_and_regular_phase() {
    let sol = solve_one_matrix(&double_well(1.2), &grid(400), 20_000, 1e-3).unwrap();
    assert_eq!(sol.support_intervals.len(), 2, "{:?}", sol.support_intervals);
    let sing = detect_singularity(&sol, &double_well(1.2));
    assert!(sing.iter().all(|s| s.kind != SingularKind::InteriorZero), "{sing:?}");

    let sol = solve_one_matrix(&double_well(0.8), &grid(400), 20_000, 1e-3).unwrap();
    assert_eq!(sol.support_intervals.len(), 1);
    assert!(detect_singularity(&sol, &double_well(0.8)).is_empty());
}

#[test]
fn semicircle_has_regular_edges() {
    let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
    let sol = solve_one_matrix(&v, &grid(400), 20_000, 1e-3).unwrap();
    assert!(detect_singularity(&sol, &v).is_empty());
    let edges = twomat::equilibrium::singularity::edge_exponents(&sol);
    for (_, e) in edges {
        assert!((e - 0.5).abs() < 0.2, "edge exponent {e}");
    }
}

#[test]
fn aligned_moments_of_semicircle() {
    let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
    let sol = solve_one_matrix(&v, &grid(400), 20_000, 1e-3).unwrap();
    let m = aligned_moments(&v, &sol, 4, 200).unwrap();
    // Catalan numbers
    for (k, want) in [1.0, 0.0, 1.0, 0.0, 2.0].iter().enumerate() {
        assert!((m[k] - want).abs() < 1e-6, "m{k} = {}", m[k]);
    }
}

#[test]
fn narrow_grid_is_reported() {
    let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
    let g = GridMeasure::template(-1.5, 1.5, 200, Axis::Real, 1.0).unwrap();
    assert!(matches!(
        solve_one_matrix(&v, &g, 20_000, 1e-3),
        Err(twomat::Error::GridTooNarrow { .. })
    ));
}
