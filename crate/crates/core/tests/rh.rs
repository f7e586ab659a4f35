use std::f64::consts::PI;

use num_complex::Complex64;
use twomat::error::Error;
use twomat::model::airy;
use twomat::rh::psi::{q_probe, sector_index};
use twomat::rh::*;

fn hm() -> HMSolution {
    hastings_mcleod(-10.0, 8.0, 0.05).unwrap()
}

fn max_abs(m: &nalgebra::Matrix2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn jump_products_are_exactly_identity() {
    assert_eq!(jump_cycle_check(&psi_system()), 0.0);
    for (p1, p2) in [(0.1, 0.2), (0.4, 1.5), (1.0, 1.1)] {
        assert_eq!(jump_cycle_check(&tacnode_system(p1, p2).unwrap()), 0.0);
    }
    let json = serde_json::to_string(&psi_system()).unwrap();
    assert!(json.contains("[[1,0],[1,1]]"));
}

fn rk4_shoot(from: f64, to: f64, h: f64) -> Vec<(f64, f64)> {
    let (a, ap) = airy(from).unwrap();
    let f = |nu: f64, (q, p): (f64, f64)| (p, 2.0 * q * q * q + nu * q);
    let n = ((from - to) / h).round() as usize;
    let h = -(from - to) / n as f64;
    let mut y = (a, ap);
    let mut out = vec![(from, y.0)];
    for k in 0..n {
        let nu = from + k as f64 * h;
        let k1 = f(nu, y);
        let k2 = f(nu + h / 2.0, (y.0 + h / 2.0 * k1.0, y.1 + h / 2.0 * k1.1));
        let k3 = f(nu + h / 2.0, (y.0 + h / 2.0 * k2.0, y.1 + h / 2.0 * k2.1));
        let k4 = f(nu + h, (y.0 + h * k3.0, y.1 + h * k3.1));
        y = (
            y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        out.push((nu + h, y.0));
    }
    out
}

#[test]
fn hastings_mcleod_matches_leftward_shooting() {
    let hm = hastings_mcleod(-10.0, 6.0, 0.05).unwrap();
    let ai6 = airy(6.0).unwrap().0;
    assert!((hm.q[0] - ai6).abs() / ai6 < 1e-6);
    assert!(hm.residual() < 1e-8, "{}", hm.residual());
    assert!(hm.q.iter().all(|&q| q > 0.0));
    // moving left from the Airy end the Ai mode grows, so the shot is stable
    for (nu, q) in rk4_shoot(6.0, -2.0, 1e-3).into_iter().step_by(250) {
        let got = hm.eval(nu).unwrap().0;
        assert!((got - q).abs() < 1e-7, "ν={nu}: {got} vs {q}");
    }
    let (q0, qp0) = hm.eval(0.0).unwrap();
    assert!((q0 - 0.3670615515).abs() < 1e-9);
    assert!((qp0 + 0.2953721054).abs() < 1e-9);
}

#[test]
fn hastings_mcleod_grid_refinement() {
    let a = hastings_mcleod(-10.0, 8.0, 0.1).unwrap();
    let b = hastings_mcleod(-10.0, 8.0, 0.05).unwrap();
    let gap = a
        .nu_grid
        .iter()
        .map(|&nu| (a.eval(nu).unwrap().0 - b.eval(nu).unwrap().0).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-8, "{gap}");
    // far left follows √(−ν/2)
    assert!((a.eval(-10.0).unwrap().0 - 5f64.sqrt()).abs() < 1e-3);
}

#[test]
fn psi_determinant_and_all_jumps() {
    let hm = hm();
    let p = psi_solve(Complex64::from_polar(2.0, PI / 3.0), 0.0, &hm).unwrap();
    assert!((p.det() - 1.0).norm() < 1e-8);
    let sys = psi_system();
    // (ray, sector on the − side, its start, sector on the + side, its start)
    let pairs = [
        (0, 3, 0.0, 0, PI / 3.0),
        (1, 0, 2.0 * PI / 3.0, 1, PI),
        (2, 1, PI, 2, 4.0 * PI / 3.0),
        (3, 2, 5.0 * PI / 3.0, 3, 0.0),
    ];
    for nu in [-4.0, 0.0, 3.0] {
        for &(k, sm, am, sp, ap) in &pairs {
            let z = Complex64::from_polar(1.5, sys.rays[k].angle);
            let minus = psi_from(z, nu, &hm, sm, am).unwrap().matrix;
            let plus = psi_from(z, nu, &hm, sp, ap).unwrap().matrix;
            let j = sys.jump_complex(k);
            let j = nalgebra::Matrix2::new(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
            let res = max_abs(&(plus - minus * j)) / max_abs(&plus);
            assert!(res < 1e-6, "ν={nu} ray {k}: {res}");
        }
    }
}

#[test]
fn psi_path_independence_and_refusals() {
    let hm = hm();
    for nu in [-5.0, 0.0, 4.0] {
        let z = Complex64::from_polar(1.2, PI / 2.0);
        let a = psi_from(z, nu, &hm, 0, PI / 3.0).unwrap().matrix;
        let b = psi_from(z, nu, &hm, 0, 2.0 * PI / 3.0).unwrap().matrix;
        assert!(max_abs(&(a - b)) / max_abs(&a) < 1e-7);
        let w = Complex64::from_polar(1.2, 0.2);
        let c = psi_from_radius(w, nu, &hm, 3, 0.0, 4.0).unwrap().matrix;
        let d = psi_from_radius(w, nu, &hm, 3, 0.0, 9.0).unwrap().matrix;
        assert!(max_abs(&(c - d)) / max_abs(&c) < 1e-7);
    }
    let near = Complex64::from_polar(1.0, PI / 6.0 + 0.01);
    assert!(matches!(psi_solve(near, 0.0, &hm), Err(Error::SectorBoundaryTooClose { .. })));
    assert_eq!(sector_index(0.0), 3);
    assert_eq!(sector_index(PI / 2.0), 0);
}

#[test]
fn q_is_the_limit_of_the_scaled_entry() {
    let hm = hm();
    for nu in [-3.0, 0.0, 2.5] {
        let q = hm.eval(nu).unwrap().0;
        let lim = recover_q(nu, &hm, 8.0).unwrap();
        assert!((lim - q).norm() < 1e-4, "ν={nu}: {lim} vs {q}");
        // a single probe at |ζ| = 8 still carries the O(1/ζ) term
        let raw = q_probe(8.0, nu, &hm).unwrap();
        assert!((raw - q).norm() < 0.5);
    }
}

#[test]
fn kpii_properties() {
    let hm = hm();
    for nu in [-2.0, 0.0, 1.5] {
        for (x, y) in [(0.3, -0.7), (1.1, 0.2), (-0.4, -1.3)] {
            let a = kpii_kernel(x, y, nu, &hm).unwrap();
            let b = kpii_kernel(y, x, nu, &hm).unwrap();
            assert!((a - b).abs() < 1e-6);
            let inv = kpii_numerator(x, y, nu, &hm, false).unwrap();
            let adj = kpii_numerator(x, y, nu, &hm, true).unwrap();
            assert!((inv - adj).norm() < 1e-10);
        }
        let x = 0.4;
        let k3 = kpii_kernel(x, x + 1e-3, nu, &hm).unwrap();
        let k4 = kpii_kernel(x, x + 1e-4, nu, &hm).unwrap();
        let kd = kpii_kernel(x, x, nu, &hm).unwrap();
        assert!((k3 - k4).abs() < 1e-3 && (kd - k4).abs() < 1e-3);
    }
}

#[test]
fn kpii_far_right_is_minus_the_phase_derivative() {
    // q(6) ≈ 1e−5, so Ψ is close to diag(e^{−iθ}, e^{iθ}) on the real line
    // and the displayed formula gives −sin(θ(x) − θ(y)) / (π(x − y))
    let hm = hm();
    let nu = 7.0;
    let theta = |x: f64| 4.0 / 3.0 * x.powi(3) + nu * x;
    for (x, y) in [(0.5, 0.2), (-0.3, 0.1)] {
        let k = kpii_kernel(x, y, nu, &hm).unwrap();
        let free = -(theta(x) - theta(y)).sin() / (PI * (x - y));
        assert!((k - free).abs() < 1e-3, "{k} vs {free}");
    }
    let kd = kpii_kernel(0.5, 0.5, nu, &hm).unwrap();
    assert!((kd + (1.0 + nu) / PI).abs() < 1e-3);
}

/// `(1/2πi)∫ f` along the four rays of the w contour, by composite Simpson.
fn p_moment(k: i32, x: f64, s: f64) -> Complex64 {
    let rays = [(PI / 4.0, -1.0), (5.0 * PI / 4.0, -1.0), (-PI / 4.0, 1.0), (3.0 * PI / 4.0, 1.0)];
    let n = 4000;
    let h = 8.0 / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (a, o) in rays {
        let e = Complex64::from_polar(1.0, a);
        for j in 0..=n {
            let w = e * (j as f64 * h);
            let c = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
            let f = w.powi(k) * (w.powi(4) / 4.0 - s * w * w / 2.0 + x * w).exp();
            sum += f * e * o * (c * h / 3.0);
        }
    }
    sum / Complex64::new(0.0, 2.0 * PI)
}

fn q_moment(k: i32, y: f64, s: f64) -> Complex64 {
    let n = 8000;
    let h = 16.0 / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let z = Complex64::new(0.0, -8.0 + j as f64 * h);
        let c = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
        let f = z.powi(k) * (-z.powi(4) / 4.0 + s * z * z / 2.0 - y * z).exp();
        sum += f * Complex64::i() * (c * h / 3.0);
    }
    sum / Complex64::new(0.0, 2.0 * PI)
}

#[test]
fn pearcey_matches_the_integrated_form() {
    // moving the quartic derivative across 1/(z − w) gives
    // (x − y)K = p q″ − p′q′ + p″q − s p q
    for (x, y, s) in [(0.5, -0.3, 1.0), (1.0, 2.0, -2.0), (-0.7, 0.4, 0.0)] {
        let (p0, p1, p2) = (p_moment(0, x, s), p_moment(1, x, s), p_moment(2, x, s));
        let (q0, q1, q2) = (q_moment(0, y, s), q_moment(1, y, s), q_moment(2, y, s));
        let rhs = (p0 * q2 + p1 * q1 + p2 * q0 - p0 * q0 * s) / (x - y);
        let k = pearcey_kernel(x, y, s, 64).unwrap();
        assert!((k - rhs.re).abs() < 1e-8 && rhs.im.abs() < 1e-8, "{k} vs {rhs}");
    }
}

#[test]
fn pearcey_stability_and_symmetry() {
    let base = pearcey_kernel(0.0, 0.0, 0.0, 64).unwrap();
    assert!(base > 0.0);
    for (x, y, s) in [(0.3, 0.1, 0.5), (-1.0, 0.5, 2.0), (0.8, 0.8, -1.0)] {
        let a = pearcey_kernel(x, y, s, 64).unwrap();
        let b = pearcey_kernel(-x, -y, s, 64).unwrap();
        assert!((a - b).abs() < 1e-8);
        let wide = pearcey_raw(x, y, s, 128, 1.5);
        assert!((wide.re - a).abs() < 1e-8);
    }
    let gap = pearcey_kernel(0.0, 0.0, 8.0, 64).unwrap();
    assert!(gap < base);
    assert!(pearcey_kernel(0.0, 0.0, 0.0, 32).is_err());
}
