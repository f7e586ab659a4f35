//! The acceptance suite as library code, shared by the test target and the CLI.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biorthogonal::{bimoments, bimoments_with_precision, biorthogonal_family, OneMatrixKernel};
use crate::equilibrium::one_matrix::solve_one_matrix;
use crate::equilibrium::singularity::{detect_singularity, SingularKind};
use crate::equilibrium::vector::{default_grids, wide_grids};
use crate::equilibrium::{solve_vector_equilibrium, Axis, GridMeasure};
use crate::error::Result;
use crate::model::quadrature::QuadratureRule;
use crate::model::{Polynomial, PotentialPair};
use crate::rh::psi::q_probe;
use crate::rh::{
    airy_kernel, hastings_mcleod, jump_cycle_check, pearcey_kernel, pearcey_raw, psi_from, psi_solve, psi_system,
    recover_q, sine_kernel, tacnode_system,
};
use crate::sampler::{pooled, sample_m1, wasserstein1, ChainParams};
use crate::spectral::examples::{example2_analysis, solver_curve, CurveExample};
use crate::spectral::{
    classify_phase, root_multiplicity, sheet_structure, straddling_pairs, xi_from_mu1, BivariateCurve, Phase,
    DEFAULT_MULTIPLICITY_TOL, DEFAULT_PHASE_TOL,
};

pub const CRITERIA: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub details: Vec<String>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "AC{:<2} {verdict} {}", self.id, self.title)?;
        if let Some(first) = self.details.first() {
            write!(f, ": {first}")?;
        }
        Ok(())
    }
}

struct Builder {
    id: usize,
    title: &'static str,
    passed: bool,
    details: Vec<String>,
}

impl Builder {
    fn new(id: usize, title: &'static str) -> Self {
        Builder {
            id,
            title,
            passed: true,
            details: Vec::new(),
        }
    }

    /// Records a measured quantity against its bound.
    fn check(&mut self, label: &str, ok: bool, text: String) {
        self.passed &= ok;
        let mark = if ok { "ok" } else { "FAILED" };
        self.details.push(format!("{label} {text} [{mark}]"));
    }

    fn note(&mut self, text: String) {
        self.details.push(text);
    }

    fn done(self) -> CriterionReport {
        CriterionReport {
            id: self.id,
            title: self.title.to_string(),
            passed: self.passed,
            details: self.details,
        }
    }
}

fn half_square() -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, 0.5])
}

fn grid(cells: usize) -> Result<GridMeasure> {
    GridMeasure::template(-3.0, 3.0, cells, Axis::Real, 1.0)
}

fn cell_sup_error(g: &GridMeasure, r: f64, rho: impl Fn(f64) -> f64) -> f64 {
    let ts = QuadratureRule::tanh_sinh(6);
    (0..g.cells)
        .map(|i| {
            let (a, b) = (g.edge(i).max(-r), g.edge(i + 1).min(r));
            let exact = if a >= b { 0.0 } else { ts.on_interval(a, b).integrate(&rho) / g.width() };
            (exact - g.density[i]).abs()
        })
        .fold(0.0, f64::max)
}

pub fn ac1() -> Result<CriterionReport> {
    let mut b = Builder::new(1, "semicircle equilibrium");
    let start = Instant::now();
    let sol = solve_one_matrix(&half_square(), &grid(400)?, 20_000, 1e-3)?;
    let secs = start.elapsed().as_secs_f64();
    let err = cell_sup_error(&sol.measure, 2.0, |x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI));
    b.check("sup error", err <= 2e-2, format!("{err:.3e} ≤ 2e-2"));
    b.check("runtime", secs <= 30.0, format!("{secs:.2} s ≤ 30 s"));
    Ok(b.done())
}

pub fn ac2() -> Result<CriterionReport> {
    let mut b = Builder::new(2, "double-well equilibrium");
    let v = Polynomial::new(vec![0.0, 0.0, -1.0, 0.0, 0.25]);
    let sol = solve_one_matrix(&v, &grid(400)?, 20_000, 1e-3)?;
    let stated = cell_sup_error(&sol.measure, 2f64.sqrt(), |x| 2.0 / PI * x * x * (2.0 - x * x).max(0.0).sqrt());
    b.check("sup error vs (2/π)x²√(2−x²)", stated <= 2e-2, format!("{stated:.3e} ≤ 2e-2"));
    let exact = cell_sup_error(&sol.measure, 2.0, |x| x * x * (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI));
    b.note(format!("sup error vs (1/2π)x²√(4−x²), the density that solves the variational problem: {exact:.3e}"));
    let sing = detect_singularity(&sol, &v);
    let interior: Vec<_> = sing
        .iter()
        .filter(|s| s.kind == SingularKind::InteriorZero && s.location.abs() < 0.1)
        .collect();
    match interior.first() {
        Some(s) => b.check(
            "interior exponent",
            (s.exponent - 2.0).abs() <= 0.3,
            format!("{:.3} at {:.3}, want 2 ± 0.3", s.exponent, s.location),
        ),
        None => b.check("interior exponent", false, "no interior zero found".into()),
    }
    Ok(b.done())
}

pub fn ac3() -> Result<CriterionReport> {
    let mut b = Builder::new(3, "phase diagram");
    let labels = [
        ((2.0, 0.8), Phase::I),
        ((1.0, 3.0), Phase::II),
        ((-2.0, 3.0), Phase::III),
        ((-2.3, 0.2), Phase::IV),
        ((-1.0, 1.0), Phase::Multicritical),
    ];
    for ((alpha, tau), want) in labels {
        let got = classify_phase(alpha, tau, DEFAULT_PHASE_TOL)?.case;
        b.check(&format!("({alpha}, {tau})"), got == want, format!("{got}, want {want}"));
    }
    let pairs = straddling_pairs(10, 1e-3)?;
    let good = pairs.iter().filter(|p| p.toggles_as_expected()).count();
    b.check("straddling pairs", good == pairs.len(), format!("{good}/{} toggle as expected", pairs.len()));
    Ok(b.done())
}

fn multicritical_curve() -> BivariateCurve {
    BivariateCurve::new(vec![vec![0.0, 0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, -1.0], vec![1.0]])
}

pub fn ac4() -> Result<CriterionReport> {
    let mut b = Builder::new(4, "multicritical curve");
    let ex = CurveExample::One;
    let curve = solver_curve(&ex.w(ex.tau()), ex.tau())?;
    let d = curve.distance(&multicritical_curve());
    b.check("coefficient distance", d <= 1e-3, format!("{d:.3e} ≤ 1e-3"));
    let sol = solve_vector_equilibrium(-1.0, 1.0, &half_square(), wide_grids(4.0, 32.0, 400)?, 5000, 1e-3)?;
    let target = multicritical_curve();
    // ±3 lies on the support (its edge is 16/(3√3) ≈ 3.08), so ±3.5 is used
    for z in [Complex64::new(0.0, 2.0), Complex64::new(3.5, 0.0), Complex64::new(-3.5, 0.0)] {
        let xi = xi_from_mu1(z, &half_square(), &sol.mu1)?;
        let scale = [xi.powi(4).norm(), (z * xi.powi(3)).norm(), (z * z).norm()]
            .into_iter()
            .fold(0.0, f64::max);
        let res = target.eval(z, xi).norm() / scale;
        b.check(&format!("ξ residual at z = {z}"), res <= 1e-3, format!("{res:.3e} ≤ 1e-3"));
    }
    b.note(format!("all sheets meet at the origin: {}", sheet_structure(&sol).all_sheets_meet_at_origin()));
    Ok(b.done())
}

pub fn ac5() -> Result<CriterionReport> {
    let mut b = Builder::new(5, "quadruple root of the cubic example");
    let ex = CurveExample::Three;
    let curve = solver_curve(&ex.w(ex.tau()), ex.tau())?;
    let (x0, xi0, want) = ex.marked_point();
    let m = root_multiplicity(&curve, x0, xi0, DEFAULT_MULTIPLICITY_TOL)?;
    b.check(
        "multiplicity",
        m == want,
        format!("{m} at (x, ξ) = ({x0:.7}, {xi0}), want {want}"),
    );
    Ok(b.done())
}

pub fn ac6() -> Result<CriterionReport> {
    let mut b = Builder::new(6, "sextuple root of the quintic-derivative example");
    let rep = example2_analysis(DEFAULT_MULTIPLICITY_TOL)?;
    let displayed = rep.displayed_reproduces();
    b.check(
        "displayed potential gives multiplicity 6",
        displayed,
        format!("{displayed} at τ ∈ {{2^(-1/3), 2^(-2/3)}}"),
    );
    for r in &rep.rows {
        let table: Vec<String> = r.derivatives.iter().map(|d| format!("{d:.2e}")).collect();
        b.note(format!(
            "{:?} τ={} multiplicity {} |∂ʲE(0,0)|/scale = [{}]",
            r.reading,
            r.tau_label,
            r.multiplicity,
            table.join(", ")
        ));
    }
    match rep.sextuple().next() {
        Some(r) => b.note(format!("multiplicity 6 found for reading {:?} at τ = {}", r.reading, r.tau_label)),
        None => b.note("no reading gives multiplicity 6".into()),
    }
    Ok(b.done())
}

pub fn ac7() -> Result<CriterionReport> {
    let mut b = Builder::new(7, "sampler vs equilibrium");
    let start = Instant::now();
    let sol = solve_vector_equilibrium(0.0, 1.0, &half_square(), default_grids(400), 5000, 5e-3)?;
    let samples = sample_m1(0.0, 1.0, 99, 2024, ChainParams { steps: 200, burnin: 200 })?;
    let w = wasserstein1(&pooled(&samples), &sol.mu1);
    let secs = start.elapsed().as_secs_f64();
    b.check("Wasserstein-1", w <= 0.05, format!("{w:.4} ≤ 0.05 over {} samples", samples.len()));
    b.check("runtime", secs <= 300.0, format!("{secs:.1} s ≤ 300 s"));
    Ok(b.done())
}

/// Monic Hermite polynomials for `e^{−n x²/2}`.
fn scaled_hermite(n: usize, size: usize) -> Vec<Polynomial> {
    let x = Polynomial::monomial(1, 1.0);
    let mut out = vec![Polynomial::constant(1.0), x.clone()];
    for k in 1..size {
        let next = &(&x * &out[k]) - &out[k - 1].scale(k as f64 / n as f64);
        out.push(next);
    }
    out.truncate(size);
    out
}

pub fn ac8() -> Result<CriterionReport> {
    let mut b = Builder::new(8, "biorthogonal structure");
    let pp = PotentialPair::quartic(half_square(), 0.0, 1.0)?;
    let fam = biorthogonal_family(&bimoments(&pp, 6, 12)?)?;
    b.check("biorthogonality residual", fam.residual <= 1e-8, format!("{:.3e} ≤ 1e-8", fam.residual));
    let z = fam.check_zeros();
    b.check(
        "zeros",
        z.all_real && z.simple && z.interlacing,
        format!("real {} simple {} interlacing {}", z.all_real, z.simple, z.interlacing),
    );
    // the pairing has rank one at τ = 0 itself, so the limit is taken at τ = 1e−8
    let weak = PotentialPair::quartic(half_square(), 0.0, 1e-8)?;
    let fam0 = biorthogonal_family(&bimoments_with_precision(&weak, 6, 12, 704)?)?;
    let gap = fam0
        .p_coeffs
        .iter()
        .zip(scaled_hermite(6, 12))
        .flat_map(|(p, h)| {
            (0..=p.degree().max(h.degree()))
                .map(|k| (p.coeff(k) - h.coeff(k)).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    b.check("τ → 0 vs Hermite", gap <= 1e-6, format!("{gap:.3e} ≤ 1e-6 at τ = 1e-8"));
    Ok(b.done())
}

pub fn ac9() -> Result<CriterionReport> {
    let mut b = Builder::new(9, "universality desk checks");
    let n = 60;
    let nf = n as f64;
    let k = OneMatrixKernel::new(&half_square(), n, n)?;
    let pts: Vec<f64> = (0..=20).map(|j| -1.0 + 0.1 * j as f64).collect();
    let rho0 = 1.0 / PI;
    let s = nf.powf(2.0 / 3.0);
    let (mut bulk, mut edge): (f64, f64) = (0.0, 0.0);
    for &u in &pts {
        for &v in &pts {
            let kb = k.eval(u / (nf * rho0), v / (nf * rho0)) / (nf * rho0);
            bulk = bulk.max((kb - sine_kernel(u, v)).abs());
            let ke = k.eval(2.0 + u / s, 2.0 + v / s) / s;
            edge = edge.max((ke - airy_kernel(u, v)?).abs());
        }
    }
    b.check("bulk vs sine", bulk <= 0.05, format!("{bulk:.3e} ≤ 0.05 on [−1,1]²"));
    b.check("edge vs Airy", edge <= 0.1, format!("{edge:.3e} ≤ 0.1 on [−1,1]²"));
    Ok(b.done())
}

pub fn ac10() -> Result<CriterionReport> {
    let mut b = Builder::new(10, "Painlevé II stack");
    let hm = hastings_mcleod(-10.0, 8.0, 0.05)?;
    let (q6, _) = hm.eval(6.0)?;
    let ai6 = crate::model::airy(6.0)?.0;
    let rel = (q6 - ai6).abs() / ai6;
    b.check("q(6) vs Ai(6)", rel <= 1e-6, format!("relative {rel:.3e} ≤ 1e-6"));
    let res = hm.residual();
    b.check("ODE residual", res <= 1e-8, format!("{res:.3e} ≤ 1e-8"));
    let z = Complex64::from_polar(1.5, 5.0 * PI / 6.0);
    let minus = psi_from(z, 0.0, &hm, 0, 2.0 * PI / 3.0)?.matrix;
    let plus = psi_from(z, 0.0, &hm, 1, PI)?.matrix;
    let j = psi_system().jump_complex(1);
    let j = nalgebra::Matrix2::new(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
    let jump = (plus - minus * j).iter().map(|c| c.norm()).fold(0.0, f64::max);
    b.check("jump across Γ₂", jump <= 1e-6, format!("{jump:.3e} ≤ 1e-6"));
    let det = (psi_solve(Complex64::from_polar(2.0, PI / 3.0), 0.0, &hm)?.det() - 1.0).norm();
    b.check("det Ψ", det <= 1e-8, format!("{det:.3e} ≤ 1e-8"));
    let q0 = hm.eval(0.0)?.0;
    let lim = recover_q(0.0, &hm, 8.0)?;
    let gap = (lim - q0).norm();
    b.check("q from Ψ₁₂", gap <= 1e-4, format!("{gap:.3e} ≤ 1e-4 (limit in 1/ζ from |ζ| ≥ 8, factor 2i)"));
    let raw = (q_probe(8.0, 0.0, &hm)? - q0).norm();
    b.note(format!("single probe 2iζΨ₁₂e^(−iθ) at ζ = 8 differs by {raw:.3e} (the O(1/ζ) term)"));
    Ok(b.done())
}

pub fn ac11() -> Result<CriterionReport> {
    let mut b = Builder::new(11, "jump-cycle identities");
    let r1 = jump_cycle_check(&psi_system());
    b.check("RH problem 1", r1 == 0.0, format!("residual {r1}"));
    let r3 = jump_cycle_check(&tacnode_system(PI / 8.0, PI / 3.0)?);
    b.check("RH problem 3", r3 == 0.0, format!("residual {r3} at (φ₁, φ₂) = (π/8, π/3)"));
    Ok(b.done())
}

pub fn ac12() -> Result<CriterionReport> {
    let mut b = Builder::new(12, "Pearcey kernel");
    let nodes = 64;
    for s in [-1.0, 0.0, 2.0] {
        for (x, y) in [(0.0, 0.0), (0.5, -0.3), (1.2, 0.7)] {
            let label = format!("({x}, {y}, {s})");
            let coarse = pearcey_raw(x, y, s, nodes, 1.0);
            let fine = pearcey_raw(x, y, s, 2 * nodes, 1.0);
            let mirror = pearcey_raw(-x, -y, s, 2 * nodes, 1.0);
            let (dbl, im, par) = ((fine - coarse).norm(), fine.im.abs(), (fine - mirror).norm());
            b.check(
                &label,
                dbl <= 1e-8 && im <= 1e-8 && par <= 1e-8,
                format!("K = {:.10}, doubling {dbl:.1e}, imaginary {im:.1e}, parity {par:.1e}", fine.re),
            );
        }
    }
    b.note(format!("pearcey_kernel(0, 0, 0) = {:.10}", pearcey_kernel(0.0, 0.0, 0.0, nodes)?));
    Ok(b.done())
}

pub fn run(id: usize) -> CriterionReport {
    let out = match id {
        1 => ac1(),
        2 => ac2(),
        3 => ac3(),
        4 => ac4(),
        5 => ac5(),
        6 => ac6(),
        7 => ac7(),
        8 => ac8(),
        9 => ac9(),
        10 => ac10(),
        11 => ac11(),
        12 => ac12(),
        _ => {
            return CriterionReport {
                id,
                title: "unknown criterion".into(),
                passed: false,
                details: vec![format!("criteria are numbered 1..={CRITERIA}")],
            }
        }
    };
    out.unwrap_or_else(|e| CriterionReport {
        id,
        title: format!("criterion {id}"),
        passed: false,
        details: vec![format!("error: {e}")],
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=CRITERIA).map(run).collect()
}
