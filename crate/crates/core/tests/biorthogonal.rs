use std::time::Instant;

use twomat::biorthogonal::{bimoments, bimoments_with_precision, biorthogonal_family};
use twomat::model::{Polynomial, PotentialPair};

fn half_square() -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, 0.5])
}

/// Monic Hermite polynomials orthogonal for exp(−n x²/2): p_{k+1} = x p_k − (k/n) p_{k−1}.
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

#[test]
fn acceptance_configuration_family() {
    let pp = PotentialPair::quartic(half_square(), 0.0, 1.0).unwrap();
    let start = Instant::now();
    let b = bimoments(&pp, 6, 12).unwrap();
    let fam = biorthogonal_family(&b).unwrap();
    eprintln!("elapsed {:?} nodes {} L {} residual {:e}", start.elapsed(), b.nodes, b.half_width, fam.residual);
    assert!(fam.residual <= 1e-8);
    let z = fam.check_zeros();
    eprintln!("{z:?}");
    assert!(z.all_real && z.simple && z.interlacing);
    assert_eq!(fam.p_coeffs[1].coeffs(), &[0.0, 1.0]);
    for (k, p) in fam.p_coeffs.iter().enumerate() {
        assert_eq!(p.degree(), k);
        assert_eq!(p.leading(), 1.0);
        assert_eq!(fam.q_coeffs[k].leading(), 1.0);
        for (m, c) in p.coeffs().iter().enumerate() {
            if (k + m) % 2 == 1 {
                assert_eq!(*c, 0.0);
            }
        }
    }
}

#[test]
fn decoupled_pairing_has_no_family() {
    // at τ = 0 the pairing factorizes and has rank one, so h²₁ = 0
    let pp = PotentialPair::quartic(half_square(), 0.0, 0.0).unwrap();
    let err = biorthogonal_family(&bimoments_with_precision(&pp, 6, 4, 128).unwrap()).unwrap_err();
    assert!(matches!(err, twomat::Error::SingularMinor { index: 1, .. }), "{err:?}");
}

#[test]
fn weak_coupling_family_is_hermite() {
    let pp = PotentialPair::quartic(half_square(), 0.0, 1e-8).unwrap();
    let start = Instant::now();
    let fam = biorthogonal_family(&bimoments_with_precision(&pp, 6, 12, 704).unwrap()).unwrap();
    eprintln!("elapsed {:?}", start.elapsed());
    let herm = scaled_hermite(6, 12);
    for (p, h) in fam.p_coeffs.iter().zip(&herm) {
        for (a, b) in p.coeffs().iter().zip(h.coeffs()) {
            assert!((a - b).abs() <= 1e-6, "{p} vs {h}");
        }
    }
}

#[test]
fn doubling_precision_keeps_norms() {
    let pp = PotentialPair::quartic(half_square(), 0.0, 1.0).unwrap();
    let a = biorthogonal_family(&bimoments_with_precision(&pp, 6, 12, 256).unwrap()).unwrap();
    let b = biorthogonal_family(&bimoments_with_precision(&pp, 6, 12, 512).unwrap()).unwrap();
    for (x, y) in a.h_sq.iter().zip(&b.h_sq) {
        assert!((x / y - 1.0).abs() <= 1e-10);
    }
}

mod kernels {
    use super::*;
    use std::sync::OnceLock;
    use twomat::biorthogonal::{correlation_det, w_function, KernelKind, KernelSet, OneMatrixKernel};
    use twomat::model::quadrature::composite_gauss;

    fn size_six() -> &'static KernelSet {
        static KS: OnceLock<KernelSet> = OnceLock::new();
        KS.get_or_init(|| {
            let pp = PotentialPair::quartic(half_square(), 0.0, 1.0).unwrap();
            let fam = biorthogonal_family(&bimoments(&pp, 6, 6).unwrap()).unwrap();
            KernelSet::new(fam).unwrap()
        })
    }

    #[test]
    fn constant_family_kernel() {
        let pp = PotentialPair::quartic(half_square(), 0.0, 1.0).unwrap();
        let fam = biorthogonal_family(&bimoments_with_precision(&pp, 1, 1, 128).unwrap()).unwrap();
        let h0 = fam.h_sq[0];
        let ks = KernelSet::new(fam).unwrap();
        assert!((ks.eval(KernelKind::K12, 0.3, -1.1).unwrap() - 1.0 / h0).abs() < 1e-15);
    }

    #[test]
    fn trace_and_reproducing_property() {
        let ks = size_six();
        let rule = composite_gauss(-6.0, 6.0, 48, 16);
        let trace: f64 = rule.iter().map(|(x, w)| w * ks.k11(x, x).unwrap()).sum();
        assert!((trace - 6.0).abs() <= 1e-6, "{trace}");
        let (x1, x2) = (0.4, -1.3);
        let lhs: f64 = rule
            .iter()
            .map(|(x, w)| w * ks.k11(x1, x).unwrap() * ks.k11(x, x2).unwrap())
            .sum();
        let rhs = ks.k11(x1, x2).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn correlation_determinants() {
        let ks = size_six();
        for i in 0..41 {
            let x = -4.0 + 0.2 * i as f64;
            assert!(correlation_det(ks, &[x]).unwrap() >= 0.0);
        }
        let d1 = correlation_det(ks, &[0.5, 0.5 + 1e-3]).unwrap();
        let d2 = correlation_det(ks, &[0.5, 0.5 + 2e-3]).unwrap();
        // the first-order term cancels identically, so the decay is quadratic
        assert!(d1 > 0.0 && d1 < 1e-4);
        assert!((d2 / d1 - 4.0).abs() < 0.1, "{}", d2 / d1);
        assert!(correlation_det(ks, &[0.5, 0.5]).is_err());
        let (a, b) = (-2.0, 2.0);
        let d = correlation_det(ks, &[a, b]).unwrap();
        let prod = ks.k11(a, a).unwrap() * ks.k11(b, b).unwrap();
        assert!((d / prod - 1.0).abs() <= 0.01, "{d} vs {prod}");
    }

    #[test]
    fn w_function_matches_dense_rule() {
        let pp = PotentialPair::quartic(half_square(), 0.0, 1.0).unwrap();
        let got = w_function(1.0, 0, &pp, 1).unwrap();
        let oracle: f64 = composite_gauss(-20.0, 20.0, 4000, 10)
            .iter()
            .map(|(y, w)| w * (-(0.5 + 0.25 * y.powi(4) - y)).exp())
            .sum();
        assert!((got / oracle - 1.0).abs() <= 1e-10, "{got} vs {oracle}");
        assert_eq!(w_function(0.0, 1, &pp, 3).unwrap().abs() < 1e-15, true);
    }

    #[test]
    fn one_matrix_kernel_trace() {
        let k = OneMatrixKernel::new(&half_square(), 60, 60).unwrap();
        let trace: f64 = composite_gauss(-4.0, 4.0, 200, 16).iter().map(|(x, w)| w * k.eval(x, x)).sum();
        assert!((trace - 60.0).abs() <= 1e-6, "{trace}");
    }
}
