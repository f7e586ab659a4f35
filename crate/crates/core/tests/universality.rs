use std::f64::consts::PI;

use twomat::biorthogonal::OneMatrixKernel;
use twomat::model::Polynomial;
use twomat::rh::{airy_kernel, sine_kernel};

fn grid() -> Vec<f64> {
    (0..=20).map(|k| -1.0 + 0.1 * k as f64).collect()
}

#[test]
fn hermite_kernel_bulk_and_edge_limits() {
    let n = 60;
    let k = OneMatrixKernel::new(&Polynomial::new(vec![0.0, 0.0, 0.5]), n, n).unwrap();
    let nf = n as f64;
    let rho0 = 1.0 / PI;
    let mut bulk: f64 = 0.0;
    let mut edge: f64 = 0.0;
    let s = nf.powf(2.0 / 3.0);
    for &a in &grid() {
        for &b in &grid() {
            let kb = k.eval(a / (nf * rho0), b / (nf * rho0)) / (nf * rho0);
            bulk = bulk.max((kb - sine_kernel(a, b)).abs());
            let ke = k.eval(2.0 + a / s, 2.0 + b / s) / s;
            edge = edge.max((ke - airy_kernel(a, b).unwrap()).abs());
        }
    }
    println!("bulk {bulk:.3e} edge {edge:.3e}");
    assert!(bulk <= 0.05);
    assert!(edge <= 0.1);
}
