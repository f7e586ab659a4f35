use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub angle: f64,
    pub jump: IntMatrix,
}

/// Rays from the origin, oriented outward, with constant jumps `M₊ = M₋ J`
/// where the `+` side is the counterclockwise side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSystem {
    pub rays: Vec<Ray>,
    pub size: usize,
    pub angle_params: Option<(f64, f64)>,
}

fn int_det(m: &IntMatrix) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: IntMatrix = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * int_det(&minor)
        })
        .sum()
}

fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

impl JumpSystem {
    /// Validates sizes, unit determinants and the counterclockwise order.
    pub fn new(rays: Vec<Ray>, size: usize, angle_params: Option<(f64, f64)>) -> Result<Self> {
        for r in &rays {
            if r.jump.len() != size || r.jump.iter().any(|row| row.len() != size) {
                return Err(Error::Invalid(format!("jump at angle {} is not {size}×{size}", r.angle)));
            }
            let d = int_det(&r.jump);
            if d != 1 {
                return Err(Error::Invalid(format!("jump at angle {} has determinant {d}", r.angle)));
            }
            if !(0.0..2.0 * PI).contains(&r.angle) {
                return Err(Error::Invalid(format!("angle {} outside [0, 2π)", r.angle)));
            }
        }
        if rays.windows(2).any(|w| w[1].angle <= w[0].angle) {
            return Err(Error::Invalid("rays must be sorted counterclockwise with distinct angles".into()));
        }
        if let Some((p1, p2)) = angle_params {
            if !(0.0 < p1 && p1 < p2 && p2 < PI / 2.0) {
                return Err(Error::Invalid(format!("need 0 < φ₁ < φ₂ < π/2, got ({p1}, {p2})")));
            }
        }
        Ok(JumpSystem {
            rays,
            size,
            angle_params,
        })
    }

    /// Index of the ray whose jump is crossed last before reaching angle `arg`
    /// counterclockwise from the positive axis, if any.
    pub fn sector_of(&self, arg: f64) -> usize {
        let a = arg.rem_euclid(2.0 * PI);
        self.rays.iter().rposition(|r| r.angle <= a).unwrap_or(self.rays.len() - 1)
    }

    /// Smallest angular distance from `arg` to any ray.
    pub fn distance_to_rays(&self, arg: f64) -> f64 {
        self.rays
            .iter()
            .map(|r| {
                let d = (arg - r.angle).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Ordered product of the jumps in counterclockwise order.
    pub fn cycle_product(&self) -> IntMatrix {
        self.rays.iter().fold(identity(self.size), |acc, r| int_mul(&acc, &r.jump))
    }

    pub fn jump_complex(&self, k: usize) -> DMatrix<Complex64> {
        let j = &self.rays[k].jump;
        DMatrix::from_fn(self.size, self.size, |a, b| Complex64::new(j[a][b] as f64, 0.0))
    }
}

/// Max-norm distance of the ordered jump product from the identity.
pub fn jump_cycle_check(js: &JumpSystem) -> f64 {
    let p = js.cycle_product();
    let id = identity(js.size);
    p.iter()
        .zip(&id)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .max()
        .unwrap_or(0) as f64
}

fn m(rows: &[&[i64]]) -> IntMatrix {
    rows.iter().map(|r| r.to_vec()).collect()
}

/// The 2×2 system on the rays `e^{iπ/6}`, `e^{5iπ/6}`, `e^{7iπ/6}`, `e^{11iπ/6}`.
pub fn psi_system() -> JumpSystem {
    let rays = vec![
        Ray {
            angle: PI / 6.0,
            jump: m(&[&[1, 0], &[1, 1]]),
        },
        Ray {
            angle: 5.0 * PI / 6.0,
            jump: m(&[&[1, 0], &[-1, 1]]),
        },
        Ray {
            angle: 7.0 * PI / 6.0,
            jump: m(&[&[1, 1], &[0, 1]]),
        },
        Ray {
            angle: 11.0 * PI / 6.0,
            jump: m(&[&[1, -1], &[0, 1]]),
        },
    ];
    JumpSystem::new(rays, 2, None).expect("static data is valid")
}

/// The 4×4 system on ten rays at `0, φ₁, φ₂, π−φ₂, π−φ₁` and their negatives.
pub fn tacnode_system(phi1: f64, phi2: f64) -> Result<JumpSystem> {
    let angles = [
        0.0,
        phi1,
        phi2,
        PI - phi2,
        PI - phi1,
        PI,
        PI + phi1,
        PI + phi2,
        2.0 * PI - phi2,
        2.0 * PI - phi1,
    ];
    let jumps = [
        m(&[&[0, 0, 1, 0], &[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, 1]]),
        m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 0, 1, 0], &[0, 0, 0, 1]]),
        m(&[&[1, 0, 0, 0], &[-1, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 0, 1]]),
        m(&[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, -1, 1]]),
        m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, -1, 0, 1]]),
        m(&[&[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0], &[0, 1, 0, 0]]),
        m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, -1, 0, 1]]),
        m(&[&[1, -1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 1, 1]]),
        m(&[&[1, 0, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, -1], &[0, 0, 0, 1]]),
        m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[1, 0, 1, 0], &[0, 0, 0, 1]]),
    ];
    let rays = angles
        .iter()
        .zip(jumps)
        .map(|(&angle, jump)| Ray { angle, jump })
        .collect();
    JumpSystem::new(rays, 4, Some((phi1, phi2)))
}

/// Which power function a fractional exponent uses: `ζ^p` (cut on the
/// negative axis) or `(−ζ)^p` (cut on the positive axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Zeta,
    MinusZeta,
}

impl Branch {
    /// Principal `w^p` with `w = ζ` or `w = −ζ`.
    pub fn pow(&self, zeta: Complex64, p: f64) -> Complex64 {
        let w = match self {
            Branch::Zeta => zeta,
            Branch::MinusZeta => -zeta,
        };
        w.powf(p)
    }
}

/// `c₃₂ w^{3/2} + c₁₂ s w^{1/2} + c_t t ζ` for one diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub branch: Branch,
    pub c32: f64,
    pub c12: f64,
    pub ct: f64,
}

impl Exponent {
    pub fn eval(&self, zeta: Complex64, s: f64, t: f64) -> Complex64 {
        self.c32 * self.branch.pow(zeta, 1.5) + self.c12 * s * self.branch.pow(zeta, 0.5) + self.ct * t * zeta
    }
}

/// Data of the 4×4 problem behind the critical kernel. Solving it is out of
/// scope; the record holds its jumps, its large-`ζ` form and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalKernelData {
    pub jumps: JumpSystem,
    pub exponents: [Exponent; 4],
    /// Powers `p` of the prefactor `diag(w_k^p)`, with the branches of `exponents`.
    pub prefactor_powers: [f64; 4],
    pub s: f64,
    pub t: f64,
}

impl CriticalKernelData {
    pub fn new(s: f64, t: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let e = |branch, sign: f64, ct| Exponent {
            branch,
            c32: sign * 2.0 / 3.0,
            c12: sign * 2.0,
            ct,
        };
        Ok(CriticalKernelData {
            jumps: tacnode_system(phi1, phi2)?,
            exponents: [
                e(Branch::MinusZeta, -1.0, 1.0),
                e(Branch::Zeta, -1.0, -1.0),
                e(Branch::MinusZeta, 1.0, 1.0),
                e(Branch::Zeta, 1.0, -1.0),
            ],
            prefactor_powers: [-0.25, -0.25, 0.25, 0.25],
            s,
            t,
        })
    }

    /// From the double-scaling parameters `(a, b)`.
    pub fn from_scaling(a: f64, b: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let (s, t) = super::kernels::double_scaling_map(a, b);
        Self::new(s, t, phi1, phi2)
    }

    /// Leading large-`ζ` form `diag(w_k^{p_k}) · E · diag(e^{θ_k(ζ)})`.
    pub fn leading_form(&self, zeta: Complex64) -> DMatrix<Complex64> {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let r = 1.0 / 2f64.sqrt();
        let e = DMatrix::from_row_slice(
            4,
            4,
            &[one, z, -i, z, z, one, z, i, -i, z, one, z, z, i, z, one],
        ) * Complex64::new(r, 0.0);
        let left = DMatrix::from_fn(4, 4, |a, b| {
            if a == b {
                self.exponents[a].branch.pow(zeta, self.prefactor_powers[a])
            } else {
                z
            }
        });
        let right = DMatrix::from_fn(4, 4, |a, b| {
            if a == b {
                self.exponents[a].eval(zeta, self.s, self.t).exp()
            } else {
                z
            }
        });
        left * e * right
    }
}
