pub mod airy;
pub mod cubic;
pub mod polynomial;
pub mod potential;
pub mod quadrature;

pub use airy::airy;
pub use cubic::cubic_real_roots;
pub use polynomial::Polynomial;
pub use potential::{
    critical_points, external_field_v1, external_field_v3, sigma2_density, CriticalPoints,
    PotentialPair,
};
pub use quadrature::{QuadratureRule, RuleKind};
