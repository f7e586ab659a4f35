use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations (tolerance {tol:.1e})")]
    NotConverged {
        residual: f64,
        iterations: usize,
        tol: f64,
    },
    #[error("grid too narrow: {mass:.3e} mass sits in the two outermost cells")]
    GridTooNarrow { mass: f64 },
    #[error("infeasible constraint: ceiling carries mass {available:.4} < required {required:.4}; enlarge the grid")]
    InfeasibleConstraint { available: f64, required: f64 },
    #[error("invalid effective potential: {0}")]
    InvalidEffectivePotential(String),
    #[error("bimoment size {size} exceeds the supported maximum {max}")]
    SizeTooLarge { size: usize, max: usize },
    #[error("weight is not confining: {0}")]
    NonConfiningWeight(String),
    #[error("leading principal minor {index} vanishes at {bits} bits; raise the working precision")]
    SingularMinor { index: usize, bits: usize },
    #[error("second derivative of the effective potential at 0 is {0}, expected negative")]
    NonNegativeSecondDerivative(f64),
    #[error("point {0} is closer than two cell widths to the support")]
    TooCloseToSupport(String),
    #[error("quadrature did not converge: node doubling changed the value by {change:.3e}")]
    QuadratureNotConverged { change: f64 },
    #[error("evaluation point lies within {angle:.3} rad of a jump ray")]
    SectorBoundaryTooClose { angle: f64 },
    #[error("start radius {radius} too small for the asymptotic expansion (error {error:.2e})")]
    RadiusInsufficient { radius: f64, error: f64 },
    #[error("argument {0} outside the supported domain")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors caused by numerical non-convergence rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::SingularMinor { .. }
                | Error::RadiusInsufficient { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
