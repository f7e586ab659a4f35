pub mod grid;
pub mod logkernel;
pub mod one_matrix;
pub mod projection;
pub mod qp;
pub mod singularity;
pub mod supports;
pub mod vector;

pub use grid::{Axis, GridMeasure};
pub use one_matrix::{density_from_curve, solve_one_matrix, OneMatrixSolution};
pub use supports::Endpoints;
pub use vector::{solve_vector_equilibrium, variational_residuals, VectorEquilibriumSolution};
