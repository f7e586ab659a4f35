//! Bimoments, biorthogonal polynomials and the correlation kernels of the coupled ensemble.

pub mod bimoments;
pub mod christoffel;
pub mod family;
pub mod hp;
pub mod kernels;
pub mod line;

pub use bimoments::{bimoments, bimoments_with_precision, BimomentMatrix};
pub use christoffel::{one_matrix_kernel, recurrence, OneMatrixKernel, Recurrence};
pub use family::{biorthogonal_family, BiorthogonalFamily, ZeroReport};
pub use kernels::{correlation_det, kernels, KernelKind, KernelSet};
pub use line::w_function;
