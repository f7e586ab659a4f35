pub mod hm;
pub mod jumps;
pub mod kernels;
pub mod pearcey;
pub mod psi;

pub use jumps::{jump_cycle_check, psi_system, tacnode_system, CriticalKernelData, JumpSystem, Ray};
pub use kernels::{airy_kernel, double_scaling_map, sine_kernel};
pub use hm::{hastings_mcleod, HMSolution};
pub use psi::{kpii_kernel, kpii_numerator, psi_from, psi_from_radius, psi_solve, recover_q, PsiValue};
pub use pearcey::{pearcey_kernel, pearcey_raw};
