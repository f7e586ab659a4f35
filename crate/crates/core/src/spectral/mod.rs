pub mod curve;
pub mod examples;
pub mod phase;
pub mod sheets;
pub mod xi;

pub use curve::{
    derivative_table, root_multiplicity, shift_quadratic, spectral_curve_from_moments, spectral_curve_quadratic_v,
    tau_critical, w_effective, BivariateCurve, CurveExport, DEFAULT_MULTIPLICITY_TOL,
};
pub use phase::{classify_phase, straddling_pairs, Phase, PhasePoint, StraddlePair, DEFAULT_PHASE_TOL};
pub use sheets::{sheet_structure, Cut, SheetStructure};
pub use xi::xi_from_mu1;
