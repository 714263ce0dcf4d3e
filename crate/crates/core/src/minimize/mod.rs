//! Estimation and certification of entangling power over product inputs.

pub mod descent;
pub mod estimate;
pub mod net;
pub mod objective;
pub mod pencil;

pub use descent::{DescentOptions, Direction};
pub use estimate::{
    average, estimate_pavg, estimate_pmax, estimate_pmin, min_over_subspace, reduce, AverageReport, EstimateReport,
    ProductProblem, RestartOutcome, SubspaceProblem,
};
pub use net::{certified_lower_bound, certified_lower_bound_with, CertifiedBound, NetConfig, NetSpec};
pub use objective::{Objective, ObjectiveKind};
pub use pencil::{pencil_product_count, PencilCount};
