//! Calmness and Lipschitz upper semicontinuity moduli of the feasible set
//! mapping of finite linear inequality systems `{x : Ax <= b}`.
//!
//! Row indices are 0-based throughout the library; [`ActiveIndexSet`]'s
//! `Display` and [`ActiveIndexSet::one_based`] give 1-based labels.

pub mod corpus;
pub mod error;
pub mod geometry;
mod linalg;
pub mod lp;
pub mod model;
pub mod moduli;
pub mod polyhedron;
#[cfg(test)]
mod testing;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    end_set_distance, end_set_distance_oracle, in_end_set, min_norm_point, nearest_point,
    point_to_polyhedron_distance, EndSetDistance, HullDistance,
};
pub use lp::{lp_feasible, lp_solve, DualCertificate, LpProblem, LpResult, LpStatus};
pub use model::{
    dual_norm, inverse_image_distance, param_distance, rhs_residual, vector_norm, ExtendedNonneg,
    LinearSystem, Norm, Tolerances,
};
pub use moduli::{
    clm, clm_full, clm_rhs, lipusc, lipusc_full, lipusc_rhs, CaseTag, ClmValue, Mode,
    ModulusReport, PointWitness, SetWitness,
};
pub use polyhedron::{
    active_set, consistent_subsets, d_family, face_system, is_bounded, is_feasible, is_full_space,
    restricted_vertices, vertices, ActiveIndexSet, DFamily, DMember, VertexSet,
};
pub use verify::{
    estimate_lipusc, estimate_lipusc_full, estimate_lipusc_rhs, face_constancy_check,
    EstimateReport, EstimatorConfig, FaceReport,
};
