//! Invariance and reordering criteria, the transformation solver and the
//! summary identities.

mod ansatz;
mod invariance;
mod linsolve;
mod report;
mod solve;
mod structure;
mod summary;

use thiserror::Error;

use crate::tensor::AlgebraError;

pub use ansatz::{AnsatzKind, TransformAnsatz};
pub use invariance::{
    check_reordering, check_transform, check_xx_invariance, operator_residual, reorder_residual, residual, xx_residual,
    Target,
};
pub use linsolve::{solve as solve_linear, LinearSolution};
pub use report::{CheckReport, Mode, Status};
pub use solve::{check_ansatz, solve_report, solve_transform, TransformSolution};
pub use structure::{atom_for, Anisotropy, KappaStructure};
pub use summary::{
    check_angular_momentum, check_commutativity, check_f_commutator, check_g_model, check_kappa_model,
    check_summary_models, check_symmetricity, check_translation_generator, check_xp, commutative_g_from_f,
    commutative_model, summary_checks,
};

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("transformation is not a gradient: ∂_a L_b differs from ∂_b L_a")]
    NotIntegrable,
    #[error("unsupported system: {0}")]
    Unsupported(String),
    #[error("operator and closed-form residuals disagree for {0}")]
    DualPathMismatch(String),
    #[error("solution failed re-substitution")]
    VerificationFailed,
    #[error("precondition not met: {0}")]
    Precondition(String),
}
