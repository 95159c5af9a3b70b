use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Error)]
pub enum Error {
    /// `y_j - Y12` vanishes while `alpha_j` does not, so `alpha_j^2 / (y_j - Y12)` is undefined.
    #[error("degenerate lift: y{j} - Y12 = {gap:e} but alpha{j} = {alpha:e}")]
    DegenerateLift { j: usize, gap: f64, alpha: f64 },

    #[error("point is not a member: {0}")]
    NotMember(Report),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A structural fact that always holds in exact arithmetic failed beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Structural(String),

    #[error("repair postcondition failed: {0}")]
    RepairFailed(Report),

    #[error("solver did not converge after {iterations} iterations (gap {gap:e}, best {best:e})")]
    NonConvergence { iterations: usize, gap: f64, best: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
