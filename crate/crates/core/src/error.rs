//! Error type shared by the numerical modules.

use thiserror::Error;

use crate::isocheck::Verdict;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Ambient curvature below zero. Space forms with κ < 0 carry no
    /// non-trivial singular Riemannian foliations.
    #[error("negative ambient curvature κ = {0}")]
    NegativeCurvature(f64),

    #[error("invalid weight profile: {0}")]
    InvalidWeight(String),

    #[error(
        "leaf dimension mismatch at {end}: weight vanishes to order {vanishing_order}, \
         but the declared leaf-dimension drop is {dimension_drop}"
    )]
    DimensionMismatch {
        end: String,
        vanishing_order: u32,
        dimension_drop: u32,
    },

    #[error("position {theta} lies outside the leaf space [0, {length}]")]
    OutOfDomain { theta: f64, length: f64 },

    #[error("mean curvature is undefined at the singular point θ = {theta}")]
    SingularEndpoint { theta: f64 },

    #[error("not a round-sphere presentation: {0}")]
    NotASphere(String),

    #[error("inconsistent covering datum: {0}")]
    InconsistentCover(String),

    #[error("grid size {n} is below the minimum of {min}")]
    GridTooCoarse { n: usize, min: usize },

    #[error("requested {k} eigenvalues from a grid of {n} cells; at most n/4 are reported")]
    TooManyEigenvalues { k: usize, n: usize },

    #[error("eigenvalue {index} converges with observed ratio {ratio:.3}, expected 4")]
    ConvergenceSuspect { index: usize, ratio: f64 },

    #[error("unknown reference family `{0}`")]
    UnknownFamily(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("singular leaf dimension {singular} exceeds regular leaf dimension {regular}")]
    DimensionOrder { regular: u32, singular: u32 },

    #[error("unsupported weight profile: {0}")]
    UnsupportedProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The mean curvature hypothesis held but the computed spectra differ.
    /// This always indicates a numerical or modelling defect.
    #[error(
        "theorem consistency violated for {source_name} -> {target_name}: \
         hypotheses hold but max relative gap is {gap:.3e}",
        source_name = .0.source,
        target_name = .0.target,
        gap = .0.max_rel_gap
    )]
    InconsistentTheorem(Box<Verdict>),
}
