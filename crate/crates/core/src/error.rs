use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Mathematical negatives that callers are expected to branch on (for example a
/// non-admissible pair in [`crate::admissibility::check_admissible`]) are
/// reported in the returned report instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("function vanishes on the unit circle (nearest root distance {distance:.3e}); roots near the circle: {roots:?}")]
    ZeroOnCircle { distance: f64, roots: Vec<(f64, f64)> },

    #[error("identically zero function")]
    Degenerate,

    #[error("input is not a real trigonometric polynomial (asymmetry {0:.3e})")]
    NotReal(f64),

    #[error("normalization g(1) = 0 impossible: u(1) = {0:.3e}")]
    NormalizationImpossible(f64),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("w-elimination matrix is singular (condition number {0:.3e})")]
    SingularElimination(f64),

    #[error("pair is not admissible: {0}")]
    NotAdmissible(String),

    #[error("near-singular reduced symbol at sample {index} (zeta = {re:.6} + {im:.6}i, condition {cond:.3e})")]
    SingularSymbol { index: usize, re: f64, im: f64, cond: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("constant disc: a stationary lift needs nonconstant h or g")]
    ConstantDisc,

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:.3e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("truncation saturated: top coefficients carry {ratio:.3e} of the norm; increase N")]
    TruncationSaturated { ratio: f64 },

    #[error("family collapse: constrained system has rank {rank} < {expected}")]
    FamilyCollapse { rank: usize, expected: usize },

    #[error("operation requires the unperturbed model")]
    ModelOnly,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
