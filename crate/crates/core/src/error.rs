use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("endomorphism is not antisymmetric for the natural pairing (residual {residual:.3e})")]
    NotAntisymmetric { residual: f64 },

    #[error("exponential series did not converge within {terms} terms (remainder {remainder:.3e})")]
    ExpNotConverged { terms: usize, remainder: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("axiom violated: {what} (residual {residual:.3e})")]
    AxiomViolation { what: &'static str, residual: f64 },

    #[error("supplied frame is orientation reversing")]
    OrientationReversed,

    #[error("metric and complex structure do not commute (residual {residual:.3e})")]
    NotCommuting { residual: f64 },

    #[error("star operator does not match -J1 J2 (residual {residual:.3e})")]
    StarIdentity { residual: f64 },

    #[error("Newton iteration failed after {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("unsupported bidegree shift ({0}, {1})")]
    UnsupportedShift(i32, i32),

    #[error("Gram matrix of the inner product is singular")]
    SingularGram,

    #[error("order {order}: residual of previous orders is nonzero ({norm:.3e})")]
    PriorResidual { order: usize, norm: f64 },

    #[error("order {order}: rho has components outside the four admissible spaces ({norm:.3e})")]
    RhoLeakage { order: usize, norm: f64 },

    #[error("order {order}: closedness relation {relation} violated ({residual:.3e})")]
    ClosednessViolated {
        order: usize,
        relation: &'static str,
        residual: f64,
    },

    #[error("order {order}: the two Green-operator expressions for phi differ ({residual:.3e})")]
    PhiMismatch { order: usize, residual: f64 },

    #[error("order {order}: phi has components outside U^(0,n-2) ({norm:.3e})")]
    PhiGrading { order: usize, norm: f64 },

    #[error("order {order}: d^H phi does not reproduce rho ({residual:.3e})")]
    PhiReconstruction { order: usize, residual: f64 },

    #[error("beta system is singular or inconsistent (residual {residual:.3e})")]
    SingularBetaSystem { residual: f64 },

    #[error("deformation is not integrable at order {order} (residual {residual:.3e})")]
    NotIntegrable { order: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("generalized metric lost positivity at t = {t}")]
    PositivityLost { t: f64 },
}
