use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divisor has vanishing constant term (|b0| = {0:e})")]
    DivisionBySingularSeries(f64),

    #[error("inner series of a composition must vanish at 0 (|a0| = {0:e})")]
    InnerNotVanishing(f64),

    #[error("series is not normalized (expected a0 = 0, a1 = 1)")]
    NotNormalized,

    #[error("principal branch undefined: constant term {0} is not close to 1")]
    BranchUndefined(String),

    #[error("truncation order {0} exceeds the supported maximum of {max}", max = crate::series::MAX_ORDER)]
    OrderTooLarge(usize),

    #[error("Fibonacci index {0} exceeds the overflow guard (n <= 90)")]
    OverflowGuard(u32),

    #[error("angle t = {0} lies inside the excluded arc around the pole at z = -1")]
    PoleProximity(f64),

    #[error("series is not a Schwarz function: |w| = {modulus} at sample {index}")]
    NotSchwarz { index: usize, modulus: f64 },

    #[error("degenerate denominator {value:e} for {what}")]
    DegenerateDenominator { what: &'static str, value: f64 },

    #[error("invalid class parameters: {0}")]
    InvalidSpec(String),

    #[error("invalid Caratheodory data: {0}")]
    InvalidPair(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
