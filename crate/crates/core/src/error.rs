use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is not split regular: two roots share an absolute value")]
    NotSplitRegular,
    #[error("constant coefficient {0} is not a unit")]
    NotUnit(i64),
    #[error("polynomial is reducible over the rationals")]
    Reducible,
    #[error("polynomial is not totally real (discriminant {0})")]
    NotTotallyReal(i128),
    #[error("enclosure straddles the bound {bound} at {precision} bits")]
    UndecidableAtBound { bound: f64, precision: u32 },
    #[error("box enumeration would visit about {estimate:.3e} points (cap {cap})")]
    BoxTooLarge { estimate: f64, cap: u64 },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("non-integral class number: {num}/{den}")]
    NonIntegralResult { num: u128, den: u128 },
    #[error("division by zero (split singular input)")]
    DivisionByZero,
    #[error("incomplete factorization: unfactored square part above {bound}")]
    Incomplete { bound: u64 },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("decay metadata missing; no tail bound available")]
    TailBoundUnavailable,
    #[error("adaptive quadrature did not converge (estimate {estimate:.3e})")]
    QuadratureNotConverged { estimate: f64 },
    #[error("derivative unavailable")]
    DerivativeUnavailable,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
