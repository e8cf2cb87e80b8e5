use num_bigint::BigInt;
use thiserror::Error;

/// Errors shared across the library.
///
/// `BudgetExceeded` is the only "resource" error; everything else is a
/// validation failure of the caller's arguments. The CLI maps these two
/// classes to distinct exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("reducibility is undefined for polynomials of degree < 1")]
    DegreeTooSmall,

    #[error("balanced ternary value {value} out of range: |value| must be <= (3^{len} - 1)/2 = {bound}")]
    BtOutOfRange {
        value: BigInt,
        len: usize,
        bound: BigInt,
    },

    #[error("product window guard: N = {n} exceeds the supported maximum {max}")]
    WindowGuard { n: u32, max: u32 },

    #[error("invalid coefficient set: {0}")]
    InvalidSet(String),

    #[error("enumeration space of {size} polynomials exceeds the budget of {budget}")]
    BudgetExceeded { size: BigInt, budget: u64 },

    #[error("modulus {m} is invalid for this set: {a} and {b} collide mod {m}")]
    InvalidModulus { m: u64, a: i64, b: i64 },

    #[error("divisor count undefined for zero")]
    DivisorOfZero,

    #[error("split degree {s} out of range 1..={max} for a polynomial of degree {degree}")]
    SplitDegreeOutOfRange { s: usize, degree: usize, max: usize },

    #[error("invalid factor-endpoint key: {0}")]
    InvalidKey(String),

    #[error("sample count must be positive")]
    ZeroSamples,

    #[error("grid must be square and non-empty, got {rows} rows with widths {widths:?}")]
    BadGrid { rows: usize, widths: Vec<usize> },
}

impl Error {
    /// True for the budget guard, which gets its own CLI exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
