use thiserror::Error;

/// Errors raised by the pricing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A model parameter violates a type invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Too few distinct data sizes to identify three curve parameters.
    #[error("underdetermined fit: {distinct} distinct data sizes, need at least 3")]
    Underdetermined { distinct: usize },

    /// The function values at the bracket ends share a sign.
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// Subset enumeration is limited to a fixed number of players.
    #[error("{players} players exceed the enumeration limit of {limit}")]
    Capacity { players: usize, limit: usize },

    /// Allocation and game disagree on the number of players.
    #[error("allocation has {got} payoffs, game has {expected} players")]
    LengthMismatch { expected: usize, got: usize },

    /// No demand case yields a feasible bundle solution.
    #[error("degenerate bundle market: no demand case is feasible")]
    DegenerateMarket,

    /// Malformed input data.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "finite and >= 0",
        })
    }
}
