use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relations contain a directed cycle through element {element}")]
    Cycle { element: usize },
    #[error("element {index} out of range for a poset on {n} elements")]
    Index { index: usize, n: usize },
    #[error("cannot add {low} < {high}: the reverse relation already holds")]
    InconsistentRelation { low: usize, high: usize },
    #[error("size cap exceeded: {what} is {size}, cap is {cap}")]
    SizeCapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("ideal lattice exceeds the cap of {cap} ideals")]
    IdealCapExceeded { cap: usize },
    #[error("poset has {count} linear extensions, enumeration cap is {cap}")]
    EnumCapExceeded { count: String, cap: u64 },
    #[error("work budget exceeded: {needed} evaluations needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("statistic unavailable: {0}")]
    StatUnavailable(&'static str),
    #[error("point violates the order constraints: {0}")]
    Domain(String),
    #[error("sequence is not a chain: {low} < {high} fails")]
    NotAChain { low: usize, high: usize },
    #[error("invalid fractional matching at element {element}: {reason}")]
    InvalidMatching { element: usize, reason: String },
    #[error("no feasible (k, l) for r = {r}, a = {a}")]
    NoFeasibleKL { r: u64, a: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors that mean "this instance is too big", as opposed to bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::SizeCapExceeded { .. }
                | Error::IdealCapExceeded { .. }
                | Error::EnumCapExceeded { .. }
                | Error::BudgetExceeded { .. }
                | Error::StatUnavailable(_)
        )
    }
}
