use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("elements belong to different fields (a = {left} vs a = {right})")]
    FieldMismatch { left: String, right: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("internal error: {0}")]
    Internal(String),
    #[error("defining constant must be nonzero")]
    ZeroConstant,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("prime {p} divides 2a; X^8 - a is not separable there")]
    RamifiedPrime { p: u64 },
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: u64 },
    #[error("{r}^8 is not congruent to a modulo {p}")]
    NotARoot { p: u64, r: u64 },
    #[error("element is not integral at the prime ({p}, {r}): a denominator is divisible by {p}")]
    NotIntegral { p: u64, r: u64 },
    #[error("unit reduces to zero modulo ({p}, {r}); invalid prime for this unit")]
    ZeroReduction { p: u64, r: u64 },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("a = {0} is a perfect eighth power; X^8 - a is not a field of degree 8")]
    EighthPower(String),
    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { bits: u32, what: String },
    #[error("expected {expected} free unit generators, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("no rational with denominator at most {max_den} lies in the ball")]
    NoRational { max_den: String },
    #[error("ambiguous: at least {first} and {second} lie in the ball")]
    AmbiguousRational { first: String, second: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("generator #{index} ({element}) is not a unit: {reason}")]
    NotAUnit { index: usize, element: String, reason: String },
    #[error("subset is not a subgroup: {0}")]
    NotASubgroup(String),
}
