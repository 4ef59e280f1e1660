use alloc::string::String;
use core::fmt;

/// Every failure the kernel can report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    SizeMismatch { expected: usize, found: usize },
    NotAPermutation,
    Parse { what: &'static str, msg: String },
    PositionOutOfRange { position: usize, arity: usize },
    Inhomogeneous,
    TooManyArguments { given: usize, arity: usize },
    MissingImage(String),
    ForeignGenerator(String),
    NotADivisor,
    MalformedShape(String),
    NotEffective(String),
    ZeroElement,
    StepBound(usize),
    /// The homotopy recursion failed to strictly lower the leading monomial.
    NoDecrease(String),
    Grading(String),
    InvalidData(String),
    Unbounded(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SizeMismatch { expected, found } => {
                write!(f, "size mismatch: expected {expected}, found {found}")
            }
            Error::NotAPermutation => f.write_str("not a permutation"),
            Error::Parse { what, msg } => write!(f, "cannot parse {what}: {msg}"),
            Error::PositionOutOfRange { position, arity } => {
                write!(f, "position {position} out of range for arity {arity}")
            }
            Error::Inhomogeneous => f.write_str("inhomogeneous element"),
            Error::TooManyArguments { given, arity } => {
                write!(f, "{given} brace arguments exceed arity {arity}")
            }
            Error::MissingImage(g) => write!(f, "no image for generator {g}"),
            Error::ForeignGenerator(g) => write!(f, "generator {g} is not allowed here"),
            Error::NotADivisor => f.write_str("vertex set is not a divisor"),
            Error::MalformedShape(s) => write!(f, "malformed tree shape: {s}"),
            Error::NotEffective(t) => write!(f, "monomial {t} is not effective"),
            Error::ZeroElement => f.write_str("zero element has no leading monomial"),
            Error::StepBound(n) => write!(f, "rewriting exceeded the step bound {n}"),
            Error::NoDecrease(t) => write!(f, "homotopy recursion did not decrease at {t}"),
            Error::Grading(s) => write!(f, "grading mismatch: {s}"),
            Error::InvalidData(s) => write!(f, "invalid data: {s}"),
            Error::Unbounded(s) => write!(f, "sum has no finite bound: {s}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
