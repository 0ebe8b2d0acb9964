use thiserror::Error;

/// Errors across parameter algebra, oracles, discretization, solver and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate exponent: b = gamma - 1/(p-1) vanishes (gamma {gamma}, p {p})")]
    DegenerateB { gamma: f64, p: f64 },

    #[error("bad exponent: {0}")]
    BadExponent(String),

    #[error("parameter point (n={n}, p={p}, b={b}) outside the admissible regime for {what}")]
    OutOfRangeRegime { n: u32, p: f64, b: f64, what: &'static str },

    #[error("ln_gamma requires a positive argument, got {0}")]
    NonPositiveArgument(f64),

    #[error("inconsistent pair: {0}")]
    RangeMismatch(String),

    #[error("bad mesh: {0}")]
    BadMesh(String),

    #[error("field length {got} does not match grid with {want} cells")]
    LengthMismatch { got: usize, want: usize },

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("point |x| = {r} lies outside the support (radius {radius})")]
    OutsideSupport { r: f64, radius: f64 },

    #[error("density is identically zero; cannot normalize")]
    EmptyDensity,

    #[error("need at least {want} records, got {got}")]
    TooFewRecords { got: usize, want: usize },

    #[error("state sequence mismatch: {0}")]
    MismatchedStates(String),

    #[error("no diffusive activity; time step is unconstrained")]
    StagnantState,

    #[error("non-finite value in state at t = {t} (cell {cell})")]
    NonFiniteState { t: f64, cell: usize },

    #[error("step budget {0} exceeded before reaching target time")]
    StepBudgetExceeded(u64),

    #[error("bad config: {0}")]
    BadConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the harness maps this error to:
    /// 2 for configuration problems, 3 for numerical aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFiniteState { .. }
            | Error::StepBudgetExceeded(_)
            | Error::StagnantState => 3,
            _ => 2,
        }
    }
}
