//! Error type shared across the library and the CLI.

use thiserror::Error;

/// All failure modes of the library.
#[derive(Debug, Error)]
pub enum NjcError {
    /// A model parameter is outside its allowed range.
    #[error("validation error: {0}")]
    Validation(String),

    /// Truncating an initial state would discard too much probability mass.
    #[error("truncated tail mass {mass:.3e} exceeds the 1e-12 budget; raise n_max")]
    TailTooHeavy { mass: f64 },

    /// A Fock index beyond the configured cutoff was requested.
    #[error("Fock index {n} exceeds cutoff n_max = {n_max}")]
    IndexBeyondCutoff { n: usize, n_max: usize },

    /// Operator/state dimensions do not match.
    #[error("dimension mismatch: operator is {op} x {op}, state has {state} amplitudes")]
    DimensionMismatch { op: usize, state: usize },

    /// The critical detuning only exists for a nonzero Kerr term.
    #[error(
        "critical detuning requires k > 0 (the Rabi frequency has no interior minimum at k = 0)"
    )]
    KerrTermRequired,

    /// Dressed-state mixing angles are undefined on a degenerate block.
    #[error("block n = {n} is degenerate (Omega_n = 0); mixing angles are undefined")]
    DegenerateBlock { n: usize },

    /// The revival-time denominator vanishes (divergent revival time).
    #[error("revival time diverges: |2*A*nbar + A + B| = {denominator:.3e} < 1e-30")]
    NoRevivalScale { denominator: f64 },

    /// Mandel Q is undefined for a vacuum-only distribution.
    #[error("Mandel Q undefined: distribution has zero mean photon number")]
    VacuumOnly,

    /// A time grid with no samples was supplied.
    #[error("time grid is empty")]
    EmptyGrid,

    /// Scenario text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A non-finite value appeared where output must be finite.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Filesystem failure while emitting outputs.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl NjcError {
    /// Process exit code for the CLI: 0 is success, 2 validation/parse,
    /// 3 numerical, 1 everything else (I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            NjcError::Validation(_)
            | NjcError::Parse { .. }
            | NjcError::TailTooHeavy { .. }
            | NjcError::IndexBeyondCutoff { .. }
            | NjcError::DimensionMismatch { .. }
            | NjcError::KerrTermRequired
            | NjcError::DegenerateBlock { .. }
            | NjcError::NoRevivalScale { .. }
            | NjcError::VacuumOnly
            | NjcError::EmptyGrid => 2,
            NjcError::Numerical(_) => 3,
            NjcError::Io(_) => 1,
        }
    }
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, NjcError>;
