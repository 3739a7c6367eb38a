use thiserror::Error;

use crate::rational::ParseRationalError;

/// Crate-wide error type.  Validation failures carry enough context to point
/// at the offending site, label, or dimension.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular (rank {rank} of {dim})")]
    Singular { rank: usize, dim: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("site must offer at least one measurement")]
    NoMeasurements,

    #[error("measurement {measurement} has {outcomes} outcomes; at least 2 are required")]
    TooFewOutcomes { measurement: usize, outcomes: usize },

    #[error("system must contain at least one site")]
    NoSites,

    #[error("dimension overflow while sizing the system")]
    DimensionOverflow,

    #[error("invalid effect label at site {site}: measurement {measurement}, outcome {outcome}")]
    InvalidLabel {
        site: usize,
        measurement: usize,
        outcome: usize,
    },

    #[error("label belongs to a {found}-site system, expected {expected} sites")]
    LabelArity { expected: usize, found: usize },

    #[error("invalid setting {setting} at site {site} (site has {measurements} measurements)")]
    InvalidSetting {
        site: usize,
        setting: usize,
        measurements: usize,
    },

    #[error("invalid outcome {outcome} at site {site} for setting {setting}")]
    InvalidOutcome {
        site: usize,
        setting: usize,
        outcome: usize,
    },

    #[error("duplicate table entry for settings {settings:?}, outcomes {outcomes:?}")]
    DuplicateTableEntry {
        settings: Vec<usize>,
        outcomes: Vec<usize>,
    },

    #[error("incomplete table: {found} of {expected} entries (first missing: settings {missing_settings:?}, outcomes {missing_outcomes:?})")]
    IncompleteTable {
        expected: usize,
        found: usize,
        missing_settings: Vec<usize>,
        missing_outcomes: Vec<usize>,
    },

    #[error("table is not normalized for settings {settings:?}: entries sum to {total}")]
    NotNormalized { settings: Vec<usize>, total: String },

    #[error("table is signalling at site {site}: marginal for settings {settings:?} changes when the site's setting moves to {alt_setting} (fixed outcomes {context_outcomes:?}: {lhs} vs {rhs})")]
    Signalling {
        site: usize,
        settings: Vec<usize>,
        alt_setting: usize,
        context_outcomes: Vec<usize>,
        lhs: String,
        rhs: String,
    },

    #[error("not a valid state: effect {label} reads {value}")]
    InvalidState { label: String, value: String },

    #[error(
        "affine dimension {dim} exceeds the enumeration guard {guard}; raise the bound to proceed"
    )]
    DimensionGuard { dim: usize, guard: usize },

    #[error("system has {effects} extremal effects, above the search bound {bound}; raise the bound to proceed")]
    SearchBound { effects: usize, bound: usize },

    #[error("invalid permutation: {reason}")]
    BadPermutation { reason: String },

    #[error("map is not invertible")]
    NotInvertible,

    #[error("map is not allowed: {reason}")]
    NotAllowed { reason: String },

    #[error("expected {expected}, found {found}")]
    WrongSystem { expected: String, found: String },

    #[error("invalid rational: {0}")]
    ParseRational(#[from] ParseRationalError),

    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Format(String),
}
