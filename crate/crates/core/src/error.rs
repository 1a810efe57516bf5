// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;
use alloc::vec::Vec;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point set must contain at least one label")]
    EmptyPointSet,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("non-square kernel: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("vector has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("kernels are defined over different point sets")]
    PointSetMismatch,
    #[error("defect kind `{kind}` takes {expected} kernel(s), got {found}")]
    KernelCount {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("not a Sincov solution within {tolerance:e}: defect {defect:e} at {witness:?}")]
    NotSincov {
        defect: f64,
        witness: [String; 3],
        tolerance: f64,
    },
    #[error("diagonal at base `{label}` is {value}, expected 1")]
    BaseDiagonal { label: String, value: f64 },
    #[error("vanishing factor at `{0}`")]
    VanishingFactor(String),
    #[error("negative cycle {cycle:?} with weight {weight}")]
    NegativeCycle { cycle: Vec<String>, weight: f64 },
    #[error("constant must be nonnegative, got {0}")]
    NegativeConstant(f64),
    #[error("potential family is empty")]
    EmptyFamily,
    #[error("entry at ({row}, {col}) must be positive, got {value}")]
    NonPositive { row: usize, col: usize, value: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("sample needs at least 2 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("sample value {value} at index {index} outside declared bounds [{lo}, {hi}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("samples are on different grids")]
    GridMismatch,
    #[error("zero vector")]
    ZeroVector,
    #[error("vectors have different dimensions")]
    DimensionMismatch,
    #[error("middle vector must have unit norm, got {0}")]
    NotUnitNorm(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
