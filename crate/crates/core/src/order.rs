//! Order relations over observation spaces.
//!
//! The real line carries its usual total order. `R^d` carries the
//! componentwise (Pareto) partial order, under which two points may be
//! incomparable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("NaN coordinate at position {0}")]
    NotANumber(usize),
}

/// Result of comparing two elements of a (partially) ordered space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComparisonOutcome {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl ComparisonOutcome {
    /// The outcome of `compare(y, x)` given this is `compare(x, y)`.
    pub fn reverse(self) -> Self {
        match self {
            ComparisonOutcome::Less => ComparisonOutcome::Greater,
            ComparisonOutcome::Greater => ComparisonOutcome::Less,
            other => other,
        }
    }
}

/// The four record notions: strict or non-strict, upward or downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordKind {
    StrongUpper,
    WeakUpper,
    StrongLower,
    WeakLower,
}

impl RecordKind {
    pub const ALL: [RecordKind; 4] =
        [RecordKind::StrongUpper, RecordKind::WeakUpper, RecordKind::StrongLower, RecordKind::WeakLower];

    pub fn is_strong(self) -> bool {
        matches!(self, RecordKind::StrongUpper | RecordKind::StrongLower)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, RecordKind::StrongUpper | RecordKind::WeakUpper)
    }

    /// The kind obtained by reversing the order (x -> -x).
    pub fn dual(self) -> Self {
        match self {
            RecordKind::StrongUpper => RecordKind::StrongLower,
            RecordKind::WeakUpper => RecordKind::WeakLower,
            RecordKind::StrongLower => RecordKind::StrongUpper,
            RecordKind::WeakLower => RecordKind::WeakUpper,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::StrongUpper => "strong-upper",
            RecordKind::WeakUpper => "weak-upper",
            RecordKind::StrongLower => "strong-lower",
            RecordKind::WeakLower => "weak-lower",
        }
    }
}

impl std::str::FromStr for RecordKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RecordKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown record kind `{s}`"))
    }
}

impl std::fmt::Display for RecordKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether an outcome of `compare(candidate, incumbent)` makes the
/// candidate a new record of the given kind. Incomparable never beats.
pub fn outcome_beats(kind: RecordKind, outcome: ComparisonOutcome) -> bool {
    use ComparisonOutcome::*;
    match kind {
        RecordKind::StrongUpper => outcome == Greater,
        RecordKind::WeakUpper => matches!(outcome, Greater | Equal),
        RecordKind::StrongLower => outcome == Less,
        RecordKind::WeakLower => matches!(outcome, Less | Equal),
    }
}

/// A set of observations carrying an order relation.
pub trait OrderedSpace {
    type Element: Clone + std::fmt::Debug;

    /// Rejects elements that cannot take part in comparisons.
    fn validate(&self, x: &Self::Element) -> Result<(), OrderError>;

    fn compare(&self, x: &Self::Element, y: &Self::Element) -> Result<ComparisonOutcome, OrderError>;

    fn beats(
        &self,
        kind: RecordKind,
        candidate: &Self::Element,
        incumbent: &Self::Element,
    ) -> Result<bool, OrderError> {
        Ok(outcome_beats(kind, self.compare(candidate, incumbent)?))
    }
}

/// The real line with its total order. Equality is exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RealLine;

impl OrderedSpace for RealLine {
    type Element = f64;

    fn validate(&self, x: &f64) -> Result<(), OrderError> {
        if x.is_nan() {
            Err(OrderError::NotANumber(0))
        } else {
            Ok(())
        }
    }

    fn compare(&self, x: &f64, y: &f64) -> Result<ComparisonOutcome, OrderError> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(if x < y {
            ComparisonOutcome::Less
        } else if x > y {
            ComparisonOutcome::Greater
        } else {
            ComparisonOutcome::Equal
        })
    }
}

/// `R^d` with the componentwise partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductOrder {
    dim: usize,
}

impl ProductOrder {
    /// # Panics
    /// If `dim` is zero.
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        ProductOrder { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl OrderedSpace for ProductOrder {
    type Element = Vec<f64>;

    fn validate(&self, x: &Vec<f64>) -> Result<(), OrderError> {
        if x.len() != self.dim {
            return Err(OrderError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        match x.iter().position(|c| c.is_nan()) {
            Some(i) => Err(OrderError::NotANumber(i)),
            None => Ok(()),
        }
    }

    fn compare(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<ComparisonOutcome, OrderError> {
        self.validate(x)?;
        self.validate(y)?;
        let mut some_less = false;
        let mut some_greater = false;
        for (a, b) in x.iter().zip(y) {
            if a < b {
                some_less = true;
            } else if a > b {
                some_greater = true;
            }
        }
        Ok(match (some_less, some_greater) {
            (false, false) => ComparisonOutcome::Equal,
            (true, false) => ComparisonOutcome::Less,
            (false, true) => ComparisonOutcome::Greater,
            (true, true) => ComparisonOutcome::Incomparable,
        })
    }
}
