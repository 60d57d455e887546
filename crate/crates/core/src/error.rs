//! Error and status types shared by all routines.

use std::fmt;

/// Failure of one of the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument outside the domain of the routine.
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    /// Argument at a pole of the gamma function.
    #[error("pole of the gamma function at x = {0}")]
    Pole(f64),
    /// Result not representable. For distribution functions the pair that
    /// could be formed (the underflowed tail set to zero) is attached.
    #[error("overflow or underflow: {what}")]
    OverflowUnderflow {
        what: String,
        pair: Option<crate::ProbabilityPair>,
    },
    /// Iteration budget exhausted; `best` is the last iterate.
    #[error("no convergence after {limit} iterations (last iterate {best:e})")]
    MaxIterations { limit: usize, best: f64 },
    /// Noncentral inversion asked for a tail probability below its minimum.
    #[error("no solution: q = {q:e} is below the minimum attainable value {q_min:e}")]
    Infeasible { q: f64, q_min: f64 },
    /// An inner evaluation failed.
    #[error("subcomputation failed: {0}")]
    Subcomputation(String),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }

    pub(crate) fn flow(msg: impl Into<String>) -> Self {
        Error::OverflowUnderflow {
            what: msg.into(),
            pair: None,
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Error::OutOfRange(_) | Error::Pole(_) => Status::OutOfRange,
            Error::OverflowUnderflow { .. } => Status::OverflowUnderflow,
            Error::MaxIterations { .. } => Status::MaxIterations,
            Error::Infeasible { .. } => Status::Infeasible,
            Error::Subcomputation(_) => Status::SubcomputationFailure,
        }
    }
}

/// Outcome class of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    OverflowUnderflow,
    OutOfRange,
    MaxIterations,
    Infeasible,
    SubcomputationFailure,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Ok => "ok",
            Status::OverflowUnderflow => "overflow_underflow",
            Status::OutOfRange => "out_of_range",
            Status::MaxIterations => "max_iterations",
            Status::Infeasible => "infeasible",
            Status::SubcomputationFailure => "subcomputation_failure",
        };
        f.write_str(s)
    }
}

/// Routine families, each with its own integer error code table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Routine {
    CdfCentral,
    InvCentral,
    CdfNoncentral,
    InvNoncentral,
    /// erf, erfc, inverfc, gamma-function helpers.
    Scalar,
}

impl Routine {
    /// Integer error code reported for `status` by this routine family.
    pub fn ierr(self, status: Status) -> i32 {
        use Status::*;
        match self {
            Routine::CdfCentral | Routine::CdfNoncentral | Routine::Scalar => match status {
                Ok => 0,
                OverflowUnderflow => 1,
                OutOfRange => 2,
                _ => 1,
            },
            Routine::InvCentral => match status {
                Ok => 0,
                OverflowUnderflow => 1,
                MaxIterations => 2,
                OutOfRange => 3,
                _ => 1,
            },
            Routine::InvNoncentral => match status {
                Ok => 0,
                Infeasible => 1,
                SubcomputationFailure | OverflowUnderflow => 2,
                MaxIterations => 3,
                OutOfRange => 4,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
