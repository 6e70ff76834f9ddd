//! Configurations over the integers and linear cellular automata given by
//! matrices of Laurent polynomials.

mod ca;
mod config;
mod periodic;

pub use ca::{LaurentPoly, LinearCA, OrderEvidence};
pub use config::Config;
pub use periodic::PeriodicConfig;

use thiserror::Error;

use crate::field::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("track count mismatch: expected {expected}, got {got}")]
    TrackMismatch { expected: usize, got: usize },
    #[error("track {track} out of range for {d} tracks")]
    TrackOutOfRange { track: usize, d: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("cellular automaton is not invertible")]
    NotInvertible,
    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}
