//! Crate-wide error type.

use thiserror::Error;

/// Broad failure class, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input.
    Validation,
    /// A configured search or enumeration bound was exceeded.
    Bound,
    /// An internal invariant failed; indicates a construction bug or a bad market.
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown id `{id}` ({context})")]
    UnknownId { id: String, context: String },

    #[error("relation is not reflexive at `{x}`")]
    NotReflexive { x: String },
    #[error("relation is not antisymmetric: `{x}` <= `{y}` and `{y}` <= `{x}`")]
    NotAntisymmetric { x: String, y: String },
    #[error("relation is not transitive: `{x}` <= `{y}` <= `{z}` but not `{x}` <= `{z}`")]
    NotTransitive { x: String, y: String, z: String },
    #[error("not a lattice: `{x}` and `{y}` have no unique {bound} (candidates: {candidates:?})")]
    NotALattice {
        x: String,
        y: String,
        bound: &'static str,
        candidates: Vec<String>,
    },
    #[error("join/meet tables disagree with the derived order: {0}")]
    TableMismatch(String),
    #[error("enumeration over {size} elements exceeds the configured bound of {bound}")]
    EnumerationBoundExceeded { size: usize, bound: usize },

    #[error("alpha arguments `{x}` and `{y}` are comparable")]
    AlphaArgumentsComparable { x: String, y: String },

    #[error("agent `{agent}` was offered unknown partner `{partner}`")]
    UnknownPartnerId { agent: String, partner: String },
    #[error("invalid choice function for `{agent}`: {reason}")]
    InvalidSpec { agent: String, reason: String },
    #[error("deferred acceptance did not converge within {rounds} rounds")]
    NonConvergence { rounds: usize },
    #[error("stable-matching search exceeded the bound after {explored} nodes")]
    SearchBoundExceeded { explored: u64 },

    #[error("market is not one-to-one: agent `{agent}` does not use singleton preference lists")]
    NotOneToOne { agent: String },
    #[error("stable matchings do not form a consistent lattice: {0}")]
    NonLatticeStructure(String),
    #[error("matching is not represented by the rotation poset: {0}")]
    NotRepresentable(String),
    #[error("rotation set is not lower closed: `{present}` requires `{missing}`")]
    NotLowerClosed { present: String, missing: String },

    #[error("constraint arguments `{x}` and `{y}` are comparable rotations")]
    ArgumentsNotAntichain { x: String, y: String },
    #[error("agent `{agent}` belongs to several argument rotations: {rotations:?}")]
    OverlappingRotationAgents { agent: String, rotations: Vec<String> },
    #[error("fresh id `{0}` collides with an existing agent")]
    FreshIdCollision(String),
    #[error("projected matching is not stable in the base market: {0}")]
    ProjectionNotStable(String),
    #[error("isomorphism verification failed: {0}")]
    IsomorphismFailure(String),

    #[error("invalid antimatroid: {0}")]
    InvalidAntimatroid(String),
    #[error("ground set has {0} elements; at most 64 are supported")]
    GroundTooLarge(usize),

    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EnumerationBoundExceeded { .. } | Error::SearchBoundExceeded { .. } => {
                ErrorClass::Bound
            }
            Error::NonConvergence { .. }
            | Error::NonLatticeStructure(_)
            | Error::NotRepresentable(_)
            | Error::ProjectionNotStable(_)
            | Error::IsomorphismFailure(_) => ErrorClass::Invariant,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
