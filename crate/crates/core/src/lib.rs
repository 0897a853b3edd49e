//! Farey triples, quiver mutation and tilting configurations over weighted
//! projective lines of tubular type, together with exchange-graph growth
//! certificates.
//!
//! The crate is organized around six pieces:
//!
//! - [`farey`]: exact arithmetic on Q ∪ {∞}, Farey triples, their mutation
//!   and the 3-regular exchange tree they generate.
//! - [`quiver`]: skew-symmetric exchange matrices, Fomin–Zelevinsky mutation,
//!   canonical forms and mutation-class enumeration.
//! - [`graded`]: quivers with two edge species (arrows and relations) and the
//!   source/sink mutation rule that lifts matrix mutation to them.
//! - [`tilting`]: tilting configurations — graded quivers with a per-vertex
//!   (degree, rank) class — their classification and mutation.
//! - [`templates`]: the four tubular template families, role matching and the
//!   composite mutation sequences.
//! - [`growth`]: Farey-tree walks over tilting configurations and the
//!   exponential-growth certificate.
//!
//! [`verify`] packages the golden-replay and randomized invariant suites
//! behind the CLI `verify` subcommand.

pub mod farey;
pub mod graded;
pub mod growth;
pub mod quiver;
pub mod templates;
pub mod tilting;
pub mod verify;

use thiserror::Error as ThisError;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Error {
    #[error("0/0 does not represent an element of Q ∪ {{∞}}")]
    ZeroOverZero,
    #[error("Farey difference of {0} with itself is undefined")]
    DiffOfEqual(String),
    #[error("{0} and {1} are not Farey neighbours (distance {2})")]
    NotNeighbours(String, String, String),
    #[error("not a Farey triple: {0}")]
    InvalidTriple(String),
    #[error("direction {0} is not an element of the triple {1}")]
    DirectionNotInTriple(String, String),
    #[error("descent from {0} is not unique; the triple is corrupted")]
    AmbiguousDescent(String),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkewSymmetric(usize, usize),
    #[error("vertex count {0} exceeds the brute-force bound {1}")]
    TooManyVertices(usize, usize),
    #[error("graded quiver invariant violated: {0}")]
    InvalidGradedQuiver(String),
    #[error("mutation at vertex {vertex} with the {rule} rule is not applicable: {reason}")]
    RuleNotApplicable {
        vertex: usize,
        rule: &'static str,
        reason: String,
    },
    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),
    #[error("weight sequence {0} is not tubular")]
    NotTubular(String),
    #[error("summand class at vertex {0} is degenerate (deg, rk) = (0, 0)")]
    DegenerateClass(usize),
    #[error("negative rank {rank} at vertex {vertex}; configuration left the verified region")]
    NegativeRank { vertex: usize, rank: String },
    #[error("configuration does not match any template quiver")]
    NoTemplateMatch,
    #[error("template match is ambiguous: {0}")]
    AmbiguousTemplateMatch(String),
    #[error("composite mutation in direction {direction} failed at step {step}: {reason}")]
    CompositeFailed {
        direction: char,
        step: usize,
        reason: String,
    },
    #[error("slope tracking failed: expected {expected}, got {got}")]
    SlopeTrackingFailed { expected: String, got: String },
    #[error("walk path is not a valid non-backtracking address: {0}")]
    InvalidPath(String),
    #[error("certificate check failed: {0}")]
    CertificateFailed(String),
    #[error("mutation class exceeded the cap of {0} keys")]
    ClassOverflow(usize),
    #[error("realization aborted at step {step} (vertex {vertex}): {reason}")]
    RealizationFailed {
        step: usize,
        vertex: usize,
        reason: String,
    },
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
