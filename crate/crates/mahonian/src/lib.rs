//! Permutation statistics of the Mahonian family, the space labelings that
//! drive insertion bijections between symmetric groups, and an exhaustive
//! verification harness for the equidistribution results they establish.
//!
//! The crate is organized around a handful of small modules:
//!
//! - [`perm`] — permutations in one-line notation, parsing/printing, and
//!   inversion counting;
//! - [`stats`] — descent/major-index statistics (`rdes`, `rmaj`) and the
//!   excedance/Denert family (`g exc_ell`, `g den_ell`, `den^a`);
//! - [`classify`] — grande-fixed places and the four-way classification of a
//!   symmetric group that the insertion maps target;
//! - [`labeling`] — the space labelings of words and index sequences,
//!   together with their insertion letters;
//! - [`bijections`] — the insertion maps, their inverses, and the composed
//!   equidistribution bijection;
//! - [`verify`] — exhaustive enumeration, joint distributions, and the
//!   check suites;
//! - [`report`] — JSON/CSV serialization and text rendering of results.
//!
//! A command-line front end lives in the companion `mahonian-cli` crate, and
//! a narrative guide (rendered with mdbook from `book/`) is embedded in
//! [`guide`] so that its examples run as doc-tests.

pub mod bijections;
pub mod classify;
pub mod guide;
pub mod labeling;
pub mod perm;
pub mod report;
pub mod stats;
pub mod verify;

pub use perm::{FormatStyle, Permutation, Word};

/// Errors reported by every module of this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("cannot parse token {token:?}: {reason}")]
    Parse { token: String, reason: String },
    #[error("duplicate value {value}")]
    DuplicateValue { value: u32 },
    #[error("value {value} out of range 1..={n}")]
    ValueOutOfRange { value: u32, n: usize },
    #[error("word letters must be positive")]
    ZeroLetter,
    #[error("{what} must be >= 1")]
    InvalidParams { what: &'static str },
    #[error("bound sequence has length {got}, expected {expected}")]
    BoundLength { got: usize, expected: usize },
    #[error("bound sequence must be weakly increasing with a_i >= i (violated at i={index})")]
    BoundInvalid { index: usize },
    #[error("label {label} out of range 0..={max}")]
    LabelOutOfRange { label: usize, max: usize },
    #[error("{what} is defined only for n >= g+ell (n={n}, g={g}, ell={ell})")]
    SizeBelowGapPlusLevel {
        what: &'static str,
        n: usize,
        g: u32,
        ell: u32,
    },
    #[error("classification requires n >= ell (n={n}, ell={ell})")]
    LevelExceedsSize { n: usize, ell: u32 },
    #[error("no {g}-gap {ell}-level excedance letter occurs left of position {ell} in {perm}")]
    NoExcedanceLeftOfLevel { perm: String, g: u32, ell: u32 },
    #[error("({perm}, {label}) is outside the domain of {map}: the labeled space sits {space}, which belongs to {found}")]
    MapDomain {
        map: &'static str,
        perm: String,
        label: usize,
        space: String,
        found: String,
    },
    #[error("recovery step {step} failed on {perm}: {reason}")]
    Recovery {
        step: &'static str,
        perm: String,
        reason: String,
    },
    #[error("cap exceeded: requested size {n} is above the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("unknown statistic selector {0:?}")]
    UnknownStat(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("report schema version mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: u32, found: u32 },
    #[error("malformed report document: {0}")]
    MalformedReport(String),
    #[error("payload is not tabular: {0}")]
    NonTabularPayload(&'static str),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
