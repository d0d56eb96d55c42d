use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: expected {expected} sites, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("site {site} out of range for {num_sites} sites")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("invalid region partition: {0}")]
    InvalidPartition(String),

    #[error("packing infeasible: {0}")]
    Infeasible(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("checkpoint version {found} not supported (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("checkpoint belongs to a different model")]
    FingerprintMismatch,

    #[error("checkpoint checksum mismatch")]
    Checksum,

    #[error("worker pool: {0}")]
    Pool(String),

    #[error("task failed: {0}")]
    Task(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
