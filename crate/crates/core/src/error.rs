use thiserror::Error;

/// Errors produced by the codec, the topology model and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero has no multiplicative inverse in GF(256)")]
    ZeroInverse,
    #[error("matrix is rank deficient: rank {rank} < {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("block id mismatch: decoder holds block {expected}, packet carries {got}")]
    BlockMismatch { expected: u16, got: u16 },
    #[error("block not yet decodable: rank {rank} of {needed}")]
    NotDecodable { rank: usize, needed: usize },
    #[error("recode buffer is empty")]
    EmptyBuffer,
    #[error("truncated packet: need at least {needed} bytes, got {got}")]
    Truncated { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("node {rx} is out of WiFi range of node {tx}")]
    OutOfRange { tx: usize, rx: usize },
    #[error("no path from {src} to {dst} on any enabled interface")]
    NoPath { src: usize, dst: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
