use thiserror::Error;

use crate::ballots::ProfileError;
use crate::dnf::DnfError;

/// Errors raised by the unravelling, optimisation and analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Dnf(#[from] DnfError),
    #[error("profile is not valid: {0}")]
    InvalidProfile(String),
    #[error("certificate has {got} entries but the profile has {expected} agents")]
    AgentMismatch { expected: usize, got: usize },
    #[error("certificate level {level} for agent `{agent}` is outside 1..={max}")]
    Bounds { agent: String, level: u32, max: u32 },
    #[error("certificate is not consistent; stuck agents: {}", .stuck.join(", "))]
    InconsistentCertificate { stuck: Vec<String> },
    #[error("search space of {required} exceeds the cap of {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("profile is not in the Liquid language")]
    NotLiquid,
    #[error("node `{0}` is not reachable from the root")]
    UnreachableNode(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("vertex `{0}` has a self-loop")]
    SelfLoop(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unravelling made no progress up to level {level}")]
    Stalled { level: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
