use thiserror::Error;

use crate::designer::FeasibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("exchange symmetry violated: {0}")]
    Symmetry(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("no feasible design for M = {m}, eta = {eta}: minimum of g is {g_min:e}", m = .0.m, eta = .0.eta, g_min = .0.g_min)]
    Infeasible(FeasibilityReport),

    #[error("no real (a, d) pair for e = {e}: discriminant {discriminant:e}")]
    NoRealDesign { e: f64, discriminant: f64 },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
