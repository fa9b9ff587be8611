use thiserror::Error;

use crate::lattice::SideLabel;
use crate::regions::Bowtie;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("placement error: {0}")]
    Placement(String),

    #[error("cannot squeeze the {bowtie} bowtie by {requested}: lobe has only {available}")]
    SqueezeTooFar { bowtie: Bowtie, requested: i64, available: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("regions are not squeeze-equivalent: {0}")]
    Equivalence(String),

    #[error("point ({u},{v}) lies outside the hexagon frame")]
    OutsideFrame { u: i64, v: i64 },

    #[error("segment is not parallel to side {0}")]
    NotParallel(SideLabel),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used as the prefix of skip reasons.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Constraint(_) => "constraint",
            Error::Placement(_) => "placement",
            Error::SqueezeTooFar { .. } => "squeeze_too_far",
            Error::Domain(_) => "domain",
            Error::ResourceLimit(_) => "resource_limit",
            Error::Precondition(_) => "precondition",
            Error::Equivalence(_) => "equivalence",
            Error::OutsideFrame { .. } => "outside_frame",
            Error::NotParallel(_) => "not_parallel",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_))
    }
}
