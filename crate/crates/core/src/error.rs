use thiserror::Error;

use crate::model::{JobId, ResourceId};

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// A numeric argument fell outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("job {job} is already present on resource {resource}")]
    DuplicateJob { job: JobId, resource: ResourceId },

    /// Reward vectors or tables disagree on the resource count or step.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("no surviving scheduler can take over the learner role")]
    NoSurvivingScheduler,
}

impl SimError {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        SimError::Config {
            field,
            reason: reason.into(),
        }
    }
}
