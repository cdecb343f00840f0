//! Discrete-time simulation of multi-agent job scheduling on a Grid.
//!
//! Schedulers receive jobs, route them to FIFO resources of heterogeneous
//! capacity, and are scored by the Average Load of Resources (ALoR). The
//! [`clds`] module holds the learning policy: schedulers report per-resource
//! rewards to a single learner, which maintains one utility table that every
//! scheduler uses greedily. [`baselines`] holds least-load, random and
//! decentralized Min-Min selection for comparison.

pub mod baselines;
pub mod clds;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod model;
pub mod rng;

pub use engine::{run, FaultSpec, Policy, RunOutput, ScenarioConfig, Simulation, StepEvents};
pub use error::{Result, SimError};
pub use metrics::{compute_alor, crossover_step, windowed_mean, RunSummary, TraceRecord};
pub use model::{CompletionNotice, Job, JobId, Resource, ResourceId, SchedulerId, Step};
