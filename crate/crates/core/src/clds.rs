//! Centralized learning, distributed scheduling.
//!
//! Every scheduler keeps a ledger of the jobs it submitted and turns it into a
//! per-resource reward vector each step: finished jobs earn `size / span`,
//! jobs still pending cost `-1 / size`. A single learner folds all reward
//! vectors into one utility table by exponential smoothing and broadcasts it;
//! schedulers then send each queued job to the resource with the highest
//! utility. Any scheduler can take over the learner role.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::model::{Job, JobId, ResourceId, SchedulerId, Step};

/// Learning factor used when none is configured.
pub const DEFAULT_ALPHA: f64 = 0.1;

/// Reward for a job that finished: its size over the steps between
/// submission and completion.
pub fn reward_finished(job_size: f64, starting_time: Step, completion_time: Step) -> Result<f64> {
    if completion_time <= starting_time {
        return Err(SimError::Domain(format!(
            "completion step {completion_time} must come after starting step {starting_time}"
        )));
    }
    if !(job_size > 0.0) {
        return Err(SimError::Domain(format!("job size must be positive, got {job_size}")));
    }
    Ok(job_size / (completion_time - starting_time) as f64)
}

/// Penalty for a job still pending: minus the inverse of its size.
pub fn reward_unfinished(job_size: f64) -> Result<f64> {
    if !(job_size > 0.0) {
        return Err(SimError::Domain(format!("job size must be positive, got {job_size}")));
    }
    Ok(-1.0 / job_size)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledJobEntry {
    pub job_id: JobId,
    pub job_size: f64,
    pub resource_id: ResourceId,
    pub starting_time: Step,
    pub completion_time: Option<Step>,
}

impl ScheduledJobEntry {
    fn reward(&self, current_step: Step) -> f64 {
        match self.completion_time {
            Some(done) if done <= current_step => reward_finished(self.job_size, self.starting_time, done),
            _ => reward_unfinished(self.job_size),
        }
        .expect("ledger entries hold positive sizes and completions after submission")
    }

    fn is_finished(&self, current_step: Step) -> bool {
        self.completion_time.is_some_and(|done| done <= current_step)
    }
}

/// A scheduler's ledger of submitted jobs, iterated in job-id order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScheduledJobList {
    entries: BTreeMap<JobId, ScheduledJobEntry>,
}

impl ScheduledJobList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, entry: ScheduledJobEntry) {
        let previous = self.entries.insert(entry.job_id, entry);
        debug_assert!(previous.is_none(), "job recorded twice");
    }

    /// Stamps a completion; returns false when the job is not in the ledger.
    pub fn mark_completed(&mut self, job_id: JobId, completion_step: Step) -> bool {
        match self.entries.get_mut(&job_id) {
            Some(entry) => {
                debug_assert!(completion_step > entry.starting_time);
                entry.completion_time = Some(completion_step);
                true
            }
            None => false,
        }
    }

    pub fn get(&self, job_id: JobId) -> Option<&ScheduledJobEntry> {
        self.entries.get(&job_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScheduledJobEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<ScheduledJobEntry> for ScheduledJobList {
    fn from_iter<I: IntoIterator<Item = ScheduledJobEntry>>(iter: I) -> Self {
        let mut list = ScheduledJobList::new();
        for entry in iter {
            list.record(entry);
        }
        list
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardVector {
    pub sender: SchedulerId,
    pub step: Step,
    pub rewards: Vec<f64>,
}

/// Builds this step's reward vector from the ledger and drops the entries of
/// finished jobs, which have now produced their one positive reward.
///
/// Entries must reference resources below `num_resources`.
pub fn generate_local_rewards(
    scheduler: SchedulerId,
    list: &mut ScheduledJobList,
    num_resources: usize,
    current_step: Step,
) -> RewardVector {
    let mut rewards = vec![0.0; num_resources];
    for entry in list.iter() {
        rewards[entry.resource_id.0] += entry.reward(current_step);
    }
    list.entries.retain(|_, e| !e.is_finished(current_step));
    RewardVector {
        sender: scheduler,
        step: current_step,
        rewards,
    }
}

/// Per-resource efficiency estimates shared by every scheduler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityTable {
    pub values: Vec<f64>,
    /// Step of the last update.
    pub version: Step,
}

impl UtilityTable {
    /// All-zero table: no initial knowledge, every resource tied.
    pub fn zeros(num_resources: usize) -> Self {
        UtilityTable {
            values: vec![0.0; num_resources],
            version: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exponential smoothing towards the per-resource sum of all reward
    /// vectors: `U(q) <- (1 - alpha) U(q) + alpha * sum_i R_i(q)`.
    ///
    /// Every vector must carry `step`; a sender with nothing to report is
    /// expected to send zeros, and absent senders count as zeros.
    pub fn updated(&self, vectors: &[RewardVector], alpha: f64, step: Step) -> Result<UtilityTable> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(SimError::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let mut sums = vec![0.0; self.values.len()];
        for v in vectors {
            if v.rewards.len() != sums.len() {
                return Err(SimError::Protocol(format!(
                    "reward vector from {} has {} slots, table has {}",
                    v.sender,
                    v.rewards.len(),
                    sums.len()
                )));
            }
            if v.step != step {
                return Err(SimError::Protocol(format!(
                    "reward vector from {} is for step {}, expected {step}",
                    v.sender, v.step
                )));
            }
            for (s, r) in sums.iter_mut().zip(&v.rewards) {
                *s += r;
            }
        }
        let values = self
            .values
            .iter()
            .zip(&sums)
            .map(|(u, s)| (1.0 - alpha) * u + alpha * s)
            .collect();
        Ok(UtilityTable {
            values,
            version: step.max(self.version),
        })
    }
}

/// The indices attaining the maximum of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Argmax {
    tied: Vec<ResourceId>,
}

impl Argmax {
    pub fn of(table: &UtilityTable) -> Self {
        let best = table.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied = table
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == best)
            .map(|(q, _)| ResourceId(q))
            .collect();
        Argmax { tied }
    }

    pub fn tied(&self) -> &[ResourceId] {
        &self.tied
    }

    /// Uniform pick among the tied maxima. Draws from `rng` only on a tie.
    pub fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> ResourceId {
        match self.tied.len() {
            0 => panic!("argmax of an empty table"),
            1 => self.tied[0],
            n => self.tied[rng.gen_range(0..n)],
        }
    }
}

/// Greedy choice: the highest-utility resource, ties broken uniformly.
pub fn select_resource<R: Rng + ?Sized>(table: &UtilityTable, rng: &mut R) -> ResourceId {
    Argmax::of(table).pick(rng)
}

/// Sends every queued job to the current greedy choice, records a ledger entry
/// for each, and leaves the queue empty.
///
/// With `epsilon > 0` each job instead goes to a uniformly random resource
/// with that probability. The table is not adjusted for assignments made
/// within the call, so a whole queue lands on the same argmax unless ties
/// spread it.
pub fn schedule_queue<R: Rng + ?Sized>(
    queue: &mut Vec<Job>,
    list: &mut ScheduledJobList,
    table: &UtilityTable,
    current_step: Step,
    epsilon: f64,
    rng: &mut R,
) -> Vec<(Job, ResourceId)> {
    if queue.is_empty() {
        return Vec::new();
    }
    let argmax = Argmax::of(table);
    queue
        .drain(..)
        .map(|job| {
            let resource = if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
                ResourceId(rng.gen_range(0..table.len()))
            } else {
                argmax.pick(rng)
            };
            list.record(ScheduledJobEntry {
                job_id: job.id,
                job_size: job.length,
                resource_id: resource,
                starting_time: current_step,
                completion_time: None,
            });
            (job, resource)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub table: UtilityTable,
    pub alpha: f64,
    pub current_learner: SchedulerId,
}

impl LearnerState {
    pub fn new(num_resources: usize, alpha: f64, learner: SchedulerId) -> Self {
        LearnerState {
            table: UtilityTable::zeros(num_resources),
            alpha,
            current_learner: learner,
        }
    }

    /// Folds one step of reward vectors into the table and returns the new
    /// table for broadcast.
    pub fn learn(&mut self, vectors: &[RewardVector], step: Step) -> Result<&UtilityTable> {
        self.table = self.table.updated(vectors, self.alpha, step)?;
        Ok(&self.table)
    }
}

/// Hands the learner role to the lowest-index scheduler other than `failed`.
/// The new learner starts from `snapshot`, the last table it received.
pub fn promote_learner(
    agents: &[SchedulerId],
    failed: SchedulerId,
    snapshot: &UtilityTable,
    alpha: f64,
) -> Result<LearnerState> {
    let successor = agents
        .iter()
        .copied()
        .filter(|&a| a != failed)
        .min()
        .ok_or(SimError::NoSurvivingScheduler)?;
    Ok(LearnerState {
        table: snapshot.clone(),
        alpha,
        current_learner: successor,
    })
}
