//! Jobs, resources and the FIFO processing mechanics of the Grid model.
//!
//! A [`Resource`] serves one job at a time in arrival order and consumes
//! `capacity` units of job length per time step. Leftover budget after a job
//! finishes rolls over into the next queued job within the same step.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Absolute tolerance under which a remaining length counts as zero.
pub const LENGTH_EPSILON: f64 = 1e-9;

/// Simulation time, in whole steps.
pub type Step = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JobId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResourceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SchedulerId(pub usize);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j{}", self.0)
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for SchedulerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub length: f64,
    pub origin_scheduler: SchedulerId,
    pub created_step: Step,
}

impl Job {
    pub fn new(id: JobId, length: f64, origin_scheduler: SchedulerId, created_step: Step) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(SimError::Domain(format!("job length must be positive, got {length}")));
        }
        Ok(Job {
            id,
            length,
            origin_scheduler,
            created_step,
        })
    }
}

/// Emitted once per job, in the step its remaining length reaches zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionNotice {
    pub job_id: JobId,
    pub resource_id: ResourceId,
    pub completion_step: Step,
    pub origin_scheduler: SchedulerId,
}

#[derive(Debug, Clone, PartialEq)]
struct InService {
    job: Job,
    remaining: f64,
}

/// Pure processing time of a job, excluding any queue wait.
pub fn job_processing_time(length: f64, capacity: f64) -> Result<f64> {
    if !(length > 0.0) || !(capacity > 0.0) {
        return Err(SimError::Domain(format!(
            "processing time needs positive length and capacity, got length={length}, capacity={capacity}"
        )));
    }
    Ok(length / capacity)
}

/// A single-server FIFO processor.
///
/// Jobs handed over with [`Resource::submit`] sit at the queue tail but are
/// not served until [`Resource::admit`] is called; the engine admits them
/// after the processing phase, so a job submitted in step `t` is first served
/// in step `t + 1`. They still count towards the resource load immediately.
#[derive(Debug, Clone)]
pub struct Resource {
    id: ResourceId,
    capacity: f64,
    queue: VecDeque<Job>,
    /// Number of jobs at the queue tail that are not yet visible to service.
    unadmitted: usize,
    current: Option<InService>,
    resident: HashSet<JobId>,
    completed_length: f64,
}

impl Resource {
    pub fn new(id: ResourceId, capacity: f64) -> Result<Self> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(SimError::Domain(format!("capacity of {id} must be positive, got {capacity}")));
        }
        Ok(Resource {
            id,
            capacity,
            queue: VecDeque::new(),
            unadmitted: 0,
            current: None,
            resident: HashSet::new(),
            completed_length: 0.0,
        })
    }

    pub fn id(&self) -> ResourceId {
        self.id
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Jobs waiting behind the one in service, head first.
    pub fn queue(&self) -> impl Iterator<Item = &Job> {
        self.queue.iter()
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// The job in service and its remaining length.
    pub fn current(&self) -> Option<(&Job, f64)> {
        self.current.as_ref().map(|s| (&s.job, s.remaining))
    }

    pub fn is_idle(&self) -> bool {
        self.current.is_none() && self.queue.is_empty()
    }

    /// Total job length finished by this resource so far.
    pub fn completed_length(&self) -> f64 {
        self.completed_length
    }

    /// Appends a job at the queue tail, immediately eligible for service.
    /// Pending submissions ahead of it are admitted as well.
    pub fn enqueue(&mut self, job: Job) -> Result<()> {
        self.insert(job)?;
        self.unadmitted = 0;
        Ok(())
    }

    /// Appends a job at the queue tail, eligible for service after the next
    /// [`Resource::admit`].
    pub fn submit(&mut self, job: Job) -> Result<()> {
        self.insert(job)?;
        self.unadmitted += 1;
        Ok(())
    }

    /// Makes every submitted job visible to service.
    pub fn admit(&mut self) {
        self.unadmitted = 0;
    }

    fn insert(&mut self, job: Job) -> Result<()> {
        if !self.resident.insert(job.id) {
            return Err(SimError::DuplicateJob {
                job: job.id,
                resource: self.id,
            });
        }
        self.queue.push_back(job);
        Ok(())
    }

    /// Processes one time step, stamping completions with `step`.
    pub fn advance(&mut self, step: Step) -> Vec<CompletionNotice> {
        let mut notices = Vec::new();
        let mut budget = self.capacity;
        loop {
            if self.current.is_none() {
                if self.queue.len() <= self.unadmitted {
                    break;
                }
                let job = self.queue.pop_front().expect("visible job present");
                let remaining = job.length;
                self.current = Some(InService { job, remaining });
            }
            let service = self.current.as_mut().expect("job in service");
            if service.remaining - budget <= LENGTH_EPSILON {
                budget = (budget - service.remaining).max(0.0);
                let done = self.current.take().expect("job in service");
                self.resident.remove(&done.job.id);
                self.completed_length += done.job.length;
                notices.push(CompletionNotice {
                    job_id: done.job.id,
                    resource_id: self.id,
                    completion_step: step,
                    origin_scheduler: done.job.origin_scheduler,
                });
                if budget <= LENGTH_EPSILON {
                    break;
                }
            } else {
                service.remaining -= budget;
                break;
            }
        }
        notices
    }

    /// Unfinished length held by this resource: the remainder of the job in
    /// service plus everything queued.
    pub fn pending_length(&self) -> f64 {
        let current = self.current.as_ref().map_or(0.0, |s| s.remaining);
        current + self.queue.iter().map(|j| j.length).sum::<f64>()
    }

    /// Pending length divided by capacity, i.e. the steps of work this
    /// resource still holds.
    pub fn load(&self) -> f64 {
        self.pending_length() / self.capacity
    }
}
