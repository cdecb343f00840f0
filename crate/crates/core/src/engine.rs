//! Discrete-time engine.
//!
//! Each call to [`Simulation::step`] runs the phases in a fixed order:
//!
//! 1. workload: new jobs land in scheduler queues;
//! 2. harvest: completions from the previous step reach their schedulers;
//! 3. rewards (CLDS): every scheduler sends its reward vector to the learner;
//! 4. learning (CLDS): the learner updates and broadcasts the utility table;
//! 5. scheduling: schedulers, in index order, empty their queues onto
//!    resources, CLDS using the table broadcast in the previous step;
//! 6. processing: every resource serves one step, then admits the jobs
//!    submitted in phase 5;
//! 7. metrics: ALoR and message counts are recorded.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{dmms_assign, lls_assign, rs_select, LocalReadyTimes};
use crate::clds::{generate_local_rewards, promote_learner, schedule_queue, LearnerState, ScheduledJobList, UtilityTable};
use crate::error::{Result, SimError};
use crate::metrics::{compute_alor, RunSummary, TraceRecord};
use crate::model::{CompletionNotice, Job, JobId, Resource, ResourceId, SchedulerId, Step};
use crate::rng::{stream, SimRng, StreamRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Policy {
    #[serde(rename = "CLDS")]
    Clds,
    #[serde(rename = "LLS")]
    Lls,
    #[serde(rename = "RS")]
    Rs,
    #[serde(rename = "DMMS")]
    Dmms,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Clds, Policy::Lls, Policy::Rs, Policy::Dmms];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Clds => "CLDS",
            Policy::Lls => "LLS",
            Policy::Rs => "RS",
            Policy::Dmms => "DMMS",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown policy `{s}` (expected one of CLDS, LLS, RS, DMMS)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    /// Step at which the current learner crashes.
    pub fail_learner_at: Step,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub num_schedulers: usize,
    pub num_resources: usize,
    pub capacity_range: (f64, f64),
    pub job_length_range: (f64, f64),
    /// Offered work per step as a fraction of the total capacity per step.
    pub load_fraction: f64,
    pub steps: u64,
    pub alpha: f64,
    /// Exploration rate for CLDS; zero means pure greedy.
    pub epsilon: f64,
    pub policy: Policy,
    pub seed: u64,
    pub fault: Option<FaultSpec>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            num_schedulers: 10,
            num_resources: 40,
            capacity_range: (1.0, 10.0),
            job_length_range: (10.0, 100.0),
            load_fraction: 0.6,
            steps: 2000,
            alpha: crate::clds::DEFAULT_ALPHA,
            epsilon: 0.0,
            policy: Policy::Clds,
            seed: 0,
            fault: None,
        }
    }
}

fn check_range(field: &'static str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(SimError::config(field, format!("bounds must be positive and finite, got [{lo}, {hi}]")));
    }
    if lo > hi {
        return Err(SimError::config(field, format!("lower bound {lo} exceeds upper bound {hi}")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_schedulers == 0 {
            return Err(SimError::config("num_schedulers", "must be at least 1"));
        }
        if self.num_resources == 0 {
            return Err(SimError::config("num_resources", "must be at least 1"));
        }
        check_range("capacity_range", self.capacity_range)?;
        check_range("job_length_range", self.job_length_range)?;
        if !(self.load_fraction > 0.0 && self.load_fraction <= 1.0) {
            return Err(SimError::config(
                "load_fraction",
                format!("must lie in (0, 1], got {}", self.load_fraction),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(SimError::config("alpha", format!("must lie in (0, 1], got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(SimError::config("epsilon", format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum AgentMemory {
    Clds(ScheduledJobList),
    Dmms(LocalReadyTimes),
    Stateless,
}

#[derive(Debug, Clone)]
struct Agent {
    id: SchedulerId,
    queue: Vec<Job>,
    rng: SimRng,
    memory: AgentMemory,
}

#[derive(Debug, Clone)]
struct Learning {
    state: LearnerState,
    /// Agents that may still take the learner role.
    eligible: Vec<SchedulerId>,
}

/// Full state of one run.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: ScenarioConfig,
    step: Step,
    resources: Vec<Resource>,
    capacities: Vec<f64>,
    total_capacity: f64,
    agents: Vec<Agent>,
    learning: Option<Learning>,
    workload_rng: SimRng,
    next_job: u64,
    undelivered: Vec<CompletionNotice>,
    generated_length: f64,
    /// Length still owed to the workload; negative after an overshoot.
    arrival_credit: f64,
}

/// Jobs created in one workload phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub jobs: Vec<Job>,
    pub total_length: f64,
}

impl Simulation {
    /// Draws resource capacities and sets up empty agents. A pure function of
    /// the configuration.
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let mut cap_rng = stream(config.seed, StreamRole::Capacities);
        let (c_lo, c_hi) = config.capacity_range;
        let resources = (0..config.num_resources)
            .map(|q| Resource::new(ResourceId(q), cap_rng.gen_range(c_lo..=c_hi)))
            .collect::<Result<Vec<_>>>()?;
        let capacities: Vec<f64> = resources.iter().map(Resource::capacity).collect();
        let total_capacity = capacities.iter().sum();
        let agents = (0..config.num_schedulers)
            .map(|i| {
                let id = SchedulerId(i);
                let memory = match config.policy {
                    Policy::Clds => AgentMemory::Clds(ScheduledJobList::new()),
                    Policy::Dmms => AgentMemory::Dmms(LocalReadyTimes::new(id, config.num_resources)),
                    Policy::Lls | Policy::Rs => AgentMemory::Stateless,
                };
                Agent {
                    id,
                    queue: Vec::new(),
                    rng: stream(config.seed, StreamRole::Agent(id)),
                    memory,
                }
            })
            .collect();
        let learning = (config.policy == Policy::Clds).then(|| Learning {
            state: LearnerState::new(config.num_resources, config.alpha, SchedulerId(0)),
            eligible: (0..config.num_schedulers).map(SchedulerId).collect(),
        });
        Ok(Simulation {
            workload_rng: stream(config.seed, StreamRole::Workload),
            config,
            step: 0,
            resources,
            capacities,
            total_capacity,
            agents,
            learning,
            next_job: 0,
            undelivered: Vec::new(),
            generated_length: 0.0,
            arrival_credit: 0.0,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Index of the next step to execute.
    pub fn current_step(&self) -> Step {
        self.step
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    /// The utility table last broadcast by the learner (CLDS only).
    pub fn utility_table(&self) -> Option<&UtilityTable> {
        self.learning.as_ref().map(|l| &l.state.table)
    }

    pub fn current_learner(&self) -> Option<SchedulerId> {
        self.learning.as_ref().map(|l| l.state.current_learner)
    }

    /// Total job length created so far.
    pub fn generated_length(&self) -> f64 {
        self.generated_length
    }

    /// Length held in scheduler queues, i.e. generated but not yet submitted.
    pub fn queued_at_schedulers(&self) -> f64 {
        self.agents.iter().flat_map(|a| &a.queue).map(|j| j.length).sum()
    }

    /// Draws this step's jobs until their total length reaches
    /// `load_fraction` of the total capacity, handing each to a uniformly
    /// chosen scheduler. The last job may overshoot; the overshoot is
    /// deducted from the next step's target, so the long-run offered length
    /// per step equals the target exactly.
    pub fn generate_jobs(&mut self) -> Batch {
        let target = self.config.load_fraction * self.total_capacity;
        let (s_lo, s_hi) = self.config.job_length_range;
        let mut jobs = Vec::new();
        let mut total_length = 0.0;
        self.arrival_credit += target;
        while self.arrival_credit > 0.0 {
            let length = self.workload_rng.gen_range(s_lo..=s_hi);
            let owner = SchedulerId(self.workload_rng.gen_range(0..self.config.num_schedulers));
            let job = Job::new(JobId(self.next_job), length, owner, self.step).expect("validated length range");
            self.next_job += 1;
            total_length += length;
            self.arrival_credit -= length;
            self.agents[owner.0].queue.push(job.clone());
            jobs.push(job);
        }
        self.generated_length += total_length;
        Batch { jobs, total_length }
    }

    /// Runs one full step and returns its trace record.
    pub fn step(&mut self) -> Result<TraceRecord> {
        self.step_with_events().map(|events| events.record)
    }

    /// Runs one full step and reports everything that moved during it.
    pub fn step_with_events(&mut self) -> Result<StepEvents> {
        let step = self.step;
        let n = self.agents.len() as u64;
        let mut messages = 0;

        let generated = self.generate_jobs().jobs.iter().map(|j| j.id).collect();

        let notices = std::mem::take(&mut self.undelivered);
        for notice in notices {
            if let AgentMemory::Clds(list) = &mut self.agents[notice.origin_scheduler.0].memory {
                list.mark_completed(notice.job_id, notice.completion_step);
            }
        }

        let fault_now = self
            .config
            .fault
            .is_some_and(|f| f.fail_learner_at == step);
        let mut schedule_table = None;
        if let Some(learning) = &mut self.learning {
            let learner_alive = !fault_now;
            if fault_now {
                let failed = learning.state.current_learner;
                learning.eligible.retain(|&a| a != failed);
                let mut promoted =
                    promote_learner(&learning.eligible, failed, &learning.state.table, learning.state.alpha)?;
                std::mem::swap(&mut learning.state, &mut promoted);
            }
            let vectors: Vec<_> = self
                .agents
                .iter_mut()
                .map(|agent| match &mut agent.memory {
                    AgentMemory::Clds(list) => generate_local_rewards(agent.id, list, self.resources.len(), step),
                    _ => unreachable!("CLDS agents carry a ledger"),
                })
                .collect();
            messages += n;
            let previous = learning.state.table.clone();
            if learner_alive {
                // vectors sent to a crashed learner are lost
                learning.state.learn(&vectors, step)?;
                messages += n;
            }
            schedule_table = Some(previous);
        }

        let mut submissions = Vec::new();
        let mut loads: Vec<f64> = match self.config.policy {
            Policy::Lls => self.resources.iter().map(Resource::load).collect(),
            _ => Vec::new(),
        };
        for agent in &mut self.agents {
            let jobs = std::mem::take(&mut agent.queue);
            let assignments = match (&mut agent.memory, self.config.policy) {
                (AgentMemory::Clds(list), _) => {
                    let mut jobs = jobs;
                    let table = schedule_table.as_ref().expect("CLDS has a table");
                    schedule_queue(&mut jobs, list, table, step, self.config.epsilon, &mut agent.rng)
                }
                (AgentMemory::Dmms(ready), _) => {
                    ready.decay();
                    dmms_assign(jobs, &self.capacities, ready)
                }
                (AgentMemory::Stateless, Policy::Lls) => lls_assign(jobs, &mut loads, &self.capacities, &mut agent.rng),
                (AgentMemory::Stateless, _) => {
                    let m = self.resources.len();
                    jobs.into_iter()
                        .map(|job| {
                            let q = rs_select(m, &mut agent.rng);
                            (job, q)
                        })
                        .collect()
                }
            };
            for (job, q) in assignments {
                submissions.push((job.id, q));
                self.resources[q.0].submit(job)?;
            }
        }

        for resource in &mut self.resources {
            self.undelivered.extend(resource.advance(step));
            resource.admit();
        }
        let completed_jobs = self.undelivered.len() as u64;

        let record = TraceRecord {
            step,
            alor: compute_alor(&self.resources)?,
            completed_jobs,
            messages,
            pending_length_total: self.resources.iter().map(Resource::pending_length).sum(),
            policy: self.config.policy,
        };
        self.step += 1;
        Ok(StepEvents {
            record,
            generated,
            submissions,
            completions: self.undelivered.clone(),
            schedule_table_version: schedule_table.map(|t| t.version),
        })
    }
}

/// What happened during one step, in order of occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct StepEvents {
    pub record: TraceRecord,
    /// Jobs created by the workload phase.
    pub generated: Vec<JobId>,
    /// Jobs handed to resources in the scheduling phase.
    pub submissions: Vec<(JobId, ResourceId)>,
    /// Jobs finished in the processing phase.
    pub completions: Vec<CompletionNotice>,
    /// Version of the utility table the schedulers used (CLDS only).
    pub schedule_table_version: Option<Step>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub trace: Vec<TraceRecord>,
    pub summary: RunSummary,
}

/// Initializes a scenario and runs it for `config.steps` steps.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(config.clone())?;
    let trace = (0..config.steps).map(|_| sim.step()).collect::<Result<Vec<_>>>()?;
    let summary = RunSummary::from_trace(config.policy, &trace);
    Ok(RunOutput { trace, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(policy: Policy) -> ScenarioConfig {
        ScenarioConfig {
            num_schedulers: 4,
            num_resources: 8,
            steps: 50,
            policy,
            seed: 17,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn policy_names_round_trip() {
        for p in Policy::ALL {
            assert_eq!(p.name().parse::<Policy>().unwrap(), p);
            assert_eq!(p.name().to_lowercase().parse::<Policy>().unwrap(), p);
        }
        assert!("fifo".parse::<Policy>().is_err());
    }

    #[test]
    fn invalid_configs_name_the_field() {
        let cases: Vec<(&str, ScenarioConfig)> = vec![
            ("num_schedulers", ScenarioConfig { num_schedulers: 0, ..small(Policy::Rs) }),
            ("num_resources", ScenarioConfig { num_resources: 0, ..small(Policy::Rs) }),
            ("capacity_range", ScenarioConfig { capacity_range: (5.0, 1.0), ..small(Policy::Rs) }),
            ("job_length_range", ScenarioConfig { job_length_range: (0.0, 1.0), ..small(Policy::Rs) }),
            ("load_fraction", ScenarioConfig { load_fraction: 1.2, ..small(Policy::Rs) }),
            ("alpha", ScenarioConfig { alpha: 0.0, ..small(Policy::Rs) }),
            ("epsilon", ScenarioConfig { epsilon: -0.1, ..small(Policy::Rs) }),
        ];
        for (field, cfg) in cases {
            match Simulation::new(cfg) {
                Err(SimError::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{field}: expected config error, got {other:?}"),
            }
        }
    }

    #[test]
    fn init_is_deterministic() {
        let a = Simulation::new(small(Policy::Clds)).unwrap();
        let b = Simulation::new(small(Policy::Clds)).unwrap();
        assert_eq!(a.capacities(), b.capacities());
        let c = Simulation::new(ScenarioConfig { seed: 18, ..small(Policy::Clds) }).unwrap();
        assert_ne!(a.capacities(), c.capacities());
    }

    #[test]
    fn degenerate_capacity_interval() {
        let sim = Simulation::new(ScenarioConfig {
            capacity_range: (3.0, 3.0),
            ..small(Policy::Lls)
        })
        .unwrap();
        assert!(sim.capacities().iter().all(|&c| c == 3.0));
    }

    #[test]
    fn capacities_do_not_depend_on_policy() {
        let caps: Vec<Vec<f64>> = Policy::ALL
            .iter()
            .map(|&p| Simulation::new(small(p)).unwrap().capacities().to_vec())
            .collect();
        assert!(caps.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn batch_reaches_load_target() {
        let mut sim = Simulation::new(small(Policy::Rs)).unwrap();
        let target = 0.6 * sim.capacities().iter().sum::<f64>();
        let first = sim.generate_jobs();
        assert!(first.total_length >= target);
        assert!(first.total_length < target + 100.0);
        let last = first.jobs.last().unwrap().length;
        assert!(first.total_length - last < target, "stopped one job late");

        // later batches make up for the previous overshoot
        let mut owed = target - first.total_length;
        for _ in 0..200 {
            let batch = sim.generate_jobs();
            owed += target;
            assert!(batch.total_length >= owed - 1e-9);
            if let Some(last) = batch.jobs.last() {
                assert!(batch.total_length - last.length < owed);
            }
            owed -= batch.total_length;
            assert!(owed <= 0.0 && owed > -100.0);
        }
    }

    #[test]
    fn single_scheduler_gets_every_job() {
        let mut sim = Simulation::new(ScenarioConfig {
            num_schedulers: 1,
            ..small(Policy::Rs)
        })
        .unwrap();
        let batch = sim.generate_jobs();
        assert!(batch.jobs.iter().all(|j| j.origin_scheduler == SchedulerId(0)));
    }

    #[test]
    fn job_ids_follow_draw_order() {
        let mut sim = Simulation::new(small(Policy::Dmms)).unwrap();
        let ids: Vec<u64> = (0..5).flat_map(|_| sim.generate_jobs().jobs).map(|j| j.id.0).collect();
        assert!(ids.windows(2).all(|w| w[1] == w[0] + 1));
        assert_eq!(ids[0], 0);
    }

    #[test]
    fn zero_steps_is_an_empty_run() {
        let out = run(&ScenarioConfig { steps: 0, ..small(Policy::Clds) }).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.summary.total_messages, 0);
        assert_eq!(out.summary.final_alor, 0.0);
    }

    #[test]
    fn clds_sends_two_messages_per_agent() {
        let out = run(&small(Policy::Clds)).unwrap();
        assert!(out.trace.iter().all(|r| r.messages == 8));
        for p in [Policy::Lls, Policy::Rs, Policy::Dmms] {
            assert!(run(&small(p)).unwrap().trace.iter().all(|r| r.messages == 0));
        }
    }

    #[test]
    fn first_step_has_nothing_pending_before_service() {
        // jobs submitted in step 0 are only served from step 1 on
        let mut sim = Simulation::new(small(Policy::Lls)).unwrap();
        let rec = sim.step().unwrap();
        assert_eq!(rec.completed_jobs, 0);
        assert!((rec.pending_length_total - sim.generated_length()).abs() < 1e-9);
    }

    #[test]
    fn learner_failure_promotes_next_agent() {
        let cfg = ScenarioConfig {
            fault: Some(FaultSpec { fail_learner_at: 10 }),
            ..small(Policy::Clds)
        };
        let mut sim = Simulation::new(cfg).unwrap();
        let mut records = Vec::new();
        for _ in 0..12 {
            records.push(sim.step().unwrap());
        }
        assert_eq!(sim.current_learner(), Some(SchedulerId(1)));
        assert_eq!(records[9].messages, 8);
        assert_eq!(records[10].messages, 4);
        assert_eq!(records[11].messages, 8);
    }

    #[test]
    fn failure_step_does_not_update_the_table() {
        let cfg = ScenarioConfig {
            fault: Some(FaultSpec { fail_learner_at: 6 }),
            ..small(Policy::Clds)
        };
        let mut sim = Simulation::new(cfg).unwrap();
        for _ in 0..6 {
            sim.step().unwrap();
        }
        let before = sim.utility_table().unwrap().clone();
        assert_eq!(before.version, 5);
        sim.step().unwrap();
        assert_eq!(sim.utility_table().unwrap(), &before);
        sim.step().unwrap();
        assert_eq!(sim.utility_table().unwrap().version, 7);
    }

    #[test]
    fn lone_learner_failure_is_fatal() {
        let cfg = ScenarioConfig {
            num_schedulers: 1,
            fault: Some(FaultSpec { fail_learner_at: 2 }),
            ..small(Policy::Clds)
        };
        assert_eq!(run(&cfg).unwrap_err(), SimError::NoSurvivingScheduler);
    }

    #[test]
    fn simulation_is_send() {
        fn assert_send<T: Send>() {}
        assert_send::<Simulation>();
    }
}
