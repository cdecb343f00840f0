//! Average Load of Resources, per-step trace records and run summaries.

use serde::{Deserialize, Serialize};

use crate::engine::Policy;
use crate::error::{Result, SimError};
use crate::model::{Resource, Step};

/// Window used for crossover detection unless configured otherwise.
pub const DEFAULT_CROSSOVER_WINDOW: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: Step,
    pub alor: f64,
    pub completed_jobs: u64,
    pub messages: u64,
    pub pending_length_total: f64,
    pub policy: Policy,
}

/// Mean over resources of pending length divided by capacity.
///
/// Loads are summed in sorted order, so the result does not depend on how
/// the resources are ordered.
pub fn compute_alor(resources: &[Resource]) -> Result<f64> {
    if resources.is_empty() {
        return Err(SimError::Domain("ALoR needs at least one resource".into()));
    }
    let mut loads: Vec<f64> = resources.iter().map(Resource::load).collect();
    loads.sort_by(f64::total_cmp);
    Ok(loads.iter().sum::<f64>() / resources.len() as f64)
}

/// Mean ALoR over the records in `[from, to)`.
pub fn windowed_mean(trace: &[TraceRecord], from: usize, to: usize) -> Result<f64> {
    if from >= to || to > trace.len() {
        return Err(SimError::Domain(format!(
            "window [{from}, {to}) is empty or exceeds the {} recorded steps",
            trace.len()
        )));
    }
    Ok(trace[from..to].iter().map(|r| r.alor).sum::<f64>() / (to - from) as f64)
}

/// First window-aligned step from which `a`'s windowed ALoR stays strictly
/// below `b`'s in every full window up to the end of the traces.
///
/// A trailing partial window is ignored. Returns `None` when the final full
/// window does not favour `a`, or when the traces are shorter than one
/// window.
pub fn crossover_step(a: &[TraceRecord], b: &[TraceRecord], window: usize) -> Option<Step> {
    assert!(window >= 1, "crossover window must be at least one step");
    assert_eq!(a.len(), b.len(), "crossover needs traces of equal length");
    let full = a.len() / window;
    let mut start = None;
    for k in (0..full).rev() {
        let (from, to) = (k * window, (k + 1) * window);
        let mean_a = windowed_mean(a, from, to).expect("full window");
        let mean_b = windowed_mean(b, from, to).expect("full window");
        if mean_a < mean_b {
            start = Some(from as Step);
        } else {
            break;
        }
    }
    start
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub policy: Policy,
    pub steps: u64,
    pub final_alor: f64,
    pub mean_alor: f64,
    /// Mean ALoR over the last quarter of the run.
    pub late_window: (u64, u64),
    pub late_mean_alor: f64,
    pub total_messages: u64,
    pub total_completed: u64,
}

impl RunSummary {
    pub fn from_trace(policy: Policy, trace: &[TraceRecord]) -> Self {
        let n = trace.len();
        if n == 0 {
            return RunSummary {
                policy,
                steps: 0,
                final_alor: 0.0,
                mean_alor: 0.0,
                late_window: (0, 0),
                late_mean_alor: 0.0,
                total_messages: 0,
                total_completed: 0,
            };
        }
        let late_from = n - n.div_ceil(4);
        RunSummary {
            policy,
            steps: n as u64,
            final_alor: trace[n - 1].alor,
            mean_alor: windowed_mean(trace, 0, n).expect("non-empty trace"),
            late_window: (late_from as u64, n as u64),
            late_mean_alor: windowed_mean(trace, late_from, n).expect("non-empty window"),
            total_messages: trace.iter().map(|r| r.messages).sum(),
            total_completed: trace.iter().map(|r| r.completed_jobs).sum(),
        }
    }
}
