//! Comparison policies: least-load, random, and decentralized Min-Min.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Job, ResourceId, SchedulerId};

/// Least Load Selection over the true per-resource loads. Ties are broken
/// uniformly at random; the stream is only drawn from on a tie.
pub fn lls_select<R: Rng + ?Sized>(loads: &[f64], rng: &mut R) -> ResourceId {
    assert!(!loads.is_empty(), "no resources to select from");
    let least = loads.iter().copied().fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = loads
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == least)
        .map(|(q, _)| q)
        .collect();
    match tied.len() {
        1 => ResourceId(tied[0]),
        n => ResourceId(tied[rng.gen_range(0..n)]),
    }
}

/// Assigns `jobs` in order to the least-loaded resource, bumping that
/// resource's load by `length / capacity` after each pick.
pub fn lls_assign<R: Rng + ?Sized>(
    jobs: Vec<Job>,
    loads: &mut [f64],
    capacities: &[f64],
    rng: &mut R,
) -> Vec<(Job, ResourceId)> {
    jobs.into_iter()
        .map(|job| {
            let q = lls_select(loads, rng);
            loads[q.0] += job.length / capacities[q.0];
            (job, q)
        })
        .collect()
}

/// Random Selection: uniform over `0..num_resources`, blind to any state.
pub fn rs_select<R: Rng + ?Sized>(num_resources: usize, rng: &mut R) -> ResourceId {
    assert!(num_resources >= 1, "no resources to select from");
    ResourceId(rng.gen_range(0..num_resources))
}

/// A DMMS scheduler's private estimate of how many steps each resource needs
/// before it could start a new job. Built only from the owner's own
/// assignments; other schedulers' work is invisible to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalReadyTimes {
    pub owner: SchedulerId,
    pub ready: Vec<f64>,
}

impl LocalReadyTimes {
    pub fn new(owner: SchedulerId, num_resources: usize) -> Self {
        LocalReadyTimes {
            owner,
            ready: vec![0.0; num_resources],
        }
    }

    /// One step of elapsed time, floored at zero.
    pub fn decay(&mut self) {
        for r in &mut self.ready {
            *r = (*r - 1.0).max(0.0);
        }
    }
}

/// Min-Min over the owner's local ready times.
///
/// Repeatedly takes the unassigned job whose best estimated completion time
/// `ready[q] + length / capacity[q]` is smallest, places it on that resource,
/// and advances the resource's ready time. Ties go to the lower job id, then
/// the lower resource id, so the result does not depend on input order.
pub fn dmms_assign(
    jobs: Vec<Job>,
    capacities: &[f64],
    ready: &mut LocalReadyTimes,
) -> Vec<(Job, ResourceId)> {
    assert_eq!(capacities.len(), ready.ready.len(), "capacity and ready-time lengths differ");
    let mut remaining = jobs;
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        // (ect, job id, resource, position in `remaining`)
        let mut best: Option<(f64, u64, usize, usize)> = None;
        for (pos, job) in remaining.iter().enumerate() {
            for (q, (&ready_q, &cap)) in ready.ready.iter().zip(capacities).enumerate() {
                let ect = ready_q + job.length / cap;
                let better = match best {
                    None => true,
                    Some((b_ect, b_id, b_q, _)) => {
                        ect < b_ect || (ect == b_ect && (job.id.0, q) < (b_id, b_q))
                    }
                };
                if better {
                    best = Some((ect, job.id.0, q, pos));
                }
            }
        }
        let (ect, _, q, pos) = best.expect("at least one job and one resource");
        ready.ready[q] = ect;
        out.push((remaining.swap_remove(pos), ResourceId(q)));
    }
    out
}
