//! Operation examples checked against independent recomputations.

use gridsched::baselines::{dmms_assign, LocalReadyTimes};
use gridsched::{compute_alor, run, FaultSpec, Job, JobId, Policy, Resource, ResourceId, ScenarioConfig, SchedulerId, Simulation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn desk(policy: Policy, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        policy,
        seed,
        ..ScenarioConfig::default()
    }
}

/// Up to five resources holding up to ten jobs, served for a few steps.
fn random_state(rng: &mut ChaCha8Rng) -> Vec<Resource> {
    let m = rng.gen_range(1..=5);
    let mut resources: Vec<Resource> = (0..m)
        .map(|q| Resource::new(ResourceId(q), rng.gen_range(0.5..8.0)).unwrap())
        .collect();
    for id in 0..rng.gen_range(0..=10u64) {
        let q = rng.gen_range(0..m);
        let job = Job::new(JobId(id), rng.gen_range(0.1..20.0), SchedulerId(0), 0).unwrap();
        resources[q].enqueue(job).unwrap();
    }
    let steps = rng.gen_range(0..3);
    for r in &mut resources {
        for s in 0..steps {
            r.advance(s);
        }
    }
    resources
}

#[test]
fn alor_matches_raw_queue_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let resources = random_state(&mut rng);
        let mut total = 0.0;
        for r in &resources {
            let mut l_total = 0.0;
            if let Some((_, remaining)) = r.current() {
                l_total += remaining;
            }
            for job in r.queue() {
                l_total += job.length;
            }
            total += l_total / r.capacity();
        }
        let oracle = total / resources.len() as f64;
        let got = compute_alor(&resources).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1e-300), "{got} vs {oracle}");
    }
}

/// Min-Min by enumeration: the one job order in which every job, when
/// placed, has the smallest (best completion, id) among those left.
fn min_min_by_enumeration(lengths: &[f64], caps: &[f64]) -> Vec<(usize, usize)> {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    let best_of = |ready: &[f64], len: f64| {
        let mut best = (f64::INFINITY, usize::MAX);
        for (q, (&r, &c)) in ready.iter().zip(caps).enumerate() {
            let ect = r + len / c;
            if ect < best.0 {
                best = (ect, q);
            }
        }
        best
    };
    let mut valid = Vec::new();
    for order in permutations(lengths.len()) {
        let mut ready = vec![0.0; caps.len()];
        let mut ok = true;
        let mut placed = Vec::new();
        for (k, &j) in order.iter().enumerate() {
            let (ect, q) = best_of(&ready, lengths[j]);
            let beaten = order[k + 1..].iter().any(|&o| {
                let (e, _) = best_of(&ready, lengths[o]);
                e < ect || (e == ect && o < j)
            });
            if beaten {
                ok = false;
                break;
            }
            ready[q] = ect;
            placed.push((j, q));
        }
        if ok {
            valid.push(placed);
        }
    }
    assert_eq!(valid.len(), 1, "Min-Min order must be unique");
    valid.pop().unwrap()
}

#[test]
fn dmms_example_agrees_with_enumeration() {
    let oracle = min_min_by_enumeration(&[2.0, 6.0], &[1.0, 2.0]);
    assert_eq!(oracle, vec![(0, 1), (1, 1)]);
    let jobs = vec![
        Job::new(JobId(0), 2.0, SchedulerId(0), 0).unwrap(),
        Job::new(JobId(1), 6.0, SchedulerId(0), 0).unwrap(),
    ];
    let mut ready = LocalReadyTimes::new(SchedulerId(0), 2);
    let out = dmms_assign(jobs, &[1.0, 2.0], &mut ready);
    let got: Vec<(usize, usize)> = out.iter().map(|(j, q)| (j.id.0 as usize, q.0)).collect();
    assert_eq!(got, oracle);
    assert_eq!(ready.ready, vec![0.0, 4.0]);
}

#[test]
fn capacity_mean_matches_uniform_interval() {
    let sim = Simulation::new(ScenarioConfig {
        num_resources: 1000,
        capacity_range: (1.0, 10.0),
        ..desk(Policy::Rs, 77)
    })
    .unwrap();
    let mean = sim.capacities().iter().sum::<f64>() / 1000.0;
    let se = 9.0 / 12f64.sqrt() / 1000f64.sqrt();
    assert!((mean - 5.5).abs() < 3.0 * se, "mean {mean}, 3 se = {}", 3.0 * se);
    assert!(sim.capacities().iter().all(|c| (1.0..=10.0).contains(c)));
}

#[test]
fn first_batch_respects_threshold() {
    // forty resources of capacity 2.5: total 100, target 60
    let mut sim = Simulation::new(ScenarioConfig {
        capacity_range: (2.5, 2.5),
        ..desk(Policy::Rs, 3)
    })
    .unwrap();
    let batch = sim.generate_jobs();
    assert!(batch.total_length >= 60.0 && batch.total_length < 160.0, "{}", batch.total_length);
}

#[test]
fn offered_length_scales_with_load() {
    let mean_batch = |load: f64| {
        let mut sim = Simulation::new(ScenarioConfig {
            load_fraction: load,
            ..desk(Policy::Rs, 5)
        })
        .unwrap();
        (0..10_000).map(|_| sim.generate_jobs().total_length).sum::<f64>() / 10_000.0
    };
    let ratio = mean_batch(0.9) / mean_batch(0.6);
    assert!((ratio - 1.5).abs() < 0.01, "ratio {ratio}");
}

#[test]
fn failover_keeps_the_prefix() {
    let clean = run(&ScenarioConfig {
        steps: 400,
        ..desk(Policy::Clds, 8)
    })
    .unwrap();
    let faulted = run(&ScenarioConfig {
        steps: 400,
        fault: Some(FaultSpec { fail_learner_at: 150 }),
        ..desk(Policy::Clds, 8)
    })
    .unwrap();
    assert_eq!(clean.trace[..150], faulted.trace[..150]);
    assert_eq!(faulted.trace[150].messages, 10);
    assert_eq!(faulted.trace.len(), 400);
}

#[test]
fn quiet_step_decays_the_table() {
    // rare unit jobs on very fast machines leave many steps with nothing
    // pending, nothing finished and nothing to reward
    let mut sim = Simulation::new(ScenarioConfig {
        num_schedulers: 2,
        num_resources: 3,
        capacity_range: (1000.0, 1000.0),
        job_length_range: (1.0, 1.0),
        load_fraction: 0.0001,
        alpha: 0.25,
        ..desk(Policy::Clds, 1)
    })
    .unwrap();
    let mut previous = sim.step_with_events().unwrap();
    let mut quiet_steps = 0;
    for _ in 0..300 {
        let before = sim.utility_table().unwrap().clone();
        let events = sim.step_with_events().unwrap();
        let quiet = previous.submissions.is_empty()
            && previous.completions.is_empty()
            && previous.record.pending_length_total == 0.0;
        if quiet {
            quiet_steps += 1;
            assert_eq!(previous.record.alor, 0.0);
            let decayed: Vec<f64> = before.values.iter().map(|v| 0.75 * v).collect();
            assert_eq!(sim.utility_table().unwrap().values, decayed);
        }
        previous = events;
    }
    assert!(quiet_steps > 50, "{quiet_steps}");
}
