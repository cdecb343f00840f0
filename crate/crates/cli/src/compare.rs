//! Paired policy comparison.
//!
//! Every policy runs on the same seed, hence the same resource capacities and
//! the same job stream, so differences in ALoR come from the policies alone.

use std::thread;

use gridsched::{crossover_step, run, windowed_mean, Policy, RunOutput, RunSummary, Step};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub summary: RunSummary,
    /// Mean ALoR of each full window-aligned block of steps.
    pub window_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// The policy whose ALoR ends up lower.
    pub lower: Policy,
    pub higher: Policy,
    pub window: usize,
    pub step: Option<Step>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub config: ExperimentConfig,
    pub reference_experiment: bool,
    pub policies: Vec<PolicyReport>,
    pub crossovers: Vec<Crossover>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub runs: Vec<(Policy, RunOutput)>,
    pub report: ComparisonReport,
}

/// Runs every configured policy (in parallel) and builds the report.
pub fn run_compare(config: &ExperimentConfig) -> Result<Comparison, CliError> {
    config.validate()?;
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = config
            .policies
            .iter()
            .map(|&p| s.spawn(move || (p, run(&config.scenario(p)))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let mut runs = Vec::with_capacity(results.len());
    for (p, out) in results {
        runs.push((p, out?));
    }

    let window = config.window;
    let policies = runs
        .iter()
        .map(|(_, out)| PolicyReport {
            summary: out.summary.clone(),
            window_means: (0..out.trace.len() / window)
                .map(|k| windowed_mean(&out.trace, k * window, (k + 1) * window).expect("full window"))
                .collect(),
        })
        .collect();
    let mut crossovers = Vec::new();
    for (a, out_a) in &runs {
        for (b, out_b) in &runs {
            if a != b {
                crossovers.push(Crossover {
                    lower: *a,
                    higher: *b,
                    window,
                    step: crossover_step(&out_a.trace, &out_b.trace, window),
                });
            }
        }
    }
    let report = ComparisonReport {
        config: config.clone(),
        reference_experiment: config.preset.is_some_and(|p| p.is_reference_experiment()),
        policies,
        crossovers,
    };
    Ok(Comparison { runs, report })
}

impl ComparisonReport {
    /// Human-readable table of late-window ALoR and crossovers.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<6} {:>14} {:>14} {:>14} {:>12}\n",
            "policy", "mean ALoR", "late ALoR", "final ALoR", "messages"
        ));
        for p in &self.policies {
            let s = &p.summary;
            out.push_str(&format!(
                "{:<6} {:>14.4} {:>14.4} {:>14.4} {:>12}\n",
                s.policy.name(),
                s.mean_alor,
                s.late_mean_alor,
                s.final_alor,
                s.total_messages
            ));
        }
        for c in self.crossovers.iter().filter(|c| c.step.is_some()) {
            out.push_str(&format!(
                "{} stays below {} from step {} (window {})\n",
                c.lower,
                c.higher,
                c.step.expect("filtered"),
                c.window
            ));
        }
        out
    }
}
