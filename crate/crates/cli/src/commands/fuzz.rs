//! `fuzz-bounds`: seeded random CPTP channels against the four
//! error-matrix bound families, reporting minimum slacks.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use logicalnoise::channels::{random_cptp_channel, BoundKind};
use logicalnoise::parallel;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

/// Slack below this counts as a violation.
const SLACK_TOL: f64 = 1e-9;

#[derive(Args)]
pub struct FuzzArgs {
    /// Number of random channels to draw.
    #[arg(long, default_value_t = 100_000)]
    pub count: u64,

    /// Seed of the deterministic generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct WorstCase {
    index: u64,
    row: usize,
    col: usize,
    value: f64,
    bound: f64,
    slack: f64,
    infidelity: f64,
}

#[derive(Serialize)]
struct FuzzReport {
    count: u64,
    seed: u64,
    tolerance: f64,
    violations: u64,
    min_slack: f64,
    min_slack_trace_row: f64,
    min_slack_non_unital_column: f64,
    min_slack_diagonal: f64,
    min_slack_off_diagonal: f64,
    worst: WorstCase,
}

struct Sample {
    min_slack: f64,
    per_bound: [f64; 4],
    worst: WorstCase,
}

fn bound_index(kind: BoundKind) -> usize {
    match kind {
        BoundKind::TraceRow => 0,
        BoundKind::NonUnitalColumn => 1,
        BoundKind::Diagonal => 2,
        BoundKind::OffDiagonal => 3,
    }
}

pub fn run(args: FuzzArgs) -> Result<()> {
    if args.count < 1 {
        bail!("count must be at least 1");
    }
    // One generator per channel index keeps the stream deterministic and
    // independent of the thread count.
    let samples: Vec<Sample> = parallel::map_indices(args.count as usize, |i| {
        let mut rng =
            ChaCha20Rng::seed_from_u64(args.seed ^ (i as u64).wrapping_mul(0x9E3779B97F4A7C15));
        let channel = random_cptp_channel(&mut rng);
        let report = channel.check_error_bounds();
        let mut per_bound = [f64::INFINITY; 4];
        for check in &report.checks {
            let idx = bound_index(check.kind);
            per_bound[idx] = per_bound[idx].min(check.slack);
        }
        let worst = report.worst();
        Sample {
            min_slack: report.min_slack(),
            per_bound,
            worst: WorstCase {
                index: i as u64,
                row: worst.row,
                col: worst.col,
                value: worst.value,
                bound: worst.bound,
                slack: worst.slack,
                infidelity: report.infidelity,
            },
        }
    });

    let mut min_slack = f64::INFINITY;
    let mut per_bound = [f64::INFINITY; 4];
    let mut violations = 0u64;
    let mut worst: Option<WorstCase> = None;
    for s in samples {
        if s.min_slack < -SLACK_TOL {
            violations += 1;
        }
        for (acc, v) in per_bound.iter_mut().zip(s.per_bound) {
            *acc = acc.min(v);
        }
        if worst.as_ref().is_none_or(|w| s.min_slack < w.slack) {
            worst = Some(s.worst);
        }
        min_slack = min_slack.min(s.min_slack);
    }
    let report = FuzzReport {
        count: args.count,
        seed: args.seed,
        tolerance: SLACK_TOL,
        violations,
        min_slack,
        min_slack_trace_row: per_bound[0],
        min_slack_non_unital_column: per_bound[1],
        min_slack_diagonal: per_bound[2],
        min_slack_off_diagonal: per_bound[3],
        worst: worst.expect("at least one sample"),
    };

    let mut out = crate::input::open_output(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;

    if violations > 0 {
        bail!("{violations} bound violations found");
    }
    Ok(())
}
