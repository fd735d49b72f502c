//! `rounds`: accumulation of the averaged logical error over repeated
//! correction rounds, exact matrix powers against the binomial terms.
//!
//! Column order (`point` rows per h, then `summary` rows):
//!
//! row_type,h,first_order_diag_max,pauli_quadratic_max,coherent_quadratic_max,
//! exact_diag_error_max,exact_max_offdiag,metric,metric_value

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use logicalnoise::logical::{
    average_logical_channel, coherence_metrics, crossover_estimates, rounds_accumulation,
    LogicalChannelSolver, LogicalErrorMatrix, SyndromeChannel,
};

use crate::input;

pub const CSV_HEADER: &str = "row_type,h,first_order_diag_max,pauli_quadratic_max,coherent_quadratic_max,exact_diag_error_max,exact_max_offdiag,metric,metric_value";

#[derive(Args)]
pub struct RoundsArgs {
    /// Code: repetition:N, five_qubit, steane, or @file.json.
    #[arg(long)]
    pub code: String,

    /// Noise: "identity", inline JSON, or @file.json.
    #[arg(long)]
    pub noise: String,

    /// Recovery: none, minweight, or @table.json.
    #[arg(long, default_value = "minweight")]
    pub recovery: String,

    /// Round grid: start:stop:count[:log|lin]; values round to integers.
    #[arg(long)]
    pub h_grid: String,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn round_grid(arg: &str) -> Result<Vec<u64>> {
    let mut hs: Vec<u64> = input::parse_grid(arg)?
        .into_iter()
        .map(|v| v.round().max(1.0) as u64)
        .collect();
    hs.dedup();
    Ok(hs)
}

pub fn run(args: RoundsArgs) -> Result<()> {
    let code = input::parse_code(&args.code)?;
    let noise = input::parse_noise(&args.noise, code.num_qubits())?;
    let solver = LogicalChannelSolver::new(&code)?;
    let table = input::parse_recovery(&args.recovery, &code)?;
    let hs = round_grid(&args.h_grid)?;

    let channels = solver.syndrome_distribution(&noise)?;
    let reported: Vec<SyndromeChannel> = match &table {
        Some(t) => channels
            .iter()
            .map(|sc| solver.apply_recovery(sc, t.get(&sc.syndrome)))
            .collect::<logicalnoise::Result<_>>()?,
        None => channels,
    };
    let avg = average_logical_channel(&reported)?;
    let error = LogicalErrorMatrix::from_channel_matrix(&avg)?;
    let cross = crossover_estimates(&error);

    let mut out = input::open_output(&args.out)?;
    writeln!(out, "{CSV_HEADER}")?;
    for &h in &hs {
        let report = rounds_accumulation(&error, h)?;
        let dim = report.exact.nrows();
        let first_order_diag_max = (0..dim)
            .map(|i| report.first_order[(i, i)])
            .fold(0.0, f64::max);
        let pauli_quadratic_max = report
            .pauli_quadratic_diag
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let coherent_quadratic_max = report
            .coherent_quadratic_diag
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let exact_diag_error_max = (0..dim)
            .map(|i| (1.0 - report.exact[(i, i)]).abs())
            .fold(0.0, f64::max);
        let mut exact_max_offdiag: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    exact_max_offdiag = exact_max_offdiag.max(report.exact[(i, j)].abs());
                }
            }
        }
        writeln!(
            out,
            "point,{h},{first_order_diag_max},{pauli_quadratic_max},{coherent_quadratic_max},{exact_diag_error_max},{exact_max_offdiag},,"
        )?;
    }
    let summaries = [
        ("r_physical", Some(noise.max_infidelity())),
        (
            "r_logical",
            Some(coherence_metrics(&avg).logical_infidelity),
        ),
        ("h_pauli", cross.h_pauli.map(|h| h as f64)),
        ("h_coherent", cross.h_coherent.map(|h| h as f64)),
        ("h_critical", cross.h_critical.map(|h| h as f64)),
    ];
    for (metric, value) in summaries {
        let value = value.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "summary,,,,,,,{metric},{value}")?;
    }
    out.flush()?;
    Ok(())
}
