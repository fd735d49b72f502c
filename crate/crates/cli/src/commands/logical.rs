//! `logical`: per-syndrome and averaged channels as a JSON report.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use logicalnoise::logical::{average_logical_channel, LogicalChannelSolver, SyndromeChannel};
use logicalnoise::oracle::{DenseOracle, KrausNoise};
use logicalnoise::report::{AverageRecord, CodeInfo, LogicalReport, SyndromeRecord, VerifyRecord};

use crate::input;

/// Oracle agreement required when `--verify` is set.
const VERIFY_TOL: f64 = 1e-10;

#[derive(Args)]
pub struct LogicalArgs {
    /// Code: repetition:N, five_qubit, steane, or @file.json.
    #[arg(long)]
    pub code: String,

    /// Noise: "identity", inline JSON, or @file.json.
    #[arg(long)]
    pub noise: String,

    /// Recovery: none, minweight, or @table.json.
    #[arg(long, default_value = "none")]
    pub recovery: String,

    /// Cross-check every channel against the dense oracle.
    #[arg(long)]
    pub verify: bool,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: LogicalArgs) -> Result<()> {
    let code = input::parse_code(&args.code)?;
    let noise = input::parse_noise(&args.noise, code.num_qubits())?;
    let solver = LogicalChannelSolver::new(&code)?;
    let table = input::parse_recovery(&args.recovery, &code)?;

    let channels = solver.syndrome_distribution(&noise)?;
    let reported: Vec<SyndromeChannel> = match &table {
        Some(t) => channels
            .iter()
            .map(|sc| solver.apply_recovery(sc, t.get(&sc.syndrome)))
            .collect::<logicalnoise::Result<_>>()?,
        None => channels.clone(),
    };
    let average = average_logical_channel(&reported)?;

    let verify = if args.verify {
        let oracle = DenseOracle::with_max_qubits(&code, input::oracle_cap())?;
        let kraus = KrausNoise::from_noise_model(&noise)?;
        let reference = oracle.full_distribution(&kraus)?;
        let mut max_ptm: f64 = 0.0;
        let mut max_prob: f64 = 0.0;
        for sc in &channels {
            let (p_oracle, unnorm) = &reference[sc.syndrome.index()];
            max_prob = max_prob.max((sc.probability - p_oracle).abs());
            let fast = sc.weighted_ptm();
            for i in 0..fast.nrows() {
                for j in 0..fast.ncols() {
                    max_ptm = max_ptm.max((fast[(i, j)] - unnorm[(i, j)]).abs());
                }
            }
        }
        let passed = max_ptm < VERIFY_TOL && max_prob < VERIFY_TOL;
        eprintln!(
            "verify: max deviation {:.3e} (ptm) / {:.3e} (probability), tolerance {VERIFY_TOL:.0e} — {}",
            max_ptm,
            max_prob,
            if passed { "ok" } else { "FAILED" }
        );
        Some(VerifyRecord {
            max_ptm_deviation: max_ptm,
            max_probability_deviation: max_prob,
            tolerance: VERIFY_TOL,
            passed,
        })
    } else {
        None
    };

    let report = LogicalReport {
        code: CodeInfo::from_code(&code),
        recovery: args.recovery.clone(),
        physical_infidelity: noise.max_infidelity(),
        per_syndrome: reported.iter().map(SyndromeRecord::from_channel).collect(),
        average: AverageRecord::from_matrix(&average),
        verify: verify.clone(),
    };
    let mut out = input::open_output(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;

    if let Some(v) = verify {
        if !v.passed {
            bail!("oracle verification failed");
        }
    }
    Ok(())
}
