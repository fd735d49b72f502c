//! `sweep`: noise-parameter sweep across codes with fitted scaling
//! exponents, emitted as a fixed-layout CSV.
//!
//! Column order (one `point` row per code and grid value, then `summary`
//! rows with the log-log least-squares slopes per code):
//!
//! row_type,code,n,k,d,effective_d,param,value,r_physical,r_prime,
//! phys_max_offdiag,phys_ratio,log_infidelity,log_max_offdiag,log_ratio,
//! unrec_log_infidelity,unrec_log_max_offdiag,verify_max_dev,metric,metric_value

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use logicalnoise::channels::ChannelSpec;
use logicalnoise::codes::{RecoveryTable, StabilizerCode};
use logicalnoise::logical::{
    average_logical_channel, coherence_metrics, LogicalChannelSolver, NoiseModel, SyndromeChannel,
};
use logicalnoise::oracle::{DenseOracle, KrausNoise};
use logicalnoise::parallel;

use crate::input;

pub const CSV_HEADER: &str = "row_type,code,n,k,d,effective_d,param,value,r_physical,r_prime,phys_max_offdiag,phys_ratio,log_infidelity,log_max_offdiag,log_ratio,unrec_log_infidelity,unrec_log_max_offdiag,verify_max_dev,metric,metric_value";

#[derive(Args)]
pub struct SweepArgs {
    /// Comma-separated codes (builtin names or @file.json).
    #[arg(long, value_delimiter = ',')]
    pub codes: Vec<String>,

    /// Single-qubit channel JSON template applied to every qubit; the swept
    /// field is overwritten per grid point.
    #[arg(long)]
    pub noise_family: String,

    /// Name of the JSON field swept over the grid.
    #[arg(long, default_value = "angle")]
    pub param: String,

    /// Grid: start:stop:count[:log|lin].
    #[arg(long)]
    pub grid: String,

    /// Recovery: none, minweight, or @table.json.
    #[arg(long, default_value = "minweight")]
    pub recovery: String,

    /// Cross-check every grid point against the dense oracle.
    #[arg(long)]
    pub verify: bool,

    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct PointRow {
    value: f64,
    r_physical: f64,
    r_prime: f64,
    phys_max_offdiag: f64,
    phys_ratio: f64,
    log_infidelity: f64,
    log_max_offdiag: f64,
    log_ratio: f64,
    unrec_log_infidelity: f64,
    unrec_log_max_offdiag: f64,
    verify_max_dev: Option<f64>,
}

fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .copied()
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in &usable {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

fn channel_for(template: &serde_json::Value, param: &str, value: f64) -> Result<ChannelSpec> {
    let mut spec = template.clone();
    let obj = spec
        .as_object_mut()
        .context("noise family template must be a JSON object")?;
    obj.insert(param.to_string(), serde_json::json!(value));
    Ok(serde_json::from_value(spec)?)
}

fn sweep_point(
    solver: &LogicalChannelSolver,
    table: Option<&RecoveryTable>,
    oracle: Option<&DenseOracle>,
    template: &serde_json::Value,
    param: &str,
    value: f64,
) -> Result<PointRow> {
    let code = solver.code();
    let channel = channel_for(template, param, value)?.build()?;
    let noise = NoiseModel::iid(channel, code.num_qubits())?;
    let channels = solver.syndrome_distribution(&noise)?;

    let unrec_avg = average_logical_channel(&channels)?;
    let unrec = coherence_metrics(&unrec_avg);
    let (log_avg, metrics) = match table {
        Some(t) => {
            let corrected: Vec<SyndromeChannel> = channels
                .iter()
                .map(|sc| solver.apply_recovery(sc, t.get(&sc.syndrome)))
                .collect::<logicalnoise::Result<_>>()?;
            let avg = average_logical_channel(&corrected)?;
            let m = coherence_metrics(&avg);
            (avg, m)
        }
        None => (unrec_avg.clone(), unrec),
    };
    let _ = log_avg;

    let verify_max_dev = match oracle {
        Some(oracle) => {
            let kraus = KrausNoise::from_noise_model(&noise)?;
            let reference = oracle.full_distribution(&kraus)?;
            let mut dev: f64 = 0.0;
            for sc in &channels {
                let (p_oracle, unnorm) = &reference[sc.syndrome.index()];
                dev = dev.max((sc.probability - p_oracle).abs());
                let fast = sc.weighted_ptm();
                for i in 0..fast.nrows() {
                    for j in 0..fast.ncols() {
                        dev = dev.max((fast[(i, j)] - unnorm[(i, j)]).abs());
                    }
                }
            }
            Some(dev)
        }
        None => None,
    };

    let phys_infid = channel.infidelity();
    let phys_max_offdiag = channel.max_offdiag();
    Ok(PointRow {
        value,
        r_physical: noise.max_infidelity(),
        r_prime: noise.min_diag_error(),
        phys_max_offdiag,
        phys_ratio: if phys_infid > 0.0 {
            phys_max_offdiag / phys_infid
        } else {
            0.0
        },
        log_infidelity: metrics.logical_infidelity,
        log_max_offdiag: metrics.max_offdiag,
        log_ratio: metrics.diag_ratio,
        unrec_log_infidelity: unrec.logical_infidelity,
        unrec_log_max_offdiag: unrec.max_offdiag,
        verify_max_dev,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn run(args: SweepArgs) -> Result<()> {
    if args.codes.is_empty() {
        bail!("no codes given");
    }
    let grid = input::parse_grid(&args.grid)?;
    let template: serde_json::Value = serde_json::from_str(&input::load_arg(&args.noise_family)?)
        .context("parsing noise family JSON")?;
    // Validate the template once on the first grid value.
    let probe = channel_for(&template, &args.param, grid[0])?.build()?;
    // Unknown JSON fields are ignored during deserialization, so a
    // misspelled --param would silently sweep nothing; insist that the
    // parameter actually moves the channel across the grid.
    let last = grid[grid.len() - 1];
    if grid.len() > 1 && last != grid[0] {
        let other = channel_for(&template, &args.param, last)?.build()?;
        if probe.matrix() == other.matrix() {
            bail!(
                "--param {:?} has no effect on the noise family between {} and {last}",
                args.param,
                grid[0]
            );
        }
    }

    let mut out = input::open_output(&args.out)?;
    writeln!(out, "{CSV_HEADER}")?;

    struct CodeBlock {
        code: StabilizerCode,
        rows: Vec<PointRow>,
    }
    let mut blocks: Vec<CodeBlock> = Vec::new();
    for code_arg in &args.codes {
        let code = input::parse_code(code_arg)?;
        let solver = LogicalChannelSolver::new(&code)?;
        let table = input::parse_recovery(&args.recovery, &code)?;
        let oracle = if args.verify {
            Some(DenseOracle::with_max_qubits(&code, input::oracle_cap())?)
        } else {
            None
        };
        // Grid points are independent; results are collected in grid order.
        let rows: Vec<Result<PointRow>> = parallel::map_indices(grid.len(), |i| {
            sweep_point(
                &solver,
                table.as_ref(),
                oracle.as_ref(),
                &template,
                &args.param,
                grid[i],
            )
        });
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        blocks.push(CodeBlock { code, rows });
    }

    for block in &blocks {
        let code = &block.code;
        let eff_d = input::effective_distance(code);
        for row in &block.rows {
            writeln!(
                out,
                "point,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},,",
                code.name(),
                code.num_qubits(),
                code.num_logical(),
                code.distance(),
                eff_d,
                args.param,
                row.value,
                row.r_physical,
                row.r_prime,
                row.phys_max_offdiag,
                row.phys_ratio,
                row.log_infidelity,
                row.log_max_offdiag,
                row.log_ratio,
                row.unrec_log_infidelity,
                row.unrec_log_max_offdiag,
                opt(row.verify_max_dev),
            )?;
        }
    }
    for block in &blocks {
        let code = &block.code;
        let offdiag: Vec<(f64, f64)> = block
            .rows
            .iter()
            .map(|r| (r.r_physical, r.log_max_offdiag))
            .collect();
        let infid: Vec<(f64, f64)> = block
            .rows
            .iter()
            .map(|r| (r.r_physical, r.log_infidelity))
            .collect();
        for (metric, slope) in [
            ("slope_log_max_offdiag_vs_r", fit_loglog_slope(&offdiag)),
            ("slope_log_infidelity_vs_r", fit_loglog_slope(&infid)),
        ] {
            writeln!(
                out,
                "summary,{},,,,,,,,,,,,,,,,,{},{}",
                code.name(),
                metric,
                opt(slope),
            )?;
        }
    }
    out.flush()?;

    if args.verify {
        let worst = blocks
            .iter()
            .flat_map(|b| b.rows.iter().filter_map(|r| r.verify_max_dev))
            .fold(0.0f64, f64::max);
        eprintln!("verify: max deviation {worst:.3e} over all grid points");
        if worst >= 1e-10 {
            bail!("oracle verification failed");
        }
    }
    Ok(())
}
