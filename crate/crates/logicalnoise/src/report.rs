//! Serializable result records: per-syndrome channels, averages and
//! verification summaries, emitted as JSON with stable key order.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::codes::StabilizerCode;
use crate::logical::{coherence_metrics, CoherenceMetrics, SyndromeChannel};

/// Code identity echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct CodeInfo {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

impl CodeInfo {
    pub fn from_code(code: &StabilizerCode) -> Self {
        Self {
            name: code.name().to_string(),
            n: code.num_qubits(),
            k: code.num_logical(),
            d: code.distance(),
        }
    }
}

/// One syndrome record: probability, row-major process matrix, metrics.
#[derive(Clone, Debug, Serialize)]
pub struct SyndromeRecord {
    pub syndrome: String,
    pub probability: f64,
    pub degenerate: bool,
    pub ptm: Vec<Vec<f64>>,
    pub metrics: CoherenceMetrics,
}

impl SyndromeRecord {
    pub fn from_channel(sc: &SyndromeChannel) -> Self {
        Self {
            syndrome: sc.syndrome.to_string(),
            probability: sc.probability,
            degenerate: sc.degenerate,
            ptm: matrix_rows(&sc.ptm),
            metrics: sc.metrics(),
        }
    }
}

/// Syndrome-averaged channel record.
#[derive(Clone, Debug, Serialize)]
pub struct AverageRecord {
    pub ptm: Vec<Vec<f64>>,
    pub metrics: CoherenceMetrics,
}

impl AverageRecord {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            ptm: matrix_rows(m),
            metrics: coherence_metrics(m),
        }
    }
}

/// Cross-check summary against the dense oracle.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyRecord {
    pub max_ptm_deviation: f64,
    pub max_probability_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Full per-run report of the conditional logical channels.
#[derive(Clone, Debug, Serialize)]
pub struct LogicalReport {
    pub code: CodeInfo,
    pub recovery: String,
    pub physical_infidelity: f64,
    pub per_syndrome: Vec<SyndromeRecord>,
    pub average: AverageRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyRecord>,
}

/// Row-major copy of a matrix for serialization.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
