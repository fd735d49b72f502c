//! Single-qubit channel representations and diagnostics.
//!
//! A channel is held as its process matrix in the normalized Pauli basis
//! {I, X, Y, Z}/sqrt(2): composition is matrix multiplication and the
//! diagonal is the Pauli part of the noise. Conversions to the Choi form and
//! to Kraus operators back the CPTP validation and the dense oracle.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::pauli::PauliOperator;
use crate::{Error, Result};

/// Absolute eigenvalue floor for the Choi PSD test on valid channels.
pub const CHOI_PSD_TOL: f64 = 1e-10;

/// Tolerance on the trace-preservation row.
pub const TRACE_ROW_TOL: f64 = 1e-10;

/// Choi eigenvalues below this are a hard CPTP failure in `kraus_from_ptm`.
const KRAUS_CHOI_FLOOR: f64 = -1e-8;

/// Choi eigenvalues below this contribute no Kraus operator.
const KRAUS_EIG_CUTOFF: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Unnormalized single-qubit Pauli matrices indexed (I, X, Y, Z).
fn pauli_matrix(idx: usize) -> Matrix2<Complex64> {
    match idx {
        0 => Matrix2::new(C1, C0, C0, C1),
        1 => Matrix2::new(C0, C1, C1, C0),
        2 => Matrix2::new(C0, -CI, CI, C0),
        3 => Matrix2::new(C1, C0, C0, -C1),
        _ => unreachable!(),
    }
}

/// Real 4x4 process matrix of a single-qubit CPTP map in the normalized
/// Pauli basis, rows/columns ordered (I, X, Y, Z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessMatrix1Q {
    m: Matrix4<f64>,
}

impl ProcessMatrix1Q {
    /// Validates trace preservation and complete positivity.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let row_err = (m[(0, 0)] - 1.0)
            .abs()
            .max(m[(0, 1)].abs())
            .max(m[(0, 2)].abs())
            .max(m[(0, 3)].abs());
        if row_err > TRACE_ROW_TOL {
            return Err(Error::InvalidChannel(format!(
                "trace-preservation row deviates by {row_err:.3e}"
            )));
        }
        let channel = Self { m };
        let min_eig = channel.min_choi_eigenvalue();
        if min_eig < -CHOI_PSD_TOL {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(channel)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// Entries as plain rows, used by the contraction kernels.
    pub fn rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.m[(a, b)];
            }
        }
        out
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix4::identity(),
        }
    }

    /// Depolarizing channel with PTM contraction 1 - p on X, Y and Z.
    ///
    /// Valid for p in [0, 4/3]; p = 4/3 is the CPTP limit where the unital
    /// block reaches -1/3.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=4.0 / 3.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing strength {p} outside [0, 4/3]"
            )));
        }
        Ok(Self {
            m: Matrix4::from_diagonal(&[1.0, 1.0 - p, 1.0 - p, 1.0 - p].into()),
        })
    }

    /// Phase-flip channel: Z with probability p.
    pub fn dephasing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "dephasing probability {p} outside [0, 1]"
            )));
        }
        let c = 1.0 - 2.0 * p;
        Ok(Self {
            m: Matrix4::from_diagonal(&[1.0, c, c, 1.0].into()),
        })
    }

    /// Pauli channel applying X, Y, Z with the given probabilities.
    pub fn pauli_channel(px: f64, py: f64, pz: f64) -> Result<Self> {
        let pi = 1.0 - px - py - pz;
        if px < 0.0 || py < 0.0 || pz < 0.0 || pi < -1e-12 {
            return Err(Error::InvalidParameter(
                "Pauli probabilities must be nonnegative and sum to at most 1".into(),
            ));
        }
        let dx = pi + px - py - pz;
        let dy = pi - px + py - pz;
        let dz = pi - px - py + pz;
        Ok(Self {
            m: Matrix4::from_diagonal(&[1.0, dx, dy, dz].into()),
        })
    }

    /// Amplitude damping with decay probability gamma; the non-unital column
    /// picks up the entry gamma at (Z, I).
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "damping parameter {gamma} outside [0, 1]"
            )));
        }
        let s = (1.0 - gamma).sqrt();
        let mut m = Matrix4::identity();
        m[(1, 1)] = s;
        m[(2, 2)] = s;
        m[(3, 3)] = 1.0 - gamma;
        m[(3, 0)] = gamma;
        Ok(Self { m })
    }

    /// Rotation by `theta` about the given Bloch axis.
    pub fn rotation(axis: RotationAxis, theta: f64) -> Result<Self> {
        let [nx, ny, nz] = axis.unit_vector()?;
        let half = theta / 2.0;
        let c = Complex64::new(half.cos(), 0.0);
        let s = Complex64::new(0.0, -half.sin());
        // U = cos(t/2) I - i sin(t/2) (n . sigma)
        let u = Matrix2::new(
            c + s * nz,
            s * Complex64::new(nx, -ny),
            s * Complex64::new(nx, ny),
            c - s * nz,
        );
        Self::from_unitary(&u)
    }

    /// Conjugation by an arbitrary 2x2 unitary.
    pub fn from_unitary(u: &Matrix2<Complex64>) -> Result<Self> {
        let dev = (u.adjoint() * u - Matrix2::identity()).norm();
        if dev > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary: |U^H U - I| = {dev:.3e}"
            )));
        }
        ptm_from_kraus(&KrausSet::from_ops_unchecked(vec![*u]))
    }

    /// Sequential composition; `list[0]` is applied first.
    pub fn compose(list: &[Self]) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::InvalidParameter(
                "compose needs at least one channel".into(),
            ));
        }
        let mut m = list[0].m;
        for c in &list[1..] {
            m = c.m * m;
        }
        Self::new(m)
    }

    /// Convex combination of channels; weights must sum to one.
    pub fn mixture(weights: &[f64], channels: &[Self]) -> Result<Self> {
        if weights.len() != channels.len() || weights.is_empty() {
            return Err(Error::InvalidParameter(
                "mixture needs matching, nonempty weights and channels".into(),
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        let mut m = Matrix4::zeros();
        for (w, c) in weights.iter().zip(channels) {
            m += c.m * *w;
        }
        Self::new(m)
    }

    /// Average gate infidelity to the identity, Tr[I - N] / 6.
    pub fn infidelity(&self) -> f64 {
        (4.0 - self.m.trace()) / 6.0
    }

    /// Entrywise error matrix |I - N|.
    pub fn error_matrix(&self) -> Matrix4<f64> {
        let mut e = Matrix4::identity() - self.m;
        e.apply(|v| *v = v.abs());
        e
    }

    /// Projection onto the diagonal: the Pauli twirl of the channel.
    pub fn pauli_twirl(&self) -> Self {
        Self {
            m: Matrix4::from_diagonal(&self.m.diagonal()),
        }
    }

    /// Largest off-diagonal magnitude (the coherent part).
    pub fn max_offdiag(&self) -> f64 {
        let mut best: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    best = best.max(self.m[(a, b)].abs());
                }
            }
        }
        best
    }

    /// Choi state (trace one) of the channel.
    pub fn choi(&self) -> Matrix4<Complex64> {
        let mut rho = Matrix4::<Complex64>::zeros();
        for b in 0..4 {
            for a in 0..4 {
                let w = self.m[(b, a)] * 0.25;
                if w == 0.0 {
                    continue;
                }
                let pb = pauli_matrix(b);
                let pa = pauli_matrix(a);
                for i in 0..2 {
                    for j in 0..2 {
                        for kk in 0..2 {
                            for l in 0..2 {
                                // (P_b ⊗ P_a^T)[(2i+k),(2j+l)]
                                rho[(2 * i + kk, 2 * j + l)] += pb[(i, j)] * pa[(l, kk)] * w;
                            }
                        }
                    }
                }
            }
        }
        rho
    }

    /// Minimum eigenvalue of the Choi state.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        let choi = self.choi();
        let herm = (choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &v| acc.min(v))
    }

    /// Checks the four infidelity bounds on the error-matrix entries.
    pub fn check_error_bounds(&self) -> ErrorBoundReport {
        let r = self.infidelity().max(0.0);
        let e = self.error_matrix();
        let mut checks = Vec::with_capacity(16);
        for row in 0..4 {
            for col in 0..4 {
                let kind = if row == 0 {
                    BoundKind::TraceRow
                } else if col == 0 {
                    BoundKind::NonUnitalColumn
                } else if row == col {
                    BoundKind::Diagonal
                } else {
                    BoundKind::OffDiagonal
                };
                let bound = match kind {
                    BoundKind::TraceRow => 0.0,
                    BoundKind::NonUnitalColumn | BoundKind::Diagonal => 3.0 * r,
                    BoundKind::OffDiagonal => (6.0 * r).sqrt(),
                };
                let value = e[(row, col)];
                checks.push(BoundCheck {
                    kind,
                    row,
                    col,
                    value,
                    bound,
                    slack: bound - value,
                });
            }
        }
        ErrorBoundReport {
            infidelity: r,
            checks,
        }
    }
}

/// Bloch axis for rotation channels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RotationAxis {
    X,
    Y,
    Z,
    Unit([f64; 3]),
}

impl RotationAxis {
    fn unit_vector(self) -> Result<[f64; 3]> {
        match self {
            RotationAxis::X => Ok([1.0, 0.0, 0.0]),
            RotationAxis::Y => Ok([0.0, 1.0, 0.0]),
            RotationAxis::Z => Ok([0.0, 0.0, 1.0]),
            RotationAxis::Unit(v) => {
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if (norm - 1.0).abs() > 1e-8 {
                    return Err(Error::InvalidParameter(format!(
                        "rotation axis must have unit norm, got {norm}"
                    )));
                }
                Ok(v)
            }
        }
    }
}

/// The four bound families of the error-matrix inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// First row must vanish (trace preservation).
    TraceRow,
    /// First column bounded by 3r (non-unital part).
    NonUnitalColumn,
    /// Diagonal entries bounded by 3r.
    Diagonal,
    /// Remaining entries bounded by sqrt(6r).
    OffDiagonal,
}

/// One entry of the bound report.
#[derive(Clone, Copy, Debug)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Per-entry slack report for the four bound families.
#[derive(Clone, Debug)]
pub struct ErrorBoundReport {
    pub infidelity: f64,
    pub checks: Vec<BoundCheck>,
}

impl ErrorBoundReport {
    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .fold(f64::INFINITY, |acc, c| acc.min(c.slack))
    }

    pub fn min_slack_for(&self, kind: BoundKind) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.kind == kind)
            .fold(f64::INFINITY, |acc, c| acc.min(c.slack))
    }

    pub fn worst(&self) -> &BoundCheck {
        self.checks
            .iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
            .expect("report always has 16 checks")
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.min_slack() >= -tol
    }
}

/// A set of single-qubit Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausSet {
    ops: Vec<Matrix2<Complex64>>,
}

impl KrausSet {
    /// Validates the completeness relation sum K^H K = I.
    pub fn new(ops: Vec<Matrix2<Complex64>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus set".into()));
        }
        let sum: Matrix2<Complex64> = ops.iter().map(|k| k.adjoint() * k).sum();
        let dev = (sum - Matrix2::identity()).norm();
        if dev > 1e-10 {
            return Err(Error::InvalidChannel(format!(
                "Kraus set is not trace preserving: |sum K^H K - I| = {dev:.3e}"
            )));
        }
        Ok(Self { ops })
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<Matrix2<Complex64>>) -> Self {
        Self { ops }
    }

    pub fn ops(&self) -> &[Matrix2<Complex64>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Process matrix of a Kraus channel: N_ab = (1/2) sum_K tr(P_a K P_b K^H).
pub fn ptm_from_kraus(kraus: &KrausSet) -> Result<ProcessMatrix1Q> {
    let sum: Matrix2<Complex64> = kraus.ops.iter().map(|k| k.adjoint() * k).sum();
    let dev = (sum - Matrix2::identity()).norm();
    if dev > 1e-10 {
        return Err(Error::InvalidChannel(format!(
            "Kraus set is not trace preserving: |sum K^H K - I| = {dev:.3e}"
        )));
    }
    let mut m = Matrix4::zeros();
    for a in 0..4 {
        let pa = pauli_matrix(a);
        for b in 0..4 {
            let pb = pauli_matrix(b);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in &kraus.ops {
                acc += (pa * k * pb * k.adjoint()).trace();
            }
            m[(a, b)] = 0.5 * acc.re;
        }
    }
    ProcessMatrix1Q::new(m)
}

/// Kraus operators recovered from the Choi eigendecomposition.
pub fn kraus_from_ptm(channel: &ProcessMatrix1Q) -> Result<KrausSet> {
    // Work with the unnormalized Choi J = 2 * rho so that sum K^H K = I.
    let choi = channel.choi() * Complex64::new(2.0, 0.0);
    let herm = (choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut ops = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < KRAUS_CHOI_FLOOR {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: lambda,
            });
        }
        if lambda <= KRAUS_EIG_CUTOFF {
            continue;
        }
        let v = eig.eigenvectors.column(i);
        let scale = Complex64::new(lambda.sqrt(), 0.0);
        // Vectorization convention: v[2a + i] = K[a][i].
        let k = Matrix2::new(v[0] * scale, v[1] * scale, v[2] * scale, v[3] * scale);
        ops.push(k);
    }
    if ops.is_empty() {
        return Err(Error::InvalidChannel(
            "Choi matrix has no positive eigenvalues".into(),
        ));
    }
    KrausSet::new(ops)
}

/// Fidelity-derived bounds on the diamond distance: for a channel on an
/// m-level system with infidelity r, r(1 + 1/m) <= eps <= sqrt(m(m+1) r).
pub fn diamond_bounds(r: f64, m: usize) -> Result<(f64, f64)> {
    if r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "infidelity {r} must be nonnegative"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension {m} must be at least 2"
        )));
    }
    let mf = m as f64;
    Ok((r * (1.0 + 1.0 / mf), (mf * (mf + 1.0) * r).sqrt()))
}

/// Choi state of a k-qubit process matrix given in the tensor-product Pauli
/// basis ordered (I, X, Y, Z) per qubit, leftmost qubit most significant.
pub fn choi_from_ptm(ptm: &DMatrix<f64>, qubits: usize) -> Result<DMatrix<Complex64>> {
    let dim = 1usize << (2 * qubits);
    if ptm.nrows() != dim || ptm.ncols() != dim {
        return Err(Error::InvalidParameter(format!(
            "process matrix is {}x{}, expected {dim}x{dim} for {qubits} qubit(s)",
            ptm.nrows(),
            ptm.ncols()
        )));
    }
    let m = 1usize << qubits;
    let basis: Vec<DMatrix<Complex64>> = (0..dim)
        .map(|idx| {
            let mut x_bits = 0u64;
            let mut z_bits = 0u64;
            for j in 0..qubits {
                // Big-endian base-4 digits, matching the logical ordering.
                let digit = (idx >> (2 * (qubits - 1 - j))) & 3;
                let (x, z) = crate::pauli::Pauli::ALL[digit].xz();
                x_bits |= (x as u64) << j;
                z_bits |= (z as u64) << j;
            }
            PauliOperator::from_bits(qubits, x_bits, z_bits, 0)
                .expect("basis construction is in range")
                .dense_matrix_capped(qubits)
                .expect("within the dense cap")
        })
        .collect();
    let norm = 1.0 / ((m * m) as f64);
    let mut rho = DMatrix::<Complex64>::zeros(m * m, m * m);
    for b in 0..dim {
        for a in 0..dim {
            let w = ptm[(b, a)] * norm;
            if w == 0.0 {
                continue;
            }
            let pb = &basis[b];
            let pa = &basis[a];
            for i in 0..m {
                for j in 0..m {
                    let pbij = pb[(i, j)];
                    if pbij == C0 {
                        continue;
                    }
                    for kk in 0..m {
                        for l in 0..m {
                            rho[(m * i + kk, m * j + l)] += pbij * pa[(l, kk)] * w;
                        }
                    }
                }
            }
        }
    }
    Ok(rho)
}

/// Minimum eigenvalue of a Hermitian matrix, symmetrizing first.
pub fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v))
}

/// Gaussian-random Kraus set, re-orthonormalized to satisfy completeness.
pub fn random_kraus_set<R: Rng + ?Sized>(rng: &mut R, num_ops: usize) -> KrausSet {
    assert!(num_ops >= 1, "need at least one Kraus operator");
    loop {
        let gs: Vec<Matrix2<Complex64>> = (0..num_ops)
            .map(|_| {
                Matrix2::from_fn(|_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
            })
            .collect();
        let gram: Matrix2<Complex64> = gs.iter().map(|g| g.adjoint() * g).sum();
        let herm = (gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        if eig.eigenvalues.iter().any(|&v| v < 1e-9) {
            continue; // near-singular Gram matrix, resample
        }
        let mut inv_sqrt = Matrix2::<Complex64>::zeros();
        for i in 0..2 {
            let scale = Complex64::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0);
            let v = eig.eigenvectors.column(i);
            for r in 0..2 {
                for c in 0..2 {
                    inv_sqrt[(r, c)] += v[r] * v[c].conj() * scale;
                }
            }
        }
        let ops: Vec<Matrix2<Complex64>> = gs.iter().map(|g| g * inv_sqrt).collect();
        return KrausSet::from_ops_unchecked(ops);
    }
}

/// Random CPTP channel with one to four Kraus operators.
pub fn random_cptp_channel<R: Rng + ?Sized>(rng: &mut R) -> ProcessMatrix1Q {
    let num_ops = rng.gen_range(1..=4);
    ptm_from_kraus(&random_kraus_set(rng, num_ops)).expect("random Kraus sets are CPTP")
}

/// Random Pauli channel with Dirichlet-distributed probabilities.
pub fn random_pauli_channel<R: Rng + ?Sized>(rng: &mut R) -> ProcessMatrix1Q {
    let draws: Vec<f64> = (0..4).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let total: f64 = draws.iter().sum();
    ProcessMatrix1Q::pauli_channel(draws[1] / total, draws[2] / total, draws[3] / total)
        .expect("normalized probabilities are valid")
}

/// Declarative single-qubit channel description (JSON front end).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    Identity,
    Depolarizing {
        p: f64,
    },
    Dephasing {
        p: f64,
    },
    Pauli {
        px: f64,
        py: f64,
        pz: f64,
    },
    AmplitudeDamping {
        gamma: f64,
    },
    Rotation {
        axis: AxisSpec,
        angle: f64,
    },
    Unitary {
        matrix: [[[f64; 2]; 2]; 2],
    },
    Kraus {
        operators: Vec<[[[f64; 2]; 2]; 2]>,
    },
    Compose {
        channels: Vec<ChannelSpec>,
    },
    Mixture {
        weights: Vec<f64>,
        channels: Vec<ChannelSpec>,
    },
}

/// Rotation axis in JSON: "X" / "Y" / "Z" or a unit 3-vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Named(String),
    Vector([f64; 3]),
}

impl AxisSpec {
    fn to_axis(&self) -> Result<RotationAxis> {
        match self {
            AxisSpec::Named(s) => match s.as_str() {
                "X" | "x" => Ok(RotationAxis::X),
                "Y" | "y" => Ok(RotationAxis::Y),
                "Z" | "z" => Ok(RotationAxis::Z),
                other => Err(Error::InvalidParameter(format!(
                    "unknown rotation axis {other:?}"
                ))),
            },
            AxisSpec::Vector(v) => Ok(RotationAxis::Unit(*v)),
        }
    }
}

fn matrix2_from_json(m: &[[[f64; 2]; 2]; 2]) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(m[0][0][0], m[0][0][1]),
        Complex64::new(m[0][1][0], m[0][1][1]),
        Complex64::new(m[1][0][0], m[1][0][1]),
        Complex64::new(m[1][1][0], m[1][1][1]),
    )
}

impl ChannelSpec {
    /// Builds the process matrix described by this spec.
    pub fn build(&self) -> Result<ProcessMatrix1Q> {
        match self {
            ChannelSpec::Identity => Ok(ProcessMatrix1Q::identity()),
            ChannelSpec::Depolarizing { p } => ProcessMatrix1Q::depolarizing(*p),
            ChannelSpec::Dephasing { p } => ProcessMatrix1Q::dephasing(*p),
            ChannelSpec::Pauli { px, py, pz } => ProcessMatrix1Q::pauli_channel(*px, *py, *pz),
            ChannelSpec::AmplitudeDamping { gamma } => ProcessMatrix1Q::amplitude_damping(*gamma),
            ChannelSpec::Rotation { axis, angle } => {
                ProcessMatrix1Q::rotation(axis.to_axis()?, *angle)
            }
            ChannelSpec::Unitary { matrix } => {
                ProcessMatrix1Q::from_unitary(&matrix2_from_json(matrix))
            }
            ChannelSpec::Kraus { operators } => {
                let ops = operators.iter().map(matrix2_from_json).collect();
                ptm_from_kraus(&KrausSet::new(ops)?)
            }
            ChannelSpec::Compose { channels } => {
                let built: Result<Vec<_>> = channels.iter().map(|c| c.build()).collect();
                ProcessMatrix1Q::compose(&built?)
            }
            ChannelSpec::Mixture { weights, channels } => {
                let built: Result<Vec<_>> = channels.iter().map(|c| c.build()).collect();
                ProcessMatrix1Q::mixture(weights, &built?)
            }
        }
    }
}
