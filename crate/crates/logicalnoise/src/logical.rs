//! Exact syndrome-conditioned logical channels via the factorized
//! stabilizer-pair sum.
//!
//! For a local noise model N = sum_a w_a (N^(a,1) x .. x N^(a,n)) and a code
//! with logical group L and stabilizer group S, the unnormalized logical
//! matrix element for syndrome s is
//!
//!   sum_{S,S'} phi(S|s) chi(LS) chi(L'S') prod_j M_j[(LS)_j, (L'S')_j] / 2^(n-k)
//!
//! with M_j the single-qubit process matrices. The (I, I) element before
//! normalization is the syndrome probability under the maximally mixed
//! code-space input, which is divided out to give the logical process matrix.
//!
//! The sum is reorganized per logical pair (L, L'): an inner contraction
//! over S' gives a vector u indexed by S, and each syndrome is then a signed
//! sum over u. Summation order is fixed, so results are identical across
//! thread counts.

use nalgebra::DMatrix;

use crate::channels::ProcessMatrix1Q;
use crate::codes::{StabilizerCode, Syndrome};
use crate::parallel;
use crate::pauli::PauliOperator;
use crate::{Error, Result};

/// Syndrome probabilities below this are flagged degenerate instead of
/// being divided out.
pub const DEGENERATE_SYNDROME_EPS: f64 = 1e-14;

/// Cap on the stabilizer-pair sum (4^(n-k) pairs per logical pair).
const MAX_SYNDROME_BITS_FOR_SOLVER: usize = 12;

/// One product term of a (possibly correlated) local noise model.
#[derive(Clone, Debug)]
pub struct NoiseTerm {
    pub weight: f64,
    pub factors: Vec<ProcessMatrix1Q>,
}

/// Local Markovian noise: a probabilistic mixture of tensor products of
/// single-qubit channels. A single term is the plain product case.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    terms: Vec<NoiseTerm>,
    n: usize,
}

impl NoiseModel {
    /// Tensor product of per-qubit channels.
    pub fn product(factors: Vec<ProcessMatrix1Q>) -> Result<Self> {
        Self::correlated(vec![NoiseTerm {
            weight: 1.0,
            factors,
        }])
    }

    /// The same channel on every qubit.
    pub fn iid(channel: ProcessMatrix1Q, n: usize) -> Result<Self> {
        Self::product(vec![channel; n])
    }

    /// Probabilistic mixture of product channels; weights must sum to one.
    pub fn correlated(terms: Vec<NoiseTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidNoiseModel("no noise terms".into()));
        }
        let n = terms[0].factors.len();
        if n == 0 {
            return Err(Error::InvalidNoiseModel(
                "noise term with no factors".into(),
            ));
        }
        let mut total = 0.0;
        for t in &terms {
            if t.factors.len() != n {
                return Err(Error::InvalidNoiseModel(format!(
                    "noise terms act on {} and {} qubits",
                    n,
                    t.factors.len()
                )));
            }
            if t.weight < 0.0 {
                return Err(Error::InvalidNoiseModel(format!(
                    "negative term weight {}",
                    t.weight
                )));
            }
            total += t.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidNoiseModel(format!(
                "term weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { terms, n })
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[NoiseTerm] {
        &self.terms
    }

    /// Reduced single-qubit channel on qubit j (other factors traced out
    /// against the maximally mixed input).
    pub fn marginal(&self, j: usize) -> Result<ProcessMatrix1Q> {
        if j >= self.n {
            return Err(Error::InvalidParameter(format!(
                "qubit index {j} out of range"
            )));
        }
        let mut m = nalgebra::Matrix4::<f64>::zeros();
        for t in &self.terms {
            m += t.factors[j].matrix() * t.weight;
        }
        Ok(ProcessMatrix1Q::from_matrix_unchecked(m))
    }

    /// Worst per-qubit infidelity, the scaling parameter of the bounds.
    pub fn max_infidelity(&self) -> f64 {
        (0..self.n)
            .map(|j| self.marginal(j).expect("index in range").infidelity())
            .fold(0.0, f64::max)
    }

    /// Smallest per-qubit diagonal error entry min over j and sigma != I of
    /// |1 - N_(sigma,sigma)|; zero for fixed-axis rotations.
    pub fn min_diag_error(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.n {
            let m = self.marginal(j).expect("index in range");
            for a in 1..4 {
                best = best.min((1.0 - m.matrix()[(a, a)]).abs());
            }
        }
        best
    }

    /// True when every factor of every term is a Pauli channel.
    pub fn is_pauli(&self) -> bool {
        self.terms.iter().all(|t| {
            t.factors.iter().all(|f| {
                let m = f.matrix();
                (0..4).all(|a| (0..4).all(|b| a == b || m[(a, b)] == 0.0))
            })
        })
    }

    /// The model with every factor replaced by its Pauli twirl.
    pub fn pauli_twirl(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| NoiseTerm {
                weight: t.weight,
                factors: t.factors.iter().map(|f| f.pauli_twirl()).collect(),
            })
            .collect();
        Self { terms, n: self.n }
    }
}

/// Logical process matrix conditioned on one syndrome, with its probability.
///
/// `ptm` is expressed in the normalized logical Pauli basis ordered per
/// logical qubit as (I, X, Y, Z). When `degenerate` is set the syndrome has
/// probability zero and `ptm` holds the unnormalized accumulation instead.
#[derive(Clone, Debug)]
pub struct SyndromeChannel {
    pub syndrome: Syndrome,
    pub probability: f64,
    pub ptm: DMatrix<f64>,
    pub degenerate: bool,
}

impl SyndromeChannel {
    /// The product p(s) N(s) used by syndrome averaging; for degenerate
    /// syndromes this is the stored unnormalized matrix itself.
    pub fn weighted_ptm(&self) -> DMatrix<f64> {
        if self.degenerate {
            self.ptm.clone()
        } else {
            &self.ptm * self.probability
        }
    }

    pub fn metrics(&self) -> CoherenceMetrics {
        coherence_metrics(&self.ptm)
    }
}

/// Per-code contraction tables for the stabilizer-pair sum.
///
/// Building the solver enumerates the logical group and all stabilizer
/// elements once; it can then be reused across noise models (parameter
/// sweeps reuse the same tables for every grid point).
pub struct LogicalChannelSolver {
    code: StabilizerCode,
    logicals: Vec<PauliOperator>,
    dim: usize,
    ns: usize,
    n: usize,
    /// Pauli index of (L_l S_si) at qubit j, flattened as ((l * ns) + si) * n + j.
    idx: Vec<u8>,
    /// chi(L_l S_si), flattened as l * ns + si.
    chi: Vec<f64>,
}

impl LogicalChannelSolver {
    pub fn new(code: &StabilizerCode) -> Result<Self> {
        if code.syndrome_len() > MAX_SYNDROME_BITS_FOR_SOLVER {
            return Err(Error::ResourceLimit(format!(
                "stabilizer-pair sum over 4^{} pairs exceeds the solver cap",
                code.syndrome_len()
            )));
        }
        let logicals = code.logical_group()?;
        let elements: Vec<PauliOperator> = code.stabilizer_elements()?.map(|(_, s)| s).collect();
        let dim = logicals.len();
        let ns = elements.len();
        let n = code.num_qubits();
        let mut idx = vec![0u8; dim * ns * n];
        let mut chi = vec![0.0f64; dim * ns];
        for (l, logical) in logicals.iter().enumerate() {
            for (si, s) in elements.iter().enumerate() {
                let prod = logical.multiply(s)?;
                chi[l * ns + si] = prod.chi_sign()? as f64;
                let base = (l * ns + si) * n;
                for j in 0..n {
                    idx[base + j] = prod.pauli_at(j).index() as u8;
                }
            }
        }
        Ok(Self {
            code: code.clone(),
            logicals,
            dim,
            ns,
            n,
            idx,
            chi,
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn logical_group(&self) -> &[PauliOperator] {
        &self.logicals
    }

    /// Inner contraction: for every logical pair (l, l'), the vector
    /// u[si] = sum_terms w sum_{s'i} chi chi' prod_j M_j[idx_l, idx_l'].
    fn pair_vectors(&self, noise: &NoiseModel) -> Vec<Vec<f64>> {
        let term_rows: Vec<(f64, Vec<[[f64; 4]; 4]>)> = noise
            .terms()
            .iter()
            .map(|t| (t.weight, t.factors.iter().map(|f| f.rows()).collect()))
            .collect();
        let (dim, ns, n) = (self.dim, self.ns, self.n);
        parallel::map_indices(dim * dim, |pair| {
            let l = pair / dim;
            let lp = pair % dim;
            let mut u = vec![0.0f64; ns];
            for (weight, rows) in &term_rows {
                for (si, slot) in u.iter_mut().enumerate() {
                    let left = (l * ns + si) * n;
                    let chi_left = self.chi[l * ns + si] * weight;
                    let mut acc = 0.0;
                    for spi in 0..ns {
                        let right = (lp * ns + spi) * n;
                        let mut prod = chi_left * self.chi[lp * ns + spi];
                        for j in 0..n {
                            prod *=
                                rows[j][self.idx[left + j] as usize][self.idx[right + j] as usize];
                            if prod == 0.0 {
                                break;
                            }
                        }
                        acc += prod;
                    }
                    *slot += acc;
                }
            }
            u
        })
    }

    fn assemble(&self, pair_u: &[Vec<f64>], syndrome_index: usize) -> DMatrix<f64> {
        let scale = 1.0 / self.ns as f64;
        DMatrix::from_fn(self.dim, self.dim, |l, lp| {
            let u = &pair_u[l * self.dim + lp];
            let mut acc = 0.0;
            for (si, &v) in u.iter().enumerate() {
                if (si & syndrome_index).count_ones().is_multiple_of(2) {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc * scale
        })
    }

    fn finish(&self, syndrome_index: usize, unnorm: DMatrix<f64>) -> Result<SyndromeChannel> {
        let syndrome = Syndrome::from_index(syndrome_index, self.code.syndrome_len())?;
        let p = unnorm[(0, 0)];
        if p < DEGENERATE_SYNDROME_EPS {
            Ok(SyndromeChannel {
                syndrome,
                probability: 0.0,
                ptm: unnorm,
                degenerate: true,
            })
        } else {
            Ok(SyndromeChannel {
                syndrome,
                probability: p,
                ptm: unnorm / p,
                degenerate: false,
            })
        }
    }

    /// Logical channel conditioned on a single syndrome.
    pub fn syndrome_channel(&self, noise: &NoiseModel, s: &Syndrome) -> Result<SyndromeChannel> {
        self.check_noise(noise)?;
        if s.len() != self.code.syndrome_len() {
            return Err(Error::InvalidParameter(format!(
                "syndrome length {} does not match the code ({})",
                s.len(),
                self.code.syndrome_len()
            )));
        }
        let pair_u = self.pair_vectors(noise);
        self.finish(s.index(), self.assemble(&pair_u, s.index()))
    }

    /// All 2^(n-k) syndrome channels, probabilities summing to one.
    pub fn syndrome_distribution(&self, noise: &NoiseModel) -> Result<Vec<SyndromeChannel>> {
        self.check_noise(noise)?;
        let pair_u = self.pair_vectors(noise);
        (0..self.code.num_syndromes())
            .map(|s| self.finish(s, self.assemble(&pair_u, s)))
            .collect()
    }

    /// Composes the syndrome channel with the logical action of the recovery
    /// operator: conjugation by a Pauli flips the sign of the logical rows it
    /// anticommutes with. The probability is unchanged.
    pub fn apply_recovery(
        &self,
        sc: &SyndromeChannel,
        recovery: &PauliOperator,
    ) -> Result<SyndromeChannel> {
        let actual = self.code.syndrome_of(recovery)?;
        if actual != sc.syndrome {
            return Err(Error::SyndromeMismatch {
                expected: sc.syndrome.to_string(),
                found: actual.to_string(),
            });
        }
        let mut ptm = sc.ptm.clone();
        for (l, logical) in self.logicals.iter().enumerate() {
            if !logical.commutes(recovery)? {
                for v in ptm.row_mut(l).iter_mut() {
                    *v = -*v;
                }
            }
        }
        Ok(SyndromeChannel { ptm, ..sc.clone() })
    }

    fn check_noise(&self, noise: &NoiseModel) -> Result<()> {
        if noise.qubit_count() != self.n {
            return Err(Error::QubitCountMismatch {
                left: noise.qubit_count(),
                right: self.n,
            });
        }
        Ok(())
    }
}

/// One-shot helper: the per-syndrome channel without keeping a solver.
pub fn logical_channel_factorized(
    code: &StabilizerCode,
    noise: &NoiseModel,
    s: &Syndrome,
) -> Result<SyndromeChannel> {
    LogicalChannelSolver::new(code)?.syndrome_channel(noise, s)
}

/// One-shot helper: the full syndrome distribution.
pub fn syndrome_distribution(
    code: &StabilizerCode,
    noise: &NoiseModel,
) -> Result<Vec<SyndromeChannel>> {
    LogicalChannelSolver::new(code)?.syndrome_distribution(noise)
}

/// Recovery-composed channel via a fresh logical group enumeration.
pub fn apply_recovery(
    code: &StabilizerCode,
    sc: &SyndromeChannel,
    recovery: &PauliOperator,
) -> Result<SyndromeChannel> {
    let actual = code.syndrome_of(recovery)?;
    if actual != sc.syndrome {
        return Err(Error::SyndromeMismatch {
            expected: sc.syndrome.to_string(),
            found: actual.to_string(),
        });
    }
    let logicals = code.logical_group()?;
    let mut ptm = sc.ptm.clone();
    for (l, logical) in logicals.iter().enumerate() {
        if !logical.commutes(recovery)? {
            for v in ptm.row_mut(l).iter_mut() {
                *v = -*v;
            }
        }
    }
    Ok(SyndromeChannel { ptm, ..sc.clone() })
}

/// Syndrome-averaged logical channel sum_s p(s) N(s) over a complete set.
pub fn average_logical_channel(channels: &[SyndromeChannel]) -> Result<DMatrix<f64>> {
    if channels.is_empty() {
        return Err(Error::IncompleteSyndromeSet {
            got: 0,
            expected: 1,
        });
    }
    let len = channels[0].syndrome.len();
    let expected = 1usize << len;
    if channels.len() != expected {
        return Err(Error::IncompleteSyndromeSet {
            got: channels.len(),
            expected,
        });
    }
    let dim = channels[0].ptm.nrows();
    let mut seen = vec![false; expected];
    let mut ordered: Vec<Option<&SyndromeChannel>> = vec![None; expected];
    for sc in channels {
        let i = sc.syndrome.index();
        if seen[i] {
            return Err(Error::IncompleteSyndromeSet {
                got: channels.len(),
                expected,
            });
        }
        seen[i] = true;
        ordered[i] = Some(sc);
    }
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    for sc in ordered.into_iter().flatten() {
        acc += sc.weighted_ptm();
    }
    Ok(acc)
}

/// Coherence and infidelity summary of a logical process matrix.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct CoherenceMetrics {
    /// Generalized average-gate infidelity (m^2 - trace) / (m^2 + m).
    pub logical_infidelity: f64,
    /// Largest off-diagonal magnitude (the coherent part).
    pub max_offdiag: f64,
    /// Frobenius norm of the off-diagonal part.
    pub offdiag_frobenius: f64,
    /// max_offdiag / logical_infidelity; zero when the infidelity vanishes.
    pub diag_ratio: f64,
}

/// Metrics of a square logical PTM of dimension 4^k.
pub fn coherence_metrics(ptm: &DMatrix<f64>) -> CoherenceMetrics {
    let dim = ptm.nrows();
    debug_assert_eq!(dim, ptm.ncols());
    let m_dim = (dim as f64).sqrt();
    let infidelity = (dim as f64 - ptm.trace()) / (dim as f64 + m_dim);
    let mut max_offdiag: f64 = 0.0;
    let mut fro = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                let v = ptm[(i, j)];
                max_offdiag = max_offdiag.max(v.abs());
                fro += v * v;
            }
        }
    }
    let diag_ratio = if infidelity > 0.0 {
        max_offdiag / infidelity
    } else {
        0.0
    };
    CoherenceMetrics {
        logical_infidelity: infidelity,
        max_offdiag,
        offdiag_frobenius: fro.sqrt(),
        diag_ratio,
    }
}

/// Entrywise error matrix |I - N| of a logical channel.
#[derive(Clone, Debug)]
pub struct LogicalErrorMatrix {
    entries: DMatrix<f64>,
}

impl LogicalErrorMatrix {
    pub fn from_channel_matrix(avg: &DMatrix<f64>) -> Result<Self> {
        if avg.nrows() != avg.ncols() {
            return Err(Error::InvalidParameter(
                "channel matrix must be square".into(),
            ));
        }
        let dim = avg.nrows();
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            (id - avg[(i, j)]).abs()
        });
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn diagonal_part(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.entries.diagonal())
    }

    pub fn offdiagonal_part(&self) -> DMatrix<f64> {
        &self.entries - self.diagonal_part()
    }
}

/// Round-count estimates at which the quadratic terms of (I - E)^h overtake
/// the linear term, split by origin.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct RoundsCrossovers {
    /// Largest diagonal entry of E.
    pub max_diag_error: f64,
    /// Largest diagonal entry of D^2 (Pauli x Pauli second order).
    pub max_pauli_quadratic: f64,
    /// Largest diagonal entry of O^2 (coherent x coherent second order).
    pub max_coherent_quadratic: f64,
    /// h where C(h,2) diag(D^2) reaches h diag(E).
    pub h_pauli: Option<u64>,
    /// h where C(h,2) diag(O^2) reaches h diag(E).
    pub h_coherent: Option<u64>,
    /// h where the coherent quadratic term overtakes the full Pauli part.
    pub h_critical: Option<u64>,
}

/// Per-round accumulation report: exact matrix power against the
/// second-order binomial expansion, with the quadratic diagonal split into
/// Pauli x Pauli and coherent x coherent contributions.
#[derive(Clone, Debug)]
pub struct RoundsReport {
    pub h: u64,
    pub exact: DMatrix<f64>,
    pub first_order: DMatrix<f64>,
    pub second_order: DMatrix<f64>,
    pub pauli_quadratic_diag: Vec<f64>,
    pub coherent_quadratic_diag: Vec<f64>,
    pub crossovers: RoundsCrossovers,
}

fn matrix_power(base: &DMatrix<f64>, mut exp: u64) -> DMatrix<f64> {
    let dim = base.nrows();
    let mut result = DMatrix::<f64>::identity(dim, dim);
    let mut acc = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = &result * &acc;
        }
        exp >>= 1;
        if exp > 0 {
            acc = &acc * &acc;
        }
    }
    result
}

fn crossover_h(linear: f64, quadratic: f64) -> Option<u64> {
    if quadratic <= 0.0 {
        return None;
    }
    if linear <= 0.0 {
        return Some(2);
    }
    // C(h,2) q >= h a  <=>  h >= 1 + 2a/q
    Some(((1.0 + 2.0 * linear / quadratic).ceil() as u64).max(2))
}

/// Crossover estimates from the error matrix alone.
pub fn crossover_estimates(e: &LogicalErrorMatrix) -> RoundsCrossovers {
    let dim = e.entries.nrows();
    let d = e.diagonal_part();
    let o = e.offdiagonal_part();
    let d2 = &d * &d;
    let o2 = &o * &o;
    let max_diag_error = (0..dim).map(|i| e.entries[(i, i)]).fold(0.0, f64::max);
    let max_pauli_quadratic = (0..dim).map(|i| d2[(i, i)]).fold(0.0, f64::max);
    let max_coherent_quadratic = (0..dim).map(|i| o2[(i, i)]).fold(0.0, f64::max);
    let h_critical = if max_coherent_quadratic > max_pauli_quadratic {
        crossover_h(max_diag_error, max_coherent_quadratic - max_pauli_quadratic)
    } else {
        None
    };
    RoundsCrossovers {
        max_diag_error,
        max_pauli_quadratic,
        max_coherent_quadratic,
        h_pauli: crossover_h(max_diag_error, max_pauli_quadratic),
        h_coherent: crossover_h(max_diag_error, max_coherent_quadratic),
        h_critical,
    }
}

/// Accumulation over h rounds of the error matrix E: exact (I - E)^h, the
/// binomial terms h E and C(h,2) E^2, and the split quadratic diagonals.
pub fn rounds_accumulation(e: &LogicalErrorMatrix, h: u64) -> Result<RoundsReport> {
    if h < 1 {
        return Err(Error::InvalidParameter(
            "round count must be at least 1".into(),
        ));
    }
    let dim = e.entries.nrows();
    let base = DMatrix::<f64>::identity(dim, dim) - &e.entries;
    let exact = matrix_power(&base, h);
    let hf = h as f64;
    let choose2 = hf * (hf - 1.0) / 2.0;
    let first_order = &e.entries * hf;
    let e2 = &e.entries * &e.entries;
    let second_order = &e2 * choose2;
    let d = e.diagonal_part();
    let o = e.offdiagonal_part();
    let d2 = &d * &d;
    let o2 = &o * &o;
    let pauli_quadratic_diag = (0..dim).map(|i| choose2 * d2[(i, i)]).collect();
    let coherent_quadratic_diag = (0..dim).map(|i| choose2 * o2[(i, i)]).collect();
    Ok(RoundsReport {
        h,
        exact,
        first_order,
        second_order,
        pauli_quadratic_diag,
        coherent_quadratic_diag,
        crossovers: crossover_estimates(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ProcessMatrix1Q, RotationAxis};
    use crate::codes::RecoveryTable;
    use approx::assert_abs_diff_eq;

    fn rep3() -> StabilizerCode {
        StabilizerCode::repetition(3).unwrap()
    }

    fn bit_flip(p: f64) -> ProcessMatrix1Q {
        ProcessMatrix1Q::pauli_channel(p, 0.0, 0.0).unwrap()
    }

    fn rot_x(theta: f64) -> ProcessMatrix1Q {
        ProcessMatrix1Q::rotation(RotationAxis::X, theta).unwrap()
    }

    #[test]
    fn identity_noise_is_trivial() {
        let code = rep3();
        let noise = NoiseModel::iid(ProcessMatrix1Q::identity(), 3).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        assert_eq!(channels.len(), 4);
        assert_abs_diff_eq!(channels[0].probability, 1.0, epsilon = 1e-15);
        assert!(!channels[0].degenerate);
        assert!((&channels[0].ptm - DMatrix::<f64>::identity(4, 4)).norm() < 1e-14);
        for sc in &channels[1..] {
            assert_eq!(sc.probability, 0.0);
            assert!(sc.degenerate);
        }
    }

    #[test]
    fn single_syndrome_path_matches_distribution() {
        let code = rep3();
        let noise = NoiseModel::iid(rot_x(0.23), 3).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        for sc in &channels {
            let single = logical_channel_factorized(&code, &noise, &sc.syndrome).unwrap();
            assert_eq!(single.probability, sc.probability);
            assert_eq!(single.ptm, sc.ptm);
            assert_eq!(single.degenerate, sc.degenerate);
        }
        // The free recovery helper agrees with the solver method.
        let solver = LogicalChannelSolver::new(&code).unwrap();
        let s10: Syndrome = "10".parse().unwrap();
        let rec = code.recovery_for_syndrome(&s10).unwrap();
        let a = apply_recovery(&code, &channels[s10.index()], &rec).unwrap();
        let b = solver.apply_recovery(&channels[s10.index()], &rec).unwrap();
        assert_eq!(a.ptm, b.ptm);
    }

    #[test]
    fn repetition_bit_flip_reference_values() {
        let code = rep3();
        let p = 0.07;
        let noise = NoiseModel::iid(bit_flip(p), 3).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        let q = 1.0 - p;
        // Trivial syndrome: no flip or all three flipped.
        let p00 = q * q * q + p * p * p;
        assert_abs_diff_eq!(channels[0].probability, p00, epsilon = 1e-14);
        let c = (q * q * q - p * p * p) / p00;
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, c, c]));
        assert!((&channels[0].ptm - expected).norm() < 1e-13);
        // Syndrome 10: single flip on qubit 0 or double flip on 1, 2.
        let s10: Syndrome = "10".parse().unwrap();
        let p10 = p * q * q + p * p * q;
        assert_abs_diff_eq!(channels[s10.index()].probability, p10, epsilon = 1e-14);
        // Recovery turns the conditional channel into the majority-vote one.
        let solver = LogicalChannelSolver::new(&code).unwrap();
        let rec = code.recovery_for_syndrome(&s10).unwrap();
        let corrected = solver.apply_recovery(&channels[s10.index()], &rec).unwrap();
        assert_abs_diff_eq!(corrected.ptm[(3, 3)], 1.0 - 2.0 * p, epsilon = 1e-13);
        assert_abs_diff_eq!(corrected.ptm[(2, 2)], 1.0 - 2.0 * p, epsilon = 1e-13);
        assert_abs_diff_eq!(corrected.ptm[(1, 1)], 1.0, epsilon = 1e-13);
        // Probabilities over all syndromes sum to one.
        let total: f64 = channels.iter().map(|c| c.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn repetition_x_rotation_reference_values() {
        let code = rep3();
        let theta = 0.31f64;
        let noise = NoiseModel::iid(rot_x(theta), 3).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        let (s, c) = theta.sin_cos();
        let p00 = (1.0 + 3.0 * c * c) / 4.0;
        assert_abs_diff_eq!(channels[0].probability, p00, epsilon = 1e-14);
        for sc in &channels[1..] {
            assert_abs_diff_eq!(sc.probability, s * s / 4.0, epsilon = 1e-14);
        }
        // Conditional channel on the trivial syndrome.
        let m = &channels[0].ptm;
        assert_abs_diff_eq!(m[(1, 1)], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            m[(3, 3)],
            (3.0 * c + c * c * c) / (4.0 * p00),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(m[(2, 3)], s * s * s / (4.0 * p00), epsilon = 1e-13);
        // Nontrivial syndrome before recovery: large conditional coherence.
        let m10 = &channels[1].ptm;
        assert_abs_diff_eq!(m10[(3, 3)], -c, epsilon = 1e-12);
        assert_abs_diff_eq!(m10[(2, 3)].abs(), s, epsilon = 1e-12);
    }

    #[test]
    fn x_rotation_average_with_recovery() {
        let code = rep3();
        let theta = 0.31f64;
        let noise = NoiseModel::iid(rot_x(theta), 3).unwrap();
        let solver = LogicalChannelSolver::new(&code).unwrap();
        let channels = solver.syndrome_distribution(&noise).unwrap();
        let (s, c) = theta.sin_cos();

        // Without recovery the off-diagonals cancel exactly over syndromes
        // and the diagonal stays at the physical contraction.
        let avg = average_logical_channel(&channels).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, c, c]));
        assert!(
            (&avg - expected).norm() < 1e-13,
            "unrecovered average {avg}"
        );

        // Minimum-weight recovery leaves a residual logical rotation.
        let table = RecoveryTable::min_weight(&code).unwrap();
        let corrected: Vec<SyndromeChannel> = channels
            .iter()
            .map(|sc| solver.apply_recovery(sc, table.get(&sc.syndrome)).unwrap())
            .collect();
        let avg = average_logical_channel(&corrected).unwrap();
        let dz = c * (1.0 + s * s / 2.0);
        assert_abs_diff_eq!(avg[(0, 0)], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(avg[(1, 1)], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(avg[(2, 2)], dz, epsilon = 1e-13);
        assert_abs_diff_eq!(avg[(3, 3)], dz, epsilon = 1e-13);
        assert_abs_diff_eq!(avg[(2, 3)], -s * s * s / 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(avg[(3, 2)], s * s * s / 2.0, epsilon = 1e-13);
        // Trace-preservation row of the average.
        for col in 1..4 {
            assert_abs_diff_eq!(avg[(0, col)], 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn pauli_noise_gives_diagonal_syndrome_channels() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(97);
        for code in [rep3(), StabilizerCode::five_qubit().unwrap()] {
            let n = code.num_qubits();
            let factors: Vec<ProcessMatrix1Q> = (0..n)
                .map(|_| crate::channels::random_pauli_channel(&mut rng))
                .collect();
            let noise = NoiseModel::product(factors).unwrap();
            assert!(noise.is_pauli());
            for sc in syndrome_distribution(&code, &noise).unwrap() {
                for i in 0..sc.ptm.nrows() {
                    for j in 0..sc.ptm.ncols() {
                        if i != j {
                            assert_eq!(sc.ptm[(i, j)], 0.0, "{} s={}", code.name(), sc.syndrome);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_syndromes_under_stabilizer_axis_rotation() {
        // Z rotations commute with every generator of the repetition code,
        // so only the trivial syndrome carries probability.
        let code = rep3();
        let noise =
            NoiseModel::iid(ProcessMatrix1Q::rotation(RotationAxis::Z, 0.4).unwrap(), 3).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        assert_abs_diff_eq!(channels[0].probability, 1.0, epsilon = 1e-13);
        for sc in &channels[1..] {
            assert!(sc.degenerate, "syndrome {} not degenerate", sc.syndrome);
            assert!(sc.weighted_ptm().norm() < 1e-12);
        }
    }

    #[test]
    fn mixture_linearity() {
        let code = rep3();
        let a = rot_x(0.2);
        let b = bit_flip(0.05);
        let mixed = NoiseModel::correlated(vec![
            NoiseTerm {
                weight: 0.3,
                factors: vec![a; 3],
            },
            NoiseTerm {
                weight: 0.7,
                factors: vec![b; 3],
            },
        ])
        .unwrap();
        let noise_a = NoiseModel::iid(a, 3).unwrap();
        let noise_b = NoiseModel::iid(b, 3).unwrap();
        let solver = LogicalChannelSolver::new(&code).unwrap();
        let mix_channels = solver.syndrome_distribution(&mixed).unwrap();
        let a_channels = solver.syndrome_distribution(&noise_a).unwrap();
        let b_channels = solver.syndrome_distribution(&noise_b).unwrap();
        for ((m, a), b) in mix_channels.iter().zip(&a_channels).zip(&b_channels) {
            let expected = a.weighted_ptm() * 0.3 + b.weighted_ptm() * 0.7;
            assert!((m.weighted_ptm() - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn trivial_code_reproduces_physical_channel() {
        // One qubit, no stabilizers: the logical channel is the channel.
        let code = StabilizerCode::new(
            "trivial",
            1,
            1,
            1,
            vec![],
            vec!["X".parse().unwrap()],
            vec!["Z".parse().unwrap()],
        )
        .unwrap();
        let theta = 0.37f64;
        let ch = ProcessMatrix1Q::rotation(RotationAxis::Z, theta).unwrap();
        let noise = NoiseModel::iid(ch, 1).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        assert_eq!(channels.len(), 1);
        let m = &channels[0].ptm;
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(m[(i, j)], ch.matrix()[(i, j)], epsilon = 1e-13);
            }
        }
        let metrics = channels[0].metrics();
        assert_abs_diff_eq!(metrics.max_offdiag, theta.sin(), epsilon = 1e-13);
        assert_abs_diff_eq!(
            metrics.logical_infidelity,
            (2.0 - 2.0 * theta.cos()) / 6.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn recovery_validation() {
        let code = rep3();
        let noise = NoiseModel::iid(bit_flip(0.1), 3).unwrap();
        let solver = LogicalChannelSolver::new(&code).unwrap();
        let channels = solver.syndrome_distribution(&noise).unwrap();
        // Identity recovery on the trivial syndrome: unchanged.
        let id = PauliOperator::identity(3).unwrap();
        let same = solver.apply_recovery(&channels[0], &id).unwrap();
        assert_eq!(same.ptm, channels[0].ptm);
        // Wrong syndrome is rejected.
        let err = solver.apply_recovery(&channels[1], &id);
        assert!(matches!(err, Err(Error::SyndromeMismatch { .. })));
    }

    #[test]
    fn metrics_reference_values() {
        let id = DMatrix::<f64>::identity(4, 4);
        let m = coherence_metrics(&id);
        assert_eq!(m.logical_infidelity, 0.0);
        assert_eq!(m.max_offdiag, 0.0);
        assert_eq!(m.diag_ratio, 0.0);

        let depol = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.9, 0.9, 0.9]));
        let m = coherence_metrics(&depol);
        assert_abs_diff_eq!(m.logical_infidelity, 0.05, epsilon = 1e-15);
        assert_eq!(m.max_offdiag, 0.0);
    }

    #[test]
    fn rounds_first_power_is_exact() {
        let e = LogicalErrorMatrix::from_channel_matrix(&DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![1.0, 0.99, 0.98, 0.98]),
        ))
        .unwrap();
        let report = rounds_accumulation(&e, 1).unwrap();
        let expected = DMatrix::<f64>::identity(4, 4) - e.entries();
        assert!((report.exact - expected).norm() < 1e-15);
        // Diagonal error matrix: no coherent quadratic contribution.
        assert!(report.coherent_quadratic_diag.iter().all(|&v| v == 0.0));
        assert!(report.crossovers.h_coherent.is_none());
        assert!(report.crossovers.h_critical.is_none());
    }

    #[test]
    fn rounds_crossover_matches_scan() {
        // Error matrix with a known coherent block.
        let mut avg = DMatrix::<f64>::identity(4, 4);
        avg[(2, 2)] = 1.0 - 3e-4;
        avg[(3, 3)] = 1.0 - 3e-4;
        avg[(2, 3)] = -2e-3;
        avg[(3, 2)] = 2e-3;
        let e = LogicalErrorMatrix::from_channel_matrix(&avg).unwrap();
        let cross = crossover_estimates(&e);
        let h_c = cross.h_coherent.unwrap();
        // Scan the two scalar terms directly around the estimate.
        let a = cross.max_diag_error;
        let q = cross.max_coherent_quadratic;
        let term = |h: f64| (h * (h - 1.0) / 2.0) * q - h * a;
        assert!(term(h_c as f64) >= 0.0);
        assert!(term(h_c as f64 - 1.0) < 0.0);
        // 1 + 2a/q = 1 + 2*3e-4/4e-6 = 151.
        assert_eq!(h_c, 151);
    }

    #[test]
    fn matrix_power_agrees_with_iteration() {
        let mut m = DMatrix::<f64>::identity(3, 3);
        m[(0, 1)] = 0.1;
        m[(1, 2)] = -0.05;
        m[(2, 2)] = 0.9;
        let mut iter = DMatrix::<f64>::identity(3, 3);
        for _ in 0..13 {
            iter = &iter * &m;
        }
        assert!((matrix_power(&m, 13) - iter).norm() < 1e-12);
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::correlated(vec![]).is_err());
        let id = ProcessMatrix1Q::identity();
        assert!(NoiseModel::correlated(vec![
            NoiseTerm {
                weight: 0.5,
                factors: vec![id; 2]
            },
            NoiseTerm {
                weight: 0.6,
                factors: vec![id; 2]
            },
        ])
        .is_err());
        assert!(NoiseModel::correlated(vec![
            NoiseTerm {
                weight: 0.5,
                factors: vec![id; 2]
            },
            NoiseTerm {
                weight: 0.5,
                factors: vec![id; 3]
            },
        ])
        .is_err());
        let noise = NoiseModel::iid(rot_x(0.3), 3).unwrap();
        assert_abs_diff_eq!(
            noise.max_infidelity(),
            (2.0 - 2.0 * 0.3f64.cos()) / 6.0,
            epsilon = 1e-14
        );
        // Fixed-axis rotation has a vanishing minimum diagonal error.
        assert_abs_diff_eq!(noise.min_diag_error(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn incomplete_syndrome_sets_are_rejected() {
        let code = rep3();
        let noise = NoiseModel::iid(bit_flip(0.1), 3).unwrap();
        let channels = syndrome_distribution(&code, &noise).unwrap();
        assert!(average_logical_channel(&channels[..3]).is_err());
        let mut dup = channels.clone();
        dup[1] = dup[2].clone();
        assert!(average_logical_channel(&dup).is_err());
    }
}
