//! Brute-force dense verification path.
//!
//! Channels are applied as Kraus conjugations on dense 2^n x 2^n operators,
//! projectors are built as explicit products (I +- g)/2, and logical matrix
//! elements are plain trace inner products. Nothing here shares code with
//! the factorized fast path beyond the Pauli dense matrices and the
//! Kraus-from-process-matrix constructor, so agreement between the two is a
//! meaningful check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::{kraus_from_ptm, KrausSet};
use crate::codes::{StabilizerCode, Syndrome};
use crate::logical::NoiseModel;
use crate::{Error, Result};

/// Default qubit cap (256 x 256 operators).
pub const DEFAULT_MAX_QUBITS: usize = 8;

/// Hard ceiling even when the cap is overridden.
pub const HARD_MAX_QUBITS: usize = 10;

type CMat = DMatrix<Complex64>;

/// Noise model converted to per-qubit Kraus sets, term by term.
#[derive(Clone, Debug)]
pub struct KrausNoise {
    terms: Vec<(f64, Vec<KrausSet>)>,
}

impl KrausNoise {
    pub fn from_noise_model(noise: &NoiseModel) -> Result<Self> {
        let terms = noise
            .terms()
            .iter()
            .map(|t| {
                let sets = t
                    .factors
                    .iter()
                    .map(kraus_from_ptm)
                    .collect::<Result<Vec<_>>>()?;
                Ok((t.weight, sets))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, Vec<KrausSet>)] {
        &self.terms
    }
}

/// A Pauli as a sparse left action: (P m)[r, c] = values[r] * m[r ^ col_xor, c].
struct PauliAction {
    col_xor: usize,
    values: Vec<Complex64>,
}

/// Dense simulation context for one code: projectors for every syndrome and
/// the logical group as sparse Pauli actions, cached at construction.
pub struct DenseOracle {
    n: usize,
    k: usize,
    dim: usize,
    syndrome_len: usize,
    projectors: Vec<CMat>,
    logicals: Vec<PauliAction>,
}

impl DenseOracle {
    pub fn new(code: &StabilizerCode) -> Result<Self> {
        Self::with_max_qubits(code, DEFAULT_MAX_QUBITS)
    }

    /// Builds the context with an explicit qubit cap (clamped to a hard
    /// ceiling).
    pub fn with_max_qubits(code: &StabilizerCode, max_qubits: usize) -> Result<Self> {
        let cap = max_qubits.min(HARD_MAX_QUBITS);
        let n = code.num_qubits();
        if n > cap {
            return Err(Error::ResourceLimit(format!(
                "dense oracle for {n} qubits exceeds the cap of {cap}"
            )));
        }
        let dim = 1usize << n;
        let identity = CMat::identity(dim, dim);
        let gens: Vec<CMat> = code
            .generators()
            .iter()
            .map(|g| g.dense_matrix_capped(cap))
            .collect::<Result<Vec<_>>>()?;
        let mut projectors = Vec::with_capacity(code.num_syndromes());
        for s in 0..code.num_syndromes() {
            let mut p = identity.clone();
            for (j, g) in gens.iter().enumerate() {
                let sign = if (s >> j) & 1 == 0 { 1.0 } else { -1.0 };
                let factor = (&identity + g * Complex64::new(sign, 0.0)) * Complex64::new(0.5, 0.0);
                p = factor * p;
            }
            projectors.push(p);
        }
        let logicals = code
            .logical_group()?
            .iter()
            .map(|l| Self::pauli_action(n, l))
            .collect();
        Ok(Self {
            n,
            k: code.num_logical(),
            dim,
            syndrome_len: code.syndrome_len(),
            projectors,
            logicals,
        })
    }

    /// Sparse action of a Pauli: a single nonzero per row with unit-modulus
    /// value, matching the dense-matrix convention (qubit 0 most
    /// significant).
    fn pauli_action(n: usize, p: &crate::pauli::PauliOperator) -> PauliAction {
        let dim = 1usize << n;
        let mut rx = 0usize;
        let mut rz = 0usize;
        for j in 0..n {
            let bit = n - 1 - j;
            rx |= (((p.x_bits() >> j) & 1) as usize) << bit;
            rz |= (((p.z_bits() >> j) & 1) as usize) << bit;
        }
        let y_count = (p.x_bits() & p.z_bits()).count_ones();
        let base = match (p.phase_exp() as u32 + 3 * y_count) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let values = (0..dim)
            .map(|r| {
                if (r & rz).count_ones().is_multiple_of(2) {
                    base
                } else {
                    -base
                }
            })
            .collect();
        PauliAction {
            col_xor: rx,
            values,
        }
    }

    /// Left multiplication by the sparse Pauli action.
    fn pauli_mul(&self, a: &PauliAction, m: &CMat) -> CMat {
        CMat::from_fn(self.dim, self.dim, |r, c| {
            a.values[r] * m[(r ^ a.col_xor, c)]
        })
    }

    pub fn logical_dim(&self) -> usize {
        self.logicals.len()
    }

    pub fn projector(&self, s: &Syndrome) -> &CMat {
        &self.projectors[s.index()]
    }

    /// Applies one Kraus operator at `qubit` from the left: K rho.
    fn apply_left(&self, k: &nalgebra::Matrix2<Complex64>, qubit: usize, m: &CMat) -> CMat {
        // Qubit 0 is the most significant index bit.
        let stride = 1usize << (self.n - 1 - qubit);
        let mut out = CMat::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            for row in 0..self.dim {
                if row & stride != 0 {
                    continue;
                }
                let r0 = row;
                let r1 = row | stride;
                let a = m[(r0, col)];
                let b = m[(r1, col)];
                out[(r0, col)] = k[(0, 0)] * a + k[(0, 1)] * b;
                out[(r1, col)] = k[(1, 0)] * a + k[(1, 1)] * b;
            }
        }
        out
    }

    /// Applies the adjoint from the right: rho K^H.
    fn apply_right_adjoint(
        &self,
        k: &nalgebra::Matrix2<Complex64>,
        qubit: usize,
        m: &CMat,
    ) -> CMat {
        let stride = 1usize << (self.n - 1 - qubit);
        let mut out = CMat::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            if col & stride != 0 {
                continue;
            }
            let c0 = col;
            let c1 = col | stride;
            for row in 0..self.dim {
                let a = m[(row, c0)];
                let b = m[(row, c1)];
                out[(row, c0)] = a * k[(0, 0)].conj() + b * k[(0, 1)].conj();
                out[(row, c1)] = a * k[(1, 0)].conj() + b * k[(1, 1)].conj();
            }
        }
        out
    }

    /// Applies the single-qubit channel sum_K K rho K^H at `qubit`.
    fn apply_qubit_channel(&self, kraus: &KrausSet, qubit: usize, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for k in kraus.ops() {
            let left = self.apply_left(k, qubit, m);
            out += self.apply_right_adjoint(k, qubit, &left);
        }
        out
    }

    /// Applies the full local noise to a dense operator.
    pub fn apply_noise(&self, noise: &KrausNoise, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (weight, sets) in noise.terms() {
            let mut acc = m.clone();
            for (qubit, kraus) in sets.iter().enumerate() {
                acc = self.apply_qubit_channel(kraus, qubit, &acc);
            }
            out += acc * Complex64::new(*weight, 0.0);
        }
        out
    }

    /// Syndrome probability 2^-k tr(P_s N(P_0)) under the maximally mixed
    /// code-space input.
    pub fn syndrome_probability(&self, noise: &KrausNoise, s: &Syndrome) -> Result<f64> {
        self.check_syndrome(s)?;
        let evolved = self.apply_noise(noise, &self.projectors[0]);
        let tr = hs_inner(&self.projectors[s.index()], &evolved);
        Ok(tr.re / (1 << self.k) as f64)
    }

    /// Unnormalized logical element p(s) N(s)_(l, l') = tr((L P_s)^H N(L' P_0)) / 2^k.
    pub fn unnormalized_element(
        &self,
        noise: &KrausNoise,
        s: &Syndrome,
        l: usize,
        lp: usize,
    ) -> Result<f64> {
        self.check_syndrome(s)?;
        let input = self.pauli_mul(&self.logicals[lp], &self.projectors[0]);
        let evolved = self.apply_noise(noise, &input);
        let bra = self.pauli_mul(&self.logicals[l], &self.projectors[s.index()]);
        let val = hs_inner(&bra, &evolved);
        Ok(val.re / (1 << self.k) as f64)
    }

    /// Normalized logical element tr((L P_s)^H N(L' P_0)) / (p(s) 2^k).
    pub fn logical_element(
        &self,
        noise: &KrausNoise,
        s: &Syndrome,
        l: usize,
        lp: usize,
    ) -> Result<f64> {
        let p = self.syndrome_probability(noise, s)?;
        Ok(self.unnormalized_element(noise, s, l, lp)? / p)
    }

    /// Full conditional channel for one syndrome: (p(s), unnormalized p N).
    pub fn syndrome_channel_unnormalized(
        &self,
        noise: &KrausNoise,
        s: &Syndrome,
    ) -> Result<(f64, DMatrix<f64>)> {
        self.check_syndrome(s)?;
        let all = self.full_distribution(noise)?;
        Ok(all[s.index()].clone())
    }

    /// Unnormalized channels for every syndrome at once.
    ///
    /// Each of the 4^k logical inputs is evolved through the noise exactly
    /// once; every (syndrome, output) element is then a trace inner product
    /// tr(P_s L_l N(L_l' P_0)) read off with sparse Pauli actions.
    pub fn full_distribution(&self, noise: &KrausNoise) -> Result<Vec<(f64, DMatrix<f64>)>> {
        let dim = self.logical_dim();
        let scale = 1.0 / (1 << self.k) as f64;
        let num_syndromes = self.projectors.len();
        let mut out = vec![DMatrix::<f64>::zeros(dim, dim); num_syndromes];
        for lp in 0..dim {
            let input = self.pauli_mul(&self.logicals[lp], &self.projectors[0]);
            let evolved = self.apply_noise(noise, &input);
            for l in 0..dim {
                let m = self.pauli_mul(&self.logicals[l], &evolved);
                for (s, proj) in self.projectors.iter().enumerate() {
                    // tr(P_s * M) with P_s Hermitian.
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..self.dim {
                        for i in 0..self.dim {
                            acc += proj[(i, j)] * m[(j, i)];
                        }
                    }
                    out[s][(l, lp)] = acc.re * scale;
                }
            }
        }
        Ok(out.into_iter().map(|m| (m[(0, 0)], m)).collect())
    }

    fn check_syndrome(&self, s: &Syndrome) -> Result<()> {
        if s.len() != self.syndrome_len {
            return Err(Error::InvalidParameter(format!(
                "syndrome length {} does not match the code ({})",
                s.len(),
                self.syndrome_len
            )));
        }
        Ok(())
    }
}

/// Hilbert-Schmidt inner product tr(A^H B).
fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}
