//! Exact arithmetic over the n-qubit Pauli group in symplectic form.
//!
//! An operator is a pair of bit vectors (X and Z components, one bit per
//! qubit) plus a tracked power of i. The canonical representative with
//! `phase_exp == 0` is an element of {I, X, Y, Z}^⊗n where the x=1, z=1 site
//! is the Hermitian Y. With that convention every Hermitian product of
//! representatives is ±1 times a representative, which is what the logical
//! channel extraction relies on.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Maximum qubit count supported by the packed representation.
pub const MAX_QUBITS: usize = 64;

/// Default cap on dense-matrix construction (256 x 256).
pub const DEFAULT_DENSE_QUBITS: usize = 8;

/// Hard ceiling for dense-matrix construction, env overrides included.
pub const MAX_DENSE_QUBITS: usize = 10;

/// Single-qubit Pauli, ordered to match the process-matrix basis (I, X, Y, Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    /// Index into the (I, X, Y, Z) basis ordering.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_xz(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// An n-qubit Pauli operator `i^phase_exp * P` with `P` a canonical
/// representative in {I, X, Y, Z}^⊗n.
///
/// Values are immutable; every operation returns a new operator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x_bits: u64,
    z_bits: u64,
    phase_exp: u8,
}

impl PauliOperator {
    fn check_qubits(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount { n, max: MAX_QUBITS });
        }
        Ok(())
    }

    fn mask(n: usize) -> u64 {
        if n == MAX_QUBITS {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// Identity on `n` qubits.
    pub fn identity(n: usize) -> Result<Self> {
        Self::check_qubits(n)?;
        Ok(Self {
            n,
            x_bits: 0,
            z_bits: 0,
            phase_exp: 0,
        })
    }

    /// Single-qubit Pauli `p` at `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Result<Self> {
        Self::check_qubits(n)?;
        if qubit >= n {
            return Err(Error::InvalidParameter(format!(
                "qubit index {qubit} out of range for {n} qubits"
            )));
        }
        let (x, z) = p.xz();
        Ok(Self {
            n,
            x_bits: (x as u64) << qubit,
            z_bits: (z as u64) << qubit,
            phase_exp: 0,
        })
    }

    /// Builds an operator from packed symplectic bits.
    pub fn from_bits(n: usize, x_bits: u64, z_bits: u64, phase_exp: u8) -> Result<Self> {
        Self::check_qubits(n)?;
        let m = Self::mask(n);
        if x_bits & !m != 0 || z_bits & !m != 0 {
            return Err(Error::InvalidParameter(
                "symplectic bits set beyond the qubit count".into(),
            ));
        }
        Ok(Self {
            n,
            x_bits,
            z_bits,
            phase_exp: phase_exp % 4,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    /// Power of i carried relative to the canonical representative.
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    /// The Pauli acting on `qubit`.
    #[inline]
    pub fn pauli_at(&self, qubit: usize) -> Pauli {
        debug_assert!(qubit < self.n);
        Pauli::from_xz(
            (self.x_bits >> qubit) & 1 == 1,
            (self.z_bits >> qubit) & 1 == 1,
        )
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0 && self.phase_exp == 0
    }

    /// True when the operator equals ± a representative (phase 1 or -1).
    pub fn is_hermitian(&self) -> bool {
        self.phase_exp.is_multiple_of(2)
    }

    /// The canonical representative: same letters, phase cleared.
    pub fn representative(&self) -> Self {
        Self {
            phase_exp: 0,
            ..*self
        }
    }

    /// Returns the operator multiplied by -1.
    pub fn negated(&self) -> Self {
        Self {
            phase_exp: (self.phase_exp + 2) % 4,
            ..*self
        }
    }

    /// Number of qubits acted on nontrivially.
    pub fn weight(&self) -> usize {
        (self.x_bits | self.z_bits).count_ones() as usize
    }

    /// Exact group product including the accumulated phase.
    ///
    /// Per qubit, with representatives P(x, z) = i^{xz} X^x Z^z (so P(1,1) is
    /// the Hermitian Y), the product P(a)P(b) = i^g P(a XOR b) with
    /// g = x_a z_a + x_b z_b - x_c z_c + 2 z_a x_b (mod 4).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let x = self.x_bits ^ other.x_bits;
        let z = self.z_bits ^ other.z_bits;
        let g = (self.x_bits & self.z_bits).count_ones()
            + (other.x_bits & other.z_bits).count_ones()
            + 3 * ((x & z).count_ones())
            + 2 * ((self.z_bits & other.x_bits).count_ones());
        let phase_exp = ((self.phase_exp as u32 + other.phase_exp as u32 + g) % 4) as u8;
        Ok(Self {
            n: self.n,
            x_bits: x,
            z_bits: z,
            phase_exp,
        })
    }

    /// True iff the two operators commute (symplectic form vanishes mod 2).
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::QubitCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let form =
            (self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones();
        Ok(form.is_multiple_of(2))
    }

    /// Sign of a Hermitian operator relative to its representative.
    ///
    /// Callers that only ever form Hermitian products (logical operator times
    /// stabilizer element) get ±1 here; an odd power of i signals a
    /// convention bug upstream and is reported as an error.
    pub fn chi_sign(&self) -> Result<i8> {
        match self.phase_exp {
            0 => Ok(1),
            2 => Ok(-1),
            p => Err(Error::NonHermitianPhase { phase_exp: p }),
        }
    }

    /// Dense matrix with the default qubit cap.
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.dense_matrix_capped(DEFAULT_DENSE_QUBITS)
    }

    /// Dense 2^n x 2^n matrix including the i^phase_exp prefactor.
    ///
    /// Qubit 0 is the leftmost string position and the most significant index
    /// bit, matching the Kronecker order kron(q0, q1, ..).
    pub fn dense_matrix_capped(&self, max_qubits: usize) -> Result<DMatrix<Complex64>> {
        let cap = max_qubits.min(MAX_DENSE_QUBITS);
        if self.n > cap {
            return Err(Error::ResourceLimit(format!(
                "dense matrix for {} qubits exceeds the cap of {cap}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        // Map qubit j to index bit (n-1-j).
        let mut rx = 0u64;
        let mut rz = 0u64;
        for j in 0..self.n {
            let bit = self.n - 1 - j;
            rx |= ((self.x_bits >> j) & 1) << bit;
            rz |= ((self.z_bits >> j) & 1) << bit;
        }
        // Each row has a single nonzero column r ^ rx with value
        // i^{phase + 3 * w_Y} * (-1)^{parity(r & rz)}.
        let y_count = (self.x_bits & self.z_bits).count_ones();
        let base_power = (self.phase_exp as u32 + 3 * y_count) % 4;
        let base = match base_power {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for r in 0..dim {
            let col = r ^ rx as usize;
            let sign = if ((r as u64 & rz).count_ones()).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            m[(r, col)] = base * sign;
        }
        Ok(m)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase_exp {
            0 => {}
            1 => write!(f, "i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for j in 0..self.n {
            write!(f, "{}", self.pauli_at(j).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses strings like "XIZ", "+YY", "-ZZI". The leading sign sets the
    /// phase to +1 or -1; imaginary phases are not accepted from text.
    fn from_str(s: &str) -> Result<Self> {
        let mut phase_exp = 0u8;
        let mut rest = s;
        if let Some(stripped) = s.strip_prefix('+') {
            rest = stripped;
        } else if let Some(stripped) = s.strip_prefix('-').or_else(|| s.strip_prefix('\u{2212}')) {
            phase_exp = 2;
            rest = stripped;
        }
        if rest.is_empty() {
            return Err(Error::PauliParse {
                input: s.into(),
                reason: "empty Pauli string".into(),
            });
        }
        let n = rest.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::PauliParse {
                input: s.into(),
                reason: format!("more than {MAX_QUBITS} qubits"),
            });
        }
        let mut x_bits = 0u64;
        let mut z_bits = 0u64;
        for (j, c) in rest.chars().enumerate() {
            let p = Pauli::from_char(c).ok_or_else(|| Error::PauliParse {
                input: s.into(),
                reason: format!("unexpected character {c:?}"),
            })?;
            let (x, z) = p.xz();
            x_bits |= (x as u64) << j;
            z_bits |= (z as u64) << j;
        }
        Ok(Self {
            n,
            x_bits,
            z_bits,
            phase_exp,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pauli(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    /// Reference dense matrix via explicit Kronecker products.
    fn dense_reference(p: &PauliOperator) -> DMatrix<Complex64> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let single = |k: Pauli| -> DMatrix<Complex64> {
            let e = match k {
                Pauli::I => [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
                Pauli::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
                Pauli::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
                Pauli::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
            };
            DMatrix::from_row_slice(2, 2, &e)
        };
        let mut m = single(p.pauli_at(0));
        for j in 1..p.qubit_count() {
            m = m.kronecker(&single(p.pauli_at(j)));
        }
        let phase = match p.phase_exp() {
            0 => c(1., 0.),
            1 => c(0., 1.),
            2 => c(-1., 0.),
            _ => c(0., -1.),
        };
        m * phase
    }

    fn random_pauli(rng: &mut StdRng, n: usize) -> PauliOperator {
        let mask = if n == 64 { u64::MAX } else { (1 << n) - 1 };
        PauliOperator::from_bits(
            n,
            rng.gen::<u64>() & mask,
            rng.gen::<u64>() & mask,
            rng.gen_range(0..4),
        )
        .unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let x = pauli("X");
        let z = pauli("Z");
        let y = pauli("Y");
        // XZ = -iY
        let xz = x.multiply(&z).unwrap();
        assert_eq!(xz.representative(), y);
        assert_eq!(xz.phase_exp(), 3);
        // ZX = iY
        let zx = z.multiply(&x).unwrap();
        assert_eq!(zx.phase_exp(), 1);
        // XY = iZ, YX = -iZ, YZ = iX, ZY = -iX
        assert_eq!(x.multiply(&y).unwrap().phase_exp(), 1);
        assert_eq!(y.multiply(&x).unwrap().phase_exp(), 3);
        assert_eq!(y.multiply(&z).unwrap().phase_exp(), 1);
        assert_eq!(z.multiply(&y).unwrap().phase_exp(), 3);
    }

    #[test]
    fn identity_and_involution() {
        let p = pauli("XYZ");
        let id = PauliOperator::identity(3).unwrap();
        assert_eq!(id.multiply(&p).unwrap(), p);
        assert_eq!(p.multiply(&id).unwrap(), p);
        let sq = p.multiply(&p).unwrap();
        assert!(sq.is_identity());
        assert_eq!(sq.phase_exp(), 0);
    }

    #[test]
    fn weight_counts_nontrivial_sites() {
        assert_eq!(PauliOperator::identity(5).unwrap().weight(), 0);
        assert_eq!(pauli("XIZ").weight(), 2);
        assert_eq!(pauli("XYZ").weight(), 3);
    }

    #[test]
    fn commutation_matches_expectation() {
        assert!(pauli("XX").commutes(&pauli("ZZ")).unwrap());
        assert!(!pauli("XI").commutes(&pauli("ZI")).unwrap());
        let p = pauli("XYZI");
        assert!(p.commutes(&p).unwrap());
    }

    #[test]
    fn chi_sign_conventions() {
        assert_eq!(pauli("XZY").chi_sign().unwrap(), 1);
        // Z*X*Z*X = -I: phase_exp 2 after two anticommuting swaps.
        let zx = pauli("Z").multiply(&pauli("X")).unwrap();
        let sq = zx.multiply(&zx).unwrap();
        assert_eq!(sq.chi_sign().unwrap(), -1);
        // X*Z carries phase -i and must be rejected.
        let xz = pauli("X").multiply(&pauli("Z")).unwrap();
        assert!(matches!(
            xz.chi_sign(),
            Err(Error::NonHermitianPhase { phase_exp: 3 })
        ));
    }

    #[test]
    fn dense_single_qubit_values() {
        let z = pauli("Z").dense_matrix().unwrap();
        assert_eq!(z[(0, 0)], Complex64::new(1., 0.));
        assert_eq!(z[(1, 1)], Complex64::new(-1., 0.));
        let y = pauli("Y").dense_matrix().unwrap();
        assert_eq!(y[(0, 1)], Complex64::new(0., -1.));
        assert_eq!(y[(1, 0)], Complex64::new(0., 1.));
    }

    #[test]
    fn dense_matches_kronecker_reference() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let p = random_pauli(&mut rng, n);
            assert_eq!(p.dense_matrix().unwrap(), dense_reference(&p));
        }
    }

    #[test]
    fn product_matches_dense_product() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=4);
            let p = random_pauli(&mut rng, n);
            let q = random_pauli(&mut rng, n);
            let prod = p.multiply(&q).unwrap();
            let lhs = prod.dense_matrix().unwrap();
            let rhs = p.dense_matrix().unwrap() * q.dense_matrix().unwrap();
            // Entries are exact units of i; compare bitwise.
            assert_eq!(lhs, rhs, "p={p} q={q} prod={prod}");
        }
    }

    #[test]
    fn commutes_agrees_with_dense_commutator() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..2_000 {
            let n = rng.gen_range(1..=4);
            let p = random_pauli(&mut rng, n);
            let q = random_pauli(&mut rng, n);
            let pq = p.dense_matrix().unwrap() * q.dense_matrix().unwrap();
            let qp = q.dense_matrix().unwrap() * p.dense_matrix().unwrap();
            let commutator_zero = (pq - qp).iter().all(|c| c.norm() == 0.0);
            assert_eq!(p.commutes(&q).unwrap(), commutator_zero);
        }
    }

    #[test]
    fn weight_subadditive_under_product() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..2_000 {
            let n = rng.gen_range(1..=16);
            let p = random_pauli(&mut rng, n);
            let q = random_pauli(&mut rng, n);
            let prod = p.multiply(&q).unwrap();
            assert!(prod.weight() <= p.weight() + q.weight());
        }
    }

    #[test]
    fn chi_sign_reconstructs_hermitian_operators() {
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..500 {
            let n = rng.gen_range(1..=3);
            let mut p = random_pauli(&mut rng, n);
            if !p.is_hermitian() {
                p = PauliOperator::from_bits(n, p.x_bits(), p.z_bits(), p.phase_exp() + 1).unwrap();
            }
            let sign = p.chi_sign().unwrap() as f64;
            let recon = p.representative().dense_matrix().unwrap() * Complex64::new(sign, 0.);
            assert_eq!(recon, p.dense_matrix().unwrap());
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["XIZ", "-ZZI", "YYYY", "I"] {
            let p = pauli(s);
            let printed = p.to_string();
            let normalized = s.trim_start_matches('+');
            assert_eq!(printed, normalized);
        }
        assert!("".parse::<PauliOperator>().is_err());
        assert!("XQ".parse::<PauliOperator>().is_err());
        assert_eq!(pauli("+XX"), pauli("XX"));
        assert_eq!(pauli("-XX").phase_exp(), 2);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let p = pauli("XX");
        let q = pauli("X");
        assert!(p.multiply(&q).is_err());
        assert!(p.commutes(&q).is_err());
    }

    #[test]
    fn dense_cap_is_enforced() {
        let p = PauliOperator::identity(9).unwrap();
        assert!(p.dense_matrix().is_err());
        assert!(p.dense_matrix_capped(10).is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
            let mask = (1u64 << n) - 1;
            (0..=mask, 0..=mask, 0u8..4)
                .prop_map(move |(x, z, p)| PauliOperator::from_bits(n, x, z, p).unwrap())
        }

        proptest! {
            #[test]
            fn group_product_is_associative(
                (a, b, c) in (1usize..=4).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n), arb_pauli(n)))
            ) {
                let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
                let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn product_phase_matches_dense(
                (a, b) in (1usize..=3).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n)))
            ) {
                let prod = a.multiply(&b).unwrap();
                let dense = a.dense_matrix().unwrap() * b.dense_matrix().unwrap();
                prop_assert_eq!(prod.dense_matrix().unwrap(), dense);
            }

            #[test]
            fn inverse_is_self_up_to_phase(p in (1usize..=6).prop_flat_map(arb_pauli)) {
                // P * P = +-I for any tracked phase.
                let sq = p.multiply(&p).unwrap();
                prop_assert_eq!(sq.x_bits(), 0);
                prop_assert_eq!(sq.z_bits(), 0);
                prop_assert_eq!(sq.phase_exp() % 2, 0);
            }

            #[test]
            fn display_parse_round_trip(p in (1usize..=8).prop_flat_map(arb_pauli)) {
                let rep = if p.is_hermitian() { p } else { p.representative() };
                let back: PauliOperator = rep.to_string().parse().unwrap();
                prop_assert_eq!(back, rep);
            }
        }
    }
}
