//! Stabilizer code definitions, syndromes, projector signs, distance
//! verification and minimum-weight recovery operators.
//!
//! A code is validated in full at construction: commuting independent
//! generators with positive sign (so -I is never in the group), logical
//! pairs commuting with the group and obeying the symplectic pairing, and
//! consistent parameter counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pauli::{Pauli, PauliOperator};
use crate::{Error, Result};

/// Enumeration cap on stabilizer group order (2^24 elements).
pub const MAX_ENUMERATION_BITS: usize = 24;

/// Cap on logical qubit count (logical dimension 4^k).
pub const MAX_LOGICAL_QUBITS: usize = 4;

/// Work budget for brute-force distance verification.
const DISTANCE_BUDGET: u64 = 100_000_000;

/// Measurement outcomes of the stabilizer generators, bit j for generator j.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syndrome {
    bits: u64,
    len: usize,
}

#[allow(clippy::len_without_is_empty)]
impl Syndrome {
    /// Length zero is allowed: a code with no generators (k = n) has the
    /// single empty syndrome.
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_ENUMERATION_BITS {
            return Err(Error::InvalidParameter(format!(
                "syndrome length {len} exceeds {MAX_ENUMERATION_BITS}"
            )));
        }
        if bits >> len != 0 {
            return Err(Error::InvalidParameter(
                "syndrome bits set beyond its length".into(),
            ));
        }
        Ok(Self { bits, len })
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        Self::new(index as u64, len)
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn bit(&self, j: usize) -> bool {
        (self.bits >> j) & 1 == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            write!(f, "{}", if self.bit(j) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome({self})")
    }
}

impl FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let len = s.chars().count();
        let mut bits = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unexpected character {other:?} in syndrome string"
                    )))
                }
            }
        }
        Self::new(bits, len)
    }
}

/// GF(2) row space of symplectic vectors, used for independence and
/// membership tests. Rows are (x_bits, z_bits) packed into a u128.
#[derive(Clone, Debug, Default)]
struct SymplecticSpan {
    rows: Vec<u128>,
}

impl SymplecticSpan {
    fn pack(op: &PauliOperator) -> u128 {
        ((op.x_bits() as u128) << 64) | op.z_bits() as u128
    }

    fn reduce(&self, mut v: u128) -> u128 {
        for &row in &self.rows {
            let pivot = 127 - row.leading_zeros();
            if (v >> pivot) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Inserts the vector unless it is already in the span; returns whether
    /// the rank grew. Rows stay ordered by decreasing pivot.
    fn insert(&mut self, op: &PauliOperator) -> bool {
        let v = self.reduce(Self::pack(op));
        if v == 0 {
            return false;
        }
        let pivot = 127 - v.leading_zeros();
        let pos = self
            .rows
            .iter()
            .position(|r| 127 - r.leading_zeros() < pivot)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, v);
        true
    }

    fn contains(&self, op: &PauliOperator) -> bool {
        self.reduce(Self::pack(op)) == 0
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// An [[n, k, d]] stabilizer code with explicit logical operator pairs.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    k: usize,
    d: usize,
    generators: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
    span: SymplecticSpan,
}

impl StabilizerCode {
    /// Validates every structural invariant and builds the code.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        k: usize,
        d: usize,
        generators: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self> {
        let name = name.into();
        if k == 0 || k > n {
            return Err(Error::InvalidCode(format!(
                "invalid parameters [[{n},{k},{d}]]"
            )));
        }
        if generators.len() != n - k {
            return Err(Error::InvalidCode(format!(
                "expected {} generators for [[{n},{k}]], got {}",
                n - k,
                generators.len()
            )));
        }
        if logical_x.len() != k || logical_z.len() != k {
            return Err(Error::InvalidCode(format!(
                "expected {k} logical X and Z operators, got {} and {}",
                logical_x.len(),
                logical_z.len()
            )));
        }
        for op in generators.iter().chain(&logical_x).chain(&logical_z) {
            if op.qubit_count() != n {
                return Err(Error::InvalidCode(format!(
                    "operator {op} acts on {} qubits, expected {n}",
                    op.qubit_count()
                )));
            }
        }
        for g in &generators {
            if g.phase_exp() != 0 {
                return Err(Error::InvalidCode(format!(
                    "signed generator {g}: the stabilizer group must not contain -I"
                )));
            }
        }
        for l in logical_x.iter().chain(&logical_z) {
            if l.phase_exp() != 0 {
                return Err(Error::InvalidCode(format!(
                    "logical operator {l} must be a canonical representative"
                )));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in generators.iter().skip(i + 1) {
                if !a.commutes(b)? {
                    return Err(Error::InvalidCode(format!(
                        "generators {a} and {b} anticommute"
                    )));
                }
            }
        }
        let mut span = SymplecticSpan::default();
        for g in &generators {
            if !span.insert(g) {
                return Err(Error::InvalidCode(format!("generator {g} is dependent")));
            }
        }
        debug_assert_eq!(span.rank(), n - k);
        for l in logical_x.iter().chain(&logical_z) {
            for g in &generators {
                if !l.commutes(g)? {
                    return Err(Error::InvalidCode(format!(
                        "logical operator {l} anticommutes with generator {g}"
                    )));
                }
            }
        }
        for (i, lx) in logical_x.iter().enumerate() {
            for (j, lz) in logical_z.iter().enumerate() {
                let commute = lx.commutes(lz)?;
                if i == j && commute {
                    return Err(Error::InvalidCode(format!(
                        "logical pair {i} must anticommute: {lx}, {lz}"
                    )));
                }
                if i != j && !commute {
                    return Err(Error::InvalidCode(format!(
                        "logical X {i} and logical Z {j} must commute"
                    )));
                }
            }
        }
        for (i, a) in logical_x.iter().enumerate() {
            for b in logical_x.iter().skip(i + 1) {
                if !a.commutes(b)? {
                    return Err(Error::InvalidCode(
                        "logical X operators must commute".into(),
                    ));
                }
            }
        }
        for (i, a) in logical_z.iter().enumerate() {
            for b in logical_z.iter().skip(i + 1) {
                if !a.commutes(b)? {
                    return Err(Error::InvalidCode(
                        "logical Z operators must commute".into(),
                    ));
                }
            }
        }
        Ok(Self {
            name,
            n,
            k,
            d,
            generators,
            logical_x,
            logical_z,
            span,
        })
    }

    /// Builtin code by CLI-style name: `repetition:N`, `five_qubit`, `steane`.
    pub fn from_name(name: &str) -> Result<Self> {
        if let Some(size) = name.strip_prefix("repetition:") {
            let n: usize = size
                .parse()
                .map_err(|_| Error::InvalidCode(format!("bad repetition size in {name:?}")))?;
            return Self::repetition(n);
        }
        match name {
            "five_qubit" => Self::five_qubit(),
            "steane" => Self::steane(),
            other => Err(Error::InvalidCode(format!(
                "unknown builtin code {other:?}"
            ))),
        }
    }

    /// The n-qubit bit-flip repetition code (n odd). As a quantum code its
    /// distance is 1 (any single Z is undetectable); against pure X noise
    /// its effective distance is n.
    pub fn repetition(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidCode(format!(
                "repetition code size {n} must be odd and at least 3"
            )));
        }
        let mut generators = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let zi = PauliOperator::single(n, i, Pauli::Z)?;
            let zj = PauliOperator::single(n, i + 1, Pauli::Z)?;
            generators.push(zi.multiply(&zj)?);
        }
        let xbar = PauliOperator::from_bits(n, (1u64 << n) - 1, 0, 0)?;
        let zbar = PauliOperator::single(n, 0, Pauli::Z)?;
        Self::new(
            format!("repetition:{n}"),
            n,
            1,
            1,
            generators,
            vec![xbar],
            vec![zbar],
        )
    }

    /// The `[[5,1,3]]` code, generators the cyclic shifts of XZZXI.
    pub fn five_qubit() -> Result<Self> {
        let generators = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            "five_qubit",
            5,
            1,
            3,
            generators,
            vec!["XXXXX".parse()?],
            vec!["ZZZZZ".parse()?],
        )
    }

    /// The `[[7,1,3]]` CSS code built from the `[7,4,3]` Hamming code.
    pub fn steane() -> Result<Self> {
        let generators = [
            "IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ",
        ]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<_>>>()?;
        Self::new(
            "steane",
            7,
            1,
            3,
            generators,
            vec!["XXXXXXX".parse()?],
            vec!["ZZZZZZZ".parse()?],
        )
    }

    /// Loads and validates a code from its JSON description.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CodeSpec = serde_json::from_str(text)?;
        spec.build()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_logical(&self) -> usize {
        self.k
    }

    /// The claimed distance.
    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    pub fn syndrome_len(&self) -> usize {
        self.n - self.k
    }

    pub fn num_syndromes(&self) -> usize {
        1usize << (self.n - self.k)
    }

    /// Iterates all 2^(n-k) stabilizer elements as (exponent bits, element).
    ///
    /// Element `a` is the product of the generators selected by the bits of
    /// `a`; every element carries phase +1 by the group invariants.
    pub fn stabilizer_elements(&self) -> Result<StabilizerElements<'_>> {
        if self.syndrome_len() > MAX_ENUMERATION_BITS {
            return Err(Error::ResourceLimit(format!(
                "stabilizer group with 2^{} elements exceeds the enumeration cap",
                self.syndrome_len()
            )));
        }
        Ok(StabilizerElements {
            code: self,
            next: 0,
        })
    }

    /// Sign of stabilizer element `a` in the expansion of the projector onto
    /// syndrome `s`: (-1)^(a . s).
    pub fn phi_sign(&self, exponents: u64, s: &Syndrome) -> Result<i8> {
        if s.len() != self.syndrome_len() {
            return Err(Error::InvalidParameter(format!(
                "syndrome length {} does not match the code ({})",
                s.len(),
                self.syndrome_len()
            )));
        }
        if exponents >> self.syndrome_len() != 0 {
            return Err(Error::InvalidParameter(
                "exponent bits set beyond the generator count".into(),
            ));
        }
        Ok(if (exponents & s.bits()).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        })
    }

    /// Syndrome of an error: bit j set iff the error anticommutes with
    /// generator j.
    pub fn syndrome_of(&self, e: &PauliOperator) -> Result<Syndrome> {
        if e.qubit_count() != self.n {
            return Err(Error::QubitCountMismatch {
                left: e.qubit_count(),
                right: self.n,
            });
        }
        let mut bits = 0u64;
        for (j, g) in self.generators.iter().enumerate() {
            if !e.commutes(g)? {
                bits |= 1 << j;
            }
        }
        Syndrome::new(bits, self.syndrome_len())
    }

    /// True iff the operator is an element of the stabilizer group up to
    /// phase.
    pub fn in_stabilizer_group(&self, op: &PauliOperator) -> bool {
        self.span.contains(op)
    }

    /// Brute-force code distance: the minimum weight over Pauli operators
    /// with trivial syndrome that act nontrivially on the code space.
    pub fn verify_distance(&self) -> Result<usize> {
        let mut budget: u64 = 0;
        for w in 1..=self.n {
            budget = budget.saturating_add(binomial(self.n, w).saturating_mul(3u64.pow(w as u32)));
            if budget > DISTANCE_BUDGET {
                return Err(Error::ResourceLimit(format!(
                    "distance search through weight {w} exceeds the work budget"
                )));
            }
            let mut found = false;
            self.for_each_weight_w(w, |op| {
                if found {
                    return;
                }
                let s = self.syndrome_of(&op).expect("matching qubit count");
                if s.is_trivial() && !self.in_stabilizer_group(&op) {
                    found = true;
                }
            });
            if found {
                return Ok(w);
            }
        }
        Err(Error::InvalidCode(
            "no logical operator found below weight n".into(),
        ))
    }

    /// Minimum-weight recovery operator for the syndrome, ties broken by
    /// lexicographic order of the Pauli string.
    pub fn recovery_for_syndrome(&self, s: &Syndrome) -> Result<PauliOperator> {
        if s.len() != self.syndrome_len() {
            return Err(Error::InvalidParameter(format!(
                "syndrome length {} does not match the code ({})",
                s.len(),
                self.syndrome_len()
            )));
        }
        if s.is_trivial() {
            return PauliOperator::identity(self.n);
        }
        for w in 1..=self.n {
            let mut best: Option<(String, PauliOperator)> = None;
            self.for_each_weight_w(w, |op| {
                let sy = self.syndrome_of(&op).expect("matching qubit count");
                if sy == *s {
                    let key = op.to_string();
                    if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                        best = Some((key, op));
                    }
                }
            });
            if let Some((_, op)) = best {
                return Ok(op);
            }
        }
        Err(Error::InvalidCode(format!("syndrome {s} is unreachable")))
    }

    /// Enumerates all weight-w Paulis (w >= 1).
    fn for_each_weight_w<F: FnMut(PauliOperator)>(&self, w: usize, mut f: F) {
        debug_assert!(w >= 1 && w <= self.n);
        let letters = [Pauli::X, Pauli::Y, Pauli::Z];
        let mut positions: Vec<usize> = (0..w).collect();
        loop {
            let mut choice = vec![0usize; w];
            'letters: loop {
                let mut x_bits = 0u64;
                let mut z_bits = 0u64;
                for (pos, &c) in positions.iter().zip(&choice) {
                    let (x, z) = letters[c].xz();
                    x_bits |= (x as u64) << pos;
                    z_bits |= (z as u64) << pos;
                }
                f(PauliOperator::from_bits(self.n, x_bits, z_bits, 0)
                    .expect("weight-w construction is in range"));
                // Odometer over the letter choices.
                for slot in choice.iter_mut() {
                    *slot += 1;
                    if *slot < 3 {
                        continue 'letters;
                    }
                    *slot = 0;
                }
                break;
            }
            if !next_combination(&mut positions, self.n) {
                return;
            }
        }
    }

    /// The projective logical Pauli group as canonical representatives,
    /// ordered per logical qubit as (I, X, Y, Z), leftmost qubit most
    /// significant: the base-4 digits of the index select the factors.
    pub fn logical_group(&self) -> Result<Vec<PauliOperator>> {
        if self.k > MAX_LOGICAL_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "logical dimension 4^{} exceeds the cap of 4^{MAX_LOGICAL_QUBITS}",
                self.k
            )));
        }
        let dim = 1usize << (2 * self.k);
        let mut out = Vec::with_capacity(dim);
        for idx in 0..dim {
            let mut acc = PauliOperator::identity(self.n)?;
            for j in 0..self.k {
                let digit = (idx >> (2 * (self.k - 1 - j))) & 3;
                let factor = match digit {
                    0 => None,
                    1 => Some(self.logical_x[j]),
                    2 => Some(
                        self.logical_x[j]
                            .multiply(&self.logical_z[j])?
                            .representative(),
                    ),
                    _ => Some(self.logical_z[j]),
                };
                if let Some(f) = factor {
                    acc = acc.multiply(&f)?;
                }
            }
            out.push(acc.representative());
        }
        Ok(out)
    }
}

/// Advances to the next w-combination of {0, .., n-1}; false when exhausted.
fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let w = positions.len();
    let mut i = w;
    while i > 0 {
        i -= 1;
        if positions[i] < n - (w - i) {
            positions[i] += 1;
            for j in i + 1..w {
                positions[j] = positions[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut out: u64 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    out
}

/// Iterator over all stabilizer elements with exact phase tracking.
pub struct StabilizerElements<'a> {
    code: &'a StabilizerCode,
    next: u64,
}

impl Iterator for StabilizerElements<'_> {
    type Item = (u64, PauliOperator);

    fn next(&mut self) -> Option<Self::Item> {
        let total = 1u64 << self.code.syndrome_len();
        if self.next >= total {
            return None;
        }
        let a = self.next;
        self.next += 1;
        let mut acc = PauliOperator::identity(self.code.n).expect("valid qubit count");
        for (j, g) in self.code.generators.iter().enumerate() {
            if (a >> j) & 1 == 1 {
                acc = acc.multiply(g).expect("equal qubit counts");
            }
        }
        // Products of commuting generators are Hermitian but may carry a -1
        // sign relative to the canonical representative (X-type times Z-type
        // with even overlap); the sign is part of the element.
        debug_assert!(
            acc.is_hermitian(),
            "stabilizer element with imaginary phase"
        );
        Some((a, acc))
    }
}

/// JSON description of a custom code.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub generators: Vec<String>,
    pub logical_x: Vec<String>,
    pub logical_z: Vec<String>,
}

impl CodeSpec {
    pub fn build(&self) -> Result<StabilizerCode> {
        let parse_all = |items: &[String]| -> Result<Vec<PauliOperator>> {
            items.iter().map(|s| s.parse()).collect()
        };
        StabilizerCode::new(
            self.name
                .clone()
                .unwrap_or_else(|| format!("custom[[{},{},{}]]", self.n, self.k, self.d)),
            self.n,
            self.k,
            self.d,
            parse_all(&self.generators)?,
            parse_all(&self.logical_x)?,
            parse_all(&self.logical_z)?,
        )
    }
}

/// Syndrome-indexed table of recovery operators.
#[derive(Clone, Debug)]
pub struct RecoveryTable {
    ops: Vec<PauliOperator>,
}

impl RecoveryTable {
    /// Minimum-weight table over every syndrome of the code.
    pub fn min_weight(code: &StabilizerCode) -> Result<Self> {
        let len = code.syndrome_len();
        let ops = (0..code.num_syndromes())
            .map(|i| code.recovery_for_syndrome(&Syndrome::from_index(i, len)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ops })
    }

    /// Custom table from (syndrome string, Pauli string) pairs; must cover
    /// every syndrome and each operator must produce its syndrome.
    pub fn from_pairs(code: &StabilizerCode, pairs: &[(String, String)]) -> Result<Self> {
        let len = code.syndrome_len();
        let mut ops: Vec<Option<PauliOperator>> = vec![None; code.num_syndromes()];
        for (syn_str, op_str) in pairs {
            let s: Syndrome = syn_str.parse()?;
            if s.len() != len {
                return Err(Error::InvalidParameter(format!(
                    "syndrome {syn_str} has length {}, expected {len}",
                    s.len()
                )));
            }
            let op: PauliOperator = op_str.parse()?;
            let actual = code.syndrome_of(&op)?;
            if actual != s {
                return Err(Error::SyndromeMismatch {
                    expected: s.to_string(),
                    found: actual.to_string(),
                });
            }
            ops[s.index()] = Some(op);
        }
        let ops = ops
            .into_iter()
            .enumerate()
            .map(|(i, op)| {
                op.ok_or_else(|| {
                    Error::InvalidParameter(format!("recovery table is missing syndrome index {i}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ops })
    }

    pub fn get(&self, s: &Syndrome) -> &PauliOperator {
        &self.ops[s.index()]
    }

    pub fn ops(&self) -> &[PauliOperator] {
        &self.ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn dense_projector(code: &StabilizerCode, s: &Syndrome) -> DMatrix<Complex64> {
        // Sum form used only as a test reference.
        let dim = 1usize << code.num_qubits();
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for (a, elem) in code.stabilizer_elements().unwrap() {
            let sign = code.phi_sign(a, s).unwrap() as f64;
            acc += elem.dense_matrix().unwrap() * Complex64::new(sign, 0.0);
        }
        acc / Complex64::new(code.num_syndromes() as f64, 0.0)
    }

    #[test]
    fn repetition_three_structure() {
        let code = StabilizerCode::repetition(3).unwrap();
        let gens: Vec<String> = code.generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(gens, vec!["ZZI", "IZZ"]);
        assert_eq!(code.logical_x()[0].to_string(), "XXX");
        assert_eq!(code.logical_z()[0].to_string(), "ZII");
        assert!(StabilizerCode::repetition(4).is_err());
        assert!(StabilizerCode::repetition(1).is_err());
    }

    #[test]
    fn five_qubit_structure() {
        let code = StabilizerCode::five_qubit().unwrap();
        assert_eq!(code.generators().len(), 4);
        assert_eq!(code.num_qubits(), 5);
        assert_eq!(code.num_logical(), 1);
    }

    #[test]
    fn builtin_distances() {
        assert_eq!(
            StabilizerCode::repetition(3)
                .unwrap()
                .verify_distance()
                .unwrap(),
            1
        );
        assert_eq!(
            StabilizerCode::five_qubit()
                .unwrap()
                .verify_distance()
                .unwrap(),
            3
        );
        assert_eq!(
            StabilizerCode::steane().unwrap().verify_distance().unwrap(),
            3
        );
    }

    #[test]
    fn stabilizer_enumeration() {
        let code = StabilizerCode::repetition(3).unwrap();
        let elems: Vec<String> = code
            .stabilizer_elements()
            .unwrap()
            .map(|(_, e)| e.to_string())
            .collect();
        assert_eq!(elems, vec!["III", "ZZI", "IZZ", "ZIZ"]);
        for name in ["five_qubit", "steane"] {
            let code = StabilizerCode::from_name(name).unwrap();
            let count = code.stabilizer_elements().unwrap().count();
            assert_eq!(count, code.num_syndromes());
            for (_, e) in code.stabilizer_elements().unwrap() {
                // Elements are Hermitian; a -1 sign relative to the canonical
                // representative is allowed and tracked.
                assert!(e.is_hermitian(), "{name} element {e} has imaginary phase");
                assert!(code.in_stabilizer_group(&e));
            }
        }
    }

    #[test]
    fn phi_sign_values() {
        let code = StabilizerCode::repetition(3).unwrap();
        let s0 = Syndrome::zero(2).unwrap();
        for a in 0..4u64 {
            assert_eq!(code.phi_sign(a, &s0).unwrap(), 1);
        }
        let s10: Syndrome = "10".parse().unwrap();
        // ZZI has exponents a = 01 (generator 0 only).
        assert_eq!(code.phi_sign(0b01, &s10).unwrap(), -1);
        assert_eq!(code.phi_sign(0, &s10).unwrap(), 1);
    }

    #[test]
    fn syndromes_of_simple_errors() {
        let code = StabilizerCode::repetition(3).unwrap();
        let id = PauliOperator::identity(3).unwrap();
        assert!(code.syndrome_of(&id).unwrap().is_trivial());
        let xii: PauliOperator = "XII".parse().unwrap();
        assert_eq!(code.syndrome_of(&xii).unwrap().to_string(), "10");

        let steane = StabilizerCode::steane().unwrap();
        for (_, e) in steane.stabilizer_elements().unwrap() {
            assert!(steane.syndrome_of(&e).unwrap().is_trivial());
        }
    }

    #[test]
    fn syndrome_is_additive() {
        let code = StabilizerCode::five_qubit().unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let e1 = PauliOperator::from_bits(5, rng.gen::<u64>() & 31, rng.gen::<u64>() & 31, 0)
                .unwrap();
            let e2 = PauliOperator::from_bits(5, rng.gen::<u64>() & 31, rng.gen::<u64>() & 31, 0)
                .unwrap();
            let s1 = code.syndrome_of(&e1).unwrap();
            let s2 = code.syndrome_of(&e2).unwrap();
            let s12 = code.syndrome_of(&e1.multiply(&e2).unwrap()).unwrap();
            assert_eq!(s12.bits(), s1.bits() ^ s2.bits());
        }
    }

    #[test]
    fn recovery_reference_cases() {
        let code = StabilizerCode::repetition(3).unwrap();
        let r0 = code
            .recovery_for_syndrome(&Syndrome::zero(2).unwrap())
            .unwrap();
        assert!(r0.is_identity());
        let r10 = code.recovery_for_syndrome(&"10".parse().unwrap()).unwrap();
        assert_eq!(r10.to_string(), "XII");

        let steane = StabilizerCode::steane().unwrap();
        for i in 0..steane.num_syndromes() {
            let s = Syndrome::from_index(i, 6).unwrap();
            let r = steane.recovery_for_syndrome(&s).unwrap();
            assert_eq!(steane.syndrome_of(&r).unwrap(), s);
            assert!(r.weight() <= 2, "syndrome {s}: {r}");
            // A CSS correction with X part and Z part each of weight <= 1
            // exists for every syndrome: search the 64 X_a Z_b candidates.
            let mut css_found = false;
            for xa in 0..8u64 {
                for zb in 0..8u64 {
                    let x_bits = if xa == 0 { 0 } else { 1 << (xa - 1) };
                    let z_bits = if zb == 0 { 0 } else { 1 << (zb - 1) };
                    let cand = PauliOperator::from_bits(7, x_bits, z_bits, 0).unwrap();
                    if steane.syndrome_of(&cand).unwrap() == s {
                        css_found = true;
                    }
                }
            }
            assert!(css_found, "no CSS-form correction for syndrome {s}");
        }
    }

    #[test]
    fn min_weight_table_covers_all_syndromes() {
        let code = StabilizerCode::five_qubit().unwrap();
        let table = RecoveryTable::min_weight(&code).unwrap();
        for i in 0..code.num_syndromes() {
            let s = Syndrome::from_index(i, code.syndrome_len()).unwrap();
            assert_eq!(code.syndrome_of(table.get(&s)).unwrap(), s);
        }
    }

    #[test]
    fn projector_family_resolves_identity() {
        for code in [
            StabilizerCode::repetition(3).unwrap(),
            StabilizerCode::five_qubit().unwrap(),
        ] {
            let dim = 1usize << code.num_qubits();
            let mut total = DMatrix::<Complex64>::zeros(dim, dim);
            let mut projectors = Vec::new();
            for i in 0..code.num_syndromes() {
                let s = Syndrome::from_index(i, code.syndrome_len()).unwrap();
                let p = dense_projector(&code, &s);
                // Idempotent.
                assert!(((&p * &p) - &p).norm() < 1e-12);
                total += &p;
                projectors.push(p);
            }
            assert!((total - DMatrix::identity(dim, dim)).norm() < 1e-12);
            // Mutually orthogonal.
            for i in 0..projectors.len() {
                for j in 0..projectors.len() {
                    if i != j {
                        assert!((&projectors[i] * &projectors[j]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn recovery_conjugates_projector_to_codespace() {
        for code in [
            StabilizerCode::repetition(3).unwrap(),
            StabilizerCode::five_qubit().unwrap(),
        ] {
            let p0 = dense_projector(&code, &Syndrome::zero(code.syndrome_len()).unwrap());
            for i in 0..code.num_syndromes() {
                let s = Syndrome::from_index(i, code.syndrome_len()).unwrap();
                let ps = dense_projector(&code, &s);
                let r = code
                    .recovery_for_syndrome(&s)
                    .unwrap()
                    .dense_matrix()
                    .unwrap();
                assert!(((&r * ps * &r) - &p0).norm() < 1e-12, "syndrome {s}");
            }
        }
    }

    #[test]
    fn logical_group_is_trace_orthonormal_on_codespace() {
        for code in [
            StabilizerCode::repetition(3).unwrap(),
            StabilizerCode::five_qubit().unwrap(),
        ] {
            let p0 = dense_projector(&code, &Syndrome::zero(code.syndrome_len()).unwrap());
            let group = code.logical_group().unwrap();
            assert_eq!(group.len(), 4);
            let k = code.num_logical() as i32;
            for (i, l) in group.iter().enumerate() {
                for (j, lp) in group.iter().enumerate() {
                    let a = l.dense_matrix().unwrap() * &p0;
                    let b = lp.dense_matrix().unwrap() * &p0;
                    let tr: Complex64 = (a.adjoint() * b).trace();
                    let expected = if i == j { 2f64.powi(k) } else { 0.0 };
                    assert!(
                        (tr - Complex64::new(expected, 0.0)).norm() < 1e-12,
                        "{} pair ({i},{j}) trace {tr}",
                        code.name()
                    );
                }
            }
        }
    }

    #[test]
    fn logical_group_ordering() {
        let code = StabilizerCode::repetition(3).unwrap();
        let group = code.logical_group().unwrap();
        let strings: Vec<String> = group.iter().map(|l| l.to_string()).collect();
        // I, Xbar, Ybar (= representative of Xbar Zbar), Zbar.
        assert_eq!(strings, vec!["III", "XXX", "YXX", "ZII"]);
    }

    #[test]
    fn invalid_codes_are_rejected() {
        // Anticommuting generators.
        let bad = StabilizerCode::new(
            "bad",
            2,
            1,
            1,
            vec!["XI".parse().unwrap()],
            vec!["ZZ".parse().unwrap()],
            vec!["ZI".parse().unwrap()],
        );
        assert!(bad.is_err());
        // Signed generator.
        let signed = StabilizerCode::new(
            "signed",
            3,
            1,
            1,
            vec!["-ZZI".parse().unwrap(), "IZZ".parse().unwrap()],
            vec!["XXX".parse().unwrap()],
            vec!["ZII".parse().unwrap()],
        );
        assert!(signed.is_err());
        // Dependent generators.
        let dependent = StabilizerCode::new(
            "dep",
            3,
            1,
            1,
            vec!["ZZI".parse().unwrap(), "ZZI".parse().unwrap()],
            vec!["XXX".parse().unwrap()],
            vec!["ZII".parse().unwrap()],
        );
        assert!(dependent.is_err());
    }

    #[test]
    fn json_code_round_trip() {
        let text = r#"{
            "name": "four_two_two",
            "n": 4, "k": 2, "d": 2,
            "generators": ["XXXX", "ZZZZ"],
            "logical_x": ["XXII", "XIXI"],
            "logical_z": ["ZIZI", "ZZII"]
        }"#;
        let code = StabilizerCode::from_json(text).unwrap();
        assert_eq!(code.num_qubits(), 4);
        assert_eq!(code.num_logical(), 2);
        assert_eq!(code.verify_distance().unwrap(), 2);
        assert_eq!(code.logical_group().unwrap().len(), 16);

        let bad = r#"{"n":3,"k":1,"d":1,"generators":["-ZZI","IZZ"],"logical_x":["XXX"],"logical_z":["ZII"]}"#;
        assert!(StabilizerCode::from_json(bad).is_err());
    }
}
