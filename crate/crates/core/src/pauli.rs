//! Pauli strings and weighted sums of them.
//!
//! A [`PauliString`] on `n` qubits is stored in the symplectic form as two bit
//! masks `(x, z)`. The represented Hermitian operator is
//! `i^{|x & z|} X^x Z^z`, so a qubit with both bits set carries `Y = iXZ`.
//! Qubit `k` is bit `k` of both masks and bit `k` of a basis-state index.
//!
//! Labels are written with qubit 0 first: `"XIZ"` is `X` on qubit 0 and `Z` on
//! qubit 2.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register a [`PauliString`] can address.
pub const MAX_QUBITS: usize = 64;

/// Coefficients at or below this magnitude are dropped by [`QubitOperator::simplify_default`].
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Default register size accepted by [`QubitOperator::to_matrix`].
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Powers of `i` indexed by exponent mod 4.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn rank(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
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
}

/// Tensor product of single-qubit Paulis, without coefficient.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n, x: 0, z: 0 }
    }

    /// Builds a string from raw symplectic masks; bits above `n` must be clear.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Dimension(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let mask = low_mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Dimension(format!("bits set beyond qubit {n}")));
        }
        Ok(Self { n, x, z })
    }

    /// Single Pauli `p` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, p);
        s
    }

    /// Builds a string from `(qubit, pauli)` pairs.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            s.set(q, p);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Count of `Y` factors; the `i^{|x&z|}` phase of the symplectic form.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n);
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (xb, zb) = p.bits();
        let bit = 1u64 << qubit;
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
    }

    /// Symplectic commutation test.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Product `self * other` as `(phase, string)` with phase in `{±1, ±i}`.
    pub fn mul(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "pauli strings on {} and {} qubits",
                self.n, other.n
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> (Complex64, PauliString) {
        let (ax, az) = (self.x, self.z);
        let (bx, bz) = (other.x, other.z);
        let a_x = ax & !az;
        let a_y = ax & az;
        let a_z = !ax & az;
        let b_x = bx & !bz;
        let b_y = bx & bz;
        let b_z = !bx & bz;
        // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
        let plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
        let minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
        let k = (plus.count_ones() + 4 - minus.count_ones() % 4) % 4;
        (
            i_pow(k),
            PauliString {
                n: self.n,
                x: ax ^ bx,
                z: az ^ bz,
            },
        )
    }

    /// Action on a computational basis state: `P|j> = phase |j ^ x>`.
    #[inline]
    pub fn apply_to_basis(&self, j: usize) -> (usize, Complex64) {
        let sign = if (self.z & j as u64).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        (j ^ self.x as usize, i_pow(self.y_count()) * sign)
    }

    /// String restricted to qubits other than `qubit`, shifting higher qubits down.
    pub(crate) fn remove_qubit(&self, qubit: usize) -> PauliString {
        PauliString {
            n: self.n - 1,
            x: remove_bit(self.x, qubit),
            z: remove_bit(self.z, qubit),
        }
    }

    pub fn label(&self) -> String {
        (0..self.n).map(|q| self.get(q).as_char()).collect()
    }

    /// Dense `2^n x 2^n` matrix of the bare string.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let (row, ph) = self.apply_to_basis(j);
            m[(row, j)] = ph;
        }
        m
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn remove_bit(v: u64, bit: usize) -> u64 {
    let low = v & low_mask(bit);
    let high = if bit + 1 >= 64 { 0 } else { v >> (bit + 1) };
    low | (high << bit)
}

/// Inverse of [`remove_bit`]: opens a slot at `bit` holding `value`.
pub(crate) fn insert_bit(v: u64, bit: usize, value: bool) -> u64 {
    let low = v & low_mask(bit);
    let high = v >> bit;
    low | (value as u64) << bit | high.checked_shl(bit as u32 + 1).unwrap_or(0)
}

impl Ord for PauliString {
    /// Lexicographic on the label, qubit 0 first, with `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| {
            let diff = (self.x ^ other.x) | (self.z ^ other.z);
            if diff == 0 {
                return std::cmp::Ordering::Equal;
            }
            let q = diff.trailing_zeros() as usize;
            self.get(q).rank().cmp(&other.get(q).rank())
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({:?})", self.label())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Dimension(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let mut p = PauliString::identity(n);
        for (q, c) in s.chars().enumerate() {
            let f = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::Validation(format!(
                        "invalid pauli character {other:?} in {s:?}"
                    )))
                }
            };
            p.set(q, f);
        }
        Ok(p)
    }
}

/// A Pauli string with a complex weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: impl Into<Complex64>, string: PauliString) -> Self {
        Self {
            coeff: coeff.into(),
            string,
        }
    }

    /// Parses `"XZ"`-style labels; panics on malformed input, so meant for literals.
    pub fn from_label(coeff: impl Into<Complex64>, label: &str) -> Self {
        Self::new(coeff, label.parse().expect("valid pauli label"))
    }

    /// The canonical zero term on `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self::new(0.0, PauliString::identity(n))
    }

    pub fn mul(&self, other: &PauliTerm) -> Result<PauliTerm> {
        let (phase, string) = self.string.mul(&other.string)?;
        Ok(PauliTerm {
            coeff: self.coeff * other.coeff * phase,
            string,
        })
    }
}

/// Product of two weighted Pauli strings.
pub fn mul_pauli(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    a.mul(b)
}

/// Linear combination of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::constant(n_qubits, 1.0)
    }

    pub fn constant(n_qubits: usize, c: impl Into<Complex64>) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(c, PauliString::identity(n_qubits));
        op
    }

    pub fn from_term(term: PauliTerm) -> Self {
        let mut op = Self::zero(term.string.num_qubits());
        op.add_term(term.coeff, term.string);
        op
    }

    /// Sums terms; all strings must share one register size.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut op = Self::zero(n_qubits);
        for t in terms {
            if t.string.num_qubits() != n_qubits {
                return Err(Error::Dimension(format!(
                    "term on {} qubits added to {n_qubits}-qubit operator",
                    t.string.num_qubits()
                )));
            }
            op.add_term(t.coeff, t.string);
        }
        Ok(op)
    }

    /// Convenience for tests and docs: `&[(coeff, "XZ"), ...]`.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms.first().map(|t| t.1.len()).unwrap_or(0);
        let parsed = terms
            .iter()
            .map(|(c, l)| Ok(PauliTerm::new(*c, l.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
    }

    pub fn num_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of stored strings; after [`simplify`](Self::simplify) this is `n_p`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: impl Into<Complex64>, s: PauliString) {
        debug_assert_eq!(s.num_qubits(), self.n_qubits);
        *self.terms.entry(s).or_insert(Complex64::new(0.0, 0.0)) += c.into();
    }

    pub fn coeff(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Coefficient of the identity string.
    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&PauliString::identity(self.n_qubits))
    }

    /// Terms in lexicographic order of their labels.
    pub fn iter(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(s, c)| PauliTerm::new(*c, *s))
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.keys()
    }

    /// Combines like terms (already implicit in storage) and drops coefficients with `|c| <= tol`.
    pub fn simplify(&self, tol: f64) -> QubitOperator {
        QubitOperator {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(s, c)| (*s, *c))
                .collect(),
        }
    }

    pub fn simplify_default(&self) -> QubitOperator {
        self.simplify(DEFAULT_DROP_TOL)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> QubitOperator {
        let c = c.into();
        QubitOperator {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, v)| (*s, v * c)).collect(),
        }
    }

    pub fn adjoint(&self) -> QubitOperator {
        QubitOperator {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, v)| (*s, v.conj())).collect(),
        }
    }

    /// Hermitian iff every coefficient is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest coefficient magnitude; zero for the empty operator.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes, an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn checked_add(&self, other: &QubitOperator) -> Result<QubitOperator> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*c, *s);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &QubitOperator) -> Result<QubitOperator> {
        self.check_dims(other)?;
        let mut out = QubitOperator::zero(self.n_qubits);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (ph, s) = sa.mul_unchecked(sb);
                out.add_term(ca * cb * ph, s);
            }
        }
        Ok(out)
    }

    fn check_dims(&self, other: &QubitOperator) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension(format!(
                "operators on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// Dense matrix with the default register cap.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn to_matrix_with_cap(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > cap {
            return Err(Error::Resource(format!(
                "dense matrix of {} qubits exceeds cap {cap}",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (s, c) in &self.terms {
            for j in 0..dim {
                let (row, ph) = s.apply_to_basis(j);
                m[(row, j)] += c * ph;
            }
        }
        Ok(m)
    }

    /// Hilbert–Schmidt expansion `sum_P Tr[P m] / 2^n P` of a Hermitian matrix.
    ///
    /// Runs in `O(n 4^n)`: for each X-mask the `2^n` Z-masks are resolved with
    /// one Walsh–Hadamard transform.
    pub fn from_matrix(m: &DMatrix<Complex64>, n_qubits: usize) -> Result<QubitOperator> {
        if n_qubits > MAX_QUBITS || m.nrows() != 1 << n_qubits || m.ncols() != 1 << n_qubits {
            return Err(Error::Dimension(format!(
                "{}x{} matrix is not 2^{n_qubits} square",
                m.nrows(),
                m.ncols()
            )));
        }
        let dim = 1usize << n_qubits;
        let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for r in 0..dim {
            for c in r..dim {
                if (m[(r, c)] - m[(c, r)].conj()).norm() > 1e-10 * scale {
                    return Err(Error::Validation(format!(
                        "matrix is not Hermitian at ({r}, {c})"
                    )));
                }
            }
        }
        let mut op = QubitOperator::zero(n_qubits);
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for x in 0..dim {
            // Tr[X^x Z^z m] = sum_k (-1)^{z.k} m[k, k^x]
            for (k, b) in buf.iter_mut().enumerate() {
                *b = m[(k, k ^ x)];
            }
            walsh_hadamard(&mut buf);
            for (z, v) in buf.iter().enumerate() {
                let s = PauliString {
                    n: n_qubits,
                    x: x as u64,
                    z: z as u64,
                };
                // P = i^{y} X^x Z^z, so Tr[P m] = i^{y} Tr[X^x Z^z m].
                let c = i_pow(s.y_count()) * v / dim as f64;
                op.add_term(Complex64::new(c.re, 0.0), s);
            }
        }
        Ok(op.simplify_default())
    }

    /// Serializes as `coefficient<TAB>label` lines after an `# n_qubits=` header.
    ///
    /// Real coefficients print as a plain float; complex ones as `re,im`.
    /// Floats use the shortest round-trip representation, so parsing the
    /// output reproduces every coefficient bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n_qubits={}\n", self.n_qubits);
        for (s, c) in &self.terms {
            if c.im == 0.0 {
                out.push_str(&format!("{:?}\t{}\n", c.re, s.label()));
            } else {
                out.push_str(&format!("{:?},{:?}\t{}\n", c.re, c.im, s.label()));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<QubitOperator> {
        let mut n_qubits: Option<usize> = None;
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("n_qubits=") {
                    n_qubits = Some(v.trim().parse().map_err(|_| {
                        Error::parse("<operator>", lineno + 1, "bad n_qubits header")
                    })?);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (coeff, label) = line.split_once('\t').ok_or_else(|| {
                Error::parse("<operator>", lineno + 1, "expected coefficient<TAB>pauli-string")
            })?;
            let coeff = parse_coeff(coeff.trim())
                .ok_or_else(|| Error::parse("<operator>", lineno + 1, "bad coefficient"))?;
            let string: PauliString = label
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse("<operator>", lineno + 1, e.to_string()))?;
            terms.push((lineno + 1, PauliTerm::new(coeff, string)));
        }
        let n = match (n_qubits, terms.first()) {
            (Some(n), _) => n,
            (None, Some((_, t))) => t.string.num_qubits(),
            (None, None) => 0,
        };
        let mut op = QubitOperator::zero(n);
        for (line, t) in terms {
            if t.string.num_qubits() != n {
                return Err(Error::parse("<operator>", line, "pauli string length mismatch"));
            }
            op.add_term(t.coeff, t.string);
        }
        Ok(op)
    }
}

fn parse_coeff(s: &str) -> Option<Complex64> {
    match s.split_once(',') {
        Some((re, im)) => Some(Complex64::new(re.parse().ok()?, im.parse().ok()?)),
        None => Some(Complex64::new(s.parse().ok()?, 0.0)),
    }
}

/// In-place unnormalized Walsh–Hadamard transform: `out[z] = sum_k (-1)^{z.k} in[k]`.
fn walsh_hadamard(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for k in block..block + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `ab - ba`, simplified with the default tolerance.
pub fn commutator(a: &QubitOperator, b: &QubitOperator) -> Result<QubitOperator> {
    a.check_dims(b)?;
    // Commuting string pairs cancel exactly, so only anticommuting pairs contribute 2ab.
    let mut out = QubitOperator::zero(a.n_qubits);
    for (sa, ca) in &a.terms {
        for (sb, cb) in &b.terms {
            if !sa.commutes_with(sb) {
                let (ph, s) = sa.mul_unchecked(sb);
                out.add_term(ca * cb * ph * 2.0, s);
            }
        }
    }
    Ok(out.simplify_default())
}

impl Add for &QubitOperator {
    type Output = QubitOperator;
    fn add(self, rhs: &QubitOperator) -> QubitOperator {
        self.checked_add(rhs).expect("operand qubit counts differ")
    }
}

impl Sub for &QubitOperator {
    type Output = QubitOperator;
    fn sub(self, rhs: &QubitOperator) -> QubitOperator {
        self.checked_add(&rhs.scale(-1.0))
            .expect("operand qubit counts differ")
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: &QubitOperator) -> QubitOperator {
        self.checked_mul(rhs).expect("operand qubit counts differ")
    }
}

impl Neg for &QubitOperator {
    type Output = QubitOperator;
    fn neg(self) -> QubitOperator {
        self.scale(-1.0)
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{} {}", c.re, s)?;
            } else {
                write!(f, "({}{:+}i) {}", c.re, c.im, s)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn x_times_y_is_i_z() {
        let p = mul_pauli(&PauliTerm::from_label(1.0, "X"), &PauliTerm::from_label(1.0, "Y")).unwrap();
        assert_eq!(p.string.label(), "Z");
        assert_eq!(p.coeff, c(0.0, 1.0));
    }

    #[test]
    fn identity_is_neutral() {
        for l in ["I", "X", "Y", "Z"] {
            let t = PauliTerm::from_label(c(0.3, -0.7), l);
            let p = mul_pauli(&PauliTerm::from_label(1.0, "I"), &t).unwrap();
            assert_eq!(p, t);
        }
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let a = PauliTerm::from_label(1.0, "XZ");
        let b = PauliTerm::from_label(1.0, "YX");
        let p = mul_pauli(&a, &b).unwrap();
        let dense = a.string.to_matrix() * b.string.to_matrix();
        let got = p.string.to_matrix() * p.coeff;
        assert!(dense_close(&dense, &got, 1e-15));
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let r = mul_pauli(&PauliTerm::from_label(1.0, "X"), &PauliTerm::from_label(1.0, "XX"));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn simplify_cancels_and_merges() {
        let op = QubitOperator::from_labels(&[(1.0, "Z"), (-1.0, "Z")]).unwrap();
        assert!(op.simplify_default().is_empty());
        let op = QubitOperator::from_labels(&[(0.5, "X"), (0.5, "X")]).unwrap();
        let s = op.simplify_default();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&"X".parse().unwrap()), c(1.0, 0.0));
    }

    #[test]
    fn commutator_of_paulis() {
        let z = QubitOperator::from_labels(&[(1.0, "Z")]).unwrap();
        assert!(commutator(&z, &z).unwrap().is_empty());
        let x = QubitOperator::from_labels(&[(1.0, "X")]).unwrap();
        let y = QubitOperator::from_labels(&[(1.0, "Y")]).unwrap();
        let xy = commutator(&x, &y).unwrap();
        assert_eq!(xy.len(), 1);
        assert_eq!(xy.coeff(&"Z".parse().unwrap()), c(0.0, 2.0));
        let w = QubitOperator::from_labels(&[(1.0, "ZZ")]).unwrap();
        assert!(matches!(commutator(&x, &w), Err(Error::Dimension(_))));
    }

    #[test]
    fn small_dense_matrices() {
        let z = QubitOperator::from_labels(&[(1.0, "Z")]).unwrap().to_matrix().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        let xx = QubitOperator::from_labels(&[(1.0, "XX")]).unwrap().to_matrix().unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let want = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(r, col)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let op = QubitOperator::identity(5);
        assert!(matches!(op.to_matrix_with_cap(4), Err(Error::Resource(_))));
    }

    #[test]
    fn qubit_zero_is_least_significant() {
        // Z on qubit 0 flips sign of odd basis indices.
        let m = QubitOperator::from_labels(&[(1.0, "ZI")]).unwrap().to_matrix().unwrap();
        assert_eq!(m[(1, 1)], c(-1.0, 0.0));
        assert_eq!(m[(2, 2)], c(1.0, 0.0));
    }

    #[test]
    fn from_matrix_simple_cases() {
        let id = DMatrix::<Complex64>::identity(4, 4);
        let op = QubitOperator::from_matrix(&id, 2).unwrap();
        assert_eq!(op.len(), 1);
        assert_eq!(op.coeff(&"II".parse().unwrap()), c(1.0, 0.0));

        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        let op = QubitOperator::from_matrix(&z, 1).unwrap();
        assert_eq!(op.len(), 1);
        assert_eq!(op.coeff(&"Z".parse().unwrap()), c(1.0, 0.0));
    }

    #[test]
    fn from_matrix_rejects_bad_input() {
        let m = DMatrix::<Complex64>::identity(3, 3);
        assert!(matches!(QubitOperator::from_matrix(&m, 2), Err(Error::Dimension(_))));
        let mut m = DMatrix::<Complex64>::identity(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(QubitOperator::from_matrix(&m, 1), Err(Error::Validation(_))));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let mut op = QubitOperator::zero(4);
        op.add_term(-0.5, "XIZY".parse().unwrap());
        op.add_term(0.1 + 0.2, "ZZII".parse().unwrap());
        op.add_term(c(1.0 / 3.0, -2e-17), "YYYY".parse().unwrap());
        let text = op.to_text();
        assert!(text.contains("-0.5\tXIZY"));
        let back = QubitOperator::from_text(&text).unwrap();
        assert_eq!(back, op);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_parse_errors_carry_line_numbers() {
        let err = QubitOperator::from_text("# n_qubits=2\n1.0\tXX\nnope\tXZ\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = QubitOperator::from_text("1.0\tXX\n1.0\tX\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn ordering_is_label_lexicographic() {
        let mut labels: Vec<PauliString> = ["ZI", "IX", "XZ", "YI", "II", "XY"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        labels.sort();
        let got: Vec<String> = labels.iter().map(|s| s.label()).collect();
        assert_eq!(got, ["II", "IX", "XY", "XZ", "YI", "ZI"]);
    }

    #[test]
    fn remove_qubit_shifts_down() {
        let s: PauliString = "XYZ".parse().unwrap();
        assert_eq!(s.remove_qubit(1).label(), "XZ");
        assert_eq!(s.remove_qubit(0).label(), "YZ");
        assert_eq!(s.remove_qubit(2).label(), "XY");
    }
}
