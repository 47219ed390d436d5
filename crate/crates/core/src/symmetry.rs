//! Qubit-count reductions: parity two-qubit reduction and Z2 tapering.
//!
//! Both are exposed as operator transforms and collected into a
//! [`ReductionChain`] that maps operators, states and reference bitstrings
//! consistently from the full register to the reduced one and back.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{insert_bit, remove_bit, Pauli, PauliString, QubitOperator};

/// Parity and tapering eigenvalues selecting one symmetry sector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetrySector {
    /// Eigenvalue of `(-1)^{N_up}`.
    pub parity_up: i8,
    /// Eigenvalue of `(-1)^{N_down}`.
    pub parity_down: i8,
    /// One eigenvalue per tapered Z2 generator.
    pub z2: Vec<i8>,
}

impl SymmetrySector {
    pub fn from_electrons(n_alpha: usize, n_beta: usize) -> Self {
        Self {
            parity_up: parity_sign(n_alpha),
            parity_down: parity_sign(n_beta),
            z2: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |e: i8| e == 1 || e == -1;
        if ok(self.parity_up) && ok(self.parity_down) && self.z2.iter().copied().all(ok) {
            Ok(())
        } else {
            Err(Error::Validation(format!("sector eigenvalues must be ±1: {self:?}")))
        }
    }
}

fn parity_sign(n: usize) -> i8 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Replaces `Z_q` by its eigenvalue on each listed qubit and removes those qubits.
///
/// Fails with [`Error::Symmetry`] if any term acts with X or Y on a fixed qubit.
pub fn fix_z_qubits(q: &QubitOperator, fixed: &[(usize, i8)]) -> Result<QubitOperator> {
    let n = q.num_qubits();
    let mut order: Vec<(usize, i8)> = fixed.to_vec();
    order.sort_by(|a, b| b.0.cmp(&a.0));
    order.dedup_by_key(|f| f.0);
    if order.len() != fixed.len() || order.iter().any(|f| f.0 >= n) {
        return Err(Error::Dimension(format!("bad qubit list {fixed:?} for {n} qubits")));
    }
    let mut out = QubitOperator::zero(n - order.len());
    for t in q.iter() {
        let mut c = t.coeff;
        let mut s = t.string;
        for &(qubit, eig) in &order {
            match s.get(qubit) {
                Pauli::I => {}
                Pauli::Z => c *= eig as f64,
                p => {
                    return Err(Error::Symmetry(format!(
                        "term {} has {} on fixed qubit {qubit}",
                        t.string,
                        p.as_char()
                    )))
                }
            }
            s = s.remove_qubit(qubit);
        }
        out.add_term(c, s);
    }
    Ok(out.simplify_default())
}

/// Qubits carrying `(-1)^{N_up}` and `(-1)^{N}` under the parity mapping on `n` qubits.
pub fn parity_qubits(n: usize) -> Result<[usize; 2]> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "two-qubit reduction needs an even register, got {n}"
        )));
    }
    Ok([n / 2 - 1, n - 1])
}

/// Removes the two parity qubits of a parity-mapped operator.
pub fn two_qubit_reduction(q: &QubitOperator, sector: &SymmetrySector) -> Result<QubitOperator> {
    fix_z_qubits(q, &two_qubit_fixings(q.num_qubits(), sector)?)
}

fn two_qubit_fixings(n: usize, sector: &SymmetrySector) -> Result<Vec<(usize, i8)>> {
    sector.validate()?;
    let [a, b] = parity_qubits(n)?;
    Ok(vec![(a, sector.parity_up), (b, sector.parity_up * sector.parity_down)])
}

/// A Pauli symmetry together with the qubit it frees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z2Symmetry {
    #[serde(with = "label")]
    pub generator: PauliString,
    pub qubit: usize,
}

mod label {
    use crate::pauli::PauliString;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &PauliString, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.label())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PauliString, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Independent, mutually commuting Pauli symmetries of `q` usable for tapering.
///
/// The commutant of the term set is the GF(2) kernel of the symplectic check
/// matrix. Its basis is brought to reduced row-echelon form with X columns
/// first, so Z-only generators come out with a pivot qubit no other generator
/// touches with Z. Generators with X content are kept only when they commute
/// with those already chosen and still own a private Z/Y qubit.
pub fn find_z2_symmetries(q: &QubitOperator) -> Vec<Z2Symmetry> {
    let n = q.num_qubits();
    if n == 0 {
        return Vec::new();
    }
    // v = (vx | vz << n); term t commutes with v iff t.z·vx + t.x·vz = 0 (mod 2).
    let rows: Vec<u128> = q
        .strings()
        .filter(|s| !s.is_identity())
        .map(|s| s.z_mask() as u128 | (s.x_mask() as u128) << n)
        .collect();
    let kernel = gf2_kernel(&rows, 2 * n);
    let reduced = rref(kernel, 2 * n);

    let x_of = |v: u128| (v & ((1u128 << n) - 1)) as u64;
    let z_of = |v: u128| (v >> n) as u64;
    let mut chosen: Vec<Z2Symmetry> = Vec::new();
    let (z_rows, x_rows): (Vec<_>, Vec<_>) = reduced.into_iter().partition(|(v, _)| x_of(*v) == 0);
    for (v, pivot) in z_rows {
        let g = PauliString::from_bits(n, 0, z_of(v)).expect("mask fits");
        chosen.push(Z2Symmetry {
            generator: g,
            qubit: pivot - n,
        });
    }
    for (v, _) in x_rows {
        let g = PauliString::from_bits(n, x_of(v), z_of(v)).expect("mask fits");
        if !chosen.iter().all(|c| c.generator.commutes_with(&g)) {
            continue;
        }
        if chosen.iter().any(|c| g.z_mask() >> c.qubit & 1 == 1) {
            continue;
        }
        let free = (0..n).find(|&k| {
            g.z_mask() >> k & 1 == 1
                && chosen
                    .iter()
                    .all(|c| c.generator.z_mask() >> k & 1 == 0 && c.qubit != k)
        });
        if let Some(qubit) = free {
            chosen.push(Z2Symmetry { generator: g, qubit });
        }
    }
    chosen
}

/// Basis of `{v : row·v = 0 for every row}` over GF(2) in `width` bits.
fn gf2_kernel(rows: &[u128], width: usize) -> Vec<u128> {
    let pivots = rref(rows.to_vec(), width);
    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    (0..width)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = 1u128 << free;
            for &(row, col) in &pivots {
                if row >> free & 1 == 1 {
                    v |= 1u128 << col;
                }
            }
            v
        })
        .collect()
}

/// Reduced row-echelon form; returns nonzero rows with their pivot column, in pivot order.
fn rref(mut rows: Vec<u128>, width: usize) -> Vec<(u128, usize)> {
    let mut out: Vec<(u128, usize)> = Vec::new();
    for col in 0..width {
        let bit = 1u128 << col;
        let Some(k) = rows.iter().position(|r| r & bit != 0) else {
            continue;
        };
        let pivot = rows.swap_remove(k);
        for r in rows.iter_mut() {
            if *r & bit != 0 {
                *r ^= pivot;
            }
        }
        for (r, _) in out.iter_mut() {
            if *r & bit != 0 {
                *r ^= pivot;
            }
        }
        out.push((pivot, col));
    }
    out
}

/// Eigenvalues of Z-only generators on computational basis state `bits`.
pub fn sector_from_reference(symmetries: &[Z2Symmetry], bits: u64) -> Result<Vec<i8>> {
    symmetries
        .iter()
        .map(|s| {
            if s.generator.x_mask() != 0 {
                return Err(Error::Symmetry(format!(
                    "generator {} is not diagonal; a basis state has no definite eigenvalue",
                    s.generator
                )));
            }
            Ok(if (s.generator.z_mask() & bits).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            })
        })
        .collect()
}

/// `U q U` with `U = prod_k (X_{q_k} + g_k)/√2`.
fn clifford_conjugate(q: &QubitOperator, symmetries: &[Z2Symmetry]) -> Result<QubitOperator> {
    let n = q.num_qubits();
    let mut op = q.clone();
    for s in symmetries {
        let mut u = QubitOperator::zero(n);
        u.add_term(FRAC_1_SQRT_2, PauliString::single(n, s.qubit, Pauli::X));
        u.add_term(FRAC_1_SQRT_2, s.generator);
        op = u.checked_mul(&op)?.checked_mul(&u)?.simplify_default();
    }
    Ok(op)
}

/// Removes one qubit per symmetry, restricting `q` to the sector given by `eigenvalues`.
pub fn taper(q: &QubitOperator, symmetries: &[Z2Symmetry], eigenvalues: &[i8]) -> Result<QubitOperator> {
    check_symmetries(q.num_qubits(), symmetries, eigenvalues)?;
    for s in symmetries {
        if let Some(t) = q.strings().find(|t| !t.commutes_with(&s.generator)) {
            return Err(Error::Symmetry(format!(
                "term {t} does not commute with generator {}",
                s.generator
            )));
        }
    }
    let conj = clifford_conjugate(q, symmetries)?;
    let n = q.num_qubits();
    let mut fixed: Vec<(usize, i8)> = symmetries.iter().map(|s| s.qubit).zip(eigenvalues.iter().copied()).collect();
    fixed.sort_by(|a, b| b.0.cmp(&a.0));
    let mut out = QubitOperator::zero(n - fixed.len());
    for t in conj.iter() {
        let mut c = t.coeff;
        let mut s = t.string;
        for &(qubit, eig) in &fixed {
            match s.get(qubit) {
                Pauli::I => {}
                Pauli::X => c *= eig as f64,
                _ => {
                    return Err(Error::Symmetry(format!(
                        "tapered qubit {qubit} still carries a non-X Pauli in {}",
                        t.string
                    )))
                }
            }
            s = s.remove_qubit(qubit);
        }
        out.add_term(c, s);
    }
    Ok(out.simplify_default())
}

fn check_symmetries(n: usize, symmetries: &[Z2Symmetry], eigenvalues: &[i8]) -> Result<()> {
    if symmetries.len() != eigenvalues.len() {
        return Err(Error::Validation(format!(
            "{} generators but {} eigenvalues",
            symmetries.len(),
            eigenvalues.len()
        )));
    }
    if eigenvalues.iter().any(|&e| e != 1 && e != -1) {
        return Err(Error::Validation("tapering eigenvalues must be ±1".into()));
    }
    for (k, s) in symmetries.iter().enumerate() {
        if s.generator.num_qubits() != n || s.qubit >= n {
            return Err(Error::Dimension(format!("generator {k} does not fit {n} qubits")));
        }
        if s.generator.commutes_with(&PauliString::single(n, s.qubit, Pauli::X)) {
            return Err(Error::Symmetry(format!(
                "generator {} does not anticommute with X on qubit {}",
                s.generator, s.qubit
            )));
        }
        for (j, other) in symmetries.iter().enumerate() {
            if j != k
                && (!other.generator.commutes_with(&s.generator)
                    || other.generator.z_mask() >> s.qubit & 1 == 1
                    || other.qubit == s.qubit)
            {
                return Err(Error::Symmetry(format!(
                    "generators {} and {} are not simultaneously taperable",
                    s.generator, other.generator
                )));
            }
        }
    }
    Ok(())
}

/// One step of a [`ReductionChain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionStep {
    /// Qubits that are `Z` eigenstates in the target sector.
    FixZ { fixed: Vec<(usize, i8)> },
    Taper {
        symmetries: Vec<Z2Symmetry>,
        eigenvalues: Vec<i8>,
    },
}

impl ReductionStep {
    fn removed(&self) -> usize {
        match self {
            ReductionStep::FixZ { fixed } => fixed.len(),
            ReductionStep::Taper { symmetries, .. } => symmetries.len(),
        }
    }
}

/// Sequence of qubit reductions applied to every operator and state of one problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionChain {
    n_qubits_in: usize,
    steps: Vec<ReductionStep>,
}

type Amplitudes = Vec<Complex64>;

impl ReductionChain {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits_in: n_qubits,
            steps: Vec::new(),
        }
    }

    pub fn n_qubits_in(&self) -> usize {
        self.n_qubits_in
    }

    pub fn n_qubits_out(&self) -> usize {
        self.n_qubits_in - self.steps.iter().map(ReductionStep::removed).sum::<usize>()
    }

    pub fn steps(&self) -> &[ReductionStep] {
        &self.steps
    }

    /// Appends the parity two-qubit reduction for the current register.
    pub fn push_two_qubit_reduction(&mut self, sector: &SymmetrySector) -> Result<()> {
        let fixed = two_qubit_fixings(self.n_qubits_out(), sector)?;
        self.steps.push(ReductionStep::FixZ { fixed });
        Ok(())
    }

    pub fn push_taper(&mut self, symmetries: Vec<Z2Symmetry>, eigenvalues: Vec<i8>) -> Result<()> {
        check_symmetries(self.n_qubits_out(), &symmetries, &eigenvalues)?;
        if !symmetries.is_empty() {
            self.steps.push(ReductionStep::Taper {
                symmetries,
                eigenvalues,
            });
        }
        Ok(())
    }

    pub fn reduce_operator(&self, q: &QubitOperator) -> Result<QubitOperator> {
        self.check_register(q.num_qubits())?;
        let mut op = q.clone();
        for step in &self.steps {
            op = match step {
                ReductionStep::FixZ { fixed } => fix_z_qubits(&op, fixed)?,
                ReductionStep::Taper {
                    symmetries,
                    eigenvalues,
                } => taper(&op, symmetries, eigenvalues)?,
            };
        }
        Ok(op)
    }

    /// Reduced image of basis state `bits`; fails if a step leaves it a superposition.
    pub fn reduce_bits(&self, bits: u64) -> Result<u64> {
        let mut b = bits;
        for step in &self.steps {
            match step {
                ReductionStep::FixZ { fixed } => {
                    let mut order = fixed.clone();
                    order.sort_by(|a, b| b.0.cmp(&a.0));
                    for (q, eig) in order {
                        if (b >> q & 1 == 1) != (eig == -1) {
                            return Err(Error::Symmetry(format!(
                                "reference has the wrong parity on qubit {q}"
                            )));
                        }
                        b = remove_bit(b, q);
                    }
                }
                ReductionStep::Taper {
                    symmetries,
                    eigenvalues,
                } => {
                    if sector_from_reference(symmetries, b)? != *eigenvalues {
                        return Err(Error::Symmetry("reference lies outside the tapered sector".into()));
                    }
                    let mut qs: Vec<usize> = symmetries.iter().map(|s| s.qubit).collect();
                    qs.sort_unstable_by(|a, b| b.cmp(a));
                    for q in qs {
                        b = remove_bit(b, q);
                    }
                }
            }
        }
        Ok(b)
    }

    /// Projects a full-register state into the reduced register.
    ///
    /// Components outside the target sector are discarded, so the result is
    /// normalized only when the input lies in the sector.
    pub fn reduce_state(&self, psi: &[Complex64]) -> Result<Amplitudes> {
        self.check_register_len(psi.len(), self.n_qubits_in)?;
        let mut v = psi.to_vec();
        let mut n = self.n_qubits_in;
        for step in &self.steps {
            match step {
                ReductionStep::FixZ { fixed } => {
                    let mut order = fixed.clone();
                    order.sort_by(|a, b| b.0.cmp(&a.0));
                    for (q, eig) in order {
                        v = (0..1usize << (n - 1))
                            .map(|j| v[insert_bit(j as u64, q, eig == -1) as usize])
                            .collect();
                        n -= 1;
                    }
                }
                ReductionStep::Taper {
                    symmetries,
                    eigenvalues,
                } => {
                    v = apply_clifford(&v, symmetries);
                    let mut fixed: Vec<(usize, i8)> =
                        symmetries.iter().map(|s| s.qubit).zip(eigenvalues.iter().copied()).collect();
                    fixed.sort_by(|a, b| b.0.cmp(&a.0));
                    for (q, eig) in fixed {
                        v = (0..1usize << (n - 1))
                            .map(|j| {
                                let a = v[insert_bit(j as u64, q, false) as usize];
                                let b = v[insert_bit(j as u64, q, true) as usize];
                                (a + b * eig as f64) * FRAC_1_SQRT_2
                            })
                            .collect();
                        n -= 1;
                    }
                }
            }
        }
        Ok(v)
    }

    /// Embeds a reduced-register state back into the full register.
    pub fn lift_state(&self, phi: &[Complex64]) -> Result<Amplitudes> {
        self.check_register_len(phi.len(), self.n_qubits_out())?;
        let mut v = phi.to_vec();
        let mut n = self.n_qubits_out();
        let zero = Complex64::new(0.0, 0.0);
        for step in self.steps.iter().rev() {
            match step {
                ReductionStep::FixZ { fixed } => {
                    let mut order = fixed.clone();
                    order.sort_by_key(|f| f.0);
                    for (q, eig) in order {
                        let mut w = vec![zero; 1 << (n + 1)];
                        for (j, a) in v.iter().enumerate() {
                            w[insert_bit(j as u64, q, eig == -1) as usize] = *a;
                        }
                        v = w;
                        n += 1;
                    }
                }
                ReductionStep::Taper {
                    symmetries,
                    eigenvalues,
                } => {
                    let mut fixed: Vec<(usize, i8)> =
                        symmetries.iter().map(|s| s.qubit).zip(eigenvalues.iter().copied()).collect();
                    fixed.sort_by_key(|f| f.0);
                    for (q, eig) in fixed {
                        let mut w = vec![zero; 1 << (n + 1)];
                        for (j, a) in v.iter().enumerate() {
                            w[insert_bit(j as u64, q, false) as usize] = a * FRAC_1_SQRT_2;
                            w[insert_bit(j as u64, q, true) as usize] = a * (eig as f64 * FRAC_1_SQRT_2);
                        }
                        v = w;
                        n += 1;
                    }
                    v = apply_clifford(&v, symmetries);
                }
            }
        }
        Ok(v)
    }

    fn check_register(&self, n: usize) -> Result<()> {
        if n != self.n_qubits_in {
            return Err(Error::Dimension(format!(
                "operator on {n} qubits, chain expects {}",
                self.n_qubits_in
            )));
        }
        Ok(())
    }

    fn check_register_len(&self, len: usize, n: usize) -> Result<()> {
        if len != 1usize << n {
            return Err(Error::Dimension(format!("state of length {len} on {n} qubits")));
        }
        Ok(())
    }
}

/// `U psi` for the tapering Clifford; the factors commute and each squares to one.
fn apply_clifford(psi: &[Complex64], symmetries: &[Z2Symmetry]) -> Amplitudes {
    let mut v = psi.to_vec();
    for s in symmetries {
        let mut w = vec![Complex64::new(0.0, 0.0); v.len()];
        let xq = 1usize << s.qubit;
        for (j, a) in v.iter().enumerate() {
            w[j ^ xq] += a * FRAC_1_SQRT_2;
            let (k, ph) = s.generator.apply_to_basis(j);
            w[k] += a * ph * FRAC_1_SQRT_2;
        }
        v = w;
    }
    v
}
