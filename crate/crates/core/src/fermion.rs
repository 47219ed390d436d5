//! Second-quantized molecular operators and their qubit images.
//!
//! Spin-orbitals are numbered block-wise: spatial orbital `p` with spin up is
//! mode `p`, with spin down mode `M + p`. Under Jordan–Wigner mode `k` is qubit
//! `k`, so the occupation-number basis index `sum_k n_k 2^k` is also the qubit
//! basis index.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, QubitOperator};

/// Integral tolerance for the symmetry checks in [`IntegralSet::validate`].
pub const INTEGRAL_SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Spin-orbital index of spatial orbital `p` in a space of `m` orbitals.
pub fn mode(m: usize, p: usize, spin: Spin) -> usize {
    match spin {
        Spin::Up => p,
        Spin::Down => m + p,
    }
}

/// One- and two-electron integrals over an active space of spatial orbitals.
///
/// `eri` is stored densely in chemists' notation: `eri(p, q, r, s) = (pq|rs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    /// Constant energy: nuclear repulsion plus any folded frozen-core energy.
    pub e0: f64,
    pub h: DMatrix<f64>,
    eri: Vec<f64>,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Electrons in frozen doubly occupied orbitals.
    pub n_frozen_electrons: usize,
    /// Abelian irrep label per orbital (1-based, direct products by XOR of `label - 1`).
    pub orbital_irreps: Vec<u8>,
}

impl IntegralSet {
    /// Builds and validates an integral set; `eri` must hold `M^4` values indexed
    /// `((p * M + q) * M + r) * M + s`.
    pub fn new(
        e0: f64,
        h: DMatrix<f64>,
        eri: Vec<f64>,
        n_alpha: usize,
        n_beta: usize,
        n_frozen_electrons: usize,
        orbital_irreps: Vec<u8>,
    ) -> Result<Self> {
        let s = Self {
            e0,
            h,
            eri,
            n_alpha,
            n_beta,
            n_frozen_electrons,
            orbital_irreps,
        };
        s.validate()?;
        Ok(s)
    }

    /// Zero integrals for `m` orbitals with trivial symmetry; fill with the setters.
    pub fn zeros(m: usize, n_alpha: usize, n_beta: usize) -> Self {
        Self {
            e0: 0.0,
            h: DMatrix::zeros(m, m),
            eri: vec![0.0; m * m * m * m],
            n_alpha,
            n_beta,
            n_frozen_electrons: 0,
            orbital_irreps: vec![1; m],
        }
    }

    pub fn norb(&self) -> usize {
        self.h.nrows()
    }

    #[inline]
    fn idx(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let m = self.norb();
        ((p * m + q) * m + r) * m + s
    }

    /// `(pq|rs)` in chemists' notation.
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.eri[self.idx(p, q, r, s)]
    }

    pub fn eri_raw(&self) -> &[f64] {
        &self.eri
    }

    /// Sets `h_pq = h_qp = v`.
    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        self.h[(p, q)] = v;
        self.h[(q, p)] = v;
    }

    /// Sets `(pq|rs)` and its seven permutational images.
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx(a, b, c, d);
            self.eri[i] = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.norb();
        if self.h.ncols() != m || self.eri.len() != m * m * m * m {
            return Err(Error::Validation(format!(
                "integral shapes inconsistent with {m} orbitals"
            )));
        }
        if self.orbital_irreps.len() != m {
            return Err(Error::Validation(format!(
                "{} irrep labels for {m} orbitals",
                self.orbital_irreps.len()
            )));
        }
        if self.n_alpha > m || self.n_beta > m {
            return Err(Error::Validation(format!(
                "{} alpha / {} beta electrons do not fit {m} orbitals",
                self.n_alpha, self.n_beta
            )));
        }
        let tol = INTEGRAL_SYMMETRY_TOL;
        for p in 0..m {
            for q in 0..m {
                if (self.h[(p, q)] - self.h[(q, p)]).abs() > tol {
                    return Err(Error::Validation(format!("h[{p},{q}] != h[{q},{p}]")));
                }
            }
        }
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let v = self.eri(p, q, r, s);
                        let images = [
                            self.eri(q, p, r, s),
                            self.eri(p, q, s, r),
                            self.eri(r, s, p, q),
                        ];
                        if images.iter().any(|w| (v - w).abs() > tol) {
                            return Err(Error::Validation(format!(
                                "(pq|rs) lacks 8-fold symmetry at ({p}{q}|{r}{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Folds doubly occupied `frozen` orbitals into `e0` and `h`, keeping `active` in the given order.
    ///
    /// Electron counts are reduced by one alpha and one beta per frozen orbital.
    pub fn active_space(&self, frozen: &[usize], active: &[usize]) -> Result<IntegralSet> {
        let m = self.norb();
        for &o in frozen.iter().chain(active) {
            if o >= m {
                return Err(Error::Validation(format!("orbital {o} out of range 0..{m}")));
            }
        }
        if frozen.iter().any(|f| active.contains(f)) {
            return Err(Error::Validation("orbital both frozen and active".into()));
        }
        let nf = frozen.len();
        if nf > self.n_alpha || nf > self.n_beta {
            return Err(Error::Validation(format!(
                "{nf} frozen orbitals exceed the electron count"
            )));
        }
        let mut e0 = self.e0;
        for &c in frozen {
            e0 += 2.0 * self.h[(c, c)];
            for &d in frozen {
                e0 += 2.0 * self.eri(c, c, d, d) - self.eri(c, d, d, c);
            }
        }
        let na = active.len();
        let mut out = IntegralSet::zeros(na, self.n_alpha - nf, self.n_beta - nf);
        out.e0 = e0;
        out.n_frozen_electrons = self.n_frozen_electrons + 2 * nf;
        out.orbital_irreps = active.iter().map(|&p| self.orbital_irreps[p]).collect();
        for (i, &p) in active.iter().enumerate() {
            for (j, &q) in active.iter().enumerate() {
                let mut v = self.h[(p, q)];
                for &c in frozen {
                    v += 2.0 * self.eri(p, q, c, c) - self.eri(p, c, c, q);
                }
                out.h[(i, j)] = v;
                for (k, &r) in active.iter().enumerate() {
                    for (l, &s) in active.iter().enumerate() {
                        let idx = out.idx(i, j, k, l);
                        out.eri[idx] = self.eri(p, q, r, s);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Irrep of the closed-shell-style reference filling the lowest orbitals.
    pub fn reference_irrep(&self) -> u8 {
        let mut g = 0u8;
        for p in 0..self.n_alpha {
            g ^= self.orbital_irreps[p] - 1;
        }
        for p in 0..self.n_beta {
            g ^= self.orbital_irreps[p] - 1;
        }
        g + 1
    }

    /// Energy of the determinant occupying the lowest `n_alpha`/`n_beta` orbitals.
    pub fn reference_energy(&self) -> f64 {
        let occ_a: Vec<usize> = (0..self.n_alpha).collect();
        let occ_b: Vec<usize> = (0..self.n_beta).collect();
        let mut e = self.e0;
        for &i in occ_a.iter().chain(&occ_b) {
            e += self.h[(i, i)];
        }
        for occ in [&occ_a, &occ_b] {
            for &i in occ.iter() {
                for &j in occ.iter() {
                    e += 0.5 * (self.eri(i, i, j, j) - self.eri(i, j, j, i));
                }
            }
        }
        for &i in &occ_a {
            for &j in &occ_b {
                e += self.eri(i, i, j, j);
            }
        }
        e
    }
}

/// One ladder operator: `a†_mode` when `dagger`, else `a_mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// Linear combination of products of ladder operators.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<Ladder>, Complex64>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut op = Self::zero();
        op.add_term(c, Vec::new());
        op
    }

    pub fn add_term(&mut self, c: impl Into<Complex64>, ops: Vec<Ladder>) {
        *self.terms.entry(ops).or_insert(Complex64::new(0.0, 0.0)) += c.into();
    }

    /// `a†_p a_q`
    pub fn hopping(p: usize, q: usize) -> Self {
        let mut op = Self::zero();
        op.add_term(1.0, vec![Ladder::create(p), Ladder::annihilate(q)]);
        op
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Ladder], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Highest mode index plus one.
    pub fn n_modes(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|t| t.iter().map(|l| l.mode + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &FermionOperator) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*v, k.clone());
        }
        out
    }

    pub fn mul(&self, other: &FermionOperator) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let mut k = ka.clone();
                k.extend_from_slice(kb);
                out.add_term(va * vb, k);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            let adj: Vec<Ladder> = k
                .iter()
                .rev()
                .map(|l| Ladder {
                    mode: l.mode,
                    dagger: !l.dagger,
                })
                .collect();
            out.add_term(v.conj(), adj);
        }
        out
    }

    /// Canonical form: creators left of annihilators, each block in descending mode order.
    pub fn normal_ordered(&self) -> Self {
        let mut out = Self::zero();
        let mut stack: Vec<(Vec<Ladder>, Complex64)> =
            self.terms.iter().map(|(k, v)| (k.clone(), *v)).collect();
        while let Some((mut ops, c)) = stack.pop() {
            let mut action = None;
            for i in 0..ops.len().saturating_sub(1) {
                let (l, r) = (ops[i], ops[i + 1]);
                let out_of_order = match (l.dagger, r.dagger) {
                    (false, true) => true,
                    (true, false) => false,
                    _ if l.mode == r.mode => {
                        // a a = a† a† = 0 on the same mode
                        action = Some(None);
                        break;
                    }
                    _ => l.mode < r.mode,
                };
                if out_of_order {
                    action = Some(Some(i));
                    break;
                }
            }
            match action {
                None => out.add_term(c, ops),
                Some(None) => {}
                Some(Some(i)) => {
                    let (l, r) = (ops[i], ops[i + 1]);
                    if !l.dagger && r.dagger && l.mode == r.mode {
                        let mut contracted = ops[..i].to_vec();
                        contracted.extend_from_slice(&ops[i + 2..]);
                        stack.push((contracted, c));
                    }
                    ops.swap(i, i + 1);
                    stack.push((ops, -c));
                }
            }
        }
        out.terms.retain(|_, v| v.norm() > 0.0);
        out
    }

    /// Drops terms with `|c| <= tol`.
    pub fn simplify(&self, tol: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.norm() > tol)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Hermitian iff the normal-ordered form equals that of its adjoint within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let a = self.normal_ordered();
        let b = self.adjoint().normal_ordered();
        let diff = a.add(&b.scale(-1.0)).simplify(tol);
        diff.is_empty()
    }

    /// Dense matrix on the Fock space of `n_modes` modes, basis index `sum_k n_k 2^k`.
    ///
    /// Built by acting with ladder operators on occupation bit strings, with
    /// the sign `(-1)^{sum_{j<k} n_j}` for each operator on mode `k`.
    pub fn to_fock_matrix(&self, n_modes: usize) -> Result<DMatrix<Complex64>> {
        if n_modes > crate::pauli::DEFAULT_DENSE_CAP {
            return Err(Error::Resource(format!(
                "Fock space of {n_modes} modes exceeds dense cap"
            )));
        }
        if self.n_modes() > n_modes {
            return Err(Error::Dimension(format!(
                "operator acts on {} modes, space has {n_modes}",
                self.n_modes()
            )));
        }
        let dim = 1usize << n_modes;
        let mut m = DMatrix::zeros(dim, dim);
        for (ops, c) in &self.terms {
            for col in 0..dim {
                if let Some((row, sign)) = apply_ladders(ops, col) {
                    m[(row, col)] += c * sign;
                }
            }
        }
        Ok(m)
    }
}

/// Applies `ops` (rightmost first) to occupation state `state`.
pub(crate) fn apply_ladders(ops: &[Ladder], mut state: usize) -> Option<(usize, f64)> {
    let mut sign = 1.0;
    for l in ops.iter().rev() {
        let bit = 1usize << l.mode;
        let occupied = state & bit != 0;
        if occupied == l.dagger {
            return None;
        }
        if (state & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        state ^= bit;
    }
    Some((state, sign))
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (ops, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c)?;
            for l in ops {
                write!(f, " a{}{}", l.mode, if l.dagger { "^" } else { "" })?;
            }
        }
        Ok(())
    }
}

/// `E_0 + sum h_pq a†_pσ a_qσ + 1/2 sum (pr|qs) a†_pσ a†_qτ a_sτ a_rσ`, spin-summed and normal ordered.
pub fn build_molecular_hamiltonian(ints: &IntegralSet) -> Result<FermionOperator> {
    ints.validate()?;
    let m = ints.norb();
    let mut op = FermionOperator::constant(ints.e0);
    for p in 0..m {
        for q in 0..m {
            let v = ints.h[(p, q)];
            if v == 0.0 {
                continue;
            }
            for s in [Spin::Up, Spin::Down] {
                op.add_term(v, vec![Ladder::create(mode(m, p, s)), Ladder::annihilate(mode(m, q, s))]);
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let v = ints.eri(p, r, q, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sig in [Spin::Up, Spin::Down] {
                        for tau in [Spin::Up, Spin::Down] {
                            let (ps, qt, st, rs) =
                                (mode(m, p, sig), mode(m, q, tau), mode(m, s, tau), mode(m, r, sig));
                            if ps == qt || st == rs {
                                continue;
                            }
                            op.add_term(
                                0.5 * v,
                                vec![
                                    Ladder::create(ps),
                                    Ladder::create(qt),
                                    Ladder::annihilate(st),
                                    Ladder::annihilate(rs),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(op.normal_ordered().simplify(0.0))
}

/// Number, spin-z, and total-spin operators on `m` spatial orbitals.
#[derive(Clone, Debug)]
pub struct AuxiliaryOperators {
    pub number: FermionOperator,
    pub sz: FermionOperator,
    pub s2: FermionOperator,
}

/// `N = N_f + sum n_pσ`, `S_z = 1/2 sum (n_p↑ - n_p↓)`, `S^2 = S_- S_+ + S_z (S_z + 1)`.
pub fn build_auxiliary_operators(m: usize, n_frozen_electrons: usize) -> AuxiliaryOperators {
    let mut number = FermionOperator::constant(n_frozen_electrons as f64);
    let mut sz = FermionOperator::zero();
    let mut s_plus = FermionOperator::zero();
    let mut s_minus = FermionOperator::zero();
    for p in 0..m {
        for s in [Spin::Up, Spin::Down] {
            let k = mode(m, p, s);
            number.add_term(1.0, vec![Ladder::create(k), Ladder::annihilate(k)]);
            sz.add_term(0.5 * s.sign(), vec![Ladder::create(k), Ladder::annihilate(k)]);
        }
        let (up, down) = (mode(m, p, Spin::Up), mode(m, p, Spin::Down));
        s_plus.add_term(1.0, vec![Ladder::create(up), Ladder::annihilate(down)]);
        s_minus.add_term(1.0, vec![Ladder::create(down), Ladder::annihilate(up)]);
    }
    let sz_plus_one = sz.add(&FermionOperator::constant(1.0));
    let s2 = s_minus.mul(&s_plus).add(&sz.mul(&sz_plus_one));
    AuxiliaryOperators {
        number: number.normal_ordered(),
        sz: sz.normal_ordered(),
        s2: s2.normal_ordered().simplify(0.0),
    }
}

/// Fermion-to-qubit encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    JordanWigner,
    Parity,
}

impl std::str::FromStr for Mapping {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jordan_wigner" | "jw" => Ok(Mapping::JordanWigner),
            "parity" => Ok(Mapping::Parity),
            other => Err(Error::Validation(format!("unsupported mapping {other:?}"))),
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mapping::JordanWigner => "jordan_wigner",
            Mapping::Parity => "parity",
        })
    }
}

impl Mapping {
    /// Qubit image of a single ladder operator on `n` modes.
    pub fn ladder(self, l: Ladder, n: usize) -> QubitOperator {
        let k = l.mode;
        let im = if l.dagger { -0.5 } else { 0.5 };
        let mut op = QubitOperator::zero(n);
        match self {
            Mapping::JordanWigner => {
                // a_k = Z_{<k} (X_k + iY_k)/2
                let mut xs = PauliString::identity(n);
                for j in 0..k {
                    xs.set(j, Pauli::Z);
                }
                let mut ys = xs;
                xs.set(k, Pauli::X);
                ys.set(k, Pauli::Y);
                op.add_term(0.5, xs);
                op.add_term(Complex64::new(0.0, im), ys);
            }
            Mapping::Parity => {
                // a_k = (X_k Z_{k-1} + i Y_k)/2 ⊗ X_{>k}
                let mut base = PauliString::identity(n);
                for j in k + 1..n {
                    base.set(j, Pauli::X);
                }
                let mut xs = base;
                xs.set(k, Pauli::X);
                if k > 0 {
                    xs.set(k - 1, Pauli::Z);
                }
                let mut ys = base;
                ys.set(k, Pauli::Y);
                op.add_term(0.5, xs);
                op.add_term(Complex64::new(0.0, im), ys);
            }
        }
        op
    }

    /// Qubit basis index encoding the occupation pattern `occ` (bit `k` = mode `k`).
    pub fn encode_occupation(self, occ: u64, n: usize) -> u64 {
        match self {
            Mapping::JordanWigner => occ,
            Mapping::Parity => {
                let mut out = 0u64;
                let mut parity = 0u64;
                for k in 0..n {
                    parity ^= occ >> k & 1;
                    out |= parity << k;
                }
                out
            }
        }
    }
}

/// Maps `f` onto `n_modes` qubits, simplified with the default tolerance.
pub fn map_to_qubits(f: &FermionOperator, mapping: Mapping, n_modes: usize) -> Result<QubitOperator> {
    if f.n_modes() > n_modes {
        return Err(Error::Dimension(format!(
            "operator acts on {} modes, register has {n_modes}",
            f.n_modes()
        )));
    }
    let ladders: Vec<[QubitOperator; 2]> = (0..n_modes)
        .map(|k| {
            [
                mapping.ladder(Ladder::annihilate(k), n_modes),
                mapping.ladder(Ladder::create(k), n_modes),
            ]
        })
        .collect();
    let mut out = QubitOperator::zero(n_modes);
    for (ops, c) in f.iter() {
        let mut prod = QubitOperator::constant(n_modes, c);
        for l in ops {
            prod = prod.checked_mul(&ladders[l.mode][l.dagger as usize])?;
        }
        out = out.checked_add(&prod)?;
    }
    Ok(out.simplify_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh_complex;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_orbital_hamiltonian_is_number_operator() {
        let mut ints = IntegralSet::zeros(1, 1, 1);
        ints.set_h(0, 0, -1.0);
        let h = build_molecular_hamiltonian(&ints).unwrap();
        let mut want = FermionOperator::zero();
        want.add_term(-1.0, vec![Ladder::create(0), Ladder::annihilate(0)]);
        want.add_term(-1.0, vec![Ladder::create(1), Ladder::annihilate(1)]);
        assert_eq!(h, want.normal_ordered());
    }

    #[test]
    fn asymmetric_integrals_are_rejected() {
        let mut ints = IntegralSet::zeros(2, 1, 1);
        ints.h[(0, 1)] = 0.3;
        assert!(matches!(build_molecular_hamiltonian(&ints), Err(Error::Validation(_))));
    }

    #[test]
    fn normal_ordering_anticommutes() {
        // a_0 a†_0 = 1 - a†_0 a_0
        let mut op = FermionOperator::zero();
        op.add_term(1.0, vec![Ladder::annihilate(0), Ladder::create(0)]);
        let n = op.normal_ordered();
        let mut want = FermionOperator::constant(1.0);
        want.add_term(-1.0, vec![Ladder::create(0), Ladder::annihilate(0)]);
        assert_eq!(n, want);
        let mut dup = FermionOperator::zero();
        dup.add_term(1.0, vec![Ladder::create(1), Ladder::create(1)]);
        assert!(dup.normal_ordered().is_empty());
    }

    #[test]
    fn normal_ordering_preserves_fock_matrix() {
        let mut op = FermionOperator::zero();
        op.add_term(0.7, vec![Ladder::annihilate(2), Ladder::create(0), Ladder::create(2), Ladder::annihilate(1)]);
        op.add_term(-0.2, vec![Ladder::annihilate(0), Ladder::create(1)]);
        let a = op.to_fock_matrix(3).unwrap();
        let b = op.normal_ordered().to_fock_matrix(3).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn jw_number_operator() {
        let q = map_to_qubits(&FermionOperator::hopping(0, 0), Mapping::JordanWigner, 1).unwrap();
        let want = QubitOperator::from_labels(&[(0.5, "I"), (-0.5, "Z")]).unwrap();
        assert_eq!(q, want);
    }

    #[test]
    fn jw_hopping_is_xx_plus_yy() {
        let f = FermionOperator::hopping(1, 0).add(&FermionOperator::hopping(0, 1));
        let q = map_to_qubits(&f, Mapping::JordanWigner, 2).unwrap();
        let want = QubitOperator::from_labels(&[(0.5, "XX"), (0.5, "YY")]).unwrap();
        assert_eq!(q, want);
        // Oracle: direct action on occupation states.
        let fock = f.to_fock_matrix(2).unwrap();
        assert!((fock - q.to_matrix().unwrap()).norm() < 1e-14);
    }

    #[test]
    fn parity_matches_fock_space_up_to_basis_permutation() {
        let mut f = FermionOperator::zero();
        f.add_term(0.4, vec![Ladder::create(2), Ladder::annihilate(0)]);
        f.add_term(0.4, vec![Ladder::create(0), Ladder::annihilate(2)]);
        f.add_term(-0.3, vec![Ladder::create(3), Ladder::create(1), Ladder::annihilate(2), Ladder::annihilate(0)]);
        f.add_term(-0.3, vec![Ladder::create(0), Ladder::create(2), Ladder::annihilate(1), Ladder::annihilate(3)]);
        let fock = f.to_fock_matrix(4).unwrap();
        let q = map_to_qubits(&f, Mapping::Parity, 4).unwrap().to_matrix().unwrap();
        for r in 0..16 {
            for col in 0..16 {
                let pr = Mapping::Parity.encode_occupation(r as u64, 4) as usize;
                let pc = Mapping::Parity.encode_occupation(col as u64, 4) as usize;
                assert!((q[(pr, pc)] - fock[(r, col)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn auxiliary_expectations_on_determinants() {
        let aux = build_auxiliary_operators(1, 3);
        let n = aux.number.to_fock_matrix(2).unwrap();
        let sz = aux.sz.to_fock_matrix(2).unwrap();
        let s2 = aux.s2.to_fock_matrix(2).unwrap();
        // |up down> is index 0b11
        assert_eq!(n[(3, 3)], c(5.0));
        assert_eq!(sz[(3, 3)], c(0.0));
        assert!(s2[(3, 3)].norm() < 1e-15);
        // |up> is index 0b01
        assert_eq!(s2[(1, 1)], c(0.75));
        assert_eq!(sz[(1, 1)], c(0.5));
    }

    #[test]
    fn triplet_combination_has_s2_two() {
        // (|0↑ 1↓> + |0↓ 1↑>)/√2 with modes 0↑=0, 1↑=1, 0↓=2, 1↓=3.
        let aux = build_auxiliary_operators(2, 0);
        let s2 = aux.s2.to_fock_matrix(4).unwrap();
        let a = (1 << 0) | (1 << 3);
        let b = (1 << 2) | (1 << 1);
        // a†_{1↓} a†_{0↑}|0> and a†_{1↑} a†_{0↓}|0> in mode order carry no extra sign
        // relative to the basis vectors, so the triplet is the symmetric sum.
        let mut v = nalgebra::DVector::<Complex64>::zeros(16);
        v[a] = c(std::f64::consts::FRAC_1_SQRT_2);
        v[b] = c(std::f64::consts::FRAC_1_SQRT_2);
        let e = (v.adjoint() * &s2 * &v)[(0, 0)].re;
        let mut w = v.clone();
        w[b] = -w[b];
        let e2 = (w.adjoint() * &s2 * &w)[(0, 0)].re;
        // One of the two combinations is the m_s = 0 triplet, the other the singlet.
        let (lo, hi) = if e < e2 { (e, e2) } else { (e2, e) };
        assert!(lo.abs() < 1e-12);
        assert!((hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mapped_spectrum_equals_fock_spectrum() {
        let ints = crate::testing::toy_integrals(2, 1, 1, 11);
        let h = build_molecular_hamiltonian(&ints).unwrap();
        assert!(h.is_hermitian(1e-12));
        let fock = eigvalsh_complex(&h.to_fock_matrix(4).unwrap());
        for mapping in [Mapping::JordanWigner, Mapping::Parity] {
            let q = map_to_qubits(&h, mapping, 4).unwrap();
            assert!(q.is_hermitian(1e-12));
            let spec = eigvalsh_complex(&q.to_matrix().unwrap());
            for (a, b) in fock.iter().zip(&spec) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn frozen_core_folding_matches_full_space_determinant_energy() {
        let ints = crate::testing::toy_integrals(3, 2, 2, 5);
        let folded = ints.active_space(&[0], &[1, 2]).unwrap();
        assert_eq!(folded.n_alpha, 1);
        assert_eq!(folded.n_frozen_electrons, 2);
        assert!((folded.reference_energy() - ints.reference_energy()).abs() < 1e-12);
    }

    #[test]
    fn mapping_names() {
        assert_eq!("parity".parse::<Mapping>().unwrap(), Mapping::Parity);
        assert!(matches!("bravyi_kitaev".parse::<Mapping>(), Err(Error::Validation(_))));
    }
}
