//! Determinant-basis full CI: enumeration in a symmetry sector, Slater–Condon
//! matrix elements and the ground state with its spin expectation.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{apply_ladders, build_auxiliary_operators, FermionOperator, IntegralSet, Ladder};
use crate::linalg::{eigh, lanczos_lowest, DENSE_EIGEN_LIMIT};

/// Ground states closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Occupation bitmasks over the active spatial orbitals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Determinant {
    pub alpha: u64,
    pub beta: u64,
}

impl Determinant {
    /// Spin-orbital occupation with up modes first, matching the qubit ordering.
    pub fn modes(&self, m: usize) -> u64 {
        self.alpha | self.beta << m
    }

    pub fn from_modes(bits: u64, m: usize) -> Self {
        let low = (1u64 << m) - 1;
        Self {
            alpha: bits & low,
            beta: bits >> m,
        }
    }

    /// Closed-shell-style reference filling the lowest orbitals.
    pub fn reference(n_alpha: usize, n_beta: usize) -> Self {
        Self {
            alpha: (1u64 << n_alpha) - 1,
            beta: (1u64 << n_beta) - 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Target irrep label, 1 = totally symmetric.
    pub irrep: u8,
}

impl SectorSpec {
    pub fn of(ints: &IntegralSet) -> Self {
        Self {
            n_alpha: ints.n_alpha,
            n_beta: ints.n_beta,
            irrep: ints.reference_irrep(),
        }
    }
}

/// All bitmasks on `m` bits with `k` set, ascending.
fn combinations(m: usize, k: usize) -> Vec<u64> {
    (0u64..1 << m).filter(|b| b.count_ones() as usize == k).collect()
}

fn irrep_of(mask: u64, irreps: &[u8]) -> u8 {
    (0..irreps.len())
        .filter(|&p| mask >> p & 1 == 1)
        .fold(0, |g, p| g ^ (irreps[p] - 1))
}

/// Determinants of the sector ordered by `(alpha, beta)` bitmask.
pub fn enumerate_determinants(ints: &IntegralSet, sector: &SectorSpec) -> Result<Vec<Determinant>> {
    let m = ints.norb();
    if !(1..=8).contains(&sector.irrep) {
        return Err(Error::Validation(format!("unknown irrep label {}", sector.irrep)));
    }
    if let Some(bad) = ints.orbital_irreps.iter().find(|g| !(1..=8).contains(*g)) {
        return Err(Error::Validation(format!("unknown orbital irrep label {bad}")));
    }
    if sector.n_alpha > m || sector.n_beta > m {
        return Err(Error::Validation(format!("sector {sector:?} does not fit {m} orbitals")));
    }
    let target = sector.irrep - 1;
    let alphas = combinations(m, sector.n_alpha);
    let betas = combinations(m, sector.n_beta);
    let mut dets = Vec::new();
    for &a in &alphas {
        let ga = irrep_of(a, &ints.orbital_irreps);
        for &b in &betas {
            if ga ^ irrep_of(b, &ints.orbital_irreps) == target {
                dets.push(Determinant { alpha: a, beta: b });
            }
        }
    }
    Ok(dets)
}

/// Spin-orbital view of the integrals: mode `k` is orbital `k % m` with spin `k / m`.
struct SpinOrbitals<'a> {
    ints: &'a IntegralSet,
    m: usize,
}

impl SpinOrbitals<'_> {
    fn h(&self, p: usize, q: usize) -> f64 {
        if p / self.m != q / self.m {
            return 0.0;
        }
        self.ints.h[(p % self.m, q % self.m)]
    }

    /// `<pq|rs> = (pr|qs)` with spin selection.
    fn coulomb(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let m = self.m;
        if p / m != r / m || q / m != s / m {
            return 0.0;
        }
        self.ints.eri(p % m, r % m, q % m, s % m)
    }

    /// `<pq||rs>`
    fn anti(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.coulomb(p, q, r, s) - self.coulomb(p, q, s, r)
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |k| mask >> k & 1 == 1)
}

/// `<bra|H|ket>` by the Slater–Condon rules.
fn slater_condon(so: &SpinOrbitals, bra: u64, ket: u64) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = bits(ket).collect();
            let mut e = so.ints.e0;
            for (k, &i) in occ.iter().enumerate() {
                e += so.h(i, i);
                for &j in &occ[..k] {
                    e += so.anti(i, j, i, j);
                }
            }
            e
        }
        2 => {
            let i = (ket & diff).trailing_zeros() as usize;
            let a = (bra & diff).trailing_zeros() as usize;
            let (_, sign) = apply_ladders(&[Ladder::create(a), Ladder::annihilate(i)], ket as usize)
                .expect("single excitation");
            let mut v = so.h(a, i);
            for k in bits(ket & bra) {
                v += so.anti(a, k, i, k);
            }
            sign * v
        }
        4 => {
            let mut holes = bits(ket & diff);
            let mut parts = bits(bra & diff);
            let (i, j) = (holes.next().unwrap(), holes.next().unwrap());
            let (a, b) = (parts.next().unwrap(), parts.next().unwrap());
            let ops = [Ladder::create(a), Ladder::create(b), Ladder::annihilate(j), Ladder::annihilate(i)];
            let (_, sign) = apply_ladders(&ops, ket as usize).expect("double excitation");
            sign * so.anti(a, b, i, j)
        }
        _ => 0.0,
    }
}

/// Matrix of any particle-conserving operator over `dets`, by direct action on bitstrings.
pub fn operator_matrix(op: &FermionOperator, dets: &[Determinant], m: usize) -> DMatrix<f64> {
    let index: HashMap<u64, usize> = dets.iter().enumerate().map(|(k, d)| (d.modes(m), k)).collect();
    let mut out = DMatrix::zeros(dets.len(), dets.len());
    for (col, d) in dets.iter().enumerate() {
        for (ops, c) in op.iter() {
            if let Some((row_bits, sign)) = apply_ladders(ops, d.modes(m) as usize) {
                if let Some(&row) = index.get(&(row_bits as u64)) {
                    out[(row, col)] += sign * c.re;
                }
            }
        }
    }
    out
}

/// Hamiltonian and `S^2` over the determinant list.
pub fn build_matrices(dets: &[Determinant], ints: &IntegralSet) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if dets.is_empty() {
        return Err(Error::Validation("empty determinant list".into()));
    }
    let m = ints.norb();
    let so = SpinOrbitals { ints, m };
    let rows: Vec<Vec<f64>> = dets
        .par_iter()
        .map(|bra| dets.iter().map(|ket| slater_condon(&so, bra.modes(m), ket.modes(m))).collect())
        .collect();
    let h = DMatrix::from_fn(dets.len(), dets.len(), |r, c| rows[r][c]);
    let s2 = operator_matrix(&build_auxiliary_operators(m, 0).s2, dets, m);
    Ok((h, s2))
}

/// Ground state of a sector with its auxiliary expectations.
#[derive(Clone, Debug)]
pub struct FciSolution {
    pub energy: f64,
    pub n: f64,
    pub sz: f64,
    pub s2: f64,
    pub vector: DVector<f64>,
    pub determinants: Vec<Determinant>,
}

/// Lowest eigenpair of `h`; among degenerate ground states the one with lowest `<S^2>`.
///
/// Returns `(energy, <S^2>, vector)`.
pub fn solve_ground(h: &DMatrix<f64>, s2: &DMatrix<f64>) -> Result<(f64, f64, DVector<f64>)> {
    let dim = h.nrows();
    if dim == 0 || h.ncols() != dim || s2.shape() != h.shape() {
        return Err(Error::Dimension("ground-state solve needs matching square matrices".into()));
    }
    let vector = if dim < DENSE_EIGEN_LIMIT {
        let (vals, vecs) = eigh(h);
        let deg = vals.iter().take_while(|&&v| v - vals[0] <= DEGENERACY_TOL).count();
        if deg == 1 {
            vecs.column(0).into_owned()
        } else {
            let basis = vecs.columns(0, deg).into_owned();
            let sub = basis.transpose() * s2 * &basis;
            let (_, w) = eigh(&sub);
            &basis * w.column(0)
        }
    } else {
        lanczos_lowest(|v| h * v, dim, 1e-10, 2000)?.1
    };
    let energy = vector.dot(&(h * &vector));
    let s2v = vector.dot(&(s2 * &vector));
    Ok((energy, s2v, vector))
}

/// Full CI in the reference sector of `ints`.
pub fn fci(ints: &IntegralSet) -> Result<FciSolution> {
    fci_in_sector(ints, &SectorSpec::of(ints))
}

pub fn fci_in_sector(ints: &IntegralSet, sector: &SectorSpec) -> Result<FciSolution> {
    let dets = enumerate_determinants(ints, sector)?;
    let (h, s2) = build_matrices(&dets, ints)?;
    let (energy, s2v, vector) = solve_ground(&h, &s2)?;
    Ok(FciSolution {
        energy,
        n: (ints.n_frozen_electrons + sector.n_alpha + sector.n_beta) as f64,
        sz: 0.5 * (sector.n_alpha as f64 - sector.n_beta as f64),
        s2: s2v,
        vector,
        determinants: dets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::build_molecular_hamiltonian;
    use crate::testing::{h2_like, sector_ground_energy, toy_integrals};

    #[test]
    fn determinant_counts() {
        let ints = toy_integrals(2, 1, 1, 1);
        assert_eq!(enumerate_determinants(&ints, &SectorSpec::of(&ints)).unwrap().len(), 4);
        let ints = toy_integrals(4, 2, 2, 1);
        assert_eq!(enumerate_determinants(&ints, &SectorSpec::of(&ints)).unwrap().len(), 36);
        let bad = SectorSpec { n_alpha: 1, n_beta: 1, irrep: 9 };
        assert!(matches!(enumerate_determinants(&ints, &bad), Err(Error::Validation(_))));
    }

    #[test]
    fn irrep_filter_matches_brute_force() {
        let mut ints = toy_integrals(5, 2, 2, 1);
        ints.orbital_irreps = vec![1, 3, 1, 2, 4];
        for irrep in 1..=4u8 {
            let sector = SectorSpec { n_alpha: 2, n_beta: 2, irrep };
            let dets = enumerate_determinants(&ints, &sector).unwrap();
            let brute = combinations(5, 2)
                .into_iter()
                .flat_map(|a| combinations(5, 2).into_iter().map(move |b| (a, b)))
                .filter(|&(a, b)| {
                    let mut g = 0;
                    for p in 0..5 {
                        for mask in [a, b] {
                            if mask >> p & 1 == 1 {
                                g ^= ints.orbital_irreps[p] - 1;
                            }
                        }
                    }
                    g == irrep - 1
                })
                .count();
            assert_eq!(dets.len(), brute);
        }
    }

    #[test]
    fn slater_condon_matches_operator_action() {
        let ints = toy_integrals(3, 2, 1, 6);
        let dets = enumerate_determinants(&ints, &SectorSpec::of(&ints)).unwrap();
        let (h, s2) = build_matrices(&dets, &ints).unwrap();
        let oracle = operator_matrix(&build_molecular_hamiltonian(&ints).unwrap(), &dets, 3);
        assert!((&h - oracle).abs().max() < 1e-12);
        assert!((&h * &s2 - &s2 * &h).abs().max() < 1e-10);
    }

    #[test]
    fn closed_shell_single_determinant() {
        let ints = toy_integrals(1, 1, 1, 2);
        let sol = fci(&ints).unwrap();
        assert_eq!(sol.determinants.len(), 1);
        assert!((sol.energy - ints.reference_energy()).abs() < 1e-12);
        assert!(sol.s2.abs() < 1e-12);
    }

    #[test]
    fn two_orbital_s2_spectrum() {
        let ints = toy_integrals(2, 1, 1, 3);
        let dets = enumerate_determinants(&ints, &SectorSpec::of(&ints)).unwrap();
        let (_, s2) = build_matrices(&dets, &ints).unwrap();
        let (vals, _) = eigh(&s2);
        let want = [0.0, 0.0, 0.0, 2.0];
        for (a, b) in vals.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_fock_space_diagonalization() {
        for (seed, (m, na, nb)) in [(2, 1, 1), (3, 2, 1), (3, 1, 1), (4, 2, 2)].into_iter().enumerate() {
            let ints = toy_integrals(m, na, nb, seed as u64);
            let sol = fci_in_sector(&ints, &SectorSpec { n_alpha: na, n_beta: nb, irrep: 1 }).unwrap();
            assert!((sol.energy - sector_ground_energy(&ints)).abs() < 1e-10);
        }
        assert!((fci(&h2_like()).unwrap().energy - sector_ground_energy(&h2_like())).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ground_prefers_low_spin() {
        // Two orbitals at equal energy with no interaction: singlets and the triplet coincide.
        let mut ints = crate::fermion::IntegralSet::zeros(2, 1, 1);
        ints.set_h(0, 0, -1.0);
        ints.set_h(1, 1, -1.0);
        let dets = enumerate_determinants(&ints, &SectorSpec::of(&ints)).unwrap();
        let (h, s2) = build_matrices(&dets, &ints).unwrap();
        let (e, s, _) = solve_ground(&h, &s2).unwrap();
        assert!((e + 2.0).abs() < 1e-12);
        assert!(s.abs() < 1e-12);
    }
}
