//! End-to-end second-quantized encoding of one molecular problem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{build_auxiliary_operators, build_molecular_hamiltonian, map_to_qubits, IntegralSet, Mapping};
use crate::linalg::SparseOperator;
use crate::pauli::QubitOperator;
use crate::statevector::StateVector;
use crate::symmetry::{find_z2_symmetries, sector_from_reference, ReductionChain, SymmetrySector, Z2Symmetry};

/// Splits orbitals into a frozen core (the lowest `n_frozen`) and an active set.
///
/// With `irreps` given, only non-frozen orbitals carrying one of those labels are active;
/// the rest are discarded as virtual.
pub fn select_active_space(ints: &IntegralSet, n_frozen: usize, irreps: Option<&[u8]>) -> (Vec<usize>, Vec<usize>) {
    let frozen: Vec<usize> = (0..n_frozen.min(ints.norb())).collect();
    let active = (n_frozen..ints.norb())
        .filter(|&p| irreps.is_none_or(|ir| ir.contains(&ints.orbital_irreps[p])))
        .collect();
    (frozen, active)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingOptions {
    pub mapping: Mapping,
    /// Parity mapping only.
    pub two_qubit_reduction: bool,
    pub taper: bool,
}

impl Default for EncodingOptions {
    fn default() -> Self {
        Self {
            mapping: Mapping::Parity,
            two_qubit_reduction: true,
            taper: true,
        }
    }
}

impl EncodingOptions {
    pub fn jordan_wigner() -> Self {
        Self {
            mapping: Mapping::JordanWigner,
            two_qubit_reduction: false,
            taper: false,
        }
    }
}

/// Where auxiliary operators are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxEvaluation {
    /// Operators pushed through the reduction chain, state used as is.
    PostTapering,
    /// State lifted back to the full register, unreduced operators.
    PreTapering,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxValues {
    pub n: f64,
    pub sz: f64,
    pub s2: f64,
}

/// A molecular Hamiltonian with its auxiliary operators on the reduced register.
#[derive(Clone, Debug)]
pub struct EncodedProblem {
    pub integrals: IntegralSet,
    pub options: EncodingOptions,
    pub chain: ReductionChain,
    pub symmetries: Vec<Z2Symmetry>,
    pub sector: SymmetrySector,
    pub hamiltonian: QubitOperator,
    /// `N`, `S_z`, `S^2` on the full `2M`-qubit register.
    pub aux_full: [QubitOperator; 3],
    /// The same after reduction; `None` when some reduction step does not preserve them.
    pub aux_reduced: Option<[QubitOperator; 3]>,
    /// Occupation of the reference determinant on the full register (bit `k` = mode `k`).
    pub reference_occupation: u64,
    pub reference_bits: u64,
    h_sparse: SparseOperator,
    aux_full_sparse: [SparseOperator; 3],
    aux_reduced_sparse: Option<[SparseOperator; 3]>,
}

impl EncodedProblem {
    pub fn build(ints: &IntegralSet, options: EncodingOptions) -> Result<Self> {
        let m = ints.norb();
        let n_modes = 2 * m;
        if options.two_qubit_reduction && options.mapping != Mapping::Parity {
            return Err(Error::Validation("two-qubit reduction requires the parity mapping".into()));
        }
        let h_f = build_molecular_hamiltonian(ints)?;
        let aux_f = build_auxiliary_operators(m, ints.n_frozen_electrons);
        let h_full = map_to_qubits(&h_f, options.mapping, n_modes)?;
        let aux_full = [
            map_to_qubits(&aux_f.number, options.mapping, n_modes)?,
            map_to_qubits(&aux_f.sz, options.mapping, n_modes)?,
            map_to_qubits(&aux_f.s2, options.mapping, n_modes)?,
        ];
        let occ = (0..ints.n_alpha).fold(0u64, |b, p| b | 1 << p)
            | (0..ints.n_beta).fold(0u64, |b, p| b | 1 << (m + p));
        let full_bits = options.mapping.encode_occupation(occ, n_modes);

        let mut sector = SymmetrySector::from_electrons(ints.n_alpha, ints.n_beta);
        let mut chain = ReductionChain::identity(n_modes);
        if options.two_qubit_reduction {
            chain.push_two_qubit_reduction(&sector)?;
        }
        let mut symmetries = Vec::new();
        if options.taper {
            let reduced = chain.reduce_operator(&h_full)?;
            // A basis-state reference fixes eigenvalues of diagonal generators only.
            symmetries = find_z2_symmetries(&reduced)
                .into_iter()
                .filter(|s| s.generator.x_mask() == 0)
                .collect();
            let ref_bits = chain.reduce_bits(full_bits)?;
            let eigs = sector_from_reference(&symmetries, ref_bits)?;
            sector.z2 = eigs.clone();
            chain.push_taper(symmetries.clone(), eigs)?;
        }
        let hamiltonian = chain.reduce_operator(&h_full)?;
        let reference_bits = chain.reduce_bits(full_bits)?;
        let aux_reduced = match aux_full
            .iter()
            .map(|a| chain.reduce_operator(a))
            .collect::<Result<Vec<_>>>()
        {
            Ok(v) => Some(<[QubitOperator; 3]>::try_from(v).expect("three operators")),
            Err(Error::Symmetry(msg)) => {
                log::warn!("auxiliary operators are not reducible ({msg}); evaluating before tapering");
                None
            }
            Err(e) => return Err(e),
        };
        let sparse3 = |ops: &[QubitOperator; 3]| ops.clone().map(|o| SparseOperator::from_qubit_operator(&o));
        Ok(Self {
            integrals: ints.clone(),
            options,
            h_sparse: SparseOperator::from_qubit_operator(&hamiltonian),
            aux_full_sparse: sparse3(&aux_full),
            aux_reduced_sparse: aux_reduced.as_ref().map(sparse3),
            chain,
            symmetries,
            sector,
            hamiltonian,
            aux_full,
            aux_reduced,
            reference_occupation: occ,
            reference_bits,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }

    pub fn hamiltonian_sparse(&self) -> &SparseOperator {
        &self.h_sparse
    }

    pub fn reference_state(&self) -> StateVector {
        StateVector::basis(self.n_qubits(), self.reference_bits as usize)
    }

    /// Exact sector values `N`, `S_z` of the target state.
    pub fn target_numbers(&self) -> (f64, f64) {
        let i = &self.integrals;
        (
            (i.n_frozen_electrons + i.n_alpha + i.n_beta) as f64,
            0.5 * (i.n_alpha as f64 - i.n_beta as f64),
        )
    }

    /// `<N>, <S_z>, <S^2>` of a reduced-register state, and the path actually used.
    ///
    /// `PostTapering` falls back to `PreTapering` when the operators could not be reduced.
    pub fn aux_expectations(&self, state: &StateVector, mode: AuxEvaluation) -> Result<(AuxValues, AuxEvaluation)> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::Dimension(format!(
                "{}-qubit state for a {}-qubit problem",
                state.n_qubits(),
                self.n_qubits()
            )));
        }
        let eval = |ops: &[SparseOperator; 3], psi: &[Complex64]| AuxValues {
            n: ops[0].expectation(psi).re,
            sz: ops[1].expectation(psi).re,
            s2: ops[2].expectation(psi).re,
        };
        match (mode, &self.aux_reduced_sparse) {
            (AuxEvaluation::PostTapering, Some(ops)) => Ok((eval(ops, state.amplitudes()), mode)),
            _ => {
                let psi = self.chain.lift_state(state.amplitudes())?;
                Ok((eval(&self.aux_full_sparse, &psi), AuxEvaluation::PreTapering))
            }
        }
    }

    pub fn energy(&self, state: &StateVector) -> f64 {
        self.h_sparse.expectation(state.amplitudes()).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ground_energy;
    use crate::pauli::commutator;
    use crate::testing::{sector_ground_energy, toy_integrals};

    fn all_options() -> [EncodingOptions; 3] {
        [
            EncodingOptions::jordan_wigner(),
            EncodingOptions {
                mapping: Mapping::Parity,
                two_qubit_reduction: true,
                taper: false,
            },
            EncodingOptions::default(),
        ]
    }

    #[test]
    fn reference_state_has_sector_quantum_numbers() {
        let mut ints = toy_integrals(3, 2, 1, 8);
        ints.n_frozen_electrons = 4;
        ints.orbital_irreps = vec![1, 2, 1];
        for opts in [EncodingOptions::jordan_wigner(), EncodingOptions::default()] {
            let p = EncodedProblem::build(&ints, opts).unwrap();
            for mode in [AuxEvaluation::PostTapering, AuxEvaluation::PreTapering] {
                let (aux, _) = p.aux_expectations(&p.reference_state(), mode).unwrap();
                assert!((aux.n - 7.0).abs() < 1e-12);
                assert!((aux.sz - 0.5).abs() < 1e-12);
                assert!((aux.s2 - 0.75).abs() < 1e-12);
            }
            assert!((p.energy(&p.reference_state()) - ints.reference_energy()).abs() < 1e-10);
        }
    }

    #[test]
    fn every_chain_commutes_with_auxiliaries_and_keeps_ground_energy() {
        let mut ints = toy_integrals(3, 1, 1, 21);
        ints.orbital_irreps = vec![1, 1, 4];
        // Zero every integral that breaks the point-group symmetry.
        let irr = ints.orbital_irreps.clone();
        let g = |p: usize| irr[p] - 1;
        for p in 0..3 {
            for q in 0..3 {
                if g(p) != g(q) {
                    ints.h[(p, q)] = 0.0;
                }
                for r in 0..3 {
                    for s in 0..3 {
                        if g(p) ^ g(q) ^ g(r) ^ g(s) != 0 {
                            ints.set_eri(p, q, r, s, 0.0);
                        }
                    }
                }
            }
        }
        let fci = sector_ground_energy(&ints);
        let mut sizes = Vec::new();
        for opts in all_options() {
            let p = EncodedProblem::build(&ints, opts).unwrap();
            sizes.push(p.n_qubits());
            let aux = p.aux_reduced.as_ref().unwrap();
            for a in aux {
                assert!(commutator(&p.hamiltonian, a).unwrap().simplify(1e-10).is_empty());
            }
            if opts.taper || opts.two_qubit_reduction {
                assert!((ground_energy(&p.hamiltonian).unwrap() - fci).abs() < 1e-10);
            }
        }
        assert_eq!(sizes, vec![6, 4, 3]);
    }
}
