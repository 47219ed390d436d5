use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vqelab::ansatz::{build_hardware_efficient, AnsatzSpec, Family};
use vqelab::encoding::{EncodedProblem, EncodingOptions};
use vqelab::first_quant::{pad, projected_objective, FirstQuantProblem, PaddedProblem, Projection, DEFAULT_LAMBDA};
use vqelab::linalg::ground_energy;
use vqelab::statevector::{apply_circuit, StateVector};
use vqelab::testing::toy_integrals;
use vqelab::{PauliString, QubitOperator};

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| PauliString::from_bits(n, x & mask, z & mask).unwrap())
}

fn state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

fn toy_problem(options: EncodingOptions) -> &'static EncodedProblem {
    static JW: OnceLock<EncodedProblem> = OnceLock::new();
    static TAPERED: OnceLock<EncodedProblem> = OnceLock::new();
    let cell = if options == EncodingOptions::default() { &TAPERED } else { &JW };
    cell.get_or_init(|| EncodedProblem::build(&toy_integrals(3, 1, 1, 42), options).unwrap())
}

fn padded() -> &'static (PaddedProblem, f64) {
    static P: OnceLock<(PaddedProblem, f64)> = OnceLock::new();
    P.get_or_init(|| {
        let fq = FirstQuantProblem::build(&toy_integrals(3, 1, 1, 7)).unwrap();
        (pad(&fq.h_tilde, DEFAULT_LAMBDA).unwrap(), fq.ground_energy)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pauli_product_is_associative(a in pauli(5), b in pauli(5), c in pauli(5)) {
        let (p1, ab) = a.mul(&b).unwrap();
        let (p2, ab_c) = ab.mul(&c).unwrap();
        let (p3, bc) = b.mul(&c).unwrap();
        let (p4, a_bc) = a.mul(&bc).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!((p1 * p2 - p3 * p4).norm() < 1e-15);
        prop_assert!((p1.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn commutation_matches_the_symplectic_form(a in pauli(6), b in pauli(6)) {
        let (pab, ab) = a.mul(&b).unwrap();
        let (pba, ba) = b.mul(&a).unwrap();
        prop_assert_eq!(ab, ba);
        let same = (pab - pba).norm() < 1e-15;
        prop_assert_eq!(same, a.commutes_with(&b));
        prop_assert_eq!(a.commutes_with(&b), b.commutes_with(&a));
    }

    #[test]
    fn hermitian_sums_stay_hermitian(terms in prop::collection::vec((pauli(4), -2.0f64..2.0), 1..12)) {
        let op = QubitOperator::from_terms(4, terms.into_iter().map(|(s, c)| vqelab::PauliTerm::new(c, s))).unwrap();
        prop_assert!(op.is_hermitian(1e-14));
        prop_assert!(op.checked_mul(&op).unwrap().is_hermitian(1e-12));
        let back = QubitOperator::from_text(&op.to_text()).unwrap();
        prop_assert!(back.checked_add(&op.scale(-1.0)).unwrap().max_abs_coeff() == 0.0);
    }

    #[test]
    fn lift_then_reduce_is_the_identity(seed in any::<u64>()) {
        let p = toy_problem(EncodingOptions::default());
        let phi = state(p.n_qubits(), seed);
        let lifted = p.chain.lift_state(phi.amplitudes()).unwrap();
        let back = p.chain.reduce_state(&lifted).unwrap();
        let err = back.iter().zip(phi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "{}", err);
        let norm: f64 = lifted.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ansatz_energies_respect_the_variational_bound(seed in any::<u64>(), n_l in 1usize..4) {
        let p = toy_problem(EncodingOptions::default());
        let floor = ground_energy(&p.hamiltonian).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for family in [Family::RyLinear, Family::RyFull, Family::Cascade] {
            let c = build_hardware_efficient(&AnsatzSpec::new(family, n_l), p.n_qubits()).unwrap();
            let theta: Vec<f64> = (0..c.n_theta()).map(|_| rng.gen_range(-3.2..3.2)).collect();
            let e = p.energy(&apply_circuit(&p.reference_state(), &c, &theta).unwrap());
            prop_assert!(e >= floor - 1e-10, "{} {} < {}", family, e, floor);
        }
    }

    #[test]
    fn vap_never_undercuts_the_ground_state(seed in any::<u64>()) {
        let (problem, ground) = padded();
        let s = state(problem.n_q, seed);
        let (v, p) = projected_objective(&s, problem, Projection::Vap).unwrap();
        prop_assert!(v >= ground - 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        let (pav, _) = projected_objective(&s, problem, Projection::Pav).unwrap();
        prop_assert!(pav >= ground - 1e-10);
    }
}

#[test]
fn pauli_counts_stay_below_the_string_count() {
    for m in 1..=3 {
        for opts in [EncodingOptions::jordan_wigner(), EncodingOptions::default()] {
            let p = EncodedProblem::build(&toy_integrals(m, 1, 1, m as u64), opts).unwrap();
            assert!(p.hamiltonian.len() <= 1 << (2 * p.n_qubits()));
        }
    }
}
