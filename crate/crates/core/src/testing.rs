//! Deterministic toy systems shared by unit tests, integration tests and examples.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fermion::IntegralSet;

/// Random integrals with the full 8-fold permutational symmetry.
///
/// One-electron diagonals are spread out and negative, and `(pp|qq)` is
/// positive, so the spectrum looks vaguely molecular.
pub fn toy_integrals(m: usize, n_alpha: usize, n_beta: usize, seed: u64) -> IntegralSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ints = IntegralSet::zeros(m, n_alpha, n_beta);
    ints.e0 = rng.gen_range(0.5..1.5);
    let mut h = DMatrix::zeros(m, m);
    for p in 0..m {
        h[(p, p)] = -2.0 + 0.7 * p as f64 + rng.gen_range(-0.1..0.1);
        for q in 0..p {
            let v = rng.gen_range(-0.2..0.2);
            h[(p, q)] = v;
            h[(q, p)] = v;
        }
    }
    ints.h = h;
    for p in 0..m {
        for q in 0..=p {
            for r in 0..m {
                for s in 0..=r {
                    if p * m + q < r * m + s {
                        continue;
                    }
                    let v = if p == q && r == s {
                        rng.gen_range(0.4..0.8)
                    } else {
                        rng.gen_range(-0.1..0.1)
                    };
                    ints.set_eri(p, q, r, s, v);
                }
            }
        }
    }
    ints
}

/// Two-orbital, two-electron model with H2-like integrals at a minimal basis.
pub fn h2_like() -> IntegralSet {
    let mut ints = IntegralSet::zeros(2, 1, 1);
    ints.e0 = 0.7137539936876182;
    ints.set_h(0, 0, -1.2524635735648981);
    ints.set_h(1, 1, -0.4759487172683097);
    ints.set_eri(0, 0, 0, 0, 0.6744887663568375);
    ints.set_eri(1, 1, 1, 1, 0.6973979494693358);
    ints.set_eri(0, 0, 1, 1, 0.663_634_047_861_504);
    ints.set_eri(0, 1, 0, 1, 0.1812875358123322);
    ints.orbital_irreps = vec![1, 6];
    ints
}

/// Ground energy of the JW Hamiltonian restricted to the `(n_alpha, n_beta)` sector, by dense
/// diagonalization of the Fock-space matrix. Small systems only.
pub fn sector_ground_energy(ints: &IntegralSet) -> f64 {
    let m = ints.norb();
    let h = crate::fermion::build_molecular_hamiltonian(ints).expect("valid integrals");
    let fock = h.to_fock_matrix(2 * m).expect("small system");
    let low = (1usize << m) - 1;
    let idx: Vec<usize> = (0..1usize << (2 * m))
        .filter(|&s| {
            (s & low).count_ones() as usize == ints.n_alpha
                && (s >> m).count_ones() as usize == ints.n_beta
        })
        .collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| fock[(idx[r], idx[c])]);
    crate::linalg::eigvalsh_complex(&sub)[0]
}

pub use crate::io::Geometry as FixtureEntry;

/// Repository `fixtures/` directory.
pub fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Reads `fixtures/<molecule>/manifest.txt`.
pub fn fixture_manifest(molecule: &str) -> Vec<FixtureEntry> {
    crate::io::read_manifest(fixtures_dir().join(molecule).join("manifest.txt")).expect("fixture manifest")
}

/// Frozen-core and active-orbital selection used for each bundled fixture.
pub fn fixture_active_space(molecule: &str) -> crate::vqe::ActiveSpace {
    match molecule {
        "lih" => crate::vqe::ActiveSpace { n_frozen: 1, irreps: Some(vec![1]) },
        "h2o" => crate::vqe::ActiveSpace { n_frozen: 2, irreps: None },
        other => panic!("no fixture {other}"),
    }
}

/// Active-space integrals of a fixture: LiH freezes Li 1s and keeps the sigma
/// orbitals, H2O freezes O 1s/2s and keeps the remaining valence orbitals.
pub fn fixture_integrals(molecule: &str, entry: &FixtureEntry) -> IntegralSet {
    fixture_active_space(molecule).load(&entry.path).expect("fixture integrals")
}
