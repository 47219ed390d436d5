use vqelab::encoding::EncodingOptions;
use vqelab::fci::fci;
use vqelab::io::{fcidump_to_string, parse_fcidump, parse_fcidump_str, write_fcidump};
use vqelab::testing::{fixture_active_space, fixture_integrals, fixture_manifest};
use vqelab::vqe::prepare_geometry;

#[test]
fn every_fixture_matches_its_manifest_energies() {
    for mol in ["lih", "h2o"] {
        let manifest = fixture_manifest(mol);
        assert!(manifest.len() >= 20, "{mol}: {} geometries", manifest.len());
        for g in &manifest {
            let ints = fixture_integrals(mol, g);
            let e = fci(&ints).unwrap().energy;
            let expected = g.e_fci.expect("manifest lists FCI energies");
            assert!((e - expected).abs() <= 1e-8, "{mol} R={}: {e} vs {expected}", g.r);
            if let Some(hf) = g.e_hf {
                assert!((ints.reference_energy() - hf).abs() <= 1e-8, "{mol} R={} HF", g.r);
            }
        }
    }
}

#[test]
fn fcidump_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    for mol in ["lih", "h2o"] {
        let g = &fixture_manifest(mol)[3];
        let full = parse_fcidump(&g.path).unwrap();
        let path = dir.path().join(format!("{mol}.FCIDUMP"));
        write_fcidump(&full, &path).unwrap();
        assert_eq!(parse_fcidump(&path).unwrap(), full);

        // folded-core integrals carry NFROZEN
        let active = fixture_active_space(mol).apply(&full).unwrap();
        let text = fcidump_to_string(&active);
        assert_eq!(parse_fcidump_str(&text, "active").unwrap(), active);
    }
}

#[test]
fn reference_points_are_consistent_across_encodings() {
    let g = &fixture_manifest("lih")[4];
    let active = fixture_active_space("lih");
    let (_, _, jw) = prepare_geometry(g, &active, EncodingOptions::jordan_wigner()).unwrap();
    let (_, _, tapered) = prepare_geometry(g, &active, EncodingOptions::default()).unwrap();
    assert_eq!(jw.e_fci, tapered.e_fci);
    assert!(tapered.n_qubits < jw.n_qubits);
    assert!(tapered.e_hf >= tapered.e_fci);
}
