use vqelab::ansatz::{AnsatzSpec, Family};
use vqelab::first_quant::{scan_first_quant, Projection, Scheme};
use vqelab::io::{
    first_quant_records, read_repository, reference_records, scan_records, write_repository, Category, FirstQuantConfig,
};
use vqelab::testing::{fixture_active_space, fixture_manifest};
use vqelab::vqe::{scan_curve, ScanConfig};

fn small_scan(family: Family) -> ScanConfig {
    let geometries = fixture_manifest("lih").into_iter().step_by(6).collect();
    let mut cfg = ScanConfig::new("LiH", geometries, AnsatzSpec::new(family, 2));
    cfg.active = fixture_active_space("lih");
    cfg.restarts = 2;
    cfg.seed = 11;
    cfg
}

#[test]
fn repository_round_trip_covers_every_category() {
    let dir = tempfile::tempdir().unwrap();
    let mut records = Vec::new();
    for family in [Family::RyLinear, Family::Cascade] {
        let cfg = small_scan(family);
        let points = scan_curve(&cfg).unwrap();
        records.extend(scan_records(&cfg.molecule, cfg.encoding, &cfg.ansatz, cfg.optimizer.method, cfg.seed, &points));
        if family == Family::RyLinear {
            let refs: Vec<_> = points.iter().map(|p| p.reference.clone()).collect();
            records.extend(reference_records(&cfg.molecule, &refs));
        }
    }
    let cfg = small_scan(Family::RyLinear);
    for (scheme, projection) in [(Scheme::Trim, Projection::Vap), (Scheme::Pad, Projection::Vap)] {
        let fq = FirstQuantConfig {
            scheme,
            projection,
            ..FirstQuantConfig::default()
        };
        let points = scan_first_quant(&cfg, &fq).unwrap();
        records.extend(first_quant_records(&cfg.molecule, &cfg.ansatz, scheme, projection, cfg.seed, &points));
    }

    let written = write_repository(&records, dir.path()).unwrap();
    for c in Category::ALL {
        assert!(dir.path().join(c.folder()).is_dir(), "{}", c.folder());
    }
    assert!(written.iter().any(|p| p.extension().is_some_and(|e| e == "csv")));

    let mut expected = records.clone();
    let mut back = read_repository(dir.path()).unwrap();
    let key = |r: &vqelab::io::ResultRecord| r.relative_path();
    expected.sort_by_key(key);
    back.sort_by_key(key);
    assert_eq!(back, expected);

    // unchanged records are not rewritten
    let before: Vec<_> = written.iter().map(|p| std::fs::metadata(p).unwrap().modified().unwrap()).collect();
    write_repository(&records, dir.path()).unwrap();
    let after: Vec<_> = written.iter().map(|p| std::fs::metadata(p).unwrap().modified().unwrap()).collect();
    assert_eq!(before, after);
}
