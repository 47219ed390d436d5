//! Result records, their JSON schema and the on-disk repository layout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, CostReport, Family};
use crate::encoding::EncodingOptions;
use crate::error::{Error, Result};
use crate::first_quant::{FirstQuantPoint, FirstQuantRun, Projection, Scheme};
use crate::optimize::Method;
use crate::vqe::{Metrics, ReferencePoint, ScanPoint, VqeRun};

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level folders of a result repository.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "hardware_efficient")]
    HardwareEfficient,
    #[serde(rename = "qUCCSD")]
    Quccsd,
    #[serde(rename = "trim")]
    Trim,
    #[serde(rename = "projection_after_variation")]
    ProjectionAfterVariation,
    #[serde(rename = "variation_after_projection")]
    VariationAfterProjection,
    #[serde(rename = "scf_fci")]
    ScfFci,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::HardwareEfficient,
        Category::Quccsd,
        Category::Trim,
        Category::ProjectionAfterVariation,
        Category::VariationAfterProjection,
        Category::ScfFci,
    ];

    pub fn folder(self) -> &'static str {
        match self {
            Category::HardwareEfficient => "hardware_efficient",
            Category::Quccsd => "qUCCSD",
            Category::Trim => "trim",
            Category::ProjectionAfterVariation => "projection_after_variation",
            Category::VariationAfterProjection => "variation_after_projection",
            Category::ScfFci => "scf_fci",
        }
    }

    pub fn of_ansatz(family: Family) -> Self {
        match family {
            Family::Quccsd => Category::Quccsd,
            _ => Category::HardwareEfficient,
        }
    }

    pub fn of_first_quant(scheme: Scheme, projection: Projection) -> Self {
        match (scheme, projection) {
            (Scheme::Trim, _) => Category::Trim,
            (Scheme::Pad, Projection::Pav) => Category::ProjectionAfterVariation,
            (Scheme::Pad, Projection::Vap) => Category::VariationAfterProjection,
        }
    }
}

/// A second-quantized VQE result at one geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeRecord {
    pub encoding: EncodingOptions,
    pub ansatz: AnsatzSpec,
    pub optimizer: Method,
    pub seed: u64,
    pub restarts: usize,
    pub e_vqe: f64,
    pub e_fci: f64,
    pub deltas: Metrics,
    pub best_restart: usize,
    pub runs: Vec<VqeRun>,
    pub cost_report: CostReport,
}

/// A first-quantized result at one geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstQuantRecord {
    pub ansatz: AnsatzSpec,
    pub seed: u64,
    pub k: usize,
    pub e_fci: f64,
    pub best_restart: usize,
    pub runs: Vec<FirstQuantRun>,
    pub cost_report: CostReport,
}

impl FirstQuantRecord {
    pub fn best(&self) -> &FirstQuantRun {
        &self.runs[self.best_restart]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Vqe(VqeRecord),
    FirstQuant(FirstQuantRecord),
    Reference(ReferencePoint),
}

/// One JSON file of the repository.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub category: Category,
    pub molecule: String,
    pub geometry: f64,
    pub payload: Payload,
    /// Seconds; only filled when timing was requested, so reruns stay byte-identical.
    pub wall_time: Option<f64>,
}

impl ResultRecord {
    pub fn new(category: Category, molecule: impl Into<String>, geometry: f64, payload: Payload) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            category,
            molecule: molecule.into(),
            geometry,
            payload,
            wall_time: None,
        }
    }

    /// Series label shared by all geometries of one curve.
    pub fn tag(&self) -> String {
        match &self.payload {
            Payload::Vqe(v) => ansatz_tag(&v.ansatz),
            Payload::FirstQuant(f) => ansatz_tag(&f.ansatz),
            Payload::Reference(_) => "fci".into(),
        }
    }

    /// `category/molecule/R<geometry>_<tag>.json` relative to the repository root.
    pub fn relative_path(&self) -> PathBuf {
        PathBuf::from(self.category.folder())
            .join(&self.molecule)
            .join(format!("R{:.3}_{}.json", self.geometry, self.tag()))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One CSV row for [`CSV_HEADER`]; empty cells where a column does not apply.
    fn csv_row(&self) -> Vec<String> {
        let (e, e_fci, d) = match &self.payload {
            Payload::Vqe(v) => (
                v.e_vqe,
                v.e_fci,
                [v.deltas.delta_e, v.deltas.delta_n, v.deltas.delta_sz, v.deltas.delta_s2, f64::NAN],
            ),
            Payload::FirstQuant(f) => {
                let b = f.best();
                (b.energy, f.e_fci, [b.energy - f.e_fci, 0.0, 0.0, 0.0, b.physical_norm])
            }
            Payload::Reference(r) => (r.e_hf, r.e_fci, [r.e_hf - r.e_fci, 0.0, 0.0, 0.0, f64::NAN]),
        };
        let cell = |x: f64| if x.is_nan() { String::new() } else { format!("{x:.12e}") };
        let mut row = vec![format!("{:.3}", self.geometry), cell(e), cell(e_fci)];
        row.extend(d.into_iter().map(cell));
        row
    }
}

pub const CSV_HEADER: [&str; 8] = ["R", "energy", "e_fci", "delta_e", "delta_n", "delta_sz", "delta_s2", "physical_norm"];

pub fn ansatz_tag(a: &AnsatzSpec) -> String {
    let mut t = format!("{}_l{}", a.family, a.n_l);
    if a.family == Family::Quccsd {
        write!(t, "_{}_{}_{}_{}", a.flavor, a.formula, a.ordering, a.layering).unwrap();
    }
    t
}

/// Records for a finished second-quantized scan, one per geometry.
pub fn scan_records(
    molecule: &str,
    encoding: EncodingOptions,
    ansatz: &AnsatzSpec,
    optimizer: Method,
    seed: u64,
    points: &[ScanPoint],
) -> Vec<ResultRecord> {
    points
        .iter()
        .map(|p| {
            let b = p.best_run();
            ResultRecord::new(
                Category::of_ansatz(ansatz.family),
                molecule,
                p.reference.r,
                Payload::Vqe(VqeRecord {
                    encoding,
                    ansatz: *ansatz,
                    optimizer,
                    seed,
                    restarts: p.runs.len(),
                    e_vqe: b.metrics.energy,
                    e_fci: p.reference.e_fci,
                    deltas: b.metrics,
                    best_restart: p.best,
                    runs: p.runs.clone(),
                    cost_report: p.cost.clone(),
                }),
            )
        })
        .collect()
}

/// Records for a finished first-quantized scan.
pub fn first_quant_records(
    molecule: &str,
    ansatz: &AnsatzSpec,
    scheme: Scheme,
    projection: Projection,
    seed: u64,
    points: &[FirstQuantPoint],
) -> Vec<ResultRecord> {
    points
        .iter()
        .map(|p| {
            ResultRecord::new(
                Category::of_first_quant(scheme, projection),
                molecule,
                p.r,
                Payload::FirstQuant(FirstQuantRecord {
                    ansatz: *ansatz,
                    seed,
                    k: p.k,
                    e_fci: p.e_fci,
                    best_restart: p.best,
                    runs: p.runs.clone(),
                    cost_report: p.cost.clone(),
                }),
            )
        })
        .collect()
}

/// Exact reference records, one per geometry.
pub fn reference_records(molecule: &str, points: &[ReferencePoint]) -> Vec<ResultRecord> {
    points
        .iter()
        .map(|p| ResultRecord::new(Category::ScfFci, molecule, p.r, Payload::Reference(p.clone())))
        .collect()
}

fn create_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn write_if_changed(path: &Path, bytes: &str) -> Result<()> {
    if std::fs::read(path).map(|b| b == bytes.as_bytes()).unwrap_or(false) {
        return Ok(());
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes every record as JSON plus one CSV per curve; returns written paths, sorted.
///
/// The six category folders always exist afterwards. Rewriting the same
/// records leaves the files byte-identical.
pub fn write_repository(records: &[ResultRecord], root: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let root = root.as_ref();
    for c in Category::ALL {
        create_dir(&root.join(c.folder()))?;
    }
    let mut written = Vec::new();
    let mut curves: std::collections::BTreeMap<PathBuf, Vec<&ResultRecord>> = Default::default();
    for r in records {
        let path = root.join(r.relative_path());
        create_dir(path.parent().expect("nested path"))?;
        write_if_changed(&path, &r.to_json()?)?;
        written.push(path);
        let csv = root
            .join(r.category.folder())
            .join(&r.molecule)
            .join(format!("curve_{}.csv", r.tag()));
        curves.entry(csv).or_default().push(r);
    }
    for (path, mut rows) in curves {
        rows.sort_by(|a, b| a.geometry.total_cmp(&b.geometry));
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Numerical(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in rows {
            w.write_record(r.csv_row()).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        write_if_changed(&path, &String::from_utf8(bytes).expect("ascii"))?;
        written.push(path);
    }
    written.sort();
    Ok(written)
}

/// Reads back every JSON record below `root`, sorted by relative path.
pub fn read_repository(root: impl AsRef<Path>) -> Result<Vec<ResultRecord>> {
    let root = root.as_ref();
    let mut files = Vec::new();
    for c in Category::ALL {
        let dir = root.join(c.folder());
        if !dir.is_dir() {
            continue;
        }
        for mol in std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let mol = mol.map_err(|e| Error::io(&dir, e))?.path();
            if !mol.is_dir() {
                continue;
            }
            for f in std::fs::read_dir(&mol).map_err(|e| Error::io(&mol, e))? {
                let f = f.map_err(|e| Error::io(&mol, e))?.path();
                if f.extension().is_some_and(|x| x == "json") {
                    files.push(f);
                }
            }
        }
    }
    files.sort();
    files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).map_err(|e| Error::io(f, e))?;
            Ok(serde_json::from_str(&text)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(r: f64) -> ResultRecord {
        ResultRecord::new(
            Category::ScfFci,
            "LiH",
            r,
            Payload::Reference(ReferencePoint {
                r,
                e_fci: -7.9,
                s2_fci: 0.0,
                e_hf: -7.8,
                n_qubits: 4,
                n_pauli: 100,
            }),
        )
    }

    #[test]
    fn folder_names_are_exact() {
        let names: Vec<&str> = Category::ALL.iter().map(|c| c.folder()).collect();
        assert_eq!(
            names,
            [
                "hardware_efficient",
                "qUCCSD",
                "trim",
                "projection_after_variation",
                "variation_after_projection",
                "scf_fci"
            ]
        );
        for c in Category::ALL {
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.folder()));
        }
    }

    #[test]
    fn empty_repository_has_six_folders() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_repository(&[], dir.path()).unwrap().is_empty());
        let mut found: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        found.sort();
        let mut want: Vec<String> = Category::ALL.iter().map(|c| c.folder().to_string()).collect();
        want.sort();
        assert_eq!(found, want);
    }

    #[test]
    fn round_trip_and_idempotence() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![reference(1.5), reference(2.0)];
        let paths = write_repository(&recs, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths[0].ends_with("scf_fci/LiH/R1.500_fci.json"));
        let before: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        write_repository(&recs, dir.path()).unwrap();
        let after: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(before, after);
        assert_eq!(read_repository(dir.path()).unwrap(), recs);
        let csv = std::fs::read_to_string(dir.path().join("scf_fci/LiH/curve_fci.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with(&CSV_HEADER.join(",")));
    }
}
