//! Run configuration in a `key = value` text format.
//!
//! ```text
//! # LiH dissociation curve
//! molecule = LiH
//! manifest = lih/manifest.txt       # or repeated `geometry = R file` lines
//! n_frozen = 1
//! active_irreps = 1
//! ansatz = ry_linear
//! n_l = 3
//! restarts = 20
//! seed = 7
//! ```
//!
//! Relative paths resolve against the directory of the config file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzSpec, Family};
use crate::encoding::AuxEvaluation;
use crate::error::{Error, Result};
use crate::first_quant::{Projection, Scheme, DEFAULT_LAMBDA};
use crate::io::manifest::{read_manifest, Geometry};
use crate::optimize::{Method, OptimizerOptions};
use crate::vqe::ScanConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstQuantConfig {
    pub scheme: Scheme,
    pub projection: Projection,
    pub lambda: f64,
}

impl Default for FirstQuantConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Pad,
            projection: Projection::Vap,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scan: ScanConfig,
    pub first_quant: FirstQuantConfig,
}

const KEYS: &[&str] = &[
    "molecule",
    "manifest",
    "geometry",
    "n_frozen",
    "active_irreps",
    "mapping",
    "two_qubit_reduction",
    "taper",
    "ansatz",
    "n_l",
    "flavor",
    "formula",
    "ordering",
    "layering",
    "optimizer",
    "max_evaluations",
    "grad_tol",
    "restarts",
    "seed",
    "aux",
    "warm_start",
    "scheme",
    "projection",
    "lambda",
];

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn parse_aux(v: &str) -> std::result::Result<AuxEvaluation, String> {
    match v {
        "post_tapering" => Ok(AuxEvaluation::PostTapering),
        "pre_tapering" => Ok(AuxEvaluation::PreTapering),
        _ => Err(format!("unknown aux mode {v:?}")),
    }
}

fn via<T: FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| e.to_string())
}

/// Parses config text; `base` resolves relative paths, `name` labels errors.
pub fn parse_config_str(text: &str, base: &Path, name: &str) -> Result<RunConfig> {
    let mut scan = ScanConfig::new("molecule", Vec::new(), AnsatzSpec::new(Family::RyLinear, 1));
    let mut fq = FirstQuantConfig::default();
    let mut method = None;
    let resolve = |p: &str| -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::parse(name, i + 1, msg);
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        if key == "manifest" {
            scan.geometries.extend(read_manifest(resolve(value))?);
            continue;
        }
        let r: std::result::Result<(), String> = (|| {
            match key {
                "molecule" => scan.molecule = value.to_string(),
                "geometry" => {
                    let (r, file) = value
                        .split_once(char::is_whitespace)
                        .ok_or("expected `geometry = R file`")?;
                    scan.geometries.push(Geometry {
                        r: via(r)?,
                        path: resolve(file.trim()),
                        e_fci: None,
                        e_hf: None,
                    });
                }
                "n_frozen" => scan.active.n_frozen = via(value)?,
                "active_irreps" => {
                    scan.active.irreps = Some(
                        value
                            .split(|c: char| c == ',' || c.is_whitespace())
                            .filter(|s| !s.is_empty())
                            .map(via)
                            .collect::<std::result::Result<_, _>>()?,
                    )
                }
                "mapping" => scan.encoding.mapping = via(value)?,
                "two_qubit_reduction" => scan.encoding.two_qubit_reduction = parse_bool(value)?,
                "taper" => scan.encoding.taper = parse_bool(value)?,
                "ansatz" => scan.ansatz.family = via(value)?,
                "n_l" => scan.ansatz.n_l = via(value)?,
                "flavor" => scan.ansatz.flavor = via(value)?,
                "formula" => scan.ansatz.formula = via(value)?,
                "ordering" => scan.ansatz.ordering = via(value)?,
                "layering" => scan.ansatz.layering = via(value)?,
                "optimizer" => method = Some(via::<Method>(value)?),
                "max_evaluations" => scan.optimizer.max_evaluations = via(value)?,
                "grad_tol" => scan.optimizer.grad_tol = via(value)?,
                "restarts" => scan.restarts = via(value)?,
                "seed" => scan.seed = via(value)?,
                "aux" => scan.aux_mode = parse_aux(value)?,
                "warm_start" => scan.warm_start = via(value)?,
                "scheme" => fq.scheme = via(value)?,
                "projection" => fq.projection = via(value)?,
                "lambda" => fq.lambda = via(value)?,
                _ => unreachable!(),
            }
            Ok(())
        })();
        r.map_err(err)?;
    }
    if let Some(m) = method {
        let keep = scan.optimizer;
        scan.optimizer = OptimizerOptions {
            max_evaluations: keep.max_evaluations,
            grad_tol: keep.grad_tol,
            ..OptimizerOptions::with_method(m)
        };
    }
    if scan.encoding.mapping != crate::fermion::Mapping::Parity && scan.encoding.two_qubit_reduction {
        scan.encoding.two_qubit_reduction = false;
    }
    Ok(RunConfig { scan, first_quant: fq })
}

pub fn read_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path.parent().unwrap_or(Path::new(".")), &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Flavor;
    use crate::fermion::Mapping;

    #[test]
    fn parses_a_full_config() {
        let text = "molecule = LiH\ngeometry = 1.5 a/R1.5.FCIDUMP\ngeometry = 2.0 /abs/R2.FCIDUMP\n\
                    n_frozen = 1\nactive_irreps = 1, 2\nansatz = quccsd # comment\nn_l = 2\nflavor = restricted\n\
                    optimizer = cg\nmax_evaluations = 50\nrestarts = 3\nseed = 9\naux = pre_tapering\n\
                    mapping = jordan_wigner\nscheme = trim\n";
        let c = parse_config_str(text, Path::new("/cfg"), "t").unwrap();
        let s = &c.scan;
        assert_eq!(s.molecule, "LiH");
        assert_eq!(s.geometries[0].path, PathBuf::from("/cfg/a/R1.5.FCIDUMP"));
        assert_eq!(s.geometries[1].path, PathBuf::from("/abs/R2.FCIDUMP"));
        assert_eq!(s.active.irreps, Some(vec![1, 2]));
        assert_eq!((s.ansatz.family, s.ansatz.n_l, s.ansatz.flavor), (Family::Quccsd, 2, Flavor::Restricted));
        assert_eq!((s.optimizer.method, s.optimizer.max_evaluations), (Method::Cg, 50));
        assert_eq!((s.restarts, s.seed, s.aux_mode), (3, 9, AuxEvaluation::PreTapering));
        assert_eq!(s.encoding.mapping, Mapping::JordanWigner);
        assert!(!s.encoding.two_qubit_reduction);
        assert_eq!(c.first_quant.scheme, Scheme::Trim);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [("seed = 1\nbogus = 2\n", 2), ("n_l = x\n", 1), ("ansatz\n", 1)] {
            match parse_config_str(text, Path::new("."), "c.cfg") {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line),
                other => panic!("{other:?}"),
            }
        }
    }
}
