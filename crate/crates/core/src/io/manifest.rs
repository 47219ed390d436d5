//! Geometry manifests: one `R file [e_fci [e_hf]]` line per bond length.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One point of a dissociation curve and its integral file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub r: f64,
    pub path: PathBuf,
    /// Externally computed FCI energy, used as a cross-check only.
    pub e_fci: Option<f64>,
    pub e_hf: Option<f64>,
}

/// Parses manifest text; relative file names resolve against `dir`.
pub fn parse_manifest_str(text: &str, dir: &Path, name: &str) -> Result<Vec<Geometry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(name, i + 1, format!("bad number {s:?}")))
        };
        if f.len() < 2 || f.len() > 4 {
            return Err(Error::parse(name, i + 1, "expected `R file [e_fci [e_hf]]`"));
        }
        out.push(Geometry {
            r: num(f[0])?,
            path: dir.join(f[1]),
            e_fci: f.get(2).map(|s| num(s)).transpose()?,
            e_hf: f.get(3).map(|s| num(s)).transpose()?,
        });
    }
    Ok(out)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<Geometry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_manifest_str(&text, dir, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_optional_columns() {
        let g = parse_manifest_str("# c\n1.0 a.FCIDUMP -1.5\n\n2.0 b -1 -0.9\n", Path::new("/x"), "m").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].path, PathBuf::from("/x/a.FCIDUMP"));
        assert_eq!((g[0].e_fci, g[0].e_hf), (Some(-1.5), None));
        assert_eq!(g[1].e_hf, Some(-0.9));
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_manifest_str("1.0 a\nfoo b\n", Path::new("."), "m").unwrap_err();
        assert!(e.to_string().contains('2'), "{e}");
    }
}
