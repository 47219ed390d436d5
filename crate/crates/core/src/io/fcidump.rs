//! FCIDUMP reader and writer.
//!
//! Integrals are in chemists' notation with 1-based orbital indices; an index
//! of 0 marks one-body (`i j 0 0`), orbital-energy (`i 0 0 0`, ignored) and
//! constant (`0 0 0 0`) lines.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fermion::IntegralSet;

/// Reads an FCIDUMP file.
pub fn parse_fcidump(path: impl AsRef<Path>) -> Result<IntegralSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fcidump_str(&text, &path.display().to_string())
}

#[derive(Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: i64,
    orbsym: Vec<u8>,
    nfrozen: usize,
}

/// Parses FCIDUMP text; `name` only labels error messages.
pub fn parse_fcidump_str(text: &str, name: &str) -> Result<IntegralSet> {
    let mut header = Header::default();
    let mut lines = text.lines().enumerate();
    let mut in_namelist = false;
    let mut key: Option<String> = None;
    let mut header_line = 0;
    for (k, raw) in lines.by_ref() {
        header_line = k + 1;
        let mut line = raw.trim();
        if !in_namelist {
            if line.is_empty() {
                continue;
            }
            let upper = line.to_ascii_uppercase();
            let Some(rest) = upper.strip_prefix("&FCI") else {
                return Err(Error::parse(name, k + 1, "expected &FCI namelist"));
            };
            in_namelist = true;
            let done = parse_namelist_chunk(rest, &mut header, &mut key)
                .map_err(|m| Error::parse(name, k + 1, m))?;
            if done {
                break;
            }
            continue;
        }
        line = line.trim();
        let done = parse_namelist_chunk(&line.to_ascii_uppercase(), &mut header, &mut key)
            .map_err(|m| Error::parse(name, k + 1, m))?;
        if done {
            break;
        }
    }
    if !in_namelist {
        return Err(Error::parse(name, 1, "missing &FCI namelist"));
    }
    let m = header
        .norb
        .ok_or_else(|| Error::parse(name, header_line, "NORB missing"))?;
    let nelec = header
        .nelec
        .ok_or_else(|| Error::parse(name, header_line, "NELEC missing"))?;
    let twice_alpha = nelec as i64 + header.ms2;
    if twice_alpha < 0 || twice_alpha % 2 != 0 || twice_alpha > 2 * nelec as i64 {
        return Err(Error::parse(
            name,
            header_line,
            format!("NELEC={nelec} inconsistent with MS2={}", header.ms2),
        ));
    }
    let n_alpha = (twice_alpha / 2) as usize;
    let n_beta = nelec - n_alpha;
    if n_alpha > m || n_beta > m {
        return Err(Error::parse(name, header_line, format!("{nelec} electrons do not fit NORB={m}")));
    }
    let orbsym = if header.orbsym.is_empty() {
        vec![1; m]
    } else if header.orbsym.len() == m {
        header.orbsym.clone()
    } else {
        return Err(Error::parse(
            name,
            header_line,
            format!("ORBSYM has {} entries for NORB={m}", header.orbsym.len()),
        ));
    };
    if orbsym.iter().any(|&s| !(1..=8).contains(&s)) {
        return Err(Error::parse(name, header_line, "ORBSYM labels must be 1..8"));
    }

    let mut ints = IntegralSet::zeros(m, n_alpha, n_beta);
    ints.orbital_irreps = orbsym;
    ints.n_frozen_electrons = header.nfrozen;
    for (k, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::parse(name, k + 1, format!("expected `value i j k l`, got {line:?}")));
        }
        let v: f64 = f[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::parse(name, k + 1, format!("bad value {:?}", f[0])))?;
        let mut idx = [0usize; 4];
        for (slot, s) in idx.iter_mut().zip(&f[1..]) {
            *slot = s
                .parse()
                .map_err(|_| Error::parse(name, k + 1, format!("bad index {s:?}")))?;
            if *slot > m {
                return Err(Error::parse(name, k + 1, format!("index {slot} exceeds NORB={m}")));
            }
        }
        match idx {
            [0, 0, 0, 0] => ints.e0 = v,
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => ints.set_h(i - 1, j - 1, v),
            [i, j, a, b] if i > 0 && j > 0 && a > 0 && b > 0 => ints.set_eri(i - 1, j - 1, a - 1, b - 1, v),
            _ => return Err(Error::parse(name, k + 1, format!("unsupported index pattern {idx:?}"))),
        }
    }
    ints.validate()?;
    Ok(ints)
}

/// Consumes one namelist line; returns true at `&END` or `/`.
fn parse_namelist_chunk(chunk: &str, h: &mut Header, key: &mut Option<String>) -> std::result::Result<bool, String> {
    let (body, done) = match chunk.find("&END").or_else(|| chunk.find('/')) {
        Some(pos) => (&chunk[..pos], true),
        None => (chunk, false),
    };
    for token in body.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
        let value = match token.split_once('=') {
            Some((k, v)) => {
                *key = Some(k.trim().to_string());
                if k.trim() == "ORBSYM" {
                    h.orbsym.clear();
                }
                v.trim()
            }
            None => token,
        };
        if value.is_empty() {
            continue;
        }
        let Some(k) = key.as_deref() else {
            return Err(format!("value {value:?} without a key"));
        };
        let int = || value.parse::<i64>().map_err(|_| format!("bad {k} value {value:?}"));
        match k {
            "NORB" => h.norb = Some(usize::try_from(int()?).map_err(|_| "negative NORB".to_string())?),
            "NELEC" => h.nelec = Some(usize::try_from(int()?).map_err(|_| "negative NELEC".to_string())?),
            "MS2" => h.ms2 = int()?,
            "ORBSYM" => h.orbsym.push(u8::try_from(int()?).map_err(|_| format!("bad ORBSYM {value:?}"))?),
            "NFROZEN" => h.nfrozen = usize::try_from(int()?).map_err(|_| "negative NFROZEN".to_string())?,
            _ => {}
        }
    }
    Ok(done)
}

/// FCIDUMP text for `ints`; unique nonzero integrals only, floats written to round-trip exactly.
///
/// A non-standard `NFROZEN` key carries folded-core electrons when nonzero.
pub fn fcidump_to_string(ints: &IntegralSet) -> String {
    let m = ints.norb();
    let mut s = String::new();
    let _ = writeln!(
        s,
        " &FCI NORB={m},NELEC={},MS2={},",
        ints.n_alpha + ints.n_beta,
        ints.n_alpha as i64 - ints.n_beta as i64
    );
    let syms: Vec<String> = ints.orbital_irreps.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(s, "  ORBSYM={},", syms.join(","));
    let _ = writeln!(s, "  ISYM=1,");
    if ints.n_frozen_electrons > 0 {
        let _ = writeln!(s, "  NFROZEN={},", ints.n_frozen_electrons);
    }
    let _ = writeln!(s, " &END");
    for p in 0..m {
        for q in 0..=p {
            for r in 0..m {
                for t in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + t {
                        continue;
                    }
                    let v = ints.eri(p, q, r, t);
                    if v != 0.0 {
                        let _ = writeln!(s, "{v:?} {} {} {} {}", p + 1, q + 1, r + 1, t + 1);
                    }
                }
            }
        }
    }
    for p in 0..m {
        for q in 0..=p {
            let v = ints.h[(p, q)];
            if v != 0.0 {
                let _ = writeln!(s, "{v:?} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(s, "{:?} 0 0 0 0", ints.e0);
    s
}

pub fn write_fcidump(ints: &IntegralSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, fcidump_to_string(ints)).map_err(|e| Error::io(path, e))
}
