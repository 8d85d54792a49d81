//! Text files with a trailing checksum line, and the enumeration cache built
//! on them.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};
use stabwire::tensor::OrbitTable;
use stabwire::StabilizerTensor;

const CHECKSUM_PREFIX: &str = "# sha256 ";
const LAGRANGIAN_HEADER: &str = "# stabwire-lagrangians v1";
const ORBIT_HEADER: &str = "# stabwire-orbits v1";

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Write `body` followed by its checksum line.
pub fn write_checked(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let text = format!("{body}{CHECKSUM_PREFIX}{}\n", digest(body));
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The body of a checked file, or `None` if it is missing or its checksum
/// does not match.
pub fn read_checked(path: &Path) -> Option<String> {
    let text = fs::read_to_string(path).ok()?;
    let body_end = text.trim_end_matches('\n').rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = text.split_at(body_end);
    let sum = last.trim_end().strip_prefix(CHECKSUM_PREFIX)?;
    (sum == digest(body)).then(|| body.to_string())
}

pub struct CachePaths {
    pub lagrangians: PathBuf,
    pub orbits: PathBuf,
    pub capacities: PathBuf,
}

impl CachePaths {
    pub fn new(dir: &Path) -> Self {
        Self {
            lagrangians: dir.join("lagrangians.txt"),
            orbits: dir.join("orbits.csv"),
            capacities: dir.join("capacity.csv"),
        }
    }
}

fn lagrangian_text(table: &OrbitTable) -> String {
    let mut out = format!("{LAGRANGIAN_HEADER}\n");
    for (ordinal, t) in table.tensors().iter().enumerate() {
        out.push_str(&format!("{ordinal},{t}\n"));
    }
    out
}

fn orbit_text(table: &OrbitTable) -> String {
    let mut out = format!("{ORBIT_HEADER}\nordinal,canonical_ordinal\n");
    for (ordinal, canonical) in table.canonical_ordinals().iter().enumerate() {
        out.push_str(&format!("{ordinal},{canonical}\n"));
    }
    out
}

fn parse_cache(lagrangians: &str, orbits: &str) -> Result<OrbitTable> {
    let mut tensors = Vec::new();
    for (i, line) in lagrangians.lines().skip(1).enumerate() {
        let (ordinal, strings) = line.split_once(',').context("malformed enumeration line")?;
        if ordinal.parse::<usize>()? != i {
            bail!("enumeration ordinals out of order at line {}", i + 2);
        }
        tensors.push(strings.parse::<StabilizerTensor>()?);
    }
    let mut canonical = Vec::new();
    for line in orbits.lines().skip(2) {
        let (_, c) = line.split_once(',').context("malformed orbit line")?;
        canonical.push(c.parse::<usize>()?);
    }
    if canonical.len() != tensors.len() {
        bail!(
            "orbit table has {} rows for {} tensors",
            canonical.len(),
            tensors.len()
        );
    }
    Ok(OrbitTable::from_parts(tensors, canonical))
}

/// Load the enumeration from `dir`, or build and store it. The flag says
/// whether the cached copy was used.
pub fn load_or_build(dir: &Path) -> Result<(OrbitTable, bool)> {
    let paths = CachePaths::new(dir);
    if let (Some(l), Some(o)) = (
        read_checked(&paths.lagrangians),
        read_checked(&paths.orbits),
    ) {
        if l.starts_with(LAGRANGIAN_HEADER) && o.starts_with(ORBIT_HEADER) {
            if let Ok(table) = parse_cache(&l, &o) {
                return Ok((table, true));
            }
        }
    }
    let table = OrbitTable::build();
    write_checked(&paths.lagrangians, &lagrangian_text(&table))?;
    write_checked(&paths.orbits, &orbit_text(&table))?;
    Ok((table, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        write_checked(&path, "a\nb\n").unwrap();
        assert_eq!(read_checked(&path).as_deref(), Some("a\nb\n"));
        let text = fs::read_to_string(&path).unwrap().replace('b', "c");
        fs::write(&path, text).unwrap();
        assert_eq!(read_checked(&path), None);
    }
}
