//! Per-case DIMACS export for running cases with an external solver.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{write_clause_lines, Formula};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportEntry {
    pub case_index: usize,
    pub file: String,
    pub sha256: String,
    pub clauses: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportManifest {
    pub keller: Option<(usize, usize)>,
    pub num_vars: u32,
    pub base_clauses: usize,
    pub cases: Vec<ExportEntry>,
}

impl ExportManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

pub fn case_file_name(case_index: usize) -> String {
    format!("case_{case_index:06}.cnf")
}

/// Write `formula ∧ cube` for each case as `case_NNNNNN.cnf` plus
/// `manifest.json`. Returns the manifest.
pub fn export_cases(
    formula: &Formula,
    cases: &[(usize, Vec<i32>)],
    dir: &Path,
) -> Result<ExportManifest> {
    if cases.is_empty() {
        return Err(Error::Input("no cases to export".into()));
    }
    fs::create_dir_all(dir)?;
    let mut body = Vec::new();
    write_clause_lines(&mut body, formula.clauses())?;
    let mut entries = Vec::with_capacity(cases.len());
    for (index, cube) in cases {
        let units: Vec<Vec<i32>> = cube.iter().map(|&l| vec![l]).collect();
        let mut num_vars = formula.num_vars();
        for &l in cube {
            num_vars = num_vars.max(l.unsigned_abs());
        }
        let total = formula.clauses().len() + units.len();
        let mut bytes = Vec::with_capacity(body.len() + 16 * units.len() + 64);
        if let Some((n, s)) = formula.keller_instance() {
            bytes.extend_from_slice(format!("c keller {n} {s}\n").as_bytes());
        }
        bytes.extend_from_slice(format!("c case {index}\np cnf {num_vars} {total}\n").as_bytes());
        bytes.extend_from_slice(&body);
        write_clause_lines(&mut bytes, &units)?;
        let name = case_file_name(*index);
        let path: PathBuf = dir.join(&name);
        fs::write(&path, &bytes)?;
        entries.push(ExportEntry {
            case_index: *index,
            file: name,
            sha256: hex::encode(Sha256::digest(&bytes)),
            clauses: total,
        });
    }
    let manifest = ExportManifest {
        keller: formula.keller_instance(),
        num_vars: formula.num_vars(),
        base_clauses: formula.clauses().len(),
        cases: entries,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satkit::{parse_dimacs, ParseOptions};

    #[test]
    fn case_file_is_formula_plus_units() {
        let dir = tempfile::tempdir().unwrap();
        let f = Formula::new(3, vec![vec![1, 2], vec![-3]]);
        let cases = vec![(0, vec![1, -2]), (7, vec![3])];
        let m = export_cases(&f, &cases, dir.path()).unwrap();
        assert_eq!(m.cases.len(), 2);
        let g = parse_dimacs(&fs::read(dir.path().join(&m.cases[0].file)).unwrap(), ParseOptions::strict())
            .unwrap();
        assert_eq!(g.clauses(), f.with_units(&[1, -2]).clauses());

        let again = export_cases(&f, &cases, dir.path()).unwrap();
        assert_eq!(again, m);
        assert_eq!(ExportManifest::read(&dir.path().join("manifest.json")).unwrap(), m);
        assert!(export_cases(&f, &[], dir.path()).is_err());
    }
}
