//! Pair file format: `{"dim": n, "f": [[re, im], ...], "g": [[re, im], ...]}`,
//! entries row-major, `n²` per matrix.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, C64};

use super::{ProjectionError, ProjectionPair, Provenance, PROJ_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub dim: usize,
    pub f: Vec<[f64; 2]>,
    pub g: Vec<[f64; 2]>,
}

impl PairFile {
    pub fn from_pair(pair: &ProjectionPair) -> Self {
        let flat = |m: &ComplexMatrix| m.as_slice().iter().map(|z| [z.re, z.im]).collect();
        PairFile {
            dim: pair.dim(),
            f: flat(&pair.f),
            g: flat(&pair.g),
        }
    }

    fn matrix(&self, member: &str, entries: &[[f64; 2]]) -> Result<ComplexMatrix, ProjectionError> {
        let n = self.dim;
        if entries.len() != n * n {
            return Err(ProjectionError::Format(format!(
                "{member} has {} entries, expected {}",
                entries.len(),
                n * n
            )));
        }
        if let Some(k) = entries.iter().position(|e| !(e[0].is_finite() && e[1].is_finite())) {
            return Err(ProjectionError::Format(format!(
                "{member} entry {k} is not finite"
            )));
        }
        Ok(ComplexMatrix::from_vec(
            n,
            n,
            entries.iter().map(|e| C64::new(e[0], e[1])).collect(),
        ))
    }

    /// Builds the pair and validates both members at `tol`.
    pub fn into_pair(self, provenance: Provenance, tol: f64) -> Result<ProjectionPair, ProjectionError> {
        if self.dim == 0 {
            return Err(ProjectionError::Format("dim must be positive".into()));
        }
        let f = self.matrix("f", &self.f)?;
        let g = self.matrix("g", &self.g)?;
        ProjectionPair::with_tol(f, g, provenance, tol)
    }
}

pub fn pair_to_json_string(pair: &ProjectionPair) -> String {
    serde_json::to_string_pretty(&PairFile::from_pair(pair)).expect("pair file serializes")
}

pub fn pair_from_json_str(s: &str, provenance: Provenance) -> Result<ProjectionPair, ProjectionError> {
    let file: PairFile = serde_json::from_str(s).map_err(|e| ProjectionError::Format(e.to_string()))?;
    file.into_pair(provenance, PROJ_TOL)
}

pub fn read_pair_json(path: &Path) -> Result<ProjectionPair, ProjectionError> {
    let text = fs::read_to_string(path)?;
    pair_from_json_str(
        &text,
        Provenance::File {
            path: path.display().to_string(),
        },
    )
}

pub fn write_pair_json(pair: &ProjectionPair, path: &Path) -> Result<(), ProjectionError> {
    fs::write(path, pair_to_json_string(pair) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{paper_2x2_pair, random_pair};

    #[test]
    fn roundtrip_is_bit_exact() {
        let pair = random_pair(5, 3).unwrap();
        let text = pair_to_json_string(&pair);
        let back = pair_from_json_str(&text, Provenance::Paper2x2).unwrap();
        assert_eq!(back.f, pair.f);
        assert_eq!(back.g, pair.g);
    }

    #[test]
    fn fixed_pair_file_layout() {
        let text = pair_to_json_string(&paper_2x2_pair());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["g"][1][0], 0.5);
        assert_eq!(v["f"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn rejects_bad_files() {
        let short = r#"{"dim": 2, "f": [[1,0]], "g": [[1,0],[0,0],[0,0],[0,0]]}"#;
        assert!(matches!(
            pair_from_json_str(short, Provenance::Paper2x2),
            Err(ProjectionError::Format(_))
        ));
        let huge = r#"{"dim": 1, "f": [[1e999,0]], "g": [[1,0]]}"#;
        assert!(pair_from_json_str(huge, Provenance::Paper2x2).is_err());
        let not_proj = r#"{"dim": 2, "f": [[1,0],[1,0],[0,0],[0,0]], "g": [[1,0],[0,0],[0,0],[0,0]]}"#;
        assert!(matches!(
            pair_from_json_str(not_proj, Provenance::Paper2x2),
            Err(ProjectionError::NotAProjection { member: "f", .. })
        ));
        assert!(pair_from_json_str("{}", Provenance::Paper2x2).is_err());
    }
}
