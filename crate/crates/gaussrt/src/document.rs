//! JSON covariance-matrix documents.
//!
//! ```json
//! {
//!   "modes": 2,
//!   "ordering": "xxpp",
//!   "partition": ["A", "B"],
//!   "V": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
//!   "s": [0, 0, 0, 0]
//! }
//! ```
//!
//! `V` is row-major, either as nested rows or as one flat array of `4N^2`
//! numbers. `s` is optional and defaults to zeros. Documents are written at
//! full precision so that pure states survive a round trip.

use std::fs;
use std::path::Path;

use gaussrt_core::states::GaussianState;
use gaussrt_core::{CovMatrix, Matrix, ModePartition};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ORDERING: &str = "xxpp";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] gaussrt_core::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

/// Layout documented in `docs/cm_document.schema.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmDocument {
    pub modes: usize,
    pub ordering: String,
    pub partition: Vec<String>,
    #[serde(rename = "V")]
    pub v: MatrixData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
}

impl CmDocument {
    pub fn from_state(state: &GaussianState) -> Self {
        Self::from_parts(state.cov(), Some(&state.s), &state.partition)
    }

    pub fn from_parts(v: &Matrix, s: Option<&[f64]>, partition: &ModePartition) -> Self {
        Self {
            modes: partition.n_modes(),
            ordering: ORDERING.to_string(),
            partition: partition.labels().to_vec(),
            v: MatrixData::Rows(v.to_rows()),
            s: s.map(<[f64]>::to_vec),
        }
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Structural checks only; no QCM test.
    pub fn matrix(&self) -> Result<Matrix, DocumentError> {
        if self.ordering != ORDERING {
            return Err(DocumentError::Invalid(format!(
                "ordering must be \"{ORDERING}\", found \"{}\"",
                self.ordering
            )));
        }
        if self.modes == 0 {
            return Err(DocumentError::Invalid("modes must be positive".into()));
        }
        let d = 2 * self.modes;
        let data: Vec<f64> = match &self.v {
            MatrixData::Rows(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(DocumentError::Invalid(format!("V must be {d} x {d}")));
                }
                rows.concat()
            }
            MatrixData::Flat(flat) => {
                if flat.len() != d * d {
                    return Err(DocumentError::Invalid(format!(
                        "flat V must have {} entries, found {}",
                        d * d,
                        flat.len()
                    )));
                }
                flat.clone()
            }
        };
        if data.iter().any(|x| !x.is_finite()) {
            return Err(DocumentError::Invalid("V has non-finite entries".into()));
        }
        Ok(Matrix::from_vec(d, d, data))
    }

    pub fn partition(&self) -> Result<ModePartition, DocumentError> {
        if self.partition.len() != self.modes {
            return Err(DocumentError::Invalid(format!(
                "partition has {} labels for {} modes",
                self.partition.len(),
                self.modes
            )));
        }
        Ok(ModePartition::new(self.partition.iter().cloned())?)
    }

    /// Parses and validates `V >= i Omega` at `tol`. `partition` overrides
    /// the document's labels.
    pub fn to_state(
        &self,
        tol: f64,
        partition: Option<ModePartition>,
    ) -> Result<GaussianState, DocumentError> {
        let v = CovMatrix::with_tol(self.matrix()?, tol)?;
        let partition = match partition {
            Some(p) if p.n_modes() != self.modes => {
                return Err(DocumentError::Invalid(format!(
                    "partition covers {} modes, document has {}",
                    p.n_modes(),
                    self.modes
                )))
            }
            Some(p) => p,
            None => self.partition()?,
        };
        let s = self.s.clone().unwrap_or_else(|| vec![0.0; 2 * self.modes]);
        Ok(GaussianState::new(v, s, partition)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaussrt_core::states::{make_state, StateKind};
    use gaussrt_core::DEFAULT_TOL;

    #[test]
    fn round_trip_keeps_pure_states_valid() {
        let st = make_state(&StateKind::Tmsv { r: 0.5 }, None).unwrap();
        let doc = CmDocument::from_state(&st);
        let back = CmDocument::parse(&doc.to_json()).unwrap();
        let st2 = back.to_state(DEFAULT_TOL, None).unwrap();
        assert_eq!(st2.cov(), st.cov());
        assert_eq!(st2.partition.labels(), ["A", "B"]);
    }

    #[test]
    fn flat_matrix_and_default_mean() {
        let doc = CmDocument::parse(
            r#"{"modes": 1, "ordering": "xxpp", "partition": ["A"], "V": [2, 0, 0, 2]}"#,
        )
        .unwrap();
        let st = doc.to_state(DEFAULT_TOL, None).unwrap();
        assert_eq!(st.s, vec![0.0, 0.0]);
        assert_eq!(st.cov()[(0, 0)], 2.0);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_order =
            r#"{"modes": 1, "ordering": "xpxp", "partition": ["A"], "V": [[1,0],[0,1]]}"#;
        assert!(CmDocument::parse(bad_order)
            .unwrap()
            .to_state(DEFAULT_TOL, None)
            .is_err());
        let unphysical =
            r#"{"modes": 1, "ordering": "xxpp", "partition": ["A"], "V": [[0.5,0],[0,0.5]]}"#;
        assert!(matches!(
            CmDocument::parse(unphysical)
                .unwrap()
                .to_state(DEFAULT_TOL, None),
            Err(DocumentError::Core(gaussrt_core::Error::NotQcm { .. }))
        ));
        let labels = r#"{"modes": 2, "ordering": "xxpp", "partition": ["A"], "V": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#;
        assert!(CmDocument::parse(labels)
            .unwrap()
            .to_state(DEFAULT_TOL, None)
            .is_err());
        assert!(CmDocument::parse("{").is_err());
        let extra = r#"{"modes": 1, "ordering": "xxpp", "partition": ["A"], "V": [1,0,0,1], "mean": [0,0]}"#;
        assert!(CmDocument::parse(extra).is_err());
    }

    #[test]
    fn shipped_schema_lists_every_field() {
        let schema: serde_json::Value =
            serde_json::from_str(include_str!("../../../docs/cm_document.schema.json")).unwrap();
        let props = schema["properties"].as_object().unwrap();
        let doc = serde_json::to_value(CmDocument::from_state(
            &make_state(&StateKind::Coherent { u: vec![1.0, 2.0] }, None).unwrap(),
        ))
        .unwrap();
        for key in doc.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "{key} missing from the schema");
        }
        for key in schema["required"].as_array().unwrap() {
            assert!(doc.get(key.as_str().unwrap()).is_some());
        }
    }
}
