//! JSON channel specification:
//!
//! ```json
//! {"d": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}
//! ```
//!
//! `kraus[i][r][c]` is entry `(r, c)` of the i-th Kraus operator, written as
//! a `[re, im]` pair.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::quantum::KrausChannel;

/// Completeness slack accepted when loading a spec from disk.
pub const SPEC_COMPLETENESS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub d: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::SpecParse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn from_channel(ch: &KrausChannel) -> Self {
        let d = ch.dim();
        let kraus = ch
            .operators()
            .iter()
            .map(|e| {
                (0..d)
                    .map(|r| (0..d).map(|c| [e[(r, c)].re, e[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self { d, kraus }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Shape checks, then completeness within [`SPEC_COMPLETENESS_TOL`].
    pub fn to_channel(&self) -> Result<KrausChannel> {
        let shape_err = |path: String, message: String| Error::SpecParse { path, message };
        if self.d == 0 {
            return Err(shape_err("d".into(), "dimension must be positive".into()));
        }
        if self.kraus.is_empty() {
            return Err(shape_err(
                "kraus".into(),
                "at least one operator is required".into(),
            ));
        }
        let mut ops = Vec::with_capacity(self.kraus.len());
        for (i, op) in self.kraus.iter().enumerate() {
            if op.len() != self.d {
                return Err(shape_err(
                    format!("kraus[{i}]"),
                    format!("expected {} rows, found {}", self.d, op.len()),
                ));
            }
            let mut rows = Vec::with_capacity(self.d);
            for (r, row) in op.iter().enumerate() {
                if row.len() != self.d {
                    return Err(shape_err(
                        format!("kraus[{i}][{r}]"),
                        format!("expected {} entries, found {}", self.d, row.len()),
                    ));
                }
                if let Some(c) = row
                    .iter()
                    .position(|z| !(z[0].is_finite() && z[1].is_finite()))
                {
                    return Err(shape_err(
                        format!("kraus[{i}][{r}][{c}]"),
                        "non-finite entry".into(),
                    ));
                }
                rows.push(row.iter().map(|z| C64::new(z[0], z[1])).collect());
            }
            ops.push(ComplexMatrix::from_rows(rows)?);
        }
        KrausChannel::with_tolerance(ops, SPEC_COMPLETENESS_TOL)
    }
}

/// Reads and validates a channel spec file.
pub fn load_channel(path: impl AsRef<Path>) -> Result<KrausChannel> {
    let text = std::fs::read_to_string(path)?;
    ChannelSpec::parse(&text)?.to_channel()
}
