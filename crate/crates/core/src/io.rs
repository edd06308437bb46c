//! JSON graph files.
//!
//! ```json
//! {"schema": "curvegraph/1",
//!  "vertices": [{"id": "x", "mu": 1.0}, ...],
//!  "edges": [{"u": "x", "v": "y", "w": 1.0}, ...],
//!  "measure": "explicit|unit|degree|constant",
//!  "constant": 2.0}
//! ```
//!
//! When `measure` is not `explicit` it overrides the per-vertex `mu` values.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MeasureMode, WeightedGraph};

pub const SCHEMA: &str = "curvegraph/1";

fn default_schema() -> String {
    SCHEMA.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub measure: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// Free-form metadata written by tools (for example the predicted
    /// curvature of a product); ignored when building the graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: String,
    pub v: String,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Explicit,
    Unit,
    Degree,
    Constant,
}

impl GraphFile {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let (measure, constant) = match g.measure_mode() {
            MeasureMode::Unit => (MeasureKind::Unit, None),
            MeasureMode::Degree => (MeasureKind::Degree, None),
            MeasureMode::Constant(c) => (MeasureKind::Constant, Some(*c)),
            MeasureMode::Explicit(_) => (MeasureKind::Explicit, None),
        };
        Self {
            schema: SCHEMA.to_string(),
            vertices: (0..g.n())
                .map(|x| VertexRecord {
                    id: g.label(x).to_string(),
                    mu: Some(g.mu(x)),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    u: g.label(e.u).to_string(),
                    v: g.label(e.v).to_string(),
                    w: e.w,
                })
                .collect(),
            measure,
            constant,
            annotation: None,
        }
    }

    pub fn to_graph(&self) -> Result<WeightedGraph> {
        if self.schema != SCHEMA {
            return Err(Error::Format(format!(
                "unsupported schema `{}`, expected `{SCHEMA}`",
                self.schema
            )));
        }
        let labels: Vec<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        let index = |id: &str| {
            labels
                .iter()
                .position(|l| l == id)
                .ok_or_else(|| Error::UnknownVertexId(id.to_string()))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((index(&e.u)?, index(&e.v)?, e.w)))
            .collect::<Result<Vec<_>>>()?;
        let mode = match self.measure {
            MeasureKind::Unit => MeasureMode::Unit,
            MeasureKind::Degree => MeasureMode::Degree,
            MeasureKind::Constant => MeasureMode::Constant(self.constant.ok_or_else(|| {
                Error::Format("measure `constant` requires a `constant` field".into())
            })?),
            MeasureKind::Explicit => MeasureMode::Explicit(
                self.vertices
                    .iter()
                    .map(|v| {
                        v.mu.ok_or_else(|| {
                            Error::Format(format!("vertex `{}` has no `mu` value", v.id))
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        WeightedGraph::with_labels(labels, &edges, mode)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph file serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    GraphFile::parse(&fs::read_to_string(path)?)?.to_graph()
}

pub fn write_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, GraphFile::from_graph(g).to_json())?;
    Ok(())
}
