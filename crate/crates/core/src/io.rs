//! JSON complex description.
//!
//! ```json
//! { "vertices": [{"id": "a", "m0": 1.0}, ...],
//!   "edges": [{"u": "a", "v": "b", "m1": 1.0}, ...],
//!   "max_degree": 2,
//!   "weights": {"2": [{"simplex": ["a", "b", "c"], "m": 0.5}]} }
//! ```
//!
//! Cliques of degree >= 2 not listed under `weights` get weight 1; a listed
//! weight of 0 removes the clique. Instead of `weights`, a `weight_rule` of
//! `{"kind": "constant", "value": m}` or `{"kind": "radial", "base": [...], "alpha": a}`
//! may be given.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{build_clique_complex, VertexId, WeightRule, WeightedComplex, WeightedGraph};
use crate::divergence::{LayerDecomposition, LayerOrigin};
use crate::error::{HodgeError, Result};
use crate::generators::{Generated, GeneratorSpec};

/// Vertex ids may be written as strings or integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexKey {
    Name(String),
    Number(i64),
}

impl VertexKey {
    fn label(&self) -> String {
        match self {
            VertexKey::Name(s) => s.clone(),
            VertexKey::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: VertexKey,
    #[serde(default = "one")]
    pub m0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: VertexKey,
    pub v: VertexKey,
    #[serde(default = "one")]
    pub m1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub simplex: Vec<VertexKey>,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightRuleSpec {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    Radial { base: Vec<VertexKey>, alpha: f64 },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDescription {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    pub max_degree: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, Vec<WeightEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_rule: Option<WeightRuleSpec>,
    /// Exhaustion base set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<VertexKey>>,
    /// Layer index per vertex, in vertex order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

/// A parsed description: the complex plus the optional exhaustion data.
#[derive(Clone, Debug)]
pub struct LoadedComplex {
    pub complex: WeightedComplex,
    pub roots: Option<Vec<VertexId>>,
    pub layers: Option<LayerDecomposition>,
    pub generator: Option<GeneratorSpec>,
}

impl LoadedComplex {
    /// Roots from the file, or the first vertex.
    pub fn roots_or_default(&self) -> Vec<VertexId> {
        self.roots.clone().unwrap_or_else(|| if self.complex.num_vertices() > 0 { vec![0] } else { vec![] })
    }

    /// Layers from the file, or graph distance from the roots.
    pub fn layers_or_default(&self) -> Result<LayerDecomposition> {
        match &self.layers {
            Some(l) => Ok(l.clone()),
            None => LayerDecomposition::by_distance(self.complex.graph(), &self.roots_or_default()),
        }
    }
}

fn lookup(graph: &WeightedGraph, key: &VertexKey) -> Result<VertexId> {
    let label = key.label();
    graph.vertex(&label).ok_or(HodgeError::UnknownVertex(label))
}

fn sorted_ids(graph: &WeightedGraph, keys: &[VertexKey]) -> Result<Vec<VertexId>> {
    let mut ids = keys.iter().map(|k| lookup(graph, k)).collect::<Result<Vec<_>>>()?;
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(HodgeError::DegenerateSimplex(w[0]));
    }
    Ok(ids)
}

impl ComplexDescription {
    pub fn build(&self) -> Result<LoadedComplex> {
        let mut graph = WeightedGraph::new();
        for v in &self.vertices {
            graph.add_vertex(v.id.label(), v.m0)?;
        }
        for e in &self.edges {
            let (u, v) = (lookup(&graph, &e.u)?, lookup(&graph, &e.v)?);
            graph.add_edge(u, v, e.m1)?;
        }
        let rule = match (&self.weight_rule, self.weights.is_empty()) {
            (Some(_), false) => return Err(HodgeError::param("give either `weights` or `weight_rule`, not both")),
            (Some(WeightRuleSpec::Constant { value }), _) => WeightRule::Constant(*value),
            (Some(WeightRuleSpec::Radial { base, alpha }), _) => {
                WeightRule::Radial { base: sorted_ids(&graph, base)?, alpha: *alpha }
            }
            (None, true) => WeightRule::default(),
            (None, false) => {
                let mut table = BTreeMap::new();
                for (key, entries) in &self.weights {
                    let degree: usize = key
                        .parse()
                        .map_err(|_| HodgeError::param(format!("weight degree `{key}` is not an integer")))?;
                    if degree < 2 || degree > self.max_degree {
                        return Err(HodgeError::DegreeOutOfRange { what: "weights", degree, max: self.max_degree });
                    }
                    for entry in entries {
                        let ids = sorted_ids(&graph, &entry.simplex)?;
                        if ids.len() != degree + 1 {
                            return Err(HodgeError::NotASimplex(ids));
                        }
                        table.insert(ids, entry.m);
                    }
                }
                WeightRule::Explicit { default: 1.0, table }
            }
        };
        let roots = self.roots.as_ref().map(|r| sorted_ids(&graph, r)).transpose()?;
        let layers = match &self.layers {
            Some(l) if l.len() != graph.num_vertices() => {
                return Err(HodgeError::DimensionMismatch { expected: graph.num_vertices(), got: l.len() })
            }
            Some(l) => Some(LayerDecomposition::from_assignment(l.clone(), LayerOrigin::Explicit)),
            None => None,
        };
        let complex = build_clique_complex(graph, self.max_degree, &rule)?;
        Ok(LoadedComplex { complex, roots, layers, generator: self.generator.clone() })
    }

    /// Describes `complex` exactly: non-unit weights are listed, and cliques the
    /// complex omits are listed with weight 0 (only those whose faces are all present).
    pub fn describe(complex: &WeightedComplex) -> Result<Self> {
        let graph = complex.graph();
        let key = |v: VertexId| VertexKey::Name(graph.label(v).to_string());
        let vertices = (0..graph.num_vertices()).map(|v| VertexEntry { id: key(v), m0: graph.m0(v) }).collect();
        let edges = graph.edges().map(|(u, v, m1)| EdgeEntry { u: key(u), v: key(v), m1 }).collect();
        let n = complex.max_degree();
        let cliques = build_clique_complex(graph.clone(), n, &WeightRule::default())?;
        let mut weights = BTreeMap::new();
        for degree in 2..=n {
            let mut entries = Vec::new();
            for (s, &m) in complex.simplices(degree).zip(complex.weights(degree)) {
                if m != 1.0 {
                    entries.push(WeightEntry { simplex: s.iter().map(|&v| key(v)).collect(), m });
                }
            }
            for s in cliques.simplices(degree) {
                if complex.find(s).is_none() {
                    let faces_present = (0..s.len()).all(|j| {
                        let face: Vec<VertexId> =
                            s.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
                        complex.find(&face).is_some()
                    });
                    if faces_present {
                        entries.push(WeightEntry { simplex: s.iter().map(|&v| key(v)).collect(), m: 0.0 });
                    }
                }
            }
            if !entries.is_empty() {
                weights.insert(degree.to_string(), entries);
            }
        }
        Ok(ComplexDescription {
            vertices,
            edges,
            max_degree: n,
            weights,
            weight_rule: None,
            roots: None,
            layers: None,
            generator: None,
        })
    }

    pub fn describe_generated(generated: &Generated) -> Result<Self> {
        let mut d = Self::describe(&generated.complex)?;
        let graph = generated.complex.graph();
        d.roots = Some(generated.roots.iter().map(|&v| VertexKey::Name(graph.label(v).to_string())).collect());
        d.layers = Some(generated.layers.assignment().to_vec());
        d.generator = Some(generated.spec.clone());
        Ok(d)
    }
}

pub fn parse_complex(text: &str) -> Result<LoadedComplex> {
    serde_json::from_str::<ComplexDescription>(text)?.build()
}

pub fn emit_complex(complex: &WeightedComplex) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ComplexDescription::describe(complex)?)?)
}

pub fn read_complex(path: impl AsRef<Path>) -> Result<LoadedComplex> {
    parse_complex(&std::fs::read_to_string(path)?)
}

pub fn write_complex(path: impl AsRef<Path>, description: &ComplexDescription) -> Result<()> {
    let mut text = serde_json::to_string_pretty(description)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
