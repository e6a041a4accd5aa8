use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};

use hodgelab_core::divergence::LayerDecomposition;
use hodgelab_core::generators::{radial_weighting, BoxRegion, Generated, GeneratorSpec};
use hodgelab_core::io::{read_complex, LoadedComplex};
use hodgelab_core::{VertexId, WeightedComplex};

use crate::args::{GeneratorArgs, ShapeArg, SourceArgs};

impl GeneratorArgs {
    pub fn is_empty(&self) -> bool {
        self.kind.is_none() && self.params.is_none()
    }

    /// `--params` merged with the individual flags, as a JSON object.
    fn spec_value(&self) -> Result<Map<String, Value>> {
        let mut obj = match &self.params {
            Some(text) => match serde_json::from_str(text).context("--params is not valid JSON")? {
                Value::Object(m) => m,
                _ => bail!("--params must be a JSON object"),
            },
            None => Map::new(),
        };
        let mut set = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                obj.insert(key.to_string(), v);
            }
        };
        set("kind", self.kind.as_ref().map(|k| json!(k)));
        set("d", self.d.map(|v| json!(v)));
        set("n", self.n.map(|v| json!(v)));
        set("radius", self.radius.map(|v| json!(v)));
        set("depth", self.depth.map(|v| json!(v)));
        set("triangle_depth", self.triangle_depth.map(|v| json!(v)));
        set("off", self.off.as_ref().map(|v| json!(v)));
        set("tet_parity", self.tet_parity.map(|v| serde_json::to_value(v).unwrap()));
        set("adjacency", self.adjacency.map(|v| serde_json::to_value(v).unwrap()));
        let shape = match (self.shape, self.spine_width) {
            (Some(ShapeArg::Full), _) => Some(json!({"kind": "full"})),
            (Some(ShapeArg::Spine), w) | (None, w @ Some(_)) => Some(json!({"kind": "spine", "width": w.unwrap_or(1)})),
            (None, None) => None,
        };
        set("shape", shape);
        if let Some(r) = self.region_radius {
            let d = obj
                .get("d")
                .and_then(Value::as_u64)
                .ok_or_else(|| anyhow!("--region-radius needs the lattice dimension --d"))?;
            obj.insert("region".into(), serde_json::to_value(BoxRegion::cube(d as usize, r))?);
        }
        if !obj.contains_key("kind") {
            bail!("no generator kind given (use --kind or a \"kind\" key in --params)");
        }
        Ok(obj)
    }

    pub fn spec(&self) -> Result<GeneratorSpec> {
        self.spec_with(|_| {})
    }

    /// Spec after editing the merged JSON object (used to vary the depth).
    pub fn spec_with(&self, edit: impl FnOnce(&mut Map<String, Value>)) -> Result<GeneratorSpec> {
        let mut obj = self.spec_value()?;
        edit(&mut obj);
        serde_json::from_value(Value::Object(obj)).context("invalid generator parameters")
    }

    pub fn generate(&self) -> Result<Generated> {
        let generated = self.spec()?.generate()?;
        Ok(match self.alpha {
            Some(alpha) => generated.with_radial_weighting(alpha)?,
            None => generated,
        })
    }
}

/// The complex every analysis command works on, with its exhaustion data.
pub struct Source {
    pub complex: WeightedComplex,
    pub roots: Vec<VertexId>,
    pub layers: LayerDecomposition,
    pub generator: Option<GeneratorSpec>,
}

impl Source {
    pub fn depth(&self) -> Option<usize> {
        match self.generator.as_ref()? {
            GeneratorSpec::TruncatedBinaryTree { triangle_depth, depth } => Some(depth.unwrap_or(triangle_depth + 1)),
            GeneratorSpec::RadialTree { depth, .. } | GeneratorSpec::Example52 { depth, .. } => Some(*depth),
            _ => None,
        }
    }
}

impl SourceArgs {
    pub fn is_given(&self) -> bool {
        self.input.is_some() || !self.generator.is_empty()
    }

    pub fn load(&self) -> Result<Source> {
        match (&self.input, self.generator.is_empty()) {
            (Some(_), false) => bail!("give either --input or generator flags, not both"),
            (None, true) => bail!("no complex given (use --input or --kind)"),
            (Some(path), true) => {
                let loaded: LoadedComplex =
                    read_complex(path).with_context(|| format!("reading {}", path.display()))?;
                let roots = loaded.roots_or_default();
                let layers = loaded.layers_or_default()?;
                let complex = match self.generator.alpha {
                    Some(alpha) => radial_weighting(&loaded.complex, &roots, alpha)?,
                    None => loaded.complex,
                };
                Ok(Source { complex, roots, layers, generator: loaded.generator })
            }
            (None, false) => {
                let g = self.generator.generate()?;
                Ok(Source { complex: g.complex, roots: g.roots, layers: g.layers, generator: Some(g.spec) })
            }
        }
    }
}
