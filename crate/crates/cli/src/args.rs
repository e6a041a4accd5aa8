use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "hodgelab", version, about = "Weighted clique complexes, Hodge operators and self-adjointness diagnostics")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Budget for identities that hold exactly (d∘d, block structure).
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_exact: f64,
    /// Budget for accumulated inner products (adjointness).
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_accum: f64,
    /// Eigenvalues below this fraction of the largest count as kernel.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub kernel_thresh: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Build a complex from a generator family and write its description.
    Generate(GeneratorArgs),
    /// Load a complex, assemble operators and check their identities.
    Assemble(AssembleArgs),
    /// Cut-off energy profiles (global, level or region mode).
    Chi(ChiArgs),
    /// Layer growth, partial sums and divergence-driven cut-offs.
    Divergence(DivergenceArgs),
    /// Lowest Laplacian eigenvalues per degree.
    Spectrum(SpectrumArgs),
    /// Exact / harmonic / coexact splitting per degree.
    Hodge(HodgeArgs),
    /// Spectra of a tree family over a range of truncation depths.
    Sweep(SweepArgs),
}

/// Generator parameters; any flag given overrides the same key in `--params`.
#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct GeneratorArgs {
    /// lattice | perturbed_lattice | alternating_triangulation |
    /// truncated_binary_tree | radial_tree | example52
    #[arg(long)]
    pub kind: Option<String>,
    /// Generator spec as a JSON object.
    #[arg(long)]
    pub params: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<i64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub triangle_depth: Option<usize>,
    /// Offspring law, e.g. `2`, `n^2`, `3*n^1.5`.
    #[arg(long)]
    pub off: Option<String>,
    #[arg(long, value_enum)]
    pub tet_parity: Option<ParityArg>,
    #[arg(long, value_enum)]
    pub adjacency: Option<AdjacencyArg>,
    /// Perturbed lattice: the region is the cube `{-r..r}^d`.
    #[arg(long)]
    pub region_radius: Option<i64>,
    #[arg(long, value_enum)]
    pub shape: Option<ShapeArg>,
    #[arg(long)]
    pub spine_width: Option<usize>,
    /// Radial reweighting exponent applied after generation.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityArg {
    Even,
    Odd,
    All,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjacencyArg {
    NearestNeighbor,
    Freudenthal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeArg {
    Full,
    Spine,
}

/// A complex from a description file or from inline generator flags.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SourceArgs {
    /// Complex description JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorArg {
    D,
    Delta,
    GaussBonnet,
    Laplacian,
}

#[derive(Args, Debug, Serialize)]
pub struct AssembleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum)]
    pub operator: Option<OperatorArg>,
    /// Source degree of the operator (ignored for gauss-bonnet).
    #[arg(long, default_value_t = 0)]
    pub degree: usize,
    /// Write the assembled matrix in 1-based coordinate format.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    /// Re-emit the canonical complex description.
    #[arg(long)]
    pub emit_complex: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiModeArg {
    Global,
    Level,
    Region,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExhaustionArg {
    /// Graph-distance balls around the roots.
    Ball,
    /// The complex's layer decomposition.
    Layers,
}

#[derive(Args, Debug, Serialize)]
pub struct ChiArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = ChiModeArg::Global)]
    pub mode: ChiModeArg,
    #[arg(long)]
    pub level: Option<usize>,
    /// JSON array of vertex ids forming the region.
    #[arg(long)]
    pub region_file: Option<PathBuf>,
    #[arg(long, default_value = "1..10")]
    pub k_range: IndexList,
    #[arg(long, default_value_t = 1.0)]
    pub ramp_width: f64,
    #[arg(long, value_enum, default_value_t = ExhaustionArg::Ball)]
    pub exhaustion: ExhaustionArg,
}

#[derive(Args, Debug, Serialize)]
pub struct DivergenceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Growth given by a formula instead of measured on a complex.
    #[arg(long)]
    pub xi: Option<String>,
    /// Layers entering the partial sums; defaults to the measured range.
    #[arg(long)]
    pub k_range: Option<IndexList>,
    /// Finite horizon for the cut-off tail sums.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Plateau indices N of the cut-offs.
    #[arg(long, default_value = "2,4,8")]
    pub depths: IndexList,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// All degrees when absent.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 6)]
    pub how_many: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Also report σ_min(L ± i).
    #[arg(long)]
    pub probe: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct HodgeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Directory for the bases in coordinate format.
    #[arg(long)]
    pub basis_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value = "4..10")]
    pub depths: IndexList,
    #[arg(long, default_value_t = 4)]
    pub how_many: usize,
    /// Weight factor on simplices touching the last layer.
    #[arg(long, default_value_t = 1e-3)]
    pub boundary_factor: f64,
}

/// `a..b` (inclusive), `a..=b`, `a,b,c` or a single index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad index `{t}` in `{s}`"));
        let list = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        if list.is_empty() {
            return Err("empty index list".into());
        }
        Ok(IndexList(list))
    }
}

impl fmt::Display for IndexList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for IndexList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}
