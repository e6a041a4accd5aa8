//! Layer decompositions, the growth function `ξ(k, k+1)` and the divergence
//! criterion `Σ 1/√ξ = ∞`, including the layer-constant cut-offs it produces.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chi::leibniz_remainder;
use crate::complex::{VertexId, WeightedComplex, WeightedGraph};
use crate::error::{HodgeError, Result};
use crate::operators::Cochain;

/// `c · n^p`, written `"n^2"`, `"3*n^4"`, `"n"` or `"2"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLaw {
    pub coef: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn new(coef: f64, exponent: f64) -> Self {
        PowerLaw { coef, exponent }
    }

    pub fn constant(c: f64) -> Self {
        PowerLaw { coef: c, exponent: 0.0 }
    }

    pub fn eval(&self, n: f64) -> f64 {
        if self.exponent == 0.0 {
            self.coef
        } else {
            self.coef * n.powf(self.exponent)
        }
    }
}

impl fmt::Display for PowerLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coef, self.exponent) {
            (c, e) if e == 0.0 => write!(f, "{c}"),
            (c, e) if c == 1.0 && e == 1.0 => write!(f, "n"),
            (c, e) if c == 1.0 => write!(f, "n^{e}"),
            (c, e) if e == 1.0 => write!(f, "{c}*n"),
            (c, e) => write!(f, "{c}*n^{e}"),
        }
    }
}

impl FromStr for PowerLaw {
    type Err = HodgeError;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || HodgeError::param(format!("cannot parse `{s}` as c*n^p"));
        let number = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let (coef, rest) = match compact.split_once('*') {
            Some((c, rest)) => (number(c)?, rest.to_string()),
            None if compact.contains('n') => (1.0, compact.clone()),
            None => return Ok(PowerLaw::constant(number(&compact)?)),
        };
        let exponent = match rest.as_str() {
            "n" => 1.0,
            r => number(r.strip_prefix("n^").ok_or_else(bad)?)?,
        };
        if !coef.is_finite() || !exponent.is_finite() {
            return Err(bad());
        }
        Ok(PowerLaw { coef, exponent })
    }
}

impl Serialize for PowerLaw {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PowerLaw {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Number(c) => Ok(PowerLaw::constant(c)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerOrigin {
    Depth,
    Distance { roots: Vec<VertexId> },
    Explicit,
}

/// Partition of the vertices into layers `S_0, S_1, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDecomposition {
    layer: Vec<usize>,
    origin: LayerOrigin,
}

impl LayerDecomposition {
    pub fn from_assignment(layer: Vec<usize>, origin: LayerOrigin) -> Self {
        LayerDecomposition { layer, origin }
    }

    /// Layers by graph distance from `roots`; every vertex must be reachable.
    pub fn by_distance(graph: &WeightedGraph, roots: &[VertexId]) -> Result<Self> {
        if roots.is_empty() {
            return Err(HodgeError::param("layer decomposition needs at least one root"));
        }
        let dist = graph.distances_from(roots);
        let layer = dist
            .iter()
            .enumerate()
            .map(|(v, d)| d.ok_or_else(|| HodgeError::param(format!("vertex `{}` is unreachable", graph.label(v)))))
            .collect::<Result<Vec<_>>>()?;
        Ok(LayerDecomposition { layer, origin: LayerOrigin::Distance { roots: roots.to_vec() } })
    }

    pub fn origin(&self) -> &LayerOrigin {
        &self.origin
    }

    pub fn assignment(&self) -> &[usize] {
        &self.layer
    }

    pub fn layer_of(&self, v: VertexId) -> usize {
        self.layer[v]
    }

    pub fn num_layers(&self) -> usize {
        self.layer.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self, k: usize) -> Vec<VertexId> {
        (0..self.layer.len()).filter(|&v| self.layer[v] == k).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_layers()];
        for &l in &self.layer {
            sizes[l] += 1;
        }
        sizes
    }

    /// Levels for [`crate::chi::Exhaustion::from_levels`].
    pub fn levels(&self) -> Vec<Option<usize>> {
        self.layer.iter().map(|&l| Some(l)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecompositionCheck {
    Ok,
    /// First edge (in edge order) joining layers more than one apart.
    Violation { u: String, v: String, layer_u: usize, layer_v: usize, count: usize },
}

/// Partition and unit-jump check. Violations are data, not errors.
pub fn validate_decomposition(complex: &WeightedComplex, layers: &LayerDecomposition) -> Result<DecompositionCheck> {
    if layers.layer.len() != complex.num_vertices() {
        return Err(HodgeError::DimensionMismatch { expected: complex.num_vertices(), got: layers.layer.len() });
    }
    let graph = complex.graph();
    let mut first = None;
    let mut count = 0;
    for (u, v, _) in graph.edges() {
        let (lu, lv) = (layers.layer[u], layers.layer[v]);
        if lu.abs_diff(lv) > 1 {
            count += 1;
            first.get_or_insert((u, v, lu, lv));
        }
    }
    Ok(match first {
        None => DecompositionCheck::Ok,
        Some((u, v, layer_u, layer_v)) => DecompositionCheck::Violation {
            u: graph.label(u).to_string(),
            v: graph.label(v).to_string(),
            layer_u,
            layer_v,
            count,
        },
    })
}

/// `ξ(k, k+1)` and its per-degree sups. `breakdown[d]` is the largest number of
/// forward cofaces `σ ∪ {x}`, `x ∈ S_{k+1}`, over `d`-simplices `σ` whose lowest
/// vertex layer is `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEntry {
    pub k: usize,
    /// `None` when layer `k` is empty.
    pub xi: Option<f64>,
    pub breakdown: Vec<f64>,
    pub witnesses: Vec<Option<Vec<String>>>,
}

pub fn growth_function(complex: &WeightedComplex, layers: &LayerDecomposition, k: usize) -> GrowthEntry {
    let n = complex.max_degree();
    let mut breakdown = vec![0.0; n];
    let mut witnesses = vec![None; n];
    let mut any = false;
    for (d, (slot, witness)) in breakdown.iter_mut().zip(witnesses.iter_mut()).enumerate() {
        let mut best: Option<(usize, usize)> = None;
        for (idx, s) in complex.simplices(d).enumerate() {
            if s.iter().map(|&v| layers.layer[v]).min() != Some(k) {
                continue;
            }
            any = true;
            let forward = complex.cofaces(d, idx).iter().filter(|c| layers.layer[c.vertex] == k + 1).count();
            if best.is_none_or(|(b, _)| forward > b) {
                best = Some((forward, idx));
            }
        }
        if let Some((b, idx)) = best {
            *slot = b as f64;
            *witness = Some(complex.simplex(d, idx).iter().map(|&v| complex.graph().label(v).to_string()).collect());
        }
    }
    GrowthEntry { k, xi: any.then(|| breakdown.iter().sum()), breakdown, witnesses }
}

/// How `ξ(j, j+1)` is continued past the measured layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// Exact formula in `j`.
    Formula { xi: PowerLaw },
    /// Least-squares fit of `log ξ` against `log j` over the measured range.
    Fitted { xi: PowerLaw },
    /// Repeat the last measured value.
    LastValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFunction {
    pub measured: Vec<GrowthEntry>,
    pub tail: TailModel,
}

impl GrowthFunction {
    /// `ξ` given by a formula for every `j`.
    pub fn from_formula(xi: PowerLaw) -> Self {
        GrowthFunction { measured: Vec::new(), tail: TailModel::Formula { xi } }
    }

    /// Measures `ξ(k, k+1)` for `k = 0..L-1` (`L` layers) and fits a power-law tail.
    pub fn measure(complex: &WeightedComplex, layers: &LayerDecomposition) -> Self {
        let top = layers.num_layers().saturating_sub(1);
        let measured: Vec<GrowthEntry> = (0..top).into_par_iter().map(|k| growth_function(complex, layers, k)).collect();
        let tail = fit_tail(&measured);
        GrowthFunction { measured, tail }
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    pub fn xi(&self, j: usize) -> Option<f64> {
        match self.measured.get(j) {
            Some(entry) if entry.xi.is_some() => entry.xi,
            _ => match &self.tail {
                TailModel::Formula { xi } | TailModel::Fitted { xi } => Some(xi.eval(j as f64)),
                TailModel::LastValue => self.measured.iter().rev().find_map(|e| e.xi),
            },
        }
    }

    /// `1/√ξ(j, j+1)`, infinite when `ξ = 0`, `None` when undefined.
    pub fn term(&self, j: usize) -> Option<f64> {
        self.xi(j).map(|x| if x > 0.0 { 1.0 / x.sqrt() } else { f64::INFINITY })
    }

    /// `Σ_{j > H} 1/√ξ(j)` bounded by `∫_H^∞` for a power-law tail (`∞` if `p <= 2`).
    pub fn tail_bound(&self, horizon: usize) -> f64 {
        let law = match &self.tail {
            TailModel::Formula { xi } | TailModel::Fitted { xi } => *xi,
            TailModel::LastValue => match self.xi(horizon) {
                Some(_) => return f64::INFINITY,
                None => return 0.0,
            },
        };
        let half = law.exponent / 2.0;
        if half <= 1.0 || law.coef <= 0.0 {
            return f64::INFINITY;
        }
        (horizon as f64).powf(1.0 - half) / ((half - 1.0) * law.coef.sqrt())
    }
}

fn fit_tail(measured: &[GrowthEntry]) -> TailModel {
    let points: Vec<(f64, f64)> = measured
        .iter()
        .filter(|e| e.k >= 1)
        .filter_map(|e| e.xi.filter(|&x| x > 0.0).map(|x| ((e.k as f64).ln(), x.ln())))
        .collect();
    let half = &points[points.len() / 2..];
    if half.len() < 2 {
        return TailModel::LastValue;
    }
    let (slope, intercept, _) = least_squares(half);
    TailModel::Fitted { xi: PowerLaw::new(intercept.exp(), slope) }
}

/// `(slope, intercept, r²)` of the least-squares line through `points`.
fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Heuristic reading of the partial sums; never replaces the raw table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: String,
    pub r2_log: f64,
    pub r2_linear: f64,
    pub r2_convergent: f64,
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSums {
    pub ks: Vec<usize>,
    pub terms: Vec<f64>,
    pub sums: Vec<f64>,
    /// `k` with undefined `ξ`, left out of the sums.
    pub skipped: Vec<usize>,
    pub classification: Classification,
}

impl PartialSums {
    pub fn last(&self) -> f64 {
        self.sums.last().copied().unwrap_or(0.0)
    }
}

/// Running sums of `1/√ξ(k, k+1)` over `k_range`.
pub fn divergence_partial_sums(growth: &GrowthFunction, k_range: RangeInclusive<usize>) -> PartialSums {
    let mut ks = Vec::new();
    let mut terms = Vec::new();
    let mut sums = Vec::new();
    let mut skipped = Vec::new();
    let mut acc = 0.0;
    for k in k_range {
        match growth.term(k) {
            Some(t) => {
                acc += t;
                ks.push(k);
                terms.push(t);
                sums.push(acc);
            }
            None => skipped.push(k),
        }
    }
    let classification = classify_sums(&ks, &sums);
    PartialSums { ks, terms, sums, skipped, classification }
}

fn classify_sums(ks: &[usize], sums: &[f64]) -> Classification {
    let finite: Vec<(f64, f64)> =
        ks.iter().zip(sums).filter(|(_, s)| s.is_finite()).map(|(&k, &s)| ((k.max(1)) as f64, s)).collect();
    if sums.iter().any(|s| s.is_infinite()) {
        return Classification {
            label: "divergent (zero growth term)".into(),
            r2_log: f64::NAN,
            r2_linear: f64::NAN,
            r2_convergent: f64::NAN,
            heuristic: true,
        };
    }
    if finite.len() < 3 {
        return Classification { label: "too_short".into(), r2_log: 0.0, r2_linear: 0.0, r2_convergent: 0.0, heuristic: true };
    }
    let on = |f: &dyn Fn(f64) -> f64| least_squares(&finite.iter().map(|&(k, s)| (f(k), s)).collect::<Vec<_>>()).2;
    let r2_log = on(&|k: f64| k.ln());
    let r2_linear = on(&|k: f64| k);
    let r2_convergent = on(&|k: f64| 1.0 / k);
    let label = if r2_convergent >= r2_log && r2_convergent >= r2_linear {
        "convergent_plateau"
    } else if r2_log >= r2_linear {
        "log_divergent"
    } else {
        "linear_divergent"
    };
    Classification { label: label.into(), r2_log, r2_linear, r2_convergent, heuristic: true }
}

pub fn default_horizon(depth: usize) -> usize {
    (100 * depth).max(1000)
}

/// Layer-constant cut-off `χ_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCutoff {
    pub n: usize,
    pub horizon: usize,
    /// Values on layers `0..=horizon+1`; zero beyond.
    pub values: Vec<f64>,
    /// `Σ_{j=N}^{H} 1/√ξ(j, j+1)`.
    pub tail_sum: f64,
    /// Bound on `Σ_{j>H} 1/√ξ` and its ratio to `tail_sum`.
    pub truncation_error_bound: f64,
    pub relative_truncation_error: f64,
}

impl DivergenceCutoff {
    pub fn value_at_layer(&self, layer: usize) -> f64 {
        self.values.get(layer).copied().unwrap_or(0.0)
    }

    pub fn on_vertices(&self, layers: &LayerDecomposition) -> Vec<f64> {
        layers.layer.iter().map(|&l| self.value_at_layer(l)).collect()
    }
}

/// `χ_N = 1` on layers `<= N`, then `max(0, 1 - Σ_{j=N}^{ℓ-1} t_j / Σ_{j=N}^{H} t_j)`.
pub fn divergence_cutoffs(growth: &GrowthFunction, n: usize, horizon: usize) -> Result<DivergenceCutoff> {
    if horizon <= n {
        return Err(HodgeError::param(format!("horizon {horizon} must exceed N = {n}")));
    }
    let terms: Vec<f64> = (n..=horizon)
        .map(|j| growth.term(j).ok_or_else(|| HodgeError::param(format!("growth undefined at layer {j}"))))
        .collect::<Result<_>>()?;
    let tail_sum: f64 = terms.iter().sum();
    let mut values = vec![1.0; horizon + 2];
    let mut acc = 0.0;
    for l in n + 1..=horizon + 1 {
        acc += terms[l - 1 - n];
        values[l] = if tail_sum.is_infinite() {
            // a zero growth term: full plateau up to it, nothing after
            if acc.is_infinite() { 0.0 } else { 1.0 }
        } else {
            (1.0 - acc / tail_sum).max(0.0)
        };
    }
    values[horizon + 1] = 0.0;
    let bound = growth.tail_bound(horizon);
    Ok(DivergenceCutoff {
        n,
        horizon,
        values,
        tail_sum,
        truncation_error_bound: bound,
        relative_truncation_error: bound / tail_sum,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step3Degree {
    pub degree: usize,
    pub remainder_d_sq: f64,
    pub remainder_delta_sq: f64,
    pub u_norm_sq: f64,
    /// Smallest `C` with `‖R^d‖² <= C ‖u‖² / Σ_{ℓ>=N} 1/√ξ`.
    pub c_min_d: Option<f64>,
    pub c_min_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step3Row {
    pub n: usize,
    pub tail_sum: f64,
    pub per_degree: Vec<Step3Degree>,
    pub total_remainder_sq: f64,
}

/// Remainders of `χ_N u_i` for every component of `u`.
pub fn step3_estimate(
    complex: &WeightedComplex,
    layers: &LayerDecomposition,
    cutoff: &DivergenceCutoff,
    u: &[Cochain],
) -> Result<Step3Row> {
    let chi = cutoff.on_vertices(layers);
    let per_degree = u
        .par_iter()
        .map(|ui| {
            let r = leibniz_remainder(complex, &chi, ui)?;
            let u_norm_sq = ui.norm_sq(complex);
            let c = |norm: f64| (u_norm_sq > 0.0).then(|| norm * cutoff.tail_sum / u_norm_sq);
            Ok(Step3Degree {
                degree: ui.degree(),
                remainder_d_sq: r.norm_d_sq,
                remainder_delta_sq: r.norm_delta_sq,
                u_norm_sq,
                c_min_d: c(r.norm_d_sq),
                c_min_delta: c(r.norm_delta_sq),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total_remainder_sq = per_degree.iter().map(|d| d.remainder_d_sq + d.remainder_delta_sq).sum();
    Ok(Step3Row { n: cutoff.n, tail_sum: cutoff.tail_sum, per_degree, total_remainder_sq })
}

pub fn step3_sweep(
    complex: &WeightedComplex,
    layers: &LayerDecomposition,
    growth: &GrowthFunction,
    ns: &[usize],
    horizon: usize,
    u: &[Cochain],
) -> Result<Vec<Step3Row>> {
    ns.iter()
        .map(|&n| step3_estimate(complex, layers, &divergence_cutoffs(growth, n, horizon)?, u))
        .collect()
}

/// One cochain per degree with i.i.d. uniform entries, scaled to unit `m`-norm.
pub fn normalized_random_forms(complex: &WeightedComplex, seed: u64) -> Vec<Cochain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=complex.max_degree())
        .map(|i| {
            let mut f = Cochain::random(complex, i, &mut rng);
            let norm = f.norm_sq(complex).sqrt();
            if norm > 0.0 {
                f.values_mut().iter_mut().for_each(|v| *v /= norm);
            }
            f
        })
        .collect()
}
