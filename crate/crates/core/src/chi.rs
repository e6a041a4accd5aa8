//! Exhaustions, plateau cut-offs and the cut-off energy functional.
//!
//! A cut-off is always a vertex function `χ`; on `i`-simplices it acts through
//! the average `χ̃(x_0, …, x_i) = (1/(i+1)) Σ_j χ(x_j)`. The energy at an
//! `(i-1)`-simplex `σ` is
//!
//! `E_i(σ) = (1/m(σ)) Σ_{x ∈ F(σ)} m(σ ∪ {x}) |χ(x) - χ̃(σ)|²`,
//!
//! i.e. the squared gradient of `χ` along each coface direction. On edges this is
//! the usual `|χ(y) - χ(x)|²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, VertexId, WeightedComplex};
use crate::divergence::{divergence_cutoffs, GrowthFunction};
use crate::error::{HodgeError, Result};
use crate::linalg::{self, SparseMatrix};
use crate::operators::{self, codifferential_apply, coboundary_apply, Cochain};

/// Increasing family `O_k = {x : level(x) <= k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    level: Vec<Option<usize>>,
    k_max: usize,
    roots: Vec<VertexId>,
    unreachable: Vec<VertexId>,
}

impl Exhaustion {
    /// Graph-distance balls around `roots`. Vertices unreachable from the roots
    /// never enter any `O_k` and are listed by [`Exhaustion::unreachable`].
    pub fn ball(complex: &WeightedComplex, roots: &[VertexId], k_max: usize) -> Result<Self> {
        if roots.is_empty() {
            return Err(HodgeError::param("exhaustion needs at least one root"));
        }
        if let Some(&bad) = roots.iter().find(|&&v| v >= complex.num_vertices()) {
            return Err(HodgeError::UnknownVertex(bad.to_string()));
        }
        let level = complex.graph().distances_from(roots);
        let unreachable = (0..level.len()).filter(|&v| level[v].is_none()).collect();
        Ok(Exhaustion { level, k_max, roots: roots.to_vec(), unreachable })
    }

    /// Exhaustion by an explicit level per vertex (e.g. layer index).
    pub fn from_levels(level: Vec<Option<usize>>, k_max: usize) -> Self {
        let roots = (0..level.len()).filter(|&v| level[v] == Some(0)).collect();
        let unreachable = (0..level.len()).filter(|&v| level[v].is_none()).collect();
        Exhaustion { level, k_max, roots, unreachable }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn roots(&self) -> &[VertexId] {
        &self.roots
    }

    pub fn unreachable(&self) -> &[VertexId] {
        &self.unreachable
    }

    pub fn level(&self, x: VertexId) -> Option<usize> {
        self.level[x]
    }

    pub fn contains(&self, k: usize, x: VertexId) -> bool {
        matches!(self.level[x], Some(l) if l <= k)
    }

    pub fn set(&self, k: usize) -> Vec<VertexId> {
        (0..self.level.len()).filter(|&x| self.contains(k, x)).collect()
    }

    pub fn size(&self, k: usize) -> usize {
        self.level.iter().filter(|l| matches!(l, Some(l) if *l <= k)).count()
    }

    /// Largest finite level, i.e. the index from which `O_k` stops growing.
    pub fn max_level(&self) -> usize {
        self.level.iter().flatten().copied().max().unwrap_or(0)
    }

    /// First `k <= k_max` with `O_k = O_{k-1}`, if the family stops increasing.
    pub fn saturated_from(&self) -> Option<usize> {
        let top = self.max_level();
        (top < self.k_max).then_some(top + 1)
    }
}

/// How `χ_k` decays outside `O_k`.
#[derive(Clone, Debug)]
pub enum Ramp {
    /// `χ_k(x) = max(0, 1 - d(x, O_k)/W)`.
    Linear { width: f64 },
    /// Layer-constant profile driven by `1/√ξ` decrements; the exhaustion's levels
    /// must be the layer indices.
    Divergence { growth: GrowthFunction, horizon: usize },
}

impl Ramp {
    fn validate(&self) -> Result<()> {
        match self {
            Ramp::Linear { width } if !(*width > 0.0 && width.is_finite()) => {
                Err(HodgeError::param(format!("ramp width must be positive, got {width}")))
            }
            _ => Ok(()),
        }
    }
}

/// `χ_k` for the given exhaustion index.
pub fn make_plateau_cutoff(complex: &WeightedComplex, exhaustion: &Exhaustion, k: usize, ramp: &Ramp) -> Result<Vec<f64>> {
    ramp.validate()?;
    if exhaustion.level.len() != complex.num_vertices() {
        return Err(HodgeError::DimensionMismatch { expected: complex.num_vertices(), got: exhaustion.level.len() });
    }
    match ramp {
        Ramp::Linear { width } => {
            let inside = exhaustion.set(k);
            if inside.is_empty() {
                return Ok(vec![0.0; complex.num_vertices()]);
            }
            let dist = complex.graph().distances_from(&inside);
            Ok(dist
                .iter()
                .map(|d| match d {
                    Some(d) => (1.0 - *d as f64 / width).max(0.0),
                    None => 0.0,
                })
                .collect())
        }
        Ramp::Divergence { growth, horizon } => {
            let cutoff = divergence_cutoffs(growth, k, *horizon)?;
            Ok(exhaustion.level.iter().map(|l| l.map_or(0.0, |l| cutoff.value_at_layer(l))).collect())
        }
    }
}

/// `χ̃` on every `degree`-simplex.
pub fn averaged(complex: &WeightedComplex, chi: &[f64], degree: usize) -> Vec<f64> {
    let denom = (degree + 1) as f64;
    complex.simplices(degree).map(|s| s.iter().map(|&v| chi[v]).sum::<f64>() / denom).collect()
}

fn check_chi(complex: &WeightedComplex, chi: &[f64]) -> Result<()> {
    if chi.len() != complex.num_vertices() {
        return Err(HodgeError::DimensionMismatch { expected: complex.num_vertices(), got: chi.len() });
    }
    Ok(())
}

/// `E_degree(σ)` for every `(degree-1)`-simplex `σ`.
pub fn simplex_energies(complex: &WeightedComplex, chi: &[f64], degree: usize) -> Result<Vec<f64>> {
    check_chi(complex, chi)?;
    if degree == 0 || degree > complex.max_degree() {
        return Err(HodgeError::DegreeOutOfRange { what: "energy (needs 1 <= degree <= n)", degree, max: complex.max_degree() });
    }
    let lower = degree - 1;
    let base = averaged(complex, chi, lower);
    let upper = complex.weights(degree);
    Ok((0..complex.count(lower))
        .map(|s| {
            let sum: f64 = complex
                .cofaces(lower, s)
                .iter()
                .map(|c| {
                    let g = chi[c.vertex] - base[s];
                    upper[c.index] * g * g
                })
                .sum();
            sum / complex.weight(lower, s)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub sup: f64,
    /// Lexicographically smallest `(degree-1)`-simplex attaining the sup.
    pub witness: Option<Simplex>,
    /// Sum of the energy over all `(degree-1)`-simplices.
    pub total: f64,
}

/// Sup, witness and total of [`simplex_energies`]. Maximizers are compared with a
/// relative tolerance of `1e-12`.
pub fn energy_functional(complex: &WeightedComplex, chi: &[f64], degree: usize) -> Result<Energy> {
    let values = simplex_energies(complex, chi, degree)?;
    let sup = values.iter().copied().fold(0.0, f64::max);
    let total = values.iter().sum();
    let tie = 1e-12 * sup.max(1.0);
    let witness = values
        .iter()
        .position(|&v| v >= sup - tie)
        .filter(|_| !values.is_empty())
        .map(|idx| complex.get(degree - 1, idx));
    Ok(Energy { sup, witness, total })
}

/// Exhaustion plus the cut-offs `χ_k` for a range of `k`.
#[derive(Clone, Debug)]
pub struct CutoffSystem {
    pub exhaustion: Exhaustion,
    pub ramp: Ramp,
    pub ks: Vec<usize>,
    pub chis: Vec<Vec<f64>>,
    /// Indices `k` whose ramp reaches past the truncation (energies there are
    /// truncation-limited).
    pub ramp_beyond_truncation: Vec<usize>,
}

impl CutoffSystem {
    pub fn new(complex: &WeightedComplex, exhaustion: Exhaustion, ramp: Ramp, ks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let ks: Vec<usize> = ks.into_iter().collect();
        if ks.is_empty() {
            return Err(HodgeError::param("empty k range"));
        }
        let chis = ks
            .par_iter()
            .map(|&k| make_plateau_cutoff(complex, &exhaustion, k, &ramp))
            .collect::<Result<Vec<_>>>()?;
        let top = exhaustion.max_level();
        let ramp_beyond_truncation = match &ramp {
            Ramp::Linear { width } => ks.iter().copied().filter(|&k| k + width.ceil() as usize > top).collect(),
            Ramp::Divergence { .. } => Vec::new(),
        };
        Ok(CutoffSystem { exhaustion, ramp, ks, chis, ramp_beyond_truncation })
    }
}

/// Three-valued reading of a finite energy sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "BOUNDED_ON_RANGE")]
    BoundedOnRange,
    #[serde(rename = "GROWING")]
    Growing,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::BoundedOnRange => "BOUNDED_ON_RANGE",
            Verdict::Growing => "GROWING",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Minimum length of the strictly increasing tail for a GROWING verdict.
pub const GROWTH_RUN: usize = 5;

/// Returns the verdict and, for GROWING, the start index of the increasing tail.
pub fn classify(values: &[f64], tol: f64) -> (Verdict, Option<usize>) {
    if values.len() < 2 {
        return (Verdict::Inconclusive, None);
    }
    let slack = |v: f64| tol * v.abs().max(1.0);
    let mut start = values.len() - 1;
    while start > 0 && values[start] - values[start - 1] > slack(values[start]) {
        start -= 1;
    }
    if values.len() - start >= GROWTH_RUN {
        return (Verdict::Growing, Some(start));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first_max = values.iter().position(|&v| v >= max - slack(max)).unwrap();
    let non_increasing = values[first_max..].windows(2).all(|w| w[1] <= w[0] + slack(w[0]));
    if first_max + 1 < values.len() && non_increasing {
        (Verdict::BoundedOnRange, None)
    } else {
        (Verdict::Inconclusive, None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChiMode {
    Global,
    Level { level: usize },
    Region { size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub degree: usize,
    pub k: usize,
    pub value: f64,
    pub simplex: Vec<VertexId>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRun {
    pub degree: usize,
    pub ks: Vec<usize>,
    pub values: Vec<f64>,
}

/// Sup table over `(degree, k)` with verdicts. Evidence on the checked range only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub mode: ChiMode,
    pub degrees: Vec<usize>,
    pub k_range: (usize, usize),
    pub ks: Vec<usize>,
    /// `table[r][j]`: sup energy at degree `degrees[r]` for cut-off `ks[j]`.
    pub table: Vec<Vec<f64>>,
    /// Same layout, summed instead of maximized.
    pub totals: Vec<Vec<f64>>,
    pub row_verdicts: Vec<Verdict>,
    pub verdict: Verdict,
    pub constant_c: f64,
    pub witness: Option<WitnessReport>,
    pub growth_witness: Option<GrowthRun>,
    /// Excluded from the verdicts.
    pub ramp_beyond_truncation: Vec<usize>,
    pub scope: String,
}

fn profile(complex: &WeightedComplex, cutoffs: &CutoffSystem, degrees: Vec<usize>, mode: ChiMode, tol: f64) -> Result<EnergyProfile> {
    let ks = &cutoffs.ks;
    let cells: Vec<(usize, usize)> = (0..degrees.len()).flat_map(|r| (0..ks.len()).map(move |j| (r, j))).collect();
    let energies = cells
        .par_iter()
        .map(|&(r, j)| {
            let degree = degrees[r];
            if degree == 0 {
                // no lower faces: the condition is vacuous
                Ok(Energy { sup: 0.0, witness: None, total: 0.0 })
            } else {
                energy_functional(complex, &cutoffs.chis[j], degree)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = vec![vec![0.0; ks.len()]; degrees.len()];
    let mut totals = table.clone();
    let mut witness: Option<WitnessReport> = None;
    for (&(r, j), e) in cells.iter().zip(&energies) {
        table[r][j] = e.sup;
        totals[r][j] = e.total;
        if let Some(s) = &e.witness {
            if witness.as_ref().is_none_or(|w| e.sup > w.value) {
                witness = Some(WitnessReport {
                    degree: degrees[r],
                    k: ks[j],
                    value: e.sup,
                    labels: s.vertices.iter().map(|&v| complex.graph().label(v).to_string()).collect(),
                    simplex: s.vertices.clone(),
                });
            }
        }
    }

    // verdicts only read the k whose ramp fits inside the truncation
    let valid: Vec<usize> = (0..ks.len()).filter(|&j| !cutoffs.ramp_beyond_truncation.contains(&ks[j])).collect();
    let valid_ks: Vec<usize> = valid.iter().map(|&j| ks[j]).collect();
    let mut row_verdicts = Vec::with_capacity(degrees.len());
    let mut growth_witness = None;
    for (r, row) in table.iter().enumerate() {
        let values: Vec<f64> = valid.iter().map(|&j| row[j]).collect();
        let (verdict, start) = if degrees[r] == 0 { (Verdict::BoundedOnRange, None) } else { classify(&values, tol) };
        if let (Some(start), None) = (start, &growth_witness) {
            growth_witness =
                Some(GrowthRun { degree: degrees[r], ks: valid_ks[start..].to_vec(), values: values[start..].to_vec() });
        }
        row_verdicts.push(verdict);
    }
    let verdict = if row_verdicts.contains(&Verdict::Growing) {
        Verdict::Growing
    } else if row_verdicts.iter().all(|&v| v == Verdict::BoundedOnRange) {
        Verdict::BoundedOnRange
    } else {
        Verdict::Inconclusive
    };
    let constant_c = table.iter().flatten().copied().fold(0.0, f64::max);
    Ok(EnergyProfile {
        mode,
        degrees,
        k_range: (*ks.first().unwrap(), *ks.last().unwrap()),
        ks: ks.clone(),
        table,
        totals,
        row_verdicts,
        verdict,
        constant_c,
        witness,
        growth_witness,
        ramp_beyond_truncation: cutoffs.ramp_beyond_truncation.clone(),
        scope: "finite truncation, checked range only".into(),
    })
}

/// Energy rows for every degree `1..=n`.
pub fn check_global_chi(complex: &WeightedComplex, cutoffs: &CutoffSystem, tol: f64) -> Result<EnergyProfile> {
    profile(complex, cutoffs, (1..=complex.max_degree()).collect(), ChiMode::Global, tol)
}

/// The single energy row at degree `level`; level 0 is recorded as a vacuous zero row.
pub fn check_level_chi(complex: &WeightedComplex, cutoffs: &CutoffSystem, level: usize, tol: f64) -> Result<EnergyProfile> {
    if level > complex.max_degree() {
        return Err(HodgeError::DegreeOutOfRange { what: "level", degree: level, max: complex.max_degree() });
    }
    profile(complex, cutoffs, vec![level], ChiMode::Level { level }, tol)
}

/// Induced subcomplex on `region`.
pub fn restrict_to_region(complex: &WeightedComplex, region: &[VertexId]) -> Result<WeightedComplex> {
    if region.is_empty() {
        return Err(HodgeError::param("empty region"));
    }
    let mut keep = vec![false; complex.num_vertices()];
    for &v in region {
        if v >= keep.len() {
            return Err(HodgeError::UnknownVertex(v.to_string()));
        }
        keep[v] = true;
    }
    complex.induced(&keep)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionReport {
    pub region_size: usize,
    pub profile: EnergyProfile,
    pub coupling: CouplingReport,
}

/// Global check on the restriction to `region`, with balls around `roots` (given
/// in the original indexing) and the coupling of the region to its complement.
pub fn check_region_chi(
    complex: &WeightedComplex,
    region: &[VertexId],
    roots: &[VertexId],
    ramp: Ramp,
    ks: impl IntoIterator<Item = usize>,
    tol: f64,
) -> Result<RegionReport> {
    let restricted = restrict_to_region(complex, region)?;
    let mut sorted = region.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let local_roots: Vec<VertexId> =
        roots.iter().filter_map(|r| sorted.binary_search(r).ok()).collect();
    if local_roots.is_empty() {
        return Err(HodgeError::param("no exhaustion root lies inside the region"));
    }
    let ks: Vec<usize> = ks.into_iter().collect();
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let exhaustion = Exhaustion::ball(&restricted, &local_roots, k_max)?;
    let cutoffs = CutoffSystem::new(&restricted, exhaustion, ramp, ks)?;
    let mut profile = check_global_chi(&restricted, &cutoffs, tol)?;
    profile.mode = ChiMode::Region { size: sorted.len() };
    let coupling = coupling_block(complex, &sorted)?.report;
    Ok(RegionReport { region_size: sorted.len(), profile, coupling })
}

/// Position of a simplex in the total space `⊕_i C^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexRef {
    pub degree: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub in_dim: usize,
    pub out_dim: usize,
    pub nnz: usize,
    pub rank: usize,
    pub norm: f64,
    pub singular_value_threshold: f64,
    /// Region simplices having a coface with exactly one vertex outside.
    pub boundary_faces: usize,
    /// Simplices with exactly one vertex outside the region and a face inside.
    pub crossing_simplices: usize,
    pub scope: String,
}

/// `D` (symmetrized by the weights) in the block form `[[D_in, C], [C*, D_out]]`.
#[derive(Clone, Debug)]
pub struct CouplingBlocks {
    pub d_in: SparseMatrix,
    pub d_out: SparseMatrix,
    pub c: SparseMatrix,
    pub in_index: Vec<SimplexRef>,
    pub out_index: Vec<SimplexRef>,
    pub report: CouplingReport,
}

pub const COUPLING_SV_THRESHOLD: f64 = 1e-10;

/// "In" simplices are those with every vertex in `region`.
pub fn coupling_block(complex: &WeightedComplex, region: &[VertexId]) -> Result<CouplingBlocks> {
    let mut inside = vec![false; complex.num_vertices()];
    for &v in region {
        if v >= inside.len() {
            return Err(HodgeError::UnknownVertex(v.to_string()));
        }
        inside[v] = true;
    }
    let (d, offsets) = operators::gauss_bonnet_matrix(complex);
    let n = complex.max_degree();
    let mut sqrt_m = Vec::with_capacity(offsets[n + 1]);
    for i in 0..=n {
        sqrt_m.extend(complex.weights(i).iter().map(|w| w.sqrt()));
    }
    let inv: Vec<f64> = sqrt_m.iter().map(|w| 1.0 / w).collect();
    let sym = linalg::scale(&d, &sqrt_m, &inv);

    let mut in_index = Vec::new();
    let mut out_index = Vec::new();
    let mut slot = Vec::with_capacity(offsets[n + 1]);
    for i in 0..=n {
        for (idx, s) in complex.simplices(i).enumerate() {
            let r = SimplexRef { degree: i, index: idx };
            if s.iter().all(|&v| inside[v]) {
                slot.push((true, in_index.len()));
                in_index.push(r);
            } else {
                slot.push((false, out_index.len()));
                out_index.push(r);
            }
        }
    }
    let (ni, no) = (in_index.len(), out_index.len());
    let mut t_in = sprs::TriMat::new((ni, ni));
    let mut t_out = sprs::TriMat::new((no, no));
    let mut t_c = sprs::TriMat::new((ni, no));
    for (&v, (r, c)) in sym.iter() {
        match (slot[r], slot[c]) {
            ((true, a), (true, b)) => t_in.add_triplet(a, b, v),
            ((false, a), (false, b)) => t_out.add_triplet(a, b, v),
            ((true, a), (false, b)) => t_c.add_triplet(a, b, v),
            ((false, _), (true, _)) => {}
        }
    }
    let c: SparseMatrix = t_c.to_csr();

    let mut boundary_faces = 0;
    let mut crossing = 0;
    for i in 0..=n {
        for (idx, s) in complex.simplices(i).enumerate() {
            let outside = s.iter().filter(|&&v| !inside[v]).count();
            if outside == 0 && complex.cofaces(i, idx).iter().any(|cf| !inside[cf.vertex]) {
                boundary_faces += 1;
            }
            if outside == 1 && i > 0 {
                crossing += 1;
            }
        }
    }

    let singular = coupling_singular_values(&c)?;
    let rank = singular.iter().filter(|&&s| s > COUPLING_SV_THRESHOLD).count();
    let norm = singular.iter().copied().fold(0.0, f64::max);
    let report = CouplingReport {
        in_dim: ni,
        out_dim: no,
        nnz: c.nnz(),
        rank,
        norm,
        singular_value_threshold: COUPLING_SV_THRESHOLD,
        boundary_faces,
        crossing_simplices: crossing,
        scope: "finite-truncation evidence; compactness is not decided".into(),
    };
    Ok(CouplingBlocks { d_in: t_in.to_csr(), d_out: t_out.to_csr(), c, in_index, out_index, report })
}

fn coupling_singular_values(c: &SparseMatrix) -> Result<Vec<f64>> {
    if c.rows() == 0 || c.cols() == 0 {
        return Ok(Vec::new());
    }
    let gram = linalg::product(c, &linalg::transpose(c));
    if gram.rows() <= crate::spectral::DENSE_LIMIT {
        let eig = nalgebra::SymmetricEigen::new(linalg::to_dense(&gram));
        return Ok(eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect());
    }
    // every column of C has at most one entry, so C C* is diagonal in practice
    let diagonal = gram.iter().all(|(v, (r, c))| r == c || v.abs() <= f64::EPSILON);
    if !diagonal {
        return Err(HodgeError::TooLarge(gram.rows(), crate::spectral::DENSE_LIMIT));
    }
    let mut diag = vec![0.0; gram.rows()];
    for (&v, (r, c)) in gram.iter() {
        if r == c {
            diag[r] += v;
        }
    }
    Ok(diag.into_iter().map(|l| l.max(0.0).sqrt()).collect())
}

/// Remainders of multiplying a cochain by a cut-off, with their norms and the
/// smallest constants in the Leibniz bounds on this instance.
#[derive(Clone, Debug)]
pub struct LeibnizRemainder {
    pub degree: usize,
    /// `d(χ̃f) - χ̃ df`, absent at the top degree.
    pub r_d: Option<Cochain>,
    /// `δ(χ̃f) - χ̃ δf`, absent at degree 0.
    pub r_delta: Option<Cochain>,
    pub norm_d_sq: f64,
    pub norm_delta_sq: f64,
    /// `Σ_σ m(σ)|f(σ)|² E_{i+1}(σ)`.
    pub bound_d: f64,
    /// `Σ_τ m(τ)|f(τ)|² Σ_{faces σ} E_i(σ)`.
    pub bound_delta: f64,
    pub c_min_d: Option<f64>,
    pub c_min_delta: Option<f64>,
}

fn pointwise(weights: &[f64], values: &[f64]) -> Vec<f64> {
    weights.iter().zip(values).map(|(a, b)| a * b).collect()
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

/// Remainders from their definition.
pub fn leibniz_remainder(complex: &WeightedComplex, chi: &[f64], f: &Cochain) -> Result<LeibnizRemainder> {
    check_chi(complex, chi)?;
    let i = f.degree();
    complex.check_degree("leibniz cochain", i)?;
    let n = complex.max_degree();
    let weighted = Cochain::from_values(complex, i, pointwise(&averaged(complex, chi, i), f.values()))?;

    let (r_d, bound_d) = if i < n {
        let lhs = coboundary_apply(complex, &weighted)?;
        let df = coboundary_apply(complex, f)?;
        let avg = averaged(complex, chi, i + 1);
        let vals = lhs.values().iter().zip(df.values()).zip(&avg).map(|((a, b), c)| a - c * b).collect();
        let energy = simplex_energies(complex, chi, i + 1)?;
        let bound = (0..complex.count(i)).map(|s| complex.weight(i, s) * f.values()[s].powi(2) * energy[s]).sum();
        (Some(Cochain::from_values(complex, i + 1, vals)?), bound)
    } else {
        (None, 0.0)
    };
    let (r_delta, bound_delta) = if i > 0 {
        let lhs = codifferential_apply(complex, &weighted)?;
        let df = codifferential_apply(complex, f)?;
        let avg = averaged(complex, chi, i - 1);
        let vals = lhs.values().iter().zip(df.values()).zip(&avg).map(|((a, b), c)| a - c * b).collect();
        let energy = simplex_energies(complex, chi, i)?;
        let bound = (0..complex.count(i))
            .map(|t| {
                let faces: f64 = complex.faces(i, t).iter().map(|&s| energy[s]).sum();
                complex.weight(i, t) * f.values()[t].powi(2) * faces
            })
            .sum();
        (Some(Cochain::from_values(complex, i - 1, vals)?), bound)
    } else {
        (None, 0.0)
    };
    let norm_d_sq = r_d.as_ref().map_or(0.0, |r| r.norm_sq(complex));
    let norm_delta_sq = r_delta.as_ref().map_or(0.0, |r| r.norm_sq(complex));
    Ok(LeibnizRemainder {
        degree: i,
        c_min_d: ratio(norm_d_sq, bound_d),
        c_min_delta: ratio(norm_delta_sq, bound_delta),
        r_d,
        r_delta,
        norm_d_sq,
        norm_delta_sq,
        bound_d,
        bound_delta,
    })
}

/// Remainders from the closed forms
///
/// `R^d(τ) = Σ_j (-1)^j (χ̃(τ) - χ(x_j))/(i+1) · f(τ without x_j)` and
/// `R^δ(σ) = (1/m(σ)) Σ_{x ∈ F(σ)} m(σ∪{x}) (χ(x) - χ̃(σ))/(i+1) · f(x, σ)`,
/// where `f` has degree `i` and `f(x, σ)` carries the orientation sign.
pub fn leibniz_remainder_explicit(complex: &WeightedComplex, chi: &[f64], f: &Cochain) -> Result<(Option<Cochain>, Option<Cochain>)> {
    check_chi(complex, chi)?;
    let i = f.degree();
    complex.check_degree("leibniz cochain", i)?;
    let n = complex.max_degree();
    let r_d = if i < n {
        let avg = averaged(complex, chi, i + 1);
        let vals = (0..complex.count(i + 1))
            .map(|t| {
                let tau = complex.simplex(i + 1, t);
                complex
                    .faces(i + 1, t)
                    .iter()
                    .enumerate()
                    .map(|(j, &face)| {
                        crate::complex::Sign::alternating(j).value() * (avg[t] - chi[tau[j]]) * f.values()[face]
                    })
                    .sum::<f64>()
                    / (i + 1) as f64
            })
            .collect();
        Some(Cochain::from_values(complex, i + 1, vals)?)
    } else {
        None
    };
    let r_delta = if i > 0 {
        let avg = averaged(complex, chi, i - 1);
        let upper = complex.weights(i);
        let vals = (0..complex.count(i - 1))
            .map(|s| {
                let sum: f64 = complex
                    .cofaces(i - 1, s)
                    .iter()
                    .map(|c| {
                        crate::complex::Sign::alternating(c.position).value()
                            * upper[c.index]
                            * (chi[c.vertex] - avg[s])
                            * f.values()[c.index]
                    })
                    .sum();
                sum / (complex.weight(i - 1, s) * (i + 1) as f64)
            })
            .collect();
        Some(Cochain::from_values(complex, i - 1, vals)?)
    } else {
        None
    };
    Ok((r_d, r_delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_clique_complex, WeightRule, WeightedGraph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(lo: i64, hi: i64) -> WeightedComplex {
        let mut g = WeightedGraph::new();
        for x in lo..=hi {
            g.add_vertex(x.to_string(), 1.0).unwrap();
        }
        for v in 1..g.num_vertices() {
            g.add_edge(v - 1, v, 1.0).unwrap();
        }
        build_clique_complex(g, 1, &WeightRule::default()).unwrap()
    }

    fn complete(n: usize) -> WeightedComplex {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_vertex(format!("v{i}"), 1.0).unwrap();
        }
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j, 1.0).unwrap();
            }
        }
        build_clique_complex(g, n - 1, &WeightRule::default()).unwrap()
    }

    #[test]
    fn ball_on_a_line_segment() {
        let c = path(-10, 10);
        let zero = c.graph().vertex("0").unwrap();
        let ex = Exhaustion::ball(&c, &[zero], 3).unwrap();
        let labels: Vec<_> = ex.set(3).iter().map(|&v| c.graph().label(v).to_string()).collect();
        assert_eq!(labels, ["-3", "-2", "-1", "0", "1", "2", "3"]);
        assert!(ex.unreachable().is_empty());
    }

    #[test]
    fn ball_on_k3_and_empty_roots() {
        let c = complete(3);
        assert_eq!(Exhaustion::ball(&c, &[0], 1).unwrap().size(1), 3);
        assert!(Exhaustion::ball(&c, &[], 1).is_err());
        assert!(Exhaustion::ball(&c, &[7], 1).is_err());
    }

    #[test]
    fn unreachable_vertices_are_reported() {
        let mut g = WeightedGraph::new();
        for l in ["a", "b", "c"] {
            g.add_vertex(l, 1.0).unwrap();
        }
        g.add_edge(0, 1, 1.0).unwrap();
        let c = build_clique_complex(g, 1, &WeightRule::default()).unwrap();
        let ex = Exhaustion::ball(&c, &[0], 5).unwrap();
        assert_eq!(ex.unreachable(), &[2]);
        assert_eq!(ex.saturated_from(), Some(2));
    }

    #[test]
    fn linear_ramp_on_a_line() {
        let c = path(-10, 10);
        let zero = c.graph().vertex("0").unwrap();
        let ex = Exhaustion::ball(&c, &[zero], 10).unwrap();
        let chi = make_plateau_cutoff(&c, &ex, 3, &Ramp::Linear { width: 2.0 }).unwrap();
        let at = |x: i64| chi[c.graph().vertex(&x.to_string()).unwrap()];
        for x in -3..=3 {
            assert_eq!(at(x), 1.0);
        }
        assert_eq!(at(4), 0.5);
        assert_eq!(at(-4), 0.5);
        assert_eq!(at(5), 0.0);
        assert!(make_plateau_cutoff(&c, &ex, 3, &Ramp::Linear { width: 0.0 }).is_err());
    }

    #[test]
    fn energy_on_a_line_with_linear_ramp() {
        let c = path(-20, 20);
        let zero = c.graph().vertex("0").unwrap();
        let ex = Exhaustion::ball(&c, &[zero], 20).unwrap();
        for w in [2.0, 3.0, 5.0] {
            let chi = make_plateau_cutoff(&c, &ex, 4, &Ramp::Linear { width: w }).unwrap();
            let e = energy_functional(&c, &chi, 1).unwrap();
            // interior ramp vertices see two differences of 1/W each
            assert!((e.sup - 2.0 / (w * w)).abs() < 1e-14, "W={w}: {}", e.sup);
            // ties break to the smallest index: the leftmost interior ramp vertex, -(3 + W)
            let leftmost = c.graph().vertex(&format!("-{}", 3 + w as i64)).unwrap();
            assert_eq!(e.witness.unwrap().vertices, vec![leftmost]);
        }
        let chi = make_plateau_cutoff(&c, &ex, 4, &Ramp::Linear { width: 1.0 }).unwrap();
        assert_eq!(energy_functional(&c, &chi, 1).unwrap().sup, 1.0);
    }

    #[test]
    fn constant_cutoffs_have_zero_energy() {
        let c = complete(4);
        for value in [0.0, 1.0, 0.3] {
            let chi = vec![value; 4];
            for degree in 1..=3 {
                let e = energy_functional(&c, &chi, degree).unwrap();
                assert!(e.sup.abs() < 1e-15 && e.total.abs() < 1e-15);
            }
        }
        assert!(energy_functional(&c, &[1.0; 4], 0).is_err());
        assert!(energy_functional(&c, &[1.0; 3], 1).is_err());
    }

    #[test]
    fn classify_sequences() {
        assert_eq!(classify(&[1.0, 1.0, 1.0], 1e-12).0, Verdict::BoundedOnRange);
        assert_eq!(classify(&[0.0, 2.0, 1.0, 1.0], 1e-12).0, Verdict::BoundedOnRange);
        assert_eq!(classify(&[1.0, 2.0, 3.0, 4.0, 5.0], 1e-12), (Verdict::Growing, Some(0)));
        assert_eq!(classify(&[3.0, 1.0, 2.0, 3.0, 4.0, 5.0], 1e-12), (Verdict::Growing, Some(1)));
        assert_eq!(classify(&[1.0, 2.0, 3.0, 4.0], 1e-12).0, Verdict::Inconclusive);
        assert_eq!(classify(&[1.0, 2.0, 1.0, 2.0], 1e-12).0, Verdict::Inconclusive);
        assert_eq!(classify(&[1.0], 1e-12).0, Verdict::Inconclusive);
    }

    #[test]
    fn full_plateau_gives_zero_table() {
        let c = complete(4);
        let ex = Exhaustion::ball(&c, &[0], 5).unwrap();
        let cut = CutoffSystem::new(&c, ex, Ramp::Linear { width: 1.0 }, 1..=5).unwrap();
        let p = check_global_chi(&c, &cut, 1e-12).unwrap();
        assert!(p.table.iter().flatten().all(|&v| v == 0.0));
        // every ramp leaves the truncation, so the table carries no evidence
        assert_eq!(p.ramp_beyond_truncation, vec![1, 2, 3, 4, 5]);
        assert_eq!(p.verdict, Verdict::Inconclusive);
        let l0 = check_level_chi(&c, &cut, 0, 1e-12).unwrap();
        assert_eq!(l0.row_verdicts, vec![Verdict::BoundedOnRange]);
        assert!(check_level_chi(&c, &cut, 4, 1e-12).is_err());
    }

    #[test]
    fn region_restriction() {
        let c = complete(4);
        let r = restrict_to_region(&c, &[0, 1, 2]).unwrap();
        assert_eq!(r.counts(), vec![3, 3, 1, 0]);
        assert_eq!(restrict_to_region(&c, &[0, 1, 2, 3]).unwrap(), c);
        assert!(restrict_to_region(&c, &[]).is_err());
    }

    #[test]
    fn coupling_of_whole_vertex_set_is_empty() {
        let c = complete(4);
        let blocks = coupling_block(&c, &[0, 1, 2, 3]).unwrap();
        assert_eq!(blocks.report.rank, 0);
        assert_eq!(blocks.report.out_dim, 0);
    }

    #[test]
    fn coupling_between_disjoint_components_vanishes() {
        let mut g = WeightedGraph::new();
        for l in ["a", "b", "c", "d"] {
            g.add_vertex(l, 1.0).unwrap();
        }
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(2, 3, 1.0).unwrap();
        let c = build_clique_complex(g, 1, &WeightRule::default()).unwrap();
        let blocks = coupling_block(&c, &[0, 1]).unwrap();
        assert_eq!(blocks.c.nnz(), 0);
        assert_eq!(blocks.report.rank, 0);
        assert_eq!(blocks.report.norm, 0.0);
    }

    #[test]
    fn coupling_rank_on_k4() {
        let c = complete(4);
        let blocks = coupling_block(&c, &[0, 1, 2]).unwrap();
        // every simplex of the triangle {0,1,2} gains vertex 3 as a coface
        assert_eq!(blocks.report.rank, 7);
        assert_eq!(blocks.report.boundary_faces, 7);
        assert_eq!(blocks.report.in_dim + blocks.report.out_dim, c.total_simplices());
    }

    #[test]
    fn leibniz_vanishes_for_constant_cutoff_and_zero_cochain() {
        let c = complete(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for degree in 0..=3 {
            let f = Cochain::random(&c, degree, &mut rng);
            let r = leibniz_remainder(&c, &[1.0; 4], &f).unwrap();
            assert!(r.norm_d_sq < 1e-28 && r.norm_delta_sq < 1e-28);
            let z = leibniz_remainder(&c, &[0.2, 0.4, 0.9, 0.1], &Cochain::zeros(&c, degree)).unwrap();
            assert_eq!(z.norm_d_sq + z.norm_delta_sq, 0.0);
        }
    }

    #[test]
    fn leibniz_definition_matches_closed_form_on_ramp() {
        let c = path(-10, 10);
        let zero = c.graph().vertex("0").unwrap();
        let ex = Exhaustion::ball(&c, &[zero], 10).unwrap();
        let chi = make_plateau_cutoff(&c, &ex, 2, &Ramp::Linear { width: 3.0 }).unwrap();
        let edge = c.find(&[c.graph().vertex("3").unwrap(), c.graph().vertex("4").unwrap()]).unwrap();
        let f = Cochain::indicator(&c, 1, edge);
        let def = leibniz_remainder(&c, &chi, &f).unwrap();
        let (_, explicit_delta) = leibniz_remainder_explicit(&c, &chi, &f).unwrap();
        let a = def.r_delta.unwrap();
        let b = explicit_delta.unwrap();
        assert!(linalg::max_abs_diff(a.values(), b.values()) <= 1e-12);
        assert!(a.values().iter().any(|&v| v != 0.0));

        let g = Cochain::indicator(&c, 0, c.graph().vertex("4").unwrap());
        let def = leibniz_remainder(&c, &chi, &g).unwrap();
        let (explicit_d, _) = leibniz_remainder_explicit(&c, &chi, &g).unwrap();
        assert!(linalg::max_abs_diff(def.r_d.unwrap().values(), explicit_d.unwrap().values()) <= 1e-12);
    }

    #[test]
    fn leibniz_constants_are_bounded() {
        let c = complete(5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let chi = [1.0, 0.7, 0.2, 0.0, 0.5];
        for degree in 0..=4 {
            let f = Cochain::random(&c, degree, &mut rng);
            let r = leibniz_remainder(&c, &chi, &f).unwrap();
            if let Some(cd) = r.c_min_d {
                assert!(cd <= 1.0 / (degree + 2) as f64 + 1e-12, "degree {degree}: {cd}");
            }
            if let Some(cdelta) = r.c_min_delta {
                assert!(cdelta <= 1.0 / ((degree + 1) * (degree + 1)) as f64 + 1e-12, "degree {degree}: {cdelta}");
            }
        }
    }
}
