//! Cochains, the coboundary `d`, the codifferential `δ`, the Gauss–Bonnet
//! operator `D = d + δ` and the Hodge Laplacian blocks `L_i`.
//!
//! Degrees are indexed by source: `d` of degree `i` maps `C^i → C^{i+1}` and
//! `δ` of degree `i` maps `C^i → C^{i-1}`. All spaces carry the weighted inner
//! product `⟨f, g⟩_{m_i} = Σ_σ m_i(σ) f(σ) g(σ)` over sorted representatives.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sprs::TriMat;

use crate::complex::{Sign, VertexId, WeightedComplex};
use crate::error::{HodgeError, Result};
use crate::linalg::{self, SparseMatrix};

/// Real-valued `i`-cochain, indexed by the sorted `i`-simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    degree: usize,
    values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(complex: &WeightedComplex, degree: usize) -> Self {
        Cochain { degree, values: vec![0.0; complex.count(degree)] }
    }

    pub fn from_values(complex: &WeightedComplex, degree: usize, values: Vec<f64>) -> Result<Self> {
        complex.check_degree("cochain", degree)?;
        if values.len() != complex.count(degree) {
            return Err(HodgeError::DimensionMismatch { expected: complex.count(degree), got: values.len() });
        }
        Ok(Cochain { degree, values })
    }

    pub fn indicator(complex: &WeightedComplex, degree: usize, idx: usize) -> Self {
        let mut c = Cochain::zeros(complex, degree);
        c.values[idx] = 1.0;
        c
    }

    /// Entries drawn uniformly from `[-1, 1]`.
    pub fn random(complex: &WeightedComplex, degree: usize, rng: &mut impl Rng) -> Self {
        let values = (0..complex.count(degree)).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Cochain { degree, values }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value on an arbitrarily ordered vertex tuple: `f(σπ) = sign(π) f(σ)`.
    pub fn value_on(&self, complex: &WeightedComplex, tuple: &[VertexId]) -> Result<f64> {
        let (simplex, sign) = complex.orient(tuple)?;
        if simplex.degree != self.degree {
            return Err(HodgeError::DimensionMismatch { expected: self.degree + 1, got: tuple.len() });
        }
        Ok(sign.value() * self.values[simplex.index])
    }

    pub fn norm_sq(&self, complex: &WeightedComplex) -> f64 {
        linalg::weighted_dot(complex.weights(self.degree), &self.values, &self.values)
    }

    fn check(&self, complex: &WeightedComplex) -> Result<()> {
        complex.check_degree("cochain", self.degree)?;
        if self.values.len() != complex.count(self.degree) {
            return Err(HodgeError::DimensionMismatch { expected: complex.count(self.degree), got: self.values.len() });
        }
        Ok(())
    }
}

/// `⟨f, g⟩_{m_i}`.
pub fn inner(complex: &WeightedComplex, f: &Cochain, g: &Cochain) -> Result<f64> {
    f.check(complex)?;
    g.check(complex)?;
    if f.degree != g.degree {
        return Err(HodgeError::DimensionMismatch { expected: f.degree, got: g.degree });
    }
    Ok(linalg::weighted_dot(complex.weights(f.degree), &f.values, &g.values))
}

/// `(df)(x_0, …, x_{i+1}) = Σ_j (-1)^j f(x_0, …, x̂_j, …, x_{i+1})`.
pub fn coboundary_apply(complex: &WeightedComplex, f: &Cochain) -> Result<Cochain> {
    f.check(complex)?;
    let i = f.degree;
    if i >= complex.max_degree() {
        return Err(HodgeError::DegreeOutOfRange { what: "coboundary source", degree: i, max: complex.max_degree() - 1 });
    }
    let values = (0..complex.count(i + 1))
        .map(|tau| {
            complex
                .faces(i + 1, tau)
                .iter()
                .enumerate()
                .map(|(j, &face)| Sign::alternating(j).value() * f.values[face])
                .sum()
        })
        .collect();
    Ok(Cochain { degree: i + 1, values })
}

/// `(δg)(σ) = (1/m(σ)) Σ_{x ∈ F(σ)} m(σ ∪ {x}) g(x, σ)`: the weighted adjoint of `d`.
pub fn codifferential_apply(complex: &WeightedComplex, g: &Cochain) -> Result<Cochain> {
    g.check(complex)?;
    let i = g.degree;
    if i == 0 {
        return Err(HodgeError::DegreeOutOfRange { what: "codifferential source (needs degree >= 1)", degree: 0, max: complex.max_degree() });
    }
    let upper = complex.weights(i);
    let values = (0..complex.count(i - 1))
        .map(|sigma| {
            let s: f64 = complex
                .cofaces(i - 1, sigma)
                .iter()
                .map(|c| Sign::alternating(c.position).value() * upper[c.index] * g.values[c.index])
                .sum();
            s / complex.weight(i - 1, sigma)
        })
        .collect();
    Ok(Cochain { degree: i - 1, values })
}

/// Component `i` of the output is `d f_{i-1} + δ f_{i+1}`.
pub fn gauss_bonnet_apply(complex: &WeightedComplex, forms: &[Cochain]) -> Result<Vec<Cochain>> {
    let n = complex.max_degree();
    if forms.len() != n + 1 {
        return Err(HodgeError::DimensionMismatch { expected: n + 1, got: forms.len() });
    }
    for (i, f) in forms.iter().enumerate() {
        if f.degree != i {
            return Err(HodgeError::DimensionMismatch { expected: i, got: f.degree });
        }
        f.check(complex)?;
    }
    let mut out: Vec<Cochain> = (0..=n).map(|i| Cochain::zeros(complex, i)).collect();
    for i in 0..=n {
        if i > 0 {
            let up = coboundary_apply(complex, &forms[i - 1])?;
            accumulate(&mut out[i], &up);
        }
        if i < n {
            let down = codifferential_apply(complex, &forms[i + 1])?;
            accumulate(&mut out[i], &down);
        }
    }
    Ok(out)
}

fn accumulate(acc: &mut Cochain, other: &Cochain) {
    for (a, b) in acc.values.iter_mut().zip(&other.values) {
        *a += b;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Coboundary,
    Codifferential,
    GaussBonnet,
    Laplacian,
}

/// Sparse matrix realization of an operator, with rows and columns indexed by
/// the simplex tables of the target and source degrees.
#[derive(Clone, Debug)]
pub struct OperatorBlock {
    pub kind: OperatorKind,
    /// `None` for the Gauss–Bonnet operator, which acts on all degrees at once.
    pub source_degree: Option<usize>,
    pub target_degree: Option<usize>,
    pub matrix: SparseMatrix,
    /// Start of each degree block in the total space (Gauss–Bonnet only; otherwise empty).
    pub offsets: Vec<usize>,
}

impl OperatorBlock {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::matvec(&self.matrix, x)
    }

    /// Writes the matrix in coordinate format (1-based `row col value`, shape header).
    pub fn write_coordinate(&self, path: &Path) -> Result<()> {
        sprs::io::write_matrix_market(path, &self.matrix)?;
        Ok(())
    }

    /// Same coordinate format, to any writer.
    pub fn write_coordinate_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.matrix.rows(), self.matrix.cols(), self.matrix.nnz())?;
        let mut entries: Vec<_> = self.matrix.iter().map(|(&v, (r, c))| (r, c, v)).collect();
        entries.sort_by_key(|&(r, c, _)| (c, r));
        for (r, c, v) in entries {
            writeln!(out, "{} {} {:.17e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

pub(crate) fn coboundary_matrix(complex: &WeightedComplex, i: usize) -> SparseMatrix {
    let rows = complex.count(i + 1);
    let cols = complex.count(i);
    let mut tri = TriMat::with_capacity((rows, cols), rows * (i + 2));
    for tau in 0..rows {
        for (j, &face) in complex.faces(i + 1, tau).iter().enumerate() {
            tri.add_triplet(tau, face, Sign::alternating(j).value());
        }
    }
    tri.to_csr()
}

pub(crate) fn codifferential_matrix(complex: &WeightedComplex, i: usize) -> SparseMatrix {
    let rows = complex.count(i - 1);
    let cols = complex.count(i);
    let upper = complex.weights(i);
    let mut tri = TriMat::with_capacity((rows, cols), cols * (i + 1));
    for sigma in 0..rows {
        let m = complex.weight(i - 1, sigma);
        for c in complex.cofaces(i - 1, sigma) {
            tri.add_triplet(sigma, c.index, Sign::alternating(c.position).value() * upper[c.index] / m);
        }
    }
    tri.to_csr()
}

pub(crate) fn laplacian_matrix(complex: &WeightedComplex, i: usize) -> SparseMatrix {
    let n = complex.max_degree();
    let dim = complex.count(i);
    let mut total = linalg::empty(dim, dim);
    if i < n {
        let up = linalg::product(&codifferential_matrix(complex, i + 1), &coboundary_matrix(complex, i));
        total = linalg::sum(&total, &up);
    }
    if i > 0 {
        let down = linalg::product(&coboundary_matrix(complex, i - 1), &codifferential_matrix(complex, i));
        total = linalg::sum(&total, &down);
    }
    total
}

fn degree_offsets(complex: &WeightedComplex) -> Vec<usize> {
    let mut offsets = vec![0];
    for i in 0..=complex.max_degree() {
        offsets.push(offsets[i] + complex.count(i));
    }
    offsets
}

pub(crate) fn gauss_bonnet_matrix(complex: &WeightedComplex) -> (SparseMatrix, Vec<usize>) {
    let n = complex.max_degree();
    let offsets = degree_offsets(complex);
    let dim = offsets[n + 1];
    let mut tri = TriMat::new((dim, dim));
    for i in 0..n {
        let d = coboundary_matrix(complex, i);
        for (&v, (r, c)) in d.iter() {
            tri.add_triplet(offsets[i + 1] + r, offsets[i] + c, v);
        }
        let delta = codifferential_matrix(complex, i + 1);
        for (&v, (r, c)) in delta.iter() {
            tri.add_triplet(offsets[i] + r, offsets[i + 1] + c, v);
        }
    }
    (tri.to_csr(), offsets)
}

/// Assembles `d`, `δ`, `L_i` (for the given source degree) or the whole `D`
/// (the degree argument is ignored for [`OperatorKind::GaussBonnet`]).
pub fn assemble_block(complex: &WeightedComplex, kind: OperatorKind, degree: usize) -> Result<OperatorBlock> {
    let n = complex.max_degree();
    let out_of_range = |what| Err(HodgeError::DegreeOutOfRange { what, degree, max: n });
    let block = |matrix, source, target| OperatorBlock {
        kind,
        source_degree: Some(source),
        target_degree: Some(target),
        matrix,
        offsets: Vec::new(),
    };
    match kind {
        OperatorKind::Coboundary if degree < n => Ok(block(coboundary_matrix(complex, degree), degree, degree + 1)),
        OperatorKind::Coboundary => out_of_range("coboundary source"),
        OperatorKind::Codifferential if (1..=n).contains(&degree) => {
            Ok(block(codifferential_matrix(complex, degree), degree, degree - 1))
        }
        OperatorKind::Codifferential => out_of_range("codifferential source"),
        OperatorKind::Laplacian if degree <= n => Ok(block(laplacian_matrix(complex, degree), degree, degree)),
        OperatorKind::Laplacian => out_of_range("laplacian block"),
        OperatorKind::GaussBonnet => {
            let (matrix, offsets) = gauss_bonnet_matrix(complex);
            Ok(OperatorBlock { kind, source_degree: None, target_degree: None, matrix, offsets })
        }
    }
}

/// Max over `trials` seeded random pairs of `|⟨df, g⟩ - ⟨f, δg⟩|` at the given source degree.
pub fn adjointness_check(complex: &WeightedComplex, degree: usize, trials: usize, seed: u64) -> Result<f64> {
    if degree >= complex.max_degree() {
        return Err(HodgeError::DegreeOutOfRange { what: "adjointness source", degree, max: complex.max_degree() - 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f = Cochain::random(complex, degree, &mut rng);
        let g = Cochain::random(complex, degree + 1, &mut rng);
        let lhs = inner(complex, &coboundary_apply(complex, &f)?, &g)?;
        let rhs = inner(complex, &f, &codifferential_apply(complex, &g)?)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Largest entry of `d_{i+1} d_i` and of `δ_{i+1} δ_{i+2}` over all degrees where
/// the compositions exist.
pub fn nilpotency_residual(complex: &WeightedComplex) -> (f64, f64) {
    let n = complex.max_degree();
    let mut dd = 0.0f64;
    let mut deltadelta = 0.0f64;
    for i in 0..n.saturating_sub(1) {
        let prod = linalg::product(&coboundary_matrix(complex, i + 1), &coboundary_matrix(complex, i));
        dd = dd.max(linalg::max_abs_entry(&prod));
        let prod = linalg::product(&codifferential_matrix(complex, i + 1), &codifferential_matrix(complex, i + 2));
        deltadelta = deltadelta.max(linalg::max_abs_entry(&prod));
    }
    (dd, deltadelta)
}

/// Compares `D²` with `⊕ L_i`: returns (largest entry outside the diagonal
/// degree blocks, largest deviation of a diagonal block from `L_i`).
pub fn block_diagonality_residual(complex: &WeightedComplex) -> (f64, f64) {
    let (d, offsets) = gauss_bonnet_matrix(complex);
    let square = linalg::product(&d, &d);
    let block_of = |k: usize| offsets.partition_point(|&o| o <= k) - 1;
    let mut off_block = 0.0f64;
    let n = complex.max_degree();
    let mut diag: Vec<TriMat<f64>> =
        (0..=n).map(|i| TriMat::new((complex.count(i), complex.count(i)))).collect();
    for (&v, (r, c)) in square.iter() {
        let (br, bc) = (block_of(r), block_of(c));
        if br != bc {
            off_block = off_block.max(v.abs());
        } else {
            diag[br].add_triplet(r - offsets[br], c - offsets[bc], v);
        }
    }
    let mut block_dev = 0.0f64;
    for (i, tri) in diag.into_iter().enumerate() {
        let got = tri.to_csr::<usize>();
        let expected = laplacian_matrix(complex, i);
        let diff = &got - &expected;
        block_dev = block_dev.max(linalg::max_abs_entry(&diff));
    }
    (off_block, block_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_clique_complex, WeightRule, WeightedGraph};

    fn graph(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_vertex(format!("{}", (b'a' + i as u8) as char), 1.0).unwrap();
        }
        for &(u, v) in edges {
            g.add_edge(u, v, 1.0).unwrap();
        }
        g
    }

    fn k(n: usize) -> WeightedComplex {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        build_clique_complex(graph(n, &edges), (n - 1).max(1), &WeightRule::default()).unwrap()
    }

    #[test]
    fn coboundary_of_vertex_indicator_on_an_edge() {
        let c = build_clique_complex(graph(2, &[(0, 1)]), 1, &WeightRule::default()).unwrap();
        let df = coboundary_apply(&c, &Cochain::indicator(&c, 0, 1)).unwrap();
        assert_eq!(df.values(), &[1.0]);
    }

    #[test]
    fn coboundary_of_edge_indicator_on_k3() {
        let c = k(3);
        let ab = c.find(&[0, 1]).unwrap();
        let df = coboundary_apply(&c, &Cochain::indicator(&c, 1, ab)).unwrap();
        // faces of (a,b,c): (b,c) +, (a,c) -, (a,b) +
        assert_eq!(df.values(), &[1.0]);
    }

    #[test]
    fn codifferential_on_an_edge_is_the_adjoint() {
        let c = build_clique_complex(graph(2, &[(0, 1)]), 1, &WeightRule::default()).unwrap();
        let g = Cochain::from_values(&c, 1, vec![1.0]).unwrap();
        let dg = codifferential_apply(&c, &g).unwrap();
        // ⟨d 1_b, g⟩ = 1 forces (δg)(b) = 1
        assert_eq!(dg.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn codifferential_of_triangle_indicator() {
        let c = k(3);
        let g = Cochain::indicator(&c, 2, 0);
        let dg = codifferential_apply(&c, &g).unwrap();
        assert_eq!(dg.value_on(&c, &[0, 1]).unwrap(), 1.0);
        assert_eq!(dg.value_on(&c, &[1, 2]).unwrap(), 1.0);
        assert_eq!(dg.value_on(&c, &[0, 2]).unwrap(), -1.0);
        // matrix route
        let m = assemble_block(&c, OperatorKind::Codifferential, 2).unwrap();
        assert_eq!(m.apply(g.values()), dg.values());
    }

    #[test]
    fn degree_errors() {
        let c = k(3);
        assert!(codifferential_apply(&c, &Cochain::zeros(&c, 0)).is_err());
        assert!(coboundary_apply(&c, &Cochain::zeros(&c, 2)).is_err());
        assert!(assemble_block(&c, OperatorKind::Laplacian, 3).is_err());
        assert!(assemble_block(&c, OperatorKind::Coboundary, 2).is_err());
        assert!(assemble_block(&c, OperatorKind::Codifferential, 0).is_err());
        assert!(gauss_bonnet_apply(&c, &[Cochain::zeros(&c, 0)]).is_err());
        let bad = Cochain { degree: 1, values: vec![0.0; 2] };
        assert!(coboundary_apply(&c, &bad).is_err());
    }

    #[test]
    fn adjointness_on_k3_and_k4() {
        assert!(adjointness_check(&k(3), 0, 100, 0).unwrap() <= 1e-12);
        assert!(adjointness_check(&k(3), 1, 100, 0).unwrap() <= 1e-12);
        assert!(adjointness_check(&k(4), 1, 100, 0).unwrap() <= 1e-12);
        assert!(adjointness_check(&k(4), 2, 100, 7).unwrap() <= 1e-12);
    }

    #[test]
    fn laplacian_zero_on_k3_matches_graph_laplacian() {
        let c = k(3);
        let l0 = linalg::to_dense(&assemble_block(&c, OperatorKind::Laplacian, 0).unwrap().matrix);
        for r in 0..3 {
            for col in 0..3 {
                let expected = if r == col { 2.0 } else { -1.0 };
                assert_eq!(l0[(r, col)], expected);
            }
        }
    }

    #[test]
    fn nilpotent_and_block_diagonal_on_k5() {
        let c = k(5);
        let (dd, delta) = nilpotency_residual(&c);
        assert_eq!(dd, 0.0);
        assert!(delta <= 1e-12);
        let (off, dev) = block_diagonality_residual(&c);
        assert!(off <= 1e-12 && dev <= 1e-12, "{off} {dev}");
    }

    #[test]
    fn gauss_bonnet_zero_and_edge() {
        let c = build_clique_complex(graph(2, &[(0, 1)]), 1, &WeightRule::default()).unwrap();
        let zero = vec![Cochain::zeros(&c, 0), Cochain::zeros(&c, 1)];
        let out = gauss_bonnet_apply(&c, &zero).unwrap();
        assert!(out.iter().all(|f| f.values().iter().all(|&v| v == 0.0)));
        let forms = vec![Cochain::indicator(&c, 0, 1), Cochain::zeros(&c, 1)];
        let out = gauss_bonnet_apply(&c, &forms).unwrap();
        assert_eq!(out[1].values(), &[1.0]);
        assert_eq!(out[0].values(), &[0.0, 0.0]);
    }

    #[test]
    fn gauss_bonnet_matches_block_matrix() {
        let c = k(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let forms: Vec<_> = (0..=2).map(|i| Cochain::random(&c, i, &mut rng)).collect();
        let out = gauss_bonnet_apply(&c, &forms).unwrap();
        let block = assemble_block(&c, OperatorKind::GaussBonnet, 0).unwrap();
        let flat: Vec<f64> = forms.iter().flat_map(|f| f.values().iter().copied()).collect();
        let via_matrix = block.apply(&flat);
        let via_apply: Vec<f64> = out.iter().flat_map(|f| f.values().iter().copied()).collect();
        assert!(linalg::max_abs_diff(&via_matrix, &via_apply) <= 1e-12);
    }

    #[test]
    fn hilbert_norm_conventions_agree_on_k3() {
        // the (i+1)!-normalized sum over every ordering equals the sum over sorted representatives
        let c = k(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for degree in 0..=2 {
            let f = Cochain::random(&c, degree, &mut rng);
            let mut all_orderings = 0.0;
            let mut factorial = 1.0;
            for k in 1..=degree + 1 {
                factorial *= k as f64;
            }
            for (idx, s) in c.simplices(degree).enumerate() {
                for perm in permutations(s) {
                    let v = f.value_on(&c, &perm).unwrap();
                    all_orderings += c.weight(degree, idx) * v * v;
                }
            }
            assert!((all_orderings / factorial - f.norm_sq(&c)).abs() < 1e-14);
        }
    }

    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }

    #[test]
    fn coordinate_export_is_one_based() {
        let c = k(3);
        let block = assemble_block(&c, OperatorKind::Coboundary, 1).unwrap();
        let mut buf = Vec::new();
        block.write_coordinate_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("%%MatrixMarket"));
        assert_eq!(lines.next().unwrap(), "1 3 3");
        assert!(lines.next().unwrap().starts_with("1 1 "));
    }
}
