//! Weighted graphs and the weighted clique complexes built over them.
//!
//! Every unoriented simplex is stored once, as its strictly increasing vertex
//! tuple. Orientation is carried separately as the sign of the permutation
//! that sorts a given tuple (see [`canonical_sign`]). Simplices of each degree
//! are indexed densely in lexicographic vertex order, so matrix layouts built
//! from a complex are reproducible.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{HodgeError, Result};

/// Dense vertex index. The total order on vertices is the order of these indices.
pub type VertexId = usize;

/// Signature of a permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// `(-1)^k`.
    pub fn alternating(k: usize) -> Self {
        Sign::from_parity(k % 2 == 1)
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity((self == Sign::Minus) ^ (rhs == Sign::Minus))
    }
}

/// Sorts `tuple` and returns the sorted representative together with the
/// signature of the sorting permutation.
///
/// A cochain value on the input orientation is `sign * f(sorted)`.
pub fn canonical_sign(tuple: &[VertexId]) -> Result<(Vec<VertexId>, Sign)> {
    let mut sorted = tuple.to_vec();
    let mut swaps = 0usize;
    // insertion sort; tuples are short
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(HodgeError::DegenerateSimplex(w[0]));
    }
    Ok((sorted, Sign::from_parity(swaps % 2 == 1)))
}

/// An undirected graph with positive vertex weights `m0` and symmetric
/// nonnegative edge weights `m1`. An edge exists iff its weight is positive.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    by_label: BTreeMap<String, VertexId>,
    m0: Vec<f64>,
    adjacency: Vec<Vec<(VertexId, f64)>>,
    allow_loops: bool,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Permits `x ~ x` edges to be recorded. Complex construction still rejects them.
    pub fn allowing_loops(mut self) -> Self {
        self.allow_loops = true;
        self
    }

    pub fn add_vertex(&mut self, label: impl Into<String>, m0: f64) -> Result<VertexId> {
        let label = label.into();
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(HodgeError::InvalidWeight { what: format!("m0({label})"), value: m0 });
        }
        if self.by_label.contains_key(&label) {
            return Err(HodgeError::DuplicateVertex(label));
        }
        let id = self.labels.len();
        self.by_label.insert(label.clone(), id);
        self.labels.push(label);
        self.m0.push(m0);
        self.adjacency.push(Vec::new());
        Ok(id)
    }

    /// Sets `m1(u, v) = m1(v, u)`. A zero weight removes the edge.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, m1: f64) -> Result<()> {
        let n = self.labels.len();
        for x in [u, v] {
            if x >= n {
                return Err(HodgeError::UnknownVertex(x.to_string()));
            }
        }
        if !(m1 >= 0.0 && m1.is_finite()) {
            return Err(HodgeError::InvalidWeight { what: format!("m1({u},{v})"), value: m1 });
        }
        if u == v && !self.allow_loops {
            return Err(HodgeError::LoopNotAllowed(u));
        }
        self.set_half_edge(u, v, m1);
        if u != v {
            self.set_half_edge(v, u, m1);
        }
        Ok(())
    }

    fn set_half_edge(&mut self, u: VertexId, v: VertexId, m1: f64) {
        let row = &mut self.adjacency[u];
        match row.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(pos) if m1 > 0.0 => row[pos].1 = m1,
            Ok(pos) => {
                row.remove(pos);
            }
            Err(pos) if m1 > 0.0 => row.insert(pos, (v, m1)),
            Err(_) => {}
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.by_label.get(label).copied()
    }

    pub fn m0(&self, v: VertexId) -> f64 {
        self.m0[v]
    }

    pub fn m1(&self, u: VertexId, v: VertexId) -> f64 {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|pos| self.adjacency[u][pos].1)
            .unwrap_or(0.0)
    }

    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search_by_key(&v, |&(w, _)| w).is_ok()
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    /// Edges `(u, v, m1)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, row)| {
            row.iter().filter(move |&&(v, _)| v > u).map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn loops(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.num_vertices()).filter(|&v| self.is_adjacent(v, v))
    }

    /// Combinatorial graph distance from the nearest root; `None` when unreachable.
    pub fn distances_from(&self, roots: &[VertexId]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        for &r in roots {
            if dist[r].is_none() {
                dist[r] = Some(0);
                queue.push_back(r);
            }
        }
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub(crate) fn set_m0(&mut self, v: VertexId, m0: f64) {
        self.m0[v] = m0;
    }
}

/// How weights `m_i` for `i >= 2` are assigned to cliques.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightRule {
    /// Every higher clique gets the same positive weight.
    Constant(f64),
    /// Listed cliques (sorted vertex tuples) get the listed weight, all others `default`.
    /// A listed weight of zero removes that clique, and with it every clique containing it.
    Explicit { default: f64, table: BTreeMap<Vec<VertexId>, f64> },
    /// Rebuild with unit weights, then apply [`WeightedComplex::radial_weighting`].
    Radial { base: Vec<VertexId>, alpha: f64 },
}

impl Default for WeightRule {
    fn default() -> Self {
        WeightRule::Constant(1.0)
    }
}

impl WeightRule {
    fn validate(&self) -> Result<()> {
        let check_positive = |what: &str, w: f64| {
            if w > 0.0 && w.is_finite() {
                Ok(())
            } else {
                Err(HodgeError::InvalidWeight { what: what.to_string(), value: w })
            }
        };
        match self {
            WeightRule::Constant(c) => check_positive("constant weight rule", *c),
            WeightRule::Explicit { default, table } => {
                check_positive("default weight", *default)?;
                for (key, &w) in table {
                    if !(w >= 0.0 && w.is_finite()) {
                        return Err(HodgeError::InvalidWeight { what: format!("m{:?}", key), value: w });
                    }
                }
                Ok(())
            }
            WeightRule::Radial { base, alpha } => {
                check_positive("radial exponent", *alpha)?;
                if base.is_empty() {
                    return Err(HodgeError::param("radial weighting needs a nonempty base set"));
                }
                Ok(())
            }
        }
    }

    fn weight(&self, simplex: &[VertexId]) -> f64 {
        match self {
            WeightRule::Constant(c) => *c,
            WeightRule::Explicit { default, table } => table.get(simplex).copied().unwrap_or(*default),
            WeightRule::Radial { .. } => 1.0,
        }
    }
}

/// An oriented-by-sorting simplex of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex {
    pub degree: usize,
    pub index: usize,
    pub vertices: Vec<VertexId>,
}

/// One entry of `F(σ)`: a vertex `x` such that `σ ∪ {x}` is a stored simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coface {
    /// The added vertex.
    pub vertex: VertexId,
    /// Index of `σ ∪ {x}` one degree up.
    pub index: usize,
    /// Position of `x` inside the sorted coface. Moving `x` to the front of the
    /// tuple costs `(-1)^position`.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq)]
struct SimplexTable {
    width: usize,
    vertices: Vec<VertexId>,
    weights: Vec<f64>,
    /// `width` face indices per simplex; face `j` omits vertex `j`. Empty at degree 0.
    faces: Vec<usize>,
    coface_offsets: Vec<usize>,
    cofaces: Vec<Coface>,
}

impl SimplexTable {
    fn new(width: usize) -> Self {
        SimplexTable {
            width,
            vertices: Vec::new(),
            weights: Vec::new(),
            faces: Vec::new(),
            coface_offsets: vec![0],
            cofaces: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn get(&self, idx: usize) -> &[VertexId] {
        &self.vertices[idx * self.width..(idx + 1) * self.width]
    }

    fn find(&self, key: &[VertexId]) -> Option<usize> {
        debug_assert_eq!(key.len(), self.width);
        let pos = partition_point(self.len(), |i| self.get(i) < key);
        (pos < self.len() && self.get(pos) == key).then_some(pos)
    }

    fn push(&mut self, simplex: &[VertexId], weight: f64) {
        self.vertices.extend_from_slice(simplex);
        self.weights.push(weight);
    }
}

fn partition_point(len: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A finite weighted clique complex of maximal degree `n`.
///
/// Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComplex {
    graph: WeightedGraph,
    max_degree: usize,
    tables: Vec<SimplexTable>,
}

/// Builds the clique complex of `graph` up to degree `n`.
///
/// Degree 0 and 1 weights come from the graph; higher weights from `rule`.
pub fn build_clique_complex(graph: WeightedGraph, n: usize, rule: &WeightRule) -> Result<WeightedComplex> {
    if n < 1 {
        return Err(HodgeError::param("max degree must be at least 1"));
    }
    if let Some(v) = graph.loops().next() {
        return Err(HodgeError::LoopNotAllowed(v));
    }
    rule.validate()?;

    let mut tables = Vec::with_capacity(n + 1);
    let mut vertices = SimplexTable::new(1);
    for v in 0..graph.num_vertices() {
        vertices.push(&[v], graph.m0(v));
    }
    tables.push(vertices);
    let mut edges = SimplexTable::new(2);
    for (u, v, w) in graph.edges() {
        edges.push(&[u, v], w);
    }
    tables.push(edges);

    let mut candidate = Vec::new();
    for degree in 2..=n {
        let below = &tables[degree - 1];
        let mut table = SimplexTable::new(degree + 1);
        for idx in 0..below.len() {
            let sigma = below.get(idx);
            let last = *sigma.last().unwrap();
            for x in graph.neighbors(last).filter(|&x| x > last) {
                candidate.clear();
                candidate.extend_from_slice(sigma);
                candidate.push(x);
                // face j for j < degree omits an earlier vertex; face `degree` is sigma itself
                let closed = (0..degree).all(|j| {
                    let face: Vec<VertexId> =
                        candidate.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
                    below.find(&face).is_some()
                });
                if !closed {
                    continue;
                }
                let w = rule.weight(&candidate);
                if w > 0.0 {
                    table.push(&candidate, w);
                }
            }
        }
        tables.push(table);
    }

    let mut complex = WeightedComplex { graph, max_degree: n, tables };
    complex.link();
    if let WeightRule::Radial { base, alpha } = rule {
        complex = complex.radial_weighting(base, *alpha)?;
    }
    Ok(complex)
}

impl WeightedComplex {
    /// Assembles a complex from explicit sorted simplex lists and weights.
    ///
    /// `simplices[i]` holds the degree-`i` simplices (`i >= 2`) with their weights;
    /// degrees 0 and 1 are read from `graph`. Tables are re-sorted; every face of
    /// a listed simplex must itself be listed.
    pub fn from_tables(
        graph: WeightedGraph,
        max_degree: usize,
        mut simplices: Vec<Vec<(Vec<VertexId>, f64)>>,
    ) -> Result<Self> {
        if max_degree < 1 {
            return Err(HodgeError::param("max degree must be at least 1"));
        }
        if let Some(v) = graph.loops().next() {
            return Err(HodgeError::LoopNotAllowed(v));
        }
        simplices.resize(max_degree + 1, Vec::new());
        let mut tables = Vec::with_capacity(max_degree + 1);
        let mut vertices = SimplexTable::new(1);
        for v in 0..graph.num_vertices() {
            vertices.push(&[v], graph.m0(v));
        }
        tables.push(vertices);
        let mut edges = SimplexTable::new(2);
        for (u, v, w) in graph.edges() {
            edges.push(&[u, v], w);
        }
        tables.push(edges);
        for (degree, list) in simplices.iter_mut().enumerate().skip(2) {
            list.sort_by(|a, b| a.0.cmp(&b.0));
            list.dedup_by(|a, b| a.0 == b.0);
            let mut table = SimplexTable::new(degree + 1);
            for (s, w) in list.iter() {
                if s.len() != degree + 1 || s.windows(2).any(|p| p[0] >= p[1]) {
                    return Err(HodgeError::NotASimplex(s.clone()));
                }
                if !(*w > 0.0 && w.is_finite()) {
                    return Err(HodgeError::InvalidWeight { what: format!("m{:?}", s), value: *w });
                }
                let below = &tables[degree - 1];
                for j in 0..=degree {
                    let face: Vec<VertexId> =
                        s.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
                    if below.find(&face).is_none() {
                        return Err(HodgeError::NotASimplex(face));
                    }
                }
                table.push(s, *w);
            }
            tables.push(table);
        }
        let mut complex = WeightedComplex { graph, max_degree, tables };
        complex.link();
        Ok(complex)
    }

    /// Fills face and coface indices.
    fn link(&mut self) {
        for degree in 1..=self.max_degree {
            let (lower, upper) = self.tables.split_at_mut(degree);
            let below = &mut lower[degree - 1];
            let table = &mut upper[0];
            let width = table.width;
            let mut faces = Vec::with_capacity(table.len() * width);
            let mut buckets: Vec<Vec<Coface>> = vec![Vec::new(); below.len()];
            let mut face = Vec::with_capacity(width - 1);
            for idx in 0..table.len() {
                let tau = table.get(idx);
                for j in 0..width {
                    face.clear();
                    face.extend(tau.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v));
                    let f = below.find(&face).expect("face closure");
                    faces.push(f);
                    buckets[f].push(Coface { vertex: tau[j], index: idx, position: j });
                }
            }
            table.faces = faces;
            let mut offsets = Vec::with_capacity(below.len() + 1);
            let mut flat = Vec::new();
            offsets.push(0);
            for mut bucket in buckets {
                bucket.sort_by_key(|c| c.vertex);
                flat.extend(bucket);
                offsets.push(flat.len());
            }
            below.coface_offsets = offsets;
            below.cofaces = flat;
        }
        let top = &mut self.tables[self.max_degree];
        top.coface_offsets = vec![0; top.len() + 1];
        top.cofaces.clear();
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// `|P_i|`; zero above the maximal degree.
    pub fn count(&self, degree: usize) -> usize {
        self.tables.get(degree).map_or(0, SimplexTable::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.tables.iter().map(SimplexTable::len).collect()
    }

    pub fn total_simplices(&self) -> usize {
        self.tables.iter().map(SimplexTable::len).sum()
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub(crate) fn check_degree(&self, what: &'static str, degree: usize) -> Result<()> {
        if degree > self.max_degree {
            Err(HodgeError::DegreeOutOfRange { what, degree, max: self.max_degree })
        } else {
            Ok(())
        }
    }

    /// Sorted vertex tuple of simplex `idx` in degree `degree`.
    pub fn simplex(&self, degree: usize, idx: usize) -> &[VertexId] {
        self.tables[degree].get(idx)
    }

    pub fn simplices(&self, degree: usize) -> impl ExactSizeIterator<Item = &[VertexId]> + '_ {
        let table = &self.tables[degree];
        table.vertices.chunks_exact(table.width)
    }

    pub fn get(&self, degree: usize, idx: usize) -> Simplex {
        Simplex { degree, index: idx, vertices: self.simplex(degree, idx).to_vec() }
    }

    /// Index of a sorted tuple, if stored.
    pub fn find(&self, sorted: &[VertexId]) -> Option<usize> {
        let degree = sorted.len().checked_sub(1)?;
        self.tables.get(degree)?.find(sorted)
    }

    /// Resolves an arbitrary vertex ordering to its stored simplex and orientation sign.
    pub fn orient(&self, tuple: &[VertexId]) -> Result<(Simplex, Sign)> {
        let (sorted, sign) = canonical_sign(tuple)?;
        match self.find(&sorted) {
            Some(index) => Ok((Simplex { degree: sorted.len() - 1, index, vertices: sorted }, sign)),
            None => Err(HodgeError::NotASimplex(tuple.to_vec())),
        }
    }

    pub fn weight(&self, degree: usize, idx: usize) -> f64 {
        self.tables[degree].weights[idx]
    }

    pub fn weights(&self, degree: usize) -> &[f64] {
        &self.tables[degree].weights
    }

    /// Face indices (one degree down) of a simplex; face `j` omits vertex `j`.
    pub fn faces(&self, degree: usize, idx: usize) -> &[usize] {
        if degree == 0 {
            return &[];
        }
        let table = &self.tables[degree];
        &table.faces[idx * table.width..(idx + 1) * table.width]
    }

    /// `F(σ)` restricted to stored cofaces, ordered by added vertex.
    pub fn cofaces(&self, degree: usize, idx: usize) -> &[Coface] {
        let table = &self.tables[degree];
        &table.cofaces[table.coface_offsets[idx]..table.coface_offsets[idx + 1]]
    }

    pub fn common_neighbors(&self, degree: usize, idx: usize) -> impl Iterator<Item = VertexId> + '_ {
        self.cofaces(degree, idx).iter().map(|c| c.vertex)
    }

    /// `(1/m(σ)) Σ_{x ∈ F(σ)} m(σ ∪ {x})`; zero at the top degree.
    pub fn weighted_degree(&self, degree: usize, idx: usize) -> f64 {
        if degree >= self.max_degree {
            return 0.0;
        }
        let up = &self.tables[degree + 1].weights;
        let sum: f64 = self.cofaces(degree, idx).iter().map(|c| up[c.index]).sum();
        sum / self.weight(degree, idx)
    }

    /// Simplices of the same degree sharing exactly `degree` vertices with `idx`.
    pub fn simplex_neighbors(&self, degree: usize, idx: usize) -> Vec<usize> {
        if degree == 0 {
            return (0..self.count(0)).filter(|&j| j != idx).collect();
        }
        let mut out: Vec<usize> = self
            .faces(degree, idx)
            .iter()
            .flat_map(|&f| self.cofaces(degree - 1, f).iter().map(|c| c.index))
            .filter(|&other| other != idx)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Induced subcomplex on the kept vertices; weights are carried over and
    /// vertices keep their relative order.
    pub fn induced(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.num_vertices() {
            return Err(HodgeError::DimensionMismatch { expected: self.num_vertices(), got: keep.len() });
        }
        let mut remap = vec![usize::MAX; keep.len()];
        let mut graph = WeightedGraph::new();
        for v in (0..keep.len()).filter(|&v| keep[v]) {
            remap[v] = graph.add_vertex(self.graph.label(v), self.graph.m0(v))?;
        }
        for (u, v, w) in self.graph.edges() {
            if keep[u] && keep[v] {
                graph.add_edge(remap[u], remap[v], w)?;
            }
        }
        let mut higher = vec![Vec::new(); self.max_degree + 1];
        for (degree, list) in higher.iter_mut().enumerate().skip(2) {
            for (idx, s) in self.simplices(degree).enumerate() {
                if s.iter().all(|&v| keep[v]) {
                    list.push((s.iter().map(|&v| remap[v]).collect(), self.weight(degree, idx)));
                }
            }
        }
        WeightedComplex::from_tables(graph, self.max_degree, higher)
    }

    /// Replaces every weight by `m_i(σ) = (1 + max_{x ∈ σ} d(x, O_0))^{-α}`.
    ///
    /// Fails if some vertex is unreachable from the base set.
    pub fn radial_weighting(&self, base: &[VertexId], alpha: f64) -> Result<Self> {
        if base.is_empty() {
            return Err(HodgeError::param("radial weighting needs a nonempty base set"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(HodgeError::InvalidWeight { what: "radial exponent".into(), value: alpha });
        }
        if let Some(&bad) = base.iter().find(|&&v| v >= self.num_vertices()) {
            return Err(HodgeError::UnknownVertex(bad.to_string()));
        }
        let dist = self.graph.distances_from(base);
        if let Some(v) = dist.iter().position(Option::is_none) {
            return Err(HodgeError::param(format!(
                "vertex `{}` is unreachable from the radial base set",
                self.graph.label(v)
            )));
        }
        let radial = |s: &[VertexId]| {
            let far = s.iter().map(|&v| dist[v].unwrap()).max().unwrap();
            (1.0 + far as f64).powf(-alpha)
        };
        let mut out = self.clone();
        for v in 0..self.num_vertices() {
            out.graph.set_m0(v, radial(&[v]));
        }
        let edges: Vec<_> = self.graph.edges().collect();
        for (u, v, _) in edges {
            out.graph.add_edge(u, v, radial(&[u, v]))?;
        }
        for degree in 0..=self.max_degree {
            let table = &mut out.tables[degree];
            for idx in 0..table.len() {
                let w = radial(table.get(idx));
                table.weights[idx] = w;
            }
        }
        Ok(out)
    }

    /// Copy with the weights of selected simplices multiplied by `factor`.
    ///
    /// `select(degree, vertices)` decides which simplices are rescaled; graph weights
    /// follow the degree 0 and 1 tables.
    pub fn scale_weights(&self, factor: f64, mut select: impl FnMut(usize, &[VertexId]) -> bool) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(HodgeError::InvalidWeight { what: "weight scale".into(), value: factor });
        }
        let mut out = self.clone();
        for degree in 0..=self.max_degree {
            let table = &mut out.tables[degree];
            for idx in 0..table.len() {
                if select(degree, table.get(idx)) {
                    table.weights[idx] *= factor;
                }
            }
        }
        for v in 0..self.num_vertices() {
            let w = out.tables[0].weights[v];
            out.graph.set_m0(v, w);
        }
        for idx in 0..out.tables[1].len() {
            let (u, v) = (out.tables[1].get(idx)[0], out.tables[1].get(idx)[1]);
            let w = out.tables[1].weights[idx];
            out.graph.add_edge(u, v, w)?;
        }
        Ok(out)
    }
}
