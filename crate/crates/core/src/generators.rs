//! Deterministic constructors for the example families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{build_clique_complex, VertexId, WeightRule, WeightedComplex, WeightedGraph};
use crate::divergence::{LayerDecomposition, LayerOrigin, PowerLaw};
use crate::error::{HodgeError, Result};
use crate::spectral::SIMPLEX_LIMIT;

/// Edge rule for integer lattice patches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    /// `x ~ x ± e_j`; bipartite, hence no triangles.
    NearestNeighbor,
    /// `x ~ x ± Σ_{j∈S} e_j` for nonempty `S`; the clique complex is the
    /// Freudenthal triangulation of the cubes.
    #[default]
    Freudenthal,
}

/// Axis-aligned box `lo..=hi` in lattice coordinates; empty if some `lo > hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl BoxRegion {
    pub fn cube(d: usize, radius: i64) -> Self {
        BoxRegion { lo: vec![-radius; d], hi: vec![radius; d] }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// Which depths carry tetrahedra in the refined tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    #[default]
    Even,
    Odd,
    All,
    None,
}

impl Parity {
    fn admits(self, depth: usize) -> bool {
        match self {
            Parity::Even => depth % 2 == 0,
            Parity::Odd => depth % 2 == 1,
            Parity::All => true,
            Parity::None => false,
        }
    }
}

/// Which vertices of a tree branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeShape {
    /// Every vertex above the truncation depth has `off(n)` children.
    Full,
    /// Only the first `width` vertices of each depth branch; the rest are leaves.
    Spine { width: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    #[serde(alias = "lattice_zd")]
    Lattice {
        d: usize,
        n: usize,
        radius: i64,
        #[serde(default)]
        adjacency: Adjacency,
    },
    PerturbedLattice {
        d: usize,
        n: usize,
        radius: i64,
        #[serde(default)]
        adjacency: Adjacency,
        /// Degree-`n` simplices not contained in the region are removed.
        region: BoxRegion,
    },
    AlternatingTriangulation { radius: i64 },
    #[serde(alias = "truncated_tree")]
    TruncatedBinaryTree {
        /// Triangles `(v, v0, v1)` exist for `|v| <= triangle_depth`.
        triangle_depth: usize,
        /// Tree truncation; defaults to `triangle_depth + 1`.
        #[serde(default)]
        depth: Option<usize>,
    },
    /// Graph tree with `off(n)` children per depth-`n` vertex.
    RadialTree {
        depth: usize,
        off: PowerLaw,
        #[serde(default)]
        shape: Option<TreeShape>,
    },
    /// Tree with sibling triangles and parity-selected tetrahedra.
    #[serde(rename = "example_5_2", alias = "example52", alias = "example_5_2_complex")]
    Example52 {
        depth: usize,
        #[serde(default = "binary")]
        off: PowerLaw,
        #[serde(default)]
        tet_parity: Parity,
        #[serde(default)]
        shape: Option<TreeShape>,
    },
}

fn binary() -> PowerLaw {
    PowerLaw::constant(2.0)
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::Lattice { .. } => "lattice",
            GeneratorSpec::PerturbedLattice { .. } => "perturbed_lattice",
            GeneratorSpec::AlternatingTriangulation { .. } => "alternating_triangulation",
            GeneratorSpec::TruncatedBinaryTree { .. } => "truncated_binary_tree",
            GeneratorSpec::RadialTree { .. } => "radial_tree",
            GeneratorSpec::Example52 { .. } => "example_5_2",
        }
    }

    pub fn generate(&self) -> Result<Generated> {
        match self {
            GeneratorSpec::Lattice { d, n, radius, adjacency } => gen_lattice(*d, *n, *radius, *adjacency),
            GeneratorSpec::PerturbedLattice { d, n, radius, adjacency, region } => {
                gen_perturbed_lattice(*d, *n, *radius, *adjacency, region)
            }
            GeneratorSpec::AlternatingTriangulation { radius } => gen_alternating_triangulation(*radius),
            GeneratorSpec::TruncatedBinaryTree { triangle_depth, depth } => {
                gen_truncated_tree(*triangle_depth, depth.unwrap_or(triangle_depth + 1))
            }
            GeneratorSpec::RadialTree { depth, off, shape } => gen_radial_tree(*depth, *off, *shape),
            GeneratorSpec::Example52 { depth, off, tet_parity, shape } => {
                gen_example_5_2(*depth, *off, *tet_parity, *shape)
            }
        }
    }
}

/// A generated truncation with its natural exhaustion data.
#[derive(Clone, Debug)]
pub struct Generated {
    pub complex: WeightedComplex,
    /// Depth layers for trees, graph distance from the origin for lattices.
    pub layers: LayerDecomposition,
    /// Base set of the exhaustion (lattice origin or tree root).
    pub roots: Vec<VertexId>,
    /// Lattice coordinates, when the family has them.
    pub coords: Option<Vec<Vec<i64>>>,
    /// Edges added beyond the family's listed ones so that stated simplices are cliques.
    pub added_edges: Vec<(String, String)>,
    /// The spec with defaults resolved.
    pub spec: GeneratorSpec,
}

impl Generated {
    /// Reweights by `(1 + max_j d(x_j, roots))^{-α}`.
    pub fn with_radial_weighting(mut self, alpha: f64) -> Result<Self> {
        self.complex = radial_weighting(&self.complex, &self.roots, alpha)?;
        Ok(self)
    }
}

pub fn radial_weighting(complex: &WeightedComplex, base: &[VertexId], alpha: f64) -> Result<WeightedComplex> {
    complex.radial_weighting(base, alpha)
}

struct Coord<'a>(&'a [i64]);

impl fmt::Display for Coord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

fn check_size(count: usize) -> Result<()> {
    if count > SIMPLEX_LIMIT {
        return Err(HodgeError::TooLarge(count, SIMPLEX_LIMIT));
    }
    Ok(())
}

struct Patch {
    graph: WeightedGraph,
    coords: Vec<Vec<i64>>,
    origin: VertexId,
}

/// Vertices of `{-R..R}^d` in lexicographic order, without edges.
fn lattice_vertices(d: usize, radius: i64) -> Result<Patch> {
    if radius <= 0 {
        return Err(HodgeError::param("lattice radius must be positive"));
    }
    if d == 0 {
        return Err(HodgeError::param("lattice dimension must be positive"));
    }
    let side = (2 * radius + 1) as usize;
    let count = (side as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    check_size(usize::try_from(count).unwrap_or(usize::MAX))?;
    let count = count as usize;
    let mut graph = WeightedGraph::new();
    let mut coords = Vec::with_capacity(count);
    for flat in 0..count {
        let mut x = vec![0i64; d];
        let mut rest = flat;
        for c in (0..d).rev() {
            x[c] = (rest % side) as i64 - radius;
            rest /= side;
        }
        graph.add_vertex(Coord(&x).to_string(), 1.0)?;
        coords.push(x);
    }
    let origin = graph.vertex(&Coord(&vec![0; d]).to_string()).expect("origin in patch");
    Ok(Patch { graph, coords, origin })
}

fn lattice_index(x: &[i64], radius: i64) -> Option<usize> {
    let side = 2 * radius + 1;
    let mut idx = 0i64;
    for &c in x {
        if c < -radius || c > radius {
            return None;
        }
        idx = idx * side + (c + radius);
    }
    Some(idx as usize)
}

fn lattice_patch(d: usize, radius: i64, adjacency: Adjacency) -> Result<Patch> {
    let mut patch = lattice_vertices(d, radius)?;
    let steps: Vec<Vec<i64>> = match adjacency {
        Adjacency::NearestNeighbor => (0..d)
            .map(|j| {
                let mut e = vec![0; d];
                e[j] = 1;
                e
            })
            .collect(),
        Adjacency::Freudenthal => {
            (1u64..(1 << d)).map(|mask| (0..d).map(|j| ((mask >> j) & 1) as i64).collect()).collect()
        }
    };
    for u in 0..patch.coords.len() {
        for step in &steps {
            let y: Vec<i64> = patch.coords[u].iter().zip(step).map(|(a, b)| a + b).collect();
            if let Some(v) = lattice_index(&y, radius) {
                patch.graph.add_edge(u, v, 1.0)?;
            }
        }
    }
    Ok(patch)
}

fn lattice_layers(graph: &WeightedGraph, origin: VertexId) -> Result<LayerDecomposition> {
    LayerDecomposition::by_distance(graph, &[origin])
}

/// Clique complex of the lattice patch `{-R..R}^d`, unit weights.
pub fn gen_lattice(d: usize, n: usize, radius: i64, adjacency: Adjacency) -> Result<Generated> {
    if n < 1 || n > d {
        return Err(HodgeError::param(format!("lattice needs d >= n >= 1, got d={d}, n={n}")));
    }
    let patch = lattice_patch(d, radius, adjacency)?;
    let layers = lattice_layers(&patch.graph, patch.origin)?;
    let complex = build_clique_complex(patch.graph, n, &WeightRule::default())?;
    Ok(Generated {
        complex,
        layers,
        roots: vec![patch.origin],
        coords: Some(patch.coords),
        added_edges: Vec::new(),
        spec: GeneratorSpec::Lattice { d, n, radius, adjacency },
    })
}

/// Lattice with every degree-`n` simplex not contained in `region` removed.
pub fn gen_perturbed_lattice(
    d: usize,
    n: usize,
    radius: i64,
    adjacency: Adjacency,
    region: &BoxRegion,
) -> Result<Generated> {
    if region.lo.len() != d || region.hi.len() != d {
        return Err(HodgeError::DimensionMismatch { expected: d, got: region.lo.len().min(region.hi.len()) });
    }
    let full = gen_lattice(d, n, radius, adjacency)?;
    let coords = full.coords.as_ref().expect("lattice coordinates");
    let graph = full.complex.graph().clone();
    let tables: Vec<Vec<(Vec<VertexId>, f64)>> = (0..=n)
        .map(|degree| {
            if degree < 2 {
                return Vec::new();
            }
            full.complex
                .simplices(degree)
                .zip(full.complex.weights(degree))
                .filter(|(s, _)| degree < n || s.iter().all(|&v| region.contains(&coords[v])))
                .map(|(s, &w)| (s.to_vec(), w))
                .collect()
        })
        .collect();
    if n == 1 {
        return Err(HodgeError::param("perturbing the top degree of a graph would remove edges; use n >= 2"));
    }
    let complex = WeightedComplex::from_tables(graph, n, tables)?;
    Ok(Generated {
        complex,
        spec: GeneratorSpec::PerturbedLattice { d, n, radius, adjacency, region: region.clone() },
        ..full
    })
}

/// `Z²` patch: grid edges everywhere, diagonal and two triangles on squares with `i + j` even.
pub fn gen_alternating_triangulation(radius: i64) -> Result<Generated> {
    let mut patch = lattice_patch(2, radius, Adjacency::NearestNeighbor)?;
    for i in -radius..radius {
        for j in -radius..radius {
            if (i + j).rem_euclid(2) == 0 {
                let u = lattice_index(&[i, j], radius).unwrap();
                let v = lattice_index(&[i + 1, j + 1], radius).unwrap();
                patch.graph.add_edge(u, v, 1.0)?;
            }
        }
    }
    let layers = lattice_layers(&patch.graph, patch.origin)?;
    let complex = build_clique_complex(patch.graph, 2, &WeightRule::default())?;
    Ok(Generated {
        complex,
        layers,
        roots: vec![patch.origin],
        coords: Some(patch.coords),
        added_edges: Vec::new(),
        spec: GeneratorSpec::AlternatingTriangulation { radius },
    })
}

/// Rooted tree with depth labels `r`, `r.0`, `r.0.1`, ….
struct Tree {
    graph: WeightedGraph,
    depth: Vec<usize>,
    /// Children in order, per vertex.
    children: Vec<Vec<VertexId>>,
}

fn offspring(off: PowerLaw, depth: usize) -> Result<usize> {
    let value = off.eval(depth.max(1) as f64).round();
    if !(value >= 0.0 && value.is_finite()) {
        return Err(HodgeError::param(format!("offspring {off} is not a count at depth {depth}")));
    }
    if value > SIMPLEX_LIMIT as f64 {
        return Err(HodgeError::TooLarge(value as usize, SIMPLEX_LIMIT));
    }
    Ok(value as usize)
}

fn build_tree(depth: usize, off: PowerLaw, shape: TreeShape) -> Result<Tree> {
    let mut graph = WeightedGraph::new();
    graph.add_vertex("r", 1.0)?;
    let mut tree = Tree { graph, depth: vec![0], children: vec![Vec::new()] };
    let mut frontier = vec![0];
    for level in 0..depth {
        let k = offspring(off, level)?;
        let branching = match shape {
            TreeShape::Full => frontier.len(),
            TreeShape::Spine { width } => width.min(frontier.len()),
        };
        let mut next = Vec::new();
        for &v in &frontier[..branching] {
            check_size(tree.depth.len() + k)?;
            for c in 0..k {
                let label = format!("{}.{c}", tree.graph.label(v));
                let child = tree.graph.add_vertex(label, 1.0)?;
                tree.graph.add_edge(v, child, 1.0)?;
                tree.depth.push(level + 1);
                tree.children.push(Vec::new());
                tree.children[v].push(child);
                next.push(child);
            }
        }
        frontier = next;
    }
    Ok(tree)
}

fn resolve_shape(shape: Option<TreeShape>, depth: usize, off: PowerLaw) -> Result<TreeShape> {
    if let Some(TreeShape::Spine { width: 0 }) = shape {
        return Err(HodgeError::param("spine width must be positive"));
    }
    if let Some(s) = shape {
        return Ok(s);
    }
    // full tree if it stays below the size guard
    let mut total = 1.0f64;
    let mut layer = 1.0f64;
    for level in 0..depth {
        layer *= offspring(off, level).unwrap_or(usize::MAX) as f64;
        total += layer;
    }
    Ok(if total <= SIMPLEX_LIMIT as f64 { TreeShape::Full } else { TreeShape::Spine { width: 1 } })
}

fn tree_layers(tree: &Tree) -> LayerDecomposition {
    LayerDecomposition::from_assignment(tree.depth.clone(), LayerOrigin::Depth)
}

/// Binary tree of depth `depth` with sibling edges and triangles `(v, v0, v1)` for `|v| <= triangle_depth`.
pub fn gen_truncated_tree(triangle_depth: usize, depth: usize) -> Result<Generated> {
    if depth <= triangle_depth {
        return Err(HodgeError::param(format!(
            "tree depth {depth} leaves no children below the triangle depth {triangle_depth}"
        )));
    }
    let mut tree = build_tree(depth, PowerLaw::constant(2.0), TreeShape::Full)?;
    let mut added = Vec::new();
    for v in 0..tree.depth.len() {
        if tree.depth[v] <= triangle_depth {
            let (a, b) = (tree.children[v][0], tree.children[v][1]);
            tree.graph.add_edge(a, b, 1.0)?;
            added.push((tree.graph.label(a).to_string(), tree.graph.label(b).to_string()));
        }
    }
    let layers = tree_layers(&tree);
    let complex = build_clique_complex(tree.graph, 2, &WeightRule::default())?;
    Ok(Generated {
        complex,
        layers,
        roots: vec![0],
        coords: None,
        added_edges: added,
        spec: GeneratorSpec::TruncatedBinaryTree { triangle_depth, depth: Some(depth) },
    })
}

/// The plain graph tree with offspring `off(n)`.
pub fn gen_radial_tree(depth: usize, off: PowerLaw, shape: Option<TreeShape>) -> Result<Generated> {
    let shape = resolve_shape(shape, depth, off)?;
    let tree = build_tree(depth, off, shape)?;
    let layers = tree_layers(&tree);
    let complex = build_clique_complex(tree.graph, 1, &WeightRule::default())?;
    Ok(Generated {
        complex,
        layers,
        roots: vec![0],
        coords: None,
        added_edges: Vec::new(),
        spec: GeneratorSpec::RadialTree { depth, off, shape: Some(shape) },
    })
}

/// Tree with `off(n)` children per branching depth-`n` vertex, triangles over
/// consecutive sibling pairs `(c_1, c_2), (c_3, c_4), …`, and a tetrahedron
/// `(v, c_1, c_2, c_1's first child)` per pair at depths admitted by `tet_parity`.
///
/// The tetrahedra need the edges `v–c_{1}0` and `c_2–c_{1}0`, which are added
/// and listed in [`Generated::added_edges`] together with the sibling edges.
pub fn gen_example_5_2(depth: usize, off: PowerLaw, tet_parity: Parity, shape: Option<TreeShape>) -> Result<Generated> {
    let shape = resolve_shape(shape, depth, off)?;
    let mut tree = build_tree(depth, off, shape)?;
    let mut added = Vec::new();
    let mut add = |graph: &mut WeightedGraph, a: VertexId, b: VertexId| -> Result<()> {
        if !graph.is_adjacent(a, b) {
            graph.add_edge(a, b, 1.0)?;
            added.push((graph.label(a).to_string(), graph.label(b).to_string()));
        }
        Ok(())
    };
    for v in 0..tree.depth.len() {
        let kids = tree.children[v].clone();
        for pair in kids.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            add(&mut tree.graph, a, b)?;
            if tet_parity.admits(tree.depth[v]) {
                if let Some(&g) = tree.children[a].first() {
                    add(&mut tree.graph, v, g)?;
                    add(&mut tree.graph, b, g)?;
                }
            }
        }
    }
    let layers = tree_layers(&tree);
    let n = if tet_parity == Parity::None { 2 } else { 3 };
    let complex = build_clique_complex(tree.graph, n, &WeightRule::default())?;
    Ok(Generated {
        complex,
        layers,
        roots: vec![0],
        coords: None,
        added_edges: added,
        spec: GeneratorSpec::Example52 { depth, off, tet_parity, shape: Some(shape) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label_depth(c: &WeightedComplex, v: VertexId) -> usize {
        c.graph().label(v).matches('.').count()
    }

    #[test]
    fn line_patch() {
        let g = gen_lattice(1, 1, 3, Adjacency::Freudenthal).unwrap();
        assert_eq!(g.complex.counts(), vec![7, 6]);
        assert_eq!(g.complex.graph().label(g.roots[0]), "(0)");
    }

    #[test]
    fn nearest_neighbor_square_has_no_triangles() {
        let g = gen_lattice(2, 2, 2, Adjacency::NearestNeighbor).unwrap();
        assert_eq!(g.complex.counts(), vec![25, 40, 0]);
    }

    #[test]
    fn freudenthal_square() {
        // 3x3 vertices, 12 grid edges + 4 diagonals, 2 triangles per unit square
        let g = gen_lattice(2, 2, 1, Adjacency::Freudenthal).unwrap();
        assert_eq!(g.complex.counts(), vec![9, 16, 8]);
        assert_eq!(g.complex.euler_characteristic(), 1);
    }

    #[test]
    fn lattice_errors() {
        assert!(gen_lattice(2, 2, 0, Adjacency::Freudenthal).is_err());
        assert!(gen_lattice(1, 2, 3, Adjacency::Freudenthal).is_err());
    }

    #[test]
    fn perturbed_lattice_extremes() {
        let full = gen_lattice(2, 2, 3, Adjacency::Freudenthal).unwrap();
        let same = gen_perturbed_lattice(2, 2, 3, Adjacency::Freudenthal, &BoxRegion::cube(2, 3)).unwrap();
        assert_eq!(same.complex, full.complex);
        let empty = BoxRegion { lo: vec![1, 1], hi: vec![0, 0] };
        let none = gen_perturbed_lattice(2, 2, 3, Adjacency::Freudenthal, &empty).unwrap();
        assert_eq!(none.complex.counts(), vec![49, full.complex.count(1), 0]);
    }

    #[test]
    fn alternating_counts() {
        // R=1: squares with lower-left (-1,-1),(0,0) are even
        let g = gen_alternating_triangulation(1).unwrap();
        assert_eq!(g.complex.counts(), vec![9, 14, 4]);
    }

    #[test]
    fn truncated_tree_triangles() {
        let g = gen_truncated_tree(0, 1).unwrap();
        assert_eq!(g.complex.counts(), vec![3, 3, 1]);
        for n in 0..5 {
            let g = gen_truncated_tree(n, n + 2).unwrap();
            assert_eq!(g.complex.count(2), (1 << (n + 1)) - 1);
        }
        assert!(gen_truncated_tree(2, 2).is_err());
    }

    #[test]
    fn example_tetrahedra_at_even_depths() {
        let g = gen_example_5_2(4, binary(), Parity::Even, None).unwrap();
        assert_eq!(g.spec, GeneratorSpec::Example52 { depth: 4, off: binary(), tet_parity: Parity::Even, shape: Some(TreeShape::Full) });
        let c = &g.complex;
        let mut apex_depths: Vec<usize> = c.simplices(3).map(|t| label_depth(c, t[0])).collect();
        apex_depths.sort();
        apex_depths.dedup();
        assert_eq!(apex_depths, vec![0, 2]);
        // depth-4 vertices are leaves, so the tetrahedra above them have no v00 in the truncation
        assert_eq!(c.count(3), 1 + 4);
    }

    #[test]
    fn single_vertex_example() {
        let g = gen_example_5_2(0, binary(), Parity::Even, None).unwrap();
        assert_eq!(g.complex.counts(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn spine_keeps_size_linear() {
        let g = gen_example_5_2(10, "n^2".parse().unwrap(), Parity::Even, None).unwrap();
        assert!(matches!(g.spec, GeneratorSpec::Example52 { shape: Some(TreeShape::Spine { width: 1 }), .. }));
        let expected: usize = 1 + (0..10).map(|n: usize| n.max(1).pow(2)).sum::<usize>();
        assert_eq!(g.complex.num_vertices(), expected);
    }

    #[test]
    fn spec_json_aliases() {
        let s: GeneratorSpec = serde_json::from_str(r#"{"kind":"example52","depth":3}"#).unwrap();
        assert_eq!(s, GeneratorSpec::Example52 { depth: 3, off: binary(), tet_parity: Parity::Even, shape: None });
        let s: GeneratorSpec = serde_json::from_str(r#"{"kind":"lattice_zd","d":2,"n":2,"radius":1}"#).unwrap();
        assert_eq!(s.kind(), "lattice");
        let back: GeneratorSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn deterministic() {
        let a = gen_example_5_2(6, binary(), Parity::Even, None).unwrap();
        let b = gen_example_5_2(6, binary(), Parity::Even, None).unwrap();
        assert_eq!(a.complex, b.complex);
    }
}
