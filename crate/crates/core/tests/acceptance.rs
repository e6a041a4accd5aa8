//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `cargo test -p hodgelab-core --test acceptance`. Criteria that fail
//! print the measured evidence and make the target exit nonzero.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hodgelab_core::chi::{check_global_chi, check_level_chi, CutoffSystem, Exhaustion, Ramp, Verdict};
use hodgelab_core::divergence::{
    default_horizon, divergence_cutoffs, divergence_partial_sums, normalized_random_forms, step3_sweep,
    GrowthFunction, PowerLaw,
};
use hodgelab_core::generators::{
    gen_alternating_triangulation, gen_example_5_2, gen_lattice, gen_perturbed_lattice, gen_radial_tree,
    gen_truncated_tree, Adjacency, BoxRegion, Generated, Parity, TreeShape,
};
use hodgelab_core::operators::{block_diagonality_residual, nilpotency_residual};
use hodgelab_core::spectral::{esa_sweep, hodge_decompose, kernel_probe, Shift, SweepInput};
use hodgelab_core::{adjointness_check, VertexId, WeightedComplex};

const TOL_EXACT: f64 = 1e-12;
const TOL_ACCUM: f64 = 1e-10;
const KERNEL_THRESH: f64 = 1e-8;
const REFERENCE_TOL: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn families() -> Vec<(&'static str, Generated)> {
    let n2: PowerLaw = "n^2".parse().unwrap();
    vec![
        ("lattice d=2 n=2 R=12", gen_lattice(2, 2, 12, Adjacency::Freudenthal).unwrap()),
        ("lattice d=3 n=3 R=5", gen_lattice(3, 3, 5, Adjacency::Freudenthal).unwrap()),
        (
            "perturbed lattice d=2 n=2 R=12",
            gen_perturbed_lattice(2, 2, 12, Adjacency::Freudenthal, &BoxRegion::cube(2, 4)).unwrap(),
        ),
        ("alternating triangulation R=12", gen_alternating_triangulation(12).unwrap()),
        ("truncated tree N=5 depth 9", gen_truncated_tree(5, 9).unwrap()),
        ("radial tree off=n^2 depth 8", gen_radial_tree(8, n2, None).unwrap()),
        ("example off=2 depth 10", gen_example_5_2(10, PowerLaw::constant(2.0), Parity::Even, None).unwrap()),
        ("example off=n^2 depth 12", gen_example_5_2(12, n2, Parity::Even, None).unwrap()),
    ]
}

fn criterion_1() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut slowest = Duration::ZERO;
    let mut notes = Vec::new();
    for (name, g) in families() {
        let c = &g.complex;
        assert!(c.total_simplices() <= 100_000, "{name} too large");
        let start = Instant::now();
        let (dd, deltadelta) = nilpotency_residual(c);
        let mut adj = 0.0f64;
        for degree in 0..c.max_degree() {
            adj = adj.max(adjointness_check(c, degree, 100, 7 + degree as u64).unwrap());
        }
        let took = start.elapsed();
        slowest = slowest.max(took);
        worst = (worst.0.max(dd), worst.1.max(deltadelta), worst.2.max(adj));
        notes.push(format!("{name}: {:?}", c.counts()));
    }
    let pass = worst.0 <= TOL_EXACT && worst.1 <= TOL_EXACT && worst.2 <= TOL_ACCUM && slowest < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "max |dd| = {:.3e}, max |δδ| = {:.3e}, max adjointness defect = {:.3e}, slowest family {:.2?} [{}]",
            worst.0,
            worst.1,
            worst.2,
            slowest,
            notes.join("; ")
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut off = 0.0f64;
    let mut dev = 0.0f64;
    for (_, g) in families() {
        let (o, d) = block_diagonality_residual(&g.complex);
        off = off.max(o);
        dev = dev.max(d);
    }
    outcome(off <= TOL_EXACT && dev <= TOL_EXACT, format!("max off-block |D²| = {off:.3e}, max |D²_ii - L_i| = {dev:.3e}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let harmonic: f64 = (1..=10).map(|n| 1.0 / n as f64).sum();
    let basel: f64 = (1..=10).map(|n| 1.0 / (n * n) as f64).sum();
    let s2 = divergence_partial_sums(&GrowthFunction::from_formula("n^2".parse().unwrap()), 1..=10).last();
    let s4 = divergence_partial_sums(&GrowthFunction::from_formula("n^4".parse().unwrap()), 1..=10).last();
    let took = start.elapsed();
    let pass = (s2 - 2.93).abs() <= REFERENCE_TOL
        && (s4 - 1.55).abs() <= REFERENCE_TOL
        && (s2 - harmonic).abs() <= TOL_EXACT
        && (s4 - basel).abs() <= TOL_EXACT
        && took < Duration::from_secs(1);
    outcome(pass, format!("n^2: {s2:.6} (H_10 = {harmonic:.6}), n^4: {s4:.6} (Σ1/n² = {basel:.6}), {took:.2?}"))
}

fn lattice_profile(g: &Generated, ks: std::ops::RangeInclusive<usize>, width: f64, level: Option<usize>) -> hodgelab_core::chi::EnergyProfile {
    let c = &g.complex;
    let ex = Exhaustion::ball(c, &g.roots, *ks.end()).unwrap();
    let cutoffs = CutoffSystem::new(c, ex, Ramp::Linear { width }, ks).unwrap();
    match level {
        None => check_global_chi(c, &cutoffs, TOL_EXACT).unwrap(),
        Some(l) => check_level_chi(c, &cutoffs, l, TOL_EXACT).unwrap(),
    }
}

fn criterion_4() -> Outcome {
    const WIDTH: f64 = 2.0;
    const R: i64 = 24;
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;

    // (a) sup independent of k
    let lattice = gen_lattice(2, 2, R, Adjacency::Freudenthal).unwrap();
    let p = lattice_profile(&lattice, 2..=20, WIDTH, None);
    let flat = p.table.iter().all(|row| row.windows(2).all(|w| (w[1] - w[0]).abs() <= TOL_EXACT));
    let a = p.verdict == Verdict::BoundedOnRange && flat && p.ramp_beyond_truncation.is_empty();
    pass &= a;
    parts.push(format!(
        "(a) {} verdict {}, sup rows {:?}",
        if a { "ok" } else { "FAILED" },
        p.verdict,
        p.table.iter().map(|r| (r[0], r[r.len() - 1])).collect::<Vec<_>>()
    ));

    // (b) perturbed lattice, degree n row
    let perturbed = gen_perturbed_lattice(2, 2, R, Adjacency::Freudenthal, &BoxRegion::cube(2, 6)).unwrap();
    let p = lattice_profile(&perturbed, 2..=20, WIDTH, Some(2));
    let row = &p.table[0];
    let longest_increase = longest_strict_increase(row);
    let b = p.verdict == Verdict::Growing && longest_increase >= 5;
    pass &= b;
    parts.push(format!(
        "(b) {} verdict {}, degree-2 sup over k=2..20 {:?}, totals {:?}",
        if b { "ok" } else { "FAILED" },
        p.verdict,
        short(row),
        short(&p.totals[0])
    ));

    // (c) alternating triangulation, levels 1 and 2
    let alternating = gen_alternating_triangulation(R).unwrap();
    let l1 = lattice_profile(&alternating, 2..=20, WIDTH, Some(1));
    let l2 = lattice_profile(&alternating, 2..=20, WIDTH, Some(2));
    let cc = l1.verdict == Verdict::BoundedOnRange && l2.verdict == Verdict::Growing;
    pass &= cc;
    parts.push(format!(
        "(c) {} level 1 {}, level 2 {} with sup {:?}",
        if cc { "ok" } else { "FAILED" },
        l1.verdict,
        l2.verdict,
        short(&l2.table[0])
    ));
    let took = start.elapsed();
    pass &= took < Duration::from_secs(300);
    parts.push(format!("{took:.2?}"));
    outcome(pass, parts.join("; "))
}

fn longest_strict_increase(row: &[f64]) -> usize {
    let mut best = 1;
    let mut run = 1;
    for w in row.windows(2) {
        if w[1] > w[0] {
            run += 1;
            best = best.max(run);
        } else {
            run = 1;
        }
    }
    best
}

fn short(row: &[f64]) -> Vec<String> {
    row.iter().map(|v| format!("{v:.4}")).collect()
}

fn criterion_5() -> Outcome {
    let g = gen_example_5_2(12, "n^2".parse().unwrap(), Parity::Even, None).unwrap();
    let c = &g.complex;
    let growth = GrowthFunction::measure(c, &g.layers);
    let horizon = default_horizon(12);
    let ns = [2usize, 4, 8];
    let mut shape_ok = true;
    for &n in &ns {
        let cut = divergence_cutoffs(&growth, n, horizon).unwrap();
        let chi = cut.on_vertices(&g.layers);
        for v in 0..c.num_vertices() {
            let l = g.layers.layer_of(v);
            // layer-constant by construction of `on_vertices`; check plateau and monotone profile
            if l <= n && chi[v] != 1.0 {
                shape_ok = false;
            }
            if chi[v] != cut.value_at_layer(l) {
                shape_ok = false;
            }
        }
        if cut.values.windows(2).any(|w| w[1] > w[0]) {
            shape_ok = false;
        }
    }
    let u = normalized_random_forms(c, 11);
    let rows = step3_sweep(c, &g.layers, &growth, &ns, horizon, &u).unwrap();
    let norms: Vec<f64> = rows.iter().map(|r| r.total_remainder_sq.sqrt()).collect();
    let decreasing = norms.windows(2).all(|w| w[1] < w[0]);
    outcome(
        shape_ok && decreasing,
        format!(
            "layer-constant/plateau {}, remainder norms at N=2,4,8: {:?}, tail sums {:?}",
            if shape_ok { "ok" } else { "FAILED" },
            norms,
            rows.iter().map(|r| r.tail_sum).collect::<Vec<_>>()
        ),
    )
}

/// Rank over GF(p) of an integer matrix given by rows of (column, value).
fn rank_mod_p(rows: Vec<BTreeMap<usize, i64>>, cols: usize) -> usize {
    const P: i64 = 1_000_000_007;
    let mut m: Vec<Vec<i64>> = rows
        .into_iter()
        .map(|r| {
            let mut dense = vec![0i64; cols];
            for (c, v) in r {
                dense[c] = v.rem_euclid(P);
            }
            dense
        })
        .collect();
    let pow = |mut b: i64, mut e: i64| {
        let mut acc = 1i64;
        b %= P;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, pivot);
        let inv = pow(m[rank][col], P - 2);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col] * inv % P;
                for c in col..cols {
                    m[r][c] = (m[r][c] - f * m[rank][c]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers from ranks of the boundary matrices ∂_i: C_i → C_{i-1}, built from the simplex lists.
fn brute_force_betti(c: &WeightedComplex) -> Vec<usize> {
    let n = c.max_degree();
    let lists: Vec<Vec<Vec<VertexId>>> = (0..=n).map(|i| c.simplices(i).map(|s| s.to_vec()).collect()).collect();
    let index: Vec<BTreeMap<Vec<VertexId>, usize>> =
        lists.iter().map(|l| l.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect()).collect();
    let mut ranks = vec![0usize; n + 2];
    for i in 1..=n {
        // rows are i-simplices, columns (i-1)-simplices: the transpose has the same rank
        let rows = lists[i]
            .iter()
            .map(|s| {
                let mut row = BTreeMap::new();
                for j in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(j);
                    row.insert(index[i - 1][&face], if j % 2 == 0 { 1 } else { -1 });
                }
                row
            })
            .collect();
        ranks[i] = rank_mod_p(rows, lists[i - 1].len());
    }
    (0..=n).map(|i| lists[i].len() - ranks[i] - ranks[i + 1]).collect()
}

fn oracle_complexes() -> Vec<(String, WeightedComplex)> {
    use hodgelab_core::{build_clique_complex, WeightRule, WeightedGraph};
    let graph = |n: usize, edges: &[(usize, usize)]| {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_vertex(format!("v{i}"), 1.0).unwrap();
        }
        for &(u, v) in edges {
            g.add_edge(u, v, 1.0).unwrap();
        }
        g
    };
    let tri = [(0, 1), (1, 2), (0, 2)];
    let mut out = vec![
        ("K3 filled".to_string(), build_clique_complex(graph(3, &tri), 2, &WeightRule::default()).unwrap()),
        ("K3 hollow".to_string(), build_clique_complex(graph(3, &tri), 1, &WeightRule::default()).unwrap()),
        (
            "4-cycle".to_string(),
            build_clique_complex(graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]), 2, &WeightRule::default()).unwrap(),
        ),
    ];
    for n in 0..4 {
        out.push((format!("truncated tree N={n}"), gen_truncated_tree(n, n + 2).unwrap().complex));
    }
    out.push(("example off=2 depth 5".into(), gen_example_5_2(5, PowerLaw::constant(2.0), Parity::Even, None).unwrap().complex));
    out.push(("example off=3 depth 3".into(), gen_example_5_2(3, PowerLaw::constant(3.0), Parity::All, None).unwrap().complex));
    out.push(("lattice R=3".into(), gen_lattice(2, 2, 3, Adjacency::Freudenthal).unwrap().complex));
    out.push((
        "perturbed lattice R=3".into(),
        gen_perturbed_lattice(2, 2, 3, Adjacency::Freudenthal, &BoxRegion { lo: vec![-1, -1], hi: vec![1, 2] }).unwrap().complex,
    ));
    out.push(("alternating R=3".into(), gen_alternating_triangulation(3).unwrap().complex));
    // an annulus: the R=3 lattice without the interior of the unit cell at the origin
    let ring = gen_perturbed_lattice(2, 2, 3, Adjacency::Freudenthal, &BoxRegion { lo: vec![1, 1], hi: vec![0, 0] }).unwrap();
    out.push(("lattice R=3 without triangles".into(), ring.complex));
    out
}

fn criterion_6() -> Outcome {
    let mut mismatches = Vec::new();
    let mut seen = Vec::new();
    for (name, c) in oracle_complexes() {
        assert!(c.total_simplices() <= 500, "{name} has {} simplices", c.total_simplices());
        let oracle = brute_force_betti(&c);
        let betti: Vec<usize> =
            (0..=c.max_degree()).map(|i| hodge_decompose(&c, i, KERNEL_THRESH).unwrap().betti).collect();
        let euler_betti: i64 = betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        if betti != oracle || euler_betti != c.euler_characteristic() {
            mismatches.push(format!("{name}: hodge {betti:?} oracle {oracle:?} χ {}", c.euler_characteristic()));
        }
        seen.push(format!("{name} {betti:?}"));
    }
    let pass = mismatches.is_empty();
    outcome(pass, if pass { seen.join("; ") } else { mismatches.join("; ") })
}

fn criterion_7() -> Outcome {
    let mut worst = f64::INFINITY;
    let small: Vec<Generated> = vec![
        gen_lattice(2, 2, 5, Adjacency::Freudenthal).unwrap(),
        gen_perturbed_lattice(2, 2, 5, Adjacency::Freudenthal, &BoxRegion::cube(2, 2)).unwrap(),
        gen_alternating_triangulation(5).unwrap(),
        gen_truncated_tree(3, 6).unwrap(),
        gen_example_5_2(6, PowerLaw::constant(2.0), Parity::Even, None).unwrap(),
        gen_example_5_2(8, "n^2".parse().unwrap(), Parity::Even, None).unwrap(),
        gen_example_5_2(14, "n^2".parse().unwrap(), Parity::Even, None).unwrap(),
    ];
    for g in &small {
        for degree in 0..=g.complex.max_degree() {
            for shift in [Shift::PlusI, Shift::MinusI] {
                worst = worst.min(kernel_probe(&g.complex, degree, shift, 0).unwrap().sigma_min);
            }
        }
    }
    let bound_ok = worst >= 1.0 - TOL_ACCUM;

    let sweep = |off: &str| {
        let law: PowerLaw = off.parse().unwrap();
        let family = (4..=7).map(move |depth| {
            gen_example_5_2(depth, law, Parity::Even, Some(TreeShape::Spine { width: 1 }))
                .map(|g| SweepInput { depth, complex: g.complex, layers: g.layers })
        });
        serde_json::to_string(&esa_sweep(family, law, 4, 1e-3, 0).unwrap()).unwrap()
    };
    let mut det_ok = true;
    let mut sizes = Vec::new();
    for off in ["n^2", "n^4"] {
        let a = sweep(off);
        let b = sweep(off);
        det_ok &= a == b && a.contains("boundary_eigenvalues");
        sizes.push(a.len());
    }
    outcome(
        bound_ok && det_ok,
        format!("min σ_min(L ± i) = {worst:.12}, sweeps byte-identical: {det_ok} (JSON sizes {sizes:?})"),
    )
}

fn criterion_8() -> Outcome {
    const DEPTH: usize = 12;
    const WIDTH: f64 = 1.0;
    let ks = 1..=DEPTH - 1;
    let base = gen_example_5_2(DEPTH, "n^2".parse().unwrap(), Parity::Even, None).unwrap();
    let verdict_of = |c: &WeightedComplex| {
        let levels = base.layers.assignment().iter().map(|&l| Some(l)).collect();
        let ex = Exhaustion::from_levels(levels, DEPTH);
        let cutoffs = CutoffSystem::new(c, ex, Ramp::Linear { width: WIDTH }, ks.clone()).unwrap();
        check_global_chi(c, &cutoffs, TOL_EXACT).unwrap()
    };
    let unweighted = verdict_of(&base.complex);
    let mut sweep = Vec::new();
    let mut transition = None;
    for alpha in [1.0, 2.0, 4.0, 8.0] {
        let weighted = base.clone().with_radial_weighting(alpha).unwrap();
        let p = verdict_of(&weighted.complex);
        if transition.is_none() && p.verdict == Verdict::BoundedOnRange {
            transition = Some(alpha);
        }
        sweep.push(format!("α={alpha}: {} (degree-1 sup {:?})", p.verdict, short(&p.table[0])));
    }
    let pass = unweighted.verdict == Verdict::Growing && transition.is_some();
    outcome(
        pass,
        format!(
            "unweighted {} (degree-1 sup {:?}); {}; transition α = {:?}",
            unweighted.verdict,
            short(&unweighted.table[0]),
            sweep.join("; "),
            transition
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 operator identities", criterion_1),
        ("2 block-diagonality", criterion_2),
        ("3 partial sums at N=10", criterion_3),
        ("4 energy behaviour", criterion_4),
        ("5 divergence cut-offs", criterion_5),
        ("6 betti oracle", criterion_6),
        ("7 spectral sanity", criterion_7),
        ("8 radial weighting", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| outcome(false, format!("panicked: {:?}", e.downcast_ref::<String>())));
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name} ({:.2?}): {}",
            if result.pass { "PASS" } else { "FAIL" },
            start.elapsed(),
            result.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
