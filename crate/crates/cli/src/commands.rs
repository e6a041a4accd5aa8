use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

use hodgelab_core::chi::{check_global_chi, check_level_chi, check_region_chi, CutoffSystem, Exhaustion, Ramp};
use hodgelab_core::divergence::{
    default_horizon, divergence_cutoffs, divergence_partial_sums, normalized_random_forms, step3_sweep,
    validate_decomposition, DecompositionCheck, DivergenceCutoff, GrowthFunction, PartialSums, PowerLaw,
    Step3Row, TailModel,
};
use hodgelab_core::generators::GeneratorSpec;
use hodgelab_core::io::{write_complex, ComplexDescription, VertexKey};
use hodgelab_core::operators::{block_diagonality_residual, nilpotency_residual};
use hodgelab_core::spectral::{
    esa_sweep, hodge_decompose, kernel_probe, spectrum, KernelProbe, Method, Shift, SpectrumReport, SweepInput,
};
use hodgelab_core::{adjointness_check, assemble_block, OperatorKind, VertexId, WeightedComplex};

use crate::args::{
    AssembleArgs, ChiArgs, ChiModeArg, Cli, DivergenceArgs, ExhaustionArg, Format, GeneratorArgs, HodgeArgs,
    MethodArg, OperatorArg, SpectrumArgs, SweepArgs,
};
use crate::output::{json_report, num, opt_num, write_file, Table};

/// What a command produced: the JSON report and, where meaningful, a CSV table.
pub struct Output {
    pub json: String,
    pub csv: Option<Table>,
}

impl Output {
    pub fn render(self, format: Format) -> Result<String> {
        match (format, self.csv) {
            (Format::Json, _) => Ok(self.json),
            (Format::Csv, Some(t)) => t.render(),
            (Format::Csv, None) => bail!("this command has no CSV form; use --format json"),
        }
    }
}

fn degrees(complex: &WeightedComplex, degree: Option<usize>) -> Result<Vec<usize>> {
    match degree {
        Some(d) if d > complex.max_degree() => bail!("degree {d} exceeds the complex dimension {}", complex.max_degree()),
        Some(d) => Ok(vec![d]),
        None => Ok((0..=complex.max_degree()).collect()),
    }
}

fn labels(complex: &WeightedComplex, ids: &[VertexId]) -> Vec<VertexKey> {
    ids.iter().map(|&v| VertexKey::Name(complex.graph().label(v).to_string())).collect()
}

pub fn generate(args: &GeneratorArgs) -> Result<String> {
    let g = args.generate()?;
    eprintln!(
        "{}: simplex counts {:?}, {} added edges",
        g.spec.kind(),
        g.complex.counts(),
        g.added_edges.len()
    );
    let mut text = serde_json::to_string_pretty(&ComplexDescription::describe_generated(&g)?)?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct Identity {
    residual: f64,
    within_tolerance: bool,
}

#[derive(Serialize)]
struct AdjointDegree {
    degree: usize,
    residual: f64,
}

#[derive(Serialize)]
struct OperatorSummary {
    kind: OperatorKind,
    source_degree: Option<usize>,
    target_degree: Option<usize>,
    rows: usize,
    cols: usize,
    nnz: usize,
}

#[derive(Serialize)]
struct AssembleReport {
    counts: Vec<usize>,
    euler_characteristic: i64,
    dd: Identity,
    delta_delta: Identity,
    adjointness: Vec<AdjointDegree>,
    adjointness_within_tolerance: bool,
    laplacian_off_block: Identity,
    laplacian_square_deviation: Identity,
    operator: Option<OperatorSummary>,
}

pub fn assemble(cli: &Cli, args: &AssembleArgs) -> Result<Output> {
    let c = &cli.common;
    let src = args.source.load()?;
    let complex = &src.complex;
    let exact = |r: f64| Identity { residual: r, within_tolerance: r <= c.tol_exact };
    let (dd, deltadelta) = nilpotency_residual(complex);
    let (off, dev) = block_diagonality_residual(complex);
    let adjointness = (0..complex.max_degree())
        .map(|degree| Ok(AdjointDegree { degree, residual: adjointness_check(complex, degree, args.trials, c.seed)? }))
        .collect::<Result<Vec<_>>>()?;

    let operator = match args.operator {
        None => None,
        Some(op) => {
            let kind = match op {
                OperatorArg::D => OperatorKind::Coboundary,
                OperatorArg::Delta => OperatorKind::Codifferential,
                OperatorArg::GaussBonnet => OperatorKind::GaussBonnet,
                OperatorArg::Laplacian => OperatorKind::Laplacian,
            };
            let block = assemble_block(complex, kind, args.degree)?;
            if let Some(path) = &args.matrix_out {
                let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                let mut out = BufWriter::new(file);
                block.write_coordinate_to(&mut out)?;
                out.flush()?;
            }
            Some(OperatorSummary {
                kind,
                source_degree: block.source_degree,
                target_degree: block.target_degree,
                rows: block.matrix.rows(),
                cols: block.matrix.cols(),
                nnz: block.matrix.nnz(),
            })
        }
    };
    if args.operator.is_none() && args.matrix_out.is_some() {
        bail!("--matrix-out needs --operator");
    }

    if let Some(path) = &args.emit_complex {
        let mut d = ComplexDescription::describe(complex)?;
        d.roots = Some(labels(complex, &src.roots));
        d.layers = Some(src.layers.assignment().to_vec());
        d.generator = src.generator.clone();
        write_complex(path, &d).with_context(|| format!("writing {}", path.display()))?;
    }

    let report = AssembleReport {
        counts: complex.counts(),
        euler_characteristic: complex.euler_characteristic(),
        dd: exact(dd),
        delta_delta: exact(deltadelta),
        adjointness_within_tolerance: adjointness.iter().all(|a| a.residual <= c.tol_accum),
        adjointness,
        laplacian_off_block: exact(off),
        laplacian_square_deviation: exact(dev),
        operator,
    };
    let mut table = Table::new(&["degree", "count", "adjointness_residual"]);
    for (degree, count) in report.counts.iter().enumerate() {
        let r = report.adjointness.iter().find(|a| a.degree == degree).map(|a| a.residual);
        table.push(vec![degree.to_string(), count.to_string(), opt_num(r)]);
    }
    Ok(Output { json: json_report(cli, "assemble", &report)?, csv: Some(table) })
}

fn read_region(path: &Path, complex: &WeightedComplex) -> Result<Vec<VertexId>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ids: Vec<Value> = serde_json::from_str(&text).context("region file must be a JSON array of vertex ids")?;
    ids.iter()
        .map(|v| {
            let label = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => bail!("bad vertex id {other} in region file"),
            };
            complex.graph().vertex(&label).with_context(|| format!("unknown vertex `{label}` in region file"))
        })
        .collect()
}

pub fn chi(cli: &Cli, args: &ChiArgs) -> Result<Output> {
    let tol = cli.common.tol_exact;
    let src = args.source.load()?;
    let complex = &src.complex;
    let ks = args.k_range.0.clone();
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let ramp = Ramp::Linear { width: args.ramp_width };
    let exhaustion = || -> Result<Exhaustion> {
        Ok(match args.exhaustion {
            ExhaustionArg::Ball => Exhaustion::ball(complex, &src.roots, k_max)?,
            ExhaustionArg::Layers => Exhaustion::from_levels(src.layers.levels(), k_max),
        })
    };

    let (report, profile) = match args.mode {
        ChiModeArg::Global | ChiModeArg::Level => {
            let cutoffs = CutoffSystem::new(complex, exhaustion()?, ramp, ks)?;
            let profile = match (args.mode, args.level) {
                (ChiModeArg::Level, Some(level)) => check_level_chi(complex, &cutoffs, level, tol)?,
                (ChiModeArg::Level, None) => bail!("--mode level needs --level"),
                _ => check_global_chi(complex, &cutoffs, tol)?,
            };
            (serde_json::to_value(&profile)?, profile)
        }
        ChiModeArg::Region => {
            let path = args.region_file.as_ref().context("--mode region needs --region-file")?;
            let region = read_region(path, complex)?;
            let r = check_region_chi(complex, &region, &src.roots, ramp, ks, tol)?;
            (serde_json::to_value(&r)?, r.profile)
        }
    };
    eprintln!("verdict: {}", profile.verdict);

    let mut table = Table::new(&["degree", "k", "sup", "total", "truncation_limited"]);
    for (r, degree) in profile.degrees.iter().enumerate() {
        for (j, k) in profile.ks.iter().enumerate() {
            table.push(vec![
                degree.to_string(),
                k.to_string(),
                num(profile.table[r][j]),
                num(profile.totals[r][j]),
                profile.ramp_beyond_truncation.contains(k).to_string(),
            ]);
        }
    }
    Ok(Output { json: json_report(cli, "chi", &report)?, csv: Some(table) })
}

#[derive(Serialize)]
struct DivergenceReport {
    growth_source: &'static str,
    ks: Vec<usize>,
    xi: Vec<Option<f64>>,
    breakdown: Vec<Vec<f64>>,
    tail: TailModel,
    partial_sums: PartialSums,
    classification: String,
    horizon: usize,
    cutoff_profiles: BTreeMap<usize, DivergenceCutoff>,
    decomposition: Option<DecompositionCheck>,
    step3: Option<Vec<Step3Row>>,
}

pub fn divergence(cli: &Cli, args: &DivergenceArgs) -> Result<Output> {
    let src = if args.source.is_given() { Some(args.source.load()?) } else { None };
    let (growth, growth_source) = match (&args.xi, &src) {
        (Some(formula), _) => (GrowthFunction::from_formula(formula.parse::<PowerLaw>()?), "formula"),
        (None, Some(s)) => (GrowthFunction::measure(&s.complex, &s.layers), "measured"),
        (None, None) => bail!("give --xi or a complex (--input / --kind)"),
    };
    let ks = match (&args.k_range, &src) {
        (Some(list), _) => list.0.clone(),
        (None, Some(s)) if args.xi.is_none() => (1..=s.layers.num_layers().saturating_sub(2).max(1)).collect(),
        _ => (1..=10).collect(),
    };
    let (lo, hi) = (ks[0], *ks.last().unwrap());
    let depth = src.as_ref().map_or(hi, |s| s.depth().unwrap_or(s.layers.num_layers().saturating_sub(1)));
    let horizon = args.horizon.unwrap_or_else(|| default_horizon(depth));

    let partial_sums = divergence_partial_sums(&growth, lo..=hi);
    let mut cutoff_profiles = BTreeMap::new();
    for &n in &args.depths.0 {
        cutoff_profiles.insert(n, divergence_cutoffs(&growth, n, horizon)?);
    }
    let (decomposition, step3) = match &src {
        Some(s) => {
            let u = normalized_random_forms(&s.complex, cli.common.seed);
            (
                Some(validate_decomposition(&s.complex, &s.layers)?),
                Some(step3_sweep(&s.complex, &s.layers, &growth, &args.depths.0, horizon, &u)?),
            )
        }
        None => (None, None),
    };
    let breakdown = ks
        .iter()
        .map(|&k| growth.measured.get(k).map(|e| e.breakdown.clone()).unwrap_or_default())
        .collect();
    let report = DivergenceReport {
        growth_source,
        xi: ks.iter().map(|&k| growth.xi(k)).collect(),
        ks,
        breakdown,
        tail: growth.tail.clone(),
        classification: partial_sums.classification.label.clone(),
        partial_sums,
        horizon,
        cutoff_profiles,
        decomposition,
        step3,
    };
    eprintln!(
        "partial sum over {lo}..={hi}: {} ({})",
        report.partial_sums.last(),
        report.classification
    );

    let mut table = Table::new(&["k", "xi", "term", "partial_sum"]);
    let ps = &report.partial_sums;
    for (i, &k) in report.ks.iter().enumerate() {
        let pos = ps.ks.iter().position(|&j| j == k);
        table.push(vec![
            k.to_string(),
            opt_num(report.xi[i]),
            opt_num(pos.map(|p| ps.terms[p])),
            opt_num(pos.map(|p| ps.sums[p])),
        ]);
    }
    Ok(Output { json: json_report(cli, "divergence", &report)?, csv: Some(table) })
}

#[derive(Serialize)]
struct SpectrumOutput {
    depth: Option<usize>,
    spectra: Vec<SpectrumReport>,
    probes: Vec<KernelProbe>,
}

pub fn spectrum_cmd(cli: &Cli, args: &SpectrumArgs) -> Result<Output> {
    let seed = cli.common.seed;
    let src = args.source.load()?;
    let complex = &src.complex;
    let method = match args.method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Dense => Method::Dense,
        MethodArg::Iterative => Method::Iterative,
    };
    let mut spectra = Vec::new();
    let mut probes = Vec::new();
    for degree in degrees(complex, args.degree)? {
        let how_many = args.how_many.min(complex.count(degree));
        spectra.push(spectrum(complex, degree, how_many, method, seed)?);
        if args.probe {
            for shift in [Shift::PlusI, Shift::MinusI] {
                probes.push(kernel_probe(complex, degree, shift, seed)?);
            }
        }
    }
    let report = SpectrumOutput { depth: src.depth(), spectra, probes };
    let depth = report.depth.map(|d| d.to_string()).unwrap_or_default();
    let mut table = Table::new(&["depth", "degree", "eigenvalue_rank", "value"]);
    for s in &report.spectra {
        for (rank, &l) in s.eigenvalues.iter().enumerate() {
            table.push(vec![depth.clone(), s.degree.to_string(), (rank + 1).to_string(), num(l)]);
        }
    }
    Ok(Output { json: json_report(cli, "spectrum", &report)?, csv: Some(table) })
}

#[derive(Serialize)]
struct HodgeDegree {
    degree: usize,
    dim: usize,
    exact: usize,
    harmonic: usize,
    coexact: usize,
    betti: usize,
    cross_gram: f64,
    self_gram: f64,
}

#[derive(Serialize)]
struct HodgeReport {
    degrees: Vec<HodgeDegree>,
    euler_characteristic: i64,
    euler_from_betti: Option<i64>,
}

/// Columns of a basis in the same coordinate format as operator export.
fn write_basis(path: &Path, dim: usize, basis: &[Vec<f64>]) -> Result<()> {
    let mut text = String::from("%%MatrixMarket matrix coordinate real general\n");
    let entries: Vec<(usize, usize, f64)> = basis
        .iter()
        .enumerate()
        .flat_map(|(c, v)| v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(move |(r, &x)| (r, c, x)))
        .collect();
    text.push_str(&format!("{} {} {}\n", dim, basis.len(), entries.len()));
    for (r, c, x) in entries {
        text.push_str(&format!("{} {} {:.17e}\n", r + 1, c + 1, x));
    }
    write_file(path, &text)
}

pub fn hodge(cli: &Cli, args: &HodgeArgs) -> Result<Output> {
    let src = args.source.load()?;
    let complex = &src.complex;
    if let Some(dir) = &args.basis_out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let all = args.degree.is_none();
    let mut out = Vec::new();
    for degree in degrees(complex, args.degree)? {
        let h = hodge_decompose(complex, degree, cli.common.kernel_thresh)?;
        if let Some(dir) = &args.basis_out {
            for (part, basis) in [("exact", &h.exact), ("harmonic", &h.harmonic), ("coexact", &h.coexact)] {
                write_basis(&dir.join(format!("degree{degree}_{part}.mtx")), h.dim, basis)?;
            }
        }
        let (exact, harmonic, coexact) = h.dims();
        out.push(HodgeDegree {
            degree,
            dim: h.dim,
            exact,
            harmonic,
            coexact,
            betti: h.betti,
            cross_gram: h.cross_gram,
            self_gram: h.self_gram,
        });
    }
    let euler_from_betti = all.then(|| {
        out.iter().map(|h| if h.degree % 2 == 0 { h.betti as i64 } else { -(h.betti as i64) }).sum()
    });
    let report = HodgeReport { degrees: out, euler_characteristic: complex.euler_characteristic(), euler_from_betti };
    let mut table = Table::new(&["degree", "dim", "exact", "harmonic", "coexact", "betti"]);
    for h in &report.degrees {
        table.push(
            [h.degree, h.dim, h.exact, h.harmonic, h.coexact, h.betti].iter().map(|x| x.to_string()).collect(),
        );
    }
    Ok(Output { json: json_report(cli, "hodge", &report)?, csv: Some(table) })
}

pub fn sweep(cli: &Cli, args: &SweepArgs) -> Result<Output> {
    // full trees of fast-growing families are far too large to sweep
    let with_depth = |o: &mut serde_json::Map<String, Value>, depth: usize| {
        o.insert("depth".into(), depth.into());
        o.entry("shape").or_insert_with(|| serde_json::json!({"kind": "spine", "width": 1}));
    };
    let probe = args.generator.spec_with(|o| with_depth(o, args.depths.0[0]))?;
    let offspring = match probe {
        GeneratorSpec::RadialTree { off, .. } | GeneratorSpec::Example52 { off, .. } => off,
        other => bail!("sweep runs over tree families (radial_tree, example52), not {}", other.kind()),
    };
    let specs = args
        .depths
        .0
        .iter()
        .map(|&depth| {
            let spec = args.generator.spec_with(|o| with_depth(o, depth))?;
            Ok((depth, spec))
        })
        .collect::<Result<Vec<_>>>()?;
    // generated lazily: one truncation in memory at a time
    let family = specs.into_iter().map(|(depth, spec)| {
        let mut g = spec.generate()?;
        if let Some(alpha) = args.generator.alpha {
            g = g.with_radial_weighting(alpha)?;
        }
        eprintln!("depth {depth}: simplex counts {:?}", g.complex.counts());
        Ok(SweepInput { depth, complex: g.complex, layers: g.layers })
    });
    let table = esa_sweep(family, offspring, args.how_many, args.boundary_factor, cli.common.seed)?;

    let mut csv = Table::new(&["depth", "degree", "eigenvalue_rank", "value", "variant"]);
    for row in &table.rows {
        for d in &row.degrees {
            let mut push = |rank: usize, value: f64, variant: &str| {
                csv.push(vec![row.depth.to_string(), d.degree.to_string(), rank.to_string(), num(value), variant.into()]);
            };
            for (rank, &l) in d.eigenvalues.iter().enumerate() {
                push(rank + 1, l, "truncation");
            }
            for (rank, &l) in d.boundary_eigenvalues.iter().enumerate() {
                push(rank + 1, l, "boundary");
            }
            push(1, d.sigma_min_plus_i, "sigma_min_plus_i");
            push(1, d.boundary_sigma_min_plus_i, "boundary_sigma_min_plus_i");
        }
    }
    Ok(Output { json: json_report(cli, "sweep", &table)?, csv: Some(csv) })
}
