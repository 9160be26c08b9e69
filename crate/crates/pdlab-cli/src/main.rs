//! pdlab: turn plabic-graph diagrams into dimer algebras and run the
//! attached machinery — axiom validation, quivers with potential, graded
//! thinness and exactness certificates, cluster seeds and characters,
//! necklaces, and boundary measurements.
//!
//! Exit codes: 0 = success / PASS, 1 = FAIL (including bad input data),
//! 2 = usage error, 3 = INDETERMINATE (a cap stopped the computation
//! before a verdict).  Verdict commands print a greppable
//! `RESULT: PASS|FAIL|INDETERMINATE` line.

mod render;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pdlab_core::algebra::{boundary_truncation, stable_quotient, verify_thin, ThinData};
use pdlab_core::cluster::{
    cluster_character_thin, exchange_graph, mutate_seed_by_id, seed_from_diagram, Seed, ThinModule,
};
use pdlab_core::corpus;
use pdlab_core::cy::{check_exactness, ALL_POSITIONS};
use pdlab_core::error::Error as CoreError;
use pdlab_core::moves::{parse_label, square_move};
use pdlab_core::plabic::{parse_plabic, PlabicGraph};
use pdlab_core::positroid::{
    all_boundary_measurements, boundary_measurement, necklace_of, weakly_separated, KSubset,
    WeightedPlabic,
};
use pdlab_core::quiver::{label_string, mutate_qp, qp_from_diagram, reduce_qp, IceQP};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pdlab",
    version,
    about = "Plabic-diagram laboratory: dimer algebras, cluster seeds, and boundary measurements"
)]
struct Cli {
    /// Write output to this file instead of stdout
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InputArg {
    /// A plabic-v1 file, or corpus:<name> with name one of
    /// gr25, gr24frozen, triv13, triv13twi, triv13twb
    input: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the diagram axioms, reporting each with a witness
    Validate(InputArg),
    /// List the zig-zag strands and the boundary permutation
    Strands(InputArg),
    /// List every region label
    Labels(InputArg),
    /// Print the diagram type (k, n)
    Type(InputArg),
    /// Print the ice quiver with potential
    Quiver {
        #[command(flatten)]
        input: InputArg,
        /// Remove interior 2-cycles from the potential first
        #[arg(long)]
        reduce: bool,
    },
    /// Mutate the reduced quiver with potential at a vertex sequence
    Mutate {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated vertex labels, applied left to right
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<String>,
    },
    /// Apply the square move at a quadrilateral face
    Squaremove {
        #[command(flatten)]
        input: InputArg,
        /// Label of the face to move at
        #[arg(long)]
        face: String,
    },
    /// Certify thinness of the graded algebra up to a degree cap
    Thin {
        #[command(flatten)]
        input: InputArg,
        /// Total-degree cap (default 2n)
        #[arg(long)]
        maxdeg: Option<u32>,
    },
    /// Graded dimensions of the boundary algebra
    Boundary {
        #[command(flatten)]
        input: InputArg,
        /// Total-degree cap (default 2n)
        #[arg(long)]
        maxdeg: Option<u32>,
        /// Aggregate the table by degree alone
        #[arg(long)]
        dims: bool,
    },
    /// Graded dimensions of the quotient by the boundary idempotents
    Stabledim {
        #[command(flatten)]
        input: InputArg,
        /// Total-degree cap (default 2n)
        #[arg(long)]
        maxdeg: Option<u32>,
    },
    /// Certify exactness of the sliced resolution complexes
    Cycheck {
        #[command(flatten)]
        input: InputArg,
        /// Total-degree cap (default 2n)
        #[arg(long)]
        maxdeg: Option<u32>,
        /// Comma-separated positions out of -3,-2,-1,0 (default: all)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        positions: Option<Vec<i32>>,
    },
    /// Print the initial cluster seed
    Seed(InputArg),
    /// Mutate the cluster seed at a vertex sequence
    Mutateseed {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated vertex labels, applied left to right
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<String>,
    },
    /// Explore the exchange graph from the initial seed
    Exchangegraph {
        #[command(flatten)]
        input: InputArg,
        /// Stop after discovering this many seeds
        #[arg(long, default_value_t = 64)]
        max: usize,
        /// Emit Graphviz DOT instead of tables
        #[arg(long)]
        dot: bool,
    },
    /// Evaluate the cluster character of a thin module
    Char {
        #[command(flatten)]
        input: InputArg,
        /// Signed vertex labels, e.g. 12,45,-25 (omit for the zero index)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        index: Vec<String>,
        /// Module description: support=v1,v2;arrows=a1,a2
        #[arg(long)]
        module: String,
    },
    /// Print the boundary-label necklace
    Necklace(InputArg),
    /// Check pairwise weak separation of all region labels
    Wstest(InputArg),
    /// Boundary measurements of a weighted diagram
    Measure {
        #[command(flatten)]
        input: InputArg,
        /// Weight file with `edge <id1> <id2> <p/q>` lines (default: all 1)
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Single subset to measure, e.g. 1,3 (omit for the full table)
        #[arg(long)]
        subset: Option<String>,
        /// Sample random positive weights from this seed instead
        #[arg(long, num_args = 0..=1, default_missing_value = "0")]
        rng_seed: Option<u64>,
    },
    /// Verify cluster variables specialize to boundary measurements
    Verifygl {
        #[command(flatten)]
        input: InputArg,
        /// Weight file with `edge <id1> <id2> <p/q>` lines (default: all 1)
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Comma-separated face labels to mutate through (default: none)
        #[arg(long, value_delimiter = ',')]
        word: Vec<String>,
        /// Sample random positive weights from this seed instead
        #[arg(long, num_args = 0..=1, default_missing_value = "0")]
        rng_seed: Option<u64>,
    },
    /// Render the quiver (or the plabic graph itself) as SVG
    Svg {
        #[command(flatten)]
        input: InputArg,
        /// Draw the plabic graph instead of its quiver
        #[arg(long)]
        graph: bool,
        /// Remove interior 2-cycles from the quiver first
        #[arg(long)]
        reduce: bool,
    },
}

/// CLI-level failure with an exit code derived from its kind.
#[derive(Debug)]
enum CliError {
    Core(CoreError),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{}", e),
            CliError::Usage(m) => write!(f, "{}", m),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::NotFound(_) | CoreError::Unsupported(_) => EXIT_USAGE,
                CoreError::CapExceeded(_) => EXIT_INDETERMINATE,
                _ => EXIT_FAIL,
            },
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = match run(&cli.cmd, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    };
    match &cli.output {
        None => print!("{}", out),
        Some(path) => {
            if let Err(e) = fs::write(path, &out) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    ExitCode::from(code)
}

fn load_text(input: &str) -> CliResult<String> {
    if let Some(name) = input.strip_prefix("corpus:") {
        corpus::lookup(name).map(str::to_string).ok_or_else(|| {
            let names: Vec<&str> = corpus::ALL.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!(
                "unknown corpus entry '{}'; available: {}",
                name,
                names.join(", ")
            ))
        })
    } else {
        fs::read_to_string(input)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {}", input, e)))
    }
}

fn load_graph(input: &str) -> CliResult<PlabicGraph> {
    Ok(parse_plabic(&load_text(input)?)?)
}

fn reduced_qp(g: &PlabicGraph) -> CliResult<IceQP> {
    let (qp, _) = reduce_qp(&qp_from_diagram(g)?)?;
    Ok(qp)
}

fn default_maxdeg(g: &PlabicGraph, maxdeg: Option<u32>) -> u32 {
    maxdeg.unwrap_or(2 * g.n as u32)
}

fn load_weighted(
    g: &PlabicGraph,
    weights: &Option<PathBuf>,
    rng_seed: Option<u64>,
) -> CliResult<WeightedPlabic> {
    match (weights, rng_seed) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {}", path.display(), e)))?;
            Ok(WeightedPlabic::from_text(g, &text)?)
        }
        (None, Some(seed)) => Ok(WeightedPlabic::sample(g, seed)),
        (None, None) => Ok(WeightedPlabic::unit(g)),
    }
}

fn run(cmd: &Cmd, out: &mut String) -> CliResult<u8> {
    match cmd {
        Cmd::Validate(input) => cmd_validate(&input.input, out),
        Cmd::Strands(input) => cmd_strands(&input.input, out),
        Cmd::Labels(input) => cmd_labels(&input.input, out),
        Cmd::Type(input) => cmd_type(&input.input, out),
        Cmd::Quiver { input, reduce } => cmd_quiver(&input.input, *reduce, out),
        Cmd::Mutate { input, at } => cmd_mutate(&input.input, at, out),
        Cmd::Squaremove { input, face } => cmd_squaremove(&input.input, face, out),
        Cmd::Thin { input, maxdeg } => cmd_thin(&input.input, *maxdeg, out),
        Cmd::Boundary {
            input,
            maxdeg,
            dims,
        } => cmd_boundary(&input.input, *maxdeg, *dims, out),
        Cmd::Stabledim { input, maxdeg } => cmd_stabledim(&input.input, *maxdeg, out),
        Cmd::Cycheck {
            input,
            maxdeg,
            positions,
        } => cmd_cycheck(&input.input, *maxdeg, positions.as_deref(), out),
        Cmd::Seed(input) => cmd_seed(&input.input, &[], out),
        Cmd::Mutateseed { input, at } => cmd_seed(&input.input, at, out),
        Cmd::Exchangegraph { input, max, dot } => cmd_exchangegraph(&input.input, *max, *dot, out),
        Cmd::Char {
            input,
            index,
            module,
        } => cmd_char(&input.input, index, module, out),
        Cmd::Necklace(input) => cmd_necklace(&input.input, out),
        Cmd::Wstest(input) => cmd_wstest(&input.input, out),
        Cmd::Measure {
            input,
            weights,
            subset,
            rng_seed,
        } => cmd_measure(&input.input, weights, subset.as_deref(), *rng_seed, out),
        Cmd::Verifygl {
            input,
            weights,
            word,
            rng_seed,
        } => cmd_verifygl(&input.input, weights, word, *rng_seed, out),
        Cmd::Svg {
            input,
            graph,
            reduce,
        } => cmd_svg(&input.input, *graph, *reduce, out),
    }
}

fn cmd_validate(input: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let report = g.validate_axioms();
    let _ = write!(out, "{}", report);
    let passed = report.all_passed();
    let _ = writeln!(out, "RESULT: {}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_strands(input: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let strands = g.strands()?;
    let _ = writeln!(out, "source\ttarget\tturns");
    for s in &strands {
        let turns: Vec<&str> = s.nodes.iter().map(|&v| g.nodes[v].name.as_str()).collect();
        let _ = writeln!(out, "{}\t{}\t{}", s.source, s.target, turns.join(" "));
    }
    Ok(EXIT_PASS)
}

fn cmd_labels(input: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let faces = g.faces()?;
    let labels = g.face_labels()?;
    let _ = writeln!(out, "face\tkind\tarc\tlabel");
    for (i, f) in faces.faces.iter().enumerate() {
        let (kind, arc) = match f.arc {
            Some(k) => ("boundary", k.to_string()),
            None => ("internal", "-".to_string()),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            i,
            kind,
            arc,
            label_string(&labels[i], g.n)
        );
    }
    Ok(EXIT_PASS)
}

fn cmd_type(input: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let (k, n) = g.diagram_type()?;
    let _ = writeln!(out, "k\tn");
    let _ = writeln!(out, "{}\t{}", k, n);
    Ok(EXIT_PASS)
}

fn cmd_quiver(input: &str, reduce: bool, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let qp = if reduce {
        reduced_qp(&g)?
    } else {
        qp_from_diagram(&g)?
    };
    out.push_str(&qp.dump());
    Ok(EXIT_PASS)
}

fn cmd_mutate(input: &str, at: &[String], out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let mut qp = reduced_qp(&g)?;
    for v in at {
        qp = mutate_qp(&qp, v)?;
    }
    out.push_str(&qp.dump());
    Ok(EXIT_PASS)
}

fn cmd_squaremove(input: &str, face: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let moved = square_move(&g, face)?;
    out.push_str(&moved.serialize());
    Ok(EXIT_PASS)
}

/// Aggregate the graded dimension table of the whole truncated algebra.
fn full_dim_table(td: &ThinData) -> Vec<(String, String, u32, usize)> {
    use std::collections::BTreeMap;
    let mut acc: BTreeMap<(String, String, u32), usize> = BTreeMap::new();
    for (v, w, wt, bucket) in td.buckets_iter() {
        if bucket.dim == 0 {
            continue;
        }
        let total: u32 = wt.iter().sum();
        *acc.entry((
            td.qp.quiver.vertices[v].id.clone(),
            td.qp.quiver.vertices[w].id.clone(),
            total,
        ))
        .or_default() += bucket.dim;
    }
    acc.into_iter()
        .map(|((from, to, deg), dim)| (from, to, deg, dim))
        .collect()
}

fn cmd_thin(input: &str, maxdeg: Option<u32>, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let d = default_maxdeg(&g, maxdeg);
    let qp = qp_from_diagram(&g)?;
    let (td, report) = verify_thin(&qp, d)?;
    let _ = writeln!(out, "from\tto\tdegree\tdim");
    for (from, to, deg, dim) in full_dim_table(&td) {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", from, to, deg, dim);
    }
    for f in &report.failures {
        let _ = writeln!(out, "witness: {}", f);
    }
    let _ = writeln!(
        out,
        "degree cap {}; {} graded pieces; max piece dimension {}",
        report.maxdeg, report.bucket_count, report.max_bucket_dim
    );
    let _ = writeln!(
        out,
        "RESULT: {}",
        if report.passed { "PASS" } else { "FAIL" }
    );
    Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_boundary(input: &str, maxdeg: Option<u32>, dims: bool, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let d = default_maxdeg(&g, maxdeg);
    let qp = qp_from_diagram(&g)?;
    let (td, _) = verify_thin(&qp, d)?;
    let rows = boundary_truncation(&td);
    if dims {
        let mut by_degree: std::collections::BTreeMap<u32, usize> = Default::default();
        for r in &rows {
            *by_degree.entry(r.degree).or_default() += r.dim;
        }
        let _ = writeln!(out, "degree\tdim");
        for (deg, dim) in by_degree {
            let _ = writeln!(out, "{}\t{}", deg, dim);
        }
    } else {
        let _ = writeln!(out, "from\tto\tdegree\tdim");
        for r in &rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", r.from, r.to, r.degree, r.dim);
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_stabledim(input: &str, maxdeg: Option<u32>, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let d = default_maxdeg(&g, maxdeg);
    let qp = qp_from_diagram(&g)?;
    let (td, _) = verify_thin(&qp, d)?;
    let report = stable_quotient(&td);
    let _ = writeln!(out, "degree\tdim");
    for (deg, dim) in report.dims.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}", deg, dim);
    }
    match report.top_degree {
        Some(t) => {
            let _ = writeln!(out, "top degree {}", t);
        }
        None => {
            let _ = writeln!(out, "top degree unbounded");
        }
    }
    match report.total_dim {
        Some(t) => {
            let _ = writeln!(out, "total dimension {}", t);
        }
        None => {
            let _ = writeln!(out, "total dimension infinite");
        }
    }
    for (v, w) in &report.infinite_pairs {
        let _ = writeln!(out, "unbounded pair: {} -> {}", v, w);
    }
    Ok(EXIT_PASS)
}

fn cmd_cycheck(
    input: &str,
    maxdeg: Option<u32>,
    positions: Option<&[i32]>,
    out: &mut String,
) -> CliResult<u8> {
    let g = load_graph(input)?;
    let d = default_maxdeg(&g, maxdeg);
    let positions: Vec<i32> = positions
        .map(|p| p.to_vec())
        .unwrap_or_else(|| ALL_POSITIONS.to_vec());
    for &p in &positions {
        if !ALL_POSITIONS.contains(&p) {
            return Err(CliError::Usage(format!(
                "position {} is not one of -3,-2,-1,0",
                p
            )));
        }
    }
    let qp = qp_from_diagram(&g)?;
    let (td, thin_report) = verify_thin(&qp, d)?;
    if !thin_report.passed {
        for f in &thin_report.failures {
            let _ = writeln!(out, "witness: {}", f);
        }
        let _ = writeln!(out, "the algebra is not thin at degree {}", d);
        let _ = writeln!(out, "RESULT: FAIL");
        return Ok(EXIT_FAIL);
    }
    let _ = writeln!(out, "vertex\tslice\tposition\thomology_dim");
    let mut all_passed = true;
    let mut vacuous = false;
    let mut summaries = Vec::new();
    for v in 0..qp.quiver.vertices.len() {
        let report = check_exactness(&td, v, &positions)?;
        for f in &report.failures {
            match f {
                pdlab_core::cy::CyFailure::Homology {
                    weight,
                    position,
                    dim,
                } => {
                    let _ = writeln!(
                        out,
                        "{}\t{:?}\t{}\t{}",
                        report.vertex, weight, position, dim
                    );
                }
                pdlab_core::cy::CyFailure::DSquared { weight, which } => {
                    let _ = writeln!(out, "{}\t{:?}\t{}\t-", report.vertex, weight, which);
                }
            }
        }
        all_passed &= report.passed;
        vacuous |= report.slices == 0;
        summaries.push(format!(
            "vertex {}: {} slices at positions {:?}: {}",
            report.vertex,
            report.slices,
            report.positions,
            if report.passed { "exact" } else { "NOT exact" }
        ));
    }
    for s in &summaries {
        let _ = writeln!(out, "{}", s);
    }
    let (verdict, code) = if !all_passed {
        ("FAIL", EXIT_FAIL)
    } else if vacuous {
        ("INDETERMINATE", EXIT_INDETERMINATE)
    } else {
        ("PASS", EXIT_PASS)
    };
    let _ = writeln!(out, "RESULT: {}", verdict);
    Ok(code)
}

fn write_seed(seed: &Seed, out: &mut String) {
    let labels = seed.labels();
    let _ = writeln!(out, "slot\tvertex\tkind\tvariable");
    for (i, v) in seed.quiver.vertices.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            i,
            v.id,
            if v.frozen { "f" } else { "m" },
            seed.vars[i].render(&labels)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "arrow\ttail\thead");
    for a in &seed.quiver.arrows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            a.id, seed.quiver.vertices[a.tail].id, seed.quiver.vertices[a.head].id
        );
    }
}

fn cmd_seed(input: &str, at: &[String], out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let mut seed = seed_from_diagram(&g)?;
    for v in at {
        seed = mutate_seed_by_id(&seed, v)?;
    }
    write_seed(&seed, out);
    Ok(EXIT_PASS)
}

fn cmd_exchangegraph(input: &str, max: usize, dot: bool, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let start = seed_from_diagram(&g)?;
    let graph = exchange_graph(&start, max)?;
    if dot {
        let _ = writeln!(out, "graph exchange {{");
        for i in 0..graph.seeds.len() {
            let _ = writeln!(out, "  s{};", i);
        }
        for e in &graph.edges {
            let _ = writeln!(
                out,
                "  s{} -- s{} [label=\"{}\"];",
                e.from, e.to, graph.seeds[e.from].quiver.vertices[e.slot].id
            );
        }
        let _ = writeln!(out, "}}");
    } else {
        let _ = writeln!(out, "seed\tmutable_variables");
        for (i, s) in graph.seeds.iter().enumerate() {
            let labels = s.labels();
            let vars: Vec<String> = s
                .vars
                .iter()
                .enumerate()
                .filter(|(slot, _)| s.quiver.is_mutable(*slot))
                .map(|(_, v)| v.render(&labels))
                .collect();
            let _ = writeln!(out, "{}\t{}", i, vars.join(", "));
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "from\tto\tvertex");
        for e in &graph.edges {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                e.from, e.to, graph.seeds[e.from].quiver.vertices[e.slot].id
            );
        }
    }
    let _ = writeln!(
        out,
        "seeds {}; edges {}; distinct mutable variables {}; complete {}",
        graph.seeds.len(),
        graph.edges.len(),
        graph.mutable_variable_count(),
        graph.complete
    );
    if graph.complete {
        let _ = writeln!(out, "RESULT: PASS");
        Ok(EXIT_PASS)
    } else {
        let _ = writeln!(out, "RESULT: INDETERMINATE");
        Ok(EXIT_INDETERMINATE)
    }
}

fn parse_index(entries: &[String], qp: &IceQP) -> CliResult<Vec<i64>> {
    let mut index = vec![0i64; qp.quiver.vertices.len()];
    for e in entries {
        let e = e.trim();
        if e.is_empty() {
            continue;
        }
        let (sign, name) = match e.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, e.strip_prefix('+').unwrap_or(e)),
        };
        let slot = qp
            .quiver
            .vertex_index(name)
            .ok_or_else(|| CliError::Usage(format!("index names unknown vertex '{}'", name)))?;
        index[slot] += sign;
    }
    Ok(index)
}

fn parse_module(text: &str, qp: &IceQP) -> CliResult<ThinModule> {
    let mut support = BTreeSet::new();
    let mut arrows = BTreeSet::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((key, val)) = part.split_once('=') else {
            return Err(CliError::Usage(format!(
                "module part '{}' is not key=value",
                part
            )));
        };
        match key.trim() {
            "support" => {
                for name in val.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let v = qp.quiver.vertex_index(name).ok_or_else(|| {
                        CliError::Usage(format!("module support names unknown vertex '{}'", name))
                    })?;
                    support.insert(v);
                }
            }
            "arrows" => {
                for name in val.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let a = qp.quiver.arrow_index(name).ok_or_else(|| {
                        CliError::Usage(format!("module names unknown arrow '{}'", name))
                    })?;
                    arrows.insert(a);
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown module key '{}' (use support, arrows)",
                    other
                )));
            }
        }
    }
    Ok(ThinModule { support, arrows })
}

fn cmd_char(input: &str, index: &[String], module: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let qp = reduced_qp(&g)?;
    let idx = parse_index(index, &qp)?;
    let m = parse_module(module, &qp)?;
    let phi = cluster_character_thin(&qp, &idx, &m)?;
    let labels: Vec<String> = qp.quiver.vertices.iter().map(|v| v.id.clone()).collect();
    let _ = writeln!(out, "{}", phi.render(&labels));
    Ok(EXIT_PASS)
}

fn cmd_necklace(input: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let nk = necklace_of(&g)?;
    let _ = writeln!(out, "arc\tlabel");
    for (i, e) in nk.entries.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}", i + 1, e.label());
    }
    let _ = writeln!(out, "orientation reverse (entries are arc labels as drawn)");
    Ok(EXIT_PASS)
}

fn cmd_wstest(input: &str, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let labels = g.face_labels()?;
    let subsets: Vec<KSubset> = labels
        .iter()
        .map(|l| KSubset::from_set(g.n, l))
        .collect::<Result<_, _>>()?;
    let _ = writeln!(out, "label\tlabel");
    let mut pairs = 0usize;
    let mut violations = 0usize;
    for i in 0..subsets.len() {
        for j in (i + 1)..subsets.len() {
            pairs += 1;
            if !weakly_separated(&subsets[i], &subsets[j])? {
                violations += 1;
                let _ = writeln!(out, "{}\t{}", subsets[i].label(), subsets[j].label());
            }
        }
    }
    let _ = writeln!(out, "{} pairs; {} violations", pairs, violations);
    let passed = violations == 0;
    let _ = writeln!(out, "RESULT: {}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_measure(
    input: &str,
    weights: &Option<PathBuf>,
    subset: Option<&str>,
    rng_seed: Option<u64>,
    out: &mut String,
) -> CliResult<u8> {
    let g = load_graph(input)?;
    let wg = load_weighted(&g, weights, rng_seed)?;
    let _ = writeln!(out, "subset\tvalue");
    match subset {
        Some(arg) => {
            let set = parse_label(arg, g.n)?;
            let ks = KSubset::from_set(g.n, &set)?;
            let value = boundary_measurement(&wg, &ks)?;
            let _ = writeln!(out, "{}\t{}", ks.label(), value);
        }
        None => {
            for (elems, value) in all_boundary_measurements(&wg)? {
                let set: BTreeSet<usize> = elems.into_iter().collect();
                let _ = writeln!(out, "{}\t{}", label_string(&set, g.n), value);
            }
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_verifygl(
    input: &str,
    weights: &Option<PathBuf>,
    word: &[String],
    rng_seed: Option<u64>,
    out: &mut String,
) -> CliResult<u8> {
    let g = load_graph(input)?;
    let wg = load_weighted(&g, weights, rng_seed)?;
    let word_refs: Vec<&str> = word.iter().map(String::as_str).collect();
    let ok = pdlab_core::positroid::verify_specialization(&g, &wg, &word_refs)?;
    let _ = writeln!(
        out,
        "word [{}]: every mutable cluster variable {} its region's measurement",
        word.join(", "),
        if ok { "matches" } else { "DIFFERS from" }
    );
    let _ = writeln!(out, "RESULT: {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_svg(input: &str, graph: bool, reduce: bool, out: &mut String) -> CliResult<u8> {
    let g = load_graph(input)?;
    let svg = if graph {
        render::graph_svg(&g)?
    } else {
        let qp = if reduce {
            reduced_qp(&g)?
        } else {
            qp_from_diagram(&g)?
        };
        render::quiver_svg(&g, &qp)?
    };
    out.push_str(&svg);
    Ok(EXIT_PASS)
}
