//! Command-line front end. Every subcommand prints a JSON report on stdout;
//! progress and human-readable summaries go to stderr. Exit codes: 0 done,
//! 1 usage or input error, 2 a verified check failed, 3 a search budget ran
//! out before everything was decided.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ramsey_core::canon::canonical_code;
use ramsey_core::densities::{lambda_graph, PairParams};
use ramsey_core::experiments::{
    bound_json, collect_out, corpus_json, mc_csv, mc_json, mc_threshold, out_json, out_report,
    union_bound_report, verify_lemmas, CorpusItem, McConfig, ObservedConstants, ProbGrid,
    WILSON_Z_95,
};
use ramsey_core::format::parse_graph;
use ramsey_core::graph::Graph;
use ramsey_core::hyper::{build_hypergraph, Hypergraph, HypergraphJson, SCHEMA_VERSION};
use ramsey_core::hypertree::{
    hypertree_run, FingerprintTag, HyperTreeTrace, RestrictionMode, StepKind, StopReason,
};
use ramsey_core::rational::RatJson;
use ramsey_core::solver::{arrow_graph, find_crit_with, ArrowOutcome, SolveError};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Clique/cycle Ramsey thresholds: exact densities, arrow decisions, critical extraction, growth traces, experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct PairArgs {
    /// Clique order r
    #[arg(long)]
    r: usize,
    /// Cycle length l
    #[arg(long)]
    ell: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Single,
    Batch,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact density constants for a pair, optionally scoring a graph
    Densities {
        #[command(flatten)]
        pair: PairArgs,
        /// Graph file to score
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Count the cliques, cycles and covered edges of a host graph
    Enum {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Decide whether a graph arrows the pair
    Arrow {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        graph: PathBuf,
        /// Propagation budget for the search
        #[arg(long, default_value_t = ramsey_core::solver::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Extract a minimal arrowing sub-hypergraph from a host graph
    Crit {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = ramsey_core::solver::DEFAULT_BUDGET)]
        budget: u64,
        /// Shuffle the minimization order to diversify the output
        #[arg(long)]
        seed: Option<u64>,
        /// Write the hypergraph dump here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grow a trace from a critical hypergraph dump and fingerprint it
    Hypertree {
        #[command(flatten)]
        pair: PairArgs,
        /// Hypergraph dump to grow (the `crit` output format)
        #[arg(long)]
        crit: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Single)]
        mode: Mode,
        /// Ambient vertex count; the dump's own size when omitted
        #[arg(long)]
        n: Option<usize>,
        /// Companion dump for batch mode, repeatable
        #[arg(long)]
        extra: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo arrow frequencies over a probability grid
    Mc {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        pair: PairArgs,
        /// Prefactors on the threshold scaling, comma separated
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "p_grid",
            required_unless_present = "p_grid"
        )]
        c_grid: Option<Vec<f64>>,
        /// Explicit probabilities, comma separated
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ramsey_core::solver::DEFAULT_BUDGET)]
        budget: u64,
        /// CSV output path; a JSON twin lands next to it
        #[arg(long)]
        out: PathBuf,
    },
    /// Check every applicable invariant over a corpus directory
    Verify {
        /// Directory of .graph (host) and .json (hypergraph dump) files
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, default_value_t = 4)]
        ell: usize,
        #[arg(long, default_value_t = ramsey_core::solver::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Grow every dump in a directory and count fingerprint classes
    OutCollect {
        #[arg(long)]
        inputs: PathBuf,
        /// Ambient vertex count for every run
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, default_value_t = 4)]
        ell: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the stopping-set union bound at one n
    BoundReport {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n: u64,
        /// Observed class count to echo in the report
        #[arg(long)]
        out_size: Option<u64>,
    },
}

fn main() -> ExitCode {
    // clap would exit(2) on a bad invocation; keep 2 reserved for failed
    // checks and report usage errors as 1 like every other input problem.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Densities { pair, graph } => cmd_densities(&pair, graph.as_deref()),
        Cmd::Enum { pair, graph } => cmd_enum(&pair, &graph),
        Cmd::Arrow {
            pair,
            graph,
            budget,
        } => cmd_arrow(&pair, &graph, budget),
        Cmd::Crit {
            pair,
            graph,
            budget,
            seed,
            out,
        } => cmd_crit(&pair, &graph, budget, seed, out.as_deref()),
        Cmd::Hypertree {
            pair,
            crit,
            mode,
            n,
            extra,
            out,
        } => cmd_hypertree(&pair, &crit, mode, n, &extra, out.as_deref()),
        Cmd::Mc {
            n,
            pair,
            c_grid,
            p_grid,
            trials,
            seed,
            budget,
            out,
        } => cmd_mc(n, &pair, c_grid, p_grid, trials, seed, budget, &out),
        Cmd::Verify {
            corpus,
            r,
            ell,
            budget,
        } => cmd_verify(&corpus, r, ell, budget),
        Cmd::OutCollect {
            inputs,
            n,
            r,
            ell,
            out,
        } => cmd_out_collect(&inputs, n, r, ell, out.as_deref()),
        Cmd::BoundReport { pair, n, out_size } => cmd_bound_report(&pair, n, out_size),
    }
}

fn pair_params(pair: &PairArgs) -> Result<PairParams> {
    PairParams::new(pair.r, pair.ell).context("invalid pair parameters")
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let json: HypergraphJson =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Hypergraph::from_json(&json).with_context(|| format!("rebuilding {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

fn cmd_densities(pair: &PairArgs, graph: Option<&Path>) -> Result<u8> {
    let pp = pair_params(pair)?;
    let lambda = match graph {
        Some(path) => Some(RatJson::from(lambda_graph(&load_graph(path)?, &pp))),
        None => None,
    };
    #[derive(Serialize)]
    struct Out {
        schema_version: u32,
        #[serde(rename = "m2_F")]
        m2_f: RatJson,
        #[serde(rename = "m2_H")]
        m2_h: RatJson,
        m2_pair: RatJson,
        /// Absent below the (4,4) corner, where no stopping margin exists.
        epsilon: Option<RatJson>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda: Option<RatJson>,
    }
    let out = Out {
        schema_version: SCHEMA_VERSION,
        m2_f: pp.m2_clique().into(),
        m2_h: pp.m2_cycle().into(),
        m2_pair: pp.m2_pair().into(),
        epsilon: pp.epsilon().ok().map(Into::into),
        lambda,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(0)
}

fn cmd_enum(pair: &PairArgs, graph: &Path) -> Result<u8> {
    let pp = pair_params(pair)?;
    let g = load_graph(graph)?;
    let h = build_hypergraph(&g, &pp);
    #[derive(Serialize)]
    struct Out {
        schema_version: u32,
        cliques: usize,
        cycles: usize,
        hypervertices: usize,
    }
    let out = Out {
        schema_version: SCHEMA_VERSION,
        cliques: h.cliques().count(),
        cycles: h.cycles().count(),
        hypervertices: h.hypervertices().len(),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(0)
}

fn cmd_arrow(pair: &PairArgs, graph: &Path, budget: u64) -> Result<u8> {
    let pp = pair_params(pair)?;
    let g = load_graph(graph)?;
    let dec = arrow_graph(&g, &pp, budget);
    #[derive(Serialize)]
    struct Out {
        schema_version: u32,
        is_ramsey: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<(usize, usize, u8)>>,
        nodes: u64,
        status: &'static str,
    }
    let (status, witness, code) = match &dec.outcome {
        ArrowOutcome::Ramsey => ("ramsey", None, 0),
        ArrowOutcome::NotRamsey(w) => (
            "not_ramsey",
            Some(
                w.colors
                    .iter()
                    .map(|(e, c)| (e.u(), e.v(), *c))
                    .collect::<Vec<_>>(),
            ),
            0,
        ),
        ArrowOutcome::BudgetExceeded => ("budget_exceeded", None, EXIT_INCOMPLETE),
    };
    let out = Out {
        schema_version: SCHEMA_VERSION,
        is_ramsey: dec.is_ramsey(),
        witness,
        nodes: dec.stats.decisions,
        status,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(code)
}

fn cmd_crit(
    pair: &PairArgs,
    graph: &Path,
    budget: u64,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<u8> {
    let pp = pair_params(pair)?;
    let g = load_graph(graph)?;
    match find_crit_with(&g, &pp, budget, seed) {
        Ok(Some(m)) => {
            emit(out, &serde_json::to_string_pretty(&m.to_json())?)?;
            eprintln!(
                "{} hyperedges over {} covered edges",
                m.len(),
                m.hypervertices().len()
            );
            Ok(0)
        }
        Ok(None) => {
            emit(out, "null")?;
            eprintln!("host is not ramsey for the pair; nothing to extract");
            Ok(0)
        }
        Err(e @ SolveError::BudgetExceeded { .. }) => {
            eprintln!("{e}");
            Ok(EXIT_INCOMPLETE)
        }
        Err(e) => bail!(e),
    }
}

fn trace_json(trace: &HyperTreeTrace) -> Result<String> {
    #[derive(Serialize)]
    struct StepOut {
        i: usize,
        kind: &'static str,
        new_vertices: usize,
        lambda: RatJson,
        degenerate: bool,
    }
    #[derive(Serialize)]
    struct FingerprintOut {
        n: usize,
        edges: Vec<[usize; 2]>,
        canonical_code: String,
    }
    #[derive(Serialize)]
    struct Out {
        schema_version: u32,
        steps: Vec<StepOut>,
        stop_reason: &'static str,
        fingerprint: FingerprintOut,
        class: &'static str,
    }
    let d = trace.d_final();
    let steps = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| StepOut {
            i,
            kind: match s.kind() {
                StepKind::Init => "init",
                StepKind::CliqueAttach => "clique",
                StepKind::FlowerAttach => "flower",
            },
            new_vertices: s.new_vertices,
            lambda: s.lambda.into(),
            degenerate: i > 0 && !d.contains(&i),
        })
        .collect();
    let fp = &trace.fingerprint;
    let out = Out {
        schema_version: SCHEMA_VERSION,
        steps,
        stop_reason: match trace.stop_reason {
            StopReason::LambdaReached => "lambda_reached",
            StopReason::StepBudget => "step_budget",
        },
        fingerprint: FingerprintOut {
            n: fp.n(),
            edges: fp.edges().iter().map(|e| [e.u(), e.v()]).collect(),
            canonical_code: hex(&canonical_code(fp)),
        },
        class: match trace.class.tag {
            FingerprintTag::J1 => "j1",
            FingerprintTag::J2 => "j2",
            FingerprintTag::Unclassified => "unclassified",
        },
    };
    Ok(serde_json::to_string_pretty(&out)?)
}

fn cmd_hypertree(
    pair: &PairArgs,
    crit: &Path,
    mode: Mode,
    n: Option<usize>,
    extra: &[PathBuf],
    out: Option<&Path>,
) -> Result<u8> {
    let pp = pair_params(pair)?;
    let h = load_hypergraph(crit)?;
    let extras: Vec<Hypergraph> = extra
        .iter()
        .map(|p| load_hypergraph(p))
        .collect::<Result<_>>()?;
    let mode = match mode {
        Mode::Single => RestrictionMode::SingleInput,
        Mode::Batch => RestrictionMode::Batch(&extras),
    };
    let trace = hypertree_run(&h, &pp, mode, n)?;
    emit(out, &trace_json(&trace)?)?;
    eprintln!(
        "{} steps, stopped by {:?}, fingerprint on {} vertices",
        trace.t(),
        trace.stop_reason,
        trace.fingerprint.n()
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    n: usize,
    pair: &PairArgs,
    c_grid: Option<Vec<f64>>,
    p_grid: Option<Vec<f64>>,
    trials: u64,
    seed: u64,
    budget: u64,
    out: &Path,
) -> Result<u8> {
    let grid = match (c_grid, p_grid) {
        (Some(cs), None) => ProbGrid::Prefactors(cs),
        (None, Some(ps)) => ProbGrid::Explicit(ps),
        _ => bail!("exactly one of --c-grid and --p-grid"),
    };
    let cfg = McConfig {
        n,
        r: pair.r,
        ell: pair.ell,
        grid,
        trials,
        master_seed: seed,
        budget,
        z: WILSON_Z_95,
    };
    let report = mc_threshold(&cfg)?;
    fs::write(out, mc_csv(&report)).with_context(|| format!("writing {}", out.display()))?;
    let json_path = out.with_extension("json");
    fs::write(&json_path, mc_json(&report))
        .with_context(|| format!("writing {}", json_path.display()))?;
    let mut undecided = 0;
    for pt in &report.points {
        undecided += pt.budget_exceeded;
        eprintln!(
            "p={} ramsey {}/{} undecided {} wilson [{}, {}]",
            pt.p,
            pt.ramsey,
            trials,
            pt.budget_exceeded,
            pt.lo,
            pt.hi
        );
    }
    println!("{}", mc_json(&report));
    Ok(if undecided > 0 { EXIT_INCOMPLETE } else { 0 })
}

/// Sorted directory listing: .graph files are host graphs, .json files are
/// hypergraph dumps. Anything else is ignored.
fn load_corpus(dir: &Path) -> Result<Vec<CorpusItem>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.sort();
    let mut corpus = Vec::new();
    for path in paths {
        let name = match path.file_stem() {
            Some(stem) => stem.to_string_lossy().into_owned(),
            None => continue,
        };
        match path.extension().and_then(|e| e.to_str()) {
            Some("graph") => corpus.push(CorpusItem::Plain {
                name,
                g: load_graph(&path)?,
            }),
            Some("json") => corpus.push(CorpusItem::Critical {
                name,
                h: load_hypergraph(&path)?,
            }),
            _ => {}
        }
    }
    Ok(corpus)
}

fn cmd_verify(dir: &Path, r: usize, ell: usize, budget: u64) -> Result<u8> {
    let pp = PairParams::new(r, ell).context("invalid pair parameters")?;
    let corpus = load_corpus(dir)?;
    let report = verify_lemmas(&corpus, &pp, budget);
    for item in &report.items {
        for row in &item.rows {
            let detail = if row.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", row.detail)
            };
            eprintln!(
                "{} {} :: {}{}",
                if row.pass { "pass" } else { "FAIL" },
                item.name,
                row.name,
                detail
            );
        }
        if let Some(why) = &item.incomplete {
            eprintln!("INCOMPLETE {} :: {}", item.name, why);
        }
    }
    println!("{}", corpus_json(&report));
    Ok(if !report.all_pass() {
        EXIT_CHECK_FAILED
    } else if report.any_incomplete() {
        EXIT_INCOMPLETE
    } else {
        0
    })
}

fn cmd_out_collect(
    dir: &Path,
    n: usize,
    r: usize,
    ell: usize,
    out: Option<&Path>,
) -> Result<u8> {
    let pp = PairParams::new(r, ell).context("invalid pair parameters")?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.sort();
    let mut inputs = Vec::new();
    for path in &paths {
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            inputs.push(load_hypergraph(path)?);
        }
    }
    let col = collect_out(&inputs, &pp, n)?;
    let report = out_report(&col, n);
    eprintln!(
        "{} classes from {} inputs at n={} (log2 n = {})",
        report.out_size,
        inputs.len(),
        n,
        report.log2_n
    );
    emit(out, &out_json(&report))?;
    Ok(0)
}

fn cmd_bound_report(pair: &PairArgs, n: u64, out_size: Option<u64>) -> Result<u8> {
    if n < 2 {
        bail!("--n must be at least 2");
    }
    let pp = pair_params(pair)?;
    let observed = ObservedConstants {
        out_size,
        m: None,
        epsilon: None,
    };
    let report = union_bound_report(&pp, n, &observed)?;
    eprintln!("(log2 n)^M        = {}", report.log_factor);
    eprintln!("n^(-epsilon)      = {}", report.epsilon_term);
    eprintln!("n^(-M)            = {}", report.m_term);
    eprintln!("bound at n={}     = {}", n, report.bound);
    eprintln!("scaling prefactor = {}", report.c);
    println!("{}", bound_json(&report));
    Ok(0)
}
