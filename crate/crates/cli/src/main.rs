use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use divrank::corpus::enumerate_small;
use divrank::metric::{metric_rank, MetricDivisor};
use divrank::structure::{
    check_genus3_claim, hyperelliptic_search, jacobian_invariants, spanning_tree_count,
    BridgeChecker, ResidualChecker,
};
use divrank::sweep::Window;
use divrank::{
    bridges, canonical_weighted, genus, rank, rank_oracle, reduce, weighted_genus, Divisor,
    GraphFile, WeightedGraph, WeightedRanker,
};

#[derive(Parser)]
#[command(
    name = "divrank",
    version,
    about = "Divisor ranks on vertex-weighted graphs"
)]
struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file (JSON).
    graph: PathBuf,
}

#[derive(Args)]
struct DivisorArg {
    /// Divisor as inline JSON (`{"a":1}`) or a path to a JSON file.
    #[arg(long)]
    divisor: String,
}

#[derive(Subcommand)]
enum Command {
    /// Genus and weighted genus.
    Genus(GraphArg),
    /// Canonical divisor of the weighted graph.
    Canonical(GraphArg),
    /// Reduced representative and its witness function.
    Reduce {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        d: DivisorArg,
        /// Base vertex id.
        #[arg(long)]
        base: String,
    },
    /// Rank of a divisor.
    Rank {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        d: DivisorArg,
        /// Rank on the virtual loopless graph, honouring weights and loops.
        #[arg(long)]
        weighted: bool,
    },
    /// Rank by direct enumeration of the definition.
    RankOracle {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        d: DivisorArg,
        /// Largest accepted degree (defaults to the degree of the divisor).
        #[arg(long)]
        max_degree: Option<i64>,
    },
    /// Bridge edge ids.
    Bridges(GraphArg),
    /// The two sides of a bridge.
    Split {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        edge: usize,
    },
    /// Degree-2 rank-1 search on the virtual loopless graph.
    Hyperelliptic(GraphArg),
    /// Rank bounds across bridges, one JSON line per check, summary last.
    CheckBridge {
        #[command(flatten)]
        g: GraphArg,
        /// Check a single divisor instead of a window.
        #[arg(long, conflicts_with = "window")]
        divisor: Option<String>,
        /// Coefficient window `a..b`.
        #[arg(long, default_value = "-1..2", allow_hyphen_values = true)]
        window: Window,
        /// Only this bridge.
        #[arg(long)]
        edge: Option<usize>,
    },
    /// Positive-rank divisors of small degree on a non-hyperelliptic genus-3 graph.
    CheckGenus3 {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long, default_value_t = 2)]
        deg_bound: i64,
    },
    /// Riemann–Roch residual over a window or over seeded random divisors.
    CheckRr {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long, default_value = "-2..3", allow_hyphen_values = true)]
        window: Window,
        /// Random divisors drawn from the window instead of all of them.
        #[arg(long, requires = "seed")]
        samples: Option<u64>,
        #[arg(long, requires = "samples")]
        seed: Option<u64>,
    },
    /// Invariant factors of the degree-zero class group.
    Jacobian(GraphArg),
    /// Rank of a divisor on rational points of the unit-length metric graph.
    MetricRank {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        d: DivisorArg,
        /// Use the coarsest subdivision containing the support (default).
        #[arg(long, conflicts_with = "n")]
        n_auto: bool,
        /// Explicit subdivision factor.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Enumerate small connected loopless multigraphs.
    Corpus {
        #[arg(long)]
        max_v: usize,
        #[arg(long)]
        max_e: usize,
        /// Keep only graphs with a bridge.
        #[arg(long)]
        bridged: bool,
        /// Directory for graph files and the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Run = Result<(Vec<Value>, bool), Failure>;

fn load_graph(path: &Path) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(GraphFile::from_json(&text)?.into_weighted()?)
}

fn inline_or_file(source: &str) -> Result<String, Failure> {
    if source.trim_start().starts_with('{') {
        Ok(source.to_string())
    } else {
        Ok(fs::read_to_string(source).map_err(|e| format!("{source}: {e}"))?)
    }
}

fn load_divisor(wg: &WeightedGraph, source: &str) -> Result<Divisor, Failure> {
    Ok(Divisor::from_json(wg.graph(), &inline_or_file(source)?)?)
}

fn one(v: Value) -> Run {
    Ok((vec![v], true))
}

fn run(command: Command) -> Run {
    match command {
        Command::Genus(a) => {
            let wg = load_graph(&a.graph)?;
            one(json!({"genus": genus(wg.graph()), "weighted_genus": weighted_genus(&wg)}))
        }
        Command::Canonical(a) => {
            let wg = load_graph(&a.graph)?;
            let k = canonical_weighted(&wg);
            one(json!({"canonical": k.to_map(wg.graph()), "degree": k.degree()}))
        }
        Command::Reduce { g, d, base } => {
            let wg = load_graph(&g.graph)?;
            let d = load_divisor(&wg, &d.divisor)?;
            let graph = wg.graph();
            let v = graph
                .index_of(&base)
                .ok_or_else(|| divrank::Error::BadBaseVertex(base.clone()))?;
            let form = reduce(&d, graph, v)?;
            one(json!({
                "base": base,
                "reduced": form.reduced.to_map(graph),
                "witness": form.witness.to_map(graph),
            }))
        }
        Command::Rank { g, d, weighted } => {
            let wg = load_graph(&g.graph)?;
            let d = load_divisor(&wg, &d.divisor)?;
            let r = if weighted {
                WeightedRanker::new(&wg)?.rank(&d)?
            } else {
                rank(&d, wg.graph())?
            };
            one(json!({"rank": r}))
        }
        Command::RankOracle { g, d, max_degree } => {
            let wg = load_graph(&g.graph)?;
            let d = load_divisor(&wg, &d.divisor)?;
            let cap = max_degree.unwrap_or(d.degree().max(0));
            one(json!({"rank": rank_oracle(&d, wg.graph(), cap)?}))
        }
        Command::Bridges(a) => {
            let wg = load_graph(&a.graph)?;
            one(json!({"bridges": bridges(wg.graph())}))
        }
        Command::Split { g, edge } => {
            let wg = load_graph(&g.graph)?;
            let (split, w1, w2) = wg.split_at_bridge(edge)?;
            one(json!({
                "bridge": edge,
                "g1": w1.to_file(),
                "v1": split.g1.id(split.v1),
                "g2": w2.to_file(),
                "v2": split.g2.id(split.v2),
            }))
        }
        Command::Hyperelliptic(a) => {
            let wg = load_graph(&a.graph)?;
            let search = hyperelliptic_search(&wg, 0)?;
            one(json!({
                "hyperelliptic": search.hyperelliptic(),
                "witness": search.witness_map(),
            }))
        }
        Command::CheckBridge {
            g,
            divisor,
            window,
            edge,
        } => {
            let wg = load_graph(&g.graph)?;
            let targets = match edge {
                Some(e) => vec![e],
                None => bridges(wg.graph()),
            };
            let divisors: Vec<Divisor> = match divisor {
                Some(source) => vec![load_divisor(&wg, &source)?],
                None => window_divisors(&wg, window),
            };
            let mut lines = Vec::new();
            let mut violations = 0u64;
            for e in &targets {
                let mut checker = BridgeChecker::new(&wg, *e)?;
                for d in &divisors {
                    let report = checker.check(d)?;
                    if !report.holds {
                        violations += 1;
                    }
                    lines.push(serde_json::to_value(&report)?);
                }
            }
            let checked = lines.len();
            lines.push(json!({"summary": {
                "bridges": targets,
                "checked": checked,
                "violations": violations,
                "holds": violations == 0,
            }}));
            Ok((lines, violations == 0))
        }
        Command::CheckGenus3 { g, deg_bound } => {
            let wg = load_graph(&g.graph)?;
            let report = check_genus3_claim(&wg, deg_bound)?;
            let ok = report.violations.is_empty() && report.window_complete;
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|d| json!(d.to_map(wg.graph())))
                .collect();
            Ok((
                vec![json!({
                    "checked": report.checked,
                    "deg_bound": deg_bound,
                    "violations": violations,
                    "window_complete": report.window_complete,
                })],
                ok,
            ))
        }
        Command::CheckRr {
            g,
            window,
            samples,
            seed,
        } => {
            let wg = load_graph(&g.graph)?;
            let divisors = match (samples, seed) {
                (Some(n), Some(s)) => sampled_divisors(&wg, window, n, s),
                _ => window_divisors(&wg, window),
            };
            let mut checker = ResidualChecker::new(&wg)?;
            let mut failures = Vec::new();
            for d in &divisors {
                let res = checker.residual(d)?;
                if res != 0 {
                    failures.push(json!({"divisor": d.to_map(wg.graph()), "residual": res}));
                }
            }
            let ok = failures.is_empty();
            Ok((
                vec![json!({
                    "checked": divisors.len(),
                    "failures": failures,
                    "window": window,
                    "samples": samples,
                    "seed": seed,
                })],
                ok,
            ))
        }
        Command::Jacobian(a) => {
            let wg = load_graph(&a.graph)?;
            let factors = jacobian_invariants(wg.graph())?;
            let order: i128 = factors.iter().map(|&f| f as i128).product();
            let trees = spanning_tree_count(wg.graph());
            Ok((
                vec![json!({
                    "invariants": factors,
                    "order": order.to_string(),
                    "spanning_trees": trees.to_string(),
                })],
                order == trees,
            ))
        }
        Command::MetricRank { g, d, n_auto: _, n } => {
            let wg = load_graph(&g.graph)?;
            let md = MetricDivisor::from_json(&wg, &inline_or_file(&d.divisor)?)?;
            let model = n.unwrap_or_else(|| md.model_size());
            let r = match n {
                Some(k) => md.rank_on_model(k)?,
                None => metric_rank(&md)?,
            };
            one(json!({"rank": r, "model": model}))
        }
        Command::Corpus {
            max_v,
            max_e,
            bridged,
            out,
        } => {
            let corpus = enumerate_small(max_v, max_e, bridged)?;
            let mut lines = Vec::new();
            let entries: Vec<Value> = corpus
                .graphs
                .iter()
                .map(|(name, wg)| {
                    json!({
                        "name": name,
                        "vertices": wg.graph().vertex_count(),
                        "edges": wg.graph().edge_count(),
                        "bridges": bridges(wg.graph()).len(),
                        "graph": wg.to_file(),
                    })
                })
                .collect();
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                    let mut manifest = String::new();
                    for ((name, wg), entry) in corpus.graphs.iter().zip(&entries) {
                        let file = dir.join(format!("{name}.json"));
                        fs::write(&file, wg.to_file().to_json() + "\n")
                            .map_err(|e| format!("{}: {e}", file.display()))?;
                        manifest.push_str(&serde_json::to_string(entry)?);
                        manifest.push('\n');
                    }
                    let path = dir.join("manifest.jsonl");
                    fs::write(&path, manifest).map_err(|e| format!("{}: {e}", path.display()))?;
                }
                None => lines.extend(entries),
            }
            lines.push(json!({"summary": {"count": corpus.graphs.len(), "params": corpus.params}}));
            Ok((lines, true))
        }
    }
}

fn window_divisors(wg: &WeightedGraph, w: Window) -> Vec<Divisor> {
    let g = wg.graph();
    let mut all = Vec::new();
    divrank::enumerate::for_each_in_window(g.vertex_count(), w.lo, w.hi, |c| {
        all.push(Divisor::from_coeffs(g, c.to_vec()).expect("length matches"));
    });
    all
}

fn sampled_divisors(wg: &WeightedGraph, w: Window, n: u64, seed: u64) -> Vec<Divisor> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = wg.graph();
    (0..n)
        .map(|_| {
            let c = (0..g.vertex_count())
                .map(|_| rng.gen_range(w.lo..=w.hi))
                .collect();
            Divisor::from_coeffs(g, c).expect("length matches")
        })
        .collect()
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(text) = std::env::var("DIVRANK_THREADS") {
        let n: usize = text
            .trim()
            .parse()
            .map_err(|_| format!("DIVRANK_THREADS={text:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli.command));
    match result {
        Ok((lines, ok)) => {
            for line in &lines {
                let text = if cli.pretty {
                    serde_json::to_string_pretty(line)
                } else {
                    serde_json::to_string(line)
                };
                println!("{}", text.expect("JSON value serializes"));
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
