//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use divrank::corpus::{enumerate_small, named};
use divrank::structure::{
    check_genus3_claim, degree_two_ranks, hyperelliptic_search, is_hyperelliptic,
    spanning_tree_count,
};
use divrank::sweep::{self, Outcome, RandomCases, Window};
use divrank::{Error, Multigraph, WeightedGraph};

const SEED: u64 = 0x5eed_2024;

type Criterion = (&'static str, fn() -> Verdict);

type Graphs = Vec<(String, WeightedGraph)>;

fn corpus(max_v: usize, max_e: usize, bridged: bool) -> Graphs {
    enumerate_small(max_v, max_e, bridged)
        .expect("corpus within budget")
        .graphs
}

fn single_vertex() -> (String, WeightedGraph) {
    let g = Multigraph::from_indexed(vec!["v0".into()], vec![]).unwrap();
    ("n1e0-000".into(), WeightedGraph::unweighted(g))
}

fn named_all() -> Graphs {
    divrank::corpus::NAMES
        .iter()
        .map(|n| (n.to_string(), named(n).unwrap()))
        .collect()
}

struct Verdict {
    ok: bool,
    detail: String,
}

fn from_outcomes(parts: &[(&str, &Result<Outcome, Error>)]) -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, part) in parts {
        match part {
            Ok(o) => {
                ok &= o.passed();
                detail.push(format!(
                    "{label}: {} checked, {} failures",
                    o.checked,
                    o.failures.len()
                ));
                if let Some(first) = o.failures.first() {
                    detail.push(format!("first failure {first}"));
                }
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{label}: error {e}"));
            }
        }
    }
    Verdict {
        ok,
        detail: detail.join("; "),
    }
}

fn riemann_roch() -> Verdict {
    let mut graphs = corpus(5, 8, false);
    graphs.insert(0, single_vertex());
    let window = sweep::over_graphs(&graphs, |_, g| {
        sweep::riemann_roch_window(g, Window::new(-2, 3))
    });
    let random = sweep::riemann_roch_random(&RandomCases::new(1000, SEED));
    from_outcomes(&[("window [-2,3]", &window), ("random weighted", &random)])
}

fn oracle() -> Verdict {
    let mut graphs = corpus(5, 8, false);
    graphs.insert(0, single_vertex());
    let out = sweep::over_graphs(&graphs, |_, g| {
        sweep::oracle_window(g.graph(), Window::new(-2, 3))
    });
    from_outcomes(&[("window [-2,3]", &out)])
}

fn reduced() -> Verdict {
    let random = sweep::reduced_contract(1000, SEED);
    let graphs = corpus(4, 6, false);
    let burning = sweep::over_graphs(&graphs, |_, g| {
        sweep::burning_window(g.graph(), Window::new(-1, 3))
    });
    from_outcomes(&[
        ("random triples", &random),
        ("burning vs subsets", &burning),
    ])
}

fn bridges() -> Verdict {
    let graphs = corpus(6, 8, true);
    let bounds = sweep::over_graphs(&graphs, |_, g| sweep::bridge_window(g, Window::new(-1, 2)));
    let sides = sweep::over_graphs(&graphs, |_, g| sweep::hyperelliptic_sides(g));
    from_outcomes(&[("bridge bounds", &bounds), ("hyperelliptic sides", &sides)])
}

fn hyperelliptic() -> Verdict {
    let mut problems = Vec::new();
    let banana = hyperelliptic_search(&named("banana3").unwrap(), 0).unwrap();
    match &banana.witness {
        Some(w) => {
            let mut oracle = divrank::RankOracle::new(&banana.virtual_graph.graph, 2).unwrap();
            if w.degree() != 2 || oracle.rank(w).unwrap() != 1 {
                problems.push("banana3 witness is not degree 2 rank 1".to_string());
            }
        }
        None => problems.push("banana3 not hyperelliptic".into()),
    }
    if !is_hyperelliptic(&named("dumbbell").unwrap()).unwrap() {
        problems.push("dumbbell not hyperelliptic".into());
    }
    let k4 = named("K4").unwrap();
    if is_hyperelliptic(&k4).unwrap() {
        problems.push("K4 hyperelliptic".into());
    }
    let pairs = degree_two_ranks(&k4).unwrap();
    if pairs.len() != 10 || pairs.iter().any(|(_, r)| *r != 0) {
        problems.push(format!(
            "K4 degree-2 ranks {:?}",
            pairs.iter().map(|p| p.1).collect::<Vec<_>>()
        ));
    }
    match is_hyperelliptic(&named("C3").unwrap()) {
        Err(Error::GenusTooSmall(1)) => {}
        other => problems.push(format!("C3 gave {other:?}")),
    }
    Verdict {
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            "banana3 witness {u,w} rank 1, dumbbell true, K4 false over 10 divisors, C3 GenusTooSmall".into()
        } else {
            problems.join("; ")
        },
    }
}

fn genus3() -> Verdict {
    let k4 = check_genus3_claim(&named("K4").unwrap(), 2).map(|r| Outcome {
        checked: r.checked as u64,
        failures: r
            .violations
            .iter()
            .map(|d| serde_json::json!(d.coeffs()))
            .chain((!r.window_complete).then(|| serde_json::json!("window incomplete")))
            .collect(),
    });
    let graphs = corpus(6, 8, false);
    let swept = sweep::over_graphs(&graphs, |_, g| sweep::genus3_claim(g));
    let eligible = graphs
        .iter()
        .filter(|(_, g)| divrank::genus(g.graph()) == 3 && !is_hyperelliptic(g).unwrap())
        .count();
    let mut v = from_outcomes(&[("K4", &k4), ("corpus", &swept)]);
    v.detail.push_str(&format!(
        "; {eligible} non-hyperelliptic genus-3 corpus graphs"
    ));
    v.ok &= eligible > 0;
    v
}

fn coherence() -> Verdict {
    let mut graphs = corpus(6, 8, false);
    graphs.insert(0, single_vertex());
    graphs.extend(named_all());
    // weighted and looped variants of the smaller graphs
    for (name, wg) in corpus(4, 5, false) {
        let n = wg.graph().vertex_count();
        let weights: Vec<i64> = (0..n).map(|v| (v % 2) as i64).collect();
        graphs.push((
            format!("{name}-w"),
            WeightedGraph::new(wg.graph().clone(), weights).unwrap(),
        ));
        graphs.push((
            format!("{name}-l"),
            WeightedGraph::unweighted(wg.graph().with_edge(0, 0)),
        ));
    }
    let out = sweep::over_graphs(&graphs, |_, g| {
        sweep::weighted_coherence(g, Window::new(-1, 2))
    });
    from_outcomes(&[("corpus", &out)])
}

fn metric() -> Verdict {
    let graphs = corpus(4, 5, false);
    let out = sweep::metric_invariance(&graphs, 200, SEED, 4);
    from_outcomes(&[("refinements 1,2,3", &out)])
}

fn jacobian() -> Verdict {
    let mut graphs = corpus(6, 8, false);
    graphs.extend(named_all());
    let out = sweep::over_graphs(&graphs, |_, g| sweep::jacobian_check(g.graph()));
    let mut v = from_outcomes(&[("corpus", &out)]);
    let c3 = spanning_tree_count(named("C3").unwrap().graph());
    let k4 = spanning_tree_count(named("K4").unwrap().graph());
    v.ok &= c3 == 3 && k4 == 16;
    v.detail.push_str(&format!("; C3 -> {c3}, K4 -> {k4}"));
    v
}

fn write_named(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, named(name).unwrap().to_file().to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let dumbbell = write_named(dir.path(), "dumbbell");
    let k4 = write_named(dir.path(), "K4");
    let banana = write_named(dir.path(), "banana3");
    let out_a = dir.path().join("corpus-a").to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["check-bridge".into(), dumbbell.clone()],
        vec![
            "check-rr".into(),
            k4.clone(),
            "--samples".into(),
            "200".into(),
            "--seed".into(),
            SEED.to_string(),
        ],
        vec!["check-rr".into(), dumbbell.clone(), "--window=-1..2".into()],
        vec!["check-genus3".into(), k4.clone()],
        vec!["hyperelliptic".into(), banana],
        vec![
            "corpus".into(),
            "--max-v".into(),
            "4".into(),
            "--max-e".into(),
            "5".into(),
        ],
        vec![
            "corpus".into(),
            "--max-v".into(),
            "4".into(),
            "--max-e".into(),
            "5".into(),
            "--out".into(),
            out_a.clone(),
        ],
    ];
    let mut problems = Vec::new();
    for args in &runs {
        let first = Command::new(env!("CARGO_BIN_EXE_divrank"))
            .args(args)
            .output()
            .unwrap();
        let manifest_a = std::fs::read(Path::new(&out_a).join("manifest.jsonl")).ok();
        let second = Command::new(env!("CARGO_BIN_EXE_divrank"))
            .args(args)
            .output()
            .unwrap();
        let manifest_b = std::fs::read(Path::new(&out_a).join("manifest.jsonl")).ok();
        if !first.status.success() {
            problems.push(format!("{} exited {:?}", args[0], first.status.code()));
        }
        if first.stdout != second.stdout || first.stdout.is_empty() {
            problems.push(format!("{} stdout differs between runs", args[0]));
        }
        if manifest_a != manifest_b {
            problems.push("corpus manifest differs between runs".into());
        }
        for line in String::from_utf8_lossy(&first.stdout).lines() {
            if serde_json::from_str::<serde_json::Value>(line).is_err() {
                problems.push(format!("{} printed a non-JSON line", args[0]));
                break;
            }
        }
    }
    Verdict {
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{} sweeps rerun with identical stdout", runs.len())
        } else {
            problems.join("; ")
        },
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Riemann-Roch residual", riemann_roch),
        ("rank equals enumeration oracle", oracle),
        ("reduced-divisor contract", reduced),
        ("bridge rank bounds", bridges),
        ("hyperellipticity fixtures", hyperelliptic),
        ("genus-3 small-degree claim", genus3),
        ("weighted/virtual coherence", coherence),
        ("metric refinement invariance", metric),
        ("Jacobian order equals spanning trees", jacobian),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let status = if v.ok { "PASS" } else { "FAIL" };
        if !v.ok {
            failed += 1;
        }
        println!(
            "{status} criterion {}: {label} ({}) [{:.1}s]",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed (seed {SEED})",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
