//! Property sweeps over windows of divisors, random samples and the corpus.
//!
//! Every driver returns an [`Outcome`]: how many cases were checked and a
//! JSON description of each failure, in a deterministic order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus::{random_graph, random_weights};
use crate::divisor::{canonical_weighted, div_of, Divisor, IntFunction};
use crate::enumerate::for_each_in_window;
use crate::error::Result;
use crate::graph::{bridges, genus, virtual_loopless, weighted_genus, Multigraph, WeightedGraph};
use crate::metric::{MetricDivisor, MetricPoint, Offset};
use crate::rank::{is_reduced_by_subsets, reduce, RankOracle, Ranker, WeightedRanker};
use crate::structure::{
    check_genus3_claim, hyperelliptic_search, jacobian_invariants, spanning_tree_count,
    BridgeChecker, ResidualChecker,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub checked: u64,
    pub failures: Vec<Value>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn absorb(&mut self, other: Outcome) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }

    fn fail(&mut self, v: Value) {
        self.failures.push(v);
    }
}

/// Inclusive coefficient range for exhaustive divisor sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub const fn new(lo: i64, hi: i64) -> Self {
        Window { lo, hi }
    }
}

impl std::str::FromStr for Window {
    type Err = crate::error::Error;

    /// Parses `a..b`, both ends included.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || crate::error::Error::Parse(format!("window {s:?} is not of the form a..b"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let lo: i64 = a.trim().parse().map_err(|_| bad())?;
        let hi: i64 = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok(Window { lo, hi })
    }
}

/// Runs `check` on every window divisor, stopping at the first error.
fn each_divisor<F>(graph: &Multigraph, w: Window, mut check: F) -> Result<()>
where
    F: FnMut(Divisor) -> Result<()>,
{
    let mut failure = Ok(());
    for_each_in_window(graph.vertex_count(), w.lo, w.hi, |c| {
        if failure.is_ok() {
            let d = Divisor::from_coeffs(graph, c.to_vec()).expect("window length matches");
            failure = check(d);
        }
    });
    failure
}

/// Applies `f` to every graph, in parallel, keeping the input order.
pub fn over_graphs<F>(graphs: &[(String, WeightedGraph)], f: F) -> Result<Outcome>
where
    F: Fn(&str, &WeightedGraph) -> Result<Outcome> + Sync,
{
    let parts: Vec<Result<Outcome>> = graphs.par_iter().map(|(name, g)| f(name, g)).collect();
    let mut total = Outcome::default();
    for part in parts {
        total.absorb(part?);
    }
    Ok(total)
}

fn graph_json(wg: &WeightedGraph) -> Value {
    serde_json::to_value(wg.to_file()).expect("graph file serializes")
}

/// Riemann–Roch residual on every window divisor.
pub fn riemann_roch_window(wg: &WeightedGraph, w: Window) -> Result<Outcome> {
    let mut checker = ResidualChecker::new(wg)?;
    let mut out = Outcome::default();
    each_divisor(wg.graph(), w, |d| {
        let res = checker.residual(&d)?;
        out.checked += 1;
        if res != 0 {
            out.fail(json!({"divisor": d.to_map(wg.graph()), "residual": res}));
        }
        Ok(())
    })?;
    Ok(out)
}

/// Parameters for random weighted cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomCases {
    pub samples: u64,
    pub seed: u64,
    pub max_v: usize,
    pub max_extra_edges: usize,
    pub weight_budget: i64,
    pub window: Window,
}

impl RandomCases {
    pub fn new(samples: u64, seed: u64) -> Self {
        RandomCases {
            samples,
            seed,
            max_v: 5,
            max_extra_edges: 4,
            weight_budget: 2,
            window: Window::new(-2, 3),
        }
    }
}

fn random_weighted<R: Rng>(rng: &mut R, p: &RandomCases) -> WeightedGraph {
    let n = rng.gen_range(1..=p.max_v);
    let extra = rng.gen_range(0..=p.max_extra_edges);
    let mut g = random_graph(rng, n, extra);
    // a loop now and then
    if rng.gen_bool(0.25) {
        let v = rng.gen_range(0..n);
        g = g.with_edge(v, v);
    }
    let weights = random_weights(rng, n, p.weight_budget);
    WeightedGraph::new(g, weights).expect("weights are nonnegative")
}

fn random_divisor<R: Rng>(rng: &mut R, g: &Multigraph, w: Window) -> Divisor {
    let coeffs = (0..g.vertex_count())
        .map(|_| rng.gen_range(w.lo..=w.hi))
        .collect();
    Divisor::from_coeffs(g, coeffs).expect("length matches")
}

/// Riemann–Roch residual on seeded random weighted graphs, possibly with
/// loops, and random divisors.
pub fn riemann_roch_random(p: &RandomCases) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = Outcome::default();
    for sample in 0..p.samples {
        let wg = random_weighted(&mut rng, p);
        let d = random_divisor(&mut rng, wg.graph(), p.window);
        let res = ResidualChecker::new(&wg)?.residual(&d)?;
        out.checked += 1;
        if res != 0 {
            out.fail(json!({
                "sample": sample,
                "graph": graph_json(&wg),
                "divisor": d.to_map(wg.graph()),
                "residual": res,
            }));
        }
    }
    Ok(out)
}

/// Reduced-divisor rank against the enumeration oracle on every window
/// divisor of a loopless graph.
pub fn oracle_window(g: &Multigraph, w: Window) -> Result<Outcome> {
    let max_degree = g.vertex_count() as i64 * w.hi.max(0);
    let mut oracle = RankOracle::new(g, max_degree)?;
    let mut ranker = Ranker::new(g)?;
    let mut out = Outcome::default();
    each_divisor(g, w, |d| {
        let fast = ranker.rank(&d)?;
        let slow = oracle.rank(&d)?;
        out.checked += 1;
        if fast != slow {
            out.fail(json!({"divisor": d.to_map(g), "rank": fast, "oracle": slow}));
        }
        Ok(())
    })?;
    Ok(out)
}

/// Largest number of non-base vertices for the subset-definition check.
pub const SUBSET_CHECK_LIMIT: usize = 8;

/// Seeded checks of reduction: idempotence, the witness identity,
/// uniqueness within a class, and burning against the subset definition.
pub fn reduced_contract(samples: u64, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::default();
    for sample in 0..samples {
        let n = rng.gen_range(1..=SUBSET_CHECK_LIMIT + 1);
        let extra = rng.gen_range(0..=n + 2);
        let g = random_graph(&mut rng, n, extra);
        let base = rng.gen_range(0..n);
        let d = random_divisor(&mut rng, &g, Window::new(-6, 6));
        let mut problems = Vec::new();

        let form = reduce(&d, &g, base)?;
        let again = reduce(&form.reduced, &g, base)?;
        if again.reduced != form.reduced {
            problems.push("not idempotent");
        }
        if div_of(&form.witness, &g)? != form.reduced.checked_sub(&d)? {
            problems.push("witness does not reach the reduced divisor");
        }
        let shift: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
        let moved = d.checked_add(&div_of(&IntFunction::from_values(&g, shift)?, &g)?)?;
        if reduce(&moved, &g, base)?.reduced != form.reduced {
            problems.push("equivalent inputs reduce differently");
        }
        // burning against subsets, on the reduced form and on small
        // nonnegative divisors that may or may not be reduced
        let mut probes = vec![form.reduced.clone()];
        probes.push(random_divisor(&mut rng, &g, Window::new(0, 2)));
        probes.push(d.clone());
        for probe in &probes {
            let burning = crate::rank::is_reduced(probe, &g, base)?;
            let subsets = is_reduced_by_subsets(probe, &g, base)?;
            if burning != subsets {
                problems.push("burning disagrees with the subset definition");
            }
        }
        if !crate::rank::is_reduced(&form.reduced, &g, base)? {
            problems.push("output is not reduced");
        }
        out.checked += 1;
        if !problems.is_empty() {
            out.fail(json!({
                "sample": sample,
                "graph": graph_json(&WeightedGraph::unweighted(g.clone())),
                "base": g.id(base),
                "divisor": d.to_map(&g),
                "problems": problems,
            }));
        }
    }
    Ok(out)
}

/// Burning against the subset definition for every base vertex and every
/// window divisor of a loopless graph.
pub fn burning_window(g: &Multigraph, w: Window) -> Result<Outcome> {
    let mut out = Outcome::default();
    for base in 0..g.vertex_count() {
        each_divisor(g, w, |d| {
            let burning = crate::rank::is_reduced(&d, g, base)?;
            let subsets = is_reduced_by_subsets(&d, g, base)?;
            out.checked += 1;
            if burning != subsets {
                out.fail(json!({"base": g.id(base), "divisor": d.to_map(g), "burning": burning}));
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// Both bridge bounds for every bridge and every window divisor.
/// Failures carry the full report.
pub fn bridge_window(wg: &WeightedGraph, w: Window) -> Result<Outcome> {
    let mut out = Outcome::default();
    for e in bridges(wg.graph()) {
        let mut checker = BridgeChecker::new(wg, e)?;
        each_divisor(wg.graph(), w, |d| {
            let report = checker.check(&d)?;
            out.checked += 1;
            if !report.holds {
                out.fail(serde_json::to_value(&report).expect("report serializes"));
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// On a hyperelliptic bridged graph, each side of each bridge is
/// hyperelliptic or has weighted genus at most 1.
pub fn hyperelliptic_sides(wg: &WeightedGraph) -> Result<Outcome> {
    let mut out = Outcome::default();
    if weighted_genus(wg) < 2 || !hyperelliptic_search(wg, 0)?.hyperelliptic() {
        return Ok(out);
    }
    for e in bridges(wg.graph()) {
        let (_, w1, w2) = wg.split_at_bridge(e)?;
        for side in [&w1, &w2] {
            out.checked += 1;
            let g = weighted_genus(side);
            if g >= 2 && !hyperelliptic_search(side, 0)?.hyperelliptic() {
                out.fail(json!({"bridge": e, "side": graph_json(side)}));
            }
        }
    }
    Ok(out)
}

/// The small-degree claim on a graph of weighted genus 3, skipped (zero
/// checks) for other genera and for hyperelliptic graphs. An incomplete
/// window counts as a failure.
pub fn genus3_claim(wg: &WeightedGraph) -> Result<Outcome> {
    let mut out = Outcome::default();
    if weighted_genus(wg) != 3 || hyperelliptic_search(wg, 0)?.hyperelliptic() {
        return Ok(out);
    }
    let report = check_genus3_claim(wg, 2)?;
    out.checked += report.checked as u64;
    for d in &report.violations {
        out.fail(json!({"divisor": d.to_map(wg.graph())}));
    }
    if !report.window_complete {
        out.fail(json!({"window_complete": false}));
    }
    Ok(out)
}

/// Genus and canonical degree through the virtual graph, and agreement of
/// the weighted rank with the plain rank on unweighted loopless graphs.
pub fn weighted_coherence(wg: &WeightedGraph, w: Window) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = weighted_genus(wg);
    let virt = virtual_loopless(wg);
    out.checked += 2;
    if genus(&virt.graph) != g {
        out.fail(json!({"weighted_genus": g, "virtual_genus": genus(&virt.graph)}));
    }
    let k = canonical_weighted(wg).degree();
    if k != 2 * g - 2 {
        out.fail(json!({"canonical_degree": k, "genus": g}));
    }
    if wg.is_unweighted() && !wg.graph().has_loops() {
        let mut weighted = WeightedRanker::new(wg)?;
        let mut plain = Ranker::new(wg.graph())?;
        each_divisor(wg.graph(), w, |d| {
            let a = weighted.rank(&d)?;
            let b = plain.rank(&d)?;
            out.checked += 1;
            if a != b {
                out.fail(json!({"divisor": d.to_map(wg.graph()), "weighted": a, "plain": b}));
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// Refinement factors compared against the coarsest model.
pub const REFINEMENTS: [usize; 3] = [1, 2, 3];

/// Seeded rational divisors with denominators up to `max_denominator` on
/// graphs drawn from `graphs`; the rank must agree on every refinement.
pub fn metric_invariance(
    graphs: &[(String, WeightedGraph)],
    samples: u64,
    seed: u64,
    max_denominator: i64,
) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::default();
    if graphs.is_empty() {
        return Ok(out);
    }
    for sample in 0..samples {
        let (name, wg) = &graphs[rng.gen_range(0..graphs.len())];
        let edges = wg.graph().edge_count();
        if edges == 0 {
            continue;
        }
        let count = rng.gen_range(1..=3);
        let points: Vec<MetricPoint> = (0..count)
            .map(|_| {
                let q = rng.gen_range(1..=max_denominator);
                MetricPoint {
                    edge: rng.gen_range(0..edges),
                    offset: Offset::new(rng.gen_range(0..=q), q),
                    coeff: [1, 1, 1, 2, -1][rng.gen_range(0..5)],
                }
            })
            .collect();
        let md = MetricDivisor::new(wg, &points)?;
        let n = md.model_size();
        let ranks = REFINEMENTS
            .iter()
            .map(|&k| md.rank_on_model(k * n))
            .collect::<Result<Vec<_>>>()?;
        out.checked += 1;
        if ranks.iter().any(|&r| r != ranks[0]) {
            let pts: Vec<Value> = points
                .iter()
                .map(|p| json!({"edge": p.edge, "offset": p.offset.to_string(), "coeff": p.coeff}))
                .collect();
            out.fail(json!({"sample": sample, "graph": name, "points": pts, "ranks": ranks}));
        }
    }
    Ok(out)
}

/// Product of the invariant factors against the spanning-tree determinant.
pub fn jacobian_check(g: &Multigraph) -> Result<Outcome> {
    let factors = jacobian_invariants(g)?;
    let product: i128 = factors.iter().map(|&f| f as i128).product();
    let trees = spanning_tree_count(g);
    let mut out = Outcome {
        checked: 1,
        failures: Vec::new(),
    };
    if product != trees {
        out.fail(json!({"invariants": factors, "spanning_trees": trees.to_string()}));
    }
    Ok(out)
}
