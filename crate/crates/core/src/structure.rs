//! Hyperellipticity, gluing of reduced divisors across a bridge, the rank
//! bounds for bridged graphs, the small-degree claim for genus 3, the
//! Riemann–Roch residual, and Jacobian invariants.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::divisor::{canonical_weighted, laplacian, Divisor};
use crate::enumerate::{for_each_effective, for_each_in_window};
use crate::error::{Error, Result};
use crate::graph::{
    virtual_loopless, weighted_genus, BridgeSplit, Multigraph, VirtualGraph, WeightedGraph,
};
use crate::lattice::{determinant, ClassLattice, IntMatrix};
use crate::rank::{is_reduced, Ranker, WeightedRanker};

/// Outcome of the degree-2 search on the virtual loopless graph.
#[derive(Debug, Clone)]
pub struct HyperellipticSearch {
    pub virtual_graph: VirtualGraph,
    /// A degree-2 rank-1 divisor on the virtual graph, if one exists.
    pub witness: Option<Divisor>,
    /// Distinct degree-2 effective classes examined.
    pub classes: usize,
}

impl HyperellipticSearch {
    pub fn hyperelliptic(&self) -> bool {
        self.witness.is_some()
    }

    pub fn witness_map(&self) -> Option<BTreeMap<String, i64>> {
        self.witness
            .as_ref()
            .map(|w| w.to_map(&self.virtual_graph.graph))
    }
}

pub fn is_hyperelliptic(wg: &WeightedGraph) -> Result<bool> {
    Ok(hyperelliptic_search(wg, 0)?.hyperelliptic())
}

/// Walks the effective degree-2 divisors `[i] + [j]`, `i <= j`, of the
/// virtual graph, skipping classes already seen (by reduced form at
/// `base`), and stops at the first one of rank 1.
pub fn hyperelliptic_search(wg: &WeightedGraph, base: usize) -> Result<HyperellipticSearch> {
    let g = weighted_genus(wg);
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let virtual_graph = virtual_loopless(wg);
    let vg = &virtual_graph.graph;
    let mut ranker = Ranker::with_base(vg, base)?;
    let n = vg.vertex_count();
    let mut seen = HashSet::new();
    let mut witness = None;
    'outer: for i in 0..n {
        for j in i..n {
            let d = Divisor::point(vg, i).shifted(j, 1);
            if !seen.insert(ranker.reduced(&d)?) {
                continue;
            }
            if ranker.rank(&d)? == 1 {
                witness = Some(d);
                break 'outer;
            }
        }
    }
    Ok(HyperellipticSearch {
        classes: seen.len(),
        witness,
        virtual_graph,
    })
}

/// Glues a `v1`-reduced divisor on the first side and a `v2`-reduced divisor
/// on the second side into a `v1`-reduced divisor on the whole graph: all
/// chips at `v2` move across the bridge to `v1`.
pub fn glue_reduced(
    d1: &Divisor,
    d2: &Divisor,
    split: &BridgeSplit,
    graph: &Multigraph,
) -> Result<Divisor> {
    if !is_reduced(d1, &split.g1, split.v1)? {
        return Err(Error::NotReducedInput(split.g1.id(split.v1).to_string()));
    }
    if !is_reduced(d2, &split.g2, split.v2)? {
        return Err(Error::NotReducedInput(split.g2.id(split.v2).to_string()));
    }
    let mut out = Divisor::zero(graph);
    let target = |sub: &Multigraph, v: usize| graph.vertex(sub.id(v));
    for v in 0..split.g1.vertex_count() {
        out[target(&split.g1, v)?] += d1[v];
    }
    for v in 0..split.g2.vertex_count() {
        if v != split.v2 {
            out[target(&split.g2, v)?] += d2[v];
        }
    }
    out[target(&split.g1, split.v1)?] += d2[split.v2];
    Ok(out)
}

/// Ranks on both sides of a bridge and the two upper bounds they give for
/// the rank on the whole graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeReport {
    pub bridge: usize,
    pub d: BTreeMap<String, i64>,
    pub d1: BTreeMap<String, i64>,
    pub d2: BTreeMap<String, i64>,
    pub r: i64,
    pub r1: i64,
    pub r2: i64,
    /// Rank of `d1 - [v1]` on the first side.
    pub r1_minus: i64,
    pub r2_minus: i64,
    pub v1_base_point: bool,
    pub v2_base_point: bool,
    /// Both bridge endpoints are base points of their sides.
    pub basepoint_case: bool,
    /// `r1 + r2`, plus one in the base-point case.
    pub bound_split: i64,
    /// `r1_minus + r2_minus + 2` when neither endpoint is a base point,
    /// otherwise `+ 1`.
    pub bound_shifted: i64,
    pub holds: bool,
}

/// Reusable evaluator for [`BridgeReport`]s at one bridge.
#[derive(Debug, Clone)]
pub struct BridgeChecker {
    graph: Multigraph,
    split: BridgeSplit,
    whole: WeightedRanker,
    side1: WeightedRanker,
    side2: WeightedRanker,
}

impl BridgeChecker {
    pub fn new(wg: &WeightedGraph, bridge: usize) -> Result<Self> {
        let (split, w1, w2) = wg.split_at_bridge(bridge)?;
        Ok(BridgeChecker {
            graph: wg.graph().clone(),
            whole: WeightedRanker::new(wg)?,
            side1: WeightedRanker::new(&w1)?,
            side2: WeightedRanker::new(&w2)?,
            split,
        })
    }

    pub fn split(&self) -> &BridgeSplit {
        &self.split
    }

    pub fn check(&mut self, d: &Divisor) -> Result<BridgeReport> {
        d.check_host(&self.graph)?;
        let s = &self.split;
        let side = |g: &Multigraph, map: &[usize]| {
            Divisor::from_coeffs(g, map.iter().map(|&v| d[v]).collect())
        };
        let d1 = side(&s.g1, &s.map1)?;
        let d2 = side(&s.g2, &s.map2)?;
        let r = self.whole.rank(d)?;
        let r1 = self.side1.rank(&d1)?;
        let r2 = self.side2.rank(&d2)?;
        let r1_minus = self.side1.rank(&d1.shifted(s.v1, -1))?;
        let r2_minus = self.side2.rank(&d2.shifted(s.v2, -1))?;
        // original vertices keep their index in the virtual graph
        let v1_base_point = self.side1.is_base_point(&d1, s.v1)?;
        let v2_base_point = self.side2.is_base_point(&d2, s.v2)?;
        let basepoint_case = v1_base_point && v2_base_point;
        let bound_split = r1 + r2 + i64::from(basepoint_case);
        let neither = !v1_base_point && !v2_base_point;
        let bound_shifted = r1_minus + r2_minus + if neither { 2 } else { 1 };
        Ok(BridgeReport {
            bridge: s.bridge,
            d: d.to_map(&self.graph),
            d1: d1.to_map(&s.g1),
            d2: d2.to_map(&s.g2),
            r,
            r1,
            r2,
            r1_minus,
            r2_minus,
            v1_base_point,
            v2_base_point,
            basepoint_case,
            bound_split,
            bound_shifted,
            holds: r <= bound_split && r <= bound_shifted,
        })
    }
}

pub fn check_bridge_inequalities(
    wg: &WeightedGraph,
    bridge: usize,
    d: &Divisor,
) -> Result<BridgeReport> {
    BridgeChecker::new(wg, bridge)?.check(d)
}

/// Coefficient window scanned by [`check_genus3_claim`].
pub const GENUS3_WINDOW: (i64, i64) = (-2, 3);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genus3Report {
    /// Divisors of degree at most the bound with positive rank, sorted.
    pub violations: Vec<Divisor>,
    pub checked: usize,
    /// Whether the window met every class of each degree `0..=deg_bound`.
    pub window_complete: bool,
}

/// Scans every divisor of degree `0..=deg_bound` with coefficients in
/// [`GENUS3_WINDOW`] on a non-hyperelliptic graph of weighted genus 3 and
/// collects those of positive rank.
pub fn check_genus3_claim(wg: &WeightedGraph, deg_bound: i64) -> Result<Genus3Report> {
    let g = weighted_genus(wg);
    if g != 3 {
        return Err(Error::WrongGenus(g));
    }
    if is_hyperelliptic(wg)? {
        return Err(Error::IsHyperelliptic);
    }
    let graph = wg.graph();
    let lattice = ClassLattice::new(&laplacian(&graph.without_loops()), 0)?;
    let mut wr = WeightedRanker::new(wg)?;
    let mut classes = HashSet::new();
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut failure = None;
    let (lo, hi) = GENUS3_WINDOW;
    for_each_in_window(graph.vertex_count(), lo, hi, |c| {
        let degree: i64 = c.iter().sum();
        if failure.is_some() || degree < 0 || degree > deg_bound {
            return;
        }
        classes.insert(lattice.class_of(c));
        let d = Divisor::from_coeffs(graph, c.to_vec()).expect("window length matches");
        checked += 1;
        match wr.rank(&d) {
            Ok(r) if r > 0 => violations.push(d),
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    violations.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    let per_degree = lattice.order();
    let window_complete = (0..=deg_bound.max(-1))
        .all(|k| classes.iter().filter(|c| c.degree == k).count() as i128 == per_degree);
    Ok(Genus3Report {
        violations,
        checked,
        window_complete,
    })
}

/// `r(d) - r(K - d) - (deg d + 1 - g)`, which should always vanish.
pub fn riemann_roch_residual(wg: &WeightedGraph, d: &Divisor) -> Result<i64> {
    ResidualChecker::new(wg)?.residual(d)
}

/// [`riemann_roch_residual`] with the canonical divisor and ranker kept
/// across calls.
#[derive(Debug, Clone)]
pub struct ResidualChecker {
    canonical: Divisor,
    genus: i64,
    ranker: WeightedRanker,
}

impl ResidualChecker {
    pub fn new(wg: &WeightedGraph) -> Result<Self> {
        Ok(ResidualChecker {
            canonical: canonical_weighted(wg),
            genus: weighted_genus(wg),
            ranker: WeightedRanker::new(wg)?,
        })
    }

    pub fn residual(&mut self, d: &Divisor) -> Result<i64> {
        let dual = self.canonical.checked_sub(d)?;
        let r = self.ranker.rank(d)?;
        let r_dual = self.ranker.rank(&dual)?;
        Ok(r - r_dual - (d.degree() + 1 - self.genus))
    }
}

/// Invariant factors (> 1) of the degree-zero class group. Loops are
/// ignored since they do not change the Laplacian.
pub fn jacobian_invariants(graph: &Multigraph) -> Result<Vec<i64>> {
    let lattice = ClassLattice::new(&laplacian(&graph.without_loops()), 0)?;
    Ok(lattice.invariant_factors())
}

/// Number of spanning trees, as the determinant of the Laplacian with the
/// first row and column removed.
pub fn spanning_tree_count(graph: &Multigraph) -> i128 {
    let lap = laplacian(&graph.without_loops());
    let rows: Vec<Vec<i64>> = lap.iter().skip(1).map(|row| row[1..].to_vec()).collect();
    if rows.is_empty() {
        return 1;
    }
    determinant(&IntMatrix::from_rows(&rows))
}

/// Effective degree-2 divisors on the virtual graph of `wg` and their ranks,
/// without deduplication. Used to cross-check [`hyperelliptic_search`].
pub fn degree_two_ranks(wg: &WeightedGraph) -> Result<Vec<(Divisor, i64)>> {
    let mut wr = WeightedRanker::new(wg)?;
    let vg = wr.virtual_graph().graph.clone();
    let mut out = Vec::new();
    let mut failure = None;
    for_each_effective(vg.vertex_count(), 2, |c| {
        let d = Divisor::from_coeffs(&vg, c.to_vec()).expect("length matches");
        match wr.rank_virtual(&d) {
            Ok(r) => out.push((d, r)),
            Err(e) => failure = Some(e),
        }
        failure.is_none()
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named;
    use crate::rank::RankOracle;

    fn map(g: &Multigraph, entries: &[(&str, i64)]) -> Divisor {
        Divisor::from_map(g, entries.iter().map(|&(k, v)| (k, v))).unwrap()
    }

    #[test]
    fn hyperelliptic_fixtures() {
        let banana = named("banana3").unwrap();
        let search = hyperelliptic_search(&banana, 0).unwrap();
        assert!(search.hyperelliptic());
        let w = search.witness_map().unwrap();
        assert_eq!(
            w,
            BTreeMap::from([("u".to_string(), 1), ("w".to_string(), 1)])
        );
        // the oracle agrees on the witness
        let witness = search.witness.as_ref().unwrap();
        let mut oracle = RankOracle::new(&search.virtual_graph.graph, 4).unwrap();
        assert_eq!(oracle.rank(witness).unwrap(), 1);

        assert!(is_hyperelliptic(&named("dumbbell").unwrap()).unwrap());
        assert!(!is_hyperelliptic(&named("K4").unwrap()).unwrap());
        assert_eq!(
            is_hyperelliptic(&named("C3").unwrap()),
            Err(Error::GenusTooSmall(1))
        );
    }

    #[test]
    fn k4_has_ten_rank_zero_pairs() {
        let all = degree_two_ranks(&named("K4").unwrap()).unwrap();
        assert_eq!(all.len(), 10);
        assert!(all.iter().all(|(_, r)| *r == 0));
    }

    #[test]
    fn hyperelliptic_independent_of_base() {
        for name in ["banana3", "dumbbell", "K4", "K4-wt1"] {
            let wg = named(name).unwrap();
            let first = hyperelliptic_search(&wg, 0).unwrap().hyperelliptic();
            let n = crate::graph::virtual_loopless(&wg).graph.vertex_count();
            for base in 1..n {
                assert_eq!(
                    hyperelliptic_search(&wg, base).unwrap().hyperelliptic(),
                    first
                );
            }
        }
    }

    #[test]
    fn glue_examples() {
        let wg = named("dumbbell").unwrap();
        let g = wg.graph();
        let split = crate::graph::split_at_bridge(g, 3).unwrap();
        let (g1, g2) = (&split.g1, &split.g2);
        let glued =
            glue_reduced(&map(g1, &[("v1", 1)]), &map(g2, &[("v2", 1)]), &split, g).unwrap();
        assert_eq!(glued, map(g, &[("v1", 2)]));
        assert!(is_reduced(&glued, g, g.vertex("v1").unwrap()).unwrap());

        let zero = glue_reduced(&Divisor::zero(g1), &Divisor::zero(g2), &split, g).unwrap();
        assert!(zero.is_zero());

        let one = glue_reduced(&map(g1, &[("u1", 1)]), &Divisor::zero(g2), &split, g).unwrap();
        assert_eq!(one, map(g, &[("u1", 1)]));
        assert!(is_reduced(&one, g, g.vertex("v1").unwrap()).unwrap());

        let bad = glue_reduced(&map(g1, &[("u1", 2)]), &Divisor::zero(g2), &split, g);
        assert_eq!(bad, Err(Error::NotReducedInput("v1".into())));
    }

    #[test]
    fn bridge_report_examples() {
        let wg = named("dumbbell").unwrap();
        let g = wg.graph();
        let rep = check_bridge_inequalities(&wg, 3, &map(g, &[("v1", 1), ("v2", 1)])).unwrap();
        assert_eq!((rep.r, rep.r1, rep.r2), (1, 0, 0));
        assert!(rep.basepoint_case);
        assert_eq!(rep.bound_split, 1);
        assert!(rep.holds);

        let rep = check_bridge_inequalities(&wg, 3, &map(g, &[("v1", 1), ("u1", 1)])).unwrap();
        assert_eq!(rep.r, 0);
        assert!(!rep.v2_base_point);
        assert_eq!(rep.bound_split, rep.r1 + rep.r2);
        assert!(rep.holds);

        let rep = check_bridge_inequalities(&wg, 3, &Divisor::zero(g)).unwrap();
        assert_eq!((rep.r, rep.r1, rep.r2), (0, 0, 0));
        assert!(!rep.basepoint_case);
        assert_eq!(rep.bound_split, 0);
        assert!(rep.holds);

        assert_eq!(
            check_bridge_inequalities(&wg, 0, &Divisor::zero(g)),
            Err(Error::NotABridge(0))
        );
    }

    #[test]
    fn genus3_examples() {
        let k4 = named("K4").unwrap();
        let rep = check_genus3_claim(&k4, 2).unwrap();
        assert!(rep.violations.is_empty());
        assert!(rep.window_complete);
        // widening the bound picks up the canonical divisor, of rank 2
        let wide = check_genus3_claim(&k4, 4).unwrap();
        let k = canonical_weighted(&k4);
        assert!(wide.violations.contains(&k));
        assert_eq!(
            check_genus3_claim(&named("banana3").unwrap(), 2),
            Err(Error::WrongGenus(2))
        );
    }

    #[test]
    fn residual_examples() {
        let c3 = named("C3").unwrap();
        let g = c3.graph();
        assert_eq!(riemann_roch_residual(&c3, &map(g, &[("b", 1)])).unwrap(), 0);
        let k4 = named("K4").unwrap();
        assert_eq!(
            riemann_roch_residual(&k4, &canonical_weighted(&k4)).unwrap(),
            0
        );
        for name in crate::corpus::NAMES {
            let wg = named(name).unwrap();
            assert_eq!(
                riemann_roch_residual(&wg, &Divisor::zero(wg.graph())).unwrap(),
                0
            );
        }
    }

    #[test]
    fn jacobian_examples() {
        let c3 = named("C3").unwrap();
        assert_eq!(jacobian_invariants(c3.graph()).unwrap(), vec![3]);
        assert_eq!(spanning_tree_count(c3.graph()), 3);
        let k4 = named("K4").unwrap();
        assert_eq!(jacobian_invariants(k4.graph()).unwrap(), vec![4, 4]);
        assert_eq!(spanning_tree_count(k4.graph()), 16);
        let path = Multigraph::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert!(jacobian_invariants(&path).unwrap().is_empty());
        assert_eq!(spanning_tree_count(&path), 1);
        let lp = named("loop1").unwrap();
        assert!(jacobian_invariants(lp.graph()).unwrap().is_empty());
    }
}
