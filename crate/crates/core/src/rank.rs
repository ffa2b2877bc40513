//! Reduced divisors and the Baker–Norine rank.
//!
//! Two independent routes to the rank live here. [`Ranker`] works through
//! reduced divisors: a class has an effective member exactly when its reduced
//! representative is effective, and `r(d) = 1 + min_v r(d - [v])` whenever
//! `r(d) >= 0`. [`RankOracle`] instead transcribes the definition literally,
//! enumerating effective divisors and deciding linear equivalence by lattice
//! membership, without ever reducing anything.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::divisor::{div_of, embed, Divisor, IntFunction};
use crate::enumerate::{effective_count, for_each_effective};
use crate::error::{Error, Result};
use crate::graph::{virtual_loopless, Multigraph, VirtualGraph, WeightedGraph};
use crate::lattice::{ClassKey, ClassLattice};

/// A reduced representative together with the function that reaches it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedForm {
    pub reduced: Divisor,
    /// `div(witness) = reduced - input`, with `witness(base) = 0`.
    pub witness: IntFunction,
    pub base: usize,
}

/// Precomputed adjacency for repeated chip-firing on one loopless graph.
#[derive(Debug, Clone)]
pub(crate) struct Reducer {
    base: usize,
    adj: Vec<Vec<(usize, i64)>>,
    /// Vertices grouped by BFS distance from the base.
    levels: Vec<Vec<usize>>,
    dist: Vec<usize>,
}

impl Reducer {
    pub(crate) fn new(graph: &Multigraph, base: usize) -> Result<Self> {
        if graph.has_loops() {
            return Err(Error::HasLoops);
        }
        if base >= graph.vertex_count() {
            return Err(Error::BadBaseVertex(format!("#{base}")));
        }
        let adj = graph.adjacency();
        let n = adj.len();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::from([base]);
        dist[base] = 0;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let depth = dist.iter().copied().max().unwrap_or(0);
        let mut levels = vec![Vec::new(); depth + 1];
        for v in 0..n {
            levels[dist[v]].push(v);
        }
        Ok(Reducer {
            base,
            adj,
            levels,
            dist,
        })
    }

    pub(crate) fn base(&self) -> usize {
        self.base
    }

    pub(crate) fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Runs the burning process from the base and returns the unburnt set
    /// as a mask, or `None` when everything burns.
    fn unburnt(&self, d: &[i64]) -> Option<Vec<bool>> {
        let n = self.adj.len();
        let mut burnt = vec![false; n];
        let mut heat = vec![0i64; n];
        let mut stack = vec![self.base];
        burnt[self.base] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, m) in &self.adj[x] {
                if !burnt[y] {
                    heat[y] += m;
                    if heat[y] > d[y] {
                        burnt[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
        }
        (count < n).then(|| burnt.iter().map(|b| !b).collect())
    }

    /// Fires every vertex of `set` `times` times.
    fn fire(&self, d: &mut [i64], f: &mut [i64], set: &[bool], times: i64) {
        for x in 0..self.adj.len() {
            if !set[x] {
                continue;
            }
            f[x] += times;
            for &(y, m) in &self.adj[x] {
                if !set[y] {
                    d[x] -= times * m;
                    d[y] += times * m;
                }
            }
        }
    }

    /// Replaces `d` by its reduced representative and accumulates the
    /// firing potential into `f`.
    pub(crate) fn reduce_in_place(&self, d: &mut [i64], f: &mut [i64]) {
        // Clear debts level by level, deepest first. Borrowing by the set of
        // vertices at depth >= k only changes depths k (gain) and k-1 (loss).
        for k in (1..self.levels.len()).rev() {
            let mut times = 0;
            for &v in &self.levels[k] {
                if d[v] < 0 {
                    let gain: i64 = self.adj[v]
                        .iter()
                        .filter(|&&(w, _)| self.dist[w] < k)
                        .map(|&(_, m)| m)
                        .sum();
                    times = times.max((-d[v] + gain - 1) / gain);
                }
            }
            if times > 0 {
                let deep: Vec<bool> = self.dist.iter().map(|&x| x >= k).collect();
                self.fire(d, f, &deep, -times);
            }
        }
        while let Some(set) = self.unburnt(d) {
            let mut times = i64::MAX;
            for x in 0..self.adj.len() {
                if set[x] {
                    let out: i64 = self.adj[x]
                        .iter()
                        .filter(|&&(y, _)| !set[y])
                        .map(|&(_, m)| m)
                        .sum();
                    if out > 0 {
                        times = times.min(d[x] / out);
                    }
                }
            }
            debug_assert!((1..i64::MAX).contains(&times));
            self.fire(d, f, &set, times);
        }
    }

    pub(crate) fn is_reduced(&self, d: &[i64]) -> bool {
        (0..d.len()).all(|v| v == self.base || d[v] >= 0) && self.unburnt(d).is_none()
    }
}

fn base_reducer(graph: &Multigraph, d: &Divisor, base: usize) -> Result<Reducer> {
    d.check_host(graph)?;
    if base >= graph.vertex_count() {
        return Err(Error::BadBaseVertex(format!("#{base}")));
    }
    Reducer::new(graph, base)
}

/// Whether `d` is reduced with respect to `base`, decided by burning.
pub fn is_reduced(d: &Divisor, graph: &Multigraph, base: usize) -> Result<bool> {
    Ok(base_reducer(graph, d, base)?.is_reduced(d.coeffs()))
}

/// Literal subset check: nonnegative off the base, and every nonempty set of
/// non-base vertices has a vertex with fewer chips than edges leaving the set.
/// Exponential; refuses graphs with more than 20 non-base vertices.
pub fn is_reduced_by_subsets(d: &Divisor, graph: &Multigraph, base: usize) -> Result<bool> {
    base_reducer(graph, d, base)?;
    let others: Vec<usize> = (0..graph.vertex_count()).filter(|&v| v != base).collect();
    if others.len() > 20 {
        return Err(Error::TooLarge(format!(
            "{} non-base vertices",
            others.len()
        )));
    }
    if others.iter().any(|&v| d[v] < 0) {
        return Ok(false);
    }
    let adj = graph.adjacency();
    for mask in 1u32..(1u32 << others.len()) {
        let mut inside = vec![false; graph.vertex_count()];
        for (i, &v) in others.iter().enumerate() {
            inside[v] = mask >> i & 1 == 1;
        }
        let has_unsaturated = others.iter().filter(|&&v| inside[v]).any(|&v| {
            let out: i64 = adj[v]
                .iter()
                .filter(|&&(w, _)| !inside[w])
                .map(|&(_, m)| m)
                .sum();
            d[v] < out
        });
        if !has_unsaturated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique `base`-reduced divisor equivalent to `d`, with its witness.
pub fn reduce(d: &Divisor, graph: &Multigraph, base: usize) -> Result<ReducedForm> {
    let reducer = base_reducer(graph, d, base)?;
    let mut coeffs = d.coeffs().to_vec();
    let mut witness = IntFunction::zero(graph);
    reducer.reduce_in_place(&mut coeffs, witness.values_mut());
    Ok(ReducedForm {
        reduced: Divisor::from_coeffs(graph, coeffs)?,
        witness,
        base,
    })
}

/// Rank evaluator for one loopless graph.
///
/// Memoises ranks by reduced representative, so every linear-equivalence
/// class is expanded at most once for the lifetime of the value. Create a
/// fresh one per evaluation, or keep one around deliberately for a sweep
/// over a single graph.
#[derive(Debug, Clone)]
pub struct Ranker {
    host: u64,
    reducer: Reducer,
    memo: HashMap<Vec<i64>, i64>,
}

impl Ranker {
    pub fn new(graph: &Multigraph) -> Result<Self> {
        Self::with_base(graph, 0)
    }

    pub fn with_base(graph: &Multigraph, base: usize) -> Result<Self> {
        Ok(Ranker {
            host: graph.fingerprint(),
            reducer: Reducer::new(graph, base)?,
            memo: HashMap::new(),
        })
    }

    pub fn base(&self) -> usize {
        self.reducer.base()
    }

    /// Number of classes expanded so far.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn rank(&mut self, d: &Divisor) -> Result<i64> {
        if d.host() != self.host {
            return Err(Error::HostMismatch);
        }
        Ok(self.rank_coeffs(d.coeffs().to_vec()))
    }

    /// Reduced representative of `d` without the witness.
    pub fn reduced(&self, d: &Divisor) -> Result<Vec<i64>> {
        if d.host() != self.host {
            return Err(Error::HostMismatch);
        }
        let mut coeffs = d.coeffs().to_vec();
        let mut scratch = vec![0; coeffs.len()];
        self.reducer.reduce_in_place(&mut coeffs, &mut scratch);
        Ok(coeffs)
    }

    fn rank_coeffs(&mut self, mut d: Vec<i64>) -> i64 {
        let degree: i64 = d.iter().sum();
        if degree < 0 {
            return -1;
        }
        let mut scratch = vec![0; d.len()];
        self.reducer.reduce_in_place(&mut d, &mut scratch);
        if d[self.reducer.base()] < 0 {
            return -1;
        }
        if let Some(&r) = self.memo.get(&d) {
            return r;
        }
        // vertices holding no chips are the likeliest to drop the rank
        let mut order: Vec<usize> = (0..self.reducer.vertex_count()).collect();
        order.sort_by_key(|&v| (d[v], v));
        let mut best = degree;
        for v in order {
            if best == 0 {
                break;
            }
            let mut next = d.clone();
            next[v] -= 1;
            best = best.min(self.rank_coeffs(next) + 1);
        }
        self.memo.insert(d, best);
        best
    }
}

/// Baker–Norine rank on a loopless graph.
pub fn rank(d: &Divisor, graph: &Multigraph) -> Result<i64> {
    d.check_host(graph)?;
    Ranker::new(graph)?.rank(d)
}

/// Rank by direct enumeration of the definition, using lattice membership
/// for linear equivalence.
#[derive(Debug, Clone)]
pub struct RankOracle {
    host: u64,
    n: usize,
    lattice: ClassLattice,
    /// Class key of each `[v]`, relative to the zero divisor.
    point_residues: Vec<Vec<i64>>,
    factors: Vec<i64>,
    /// Classes of effective divisors, by degree.
    effective: Vec<HashSet<Vec<i64>>>,
    max_degree: i64,
    budget: u128,
    spent: u128,
    cache: HashMap<ClassKey, i64>,
}

/// Default cap on the number of effective divisors the oracle may enumerate.
pub const ORACLE_BUDGET: u128 = 5_000_000;

impl RankOracle {
    /// `max_degree` bounds the degree of divisors the oracle will accept.
    pub fn new(graph: &Multigraph, max_degree: i64) -> Result<Self> {
        Self::with_budget(graph, max_degree, ORACLE_BUDGET)
    }

    pub fn with_budget(graph: &Multigraph, max_degree: i64, budget: u128) -> Result<Self> {
        if graph.has_loops() {
            return Err(Error::HasLoops);
        }
        let n = graph.vertex_count();
        let lattice = ClassLattice::new(&crate::divisor::laplacian(graph), 0)?;
        let factors = lattice.invariant_factors();
        let point_residues = (0..n)
            .map(|v| {
                let mut unit = vec![0; n];
                unit[v] = 1;
                lattice.class_of(&unit).residues
            })
            .collect();
        Ok(RankOracle {
            host: graph.fingerprint(),
            n,
            lattice,
            point_residues,
            factors,
            effective: Vec::new(),
            max_degree,
            budget,
            spent: 0,
            cache: HashMap::new(),
        })
    }

    /// Residues of `base + sign * sum e_v [v]`.
    fn shift(&self, base: &[i64], e: &[i64], sign: i64) -> Vec<i64> {
        let mut out = base.to_vec();
        for (v, &k) in e.iter().enumerate() {
            if k != 0 {
                for (i, r) in out.iter_mut().enumerate() {
                    *r += sign * k * self.point_residues[v][i];
                }
            }
        }
        for (r, &m) in out.iter_mut().zip(&self.factors) {
            *r = r.rem_euclid(m);
        }
        out
    }

    fn ensure_effective(&mut self, degree: i64) -> Result<()> {
        while (self.effective.len() as i64) <= degree {
            let k = self.effective.len() as i64;
            self.spent += effective_count(self.n, k);
            if self.spent > self.budget {
                return Err(Error::TooLarge(format!(
                    "more than {} effective divisors up to degree {k}",
                    self.budget
                )));
            }
            let zero = vec![0; self.factors.len()];
            let mut classes = HashSet::new();
            for_each_effective(self.n, k, |e| {
                classes.insert(self.shift(&zero, e, 1));
                true
            });
            self.effective.push(classes);
        }
        Ok(())
    }

    fn has_effective_member(&self, degree: i64, residues: &[i64]) -> bool {
        degree >= 0 && self.effective[degree as usize].contains(residues)
    }

    pub fn rank(&mut self, d: &Divisor) -> Result<i64> {
        if d.host() != self.host {
            return Err(Error::HostMismatch);
        }
        let degree = d.degree();
        if degree < 0 {
            return Ok(-1);
        }
        if degree > self.max_degree {
            return Err(Error::TooLarge(format!(
                "degree {degree} exceeds oracle limit {}",
                self.max_degree
            )));
        }
        self.ensure_effective(degree)?;
        let key = self.lattice.class_of(d.coeffs());
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let r = self.rank_uncached(&key);
        self.cache.insert(key, r);
        Ok(r)
    }

    fn rank_uncached(&self, key: &ClassKey) -> i64 {
        let degree = key.degree;
        if !self.has_effective_member(degree, &key.residues) {
            return -1;
        }
        let mut s = 0;
        while s < degree {
            let removed = s + 1;
            let all_nonempty = for_each_effective(self.n, removed, |e| {
                let rest = self.shift(&key.residues, e, -1);
                self.has_effective_member(degree - removed, &rest)
            });
            if !all_nonempty {
                return s;
            }
            s += 1;
        }
        degree
    }
}

/// One-shot oracle evaluation; `s_max` caps the accepted degree.
pub fn rank_oracle(d: &Divisor, graph: &Multigraph, s_max: i64) -> Result<i64> {
    d.check_host(graph)?;
    RankOracle::new(graph, s_max)?.rank(d)
}

/// Rank evaluator for a weighted graph, working on its virtual loopless graph.
#[derive(Debug, Clone)]
pub struct WeightedRanker {
    host: Multigraph,
    virt: VirtualGraph,
    ranker: Ranker,
}

impl WeightedRanker {
    pub fn new(wg: &WeightedGraph) -> Result<Self> {
        let virt = virtual_loopless(wg);
        let ranker = Ranker::new(&virt.graph)?;
        Ok(WeightedRanker {
            host: wg.graph().clone(),
            virt,
            ranker,
        })
    }

    pub fn virtual_graph(&self) -> &VirtualGraph {
        &self.virt
    }

    /// Moves a divisor on the original graph onto the virtual graph.
    pub fn lift(&self, d: &Divisor) -> Result<Divisor> {
        embed(d, &self.host, &self.virt.graph)
    }

    pub fn rank(&mut self, d: &Divisor) -> Result<i64> {
        let lifted = self.lift(d)?;
        self.ranker.rank(&lifted)
    }

    /// Rank of a divisor already living on the virtual graph.
    pub fn rank_virtual(&mut self, d: &Divisor) -> Result<i64> {
        self.ranker.rank(d)
    }

    /// Whether virtual vertex `v` is a base point of the complete linear
    /// system of `d`. Every vertex is one when the system is empty.
    pub fn is_base_point(&mut self, d: &Divisor, v: usize) -> Result<bool> {
        let lifted = self.lift(d)?;
        if v >= self.virt.graph.vertex_count() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        let r = self.ranker.rank(&lifted)?;
        if r < 0 {
            return Ok(true);
        }
        Ok(self.ranker.rank(&lifted.shifted(v, -1))? == r)
    }
}

/// Rank of `d` on the virtual loopless graph of `wg`.
pub fn rank_weighted(wg: &WeightedGraph, d: &Divisor) -> Result<i64> {
    WeightedRanker::new(wg)?.rank(d)
}

/// Base-point test for a vertex of the virtual loopless graph, by id.
pub fn is_base_point(wg: &WeightedGraph, d: &Divisor, vertex: &str) -> Result<bool> {
    let mut wr = WeightedRanker::new(wg)?;
    let v = wr.virt.graph.vertex(vertex)?;
    wr.is_base_point(d, v)
}

/// An effective divisor on `G` equivalent to `d` in `G`, when the weighted
/// rank is nonnegative.
///
/// Reduces `d` on the virtual graph and restricts the witness potential to
/// the original vertices. Each inserted vertex starts with no chips, so its
/// potential never exceeds that of its base, and dropping it cannot create
/// debt.
pub fn effective_representative(wg: &WeightedGraph, d: &Divisor) -> Result<Option<Divisor>> {
    let g = wg.graph();
    d.check_host(g)?;
    let virt = virtual_loopless(wg);
    let lifted = embed(d, g, &virt.graph)?;
    let form = reduce(&lifted, &virt.graph, 0)?;
    if !form.reduced.is_effective() {
        return Ok(None);
    }
    let restricted: Vec<i64> = virt.originals.iter().map(|&v| form.witness[v]).collect();
    let f = IntFunction::from_values(g, restricted)?;
    let e = &div_of(&f, g)? + d;
    debug_assert!(e.is_effective());
    Ok(Some(e))
}
