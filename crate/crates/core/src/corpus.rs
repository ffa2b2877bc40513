//! Named example graphs and the exhaustive small-graph corpus.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{bridges, Multigraph, WeightedGraph};

/// Names accepted by [`named`].
pub const NAMES: &[&str] = &[
    "C3",
    "C4",
    "K4",
    "banana3",
    "dumbbell",
    "loop1",
    "wt-point-g1",
    "K4-wt1",
];

const K4_EDGES: [(&str, &str); 6] = [
    ("v1", "v2"),
    ("v1", "v3"),
    ("v1", "v4"),
    ("v2", "v3"),
    ("v2", "v4"),
    ("v3", "v4"),
];

pub fn named(name: &str) -> Result<WeightedGraph> {
    let plain = |vs: &[&str], es: &[(&str, &str)]| -> Result<WeightedGraph> {
        Ok(WeightedGraph::unweighted(Multigraph::new(
            vs.iter().copied(),
            es.iter().copied(),
        )?))
    };
    let none: &[(&str, &str)] = &[];
    match name {
        "C3" => plain(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]),
        "C4" => plain(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        ),
        "K4" => plain(&["v1", "v2", "v3", "v4"], &K4_EDGES),
        "banana3" => plain(&["u", "w"], &[("u", "w"), ("u", "w"), ("u", "w")]),
        // two triangles joined by the bridge v1-v2 (edge 3)
        "dumbbell" => plain(
            &["u1", "u2", "v1", "v2", "w1", "w2"],
            &[
                ("u1", "u2"),
                ("u2", "v1"),
                ("v1", "u1"),
                ("v1", "v2"),
                ("v2", "w1"),
                ("w1", "w2"),
                ("w2", "v2"),
            ],
        ),
        "loop1" => plain(&["v"], &[("v", "v")]),
        "wt-point-g1" => WeightedGraph::new(Multigraph::new(["v"], none.iter().copied())?, vec![1]),
        "K4-wt1" => WeightedGraph::new(
            Multigraph::new(["v1", "v2", "v3", "v4"], K4_EDGES)?,
            vec![1, 0, 0, 0],
        ),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// Generation parameters, echoed into every manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct CorpusParams {
    pub max_v: usize,
    pub max_e: usize,
    pub bridged_only: bool,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub params: CorpusParams,
    pub graphs: Vec<(String, WeightedGraph)>,
}

/// Largest number of edge multisets [`enumerate_small`] will walk through
/// for a single vertex count.
pub const MULTISET_BUDGET: u128 = 4_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All connected loopless multigraphs with `2..=max_v` vertices and at most
/// `max_e` edges, one per isomorphism class.
///
/// Each graph is stored in canonical form: the lexicographically largest
/// adjacency vector over all labelings that sort vertices by a
/// relabeling-invariant signature (degree, then neighbour degrees). Since
/// that set of labelings is itself invariant, the key is exact.
pub fn enumerate_small(max_v: usize, max_e: usize, bridged_only: bool) -> Result<Corpus> {
    if max_v > 6 {
        return Err(Error::BudgetExceeded(format!("max_v = {max_v} > 6")));
    }
    for n in 2..=max_v {
        let pairs = (n * (n - 1) / 2) as u128;
        let count = binomial(pairs + max_e as u128, max_e as u128);
        if count > MULTISET_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "{count} edge multisets for {n} vertices and {max_e} edges"
            )));
        }
    }
    let mut graphs = Vec::new();
    for n in 2..=max_v {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut keys = std::collections::BTreeSet::new();
        let mut mult = vec![0usize; pairs.len()];
        walk_multisets(&mut mult, 0, max_e, &mut |m| {
            let total: usize = m.iter().sum();
            if total + 1 < n || !connected(n, &pairs, m) {
                return;
            }
            keys.insert((total, canonical_key(n, &pairs, m)));
        });
        for (_, key) in keys.into_iter().rev() {
            let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for (p, &(i, j)) in pairs.iter().enumerate() {
                for _ in 0..key[p] {
                    edges.push((i, j));
                }
            }
            let g = Multigraph::from_indexed(ids, edges).expect("enumerated graph is connected");
            if bridged_only && bridges(&g).is_empty() {
                continue;
            }
            graphs.push(g);
        }
    }
    graphs.sort_by_key(|g| (g.vertex_count(), g.edge_count()));
    let mut counters = std::collections::HashMap::new();
    let graphs = graphs
        .into_iter()
        .map(|g| {
            let slot = counters
                .entry((g.vertex_count(), g.edge_count()))
                .or_insert(0usize);
            let name = format!("n{}e{}-{:03}", g.vertex_count(), g.edge_count(), *slot);
            *slot += 1;
            (name, WeightedGraph::unweighted(g))
        })
        .collect();
    Ok(Corpus {
        params: CorpusParams {
            max_v,
            max_e,
            bridged_only,
        },
        graphs,
    })
}

fn walk_multisets(mult: &mut [usize], pos: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
    if pos == mult.len() {
        visit(mult);
        return;
    }
    for k in 0..=left {
        mult[pos] = k;
        walk_multisets(mult, pos + 1, left - k, visit);
    }
    mult[pos] = 0;
}

fn connected(n: usize, pairs: &[(usize, usize)], mult: &[usize]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for (p, &(a, b)) in pairs.iter().enumerate() {
            if mult[p] == 0 {
                continue;
            }
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn canonical_key(n: usize, pairs: &[(usize, usize)], mult: &[usize]) -> Vec<usize> {
    let mut adj = vec![vec![0usize; n]; n];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        adj[a][b] = mult[p];
        adj[b][a] = mult[p];
    }
    let degree: Vec<usize> = adj.iter().map(|row| row.iter().sum()).collect();
    let signature: Vec<(usize, Vec<(usize, usize)>)> = (0..n)
        .map(|v| {
            let mut around: Vec<(usize, usize)> = (0..n)
                .filter(|&w| adj[v][w] > 0)
                .map(|w| (degree[w], adj[v][w]))
                .collect();
            around.sort_unstable();
            (degree[v], around)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| signature[b].cmp(&signature[a]));
    // blocks of equal signature may be permuted freely
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match blocks.last_mut() {
            Some(block) if signature[block[0]] == signature[v] => block.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    let mut best: Option<Vec<usize>> = None;
    let mut labeling = Vec::with_capacity(n);
    permute_blocks(&blocks, 0, &mut labeling, &mut |lab| {
        let key: Vec<usize> = pairs.iter().map(|&(i, j)| adj[lab[i]][lab[j]]).collect();
        if best.as_ref().is_none_or(|b| key > *b) {
            best = Some(key);
        }
    });
    best.expect("at least one labeling")
}

fn permute_blocks(
    blocks: &[Vec<usize>],
    at: usize,
    labeling: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if at == blocks.len() {
        visit(labeling);
        return;
    }
    let mut block = blocks[at].clone();
    let len = block.len();
    heap_permutations(&mut block, len, &mut |perm| {
        let mark = labeling.len();
        labeling.extend_from_slice(perm);
        permute_blocks(blocks, at + 1, labeling, visit);
        labeling.truncate(mark);
    });
}

fn heap_permutations(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(items, k - 1, visit);
}

/// A random connected loopless multigraph: a random spanning tree on
/// `n` vertices plus `extra` random non-loop edges.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Multigraph {
    assert!(n >= 1);
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a.min(b), a.max(b)));
        }
    }
    Multigraph::from_indexed(ids, edges).expect("tree plus edges is connected")
}

/// Random weights with total at most `budget`.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize, budget: i64) -> Vec<i64> {
    let mut weights = vec![0; n];
    let total = rng.gen_range(0..=budget);
    for _ in 0..total {
        weights[rng.gen_range(0..n)] += 1;
    }
    weights
}
