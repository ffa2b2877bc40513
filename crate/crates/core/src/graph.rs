//! Finite connected multigraphs, vertex weights and the virtual loopless graph.
//!
//! Vertices carry opaque string ids but are addressed internally by their
//! position in declaration order. Edges are addressed by their position in the
//! edge list, which makes parallel edges and individual bridges nameable.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite connected multigraph. Loops and parallel edges are allowed.
#[derive(Debug, Clone)]
pub struct Multigraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    fingerprint: u64,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.edges == other.edges
    }
}

impl Eq for Multigraph {}

impl Multigraph {
    /// Builds and validates a graph from vertex ids and id-pair edges.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let ids: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let edges: Vec<(String, String)> = edges
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        validate(&ids, &edges)?;
        let index = index_ids(&ids);
        let edges = edges.iter().map(|(a, b)| (index[a], index[b])).collect();
        Ok(Self::assemble(ids, index, edges))
    }

    /// Builds a graph from ids and index-pair edges, checking connectivity.
    pub fn from_indexed(ids: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let named: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| {
                let name = |i: usize| ids.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
                (name(a), name(b))
            })
            .collect();
        validate(&ids, &named)?;
        let index = index_ids(&ids);
        Ok(Self::assemble(ids, index, edges))
    }

    fn assemble(
        ids: Vec<String>,
        index: HashMap<String, usize>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let mut hasher = DefaultHasher::new();
        ids.hash(&mut hasher);
        edges.hash(&mut hasher);
        Multigraph {
            ids,
            index,
            edges,
            fingerprint: hasher.finish(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Like [`Multigraph::index_of`] but reports an unknown id as an error.
    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<(usize, usize)> {
        self.edges.get(e).copied().ok_or(Error::UnknownEdge(e))
    }

    /// Structural hash used to tag divisors with their host graph.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    /// Number of edge ends at `v`; a loop contributes two.
    pub fn valence(&self, v: usize) -> i64 {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as i64 + (b == v) as i64)
            .sum()
    }

    /// Non-loop neighbours of every vertex, as `(neighbour, multiplicity)` lists.
    pub fn adjacency(&self) -> Vec<Vec<(usize, i64)>> {
        let n = self.vertex_count();
        let mut mult: Vec<HashMap<usize, i64>> = vec![HashMap::new(); n];
        for &(a, b) in &self.edges {
            if a != b {
                *mult[a].entry(b).or_default() += 1;
                *mult[b].entry(a).or_default() += 1;
            }
        }
        mult.into_iter()
            .map(|m| {
                let mut row: Vec<(usize, i64)> = m.into_iter().collect();
                row.sort_unstable();
                row
            })
            .collect()
    }

    /// Same vertices with all loops removed. Loops never affect connectivity
    /// or the Laplacian, so the result is always valid.
    pub fn without_loops(&self) -> Multigraph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| a != b)
            .collect();
        Self::assemble(self.ids.clone(), self.index.clone(), edges)
    }

    /// Adds one edge between existing vertices.
    pub fn with_edge(&self, a: usize, b: usize) -> Multigraph {
        let mut edges = self.edges.clone();
        edges.push((a, b));
        Self::assemble(self.ids.clone(), self.index.clone(), edges)
    }
}

fn index_ids(ids: &[String]) -> HashMap<String, usize> {
    ids.iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect()
}

/// Checks the multigraph invariants on raw vertex and edge lists.
pub fn validate(vertices: &[String], edges: &[(String, String)]) -> Result<()> {
    if vertices.is_empty() {
        return Err(Error::Empty);
    }
    let mut index = HashMap::with_capacity(vertices.len());
    for (i, id) in vertices.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(Error::DuplicateVertex(id.clone()));
        }
    }
    let mut pairs = Vec::with_capacity(edges.len());
    for (k, (a, b)) in edges.iter().enumerate() {
        let look = |v: &String| {
            index
                .get(v.as_str())
                .copied()
                .ok_or_else(|| Error::DanglingEdge {
                    edge: k,
                    vertex: v.clone(),
                })
        };
        pairs.push((look(a)?, look(b)?));
    }
    let mut uf = UnionFind::new(vertices.len());
    for &(a, b) in &pairs {
        uf.union(a, b);
    }
    let root = uf.find(0);
    for v in 1..vertices.len() {
        if uf.find(v) != root {
            return Err(Error::Disconnected(
                vertices[v].clone(),
                vertices[0].clone(),
            ));
        }
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// First Betti number `|E| - |V| + 1`; loops count as edges.
pub fn genus(graph: &Multigraph) -> i64 {
    graph.edge_count() as i64 - graph.vertex_count() as i64 + 1
}

/// Ids of the edges whose removal disconnects the graph, in increasing order.
///
/// Iterative low-link search keyed on edge ids, so of two parallel edges
/// neither is reported. Loops are skipped.
pub fn bridges(graph: &Multigraph) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if a != b {
            incident[a].push((b, e));
            incident[b].push((a, e));
        }
    }
    let mut order = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut found = Vec::new();
    let mut counter = 0;
    // (vertex, edge used to enter it, next incident position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        order[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, via, pos) = *top;
            if pos < incident[v].len() {
                top.2 += 1;
                let (w, e) = incident[v][pos];
                if e == via {
                    continue;
                }
                if order[w] == usize::MAX {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > order[parent] {
                        found.push(via);
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found
}

/// The two sides of a graph cut at a bridge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeSplit {
    pub bridge: usize,
    /// Component holding the first declared endpoint of the bridge.
    pub g1: Multigraph,
    pub v1: usize,
    pub g2: Multigraph,
    pub v2: usize,
    /// Original vertex index of every vertex of `g1` / `g2`.
    pub map1: Vec<usize>,
    pub map2: Vec<usize>,
}

/// Splits `graph` at bridge `e` into the components of `graph - e`.
pub fn split_at_bridge(graph: &Multigraph, e: usize) -> Result<BridgeSplit> {
    let (a, b) = graph.edge(e)?;
    if !bridges(graph).contains(&e) {
        return Err(Error::NotABridge(e));
    }
    let n = graph.vertex_count();
    let mut side = vec![false; n];
    let mut queue = vec![a];
    side[a] = true;
    let adjacency = graph.adjacency();
    while let Some(v) = queue.pop() {
        for &(w, _) in &adjacency[v] {
            // the only edge between the sides is e itself
            if !side[w] && !(v == a && w == b) {
                side[w] = true;
                queue.push(w);
            }
        }
    }
    let build = |keep: bool| -> (Multigraph, Vec<usize>) {
        let map: Vec<usize> = (0..n).filter(|&v| side[v] == keep).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let ids = map.iter().map(|&v| graph.id(v).to_string()).collect();
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|&(k, &(x, _))| k != e && side[x] == keep)
            .map(|(_, &(x, y))| (local[x], local[y]))
            .collect();
        let g = Multigraph::from_indexed(ids, edges).expect("bridge component is connected");
        (g, map)
    };
    let (g1, map1) = build(true);
    let (g2, map2) = build(false);
    let v1 = map1
        .iter()
        .position(|&v| v == a)
        .expect("endpoint on side 1");
    let v2 = map2
        .iter()
        .position(|&v| v == b)
        .expect("endpoint on side 2");
    Ok(BridgeSplit {
        bridge: e,
        g1,
        v1,
        g2,
        v2,
        map1,
        map2,
    })
}

/// A multigraph with a nonnegative weight on every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    graph: Multigraph,
    weights: Vec<i64>,
}

impl WeightedGraph {
    pub fn new(graph: Multigraph, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != graph.vertex_count() {
            return Err(Error::Parse(format!(
                "expected {} weights, got {}",
                graph.vertex_count(),
                weights.len()
            )));
        }
        if let Some(v) = weights.iter().position(|&w| w < 0) {
            return Err(Error::NegativeWeight(graph.id(v).to_string()));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn unweighted(graph: Multigraph) -> Self {
        let n = graph.vertex_count();
        WeightedGraph {
            graph,
            weights: vec![0; n],
        }
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    /// Splits at a bridge, restricting the weights to each side.
    pub fn split_at_bridge(&self, e: usize) -> Result<(BridgeSplit, WeightedGraph, WeightedGraph)> {
        let split = split_at_bridge(&self.graph, e)?;
        let restrict = |g: &Multigraph, map: &[usize]| WeightedGraph {
            graph: g.clone(),
            weights: map.iter().map(|&v| self.weights[v]).collect(),
        };
        let w1 = restrict(&split.g1, &split.map1);
        let w2 = restrict(&split.g2, &split.map2);
        Ok((split, w1, w2))
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self
                .graph
                .ids()
                .iter()
                .zip(&self.weights)
                .map(|(id, &w)| VertexEntry {
                    id: id.clone(),
                    weight: (w != 0).then_some(w),
                })
                .collect(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|&(a, b)| (self.graph.id(a).to_string(), self.graph.id(b).to_string()))
                .collect(),
        }
    }
}

/// `g(G) + sum of vertex weights`.
pub fn weighted_genus(wg: &WeightedGraph) -> i64 {
    genus(&wg.graph) + wg.weights.iter().sum::<i64>()
}

/// The loopless graph obtained by materialising every loop and every unit of
/// vertex weight as a fresh vertex joined to its base by two parallel edges.
#[derive(Debug, Clone)]
pub struct VirtualGraph {
    pub graph: Multigraph,
    /// Index in `graph` of each original vertex. Originals keep their
    /// positions, so this is the identity on `0..|V(G)|`.
    pub originals: Vec<usize>,
    /// Indices of the inserted vertices.
    pub inserted: Vec<usize>,
    /// Image of each original edge; `None` for loops.
    pub edge_map: Vec<Option<usize>>,
}

impl VirtualGraph {
    pub fn original_count(&self) -> usize {
        self.originals.len()
    }
}

pub fn virtual_loopless(wg: &WeightedGraph) -> VirtualGraph {
    let g = &wg.graph;
    let n = g.vertex_count();
    let mut ids: Vec<String> = g.ids().to_vec();
    let mut taken: HashSet<String> = ids.iter().cloned().collect();
    let mut edges = Vec::new();
    let mut edge_map = Vec::with_capacity(g.edge_count());
    for &(a, b) in g.edges() {
        if a == b {
            edge_map.push(None);
        } else {
            edge_map.push(Some(edges.len()));
            edges.push((a, b));
        }
    }
    let mut loops_at = vec![0i64; n];
    for &(a, b) in g.edges() {
        if a == b {
            loops_at[a] += 1;
        }
    }
    let mut inserted = Vec::new();
    for (v, &loops) in loops_at.iter().enumerate() {
        for k in 0..(loops + wg.weights[v]) {
            let mut id = format!("loop:{}:{}", g.id(v), k);
            while taken.contains(&id) {
                id.push('\'');
            }
            taken.insert(id.clone());
            let w = ids.len();
            ids.push(id);
            inserted.push(w);
            edges.push((v, w));
            edges.push((v, w));
        }
    }
    let index = index_ids(&ids);
    VirtualGraph {
        graph: Multigraph::assemble(ids, index, edges),
        originals: (0..n).collect(),
        inserted,
        edge_map,
    }
}

/// On-disk graph description.
///
/// ```json
/// {"vertices":[{"id":"a","weight":0}],"edges":[["a","b"]]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph file serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let ids: Vec<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        validate(&ids, &self.edges)
    }

    pub fn into_weighted(self) -> Result<WeightedGraph> {
        let weights = self
            .vertices
            .iter()
            .map(|v| v.weight.unwrap_or(0))
            .collect();
        let graph = Multigraph::new(self.vertices.into_iter().map(|v| v.id), self.edges)?;
        WeightedGraph::new(graph, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(vs: &[&str], es: &[(&str, &str)]) -> Multigraph {
        Multigraph::new(vs.iter().copied(), es.iter().copied()).unwrap()
    }

    fn triangle() -> Multigraph {
        graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")])
    }

    fn dumbbell() -> Multigraph {
        graph(
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
        )
    }

    #[test]
    fn validate_reports_each_invariant() {
        assert!(Multigraph::new(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")]).is_ok());
        assert!(matches!(
            Multigraph::new(["a", "b", "c", "d"], [("a", "b"), ("c", "d")]),
            Err(Error::Disconnected(..))
        ));
        assert!(matches!(
            Multigraph::new(["a"], [("a", "x")]),
            Err(Error::DanglingEdge { edge: 0, .. })
        ));
        assert!(matches!(
            Multigraph::new(["a", "a"], [("a", "a")]),
            Err(Error::DuplicateVertex(_))
        ));
        // a loop does not connect anything
        assert!(matches!(
            Multigraph::new(["a", "b"], [("a", "a")]),
            Err(Error::Disconnected(..))
        ));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus(&triangle()), 1);
        let k4 = graph(
            &["1", "2", "3", "4"],
            &[
                ("1", "2"),
                ("1", "3"),
                ("1", "4"),
                ("2", "3"),
                ("2", "4"),
                ("3", "4"),
            ],
        );
        assert_eq!(genus(&k4), 3);
        assert_eq!(bridges(&k4), Vec::<usize>::new());
        let p4 = graph(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]);
        assert_eq!(genus(&p4), 0);

        let point = Multigraph::new(["v"], Vec::<(&str, &str)>::new()).unwrap();
        let wg = WeightedGraph::new(point, vec![2]).unwrap();
        assert_eq!(weighted_genus(&wg), 2);
        let wk4 = WeightedGraph::new(k4, vec![1, 0, 0, 0]).unwrap();
        assert_eq!(weighted_genus(&wk4), 4);
    }

    #[test]
    fn bridges_skip_loops_and_parallel_edges() {
        assert_eq!(bridges(&dumbbell()), vec![3]);
        let path = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert_eq!(bridges(&path), vec![0, 1]);
        let double = graph(
            &["a", "b", "c"],
            &[("a", "b"), ("a", "b"), ("b", "c"), ("c", "c")],
        );
        assert_eq!(bridges(&double), vec![2]);
    }

    #[test]
    fn split_dumbbell_and_path() {
        let s = split_at_bridge(&dumbbell(), 3).unwrap();
        assert_eq!(s.g1.ids(), &["u1", "u2", "v1"]);
        assert_eq!(s.g1.id(s.v1), "v1");
        assert_eq!(s.g2.ids(), &["v2", "w1", "w2"]);
        assert_eq!(s.g2.id(s.v2), "v2");
        assert_eq!(genus(&s.g1) + genus(&s.g2), genus(&dumbbell()));

        let path = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let s = split_at_bridge(&path, 0).unwrap();
        assert_eq!(s.g1.ids(), &["a"]);
        assert_eq!(s.g1.edge_count(), 0);
        assert_eq!(s.g2.ids(), &["b", "c"]);
        assert_eq!(s.g2.id(s.v2), "b");

        assert_eq!(split_at_bridge(&triangle(), 0), Err(Error::NotABridge(0)));
    }

    #[test]
    fn virtual_graph_examples() {
        let point = Multigraph::new(["v"], Vec::<(&str, &str)>::new()).unwrap();
        let vg = virtual_loopless(&WeightedGraph::new(point, vec![1]).unwrap());
        assert_eq!(vg.graph.ids(), &["v", "loop:v:0"]);
        assert_eq!(vg.graph.edges(), &[(0, 1), (0, 1)]);
        assert_eq!(genus(&vg.graph), 1);

        let vg = virtual_loopless(&WeightedGraph::unweighted(triangle()));
        assert_eq!(vg.graph, triangle());

        let looped = graph(&["v"], &[("v", "v")]);
        let vg = virtual_loopless(&WeightedGraph::unweighted(looped));
        assert_eq!(vg.graph.edges(), &[(0, 1), (0, 1)]);
        assert_eq!(vg.edge_map, vec![None]);
        assert!(!vg.graph.has_loops());
    }

    #[test]
    fn inserted_ids_avoid_collisions() {
        let g = graph(&["v", "loop:v:0"], &[("v", "loop:v:0")]);
        let vg = virtual_loopless(&WeightedGraph::new(g, vec![1, 0]).unwrap());
        assert_eq!(vg.graph.id(2), "loop:v:0'");
    }

    #[test]
    fn graph_file_round_trip() {
        let text =
            r#"{"vertices":[{"id":"a","weight":1},{"id":"b"}],"edges":[["a","b"],["b","b"]]}"#;
        let wg = GraphFile::from_json(text).unwrap().into_weighted().unwrap();
        assert_eq!(wg.weights(), &[1, 0]);
        assert_eq!(wg.to_file().to_json(), text);
        assert!(GraphFile::from_json(r#"{"vertices":[],"bogus":1}"#).is_err());
    }
}
