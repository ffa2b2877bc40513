//! Divisors, integer functions and linear equivalence.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::graph::{virtual_loopless, Multigraph, WeightedGraph};
use crate::lattice::ClassLattice;

/// An integer combination of the vertices of a particular graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor {
    host: u64,
    coeffs: Vec<i64>,
}

impl Divisor {
    pub fn zero(graph: &Multigraph) -> Self {
        Divisor {
            host: graph.fingerprint(),
            coeffs: vec![0; graph.vertex_count()],
        }
    }

    pub fn from_coeffs(graph: &Multigraph, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != graph.vertex_count() {
            return Err(Error::Parse(format!(
                "divisor has {} coefficients for {} vertices",
                coeffs.len(),
                graph.vertex_count()
            )));
        }
        Ok(Divisor {
            host: graph.fingerprint(),
            coeffs,
        })
    }

    /// The divisor `[v]`.
    pub fn point(graph: &Multigraph, v: usize) -> Self {
        let mut d = Self::zero(graph);
        d.coeffs[v] = 1;
        d
    }

    /// Builds a divisor from `id -> coefficient` pairs; missing ids are 0.
    pub fn from_map<'a, I>(graph: &Multigraph, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, i64)>,
    {
        let mut d = Self::zero(graph);
        for (id, k) in entries {
            d.coeffs[graph.vertex(id)?] += k;
        }
        Ok(d)
    }

    /// Parses `{"a":2,"c":-1}`.
    pub fn from_json(graph: &Multigraph, text: &str) -> Result<Self> {
        let map: BTreeMap<String, i64> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_map(graph, map.iter().map(|(k, &v)| (k.as_str(), v)))
    }

    /// Nonzero coefficients keyed by vertex id.
    pub fn to_map(&self, graph: &Multigraph) -> BTreeMap<String, i64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(v, &k)| (graph.id(v).to_string(), k))
            .collect()
    }

    pub fn host(&self) -> u64 {
        self.host
    }

    pub fn belongs_to(&self, graph: &Multigraph) -> bool {
        self.host == graph.fingerprint()
    }

    pub(crate) fn check_host(&self, graph: &Multigraph) -> Result<()> {
        if self.belongs_to(graph) {
            Ok(())
        } else {
            Err(Error::HostMismatch)
        }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|&k| k >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&k| k == 0)
    }

    /// `self + k[v]`
    pub fn shifted(&self, v: usize, k: i64) -> Self {
        let mut d = self.clone();
        d.coeffs[v] += k;
        d
    }

    pub fn checked_add(&self, other: &Divisor) -> Result<Divisor> {
        if self.host != other.host {
            return Err(Error::HostMismatch);
        }
        Ok(Divisor {
            host: self.host,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Divisor) -> Result<Divisor> {
        self.checked_add(&-other)
    }
}

impl std::ops::Index<usize> for Divisor {
    type Output = i64;
    fn index(&self, v: usize) -> &i64 {
        &self.coeffs[v]
    }
}

impl std::ops::IndexMut<usize> for Divisor {
    fn index_mut(&mut self, v: usize) -> &mut i64 {
        &mut self.coeffs[v]
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor {
            host: self.host,
            coeffs: self.coeffs.iter().map(|k| -k).collect(),
        }
    }
}

/// Panics when the operands live on different graphs; use
/// [`Divisor::checked_add`] to get an error instead.
impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        self.checked_add(rhs).expect("divisors on different graphs")
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        self.checked_sub(rhs).expect("divisors on different graphs")
    }
}

/// An integer-valued function on the vertices of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntFunction {
    host: u64,
    values: Vec<i64>,
}

impl IntFunction {
    pub fn zero(graph: &Multigraph) -> Self {
        IntFunction {
            host: graph.fingerprint(),
            values: vec![0; graph.vertex_count()],
        }
    }

    pub fn from_values(graph: &Multigraph, values: Vec<i64>) -> Result<Self> {
        if values.len() != graph.vertex_count() {
            return Err(Error::Parse(format!(
                "function has {} values for {} vertices",
                values.len(),
                graph.vertex_count()
            )));
        }
        Ok(IntFunction {
            host: graph.fingerprint(),
            values,
        })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn to_map(&self, graph: &Multigraph) -> BTreeMap<String, i64> {
        self.values
            .iter()
            .enumerate()
            .map(|(v, &k)| (graph.id(v).to_string(), k))
            .collect()
    }

    /// `f + c` for a constant `c`.
    pub fn plus_constant(&self, c: i64) -> Self {
        IntFunction {
            host: self.host,
            values: self.values.iter().map(|x| x + c).collect(),
        }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [i64] {
        &mut self.values
    }
}

impl std::ops::Index<usize> for IntFunction {
    type Output = i64;
    fn index(&self, v: usize) -> &i64 {
        &self.values[v]
    }
}

/// `L[v][v]` counts non-loop edges at `v`, `L[v][w] = -#edges(v, w)`.
pub fn laplacian(graph: &Multigraph) -> Vec<Vec<i64>> {
    let n = graph.vertex_count();
    let mut lap = vec![vec![0i64; n]; n];
    for &(a, b) in graph.edges() {
        if a != b {
            lap[a][a] += 1;
            lap[b][b] += 1;
            lap[a][b] -= 1;
            lap[b][a] -= 1;
        }
    }
    lap
}

/// The principal divisor of `f`: at each `v`, the sum over edges `vw` of
/// `f(w) - f(v)`.
pub fn div_of(f: &IntFunction, graph: &Multigraph) -> Result<Divisor> {
    if f.host != graph.fingerprint() {
        return Err(Error::HostMismatch);
    }
    let mut d = Divisor::zero(graph);
    for &(a, b) in graph.edges() {
        let diff = f.values[b] - f.values[a];
        d.coeffs[a] += diff;
        d.coeffs[b] -= diff;
    }
    Ok(d)
}

/// Exact lattice-membership test against the Laplacian image.
pub fn is_principal(d: &Divisor, graph: &Multigraph) -> Result<bool> {
    d.check_host(graph)?;
    if d.degree() != 0 {
        return Ok(false);
    }
    Ok(ClassLattice::new(&laplacian(graph), 0)?.is_principal(d.coeffs()))
}

pub fn linearly_equivalent(d: &Divisor, e: &Divisor, graph: &Multigraph) -> Result<bool> {
    d.check_host(graph)?;
    e.check_host(graph)?;
    if d.degree() != e.degree() {
        return Ok(false);
    }
    is_principal(&(d - e), graph)
}

/// `K_G = sum (val(v) - 2)[v]`, where a loop adds 2 to the valence.
pub fn canonical(graph: &Multigraph) -> Divisor {
    let mut k = Divisor::zero(graph);
    for v in 0..graph.vertex_count() {
        k.coeffs[v] = graph.valence(v) - 2;
    }
    k
}

/// Canonical divisor of a weighted graph: that of its virtual loopless graph,
/// read back on the original vertices.
pub fn canonical_weighted(wg: &WeightedGraph) -> Divisor {
    let vg = virtual_loopless(wg);
    let kv = canonical(&vg.graph);
    debug_assert!(vg.inserted.iter().all(|&w| kv[w] == 0));
    let mut k = Divisor::zero(wg.graph());
    for (v, &image) in vg.originals.iter().enumerate() {
        k.coeffs[v] = kv[image];
    }
    k
}

/// Extends a divisor by zero along a vertex-id inclusion.
pub fn embed(d: &Divisor, from: &Multigraph, into: &Multigraph) -> Result<Divisor> {
    d.check_host(from)?;
    let mut out = Divisor::zero(into);
    for (v, &k) in d.coeffs.iter().enumerate() {
        let id = from.id(v);
        let target = into
            .index_of(id)
            .ok_or_else(|| Error::VertexNotInHost(id.to_string()))?;
        out.coeffs[target] += k;
    }
    Ok(out)
}

/// Restricts a divisor to the vertices of a subgraph, matched by id.
pub fn restrict(d: &Divisor, from: &Multigraph, onto: &Multigraph) -> Result<Divisor> {
    d.check_host(from)?;
    let coeffs = onto
        .ids()
        .iter()
        .map(|id| from.vertex(id).map(|v| d.coeffs[v]))
        .collect::<Result<Vec<_>>>()?;
    Divisor::from_coeffs(onto, coeffs)
}
