//! Divisors on the rational points of the metric graph with unit edge
//! lengths, ranked through uniform subdivisions.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Deserialize;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{Multigraph, WeightedGraph};
use crate::rank::rank_weighted;

pub type Offset = Ratio<i64>;

/// Every edge becomes a path of `n` edges through `n - 1` fresh weight-0
/// vertices named `sub:<edge>:<k>`, `k` counted from the first declared
/// endpoint. Loops become cycles. Edges keep their relative order.
pub fn subdivide(wg: &WeightedGraph, n: usize) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::Parse("subdivision factor must be at least 1".into()));
    }
    let g = wg.graph();
    let mut ids = g.ids().to_vec();
    let mut weights = wg.weights().to_vec();
    let mut taken: HashSet<String> = ids.iter().cloned().collect();
    let mut edges = Vec::with_capacity(g.edge_count() * n);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let mut prev = a;
        for k in 1..n {
            let mut id = format!("sub:{e}:{k}");
            while taken.contains(&id) {
                id.push('\'');
            }
            taken.insert(id.clone());
            let w = ids.len();
            ids.push(id);
            weights.push(0);
            edges.push((prev, w));
            prev = w;
        }
        edges.push((prev, b));
    }
    WeightedGraph::new(Multigraph::from_indexed(ids, edges)?, weights)
}

/// Where a point of the metric graph sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Vertex(usize),
    /// Strictly inside an edge; the offset is measured from its first
    /// declared endpoint.
    Interior {
        edge: usize,
        offset: Offset,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricPoint {
    pub edge: usize,
    pub offset: Offset,
    pub coeff: i64,
}

/// A divisor supported on finitely many rational points. Points are kept
/// sorted, with endpoint offsets turned into vertices, duplicates merged
/// and cancelled points dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricDivisor {
    host: WeightedGraph,
    points: Vec<(Location, i64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsFile {
    points: Vec<PointEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointEntry {
    edge: usize,
    offset: OffsetText,
    coeff: i64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OffsetText {
    Int(i64),
    Text(String),
}

impl MetricDivisor {
    pub fn new(host: &WeightedGraph, points: &[MetricPoint]) -> Result<Self> {
        let g = host.graph();
        let mut merged: BTreeMap<Location, i64> = BTreeMap::new();
        for p in points {
            let (a, b) = g.edge(p.edge)?;
            if p.coeff == 0 {
                return Err(Error::InvalidPoint(format!(
                    "zero coefficient on edge {}",
                    p.edge
                )));
            }
            let zero = Offset::from_integer(0);
            let one = Offset::from_integer(1);
            if p.offset < zero || p.offset > one {
                return Err(Error::InvalidPoint(format!(
                    "offset {} outside [0, 1]",
                    p.offset
                )));
            }
            let at = if p.offset == zero {
                Location::Vertex(a)
            } else if p.offset == one {
                Location::Vertex(b)
            } else {
                Location::Interior {
                    edge: p.edge,
                    offset: p.offset,
                }
            };
            *merged.entry(at).or_insert(0) += p.coeff;
        }
        Ok(MetricDivisor {
            host: host.clone(),
            points: merged.into_iter().filter(|&(_, c)| c != 0).collect(),
        })
    }

    /// Reads `{"points":[{"edge":0,"offset":"1/2","coeff":1}, ...]}`.
    /// Offsets are integers or exact fractions `p/q`.
    pub fn from_json(host: &WeightedGraph, text: &str) -> Result<Self> {
        let file: PointsFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let points = file
            .points
            .into_iter()
            .map(|p| {
                let offset = match p.offset {
                    OffsetText::Int(k) => Offset::from_integer(k),
                    OffsetText::Text(s) => Offset::from_str(&s)
                        .map_err(|e| Error::InvalidPoint(format!("offset {s:?}: {e}")))?,
                };
                Ok(MetricPoint {
                    edge: p.edge,
                    offset,
                    coeff: p.coeff,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(host, &points)
    }

    /// Places a divisor of the graph itself on the vertices.
    pub fn from_vertex_divisor(host: &WeightedGraph, d: &Divisor) -> Result<Self> {
        d.check_host(host.graph())?;
        Ok(MetricDivisor {
            host: host.clone(),
            points: (0..d.len())
                .filter(|&v| d[v] != 0)
                .map(|v| (Location::Vertex(v), d[v]))
                .collect(),
        })
    }

    pub fn host(&self) -> &WeightedGraph {
        &self.host
    }

    pub fn points(&self) -> &[(Location, i64)] {
        &self.points
    }

    pub fn degree(&self) -> i64 {
        self.points.iter().map(|&(_, c)| c).sum()
    }

    /// Smallest subdivision factor whose vertices contain the support: the
    /// lcm of the offset denominators.
    pub fn model_size(&self) -> usize {
        self.points
            .iter()
            .map(|(at, _)| match at {
                Location::Vertex(_) => 1,
                Location::Interior { offset, .. } => *offset.denom(),
            })
            .fold(1i64, |acc, d| acc.lcm(&d)) as usize
    }

    /// The subdivided graph with `n` edges per original edge, and this
    /// divisor on its vertices. `n` must be a multiple of [`Self::model_size`].
    pub fn on_model(&self, n: usize) -> Result<(WeightedGraph, Divisor)> {
        let need = self.model_size();
        if n == 0 || !n.is_multiple_of(need) {
            return Err(Error::InvalidPoint(format!(
                "subdivision {n} does not contain the support (needs a multiple of {need})"
            )));
        }
        let model = subdivide(&self.host, n)?;
        let g = self.host.graph();
        let vertices = g.vertex_count();
        let mut d = Divisor::zero(model.graph());
        for &(at, c) in &self.points {
            let v = match at {
                Location::Vertex(v) => v,
                Location::Interior { edge, offset } => {
                    let k = (offset * Offset::from_integer(n as i64)).to_integer() as usize;
                    // fresh vertices of `edge` occupy a contiguous block
                    vertices + edge * (n - 1) + (k - 1)
                }
            };
            d[v] += c;
        }
        Ok((model, d))
    }

    pub fn rank_on_model(&self, n: usize) -> Result<i64> {
        let (model, d) = self.on_model(n)?;
        rank_weighted(&model, &d)
    }
}

/// Rank on the coarsest model containing the support.
pub fn metric_rank(md: &MetricDivisor) -> Result<i64> {
    md.rank_on_model(md.model_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named;
    use crate::graph::{genus, weighted_genus};
    use crate::rank::RankOracle;

    fn half() -> Offset {
        Offset::new(1, 2)
    }

    #[test]
    fn subdivide_examples() {
        let c3 = named("C3").unwrap();
        let c6 = subdivide(&c3, 2).unwrap();
        let g = c6.graph();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 6));
        assert!((0..6).all(|v| g.valence(v) == 2));
        assert_eq!(g.id(3), "sub:0:1");
        assert_eq!(subdivide(&c3, 1).unwrap(), c3);

        let lp = named("loop1").unwrap();
        let two = subdivide(&lp, 2).unwrap();
        assert_eq!(two.graph().edges(), &[(0, 1), (1, 0)]);
        assert!(!two.graph().has_loops());
        assert_eq!(genus(two.graph()), 1);

        let k4w = named("K4-wt1").unwrap();
        for n in 1..4 {
            assert_eq!(weighted_genus(&subdivide(&k4w, n).unwrap()), 4);
        }
    }

    #[test]
    fn parse_and_normalize() {
        let c3 = named("C3").unwrap();
        let md = MetricDivisor::from_json(
            &c3,
            r#"{"points":[{"edge":0,"offset":"1/2","coeff":1},{"edge":0,"offset":"2/4","coeff":1},{"edge":1,"offset":0,"coeff":3},{"edge":0,"offset":"1","coeff":-3}]}"#,
        )
        .unwrap();
        // edge 1 starts at b, and offset 1 on edge 0 is b as well
        assert_eq!(
            md.points(),
            &[(
                Location::Interior {
                    edge: 0,
                    offset: half()
                },
                2
            )]
        );
        assert_eq!(md.degree(), 2);
        assert_eq!(md.model_size(), 2);
        for bad in [
            r#"{"points":[{"edge":0,"offset":"3/2","coeff":1}]}"#,
            r#"{"points":[{"edge":0,"offset":"0.5","coeff":1}]}"#,
            r#"{"points":[{"edge":0,"offset":"1/2","coeff":0}]}"#,
        ] {
            assert!(matches!(
                MetricDivisor::from_json(&c3, bad),
                Err(Error::InvalidPoint(_))
            ));
        }
        assert_eq!(
            MetricDivisor::from_json(&c3, r#"{"points":[{"edge":9,"offset":"1/2","coeff":1}]}"#),
            Err(Error::UnknownEdge(9))
        );
    }

    #[test]
    fn rank_examples() {
        let c3 = named("C3").unwrap();
        let at_b = MetricDivisor::new(
            &c3,
            &[MetricPoint {
                edge: 0,
                offset: Offset::from_integer(1),
                coeff: 1,
            }],
        )
        .unwrap();
        assert_eq!(metric_rank(&at_b).unwrap(), 0);

        let mid = MetricDivisor::new(
            &c3,
            &[MetricPoint {
                edge: 2,
                offset: half(),
                coeff: 1,
            }],
        )
        .unwrap();
        assert_eq!(metric_rank(&mid).unwrap(), 0);

        let two = MetricDivisor::new(
            &c3,
            &[
                MetricPoint {
                    edge: 0,
                    offset: Offset::new(1, 3),
                    coeff: 1,
                },
                MetricPoint {
                    edge: 1,
                    offset: half(),
                    coeff: 1,
                },
            ],
        )
        .unwrap();
        assert_eq!(two.model_size(), 6);
        assert_eq!(metric_rank(&two).unwrap(), 1);
        let (model, d) = two.on_model(6).unwrap();
        assert_eq!(
            d.to_map(model.graph()),
            BTreeMap::from([("sub:0:2".to_string(), 1), ("sub:1:3".to_string(), 1),])
        );
        let mut oracle = RankOracle::new(model.graph(), 2).unwrap();
        assert_eq!(oracle.rank(&d).unwrap(), 1);
    }

    #[test]
    fn refinement_does_not_change_rank() {
        let k4 = named("K4").unwrap();
        let md = MetricDivisor::new(
            &k4,
            &[
                MetricPoint {
                    edge: 0,
                    offset: half(),
                    coeff: 1,
                },
                MetricPoint {
                    edge: 5,
                    offset: half(),
                    coeff: 1,
                },
                MetricPoint {
                    edge: 3,
                    offset: Offset::new(1, 2),
                    coeff: 1,
                },
            ],
        )
        .unwrap();
        let base = metric_rank(&md).unwrap();
        for k in 2..4 {
            assert_eq!(md.rank_on_model(2 * k).unwrap(), base);
        }
        assert!(md.rank_on_model(3).is_err());
    }

    #[test]
    fn vertex_divisors_match_graph_rank() {
        let k4 = named("K4").unwrap();
        let d = crate::divisor::canonical_weighted(&k4);
        let md = MetricDivisor::from_vertex_divisor(&k4, &d).unwrap();
        assert_eq!(md.model_size(), 1);
        assert_eq!(metric_rank(&md).unwrap(), 2);
        assert_eq!(md.rank_on_model(2).unwrap(), 2);
    }
}
