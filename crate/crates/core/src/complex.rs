//! Threshold graphs over an overlap matrix and their clique complexes.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::OverlapMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("threshold must be finite and non-negative, got {0}")]
    Threshold(f64),
    #[error("euclidean metric needs the encoded states and their norms")]
    MissingNorms,
    #[error("edge ({0}, {1}) is a self-loop or out of range")]
    BadEdge(usize, usize),
    #[error("simplex list for dimension {r} is malformed: {reason}")]
    Malformed { r: usize, reason: &'static str },
}

/// Which pairwise quantity is compared against ε.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Connect when `d_ij ≤ ε`.
    PaperLiteral,
    /// Connect when `1 - d_ij ≤ ε`.
    CosineDissimilarity,
    /// Connect when `‖x_i - x_j‖ ≤ ε` on the unnormalised samples.
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub metric: Metric,
    pub eps: f64,
}

impl ThresholdRule {
    pub fn new(metric: Metric, eps: f64) -> Result<Self, ComplexError> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(ComplexError::Threshold(eps));
        }
        Ok(Self { metric, eps })
    }
}

/// Simple undirected graph on `0..n` with edges stored as sorted pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Normalises each pair to `(min, max)`, sorts and drops duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ComplexError> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(ComplexError::BadEdge(a, b));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(Self {
            n,
            edges: list,
            adjacency,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(n, edges).expect("complete graph edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && a < self.n && b < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }
}

/// Applies `rule` to every pair of `d`.
pub fn build_graph(d: &OverlapMatrix, rule: &ThresholdRule) -> Result<Graph, ComplexError> {
    let rule = ThresholdRule::new(rule.metric, rule.eps)?;
    let m = d.size();
    let mut edges = Vec::new();
    match rule.metric {
        Metric::PaperLiteral | Metric::CosineDissimilarity => {
            for i in 0..m {
                for j in i + 1..m {
                    let v = d.get(i, j);
                    let value = if rule.metric == Metric::PaperLiteral { v } else { 1.0 - v };
                    if value <= rule.eps {
                        edges.push((i, j));
                    }
                }
            }
        }
        Metric::Euclidean => {
            let states = d.states().ok_or(ComplexError::MissingNorms)?;
            let vectors: Vec<_> = states.iter().map(|s| s.source_vector()).collect();
            for i in 0..m {
                for j in i + 1..m {
                    let dist = vectors[i]
                        .iter()
                        .zip(&vectors[j])
                        .map(|(a, b)| (a - b).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    if dist <= rule.eps {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    Graph::new(m, edges)
}

/// Degeneracy ordering by repeated removal of a minimum-degree vertex.
/// Returns the order and the degeneracy. Ties go to the smallest index.
pub fn degeneracy_order(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<alloc::collections::BTreeSet<usize>> = vec![Default::default(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v]].insert(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    let mut low = 0;
    for _ in 0..n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().expect("bucket is non-empty");
        degeneracy = degeneracy.max(low);
        removed[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                buckets[degree[u]].remove(&u);
                degree[u] -= 1;
                buckets[degree[u]].insert(u);
            }
        }
        low = low.saturating_sub(1);
    }
    (order, degeneracy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub degeneracy: usize,
    pub max_degree: usize,
    /// `max_degree`; the exact arboricity is not computed.
    pub arboricity_bound: usize,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    let max_degree = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    GraphStats {
        degeneracy: degeneracy_order(g).1,
        max_degree,
        arboricity_bound: max_degree,
    }
}

/// A vertex tuple in increasing order.
pub type Simplex = Vec<usize>;

/// The threshold graph together with its cliques of size `1..=r_max + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueComplex {
    graph: Graph,
    simplices: Vec<Vec<Simplex>>,
    complete: bool,
}

/// All cliques with at most `r_max + 1` vertices, grouped by dimension and
/// sorted lexicographically.
///
/// Each clique is grown from its earliest vertex in degeneracy order using
/// only later neighbours, so it is produced exactly once.
pub fn enumerate_cliques(g: &Graph, r_max: usize) -> CliqueComplex {
    let n = g.n();
    let (order, _) = degeneracy_order(g);
    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut simplices: Vec<Vec<Simplex>> = vec![Vec::new(); r_max + 1];
    let mut complete = true;
    let mut clique = Vec::with_capacity(r_max + 1);
    for &v in &order {
        let later: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| position[u] > position[v])
            .collect();
        clique.push(v);
        expand(g, &mut clique, later, r_max, &mut simplices, &mut complete);
        clique.pop();
    }
    for level in &mut simplices {
        level.sort_unstable();
    }
    CliqueComplex {
        graph: g.clone(),
        simplices,
        complete,
    }
}

fn expand(
    g: &Graph,
    clique: &mut Vec<usize>,
    candidates: Vec<usize>,
    r_max: usize,
    out: &mut [Vec<Simplex>],
    complete: &mut bool,
) {
    let mut sorted = clique.clone();
    sorted.sort_unstable();
    out[clique.len() - 1].push(sorted);
    if clique.len() == r_max + 1 {
        if !candidates.is_empty() {
            *complete = false;
        }
        return;
    }
    for (k, &u) in candidates.iter().enumerate() {
        let next: Vec<usize> = candidates[k + 1..]
            .iter()
            .copied()
            .filter(|&w| g.has_edge(u, w))
            .collect();
        clique.push(u);
        expand(g, clique, next, r_max, out, complete);
        clique.pop();
    }
}

impl CliqueComplex {
    /// Builds a complex from explicit simplex lists, checking sortedness and
    /// closure under faces. Dimension-1 simplices must match `graph`.
    pub fn from_parts(graph: Graph, simplices: Vec<Vec<Simplex>>, complete: bool) -> Result<Self, ComplexError> {
        if simplices.is_empty() {
            return Err(ComplexError::Malformed {
                r: 0,
                reason: "no vertex list",
            });
        }
        let vertices: Vec<Simplex> = (0..graph.n()).map(|v| vec![v]).collect();
        if simplices[0] != vertices {
            return Err(ComplexError::Malformed {
                r: 0,
                reason: "vertex list must be 0..n",
            });
        }
        if let Some(edges) = simplices.get(1) {
            let expected: Vec<Simplex> = graph.edges().iter().map(|&(a, b)| vec![a, b]).collect();
            if *edges != expected {
                return Err(ComplexError::Malformed {
                    r: 1,
                    reason: "edges differ from the graph",
                });
            }
        }
        for (r, level) in simplices.iter().enumerate() {
            for s in level {
                if s.len() != r + 1 || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&v| v >= graph.n()) {
                    return Err(ComplexError::Malformed {
                        r,
                        reason: "simplex is not an increasing in-range tuple",
                    });
                }
            }
            if level.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ComplexError::Malformed {
                    r,
                    reason: "simplices are not strictly sorted",
                });
            }
        }
        let k = Self {
            graph,
            simplices,
            complete,
        };
        if let Some(r) = k.first_unclosed_dimension() {
            return Err(ComplexError::Malformed {
                r,
                reason: "a facet is missing",
            });
        }
        Ok(k)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Highest dimension that was enumerated.
    pub fn r_max(&self) -> usize {
        self.simplices.len() - 1
    }

    /// True when no clique larger than `r_max + 1` vertices exists, i.e. the
    /// stored simplices are the whole clique complex.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// `S_r`; empty beyond `r_max`.
    pub fn simplices(&self, r: usize) -> &[Simplex] {
        self.simplices.get(r).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, r: usize) -> usize {
        self.simplices(r).len()
    }

    /// `|S_0|, …, |S_{r_max}|`.
    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn total_simplices(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    /// Largest `r` with `S_r` non-empty (`None` for the empty complex).
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().rposition(|l| !l.is_empty())
    }

    /// Position of `simplex` in `S_{len-1}`.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let r = simplex.len().checked_sub(1)?;
        self.simplices
            .get(r)?
            .binary_search_by(|s| s.as_slice().cmp(simplex))
            .ok()
    }

    /// `Σ (-1)^r |S_r|` over the stored dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(r, l)| if r % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    fn first_unclosed_dimension(&self) -> Option<usize> {
        for r in 1..self.simplices.len() {
            for s in &self.simplices[r] {
                for skip in 0..=r {
                    let face: Simplex = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    if self.index_of(&face).is_none() {
                        return Some(r);
                    }
                }
            }
        }
        None
    }

    /// Every facet of every stored simplex is stored.
    pub fn is_closed(&self) -> bool {
        self.first_unclosed_dimension().is_none()
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    simplices: BTreeMap<String, Vec<Simplex>>,
    #[serde(default = "default_complete")]
    complete: bool,
}

fn default_complete() -> bool {
    true
}

impl Serialize for CliqueComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ComplexJson {
            n: self.graph.n(),
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            simplices: self
                .simplices
                .iter()
                .enumerate()
                .map(|(r, l)| (r.to_string(), l.clone()))
                .collect(),
            complete: self.complete,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CliqueComplex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ComplexJson::deserialize(deserializer)?;
        let graph = Graph::new(raw.n, raw.edges.iter().map(|e| (e[0], e[1]))).map_err(D::Error::custom)?;
        let mut levels: Vec<(usize, Vec<Simplex>)> = raw
            .simplices
            .into_iter()
            .map(|(k, v)| k.parse::<usize>().map(|r| (r, v)).map_err(D::Error::custom))
            .collect::<Result<_, _>>()?;
        levels.sort_by_key(|(r, _)| *r);
        if levels.iter().enumerate().any(|(i, (r, _))| i != *r) {
            return Err(D::Error::custom("simplex dimensions must be 0..=r_max without gaps"));
        }
        let simplices = levels.into_iter().map(|(_, l)| l).collect();
        CliqueComplex::from_parts(graph, simplices, raw.complete).map_err(D::Error::custom)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            n: usize,
            edges: &'a [(usize, usize)],
        }
        Raw {
            n: self.n,
            edges: &self.edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Graph::new(raw.n, raw.edges).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odesolve::{SolverTag, Trajectory};
    use crate::quantum::{pairwise_overlaps, OverlapMode};
    use core::f64::consts::PI;
    use nalgebra::DVector;

    fn matrix3(d01: f64, d02: f64, d12: f64) -> OverlapMatrix {
        OverlapMatrix::from_entries(3, vec![1.0, d01, d02, d01, 1.0, d12, d02, d12, 1.0]).unwrap()
    }

    #[test]
    fn literal_rule_links_small_overlaps() {
        let g = build_graph(&matrix3(0.1, 0.5, 0.9), &ThresholdRule::new(Metric::PaperLiteral, 0.5).unwrap()).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn zero_eps_dissimilarity_has_no_edges() {
        let g = build_graph(&matrix3(0.3, 0.2, 0.9), &ThresholdRule::new(Metric::CosineDissimilarity, 0.0).unwrap()).unwrap();
        assert!(g.edges().is_empty());
        assert!(ThresholdRule::new(Metric::CosineDissimilarity, -0.1).is_err());
    }

    fn half_circle(m: usize) -> Trajectory {
        let times: Vec<f64> = (0..m).map(|k| k as f64).collect();
        let states = (0..m)
            .map(|k| {
                let th = PI * k as f64 / m as f64;
                DVector::from_vec(vec![th.cos(), th.sin()])
            })
            .collect();
        Trajectory::new(times, states, SolverTag::External).unwrap()
    }

    #[test]
    fn half_circle_neighbours_form_a_cycle() {
        let m = 12;
        let d = pairwise_overlaps(&half_circle(m), OverlapMode::Exact, 0, 0).unwrap();
        // neighbours sit at 1 - cos(π/12) ≈ 0.034, next-nearest at ≈ 0.134
        let g = build_graph(&d, &ThresholdRule::new(Metric::CosineDissimilarity, 0.05).unwrap()).unwrap();
        assert_eq!(g, Graph::cycle(m));
    }

    #[test]
    fn euclidean_needs_states() {
        let rule = ThresholdRule::new(Metric::Euclidean, 1.0).unwrap();
        assert_eq!(build_graph(&matrix3(0.1, 0.2, 0.3), &rule), Err(ComplexError::MissingNorms));
        let traj = Trajectory::new(
            vec![0.0, 1.0, 2.0],
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![3.0, 0.0]),
                DVector::from_vec(vec![1.5, 0.0]),
            ],
            SolverTag::External,
        )
        .unwrap();
        let d = pairwise_overlaps(&traj, OverlapMode::Exact, 0, 0).unwrap();
        let g = build_graph(&d, &rule).unwrap();
        assert_eq!(g.edges(), &[(0, 2)]);
    }

    #[test]
    fn binomial_counts_for_k4() {
        let k = enumerate_cliques(&Graph::complete(4), 3);
        assert_eq!(k.counts(), vec![4, 6, 4, 1]);
        assert!(k.is_complete());
        assert!(k.is_closed());
        let truncated = enumerate_cliques(&Graph::complete(4), 2);
        assert!(!truncated.is_complete());
    }

    #[test]
    fn square_has_no_triangles() {
        let k = enumerate_cliques(&Graph::cycle(4), 3);
        assert_eq!(k.counts(), vec![4, 4, 0, 0]);
        assert_eq!(k.simplices(1), &[vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);
        assert_eq!(k.dimension(), Some(1));
    }

    #[test]
    fn stats_examples() {
        let s = graph_stats(&Graph::complete(4));
        assert_eq!((s.degeneracy, s.max_degree), (3, 3));
        let s = graph_stats(&Graph::cycle(4));
        assert_eq!((s.degeneracy, s.max_degree), (2, 2));
        let star = Graph::new(6, (1..6).map(|v| (0, v))).unwrap();
        let s = graph_stats(&star);
        assert_eq!((s.degeneracy, s.max_degree, s.arboricity_bound), (1, 5, 5));
    }

    #[test]
    fn graph_rejects_self_loops_and_dedups() {
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        let g = Graph::new(3, [(2, 0), (0, 2), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
    }

    #[test]
    fn from_parts_detects_missing_facet() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let bad = CliqueComplex::from_parts(
            g,
            vec![vec![vec![0], vec![1], vec![2]], vec![vec![0, 1], vec![1, 2]], vec![vec![0, 1, 2]]],
            true,
        );
        assert!(matches!(bad, Err(ComplexError::Malformed { r: 2, .. })));
    }

    #[test]
    fn euler_characteristic_of_k4_is_one() {
        assert_eq!(enumerate_cliques(&Graph::complete(4), 3).euler_characteristic(), 1);
        assert_eq!(enumerate_cliques(&Graph::cycle(5), 2).euler_characteristic(), 0);
    }
}
