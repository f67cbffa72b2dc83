//! Simple undirected graphs: triangle enumeration, clustering and
//! degree-preserving double-edge-swap randomization.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::rng::{self, below};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("rewiring needs at least 2 edges, graph has {0}")]
    TooFewEdges(usize),
    #[error(
        "rewiring saturated: {} of {} swaps after {} attempts",
        .partial.1.successful, .partial.1.requested, .partial.1.attempts
    )]
    Saturated { partial: Box<(Graph, RewireReport)> },
    #[error("cannot place {edges} edges on {nodes} nodes")]
    TooDense { nodes: usize, edges: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected graph without loops or parallel edges; nodes are `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub input_pairs: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

impl Graph {
    pub fn empty(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph with `node_count = max id + 1`, merging repeated pairs in
    /// either orientation and dropping self-loops.
    pub fn from_edge_list(edges: &[(usize, usize)]) -> (Self, IngestReport) {
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::from_edges_with_nodes(n, edges)
    }

    /// As [`Graph::from_edge_list`] but with at least `node_count` nodes.
    pub fn from_edges_with_nodes(
        node_count: usize,
        edges: &[(usize, usize)],
    ) -> (Self, IngestReport) {
        let n = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
            .max(node_count);
        let mut report = IngestReport {
            input_pairs: edges.len(),
            ..Default::default()
        };
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            // each duplicate shows up once at each endpoint
            report.duplicates_merged += before - list.len();
            edge_count += list.len();
        }
        report.duplicates_merged /= 2;
        (
            Self {
                adjacency,
                edge_count: edge_count / 2,
            },
            report,
        )
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Every triangle exactly once as `(u, v, w)` with `u < v < w`.
    pub fn triangles(&self) -> Triangles<'_> {
        Triangles {
            graph: self,
            u: 0,
            vi: 0,
            pu: 0,
            pv: 0,
            fresh: true,
        }
    }

    pub fn triangle_count(&self) -> u64 {
        self.triangles().count() as u64
    }

    /// Connected triples: sum over nodes of `d(d-1)/2`.
    pub fn wedge_count(&self) -> u64 {
        self.adjacency
            .iter()
            .map(|l| {
                let d = l.len() as u64;
                d * d.saturating_sub(1) / 2
            })
            .sum()
    }

    /// Global clustering coefficient `3 * triangles / wedges`, 0 without wedges.
    pub fn closed_triangle_fraction(&self) -> f64 {
        let wedges = self.wedge_count();
        if wedges == 0 {
            return 0.0;
        }
        3.0 * self.triangle_count() as f64 / wedges as f64
    }

    /// Degrees sorted ascending.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    /// Degree-preserving randomization by `successful_swaps` double edge swaps.
    ///
    /// Each attempt draws two distinct edges `(a, b)`, `(c, d)` uniformly,
    /// orients the second at random and proposes `(a, d)`, `(c, b)`. Proposals
    /// that would create a loop or a parallel edge are rejected. After
    /// `100 * successful_swaps` attempts the partial result is returned inside
    /// [`GraphError::Saturated`]. Connectivity is not preserved.
    pub fn rewire(
        &self,
        successful_swaps: usize,
        seed: u64,
    ) -> Result<(Graph, RewireReport), GraphError> {
        let mut report = RewireReport {
            requested: successful_swaps,
            seed,
            ..Default::default()
        };
        if successful_swaps == 0 {
            return Ok((self.clone(), report));
        }
        if self.edge_count < 2 {
            return Err(GraphError::TooFewEdges(self.edge_count));
        }
        let mut rng = rng::seeded(seed);
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();
        let key = |x: usize, y: usize| if x < y { (x, y) } else { (y, x) };
        let max_attempts = successful_swaps.saturating_mul(100);

        while report.successful < successful_swaps {
            if report.attempts >= max_attempts {
                let partial = Graph::from_edges_with_nodes(self.node_count(), &edges).0;
                return Err(GraphError::Saturated {
                    partial: Box::new((partial, report)),
                });
            }
            report.attempts += 1;
            let i = below(&mut rng, edges.len());
            let mut j = below(&mut rng, edges.len() - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = edges[i];
            let (mut c, mut d) = edges[j];
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut c, &mut d);
            }
            if a == d || c == b {
                report.rejected_loops += 1;
                continue;
            }
            let (e1, e2) = (key(a, d), key(c, b));
            if present.contains(&e1) || present.contains(&e2) {
                report.rejected_parallel += 1;
                continue;
            }
            present.remove(&edges[i]);
            present.remove(&edges[j]);
            present.insert(e1);
            present.insert(e2);
            edges[i] = e1;
            edges[j] = e2;
            report.successful += 1;
        }
        let (out, ingest) = Graph::from_edges_with_nodes(self.node_count(), &edges);
        debug_assert_eq!(ingest.self_loops_dropped + ingest.duplicates_merged, 0);
        debug_assert_eq!(out.degree_sequence(), self.degree_sequence());
        Ok((out, report))
    }

    /// Reads whitespace-separated pairs of node ids, one edge per line;
    /// blank lines and lines starting with `#` are skipped.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(Graph, IngestReport), GraphError> {
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| GraphError::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(format!(
                    "expected 2 node ids, found {}",
                    fields.len()
                )));
            }
            let id = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(format!("`{s}` is not a non-negative integer")))
            };
            edges.push((id(fields[0])?, id(fields[1])?));
        }
        Ok(Graph::from_edge_list(&edges))
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        out.flush()
    }

    /// Uniform random graph with exactly `edges` edges on `nodes` nodes.
    pub fn gnm(nodes: usize, edges: usize, seed: u64) -> Result<Graph, GraphError> {
        let max_edges = nodes * nodes.saturating_sub(1) / 2;
        if edges > max_edges {
            return Err(GraphError::TooDense { nodes, edges });
        }
        let mut rng = rng::seeded(seed);
        let mut chosen = HashSet::with_capacity(edges);
        let mut list = Vec::with_capacity(edges);
        while list.len() < edges {
            let u = below(&mut rng, nodes);
            let v = below(&mut rng, nodes);
            if u == v {
                continue;
            }
            let e = (u.min(v), u.max(v));
            if chosen.insert(e) {
                list.push(e);
            }
        }
        Ok(Graph::from_edges_with_nodes(nodes, &list).0)
    }

    /// Stochastic block model with `communities` contiguous blocks: node `i`
    /// belongs to block `i * communities / nodes`. Returns the graph and the
    /// block of every node.
    pub fn planted_partition(
        nodes: usize,
        communities: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    ) -> (Graph, Vec<usize>) {
        let communities = communities.max(1);
        let block: Vec<usize> = (0..nodes).map(|i| i * communities / nodes.max(1)).collect();
        let mut rng = rng::seeded(seed);
        let mut list = Vec::new();
        for u in 0..nodes {
            for v in u + 1..nodes {
                let p = if block[u] == block[v] { p_in } else { p_out };
                if rng.gen::<f64>() < p {
                    list.push((u, v));
                }
            }
        }
        (Graph::from_edges_with_nodes(nodes, &list).0, block)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RewireReport {
    pub seed: u64,
    pub requested: usize,
    pub successful: usize,
    pub attempts: usize,
    pub rejected_loops: usize,
    pub rejected_parallel: usize,
}

impl RewireReport {
    pub fn rejections(&self) -> usize {
        self.rejected_loops + self.rejected_parallel
    }
}

/// Iterator returned by [`Graph::triangles`].
///
/// For each edge `(u, v)` with `u < v` the sorted neighbor lists of `u` and
/// `v` are merged, keeping common neighbors `w > v`.
#[derive(Debug, Clone)]
pub struct Triangles<'a> {
    graph: &'a Graph,
    u: usize,
    vi: usize,
    pu: usize,
    pv: usize,
    fresh: bool,
}

impl Iterator for Triangles<'_> {
    type Item = (usize, usize, usize);

    fn next(&mut self) -> Option<Self::Item> {
        let adj = &self.graph.adjacency;
        while self.u < adj.len() {
            let nu = &adj[self.u];
            if self.fresh {
                // skip neighbors not above u
                if self.vi == 0 {
                    self.vi = nu.partition_point(|&x| x <= self.u);
                }
                if self.vi >= nu.len() {
                    self.u += 1;
                    self.vi = 0;
                    continue;
                }
                let v = nu[self.vi];
                self.pu = self.vi + 1;
                self.pv = adj[v].partition_point(|&x| x <= v);
                self.fresh = false;
            }
            let v = nu[self.vi];
            let nv = &adj[v];
            while self.pu < nu.len() && self.pv < nv.len() {
                let (a, b) = (nu[self.pu], nv[self.pv]);
                match a.cmp(&b) {
                    std::cmp::Ordering::Less => self.pu += 1,
                    std::cmp::Ordering::Greater => self.pv += 1,
                    std::cmp::Ordering::Equal => {
                        self.pu += 1;
                        self.pv += 1;
                        return Some((self.u, v, a));
                    }
                }
            }
            self.vi += 1;
            self.fresh = true;
            if self.vi >= nu.len() {
                self.u += 1;
                self.vi = 0;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edge_list(&e).0
    }

    fn path3() -> Graph {
        Graph::from_edge_list(&[(0, 1), (1, 2)]).0
    }

    #[test]
    fn ingestion_report() {
        let (g, r) = Graph::from_edge_list(&[(0, 1), (1, 0), (1, 1)]);
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!((r.self_loops_dropped, r.duplicates_merged), (1, 1));
        let (g, _) = Graph::from_edge_list(&[]);
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        assert!(g.degree_sequence().is_empty());
    }

    #[test]
    fn triangle_listing() {
        assert_eq!(k(3).triangles().collect::<Vec<_>>(), vec![(0, 1, 2)]);
        assert_eq!(path3().triangles().count(), 0);
        assert_eq!(
            k(4).triangles().collect::<Vec<_>>(),
            vec![(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        );
        assert_eq!(k(7).triangle_count(), 35);
    }

    #[test]
    fn isolated_node_before_triangle() {
        let g = Graph::from_edge_list(&[(3, 4), (4, 5), (3, 5), (0, 1)]).0;
        assert_eq!(g.triangles().collect::<Vec<_>>(), vec![(3, 4, 5)]);
    }

    #[test]
    fn clustering() {
        assert_eq!(k(3).closed_triangle_fraction(), 1.0);
        assert_eq!(path3().closed_triangle_fraction(), 0.0);
        let k4_minus = Graph::from_edge_list(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).0;
        assert_eq!(k4_minus.wedge_count(), 8);
        assert_eq!(k4_minus.triangle_count(), 2);
        assert_eq!(k4_minus.closed_triangle_fraction(), 0.75);
        assert_eq!(k(6).closed_triangle_fraction(), 1.0);
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(k(3).degree_sequence(), vec![2, 2, 2]);
        assert_eq!(path3().degree_sequence(), vec![1, 1, 2]);
    }

    #[test]
    fn rewire_triangle_saturates() {
        // K3 admits no legal swap: every proposal reuses an existing edge or makes a loop.
        match k(3).rewire(1, 1) {
            Err(GraphError::Saturated { partial }) => {
                assert_eq!(partial.0, k(3));
                assert_eq!(partial.1.attempts, 100);
                assert_eq!(partial.1.successful, 0);
            }
            other => panic!("expected saturation, got {other:?}"),
        }
    }

    #[test]
    fn rewire_four_cycle() {
        let c4 = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).0;
        // (0,1),(2,3) -> (0,3),(2,1): both already present.
        assert!(c4.has_edge(0, 3) && c4.has_edge(2, 1));
        let (g, r) = c4.rewire(1, 5).unwrap();
        assert_eq!(r.successful, 1);
        assert_eq!(g.degree_sequence(), vec![2, 2, 2, 2]);
        assert_eq!(g.edge_count(), 4);
        assert!(r.attempts >= 1);
    }

    #[test]
    fn rewire_is_deterministic() {
        let g = Graph::gnm(100, 400, 3).unwrap();
        let (a, ra) = g.rewire(1000, 11).unwrap();
        let (b, rb) = g.rewire(1000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        let (c, _) = g.rewire(1000, 12).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.degree_sequence(), g.degree_sequence());
        assert_eq!(c.degree_sequence(), g.degree_sequence());
    }

    #[test]
    fn rewire_needs_two_edges() {
        let g = Graph::from_edge_list(&[(0, 1)]).0;
        assert!(matches!(g.rewire(1, 0), Err(GraphError::TooFewEdges(1))));
        assert_eq!(g.rewire(0, 0).unwrap().0, g);
    }

    #[test]
    fn edge_list_io() {
        let text = "# comment\n0 1\n\n1 2\n2\t0\n";
        let (g, _) = Graph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g, k(3));
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "0 1\n0 2\n1 2\n");
        assert_eq!(Graph::read_edge_list(out.as_slice()).unwrap().0, g);

        let err = Graph::read_edge_list("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = Graph::read_edge_list("0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
    }

    #[test]
    fn generators() {
        let g = Graph::gnm(50, 200, 1).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (50, 200));
        assert!(Graph::gnm(4, 7, 1).is_err());
        let (g, blocks) = Graph::planted_partition(40, 4, 1.0, 0.0, 2);
        assert_eq!(blocks[9], 0);
        assert_eq!(blocks[10], 1);
        // four disjoint K10
        assert_eq!(g.edge_count(), 4 * 45);
        assert_eq!(g.triangle_count(), 4 * 120);
    }
}
