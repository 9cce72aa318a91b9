//! Undirected simple graphs with optional node/edge labels, plus the exact
//! combinatorial oracles every dataset label is checked against: triangle
//! enumeration, k-clique enumeration, and BFS distance between node sets.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop ({0}, {0}) is not allowed")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    EndpointOutOfRange(usize, usize, usize),
    #[error("node {0} is outside 0..{1}")]
    NodeOutOfRange(usize, usize),
    #[error("mapping is not a bijection on 0..{0}")]
    NotABijection(usize),
    #[error("node sets overlap at node {0}")]
    OverlappingSets(usize),
    #[error("node set is empty")]
    EmptyNodeSet,
    #[error("node labels must cover every node: expected {expected}, got {got}")]
    NodeLabelCount { expected: usize, got: usize },
    #[error("edge label given for missing edge ({0}, {1})")]
    LabelForMissingEdge(usize, usize),
    #[error("edge ({0}, {1}) has no label")]
    MissingEdgeLabel(usize, usize),
}

/// Three mutually adjacent nodes, stored as a sorted triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub nodes: [usize; 3],
}

impl Triangle {
    fn new(a: usize, b: usize, c: usize) -> Self {
        let mut nodes = [a, b, c];
        nodes.sort_unstable();
        Triangle { nodes }
    }

    /// The three edges of the triangle in canonical (u < v) form.
    pub fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.nodes;
        [(a, b), (a, c), (b, c)]
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let e = if u < v { (u, v) } else { (v, u) };
        self.edges().contains(&e)
    }
}

/// All k-node complete subgraphs of a graph, maximal or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSet {
    /// Each clique sorted ascending; the list sorted lexicographically.
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueSet {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

/// Hop distance between node sets; unreachable is a distinct value, never a
/// large sentinel number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Hops(usize),
    Unreachable,
}

impl Distance {
    pub fn hops(&self) -> Option<usize> {
        match self {
            Distance::Hops(d) => Some(*d),
            Distance::Unreachable => None,
        }
    }
}

/// Undirected simple graph. Immutable after construction; all operations are
/// pure functions, so shared concurrent reads are safe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    /// Canonical edge list: u < v, sorted, no duplicates.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbor lists.
    adj: Vec<Vec<usize>>,
    node_labels: Option<Vec<u32>>,
    edge_labels: Option<BTreeMap<(usize, usize), u32>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are canonicalized to u < v and
    /// duplicates merged; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(
        num_nodes: usize,
        edge_list: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edge_list {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if u >= num_nodes || v >= num_nodes {
                return Err(GraphError::EndpointOutOfRange(u, v, num_nodes));
            }
            edges.push(if u < v { (u, v) } else { (v, u) });
        }
        edges.sort_unstable();
        edges.dedup();

        let mut adj = vec![Vec::new(); num_nodes];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        Ok(Graph {
            num_nodes,
            edges,
            adj,
            node_labels: None,
            edge_labels: None,
        })
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).expect("complete graph is always valid")
    }

    /// Attaches one label per node. The label vector must cover every node.
    pub fn with_node_labels(mut self, labels: Vec<u32>) -> Result<Self, GraphError> {
        if labels.len() != self.num_nodes {
            return Err(GraphError::NodeLabelCount {
                expected: self.num_nodes,
                got: labels.len(),
            });
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    /// Attaches one label per edge; every edge must be covered, and no label
    /// may reference a missing edge.
    pub fn with_edge_labels(
        mut self,
        labels: impl IntoIterator<Item = ((usize, usize), u32)>,
    ) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        for ((u, v), l) in labels {
            let e = if u < v { (u, v) } else { (v, u) };
            if !self.has_edge(e.0, e.1) {
                return Err(GraphError::LabelForMissingEdge(e.0, e.1));
            }
            map.insert(e, l);
        }
        for &(u, v) in &self.edges {
            if !map.contains_key(&(u, v)) {
                return Err(GraphError::MissingEdgeLabel(u, v));
            }
        }
        self.edge_labels = Some(map);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: u < v, sorted ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn node_labels(&self) -> Option<&[u32]> {
        self.node_labels.as_deref()
    }

    pub fn edge_labels(&self) -> Option<&BTreeMap<(usize, usize), u32>> {
        self.edge_labels.as_ref()
    }

    pub fn edge_label(&self, u: usize, v: usize) -> Option<u32> {
        let e = if u < v { (u, v) } else { (v, u) };
        self.edge_labels.as_ref().and_then(|m| m.get(&e).copied())
    }

    /// True when every node is reachable from node 0 (vacuously true for
    /// graphs with fewer than two nodes).
    pub fn is_connected(&self) -> bool {
        if self.num_nodes < 2 {
            return true;
        }
        let mut seen = vec![false; self.num_nodes];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.num_nodes
    }

    /// Enumerates every triangle exactly once, sorted lexicographically.
    ///
    /// Walks the canonical edge list and intersects the endpoints' sorted
    /// neighbor lists, keeping only completions above the edge's upper node.
    pub fn triangles(&self) -> Vec<Triangle> {
        let mut out = Vec::new();
        for &(u, v) in &self.edges {
            // sorted-list intersection of adj[u] and adj[v], w > v only
            let (mut i, mut j) = (0, 0);
            let (a, b) = (&self.adj[u], &self.adj[v]);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if a[i] > v {
                            out.push(Triangle::new(u, v, a[i]));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        out
    }

    /// Enumerates all k-node complete subgraphs (maximal or not), each exactly
    /// once, in lexicographic order. Ordered candidate extension: every clique
    /// is grown only by nodes above its current maximum, so no subset is
    /// visited twice.
    ///
    /// Requires `k >= 2`.
    pub fn k_cliques(&self, k: usize) -> CliqueSet {
        assert!(k >= 2, "k_cliques requires k >= 2");
        let mut cliques = Vec::new();
        let mut current = Vec::with_capacity(k);
        let candidates: Vec<usize> = (0..self.num_nodes).collect();
        self.extend_clique(&mut current, &candidates, k, &mut cliques);
        CliqueSet { cliques }
    }

    fn extend_clique(
        &self,
        current: &mut Vec<usize>,
        candidates: &[usize],
        k: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        if current.len() + candidates.len() < k {
            return;
        }
        for (i, &v) in candidates.iter().enumerate() {
            current.push(v);
            // candidates after v that are adjacent to v (others already
            // adjacent to the rest of `current` by induction)
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.has_edge(v, w))
                .collect();
            self.extend_clique(current, &next, k, out);
            current.pop();
        }
    }

    /// Minimum BFS hop distance between two disjoint non-empty node sets:
    /// min over u in A, v in B. Multi-source BFS from A.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Result<Distance, GraphError> {
        if a.is_empty() || b.is_empty() {
            return Err(GraphError::EmptyNodeSet);
        }
        for &u in a.iter().chain(b.iter()) {
            if u >= self.num_nodes {
                return Err(GraphError::NodeOutOfRange(u, self.num_nodes));
            }
        }
        let mut in_b = vec![false; self.num_nodes];
        for &v in b {
            in_b[v] = true;
        }
        for &u in a {
            if in_b[u] {
                return Err(GraphError::OverlappingSets(u));
            }
        }

        let mut dist = vec![usize::MAX; self.num_nodes];
        let mut queue = std::collections::VecDeque::new();
        for &u in a {
            if dist[u] == usize::MAX {
                dist[u] = 0;
                queue.push_back(u);
            }
        }
        while let Some(u) = queue.pop_front() {
            if in_b[u] {
                return Ok(Distance::Hops(dist[u]));
            }
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        Ok(Distance::Unreachable)
    }

    /// Single-source BFS hop distances from `src` (None = unreachable).
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_nodes];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Relabels nodes through a bijection: node u becomes `perm[u]`. Labels
    /// are carried along; the result is isomorphic to the input.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let n = self.num_nodes;
        if perm.len() != n {
            return Err(GraphError::NotABijection(n));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(GraphError::NotABijection(n));
            }
            seen[p] = true;
        }

        let edges: Vec<(usize, usize)> =
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let mut g = Graph::from_edges(n, edges)?;
        if let Some(labels) = &self.node_labels {
            let mut new_labels = vec![0u32; n];
            for (u, &l) in labels.iter().enumerate() {
                new_labels[perm[u]] = l;
            }
            g = g.with_node_labels(new_labels)?;
        }
        if let Some(labels) = &self.edge_labels {
            let new_labels: Vec<((usize, usize), u32)> = labels
                .iter()
                .map(|(&(u, v), &l)| ((perm[u], perm[v]), l))
                .collect();
            g = g.with_edge_labels(new_labels)?;
        }
        Ok(g)
    }

    /// Boolean adjacency matrix; `include_self` sets the diagonal.
    pub fn adjacency_mask(&self, include_self: bool) -> Vec<Vec<bool>> {
        let n = self.num_nodes;
        let mut mask = vec![vec![false; n]; n];
        for &(u, v) in &self.edges {
            mask[u][v] = true;
            mask[v][u] = true;
        }
        if include_self {
            for (i, row) in mask.iter_mut().enumerate() {
                row[i] = true;
            }
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n^3) all-triples oracle, independent of the edge-walk enumeration.
    fn brute_force_triangles(g: &Graph) -> Vec<Triangle> {
        let n = g.num_nodes();
        let mut out = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    if g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c) {
                        out.push(Triangle { nodes: [a, b, c] });
                    }
                }
            }
        }
        out
    }

    /// Brute-force k-subset oracle for cliques.
    fn brute_force_k_cliques(g: &Graph, k: usize) -> Vec<Vec<usize>> {
        fn rec(
            g: &Graph,
            start: usize,
            current: &mut Vec<usize>,
            k: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if current.len() == k {
                if current
                    .iter()
                    .enumerate()
                    .all(|(i, &u)| current[i + 1..].iter().all(|&v| g.has_edge(u, v)))
                {
                    out.push(current.clone());
                }
                return;
            }
            for v in start..g.num_nodes() {
                current.push(v);
                rec(g, v + 1, current, k, out);
                current.pop();
            }
        }
        let mut out = Vec::new();
        rec(g, 0, &mut Vec::new(), k, &mut out);
        out
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        perm
    }

    #[test]
    fn build_k3() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn build_star_on_four_nodes() {
        // formaldehyde skeleton: carbon at node 0, three attached atoms
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.degree(0), 3);
        assert!(g.triangles().is_empty());
    }

    #[test]
    fn build_rejects_self_loop() {
        let err = Graph::from_edges(2, [(0, 0)]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop(0));
    }

    #[test]
    fn build_rejects_out_of_range() {
        let err = Graph::from_edges(2, [(0, 5)]).unwrap_err();
        assert_eq!(err, GraphError::EndpointOutOfRange(0, 5, 2));
    }

    #[test]
    fn build_merges_duplicates_and_orients() {
        let g = Graph::from_edges(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn triangle_enumeration_on_k3() {
        let g = Graph::complete(3);
        let tris = g.triangles();
        assert_eq!(tris, vec![Triangle { nodes: [0, 1, 2] }]);
    }

    #[test]
    fn triangle_enumeration_matches_brute_force_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_graph(&mut rng, 8, 0.5);
        assert_eq!(g.triangles(), brute_force_triangles(&g));
    }

    #[test]
    fn triangle_enumeration_exhaustive_small_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=12 {
            for _ in 0..40 {
                let p = rng.gen_range(0.0..1.0);
                let g = random_graph(&mut rng, n, p);
                assert_eq!(g.triangles(), brute_force_triangles(&g), "n={n}");
            }
        }
    }

    #[test]
    fn k_cliques_on_k4() {
        let g = Graph::complete(4);
        assert_eq!(g.k_cliques(4).cliques, vec![vec![0, 1, 2, 3]]);
        assert_eq!(g.k_cliques(3).len(), 4);
    }

    #[test]
    fn k_cliques_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(2..10);
            let p = rng.gen_range(0.2..0.9);
            let g = random_graph(&mut rng, n, p);
            for k in 2..=4 {
                assert_eq!(g.k_cliques(k).cliques, brute_force_k_cliques(&g, k));
            }
        }
    }

    #[test]
    fn three_cliques_equal_triangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..14);
            let p = rng.gen_range(0.0..1.0);
            let g = random_graph(&mut rng, n, p);
            let tris: Vec<Vec<usize>> =
                g.triangles().iter().map(|t| t.nodes.to_vec()).collect();
            assert_eq!(g.k_cliques(3).cliques, tris);
        }
    }

    /// Two K4s joined by a single bridge edge between them.
    fn two_k4s_bridged() -> Graph {
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in (u + 1)..4 {
                edges.push((u, v));
                edges.push((u + 4, v + 4));
            }
        }
        edges.push((0, 4));
        Graph::from_edges(8, edges).unwrap()
    }

    #[test]
    fn set_distance_bridged_cliques() {
        let g = two_k4s_bridged();
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..8).collect();
        assert_eq!(g.set_distance(&a, &b).unwrap(), Distance::Hops(1));
    }

    #[test]
    fn set_distance_through_path() {
        // two K4s each bridged to the ends of a 3-node path: 8,9,10
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in (u + 1)..4 {
                edges.push((u, v));
                edges.push((u + 4, v + 4));
            }
        }
        edges.extend([(8, 9), (9, 10), (0, 8), (4, 10)]);
        let g = Graph::from_edges(11, edges).unwrap();
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..8).collect();
        assert_eq!(g.set_distance(&a, &b).unwrap(), Distance::Hops(4));
    }

    #[test]
    fn set_distance_shared_base_node() {
        // two K4s bridged to the same base node 8
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in (u + 1)..4 {
                edges.push((u, v));
                edges.push((u + 4, v + 4));
            }
        }
        edges.extend([(0, 8), (4, 8)]);
        let g = Graph::from_edges(9, edges).unwrap();
        let a: Vec<usize> = (0..4).collect();
        let b: Vec<usize> = (4..8).collect();
        assert_eq!(g.set_distance(&a, &b).unwrap(), Distance::Hops(2));
    }

    #[test]
    fn set_distance_rejects_overlap() {
        let g = Graph::complete(4);
        let err = g.set_distance(&[0, 1], &[1, 2]).unwrap_err();
        assert_eq!(err, GraphError::OverlappingSets(1));
    }

    #[test]
    fn set_distance_unreachable_is_distinct() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.set_distance(&[0], &[2]).unwrap(), Distance::Unreachable);
    }

    #[test]
    fn set_distance_symmetric_and_bounded_by_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.gen_range(4..14);
            let g = random_graph(&mut rng, n, 0.3);
            let a = vec![rng.gen_range(0..n / 2)];
            let b = vec![n / 2 + rng.gen_range(0..n - n / 2)];
            if a == b {
                continue;
            }
            let d_ab = g.set_distance(&a, &b).unwrap();
            let d_ba = g.set_distance(&b, &a).unwrap();
            assert_eq!(d_ab, d_ba);
            // must agree with single-source BFS for singleton sets
            let bfs = g.bfs_distances(a[0]);
            match d_ab {
                Distance::Hops(d) => assert_eq!(bfs[b[0]], Some(d)),
                Distance::Unreachable => assert_eq!(bfs[b[0]], None),
            }
        }
    }

    #[test]
    fn permute_identity() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let perm: Vec<usize> = (0..4).collect();
        assert_eq!(g.permute(&perm).unwrap(), g);
    }

    #[test]
    fn permute_k3_is_k3() {
        let g = Graph::complete(3);
        assert_eq!(g.permute(&[2, 0, 1]).unwrap(), g);
    }

    #[test]
    fn permute_preserves_triangle_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_graph(&mut rng, 10, 0.3);
        let perm = random_permutation(&mut rng, 10);
        let h = g.permute(&perm).unwrap();
        assert_eq!(g.triangles().len(), h.triangles().len());
        assert_eq!(g.num_edges(), h.num_edges());
    }

    #[test]
    fn permute_rejects_non_bijection() {
        let g = Graph::complete(3);
        assert_eq!(
            g.permute(&[0, 0, 1]).unwrap_err(),
            GraphError::NotABijection(3)
        );
        assert_eq!(
            g.permute(&[0, 1]).unwrap_err(),
            GraphError::NotABijection(3)
        );
    }

    #[test]
    fn permute_carries_labels() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)])
            .unwrap()
            .with_node_labels(vec![10, 11, 12])
            .unwrap()
            .with_edge_labels([((0, 1), 7), ((1, 2), 8)])
            .unwrap();
        let h = g.permute(&[2, 0, 1]).unwrap();
        assert_eq!(h.node_labels().unwrap(), &[11, 12, 10]);
        assert_eq!(h.edge_label(2, 0), Some(7));
        assert_eq!(h.edge_label(0, 1), Some(8));
    }

    #[test]
    fn adjacency_mask_single_edge() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(
            g.adjacency_mask(false),
            vec![vec![false, true], vec![true, false]]
        );
        assert_eq!(
            g.adjacency_mask(true),
            vec![vec![true, true], vec![true, true]]
        );
    }

    #[test]
    fn adjacency_mask_commutes_with_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = random_graph(&mut rng, 8, 0.4);
        let perm = random_permutation(&mut rng, 8);
        let mask = g.adjacency_mask(false);
        let permuted_mask = g.permute(&perm).unwrap().adjacency_mask(false);
        for u in 0..8 {
            for v in 0..8 {
                assert_eq!(mask[u][v], permuted_mask[perm[u]][perm[v]]);
            }
        }
    }

    #[test]
    fn oracles_are_isomorphism_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = random_graph(&mut rng, 9, 0.45);
        let perm = random_permutation(&mut rng, 9);
        let h = g.permute(&perm).unwrap();

        // triangles map through the permutation
        let mut mapped: Vec<Triangle> = g
            .triangles()
            .iter()
            .map(|t| {
                let [a, b, c] = t.nodes;
                Triangle::new(perm[a], perm[b], perm[c])
            })
            .collect();
        mapped.sort();
        assert_eq!(h.triangles(), mapped);

        // cliques map through the permutation
        for k in 2..=4 {
            let mut mapped: Vec<Vec<usize>> = g
                .k_cliques(k)
                .cliques
                .iter()
                .map(|c| {
                    let mut m: Vec<usize> = c.iter().map(|&u| perm[u]).collect();
                    m.sort_unstable();
                    m
                })
                .collect();
            mapped.sort();
            assert_eq!(h.k_cliques(k).cliques, mapped);
        }
    }

    #[test]
    fn edge_labels_must_cover_all_edges() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let err = g
            .clone()
            .with_edge_labels([((0, 1), 1)])
            .unwrap_err();
        assert_eq!(err, GraphError::MissingEdgeLabel(1, 2));
        let err = g.with_edge_labels([((0, 2), 1)]).unwrap_err();
        assert_eq!(err, GraphError::LabelForMissingEdge(0, 2));
    }
}
