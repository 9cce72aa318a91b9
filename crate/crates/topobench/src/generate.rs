//! Candidate-graph generators for the two synthetic tasks.
//!
//! Triangles: Erdos-Renyi or k-nearest-neighbor graphs, with triangle edges
//! removed until exactly one or zero triangles remain. Clique Distance: a
//! preferential-attachment base graph with two k-cliques attached to two
//! distinct base nodes; the label compares the inter-clique hop distance to a
//! threshold.
//!
//! Everything is a pure function of an explicit seed, so items can be
//! regenerated (and audited) independently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Distance, Graph, GraphError, Triangle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("cannot reach {target} triangles: graph has {available}")]
    UnsatisfiableTarget { target: u8, available: usize },
    #[error("gave up after {retries} retries: {reason}")]
    RetriesExhausted { retries: usize, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Deterministic per-item seed derivation: splitmix64 over the master seed
/// and item index. Stable across platforms and releases.
pub fn item_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG used everywhere: reproducible across platforms.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edge-probability policy for the Erdos-Renyi family. The mean-degree form
/// picks p = d / (n - 1) per graph, so density stays comparable while the
/// node count varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ErDensity {
    Prob { p: f64 },
    MeanDegree { degree: f64 },
}

impl ErDensity {
    pub fn edge_prob(&self, n: usize) -> f64 {
        match *self {
            ErDensity::Prob { p } => p,
            ErDensity::MeanDegree { degree } => {
                if n <= 1 {
                    0.0
                } else {
                    (degree / (n - 1) as f64).clamp(0.0, 1.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleGenParams {
    /// Inclusive node-count range.
    pub node_count_range: (usize, usize),
    pub er_density: ErDensity,
    /// k is drawn uniformly from these choices for the kNN family.
    pub knn_k_choices: Vec<usize>,
    /// Probability of drawing from the ER family rather than kNN.
    pub er_family_prob: f64,
    /// Fresh-draw budget when the triangle target is unsatisfiable.
    pub max_retries: usize,
}

impl Default for TriangleGenParams {
    fn default() -> Self {
        TriangleGenParams {
            node_count_range: (12, 30),
            er_density: ErDensity::MeanDegree { degree: 3.0 },
            knn_k_choices: vec![2, 3],
            er_family_prob: 0.5,
            max_retries: 64,
        }
    }
}

impl TriangleGenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        let (lo, hi) = self.node_count_range;
        if lo < 3 || hi < lo {
            return Err(GenError::InvalidParams(format!(
                "node count range ({lo}, {hi}) must be non-empty and start at 3 or more"
            )));
        }
        if !(0.0..=1.0).contains(&self.er_family_prob) {
            return Err(GenError::InvalidParams(
                "family mix probability must be in [0, 1]".into(),
            ));
        }
        if let ErDensity::Prob { p } = self.er_density {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::InvalidParams("edge probability must be in [0, 1]".into()));
            }
        }
        if self.knn_k_choices.is_empty() || self.knn_k_choices.iter().any(|&k| k == 0) {
            return Err(GenError::InvalidParams(
                "kNN choices must be non-empty with every k >= 1".into(),
            ));
        }
        if self.knn_k_choices.iter().any(|&k| k >= lo) {
            return Err(GenError::InvalidParams(
                "every kNN k must be below the smallest node count".into(),
            ));
        }
        Ok(())
    }
}

/// How the two cliques connect to the base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttachmentMode {
    /// k new nodes form the clique; one of them is joined to the attachment
    /// node by a single bridge edge.
    Bridged,
    /// The attachment node itself becomes a clique member, completed by k - 1
    /// new nodes.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueGenParams {
    /// Inclusive base-graph node-count range.
    pub base_node_range: (usize, usize),
    pub clique_size: usize,
    /// Preferential-attachment connection parameter; must equal clique_size - 2
    /// so the base graph cannot contain a clique of the target size.
    pub ba_m: usize,
    pub distance_threshold: usize,
    pub attachment: AttachmentMode,
}

impl Default for CliqueGenParams {
    fn default() -> Self {
        CliqueGenParams {
            base_node_range: (5, 20),
            clique_size: 4,
            ba_m: 2,
            distance_threshold: 4,
            attachment: AttachmentMode::Shared,
        }
    }
}

impl CliqueGenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.clique_size < 3 {
            return Err(GenError::InvalidParams("clique size must be >= 3".into()));
        }
        if self.ba_m != self.clique_size - 2 {
            return Err(GenError::InvalidParams(format!(
                "ba_m must equal clique_size - 2 (got {} for clique size {})",
                self.ba_m, self.clique_size
            )));
        }
        if self.distance_threshold < 1 {
            return Err(GenError::InvalidParams("distance threshold must be >= 1".into()));
        }
        let (lo, hi) = self.base_node_range;
        if lo < self.ba_m + 1 || hi < lo {
            return Err(GenError::InvalidParams(format!(
                "base node range ({lo}, {hi}) must be non-empty and start at ba_m + 1"
            )));
        }
        Ok(())
    }
}

/// Where a dataset item came from: enough to regenerate and audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Provenance {
    Er {
        seed: u64,
        n: usize,
        p: f64,
        removed_edges: usize,
        connected: bool,
    },
    Knn {
        seed: u64,
        n: usize,
        k: usize,
        removed_edges: usize,
        connected: bool,
    },
    BaCliques {
        seed: u64,
        base_n: usize,
        ba_m: usize,
        clique_size: usize,
        attachment: AttachmentMode,
        attach_nodes: (usize, usize),
        threshold: usize,
        distance: usize,
        connected: bool,
    },
}

impl Provenance {
    pub fn seed(&self) -> u64 {
        match self {
            Provenance::Er { seed, .. }
            | Provenance::Knn { seed, .. }
            | Provenance::BaCliques { seed, .. } => *seed,
        }
    }
}

/// One benchmark item: a graph, its binary label, and how it was made.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetItem {
    pub id: u64,
    pub graph: Graph,
    pub label: u8,
    pub provenance: Provenance,
}

/// Erdos-Renyi G(n, p): each unordered pair included independently.
pub fn gen_er_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("generated pairs are in range")
}

/// k-nearest-neighbor graph: n points uniform in the unit square, each node
/// joined to its k nearest Euclidean neighbors (undirected union). Distance
/// ties break by node index, so the output is a pure function of the seed.
pub fn gen_knn_graph(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Graph {
    assert!(k < n, "gen_knn_graph requires k < n");
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&v| v != u)
            .map(|v| {
                let dx = points[u].0 - points[v].0;
                let dy = points[u].1 - points[v].1;
                (dx * dx + dy * dy, v)
            })
            .collect();
        dists.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
        for &(_, v) in dists.iter().take(k) {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, edges).expect("generated pairs are in range")
}

/// Barabasi-Albert preferential attachment: a complete seed on m + 1 nodes,
/// then each new node attaches m edges to distinct existing nodes chosen with
/// probability proportional to degree (sampling without replacement).
///
/// Edge count is always C(m+1, 2) + (n - m - 1) * m.
pub fn gen_ba_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Graph {
    assert!(m >= 1, "gen_ba_graph requires m >= 1");
    assert!(n >= m + 1, "gen_ba_graph requires n >= m + 1");
    let mut edges = Vec::new();
    for u in 0..=m {
        for v in (u + 1)..=m {
            edges.push((u, v));
        }
    }
    let mut degrees = vec![m; m + 1];
    for new in (m + 1)..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        let mut remaining_total: usize = degrees.iter().sum();
        for _ in 0..m {
            let r = rng.gen_range(0..remaining_total);
            let mut acc = 0usize;
            let mut pick = usize::MAX;
            for (node, &d) in degrees.iter().enumerate() {
                if chosen.contains(&node) {
                    continue;
                }
                acc += d;
                if acc > r {
                    pick = node;
                    break;
                }
            }
            debug_assert!(pick != usize::MAX);
            remaining_total -= degrees[pick];
            chosen.push(pick);
        }
        for &t in &chosen {
            edges.push((t, new));
            degrees[t] += 1;
        }
        degrees.push(m);
    }
    Graph::from_edges(n, edges).expect("generated pairs are in range")
}

/// Removes edges that belong to triangles until exactly `target` triangles
/// remain. When `target` is 1, one triangle is protected up front (chosen
/// uniformly) and its edges are never removed, so the loop always terminates
/// at exactly one.
///
/// The result is an edge-subset of the input on the same nodes; a graph that
/// already satisfies the target is returned unchanged.
pub fn reduce_triangles(rng: &mut ChaCha8Rng, g: &Graph, target: u8) -> Result<Graph, GenError> {
    assert!(target <= 1, "target triangle count must be 0 or 1");
    let mut triangles = g.triangles();
    if triangles.len() < target as usize {
        return Err(GenError::UnsatisfiableTarget {
            target,
            available: triangles.len(),
        });
    }
    if triangles.len() == target as usize {
        return Ok(g.clone());
    }

    let protected: Option<Triangle> =
        (target == 1).then(|| triangles[rng.gen_range(0..triangles.len())]);

    let mut edges: std::collections::BTreeSet<(usize, usize)> =
        g.edges().iter().copied().collect();
    loop {
        let candidates: Vec<usize> = triangles
            .iter()
            .enumerate()
            .filter(|(_, t)| Some(**t) != protected)
            .map(|(i, _)| i)
            .collect();
        if candidates.is_empty() {
            break;
        }
        let tri = triangles[candidates[rng.gen_range(0..candidates.len())]];
        let removable: Vec<(usize, usize)> = tri
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| protected.map_or(true, |p| !p.contains_edge(u, v)))
            .collect();
        // a triangle distinct from the protected one shares at most one edge
        debug_assert!(!removable.is_empty());
        let (u, v) = removable[rng.gen_range(0..removable.len())];
        edges.remove(&(u, v));
        triangles.retain(|t| !t.contains_edge(u, v));
    }
    debug_assert_eq!(triangles.len(), target as usize);
    Ok(Graph::from_edges(g.num_nodes(), edges)?)
}

/// One Triangles item with the requested label. Retries with fresh draws when
/// a triangle is requested but the sampled graph has none.
pub fn gen_triangle_item(
    id: u64,
    seed: u64,
    params: &TriangleGenParams,
    label: u8,
) -> Result<DatasetItem, GenError> {
    params.validate()?;
    assert!(label <= 1, "label must be 0 or 1");
    let mut rng = seeded_rng(seed);
    let (lo, hi) = params.node_count_range;
    for _ in 0..params.max_retries.max(1) {
        let n = rng.gen_range(lo..=hi);
        let use_er = rng.gen_bool(params.er_family_prob);
        let (raw, family): (Graph, _) = if use_er {
            let p = params.er_density.edge_prob(n);
            (gen_er_graph(&mut rng, n, p), FamilyDraw::Er { n, p })
        } else {
            let k = params.knn_k_choices[rng.gen_range(0..params.knn_k_choices.len())];
            (gen_knn_graph(&mut rng, n, k), FamilyDraw::Knn { n, k })
        };
        match reduce_triangles(&mut rng, &raw, label) {
            Ok(graph) => {
                let removed_edges = raw.num_edges() - graph.num_edges();
                let connected = graph.is_connected();
                let provenance = match family {
                    FamilyDraw::Er { n, p } => Provenance::Er {
                        seed,
                        n,
                        p,
                        removed_edges,
                        connected,
                    },
                    FamilyDraw::Knn { n, k } => Provenance::Knn {
                        seed,
                        n,
                        k,
                        removed_edges,
                        connected,
                    },
                };
                return Ok(DatasetItem {
                    id,
                    graph,
                    label,
                    provenance,
                });
            }
            Err(GenError::UnsatisfiableTarget { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GenError::RetriesExhausted {
        retries: params.max_retries,
        reason: format!("no graph with a triangle found for label {label}"),
    })
}

enum FamilyDraw {
    Er { n: usize, p: f64 },
    Knn { n: usize, k: usize },
}

/// Adds a K_k of brand-new nodes and joins one of them (chosen uniformly) to
/// `attach_node` by a single bridge edge. Returns the extended graph and the
/// clique's node set.
pub fn attach_clique(
    rng: &mut ChaCha8Rng,
    g: &Graph,
    attach_node: usize,
    k: usize,
) -> Result<(Graph, Vec<usize>), GenError> {
    if attach_node >= g.num_nodes() {
        return Err(GraphError::NodeOutOfRange(attach_node, g.num_nodes()).into());
    }
    let base = g.num_nodes();
    let clique: Vec<usize> = (base..base + k).collect();
    let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
    for i in 0..k {
        for j in (i + 1)..k {
            edges.push((clique[i], clique[j]));
        }
    }
    let designated = clique[rng.gen_range(0..k)];
    edges.push((attach_node, designated));
    Ok((Graph::from_edges(base + k, edges)?, clique))
}

/// Completes `attach_node` into a K_k by adding k - 1 new nodes all adjacent
/// to it and to each other. The attachment node is a member of the returned
/// clique set.
pub fn attach_clique_shared(
    g: &Graph,
    attach_node: usize,
    k: usize,
) -> Result<(Graph, Vec<usize>), GenError> {
    if attach_node >= g.num_nodes() {
        return Err(GraphError::NodeOutOfRange(attach_node, g.num_nodes()).into());
    }
    let base = g.num_nodes();
    let fresh: Vec<usize> = (base..base + k - 1).collect();
    let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
    for (i, &u) in fresh.iter().enumerate() {
        edges.push((attach_node, u));
        for &v in &fresh[i + 1..] {
            edges.push((u, v));
        }
    }
    let mut clique = vec![attach_node];
    clique.extend(&fresh);
    Ok((Graph::from_edges(base + k - 1, edges)?, clique))
}

/// One Clique Distance item: BA base, two attached cliques, label from the
/// strict threshold comparison (distance < threshold means label 0).
pub fn gen_clique_item(
    id: u64,
    seed: u64,
    params: &CliqueGenParams,
) -> Result<DatasetItem, GenError> {
    params.validate()?;
    let mut rng = seeded_rng(seed);
    let (lo, hi) = params.base_node_range;
    let n = rng.gen_range(lo..=hi);
    let base = gen_ba_graph(&mut rng, n, params.ba_m);

    let a1 = rng.gen_range(0..n);
    let mut a2 = rng.gen_range(0..n - 1);
    if a2 >= a1 {
        a2 += 1;
    }

    let k = params.clique_size;
    let (graph, c1, c2) = match params.attachment {
        AttachmentMode::Bridged => {
            let (g1, c1) = attach_clique(&mut rng, &base, a1, k)?;
            let (g2, c2) = attach_clique(&mut rng, &g1, a2, k)?;
            (g2, c1, c2)
        }
        AttachmentMode::Shared => {
            let (g1, c1) = attach_clique_shared(&base, a1, k)?;
            let (g2, c2) = attach_clique_shared(&g1, a2, k)?;
            (g2, c1, c2)
        }
    };

    let distance = match graph.set_distance(&c1, &c2)? {
        Distance::Hops(d) => d,
        // base graphs are connected by construction, so this cannot happen;
        // an unreachable pair is trivially at or above any threshold
        Distance::Unreachable => usize::MAX,
    };
    let label = u8::from(distance >= params.distance_threshold);
    let connected = graph.is_connected();

    Ok(DatasetItem {
        id,
        graph,
        label,
        provenance: Provenance::BaCliques {
            seed,
            base_n: n,
            ba_m: params.ba_m,
            clique_size: k,
            attachment: params.attachment,
            attach_nodes: (a1, a2),
            threshold: params.distance_threshold,
            distance,
            connected,
        },
    })
}

/// Balanced Triangles pool: `count` items, alternating labels, one derived
/// seed per item index.
pub fn gen_triangle_pool(
    master_seed: u64,
    count: usize,
    params: &TriangleGenParams,
) -> Result<Vec<DatasetItem>, GenError> {
    if count % 2 != 0 {
        return Err(GenError::InvalidParams(
            "candidate count must be even for a balanced pool".into(),
        ));
    }
    let mut items = Vec::with_capacity(count);
    for i in 0..count {
        let label = (i % 2) as u8;
        items.push(gen_triangle_item(
            i as u64,
            item_seed(master_seed, i as u64),
            params,
            label,
        )?);
    }
    Ok(items)
}

/// Balanced Clique Distance pool via rejection sampling: draws are made with
/// consecutive derived seeds and kept only while their class quota is open.
/// Returns the items plus the number of draws consumed.
pub fn gen_clique_pool(
    master_seed: u64,
    count: usize,
    params: &CliqueGenParams,
    max_draws: usize,
) -> Result<(Vec<DatasetItem>, usize), GenError> {
    if count % 2 != 0 {
        return Err(GenError::InvalidParams(
            "candidate count must be even for a balanced pool".into(),
        ));
    }
    let per_class = count / 2;
    let mut counts = [0usize; 2];
    let mut items = Vec::with_capacity(count);
    let mut draws = 0usize;
    while items.len() < count {
        if draws >= max_draws {
            return Err(GenError::RetriesExhausted {
                retries: max_draws,
                reason: format!(
                    "class balance not reached: {} of {per_class} label-0, {} of {per_class} label-1",
                    counts[0], counts[1]
                ),
            });
        }
        let item = gen_clique_item(
            items.len() as u64,
            item_seed(master_seed, draws as u64),
            params,
        )?;
        draws += 1;
        let class = item.label as usize;
        if counts[class] < per_class {
            counts[class] += 1;
            items.push(item);
        }
    }
    Ok((items, draws))
}
