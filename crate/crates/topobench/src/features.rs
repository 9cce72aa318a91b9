//! Named sparse features, the frozen vocabulary that maps names to dense ids,
//! and the deliberately feature-starved ("undermanned") template set used by
//! the dataset filter.

use std::collections::BTreeMap;

use crate::graph::Graph;

/// Sparse named feature map. Zero-valued entries are never stored; absent
/// means zero everywhere downstream.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawFeatures(pub BTreeMap<String, f64>);

impl RawFeatures {
    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        if value != 0.0 {
            self.0.insert(name.into(), value);
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(0.0)
    }
}

/// Sparse feature vector over a frozen vocabulary. No zero entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector(pub BTreeMap<u32, f64>);

impl FeatureVector {
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }
}

/// Bijective name <-> id table, built once from a candidate pool and then
/// frozen. Ids are assigned in sorted-name order so they do not depend on
/// pool ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVocabulary {
    name_to_id: BTreeMap<String, u32>,
    names: Vec<String>,
}

impl FeatureVocabulary {
    pub fn build<'a>(pool: impl IntoIterator<Item = &'a RawFeatures>) -> Self {
        let mut names: Vec<String> = pool
            .into_iter()
            .flat_map(|f| f.0.keys().cloned())
            .collect();
        names.sort_unstable();
        names.dedup();
        let name_to_id = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        FeatureVocabulary { name_to_id, names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.name_to_id.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    /// Maps named features through the frozen table; names outside the
    /// vocabulary are dropped.
    pub fn vectorize(&self, raw: &RawFeatures) -> FeatureVector {
        FeatureVector(
            raw.0
                .iter()
                .filter_map(|(name, &v)| self.name_to_id.get(name).map(|&id| (id, v)))
                .collect(),
        )
    }
}

/// Degree rendered for feature names, with everything above the cap collapsed
/// into one overflow bucket.
fn degree_bucket(d: usize, cap: usize) -> String {
    if d <= cap {
        d.to_string()
    } else {
        format!(">{cap}")
    }
}

/// The filter's four feature templates: per-degree presence and count,
/// per-edge endpoint-degree-pair presence and count (unordered), node count,
/// and edge count. Deliberately too weak to express triangle membership or
/// long-range distance.
pub fn undermanned_features(g: &Graph, degree_cap: usize) -> RawFeatures {
    let mut out = RawFeatures::default();
    let degrees = g.degrees();

    let mut degree_counts: BTreeMap<String, f64> = BTreeMap::new();
    for &d in &degrees {
        *degree_counts.entry(degree_bucket(d, degree_cap)).or_insert(0.0) += 1.0;
    }
    for (bucket, count) in degree_counts {
        out.insert(format!("deg_present:{bucket}"), 1.0);
        out.insert(format!("deg_count:{bucket}"), count);
    }

    let mut pair_counts: BTreeMap<(String, String), f64> = BTreeMap::new();
    for &(u, v) in g.edges() {
        let (a, b) = (degrees[u].min(degrees[v]), degrees[u].max(degrees[v]));
        let key = (degree_bucket(a, degree_cap), degree_bucket(b, degree_cap));
        *pair_counts.entry(key).or_insert(0.0) += 1.0;
    }
    for ((a, b), count) in pair_counts {
        out.insert(format!("pair_present:{a},{b}"), 1.0);
        out.insert(format!("pair_count:{a},{b}"), count);
    }

    out.insert("nodes", g.num_nodes() as f64);
    out.insert("edges", g.num_edges() as f64);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k3_features_by_hand() {
        let g = Graph::complete(3);
        let f = undermanned_features(&g, 32);
        assert_eq!(f.get("deg_present:3"), 0.0);
        assert_eq!(f.get("deg_present:2"), 1.0);
        assert_eq!(f.get("deg_count:2"), 3.0);
        assert_eq!(f.get("nodes"), 3.0);
        assert_eq!(f.get("edges"), 3.0);
        assert_eq!(f.get("pair_count:2,2"), 3.0);
        assert_eq!(f.get("pair_present:2,2"), 1.0);
    }

    #[test]
    fn empty_graph_features() {
        let g = Graph::from_edges(4, []).unwrap();
        let f = undermanned_features(&g, 32);
        assert_eq!(f.get("deg_present:0"), 1.0);
        assert_eq!(f.get("deg_count:0"), 4.0);
        assert_eq!(f.get("nodes"), 4.0);
        // zero-valued entries are omitted: absent means zero
        assert_eq!(f.get("edges"), 0.0);
        assert!(!f.0.contains_key("edges"));
    }

    #[test]
    fn features_are_isomorphism_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(4..12);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let h = g.permute(&perm).unwrap();
            assert_eq!(undermanned_features(&g, 32), undermanned_features(&h, 32));
        }
    }

    #[test]
    fn degree_cap_collapses_to_overflow_bucket() {
        let g = Graph::complete(6); // degree 5 everywhere
        let f = undermanned_features(&g, 3);
        assert_eq!(f.get("deg_count:>3"), 6.0);
        assert_eq!(f.get("pair_count:>3,>3"), 15.0);
        assert_eq!(f.get("deg_count:5"), 0.0);
    }

    #[test]
    fn c6_and_two_triangles_collide() {
        // C6 and C3 + C3: identical degree/count/size features, but triangle
        // counts 0 vs 2 — the template set cannot encode the label
        let c6 = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let two_c3 = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(
            undermanned_features(&c6, 32),
            undermanned_features(&two_c3, 32)
        );
        assert_eq!(c6.triangles().len(), 0);
        assert_eq!(two_c3.triangles().len(), 2);
    }

    #[test]
    fn vocabulary_is_frozen_and_bijective() {
        let a = undermanned_features(&Graph::complete(3), 32);
        let b = undermanned_features(&Graph::from_edges(4, []).unwrap(), 32);
        let vocab = FeatureVocabulary::build([&a, &b]);
        assert_eq!(vocab.len(), a.0.len() + b.0.len() - 1); // "nodes" shared
        for (name, _) in &a.0 {
            let id = vocab.id(name).unwrap();
            assert_eq!(vocab.name(id), Some(name.as_str()));
        }
        // unknown names are dropped, not invented
        let mut odd = RawFeatures::default();
        odd.insert("unseen", 5.0);
        assert!(vocab.vectorize(&odd).0.is_empty());
    }
}
