//! Line-graph projection and hyperedge betweenness.
//!
//! The line graph has one vertex per hyperedge and an undirected edge
//! between two vertices when the hyperedges share at least `s` nodes.
//! Shortest-path betweenness over it ranks discussions by brokerage
//! position; only rankings feed downstream, so scores are left
//! unnormalized.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Hypergraph, MonthKey, NodeId};
use crate::lexicon::tokenize;
use crate::omega;

/// Options for the projection.
#[derive(Clone, Copy, Debug)]
pub struct LineGraphOptions {
    /// Minimum number of shared nodes for adjacency.
    pub min_shared: usize,
    /// Guard against quadratic pair blowups from hub nodes: a node whose
    /// incidence list exceeds the cap aborts construction with an explicit
    /// error instead of silently truncating.
    pub max_incidence: Option<usize>,
}

impl Default for LineGraphOptions {
    fn default() -> Self {
        Self {
            min_shared: 1,
            max_incidence: None,
        }
    }
}

/// Simple undirected graph over hyperedge ids.
#[derive(Clone, Debug)]
pub struct LineGraph {
    vertices: Vec<EdgeId>,
    adjacency: Vec<Vec<u32>>,
    pub min_shared: usize,
}

impl LineGraph {
    /// Rebuild from a vertex list and undirected edge pairs (dense
    /// indices), as stored in the binary cache.
    pub fn from_parts(vertices: Vec<EdgeId>, edges: Vec<(u32, u32)>, min_shared: usize) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (a, b) in edges {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            vertices,
            adjacency,
            min_shared,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[EdgeId] {
        &self.vertices
    }

    pub fn neighbors(&self, vertex: usize) -> &[u32] {
        &self.adjacency[vertex]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&(b as u32)).is_ok()
    }
}

/// Project a hypergraph onto its line graph via per-node incidence joins
/// (never all-pairs member comparison over the full edge set).
pub fn build_line_graph(h: &Hypergraph, opts: LineGraphOptions) -> Result<LineGraph> {
    let vertices: Vec<EdgeId> = h.hyperedges().iter().map(|e| e.id).collect();
    let dense: HashMap<EdgeId, u32> = vertices
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as u32))
        .collect();
    let mut shared: HashMap<(u32, u32), usize> = HashMap::new();
    for &v in h.nodes() {
        let incident = h.incidence(v)?;
        if let Some(cap) = opts.max_incidence {
            if incident.len() > cap {
                return Err(Error::IncidenceCapExceeded {
                    node: v.to_string(),
                    len: incident.len(),
                    cap,
                });
            }
        }
        for (i, &a) in incident.iter().enumerate() {
            for &b in &incident[i + 1..] {
                let (x, y) = (dense[&a], dense[&b]);
                let key = if x < y { (x, y) } else { (y, x) };
                *shared.entry(key).or_insert(0) += 1;
            }
        }
    }
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (&(a, b), &count) in &shared {
        if count >= opts.min_shared {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(LineGraph {
        vertices,
        adjacency,
        min_shared: opts.min_shared,
    })
}

/// Brandes accumulation from one source; adds this source's dependency
/// contribution into `scores`.
fn accumulate_from_source(lg: &LineGraph, source: usize, scores: &mut [f64]) {
    let n = lg.vertex_count();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    sigma[source] = 1.0;
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in lg.neighbors(v) {
            let w = w as usize;
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v as u32);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            let v = v as usize;
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != source {
            scores[w] += delta[w];
        }
    }
}

// Fixed chunk width keeps the reduction order independent of the thread
// count, so scores are bit-reproducible run to run.
const SOURCE_CHUNK: usize = 256;

fn betweenness_from_sources(lg: &LineGraph, sources: &[usize]) -> Vec<f64> {
    let n = lg.vertex_count();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut scores = vec![0.0f64; n];
            for &s in chunk {
                accumulate_from_source(lg, s, &mut scores);
            }
            scores
        })
        .collect();
    let mut scores = vec![0.0f64; n];
    for partial in partials {
        for (acc, p) in scores.iter_mut().zip(partial) {
            *acc += p;
        }
    }
    // undirected: each unordered pair was counted from both endpoints
    for s in &mut scores {
        *s /= 2.0;
    }
    scores
}

/// Exact unnormalized shortest-path betweenness of every line-graph vertex.
/// Disconnected components are handled natively.
pub fn hyperedge_betweenness(lg: &LineGraph) -> Vec<f64> {
    let sources: Vec<usize> = (0..lg.vertex_count()).collect();
    betweenness_from_sources(lg, &sources)
}

/// Pivot-sampling estimate: accumulate from `n_pivots` sources drawn
/// without replacement and scale by `n / n_pivots`. Unbiased for the
/// per-vertex expectation, cheaper than the exact pass on large graphs;
/// rankings of high-betweenness vertices stabilize quickly.
pub fn hyperedge_betweenness_sampled(lg: &LineGraph, n_pivots: usize, seed: u64) -> Vec<f64> {
    let n = lg.vertex_count();
    if n_pivots >= n {
        return hyperedge_betweenness(lg);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    all.truncate(n_pivots);
    all.sort_unstable();
    let mut scores = betweenness_from_sources(lg, &all);
    let scale = n as f64 / n_pivots as f64;
    for s in &mut scores {
        *s *= scale;
    }
    scores
}

/// Betweenness scores keyed by hyperedge id.
pub fn scores_by_edge(lg: &LineGraph, scores: &[f64]) -> Vec<(EdgeId, f64)> {
    lg.vertices
        .iter()
        .copied()
        .zip(scores.iter().copied())
        .collect()
}

/// The `k` highest-betweenness hyperedges, ties broken by hyperedge id.
pub fn top_k_central(h: &Hypergraph, s: usize, k: usize) -> Result<Vec<(EdgeId, f64)>> {
    let lg = build_line_graph(
        h,
        LineGraphOptions {
            min_shared: s,
            ..Default::default()
        },
    )?;
    let scores = hyperedge_betweenness(&lg);
    let mut ranked = scores_by_edge(&lg, &scores);
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("betweenness is finite")
            .then(a.0.cmp(&b.0))
    });
    ranked.truncate(k);
    Ok(ranked)
}

/// Whether word counts average over texts or over users.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordCountScope {
    #[default]
    PerText,
    PerUser,
}

/// Member-level inputs for discussion characterization, all keyed by node
/// within the snapshot month under analysis.
#[derive(Clone, Copy, Debug)]
pub struct DiscussionInputs<'a> {
    pub texts: &'a HashMap<NodeId, Vec<String>>,
    pub subjectivity: Option<&'a HashMap<NodeId, f64>>,
    pub archetypes: &'a HashMap<NodeId, String>,
}

/// Linguistic and purity features of one ranked discussion.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscussionRecord {
    pub hyperedge: EdgeId,
    pub rank: usize,
    pub betweenness: f64,
    pub month: Option<MonthKey>,
    pub avg_word_count: Option<f64>,
    pub avg_unique_word_count: Option<f64>,
    pub avg_subjectivity: Option<f64>,
    pub archetype_purity: Option<f64>,
    /// True when no member text was available.
    pub empty: bool,
}

fn word_counts(text: &str) -> (usize, usize) {
    let tokens = tokenize(text);
    let mut unique = tokens.clone();
    unique.sort();
    unique.dedup();
    (tokens.len(), unique.len())
}

/// Compute word-count, subjectivity, and archetype-purity features for the
/// ranked discussions.
pub fn characterize_discussions(
    h: &Hypergraph,
    ranked: &[(EdgeId, f64)],
    inputs: DiscussionInputs<'_>,
    scope: WordCountScope,
) -> Vec<DiscussionRecord> {
    ranked
        .iter()
        .enumerate()
        .map(|(i, &(edge_id, betweenness))| {
            let e = h.edge(edge_id).expect("ranked ids come from this graph");
            let mut per_user: Vec<(f64, f64)> = Vec::new();
            let mut all_counts: Vec<(usize, usize)> = Vec::new();
            for u in e.members() {
                if let Some(texts) = inputs.texts.get(u) {
                    if texts.is_empty() {
                        continue;
                    }
                    let counts: Vec<(usize, usize)> =
                        texts.iter().map(|t| word_counts(t)).collect();
                    let mean_w =
                        counts.iter().map(|c| c.0 as f64).sum::<f64>() / counts.len() as f64;
                    let mean_u =
                        counts.iter().map(|c| c.1 as f64).sum::<f64>() / counts.len() as f64;
                    per_user.push((mean_w, mean_u));
                    all_counts.extend(counts);
                }
            }
            let empty = all_counts.is_empty();
            let (avg_word_count, avg_unique_word_count) = if empty {
                (None, None)
            } else {
                match scope {
                    WordCountScope::PerText => {
                        let n = all_counts.len() as f64;
                        (
                            Some(all_counts.iter().map(|c| c.0 as f64).sum::<f64>() / n),
                            Some(all_counts.iter().map(|c| c.1 as f64).sum::<f64>() / n),
                        )
                    }
                    WordCountScope::PerUser => {
                        let n = per_user.len() as f64;
                        (
                            Some(per_user.iter().map(|c| c.0).sum::<f64>() / n),
                            Some(per_user.iter().map(|c| c.1).sum::<f64>() / n),
                        )
                    }
                }
            };
            let avg_subjectivity = inputs.subjectivity.and_then(|subj| {
                let values: Vec<f64> = e
                    .members()
                    .iter()
                    .filter_map(|u| subj.get(u).copied())
                    .collect();
                if values.is_empty() {
                    None
                } else {
                    Some(values.iter().sum::<f64>() / values.len() as f64)
                }
            });
            let labels: Vec<(NodeId, String)> = e
                .members()
                .iter()
                .filter_map(|u| inputs.archetypes.get(u).map(|a| (*u, a.clone())))
                .collect();
            let archetype_purity = if labels.is_empty() {
                None
            } else {
                let column = omega::CategoricalColumn::from_values(labels.clone());
                let codes: Vec<u32> = labels.iter().map(|(u, _)| column.code(*u).unwrap()).collect();
                Some(omega::purity(&codes))
            };
            DiscussionRecord {
                hyperedge: edge_id,
                rank: i + 1,
                betweenness,
                month: e.meta.month,
                avg_word_count,
                avg_unique_word_count,
                avg_subjectivity,
                archetype_purity,
                empty,
            }
        })
        .collect()
}
