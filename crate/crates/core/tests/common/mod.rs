//! Brute-force oracles shared by the property and acceptance suites.
//!
//! Every oracle here is an independent, direct translation of the measure's
//! definition (double loops, per-pair path counting), deliberately avoiding
//! the algorithmic shortcuts the library uses.

#![allow(dead_code)]

use std::collections::VecDeque;

use hyperrole::centrality::LineGraph;
use hyperrole::hypergraph::{EdgeId, EdgeMeta, Hyperedge, Hypergraph, NodeId};

pub fn build_hypergraph(edges: &[Vec<u32>]) -> Hypergraph {
    let hyperedges = edges
        .iter()
        .enumerate()
        .map(|(i, members)| {
            Hyperedge::new(
                EdgeId(i as u32),
                members.iter().map(|&m| NodeId(m)).collect(),
                EdgeMeta::default(),
            )
            .expect("non-empty members")
        })
        .collect();
    Hypergraph::from_hyperedges(hyperedges)
}

pub fn oracle_degree(edges: &[Vec<u32>], v: u32) -> usize {
    let mut neighbors = Vec::new();
    for e in edges {
        if e.contains(&v) {
            for &u in e {
                if u != v && !neighbors.contains(&u) {
                    neighbors.push(u);
                }
            }
        }
    }
    neighbors.len()
}

pub fn oracle_hyperdegree(edges: &[Vec<u32>], v: u32) -> usize {
    edges.iter().filter(|e| e.contains(&v)).count()
}

pub fn oracle_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn oracle_median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn oracle_mode(values: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    let mut best_count = 0usize;
    for &candidate in values {
        let count = values.iter().filter(|&&v| v == candidate).count();
        if count > best_count || (count == best_count && candidate < best) {
            best = candidate;
            best_count = count;
        }
    }
    best
}

pub fn oracle_variance(values: &[f64]) -> f64 {
    let m = oracle_mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

pub fn oracle_std(values: &[f64]) -> f64 {
    oracle_variance(values).sqrt()
}

pub fn oracle_mad(values: &[f64]) -> f64 {
    let m = oracle_mean(values);
    values.iter().map(|v| (v - m).abs()).sum::<f64>() / values.len() as f64
}

/// Ordered-pair double sum, straight from the definition.
pub fn oracle_gini(values: &[f64]) -> f64 {
    let n = values.len();
    let mean = oracle_mean(values);
    if mean == 0.0 {
        return 0.0;
    }
    let mut numerator = 0.0;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                numerator += (values[u] - values[v]).abs();
            }
        }
    }
    numerator / (2.0 * mean * (n * n) as f64)
}

fn distinct(codes: &[u32]) -> Vec<u32> {
    let mut seen = Vec::new();
    for &c in codes {
        if !seen.contains(&c) {
            seen.push(c);
        }
    }
    seen
}

pub fn oracle_entropy(codes: &[u32]) -> f64 {
    let n = codes.len() as f64;
    distinct(codes)
        .into_iter()
        .map(|c| {
            let r = codes.iter().filter(|&&x| x == c).count() as f64 / n;
            -r * r.ln()
        })
        .sum()
}

pub fn oracle_gini_impurity(codes: &[u32]) -> f64 {
    let n = codes.len() as f64;
    1.0 - distinct(codes)
        .into_iter()
        .map(|c| {
            let r = codes.iter().filter(|&&x| x == c).count() as f64 / n;
            r * r
        })
        .sum::<f64>()
}

pub fn oracle_purity(codes: &[u32]) -> f64 {
    let best = distinct(codes)
        .into_iter()
        .map(|c| codes.iter().filter(|&&x| x == c).count())
        .max()
        .unwrap_or(0);
    best as f64 / codes.len() as f64
}

/// Mean over ordered pairs, which equals the unordered-pair mean for a
/// symmetric similarity.
pub fn oracle_cohesion(values: &[f64], sim: impl Fn(f64, f64) -> f64) -> f64 {
    let n = values.len();
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                total += sim(values[u], values[v]);
            }
        }
    }
    total / (n * (n - 1)) as f64
}

/// Triple loop over external nodes, members, and other hyperedges.
pub fn oracle_interaction_potential_count(edges: &[Vec<u32>], target: usize) -> usize {
    let mut all_nodes = Vec::new();
    for e in edges {
        for &v in e {
            if !all_nodes.contains(&v) {
                all_nodes.push(v);
            }
        }
    }
    let e = &edges[target];
    let mut external = Vec::new();
    for &v in &all_nodes {
        if e.contains(&v) {
            continue;
        }
        'found: for &u in e {
            for (j, other) in edges.iter().enumerate() {
                if j != target && other.contains(&v) && other.contains(&u) {
                    external.push(v);
                    break 'found;
                }
            }
        }
    }
    external.len()
}

struct Bfs {
    dist: Vec<usize>,
    sigma: Vec<f64>,
}

fn bfs(lg: &LineGraph, source: usize) -> Bfs {
    let n = lg.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0; n];
    dist[source] = 0;
    sigma[source] = 1.0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in lg.neighbors(v) {
            let w = w as usize;
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    Bfs { dist, sigma }
}

/// All-pairs shortest-path-counting betweenness: for every unordered pair
/// (s, t) and interior vertex v with d(s,v) + d(v,t) = d(s,t), add
/// sigma_sv * sigma_vt / sigma_st.
pub fn oracle_betweenness(lg: &LineGraph) -> Vec<f64> {
    let n = lg.vertex_count();
    let per_source: Vec<Bfs> = (0..n).map(|s| bfs(lg, s)).collect();
    let mut scores = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let d_st = per_source[s].dist[t];
            if d_st == usize::MAX {
                continue;
            }
            let sigma_st = per_source[s].sigma[t];
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                let d_sv = per_source[s].dist[v];
                let d_vt = per_source[t].dist[v];
                if d_sv != usize::MAX && d_vt != usize::MAX && d_sv + d_vt == d_st {
                    scores[v] += per_source[s].sigma[v] * per_source[t].sigma[v] / sigma_st;
                }
            }
        }
    }
    scores
}

/// Simple deterministic xorshift generator for oracle-side randomness that
/// must not depend on the library's RNG choices.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn next_range(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }
}

/// Random hypergraph as plain member lists: up to `max_edges` hyperedges
/// over `max_nodes` nodes, sizes in `2..=max_size`.
pub fn random_edges(
    rng: &mut XorShift,
    max_nodes: u32,
    max_edges: usize,
    max_size: usize,
) -> Vec<Vec<u32>> {
    let n_edges = 1 + rng.next_range(max_edges);
    (0..n_edges)
        .map(|_| {
            let size = 2 + rng.next_range(max_size.saturating_sub(1));
            let mut members: Vec<u32> = (0..size).map(|_| rng.next_range(max_nodes as usize) as u32).collect();
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                members.push(0);
            }
            members
        })
        .collect()
}
