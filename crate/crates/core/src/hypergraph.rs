//! Hypergraph data structure, basic metrics, and temporal snapshot series.
//!
//! A hypergraph couples a node set with a list of hyperedges (node sets of
//! arbitrary size) plus an incidence index mapping each node to the
//! hyperedges containing it. On a threaded platform one discussion thread
//! maps to one hyperedge.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

/// Dense node identifier produced by a [`NodeInterner`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense hyperedge identifier, stable within a dataset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeId(pub u32);

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Interns raw user identifiers into dense [`NodeId`]s.
///
/// The mapping is a bijection: `name -> id -> name` round-trips, and the
/// original identifier is kept only in this sidecar map.
#[derive(Debug, Default, Clone)]
pub struct NodeInterner {
    ids: HashMap<String, NodeId>,
    names: Vec<String>,
}

impl NodeInterner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = NodeId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> Option<&str> {
        self.names.get(id.0 as usize).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Calendar month key used for snapshot bookkeeping.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, serde::Serialize, serde::Deserialize,
)]
pub struct MonthKey {
    pub year: i32,
    pub month: u8,
}

impl std::fmt::Display for MonthKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{:02}", self.year, self.month)
    }
}

/// Optional provenance attached to a hyperedge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeMeta {
    pub community: Option<String>,
    pub month: Option<MonthKey>,
}

/// A set of nodes interacting in one discussion thread.
///
/// Members are stored sorted and deduplicated: a user commenting twice in
/// the same thread counts once.
#[derive(Clone, Debug)]
pub struct Hyperedge {
    pub id: EdgeId,
    members: Vec<NodeId>,
    pub meta: EdgeMeta,
}

impl Hyperedge {
    pub fn new(id: EdgeId, mut members: Vec<NodeId>, meta: EdgeMeta) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyInput("hyperedge members"));
        }
        Ok(Self { id, members, meta })
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Immutable hypergraph with an incidence index.
///
/// All read operations are safe to call concurrently; construction is
/// single-writer.
#[derive(Clone, Debug, Default)]
pub struct Hypergraph {
    nodes: Vec<NodeId>,
    hyperedges: Vec<Hyperedge>,
    incidence: HashMap<NodeId, Vec<EdgeId>>,
    edge_index: HashMap<EdgeId, usize>,
}

/// Row of summary statistics over one hypergraph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub m: usize,
    pub max_edge_size: usize,
    pub mean_hyperdegree: f64,
    pub mean_degree: f64,
}

/// Integer histograms of hyperdegrees and hyperedge sizes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Distributions {
    pub hyperdegree: BTreeMap<usize, usize>,
    pub edge_size: BTreeMap<usize, usize>,
}

impl Hypergraph {
    /// Build from hyperedges; the node set is the union of all members.
    pub fn from_hyperedges(hyperedges: Vec<Hyperedge>) -> Self {
        Self::new(Vec::new(), hyperedges)
    }

    /// Build from hyperedges plus explicit nodes (allows isolated nodes).
    pub fn new(extra_nodes: Vec<NodeId>, hyperedges: Vec<Hyperedge>) -> Self {
        let mut incidence: HashMap<NodeId, Vec<EdgeId>> = HashMap::new();
        for v in &extra_nodes {
            incidence.entry(*v).or_default();
        }
        let mut edge_index = HashMap::with_capacity(hyperedges.len());
        for (idx, e) in hyperedges.iter().enumerate() {
            edge_index.insert(e.id, idx);
            for &v in e.members() {
                incidence.entry(v).or_default().push(e.id);
            }
        }
        let mut nodes: Vec<NodeId> = incidence.keys().copied().collect();
        nodes.sort_unstable();
        Self {
            nodes,
            hyperedges,
            incidence,
            edge_index,
        }
    }

    /// Number of nodes (the order of the hypergraph).
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Number of hyperedges (the size of the hypergraph).
    pub fn size(&self) -> usize {
        self.hyperedges.len()
    }

    /// Sorted node ids.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Hyperedge> {
        self.edge_index.get(&id).map(|&i| &self.hyperedges[i])
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.incidence.contains_key(&v)
    }

    /// Hyperedge ids containing `v`, in construction order.
    pub fn incidence(&self, v: NodeId) -> Result<&[EdgeId]> {
        self.incidence
            .get(&v)
            .map(|e| e.as_slice())
            .ok_or_else(|| Error::NodeNotFound(v.to_string()))
    }

    /// Number of hyperedges containing `v`.
    pub fn hyperdegree(&self, v: NodeId) -> Result<usize> {
        Ok(self.incidence(v)?.len())
    }

    /// Number of distinct co-members of `v` across all its hyperedges.
    pub fn degree(&self, v: NodeId) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }

    /// Sorted distinct co-members of `v`.
    pub fn neighbors(&self, v: NodeId) -> Result<Vec<NodeId>> {
        let incident = self.incidence(v)?;
        let mut seen: HashSet<NodeId> = HashSet::new();
        for &eid in incident {
            let e = &self.hyperedges[self.edge_index[&eid]];
            for &u in e.members() {
                if u != v {
                    seen.insert(u);
                }
            }
        }
        let mut out: Vec<NodeId> = seen.into_iter().collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Node count, edge count, largest edge size, and the two means.
    pub fn summary_stats(&self) -> Result<SummaryStats> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyInput("hypergraph"));
        }
        let n = self.order();
        let m = self.size();
        let max_edge_size = self.hyperedges.iter().map(Hyperedge::size).max().unwrap_or(0);
        let total_incidence: usize = self.hyperedges.iter().map(Hyperedge::size).sum();
        let mean_hyperdegree = total_incidence as f64 / n as f64;
        let total_degree: usize = self
            .nodes
            .iter()
            .map(|&v| self.degree(v).expect("node set is consistent"))
            .sum();
        let mean_degree = total_degree as f64 / n as f64;
        Ok(SummaryStats {
            n,
            m,
            max_edge_size,
            mean_hyperdegree,
            mean_degree,
        })
    }

    /// Exact hyperdegree and hyperedge-size histograms.
    pub fn distributions(&self) -> Result<Distributions> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyInput("hypergraph"));
        }
        let mut dist = Distributions::default();
        for &v in &self.nodes {
            let hd = self.incidence[&v].len();
            *dist.hyperdegree.entry(hd).or_insert(0) += 1;
        }
        for e in &self.hyperedges {
            *dist.edge_size.entry(e.size()).or_insert(0) += 1;
        }
        Ok(dist)
    }

    /// Keep hyperedges of size at least `k`; nodes left without any
    /// incidence are dropped.
    pub fn filter_min_size(&self, k: usize) -> Hypergraph {
        let edges: Vec<Hyperedge> = self
            .hyperedges
            .iter()
            .filter(|e| e.size() >= k)
            .cloned()
            .collect();
        Hypergraph::from_hyperedges(edges)
    }
}

/// Jaccard similarity of two sorted, deduplicated node slices.
///
/// Defined as 1 when both sets are empty so degenerate snapshots compare
/// as identical.
pub fn jaccard_overlap(a: &[NodeId], b: &[NodeId]) -> f64 {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(b.windows(2).all(|w| w[0] < w[1]));
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut inter = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Ordered monthly snapshots plus an optional aggregate hypergraph.
#[derive(Debug, Default)]
pub struct SnapshotSeries {
    snapshots: Vec<(MonthKey, Hypergraph)>,
    pub aggregate: Option<Hypergraph>,
}

impl SnapshotSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a snapshot; months must be strictly increasing.
    pub fn push(&mut self, month: MonthKey, h: Hypergraph) -> Result<()> {
        if let Some((last, _)) = self.snapshots.last() {
            if *last >= month {
                return Err(Error::InvalidValue(format!(
                    "snapshot months must be strictly increasing: {last} then {month}"
                )));
            }
        }
        self.snapshots.push((month, h));
        Ok(())
    }

    pub fn snapshots(&self) -> &[(MonthKey, Hypergraph)] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn months(&self) -> impl Iterator<Item = MonthKey> + '_ {
        self.snapshots.iter().map(|(m, _)| *m)
    }
}

/// Six-node toy hypergraph used throughout the tests and the guide:
/// one size-4 hyperedge {A,B,C,D} plus the pairs {C,E}, {D,E}, {D,F}, {E,F}.
pub fn toy_hypergraph() -> (Hypergraph, NodeInterner) {
    let mut interner = NodeInterner::new();
    let ids: Vec<NodeId> = ["A", "B", "C", "D", "E", "F"]
        .iter()
        .map(|s| interner.intern(s))
        .collect();
    let groups: [&[usize]; 5] = [&[0, 1, 2, 3], &[2, 4], &[3, 4], &[3, 5], &[4, 5]];
    let edges = groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let members = g.iter().map(|&k| ids[k]).collect();
            Hyperedge::new(EdgeId(i as u32), members, EdgeMeta::default())
                .expect("toy members are non-empty")
        })
        .collect();
    (Hypergraph::from_hyperedges(edges), interner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(interner: &NodeInterner, name: &str) -> NodeId {
        interner.get(name).unwrap()
    }

    #[test]
    fn interner_round_trips() {
        let mut it = NodeInterner::new();
        let a = it.intern("user_a");
        let b = it.intern("user_b");
        assert_ne!(a, b);
        assert_eq!(it.intern("user_a"), a);
        assert_eq!(it.name(a), Some("user_a"));
        assert_eq!(it.get("user_b"), Some(b));
        assert_eq!(it.len(), 2);
    }

    #[test]
    fn toy_degrees() {
        let (h, it) = toy_hypergraph();
        assert_eq!(h.degree(id(&it, "D")).unwrap(), 5);
        assert_eq!(h.degree(id(&it, "A")).unwrap(), 3);
        let mut expected = vec![id(&it, "B"), id(&it, "C"), id(&it, "D")];
        expected.sort_unstable();
        assert_eq!(h.neighbors(id(&it, "A")).unwrap(), expected);
    }

    #[test]
    fn toy_hyperdegrees() {
        let (h, it) = toy_hypergraph();
        assert_eq!(h.hyperdegree(id(&it, "D")).unwrap(), 3);
        assert_eq!(h.hyperdegree(id(&it, "E")).unwrap(), 3);
        assert_eq!(h.hyperdegree(id(&it, "A")).unwrap(), 1);
    }

    #[test]
    fn unknown_node_errors() {
        let (h, _) = toy_hypergraph();
        let missing = NodeId(99);
        assert!(matches!(h.degree(missing), Err(Error::NodeNotFound(_))));
        assert!(matches!(
            h.hyperdegree(missing),
            Err(Error::NodeNotFound(_))
        ));
    }

    #[test]
    fn isolated_node_has_degree_zero() {
        let h = Hypergraph::new(vec![NodeId(7)], Vec::new());
        assert_eq!(h.order(), 1);
        assert_eq!(h.size(), 0);
        assert_eq!(h.degree(NodeId(7)).unwrap(), 0);
        assert_eq!(h.hyperdegree(NodeId(7)).unwrap(), 0);
    }

    #[test]
    fn single_edge_stats() {
        let e = Hyperedge::new(
            EdgeId(0),
            vec![NodeId(0), NodeId(1), NodeId(2)],
            EdgeMeta::default(),
        )
        .unwrap();
        let h = Hypergraph::from_hyperedges(vec![e]);
        let s = h.summary_stats().unwrap();
        assert_eq!(s.n, 3);
        assert_eq!(s.m, 1);
        assert_eq!(s.max_edge_size, 3);
        assert_eq!(s.mean_hyperdegree, 1.0);
        assert_eq!(s.mean_degree, 2.0);
    }

    #[test]
    fn empty_hypergraph_errors() {
        let h = Hypergraph::from_hyperedges(Vec::new());
        assert!(matches!(h.summary_stats(), Err(Error::EmptyInput(_))));
        assert!(matches!(h.distributions(), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn toy_distributions() {
        let (h, _) = toy_hypergraph();
        let d = h.distributions().unwrap();
        assert_eq!(d.edge_size, BTreeMap::from([(4, 1), (2, 4)]));
        let node_total: usize = d.hyperdegree.values().sum();
        assert_eq!(node_total, h.order());
        let edge_total: usize = d.edge_size.values().sum();
        assert_eq!(edge_total, h.size());
    }

    #[test]
    fn single_size_three_edge_distribution() {
        let e = Hyperedge::new(
            EdgeId(0),
            vec![NodeId(0), NodeId(1), NodeId(2)],
            EdgeMeta::default(),
        )
        .unwrap();
        let h = Hypergraph::from_hyperedges(vec![e]);
        let d = h.distributions().unwrap();
        assert_eq!(d.edge_size, BTreeMap::from([(3, 1)]));
    }

    #[test]
    fn filter_keeps_large_edges_and_drops_nodes() {
        let (h, it) = toy_hypergraph();
        let filtered = h.filter_min_size(3);
        assert_eq!(filtered.size(), 1);
        assert_eq!(filtered.hyperedges()[0].size(), 4);
        assert!(!filtered.contains_node(id(&it, "E")));
        assert!(!filtered.contains_node(id(&it, "F")));
        assert!(filtered.contains_node(id(&it, "A")));
    }

    #[test]
    fn filter_identity_and_empty() {
        let (h, _) = toy_hypergraph();
        let same = h.filter_min_size(1);
        assert_eq!(same.size(), h.size());
        assert_eq!(same.order(), h.order());
        let none = h.filter_min_size(5);
        assert_eq!(none.size(), 0);
        assert_eq!(none.order(), 0);
    }

    #[test]
    fn duplicate_members_are_deduplicated() {
        let e = Hyperedge::new(
            EdgeId(0),
            vec![NodeId(1), NodeId(1), NodeId(2)],
            EdgeMeta::default(),
        )
        .unwrap();
        assert_eq!(e.size(), 2);
        assert_eq!(e.members(), &[NodeId(1), NodeId(2)]);
    }

    #[test]
    fn empty_members_rejected() {
        assert!(Hyperedge::new(EdgeId(0), Vec::new(), EdgeMeta::default()).is_err());
    }

    #[test]
    fn jaccard_cases() {
        let a = vec![NodeId(0), NodeId(1), NodeId(2)];
        let b = vec![NodeId(1), NodeId(2), NodeId(3)];
        assert_eq!(jaccard_overlap(&a, &a), 1.0);
        assert_eq!(jaccard_overlap(&a, &b), 0.5);
        assert_eq!(jaccard_overlap(&a, &[NodeId(9)]), 0.0);
        assert_eq!(jaccard_overlap(&[], &[]), 1.0);
    }

    #[test]
    fn snapshot_months_strictly_increase() {
        let mut series = SnapshotSeries::new();
        let m1 = MonthKey { year: 2023, month: 1 };
        let m2 = MonthKey { year: 2023, month: 2 };
        series.push(m1, Hypergraph::default()).unwrap();
        series.push(m2, Hypergraph::default()).unwrap();
        assert!(series.push(m2, Hypergraph::default()).is_err());
        assert_eq!(series.len(), 2);
    }
}
