//! Hyperedge characterization functions.
//!
//! A characterization function maps a hyperedge (and the features of its
//! members) to a single characteristic value. Three families are provided:
//! numeric descriptors (mean, median, mode, variance, std, MAD, Gini
//! coefficient), categorical diversity (entropy, Gini impurity), and
//! structural measures (size, purity, cohesion, interaction potential).

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Hyperedge, Hypergraph, NodeId};

/// How categorical sums are indexed.
///
/// `Distinct` sums one term per distinct category (standard Shannon/Gini
/// semantics); `PerMember` sums one term per member, which weights each
/// category's term by its count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryScope {
    #[default]
    Distinct,
    PerMember,
}

/// Denominator of the interaction potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialDenominator {
    /// Divide the external-neighbor count by the hyperedge size.
    #[default]
    Members,
    /// Divide by the number of nodes outside the hyperedge.
    Complement,
}

/// Named similarity functions for cohesion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    /// `1 - |a - b|`, natural for features normalized to `[0, 1]`.
    #[default]
    OneMinusAbsDiff,
    /// 1 on exact equality, 0 otherwise.
    Equality,
}

impl Similarity {
    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            Similarity::OneMinusAbsDiff => 1.0 - (a - b).abs(),
            Similarity::Equality => {
                if a == b {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

// ---- numeric descriptors over value slices ----

pub fn mean(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Most frequent value; ties resolve to the smallest such value.
pub fn mode(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = sorted[0];
    let mut best_count = 0usize;
    let mut i = 0usize;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > best_count {
            best_count = j - i;
            best = sorted[i];
        }
        i = j;
    }
    best
}

/// Population variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64]) -> f64 {
    variance(values).sqrt()
}

/// Mean absolute deviation from the mean.
pub fn mad(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).abs()).sum::<f64>() / values.len() as f64
}

/// Gini coefficient: the ordered-pair sum of absolute differences divided
/// by `2 * mean * n^2`, computed via the sorted-rank identity. An all-zero
/// input (mean 0) is treated as perfect equality and returns 0.
pub fn gini(values: &[f64]) -> f64 {
    let n = values.len();
    let m = mean(values);
    if m == 0.0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, &v)| (2.0 * k as f64 - n as f64 + 1.0) * v)
        .sum();
    weighted / (m * (n * n) as f64)
}

// ---- categorical diversity over category codes ----

fn category_counts(codes: &[u32]) -> BTreeMap<u32, usize> {
    let mut counts = BTreeMap::new();
    for &c in codes {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts
}

/// Shannon entropy (natural log) of the category proportions.
pub fn entropy(codes: &[u32], scope: CategoryScope) -> f64 {
    debug_assert!(!codes.is_empty());
    let n = codes.len() as f64;
    category_counts(codes)
        .values()
        .map(|&count| {
            let r = count as f64 / n;
            let term = -r * r.ln();
            match scope {
                CategoryScope::Distinct => term,
                CategoryScope::PerMember => count as f64 * term,
            }
        })
        .sum()
}

/// Gini impurity `1 - Σ r_c^2` of the category proportions.
pub fn gini_impurity(codes: &[u32], scope: CategoryScope) -> f64 {
    debug_assert!(!codes.is_empty());
    let n = codes.len() as f64;
    let sum: f64 = category_counts(codes)
        .values()
        .map(|&count| {
            let r = count as f64 / n;
            match scope {
                CategoryScope::Distinct => r * r,
                CategoryScope::PerMember => count as f64 * r * r,
            }
        })
        .sum();
    1.0 - sum
}

/// Share of the modal category.
pub fn purity(codes: &[u32]) -> f64 {
    debug_assert!(!codes.is_empty());
    let max = category_counts(codes).values().copied().max().unwrap_or(0);
    max as f64 / codes.len() as f64
}

/// Mean similarity over unordered member pairs.
pub fn cohesion(values: &[f64], sim: Similarity) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Undefined("cohesion requires at least two members"));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += sim.eval(values[i], values[j]);
        }
    }
    Ok(total * 2.0 / (n * (n - 1)) as f64)
}

/// Count of nodes outside `e` reachable from a member through some other
/// hyperedge, divided by `|e|` or by `|V \ e|`.
pub fn interaction_potential(
    h: &Hypergraph,
    e: &Hyperedge,
    denom: PotentialDenominator,
) -> Result<f64> {
    let mut external: Vec<NodeId> = Vec::new();
    for &u in e.members() {
        for &eid in h.incidence(u)? {
            if eid == e.id {
                continue;
            }
            let other = h.edge(eid).expect("incidence refers to known edges");
            for &v in other.members() {
                if !e.contains(v) {
                    external.push(v);
                }
            }
        }
    }
    external.sort_unstable();
    external.dedup();
    let numerator = external.len() as f64;
    match denom {
        PotentialDenominator::Members => Ok(numerator / e.size() as f64),
        PotentialDenominator::Complement => {
            let outside = h.order() - e.size();
            if outside == 0 {
                return Err(Error::Undefined(
                    "complement denominator is zero: hyperedge covers every node",
                ));
            }
            Ok(numerator / outside as f64)
        }
    }
}

// ---- feature columns and batch evaluation ----

/// Categorical column with categories interned in sorted order.
#[derive(Clone, Debug, Default)]
pub struct CategoricalColumn {
    pub categories: Vec<String>,
    codes: HashMap<NodeId, u32>,
}

impl CategoricalColumn {
    pub fn from_values(values: impl IntoIterator<Item = (NodeId, String)>) -> Self {
        let pairs: Vec<(NodeId, String)> = values.into_iter().collect();
        let mut categories: Vec<String> = pairs.iter().map(|(_, c)| c.clone()).collect();
        categories.sort();
        categories.dedup();
        let index: HashMap<&str, u32> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i as u32))
            .collect();
        let codes = pairs
            .into_iter()
            .map(|(v, c)| (v, index[c.as_str()]))
            .collect();
        Self { categories, codes }
    }

    pub fn code(&self, v: NodeId) -> Option<u32> {
        self.codes.get(&v).copied()
    }

    pub fn category(&self, v: NodeId) -> Option<&str> {
        self.code(v).map(|c| self.categories[c as usize].as_str())
    }
}

/// Node feature columns keyed by name.
#[derive(Clone, Debug, Default)]
pub struct NodeFeatures {
    numeric: BTreeMap<String, HashMap<NodeId, f64>>,
    categorical: BTreeMap<String, CategoricalColumn>,
}

impl NodeFeatures {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_numeric(&mut self, name: &str, values: HashMap<NodeId, f64>) {
        self.numeric.insert(name.to_string(), values);
    }

    pub fn insert_categorical(&mut self, name: &str, column: CategoricalColumn) {
        self.categorical.insert(name.to_string(), column);
    }

    pub fn numeric(&self, name: &str) -> Option<&HashMap<NodeId, f64>> {
        self.numeric.get(name)
    }

    pub fn categorical(&self, name: &str) -> Option<&CategoricalColumn> {
        self.categorical.get(name)
    }

    /// Numeric values of a feature over a hyperedge's members, in member
    /// order.
    pub fn numeric_over(&self, name: &str, e: &Hyperedge) -> Result<Vec<f64>> {
        let column = self
            .numeric
            .get(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("no numeric feature '{name}'")))?;
        e.members()
            .iter()
            .map(|v| {
                column.get(v).copied().ok_or_else(|| Error::MissingFeature {
                    feature: name.to_string(),
                    node: v.to_string(),
                })
            })
            .collect()
    }

    /// Category codes of a feature over a hyperedge's members.
    pub fn codes_over(&self, name: &str, e: &Hyperedge) -> Result<Vec<u32>> {
        let column = self
            .categorical
            .get(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("no categorical feature '{name}'")))?;
        e.members()
            .iter()
            .map(|v| {
                column.code(*v).ok_or_else(|| Error::MissingFeature {
                    feature: name.to_string(),
                    node: v.to_string(),
                })
            })
            .collect()
    }
}

/// The characterization kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaKind {
    Mean,
    Median,
    Mode,
    Variance,
    Std,
    Mad,
    Gini,
    Entropy,
    GiniImpurity,
    Size,
    Purity,
    Cohesion,
    InteractionPotential,
}

impl OmegaKind {
    pub fn name(self) -> &'static str {
        match self {
            OmegaKind::Mean => "mean",
            OmegaKind::Median => "median",
            OmegaKind::Mode => "mode",
            OmegaKind::Variance => "variance",
            OmegaKind::Std => "std",
            OmegaKind::Mad => "mad",
            OmegaKind::Gini => "gini",
            OmegaKind::Entropy => "entropy",
            OmegaKind::GiniImpurity => "gini_impurity",
            OmegaKind::Size => "size",
            OmegaKind::Purity => "purity",
            OmegaKind::Cohesion => "cohesion",
            OmegaKind::InteractionPotential => "interaction_potential",
        }
    }

    pub fn needs_numeric(self) -> bool {
        matches!(
            self,
            OmegaKind::Mean
                | OmegaKind::Median
                | OmegaKind::Mode
                | OmegaKind::Variance
                | OmegaKind::Std
                | OmegaKind::Mad
                | OmegaKind::Gini
                | OmegaKind::Cohesion
        )
    }

    pub fn needs_categorical(self) -> bool {
        matches!(
            self,
            OmegaKind::Entropy | OmegaKind::GiniImpurity | OmegaKind::Purity
        )
    }
}

/// One characterization to evaluate: a kind, its target feature, and
/// options where applicable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSpec {
    pub kind: OmegaKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<String>,
    #[serde(default)]
    pub scope: CategoryScope,
    #[serde(default)]
    pub sim: Similarity,
    #[serde(default)]
    pub denom: PotentialDenominator,
}

impl OmegaSpec {
    pub fn numeric(kind: OmegaKind, feature: &str) -> Self {
        Self {
            kind,
            feature: Some(feature.to_string()),
            scope: CategoryScope::default(),
            sim: Similarity::default(),
            denom: PotentialDenominator::default(),
        }
    }

    pub fn structural(kind: OmegaKind) -> Self {
        Self {
            kind,
            feature: None,
            scope: CategoryScope::default(),
            sim: Similarity::default(),
            denom: PotentialDenominator::default(),
        }
    }

    /// Label used in batch output rows, e.g. `mean(score)`.
    pub fn label(&self) -> String {
        match &self.feature {
            Some(f) => format!("{}({})", self.kind.name(), f),
            None => self.kind.name().to_string(),
        }
    }

    fn feature_name(&self) -> Result<&str> {
        self.feature.as_deref().ok_or_else(|| {
            Error::SchemaMismatch(format!("{} requires a target feature", self.kind.name()))
        })
    }

    /// Evaluate this characterization on one hyperedge.
    pub fn evaluate(
        &self,
        h: &Hypergraph,
        e: &Hyperedge,
        features: &NodeFeatures,
    ) -> Result<f64> {
        match self.kind {
            OmegaKind::Mean => Ok(mean(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Median => Ok(median(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Mode => Ok(mode(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Variance => Ok(variance(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Std => Ok(std_dev(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Mad => Ok(mad(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Gini => Ok(gini(&features.numeric_over(self.feature_name()?, e)?)),
            OmegaKind::Entropy => Ok(entropy(
                &features.codes_over(self.feature_name()?, e)?,
                self.scope,
            )),
            OmegaKind::GiniImpurity => Ok(gini_impurity(
                &features.codes_over(self.feature_name()?, e)?,
                self.scope,
            )),
            OmegaKind::Size => Ok(e.size() as f64),
            OmegaKind::Purity => Ok(purity(&features.codes_over(self.feature_name()?, e)?)),
            OmegaKind::Cohesion => {
                let name = self.feature_name()?;
                let values = if features.numeric(name).is_some() {
                    features.numeric_over(name, e)?
                } else {
                    features
                        .codes_over(name, e)?
                        .into_iter()
                        .map(f64::from)
                        .collect()
                };
                cohesion(&values, self.sim)
            }
            OmegaKind::InteractionPotential => interaction_potential(h, e, self.denom),
        }
    }
}

/// One batch output row.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaRow {
    pub hyperedge: EdgeId,
    pub label: String,
    pub value: f64,
}

/// Evaluate every spec on every hyperedge, in hyperedge order.
pub fn evaluate_all(
    h: &Hypergraph,
    specs: &[OmegaSpec],
    features: &NodeFeatures,
) -> Result<Vec<OmegaRow>> {
    let per_edge: Vec<Vec<OmegaRow>> = h
        .hyperedges()
        .par_iter()
        .map(|e| {
            specs
                .iter()
                .map(|spec| {
                    Ok(OmegaRow {
                        hyperedge: e.id,
                        label: spec.label(),
                        value: spec.evaluate(h, e, features)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_edge.into_iter().flatten().collect())
}
