//! Archetype catalog, membership, and typicality ranking.
//!
//! An archetype is a named label tuple over a feature subset, e.g.
//! ⟨high, high, low⟩ over (score, sentiment, toxicity). Users are assigned
//! to the archetype whose label tuple matches their thresholded feature
//! vector, and ranked within it by typicality.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{labeled_vector, FeatureSchema, FeatureVector, Label, ThresholdVector};
use crate::hypergraph::NodeId;

/// Named label tuple with an optional prototype value tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct Archetype {
    pub name: String,
    pub labels: Vec<Label>,
    pub prototype: Option<Vec<f64>>,
}

impl Archetype {
    pub fn label_string(&self) -> String {
        self.labels.iter().map(|l| l.letter()).collect()
    }
}

/// Ordered archetype list over a shared feature subset.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchetypeCatalog {
    pub features: Vec<String>,
    archetypes: Vec<Archetype>,
}

#[derive(Serialize, Deserialize)]
struct CatalogFileEntry {
    name: String,
    labels: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    prototype: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    features: Vec<String>,
    archetypes: Vec<CatalogFileEntry>,
}

impl ArchetypeCatalog {
    pub fn new(features: Vec<String>, archetypes: Vec<Archetype>) -> Result<Self> {
        let mut names = HashSet::new();
        let mut tuples = HashSet::new();
        for a in &archetypes {
            if a.labels.len() != features.len() {
                return Err(Error::SchemaMismatch(format!(
                    "archetype '{}' has {} labels over {} features",
                    a.name,
                    a.labels.len(),
                    features.len()
                )));
            }
            if let Some(p) = &a.prototype {
                if p.len() != features.len() {
                    return Err(Error::SchemaMismatch(format!(
                        "archetype '{}' prototype length {} != {} features",
                        a.name,
                        p.len(),
                        features.len()
                    )));
                }
            }
            if !names.insert(a.name.clone()) {
                return Err(Error::InvalidValue(format!(
                    "duplicate archetype name '{}'",
                    a.name
                )));
            }
            if !tuples.insert(a.labels.clone()) {
                return Err(Error::InvalidValue(format!(
                    "duplicate label tuple '{}'",
                    a.label_string()
                )));
            }
        }
        Ok(Self {
            features,
            archetypes,
        })
    }

    /// The default eight-entry catalog over (score, sentiment, toxicity),
    /// with prototypes at each tuple's extremal corner (high → 1, low → 0).
    pub fn score_sentiment_toxicity() -> Self {
        let rows: [(&str, &str); 8] = [
            ("Community Hero", "HHL"),
            ("Controversial Star", "HHH"),
            ("Respected Critic", "HLL"),
            ("Infamous Celebrity", "HLH"),
            ("Benevolent Underdog", "LHL"),
            ("Positive Provoker", "LHH"),
            ("Quiet Critic", "LLL"),
            ("Malcontent", "LLH"),
        ];
        let archetypes = rows
            .iter()
            .map(|(name, tuple)| {
                let labels: Vec<Label> = tuple
                    .chars()
                    .map(|c| Label::from_letter(c).expect("valid letter"))
                    .collect();
                let prototype = labels
                    .iter()
                    .map(|l| match l {
                        Label::High => 1.0,
                        Label::Low => 0.0,
                    })
                    .collect();
                Archetype {
                    name: name.to_string(),
                    labels,
                    prototype: Some(prototype),
                }
            })
            .collect();
        Self::new(
            vec![
                "score".to_string(),
                "sentiment".to_string(),
                "toxicity".to_string(),
            ],
            archetypes,
        )
        .expect("default catalog is well-formed")
    }

    pub fn archetypes(&self) -> &[Archetype] {
        &self.archetypes
    }

    pub fn by_name(&self, name: &str) -> Option<&Archetype> {
        self.archetypes.iter().find(|a| a.name == name)
    }

    /// True when every label combination over the feature subset is present.
    pub fn is_exhaustive(&self) -> bool {
        self.archetypes.len() == 1usize << self.features.len()
    }

    /// Load from a JSON file: `{"features": [...], "archetypes":
    /// [{"name": ..., "labels": "HHL", "prototype": [...]?}, ...]}`.
    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: CatalogFile = serde_json::from_str(&text)?;
        let archetypes = file
            .archetypes
            .into_iter()
            .map(|e| {
                let labels = e
                    .labels
                    .chars()
                    .map(Label::from_letter)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Archetype {
                    name: e.name,
                    labels,
                    prototype: e.prototype,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.features, archetypes)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = CatalogFile {
            features: self.features.clone(),
            archetypes: self
                .archetypes
                .iter()
                .map(|a| CatalogFileEntry {
                    name: a.name.clone(),
                    labels: a.label_string(),
                    prototype: a.prototype.clone(),
                })
                .collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    /// Threshold vector over this catalog's features.
    pub fn thresholds(&self, threshold: f64) -> ThresholdVector {
        ThresholdVector {
            features: self.features.clone(),
            thresholds: vec![threshold; self.features.len()],
        }
    }
}

/// Extract a vector's values over the catalog's feature subset, in order.
pub fn values_over(
    fv: &FeatureVector,
    schema: &FeatureSchema,
    features: &[String],
) -> Result<Vec<f64>> {
    features.iter().map(|f| fv.value(schema, f)).collect()
}

/// Assign a user to the unique archetype matching their label tuple.
pub fn assign<'a>(
    fv: &FeatureVector,
    schema: &FeatureSchema,
    catalog: &'a ArchetypeCatalog,
    tv: &ThresholdVector,
) -> Result<&'a Archetype> {
    let labels = labeled_vector(fv, schema, tv)?;
    catalog
        .archetypes
        .iter()
        .find(|a| a.labels == labels)
        .ok_or_else(|| {
            let tuple: String = labels.iter().map(|l| l.letter()).collect();
            Error::NoMatchingArchetype(tuple)
        })
}

/// Distance metric for prototype matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMetric {
    Euclidean,
    /// 1 − cosine similarity; 0 when both vectors are zero, 1 when exactly
    /// one is zero.
    Cosine,
    /// Feature-wise maximum absolute difference.
    Chebyshev,
}

impl DistanceMetric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            DistanceMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            DistanceMetric::Cosine => {
                if a == b {
                    return 0.0;
                }
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 && nb == 0.0 {
                    0.0
                } else if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
            DistanceMetric::Chebyshev => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// True iff the user's feature values lie within `eps` of the archetype's
/// prototype under the given metric.
pub fn match_by_distance(
    fv: &FeatureVector,
    schema: &FeatureSchema,
    catalog: &ArchetypeCatalog,
    archetype: &Archetype,
    metric: DistanceMetric,
    eps: f64,
) -> Result<bool> {
    let prototype = archetype
        .prototype
        .as_ref()
        .ok_or_else(|| Error::PrototypeUnavailable(archetype.name.clone()))?;
    let values = values_over(fv, schema, &catalog.features)?;
    Ok(metric.distance(&values, prototype) <= eps)
}

/// Which product form typicality uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TypicalityForm {
    /// Per-feature contribution `v` for a high label and `1 − v` for a low
    /// label. Maximal (exactly 1) at the archetype's extremal corner.
    #[default]
    Contribution,
    /// Signed product `∏ α·v` with `α = 1` for high and `α = −1` for low.
    /// Kept for comparison; it vanishes whenever any low-labeled feature
    /// is 0 and is negative for an odd number of low labels.
    SignedProduct,
}

/// Typicality of a user for an archetype, from values normalized to `[0, 1]`.
pub fn typicality(
    fv: &FeatureVector,
    schema: &FeatureSchema,
    catalog: &ArchetypeCatalog,
    archetype: &Archetype,
    form: TypicalityForm,
) -> Result<f64> {
    let values = values_over(fv, schema, &catalog.features)?;
    for &v in &values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidValue(format!(
                "typicality requires values in [0, 1], got {v}"
            )));
        }
    }
    let product = values
        .iter()
        .zip(&archetype.labels)
        .map(|(&v, l)| match (form, l) {
            (TypicalityForm::Contribution, Label::High) => v,
            (TypicalityForm::Contribution, Label::Low) => 1.0 - v,
            (TypicalityForm::SignedProduct, Label::High) => v,
            (TypicalityForm::SignedProduct, Label::Low) => -v,
        })
        .product();
    Ok(product)
}

/// A user's typicality for one archetype.
#[derive(Clone, Debug, PartialEq)]
pub struct TypicalityScore {
    pub user: NodeId,
    pub archetype: String,
    pub value: f64,
}

/// Ranked prefix of users by typicality; `short` flags fewer than `k`
/// candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct TopTypical {
    pub entries: Vec<TypicalityScore>,
    pub requested: usize,
    pub short: bool,
}

/// Rank `users` (already assigned to `archetype`) by descending typicality,
/// ties broken by ascending interned id.
pub fn top_k_typical(
    users: &[FeatureVector],
    schema: &FeatureSchema,
    catalog: &ArchetypeCatalog,
    archetype: &Archetype,
    k: usize,
    form: TypicalityForm,
) -> Result<TopTypical> {
    let mut entries = users
        .iter()
        .map(|fv| {
            Ok(TypicalityScore {
                user: fv.user,
                archetype: archetype.name.clone(),
                value: typicality(fv, schema, catalog, archetype, form)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .expect("typicality values are finite")
            .then(a.user.cmp(&b.user))
    });
    let short = entries.len() < k;
    entries.truncate(k);
    Ok(TopTypical {
        entries,
        requested: k,
        short,
    })
}

/// Count assignments per archetype, in catalog order (zero counts kept).
pub fn archetype_census<'a>(
    assignments: impl IntoIterator<Item = &'a str>,
    catalog: &ArchetypeCatalog,
) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for name in assignments {
        *counts.entry(name).or_insert(0) += 1;
    }
    catalog
        .archetypes
        .iter()
        .map(|a| {
            (
                a.name.clone(),
                counts.get(a.name.as_str()).copied().unwrap_or(0),
            )
        })
        .collect()
}
