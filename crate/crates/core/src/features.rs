//! Per-user feature vectors, min-max normalization, and the labeling
//! function mapping numeric values to low/high labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::NodeId;

/// Kind of a feature column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

/// Ordered feature names with kinds and declared numeric ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSchema {
    names: Vec<String>,
    kinds: Vec<FeatureKind>,
    ranges: Vec<Option<(f64, f64)>>,
}

impl FeatureSchema {
    /// Build a schema of numeric features, all declared over `[0, 1]`.
    pub fn numeric(names: &[&str]) -> Self {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            kinds: vec![FeatureKind::Numeric; names.len()],
            ranges: vec![Some((0.0, 1.0)); names.len()],
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn kind(&self, idx: usize) -> FeatureKind {
        self.kinds[idx]
    }
}

/// One user's numeric feature values, aligned to a schema's order.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub user: NodeId,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(user: NodeId, values: Vec<f64>) -> Self {
        Self { user, values }
    }

    pub fn value(&self, schema: &FeatureSchema, name: &str) -> Result<f64> {
        let idx = schema
            .index_of(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("feature '{name}' not in schema")))?;
        self.values
            .get(idx)
            .copied()
            .ok_or_else(|| Error::SchemaMismatch(format!("vector shorter than schema at '{name}'")))
    }
}

/// Binary label assigned by the thresholding rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Low,
    High,
}

impl Label {
    pub fn letter(self) -> char {
        match self {
            Label::Low => 'L',
            Label::High => 'H',
        }
    }

    pub fn from_letter(c: char) -> Result<Label> {
        match c.to_ascii_uppercase() {
            'L' => Ok(Label::Low),
            'H' => Ok(Label::High),
            other => Err(Error::InvalidValue(format!(
                "label letter must be H or L, got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Per-feature thresholds over a feature subset.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdVector {
    pub features: Vec<String>,
    pub thresholds: Vec<f64>,
}

impl ThresholdVector {
    pub fn new(features: Vec<String>, thresholds: Vec<f64>) -> Result<Self> {
        if features.len() != thresholds.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} feature names vs {} thresholds",
                features.len(),
                thresholds.len()
            )));
        }
        Ok(Self {
            features,
            thresholds,
        })
    }

    /// Same threshold for every named feature.
    pub fn uniform(features: &[&str], threshold: f64) -> Self {
        Self {
            features: features.iter().map(|s| s.to_string()).collect(),
            thresholds: vec![threshold; features.len()],
        }
    }
}

/// Fitted min-max rescaler.
///
/// Fit once over the full population so labels stay comparable across
/// snapshots, then apply to individual values. A constant feature maps to
/// 0.5 to avoid an arbitrary high/low call at the threshold boundary
/// (0.5 labels as low under the `<=` rule).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: f64,
    pub max: f64,
}

impl Normalizer {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("normalize"));
        }
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            if !v.is_finite() {
                return Err(Error::InvalidValue(format!(
                    "normalize requires finite values, got {v}"
                )));
            }
            min = min.min(v);
            max = max.max(v);
        }
        Ok(Self { min, max })
    }

    pub fn apply(&self, value: f64) -> f64 {
        if self.max == self.min {
            0.5
        } else {
            (value - self.min) / (self.max - self.min)
        }
    }
}

/// Min-max rescale a batch of values into `[0, 1]`.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>> {
    let norm = Normalizer::fit(values)?;
    Ok(values.iter().map(|&v| norm.apply(v)).collect())
}

/// The labeling rule: low iff `value <= threshold`, high otherwise.
pub fn label(value: f64, threshold: f64) -> Label {
    if value <= threshold {
        Label::Low
    } else {
        Label::High
    }
}

/// Apply the labeling rule feature-wise over a threshold vector's subset.
pub fn labeled_vector(
    fv: &FeatureVector,
    schema: &FeatureSchema,
    tv: &ThresholdVector,
) -> Result<Vec<Label>> {
    tv.features
        .iter()
        .zip(&tv.thresholds)
        .map(|(name, &t)| Ok(label(fv.value(schema, name)?, t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_affine_map() {
        assert_eq!(normalize(&[0.0, 5.0, 10.0]).unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_spanning_input_unchanged() {
        let input = vec![0.0, 0.25, 0.75, 1.0];
        assert_eq!(normalize(&input).unwrap(), input);
    }

    #[test]
    fn normalize_vader_compound_rescale() {
        // compound scores spanning [-1, 1] rescale as (x + 1) / 2
        let input = vec![-1.0, -0.5, 0.0, 1.0];
        let out = normalize(&input).unwrap();
        for (x, y) in input.iter().zip(&out) {
            assert!((y - (x + 1.0) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_constant_maps_to_half() {
        assert_eq!(normalize(&[3.0, 3.0, 3.0]).unwrap(), vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn normalize_rejects_non_finite() {
        assert!(matches!(
            normalize(&[0.0, f64::NAN]),
            Err(Error::InvalidValue(_))
        ));
        assert!(matches!(
            normalize(&[0.0, f64::INFINITY]),
            Err(Error::InvalidValue(_))
        ));
        assert!(matches!(normalize(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn label_rule() {
        // sentiment 1 vs threshold 0, toxicity 0.5 vs threshold 0.75
        assert_eq!(label(1.0, 0.0), Label::High);
        assert_eq!(label(0.5, 0.75), Label::Low);
        assert_eq!(label(0.5, 0.5), Label::Low);
        assert_eq!(label(0.51, 0.5), Label::High);
    }

    #[test]
    fn labeled_vector_applies_elementwise() {
        let schema = FeatureSchema::numeric(&["score", "sentiment", "toxicity"]);
        let tv = ThresholdVector::uniform(&["score", "sentiment", "toxicity"], 0.5);
        let fv = FeatureVector::new(NodeId(0), vec![0.8, 0.7, 0.1]);
        assert_eq!(
            labeled_vector(&fv, &schema, &tv).unwrap(),
            vec![Label::High, Label::High, Label::Low]
        );
        let fv = FeatureVector::new(NodeId(1), vec![0.4, 0.9, 0.9]);
        assert_eq!(
            labeled_vector(&fv, &schema, &tv).unwrap(),
            vec![Label::Low, Label::High, Label::High]
        );
        let fv = FeatureVector::new(NodeId(2), vec![0.5, 0.5, 0.5]);
        assert_eq!(
            labeled_vector(&fv, &schema, &tv).unwrap(),
            vec![Label::Low, Label::Low, Label::Low]
        );
    }

    #[test]
    fn labeled_vector_missing_feature_errors() {
        let schema = FeatureSchema::numeric(&["score"]);
        let tv = ThresholdVector::uniform(&["score", "sentiment"], 0.5);
        let fv = FeatureVector::new(NodeId(0), vec![0.8]);
        assert!(matches!(
            labeled_vector(&fv, &schema, &tv),
            Err(Error::SchemaMismatch(_))
        ));
    }
}
