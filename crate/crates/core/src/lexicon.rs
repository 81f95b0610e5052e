//! Lexicon-based scoring of user text: emotion, valence/arousal/dominance,
//! and moral-foundation profiles.
//!
//! Lexicons are external tab-separated files (`term<TAB>dim1...dimN`), not
//! bundled. A text's raw score per dimension is the total score of its
//! words; per-user profiles are means over texts, min-max normalized across
//! the user population for the emotion and PAD families. Moral scores are
//! averaged without normalization since per-word scores already live in
//! `[-1, 1]`.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Normalizer;

/// The three lexicon families and their dimension counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconFamily {
    /// Eight basic emotions, scores in `[0, 1]`.
    Emotions,
    /// Valence (pleasure), arousal, dominance.
    Pad,
    /// Five moral foundations, scores in `[-1, 1]`.
    Moral,
}

impl LexiconFamily {
    pub fn dimension_count(self) -> usize {
        match self {
            LexiconFamily::Emotions => 8,
            LexiconFamily::Pad => 3,
            LexiconFamily::Moral => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LexiconFamily::Emotions => "emotions",
            LexiconFamily::Pad => "pad",
            LexiconFamily::Moral => "moral",
        }
    }

    /// Conventional dimension names, used by the synthetic generator.
    pub fn canonical_dims(self) -> &'static [&'static str] {
        match self {
            LexiconFamily::Emotions => &[
                "anger",
                "anticipation",
                "disgust",
                "fear",
                "joy",
                "sadness",
                "surprise",
                "trust",
            ],
            LexiconFamily::Pad => &["valence", "arousal", "dominance"],
            LexiconFamily::Moral => &["authority", "care", "fairness", "loyalty", "sanctity"],
        }
    }

    fn validate_score(self, term: &str, dim: &str, score: f64) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::LexiconFormat(format!(
                "term '{term}' has non-finite score for '{dim}'"
            )));
        }
        let ok = match self {
            LexiconFamily::Emotions => (0.0..=1.0).contains(&score),
            LexiconFamily::Pad => true,
            LexiconFamily::Moral => (-1.0..=1.0).contains(&score),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::LexiconFormat(format!(
                "term '{term}' score {score} for '{dim}' is outside the {} domain",
                self.name()
            )))
        }
    }
}

/// Term-to-scores map for one family.
#[derive(Clone, Debug)]
pub struct Lexicon {
    pub family: LexiconFamily,
    pub dims: Vec<String>,
    entries: HashMap<String, Vec<f64>>,
}

impl Lexicon {
    pub fn new(
        family: LexiconFamily,
        dims: Vec<String>,
        entries: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Result<Self> {
        if dims.len() != family.dimension_count() {
            return Err(Error::LexiconFormat(format!(
                "{} family expects {} dimensions, got {}",
                family.name(),
                family.dimension_count(),
                dims.len()
            )));
        }
        let mut map = HashMap::new();
        for (term, scores) in entries {
            if scores.len() != dims.len() {
                return Err(Error::LexiconFormat(format!(
                    "term '{term}' has {} scores over {} dimensions",
                    scores.len(),
                    dims.len()
                )));
            }
            for (dim, &s) in dims.iter().zip(&scores) {
                family.validate_score(&term, dim, s)?;
            }
            map.insert(term.to_lowercase(), scores);
        }
        Ok(Self {
            family,
            dims,
            entries: map,
        })
    }

    /// Load a tab-separated lexicon: header `term<TAB>dim1...dimN`, one
    /// row per term.
    pub fn load_tsv(path: &Path, family: LexiconFamily) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::EmptyInput("lexicon file"))?;
        let mut cols = header.split('\t');
        match cols.next() {
            Some("term") => {}
            other => {
                return Err(Error::LexiconFormat(format!(
                    "first header column must be 'term', got {other:?}"
                )))
            }
        }
        let dims: Vec<String> = cols.map(str::to_string).collect();
        let mut entries = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let term = fields
                .next()
                .ok_or_else(|| Error::MalformedRow {
                    line: idx as u64 + 1,
                    message: "missing term".into(),
                })?
                .to_string();
            let scores = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|e| Error::MalformedRow {
                        line: idx as u64 + 1,
                        message: format!("bad score '{f}': {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            entries.push((term, scores));
        }
        Self::new(family, dims, entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scores(&self, term: &str) -> Option<&[f64]> {
        self.entries.get(term).map(Vec::as_slice)
    }
}

/// Lowercased maximal runs of alphabetic characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// How per-text scores aggregate over tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextAggregation {
    /// Total score of the text's words.
    #[default]
    Sum,
    /// Total divided by the token count (zero for empty texts).
    MeanPerToken,
    /// Mean over matched tokens only; keeps bounded per-word domains
    /// bounded, so it is the default for moral scores.
    MeanPerMatch,
}

/// Per-dimension raw score of one text: matched-token scores summed, with
/// unmatched tokens contributing zero.
pub fn score_text(text: &str, lex: &Lexicon) -> Vec<f64> {
    score_text_with(text, lex, TextAggregation::Sum)
}

pub fn score_text_with(text: &str, lex: &Lexicon, agg: TextAggregation) -> Vec<f64> {
    let tokens = tokenize(text);
    let mut totals = vec![0.0; lex.dims.len()];
    let mut matched = 0usize;
    for token in &tokens {
        if let Some(scores) = lex.scores(token) {
            matched += 1;
            for (t, s) in totals.iter_mut().zip(scores) {
                *t += s;
            }
        }
    }
    let denom = match agg {
        TextAggregation::Sum => return totals,
        TextAggregation::MeanPerToken => tokens.len(),
        TextAggregation::MeanPerMatch => matched,
    };
    if denom > 0 {
        for t in &mut totals {
            *t /= denom as f64;
        }
    }
    totals
}

/// A subject's per-dimension profile for one family.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub subject: String,
    pub family: LexiconFamily,
    pub dims: Vec<String>,
    pub values: Vec<f64>,
}

/// Mean per-text score over a subject's texts, before population
/// normalization.
pub fn raw_profile(
    subject: &str,
    texts: &[String],
    lex: &Lexicon,
    agg: TextAggregation,
) -> Result<Profile> {
    if texts.is_empty() {
        return Err(Error::EmptyInput("profile texts"));
    }
    let mut values = vec![0.0; lex.dims.len()];
    for text in texts {
        for (v, s) in values.iter_mut().zip(score_text_with(text, lex, agg)) {
            *v += s;
        }
    }
    for v in &mut values {
        *v /= texts.len() as f64;
    }
    Ok(Profile {
        subject: subject.to_string(),
        family: lex.family,
        dims: lex.dims.clone(),
        values,
    })
}

/// Default aggregation per family: bounded mean for moral scores, raw sum
/// otherwise.
pub fn default_aggregation(family: LexiconFamily) -> TextAggregation {
    match family {
        LexiconFamily::Moral => TextAggregation::MeanPerMatch,
        _ => TextAggregation::Sum,
    }
}

/// Profile every subject, then min-max normalize each dimension across the
/// population for the emotion and PAD families. Moral profiles pass through
/// unchanged.
pub fn profile_population(
    subjects: &[(String, Vec<String>)],
    lex: &Lexicon,
    agg: TextAggregation,
) -> Result<Vec<Profile>> {
    if subjects.is_empty() {
        return Err(Error::EmptyInput("profile population"));
    }
    let mut profiles = subjects
        .iter()
        .map(|(subject, texts)| raw_profile(subject, texts, lex, agg))
        .collect::<Result<Vec<_>>>()?;
    if lex.family != LexiconFamily::Moral {
        for d in 0..lex.dims.len() {
            let column: Vec<f64> = profiles.iter().map(|p| p.values[d]).collect();
            let norm = Normalizer::fit(&column)?;
            // an all-constant column stays at its raw value when everyone
            // is at zero, otherwise collapses to the midpoint
            if norm.max == norm.min && norm.max == 0.0 {
                continue;
            }
            for p in &mut profiles {
                p.values[d] = norm.apply(p.values[d]);
            }
        }
    }
    Ok(profiles)
}
