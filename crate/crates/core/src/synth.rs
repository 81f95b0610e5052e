//! Deterministic synthetic fixtures: planted archetype labels, matching
//! feature/thread/text files, and optional planted transition structure.
//!
//! Labels are drawn on RNG stream 0, feature values on stream 1, threads
//! on stream 2, and texts on stream 3, so the in-memory sequence generator
//! and the file generator agree on the planted labels for a given seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::archetypes::ArchetypeCatalog;
use crate::error::{Error, Result};
use crate::features::Label;
use crate::hypergraph::{MonthKey, NodeId};
use crate::io::{SchemaWriter, TEXTS_SCHEMA, THREADS_SCHEMA, USERS_SCHEMA};
use crate::lexicon::LexiconFamily;
use crate::transitions::{ArchetypeSequence, SequenceSet};

/// Extra probability mass planted on one ordered archetype transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantedTransition {
    pub from: usize,
    pub to: usize,
    pub boost: f64,
}

/// Generator parameters.
#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub users: usize,
    pub months: u8,
    pub year: i32,
    /// Mixture weights over the catalog's archetypes.
    pub mixture: Vec<f64>,
    pub threads_per_month: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub planted: Option<PlantedTransition>,
    pub with_texts: bool,
    pub seed: u64,
    pub community: String,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            users: 100,
            months: 6,
            year: 2023,
            mixture: vec![1.0; 8],
            threads_per_month: 150,
            size_min: 3,
            size_max: 8,
            planted: None,
            with_texts: false,
            seed: 0,
            community: "c/synthetic".to_string(),
        }
    }
}

impl SynthSpec {
    /// Check feasibility against a catalog before generating.
    pub fn validate(&self, catalog: &ArchetypeCatalog) -> Result<()> {
        let k = catalog.archetypes().len();
        if self.users == 0 || self.months == 0 || self.threads_per_month == 0 {
            return Err(Error::SpecError(
                "users, months, and threads_per_month must be positive".into(),
            ));
        }
        if self.mixture.len() != k {
            return Err(Error::SpecError(format!(
                "mixture has {} weights for {} archetypes",
                self.mixture.len(),
                k
            )));
        }
        if self.mixture.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::SpecError("mixture weights must be non-negative".into()));
        }
        if self.mixture.iter().sum::<f64>() <= 0.0 {
            return Err(Error::SpecError("mixture weights sum to zero".into()));
        }
        if self.size_min < 2 || self.size_min > self.size_max || self.size_max > self.users {
            return Err(Error::SpecError(format!(
                "infeasible thread sizes {}..={} for {} users",
                self.size_min, self.size_max, self.users
            )));
        }
        // global min-max normalization needs both labels present per
        // feature, otherwise planted labels are not recoverable
        for (j, feature) in catalog.features.iter().enumerate() {
            for wanted in [Label::High, Label::Low] {
                let mass: f64 = catalog
                    .archetypes()
                    .iter()
                    .zip(&self.mixture)
                    .filter(|(a, _)| a.labels[j] == wanted)
                    .map(|(_, &w)| w)
                    .sum();
                if mass <= 0.0 {
                    return Err(Error::SpecError(format!(
                        "mixture gives no weight to {wanted} values of '{feature}'"
                    )));
                }
            }
        }
        if let Some(p) = self.planted {
            if p.from >= k || p.to >= k {
                return Err(Error::SpecError("planted transition index out of range".into()));
            }
            if !(0.0..=1.0).contains(&p.boost) || 1.0 / k as f64 + p.boost > 1.0 {
                return Err(Error::SpecError(format!(
                    "planted boost {} is infeasible for {k} archetypes",
                    p.boost
                )));
            }
        }
        Ok(())
    }

    fn stream_rng(&self, stream: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn sample_mixture(mixture: &[f64], total: f64, rng: &mut ChaCha12Rng) -> u32 {
    let mut draw = rng.random::<f64>() * total;
    for (i, &w) in mixture.iter().enumerate() {
        draw -= w;
        if draw < 0.0 {
            return i as u32;
        }
    }
    (mixture.len() - 1) as u32
}

/// Planted labels, `labels[user][month_index]`.
fn gen_labels(spec: &SynthSpec, k: usize, rng: &mut ChaCha12Rng) -> Vec<Vec<u32>> {
    let total: f64 = spec.mixture.iter().sum();
    let base = 1.0 / k as f64;
    (0..spec.users)
        .map(|_| {
            let mut months = Vec::with_capacity(spec.months as usize);
            for t in 0..spec.months {
                let label = match (spec.planted, months.last()) {
                    (Some(p), Some(&prev)) if t > 0 && prev == p.from as u32 => {
                        if rng.random::<f64>() < base + p.boost {
                            p.to as u32
                        } else {
                            // uniform over the remaining labels keeps the
                            // boosted row a proper distribution
                            let mut pick = rng.random_range(0..k - 1) as u32;
                            if pick >= p.to as u32 {
                                pick += 1;
                            }
                            pick
                        }
                    }
                    _ => sample_mixture(&spec.mixture, total, rng),
                };
                months.push(label);
            }
            months
        })
        .collect()
}

/// Generate only the planted label sequences (the file generator's labels
/// for the same seed are identical).
pub fn planted_sequences(spec: &SynthSpec, catalog: &ArchetypeCatalog) -> Result<SequenceSet> {
    spec.validate(catalog)?;
    let k = catalog.archetypes().len();
    let mut rng = spec.stream_rng(0);
    let labels = gen_labels(spec, k, &mut rng);
    let sequences = labels
        .into_iter()
        .enumerate()
        .map(|(u, months)| {
            let steps = months
                .into_iter()
                .enumerate()
                .map(|(t, label)| {
                    (
                        MonthKey {
                            year: spec.year,
                            month: t as u8 + 1,
                        },
                        label,
                    )
                })
                .collect();
            ArchetypeSequence::new(NodeId(u as u32), steps)
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceSet::new(
        catalog.archetypes().iter().map(|a| a.name.clone()).collect(),
        sequences,
    )
}

fn user_name(u: usize) -> String {
    format!("u{u:06}")
}

/// Feature value consistent with a label: highs in `[0.55, 0.95)`, lows in
/// `[0.05, 0.45)`. The margins survive global min-max renormalization.
fn planted_value(label: Label, rng: &mut ChaCha12Rng) -> f64 {
    let u = rng.random::<f64>() * 0.4;
    match label {
        Label::High => 0.55 + u,
        Label::Low => 0.05 + u,
    }
}

const FILLER_WORDS: [&str; 8] = [
    "the", "thread", "about", "this", "that", "with", "from", "they",
];
const POSITIVE_WORDS: [&str; 8] = [
    "joyful", "trusting", "anticipate", "pleasant", "nurture", "justice", "loyal", "sacred",
];
const NEGATIVE_WORDS: [&str; 8] = [
    "angerous", "fearful", "disgusting", "sadly", "dreary", "betray", "defile", "harmful",
];

/// Write the three synthetic lexicons; returns family to path.
pub fn write_synthetic_lexicons(dir: &Path) -> Result<BTreeMap<LexiconFamily, PathBuf>> {
    let mut out = BTreeMap::new();

    let emotions = dir.join("lexicon_emotions.tsv");
    let dims = LexiconFamily::Emotions.canonical_dims();
    let mut text = format!("term\t{}\n", dims.join("\t"));
    let emo_terms = [
        ("angerous", 0),
        ("anticipate", 1),
        ("disgusting", 2),
        ("fearful", 3),
        ("joyful", 4),
        ("sadly", 5),
        ("surprising", 6),
        ("trusting", 7),
    ];
    for (term, dim) in emo_terms {
        let scores: Vec<String> = (0..dims.len())
            .map(|d| if d == dim { "1".into() } else { "0".into() })
            .collect();
        text.push_str(&format!("{term}\t{}\n", scores.join("\t")));
    }
    std::fs::write(&emotions, text)?;
    out.insert(LexiconFamily::Emotions, emotions);

    let pad = dir.join("lexicon_pad.tsv");
    let mut text = format!(
        "term\t{}\n",
        LexiconFamily::Pad.canonical_dims().join("\t")
    );
    for (term, v, a, d) in [
        ("pleasant", 0.9, 0.3, 0.5),
        ("joyful", 0.8, 0.5, 0.5),
        ("dreary", 0.1, 0.2, 0.3),
        ("fearful", 0.1, 0.8, 0.2),
        ("command", 0.5, 0.4, 0.9),
    ] {
        text.push_str(&format!("{term}\t{v}\t{a}\t{d}\n"));
    }
    std::fs::write(&pad, text)?;
    out.insert(LexiconFamily::Pad, pad);

    let moral = dir.join("lexicon_moral.tsv");
    let mut text = format!(
        "term\t{}\n",
        LexiconFamily::Moral.canonical_dims().join("\t")
    );
    for (term, scores) in [
        ("obey", [0.8, 0.0, 0.0, 0.2, 0.0]),
        ("nurture", [0.0, 0.9, 0.1, 0.0, 0.0]),
        ("justice", [0.1, 0.0, 0.9, 0.0, 0.0]),
        ("loyal", [0.0, 0.0, 0.0, 0.9, 0.1]),
        ("sacred", [0.0, 0.0, 0.0, 0.0, 0.9]),
        ("betray", [0.0, 0.0, -0.2, -0.8, 0.0]),
        ("defile", [0.0, -0.1, 0.0, 0.0, -0.9]),
        ("harmful", [0.0, -0.9, -0.1, 0.0, 0.0]),
    ] {
        let row: Vec<String> = scores.iter().map(|s| s.to_string()).collect();
        text.push_str(&format!("{term}\t{}\n", row.join("\t")));
    }
    std::fs::write(&moral, text)?;
    out.insert(LexiconFamily::Moral, moral);
    Ok(out)
}

/// Paths of the generated fixture files.
#[derive(Clone, Debug)]
pub struct SynthOutput {
    pub threads: PathBuf,
    pub users: PathBuf,
    pub texts: Option<PathBuf>,
    pub lexicons: Option<BTreeMap<LexiconFamily, PathBuf>>,
}

/// Generate threads.csv, users.csv, and optionally texts.csv plus
/// synthetic lexicons, all deterministic per seed.
pub fn generate_files(
    spec: &SynthSpec,
    catalog: &ArchetypeCatalog,
    out_dir: &Path,
) -> Result<SynthOutput> {
    spec.validate(catalog)?;
    std::fs::create_dir_all(out_dir)?;
    let k = catalog.archetypes().len();
    let labels = gen_labels(spec, k, &mut spec.stream_rng(0));

    // users.csv: score on a [0, 100] scale and sentiment on [-1, 1] to
    // exercise the global min-max rescale; toxicity already in [0, 1]
    let users_path = out_dir.join("users.csv");
    {
        let mut rng = spec.stream_rng(1);
        let mut w = SchemaWriter::create(&users_path, USERS_SCHEMA)?;
        for (u, months) in labels.iter().enumerate() {
            for (t, &label) in months.iter().enumerate() {
                let archetype = &catalog.archetypes()[label as usize];
                let score = planted_value(archetype.labels[0], &mut rng);
                let sentiment = planted_value(archetype.labels[1], &mut rng);
                let toxicity = planted_value(archetype.labels[2], &mut rng);
                let n_posts = rng.random_range(1..=20u32);
                let subjectivity = rng.random::<f64>();
                w.write_row(&[
                    user_name(u),
                    spec.year.to_string(),
                    (t + 1).to_string(),
                    (score * 100.0).to_string(),
                    2.0f64.mul_add(sentiment, -1.0).to_string(),
                    toxicity.to_string(),
                    n_posts.to_string(),
                    subjectivity.to_string(),
                ])?;
            }
        }
        w.finish()?;
    }

    let threads_path = out_dir.join("threads.csv");
    {
        let mut rng = spec.stream_rng(2);
        let mut w = SchemaWriter::create(&threads_path, THREADS_SCHEMA)?;
        let mut thread_id = 0usize;
        for t in 0..spec.months {
            for _ in 0..spec.threads_per_month {
                let size = rng.random_range(spec.size_min..=spec.size_max);
                // partial Fisher-Yates over user indices
                let mut pool: Vec<usize> = (0..spec.users).collect();
                for i in 0..size {
                    let j = rng.random_range(i..spec.users);
                    pool.swap(i, j);
                }
                let members: Vec<String> = pool[..size].iter().map(|&u| user_name(u)).collect();
                w.write_row(&[
                    format!("t{thread_id:07}"),
                    spec.community.clone(),
                    spec.year.to_string(),
                    (t + 1).to_string(),
                    members.join(";"),
                ])?;
                thread_id += 1;
            }
        }
        w.finish()?;
    }

    let (texts, lexicons) = if spec.with_texts {
        let lex = write_synthetic_lexicons(out_dir)?;
        let texts_path = out_dir.join("texts.csv");
        let mut rng = spec.stream_rng(3);
        let mut w = SchemaWriter::create(&texts_path, TEXTS_SCHEMA)?;
        for (u, months) in labels.iter().enumerate() {
            for (t, &label) in months.iter().enumerate() {
                let archetype = &catalog.archetypes()[label as usize];
                let positive = archetype.labels[1] == Label::High;
                let n_texts = rng.random_range(1..=3u32);
                for _ in 0..n_texts {
                    let n_words = rng.random_range(4..=10usize);
                    let mut words = Vec::with_capacity(n_words);
                    for _ in 0..n_words {
                        let affect = rng.random::<f64>() < 0.5;
                        let word = if !affect {
                            FILLER_WORDS[rng.random_range(0..FILLER_WORDS.len())]
                        } else if positive {
                            POSITIVE_WORDS[rng.random_range(0..POSITIVE_WORDS.len())]
                        } else {
                            NEGATIVE_WORDS[rng.random_range(0..NEGATIVE_WORDS.len())]
                        };
                        words.push(word);
                    }
                    w.write_row(&[
                        user_name(u),
                        spec.year.to_string(),
                        (t + 1).to_string(),
                        words.join(" "),
                    ])?;
                }
            }
        }
        w.finish()?;
        (Some(texts_path), Some(lex))
    } else {
        (None, None)
    };

    Ok(SynthOutput {
        threads: threads_path,
        users: users_path,
        texts,
        lexicons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archetypes::assign;
    use crate::io::{load_threads, load_users, ThreadFilter};
    use crate::transitions::observed_transitions;

    fn catalog() -> ArchetypeCatalog {
        ArchetypeCatalog::score_sentiment_toxicity()
    }

    #[test]
    fn validate_rejects_infeasible_specs() {
        let cat = catalog();
        let mut spec = SynthSpec {
            users: 0,
            ..Default::default()
        };
        assert!(matches!(spec.validate(&cat), Err(Error::SpecError(_))));
        spec.users = 10;
        spec.mixture = vec![1.0; 3];
        assert!(matches!(spec.validate(&cat), Err(Error::SpecError(_))));
        spec.mixture = vec![1.0; 8];
        spec.size_max = 50;
        assert!(matches!(spec.validate(&cat), Err(Error::SpecError(_))));
        spec.size_max = 5;
        spec.planted = Some(PlantedTransition {
            from: 0,
            to: 9,
            boost: 0.3,
        });
        assert!(matches!(spec.validate(&cat), Err(Error::SpecError(_))));
        spec.planted = Some(PlantedTransition {
            from: 0,
            to: 1,
            boost: 0.95,
        });
        assert!(matches!(spec.validate(&cat), Err(Error::SpecError(_))));
        // all weight on high-score archetypes leaves 'score' uncoverable
        spec.planted = None;
        spec.mixture = vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(spec.validate(&cat), Err(Error::SpecError(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let cat = catalog();
        let spec = SynthSpec {
            users: 20,
            months: 3,
            threads_per_month: 10,
            with_texts: true,
            seed: 9,
            ..Default::default()
        };
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        generate_files(&spec, &cat, d1.path()).unwrap();
        generate_files(&spec, &cat, d2.path()).unwrap();
        for name in ["threads.csv", "users.csv", "texts.csv"] {
            let a = std::fs::read(d1.path().join(name)).unwrap();
            let b = std::fs::read(d2.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between runs");
        }
    }

    #[test]
    fn planted_labels_are_recovered_through_normalization() {
        let cat = catalog();
        let spec = SynthSpec {
            users: 60,
            months: 3,
            threads_per_month: 30,
            seed: 4,
            ..Default::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let out = generate_files(&spec, &cat, dir.path()).unwrap();
        let loaded = load_threads(&out.threads, &ThreadFilter::default(), 3).unwrap();
        let mut interner = loaded.interner;
        let table = load_users(&out.users, &mut interner).unwrap();
        let normalized = table.normalize_global().unwrap();
        let tv = cat.thresholds(0.5);
        let planted = planted_sequences(&spec, &cat).unwrap();
        let mut checked = 0;
        for seq in &planted.sequences {
            let name = user_name(seq.user.0 as usize);
            let node = interner.get(&name).unwrap();
            for &(month, label) in seq.steps() {
                let fv = &normalized.per_month[&month][&node];
                let got = assign(fv, &normalized.schema, &cat, &tv).unwrap();
                assert_eq!(got.name, cat.archetypes()[label as usize].name);
                checked += 1;
            }
        }
        assert_eq!(checked, 60 * 3);
    }

    #[test]
    fn uniform_mixture_census_is_near_uniform() {
        let cat = catalog();
        let spec = SynthSpec {
            users: 2000,
            months: 4,
            seed: 11,
            ..Default::default()
        };
        let set = planted_sequences(&spec, &cat).unwrap();
        let mut counts = vec![0usize; 8];
        for seq in &set.sequences {
            for &(_, label) in seq.steps() {
                counts[label as usize] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        assert_eq!(total, 2000 * 4);
        let expected = total as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 99.9% quantile of chi-squared with 7 degrees of freedom
        assert!(chi2 < 24.32, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn planted_boost_shows_up_in_observed_rate() {
        let cat = catalog();
        let spec = SynthSpec {
            users: 3000,
            months: 6,
            planted: Some(PlantedTransition {
                from: 2,
                to: 5,
                boost: 0.3,
            }),
            seed: 21,
            ..Default::default()
        };
        let set = planted_sequences(&spec, &cat).unwrap();
        let observed = observed_transitions(&set).unwrap();
        let boosted = observed.prob(2, 5).unwrap();
        assert!((boosted - (0.125 + 0.3)).abs() < 0.02, "got {boosted}");
        let untouched = observed.prob(3, 5).unwrap();
        assert!((untouched - 0.125).abs() < 0.02, "got {untouched}");
    }

    #[test]
    fn synthetic_lexicons_load() {
        use crate::lexicon::Lexicon;
        let dir = tempfile::tempdir().unwrap();
        let paths = write_synthetic_lexicons(dir.path()).unwrap();
        for (family, path) in paths {
            let lex = Lexicon::load_tsv(&path, family).unwrap();
            assert!(!lex.is_empty());
        }
    }
}
