//! End-to-end orchestration: ingest the dataset, then emit plot-ready CSVs
//! for summary statistics, distributions, archetype census, lexicon
//! profiles, transition significance, central discussions, and hyperedge
//! characterizations, plus a metadata JSON recording inputs, config, and
//! seed.
//!
//! Stages are pure functions of (inputs, config, seed): two runs with the
//! same config and seed produce byte-identical CSVs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::archetypes::{
    archetype_census, assign, top_k_typical, ArchetypeCatalog, TypicalityForm,
};
use crate::centrality::{
    build_line_graph, characterize_discussions, hyperedge_betweenness, scores_by_edge,
    DiscussionInputs, LineGraphOptions, WordCountScope,
};
use crate::error::Result;
use crate::features::{FeatureVector, ThresholdVector};
use crate::hypergraph::{jaccard_overlap, Hypergraph, MonthKey, NodeId};
use crate::io::{
    self, file_hash, load_texts, load_threads, load_users, opt_field, LoadedThreads, SchemaWriter,
    ThreadFilter, UserTable,
};
use crate::lexicon::{
    default_aggregation, profile_population, Lexicon, LexiconFamily, TextAggregation,
};
use crate::omega::{evaluate_all, CategoricalColumn, NodeFeatures, OmegaSpec};
use crate::transitions::{
    null_model, observed_transitions, significance, ArchetypeSequence, SequenceSet,
    RNG_ALGORITHM,
};

/// Pipeline stages that can be selected individually from the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Stats,
    Distributions,
    Archetypes,
    Profiles,
    Transitions,
    Centrality,
    Characterize,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Stats,
        Stage::Distributions,
        Stage::Archetypes,
        Stage::Profiles,
        Stage::Transitions,
        Stage::Centrality,
        Stage::Characterize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Stats => "stats",
            Stage::Distributions => "distributions",
            Stage::Archetypes => "archetypes",
            Stage::Profiles => "profiles",
            Stage::Transitions => "transitions",
            Stage::Centrality => "centrality",
            Stage::Characterize => "characterize",
        }
    }
}

fn default_threshold() -> f64 {
    0.5
}
fn default_min_thread_size() -> usize {
    3
}
fn default_centrality_k() -> usize {
    50
}
fn default_centrality_s() -> usize {
    1
}
fn default_n_shuffles() -> usize {
    500
}
fn default_alpha() -> f64 {
    0.01
}
fn default_top_typical() -> usize {
    10
}

/// Everything a run needs: inputs, filters, thresholds, and seeds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub threads: PathBuf,
    pub users: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub texts: Option<PathBuf>,
    /// Lexicon TSV paths keyed by family.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lexicons: BTreeMap<LexiconFamily, PathBuf>,
    /// Catalog JSON; the built-in score/sentiment/toxicity catalog when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub community: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub months: Option<Vec<MonthKey>>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_min_thread_size")]
    pub min_thread_size: usize,
    #[serde(default)]
    pub omega: Vec<OmegaSpec>,
    #[serde(default = "default_centrality_k")]
    pub centrality_k: usize,
    #[serde(default = "default_centrality_s")]
    pub centrality_s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_incidence: Option<usize>,
    #[serde(default = "default_n_shuffles")]
    pub n_shuffles: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_top_typical")]
    pub top_typical: usize,
    #[serde(default)]
    pub word_count_scope: WordCountScope,
    #[serde(default)]
    pub typicality_form: TypicalityForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn new(threads: impl Into<PathBuf>, users: impl Into<PathBuf>) -> Self {
        Self {
            threads: threads.into(),
            users: users.into(),
            texts: None,
            lexicons: BTreeMap::new(),
            catalog: None,
            community: None,
            months: None,
            threshold: default_threshold(),
            min_thread_size: default_min_thread_size(),
            omega: Vec::new(),
            centrality_k: default_centrality_k(),
            centrality_s: default_centrality_s(),
            max_incidence: None,
            n_shuffles: default_n_shuffles(),
            alpha: default_alpha(),
            seed: 0,
            top_typical: default_top_typical(),
            word_count_scope: WordCountScope::default(),
            typicality_form: TypicalityForm::default(),
            cache_dir: None,
        }
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Serialize)]
struct InputRecord {
    path: PathBuf,
    fnv1a64: String,
}

/// Metadata JSON written next to the CSVs.
#[derive(Debug, Serialize)]
pub struct RunMetadata {
    pub created_at_unix: u64,
    pub seed: u64,
    pub n_shuffles: usize,
    pub alpha: f64,
    pub rng_algorithm: &'static str,
    pub config: PipelineConfig,
    inputs: BTreeMap<String, InputRecord>,
    pub months: Vec<MonthKey>,
    pub stages: Vec<String>,
    pub thread_users: usize,
    pub profiled_users: usize,
    pub coverage_missing: usize,
    pub omega_skipped_hyperedges: usize,
    pub warnings: Vec<String>,
}

/// Paths and counts returned to the caller.
#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct Ingested {
    loaded: LoadedThreads,
    users: UserTable,
    normalized: io::NormalizedUsers,
    texts: BTreeMap<MonthKey, HashMap<NodeId, Vec<String>>>,
    catalog: ArchetypeCatalog,
    thresholds: ThresholdVector,
    coverage_missing: Vec<String>,
    thread_user_count: usize,
}

fn ingest(config: &PipelineConfig) -> Result<Ingested> {
    let filter = ThreadFilter {
        community: config.community.clone(),
        months: config
            .months
            .as_ref()
            .map(|m| m.iter().copied().collect::<BTreeSet<_>>()),
    };
    let loaded = load_threads(&config.threads, &filter, config.min_thread_size)?;
    let mut interner = loaded.interner.clone();
    let users = load_users(&config.users, &mut interner)?;
    let texts = match &config.texts {
        Some(path) => load_texts(path, &mut interner)?,
        None => BTreeMap::new(),
    };
    let normalized = users.normalize_global()?;
    let catalog = match &config.catalog {
        Some(path) => ArchetypeCatalog::load_json(path)?,
        None => ArchetypeCatalog::score_sentiment_toxicity(),
    };
    let thresholds = catalog.thresholds(config.threshold);

    let profiled = users.users();
    let mut coverage_missing: Vec<String> = Vec::new();
    let mut thread_user_count = 0usize;
    if let Some(aggregate) = &loaded.series.aggregate {
        thread_user_count = aggregate.order();
        for &v in aggregate.nodes() {
            if !profiled.contains(&v) {
                coverage_missing.push(
                    interner
                        .name(v)
                        .unwrap_or("<unknown>")
                        .to_string(),
                );
            }
        }
    }
    coverage_missing.sort();
    Ok(Ingested {
        loaded,
        users,
        normalized,
        texts,
        catalog,
        thresholds,
        coverage_missing,
        thread_user_count,
    })
}

/// Aggregate-level archetype assignment for users in the aggregate
/// hypergraph, in interned-id order.
fn aggregate_assignments(ing: &Ingested) -> Result<Vec<(NodeId, String)>> {
    let mut out = Vec::new();
    let Some(aggregate) = &ing.loaded.series.aggregate else {
        return Ok(out);
    };
    for &v in aggregate.nodes() {
        if let Some(fv) = ing.normalized.aggregate.get(&v) {
            let archetype = assign(fv, &ing.normalized.schema, &ing.catalog, &ing.thresholds)?;
            out.push((v, archetype.name.clone()));
        }
    }
    Ok(out)
}

/// Per-month archetype assignment maps.
fn monthly_assignments(ing: &Ingested) -> Result<BTreeMap<MonthKey, HashMap<NodeId, String>>> {
    let mut out = BTreeMap::new();
    for (month, fvs) in &ing.normalized.per_month {
        let mut map = HashMap::with_capacity(fvs.len());
        for fv in fvs.values() {
            let archetype = assign(fv, &ing.normalized.schema, &ing.catalog, &ing.thresholds)?;
            map.insert(fv.user, archetype.name.clone());
        }
        out.insert(*month, map);
    }
    Ok(out)
}

fn write_stats(ing: &Ingested, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join(io::STATS_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::STATS_SCHEMA)?;
    let snapshots = ing.loaded.series.snapshots();
    for (i, (_, h)) in snapshots.iter().enumerate() {
        let s = h.summary_stats()?;
        let jaccard = snapshots
            .get(i + 1)
            .map(|(_, next)| jaccard_overlap(h.nodes(), next.nodes()));
        w.write_row(&[
            (i + 1).to_string(),
            s.n.to_string(),
            s.m.to_string(),
            s.max_edge_size.to_string(),
            s.mean_hyperdegree.to_string(),
            s.mean_degree.to_string(),
            opt_field(jaccard),
        ])?;
    }
    if let Some(aggregate) = &ing.loaded.series.aggregate {
        if aggregate.order() > 0 {
            let s = aggregate.summary_stats()?;
            w.write_row(&[
                "all".to_string(),
                s.n.to_string(),
                s.m.to_string(),
                s.max_edge_size.to_string(),
                s.mean_hyperdegree.to_string(),
                s.mean_degree.to_string(),
                String::new(),
            ])?;
        }
    }
    w.finish()?;
    Ok(path)
}

fn write_distributions(ing: &Ingested, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join(io::DISTRIBUTIONS_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::DISTRIBUTIONS_SCHEMA)?;
    if let Some(aggregate) = &ing.loaded.series.aggregate {
        if aggregate.order() > 0 {
            let d = aggregate.distributions()?;
            for (value, count) in &d.hyperdegree {
                w.write_row(&["hyperdegree", &value.to_string(), &count.to_string()])?;
            }
            for (value, count) in &d.edge_size {
                w.write_row(&["edge_size", &value.to_string(), &count.to_string()])?;
            }
        }
    }
    w.finish()?;
    Ok(path)
}

fn write_census(ing: &Ingested, out_dir: &Path) -> Result<(PathBuf, Vec<(NodeId, String)>)> {
    let assignments = aggregate_assignments(ing)?;
    let census = archetype_census(assignments.iter().map(|(_, n)| n.as_str()), &ing.catalog);
    let path = out_dir.join(io::CENSUS_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::CENSUS_SCHEMA)?;
    for (name, count) in census {
        w.write_row(&[name, count.to_string()])?;
    }
    w.finish()?;
    Ok((path, assignments))
}

fn write_profiles(
    ing: &Ingested,
    assignments: &[(NodeId, String)],
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<Option<PathBuf>> {
    if config.lexicons.is_empty() || ing.texts.is_empty() {
        return Ok(None);
    }
    // pool each user's texts across months
    let mut user_texts: HashMap<NodeId, Vec<String>> = HashMap::new();
    for monthly in ing.texts.values() {
        for (user, texts) in monthly {
            user_texts.entry(*user).or_default().extend(texts.clone());
        }
    }
    // rank members by typicality within each archetype, keeping only users
    // with texts so profiles are computable
    let mut members: BTreeMap<&str, Vec<FeatureVector>> = BTreeMap::new();
    for (user, archetype) in assignments {
        if user_texts.contains_key(user) {
            if let Some(fv) = ing.normalized.aggregate.get(user) {
                members.entry(archetype.as_str()).or_default().push(fv.clone());
            }
        }
    }
    let mut top_users: BTreeMap<&str, Vec<NodeId>> = BTreeMap::new();
    for archetype in ing.catalog.archetypes() {
        let Some(fvs) = members.get(archetype.name.as_str()) else {
            continue;
        };
        let top = top_k_typical(
            fvs,
            &ing.normalized.schema,
            &ing.catalog,
            archetype,
            config.top_typical,
            config.typicality_form,
        )?;
        top_users.insert(
            archetype.name.as_str(),
            top.entries.iter().map(|e| e.user).collect(),
        );
    }

    let path = out_dir.join(io::PROFILES_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::PROFILES_SCHEMA)?;
    for (family, lex_path) in &config.lexicons {
        let lex = Lexicon::load_tsv(lex_path, *family)?;
        let agg: TextAggregation = default_aggregation(*family);
        // population = every user with texts, so normalization is shared
        // across archetypes
        let mut population: Vec<(String, Vec<String>)> = user_texts
            .iter()
            .map(|(user, texts)| (user.to_string(), texts.clone()))
            .collect();
        population.sort_by(|a, b| a.0.cmp(&b.0));
        let user_index: HashMap<&str, usize> = population
            .iter()
            .enumerate()
            .map(|(i, (name, _))| (name.as_str(), i))
            .collect();
        let profiles = profile_population(&population, &lex, agg)?;
        for archetype in ing.catalog.archetypes() {
            let Some(users) = top_users.get(archetype.name.as_str()) else {
                continue;
            };
            if users.is_empty() {
                continue;
            }
            let mut means = vec![0.0; lex.dims.len()];
            for user in users {
                let profile = &profiles[user_index[user.to_string().as_str()]];
                for (m, v) in means.iter_mut().zip(&profile.values) {
                    *m += v;
                }
            }
            for m in &mut means {
                *m /= users.len() as f64;
            }
            for (dim, value) in lex.dims.iter().zip(&means) {
                w.write_row(&[
                    archetype.name.as_str(),
                    family.name(),
                    dim,
                    &value.to_string(),
                ])?;
            }
        }
    }
    w.finish()?;
    Ok(Some(path))
}

fn build_sequences(
    ing: &Ingested,
    monthly: &BTreeMap<MonthKey, HashMap<NodeId, String>>,
) -> Result<SequenceSet> {
    let archetype_names: Vec<String> = ing
        .catalog
        .archetypes()
        .iter()
        .map(|a| a.name.clone())
        .collect();
    let index: HashMap<&str, u32> = archetype_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i as u32))
        .collect();
    let mut per_user: BTreeMap<NodeId, Vec<(MonthKey, u32)>> = BTreeMap::new();
    for (month, map) in monthly {
        for (user, archetype) in map {
            per_user
                .entry(*user)
                .or_default()
                .push((*month, index[archetype.as_str()]));
        }
    }
    let sequences = per_user
        .into_iter()
        .map(|(user, mut steps)| {
            steps.sort_by_key(|(m, _)| *m);
            ArchetypeSequence::new(user, steps)
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceSet::new(archetype_names, sequences)
}

fn write_transitions(
    ing: &Ingested,
    monthly: &BTreeMap<MonthKey, HashMap<NodeId, String>>,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<PathBuf> {
    let set = build_sequences(ing, monthly)?;
    let observed = observed_transitions(&set)?;
    let null = null_model(&set, config.n_shuffles, config.seed)?;
    let report = significance(&observed, &null, config.alpha)?;
    let path = out_dir.join(io::TRANSITIONS_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::TRANSITIONS_SCHEMA)?;
    for cell in &report.cells {
        w.write_row(&[
            cell.from.clone(),
            cell.to.clone(),
            cell.observed.to_string(),
            cell.null_mean.to_string(),
            cell.null_std.to_string(),
            opt_field(cell.z),
            opt_field(cell.p_normal),
            cell.p_empirical.to_string(),
            cell.significant.to_string(),
        ])?;
    }
    w.finish()?;
    Ok(path)
}

fn write_centrality(
    ing: &Ingested,
    monthly: &BTreeMap<MonthKey, HashMap<NodeId, String>>,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<PathBuf> {
    let path = out_dir.join(io::CENTRAL_DISCUSSIONS_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::CENTRAL_DISCUSSIONS_SCHEMA)?;
    let empty_texts: HashMap<NodeId, Vec<String>> = HashMap::new();
    for (month, h) in ing.loaded.series.snapshots() {
        let opts = LineGraphOptions {
            min_shared: config.centrality_s,
            max_incidence: config.max_incidence,
        };
        let lg = match &config.cache_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let key = cache_key(h, config.centrality_s);
                let cache_path = dir.join(format!("linegraph-{key:016x}.bin"));
                if cache_path.exists() {
                    io::read_line_graph_cache(&cache_path)?
                } else {
                    let lg = build_line_graph(h, opts)?;
                    io::write_line_graph_cache(&cache_path, &lg)?;
                    lg
                }
            }
            None => build_line_graph(h, opts)?,
        };
        let scores = hyperedge_betweenness(&lg);
        let mut ranked = scores_by_edge(&lg, &scores);
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("betweenness is finite")
                .then(a.0.cmp(&b.0))
        });
        ranked.truncate(config.centrality_k);
        let texts = ing.texts.get(month).unwrap_or(&empty_texts);
        let subjectivity = ing.normalized.subjectivity.get(month);
        let archetypes = monthly.get(month).cloned().unwrap_or_default();
        let records = characterize_discussions(
            h,
            &ranked,
            DiscussionInputs {
                texts,
                subjectivity,
                archetypes: &archetypes,
            },
            config.word_count_scope,
        );
        for r in records {
            w.write_row(&[
                r.hyperedge.to_string(),
                r.betweenness.to_string(),
                r.rank.to_string(),
                opt_field(r.avg_word_count),
                opt_field(r.avg_unique_word_count),
                opt_field(r.avg_subjectivity),
                opt_field(r.archetype_purity),
                month.to_string(),
            ])?;
        }
    }
    w.finish()?;
    Ok(path)
}

fn cache_key(h: &Hypergraph, s: usize) -> u64 {
    // content hash over the edge structure plus the adjacency threshold
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&(s as u64).to_le_bytes());
    for e in h.hyperedges() {
        bytes.extend_from_slice(&e.id.0.to_le_bytes());
        for m in e.members() {
            bytes.extend_from_slice(&m.0.to_le_bytes());
        }
        bytes.push(0xff);
    }
    io::fnv1a64(&bytes)
}

fn write_omega(
    ing: &Ingested,
    assignments: &[(NodeId, String)],
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<(Option<PathBuf>, usize)> {
    if config.omega.is_empty() {
        return Ok((None, 0));
    }
    let Some(aggregate) = &ing.loaded.series.aggregate else {
        return Ok((None, 0));
    };
    // evaluation needs every member profiled; keep only fully covered
    // hyperedges and report the rest
    let mut features = NodeFeatures::new();
    let schema_names = ing.normalized.schema.names().to_vec();
    for (i, name) in schema_names.iter().enumerate() {
        let column: HashMap<NodeId, f64> = ing
            .normalized
            .aggregate
            .iter()
            .map(|(u, fv)| (*u, fv.values[i]))
            .collect();
        features.insert_numeric(name, column);
    }
    features.insert_categorical(
        "archetype",
        CategoricalColumn::from_values(assignments.iter().cloned()),
    );
    let profiled = ing.users.users();
    let covered: Vec<_> = aggregate
        .hyperedges()
        .iter()
        .filter(|e| e.members().iter().all(|m| profiled.contains(m)))
        .cloned()
        .collect();
    let skipped = aggregate.size() - covered.len();
    let sub = Hypergraph::from_hyperedges(covered);
    let rows = evaluate_all(&sub, &config.omega, &features)?;
    let path = out_dir.join(io::OMEGA_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::OMEGA_SCHEMA)?;
    for row in rows {
        w.write_row(&[
            row.hyperedge.to_string(),
            row.label.clone(),
            row.value.to_string(),
        ])?;
    }
    w.finish()?;
    Ok((Some(path), skipped))
}

fn write_coverage(ing: &Ingested, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join(io::COVERAGE_SCHEMA.name);
    let mut w = SchemaWriter::create(&path, io::COVERAGE_SCHEMA)?;
    for name in &ing.coverage_missing {
        w.write_row(&[name])?;
    }
    w.finish()?;
    Ok(path)
}

/// Run the selected stages and write outputs into `out_dir`.
pub fn run_pipeline(
    config: &PipelineConfig,
    out_dir: &Path,
    stages: &[Stage],
) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let stages: BTreeSet<Stage> = stages.iter().copied().collect();
    let ing = ingest(config).map_err(|e| e.in_stage("ingest"))?;
    let mut written = Vec::new();
    let mut warnings = ing.loaded.warnings.clone();
    warnings.extend(ing.users.warnings.clone());

    written.push(write_coverage(&ing, out_dir).map_err(|e| e.in_stage("ingest"))?);

    if stages.contains(&Stage::Stats) {
        written.push(write_stats(&ing, out_dir).map_err(|e| e.in_stage("stats"))?);
    }
    if stages.contains(&Stage::Distributions) {
        written
            .push(write_distributions(&ing, out_dir).map_err(|e| e.in_stage("distributions"))?);
    }

    let needs_assignments = stages.contains(&Stage::Archetypes)
        || stages.contains(&Stage::Profiles)
        || stages.contains(&Stage::Characterize);
    let mut assignments = Vec::new();
    if needs_assignments {
        let (path, a) = write_census(&ing, out_dir).map_err(|e| e.in_stage("archetypes"))?;
        assignments = a;
        if stages.contains(&Stage::Archetypes) {
            written.push(path);
        }
    }

    if stages.contains(&Stage::Profiles) {
        match write_profiles(&ing, &assignments, config, out_dir)
            .map_err(|e| e.in_stage("profiles"))?
        {
            Some(path) => written.push(path),
            None => warnings
                .push("profiles: no texts or lexicons configured, stage skipped".to_string()),
        }
    }

    let needs_monthly =
        stages.contains(&Stage::Transitions) || stages.contains(&Stage::Centrality);
    let monthly = if needs_monthly {
        monthly_assignments(&ing).map_err(|e| e.in_stage("archetypes"))?
    } else {
        BTreeMap::new()
    };

    if stages.contains(&Stage::Transitions) {
        written.push(
            write_transitions(&ing, &monthly, config, out_dir)
                .map_err(|e| e.in_stage("transitions"))?,
        );
    }
    if stages.contains(&Stage::Centrality) {
        written.push(
            write_centrality(&ing, &monthly, config, out_dir)
                .map_err(|e| e.in_stage("centrality"))?,
        );
    }

    let mut omega_skipped = 0usize;
    if stages.contains(&Stage::Characterize) {
        let (path, skipped) = write_omega(&ing, &assignments, config, out_dir)
            .map_err(|e| e.in_stage("characterize"))?;
        omega_skipped = skipped;
        match path {
            Some(p) => written.push(p),
            None => warnings.push("characterize: no omega specs configured, stage skipped".into()),
        }
    }

    let mut inputs = BTreeMap::new();
    inputs.insert(
        "threads".to_string(),
        InputRecord {
            path: config.threads.clone(),
            fnv1a64: format!("{:016x}", file_hash(&config.threads)?),
        },
    );
    inputs.insert(
        "users".to_string(),
        InputRecord {
            path: config.users.clone(),
            fnv1a64: format!("{:016x}", file_hash(&config.users)?),
        },
    );
    if let Some(texts) = &config.texts {
        inputs.insert(
            "texts".to_string(),
            InputRecord {
                path: texts.clone(),
                fnv1a64: format!("{:016x}", file_hash(texts)?),
            },
        );
    }
    let metadata = RunMetadata {
        created_at_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        seed: config.seed,
        n_shuffles: config.n_shuffles,
        alpha: config.alpha,
        rng_algorithm: RNG_ALGORITHM,
        config: config.clone(),
        inputs,
        months: ing.loaded.series.months().collect(),
        stages: stages.iter().map(|s| s.name().to_string()).collect(),
        thread_users: ing.thread_user_count,
        profiled_users: ing.users.users().len(),
        coverage_missing: ing.coverage_missing.len(),
        omega_skipped_hyperedges: omega_skipped,
        warnings: warnings.clone(),
    };
    let metadata_path = out_dir.join("run_metadata.json");
    std::fs::write(&metadata_path, serde_json::to_string_pretty(&metadata)?)?;
    written.push(metadata_path);

    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        written,
        warnings,
    })
}
