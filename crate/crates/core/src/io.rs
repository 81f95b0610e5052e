//! Dataset file formats: thread/user CSV loaders, schema-validated output
//! writers, and a small binary cache for line graphs.
//!
//! Threads arrive as `thread_id,community,year,month,members` rows with
//! semicolon-separated member lists; user profiles as
//! `user_id,year,month,score,sentiment,toxicity[,extra...]`. Both loaders
//! fail hard on malformed rows (with line numbers) and collect warnings
//! for unknown columns.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureVector, Normalizer};
use crate::hypergraph::{
    EdgeId, EdgeMeta, Hyperedge, Hypergraph, MonthKey, NodeId, NodeInterner, SnapshotSeries,
};

/// Checked-in descriptor every emitted CSV is validated against.
#[derive(Clone, Copy, Debug)]
pub struct CsvSchema {
    pub name: &'static str,
    pub columns: &'static [&'static str],
}

pub const THREADS_SCHEMA: CsvSchema = CsvSchema {
    name: "threads.csv",
    columns: &["thread_id", "community", "year", "month", "members"],
};

pub const USERS_SCHEMA: CsvSchema = CsvSchema {
    name: "users.csv",
    columns: &[
        "user_id",
        "year",
        "month",
        "score",
        "sentiment",
        "toxicity",
        "n_posts",
        "subjectivity",
    ],
};

pub const TEXTS_SCHEMA: CsvSchema = CsvSchema {
    name: "texts.csv",
    columns: &["user_id", "year", "month", "text"],
};

pub const STATS_SCHEMA: CsvSchema = CsvSchema {
    name: "stats.csv",
    columns: &[
        "t",
        "n",
        "m",
        "max_edge_size",
        "mean_hyperdegree",
        "mean_degree",
        "jaccard_next",
    ],
};

pub const DISTRIBUTIONS_SCHEMA: CsvSchema = CsvSchema {
    name: "distributions.csv",
    columns: &["kind", "value", "count"],
};

pub const CENSUS_SCHEMA: CsvSchema = CsvSchema {
    name: "archetype_census.csv",
    columns: &["archetype", "count"],
};

pub const PROFILES_SCHEMA: CsvSchema = CsvSchema {
    name: "profiles.csv",
    columns: &["subject", "family", "dim", "value"],
};

pub const TRANSITIONS_SCHEMA: CsvSchema = CsvSchema {
    name: "transitions.csv",
    columns: &[
        "from",
        "to",
        "obs",
        "null_mean",
        "null_std",
        "z",
        "p_normal",
        "p_empirical",
        "significant",
    ],
};

pub const CENTRAL_DISCUSSIONS_SCHEMA: CsvSchema = CsvSchema {
    name: "central_discussions.csv",
    columns: &[
        "hyperedge_id",
        "betweenness",
        "rank",
        "avg_word_count",
        "avg_unique_word_count",
        "avg_subjectivity",
        "archetype_purity",
        "month",
    ],
};

pub const OMEGA_SCHEMA: CsvSchema = CsvSchema {
    name: "omega.csv",
    columns: &["hyperedge_id", "kind", "value"],
};

pub const COVERAGE_SCHEMA: CsvSchema = CsvSchema {
    name: "coverage.csv",
    columns: &["user_id"],
};

/// CSV writer that pins its header to a schema and validates row widths.
pub struct SchemaWriter {
    schema: CsvSchema,
    inner: csv::Writer<std::fs::File>,
}

impl SchemaWriter {
    pub fn create(path: &Path, schema: CsvSchema) -> Result<Self> {
        let file = std::fs::File::create(path)?;
        let mut inner = csv::Writer::from_writer(file);
        inner.write_record(schema.columns)?;
        Ok(Self { schema, inner })
    }

    pub fn write_row<S: AsRef<str>>(&mut self, row: &[S]) -> Result<()> {
        if row.len() != self.schema.columns.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} expects {} columns, row has {}",
                self.schema.name,
                self.schema.columns.len(),
                row.len()
            )));
        }
        self.inner
            .write_record(row.iter().map(|s| s.as_ref()))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Format an optional float; `None` becomes an empty field.
pub fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Community/month restriction applied at ingestion.
#[derive(Clone, Debug, Default)]
pub struct ThreadFilter {
    pub community: Option<String>,
    pub months: Option<BTreeSet<MonthKey>>,
}

impl ThreadFilter {
    fn accepts(&self, community: &str, month: MonthKey) -> bool {
        if let Some(c) = &self.community {
            if c != community {
                return false;
            }
        }
        if let Some(months) = &self.months {
            if !months.contains(&month) {
                return false;
            }
        }
        true
    }
}

/// Ingested snapshots plus the aggregate and interner.
#[derive(Debug)]
pub struct LoadedThreads {
    pub series: SnapshotSeries,
    pub interner: NodeInterner,
    pub warnings: Vec<String>,
    /// Threads dropped by the minimum-size rule.
    pub dropped_small: usize,
}

fn parse_month(year: &str, month: &str, line: u64) -> Result<MonthKey> {
    let year: i32 = year.trim().parse().map_err(|_| Error::MalformedRow {
        line,
        message: format!("bad year '{year}'"),
    })?;
    let month_num: u8 = month.trim().parse().map_err(|_| Error::MalformedRow {
        line,
        message: format!("bad month '{month}'"),
    })?;
    if !(1..=12).contains(&month_num) {
        return Err(Error::MalformedRow {
            line,
            message: format!("month {month_num} outside 1..=12"),
        });
    }
    Ok(MonthKey {
        year,
        month: month_num,
    })
}

/// Load threads, apply community/month filtering, deduplicate members,
/// drop threads below `min_size`, and assemble monthly snapshots plus the
/// thread-union aggregate.
pub fn load_threads(path: &Path, filter: &ThreadFilter, min_size: usize) -> Result<LoadedThreads> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut warnings = Vec::new();
    let mut col = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        match name {
            "thread_id" | "community" | "year" | "month" | "members" => {
                col.insert(name.to_string(), i);
            }
            other => warnings.push(format!("threads: unknown column '{other}' ignored")),
        }
    }
    for required in THREADS_SCHEMA.columns {
        if !col.contains_key(*required) {
            return Err(Error::MissingColumn(required.to_string()));
        }
    }

    let mut interner = NodeInterner::new();
    let mut by_month: BTreeMap<MonthKey, Vec<Hyperedge>> = BTreeMap::new();
    let mut all: Vec<Hyperedge> = Vec::new();
    let mut dropped_small = 0usize;
    let mut next_id = 0u32;
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        let field = |name: &str| -> Result<&str> {
            record.get(col[name]).ok_or(Error::MalformedRow {
                line,
                message: format!("missing field '{name}'"),
            })
        };
        let community = field("community")?.to_string();
        let month = parse_month(field("year")?, field("month")?, line)?;
        if !filter.accepts(&community, month) {
            continue;
        }
        let members_raw = field("members")?;
        let members: Vec<NodeId> = members_raw
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|name| interner.intern(name))
            .collect();
        if members.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "thread has no members".into(),
            });
        }
        let meta = EdgeMeta {
            community: Some(community),
            month: Some(month),
        };
        let edge = Hyperedge::new(EdgeId(next_id), members, meta)?;
        next_id += 1;
        if edge.size() < min_size {
            dropped_small += 1;
            continue;
        }
        by_month.entry(month).or_default().push(edge.clone());
        all.push(edge);
    }

    if all.is_empty() {
        warnings.push(format!(
            "threads: no threads of size >= {min_size} survived filtering"
        ));
    }
    let mut series = SnapshotSeries::new();
    for (month, edges) in by_month {
        series.push(month, Hypergraph::from_hyperedges(edges))?;
    }
    series.aggregate = Some(Hypergraph::from_hyperedges(all));
    Ok(LoadedThreads {
        series,
        interner,
        warnings,
        dropped_small,
    })
}

/// One user-month profile row, raw (pre-normalization).
#[derive(Clone, Debug, PartialEq)]
pub struct UserRecord {
    pub user: NodeId,
    pub month: MonthKey,
    pub score: f64,
    pub sentiment: f64,
    pub toxicity: f64,
    /// Activity weight for aggregation (`n_posts` column; defaults to 1).
    pub weight: f64,
    pub subjectivity: Option<f64>,
}

/// Loaded user profiles keyed into months.
pub struct UserTable {
    pub records: Vec<UserRecord>,
    pub warnings: Vec<String>,
}

/// Feature names this toolkit's default catalog runs on.
pub const CORE_FEATURES: [&str; 3] = ["score", "sentiment", "toxicity"];

impl UserTable {
    /// Users present in the table.
    pub fn users(&self) -> HashSet<NodeId> {
        self.records.iter().map(|r| r.user).collect()
    }

    /// Fit one global normalizer per feature over every user-month value,
    /// then emit normalized per-month vectors plus activity-weighted
    /// per-user aggregates (normalized with the same fit, so labels stay
    /// comparable across snapshots).
    pub fn normalize_global(&self) -> Result<NormalizedUsers> {
        if self.records.is_empty() {
            return Err(Error::EmptyInput("user table"));
        }
        let columns: [Vec<f64>; 3] = [
            self.records.iter().map(|r| r.score).collect(),
            self.records.iter().map(|r| r.sentiment).collect(),
            self.records.iter().map(|r| r.toxicity).collect(),
        ];
        let normalizers: Vec<Normalizer> = columns
            .iter()
            .map(|c| Normalizer::fit(c))
            .collect::<Result<Vec<_>>>()?;

        let schema = FeatureSchema::numeric(&CORE_FEATURES);
        let mut per_month: BTreeMap<MonthKey, HashMap<NodeId, FeatureVector>> = BTreeMap::new();
        let mut sums: HashMap<NodeId, ([f64; 3], f64)> = HashMap::new();
        let mut subjectivity: BTreeMap<MonthKey, HashMap<NodeId, f64>> = BTreeMap::new();
        for r in &self.records {
            let values = vec![
                normalizers[0].apply(r.score),
                normalizers[1].apply(r.sentiment),
                normalizers[2].apply(r.toxicity),
            ];
            per_month
                .entry(r.month)
                .or_default()
                .insert(r.user, FeatureVector::new(r.user, values));
            let entry = sums.entry(r.user).or_insert(([0.0; 3], 0.0));
            entry.0[0] += r.score * r.weight;
            entry.0[1] += r.sentiment * r.weight;
            entry.0[2] += r.toxicity * r.weight;
            entry.1 += r.weight;
            if let Some(s) = r.subjectivity {
                subjectivity.entry(r.month).or_default().insert(r.user, s);
            }
        }
        let aggregate = sums
            .into_iter()
            .map(|(user, (totals, weight))| {
                let values = (0..3)
                    .map(|i| normalizers[i].apply(totals[i] / weight))
                    .collect();
                (user, FeatureVector::new(user, values))
            })
            .collect();
        Ok(NormalizedUsers {
            schema,
            normalizers,
            per_month,
            aggregate,
            subjectivity,
        })
    }
}

/// Globally normalized per-month and aggregate feature vectors.
pub struct NormalizedUsers {
    pub schema: FeatureSchema,
    pub normalizers: Vec<Normalizer>,
    pub per_month: BTreeMap<MonthKey, HashMap<NodeId, FeatureVector>>,
    pub aggregate: HashMap<NodeId, FeatureVector>,
    pub subjectivity: BTreeMap<MonthKey, HashMap<NodeId, f64>>,
}

/// Load user profiles; member names are interned against the thread
/// interner so the two files join on user id.
pub fn load_users(path: &Path, interner: &mut NodeInterner) -> Result<UserTable> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut warnings = Vec::new();
    let mut col: HashMap<String, usize> = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        match name {
            "user_id" | "year" | "month" | "score" | "sentiment" | "toxicity" | "n_posts"
            | "subjectivity" => {
                col.insert(name.to_string(), i);
            }
            other => warnings.push(format!("users: unknown column '{other}' ignored")),
        }
    }
    for required in ["user_id", "year", "month", "score", "sentiment", "toxicity"] {
        if !col.contains_key(required) {
            return Err(Error::MissingColumn(required.to_string()));
        }
    }
    let mut records = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        let field = |name: &str| -> Result<&str> {
            record.get(col[name]).ok_or(Error::MalformedRow {
                line,
                message: format!("missing field '{name}'"),
            })
        };
        let parse_num = |name: &str| -> Result<f64> {
            let raw = field(name)?;
            let v: f64 = raw.trim().parse().map_err(|_| Error::MalformedRow {
                line,
                message: format!("bad {name} '{raw}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedRow {
                    line,
                    message: format!("{name} must be finite, got {v}"),
                });
            }
            Ok(v)
        };
        let user = interner.intern(field("user_id")?);
        let month = parse_month(field("year")?, field("month")?, line)?;
        let weight = match col.get("n_posts") {
            Some(_) => {
                let w = parse_num("n_posts")?;
                if w <= 0.0 {
                    return Err(Error::MalformedRow {
                        line,
                        message: format!("n_posts must be positive, got {w}"),
                    });
                }
                w
            }
            None => 1.0,
        };
        let subjectivity = match col.get("subjectivity") {
            Some(&i) => {
                let raw = record.get(i).unwrap_or("");
                if raw.is_empty() {
                    None
                } else {
                    Some(parse_num("subjectivity")?)
                }
            }
            None => None,
        };
        records.push(UserRecord {
            user,
            month,
            score: parse_num("score")?,
            sentiment: parse_num("sentiment")?,
            toxicity: parse_num("toxicity")?,
            weight,
            subjectivity,
        });
    }
    Ok(UserTable { records, warnings })
}

/// Per-user-month texts for lexicon profiling and discussion word counts.
pub fn load_texts(
    path: &Path,
    interner: &mut NodeInterner,
) -> Result<BTreeMap<MonthKey, HashMap<NodeId, Vec<String>>>> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut col = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        col.insert(name.to_string(), i);
    }
    for required in TEXTS_SCHEMA.columns {
        if !col.contains_key(*required) {
            return Err(Error::MissingColumn(required.to_string()));
        }
    }
    let mut out: BTreeMap<MonthKey, HashMap<NodeId, Vec<String>>> = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record?;
        let get = |name: &str| -> Result<&str> {
            record.get(col[name]).ok_or(Error::MalformedRow {
                line,
                message: format!("missing field '{name}'"),
            })
        };
        let user = interner.intern(get("user_id")?);
        let month = parse_month(get("year")?, get("month")?, line)?;
        out.entry(month)
            .or_default()
            .entry(user)
            .or_default()
            .push(get("text")?.to_string());
    }
    Ok(out)
}

/// FNV-1a content hash used to key cached artifacts.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

pub fn file_hash(path: &Path) -> Result<u64> {
    Ok(fnv1a64(&std::fs::read(path)?))
}

const LINE_GRAPH_MAGIC: &[u8; 8] = b"HRLGRPH1";

/// Serialize a line graph's vertex ids and edge list to a compact binary
/// index file.
pub fn write_line_graph_cache(path: &Path, lg: &crate::centrality::LineGraph) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(LINE_GRAPH_MAGIC);
    buf.extend_from_slice(&(lg.min_shared as u64).to_le_bytes());
    buf.extend_from_slice(&(lg.vertex_count() as u64).to_le_bytes());
    for v in lg.vertices() {
        buf.extend_from_slice(&v.0.to_le_bytes());
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for a in 0..lg.vertex_count() {
        for &b in lg.neighbors(a) {
            if (a as u32) < b {
                edges.push((a as u32, b));
            }
        }
    }
    buf.extend_from_slice(&(edges.len() as u64).to_le_bytes());
    for (a, b) in edges {
        buf.extend_from_slice(&a.to_le_bytes());
        buf.extend_from_slice(&b.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Read a cached line graph back; errors on magic or length mismatch.
pub fn read_line_graph_cache(path: &Path) -> Result<crate::centrality::LineGraph> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
        if *pos + n > bytes.len() {
            return Err(Error::InvalidValue("truncated line-graph cache".into()));
        }
        let s = &bytes[*pos..*pos + n];
        *pos += n;
        Ok(s)
    };
    if take(&mut pos, 8)? != LINE_GRAPH_MAGIC {
        return Err(Error::InvalidValue("bad line-graph cache magic".into()));
    }
    let read_u64 = |pos: &mut usize| -> Result<u64> {
        Ok(u64::from_le_bytes(take(pos, 8)?.try_into().unwrap()))
    };
    let read_u32 = |pos: &mut usize| -> Result<u32> {
        Ok(u32::from_le_bytes(take(pos, 4)?.try_into().unwrap()))
    };
    let min_shared = read_u64(&mut pos)? as usize;
    let n = read_u64(&mut pos)? as usize;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        vertices.push(EdgeId(read_u32(&mut pos)?));
    }
    let m = read_u64(&mut pos)? as usize;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let a = read_u32(&mut pos)?;
        let b = read_u32(&mut pos)?;
        if a as usize >= n || b as usize >= n {
            return Err(Error::InvalidValue("line-graph cache index overflow".into()));
        }
        edges.push((a, b));
    }
    Ok(crate::centrality::LineGraph::from_parts(
        vertices, edges, min_shared,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{build_line_graph, LineGraphOptions};
    use crate::hypergraph::toy_hypergraph;

    fn write_tmp(content: &str, name: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        std::fs::write(&path, content).unwrap();
        (dir, path)
    }

    #[test]
    fn load_threads_filters_and_dedups() {
        let csv = "thread_id,community,year,month,members\n\
                   t1,c/alpha,2023,1,u1;u2;u3\n\
                   t2,c/alpha,2023,1,u1;u1;u2\n\
                   t3,c/beta,2023,1,u4;u5;u6\n\
                   t4,c/alpha,2023,2,u2;u3;u4;u4\n";
        let (_d, path) = write_tmp(csv, "threads.csv");
        let filter = ThreadFilter {
            community: Some("c/alpha".into()),
            months: None,
        };
        let loaded = load_threads(&path, &filter, 3).unwrap();
        // t2 dedups to size 2 and is dropped; t3 is another community
        assert_eq!(loaded.dropped_small, 1);
        assert_eq!(loaded.series.len(), 2);
        let aggregate = loaded.series.aggregate.as_ref().unwrap();
        assert_eq!(aggregate.size(), 2);
        // t4 dedups u4
        let (_, h2) = &loaded.series.snapshots()[1];
        assert_eq!(h2.hyperedges()[0].size(), 3);
        // aggregate node set is the union of the snapshot node sets
        let mut union: Vec<_> = loaded
            .series
            .snapshots()
            .iter()
            .flat_map(|(_, h)| h.nodes().iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        assert_eq!(aggregate.nodes(), union.as_slice());
    }

    #[test]
    fn load_threads_warns_when_everything_drops() {
        let csv = "thread_id,community,year,month,members\n\
                   t1,c/a,2023,1,u1;u2\n";
        let (_d, path) = write_tmp(csv, "threads.csv");
        let loaded = load_threads(&path, &ThreadFilter::default(), 3).unwrap();
        assert!(loaded.series.is_empty() || loaded.series.aggregate.as_ref().unwrap().size() == 0);
        assert!(loaded.warnings.iter().any(|w| w.contains("survived")));
    }

    #[test]
    fn load_threads_rejects_malformed_rows() {
        let csv = "thread_id,community,year,month,members\n\
                   t1,c/a,2023,13,u1;u2;u3\n";
        let (_d, path) = write_tmp(csv, "threads.csv");
        let err = load_threads(&path, &ThreadFilter::default(), 3);
        match err {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn load_threads_unknown_column_warns() {
        let csv = "thread_id,community,year,month,members,bonus\n\
                   t1,c/a,2023,1,u1;u2;u3,x\n";
        let (_d, path) = write_tmp(csv, "threads.csv");
        let loaded = load_threads(&path, &ThreadFilter::default(), 3).unwrap();
        assert!(loaded.warnings.iter().any(|w| w.contains("bonus")));
    }

    #[test]
    fn load_users_requires_toxicity() {
        let csv = "user_id,year,month,score,sentiment\nu1,2023,1,0.5,0.5\n";
        let (_d, path) = write_tmp(csv, "users.csv");
        let mut interner = NodeInterner::new();
        assert!(matches!(
            load_users(&path, &mut interner),
            Err(Error::MissingColumn(c)) if c == "toxicity"
        ));
    }

    #[test]
    fn load_users_parses_and_normalizes() {
        let csv = "user_id,year,month,score,sentiment,toxicity,n_posts\n\
                   u1,2023,1,10,-0.5,0.2,3\n\
                   u1,2023,2,20,0.5,0.4,1\n\
                   u2,2023,1,0,-1,0,2\n\
                   u2,2023,2,40,1,0.8,2\n";
        let (_d, path) = write_tmp(csv, "users.csv");
        let mut interner = NodeInterner::new();
        let table = load_users(&path, &mut interner).unwrap();
        assert_eq!(table.records.len(), 4);
        let normalized = table.normalize_global().unwrap();
        // score normalizer spans [0, 40]
        let u1 = interner.get("u1").unwrap();
        let m1 = MonthKey {
            year: 2023,
            month: 1,
        };
        let fv = &normalized.per_month[&m1][&u1];
        assert!((fv.values[0] - 0.25).abs() < 1e-12);
        // sentiment spans [-1, 1]: -0.5 -> 0.25
        assert!((fv.values[1] - 0.25).abs() < 1e-12);
        // aggregate is activity-weighted: (10*3 + 20*1)/4 = 12.5 -> 0.3125
        let agg = &normalized.aggregate[&u1];
        assert!((agg.values[0] - 0.3125).abs() < 1e-12);
        // out-of-range raw values are accepted and mapped into [0, 1]
        for fvs in normalized.per_month.values() {
            for fv in fvs.values() {
                for &v in &fv.values {
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn users_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("users.csv");
        let mut w = SchemaWriter::create(&path, USERS_SCHEMA).unwrap();
        let score = 0.123456789012345f64;
        w.write_row(&[
            "u1".to_string(),
            "2023".to_string(),
            "1".to_string(),
            score.to_string(),
            (-0.5f64).to_string(),
            0.25f64.to_string(),
            "2".to_string(),
            0.75f64.to_string(),
        ])
        .unwrap();
        w.finish().unwrap();
        let mut interner = NodeInterner::new();
        let table = load_users(&path, &mut interner).unwrap();
        assert_eq!(table.records[0].score, score);
        assert_eq!(table.records[0].subjectivity, Some(0.75));
    }

    #[test]
    fn schema_writer_validates_width() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("census.csv");
        let mut w = SchemaWriter::create(&path, CENSUS_SCHEMA).unwrap();
        assert!(w.write_row(&["only-one"]).is_err());
        w.write_row(&["Community Hero", "3"]).unwrap();
        w.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("archetype,count\n"));
    }

    #[test]
    fn line_graph_cache_round_trips() {
        let (h, _) = toy_hypergraph();
        let lg = build_line_graph(&h, LineGraphOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lg.bin");
        write_line_graph_cache(&path, &lg).unwrap();
        let back = read_line_graph_cache(&path).unwrap();
        assert_eq!(back.vertex_count(), lg.vertex_count());
        assert_eq!(back.edge_count(), lg.edge_count());
        assert_eq!(back.min_shared, lg.min_shared);
        for a in 0..lg.vertex_count() {
            assert_eq!(back.neighbors(a), lg.neighbors(a));
        }
    }

    #[test]
    fn fnv_hash_is_stable() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), fnv1a64(b"a"));
        assert_ne!(fnv1a64(b"a"), fnv1a64(b"b"));
    }
}
