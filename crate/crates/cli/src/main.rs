//! Command-line frontend: ingest datasets, run individual pipeline stages
//! or the full run, and generate synthetic fixtures.
//!
//! Exit codes: 0 on success, 2 for input/config errors, 3 for downstream
//! stage failures. With `--json-errors`, failures are also reported as a
//! JSON object on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperrole::archetypes::ArchetypeCatalog;
use hyperrole::error::{Error, Result};
use hyperrole::hypergraph::MonthKey;
use hyperrole::pipeline::{run_pipeline, PipelineConfig, Stage};
use hyperrole::synth::{generate_files, PlantedTransition, SynthSpec};

#[derive(Parser)]
#[command(
    name = "hyperrole",
    about = "Hypergraph analytics for threaded social platforms",
    version
)]
struct Cli {
    /// Emit a machine-readable JSON error object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline config JSON (inputs, catalog, thresholds, seeds).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSVs and run metadata.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the community filter.
    #[arg(long)]
    community: Option<String>,
    /// Restrict to months, comma separated (e.g. 2023-01,2023-02).
    #[arg(long, value_delimiter = ',')]
    months: Vec<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory for the generated fixture files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    users: usize,
    #[arg(long, default_value_t = 6)]
    months: u8,
    #[arg(long, default_value_t = 150)]
    threads_per_month: usize,
    #[arg(long, default_value_t = 3)]
    size_min: usize,
    #[arg(long, default_value_t = 8)]
    size_max: usize,
    /// Also generate texts.csv plus synthetic lexicons.
    #[arg(long)]
    with_texts: bool,
    #[arg(long)]
    community: Option<String>,
    /// Planted transition boost as FROM:TO:BOOST over archetype indices.
    #[arg(long)]
    planted: Option<String>,
    /// Write a ready-to-run pipeline config JSON next to the fixtures.
    #[arg(long)]
    emit_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate inputs and write the coverage report.
    Ingest(StageArgs),
    /// Summary statistics per snapshot plus the aggregate.
    Stats(StageArgs),
    /// Hyperdegree and hyperedge-size histograms.
    Distributions(StageArgs),
    /// Archetype census over the aggregate assignment.
    Archetypes(StageArgs),
    /// Lexicon profiles of each archetype's most typical users.
    Profiles(StageArgs),
    /// Observed transition probabilities with null-model significance.
    Transitions(StageArgs),
    /// Line-graph betweenness ranking with discussion features.
    Centrality(StageArgs),
    /// Batch hyperedge characterization values.
    Characterize(StageArgs),
    /// Generate a synthetic fixture dataset.
    Synth(SynthArgs),
    /// Run the full pipeline.
    Run(StageArgs),
}

fn parse_month(raw: &str) -> Result<MonthKey> {
    let (year, month) = raw
        .split_once('-')
        .ok_or_else(|| Error::InvalidValue(format!("month '{raw}' is not YYYY-MM")))?;
    let year: i32 = year
        .parse()
        .map_err(|_| Error::InvalidValue(format!("bad year in '{raw}'")))?;
    let month: u8 = month
        .parse()
        .map_err(|_| Error::InvalidValue(format!("bad month in '{raw}'")))?;
    if !(1..=12).contains(&month) {
        return Err(Error::InvalidValue(format!("month in '{raw}' outside 1..=12")));
    }
    Ok(MonthKey { year, month })
}

fn load_config(args: &StageArgs) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::load_json(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(community) = &args.community {
        config.community = Some(community.clone());
    }
    if !args.months.is_empty() {
        let months = args
            .months
            .iter()
            .map(|m| parse_month(m))
            .collect::<Result<Vec<_>>>()?;
        config.months = Some(months);
    }
    Ok(config)
}

fn run_stages(args: &StageArgs, stages: &[Stage]) -> Result<()> {
    let config = load_config(args)?;
    let summary = run_pipeline(&config, &args.out, stages)?;
    for path in &summary.written {
        println!("wrote {}", path.display());
    }
    for warning in &summary.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(())
}

fn parse_planted(raw: &str) -> Result<PlantedTransition> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidValue(format!(
            "planted transition '{raw}' is not FROM:TO:BOOST"
        )));
    }
    Ok(PlantedTransition {
        from: parts[0]
            .parse()
            .map_err(|_| Error::InvalidValue(format!("bad FROM in '{raw}'")))?,
        to: parts[1]
            .parse()
            .map_err(|_| Error::InvalidValue(format!("bad TO in '{raw}'")))?,
        boost: parts[2]
            .parse()
            .map_err(|_| Error::InvalidValue(format!("bad BOOST in '{raw}'")))?,
    })
}

fn run_synth(args: &SynthArgs) -> Result<()> {
    let catalog = ArchetypeCatalog::score_sentiment_toxicity();
    let mut spec = SynthSpec {
        users: args.users,
        months: args.months,
        threads_per_month: args.threads_per_month,
        size_min: args.size_min,
        size_max: args.size_max,
        with_texts: args.with_texts,
        seed: args.seed,
        ..Default::default()
    };
    if let Some(community) = &args.community {
        spec.community = community.clone();
    }
    if let Some(planted) = &args.planted {
        spec.planted = Some(parse_planted(planted)?);
    }
    let out = generate_files(&spec, &catalog, &args.out)?;
    println!("wrote {}", out.threads.display());
    println!("wrote {}", out.users.display());
    if let Some(texts) = &out.texts {
        println!("wrote {}", texts.display());
    }
    if args.emit_config {
        let mut config = PipelineConfig::new(&out.threads, &out.users);
        config.texts = out.texts.clone();
        if let Some(lex) = &out.lexicons {
            config.lexicons = lex.clone().into_iter().collect();
        }
        config.seed = args.seed;
        let path = args.out.join("config.json");
        std::fs::write(&path, serde_json::to_string_pretty(&config)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest(args) => run_stages(args, &[]),
        Command::Stats(args) => run_stages(args, &[Stage::Stats]),
        Command::Distributions(args) => run_stages(args, &[Stage::Distributions]),
        Command::Archetypes(args) => run_stages(args, &[Stage::Archetypes]),
        Command::Profiles(args) => run_stages(args, &[Stage::Profiles]),
        Command::Transitions(args) => run_stages(args, &[Stage::Transitions]),
        Command::Centrality(args) => run_stages(args, &[Stage::Centrality]),
        Command::Characterize(args) => run_stages(args, &[Stage::Characterize]),
        Command::Synth(args) => run_synth(args),
        Command::Run(args) => run_stages(args, &Stage::ALL),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err.exit_code();
            if cli.json_errors {
                let payload = serde_json::json!({
                    "error": err.to_string(),
                    "stage": err.stage(),
                    "exit_code": code,
                });
                eprintln!("{payload}");
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(code as u8)
        }
    }
}
