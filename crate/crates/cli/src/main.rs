//! Pipeline driver: each subcommand runs one stage and leaves its
//! artifacts in the output directory for the next stage to pick up.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error,
//! 3 internal invariant violation.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use veclogic::align::{self, AlignError, QuadSource, Quadruple};
use veclogic::embed::{
    load_table, load_vocab_meta, save_table, save_vocab_meta, sentences_from_text,
    train_with_report, EmbedError, EmbeddingTable,
};
use veclogic::graph::{GraphBuilder, GraphError, KnowledgeGraph};
use veclogic::guide::{self, GuideError};
use veclogic::intensional::{int_difference, PatEvaluator};
use veclogic::parse::{export_graph_tsv, lower_to_statements, parse_graph_tsv, parse_sexpr};
use veclogic::planted::{generate_planted_graph, PlantedError};
use veclogic::seed;
use veclogic::walk::{export_corpus, generate_walks, write_token_table, WalkError};

use config::{ConfigError, PipelineConfig};

#[derive(Parser)]
#[command(name = "veclogic", version, about = "Knowledge-graph embedding and intensional-logic pipeline")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline config file.
    #[arg(long, default_value = "config.toml", global = true)]
    config: PathBuf,
    /// Overrides the config's global seed.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Artifact directory.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the input files into a graph artifact.
    Ingest,
    /// Generate the walk corpus from the graph artifact.
    Walk,
    /// Train embeddings from the corpus artifact.
    Train,
    /// Score vector-vs-logic alignment over quadruples.
    Align,
    /// Interpolate from premises to a conclusion and list candidates.
    Guide,
    /// Generate a synthetic benchmark graph with planted analogies.
    Planted,
    /// Print fuzzy property sets, differences, or similarities.
    Intdiff(IntdiffArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct IntdiffArgs {
    /// Print the fuzzy property set of this node.
    #[arg(long, value_name = "NODE")]
    pat: Option<String>,
    /// Print the bounded difference Pat(A) - Pat(B).
    #[arg(long, value_names = ["A", "B"], num_args = 2)]
    diff: Option<Vec<String>>,
    /// Print the intensional similarity of two nodes.
    #[arg(long, value_names = ["A", "B"], num_args = 2)]
    sim: Option<Vec<String>>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            WalkError::EmptyGraph => CliError::Data(e.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            EmbedError::NonFinite(_) => CliError::Internal(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<AlignError> for CliError {
    fn from(e: AlignError) -> Self {
        match e {
            AlignError::Embed(inner) => inner.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<GuideError> for CliError {
    fn from(e: GuideError) -> Self {
        match e {
            GuideError::InvalidRequest(_) => CliError::Usage(e.to_string()),
            GuideError::Embed(inner) => inner.into(),
        }
    }
}

impl From<PlantedError> for CliError {
    fn from(e: PlantedError) -> Self {
        match e {
            PlantedError::SpecTooSmall(_) => CliError::Usage(e.to_string()),
            PlantedError::Graph(inner) => inner.into(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(&cli.common.config, cli.common.seed)?;
    fs::create_dir_all(&cli.common.out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", cli.common.out.display())))?;
    write_file(&cli.common.out.join("resolved_config.toml"), &cfg.to_toml())?;
    match cli.command {
        Command::Ingest => cmd_ingest(&cli.common, &cfg),
        Command::Walk => cmd_walk(&cli.common, &cfg),
        Command::Train => cmd_train(&cli.common, &cfg),
        Command::Align => cmd_align(&cli.common, &cfg),
        Command::Guide => cmd_guide(&cli.common, &cfg),
        Command::Planted => cmd_planted(&cli.common, &cfg),
        Command::Intdiff(args) => cmd_intdiff(&cli.common, &cfg, &args),
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn read_artifact(out: &Path, name: &str) -> Result<String, CliError> {
    let path = out.join(name);
    fs::read_to_string(&path).map_err(|_| {
        CliError::Data(format!(
            "missing artifact {} (run the upstream stage first)",
            path.display()
        ))
    })
}

/// Parses the configured inputs; returns statements plus warning count.
fn parse_inputs(common: &Common, cfg: &PipelineConfig) -> Result<(Vec<veclogic::parse::ParsedStatement>, usize), CliError> {
    let paths = cfg.input_paths(&common.config);
    if paths.is_empty() {
        return Err(CliError::Usage("[input] paths is empty".to_string()));
    }
    let mut statements = Vec::new();
    let mut warnings = 0;
    for path in &paths {
        let text = read_input(path)?;
        match cfg.input.format.as_str() {
            "tsv" => {
                let mut parsed = parse_graph_tsv(&text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                statements.append(&mut parsed);
            }
            _ => {
                let exprs = parse_sexpr(&text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                let outcome = lower_to_statements(&exprs);
                for diag in &outcome.diagnostics {
                    eprintln!("warning: {}: {diag}", path.display());
                    warnings += 1;
                }
                statements.extend(outcome.statements);
            }
        }
    }
    Ok((statements, warnings))
}

fn freeze_graph(
    cfg: &PipelineConfig,
    statements: &[veclogic::parse::ParsedStatement],
) -> Result<KnowledgeGraph, CliError> {
    let mut builder = GraphBuilder::new(cfg.registry());
    builder.add_statements(statements);
    let graph = builder.freeze()?;
    let audit = graph.audit();
    if !audit.is_clean() {
        return Err(CliError::Internal(format!(
            "graph audit failed: {}",
            audit.violations.join("; ")
        )));
    }
    Ok(graph)
}

fn load_graph_artifact(common: &Common, cfg: &PipelineConfig) -> Result<KnowledgeGraph, CliError> {
    let text = read_artifact(&common.out, "graph.tsv")?;
    let statements = parse_graph_tsv(&text)
        .map_err(|e| CliError::Internal(format!("graph.tsv artifact is corrupt: {e}")))?;
    freeze_graph(cfg, &statements)
}

fn load_table_artifact(common: &Common) -> Result<EmbeddingTable, CliError> {
    let table_text = read_artifact(&common.out, "embedding.txt")?;
    let mut table = load_table(&table_text)?;
    let meta_text = read_artifact(&common.out, "vocab.tsv")?;
    load_vocab_meta(&mut table, &meta_text)?;
    Ok(table)
}

fn cmd_ingest(common: &Common, cfg: &PipelineConfig) -> Result<(), CliError> {
    let (statements, warnings) = parse_inputs(common, cfg)?;
    let graph = freeze_graph(cfg, &statements)?;
    let tsv = export_graph_tsv(&graph)
        .map_err(|e| CliError::Data(format!("graph not exportable: {e}")))?;
    write_file(&common.out.join("graph.tsv"), &tsv)?;
    println!(
        "nodes={} edges={} predicates={}",
        graph.node_count(),
        graph.edge_count(),
        graph.predicate_count()
    );
    println!("warnings={warnings}");
    println!("audit: clean");
    Ok(())
}

fn cmd_walk(common: &Common, cfg: &PipelineConfig) -> Result<(), CliError> {
    let graph = load_graph_artifact(common, cfg)?;
    let walk_cfg = cfg.walk_config();
    let walks = generate_walks(&graph, &walk_cfg)?;
    let mut corpus = Vec::new();
    export_corpus(&walks, &mut corpus)
        .map_err(|e| CliError::Data(format!("cannot serialize corpus: {e}")))?;
    write_file(
        &common.out.join("corpus.txt"),
        &String::from_utf8(corpus).expect("corpus is utf-8"),
    )?;
    let mut tokens = Vec::new();
    write_token_table(&walks, &mut tokens)
        .map_err(|e| CliError::Data(format!("cannot serialize token table: {e}")))?;
    write_file(
        &common.out.join("tokens.tsv"),
        &String::from_utf8(tokens).expect("token table is utf-8"),
    )?;
    println!("walks={} corpus=corpus.txt tokens=tokens.tsv", walks.len());
    Ok(())
}

fn cmd_train(common: &Common, cfg: &PipelineConfig) -> Result<(), CliError> {
    let corpus = read_artifact(&common.out, "corpus.txt")?;
    let sentences = sentences_from_text(&corpus);
    let (table, report) = train_with_report(&sentences, &cfg.train_config())?;
    let mut table_bytes = Vec::new();
    save_table(&table, &mut table_bytes)
        .map_err(|e| CliError::Data(format!("cannot serialize table: {e}")))?;
    write_file(
        &common.out.join("embedding.txt"),
        &String::from_utf8(table_bytes).expect("table is utf-8"),
    )?;
    let mut meta_bytes = Vec::new();
    save_vocab_meta(&table, &mut meta_bytes)
        .map_err(|e| CliError::Data(format!("cannot serialize vocab: {e}")))?;
    write_file(
        &common.out.join("vocab.tsv"),
        &String::from_utf8(meta_bytes).expect("vocab is utf-8"),
    )?;
    println!("vocab={} dim={} pairs={}", table.len(), table.dim, report.pairs_trained);
    for (epoch, loss) in report.epoch_mean_loss.iter().enumerate() {
        println!("epoch {epoch}: mean loss {loss:.6}");
    }
    Ok(())
}

/// Quads for `align`: explicit file, planted regeneration, then seeded
/// random quads over embeddable node names.
fn gather_quads(
    common: &Common,
    cfg: &PipelineConfig,
    graph: &KnowledgeGraph,
    table: &EmbeddingTable,
) -> Result<Vec<Quadruple>, CliError> {
    let mut quads = Vec::new();
    if let Some(file) = &cfg.eval.quads_file {
        let base = common.config.parent().unwrap_or(Path::new("."));
        let path = if Path::new(file).is_absolute() {
            PathBuf::from(file)
        } else {
            base.join(file)
        };
        let text = read_input(&path)?;
        quads.extend(align::read_quads_csv(&text)?);
    }
    if cfg.eval.include_planted {
        if let Some(spec) = cfg.planted_spec() {
            let (_, planted_quads) = generate_planted_graph(&spec)?;
            quads.extend(planted_quads);
        }
    }
    if cfg.eval.random_quads > 0 {
        let pool: Vec<&str> = graph
            .nodes()
            .iter()
            .map(|n| n.name.as_str())
            .filter(|name| table.vector_by_name(name).is_ok())
            .collect();
        if pool.len() < 4 {
            return Err(CliError::Data(
                "not enough embeddable nodes to sample random quadruples".to_string(),
            ));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed::derive(
            cfg.eval.rng_seed.unwrap_or(0),
            "sampled-quads",
        ));
        for _ in 0..cfg.eval.random_quads {
            let mut picked: Vec<&str> = Vec::with_capacity(4);
            while picked.len() < 4 {
                let name = pool[rng.random_range(0..pool.len())];
                if !picked.contains(&name) {
                    picked.push(name);
                }
            }
            quads.push(Quadruple::new(
                picked[0],
                picked[1],
                picked[2],
                picked[3],
                QuadSource::Sampled,
            ));
        }
    }
    Ok(quads)
}

fn cmd_align(common: &Common, cfg: &PipelineConfig) -> Result<(), CliError> {
    let graph = load_graph_artifact(common, cfg)?;
    let table = load_table_artifact(common)?;
    let quads = gather_quads(common, cfg, &graph, &table)?;
    let (records, summary) = align::evaluate_alignment(&graph, &table, &quads, &cfg.eval_config())?;
    write_file(&common.out.join("alignment.csv"), &align::write_records_csv(&records))?;
    write_file(&common.out.join("scatter.tsv"), &align::write_scatter(&records))?;
    let rendered = align::render_summary(&records, &summary);
    write_file(&common.out.join("alignment_summary.txt"), &rendered)?;
    print!("{rendered}");
    Ok(())
}

fn cmd_guide(common: &Common, cfg: &PipelineConfig) -> Result<(), CliError> {
    let table = load_table_artifact(common)?;
    if cfg.guide.conclusion.is_empty() {
        return Err(CliError::Usage("[guide] conclusion is empty".to_string()));
    }
    let path = guide::guide(&table, &cfg.guide_request())?;
    let rendered = guide::render_path(&path);
    write_file(&common.out.join("guide.txt"), &rendered)?;
    print!("{rendered}");
    Ok(())
}

fn cmd_planted(common: &Common, cfg: &PipelineConfig) -> Result<(), CliError> {
    let spec = cfg
        .planted_spec()
        .ok_or_else(|| CliError::Usage("config has no [planted] section".to_string()))?;
    let (graph, quads) = generate_planted_graph(&spec)?;
    let audit = graph.audit();
    if !audit.is_clean() {
        return Err(CliError::Internal(format!(
            "planted graph audit failed: {}",
            audit.violations.join("; ")
        )));
    }
    let tsv = export_graph_tsv(&graph)
        .map_err(|e| CliError::Internal(format!("planted graph not exportable: {e}")))?;
    write_file(&common.out.join("graph.tsv"), &tsv)?;
    let mut csv = String::from("ax,bx,ay,by\n");
    for q in &quads {
        csv.push_str(&format!("{},{},{},{}\n", q.ax, q.bx, q.ay, q.by));
    }
    write_file(&common.out.join("quads.csv"), &csv)?;
    println!(
        "nodes={} edges={} quads={}",
        graph.node_count(),
        graph.edge_count(),
        quads.len()
    );
    Ok(())
}

fn cmd_intdiff(common: &Common, cfg: &PipelineConfig, args: &IntdiffArgs) -> Result<(), CliError> {
    let (statements, _) = parse_inputs(common, cfg)?;
    let graph = freeze_graph(cfg, &statements)?;
    let ev = PatEvaluator::new(&graph, cfg.pat_config());
    let resolve = |name: &str| graph.resolve(name).map_err(CliError::from);
    if let Some(node) = &args.pat {
        print!("{}", ev.pat(resolve(node)?).write_csv(&graph));
    } else if let Some(pair) = &args.diff {
        let d = int_difference(&ev.pat(resolve(&pair[0])?), &ev.pat(resolve(&pair[1])?))
            .map_err(|e| CliError::Internal(e.to_string()))?;
        print!("{}", d.write_csv(&graph));
    } else if let Some(pair) = &args.sim {
        let s = ev.intensional_similarity(resolve(&pair[0])?, resolve(&pair[1])?);
        println!("{s}");
    }
    Ok(())
}
