//! Command-line entry point: annotate documents, mine arguments,
//! query the knowledge base, and evaluate against gold annotations.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use argmine::eval::{evaluate_corpus, MatchMode};
use argmine::kb::{export_abox, load_abox, parse_tbox, KnowledgeBase, Obj};
use argmine::miner::MineMode;
use argmine::pattern::{builtin_phases, print_phases};
use argmine::pipeline::{Pipeline, PipelineConfig};
use argmine::standoff::{load_corpus_dir, standoff_string, write_atomic};

#[derive(Parser)]
#[command(
    name = "argmine",
    version,
    about = "Rule-based argumentation mining over medical text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PipelineArgs {
    /// Gazetteer .def file; verbs.lst and conjunctions.lst are loaded
    /// from the same directory.
    #[arg(long)]
    gazetteer: PathBuf,
    /// Extra pattern rule files, run after the built-in macro phases.
    #[arg(long = "rules")]
    rules: Vec<PathBuf>,
    /// Maximum non-matching tokens between macro elements.
    #[arg(long = "macro-gap", default_value_t = 3)]
    macro_gap: usize,
    /// Worker threads for document-level parallelism.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate documents and write full standoff files.
    Annotate {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Output directory for <id>.ann and <id>.txt files.
        #[arg(long)]
        out: PathBuf,
        /// Input plain-text documents.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Mine claims, premises and arguments; write standoff plus an ABox.
    Mine {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        out: PathBuf,
        /// Path of the ABox file to write.
        #[arg(long)]
        abox: PathBuf,
        /// Premise attachment window, in sentences.
        #[arg(long, default_value_t = 2)]
        window: usize,
        /// Literal branch behaviour: a sentence with a conjunction but no
        /// claim macro yields nothing.
        #[arg(long = "strict-alg1")]
        strict_alg1: bool,
        /// Materialise and classify; export includes derived facts.
        #[arg(long)]
        classify: bool,
        /// Extra TBox axioms.
        #[arg(long)]
        tbox: Option<PathBuf>,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Query an ABox: `instances CONCEPT` or `role ROLE [SUBJECT]`.
    Query {
        #[arg(long)]
        abox: PathBuf,
        #[arg(long)]
        tbox: Option<PathBuf>,
        /// The query string.
        query: String,
    },
    /// Score predicted standoff annotations against gold.
    Eval {
        /// Directory of predicted <id>.ann / <id>.txt files.
        #[arg(long)]
        pred: PathBuf,
        /// Directory of gold <id>.ann / <id>.txt files.
        #[arg(long)]
        gold: PathBuf,
        /// Span alignment mode.
        #[arg(long = "eval-mode", default_value = "strict")]
        eval_mode: String,
        /// Where to write the machine-readable report.
        #[arg(long, default_value = "eval_report.csv")]
        csv: PathBuf,
    },
    /// Print the built-in macro schemas in the rule DSL.
    DumpRules {
        #[arg(long = "macro-gap", default_value_t = 3)]
        macro_gap: usize,
    },
}

/// Errors split by exit code: usage/input problems exit 2, internal
/// failures exit 1.
enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> CliError {
        CliError::Input(e.to_string())
    }

    fn internal(e: impl std::fmt::Display) -> CliError {
        CliError::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Annotate {
            pipeline,
            out,
            inputs,
        } => {
            let jobs = pipeline.jobs;
            let pipeline = build_pipeline(&pipeline, MineMode::Extended, 2)?;
            let docs = read_inputs(&inputs)?;
            std::fs::create_dir_all(&out).map_err(CliError::internal)?;
            let annotated: Vec<(String, String, String)> = in_pool(jobs, || {
                docs.par_iter()
                    .map(|(id, text)| {
                        let doc = pipeline.annotate(id, text);
                        (id.clone(), text.clone(), standoff_string(&doc, None))
                    })
                    .collect()
            });
            for (id, text, standoff) in annotated {
                write_doc(&out, &id, &text, &standoff)?;
            }
            Ok(())
        }
        Command::Mine {
            pipeline,
            out,
            abox,
            window,
            strict_alg1,
            classify,
            tbox,
            inputs,
        } => {
            let jobs = pipeline.jobs;
            let mode = if strict_alg1 {
                MineMode::Strict
            } else {
                MineMode::Extended
            };
            let pipeline = build_pipeline(&pipeline, mode, window)?;
            let docs = read_inputs(&inputs)?;
            std::fs::create_dir_all(&out).map_err(CliError::internal)?;

            let results: Vec<_> = in_pool(jobs, || {
                docs.par_iter()
                    .map(|(id, text)| {
                        let result = pipeline.mine(id, text);
                        let standoff =
                            standoff_string(&result.document, Some(&["Claim", "Premise"]));
                        (id.clone(), text.clone(), standoff, result.arguments.len(),
                         result.assertions)
                    })
                    .collect()
            });

            let mut kb = KnowledgeBase::with_builtin_tbox();
            if let Some(path) = &tbox {
                let content = read_file(path)?;
                kb.add_tbox_axioms(parse_tbox(&content).map_err(CliError::input)?)
                    .map_err(CliError::input)?;
            }
            for (id, text, standoff, count, assertions) in results {
                write_doc(&out, &id, &text, &standoff)?;
                println!("{id}\t{count} arguments");
                for assertion in assertions {
                    kb.assert_fact(assertion).map_err(CliError::internal)?;
                }
            }
            if classify {
                kb.classify_individuals();
            }
            write_atomic(&abox, &export_abox(&kb, classify)).map_err(CliError::internal)?;
            Ok(())
        }
        Command::Query { abox, tbox, query } => {
            let mut kb = KnowledgeBase::with_builtin_tbox();
            if let Some(path) = &tbox {
                let content = read_file(path)?;
                kb.add_tbox_axioms(parse_tbox(&content).map_err(CliError::input)?)
                    .map_err(CliError::input)?;
            }
            let content = read_file(&abox)?;
            load_abox(&mut kb, &content).map_err(CliError::input)?;
            kb.classify_individuals();
            for line in run_query(&kb, &query)? {
                println!("{line}");
            }
            Ok(())
        }
        Command::Eval {
            pred,
            gold,
            eval_mode,
            csv,
        } => {
            let mode = match eval_mode.as_str() {
                "strict" => MatchMode::Strict,
                "lenient" => MatchMode::Lenient,
                other => {
                    return Err(CliError::Input(format!(
                        "unknown eval mode {other:?} (expected strict or lenient)"
                    )))
                }
            };
            let pred_docs = load_corpus_dir(&pred).map_err(CliError::input)?;
            let gold_docs = load_corpus_dir(&gold).map_err(CliError::input)?;
            let report = evaluate_corpus(&pred_docs, &gold_docs, mode).map_err(CliError::input)?;
            print!("{}", report.render_text());
            write_atomic(&csv, &report.render_csv()).map_err(CliError::internal)?;
            Ok(())
        }
        Command::DumpRules { macro_gap } => {
            let (claim, premise) = builtin_phases(macro_gap);
            print!("{}", print_phases(&[claim, premise]));
            Ok(())
        }
    }
}

fn build_pipeline(
    args: &PipelineArgs,
    mode: MineMode,
    window: usize,
) -> Result<Pipeline, CliError> {
    let mut config = PipelineConfig::new(&args.gazetteer);
    config.rule_files = args.rules.clone();
    config.macro_gap = args.macro_gap;
    config.window = window;
    config.mode = mode;
    Pipeline::from_config(config).map_err(CliError::input)
}

/// Read input documents as (id, text), sorted by id for determinism.
fn read_inputs(inputs: &[PathBuf]) -> Result<Vec<(String, String)>, CliError> {
    let mut docs = Vec::new();
    let mut seen = BTreeSet::new();
    for path in inputs {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| CliError::Input(format!("cannot derive a document id from {path:?}")))?;
        if !seen.insert(id.clone()) {
            return Err(CliError::Input(format!("duplicate document id {id}")));
        }
        docs.push((id, read_file(path)?));
    }
    docs.sort();
    Ok(docs)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("failed to read {}: {e}", path.display())))
}

fn write_doc(out: &Path, id: &str, text: &str, standoff: &str) -> Result<(), CliError> {
    write_atomic(&out.join(format!("{id}.txt")), text).map_err(CliError::internal)?;
    write_atomic(&out.join(format!("{id}.ann")), standoff).map_err(CliError::internal)
}

fn in_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(work)
}

fn run_query(kb: &KnowledgeBase, query: &str) -> Result<Vec<String>, CliError> {
    let words: Vec<&str> = query.split_whitespace().collect();
    match words.as_slice() {
        ["instances", concept] => {
            let mut names: Vec<String> = kb
                .query_concept_instances(concept)
                .map_err(CliError::input)?
                .into_iter()
                .collect();
            names.sort();
            Ok(names)
        }
        ["role", role] => {
            let mut lines: Vec<String> = kb
                .query_role(role, None)
                .map_err(CliError::input)?
                .into_iter()
                .map(|(subject, object)| format!("{subject}\t{}", format_obj(&object)))
                .collect();
            lines.sort();
            Ok(lines)
        }
        ["role", role, subject] => {
            let mut lines: Vec<String> = kb
                .query_role(role, Some(subject))
                .map_err(CliError::input)?
                .into_iter()
                .map(|(_, object)| format_obj(&object))
                .collect();
            lines.sort();
            Ok(lines)
        }
        _ => Err(CliError::Input(format!(
            "cannot parse query {query:?}; expected `instances CONCEPT` or `role ROLE [SUBJECT]`"
        ))),
    }
}

fn format_obj(obj: &Obj) -> String {
    match obj {
        Obj::Individual(name) => name.clone(),
        Obj::Literal(text) => format!("\"{text}\""),
    }
}
