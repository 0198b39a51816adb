use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use proncoach::acoustic::ErrorRates;
use proncoach::content::{load_corpus, parse_items};
use proncoach::eval::{self, InjectionSpec};
use proncoach::service::{self, RecognizerKind, ServiceConfig, CONFIG_ENV};

#[derive(Parser)]
#[command(name = "proncoach", version, about = "Arabic pronunciation scoring service and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value = "data/corpus.json")]
    corpus: PathBuf,
    #[arg(long, default_value = "data/assets")]
    assets: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        /// TOML config file; PRONCOACH_CONFIG takes precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        listen: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long, value_enum)]
        recognizer: Option<RecognizerKind>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a corpus file and its assets.
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Generate a synthetic corpus with its asset pool.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Corpus file to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        assets: PathBuf,
        /// Hand-written items to place before the generated ones.
        #[arg(long)]
        include: Option<PathBuf>,
    },
    /// Error-injection detection benchmark.
    Evaluate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = 11)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0.0)]
        p_sub_full: f64,
        #[arg(long, default_value_t = 0.0)]
        p_sub_diac: f64,
        #[arg(long, default_value_t = 0.0)]
        p_del: f64,
        #[arg(long, default_value_t = 0.0)]
        p_ins: f64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Score a JSONL file of {item_id, hypothesis_text} lines.
    Score {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        attempts: PathBuf,
        /// Output JSONL file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for interface uniformity; scoring is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Serve {
            config,
            listen,
            port,
            corpus,
            assets,
            recognizer,
            seed,
        } => {
            let path = std::env::var_os(CONFIG_ENV).map(PathBuf::from).or(config);
            let mut cfg = match path {
                Some(p) => ServiceConfig::from_file(&p)?,
                None => ServiceConfig::default(),
            };
            cfg.listen = listen.unwrap_or(cfg.listen);
            cfg.port = port.unwrap_or(cfg.port);
            cfg.corpus = corpus.unwrap_or(cfg.corpus);
            cfg.assets = assets.unwrap_or(cfg.assets);
            cfg.recognizer = recognizer.unwrap_or(cfg.recognizer);
            cfg.seed = seed.or(cfg.seed);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::run(cfg))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { corpus } => {
            let report = eval::validate_corpus(&corpus.corpus, &corpus.assets);
            print!("{}", report.render());
            Ok(if report.is_valid() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Generate {
            n,
            seed,
            out,
            assets,
            include,
        } => {
            let extra = match include {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    parse_items(&text)?
                }
                None => Vec::new(),
            };
            let items = eval::generate_corpus(n, seed, extra, &out, &assets)?;
            println!("wrote {} items to {}", items.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Evaluate {
            corpus,
            seed,
            trials,
            p_sub_full,
            p_sub_diac,
            p_del,
            p_ins,
            json,
        } => {
            let c = load_corpus(&corpus.corpus, &corpus.assets)?;
            let spec = InjectionSpec {
                rates: ErrorRates {
                    p_sub_full,
                    p_sub_diac,
                    p_del,
                    p_ins,
                },
                trials,
                seed,
            };
            let report = eval::evaluate(&c, &spec)?;
            let mut body = serde_json::to_string_pretty(&report)?;
            body.push('\n');
            match json {
                Some(p) => {
                    std::fs::write(&p, body)?;
                    print!("{}", eval::render_table(&report));
                }
                None => print!("{body}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Score {
            corpus,
            attempts,
            out,
            seed: _,
        } => {
            let c = load_corpus(&corpus.corpus, &corpus.assets)?;
            let input = std::fs::read_to_string(&attempts)
                .with_context(|| format!("reading {}", attempts.display()))?;
            let (lines, errors) = eval::score_attempts(&c, &input);
            match out {
                Some(p) => std::fs::write(p, lines)?,
                None => print!("{lines}"),
            }
            Ok(if errors == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
