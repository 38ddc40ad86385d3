use amrgen::encoders::{EncoderKind, InputRepr};
use amrgen::eval::{parse_edges, Bucketing};
use amrgen::pipeline::{self, PipelineError};
use amrgen::seq2seq::TrainConfig;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "amrgen", version, about = "AMR-to-text generation with sequential, tree and graph encoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a PENMAN corpus into JSONL with vocabularies and statistics.
    Preprocess {
        /// PENMAN file or directory.
        input: PathBuf,
        /// Output JSONL path.
        #[arg(short, long)]
        out: PathBuf,
        /// Keep names, numbers and dates as they are.
        #[arg(long)]
        no_anonymize: bool,
    },
    /// Train a model.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        dev: PathBuf,
        /// Output directory for the log, checkpoint and manifest.
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Decode a corpus with a trained model.
    Generate {
        #[arg(long)]
        checkpoint: PathBuf,
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        beam: Option<usize>,
    },
    /// Corpus BLEU and mean sentence BLEU of a model or an output file.
    Evaluate {
        #[arg(long, conflicts_with = "hypotheses", required_unless_present = "hypotheses")]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        hypotheses: Option<PathBuf>,
        #[arg(long)]
        references: PathBuf,
        #[arg(long)]
        beam: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Bucketed sentence-BLEU deltas of several systems against a baseline.
    Analyze {
        /// Generated sentence files, the baseline first unless --baseline is given.
        #[arg(required = true, num_args = 2..)]
        outputs: Vec<PathBuf>,
        #[arg(long)]
        references: PathBuf,
        /// Comma-separated system names, one per output file.
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
        #[arg(long)]
        baseline: Option<String>,
        /// `reentrancies`, `max_dep_len`, optionally with edges such as
        /// `reentrancies=0,1-5,6-20`. Repeatable; both analyses by default.
        #[arg(long)]
        buckets: Vec<String>,
        #[arg(long)]
        no_anonymize: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Contrastive-pair accuracy of a model.
    Contrastive {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        references: PathBuf,
        #[arg(long, conflicts_with = "annotations", required_unless_present = "annotations")]
        pairs: Option<PathBuf>,
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Write the pairs built from annotations to this file.
        #[arg(long)]
        write_pairs: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Seq, SeqGCN, GCNSeq, SeqTreeLSTM, TreeLSTMSeq, GCN or TreeLSTM.
    #[arg(long)]
    model: Option<EncoderKind>,
    #[arg(long)]
    repr: Option<InputRepr>,
    #[arg(long)]
    beam: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self, epochs: Option<usize>) -> Result<TrainConfig, PipelineError> {
        let mut config = match &self.config {
            Some(p) => pipeline::load_config(p)?,
            None => TrainConfig::default(),
        };
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(m) = self.model {
            config.model = m;
        }
        if let Some(r) = self.repr {
            config.repr = Some(r);
        }
        if let Some(b) = self.beam {
            config.beam = b;
        }
        if let Some(e) = epochs {
            config.epochs = e;
        }
        config.validate().map_err(PipelineError::Config)?;
        Ok(config)
    }
}

fn parse_buckets(specs: &[String]) -> Result<Vec<(Bucketing, Vec<(usize, usize)>)>, PipelineError> {
    if specs.is_empty() {
        return Ok([Bucketing::Reentrancies, Bucketing::MaxDependencyLength]
            .into_iter()
            .map(|b| (b, b.default_edges()))
            .collect());
    }
    specs
        .iter()
        .map(|s| {
            let (name, edges) = match s.split_once('=') {
                Some((n, e)) => (n, Some(e)),
                None => (s.as_str(), None),
            };
            let b: Bucketing = name.parse().map_err(PipelineError::Config)?;
            let edges = match edges {
                Some(e) => parse_edges(e).map_err(PipelineError::Config)?,
                None => b.default_edges(),
            };
            Ok((b, edges))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Preprocess { input, out, no_anonymize } => {
            let stats = pipeline::preprocess(&pipeline::PreprocessArgs {
                input,
                out,
                anonymize: !no_anonymize,
            })?;
            println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
        }
        Command::Train {
            train,
            dev,
            out,
            config,
            epochs,
        } => {
            let summary = pipeline::train(&pipeline::TrainArgs {
                config: config.resolve(epochs)?,
                train,
                dev,
                out_dir: out,
            })?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }
        Command::Generate {
            checkpoint,
            input,
            out,
            beam,
        } => {
            let print = out.is_none();
            let gens = pipeline::generate(&pipeline::GenerateArgs {
                model: checkpoint,
                input,
                out,
                beam,
            })?;
            if print {
                for g in gens {
                    println!("{}", g.sentence);
                }
            }
        }
        Command::Evaluate {
            checkpoint,
            hypotheses,
            references,
            beam,
            out,
        } => {
            let report = pipeline::evaluate(&pipeline::EvaluateArgs {
                model: checkpoint,
                hypotheses,
                references,
                beam,
                out,
            })?;
            print!("{}", report.render());
        }
        Command::Analyze {
            outputs,
            references,
            names,
            baseline,
            buckets,
            no_anonymize,
            out,
        } => {
            let report = pipeline::analyze(&pipeline::AnalyzeArgs {
                outputs,
                names,
                references,
                baseline,
                buckets: parse_buckets(&buckets)?,
                anonymize: !no_anonymize,
                out,
            })?;
            print!("{}", report.render());
        }
        Command::Contrastive {
            checkpoint,
            references,
            pairs,
            annotations,
            write_pairs,
            out,
        } => {
            let result = pipeline::contrastive(&pipeline::ContrastiveArgs {
                model: checkpoint.clone(),
                references,
                pairs,
                annotations,
                write_pairs,
                out,
            })?;
            print!("{}", amrgen::eval::render_contrastive(&checkpoint.display().to_string(), &result));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
