use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evalkit::dataset::{self, Layout, PairSet, SplitSpec};
use evalkit::fingerprints::{
    key_fingerprint, morgan_fingerprint, path_fingerprint, KeySet, DEFAULT_MAX_PATH_BONDS, DEFAULT_RADIUS,
    DEFAULT_WIDTH,
};
use evalkit::frechet::{frechet_distance, gaussian_fit, read_embeddings, FrechetError};
use evalkit::harness::{
    eval_d2i, eval_i2d, render_report, D2IOptions, I2DOptions, OutputFormat, PredictionFile, Report, Task,
};
use evalkit::smiles::{parse_smiles, validate};
use evalkit::textmetrics::TextTokenization;
use evalkit::tokenizer::{build_vocab, tokenize, DEFAULT_SPECIALS};

#[derive(Debug, Parser)]
#[command(name = "evalkit", version, about = "Evaluate drug ↔ indication translation models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read a DrugBank/ChEMBL export or generic JSONL and write the canonical JSONL pair set
    Ingest {
        input: PathBuf,
        #[arg(long, value_parser = parse_layout)]
        layout: Layout,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Length statistics of a JSONL pair set
    Stats {
        input: PathBuf,
        #[arg(long, default_value = "table")]
        format: Format,
    },
    /// Deterministic train/test split of a JSONL pair set
    Split {
        input: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out_train: PathBuf,
        #[arg(long)]
        out_test: PathBuf,
    },
    /// Print the grammar tokens of each SMILES line, space separated
    Tokenize {
        /// SMILES file, one per line (stdin when omitted or "-")
        input: Option<PathBuf>,
        /// Also build a vocabulary over the input and write it here
        #[arg(long)]
        vocab_out: Option<PathBuf>,
    },
    /// Check each SMILES line for validity
    Validate {
        input: Option<PathBuf>,
        #[arg(long)]
        strict_validity: bool,
        #[arg(long, default_value = "table")]
        format: Format,
    },
    /// Print one hex-encoded fingerprint per SMILES line
    Fingerprint {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "morgan")]
        scheme: Scheme,
        #[command(flatten)]
        fp: FingerprintArgs,
    },
    /// Fréchet distance between two embedding files
    Fcd {
        #[arg(long)]
        embeddings_ref: PathBuf,
        #[arg(long)]
        embeddings_hyp: PathBuf,
        #[arg(long, default_value = "table")]
        format: Format,
    },
    /// Score a drug-to-indication prediction file
    EvalD2i {
        predictions: PathBuf,
        #[command(flatten)]
        common: EvalArgs,
    },
    /// Score an indication-to-drug prediction file
    EvalI2d {
        predictions: PathBuf,
        #[command(flatten)]
        common: EvalArgs,
        #[arg(long)]
        strict_validity: bool,
        /// Tokenization for SMILES BLEU
        #[arg(long, value_enum, default_value = "char")]
        bleu_tokenization: BleuTokenization,
        #[command(flatten)]
        fp: FingerprintArgs,
        #[arg(long, requires = "embeddings_hyp")]
        embeddings_ref: Option<PathBuf>,
        #[arg(long, requires = "embeddings_ref")]
        embeddings_hyp: Option<PathBuf>,
    },
    /// Re-render a JSON report
    Render {
        report: PathBuf,
        /// Fail unless the report is for this task
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long, default_value = "table")]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Task the prediction file belongs to; defaults to the subcommand's task
    #[arg(long, value_parser = parse_task)]
    task: Option<Task>,
    /// Model name for the report row (defaults to the file stem)
    #[arg(long)]
    label: Option<String>,
    /// Paired molecule/text embeddings for the Text2Mol column
    #[arg(long)]
    text2mol_embeddings: Option<PathBuf>,
    #[arg(long, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct FingerprintArgs {
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: u32,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    bits: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_PATH_BONDS)]
    max_path: u32,
    /// Key set file (id<TAB>descriptor per line); the built-in set otherwise
    #[arg(long)]
    keyset: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => OutputFormat::Table,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scheme {
    Morgan,
    #[value(alias = "rdk")]
    Path,
    #[value(alias = "maccs")]
    Keys,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BleuTokenization {
    Char,
    SmilesGrammar,
}

fn parse_layout(s: &str) -> Result<Layout, String> {
    s.parse::<Layout>().map_err(|e| e.to_string())
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse()
}

/// Exit status 1: bad input. Exit status 2: the numeric core failed.
#[derive(Debug)]
enum Failure {
    Input(String),
    Numeric(String),
}

fn fail(e: impl Into<evalkit::Error>) -> Failure {
    let e = e.into();
    if e.is_numeric_failure() {
        Failure::Numeric(e.to_string())
    } else {
        Failure::Input(e.to_string())
    }
}

fn io_fail(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest { input, layout, out } => {
            let ingested = dataset::ingest(&input, layout).map_err(fail)?;
            let mut w = output(out.as_deref())?;
            ingested
                .set
                .write_jsonl(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Failure::Input(format!("writing output: {e}")))?;
            eprintln!(
                "read {} rows, kept {}, dropped {}; sha256 {}",
                ingested.report.rows_read,
                ingested.set.len(),
                ingested.report.dropped,
                ingested.set.provenance.digest
            );
            Ok(())
        }
        Command::Stats { input, format } => {
            let set = read_pairs(&input)?;
            let stats = dataset::stats(&set).map_err(fail)?;
            let name = file_stem(&input);
            let text = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&stats).expect("stats serialize");
                    s.push('\n');
                    s
                }
                Format::Csv => {
                    let mut s = format!("Dataset Details,{name}\n");
                    for (k, v) in stats.table_rows() {
                        s.push_str(&format!("{k},{v}\n"));
                    }
                    s
                }
                Format::Table => {
                    let rows = stats.table_rows();
                    let kw = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                    let vw = rows.iter().map(|(_, v)| v.len()).chain([name.len()]).max().unwrap_or(0);
                    let mut s = format!("| {:kw$} | {:vw$} |\n", "Dataset Details", name);
                    s.push_str(&format!("|-{}-|-{}-|\n", "-".repeat(kw), "-".repeat(vw)));
                    for (k, v) in rows {
                        s.push_str(&format!("| {k:kw$} | {v:>vw$} |\n"));
                    }
                    s
                }
            };
            print_out(&text)
        }
        Command::Split {
            input,
            fraction,
            seed,
            out_train,
            out_test,
        } => {
            let set = read_pairs(&input)?;
            let (train, test) = dataset::split(
                &set,
                SplitSpec {
                    test_fraction: fraction,
                    seed,
                },
            )
            .map_err(fail)?;
            for (path, part) in [(&out_train, &train), (&out_test, &test)] {
                let mut w = output(Some(path))?;
                part.write_jsonl(&mut w).and_then(|_| w.flush()).map_err(io_fail(path))?;
            }
            eprintln!("train {} / test {} (fraction {fraction}, seed {seed})", train.len(), test.len());
            Ok(())
        }
        Command::Tokenize { input, vocab_out } => {
            let lines = read_lines(input.as_deref())?;
            let mut out = String::new();
            for (i, line) in lines.iter().enumerate() {
                let seq = tokenize(line).map_err(|e| Failure::Input(format!("line {}: {e}", i + 1)))?;
                out.push_str(&seq.to_string());
                out.push('\n');
            }
            if let Some(path) = vocab_out {
                let vocab = build_vocab(lines.iter(), &DEFAULT_SPECIALS).map_err(fail)?;
                let mut w = output(Some(&path))?;
                vocab.write_to(&mut w).and_then(|_| w.flush()).map_err(io_fail(&path))?;
            }
            print_out(&out)
        }
        Command::Validate {
            input,
            strict_validity,
            format,
        } => {
            let lines = read_lines(input.as_deref())?;
            let reports: Vec<_> = lines.iter().map(|l| validate(l, strict_validity)).collect();
            let valid = reports.iter().filter(|r| r.verdict).count();
            let text = match format {
                Format::Json => {
                    let items: Vec<_> = lines
                        .iter()
                        .zip(&reports)
                        .map(|(s, r)| serde_json::json!({ "smiles": s, "report": r }))
                        .collect();
                    let mut s = serde_json::to_string_pretty(&items).expect("reports serialize");
                    s.push('\n');
                    s
                }
                Format::Csv | Format::Table => {
                    let sep = if matches!(format, Format::Csv) { "," } else { "\t" };
                    let mut s = String::new();
                    if matches!(format, Format::Csv) {
                        s.push_str("smiles,verdict,detail\n");
                    }
                    for (line, r) in lines.iter().zip(&reports) {
                        let verdict = if r.verdict { "valid" } else { "invalid" };
                        let detail = r.failure_detail.as_deref().unwrap_or("");
                        if matches!(format, Format::Csv) {
                            s.push_str(&format!("{},{verdict},{}\n", csv_field(line), csv_field(detail)));
                        } else {
                            s.push_str(&format!("{verdict}{sep}{line}{sep}{detail}\n"));
                        }
                    }
                    s
                }
            };
            eprintln!("{valid}/{} valid", reports.len());
            print_out(&text)
        }
        Command::Fingerprint { input, scheme, fp } => {
            let lines = read_lines(input.as_deref())?;
            let keyset = load_keyset(fp.keyset.as_deref())?;
            let mut out = String::new();
            for (i, line) in lines.iter().enumerate() {
                let mol = parse_smiles(line).map_err(|e| Failure::Input(format!("line {}: {e}", i + 1)))?;
                let print = match scheme {
                    Scheme::Morgan => morgan_fingerprint(&mol, fp.radius, fp.bits).map_err(fail)?,
                    Scheme::Path => path_fingerprint(&mol, fp.max_path, fp.bits).map_err(fail)?,
                    Scheme::Keys => key_fingerprint(&mol, &keyset),
                };
                out.push_str(&print.bits.to_hex());
                out.push('\n');
            }
            print_out(&out)
        }
        Command::Fcd {
            embeddings_ref,
            embeddings_hyp,
            format,
        } => {
            let a = read_embeddings::<f64>(&embeddings_ref).map_err(fail)?;
            let b = read_embeddings::<f64>(&embeddings_hyp).map_err(fail)?;
            if a.dim() != b.dim() {
                return Err(fail(FrechetError::DimensionMismatch {
                    left: a.dim(),
                    right: b.dim(),
                }));
            }
            let d = frechet_distance(&gaussian_fit(&a), &gaussian_fit(&b)).map_err(fail)?;
            let text = match format {
                Format::Json => {
                    let v = serde_json::json!({
                        "fcd": d,
                        "dim": a.dim(),
                        "ref_rows": a.len(),
                        "hyp_rows": b.len(),
                        "covariance_estimator": "unbiased (N-1)",
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                Format::Csv => format!("FCD\n{d:.4}\n"),
                Format::Table => format!("| FCD    |\n|--------|\n| {d:.4} |\n"),
            };
            print_out(&text)
        }
        Command::EvalD2i { predictions, common } => {
            let file = read_predictions(&predictions, common.task.unwrap_or(Task::DrugToIndication))?;
            let report = eval_d2i(
                &file,
                &D2IOptions {
                    label: common.label.clone().unwrap_or_else(|| file_stem(&predictions)),
                    text2mol_embeddings: common.text2mol_embeddings.clone(),
                },
            )
            .map_err(fail)?;
            print_out(&render_report(&Report::DrugToIndication(report), common.format.into()))
        }
        Command::EvalI2d {
            predictions,
            common,
            strict_validity,
            bleu_tokenization,
            fp,
            embeddings_ref,
            embeddings_hyp,
        } => {
            let file = read_predictions(&predictions, common.task.unwrap_or(Task::IndicationToDrug))?;
            let opts = I2DOptions {
                label: common.label.clone().unwrap_or_else(|| file_stem(&predictions)),
                strict_validity,
                bleu_tokenization: match bleu_tokenization {
                    BleuTokenization::Char => TextTokenization::Char,
                    BleuTokenization::SmilesGrammar => TextTokenization::SmilesGrammar,
                },
                bleu_order: 4,
                morgan_radius: fp.radius,
                width: fp.bits,
                max_path_bonds: fp.max_path,
                keyset: load_keyset(fp.keyset.as_deref())?,
                fcd_embeddings: embeddings_ref.zip(embeddings_hyp),
                text2mol_embeddings: common.text2mol_embeddings.clone(),
            };
            let report = eval_i2d(&file, &opts).map_err(fail)?;
            print_out(&render_report(&Report::IndicationToDrug(report), common.format.into()))
        }
        Command::Render { report, task, format } => {
            let text = std::fs::read_to_string(&report).map_err(io_fail(&report))?;
            let parsed: Report = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: not a report: {e}", report.display())))?;
            let found = match parsed {
                Report::DrugToIndication(_) => Task::DrugToIndication,
                Report::IndicationToDrug(_) => Task::IndicationToDrug,
            };
            if let Some(expected) = task.filter(|t| *t != found) {
                return Err(Failure::Input(format!("report is for {found}, expected {expected}")));
            }
            print_out(&render_report(&parsed, format.into()))
        }
    }
}

fn read_predictions(path: &Path, task: Task) -> Result<PredictionFile, Failure> {
    PredictionFile::read_jsonl(path, task).map_err(fail)
}

fn read_pairs(path: &Path) -> Result<PairSet, Failure> {
    let file = File::open(path).map_err(io_fail(path))?;
    PairSet::read_jsonl(BufReader::new(file), &path.display().to_string()).map_err(fail)
}

fn load_keyset(path: Option<&Path>) -> Result<KeySet, Failure> {
    match path {
        None => Ok(KeySet::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(io_fail(p))?;
            KeySet::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
    }
}

/// Non-empty lines of a file, or of stdin for `None` / `-`.
fn read_lines(path: Option<&Path>) -> Result<Vec<String>, Failure> {
    let reader: Box<dyn BufRead> = match path {
        None => Box::new(io::stdin().lock()),
        Some(p) if p.as_os_str() == "-" => Box::new(io::stdin().lock()),
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(io_fail(p))?)),
    };
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Failure::Input(format!("reading input: {e}")))?;
        let line = line.trim();
        if !line.is_empty() {
            lines.push(line.to_string());
        }
    }
    Ok(lines)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        None => Box::new(BufWriter::new(io::stdout().lock())),
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_fail(p))?)),
    })
}

fn print_out(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Input(format!("writing output: {e}")))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
