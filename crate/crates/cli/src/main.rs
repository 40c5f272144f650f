use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use prekladac_core::backends::{BackendDescriptor, BackendKind, BackendPool, BackendRegistry, EndpointConfig};
use prekladac_core::corpus::{
    backtranslate_round, backtranslation_route, filter_corpus, ingest_aligned, ingest_tsv, plan_blocks, pool_translator,
    write_tsv, FilterReport, Ingested, ParallelPair, Ratio, RuleSet,
};
use prekladac_core::eval::{bleu, chrf, load_manifest, parse_hypotheses, stratified_report, GroupBy, MetricScore, Tokenizer};
use prekladac_core::privacy::{Pseudonymizer, UsageLog};
use prekladac_core::translit;
use prekladac_core::usage::{aggregate_stats, DateRange};
use prekladac_core::Lang;
use prekladac_gateway::GatewayConfig;

/// Exit status when back-translation stops early; the partial output is kept.
const EXIT_INTERRUPTED: u8 = 3;

#[derive(Parser)]
#[command(name = "prekladac", version, about = "Czech–Ukrainian translation service tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP gateway.
    Serve {
        /// TOML config file; built-in defaults when omitted. PORT overrides the port.
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
    /// Transliterate text given as arguments, or stdin line by line.
    Translit {
        /// Language the text is written in: uk gives Latin, cs gives Cyrillic.
        #[arg(long)]
        from: Lang,
        text: Vec<String>,
    },
    /// Parallel corpus preparation.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// BLEU and chrF scoring.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Daily request and character counts from a usage log.
    Stats {
        #[arg(long, default_value = "usage.jsonl")]
        log: PathBuf,
        #[arg(long)]
        from: Option<NaiveDate>,
        #[arg(long)]
        to: Option<NaiveDate>,
        #[arg(long)]
        json: bool,
    },
    /// Pseudonymization and deletion of logged data.
    #[command(subcommand)]
    Privacy(PrivacyCommand),
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Read a parallel corpus and write normalized `src<TAB>tgt` lines.
    Ingest {
        /// A single tab-separated file.
        #[arg(long, conflicts_with_all = ["src", "tgt"], required_unless_present_all = ["src", "tgt"])]
        tsv: Option<PathBuf>,
        /// Source side of a line-aligned pair of files.
        #[arg(long, requires = "tgt")]
        src: Option<PathBuf>,
        #[arg(long, requires = "src")]
        tgt: Option<PathBuf>,
        #[arg(long, default_value = "corpus")]
        origin: String,
        #[command(flatten)]
        output: Output,
    },
    /// Apply the filter rules to a `src<TAB>tgt` corpus.
    Filter {
        input: PathBuf,
        /// Rule file (TOML); the built-in cs→uk rules when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Print per-rule rejection counts as TSV instead of the kept pairs.
        #[arg(long)]
        report: bool,
        /// Where kept pairs go; with --report they are only written here.
        #[command(flatten)]
        output: Output,
    },
    /// Schedule authentic and synthetic data into blocks.
    PlanBlocks {
        #[arg(long)]
        authentic: usize,
        #[arg(long, default_value_t = 0)]
        synthetic: usize,
        #[arg(long)]
        block_size: usize,
        /// authentic:synthetic, e.g. 2:1
        #[arg(long, default_value = "1:1")]
        ratio: String,
    },
    /// Translate target-language monolingual text back into the source
    /// language, producing synthetic `src<TAB>tgt` pairs.
    Backtranslate {
        /// One sentence per line, in the target language.
        input: PathBuf,
        #[arg(long, default_value = "cs")]
        src: Lang,
        #[arg(long, default_value = "uk")]
        tgt: Lang,
        /// Base URL of a running gateway; the built-in dictionary when omitted.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        /// Line to resume from after an interruption.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Corpus BLEU of line-aligned hypotheses against references.
    Bleu {
        #[command(flatten)]
        files: ScoreFiles,
        #[arg(long, default_value = "13a")]
        tokenize: Tokenizer,
    },
    /// Corpus chrF of line-aligned hypotheses against references.
    Chrf {
        #[command(flatten)]
        files: ScoreFiles,
    },
    /// BLEU and chrF per domain, user type or topic of an annotated test set.
    Report {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long, default_value = "domain")]
        by: GroupBy,
        #[arg(long, default_value = "13a")]
        tokenize: Tokenizer,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum PrivacyCommand {
    /// Replace personal data in stdin (or a file), one text per line.
    Pseudonymize {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "cs")]
        lang: Lang,
        /// List capitalized tokens of the input that no detector explained,
        /// as `review<TAB>line<TAB>char offset<TAB>token` on stderr.
        #[arg(long)]
        flag_for_review: bool,
    },
    /// Remove every usage-log record of a client.
    Delete {
        client_id: String,
        #[arg(long, default_value = "usage.jsonl")]
        log: PathBuf,
    },
}

#[derive(Args)]
struct ScoreFiles {
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>, String> {
        Ok(match &self.output {
            Some(path) => Box::new(io::BufWriter::new(fs::File::create(path).map_err(|e| io_error(path, e))?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn io_error(path: &Path, err: io::Error) -> String {
    format!("{}: {err}", path.display())
}

fn read_lines(path: &Path) -> Result<Vec<String>, String> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Serve { config } => serve(config),
        Command::Translit { from, text } => {
            let convert = |line: &str| translit::for_language(line, &from).ok_or_else(|| format!("no transliteration for {from}"));
            let mut out = io::stdout().lock();
            if text.is_empty() {
                for line in io::stdin().lock().lines() {
                    writeln!(out, "{}", convert(&line.map_err(|e| e.to_string())?)?).map_err(|e| e.to_string())?;
                }
            } else {
                writeln!(out, "{}", convert(&text.join(" "))?).map_err(|e| e.to_string())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Corpus(c) => corpus(c),
        Command::Eval(c) => eval(c),
        Command::Stats { log, from, to, json } => {
            let file = fs::File::open(&log).map_err(|e| io_error(&log, e))?;
            let report = aggregate_stats(BufReader::new(file), DateRange { from, to });
            let mut out = io::stdout().lock();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?)
            } else {
                let mut text = String::from("date\tsrc\ttgt\trequests\tcharacters\tmean\n");
                for d in &report.days {
                    text += &format!("{}\t{}\t{}\t{}\t{}\t{:.2}\n", d.date, d.src, d.tgt, d.requests, d.characters, d.mean_f64());
                }
                write!(out, "{text}")
            }
            .map_err(|e| e.to_string())?;
            if report.corrupt > 0 {
                eprintln!("skipped {} corrupt lines", report.corrupt);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Privacy(c) => privacy(c),
    }
}

fn serve(config: Option<PathBuf>) -> Result<ExitCode, String> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let config = match config {
        Some(path) => GatewayConfig::load(path),
        None => Ok(GatewayConfig::default()),
    }
    .and_then(GatewayConfig::with_env_overrides)
    .map_err(|e| e.to_string())?;
    config.validate().map_err(|e| e.to_string())?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(prekladac_gateway::serve(config)).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn report_ingest(ingested: &Ingested) {
    eprintln!(
        "{} pairs; skipped {} undecodable, {} malformed, {} empty",
        ingested.pairs.len(),
        ingested.undecodable,
        ingested.malformed,
        ingested.empty
    );
}

fn corpus(command: CorpusCommand) -> Result<ExitCode, String> {
    match command {
        CorpusCommand::Ingest { tsv, src, tgt, origin, output } => {
            let ingested = match (tsv, src, tgt) {
                (Some(path), _, _) => ingest_tsv(path, &origin),
                (None, Some(src), Some(tgt)) => ingest_aligned(src, tgt, &origin),
                _ => return Err("give --tsv or both --src and --tgt".into()),
            }
            .map_err(|e| e.to_string())?;
            report_ingest(&ingested);
            write_tsv(&ingested.pairs, output.writer()?).map_err(|e| e.to_string())?;
        }
        CorpusCommand::Filter { input, rules, report, output } => {
            let rules = match rules {
                Some(path) => RuleSet::load(path).map_err(|e| e.to_string())?,
                None => RuleSet::default(),
            };
            let ingested = ingest_tsv(&input, "corpus").map_err(|e| e.to_string())?;
            report_ingest(&ingested);
            let verdicts = filter_corpus(&ingested.pairs, &rules);
            let kept: Vec<ParallelPair> =
                ingested.pairs.iter().zip(&verdicts).filter(|(_, v)| v.kept).map(|(p, _)| p.clone()).collect();
            if !report || output.output.is_some() {
                write_tsv(&kept, output.writer()?).map_err(|e| e.to_string())?;
            }
            if report {
                print!("{}", FilterReport::new(&rules, &verdicts).to_tsv());
            } else {
                eprintln!("kept {} of {}", kept.len(), ingested.pairs.len());
            }
        }
        CorpusCommand::PlanBlocks { authentic, synthetic, block_size, ratio } => {
            let ratio: Ratio = ratio.parse().map_err(|e: prekladac_core::corpus::CorpusError| e.to_string())?;
            let plan = plan_blocks(authentic, synthetic, block_size, ratio).map_err(|e| e.to_string())?;
            println!("{plan}");
        }
        CorpusCommand::Backtranslate { input, src, tgt, endpoint, batch_size, start, output } => {
            let monolingual = read_lines(&input)?;
            let pool = match &endpoint {
                None => BackendPool::from_registry(BackendRegistry::cs_uk_dictionary()).map_err(|e| e.to_string())?,
                Some(url) => remote_pool(&tgt, &src, url)?,
            };
            let route = backtranslation_route(&pool, &src, &tgt).map_err(|e| e.to_string())?;
            let result = backtranslate_round(&monolingual, start, batch_size, "backtranslation", pool_translator(&pool, &route));
            let mut out = output.writer()?;
            match result {
                Ok(pairs) => {
                    write_tsv(&pairs, &mut out).map_err(|e| e.to_string())?;
                    eprintln!("{} synthetic pairs", pairs.len());
                }
                Err(interrupted) => {
                    write_tsv(&interrupted.done, &mut out).map_err(|e| e.to_string())?;
                    eprintln!(
                        "interrupted at line {}: {}; resume with --start {}",
                        interrupted.cursor, interrupted.error, interrupted.cursor
                    );
                    return Ok(ExitCode::from(EXIT_INTERRUPTED));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// A pool whose only pair `from → to` is served by a remote gateway.
fn remote_pool(from: &Lang, to: &Lang, url: &str) -> Result<BackendPool, String> {
    let mut registry = BackendRegistry::new(Lang::en());
    let descriptor = BackendDescriptor { id: "endpoint".into(), kind: BackendKind::Remote(EndpointConfig::new(url)) };
    registry.register(from.clone(), to.clone(), descriptor).map_err(|e| e.to_string())?;
    BackendPool::from_registry(registry).map_err(|e| e.to_string())
}

fn scores(files: &ScoreFiles) -> Result<(Vec<String>, Vec<String>), String> {
    Ok((read_lines(&files.hyp)?, read_lines(&files.reference)?))
}

fn print_score(score: &MetricScore, json: bool) -> Result<(), String> {
    if json {
        println!("{}", serde_json::to_string_pretty(score).map_err(|e| e.to_string())?);
    } else {
        println!("{:.2}", score.value);
    }
    Ok(())
}

fn eval(command: EvalCommand) -> Result<ExitCode, String> {
    match command {
        EvalCommand::Bleu { files, tokenize } => {
            let (hyps, refs) = scores(&files)?;
            print_score(&bleu(&hyps, &refs, tokenize).map_err(|e| e.to_string())?, files.json)?;
        }
        EvalCommand::Chrf { files } => {
            let (hyps, refs) = scores(&files)?;
            print_score(&chrf(&hyps, &refs).map_err(|e| e.to_string())?, files.json)?;
        }
        EvalCommand::Report { manifest, hyp, by, tokenize, json } => {
            let test_set = load_manifest(&manifest).map_err(|e| e.to_string())?;
            let text = fs::read_to_string(&hyp).map_err(|e| io_error(&hyp, e))?;
            let hyps = parse_hypotheses(&text, &test_set).map_err(|e| e.to_string())?;
            let report = stratified_report(&hyps, &test_set, by, tokenize).map_err(|e| e.to_string())?;
            print!("{}", if json { report.to_json() + "\n" } else { report.render_text() });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn privacy(command: PrivacyCommand) -> Result<ExitCode, String> {
    match command {
        PrivacyCommand::Pseudonymize { input, seed, lang, flag_for_review } => {
            let lines = match &input {
                Some(path) => read_lines(path)?,
                None => io::stdin().lock().lines().collect::<Result<_, _>>().map_err(|e| e.to_string())?,
            };
            let pseudonymizer = Pseudonymizer::shipped();
            let mut out = io::stdout().lock();
            for (n, line) in lines.iter().enumerate() {
                let (text, _) = pseudonymizer.pseudonymize(line, &lang, seed);
                writeln!(out, "{text}").map_err(|e| e.to_string())?;
                if flag_for_review {
                    for token in pseudonymizer.flag_for_review(line) {
                        eprintln!("review\t{}\t{}\t{}", n + 1, token.start, token.token);
                    }
                }
            }
        }
        PrivacyCommand::Delete { client_id, log } => {
            let deleted = UsageLog::new(&log, 0).delete_client_data(&client_id).map_err(|e| io_error(&log, e))?;
            println!("{deleted}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
