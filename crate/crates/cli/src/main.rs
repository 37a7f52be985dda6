use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sst_core::typespace::budget_from_env;
use sst_core::{
    build_code, coding_limit, empirical_histogram, encode, exhaustive_stats, run_experiment,
    verify_bijection, Error, ExperimentConfig, IndexCache, Sequence, Shaper, ShapingParams,
};

#[derive(Parser)]
#[command(name = "sst", version, about = "Table-free set shaping, Huffman coding and experiments")]
struct Cli {
    /// Directory for cached shaped indexes.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coding limit of a sequence in bits.
    Lc(SeqArgs),
    /// Apply the shaping transform.
    Shape(ShapeArgs),
    /// Invert the shaping transform.
    Unshape(ShapeArgs),
    /// Huffman codebook built from the sequence's own frequencies.
    Huffman(SeqArgs),
    /// Monte-Carlo experiment.
    Experiment(ExperimentArgs),
    /// Check the transform against the brute-force table.
    Verify(GridArgs),
    /// Exact statistics over every input sequence.
    Stats(GridArgs),
}

#[derive(Args)]
struct SeqArgs {
    #[arg(long)]
    ns: u32,
    /// Space-separated symbols in 1..=ns.
    #[arg(long, conflicts_with = "seq_file", required_unless_present = "seq_file")]
    seq: Option<String>,
    /// File with whitespace-separated symbols.
    #[arg(long)]
    seq_file: Option<PathBuf>,
}

impl SeqArgs {
    fn sequence(&self) -> Result<Sequence, Error> {
        let text = match (&self.seq, &self.seq_file) {
            (Some(s), _) => s.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)?,
            (None, None) => unreachable!("clap requires one of --seq/--seq-file"),
        };
        Sequence::parse(&text, self.ns)
    }
}

#[derive(Args)]
struct ShapeArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    ns: u32,
    /// Sequence length N; defaults to 2*ns.
    #[arg(long)]
    len: Option<usize>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    history: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-trial records as CSV.
    #[arg(long)]
    trials_csv: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    ns: u32,
    #[arg(long)]
    len: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => code,
        Err(err) => {
            let _ = out.flush();
            eprintln!("error: {}: {err}", err.name());
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode, Error> {
    let cache = match &cli.cache_dir {
        Some(dir) => IndexCache::with_dir(dir),
        None => IndexCache::new(),
    };
    let budget = budget_from_env()?;
    match cli.command {
        Command::Lc(args) => {
            let seq = args.sequence()?;
            writeln!(out, "{:.6}", coding_limit(&seq)?)?;
        }
        Command::Shape(args) => {
            let x = args.seq.sequence()?;
            let shaper = shaper(x.ns(), x.len(), args.k, budget, &cache)?;
            writeln!(out, "{}", shaper.shape(&x)?)?;
        }
        Command::Unshape(args) => {
            let y = args.seq.sequence()?;
            if y.len() <= args.k {
                return Err(Error::InvalidParameter(format!(
                    "sequence of length {} is too short for K={}",
                    y.len(),
                    args.k
                )));
            }
            let shaper = shaper(y.ns(), y.len() - args.k, args.k, budget, &cache)?;
            writeln!(out, "{}", shaper.unshape(&y)?)?;
        }
        Command::Huffman(args) => {
            let seq = args.sequence()?;
            let code = build_code(&empirical_histogram(&seq)?)?;
            for (symbol, word) in code.iter() {
                writeln!(out, "{symbol} {word}")?;
            }
            writeln!(out, "total_bits {}", encode(&seq, &code)?.len())?;
        }
        Command::Experiment(args) => experiment(args, budget, &cache, out)?,
        Command::Verify(args) => {
            let report = verify_bijection(args.ns, args.len, args.k)?;
            writeln!(
                out,
                "rows {} shape_mismatches {} unshape_mismatches {} non_image_checked {} non_image_accepted {}",
                report.rows,
                report.shape_mismatches,
                report.unshape_mismatches,
                report.non_image_checked,
                report.non_image_accepted
            )?;
            if let Some(failure) = &report.first_failure {
                writeln!(out, "first_failure {failure}")?;
            }
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict}")?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Stats(args) => {
            let s = exhaustive_stats(args.ns, args.len, args.k, budget)?;
            writeln!(out, "inputs {}", s.inputs)?;
            writeln!(out, "mean_lc_x {:.6}", s.mean_lc_x)?;
            writeln!(out, "mean_lc_y {:.6}", s.mean_lc_y)?;
            writeln!(out, "delta {:.6}", s.delta())?;
            writeln!(out, "mean_code_len_y {:.6}", s.mean_code_len_y)?;
            writeln!(out, "successes {}", s.successes)?;
            writeln!(out, "success_fraction {:.6}", s.success_fraction)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn shaper(ns: u32, n: usize, k: usize, budget: u64, cache: &IndexCache) -> Result<Shaper, Error> {
    let params = ShapingParams::new(ns, n).with_k(k).with_budget(budget);
    Shaper::new(params, cache)
}

fn experiment(
    args: ExperimentArgs,
    budget: u64,
    cache: &IndexCache,
    out: &mut impl Write,
) -> Result<(), Error> {
    let mut config = ExperimentConfig::new(args.ns)
        .with_k(args.k)
        .with_history(args.history)
        .with_seed(args.seed)
        .with_budget(budget);
    if let Some(len) = args.len {
        config = config.with_len(len);
    }
    let run = run_experiment(&config, cache)?;
    let json = serde_json::to_string_pretty(&run.report).expect("report serializes");
    writeln!(out, "{json}")?;
    if let Some(path) = &args.out {
        let mut file = BufWriter::new(File::create(path)?);
        writeln!(file, "{json}")?;
        file.flush()?;
    }
    if let Some(path) = &args.trials_csv {
        let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
        for trial in &run.trials {
            writer.serialize(trial).map_err(csv_error)?;
        }
        writer.flush()?;
    }
    Ok(())
}

fn csv_error(err: csv::Error) -> Error {
    Error::Io(std::io::Error::other(err))
}
