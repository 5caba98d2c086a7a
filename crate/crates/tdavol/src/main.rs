use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdavol::{stages, AnalysisConfig, Result};

#[derive(Parser)]
#[command(
    name = "tdavol",
    version,
    about = "Persistent-homology and stochastic-volatility analysis of daily returns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean the inputs and write the return table
    Ingest(Options),
    /// Sliding-window persistence landscapes and their L1 norms
    Tda(Options),
    /// IF2 estimation and filtered volatility
    Sv(Options),
    /// Overlay, rolling correlation and changepoints (needs tda and sv outputs)
    Compare(Options),
    /// Surrogate null envelopes and exceedance counts (needs tda outputs)
    Nulls(Options),
    /// Every stage plus the sentiment and residual analyses
    Report(Options),
}

/// Settings shared by every subcommand. Later sources win: built-in defaults,
/// then `--config`, then the flags below.
#[derive(Args)]
struct Options {
    /// Flat `key = value` file using the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    extra: Vec<String>,

    #[arg(long)]
    prices: Option<String>,
    #[arg(long)]
    sentiment: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    price_column: Option<String>,
    /// Embedding dimension
    #[arg(long)]
    m: Option<String>,
    /// Embedding delay
    #[arg(long)]
    d: Option<String>,
    /// Points per window
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    i_max: Option<String>,
    #[arg(long)]
    grid_size: Option<String>,
    #[arg(long)]
    roll_window: Option<String>,
    /// Realizations per null model
    #[arg(long)]
    surrogates: Option<String>,
    /// `shuffle`, `fft` or `shuffle,fft`
    #[arg(long)]
    surrogate_kind: Option<String>,
    #[arg(long)]
    q_low: Option<String>,
    #[arg(long)]
    q_high: Option<String>,
    /// PELT penalty, or `auto`
    #[arg(long)]
    penalty: Option<String>,
    /// `pelt` or `single`
    #[arg(long)]
    changepoint_mode: Option<String>,
    #[arg(long)]
    resid_window: Option<String>,
    #[arg(long)]
    acf_lags: Option<String>,
    #[arg(long)]
    if2_iterations: Option<String>,
    #[arg(long)]
    if2_replicates: Option<String>,
    #[arg(long)]
    if2_particles: Option<String>,
    #[arg(long)]
    if2_eval_particles: Option<String>,
    #[arg(long)]
    if2_evals: Option<String>,
    /// One value, or four for mu, logit phi, log sigma_eta, h0
    #[arg(long)]
    if2_rw_sd: Option<String>,
    #[arg(long)]
    if2_cooling: Option<String>,
    #[arg(long)]
    filter_particles: Option<String>,
    /// Write each window's diagram to diagrams/<date>.tsv
    #[arg(long)]
    dump_diagrams: Option<String>,
    /// Worker threads (default: all cores); never changes results
    #[arg(long)]
    workers: Option<String>,
}

impl Options {
    fn config(&self) -> Result<AnalysisConfig> {
        let mut cfg = AnalysisConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("prices", &self.prices),
            ("sentiment", &self.sentiment),
            ("out", &self.out),
            ("seed", &self.seed),
            ("price_column", &self.price_column),
            ("m", &self.m),
            ("d", &self.d),
            ("window", &self.window),
            ("stride", &self.stride),
            ("i_max", &self.i_max),
            ("grid_size", &self.grid_size),
            ("roll_window", &self.roll_window),
            ("surrogates", &self.surrogates),
            ("surrogate_kind", &self.surrogate_kind),
            ("q_low", &self.q_low),
            ("q_high", &self.q_high),
            ("penalty", &self.penalty),
            ("changepoint_mode", &self.changepoint_mode),
            ("resid_window", &self.resid_window),
            ("acf_lags", &self.acf_lags),
            ("if2_iterations", &self.if2_iterations),
            ("if2_replicates", &self.if2_replicates),
            ("if2_particles", &self.if2_particles),
            ("if2_eval_particles", &self.if2_eval_particles),
            ("if2_evals", &self.if2_evals),
            ("if2_rw_sd", &self.if2_rw_sd),
            ("if2_cooling", &self.if2_cooling),
            ("filter_particles", &self.filter_particles),
            ("dump_diagrams", &self.dump_diagrams),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.extra {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                tdavol::PipelineError::Config(format!("--set expects KEY=VALUE, got {kv:?}"))
            })?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(command: Command) -> Result<()> {
    let (opts, stage): (Options, fn(&AnalysisConfig) -> Result<()>) = match command {
        Command::Ingest(o) => (o, |c| stages::run_ingest(c).map(drop)),
        Command::Tda(o) => (o, |c| {
            let l1 = stages::run_tda(c)?;
            log::info!("{} windows", l1.len());
            Ok(())
        }),
        Command::Sv(o) => (o, |c| stages::run_sv(c).map(drop)),
        Command::Compare(o) => (o, |c| stages::run_compare(c).map(drop)),
        Command::Nulls(o) => (o, |c| {
            for s in stages::run_nulls(c)? {
                log::info!(
                    "{}: {:.1}% above, {:.1}% below",
                    s.kind,
                    100.0 * s.frac_above,
                    100.0 * s.frac_below
                );
            }
            Ok(())
        }),
        Command::Report(o) => (o, |c| {
            let r = stages::run_report(c)?;
            log::info!("{} windows, {} files written", r.windows, r.files.len() + 1);
            Ok(())
        }),
    };
    let cfg = opts.config()?;
    stages::with_workers(cfg.workers, || stage(&cfg))??;
    println!("{}", cfg.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
