//! The analysis stages behind each subcommand.
//!
//! `tda` and `sv` start from the raw inputs. `compare` and `nulls` read the
//! tables earlier stages left in the output directory, so they can be rerun
//! with different settings without recomputing everything. `report` runs the
//! whole chain and adds the sentiment and residual analyses.

use std::path::{Path, PathBuf};

use serde_json::json;
use tdavol_core::changepoint::{best_single_split, default_penalty, pelt};
use tdavol_core::embedding::windows_for_series;
use tdavol_core::landscape::l1_series_with_diagrams;
use tdavol_core::rng::derive_seed;
use tdavol_core::surrogate::{exceedance, null_envelope, SurrogateKind};
use tdavol_core::svmodel::{if2_estimate, init_heuristic, particle_filter};
use tdavol_core::timeseries::{
    acf, box_summary, classify_sentiment, inner_join, log_returns, residualize_l1, rolling_correlation,
    standardize, Regime, SentimentBins,
};
use tdavol_core::{
    ChangepointResult, Error as CoreError, LandscapeNormSeries, ReturnSeries, SentimentSeries,
};

use crate::config::{AnalysisConfig, ChangepointMode};
use crate::error::{PipelineError, Result};
use crate::ingest::{read_prices, read_sentiment};
use crate::manifest::{write_manifest, Entry};
use crate::svg::{self, Band, Line, TimeChart};
use crate::tables::{num, opt, read_columns, read_series, write_csv, write_json, write_text};

pub const RETURNS: &str = "returns.csv";
pub const SENTIMENT: &str = "sentiment.csv";
pub const L1_NORMS: &str = "l1_norms.csv";
pub const SV_FILTERED: &str = "sv_filtered.csv";
pub const SV_SUMMARY: &str = "sv_summary.json";
pub const OVERLAY: &str = "overlay.csv";
pub const ROLLING: &str = "rolling_correlation.csv";
pub const CHANGEPOINTS: &str = "changepoints.json";
pub const REGIMES: &str = "regimes.csv";
pub const RESID_REGRESSION: &str = "residual_regression.json";
pub const RESID_ACF: &str = "residual_acf.csv";
pub const CONFIG: &str = "config.txt";

pub fn envelope_file(kind: SurrogateKind) -> String {
    format!("envelope_{kind}.csv")
}

pub fn exceedance_file(kind: SurrogateKind) -> String {
    format!("exceedance_{kind}.json")
}

pub fn null_figure(kind: SurrogateKind) -> &'static str {
    match kind {
        SurrogateKind::Shuffle => "fig8_shuffle_null.svg",
        SurrogateKind::Fft => "fig9_fft_null.svg",
    }
}

fn path(cfg: &AnalysisConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn require(cfg: &AnalysisConfig, name: &str, stage: &'static str, producer: &'static str) -> Result<PathBuf> {
    let p = path(cfg, name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(PipelineError::MissingInput {
            stage,
            what: p.display().to_string(),
            producer,
        })
    }
}

fn figure(cfg: &AnalysisConfig, name: &str, svg: String) -> Result<()> {
    write_text(&path(cfg, name), &svg)
}

/// Validates the configuration and creates the output directory.
pub fn prepare(cfg: &AnalysisConfig) -> Result<()> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(PipelineError::io(&cfg.out))
}

/// Writes the effective config and refreshes the manifest.
pub fn finalize(cfg: &AnalysisConfig) -> Result<Vec<Entry>> {
    write_text(&path(cfg, CONFIG), &cfg.to_text())?;
    write_manifest(cfg)
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| PipelineError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone)]
pub struct Returns {
    pub log_returns: ReturnSeries,
    pub standardized: ReturnSeries,
}

/// Log returns of the configured price column, standardized over the full
/// sample. A series with no variation is centered instead.
pub fn load_returns(cfg: &AnalysisConfig) -> Result<Returns> {
    let prices_path = cfg.prices.as_ref().ok_or_else(|| PipelineError::MissingInput {
        stage: "ingest",
        what: "a price file (--prices)".into(),
        producer: "tdavol ingest --prices <csv>",
    })?;
    let prices = read_prices(prices_path, &cfg.price_column)?;
    let log_returns = log_returns(&prices.series)?.renamed("log_return");
    let standardized = match standardize(&log_returns) {
        Ok(s) => s,
        Err(CoreError::ZeroVariance) => {
            log::warn!("returns have zero variance; using the centered series");
            let m = tdavol_core::timeseries::mean(log_returns.values());
            log_returns.map_values(|v| v - m)?
        }
        Err(e) => return Err(e.into()),
    }
    .renamed("standardized");
    Ok(Returns {
        log_returns,
        standardized,
    })
}

fn load_sentiment(cfg: &AnalysisConfig) -> Result<SentimentSeries> {
    let p = cfg
        .sentiment
        .as_ref()
        .ok_or_else(|| PipelineError::MissingInput {
            stage: "report",
            what: "a sentiment file (--sentiment)".into(),
            producer: "tdavol report --sentiment <json>",
        })?;
    Ok(classify_sentiment(&read_sentiment(p)?, &SentimentBins::default()))
}

fn write_returns(cfg: &AnalysisConfig, r: &Returns) -> Result<()> {
    write_csv(
        &path(cfg, RETURNS),
        &["date", "log_return", "standardized"],
        r.log_returns
            .iter()
            .zip(r.standardized.values())
            .map(|((d, v), s)| vec![d.to_string(), num(v), num(*s)]),
    )?;
    let chart = TimeChart {
        title: "Daily log returns".into(),
        y_label: "log return".into(),
        lines: vec![Line::new(
            "log return",
            svg::BLUE,
            r.log_returns.dates(),
            r.log_returns.values(),
        )],
        hlines: vec![0.0],
        ..Default::default()
    };
    figure(cfg, "fig1_log_returns.svg", chart.render(&cfg.digest()))
}

fn write_sentiment(cfg: &AnalysisConfig, s: &SentimentSeries) -> Result<()> {
    write_csv(
        &path(cfg, SENTIMENT),
        &["date", "value", "label"],
        s.dates()
            .iter()
            .zip(s.values())
            .zip(s.labels())
            .map(|((d, v), l)| {
                vec![
                    d.to_string(),
                    v.to_string(),
                    l.map(|l| l.to_string()).unwrap_or_default(),
                ]
            }),
    )
}

/// Reads the inputs and writes the cleaned return (and sentiment) tables.
pub fn run_ingest(cfg: &AnalysisConfig) -> Result<Returns> {
    prepare(cfg)?;
    let r = load_returns(cfg)?;
    write_returns(cfg, &r)?;
    if cfg.sentiment.is_some() {
        write_sentiment(cfg, &load_sentiment(cfg)?)?;
    }
    finalize(cfg)?;
    Ok(r)
}

fn tda_inner(cfg: &AnalysisConfig) -> Result<LandscapeNormSeries> {
    let r = load_returns(cfg)?;
    write_returns(cfg, &r)?;
    let windows = windows_for_series(&r.standardized, &cfg.tda.embedding)?;
    log::info!("computing persistence for {} windows", windows.len());
    let (l1, diagrams) = l1_series_with_diagrams(&windows, &cfg.tda.landscape, cfg.dump_diagrams)?;
    log::info!(
        "largest grid/closed-form relative gap: {:.3e}",
        l1.max_relative_gap()
    );
    write_csv(
        &path(cfg, L1_NORMS),
        &["anchor_date", "l1_grid", "l1_closed_form", "n_pairs"],
        (0..l1.len()).map(|i| {
            vec![
                l1.dates[i].to_string(),
                num(l1.values[i]),
                num(l1.closed_form[i]),
                l1.pair_counts[i].to_string(),
            ]
        }),
    )?;
    if cfg.dump_diagrams {
        let dir = path(cfg, "diagrams");
        std::fs::create_dir_all(&dir).map_err(PipelineError::io(&dir))?;
        for (date, dgm) in l1.dates.iter().zip(&diagrams) {
            write_text(&dir.join(format!("{date}.tsv")), &dgm.to_tsv())?;
        }
    }
    let chart = TimeChart {
        title: format!(
            "L1 norm of the H1 persistence landscape (m={}, d={}, w={})",
            cfg.tda.embedding.dimension, cfg.tda.embedding.delay, cfg.tda.embedding.window
        ),
        y_label: "L1 norm".into(),
        lines: vec![Line::new("L1 norm", svg::BLUE, &l1.dates, &l1.values)],
        ..Default::default()
    };
    figure(cfg, "fig2_l1_norm.svg", chart.render(&cfg.digest()))?;
    Ok(l1)
}

/// Sliding-window persistence and landscape norms of the standardized returns.
pub fn run_tda(cfg: &AnalysisConfig) -> Result<LandscapeNormSeries> {
    prepare(cfg)?;
    let l1 = tda_inner(cfg)?;
    finalize(cfg)?;
    Ok(l1)
}

fn sv_inner(cfg: &AnalysisConfig) -> Result<tdavol_core::FilterOutput> {
    let r = load_returns(cfg)?;
    let z = &r.standardized;
    let init = init_heuristic(z.values())?;
    let mut settings = cfg.if2.clone();
    settings.seed = derive_seed(cfg.seed, "sv-if2", 0);
    let est = if2_estimate(z, &init, &settings)?;
    let filter_seed = derive_seed(cfg.seed, "sv-filter", 0);
    let fo = particle_filter(z, &est.params, cfg.filter_particles, filter_seed)?;
    write_csv(
        &path(cfg, SV_FILTERED),
        &["date", "h_hat", "V_hat", "sigma_hat"],
        (0..fo.dates.len()).map(|i| {
            vec![
                fo.dates[i].to_string(),
                num(fo.filtered_h[i]),
                num(fo.filtered_variance[i]),
                num(fo.filtered_sigma[i]),
            ]
        }),
    )?;
    let min_ess = fo.ess.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_ess = fo.ess.iter().sum::<f64>() / fo.ess.len() as f64;
    write_json(
        &path(cfg, SV_SUMMARY),
        &json!({
            "observations": z.len(),
            "init": init,
            "estimate": est.params,
            "aggregated_log_likelihood": est.log_likelihood,
            "best_replicate": est.best_replicate,
            "replicates": est.replicates,
            "settings": settings,
            "filter": {
                "particles": fo.particle_count,
                "seed": filter_seed,
                "log_likelihood": fo.log_likelihood,
                "min_ess": min_ess,
                "mean_ess": mean_ess,
            },
        }),
    )?;
    let chart = TimeChart {
        title: "Filtered stochastic volatility".into(),
        y_label: "sigma_hat".into(),
        lines: vec![Line::new("sigma_hat", svg::RED, &fo.dates, &fo.filtered_sigma)],
        ..Default::default()
    };
    figure(cfg, "fig4_sv_sigma.svg", chart.render(&cfg.digest()))?;
    Ok(fo)
}

/// IF2 estimation on the standardized returns and the filtered volatility at the estimate.
pub fn run_sv(cfg: &AnalysisConfig) -> Result<tdavol_core::FilterOutput> {
    prepare(cfg)?;
    let fo = sv_inner(cfg)?;
    finalize(cfg)?;
    Ok(fo)
}

fn changepoint_json(r: &ChangepointResult, dates: &[chrono::NaiveDate]) -> serde_json::Value {
    json!({
        "changepoints": r.changepoints.iter().map(|&i| json!({"index": i, "date": dates[i].to_string()})).collect::<Vec<_>>(),
        "segment_means": r.segment_means,
        "cost": r.cost,
    })
}

/// Outputs of the comparison stage.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub dates: Vec<chrono::NaiveDate>,
    pub l1_z: Vec<f64>,
    pub sigma_z: Vec<f64>,
    pub correlation: Vec<Option<f64>>,
    pub pelt: Option<ChangepointResult>,
    pub single_split: Option<ChangepointResult>,
    pub penalty: f64,
}

fn compare_inner(cfg: &AnalysisConfig) -> Result<Comparison> {
    let l1 = read_series(&require(cfg, L1_NORMS, "compare", "tdavol tda")?, "l1_grid")?;
    let sigma = read_series(&require(cfg, SV_FILTERED, "compare", "tdavol sv")?, "sigma_hat")?;
    let l1_z = standardize(&l1)?;
    let sigma_z = standardize(&sigma)?;
    let (dates, joined) = inner_join(&[&l1_z, &sigma_z]);
    if dates.is_empty() {
        return Err(CoreError::EmptyJoin.into());
    }
    write_csv(
        &path(cfg, OVERLAY),
        &["date", "l1_z", "sigma_z"],
        (0..dates.len()).map(|i| vec![dates[i].to_string(), num(joined[0][i]), num(joined[1][i])]),
    )?;
    let rc = rolling_correlation(&l1_z, &sigma_z, cfg.roll_window)?;
    write_csv(
        &path(cfg, ROLLING),
        &["date", "correlation"],
        rc.dates
            .iter()
            .zip(&rc.values)
            .map(|(d, v)| vec![d.to_string(), opt(*v)]),
    )?;

    let present = rc.present()?;
    let penalty = cfg.penalty.unwrap_or_else(|| default_penalty(present.values()));
    let (pelt_result, split) = if present.len() >= 2 {
        (
            Some(pelt(present.values(), penalty)?),
            Some(best_single_split(present.values(), penalty)?),
        )
    } else {
        log::warn!("rolling correlation has fewer than 2 values; skipping changepoint detection");
        (None, None)
    };
    let selected = match cfg.changepoint_mode {
        ChangepointMode::Pelt => pelt_result.as_ref(),
        ChangepointMode::Single => split.as_ref(),
    };
    let markers: Vec<_> = selected
        .map(|r| r.changepoints.iter().map(|&i| present.dates()[i]).collect())
        .unwrap_or_default();
    write_json(
        &path(cfg, CHANGEPOINTS),
        &json!({
            "mode": cfg.changepoint_mode.as_str(),
            "penalty": penalty,
            "penalty_source": if cfg.penalty.is_some() { "config" } else { "auto" },
            "n": present.len(),
            "missing": rc.missing(),
            "selected": markers.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "pelt": pelt_result.as_ref().map(|r| changepoint_json(r, present.dates())),
            "single_split": split.as_ref().map(|r| changepoint_json(r, present.dates())),
        }),
    )?;

    let digest = cfg.digest();
    let overlay = TimeChart {
        title: "Standardized L1 norm and filtered volatility".into(),
        y_label: "z-score".into(),
        lines: vec![
            Line::new("L1 norm (z)", svg::BLUE, &dates, &joined[0]),
            Line::new("SV sigma (z)", svg::RED, &dates, &joined[1]),
        ],
        hlines: vec![0.0],
        ..Default::default()
    };
    figure(cfg, "fig5_overlay.svg", overlay.render(&digest))?;
    let mut corr_line = Line::new("rolling correlation", svg::BLUE, &[], &[]);
    corr_line.points = rc.dates.iter().copied().zip(rc.values.iter().copied()).collect();
    let corr = TimeChart {
        title: format!(
            "Rolling correlation of L1 norm and SV ({}-day window)",
            cfg.roll_window
        ),
        y_label: "correlation".into(),
        lines: vec![corr_line],
        markers,
        hlines: vec![0.0],
        ..Default::default()
    };
    figure(cfg, "fig6_rolling_correlation.svg", corr.render(&digest))?;
    Ok(Comparison {
        dates,
        l1_z: joined[0].clone(),
        sigma_z: joined[1].clone(),
        correlation: rc.values,
        pelt: pelt_result,
        single_split: split,
        penalty,
    })
}

/// Overlay, rolling correlation and changepoints from the `tda` and `sv` tables.
pub fn run_compare(cfg: &AnalysisConfig) -> Result<Comparison> {
    prepare(cfg)?;
    let c = compare_inner(cfg)?;
    finalize(cfg)?;
    Ok(c)
}

/// Reads `l1_norms.csv` back into a norm series.
pub fn read_l1(path: &Path) -> Result<LandscapeNormSeries> {
    let (dates, cols) = read_columns(path, &["l1_grid", "l1_closed_form", "n_pairs"])?;
    let missing = || PipelineError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: "empty cell in l1 table".into(),
    };
    let take = |c: &Vec<Option<f64>>| {
        c.iter()
            .map(|v| v.ok_or_else(missing))
            .collect::<Result<Vec<_>>>()
    };
    Ok(LandscapeNormSeries {
        dates,
        values: take(&cols[0])?,
        closed_form: take(&cols[1])?,
        pair_counts: take(&cols[2])?.into_iter().map(|v| v as usize).collect(),
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NullSummary {
    pub kind: SurrogateKind,
    pub n_windows: usize,
    pub n_below: usize,
    pub n_above: usize,
    pub frac_below: f64,
    pub frac_above: f64,
    pub seed: u64,
    pub realizations: usize,
    pub requested: usize,
    pub levels: (f64, f64),
}

fn nulls_inner(cfg: &AnalysisConfig) -> Result<Vec<NullSummary>> {
    let observed = read_l1(&require(cfg, L1_NORMS, "nulls", "tdavol tda")?)?;
    let z = read_series(&require(cfg, RETURNS, "nulls", "tdavol tda")?, "standardized")?;
    let seed = derive_seed(cfg.seed, "surrogates", 0);
    let levels = (cfg.quantile_low, cfg.quantile_high);
    let digest = cfg.digest();
    let mut out = Vec::new();
    for &kind in &cfg.surrogate_kinds {
        log::info!("{kind}: {} realizations", cfg.surrogates);
        let env = null_envelope(&z, kind, cfg.surrogates, seed, &cfg.tda, levels)?;
        let report = exceedance(&observed, &env)?;
        write_csv(
            &path(cfg, &envelope_file(kind)),
            &["anchor_date", "null_mean", "q05", "q95", "observed", "flag"],
            report.rows.iter().map(|&(d, v, i, flag)| {
                vec![
                    d.to_string(),
                    num(env.mean[i]),
                    num(env.lower[i]),
                    num(env.upper[i]),
                    num(v),
                    flag.as_str().to_string(),
                ]
            }),
        )?;
        let summary = NullSummary {
            kind,
            n_windows: report.n_windows,
            n_below: report.n_below,
            n_above: report.n_above,
            frac_below: report.frac_below,
            frac_above: report.frac_above,
            seed,
            realizations: env.realizations,
            requested: env.requested,
            levels,
        };
        write_json(&path(cfg, &exceedance_file(kind)), &summary)?;

        let dates: Vec<_> = report.rows.iter().map(|r| r.0).collect();
        let pick = |v: &[f64]| report.rows.iter().map(|r| v[r.2]).collect::<Vec<_>>();
        let mut null_mean = Line::new("null mean", svg::GREY, &dates, &pick(&env.mean));
        null_mean.dashed = true;
        let chart = TimeChart {
            title: format!(
                "Observed L1 norm vs {kind} null ({} realizations; above {:.1}%, below {:.1}%)",
                env.realizations,
                100.0 * report.frac_above,
                100.0 * report.frac_below
            ),
            y_label: "L1 norm".into(),
            lines: vec![
                Line::new(
                    "observed",
                    svg::BLUE,
                    &dates,
                    &report.rows.iter().map(|r| r.1).collect::<Vec<_>>(),
                ),
                null_mean,
            ],
            bands: vec![Band {
                label: format!("null {}-{}% band", 100.0 * levels.0, 100.0 * levels.1),
                color: svg::ORANGE,
                dates: dates.clone(),
                lower: pick(&env.lower),
                upper: pick(&env.upper),
            }],
            points: report
                .rows
                .iter()
                .filter(|r| r.3 != tdavol_core::surrogate::Flag::Inside)
                .map(|r| (r.0, r.1, svg::RED))
                .collect(),
            ..Default::default()
        };
        figure(cfg, null_figure(kind), chart.render(&digest))?;
        out.push(summary);
    }
    Ok(out)
}

/// Surrogate envelopes and exceedance reports for each configured null model.
pub fn run_nulls(cfg: &AnalysisConfig) -> Result<Vec<NullSummary>> {
    prepare(cfg)?;
    let s = nulls_inner(cfg)?;
    finalize(cfg)?;
    Ok(s)
}

fn regimes(cfg: &AnalysisConfig, l1: &LandscapeNormSeries, sentiment: &SentimentSeries) -> Result<usize> {
    let by_date: std::collections::HashMap<_, _> = sentiment
        .dates()
        .iter()
        .zip(sentiment.labels())
        .filter_map(|(d, l)| Some((*d, (*l)?)))
        .collect();
    let groups: Vec<(Regime, Vec<f64>)> = Regime::ALL
        .iter()
        .map(|&r| {
            let values = l1
                .dates
                .iter()
                .zip(&l1.values)
                .filter(|(d, _)| by_date.get(d) == Some(&r))
                .map(|(_, &v)| v)
                .collect();
            (r, values)
        })
        .collect();
    let summaries: Vec<(String, tdavol_core::timeseries::BoxSummary<f64>)> = groups
        .iter()
        .filter_map(|(r, v)| Some((r.to_string(), box_summary(v)?)))
        .collect();
    write_csv(
        &path(cfg, REGIMES),
        &[
            "regime",
            "count",
            "median",
            "q1",
            "q3",
            "whisker_low",
            "whisker_high",
            "outliers",
        ],
        summaries.iter().map(|(name, b)| {
            vec![
                name.clone(),
                b.count.to_string(),
                num(b.median),
                num(b.q1),
                num(b.q3),
                num(b.whisker_low),
                num(b.whisker_high),
                b.outliers.to_string(),
            ]
        }),
    )?;
    figure(
        cfg,
        "fig3_sentiment_regimes.svg",
        svg::box_chart(
            "L1 norm by sentiment regime",
            "L1 norm",
            &summaries,
            &cfg.digest(),
        ),
    )?;
    Ok(summaries.len())
}

fn residuals(cfg: &AnalysisConfig, l1: &LandscapeNormSeries, sentiment: &SentimentSeries) -> Result<()> {
    let l1_series = ReturnSeries::new("l1", l1.dates.clone(), l1.values.clone())?;
    let sigma = read_series(&require(cfg, SV_FILTERED, "report", "tdavol sv")?, "sigma_hat")?;
    let fit = residualize_l1(&l1_series, &sigma, sentiment, cfg.resid_window)?;
    let n = fit.residuals.len();
    write_json(
        &path(cfg, RESID_REGRESSION),
        &json!({
            "window": fit.window,
            "observations": n,
            "names": fit.names,
            "coefficients": fit.coefficients,
            "r_squared": fit.r_squared,
        }),
    )?;
    let max_lag = cfg.acf_lags.min(n.saturating_sub(1));
    let a = acf(&fit.residuals, max_lag)?;
    write_csv(
        &path(cfg, RESID_ACF),
        &["lag", "acf", "significant"],
        a.values.iter().enumerate().map(|(k, v)| {
            vec![
                k.to_string(),
                num(*v),
                (k > 0 && v.abs() > a.confidence_halfwidth).to_string(),
            ]
        }),
    )?;
    figure(
        cfg,
        "fig7_residual_acf.svg",
        svg::acf_chart(
            &format!(
                "ACF of residual L1 norm ({}-day covariate window)",
                cfg.resid_window
            ),
            &a.values,
            a.confidence_halfwidth,
            &cfg.digest(),
        ),
    )
}

/// Summary of a full report run.
#[derive(Debug, Clone)]
pub struct Report {
    pub windows: usize,
    pub regimes: usize,
    pub nulls: Vec<NullSummary>,
    pub files: Vec<Entry>,
}

/// Every stage, the sentiment-regime table and the residual ACF, then the manifest.
pub fn run_report(cfg: &AnalysisConfig) -> Result<Report> {
    prepare(cfg)?;
    let sentiment = load_sentiment(cfg)?;
    write_sentiment(cfg, &sentiment)?;
    let l1 = tda_inner(cfg)?;
    sv_inner(cfg)?;
    compare_inner(cfg)?;
    let nulls = nulls_inner(cfg)?;
    let regimes = regimes(cfg, &l1, &sentiment)?;
    residuals(cfg, &l1, &sentiment)?;
    let files = finalize(cfg)?;
    Ok(Report {
        windows: l1.len(),
        regimes,
        nulls,
        files,
    })
}
