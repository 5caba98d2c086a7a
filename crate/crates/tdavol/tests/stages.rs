mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tdavol::stages::{self, L1_NORMS, RETURNS, SV_FILTERED};
use tdavol::PipelineError;
use tdavol_core::oracle::optimal_partitioning;
use tdavol_core::surrogate::SurrogateKind;

#[test]
fn ingest_writes_returns_and_sentiment() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.prices = Some(fixture("prices_800.csv"));
    let r = stages::run_ingest(&cfg).unwrap();
    assert_eq!(r.log_returns.len(), 800);
    assert_eq!(csv_rows(&dir.path().join(RETURNS)).len(), 800);
    assert_eq!(csv_rows(&dir.path().join("sentiment.csv")).len(), 800);
    let m = tdavol::tables::read_series(&dir.path().join(RETURNS), "standardized").unwrap();
    assert_eq!(m, r.standardized);
    assert_eq!(
        list_files(dir.path()),
        [
            "config.txt",
            "fig1_log_returns.svg",
            "manifest.json",
            "returns.csv",
            "sentiment.csv"
        ]
    );
}

#[test]
fn missing_prices_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.prices = None;
    assert!(matches!(
        stages::run_tda(&cfg),
        Err(PipelineError::MissingInput { .. })
    ));
}

#[test]
fn tda_on_400_day_fixture_has_344_windows_and_is_repeatable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let l1 = stages::run_tda(&quick_config(a.path())).unwrap();
    assert_eq!(l1.len(), 344);
    stages::run_tda(&quick_config(b.path())).unwrap();
    let table = read(&a.path().join(L1_NORMS));
    assert_eq!(table.lines().count(), 345);
    assert_eq!(table, read(&b.path().join(L1_NORMS)));
    assert!(l1.max_relative_gap() < 0.02);
    // Anchor dates are strictly increasing.
    assert!(l1.dates.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn constant_prices_give_zero_norms() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("flat.csv");
    write_prices(&prices, &[250.0; 120]);
    let mut cfg = quick_config(&dir.path().join("out"));
    cfg.prices = Some(prices);
    let l1 = stages::run_tda(&cfg).unwrap();
    assert_eq!(l1.len(), 119 - 56 + 1);
    assert!(l1.values.iter().chain(&l1.closed_form).all(|&v| v == 0.0));
    assert!(l1.pair_counts.iter().all(|&c| c == 0));
}

#[test]
fn diagram_dump_has_one_file_per_window() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.dump_diagrams = true;
    let l1 = stages::run_tda(&cfg).unwrap();
    let files = std::fs::read_dir(dir.path().join("diagrams")).unwrap().count();
    assert_eq!(files, l1.len());
    let first = dir.path().join("diagrams").join(format!("{}.tsv", l1.dates[0]));
    let dgm = tdavol_core::PersistenceDiagram::from_tsv(1, &read(&first)).unwrap();
    assert_eq!(dgm.len(), l1.pair_counts[0]);
}

#[test]
fn sv_stage_writes_filter_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let fo = stages::run_sv(&cfg).unwrap();
    let rows = csv_rows(&dir.path().join(SV_FILTERED));
    assert_eq!(rows.len(), 399);
    for (row, s) in rows.iter().zip(&fo.filtered_sigma) {
        let v: f64 = row[3].parse().unwrap();
        assert_eq!(v, *s);
        assert!(v > 0.0);
    }
    let summary = json(&dir.path().join("sv_summary.json"));
    assert_eq!(summary["replicates"].as_array().unwrap().len(), 2);
    assert_eq!(
        summary["filter"]["log_likelihood"].as_f64().unwrap(),
        fo.log_likelihood
    );
}

#[test]
fn sv_with_zero_iterations_filters_at_the_initial_guess() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.set("if2_iterations", "0").unwrap();
    stages::run_sv(&cfg).unwrap();
    let summary = json(&dir.path().join("sv_summary.json"));
    assert_eq!(summary["estimate"], summary["init"]);
}

fn write_pair(dir: &std::path::Path, l1: &[f64], sigma: &[f64]) {
    std::fs::create_dir_all(dir).unwrap();
    let ds = dates(l1.len());
    let mut a = String::from("anchor_date,l1_grid\n");
    let mut b = String::from("date,h_hat,V_hat,sigma_hat\n");
    for i in 0..l1.len() {
        a.push_str(&format!("{},{}\n", ds[i], l1[i]));
        b.push_str(&format!("{},0,0,{}\n", ds[i], sigma[i]));
    }
    std::fs::write(dir.join(L1_NORMS), a).unwrap();
    std::fs::write(dir.join(SV_FILTERED), b).unwrap();
}

fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn compare_needs_upstream_tables() {
    let dir = tempfile::tempdir().unwrap();
    let err = stages::run_compare(&quick_config(dir.path())).unwrap_err();
    assert!(
        matches!(
            err,
            PipelineError::MissingInput {
                producer: "tdavol tda",
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn duplicated_series_correlates_perfectly_without_changepoints() {
    let dir = tempfile::tempdir().unwrap();
    let x: Vec<f64> = noise(300, 1).iter().map(|v| v.abs()).collect();
    write_pair(dir.path(), &x, &x);
    let c = stages::run_compare(&quick_config(dir.path())).unwrap();
    let present: Vec<f64> = c.correlation.iter().flatten().copied().collect();
    assert_eq!(present.len(), 300 - 60 + 1);
    assert!(present.iter().all(|r| (r - 1.0).abs() < 1e-12));
    assert!(c.pelt.unwrap().changepoints.is_empty());
    let report = json(&dir.path().join("changepoints.json"));
    assert_eq!(report["pelt"]["changepoints"].as_array().unwrap().len(), 0);
    assert_eq!(report["penalty_source"], "auto");
}

#[test]
fn negated_series_correlates_at_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let x = noise(200, 2);
    let y: Vec<f64> = x.iter().map(|v| 5.0 - v).collect();
    write_pair(dir.path(), &x, &y);
    let c = stages::run_compare(&quick_config(dir.path())).unwrap();
    assert!(c.correlation.iter().flatten().all(|r| (r + 1.0).abs() < 1e-12));
}

fn break_pair(n: usize, brk: usize) -> (Vec<f64>, Vec<f64>) {
    let x = noise(n, 3);
    let e = noise(n, 4);
    let y = (0..n)
        .map(|t| {
            if t < brk {
                0.9 * x[t] + 0.19f64.sqrt() * e[t]
            } else {
                e[t]
            }
        })
        .map(|v| v + 10.0)
        .collect();
    (x, y)
}

fn first_changepoint(dir: &std::path::Path) -> chrono::NaiveDate {
    let report = json(&dir.join("changepoints.json"));
    report["pelt"]["changepoints"][0]["date"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap()
}

// Correlation 0.9 before the break and 0 after. The correlation series is
// computed over trailing windows, so its level shift lags the break by about
// half a window; a 10-day window keeps that lag inside the tolerance.
#[test]
fn correlation_break_is_located() {
    let (n, brk, w) = (400, 200, 10);
    let (x, y) = break_pair(n, brk);
    let construction = dates(n)[brk];
    let dir = tempfile::tempdir().unwrap();
    write_pair(dir.path(), &x, &y);
    let mut cfg = quick_config(dir.path());
    cfg.roll_window = w;

    // Overlapping windows make the correlation series autocorrelated, so a
    // penalty scaled by the window length is needed for a single segment break.
    let present = {
        let c = stages::run_compare(&cfg).unwrap();
        assert!((first_changepoint(dir.path()) - construction).num_days().abs() <= 10);
        c.correlation.iter().flatten().copied().collect::<Vec<f64>>()
    };
    let penalty = w as f64 * tdavol_core::changepoint::default_penalty(&present);
    cfg.penalty = Some(penalty);
    let c = stages::run_compare(&cfg).unwrap();
    let pelt = c.pelt.as_ref().unwrap();
    let (oracle, _) = optimal_partitioning(&present, penalty);
    assert_eq!(pelt.changepoints, oracle);
    assert_eq!(pelt.changepoints.len(), 1, "{:?}", pelt.changepoints);
    let found = first_changepoint(dir.path());
    assert!(
        (found - construction).num_days().abs() <= 10,
        "{found} vs {construction}"
    );
    let split = c.single_split.as_ref().unwrap();
    assert_eq!(split.changepoints, pelt.changepoints);
}

#[test]
fn explicit_penalty_and_single_mode() {
    let dir = tempfile::tempdir().unwrap();
    let x = noise(300, 5);
    let y: Vec<f64> = x.iter().zip(noise(300, 6)).map(|(a, b)| a + b).collect();
    write_pair(dir.path(), &x, &y);
    let mut cfg = quick_config(dir.path());
    cfg.set("penalty", "1e6").unwrap();
    cfg.set("changepoint_mode", "single").unwrap();
    let c = stages::run_compare(&cfg).unwrap();
    assert!(c.pelt.unwrap().changepoints.is_empty());
    assert_eq!(c.single_split.unwrap().changepoints.len(), 1);
    let report = json(&dir.path().join("changepoints.json"));
    assert_eq!(report["selected"].as_array().unwrap().len(), 1);
    assert_eq!(report["penalty_source"], "config");
}

#[test]
fn null_report_matches_envelope_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    assert!(matches!(
        stages::run_nulls(&cfg),
        Err(PipelineError::MissingInput { .. })
    ));
    stages::run_tda(&cfg).unwrap();
    let summaries = stages::run_nulls(&cfg).unwrap();
    assert_eq!(summaries.len(), 2);
    for s in summaries {
        let rows = csv_rows(&dir.path().join(stages::envelope_file(s.kind)));
        assert_eq!(rows.len(), 344);
        let above = rows.iter().filter(|r| r[5] == "above").count();
        let below = rows.iter().filter(|r| r[5] == "below").count();
        for r in &rows {
            let (lo, hi, obs): (f64, f64, f64) = (
                r[2].parse().unwrap(),
                r[3].parse().unwrap(),
                r[4].parse().unwrap(),
            );
            let expect = if obs < lo {
                "below"
            } else if obs > hi {
                "above"
            } else {
                "inside"
            };
            assert_eq!(r[5], expect);
        }
        let report = json(&dir.path().join(stages::exceedance_file(s.kind)));
        assert_eq!(report["n_above"].as_u64().unwrap() as usize, above);
        assert_eq!(report["n_below"].as_u64().unwrap() as usize, below);
        assert_eq!(report["frac_above"].as_f64().unwrap(), above as f64 / 344.0);
        assert_eq!(report["kind"], s.kind.as_str());
        assert!(dir.path().join(stages::null_figure(s.kind)).is_file());
    }
}

#[test]
fn single_null_kind() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.set("surrogate_kind", "fft").unwrap();
    stages::run_tda(&cfg).unwrap();
    let s = stages::run_nulls(&cfg).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].kind, SurrogateKind::Fft);
    assert!(!dir.path().join("envelope_shuffle.csv").exists());
}
