use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tdavol_core::changepoint::pelt_mean_shift;
use tdavol_core::embedding::{windows_for_series, EmbeddingConfig};
use tdavol_core::landscape::{
    l1_closed_form, l1_series, landscape_from_diagram, lp_norm_grid, LandscapeConfig, TdaConfig,
};
use tdavol_core::oracle::{naive_h1_pairs, optimal_partitioning};
use tdavol_core::persistence::{diagram_for_cloud, pairwise_distances};
use tdavol_core::surrogate::{exceedance, null_envelope, surrogate, SurrogateKind, DEFAULT_LEVELS};
use tdavol_core::svmodel::{particle_filter, simulate};
use tdavol_core::timeseries::standardize;
use tdavol_core::{PersistenceDiagram, ReturnSeries, SvParams};

fn dated(values: Vec<f64>) -> ReturnSeries {
    let start = chrono::NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let dates = (0..values.len())
        .map(|i| start + chrono::Duration::days(i as i64))
        .collect();
    ReturnSeries::new("z", dates, values).unwrap()
}

fn sv_returns(n: usize, seed: u64) -> ReturnSeries {
    let params = SvParams::new(-1.0, 0.97, 0.15, -1.0).unwrap();
    standardize(&dated(simulate(&params, n, seed).unwrap().z)).unwrap()
}

#[test]
fn default_landscape_tracks_closed_form_on_random_diagrams() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cfg = LandscapeConfig::default();
    for _ in 0..100 {
        let k = rng.random_range(1..=cfg.i_max);
        let pairs: Vec<(f64, f64)> = (0..k)
            .map(|_| {
                let b = rng.random_range(0.0..2.0);
                (b, b + rng.random_range(0.05..1.5))
            })
            .collect();
        let dgm = PersistenceDiagram::from_pairs(1, &pairs).unwrap();
        let grid = lp_norm_grid(&landscape_from_diagram(&dgm, &cfg).unwrap(), 1.0).unwrap();
        let exact = l1_closed_form(&dgm).unwrap();
        assert!(
            (grid - exact).abs() / exact.max(1e-12) < 0.02,
            "{grid} vs {exact}"
        );
    }
}

#[test]
fn window_diagrams_match_the_naive_reduction() {
    let z = sv_returns(120, 1);
    let windows = windows_for_series(&z, &EmbeddingConfig::default()).unwrap();
    for w in windows.iter().step_by(13) {
        let dist = pairwise_distances(&w.cloud).unwrap();
        let fast = diagram_for_cloud(&w.cloud).unwrap();
        assert_eq!(
            fast.as_tuples(),
            naive_h1_pairs(&dist.rows()),
            "window at {}",
            w.anchor_date
        );
    }
}

#[test]
fn norm_series_is_dated_by_window_end() {
    let z = sv_returns(200, 2);
    let cfg = TdaConfig::default();
    let series = l1_series(&windows_for_series(&z, &cfg.embedding).unwrap(), &cfg.landscape).unwrap();
    assert_eq!(series.len(), 200 - 56 + 1);
    assert_eq!(series.dates[0], z.dates()[55]);
    assert_eq!(*series.dates.last().unwrap(), *z.dates().last().unwrap());
    assert!(series.values.iter().all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn surrogates_of_structured_input_fall_below_observed_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = dated(
        (0..180)
            .map(|t| {
                (2.0 * std::f64::consts::PI * t as f64 / 16.0).sin()
                    + 0.2 * rng.sample::<f64, _>(StandardNormal)
            })
            .collect(),
    );
    let cfg = TdaConfig::default();
    let observed = tdavol_core::landscape::norm_series_for(&z, &cfg).unwrap();
    let env = null_envelope(&z, SurrogateKind::Shuffle, 10, 9, &cfg, DEFAULT_LEVELS).unwrap();
    let report = exceedance(&observed, &env).unwrap();
    assert!(report.frac_above > 0.5, "{}", report.frac_above);
    let again = null_envelope(&z, SurrogateKind::Shuffle, 10, 9, &cfg, DEFAULT_LEVELS).unwrap();
    assert_eq!(env, again);
}

#[test]
fn fft_surrogate_keeps_dates_and_length() {
    let z = sv_returns(101, 4);
    let s = surrogate(&z, SurrogateKind::Fft, 5).unwrap();
    assert_eq!(s.dates(), z.dates());
    let mean: f64 = s.values().iter().sum::<f64>() / 101.0;
    assert!(mean.abs() < 1e-12);
}

#[test]
fn filter_likelihood_prefers_true_parameters() {
    let truth = SvParams::new(-1.0, 0.97, 0.15, -1.0).unwrap();
    let z = dated(simulate(&truth, 600, 8).unwrap().z);
    let wrong = SvParams::new(1.5, 0.97, 0.15, 1.5).unwrap();
    let at_truth = particle_filter(&z, &truth, 500, 1).unwrap().log_likelihood;
    let at_wrong = particle_filter(&z, &wrong, 500, 1).unwrap().log_likelihood;
    assert!(at_truth > at_wrong + 50.0, "{at_truth} vs {at_wrong}");
}

#[test]
fn pelt_on_dated_series_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let values: Vec<f64> = (0..240)
        .map(|t| [0.0, 2.0, -1.0][t / 80] + 0.5 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let r = pelt_mean_shift(&dated(values.clone()), 3.0).unwrap();
    let (oracle, cost) = optimal_partitioning(&values, 3.0);
    assert_eq!(r.changepoints, oracle);
    assert!((r.cost - cost).abs() < 1e-9 * cost.max(1.0));
    assert_eq!(r.segments().len(), oracle.len() + 1);
}
