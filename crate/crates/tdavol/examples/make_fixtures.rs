//! Regenerates the synthetic inputs under `fixtures/`.
//!
//! Prices follow a simulated stochastic-volatility path and are written in the
//! Yahoo Finance daily CSV layout. Sentiment is a mean-reverting index that
//! drops when volatility is high, written in the alternative.me feed layout
//! (newest record first).
//!
//! ```text
//! cargo run -p tdavol --example make_fixtures [out_dir]
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::StandardNormal;
use tdavol_core::rng::stream;
use tdavol_core::svmodel::simulate;
use tdavol_core::timeseries::SentimentBins;
use tdavol_core::SvParams;

const SCALE: f64 = 0.03;

fn prices_csv(start: NaiveDate, closes: &[f64]) -> String {
    let mut out = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
    for (i, &close) in closes.iter().enumerate() {
        let open = if i == 0 { close } else { closes[i - 1] };
        let date = start + chrono::Duration::days(i as i64);
        let (hi, lo) = (open.max(close) * 1.004, open.min(close) * 0.996);
        let volume = 1_000_000 + (i as u64 * 7919) % 250_000;
        writeln!(
            out,
            "{date},{open:.6},{hi:.6},{lo:.6},{close:.6},{close:.6},{volume}"
        )
        .unwrap();
    }
    out
}

/// `n` closing prices driven by `n - 1` simulated returns, with the log-variance path.
fn path_closes(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let params = SvParams::new(0.0, 0.95, 0.3, 0.0).unwrap();
    let path = simulate(&params, n - 1, seed).unwrap();
    let mut closes = vec![10_000.0];
    for z in &path.z {
        let last = *closes.last().unwrap();
        closes.push(last * (SCALE * z).exp());
    }
    (closes, path.h)
}

fn sentiment_json(start: NaiveDate, h: &[f64], seed: u64) -> String {
    let bins = SentimentBins::default();
    let mut rng = stream(seed);
    let mut level = 50.0;
    let mut records = Vec::with_capacity(h.len());
    for (i, hv) in h.iter().enumerate() {
        let e: f64 = rng.sample(StandardNormal);
        level = 50.0 + 0.9 * (level - 50.0) - 1.5 * hv + 3.0 * e;
        let value = level.round().clamp(0.0, 100.0) as u8;
        let date = start + chrono::Duration::days(i as i64);
        let ts = date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp();
        records.push(serde_json::json!({
            "value": value.to_string(),
            "value_classification": bins.classify(value).to_string(),
            "timestamp": ts.to_string(),
            "time_until_update": "",
        }));
    }
    records.reverse();
    let doc = serde_json::json!({
        "name": "Fear and Greed Index",
        "data": records,
        "metadata": { "error": null },
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

fn write(dir: &Path, name: &str, text: &str) {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir).unwrap();
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();

    let (closes, h) = path_closes(801, 11);
    write(&dir, "prices_800.csv", &prices_csv(start, &closes));
    // Returns start one day after the first close, so the sentiment series is
    // dated from the first return.
    let first_return = start + chrono::Duration::days(1);
    write(&dir, "sentiment_800.json", &sentiment_json(first_return, &h, 12));

    let (closes, _) = path_closes(400, 13);
    write(&dir, "prices_400.csv", &prices_csv(start, &closes));
}
