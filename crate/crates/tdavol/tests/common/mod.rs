#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use tdavol::AnalysisConfig;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Defaults with Monte Carlo sizes cut down so a full run takes seconds.
pub fn quick_config(out: &Path) -> AnalysisConfig {
    let mut cfg = AnalysisConfig::default();
    for (k, v) in [
        ("if2_iterations", "4"),
        ("if2_replicates", "2"),
        ("if2_particles", "200"),
        ("if2_eval_particles", "200"),
        ("if2_evals", "2"),
        ("filter_particles", "300"),
        ("surrogates", "6"),
        ("roll_window", "60"),
    ] {
        cfg.set(k, v).unwrap();
    }
    cfg.prices = Some(fixture("prices_400.csv"));
    cfg.sentiment = Some(fixture("sentiment_800.json"));
    cfg.out = out.to_path_buf();
    cfg
}

pub fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    (0..n).map(|i| start + chrono::Duration::days(i as i64)).collect()
}

/// Writes a price CSV in the Yahoo layout.
pub fn write_prices(path: &Path, closes: &[f64]) {
    let mut text = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
    for (d, c) in dates(closes.len()).iter().zip(closes) {
        text.push_str(&format!("{d},{c},{c},{c},{c},{c},1\n"));
    }
    std::fs::write(path, text).unwrap();
}

/// Sorted relative paths of every file under `dir`.
pub fn list_files(dir: &Path) -> Vec<String> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/"));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

/// Data rows of a CSV as string cells, header dropped.
pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
