//! Dated scalar series and the statistics computed on them.
//!
//! All variances use the sample (`n - 1`) denominator. Rolling outputs are
//! indexed by the date that closes each window, so every rolling statistic
//! only looks backwards.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Timestamped scalar series with strictly increasing daily dates and finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries<T> {
    name: String,
    dates: Vec<NaiveDate>,
    values: Vec<T>,
    dropped: usize,
}

impl<T: Scalar> ReturnSeries<T> {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<T>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                dates: dates.len(),
                values: values.len(),
            });
        }
        if let Some(index) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::UnorderedDates { index: index + 1 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            name: name.into(),
            dates,
            values,
            dropped: 0,
        })
    }

    /// Like [`ReturnSeries::new`] but silently drops rows whose value is not
    /// finite, recording how many were removed.
    pub fn with_nonfinite_dropped(
        name: impl Into<String>,
        dates: Vec<NaiveDate>,
        values: Vec<T>,
    ) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                dates: dates.len(),
                values: values.len(),
            });
        }
        let total = dates.len();
        let (dates, values): (Vec<_>, Vec<_>) = dates
            .into_iter()
            .zip(values)
            .filter(|(_, v)| v.is_finite())
            .unzip();
        let mut series = Self::new(name, dates, values)?;
        series.dropped = total - series.len();
        Ok(series)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rows discarded at construction because they were not finite.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, T)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    /// Applies `f` to every value, keeping dates. Fails if `f` produces a
    /// non-finite value.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.dates.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Same dates, new values.
    pub fn with_values(&self, name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        Self::new(name, self.dates.clone(), values)
    }
}

/// Dated series whose values may be missing (e.g. an undefined correlation).
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSeries<T> {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> MaskedSeries<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Drops missing entries.
    pub fn present(&self) -> Result<ReturnSeries<T>> {
        let (dates, values): (Vec<_>, Vec<_>) = self
            .dates
            .iter()
            .zip(&self.values)
            .filter_map(|(d, v)| v.map(|v| (*d, v)))
            .unzip();
        ReturnSeries::new(self.name.clone(), dates, values)
    }
}

pub fn mean<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::nan();
    }
    values.iter().copied().sum::<T>() / T::from_usize_lossy(values.len())
}

/// Two-pass sample variance (`n - 1` denominator).
pub fn sample_variance<T: Scalar>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::nan();
    }
    let m = mean(values);
    let ss: T = values.iter().map(|&v| (v - m) * (v - m)).sum();
    ss / T::from_usize_lossy(values.len() - 1)
}

fn all_equal<T: Scalar>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Empirical quantile of ascending-sorted data by linear interpolation between
/// order statistics at position `h = (n - 1) p + 1` (1-based).
pub fn quantile_sorted<T: Scalar>(sorted: &[T], p: T) -> T {
    match sorted.len() {
        0 => T::nan(),
        1 => sorted[0],
        n => {
            let h = T::from_usize_lossy(n - 1) * p.max(T::zero()).min(T::one());
            let lo = h.floor();
            let frac = h - lo;
            let i = lo.to_usize().unwrap_or(0).min(n - 1);
            if i + 1 >= n {
                sorted[n - 1]
            } else {
                sorted[i] + frac * (sorted[i + 1] - sorted[i])
            }
        }
    }
}

/// Inner join on dates. Returns the common dates and, per input, the values on
/// those dates (in input order).
pub fn inner_join<T: Scalar>(series: &[&ReturnSeries<T>]) -> (Vec<NaiveDate>, Vec<Vec<T>>) {
    let Some((first, rest)) = series.split_first() else {
        return (Vec::new(), Vec::new());
    };
    let mut common: Vec<NaiveDate> = first.dates().to_vec();
    for s in rest {
        let mut out = Vec::with_capacity(common.len().min(s.len()));
        let (mut i, mut j) = (0, 0);
        let other = s.dates();
        while i < common.len() && j < other.len() {
            match common[i].cmp(&other[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(common[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        common = out;
    }
    let columns = series
        .iter()
        .map(|s| {
            let dropped = s.len() - common.len();
            if dropped > 0 {
                log::debug!("join dropped {dropped} dates from '{}'", s.name());
            }
            let mut out = Vec::with_capacity(common.len());
            let mut j = 0;
            for d in &common {
                while s.dates()[j] < *d {
                    j += 1;
                }
                out.push(s.values()[j]);
            }
            out
        })
        .collect();
    (common, columns)
}

/// Daily log returns `ln(p_t / p_{t-1})`, dated at `p_t`.
pub fn log_returns<T: Scalar>(prices: &ReturnSeries<T>) -> Result<ReturnSeries<T>> {
    if prices.len() < 2 {
        return Err(Error::InsufficientObservations {
            needed: 2,
            got: prices.len(),
        });
    }
    if let Some(index) = prices.values().iter().position(|&p| p <= T::zero()) {
        return Err(Error::NonPositivePrice {
            index,
            value: prices.values()[index].as_f64(),
        });
    }
    let values = prices.values().windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    ReturnSeries::new("log_return", prices.dates()[1..].to_vec(), values)
}

/// Rescales to zero mean and unit sample standard deviation.
pub fn standardize<T: Scalar>(s: &ReturnSeries<T>) -> Result<ReturnSeries<T>> {
    if s.len() < 2 {
        return Err(Error::InsufficientObservations {
            needed: 2,
            got: s.len(),
        });
    }
    if all_equal(s.values()) {
        return Err(Error::ZeroVariance);
    }
    let mut z = s.values().to_vec();
    // A second centring/scaling pass removes the rounding left by the first.
    for _ in 0..2 {
        let m = mean(&z);
        let sd = sample_variance(&z).sqrt();
        if !(sd > T::zero()) {
            return Err(Error::ZeroVariance);
        }
        z.iter_mut().for_each(|v| *v = (*v - m) / sd);
    }
    s.with_values(s.name().to_string(), z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RollingKind {
    Mean,
    Std,
}

/// Trailing-window mean or sample standard deviation.
pub fn rolling_stat<T: Scalar>(
    s: &ReturnSeries<T>,
    window: usize,
    kind: RollingKind,
) -> Result<ReturnSeries<T>> {
    if window == 0 || (kind == RollingKind::Std && window < 2) {
        return Err(Error::InvalidParameter(format!(
            "rolling {kind:?} window must be at least {}",
            if kind == RollingKind::Std { 2 } else { 1 }
        )));
    }
    if window > s.len() {
        return Err(Error::WindowTooLong { window, len: s.len() });
    }
    let values = s
        .values()
        .windows(window)
        .map(|w| match kind {
            RollingKind::Mean => mean(w),
            RollingKind::Std if all_equal(w) => T::zero(),
            RollingKind::Std => sample_variance(w).sqrt(),
        })
        .collect();
    let suffix = match kind {
        RollingKind::Mean => "mean",
        RollingKind::Std => "std",
    };
    ReturnSeries::new(
        format!("{}_rolling_{suffix}_{window}", s.name()),
        s.dates()[window - 1..].to_vec(),
        values,
    )
}

fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    if all_equal(a) || all_equal(b) {
        return None;
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    let denom = saa.sqrt() * sbb.sqrt();
    if !(denom > T::zero()) {
        return None;
    }
    Some((sab / denom).max(-T::one()).min(T::one()))
}

/// Pearson correlation over each trailing window of the date-aligned pair.
/// Windows where either input is constant are reported as missing.
pub fn rolling_correlation<T: Scalar>(
    a: &ReturnSeries<T>,
    b: &ReturnSeries<T>,
    window: usize,
) -> Result<MaskedSeries<T>> {
    if window < 2 {
        return Err(Error::InvalidParameter(
            "correlation window must be at least 2".into(),
        ));
    }
    let (dates, cols) = inner_join(&[a, b]);
    if dates.is_empty() {
        return Err(Error::EmptyJoin);
    }
    if window > dates.len() {
        return Err(Error::WindowTooLong {
            window,
            len: dates.len(),
        });
    }
    let values = (0..=dates.len() - window)
        .map(|start| {
            let end = start + window;
            pearson(&cols[0][start..end], &cols[1][start..end])
        })
        .collect();
    Ok(MaskedSeries {
        name: format!("rolling_corr_{window}"),
        dates: dates[window - 1..].to_vec(),
        values,
    })
}

/// Sample autocorrelation function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfResult<T> {
    pub values: Vec<T>,
    /// Half-width of the ±1.96/√n white-noise band.
    pub confidence_halfwidth: T,
}

impl<T: Scalar> AcfResult<T> {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// Lags `1..` whose autocorrelation lies outside the white-noise band.
    pub fn significant_lags(&self) -> Vec<usize> {
        (1..self.values.len())
            .filter(|&k| self.values[k].abs() > self.confidence_halfwidth)
            .collect()
    }
}

/// Biased autocorrelation estimator, lags `0..=max_lag`.
pub fn acf<T: Scalar>(s: &ReturnSeries<T>, max_lag: usize) -> Result<AcfResult<T>> {
    let n = s.len();
    if max_lag >= n {
        return Err(Error::InvalidParameter(format!(
            "max_lag {max_lag} must be below the series length {n}"
        )));
    }
    if all_equal(s.values()) {
        return Err(Error::ZeroVariance);
    }
    let m = mean(s.values());
    let dev: Vec<T> = s.values().iter().map(|&v| v - m).collect();
    let denom: T = dev.iter().map(|&d| d * d).sum();
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(T::one());
    for k in 1..=max_lag {
        let num: T = dev[..n - k].iter().zip(&dev[k..]).map(|(&a, &b)| a * b).sum();
        values.push((num / denom).max(-T::one()).min(T::one()));
    }
    Ok(AcfResult {
        values,
        confidence_halfwidth: T::lit(1.96) / T::from_usize_lossy(n).sqrt(),
    })
}

/// Least-squares fit with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult<T> {
    /// `names[i]` labels `coefficients[i]`; index 0 is the intercept.
    pub names: Vec<String>,
    pub coefficients: Vec<T>,
    pub residuals: ReturnSeries<T>,
    pub r_squared: T,
    /// Rolling window used to build the covariates, when applicable.
    pub window: Option<usize>,
}

/// Ordinary least squares of `y` on an intercept plus `covariates`, after an
/// inner join on dates. Solved by a reorthogonalized Gram–Schmidt QR factorization.
pub fn ols_fit<T: Scalar>(
    y: &ReturnSeries<T>,
    covariates: &[&ReturnSeries<T>],
) -> Result<RegressionResult<T>> {
    let mut all = vec![y];
    all.extend_from_slice(covariates);
    let (dates, mut cols) = inner_join(&all);
    let p = covariates.len() + 1;
    if dates.len() <= p {
        return Err(Error::InsufficientObservations {
            needed: p + 1,
            got: dates.len(),
        });
    }
    let n = dates.len();
    let yv = cols.remove(0);
    let mut design = vec![vec![T::one(); n]];
    design.extend(cols);
    let mut names = vec!["intercept".to_string()];
    names.extend(covariates.iter().map(|c| c.name().to_string()));

    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let frob = design.iter().map(|c| dot(c, c)).sum::<T>().sqrt();
    let tol = T::lit(1e-10) * frob;

    // Q has orthonormal columns, R is upper triangular (column-major).
    let mut q: Vec<Vec<T>> = Vec::with_capacity(p);
    let mut r = vec![vec![T::zero(); p]; p];
    let mut offending = Vec::new();
    for (k, col) in design.iter().enumerate() {
        let mut v = col.clone();
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let c = dot(qj, &v);
                r[j][k] += c;
                v.iter_mut().zip(qj).for_each(|(vi, &qi)| *vi -= c * qi);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > tol) {
            offending.push(names[k].clone());
            continue;
        }
        r[k][k] = norm;
        v.iter_mut().for_each(|vi| *vi /= norm);
        q.push(v);
    }
    if !offending.is_empty() {
        return Err(Error::Collinear { columns: offending });
    }

    let mut qty: Vec<T> = q.iter().map(|qj| dot(qj, &yv)).collect();
    let mut residuals = yv.clone();
    for _ in 0..2 {
        for qj in &q {
            let c = dot(qj, &residuals);
            residuals.iter_mut().zip(qj).for_each(|(e, &qi)| *e -= c * qi);
        }
    }
    // Back substitution R b = Qᵀ y.
    let mut beta = vec![T::zero(); p];
    for i in (0..p).rev() {
        let mut acc = qty[i];
        for (j, b) in beta.iter().enumerate().skip(i + 1) {
            acc -= r[i][j] * *b;
        }
        beta[i] = acc / r[i][i];
        qty[i] = acc;
    }

    let my = mean(&yv);
    let sst: T = yv.iter().map(|&v| (v - my) * (v - my)).sum();
    let ssr: T = residuals.iter().map(|&e| e * e).sum();
    let r_squared = if sst > T::zero() {
        (T::one() - ssr / sst).max(T::zero()).min(T::one())
    } else {
        T::one()
    };
    Ok(RegressionResult {
        names,
        coefficients: beta,
        residuals: ReturnSeries::new("residual", dates, residuals)?,
        r_squared,
        window: None,
    })
}

/// Regresses the landscape-norm series on the trailing `window`-day mean of
/// filtered volatility, mean of sentiment and standard deviation of sentiment.
pub fn residualize_l1<T: Scalar>(
    l1: &ReturnSeries<T>,
    sigma: &ReturnSeries<T>,
    sentiment: &SentimentSeries,
    window: usize,
) -> Result<RegressionResult<T>> {
    let sent = sentiment.as_series::<T>()?;
    let (common, _) = inner_join(&[l1, sigma, &sent]);
    if common.len() <= window + 4 {
        return Err(Error::InsufficientObservations {
            needed: window + 5,
            got: common.len(),
        });
    }
    let sigma_bar = rolling_stat(sigma, window, RollingKind::Mean)?.renamed("sigma_bar");
    let f_bar = rolling_stat(&sent, window, RollingKind::Mean)?.renamed("sentiment_mean");
    let f_sd = rolling_stat(&sent, window, RollingKind::Std)?.renamed("sentiment_std");
    let mut fit = ols_fit(l1, &[&sigma_bar, &f_bar, &f_sd])?;
    fit.window = Some(window);
    Ok(fit)
}

/// Fear & Greed sentiment regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "Extreme Fear")]
    ExtremeFear,
    Fear,
    Neutral,
    Greed,
    #[serde(rename = "Extreme Greed")]
    ExtremeGreed,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::ExtremeFear,
        Regime::Fear,
        Regime::Neutral,
        Regime::Greed,
        Regime::ExtremeGreed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ExtremeFear => "Extreme Fear",
            Regime::Fear => "Fear",
            Regime::Neutral => "Neutral",
            Regime::Greed => "Greed",
            Regime::ExtremeGreed => "Extreme Greed",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown sentiment regime '{s}'")))
    }
}

/// Lower bounds of the Fear, Neutral, Greed and Extreme Greed bins; values
/// below `fear` are Extreme Fear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentBins {
    pub fear: u8,
    pub neutral: u8,
    pub greed: u8,
    pub extreme_greed: u8,
}

impl Default for SentimentBins {
    fn default() -> Self {
        Self {
            fear: 25,
            neutral: 45,
            greed: 55,
            extreme_greed: 75,
        }
    }
}

impl SentimentBins {
    pub fn classify(&self, value: u8) -> Regime {
        if value < self.fear {
            Regime::ExtremeFear
        } else if value < self.neutral {
            Regime::Fear
        } else if value < self.greed {
            Regime::Neutral
        } else if value < self.extreme_greed {
            Regime::Greed
        } else {
            Regime::ExtremeGreed
        }
    }
}

/// Daily sentiment index on `[0, 100]` with optional regime labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentSeries {
    dates: Vec<NaiveDate>,
    values: Vec<u8>,
    labels: Vec<Option<Regime>>,
}

impl SentimentSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<i64>, labels: Vec<Option<Regime>>) -> Result<Self> {
        if dates.len() != values.len() || labels.len() != values.len() {
            return Err(Error::LengthMismatch {
                dates: dates.len(),
                values: values.len(),
            });
        }
        if let Some(index) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::UnorderedDates { index: index + 1 });
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(index, v)| {
                u8::try_from(v)
                    .ok()
                    .filter(|&v| v <= 100)
                    .ok_or(Error::SentimentRange { index, value: v })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dates,
            values,
            labels,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn labels(&self) -> &[Option<Regime>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_series<T: Scalar>(&self) -> Result<ReturnSeries<T>> {
        ReturnSeries::new(
            "sentiment",
            self.dates.clone(),
            self.values.iter().map(|&v| T::from_u8(v).unwrap()).collect(),
        )
    }
}

/// Fills missing regime labels from `bins`; labels supplied by the source are kept.
pub fn classify_sentiment(s: &SentimentSeries, bins: &SentimentBins) -> SentimentSeries {
    let labels = s
        .values
        .iter()
        .zip(&s.labels)
        .map(|(&v, l)| Some(l.unwrap_or_else(|| bins.classify(v))))
        .collect();
    SentimentSeries {
        dates: s.dates.clone(),
        values: s.values.clone(),
        labels,
    }
}

/// Tukey box-plot summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxSummary<T> {
    pub count: usize,
    pub median: T,
    pub q1: T,
    pub q3: T,
    pub whisker_low: T,
    pub whisker_high: T,
    /// Points beyond 1.5 × IQR from the quartiles.
    pub outliers: usize,
}

pub fn box_summary<T: Scalar>(values: &[T]) -> Option<BoxSummary<T>> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile_sorted(&sorted, T::lit(0.25));
    let q3 = quantile_sorted(&sorted, T::lit(0.75));
    let fence = T::lit(1.5) * (q3 - q1);
    let (lo_fence, hi_fence) = (q1 - fence, q3 + fence);
    let inside = sorted.iter().filter(|&&v| v >= lo_fence && v <= hi_fence);
    let whisker_low = inside.clone().next().copied().unwrap_or(q1);
    let whisker_high = inside.last().copied().unwrap_or(q3);
    Some(BoxSummary {
        count: sorted.len(),
        median: quantile_sorted(&sorted, T::lit(0.5)),
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers: sorted.iter().filter(|&&v| v < lo_fence || v > hi_fence).count(),
    })
}

#[cfg(test)]
pub(crate) fn test_dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    (0..n).map(|i| start + chrono::Duration::days(i as i64)).collect()
}
