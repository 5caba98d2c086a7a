//! Surrogate series, pointwise null envelopes and exceedance counts.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::landscape::{norm_series_for, LandscapeNormSeries, TdaConfig};
use crate::rng::{derive_seed, stream};
use crate::timeseries::{quantile_sorted, ReturnSeries};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateKind {
    Shuffle,
    Fft,
}

impl SurrogateKind {
    pub const ALL: [SurrogateKind; 2] = [SurrogateKind::Shuffle, SurrogateKind::Fft];

    pub fn as_str(self) -> &'static str {
        match self {
            SurrogateKind::Shuffle => "shuffle",
            SurrogateKind::Fft => "fft",
        }
    }
}

impl fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurrogateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shuffle" => Ok(SurrogateKind::Shuffle),
            "fft" => Ok(SurrogateKind::Fft),
            other => Err(Error::InvalidParameter(format!(
                "unknown surrogate kind {other:?}"
            ))),
        }
    }
}

/// A bijection of `{0, …, n−1}`; `image[t]` is the source index of slot `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(Self(image))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Uniform permutation by Fisher–Yates on the seeded stream.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(&mut stream(seed));
        Self(image)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }
}

/// `z_{π(t)}` on the original dates.
pub fn permute<T: Scalar>(z: &ReturnSeries<T>, perm: &Permutation) -> Result<ReturnSeries<T>> {
    if perm.len() != z.len() {
        return Err(Error::LengthMismatch {
            dates: z.len(),
            values: perm.len(),
        });
    }
    let values = perm.image().iter().map(|&i| z.values()[i]).collect();
    z.with_values(format!("{}_shuffle", z.name()), values)
}

pub fn shuffle_surrogate<T: Scalar>(z: &ReturnSeries<T>, seed: u64) -> Result<ReturnSeries<T>> {
    if z.is_empty() {
        return Err(Error::Empty);
    }
    permute(z, &Permutation::random(z.len(), seed))
}

/// Discrete Fourier coefficients `Z_k = Σ_t x_t e^{−2πikt/N}` of a real series.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn of(values: &[T]) -> Self {
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        if !buf.is_empty() {
            FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        }
        Self { coefficients: buf }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }

    pub fn phases(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| c.arg()).collect()
    }

    /// `|Z_k|²` at every frequency.
    pub fn periodogram(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Replaces the phase at every positive frequency below Nyquist and
    /// mirrors it onto the conjugate bin. `Z_0` and, for even `N`,
    /// `Z_{N/2}` are left untouched.
    pub fn with_phases(&self, phases: &[T]) -> Result<Self> {
        let n = self.len();
        let half = n.saturating_sub(1) / 2;
        if phases.len() != half {
            return Err(Error::LengthMismatch {
                dates: half,
                values: phases.len(),
            });
        }
        let mut c = self.coefficients.clone();
        for (k, &phi) in (1..=half).zip(phases) {
            let z = Complex::from_polar(c[k].norm(), phi);
            c[k] = z;
            c[n - k] = z.conj();
        }
        Ok(Self { coefficients: c })
    }

    /// Inverse transform, returning the real part after checking that the
    /// imaginary residue is negligible.
    pub fn inverse_real(&self) -> Result<Vec<T>> {
        let n = self.len();
        let mut buf = self.coefficients.clone();
        if n > 0 {
            FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        }
        let scale = T::one() / T::from_usize_lossy(n.max(1));
        let magnitude = buf.iter().map(|c| c.re.abs()).fold(T::zero(), T::max) * scale;
        let residue = buf.iter().map(|c| c.im.abs()).fold(T::zero(), T::max) * scale;
        let tol =
            T::lit(1e-9).max(T::epsilon() * T::from_usize_lossy(n) * T::lit(64.0)) * magnitude.max(T::one());
        if residue > tol {
            return Err(Error::ImaginaryResidue {
                residue: residue.as_f64(),
            });
        }
        Ok(buf.into_iter().map(|c| c.re * scale).collect())
    }
}

/// Phase-randomized surrogate with the series mean restored.
pub fn fft_surrogate<T: Scalar>(z: &ReturnSeries<T>, seed: u64) -> Result<ReturnSeries<T>> {
    let n = z.len();
    if n < 2 {
        return Err(Error::InsufficientObservations { needed: 2, got: n });
    }
    let mean = crate::timeseries::mean(z.values());
    let centered: Vec<T> = z.values().iter().map(|&v| v - mean).collect();
    let mut rng = stream(seed);
    let two_pi = T::lit(2.0 * std::f64::consts::PI);
    let phases: Vec<T> = (0..(n - 1) / 2)
        .map(|_| T::lit(rng.random::<f64>()) * two_pi)
        .collect();
    let values = Spectrum::of(&centered)
        .with_phases(&phases)?
        .inverse_real()?
        .into_iter()
        .map(|v| v + mean)
        .collect();
    z.with_values(format!("{}_fft", z.name()), values)
}

pub fn surrogate<T: Scalar>(z: &ReturnSeries<T>, kind: SurrogateKind, seed: u64) -> Result<ReturnSeries<T>> {
    match kind {
        SurrogateKind::Shuffle => shuffle_surrogate(z, seed),
        SurrogateKind::Fft => fft_surrogate(z, seed),
    }
}

/// Seed of realization `j` of `kind`; stable so a realization can be replayed.
pub fn realization_seed(seed: u64, kind: SurrogateKind, j: usize) -> u64 {
    derive_seed(seed, kind.as_str(), j as u64)
}

/// Pointwise summary of surrogate norms per window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullEnvelope<T> {
    pub kind: SurrogateKind,
    pub dates: Vec<NaiveDate>,
    pub mean: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    /// Quantile levels of `lower` and `upper`.
    pub levels: (T, T),
    /// Realizations that entered the envelope.
    pub realizations: usize,
    pub requested: usize,
}

impl<T: Scalar> NullEnvelope<T> {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

pub const DEFAULT_LEVELS: (f64, f64) = (0.05, 0.95);

/// Builds an envelope from `samples[j][i]`: realization `j`, window `i`.
pub fn envelope_from_samples<T: Scalar>(
    kind: SurrogateKind,
    dates: Vec<NaiveDate>,
    samples: &[Vec<T>],
    levels: (T, T),
    requested: usize,
) -> Result<NullEnvelope<T>> {
    if samples.len() < 2 {
        return Err(Error::TooFewRealizations {
            survivors: samples.len(),
            requested,
        });
    }
    if !(T::zero() <= levels.0 && levels.0 <= levels.1 && levels.1 <= T::one()) {
        return Err(Error::InvalidParameter(
            "quantile levels must satisfy 0 <= lo <= hi <= 1".into(),
        ));
    }
    if let Some(bad) = samples.iter().find(|s| s.len() != dates.len()) {
        return Err(Error::LengthMismatch {
            dates: dates.len(),
            values: bad.len(),
        });
    }
    let count = T::from_usize_lossy(samples.len());
    let mut column = Vec::with_capacity(samples.len());
    let (mut mean, mut lower, mut upper) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..dates.len() {
        column.clear();
        column.extend(samples.iter().map(|s| s[i]));
        column.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let m = column.iter().copied().sum::<T>() / count;
        let (lo, hi) = (
            quantile_sorted(&column, levels.0),
            quantile_sorted(&column, levels.1),
        );
        // Rounding in the sum can push the mean a hair outside a degenerate band.
        mean.push(m.max(column[0]).min(column[column.len() - 1]));
        lower.push(lo);
        upper.push(hi);
    }
    Ok(NullEnvelope {
        kind,
        dates,
        mean,
        lower,
        upper,
        levels,
        realizations: samples.len(),
        requested,
    })
}

/// Runs the norm pipeline on `count` surrogates of `z` and summarizes the
/// per-window distribution. Failed realizations are logged and skipped.
pub fn null_envelope<T: Scalar>(
    z: &ReturnSeries<T>,
    kind: SurrogateKind,
    count: usize,
    seed: u64,
    cfg: &TdaConfig,
    levels: (T, T),
) -> Result<NullEnvelope<T>> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 realizations, got {count}"
        )));
    }
    let runs: Vec<Result<LandscapeNormSeries<T>>> = (0..count)
        .into_par_iter()
        .map(|j| norm_series_for(&surrogate(z, kind, realization_seed(seed, kind, j))?, cfg))
        .collect();
    let mut dates = None;
    let mut samples = Vec::with_capacity(count);
    for (j, run) in runs.into_iter().enumerate() {
        match run {
            Ok(series) => {
                dates.get_or_insert_with(|| series.dates.clone());
                samples.push(series.values);
            }
            Err(e) => log::warn!("{kind} realization {j} failed: {e}"),
        }
    }
    envelope_from_samples(kind, dates.unwrap_or_default(), &samples, levels, count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Below,
    Inside,
    Above,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Below => "below",
            Flag::Inside => "inside",
            Flag::Above => "above",
        }
    }
}

/// Observed values set against the envelope on shared dates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceedanceReport<T> {
    pub n_windows: usize,
    pub n_below: usize,
    pub n_above: usize,
    pub frac_below: T,
    pub frac_above: T,
    /// `(date, observed, envelope index, flag)` for every joined window.
    #[serde(skip)]
    pub rows: Vec<(NaiveDate, T, usize, Flag)>,
}

pub fn classify<T: Scalar>(value: T, lower: T, upper: T) -> Flag {
    if value < lower {
        Flag::Below
    } else if value > upper {
        Flag::Above
    } else {
        Flag::Inside
    }
}

pub fn exceedance<T: Scalar>(
    observed: &LandscapeNormSeries<T>,
    env: &NullEnvelope<T>,
) -> Result<ExceedanceReport<T>> {
    let index: std::collections::HashMap<NaiveDate, usize> =
        env.dates.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let rows: Vec<_> = observed
        .dates
        .iter()
        .zip(&observed.values)
        .filter_map(|(d, &v)| {
            let i = *index.get(d)?;
            Some((*d, v, i, classify(v, env.lower[i], env.upper[i])))
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyJoin);
    }
    let n_below = rows.iter().filter(|r| r.3 == Flag::Below).count();
    let n_above = rows.iter().filter(|r| r.3 == Flag::Above).count();
    let n = T::from_usize_lossy(rows.len());
    Ok(ExceedanceReport {
        n_windows: rows.len(),
        n_below,
        n_above,
        frac_below: T::from_usize_lossy(n_below) / n,
        frac_above: T::from_usize_lossy(n_above) / n,
        rows,
    })
}
