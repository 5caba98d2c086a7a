//! Log-variance AR(1) stochastic volatility model.
//!
//! ```text
//! h_t = μ + φ (h_{t-1} − μ) + σ_η η_t,   η_t ~ N(0, 1)
//! z_t = exp(h_t / 2) ε_t,                ε_t ~ N(0, 1)
//! ```
//!
//! with `h_0` a fixed starting value. Filtering uses a bootstrap particle
//! filter with systematic resampling at every step; estimation uses IF2 with
//! parameters perturbed at every observation on the unconstrained scale
//! `(μ, logit φ, log σ_η, h_0)`.

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::rng::{derive_seed, stream, StreamRng};
use crate::timeseries::{sample_variance, ReturnSeries};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvParams<T> {
    pub mu: T,
    pub phi: T,
    pub sigma_eta: T,
    pub h0: T,
}

impl<T: Scalar> SvParams<T> {
    pub fn new(mu: T, phi: T, sigma_eta: T, h0: T) -> Result<Self> {
        let p = Self {
            mu,
            phi,
            sigma_eta,
            h0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi > T::zero() && self.phi < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "phi must lie in (0, 1), got {}",
                self.phi
            )));
        }
        if !(self.sigma_eta > T::zero()) || !self.sigma_eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma_eta must be positive, got {}",
                self.sigma_eta
            )));
        }
        if !self.mu.is_finite() || !self.h0.is_finite() {
            return Err(Error::InvalidParameter("mu and h0 must be finite".into()));
        }
        Ok(())
    }

    /// `[μ, logit φ, log σ_η, h_0]`.
    pub fn to_estimation_scale(&self) -> Result<[T; 4]> {
        self.validate()?;
        Ok([
            self.mu,
            (self.phi / (T::one() - self.phi)).ln(),
            self.sigma_eta.ln(),
            self.h0,
        ])
    }

    pub fn from_estimation_scale(x: [T; 4]) -> Result<Self> {
        Self::new(x[0], logistic(x[1]), x[2].exp(), x[3])
    }
}

#[inline]
fn logistic<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

#[inline]
fn normal<T: Scalar>(rng: &mut StreamRng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Latent path and observations drawn from the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath<T> {
    pub h: Vec<T>,
    pub z: Vec<T>,
}

pub fn simulate<T: Scalar>(params: &SvParams<T>, n: usize, seed: u64) -> Result<SimulatedPath<T>> {
    params.validate()?;
    let mut rng = stream(seed);
    let mut h = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut prev = params.h0;
    for _ in 0..n {
        let eta: T = normal(&mut rng);
        let eps: T = normal(&mut rng);
        let cur = params.mu + params.phi * (prev - params.mu) + params.sigma_eta * eta;
        h.push(cur);
        z.push((cur * T::lit(0.5)).exp() * eps);
        prev = cur;
    }
    Ok(SimulatedPath { h, z })
}

/// Log of the mean of `exp(values)`, shifted by the maximum for stability.
pub fn log_mean_exp<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return Ok(max);
    }
    let sum: T = values.iter().map(|&v| (v - max).exp()).sum();
    Ok(max + (sum / T::from_usize_lossy(values.len())).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterOutput<T> {
    pub dates: Vec<NaiveDate>,
    pub log_likelihood: T,
    /// Post-resampling particle mean of `h_t`.
    pub filtered_h: Vec<T>,
    /// `exp(ĥ_t)`.
    pub filtered_variance: Vec<T>,
    /// `exp(ĥ_t / 2)`.
    pub filtered_sigma: Vec<T>,
    pub particle_count: usize,
    /// Effective sample size of the normalized weights before resampling.
    pub ess: Vec<T>,
}

/// Per-step weighting shared by the plain and the perturbed filter.
///
/// Writes normalized weights into `w` and returns `(log mean weight, ESS)`.
fn weigh<T: Scalar>(h: &[T], z: T, w: &mut [T], step: usize) -> Result<(T, T)> {
    let half_log_2pi = T::lit(0.5 * (2.0 * std::f64::consts::PI).ln());
    let half = T::lit(0.5);
    let zz = z * z;
    let mut max = T::neg_infinity();
    for (wi, &hi) in w.iter_mut().zip(h) {
        *wi = -half_log_2pi - half * (hi + zz * (-hi).exp());
        if *wi > max {
            max = *wi;
        }
    }
    if !max.is_finite() {
        return Err(Error::FilterFailure { step });
    }
    let mut sum = T::zero();
    for wi in w.iter_mut() {
        *wi = (*wi - max).exp();
        sum += *wi;
    }
    let mut sq = T::zero();
    for wi in w.iter_mut() {
        *wi /= sum;
        sq += *wi * *wi;
    }
    let np = T::from_usize_lossy(h.len());
    Ok((max + (sum / np).ln(), sq.recip()))
}

/// Systematic resampling: fills `idx` with ancestor indices.
fn systematic<T: Scalar>(w: &[T], idx: &mut [usize], rng: &mut StreamRng) {
    let n = w.len();
    let step = T::one() / T::from_usize_lossy(n);
    let mut u = T::lit(rng.random::<f64>()) * step;
    let mut cum = w[0];
    let mut j = 0;
    for slot in idx.iter_mut() {
        while cum < u && j + 1 < n {
            j += 1;
            cum += w[j];
        }
        *slot = j;
        u += step;
    }
}

fn gather<T: Copy>(src: &[T], idx: &[usize], dst: &mut Vec<T>) {
    dst.clear();
    dst.extend(idx.iter().map(|&i| src[i]));
}

/// Bootstrap particle filter at fixed parameters.
pub fn particle_filter<T: Scalar>(
    z: &ReturnSeries<T>,
    params: &SvParams<T>,
    particles: usize,
    seed: u64,
) -> Result<FilterOutput<T>> {
    let (log_likelihood, filtered_h, ess) = filter_values(z.values(), params, particles, seed)?;
    Ok(FilterOutput {
        dates: z.dates().to_vec(),
        log_likelihood,
        filtered_variance: filtered_h.iter().map(|h| h.exp()).collect(),
        filtered_sigma: filtered_h.iter().map(|h| (*h * T::lit(0.5)).exp()).collect(),
        filtered_h,
        particle_count: particles,
        ess,
    })
}

fn filter_values<T: Scalar>(
    z: &[T],
    params: &SvParams<T>,
    particles: usize,
    seed: u64,
) -> Result<(T, Vec<T>, Vec<T>)> {
    params.validate()?;
    if z.is_empty() {
        return Err(Error::Empty);
    }
    if particles == 0 {
        return Err(Error::InvalidParameter("particle count must be positive".into()));
    }
    let mut rng = stream(seed);
    let np = T::from_usize_lossy(particles);
    let mut h = vec![params.h0; particles];
    let mut next = Vec::with_capacity(particles);
    let mut w = vec![T::zero(); particles];
    let mut idx = vec![0usize; particles];
    let mut loglik = T::zero();
    let mut h_hat = Vec::with_capacity(z.len());
    let mut ess = Vec::with_capacity(z.len());
    for (t, &zt) in z.iter().enumerate() {
        for hi in h.iter_mut() {
            *hi = params.mu + params.phi * (*hi - params.mu) + params.sigma_eta * normal::<T>(&mut rng);
        }
        let (ll, e) = weigh(&h, zt, &mut w, t)?;
        loglik += ll;
        ess.push(e);
        systematic(&w, &mut idx, &mut rng);
        gather(&h, &idx, &mut next);
        std::mem::swap(&mut h, &mut next);
        h_hat.push(h.iter().copied().sum::<T>() / np);
    }
    Ok((loglik, h_hat, ess))
}

/// `σ̂_t = exp(ĥ_t / 2)` on the observation dates.
pub fn filtered_volatility<T: Scalar>(fo: &FilterOutput<T>) -> Result<ReturnSeries<T>> {
    ReturnSeries::new("sigma_hat", fo.dates.clone(), fo.filtered_sigma.clone())
}

/// Starting point: `μ = h_0 = log(sample variance)`, `φ = 0.95`, `σ_η = 0.2`.
pub fn init_heuristic<T: Scalar>(z: &[T]) -> Result<SvParams<T>> {
    if z.len() < 2 {
        return Err(Error::InsufficientObservations {
            needed: 2,
            got: z.len(),
        });
    }
    let var = sample_variance(z);
    if !(var > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    SvParams::new(var.ln(), T::lit(0.95), T::lit(0.2), var.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct If2Settings<T> {
    pub iterations: usize,
    pub replicates: usize,
    /// Particles in the perturbed filter during iterations.
    pub particles: usize,
    /// Particles in each final likelihood evaluation.
    pub eval_particles: usize,
    /// Independent likelihood evaluations per replicate.
    pub evals: usize,
    /// Initial random-walk sds on `(μ, logit φ, log σ_η, h_0)`.
    pub rw_sd: [T; 4],
    /// Multiplier applied to the random-walk sds after each iteration.
    pub cooling: T,
    pub seed: u64,
}

impl<T: Scalar> Default for If2Settings<T> {
    fn default() -> Self {
        Self {
            iterations: 50,
            replicates: 3,
            particles: 1000,
            eval_particles: 1000,
            evals: 5,
            rw_sd: [T::lit(0.02); 4],
            cooling: T::lit(0.95),
            seed: 0,
        }
    }
}

impl<T: Scalar> If2Settings<T> {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 || self.particles == 0 || self.eval_particles == 0 || self.evals == 0 {
            return Err(Error::InvalidParameter("IF2 counts must be at least 1".into()));
        }
        if !(self.cooling > T::zero() && self.cooling <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "cooling must lie in (0, 1], got {}",
                self.cooling
            )));
        }
        if self.rw_sd.iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
            return Err(Error::InvalidParameter(
                "random-walk sds must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateOutcome<T> {
    pub replicate: usize,
    pub params: Option<SvParams<T>>,
    /// Log-mean-exp of the independent likelihood evaluations.
    pub log_likelihood: Option<T>,
    /// Per-evaluation log-likelihoods.
    pub evaluations: Vec<T>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct If2Estimate<T> {
    pub params: SvParams<T>,
    pub log_likelihood: T,
    pub best_replicate: usize,
    pub replicates: Vec<ReplicateOutcome<T>>,
}

/// Perturbed-filter swarm: per-particle latent state and parameters.
struct Swarm<T> {
    h: Vec<T>,
    theta: [Vec<T>; 4],
}

fn if2_iteration<T: Scalar>(z: &[T], swarm: &mut Swarm<T>, sd: [T; 4], seed: u64) -> Result<()> {
    let n = swarm.h.len();
    let mut rng = stream(seed);
    let mut w = vec![T::zero(); n];
    let mut idx = vec![0usize; n];
    let mut scratch = Vec::with_capacity(n);
    let [mu, lphi, lsig, h0] = &mut swarm.theta;
    // Initial values are perturbed once per pass.
    for (hi, h0i) in swarm.h.iter_mut().zip(h0.iter_mut()) {
        if sd[3] > T::zero() {
            *h0i += sd[3] * normal::<T>(&mut rng);
        }
        *hi = *h0i;
    }
    for (t, &zt) in z.iter().enumerate() {
        for i in 0..n {
            if sd[0] > T::zero() {
                mu[i] += sd[0] * normal::<T>(&mut rng);
            }
            if sd[1] > T::zero() {
                lphi[i] += sd[1] * normal::<T>(&mut rng);
            }
            if sd[2] > T::zero() {
                lsig[i] += sd[2] * normal::<T>(&mut rng);
            }
            let phi = logistic(lphi[i]);
            swarm.h[i] = mu[i] + phi * (swarm.h[i] - mu[i]) + lsig[i].exp() * normal::<T>(&mut rng);
        }
        weigh(&swarm.h, zt, &mut w, t)?;
        systematic(&w, &mut idx, &mut rng);
        for v in [&mut swarm.h, &mut *mu, &mut *lphi, &mut *lsig, &mut *h0] {
            gather(v, &idx, &mut scratch);
            std::mem::swap(v, &mut scratch);
        }
    }
    Ok(())
}

/// Mean written as `x₀ + Σ(xᵢ − x₀)/N` so a collapsed swarm returns `x₀` exactly.
fn swarm_mean<T: Scalar>(v: &[T]) -> T {
    let x0 = v[0];
    x0 + v.iter().map(|&x| x - x0).sum::<T>() / T::from_usize_lossy(v.len())
}

fn run_replicate<T: Scalar>(
    z: &[T],
    init: &SvParams<T>,
    settings: &If2Settings<T>,
    replicate: usize,
) -> Result<(SvParams<T>, T, Vec<T>)> {
    let rep_seed = derive_seed(settings.seed, "if2-replicate", replicate as u64);
    let params = if settings.iterations == 0 {
        *init
    } else {
        let x = init.to_estimation_scale()?;
        let n = settings.particles;
        let mut swarm = Swarm {
            h: vec![x[3]; n],
            theta: [vec![x[0]; n], vec![x[1]; n], vec![x[2]; n], vec![x[3]; n]],
        };
        let mut sd = settings.rw_sd;
        let mut params = *init;
        for m in 0..settings.iterations {
            if2_iteration(z, &mut swarm, sd, derive_seed(rep_seed, "iteration", m as u64))?;
            let x = [0, 1, 2, 3].map(|k| swarm_mean(&swarm.theta[k]));
            params = SvParams::from_estimation_scale(x)?;
            if !(params.phi > T::zero() && params.phi < T::one()) {
                return Err(Error::InvalidParameter(format!(
                    "phi left (0, 1) at iteration {m}"
                )));
            }
            sd = sd.map(|s| s * settings.cooling);
        }
        params
    };
    let evaluations = (0..settings.evals)
        .map(|e| {
            filter_values(
                z,
                &params,
                settings.eval_particles,
                derive_seed(rep_seed, "eval", e as u64),
            )
            .map(|r| r.0)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok((params, log_mean_exp(&evaluations)?, evaluations))
}

/// IF2 maximum-likelihood estimation with independent replicates started at
/// `init`. Returns the replicate with the largest aggregated likelihood.
pub fn if2_estimate<T: Scalar>(
    z: &ReturnSeries<T>,
    init: &SvParams<T>,
    settings: &If2Settings<T>,
) -> Result<If2Estimate<T>> {
    settings.validate()?;
    init.validate()?;
    if z.is_empty() {
        return Err(Error::Empty);
    }
    let values = z.values();
    let outcomes: Vec<ReplicateOutcome<T>> = (0..settings.replicates)
        .into_par_iter()
        .map(|r| match run_replicate(values, init, settings, r) {
            Ok((params, ll, evaluations)) => ReplicateOutcome {
                replicate: r,
                params: Some(params),
                log_likelihood: Some(ll),
                evaluations,
                error: None,
            },
            Err(e) => {
                log::warn!("IF2 replicate {r} failed: {e}");
                ReplicateOutcome {
                    replicate: r,
                    params: None,
                    log_likelihood: None,
                    evaluations: Vec::new(),
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    let best = outcomes
        .iter()
        .filter_map(|o| Some((o.replicate, o.params?, o.log_likelihood?)))
        .filter(|(_, _, ll)| !ll.is_nan())
        .fold(None, |acc: Option<(usize, SvParams<T>, T)>, cur| match acc {
            Some(a) if a.2 >= cur.2 => Some(a),
            _ => Some(cur),
        });
    match best {
        Some((best_replicate, params, log_likelihood)) => Ok(If2Estimate {
            params,
            log_likelihood,
            best_replicate,
            replicates: outcomes,
        }),
        None => Err(Error::EstimationFailed {
            replicates: settings.replicates,
        }),
    }
}
