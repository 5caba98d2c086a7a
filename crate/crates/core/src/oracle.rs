//! Slow, independent reference implementations used to check the fast paths.
//!
//! Nothing here shares code with the production modules. Compiled for unit
//! tests and behind the `oracle` feature for integration tests.

use std::collections::HashMap;

use crate::Scalar;

fn filtration<T: Scalar>(dist: &[Vec<T>]) -> (Vec<(T, Vec<usize>)>, T) {
    let n = dist.len();
    let diameter = dist
        .iter()
        .flatten()
        .copied()
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let mut simplices: Vec<(T, Vec<usize>)> = (0..n).map(|v| (T::zero(), vec![v])).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i][j] <= diameter {
                simplices.push((dist[i][j], vec![i, j]));
            }
            for k in (j + 1)..n {
                let mut v = dist[i][j];
                for w in [dist[i][k], dist[j][k]] {
                    if w > v {
                        v = w;
                    }
                }
                if v <= diameter {
                    simplices.push((v, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.len().cmp(&b.1.len()))
            .then_with(|| a.1.cmp(&b.1))
    });
    (simplices, diameter)
}

/// Left-to-right Z₂ reduction of the full boundary matrix. Returns
/// `(birth, death)` pairs with positive persistence in the given degree,
/// sorted by birth then death.
fn naive_pairs<T: Scalar>(dist: &[Vec<T>], degree: usize) -> Vec<(T, T)> {
    let (simplices, _) = filtration(dist);
    let index: HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.1.clone(), i))
        .collect();

    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(simplices.len());
    for (j, (value, verts)) in simplices.iter().enumerate() {
        let mut col: Vec<usize> = if verts.len() == 1 {
            Vec::new()
        } else {
            (0..verts.len())
                .map(|skip| {
                    let face: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    index[&face]
                })
                .collect()
        };
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match low_owner.get(&low) {
                Some(&k) => {
                    let other = &columns[k];
                    let mut merged: Vec<usize> = col
                        .iter()
                        .filter(|x| !other.contains(x))
                        .chain(other.iter().filter(|x| !col.contains(x)))
                        .copied()
                        .collect();
                    merged.sort_unstable();
                    col = merged;
                }
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            low_owner.insert(low, j);
            let (birth, birth_verts) = &simplices[low];
            if birth_verts.len() == degree + 1 && *value > *birth {
                pairs.push((*birth, *value));
            }
        }
        columns.push(col);
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pairs
}

/// Degree-1 pairs of the Rips filtration up to the diameter.
pub fn naive_h1_pairs<T: Scalar>(dist: &[Vec<T>]) -> Vec<(T, T)> {
    naive_pairs(dist, 1)
}

/// Finite degree-0 pairs of the Rips filtration up to the diameter.
pub fn naive_h0_deaths<T: Scalar>(dist: &[Vec<T>]) -> Vec<(T, T)> {
    naive_pairs(dist, 0)
}

/// Exhaustive optimal partitioning under SSE cost with a per-changepoint
/// penalty. Returns segment start indices (excluding 0) and the minimized
/// objective. Segment costs come from Welford updates, not prefix sums.
pub fn optimal_partitioning(values: &[f64], penalty: f64) -> (Vec<usize>, f64) {
    let n = values.len();
    // cost[s][t] for the segment values[s..t], filled by extending backwards.
    let mut best = vec![f64::INFINITY; n + 1];
    let mut last = vec![0usize; n + 1];
    best[0] = -penalty;
    for t in 1..=n {
        let (mut count, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
        for s in (0..t).rev() {
            count += 1.0;
            let x = values[s];
            let delta = x - mean;
            mean += delta / count;
            m2 += delta * (x - mean);
            let candidate = best[s] + m2 + penalty;
            if candidate < best[t] {
                best[t] = candidate;
                last[t] = s;
            }
        }
    }
    let mut cps = Vec::new();
    let mut t = n;
    while t > 0 {
        let s = last[t];
        if s > 0 {
            cps.push(s);
        }
        t = s;
    }
    cps.reverse();
    (cps, best[n])
}

/// Direct O(N²) discrete Fourier transform, returned as `(re, im)` pairs.
pub fn naive_dft(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len();
    (0..n)
        .map(|k| {
            values.iter().enumerate().fold((0.0, 0.0), |(re, im), (t, &x)| {
                let angle = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                (re + x * angle.cos(), im + x * angle.sin())
            })
        })
        .collect()
}

/// Log-likelihood of i.i.d. N(0, σ²) observations.
pub fn gaussian_log_likelihood(z: &[f64], sigma: f64) -> f64 {
    z.iter()
        .map(|&x| -0.5 * (2.0 * std::f64::consts::PI).ln() - sigma.ln() - x * x / (2.0 * sigma * sigma))
        .sum()
}

/// Sample autocorrelation by direct double loop.
pub fn brute_acf(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
    (0..=max_lag)
        .map(|k| {
            let mut num = 0.0;
            for t in 0..n - k {
                num += (values[t] - mean) * (values[t + k] - mean);
            }
            num / denom
        })
        .collect()
}

/// Type-7 quantile by sorting a copy and interpolating order statistics.
pub fn quantile(sample: &[f64], p: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (s.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}
