//! Persistence landscapes sampled on a uniform grid, and their norms.

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{windows_for_series, EmbeddingConfig, Window};
use crate::persistence::{diagram_for_cloud, PersistenceDiagram};
use crate::timeseries::ReturnSeries;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandscapeConfig {
    /// Number of layers kept.
    pub i_max: usize,
    /// Grid nodes spanning `[min birth, max death]`.
    pub grid_size: usize,
}

impl Default for LandscapeConfig {
    fn default() -> Self {
        Self {
            i_max: 10,
            grid_size: 500,
        }
    }
}

impl LandscapeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.i_max < 1 || self.grid_size < 2 {
            return Err(Error::InvalidParameter(format!(
                "landscape needs i_max >= 1 and grid_size >= 2 (got {}, {})",
                self.i_max, self.grid_size
            )));
        }
        Ok(())
    }
}

/// The first `i_max` landscape layers, sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceLandscape<T> {
    grid: Vec<T>,
    /// `layers[i][j]` is λ(i+1) at `grid[j]`.
    layers: Vec<Vec<T>>,
}

impl<T: Scalar> PersistenceLandscape<T> {
    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn layers(&self) -> &[Vec<T>] {
        &self.layers
    }

    pub fn i_max(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, i: usize) -> &[T] {
        &self.layers[i]
    }
}

fn tent<T: Scalar>(x: T, birth: T, death: T) -> T {
    (x - birth).min(death - x).max(T::zero())
}

pub fn landscape_from_diagram<T: Scalar>(
    diagram: &PersistenceDiagram<T>,
    cfg: &LandscapeConfig,
) -> Result<PersistenceLandscape<T>> {
    cfg.validate()?;
    if diagram.has_infinite_death() {
        return Err(Error::InfiniteDeath);
    }
    let pairs = diagram.pairs();
    let (lo, hi) = if pairs.is_empty() {
        (T::zero(), T::one())
    } else {
        (
            pairs.iter().map(|p| p.birth).fold(T::infinity(), T::min),
            pairs.iter().map(|p| p.death).fold(T::neg_infinity(), T::max),
        )
    };
    let steps = T::from_usize_lossy(cfg.grid_size - 1);
    let grid: Vec<T> = (0..cfg.grid_size)
        .map(|j| lo + (hi - lo) * T::from_usize_lossy(j) / steps)
        .collect();

    let mut layers = vec![vec![T::zero(); cfg.grid_size]; cfg.i_max];
    let mut values = Vec::with_capacity(pairs.len());
    for (j, &x) in grid.iter().enumerate() {
        values.clear();
        values.extend(
            pairs
                .iter()
                .map(|p| tent(x, p.birth, p.death))
                .filter(|&v| v > T::zero()),
        );
        values.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        for (layer, &v) in layers.iter_mut().zip(&values) {
            layer[j] = v;
        }
    }
    Ok(PersistenceLandscape { grid, layers })
}

/// Exact L¹ norm of the untruncated landscape: ¼ Σ (d − b)².
pub fn l1_closed_form<T: Scalar>(diagram: &PersistenceDiagram<T>) -> Result<T> {
    if diagram.has_infinite_death() {
        return Err(Error::InfiniteDeath);
    }
    Ok(diagram
        .pairs()
        .iter()
        .map(|p| p.persistence() * p.persistence())
        .sum::<T>()
        / T::lit(4.0))
}

/// Truncated Lᵖ norm by the trapezoid rule over the grid.
pub fn lp_norm_grid<T: Scalar>(landscape: &PersistenceLandscape<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "norm order must be >= 1, got {p}"
        )));
    }
    let g = &landscape.grid;
    let half = T::lit(0.5);
    let total: T = landscape
        .layers
        .iter()
        .map(|layer| {
            layer
                .windows(2)
                .zip(g.windows(2))
                .map(|(v, x)| (x[1] - x[0]) * half * (v[0].abs().powf(p) + v[1].abs().powf(p)))
                .sum::<T>()
        })
        .sum();
    Ok(total.powf(p.recip()))
}

/// L¹ norms of the landscapes of a sequence of windows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeNormSeries<T> {
    pub dates: Vec<NaiveDate>,
    /// Grid-based truncated L¹ norm per window.
    pub values: Vec<T>,
    /// Exact L¹ norm per window, for auditing the truncation error.
    pub closed_form: Vec<T>,
    /// Off-diagonal pairs per window.
    pub pair_counts: Vec<usize>,
}

impl<T: Scalar> LandscapeNormSeries<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest relative gap between the grid and closed-form values.
    pub fn max_relative_gap(&self) -> T {
        self.values
            .iter()
            .zip(&self.closed_form)
            .map(|(&g, &c)| (g - c).abs() / c.max(T::lit(1e-12)))
            .fold(T::zero(), T::max)
    }
}

/// Per-window L¹ norm together with the diagram that produced it.
pub fn window_norm<T: Scalar>(
    window: &Window<T>,
    cfg: &LandscapeConfig,
) -> Result<(T, T, PersistenceDiagram<T>)> {
    let diagram = diagram_for_cloud(&window.cloud)?;
    let grid = lp_norm_grid(&landscape_from_diagram(&diagram, cfg)?, T::one())?;
    let exact = l1_closed_form(&diagram)?;
    Ok((grid, exact, diagram))
}

/// Computes the norm series in parallel; output order follows `windows`.
/// When `keep_diagrams` is set the per-window diagrams are returned as well.
pub fn l1_series_with_diagrams<T: Scalar>(
    windows: &[Window<T>],
    cfg: &LandscapeConfig,
    keep_diagrams: bool,
) -> Result<(LandscapeNormSeries<T>, Vec<PersistenceDiagram<T>>)> {
    if windows.is_empty() {
        return Err(Error::Empty);
    }
    cfg.validate()?;
    let results: Vec<(T, T, PersistenceDiagram<T>)> = windows
        .par_iter()
        .map(|w| window_norm(w, cfg))
        .collect::<Result<_>>()?;
    let mut series = LandscapeNormSeries {
        dates: windows.iter().map(|w| w.anchor_date).collect(),
        values: Vec::with_capacity(results.len()),
        closed_form: Vec::with_capacity(results.len()),
        pair_counts: Vec::with_capacity(results.len()),
    };
    let mut diagrams = Vec::new();
    for (grid, exact, diagram) in results {
        series.values.push(grid);
        series.closed_form.push(exact);
        series.pair_counts.push(diagram.len());
        if keep_diagrams {
            diagrams.push(diagram);
        }
    }
    Ok((series, diagrams))
}

pub fn l1_series<T: Scalar>(windows: &[Window<T>], cfg: &LandscapeConfig) -> Result<LandscapeNormSeries<T>> {
    l1_series_with_diagrams(windows, cfg, false).map(|(s, _)| s)
}

/// Embedding and landscape settings for the series-to-norm pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdaConfig {
    pub embedding: EmbeddingConfig,
    pub landscape: LandscapeConfig,
}

/// Sliding windows of `s` followed by [`l1_series`].
pub fn norm_series_for<T: Scalar>(s: &ReturnSeries<T>, cfg: &TdaConfig) -> Result<LandscapeNormSeries<T>> {
    l1_series(&windows_for_series(s, &cfg.embedding)?, &cfg.landscape)
}
