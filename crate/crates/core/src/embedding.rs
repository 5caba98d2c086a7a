//! Delay-coordinate embedding and sliding-window point clouds.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::timeseries::ReturnSeries;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// Embedding dimension `m`.
    pub dimension: usize,
    /// Delay `d` between coordinates, in observations.
    pub delay: usize,
    /// Points per sliding-window cloud.
    pub window: usize,
    /// Offset between consecutive windows.
    pub stride: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dimension: 4,
            delay: 2,
            window: 50,
            stride: 1,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 1 || self.delay < 1 || self.window < 2 || self.stride < 1 {
            return Err(Error::InvalidParameter(format!(
                "embedding requires m >= 1, d >= 1, w >= 2, stride >= 1 (got m={}, d={}, w={}, stride={})",
                self.dimension, self.delay, self.window, self.stride
            )));
        }
        Ok(())
    }

    /// Scalar observations spanned by one delay vector.
    pub fn vector_span(&self) -> usize {
        (self.dimension - 1) * self.delay + 1
    }

    /// Scalar observations consumed by one window: `w + (m - 1) d`.
    pub fn window_span(&self) -> usize {
        self.window + (self.dimension - 1) * self.delay
    }

    /// Windows produced from a series of `len` observations.
    pub fn window_count(&self, len: usize) -> usize {
        if len < self.window_span() {
            0
        } else {
            (len - self.window_span()) / self.stride + 1
        }
    }
}

/// Finite set of points in ℝᵐ, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    dimension: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn from_points(points: &[Vec<T>]) -> Result<Self> {
        let dimension = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dimension);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dimension {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dimension,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dimension, coords })
    }

    /// Builds a cloud from flat row-major coordinates.
    pub fn from_flat(dimension: usize, coords: Vec<T>) -> Result<Self> {
        if dimension == 0 || !coords.len().is_multiple_of(dimension) {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not tile dimension {dimension}",
                coords.len()
            )));
        }
        Ok(Self { dimension, coords })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dimension).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dimension.max(1))
    }
}

/// Delay vectors of a dated series.
#[derive(Debug, Clone)]
pub struct DelayEmbedding<T> {
    pub dimension: usize,
    pub delay: usize,
    /// Vector `t` is `(z_t, z_{t+d}, …, z_{t+(m-1)d})`.
    pub vectors: Vec<Vec<T>>,
    /// Dates of the source series.
    pub source_dates: Vec<NaiveDate>,
}

impl<T> DelayEmbedding<T> {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// One sliding-window cloud together with the observations it consumed.
#[derive(Debug, Clone)]
pub struct Window<T> {
    pub cloud: PointCloud<T>,
    /// Index of the first scalar observation used.
    pub start_index: usize,
    /// Index of the last scalar observation used.
    pub anchor_index: usize,
    /// Date of `anchor_index`.
    pub anchor_date: NaiveDate,
}

impl<T> Window<T> {
    /// Scalar observations consumed by the window.
    pub fn span(&self) -> usize {
        self.anchor_index - self.start_index + 1
    }
}

pub fn delay_embed_values<T: Scalar>(values: &[T], dimension: usize, delay: usize) -> Result<Vec<Vec<T>>> {
    if dimension < 1 || delay < 1 {
        return Err(Error::InvalidParameter(
            "embedding dimension and delay must be positive".into(),
        ));
    }
    let needed = (dimension - 1) * delay + 1;
    if values.len() < needed {
        return Err(Error::InsufficientObservations {
            needed,
            got: values.len(),
        });
    }
    Ok((0..=values.len() - needed)
        .map(|t| (0..dimension).map(|j| values[t + j * delay]).collect())
        .collect())
}

pub fn delay_embed<T: Scalar>(
    s: &ReturnSeries<T>,
    dimension: usize,
    delay: usize,
) -> Result<DelayEmbedding<T>> {
    Ok(DelayEmbedding {
        dimension,
        delay,
        vectors: delay_embed_values(s.values(), dimension, delay)?,
        source_dates: s.dates().to_vec(),
    })
}

/// Consecutive windows of `window` delay vectors, advancing `stride` vectors
/// at a time. Each window is anchored at the last scalar observation it uses.
pub fn sliding_windows<T: Scalar>(
    emb: &DelayEmbedding<T>,
    window: usize,
    stride: usize,
) -> Result<Vec<Window<T>>> {
    if window < 1 || stride < 1 {
        return Err(Error::InvalidParameter(
            "window length and stride must be positive".into(),
        ));
    }
    if window > emb.len() {
        return Err(Error::WindowTooLong {
            window,
            len: emb.len(),
        });
    }
    let lag = (emb.dimension - 1) * emb.delay;
    (0..=emb.len() - window)
        .step_by(stride)
        .map(|t| {
            let coords = emb.vectors[t..t + window].concat();
            let anchor_index = t + window - 1 + lag;
            Ok(Window {
                cloud: PointCloud::from_flat(emb.dimension, coords)?,
                start_index: t,
                anchor_index,
                anchor_date: emb.source_dates[anchor_index],
            })
        })
        .collect()
}

/// `delay_embed` followed by `sliding_windows` with the settings in `cfg`.
pub fn windows_for_series<T: Scalar>(s: &ReturnSeries<T>, cfg: &EmbeddingConfig) -> Result<Vec<Window<T>>> {
    cfg.validate()?;
    let emb = delay_embed(s, cfg.dimension, cfg.delay)?;
    sliding_windows(&emb, cfg.window, cfg.stride)
}
