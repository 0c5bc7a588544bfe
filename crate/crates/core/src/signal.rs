//! Univariate signals, page-matrix restacking and moving-average smoothing.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An ordered sequence of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sample_interval: Option<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("time series"));
        }
        Ok(TimeSeries {
            values,
            sample_interval: None,
        })
    }

    pub fn with_sample_interval(mut self, seconds: f64) -> Result<Self> {
        if !(seconds.is_finite() && seconds > 0.0) {
            return Err(Error::Range {
                name: "sample_interval",
                value: seconds,
                range: "(0, inf)",
            });
        }
        self.sample_interval = Some(seconds);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sample_interval(&self) -> Option<f64> {
        self.sample_interval
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn derived(&self, values: Vec<f64>) -> TimeSeries {
        TimeSeries {
            values,
            sample_interval: self.sample_interval,
        }
    }
}

/// How a length-`N` signal is fitted to `m×n` slots when `m·n ≠ N`.
///
/// When rounding makes `m·n < N` every strategy drops the trailing samples.
/// When `m·n > N`, `PadEdge` repeats the final sample and `Overlap` lets the
/// last row re-read the final `n` samples; `Truncate` never needs more slots
/// than samples because `n` is taken as `round(N/m)` only when it fits and
/// otherwise `floor(N/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitStrategy {
    #[default]
    Truncate,
    PadEdge,
    Overlap,
}

/// A signal laid out row by row: entry `(i, j)` holds fitted sample `n·i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PageMatrix {
    data: DMatrix<f64>,
    original_length: usize,
    covered_length: usize,
    strategy: FitStrategy,
    sample_interval: Option<f64>,
}

impl PageMatrix {
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    /// Number of input samples the page matrix represents; smaller than the
    /// original length only when trailing samples were dropped.
    pub fn covered_length(&self) -> usize {
        self.covered_length
    }

    pub fn strategy(&self) -> FitStrategy {
        self.strategy
    }

    /// Same layout and metadata with replacement contents.
    pub fn with_data(&self, data: DMatrix<f64>) -> Result<PageMatrix> {
        if data.shape() != self.data.shape() {
            return Err(Error::dims(self.data.shape(), data.shape()));
        }
        Ok(PageMatrix {
            data,
            ..self.clone()
        })
    }
}

/// Column count for `m` rows: `round(N/m)`, except that `Truncate` falls back
/// to `floor(N/m)` so it never has to invent samples.
pub fn page_columns(len: usize, rows: usize, strategy: FitStrategy) -> usize {
    let rounded = (len as f64 / rows as f64).round() as usize;
    match strategy {
        FitStrategy::Truncate if rounded * rows > len => len / rows,
        _ => rounded,
    }
}

pub fn to_page_matrix(series: &TimeSeries, rows: usize, strategy: FitStrategy) -> Result<PageMatrix> {
    if rows < 2 {
        return Err(Error::Size {
            what: "page matrix rows",
            found: rows,
            required: 2,
        });
    }
    let len = series.len();
    if len < 2 * rows {
        return Err(Error::Length {
            len,
            required: 2 * rows,
        });
    }
    let cols = page_columns(len, rows, strategy);
    let slots = rows * cols;
    let x = series.values();
    let covered = slots.min(len);

    let fitted: Vec<f64> = if slots <= len {
        x[..slots].to_vec()
    } else {
        match strategy {
            FitStrategy::PadEdge | FitStrategy::Truncate => {
                let last = x[len - 1];
                x.iter().copied().chain(std::iter::repeat(last)).take(slots).collect()
            }
            FitStrategy::Overlap => {
                let head = (rows - 1) * cols;
                x[..head].iter().chain(x[len - cols..].iter()).copied().collect()
            }
        }
    };
    Ok(PageMatrix {
        data: DMatrix::from_row_slice(rows, cols, &fitted),
        original_length: len,
        covered_length: covered,
        strategy,
        sample_interval: series.sample_interval(),
    })
}

/// Unstacks row by row and undoes the fit: padding is trimmed and an
/// overlapping last row contributes only its unread tail.
pub fn from_page_matrix(pm: &PageMatrix) -> TimeSeries {
    let (rows, cols) = pm.data.shape();
    let slots = rows * cols;
    let flat: Vec<f64> = pm.data.transpose().as_slice().to_vec();
    let values = if slots <= pm.original_length {
        flat
    } else {
        match pm.strategy {
            FitStrategy::Overlap => {
                let head = (rows - 1) * cols;
                let tail_needed = pm.original_length - head;
                flat[..head]
                    .iter()
                    .chain(flat[slots - tail_needed..].iter())
                    .copied()
                    .collect()
            }
            _ => flat[..pm.original_length].to_vec(),
        }
    };
    TimeSeries {
        values,
        sample_interval: pm.sample_interval,
    }
}

/// Centered moving average; windows shrink at the edges so the output keeps
/// the input length. `window = 1` is the identity.
pub fn smooth(series: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::Size {
            what: "smoothing window",
            found: 0,
            required: 1,
        });
    }
    if window == 1 || series.is_empty() {
        return Ok(series.clone());
    }
    let x = series.values();
    let n = x.len();
    let left = (window - 1) / 2;
    let right = window - 1 - left;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    let out = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right).min(n - 1);
            if lo == hi {
                x[lo]
            } else {
                let mean = (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64;
                // prefix sums can round a hair outside the window's range
                let (min, max) = x[lo..=hi]
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                mean.clamp(min, max)
            }
        })
        .collect();
    Ok(series.derived(out))
}
