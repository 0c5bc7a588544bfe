//! Modified band depth and functional boxplots over curve ensembles.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `K` curves sampled on a common grid of `T` points; rows are curves.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalEnsemble {
    curves: DMatrix<f64>,
    domain: Option<Vec<f64>>,
}

impl FunctionalEnsemble {
    pub fn new(curves: DMatrix<f64>) -> Result<Self> {
        if curves.nrows() < 2 {
            return Err(Error::Size {
                what: "ensemble curves",
                found: curves.nrows(),
                required: 2,
            });
        }
        if curves.ncols() == 0 {
            return Err(Error::Size {
                what: "ensemble grid points",
                found: 0,
                required: 1,
            });
        }
        if curves.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("functional ensemble"));
        }
        Ok(FunctionalEnsemble { curves, domain: None })
    }

    /// Ensemble from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let len = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != len) {
            return Err(Error::dims((rows.len(), len), (rows.len(), bad.len())));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(rows.len(), len, &flat))
    }

    pub fn with_domain(mut self, domain: Vec<f64>) -> Result<Self> {
        if domain.len() != self.curves.ncols() {
            return Err(Error::dims((1, self.curves.ncols()), (1, domain.len())));
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn curves(&self) -> &DMatrix<f64> {
        &self.curves
    }

    pub fn domain(&self) -> Option<&[f64]> {
        self.domain.as_deref()
    }

    pub fn curve_count(&self) -> usize {
        self.curves.nrows()
    }

    pub fn grid_len(&self) -> usize {
        self.curves.ncols()
    }

    pub fn curve(&self, k: usize) -> Vec<f64> {
        self.curves.row(k).iter().copied().collect()
    }
}

fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Modified band depth with bands spanned by pairs of curves, boundaries
/// inclusive.
///
/// At each grid point a curve lies in every band except those whose two
/// members are both strictly below it or both strictly above it, so depths
/// follow from per-column rank counts in `O(K T log K)`.
pub fn mbd(ens: &FunctionalEnsemble) -> Vec<f64> {
    let (k, t) = ens.curves.shape();
    let total = pairs(k);
    let mut inside = vec![0usize; k];
    let mut column: Vec<f64> = Vec::with_capacity(k);
    for j in 0..t {
        column.clear();
        column.extend(ens.curves.column(j).iter().copied());
        let mut sorted = column.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        for (c, y) in column.iter().enumerate() {
            let below = sorted.partition_point(|v| v < y);
            let above = k - sorted.partition_point(|v| v <= y);
            inside[c] += total - pairs(below) - pairs(above);
        }
    }
    let denom = (total * t) as f64;
    inside.into_iter().map(|n| n as f64 / denom).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Envelope {
    fn of(ens: &FunctionalEnsemble, members: &[usize]) -> Envelope {
        let t = ens.grid_len();
        let mut lower = vec![f64::INFINITY; t];
        let mut upper = vec![f64::NEG_INFINITY; t];
        for &c in members {
            for (j, y) in ens.curves.row(c).iter().enumerate() {
                lower[j] = lower[j].min(*y);
                upper[j] = upper[j].max(*y);
            }
        }
        Envelope { lower, upper }
    }

    pub fn contains(&self, curve: &[f64]) -> bool {
        curve
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(y, (lo, hi))| lo <= y && y <= hi)
    }
}

/// Envelope of the deepest `⌈pK⌉` curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralRegion {
    pub proportion: f64,
    pub members: Vec<usize>,
    pub envelope: Envelope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalBoxplot {
    pub depths: Vec<f64>,
    pub median_index: usize,
    pub regions: Vec<CentralRegion>,
    pub fences: Envelope,
    pub outlier_indices: Vec<usize>,
}

impl FunctionalBoxplot {
    pub fn region(&self, proportion: f64) -> Option<&CentralRegion> {
        self.regions.iter().find(|r| r.proportion == proportion)
    }
}

pub const DEFAULT_FENCE_FACTOR: f64 = 1.5;

/// Median, central regions and fences from MBD ranks.
///
/// Ties in depth go to the lower index. Fences inflate the 50% region by
/// `fence_factor` times its width on each side; a curve leaving the fences
/// anywhere is an outlier.
pub fn functional_boxplot(ens: &FunctionalEnsemble, proportions: &[f64], fence_factor: f64) -> Result<FunctionalBoxplot> {
    for &p in proportions {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Range {
                name: "central region proportion",
                value: p,
                range: "(0, 1]",
            });
        }
    }
    if !(fence_factor >= 0.0 && fence_factor.is_finite()) {
        return Err(Error::Range {
            name: "fence factor",
            value: fence_factor,
            range: "[0, inf)",
        });
    }
    let depths = mbd(ens);
    let k = ens.curve_count();
    let mut order: Vec<usize> = (0..k).collect();
    // stable: equal depths keep ascending index order
    order.sort_by(|a, b| depths[*b].total_cmp(&depths[*a]));
    let median_index = order[0];

    let region = |p: f64| {
        let count = ((p * k as f64).ceil() as usize).clamp(1, k);
        let mut members = order[..count].to_vec();
        members.sort_unstable();
        let envelope = Envelope::of(ens, &members);
        CentralRegion {
            proportion: p,
            members,
            envelope,
        }
    };
    let regions: Vec<CentralRegion> = proportions.iter().map(|&p| region(p)).collect();
    let iqr = regions
        .iter()
        .find(|r| r.proportion == 0.5)
        .cloned()
        .unwrap_or_else(|| region(0.5))
        .envelope;
    let (lower, upper) = iqr
        .lower
        .iter()
        .zip(&iqr.upper)
        .map(|(lo, hi)| {
            let width = hi - lo;
            (lo - fence_factor * width, hi + fence_factor * width)
        })
        .unzip();
    let fences = Envelope { lower, upper };
    let outlier_indices = (0..k)
        .filter(|&c| !fences.contains(&ens.curve(c)))
        .collect();
    Ok(FunctionalBoxplot {
        depths,
        median_index,
        regions,
        fences,
        outlier_indices,
    })
}
