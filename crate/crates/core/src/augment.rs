//! Singular-value-preserving augmentation.
//!
//! A matrix `M = U₁ Σ V₁*` is regenerated as `U₂ Σ V₂*`, where `U₂` and `V₂`
//! are endpoints of random geodesics leaving `U₁` and `V₁`. The geodesic
//! lengths are fractions `β_u`, `β_v` of the injectivity radius. By default
//! the square factors move on the full orthogonal (unitary) groups; with a
//! `rank` of `d` only the first `d` columns are moved as a point of `St(·, d)`
//! and the remaining columns follow the same ambient rotation, so `Σ` is
//! still exact.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{full_svd, random_normal, reconstruct, Field, Svd};
use crate::rng::derived_stream;
use crate::signal::{from_page_matrix, smooth, to_page_matrix, FitStrategy, TimeSeries};
use crate::stiefel::{
    exp_map, exp_map_with_complement, normalize_and_scale, random_tangent, MetricParams, StiefelPoint, TangentVector,
};

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub beta_u: f64,
    pub beta_v: f64,
    pub alpha: f64,
    pub smooth_len: usize,
    pub rank: Option<usize>,
    pub seed: u64,
    pub fit: FitStrategy,
}

impl AugmentConfig {
    /// Same `beta` on both factors, canonical metric, no smoothing.
    pub fn new(beta: f64) -> Self {
        AugmentConfig {
            beta_u: beta,
            beta_v: beta,
            alpha: 0.0,
            smooth_len: 1,
            rank: None,
            seed: 0,
            fit: FitStrategy::Truncate,
        }
    }

    pub fn with_betas(mut self, beta_u: f64, beta_v: f64) -> Self {
        self.beta_u = beta_u;
        self.beta_v = beta_v;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_smoothing(mut self, window: usize) -> Self {
        self.smooth_len = window;
        self
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_fit(mut self, fit: FitStrategy) -> Self {
        self.fit = fit;
        self
    }

    pub fn metric(&self) -> Result<MetricParams> {
        MetricParams::new(self.alpha)
    }

    fn validate(&self) -> Result<MetricParams> {
        for (name, beta) in [("beta_u", self.beta_u), ("beta_v", self.beta_v)] {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::Range {
                    name,
                    value: beta,
                    range: "[0, 1]",
                });
            }
        }
        if self.smooth_len == 0 {
            return Err(Error::Size {
                what: "smoothing window",
                found: 0,
                required: 1,
            });
        }
        self.metric()
    }
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig::new(0.4)
    }
}

/// Output of one draw, with the factors it was built from.
#[derive(Debug, Clone)]
pub struct AugmentResult<T: Field> {
    pub generated: DMatrix<T>,
    pub u1: DMatrix<T>,
    pub sigma: Vec<f64>,
    pub v1: DMatrix<T>,
    pub u2: DMatrix<T>,
    pub v2: DMatrix<T>,
    /// Scaled tangents at the moved frames (full factors, or the leading
    /// `rank` columns in reduced-rank mode).
    pub delta_u: DMatrix<T>,
    pub delta_v: DMatrix<T>,
}

/// One factor's frame and its sampled direction.
struct FactorMotion<T: Field> {
    full: DMatrix<T>,
    head: StiefelPoint<T>,
    rest: Option<DMatrix<T>>,
    tangent: TangentVector<T>,
}

impl<T: Field> FactorMotion<T> {
    fn sample<R: Rng + ?Sized>(
        full: DMatrix<T>,
        rank: Option<usize>,
        beta: f64,
        metric: MetricParams,
        rng: &mut R,
    ) -> Result<Self> {
        let (head, rest) = match rank {
            None => (StiefelPoint::new_unchecked(full.clone()), None),
            Some(d) => (
                StiefelPoint::new_unchecked(full.columns(0, d).into_owned()),
                Some(full.columns(d, full.ncols() - d).into_owned()),
            ),
        };
        // always draw, so U-only and V-only runs share the joint run's directions
        let raw = random_tangent(&head, rng);
        let tangent = normalize_and_scale(&head, &raw, beta, metric)?;
        Ok(FactorMotion {
            full,
            head,
            rest,
            tangent,
        })
    }

    fn at(&self, t: f64, metric: MetricParams) -> Result<DMatrix<T>> {
        let step = if t == 1.0 { self.tangent.clone() } else { self.tangent.scaled(t) };
        if step.is_zero() {
            return Ok(self.full.clone());
        }
        match &self.rest {
            None => Ok(exp_map(&self.head, &step, metric)?.into_matrix()),
            Some(rest) => {
                let (moved, carried) = exp_map_with_complement(&self.head, &step, metric, rest)?;
                let d = moved.cols();
                let mut out = DMatrix::<T>::zeros(self.full.nrows(), self.full.ncols());
                out.columns_mut(0, d).copy_from(moved.matrix());
                out.columns_mut(d, carried.ncols()).copy_from(&carried);
                Ok(out)
            }
        }
    }
}

struct Plan<T: Field> {
    source: DMatrix<T>,
    sigma: Vec<f64>,
    u: FactorMotion<T>,
    v: FactorMotion<T>,
    metric: MetricParams,
}

impl<T: Field> Plan<T> {
    fn sample<R: Rng + ?Sized>(m: &DMatrix<T>, cfg: &AugmentConfig, rng: &mut R) -> Result<Self> {
        let metric = cfg.validate()?;
        let (rows, cols) = m.shape();
        let k = rows.min(cols);
        if k < 2 {
            return Err(Error::Size {
                what: "smaller matrix dimension",
                found: k,
                required: 2,
            });
        }
        if let Some(d) = cfg.rank {
            if d == 0 || d >= k {
                return Err(Error::Range {
                    name: "rank",
                    value: d as f64,
                    range: "[1, min(m, n))",
                });
            }
        }
        if m.iter().all(|x| *x == T::zero()) {
            return Err(Error::Degenerate("all-zero matrix has no singular vectors"));
        }
        let Svd {
            u,
            singular_values,
            v,
        } = full_svd(m)?;
        let u = FactorMotion::sample(u, cfg.rank, cfg.beta_u, metric, rng)?;
        let v = FactorMotion::sample(v, cfg.rank, cfg.beta_v, metric, rng)?;
        Ok(Plan {
            source: m.clone(),
            sigma: singular_values,
            u,
            v,
            metric,
        })
    }

    fn at(&self, t: f64) -> Result<AugmentResult<T>> {
        let u2 = self.u.at(t, self.metric)?;
        let v2 = self.v.at(t, self.metric)?;
        let generated = if u2 == self.u.full && v2 == self.v.full {
            self.source.clone()
        } else {
            reconstruct(&u2, &self.sigma, &v2)
        };
        Ok(AugmentResult {
            generated,
            u1: self.u.full.clone(),
            sigma: self.sigma.clone(),
            v1: self.v.full.clone(),
            u2,
            v2,
            delta_u: self.u.tangent.delta().scale_by(t),
            delta_v: self.v.tangent.delta().scale_by(t),
        })
    }
}

trait ScaleBy<T> {
    fn scale_by(&self, t: f64) -> DMatrix<T>;
}

impl<T: Field> ScaleBy<T> for DMatrix<T> {
    fn scale_by(&self, t: f64) -> DMatrix<T> {
        if t == 1.0 {
            self.clone()
        } else {
            self * T::from_real(t)
        }
    }
}

/// One augmentation draw of a matrix (a page matrix or a stack of signals).
///
/// The `U` tangent is drawn before the `V` tangent.
pub fn stiefelgen_matrix<T: Field, R: Rng + ?Sized>(
    m: &DMatrix<T>,
    cfg: &AugmentConfig,
    rng: &mut R,
) -> Result<AugmentResult<T>> {
    Plan::sample(m, cfg, rng)?.at(1.0)
}

/// Reconstructions along one sampled geodesic at `t = k/steps`, `k = 0..=steps`.
pub fn geodesic_path<T: Field, R: Rng + ?Sized>(
    m: &DMatrix<T>,
    cfg: &AugmentConfig,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<DMatrix<T>>> {
    if steps == 0 {
        return Err(Error::Size {
            what: "geodesic steps",
            found: 0,
            required: 1,
        });
    }
    let plan = Plan::sample(m, cfg, rng)?;
    (0..=steps)
        .map(|k| {
            let t = if k == steps { 1.0 } else { k as f64 / steps as f64 };
            plan.at(t).map(|r| r.generated)
        })
        .collect()
}

/// A series augmentation with its intermediate stages.
#[derive(Debug, Clone)]
pub struct SeriesAugment {
    pub series: TimeSeries,
    /// Unstacked output before smoothing.
    pub unsmoothed: TimeSeries,
    pub page: AugmentResult<f64>,
}

/// Page matrix → matrix augmentation → unstack → smooth.
pub fn stiefelgen_series_detailed<R: Rng + ?Sized>(
    series: &TimeSeries,
    rows: usize,
    cfg: &AugmentConfig,
    rng: &mut R,
) -> Result<SeriesAugment> {
    let pm = to_page_matrix(series, rows, cfg.fit)?;
    let page = stiefelgen_matrix(pm.data(), cfg, rng)?;
    let unsmoothed = from_page_matrix(&pm.with_data(page.generated.clone())?);
    let series = smooth(&unsmoothed, cfg.smooth_len)?;
    Ok(SeriesAugment {
        series,
        unsmoothed,
        page,
    })
}

pub fn stiefelgen_series<R: Rng + ?Sized>(
    series: &TimeSeries,
    rows: usize,
    cfg: &AugmentConfig,
    rng: &mut R,
) -> Result<TimeSeries> {
    Ok(stiefelgen_series_detailed(series, rows, cfg, rng)?.series)
}

/// Smoothed series along one geodesic, `steps + 1` of them.
pub fn geodesic_series<R: Rng + ?Sized>(
    series: &TimeSeries,
    rows: usize,
    cfg: &AugmentConfig,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<TimeSeries>> {
    let pm = to_page_matrix(series, rows, cfg.fit)?;
    geodesic_path(pm.data(), cfg, steps, rng)?
        .into_iter()
        .map(|m| smooth(&from_page_matrix(&pm.with_data(m)?), cfg.smooth_len))
        .collect()
}

/// `count` independent series draws, one per row. Draw `k` uses
/// `derived_stream(cfg.seed, k)`, so the result does not depend on thread
/// scheduling.
pub fn batch_generate(series: &TimeSeries, count: usize, rows: usize, cfg: &AugmentConfig) -> Result<DMatrix<f64>> {
    if count == 0 {
        return Err(Error::Size {
            what: "batch count",
            found: 0,
            required: 1,
        });
    }
    let draw = |k: usize| stiefelgen_series(series, rows, cfg, &mut derived_stream(cfg.seed, k as u64));

    #[cfg(feature = "parallel")]
    let draws: Result<Vec<TimeSeries>> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(draw).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let draws: Result<Vec<TimeSeries>> = (0..count).map(draw).collect();

    let draws = draws?;
    let len = draws[0].len();
    Ok(DMatrix::from_fn(count, len, |k, j| draws[k].values()[j]))
}

/// Off-manifold comparator: adds `N(0, σ²)` noise straight to `U₁` and `V₁`.
#[derive(Debug, Clone)]
pub struct AmbientPerturbation<T: Field> {
    pub generated: DMatrix<T>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

pub fn ambient_perturb<T: Field, R: Rng + ?Sized>(m: &DMatrix<T>, sigma: f64, rng: &mut R) -> Result<AmbientPerturbation<T>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Range {
            name: "sigma",
            value: sigma,
            range: "[0, inf)",
        });
    }
    let svd = full_svd(m)?;
    let (rows, cols) = m.shape();
    let noise_u: DMatrix<T> = random_normal(rows, rows, rng);
    let noise_v: DMatrix<T> = random_normal(cols, cols, rng);
    let u = &svd.u + noise_u * T::from_real(sigma);
    let v = &svd.v + noise_v * T::from_real(sigma);
    Ok(AmbientPerturbation {
        generated: reconstruct(&u, &svd.singular_values, &v),
        u,
        v,
    })
}
