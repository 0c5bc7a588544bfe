//! Structural-health-monitoring case study: a synthetic multi-sensor
//! dataset, a PCA projection, a ν one-class SVM boundary, and geodesic
//! tracking of observations as they are perturbed towards and across it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::augment::{geodesic_path, stiefelgen_matrix, AugmentConfig};
use crate::error::{Error, Result};
use crate::linalg::thin_svd;
use crate::rng::{derived_stream, seeded};

/// Parameters of the synthetic sensor model
/// `S(t) = 4 sin(6π√t) + sin(15πt) + N(bias, noise_sd²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShmParams {
    pub sensors: usize,
    pub obs_count: usize,
    pub rate_hz: f64,
    pub duration_s: f64,
    pub bias: f64,
    /// Standard deviation of the additive noise; zero disables it.
    pub noise_sd: f64,
}

impl Default for ShmParams {
    fn default() -> Self {
        ShmParams {
            sensors: 5,
            obs_count: 50,
            rate_hz: 50.0,
            duration_s: 9.0,
            bias: 1.0,
            noise_sd: 0.5,
        }
    }
}

impl ShmParams {
    pub fn samples(&self) -> usize {
        (self.rate_hz * self.duration_s).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorDataset {
    /// One `sensors × samples` matrix per observation.
    pub observations: Vec<DMatrix<f64>>,
    pub sample_rate: f64,
    pub duration: f64,
}

impl SensorDataset {
    pub fn shape(&self) -> (usize, usize) {
        self.observations.first().map_or((0, 0), |o| o.shape())
    }
}

pub fn shm_signal(t: f64) -> f64 {
    4.0 * (6.0 * PI * t.sqrt()).sin() + (15.0 * PI * t).sin()
}

/// Every sensor row is an independent draw sampled at `t = i / rate_hz`.
pub fn generate_shm_dataset<R: Rng + ?Sized>(params: &ShmParams, rng: &mut R) -> Result<SensorDataset> {
    for (name, value) in [("rate_hz", params.rate_hz), ("duration_s", params.duration_s)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Range {
                name,
                value,
                range: "(0, inf)",
            });
        }
    }
    if !(params.noise_sd >= 0.0 && params.noise_sd.is_finite()) || !params.bias.is_finite() {
        return Err(Error::Range {
            name: "noise_sd",
            value: params.noise_sd,
            range: "[0, inf)",
        });
    }
    let samples = params.samples();
    for (what, found) in [("sensors", params.sensors), ("observations", params.obs_count), ("samples", samples)] {
        if found == 0 {
            return Err(Error::Size {
                what,
                found,
                required: 1,
            });
        }
    }
    let clean: Vec<f64> = (0..samples).map(|i| shm_signal(i as f64 / params.rate_hz)).collect();
    let observations = (0..params.obs_count)
        .map(|_| {
            let mut obs = DMatrix::<f64>::zeros(params.sensors, samples);
            for s in 0..params.sensors {
                for (i, c) in clean.iter().enumerate() {
                    let noise = if params.noise_sd > 0.0 {
                        params.noise_sd * rng.sample::<f64, _>(StandardNormal)
                    } else {
                        0.0
                    };
                    obs[(s, i)] = c + params.bias + noise;
                }
            }
            obs
        })
        .collect();
    Ok(SensorDataset {
        observations,
        sample_rate: params.rate_hz,
        duration: params.duration_s,
    })
}

/// What counts as one PCA data point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcaLayout {
    /// An observation's sensor rows concatenated row by row.
    #[default]
    Stacked,
    /// Each sensor row of each observation on its own.
    PerSensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSpace {
    pub mean: DVector<f64>,
    /// `features × dims`, orthonormal columns.
    pub basis: DMatrix<f64>,
    pub points: Vec<DVector<f64>>,
    /// Sample variance captured by each component.
    pub explained_variance: Vec<f64>,
    pub layout: PcaLayout,
}

impl ProjectedSpace {
    pub fn dims(&self) -> usize {
        self.basis.ncols()
    }

    pub fn project(&self, features: &DVector<f64>) -> Result<DVector<f64>> {
        if features.len() != self.mean.len() {
            return Err(Error::dims((self.mean.len(), 1), (features.len(), 1)));
        }
        Ok(self.basis.tr_mul(&(features - &self.mean)))
    }

    pub fn reconstruct(&self, point: &DVector<f64>) -> Result<DVector<f64>> {
        if point.len() != self.dims() {
            return Err(Error::dims((self.dims(), 1), (point.len(), 1)));
        }
        Ok(&self.mean + &self.basis * point)
    }

    /// Projects a whole observation; only defined for the stacked layout.
    pub fn project_observation(&self, obs: &DMatrix<f64>) -> Result<DVector<f64>> {
        if self.layout != PcaLayout::Stacked {
            return Err(Error::Unsupported("observation projection needs the stacked layout"));
        }
        self.project(&flatten(obs))
    }
}

/// Row-major flattening.
pub fn flatten(obs: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(obs.transpose().as_slice())
}

pub fn fit_pca(dataset: &SensorDataset, dims: usize, layout: PcaLayout) -> Result<ProjectedSpace> {
    let rows: Vec<DVector<f64>> = match layout {
        PcaLayout::Stacked => dataset.observations.iter().map(flatten).collect(),
        PcaLayout::PerSensor => dataset
            .observations
            .iter()
            .flat_map(|o| o.row_iter().map(|r| r.transpose()).collect::<Vec<_>>())
            .collect(),
    };
    let k = rows.len();
    if dims == 0 || k <= dims {
        return Err(Error::Size {
            what: "PCA data points",
            found: k,
            required: dims.max(1) + 1,
        });
    }
    let features = rows[0].len();
    let mean = rows.iter().fold(DVector::<f64>::zeros(features), |acc, r| acc + r) / k as f64;
    let centered = DMatrix::from_fn(k, features, |i, j| rows[i][j] - mean[j]);
    let svd = thin_svd(&centered)?;
    let s = &svd.singular_values;
    let found = s.iter().filter(|v| **v > 1e-12 * s[0]).count();
    if s[0] == 0.0 || found < dims {
        return Err(Error::Rank { found, required: dims });
    }
    let basis = svd.v.columns(0, dims).into_owned();
    let points = rows.iter().map(|r| basis.tr_mul(&(r - &mean))).collect();
    let explained_variance = s[..dims].iter().map(|v| v * v / (k - 1) as f64).collect();
    Ok(ProjectedSpace {
        mean,
        basis,
        points,
        explained_variance,
        layout,
    })
}

/// Anything that scores points as inside (≥ 0) or outside (< 0).
pub trait DecisionFunction {
    fn decision(&self, point: &DVector<f64>) -> f64;
}

impl<F: Fn(&DVector<f64>) -> f64> DecisionFunction for F {
    fn decision(&self, point: &DVector<f64>) -> f64 {
        self(point)
    }
}

pub const KKT_TOLERANCE: f64 = 1e-6;
pub const MAX_SMO_ITERATIONS: usize = 100_000;

/// ν one-class SVM with an RBF kernel, normalized so coefficients sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct OneClassModel {
    pub kernel_gamma: f64,
    pub nu: f64,
    pub support_coefficients: Vec<f64>,
    pub offset: f64,
    pub training_points: Vec<DVector<f64>>,
    pub iterations: usize,
}

impl OneClassModel {
    fn kernel(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        rbf(self.kernel_gamma, a, b)
    }

    pub fn upper_bound(&self) -> f64 {
        1.0 / (self.nu * self.training_points.len() as f64)
    }

    pub fn support_vector_count(&self) -> usize {
        self.support_coefficients.iter().filter(|a| **a > 0.0).count()
    }

    pub fn training_outliers(&self) -> Vec<usize> {
        (0..self.training_points.len())
            .filter(|&i| self.decision(&self.training_points[i]) < 0.0)
            .collect()
    }
}

impl DecisionFunction for OneClassModel {
    fn decision(&self, point: &DVector<f64>) -> f64 {
        self.training_points
            .iter()
            .zip(&self.support_coefficients)
            .filter(|(_, a)| **a > 0.0)
            .map(|(x, a)| a * self.kernel(x, point))
            .sum::<f64>()
            - self.offset
    }
}

fn rbf(gamma: f64, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (-gamma * (a - b).norm_squared()).exp()
}

/// Solves `min ½ αᵀKα` subject to `Σα = 1`, `0 ≤ α ≤ 1/(νK)` by sequential
/// minimal optimization over maximal violating pairs.
pub fn fit_one_class(points: &[DVector<f64>], nu: f64, gamma: f64) -> Result<OneClassModel> {
    let k = points.len();
    if k < 2 {
        return Err(Error::Size {
            what: "training points",
            found: k,
            required: 2,
        });
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Range {
            name: "nu",
            value: nu,
            range: "(0, 1]",
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Range {
            name: "gamma",
            value: gamma,
            range: "(0, inf)",
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != points[0].len()) {
        return Err(Error::dims((points[0].len(), 1), (p.len(), 1)));
    }
    let q = DMatrix::from_fn(k, k, |i, j| rbf(gamma, &points[i], &points[j]));
    let cap = 1.0 / (nu * k as f64);

    // feasible start: fill coefficients up to the cap in index order
    let mut alpha = vec![0.0; k];
    let mut remaining: f64 = 1.0;
    for a in alpha.iter_mut() {
        let take = remaining.min(cap);
        *a = take;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    let mut grad: Vec<f64> = (0..k).map(|i| (0..k).map(|j| q[(i, j)] * alpha[j]).sum()).collect();

    let mut iterations = 0;
    loop {
        let up = (0..k)
            .filter(|&i| alpha[i] < cap)
            .min_by(|&a, &b| grad[a].total_cmp(&grad[b]));
        let low = (0..k)
            .filter(|&j| alpha[j] > 0.0)
            .max_by(|&a, &b| grad[a].total_cmp(&grad[b]));
        let (Some(i), Some(j)) = (up, low) else { break };
        if grad[j] - grad[i] <= KKT_TOLERANCE {
            break;
        }
        if iterations == MAX_SMO_ITERATIONS {
            return Err(Error::Convergence(MAX_SMO_ITERATIONS));
        }
        iterations += 1;
        let curvature = (q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)]).max(1e-12);
        let mut delta = (grad[j] - grad[i]) / curvature;
        let room_i = cap - alpha[i];
        let room_j = alpha[j];
        if delta >= room_i {
            delta = room_i;
        }
        if delta >= room_j {
            delta = room_j;
        }
        alpha[i] = if delta == room_i { cap } else { alpha[i] + delta };
        alpha[j] = if delta == room_j { 0.0 } else { alpha[j] - delta };
        for (l, g) in grad.iter_mut().enumerate() {
            *g += delta * (q[(l, i)] - q[(l, j)]);
        }
    }

    let free: Vec<f64> = (0..k)
        .filter(|&i| alpha[i] > 0.0 && alpha[i] < cap)
        .map(|i| grad[i])
        .collect();
    let offset = if free.is_empty() {
        let at_cap = (0..k).filter(|&i| alpha[i] >= cap).map(|i| grad[i]).fold(f64::NEG_INFINITY, f64::max);
        let at_zero = (0..k).filter(|&i| alpha[i] <= 0.0).map(|i| grad[i]).fold(f64::INFINITY, f64::min);
        match (at_cap.is_finite(), at_zero.is_finite()) {
            (true, true) => 0.5 * (at_cap + at_zero),
            (true, false) => at_cap,
            _ => at_zero,
        }
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };
    Ok(OneClassModel {
        kernel_gamma: gamma,
        nu,
        support_coefficients: alpha,
        offset,
        training_points: points.to_vec(),
        iterations,
    })
}

/// A perturbed observation followed through the projection.
#[derive(Debug, Clone)]
pub struct Track {
    pub matrices: Vec<DMatrix<f64>>,
    pub path: Vec<DVector<f64>>,
    pub decisions: Vec<f64>,
    /// First step whose decision value is negative.
    pub crossing: Option<usize>,
}

/// Moves observation `obs_index` along one geodesic (no page matrix; the
/// sensor stack is the matrix) and scores every step.
pub fn perturb_and_track<D: DecisionFunction + ?Sized, R: Rng + ?Sized>(
    dataset: &SensorDataset,
    obs_index: usize,
    cfg: &AugmentConfig,
    steps: usize,
    space: &ProjectedSpace,
    model: &D,
    rng: &mut R,
) -> Result<Track> {
    let obs = dataset.observations.get(obs_index).ok_or(Error::Range {
        name: "observation index",
        value: obs_index as f64,
        range: "[0, observation count)",
    })?;
    let matrices = geodesic_path(obs, cfg, steps, rng)?;
    let path = matrices
        .iter()
        .map(|m| space.project_observation(m))
        .collect::<Result<Vec<_>>>()?;
    let decisions: Vec<f64> = path.iter().map(|p| model.decision(p)).collect();
    let crossing = decisions.iter().position(|d| *d < 0.0);
    Ok(Track {
        matrices,
        path,
        decisions,
        crossing,
    })
}

/// `(index, ‖after − before‖₂)` ascending by change, ties by index.
pub fn norm_change_ranking(before: &[DVector<f64>], after: &[DVector<f64>]) -> Result<Vec<(usize, f64)>> {
    if before.len() != after.len() {
        return Err(Error::dims((before.len(), 1), (after.len(), 1)));
    }
    let mut ranking = before
        .iter()
        .zip(after)
        .enumerate()
        .map(|(i, (a, b))| {
            if a.len() != b.len() {
                return Err(Error::dims((a.len(), 1), (b.len(), 1)));
            }
            Ok((i, (b - a).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(ranking)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialPick {
    /// Position in the ranking.
    pub rank: usize,
    /// Data index of the chosen point.
    pub index: usize,
    pub norm_change: f64,
    pub threshold: f64,
}

/// First entry of an ascending ranking whose change strictly exceeds the
/// nearest-rank `percentile`; `None` when nothing does.
pub fn adversarial_candidate(ranking: &[(usize, f64)], percentile: f64) -> Result<Option<AdversarialPick>> {
    if ranking.is_empty() {
        return Err(Error::Size {
            what: "ranking entries",
            found: 0,
            required: 1,
        });
    }
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(Error::Range {
            name: "percentile",
            value: percentile,
            range: "(0, 100)",
        });
    }
    let n = ranking.len();
    let nearest = ((percentile / 100.0 * n as f64).ceil() as usize).clamp(1, n);
    let threshold = ranking[nearest - 1].1;
    Ok(ranking
        .iter()
        .enumerate()
        .find(|(_, (_, change))| *change > threshold)
        .map(|(rank, &(index, norm_change))| AdversarialPick {
            rank,
            index,
            norm_change,
            threshold,
        }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShmStudyConfig {
    pub dataset: ShmParams,
    pub dims: usize,
    pub nu: f64,
    pub gamma: f64,
    pub augment: AugmentConfig,
    pub steps: usize,
    pub percentile: f64,
    /// Observation to follow; defaults to the adversarial candidate, else 0.
    pub track_index: Option<usize>,
}

impl Default for ShmStudyConfig {
    fn default() -> Self {
        ShmStudyConfig {
            dataset: ShmParams::default(),
            dims: 2,
            nu: 0.1,
            gamma: 1e-3,
            augment: AugmentConfig::new(1.0),
            steps: 20,
            percentile: 85.0,
            track_index: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShmStudy {
    pub dataset: SensorDataset,
    pub space: ProjectedSpace,
    pub model: OneClassModel,
    pub perturbed: Vec<DVector<f64>>,
    pub ranking: Vec<(usize, f64)>,
    pub candidate: Option<AdversarialPick>,
    pub track_index: usize,
    pub track: Track,
}

/// End-to-end study seeded by `cfg.augment.seed`: the dataset uses the plain
/// seeded stream and observation `k` uses derived stream `k`, so the tracked
/// path ends at that observation's one-shot perturbation.
pub fn shm_study(cfg: &ShmStudyConfig) -> Result<ShmStudy> {
    let seed = cfg.augment.seed;
    let dataset = generate_shm_dataset(&cfg.dataset, &mut seeded(seed))?;
    let space = fit_pca(&dataset, cfg.dims, PcaLayout::Stacked)?;
    let model = fit_one_class(&space.points, cfg.nu, cfg.gamma)?;
    let perturb = |k: usize| {
        let out = stiefelgen_matrix(&dataset.observations[k], &cfg.augment, &mut derived_stream(seed, k as u64))?;
        space.project_observation(&out.generated)
    };
    #[cfg(feature = "parallel")]
    let perturbed: Result<Vec<_>> = {
        use rayon::prelude::*;
        (0..dataset.observations.len()).into_par_iter().map(perturb).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let perturbed: Result<Vec<_>> = (0..dataset.observations.len()).map(perturb).collect();
    let perturbed = perturbed?;
    let ranking = norm_change_ranking(&space.points, &perturbed)?;
    let candidate = adversarial_candidate(&ranking, cfg.percentile)?;
    let track_index = cfg.track_index.or(candidate.map(|c| c.index)).unwrap_or(0);
    let track = perturb_and_track(
        &dataset,
        track_index,
        &cfg.augment,
        cfg.steps,
        &space,
        &model,
        &mut derived_stream(seed, track_index as u64),
    )?;
    Ok(ShmStudy {
        dataset,
        space,
        model,
        perturbed,
        ranking,
        candidate,
        track_index,
        track,
    })
}
