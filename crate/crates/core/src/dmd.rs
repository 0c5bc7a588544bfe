//! Exact dynamic mode decomposition, optionally with the truncated POD
//! factors pushed along complex Stiefel geodesics to produce forecast
//! ensembles.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::fda::FunctionalEnsemble;
use crate::linalg::{all_finite, eig_complex, least_squares, thin_svd};
use crate::rng::derived_stream;
use crate::stiefel::{exp_map, normalize_and_scale, random_tangent, MetricParams, StiefelPoint};
use crate::C64;

/// Condition number of the truncated `Σ` above which a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Columns are snapshots taken `dt` apart; rows are spatial samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: DMatrix<C64>,
    dt: f64,
}

impl SnapshotMatrix {
    pub fn new(data: DMatrix<C64>, dt: f64) -> Result<Self> {
        if data.ncols() < 3 {
            return Err(Error::Size {
                what: "snapshots",
                found: data.ncols(),
                required: 3,
            });
        }
        if data.nrows() == 0 {
            return Err(Error::Size {
                what: "spatial samples",
                found: 0,
                required: 1,
            });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("snapshot matrix"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Range {
                name: "dt",
                value: dt,
                range: "(0, inf)",
            });
        }
        Ok(SnapshotMatrix { data, dt })
    }

    pub fn from_real(data: &DMatrix<f64>, dt: f64) -> Result<Self> {
        Self::new(data.map(|v| C64::new(v, 0.0)), dt)
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn spatial_len(&self) -> usize {
        self.data.nrows()
    }

    pub fn snapshot_count(&self) -> usize {
        self.data.ncols()
    }

    /// Times `k·dt` of the training snapshots.
    pub fn times(&self) -> Vec<f64> {
        (0..self.snapshot_count()).map(|k| k as f64 * self.dt).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.spatial_len().min(self.snapshot_count() - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmdModel {
    pub modes: DMatrix<C64>,
    /// Discrete-time eigenvalues `μ`.
    pub eigenvalues: Vec<C64>,
    /// Continuous rates `ln(μ)/dt`, principal branch.
    pub omegas: Vec<C64>,
    pub amplitudes: Vec<C64>,
    /// Left factor `U_r` used in the similarity transform.
    pub basis: DMatrix<C64>,
    pub rank: usize,
    pub dt: f64,
}

impl DmdModel {
    /// Column `k` is `Φ diag(exp(ω t_k)) b`.
    pub fn forecast(&self, times: &[f64]) -> DMatrix<C64> {
        let mut out = DMatrix::<C64>::zeros(self.modes.nrows(), times.len());
        for (k, &t) in times.iter().enumerate() {
            let weights = DVector::from_iterator(
                self.rank,
                self.omegas
                    .iter()
                    .zip(&self.amplitudes)
                    .map(|(w, b)| (w * t).exp() * b),
            );
            out.column_mut(k).copy_from(&(&self.modes * weights));
        }
        out
    }
}

struct Truncation {
    x2: DMatrix<C64>,
    first: DVector<C64>,
    u: DMatrix<C64>,
    sigma: Vec<f64>,
    v: DMatrix<C64>,
}

fn truncate(snaps: &SnapshotMatrix, rank: usize) -> Result<Truncation> {
    if rank == 0 || rank > snaps.max_rank() {
        return Err(Error::Range {
            name: "rank",
            value: rank as f64,
            range: "[1, min(M, N - 1)]",
        });
    }
    let n = snaps.snapshot_count();
    let x1 = snaps.data.columns(0, n - 1).into_owned();
    let x2 = snaps.data.columns(1, n - 1).into_owned();
    let svd = thin_svd(&x1)?;
    let sigma = svd.singular_values[..rank].to_vec();
    let condition = sigma[0] / sigma[rank - 1];
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    Ok(Truncation {
        x2,
        first: snaps.data.column(0).into_owned(),
        u: svd.u.columns(0, rank).into_owned(),
        sigma,
        v: svd.v.columns(0, rank).into_owned(),
    })
}

fn assemble(tr: &Truncation, u: DMatrix<C64>, v: &DMatrix<C64>, dt: f64) -> Result<DmdModel> {
    let rank = tr.sigma.len();
    let mut projected = &tr.x2 * v;
    for (j, s) in tr.sigma.iter().enumerate() {
        projected.column_mut(j).unscale_mut(*s);
    }
    let s_tilde = u.adjoint() * &projected;
    let (mu, w) = eig_complex(&s_tilde)?;
    let omegas: Vec<C64> = mu.iter().map(|m| m.ln() / dt).collect();

    // order modes by frequency so output does not depend on Schur ordering
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by(|&a, &b| {
        omegas[a]
            .im
            .total_cmp(&omegas[b].im)
            .then(omegas[a].re.total_cmp(&omegas[b].re))
    });
    let w = DMatrix::from_fn(rank, rank, |i, j| w[(i, order[j])]);
    let modes = projected * w;
    let amplitudes = least_squares(&modes, &tr.first)?;
    Ok(DmdModel {
        modes,
        eigenvalues: order.iter().map(|&j| mu[j]).collect(),
        omegas: order.iter().map(|&j| omegas[j]).collect(),
        amplitudes: amplitudes.iter().copied().collect(),
        basis: u,
        rank,
        dt,
    })
}

/// Exact DMD: `S̃ = U_r* X₂ V_r Σ_r⁻¹ = W diag(μ) W⁻¹`, modes `X₂ V_r Σ_r⁻¹ W`,
/// amplitudes fitted to the first snapshot.
pub fn fit_dmd(snaps: &SnapshotMatrix, rank: usize) -> Result<DmdModel> {
    let tr = truncate(snaps, rank)?;
    assemble(&tr, tr.u.clone(), &tr.v, snaps.dt)
}

/// [`fit_dmd`] with `U_r` and then `V_r` replaced by exponential-map
/// perturbations of metric length `beta · 0.89π` before the similarity
/// transform.
pub fn perturbed_fit<R: Rng + ?Sized>(
    snaps: &SnapshotMatrix,
    rank: usize,
    beta: f64,
    metric: MetricParams,
    rng: &mut R,
) -> Result<DmdModel> {
    perturb_truncated(&truncate(snaps, rank)?, beta, metric, snaps.dt, rng)
}

fn perturb_truncated<R: Rng + ?Sized>(
    tr: &Truncation,
    beta: f64,
    metric: MetricParams,
    dt: f64,
    rng: &mut R,
) -> Result<DmdModel> {
    let mut moved = [&tr.u, &tr.v].map(|f| StiefelPoint::new_unchecked(f.clone()));
    for point in moved.iter_mut() {
        let raw = random_tangent(point, rng);
        let step = normalize_and_scale(point, &raw, beta, metric)?;
        *point = exp_map(point, &step, metric)?;
    }
    let [u, v] = moved;
    assemble(tr, u.into_matrix(), v.matrix(), dt)
}

/// Forecasts of `count` perturbed fits on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DmdEnsemble {
    pub members: Vec<DMatrix<C64>>,
    pub times: Vec<f64>,
}

impl DmdEnsemble {
    /// Real parts over space at time index `k`, one curve per member.
    pub fn frame(&self, k: usize) -> Result<FunctionalEnsemble> {
        self.collect(|m| m.column(k).iter().map(|z| z.re).collect())
    }

    /// Real parts over time at spatial index `i`, one curve per member.
    pub fn trace(&self, i: usize) -> Result<FunctionalEnsemble> {
        self.collect(|m| m.row(i).iter().map(|z| z.re).collect())
    }

    fn collect(&self, f: impl Fn(&DMatrix<C64>) -> Vec<f64>) -> Result<FunctionalEnsemble> {
        let rows: Vec<Vec<f64>> = self.members.iter().map(f).collect();
        FunctionalEnsemble::from_rows(&rows)
    }
}

/// Member `k` uses `derived_stream(seed, k)` and the canonical metric.
pub fn ensemble_forecast(
    snaps: &SnapshotMatrix,
    rank: usize,
    beta: f64,
    count: usize,
    times: &[f64],
    seed: u64,
) -> Result<DmdEnsemble> {
    if count == 0 {
        return Err(Error::Size {
            what: "ensemble members",
            found: 0,
            required: 1,
        });
    }
    let tr = truncate(snaps, rank)?;
    let member = |k: usize| {
        let mut rng = derived_stream(seed, k as u64);
        perturb_truncated(&tr, beta, MetricParams::CANONICAL, snaps.dt, &mut rng).map(|m| m.forecast(times))
    };

    #[cfg(feature = "parallel")]
    let members: Result<Vec<DMatrix<C64>>> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(member).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let members: Result<Vec<DMatrix<C64>>> = (0..count).map(member).collect();

    Ok(DmdEnsemble {
        members: members?,
        times: times.to_vec(),
    })
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { end } else { start + step * k as f64 })
                .collect()
        }
    }
}

/// Two mixed spatio-temporal modes:
/// `sech(x + 3) e^{i 2.3 t} + 2 sech(x) tanh(x) e^{i 2.8 t}`.
pub fn spatiotemporal_value(x: f64, t: f64) -> C64 {
    let sech = |v: f64| 1.0 / v.cosh();
    C64::from_polar(sech(x + 3.0), 2.3 * t) + C64::from_polar(2.0 * sech(x) * x.tanh(), 2.8 * t)
}

/// Samples [`spatiotemporal_value`] on a grid; `t_grid` must be uniform.
pub fn synth_spatiotemporal(x_grid: &[f64], t_grid: &[f64]) -> Result<SnapshotMatrix> {
    if x_grid.is_empty() {
        return Err(Error::Size {
            what: "spatial grid",
            found: 0,
            required: 1,
        });
    }
    if t_grid.len() < 3 {
        return Err(Error::Size {
            what: "time grid",
            found: t_grid.len(),
            required: 3,
        });
    }
    let dt = t_grid[1] - t_grid[0];
    let span = (t_grid[t_grid.len() - 1] - t_grid[0]).abs();
    for pair in t_grid.windows(2) {
        if ((pair[1] - pair[0]) - dt).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::Degenerate("time grid is not uniform"));
        }
    }
    let data = DMatrix::from_fn(x_grid.len(), t_grid.len(), |i, k| spatiotemporal_value(x_grid[i], t_grid[k]));
    SnapshotMatrix::new(data, dt)
}

/// The standard benchmark grids: 400 points on `[-10, 10]` and 200 on `[0, 4π]`.
pub fn benchmark_grids() -> (Vec<f64>, Vec<f64>) {
    (linspace(-10.0, 10.0, 400), linspace(0.0, 4.0 * std::f64::consts::PI, 200))
}

pub fn benchmark_snapshots() -> SnapshotMatrix {
    let (x, t) = benchmark_grids();
    synth_spatiotemporal(&x, &t).expect("benchmark grids are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormality_defect;
    use crate::rng::seeded;

    fn small_benchmark() -> SnapshotMatrix {
        synth_spatiotemporal(&linspace(-10.0, 10.0, 60), &linspace(0.0, 4.0 * std::f64::consts::PI, 80)).unwrap()
    }

    #[test]
    fn scalar_values() {
        let sech3 = 1.0 / 3f64.cosh();
        assert!((spatiotemporal_value(0.0, 0.0) - C64::new(sech3, 0.0)).norm() < 1e-15);
        let sech = |v: f64| 1.0 / v.cosh();
        let expected = 1.0 + 2.0 * sech(-3.0) * (-3f64).tanh();
        assert!((spatiotemporal_value(-3.0, 0.0) - C64::new(expected, 0.0)).norm() < 1e-15);
        assert!((expected - 0.802326).abs() < 1e-6);
    }

    #[test]
    fn identity_dynamics_have_unit_eigenvalues() {
        let x = DMatrix::from_fn(6, 10, |i, _| (i as f64 + 1.0).sqrt());
        let model = fit_dmd(&SnapshotMatrix::from_real(&x, 0.1).unwrap(), 1).unwrap();
        assert!((model.eigenvalues[0] - C64::new(1.0, 0.0)).norm() < 1e-10);
        let snaps = SnapshotMatrix::from_real(&x, 0.1).unwrap();
        assert!(matches!(fit_dmd(&snaps, 2), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn recovers_frequencies_and_reconstructs() {
        let snaps = small_benchmark();
        let model = fit_dmd(&snaps, 2).unwrap();
        assert!((model.omegas[0].im - 2.3).abs() < 1e-8);
        assert!((model.omegas[1].im - 2.8).abs() < 1e-8);
        let fit = model.forecast(&snaps.times());
        assert!((fit - snaps.data()).norm() / snaps.data().norm() < 1e-8);
    }

    #[test]
    fn zero_beta_matches_plain_fit() {
        let snaps = small_benchmark();
        let plain = fit_dmd(&snaps, 2).unwrap();
        let perturbed = perturbed_fit(&snaps, 2, 0.0, MetricParams::CANONICAL, &mut seeded(9)).unwrap();
        assert_eq!(plain, perturbed);
    }

    #[test]
    fn perturbed_basis_stays_unitary() {
        let snaps = small_benchmark();
        let model = perturbed_fit(&snaps, 2, 0.2, MetricParams::CANONICAL, &mut seeded(4)).unwrap();
        assert!(orthonormality_defect(&model.basis) < 1e-8);
    }

    #[test]
    fn rank_bounds_are_enforced() {
        let snaps = small_benchmark();
        assert!(fit_dmd(&snaps, 0).is_err());
        assert!(fit_dmd(&snaps, 80).is_err());
        assert!(SnapshotMatrix::new(DMatrix::zeros(3, 2), 1.0).is_err());
        assert!(synth_spatiotemporal(&[0.0], &[0.0, 1.0, 3.0]).is_err());
    }

    #[test]
    fn ensemble_slices_have_member_rows() {
        let snaps = small_benchmark();
        let ens = ensemble_forecast(&snaps, 2, 0.2, 3, &[0.0, 1.0], 11).unwrap();
        assert_eq!(ens.members.len(), 3);
        assert_eq!(ens.frame(1).unwrap().curves().shape(), (3, 60));
        assert_eq!(ens.trace(5).unwrap().curves().shape(), (3, 2));
    }
}
