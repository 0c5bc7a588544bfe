//! Riemannian geometry of the Stiefel manifold `St(m, n) = {U : U*U = I_n}`.
//!
//! Real frames give the orthogonal case and complex frames the unitary case;
//! transposes become conjugate transposes and the metric takes the real part
//! of the trace.
//!
//! The metric family is parameterized by `alpha != -1`:
//!
//! ```text
//! <D1, D2>_U = Re tr( D1* (I - (2α+1)/(2(α+1)) U U*) D2 )
//! ```
//!
//! `alpha = 0` is the canonical metric and `alpha = -1/2` the Euclidean one.
//! The matching exponential map is
//!
//! ```text
//! Exp_U(D) = exp_m( -(2α+1)/(α+1) U A U* + D U* - U D* ) U exp_m( α/(α+1) A ),  A = U* D
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, QR};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, frobenius_inner, matrix_exp, orthonormality_defect, random_normal, Field};

/// Global injectivity radius of the Stiefel manifold under the canonical metric.
pub const INJECTIVITY_RADIUS: f64 = 0.89 * PI;

/// Tolerance on `‖U*U − I‖_F` for a valid point.
pub const ORTH_TOL: f64 = 1e-8;

/// Tolerance on `‖D*U + U*D‖_F` for a valid tangent vector.
pub const TANGENT_TOL: f64 = 1e-10;

/// A matrix with orthonormal columns.
///
/// The matrix is shared behind an [`Arc`], so tangent vectors can carry their
/// anchor cheaply.
#[derive(Debug, Clone)]
pub struct StiefelPoint<T: Field> {
    matrix: Arc<DMatrix<T>>,
}

impl<T: Field> StiefelPoint<T> {
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        let (m, n) = matrix.shape();
        if n == 0 || m < n {
            return Err(Error::Dimension {
                expected: "m >= n >= 1".into(),
                found: format!("{m}x{n}"),
            });
        }
        if !all_finite(&matrix) {
            return Err(Error::NonFinite("Stiefel point"));
        }
        let defect = orthonormality_defect(&matrix);
        if defect.is_nan() || defect >= ORTH_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self::new_unchecked(matrix))
    }

    pub(crate) fn new_unchecked(matrix: DMatrix<T>) -> Self {
        StiefelPoint {
            matrix: Arc::new(matrix),
        }
    }

    /// The first `n` columns of the `m×m` identity.
    pub fn identity(m: usize, n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(m, n))
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        Arc::try_unwrap(self.matrix).unwrap_or_else(|shared| (*shared).clone())
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.matrix)
    }

    fn same_anchor(&self, other: &StiefelPoint<T>) -> bool {
        Arc::ptr_eq(&self.matrix, &other.matrix) || *self.matrix == *other.matrix
    }
}

/// A tangent direction `D` at a base point `U`, i.e. `U*D` is skew-Hermitian.
#[derive(Debug, Clone)]
pub struct TangentVector<T: Field> {
    delta: DMatrix<T>,
    base: StiefelPoint<T>,
}

impl<T: Field> TangentVector<T> {
    /// Checks the tangent condition with tolerance `TANGENT_TOL·(1 + ‖D‖_F)`.
    pub fn new(base: &StiefelPoint<T>, delta: DMatrix<T>) -> Result<Self> {
        check_shape(base, &delta)?;
        let tangent = TangentVector {
            delta,
            base: base.clone(),
        };
        let defect = tangent.tangent_defect();
        if !(defect <= TANGENT_TOL * (1.0 + tangent.delta.norm())) {
            return Err(Error::NotTangent { defect });
        }
        Ok(tangent)
    }

    pub fn zero(base: &StiefelPoint<T>) -> Self {
        TangentVector {
            delta: DMatrix::zeros(base.rows(), base.cols()),
            base: base.clone(),
        }
    }

    pub fn delta(&self) -> &DMatrix<T> {
        &self.delta
    }

    pub fn base(&self) -> &StiefelPoint<T> {
        &self.base
    }

    pub fn into_delta(self) -> DMatrix<T> {
        self.delta
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TangentVector {
            delta: &self.delta * T::from_real(factor),
            base: self.base.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.delta.iter().all(|x| *x == T::zero())
    }

    /// `‖D*U + U*D‖_F`.
    pub fn tangent_defect(&self) -> f64 {
        let a = self.base.matrix().adjoint() * &self.delta;
        (&a + a.adjoint()).norm()
    }
}

/// Parameter of the α-metric family; `alpha = -1` is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    alpha: f64,
}

impl MetricParams {
    pub const CANONICAL: MetricParams = MetricParams { alpha: 0.0 };
    pub const EUCLIDEAN: MetricParams = MetricParams { alpha: -0.5 };

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha == -1.0 {
            return Err(Error::Metric(alpha));
        }
        Ok(MetricParams { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    /// Coefficient `c` in the weight `I − c U U*`.
    pub fn weight_coefficient(self) -> f64 {
        (2.0 * self.alpha + 1.0) / (2.0 * (self.alpha + 1.0))
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams::CANONICAL
    }
}

fn check_shape<T: Field>(base: &StiefelPoint<T>, m: &DMatrix<T>) -> Result<()> {
    let expected = (base.rows(), base.cols());
    if m.shape() != expected {
        return Err(Error::dims(expected, m.shape()));
    }
    Ok(())
}

/// Orthogonal projection `X − U sym(U*X)` onto the tangent space at `U`.
pub fn project_to_tangent<T: Field>(base: &StiefelPoint<T>, ambient: &DMatrix<T>) -> Result<TangentVector<T>> {
    check_shape(base, ambient)?;
    let u = base.matrix();
    let a = u.adjoint() * ambient;
    let sym = (&a + a.adjoint()) * T::from_real(0.5);
    Ok(TangentVector {
        delta: ambient - u * sym,
        base: base.clone(),
    })
}

/// Projects a standard-normal ambient matrix onto the tangent space.
pub fn random_tangent<T: Field, R: Rng + ?Sized>(base: &StiefelPoint<T>, rng: &mut R) -> TangentVector<T> {
    let ambient = random_normal::<T, R>(base.rows(), base.cols(), rng);
    project_to_tangent(base, &ambient).expect("ambient sample has the base shape")
}

/// Builds `D = U A + (I − U U*) T` from a skew-Hermitian `A` and a free `T`.
pub fn tangent_from_parts<T: Field>(
    base: &StiefelPoint<T>,
    skew: &DMatrix<T>,
    free: &DMatrix<T>,
) -> Result<TangentVector<T>> {
    let n = base.cols();
    if skew.shape() != (n, n) {
        return Err(Error::dims((n, n), skew.shape()));
    }
    check_shape(base, free)?;
    let defect = (skew + skew.adjoint()).norm();
    if defect > 1e-12 * (1.0 + skew.norm()) {
        return Err(Error::NotTangent { defect });
    }
    let u = base.matrix();
    let delta = u * skew + free - u * (u.adjoint() * free);
    Ok(TangentVector {
        delta,
        base: base.clone(),
    })
}

/// α-metric inner product of two tangents at `base`.
pub fn inner_product<T: Field>(
    base: &StiefelPoint<T>,
    d1: &TangentVector<T>,
    d2: &TangentVector<T>,
    metric: MetricParams,
) -> Result<f64> {
    if !base.same_anchor(&d1.base) || !base.same_anchor(&d2.base) {
        return Err(Error::Anchor);
    }
    let u = base.matrix();
    let a1 = u.adjoint() * &d1.delta;
    let a2 = u.adjoint() * &d2.delta;
    Ok(frobenius_inner(&d1.delta, &d2.delta) - metric.weight_coefficient() * frobenius_inner(&a1, &a2))
}

pub fn tangent_norm<T: Field>(base: &StiefelPoint<T>, d: &TangentVector<T>, metric: MetricParams) -> Result<f64> {
    Ok(inner_product(base, d, d, metric)?.max(0.0).sqrt())
}

/// Rescales `d` to metric length `beta · INJECTIVITY_RADIUS`.
pub fn normalize_and_scale<T: Field>(
    base: &StiefelPoint<T>,
    d: &TangentVector<T>,
    beta: f64,
    metric: MetricParams,
) -> Result<TangentVector<T>> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Range {
            name: "beta",
            value: beta,
            range: "[0, 1]",
        });
    }
    let norm = tangent_norm(base, d, metric)?;
    if beta == 0.0 {
        return Ok(TangentVector::zero(base));
    }
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateTangent);
    }
    Ok(d.scaled(beta * INJECTIVITY_RADIUS / norm))
}

/// Endpoint of the α-geodesic leaving `base` with velocity `d`.
///
/// A zero tangent returns `base` unchanged. Tangents longer than the
/// injectivity radius are accepted with a warning.
pub fn exp_map<T: Field>(base: &StiefelPoint<T>, d: &TangentVector<T>, metric: MetricParams) -> Result<StiefelPoint<T>> {
    let (frame, _) = retract(base, d, metric, None)?;
    Ok(frame)
}

/// Like [`exp_map`], and also carries `complement` (extra columns, typically
/// the rest of an orthonormal basis) along with the same ambient rotation.
///
/// When `[U | complement]` is unitary the result stays unitary, and its first
/// `n` columns are exactly `exp_map(base, d)`.
pub fn exp_map_with_complement<T: Field>(
    base: &StiefelPoint<T>,
    d: &TangentVector<T>,
    metric: MetricParams,
    complement: &DMatrix<T>,
) -> Result<(StiefelPoint<T>, DMatrix<T>)> {
    if complement.nrows() != base.rows() {
        return Err(Error::dims((base.rows(), complement.ncols()), complement.shape()));
    }
    let (frame, rotated) = retract(base, d, metric, Some(complement))?;
    Ok((frame, rotated.expect("complement requested")))
}

/// `exp_map(base, t·d)`.
pub fn geodesic<T: Field>(base: &StiefelPoint<T>, d: &TangentVector<T>, t: f64, metric: MetricParams) -> Result<StiefelPoint<T>> {
    if !(0.0..=1.0).contains(&t) {
        log::warn!("geodesic evaluated at t = {t}, outside [0, 1]");
    }
    exp_map(base, &d.scaled(t), metric)
}

fn retract<T: Field>(
    base: &StiefelPoint<T>,
    d: &TangentVector<T>,
    metric: MetricParams,
    complement: Option<&DMatrix<T>>,
) -> Result<(StiefelPoint<T>, Option<DMatrix<T>>)> {
    check_shape(base, &d.delta)?;
    if !base.same_anchor(&d.base) {
        return Err(Error::Anchor);
    }
    if d.is_zero() {
        return Ok((base.clone(), complement.cloned()));
    }
    if !all_finite(&d.delta) {
        return Err(Error::NonFinite("tangent vector"));
    }
    let norm = tangent_norm(base, d, metric)?;
    if norm > INJECTIVITY_RADIUS * (1.0 + 1e-12) {
        log::warn!(
            "tangent length {norm:.4} exceeds the injectivity radius {INJECTIVITY_RADIUS:.4}"
        );
    }

    let alpha = metric.alpha();
    let u = base.matrix();
    let delta = &d.delta;
    let (m, n) = u.shape();
    let a = u.adjoint() * delta;

    // Orthogonal/unitary group: U*D = A and the formula collapses to U exp(A)
    // for every alpha.
    if m == n {
        let frame = u * matrix_exp(&a)?;
        return Ok((StiefelPoint::new_unchecked(frame), complement.cloned()));
    }

    let c = (2.0 * alpha + 1.0) / (alpha + 1.0);
    let right = if alpha != 0.0 {
        Some(matrix_exp(&(&a * T::from_real(alpha / (alpha + 1.0))))?)
    } else {
        None
    };

    let low_rank = if m >= 2 * n {
        low_rank_rotation(u, delta, &a, 2.0 - c)?
    } else {
        None
    };
    let rotation = match low_rank {
        Some(rotation) => rotation,
        None => {
            let x = u * (&a * T::from_real(-c)) * u.adjoint() + delta * u.adjoint() - u * delta.adjoint();
            Rotation::Dense(matrix_exp(&x)?)
        }
    };

    let mut frame = rotation.apply(u);
    if let Some(right) = right {
        frame *= right;
    }
    let carried = complement.map(|y| rotation.apply(y));
    Ok((StiefelPoint::new_unchecked(frame), carried))
}

enum Rotation<T: Field> {
    Dense(DMatrix<T>),
    /// `I + W (E − I) W*` with `W = [U Q]` orthonormal, `m×2n`.
    LowRank { frame: DMatrix<T>, update: DMatrix<T> },
}

impl<T: Field> Rotation<T> {
    fn apply(&self, y: &DMatrix<T>) -> DMatrix<T> {
        match self {
            Rotation::Dense(q) => q * y,
            Rotation::LowRank { frame, update } => y + frame * (update * (frame.adjoint() * y)),
        }
    }
}

/// Writes `D = U A + Q R` with `Q ⟂ U` and reduces the `m×m` exponential to a
/// `2n×2n` one. Returns `None` when the QR factor is not orthogonal to `U`
/// (rank-deficient normal component), in which case the dense form is used.
fn low_rank_rotation<T: Field>(
    u: &DMatrix<T>,
    delta: &DMatrix<T>,
    a: &DMatrix<T>,
    skew_weight: f64,
) -> Result<Option<Rotation<T>>> {
    let (m, n) = u.shape();
    let normal = delta - u * a;
    let qr = QR::new(normal);
    let q = qr.q();
    let r = qr.r();
    if (u.adjoint() * &q).norm() > 1e-12 {
        return Ok(None);
    }
    let mut frame = DMatrix::<T>::zeros(m, 2 * n);
    frame.columns_mut(0, n).copy_from(u);
    frame.columns_mut(n, n).copy_from(&q);

    let mut generator = DMatrix::<T>::zeros(2 * n, 2 * n);
    generator
        .view_mut((0, 0), (n, n))
        .copy_from(&(a * T::from_real(skew_weight)));
    generator.view_mut((0, n), (n, n)).copy_from(&(-r.adjoint()));
    generator.view_mut((n, 0), (n, n)).copy_from(&r);
    let update = matrix_exp(&generator)? - DMatrix::<T>::identity(2 * n, 2 * n);
    Ok(Some(Rotation::LowRank { frame, update }))
}
