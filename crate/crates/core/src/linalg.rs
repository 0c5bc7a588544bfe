//! Dense kernels shared by the manifold, augmentation and DMD code.
//!
//! Everything is generic over [`Field`] so the same retraction serves real
//! orthogonal frames and complex unitary frames.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, Schur, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Scalar field of a frame: `f64` or `Complex<f64>`.
pub trait Field: ComplexField<RealField = f64> + Copy {
    const IS_COMPLEX: bool;

    /// One standard-normal draw. Complex draws take independent real and
    /// imaginary parts, real part first.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn is_finite_value(self) -> bool {
        self.real().is_finite() && self.imaginary().is_finite()
    }
}

impl Field for f64 {
    const IS_COMPLEX: bool = false;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Field for Complex<f64> {
    const IS_COMPLEX: bool = true;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im)
    }
}

/// Matrix of i.i.d. standard-normal entries, filled column by column.
pub fn random_normal<T: Field, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<T> {
    let mut out = DMatrix::<T>::zeros(rows, cols);
    for value in out.iter_mut() {
        *value = T::standard_normal(rng);
    }
    out
}

/// `Re tr(x* y)`.
pub fn frobenius_inner<T: Field>(x: &DMatrix<T>, y: &DMatrix<T>) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a.conjugate() * *b).real())
        .sum()
}

/// `‖U*U − I‖_F`.
pub fn orthonormality_defect<T: Field>(u: &DMatrix<T>) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - DMatrix::<T>::identity(n, n)).norm()
}

pub fn all_finite<T: Field>(m: &DMatrix<T>) -> bool {
    m.iter().all(|x| x.is_finite_value())
}

/// Largest absolute column sum.
pub fn one_norm<T: Field>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

// Degree-13 Padé numerator coefficients and the matching backward-error
// threshold for scaling and squaring.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn matrix_exp<T: Field>(s: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !s.is_square() {
        let k = s.nrows();
        return Err(Error::dims((k, k), s.shape()));
    }
    if !all_finite(s) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let n = s.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(s);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = s * T::from_real(0.5f64.powi(squarings));
    let id = DMatrix::<T>::identity(n, n);
    let c = |i: usize| T::from_real(PADE13[i]);

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let odd_tail = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9));
    let u = &a * (odd_tail + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1));
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8))
        + &a6 * c(6)
        + &a4 * c(4)
        + &a2 * c(2)
        + &id * c(0);

    let numerator = &v + &u;
    let denominator = v - u;
    let mut r = denominator
        .lu()
        .solve(&numerator)
        .ok_or(Error::NonFinite("matrix exponential Padé solve"))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !all_finite(&r) {
        return Err(Error::NonFinite("matrix exponential output"));
    }
    Ok(r)
}

/// Singular value decomposition `M = U diag(σ) V*` with σ sorted descending.
///
/// [`thin_svd`] returns `k = min(m, n)` columns in `u` and `v`; [`full_svd`]
/// completes both to square unitary matrices.
#[derive(Debug, Clone)]
pub struct Svd<T: Field> {
    pub u: DMatrix<T>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<T>,
}

impl<T: Field> Svd<T> {
    /// `Σ_i σ_i u_i v_i*` over the stored singular values.
    pub fn reconstruct(&self) -> DMatrix<T> {
        reconstruct(&self.u, &self.singular_values, &self.v)
    }
}

pub fn thin_svd<T: Field>(m: &DMatrix<T>) -> Result<Svd<T>> {
    if m.is_empty() {
        return Err(Error::Degenerate("empty matrix"));
    }
    if !all_finite(m) {
        return Err(Error::NonFinite("SVD input"));
    }
    // nalgebra's bidiagonalization can return wrong factors for some wide
    // rank-deficient inputs; factor the tall adjoint instead
    if m.nrows() < m.ncols() {
        let t = thin_svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0).ok_or(Error::Svd)?;
    let out = Svd {
        u: svd.u.ok_or(Error::Svd)?,
        singular_values: svd.singular_values.iter().copied().collect(),
        v: svd.v_t.ok_or(Error::Svd)?.adjoint(),
    };
    let residual = (out.reconstruct() - m).norm();
    if !(residual <= 1e-10 * m.norm().max(f64::MIN_POSITIVE)) {
        return Err(Error::Svd);
    }
    Ok(out)
}

pub fn full_svd<T: Field>(m: &DMatrix<T>) -> Result<Svd<T>> {
    let thin = thin_svd(m)?;
    Ok(Svd {
        u: orthonormal_completion(&thin.u),
        singular_values: thin.singular_values,
        v: orthonormal_completion(&thin.v),
    })
}

/// Extends an `m×k` orthonormal frame to an `m×m` unitary matrix whose first
/// `k` columns are the frame itself.
///
/// The trailing columns are `H₀⋯H_{k−1} e_i`, `i ≥ k`, for the Householder
/// reflectors that triangularize the frame, so the cost is `O(k m²)`.
pub fn orthonormal_completion<T: Field>(frame: &DMatrix<T>) -> DMatrix<T> {
    let (m, k) = frame.shape();
    if k >= m {
        return frame.clone();
    }
    let mut work = frame.clone();
    let mut reflectors: Vec<DVector<T>> = Vec::with_capacity(k);
    for j in 0..k {
        let x = work.view((j, j), (m - j, 1)).column(0).into_owned();
        let norm = x.norm();
        let lead = x[0];
        let phase = if lead.modulus() > 0.0 {
            lead.scale(1.0 / lead.modulus())
        } else {
            T::one()
        };
        let mut v = x;
        v[0] += phase.scale(norm);
        let vv = v.norm_squared();
        if vv > 0.0 {
            let mut block = work.view_mut((j, j), (m - j, k - j));
            let w = block.ad_mul(&v);
            block.ger(T::from_real(-2.0 / vv), &v, &w.conjugate(), T::one());
        }
        reflectors.push(v);
    }
    let mut tail = DMatrix::<T>::zeros(m, m - k);
    for i in 0..m - k {
        tail[(k + i, i)] = T::one();
    }
    for (j, v) in reflectors.iter().enumerate().rev() {
        let vv = v.norm_squared();
        if vv == 0.0 {
            continue;
        }
        let mut block = tail.rows_mut(j, m - j);
        let w = block.ad_mul(v);
        block.ger(T::from_real(-2.0 / vv), v, &w.conjugate(), T::one());
    }
    let mut out = DMatrix::<T>::zeros(m, m);
    out.columns_mut(0, k).copy_from(frame);
    out.columns_mut(k, m - k).copy_from(&tail);
    out
}

/// `Σ_{i<len(σ)} σ_i u_i v_i*`; extra columns of `u`/`v` are ignored.
pub fn reconstruct<T: Field>(u: &DMatrix<T>, sigma: &[f64], v: &DMatrix<T>) -> DMatrix<T> {
    let k = sigma.len();
    let mut scaled = u.columns(0, k).into_owned();
    for (j, s) in sigma.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    scaled * v.columns(0, k).adjoint()
}

/// Eigenvalues and the matching unit-norm eigenvectors as columns.
pub type Eigen = (Vec<Complex<f64>>, DMatrix<Complex<f64>>);

/// Eigendecomposition of a general complex matrix via the complex Schur form
/// and back substitution.
pub fn eig_complex(a: &DMatrix<Complex<f64>>) -> Result<Eigen> {
    if !a.is_square() {
        let k = a.nrows();
        return Err(Error::dims((k, k), a.shape()));
    }
    if !all_finite(a) {
        return Err(Error::NonFinite("eigendecomposition input"));
    }
    let n = a.nrows();
    let (q, t) = Schur::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or(Error::Eigen)?
        .unpack();
    let values: Vec<Complex<f64>> = (0..n).map(|i| t[(i, i)]).collect();
    let floor = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);

    let mut y = DMatrix::<Complex<f64>>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = Complex::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex::new(0.0, 0.0);
            for l in j + 1..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            let mut pivot = t[(j, j)] - values[k];
            // repeated eigenvalue: nudge the pivot, the usual LAPACK trevc trick
            if pivot.norm() < floor {
                pivot = Complex::new(floor, 0.0);
            }
            y[(j, k)] = -acc / pivot;
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    Ok((values, vectors))
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares<T: Field>(a: &DMatrix<T>, b: &DVector<T>) -> Result<DVector<T>> {
    let svd = SVD::try_new(a.clone(), true, true, f64::EPSILON, 0).ok_or(Error::Svd)?;
    let cutoff = svd.singular_values.max() * 1e-13;
    svd.solve(b, cutoff).map_err(|_| Error::Svd)
}
