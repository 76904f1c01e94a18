//! Dense Hermitian eigensolver wrapper with a fixed eigenvector phase convention.

use nalgebra::{DMatrix, Dim, Matrix, RawStorage, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Coefficients whose magnitude is within this relative margin of the largest
/// one count as tied; the smallest index among them carries the phase.
const GAUGE_TIE_TOL: f64 = 1e-9;

pub fn is_hermitian<R, C, S>(m: &Matrix<C64, R, C, S>, tol: f64) -> bool
where
    R: Dim,
    C: Dim,
    S: RawStorage<C64, R, C>,
{
    let (rows, cols) = m.shape();
    if rows != cols {
        return false;
    }
    for i in 0..rows {
        for j in i..cols {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Rotate `v` by a global phase so that its largest-magnitude entry is real
/// and non-negative. Ties go to the smallest index.
pub fn fix_gauge(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - GAUGE_TIE_TOL))
        .expect("max attained");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending; eigenvectors are unit-norm and gauge
/// fixed with [`fix_gauge`].
pub fn hermitian_eigen(h: DMatrix<C64>) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let dim = h.nrows();
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let eig = SymmetricEigen::try_new(h, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::Eigensolver { dim })?;
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigensolver { dim });
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let mut values = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    for k in order {
        values.push(eig.eigenvalues[k]);
        let col = eig.eigenvectors.column(k);
        let norm = col.norm();
        let mut v: Vec<C64> = col.iter().map(|z| z / norm).collect();
        fix_gauge(&mut v);
        vectors.push(v);
    }
    Ok((values, vectors))
}

/// Real symmetric counterpart of [`hermitian_eigen`]; eigenvectors are
/// normalized with their largest-magnitude entry positive.
pub fn symmetric_eigen(h: DMatrix<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let dim = h.nrows();
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let eig = SymmetricEigen::try_new(h, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::Eigensolver { dim })?;
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigensolver { dim });
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            let norm = col.norm();
            col.iter().map(|x| x / norm).collect()
        })
        .collect();
    Ok((values, vectors))
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_makes_pivot_real_positive() {
        let mut v = vec![C64::new(0.0, 0.1), C64::new(0.0, -0.9), C64::new(0.3, 0.0)];
        fix_gauge(&mut v);
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
        assert!((v[1].re - 0.9).abs() < 1e-15);
    }

    #[test]
    fn gauge_tie_uses_smallest_index() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![C64::new(0.0, -s), C64::new(0.0, s)];
        fix_gauge(&mut v);
        assert!((v[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((v[1] - C64::new(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let h = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, -1.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.3, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(h.clone()).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner(a, b).norm() - expect).abs() < 1e-12);
            }
            let va = nalgebra::DVector::from_column_slice(a);
            let resid = &h * &va - va.clone() * C64::from(vals[i]);
            assert!(resid.norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut h = DMatrix::<C64>::identity(2, 2);
        h[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(hermitian_eigen(h).is_err());
    }
}
