//! SVD-based rank, null-space and least-squares helpers.
//!
//! Tall matrices are reduced by a QR factorization first, so the SVD only
//! ever runs on a square `cols x cols` factor.

use nalgebra::{ComplexField, DMatrix, DVector};

/// Singular values (descending) and the rank decision derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Smallest kept over largest discarded singular value (infinite when
    /// nothing nonzero is discarded).
    pub gap: f64,
}

impl Spectrum {
    pub fn nullity(&self) -> usize {
        self.singular_values.len() - self.rank
    }

    pub fn smallest_kept(&self) -> f64 {
        if self.rank == 0 {
            0.0
        } else {
            self.singular_values[self.rank - 1]
        }
    }

    pub fn largest_discarded(&self) -> f64 {
        self.singular_values.get(self.rank).copied().unwrap_or(0.0)
    }
}

fn spectrum(sorted: Vec<f64>, rel_tol: f64) -> Spectrum {
    let smax = sorted.first().copied().unwrap_or(0.0);
    let rank = sorted.iter().filter(|&&s| s > rel_tol * smax).count();
    let gap = match (rank, sorted.get(rank)) {
        (0, _) => f64::INFINITY,
        (_, Some(&next)) if next > 0.0 => sorted[rank - 1] / next,
        _ => f64::INFINITY,
    };
    Spectrum {
        singular_values: sorted,
        rank,
        gap,
    }
}

/// Full decomposition data of `a`: `(sigma desc, left factor columns, V)`.
struct Decomposition<T: ComplexField<RealField = f64>> {
    sigma: Vec<f64>,
    u: DMatrix<T>,
    v: DMatrix<T>,
}

fn decompose<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Decomposition<T> {
    let (rows, cols) = a.shape();
    let padded;
    let a = if rows < cols {
        padded = a.clone().resize_vertically(cols, T::zero());
        &padded
    } else {
        a
    };
    let qr = a.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let svd = r.svd(true, true);
    let u_r = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_full = &q * &u_r;
    let u = DMatrix::from_fn(u_full.nrows(), order.len(), |i, k| u_full[(i, order[k])].clone());
    let v = DMatrix::from_fn(cols, order.len(), |i, k| v_t[(order[k], i)].clone().conjugate());
    let u = if rows < cols { u.rows(0, rows).into_owned() } else { u };
    Decomposition { sigma, u, v }
}

/// Singular values of `a` with a rank decision at `rel_tol * sigma_max`.
pub fn spectrum_of<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, rel_tol: f64) -> Spectrum {
    let (rows, cols) = a.shape();
    let padded;
    let a = if rows < cols {
        padded = a.clone().resize_vertically(cols, T::zero());
        &padded
    } else {
        a
    };
    let r = a.clone().qr().r();
    let mut sv: Vec<f64> = r.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    spectrum(sv, rel_tol)
}

/// Null space basis (orthonormal columns) together with the spectrum.
pub fn null_space<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    rel_tol: f64,
) -> (Spectrum, DMatrix<T>) {
    let dec = decompose(a);
    let spec = spectrum(dec.sigma, rel_tol);
    let basis = dec.v.columns(spec.rank, spec.nullity()).into_owned();
    (spec, basis)
}

/// Minimum-norm least-squares solution with singular values below
/// `rel_tol * sigma_max` discarded. Returns the solution and the rank used.
pub fn lstsq_truncated(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> (DVector<f64>, usize) {
    let dec = decompose(a);
    let spec = spectrum(dec.sigma.clone(), rel_tol);
    let mut x = DVector::zeros(a.ncols());
    for k in 0..spec.rank {
        let coef = dec.u.column(k).dot(b) / dec.sigma[k];
        x += dec.v.column(k) * coef;
    }
    (x, spec.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn null_space_of_rank_one() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let (spec, basis) = null_space(&a, 1e-10);
        assert_eq!(spec.rank, 1);
        assert_eq!(basis.ncols(), 1);
        assert!((&a * &basis).norm() < 1e-12);
        assert!(spec.gap > 1e10);
    }

    #[test]
    fn wide_matrix_null_space() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let (spec, basis) = null_space(&a, 1e-10);
        assert_eq!(spec.nullity(), 2);
        assert!((&a * &basis).norm() < 1e-12);
    }

    #[test]
    fn complex_null_space() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one, i, i, -one]);
        let (spec, basis) = null_space(&a, 1e-10);
        assert_eq!(spec.nullity(), 1);
        assert!((&a * &basis).norm() < 1e-12);
    }

    #[test]
    fn truncated_least_squares_is_min_norm() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, 2.0, 2.0]);
        let (x, rank) = lstsq_truncated(&a, &b, 1e-10);
        assert_eq!(rank, 1);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}
