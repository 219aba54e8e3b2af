//! Dense linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<Complex64>;
pub type RVec = DVector<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
}

/// Matrix exponential (Pade scaling and squaring).
pub fn expm(a: &CMat) -> CMat {
    a.clone().exp()
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    a.clone().try_inverse()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    let (_, t) = Schur::new(a.clone()).unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Singular value decomposition with descending singular values and a full
/// right factor (`v` is `ncols x ncols`).
pub struct FullSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn svd_full(a: &CMat) -> FullSvd {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (mut w, mut v) = jacobi_columns(padded);
    let rows = w.nrows();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    w = CMat::from_fn(rows, n, |r, c| w[(r, order[c])]);
    v = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let floor = s.first().copied().unwrap_or(0.0) * 1e-12;
    let mut u = CMat::zeros(rows, n);
    let mut filled = 0;
    for j in 0..n {
        if s[j] > floor {
            u.set_column(j, &(w.column(j) / c(s[j], 0.0)));
            filled = j + 1;
        } else {
            break;
        }
    }
    // Complete the left factor for vanishing singular values.
    let mut e = 0;
    while filled < n && e < rows {
        let mut col = DVector::<Complex64>::zeros(rows);
        col[e] = c(1.0, 0.0);
        for _ in 0..2 {
            for k in 0..filled {
                let proj = u.column(k).dotc(&col);
                col -= u.column(k) * proj;
            }
        }
        let nrm = col.norm();
        if nrm > 1e-8 {
            u.set_column(filled, &(col / c(nrm, 0.0)));
            filled += 1;
        }
        e += 1;
    }
    let u = u.rows(0, m).into_owned();
    FullSvd { u, s, v }
}

/// One-sided Jacobi orthogonalisation of the columns of `a`. Returns `(a v, v)`
/// with `v` unitary and the columns of `a v` mutually orthogonal.
///
/// The complex SVD in nalgebra loses accuracy on nearly real inputs with
/// clustered singular values, which is the common case for products of
/// spectral factors, so the complex path is done here.
fn jacobi_columns(mut w: CMat) -> (CMat, CMat) {
    let n = w.ncols();
    let mut v = identity(n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut w, &mut v] {
                    for r in 0..mat.nrows() {
                        let xp = mat[(r, p)];
                        let xq = mat[(r, q)] * phase;
                        mat[(r, p)] = xp * cs - xq * sn;
                        mat[(r, q)] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is at most `tol`.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return identity(n);
    }
    let FullSvd { s, v, .. } = svd_full(a);
    let cols: Vec<usize> = (0..n).filter(|&i| i >= s.len() || s[i] <= tol).collect();
    CMat::from_fn(n, cols.len(), |r, c| v[(r, cols[c])])
}

/// Orthonormal basis of the leading `k`-dimensional left singular subspace.
pub fn dominant_range(a: &CMat, k: usize) -> (CMat, Vec<f64>) {
    let FullSvd { u, s, .. } = svd_full(a);
    (u.columns(0, k).into_owned(), s)
}

pub fn real_null_space(a: &RMat, tol: f64) -> RMat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return RMat::identity(n, n);
    }
    let padded = if a.nrows() < n {
        let mut p = RMat::zeros(n, n);
        p.view_mut((0, 0), a.shape()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("v_t requested");
    let cols: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= tol).collect();
    RMat::from_fn(n, cols.len(), |r, c| vt[(cols[c], r)])
}

/// Moore-Penrose pseudo-inverse of a full column rank real matrix.
pub fn pseudo_inverse(a: &RMat) -> RMat {
    let svd = SVD::new(a.clone(), true, true);
    svd.pseudo_inverse(1e-14).expect("pseudo inverse")
}

pub fn condition_number(a: &CMat) -> f64 {
    let s = svd_full(a).s;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn symmetric_eigen(s: &RMat) -> (Vec<f64>, RMat) {
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = s.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Logarithm of a Hermitian positive definite matrix.
pub fn log_hpd(h: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(l.max(f64::MIN_POSITIVE).ln(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Sine of the smallest principal angle between two subspaces given by
/// orthonormal columns.
pub fn min_principal_sine(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() == 0 || b.ncols() == 0 {
        return 1.0;
    }
    let m = a.adjoint() * b;
    let cos = svd_full(&m)
        .s
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .min(1.0);
    (1.0 - cos * cos).max(0.0).sqrt()
}

/// Orthonormal real basis of the span of the real and imaginary parts of the
/// columns of `e`, truncated to the `k` dominant directions.
pub fn real_span(e: &CMat, k: usize) -> RMat {
    let n = e.nrows();
    let mut stacked = RMat::zeros(n, 2 * e.ncols());
    for j in 0..e.ncols() {
        for i in 0..n {
            stacked[(i, 2 * j)] = e[(i, j)].re;
            stacked[(i, 2 * j + 1)] = e[(i, j)].im;
        }
    }
    let svd = SVD::new(stacked, true, false);
    let u = svd.u.expect("u requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    RMat::from_fn(n, k, |r, c| u[(r, order[c])])
}

/// Principal branch of the argument mapped to `[0, 2pi)`.
pub fn arg_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Reduce an angle to `[0, 2pi)`.
pub fn mod_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(std::f64::consts::TAU);
    if r >= std::f64::consts::TAU {
        0.0
    } else {
        r
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = mod_2pi(x + std::f64::consts::PI) - std::f64::consts::PI;
    if r <= -std::f64::consts::PI {
        r + std::f64::consts::TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_svd_reconstructs_nearly_real_input() {
        // Nearly real, two clustered singular values: the case that breaks
        // the bidiagonal complex SVD.
        let r = 0.5_f64.sqrt();
        let mut a = CMat::from_fn(4, 4, |i, j| {
            let v = [[r, 0.0, r, 0.0], [0.0, r, 0.0, r], [0.0, 0.0, 0.0, 0.0], [r, r, 0.0, 0.0]];
            c(v[i][j], 1e-16 * (i as f64 - j as f64))
        });
        a[(2, 3)] = c(1e-9, 0.0);
        let FullSvd { u, s, v } = svd_full(&a);
        let back = &u * CMat::from_diagonal(&DVector::from_iterator(4, s.iter().map(|&x| c(x, 0.0)))) * v.adjoint();
        assert!((back - &a).norm() < 1e-13);
        assert!((u.adjoint() * &u - identity(4)).norm() < 1e-12);
        assert!((v.adjoint() * &v - identity(4)).norm() < 1e-12);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = CMat::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let ns = null_space(&a, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((a * ns).norm() < 1e-12);
    }

    #[test]
    fn schur_eigenvalues_of_rotation() {
        let t: f64 = 0.7;
        let r = CMat::from_row_slice(
            2,
            2,
            &[c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0)],
        );
        let mut ev = eigenvalues(&r);
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(t.cos(), -t.sin())).norm() < 1e-14);
        assert!((ev[1] - c(t.cos(), t.sin())).norm() < 1e-14);
    }

    #[test]
    fn schur_handles_nilpotent_block() {
        let mut n = CMat::zeros(4, 4);
        n[(0, 1)] = c(1.0, 0.0);
        n[(1, 2)] = c(1.0, 0.0);
        n[(2, 3)] = c(1.0, 0.0);
        for z in eigenvalues(&n) {
            assert!(z.norm() < 1e-3);
        }
    }

    #[test]
    fn hpd_log_inverts_exp() {
        let h = CMat::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(-0.4, 0.0)]);
        let back = log_hpd(&expm(&h));
        assert!((back - h).norm() < 1e-12);
    }

    #[test]
    fn angle_reductions() {
        assert!((wrap_pi(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!(mod_2pi(-0.5) > 5.0);
        assert_eq!(mod_2pi(0.0), 0.0);
    }
}
