//! Additive and multiplicative Jordan decompositions.

use super::{AlgebraElement, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::spectral::Spectrum;
use crate::tol::{scale, Tolerances};
use num_complex::Complex64;

/// `A = S + N` with `S = E + H` split by real and imaginary parts of the
/// eigenvalues.
#[derive(Clone, Debug)]
pub struct OperatorJordan {
    pub semisimple: CMat,
    pub elliptic: CMat,
    pub hyperbolic: CMat,
    pub nilpotent: CMat,
    pub condition: f64,
}

struct Eigenbasis {
    w: CMat,
    w_inv: CMat,
    centers: Vec<Complex64>,
    condition: f64,
}

fn eigenbasis(a: &CMat, tol: &Tolerances) -> Result<Eigenbasis> {
    let n = a.nrows();
    let spec = Spectrum::analyze(a, tol);
    let bases = spec.generalized_bases(a);
    let mut w = CMat::zeros(n, n);
    let mut centers = Vec::with_capacity(n);
    let mut col = 0;
    for (cl, b) in spec.clusters.iter().zip(&bases) {
        for k in 0..b.ncols() {
            if col < n {
                w.set_column(col, &b.column(k));
            }
            col += 1;
            centers.push(cl.center);
        }
    }
    if col != n {
        return Err(Error::IllConditioned("generalized eigenspaces do not span".into()));
    }
    let condition = linalg::condition_number(&w);
    if !(condition <= tol.condition_limit) {
        return Err(Error::IllConditioned(format!("eigenbasis condition {condition:.2e}")));
    }
    let w_inv = linalg::inverse(&w).ok_or_else(|| Error::IllConditioned("singular eigenbasis".into()))?;
    Ok(Eigenbasis { w, w_inv, centers, condition })
}

fn diag_apply(eb: &Eigenbasis, f: impl Fn(Complex64) -> Complex64) -> CMat {
    let d = CMat::from_diagonal(&CVec::from_iterator(eb.centers.len(), eb.centers.iter().map(|&z| f(z))));
    &eb.w * d * &eb.w_inv
}

pub fn operator_jordan(a: &CMat, tol: &Tolerances) -> Result<OperatorJordan> {
    let eb = eigenbasis(a, tol)?;
    let semisimple = diag_apply(&eb, |z| z);
    let elliptic = diag_apply(&eb, |z| c(0.0, z.im));
    let hyperbolic = diag_apply(&eb, |z| c(z.re, 0.0));
    let nilpotent = a - &semisimple;
    Ok(OperatorJordan { semisimple, elliptic, hyperbolic, nilpotent, condition: eb.condition })
}

/// `x = x_e + x_h + x_n` with pairwise commuting parts.
#[derive(Clone, Debug)]
pub struct JordanParts {
    pub elliptic: AlgebraElement,
    pub hyperbolic: AlgebraElement,
    pub nilpotent: AlgebraElement,
    pub condition: f64,
}

fn project(x: &AlgebraElement, m: &CMat) -> Result<AlgebraElement> {
    let alg = x.algebra();
    let (co, res) = alg.coordinates(m)?;
    if res > 1e-6 * scale(x.norm()) {
        return Err(Error::IllConditioned(format!("Jordan part leaves the algebra ({res:.2e})")));
    }
    Ok(AlgebraElement::from_coords(alg, co))
}

pub fn jordan_decompose(x: &AlgebraElement) -> Result<JordanParts> {
    let alg = x.algebra();
    let oj = operator_jordan(x.matrix(), alg.tol())?;
    Ok(JordanParts {
        elliptic: project(x, &oj.elliptic)?,
        hyperbolic: project(x, &oj.hyperbolic)?,
        nilpotent: project(x, &oj.nilpotent)?,
        condition: oj.condition,
    })
}

/// `g = g_e g_h g_u` with commuting elliptic, positive hyperbolic and
/// unipotent factors, plus logarithms of the latter two.
#[derive(Clone, Debug)]
pub struct MultiplicativeJordan {
    pub elliptic: CMat,
    pub log_hyperbolic: CMat,
    pub log_unipotent: CMat,
}

impl MultiplicativeJordan {
    /// Logarithm of `g_h g_u`.
    pub fn log_noncompact(&self) -> CMat {
        &self.log_hyperbolic + &self.log_unipotent
    }
}

pub fn multiplicative_jordan(g: &GroupElement) -> Result<MultiplicativeJordan> {
    let tol = g.algebra().tol();
    let m = g.matrix();
    let n = m.nrows();
    let eb = eigenbasis(m, tol)?;
    if eb.centers.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::IllConditioned("zero eigenvalue".into()));
    }
    let s_inv = diag_apply(&eb, |z| z.inv());
    let elliptic = diag_apply(&eb, |z| z / z.norm());
    let log_hyperbolic = diag_apply(&eb, |z| c(z.norm().ln(), 0.0));
    let u = s_inv * m;
    let id = CMat::identity(n, n);
    let du = &u - &id;
    let mut log_unipotent = CMat::zeros(n, n);
    let mut pow = du.clone();
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        log_unipotent += &pow * c(sign / k as f64, 0.0);
        pow = &pow * &du;
    }
    let realify = |a: CMat| {
        if g.algebra().family().symplectic_n().is_some() {
            a.map(|z| c(z.re, 0.0))
        } else {
            a
        }
    };
    Ok(MultiplicativeJordan {
        elliptic: realify(elliptic),
        log_hyperbolic: realify(log_hyperbolic),
        log_unipotent: realify(log_unipotent),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Family, LieAlgebra};

    #[test]
    fn nilpotent_sl2_element() {
        let alg = LieAlgebra::new(Family::Sl2);
        let e = AlgebraElement::from_matrix(
            &alg,
            &CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        let parts = jordan_decompose(&e).unwrap();
        assert!(parts.elliptic.norm() < 1e-12);
        assert!(parts.hyperbolic.norm() < 1e-12);
        assert!((parts.nilpotent.matrix() - e.matrix()).norm() < 1e-12);
    }

    #[test]
    fn mixed_element_in_sp4() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        // torus angle in the first block, nilpotent in the second
        let mut m = CMat::zeros(4, 4);
        m[(0, 2)] = c(0.7, 0.0);
        m[(2, 0)] = c(-0.7, 0.0);
        m[(1, 3)] = c(1.0, 0.0);
        let x = AlgebraElement::from_matrix(&alg, &m).unwrap();
        let p = jordan_decompose(&x).unwrap();
        assert!(p.hyperbolic.norm() < 1e-10);
        let mut e = CMat::zeros(4, 4);
        e[(0, 2)] = c(0.7, 0.0);
        e[(2, 0)] = c(-0.7, 0.0);
        assert!((p.elliptic.matrix() - e).norm() < 1e-10);
        assert!(p.elliptic.bracket(&p.nilpotent).unwrap().norm() < 1e-10);
    }

    #[test]
    fn multiplicative_parts_recombine() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let x = AlgebraElement::from_slice(&alg, &[0.4, 1.1, 0.2, -0.3, 0.5, 0.1, -0.2, 0.3, 0.05, 0.4])
            .unwrap();
        let g = x.exp();
        let mj = multiplicative_jordan(&g).unwrap();
        let back = &mj.elliptic * linalg::expm(&mj.log_noncompact());
        assert!((back - g.matrix()).norm() < 1e-9);
    }
}
