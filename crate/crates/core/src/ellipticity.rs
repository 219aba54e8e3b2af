//! Elliptic and stably elliptic elements.
//!
//! An element is elliptic when it is conjugate into the compact torus and
//! stably elliptic when, in addition, the fixed-point algebra of its adjoint
//! action is compactly embedded. The torus representative carries the
//! conjugating matrix as a certificate, and the fixed-point test runs on the
//! exactly diagonal torus element it produces.

use crate::algebra::{symplectic_form, AlgebraElement, Family, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat, RVec};
use crate::spectral::{self, AngleMode, Spectrum};
use crate::tol::{scale, Tolerances};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

/// Semisimplicity of an arbitrary square operator.
pub fn operator_is_semisimple(a: &CMat, tol: &Tolerances) -> bool {
    Spectrum::analyze(a, tol).is_semisimple()
}

pub fn operator_is_semisimple_real(a: &RMat, tol: &Tolerances) -> bool {
    operator_is_semisimple(&linalg::to_complex(a), tol)
}

/// `ad x` is semisimple with purely imaginary spectrum.
pub fn is_compact_element(x: &AlgebraElement) -> bool {
    let tol = x.algebra().tol();
    let ad = linalg::to_complex(&x.ad());
    let spec = Spectrum::analyze(&ad, tol);
    let bound = tol.imaginary_spectrum * spec.scale;
    spec.is_semisimple() && spec.eigenvalues.iter().all(|z| z.re.abs() <= bound)
}

/// Semisimple with spectrum on the unit circle, decided on the defining
/// matrix.
pub fn is_elliptic(g: &GroupElement) -> bool {
    let tol = g.algebra().tol();
    let spec = Spectrum::analyze(g.matrix(), tol);
    let bound = tol.unit_modulus * spec.scale;
    spec.is_semisimple() && spec.eigenvalues.iter().all(|z| (z.norm() - 1.0).abs() <= bound)
}

/// `g = q exp(X(angles)) q^-1` with `X` the torus element of the angles.
#[derive(Clone, Debug)]
pub struct TorusRep {
    pub angles: Vec<f64>,
    pub conjugator: CMat,
    pub residual: f64,
}

impl TorusRep {
    pub fn torus_element(&self, g: &GroupElement) -> Result<AlgebraElement> {
        g.algebra().torus(&self.angles)
    }
}

fn frame_from_krein(n: usize, vectors: &CMat, order: &[usize]) -> CMat {
    let mut q = CMat::zeros(2 * n, 2 * n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..2 * n {
            let w = vectors[(i, src)];
            q[(i, k)] = c(w.re, 0.0);
            q[(i, n + k)] = c(w.im, 0.0);
        }
    }
    q
}

fn sorted_order(angles: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]));
    order
}

/// Angles and conjugator for an operator (group element or compact algebra
/// element), sorted by Weyl group action.
fn torus_data(family: Family, m: &CMat, mode: AngleMode, tol: &Tolerances) -> Result<(Vec<f64>, CMat)> {
    let spec = Spectrum::analyze(m, tol);
    if !spec.is_semisimple() {
        return Err(Error::NotElliptic);
    }
    match family {
        Family::Sl2 | Family::Sp { .. } => {
            let n = family.symplectic_n().unwrap();
            let j = symplectic_form(n);
            let frame = spectral::symplectic_krein_frame(m, &spec, &j, mode, tol)?;
            let order = sorted_order(&frame.angles);
            let q = frame_from_krein(n, &frame.vectors, &order);
            let mut angles: Vec<f64> = order.iter().map(|&k| frame.angles[k]).collect();
            if family == Family::Sl2 {
                angles[0] *= 2.0;
            }
            Ok((angles, q))
        }
        Family::Su { p, q } => {
            let ipq = crate::algebra::indefinite_form(p, q);
            let fr = spectral::hermitian_split_frame(&spec, &ipq, mode, tol)?;
            if fr.positive.len() != p || fr.negative.len() != q {
                return Err(Error::BoundaryUnstable("hermitian signature mismatch".into()));
            }
            let n = p + q;
            let mut pos = fr.positive;
            let mut neg = fr.negative;
            pos.sort_by(|a, b| a.0.total_cmp(&b.0));
            neg.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut qm = CMat::zeros(n, n);
            let mut full = Vec::with_capacity(n);
            for (k, (a, w)) in pos.iter().chain(neg.iter()).enumerate() {
                qm.set_column(k, w);
                full.push(*a);
            }
            let det = qm.determinant();
            let phase = c(0.0, -det.arg()).exp();
            let col = qm.column(0) * phase;
            qm.set_column(0, &col);
            Ok((full[..n - 1].to_vec(), qm))
        }
        Family::Heisenberg => Err(Error::Unsupported("no torus for the Heisenberg algebra".into())),
    }
}

/// Torus representative of an elliptic element. Angles lie in `[0, 2 pi)`
/// (in `[0, 4 pi)` for `sl2`), sorted by the Weyl group.
pub fn torus_representative(g: &GroupElement) -> Result<TorusRep> {
    let alg = g.algebra();
    let tol = alg.tol();
    if !is_elliptic(g) {
        return Err(Error::NotElliptic);
    }
    let (angles, q) = torus_data(alg.family(), g.matrix(), AngleMode::Group, tol)?;
    let x = alg.torus(&angles)?;
    let qi = linalg::inverse(&q).ok_or_else(|| Error::IllConditioned("singular conjugator".into()))?;
    let back = &q * linalg::expm(x.matrix()) * &qi;
    let residual = (back - g.matrix()).norm() / scale(g.matrix().norm());
    let bound = tol.certificate * scale(linalg::condition_number(&q));
    if residual > bound {
        return Err(Error::BoundaryUnstable(format!("certificate residual {residual:.2e}")));
    }
    Ok(TorusRep { angles, conjugator: q, residual })
}

/// Torus form of a compact algebra element: `x = q X(angles) q^-1`.
pub fn torus_form(x: &AlgebraElement) -> Result<TorusRep> {
    let alg = x.algebra();
    let tol = alg.tol();
    let (angles, q) = torus_data(alg.family(), x.matrix(), AngleMode::Algebra, tol)?;
    let t = alg.torus(&angles)?;
    let qi = linalg::inverse(&q).ok_or_else(|| Error::IllConditioned("singular conjugator".into()))?;
    let residual = (&q * t.matrix() * &qi - x.matrix()).norm() / scale(x.norm());
    if residual > tol.certificate * scale(linalg::condition_number(&q)) {
        return Err(Error::BoundaryUnstable(format!("certificate residual {residual:.2e}")));
    }
    Ok(TorusRep { angles, conjugator: q, residual })
}

/// `g = exp(y) k exp(-y)` with `k` in `K` and `y` in `p`, for elliptic `g`.
pub fn polar_split(g: &GroupElement) -> Result<(GroupElement, AlgebraElement)> {
    let alg = g.algebra();
    let rep = torus_representative(g)?;
    let q = &rep.conjugator;
    let y_m = linalg::log_hpd(&(q * q.adjoint())) * c(0.5, 0.0);
    let y = AlgebraElement::from_matrix(alg, &y_m)?;
    let u = linalg::expm(&(-&y_m)) * q;
    let ui = linalg::inverse(&u).ok_or_else(|| Error::IllConditioned("singular unitary factor".into()))?;
    let x = alg.torus(&rep.angles)?;
    let k = &u * linalg::expm(x.matrix()) * ui;
    let (_, yp) = y.cartan_parts()?;
    Ok((GroupElement::from_matrix_unchecked(alg, k), yp))
}

/// Orthonormal coordinate basis (columns) of `Fix(Ad g)`.
pub fn fixed_point_algebra(g: &GroupElement) -> Result<RMat> {
    let ad = g.adjoint()?;
    let d = ad.nrows();
    let m = ad - RMat::identity(d, d);
    let tol = g.algebra().tol();
    Ok(linalg::real_null_space(&m, tol.rank * scale(m.norm())))
}

/// Positive definite form witnessing compact embedding.
#[derive(Clone, Debug)]
pub struct PdCertificate {
    pub form: RMat,
    pub min_eigenvalue: f64,
}

fn sym_basis(d: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for a in 0..d {
        for b in a..d {
            out.push((a, b, if a == b { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 }));
        }
    }
    out
}

fn sym_from(basis: &[(usize, usize, f64)], v: &RVec, d: usize) -> RMat {
    let mut p = RMat::zeros(d, d);
    for (k, &(a, b, w)) in basis.iter().enumerate() {
        p[(a, b)] += w * v[k];
        if a != b {
            p[(b, a)] += w * v[k];
        }
    }
    p
}

/// Search for a positive definite form `P` with `ad(h)^T P + P ad(h) = 0`
/// for every `h` spanning the subalgebra. `h` holds coordinates in columns.
pub fn compactly_embedded_certificate(
    alg: &crate::algebra::Algebra,
    h: &RMat,
) -> Result<Option<PdCertificate>> {
    let tol = alg.tol();
    let d = alg.dim();
    let sb = sym_basis(d);
    let ads: Vec<RMat> = (0..h.ncols()).map(|j| alg.ad_coords(&h.column(j).into_owned())).collect();
    let ad_scale = scale(ads.iter().map(|a| a.norm()).fold(0.0, f64::max));
    let rows = ads.len() * d * d;
    let mut l = RMat::zeros(rows.max(1), sb.len());
    for (k, &(a, b, w)) in sb.iter().enumerate() {
        for (i, ad) in ads.iter().enumerate() {
            // A^T S + S A for S = w (E_ab + E_ba)
            let mut m = RMat::zeros(d, d);
            for r in 0..d {
                m[(r, b)] += w * ad[(a, r)];
                m[(b, r)] += w * ad[(a, r)];
                if a != b {
                    m[(r, a)] += w * ad[(b, r)];
                    m[(a, r)] += w * ad[(b, r)];
                }
            }
            for (t, v) in m.iter().enumerate() {
                l[(i * d * d + t, k)] = *v;
            }
        }
    }
    let null = linalg::real_null_space(&l, tol.rank * ad_scale);
    if null.ncols() == 0 {
        return Ok(None);
    }
    let forms: Vec<RMat> = (0..null.ncols()).map(|j| sym_from(&sb, &null.column(j).into_owned(), d)).collect();
    let eval = |cv: &RVec| -> (f64, RVec, RMat) {
        let mut p = RMat::zeros(d, d);
        for (j, f) in forms.iter().enumerate() {
            p += f * cv[j];
        }
        let (vals, vecs) = linalg::symmetric_eigen(&p);
        (vals[0], vecs.column(0).into_owned(), p)
    };

    // Gram matrix of the basis under the trace form is invariant under the
    // compact part, which makes its projection the natural warm start.
    let mut gram = RMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            gram[(i, j)] = (alg.basis()[i].adjoint() * &alg.basis()[j]).trace().re;
        }
    }
    let warm = RVec::from_iterator(forms.len(), forms.iter().map(|f| f.dot(&gram)));
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut best = f64::NEG_INFINITY;
    let threshold = tol.pd_feasibility;
    for restart in 0..=tol.pd_restarts {
        let mut cv = if restart == 0 {
            warm.clone()
        } else {
            RVec::from_fn(forms.len(), |_, _| rng.sample::<f64, _>(StandardNormal))
        };
        let nrm = cv.norm();
        if nrm == 0.0 {
            continue;
        }
        cv /= nrm;
        for it in 0..400 {
            let (lam, v, p) = eval(&cv);
            best = best.max(lam);
            if lam > threshold {
                return Ok(Some(PdCertificate { form: p, min_eigenvalue: lam }));
            }
            let g = RVec::from_iterator(forms.len(), forms.iter().map(|f| v.dot(&(f * &v))));
            let step = 0.5 / (1.0 + it as f64).sqrt();
            cv += g * step;
            let nrm = cv.norm();
            cv /= nrm;
        }
    }
    let _ = best;
    Ok(None)
}

pub fn is_compactly_embedded(alg: &crate::algebra::Algebra, h: &RMat) -> Result<bool> {
    Ok(compactly_embedded_certificate(alg, h)?.is_some())
}

/// Distance of the noncompact root values to `2 pi Z`.
pub fn wall_margin(angles: &[f64], datum: &crate::structure::RootDatum) -> f64 {
    datum
        .noncompact_values(angles)
        .iter()
        .map(|v| {
            let r = v.rem_euclid(TAU);
            r.min(TAU - r)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Elliptic, and the fixed-point algebra of `Ad g` is compactly embedded.
pub fn is_stably_elliptic(g: &GroupElement) -> Result<bool> {
    let alg = g.algebra();
    if !alg.family().is_hermitian_type() {
        return Err(Error::Unsupported("stable ellipticity needs a hermitian family".into()));
    }
    if !is_elliptic(g) {
        return Ok(false);
    }
    let fixed = match torus_representative(g) {
        Ok(rep) => {
            let t = alg.torus(&rep.angles)?.exp();
            fixed_point_algebra(&t)?
        }
        Err(Error::BoundaryUnstable(_)) => fixed_point_algebra(g)?,
        Err(e) => return Err(e),
    };
    is_compactly_embedded(alg, &fixed)
}

/// Spectral data of the flow `exp(t ad x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowDiagnostic {
    pub spectrum_imaginary: bool,
    pub nilpotent_into_center: bool,
}

pub fn flow_orbit_diagnostic(x: &AlgebraElement) -> Result<FlowDiagnostic> {
    let alg = x.algebra();
    let tol = alg.tol();
    let ad = linalg::to_complex(&x.ad());
    let spec = Spectrum::analyze(&ad, tol);
    let bound = tol.imaginary_spectrum * spec.scale;
    let spectrum_imaginary = spec.eigenvalues.iter().all(|z| z.re.abs() <= bound);
    let oj = crate::algebra::jordan::operator_jordan(&ad, tol)?;
    let d = alg.dim();
    // centre: common kernel of all ad b_i
    let mut stacked = RMat::zeros(d * d, d);
    for i in 0..d {
        let adb = alg.ad_coords(&AlgebraElement::basis_element(alg, i).coords().clone());
        stacked.view_mut((i * d, 0), (d, d)).copy_from(&adb);
    }
    let center = linalg::real_null_space(&stacked, tol.rank * scale(stacked.norm()));
    let n = linalg::real_part(&oj.nilpotent);
    let proj = if center.ncols() == 0 { RMat::zeros(d, d) } else { &center * center.transpose() };
    let resid = (&n - &proj * &n).norm();
    Ok(FlowDiagnostic {
        spectrum_imaginary,
        nilpotent_into_center: resid <= tol.rank.sqrt() * scale(ad.norm()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;

    #[test]
    fn strongly_conjugated_compact_element() {
        // eigenvalues of ad at 0, +-0.108i, +-0.216i on a far from normal basis
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let rows = [
            [-0.35185426602377756, 1.3356409459244345, -0.8196067832295495, -0.45983049003886894],
            [-0.1991243267936329, 0.7485068539451316, -0.45983049003886894, -0.2592614140007501],
            [0.1533646998125348, -0.5722580225734761, 0.35185426602377756, 0.1991243267936329],
            [-0.5722580225734761, 2.1771258604671844, -1.3356409459244345, -0.7485068539451316],
        ];
        let m = CMat::from_fn(4, 4, |i, j| linalg::c(rows[i][j], 0.0));
        let x = AlgebraElement::from_matrix(&alg, &m).unwrap();
        assert!(is_compact_element(&x));
    }

    #[test]
    fn sl2_nilpotent_is_not_compact() {
        let alg = LieAlgebra::new(Family::Sl2);
        let e = AlgebraElement::from_slice(&alg, &[1.0, 0.0, 1.0]).unwrap();
        assert!(!is_compact_element(&e));
        let z = AlgebraElement::basis_element(&alg, 0);
        assert!(is_compact_element(&z));
    }

    #[test]
    fn torus_rep_recovers_sp4_angles() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let g = alg.torus(&[2.0, 0.4]).unwrap().exp();
        let rep = torus_representative(&g).unwrap();
        assert!((rep.angles[0] - 0.4).abs() < 1e-10);
        assert!((rep.angles[1] - 2.0).abs() < 1e-10);
        let q = &rep.conjugator;
        let j = symplectic_form(2);
        assert!((q.transpose() * &j * q - j).norm() < 1e-10);
    }

    #[test]
    fn torus_rep_recovers_sl2_angle_beyond_2pi() {
        let alg = LieAlgebra::new(Family::Sl2);
        for &c0 in &[0.3, 2.0, 6.0, 7.5, 12.0] {
            let g = alg.torus(&[c0]).unwrap().exp();
            let rep = torus_representative(&g).unwrap();
            assert!((rep.angles[0] - c0).abs() < 1e-10, "{c0} -> {}", rep.angles[0]);
        }
    }

    #[test]
    fn su_torus_rep() {
        let alg = LieAlgebra::new(Family::Su { p: 2, q: 1 });
        let g = alg.torus(&[0.5, 1.7]).unwrap().exp();
        let rep = torus_representative(&g).unwrap();
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn heisenberg_diagnostic() {
        let alg = LieAlgebra::new(Family::Heisenberg);
        let p = AlgebraElement::basis_element(&alg, 0);
        let d = flow_orbit_diagnostic(&p).unwrap();
        assert!(d.spectrum_imaginary && d.nilpotent_into_center);
        assert!(!is_compact_element(&p));
    }

    #[test]
    fn minus_identity_is_elliptic_but_not_stable() {
        let alg = LieAlgebra::new(Family::Sl2);
        let g = alg.torus(&[TAU]).unwrap().exp();
        assert!(is_elliptic(&g));
        assert!(!is_stably_elliptic(&g).unwrap());
        let g = alg.torus(&[1.0]).unwrap().exp();
        assert!(is_stably_elliptic(&g).unwrap());
    }
}
