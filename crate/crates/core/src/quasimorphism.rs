//! The Guichardet-Wigner quasimorphism in the coordinate where
//! `f(exp(t z)) = t`.
//!
//! Closed forms go through the Jordan decomposition and the torus. Values on
//! the universal cover need a path; words `exp(x_1) ... exp(x_k)` carry one.
//! The circle function used for lifting and homogenization is the phase of
//! the Lagrangian frame `g L0`, with `L0` spanned by the last `n` coordinates:
//! orthonormalize `g[:, n..]` by QR with positive diagonal and take
//! `arg det(F_bottom + i F_top)`. On `K` this is the determinant of the
//! unitary block.

use crate::algebra::{AlgebraElement, Family, GroupElement};
use crate::algebra::jordan::{jordan_decompose, multiplicative_jordan};
use crate::cone::CausalCurve;
use crate::ellipticity::{torus_form, torus_representative};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::sample;
use crate::structure::RootDatum;
use crate::tol::scale;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GwMethod {
    ClosedForm,
    Homogenized,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GwValue {
    pub value: f64,
    pub method: GwMethod,
    /// Difference of the estimates at the two largest powers.
    pub error_bound: Option<f64>,
}

impl GwValue {
    fn closed(value: f64) -> GwValue {
        GwValue { value, method: GwMethod::ClosedForm, error_bound: None }
    }
}

/// Mean of the positive noncompact root values at a torus point.
pub fn mean_root_value(datum: &RootDatum, x: &[f64]) -> f64 {
    let v = datum.noncompact_values(x);
    v.iter().sum::<f64>() / v.len() as f64
}

/// `f(exp x)` for the lift of `exp x` along `t -> exp(t x)`.
pub fn f_gw_closed_form(x: &AlgebraElement) -> Result<GwValue> {
    let alg = x.algebra();
    let datum = alg.root_datum()?;
    let parts = jordan_decompose(x)?;
    if parts.elliptic.norm() <= alg.tol().cluster_radius * scale(x.norm()) {
        return Ok(GwValue::closed(0.0));
    }
    let rep = torus_form(&parts.elliptic)?;
    Ok(GwValue::closed(mean_root_value(datum, &rep.angles)))
}

/// Change of `f` under the generator of the kernel of the universal cover,
/// which moves the frame phase by `2 pi`.
pub fn deck_shift(family: Family) -> Result<f64> {
    let n = family
        .symplectic_n()
        .ok_or_else(|| Error::Unsupported(format!("no frame phase for {family}")))?;
    Ok(2.0 / n as f64 * TAU)
}

/// Value of `f` per unit of frame phase.
fn phase_factor(n: usize) -> f64 {
    2.0 / n as f64
}

fn symplectic_n(alg_family: Family) -> Result<usize> {
    alg_family
        .symplectic_n()
        .ok_or_else(|| Error::Unsupported(format!("frame phase needs a symplectic family, got {alg_family}")))
}

/// Orthonormal frame of the column span, QR with positive diagonal.
fn frame(m: &RMat) -> RMat {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..q.ncols() {
        if r[(i, i)] < 0.0 {
            let col = -q.column(i);
            q.set_column(i, &col);
        }
    }
    q
}

fn lagrangian_frame(g: &RMat) -> RMat {
    let n = g.nrows() / 2;
    frame(&g.columns(n, n).into_owned())
}

/// `det(F_bottom + i F_top)`, a unit complex number for a Lagrangian frame.
fn frame_det(q: &RMat) -> num_complex::Complex64 {
    let n = q.ncols();
    let w = CMat::from_fn(n, n, |i, j| c(q[(n + i, j)], q[(i, j)]));
    w.determinant()
}

/// Circle function of a symplectic matrix, in `(-pi, pi]`.
pub fn circle_phase(g: &RMat) -> f64 {
    frame_det(&lagrangian_frame(g)).arg()
}

const MAX_DEPTH: u32 = 40;

/// Frame phase tracker. The frame stays orthonormal, so long products never
/// overflow.
struct Walker {
    q: RMat,
    det: num_complex::Complex64,
    phase: f64,
}

impl Walker {
    fn new(n: usize) -> Walker {
        let mut q = RMat::zeros(2 * n, n);
        for i in 0..n {
            q[(n + i, i)] = 1.0;
        }
        Walker { det: frame_det(&q), q, phase: 0.0 }
    }

    fn try_step(&self, e: &RMat) -> (RMat, num_complex::Complex64, f64) {
        let q = frame(&(e * &self.q));
        let det = frame_det(&q);
        let inc = (det / self.det).arg();
        (q, det, inc)
    }

    /// Apply `exp(x)` on the left, refining until every phase increment is
    /// below `pi / 2`. `e` is `exp(x)` when already known.
    fn advance(&mut self, x: &RMat, e: Option<&RMat>, depth: u32) -> Result<()> {
        let owned;
        let e = match e {
            Some(e) => e,
            None => {
                owned = linalg::real_part(&linalg::expm(&linalg::to_complex(x)));
                &owned
            }
        };
        let (q, det, inc) = self.try_step(e);
        if inc.abs() < FRAC_PI_2 {
            self.q = q;
            self.det = det;
            self.phase += inc;
            return Ok(());
        }
        if depth >= MAX_DEPTH {
            return Err(Error::IllConditioned(format!("frame phase jump {inc:.3} after refinement")));
        }
        let half = x * 0.5;
        self.advance(&half, None, depth + 1)?;
        self.advance(&half, None, depth + 1)
    }
}

/// Exponentials of `x / steps` for each generator, with `steps` growing with
/// the norm.
struct StepTable {
    steps: Vec<(RMat, RMat, usize)>,
}

impl StepTable {
    fn new(word: &[AlgebraElement]) -> StepTable {
        let steps = word
            .iter()
            .rev()
            .map(|x| {
                let m = linalg::real_part(x.matrix());
                let k = (4.0 * m.norm()).ceil().max(1.0) as usize;
                let part = &m / k as f64;
                let e = linalg::real_part(&linalg::expm(&linalg::to_complex(&part)));
                (part, e, k)
            })
            .collect();
        StepTable { steps }
    }

    /// Left multiply by the word, rightmost generator first. The path
    /// `exp(s x_k)`, `exp(s x_(k-1)) exp(x_k)`, ... is homotopic to the word
    /// path through the cube of partial products.
    fn apply(&self, w: &mut Walker) -> Result<()> {
        for (part, e, k) in &self.steps {
            for _ in 0..*k {
                w.advance(part, Some(e), 0)?;
            }
        }
        Ok(())
    }
}

fn word_family(word: &[AlgebraElement]) -> Result<Family> {
    let first = word.first().ok_or_else(|| Error::Invalid("empty word".into()))?;
    let alg = first.algebra();
    if word.iter().any(|x| !x.algebra().is_same(alg)) {
        return Err(Error::DescriptorMismatch);
    }
    Ok(alg.family())
}

/// Product of the exponentials of a word.
pub fn word_product(word: &[AlgebraElement]) -> Result<GroupElement> {
    let first = word.first().ok_or_else(|| Error::Invalid("empty word".into()))?;
    let mut g = GroupElement::identity(first.algebra());
    for x in word {
        g = g.mul(&x.exp())?;
    }
    Ok(g)
}

/// Frame phase of the word product, lifted along the word path.
pub fn word_phase(word: &[AlgebraElement]) -> Result<f64> {
    let n = symplectic_n(word_family(word)?)?;
    let mut w = Walker::new(n);
    StepTable::new(word).apply(&mut w)?;
    Ok(w.phase)
}

pub const HOMOGENIZATION_POWER: usize = 512;

/// `lim phase(g^m) / m` in the `z` coordinate, at `m = 512` with the value at
/// `m = 256` as the error estimate.
pub fn f_gw_homogenized(word: &[AlgebraElement]) -> Result<GwValue> {
    let n = symplectic_n(word_family(word)?)?;
    let table = StepTable::new(word);
    let mut w = Walker::new(n);
    let m = HOMOGENIZATION_POWER;
    let mut half = 0.0;
    for j in 1..=m {
        table.apply(&mut w)?;
        if j == m / 2 {
            half = w.phase / (m / 2) as f64;
        }
    }
    let full = w.phase / m as f64;
    let k = phase_factor(n);
    Ok(GwValue {
        value: k * full,
        method: GwMethod::Homogenized,
        error_bound: Some(k * (full - half).abs()),
    })
}

/// Track the frame phase of `h(s)` for `s` in `[0, 1]`, starting from the
/// lifted phase `phase0` at `s = 0`.
fn track_path(h: &dyn Fn(f64) -> RMat, phase0: f64, pieces: usize) -> Result<f64> {
    fn go(h: &dyn Fn(f64) -> RMat, a: f64, b: f64, da: num_complex::Complex64, depth: u32) -> Result<(f64, num_complex::Complex64)> {
        let db = frame_det(&lagrangian_frame(&h(b)));
        let inc = (db / da).arg();
        if inc.abs() < FRAC_PI_2 {
            return Ok((inc, db));
        }
        if depth >= MAX_DEPTH {
            return Err(Error::IllConditioned("frame phase jump along conjugation path".into()));
        }
        let m = 0.5 * (a + b);
        let (i1, dm) = go(h, a, m, da, depth + 1)?;
        let (i2, db) = go(h, m, b, dm, depth + 1)?;
        Ok((i1 + i2, db))
    }
    let mut phase = phase0;
    let mut d = frame_det(&lagrangian_frame(&h(0.0)));
    for i in 0..pieces {
        let a = i as f64 / pieces as f64;
        let b = (i + 1) as f64 / pieces as f64;
        let (inc, db) = go(h, a, b, d, 0)?;
        phase += inc;
        d = db;
    }
    Ok(phase)
}

fn rexp(m: &RMat) -> RMat {
    linalg::real_part(&linalg::expm(&linalg::to_complex(m)))
}

/// Logarithm in `k` of an orthogonal symplectic matrix, through the unitary
/// block `X + iY` of `[[X, -Y], [Y, X]]`.
fn log_orthosymplectic(u: &RMat) -> RMat {
    let n = u.nrows() / 2;
    let w = CMat::from_fn(n, n, |i, j| c(u[(i, j)], u[(n + i, j)]));
    let (q, t) = nalgebra::Schur::new(w).unpack();
    let d = CMat::from_fn(n, n, |i, j| if i == j { c(0.0, t[(i, i)].arg()) } else { c(0.0, 0.0) });
    let l = &q * d * q.adjoint();
    let mut out = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = l[(i, j)].re;
            out[(n + i, n + j)] = l[(i, j)].re;
            out[(n + i, j)] = l[(i, j)].im;
            out[(i, n + j)] = -l[(i, j)].im;
        }
    }
    out
}

/// Lifted frame phase of an elliptic element reached from the identity by
/// `exp(s X(angles))` followed by conjugating `q_s` from the identity to the
/// torus conjugator.
fn reference_phase(g: &GroupElement, angles: &[f64], q: &RMat) -> Result<f64> {
    let alg = g.algebra();
    let x = linalg::real_part(alg.torus(angles)?.matrix());
    let straight = track_path(&|s| rexp(&(&x * s)), 0.0, 8 + (4.0 * x.norm()).ceil() as usize)?;
    let t = rexp(&x);
    let qc = linalg::to_complex(q);
    let y = linalg::real_part(&(linalg::log_hpd(&(&qc * qc.adjoint())) * c(0.5, 0.0)));
    let u = rexp(&-&y) * q;
    let lu = log_orthosymplectic(&u);
    let rot = track_path(
        &|s| {
            let us = rexp(&(&lu * s));
            &us * &t * us.transpose()
        },
        straight,
        16,
    )?;
    let ut = &u * &t * u.transpose();
    let pieces = 16 + (8.0 * y.norm()).ceil() as usize;
    track_path(&|s| rexp(&(&y * s)) * &ut * rexp(&(&y * -s)), rot, pieces)
}

/// Closed-form value on the universal cover for the lift given by a word.
pub fn f_gw_word_closed_form(word: &[AlgebraElement]) -> Result<GwValue> {
    let family = word_family(word)?;
    let n = symplectic_n(family)?;
    let alg = word[0].algebra();
    let datum = alg.root_datum()?;
    let mut w = Walker::new(n);
    StepTable::new(word).apply(&mut w)?;
    let g = word_product(word)?;
    // walk on to the elliptic part along exp(-s L) g
    let mj = multiplicative_jordan(&g)?;
    let l = linalg::real_part(&mj.log_noncompact());
    let k = (4.0 * l.norm()).ceil().max(1.0) as usize;
    let part = &l * (-1.0 / k as f64);
    let e = rexp(&part);
    for _ in 0..k {
        w.advance(&part, Some(&e), 0)?;
    }
    let ge = GroupElement::from_matrix_unchecked(alg, mj.elliptic.clone());
    let rep = torus_representative(&ge)?;
    let q = linalg::real_part(&rep.conjugator);
    let reference = reference_phase(&ge, &rep.angles, &q)?;
    let turns = (w.phase - reference) / TAU;
    let winding = turns.round();
    if (turns - winding).abs() > 1e-3 {
        return Err(Error::IllConditioned(format!("non-integral winding {turns:.6}")));
    }
    Ok(GwValue::closed(mean_root_value(datum, &rep.angles) + winding * deck_shift(family)?))
}

/// Closed form of an element up to the kernel of the cover: angles of the
/// elliptic part taken in `[0, 2 pi)` (`[0, 4 pi)` for `sl2`).
pub fn f_gw_principal(g: &GroupElement) -> Result<f64> {
    let alg = g.algebra();
    let datum = alg.root_datum()?;
    let angles = match torus_representative(g) {
        Ok(rep) => rep.angles,
        Err(Error::NotElliptic) => {
            let mj = multiplicative_jordan(g)?;
            let ge = GroupElement::from_matrix_unchecked(alg, mj.elliptic);
            torus_representative(&ge)?.angles
        }
        Err(e) => return Err(e),
    };
    Ok(mean_root_value(datum, &angles))
}

/// Closed-form values along a curve, lifted by continuity from the value at
/// the first sample. Steps are subdivided until consecutive values are within
/// a quarter of the deck shift.
pub fn f_gw_along_curve(curve: &CausalCurve) -> Result<Vec<f64>> {
    let alg = curve.algebra();
    let deck = deck_shift(alg.family())?;
    let start = match &curve.start_log {
        Some(x) => f_gw_closed_form(x)?.value,
        None => f_gw_principal(&curve.samples[0])?,
    };
    let nearest = |g: &GroupElement, prev: f64| -> Result<f64> {
        let base = f_gw_principal(g)?;
        Ok(base + ((prev - base) / deck).round() * deck)
    };
    let mut out = vec![start];
    for i in 0..curve.len() - 1 {
        let prev = out[i];
        let dt = curve.times[i + 1] - curve.times[i];
        let g0 = &curve.samples[i];
        let v = &curve.velocities[i];
        let mut pieces = 1usize;
        let value = loop {
            let mut cur = prev;
            let mut ok = true;
            for k in 1..=pieces {
                let g = if k == pieces {
                    curve.samples[i + 1].clone()
                } else {
                    g0.mul(&v.scale(dt * k as f64 / pieces as f64).exp())?
                };
                let next = nearest(&g, cur)?;
                if (next - cur).abs() > deck / 4.0 {
                    ok = false;
                    break;
                }
                cur = next;
            }
            if ok {
                break cur;
            }
            pieces *= 2;
            if pieces > 1 << 12 {
                return Err(Error::IllConditioned(format!("closed form jumps at step {i}")));
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Closed-form values along the curve never decrease by more than `1e-9`.
pub fn f_gw_monotone_check(curve: &CausalCurve) -> Result<bool> {
    if curve.algebra().family().symplectic_n().is_none() {
        return Err(Error::Unsupported("monotonicity check needs sl2 or sp".into()));
    }
    let v = f_gw_along_curve(curve)?;
    Ok(v.windows(2).all(|w| w[1] - w[0] >= -1e-9))
}

/// Largest `|f(gh) - f(g) - f(h)|` over random pairs `g = exp(x)`,
/// `h = exp(y)` with gaussian coordinates of size `s`.
pub fn quasimorphism_defect<R: Rng + ?Sized>(
    alg: &crate::algebra::Algebra,
    rng: &mut R,
    pairs: usize,
    s: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < pairs {
        let x = sample::gaussian(alg, rng, s);
        let y = sample::gaussian(alg, rng, s);
        match defect_of(&x, &y) {
            Ok(d) => {
                worst = worst.max(d);
                done += 1;
            }
            // degenerate Jordan structure, resample
            Err(Error::BoundaryUnstable(_)) | Err(Error::IllConditioned(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

/// `|f(exp x exp y) - f(exp x) - f(exp y)|`.
pub fn defect_of(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    let fx = f_gw_closed_form(x)?.value;
    let fy = f_gw_closed_form(y)?.value;
    let fxy = f_gw_word_closed_form(&[x.clone(), y.clone()])?.value;
    Ok((fxy - fx - fy).abs())
}

/// Point of the extended real line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

/// `(a x + b) / (c x + d)` with the point at infinity handled projectively.
pub fn mobius_act(g: &GroupElement, x: ExtReal) -> Result<ExtReal> {
    if g.algebra().family() != Family::Sl2 {
        return Err(Error::Unsupported("Mobius action is defined for sl2".into()));
    }
    let m = g.matrix();
    let (a, b, cc, d) = (m[(0, 0)].re, m[(0, 1)].re, m[(1, 0)].re, m[(1, 1)].re);
    let (num, den) = match x {
        ExtReal::Finite(t) => (a * t + b, cc * t + d),
        ExtReal::Infinity => (a, cc),
    };
    Ok(if den == 0.0 { ExtReal::Infinity } else { ExtReal::Finite(num / den) })
}

/// `2 arctan(g.0)` in `(-pi, pi]`, in the `z` coordinate.
pub fn chi_iwa_sl2(g: &GroupElement) -> Result<f64> {
    Ok(match mobius_act(g, ExtReal::Finite(0.0))? {
        ExtReal::Finite(v) => 2.0 * v.atan(),
        ExtReal::Infinity => PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z_of(alg: &crate::algebra::Algebra) -> AlgebraElement {
        alg.torus(&alg.root_datum().unwrap().z).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        for f in [Family::Sl2, Family::Sp { n: 2 }, Family::Sp { n: 3 }, Family::Su { p: 2, q: 1 }] {
            let alg = LieAlgebra::new(f);
            let z = z_of(&alg);
            for t in [0.3, 2.0, 9.0, -1.5] {
                let v = f_gw_closed_form(&z.scale(t)).unwrap().value;
                assert!((v - t).abs() < 1e-9, "{f} {t} {v}");
            }
        }
        let sp = LieAlgebra::new(Family::Sp { n: 2 });
        let x = sp.torus(&[PI / 2.0, PI / 2.0]).unwrap();
        assert!((f_gw_closed_form(&x).unwrap().value - PI).abs() < 1e-12);
        let sl = LieAlgebra::new(Family::Sl2);
        let e = AlgebraElement::from_matrix(
            &sl,
            &CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        assert_eq!(f_gw_closed_form(&e).unwrap().value, 0.0);
    }

    #[test]
    fn frame_phase_on_torus() {
        let sl = LieAlgebra::new(Family::Sl2);
        let z = z_of(&sl);
        for t in [0.1, 1.0, 3.0] {
            let g = linalg::real_part(z.scale(t).exp().matrix());
            assert!((2.0 * circle_phase(&g) - t).abs() < 1e-12);
        }
        let v = word_phase(&[z.scale(9.0)]).unwrap();
        assert!((2.0 * v - 9.0).abs() < 1e-9);
    }

    #[test]
    fn homogenized_matches_z() {
        let sp = LieAlgebra::new(Family::Sp { n: 2 });
        let z = z_of(&sp);
        let v = f_gw_homogenized(&[z.scale(1.3)]).unwrap();
        assert!((v.value - 1.3).abs() < 0.02, "{v:?}");
    }

    #[test]
    fn word_lift_counts_windings() {
        let sp = LieAlgebra::new(Family::Sp { n: 2 });
        let z = z_of(&sp);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sample::group(&sp, &mut rng, 0.8);
        // three turns and a bit, conjugated
        let x = z.scale(3.0 * TAU + 0.7).conjugate(&h).unwrap();
        let v = f_gw_word_closed_form(&[x.scale(0.5), x.scale(0.5)]).unwrap().value;
        assert!((v - (3.0 * TAU + 0.7)).abs() < 1e-7, "{v}");
    }

    #[test]
    fn orthosymplectic_log_round_trip() {
        let sp = LieAlgebra::new(Family::Sp { n: 2 });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = linalg::real_part(sample::compact(&sp, &mut rng, 1.0).matrix());
        let l = log_orthosymplectic(&k);
        assert!((rexp(&l) - &k).norm() < 1e-10);
    }

    #[test]
    fn mobius_and_iwasawa_sl2() {
        let sl = LieAlgebra::new(Family::Sl2);
        let z = z_of(&sl);
        for i in 1..40 {
            let t = -3.0 + 0.15 * i as f64;
            let g = z.scale(t).exp();
            match mobius_act(&g, ExtReal::Finite(0.0)).unwrap() {
                ExtReal::Finite(v) => assert!((v - (t / 2.0).tan()).abs() < 1e-10),
                ExtReal::Infinity => panic!(),
            }
            assert!((chi_iwa_sl2(&g).unwrap() - 2.0 * circle_phase(&linalg::real_part(g.matrix()))).abs() < 1e-12);
        }
        let id = GroupElement::identity(&sl);
        assert_eq!(mobius_act(&id, ExtReal::Finite(2.5)).unwrap(), ExtReal::Finite(2.5));
        assert_eq!(mobius_act(&id, ExtReal::Infinity).unwrap(), ExtReal::Infinity);
    }

    #[test]
    fn commuting_and_compact_pairs_have_no_defect() {
        let sp = LieAlgebra::new(Family::Sp { n: 2 });
        let z = z_of(&sp);
        assert!(defect_of(&z.scale(2.0), &z.scale(5.5)).unwrap() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let k = sp.k_dim();
            let co = |rng: &mut ChaCha8Rng| {
                crate::linalg::RVec::from_fn(sp.dim(), |i, _| if i < k { rng.random_range(-1.0..1.0) } else { 0.0 })
            };
            let x = AlgebraElement::from_coords(&sp, co(&mut rng));
            let y = AlgebraElement::from_coords(&sp, co(&mut rng));
            assert!(defect_of(&x, &y).unwrap() < 1e-7);
        }
    }
}
