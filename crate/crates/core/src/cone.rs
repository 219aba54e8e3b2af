//! Invariant cone, Krein signatures, the time function `tau` and causal
//! curves.
//!
//! For `sl2` and `sp(2n)` the maximal cone is `{ x : J x >= 0 }`, tested on
//! the symmetric matrix `J x`. Compact elements of any family can also be
//! tested on the torus, where the cone is cut out by the positive noncompact
//! roots.

use crate::algebra::{symplectic_form, Algebra, AlgebraElement, Family, GroupElement};
use crate::components::{self, alcove_of};
use crate::ellipticity::{self, is_compact_element, torus_form, torus_representative};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::sample;
use crate::spectral::Spectrum;
use crate::structure::RootDatum;
use crate::tol::scale;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "route", rename_all = "lowercase")]
pub enum ConeCertificate {
    /// Eigenvalues of the symmetric matrix `J x`, ascending.
    Matrix { eigenvalues: Vec<f64>, symmetry_residual: f64 },
    /// Torus angles of `x` and its noncompact root values.
    Torus { angles: Vec<f64>, root_values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeQuery {
    pub member: bool,
    pub interior: bool,
    /// Smallest eigenvalue or root value; negative outside the cone.
    pub margin: f64,
    pub certificate: ConeCertificate,
}

const SYMMETRY_TOL: f64 = 1e-10;

fn cone_matrix_route(x: &AlgebraElement, n: usize) -> ConeQuery {
    let tol = x.algebra().tol();
    let j = symplectic_form(n);
    let s = linalg::real_part(&(&j * x.matrix()));
    let sym_res = (&s - s.transpose()).norm();
    let (vals, _) = linalg::symmetric_eigen(&s);
    let margin = vals[0];
    let sym_ok = sym_res <= SYMMETRY_TOL * scale(s.norm());
    let member = sym_ok && margin >= -tol.psd * scale(s.norm());
    ConeQuery {
        member,
        interior: member && margin > tol.cone_interior,
        margin,
        certificate: ConeCertificate::Matrix { eigenvalues: vals, symmetry_residual: sym_res },
    }
}

/// Cone test through the torus form of a compact element.
pub fn cone_torus_route(x: &AlgebraElement) -> Result<ConeQuery> {
    let alg = x.algebra();
    let datum = alg.root_datum()?;
    if !is_compact_element(x) {
        return Err(Error::Unsupported("torus route needs a compact element".into()));
    }
    let rep = torus_form(x)?;
    let angles = min_cone_angles(datum, &rep.angles);
    let values = datum.noncompact_values(&angles);
    let margin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let member = margin >= -alg.tol().psd;
    Ok(ConeQuery {
        member,
        interior: member && margin > alg.tol().cone_interior,
        margin,
        certificate: ConeCertificate::Torus { angles, root_values: values },
    })
}

/// The torus form is only defined up to the Weyl group; use the element of
/// the orbit with the largest smallest root value.
fn min_cone_angles(datum: &RootDatum, x: &[f64]) -> Vec<f64> {
    let mut best = x.to_vec();
    let mut best_m = f64::NEG_INFINITY;
    for w in &datum.weyl {
        let y = crate::structure::mat_vec(&w.matrix, x);
        let m = datum.noncompact_values(&y).into_iter().fold(f64::INFINITY, f64::min);
        if m > best_m {
            best_m = m;
            best = y;
        }
    }
    best
}

pub fn in_max_cone(x: &AlgebraElement) -> Result<ConeQuery> {
    let alg = x.algebra();
    match alg.family().symplectic_n() {
        Some(n) => Ok(cone_matrix_route(x, n)),
        None => match alg.family() {
            Family::Su { .. } => {
                if is_compact_element(x) {
                    cone_torus_route(x)
                } else {
                    Err(Error::Unsupported("cone membership of non-compact su(p,q) elements".into()))
                }
            }
            _ => Err(Error::Unsupported(format!("no invariant cone for {}", alg.family()))),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Positive,
    Negative,
    Indefinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct KreinEntry {
    pub eigenvalue: (f64, f64),
    pub multiplicity: usize,
    pub signature: Signature,
}

#[derive(Clone, Debug, Serialize)]
pub struct KreinReport {
    /// Eigenvalues in the upper half plane with their signatures. The
    /// conjugates carry the opposite signatures.
    pub entries: Vec<KreinEntry>,
    /// Angles in `(0, 2 pi)` of the Krein-positive half of the spectrum.
    pub positive_angles: Vec<f64>,
}

/// Krein signatures of an elliptic symplectic matrix, for the form
/// `i v* J v`, positive on the torus blocks.
pub fn krein_signatures(g: &GroupElement) -> Result<KreinReport> {
    let alg = g.algebra();
    let n = alg
        .family()
        .symplectic_n()
        .ok_or_else(|| Error::Unsupported("Krein signatures need a symplectic family".into()))?;
    let tol = alg.tol();
    if !ellipticity::is_elliptic(g) {
        return Err(Error::NotElliptic);
    }
    let spec = Spectrum::analyze(g.matrix(), tol);
    let form = symplectic_form(n) * linalg::I;
    let band = tol.cluster_radius * spec.scale;
    let mut entries = Vec::new();
    let mut angles = Vec::new();
    let floor = tol.rank.sqrt();
    for cl in &spec.clusters {
        if cl.center.im.abs() <= band {
            return Err(Error::BoundaryUnstable(format!(
                "eigenvalue collision at {}1",
                if cl.center.re > 0.0 { "+" } else { "-" }
            )));
        }
        if cl.center.im < 0.0 {
            continue;
        }
        let e = &cl.eigvecs;
        let h = e.adjoint() * &form * e;
        let (vals, _) = linalg::hermitian_eigen(&h);
        let pos = vals.iter().filter(|v| **v > floor).count();
        let neg = vals.iter().filter(|v| **v < -floor).count();
        let arg = linalg::arg_2pi(cl.center);
        let signature = if pos == vals.len() {
            Signature::Positive
        } else if neg == vals.len() {
            Signature::Negative
        } else {
            Signature::Indefinite
        };
        for _ in 0..pos {
            angles.push(arg);
        }
        for _ in 0..neg {
            angles.push(TAU - arg);
        }
        entries.push(KreinEntry {
            eigenvalue: (cl.center.re, cl.center.im),
            multiplicity: cl.multiplicity(),
            signature,
        });
    }
    angles.sort_by(f64::total_cmp);
    Ok(KreinReport { entries, positive_angles: angles })
}

/// Both verdicts of the basic-component test.
#[derive(Clone, Debug, Serialize)]
pub struct BasicRoutes {
    pub alcove: bool,
    /// Only for the symplectic families.
    pub krein: Option<bool>,
    /// Distance of the noncompact root values to `2 pi Z`, when available.
    pub wall_margin: Option<f64>,
}

pub fn basic_routes(g: &GroupElement) -> Result<BasicRoutes> {
    let alg = g.algebra();
    let datum = alg.root_datum()?;
    let mut wall_margin = None;
    let alcove = if ellipticity::is_elliptic(g) {
        match torus_representative(g) {
            Ok(rep) => {
                wall_margin = Some(ellipticity::wall_margin(&rep.angles, datum));
                let se = ellipticity::is_stably_elliptic(g)?;
                se && match alcove_of(datum, &rep.angles, 0.0) {
                    Ok(theta) => components::canonical_component(datum, &theta, datum.matrix_lattice())?.is_basic(),
                    Err(Error::BoundaryUnstable(_)) => false,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::BoundaryUnstable(_)) => {
                wall_margin = Some(0.0);
                false
            }
            Err(e) => return Err(e),
        }
    } else {
        false
    };
    let krein = if alg.family().symplectic_n().is_some() {
        Some(match krein_signatures(g) {
            Ok(rep) => rep.positive_angles.iter().all(|a| *a > 0.0 && *a < PI),
            Err(Error::NotElliptic) | Err(Error::BoundaryUnstable(_)) => false,
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    Ok(BasicRoutes { alcove, krein, wall_margin })
}

/// Membership in the component of the stably elliptic set containing
/// `exp(z)`, under the matrix-group lattice.
pub fn in_basic_component(g: &GroupElement) -> Result<bool> {
    let r = basic_routes(g)?;
    if let Some(k) = r.krein {
        if k != r.alcove {
            let near_wall = r.wall_margin.map_or(true, |m| m < 1e-6);
            if !near_wall {
                return Err(Error::RouteDisagreement(format!(
                    "alcove route {} and Krein route {k}",
                    r.alcove
                )));
            }
        }
    }
    Ok(r.alcove)
}

/// `sum ln(a.x) - ln(2 pi - a.x)` over the positive noncompact roots.
pub fn tau_on_torus(datum: &RootDatum, x: &[f64]) -> Result<f64> {
    let mut t = 0.0;
    for v in datum.noncompact_values(x) {
        if !(v > 0.0 && v < TAU) {
            return Err(Error::OutsideBasic);
        }
        t += v.ln() - (TAU - v).ln();
    }
    Ok(t)
}

pub fn tau(g: &GroupElement) -> Result<f64> {
    if !in_basic_component(g)? {
        return Err(Error::OutsideBasic);
    }
    let alg = g.algebra();
    let rep = torus_representative(g)?;
    let datum = alg.root_datum()?;
    // the alcove label is zero up to a lattice translation and a Weyl move
    let theta = alcove_of(datum, &rep.angles, 0.0)?;
    let cls = components::canonical_component(datum, &theta, datum.matrix_lattice())?;
    let w = &datum.weyl[cls.weyl_index].matrix;
    let mut x = crate::structure::mat_vec(w, &rep.angles);
    for (xi, v) in x.iter_mut().zip(&cls.lattice_vector) {
        *xi += num_traits::ToPrimitive::to_f64(v).unwrap() * TAU;
    }
    tau_on_torus(datum, &x)
}

/// Piecewise exponential curve `gamma(t_{i+1}) = gamma(t_i) exp((t_{i+1} - t_i) v_i)`.
#[derive(Clone, Debug)]
pub struct CausalCurve {
    pub times: Vec<f64>,
    pub samples: Vec<GroupElement>,
    /// `v_i` drives the step from sample `i` to `i + 1`; the last entry
    /// repeats the final generator.
    pub velocities: Vec<AlgebraElement>,
    /// Logarithm of the first sample, fixing its lift to the universal cover.
    pub start_log: Option<AlgebraElement>,
    pub label: String,
}

impl CausalCurve {
    pub fn algebra(&self) -> &Algebra {
        self.samples[0].algebra()
    }

    /// Curve from a start element and a list of `(dt, generator)` steps.
    pub fn from_steps(start_log: &AlgebraElement, steps: &[(f64, AlgebraElement)], label: &str) -> CausalCurve {
        let g0 = start_log.exp();
        let mut times = vec![0.0];
        let mut samples = vec![g0];
        let mut velocities = Vec::with_capacity(steps.len() + 1);
        for (dt, w) in steps {
            let last = samples.last().unwrap();
            let next = last.mul(&w.scale(*dt).exp()).expect("same algebra");
            times.push(times.last().unwrap() + dt);
            samples.push(next);
            velocities.push(w.clone());
        }
        let tail = steps.last().map_or_else(|| AlgebraElement::zero(start_log.algebra()), |s| s.1.clone());
        velocities.push(tail);
        CausalCurve { times, samples, velocities, start_log: Some(start_log.clone()), label: label.into() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest step residual `|g_i^-1 g_{i+1} - exp(dt v_i)|`, checked
    /// against the step tolerance.
    pub fn check_steps(&self) -> Result<f64> {
        let tol = self.algebra().tol();
        let mut worst: f64 = 0.0;
        for i in 0..self.samples.len().saturating_sub(1) {
            let dt = self.times[i + 1] - self.times[i];
            let step = self.samples[i].inverse()?.mul(&self.samples[i + 1])?;
            let exp = self.velocities[i].scale(dt).exp();
            let r = step.distance(&exp) / scale(exp.matrix().norm());
            if r > tol.step_consistency {
                return Err(Error::StepConsistency { index: i, residual: r });
            }
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Timelike,
    Causal,
    Violating,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleVerdict {
    pub member: bool,
    pub interior: bool,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CausalReport {
    pub samples: Vec<SampleVerdict>,
    pub kind: CurveKind,
    pub worst_margin: f64,
    pub first_violation: Option<usize>,
}

pub fn causal_check(curve: &CausalCurve) -> Result<CausalReport> {
    curve.check_steps()?;
    let mut samples = Vec::with_capacity(curve.len());
    for v in &curve.velocities {
        let q = in_max_cone(v)?;
        samples.push(SampleVerdict { member: q.member, interior: q.interior, margin: q.margin });
    }
    let worst_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    let first_violation = samples.iter().position(|s| !s.member);
    let kind = if first_violation.is_some() {
        CurveKind::Violating
    } else if samples.iter().all(|s| s.interior) {
        CurveKind::Timelike
    } else {
        CurveKind::Causal
    };
    Ok(CausalReport { samples, kind, worst_margin, first_violation })
}

/// Generator distribution for synthesized curves.
#[derive(Clone, Debug)]
pub struct CurveConfig {
    pub steps: usize,
    pub dt: f64,
    /// Range of the noncompact root values of the torus part of each
    /// generator.
    pub root_range: (f64, f64),
    /// Largest norm of the `p` element conjugating each generator.
    pub conj_norm: f64,
    /// Angle coordinates of the torus element whose exponential starts the
    /// curve.
    pub start: Vec<f64>,
}

impl CurveConfig {
    pub fn new(alg: &Algebra, steps: usize) -> Result<CurveConfig> {
        let datum = alg.root_datum()?;
        Ok(CurveConfig {
            steps,
            dt: 0.05,
            root_range: (0.05, 0.6),
            conj_norm: 0.6,
            start: datum.z.iter().map(|v| v * 0.4).collect(),
        })
    }
}

/// Torus point whose noncompact root values all lie in `range`.
pub fn sample_cone_torus<R: Rng + ?Sized>(datum: &RootDatum, rng: &mut R, range: (f64, f64)) -> Vec<f64> {
    let r = datum.rank;
    loop {
        let x: Vec<f64> = match datum.family {
            Family::Su { p, q } => {
                let n = p + q;
                let mut full: Vec<f64> = (0..n)
                    .map(|k| if k < p { rng.random_range(0.0..range.1 / 2.0) } else { -rng.random_range(0.0..range.1 / 2.0) })
                    .collect();
                let mean = full.iter().sum::<f64>() / n as f64;
                for v in full.iter_mut() {
                    *v -= mean;
                }
                full.truncate(n - 1);
                full
            }
            _ => {
                let top = match datum.family {
                    Family::Sl2 => range.1,
                    _ => range.1 / 2.0,
                };
                (0..r).map(|_| rng.random_range(0.0..top)).collect()
            }
        };
        let vals = datum.noncompact_values(&x);
        if vals.iter().all(|v| *v > range.0 && *v < range.1) {
            return x;
        }
    }
}

/// Random piecewise exponential curve with generators `Ad(h) x`, `x` in the
/// interior of the cone on the torus and `h = exp(y)`, `y` in `p`.
pub fn generate_causal_curve<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R, cfg: &CurveConfig) -> Result<CausalCurve> {
    let datum = alg.root_datum()?;
    let start = alg.torus(&cfg.start)?;
    let mut steps = Vec::with_capacity(cfg.steps);
    while steps.len() < cfg.steps {
        let x = alg.torus(&sample_cone_torus(datum, rng, cfg.root_range))?;
        let h = sample::group(alg, rng, cfg.conj_norm);
        let w = x.conjugate(&h)?;
        if alg.family().symplectic_n().is_some() && !in_max_cone(&w)?.interior {
            continue;
        }
        steps.push((cfg.dt, w));
    }
    Ok(CausalCurve::from_steps(&start, &steps, "random"))
}

/// Number of leading samples inside the basic component.
pub fn basic_prefix(curve: &CausalCurve) -> Result<usize> {
    let mut k = 0;
    for g in &curve.samples {
        if !in_basic_component(g)? {
            break;
        }
        k += 1;
    }
    Ok(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// First `t` (signed) where `exp(t x) g` leaves the basic component.
pub fn exit_time(x: &AlgebraElement, g: &GroupElement, dir: Direction) -> Result<f64> {
    let alg = x.algebra();
    if !in_max_cone(x)?.member {
        return Err(Error::Invalid("direction is not in the cone".into()));
    }
    if !in_basic_component(g)? {
        return Err(Error::OutsideBasic);
    }
    let sgn = match dir {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let inside = |t: f64| -> Result<bool> { in_basic_component(&x.scale(sgn * t).exp().mul(g)?) };
    let mut lo = 0.0;
    let mut hi = 1e-2 / scale(x.norm());
    loop {
        if !inside(hi)? {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoSignChange);
        }
    }
    let width = alg.tol().bisection;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(sgn * 0.5 * (lo + hi))
}

/// Polar `k` parts along a curve, as a curve in `K` with the `k`
/// projections of the velocities.
pub fn k_projection_curve(curve: &CausalCurve) -> Result<Vec<(GroupElement, AlgebraElement)>> {
    curve
        .samples
        .iter()
        .zip(&curve.velocities)
        .map(|(g, v)| {
            let (k, _) = ellipticity::polar_split(g)?;
            let (vk, _) = v.cartan_parts()?;
            Ok((k, vk))
        })
        .collect()
}

/// `J x` for the symplectic families, as a real matrix.
pub fn j_times(x: &AlgebraElement) -> Option<RMat> {
    let n = x.algebra().family().symplectic_n()?;
    Some(linalg::real_part(&(symplectic_form(n) * x.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;

    #[test]
    fn cone_examples() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let d = alg.root_datum().unwrap();
        let z = alg.torus(&d.z).unwrap();
        let q = in_max_cone(&z).unwrap();
        assert!(q.member && q.interior);
        assert!(!in_max_cone(&z.neg()).unwrap().member);
        let sl = LieAlgebra::new(Family::Sl2);
        let e = AlgebraElement::from_slice(&sl, &[1.0, 0.0, 1.0]).unwrap();
        let q = in_max_cone(&e).unwrap();
        assert!(q.member && !q.interior);
    }

    #[test]
    fn krein_oracle_on_rotation_blocks() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let g = alg.torus(&[PI / 3.0, PI / 5.0]).unwrap().exp();
        let r = krein_signatures(&g).unwrap();
        assert!(r.entries.iter().all(|e| e.signature == Signature::Positive));
        assert!((r.positive_angles[0] - PI / 5.0).abs() < 1e-12);
        assert!((r.positive_angles[1] - PI / 3.0).abs() < 1e-12);
        let g = alg.torus(&[1.5 * PI, 0.4]).unwrap().exp();
        let r = krein_signatures(&g).unwrap();
        assert!(r.positive_angles.iter().any(|a| (a - 1.5 * PI).abs() < 1e-12));
        let g = alg.torus(&[1e-10, 0.4]).unwrap().exp();
        assert!(matches!(krein_signatures(&g), Err(Error::BoundaryUnstable(_))));
    }

    #[test]
    fn basic_component_examples() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let d = alg.root_datum().unwrap().clone();
        let z = alg.torus(&d.z).unwrap();
        for t in [0.1, PI, 6.2] {
            assert!(in_basic_component(&z.scale(t).exp()).unwrap(), "{t}");
        }
        assert!(!in_basic_component(&z.scale(TAU).exp()).unwrap());
        let g = alg.torus(&[PI / 2.0, 1.5 * PI]).unwrap().exp();
        assert!(!in_basic_component(&g).unwrap());
    }

    #[test]
    fn tau_examples() {
        let sl = LieAlgebra::new(Family::Sl2);
        let d = sl.root_datum().unwrap();
        assert!(tau_on_torus(d, &[PI]).unwrap().abs() < 1e-15);
        let t = 1.1;
        assert!((tau_on_torus(d, &[t]).unwrap() - (t.ln() - (TAU - t).ln())).abs() < 1e-15);
        assert!(tau_on_torus(d, &[1e-9 * TAU]).unwrap() < -20.0);
        let sp = LieAlgebra::new(Family::Sp { n: 2 });
        assert!(tau_on_torus(sp.root_datum().unwrap(), &[PI / 2.0, PI / 2.0]).unwrap().abs() < 1e-15);
        let g = sp.torus(&[0.5, 0.5]).unwrap().scale(PI).exp();
        assert!(tau(&g).unwrap().abs() < 1e-12);
    }

    #[test]
    fn exit_time_along_z() {
        let sl = LieAlgebra::new(Family::Sl2);
        let z = sl.torus(&[1.0]).unwrap();
        let g = z.scale(PI).exp();
        let c2 = exit_time(&z, &g, Direction::Forward).unwrap();
        let c1 = exit_time(&z, &g, Direction::Backward).unwrap();
        assert!((c2 - PI).abs() < 1e-6, "{c2}");
        assert!((c1 + PI).abs() < 1e-6, "{c1}");
    }
}
