//! Alcove labels and the connected components of the stably elliptic set.
//!
//! A label `theta` over the positive noncompact roots names the open alcove
//! `2 pi theta_a < a.x < 2 pi (theta_a + 1)`. Working in `y = x / 2 pi` keeps
//! every alcove an integer polyhedron, so emptiness and vertices are exact.
//! Two labels name the same component when they are related by the Weyl
//! group and by translations from the kernel lattice.

pub mod hnf;
pub mod polyhedron;

use crate::algebra::GroupElement;
use crate::ellipticity;
use crate::error::{Error, Result};
use crate::structure::{Lattice, RootDatum};
use hnf::Hnf;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use polyhedron::Ineq;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

pub type Label = Vec<i64>;

/// Label of the alcove containing `x`; rejects points within the boundary
/// margin of a wall.
pub fn alcove_of(datum: &RootDatum, x: &[f64], margin: f64) -> Result<Label> {
    let mut out = Vec::with_capacity(datum.noncompact.len());
    for a in &datum.noncompact {
        let v = a.value(x);
        let r = v.rem_euclid(TAU);
        if r.min(TAU - r) <= margin {
            return Err(Error::BoundaryUnstable(format!("root {} is on a wall (value {v:.3e})", a.name)));
        }
        out.push((v / TAU).floor() as i64);
    }
    Ok(out)
}

/// Strict inequalities of the alcove in `y = x / 2 pi`.
pub fn alcove_system(datum: &RootDatum, theta: &[i64]) -> Vec<Ineq> {
    let mut sys = Vec::with_capacity(2 * theta.len());
    for (a, &t) in datum.noncompact.iter().zip(theta) {
        let c: Vec<i128> = a.covector.iter().map(|&v| v as i128).collect();
        sys.push(Ineq { coeffs: c.iter().map(|v| -v).collect(), rhs: -(t as i128), strict: true });
        sys.push(Ineq { coeffs: c, rhs: t as i128 + 1, strict: true });
    }
    sys
}

pub fn alcove_nonempty(datum: &RootDatum, theta: &[i64]) -> bool {
    polyhedron::feasible(&alcove_system(datum, theta))
}

/// Vertices of the closed alcove in angle coordinates divided by `2 pi`.
pub fn alcove_vertices(datum: &RootDatum, theta: &[i64]) -> Result<Vec<Vec<Rational64>>> {
    if !alcove_nonempty(datum, theta) {
        return Err(Error::EmptyAlcove);
    }
    let sys: Vec<Ineq> = alcove_system(datum, theta)
        .into_iter()
        .map(|q| Ineq { strict: false, ..q })
        .collect();
    Ok(polyhedron::vertices(&sys))
}

/// Average of the vertices, in angle coordinates.
pub fn interior_point(datum: &RootDatum, theta: &[i64]) -> Result<Vec<f64>> {
    let verts = alcove_vertices(datum, theta)?;
    let r = datum.rank;
    let n = verts.len() as i64;
    Ok((0..r)
        .map(|k| {
            let s = verts.iter().fold(Rational64::zero(), |acc, v| acc + v[k]);
            (s / Rational64::from_integer(n)).to_f64().unwrap() * TAU
        })
        .collect())
}

pub fn weyl_act_on_label(datum: &RootDatum, w: usize, theta: &[i64]) -> Label {
    let we = &datum.weyl[w];
    let mut out = vec![0; theta.len()];
    for (i, &t) in theta.iter().enumerate() {
        let (k, s) = datum.permute_root(we, i);
        out[k] = if s > 0 { t } else { -t - 1 };
    }
    out
}

/// Pairing of a lattice vector (units of `2 pi`) with the noncompact roots.
pub fn pairing(datum: &RootDatum, v: &[Rational64]) -> Result<Vec<i64>> {
    datum
        .noncompact
        .iter()
        .map(|a| {
            let s = a
                .covector
                .iter()
                .zip(v)
                .fold(Rational64::zero(), |acc, (c, y)| acc + Rational64::from_integer(*c) * y);
            if s.is_integer() {
                Ok(s.to_integer())
            } else {
                Err(Error::NotInLattice)
            }
        })
        .collect()
}

pub fn translate_label(datum: &RootDatum, v: &[Rational64], theta: &[i64]) -> Result<Label> {
    let shift = pairing(datum, v)?;
    Ok(theta.iter().zip(shift).map(|(t, s)| t + s).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentClass {
    pub canonical: Label,
    pub lattice: String,
    /// Index into the Weyl group list of the root datum.
    pub weyl_index: usize,
    /// Lattice vector in units of `2 pi`, as exact rationals.
    #[serde(serialize_with = "ser_rationals")]
    pub lattice_vector: Vec<Rational64>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&q.to_string())?;
    }
    seq.end()
}

impl ComponentClass {
    pub fn is_basic(&self) -> bool {
        self.canonical.iter().all(|t| *t == 0)
    }
}

/// Reduction data for one lattice.
pub struct Reducer<'a> {
    datum: &'a RootDatum,
    lattice: &'a Lattice,
    hnf: Hnf,
}

impl<'a> Reducer<'a> {
    pub fn new(datum: &'a RootDatum, lattice: &'a Lattice) -> Result<Self> {
        let images: Vec<Vec<i64>> =
            lattice.generators.iter().map(|g| pairing(datum, g)).collect::<Result<_>>()?;
        let hnf = Hnf::new(&images, datum.noncompact.len());
        Ok(Reducer { datum, lattice, hnf })
    }

    fn reduce(&self, theta: &[i64]) -> (Label, Vec<i64>) {
        self.hnf.reduce(theta)
    }

    fn lattice_vector(&self, coeff: &[i64]) -> Vec<Rational64> {
        let r = self.datum.rank;
        let mut v = vec![Rational64::zero(); r];
        for (k, g) in coeff.iter().zip(&self.lattice.generators) {
            for i in 0..r {
                v[i] += Rational64::from_integer(*k) * g[i];
            }
        }
        v
    }

    /// Lexicographic minimum of the reduced Weyl orbit.
    pub fn canonical(&self, theta: &[i64]) -> Result<ComponentClass> {
        if !alcove_nonempty(self.datum, theta) {
            return Err(Error::EmptyAlcove);
        }
        let mut best: Option<(Label, usize, Vec<i64>)> = None;
        for w in 0..self.datum.weyl.len() {
            let wt = weyl_act_on_label(self.datum, w, theta);
            let (red, coeff) = self.reduce(&wt);
            if best.as_ref().map_or(true, |b| red < b.0) {
                best = Some((red, w, coeff));
            }
        }
        let (canonical, w, coeff) = best.expect("Weyl group is nonempty");
        Ok(ComponentClass {
            canonical,
            lattice: self.lattice.name.clone(),
            weyl_index: w,
            lattice_vector: self.lattice_vector(&coeff),
        })
    }

    /// Number of distinct reduced labels in the Weyl orbit.
    pub fn orbit_size(&self, theta: &[i64]) -> usize {
        let mut seen: Vec<Label> = (0..self.datum.weyl.len())
            .map(|w| self.reduce(&weyl_act_on_label(self.datum, w, theta)).0)
            .collect();
        seen.sort();
        seen.dedup();
        seen.len()
    }
}

pub fn canonical_component(datum: &RootDatum, theta: &[i64], lattice: &Lattice) -> Result<ComponentClass> {
    Reducer::new(datum, lattice)?.canonical(theta)
}

/// Component class of a stably elliptic element.
pub fn classify_element(g: &GroupElement, lattice: &Lattice) -> Result<ComponentClass> {
    let alg = g.algebra();
    let datum = alg.root_datum()?;
    if !ellipticity::is_stably_elliptic(g)? {
        return Err(Error::NotElliptic);
    }
    let rep = ellipticity::torus_representative(g)?;
    let theta = alcove_of(datum, &rep.angles, alg.tol().boundary_margin)?;
    canonical_component(datum, &theta, lattice)
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasEntry {
    pub class: ComponentClass,
    /// Interior point of the witness alcove, in angle coordinates.
    pub witness_point: Vec<f64>,
    pub orbit_size: usize,
}

/// Nonempty labels in `[-bound, bound]^m`, found by depth-first search with
/// Fourier-Motzkin pruning on partial labels.
pub fn nonempty_labels(datum: &RootDatum, bound: i64) -> Vec<Label> {
    let m = datum.noncompact.len();
    let mut out = Vec::new();
    let mut cur: Vec<i64> = Vec::with_capacity(m);
    fn rec(datum: &RootDatum, bound: i64, m: usize, cur: &mut Vec<i64>, out: &mut Vec<Label>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for t in -bound..=bound {
            cur.push(t);
            let k = cur.len();
            let mut sys = Vec::with_capacity(2 * k);
            for (a, &tt) in datum.noncompact.iter().zip(cur.iter()) {
                let c: Vec<i128> = a.covector.iter().map(|&v| v as i128).collect();
                sys.push(Ineq { coeffs: c.iter().map(|v| -v).collect(), rhs: -(tt as i128), strict: true });
                sys.push(Ineq { coeffs: c, rhs: tt as i128 + 1, strict: true });
            }
            if polyhedron::feasible(&sys) {
                rec(datum, bound, m, cur, out);
            }
            cur.pop();
        }
    }
    rec(datum, bound, m, &mut cur, &mut out);
    out
}

pub fn enumerate_components(datum: &RootDatum, lattice: &Lattice, bound: i64) -> Result<Vec<AtlasEntry>> {
    if bound < 1 {
        return Err(Error::Invalid("box bound must be at least 1".into()));
    }
    let red = Reducer::new(datum, lattice)?;
    let mut classes: BTreeMap<Label, ComponentClass> = BTreeMap::new();
    for theta in nonempty_labels(datum, bound) {
        let cls = red.canonical(&theta)?;
        if cls.canonical.iter().all(|t| t.abs() <= bound) {
            classes.entry(cls.canonical.clone()).or_insert(cls);
        }
    }
    classes
        .into_values()
        .map(|class| {
            let witness_point = interior_point(datum, &class.canonical)?;
            let orbit_size = red.orbit_size(&class.canonical);
            let class = ComponentClass { weyl_index: 0, lattice_vector: vec![Rational64::zero(); datum.rank], ..class };
            Ok(AtlasEntry { class, witness_point, orbit_size })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;
    use std::f64::consts::PI;

    fn sp4() -> RootDatum {
        RootDatum::build(Family::Sp { n: 2 }).unwrap()
    }

    #[test]
    fn alcove_examples() {
        let d = sp4();
        assert_eq!(alcove_of(&d, &[1.5 * PI, 0.25 * PI], 1e-7).unwrap(), vec![1, 0, 0]);
        assert_eq!(alcove_of(&d, &[0.5 * PI, 0.5 * PI], 1e-7).unwrap(), vec![0, 0, 0]);
        assert_eq!(alcove_of(&d, &[-0.5 * PI, -0.5 * PI], 1e-7).unwrap(), vec![-1, -1, -1]);
        assert!(matches!(alcove_of(&d, &[0.5 * PI, 1.5 * PI], 1e-7), Err(Error::BoundaryUnstable(_))));
    }

    #[test]
    fn nonemptiness_examples() {
        let d = sp4();
        assert!(alcove_nonempty(&d, &[1, 0, 0]));
        assert!(!alcove_nonempty(&d, &[1, 1, 0]));
        let su = RootDatum::build(Family::Su { p: 2, q: 1 }).unwrap();
        for a in -2..=2 {
            for b in -2..=2 {
                assert!(alcove_nonempty(&su, &[a, b]));
            }
        }
    }

    #[test]
    fn weyl_swap_on_label() {
        let d = sp4();
        let w = (0..d.weyl.len()).find(|&i| d.weyl[i].matrix[0][0] == 0).unwrap();
        assert_eq!(weyl_act_on_label(&d, w, &[1, 0, 0]), vec![0, 1, 0]);
    }

    #[test]
    fn translation_example() {
        let d = sp4();
        let v = [Rational64::from_integer(1), Rational64::zero()];
        assert_eq!(translate_label(&d, &v, &[0, 0, 0]).unwrap(), vec![2, 0, 1]);
        let half = [Rational64::new(1, 4), Rational64::zero()];
        assert_eq!(translate_label(&d, &half, &[0, 0, 0]), Err(Error::NotInLattice));
    }

    #[test]
    fn witness_reproduces_canonical_label() {
        let d = sp4();
        let lat = d.preset("matrix").unwrap().clone();
        for theta in nonempty_labels(&d, 2) {
            let c = canonical_component(&d, &theta, &lat).unwrap();
            let wt = weyl_act_on_label(&d, c.weyl_index, &theta);
            assert_eq!(translate_label(&d, &c.lattice_vector, &wt).unwrap(), c.canonical);
        }
    }
}
