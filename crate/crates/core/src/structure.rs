//! Restricted root data: roots on the compact torus, Weyl group and the
//! lattice presets of each family.
//!
//! Angle coordinates `x` parametrize the torus. A root acts through an
//! integer covector `a`, and its value is `i alpha(x) = a . x`. Lattices are
//! stored in units of `2 pi` with rational generators.

use crate::algebra::Family;
use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

pub type IMat = Vec<Vec<i64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootKind {
    Compact,
    Noncompact,
}

#[derive(Clone, Debug, Serialize)]
pub struct Root {
    pub name: String,
    pub covector: Vec<i64>,
    pub kind: RootKind,
}

impl Root {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.covector.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
    }
}

/// Lattice in angle coordinates, generators in units of `2 pi`.
#[derive(Clone, Debug, Serialize)]
pub struct Lattice {
    pub name: String,
    #[serde(serialize_with = "ser_rational_rows")]
    pub generators: Vec<Vec<Rational64>>,
}

fn ser_rational_rows<S: serde::Serializer>(rows: &[Vec<Rational64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        let strs: Vec<String> = r.iter().map(|q| q.to_string()).collect();
        seq.serialize_element(&strs)?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylElement {
    pub matrix: IMat,
    pub inverse: IMat,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootDatum {
    pub family: Family,
    pub rank: usize,
    /// Positive noncompact roots, in the fixed label order.
    pub noncompact: Vec<Root>,
    /// Positive compact roots.
    pub compact: Vec<Root>,
    /// Angle coordinates of the central element `z` of `k`.
    pub z: Vec<f64>,
    pub weyl_generators: Vec<IMat>,
    pub weyl: Vec<WeylElement>,
    /// Lattice of points whose every root value lies in `2 pi Z`.
    pub integral: Lattice,
    pub presets: Vec<Lattice>,
    /// Name of the preset belonging to the defining matrix group.
    pub matrix_preset: String,
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn unit_rows(r_dim: usize) -> Vec<Vec<Rational64>> {
    (0..r_dim)
        .map(|i| (0..r_dim).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn mat_vec(a: &IMat, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| *p as f64 * q).sum()).collect()
}

pub fn mat_vec_rat(a: &IMat, x: &[Rational64]) -> Vec<Rational64> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(Rational64::zero(), |acc, (p, q)| acc + r(*p) * *q))
        .collect()
}

/// Row vector times matrix: `a . W`.
pub fn covec_mul(a: &[i64], w: &IMat) -> Vec<i64> {
    let n = w[0].len();
    (0..n).map(|j| a.iter().zip(w).map(|(ai, row)| ai * row[j]).sum()).collect()
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Close a finite matrix group under multiplication.
fn closure(gens: &[IMat], n: usize) -> Vec<IMat> {
    let mut seen: BTreeSet<IMat> = BTreeSet::new();
    let id = identity(n);
    let mut frontier = vec![id.clone()];
    seen.insert(id.clone());
    let mut order = vec![id];
    while let Some(g) = frontier.pop() {
        for s in gens {
            let h = mat_mul(s, &g);
            if seen.insert(h.clone()) {
                order.push(h.clone());
                frontier.push(h);
            }
        }
    }
    order
}

fn find_inverse(w: &IMat, all: &[IMat]) -> IMat {
    let id = identity(w.len());
    all.iter().find(|v| mat_mul(w, v) == id).cloned().expect("finite group")
}

/// Full permutation acting by `(w X)_k = X_{perm[k]}`.
fn perm_matrix(perm: &[usize]) -> IMat {
    let n = perm.len();
    (0..n).map(|k| (0..n).map(|j| i64::from(perm[k] == j)).collect()).collect()
}

/// Reduce an `su` full-coordinate matrix to the first `n - 1` coordinates.
fn su_reduce(full: &IMat) -> IMat {
    let n = full.len();
    let m = n - 1;
    // x_full = F x, F = [I; -1]
    (0..m)
        .map(|k| (0..m).map(|j| full[k][j] - full[k][n - 1]).collect())
        .collect()
}

fn su_reduce_covector(a: &[i64]) -> Vec<i64> {
    let n = a.len();
    (0..n - 1).map(|k| a[k] - a[n - 1]).collect()
}

fn su_reduce_vector(v: &[Rational64]) -> Vec<Rational64> {
    v[..v.len() - 1].to_vec()
}

impl RootDatum {
    pub fn build(family: Family) -> Result<RootDatum> {
        match family {
            Family::Sl2 => {
                let noncompact = vec![Root { name: "alpha".into(), covector: vec![1], kind: RootKind::Noncompact }];
                let weyl = vec![WeylElement { matrix: identity(1), inverse: identity(1) }];
                Ok(RootDatum {
                    family,
                    rank: 1,
                    noncompact,
                    compact: vec![],
                    z: vec![1.0],
                    weyl_generators: vec![],
                    weyl,
                    integral: Lattice { name: "integral".into(), generators: vec![vec![r(1)]] },
                    presets: vec![
                        Lattice { name: "universal".into(), generators: vec![] },
                        Lattice { name: "SL2".into(), generators: vec![vec![r(2)]] },
                        Lattice { name: "PSL2".into(), generators: vec![vec![r(1)]] },
                    ],
                    matrix_preset: "SL2".into(),
                })
            }
            Family::Sp { n } => {
                let e = |i: usize| -> Vec<i64> { (0..n).map(|k| i64::from(k == i)).collect() };
                let mut noncompact = Vec::new();
                for i in 0..n {
                    noncompact.push(Root {
                        name: format!("2e{}", i + 1),
                        covector: e(i).iter().map(|v| 2 * v).collect(),
                        kind: RootKind::Noncompact,
                    });
                }
                let mut compact = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        noncompact.push(Root {
                            name: format!("e{}+e{}", i + 1, j + 1),
                            covector: e(i).iter().zip(e(j)).map(|(a, b)| a + b).collect(),
                            kind: RootKind::Noncompact,
                        });
                        compact.push(Root {
                            name: format!("e{}-e{}", i + 1, j + 1),
                            covector: e(i).iter().zip(e(j)).map(|(a, b)| a - b).collect(),
                            kind: RootKind::Compact,
                        });
                    }
                }
                let gens: Vec<IMat> = (0..n.saturating_sub(1))
                    .map(|k| {
                        let mut p: Vec<usize> = (0..n).collect();
                        p.swap(k, k + 1);
                        perm_matrix(&p)
                    })
                    .collect();
                let all = closure(&gens, n);
                let weyl = all
                    .iter()
                    .map(|w| WeylElement { matrix: w.clone(), inverse: find_inverse(w, &all) })
                    .collect();
                let mut adj = unit_rows(n);
                adj.push(vec![Rational64::new(1, 2); n]);
                let universal = (0..n.saturating_sub(1))
                    .map(|k| (0..n).map(|j| r(i64::from(j == k) - i64::from(j == k + 1))).collect())
                    .collect();
                Ok(RootDatum {
                    family,
                    rank: n,
                    noncompact,
                    compact,
                    z: vec![0.5; n],
                    weyl_generators: gens,
                    weyl,
                    integral: Lattice { name: "integral".into(), generators: adj.clone() },
                    presets: vec![
                        Lattice { name: "universal".into(), generators: universal },
                        Lattice { name: "matrix".into(), generators: unit_rows(n) },
                        Lattice { name: "adjoint".into(), generators: adj },
                    ],
                    matrix_preset: "matrix".into(),
                })
            }
            Family::Su { p, q } => {
                let n = p + q;
                let full = |a: usize, b: usize| -> Vec<i64> {
                    (0..n).map(|k| i64::from(k == a) - i64::from(k == b)).collect()
                };
                let mut noncompact = Vec::new();
                for a in 0..p {
                    for b in p..n {
                        noncompact.push(Root {
                            name: format!("e{}-e{}", a + 1, b + 1),
                            covector: su_reduce_covector(&full(a, b)),
                            kind: RootKind::Noncompact,
                        });
                    }
                }
                let mut compact = Vec::new();
                for a in 0..n {
                    for b in (a + 1)..n {
                        if (a < p) == (b < p) {
                            compact.push(Root {
                                name: format!("e{}-e{}", a + 1, b + 1),
                                covector: su_reduce_covector(&full(a, b)),
                                kind: RootKind::Compact,
                            });
                        }
                    }
                }
                let mut gens = Vec::new();
                for k in 0..n - 1 {
                    if k + 1 != p {
                        let mut perm: Vec<usize> = (0..n).collect();
                        perm.swap(k, k + 1);
                        gens.push(su_reduce(&perm_matrix(&perm)));
                    }
                }
                let all = closure(&gens, n - 1);
                let weyl = all
                    .iter()
                    .map(|w| WeylElement { matrix: w.clone(), inverse: find_inverse(w, &all) })
                    .collect();
                let mut z = Vec::with_capacity(n - 1);
                for k in 0..n - 1 {
                    z.push(if k < p { q as f64 / n as f64 } else { -(p as f64) / n as f64 });
                }
                let mut integral = unit_rows(n - 1);
                integral.push(vec![Rational64::new(1, n as i64); n - 1]);
                let mut universal = Vec::new();
                for k in 0..n - 1 {
                    if k + 1 != p {
                        let v: Vec<Rational64> = full(k, k + 1).into_iter().map(r).collect();
                        universal.push(su_reduce_vector(&v));
                    }
                }
                Ok(RootDatum {
                    family,
                    rank: n - 1,
                    noncompact,
                    compact,
                    z,
                    weyl_generators: gens,
                    weyl,
                    integral: Lattice { name: "integral".into(), generators: integral.clone() },
                    presets: vec![
                        Lattice { name: "universal".into(), generators: universal },
                        Lattice { name: "matrix".into(), generators: unit_rows(n - 1) },
                        Lattice { name: "adjoint".into(), generators: integral },
                    ],
                    matrix_preset: "matrix".into(),
                })
            }
            Family::Heisenberg => Err(Error::Unsupported("the Heisenberg algebra has no root datum".into())),
        }
    }

    pub fn roots(&self) -> impl Iterator<Item = &Root> {
        self.noncompact.iter().chain(self.compact.iter())
    }

    /// Root values `i alpha(x)` over the positive noncompact roots.
    pub fn noncompact_values(&self, x: &[f64]) -> Vec<f64> {
        self.noncompact.iter().map(|a| a.value(x)).collect()
    }

    pub fn preset(&self, name: &str) -> Result<&Lattice> {
        let lname = name.to_ascii_lowercase();
        self.presets
            .iter()
            .find(|l| l.name.to_ascii_lowercase() == lname)
            .or_else(|| if lname == "integral" { Some(&self.integral) } else { None })
            .ok_or_else(|| Error::Invalid(format!("unknown lattice '{name}' for {}", self.family)))
    }

    pub fn matrix_lattice(&self) -> &Lattice {
        self.preset(&self.matrix_preset).expect("matrix preset exists")
    }

    /// Every root pairs integrally with every generator.
    pub fn is_integral(&self, lattice: &Lattice) -> bool {
        lattice.generators.iter().all(|g| {
            self.roots().all(|a| {
                let v = a.covector.iter().zip(g).fold(Rational64::zero(), |acc, (c, y)| acc + r(*c) * *y);
                v.is_integer()
            })
        })
    }

    /// Position of `alpha o w^-1` among the positive noncompact roots and its
    /// sign.
    pub fn permute_root(&self, w: &WeylElement, index: usize) -> (usize, i64) {
        let image = covec_mul(&self.noncompact[index].covector, &w.inverse);
        for (k, b) in self.noncompact.iter().enumerate() {
            if b.covector == image {
                return (k, 1);
            }
            let neg: Vec<i64> = b.covector.iter().map(|v| -v).collect();
            if neg == image {
                return (k, -1);
            }
        }
        panic!("Weyl group does not preserve the noncompact roots");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<Family> {
        vec![
            Family::Sl2,
            Family::Sp { n: 1 },
            Family::Sp { n: 2 },
            Family::Sp { n: 3 },
            Family::Su { p: 1, q: 1 },
            Family::Su { p: 2, q: 1 },
            Family::Su { p: 1, q: 2 },
            Family::Su { p: 2, q: 2 },
            Family::Su { p: 3, q: 1 },
        ]
    }

    #[test]
    fn z_takes_value_one_on_noncompact_roots() {
        for f in families() {
            let d = RootDatum::build(f).unwrap();
            for v in d.noncompact_values(&d.z) {
                assert!((v - 1.0).abs() < 1e-14, "{f}");
            }
            for a in &d.compact {
                assert!(a.value(&d.z).abs() < 1e-14, "{f}");
            }
        }
    }

    #[test]
    fn presets_are_integral() {
        for f in families() {
            let d = RootDatum::build(f).unwrap();
            assert!(d.is_integral(&d.integral));
            for l in &d.presets {
                assert!(d.is_integral(l), "{f} {}", l.name);
            }
        }
    }

    #[test]
    fn universal_sp_preset_has_zero_winding() {
        for n in 1..=3 {
            let d = RootDatum::build(Family::Sp { n }).unwrap();
            for g in &d.preset("universal").unwrap().generators {
                let w = g.iter().fold(Rational64::zero(), |a, b| a + b);
                assert!(w.is_zero());
            }
        }
    }

    #[test]
    fn weyl_orders() {
        let order = |f| RootDatum::build(f).unwrap().weyl.len();
        assert_eq!(order(Family::Sl2), 1);
        assert_eq!(order(Family::Sp { n: 2 }), 2);
        assert_eq!(order(Family::Sp { n: 3 }), 6);
        assert_eq!(order(Family::Su { p: 2, q: 1 }), 2);
        assert_eq!(order(Family::Su { p: 2, q: 2 }), 4);
        assert_eq!(order(Family::Su { p: 3, q: 1 }), 6);
    }

    #[test]
    fn weyl_group_preserves_noncompact_roots() {
        for f in families() {
            let d = RootDatum::build(f).unwrap();
            for w in &d.weyl {
                let mut hit = vec![false; d.noncompact.len()];
                for i in 0..d.noncompact.len() {
                    let (k, s) = d.permute_root(w, i);
                    assert_eq!(s, 1, "compact Weyl group maps positive noncompact roots to positive ones");
                    hit[k] = true;
                }
                assert!(hit.iter().all(|h| *h));
            }
        }
    }

    #[test]
    fn su21_root_covectors() {
        let d = RootDatum::build(Family::Su { p: 2, q: 1 }).unwrap();
        assert_eq!(d.noncompact[0].covector, vec![2, 1]);
        assert_eq!(d.noncompact[1].covector, vec![1, 2]);
    }
}
