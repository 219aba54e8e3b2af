//! Eigenvalue clustering, eigenspaces and indefinite-form splittings.
//!
//! Eigenvalues come from the complex Schur form. Eigenvalues closer than the
//! cluster radius are grouped first. Two clusters are then merged when their
//! eigenvectors are nearly parallel relative to their distance, which is the
//! signature of a split Jordan block rather than two genuine eigenvalues.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::tol::{scale, Tolerances};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug)]
pub struct Cluster {
    pub center: Complex64,
    pub members: Vec<usize>,
    pub spread: f64,
    /// Orthonormal basis of the numerical eigenspace, at most `members.len()`
    /// columns.
    pub eigvecs: CMat,
}

impl Cluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    pub fn geometric(&self) -> usize {
        self.eigvecs.ncols()
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub clusters: Vec<Cluster>,
    pub scale: f64,
}

/// Rounding at relative size `u` splits a Jordan block of size `m` by about
/// `u^(1/m)`; splits larger than this bound are treated as genuine.
const SPLIT_FLOOR: f64 = 1e-10;

fn split_radius(m: usize, s: f64) -> f64 {
    s * SPLIT_FLOOR.powf(1.0 / m as f64)
}

/// On the invariant subspace of a split Jordan block of size `m` around
/// `mu`, `((a - mu) / s)^m` is at rounding level; distinct eigenvalues at
/// relative distance `r` leave about `r^m`.
fn jordan_like(a: &CMat, clusters: &[Cluster], i: usize, j: usize, s: f64) -> bool {
    let n = a.nrows();
    let id = CMat::identity(n, n);
    let (x, y) = (&clusters[i], &clusters[j]);
    let m = x.multiplicity() + y.multiplicity();
    let mu = (x.center * c(x.multiplicity() as f64, 0.0) + y.center * c(y.multiplicity() as f64, 0.0))
        / c(m as f64, 0.0);
    let mut p = id.clone();
    for (k, other) in clusters.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        let f = (a - &id * other.center) / c(s, 0.0);
        for _ in 0..other.multiplicity() {
            p = &f * p;
            let nrm = p.norm();
            if nrm > 0.0 {
                p /= c(nrm, 0.0);
            }
        }
    }
    let v = linalg::dominant_range(&p, m).0;
    let f = v.adjoint() * (a - &id * mu) * &v / c(s, 0.0);
    let mut q = f.clone();
    for _ in 1..m {
        q = &f * q;
    }
    q.norm() <= m as f64 * SPLIT_FLOOR
}

fn eigenspace(a: &CMat, center: Complex64, mult: usize, spread: f64, s: f64, tol: &Tolerances) -> CMat {
    let n = a.nrows();
    let shifted = a - CMat::identity(n, n) * center;
    let rank_tol = (tol.rank * s).max(10.0 * spread);
    let ns = linalg::null_space(&shifted, rank_tol);
    if ns.ncols() > mult {
        ns.columns(ns.ncols() - mult, mult).into_owned()
    } else {
        ns
    }
}

fn make_cluster(a: &CMat, vals: &[Complex64], members: Vec<usize>, s: f64, tol: &Tolerances) -> Cluster {
    let m = members.len() as f64;
    let center = members.iter().map(|&i| vals[i]).sum::<Complex64>() / c(m, 0.0);
    let spread = members.iter().map(|&i| (vals[i] - center).norm()).fold(0.0, f64::max);
    let eigvecs = eigenspace(a, center, members.len(), spread, s, tol);
    Cluster { center, members, spread, eigvecs }
}

impl Spectrum {
    pub fn analyze(a: &CMat, tol: &Tolerances) -> Spectrum {
        let n = a.nrows();
        let s = scale(a.norm() / (n.max(1) as f64).sqrt());
        let vals = linalg::eigenvalues(a);
        let radius = tol.cluster_radius * s;

        // single linkage at the tight radius
        let mut label: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if (vals[i] - vals[j]).norm() <= radius {
                    let (li, lj) = (label[i], label[j]);
                    if li != lj {
                        for l in label.iter_mut() {
                            if *l == lj {
                                *l = li;
                            }
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            match groups.iter_mut().find(|g| label[g[0]] == label[i]) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        let mut clusters: Vec<Cluster> =
            groups.into_iter().map(|g| make_cluster(a, &vals, g, s, tol)).collect();

        // merge pieces of split Jordan blocks; rounding splits a block into
        // simple or defective fragments, never into full eigenspaces
        let mut merged = vec![false; clusters.len()];
        let fragment = |cl: &Cluster, was_merged: bool| {
            was_merged || cl.multiplicity() == 1 || cl.geometric() < cl.multiplicity()
        };
        loop {
            let mut best: Option<(usize, usize, f64)> = None;
            for i in 0..clusters.len() {
                for j in (i + 1)..clusters.len() {
                    let d = (clusters[i].center - clusters[j].center).norm();
                    let mid = (clusters[i].center + clusters[j].center) * 0.5;
                    let ring = vals.iter().filter(|z| (*z - mid).norm() <= 1.5 * d).count();
                    if d > split_radius(ring, s) {
                        continue;
                    }
                    if !fragment(&clusters[i], merged[i]) && !fragment(&clusters[j], merged[j]) {
                        continue;
                    }
                    let deficient = clusters[i].geometric() == 0 || clusters[j].geometric() == 0;
                    let sine = linalg::min_principal_sine(&clusters[i].eigvecs, &clusters[j].eigvecs);
                    if deficient || (sine < (d / s).sqrt() && jordan_like(a, &clusters, i, j, s)) {
                        if best.map_or(true, |(_, _, bd)| d < bd) {
                            best = Some((i, j, d));
                        }
                    }
                }
            }
            match best {
                Some((i, j, _)) => {
                    let cj = clusters.remove(j);
                    merged.remove(j);
                    merged[i] = true;
                    let mut members = clusters[i].members.clone();
                    members.extend(cj.members);
                    clusters[i] = make_cluster(a, &vals, members, s, tol);
                }
                None => break,
            }
        }
        Spectrum { eigenvalues: vals, clusters, scale: s }
    }

    pub fn is_semisimple(&self) -> bool {
        self.clusters.iter().all(|c| c.geometric() == c.multiplicity())
    }

    /// Bases of the generalized eigenspaces, one per cluster, computed as the
    /// range of the product of the other clusters' annihilating factors.
    pub fn generalized_bases(&self, a: &CMat) -> Vec<CMat> {
        let n = a.nrows();
        let id = CMat::identity(n, n);
        let s = self.scale;
        self.clusters
            .iter()
            .enumerate()
            .map(|(ci, cl)| {
                if self.clusters.len() == 1 {
                    return id.clone();
                }
                if cl.geometric() == cl.multiplicity() {
                    return cl.eigvecs.clone();
                }
                let mut p = id.clone();
                for (cj, other) in self.clusters.iter().enumerate() {
                    if cj == ci {
                        continue;
                    }
                    let f = (a - &id * other.center) / c(s, 0.0);
                    for _ in 0..other.multiplicity() {
                        p = &f * p;
                        let nrm = p.norm();
                        if nrm > 0.0 {
                            p /= c(nrm, 0.0);
                        }
                    }
                }
                linalg::dominant_range(&p, cl.multiplicity()).0
            })
            .collect()
    }
}

/// What the eigenvalues of the operator represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleMode {
    /// Eigenvalues `e^{i phi}` of a group element.
    Group,
    /// Eigenvalues `i a` of a compact algebra element.
    Algebra,
}

impl AngleMode {
    fn angle(self, z: Complex64) -> f64 {
        match self {
            AngleMode::Group => linalg::arg_2pi(z),
            AngleMode::Algebra => z.im,
        }
    }

    fn conj_angle(self, z: Complex64) -> f64 {
        match self {
            AngleMode::Group => TAU - linalg::arg_2pi(z),
            AngleMode::Algebra => -z.im,
        }
    }

    fn real_angle(self, z: Complex64) -> f64 {
        match self {
            AngleMode::Group if z.re < 0.0 => PI,
            _ => 0.0,
        }
    }
}

/// Angles and Krein-positive eigenvectors of an operator preserving the
/// symplectic form `J`, normalized so that `i v* J v = 2`.
pub struct KreinFrame {
    pub angles: Vec<f64>,
    pub vectors: CMat,
}

pub fn symplectic_krein_frame(
    a: &CMat,
    spec: &Spectrum,
    j: &CMat,
    mode: AngleMode,
    tol: &Tolerances,
) -> Result<KreinFrame> {
    let dim = a.nrows();
    let n = dim / 2;
    let form = j * linalg::I;
    let im_tol = tol.cluster_radius * spec.scale;
    let mut angles = Vec::with_capacity(n);
    let mut vecs: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(n);
    let floor = tol.rank.sqrt();
    for cl in &spec.clusters {
        if cl.geometric() != cl.multiplicity() {
            return Err(Error::NotElliptic);
        }
        let im = cl.center.im;
        if im < -im_tol {
            continue;
        }
        let e = &cl.eigvecs;
        if im <= im_tol {
            let r = linalg::to_complex(&linalg::real_span(e, e.ncols()));
            let h = r.transpose() * &form * &r;
            let (vals, u) = linalg::hermitian_eigen(&h);
            for (k, &lam) in vals.iter().enumerate() {
                if lam.abs() < floor {
                    return Err(Error::BoundaryUnstable("null Krein vector".into()));
                }
                if lam > 0.0 {
                    let w = &r * u.column(k);
                    angles.push(mode.real_angle(cl.center));
                    vecs.push(w);
                }
            }
        } else {
            let h = e.adjoint() * &form * e;
            let (vals, u) = linalg::hermitian_eigen(&h);
            for (k, &lam) in vals.iter().enumerate() {
                if lam.abs() < floor {
                    return Err(Error::BoundaryUnstable("null Krein vector".into()));
                }
                let w = e * u.column(k);
                if lam > 0.0 {
                    angles.push(mode.angle(cl.center));
                    vecs.push(w);
                } else {
                    angles.push(mode.conj_angle(cl.center));
                    vecs.push(w.map(|z| z.conj()));
                }
            }
        }
    }
    if vecs.len() != n {
        return Err(Error::BoundaryUnstable(format!(
            "found {} Krein-positive directions, expected {n}",
            vecs.len()
        )));
    }
    let mut cols = CMat::zeros(dim, n);
    for (k, w) in vecs.iter().enumerate() {
        let kappa = (w.adjoint() * &form * w)[(0, 0)].re;
        cols.set_column(k, &(w * c((2.0 / kappa).sqrt(), 0.0)));
    }
    Ok(KreinFrame { angles, vectors: cols })
}

/// Angles of an operator preserving the hermitian form `ipq`, split by the
/// sign of the form. Group angles are `-arg(mu)`, algebra angles `-Im(lambda)`.
pub struct HermitianFrame {
    pub positive: Vec<(f64, nalgebra::DVector<Complex64>)>,
    pub negative: Vec<(f64, nalgebra::DVector<Complex64>)>,
}

pub fn hermitian_split_frame(
    spec: &Spectrum,
    ipq: &CMat,
    mode: AngleMode,
    tol: &Tolerances,
) -> Result<HermitianFrame> {
    let floor = tol.rank.sqrt();
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for cl in &spec.clusters {
        if cl.geometric() != cl.multiplicity() {
            return Err(Error::NotElliptic);
        }
        let e = &cl.eigvecs;
        let h = e.adjoint() * ipq * e;
        let (vals, u) = linalg::hermitian_eigen(&h);
        let angle = match mode {
            AngleMode::Group => linalg::mod_2pi(-cl.center.arg()),
            AngleMode::Algebra => -cl.center.im,
        };
        for (k, &lam) in vals.iter().enumerate() {
            if lam.abs() < floor {
                return Err(Error::BoundaryUnstable("null vector of the hermitian form".into()));
            }
            let w = e * u.column(k);
            let hw = (w.adjoint() * ipq * &w)[(0, 0)].re;
            let w = w * c(1.0 / hw.abs().sqrt(), 0.0);
            if lam > 0.0 {
                positive.push((angle, w));
            } else {
                negative.push((angle, w));
            }
        }
    }
    Ok(HermitianFrame { positive, negative })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(n: usize, vals: &[f64]) -> CMat {
        CMat::from_row_slice(n, n, &vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn jordan_block_is_not_semisimple() {
        let a = cm(2, &[0.0, 1.0, 0.0, 0.0]);
        let s = Spectrum::analyze(&a, &Tolerances::default());
        assert!(!s.is_semisimple());
    }

    #[test]
    fn conjugated_jordan_block_merges() {
        let n = cm(3, &[2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0]);
        let p = cm(3, &[1.0, 0.3, -0.2, 0.5, 1.0, 0.1, 0.2, -0.7, 1.0]);
        let a = &p * n * p.clone().try_inverse().unwrap();
        let s = Spectrum::analyze(&a, &Tolerances::default());
        assert_eq!(s.clusters.len(), 1);
        assert!(!s.is_semisimple());
    }

    #[test]
    fn close_semisimple_eigenvalues_stay_apart() {
        let a = cm(2, &[1.0, 0.0, 0.0, 1.0 + 1e-6]);
        let s = Spectrum::analyze(&a, &Tolerances::default());
        assert_eq!(s.clusters.len(), 2);
        assert!(s.is_semisimple());
    }

    #[test]
    fn identity_is_one_semisimple_cluster() {
        let a = CMat::identity(4, 4);
        let s = Spectrum::analyze(&a, &Tolerances::default());
        assert_eq!(s.clusters.len(), 1);
        assert!(s.is_semisimple());
    }
}
