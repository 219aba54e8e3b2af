//! Matrix Lie algebras, their elements and group elements.

mod family;
pub mod jordan;

pub use family::{indefinite_form, symplectic_form, Family};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat, RVec};
use crate::structure::RootDatum;
use crate::tol::{scale, Tolerances};
use std::sync::{Arc, OnceLock};

/// Shared descriptor of a realized Lie algebra.
pub type Algebra = Arc<LieAlgebra>;

#[derive(Debug)]
pub struct LieAlgebra {
    family: Family,
    basis: Vec<CMat>,
    torus_dim: usize,
    k_dim: usize,
    solver: RMat,
    stacked: RMat,
    structure: Vec<f64>,
    theta: Option<RMat>,
    tol: Tolerances,
    datum: OnceLock<std::result::Result<RootDatum, Error>>,
}

fn vectorize(m: &CMat) -> RVec {
    let n = m.len();
    let mut v = RVec::zeros(2 * n);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[n + k] = z.im;
    }
    v
}

impl LieAlgebra {
    pub fn new(family: Family) -> Algebra {
        Self::with_tolerances(family, Tolerances::default())
    }

    pub fn with_tolerances(family: Family, tol: Tolerances) -> Algebra {
        let (basis, torus_dim, k_dim) = family::basis(family);
        let d = basis.len();
        let n = family.matrix_size();
        let mut stacked = RMat::zeros(2 * n * n, d);
        for (j, b) in basis.iter().enumerate() {
            stacked.set_column(j, &vectorize(b));
        }
        let solver = linalg::pseudo_inverse(&stacked);
        let mut alg = LieAlgebra {
            family,
            basis,
            torus_dim,
            k_dim,
            solver,
            stacked,
            structure: vec![0.0; d * d * d],
            theta: None,
            tol,
            datum: OnceLock::new(),
        };
        for i in 0..d {
            for j in 0..d {
                let br = &alg.basis[i] * &alg.basis[j] - &alg.basis[j] * &alg.basis[i];
                let co = &alg.solver * vectorize(&br);
                for k in 0..d {
                    alg.structure[(i * d + j) * d + k] = co[k];
                }
            }
        }
        if family.is_hermitian_type() {
            let mut th = RMat::zeros(d, d);
            for i in 0..d {
                th[(i, i)] = if i < k_dim { 1.0 } else { -1.0 };
            }
            alg.theta = Some(th);
        }
        Arc::new(alg)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.family.matrix_size()
    }

    pub fn rank(&self) -> usize {
        self.torus_dim
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Structure constant `c_{ij}^k` with `[b_i, b_j] = sum_k c_{ij}^k b_k`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim();
        self.structure[(i * d + j) * d + k]
    }

    /// Matrix of the Cartan involution on coordinates.
    pub fn cartan_involution(&self) -> Option<&RMat> {
        self.theta.as_ref()
    }

    pub fn root_datum(&self) -> Result<&RootDatum> {
        self.datum
            .get_or_init(|| RootDatum::build(self.family))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Solve for coordinates; returns the coordinates and the residual.
    pub fn coordinates(&self, m: &CMat) -> Result<(RVec, f64)> {
        let n = self.matrix_size();
        if m.shape() != (n, n) {
            return Err(Error::Invalid(format!("expected a {n}x{n} matrix")));
        }
        let v = vectorize(m);
        let co = &self.solver * &v;
        let res = (&self.stacked * &co - &v).norm();
        Ok((co, res))
    }

    pub fn matrix_of(&self, coords: &RVec) -> CMat {
        let n = self.matrix_size();
        let mut m = CMat::zeros(n, n);
        for (x, b) in coords.iter().zip(&self.basis) {
            if *x != 0.0 {
                m += b * c(*x, 0.0);
            }
        }
        m
    }

    /// Ad-matrix of coordinates `x`: column `j` holds the coordinates of
    /// `[x, b_j]`.
    pub fn ad_coords(&self, x: &RVec) -> RMat {
        let d = self.dim();
        let mut a = RMat::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    a[(k, j)] += x[i] * self.structure[(i * d + j) * d + k];
                }
            }
        }
        a
    }

    /// Symplectic form (for `sl2` and `sp`) or hermitian form (for `su`)
    /// preserved by the group.
    pub fn invariant_form(&self) -> Option<CMat> {
        match self.family {
            Family::Sl2 => Some(symplectic_form(1)),
            Family::Sp { n } => Some(symplectic_form(n)),
            Family::Su { p, q } => Some(indefinite_form(p, q)),
            Family::Heisenberg => None,
        }
    }

    /// Torus element with the given angle coordinates.
    pub fn torus(self: &Arc<Self>, angles: &[f64]) -> Result<AlgebraElement> {
        if angles.len() != self.torus_dim {
            return Err(Error::Invalid(format!(
                "expected {} angle coordinates, got {}",
                self.torus_dim,
                angles.len()
            )));
        }
        let mut co = RVec::zeros(self.dim());
        for (k, a) in angles.iter().enumerate() {
            co[k] = *a;
        }
        Ok(AlgebraElement::from_coords(self, co))
    }

    pub fn is_same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other)
    }
}

/// Element of a Lie algebra in coordinates, with its matrix cached.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alg: Algebra,
    coords: RVec,
    matrix: CMat,
}

impl AlgebraElement {
    pub fn from_coords(alg: &Algebra, coords: RVec) -> Self {
        assert_eq!(coords.len(), alg.dim(), "coordinate length");
        let matrix = alg.matrix_of(&coords);
        AlgebraElement { alg: alg.clone(), coords, matrix }
    }

    pub fn from_slice(alg: &Algebra, coords: &[f64]) -> Result<Self> {
        if coords.len() != alg.dim() {
            return Err(Error::Invalid(format!("expected {} coordinates", alg.dim())));
        }
        Ok(Self::from_coords(alg, RVec::from_column_slice(coords)))
    }

    pub fn from_matrix(alg: &Algebra, m: &CMat) -> Result<Self> {
        let (co, res) = alg.coordinates(m)?;
        let tol = alg.tol.coordinate_residual * scale(m.norm());
        if res > tol {
            return Err(Error::NotInAlgebra { residual: res });
        }
        Ok(Self::from_coords(alg, co))
    }

    pub fn zero(alg: &Algebra) -> Self {
        Self::from_coords(alg, RVec::zeros(alg.dim()))
    }

    pub fn basis_element(alg: &Algebra, i: usize) -> Self {
        let mut co = RVec::zeros(alg.dim());
        co[i] = 1.0;
        Self::from_coords(alg, co)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn coords(&self) -> &RVec {
        &self.coords
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_coords(&self.alg, &self.coords + &other.coords))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_coords(&self.alg, &self.coords - &other.coords))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coords(&self.alg, &self.coords * s)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Lie bracket from the matrix commutator.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        let (co, res) = self.alg.coordinates(&m)?;
        let bound = 1e-10 * scale(self.norm() * other.norm());
        if res > bound {
            return Err(Error::NotInAlgebra { residual: res });
        }
        Ok(Self::from_coords(&self.alg, co))
    }

    pub fn ad(&self) -> RMat {
        self.alg.ad_coords(&self.coords)
    }

    pub fn killing(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        Ok((self.ad() * other.ad()).trace())
    }

    pub fn cartan(&self) -> Result<Self> {
        let th = self
            .alg
            .theta
            .as_ref()
            .ok_or_else(|| Error::Unsupported("no Cartan involution".into()))?;
        Ok(Self::from_coords(&self.alg, th * &self.coords))
    }

    /// Components in `k` and `p`.
    pub fn cartan_parts(&self) -> Result<(Self, Self)> {
        if self.alg.theta.is_none() {
            return Err(Error::Unsupported("no Cartan involution".into()));
        }
        let kd = self.alg.k_dim;
        let mut k = self.coords.clone();
        let mut p = self.coords.clone();
        for i in 0..self.alg.dim() {
            if i < kd {
                p[i] = 0.0;
            } else {
                k[i] = 0.0;
            }
        }
        Ok((Self::from_coords(&self.alg, k), Self::from_coords(&self.alg, p)))
    }

    pub fn exp(&self) -> GroupElement {
        GroupElement { alg: self.alg.clone(), matrix: linalg::expm(&self.matrix) }
    }

    /// `Ad(g) x = g x g^-1`.
    pub fn conjugate(&self, g: &GroupElement) -> Result<Self> {
        if !Arc::ptr_eq(&self.alg, &g.alg) {
            return Err(Error::DescriptorMismatch);
        }
        let inv = g.inverse_matrix()?;
        Self::from_matrix(&self.alg, &(&g.matrix * &self.matrix * inv))
    }

    /// Angle coordinates if the element lies in the torus.
    pub fn torus_coords(&self) -> Option<Vec<f64>> {
        let r = self.alg.torus_dim;
        let off = self.coords.iter().skip(r).map(|x| x * x).sum::<f64>().sqrt();
        if off <= self.alg.tol.coordinate_residual * scale(self.norm()) {
            Some(self.coords.iter().take(r).cloned().collect())
        } else {
            None
        }
    }
}

/// Element of the matrix group.
#[derive(Clone, Debug)]
pub struct GroupElement {
    alg: Algebra,
    matrix: CMat,
}

impl GroupElement {
    pub fn identity(alg: &Algebra) -> Self {
        let n = alg.matrix_size();
        GroupElement { alg: alg.clone(), matrix: CMat::identity(n, n) }
    }

    /// Validate the defining relations of the group.
    pub fn from_matrix(alg: &Algebra, m: &CMat) -> Result<Self> {
        let n = alg.matrix_size();
        if m.shape() != (n, n) {
            return Err(Error::Invalid(format!("expected a {n}x{n} matrix")));
        }
        let res = relation_residual(alg.family, m);
        if res > alg.tol.group_relation * scale(m.norm()).powi(2) {
            return Err(Error::GroupRelation { residual: res });
        }
        Ok(GroupElement { alg: alg.clone(), matrix: m.clone() })
    }

    pub(crate) fn from_matrix_unchecked(alg: &Algebra, m: CMat) -> Self {
        GroupElement { alg: alg.clone(), matrix: m }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.alg, &other.alg) {
            return Err(Error::DescriptorMismatch);
        }
        Ok(GroupElement { alg: self.alg.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub(crate) fn inverse_matrix(&self) -> Result<CMat> {
        match self.alg.family.symplectic_n() {
            Some(n) => {
                let j = symplectic_form(n);
                // g^-1 = -J g^T J
                Ok(-(&j * self.matrix.transpose() * &j))
            }
            None => match self.alg.family {
                Family::Su { p, q } => {
                    let h = indefinite_form(p, q);
                    Ok(&h * self.matrix.adjoint() * &h)
                }
                _ => linalg::inverse(&self.matrix)
                    .ok_or_else(|| Error::IllConditioned("singular matrix".into())),
            },
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GroupElement { alg: self.alg.clone(), matrix: self.inverse_matrix()? })
    }

    /// `h g h^-1`.
    pub fn conjugate_by(&self, h: &GroupElement) -> Result<Self> {
        let hi = h.inverse()?;
        h.mul(self)?.mul(&hi)
    }

    /// Matrix of `Ad(g)` on coordinates.
    pub fn adjoint(&self) -> Result<RMat> {
        let inv = self.inverse_matrix()?;
        let d = self.alg.dim();
        let mut out = RMat::zeros(d, d);
        let bound = self.alg.tol.coordinate_residual * scale(self.matrix.norm()).powi(2);
        for j in 0..d {
            let m = &self.matrix * &self.alg.basis[j] * &inv;
            let (co, res) = self.alg.coordinates(&m)?;
            if res > bound {
                return Err(Error::NotInAlgebra { residual: res });
            }
            out.set_column(j, &co);
        }
        Ok(out)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

/// Residual of the defining relations of the family.
pub fn relation_residual(family: Family, m: &CMat) -> f64 {
    let n = m.nrows();
    match family {
        Family::Sl2 => linalg::imag_norm(m) + (m.determinant() - c(1.0, 0.0)).norm(),
        Family::Sp { n: h } => {
            let j = symplectic_form(h);
            linalg::imag_norm(m) + (m.transpose() * &j * m - &j).norm()
        }
        Family::Su { p, q } => {
            let h = indefinite_form(p, q);
            (m.adjoint() * &h * m - &h).norm() + (m.determinant() - c(1.0, 0.0)).norm()
        }
        Family::Heisenberg => {
            let mut r = 0.0;
            for i in 0..n {
                for j in 0..=i {
                    let target = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                    r += (m[(i, j)] - target).norm_sqr();
                }
                for j in 0..n {
                    r += m[(i, j)].im * m[(i, j)].im;
                }
            }
            r.sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_families() -> Vec<Family> {
        vec![
            Family::Sl2,
            Family::Sp { n: 1 },
            Family::Sp { n: 2 },
            Family::Sp { n: 3 },
            Family::Su { p: 1, q: 1 },
            Family::Su { p: 2, q: 1 },
            Family::Su { p: 2, q: 2 },
            Family::Su { p: 1, q: 3 },
        ]
    }

    #[test]
    fn basis_lies_in_algebra_and_is_independent() {
        for f in all_families() {
            let alg = LieAlgebra::new(f);
            let n = alg.matrix_size();
            for b in alg.basis() {
                assert!((b.trace()).norm() < 1e-14);
                match f.symplectic_n() {
                    Some(h) => {
                        let j = symplectic_form(h);
                        assert!((b.transpose() * &j + &j * b).norm() < 1e-14);
                    }
                    None => {
                        if let Family::Su { p, q } = f {
                            let h = indefinite_form(p, q);
                            assert!((b.adjoint() * &h + &h * b).norm() < 1e-14);
                        }
                    }
                }
                assert_eq!(b.nrows(), n);
            }
            let sv = alg.stacked.clone().svd(false, false).singular_values;
            assert!(sv.iter().cloned().fold(f64::INFINITY, f64::min) > 0.1, "{f}");
        }
    }

    #[test]
    fn cartan_involution_matches_matrix_formula() {
        for f in all_families() {
            let alg = LieAlgebra::new(f);
            for i in 0..alg.dim() {
                let x = AlgebraElement::basis_element(&alg, i);
                let th = x.cartan().unwrap();
                let expected = match f {
                    Family::Su { p, q } => {
                        let h = indefinite_form(p, q);
                        &h * x.matrix() * &h
                    }
                    _ => -x.matrix().transpose(),
                };
                assert!((th.matrix() - expected).norm() < 1e-13, "{f} basis {i}");
            }
        }
    }

    #[test]
    fn structure_constants_reproduce_brackets() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let x = AlgebraElement::from_coords(&alg, RVec::from_fn(10, |i, _| (i as f64 * 0.37).sin()));
        let y = AlgebraElement::from_coords(&alg, RVec::from_fn(10, |i, _| (i as f64 * 1.1).cos()));
        let viaad = &x.ad() * y.coords();
        let br = x.bracket(&y).unwrap();
        assert!((viaad - br.coords()).norm() < 1e-12);
    }

    #[test]
    fn sl2_torus_is_rotation() {
        let alg = LieAlgebra::new(Family::Sl2);
        let t = 1.3;
        let g = alg.torus(&[t]).unwrap().exp();
        let m = g.matrix();
        assert!((m[(0, 0)].re - (t / 2.0).cos()).abs() < 1e-14);
        assert!((m[(0, 1)].re - (t / 2.0).sin()).abs() < 1e-14);
        assert!((m[(1, 0)].re + (t / 2.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn mismatched_descriptors_are_rejected() {
        let a = LieAlgebra::new(Family::Sl2);
        let b = LieAlgebra::new(Family::Sl2);
        let x = AlgebraElement::zero(&a);
        let y = AlgebraElement::zero(&b);
        assert_eq!(x.add(&y).unwrap_err(), Error::DescriptorMismatch);
        assert_eq!(x.bracket(&y).unwrap_err(), Error::DescriptorMismatch);
    }

    #[test]
    fn from_matrix_rejects_outside_points() {
        let alg = LieAlgebra::new(Family::Sp { n: 2 });
        let mut m = CMat::identity(4, 4);
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(AlgebraElement::from_matrix(&alg, &m), Err(Error::NotInAlgebra { .. })));
        assert!(matches!(GroupElement::from_matrix(&alg, &m), Err(Error::GroupRelation { .. })));
    }
}
