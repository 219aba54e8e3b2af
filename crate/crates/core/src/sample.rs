//! Random elements for tests, demos and the self-test harness.

use crate::algebra::{Algebra, AlgebraElement, GroupElement};
use crate::linalg::RVec;
use rand::Rng;
use rand_distr::StandardNormal;

/// Algebra element with independent standard normal coordinates times `s`.
pub fn gaussian<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R, s: f64) -> AlgebraElement {
    let co = RVec::from_fn(alg.dim(), |_, _| s * rng.sample::<f64, _>(StandardNormal));
    AlgebraElement::from_coords(alg, co)
}

/// Random unit direction in `p` (Frobenius norm of the matrix equal to 1).
pub fn p_direction<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R) -> AlgebraElement {
    let k = alg.k_dim();
    let co = RVec::from_fn(alg.dim(), |i, _| if i < k { 0.0 } else { rng.sample::<f64, _>(StandardNormal) });
    let x = AlgebraElement::from_coords(alg, co);
    let n = x.norm();
    x.scale(1.0 / n)
}

/// `exp(y)` for `y` in `p` with matrix norm uniform in `[0, max_norm]`.
pub fn hyperbolic<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R, max_norm: f64) -> GroupElement {
    let s = rng.random_range(0.0..=max_norm);
    p_direction(alg, rng).scale(s).exp()
}

/// Random element of `K` as the exponential of a random `k` element.
pub fn compact<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R, s: f64) -> GroupElement {
    let k = alg.k_dim();
    let co = RVec::from_fn(alg.dim(), |i, _| if i < k { s * rng.sample::<f64, _>(StandardNormal) } else { 0.0 });
    AlgebraElement::from_coords(alg, co).exp()
}

/// Random group element `exp(k) exp(y)`.
pub fn group<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R, max_norm: f64) -> GroupElement {
    let c = compact(alg, rng, 1.0);
    let h = hyperbolic(alg, rng, max_norm);
    c.mul(&h).expect("same algebra")
}

/// Uniform angles in `[lo, hi)`.
pub fn angles<R: Rng + ?Sized>(rng: &mut R, rank: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..rank).map(|_| rng.random_range(lo..hi)).collect()
}
