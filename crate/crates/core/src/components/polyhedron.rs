//! Exact polyhedra given by integer inequalities.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

/// `coeffs . y < rhs` when strict, `<=` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ineq {
    pub coeffs: Vec<i128>,
    pub rhs: i128,
    pub strict: bool,
}

impl Ineq {
    fn normalized(mut self) -> Ineq {
        let mut g = self.rhs.abs();
        for c in &self.coeffs {
            g = g.gcd(&c.abs());
        }
        if g > 1 {
            for c in self.coeffs.iter_mut() {
                *c /= g;
            }
            self.rhs /= g;
        }
        self
    }
}

/// Fourier-Motzkin elimination of every variable; true when the system has a
/// real solution.
pub fn feasible(system: &[Ineq]) -> bool {
    if system.is_empty() {
        return true;
    }
    let nvars = system[0].coeffs.len();
    let mut cur: Vec<Ineq> = system.iter().cloned().map(Ineq::normalized).collect();
    for k in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for q in cur {
            match q.coeffs[k].signum() {
                1 => pos.push(q),
                -1 => neg.push(q),
                _ => rest.push(q),
            }
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[k];
                let b = -n.coeffs[k];
                let coeffs = p.coeffs.iter().zip(&n.coeffs).map(|(x, y)| b * x + a * y).collect();
                let q = Ineq { coeffs, rhs: b * p.rhs + a * n.rhs, strict: p.strict || n.strict }.normalized();
                rest.push(q);
            }
        }
        rest.sort();
        rest.dedup();
        // constant rows can be decided right away
        let mut next = Vec::with_capacity(rest.len());
        for q in rest {
            if q.coeffs.iter().all(|c| *c == 0) {
                let ok = if q.strict { 0 < q.rhs } else { 0 <= q.rhs };
                if !ok {
                    return false;
                }
            } else {
                next.push(q);
            }
        }
        cur = next;
    }
    true
}

fn solve(a: &[Vec<Rational64>], b: &[Rational64]) -> Option<Vec<Rational64>> {
    let n = b.len();
    let mut m: Vec<Vec<Rational64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for c in col..=n {
            m[col][c] /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in col..=n {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Vertices of the closure `{ y : coeffs . y <= rhs }`, by solving every
/// square subsystem exactly. Sorted lexicographically.
pub fn vertices(system: &[Ineq]) -> Vec<Vec<Rational64>> {
    if system.is_empty() {
        return vec![];
    }
    let r = system[0].coeffs.len();
    let mut idx = Vec::new();
    subsets(system.len(), r, 0, &mut Vec::new(), &mut idx);
    let rat = |v: i128| Rational64::from_integer(v as i64);
    let mut out: Vec<Vec<Rational64>> = Vec::new();
    for s in idx {
        let a: Vec<Vec<Rational64>> = s.iter().map(|&i| system[i].coeffs.iter().map(|&c| rat(c)).collect()).collect();
        let b: Vec<Rational64> = s.iter().map(|&i| rat(system[i].rhs)).collect();
        if let Some(y) = solve(&a, &b) {
            let inside = system.iter().all(|q| {
                let lhs = q.coeffs.iter().zip(&y).fold(Rational64::zero(), |acc, (c, v)| acc + rat(*c) * v);
                lhs <= rat(q.rhs)
            });
            if inside && !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out.sort();
    out
}

/// True when the closure is bounded in every direction (checked through the
/// recession cone `{ d : coeffs . d <= 0 }` being trivial).
pub fn bounded(system: &[Ineq]) -> bool {
    if system.is_empty() {
        return false;
    }
    let r = system[0].coeffs.len();
    for k in 0..r {
        for sign in [1i128, -1] {
            let mut rec: Vec<Ineq> =
                system.iter().map(|q| Ineq { coeffs: q.coeffs.clone(), rhs: 0, strict: false }).collect();
            let mut c = vec![0i128; r];
            c[k] = -sign;
            rec.push(Ineq { coeffs: c, rhs: -1, strict: false });
            if feasible(&rec) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iq(c: &[i128], rhs: i128, strict: bool) -> Ineq {
        Ineq { coeffs: c.to_vec(), rhs, strict }
    }

    #[test]
    fn strictness_matters() {
        // 0 < y < 0 is empty, 0 <= y <= 0 is not
        assert!(!feasible(&[iq(&[-1], 0, true), iq(&[1], 0, true)]));
        assert!(feasible(&[iq(&[-1], 0, false), iq(&[1], 0, false)]));
    }

    #[test]
    fn triangle_vertices() {
        let sys = [iq(&[-1, 0], 0, false), iq(&[0, -1], 0, false), iq(&[1, 1], 1, false)];
        let v = vertices(&sys);
        assert_eq!(v.len(), 3);
        assert!(bounded(&sys));
        assert!(!bounded(&sys[..2]));
    }
}
