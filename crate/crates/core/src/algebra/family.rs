use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The matrix families the crate realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Sl2,
    Sp { n: usize },
    Su { p: usize, q: usize },
    /// Three-dimensional Heisenberg algebra. Only the diagnostics accept it.
    Heisenberg,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Sl2 => write!(f, "sl2"),
            Family::Sp { n } => write!(f, "sp{}", 2 * n),
            Family::Su { p, q } => write!(f, "su({p},{q})"),
            Family::Heisenberg => write!(f, "heisenberg"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.replace(' ', "");
        if t == "sl2" || t == "sl(2,r)" || t == "sl2r" {
            return Ok(Family::Sl2);
        }
        if t == "heisenberg" || t == "heis" {
            return Ok(Family::Heisenberg);
        }
        if let Some(rest) = t.strip_prefix("sp") {
            let rest = rest.trim_start_matches('(').trim_end_matches(",r)").trim_end_matches(')');
            if let Ok(m) = rest.parse::<usize>() {
                if m >= 2 && m % 2 == 0 {
                    return Ok(Family::Sp { n: m / 2 });
                }
            }
        }
        if let Some(rest) = t.strip_prefix("su") {
            let rest = rest.trim_start_matches('(').trim_end_matches(')');
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() == 2 {
                if let (Ok(p), Ok(q)) = (parts[0].parse(), parts[1].parse()) {
                    if p >= 1 && q >= 1 {
                        return Ok(Family::Su { p, q });
                    }
                }
            }
        }
        Err(Error::Invalid(format!("unknown group '{s}'")))
    }
}

impl Family {
    pub fn matrix_size(&self) -> usize {
        match *self {
            Family::Sl2 => 2,
            Family::Sp { n } => 2 * n,
            Family::Su { p, q } => p + q,
            Family::Heisenberg => 3,
        }
    }

    /// Number of angle coordinates of the compact torus.
    pub fn rank(&self) -> usize {
        match *self {
            Family::Sl2 => 1,
            Family::Sp { n } => n,
            Family::Su { p, q } => p + q - 1,
            Family::Heisenberg => 0,
        }
    }

    /// Half the real dimension of the symplectic space, for the families
    /// realized by real symplectic matrices.
    pub fn symplectic_n(&self) -> Option<usize> {
        match *self {
            Family::Sl2 => Some(1),
            Family::Sp { n } => Some(n),
            _ => None,
        }
    }

    pub fn is_hermitian_type(&self) -> bool {
        !matches!(self, Family::Heisenberg)
    }
}

fn unit(n: usize, i: usize, j: usize, v: f64) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = c(v, 0.0);
    m
}

fn unit_c(n: usize, i: usize, j: usize, z: num_complex::Complex64) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = z;
    m
}

/// Standard symplectic form `[[0, -I], [I, 0]]`.
pub fn symplectic_form(n: usize) -> CMat {
    let mut j = CMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = c(-1.0, 0.0);
        j[(n + k, k)] = c(1.0, 0.0);
    }
    j
}

/// `diag(I_p, -I_q)`.
pub fn indefinite_form(p: usize, q: usize) -> CMat {
    let mut m = CMat::zeros(p + q, p + q);
    for k in 0..p + q {
        m[(k, k)] = c(if k < p { 1.0 } else { -1.0 }, 0.0);
    }
    m
}

/// Basis ordered as torus, rest of `k`, then `p`, together with the torus
/// dimension and the dimension of `k`.
pub(crate) fn basis(family: Family) -> (Vec<CMat>, usize, usize) {
    match family {
        Family::Sl2 => {
            let z = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0)]);
            let h = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
            let e = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
            (vec![z, h, e], 1, 1)
        }
        Family::Sp { n } => {
            let m = 2 * n;
            let mut b = Vec::new();
            for j in 0..n {
                b.push(unit(m, j, n + j, 1.0) + unit(m, n + j, j, -1.0));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    // A antisymmetric in [[A, 0], [0, A]]
                    b.push(
                        unit(m, i, j, 1.0) + unit(m, j, i, -1.0) + unit(m, n + i, n + j, 1.0)
                            + unit(m, n + j, n + i, -1.0),
                    );
                    // B symmetric in [[0, -B], [B, 0]]
                    b.push(
                        unit(m, i, n + j, -1.0) + unit(m, j, n + i, -1.0) + unit(m, n + i, j, 1.0)
                            + unit(m, n + j, i, 1.0),
                    );
                }
            }
            let k_dim = b.len();
            for i in 0..n {
                for j in i..n {
                    let s = |r: usize, cc: usize| {
                        if i == j {
                            unit(m, r + i, cc + i, 1.0)
                        } else {
                            unit(m, r + i, cc + j, 1.0) + unit(m, r + j, cc + i, 1.0)
                        }
                    };
                    // [[A, 0], [0, -A]]
                    b.push(s(0, 0) - s(n, n));
                    // [[0, B], [B, 0]]
                    b.push(s(0, n) + s(n, 0));
                }
            }
            (b, n, k_dim)
        }
        Family::Su { p, q } => {
            let n = p + q;
            let mi = c(0.0, -1.0);
            let mut b = Vec::new();
            for j in 0..n - 1 {
                b.push(unit_c(n, j, j, mi) - unit_c(n, n - 1, n - 1, mi));
            }
            let same_block = |a: usize, bb: usize| (a < p) == (bb < p);
            for a in 0..n {
                for bb in (a + 1)..n {
                    if same_block(a, bb) {
                        b.push(unit(n, a, bb, 1.0) + unit(n, bb, a, -1.0));
                        b.push(unit_c(n, a, bb, c(0.0, 1.0)) + unit_c(n, bb, a, c(0.0, 1.0)));
                    }
                }
            }
            let k_dim = b.len();
            for a in 0..p {
                for bb in p..n {
                    b.push(unit(n, a, bb, 1.0) + unit(n, bb, a, 1.0));
                    b.push(unit_c(n, a, bb, c(0.0, 1.0)) + unit_c(n, bb, a, c(0.0, -1.0)));
                }
            }
            (b, n - 1, k_dim)
        }
        Family::Heisenberg => {
            let p = unit(3, 0, 1, 1.0);
            let q = unit(3, 1, 2, 1.0);
            let z = unit(3, 0, 2, 1.0);
            (vec![p, q, z], 0, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("sl2".parse::<Family>().unwrap(), Family::Sl2);
        assert_eq!("sp4".parse::<Family>().unwrap(), Family::Sp { n: 2 });
        assert_eq!("sp(6,R)".parse::<Family>().unwrap(), Family::Sp { n: 3 });
        assert_eq!("su(2,1)".parse::<Family>().unwrap(), Family::Su { p: 2, q: 1 });
        assert!("so(3)".parse::<Family>().is_err());
        assert!("sp3".parse::<Family>().is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(basis(Family::Sp { n: 2 }).0.len(), 10);
        assert_eq!(basis(Family::Sp { n: 3 }).0.len(), 21);
        assert_eq!(basis(Family::Su { p: 2, q: 1 }).0.len(), 8);
        assert_eq!(basis(Family::Su { p: 2, q: 2 }).0.len(), 15);
        let (b, t, k) = basis(Family::Su { p: 2, q: 2 });
        assert_eq!((b.len(), t, k), (15, 3, 7));
    }
}
