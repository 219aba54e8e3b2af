//! Row-style Hermite normal form with the unimodular transform kept, used to
//! pick canonical coset representatives of `Z^m / L`.

#[derive(Clone, Debug)]
pub struct Hnf {
    /// Nonzero rows in echelon form with positive pivots.
    pub rows: Vec<Vec<i64>>,
    pub pivots: Vec<usize>,
    /// `rows[i] = sum_j transform[i][j] * generator_j`.
    pub transform: Vec<Vec<i64>>,
}

impl Hnf {
    pub fn new(gens: &[Vec<i64>], width: usize) -> Hnf {
        let g = gens.len();
        let mut a: Vec<Vec<i64>> = gens.to_vec();
        let mut t: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect()).collect();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..width {
            if pr >= g {
                break;
            }
            loop {
                // smallest nonzero entry at or below the pivot row
                let best = (pr..g).filter(|&i| a[i][col] != 0).min_by_key(|&i| a[i][col].abs());
                let Some(b) = best else { break };
                a.swap(pr, b);
                t.swap(pr, b);
                let mut done = true;
                for i in (pr + 1)..g {
                    if a[i][col] != 0 {
                        let q = a[i][col].div_euclid(a[pr][col]);
                        for c in 0..width {
                            a[i][c] -= q * a[pr][c];
                        }
                        for c in 0..g {
                            t[i][c] -= q * t[pr][c];
                        }
                        if a[i][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if a[pr][col] == 0 {
                continue;
            }
            if a[pr][col] < 0 {
                for c in 0..width {
                    a[pr][c] = -a[pr][c];
                }
                for c in 0..g {
                    t[pr][c] = -t[pr][c];
                }
            }
            let p = a[pr][col];
            for i in 0..pr {
                let q = a[i][col].div_euclid(p);
                if q != 0 {
                    for c in 0..width {
                        a[i][c] -= q * a[pr][c];
                    }
                    for c in 0..g {
                        t[i][c] -= q * t[pr][c];
                    }
                }
            }
            pivots.push(col);
            pr += 1;
        }
        a.truncate(pr);
        t.truncate(pr);
        Hnf { rows: a, pivots, transform: t }
    }

    /// Canonical representative of `v + L`, and the generator coefficients
    /// `k` with `rep = v + sum_j k_j generator_j`.
    pub fn reduce(&self, v: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let mut out = v.to_vec();
        let g = self.transform.first().map_or(0, |r| r.len());
        let mut coeff = vec![0i64; g];
        for (i, row) in self.rows.iter().enumerate() {
            let c = self.pivots[i];
            let q = out[c].div_euclid(row[c]);
            if q != 0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o -= q * r;
                }
                for (k, t) in coeff.iter_mut().zip(&self.transform[i]) {
                    *k -= q * t;
                }
            }
        }
        (out, coeff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_modulo_even_lattice() {
        let h = Hnf::new(&[vec![2, 0, 1], vec![0, 2, 1]], 3);
        assert_eq!(h.rows.len(), 2);
        let (r, k) = h.reduce(&[3, 5, 4]);
        assert_eq!(r, vec![1, 1, 1]);
        let gens = [[2, 0, 1], [0, 2, 1]];
        let v = [3i64, 5, 4];
        for c in 0..3 {
            assert_eq!(v[c] + k[0] * gens[0][c] + k[1] * gens[1][c], r[c]);
        }
    }

    #[test]
    fn dependent_generators_drop_out() {
        let h = Hnf::new(&[vec![2], vec![4], vec![6]], 1);
        assert_eq!(h.rows, vec![vec![2]]);
        assert_eq!(h.reduce(&[-3]).0, vec![1]);
    }
}
