//! Exact Gaussian elimination over Gaussian rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::algebra::Scalar;

/// 2^61 − 1; it is 3 mod 4, so `F_p[i]` is a field.
const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_int(v: &BigInt) -> u64 {
    let r = v % BigInt::from(P);
    let r = r.to_i64().expect("below P");
    if r < 0 {
        (r + P as i64) as u64
    } else {
        r as u64
    }
}

fn reduce_rational(r: &BigRational) -> Option<u64> {
    let den = reduce_int(r.denom());
    if den == 0 {
        return None;
    }
    Some(mulmod(reduce_int(r.numer()), powmod(den, P - 2)))
}

/// Element `re + im·i` of `F_p[i]`.
#[derive(Clone, Copy, PartialEq)]
struct Modp(u64, u64);

impl Modp {
    const ZERO: Modp = Modp(0, 0);

    fn is_zero(self) -> bool {
        self == Modp::ZERO
    }

    fn mul(self, o: Modp) -> Modp {
        let re = (mulmod(self.0, o.0) + P - mulmod(self.1, o.1)) % P;
        Modp(re, (mulmod(self.0, o.1) + mulmod(self.1, o.0)) % P)
    }

    fn sub(self, o: Modp) -> Modp {
        Modp((self.0 + P - o.0) % P, (self.1 + P - o.1) % P)
    }

    fn inv(self) -> Modp {
        // norm a² + b² is nonzero since −1 is not a square mod P
        let n = (mulmod(self.0, self.0) + mulmod(self.1, self.1)) % P;
        let ni = powmod(n, P - 2);
        Modp(mulmod(self.0, ni), mulmod((P - self.1) % P, ni))
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    pub rows: Vec<Vec<Scalar>>,
    pub cols: usize,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows: vec![vec![Scalar::zero(); cols]; rows], cols }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Matrix { rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|r| {
                let mut acc = Scalar::zero();
                for (a, b) in r.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns. Pivots are the first
    /// nonzero entry found scanning down each column.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| !self.rows[i][c].is_zero()) else {
                continue;
            };
            self.rows.swap(r, p);
            let inv = self.rows[r][c].inv().expect("nonzero pivot");
            if !inv.is_one() {
                for x in self.rows[r][c..].iter_mut() {
                    if !x.is_zero() {
                        *x *= &inv;
                    }
                }
            }
            let pivot_row = std::mem::take(&mut self.rows[r]);
            let support: Vec<usize> = (c..self.cols).filter(|&j| !pivot_row[j].is_zero()).collect();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i == r || row.is_empty() || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for &j in &support {
                    let t = &f * &pivot_row[j];
                    row[j] -= &t;
                }
            }
            self.rows[r] = pivot_row;
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.modular_rank() == Some(self.cols.min(self.rows.len())) {
            return self.cols.min(self.rows.len());
        }
        self.clone().rref().len()
    }

    /// Rank over `F_p[i]`, a lower bound for the exact rank. `None` when a denominator
    /// vanishes mod p.
    fn modular_rank(&self) -> Option<usize> {
        let mut rows: Vec<Vec<Modp>> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let mut out = Vec::with_capacity(self.cols);
            for x in r {
                out.push(if x.is_zero() { Modp::ZERO } else { Modp(reduce_rational(&x.re)?, reduce_rational(&x.im)?) });
            }
            rows.push(out);
        }
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = rows[rank][c].inv();
            let pivot: Vec<Modp> = rows[rank].iter().map(|x| x.mul(inv)).collect();
            for row in rows.iter_mut().skip(rank + 1) {
                let f = row[c];
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    if !pivot[j].is_zero() {
                        row[j] = row[j].sub(f.mul(pivot[j]));
                    }
                }
            }
            rows[rank] = pivot;
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        Some(rank)
    }

    /// Kernel basis in canonical form: the rows of the reduced echelon form of the kernel,
    /// so each vector's first nonzero coordinate is 1 and the basis depends only on the kernel.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        if self.modular_rank() == Some(self.cols) {
            return Vec::new();
        }
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (i, &p) in pivots.iter().enumerate() {
                let x = &m.rows[i][f];
                if !x.is_zero() {
                    v[p] = -x;
                }
            }
            basis.push(v);
        }
        canonical_basis(basis, self.cols)
    }

    /// Unique solution of `A x = b` for square invertible `A`.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        let n = self.cols;
        if self.rows.len() != n || b.len() != n {
            return None;
        }
        let rows = self.rows.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
        let mut aug = Matrix::from_rows(rows, n + 1);
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
            return None;
        }
        Some(aug.rows.into_iter().map(|r| r[n].clone()).collect())
    }
}

/// Reduced echelon basis of the span of `vectors` (zero rows dropped).
pub fn canonical_basis(vectors: Vec<Vec<Scalar>>, cols: usize) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return vectors;
    }
    let mut m = Matrix::from_rows(vectors, cols);
    let r = m.rref().len();
    m.rows.truncate(r);
    m.rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let mut m = Matrix::zeros(3, 3);
        for i in 0..3 {
            m.rows[i][i] = Scalar::one();
        }
        assert!(m.nullspace().is_empty());
    }

    #[test]
    fn single_row_with_i() {
        let m = Matrix::from_rows(vec![vec![s(1), Scalar::i()]], 2);
        let k = m.nullspace();
        // (−i, 1) rescaled so the first coordinate is 1: (1, i)
        assert_eq!(k, vec![vec![s(1), Scalar::i()]]);
        let raw = vec![-Scalar::i(), s(1)];
        assert!(m.mul_vec(&raw).iter().all(Scalar::is_zero));
    }

    #[test]
    fn seeded_rank_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rand_row = |rng: &mut ChaCha8Rng| -> Vec<Scalar> {
            (0..4).map(|_| Scalar::complex((rng.gen_range(-5..=5), 1), (rng.gen_range(-5..=5), 1))).collect()
        };
        let base: Vec<Vec<Scalar>> = (0..3).map(|_| rand_row(&mut rng)).collect();
        let mut rows = base.clone();
        // three more rows, each a combination of the first three
        for _ in 0..3 {
            let c: Vec<Scalar> = (0..3).map(|_| s(rng.gen_range(-3..=3))).collect();
            let row = (0..4).map(|j| (0..3).fold(Scalar::zero(), |acc, i| &acc + &(&c[i] * &base[i][j]))).collect();
            rows.push(row);
        }
        let m = Matrix::from_rows(rows, 4);
        assert_eq!(m.rank(), 3);
        let k = m.nullspace();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn modular_rank_bounds_exact_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let m = Matrix::from_rows(
                (0..rows)
                    .map(|_| {
                        (0..cols)
                            .map(|_| {
                                if rng.gen_bool(0.4) {
                                    Scalar::zero()
                                } else {
                                    Scalar::complex((rng.gen_range(-3..=3), rng.gen_range(1..4)), (rng.gen_range(-2..=2), 1))
                                }
                            })
                            .collect()
                    })
                    .collect(),
                cols,
            );
            let exact = m.clone().rref().len();
            assert_eq!(m.modular_rank(), Some(exact));
            assert_eq!(m.rank(), exact);
        }
    }

    #[test]
    fn solve_unique() {
        let m = Matrix::from_rows(vec![vec![s(2), s(1)], vec![s(1), s(3)]], 2);
        let x = m.solve(&[s(3), s(4)]).unwrap();
        assert_eq!(x, vec![s(1), s(1)]);
        let singular = Matrix::from_rows(vec![vec![s(1), s(1)], vec![s(2), s(2)]], 2);
        assert!(singular.solve(&[s(1), s(2)]).is_none());
    }
}
