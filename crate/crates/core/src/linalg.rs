//! Dense linear algebra over `Z/p` and exact linear algebra over the integers
//! and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `2^62 - 57`.
pub const DEFAULT_PRIME: u64 = 4_611_686_018_427_387_847;

/// Arithmetic modulo a prime below `2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// `None` unless `p` is an odd prime below `2^63`.
    pub fn new(p: u64) -> Option<Fp> {
        (p > 2 && p < 1 << 63 && is_prime(p)).then_some(Fp { p })
    }

    pub fn default_prime() -> Fp {
        Fp { p: DEFAULT_PRIME }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Panics on zero.
    pub fn inv(self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(self, v: i64) -> u64 {
        let r = (v as i128).rem_euclid(self.p as i128);
        r as u64
    }

    pub fn from_bigint(self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = v.mod_floor(&p);
        u64::try_from(r).expect("reduced residue fits")
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn signed(self, a: u64) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Rank of a matrix over `Z/p`; the rows are consumed.
pub fn rank_mod_p(f: Fp, mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = f.inv(rows[rank][c]);
        for x in rows[rank][c..].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[c] == 0 {
                continue;
            }
            let m = row[c];
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = f.sub(*x, f.mul(m, y));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Determinant over `Z/p` of a square matrix.
pub fn det_mod_p(f: Fp, mut m: Vec<Vec<u64>>) -> u64 {
    let n = m.len();
    let mut det = 1;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            det = f.neg(det);
        }
        det = f.mul(det, m[c][c]);
        let inv = f.inv(m[c][c]);
        for r in c + 1..n {
            if m[r][c] == 0 {
                continue;
            }
            let factor = f.mul(m[r][c], inv);
            let (top, rest) = m.split_at_mut(r);
            for (x, &p) in rest[0][c..].iter_mut().zip(&top[c][c..]) {
                *x = f.sub(*x, f.mul(factor, p));
            }
        }
    }
    det
}

/// Coefficients `c_0..c_{N}` of the polynomial of degree at most `N` taking
/// `values[t]` at `t = 0..=N`.
pub fn interpolate_mod_p(f: Fp, values: &[u64]) -> Vec<u64> {
    let n = values.len();
    // Newton divided differences on the nodes 0..n.
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = f.sub(dd[i], dd[i - 1]);
            dd[i] = f.mul(num, f.inv(level as u64));
        }
    }
    // Horner expansion of sum dd[i] * prod_{j<i} (x - j).
    let mut coeffs = vec![0u64; n];
    for i in (0..n).rev() {
        // coeffs = coeffs * (x - i) + dd[i]
        let mut next = vec![0u64; n];
        for k in 0..n {
            if coeffs[k] == 0 {
                continue;
            }
            if k + 1 < n {
                next[k + 1] = f.add(next[k + 1], coeffs[k]);
            }
            next[k] = f.sub(next[k], f.mul(coeffs[k], i as u64));
        }
        next[0] = f.add(next[0], dd[i]);
        coeffs = next;
    }
    coeffs
}

/// Exact rank of an integer matrix by fraction-free elimination.
pub fn rank_exact(mut rows: Vec<Vec<BigInt>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let m = row[c].clone();
            for k in c..ncols {
                let v = &pivot_row[c] * &row[k] - &m * &pivot_row[k];
                row[k] = v / &prev;
            }
        }
        prev = pivot_row[c].clone();
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Product of two square integer matrices.
pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let m = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &m * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Solves `A x = b` over the rationals. Free variables take the values in
/// `free_values`, cycled. `None` if inconsistent.
pub fn solve_rational(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    free_values: &[BigRational],
) -> Option<Vec<BigRational>> {
    let nvars = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&nvars) {
        return None;
    }
    let mut x = vec![BigRational::zero(); nvars];
    let mut k = 0;
    for (v, xv) in x.iter_mut().enumerate() {
        if !pivots.contains(&v) {
            *xv = free_values[k % free_values.len().max(1)].clone();
            k += 1;
        }
    }
    for (r, &pc) in pivots.iter().enumerate() {
        let mut val = aug[r][nvars].clone();
        for v in pc + 1..nvars {
            if !pivots.contains(&v) {
                val -= &aug[r][v] * &x[v];
            }
        }
        x[pc] = val;
    }
    Some(x)
}

/// First `count` primes, used as generic free parameters.
pub fn small_primes(count: usize) -> Vec<u64> {
    (2u64..).filter(|&q| is_prime(q)).take(count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primality() {
        assert!(is_prime(DEFAULT_PRIME));
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(DEFAULT_PRIME - 2));
        assert!(!is_prime(1));
        assert!(Fp::new(91).is_none());
        assert_eq!(small_primes(5), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn small_determinants() {
        let f = Fp::default_prime();
        let m = vec![vec![2, 1], vec![7, 4]];
        assert_eq!(det_mod_p(f, m), 1);
        let m = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(f.signed(det_mod_p(f, m)), -1);
        assert_eq!(rank_mod_p(f, vec![vec![1, 2], vec![2, 4]]), 1);
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let f = Fp::default_prime();
        // 3 - 2x + 5x^3
        let poly = |x: i64| 3 - 2 * x + 5 * x * x * x;
        let values: Vec<u64> = (0..5).map(|x| f.from_i64(poly(x))).collect();
        let c = interpolate_mod_p(f, &values);
        let got: Vec<i128> = c.iter().map(|&v| f.signed(v)).collect();
        assert_eq!(got, vec![3, -2, 0, 5, 0]);
    }

    #[test]
    fn rational_solve() {
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        let a = vec![vec![q(1), q(-1), q(0)], vec![q(0), q(1), q(-1)]];
        let b = vec![q(-1), q(-1)];
        let x = solve_rational(&a, &b, &[q(5)]).unwrap();
        assert_eq!(x, vec![q(3), q(4), q(5)]);
        let bad = vec![vec![q(1)], vec![q(1)]];
        assert!(solve_rational(&bad, &[q(0), q(1)], &[q(1)]).is_none());
    }

    proptest! {
        #[test]
        fn exact_and_modular_ranks_agree(entries in proptest::collection::vec(-3i64..4, 20)) {
            let rows: Vec<Vec<i64>> = entries.chunks(5).map(|c| c.to_vec()).collect();
            let exact = rank_exact(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect());
            let f = Fp::default_prime();
            let modular = rank_mod_p(f, rows.iter().map(|r| r.iter().map(|&v| f.from_i64(v)).collect()).collect());
            prop_assert_eq!(exact, modular);
        }

        #[test]
        fn determinant_is_multiplicative(a in proptest::collection::vec(0u64..1000, 9), b in proptest::collection::vec(0u64..1000, 9)) {
            let f = Fp::default_prime();
            let to_m = |v: &[u64]| v.chunks(3).map(|c| c.to_vec()).collect::<Vec<_>>();
            let (ma, mb) = (to_m(&a), to_m(&b));
            let mut prod = vec![vec![0u64; 3]; 3];
            for i in 0..3 { for j in 0..3 { for k in 0..3 {
                prod[i][j] = f.add(prod[i][j], f.mul(ma[i][k], mb[k][j]));
            }}}
            let lhs = det_mod_p(f, prod);
            let rhs = f.mul(det_mod_p(f, ma), det_mod_p(f, mb));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
