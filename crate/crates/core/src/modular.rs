//! Arithmetic modulo word-sized primes, dense elimination over F_p, and the
//! Chinese-remainder / rational-reconstruction step that lifts residues back to Q.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;

/// A prime field `F_p` with `p < 2^31`, so products fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Field {
    pub p: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        debug_assert!(p < (1 << 31));
        Field { p }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_bigint(self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = x.mod_floor(&m);
        r.to_u64_digits().1.first().copied().unwrap_or(0)
    }

    /// Image of a rational, or `None` when the denominator vanishes mod `p`.
    pub fn from_rational(self, x: &Rational) -> Option<u64> {
        let d = self.from_bigint(x.denom());
        if d == 0 {
            return None;
        }
        Some(self.mul(self.from_bigint(x.numer()), self.inv(d)))
    }
}

fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let f = Field { p: n };
    // Bases 2, 7, 61 are deterministic below 4.7e9.
    'witness: for a in [2u64, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = f.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = f.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^31`, largest first.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    (1u64..(1 << 31))
        .rev()
        .filter(|&x| x > (1 << 30) && is_prime_u32(x))
}

/// LU factorization with partial pivoting of a dense square matrix over `F_p`.
pub(crate) struct Lu {
    field: Field,
    n: usize,
    a: Vec<u64>,
    perm: Vec<usize>,
    diag_inv: Vec<u64>,
}

impl Lu {
    /// Factors `a` (row-major, `n x n`); `None` if it is singular.
    pub fn factor(field: Field, n: usize, mut a: Vec<u64>) -> Option<Lu> {
        let f = field;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n).find(|&i| a[i * n + k] != 0)?;
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
            }
            let inv = f.inv(a[k * n + k]);
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n..k * n + n];
            for row in bottom.chunks_exact_mut(n) {
                if row[k] == 0 {
                    continue;
                }
                let factor = f.mul(row[k], inv);
                row[k] = factor;
                let neg = f.neg(factor);
                for j in k + 1..n {
                    if pivot_row[j] != 0 {
                        row[j] = (row[j] + neg * pivot_row[j]) % f.p;
                    }
                }
            }
        }
        let diag_inv = (0..n).map(|i| f.inv(a[i * n + i])).collect();
        Some(Lu {
            field,
            n,
            a,
            perm,
            diag_inv,
        })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[u64]) -> Vec<u64> {
        let n = self.n;
        let f = self.field;
        let mut y: Vec<u64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let row = &self.a[i * n..i * n + n];
            let mut acc = y[i];
            for j in 0..i {
                if row[j] != 0 && y[j] != 0 {
                    acc = f.sub(acc, f.mul(row[j], y[j]));
                }
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let row = &self.a[i * n..i * n + n];
            let mut acc = y[i];
            for j in i + 1..n {
                if row[j] != 0 && y[j] != 0 {
                    acc = f.sub(acc, f.mul(row[j], y[j]));
                }
            }
            y[i] = f.mul(acc, self.diag_inv[i]);
        }
        y
    }
}

/// Right kernel of a dense `rows x cols` matrix over `F_p`.
///
/// Returns one kernel vector when the kernel is one-dimensional, otherwise `Err(dim)`.
pub(crate) fn kernel_vector(
    field: Field,
    rows: usize,
    cols: usize,
    mut a: Vec<u64>,
) -> Result<Vec<u64>, usize> {
    let f = field;
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if pivot != r {
            for j in 0..cols {
                a.swap(r * cols + j, pivot * cols + j);
            }
        }
        let inv = f.inv(a[r * cols + c]);
        for j in c..cols {
            a[r * cols + j] = f.mul(a[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r || a[i * cols + c] == 0 {
                continue;
            }
            let factor = f.neg(a[i * cols + c]);
            for j in c..cols {
                let v = a[r * cols + j];
                if v != 0 {
                    a[i * cols + j] = (a[i * cols + j] + factor * v) % f.p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let dim = cols - pivot_cols.len();
    if dim != 1 {
        return Err(dim);
    }
    let free = (0..cols)
        .find(|c| !pivot_cols.contains(c))
        .expect("one free column");
    let mut x = vec![0u64; cols];
    x[free] = 1;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = f.neg(a[row * cols + free]);
    }
    Ok(x)
}

/// Residues of many integers accumulated prime by prime.
pub(crate) struct Crt {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    /// Folds in `residues` modulo the prime `p`.
    pub fn push(&mut self, p: u64, residues: &[u64]) {
        assert_eq!(residues.len(), self.values.len());
        let f = Field::new(p);
        let m_inv = f.inv(f.from_bigint(&self.modulus));
        let pb = BigInt::from(p);
        for (x, &r) in self.values.iter_mut().zip(residues) {
            let cur = f.from_bigint(x);
            let k = f.mul(f.sub(r, cur), m_inv);
            if k != 0 {
                *x += &self.modulus * BigInt::from(k);
            }
        }
        self.modulus *= pb;
    }

    /// Rational reconstruction of the values at `indices`.
    pub fn reconstruct_at(&self, indices: &[usize]) -> Option<Vec<Rational>> {
        let bound = (&self.modulus >> 1u32).sqrt();
        indices
            .iter()
            .map(|&i| rational_reconstruct(&self.values[i], &self.modulus, &bound))
            .collect()
    }

    /// Up to `count` evenly spaced indices of nonzero values.
    pub fn sample_indices(&self, count: usize) -> Vec<usize> {
        let nonzero: Vec<usize> = (0..self.values.len())
            .filter(|&i| !self.values[i].is_zero())
            .collect();
        let step = nonzero.len().div_ceil(count.max(1)).max(1);
        nonzero.into_iter().step_by(step).collect()
    }

    /// Rational reconstruction of every value; `None` if any value has no small preimage.
    pub fn reconstruct(&self) -> Option<Vec<Rational>> {
        let bound = (&self.modulus >> 1u32).sqrt();
        self.values
            .iter()
            .map(|x| rational_reconstruct(x, &self.modulus, &bound))
            .collect()
    }
}

/// Finds `a/b` with `|a|, b <= bound` and `a = b x (mod m)`.
pub(crate) fn rational_reconstruct(x: &BigInt, m: &BigInt, bound: &BigInt) -> Option<Rational> {
    let x = x.mod_floor(m);
    if x.is_zero() {
        return Some(Rational::zero());
    }
    let (mut r0, mut r1) = (m.clone(), x);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > *bound || !r1.gcd(&s1).is_one() {
        return None;
    }
    let (num, den) = if s1.sign() == Sign::Minus {
        (-r1, -s1)
    } else {
        (r1, s1)
    };
    Some(Rational::new(num, den))
}

/// Dense univariate polynomials over `F_p`, lowest degree first, with no trailing zeros.
pub(crate) mod upoly {
    use super::Field;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&x| x != 0)
    }

    pub fn mul(f: Field, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(out)
    }

    pub fn sub(f: Field, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = f.sub(x, y);
        }
        trim(out)
    }

    /// Quotient and remainder of `a / b`, `b` nonzero.
    pub fn div_rem(f: Field, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let db = degree(b).expect("nonzero divisor");
        let inv = f.inv(b[db]);
        let mut r = trim(a.to_vec());
        let mut q = vec![0u64; r.len().saturating_sub(db).max(1)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = f.mul(r[dr], inv);
            let shift = dr - db;
            q[shift] = c;
            for (j, &y) in b.iter().enumerate().take(db + 1) {
                r[shift + j] = f.sub(r[shift + j], f.mul(c, y));
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Gcd up to a unit factor; empty when both inputs are zero.
    pub fn gcd(f: Field, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let (_, r) = div_rem(f, &a, &b);
            a = std::mem::replace(&mut b, r);
        }
        a
    }

    /// Padé approximant of the power series `y mod x^k`: returns `(num, den)` with
    /// `deg num <= num_bound`, `den(0) = 1` and `den * y = num mod x^k`.
    pub fn pade(f: Field, y: &[u64], k: usize, num_bound: usize) -> Option<(Vec<u64>, Vec<u64>)> {
        let mut modulus = vec![0u64; k + 1];
        modulus[k] = 1;
        let mut r0 = modulus;
        let mut r1 = trim(y[..k.min(y.len())].to_vec());
        let mut t0: Vec<u64> = Vec::new();
        let mut t1: Vec<u64> = vec![1];
        while degree(&r1).is_some_and(|d| d > num_bound) {
            let (q, r2) = div_rem(f, &r0, &r1);
            let t2 = sub(f, &t0, &mul(f, &q, &t1));
            r0 = std::mem::replace(&mut r1, r2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let c = *t1.first()?;
        if c == 0 {
            return None;
        }
        let inv = f.inv(c);
        let num = r1.iter().map(|&x| f.mul(x, inv)).collect();
        let den = t1.iter().map(|&x| f.mul(x, inv)).collect();
        Some((trim(num), trim(den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn primes_are_prime_and_descending() {
        let ps: Vec<u64> = primes().take(5).collect();
        assert_eq!(ps[0], 2147483647);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        for p in ps {
            assert!((2..50000u64).all(|d| p % d != 0));
        }
    }

    #[test]
    fn lu_solves() {
        let f = Field::new(1_000_003);
        let a = vec![2, 1, 0, 1, 3, 1, 0, 1, 4];
        let lu = Lu::factor(f, 3, a.clone()).unwrap();
        let x = lu.solve(&[5, 10, 11]);
        for i in 0..3 {
            let s = (0..3).fold(0, |acc, j| f.add(acc, f.mul(a[i * 3 + j], x[j])));
            assert_eq!(s, [5, 10, 11][i]);
        }
        assert!(Lu::factor(f, 2, vec![1, 2, 2, 4]).is_none());
    }

    #[test]
    fn kernel_dimension() {
        let f = Field::new(101);
        // Generator-like matrix with a one-dimensional kernel.
        let x = kernel_vector(f, 2, 2, vec![1, 100, 1, 100]).unwrap();
        assert_eq!(f.add(x[0], f.mul(100, x[1])), 0);
        assert_eq!(kernel_vector(f, 2, 2, vec![0, 0, 0, 0]), Err(2));
    }

    #[test]
    fn crt_reconstructs_rationals() {
        let values = [rat(-37, 12), rat(5, 1), rat(0, 1), rat(123456789, 987654)];
        let mut crt = Crt::new(values.len());
        for p in primes().take(3) {
            let f = Field::new(p);
            let res: Vec<u64> = values.iter().map(|v| f.from_rational(v).unwrap()).collect();
            crt.push(p, &res);
        }
        assert_eq!(crt.reconstruct().unwrap(), values.to_vec());
    }

    #[test]
    fn pade_recovers_rational_series() {
        // 1/(1 - 2x) * (3 + x) as a series mod 7919.
        let f = Field::new(7919);
        let k = 8;
        let mut series = vec![0u64; k];
        let mut geo = 1u64;
        let mut geo_series = vec![0u64; k];
        for c in geo_series.iter_mut() {
            *c = geo;
            geo = f.mul(geo, 2);
        }
        for i in 0..k {
            series[i] = f.mul(3, geo_series[i]);
            if i > 0 {
                series[i] = f.add(series[i], geo_series[i - 1]);
            }
        }
        let (num, den) = upoly::pade(f, &series, k, 1).unwrap();
        assert_eq!(num, vec![3, 1]);
        assert_eq!(den, vec![1, f.neg(2)]);
    }
}
