//! Sparse polynomial kernel by evaluation and interpolation modulo primes.
//!
//! Along random lines `(u0 + s, t0 + beta s)` the kernel vector, normalized so that one
//! coordinate is 1, is a vector of rational functions in `s` with a common denominator.
//! Its power series comes from Hensel lifting against one LU factorization at the base
//! point, a Padé approximant recovers the numerators, and enough lines determine the
//! bivariate numerators. Residues from several primes are lifted to Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{BivarPoly, Rational};
use crate::modular::{primes, upoly, Crt, Field, Lu};
use crate::{Error, Result};

/// Transposed generator `M = (scaled_P - scale I)^T` with integer coefficients.
pub(crate) struct IntSystem {
    pub n: usize,
    /// `rows[v]` holds `(mu, terms)` with `M[v][mu] = sum c u^a t^b`.
    pub rows: Vec<Vec<(usize, Vec<(u32, u32, BigInt)>)>>,
    pub max_degree: u32,
}

impl IntSystem {
    /// Builds from the transposed generator given as `(row, col, entry)` triples.
    pub fn new(n: usize, entries: &[(usize, usize, BivarPoly)]) -> Self {
        let mut lcm = BigInt::one();
        for (_, _, p) in entries {
            for (_, c) in p.terms() {
                lcm = lcm.lcm(c.denom());
            }
        }
        let mut rows = vec![Vec::new(); n];
        let mut max_degree = 0;
        for (v, mu, p) in entries {
            if p.is_zero() {
                continue;
            }
            max_degree = max_degree.max(p.total_degree());
            let terms = p
                .terms()
                .map(|(m, c)| {
                    let scaled = c * Rational::from_integer(lcm.clone());
                    (m.u, m.t, scaled.to_integer())
                })
                .collect();
            rows[*v].push((*mu, terms));
        }
        IntSystem {
            n,
            rows,
            max_degree,
        }
    }

    /// Coefficient matrices of `M(u0 + s, t0 + beta s) = sum_j M_j s^j`, sparse by row.
    fn line(&self, f: Field, u0: u64, t0: u64, beta: u64) -> Vec<Vec<Vec<(usize, u64)>>> {
        let e = self.max_degree as usize;
        let mut mats = vec![vec![Vec::new(); self.n]; e + 1];
        let upow = powers_of_linear(f, u0, 1, e);
        let tpow = powers_of_linear(f, t0, beta, e);
        for (v, row) in self.rows.iter().enumerate() {
            for (mu, terms) in row {
                let mut acc = vec![0u64; e + 1];
                for (a, b, c) in terms {
                    let c = f.from_bigint(c);
                    let prod = upoly::mul(f, &upow[*a as usize], &tpow[*b as usize]);
                    for (j, x) in prod.into_iter().enumerate() {
                        acc[j] = f.add(acc[j], f.mul(c, x));
                    }
                }
                for (j, x) in acc.into_iter().enumerate() {
                    if x != 0 {
                        mats[j][v].push((*mu, x));
                    }
                }
            }
        }
        mats
    }
}

/// `(c0 + c1 s)^k` for `k = 0..=e`.
fn powers_of_linear(f: Field, c0: u64, c1: u64, e: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![1u64]];
    for k in 1..=e {
        let prev: &Vec<u64> = &out[k - 1];
        out.push(upoly::mul(f, prev, &[c0, c1]));
    }
    out
}

/// Outcome of one prime: per-state dense coefficient triangles, `None` when the prime
/// or the random choices were unlucky.
struct PrimeImage {
    degree: usize,
    coeffs: Vec<u64>,
}

fn tri_len(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Index of `u^a t^b` (`a + b <= d`) in a coefficient triangle.
fn tri_index(a: usize, b: usize) -> usize {
    let k = a + b;
    k * (k + 1) / 2 + b
}

struct Lifter<'a> {
    sys: &'a IntSystem,
    f: Field,
    lu: Lu,
    pivot: usize,
}

impl<'a> Lifter<'a> {
    /// Factors `M(u0, t0)` with row 0 and column `pivot` removed.
    fn new(sys: &'a IntSystem, f: Field, u0: u64, t0: u64, pivot: usize) -> Option<Self> {
        let n = sys.n;
        let m0 = &sys.line(f, u0, t0, 0)[0];
        let dim = n - 1;
        let mut dense = vec![0u64; dim * dim];
        for (v, row) in m0.iter().enumerate().skip(1) {
            for &(mu, x) in row {
                if mu == pivot {
                    continue;
                }
                let c = if mu < pivot { mu } else { mu - 1 };
                dense[(v - 1) * dim + c] = x;
            }
        }
        let lu = Lu::factor(f, dim, dense)?;
        Some(Lifter { sys, f, lu, pivot })
    }

    /// First `k` series coefficients of the kernel vector along a line, with the pivot
    /// coordinate fixed to 1. Returned as `series[mu][j]`.
    fn series(&self, mats: &[Vec<Vec<(usize, u64)>>], k: usize) -> Vec<Vec<u64>> {
        let f = self.f;
        let n = self.sys.n;
        let mut xs: Vec<Vec<u64>> = Vec::with_capacity(k);
        for step in 0..k {
            let mut rhs = vec![0u64; n];
            if step == 0 {
                for (v, row) in mats[0].iter().enumerate() {
                    for &(mu, x) in row {
                        if mu == self.pivot {
                            rhs[v] = f.neg(x);
                        }
                    }
                }
            }
            for (j, mat) in mats.iter().enumerate().skip(1) {
                if j > step {
                    break;
                }
                let x = &xs[step - j];
                for (v, row) in mat.iter().enumerate() {
                    let mut acc = rhs[v];
                    for &(mu, c) in row {
                        if x[mu] != 0 {
                            acc = f.sub(acc, f.mul(c, x[mu]));
                        }
                    }
                    rhs[v] = acc;
                }
            }
            let y = self.lu.solve(&rhs[1..]);
            let mut x = Vec::with_capacity(n);
            x.extend_from_slice(&y[..self.pivot]);
            x.push(if step == 0 { 1 } else { 0 });
            x.extend_from_slice(&y[self.pivot..]);
            xs.push(x);
        }
        (0..n)
            .map(|mu| xs.iter().map(|x| x[mu]).collect())
            .collect()
    }
}

/// Numerators `d(s) x_mu(s)` of the kernel along one line, all of degree at most `degree`,
/// or `None` if no such common denominator is consistent with the series.
fn line_numerators(
    f: Field,
    series: &[Vec<u64>],
    k: usize,
    degree: usize,
    weights: &[u64],
) -> Option<Vec<Vec<u64>>> {
    let mut combo = vec![0u64; k];
    for (s, &w) in series.iter().zip(weights) {
        for (c, &x) in combo.iter_mut().zip(s) {
            *c = f.add(*c, f.mul(w, x));
        }
    }
    let (_, den) = upoly::pade(f, &combo, k, degree)?;
    if upoly::degree(&den).unwrap_or(0) > degree {
        return None;
    }
    let mut out = Vec::with_capacity(series.len());
    for s in series {
        let mut num = upoly::mul(f, &den, s);
        num.resize(k.max(num.len()), 0);
        if num[degree + 1..k].iter().any(|&c| c != 0) {
            return None;
        }
        num.truncate(degree + 1);
        out.push(num);
    }
    Some(out)
}

const EXTRA_TERMS: usize = 8;
const SAMPLE_SIZE: usize = 2000;

fn image_mod_prime(
    sys: &IntSystem,
    p: u64,
    rng: &mut ChaCha8Rng,
    known_degree: Option<usize>,
    degree_cap: u32,
) -> Result<Option<PrimeImage>> {
    let f = Field::new(p);
    let n = sys.n;
    let u0 = rng.gen_range(1..p);
    let t0 = rng.gen_range(1..p);
    let Some(lifter) = Lifter::new(sys, f, u0, t0, 0) else {
        return Ok(None);
    };
    let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..p)).collect();
    let betas_seed: Vec<u64> = (0..=(degree_cap as usize + 1))
        .map(|_| rng.gen_range(1..p))
        .collect();

    // Discover the degree on the first direction, doubling the guess.
    let first_mats = sys.line(f, u0, t0, betas_seed[0]);
    let degree = match known_degree {
        Some(d) => d,
        None => {
            let mut guess = 4usize;
            loop {
                let k = 2 * guess + 1 + EXTRA_TERMS;
                let series = lifter.series(&first_mats, k);
                if let Some(nums) = line_numerators(f, &series, k, guess, &weights) {
                    break nums
                        .iter()
                        .filter_map(|x| upoly::degree(x))
                        .max()
                        .unwrap_or(0);
                }
                if guess >= degree_cap as usize {
                    return Err(Error::DegreeCapExceeded {
                        degree: (2 * guess) as u32,
                        cap: degree_cap,
                    });
                }
                guess = (2 * guess).min(degree_cap as usize);
            }
        }
    };

    let d = degree;
    let k = 2 * d + 1 + EXTRA_TERMS;
    let mut betas: Vec<u64> = Vec::with_capacity(d + 1);
    for &b in &betas_seed {
        if betas.len() == d + 1 {
            break;
        }
        if !betas.contains(&b) {
            betas.push(b);
        }
    }
    if betas.len() < d + 1 {
        return Ok(None);
    }
    // values[mu][k][j]: coefficient of s^k along direction j.
    let mut values = vec![vec![vec![0u64; d + 1]; d + 1]; n];
    for (j, &beta) in betas.iter().enumerate() {
        let mats = if j == 0 {
            first_mats.clone()
        } else {
            sys.line(f, u0, t0, beta)
        };
        let series = lifter.series(&mats, k);
        let Some(nums) = line_numerators(f, &series, k, d, &weights) else {
            return Ok(None);
        };
        for (mu, num) in nums.iter().enumerate() {
            for (kk, &c) in num.iter().enumerate() {
                values[mu][kk][j] = c;
            }
        }
    }

    // Vandermonde in beta, shared by every interpolation.
    let mut vander = vec![0u64; (d + 1) * (d + 1)];
    for (j, &b) in betas.iter().enumerate() {
        let mut x = 1;
        for i in 0..=d {
            vander[j * (d + 1) + i] = x;
            x = f.mul(x, b);
        }
    }
    let Some(vlu) = Lu::factor(f, d + 1, vander) else {
        return Ok(None);
    };

    let binom = pascal(f, d);
    let nu0: Vec<u64> = powers(f, f.neg(u0), d);
    let nt0: Vec<u64> = powers(f, f.neg(t0), d);
    let tri = tri_len(d);
    let mut coeffs = vec![0u64; n * tri];
    for mu in 0..n {
        // h[a][b]: coefficient of x^a y^b in Q(u0 + x, t0 + y).
        let mut h = vec![vec![0u64; d + 1]; d + 1];
        for kk in 0..=d {
            let hk = vlu.solve(&values[mu][kk]);
            for (i, &c) in hk.iter().enumerate() {
                if i > kk {
                    if c != 0 {
                        return Ok(None);
                    }
                    continue;
                }
                h[kk - i][i] = c;
            }
        }
        // Shift u then t back to the origin.
        let mut g = vec![vec![0u64; d + 1]; d + 1];
        for b in 0..=d {
            for alpha in 0..=(d - b) {
                let mut acc = 0;
                for a in alpha..=(d - b) {
                    if h[a][b] != 0 {
                        let w = f.mul(binom[a][alpha], nu0[a - alpha]);
                        acc = f.add(acc, f.mul(h[a][b], w));
                    }
                }
                g[alpha][b] = acc;
            }
        }
        let block = &mut coeffs[mu * tri..(mu + 1) * tri];
        for alpha in 0..=d {
            for beta in 0..=(d - alpha) {
                let mut acc = 0;
                for b in beta..=(d - alpha) {
                    if g[alpha][b] != 0 {
                        let w = f.mul(binom[b][beta], nt0[b - beta]);
                        acc = f.add(acc, f.mul(g[alpha][b], w));
                    }
                }
                block[tri_index(alpha, beta)] = acc;
            }
        }
    }
    Ok(Some(PrimeImage { degree: d, coeffs }))
}

fn pascal(f: Field, d: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; d + 1]; d + 1];
    for i in 0..=d {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = f.add(c[i - 1][j - 1], if j < i { c[i - 1][j] } else { 0 });
        }
    }
    c
}

fn powers(f: Field, x: u64, d: usize) -> Vec<u64> {
    let mut out = vec![1u64; d + 1];
    for i in 1..=d {
        out[i] = f.mul(out[i - 1], x);
    }
    out
}

/// Kernel vector with integer polynomial entries, up to a rational scalar.
///
/// `verify` is called on each candidate and must accept it before it is returned.
pub(crate) fn kernel_by_interpolation<V>(
    sys: &IntSystem,
    degree_cap: u32,
    mut verify: V,
) -> Result<Vec<BivarPoly>>
where
    V: FnMut(&[BivarPoly]) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut degree: Option<usize> = None;
    let mut crt: Option<Crt> = None;
    let mut anchor: Option<usize> = None;
    let mut previous: Option<Vec<Rational>> = None;
    let mut sample_idx: Option<Vec<usize>> = None;
    let mut misses = 0usize;
    const MAX_PRIMES: usize = 400;
    const MAX_MISSES: usize = 12;

    for (used, p) in primes().enumerate() {
        if used >= MAX_PRIMES || misses >= MAX_MISSES {
            break;
        }
        let image = image_mod_prime(sys, p, &mut rng, degree, degree_cap)?;
        let Some(image) = image else {
            misses += 1;
            continue;
        };
        if let Some(d) = degree {
            if image.degree != d {
                misses += 1;
                continue;
            }
        } else {
            degree = Some(image.degree);
        }
        let f = Field::new(p);
        let anchor_idx = match anchor {
            Some(i) => i,
            None => match image.coeffs.iter().position(|&c| c != 0) {
                Some(i) => {
                    anchor = Some(i);
                    i
                }
                None => {
                    misses += 1;
                    continue;
                }
            },
        };
        let a = image.coeffs[anchor_idx];
        if a == 0 {
            misses += 1;
            continue;
        }
        let inv = f.inv(a);
        let residues: Vec<u64> = image.coeffs.iter().map(|&c| f.mul(c, inv)).collect();
        let acc = crt.get_or_insert_with(|| Crt::new(residues.len()));
        acc.push(p, &residues);
        let sample = sample_idx.get_or_insert_with(|| acc.sample_indices(SAMPLE_SIZE));
        let Some(probe) = acc.reconstruct_at(sample) else {
            continue;
        };
        if previous.as_ref() != Some(&probe) {
            previous = Some(probe);
            continue;
        }
        let Some(values) = acc.reconstruct() else {
            continue;
        };
        let d = image.degree;
        let tri = tri_len(d);
        let candidate: Vec<BivarPoly> = values
            .chunks(tri)
            .map(|block| {
                let mut terms = Vec::new();
                for a in 0..=d {
                    for b in 0..=(d - a) {
                        let c = &block[tri_index(a, b)];
                        if !c.is_zero() {
                            terms.push((c.clone(), a as u32, b as u32));
                        }
                    }
                }
                BivarPoly::from_terms(terms)
            })
            .collect();
        if verify(&candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::KernelDimensionNotOne(
        "modular interpolation did not converge to a verified kernel vector".into(),
    ))
}
