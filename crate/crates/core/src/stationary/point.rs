//! Exact kernels of numeric generators over Q.

use num_traits::{One, Zero};

use crate::algebra::Rational;
use crate::modular::{kernel_vector, primes, Crt, Field};
use crate::{Error, Result};

/// Gauss-Jordan kernel of a dense square rational matrix.
pub(crate) fn kernel_rational(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let n = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..n {
            let v = &a[r][j] * &inv;
            a[r][j] = v;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for j in c..n {
                if !prow[j].is_zero() {
                    let v = &row[j] - &factor * &prow[j];
                    row[j] = v;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let dim = n - pivot_cols.len();
    if dim != 1 {
        return Err(Error::KernelDimensionNotOne(format!(
            "kernel has dimension {dim}"
        )));
    }
    let free = (0..n)
        .find(|c| !pivot_cols.contains(c))
        .expect("free column");
    let mut x = vec![Rational::zero(); n];
    x[free] = Rational::one();
    for (row, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = -a[row][free].clone();
    }
    Ok(x)
}

/// Kernel of a sparse rational matrix via residues modulo primes, accepted once
/// `verify` confirms the reconstruction exactly.
pub(crate) fn kernel_modular<V>(
    n: usize,
    entries: &[(usize, usize, Rational)],
    mut verify: V,
) -> Result<Vec<Rational>>
where
    V: FnMut(&[Rational]) -> bool,
{
    let mut crt: Option<Crt> = None;
    let mut anchor: Option<usize> = None;
    let mut previous: Option<Vec<Rational>> = None;
    let mut dims = Vec::new();
    'primes: for p in primes().take(400) {
        let f = Field::new(p);
        let mut dense = vec![0u64; n * n];
        for (i, j, v) in entries {
            let Some(x) = f.from_rational(v) else {
                continue 'primes;
            };
            dense[i * n + j] = f.add(dense[i * n + j], x);
        }
        let x = match kernel_vector(f, n, n, dense) {
            Ok(x) => x,
            Err(d) => {
                dims.push(d);
                if dims.len() >= 3 && dims.iter().all(|&d| d != 1) {
                    return Err(Error::KernelDimensionNotOne(format!(
                        "kernel has dimension {}",
                        dims.iter().min().copied().unwrap_or(0)
                    )));
                }
                continue;
            }
        };
        let r = *anchor.get_or_insert_with(|| x.iter().position(|&c| c != 0).unwrap_or(0));
        if x[r] == 0 {
            continue;
        }
        let inv = f.inv(x[r]);
        let residues: Vec<u64> = x.iter().map(|&c| f.mul(c, inv)).collect();
        let acc = crt.get_or_insert_with(|| Crt::new(n));
        acc.push(p, &residues);
        let Some(values) = acc.reconstruct() else {
            continue;
        };
        if previous.as_ref() == Some(&values) && verify(&values) {
            return Ok(values);
        }
        previous = Some(values);
    }
    Err(Error::KernelDimensionNotOne(
        "modular point solve did not converge".into(),
    ))
}
