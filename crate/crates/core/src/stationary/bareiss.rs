//! Fraction-free elimination over Q[u,t].

use crate::algebra::BivarPoly;
use crate::{Error, Result};

/// Kernel vector of the square matrix `m` (row-major rows), assuming every column sums to
/// zero across rows so that row 0 is redundant. Column 0 is moved to the right-hand side.
///
/// Each elimination step divides exactly by the previous pivot, so all intermediate
/// entries stay polynomial. The pivot in each column is the nonzero entry with the
/// fewest terms.
pub(crate) fn kernel(m: &[Vec<BivarPoly>], degree_cap: u32) -> Result<Vec<BivarPoly>> {
    let n = m.len();
    if n == 1 {
        return Ok(vec![BivarPoly::one()]);
    }
    let dim = n - 1;
    // Augmented system: unknowns x_1..x_{n-1}, right-hand side -M[v][0].
    let mut a: Vec<Vec<BivarPoly>> = m[1..]
        .iter()
        .map(|row| {
            let mut r: Vec<BivarPoly> = row[1..].to_vec();
            r.push(-&row[0]);
            r
        })
        .collect();
    let mut prev = BivarPoly::one();
    for k in 0..dim {
        let pivot = (k..dim)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| (a[i][k].num_terms(), i))
            .ok_or_else(|| Error::KernelDimensionNotOne(format!("no pivot in column {}", k + 1)))?;
        a.swap(k, pivot);
        let (top, bottom) = a.split_at_mut(k + 1);
        let prow = &top[k];
        for row in bottom.iter_mut() {
            let lead = std::mem::replace(&mut row[k], BivarPoly::zero());
            for j in k + 1..=dim {
                let mut val = &prow[k] * &row[j];
                if !lead.is_zero() && !prow[j].is_zero() {
                    val -= &(&lead * &prow[j]);
                }
                row[j] = if prev.is_one() {
                    val
                } else {
                    val.exact_div(&prev)?
                };
                if row[j].total_degree() > degree_cap {
                    return Err(Error::DegreeCapExceeded {
                        degree: row[j].total_degree(),
                        cap: degree_cap,
                    });
                }
            }
        }
        prev = a[k][k].clone();
    }
    // prev is the determinant of the reduced system; x_0 = det and x = det * y.
    let det = prev;
    let mut z = vec![BivarPoly::zero(); dim];
    for i in (0..dim).rev() {
        let mut acc = &det * &a[i][dim];
        for j in i + 1..dim {
            if !a[i][j].is_zero() {
                acc -= &(&a[i][j] * &z[j]);
            }
        }
        z[i] = acc.exact_div(&a[i][i])?;
    }
    let mut out = Vec::with_capacity(n);
    out.push(det);
    out.extend(z);
    Ok(out)
}
