//! Polynomial gcd in Q[u,t], viewed as (Q[u])[t].
//!
//! Contents with respect to `t` are univariate polynomials in `u` and are combined
//! with a primitive pseudo-remainder sequence; primitive parts go through the
//! subresultant pseudo-remainder sequence so every intermediate stays in Q[u][t].

use super::{BivarPoly, Monomial};
use crate::modular::{primes, upoly, Field};

/// Greatest common divisor, normalized to integer coefficients with content 1 and a
/// positive leading coefficient (lex order, `u > t`). `gcd(0, 0) = 0`.
pub fn gcd(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    if a.is_constant() || b.is_constant() {
        return BivarPoly::one();
    }
    let ca = content_t(a);
    let cb = content_t(b);
    let content = gcd_u(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let prim = primitive_gcd(pa, pb);
    normalize(&(&content * &prim))
}

/// Gcd of a list of polynomials, with the same normalization as [`gcd`].
/// Zero entries are ignored; an all-zero (or empty) list yields zero.
pub fn content_gcd(v: &[BivarPoly]) -> BivarPoly {
    let mut order: Vec<&BivarPoly> = v.iter().filter(|p| !p.is_zero()).collect();
    order.sort_by_key(|p| (p.total_degree(), p.num_terms()));
    if order.len() > 1 && certified_coprime(&order) {
        return BivarPoly::one();
    }
    let mut acc = BivarPoly::zero();
    for p in order {
        acc = gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

/// Cheap exact proof that a list of nonzero polynomials has gcd 1.
///
/// Suppose an integer primitive `G` of positive `u`-degree divides every input. If the
/// leading `u`-coefficient of the first input is nonzero at `t = t0` modulo `p`, the same
/// holds for `G` (Gauss's lemma), so the images mod `p` at `t = t0` share a factor of
/// positive degree. Coprime images therefore rule out such a `G`; swapping the roles of
/// `u` and `t` rules out the rest. `false` means "not certified", not "not coprime".
fn certified_coprime(v: &[&BivarPoly]) -> bool {
    primes()
        .take(3)
        .any(|p| coprime_mod(Field::new(p), v, false) && coprime_mod(Field::new(p), v, true))
}

/// Images in `F_p[x]` where `x` is `u` (or `t` when `in_t`) and the other variable is `y0`.
fn univariate_image(f: Field, p: &BivarPoly, in_t: bool, y0: u64) -> Option<Vec<u64>> {
    let deg = if in_t { p.degree_t() } else { p.degree_u() } as usize;
    let mut out = vec![0u64; deg + 1];
    for (m, c) in p.terms() {
        let (main, other) = if in_t { (m.t, m.u) } else { (m.u, m.t) };
        let c = f.from_rational(c)?;
        let term = f.mul(c, f.pow(y0, u64::from(other)));
        out[main as usize] = f.add(out[main as usize], term);
    }
    Some(out)
}

fn coprime_mod(f: Field, v: &[&BivarPoly], in_t: bool) -> bool {
    let anchor_deg = if in_t {
        v[0].degree_t()
    } else {
        v[0].degree_u()
    } as usize;
    for y0 in [7u64, 13, 29, 101] {
        let Some(anchor) = univariate_image(f, v[0], in_t, y0) else {
            return false;
        };
        if anchor[anchor_deg] == 0 {
            continue;
        }
        let mut acc = upoly::trim(anchor);
        for p in &v[1..] {
            if acc.len() <= 1 {
                break;
            }
            let Some(img) = univariate_image(f, p, in_t, y0) else {
                return false;
            };
            acc = upoly::gcd(f, &acc, &img);
        }
        if acc.len() <= 1 {
            return true;
        }
    }
    false
}

fn normalize(p: &BivarPoly) -> BivarPoly {
    if p.is_zero() {
        return BivarPoly::zero();
    }
    p.integer_primitive().1
}

/// Gcd of polynomials that are primitive in `t`; the result is primitive in `t`.
fn primitive_gcd(a: BivarPoly, b: BivarPoly) -> BivarPoly {
    let (mut a, mut b) = if a.degree_t() >= b.degree_t() {
        (a, b)
    } else {
        (b, a)
    };
    if b.degree_t() == 0 {
        // b is primitive and free of t, hence a unit.
        return BivarPoly::one();
    }
    let mut g = BivarPoly::one();
    let mut h = BivarPoly::one();
    loop {
        let delta = a.degree_t() - b.degree_t();
        let r = prem_t(&a, &b);
        if r.is_zero() {
            break;
        }
        if r.degree_t() == 0 {
            return BivarPoly::one();
        }
        let divisor = &g * &h.pow(delta);
        a = b;
        b = r
            .exact_div(&divisor)
            .expect("subresultant division is exact");
        g = lc_t(&a);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    }
    let c = content_t(&b);
    b.exact_div(&c).expect("content divides")
}

fn lc_t(p: &BivarPoly) -> BivarPoly {
    p.coeff_t(p.degree_t())
}

/// Pseudo-remainder of `a` by `b` as polynomials in `t`: `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem_t(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    let db = b.degree_t();
    let lcb = lc_t(b);
    let mut r = a.clone();
    let mut steps_left = a.degree_t() + 1 - db;
    while !r.is_zero() && r.degree_t() >= db {
        let shift = r.degree_t() - db;
        let lead = lc_t(&r).mul_t_pow(shift);
        r = &(&lcb * &r) - &(&lead * b);
        steps_left -= 1;
    }
    &lcb.pow(steps_left) * &r
}

/// Content of `p` with respect to `t`: gcd of its coefficients in Q[u].
fn content_t(p: &BivarPoly) -> BivarPoly {
    let mut acc = BivarPoly::zero();
    for k in 0..=p.degree_t() {
        let c = p.coeff_t(k);
        if c.is_zero() {
            continue;
        }
        acc = gcd_u(&acc, &c);
        if acc.is_constant() {
            return BivarPoly::one();
        }
    }
    acc
}

/// Monic gcd of two polynomials in `u` alone, via a primitive pseudo-remainder
/// sequence over Z. Zero only if both are zero.
fn gcd_u(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if a.degree_u() < b.degree_u() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = primitive(&prem_u(&a, &b));
        a = b;
        b = r;
    }
    match a.leading_term() {
        None => BivarPoly::zero(),
        Some((_, c)) => {
            let inv = c.recip();
            a.scale(&inv)
        }
    }
}

fn primitive(p: &BivarPoly) -> BivarPoly {
    if p.is_zero() {
        BivarPoly::zero()
    } else {
        p.integer_primitive().1
    }
}

/// Pseudo-remainder in `u` of integer polynomials: stays in Z[u].
fn prem_u(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    let (bm, bc) = b.leading_term().expect("nonzero divisor");
    let bc = BivarPoly::constant(bc.clone());
    let mut r = a.clone();
    while let Some((m, c)) = r.leading_term() {
        if m.u < bm.u {
            break;
        }
        let lead = b.mul_term(Monomial::new(m.u - bm.u, 0), c);
        r = &(&bc * &r) - &lead;
    }
    r
}
