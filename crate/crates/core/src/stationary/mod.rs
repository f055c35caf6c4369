//! Exact stationary distributions.
//!
//! Symbolic solutions are polynomial vectors in `u, t` with integer coefficients whose
//! gcd is 1; point solutions are exact rational probability vectors.

mod bareiss;
mod interpolate;
mod point;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::algebra::{content_gcd, BivarPoly, Rational};
use crate::chains::{check_irreducible, ChainKind, Params, State, TransitionSystem};
use crate::{Error, Result};

/// Resource limits for the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest total degree allowed in any intermediate or final polynomial.
    pub degree_cap: u32,
    /// Largest state count accepted by the symbolic solver.
    pub state_cap: usize,
    /// Largest state count accepted by the point solver.
    pub point_state_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            degree_cap: 64,
            state_cap: 400,
            point_state_cap: 100_000,
        }
    }
}

impl Limits {
    /// Defaults overridden by `DASEP_DEGREE_CAP` and `DASEP_STATE_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var("DASEP_DEGREE_CAP") {
            limits.degree_cap = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("DASEP_DEGREE_CAP={v:?}")))?;
        }
        if let Ok(v) = std::env::var("DASEP_STATE_CAP") {
            limits.state_cap = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("DASEP_STATE_CAP={v:?}")))?;
        }
        Ok(limits)
    }
}

/// Kernel algorithm used by the symbolic solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMethod {
    /// Fraction-free elimination for small systems, modular interpolation otherwise.
    #[default]
    Auto,
    FractionFree,
    Modular,
}

/// Systems up to this size use fraction-free elimination under [`KernelMethod::Auto`].
pub const FRACTION_FREE_MAX_STATES: usize = 12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub limits: Limits,
    pub method: KernelMethod,
}

/// How a stationary vector is scaled.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalization {
    /// Integer polynomial entries with gcd 1, positive at `u = t = 1`.
    GcdOne,
    /// Rational entries summing to 1 at the given point.
    ProbOneAt {
        u: Rational,
        t: Rational,
    },
    Unnormalized,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::GcdOne => write!(f, "gcd_one"),
            Normalization::ProbOneAt { u, t } => write!(f, "prob_one_at({u},{t})"),
            Normalization::Unnormalized => write!(f, "unnormalized"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Symbolic(Vec<BivarPoly>),
    Point(Vec<Rational>),
}

impl Entries {
    pub fn len(&self) -> usize {
        match self {
            Entries::Symbolic(v) => v.len(),
            Entries::Point(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A stationary vector indexed by the states of a transition system.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryVector {
    kind: ChainKind,
    params: Params,
    labels: Vec<String>,
    entries: Entries,
    normalization: Normalization,
}

impl StationaryVector {
    pub fn symbolic(
        sys: &TransitionSystem,
        entries: Vec<BivarPoly>,
        normalization: Normalization,
    ) -> Result<Self> {
        Self::with_entries(sys, Entries::Symbolic(entries), normalization)
    }

    pub fn point(
        sys: &TransitionSystem,
        entries: Vec<Rational>,
        normalization: Normalization,
    ) -> Result<Self> {
        Self::with_entries(sys, Entries::Point(entries), normalization)
    }

    fn with_entries(
        sys: &TransitionSystem,
        entries: Entries,
        normalization: Normalization,
    ) -> Result<Self> {
        if entries.len() != sys.len() {
            return Err(Error::IndexMismatch(format!(
                "{} entries for {} states",
                entries.len(),
                sys.len()
            )));
        }
        Ok(StationaryVector {
            kind: sys.kind(),
            params: sys.params(),
            labels: sys.labels(),
            entries,
            normalization,
        })
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    pub fn polys(&self) -> Option<&[BivarPoly]> {
        match &self.entries {
            Entries::Symbolic(v) => Some(v),
            Entries::Point(_) => None,
        }
    }

    pub fn values(&self) -> Option<&[Rational]> {
        match &self.entries {
            Entries::Point(v) => Some(v),
            Entries::Symbolic(_) => None,
        }
    }

    fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Symbolic entry for a state label.
    pub fn poly(&self, label: &str) -> Option<&BivarPoly> {
        self.polys()
            .and_then(|v| self.position(label).map(|i| &v[i]))
    }

    /// Point entry for a state label.
    pub fn value(&self, label: &str) -> Option<&Rational> {
        self.values()
            .and_then(|v| self.position(label).map(|i| &v[i]))
    }

    /// True when both vectors describe the same system (kind, parameters, state order).
    pub fn same_index(&self, sys: &TransitionSystem) -> bool {
        self.kind == sys.kind() && self.params == sys.params() && self.labels == sys.labels()
    }

    /// Evaluates a symbolic vector at a point and rescales it to sum 1.
    pub fn evaluate(&self, u0: &Rational, t0: &Rational) -> Result<StationaryVector> {
        let values: Vec<Rational> = match &self.entries {
            Entries::Symbolic(v) => v.iter().map(|p| p.eval(u0, t0)).collect(),
            Entries::Point(v) => v.clone(),
        };
        let values = normalize_sum(values)?;
        Ok(StationaryVector {
            kind: self.kind,
            params: self.params,
            labels: self.labels.clone(),
            entries: Entries::Point(values),
            normalization: Normalization::ProbOneAt {
                u: u0.clone(),
                t: t0.clone(),
            },
        })
    }

    /// JSON object with the chain, the normalization and a state-to-entry mapping.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        match &self.entries {
            Entries::Symbolic(v) => {
                for (l, p) in self.labels.iter().zip(v) {
                    map.insert(l.clone(), Value::String(p.to_string()));
                }
            }
            Entries::Point(v) => {
                for (l, x) in self.labels.iter().zip(v) {
                    map.insert(l.clone(), Value::String(rational_string(x)));
                }
            }
        }
        let normalization = match &self.normalization {
            Normalization::GcdOne => json!("gcd_one"),
            Normalization::Unnormalized => json!("unnormalized"),
            Normalization::ProbOneAt { u, t } => json!({
                "prob_one_at": { "u": rational_string(u), "t": rational_string(t) }
            }),
        };
        json!({
            "chain": self.kind.to_string(),
            "n": self.params.n,
            "p": self.params.p,
            "q": self.params.q,
            "mode": if self.polys().is_some() { "symbolic" } else { "point" },
            "normalization": normalization,
            "entries": Value::Object(map),
        })
    }

    /// Parses the output of [`StationaryVector::to_json`] against `sys`.
    pub fn from_json(sys: &TransitionSystem, value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
        let mode = obj
            .get("mode")
            .and_then(Value::as_str)
            .unwrap_or("symbolic");
        let entries = obj
            .get("entries")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing \"entries\" object".into()))?;
        if entries.len() != sys.len() {
            return Err(Error::IndexMismatch(format!(
                "{} entries for {} states",
                entries.len(),
                sys.len()
            )));
        }
        let lookup = |label: &String| -> Result<&str> {
            entries
                .get(label)
                .and_then(Value::as_str)
                .ok_or_else(|| Error::IndexMismatch(format!("no entry for state {label}")))
        };
        let normalization = match obj.get("normalization") {
            None => Normalization::Unnormalized,
            Some(Value::String(s)) if s == "gcd_one" => Normalization::GcdOne,
            Some(Value::String(s)) if s == "unnormalized" => Normalization::Unnormalized,
            Some(v) => {
                let at = v
                    .get("prob_one_at")
                    .ok_or_else(|| Error::Parse(format!("unknown normalization {v}")))?;
                let field = |k: &str| -> Result<Rational> {
                    at.get(k)
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse(format!("normalization lacks {k}")))
                        .and_then(parse_rational)
                };
                Normalization::ProbOneAt {
                    u: field("u")?,
                    t: field("t")?,
                }
            }
        };
        let labels = sys.labels();
        let entries = match mode {
            "symbolic" => Entries::Symbolic(
                labels
                    .iter()
                    .map(|l| lookup(l)?.parse::<BivarPoly>())
                    .collect::<Result<_>>()?,
            ),
            "point" => Entries::Point(
                labels
                    .iter()
                    .map(|l| parse_rational(lookup(l)?))
                    .collect::<Result<_>>()?,
            ),
            other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
        };
        Self::with_entries(sys, entries, normalization)
    }
}

/// `p/q` with a positive denominator, always including the slash.
pub fn rational_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p`, `p/q` or a decimal such as `0.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = int.abs() * &scale + frac_val;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, scale));
    }
    let num: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(num))
}

fn normalize_sum(values: Vec<Rational>) -> Result<Vec<Rational>> {
    let total: Rational = values.iter().sum();
    if total.is_zero() {
        return Err(Error::KernelDimensionNotOne(
            "stationary vector sums to zero".into(),
        ));
    }
    Ok(values.into_iter().map(|x| x / &total).collect())
}

/// Total outgoing rate of each state.
fn out_rates(sys: &TransitionSystem) -> Vec<BivarPoly> {
    (0..sys.len())
        .map(|i| sys.row(i).values().sum::<BivarPoly>())
        .collect()
}

/// Transposed generator `(scaled_P - scale I)^T` as `(row, col, entry)` triples.
fn transposed_generator(sys: &TransitionSystem) -> Vec<(usize, usize, BivarPoly)> {
    let mut out: Vec<(usize, usize, BivarPoly)> = sys
        .edges()
        .map(|(from, to, r)| (to, from, r.clone()))
        .collect();
    for (i, total) in out_rates(sys).into_iter().enumerate() {
        if !total.is_zero() {
            out.push((i, i, -total));
        }
    }
    out
}

/// Scales a polynomial vector to integer coefficients with gcd 1, positive at `u = t = 1`.
pub fn normalize_gcd(entries: &[BivarPoly]) -> Vec<BivarPoly> {
    let g = content_gcd(entries);
    if g.is_zero() {
        return entries.to_vec();
    }
    let mut out: Vec<BivarPoly> = if g.is_one() {
        entries.to_vec()
    } else {
        entries
            .iter()
            .map(|p| p.exact_div(&g).expect("gcd divides every entry"))
            .collect()
    };
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for p in &out {
        for (_, c) in p.terms() {
            den_lcm = den_lcm.lcm(c.denom());
        }
    }
    for p in &out {
        for (_, c) in p.terms() {
            num_gcd = num_gcd.gcd(&(c.numer() * (&den_lcm / c.denom())));
        }
    }
    let mut factor = Rational::new(den_lcm, num_gcd);
    let one = Rational::one();
    if let Some(first) = out.iter().find(|p| !p.is_zero()) {
        if first.eval(&one, &one).is_negative() {
            factor = -factor;
        }
    }
    for p in out.iter_mut() {
        *p = p.scale(&factor);
    }
    out
}

/// Outcome of a balance check.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    /// Nonzero residual components as `(state, residual)`.
    pub nonzero: Vec<(String, BivarPoly)>,
}

impl BalanceReport {
    pub fn is_zero(&self) -> bool {
        self.nonzero.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.is_zero(),
            "nonzero": self
                .nonzero
                .iter()
                .map(|(s, r)| json!({ "state": s, "residual": r.to_string() }))
                .collect::<Vec<_>>(),
        })
    }
}

fn residual(sys: &TransitionSystem, x: &[BivarPoly]) -> Vec<BivarPoly> {
    let mut res: Vec<BivarPoly> = out_rates(sys)
        .iter()
        .zip(x)
        .map(|(r, xi)| -(r * xi))
        .collect();
    for (from, to, rate) in sys.edges() {
        if !x[from].is_zero() {
            res[to] += &(&x[from] * rate);
        }
    }
    res
}

/// Residual `x^T (scaled_P - scale I)` of a symbolic candidate.
pub fn verify_balance(
    sys: &TransitionSystem,
    candidate: &StationaryVector,
) -> Result<BalanceReport> {
    if !candidate.same_index(sys) {
        return Err(Error::IndexMismatch(
            "candidate is indexed by a different system".into(),
        ));
    }
    let polys = candidate.polys().ok_or_else(|| {
        Error::IndexMismatch("balance verification needs a symbolic candidate".into())
    })?;
    Ok(balance_of(sys, polys))
}

pub(crate) fn balance_of(sys: &TransitionSystem, polys: &[BivarPoly]) -> BalanceReport {
    if balance_vanishes(sys, polys) {
        return BalanceReport {
            nonzero: Vec::new(),
        };
    }
    let nonzero = residual(sys, polys)
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(i, r)| (sys.state(i).to_string(), r))
        .collect();
    BalanceReport { nonzero }
}

/// Integer coefficients of `c * p` where `c` clears every denominator in `polys`.
fn integer_images(polys: &[&BivarPoly]) -> Vec<Vec<(u32, u32, BigInt)>> {
    let mut lcm = BigInt::one();
    for p in polys {
        for (_, c) in p.terms() {
            lcm = lcm.lcm(c.denom());
        }
    }
    polys
        .iter()
        .map(|p| {
            p.terms()
                .map(|(m, c)| (m.u, m.t, c.numer() * (&lcm / c.denom())))
                .collect()
        })
        .collect()
}

/// Exact test that `x^T (scaled_P - scale I)` vanishes, over Z with dense accumulators.
pub(crate) fn balance_vanishes(sys: &TransitionSystem, x: &[BivarPoly]) -> bool {
    let n = sys.len();
    let edges: Vec<(usize, usize, &BivarPoly)> = sys.edges().collect();
    let xs = integer_images(&x.iter().collect::<Vec<_>>());
    let rates = integer_images(&edges.iter().map(|e| e.2).collect::<Vec<_>>());
    let du = x.iter().map(BivarPoly::degree_u).max().unwrap_or(0)
        + edges.iter().map(|e| e.2.degree_u()).max().unwrap_or(0);
    let dt = x.iter().map(BivarPoly::degree_t).max().unwrap_or(0)
        + edges.iter().map(|e| e.2.degree_t()).max().unwrap_or(0);
    let width = dt as usize + 1;
    let cells = (du as usize + 1) * width;
    let mut acc: Vec<Vec<BigInt>> = vec![Vec::new(); n];
    for ((from, to, _), rate) in edges.iter().zip(&rates) {
        for (a, b, c) in &xs[*from] {
            for (ra, rb, rc) in rate {
                let idx = (a + ra) as usize * width + (b + rb) as usize;
                let prod = c * rc;
                for (target, sign) in [(*to, true), (*from, false)] {
                    let cell = &mut acc[target];
                    if cell.is_empty() {
                        cell.resize(cells, BigInt::zero());
                    }
                    if sign {
                        cell[idx] += &prod;
                    } else {
                        cell[idx] -= &prod;
                    }
                }
            }
        }
    }
    acc.iter().all(|cell| cell.iter().all(Zero::is_zero))
}

fn point_residual_is_zero(
    sys: &TransitionSystem,
    u0: &Rational,
    t0: &Rational,
    x: &[Rational],
) -> bool {
    let mut res: Vec<Rational> = vec![Rational::zero(); sys.len()];
    for (from, to, rate) in sys.edges() {
        let r = rate.eval(u0, t0);
        res[to] += &x[from] * &r;
        res[from] -= &x[from] * &r;
    }
    res.iter().all(Zero::is_zero)
}

/// Symbolic stationary vector with default limits and method.
pub fn solve_stationary_symbolic(sys: &TransitionSystem) -> Result<StationaryVector> {
    solve_stationary_symbolic_with(sys, &SolveOptions::default())
}

/// Symbolic stationary vector, gcd-1 normalized and verified against the balance equations.
pub fn solve_stationary_symbolic_with(
    sys: &TransitionSystem,
    opts: &SolveOptions,
) -> Result<StationaryVector> {
    let n = sys.len();
    if n > opts.limits.state_cap {
        return Err(Error::StateCapExceeded {
            states: n,
            cap: opts.limits.state_cap,
        });
    }
    if !check_irreducible(sys) {
        return Err(Error::KernelDimensionNotOne(
            "the chain is not irreducible".into(),
        ));
    }
    let method = match opts.method {
        KernelMethod::Auto if n <= FRACTION_FREE_MAX_STATES => KernelMethod::FractionFree,
        KernelMethod::Auto => KernelMethod::Modular,
        m => m,
    };
    let cap = opts.limits.degree_cap;
    let generator = transposed_generator(sys);
    let polys = match method {
        KernelMethod::FractionFree => {
            let mut dense = vec![vec![BivarPoly::zero(); n]; n];
            for (v, mu, p) in generator {
                dense[v][mu] += &p;
            }
            let raw = bareiss::kernel(&dense, cap)?;
            let polys = normalize_gcd(&raw);
            if !balance_vanishes(sys, &polys) {
                return Err(Error::KernelDimensionNotOne(
                    "fraction-free kernel failed the balance check".into(),
                ));
            }
            polys
        }
        _ => {
            let int_sys = interpolate::IntSystem::new(n, &generator);
            let mut accepted = None;
            interpolate::kernel_by_interpolation(&int_sys, cap, |candidate| {
                if !balance_vanishes(sys, candidate) {
                    return false;
                }
                let polys = normalize_gcd(candidate);
                if content_gcd(&polys).is_one() {
                    accepted = Some(polys);
                    true
                } else {
                    false
                }
            })?;
            accepted.expect("accepted candidate")
        }
    };
    if let Some(d) = polys.iter().map(BivarPoly::total_degree).max() {
        if d > cap {
            return Err(Error::DegreeCapExceeded { degree: d, cap });
        }
    }
    StationaryVector::symbolic(sys, polys, Normalization::GcdOne)
}

/// Dense rational elimination is used up to this many states.
const DENSE_RATIONAL_MAX_STATES: usize = 64;

/// Exact stationary probabilities at `(u0, t0)`, summing to 1.
pub fn solve_stationary_at_point(
    sys: &TransitionSystem,
    u0: &Rational,
    t0: &Rational,
) -> Result<StationaryVector> {
    solve_stationary_at_point_with(sys, u0, t0, &Limits::default())
}

pub fn solve_stationary_at_point_with(
    sys: &TransitionSystem,
    u0: &Rational,
    t0: &Rational,
    limits: &Limits,
) -> Result<StationaryVector> {
    let n = sys.len();
    if n > limits.point_state_cap {
        return Err(Error::StateCapExceeded {
            states: n,
            cap: limits.point_state_cap,
        });
    }
    let entries: Vec<(usize, usize, Rational)> = transposed_generator(sys)
        .into_iter()
        .map(|(v, mu, p)| (v, mu, p.eval(u0, t0)))
        .filter(|(_, _, x)| !x.is_zero())
        .collect();
    let raw = if n <= DENSE_RATIONAL_MAX_STATES {
        let mut dense = vec![vec![Rational::zero(); n]; n];
        for (v, mu, x) in entries {
            dense[v][mu] += x;
        }
        point::kernel_rational(dense)?
    } else {
        point::kernel_modular(n, &entries, |x| point_residual_is_zero(sys, u0, t0, x))?
    };
    let values = normalize_sum(raw)?;
    StationaryVector::point(
        sys,
        values,
        Normalization::ProbOneAt {
            u: u0.clone(),
            t: t0.clone(),
        },
    )
}

/// True iff every DASEP state has the same entry as each of its rotations.
pub fn check_cyclic_invariance(sys: &TransitionSystem, pi: &StationaryVector) -> bool {
    if sys.kind() != ChainKind::Dasep || !pi.same_index(sys) {
        return false;
    }
    (0..sys.len()).all(|i| {
        let Some(w) = sys.state(i).as_word() else {
            return false;
        };
        let rotated = State::Dasep(w.rotate_left(1));
        let Some(j) = sys.index_of(&rotated) else {
            return false;
        };
        match pi.entries() {
            Entries::Symbolic(v) => v[i] == v[j],
            Entries::Point(v) => v[i] == v[j],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::chains::{build_dasep, build_rrg};

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    #[test]
    fn table_entries_n3() {
        let sys = build_dasep(3, 2, 2).unwrap();
        let pi = solve_stationary_symbolic(&sys).unwrap();
        assert_eq!(pi.poly("011").unwrap(), &p("u+3*t+4"));
        assert_eq!(pi.poly("012").unwrap(), &p("u*(u+4*t+3)"));
        assert_eq!(pi.poly("021").unwrap(), &p("u*(u+2*t+5)"));
        assert_eq!(pi.poly("022").unwrap(), &p("u^2*(u+3*t+4)"));
        assert!(check_cyclic_invariance(&sys, &pi));
    }

    #[test]
    fn methods_agree() {
        for (kind, n, pp, q) in [
            (ChainKind::Dasep, 3, 2, 2),
            (ChainKind::Cbp, 3, 2, 2),
            (ChainKind::Cbp, 4, 2, 2),
            (ChainKind::Dasep, 4, 2, 1),
            (ChainKind::Rrg, 5, 3, 3),
        ] {
            {
                let sys = crate::chains::build(kind, n, pp, q).unwrap();
                let opts = |method| SolveOptions {
                    limits: Limits::default(),
                    method,
                };
                let a = solve_stationary_symbolic_with(&sys, &opts(KernelMethod::FractionFree))
                    .unwrap();
                let b = solve_stationary_symbolic_with(&sys, &opts(KernelMethod::Modular)).unwrap();
                assert_eq!(a, b, "{kind} {n} {pp} {q}");
            }
        }
    }

    #[test]
    fn table_entries_n4() {
        let sys = build_dasep(4, 2, 2).unwrap();
        let pi = solve_stationary_symbolic(&sys).unwrap();
        assert_eq!(pi.poly("0011").unwrap(), &p("u+2*t+3"));
        assert_eq!(pi.poly("0101").unwrap(), &p("u+2*t+3"));
        assert_eq!(pi.poly("0012").unwrap(), &p("u*(u+3*t+2)"));
        assert_eq!(pi.poly("0021").unwrap(), &p("u*(u+t+4)"));
        assert_eq!(pi.poly("0102").unwrap(), &p("u*(u+2*t+3)"));
        assert_eq!(pi.poly("0201").unwrap(), &p("u*(u+2*t+3)"));
        assert_eq!(pi.poly("0022").unwrap(), &p("u^2*(u+2*t+3)"));
    }

    #[test]
    fn uniform_when_single_species() {
        let sys = build_dasep(5, 1, 2).unwrap();
        let pi = solve_stationary_symbolic(&sys).unwrap();
        assert!(pi.polys().unwrap().iter().all(BivarPoly::is_one));
        let at = solve_stationary_at_point(&sys, &rat(2, 7), &rat(5, 3)).unwrap();
        assert!(at.values().unwrap().iter().all(|x| *x == rat(1, 10)));
    }

    #[test]
    fn point_solver_matches_evaluation() {
        let sys = build_dasep(3, 2, 2).unwrap();
        let pi = solve_stationary_symbolic(&sys).unwrap();
        let at = solve_stationary_at_point(&sys, &rat(1, 1), &rat(1, 1)).unwrap();
        assert_eq!(at.value("011"), at.value("022"));
        let (u0, t0) = (rat(1, 2), rat(1, 3));
        let at = solve_stationary_at_point(&sys, &u0, &t0).unwrap();
        assert_eq!(pi.evaluate(&u0, &t0).unwrap(), at);
    }

    #[test]
    fn balance_detects_non_stationary_vector() {
        let sys = build_dasep(3, 2, 2).unwrap();
        let ones = StationaryVector::symbolic(
            &sys,
            vec![BivarPoly::one(); sys.len()],
            Normalization::Unnormalized,
        )
        .unwrap();
        assert!(!verify_balance(&sys, &ones).unwrap().is_zero());
        let other = build_dasep(4, 2, 2).unwrap();
        assert!(matches!(
            verify_balance(&other, &ones),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn rrg_and_state_cap() {
        let sys = build_rrg(3, 2, 2).unwrap();
        let pi = solve_stationary_symbolic(&sys).unwrap();
        assert_eq!(pi.len(), 3);
        let opts = SolveOptions {
            limits: Limits {
                state_cap: 5,
                ..Limits::default()
            },
            method: KernelMethod::Auto,
        };
        let big = build_dasep(3, 2, 2).unwrap();
        assert!(matches!(
            solve_stationary_symbolic_with(&big, &opts),
            Err(Error::StateCapExceeded { states: 12, cap: 5 })
        ));
    }

    #[test]
    fn json_round_trip() {
        let sys = build_dasep(3, 2, 2).unwrap();
        let pi = solve_stationary_symbolic(&sys).unwrap();
        let back = StationaryVector::from_json(&sys, &pi.to_json()).unwrap();
        assert_eq!(back, pi);
        let at = pi.evaluate(&rat(1, 2), &rat(1, 3)).unwrap();
        let back = StationaryVector::from_json(&sys, &at.to_json()).unwrap();
        assert_eq!(back, at);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
