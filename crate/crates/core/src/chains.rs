//! The three transition systems: DASEP on `Gamma`, the colored Boolean process on `Omega`,
//! and the restricted random growth model on `chi`.
//!
//! Every rate is stored multiplied by the common denominator `3n`, so all matrix
//! entries are polynomials in `u` and `t`. Only off-diagonal entries are stored; the
//! diagonal is implied by `scale - (row sum)`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{BivarPoly, Rational};
use crate::combinatorics::{
    enumerate_chi, enumerate_gamma, enumerate_omega, validate_params, CbpState, Partition, Word,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Dasep,
    Cbp,
    Rrg,
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::Dasep => "dasep",
            ChainKind::Cbp => "cbp",
            ChainKind::Rrg => "rrg",
        })
    }
}

impl std::str::FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dasep" => Ok(ChainKind::Dasep),
            "cbp" => Ok(ChainKind::Cbp),
            "rrg" => Ok(ChainKind::Rrg),
            other => Err(Error::Parse(format!("unknown chain {other:?}"))),
        }
    }
}

/// `(n, p, q)`: sites, species, particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl Params {
    pub fn new(n: usize, p: usize, q: usize) -> Result<Self> {
        validate_params(n, p, q)?;
        Ok(Params { n, p, q })
    }

    /// The common denominator `3n` of every transition probability.
    pub fn scale(&self) -> u64 {
        3 * self.n as u64
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.p, self.q)
    }
}

/// A state of one of the three chains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Dasep(Word),
    Cbp(CbpState),
    Rrg(Partition),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Dasep(w) => w.fmt(f),
            State::Cbp(s) => s.fmt(f),
            State::Rrg(l) => l.fmt(f),
        }
    }
}

impl State {
    pub fn parse(kind: ChainKind, s: &str) -> Result<State> {
        Ok(match kind {
            ChainKind::Dasep => State::Dasep(s.parse()?),
            ChainKind::Cbp => State::Cbp(s.parse()?),
            ChainKind::Rrg => State::Rrg(s.parse()?),
        })
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            State::Dasep(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_cbp(&self) -> Option<&CbpState> {
        match self {
            State::Cbp(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_partition(&self) -> Option<&Partition> {
        match self {
            State::Rrg(l) => Some(l),
            _ => None,
        }
    }
}

/// Finite state set with sparse off-diagonal rates scaled by `3n`.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    kind: ChainKind,
    params: Params,
    scale: u64,
    states: Vec<State>,
    index: HashMap<State, usize>,
    rows: Vec<BTreeMap<usize, BivarPoly>>,
}

impl TransitionSystem {
    /// An edgeless system over `states`.
    pub fn new(kind: ChainKind, params: Params, scale: u64, states: Vec<State>) -> Self {
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let rows = vec![BTreeMap::new(); states.len()];
        TransitionSystem {
            kind,
            params,
            scale,
            states,
            index,
            rows,
        }
    }

    /// Adds `rate` to the scaled off-diagonal entry `(from, to)`.
    pub fn add_rate(&mut self, from: usize, to: usize, rate: &BivarPoly) -> Result<()> {
        if from == to || from >= self.len() || to >= self.len() {
            return Err(Error::IndexMismatch(format!(
                "cannot store rate at ({from},{to}) in a system with {} states",
                self.len()
            )));
        }
        let entry = self.rows[from].entry(to).or_default();
        *entry += rate;
        if entry.is_zero() {
            self.rows[from].remove(&to);
        }
        Ok(())
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.to_string()).collect()
    }

    /// Stored off-diagonal scaled rates out of `from`, ordered by target index.
    pub fn row(&self, from: usize) -> &BTreeMap<usize, BivarPoly> {
        &self.rows[from]
    }

    /// Implicit diagonal `scale - sum of the row`.
    pub fn diagonal(&self, i: usize) -> BivarPoly {
        let out: BivarPoly = self.rows[i].values().sum();
        &BivarPoly::from_int(self.scale as i64) - &out
    }

    /// Scaled entry `(from, to)`, diagonal included.
    pub fn rate(&self, from: usize, to: usize) -> BivarPoly {
        if from == to {
            self.diagonal(from)
        } else {
            self.rows[from].get(&to).cloned().unwrap_or_default()
        }
    }

    /// All stored edges `(from, to, scaled rate)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &BivarPoly)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, r)| (i, *j, r)))
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    /// True when two distinct moves can connect the same ordered pair, so stored rates
    /// are sums. This happens only on a ring of two sites, where the interior swap and
    /// the wrap-around swap exchange the same two letters.
    pub fn has_summed_moves(&self) -> bool {
        self.kind != ChainKind::Rrg && self.params.n == 2
    }
}

fn rate_t() -> BivarPoly {
    BivarPoly::t()
}

fn rate_one() -> BivarPoly {
    BivarPoly::one()
}

/// DASEP(n, p, q) on `Gamma^{p,q}_n`.
pub fn build_dasep(n: usize, p: usize, q: usize) -> Result<TransitionSystem> {
    let params = Params::new(n, p, q)?;
    let states: Vec<State> = enumerate_gamma(n, p, q)
        .into_iter()
        .map(State::Dasep)
        .collect();
    let mut sys = TransitionSystem::new(ChainKind::Dasep, params, params.scale(), states);
    let p = p as u8;
    for from in 0..sys.len() {
        let mu = sys.states[from].as_word().expect("dasep state").clone();
        let letters = mu.letters().to_vec();
        let mut moves: Vec<(Word, BivarPoly)> = Vec::new();
        // Neighbouring sites (k, k+1): (i, j) -> (j, i) at rate t if i > j, else 1.
        for k in 0..n - 1 {
            let (i, j) = (letters[k], letters[k + 1]);
            if i != j {
                let rate = if i > j { rate_t() } else { rate_one() };
                moves.push((mu.swapped(k, k + 1), rate));
            }
        }
        // Wrap-around: mu = (i, ..., j) -> (j, ..., i) at rate t if j > i, else 1.
        let (i, j) = (letters[0], letters[n - 1]);
        if i != j {
            let rate = if j > i { rate_t() } else { rate_one() };
            moves.push((mu.swapped(0, n - 1), rate));
        }
        for (k, &x) in letters.iter().enumerate() {
            if x >= 1 && x < p {
                moves.push((mu.with_letter(k, x + 1), BivarPoly::u()));
            }
            if x >= 2 {
                moves.push((mu.with_letter(k, x - 1), rate_one()));
            }
        }
        for (nu, rate) in moves {
            let to = sys
                .index_of(&State::Dasep(nu))
                .expect("move stays in Gamma");
            sys.add_rate(from, to, &rate)?;
        }
    }
    Ok(sys)
}

/// Shape moves shared by the colored Boolean process and the growth model:
/// raise a part `i` at rate `m_i u`, lower a part `i >= 2` at rate `m_i`.
fn shape_moves(shape: &Partition, p: u8) -> Vec<(Partition, BivarPoly)> {
    let mut out = Vec::new();
    for i in shape.distinct_parts() {
        let m = shape.multiplicity(i) as i64;
        if i < p {
            let raised = shape.raise(i).expect("part present");
            out.push((raised, BivarPoly::u().scale_int(m)));
        }
        if let Some(lowered) = shape.lower(i) {
            out.push((lowered, BivarPoly::from_int(m)));
        }
    }
    out
}

/// The colored Boolean process on `Omega^{p,q}_n`.
pub fn build_cbp(n: usize, p: usize, q: usize) -> Result<TransitionSystem> {
    let params = Params::new(n, p, q)?;
    let states: Vec<State> = enumerate_omega(n, p, q)
        .into_iter()
        .map(State::Cbp)
        .collect();
    let mut sys = TransitionSystem::new(ChainKind::Cbp, params, params.scale(), states);
    for from in 0..sys.len() {
        let st = sys.states[from].as_cbp().expect("cbp state").clone();
        let mut moves: Vec<(CbpState, BivarPoly)> = Vec::new();
        for (shape, rate) in shape_moves(&st.shape, p as u8) {
            moves.push((
                CbpState {
                    word: st.word.clone(),
                    shape,
                },
                rate,
            ));
        }
        // Cyclic neighbours (k, k+1 mod n): 01 -> 10 at rate 1, 10 -> 01 at rate t.
        let w = st.word.letters();
        for k in 0..n {
            let k1 = (k + 1) % n;
            let rate = match (w[k], w[k1]) {
                (0, 1) => rate_one(),
                (1, 0) => rate_t(),
                _ => continue,
            };
            moves.push((
                CbpState {
                    word: st.word.swapped(k, k1),
                    shape: st.shape.clone(),
                },
                rate,
            ));
        }
        for (next, rate) in moves {
            let to = sys
                .index_of(&State::Cbp(next))
                .expect("move stays in Omega");
            sys.add_rate(from, to, &rate)?;
        }
    }
    Ok(sys)
}

/// The restricted random growth model on `chi^{p,q}`; `n` only sets the scale `3n`.
pub fn build_rrg(n: usize, p: usize, q: usize) -> Result<TransitionSystem> {
    let params = Params::new(n, p, q)?;
    let states: Vec<State> = enumerate_chi(p, q).into_iter().map(State::Rrg).collect();
    let mut sys = TransitionSystem::new(ChainKind::Rrg, params, params.scale(), states);
    for from in 0..sys.len() {
        let shape = sys.states[from].as_partition().expect("rrg state").clone();
        for (next, rate) in shape_moves(&shape, p as u8) {
            let to = sys.index_of(&State::Rrg(next)).expect("move stays in chi");
            sys.add_rate(from, to, &rate)?;
        }
    }
    Ok(sys)
}

pub fn build(kind: ChainKind, n: usize, p: usize, q: usize) -> Result<TransitionSystem> {
    match kind {
        ChainKind::Dasep => build_dasep(n, p, q),
        ChainKind::Cbp => build_cbp(n, p, q),
        ChainKind::Rrg => build_rrg(n, p, q),
    }
}

/// Outcome of a successful [`check_stochastic`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StochasticReport {
    pub rows: usize,
    pub u: String,
    pub t: String,
}

/// Evaluates every row at `(u0, t0)` and checks that it is a probability vector.
pub fn check_stochastic(
    sys: &TransitionSystem,
    u0: &Rational,
    t0: &Rational,
) -> Result<StochasticReport> {
    let zero = Rational::zero();
    let one = Rational::one();
    if *u0 < zero || *u0 > one || *t0 < zero || *t0 > one {
        return Err(Error::InvalidConfig(format!(
            "stochasticity is only defined for 0 <= u,t <= 1, got u={u0}, t={t0}"
        )));
    }
    let scale = Rational::from_integer(sys.scale().into());
    for i in 0..sys.len() {
        let fail = |detail: String| Error::NotStochastic {
            row: i,
            state: sys.state(i).to_string(),
            detail,
        };
        let mut total = Rational::zero();
        for (j, rate) in sys.row(i) {
            let prob = rate.eval(u0, t0) / &scale;
            if prob.is_negative() || prob > one {
                return Err(fail(format!("entry to {} is {prob}", sys.state(*j))));
            }
            total += prob;
        }
        let diag = sys.diagonal(i).eval(u0, t0) / &scale;
        if diag.is_negative() || diag > one {
            return Err(fail(format!("diagonal entry is {diag}")));
        }
        total += diag;
        if total != one {
            return Err(fail(format!("row sums to {total}")));
        }
    }
    Ok(StochasticReport {
        rows: sys.len(),
        u: u0.to_string(),
        t: t0.to_string(),
    })
}

/// Strong connectivity of the graph of nonzero off-diagonal rates.
pub fn check_irreducible(sys: &TransitionSystem) -> bool {
    let n = sys.len();
    if n <= 1 {
        return true;
    }
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in sys.edges() {
        reverse[j].push(i);
    }
    let reach = |next: &dyn Fn(usize) -> Vec<usize>| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for y in next(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(&|x| sys.row(x).keys().copied().collect()) && reach(&|x| reverse[x].clone())
}

/// Renders a scaled rate as a probability label, e.g. `u/6` or `(t + 1)/6`.
pub fn probability_label(rate: &BivarPoly, scale: u64) -> String {
    if rate.num_terms() <= 1 {
        format!("{rate}/{scale}")
    } else {
        format!("({rate})/{scale}")
    }
}

/// Deterministic Graphviz digraph. Self-loops are omitted.
pub fn export_dot(sys: &TransitionSystem) -> String {
    let mut out = String::new();
    let p = sys.params();
    let _ = writeln!(out, "digraph {}_{}_{}_{} {{", sys.kind(), p.n, p.p, p.q);
    if sys.has_summed_moves() {
        let _ = writeln!(
            out,
            "  // n = 2: the interior and wrap-around swaps coincide, so swap rates are summed"
        );
    }
    for (i, s) in sys.states().iter().enumerate() {
        let _ = writeln!(out, "  s{i} [label=\"{s}\"];");
    }
    for (i, j, rate) in sys.edges() {
        let _ = writeln!(
            out,
            "  s{i} -> s{j} [label=\"{}\"];",
            probability_label(rate, sys.scale())
        );
    }
    out.push_str("}\n");
    out
}

/// One row of the JSON matrix dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub from: String,
    pub to: String,
    pub rate: String,
    pub scale: u64,
}

/// Off-diagonal entries as `(from, to, scaled rate, scale)` records.
pub fn matrix_entries(sys: &TransitionSystem) -> Vec<MatrixEntry> {
    sys.edges()
        .map(|(i, j, r)| MatrixEntry {
            from: sys.state(i).to_string(),
            to: sys.state(j).to_string(),
            rate: r.to_string(),
            scale: sys.scale(),
        })
        .collect()
}
