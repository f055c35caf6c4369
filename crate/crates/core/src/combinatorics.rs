//! Partitions, words and the counting formulas that tie the three state spaces together.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Checks `n > q >= 1`, `p >= 1` and that letters fit in one decimal digit.
pub fn validate_params(n: usize, p: usize, q: usize) -> Result<()> {
    let reason = if q == 0 {
        Some("need q >= 1")
    } else if n <= q {
        Some("need n > q")
    } else if p == 0 {
        Some("need p >= 1")
    } else if p > 9 {
        Some("species are rendered as single digits, need p <= 9")
    } else {
        None
    };
    match reason {
        Some(r) => Err(Error::InvalidParams {
            n,
            p,
            q,
            reason: r.to_string(),
        }),
        None => Ok(()),
    }
}

/// A partition with positive, weakly decreasing parts (no zero padding).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<u8>);

impl Partition {
    /// Sorts the given parts into weakly decreasing order; zero parts are dropped.
    pub fn new(mut parts: Vec<u8>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// The partition `1^q`.
    pub fn ones(q: usize) -> Self {
        Partition(vec![1; q])
    }

    pub fn parts(&self) -> &[u8] {
        &self.0
    }

    /// Number of positive parts, `l(lambda)`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|lambda|`.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    /// `m_i(lambda)`.
    pub fn multiplicity(&self, i: u8) -> usize {
        self.0.iter().filter(|&&x| x == i).count()
    }

    pub fn largest_part(&self) -> u8 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Distinct part values, largest first.
    pub fn distinct_parts(&self) -> Vec<u8> {
        let mut v = self.0.clone();
        v.dedup();
        v
    }

    /// Raises one part equal to `i` to `i + 1`, if there is one.
    pub fn raise(&self, i: u8) -> Option<Partition> {
        let pos = self.0.iter().position(|&x| x == i)?;
        let mut v = self.0.clone();
        v[pos] += 1;
        Some(Partition(v))
    }

    /// Lowers one part equal to `i` to `i - 1`, if there is one; parts never drop to zero.
    pub fn lower(&self, i: u8) -> Option<Partition> {
        if i <= 1 {
            return None;
        }
        let pos = self.0.iter().rposition(|&x| x == i)?;
        let mut v = self.0.clone();
        v[pos] -= 1;
        Some(Partition(v))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("partition {s:?} must be parenthesized")))?;
        let mut parts = Vec::new();
        for piece in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            parts.push(
                piece
                    .parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad part {piece:?}")))?,
            );
        }
        let p = Partition::new(parts.clone());
        if parts.contains(&0) || p.0 != parts {
            return Err(Error::Parse(format!(
                "partition {s:?} must list positive parts in weakly decreasing order"
            )));
        }
        Ok(p)
    }
}

/// A fixed-length word over `{0, ..., p}`; binary words and DASEP states are both words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of nonzero letters.
    pub fn particles(&self) -> usize {
        self.0.iter().filter(|&&x| x != 0).count()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&x| x <= 1)
    }

    /// The word shifted left by `k` positions (cyclically).
    pub fn rotate_left(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Word(v)
    }

    /// The word with the letters at positions `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Word {
        let mut v = self.0.clone();
        v.swap(i, j);
        Word(v)
    }

    pub fn with_letter(&self, i: usize, letter: u8) -> Word {
        let mut v = self.0.clone();
        v[i] = letter;
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// A state `(w, lambda)` of the colored Boolean process.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CbpState {
    pub word: Word,
    pub shape: Partition,
}

impl fmt::Display for CbpState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.word, self.shape)
    }
}

impl FromStr for CbpState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("state {s:?} must be parenthesized")))?;
        let (w, shape) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("state {s:?} needs a word and a shape")))?;
        Ok(CbpState {
            word: w.parse()?,
            shape: shape.parse()?,
        })
    }
}

/// Partitions with exactly `q` parts, each at most `p`, in increasing lexicographic order.
pub fn enumerate_chi(p: usize, q: usize) -> Vec<Partition> {
    fn rec(p: u8, remaining: usize, cur: &mut Vec<u8>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        let cap = cur.last().copied().unwrap_or(p);
        for x in 1..=cap {
            cur.push(x);
            rec(p, remaining - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p == 0 || q == 0 {
        return out;
    }
    rec(p as u8, q, &mut Vec::with_capacity(q), &mut out);
    out
}

/// All binary words of length `n` with `q` ones, in lexicographic order.
pub fn enumerate_words(n: usize, q: usize) -> Vec<Word> {
    fn rec(n: usize, q: usize, cur: &mut Vec<u8>, out: &mut Vec<Word>) {
        let placed = cur.iter().filter(|&&x| x == 1).count();
        if cur.len() == n {
            if placed == q {
                out.push(Word(cur.clone()));
            }
            return;
        }
        let left = n - cur.len();
        if placed + left > q {
            cur.push(0);
            rec(n, q, cur, out);
            cur.pop();
        }
        if placed < q {
            cur.push(1);
            rec(n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(n, q, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// The DASEP state space: words of length `n` with exactly `q` nonzero letters, each `<= p`,
/// in lexicographic order with `0 < 1 < ... < p`.
pub fn enumerate_gamma(n: usize, p: usize, q: usize) -> Vec<Word> {
    fn rec(n: usize, p: u8, q: usize, cur: &mut Vec<u8>, out: &mut Vec<Word>) {
        let placed = cur.iter().filter(|&&x| x != 0).count();
        if cur.len() == n {
            if placed == q {
                out.push(Word(cur.clone()));
            }
            return;
        }
        let left = n - cur.len();
        if placed + left > q {
            cur.push(0);
            rec(n, p, q, cur, out);
            cur.pop();
        }
        if placed < q {
            for x in 1..=p {
                cur.push(x);
                rec(n, p, q, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(n, p as u8, q, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// The colored Boolean state space, word-major: `enumerate_words(n, q) x enumerate_chi(p, q)`.
pub fn enumerate_omega(n: usize, p: usize, q: usize) -> Vec<CbpState> {
    let shapes = enumerate_chi(p, q);
    enumerate_words(n, q)
        .into_iter()
        .flat_map(|w| {
            shapes.iter().map(move |s| CbpState {
                word: w.clone(),
                shape: s.clone(),
            })
        })
        .collect()
}

/// `mu -> (w, lambda)`: the occupation word and the multiset of species.
pub fn decompose(mu: &Word) -> CbpState {
    let word = Word(mu.0.iter().map(|&x| u8::from(x != 0)).collect());
    let shape = Partition::new(mu.0.iter().copied().filter(|&x| x != 0).collect());
    CbpState { word, shape }
}

/// Which arrangement set [`count_arrangements`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrangementMode {
    /// `|S_n(lambda)|`: all placements of the padded partition on `n` sites.
    All,
    /// `|S_n^w(lambda)|`: placements whose zeros sit where a fixed binary word has zeros.
    Aligned,
}

/// Multinomial coefficient `(sum k)! / prod k!`.
pub fn multinomial(ks: &[usize]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0usize;
    for &k in ks {
        for j in 1..=k {
            total += 1;
            acc *= BigUint::from(total);
            acc /= BigUint::from(j);
        }
    }
    acc
}

/// Counts `S_n(lambda)` or `S_n^w(lambda)` by the multinomial formula.
pub fn count_arrangements(lambda: &Partition, n: usize, mode: ArrangementMode) -> BigUint {
    let mut ks: Vec<usize> = lambda
        .distinct_parts()
        .into_iter()
        .map(|i| lambda.multiplicity(i))
        .collect();
    if mode == ArrangementMode::All {
        ks.push(n.saturating_sub(lambda.len()));
    }
    multinomial(&ks)
}

/// Lexicographically least rotation, with the smallest left shift that produces it.
pub fn canonical_rotation(mu: &Word) -> (Word, usize) {
    let mut best = mu.clone();
    let mut shift = 0;
    for k in 1..mu.len() {
        let r = mu.rotate_left(k);
        if r < best {
            best = r;
            shift = k;
        }
    }
    (best, shift)
}

/// Number of maximal cyclic runs of 1s in a binary word.
pub fn block_count(w: &Word) -> Result<usize> {
    let ones = w.0.iter().filter(|&&x| x == 1).count();
    if ones == 0 || ones == w.len() {
        return Err(Error::AllOnesOrAllZeros);
    }
    let n = w.len();
    Ok((0..n)
        .filter(|&i| w.0[i] == 1 && w.0[(i + 1) % n] == 0)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn chi_examples() {
        let chi: Vec<String> = enumerate_chi(2, 2).iter().map(|p| p.to_string()).collect();
        assert_eq!(chi, ["(1,1)", "(2,1)", "(2,2)"]);
        assert_eq!(enumerate_chi(1, 3), vec![part("(1,1,1)")]);
        // Pairs 3 >= a >= b >= 1 counted by brute force.
        let brute = (1..=3)
            .flat_map(|a| (1..=3).map(move |b| (a, b)))
            .filter(|(a, b)| a >= b)
            .count();
        assert_eq!(enumerate_chi(3, 2).len(), brute);
        assert_eq!(brute, 6);
    }

    #[test]
    fn word_examples() {
        let words: Vec<String> = enumerate_words(3, 2)
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(words, ["011", "101", "110"]);
        assert_eq!(enumerate_words(6, 5).len(), 6);
        assert_eq!(enumerate_words(5, 2).len(), 10);
    }

    #[test]
    fn gamma_examples() {
        let g: Vec<String> = enumerate_gamma(2, 2, 1)
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(g, ["01", "02", "10", "20"]);
        assert_eq!(enumerate_gamma(3, 2, 2).len(), 12);
        assert_eq!(enumerate_gamma(5, 3, 2).len(), 90);
        let g = enumerate_gamma(5, 3, 2);
        assert!(g.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose(&w("021")),
            CbpState {
                word: w("011"),
                shape: part("(2,1)")
            }
        );
        assert_eq!(decompose(&w("0101")).shape, part("(1,1)"));
        for mu in ["0012", "0021"] {
            assert_eq!(decompose(&w(mu)).to_string(), "(0011,(2,1))");
        }
    }

    #[test]
    fn arrangement_counts() {
        let l21 = part("(2,1)");
        assert_eq!(
            count_arrangements(&l21, 4, ArrangementMode::All),
            BigUint::from(12u32)
        );
        assert_eq!(
            count_arrangements(&l21, 3, ArrangementMode::Aligned),
            BigUint::from(2u32)
        );
        for n in 3..8 {
            assert_eq!(
                count_arrangements(&part("(1,1)"), n, ArrangementMode::Aligned),
                BigUint::from(1u32)
            );
        }
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(canonical_rotation(&w("0201")), (w("0102"), 2));
        assert_eq!(canonical_rotation(&w("0102")), (w("0102"), 0));
        let mu = w("02013");
        let canon = canonical_rotation(&mu).0;
        for k in 0..mu.len() {
            assert_eq!(canonical_rotation(&mu.rotate_left(k)).0, canon);
        }
    }

    #[test]
    fn block_examples() {
        assert_eq!(block_count(&w("0101")), Ok(2));
        assert_eq!(block_count(&w("1001")), Ok(1));
        assert_eq!(block_count(&w("0011")), Ok(1));
        assert_eq!(block_count(&w("1111")), Err(Error::AllOnesOrAllZeros));
        assert_eq!(block_count(&w("000")), Err(Error::AllOnesOrAllZeros));
    }

    #[test]
    fn partition_moves() {
        let l = part("(2,1,1)");
        assert_eq!(l.raise(1), Some(part("(2,2,1)")));
        assert_eq!(l.lower(2), Some(part("(1,1,1)")));
        assert_eq!(l.lower(1), None);
        assert_eq!(part("(2,2,1)").lower(2), Some(part("(2,1,1)")));
        assert_eq!(l.multiplicity(1), 2);
        assert_eq!(l.weight(), 4);
    }

    #[test]
    fn parse_errors() {
        assert!("(1,2)".parse::<Partition>().is_err());
        assert!("1,2".parse::<Partition>().is_err());
        assert!("01a".parse::<Word>().is_err());
        assert!(validate_params(2, 1, 2).is_err());
        assert!(validate_params(3, 0, 1).is_err());
        assert!(validate_params(3, 1, 0).is_err());
        assert!(validate_params(3, 2, 2).is_ok());
    }
}
