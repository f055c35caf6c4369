//! Strong lumpability checks and pushforward of stationary vectors.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::algebra::{BivarPoly, Rational};
use crate::chains::{ChainKind, State, TransitionSystem};
use crate::combinatorics::decompose;
use crate::stationary::{Entries, Normalization, StationaryVector};
use crate::{Error, Result};

/// A surjection from the states of `source` onto the states of `target`.
#[derive(Debug, Clone)]
pub struct LumpingMap<'a> {
    source: &'a TransitionSystem,
    target: &'a TransitionSystem,
    assignment: Vec<usize>,
}

impl<'a> LumpingMap<'a> {
    /// `assignment[i]` is the target index of source state `i`.
    pub fn new(
        source: &'a TransitionSystem,
        target: &'a TransitionSystem,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::IndexMismatch(format!(
                "assignment has {} entries for {} source states",
                assignment.len(),
                source.len()
            )));
        }
        let mut hit = vec![false; target.len()];
        for &y in &assignment {
            *hit.get_mut(y)
                .ok_or_else(|| Error::IndexMismatch(format!("target index {y} out of range")))? =
                true;
        }
        if let Some(y) = hit.iter().position(|h| !h) {
            return Err(Error::NotSurjective(target.state(y).to_string()));
        }
        Ok(LumpingMap {
            source,
            target,
            assignment,
        })
    }

    /// Builds the assignment from a state function.
    pub fn from_fn<F>(
        source: &'a TransitionSystem,
        target: &'a TransitionSystem,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&State) -> State,
    {
        let assignment = source
            .states()
            .iter()
            .map(|s| {
                let image = f(s);
                target.index_of(&image).ok_or_else(|| {
                    Error::IndexMismatch(format!(
                        "{s} maps to {image}, which is not a target state"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, assignment)
    }

    /// `mu -> (w, lambda)` from a DASEP onto the colored Boolean process.
    pub fn decompose(source: &'a TransitionSystem, target: &'a TransitionSystem) -> Result<Self> {
        expect_kinds(source, target, ChainKind::Dasep, ChainKind::Cbp)?;
        Self::from_fn(source, target, |s| {
            State::Cbp(decompose(s.as_word().expect("DASEP state")))
        })
    }

    /// `(w, lambda) -> lambda` from the colored Boolean process onto the growth chain.
    pub fn shape(source: &'a TransitionSystem, target: &'a TransitionSystem) -> Result<Self> {
        expect_kinds(source, target, ChainKind::Cbp, ChainKind::Rrg)?;
        Self::from_fn(source, target, |s| {
            State::Rrg(s.as_cbp().expect("CBP state").shape.clone())
        })
    }

    pub fn source(&self) -> &TransitionSystem {
        self.source
    }

    pub fn target(&self) -> &TransitionSystem {
        self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of source states over each target state.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.target.len()];
        for &y in &self.assignment {
            sizes[y] += 1;
        }
        sizes
    }
}

fn expect_kinds(
    source: &TransitionSystem,
    target: &TransitionSystem,
    from: ChainKind,
    to: ChainKind,
) -> Result<()> {
    if source.kind() != from || target.kind() != to || source.params() != target.params() {
        return Err(Error::IndexMismatch(format!(
            "expected {from} -> {to} with equal parameters, got {} {} -> {} {}",
            source.kind(),
            source.params(),
            target.kind(),
            target.params()
        )));
    }
    Ok(())
}

/// A target pair whose fiber sum disagrees with the target rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub y0: String,
    pub y1: String,
    pub x0: String,
    pub expected: BivarPoly,
    pub found: BivarPoly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LumpingReport {
    /// First violations found, at most [`MAX_VIOLATIONS`].
    pub violations: Vec<Violation>,
    /// Total number of violating triples.
    pub violation_count: usize,
}

pub const MAX_VIOLATIONS: usize = 10;

impl LumpingReport {
    pub fn pass(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass(),
            "violation_count": self.violation_count,
            "violations": self.violations.iter().map(|v| json!({
                "y0": v.y0,
                "y1": v.y1,
                "x0": v.x0,
                "expected": v.expected.to_string(),
                "found": v.found.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Full row of `scale * P`, diagonal included.
fn scaled_row(sys: &TransitionSystem, i: usize) -> BTreeMap<usize, BivarPoly> {
    let mut row = sys.row(i).clone();
    let diag = sys.diagonal(i);
    if !diag.is_zero() {
        row.insert(i, diag);
    }
    row
}

/// Checks `sum_{x: f(x) = y1} P(x0, x) = Q(f(x0), y1)` symbolically for every source
/// state `x0` and every target state `y1`.
pub fn verify_lumping(map: &LumpingMap<'_>) -> Result<LumpingReport> {
    let (source, target) = (map.source, map.target);
    if source.scale() != target.scale() {
        return Err(Error::ScaleMismatch {
            source_scale: source.scale(),
            target_scale: target.scale(),
        });
    }
    let target_rows: Vec<BTreeMap<usize, BivarPoly>> =
        (0..target.len()).map(|y| scaled_row(target, y)).collect();
    let mut violations = Vec::new();
    let mut count = 0;
    for x0 in 0..source.len() {
        let y0 = map.assignment[x0];
        let mut sums: BTreeMap<usize, BivarPoly> = BTreeMap::new();
        for (x, rate) in scaled_row(source, x0) {
            *sums.entry(map.assignment[x]).or_default() += &rate;
        }
        let expected_row = &target_rows[y0];
        let zero = BivarPoly::zero();
        let keys: std::collections::BTreeSet<usize> =
            sums.keys().chain(expected_row.keys()).copied().collect();
        for y1 in keys {
            let found = sums.get(&y1).unwrap_or(&zero);
            let expected = expected_row.get(&y1).unwrap_or(&zero);
            if found != expected {
                count += 1;
                if violations.len() < MAX_VIOLATIONS {
                    violations.push(Violation {
                        y0: target.state(y0).to_string(),
                        y1: target.state(y1).to_string(),
                        x0: source.state(x0).to_string(),
                        expected: expected.clone(),
                        found: found.clone(),
                    });
                }
            }
        }
    }
    Ok(LumpingReport {
        violations,
        violation_count: count,
    })
}

/// Fiber sums of a source-indexed vector; no renormalization.
pub fn push_distribution(map: &LumpingMap<'_>, pi: &StationaryVector) -> Result<StationaryVector> {
    if !pi.same_index(map.source) {
        return Err(Error::IndexMismatch(
            "vector is not indexed by the source system".into(),
        ));
    }
    let normalization = match pi.normalization() {
        Normalization::ProbOneAt { u, t } => Normalization::ProbOneAt {
            u: u.clone(),
            t: t.clone(),
        },
        _ => Normalization::Unnormalized,
    };
    match pi.entries() {
        Entries::Symbolic(v) => {
            let mut out = vec![BivarPoly::zero(); map.target.len()];
            for (x, p) in v.iter().enumerate() {
                out[map.assignment[x]] += p;
            }
            StationaryVector::symbolic(map.target, out, normalization)
        }
        Entries::Point(v) => {
            let mut out = vec![Rational::default(); map.target.len()];
            for (x, p) in v.iter().enumerate() {
                out[map.assignment[x]] += p;
            }
            StationaryVector::point(map.target, out, normalization)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{build_cbp, build_dasep, build_rrg};
    use crate::stationary::solve_stationary_symbolic;

    #[test]
    fn both_lumpings_hold_for_small_chain() {
        let d = build_dasep(3, 2, 2).unwrap();
        let c = build_cbp(3, 2, 2).unwrap();
        let r = build_rrg(3, 2, 2).unwrap();
        assert!(verify_lumping(&LumpingMap::decompose(&d, &c).unwrap())
            .unwrap()
            .pass());
        assert!(verify_lumping(&LumpingMap::shape(&c, &r).unwrap())
            .unwrap()
            .pass());
    }

    #[test]
    fn collapsing_everything_fails_with_witness() {
        let d = build_dasep(3, 2, 2).unwrap();
        let c = build_cbp(3, 2, 2).unwrap();
        // Not surjective onto the CBP: rejected up front.
        assert!(matches!(
            LumpingMap::new(&d, &c, vec![0; d.len()]),
            Err(Error::NotSurjective(_))
        ));
        // Surjective but wrong: state 0 alone maps to the last CBP state.
        let mut assignment: Vec<usize> =
            LumpingMap::decompose(&d, &c).unwrap().assignment().to_vec();
        let last = c.len() - 1;
        let first_of_last = assignment.iter().position(|&y| y == last).unwrap();
        assignment.swap(0, first_of_last);
        let report = verify_lumping(&LumpingMap::new(&d, &c, assignment).unwrap()).unwrap();
        assert!(!report.pass());
        assert!(!report.violations.is_empty() && report.violations.len() <= MAX_VIOLATIONS);
    }

    #[test]
    fn scale_mismatch() {
        let d = build_dasep(4, 1, 1).unwrap();
        let c = build_cbp(3, 1, 1).unwrap();
        let map = LumpingMap::new(&d, &c, vec![0, 1, 2, 2]).unwrap();
        assert!(matches!(
            verify_lumping(&map),
            Err(Error::ScaleMismatch {
                source_scale: 12,
                target_scale: 9
            })
        ));
    }

    #[test]
    fn pushforward_sums_fibers() {
        let d = build_dasep(3, 2, 2).unwrap();
        let c = build_cbp(3, 2, 2).unwrap();
        let map = LumpingMap::decompose(&d, &c).unwrap();
        let pi = solve_stationary_symbolic(&d).unwrap();
        let pushed = push_distribution(&map, &pi).unwrap();
        let expected: BivarPoly = "2*u*(u+3*t+4)".parse().unwrap();
        assert_eq!(pushed.poly("(011,(2,1))").unwrap(), &expected);
        let id = LumpingMap::new(&d, &d, (0..d.len()).collect()).unwrap();
        assert_eq!(push_distribution(&id, &pi).unwrap().polys(), pi.polys());
    }
}
