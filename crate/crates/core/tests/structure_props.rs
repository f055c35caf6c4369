//! Exhaustive structural checks on the small grid, plus randomized stochasticity.

use std::collections::{BTreeMap, BTreeSet};

use dasep_core::algebra::{rat, BivarPoly, Rational};
use dasep_core::chains::{
    build, build_cbp, build_dasep, build_rrg, check_irreducible, check_stochastic, ChainKind,
};
use dasep_core::combinatorics::{
    block_count, canonical_rotation, count_arrangements, decompose, enumerate_chi, enumerate_gamma,
    enumerate_words, ArrangementMode, Word,
};
use dasep_core::lumping::{push_distribution, verify_lumping, LumpingMap};
use dasep_core::stationary::{
    solve_stationary_symbolic_with, verify_balance, Limits, SolveOptions,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn grid(n_max: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (2..=n_max).flat_map(|n| {
        (1..=3).flat_map(move |p| (1..=3).filter(move |&q| q < n).map(move |q| (n, p, q)))
    })
}

#[test]
fn gamma_size_is_sum_of_arrangements() {
    for (n, p, q) in grid(7) {
        let total: BigUint = enumerate_chi(p, q)
            .iter()
            .map(|l| count_arrangements(l, n, ArrangementMode::All))
            .sum();
        assert_eq!(
            BigUint::from(enumerate_gamma(n, p, q).len()),
            total,
            "({n},{p},{q})"
        );
    }
}

#[test]
fn decompose_fibers_have_aligned_sizes() {
    for (n, p, q) in grid(7) {
        let mut fibers: BTreeMap<String, usize> = BTreeMap::new();
        for mu in enumerate_gamma(n, p, q) {
            *fibers.entry(decompose(&mu).to_string()).or_default() += 1;
        }
        let chi = enumerate_chi(p, q);
        let words = enumerate_words(n, q);
        assert_eq!(fibers.len(), chi.len() * words.len(), "({n},{p},{q})");
        for w in &words {
            for l in &chi {
                let key = format!("({w},{l})");
                let size = fibers.get(&key).copied().unwrap_or(0);
                assert_eq!(
                    BigUint::from(size),
                    count_arrangements(l, n, ArrangementMode::Aligned),
                    "{key}"
                );
            }
        }
    }
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..=3, 2..9).prop_map(Word::new)
}

fn binary_word() -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..=1, 2..12)
        .prop_filter("mixed", |v| v.contains(&0) && v.contains(&1))
        .prop_map(Word::new)
}

proptest! {
    #[test]
    fn canonical_rotation_idempotent_and_invariant(mu in word(), k in 0usize..10) {
        let (c, shift) = canonical_rotation(&mu);
        prop_assert_eq!(mu.rotate_left(shift), c.clone());
        prop_assert_eq!(canonical_rotation(&c).0, c.clone());
        prop_assert_eq!(canonical_rotation(&mu.rotate_left(k % mu.len())).0, c);
    }

    #[test]
    fn block_count_counts_zero_one_boundaries(w in binary_word()) {
        let l = w.letters();
        let n = l.len();
        let boundaries = (0..n).filter(|&i| l[i] == 0 && l[(i + 1) % n] == 1).count();
        prop_assert_eq!(block_count(&w).unwrap(), boundaries);
    }
}

fn species_sum(w: &Word) -> i64 {
    w.letters().iter().map(|&x| i64::from(x)).sum()
}

#[test]
fn dasep_moves_conserve_particles_and_step_species_by_one() {
    let allowed: Vec<BivarPoly> = vec![BivarPoly::one(), BivarPoly::t(), BivarPoly::u()];
    for (n, p, q) in grid(6) {
        let sys = build_dasep(n, p, q).unwrap();
        for (i, j, rate) in sys.edges() {
            let a = sys.state(i).as_word().unwrap();
            let b = sys.state(j).as_word().unwrap();
            assert_eq!(a.particles(), b.particles());
            let mut sa = a.letters().to_vec();
            let mut sb = b.letters().to_vec();
            sa.sort_unstable();
            sb.sort_unstable();
            if sa != sb {
                let changed: Vec<usize> = (0..n)
                    .filter(|&k| a.letters()[k] != b.letters()[k])
                    .collect();
                assert_eq!(changed.len(), 1, "{a} -> {b}");
                assert!(a.letters()[changed[0]] > 0 && b.letters()[changed[0]] > 0);
                assert_eq!((species_sum(a) - species_sum(b)).abs(), 1, "{a} -> {b}");
            }
            if n >= 3 {
                assert!(allowed.contains(rate), "({n},{p},{q}) {a} -> {b}: {rate}");
            }
        }
    }
}

/// For fixed `w`, the CBP edges among `(w, *)` are the growth-chain edges.
#[test]
fn cbp_restricted_to_a_word_is_the_growth_chain() {
    for (n, p, q) in grid(6) {
        let cbp = build_cbp(n, p, q).unwrap();
        let rrg = build_rrg(n, p, q).unwrap();
        let rrg_edges: BTreeSet<(String, String, String)> = rrg
            .edges()
            .map(|(i, j, r)| {
                (
                    rrg.state(i).to_string(),
                    rrg.state(j).to_string(),
                    r.to_string(),
                )
            })
            .collect();
        let mut per_word: BTreeMap<String, BTreeSet<(String, String, String)>> = BTreeMap::new();
        for (i, j, r) in cbp.edges() {
            let a = cbp.state(i).as_cbp().unwrap();
            let b = cbp.state(j).as_cbp().unwrap();
            if a.word == b.word {
                per_word.entry(a.word.to_string()).or_default().insert((
                    a.shape.to_string(),
                    b.shape.to_string(),
                    r.to_string(),
                ));
            }
        }
        for w in enumerate_words(n, q) {
            let edges = per_word.remove(&w.to_string()).unwrap_or_default();
            assert_eq!(edges, rrg_edges, "({n},{p},{q}) word {w}");
        }
        assert!(per_word.is_empty());
    }
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (0i64..=12, 1i64..=12).prop_map(|(a, b)| rat(a.min(b), b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn chains_are_stochastic_at_unit_square_points(u in unit_rational(), t in unit_rational()) {
        for (n, p, q) in grid(5) {
            for kind in [ChainKind::Dasep, ChainKind::Cbp, ChainKind::Rrg] {
                let sys = build(kind, n, p, q).unwrap();
                prop_assert!(check_stochastic(&sys, &u, &t).is_ok(), "{} ({},{},{})", kind, n, p, q);
            }
        }
    }
}

#[test]
fn chains_are_irreducible() {
    for (n, p, q) in grid(6) {
        for kind in [ChainKind::Dasep, ChainKind::Cbp, ChainKind::Rrg] {
            assert!(
                check_irreducible(&build(kind, n, p, q).unwrap()),
                "{kind} ({n},{p},{q})"
            );
        }
    }
}

#[test]
fn shape_projection_fibers_are_binomial() {
    for (n, p, q) in grid(6) {
        let cbp = build_cbp(n, p, q).unwrap();
        let rrg = build_rrg(n, p, q).unwrap();
        let map = LumpingMap::shape(&cbp, &rrg).unwrap();
        let binom = enumerate_words(n, q).len();
        assert!(map.fiber_sizes().iter().all(|&s| s == binom));
    }
}

/// Pushforward of a stationary vector along a passing lumping balances the target.
/// The acceptance suite repeats this on the full grid.
#[test]
fn pushforward_balances_target() {
    let opts = SolveOptions {
        limits: Limits {
            state_cap: 600,
            ..Limits::default()
        },
        ..SolveOptions::default()
    };
    for (n, p, q) in grid(4) {
        let d = build_dasep(n, p, q).unwrap();
        let c = build_cbp(n, p, q).unwrap();
        let r = build_rrg(n, p, q).unwrap();
        let f = LumpingMap::decompose(&d, &c).unwrap();
        let g = LumpingMap::shape(&c, &r).unwrap();
        assert!(verify_lumping(&f).unwrap().pass());
        assert!(verify_lumping(&g).unwrap().pass());
        let pi_d = solve_stationary_symbolic_with(&d, &opts).unwrap();
        let pushed = push_distribution(&f, &pi_d).unwrap();
        assert!(
            verify_balance(&c, &pushed).unwrap().is_zero(),
            "({n},{p},{q})"
        );
        let pushed_again = push_distribution(&g, &pushed).unwrap();
        assert!(
            verify_balance(&r, &pushed_again).unwrap().is_zero(),
            "({n},{p},{q})"
        );

        let pi_c = solve_stationary_symbolic_with(&c, &opts).unwrap();
        let (a, b) = (pushed.polys().unwrap(), pi_c.polys().unwrap());
        for i in 0..a.len() {
            assert_eq!(&a[i] * &b[0], &b[i] * &a[0], "({n},{p},{q}) entry {i}");
        }
    }
}
