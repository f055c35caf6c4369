//! Discrete-time simulation of the chains at numeric parameters.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded from the 64-bit
//! seed, with one stream per chain index. Floating point is confined to this module.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::Rational;
use crate::chains::{check_stochastic, TransitionSystem};
use crate::stationary::rational_string;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub u0: Rational,
    pub t0: Rational,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub thinning: u64,
    /// Index of the initial state.
    pub start: usize,
}

impl SimConfig {
    pub fn new(u0: Rational, t0: Rational, steps: u64, seed: u64) -> Self {
        SimConfig {
            u0,
            t0,
            steps,
            burn_in: 0,
            seed,
            thinning: 1,
            start: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        for (name, v) in [("u", &self.u0), ("t", &self.t0)] {
            if *v < zero || *v > one {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        if self.steps <= self.burn_in {
            return Err(Error::InvalidConfig(format!(
                "steps ({}) must exceed burn-in ({})",
                self.steps, self.burn_in
            )));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be at least 1".into()));
        }
        Ok(())
    }
}

/// Visit counts per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Empirical {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
}

impl Empirical {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Pools several runs over the same system.
    pub fn merge(runs: &[Empirical]) -> Result<Empirical> {
        let first = runs
            .first()
            .ok_or_else(|| Error::InvalidConfig("no runs to merge".into()))?;
        let mut counts = vec![0u64; first.counts.len()];
        for r in runs {
            if r.labels != first.labels {
                return Err(Error::IndexMismatch("runs use different state sets".into()));
            }
            for (c, x) in counts.iter_mut().zip(&r.counts) {
                *c += x;
            }
        }
        Ok(Empirical {
            labels: first.labels.clone(),
            counts,
        })
    }

    /// `state,count,frequency` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,count,frequency\n");
        for ((l, c), f) in self.labels.iter().zip(&self.counts).zip(self.frequencies()) {
            out.push_str(&format!("{l},{c},{f}\n"));
        }
        out
    }

    /// Summary with the TV distance to `reference` when given.
    pub fn to_json(&self, cfg: &SimConfig, reference: Option<&[f64]>) -> Result<Value> {
        let tv = reference
            .map(|r| tv_distance(&self.frequencies(), r))
            .transpose()?;
        Ok(json!({
            "u": rational_string(&cfg.u0),
            "t": rational_string(&cfg.t0),
            "steps": cfg.steps,
            "burn_in": cfg.burn_in,
            "thinning": cfg.thinning,
            "seed": cfg.seed,
            "rng": "ChaCha8",
            "samples": self.total(),
            "states": self.labels.iter().zip(&self.counts).zip(self.frequencies()).map(|((l, c), f)| {
                json!({ "state": l, "count": c, "frequency": f })
            }).collect::<Vec<_>>(),
            "tv_distance": tv,
        }))
    }
}

/// Cumulative transition probabilities per row, self-loop included at its own index.
fn cumulative_rows(sys: &TransitionSystem, u0: &Rational, t0: &Rational) -> Vec<Vec<(usize, f64)>> {
    let scale = Rational::from_integer(sys.scale().into());
    (0..sys.len())
        .map(|i| {
            let mut probs: Vec<(usize, Rational)> = sys
                .row(i)
                .iter()
                .map(|(&j, r)| (j, r.eval(u0, t0) / &scale))
                .collect();
            probs.push((i, sys.diagonal(i).eval(u0, t0) / &scale));
            probs.sort_by_key(|(j, _)| *j);
            let mut acc = Rational::from_integer(0.into());
            probs
                .into_iter()
                .filter(|(_, p)| *p > Rational::from_integer(0.into()))
                .map(|(j, p)| {
                    acc += p;
                    (j, acc.to_f64().unwrap_or(1.0))
                })
                .collect()
        })
        .collect()
}

fn run_chain(rows: &[Vec<(usize, f64)>], cfg: &SimConfig, stream: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut counts = vec![0u64; rows.len()];
    let mut state = cfg.start;
    for step in 0..cfg.steps {
        let x: f64 = rng.gen();
        let row = &rows[state];
        state = row
            .iter()
            .find(|(_, c)| x < *c)
            .or(row.last())
            .map(|(j, _)| *j)
            .unwrap_or(state);
        if step >= cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.thinning) {
            counts[state] += 1;
        }
    }
    counts
}

fn prepare(sys: &TransitionSystem, cfg: &SimConfig) -> Result<Vec<Vec<(usize, f64)>>> {
    cfg.validate()?;
    if cfg.start >= sys.len() {
        return Err(Error::InvalidConfig(format!(
            "start index {} out of range",
            cfg.start
        )));
    }
    check_stochastic(sys, &cfg.u0, &cfg.t0)?;
    Ok(cumulative_rows(sys, &cfg.u0, &cfg.t0))
}

/// Visit counts of one chain (stream 0).
pub fn simulate(sys: &TransitionSystem, cfg: &SimConfig) -> Result<Empirical> {
    let rows = prepare(sys, cfg)?;
    Ok(Empirical {
        labels: sys.labels(),
        counts: run_chain(&rows, cfg, 0),
    })
}

/// Independent chains on streams `0..chains`, in stream order.
pub fn simulate_many(
    sys: &TransitionSystem,
    cfg: &SimConfig,
    chains: u64,
) -> Result<Vec<Empirical>> {
    let rows = prepare(sys, cfg)?;
    let labels = sys.labels();
    Ok((0..chains)
        .into_par_iter()
        .map(|stream| Empirical {
            labels: labels.clone(),
            counts: run_chain(&rows, cfg, stream),
        })
        .collect())
}

/// Half the L1 distance.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::IndexMismatch(format!(
            "distributions of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0)
}

/// Exact probabilities converted at the comparison boundary.
pub fn to_f64(values: &[Rational]) -> Vec<f64> {
    values
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::chains::build_dasep;

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(
            tv_distance(&[0.25; 4], &[1.0, 0.0, 0.0, 0.0]).unwrap(),
            0.75
        );
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let sys = build_dasep(3, 2, 2).unwrap();
        let cfg = SimConfig::new(rat(1, 2), rat(1, 3), 20_000, 7);
        let a = simulate(&sys, &cfg).unwrap();
        assert_eq!(a, simulate(&sys, &cfg).unwrap());
        let b = simulate(
            &sys,
            &SimConfig {
                seed: 8,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_ne!(a, b);
        assert_eq!(a.total(), 20_000);
    }

    #[test]
    fn zero_upgrade_rate_stays_in_species_one() {
        let sys = build_dasep(4, 2, 2).unwrap();
        let cfg = SimConfig::new(rat(0, 1), rat(1, 2), 50_000, 1);
        let e = simulate(&sys, &cfg).unwrap();
        for (l, c) in e.labels.iter().zip(&e.counts) {
            if l.contains('2') {
                assert_eq!(*c, 0, "{l}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let sys = build_dasep(3, 1, 1).unwrap();
        let bad = SimConfig::new(rat(3, 2), rat(1, 2), 10, 0);
        assert!(matches!(simulate(&sys, &bad), Err(Error::InvalidConfig(_))));
        let bad = SimConfig {
            burn_in: 10,
            ..SimConfig::new(rat(1, 2), rat(1, 2), 10, 0)
        };
        assert!(matches!(simulate(&sys, &bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn thinning_and_burn_in_counts() {
        let sys = build_dasep(3, 1, 1).unwrap();
        let cfg = SimConfig {
            burn_in: 100,
            thinning: 10,
            ..SimConfig::new(rat(1, 2), rat(1, 2), 1100, 3)
        };
        assert_eq!(simulate(&sys, &cfg).unwrap().total(), 100);
        let runs = simulate_many(&sys, &cfg, 3).unwrap();
        assert_eq!(runs.len(), 3);
        assert_ne!(runs[0], runs[1]);
        assert_eq!(runs[0], simulate(&sys, &cfg).unwrap());
    }
}
