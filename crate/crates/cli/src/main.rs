use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dasep_core::algebra::Rational;
use dasep_core::chains::{build, export_dot, matrix_entries, ChainKind, TransitionSystem};
use dasep_core::combinatorics::{
    enumerate_chi, enumerate_gamma, enumerate_omega, enumerate_words, validate_params,
};
use dasep_core::lumping::{verify_lumping, LumpingMap};
use dasep_core::montecarlo::{simulate_many, to_f64, tv_distance, Empirical, SimConfig};
use dasep_core::stationary::{
    parse_rational, solve_stationary_at_point_with, solve_stationary_symbolic_with, Limits,
    SolveOptions,
};
use dasep_core::theorems::{
    homomesy_check, oeis_specialization, verify_cbp_closed_form, verify_main_theorem,
    verify_matching_identity, verify_n22, verify_ratio_corollary, verify_single_particle_family,
    verify_uniform_family, GroupAction, OeisFixtures, SolutionCache, TheoremReport,
};
use dasep_core::Error;

/// State cap used by `verify` when `DASEP_STATE_CAP` is unset, large enough for the
/// default grid.
const VERIFY_STATE_CAP: usize = 600;

#[derive(Parser)]
#[command(
    name = "dasep",
    version,
    about = "Exact stationary distributions of the DASEP and its lumped chains"
)]
struct Cli {
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the states of a state space.
    Enumerate {
        #[arg(long, value_enum)]
        space: Space,
        #[command(flatten)]
        params: OptParams,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Dump the scaled transition rates of a chain.
    Matrix {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve for the stationary distribution.
    Stationary {
        #[command(flatten)]
        chain: ChainArgs,
        /// Polynomial solution in u and t, normalized to gcd 1.
        #[arg(long, conflicts_with = "at", required_unless_present = "at")]
        symbolic: bool,
        /// Exact probabilities at the point (U, T).
        #[arg(long, num_args = 2, value_names = ["U", "T"], value_parser = rational_arg)]
        at: Option<Vec<Rational>>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a theorem suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        params: OptParams,
        /// Largest sequence index for the matchings and oeis suites.
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        /// Directory holding A082762.txt and A084326.txt; the bundled copies otherwise.
        #[arg(long, value_name = "DIR")]
        fixtures: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo simulation at numeric parameters.
    Simulate {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(short = 'u', long = "u", default_value = "1", value_parser = rational_arg)]
        u0: Rational,
        #[arg(short = 't', long = "t", default_value = "1", value_parser = rational_arg)]
        t0: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        burn_in: u64,
        #[arg(long, default_value_t = 1)]
        thinning: u64,
        /// Independent chains, one RNG stream each.
        #[arg(long, default_value_t = 1)]
        chains: u64,
        /// Skip the exact solve used for the TV distance.
        #[arg(long)]
        no_reference: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Graphviz diagram of a chain.
    Dot {
        #[command(flatten)]
        chain: ChainArgs,
    },
}

#[derive(Args, Clone, Copy)]
struct OptParams {
    #[arg(short = 'n')]
    n: Option<usize>,
    #[arg(short = 'p')]
    p: Option<usize>,
    #[arg(short = 'q')]
    q: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct ChainArgs {
    #[arg(long, value_enum, default_value_t = Chain::Dasep)]
    chain: Chain,
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'p')]
    p: usize,
    #[arg(short = 'q')]
    q: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Chain {
    Dasep,
    Cbp,
    Rrg,
}

impl From<Chain> for ChainKind {
    fn from(c: Chain) -> Self {
        match c {
            Chain::Dasep => ChainKind::Dasep,
            Chain::Cbp => ChainKind::Cbp,
            Chain::Rrg => ChainKind::Rrg,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Space {
    Gamma,
    Omega,
    Chi,
    Words,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Suite {
    Lumping,
    Main,
    Ratios,
    Cbp,
    N22,
    Matchings,
    Oeis,
    Homomesy,
    Families,
    All,
}

enum Failure {
    Usage(String),
    Verification(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams { .. }
            | Error::InvalidN(_)
            | Error::AllOnesOrAllZeros
            | Error::Parse(_)
            | Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn usage(flag: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid value for {flag}: {e}"))
}

fn require(value: Option<usize>, flag: &str, space: &str) -> Result<usize, Failure> {
    value.ok_or_else(|| usage(flag, format!("required for --space {space}")))
}

fn build_chain(c: ChainArgs) -> Result<TransitionSystem, Failure> {
    validate_params(c.n, c.p, c.q).map_err(|e| usage("-n/-p/-q", e))?;
    Ok(build(c.chain.into(), c.n, c.p, c.q)?)
}

fn format_unsupported(format: Format, command: &str) -> Failure {
    let name = format
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    usage("--format", format!("{name} is not available for {command}"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable JSON");
    s.push('\n');
    s
}

fn enumerate(space: Space, params: OptParams, format: Format) -> Result<String, Failure> {
    let OptParams { n, p, q } = params;
    let states: Vec<String> = match space {
        Space::Gamma | Space::Omega => {
            let name = if space == Space::Gamma {
                "gamma"
            } else {
                "omega"
            };
            let (n, p, q) = (
                require(n, "-n", name)?,
                require(p, "-p", name)?,
                require(q, "-q", name)?,
            );
            validate_params(n, p, q).map_err(|e| usage("-n/-p/-q", e))?;
            if space == Space::Gamma {
                enumerate_gamma(n, p, q)
                    .iter()
                    .map(ToString::to_string)
                    .collect()
            } else {
                enumerate_omega(n, p, q)
                    .iter()
                    .map(ToString::to_string)
                    .collect()
            }
        }
        Space::Chi => {
            let (p, q) = (require(p, "-p", "chi")?, require(q, "-q", "chi")?);
            if p == 0 || q == 0 {
                return Err(usage("-p/-q", "p and q must be at least 1"));
            }
            enumerate_chi(p, q)
                .iter()
                .map(ToString::to_string)
                .collect()
        }
        Space::Words => {
            let (n, q) = (require(n, "-n", "words")?, require(q, "-q", "words")?);
            if q == 0 || q >= n {
                return Err(usage("-n/-q", "need n > q >= 1"));
            }
            enumerate_words(n, q)
                .iter()
                .map(ToString::to_string)
                .collect()
        }
    };
    match format {
        Format::Text => Ok(states.iter().map(|s| format!("{s}\n")).collect()),
        Format::Json => Ok(pretty(&json!({ "count": states.len(), "states": states }))),
        f => Err(format_unsupported(f, "enumerate")),
    }
}

fn matrix(chain: ChainArgs, format: Format) -> Result<String, Failure> {
    let sys = build_chain(chain)?;
    let entries = matrix_entries(&sys);
    match format {
        Format::Json => {
            let diagonal: Vec<Value> = (0..sys.len())
                .map(|i| json!({ "state": sys.state(i).to_string(), "rate": sys.diagonal(i).to_string() }))
                .collect();
            Ok(pretty(&json!({
                "chain": sys.kind().to_string(),
                "n": chain.n,
                "p": chain.p,
                "q": chain.q,
                "scale": sys.scale(),
                "states": sys.labels(),
                "entries": entries,
                "diagonal": diagonal,
            })))
        }
        Format::Csv | Format::Text => {
            let mut out = String::from("from,to,rate,scale\n");
            for e in entries {
                let _ = writeln!(out, "{},{},{},{}", e.from, e.to, e.rate, e.scale);
            }
            Ok(out)
        }
        Format::Dot => Ok(export_dot(&sys)),
    }
}

fn stationary(
    chain: ChainArgs,
    at: Option<Vec<Rational>>,
    format: Format,
) -> Result<String, Failure> {
    let sys = build_chain(chain)?;
    let limits = Limits::from_env()?;
    let pi = match at {
        Some(point) => {
            let (u0, t0) = (&point[0], &point[1]);
            solve_stationary_at_point_with(&sys, u0, t0, &limits)?
        }
        None => solve_stationary_symbolic_with(
            &sys,
            &SolveOptions {
                limits,
                ..SolveOptions::default()
            },
        )?,
    };
    match format {
        Format::Json => Ok(pretty(&pi.to_json())),
        Format::Text => {
            let json = pi.to_json();
            let mut out = String::new();
            for (k, v) in json["entries"].as_object().expect("entries object") {
                let _ = writeln!(out, "{k}\t{}", v.as_str().unwrap_or_default());
            }
            Ok(out)
        }
        f => Err(format_unsupported(f, "stationary")),
    }
}

/// `(n, p, q)` with `n <= 6`, `p, q <= 3`, `n > q`, filtered by any given values.
fn grid(params: OptParams) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in params.n.map_or(2..=6, |n| n..=n) {
        for p in params.p.map_or(1..=3, |p| p..=p) {
            for q in params.q.map_or(1..=3, |q| q..=q) {
                if q >= 1 && n > q && p >= 1 {
                    out.push((n, p, q));
                }
            }
        }
    }
    out
}

struct Checks {
    results: Vec<Value>,
}

impl Checks {
    fn push(&mut self, name: &str, params: Value, outcome: Result<(bool, Value), Error>) {
        let entry = match outcome {
            Ok((pass, details)) => {
                json!({ "check": name, "params": params, "pass": pass, "details": details })
            }
            Err(e) => {
                json!({ "check": name, "params": params, "pass": false, "error": e.to_string() })
            }
        };
        self.results.push(entry);
    }

    fn report(&mut self, name: &str, params: Value, r: Result<TheoremReport, Error>) {
        self.push(name, params, r.map(|r| (r.pass, json!(r.witnesses))));
    }

    fn pass(&self) -> bool {
        self.results.iter().all(|r| r["pass"] == json!(true))
    }
}

fn line(entry: &Value) -> String {
    let status = if entry["pass"] == json!(true) {
        "PASS"
    } else {
        "FAIL"
    };
    let mut s = format!(
        "{status} {} {}",
        entry["check"].as_str().unwrap_or(""),
        entry["params"]
    );
    if let Some(e) = entry["error"].as_str() {
        let _ = write!(s, "\n  error: {e}");
    }
    if let Some(ws) = entry["details"].as_array() {
        for w in ws {
            if let Some(w) = w.as_str() {
                let _ = write!(s, "\n  {w}");
            }
        }
    }
    s
}

fn npq(n: usize, p: usize, q: usize) -> Value {
    json!({ "n": n, "p": p, "q": q })
}

fn verify(
    suite: Suite,
    params: OptParams,
    k_max: usize,
    fixtures: Option<PathBuf>,
    format: Format,
) -> Result<String, Failure> {
    if !matches!(format, Format::Json | Format::Text) {
        return Err(format_unsupported(format, "verify"));
    }
    let mut limits = Limits::from_env()?;
    if std::env::var_os("DASEP_STATE_CAP").is_none() {
        limits.state_cap = limits.state_cap.max(VERIFY_STATE_CAP);
    }
    let cache = SolutionCache::new(SolveOptions {
        limits,
        ..SolveOptions::default()
    });
    let fixtures = match fixtures {
        Some(dir) => OeisFixtures::load(&dir).map_err(|e| usage("--fixtures", e))?,
        None => OeisFixtures::bundled(),
    };
    let all = suite == Suite::All;
    let on = |s: Suite| all || suite == s;
    let mut checks = Checks {
        results: Vec::new(),
    };
    let grid = grid(params);

    if on(Suite::Lumping) {
        for &(n, p, q) in &grid {
            let outcome = (|| {
                let d = build(ChainKind::Dasep, n, p, q)?;
                let c = build(ChainKind::Cbp, n, p, q)?;
                let r = build(ChainKind::Rrg, n, p, q)?;
                let f = verify_lumping(&LumpingMap::decompose(&d, &c)?)?;
                let g = verify_lumping(&LumpingMap::shape(&c, &r)?)?;
                Ok((
                    f.pass() && g.pass(),
                    json!({ "dasep_to_cbp": f.to_json(), "cbp_to_rrg": g.to_json() }),
                ))
            })();
            checks.push("lumping", npq(n, p, q), outcome);
        }
    }
    if on(Suite::Main) {
        for &(n, p, q) in &grid {
            checks.report(
                "main_theorem",
                npq(n, p, q),
                verify_main_theorem(n, p, q, &cache),
            );
        }
    }
    if on(Suite::Cbp) {
        for &(n, p, q) in &grid {
            checks.report(
                "cbp_closed_form",
                npq(n, p, q),
                verify_cbp_closed_form(n, p, q, &cache),
            );
        }
    }
    if on(Suite::Ratios) {
        for &(n, p, q) in &grid {
            checks.report(
                "ratio_corollary",
                npq(n, p, q),
                verify_ratio_corollary(n, p, q, &cache),
            );
        }
    }
    if on(Suite::Homomesy) {
        for &(n, p, q) in &grid {
            for action in [GroupAction::PermuteParticles, GroupAction::PermuteSites] {
                let outcome = homomesy_check(n, p, q, action, &cache).map(|orbits| {
                    let pass = orbits.iter().all(|o| o.pass);
                    let failing: Vec<Value> = orbits
                        .iter()
                        .filter(|o| !o.pass)
                        .map(|o| o.to_json())
                        .collect();
                    (pass, json!({ "orbits": orbits.len(), "failing": failing }))
                });
                checks.push(&format!("homomesy_{action}"), npq(n, p, q), outcome);
            }
        }
    }
    if on(Suite::Families) {
        for n in params.n.map_or(2..=7, |n| n..=n) {
            checks.report(
                "uniform_single_species",
                json!({ "n": n }),
                verify_uniform_family(n, &cache),
            );
        }
        for &(n, p, q) in grid.iter().filter(|g| g.2 == 1) {
            checks.report(
                "single_particle_u_powers",
                npq(n, p, q),
                verify_single_particle_family(n, p, &cache),
            );
        }
    }
    if on(Suite::N22) {
        for n in params.n.map_or(3..=9, |n| n..=n) {
            checks.report("n22_closed_form", json!({ "n": n }), verify_n22(n, &cache));
        }
    }
    if on(Suite::Matchings) {
        let r = verify_matching_identity(k_max.min(6));
        checks.report("matching_identity", json!({ "k_max": k_max.min(6) }), Ok(r));
    }
    if on(Suite::Oeis) {
        checks.report(
            "oeis_specialization",
            json!({ "k_max": k_max }),
            oeis_specialization(k_max, &fixtures),
        );
    }

    let pass = checks.pass();
    let failed = checks
        .results
        .iter()
        .filter(|r| r["pass"] != json!(true))
        .count();
    let summary = format!(
        "{} checks, {} failed: {}",
        checks.results.len(),
        failed,
        if pass { "PASS" } else { "FAIL" }
    );
    let out = if format == Format::Json {
        pretty(&json!({ "pass": pass, "checks": checks.results }))
    } else {
        let mut s: String = checks.results.iter().map(|r| line(r) + "\n").collect();
        s.push_str(&summary);
        s.push('\n');
        s
    };
    if pass {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn simulate(
    chain: ChainArgs,
    cfg: SimConfig,
    chains: u64,
    reference: bool,
    format: Format,
) -> Result<String, Failure> {
    let sys = build_chain(chain)?;
    if chains == 0 {
        return Err(usage("--chains", "must be at least 1"));
    }
    let unit = |x: &Rational| {
        *x >= Rational::from_integer(0.into()) && *x <= Rational::from_integer(1.into())
    };
    if !unit(&cfg.u0) {
        return Err(usage("--u", format!("{} is outside [0, 1]", cfg.u0)));
    }
    if !unit(&cfg.t0) {
        return Err(usage("--t", format!("{} is outside [0, 1]", cfg.t0)));
    }
    if cfg.steps <= cfg.burn_in {
        return Err(usage("--burn-in", "must be smaller than --steps"));
    }
    if cfg.thinning == 0 {
        return Err(usage("--thinning", "must be at least 1"));
    }
    let runs = simulate_many(&sys, &cfg, chains)?;
    let merged = Empirical::merge(&runs)?;
    match format {
        Format::Csv => Ok(merged.to_csv()),
        Format::Json => {
            let exact = if reference {
                let limits = Limits::from_env()?;
                let pi = solve_stationary_at_point_with(&sys, &cfg.u0, &cfg.t0, &limits)?;
                Some(to_f64(pi.values().expect("point solution")))
            } else {
                None
            };
            let mut summary = merged.to_json(&cfg, exact.as_deref())?;
            summary["chain"] = json!(sys.kind().to_string());
            summary["n"] = json!(chain.n);
            summary["p"] = json!(chain.p);
            summary["q"] = json!(chain.q);
            summary["chains"] = json!(chains);
            if let Some(exact) = &exact {
                let per_chain = runs
                    .iter()
                    .map(|r| tv_distance(&r.frequencies(), exact))
                    .collect::<Result<Vec<f64>, Error>>()?;
                summary["chain_tv_distances"] = json!(per_chain);
            }
            Ok(pretty(&summary))
        }
        f => Err(format_unsupported(f, "simulate")),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Enumerate {
            space,
            params,
            format,
        } => enumerate(space, params, format),
        Command::Matrix { chain, format } => matrix(chain, format),
        Command::Stationary {
            chain, at, format, ..
        } => stationary(chain, at, format),
        Command::Verify {
            suite,
            params,
            k_max,
            fixtures,
            format,
        } => verify(suite, params, k_max, fixtures, format),
        Command::Simulate {
            chain,
            u0,
            t0,
            seed,
            steps,
            burn_in,
            thinning,
            chains,
            no_reference,
            format,
        } => {
            let cfg = SimConfig {
                burn_in,
                thinning,
                ..SimConfig::new(u0, t0, steps, seed)
            };
            simulate(chain, cfg, chains, !no_reference, format)
        }
        Command::Dot { chain } => Ok(export_dot(&build_chain(chain)?)),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write --out {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(text) => match emit(&out, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Verification(text)) => {
            if let Err(e) = emit(&out, &text) {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
