mod record;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metaplectic::eisenstein::Budget;
use metaplectic::householder::{decompose_su3, max_diff, CBall, Matrix3};
use metaplectic::lattice::ip_enumerate_limited;
use metaplectic::norm::{self, NormStatus};
use metaplectic::p9::{self, check_proxy, table1_fixtures};
use metaplectic::search::{approximate_state, SearchConfig, SearchMode};
use metaplectic::{Ball, Levels, RationalPolytope, RealExpr, TwoLevelState};
use num_bigint::BigInt;
use serde::Serialize;

use record::{ConfigSnapshot, DecomposeRecord, EnumRecord, FixtureCheck, NormRecord, P9Payload, StateRecord, Status};

#[derive(Parser)]
#[command(name = "metaplectic", version, about = "Qutrit two-level state synthesis over the Eisenstein lattice")]
struct Cli {
    /// Emit JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timing in the output.
    #[arg(long, global = true)]
    timing: bool,
    /// Worker threads for norm equations.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate `x0|i⟩ + x1|j⟩` by an exact state.
    ApproxState(ApproxArgs),
    /// Approximate φ by the plane-projection fast path.
    P9(P9Args),
    /// Solve `a² - ab + b² = n`.
    NormSolve(NormArgs),
    /// List the integer points of a polytope given as JSON.
    EnumPolytope(EnumArgs),
    /// Split a 3×3 unitary into two-level reflections.
    DecomposeSu3(DecomposeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FirstFeasible,
    MinK,
}

#[derive(Args)]
struct SearchArgs {
    /// Target precision, e.g. `0.01` or `3^-9.5`.
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "first-feasible")]
    mode: ModeArg,
    /// Work budget per hard norm equation.
    #[arg(long, default_value_t = 10_000_000)]
    norm_budget: u64,
    #[arg(long, default_value_t = metaplectic::eisenstein::DEFAULT_FACTOR_SEED)]
    seed: u64,
    /// Working precision in bits; derived from ε when absent.
    #[arg(long, env = "METAPLECTIC_PRECISION_BITS")]
    precision_bits: Option<u32>,
    /// Highest level searched.
    #[arg(long)]
    k_max: Option<u32>,
}

impl SearchArgs {
    fn config(&self, threads: usize) -> SearchConfig {
        SearchConfig {
            lambda: self.lambda,
            mode: match self.mode {
                ModeArg::FirstFeasible => SearchMode::FirstFeasible,
                ModeArg::MinK => SearchMode::MinKAllCandidates,
            },
            norm_budget: self.norm_budget,
            seed: self.seed,
            precision_bits: self.precision_bits,
            k_max: self.k_max,
            threads,
            ..SearchConfig::default()
        }
    }
}

#[derive(Args)]
struct ApproxArgs {
    /// Amplitude on the first level as `re,im`; entries may be expressions
    /// such as `cos(pi/9)/sqrt(2)`.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, allow_hyphen_values = true)]
    x1: String,
    /// The two levels, e.g. `0,2`.
    #[arg(long, default_value = "0,1")]
    levels: String,
    /// Renormalize amplitudes whose norm is off by at most this much.
    #[arg(long)]
    normalize: Option<f64>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct P9Args {
    #[command(flatten)]
    search: SearchArgs,
    /// Also check the bundled proxy-state fixtures.
    #[arg(long)]
    table1: bool,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, allow_hyphen_values = true)]
    n: String,
    #[arg(long, default_value_t = 10_000_000)]
    norm_budget: u64,
    #[arg(long, default_value_t = metaplectic::eisenstein::DEFAULT_FACTOR_SEED)]
    seed: u64,
}

#[derive(Args)]
struct EnumArgs {
    /// JSON `{"dim": n, "rows": [{"a": [..], "b": ".."}]}` with rational strings.
    #[arg(long)]
    file: PathBuf,
    /// Stop after this many points.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// 3×3 matrix as JSON rows of `[re, im]` pairs, inline or a file path.
    #[arg(long)]
    matrix: String,
    #[arg(long, env = "METAPLECTIC_PRECISION_BITS", default_value_t = 256)]
    precision_bits: u32,
    /// Allowed deviation from unitarity.
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let out = match &cli.command {
        Command::ApproxState(a) => approx_state(a, &cli),
        Command::P9(a) => p9_cmd(a, &cli),
        Command::NormSolve(a) => norm_solve(a),
        Command::EnumPolytope(a) => enum_polytope(a),
        Command::DecomposeSu3(a) => decompose(a),
    };
    match out {
        Ok(mut o) => {
            if cli.timing {
                o.set_timing(started.elapsed().as_secs_f64() * 1e3);
            }
            let text = if cli.json { format!("{}\n", o.json()) } else { o.text() };
            // A closed pipe is not an error worth a panic.
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(o.status().exit_code() as u8)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum Output {
    State(Box<StateRecord>),
    Norm(NormRecord),
    Enum(EnumRecord),
    Decompose(DecomposeRecord),
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("payload serializes")
}

impl Output {
    fn status(&self) -> &Status {
        match self {
            Output::State(r) => &r.status,
            Output::Norm(r) => &r.status,
            Output::Enum(r) => &r.status,
            Output::Decompose(r) => &r.status,
        }
    }

    fn set_timing(&mut self, ms: f64) {
        let t = Some(ms);
        match self {
            Output::State(r) => r.timing_ms = t,
            Output::Norm(r) => r.timing_ms = t,
            Output::Enum(r) => r.timing_ms = t,
            Output::Decompose(r) => r.timing_ms = t,
        }
    }

    fn json(&self) -> String {
        match self {
            Output::State(r) => to_json(r),
            Output::Norm(r) => to_json(r),
            Output::Enum(r) => to_json(r),
            Output::Decompose(r) => to_json(r),
        }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        match self {
            Output::State(r) => {
                s += &format!("status: {:?}\n", r.status);
                if let Some(p) = &r.result {
                    s += &format!("k = {}  levels {}\n", p.k, p.levels);
                    s += &format!("u = {}\nv = {}\nw = {}\n", p.u, p.v, p.w);
                    if let Some(l) = p.distance_log3 {
                        s += &format!("distance = 3^{l:.4}\n");
                    }
                    s += &format!("R-count <= {}, reflection R-count <= {}\n", p.r_count_bound, p.reflection_r_count_bound);
                }
                if let Some(p9) = &r.p9 {
                    for f in &p9.table1 {
                        s += &format!(
                            "table1 k={} eps 3^{:.3} (published 3^{}) residual {:.3} (published {})\n",
                            f.k, f.measured_eps_log3, f.published_eps_log3, f.measured_residual, f.published_residual
                        );
                    }
                }
                if let Some(m) = &r.message {
                    s += &format!("{m}\n");
                }
            }
            Output::Norm(r) => {
                s += &format!("status: {:?}\n", r.status);
                if let Some(w) = &r.w {
                    s += &format!("w = {w}\n");
                }
            }
            Output::Enum(r) => {
                s += &format!("{} points{}\n", r.count, if r.truncated { " (truncated)" } else { "" });
                for p in &r.points {
                    s += &format!("({})\n", p.join(", "));
                }
            }
            Output::Decompose(r) => {
                s += &format!("{} reflections, error {:e}\n", r.reflection_count, r.reconstruction_error);
                for x in &r.reflections {
                    s += &format!("levels {:?}\n", x.levels);
                }
            }
        }
        s
    }
}

/// Splits `re,im` at the top-level comma.
fn parse_complex(s: &str) -> Result<[RealExpr; 2], Usage> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                return Ok([RealExpr::parse(s[..i].trim())?, RealExpr::parse(s[i + 1..].trim())?]);
            }
            _ => {}
        }
    }
    Err(Usage(format!("expected `re,im`, got {s:?}")))
}

fn parse_levels(s: &str) -> Result<Levels, Usage> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [i, j] = parts.as_slice() else {
        return Err(Usage(format!("expected `i,j`, got {s:?}")));
    };
    Ok(Levels::new(i.parse()?, j.parse()?)?)
}

fn approx_state(a: &ApproxArgs, cli: &Cli) -> Result<Output, Usage> {
    let x0 = parse_complex(&a.x0)?;
    let x1 = parse_complex(&a.x1)?;
    let levels = parse_levels(&a.levels)?;
    let target = match a.normalize {
        Some(tol) => TwoLevelState::normalized(x0, x1, levels, tol)?,
        None => TwoLevelState::new(x0, x1, levels)?,
    };
    let eps = RealExpr::parse(&a.search.epsilon)?;
    let cfg = a.search.config(cli.threads);
    cfg.validate()?;
    let out = approximate_state(&target, &eps, &cfg);
    let rec = StateRecord::from_outcome("approx-state", ConfigSnapshot::new(&a.search.epsilon, &cfg), out);
    Ok(Output::State(Box::new(rec)))
}

fn p9_cmd(a: &P9Args, cli: &Cli) -> Result<Output, Usage> {
    let eps = RealExpr::parse(&a.search.epsilon)?;
    let cfg = a.search.config(cli.threads);
    cfg.validate()?;
    let out = p9::approximate_phi(&eps, &cfg);
    let ok = out.as_ref().ok().map(|r| r.r_count_bound());
    let mut rec = StateRecord::from_outcome("p9", ConfigSnapshot::new(&a.search.epsilon, &cfg), out);
    let mut payload = P9Payload {
        c_phi_r_count: ok.unwrap_or(0),
        r_phi_r_count: ok.map_or(0, |c| 2 * c + 1),
        mu_note: p9::MU_NOTE.to_string(),
        table1: Vec::new(),
    };
    if a.table1 {
        let prec = a.search.precision_bits.unwrap_or(metaplectic::DEFAULT_PRECISION_BITS);
        for row in table1_fixtures() {
            let printed = check_proxy(&row.candidate(), prec, cfg.norm_budget)?;
            let shifted = check_proxy(&row.shifted(), prec, cfg.norm_budget)?;
            let corrected = row.corrected_candidate().map(|c| check_proxy(&c, prec, cfg.norm_budget)).transpose()?;
            payload.table1.push(FixtureCheck::new(&row, &printed, &shifted, corrected.as_ref()));
        }
    }
    if ok.is_some() || a.table1 {
        rec.p9 = Some(payload);
    }
    Ok(Output::State(Box::new(rec)))
}

fn norm_solve(a: &NormArgs) -> Result<Output, Usage> {
    let n: BigInt = a.n.trim().parse()?;
    let mut budget = Budget::new(a.norm_budget);
    let out = norm::solve(&n, &mut budget, a.seed)?;
    let w = out.solution().cloned();
    let status = match &out.status {
        NormStatus::Solved { .. } => Status::Solved,
        NormStatus::Unsolvable { .. } => Status::Unsolvable,
        NormStatus::Unknown { .. } => Status::Unknown,
    };
    Ok(Output::Norm(NormRecord {
        command: "norm-solve".into(),
        status,
        n: n.to_string(),
        norm_check: w.as_ref().is_some_and(|w| w.norm() == n),
        w,
        outcome: out.status,
        work_spent: out.work_spent,
        timing_ms: None,
    }))
}

fn enum_polytope(a: &EnumArgs) -> Result<Output, Usage> {
    let text = std::fs::read_to_string(&a.file)?;
    let p: RationalPolytope = serde_json::from_str(&text)?;
    if !p.is_bounded() {
        return Err(Usage("polytope is unbounded".into()));
    }
    let e = ip_enumerate_limited(&p, a.limit)?;
    Ok(Output::Enum(EnumRecord {
        command: "enum-polytope".into(),
        status: Status::Ok,
        dim: p.dim(),
        count: e.points.len(),
        truncated: e.truncated,
        bisection_bound: e.stats.bisection_bound(e.points.len()),
        points: e.points.iter().map(|x| x.iter().map(BigInt::to_string).collect()).collect(),
        stats: e.stats,
        timing_ms: None,
    }))
}

/// A JSON entry: a number or a string expression.
fn parse_entry(v: &serde_json::Value, prec: u32) -> Result<Ball, Usage> {
    let src = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(Usage(format!("bad matrix entry {other}"))),
    };
    Ok(RealExpr::parse(&src)?.eval(prec)?)
}

fn parse_matrix(src: &str, prec: u32) -> Result<Matrix3, Usage> {
    let text = if src.trim_start().starts_with('[') { src.to_string() } else { std::fs::read_to_string(src)? };
    let rows: Vec<Vec<serde_json::Value>> = serde_json::from_str(&text)?;
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(Usage("matrix must be 3×3".into()));
    }
    let mut m: Vec<[CBall; 3]> = Vec::with_capacity(3);
    for r in &rows {
        let mut out = Vec::with_capacity(3);
        for z in r {
            // Either [re, im] or a bare real.
            let (re, im) = match z {
                serde_json::Value::Array(p) if p.len() == 2 => (parse_entry(&p[0], prec)?, parse_entry(&p[1], prec)?),
                serde_json::Value::Array(_) => return Err(Usage("complex entries are [re, im]".into())),
                _ => (parse_entry(z, prec)?, Ball::from_i64(0, prec)),
            };
            out.push(CBall::new(re, im));
        }
        m.push(out.try_into().map_err(|_| Usage("row length".into()))?);
    }
    m.try_into().map_err(|_| Usage("row count".into()))
}

fn decompose(a: &DecomposeArgs) -> Result<Output, Usage> {
    let prec = a.precision_bits;
    let u = parse_matrix(&a.matrix, prec)?;
    match decompose_su3(&u, a.tolerance) {
        Ok(d) => {
            let err = max_diff(&d.reconstruct(prec), &u);
            Ok(Output::Decompose(DecomposeRecord::new(&d, prec, err)))
        }
        Err(e) => Err(Usage(e.to_string())),
    }
}
