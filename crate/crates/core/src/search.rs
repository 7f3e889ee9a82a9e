//! Iterative search over levels `k` for a feasible lattice point.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::Ball;
use crate::eisenstein::{Budget, EisensteinInt, DEFAULT_FACTOR_SEED};
use crate::expr::RealExpr;
use crate::geometry::{self, distance, Candidate, GeometryError, Meniscus, MeniscusAt, ScaledLatticeBasis, TwoLevelState};
use crate::lattice::{ip_enumerate_limited, EnumStats, LatticeError};
use crate::norm::{self, classify_with, ClassifyThresholds, NormError, NormOutcome, NormStatus};

/// Default bound on the number of lattice points gathered at one level.
pub const ENUM_LIMIT: usize = 1 << 16;

/// Candidates tried per unit of `k` before an oversized level is reported.
pub const SAMPLE_PER_LEVEL: usize = 64;

/// Extra levels past `⌈4·log₃(1/ε)⌉` searched by rounding.
pub const ROUNDING_LEVELS: u32 = 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Stop at the first feasible candidate in candidate order.
    #[default]
    FirstFeasible,
    /// Test every candidate at the first level with a feasible one and keep
    /// the closest.
    MinKAllCandidates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub lambda: f64,
    pub mode: SearchMode,
    /// Work budget for each hard norm equation.
    pub norm_budget: u64,
    pub seed: u64,
    /// Overrides the precision derived from ε.
    pub precision_bits: Option<u32>,
    /// Overrides the level cap.
    pub k_max: Option<u32>,
    pub classify: ClassifyThresholds,
    /// Worker threads for norm equations; 1 runs inline.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            lambda: 0.1,
            mode: SearchMode::FirstFeasible,
            norm_budget: 10_000_000,
            seed: DEFAULT_FACTOR_SEED,
            precision_bits: None,
            k_max: None,
            classify: ClassifyThresholds::default(),
            threads: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.lambda > 0.0 && self.lambda <= 0.75) {
            return Err(SearchError::InvalidConfig(format!("lambda must satisfy 0 < λ ≤ 3/4, got {}", self.lambda)));
        }
        if self.threads == 0 {
            return Err(SearchError::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// A norm equation that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownInstance {
    pub k: u32,
    pub u: EisensteinInt,
    pub v: EisensteinInt,
    #[serde(with = "crate::decimal::big")]
    pub residual: BigInt,
    #[serde(with = "crate::decimal::big")]
    pub cofactor: BigInt,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub k: u32,
    /// Lattice points in the scaled meniscus (a lower bound when truncated).
    pub candidates: usize,
    pub truncated: bool,
    pub tested: usize,
    pub rounding: bool,
    /// Set when a shift search stopped at its cap.
    #[serde(default)]
    pub shift_capped: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub levels: Vec<LevelStats>,
    pub enumeration: EnumStats,
    pub norm_work: u64,
}

#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub target: TwoLevelState,
    pub u: EisensteinInt,
    pub v: EisensteinInt,
    pub w: EisensteinInt,
    pub k: u32,
    pub distance: Ball,
    pub candidates_inspected: usize,
    pub unknown_instances: Vec<UnknownInstance>,
    pub stats: SearchStats,
}

impl ApproxResult {
    pub fn candidate(&self) -> Candidate {
        Candidate { u: self.u.clone(), v: self.v.clone(), k: self.k, levels: self.target.levels }
    }

    /// At most `k + 1`.
    pub fn r_count_bound(&self) -> u32 {
        self.k + 1
    }

    pub fn depth_range(&self) -> Vec<u32> {
        depth_range(self.k)
    }

    pub fn distance_log3(&self) -> Option<f64> {
        geometry::log3(&self.distance)
    }

    /// `N(u) + N(v) + N(w) == 3^k`.
    pub fn is_exact(&self) -> bool {
        self.u.norm() + self.v.norm() + self.w.norm() == norm::pow3(self.k)
    }
}

/// `{2k-1, 2k, 2k+1}` clipped at zero.
pub fn depth_range(k: u32) -> Vec<u32> {
    let mut v: Vec<u32> = [2 * k as i64 - 1, 2 * k as i64, 2 * k as i64 + 1]
        .into_iter()
        .filter(|d| *d >= 0)
        .map(|d| d as u32)
        .collect();
    v.dedup();
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchException {
    pub k_at_exception: u32,
    /// Number of lattice points found (a lower bound when `truncated`).
    pub count: usize,
    pub truncated: bool,
    /// `ε^(-λ)`.
    pub count_threshold: f64,
    /// Whether every lower level held fewer than two points.
    pub strongly_exceptional: bool,
    /// The candidates that were tested before giving up.
    pub partial: Vec<Candidate>,
    pub unknown_instances: Vec<UnknownInstance>,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("level {} holds {} candidates, above ε^-λ = {:.3}", .0.k_at_exception, .0.count, .0.count_threshold)]
    Exception(Box<SearchException>),
    #[error("level cap {k_cap} reached with {} undecided norm equations", unknown.len())]
    BudgetExhausted { k_cap: u32, unknown: Vec<UnknownInstance> },
    #[error("level cap {k_cap} reached without a feasible candidate")]
    NotFound { k_cap: u32 },
    #[error("result failed re-verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// `⌈4·log₃(1/ε)⌉`: the last level searched by full enumeration.
pub fn enumeration_levels(eps: f64) -> u32 {
    (4.0 * (1.0 / eps).ln() / 3f64.ln()).ceil().max(0.0) as u32
}

/// `⌈4·log₃(1/ε)⌉ + 16`.
pub fn k_cap(eps: f64) -> u32 {
    enumeration_levels(eps) + ROUNDING_LEVELS
}

/// Sorts by decreasing `⟨q, p⟩`, ties by lexicographic coefficients.
pub fn candidate_order(mut cands: Vec<[BigInt; 4]>, m: &MeniscusAt) -> Vec<[BigInt; 4]> {
    let mut keyed: Vec<(BigInt, [BigInt; 4])> =
        cands.drain(..).map(|a| (m.projection(&a).mid_raw().clone(), a)).collect();
    keyed.sort_by(|(pa, a), (pb, b)| match pb.cmp(pa) {
        Ordering::Equal => a.cmp(b),
        o => o,
    });
    keyed.into_iter().map(|(_, a)| a).collect()
}

/// Lattice points of `√3^k·M_ε(p)` by enumeration of the enclosing polytope.
fn enumerate_level(
    m: &Meniscus,
    k: u32,
    limit: usize,
    stats: &mut EnumStats,
) -> Result<(Vec<[BigInt; 4]>, bool), SearchError> {
    let poly = m.enclosing_polytope(k)?;
    let e = ip_enumerate_limited(&poly, Some(limit))?;
    stats.merge(&e.stats);
    let mut out = Vec::new();
    for x in e.points {
        let a: [BigInt; 4] = x.try_into().expect("four coordinates");
        if m.contains(&a, k)? {
            out.push(a);
        }
    }
    Ok((out, e.truncated))
}

/// Points near `ι⁻¹(√3^k·p)`, for levels where the meniscus is thick.
fn rounding_level(m: &Meniscus, k: u32) -> Result<Vec<[BigInt; 4]>, SearchError> {
    let at = m.base();
    let r = geometry::sqrt3_pow(k, at.prec);
    let target: [Ball; 4] = std::array::from_fn(|i| at.p[i].clone() * r.clone());
    let centre = ScaledLatticeBasis::new(0).iota_inv(&target).map(|x| x.midpoint().round().to_integer());
    let mut out = Vec::new();
    for d in 0..625i64 {
        let off = [d % 5 - 2, d / 5 % 5 - 2, d / 25 % 5 - 2, d / 125 - 2];
        let a: [BigInt; 4] = std::array::from_fn(|i| &centre[i] + off[i]);
        if m.contains(&a, k)? {
            out.push(a);
        }
    }
    Ok(out)
}

/// Solves each job; the output order matches the input regardless of threads.
fn solve_all(jobs: &[BigInt], budget: u64, seed: u64, threads: usize) -> Vec<NormOutcome> {
    let run = |n: &BigInt| {
        let mut b = Budget::new(budget);
        norm::solve(n, &mut b, seed).expect("residual is nonnegative")
    };
    if threads <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(run).collect();
    }
    let chunk = jobs.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs.chunks(chunk).map(|c| s.spawn(move || c.iter().map(run).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub(crate) struct Found {
    pub(crate) a: [BigInt; 4],
    pub(crate) w: EisensteinInt,
}

/// Tests candidates in order, one pass per entry of `passes` (`true` for the
/// easy instances). Returns the winner and the number of norm equations
/// attempted.
pub(crate) fn test_level(
    cands: &[[BigInt; 4]],
    k: u32,
    cfg: &SearchConfig,
    stop_at_first: bool,
    passes: &[bool],
    unknown: &mut Vec<UnknownInstance>,
    norm_work: &mut u64,
) -> (Option<Found>, usize) {
    let residuals: Vec<BigInt> = cands.iter().map(|a| norm::pow3(k) - geometry::norm_sum(a)).collect();
    let easy: Vec<bool> = residuals.iter().map(|r| classify_with(r, &cfg.classify).easy).collect();
    let mut tested = 0;
    let mut best: Option<(usize, EisensteinInt)> = None;
    for &pass_easy in passes {
        let idx: Vec<usize> = (0..cands.len()).filter(|&i| easy[i] == pass_easy).collect();
        let batch = if stop_at_first { cfg.threads.max(1) } else { idx.len().max(1) };
        for group in idx.chunks(batch) {
            let jobs: Vec<BigInt> = group.iter().map(|&i| residuals[i].clone()).collect();
            let budget = if pass_easy { u64::MAX } else { cfg.norm_budget };
            let outs = solve_all(&jobs, budget, cfg.seed, cfg.threads);
            for (&i, out) in group.iter().zip(outs) {
                tested += 1;
                *norm_work += out.work_spent;
                match out.status {
                    NormStatus::Solved { w } => {
                        if best.as_ref().is_none_or(|(j, _)| i < *j) {
                            best = Some((i, w));
                        }
                    }
                    NormStatus::Unknown { cofactor, .. } => unknown.push(UnknownInstance {
                        k,
                        u: EisensteinInt::new(cands[i][0].clone(), cands[i][1].clone()),
                        v: EisensteinInt::new(cands[i][2].clone(), cands[i][3].clone()),
                        residual: residuals[i].clone(),
                        cofactor,
                    }),
                    NormStatus::Unsolvable { .. } => {}
                }
            }
            if stop_at_first && best.is_some() {
                break;
            }
        }
        if stop_at_first && best.is_some() {
            break;
        }
    }
    (best.map(|(i, w)| Found { a: cands[i].clone(), w }), tested)
}

/// Searches `k = 0, 1, …` for a `k`-feasible point of the scaled meniscus
/// around `target`.
pub fn approximate_state(target: &TwoLevelState, eps: &RealExpr, cfg: &SearchConfig) -> Result<ApproxResult, SearchError> {
    cfg.validate()?;
    let m = Meniscus::with_precision(target.clone(), eps.clone(), cfg.precision_bits)?;
    let eps_f = m.epsilon_f64();
    let enum_levels = enumeration_levels(eps_f);
    let cap = cfg.k_max.unwrap_or_else(|| k_cap(eps_f));
    let log_threshold = cfg.lambda * (1.0 / eps_f).ln();
    let threshold = log_threshold.exp();
    let limit = ENUM_LIMIT.max((2.0 * threshold).min(1e7) as usize);
    let mut stats = SearchStats::default();
    let mut unknown = Vec::new();
    let mut inspected = 0;
    let mut sparse_so_far = true;
    for k in 0..=cap {
        let rounding = k > enum_levels;
        let (found, truncated) = if rounding {
            (rounding_level(&m, k)?, false)
        } else {
            enumerate_level(&m, k, limit, &mut stats.enumeration)?
        };
        let count = found.len();
        let ordered = candidate_order(found, m.base());
        let exceeded = truncated || (count > 0 && (count as f64).ln() > log_threshold);
        let mut level = LevelStats { k, candidates: count, truncated, tested: 0, rounding, shift_capped: false };
        if exceeded && !rounding {
            let sample: &[[BigInt; 4]] = match cfg.mode {
                SearchMode::MinKAllCandidates => &[],
                SearchMode::FirstFeasible => &ordered[..ordered.len().min(SAMPLE_PER_LEVEL * (k.max(1) as usize))],
            };
            let (hit, tested) = test_level(sample, k, cfg, true, &[true, false], &mut unknown, &mut stats.norm_work);
            inspected += tested;
            level.tested = tested;
            stats.levels.push(level);
            if let Some(f) = hit {
                return finish(target, &m, f, k, inspected, unknown, stats);
            }
            return Err(SearchError::Exception(Box::new(SearchException {
                k_at_exception: k,
                count,
                truncated,
                count_threshold: threshold,
                strongly_exceptional: sparse_so_far,
                partial: sample.iter().map(|a| Candidate::from_coeffs(a, k, target.levels)).collect(),
                unknown_instances: unknown,
            })));
        }
        if count >= 2 {
            sparse_so_far = false;
        }
        let stop_at_first = cfg.mode == SearchMode::FirstFeasible;
        let (hit, tested) = test_level(&ordered, k, cfg, stop_at_first, &[true, false], &mut unknown, &mut stats.norm_work);
        inspected += tested;
        level.tested = tested;
        stats.levels.push(level);
        if let Some(f) = hit {
            return finish(target, &m, f, k, inspected, unknown, stats);
        }
    }
    if unknown.is_empty() {
        Err(SearchError::NotFound { k_cap: cap })
    } else {
        Err(SearchError::BudgetExhausted { k_cap: cap, unknown })
    }
}

pub(crate) fn finish(
    target: &TwoLevelState,
    m: &Meniscus,
    f: Found,
    k: u32,
    inspected: usize,
    unknown: Vec<UnknownInstance>,
    stats: SearchStats,
) -> Result<ApproxResult, SearchError> {
    let cand = Candidate::from_coeffs(&f.a, k, target.levels);
    let prec = 2 * m.working_precision();
    let d = distance(target, &cand, Some(&f.w), prec)?;
    let eps: Ball = m.epsilon.eval(prec).map_err(GeometryError::from)?;
    if d.compare(&eps) != Some(Ordering::Less) {
        return Err(SearchError::Verification(format!("distance {} not below ε at {prec} bits", d.to_decimal_string(20))));
    }
    let res = ApproxResult {
        target: target.clone(),
        u: cand.u,
        v: cand.v,
        w: f.w,
        k,
        distance: d,
        candidates_inspected: inspected,
        unknown_instances: unknown,
        stats,
    };
    if !res.is_exact() {
        return Err(SearchError::Verification("norm sum differs from 3^k".into()));
    }
    Ok(res)
}

#[derive(Debug, Clone)]
pub struct ReflectionBudget {
    pub state_result: ApproxResult,
    /// `2·(k+1) + 1`.
    pub reflection_r_count_bound: u32,
}

/// R-count bound for the reflection about the approximated state.
pub fn reflection_budget(target: &TwoLevelState, eps: &RealExpr, cfg: &SearchConfig) -> Result<ReflectionBudget, SearchError> {
    let r = approximate_state(target, eps, cfg)?;
    let bound = reflection_bound(r.k);
    Ok(ReflectionBudget { state_result: r, reflection_r_count_bound: bound })
}

pub fn reflection_bound(k: u32) -> u32 {
    2 * (k + 1) + 1
}
