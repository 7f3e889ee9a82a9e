//! Fast path for `φ = (-e^(-πi/9)|0⟩ + e^(πi/9)|2⟩)/√2`.
//!
//! φ lies in the plane P spanned by `p1 = (-1,0,1,0)/√2` and
//! `p2 = (0,1,0,1)/√2`. A lattice point `a` projects to
//! `(A/(2√2), √3·T/(2√2))` in that frame, with `A = 2(a3-a1) + a2 - a4` and
//! `T = a2 + a4`. The kernel of the projection is spanned by `d1` and `d2`,
//! whose images are orthogonal, so the distance to φ depends on `(A, T)`
//! alone. Points are found by enumerating the thin arc of the projected
//! lattice, lifting each to the preimage nearest P and shifting along the
//! kernel until the norm equation solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::eisenstein::EisensteinInt;
use crate::expr::RealExpr;
use crate::geometry::{self, axis_rows, rational_halfspace, rounding_bits, Candidate, Levels, Meniscus, TwoLevelState};
use crate::lattice::{ip_enumerate_limited, EnumStats, RationalPolytope};
use crate::norm::{self, classify_with};
use crate::search::{
    candidate_order, finish, k_cap, test_level, ApproxResult, LevelStats, SearchConfig, SearchError,
    SearchStats, UnknownInstance, ENUM_LIMIT, SAMPLE_PER_LEVEL,
};

/// `v1 + v3`.
pub const D1: [i64; 4] = [1, 0, 1, 0];
/// `-v1 - 2v2 + v3 + 2v4`.
pub const D2: [i64; 4] = [-1, -2, 1, 2];

/// Shifts handed to the norm solver at once.
const SHIFT_CHUNK: usize = 512;

/// A point of the projected lattice in `(A, T)` coordinates, where
/// `A ≡ T (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanePoint {
    #[serde(with = "crate::decimal::big")]
    pub a: BigInt,
    #[serde(with = "crate::decimal::big")]
    pub t: BigInt,
}

impl PlanePoint {
    pub fn new(a: impl Into<BigInt>, t: impl Into<BigInt>) -> Self {
        PlanePoint { a: a.into(), t: t.into() }
    }

    /// `8·|x|²`.
    pub fn norm8(&self) -> BigInt {
        &self.a * &self.a + BigInt::from(3) * &self.t * &self.t
    }

    /// `8·⟨x, y⟩`.
    pub fn dot8(&self, o: &PlanePoint) -> BigInt {
        &self.a * &o.a + BigInt::from(3) * &self.t * &o.t
    }

    fn sub_scaled(&self, m: &BigInt, o: &PlanePoint) -> PlanePoint {
        PlanePoint { a: &self.a - m * &o.a, t: &self.t - m * &o.t }
    }

    /// Coordinates along `(p1, p2)`.
    pub fn to_plane(&self, prec: u32) -> [Ball; 2] {
        let inv = Ball::from_i64(8, prec).sqrt().recip().expect("nonzero");
        let s3 = Ball::from_i64(3, prec).sqrt();
        [Ball::from_bigint(&self.a, prec) * inv.clone(), Ball::from_bigint(&self.t, prec) * s3 * inv]
    }
}

/// The plane of φ and the kernel of the projection onto it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneFrame {
    /// `√2·p1` and `√2·p2`.
    pub p1: [i64; 4],
    pub p2: [i64; 4],
    pub d1: [BigInt; 4],
    pub d2: [BigInt; 4],
    pub basis: [PlanePoint; 2],
}

impl Default for PlaneFrame {
    fn default() -> Self {
        PlaneFrame {
            p1: [-1, 0, 1, 0],
            p2: [0, 1, 0, 1],
            d1: D1.map(BigInt::from),
            d2: D2.map(BigInt::from),
            basis: projected_lattice_basis(),
        }
    }
}

impl PlaneFrame {
    /// `⟨φ, q(d1)⟩ = ⟨φ, q(d2)⟩ = 0`, decided exactly: both kernel vectors have
    /// `A = T = 0`, so the pairing with `cos(π/9)·p1 + sin(π/9)·p2` vanishes
    /// identically.
    pub fn kernel_is_orthogonal(&self) -> bool {
        [&self.d1, &self.d2].iter().all(|d| {
            let x = plane_coords(d);
            x.a.is_zero() && x.t.is_zero()
        })
    }
}

/// `(A, T)` of `q(a)`.
pub fn plane_coords(a: &[BigInt; 4]) -> PlanePoint {
    PlanePoint { a: BigInt::from(2) * (&a[2] - &a[0]) + &a[1] - &a[3], t: &a[1] + &a[3] }
}

/// Reduced basis of the projection of the Eisenstein lattice onto P.
///
/// The generators map to `(-2,0)`, `(1,1)`, `(2,0)` and `(-1,1)`, so the
/// projection is `{A ≡ T mod 2}`, twice as dense as the rectangular lattice
/// spanned by `p1/√2` and `√(3/2)·p2`.
pub fn projected_lattice_basis() -> [PlanePoint; 2] {
    let gens: Vec<PlanePoint> = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        .iter()
        .map(|g| plane_coords(&g.map(BigInt::from)))
        .collect();
    gauss_reduce_int(hermite_2d(&gens))
}

/// A basis of the integer lattice generated by `gens`.
fn hermite_2d(gens: &[PlanePoint]) -> [PlanePoint; 2] {
    let mut top = PlanePoint::new(0, 0);
    let mut axis = BigInt::zero();
    for g in gens {
        let mut g = g.clone();
        // Euclid on the T column keeps `top` the only vector with T ≠ 0.
        while !g.t.is_zero() {
            if top.t.is_zero() {
                std::mem::swap(&mut top, &mut g);
                break;
            }
            let q = g.t.div_floor(&top.t);
            g = g.sub_scaled(&q, &top);
            std::mem::swap(&mut top, &mut g);
        }
        axis = axis.gcd(&g.a);
    }
    if !axis.is_zero() {
        top.a = top.a.mod_floor(&axis);
    }
    [PlanePoint::new(axis, 0), top]
}

/// Lagrange-Gauss reduction in the metric `A² + 3T²`.
fn gauss_reduce_int(b: [PlanePoint; 2]) -> [PlanePoint; 2] {
    let [mut x, mut y] = b;
    loop {
        if x.norm8() > y.norm8() {
            std::mem::swap(&mut x, &mut y);
        }
        let n = x.norm8();
        let d = y.dot8(&x);
        let mu = (BigInt::from(2) * &d + &n).div_floor(&(BigInt::from(2) * &n));
        if mu.is_zero() {
            return [x, y];
        }
        y = y.sub_scaled(&mu, &x);
    }
}

fn round_quarter(x: &BigInt) -> BigInt {
    let y: BigInt = x + 2;
    y.div_floor(&BigInt::from(4))
}

/// The preimage of `x` nearest to P: starts from `((T-A)/2, T, 0, 0)` and
/// removes the kernel component by rounding its `d1` and `d2` coordinates.
pub fn lift(x: &PlanePoint) -> [BigInt; 4] {
    let a1 = (&x.t - &x.a) / 2;
    let a2 = x.t.clone();
    // kernel coordinates (2a1 - a2 + 2a3 - a4)/4 and (a4 - a2)/4
    let k1 = round_quarter(&(BigInt::from(2) * &a1 - &a2));
    let k2 = round_quarter(&-&a2);
    let mut a = [a1, a2, BigInt::zero(), BigInt::zero()];
    shift(&mut a, &-k1, &-k2);
    a
}

fn shift(a: &mut [BigInt; 4], j1: &BigInt, j2: &BigInt) {
    for i in 0..4 {
        a[i] += j1 * D1[i] + j2 * D2[i];
    }
}

/// Shifts `base + j1·d1 + j2·d2` inside the ball of radius `√3^k`, ordered
/// by `|j1| + |j2|` and then lexicographically. Stops after `cap` shifts,
/// reporting whether the cap was hit.
pub fn kernel_shifts(base: &[BigInt; 4], k: u32, cap: usize) -> (Vec<[BigInt; 4]>, bool) {
    let bound = norm::pow3(k);
    let mut out = Vec::new();
    for r in 0i64.. {
        let mut any = false;
        for j1 in -r..=r {
            let rest = r - j1.abs();
            let j2s = if rest == 0 { vec![0] } else { vec![-rest, rest] };
            for j2 in j2s {
                let mut a = base.clone();
                shift(&mut a, &BigInt::from(j1), &BigInt::from(j2));
                if geometry::norm_sum(&a) <= bound {
                    any = true;
                    if out.len() == cap {
                        return (out, true);
                    }
                    out.push(a);
                }
            }
        }
        // the ball is convex and centred within half a step of the base,
        // so an empty ring means every later ring is empty too
        if !any {
            break;
        }
    }
    (out, false)
}

/// Lifted lattice points of the scaled meniscus around φ at level `k`,
/// found by enumerating its projection onto P.
pub fn arc_points(m: &Meniscus, k: u32, stats: &mut EnumStats) -> Result<(Vec<[BigInt; 4]>, bool), SearchError> {
    let prec = m.working_precision();
    let at = m.at(prec)?;
    let r = geometry::sqrt3_pow(k, prec);
    let eps2 = at.eps.square();
    let half_width = r.clone() * (eps2.clone() - eps2.square().mul_pow2(-2)).sqrt();
    // p = c·p1 + s·p2 with c/√2 = p[2] and s/√2 = p[3]; variables (m, T)
    // with A = 2m + T
    let (cc, ss) = (at.p[2].clone(), at.p[3].clone());
    let along = [cc.clone(), (cc.clone() + ss.clone() * at.s3h.clone().mul_pow2(1)).mul_pow2(-1)];
    let across = [-ss.clone(), (cc * at.s3h.clone().mul_pow2(1) - ss).mul_pow2(-1)];
    let bound = num_integer::Roots::sqrt(&(BigInt::from(8) * norm::pow3(k))) + 1;
    let bits = rounding_bits(&bound, m.epsilon_f64()).min(prec);
    let neg = |v: &[Ball; 2]| [-v[0].clone(), -v[1].clone()];
    let mut rows = vec![
        rational_halfspace(&along, &r, &bound, bits),
        rational_halfspace(&neg(&along), &-(at.cut.clone() * r.clone()), &bound, bits),
        rational_halfspace(&across, &half_width, &bound, bits),
        rational_halfspace(&neg(&across), &half_width, &bound, bits),
    ];
    rows.extend(axis_rows(2, &bound));
    let poly = RationalPolytope::new(2, rows)?;
    let e = ip_enumerate_limited(&poly, Some(ENUM_LIMIT))?;
    stats.merge(&e.stats);
    let mut out = Vec::new();
    for x in e.points {
        let t = x[1].clone();
        let a = lift(&PlanePoint { a: BigInt::from(2) * &x[0] + &t, t });
        if m.contains(&a, k)? {
            out.push(a);
        }
    }
    Ok((out, e.truncated))
}

/// Distance from φ to `q(a)/√3^k`, computed from `(A, T)` alone so that it
/// is unchanged by kernel shifts.
pub fn phi_distance(a: &[BigInt; 4], k: u32, prec: u32) -> Result<Ball, SearchError> {
    let target = TwoLevelState::phi();
    let p = target.embed(prec).map_err(SearchError::Geometry)?;
    let x = plane_coords(a).to_plane(prec);
    let two = Ball::from_i64(2, prec);
    let c = p[2].clone() * two.clone().sqrt();
    let s = p[3].clone() * two.clone().sqrt();
    let ip = (c * x[0].clone() + s * x[1].clone()) / geometry::sqrt3_pow(k, prec);
    Ok((two * (Ball::from_i64(1, prec) - ip)).sqrt())
}

fn shift_cap(k: u32) -> usize {
    SAMPLE_PER_LEVEL * k.max(1) as usize
}

struct LevelOutcome {
    found: Option<crate::search::Found>,
    stats: LevelStats,
}

/// Tests the arc points of one level, best projection first. The shifts of
/// a point are tried easy instances first, then budgeted hard ones.
fn phi_level(
    m: &Meniscus,
    k: u32,
    cfg: &SearchConfig,
    stats: &mut SearchStats,
    unknown: &mut Vec<UnknownInstance>,
) -> Result<LevelOutcome, SearchError> {
    let (points, truncated) = arc_points(m, k, &mut stats.enumeration)?;
    let ordered = candidate_order(points, m.base());
    let mut level =
        LevelStats { k, candidates: ordered.len(), truncated, tested: 0, rounding: false, shift_capped: false };
    for base in &ordered {
        let (shifts, capped) = kernel_shifts(base, k, shift_cap(k));
        level.shift_capped |= capped;
        let easy: Vec<bool> = shifts
            .iter()
            .map(|a| classify_with(&(norm::pow3(k) - geometry::norm_sum(a)), &cfg.classify).easy)
            .collect();
        for pass in [true, false] {
            let subset: Vec<[BigInt; 4]> =
                shifts.iter().zip(&easy).filter(|(_, e)| **e == pass).map(|(a, _)| a.clone()).collect();
            for chunk in subset.chunks(SHIFT_CHUNK) {
                let (hit, tested) = test_level(chunk, k, cfg, true, &[pass], unknown, &mut stats.norm_work);
                level.tested += tested;
                if hit.is_some() {
                    return Ok(LevelOutcome { found: hit, stats: level });
                }
            }
        }
    }
    Ok(LevelOutcome { found: None, stats: level })
}

/// Searches `k = 0, 1, …` for a `k`-feasible point near φ using the plane
/// projection. Both search modes return the feasible point of best
/// projection at the first level that has one.
pub fn approximate_phi(eps: &RealExpr, cfg: &SearchConfig) -> Result<ApproxResult, SearchError> {
    cfg.validate()?;
    let target = TwoLevelState::phi();
    let m = Meniscus::with_precision(target.clone(), eps.clone(), cfg.precision_bits)?;
    let cap = cfg.k_max.unwrap_or_else(|| k_cap(m.epsilon_f64()));
    let mut stats = SearchStats::default();
    let mut unknown = Vec::new();
    let mut inspected = 0;
    for k in 0..=cap {
        let out = phi_level(&m, k, cfg, &mut stats, &mut unknown)?;
        inspected += out.stats.tested;
        stats.levels.push(out.stats);
        if let Some(f) = out.found {
            return finish(&target, &m, f, k, inspected, unknown, stats);
        }
    }
    if unknown.is_empty() {
        Err(SearchError::NotFound { k_cap: cap })
    } else {
        Err(SearchError::BudgetExhausted { k_cap: cap, unknown })
    }
}

/// The feasible point at level `k` closest to φ among those within `eps`.
pub fn best_phi_at_level(eps: &RealExpr, k: u32, cfg: &SearchConfig) -> Result<Option<ApproxResult>, SearchError> {
    cfg.validate()?;
    let target = TwoLevelState::phi();
    let m = Meniscus::with_precision(target.clone(), eps.clone(), cfg.precision_bits)?;
    let mut stats = SearchStats::default();
    let mut unknown = Vec::new();
    let out = phi_level(&m, k, cfg, &mut stats, &mut unknown)?;
    let inspected = out.stats.tested;
    stats.levels.push(out.stats);
    match out.found {
        Some(f) => Ok(Some(finish(&target, &m, f, k, inspected, unknown, stats)?)),
        None => Ok(None),
    }
}

pub const MU_NOTE: &str = "the magic state mu = P9·H|0> is prepared offline with the same circuit \
     and inherits its fidelity from the approximation of phi";

#[derive(Debug, Clone)]
pub struct P9Report {
    pub result: ApproxResult,
    /// R-count of the state preparation `c_φ`: at most `k + 1`.
    pub c_phi_r_count: u32,
    /// R-count of `R_φ = c_φ R c_φ⁻¹`: at most `2(k + 1) + 1`.
    pub r_phi_r_count: u32,
    pub mu_note: &'static str,
}

pub fn p9_emulation_report(eps: &RealExpr, cfg: &SearchConfig) -> Result<P9Report, SearchError> {
    let result = approximate_phi(eps, cfg)?;
    let c = result.r_count_bound();
    Ok(P9Report { c_phi_r_count: c, r_phi_r_count: 2 * c + 1, result, mu_note: MU_NOTE })
}

/// Alternative reading of a published row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectedReading {
    pub u: EisensteinInt,
    pub v: EisensteinInt,
    pub note: String,
}

/// A published proxy state for φ: `u` on `|0⟩`, `v` on `|2⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub k: u32,
    pub u: EisensteinInt,
    pub v: EisensteinInt,
    pub eps_log3: f64,
    /// `k + 3·log₃ ε`.
    pub residual: f64,
    /// The feasible state is `s + shift·(|0⟩ + |2⟩)`.
    pub shift: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected: Option<CorrectedReading>,
}

impl Table1Row {
    pub fn candidate(&self) -> Candidate {
        Candidate { u: self.u.clone(), v: self.v.clone(), k: self.k, levels: phi_levels() }
    }

    pub fn shifted(&self) -> Candidate {
        shifted_candidate(&self.candidate(), self.shift)
    }

    pub fn corrected_candidate(&self) -> Option<Candidate> {
        self.corrected.as_ref().map(|c| Candidate { u: c.u.clone(), v: c.v.clone(), k: self.k, levels: phi_levels() })
    }
}

fn phi_levels() -> Levels {
    TwoLevelState::phi().levels
}

/// `y + j·d1`.
pub fn shifted_candidate(y: &Candidate, j: i64) -> Candidate {
    let mut a = y.coeffs();
    shift(&mut a, &BigInt::from(j), &BigInt::zero());
    Candidate::from_coeffs(&a, y.k, y.levels)
}

/// The three published proxy states for `k = 30, 60, 90`.
pub fn table1_fixtures() -> Vec<Table1Row> {
    serde_json::from_str(include_str!("../data/table1.json")).expect("bundled fixture parses")
}

/// Measured quantities of a fixed candidate.
#[derive(Debug, Clone)]
pub struct ProxyCheck {
    pub distance: Ball,
    pub eps_log3: f64,
    pub residual: f64,
    /// `w` with `N(u) + N(v) + N(w) = 3^k`, when the norm equation solves.
    pub w: Option<EisensteinInt>,
}

/// Distance, residual and completing `w` for `y`.
pub fn check_proxy(y: &Candidate, prec: u32, budget: u64) -> Result<ProxyCheck, SearchError> {
    let d = phi_distance(&y.coeffs(), y.k, prec)?;
    let eps_log3 = geometry::log3(&d).unwrap_or(f64::NEG_INFINITY);
    let r = norm::pow3(y.k) - y.norm_sum();
    let w = if r.is_negative() {
        None
    } else {
        let mut b = crate::eisenstein::Budget::new(budget);
        norm::solve(&r, &mut b, crate::eisenstein::DEFAULT_FACTOR_SEED)?.solution().cloned()
    };
    Ok(ProxyCheck { distance: d, eps_log3, residual: y.k as f64 + 3.0 * eps_log3, w })
}

/// Whether `x` lies in the projected lattice.
pub fn in_projected_lattice(x: &PlanePoint) -> bool {
    (&x.a - &x.t).is_even()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: [i64; 4]) -> [BigInt; 4] {
        v.map(BigInt::from)
    }

    #[test]
    fn generator_projections() {
        assert_eq!(plane_coords(&ints([1, 0, 0, 0])), PlanePoint::new(-2, 0));
        assert_eq!(plane_coords(&ints([0, 1, 0, 0])), PlanePoint::new(1, 1));
        let b = projected_lattice_basis();
        assert_eq!(b[0].norm8(), BigInt::from(4));
        assert_eq!(b[1].norm8(), BigInt::from(4));
        // Gram determinant of the reduced basis, times 64
        let det = b[0].norm8() * b[1].norm8() - b[0].dot8(&b[1]).pow(2);
        assert_eq!(det, BigInt::from(12));
        assert!(b.iter().all(in_projected_lattice));
    }

    #[test]
    fn kernel_is_orthogonal() {
        let f = PlaneFrame::default();
        assert!(f.kernel_is_orthogonal());
        let q1 = geometry::lattice_point(&f.d1, 128);
        let q2 = geometry::lattice_point(&f.d2, 128);
        let dot: Ball = (0..4).map(|i| q1[i].clone() * q2[i].clone()).fold(Ball::from_i64(0, 128), |s, x| s + x);
        assert!(dot.contains_zero() && dot.to_f64().abs() < 1e-30);
    }

    #[test]
    fn lift_is_a_preimage_near_the_plane() {
        for at in -9i64..=9 {
            for t in -9i64..=9 {
                if (at - t) % 2 != 0 {
                    continue;
                }
                let x = PlanePoint::new(at, t);
                let a = lift(&x);
                assert_eq!(plane_coords(&a), x);
                // |orth|² = 2·t1² + 6·t2² with |t1|, |t2| ≤ 1/2, times 8
                let orth8 = BigInt::from(8) * geometry::norm_sum(&a) - x.norm8();
                assert!(orth8 <= BigInt::from(16), "{at} {t}");
            }
        }
    }

    #[test]
    fn shifts_keep_the_distance() {
        let row = &table1_fixtures()[1];
        let y = row.candidate().coeffs();
        let d0 = phi_distance(&y, row.k, 256).unwrap();
        for (j1, j2) in [(1, 0), (0, 1), (-3, 2), (27, -5)] {
            let mut a = y.clone();
            shift(&mut a, &BigInt::from(j1), &BigInt::from(j2));
            let d = phi_distance(&a, row.k, 256).unwrap();
            assert_eq!(d, d0);
            let general = geometry::distance(
                &TwoLevelState::phi(),
                &Candidate::from_coeffs(&a, row.k, phi_levels()),
                None,
                256,
            )
            .unwrap();
            assert!((general.to_f64() - d0.to_f64()).abs() < 1e-30);
        }
    }

    #[test]
    fn shift_order() {
        let (s, capped) = kernel_shifts(&ints([0, 0, 0, 0]), 4, 5);
        assert!(capped);
        let want = [[0, 0, 0, 0], [-1, 0, -1, 0], [1, 2, -1, -2], [-1, -2, 1, 2], [1, 0, 1, 0]];
        assert_eq!(s, want.map(ints).to_vec());
        let (all, capped) = kernel_shifts(&ints([0, 0, 0, 0]), 2, 1000);
        assert!(!capped);
        // 2·j1² + 6·j2² ≤ 9
        assert!(all.iter().all(|a| geometry::norm_sum(a) <= BigInt::from(9)));
        assert_eq!(all.len(), 11);
    }

    #[test]
    fn fixtures_load() {
        let rows = table1_fixtures();
        assert_eq!(rows.iter().map(|r| (r.k, r.shift)).collect::<Vec<_>>(), vec![(30, 4), (60, 3), (90, 27)]);
        assert!(rows[0].corrected.is_some());
        assert_eq!(rows[2].u, EisensteinInt::new(
            "-1550523416973111862994".parse::<BigInt>().unwrap(),
            "825016278023092749328".parse::<BigInt>().unwrap(),
        ));
    }

    #[test]
    fn published_rows() {
        for row in table1_fixtures().iter().skip(1) {
            let c = check_proxy(&row.candidate(), 256, 1 << 24).unwrap();
            assert!((c.eps_log3 - row.eps_log3).abs() < 0.05, "{}", c.eps_log3);
            assert!((c.residual - row.residual).abs() < 0.05);
            let s = check_proxy(&row.shifted(), 256, 1 << 24).unwrap();
            let w = s.w.expect("shifted state is feasible");
            let y = row.shifted();
            assert_eq!(y.norm_sum() + w.norm(), norm::pow3(row.k));
        }
        let first = &table1_fixtures()[0];
        let c = check_proxy(&first.corrected_candidate().unwrap(), 256, 1 << 24).unwrap();
        assert!((c.eps_log3 + 9.53).abs() < 0.05);
    }

    #[test]
    fn phi_at_low_precision() {
        let cfg = SearchConfig::default();
        let eps = RealExpr::parse("3^-3").unwrap();
        let r = approximate_phi(&eps, &cfg).unwrap();
        assert!(r.is_exact());
        assert!(r.distance.to_f64() <= 3f64.powi(-3));
        let general = crate::search::approximate_state(&TwoLevelState::phi(), &eps, &cfg).unwrap();
        assert_eq!(r.k, general.k);
    }

    #[test]
    fn report_bounds_are_odd() {
        let rep = p9_emulation_report(&RealExpr::parse("3^-2").unwrap(), &SearchConfig::default()).unwrap();
        assert_eq!(rep.r_phi_r_count, 2 * rep.result.k + 3);
        assert_eq!(rep.r_phi_r_count % 2, 1);
    }
}
