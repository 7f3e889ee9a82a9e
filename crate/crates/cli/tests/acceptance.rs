//! Acceptance criteria. Each prints one PASS/FAIL line; the process fails if
//! any criterion does.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use metaplectic::eisenstein::Budget;
use metaplectic::geometry::{self, Candidate};
use metaplectic::householder::{decompose_su3, haar_random, max_diff};
use metaplectic::lattice::{brute_force_enumerate, em_feasible, ip_enumerate};
use metaplectic::norm::{self, pow3};
use metaplectic::p9::{approximate_phi, check_proxy, table1_fixtures};
use metaplectic::search::{approximate_state, ApproxResult, SearchConfig, SearchError};
use metaplectic::{Ball, EisensteinInt, Levels, Meniscus, RationalPolytope, RealExpr, TwoLevelState};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS_LOG3_TOL: f64 = 0.05;
const RESIDUAL_TOL: f64 = 0.05;
const HOUSEHOLDER_TOL: f64 = 1e-12;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn e(s: &str) -> RealExpr {
    RealExpr::parse(s).unwrap()
}

fn log3(x: f64) -> f64 {
    x.ln() / 3f64.ln()
}

// 1. Published proxy states
fn table1() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for row in table1_fixtures() {
        let printed = check_proxy(&row.candidate(), 512, 10_000_000).unwrap();
        let shifted = row.shifted();
        let s = check_proxy(&shifted, 512, 10_000_000).unwrap();
        let identity = s.w.as_ref().is_some_and(|w| shifted.norm_sum() + w.norm() == pow3(row.k));
        let eps_ok = (printed.eps_log3 - row.eps_log3).abs() <= EPS_LOG3_TOL;
        let res_ok = (printed.residual - row.residual).abs() <= RESIDUAL_TOL;
        ok &= eps_ok && res_ok && identity;
        parts.push(format!(
            "k={} eps 3^{:.3} (want 3^{}) residual {:.3} (want {}) shifted j={} feasible={}",
            row.k, printed.eps_log3, row.eps_log3, printed.residual, row.residual, row.shift, identity
        ));
        if let Some(c) = row.corrected_candidate() {
            let cc = check_proxy(&c, 512, 10_000_000).unwrap();
            parts.push(format!(
                "k={} corrected reading eps 3^{:.3} residual {:.3}",
                row.k, cc.eps_log3, cc.residual
            ));
        }
    }
    verdict(ok, parts.join("; "))
}

// 2. The fast path meets the published levels
fn phi_fast_path() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (eps, k_max) in [("3^(-9.5)", 30), ("3^(-19.9)", 60), ("3^(-29.5)", 90)] {
        let t = Instant::now();
        let r = approximate_phi(&e(eps), &SearchConfig::default());
        let dt = t.elapsed();
        match r {
            Ok(r) => {
                let bound: Ball = e(eps).eval(512).unwrap();
                let d = geometry::distance(&TwoLevelState::phi(), &r.candidate(), Some(&r.w), 512).unwrap();
                let exact = r.u.norm() + r.v.norm() + r.w.norm() == pow3(r.k);
                let good = exact && d.upper() <= bound.lower() && r.k <= k_max && dt < Duration::from_secs(300);
                ok &= good;
                parts.push(format!("{eps}: k={} d=3^{:.3} {:.2}s", r.k, log3(d.to_f64()), dt.as_secs_f64()));
            }
            Err(err) => {
                ok = false;
                parts.push(format!("{eps}: {err}"));
            }
        }
    }
    verdict(ok, parts.join("; "))
}

// 3. Norm solver against brute force
fn norm_oracle() -> Verdict {
    let mut mismatches = 0;
    for n in 0..=10_000u64 {
        let out = norm::solve(&BigInt::from(n), &mut Budget::unlimited(), 1).unwrap();
        let brute = norm::is_norm_brute_force(n);
        let agrees = match out.solution() {
            Some(w) => brute && w.norm() == BigInt::from(n),
            None => !brute && out.is_unsolvable(),
        };
        mismatches += usize::from(!agrees);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut random_fail = 0;
    for _ in 0..1000 {
        let w = loop {
            let w = EisensteinInt::new(rng.gen_range(-1_000_000i64..=1_000_000), rng.gen_range(-1_000_000i64..=1_000_000));
            if w.norm() <= BigInt::from(10u64.pow(12)) {
                break w;
            }
        };
        let n = w.norm();
        let out = norm::solve(&n, &mut Budget::unlimited(), 1).unwrap();
        random_fail += usize::from(out.solution().is_none_or(|s| s.norm() != n));
    }
    verdict(
        mismatches == 0 && random_fail == 0,
        format!("n<=10^4 mismatches {mismatches}; random w failures {random_fail}/1000"),
    )
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A box with widths at most 40 cut by up to three random halfspaces.
fn random_polytope(rng: &mut impl Rng) -> RationalPolytope {
    let dim = rng.gen_range(2..=4usize);
    let max_w = [0, 0, 40, 20, 10][dim];
    let lo: Vec<BigRational> = (0..dim).map(|_| q(rng.gen_range(-200..200), rng.gen_range(1..8))).collect();
    let hi: Vec<BigRational> = lo.iter().map(|l| l + q(rng.gen_range(0..max_w * 7), 7)).collect();
    let mut p = RationalPolytope::from_box(&lo, &hi);
    for _ in 0..rng.gen_range(0..=3) {
        let a: Vec<BigRational> = (0..dim).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..4))).collect();
        let centre: BigRational = a.iter().zip(lo.iter().zip(&hi)).map(|(c, (l, h))| c * (l + h) / q(2, 1)).sum();
        p = p.with_row(a, centre + q(rng.gen_range(-30..60), rng.gen_range(1..5)));
    }
    p
}

fn interior_empty(p: &RationalPolytope, closed: &BTreeSet<Vec<BigInt>>) -> bool {
    !closed.iter().any(|x| p.contains_strict(x))
}

// 4 and 5. Enumeration against brute force, with the bisection bound
fn enumeration() -> (Verdict, Verdict) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut set_fail, mut em_fail, mut bound_fail, mut bound_runs) = (0, 0, 0, 0);
    let runs = 200;
    for _ in 0..runs {
        let p = random_polytope(&mut rng);
        let brute = brute_force_enumerate(&p, 10_000_000).unwrap();
        let got = ip_enumerate(&p).unwrap();
        set_fail += usize::from(got.points != brute);
        em_fail += usize::from(em_feasible(&p).unwrap() != interior_empty(&p, &brute));
        let m = got.points.len();
        if m >= 1 {
            bound_runs += 1;
            let bound = got.stats.bisection_bound(m).unwrap_or(0);
            bound_fail += usize::from(got.stats.bisection_count > bound);
        }
    }
    (
        verdict(set_fail == 0 && em_fail == 0, format!("{runs} polytopes: set mismatches {set_fail}, emptiness mismatches {em_fail}")),
        verdict(bound_fail == 0, format!("{bound_runs} runs with m>=1: bound violations {bound_fail}")),
    )
}

fn random_target(rng: &mut impl Rng) -> TwoLevelState {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let levels = [(0, 1), (0, 2), (1, 2)][rng.gen_range(0..3)];
    TwoLevelState::new(
        [e(&format!("cos({t:.12})*cos({a:.12})")), e(&format!("cos({t:.12})*sin({a:.12})"))],
        [e(&format!("sin({t:.12})*cos({b:.12})")), e(&format!("sin({t:.12})*sin({b:.12})"))],
        Levels::new(levels.0, levels.1).unwrap(),
    )
    .unwrap()
}

/// Lattice points of the scaled meniscus at level `k`.
fn meniscus_points(m: &Meniscus, k: u32) -> Vec<[BigInt; 4]> {
    let p = m.enclosing_polytope(k).unwrap();
    ip_enumerate(&p)
        .unwrap()
        .points
        .into_iter()
        .map(|v| <[BigInt; 4]>::try_from(v).unwrap())
        .filter(|a| m.contains(a, k).unwrap())
        .collect()
}

// 6. Convex combinations of meniscus points stay inside
fn convex_combinations() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut pairs, mut failures) = (0, 0);
    for _ in 0..6 {
        let m = Meniscus::new(random_target(&mut rng), e("0.4")).unwrap();
        let Some((k0, pts)) = (0..7).map(|k| (k, meniscus_points(&m, k))).find(|(_, v)| v.len() >= 2) else {
            continue;
        };
        for (y1, y2) in pts.iter().zip(pts.iter().skip(1)).take(3) {
            pairs += 1;
            for l in 1..=2u32 {
                let n = 3i64.pow(l);
                for r in 0..=n {
                    let a: [BigInt; 4] = std::array::from_fn(|i| &y1[i] * r + &y2[i] * (n - r));
                    failures += usize::from(!m.contains(&a, k0 + 2 * l).unwrap());
                }
            }
        }
    }
    verdict(pairs > 0 && failures == 0, format!("{pairs} pairs, {failures} combinations outside"))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 }
}

#[derive(Default)]
struct EndToEnd {
    bad: usize,
    exceptions: usize,
    errors: usize,
    ratios: Vec<f64>,
    worst: u32,
}

impl EndToEnd {
    /// Checks the identity, the re-verified distance and the hard level bound.
    fn check(&mut self, t: &TwoLevelState, r: &ApproxResult, bound: &Ball, l: f64) {
        let exact = r.u.norm() + r.v.norm() + r.w.norm() == pow3(r.k);
        let y = Candidate { u: r.u.clone(), v: r.v.clone(), k: r.k, levels: t.levels };
        let d = geometry::distance(t, &y, Some(&r.w), 512).unwrap();
        let close = d.upper() <= bound.lower();
        let hard = (r.k as f64) <= 4.0 * l + 10.0;
        self.bad += usize::from(!(exact && close && hard));
        self.ratios.push(r.k as f64 / l);
        self.worst = self.worst.max(r.k);
    }
}

// 7. End to end on random targets. An exception is a report rather than a
// result; those targets are rerun at λ = 3/4 and must then pass the same checks.
fn end_to_end() -> Verdict {
    let levels = [6.0, 8.0, 10.0];
    let results: Vec<EndToEnd> = std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&l| {
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(l as u64);
                    let eps = e(&format!("3^(-{l})"));
                    let bound: Ball = eps.eval(512).unwrap();
                    let wide = SearchConfig { lambda: 0.75, ..SearchConfig::default() };
                    let mut out = EndToEnd::default();
                    for _ in 0..100 {
                        let t = random_target(&mut rng);
                        match approximate_state(&t, &eps, &SearchConfig::default()) {
                            Ok(r) => out.check(&t, &r, &bound, l),
                            Err(SearchError::Exception(_)) => {
                                out.exceptions += 1;
                                match approximate_state(&t, &eps, &wide) {
                                    Ok(r) => out.check(&t, &r, &bound, l),
                                    Err(_) => out.errors += 1,
                                }
                            }
                            Err(_) => out.errors += 1,
                        }
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let ok = results.iter().all(|r| r.bad == 0 && r.errors == 0);
    let parts: Vec<String> = levels
        .iter()
        .zip(results)
        .map(|(l, mut r)| {
            format!(
                "3^-{l}: failures {}, errors {}, exceptions {} (rerun at lambda 0.75), max k {}, median k/log3(1/eps) {:.3}",
                r.bad,
                r.errors,
                r.exceptions,
                r.worst,
                median(&mut r.ratios)
            )
        })
        .collect();
    verdict(ok, parts.join("; "))
}

// 8. Householder decomposition of Haar-random unitaries
fn householder() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut fail, mut worst, mut most) = (0, 0f64, 0);
    for _ in 0..50 {
        let u = haar_random(&mut rng, 256);
        match decompose_su3(&u, 1e-30) {
            Ok(d) => {
                let err = max_diff(&d.reconstruct(256), &u);
                worst = worst.max(err);
                most = most.max(d.reflections.len());
                fail += usize::from(d.reflections.len() > 6 || err >= HOUSEHOLDER_TOL);
            }
            Err(_) => fail += 1,
        }
    }
    verdict(fail == 0, format!("50 matrices: failures {fail}, max reflections {most}, max error {worst:.2e}"))
}

// 9. Byte-identical JSON across runs
fn determinism() -> Verdict {
    let poly = std::env::temp_dir().join(format!("acceptance-poly-{}.json", std::process::id()));
    std::fs::write(
        &poly,
        r#"{"dim":2,"rows":[{"a":["1","0"],"b":"7/2"},{"a":["0","1"],"b":"3"},{"a":["-1","-1"],"b":"2"}]}"#,
    )
    .unwrap();
    let poly = poly.to_string_lossy().into_owned();
    let runs: Vec<Vec<&str>> = vec![
        vec!["approx-state", "--x0", "cos(0.4),0", "--x1", "sin(0.4)*cos(1),sin(0.4)*sin(1)", "--epsilon", "3^-5", "--seed", "11"],
        vec!["approx-state", "--x0", "cos(0.4),0", "--x1", "sin(0.4)*cos(1),sin(0.4)*sin(1)", "--epsilon", "3^-5", "--mode", "min-k"],
        vec!["p9", "--epsilon", "3^-9.5", "--table1"],
        vec!["norm-solve", "--n", "1000000007"],
        vec!["enum-polytope", "--file", &poly],
        vec!["decompose-su3", "--matrix", "[[0,1,0],[1,0,0],[0,0,-1]]"],
    ];
    let mut diffs = Vec::new();
    for args in &runs {
        let outs: Vec<Vec<u8>> = (0..3)
            .map(|_| Command::new(env!("CARGO_BIN_EXE_metaplectic")).arg("--json").args(args).output().unwrap().stdout)
            .collect();
        if outs.iter().any(|o| o != &outs[0] || o.is_empty()) {
            diffs.push(args[0]);
        }
    }
    verdict(diffs.is_empty(), format!("{} commands x3 runs, differing: {diffs:?}", runs.len()))
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
    })
}

fn main() {
    let started = Instant::now();
    let (mut verdicts, enumeration) = std::thread::scope(|s| {
        let jobs: Vec<(u32, std::thread::ScopedJoinHandle<'_, (Verdict, f64)>)> = vec![
            (1, s.spawn(|| timed(table1))),
            (2, s.spawn(|| timed(phi_fast_path))),
            (3, s.spawn(|| timed(norm_oracle))),
            (6, s.spawn(|| timed(convex_combinations))),
            (7, s.spawn(|| timed(end_to_end))),
            (8, s.spawn(|| timed(householder))),
            (9, s.spawn(|| timed(determinism))),
        ];
        let t = Instant::now();
        let en = catch_unwind(enumeration).map_err(|_| ());
        let en_secs = t.elapsed().as_secs_f64();
        let v: Vec<(u32, (Verdict, f64))> = jobs.into_iter().map(|(i, h)| (i, h.join().unwrap())).collect();
        (v, (en, en_secs))
    });
    let (en, en_secs) = enumeration;
    let (v4, v5) = en.unwrap_or_else(|_| (verdict(false, "panicked"), verdict(false, "panicked")));
    verdicts.push((4, (v4, en_secs)));
    verdicts.push((5, (v5, en_secs)));
    verdicts.sort_by_key(|(i, _)| *i);
    let mut failed = 0;
    for (i, (v, secs)) in &verdicts {
        failed += usize::from(!v.pass);
        println!("criterion {i}: {} ({secs:.1}s) {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", verdicts.len() - failed, started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn timed(f: fn() -> Verdict) -> (Verdict, f64) {
    let t = Instant::now();
    let v = guarded(f);
    (v, t.elapsed().as_secs_f64())
}
