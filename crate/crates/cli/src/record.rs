//! JSON payloads. Big integers are decimal strings throughout.

use metaplectic::householder::{CBall, Decomposition};
use metaplectic::lattice::EnumStats;
use metaplectic::norm::NormStatus;
use metaplectic::p9::{ProxyCheck, Table1Row};
use metaplectic::search::{ApproxResult, SearchConfig, SearchError, SearchException, SearchStats, UnknownInstance};
use metaplectic::{EisensteinInt, Levels};
use serde::{Deserialize, Serialize};

/// Digits after the decimal point for reals.
pub const DIGITS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Solved,
    Unsolvable,
    Unknown,
    Exception,
    BudgetExhausted,
    NotFound,
    Error,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Ok | Status::Solved | Status::Unsolvable => 0,
            Status::Exception => 2,
            Status::BudgetExhausted | Status::NotFound | Status::Unknown => 3,
            Status::Error => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub epsilon: String,
    pub lambda: f64,
    pub mode: metaplectic::search::SearchMode,
    pub norm_budget: u64,
    pub seed: u64,
    pub precision_bits: Option<u32>,
    pub k_max: Option<u32>,
    pub threads: usize,
}

impl ConfigSnapshot {
    pub fn new(epsilon: &str, cfg: &SearchConfig) -> Self {
        ConfigSnapshot {
            epsilon: epsilon.to_string(),
            lambda: cfg.lambda,
            mode: cfg.mode,
            norm_budget: cfg.norm_budget,
            seed: cfg.seed,
            precision_bits: cfg.precision_bits,
            k_max: cfg.k_max,
            threads: cfg.threads,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub command: String,
    pub status: Status,
    pub config: ConfigSnapshot,
    #[serde(flatten)]
    pub result: Option<StatePayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exception: Option<SearchException>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_instances: Vec<UnknownInstance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p9: Option<P9Payload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePayload {
    pub levels: Levels,
    pub k: u32,
    pub u: EisensteinInt,
    pub v: EisensteinInt,
    pub w: EisensteinInt,
    pub distance: String,
    pub distance_log3: Option<f64>,
    pub r_count_bound: u32,
    pub reflection_r_count_bound: u32,
    pub depth_range: Vec<u32>,
    pub candidates_inspected: usize,
    pub stats: SearchStats,
}

impl StatePayload {
    pub fn new(r: &ApproxResult) -> Self {
        StatePayload {
            levels: r.target.levels,
            k: r.k,
            u: r.u.clone(),
            v: r.v.clone(),
            w: r.w.clone(),
            distance: r.distance.to_decimal_string(DIGITS),
            distance_log3: r.distance_log3(),
            r_count_bound: r.r_count_bound(),
            reflection_r_count_bound: metaplectic::search::reflection_bound(r.k),
            depth_range: r.depth_range(),
            candidates_inspected: r.candidates_inspected,
            stats: r.stats.clone(),
        }
    }
}

impl StateRecord {
    pub fn from_outcome(command: &str, config: ConfigSnapshot, out: Result<ApproxResult, SearchError>) -> Self {
        let mut rec = StateRecord {
            command: command.to_string(),
            status: Status::Ok,
            config,
            result: None,
            exception: None,
            unknown_instances: Vec::new(),
            message: None,
            p9: None,
            timing_ms: None,
        };
        match out {
            Ok(r) => {
                rec.unknown_instances = r.unknown_instances.clone();
                rec.result = Some(StatePayload::new(&r));
            }
            Err(SearchError::Exception(e)) => {
                rec.status = Status::Exception;
                rec.message = Some(SearchError::Exception(e.clone()).to_string());
                rec.exception = Some(*e);
            }
            Err(SearchError::BudgetExhausted { k_cap, unknown }) => {
                rec.status = Status::BudgetExhausted;
                rec.message = Some(format!("level cap {k_cap} reached"));
                rec.unknown_instances = unknown;
            }
            Err(e @ SearchError::NotFound { .. }) => {
                rec.status = Status::NotFound;
                rec.message = Some(e.to_string());
            }
            Err(e) => {
                rec.status = Status::Error;
                rec.message = Some(e.to_string());
            }
        }
        rec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P9Payload {
    pub c_phi_r_count: u32,
    pub r_phi_r_count: u32,
    pub mu_note: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table1: Vec<FixtureCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub k: u32,
    pub published_eps_log3: f64,
    pub measured_eps_log3: f64,
    pub published_residual: f64,
    pub measured_residual: f64,
    pub shift: i64,
    /// Completion of the shifted state, when its norm equation solves.
    pub shifted_w: Option<EisensteinInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_eps_log3: Option<f64>,
}

impl FixtureCheck {
    pub fn new(row: &Table1Row, printed: &ProxyCheck, shifted: &ProxyCheck, corrected: Option<&ProxyCheck>) -> Self {
        FixtureCheck {
            k: row.k,
            published_eps_log3: row.eps_log3,
            measured_eps_log3: round6(printed.eps_log3),
            published_residual: row.residual,
            measured_residual: round6(printed.residual),
            shift: row.shift,
            shifted_w: shifted.w.clone(),
            corrected_eps_log3: corrected.map(|c| round6(c.eps_log3)),
        }
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub command: String,
    pub status: Status,
    pub n: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<EisensteinInt>,
    pub norm_check: bool,
    pub outcome: NormStatus,
    pub work_spent: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumRecord {
    pub command: String,
    pub status: Status,
    pub dim: usize,
    pub count: usize,
    pub truncated: bool,
    /// Coordinates as decimal strings, in lexicographic order.
    pub points: Vec<Vec<String>>,
    pub stats: EnumStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bisection_bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// `[re, im]` as decimal strings.
pub type ComplexRepr = [String; 2];

pub fn complex_repr(z: &CBall) -> ComplexRepr {
    [z.re.to_decimal_string(DIGITS), z.im.to_decimal_string(DIGITS)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionRepr {
    pub levels: [usize; 2],
    pub u: [ComplexRepr; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeRecord {
    pub command: String,
    pub status: Status,
    pub precision_bits: u32,
    pub reflection_count: usize,
    pub reflections: Vec<ReflectionRepr>,
    pub phase: [ComplexRepr; 3],
    pub reconstruction_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl DecomposeRecord {
    pub fn new(d: &Decomposition, prec: u32, error: f64) -> Self {
        DecomposeRecord {
            command: "decompose-su3".into(),
            status: Status::Ok,
            precision_bits: prec,
            reflection_count: d.reflections.len(),
            reflections: d
                .reflections
                .iter()
                .map(|r| ReflectionRepr { levels: [r.levels.0, r.levels.1], u: [complex_repr(&r.u[0]), complex_repr(&r.u[1])] })
                .collect(),
            phase: [complex_repr(&d.phase[0]), complex_repr(&d.phase[1]), complex_repr(&d.phase[2])],
            reconstruction_error: error,
            message: None,
            timing_ms: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use metaplectic::eisenstein::Budget;
    use metaplectic::householder::{decompose_su3, haar_random, max_diff};
    use metaplectic::lattice::ip_enumerate;
    use metaplectic::p9::{approximate_phi, p9_emulation_report};
    use metaplectic::search::approximate_state;
    use metaplectic::{RationalPolytope, RealExpr, TwoLevelState};
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use serde::de::DeserializeOwned;

    /// parse → serialize → parse must be a fixpoint.
    fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(x: &T) {
        let s = serde_json::to_string(x).unwrap();
        let back: T = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, x);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    fn e(s: &str) -> RealExpr {
        RealExpr::parse(s).unwrap()
    }

    #[test]
    fn state_records() {
        let cfg = SearchConfig::default();
        let t = TwoLevelState::new([e("cos(0.9)"), e("0")], [e("sin(0.9)*cos(2)"), e("sin(0.9)*sin(2)")], Levels::default()).unwrap();
        let ok = StateRecord::from_outcome("approx-state", ConfigSnapshot::new("3^-3", &cfg), approximate_state(&t, &e("3^-3"), &cfg));
        assert_eq!(ok.status, Status::Ok);
        round_trip(&ok);
        let low = SearchConfig { k_max: Some(1), ..cfg.clone() };
        let capped = StateRecord::from_outcome("approx-state", ConfigSnapshot::new("3^-6", &low), approximate_state(&t, &e("3^-6"), &low));
        assert_ne!(capped.status, Status::Ok);
        round_trip(&capped);
        let mink = SearchConfig { mode: metaplectic::search::SearchMode::MinKAllCandidates, ..cfg.clone() };
        let basis = TwoLevelState::new([e("cos(0.3)"), e("sin(0.3)")], [e("0"), e("0")], Levels::default()).unwrap();
        let exc = StateRecord::from_outcome("approx-state", ConfigSnapshot::new("0.05", &mink), approximate_state(&basis, &e("0.05"), &mink));
        assert_eq!(exc.status, Status::Exception);
        round_trip(&exc);
    }

    #[test]
    fn p9_record() {
        let cfg = SearchConfig::default();
        let rep = p9_emulation_report(&e("3^-5"), &cfg).unwrap();
        let mut rec = StateRecord::from_outcome("p9", ConfigSnapshot::new("3^-5", &cfg), approximate_phi(&e("3^-5"), &cfg));
        rec.p9 = Some(P9Payload {
            c_phi_r_count: rep.c_phi_r_count,
            r_phi_r_count: rep.r_phi_r_count,
            mu_note: rep.mu_note.into(),
            table1: Vec::new(),
        });
        round_trip(&rec);
    }

    #[test]
    fn norm_and_enum_records() {
        let n = BigInt::from(91);
        let out = metaplectic::norm::solve(&n, &mut Budget::unlimited(), 1).unwrap();
        round_trip(&NormRecord {
            command: "norm-solve".into(),
            status: Status::Solved,
            n: n.to_string(),
            w: out.solution().cloned(),
            norm_check: true,
            outcome: out.status.clone(),
            work_spent: out.work_spent,
            timing_ms: Some(1.5),
        });
        let q = |v: i64| num_rational::BigRational::from_integer(v.into());
        let p = RationalPolytope::from_box(&[q(0), q(0)], &[q(3), q(2)]);
        let en = ip_enumerate(&p).unwrap();
        round_trip(&EnumRecord {
            command: "enum-polytope".into(),
            status: Status::Ok,
            dim: 2,
            count: en.points.len(),
            truncated: false,
            points: en.points.iter().map(|x| x.iter().map(|c| c.to_string()).collect()).collect(),
            stats: en.stats.clone(),
            bisection_bound: en.stats.bisection_bound(en.points.len()),
            timing_ms: None,
        });
    }

    #[test]
    fn decompose_record() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let u = haar_random(&mut rng, 256);
        let d = decompose_su3(&u, 1e-30).unwrap();
        let err = max_diff(&d.reconstruct(256), &u);
        round_trip(&DecomposeRecord::new(&d, 256, err));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Unsolvable.exit_code(), 0);
        assert_eq!(Status::Exception.exit_code(), 2);
        assert_eq!(Status::BudgetExhausted.exit_code(), 3);
        assert_eq!(Status::Error.exit_code(), 1);
    }
}
