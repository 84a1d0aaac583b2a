//! Machine-readable verification reports and the registry of named checks.
//!
//! Every check id resolves its parameters against fixed defaults, runs one or more
//! library verifications, and folds them into a single [`VerificationReport`].

use crate::characters::{
    verify_elliptic_transformation, verify_theta_expansion, verify_triple_product, verify_v_from_omega, CharacterCheck,
};
use crate::correlators::{
    complete_point, default_numeric_point, verify_cyclic_identity, verify_diffeq_f, verify_diffeq_h, verify_diffeq_t,
    verify_diffeq_u, verify_g_recurrence, verify_npoint, verify_one_point, verify_phi_vanish, verify_qgauss,
    verify_r_diffeq, verify_ratio_recurrence, verify_residue, verify_t_vanish, verify_telescoping_sum,
    verify_telescoping_sum_unit, CyclicVariant, DecayCheck, EvalPoint, NumericCheck, NumericThetaFunction, QMonomial,
    Reorderings, SqrtDifference,
};
use crate::quasimodular::{
    bracket_qm_check, derivation_closure, leibniz_closure_consistent, BracketVerdict, DEFAULT_MARGIN,
};
use crate::rational::{fmt, int, one, rat, round_to_bits, sqrt_exact, Rational};
use crate::series::Mismatch;
use crate::setcomb::verify_count_identities;
use crate::skew::{
    psi_taylor_fit, verify_gcal_log_theta, verify_h_equals_g, verify_psi_restriction, verify_skew_npoint,
};
use crate::special::{
    eisenstein, verify_theta_diffeq, verify_theta_forms, verify_theta_odd, verify_theta_odd_derivatives,
    verify_xi_generating, xi_binomial_sides, NumericQ, SeriesCheck, ThetaPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::Instant;

/// Bits kept when printing values of numeric checks.
const DISPLAY_BITS: u32 = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstMismatch {
    /// Coefficient index, exponent vector, or label of the failing sub-check.
    pub index: Value,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceInfo {
    pub mode: String,
    pub estimate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    /// What the check establishes, in words.
    pub anchor: String,
    pub params: Value,
    pub status: Status,
    pub order_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<FirstMismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_info: Option<ToleranceInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Flags shared by all checks; unset fields take per-check defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub order: Option<usize>,
    pub points: Option<Vec<Rational>>,
    pub q: Option<Rational>,
    pub n: Option<usize>,
    pub m: Option<i64>,
    pub k: Option<usize>,
    pub big_k: Option<usize>,
    pub seed: Option<u64>,
}

impl VerificationReport {
    fn new(id: &str, params: Value) -> Self {
        VerificationReport {
            identity: id.to_string(),
            anchor: anchor(id).to_string(),
            params,
            status: Status::Pass,
            order_checked: 0,
            first_mismatch: None,
            tolerance_info: None,
            detail: None,
            elapsed_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn set_order(&mut self, order: usize) {
        self.order_checked = if self.order_checked == 0 { order } else { self.order_checked.min(order) };
    }

    fn fail(&mut self, m: FirstMismatch) {
        if self.status == Status::Pass {
            self.status = Status::Fail;
            self.first_mismatch = Some(m);
        }
    }

    fn series(mut self, c: &SeriesCheck) -> Self {
        self.set_order(c.order);
        if let Err(m) = &c.outcome {
            self.fail(series_mismatch(m));
        }
        self
    }

    fn numeric(mut self, label: &str, c: &NumericCheck, cutoff: usize) -> Self {
        self.set_order(cutoff);
        let bound = &c.factor * &c.estimate;
        let widest = match &self.tolerance_info {
            Some(t) => crate::rational::parse(&t.estimate).expect("own output").max(bound),
            None => bound,
        };
        self.tolerance_info = Some(ToleranceInfo { mode: "numeric".into(), estimate: display(&widest) });
        if !c.passed() {
            self.fail(FirstMismatch { index: json!(label), lhs: display(&c.lhs), rhs: display(&c.rhs) });
        }
        self
    }

    fn flag(mut self, passed: bool, order: usize, mismatch: impl FnOnce() -> FirstMismatch) -> Self {
        self.set_order(order);
        if !passed {
            self.fail(mismatch());
        }
        self
    }

    fn character(self, c: &CharacterCheck, grade: usize) -> Self {
        self.flag(c.passed(), grade, || match &c.mismatch {
            Some(m) => FirstMismatch {
                index: json!(m.exps.iter().map(fmt).collect::<Vec<_>>()),
                lhs: fmt(&m.lhs),
                rhs: fmt(&m.rhs),
            },
            None => FirstMismatch { index: json!("empty comparison"), lhs: "0".into(), rhs: "0".into() },
        })
    }

    fn error(mut self, e: impl std::fmt::Display) -> Self {
        self.status = Status::Error;
        self.first_mismatch = None;
        self.detail = Some(json!({ "error": e.to_string() }));
        self
    }

    fn with_detail(mut self, v: Value) -> Self {
        if self.status != Status::Error {
            self.detail = Some(v);
        }
        self
    }
}

fn series_mismatch(m: &Mismatch) -> FirstMismatch {
    FirstMismatch { index: json!(m.index), lhs: m.lhs.clone(), rhs: m.rhs.clone() }
}

fn display(x: &Rational) -> String {
    fmt(&round_to_bits(x, DISPLAY_BITS))
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt).collect()
}

/// A registered check: id, what it establishes, and its runner.
pub struct Check {
    pub id: &'static str,
    pub anchor: &'static str,
    run: fn(&Params) -> Result<VerificationReport, UsageError>,
}

pub const CHECKS: &[Check] = &[
    Check {
        id: "bracket-qm",
        anchor: "q-brackets of shifted power sums are quasimodular of the expected weight",
        run: run_bracket_qm,
    },
    Check { id: "counts", anchor: "signed counts of set partitions and compositions", run: run_counts },
    Check {
        id: "cyclic-identity",
        anchor: "cyclic sum of inverse q-Pochhammer products on q^m t_1..t_k = 1",
        run: run_cyclic,
    },
    Check {
        id: "derivation-closure",
        anchor: "D = q d/dq preserves quasimodular forms, raising the weight by 2",
        run: run_derivation_closure,
    },
    Check { id: "diffeq-f", anchor: "q-difference equation of the n-point function F", run: run_diffeq_f },
    Check {
        id: "diffeq-h",
        anchor: "q-difference equation of the index sum H and its corollary for F",
        run: run_diffeq_h,
    },
    Check { id: "diffeq-t", anchor: "q-difference equations of the theta numerator T and of U", run: run_diffeq_t },
    Check { id: "gcal-theta", anchor: "2 G_1(w) = -d/dw log Theta(e^w) + 1/w", run: run_gcal_theta },
    Check {
        id: "h-equals-g",
        anchor: "logarithmic derivatives of Psi at q_3 = .. = 1 are derivatives of Eisenstein series",
        run: run_h_equals_g,
    },
    Check { id: "lemma22", anchor: "alternating binomial sum of xi values", run: run_xi_binomial_sum },
    Check {
        id: "lemma62",
        anchor: "odd theta derivatives at 1 in terms of Eisenstein series",
        run: run_theta_odd_derivatives,
    },
    Check { id: "lemma84", anchor: "finite telescoping sum of inverse q-Pochhammer symbols", run: run_telescoping_sum },
    Check {
        id: "npoint",
        anchor: "n-point function F from partitions equals the theta-determinant closed form U",
        run: run_npoint,
    },
    Check { id: "one-point", anchor: "one-point function equals 1/Theta", run: run_one_point },
    Check {
        id: "phi-vanish",
        anchor: "composition sum Phi of an odd function tends to 0 as t_1 -> 1",
        run: run_phi_vanish,
    },
    Check {
        id: "psi-quasimodular",
        anchor: "Taylor coefficients of eta Psi are quasimodular",
        run: run_psi_quasimodular,
    },
    Check { id: "qgauss", anchor: "q-Gauss summation", run: run_qgauss },
    Check { id: "r-diffeq", anchor: "q-difference equation of the theta-ratio sum R", run: run_r_diffeq },
    Check { id: "residue", anchor: "residue of F on the divisor q^m t_1..t_k = 1", run: run_residue },
    Check {
        id: "skew-npoint",
        anchor: "n-point function of Psi: set-partition closed form equals direct differentiation",
        run: run_skew_npoint,
    },
    Check { id: "t-vanish", anchor: "theta numerator T vanishes on t_1..t_n = 1", run: run_t_vanish },
    Check {
        id: "theta-diffeq",
        anchor: "theta quasi-periodicity, oddness, and sum form equals product form",
        run: run_theta_diffeq,
    },
    Check { id: "thm21", anchor: "elliptic transformation law of Omega", run: run_elliptic_transformation },
    Check { id: "thm23", anchor: "theta-like expansion of Omega in V", run: run_theta_expansion },
    Check { id: "triple-product", anchor: "eta Omega(q_0, q_1) = sum q_0^n q_1^{n^2/2}", run: run_triple_product },
    Check {
        id: "v-consistency",
        anchor: "V is the charge-zero part of Omega; Psi restricts to 1/eta",
        run: run_v_consistency,
    },
    Check { id: "xi-generating", anchor: "generating function of xi(-n)", run: run_xi_generating },
];

pub fn anchor(id: &str) -> &'static str {
    CHECKS.iter().find(|c| c.id == id).map_or("", |c| c.anchor)
}

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// Runs check `id`; `timing` adds `elapsed_ms`, which makes output run-dependent.
pub fn run_check(id: &str, p: &Params, timing: bool) -> Result<VerificationReport, UsageError> {
    let check = CHECKS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| usage(format!("unknown check '{id}'; known: {}", check_ids().join(", "))))?;
    let start = Instant::now();
    let mut r = (check.run)(p)?;
    if timing {
        r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(r)
}

// ---- parameter helpers ----

const DEFAULT_ROOTS: [i64; 3] = [2, 3, 5];

/// Roots in `(1, 4]` with small denominators, pairwise distinct, so no product of a
/// nonempty subset is 1.
pub fn random_roots(seed: u64, n: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    while out.len() < n {
        let b: i64 = rng.gen_range(1..=5);
        let a: i64 = rng.gen_range(b + 1..=4 * b);
        let s = rat(a, b);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn roots(p: &Params, n_default: usize) -> Result<Vec<Rational>, UsageError> {
    if let Some(pts) = &p.points {
        if pts.is_empty() {
            return Err(usage("--points needs at least one value"));
        }
        if let Some(n) = p.n {
            if n != pts.len() {
                return Err(usage(format!("--n {n} disagrees with {} points", pts.len())));
            }
        }
        return Ok(pts.clone());
    }
    let n = p.n.unwrap_or(n_default);
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    match p.seed {
        Some(seed) => Ok(random_roots(seed, n)),
        None if n <= DEFAULT_ROOTS.len() => Ok(DEFAULT_ROOTS[..n].iter().map(|&x| int(x)).collect()),
        None => Err(usage(format!("no default points for n = {n}; pass --points"))),
    }
}

fn eval_point(s: &[Rational]) -> Result<EvalPoint, UsageError> {
    EvalPoint::from_roots(s).map_err(|e| usage(e.to_string()))
}

/// `q = r^2` with `r` rational.
fn numeric_q(p: &Params, default_root: Rational) -> Result<NumericQ, UsageError> {
    match &p.q {
        None => Ok(NumericQ::from_root(default_root)),
        Some(q) => {
            let r = sqrt_exact(q).ok_or_else(|| usage(format!("--q {} must be the square of a rational", fmt(q))))?;
            if r >= one() || r == int(0) {
                return Err(usage("--q must lie strictly between 0 and 1"));
            }
            Ok(NumericQ::from_root(r))
        }
    }
}

fn order(p: &Params, default: usize) -> usize {
    p.order.unwrap_or(default)
}

// ---- correlators ----

fn run_npoint(p: &Params) -> Result<VerificationReport, UsageError> {
    let s = roots(p, 2)?;
    let n = order(p, [20, 14, 10].get(s.len() - 1).copied().unwrap_or(8));
    let params = json!({ "points": strs(&s), "order": n });
    let r = VerificationReport::new("npoint", params);
    Ok(match verify_npoint(&eval_point(&s)?, n) {
        Ok(c) => r.series(&c),
        Err(e) => r.error(e),
    })
}

fn run_one_point(p: &Params) -> Result<VerificationReport, UsageError> {
    let s = roots(p, 1)?;
    if s.len() != 1 {
        return Err(usage("one-point takes a single point"));
    }
    let n = order(p, 20);
    let r = VerificationReport::new("one-point", json!({ "points": strs(&s), "order": n }));
    Ok(match verify_one_point(&s[0], n) {
        Ok(c) => r.series(&c),
        Err(e) => r.error(e),
    })
}

/// Numeric point: explicit `--points`/`--q`, else the shipped default.
fn numeric_point(p: &Params, n_default: usize) -> Result<(EvalPoint, NumericQ), UsageError> {
    let n = p.points.as_ref().map_or(p.n.unwrap_or(n_default), Vec::len);
    if !(1..=3).contains(&n) && p.points.is_none() {
        return Err(usage("default numeric points exist for n = 1..3"));
    }
    let (default_pt, default_q) = default_numeric_point(n.min(3));
    let pt = match &p.points {
        Some(s) => eval_point(s)?,
        None => default_pt,
    };
    Ok((pt, numeric_q(p, default_q.r)?))
}

fn numeric_params(pt: &EvalPoint, q: &NumericQ, cutoff: usize) -> Value {
    json!({ "points": strs(&pt.roots()), "q": fmt(&q.q()), "cutoff": cutoff })
}

fn run_diffeq_f(p: &Params) -> Result<VerificationReport, UsageError> {
    let (pt, q) = numeric_point(p, 2)?;
    let cutoff = order(p, 30);
    let r = VerificationReport::new("diffeq-f", numeric_params(&pt, &q, cutoff));
    Ok(match verify_diffeq_f(&pt, &q, cutoff) {
        Ok(c) => r.numeric("F", &c, cutoff),
        Err(e) => r.error(e),
    })
}

fn run_diffeq_h(p: &Params) -> Result<VerificationReport, UsageError> {
    let (pt, q) = numeric_point(p, 2)?;
    let cutoff = order(p, 30);
    let ks: Vec<usize> = match p.k {
        Some(k) if (1..=pt.n()).contains(&k) => vec![k],
        Some(k) => return Err(usage(format!("--k {k} must lie in 1..={}", pt.n()))),
        None => (1..=pt.n()).collect(),
    };
    let mut params = numeric_params(&pt, &q, cutoff);
    params["k"] = json!(ks);
    let mut r = VerificationReport::new("diffeq-h", params);
    for &k in &ks {
        match verify_diffeq_h(&pt, k, &q, cutoff) {
            Ok(c) => r = r.numeric(&format!("H, k={k}"), &c, cutoff),
            Err(e) => return Ok(r.error(e)),
        }
    }
    Ok(match verify_g_recurrence(&pt, &q, cutoff) {
        Ok((a, b)) => r.numeric("corollary, first form", &a, cutoff).numeric("corollary, second form", &b, cutoff),
        Err(e) => r.error(e),
    })
}

fn run_diffeq_t(p: &Params) -> Result<VerificationReport, UsageError> {
    let s = roots(p, 2)?;
    let n = order(p, [12, 10, 8].get(s.len() - 1).copied().unwrap_or(6));
    let pt = eval_point(&s)?;
    let r = VerificationReport::new("diffeq-t", json!({ "points": strs(&s), "order": n }));
    let checks = verify_diffeq_t(&pt, n).and_then(|a| Ok((a, verify_diffeq_u(&pt, n)?)));
    Ok(match checks {
        Ok((a, b)) => r.series(&a).series(&b),
        Err(e) => r.error(e),
    })
}

fn run_r_diffeq(p: &Params) -> Result<VerificationReport, UsageError> {
    let s = roots(p, 2)?;
    let n = order(p, 8);
    let t0 = ThetaPoint::new(int(7));
    let pt = eval_point(&s)?;
    let params = json!({ "points": strs(&s), "t0": fmt(&t0.t()), "order": n, "ratio_orders": 4 });
    let r = VerificationReport::new("r-diffeq", params);
    let checks = verify_r_diffeq(&pt, &t0, n).and_then(|a| Ok((a, verify_ratio_recurrence(&pt.pts[0], 4, n)?)));
    Ok(match checks {
        Ok((a, b)) => r.series(&a).series(&b),
        Err(e) => r.error(e),
    })
}

fn run_qgauss(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 20);
    let qp = QMonomial::q_power;
    let cases = [
        (qp(1), qp(1), qp(3)),
        (qp(2), qp(1), qp(4)),
        (QMonomial::new(rat(1, 2), 1), qp(1), QMonomial::new(int(3), 3)),
        (qp(2), QMonomial::new(int(2), -1), qp(2)),
    ];
    let params = json!({
        "order": n,
        "cases": cases.iter().map(|(a, b, c)| vec![a.describe(), b.describe(), c.describe()]).collect::<Vec<_>>(),
    });
    let mut r = VerificationReport::new("qgauss", params);
    for (a, b, c) in &cases {
        match verify_qgauss(a, b, c, n) {
            Ok(ch) => r = r.series(&ch),
            Err(e) => return Ok(r.error(e)),
        }
    }
    Ok(r)
}

fn run_telescoping_sum(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 15);
    let a = p.m.unwrap_or(0);
    let b = p.k.map_or(3, |k| k as i64);
    if a >= b {
        return Err(usage("lemma84 needs --m (a) < --k (b)"));
    }
    let (u, w) = match &p.points {
        None => (int(4), int(3)),
        Some(v) if v.len() == 2 => (v[0].clone(), v[1].clone()),
        Some(_) => return Err(usage("lemma84 takes --points u,w")),
    };
    let params = json!({ "a": a, "b": b, "u": fmt(&u), "w": fmt(&w), "order": n, "corollary_b": [2, 3, 4, 5] });
    let mut r = VerificationReport::new("lemma84", params);
    match verify_telescoping_sum(a, b, &u, &w, n) {
        Ok(c) => r = r.series(&c),
        Err(e) => return Ok(r.error(e)),
    }
    for bb in 2..=5 {
        match verify_telescoping_sum_unit(bb, &w, n) {
            Ok(c) => r = r.series(&c),
            Err(e) => return Ok(r.error(e)),
        }
    }
    Ok(r)
}

/// Free roots for the cyclic identity; the last root is fixed by the constraint.
const CYCLIC_FREE: [(i64, i64); 3] = [(3, 1), (5, 2), (7, 5)];

fn run_cyclic(p: &Params) -> Result<VerificationReport, UsageError> {
    let q = numeric_q(p, rat(1, 2))?;
    let ms: Vec<i64> = match p.m {
        Some(m) if m >= 1 => vec![m],
        Some(_) => return Err(usage("--m must be at least 1")),
        None => (1..=4).collect(),
    };
    let ks: Vec<usize> = match p.k {
        Some(k) if (1..=4).contains(&k) || p.points.is_some() => vec![k],
        Some(_) => return Err(usage("--k must lie in 1..=4 without --points")),
        None => (1..=4).collect(),
    };
    let params = json!({ "q": fmt(&q.q()), "m": ms, "k": ks });
    let mut r = VerificationReport::new("cyclic-identity", params);
    let mut values = Vec::new();
    for &m in &ms {
        for &k in &ks {
            let free: Vec<Rational> = match &p.points {
                Some(v) if v.len() + 1 == k => v.clone(),
                Some(_) => return Err(usage("cyclic-identity takes k - 1 free --points")),
                None => CYCLIC_FREE[..k - 1].iter().map(|&(a, b)| rat(a, b)).collect(),
            };
            let s = complete_point(m, &q, &free);
            for variant in [CyclicVariant::Plain, CyclicVariant::Numerator] {
                match verify_cyclic_identity(m, &q, &s, variant, Reorderings::Cyclic) {
                    Ok(c) => {
                        let label = json!({ "m": m, "k": k, "variant": variant });
                        values.push(json!({ "m": m, "k": k, "variant": variant, "value": fmt(&c.value) }));
                        r = r.flag(c.passed(), 0, || FirstMismatch {
                            index: label,
                            lhs: fmt(&c.value),
                            rhs: fmt(&c.expected),
                        });
                    }
                    Err(e) => return Ok(r.error(e)),
                }
            }
        }
    }
    Ok(r.with_detail(json!({ "values": values })))
}

fn run_residue(p: &Params) -> Result<VerificationReport, UsageError> {
    let s = match &p.points {
        Some(v) => v.clone(),
        None => vec![rat(5, 3), rat(6, 5)],
    };
    let q = numeric_q(p, rat(1, 3))?;
    let m = p.m.unwrap_or(1);
    let k = p.k.unwrap_or(1);
    if m < 0 || !(1..=s.len()).contains(&k) {
        return Err(usage(format!("residue needs --m >= 0 and --k in 1..={}", s.len())));
    }
    let cutoff = order(p, 30);
    let delta = rat(1, 10);
    let params =
        json!({ "points": strs(&s), "q": fmt(&q.q()), "m": m, "k": k, "delta": fmt(&delta), "cutoff": cutoff });
    let mut r = VerificationReport::new("residue", params);
    Ok(match verify_residue(&s, m, k, &delta, &q, cutoff) {
        Ok(c) => {
            r.tolerance_info = Some(ToleranceInfo { mode: "numeric".into(), estimate: display(&c.tolerance) });
            let passed = c.passed();
            r.flag(passed, cutoff, || FirstMismatch {
                index: json!("extrapolated residue"),
                lhs: display(&c.extrapolated),
                rhs: display(&c.expected),
            })
            .with_detail(json!({ "discrepancy": display(&c.discrepancy) }))
        }
        Err(e) => r.error(e),
    })
}

fn run_t_vanish(p: &Params) -> Result<VerificationReport, UsageError> {
    let n_pts = p.points.as_ref().map_or(p.n.unwrap_or(2), |v| v.len() + 1);
    if n_pts < 2 {
        return Err(usage("t-vanish needs n >= 2"));
    }
    let free = match (&p.points, p.seed) {
        (Some(v), _) => v.clone(),
        (None, Some(seed)) => random_roots(seed, n_pts - 1),
        (None, None) => (2..=n_pts as i64).map(int).collect(),
    };
    let head: Rational = free.iter().product();
    let mut s = free;
    s.push(head.recip());
    let n = order(p, 12);
    let r = VerificationReport::new("t-vanish", json!({ "points": strs(&s), "order": n }));
    Ok(match verify_t_vanish(&eval_point(&s)?, n) {
        Ok(c) => r.series(&c),
        Err(e) => r.error(e),
    })
}

fn decay(r: VerificationReport, c: &DecayCheck) -> VerificationReport {
    let label = json!({ "function": c.function, "n": c.n });
    r.flag(c.passed(), 0, || FirstMismatch { index: label, lhs: display(&c.fine), rhs: display(&c.coarse) })
}

fn run_phi_vanish(p: &Params) -> Result<VerificationReport, UsageError> {
    let eps = rat(1, 10);
    let ns: Vec<usize> = match p.n {
        Some(n) if n >= 2 => vec![n],
        Some(_) => return Err(usage("phi-vanish needs n >= 2")),
        None => vec![2, 3, 4],
    };
    let theta = NumericThetaFunction::default();
    let params = json!({ "eps": fmt(&eps), "n": ns, "theta_q": fmt(&theta.q.q()), "theta_terms": theta.terms });
    let mut r = VerificationReport::new("phi-vanish", params);
    let mut ratios = Vec::new();
    for &n in &ns {
        for c in [verify_phi_vanish(&SqrtDifference, n, &eps), verify_phi_vanish(&theta, n, &eps)] {
            match c {
                Ok(c) => {
                    ratios.push(json!({ "function": c.function, "n": n, "ratio": c.ratio().map(|x| display(&x)) }));
                    r = decay(r, &c);
                }
                Err(e) => return Ok(r.error(e)),
            }
        }
    }
    Ok(r.with_detail(json!({ "ratios": ratios })))
}

// ---- special functions and combinatorics ----

fn run_theta_diffeq(p: &Params) -> Result<VerificationReport, UsageError> {
    let s = match &p.points {
        Some(v) if v.len() == 1 => v[0].clone(),
        Some(_) => return Err(usage("theta-diffeq takes one point")),
        None => p.seed.map_or(int(2), |seed| random_roots(seed, 1)[0].clone()),
    };
    let n = order(p, 20);
    let ms: Vec<i64> = p.m.map_or((-2..=2).collect(), |m| vec![m]);
    let mut r = VerificationReport::new("theta-diffeq", json!({ "point": fmt(&s), "m": ms, "order": n }));
    for &m in &ms {
        r = r.series(&verify_theta_diffeq(m, &s, n));
    }
    Ok(r.series(&verify_theta_odd(&s, n)).series(&verify_theta_forms(&s, n)))
}

fn run_theta_odd_derivatives(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 30);
    let m_max = p.m.unwrap_or(3).max(0) as usize;
    let r = VerificationReport::new("lemma62", json!({ "order": n, "max_derivative": 2 * m_max + 1 }));
    Ok(r.series(&verify_theta_odd_derivatives(m_max, n)))
}

fn run_xi_binomial_sum(p: &Params) -> Result<VerificationReport, UsageError> {
    let ns: Vec<u64> = p.n.map_or((1..=12).collect(), |n| vec![n as u64]);
    let mut r = VerificationReport::new("lemma22", json!({ "n": ns }));
    for &n in &ns {
        let (a, b) = xi_binomial_sides(n);
        r = r.flag(a == b, n as usize, || FirstMismatch { index: json!(n), lhs: fmt(&a), rhs: fmt(&b) });
    }
    Ok(r)
}

fn run_xi_generating(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 16);
    Ok(VerificationReport::new("xi-generating", json!({ "order": n })).series(&verify_xi_generating(n)))
}

fn run_counts(p: &Params) -> Result<VerificationReport, UsageError> {
    let ns: Vec<usize> = p.n.map_or((1..=8).collect(), |n| vec![n]);
    let mut r = VerificationReport::new("counts", json!({ "n": ns }));
    let mut values = Vec::new();
    for &n in &ns {
        let c = verify_count_identities(n);
        values.push(json!({ "n": n, "sum1": c.sum1, "sum2": c.sum2, "sum3": c.sum3,
            "set_partitions": c.set_partitions, "compositions": c.compositions }));
        r = r.flag(c.holds(), n, || FirstMismatch {
            index: json!(n),
            lhs: format!("{},{},{}", c.sum1, c.sum2, c.sum3),
            rhs: if n >= 2 { "1,1,0".into() } else { "1,1,-1".into() },
        });
    }
    Ok(r.with_detail(json!({ "values": values })))
}

fn run_bracket_qm(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 40);
    let margin = DEFAULT_MARGIN;
    let mut r = VerificationReport::new("bracket-qm", json!({ "order": n, "margin": margin }));
    // <p_1 - 1/24>_q = G_2 and <p_2>_q = 0 coefficientwise.
    let g2 = bracket_qm_check(&[1], n, margin);
    r = r.series(&SeriesCheck::of(&g2.bracket, &eisenstein(2, n).expect("even weight")));
    let p2 = bracket_qm_check(&[2], n, margin);
    r = r.series(&SeriesCheck::of(&p2.bracket, &crate::series::QSeries::zero(n)));
    let mut fits = Vec::new();
    for ks in [vec![1, 1], vec![3]] {
        let c = bracket_qm_check(&ks, n, margin);
        let label = json!(ks);
        match &c.verdict {
            BracketVerdict::Fitted(f) => {
                fits.push(json!({ "ks": ks, "fit": f.element.to_json(), "confirmed": f.confirmed }))
            }
            BracketVerdict::Failed(e) => fits.push(json!({ "ks": ks, "error": e.to_string() })),
            _ => {}
        }
        r = r.flag(c.passed(), n, || FirstMismatch {
            index: label,
            lhs: "bracket".into(),
            rhs: "weight-4 span".into(),
        });
    }
    Ok(r.with_detail(json!({ "fits": fits })))
}

fn run_derivation_closure(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 30);
    let w_max = p.k.unwrap_or(6) as u32;
    let mut r = VerificationReport::new("derivation-closure", json!({ "order": n, "max_weight": w_max }));
    for (m, fit) in derivation_closure(w_max, n) {
        let label = json!({ "a": m.a, "b": m.b, "c": m.c });
        let err = fit.as_ref().err().map(|e| e.to_string());
        r = r.flag(fit.is_ok(), n, || FirstMismatch {
            index: label,
            lhs: err.unwrap_or_default(),
            rhs: "in span".into(),
        });
    }
    let leibniz = leibniz_closure_consistent(n);
    Ok(r.flag(leibniz, n, || FirstMismatch {
        index: json!("D(G2^2) = 2 G2 D(G2)"),
        lhs: "fit".into(),
        rhs: "product".into(),
    }))
}

// ---- characters ----

fn run_character(
    id: &str,
    p: &Params,
    default_k: usize,
    default_n: usize,
    f: fn(usize, usize) -> CharacterCheck,
) -> Result<VerificationReport, UsageError> {
    let k = p.big_k.unwrap_or(default_k);
    if k == 0 {
        return Err(usage("--K must be positive"));
    }
    let n = order(p, default_n);
    let c = f(k, n);
    Ok(VerificationReport::new(id, json!({ "K": k, "grade": n }))
        .character(&c, n)
        .with_detail(json!({ "compared": c.compared })))
}

fn run_elliptic_transformation(p: &Params) -> Result<VerificationReport, UsageError> {
    run_character("thm21", p, 2, 3, verify_elliptic_transformation)
}

fn run_theta_expansion(p: &Params) -> Result<VerificationReport, UsageError> {
    run_character("thm23", p, 2, 3, verify_theta_expansion)
}

fn run_triple_product(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 12);
    let c = verify_triple_product(n);
    Ok(VerificationReport::new("triple-product", json!({ "grade": n }))
        .character(&c, n)
        .with_detail(json!({ "compared": c.compared })))
}

fn run_v_consistency(p: &Params) -> Result<VerificationReport, UsageError> {
    let k = p.big_k.unwrap_or(3);
    let n = order(p, 4);
    let c = verify_v_from_omega(k, n);
    let r = VerificationReport::new("v-consistency", json!({ "K": k, "grade": n, "psi_order": 20 })).character(&c, n);
    Ok(match verify_psi_restriction(2, 20) {
        Ok(s) => r.series(&s),
        Err(e) => r.error(e),
    })
}

// ---- skew character ----

fn run_h_equals_g(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 30);
    let params = json!({ "order": n, "max_r": 3, "max_sum_j": 4 });
    Ok(VerificationReport::new("h-equals-g", params).series(&verify_h_equals_g(3, 4, n)))
}

fn run_skew_npoint(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = p.n.unwrap_or(2);
    let deg = p.k.unwrap_or(5) as u32;
    let ord = order(p, 15);
    if n == 0 || deg == 0 {
        return Err(usage("skew-npoint needs positive --n and --k"));
    }
    let r = VerificationReport::new("skew-npoint", json!({ "n": n, "z_degree": deg, "order": ord }));
    Ok(match verify_skew_npoint(n, deg, ord) {
        Ok(c) => {
            let mismatch = c.mismatch.clone();
            let r = r.series(&c.expansion).flag(mismatch.is_none() && c.compared > 0, ord, || match mismatch {
                Some((e, m)) => FirstMismatch { index: json!({ "z": e, "q": m.index }), lhs: m.lhs, rhs: m.rhs },
                None => FirstMismatch { index: json!("empty comparison"), lhs: "0".into(), rhs: "0".into() },
            });
            r.with_detail(json!({ "compared": c.compared }))
        }
        Err(e) => r.error(e),
    })
}

fn run_gcal_theta(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 12);
    let deg = p.k.unwrap_or(7) as u32;
    Ok(VerificationReport::new("gcal-theta", json!({ "order": n, "z_degree": deg }))
        .series(&verify_gcal_log_theta(deg, n)))
}

fn run_psi_quasimodular(p: &Params) -> Result<VerificationReport, UsageError> {
    let n = order(p, 30);
    let cases: Vec<Vec<usize>> = vec![vec![2], vec![3], vec![2, 2]];
    let mut r = VerificationReport::new(
        "psi-quasimodular",
        json!({ "order": n, "margin": DEFAULT_MARGIN, "derivatives": cases }),
    );
    let mut fits = Vec::new();
    for ks in &cases {
        match psi_taylor_fit(ks, n, DEFAULT_MARGIN) {
            Ok(Ok(f)) => fits.push(json!({ "derivatives": ks, "fit": f.element.to_json() })),
            Ok(Err(e)) => {
                let msg = e.to_string();
                r = r.flag(false, n, || FirstMismatch { index: json!(ks), lhs: msg, rhs: "in span".into() });
            }
            Err(e) => return Ok(r.error(e)),
        }
        r.set_order(n);
    }
    Ok(r.with_detail(json!({ "fits": fits })))
}

// ---- suite ----

fn with(f: impl FnOnce(&mut Params)) -> Params {
    let mut p = Params::default();
    f(&mut p);
    p
}

fn pts(v: &[i64]) -> Option<Vec<Rational>> {
    Some(v.iter().map(|&x| int(x)).collect())
}

/// The acceptance battery: every registered check at its default parameters, plus the
/// additional point sets and sizes the exact checks are run at.
pub fn suite_plan(seed: Option<u64>) -> Vec<(&'static str, Params)> {
    let mut plan: Vec<(&'static str, Params)> = Vec::new();
    for s in [[2], [3], [5]] {
        plan.push((
            "npoint",
            with(|p| {
                p.points = pts(&s);
                p.order = Some(20);
            }),
        ));
    }
    for s in [[2, 3], [2, 5], [3, 5]] {
        plan.push((
            "npoint",
            with(|p| {
                p.points = pts(&s);
                p.order = Some(14);
            }),
        ));
    }
    plan.push((
        "npoint",
        with(|p| {
            p.points = pts(&[2, 3, 5]);
            p.order = Some(10);
        }),
    ));
    for n in 1..=3 {
        plan.push(("diffeq-t", with(|p| p.n = Some(n))));
        plan.push(("diffeq-f", with(|p| p.n = Some(n))));
    }
    for n in 2..=3 {
        plan.push(("diffeq-h", with(|p| p.n = Some(n))));
        plan.push(("t-vanish", with(|p| p.n = Some(n))));
    }
    for (m, k) in [(1, 1), (0, 1), (1, 2)] {
        plan.push((
            "residue",
            with(|p| {
                p.m = Some(m);
                p.k = Some(k);
            }),
        ));
    }
    for big_k in 2..=3 {
        plan.push(("thm21", with(|p| p.big_k = Some(big_k))));
        plan.push(("thm23", with(|p| p.big_k = Some(big_k))));
    }
    for n in 1..=2 {
        plan.push(("skew-npoint", with(|p| p.n = Some(n))));
    }
    for id in [
        "bracket-qm",
        "counts",
        "cyclic-identity",
        "derivation-closure",
        "gcal-theta",
        "h-equals-g",
        "lemma22",
        "lemma62",
        "lemma84",
        "one-point",
        "phi-vanish",
        "psi-quasimodular",
        "qgauss",
        "r-diffeq",
        "theta-diffeq",
        "triple-product",
        "v-consistency",
        "xi-generating",
    ] {
        plan.push((id, Params::default()));
    }
    if let Some(seed) = seed {
        for n in 1..=3 {
            plan.push((
                "npoint",
                with(|p| {
                    p.n = Some(n);
                    p.seed = Some(seed);
                    p.order = Some(8);
                }),
            ));
        }
    }
    plan
}

/// Aggregate outcome of a suite run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
}

/// Runs the plan concurrently; `progress` sees each report as it completes. Reports are
/// sorted by id, then by parameters, so the result does not depend on scheduling.
pub fn run_suite(
    seed: Option<u64>,
    timing: bool,
    progress: impl Fn(&VerificationReport) + Sync,
) -> Result<SuiteOutcome, UsageError> {
    let plan = suite_plan(seed);
    let mut reports = plan
        .par_iter()
        .map(|(id, p)| {
            let r = run_check(id, p, timing)?;
            progress(&r);
            Ok(r)
        })
        .collect::<Result<Vec<_>, UsageError>>()?;
    reports.sort_by_cached_key(|r| (r.identity.clone(), r.params.to_string()));
    let passed = reports.iter().filter(|r| r.passed()).count();
    let failed: Vec<String> =
        reports.iter().filter(|r| !r.passed()).map(|r| format!("{} {}", r.identity, r.params)).collect();
    let status = if failed.is_empty() { Status::Pass } else { Status::Fail };
    Ok(SuiteOutcome { verdict: Verdict { status, total: reports.len(), passed, failed }, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_sorted() {
        let ids = check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
        for id in ["npoint", "skew-npoint", "v-consistency", "thm21"] {
            assert!(!anchor(id).is_empty());
        }
    }

    #[test]
    fn unknown_id_is_a_usage_error() {
        assert!(run_check("nope", &Params::default(), false).is_err());
    }

    #[test]
    fn counts_report_values() {
        let r = run_check("counts", &with(|p| p.n = Some(3)), false).unwrap();
        assert!(r.passed());
        let v = &r.detail.unwrap()["values"][0];
        assert_eq!((v["sum1"].as_i64(), v["sum2"].as_i64(), v["sum3"].as_i64()), (Some(1), Some(1), Some(0)));
    }

    #[test]
    fn failing_series_report_carries_mismatch() {
        let r = VerificationReport::new("npoint", json!({}))
            .series(&SeriesCheck::of(&crate::series::QSeries::one(3), &crate::series::QSeries::zero(3)));
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.first_mismatch.unwrap().index, json!(0));
    }

    #[test]
    fn random_points_are_safe_and_reproducible() {
        let a = random_roots(7, 3);
        assert_eq!(a, random_roots(7, 3));
        assert!(a.iter().all(|s| s > &one()));
        assert!(eval_point(&a).unwrap().check_subsets(true).is_ok());
    }

    #[test]
    fn q_must_be_a_rational_square() {
        let p = with(|p| p.q = Some(rat(1, 2)));
        assert!(run_check("cyclic-identity", &p, false).is_err());
    }

    #[test]
    fn exact_reports_omit_tolerance() {
        let r = run_check("npoint", &with(|p| p.order = Some(6)), false).unwrap();
        assert!(r.passed() && r.tolerance_info.is_none());
        let r = run_check(
            "diffeq-f",
            &with(|p| {
                p.n = Some(1);
                p.order = Some(20);
            }),
            false,
        )
        .unwrap();
        assert_eq!(r.tolerance_info.unwrap().mode, "numeric");
    }
}
