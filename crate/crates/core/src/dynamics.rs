//! Boundedness and dynamics criteria as tri-state verdicts.
//!
//! Limits cannot be decided from finitely many terms. A series "diverges"
//! when its running maximum passes the divergence threshold with the
//! argmax in the final quarter of the horizon; it diverges "fully" when,
//! after first passing that threshold, it never drops below the full-limit
//! threshold again. `Fails` needs a finite certificate: a constant tail or
//! a tail whose every step shrinks by at least a factor `1 - 1e-12`.

use std::collections::HashMap;

use crate::basis::{coefficient_functional_bound, monomial_norm};
use crate::config::WeightedShift;
use crate::error::Result;
use crate::numeric::{NormKind, SignedLog};
use crate::report::Json;
use crate::shiftmatrix::{decompose, essential_spectrum_estimate, rho_estimate};
use crate::verdict::{Evidence, Status, Verdict};

/// Relative step below which a tail counts as strictly decreasing.
const MONOTONE_EPS: f64 = 1e-12;
/// Tolerance in `ln` for a constant tail.
const CONSTANT_EPS: f64 = 1e-12;
/// Ratio-test cap for declaring geometric convergence.
const RATIO_CAP: f64 = 0.9;
/// Log-log slope below which a power-law tail counts as summable.
const POWER_SLOPE: f64 = -1.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub diverge: f64,
    pub full_limit: f64,
    /// Smallest per-step increment of `ln|x|` over the second half that
    /// certifies geometric growth.
    pub growth_rate: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            diverge: 1e9,
            full_limit: 1e6,
            growth_rate: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisParams {
    /// Largest power `ν` examined.
    pub horizon: usize,
    /// The `∀ n` quantifiers are sampled at `n = 1..=n_max`.
    pub n_max: i64,
    pub thresholds: Thresholds,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            horizon: 48,
            n_max: 8,
            thresholds: Thresholds::default(),
        }
    }
}

impl AnalysisParams {
    fn stamp(&self, v: Verdict) -> Verdict {
        v.threshold("diverge", self.thresholds.diverge)
            .threshold("full_limit", self.thresholds.full_limit)
            .threshold("growth_rate", self.thresholds.growth_rate)
            .threshold("horizon", self.horizon as f64)
            .threshold("n_max", self.n_max as f64)
    }
}

/// Magnitudes of a criterion sequence over `ν = 1..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSeries {
    pub name: String,
    pub n: Option<i64>,
    pub values: Vec<SignedLog>,
}

impl CriterionSeries {
    fn build(name: &str, n: Option<i64>, horizon: usize, f: impl Fn(i64) -> SignedLog) -> Self {
        CriterionSeries {
            name: name.to_string(),
            n,
            values: (1..=horizon as i64).map(|nu| f(nu).abs()).collect(),
        }
    }

    pub fn ln(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.ln_mag()).collect()
    }

    pub fn label(&self) -> String {
        match self.n {
            Some(n) => format!("{}[n={n}]", self.name),
            None => self.name.clone(),
        }
    }

    fn evidence(&self) -> Evidence {
        Evidence::LogSeries {
            start: 1,
            ln: self.ln(),
        }
    }
}

fn second_half(ln: &[f64]) -> &[f64] {
    &ln[ln.len() / 2..]
}

fn argmax(ln: &[f64]) -> Option<(usize, f64)> {
    ln.iter()
        .copied()
        .enumerate()
        .fold(None, |best, (i, x)| match best {
            Some((_, m)) if m >= x => best,
            _ => Some((i, x)),
        })
}

fn in_final_quarter(i: usize, len: usize) -> bool {
    4 * i >= 3 * len
}

/// Every step of the second half raises `ln|x|` by at least the growth
/// rate and the series ends above the full-limit threshold.
fn grows_geometrically(ln: &[f64], t: &Thresholds) -> bool {
    let tail = second_half(ln);
    tail.len() >= 4
        && tail.iter().all(|x| x.is_finite())
        && tail.windows(2).all(|w| w[1] - w[0] >= t.growth_rate)
        && tail[tail.len() - 1] > t.full_limit.ln()
}

/// Running max passes `ln(threshold)` with the argmax in the final quarter,
/// or the tail grows geometrically.
fn diverges(ln: &[f64], t: &Thresholds) -> bool {
    let crosses = matches!(
        argmax(ln),
        Some((i, m)) if m > t.diverge.ln() && in_final_quarter(i, ln.len())
    );
    crosses || grows_geometrically(ln, t)
}

fn diverges_fully(ln: &[f64], t: &Thresholds) -> bool {
    if grows_geometrically(ln, t) {
        return true;
    }
    if !diverges(ln, t) {
        return false;
    }
    let cross = ln
        .iter()
        .position(|x| *x > t.diverge.ln())
        .unwrap_or(ln.len());
    ln[cross..].iter().all(|x| *x > t.full_limit.ln())
}

fn negated(ln: &[f64]) -> Vec<f64> {
    ln.iter().map(|x| -x).collect()
}

/// Running min passes `-ln(threshold)` with the argmin in the final quarter.
fn vanishes(ln: &[f64], t: &Thresholds) -> bool {
    diverges(&negated(ln), t)
}

fn vanishes_fully(ln: &[f64], t: &Thresholds) -> bool {
    diverges_fully(&negated(ln), t)
}

/// Certificate that the series is bounded: a constant or strictly
/// decreasing second half. The reported sup is over the whole series.
fn bounded_certificate(ln: &[f64]) -> Option<String> {
    let tail = second_half(ln);
    let sup = argmax(ln).map_or(f64::NEG_INFINITY, |(_, m)| m).exp();
    if tail.iter().all(|x| *x == f64::NEG_INFINITY) {
        return Some(format!("tail identically zero; sup = {sup:e}"));
    }
    if tail.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(*x), hi.max(*x))
        });
    if hi - lo <= CONSTANT_EPS {
        return Some(format!("constant tail; sup = {sup:e}"));
    }
    let step = (1.0 - MONOTONE_EPS).ln();
    if tail.windows(2).all(|w| w[1] - w[0] <= step) {
        return Some(format!("strictly decreasing tail; sup = {sup:e}"));
    }
    None
}

/// Certificate that the series stays away from zero.
fn away_from_zero_certificate(ln: &[f64]) -> Option<String> {
    let tail = second_half(ln);
    if tail.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let neg = negated(ln);
    bounded_certificate(&neg).map(|_| {
        let inf = ln.iter().copied().fold(f64::INFINITY, f64::min).exp();
        format!("tail constant or increasing; inf = {inf:e}")
    })
}

/// Outcome of a "sup is finite" check on a sequence ordered outward.
#[derive(Debug, Clone, PartialEq)]
struct SupCheck {
    status: Status,
    sup: f64,
    note: String,
}

/// Decides whether `sup |x_k|` is finite from logs of magnitudes.
fn sup_finite(ln: &[f64], t: &Thresholds) -> SupCheck {
    let sup = argmax(ln).map_or(0.0, |(_, m)| m.exp());
    let done = |status, note: &str| SupCheck {
        status,
        sup,
        note: note.to_string(),
    };
    if ln.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
        return done(Status::Fails, "non-finite term");
    }
    if diverges(ln, t) {
        return done(Status::Fails, "running max diverges");
    }
    let tail = second_half(ln);
    if tail.len() < 3 {
        return done(Status::Inconclusive, "too few terms");
    }
    if tail.windows(2).all(|w| w[1] <= w[0]) {
        return done(Status::Holds, "non-increasing tail");
    }
    let x: Vec<f64> = tail.iter().map(|l| l.exp()).collect();
    let d: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    // Zero increments are saturation at double resolution.
    let saturating = d.iter().all(|v| *v >= 0.0) && d.contains(&0.0);
    if saturating {
        let pos: Vec<f64> = d.iter().copied().filter(|v| *v > 0.0).collect();
        let zeros_trail = d.iter().skip_while(|v| **v > 0.0).all(|v| *v == 0.0);
        if zeros_trail && pos.windows(2).all(|w| w[1] <= w[0]) {
            return done(Status::Holds, "increments shrink to double resolution");
        }
    }
    if d.iter().all(|v| *v > 0.0) {
        if d.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)) {
            return done(
                Status::Fails,
                "convex growth: increments positive and non-decreasing",
            );
        }
        if d.windows(2).all(|w| w[1] <= w[0]) {
            let q = d.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            if q <= RATIO_CAP {
                return done(Status::Holds, "increments shrink geometrically");
            }
            let start = ln.len() / 2 + 1;
            let pts: Vec<(f64, f64)> = d
                .iter()
                .enumerate()
                .map(|(i, v)| (((start + i) as f64).ln(), v.ln()))
                .collect();
            if loglog_slope(&pts) < POWER_SLOPE {
                return done(Status::Holds, "increments decay faster than k^-1.05");
            }
        }
    }
    done(Status::Inconclusive, "no certificate either way")
}

fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Outcome of a series-convergence check.
#[derive(Debug, Clone, PartialEq)]
struct SeriesCheck {
    status: Status,
    partial_sums: Vec<f64>,
    tail_bound: Option<f64>,
    note: String,
}

impl SeriesCheck {
    fn evidence(&self, ln_terms: &[f64]) -> Evidence {
        let mut items = vec![
            (
                "ln_terms".to_string(),
                Evidence::LogSeries {
                    start: 1,
                    ln: ln_terms.to_vec(),
                },
            ),
            (
                "partial_sums".to_string(),
                Evidence::Series {
                    start: 1,
                    values: self.partial_sums.clone(),
                },
            ),
            (
                "verdict".to_string(),
                Evidence::Text(self.status.to_string()),
            ),
            ("note".to_string(), Evidence::Text(self.note.clone())),
        ];
        if let Some(b) = self.tail_bound {
            items.push(("tail_bound".to_string(), Evidence::Scalar(b)));
        }
        Evidence::Nested(items)
    }
}

/// Decides whether `Σ_k t_k` converges from `ln t_k`, `k = 1..`.
fn series_converges(ln: &[f64]) -> SeriesCheck {
    let partial_sums: Vec<f64> = ln
        .iter()
        .scan(SignedLog::ZERO, |s, l| {
            *s = *s + SignedLog::new(1, *l);
            Some(s.to_real())
        })
        .collect();
    let done = |status, tail_bound, note: &str| SeriesCheck {
        status,
        partial_sums: partial_sums.clone(),
        tail_bound,
        note: note.to_string(),
    };
    if ln.iter().all(|x| *x == f64::NEG_INFINITY) {
        return done(Status::Holds, Some(0.0), "all terms zero");
    }
    let tail = second_half(ln);
    if ln.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
        return done(Status::Fails, None, "non-finite term");
    }
    if tail.iter().all(|x| *x == f64::NEG_INFINITY) {
        return done(Status::Holds, Some(0.0), "tail identically zero");
    }
    if tail.contains(&f64::NEG_INFINITY) {
        return done(
            Status::Inconclusive,
            None,
            "tail mixes zero and nonzero terms",
        );
    }
    if tail.windows(2).all(|w| w[1] >= w[0]) {
        return done(
            Status::Fails,
            None,
            "terms do not tend to zero: non-decreasing tail",
        );
    }
    let last = *tail.last().unwrap_or(&f64::NEG_INFINITY);
    let ln_q = tail
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let q = ln_q.exp();
    if q <= RATIO_CAP {
        let bound = (last + ln_q).exp() / (1.0 - q);
        return done(Status::Holds, Some(bound), "ratio test on the tail");
    }
    let start = ln.len() / 2 + 1;
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .map(|(i, l)| (((start + i) as f64).ln(), *l))
        .collect();
    let slope = loglog_slope(&pts);
    if slope < POWER_SLOPE && tail.windows(2).all(|w| w[1] <= w[0]) {
        let n = ln.len() as f64;
        let bound = last.exp() * n / (-slope - 1.0);
        return done(
            Status::Holds,
            Some(bound),
            "power-law tail with slope below -1.05",
        );
    }
    done(
        Status::Inconclusive,
        None,
        "neither ratio nor power-law test applies",
    )
}

fn sup_evidence(check: &SupCheck, ln: &[f64], start: i64) -> Evidence {
    Evidence::Nested(vec![
        (
            "ln_abs".to_string(),
            Evidence::LogSeries {
                start,
                ln: ln.to_vec(),
            },
        ),
        ("sup".to_string(), Evidence::Scalar(check.sup)),
        (
            "verdict".to_string(),
            Evidence::Text(check.status.to_string()),
        ),
        ("note".to_string(), Evidence::Text(check.note.clone())),
    ])
}

fn ln_abs(x: f64) -> f64 {
    x.abs().ln()
}

/// `sup_n |α_n|` checked on both sides of zero.
fn alpha_sup(op: &WeightedShift, t: &Thresholds) -> (Status, f64, Vec<(String, Evidence)>) {
    let alpha = |n: i64| op.w(n + 1) * op.a(n + 1) / op.a(n);
    two_sided_sup(op, t, "alpha", alpha)
}

fn two_sided_sup(
    op: &WeightedShift,
    t: &Thresholds,
    name: &str,
    f: impl Fn(i64) -> f64,
) -> (Status, f64, Vec<(String, Evidence)>) {
    let w = op.window();
    let pos: Vec<f64> = (0..=w.max()).map(|n| ln_abs(f(n))).collect();
    let neg: Vec<f64> = (w.min()..=-1).rev().map(|n| ln_abs(f(n))).collect();
    let cp = sup_finite(&pos, t);
    let cn = sup_finite(&neg, t);
    let status = cp.status.and(cn.status);
    let sup = cp.sup.max(cn.sup);
    let ev = vec![
        (format!("{name}_n, n = 0.."), sup_evidence(&cp, &pos, 0)),
        (
            format!("{name}_n, n = -1, -2, .."),
            sup_evidence(&cn, &neg, -1),
        ),
    ];
    (status, sup, ev)
}

/// Standing hypotheses: sup |α_n| < ∞ and limsup |b_n / a_{n+1}| < 1.
struct Hypotheses {
    alpha: Status,
    alpha_sup: f64,
    rho: f64,
    evidence: Vec<(String, Evidence)>,
}

impl Hypotheses {
    fn new(op: &WeightedShift, t: &Thresholds) -> Self {
        let (alpha, alpha_sup, mut evidence) = alpha_sup(op, t);
        let (rho, tail) = rho_estimate(op);
        evidence.push((
            "rho (top-quartile max |b_n/a_{n+1}|)".to_string(),
            Evidence::Scalar(rho),
        ));
        evidence.push((
            "|b_n/a_{n+1}| tail".to_string(),
            Evidence::Series {
                start: tail.first().map_or(0, |p| p.0),
                values: tail.iter().map(|p| p.1).collect(),
            },
        ));
        Hypotheses {
            alpha,
            alpha_sup,
            rho,
            evidence,
        }
    }

    fn rho_ok(&self) -> bool {
        self.rho < 1.0
    }

    /// `Some(reason)` when the theorem hypotheses are not established.
    fn violation(&self) -> Option<String> {
        if self.alpha != Status::Holds {
            Some(format!(
                "HypothesisViolated: sup |w_(n+1) a_(n+1) / a_n| not certified finite ({})",
                self.alpha
            ))
        } else if !self.rho_ok() {
            Some(format!(
                "HypothesisViolated: limsup |b_n / a_(n+1)| estimate {} is not below 1",
                self.rho
            ))
        } else {
            None
        }
    }
}

pub fn check_boundedness(op: &WeightedShift, params: &AnalysisParams) -> Result<Verdict> {
    let t = &params.thresholds;
    let hyp = Hypotheses::new(op, t);
    let (c_status, c_sup, c_ev) =
        two_sided_sup(op, t, "c", |n| crate::shiftmatrix::c_coefficient(op, n));
    let dec = decompose(op, params.horizon.max(1))?;
    let ln_t: Vec<f64> = dec.t_norms.iter().map(|x| ln_abs(*x)).collect();
    let t_sum = series_converges(&ln_t);

    let w = op.window();
    let mut ratio_sup = 0.0f64;
    for n in w.min()..w.max() {
        let r = op.w(n + 1).abs() * coefficient_functional_bound(op, n + 1)?
            / coefficient_functional_bound(op, n)?;
        ratio_sup = ratio_sup.max(r);
    }

    let s31 = hyp.alpha;
    let rho_ok = hyp.rho_ok();
    let status = if s31 == Status::Fails || c_status == Status::Fails {
        Status::Fails
    } else if s31 == Status::Holds
        && (rho_ok || (t_sum.status == Status::Holds && c_status == Status::Holds))
    {
        Status::Holds
    } else {
        Status::Inconclusive
    };
    let mut v = Verdict::new(status);
    if status == Status::Fails {
        let which = if s31 == Status::Fails {
            "alpha_n"
        } else {
            "c_n"
        };
        v = v.certificate(format!("sup |{which}| is unbounded on the window"));
    }
    if status == Status::Inconclusive {
        v = v.reason("neither sufficient condition certified");
    }
    v.evidence.extend(hyp.evidence);
    v = v
        .evidence("sup |alpha_n|", Evidence::Scalar(hyp.alpha_sup))
        .evidence("rho < 1", Evidence::Flag(rho_ok))
        .evidence("sup |c_n|", Evidence::Scalar(c_sup));
    v.evidence.extend(c_ev);
    v = v.evidence("sum_i ||T_i||", t_sum.evidence(&ln_t)).evidence(
        "sup |w_(n+1)| kbound_(n+1) / kbound_n",
        Evidence::Scalar(ratio_sup),
    );
    Ok(params.stamp(v))
}

/// `|w_{n+1}⋯w_{n+ν} a_{n+ν}|`.
fn forward_series(op: &WeightedShift, n: i64, horizon: usize) -> CriterionSeries {
    CriterionSeries::build("|w_(n+1)..w_(n+v) a_(n+v)|", Some(n), horizon, |nu| {
        weights(op, n + 1, n + nu) * SignedLog::from_real(op.a(n + nu))
    })
}

/// `|a_{n-ν} / (w_n⋯w_{n-ν+1})|`.
fn backward_series(op: &WeightedShift, n: i64, horizon: usize) -> CriterionSeries {
    CriterionSeries::build("|a_(n-v) / (w_n..w_(n-v+1))|", Some(n), horizon, |nu| {
        SignedLog::from_real(op.a(n - nu)) / weights(op, n - nu + 1, n)
    })
}

fn weights(op: &WeightedShift, lo: i64, hi: i64) -> SignedLog {
    (lo..=hi).map(|k| SignedLog::from_real(op.w(k))).product()
}

fn hypothesis_gate(
    op: &WeightedShift,
    params: &AnalysisParams,
) -> std::result::Result<Hypotheses, Verdict> {
    let hyp = Hypotheses::new(op, &params.thresholds);
    match hyp.violation() {
        Some(reason) => {
            let mut v = Verdict::new(Status::Inconclusive).reason(reason);
            v.evidence.extend(hyp.evidence);
            Err(params.stamp(v))
        }
        None => Ok(hyp),
    }
}

/// Shared logic of the limsup / lim characterizations: `Holds` when every
/// series diverges, `Fails` when one is certified bounded.
fn divergence_verdict(
    families: Vec<CriterionSeries>,
    params: &AnalysisParams,
    full_limit: bool,
) -> Verdict {
    let t = &params.thresholds;
    let mut all_diverge = true;
    let mut failure = None;
    let mut v = Verdict::new(Status::Inconclusive);
    for s in &families {
        let ln = s.ln();
        let ok = if full_limit {
            diverges_fully(&ln, t)
        } else {
            diverges(&ln, t)
        };
        all_diverge &= ok;
        if failure.is_none() {
            if let Some(cert) = bounded_certificate(&ln) {
                failure = Some(format!("{}: {cert}", s.label()));
            }
        }
        v = v.evidence(s.label(), s.evidence());
    }
    if let Some(cert) = failure {
        v.status = Status::Fails;
        v = v.certificate(cert);
    } else if all_diverge {
        v.status = Status::Holds;
    } else {
        v = v.reason("some series neither diverges nor is certified bounded");
    }
    params.stamp(v)
}

pub fn check_hypercyclic(op: &WeightedShift, params: &AnalysisParams) -> Result<Verdict> {
    Ok(characterization(op, params, false))
}

pub fn check_mixing(op: &WeightedShift, params: &AnalysisParams) -> Result<Verdict> {
    Ok(characterization(op, params, true))
}

fn characterization(op: &WeightedShift, params: &AnalysisParams, full_limit: bool) -> Verdict {
    if let Err(v) = hypothesis_gate(op, params) {
        return v;
    }
    let mut families = Vec::new();
    for n in 1..=params.n_max {
        families.push(forward_series(op, n, params.horizon));
        families.push(backward_series(op, n, params.horizon));
    }
    divergence_verdict(families, params, full_limit)
}

pub fn check_supercyclic(op: &WeightedShift, params: &AnalysisParams) -> Result<Verdict> {
    if let Err(v) = hypothesis_gate(op, params) {
        return Ok(v);
    }
    let families = (1..=params.n_max)
        .map(|n| {
            CriterionSeries::build(
                "|w_(n+1)..w_(n+v) / (w_n..w_(n-v+1)) a_(n+v) a_(n-v)|",
                Some(n),
                params.horizon,
                |nu| {
                    weights(op, n + 1, n + nu) / weights(op, n - nu + 1, n)
                        * SignedLog::from_real(op.a(n + nu))
                        * SignedLog::from_real(op.a(n - nu))
                },
            )
        })
        .collect();
    Ok(divergence_verdict(families, params, false))
}

pub fn check_chaotic(op: &WeightedShift, params: &AnalysisParams) -> Result<Verdict> {
    let hyp = match hypothesis_gate(op, params) {
        Ok(h) => h,
        Err(v) => return Ok(v),
    };
    let _ = hyp;
    let horizon = params.horizon as i64;
    let (p, q, scope) = match op.norm() {
        NormKind::Lp(p) if p > 1.0 => (p, p / (p - 1.0), None),
        NormKind::Lp(p) => (
            p,
            f64::INFINITY,
            Some("ScopeError: criterion stated for 1 < p < inf"),
        ),
        NormKind::C0 => (
            1.0,
            f64::INFINITY,
            Some("ScopeError: criterion stated for l^p, not c0"),
        ),
    };

    let pos: Vec<f64> = (1..=horizon)
        .map(|n| -p * (weights(op, 1, n) * SignedLog::from_real(op.a(n))).ln_mag())
        .collect();
    let neg: Vec<f64> = (1..=horizon)
        .map(|n| p * (weights(op, -n + 1, 0) / SignedLog::from_real(op.a(-n))).ln_mag())
        .collect();
    let s_pos = series_converges(&pos);
    let s_neg = series_converges(&neg);
    let series_cond = s_pos.status.and(s_neg.status);

    // Σ_n (Σ_j |∏_{k=1}^j b_{n+k-1}/a_{n+k}|^p)^{q/p}
    let inner: Vec<f64> = (1..=horizon)
        .map(|n| {
            let mut ln_prod = 0.0;
            let mut terms = Vec::new();
            for k in 1..=horizon.max(64) {
                let b = op.b(n + k - 1);
                if b == 0.0 {
                    break;
                }
                ln_prod += ln_abs(b) - ln_abs(op.a(n + k));
                terms.push(p * ln_prod);
                if p * ln_prod < -745.0 {
                    break;
                }
            }
            let s = SignedLog::sum(terms.iter().map(|l| SignedLog::new(1, *l)));
            if q.is_finite() {
                s.ln_mag() * q / p
            } else {
                s.ln_mag()
            }
        })
        .collect();
    let equiv = series_converges(&inner);

    let status = match (scope, series_cond, equiv.status) {
        (Some(_), _, _) => Status::Inconclusive,
        (None, Status::Fails, _) => Status::Fails,
        (None, Status::Holds, Status::Holds) => Status::Holds,
        _ => Status::Inconclusive,
    };
    let mut v = Verdict::new(status);
    if let Some(reason) = scope {
        v = v.reason(reason);
    } else if status == Status::Fails {
        let side = if s_pos.status == Status::Fails {
            "sum |1/(w_1..w_n a_n)|^p"
        } else {
            "sum |w_0..w_(-n+1)/a_(-n)|^p"
        };
        v = v.certificate(format!(
            "{side} diverges: {}",
            if s_pos.status == Status::Fails {
                &s_pos.note
            } else {
                &s_neg.note
            }
        ));
    } else if status == Status::Inconclusive {
        v = v.reason(if series_cond == Status::Holds {
            "series condition holds but the equivalence condition is not certified"
        } else {
            "series condition not decided"
        });
    }
    let v = v
        .evidence("sum |1/(w_1..w_n a_n)|^p", s_pos.evidence(&pos))
        .evidence("sum |w_0..w_(-n+1)/a_(-n)|^p", s_neg.evidence(&neg))
        .evidence("series condition", Evidence::Text(series_cond.to_string()))
        .evidence("equivalence condition", equiv.evidence(&inner))
        .evidence(
            "equivalence holds",
            Evidence::Flag(equiv.status == Status::Holds),
        )
        .evidence(
            "implication used",
            Evidence::Text(
                if equiv.status == Status::Holds {
                    "chaotic <=> dense periodic points <=> series condition"
                } else {
                    "chaotic => dense periodic points => series condition"
                }
                .to_string(),
            ),
        )
        .threshold("p", p);
    Ok(params.stamp(v))
}

/// Norm-based sufficient criteria, one sub-verdict per property.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericCriteria {
    pub hypercyclic: Verdict,
    pub mixing: Verdict,
    pub supercyclic: Verdict,
    pub chaotic: Verdict,
}

impl GenericCriteria {
    pub fn to_json(&self) -> Json {
        let mut o = self.hypercyclic.to_json();
        o.push(
            "criteria",
            Json::obj()
                .with("hypercyclic", self.hypercyclic.to_json())
                .with("mixing", self.mixing.to_json())
                .with("supercyclic", self.supercyclic.to_json())
                .with("chaotic", self.chaotic.to_json()),
        );
        o
    }
}

/// Only ever `Holds` or `Inconclusive`: failing a sufficient condition
/// proves nothing.
fn sufficient(status_holds: bool, note: Option<String>, params: &AnalysisParams) -> Verdict {
    let mut v = if status_holds {
        Verdict::new(Status::Holds)
    } else {
        Verdict::new(Status::Inconclusive)
            .reason(note.unwrap_or_else(|| "sufficient condition not established".to_string()))
    };
    v.sufficient_only = true;
    params.stamp(v)
}

pub fn check_generic_criteria(
    op: &WeightedShift,
    params: &AnalysisParams,
) -> Result<GenericCriteria> {
    let t = &params.thresholds;
    let horizon = params.horizon as i64;
    let mut cache: HashMap<i64, f64> = HashMap::new();
    let mut ln_norm = |m: i64| -> Result<f64> {
        if let Some(x) = cache.get(&m) {
            return Ok(*x);
        }
        let x = monomial_norm(op, m)?.norm.ln();
        cache.insert(m, x);
        Ok(x)
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut zs = Vec::new();
    for n in 1..=params.n_max {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut z = Vec::new();
        for nu in 1..=horizon {
            let back = weights(op, n - nu + 1, n).ln_mag();
            let fwd = weights(op, n + 1, n + nu).ln_mag();
            let lo = ln_norm(n - nu)?;
            let hi = ln_norm(n + nu)?;
            x.push(back + lo);
            y.push(hi - fwd);
            z.push(back - fwd + lo + hi);
        }
        xs.push((n, x));
        ys.push((n, y));
        zs.push((n, z));
    }

    let first_blocker = |sets: &[&Vec<(i64, Vec<f64>)>], test: &dyn Fn(&[f64]) -> bool| {
        for set in sets {
            for (n, s) in set.iter() {
                if !test(s) {
                    let why = away_from_zero_certificate(s)
                        .unwrap_or_else(|| "not shown to vanish".to_string());
                    return Some(format!("n = {n}: {why}"));
                }
            }
        }
        None
    };

    let hyp_block = first_blocker(&[&xs, &ys], &|s| vanishes(s, t));
    let mix_block = first_blocker(&[&xs, &ys], &|s| vanishes_fully(s, t));
    let sup_block = first_blocker(&[&zs], &|s| vanishes(s, t));

    let mut hypercyclic = sufficient(hyp_block.is_none(), hyp_block, params);
    let mut mixing = sufficient(mix_block.is_none(), mix_block, params);
    let mut supercyclic = sufficient(sup_block.is_none(), sup_block, params);
    for (n, s) in &xs {
        let e = Evidence::LogSeries {
            start: 1,
            ln: s.clone(),
        };
        hypercyclic =
            hypercyclic.evidence(format!("|w_n..w_(n-v+1)| ||z^(n-v)||[n={n}]"), e.clone());
        mixing = mixing.evidence(format!("|w_n..w_(n-v+1)| ||z^(n-v)||[n={n}]"), e);
    }
    for (n, s) in &ys {
        let e = Evidence::LogSeries {
            start: 1,
            ln: s.clone(),
        };
        hypercyclic = hypercyclic.evidence(
            format!("||z^(n+v)|| / |w_(n+1)..w_(n+v)|[n={n}]"),
            e.clone(),
        );
        mixing = mixing.evidence(format!("||z^(n+v)|| / |w_(n+1)..w_(n+v)|[n={n}]"), e);
    }
    for (n, s) in &zs {
        supercyclic = supercyclic.evidence(
            format!("|W-/W+| ||z^(n-v)|| ||z^(n+v)||[n={n}]"),
            Evidence::LogSeries {
                start: 1,
                ln: s.clone(),
            },
        );
    }

    // |L(z^ν)| <= ‖L‖ ‖z^ν‖, so norm majorants bound every functional
    let pos: Vec<f64> = (1..=horizon)
        .map(|nu| Ok(ln_norm(nu)? - weights(op, 1, nu).ln_mag()))
        .collect::<Result<_>>()?;
    let neg: Vec<f64> = (1..=horizon)
        .map(|nu| Ok(weights(op, -nu + 1, 0).ln_mag() + ln_norm(-nu)?))
        .collect::<Result<_>>()?;
    let sp = series_converges(&pos);
    let sn = series_converges(&neg);
    let holds = sp.status == Status::Holds && sn.status == Status::Holds;
    let chaotic = sufficient(holds, None, params)
        .evidence("sum ||z^v|| / |w_1..w_v|", sp.evidence(&pos))
        .evidence("sum |w_0..w_(-v+1)| ||z^(-v)||", sn.evidence(&neg));

    Ok(GenericCriteria {
        hypercyclic,
        mixing,
        supercyclic,
        chaotic,
    })
}

pub fn check_dichotomy_preconditions(
    op: &WeightedShift,
    params: &AnalysisParams,
) -> Result<Verdict> {
    let t = &params.thresholds;
    let hyp = Hypotheses::new(op, t);
    let rho_status = if hyp.rho_ok() {
        Status::Holds
    } else {
        Status::Inconclusive
    };
    let horizon = params.horizon as i64;
    let third: Vec<f64> = (1..=horizon)
        .map(|n| (weights(op, -n + 1, 0) / SignedLog::from_real(op.a(-n))).ln_mag())
        .collect();
    let c3 = sup_finite(&third, t);
    let status = Status::all([hyp.alpha, rho_status, c3.status]);
    let mut v = Verdict::new(status);
    if status == Status::Fails {
        let which = if hyp.alpha == Status::Fails {
            "sup |alpha_n|"
        } else {
            "sup_(n>=1) |w_0..w_(-n+1)/a_(-n)|"
        };
        let note = if hyp.alpha == Status::Fails {
            "unbounded"
        } else {
            c3.note.as_str()
        };
        v = v.certificate(format!("{which}: {note}"));
    } else if status == Status::Inconclusive {
        v = v.reason("some precondition not certified");
    }
    let mut sub_alpha = vec![
        ("verdict".to_string(), Evidence::Text(hyp.alpha.to_string())),
        ("sup".to_string(), Evidence::Scalar(hyp.alpha_sup)),
    ];
    sub_alpha.extend(hyp.evidence.iter().take(2).cloned());
    let v = v
        .evidence("sup |w_(n+1) a_(n+1) / a_n|", Evidence::Nested(sub_alpha))
        .evidence(
            "limsup |b_n / a_(n+1)| < 1",
            Evidence::Nested(vec![
                (
                    "verdict".to_string(),
                    Evidence::Text(rho_status.to_string()),
                ),
                ("rho".to_string(), Evidence::Scalar(hyp.rho)),
            ]),
        )
        .evidence(
            "sup_(n>=1) |w_0..w_(-n+1) / a_(-n)|",
            sup_evidence(&c3, &third, 1),
        );
    Ok(params.stamp(v))
}

/// Everything reported by `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub boundedness: Verdict,
    pub hypercyclic: Verdict,
    pub mixing: Verdict,
    pub supercyclic: Verdict,
    pub chaotic: Verdict,
    pub generic: GenericCriteria,
    pub dichotomy_preconditions: Verdict,
    pub essential_spectrum: Verdict,
    pub hypercyclic_subspace: Option<bool>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Json {
        Json::obj()
            .with("boundedness", self.boundedness.to_json())
            .with("hypercyclic", self.hypercyclic.to_json())
            .with("mixing", self.mixing.to_json())
            .with("supercyclic", self.supercyclic.to_json())
            .with("chaotic", self.chaotic.to_json())
            .with("generic", self.generic.to_json())
            .with(
                "dichotomy_preconditions",
                self.dichotomy_preconditions.to_json(),
            )
            .with("essential_spectrum", self.essential_spectrum.to_json())
            .with("hypercyclic_subspace", self.hypercyclic_subspace)
    }
}

fn essential_spectrum_verdict(
    op: &WeightedShift,
    params: &AnalysisParams,
) -> Result<(Verdict, Status)> {
    let dec = decompose(op, params.horizon.max(1))?;
    let compact = dec.compactness;
    let v = match essential_spectrum_estimate(&dec) {
        Ok(s) => {
            let mut v = Verdict::new(s.status)
                .evidence("inner", Evidence::Scalar(s.inner))
                .evidence("outer", Evidence::Scalar(s.outer))
                .evidence("block", Evidence::Int(s.block as i64))
                .evidence("meets_unit_circle", Evidence::Flag(s.meets_unit_circle))
                .evidence(
                    "compactness",
                    Evidence::Text(dec.compactness_reason.clone()),
                )
                .evidence(
                    "method",
                    Evidence::Text("finite-window geometric means of |alpha|".to_string()),
                );
            if s.status == Status::Inconclusive {
                v = v.reason("compactness of the perturbation not established");
            }
            v
        }
        Err(e) => Verdict::new(Status::Inconclusive).reason(e.to_string()),
    };
    Ok((params.stamp(v), compact))
}

/// Runs every check.
pub fn analyze(op: &WeightedShift, params: &AnalysisParams) -> Result<AnalysisReport> {
    let hypercyclic = check_hypercyclic(op, params)?;
    let (essential_spectrum, compact) = essential_spectrum_verdict(op, params)?;
    let hypercyclic_subspace = match (hypercyclic.status, compact) {
        (Status::Holds, Status::Holds) => Some(true),
        (Status::Fails, _) => Some(false),
        _ => None,
    };
    Ok(AnalysisReport {
        boundedness: check_boundedness(op, params)?,
        mixing: check_mixing(op, params)?,
        supercyclic: check_supercyclic(op, params)?,
        chaotic: check_chaotic(op, params)?,
        generic: check_generic_criteria(op, params)?,
        dichotomy_preconditions: check_dichotomy_preconditions(op, params)?,
        hypercyclic,
        essential_spectrum,
        hypercyclic_subspace,
    })
}
