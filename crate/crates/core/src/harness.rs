//! Numerical checks of the determinant reformulations (versions 2', 3', 5, 6)
//! and of Conjectures 2A-2E over sweep outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{sup_distance, StepDistribution};
use crate::mpnum::{ten_pow_neg, BigReal, MpError};
use crate::spectra::{LogSpectrum, SpectrumRecord};

/// Default growth step between dyadic checkpoints for 2A/2B.
pub const DEFAULT_DELTA: f64 = 0.5;
/// Relative change between successive rate estimates accepted as stable.
pub const RATE_STABILITY: f64 = 1e-3;
/// Decay rates of `ln|d_m / W^m|` separating the constant-factor verdicts.
pub const CONSTANT_SLOPE_OK: f64 = 0.01;
pub const CONSTANT_SLOPE_BAD: f64 = 0.05;
/// Relative gap between the rate estimate and a configured `W_l`.
pub const RATE_MATCH_OK: f64 = 1e-2;
pub const RATE_MATCH_BAD: f64 = 1e-1;
/// Digits to which `|prod mu|^(1/m)` and `|det|^(1/m)` must agree.
pub const V5_IDENTITY_DIGITS: u32 = 25;
/// Deviations below this count as zero in monotonicity tests.
pub const ZERO_FLOOR: f64 = 1e-20;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("need at least {need} entries, got {got}")]
    TooFewEntries { need: usize, got: usize },
    #[error("determinant is zero at m = {0}")]
    ZeroDeterminant(usize),
    #[error("W must be positive")]
    NonPositiveW,
    #[error("|prod mu|^(1/m) and |det|^(1/m) disagree beyond 1e-{digits} at m = {m}")]
    Identity { m: usize, digits: u32 },
    #[error("need at least two values of l, got {0}")]
    TooFewLevels(usize),
    #[error("reference constants: {0}")]
    Constants(String),
    #[error(transparent)]
    Mp(#[from] MpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Supported,
    Inconclusive,
    Contradicted,
    /// A required reference constant is missing.
    Unavailable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Supported => "SUPPORTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Contradicted => "CONTRADICTED",
            Verdict::Unavailable => "UNAVAILABLE",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefEntry {
    #[serde(rename = "W")]
    pub w: String,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(default)]
    pub provenance: String,
}

/// Per-`l` constants `W_l` (and optionally `R_l`) as decimal strings.
///
/// File form: `{"constants": {"1": {"W": "...", "R": "...", "provenance": "..."}}}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReferenceConstants {
    pub constants: BTreeMap<usize, RefEntry>,
}

impl ReferenceConstants {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let rc: ReferenceConstants = serde_json::from_str(text)?;
        for (l, e) in &rc.constants {
            let w = BigReal::parse(&e.w, 128).map_err(|err| HarnessError::Constants(format!("W_{l}: {err}")))?;
            if w.signum() <= 0 {
                return Err(HarnessError::Constants(format!("W_{l} = {} is not positive", e.w)));
            }
        }
        Ok(rc)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn w(&self, l: usize, prec: u32) -> Option<BigReal> {
        let e = self.constants.get(&l)?;
        BigReal::parse(&e.w, prec).ok()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendReport {
    pub check: String,
    pub l: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub sequence: Vec<String>,
    pub estimator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, String>,
    pub thresholds: BTreeMap<String, f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub parts: Vec<TrendReport>,
}

impl TrendReport {
    fn new(check: &str, estimator: &str) -> Self {
        TrendReport {
            check: check.to_string(),
            l: Vec::new(),
            m_grid: Vec::new(),
            sequence: Vec::new(),
            estimator: estimator.to_string(),
            limit: None,
            extra: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn unavailable(check: &str, what: &str) -> Self {
        let mut r = TrendReport::new(check, "none");
        r.verdict = Verdict::Unavailable;
        r.notes.push(format!("{what} not configured"));
        r
    }

    pub fn with_l(mut self, l: &[usize]) -> Self {
        self.l = l.to_vec();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn push_f64(&mut self, m: usize, v: f64) {
        self.m_grid.push(m);
        self.sequence.push(fmt_f64(v));
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

fn check_sorted(entries: &[(usize, BigReal)]) -> Vec<(usize, BigReal)> {
    let mut v = entries.to_vec();
    v.sort_by_key(|(m, _)| *m);
    v
}

/// Limit of `q_m = (ln|d_m| - ln|d_m'|)/(m - m')` over the tail, with the
/// estimator used.
fn log_rate(dets: &[(usize, BigReal)]) -> (f64, &'static str) {
    let logs: Vec<(usize, BigReal)> = dets.iter().map(|(m, d)| (*m, d.ln_abs())).collect();
    let q: Vec<f64> = logs
        .windows(2)
        .map(|w| (&w[1].1 - &w[0].1).to_f64() / (w[1].0 - w[0].0) as f64)
        .collect();
    let n = q.len();
    if n >= 3 {
        let d1 = q[n - 2] - q[n - 3];
        let d2 = q[n - 1] - q[n - 2];
        if d1 != 0.0 && d2 != 0.0 {
            let rho = d2 / d1;
            let consistent = if n >= 4 {
                let d0 = q[n - 3] - q[n - 4];
                d0 != 0.0 && (d1 / d0 - rho).abs() <= 0.25
            } else {
                false
            };
            if rho.abs() <= 0.8 && consistent {
                return (q[n - 1] - d2 * d2 / (d2 - d1), "log-ratio-aitken");
            }
        }
    }
    let start = logs.len() / 2;
    let (m0, l0) = &logs[start.min(logs.len() - 2)];
    let (m1, l1) = &logs[logs.len() - 1];
    ((l1 - l0).to_f64() / (m1 - m0) as f64, "log-ratio-tail-mean")
}

fn sign_pattern(dets: &[(usize, BigReal)]) -> &'static str {
    let s: Vec<i8> = dets.iter().map(|(_, d)| d.signum()).collect();
    if s.iter().all(|&x| x > 0) {
        "positive"
    } else if s.iter().all(|&x| x < 0) {
        "negative"
    } else if s.windows(2).all(|w| w[0] != w[1]) {
        "alternating"
    } else {
        "mixed"
    }
}

/// Estimates `lim |d_m|^(1/m)` from determinants at increasing `m`.
pub fn est_rate(dets: &[(usize, BigReal)]) -> Result<TrendReport, HarnessError> {
    if dets.len() < 4 {
        return Err(HarnessError::TooFewEntries { need: 4, got: dets.len() });
    }
    let dets = check_sorted(dets);
    if let Some((m, _)) = dets.iter().find(|(_, d)| d.is_zero()) {
        return Err(HarnessError::ZeroDeterminant(*m));
    }
    let (q, estimator) = log_rate(&dets);
    let mut r = TrendReport::new("v3", estimator);
    for (m, d) in &dets {
        r.m_grid.push(*m);
        r.sequence.push(d.abs().root(*m as u32).to_decimal_digits(30));
    }
    let limit = q.exp();
    r.limit = Some(fmt_f64(limit));
    r.extra.insert("sign".into(), sign_pattern(&dets).into());
    r.thresholds.insert("stability_rel".into(), RATE_STABILITY);
    r.verdict = if dets.len() >= 5 {
        let (q_prev, _) = log_rate(&dets[..dets.len() - 1]);
        let rel = ((q_prev.exp() - limit) / limit).abs();
        r.extra.insert("stability".into(), fmt_f64(rel));
        if limit.is_finite() && limit > 0.0 && rel <= RATE_STABILITY {
            Verdict::Supported
        } else {
            Verdict::Inconclusive
        }
    } else {
        r.notes.push("too few entries to judge stability".into());
        Verdict::Inconclusive
    };
    Ok(r)
}

/// Compares the rate estimate against a configured `W_l`.
pub fn est_rate_against(dets: &[(usize, BigReal)], w: &BigReal) -> Result<TrendReport, HarnessError> {
    if w.signum() <= 0 {
        return Err(HarnessError::NonPositiveW);
    }
    let mut r = est_rate(dets)?;
    let limit: f64 = r.limit.as_deref().and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
    let rel = ((limit - w.to_f64()) / w.to_f64()).abs();
    r.extra.insert("W".into(), w.to_decimal_digits(30));
    r.extra.insert("rel_gap_to_W".into(), fmt_f64(rel));
    r.thresholds.insert("match_ok".into(), RATE_MATCH_OK);
    r.thresholds.insert("match_bad".into(), RATE_MATCH_BAD);
    r.verdict = if rel <= RATE_MATCH_OK {
        Verdict::Supported
    } else if rel > RATE_MATCH_BAD {
        Verdict::Contradicted
    } else {
        Verdict::Inconclusive
    };
    Ok(r)
}

fn lsq_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Estimates `R` in `d_m ~ R W^m` from `s_m = d_m / W^m`.
pub fn est_constant(dets: &[(usize, BigReal)], w: &BigReal) -> Result<TrendReport, HarnessError> {
    if w.signum() <= 0 {
        return Err(HarnessError::NonPositiveW);
    }
    if dets.len() < 4 {
        return Err(HarnessError::TooFewEntries { need: 4, got: dets.len() });
    }
    let dets = check_sorted(dets);
    if let Some((m, _)) = dets.iter().find(|(_, d)| d.is_zero()) {
        return Err(HarnessError::ZeroDeterminant(*m));
    }
    let mut r = TrendReport::new("v2", "richardson-1/m");
    let s: Vec<(usize, BigReal)> = dets
        .iter()
        .map(|(m, d)| {
            let wp = w.with_prec(d.prec()).pow_i(*m as i32);
            (*m, d / &wp)
        })
        .collect();
    for (m, v) in &s {
        r.m_grid.push(*m);
        r.sequence.push(v.to_decimal_digits(30));
    }
    let tail = &s[s.len() / 2..];
    let (m1, s1) = &tail[tail.len() - 2];
    let (m2, s2) = &tail[tail.len() - 1];
    let rich = (s2.to_f64() * *m2 as f64 - s1.to_f64() * *m1 as f64) / (*m2 - *m1) as f64;
    r.limit = Some(fmt_f64(rich));
    let vals: Vec<f64> = tail.iter().map(|(_, v)| v.to_f64()).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let disp = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
    r.extra.insert("tail_mean".into(), fmt_f64(mean));
    r.extra.insert("dispersion".into(), fmt_f64(disp));
    let slope = lsq_slope(
        &tail
            .iter()
            .map(|(m, v)| (*m as f64, v.ln_abs().to_f64()))
            .collect::<Vec<_>>(),
    );
    r.extra.insert("log_slope".into(), fmt_f64(slope));
    r.thresholds.insert("slope_ok".into(), CONSTANT_SLOPE_OK);
    r.thresholds.insert("slope_bad".into(), CONSTANT_SLOPE_BAD);
    r.verdict = if slope.abs() <= CONSTANT_SLOPE_OK {
        Verdict::Supported
    } else if slope.abs() > CONSTANT_SLOPE_BAD {
        Verdict::Contradicted
    } else {
        Verdict::Inconclusive
    };
    Ok(r)
}

/// Checks `|prod mu|^(1/m) = |det|^(1/m)` on every record, then estimates
/// the rate from the products.
pub fn check_version5(records: &[SpectrumRecord]) -> Result<TrendReport, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::TooFewEntries { need: 1, got: 0 });
    }
    let mut prods = Vec::new();
    let mut seq = Vec::new();
    for rec in records {
        let prod = rec.product();
        let a = prod.abs().root(rec.m as u32);
        let b = rec.det.abs().root(rec.m as u32);
        let ok = (a.is_zero() && b.is_zero()) || a.rel_close(&b, &ten_pow_neg(rec.precision_used, V5_IDENTITY_DIGITS));
        if !ok {
            return Err(HarnessError::Identity { m: rec.m, digits: V5_IDENTITY_DIGITS });
        }
        seq.push((rec.m, a.to_decimal_digits(30)));
        if !prod.is_zero() {
            prods.push((rec.m, prod));
        }
    }
    let mut r = if prods.len() >= 4 {
        est_rate(&prods)?
    } else {
        let mut r = TrendReport::new("v5", "none");
        r.notes.push("fewer than 4 nonzero products; no rate estimate".into());
        r
    };
    r.check = "v5".into();
    seq.sort_by_key(|(m, _)| *m);
    r.m_grid = seq.iter().map(|(m, _)| *m).collect();
    r.sequence = seq.into_iter().map(|(_, v)| v).collect();
    r.thresholds.insert("identity_digits".into(), V5_IDENTITY_DIGITS as f64);
    let ls: BTreeSet<usize> = records.iter().map(|r| r.l).collect();
    Ok(r.with_l(&ls.into_iter().collect::<Vec<_>>()))
}

/// `|mean F - (1/m) ln|det||` for a record and its distribution.
pub fn version6_gap(rec: &SpectrumRecord, dist: &StepDistribution) -> BigReal {
    let target = &rec.det.ln_abs() / &BigReal::from_i64(rec.precision_used, rec.m as i64);
    (&dist.mean() - &target).abs()
}

/// Verdict for a sequence of distances that should shrink.
fn shrinking(values: &[f64]) -> Verdict {
    let v: Vec<f64> = values.iter().map(|&x| if x.abs() < ZERO_FLOOR { 0.0 } else { x }).collect();
    if v.windows(2).all(|w| w[1] <= w[0]) {
        Verdict::Supported
    } else if v[v.len() - 1] > v[0] {
        Verdict::Contradicted
    } else {
        Verdict::Inconclusive
    }
}

/// Trend of `|mean F_{l,m} - ln W|` over `m`.
pub fn check_version6(dists: &[StepDistribution], w: Option<&BigReal>) -> Result<TrendReport, HarnessError> {
    let Some(w) = w else {
        return Ok(TrendReport::unavailable("v6", "W_l"));
    };
    if w.signum() <= 0 {
        return Err(HarnessError::NonPositiveW);
    }
    if dists.is_empty() {
        return Err(HarnessError::TooFewEntries { need: 1, got: 0 });
    }
    let mut ds: Vec<&StepDistribution> = dists.iter().collect();
    ds.sort_by_key(|d| d.m);
    let mut r = TrendReport::new("v6", "mean-minus-log-w");
    let mut gaps = Vec::new();
    for d in &ds {
        let mean = d.mean();
        let lw = w.with_prec(mean.prec()).ln_abs();
        let g = (&mean - &lw).abs().to_f64();
        r.push_f64(d.m, g);
        gaps.push(g);
    }
    r.extra.insert("log_W".into(), w.ln_abs().to_decimal_digits(30));
    r.thresholds.insert("zero_floor".into(), ZERO_FLOOR);
    r.verdict = shrinking(&gaps);
    let ls: BTreeSet<usize> = ds.iter().map(|d| d.l).collect();
    Ok(r.with_l(&ls.into_iter().collect::<Vec<_>>()))
}

fn dyadic(m: usize) -> bool {
    m.is_power_of_two()
}

fn growth_report(check: &str, seq: &[(usize, f64)], delta: f64) -> TrendReport {
    let mut r = TrendReport::new(check, "dyadic-growth");
    for &(m, v) in seq {
        r.push_f64(m, v);
    }
    r.thresholds.insert("delta".into(), delta);
    let cps: Vec<f64> = seq.iter().filter(|(m, _)| dyadic(*m)).map(|&(_, v)| v).collect();
    if cps.len() < 3 {
        r.notes.push(format!("only {} dyadic checkpoints", cps.len()));
        return r;
    }
    let last = &cps[cps.len() - 3..];
    r.extra.insert(
        "checkpoints".into(),
        last.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","),
    );
    r.verdict = if last[1] - last[0] >= delta && last[2] - last[1] >= delta {
        Verdict::Supported
    } else if last[2] <= last[0] {
        Verdict::Contradicted
    } else {
        Verdict::Inconclusive
    };
    r
}

/// 2A on `max` of the log-spectra and 2B on `-min`, over increasing `m`.
pub fn check_2a_2b(spectra: &[LogSpectrum], delta: f64) -> (TrendReport, TrendReport) {
    let mut ls: Vec<&LogSpectrum> = spectra.iter().filter(|s| !s.points.is_empty()).collect();
    ls.sort_by_key(|s| s.m);
    let maxes: Vec<(usize, f64)> = ls.iter().map(|s| (s.m, s.max().unwrap().to_f64())).collect();
    let mins: Vec<(usize, f64)> = ls.iter().map(|s| (s.m, -s.min().unwrap().to_f64())).collect();
    let l: Vec<usize> = ls.iter().map(|s| s.l).collect::<BTreeSet<_>>().into_iter().collect();
    (
        growth_report("2A", &maxes, delta).with_l(&l),
        growth_report("2B", &mins, delta).with_l(&l),
    )
}

/// Trend report over a sequence of distances that should decrease.
pub fn distance_trend(check: &str, seq: &[(usize, f64)], min_levels: usize) -> TrendReport {
    let mut r = TrendReport::new(check, "sup-distance-trend");
    for &(m, v) in seq {
        r.push_f64(m, v);
    }
    r.thresholds.insert("zero_floor".into(), ZERO_FLOOR);
    if seq.len() < min_levels {
        r.notes.push(format!("need {min_levels} levels, got {}", seq.len()));
        return r;
    }
    r.verdict = shrinking(&seq.iter().map(|p| p.1).collect::<Vec<_>>());
    r
}

/// `sup |F_{l,m} - F_{l,2m}|` for every `m` with both levels present.
pub fn check_2c(dists: &[StepDistribution]) -> TrendReport {
    let by_m: BTreeMap<usize, &StepDistribution> = dists.iter().map(|d| (d.m, d)).collect();
    let seq: Vec<(usize, f64)> = by_m
        .iter()
        .filter_map(|(&m, f)| by_m.get(&(2 * m)).map(|g| (m, sup_distance(f, g))))
        .collect();
    let l: Vec<usize> = dists.iter().map(|d| d.l).collect::<BTreeSet<_>>().into_iter().collect();
    distance_trend("2C", &seq, 3).with_l(&l)
}

fn increasing_part(check: &str, seq: &[(usize, f64)]) -> TrendReport {
    let mut r = TrendReport::new(check, "dyadic-monotone");
    for &(m, v) in seq {
        r.push_f64(m, v);
    }
    r.verdict = if seq.len() >= 3 && seq.windows(2).all(|w| w[1].1 > w[0].1) {
        Verdict::Supported
    } else {
        Verdict::Inconclusive
    };
    if seq.len() < 3 {
        r.notes.push(format!("only {} dyadic levels", seq.len()));
    }
    r
}

/// Growth of `|neg|` and `pos` tail sums across dyadic `m`.
pub fn check_2d(dists: &[StepDistribution]) -> TrendReport {
    let mut ds: Vec<&StepDistribution> = dists.iter().filter(|d| dyadic(d.m)).collect();
    ds.sort_by_key(|d| d.m);
    let tails: Vec<(usize, f64, f64)> = ds
        .iter()
        .map(|d| {
            let t = d.tail_sums();
            (d.m, t.neg.abs().to_f64(), t.pos.to_f64())
        })
        .collect();
    let neg = increasing_part("2D-neg", &tails.iter().map(|t| (t.0, t.1)).collect::<Vec<_>>());
    let pos = increasing_part("2D-pos", &tails.iter().map(|t| (t.0, t.2)).collect::<Vec<_>>());
    let mut r = TrendReport::new("2D", "dyadic-monotone");
    r.m_grid = tails.iter().map(|t| t.0).collect();
    r.sequence = tails.iter().map(|t| format!("{}|{}", fmt_f64(t.1), fmt_f64(t.2))).collect();
    r.verdict = if neg.verdict == Verdict::Supported && pos.verdict == Verdict::Supported {
        Verdict::Supported
    } else {
        Verdict::Inconclusive
    };
    r.parts = vec![neg, pos];
    let l: Vec<usize> = ds.iter().map(|d| d.l).collect::<BTreeSet<_>>().into_iter().collect();
    r.with_l(&l)
}

/// Pairwise `sup |F_{l,m} - F_{l',m}|` along the shared `m` grid.
pub fn check_2e(dists: &[StepDistribution]) -> Result<TrendReport, HarnessError> {
    let mut by_l: BTreeMap<usize, BTreeMap<usize, &StepDistribution>> = BTreeMap::new();
    for d in dists {
        by_l.entry(d.l).or_default().insert(d.m, d);
    }
    if by_l.len() < 2 {
        return Err(HarnessError::TooFewLevels(by_l.len()));
    }
    let ls: Vec<usize> = by_l.keys().copied().collect();
    let grid: Vec<usize> = by_l[&ls[0]]
        .keys()
        .copied()
        .filter(|m| by_l.values().all(|g| g.contains_key(m)))
        .collect();
    let mut r = TrendReport::new("2E", "pairwise-sup-distance");
    r.m_grid = grid.clone();
    for (i, &a) in ls.iter().enumerate() {
        for &b in &ls[i + 1..] {
            let seq: Vec<(usize, f64)> = grid
                .iter()
                .map(|m| (*m, sup_distance(by_l[&a][m], by_l[&b][m])))
                .collect();
            r.parts.push(distance_trend(&format!("2E-{a}-{b}"), &seq, 2).with_l(&[a, b]));
        }
    }
    r.verdict = if r.parts.iter().any(|p| p.verdict == Verdict::Contradicted) {
        Verdict::Contradicted
    } else if r.parts.iter().all(|p| p.verdict == Verdict::Supported) {
        Verdict::Supported
    } else {
        Verdict::Inconclusive
    };
    r.thresholds.insert("zero_floor".into(), ZERO_FLOOR);
    Ok(r.with_l(&ls))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn dets(f: impl Fn(usize) -> BigReal, ms: std::ops::RangeInclusive<usize>) -> Vec<(usize, BigReal)> {
        ms.map(|m| (m, f(m))).collect()
    }

    fn pow(b: f64, m: usize) -> BigReal {
        BigReal::from_f64(P, b).pow_i(m as i32)
    }

    fn limit(r: &TrendReport) -> f64 {
        r.limit.as_deref().unwrap().parse().unwrap()
    }

    fn dist(l: usize, m: usize, pts: &[f64]) -> StepDistribution {
        StepDistribution::new(l, m, pts.iter().map(|&x| BigReal::from_f64(P, x)).collect())
    }

    #[test]
    fn rate_exact_geometric() {
        let r = est_rate(&dets(|m| pow(2.0, m), 1..=16)).unwrap();
        assert!((limit(&r) - 2.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Supported);
        assert_eq!(r.extra["sign"], "positive");
    }

    #[test]
    fn rate_alternating_sign() {
        let r = est_rate(&dets(|m| pow(-2.0, m), 1..=16)).unwrap();
        assert!((limit(&r) - 2.0).abs() < 1e-12);
        assert_eq!(r.extra["sign"], "alternating");
    }

    #[test]
    fn rate_errors() {
        let mut d = dets(|m| pow(2.0, m), 1..=6);
        d[2].1 = BigReal::zero(P);
        assert!(matches!(est_rate(&d), Err(HarnessError::ZeroDeterminant(3))));
        assert!(matches!(est_rate(&d[..3]), Err(HarnessError::TooFewEntries { .. })));
    }

    #[test]
    fn rate_against_w() {
        let d = dets(|m| pow(3.0, m), 1..=16);
        let ok = est_rate_against(&d, &BigReal::from_f64(P, 3.0)).unwrap();
        assert_eq!(ok.verdict, Verdict::Supported);
        let bad = est_rate_against(&d, &BigReal::from_f64(P, 4.0)).unwrap();
        assert_eq!(bad.verdict, Verdict::Contradicted);
    }

    #[test]
    fn constant_examples() {
        let w = BigReal::from_f64(P, 2.0);
        let r = est_constant(&dets(|m| &BigReal::from_f64(P, 5.0) * &pow(2.0, m), 1..=32), &w).unwrap();
        assert!((limit(&r) - 5.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Supported);

        let r = est_constant(
            &dets(|m| &pow(2.0, m) * &BigReal::from_ratio(P, m as i64 + 1, m as i64), 1..=64),
            &w,
        )
        .unwrap();
        assert!((limit(&r) - 1.0).abs() < 1e-9);
        assert_eq!(r.verdict, Verdict::Supported);

        let r = est_constant(&dets(|m| pow(2.0, m), 1..=64), &BigReal::from_f64(P, 2.2)).unwrap();
        assert_eq!(r.verdict, Verdict::Contradicted);
        assert!(matches!(est_constant(&r_dets(), &BigReal::zero(P)), Err(HarnessError::NonPositiveW)));
    }

    fn r_dets() -> Vec<(usize, BigReal)> {
        dets(|m| pow(2.0, m), 1..=8)
    }

    #[test]
    fn version6_examples() {
        let w = BigReal::from_f64(P, 4.0);
        let exact: Vec<StepDistribution> = [2, 4, 8]
            .iter()
            .map(|&m| dist(1, m, &vec![4f64.ln(); m]))
            .collect();
        assert_eq!(check_version6(&exact, Some(&w)).unwrap().verdict, Verdict::Supported);

        let drift: Vec<StepDistribution> = [2, 4, 8]
            .iter()
            .map(|&m| dist(1, m, &vec![4f64.ln() + m as f64; m]))
            .collect();
        assert_eq!(check_version6(&drift, Some(&w)).unwrap().verdict, Verdict::Contradicted);
        assert_eq!(check_version6(&drift, None).unwrap().verdict, Verdict::Unavailable);
    }

    fn lspec(m: usize, lo: f64, hi: f64) -> LogSpectrum {
        LogSpectrum {
            l: 1,
            m,
            points: vec![BigReal::from_f64(P, lo), BigReal::from_f64(P, hi)],
            zero_count: m - 2,
        }
    }

    #[test]
    fn growth_examples() {
        let s: Vec<LogSpectrum> = (2..=8).map(|m| lspec(m, -(m as f64), m as f64)).collect();
        let (a, b) = check_2a_2b(&s, DEFAULT_DELTA);
        assert_eq!(a.verdict, Verdict::Supported);
        assert_eq!(b.verdict, Verdict::Supported);

        let s: Vec<LogSpectrum> = (2..=16).map(|m| lspec(m, -1.0, (m as f64).min(7.0))).collect();
        let (a, b) = check_2a_2b(&s, DEFAULT_DELTA);
        assert_eq!(a.verdict, Verdict::Inconclusive);
        assert_eq!(b.verdict, Verdict::Contradicted);

        let s: Vec<LogSpectrum> = [2usize, 4, 8].iter().map(|&m| lspec(m, -((m / 2) as f64), 0.0)).collect();
        assert_eq!(check_2a_2b(&s, DEFAULT_DELTA).1.verdict, Verdict::Supported);
    }

    #[test]
    fn distance_examples() {
        let same: Vec<StepDistribution> = [2, 4, 8, 16].iter().map(|&m| dist(1, m, &vec![0.0; m])).collect();
        let r = check_2c(&same);
        assert_eq!(r.sequence.len(), 3);
        assert_eq!(r.verdict, Verdict::Supported);
        assert_eq!(distance_trend("2C", &[(2, 0.3), (4, 0.2), (8, 0.1)], 3).verdict, Verdict::Supported);
        assert_eq!(distance_trend("2C", &[(2, 0.1), (4, 0.3), (8, 0.5)], 3).verdict, Verdict::Contradicted);
        assert_eq!(distance_trend("2C", &[(2, 0.1), (4, 0.3)], 3).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn tail_examples() {
        let grow: Vec<StepDistribution> = [2usize, 4, 8]
            .iter()
            .map(|&m| {
                let v = m as f64;
                let mut p = vec![-v; m / 2];
                p.extend(vec![v; m / 2]);
                dist(1, m, &p)
            })
            .collect();
        let r = check_2d(&grow);
        assert_eq!(r.verdict, Verdict::Supported);
        assert!(r.sequence[0].starts_with("1e0|1e0"));

        let bounded: Vec<StepDistribution> = [2, 4, 8].iter().map(|&m| dist(1, m, &[-1.0, 1.0])).collect();
        assert_eq!(check_2d(&bounded).verdict, Verdict::Inconclusive);

        let half: Vec<StepDistribution> = [2usize, 4, 8].iter().map(|&m| dist(1, m, &[-1.0, (m * m) as f64])).collect();
        let r = check_2d(&half);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.parts[0].verdict, Verdict::Inconclusive);
        assert_eq!(r.parts[1].verdict, Verdict::Supported);
    }

    #[test]
    fn cross_l_examples() {
        let mut all = Vec::new();
        for l in 1..=3 {
            for m in [2usize, 4, 8] {
                all.push(dist(l, m, &vec![0.0; m]));
            }
        }
        let r = check_2e(&all).unwrap();
        assert_eq!(r.parts.len(), 3);
        assert_eq!(r.verdict, Verdict::Supported);

        assert_eq!(distance_trend("2E", &[(2, 0.4), (4, 0.2), (8, 0.1)], 2).verdict, Verdict::Supported);
        let mut grow = vec![dist(1, 2, &[0.0, 0.0]), dist(1, 4, &[0.0; 4])];
        grow.push(dist(2, 2, &[0.0, 0.0]));
        grow.push(dist(2, 4, &[0.0, 0.0, 9.0, 9.0]));
        assert_eq!(check_2e(&grow).unwrap().verdict, Verdict::Contradicted);
        assert!(matches!(check_2e(&grow[..2]), Err(HarnessError::TooFewLevels(1))));
    }

    #[test]
    fn constants_file() {
        let rc = ReferenceConstants::from_json(r#"{"constants": {"1": {"W": "2.5", "provenance": "test"}}}"#).unwrap();
        assert_eq!(rc.w(1, 64).unwrap().to_f64(), 2.5);
        assert!(rc.w(2, 64).is_none());
        assert!(ReferenceConstants::from_json(r#"{"constants": {"1": {"W": "-1"}}}"#).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = est_rate(&dets(|m| pow(2.0, m), 1..=6)).unwrap().with_l(&[1]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["check", "l", "m_grid", "sequence", "estimator", "thresholds", "verdict"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "SUPPORTED");
    }
}
