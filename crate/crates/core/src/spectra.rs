//! mu-spectra of `M_{l,m}(f)`, their logarithmic form, the electron/train
//! split and sweeps over `m`.

use std::cmp::Ordering;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;
use thiserror::Error;

use crate::coeffs::CoeffStream;
use crate::hankel::{build_m, HankelError};
use crate::mpnum::{adaptive_solve_with, det_lu, ten_pow_neg, AdaptiveOptions, BigReal, MpError, RealMatrix};

/// Relative agreement demanded between the eigenvalue product and the LU
/// determinant.
pub const IDENTITY_DIGITS: u32 = 30;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Hankel(#[from] HankelError),
    #[error(transparent)]
    Mp(#[from] MpError),
    #[error("eigenvalue product and determinant disagree at l = {l}, m = {m} up to {prec} bits (product {product}, det {det})")]
    IdentityViolation {
        l: usize,
        m: usize,
        prec: u32,
        product: String,
        det: String,
    },
    #[error("split needs at least one point")]
    EmptySpectrum,
    #[error("pairing needs at least 4 train points, got {0}")]
    TooFewTrains(usize),
    #[error("invalid split policy {0:?}")]
    BadPolicy(String),
    #[error("spectra CSV: {0}")]
    Csv(String),
}

/// Eigenvalues `mu_{l,m,1..m}` of `M_{l,m}(f)`, ascending.
#[derive(Clone, Debug)]
pub struct SpectrumRecord {
    pub l: usize,
    pub m: usize,
    pub function: String,
    pub eigenvalues: Vec<BigReal>,
    /// `det M_{l,m}` from LU at the same precision.
    pub det: BigReal,
    pub precision_used: u32,
    pub target_digits: u32,
}

impl SpectrumRecord {
    pub fn product(&self) -> BigReal {
        let mut acc = Float::with_val(self.precision_used, 1);
        for v in &self.eigenvalues {
            acc *= v.as_float();
        }
        BigReal::from(acc)
    }

    pub fn sum(&self) -> BigReal {
        let mut acc = Float::new(self.precision_used);
        for v in &self.eigenvalues {
            acc += v.as_float();
        }
        BigReal::from(acc)
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            start_bits: 256,
            cap_bits: 8192,
        }
    }
}

pub fn compute_spectrum(stream: &CoeffStream, l: usize, m: usize, target_digits: u32) -> Result<SpectrumRecord, SpectraError> {
    compute_spectrum_with(stream, l, m, target_digits, &SpectrumOptions::default())
}

/// Builds `M_{l,m}`, solves it adaptively and checks `prod mu = det M`.
///
/// Analytic streams demand relative agreement on every eigenvalue, so tiny
/// eigenvalues push the precision up instead of being compared absolutely.
/// A failed product/determinant check restarts the solve from twice the
/// starting precision until the cap.
pub fn compute_spectrum_with(
    stream: &CoeffStream,
    l: usize,
    m: usize,
    target_digits: u32,
    opts: &SpectrumOptions,
) -> Result<SpectrumRecord, SpectraError> {
    let h = build_m(stream, l, m)?;
    let mut solve_opts = AdaptiveOptions {
        start_bits: opts.start_bits,
        cap_bits: opts.cap_bits,
        relative_only: stream.spec.is_analytic(),
        ..AdaptiveOptions::default()
    };
    loop {
        let eig = adaptive_solve_with(&h.matrix, target_digits, &solve_opts)?;
        let prec = eig.precision_used;
        let det = det_lu(&h.matrix, prec)?;
        let rec = SpectrumRecord {
            l,
            m,
            function: stream.spec.name.clone(),
            eigenvalues: eig.eigenvalues,
            det,
            precision_used: prec,
            target_digits,
        };
        let product = rec.product();
        if identity_holds(&h.matrix, &product, &rec.det, prec) {
            return Ok(rec);
        }
        if solve_opts.start_bits.saturating_mul(4) > opts.cap_bits {
            return Err(SpectraError::IdentityViolation {
                l,
                m,
                prec,
                product: product.to_decimal_digits(25),
                det: rec.det.to_decimal_digits(25),
            });
        }
        solve_opts.start_bits *= 2;
    }
}

/// `prod mu = det` to [`IDENTITY_DIGITS`] relative digits; when either side
/// is exactly zero the other must lie below `||A||_F^m 2^(-prec/2)`.
pub fn identity_holds(a: &RealMatrix, product: &BigReal, det: &BigReal, prec: u32) -> bool {
    if product.is_zero() || det.is_zero() {
        let other = if product.is_zero() { det } else { product };
        if other.is_zero() {
            return true;
        }
        let norm = a.frobenius(prec);
        let scale = norm.pow_i(a.dim() as i32);
        let floor = &scale * &BigReal::from(Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2)));
        return other.cmp_abs(&floor) != Ordering::Greater;
    }
    product.rel_close(det, &ten_pow_neg(prec, IDENTITY_DIGITS))
}

/// `{ln|mu|}` for the nonzero eigenvalues; a point sits at `(ln|mu|, m)` in
/// the spectrum figures.
#[derive(Clone, Debug)]
pub struct LogSpectrum {
    pub l: usize,
    pub m: usize,
    pub points: Vec<BigReal>,
    pub zero_count: usize,
}

impl LogSpectrum {
    pub fn points_f64(&self) -> Vec<f64> {
        self.points.iter().map(BigReal::to_f64).collect()
    }

    pub fn max(&self) -> Option<&BigReal> {
        self.points.last()
    }

    pub fn min(&self) -> Option<&BigReal> {
        self.points.first()
    }
}

pub fn log_spectrum(rec: &SpectrumRecord) -> LogSpectrum {
    let mut points: Vec<BigReal> = rec
        .eigenvalues
        .iter()
        .filter(|v| !v.is_zero())
        .map(BigReal::ln_abs)
        .collect();
    points.sort_by(BigReal::total_cmp);
    LogSpectrum {
        l: rec.l,
        m: rec.m,
        zero_count: rec.m - points.len(),
        points,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitPolicy {
    /// Cut at the widest gap between consecutive sorted points.
    LargestGap,
    /// Electrons are the points `< c`.
    Threshold(f64),
    /// Electrons are the lowest `floor(q n)` points, rounded up past ties.
    Quantile(f64),
}

impl Default for SplitPolicy {
    fn default() -> Self {
        SplitPolicy::LargestGap
    }
}

impl fmt::Display for SplitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitPolicy::LargestGap => f.write_str("largest-gap"),
            SplitPolicy::Threshold(c) => write!(f, "threshold:{c}"),
            SplitPolicy::Quantile(q) => write!(f, "quantile:{q}"),
        }
    }
}

impl FromStr for SplitPolicy {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpectraError::BadPolicy(s.to_string());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = || arg.and_then(|a| a.trim().parse::<f64>().ok()).filter(|v| v.is_finite());
        match head.trim() {
            "largest-gap" => Ok(SplitPolicy::LargestGap),
            "threshold" => num().map(SplitPolicy::Threshold).ok_or_else(bad),
            "quantile" => num()
                .filter(|q| (0.0..=1.0).contains(q))
                .map(SplitPolicy::Quantile)
                .ok_or_else(bad),
            _ => Err(bad()),
        }
    }
}

/// Lower part (electrons) and upper part (trains) of a log-spectrum.
#[derive(Clone, Debug)]
pub struct SplitSpectrum {
    pub electrons: Vec<BigReal>,
    pub trains: Vec<BigReal>,
    pub policy: String,
    /// Location of the cut, when one exists.
    pub cut: Option<f64>,
    pub warning: Option<String>,
}

pub fn split(ls: &LogSpectrum, policy: SplitPolicy) -> Result<SplitSpectrum, SpectraError> {
    let pts = &ls.points;
    let n = pts.len();
    if n == 0 {
        return Err(SpectraError::EmptySpectrum);
    }
    let mut warning = None;
    let (idx, cut) = if n == 1 {
        warning = Some("single point; everything assigned to trains".to_string());
        (0, None)
    } else {
        match policy {
            SplitPolicy::LargestGap => {
                let mut best: Option<(usize, BigReal)> = None;
                for i in 1..n {
                    let gap = &pts[i] - &pts[i - 1];
                    if best.as_ref().map_or(true, |(_, g)| gap > *g) {
                        best = Some((i, gap));
                    }
                }
                let (i, gap) = best.expect("n >= 2");
                if gap.is_zero() {
                    warning = Some("all points coincide; no gap to cut at".to_string());
                    (0, None)
                } else {
                    let mid = (pts[i - 1].to_f64() + pts[i].to_f64()) / 2.0;
                    (i, Some(mid))
                }
            }
            SplitPolicy::Threshold(c) => {
                let c_big = BigReal::from_f64(pts[0].prec(), c);
                (pts.partition_point(|p| *p < c_big), Some(c))
            }
            SplitPolicy::Quantile(q) => {
                let mut i = ((q * n as f64).floor() as usize).min(n);
                while i > 0 && i < n && pts[i - 1] == pts[i] {
                    i += 1;
                }
                let cut = if i == 0 || i == n {
                    None
                } else {
                    Some((pts[i - 1].to_f64() + pts[i].to_f64()) / 2.0)
                };
                (i, cut)
            }
        }
    };
    if warning.is_none() && (idx == 0 || idx == n) {
        warning = Some("all points fall on one side of the cut".to_string());
    }
    if let Some(w) = &warning {
        log::warn!("split l={} m={}: {w}", ls.l, ls.m);
    }
    Ok(SplitSpectrum {
        electrons: pts[..idx].to_vec(),
        trains: pts[idx..].to_vec(),
        policy: policy.to_string(),
        cut,
        warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairingStats {
    pub intra_median: f64,
    pub inter_median: f64,
    /// `intra / inter`; small values mean the points travel in pairs.
    pub ratio: f64,
}

/// Pairs consecutive sorted points `(1,2), (3,4), ...` and compares the
/// median gap inside pairs with the median gap between neighbouring pairs.
pub fn pairing_stats(trains: &[f64]) -> Result<PairingStats, SpectraError> {
    if trains.len() < 4 {
        return Err(SpectraError::TooFewTrains(trains.len()));
    }
    let mut x = trains.to_vec();
    x.sort_by(f64::total_cmp);
    let pairs = x.len() / 2;
    let intra: Vec<f64> = (0..pairs).map(|p| x[2 * p + 1] - x[2 * p]).collect();
    let inter: Vec<f64> = (1..pairs).map(|p| x[2 * p] - x[2 * p - 1]).collect();
    let intra_median = median(intra);
    let inter_median = median(inter);
    Ok(PairingStats {
        intra_median,
        inter_median,
        ratio: intra_median / inter_median,
    })
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// One `m` of a sweep; failures are kept per entry.
#[derive(Debug)]
pub struct SweepEntry {
    pub m: usize,
    pub result: Result<SpectrumRecord, SpectraError>,
}

/// Spectra for every `m` in `m_range`, computed on a pool of `jobs` threads
/// and returned in ascending `m` regardless of completion order.
pub fn sweep(
    stream: &CoeffStream,
    l: usize,
    m_range: impl IntoIterator<Item = usize>,
    target_digits: u32,
    jobs: usize,
    opts: &SpectrumOptions,
) -> Vec<SweepEntry> {
    let mut ms: Vec<usize> = m_range.into_iter().collect();
    ms.sort_unstable();
    ms.dedup();
    let work = || {
        ms.par_iter()
            .map(|&m| SweepEntry {
                m,
                result: compute_spectrum_with(stream, l, m, target_digits, opts),
            })
            .collect::<Vec<_>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

/// One row of the spectra CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub mu: BigReal,
    /// `None` for an exactly zero eigenvalue (`ZERO` in the file).
    pub ln_abs_mu: Option<BigReal>,
    pub precision_bits: u32,
}

pub const CSV_HEADER: [&str; 6] = ["l", "m", "n", "mu", "ln_abs_mu", "precision_bits"];

/// Writes `l,m,n,mu,ln_abs_mu,precision_bits` rows; numbers are decimal
/// strings that read back exactly at `precision_bits`.
pub fn write_csv<W: Write>(records: &[SpectrumRecord], out: W) -> Result<(), SpectraError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| SpectraError::Csv(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for rec in records {
        for (i, mu) in rec.eigenvalues.iter().enumerate() {
            let ln = if mu.is_zero() {
                "ZERO".to_string()
            } else {
                mu.ln_abs().to_decimal()
            };
            w.write_record([
                rec.l.to_string(),
                rec.m.to_string(),
                (i + 1).to_string(),
                mu.to_decimal(),
                ln,
                rec.precision_used.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| SpectraError::Csv(e.to_string()))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SpectrumRow>, SpectraError> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |what: &str| SpectraError::Csv(what.to_string());
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| SpectraError::Csv(e.to_string()))?;
        if rec.len() != CSV_HEADER.len() {
            return Err(bad("wrong column count"));
        }
        let int = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(&format!("bad integer {:?}", &rec[i])));
        let bits = int(5)? as u32;
        let mu = BigReal::parse(&rec[3], bits)?;
        let ln_abs_mu = match &rec[4] {
            "ZERO" => None,
            s => Some(BigReal::parse(s, bits)?),
        };
        rows.push(SpectrumRow {
            l: int(0)?,
            m: int(1)?,
            n: int(2)?,
            mu,
            ln_abs_mu,
            precision_bits: bits,
        });
    }
    Ok(rows)
}
