//! SVG figures, JSON export of spectra and hashed output manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coeffs::cache::atomic_write;
use crate::dist::StepDistribution;
use crate::mpnum::{BigReal, MpError};
use crate::spectra::{split, LogSpectrum, SpectrumRecord, SplitPolicy};

#[derive(Debug, Error)]
pub enum FigError {
    #[error("nothing to plot")]
    Empty,
    #[error("invalid figure config: {0}")]
    Config(String),
    #[error("manifest entry {path}: {reason}")]
    Manifest { path: String, reason: String },
    #[error(transparent)]
    Mp(#[from] MpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug)]
pub struct FigureConfig {
    pub width: u32,
    pub height: u32,
    /// Fixed data ranges; `None` fits the data.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub marker_size: f64,
    pub title: Option<String>,
    pub output: Option<PathBuf>,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            width: 1200,
            height: 800,
            x_range: None,
            y_range: None,
            marker_size: 2.0,
            title: None,
            output: None,
        }
    }
}

impl FigureConfig {
    pub fn validate(&self) -> Result<(), FigError> {
        if self.width == 0 || self.height == 0 {
            return Err(FigError::Config("dimensions must be positive".into()));
        }
        for (name, r) in [("x", self.x_range), ("y", self.y_range)] {
            if let Some((a, b)) = r {
                if !a.is_finite() || !b.is_finite() || a >= b {
                    return Err(FigError::Config(format!("{name} range [{a}, {b}] is not a finite interval")));
                }
            }
        }
        if !(self.marker_size > 0.0) {
            return Err(FigError::Config("marker size must be positive".into()));
        }
        Ok(())
    }

    /// Writes `svg` to the configured output, if any.
    pub fn save(&self, svg: &str) -> Result<(), FigError> {
        if let Some(p) = &self.output {
            atomic_write(p, svg.as_bytes())?;
        }
        Ok(())
    }
}

pub const MARGIN: f64 = 60.0;

/// Maps data coordinates to SVG pixels inside a fixed margin; `y` grows upward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn new(x: (f64, f64), y: (f64, f64), width: u32, height: u32) -> Self {
        Frame {
            x,
            y,
            width: width as f64,
            height: height as f64,
        }
    }

    pub fn to_px(&self, x: f64, y: f64) -> (f64, f64) {
        let w = self.width - 2.0 * MARGIN;
        let h = self.height - 2.0 * MARGIN;
        (
            MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * w,
            self.height - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * h,
        )
    }

    pub fn from_px(&self, px: f64, py: f64) -> (f64, f64) {
        let w = self.width - 2.0 * MARGIN;
        let h = self.height - 2.0 * MARGIN;
        (
            self.x.0 + (px - MARGIN) / w * (self.x.1 - self.x.0),
            self.y.0 + (self.height - MARGIN - py) / h * (self.y.1 - self.y.0),
        )
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|s| s * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open_svg(cfg: &FigureConfig, frame: &Frame, xlabel: &str, ylabel: &str) -> String {
    let (w, h) = (cfg.width, cfg.height);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    if let Some(t) = &cfg.title {
        let _ = writeln!(s, "<title>{}</title>", escape(t));
    }
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let (x0, y0) = frame.to_px(frame.x.0, frame.y.0);
    let (x1, y1) = frame.to_px(frame.x.1, frame.y.1);
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" fill="none"><rect x="{x0:.3}" y="{y1:.3}" width="{:.3}" height="{:.3}"/></g>"#,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(s, r#"<g class="ticks" font-family="sans-serif" font-size="12" fill="black">"#);
    for t in ticks(frame.x.0, frame.x.1) {
        let (px, _) = frame.to_px(t, frame.y.0);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.3}" y1="{y0:.3}" x2="{px:.3}" y2="{:.3}" stroke="black"/><text x="{px:.3}" y="{:.3}" text-anchor="middle">{t}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    for t in ticks(frame.y.0, frame.y.1) {
        let (_, py) = frame.to_px(frame.x.0, t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{py:.3}" x2="{x0:.3}" y2="{py:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{t}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        h as f64 - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.3}" text-anchor="middle" transform="rotate(-90 15 {:.3})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
    s.push_str("</g>\n");
    s
}

/// Frame used by [`render_spectra`] for these spectra.
pub fn spectra_frame(spectra: &[LogSpectrum], cfg: &FigureConfig) -> Frame {
    let pts = spectra.iter().flat_map(|s| s.points.iter().map(BigReal::to_f64));
    let (lo, hi) = pts.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (mlo, mhi) = spectra
        .iter()
        .fold((usize::MAX, 0), |(a, b), s| (a.min(s.m), b.max(s.m)));
    let x = cfg.x_range.unwrap_or_else(|| if lo.is_finite() { padded(lo, hi) } else { (-1.0, 1.0) });
    let y = cfg.y_range.unwrap_or((mlo as f64 - 0.5, mhi as f64 + 0.5));
    Frame::new(x, y, cfg.width, cfg.height)
}

/// Scatter of `(ln|mu|, m)`, one circle per nonzero eigenvalue. With a
/// policy, markers carry class `electron` or `train`; otherwise `point`.
pub fn render_spectra(spectra: &[LogSpectrum], policy: Option<SplitPolicy>, cfg: &FigureConfig) -> Result<String, FigError> {
    cfg.validate()?;
    if spectra.is_empty() {
        return Err(FigError::Empty);
    }
    let frame = spectra_frame(spectra, cfg);
    let mut s = open_svg(cfg, &frame, "ln|mu|", "m");
    s.push_str("<g class=\"markers\">\n");
    for ls in spectra {
        let classes: Vec<&str> = match policy.and_then(|p| split(ls, p).ok()) {
            Some(sp) => std::iter::repeat("electron")
                .take(sp.electrons.len())
                .chain(std::iter::repeat("train").take(sp.trains.len()))
                .collect(),
            None => vec!["point"; ls.points.len()],
        };
        for (p, class) in ls.points.iter().zip(classes) {
            let x = p.to_f64();
            let (px, py) = frame.to_px(x, ls.m as f64);
            let fill = match class {
                "electron" => "#1f77b4",
                "train" => "#d62728",
                _ => "#333333",
            };
            let _ = writeln!(
                s,
                r#"<circle class="{class}" cx="{px:.3}" cy="{py:.3}" r="{}" fill="{fill}" data-x="{x:e}" data-m="{}"/>"#,
                cfg.marker_size, ls.m
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

/// Frame used by [`render_distribution`].
pub fn distribution_frame(dist: &StepDistribution, cfg: &FigureConfig) -> Frame {
    let pts = dist.points();
    let x = cfg.x_range.unwrap_or_else(|| {
        if pts.is_empty() {
            (-1.0, 1.0)
        } else {
            padded(pts[0].to_f64(), pts[pts.len() - 1].to_f64())
        }
    });
    let y = cfg.y_range.unwrap_or((0.0, 1.0));
    Frame::new(x, y, cfg.width, cfg.height)
}

/// Right-continuous step plot of `F` as a single `M ... L ...` path.
pub fn render_distribution(dist: &StepDistribution, cfg: &FigureConfig) -> Result<String, FigError> {
    cfg.validate()?;
    if dist.is_empty() {
        return Err(FigError::Empty);
    }
    let frame = distribution_frame(dist, cfg);
    let mut s = open_svg(cfg, &frame, "x", &format!("F_{{{},{}}}(x)", dist.l, dist.m));
    let mut d = String::new();
    let (px, py) = frame.to_px(frame.x.0, 0.0);
    let _ = write!(d, "M {px:.3} {py:.3}");
    let mut level = 0.0;
    for (x, mass) in dist.jumps() {
        let x = x.to_f64();
        let (px, py) = frame.to_px(x, level);
        let _ = write!(d, " L {px:.3} {py:.3}");
        level += mass.to_f64();
        let (px, py) = frame.to_px(x, level);
        let _ = write!(d, " L {px:.3} {py:.3}");
    }
    let (px, py) = frame.to_px(frame.x.1, level);
    let _ = write!(d, " L {px:.3} {py:.3}");
    let _ = writeln!(s, r##"<path class="step" d="{d}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##);
    s.push_str("</svg>\n");
    Ok(s)
}

/// JSON form of a [`SpectrumRecord`]; every number is a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub l: usize,
    pub m: usize,
    pub function: String,
    pub precision_bits: u32,
    pub target_digits: u32,
    pub det: String,
    pub eigenvalues: Vec<String>,
}

impl From<&SpectrumRecord> for SpectrumJson {
    fn from(r: &SpectrumRecord) -> Self {
        SpectrumJson {
            l: r.l,
            m: r.m,
            function: r.function.clone(),
            precision_bits: r.precision_used,
            target_digits: r.target_digits,
            det: r.det.to_decimal(),
            eigenvalues: r.eigenvalues.iter().map(BigReal::to_decimal).collect(),
        }
    }
}

impl SpectrumJson {
    pub fn to_record(&self) -> Result<SpectrumRecord, FigError> {
        let p = self.precision_bits;
        Ok(SpectrumRecord {
            l: self.l,
            m: self.m,
            function: self.function.clone(),
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|s| BigReal::parse(s, p))
                .collect::<Result<_, _>>()?,
            det: BigReal::parse(&self.det, p)?,
            precision_used: p,
            target_digits: self.target_digits,
        })
    }
}

pub fn records_to_json(records: &[SpectrumRecord]) -> String {
    let v: Vec<SpectrumJson> = records.iter().map(SpectrumJson::from).collect();
    serde_json::to_string_pretty(&v).expect("records serialize")
}

pub fn records_from_json(text: &str) -> Result<Vec<SpectrumRecord>, FigError> {
    let v: Vec<SpectrumJson> = serde_json::from_str(text)?;
    v.iter().map(SpectrumJson::to_record).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
}

/// Inventory of one run's outputs with content hashes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub function: String,
    pub function_hash: String,
    pub l: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub precision_policy: String,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> Result<String, FigError> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

impl Manifest {
    pub fn new(function: &str, function_hash: &str, l: Vec<usize>, m_grid: Vec<usize>, precision_policy: &str) -> Self {
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            function: function.to_string(),
            function_hash: function_hash.to_string(),
            l,
            m_grid,
            precision_policy: precision_policy.to_string(),
            files: Vec::new(),
        }
    }

    /// Hashes `root/rel` and records it; re-adding a path replaces its entry.
    pub fn add_file(&mut self, root: &Path, rel: &str) -> Result<(), FigError> {
        let sha256 = sha256_file(&root.join(rel))?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256,
        });
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), FigError> {
        atomic_write(path, serde_json::to_string_pretty(self)?.as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FigError> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    /// Fails on the first missing or altered file under `root`.
    pub fn verify(&self, root: &Path) -> Result<(), FigError> {
        for f in &self.files {
            let p = root.join(&f.path);
            if !p.exists() {
                return Err(FigError::Manifest {
                    path: f.path.clone(),
                    reason: "missing".into(),
                });
            }
            if sha256_file(&p)? != f.sha256 {
                return Err(FigError::Manifest {
                    path: f.path.clone(),
                    reason: "hash mismatch".into(),
                });
            }
        }
        Ok(())
    }
}
