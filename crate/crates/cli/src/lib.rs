//! Command-line front end: `muspec <coeffs|spectrum|sweep|dist|check|figure>`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use muspec::coeffs::{generate_cached, CoeffCache, CoeffStream, FunctionSpec};
use muspec::dist::StepDistribution;
use muspec::figio::{self, FigureConfig, Manifest};
use muspec::harness::{self, ReferenceConstants, TrendReport, Verdict, DEFAULT_DELTA};
use muspec::spectra::{self, log_spectrum, SpectrumOptions, SpectrumRecord, SplitPolicy};
use muspec::BigReal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTRADICTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "muspec", version, about = "mu-spectra of signed Hankel matrices of Taylor coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Function spec, e.g. zeta-star, geometric:1, exponential, catalan, rational2:A,B
    #[arg(long, global = true, default_value = "zeta-star")]
    pub func: String,
    /// Shift l; comma separated for cross-l checks
    #[arg(long, global = true, value_delimiter = ',', default_value = "1")]
    pub l: Vec<usize>,
    /// Matrix size for single-m commands
    #[arg(long, global = true, default_value_t = 8)]
    pub m: usize,
    /// Largest m for sweeps and checks
    #[arg(long, global = true, default_value_t = 16)]
    pub m_max: usize,
    /// Target eigenvalue digits
    #[arg(long, global = true, default_value_t = 30)]
    pub digits: u32,
    /// Precision cap in bits
    #[arg(long, global = true, default_value_t = 8192)]
    pub prec_cap: u32,
    /// Split policy: largest-gap, threshold:C or quantile:Q
    #[arg(long, global = true, default_value = "largest-gap")]
    pub policy: String,
    /// JSON file with per-l constants W_l
    #[arg(long, global = true)]
    pub wl_file: Option<PathBuf>,
    /// Coefficient cache directory
    #[arg(long, global = true, env = "MUSPEC_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate or extend a coefficient stream and print theta_0..theta_n
    Coeffs {
        /// Highest index; defaults to max(l) + m-max - 1
        #[arg(long)]
        n: Option<usize>,
    },
    /// Spectrum of M_{l,m}
    Spectrum,
    /// Spectra for m = 1..m-max
    Sweep,
    /// Distribution function F_{l,m}
    Dist,
    /// Run one check and print its report
    Check {
        #[arg(value_enum)]
        id: CheckId,
        /// Growth threshold for 2A/2B
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
    /// Render an SVG figure
    Figure {
        #[arg(value_enum)]
        kind: FigureKind,
        #[arg(long, default_value_t = 1200)]
        width: u32,
        #[arg(long, default_value_t = 800)]
        height: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckId {
    #[value(name = "2A")]
    C2A,
    #[value(name = "2B")]
    C2B,
    #[value(name = "2C")]
    C2C,
    #[value(name = "2D")]
    C2D,
    #[value(name = "2E")]
    C2E,
    #[value(name = "v2")]
    V2,
    #[value(name = "v3")]
    V3,
    #[value(name = "v5")]
    V5,
    #[value(name = "v6")]
    V6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    Spectra,
    Distribution,
}

type CliResult<T> = Result<T, String>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// Coefficient precision for a target digit count.
pub fn coeff_bits(digits: u32) -> u32 {
    320.max((digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64)
}

struct Ctx<'a> {
    cli: &'a Cli,
    spec: FunctionSpec,
    opts: SpectrumOptions,
}

impl<'a> Ctx<'a> {
    fn new(cli: &'a Cli) -> CliResult<Self> {
        if cli.l.is_empty() || cli.l.contains(&0) {
            return Err("--l values must be positive".into());
        }
        if cli.m == 0 || cli.m_max == 0 {
            return Err("--m and --m-max must be positive".into());
        }
        let spec: FunctionSpec = cli.func.parse().map_err(e)?;
        Ok(Ctx {
            cli,
            spec,
            opts: SpectrumOptions {
                cap_bits: cli.prec_cap,
                ..SpectrumOptions::default()
            },
        })
    }

    fn l(&self) -> usize {
        self.cli.l[0]
    }

    fn stream(&self, n: usize) -> CliResult<CoeffStream> {
        let cache = match &self.cli.cache_dir {
            Some(d) => Some(CoeffCache::new(d).map_err(e)?),
            None => None,
        };
        generate_cached(&self.spec, n, coeff_bits(self.cli.digits), cache.as_ref()).map_err(e)
    }

    fn records(&self, l: usize, ms: &[usize]) -> CliResult<Vec<SpectrumRecord>> {
        let top = *ms.iter().max().expect("nonempty grid");
        let stream = self.stream(l + top - 1)?;
        let entries = spectra::sweep(&stream, l, ms.iter().copied(), self.cli.digits, self.cli.jobs, &self.opts);
        let mut out = Vec::new();
        for entry in entries {
            out.push(entry.result.map_err(|x| format!("l = {l}, m = {}: {x}", entry.m))?);
        }
        Ok(out)
    }

    fn policy(&self) -> CliResult<SplitPolicy> {
        self.cli.policy.parse().map_err(e)
    }

    fn constants(&self) -> CliResult<Option<ReferenceConstants>> {
        self.cli
            .wl_file
            .as_deref()
            .map(|p| ReferenceConstants::load(p).map_err(e))
            .transpose()
    }

    fn emit(&self, out: &mut dyn Write, body: &[u8]) -> CliResult<()> {
        match &self.cli.out {
            Some(p) => fs::write(p, body).map_err(|x| format!("{}: {x}", p.display())),
            None => out.write_all(body).map_err(e),
        }
    }

    fn format(&self, allowed: &[Format]) -> CliResult<Format> {
        let f = self.cli.format.unwrap_or(allowed[0]);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(format!("format {f:?} not supported here"))
        }
    }

    fn write_manifest(&self, ms: Vec<usize>) -> CliResult<()> {
        let Some(path) = &self.cli.out else { return Ok(()) };
        let root = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path.file_name().and_then(|n| n.to_str()).ok_or("bad output path")?;
        let mut mf = Manifest::new(
            &self.spec.name,
            &self.spec.hash(),
            self.cli.l.clone(),
            ms,
            &format!(
                "coeff_bits={} digits={} start=256 cap={}",
                coeff_bits(self.cli.digits),
                self.cli.digits,
                self.cli.prec_cap
            ),
        );
        mf.add_file(root, name).map_err(e)?;
        mf.write(&root.join(format!("{name}.manifest.json"))).map_err(e)
    }
}

fn dyadic_grid(m_max: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |m| m.checked_mul(2))
        .take_while(|m| *m <= m_max)
        .collect()
}

fn spectra_body(records: &[SpectrumRecord], fmt: Format) -> CliResult<Vec<u8>> {
    Ok(match fmt {
        Format::Json => figio::records_to_json(records).into_bytes(),
        _ => {
            let mut buf = Vec::new();
            spectra::write_csv(records, &mut buf).map_err(e)?;
            buf
        }
    })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let ctx = Ctx::new(cli)?;
    match &cli.command {
        Command::Coeffs { n } => {
            let max_l = *cli.l.iter().max().unwrap();
            let n = n.unwrap_or(max_l + cli.m_max - 1);
            let s = ctx.stream(n)?;
            let body = match ctx.format(&[Format::Csv, Format::Json])? {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "function": s.spec.name,
                    "hash": s.spec.hash(),
                    "provenance": s.provenance,
                    "precision_bits": s.precision_bits,
                    "theta": s.values().iter().map(BigReal::to_decimal).collect::<Vec<_>>(),
                }))
                .map_err(e)?,
                _ => {
                    let mut t = String::from("k,theta\n");
                    for (k, v) in s.values().iter().enumerate() {
                        t.push_str(&format!("{k},{}\n", v.to_decimal()));
                    }
                    t
                }
            };
            ctx.emit(out, body.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Spectrum => {
            let recs = ctx.records(ctx.l(), &[cli.m])?;
            let body = spectra_body(&recs, ctx.format(&[Format::Csv, Format::Json])?)?;
            ctx.emit(out, &body)?;
            Ok(EXIT_OK)
        }
        Command::Sweep => {
            let fmt = ctx.format(&[Format::Csv, Format::Json])?;
            let ms: Vec<usize> = (1..=cli.m_max).collect();
            let mut all = Vec::new();
            for &l in &cli.l {
                all.extend(ctx.records(l, &ms)?);
            }
            ctx.emit(out, &spectra_body(&all, fmt)?)?;
            ctx.write_manifest(ms)?;
            Ok(EXIT_OK)
        }
        Command::Dist => {
            let rec = ctx.records(ctx.l(), &[cli.m])?.remove(0);
            let d = StepDistribution::from_log_spectrum(&log_spectrum(&rec));
            let body = match ctx.format(&[Format::Csv, Format::Json])? {
                Format::Json => {
                    let t = d.tail_sums();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "l": d.l,
                        "m": d.m,
                        "points": d.points().iter().map(BigReal::to_decimal).collect::<Vec<_>>(),
                        "missing_mass": d.missing_mass().to_string(),
                        "mean": d.mean().to_decimal(),
                        "tail_neg": t.neg.to_decimal(),
                        "tail_pos": t.pos.to_decimal(),
                    }))
                    .map_err(e)?
                    .into_bytes()
                }
                _ => {
                    let mut buf = Vec::new();
                    d.write_csv(&mut buf).map_err(e)?;
                    buf
                }
            };
            ctx.emit(out, &body)?;
            Ok(EXIT_OK)
        }
        Command::Check { id, delta } => {
            let report = run_check(&ctx, *id, *delta)?;
            let mut body = report.to_json();
            body.push('\n');
            ctx.emit(out, body.as_bytes())?;
            Ok(if report.verdict == Verdict::Contradicted {
                EXIT_CONTRADICTED
            } else {
                EXIT_OK
            })
        }
        Command::Figure { kind, width, height } => {
            ctx.format(&[Format::Svg])?;
            let cfg = FigureConfig {
                width: *width,
                height: *height,
                title: Some(format!("{} l={}", ctx.spec.name, ctx.l())),
                ..FigureConfig::default()
            };
            let (svg, ms) = match kind {
                FigureKind::Spectra => {
                    let ms: Vec<usize> = (1..=cli.m_max).collect();
                    let ls: Vec<_> = ctx.records(ctx.l(), &ms)?.iter().map(log_spectrum).collect();
                    (figio::render_spectra(&ls, Some(ctx.policy()?), &cfg).map_err(e)?, ms)
                }
                FigureKind::Distribution => {
                    let rec = ctx.records(ctx.l(), &[cli.m])?.remove(0);
                    let d = StepDistribution::from_log_spectrum(&log_spectrum(&rec));
                    (figio::render_distribution(&d, &cfg).map_err(e)?, vec![cli.m])
                }
            };
            ctx.emit(out, svg.as_bytes())?;
            ctx.write_manifest(ms)?;
            Ok(EXIT_OK)
        }
    }
}

fn dets_of(records: &[SpectrumRecord]) -> Vec<(usize, BigReal)> {
    records.iter().map(|r| (r.m, r.det.clone())).collect()
}

fn dists_of(records: &[SpectrumRecord]) -> Vec<StepDistribution> {
    records
        .iter()
        .map(|r| StepDistribution::from_log_spectrum(&log_spectrum(r)))
        .collect()
}

fn run_check(ctx: &Ctx, id: CheckId, delta: f64) -> CliResult<TrendReport> {
    let cli = ctx.cli;
    let l = ctx.l();
    let full: Vec<usize> = (1..=cli.m_max).collect();
    let w = ctx.constants()?.and_then(|c| c.w(l, coeff_bits(cli.digits)));
    let report = match id {
        CheckId::V2 => match &w {
            None => TrendReport::unavailable("v2", "W_l"),
            Some(w) => harness::est_constant(&dets_of(&ctx.records(l, &full)?), w).map_err(e)?,
        },
        CheckId::V3 => {
            let dets = dets_of(&ctx.records(l, &full)?);
            match &w {
                Some(w) => harness::est_rate_against(&dets, w),
                None => harness::est_rate(&dets),
            }
            .map_err(e)?
        }
        CheckId::V5 => harness::check_version5(&ctx.records(l, &full)?).map_err(e)?,
        CheckId::V6 => harness::check_version6(&dists_of(&ctx.records(l, &full)?), w.as_ref()).map_err(e)?,
        CheckId::C2A | CheckId::C2B => {
            let ls: Vec<_> = ctx.records(l, &full)?.iter().map(log_spectrum).collect();
            let (a, b) = harness::check_2a_2b(&ls, delta);
            if id == CheckId::C2A {
                a
            } else {
                b
            }
        }
        CheckId::C2C => harness::check_2c(&dists_of(&ctx.records(l, &dyadic_grid(cli.m_max))?)),
        CheckId::C2D => harness::check_2d(&dists_of(&ctx.records(l, &dyadic_grid(cli.m_max))?)),
        CheckId::C2E => {
            let grid = dyadic_grid(cli.m_max);
            let mut all = Vec::new();
            for &l in &cli.l {
                all.extend(dists_of(&ctx.records(l, &grid)?));
            }
            harness::check_2e(&all).map_err(e)?
        }
    };
    Ok(if report.l.is_empty() { report.with_l(&[l]) } else { report })
}
