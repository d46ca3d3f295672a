//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{catalan, cofactor_det};
use muspec::coeffs::{generate, zeta_em, CoeffStream, FunctionSpec};
use muspec::dist::{sup_distance, StepDistribution};
use muspec::hankel::{build_m, det_relation_check};
use muspec::harness::{check_2a_2b, check_2c, check_2d, check_2e, est_rate, version6_gap, DEFAULT_DELTA};
use muspec::mpnum::{det_lu, sym_eigenvalues, ten_pow_neg, BigComplex, BigReal, RealMatrix};
use muspec::spectra::{
    compute_spectrum, log_spectrum, pairing_stats, split, sweep, write_csv, SpectrumOptions, SpectrumRecord,
    SplitPolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Criterion depends on input that is not available; nothing asserted.
    Conditional(String),
}

type Check = fn(&mut Shared) -> Outcome;

#[derive(Default)]
struct Shared {
    records: Vec<SpectrumRecord>,
    sweep: Vec<SpectrumRecord>,
    sweep_time: Option<Duration>,
}

fn rel_ok(got: &BigReal, want: &BigReal, digits: u32) -> bool {
    got.rel_close(want, &ten_pow_neg(got.prec().max(want.prec()), digits))
}

fn criterion_1(_: &mut Shared) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let prec = 256;
    let mut worst = 0.0f64;
    for t in 0..200 {
        let n = rng.gen_range(1..=32);
        let mut vals = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..=1.0);
                vals[i * n + j] = v;
                vals[j * n + i] = v;
            }
        }
        let a = RealMatrix::from_fn(n, |i, j| BigReal::from_f64(prec, vals[i * n + j])).unwrap();
        let eig = match sym_eigenvalues(&a, prec, &ten_pow_neg(prec, 70)) {
            Ok(e) => e,
            Err(e) => return Outcome::Fail(format!("matrix {t} (n = {n}): {e}")),
        };
        let sq = eig.eigenvalues.iter().fold(BigReal::zero(prec), |acc, v| &acc + &(v * v));
        let det = det_lu(&a, prec).unwrap();
        for (name, got, want) in [
            ("trace", eig.sum(), a.trace(prec)),
            ("frobenius", sq, a.frobenius_sq(prec)),
            ("det", eig.product(), det),
        ] {
            let rel = (&(&got - &want) / &want).abs().to_f64();
            worst = worst.max(rel);
            if !rel_ok(&got, &want, 40) {
                return Outcome::Fail(format!("matrix {t} (n = {n}): {name} relative error {rel:e}"));
            }
        }
    }
    let el = start.elapsed();
    if el > Duration::from_secs(120) {
        return Outcome::Fail(format!("identities hold but took {el:?} (> 2 min)"));
    }
    Outcome::Pass(format!("200 matrices, worst relative error {worst:e}, {el:.1?}"))
}

fn criterion_2(_: &mut Shared) -> Outcome {
    for n in 1..=12usize {
        if n <= 8 {
            let exact: Vec<Vec<_>> = (0..n).map(|i| (0..n).map(|j| catalan(i + j)).collect()).collect();
            if cofactor_det(&exact) != 1 {
                return Outcome::Fail(format!("cofactor oracle gives != 1 at n = {n}"));
            }
        }
        let a = RealMatrix::from_fn(n, |i, j| BigReal::from(Float::with_val(256, &catalan(i + j)))).unwrap();
        let d = det_lu(&a, 256).unwrap();
        if !rel_ok(&d, &BigReal::one(256), 50) {
            return Outcome::Fail(format!("n = {n}: det = {d}"));
        }
    }
    Outcome::Pass("det [C_(i+j)] = 1 to 1e-50 for n = 1..12, cofactor oracle for n <= 8".into())
}

fn zeta_star_stream(n: usize) -> CoeffStream {
    generate(&FunctionSpec::zeta_star_placeholder(), n, 320).unwrap()
}

fn criterion_3(sh: &mut Shared) -> Outcome {
    let mut streams: Vec<CoeffStream> = ["exponential", "catalan", "rational2:1,2", "geometric:2"]
        .iter()
        .map(|f| generate(&f.parse().unwrap(), 51, 320).unwrap())
        .collect();
    streams.push(zeta_star_stream(51));
    let mut count = 0;
    for s in &streams {
        for l in 1..=3 {
            for m in [1usize, 2, 7, 16, 33, 48] {
                let rec = match compute_spectrum(s, l, m, 30) {
                    Ok(r) => r,
                    Err(e) => return Outcome::Fail(format!("{} l={l} m={m}: {e}", s.spec.name)),
                };
                let h = build_m(s, l, m).unwrap();
                let det = det_lu(&h.matrix, rec.precision_used + 64).unwrap();
                let prod = rec.product();
                let ok = if det.is_zero() || prod.is_zero() {
                    let scale = h.matrix.frobenius(rec.precision_used).pow_i(m as i32);
                    (&prod - &det).abs() <= &ten_pow_neg(rec.precision_used, 30) * &scale
                } else {
                    rel_ok(&prod, &det, 30)
                };
                if !ok {
                    return Outcome::Fail(format!("{} l={l} m={m}: prod {prod} vs det {det}", s.spec.name));
                }
                count += 1;
                sh.records.push(rec);
            }
        }
    }
    Outcome::Pass(format!("{count} records over 5 families, l = 1..3, m <= 48"))
}

fn criterion_4(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut n = 0;
    for _ in 0..20 {
        let vals: Vec<String> = (0..16).map(|_| format!("{:.6}", rng.gen_range(-1.0..1.0))).collect();
        let refs: Vec<&str> = vals.iter().map(String::as_str).collect();
        let s = generate(&FunctionSpec::user_moments(&refs), 15, 256).unwrap();
        for m in 1..=10 {
            let l = rng.gen_range(1..=5);
            let r = det_relation_check(&s, l, m, 256).unwrap();
            if !r.holds {
                return Outcome::Fail(format!("l={l} m={m}: relative error {}", r.relative_error));
            }
            n += 1;
        }
    }
    Outcome::Pass(format!("{n} random (stream, l, m) cases, m <= 10, to 1e-30"))
}

fn criterion_5(sh: &mut Shared) -> Outcome {
    if sh.records.is_empty() {
        return Outcome::Fail("no records (criterion 3 did not run)".into());
    }
    let mut n = 0;
    let mut worst = 0.0f64;
    for rec in &sh.records {
        let ls = log_spectrum(rec);
        if ls.zero_count != 0 {
            continue;
        }
        let gap = version6_gap(rec, &StepDistribution::from_log_spectrum(&ls)).to_f64();
        worst = worst.max(gap);
        if gap > 1e-25 {
            return Outcome::Fail(format!("{} l={} m={}: gap {gap:e}", rec.function, rec.l, rec.m));
        }
        n += 1;
    }
    Outcome::Pass(format!("{n} zero-free records, worst gap {worst:e}"))
}

fn criterion_6(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for w in [0.5, 2.0, 3.7] {
        for _ in 0..10 {
            let dets: Vec<(usize, BigReal)> = (1..=64)
                .map(|m| {
                    let eps: f64 = rng.gen_range(-1e-6..=1e-6);
                    let r = BigReal::from_f64(256, 0.9) + BigReal::from_f64(256, eps);
                    (m, &BigReal::from_f64(256, w).pow_i(m as i32) * &r)
                })
                .collect();
            let rep = est_rate(&dets).unwrap();
            let got: f64 = rep.limit.unwrap().parse().unwrap();
            worst = worst.max((got - w).abs());
            if (got - w).abs() > 1e-3 {
                return Outcome::Fail(format!("W = {w}: estimate {got}"));
            }
        }
    }
    Outcome::Pass(format!("30 noisy fixtures, worst |estimate - W| = {worst:e}"))
}

fn ensure_sweep(sh: &mut Shared) {
    if sh.sweep.is_empty() {
        let t = Instant::now();
        let s = zeta_star_stream(64);
        let recs = sweep(&s, 1, 1..=64, 30, 4, &SpectrumOptions::default());
        sh.sweep = recs.into_iter().filter_map(|e| e.result.ok()).collect();
        sh.sweep_time = Some(t.elapsed());
    }
}

fn criterion_7(sh: &mut Shared) -> Outcome {
    ensure_sweep(sh);
    let ls: Vec<_> = sh.sweep.iter().map(log_spectrum).collect();
    let (a, b) = check_2a_2b(&ls, DEFAULT_DELTA);
    let m64 = ls.iter().find(|s| s.m == 64);
    let pairing = m64
        .and_then(|s| split(s, SplitPolicy::LargestGap).ok())
        .and_then(|sp| pairing_stats(&sp.trains.iter().map(BigReal::to_f64).collect::<Vec<_>>()).ok())
        .map_or(f64::NAN, |p| p.ratio);
    let dists: Vec<StepDistribution> = ls
        .iter()
        .filter(|s| s.m.is_power_of_two())
        .map(StepDistribution::from_log_spectrum)
        .collect();
    let c = check_2c(&dists);
    let d = check_2d(&dists);
    let s2 = zeta_star_stream(65);
    let mut cross = dists.clone();
    for m in [32usize, 64] {
        let rec = compute_spectrum(&s2, 2, m, 30).unwrap();
        cross.push(StepDistribution::from_log_spectrum(&log_spectrum(&rec)));
    }
    let e = check_2e(&cross.into_iter().filter(|x| x.m >= 32).collect::<Vec<_>>()).unwrap();
    let f = |x: &muspec::harness::TrendReport| x.verdict.to_string();
    let d1 = dists.iter().find(|x| x.m == 32).zip(dists.iter().find(|x| x.m == 64)).map(|(x, y)| sup_distance(x, y));
    Outcome::Conditional(format!(
        "companion zeta* formula not transcribed; placeholder (s-1)zeta(s), m <= 64: 2A {} 2B {} pairing(64) {pairing:.3} 2C {} 2D {} 2E {} sup(F32,F64) {:?}",
        f(&a),
        f(&b),
        f(&c),
        f(&d),
        f(&e),
        d1
    ))
}

fn criterion_8(_: &mut Shared) -> Outcome {
    let prec = 256;
    let z = |s: f64| zeta_em(&BigComplex::new(prec, s, 0.0), prec).unwrap().re_big();
    let pi = BigReal::pi(prec);
    let cases = [
        ("zeta(2)", z(2.0), BigReal::parse("1.6449340668482264364724151666460251892189499012068", prec).unwrap(), 49),
        ("zeta(3)", z(3.0), BigReal::parse("1.2020569031595942853997381615114499907649862923405", prec).unwrap(), 49),
        ("zeta(2) = pi^2/6", z(2.0), &(&pi * &pi) / &BigReal::from_i64(prec, 6), 70),
        ("zeta(0)", z(0.0), BigReal::from_ratio(prec, -1, 2), 70),
        ("zeta(-1)", z(-1.0), BigReal::from_ratio(prec, -1, 12), 70),
    ];
    for (name, got, want, digits) in cases {
        if !rel_ok(&got, &want, digits) {
            return Outcome::Fail(format!("{name} = {got}"));
        }
    }
    Outcome::Pass("zeta(2), zeta(3) to 50 digits; zeta(0), zeta(-1) to 1e-70 at 256 bits".into())
}

fn criterion_9(sh: &mut Shared) -> Outcome {
    ensure_sweep(sh);
    let first = sh.sweep_time.unwrap();
    if sh.sweep.len() != 64 {
        return Outcome::Fail(format!("only {} of 64 spectra succeeded", sh.sweep.len()));
    }
    let mut a = Vec::new();
    write_csv(&sh.sweep, &mut a).unwrap();
    let s = zeta_star_stream(64);
    let again: Vec<_> = sweep(&s, 1, 1..=64, 30, 1, &SpectrumOptions::default())
        .into_iter()
        .map(|e| e.result.unwrap())
        .collect();
    let mut b = Vec::new();
    write_csv(&again, &mut b).unwrap();
    if a != b {
        return Outcome::Fail("CSV differs between runs".into());
    }
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if first > Duration::from_secs(600) {
        return Outcome::Fail(format!("sweep took {first:?} on {cores} core(s)"));
    }
    Outcome::Pass(format!(
        "l=1 m=1..64 at 320 bits in {first:.1?} on {cores} core(s) with 4 workers; jobs=4 and jobs=1 CSV byte-identical ({} bytes)",
        a.len()
    ))
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("1 eigensolver identities", criterion_1),
        ("2 Catalan Hankel determinants", criterion_2),
        ("3 eigenvalue product = det M", criterion_3),
        ("4 Hankel/Toeplitz sign identity", criterion_4),
        ("5 version 6 vs 3' consistency", criterion_5),
        ("6 rate estimator fixtures", criterion_6),
        ("7 qualitative figure reproduction", criterion_7),
        ("8 zeta evaluator", criterion_8),
        ("9 sweep performance and determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut shared = Shared::default();
    let mut failed = 0;
    for (name, f) in checks {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut shared)))
            .unwrap_or_else(|p| Outcome::Fail(format!("panic: {:?}", p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())))));
        match outcome {
            Outcome::Pass(msg) => println!("criterion {name}: PASS ({msg})"),
            Outcome::Fail(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg})");
            }
            Outcome::Conditional(msg) => println!("criterion {name}: CONDITIONAL, not asserted ({msg})"),
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
