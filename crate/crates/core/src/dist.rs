//! Empirical step distributions `F_{l,m}` over logarithmic spectra.

use std::cmp::Ordering;
use std::io::Write;

use rug::{Float, Rational};

use crate::mpnum::BigReal;
use crate::spectra::LogSpectrum;

/// Right-continuous step function with a jump of `1/m` at each point.
#[derive(Clone, Debug)]
pub struct StepDistribution {
    pub l: usize,
    pub m: usize,
    points: Vec<BigReal>,
    pub warning: Option<String>,
}

/// Finite-m tail integrals `(1/m) sum_{x<0} x` and `(1/m) sum_{x>0} x`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSums {
    pub neg: BigReal,
    pub pos: BigReal,
}

impl StepDistribution {
    /// `points` need not be sorted; `m` must be at least `points.len()`.
    pub fn new(l: usize, m: usize, mut points: Vec<BigReal>) -> Self {
        assert!(m >= points.len() && m > 0, "m = {m} below point count {}", points.len());
        points.sort_by(BigReal::total_cmp);
        let warning = points
            .is_empty()
            .then(|| "no nonzero eigenvalues; zero measure".to_string());
        StepDistribution { l, m, points, warning }
    }

    pub fn from_log_spectrum(ls: &LogSpectrum) -> Self {
        let d = StepDistribution::new(ls.l, ls.m, ls.points.clone());
        if let Some(w) = &d.warning {
            log::warn!("distribution l={} m={}: {w}", ls.l, ls.m);
        }
        d
    }

    pub fn points(&self) -> &[BigReal] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        Rational::from((self.points.len(), self.m))
    }

    /// Mass lost to excluded zero eigenvalues; never renormalized away.
    pub fn missing_mass(&self) -> Rational {
        Rational::from((self.m - self.points.len(), self.m))
    }

    /// Distinct jump locations with their masses.
    pub fn jumps(&self) -> Vec<(BigReal, Rational)> {
        let mut out: Vec<(BigReal, usize)> = Vec::new();
        for p in &self.points {
            match out.last_mut() {
                Some((x, c)) if x == p => *c += 1,
                _ => out.push((p.clone(), 1)),
            }
        }
        out.into_iter()
            .map(|(x, c)| (x, Rational::from((c, self.m))))
            .collect()
    }

    /// Number of points `<= x`.
    pub fn count_le(&self, x: &BigReal) -> usize {
        self.points.partition_point(|p| p.total_cmp(x) != Ordering::Greater)
    }

    pub fn evaluate_exact(&self, x: &BigReal) -> Rational {
        Rational::from((self.count_le(x), self.m))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let prec = self.points.first().map_or(64, BigReal::prec);
        self.evaluate_exact(&BigReal::from_f64(prec, x)).to_f64()
    }

    fn prec(&self) -> u32 {
        self.points.iter().map(BigReal::prec).max().unwrap_or(64)
    }

    pub fn tail_sums(&self) -> TailSums {
        let prec = self.prec();
        let mut neg = Float::new(prec);
        let mut pos = Float::new(prec);
        for p in &self.points {
            match p.signum() {
                -1 => neg += p.as_float(),
                1 => pos += p.as_float(),
                _ => {}
            }
        }
        TailSums {
            neg: BigReal::from(neg / self.m as u64),
            pos: BigReal::from(pos / self.m as u64),
        }
    }

    /// `int x dF`, taken as the sum of the two tail sums.
    pub fn mean(&self) -> BigReal {
        let t = self.tail_sums();
        &t.neg + &t.pos
    }

    /// Sorted distinct jumps with cumulative values, as `x,count,cumulative`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "count", "cumulative"])?;
        let mut seen = 0usize;
        for (x, mass) in self.jumps() {
            seen += (mass * Rational::from(self.m)).numer().to_usize().unwrap_or(0);
            let cum = Rational::from((seen, self.m));
            w.write_record([x.to_decimal(), seen.to_string(), format!("{}", cum.to_f64())])?;
        }
        w.flush()
    }
}

/// Exact Kolmogorov-Smirnov distance `sup_x |F(x) - G(x)|` as a rational.
pub fn sup_distance_exact(f: &StepDistribution, g: &StepDistribution) -> Rational {
    let (a, b) = (&f.points, &g.points);
    let (mf, mg) = (f.m as u64, g.m as u64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: u128 = 0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => {
                if p.total_cmp(q) == Ordering::Greater {
                    q
                } else {
                    p
                }
            }
            (Some(p), None) => p,
            (None, Some(q)) => q,
            (None, None) => unreachable!(),
        };
        let x = x.clone();
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let lhs = i as u128 * mg as u128;
        let rhs = j as u128 * mf as u128;
        best = best.max(lhs.abs_diff(rhs));
    }
    Rational::from((best, mf as u128 * mg as u128))
}

pub fn sup_distance(f: &StepDistribution, g: &StepDistribution) -> f64 {
    sup_distance_exact(f, g).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: usize, pts: &[f64]) -> StepDistribution {
        StepDistribution::new(1, m, pts.iter().map(|&x| BigReal::from_f64(128, x)).collect())
    }

    #[test]
    fn construction() {
        let two = d(2, &[-1.0, 3.0]);
        let j = two.jumps();
        assert_eq!(j.len(), 2);
        assert!(j.iter().all(|(_, w)| *w == Rational::from((1, 2))));

        let empty = d(1, &[]);
        assert_eq!(empty.missing_mass(), 1);
        assert!(empty.warning.is_some());

        let coincide = d(2, &[0.0, 0.0]);
        assert_eq!(coincide.jumps(), vec![(BigReal::zero(128), Rational::from(1))]);
    }

    #[test]
    fn evaluation() {
        let f = d(2, &[-1.0, 1.0]);
        assert_eq!(f.evaluate(-5.0), 0.0);
        assert_eq!(f.evaluate(5.0), 1.0);
        assert_eq!(f.evaluate(0.0), 0.5);
        assert_eq!(f.evaluate(1.0), 1.0);
    }

    #[test]
    fn means_and_tails() {
        let f = d(2, &[-1.0, 1.0]);
        assert!(f.mean().is_zero());
        let t = f.tail_sums();
        assert_eq!(t.neg.to_f64(), -0.5);
        assert_eq!(t.pos.to_f64(), 0.5);

        let g = d(2, &[2f64.ln(), 8f64.ln()]);
        assert!((g.mean().to_f64() - 4f64.ln()).abs() < 1e-15);
        assert!(g.tail_sums().neg.is_zero());
    }

    #[test]
    fn distances() {
        let f = d(2, &[0.0, 1.0]);
        assert_eq!(sup_distance_exact(&f, &f), 0);
        assert_eq!(sup_distance(&d(1, &[0.0]), &d(1, &[1.0])), 1.0);
        assert_eq!(sup_distance_exact(&f, &d(1, &[0.0])), Rational::from((1, 2)));
    }

    #[test]
    fn missing_mass_keeps_distance_honest() {
        let f = d(2, &[0.0]);
        let g = d(1, &[0.0]);
        assert_eq!(sup_distance_exact(&f, &g), Rational::from((1, 2)));
    }

    #[test]
    fn csv_cumulative() {
        let mut buf = Vec::new();
        d(4, &[0.0, 0.0, 1.0]).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,count,cumulative");
        assert!(lines[1].ends_with(",2,0.5"));
        assert!(lines[2].ends_with(",3,0.75"));
    }
}
