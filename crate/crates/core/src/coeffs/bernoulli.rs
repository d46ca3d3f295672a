use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{Float, Integer, Rational};

/// `B_2, B_4, ..., B_{2n}` as exact rationals (Brent–Harvey tangent-number
/// recurrence, integer arithmetic only).
pub fn bernoulli_even(n: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().expect("bernoulli cache poisoned");
    if guard.len() < n {
        *guard = compute(n.max(2 * guard.len()));
    }
    guard[..n].to_vec()
}

fn compute(n: usize) -> Vec<Rational> {
    if n == 0 {
        return Vec::new();
    }
    // tangent numbers T_1..T_n
    let mut t: Vec<Integer> = vec![Integer::new(); n + 1];
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = Integer::from(&t[j - 1] * (j - k) as u32);
            let b = Integer::from(&t[j] * (j - k + 2) as u32);
            t[j] = a + b;
        }
    }
    (1..=n)
        .map(|k| {
            // B_2k = (-1)^(k-1) 2k T_k / (2^2k (2^2k - 1))
            let four_k = Integer::from(1) << (2 * k as u32);
            let den = Integer::from(&four_k * Integer::from(&four_k - 1u32));
            let mut num = Integer::from(&t[k] * (2 * k) as u32);
            if k % 2 == 0 {
                num = -num;
            }
            Rational::from((num, den))
        })
        .collect()
}

/// `B_2k / (2k)!` for `k = 1..=n`, rounded to `prec` bits and memoized per
/// precision.
pub fn em_coefficients(n: usize, prec: u32) -> Vec<Float> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Float>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().expect("coefficient cache poisoned");
        if let Some(v) = guard.get(&prec) {
            if v.len() >= n {
                return v[..n].to_vec();
            }
        }
    }
    let len = n.max(16);
    let b = bernoulli_even(len);
    let mut fact = Integer::from(1);
    let mut out = Vec::with_capacity(len);
    for (i, bk) in b.iter().enumerate() {
        let k = (i + 1) as u32;
        fact *= (2 * k - 1) * (2 * k);
        let q = Rational::from(bk / Rational::from(fact.clone()));
        out.push(Float::with_val(prec, &q));
    }
    let mut guard = cache.lock().expect("coefficient cache poisoned");
    let v = guard.entry(prec).or_default();
    if v.len() < out.len() {
        *v = out;
    }
    v[..n].to_vec()
}

/// `B_2k / (2k (2k-1))` for the Stirling series.
pub fn stirling_coefficients(n: usize, prec: u32) -> Vec<Float> {
    bernoulli_even(n)
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = (i + 1) as u32;
            let q = Rational::from(b / Rational::from(2 * k * (2 * k - 1)));
            Float::with_val(prec, &q)
        })
        .collect()
}
