#![allow(dead_code)]

use rug::{Complete, Integer, Rational};

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(a: &[Vec<Integer>]) -> Integer {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = Integer::new();
    for j in 0..n {
        if a[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<Integer>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = Integer::from(&a[0][j] * cofactor_det(&minor));
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn catalan(k: usize) -> Integer {
    Integer::binomial_u(2 * k as u32, k as u32).complete() / (k as u32 + 1)
}

/// Characteristic polynomial `det(xI - A)`, coefficients low to high.
pub fn char_poly(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mul = |x: &[Vec<Rational>], y: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(Rational::new(), |acc, k| acc + Rational::from(&x[i][k] * &y[k][j])))
                    .collect()
            })
            .collect()
    };
    let mut c = vec![Rational::new(); n + 1];
    c[n] = Rational::from(1);
    let mut mk: Vec<Vec<Rational>> = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        for i in 0..n {
            mk[i][i] += &c[n - k + 1];
        }
        let am = mul(a, &mk);
        let tr = (0..n).fold(Rational::new(), |acc, i| acc + &am[i][i]);
        c[n - k] = -tr / Rational::from(k as u32);
        mk = am;
    }
    c
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - db;
        let q = Rational::from(r.last().unwrap() / b.last().unwrap());
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= Rational::from(&q * bc);
        }
        r.pop();
        r = trim(r);
        if r.len() <= db {
            break;
        }
    }
    trim(r)
}

fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let dp: Vec<Rational> = p.iter().enumerate().skip(1).map(|(i, c)| Rational::from(c * i as u32)).collect();
    let mut chain = vec![p.to_vec(), trim(dp)];
    loop {
        let n = chain.len();
        if chain[n - 1].len() == 1 {
            break;
        }
        let r: Vec<Rational> = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if r.len() == 1 && r[0] == 0 {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| eval(p, x).cmp0() as i32)
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// All real roots of a square-free polynomial with only real roots,
/// ascending, each located by bisection on Sturm counts to width `2^-bits`.
pub fn real_roots(p: &[Rational], bits: u32) -> Vec<Rational> {
    let lead = p.last().unwrap().clone();
    let bound: Rational = p.iter().fold(Rational::from(1), |acc, c| {
        let r = Rational::from(c / &lead).abs();
        if r > acc { r } else { acc }
    }) + 1;
    let chain = sturm_chain(p);
    let lo0 = -bound.clone();
    let below = |x: &Rational| sign_changes(&chain, &lo0) - sign_changes(&chain, x);
    let deg = p.len() - 1;
    let eps = Rational::from((1, Integer::from(1) << bits));
    (1..=deg)
        .map(|k| {
            let (mut lo, mut hi) = (lo0.clone(), bound.clone());
            while Rational::from(&hi - &lo) > eps {
                let mid = Rational::from(&lo + &hi) / 2;
                if below(&mid) >= k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        })
        .collect()
}
