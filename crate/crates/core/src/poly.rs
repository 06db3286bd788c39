//! Dense complex polynomials in ascending coefficient order.

use num_complex::Complex64;

pub(crate) type Poly = Vec<Complex64>;

pub(crate) fn eval(p: &[Complex64], t: f64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
}

pub(crate) fn derivative(p: &[Complex64]) -> Poly {
    if p.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(n, &c)| c * n as f64)
        .collect()
}

pub(crate) fn add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default()
        })
        .collect()
}

pub(crate) fn scale(p: &[Complex64], k: Complex64) -> Poly {
    p.iter().map(|&c| c * k).collect()
}

pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `t ↦ p(t - x)`.
pub(crate) fn shift(p: &[Complex64], x: f64) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len().max(1)];
    for (n, &c) in p.iter().enumerate() {
        // (t - x)^n = sum_k C(n,k) t^k (-x)^(n-k)
        for (k, slot) in out.iter_mut().enumerate().take(n + 1) {
            *slot += c * binomial(n, k) * (-x).powi((n - k) as i32);
        }
    }
    out
}

pub(crate) fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Complex64::new(0.0, 0.0));
    }
    p
}

pub(crate) fn is_zero(p: &[Complex64]) -> bool {
    p.iter().all(|c| *c == Complex64::new(0.0, 0.0))
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
