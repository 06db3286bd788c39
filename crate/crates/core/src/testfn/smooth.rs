//! Closed-form derivatives of the `exp(-1/u)` glue function and the bump and
//! cutoff profiles built from it.
//!
//! With `v = 1/u`, every derivative of `f(u) = exp(-1/u)` has the form
//! `P_m(v) exp(-v)` where `P_0 = 1` and `P_{m+1}(v) = v^2 (P_m(v) - P_m'(v))`.

use std::sync::OnceLock;

use crate::poly::binomial;

/// Highest derivative order the profile tables are built for.
pub const MAX_PROFILE_ORDER: usize = 64;

fn glue_polys() -> &'static [Vec<f64>] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(MAX_PROFILE_ORDER + 1);
        let mut p = vec![1.0];
        table.push(p.clone());
        for _ in 0..MAX_PROFILE_ORDER {
            // q = p - p'
            let mut q = p.clone();
            for n in 1..p.len() {
                q[n - 1] -= n as f64 * p[n];
            }
            let mut next = vec![0.0; q.len() + 2];
            next[2..].copy_from_slice(&q);
            p = next;
            table.push(p.clone());
        }
        table
    })
}

/// Beyond this exponent every profile term is below `exp(-LOG_CUTOFF)` times a
/// polynomial factor and is treated as zero.
const LOG_CUTOFF: f64 = 700.0;

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `d^m/du^m exp(-1/u)`, zero for `u <= 0`.
pub fn glue(u: f64, m: usize) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let v = 1.0 / u;
    if v > LOG_CUTOFF {
        return 0.0;
    }
    horner(&glue_polys()[m], v) * (-v).exp()
}

/// `d^n/du^n [e^4 f(u) f(1-u)]` on `(0,1)`, zero elsewhere.
pub fn bump(u: f64, n: usize) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let v = 1.0 / u;
    let w = 1.0 / (1.0 - u);
    if v + w > LOG_CUTOFF {
        return 0.0;
    }
    let table = glue_polys();
    let sum: f64 = (0..=n)
        .map(|k| {
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            binomial(n, k) * sign * horner(&table[k], v) * horner(&table[n - k], w)
        })
        .sum();
    // exp(4) normalizes the peak at u = 1/2 to one
    sum * (4.0 - v - w).exp()
}

/// Derivatives `0..=n` of the falling cutoff `f(1-u) / (f(u) + f(1-u))`:
/// 1 for `u <= 0`, 0 for `u >= 1`.
pub fn cutoff_derivatives(u: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if u <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if u >= 1.0 {
        return out;
    }
    // numerator N(u) = f(1-u), denominator D(u) = f(u) + f(1-u)
    let num: Vec<f64> = (0..=n)
        .map(|m| if m % 2 == 0 { 1.0 } else { -1.0 } * glue(1.0 - u, m))
        .collect();
    let den: Vec<f64> = (0..=n).map(|m| glue(u, m) + num[m]).collect();
    let mut recip = vec![0.0; n + 1];
    recip[0] = 1.0 / den[0];
    for m in 1..=n {
        let s: f64 = (0..m).map(|k| binomial(m, k) * recip[k] * den[m - k]).sum();
        recip[m] = -s / den[0];
    }
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = (0..=m).map(|k| binomial(m, k) * num[k] * recip[m - k]).sum();
    }
    out
}
