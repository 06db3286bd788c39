//! Defining distributions as finite sums of shifted Dirac derivatives and
//! exponential-polynomial tails, with the algebra the other modules need.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, Poly};
use crate::testfn::quadrature::decay_cutoff;
use crate::testfn::{integrate, QuadratureSpec, TestFunction, TestShape};

pub const DEFAULT_MAX_DIRAC_ORDER: usize = 16;

/// `coeff · δ^{(order)}(t - loc)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracTerm {
    pub coeff: Complex64,
    pub loc: f64,
    pub order: usize,
}

impl DiracTerm {
    pub fn new(coeff: impl Into<Complex64>, loc: f64, order: usize) -> Self {
        Self {
            coeff: coeff.into(),
            loc,
            order,
        }
    }
}

/// `t ↦ p(t) e^{rate·t} 𝟙[t ≥ start]`; `start = -∞` gives a two-sided tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolyTerm {
    pub poly: Vec<Complex64>,
    pub rate: Complex64,
    pub start: f64,
}

impl ExpPolyTerm {
    pub fn new(poly: Vec<Complex64>, rate: impl Into<Complex64>, start: f64) -> Self {
        Self {
            poly,
            rate: rate.into(),
            start,
        }
    }

    /// `e^{rate·t} 𝟙[t ≥ 0]`
    pub fn causal_exp(rate: impl Into<Complex64>) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)], rate, 0.0)
    }

    pub fn value(&self, t: f64) -> Complex64 {
        if t < self.start {
            return Complex64::new(0.0, 0.0);
        }
        poly::eval(&self.poly, t) * (self.rate * t).exp()
    }

    fn abs_coeffs(&self) -> Vec<f64> {
        self.poly.iter().map(|c| c.norm()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Kernel {
    dirac: Vec<DiracTerm>,
    regular: Vec<ExpPolyTerm>,
    max_dirac_order: usize,
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for d in &self.dirac {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})·δ^({})[{}]", d.coeff, d.order, d.loc)?;
        }
        for r in &self.regular {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "poly{:?}·exp({}t)·H(t-{})", r.poly.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>(), r.rate, r.start)?;
        }
        Ok(())
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

impl Kernel {
    /// Validates and normalizes: Dirac terms with identical `(loc, order)` are
    /// merged, exact zeros dropped, terms sorted.
    pub fn new(dirac: Vec<DiracTerm>, regular: Vec<ExpPolyTerm>) -> Result<Self> {
        Self::with_max_order(dirac, regular, DEFAULT_MAX_DIRAC_ORDER)
    }

    pub fn with_max_order(dirac: Vec<DiracTerm>, regular: Vec<ExpPolyTerm>, max_dirac_order: usize) -> Result<Self> {
        for d in &dirac {
            if !finite(d.coeff) || !d.loc.is_finite() {
                return Err(Error::validation(format!("Dirac term has non-finite data: {d:?}")));
            }
            if d.order > max_dirac_order {
                return Err(Error::validation(format!(
                    "Dirac order {} exceeds the configured maximum {max_dirac_order}",
                    d.order
                )));
            }
        }
        for r in &regular {
            if r.poly.is_empty() || !r.poly.iter().all(|&c| finite(c)) || !finite(r.rate) {
                return Err(Error::validation(format!("regular term has empty or non-finite data: {r:?}")));
            }
            if r.start.is_nan() || r.start == f64::INFINITY {
                return Err(Error::validation(format!("regular term start {} is invalid", r.start)));
            }
        }
        Ok(Self::normalized(dirac, regular, max_dirac_order))
    }

    fn normalized(dirac: Vec<DiracTerm>, regular: Vec<ExpPolyTerm>, max_dirac_order: usize) -> Self {
        let mut merged: Vec<DiracTerm> = Vec::with_capacity(dirac.len());
        let mut dirac = dirac;
        dirac.sort_by(|a, b| cmp_f64(a.loc, b.loc).then(a.order.cmp(&b.order)));
        for d in dirac {
            match merged.last_mut() {
                Some(last) if last.loc == d.loc && last.order == d.order => last.coeff += d.coeff,
                _ => merged.push(d),
            }
        }
        merged.retain(|d| d.coeff != Complex64::new(0.0, 0.0));

        let mut regular = regular;
        regular.sort_by(|a, b| {
            cmp_f64(a.start, b.start)
                .then(cmp_f64(a.rate.re, b.rate.re))
                .then(cmp_f64(a.rate.im, b.rate.im))
        });
        let mut rmerged: Vec<ExpPolyTerm> = Vec::with_capacity(regular.len());
        for r in regular {
            match rmerged.last_mut() {
                Some(last) if last.start == r.start && last.rate == r.rate => {
                    last.poly = poly::add(&last.poly, &r.poly)
                }
                _ => rmerged.push(r),
            }
        }
        let rmerged = rmerged
            .into_iter()
            .map(|mut r| {
                r.poly = poly::trim(r.poly);
                r
            })
            .filter(|r| !poly::is_zero(&r.poly))
            .collect();

        let max_dirac_order = merged.iter().map(|d| d.order).max().unwrap_or(0).max(max_dirac_order);
        Self {
            dirac: merged,
            regular: rmerged,
            max_dirac_order,
        }
    }

    pub fn zero() -> Self {
        Self::normalized(vec![], vec![], DEFAULT_MAX_DIRAC_ORDER)
    }

    /// `coeff · δ^{(order)}(t - loc)`
    pub fn dirac(coeff: impl Into<Complex64>, loc: f64, order: usize) -> Result<Self> {
        Self::new(vec![DiracTerm::new(coeff, loc, order)], vec![])
    }

    pub fn exp_poly(term: ExpPolyTerm) -> Result<Self> {
        Self::new(vec![], vec![term])
    }

    pub fn dirac_terms(&self) -> &[DiracTerm] {
        &self.dirac
    }

    pub fn regular_terms(&self) -> &[ExpPolyTerm] {
        &self.regular
    }

    pub fn max_dirac_order(&self) -> usize {
        self.max_dirac_order
    }

    pub fn is_zero(&self) -> bool {
        self.dirac.is_empty() && self.regular.is_empty()
    }

    /// Highest derivative order actually present among Dirac terms.
    pub fn dirac_order(&self) -> usize {
        self.dirac.iter().map(|d| d.order).max().unwrap_or(0)
    }

    /// False when some regular term grows (`Re[rate] > 0`), i.e. the kernel is not of slow growth.
    pub fn is_tempered(&self) -> bool {
        self.regular.iter().all(|r| r.rate.re <= 0.0 && r.start.is_finite())
    }

    pub fn scale(&self, k: impl Into<Complex64>) -> Self {
        let k = k.into();
        Self::normalized(
            self.dirac
                .iter()
                .map(|d| DiracTerm { coeff: d.coeff * k, ..*d })
                .collect(),
            self.regular
                .iter()
                .map(|r| ExpPolyTerm {
                    poly: poly::scale(&r.poly, k),
                    ..r.clone()
                })
                .collect(),
            self.max_dirac_order,
        )
    }

    pub fn add(&self, other: &Kernel) -> Self {
        Self::normalized(
            self.dirac.iter().chain(&other.dirac).copied().collect(),
            self.regular.iter().chain(&other.regular).cloned().collect(),
            self.max_dirac_order.max(other.max_dirac_order),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Minimum over Dirac locations and regular starts; `+∞` for the zero kernel.
    pub fn support_lower_bound(&self) -> f64 {
        self.dirac
            .iter()
            .map(|d| d.loc)
            .chain(self.regular.iter().map(|r| r.start))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_causal(&self) -> bool {
        self.support_lower_bound() >= 0.0
    }

    /// Real Dirac coefficients, and regular terms that are real or pair up with
    /// their exact conjugates.
    pub fn is_real(&self) -> bool {
        if self.dirac.iter().any(|d| d.coeff.im != 0.0) {
            return false;
        }
        let is_real_term = |r: &ExpPolyTerm| r.rate.im == 0.0 && r.poly.iter().all(|c| c.im == 0.0);
        let conj_of = |a: &ExpPolyTerm, b: &ExpPolyTerm| {
            a.start == b.start
                && a.rate == b.rate.conj()
                && a.poly.len() == b.poly.len()
                && a.poly.iter().zip(&b.poly).all(|(x, y)| *x == y.conj())
        };
        let mut used = vec![false; self.regular.len()];
        for i in 0..self.regular.len() {
            if used[i] {
                continue;
            }
            if is_real_term(&self.regular[i]) {
                used[i] = true;
                continue;
            }
            let partner = (i + 1..self.regular.len()).find(|&j| !used[j] && conj_of(&self.regular[i], &self.regular[j]));
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }

    /// `Ỹ = Y - Σ_j (-1)^j c_j δ^{(2j)}`.
    pub fn tilde_transform(&self, c: &[f64]) -> Self {
        let extra: Vec<DiracTerm> = c
            .iter()
            .enumerate()
            .map(|(j, &cj)| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                DiracTerm::new(-sign * cj, 0.0, 2 * j)
            })
            .collect();
        let max_order = self.max_dirac_order.max(2 * c.len().saturating_sub(1));
        Self::normalized(
            self.dirac.iter().copied().chain(extra).collect(),
            self.regular.clone(),
            max_order,
        )
    }

    /// Closed-form convolution within the Dirac + exp-poly class.
    pub fn convolve(&self, other: &Kernel) -> Result<Self> {
        let mut dirac = Vec::new();
        let mut regular = Vec::new();
        for a in &self.dirac {
            for b in &other.dirac {
                dirac.push(DiracTerm::new(a.coeff * b.coeff, a.loc + b.loc, a.order + b.order));
            }
            for r in &other.regular {
                let (ds, rt) = dirac_conv_exp(a, r);
                dirac.extend(ds);
                regular.push(rt);
            }
        }
        for r in &self.regular {
            for b in &other.dirac {
                let (ds, rt) = dirac_conv_exp(b, r);
                dirac.extend(ds);
                regular.push(rt);
            }
            for s in &other.regular {
                regular.extend(exp_conv_exp(r, s)?);
            }
        }
        let max_order = dirac
            .iter()
            .map(|d| d.order)
            .max()
            .unwrap_or(0)
            .max(self.max_dirac_order)
            .max(other.max_dirac_order);
        Ok(Self::normalized(dirac, regular, max_order))
    }

    /// `ψ(ξ) = ⟨Y, t ↦ φ(ξ - t)⟩`.
    pub fn apply(&self, phi: &TestFunction, xi: f64, q: &QuadratureSpec) -> Result<Complex64> {
        self.apply_derivative(phi, xi, 0, q)
    }

    /// `ψ^{(j)}(ξ)`: Dirac orders are raised by `j`, and for regular terms the
    /// derivative is moved onto `φ` under the integral.
    pub fn apply_derivative(&self, phi: &TestFunction, xi: f64, j: usize, q: &QuadratureSpec) -> Result<Complex64> {
        let need = self.dirac_order() + j;
        if need > phi.max_order {
            return Err(Error::validation(format!(
                "test function supports derivatives up to {}, kernel needs {need}",
                phi.max_order
            )));
        }
        let mut total: Complex64 = self
            .dirac
            .iter()
            .map(|d| d.coeff * phi.eval_unchecked(xi - d.loc, d.order + j))
            .sum();
        for r in &self.regular {
            total += regular_action(r, phi, xi, j, q)?;
        }
        Ok(total)
    }

    /// Right end of `supp ψ` for a test function supported up to `phi_hi`,
    /// with exponentially decaying tails cut where they fall below `tol`.
    /// `None` when some tail does not decay.
    pub(crate) fn response_end(&self, phi_hi: f64, tol: f64) -> Option<f64> {
        let mut end = self
            .dirac
            .iter()
            .map(|d| phi_hi + d.loc)
            .fold(f64::NEG_INFINITY, f64::max);
        for r in &self.regular {
            if r.rate.re >= 0.0 {
                return None;
            }
            let from = phi_hi + r.start.max(0.0);
            end = end.max(decay_cutoff(&r.abs_coeffs(), -r.rate.re, from, tol).max(from));
        }
        Some(end)
    }
}

/// `∫ r(τ) φ^{(j)}(ξ - τ) dτ` over the overlap of the supports.
fn regular_action(r: &ExpPolyTerm, phi: &TestFunction, xi: f64, j: usize, q: &QuadratureSpec) -> Result<Complex64> {
    let (phi_lo, phi_hi) = phi.support();
    let lo = r.start.max(xi - phi_hi);
    let inner = q.inner();
    let f = |tau: f64| Ok(r.value(tau) * phi.eval_unchecked(xi - tau, j));
    if phi_lo.is_finite() {
        let hi = xi - phi_lo;
        if lo >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if !lo.is_finite() {
            return Err(Error::Unsupported("two-sided tail against a left-unbounded test function".into()));
        }
        return integrate(f, lo, hi, &inner);
    }
    // Exponential window: φ(ξ-τ) = e^{s(ξ-τ)} for large τ, so the integrand
    // decays like e^{(Re λ - Re s) τ}.
    let TestShape::ExpWindow(w) = &phi.shape else {
        unreachable!("only exponential windows are left-unbounded")
    };
    let decay = w.s.re - r.rate.re;
    if decay <= 0.0 || !lo.is_finite() {
        return Err(Error::numeric(
            format!("regular term with rate {} is unbounded against probe s = {}", r.rate, w.s),
            f64::INFINITY,
        ));
    }
    let prefactor = w.s.norm().max(1.0).powi(j as i32) * (w.s.re * xi).exp() * ((r.rate.re - w.s.re) * lo).exp();
    let coeffs: Vec<f64> = r.abs_coeffs().iter().map(|c| c * prefactor).collect();
    let hi = decay_cutoff(&coeffs, decay, lo, q.abs_tol * 1e-3).max(lo + 1.0);
    integrate(f, lo, hi, &inner)
}

/// `D^i(p e^{λt}) = q_i e^{λt}` with `q_{i+1} = q_i' + λ q_i`.
fn exp_poly_derivatives(p: &[Complex64], rate: Complex64, count: usize) -> Vec<Poly> {
    let mut out = Vec::with_capacity(count + 1);
    let mut q = p.to_vec();
    out.push(q.clone());
    for _ in 0..count {
        q = poly::add(&poly::derivative(&q), &poly::scale(&q, rate));
        out.push(q.clone());
    }
    out
}

/// `α δ_x^{(m)} * p e^{λt} H(t-a)`: the distributional `m`-th derivative
/// (jump terms at `a` included), translated by `x`.
fn dirac_conv_exp(d: &DiracTerm, r: &ExpPolyTerm) -> (Vec<DiracTerm>, ExpPolyTerm) {
    let m = d.order;
    let qs = exp_poly_derivatives(&r.poly, r.rate, m);
    let mut jumps = Vec::new();
    if r.start.is_finite() {
        for (i, qi) in qs.iter().enumerate().take(m) {
            let g = poly::eval(qi, r.start) * (r.rate * r.start).exp();
            jumps.push(DiracTerm::new(d.coeff * g, r.start + d.loc, m - 1 - i));
        }
    }
    let shifted = poly::shift(&qs[m], d.loc);
    let factor = d.coeff * (-r.rate * d.loc).exp();
    (
        jumps,
        ExpPolyTerm::new(poly::scale(&shifted, factor), r.rate, r.start + d.loc),
    )
}

/// Antiderivative of `τ^j e^{μτ}` as `e^{μτ} R_j(τ)` (`μ ≠ 0`).
fn exp_moment_antiderivative(j: usize, mu: Complex64) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); j + 1];
    // Σ_r (-1)^r j!/(j-r)! τ^{j-r} / μ^{r+1}
    let mut falling = 1.0;
    for r in 0..=j {
        if r > 0 {
            falling *= (j + 1 - r) as f64;
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        out[j - r] += sign * falling / mu.powu(r as u32 + 1);
    }
    out
}

/// `(p1 e^{λ1 t} H(t-a1)) * (p2 e^{λ2 t} H(t-a2))` in closed form.
fn exp_conv_exp(r1: &ExpPolyTerm, r2: &ExpPolyTerm) -> Result<Vec<ExpPolyTerm>> {
    if !(r1.start.is_finite() && r2.start.is_finite()) {
        return Err(Error::Unsupported(
            "convolution of two regular terms needs both supports bounded below".into(),
        ));
    }
    let (a1, a2) = (r1.start, r2.start);
    let zero = Complex64::new(0.0, 0.0);
    // B(t, τ) = p1(τ) p2(t - τ) = Σ B[i][j] t^i τ^j
    let deg1 = r1.poly.len() - 1;
    let deg2 = r2.poly.len() - 1;
    let mut b = vec![vec![zero; deg1 + deg2 + 1]; deg2 + 1];
    for (n, &c2) in r2.poly.iter().enumerate() {
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let w = c2 * (poly::binomial(n, k) * sign);
            for (l, &c1) in r1.poly.iter().enumerate() {
                b[n - k][k + l] += w * c1;
            }
        }
    }
    let start = a1 + a2;
    let mu = r1.rate - r2.rate;
    let t_pow = |i: usize| {
        let mut p = vec![zero; i + 1];
        p[i] = Complex64::new(1.0, 0.0);
        p
    };
    if mu == zero {
        // ∫ τ^j dτ = τ^{j+1}/(j+1)
        let mut acc: Poly = vec![zero];
        for (i, row) in b.iter().enumerate() {
            for (j, &bij) in row.iter().enumerate() {
                if bij == zero {
                    continue;
                }
                let mut upper = vec![zero; j + 2];
                upper[j + 1] = Complex64::new(1.0, 0.0);
                let upper = poly::shift(&upper, a2);
                let mut diff = poly::scale(&upper, Complex64::new(1.0 / (j + 1) as f64, 0.0));
                diff[0] -= Complex64::new(a1.powi(j as i32 + 1) / (j + 1) as f64, 0.0);
                acc = poly::add(&acc, &poly::scale(&poly::mul(&t_pow(i), &diff), bij));
            }
        }
        return Ok(vec![ExpPolyTerm::new(acc, r2.rate, start)]);
    }
    let mut upper_acc: Poly = vec![zero];
    let mut lower_acc: Poly = vec![zero];
    for (i, row) in b.iter().enumerate() {
        for (j, &bij) in row.iter().enumerate() {
            if bij == zero {
                continue;
            }
            let rj = exp_moment_antiderivative(j, mu);
            let up = poly::shift(&rj, a2);
            upper_acc = poly::add(&upper_acc, &poly::scale(&poly::mul(&t_pow(i), &up), bij));
            let low = poly::eval(&rj, a1);
            lower_acc = poly::add(&lower_acc, &poly::scale(&t_pow(i), bij * low));
        }
    }
    Ok(vec![
        ExpPolyTerm::new(poly::scale(&upper_acc, (-mu * a2).exp()), r1.rate, start),
        ExpPolyTerm::new(poly::scale(&lower_acc, -(mu * a1).exp()), r2.rate, start),
    ])
}

// ---------------------------------------------------------------------------
// Kernel spec file

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiracSpec {
    coeff: [f64; 2],
    loc: f64,
    order: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegularSpec {
    poly: Vec<[f64; 2]>,
    rate: [f64; 2],
    /// `null` encodes a two-sided tail
    start: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct KernelSpec {
    #[serde(default)]
    dirac: Vec<DiracSpec>,
    #[serde(default)]
    regular: Vec<RegularSpec>,
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Kernel {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: KernelSpec = serde_json::from_str(text)?;
        Self::new(
            spec.dirac
                .iter()
                .map(|d| DiracTerm::new(cx(d.coeff), d.loc, d.order))
                .collect(),
            spec.regular
                .iter()
                .map(|r| {
                    ExpPolyTerm::new(
                        r.poly.iter().copied().map(cx).collect(),
                        cx(r.rate),
                        r.start.unwrap_or(f64::NEG_INFINITY),
                    )
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let spec = KernelSpec {
            dirac: self
                .dirac
                .iter()
                .map(|d| DiracSpec {
                    coeff: [d.coeff.re, d.coeff.im],
                    loc: d.loc,
                    order: d.order,
                })
                .collect(),
            regular: self
                .regular
                .iter()
                .map(|r| RegularSpec {
                    poly: r.poly.iter().map(|c| [c.re, c.im]).collect(),
                    rate: [r.rate.re, r.rate.im],
                    start: r.start.is_finite().then_some(r.start),
                })
                .collect(),
        };
        serde_json::to_string(&spec).expect("kernel spec serializes")
    }

    /// Stable hex digest of the normalized kernel.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let hash = Sha256::digest(self.to_json().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
