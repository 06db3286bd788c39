//! Smooth test functions with exact derivatives, the default probing corpus,
//! and the quadrature engine used by the time-domain checks.

pub mod quadrature;
pub mod smooth;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DEFAULT_MAX_DIRAC_ORDER;
use crate::poly;
pub use quadrature::{integrate, integrate_real, QuadratureSpec};

/// Default largest `N` the time-domain checks are prepared for.
pub const DEFAULT_MAX_N: usize = 4;

/// `2·maxN + maxDiracOrder`.
pub const DEFAULT_MAX_DERIVATIVE: usize = 2 * DEFAULT_MAX_N + DEFAULT_MAX_DIRAC_ORDER;

/// Polynomial times a normalized `C∞` bump on `[left, right]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpPoly {
    pub poly: Vec<Complex64>,
    pub left: f64,
    pub right: f64,
}

/// `e^{sξ}` on `(-∞, flat_end]`, smoothly cut to zero on `[flat_end, cut_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpWindow {
    pub s: Complex64,
    pub flat_end: f64,
    pub cut_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TestShape {
    BumpPoly(BumpPoly),
    ExpWindow(ExpWindow),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub label: String,
    pub shape: TestShape,
    pub max_order: usize,
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl TestFunction {
    pub fn bump_poly(poly: Vec<Complex64>, left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(Error::validation(format!("bump support [{left}, {right}] is not a proper interval")));
        }
        if poly.is_empty() || poly.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::validation("bump polynomial must be non-empty with finite coefficients"));
        }
        Ok(Self {
            label: format!("bump[{left},{right}]deg{}", poly.len() - 1),
            shape: TestShape::BumpPoly(BumpPoly { poly, left, right }),
            max_order: DEFAULT_MAX_DERIVATIVE,
        })
    }

    /// Bump whose polynomial is given in the local coordinate
    /// `y = (x - center) / halfwidth ∈ [-1, 1]`.
    pub fn bump_local(local: &[Complex64], left: f64, right: f64) -> Result<Self> {
        let center = 0.5 * (left + right);
        let half = 0.5 * (right - left);
        let scaled: Vec<Complex64> = local
            .iter()
            .enumerate()
            .map(|(n, &c)| c / half.powi(n as i32))
            .collect();
        Self::bump_poly(poly::shift(&scaled, center), left, right)
    }

    pub fn exp_window(s: Complex64, flat_end: f64, cut_end: f64) -> Result<Self> {
        if !(s.re > 0.0 && s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::validation(format!("exponential window needs Re[s] > 0, got {s}")));
        }
        if !(flat_end.is_finite() && cut_end.is_finite() && flat_end < cut_end) {
            return Err(Error::validation("exponential window needs flat_end < cut_end"));
        }
        Ok(Self {
            label: format!("expwin(s={}{:+}i,[{flat_end},{cut_end}])", s.re, s.im),
            shape: TestShape::ExpWindow(ExpWindow { s, flat_end, cut_end }),
            max_order: DEFAULT_MAX_DERIVATIVE,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order.min(smooth::MAX_PROFILE_ORDER);
        self
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.shape, TestShape::BumpPoly(_))
    }

    /// Closed support; the left end is `-∞` for exponential windows.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            TestShape::BumpPoly(b) => (b.left, b.right),
            TestShape::ExpWindow(w) => (f64::NEG_INFINITY, w.cut_end),
        }
    }

    /// Finite left end used for integration: exact for bumps, and for windows
    /// the point below which `∫|φ|²` is less than `tol`.
    pub fn integration_start(&self, tol: f64) -> f64 {
        match &self.shape {
            TestShape::BumpPoly(b) => b.left,
            TestShape::ExpWindow(w) => {
                let two_re = 2.0 * w.s.re;
                // scale covers |s|^{2j} weights of derivative terms
                let scale = w.s.norm().max(1.0).powi(2 * DEFAULT_MAX_N as i32);
                w.flat_end.min(0.0) + ((tol * two_re) / scale).ln() / two_re
            }
        }
    }

    /// Interval the default horizon grid spans.
    pub fn horizon_span(&self) -> (f64, f64) {
        match &self.shape {
            TestShape::BumpPoly(b) => (b.left - 1.0, b.right + 1.0),
            TestShape::ExpWindow(w) => (w.flat_end - 1.0, w.cut_end + 1.0),
        }
    }

    /// Evenly spaced horizons over [`Self::horizon_span`].
    pub fn horizons(&self, count: usize) -> Vec<f64> {
        let (a, b) = self.horizon_span();
        match count {
            0 => vec![],
            1 => vec![0.5 * (a + b)],
            _ => (0..count)
                .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    }

    /// Same function translated right by `dx`.
    pub fn shifted(&self, dx: f64) -> Self {
        let shape = match &self.shape {
            TestShape::BumpPoly(b) => TestShape::BumpPoly(BumpPoly {
                poly: poly::shift(&b.poly, dx),
                left: b.left + dx,
                right: b.right + dx,
            }),
            // e^{s(ξ-dx)} = e^{-s dx} e^{sξ}; keep the pure-exponential form by
            // translating the window only
            TestShape::ExpWindow(w) => TestShape::ExpWindow(ExpWindow {
                s: w.s,
                flat_end: w.flat_end + dx,
                cut_end: w.cut_end + dx,
            }),
        };
        Self {
            label: format!("{}>>{dx}", self.label),
            shape,
            max_order: self.max_order,
        }
    }

    /// `φ^{(order)}(ξ)`, exact closed form; zero outside the support.
    pub fn eval(&self, xi: f64, order: usize) -> Result<Complex64> {
        if order > self.max_order {
            return Err(Error::validation(format!(
                "derivative order {order} exceeds the configured maximum {}",
                self.max_order
            )));
        }
        Ok(self.eval_unchecked(xi, order))
    }

    pub(crate) fn eval_unchecked(&self, xi: f64, order: usize) -> Complex64 {
        match &self.shape {
            TestShape::BumpPoly(b) => eval_bump(b, xi, order),
            TestShape::ExpWindow(w) => eval_window(w, xi, order),
        }
    }
}

fn eval_bump(b: &BumpPoly, xi: f64, n: usize) -> Complex64 {
    if xi <= b.left || xi >= b.right {
        return Complex64::new(0.0, 0.0);
    }
    let width = b.right - b.left;
    let u = (xi - b.left) / width;
    let degree = b.poly.len() - 1;
    // Leibniz over p^{(n-k)} · bump^{(k)}; p^{(i)} vanishes for i > degree
    let mut dp = b.poly.clone();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..=n.min(degree) {
        let k = n - i;
        let bk = smooth::bump(u, k) / width.powi(k as i32);
        total += poly::eval(&dp, xi) * (poly::binomial(n, k) * bk);
        dp = poly::derivative(&dp);
    }
    total
}

fn eval_window(w: &ExpWindow, xi: f64, n: usize) -> Complex64 {
    if xi >= w.cut_end {
        return Complex64::new(0.0, 0.0);
    }
    let e = (w.s * xi).exp();
    if xi <= w.flat_end {
        return w.s.powu(n as u32) * e;
    }
    let len = w.cut_end - w.flat_end;
    let chi = smooth::cutoff_derivatives((xi - w.flat_end) / len, n);
    (0..=n)
        .map(|k| w.s.powu((n - k) as u32) * (poly::binomial(n, k) * chi[k] / len.powi(k as i32)))
        .sum::<Complex64>()
        * e
}

/// `∫ conj(φ(τ)) φ(τ - t) dτ` for compactly supported `φ`.
pub fn autocorrelate(phi: &TestFunction, t: f64, q: &QuadratureSpec) -> Result<Complex64> {
    autocorrelate_derivative(phi, t, 0, q)
}

/// `∫ conj(φ(τ)) φ^{(order)}(τ - t) dτ`, i.e. `(-1)^order` times the `order`-th
/// derivative of the autocorrelation at `t`.
pub fn autocorrelate_derivative(phi: &TestFunction, t: f64, order: usize, q: &QuadratureSpec) -> Result<Complex64> {
    let TestShape::BumpPoly(b) = &phi.shape else {
        return Err(Error::Unsupported("autocorrelation needs a compactly supported test function".into()));
    };
    if order > phi.max_order {
        return Err(Error::validation(format!("derivative order {order} exceeds maximum {}", phi.max_order)));
    }
    let lo = b.left.max(b.left + t);
    let hi = b.right.min(b.right + t);
    if lo >= hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    integrate(
        |tau| Ok(phi.eval_unchecked(tau, 0).conj() * phi.eval_unchecked(tau - t, order)),
        lo,
        hi,
        q,
    )
}

/// The default falsification corpus: 24 polynomial bumps followed by 8
/// exponential windows.
pub fn default_corpus() -> Vec<TestFunction> {
    let mut out = bump_corpus();
    out.extend(window_corpus());
    out
}

/// Degrees 0–3 on four centred widths, plus two shifted/rescaled copies of each.
pub fn bump_corpus() -> Vec<TestFunction> {
    let c = Complex64::new;
    let locals: [Vec<Complex64>; 4] = [
        vec![c(1.0, 0.0)],
        vec![c(0.2, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.5), c(-1.5, 0.0)],
        vec![c(0.0, 0.3), c(-1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)],
    ];
    let mut out = Vec::with_capacity(24);
    for (deg, local) in locals.iter().enumerate() {
        for width in [0.5, 1.0, 2.0, 4.0] {
            let f = TestFunction::bump_local(local, -0.5 * width, 0.5 * width)
                .expect("corpus bump is valid")
                .with_label(format!("bump-d{deg}-w{width}"));
            out.push(f);
        }
        let rot = Complex64::from_polar(1.5, PI / 5.0);
        let scaled: Vec<Complex64> = local.iter().map(|&z| z * rot).collect();
        out.push(
            TestFunction::bump_local(&scaled, 0.0, 3.0)
                .expect("corpus bump is valid")
                .with_label(format!("bump-d{deg}-shift+1.5-w3")),
        );
        let scaled: Vec<Complex64> = local.iter().map(|&z| z * 0.5).collect();
        out.push(
            TestFunction::bump_local(&scaled, -1.5, 0.0)
                .expect("corpus bump is valid")
                .with_label(format!("bump-d{deg}-shift-0.75-w1.5")),
        );
    }
    out
}

/// Exponential probes on a fixed grid in the open right half-plane.
pub fn window_corpus() -> Vec<TestFunction> {
    let grid = [
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.25, 1.0),
        Complex64::new(0.5, 3.0),
        Complex64::new(1.0, -2.0),
        Complex64::new(0.25, PI),
        Complex64::new(2.0, 6.0),
        Complex64::new(0.1, 0.5),
    ];
    grid.iter()
        .enumerate()
        .map(|(i, &s)| {
            TestFunction::exp_window(s, 0.0, 1.0)
                .expect("corpus window is valid")
                .with_label(format!("expwin-{i}(s={}{:+}i)", s.re, s.im))
        })
        .collect()
}
