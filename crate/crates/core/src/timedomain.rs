//! Time-domain energy inequalities: the admittance and scattering residuals,
//! weak passivity, the non-negative-definite pairing, falsification over a
//! corpus of test functions, and the causality test.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::testfn::{autocorrelate, autocorrelate_derivative, integrate, integrate_real, QuadratureSpec, TestFunction};

/// Default falsification threshold on residuals normalized by `‖φ‖²`.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Default number of horizons per test function.
pub const DEFAULT_HORIZONS: usize = 17;

fn check_vectors(a: &[f64], b: &[f64], names: &str) -> Result<()> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::validation(format!(
            "{names} must both have length N+1 >= 1 (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if !a.iter().chain(b).all(|x| x.is_finite()) {
        return Err(Error::validation(format!("{names} must be finite")));
    }
    Ok(())
}

/// `(c⃗, d⃗)` of the admittance inequality, each of length `N + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmittanceParams {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl AdmittanceParams {
    pub fn new(c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        check_vectors(&c, &d, "c and d")?;
        Ok(Self { c, d })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            c: vec![0.0; n + 1],
            d: vec![0.0; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    pub fn neg(&self) -> Self {
        Self {
            c: self.c.iter().map(|x| -x).collect(),
            d: self.d.iter().map(|x| -x).collect(),
        }
    }
}

/// `(F⃗, G⃗)` of the scattering inequality, each of length `N + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringParams {
    #[serde(rename = "F")]
    pub f: Vec<f64>,
    #[serde(rename = "G")]
    pub g: Vec<f64>,
}

impl ScatteringParams {
    pub fn new(f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        check_vectors(&f, &g, "F and G")?;
        Ok(Self { f, g })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            f: vec![0.0; n + 1],
            g: vec![0.0; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.f.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Params {
    Admittance(AdmittanceParams),
    Scattering(ScatteringParams),
}

impl Params {
    pub fn n(&self) -> usize {
        match self {
            Params::Admittance(p) => p.n(),
            Params::Scattering(p) => p.n(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Params::Admittance(p) => check_vectors(&p.c, &p.d, "c and d"),
            Params::Scattering(p) => check_vectors(&p.f, &p.g, "F and G"),
        }
    }
}

impl From<AdmittanceParams> for Params {
    fn from(p: AdmittanceParams) -> Self {
        Params::Admittance(p)
    }
}

impl From<ScatteringParams> for Params {
    fn from(p: ScatteringParams) -> Self {
        Params::Scattering(p)
    }
}

/// Integration window for a residual up to horizon `t` (`+∞` allowed).
/// With `response_terms`, the window also covers where only `ψ` lives.
fn window(k: &Kernel, phi: &TestFunction, t: f64, response_terms: bool, q: &QuadratureSpec) -> Result<Option<(f64, f64)>> {
    let (_, phi_hi) = phi.support();
    let mut lo = phi.integration_start(q.abs_tol);
    let mut hi = phi_hi;
    if response_terms && !k.is_zero() {
        let lb = k.support_lower_bound();
        if !lb.is_finite() {
            return Err(Error::Unsupported(
                "response energy terms with a two-sided kernel tail".into(),
            ));
        }
        lo = lo.min(lo + lb);
        match k.response_end(phi_hi, q.abs_tol * 1e-3) {
            Some(end) => hi = hi.max(end),
            None if t.is_finite() => hi = hi.max(t),
            None => {
                return Err(Error::numeric(
                    "response of a non-tempered kernel has no finite energy horizon",
                    f64::INFINITY,
                ))
            }
        }
    }
    let hi = hi.min(t);
    Ok((hi > lo).then_some((lo, hi)))
}

fn admittance_density(k: &Kernel, phi: &TestFunction, tau: f64, p: &AdmittanceParams, q: &QuadratureSpec) -> Result<f64> {
    let phi0 = phi.eval_unchecked(tau, 0);
    let psi0 = k.apply(phi, tau, q)?;
    let mut v = (phi0.conj() * psi0).re;
    for (j, (&c, &d)) in p.c.iter().zip(&p.d).enumerate() {
        if c != 0.0 {
            v -= c * phi.eval_unchecked(tau, j).norm_sqr();
        }
        if d != 0.0 {
            let psij = if j == 0 { psi0 } else { k.apply_derivative(phi, tau, j, q)? };
            v -= d * psij.norm_sqr();
        }
    }
    Ok(v)
}

fn scattering_density(k: &Kernel, zeta: &TestFunction, tau: f64, p: &ScatteringParams, q: &QuadratureSpec) -> Result<f64> {
    let mut v = 0.0;
    for (j, (&f, &g)) in p.f.iter().zip(&p.g).enumerate() {
        let kron = if j == 0 { 1.0 } else { 0.0 };
        let (a, b) = (kron - f, kron + f);
        if a == 0.0 && b == 0.0 && g == 0.0 {
            continue;
        }
        let zj = zeta.eval_unchecked(tau, j);
        let ej = k.apply_derivative(zeta, tau, j, q)?;
        v += a * zj.norm_sqr() - b * ej.norm_sqr() - 2.0 * g * (zj.conj() * ej).re;
    }
    Ok(v)
}

/// Residuals at every horizon in `ts`, integrated cumulatively so the whole
/// profile costs about one integral over the support.
pub fn residual_profile(k: &Kernel, phi: &TestFunction, ts: &[f64], p: &Params, q: &QuadratureSpec) -> Result<Vec<f64>> {
    p.validate()?;
    if ts.iter().any(|t| t.is_nan()) {
        return Err(Error::validation("horizon is NaN"));
    }
    let response_terms = match p {
        Params::Admittance(a) => a.d.iter().any(|&d| d != 0.0),
        Params::Scattering(_) => true,
    };
    let t_max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let Some((lo, hi)) = window(k, phi, t_max, response_terms, q)? else {
        return Ok(vec![0.0; ts.len()]);
    };
    let density = |tau: f64| match p {
        Params::Admittance(a) => admittance_density(k, phi, tau, a, q),
        Params::Scattering(sc) => scattering_density(k, phi, tau, sc, q),
    };
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
    let mut out = vec![0.0; ts.len()];
    let (mut at, mut acc) = (lo, 0.0);
    for i in order {
        let end = ts[i].min(hi);
        if end > at {
            // Panels in proportion to the segment length.
            let panels = ((q.panels as f64 * (end - at) / (hi - lo)).ceil() as usize).max(4);
            let seg = QuadratureSpec { panels, ..*q };
            acc += integrate_real(density, at, end, &seg)?;
            at = end;
        }
        out[i] = acc;
    }
    Ok(out)
}

/// `Re ∫_{-∞}^t conj(φ)ψ − Σ_j ∫_{-∞}^t (c_j|φ^{(j)}|² + d_j|ψ^{(j)}|²)`.
pub fn admittance_residual(k: &Kernel, phi: &TestFunction, t: f64, p: &AdmittanceParams, q: &QuadratureSpec) -> Result<f64> {
    residual(k, phi, t, &Params::Admittance(p.clone()), q)
}

/// `Σ_j ∫_{-∞}^t ((δ_{0j}−F_j)|ζ^{(j)}|² − (δ_{0j}+F_j)|η^{(j)}|²) − 2 Σ_j G_j Re ∫_{-∞}^t conj(ζ^{(j)}) η^{(j)}`.
pub fn scattering_residual(k: &Kernel, zeta: &TestFunction, t: f64, p: &ScatteringParams, q: &QuadratureSpec) -> Result<f64> {
    residual(k, zeta, t, &Params::Scattering(p.clone()), q)
}

/// Residual of whichever inequality `p` parameterizes.
pub fn residual(k: &Kernel, phi: &TestFunction, t: f64, p: &Params, q: &QuadratureSpec) -> Result<f64> {
    Ok(residual_profile(k, phi, &[t], p, q)?[0])
}

/// `∫|φ|²` over the integration window of `φ`.
pub fn energy(phi: &TestFunction, q: &QuadratureSpec) -> Result<f64> {
    let (_, hi) = phi.support();
    let lo = phi.integration_start(q.abs_tol);
    integrate_real(|tau| Ok(phi.eval_unchecked(tau, 0).norm_sqr()), lo, hi, q)
}

/// `Re ∫ conj(φ)ψ` over the whole line. Windows are cut where their
/// remaining energy drops below the quadrature tolerance.
pub fn weak_passivity_residual(k: &Kernel, phi: &TestFunction, q: &QuadratureSpec) -> Result<f64> {
    let lo = phi.integration_start(q.abs_tol);
    let (_, hi) = phi.support();
    integrate_real(
        |tau| Ok((phi.eval_unchecked(tau, 0).conj() * k.apply(phi, tau, q)?).re),
        lo,
        hi,
        q,
    )
}

/// Pairing of a kernel with the autocorrelation of a test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    /// `Re ⟨Y, A_φ⟩`; non-negative for a non-negative definite `Y`.
    pub residual: f64,
    /// `Im ⟨Y, A_φ⟩`, a diagnostic.
    pub imag: f64,
}

/// `⟨Y, t ↦ ∫ conj(φ(τ)) φ(τ − t) dτ⟩`: Dirac terms in closed form through the
/// derivatives of the autocorrelation, regular terms by quadrature.
pub fn nonneg_definite_residual(k: &Kernel, phi: &TestFunction, q: &QuadratureSpec) -> Result<Pairing> {
    if !phi.is_compact() {
        return Err(Error::Unsupported("autocorrelation needs a compactly supported test function".into()));
    }
    let (l, r) = phi.support();
    let width = r - l;
    let inner = q.inner();
    let mut total = Complex64::new(0.0, 0.0);
    for d in k.dirac_terms() {
        // ⟨δ_x^{(m)}, A⟩ = (-1)^m A^{(m)}(x) = ∫ conj(φ(τ)) φ^{(m)}(τ − x) dτ
        total += d.coeff * autocorrelate_derivative(phi, d.loc, d.order, &inner)?;
    }
    for term in k.regular_terms() {
        let lo = term.start.max(-width);
        if lo >= width {
            continue;
        }
        total += integrate(|t| Ok(term.value(t) * autocorrelate(phi, t, &inner)?), lo, width, q)?;
    }
    Ok(Pairing {
        residual: total.re,
        imag: total.im,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    NotFalsified,
    Falsified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub function: String,
    pub horizon: f64,
    /// Residual divided by `‖φ‖²`.
    pub residual: f64,
    pub raw_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Minimizing evaluation; always present when falsified.
    pub witness: Option<Witness>,
    pub min_residual: f64,
    pub evaluated: usize,
    /// `(function, horizon, message)` for evaluations that failed numerically.
    pub failures: Vec<(String, f64, String)>,
}

impl Verdict {
    pub fn is_falsified(&self) -> bool {
        self.status == VerdictStatus::Falsified
    }
}

/// Which horizons `t` each test function is checked at.
#[derive(Debug, Clone, PartialEq)]
pub enum Horizons {
    /// Evenly spaced over each function's support, widened by one on both sides.
    PerFunction(usize),
    Fixed(Vec<f64>),
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons::PerFunction(DEFAULT_HORIZONS)
    }
}

/// Evaluates the residual over `corpus × horizons` and reports the minimum of
/// the `‖φ‖²`-normalized residuals. Falsified iff that minimum is below `-tol`.
pub fn falsify(k: &Kernel, p: &Params, corpus: &[TestFunction], horizons: &Horizons, tol: f64, q: &QuadratureSpec) -> Verdict {
    let per_function: Vec<(Vec<f64>, Result<Vec<(f64, f64)>>)> = corpus
        .par_iter()
        .map(|phi| {
            let ts = match horizons {
                Horizons::PerFunction(n) => phi.horizons(*n),
                Horizons::Fixed(ts) => ts.clone(),
            };
            let evaluated = energy(phi, q).and_then(|norm| {
                if !(norm > 0.0) {
                    return Err(Error::validation("test function has zero energy"));
                }
                let raw = residual_profile(k, phi, &ts, p, q)?;
                Ok(raw.into_iter().map(|r| (r, r / norm)).collect())
            });
            (ts, evaluated)
        })
        .collect();

    // Sequential reduction in corpus order keeps ties deterministic.
    let mut best: Option<Witness> = None;
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for (phi, (ts, res)) in corpus.iter().zip(per_function) {
        match res {
            Ok(values) => {
                for (&t, (raw, normalized)) in ts.iter().zip(values) {
                    evaluated += 1;
                    if best.as_ref().is_none_or(|w| normalized < w.residual) {
                        best = Some(Witness {
                            function: phi.label.clone(),
                            horizon: t,
                            residual: normalized,
                            raw_residual: raw,
                        });
                    }
                }
            }
            Err(e) => {
                let msg = e.to_string();
                failures.extend(ts.iter().map(|&t| (phi.label.clone(), t, msg.clone())));
            }
        }
    }
    let min_residual = best.as_ref().map_or(f64::INFINITY, |w| w.residual);
    let status = if min_residual < -tol {
        VerdictStatus::Falsified
    } else {
        VerdictStatus::NotFalsified
    };
    Verdict {
        status,
        witness: best,
        min_residual,
        evaluated,
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityViolation {
    pub function: String,
    pub xi: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    pub causal: bool,
    pub checked_functions: usize,
    pub violations: Vec<CausalityViolation>,
}

/// Number of sample points on `(-∞, t0)` per test function.
const CAUSALITY_SAMPLES: usize = 129;

/// Shifts each compactly supported corpus function to start at `t0` and checks
/// that `ψ` stays below `tol` on a grid left of `t0`.
pub fn causality_check(k: &Kernel, t0: f64, corpus: &[TestFunction], tol: f64, q: &QuadratureSpec) -> CausalityReport {
    let lb = k.support_lower_bound();
    let reach = if lb.is_finite() { (-lb).max(0.0) } else { 10.0 };
    let shifted: Vec<TestFunction> = corpus
        .iter()
        .filter(|phi| phi.is_compact())
        .map(|phi| phi.shifted(t0 - phi.support().0))
        .collect();
    let violations: Vec<Option<CausalityViolation>> = shifted
        .par_iter()
        .map(|phi| {
            let (l, r) = phi.support();
            let span = (r - l) + reach + 1.0;
            let mut worst: Option<CausalityViolation> = None;
            for i in 0..CAUSALITY_SAMPLES {
                let xi = t0 - span + span * i as f64 / CAUSALITY_SAMPLES as f64;
                let magnitude = match k.apply(phi, xi, q) {
                    Ok(v) => v.norm(),
                    Err(_) => f64::INFINITY,
                };
                if magnitude >= tol && worst.as_ref().is_none_or(|w| magnitude > w.magnitude) {
                    worst = Some(CausalityViolation {
                        function: phi.label.clone(),
                        xi,
                        magnitude,
                    });
                }
            }
            worst
        })
        .collect();
    let violations: Vec<CausalityViolation> = violations.into_iter().flatten().collect();
    CausalityReport {
        causal: violations.is_empty(),
        checked_functions: shifted.len(),
        violations,
    }
}
