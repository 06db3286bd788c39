//! Composite Gauss–Legendre quadrature with global panel doubling.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of panel doublings before giving up.
pub const MAX_REFINEMENTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 64,
            nodes_per_panel: 16,
            abs_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn new(panels: usize, nodes_per_panel: usize, abs_tol: f64) -> Result<Self> {
        if panels == 0 || nodes_per_panel == 0 {
            return Err(Error::validation("panels and nodes per panel must be positive"));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::validation("absTol must be a positive finite number"));
        }
        Ok(Self {
            panels,
            nodes_per_panel,
            abs_tol,
        })
    }

    /// Coarser starting resolution used for integrals nested inside an outer quadrature.
    /// Same tolerance; refinement still applies.
    pub fn inner(&self) -> Self {
        Self {
            panels: (self.panels / 8).max(4),
            ..*self
        }
    }
}

fn rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    static RULES: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let degree = NonZeroUsize::new(n).unwrap_or(NonZeroUsize::MIN);
            Arc::new(GaussLegendre::new(degree).as_node_weight_pairs().to_vec())
        })
        .clone()
}

/// One composite pass: returns (estimate, L1 mass of the integrand).
fn composite<F>(f: &mut F, lo: f64, hi: f64, panels: usize, nodes: &[(f64, f64)]) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        let mut panel = Complex64::new(0.0, 0.0);
        for &(x, w) in nodes {
            let v = f(mid + half * x)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::numeric(
                    format!("integrand not finite at {}", mid + half * x),
                    f64::NAN,
                ));
            }
            panel += v * w;
            mass += v.norm() * w * half;
        }
        sum += panel * half;
    }
    Ok((sum, mass))
}

/// Integrate a complex-valued function over `[lo, hi]`.
///
/// Starts from `q.panels` equal panels and doubles the panel count until two
/// successive estimates differ by less than `q.abs_tol`. The threshold never
/// drops below a few ulps of the integrand's L1 mass, which is the best a
/// floating-point sum can resolve.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, q: &QuadratureSpec) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::validation(format!("integration bounds must be finite, got [{lo}, {hi}]")));
    }
    if lo > hi {
        return Err(Error::validation(format!("integration bounds reversed: [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let nodes = rule(q.nodes_per_panel);
    let mut panels = q.panels;
    let (mut prev, _) = composite(&mut f, lo, hi, panels, &nodes)?;
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        let (est, mass) = composite(&mut f, lo, hi, panels, &nodes)?;
        let floor = 64.0 * f64::EPSILON * mass;
        if (est - prev).norm() < q.abs_tol.max(floor) {
            return Ok(est);
        }
        prev = est;
    }
    Err(Error::numeric(
        format!("quadrature on [{lo}, {hi}] did not converge after {MAX_REFINEMENTS} refinements"),
        prev.re,
    ))
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(mut f: F, lo: f64, hi: f64, q: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(|x| f(x).map(|v| Complex64::new(v, 0.0)), lo, hi, q).map(|z| z.re)
}

/// Smallest `T ≥ start` such that `|poly bound|(t)·exp(-decay·t) < tol` for all `t ≥ T`,
/// where the polynomial bound is `sum |p_n| t^n`. `decay` must be positive.
pub(crate) fn decay_cutoff(abs_coeffs: &[f64], decay: f64, start: f64, tol: f64) -> f64 {
    debug_assert!(decay > 0.0);
    let envelope = |t: f64| {
        let ta = t.abs().max(1.0);
        abs_coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * ta.powi(n as i32))
            .sum::<f64>()
            * (-decay * (t - start)).exp()
    };
    // Past the envelope's maximum the bound is decreasing; step until it is small.
    let step = 1.0 / decay;
    let mut t = start;
    let mut guard = 0;
    while (envelope(t) >= tol || envelope(t + step) >= tol) && guard < 100_000 {
        t += step;
        guard += 1;
    }
    t
}
