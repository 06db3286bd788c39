//! Fitting pseudo-passivity parameters to sampled transfer data. Each sample
//! gives one half-space in parameter space; the largest uniform margin over
//! all samples is a small linear program.

pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplace::TransferSample;
use crate::timedomain::{AdmittanceParams, Params, ScatteringParams};
use simplex::{Lp, LpOutcome};

/// Default symmetric box bound on each parameter coordinate.
pub const DEFAULT_BOX: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Admittance,
    Scattering,
}

/// `a·x ≤ b`, with `b − a·x` equal to the range residual of its sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Parameter vector layout: first block `c⃗` or `F⃗`, second block `d⃗` or `G⃗`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub kind: Kind,
    pub n: usize,
    pub rows: Vec<Row>,
}

impl ConstraintSet {
    pub fn dim(&self) -> usize {
        2 * (self.n + 1)
    }
}

pub fn build_constraints(samples: &[TransferSample], n: usize, kind: Kind) -> Result<ConstraintSet> {
    let mut rows = Vec::with_capacity(samples.len());
    for t in samples {
        if !(t.s.re > 0.0) {
            return Err(Error::validation(format!("sample at s = {} is not in the open right half-plane", t.s)));
        }
        let s2 = t.s.norm_sqr();
        let w2 = t.w.norm_sqr();
        let weights: Vec<f64> = std::iter::successors(Some(1.0), |w| Some(w * s2)).take(n + 1).collect();
        let (first, second, b) = match kind {
            Kind::Admittance => (1.0, w2, t.w.re),
            Kind::Scattering => (1.0 + w2, 2.0 * t.w.re, 1.0 - w2),
        };
        let a: Vec<f64> = weights.iter().map(|w| first * w).chain(weights.iter().map(|w| second * w)).collect();
        if !a.iter().all(|v| v.is_finite()) || !b.is_finite() {
            return Err(Error::validation(format!("sample at s = {} gives a non-finite constraint", t.s)));
        }
        rows.push(Row { a, b });
    }
    Ok(ConstraintSet { kind, n, rows })
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(a, x)| a * x).sum()
}

/// `min_k (b_k − a_k·x)`; `+∞` for an empty set.
pub fn check_feasible(cs: &ConstraintSet, x: &[f64]) -> f64 {
    cs.rows.iter().map(|r| r.b - dot(&r.a, x)).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Largest `min_k (b_k − a_k·x)`.
    #[default]
    MaxMargin,
    /// Largest first coordinate with the second block at zero: the tightest
    /// half-plane region.
    MaxHalfPlane,
    /// Largest leading coordinate of the second block among feasible points:
    /// the smallest disk-shaped region.
    MaxDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub status: FitStatus,
    pub objective: Objective,
    pub x: Vec<f64>,
    pub params: Option<Params>,
    /// `check_feasible` at the reported point.
    pub margin: f64,
    pub box_active: bool,
    /// No samples, or the margin sits at its artificial cap.
    pub degenerate: bool,
    /// Rows attaining the margin.
    pub active_rows: Vec<usize>,
}

/// Per-coordinate bounds `[lo, hi]` on the parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParamBox {
    pub fn symmetric(dim: usize, bound: f64) -> Self {
        Self {
            lower: vec![-bound; dim],
            upper: vec![bound; dim],
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.lower.len() != dim || self.upper.len() != dim {
            return Err(Error::validation(format!("box needs {dim} bounds per side")));
        }
        if !self.lower.iter().chain(&self.upper).all(|v| v.is_finite()) {
            return Err(Error::validation("box bounds must be finite"));
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| l > u) {
            return Err(Error::validation("box lower bound exceeds upper bound"));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.lower.iter().chain(&self.upper).fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn params_from(kind: Kind, n: usize, x: &[f64]) -> Params {
    let (a, b) = x.split_at(n + 1);
    match kind {
        Kind::Admittance => Params::Admittance(AdmittanceParams {
            c: a.to_vec(),
            d: b.to_vec(),
        }),
        Kind::Scattering => Params::Scattering(ScatteringParams {
            f: a.to_vec(),
            g: b.to_vec(),
        }),
    }
}

/// Maximizes the chosen objective over the box; ties go to the
/// lexicographically smallest parameter vector, found by a chain of secondary
/// LPs each pinning the previous optimum.
pub fn fit(cs: &ConstraintSet, bx: &ParamBox, objective: Objective) -> Result<FitResult> {
    let dim = cs.dim();
    bx.validate(dim)?;
    let tcol = dim;

    // The margin variable t is bounded by what any box point can reach.
    let reach: (f64, f64) = cs
        .rows
        .iter()
        .map(|r| {
            let worst = r.a.iter().zip(bx.lower.iter().zip(&bx.upper)).map(|(a, (l, u))| (a * l).max(a * u)).sum::<f64>();
            let best = r.a.iter().zip(bx.lower.iter().zip(&bx.upper)).map(|(a, (l, u))| (a * l).min(a * u)).sum::<f64>();
            (r.b - worst, r.b - best)
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (w, b)| (lo.min(w), hi.max(b)));
    let (t_floor, t_cap) = if cs.rows.is_empty() {
        (0.0, bx.scale().max(1.0))
    } else {
        (reach.0 - 1.0, reach.1 + 1.0)
    };

    let mut lower = bx.lower.clone();
    let mut upper = bx.upper.clone();
    lower.push(t_floor);
    upper.push(t_cap);
    let primary = match objective {
        Objective::MaxMargin => tcol,
        Objective::MaxHalfPlane => {
            for i in cs.n + 1..dim {
                lower[i] = 0.0;
                upper[i] = 0.0;
            }
            lower[tcol] = lower[tcol].max(0.0);
            0
        }
        Objective::MaxDisk => {
            lower[tcol] = lower[tcol].max(0.0);
            cs.n + 1
        }
    };
    if lower[tcol] > upper[tcol] {
        return Ok(infeasible(objective, dim));
    }
    let mut rows: Vec<(Vec<f64>, f64)> = cs
        .rows
        .iter()
        .map(|r| {
            let mut a = r.a.clone();
            a.push(1.0);
            (a, r.b)
        })
        .collect();

    let mut x = Vec::new();
    let order = std::iter::once((primary, 1.0)).chain((0..dim).map(|i| (i, -1.0)));
    for (col, sign) in order {
        let mut obj = vec![0.0; dim + 1];
        obj[col] = sign;
        let lp = Lp {
            rows: rows.clone(),
            lower: lower.clone(),
            upper: upper.clone(),
            objective: obj,
        };
        let mut outcome = lp.solve();
        if outcome == LpOutcome::Infeasible && !x.is_empty() {
            // The previous pin was too tight for the simplex roundoff.
            let mut relaxed = lp.clone();
            let pinned = relaxed.rows.last_mut().expect("pin row");
            pinned.1 += 1e-9 * pinned.1.abs().max(1.0);
            outcome = relaxed.solve();
        }
        match outcome {
            LpOutcome::Optimal { x: sol, value } => {
                // Pin this stage's optimum before optimizing the next coordinate.
                let mut pin = vec![0.0; dim + 1];
                pin[col] = -sign;
                rows.push((pin, -value));
                x = sol;
            }
            LpOutcome::Infeasible => return Ok(infeasible(objective, dim)),
            LpOutcome::Unbounded => {
                return Ok(FitResult {
                    status: FitStatus::Unbounded,
                    objective,
                    x: vec![],
                    params: None,
                    margin: f64::NAN,
                    box_active: false,
                    degenerate: true,
                    active_rows: vec![],
                })
            }
        }
    }
    let t = x.pop().expect("margin variable");
    let margin = check_feasible(cs, &x);
    let tol = 1e-9 * bx.scale().max(1.0);
    let box_active = x.iter().zip(bx.lower.iter().zip(&bx.upper)).any(|(v, (l, u))| v - l <= tol || u - v <= tol);
    let active_rows = if margin.is_finite() {
        let band = 1e-9 * margin.abs().max(1.0);
        cs.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.b - dot(&r.a, &x) - margin <= band)
            .map(|(i, _)| i)
            .collect()
    } else {
        vec![]
    };
    Ok(FitResult {
        status: FitStatus::Optimal,
        objective,
        params: Some(params_from(cs.kind, cs.n, &x)),
        x,
        margin: if cs.rows.is_empty() { t_cap } else { margin },
        box_active,
        degenerate: cs.rows.is_empty() || t_cap - t <= tol,
        active_rows,
    })
}

fn infeasible(objective: Objective, dim: usize) -> FitResult {
    FitResult {
        status: FitStatus::Infeasible,
        objective,
        x: vec![f64::NAN; dim],
        params: None,
        margin: f64::NAN,
        box_active: false,
        degenerate: false,
        active_rows: vec![],
    }
}

/// [`fit`] with the margin objective.
pub fn fit_max_margin(cs: &ConstraintSet, bx: &ParamBox) -> Result<FitResult> {
    fit(cs, bx, Objective::MaxMargin)
}

/// Node grid over the two parameters of an `N = 0` problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub step: f64,
}

impl OracleGrid {
    fn count(lo: f64, hi: f64, step: f64) -> usize {
        ((hi - lo) / step + 1e-9).floor() as usize + 1
    }

    pub fn nx(&self) -> usize {
        Self::count(self.x_range.0, self.x_range.1, self.step)
    }

    pub fn ny(&self) -> usize {
        Self::count(self.y_range.0, self.y_range.1, self.step)
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x_range.0 + i as f64 * self.step, self.y_range.0 + j as f64 * self.step)
    }

    pub fn as_box(&self) -> ParamBox {
        ParamBox {
            lower: vec![self.x_range.0, self.y_range.0],
            upper: vec![self.x_range.1, self.y_range.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub grid: OracleGrid,
    /// Row-major over the first parameter, then the second.
    pub feasible: Vec<bool>,
    pub feasible_count: usize,
    /// Node with the largest margin, `(x, y, margin)`, first in scan order on ties.
    pub best: Option<(f64, f64, f64)>,
}

impl OracleResult {
    pub fn is_feasible_at(&self, x: f64, y: f64) -> bool {
        let i = ((x - self.grid.x_range.0) / self.grid.step).round();
        let j = ((y - self.grid.y_range.0) / self.grid.step).round();
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        if i < 0.0 || j < 0.0 || i as usize >= nx || j as usize >= ny {
            return false;
        }
        self.feasible[i as usize * ny + j as usize]
    }
}

/// Exhaustive scan of an `N = 0` parameter grid, marking nodes with
/// non-negative margin.
pub fn brute_force_oracle(samples: &[TransferSample], kind: Kind, grid: &OracleGrid) -> Result<OracleResult> {
    use rayon::prelude::*;
    if !(grid.step > 0.0) || grid.x_range.1 < grid.x_range.0 || grid.y_range.1 < grid.y_range.0 {
        return Err(Error::validation("oracle grid needs a positive step and ordered ranges"));
    }
    let cs = build_constraints(samples, 0, kind)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let rows: Vec<(f64, f64, f64)> = cs.rows.iter().map(|r| (r.a[0], r.a[1], r.b)).collect();
    let columns: Vec<(Vec<bool>, Option<(f64, f64, f64)>)> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let mut flags = Vec::with_capacity(ny);
            let mut best: Option<(f64, f64, f64)> = None;
            for j in 0..ny {
                let (x, y) = grid.point(i, j);
                let m = rows.iter().map(|&(a, b, c)| c - a * x - b * y).fold(f64::INFINITY, f64::min);
                flags.push(m >= 0.0);
                if best.is_none_or(|(_, _, bm)| m > bm) {
                    best = Some((x, y, m));
                }
            }
            (flags, best)
        })
        .collect();
    let mut feasible = Vec::with_capacity(nx * ny);
    let mut best: Option<(f64, f64, f64)> = None;
    for (flags, b) in columns {
        feasible.extend(flags);
        if let Some(b) = b {
            if best.is_none_or(|(_, _, bm)| b.2 > bm) {
                best = Some(b);
            }
        }
    }
    let feasible_count = feasible.iter().filter(|&&f| f).count();
    Ok(OracleResult {
        grid: *grid,
        feasible,
        feasible_count,
        best,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleAgreement {
    pub lp_margin: f64,
    pub best_cell_margin: f64,
    /// `step × max_k ‖a_k‖₁`: how far a node margin can trail the continuum.
    pub band: f64,
    pub margins_agree: bool,
    /// A node at a corner of the LP optimum's cell is feasible (or, when the
    /// LP margin is negative, no node is).
    pub cell_consistent: bool,
    pub agree: bool,
}

/// Checks a max-margin LP solution against an exhaustive scan of the same box.
pub fn compare_with_oracle(cs: &ConstraintSet, lp: &FitResult, oracle: &OracleResult) -> OracleAgreement {
    let g = &oracle.grid;
    let norm = cs.rows.iter().map(|r| r.a.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let band = g.step * norm + 1e-9;
    let best = oracle.best.map_or(f64::NEG_INFINITY, |b| b.2);
    let m = lp.margin;
    let margins_agree = if cs.rows.is_empty() {
        lp.status == FitStatus::Optimal
    } else {
        m >= best - 1e-9 && m - best <= band
    };
    let cell_consistent = if lp.x.len() != 2 {
        false
    } else if m >= 0.0 {
        let (x, y) = (lp.x[0], lp.x[1]);
        let i0 = ((x - g.x_range.0) / g.step).floor();
        let j0 = ((y - g.y_range.0) / g.step).floor();
        let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        m <= band
            || corners.iter().any(|(di, dj)| {
                let (cx, cy) = (g.x_range.0 + (i0 + di) * g.step, g.y_range.0 + (j0 + dj) * g.step);
                oracle.is_feasible_at(cx, cy)
            })
    } else {
        oracle.feasible_count == 0
    };
    OracleAgreement {
        lp_margin: m,
        best_cell_margin: best,
        band,
        margins_agree,
        cell_consistent,
        agree: margins_agree && cell_consistent,
    }
}
