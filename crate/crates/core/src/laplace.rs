//! Closed-form Laplace transforms of kernels and the frequency-domain range
//! inequalities, sampled over grids in the open right half-plane.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ExpPolyTerm, Kernel};
use crate::poly;
use crate::timedomain::{AdmittanceParams, Params, ScatteringParams};

/// A value `w = W(s)` of a transfer function at `Re s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferSample {
    pub s: Complex64,
    pub w: Complex64,
}

impl TransferSample {
    pub fn new(s: Complex64, w: Complex64) -> Result<Self> {
        if !(s.re > 0.0) || !s.im.is_finite() || !s.re.is_finite() {
            return Err(Error::validation(format!("sample point {s} is not in the open right half-plane")));
        }
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::validation(format!("transfer value {w} at s = {s} is not finite")));
        }
        Ok(Self { s, w })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    /// Logarithmic in `Re s`, linear in `Im s`.
    LogRe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneGrid {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
    pub spacing: Spacing,
}

impl Default for HalfPlaneGrid {
    fn default() -> Self {
        Self {
            re_range: (1e-2, 1e2),
            im_range: (-100.0, 100.0),
            n_re: 25,
            n_im: 41,
            spacing: Spacing::LogRe,
        }
    }
}

fn spaced(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let u = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                hi
            } else if log {
                lo * (hi / lo).powf(u)
            } else {
                lo + u * (hi - lo)
            }
        })
        .collect()
}

impl HalfPlaneGrid {
    pub fn new(re_range: (f64, f64), im_range: (f64, f64), n_re: usize, n_im: usize, spacing: Spacing) -> Result<Self> {
        let g = Self {
            re_range,
            im_range,
            n_re,
            n_im,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let (r0, r1) = self.re_range;
        let (i0, i1) = self.im_range;
        if ![r0, r1, i0, i1].iter().all(|x| x.is_finite()) {
            return Err(Error::validation("grid bounds must be finite"));
        }
        if !(r0 > 0.0) || r1 < r0 || i1 < i0 {
            return Err(Error::validation(format!(
                "grid needs 0 < re_min <= re_max and im_min <= im_max, got re [{r0}, {r1}], im [{i0}, {i1}]"
            )));
        }
        if self.n_re == 0 || self.n_im == 0 {
            return Err(Error::validation("grid point counts must be positive"));
        }
        Ok(())
    }

    /// Grid points, `Re s` outer and `Im s` inner.
    pub fn points(&self) -> Vec<Complex64> {
        let res = spaced(self.re_range.0, self.re_range.1, self.n_re, self.spacing == Spacing::LogRe);
        let ims = spaced(self.im_range.0, self.im_range.1, self.n_im, false);
        res.iter()
            .flat_map(|&re| ims.iter().map(move |&im| Complex64::new(re, im)))
            .collect()
    }
}

/// `∫_a^∞ p(t) e^{(λ−s)t} dt` in closed form.
fn exp_poly_transform(term: &ExpPolyTerm, s: Complex64) -> Result<Complex64> {
    if term.start == f64::NEG_INFINITY {
        return Err(Error::Domain(
            "the Laplace integral of a two-sided exponential tail converges nowhere".into(),
        ));
    }
    let mu = s - term.rate;
    if !(mu.re > 0.0) {
        return Err(Error::Domain(format!(
            "Re s = {} does not exceed the tail rate Re λ = {}",
            s.re, term.rate.re
        )));
    }
    let a = term.start;
    let inv = mu.inv();
    let mut total = Complex64::new(0.0, 0.0);
    for (n, &pn) in term.poly.iter().enumerate() {
        if pn == Complex64::new(0.0, 0.0) {
            continue;
        }
        // Σ_{k≤n} n!/k! a^k / μ^{n−k+1}, accumulated from k = n down.
        let mut inner = Complex64::new(0.0, 0.0);
        let mut ratio = 1.0; // n!/k!
        let mut pow = inv; // μ^{-(n-k+1)}
        for k in (0..=n).rev() {
            inner += ratio * a.powi(k as i32) * pow;
            ratio *= k as f64;
            pow *= inv;
        }
        total += pn * inner;
    }
    Ok((-mu * a).exp() * total)
}

/// `W(s) = Σ coeff·s^m e^{−s·loc} + Σ ∫_a^∞ p(t)e^{(λ−s)t}dt`.
pub fn laplace_eval(k: &Kernel, s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    let mut w = Complex64::new(0.0, 0.0);
    for d in k.dirac_terms() {
        w += d.coeff * s.powu(d.order as u32) * (-s * d.loc).exp();
    }
    for t in k.regular_terms() {
        w += exp_poly_transform(t, s)?;
    }
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain(format!("transform overflows at s = {s}")));
    }
    Ok(w)
}

/// `Re w − Σ_j |s|^{2j}(c_j + |w|² d_j)`.
pub fn admittance_range_residual(w: Complex64, s: Complex64, p: &AdmittanceParams) -> f64 {
    let s2 = s.norm_sqr();
    let w2 = w.norm_sqr();
    let mut weight = 1.0;
    let mut r = w.re;
    for (&c, &d) in p.c.iter().zip(&p.d) {
        r -= weight * (c + w2 * d);
        weight *= s2;
    }
    r
}

/// `Σ_j |s|^{2j}((δ_{0j}−F_j) − (δ_{0j}+F_j)|w|²) − 2 Σ_j G_j |s|^{2j} Re w`.
pub fn scattering_range_residual(w: Complex64, s: Complex64, p: &ScatteringParams) -> f64 {
    let s2 = s.norm_sqr();
    let w2 = w.norm_sqr();
    let mut weight = 1.0;
    let mut r = 0.0;
    for (j, (&f, &g)) in p.f.iter().zip(&p.g).enumerate() {
        let kron = if j == 0 { 1.0 } else { 0.0 };
        r += weight * ((kron - f) - (kron + f) * w2) - 2.0 * g * weight * w.re;
        weight *= s2;
    }
    r
}

pub fn range_residual(w: Complex64, s: Complex64, p: &Params) -> f64 {
    match p {
        Params::Admittance(a) => admittance_range_residual(w, s, a),
        Params::Scattering(f) => scattering_range_residual(w, s, f),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: Complex64,
    pub w: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Grid points where the transform does not converge, with the reason.
    pub skipped: Vec<(Complex64, String)>,
    pub min_residual: f64,
    /// Grid point of the smallest residual; only a sampled minimum.
    pub argmin: Option<Complex64>,
    pub non_tempered: bool,
}

impl SweepReport {
    pub fn samples(&self) -> Vec<TransferSample> {
        self.rows.iter().map(|r| TransferSample { s: r.s, w: r.w }).collect()
    }
}

/// Evaluates `W` and the matching range residual at arbitrary points.
pub fn sweep_points(k: &Kernel, points: &[Complex64], p: &Params) -> SweepReport {
    let evaluated: Vec<Result<SweepRow>> = points
        .par_iter()
        .map(|&s| {
            let w = laplace_eval(k, s)?;
            Ok(SweepRow {
                s,
                w,
                residual: range_residual(w, s, p),
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    let mut skipped = Vec::new();
    for (&s, row) in points.iter().zip(evaluated) {
        match row {
            Ok(r) => rows.push(r),
            Err(e) => skipped.push((s, e.to_string())),
        }
    }
    let mut min_residual = f64::INFINITY;
    let mut argmin = None;
    for r in &rows {
        if r.residual < min_residual {
            min_residual = r.residual;
            argmin = Some(r.s);
        }
    }
    SweepReport {
        rows,
        skipped,
        min_residual,
        argmin,
        non_tempered: !k.is_tempered(),
    }
}

pub fn sweep(k: &Kernel, grid: &HalfPlaneGrid, p: &Params) -> Result<SweepReport> {
    grid.validate()?;
    Ok(sweep_points(k, &grid.points(), p))
}

pub const CSV_HEADER: [&str; 4] = ["s_re", "s_im", "w_re", "w_im"];

/// Writes samples as CSV with shortest round-trip decimal floats.
pub fn write_samples<W: Write>(out: W, samples: &[TransferSample]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(CSV_HEADER)?;
    for t in samples {
        wr.write_record([t.s.re, t.s.im, t.w.re, t.w.im].map(|x| x.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads samples, rejecting points off the open right half-plane. Columns
/// after the first four (such as a sweep's residual) are ignored.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<TransferSample>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().take(4).collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse(format!(
            "expected header {}, found {}",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let mut vals = [0.0; 4];
        for (i, v) in vals.iter_mut().enumerate() {
            let field = rec.get(i).ok_or_else(|| Error::Parse(format!("row {}: missing column {}", line + 1, CSV_HEADER[i])))?;
            *v = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad number {field:?} in {}", line + 1, CSV_HEADER[i])))?;
        }
        out.push(TransferSample::new(Complex64::new(vals[0], vals[1]), Complex64::new(vals[2], vals[3]))?);
    }
    Ok(out)
}

/// Same transform with the tails integrated numerically up to a decay cutoff.
/// An independent route for cross-checking [`laplace_eval`].
pub fn laplace_by_quadrature(k: &Kernel, s: Complex64, q: &crate::testfn::QuadratureSpec) -> Result<Complex64> {
    let mut w = Complex64::new(0.0, 0.0);
    for d in k.dirac_terms() {
        w += d.coeff * s.powu(d.order as u32) * (-s * d.loc).exp();
    }
    for t in k.regular_terms() {
        let decay = s.re - t.rate.re;
        if !t.start.is_finite() || decay <= 0.0 {
            return Err(Error::Domain(format!("no convergent Laplace integral at s = {s}")));
        }
        let mass: Vec<f64> = t.poly.iter().map(|c| c.norm()).collect();
        let end = crate::testfn::quadrature::decay_cutoff(&mass, decay, t.start, q.abs_tol * 1e-2);
        // Oscillation in Im s needs panels on the scale 1/|Im(λ − s)|.
        let osc = (t.rate.im - s.im).abs() * (end - t.start);
        let panels = q.panels.max((osc / 4.0).ceil() as usize).min(1 << 14);
        let qq = crate::testfn::QuadratureSpec { panels, ..*q };
        w += crate::testfn::integrate(|x| Ok(poly::eval(&t.poly, x) * ((t.rate - s) * x).exp()), t.start, end, &qq)?;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DiracTerm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transform_examples() {
        let s = c(0.7, -2.0);
        let d1 = Kernel::dirac(1.0, 0.0, 1).unwrap();
        assert_eq!(laplace_eval(&d1, s).unwrap(), s);
        let e = Kernel::exp_poly(ExpPolyTerm::causal_exp(-1.0)).unwrap();
        assert!((laplace_eval(&e, s).unwrap() - (s + 1.0).inv()).norm() < 1e-15);
        let neg = Kernel::dirac(-1.0, 0.0, 0).unwrap();
        assert_eq!(laplace_eval(&neg, s).unwrap(), c(-1.0, 0.0));
        let grow = Kernel::exp_poly(ExpPolyTerm::causal_exp(1.0)).unwrap();
        assert!(matches!(laplace_eval(&grow, c(0.5, 0.0)), Err(Error::Domain(_))));
        assert!(laplace_eval(&grow, c(1.5, 0.0)).is_ok());
    }

    #[test]
    fn polynomial_tail_matches_textbook() {
        // t² e^{-2t} on t ≥ 1 vs integration by parts.
        let term = ExpPolyTerm::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], -2.0, 1.0);
        let k = Kernel::exp_poly(term).unwrap();
        let s = c(1.0, 3.0);
        let mu = s + 2.0;
        let expect = (-mu).exp() * (1.0 / mu + 2.0 / (mu * mu) + 2.0 / (mu * mu * mu));
        assert!((laplace_eval(&k, s).unwrap() - expect).norm() < 1e-15);
        let q = crate::testfn::QuadratureSpec::default();
        assert!((laplace_by_quadrature(&k, s, &q).unwrap() - expect).norm() < 1e-10);
    }

    #[test]
    fn residual_examples() {
        let s = c(0.3, 4.0);
        let zero = AdmittanceParams::zero(2);
        assert_eq!(admittance_range_residual(s, s, &zero), 0.3);
        let boundary = AdmittanceParams::new(vec![-1.0], vec![0.0]).unwrap();
        assert_eq!(admittance_range_residual(c(-1.0, 0.0), s, &boundary), 0.0);
        let p = AdmittanceParams::new(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(admittance_range_residual(c(0.0, 0.0), s, &p), 0.0);
        let p = AdmittanceParams::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(admittance_range_residual(c(0.0, 0.0), s, &p), -1.0);

        for f in [-0.7, 0.0, 0.4] {
            let p = ScatteringParams::new(vec![f], vec![-f]).unwrap();
            assert!(scattering_range_residual(c(1.0, 0.0), s, &p).abs() < 1e-15);
            let p = ScatteringParams::new(vec![f], vec![f]).unwrap();
            assert!(scattering_range_residual(c(-1.0, 0.0), s, &p).abs() < 1e-15);
        }
        assert_eq!(scattering_range_residual(c(0.0, 0.0), s, &ScatteringParams::zero(0)), 1.0);
    }

    #[test]
    fn higher_order_weights() {
        let s = c(0.5, 1.5);
        let s2 = s.norm_sqr();
        let w = c(0.2, -0.1);
        let p = AdmittanceParams::new(vec![0.1, 0.2, 0.3], vec![0.4, 0.5, 0.6]).unwrap();
        let expect = w.re - (0.1 + 0.4 * w.norm_sqr()) - s2 * (0.2 + 0.5 * w.norm_sqr()) - s2 * s2 * (0.3 + 0.6 * w.norm_sqr());
        assert!((admittance_range_residual(w, s, &p) - expect).abs() < 1e-15);
    }

    #[test]
    fn sweep_examples() {
        let grid = HalfPlaneGrid::default();
        assert_eq!(grid.points().len(), 25 * 41);
        let d1 = Kernel::dirac(1.0, 0.0, 1).unwrap();
        let rep = sweep(&d1, &grid, &AdmittanceParams::zero(0).into()).unwrap();
        assert!((rep.min_residual - 1e-2).abs() < 1e-15);
        let neg = Kernel::dirac(-1.0, 0.0, 0).unwrap();
        let rep = sweep(&neg, &grid, &AdmittanceParams::new(vec![-1.0], vec![0.0]).unwrap().into()).unwrap();
        assert!(rep.rows.iter().all(|r| r.residual == 0.0));
        let delay = Kernel::new(vec![DiracTerm::new(1.0, 1.0, 0)], vec![]).unwrap();
        let rep = sweep(&delay, &grid, &AdmittanceParams::zero(0).into()).unwrap();
        assert!(rep.min_residual < 0.0);
        assert!(rep.skipped.is_empty());
    }

    #[test]
    fn sweep_records_divergent_points() {
        let grow = Kernel::exp_poly(ExpPolyTerm::causal_exp(1.0)).unwrap();
        let grid = HalfPlaneGrid::new((0.5, 2.0), (-1.0, 1.0), 4, 3, Spacing::Linear).unwrap();
        let rep = sweep(&grow, &grid, &AdmittanceParams::zero(0).into()).unwrap();
        assert!(rep.non_tempered);
        assert_eq!(rep.skipped.len(), 6);
        assert_eq!(rep.rows.len(), 6);
    }

    #[test]
    fn csv_round_trip() {
        let samples = vec![
            TransferSample::new(c(0.1, -3.0), c(1.0 / 3.0, std::f64::consts::PI)).unwrap(),
            TransferSample::new(c(1e-7, 2.5e10), c(-0.0, 1e-300)).unwrap(),
        ];
        let mut buf = Vec::new();
        write_samples(&mut buf, &samples).unwrap();
        assert!(buf.starts_with(b"s_re,s_im,w_re,w_im\n"));
        assert_eq!(read_samples(&buf[..]).unwrap(), samples);
        assert!(read_samples(&b"s_re,s_im,w_re,w_im\n-1,0,0,0\n"[..]).is_err());
        assert!(read_samples(&b"a,b,c,d\n1,0,0,0\n"[..]).is_err());
        let extra = read_samples(&b"s_re,s_im,w_re,w_im,residual\n1,2,3,4,5\n"[..]).unwrap();
        assert_eq!(extra[0].w, c(3.0, 4.0));
        assert!(read_samples(&b"s_re,s_im,w_re,w_im\n1,0,x,0\n"[..]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(HalfPlaneGrid::new((0.0, 1.0), (0.0, 1.0), 2, 2, Spacing::Linear).is_err());
        assert!(HalfPlaneGrid::new((1.0, 0.5), (0.0, 1.0), 2, 2, Spacing::Linear).is_err());
        assert!(HalfPlaneGrid::new((0.1, 1.0), (0.0, 1.0), 0, 2, Spacing::Linear).is_err());
        let g = HalfPlaneGrid::new((0.01, 100.0), (0.0, 0.0), 5, 1, Spacing::LogRe).unwrap();
        let re: Vec<f64> = g.points().iter().map(|s| s.re).collect();
        for (a, b) in re.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }
}
