//! Passage between the admittance and scattering descriptions: the parameter
//! map `F = c + d`, `G = c − d` and the Cayley map `w ↦ (1 − w)/(1 + w)` on
//! transfer samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplace::TransferSample;
use crate::timedomain::{AdmittanceParams, ScatteringParams};

/// Default lower bound on `|1 + w|`.
pub const DEFAULT_POLE_TOL: f64 = 1e-9;

pub fn params_adm_to_scat(p: &AdmittanceParams) -> ScatteringParams {
    ScatteringParams {
        f: p.c.iter().zip(&p.d).map(|(c, d)| c + d).collect(),
        g: p.c.iter().zip(&p.d).map(|(c, d)| c - d).collect(),
    }
}

pub fn params_scat_to_adm(p: &ScatteringParams) -> AdmittanceParams {
    AdmittanceParams {
        c: p.f.iter().zip(&p.g).map(|(f, g)| (f + g) / 2.0).collect(),
        d: p.f.iter().zip(&p.g).map(|(f, g)| (f - g) / 2.0).collect(),
    }
}

/// `(1 − w)/(1 + w)`, refusing points within `tol` of the pole at `w = −1`.
pub fn cayley(w: Complex64, tol: f64) -> Result<Complex64> {
    let den = 1.0 + w;
    let magnitude = den.norm();
    if !(magnitude >= tol) {
        return Err(Error::Pole { magnitude, tol });
    }
    Ok((1.0 - w) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "adm-to-scat")]
    AdmToScat,
    #[serde(rename = "scat-to-adm")]
    ScatToAdm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversionReport {
    pub direction: Direction,
    pub samples: Vec<TransferSample>,
    /// Frequencies `s` whose samples sat on the pole and were dropped.
    pub pole_warnings: Vec<Complex64>,
}

/// Applies the Cayley map pointwise. The map is an involution, so both
/// directions use it; only the report label differs.
pub fn convert_samples(samples: &[TransferSample], direction: Direction, tol: f64) -> ConversionReport {
    let mut out = Vec::with_capacity(samples.len());
    let mut pole_warnings = Vec::new();
    for t in samples {
        match cayley(t.w, tol) {
            Ok(w) => out.push(TransferSample { s: t.s, w }),
            Err(_) => pole_warnings.push(t.s),
        }
    }
    ConversionReport {
        direction,
        samples: out,
        pole_warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::{admittance_range_residual, scattering_range_residual};

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parameter_map_examples() {
        let p = AdmittanceParams::new(vec![-1.0], vec![0.0]).unwrap();
        let s = params_adm_to_scat(&p);
        assert_eq!((s.f.clone(), s.g.clone()), (vec![-1.0], vec![-1.0]));
        assert_eq!(params_scat_to_adm(&s), p);
        let s = ScatteringParams::new(vec![1.0], vec![-1.0]).unwrap();
        assert_eq!(params_scat_to_adm(&s), AdmittanceParams::new(vec![0.0], vec![1.0]).unwrap());
        assert_eq!(params_adm_to_scat(&AdmittanceParams::zero(3)), ScatteringParams::zero(3));
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(cayley(z(1.0, 0.0), DEFAULT_POLE_TOL).unwrap(), z(0.0, 0.0));
        assert_eq!(cayley(z(0.0, 0.0), DEFAULT_POLE_TOL).unwrap(), z(1.0, 0.0));
        assert!(matches!(cayley(z(-1.0, 0.0), DEFAULT_POLE_TOL), Err(Error::Pole { .. })));
        let w = z(0.3, -2.0);
        let back = cayley(cayley(w, 1e-9).unwrap(), 1e-9).unwrap();
        assert!((back - w).norm() < 1e-15);
    }

    #[test]
    fn sample_conversion_examples() {
        let pts = [z(0.1, 0.0), z(1.0, 5.0), z(3.0, -2.0)];
        let ones: Vec<_> = pts.iter().map(|&s| TransferSample { s, w: z(1.0, 0.0) }).collect();
        let r = convert_samples(&ones, Direction::AdmToScat, DEFAULT_POLE_TOL);
        assert!(r.pole_warnings.is_empty());
        assert!(r.samples.iter().all(|t| t.w == z(0.0, 0.0)));
        let neg: Vec<_> = pts.iter().map(|&s| TransferSample { s, w: z(-1.0, 0.0) }).collect();
        let r = convert_samples(&neg, Direction::AdmToScat, DEFAULT_POLE_TOL);
        assert!(r.samples.is_empty());
        assert_eq!(r.pole_warnings, pts.to_vec());

        // W(s) = s: admittance-feasible (c, d) stay feasible after conversion.
        let ident: Vec<_> = pts.iter().map(|&s| TransferSample { s, w: s }).collect();
        let r = convert_samples(&ident, Direction::AdmToScat, DEFAULT_POLE_TOL);
        let adm = AdmittanceParams::new(vec![0.05], vec![-0.3]).unwrap();
        let scat = params_adm_to_scat(&adm);
        for (a, b) in ident.iter().zip(&r.samples) {
            let ra = admittance_range_residual(a.w, a.s, &adm);
            let rb = scattering_range_residual(b.w, b.s, &scat);
            assert!(ra >= 0.0 && rb >= 0.0);
            assert!((rb - 4.0 * ra / (1.0 + a.w).norm_sqr()).abs() < 1e-12);
        }
    }
}
