//! Move samples between the admittance and scattering pictures and check
//! that the residuals transform by a positive factor.
//!
//! `cargo run --example cayley_convert`

use pseudopass::convert::{convert_samples, params_adm_to_scat, Direction, DEFAULT_POLE_TOL};
use pseudopass::laplace::{admittance_range_residual, scattering_range_residual, TransferSample};
use pseudopass::timedomain::AdmittanceParams;
use pseudopass::Complex64;

fn main() -> pseudopass::Result<()> {
    let samples: Vec<TransferSample> = [(1.0, 0.0), (0.5, 2.0), (2.0, -1.0), (0.1, 0.0)]
        .iter()
        .map(|&(re, im)| {
            let s = Complex64::new(re, im);
            TransferSample::new(s, s * 0.8 - 0.5)
        })
        .collect::<pseudopass::Result<_>>()?;
    let adm = AdmittanceParams::new(vec![-0.5], vec![0.25])?;
    let scat = params_adm_to_scat(&adm);
    println!("(c, d) = ({}, {})  ->  (F, G) = ({}, {})", adm.c[0], adm.d[0], scat.f[0], scat.g[0]);

    let report = convert_samples(&samples, Direction::AdmToScat, DEFAULT_POLE_TOL);
    for (before, after) in samples.iter().zip(&report.samples) {
        let ra = admittance_range_residual(before.w, before.s, &adm);
        let rs = scattering_range_residual(after.w, after.s, &scat);
        let factor = 4.0 / (1.0 + before.w).norm_sqr();
        println!(
            "w = {:.3}  σ = {:.3}  admittance {:+.4}  scattering {:+.4}  ratio {:.4} (expected {:.4})",
            before.w,
            after.w,
            ra,
            rs,
            rs / ra,
            factor
        );
    }
    println!("pole warnings: {}", report.pole_warnings.len());
    Ok(())
}
