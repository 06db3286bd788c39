//! Sample transfer functions on the right half-plane and look for the worst
//! range residual.
//!
//! `cargo run --example laplace_sweep`

use pseudopass::laplace::{laplace_eval, sweep, HalfPlaneGrid};
use pseudopass::timedomain::{AdmittanceParams, Params};
use pseudopass::{Complex64, ExpPolyTerm, Kernel};

fn main() -> pseudopass::Result<()> {
    let grid = HalfPlaneGrid::default();
    let zero: Params = AdmittanceParams::zero(0).into();
    let kernels = [
        ("e^-t H(t)", Kernel::exp_poly(ExpPolyTerm::causal_exp(-1.0))?),
        ("delay δ(t-1)", Kernel::dirac(1.0, 1.0, 0)?),
        ("t e^-t H(t)", Kernel::exp_poly(ExpPolyTerm::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], -1.0, 0.0))?),
    ];
    for (name, k) in &kernels {
        let w1 = laplace_eval(k, Complex64::new(1.0, 0.0))?;
        let report = sweep(k, &grid, &zero)?;
        let at = report.argmin.unwrap();
        println!(
            "{name:<14} W(1) = {:.4}  min Re W = {:+.4e} at s = {:.3}{:+.3}i over {} points",
            w1.re,
            report.min_residual,
            at.re,
            at.im,
            report.rows.len()
        );
    }
    Ok(())
}
