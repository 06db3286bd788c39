//! Fold the `c` parameters into the kernel and check the weak passivity of
//! the result, plus a causality probe.
//!
//! `cargo run --release --example reduced_kernel`

use pseudopass::testfn::default_corpus;
use pseudopass::timedomain::{admittance_residual, causality_check, weak_passivity_residual, AdmittanceParams};
use pseudopass::{Kernel, QuadratureSpec};

fn main() -> pseudopass::Result<()> {
    let q = QuadratureSpec::default();
    let corpus = default_corpus();

    let k = Kernel::dirac(1.0, 1.0, 0)?;
    let c = vec![-1.0, 0.25];
    let p = AdmittanceParams::new(c.clone(), vec![0.0; c.len()])?;
    let reduced = k.tilde_transform(&c);
    println!("kernel  {k}\nreduced {reduced}");
    let mut worst: f64 = 0.0;
    for phi in &corpus {
        let direct = admittance_residual(&k, phi, f64::INFINITY, &p, &q)?;
        let folded = weak_passivity_residual(&reduced, phi, &q)?;
        worst = worst.max((direct - folded).abs());
    }
    println!("max |full-line residual - reduced pairing| over {} functions: {worst:.2e}", corpus.len());

    for (name, k) in [("delay δ(t-1)", Kernel::dirac(1.0, 1.0, 0)?), ("advance δ(t+1)", Kernel::dirac(1.0, -1.0, 0)?)] {
        let report = causality_check(&k, 0.0, &corpus, 1e-9, &q);
        println!("{name}: causal = {} ({} functions, {} violations)", report.causal, report.checked_functions, report.violations.len());
    }
    Ok(())
}
