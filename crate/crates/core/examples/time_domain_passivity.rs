//! Run the time-domain falsifier on a few textbook kernels.
//!
//! `cargo run --example time_domain_passivity`

use pseudopass::testfn::default_corpus;
use pseudopass::timedomain::{falsify, AdmittanceParams, Horizons, Params, DEFAULT_TOL};
use pseudopass::{Kernel, QuadratureSpec};

fn main() -> pseudopass::Result<()> {
    let q = QuadratureSpec::default();
    let corpus = default_corpus();
    let zero: Params = AdmittanceParams::zero(0).into();
    let boundary: Params = AdmittanceParams::new(vec![-1.0], vec![0.0])?.into();

    let cases = [
        ("derivative δ'", Kernel::dirac(1.0, 0.0, 1)?, zero.clone()),
        ("identity δ", Kernel::dirac(1.0, 0.0, 0)?, zero.clone()),
        ("negated identity -δ", Kernel::dirac(-1.0, 0.0, 0)?, zero),
        ("-δ with c = -1", Kernel::dirac(-1.0, 0.0, 0)?, boundary),
    ];
    for (name, k, p) in cases {
        let v = falsify(&k, &p, &corpus, &Horizons::default(), DEFAULT_TOL, &q);
        print!("{name:<22} {:?}  min residual {:+.3e}", v.status, v.min_residual);
        if let (true, Some(w)) = (v.is_falsified(), &v.witness) {
            print!("  witness {} at t = {:.3}", w.function, w.horizon);
        }
        println!();
    }
    Ok(())
}
