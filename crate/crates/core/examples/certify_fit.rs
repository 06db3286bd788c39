//! Fit passivity parameters to frequency samples by linear programming and
//! cross-check against a brute-force grid.
//!
//! `cargo run --release --example certify_fit`

use pseudopass::certify::{brute_force_oracle, build_constraints, compare_with_oracle, fit, Kind, Objective, OracleGrid};
use pseudopass::laplace::{sweep, HalfPlaneGrid, Spacing};
use pseudopass::timedomain::{AdmittanceParams, Params};
use pseudopass::{ExpPolyTerm, Kernel};

fn main() -> pseudopass::Result<()> {
    // Samples of W(s) = 1/(s+1) - 0.3.
    let k = Kernel::exp_poly(ExpPolyTerm::causal_exp(-1.0))?.add(&Kernel::dirac(-0.3, 0.0, 0)?);
    let grid = HalfPlaneGrid::new((0.05, 20.0), (-20.0, 20.0), 6, 9, Spacing::LogRe)?;
    let p: Params = AdmittanceParams::zero(0).into();
    let samples = sweep(&k, &grid, &p)?.samples();
    let cs = build_constraints(&samples, 0, Kind::Admittance)?;

    let oracle_grid = OracleGrid {
        x_range: (-2.0, 2.0),
        y_range: (-2.0, 2.0),
        step: 1e-2,
    };
    let bx = oracle_grid.as_box();
    for objective in [Objective::MaxMargin, Objective::MaxHalfPlane, Objective::MaxDisk] {
        let r = fit(&cs, &bx, objective)?;
        println!("{objective:?}: {:?} (c, d) = ({:.4}, {:.4}) margin {:.4e}", r.status, r.x[0], r.x[1], r.margin);
    }
    let lp = fit(&cs, &bx, Objective::MaxMargin)?;
    let oracle = brute_force_oracle(&samples, Kind::Admittance, &oracle_grid)?;
    let agreement = compare_with_oracle(&cs, &lp, &oracle);
    println!(
        "oracle: {} of {} cells feasible, best cell margin {:.4e}, agrees with LP: {}",
        oracle.feasible_count,
        oracle.feasible.len(),
        agreement.best_cell_margin,
        agreement.agree
    );
    Ok(())
}
