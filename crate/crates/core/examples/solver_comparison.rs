//! Closed-form saddlepoints, safeguarded Newton and the plain Newton
//! recursion with a fixed number of steps.
//!
//! cargo run --example solver_comparison

use saddle_outage::numerics::db_to_linear;
use saddle_outage::saddlepoint::{
    solve_nakagami_pair, solve_newton, solve_unguarded, DEFAULT_K_MAX, DEFAULT_TOL,
};
use saddle_outage::{BranchSpec, ChannelEnsemble};

fn main() -> saddle_outage::Result<()> {
    let a = BranchSpec::nakagami(1.0, db_to_linear(5.0))?;
    let b = BranchSpec::nakagami(2.0, 2.0 * db_to_linear(5.0))?;
    let ens = ChannelEnsemble::new(vec![a, b])?;

    println!("{:>6} {:>14} {:>14} {:>4} {:>12} {:>12}", "x dB", "closed form", "newton", "it", "5 steps", "residual");
    for db in [-10.0, -5.0, 0.0, 5.0, 10.0] {
        let x = db_to_linear(db);
        let closed = solve_nakagami_pair(a, b, x)?;
        let newton = solve_newton(&ens, x, DEFAULT_K_MAX, DEFAULT_TOL)?;
        let (replay, residual) = match solve_unguarded(&ens, x, 5) {
            Ok(s) => (format!("{:12.5}", s.s_hat), format!("{:12.2e}", s.residual)),
            Err(_) => (format!("{:>12}", "diverged"), String::new()),
        };
        println!(
            "{db:>6} {:14.8} {:14.8} {:>4} {replay} {residual}",
            closed.s_hat, newton.s_hat, newton.iterations
        );
    }
    Ok(())
}
