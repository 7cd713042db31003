//! Check the saddlepoint approximation against a seeded Monte Carlo run on
//! Hoyt branches.
//!
//! cargo run --release --example monte_carlo

use saddle_outage::numerics::db_to_linear;
use saddle_outage::oracles::monte_carlo_cdf_grid;
use saddle_outage::{spa_cdf, BranchSpec, ChannelEnsemble, McConfig};

fn main() -> saddle_outage::Result<()> {
    let ens = ChannelEnsemble::iid(BranchSpec::hoyt(0.5, db_to_linear(5.0))?, 3)?;
    let cfg = McConfig {
        samples: 2_000_000,
        ..McConfig::default()
    };
    let xs: Vec<f64> = [-6.0, -3.0, 0.0, 3.0, 6.0].map(db_to_linear).to_vec();
    let mc = monte_carlo_cdf_grid(&ens, &xs, &cfg)?;
    println!("{:>10} {:>13} {:>13} {:>27}", "x", "spa", "mc", "99% interval");
    for (x, est) in xs.iter().zip(&mc) {
        let spa = spa_cdf(&ens, *x)?.value;
        let mark = if est.contains(spa) { "" } else { "  outside" };
        println!(
            "{x:10.4} {spa:13.5e} {:13.5e} [{:.5e}, {:.5e}]{mark}",
            est.value, est.ci_low, est.ci_high
        );
    }
    Ok(())
}
