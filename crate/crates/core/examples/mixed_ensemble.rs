//! A Nakagami branch combined with a Rice branch twice as strong. No closed
//! form exists for the saddlepoint here, so the solver falls back to Newton.
//!
//! cargo run --example mixed_ensemble

use saddle_outage::numerics::db_to_linear;
use saddle_outage::{outage_probability, BranchSpec, ChannelEnsemble, OutageMethod};

fn main() -> saddle_outage::Result<()> {
    for g1_db in [5.0, 8.0, 12.0] {
        let g1 = db_to_linear(g1_db);
        let ens = ChannelEnsemble::new(vec![
            BranchSpec::nakagami(1.5, g1)?,
            BranchSpec::rice(5.0, 2.0 * g1)?,
        ])?;
        println!("mean SNR of branch 1: {g1_db} dB");
        for db in [-5.0, 0.0, 5.0, 10.0] {
            let x = db_to_linear(db);
            let est = outage_probability(&ens, x, OutageMethod::SpaFull)?;
            let sol = est.solution().expect("saddlepoint estimate");
            println!(
                "  x = {db:>5} dB  P_out = {:.6e}  s = {:+.5}  ({:?}, {} iterations)",
                est.value, sol.s_hat, sol.method, sol.iterations
            );
        }
    }
    Ok(())
}
