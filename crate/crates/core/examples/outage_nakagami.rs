//! Outage of L-branch MRC over identical Nakagami-m branches: saddlepoint
//! approximation against the exact gamma CDF.
//!
//! cargo run --example outage_nakagami

use saddle_outage::numerics::db_to_linear;
use saddle_outage::saddlepoint::spa_cdf_simplified;
use saddle_outage::{exact_nakagami_iid_cdf, spa_cdf, BranchSpec, ChannelEnsemble};

fn main() -> saddle_outage::Result<()> {
    let branch = BranchSpec::nakagami(2.0, db_to_linear(5.0))?;
    for l in [2, 5, 8] {
        let ens = ChannelEnsemble::iid(branch, l)?;
        println!("L = {l}, mean SNR {:.3}", ens.mean());
        println!("{:>8} {:>14} {:>14} {:>14}", "x [dB]", "exact", "spa", "spa-simple");
        for db in (-10..=10).step_by(4) {
            let x = db_to_linear(db as f64);
            let exact = exact_nakagami_iid_cdf(2.0, branch.mean_snr(), l, x)?;
            let full = spa_cdf(&ens, x)?.value;
            let simple = spa_cdf_simplified(&ens, x)
                .map(|e| format!("{:14.6e}", e.value))
                .unwrap_or_else(|_| format!("{:>14}", "-"));
            println!("{db:>8} {exact:14.6e} {full:14.6e} {simple}");
        }
        println!();
    }
    Ok(())
}
