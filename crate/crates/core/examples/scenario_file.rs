//! Load a scenario document and render the curve table as the binary would.
//!
//! cargo run --example scenario_file

use saddle_outage::cli::{parse_scenario, run_curve};

const SCENARIO: &str = r#"
methods = ["spa", "spa-simple"]

[[branches]]
family = "rice"
k = 2.0
mean_snr_db = 5.0

[[branches]]
family = "hoyt"
q = 0.3
mean_snr_db = 7.0

[grid]
x_start_db = -15.0
x_stop_db = 10.0
points = 6
"#;

fn main() -> saddle_outage::Result<()> {
    let req = parse_scenario(SCENARIO)?;
    let table = run_curve(&req, None)?;
    print!("{}", table.render(req.output.format));
    for note in &table.notes {
        eprintln!("note: {note}");
    }
    Ok(())
}
