//! Graft a shrinking instanton onto the flat connection and measure how the
//! Spin(7) error scales with λ. Prints the sweep table as CSV.
//!
//! ```text
//! cargo run --release --example pregluing_sweep
//! ```

use spin7lab::asd4::OneInstanton;
use spin7lab::cli::DEFAULT_LAMBDAS;
use spin7lab::glue::{error_field, error_sweep, graft, GluingConfig, SweepOptions};
use spin7lab::exterior8::Spin7Structure;

fn main() -> spin7lab::Result<()> {
    let cfg = GluingConfig::new(0.1)?;
    let e = error_field(&graft(&cfg, &OneInstanton::unit())?, &Spin7Structure::standard())?;
    for r in [0.05, 0.2, 0.4, 0.6, 1.0] {
        let (p7, p21) = e.split_norms([r, 0.0, 0.0, 0.0]);
        println!("r = {r:<5} |π₇e| = {p7:.3e}  |π₂₁e| = {p21:.3e}");
    }

    let res = error_sweep(&DEFAULT_LAMBDAS, &cfg, &OneInstanton::unit(), SweepOptions::default())?;
    println!("\nslope {:.4}, c = {:.4}, refinement change {:.1e}\n", res.slope, res.c, res.max_refinement_change);
    res.write_csv(std::io::stdout())
}
