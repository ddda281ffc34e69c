//! Run verification suites from code and print the JSON report.
//!
//! ```text
//! cargo run --release --example verification_report
//! ```

use spin7lab::cli::{run, Command, RunConfig};

fn main() -> spin7lab::Result<()> {
    for command in [Command::AlgebraVerify, Command::Index] {
        let report = run(&RunConfig::for_command(command))?;
        for c in report.checks() {
            println!("{:<5} {:<28} {:>12} {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.value, c.describe_bound());
        }
    }
    let report = run(&RunConfig::for_command(Command::Index))?;
    print!("{}", report.to_json()?);
    Ok(())
}
