//! Index formulas evaluated on the bundled K3 ledger, exactly.
//!
//! ```text
//! cargo run --example index_ledger
//! ```

use spin7lab::chern::{
    index_cayley, index_difference_check, index_fueter_charge1, index_spin7_general, index_spin7_su_r, thm_b_family_dimension, IndexLedger,
};
use spin7lab::cli::K3_LEDGER;

fn main() -> spin7lab::Result<()> {
    let ledger = IndexLedger::from_json(K3_LEDGER)?;
    let e0 = ledger.spin7()?;
    println!("SU(2), trivial: {}", index_spin7_su_r(e0)?);
    println!("same via 𝔤_E:   {}", index_spin7_general(&e0.adjoint_of_su()?)?);
    println!("Cayley K3:      {}", index_cayley(ledger.cayley()?));
    println!("Fueter K3:      {}", index_fueter_charge1(ledger.cayley()?));

    let d = index_difference_check(ledger.cayley()?, ledger.int_c2e0_q()?, e0, None)?;
    println!("\nind E − ind E₀ = {} = {} + {} + (5/3)·{}: {}", d.lhs, d.cayley, d.fueter, d.euler, d.holds);
    for k in 1..=4 {
        println!("charge {k}: family of dimension {}", thm_b_family_dimension(k)?);
    }
    Ok(())
}
