//! First-order behaviour of π₇ near a Cayley plane for a position-dependent
//! Cayley form.
//!
//! ```text
//! cargo run --example taylor_mock
//! ```

use spin7lab::glue::{normal_asd_basis, taylor_pi7_split, TaylorMock};

fn main() -> spin7lab::Result<()> {
    let mock = TaylorMock::standard();
    for t in [0.1, 0.05, 0.025] {
        let split = taylor_pi7_split(&mock, [t, -t, 0.5 * t, 0.0])?;
        let kill = normal_asd_basis()
            .iter()
            .map(|v| (split.p1 * nalgebra::SVector::<f64, 28>::from_column_slice(v)).norm())
            .fold(0.0, f64::max);
        println!("|y| ~ {t:<6} |p₁| = {:.3e}  |rest| = {:.3e}  max |p₁ α| on normal ASD = {kill:.1e}", split.p1.norm(), split.rest.norm());
    }
    Ok(())
}
