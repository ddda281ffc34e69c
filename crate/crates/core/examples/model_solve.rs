//! Linearised operator on ℝ⁴ × ℝ⁴ and the fixed-point solve of the reduced
//! radial problem.
//!
//! ```text
//! cargo run --release --example model_solve
//! ```

use spin7lab::asd4::OneInstanton;
use spin7lab::glue::GluingConfig;
use spin7lab::solve::{correction_report, picard_solve, weitzenboeck_check, PicardOptions, RadialModel, SeparableField};
use spin7lab::Quat;

fn main() -> spin7lab::Result<()> {
    let f = SeparableField::new(1, 8, |y| {
        let g = (-y.iter().map(|v| v * v).sum::<f64>()).exp();
        (0..16).map(|s| Quat::imaginary(g, (s as f64) * 0.1 * g, -g)).collect()
    });
    let pts: Vec<[f64; 4]> = (0..20).map(|i| std::array::from_fn(|j| ((3 * i + j) as f64).sin())).collect();
    for h in [f.h, f.h / 2.0] {
        let rep = weitzenboeck_check(&OneInstanton::unit(), &f.clone().with_h(h), &pts)?;
        println!("h = {h:<6} 𝐋*𝐋 vs Weitzenböck: {:.3e}", rep.residual);
    }

    let model = RadialModel::new(&GluingConfig::new(0.05)?, RadialModel::DEFAULT_NODES)?;
    let st = picard_solve(&model, None, PicardOptions::default())?;
    println!("\n‖Re‖ = {:.3e}, gate {:.3e}, ĉ = {:.3e}", st.re_norm, st.gate, st.constants.c_hat);
    for (n, r) in st.residual_history.iter().enumerate() {
        println!("  step {n}: residual {r:.3e}");
    }
    let corr = correction_report(&model, &st.iterate, 600, 2)?;
    println!("weighted |π₇F|: {:.3e} → {:.3e} (×{:.0})", corr.before, corr.after, corr.improvement);
    Ok(())
}
