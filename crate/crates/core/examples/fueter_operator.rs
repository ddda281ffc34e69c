//! The lattice Fueter operator on ℝ⁴ and the component-wise test of the
//! Spin(7) condition on ℝ⁴ × ℝ⁴.
//!
//! ```text
//! cargo run --release --example fueter_operator
//! ```

use spin7lab::asd4::OneInstanton;
use spin7lab::exterior8::{hyperkahler_pair_form, standard_mus, standard_omegas, Exact};
use spin7lab::fueter::{componentwise_instanton_check, fueter_kernel_dimension, lift_residual, QuaternionField};
use spin7lab::product::FiberPullback;
use spin7lab::Quat;

fn main() -> spin7lab::Result<()> {
    let s = QuaternionField::from_fn(8, |x| [Quat::new(x[0].sin(), x[1].cos(), 0.0, (x[2] + x[3]).sin()), Quat::J.scale(x[1].sin())])?;
    println!("Fueter vs lifted Dirac: {:.2e}", lift_residual(&s)?);

    let k = fueter_kernel_dimension(8, 4, 1e-8)?;
    println!("kernel on |k|² ≤ 4: {} of {} (gap {:.2e})", k.kernel_dim, k.trial_dim, k.min_nonzero_ratio);

    let pair = hyperkahler_pair_form(&standard_omegas::<Exact>(), &standard_mus())?;
    let a = FiberPullback { inner: OneInstanton::new([0.1, 0.0, -0.2, 0.3], 0.8, Quat::ONE)? };
    let pts: Vec<[f64; 8]> = (0..64).map(|i| std::array::from_fn(|j| ((i * 8 + j) as f64 * 0.7).sin() * 1.5)).collect();
    let rep = componentwise_instanton_check(&a, &pair, &pts)?;
    println!("pulled-back instanton: |π₇F| ≤ {:.2e}, sd difference {:.2e}, mixed {:.2e}", rep.pi7, rep.sd_difference, rep.gamma_mixed);
    Ok(())
}
