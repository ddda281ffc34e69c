//! Weighted Hölder norms adapted to a bubble of scale λ.
//!
//! ```text
//! cargo run --release --example weighted_norms
//! ```

use spin7lab::asd4::{sample_radial, sphere_directions, OneInstanton};
use spin7lab::norms::{check_multiplication, holder_norm, weight, weighted_sup_norm, WeightSpec, DEFAULT_PAIR_CAP};
use spin7lab::numerics::geomspace;

fn main() -> spin7lab::Result<()> {
    let lambda = 0.05;
    let spec = WeightSpec::new(-2.0, -0.5, lambda)?;
    println!("{:>8} {:>12}", "r", "w(r)");
    for r in [0.0, 0.01, lambda, lambda.sqrt(), 1.0] {
        println!("{r:>8.4} {:>12.5}", weight(&spec, r));
    }

    // |F| of an instanton of scale λ is O(1) in the ℓ = −2 norm.
    let inst = OneInstanton::new([0.0; 4], lambda, spin7lab::Quat::ONE)?;
    let f = sample_radial(|x| vec![inst.curvature_norm_sqr(x).sqrt()], [0.0; 4], &geomspace(1e-3, 2.0, 80), &sphere_directions(3))?
        .with_pairs(lambda, DEFAULT_PAIR_CAP, 0);
    let plain = WeightSpec::new(-2.0, 0.0, lambda)?;
    println!("\n‖F_λ‖ sup {:.4}, C^0,½ {:.4}", weighted_sup_norm(&f, &plain)?, holder_norm(&f, &plain, 0.5)?);

    let m = check_multiplication(&f, &f, &plain, &plain, 0.5, |a, b| vec![a[0] * b[0]])?;
    println!("‖F·F‖ = {:.4} ≤ {:.4}: {}", m.product_norm, m.bound, m.holds);
    Ok(())
}
