//! The charge-one instanton on ℝ⁴: anti-self-duality, energy 8π², the eight
//! moduli tangent fields and their decay.
//!
//! ```text
//! cargo run --release --example bpst_instanton
//! ```

use spin7lab::asd4::{
    curvature, decay_slope, delta_i_apply, moduli_tangent_basis, radial_rule, sd_part, sphere_directions, two_form_norm_sqr,
    yang_mills_energy, GaugeField4, OneInstanton,
};
use spin7lab::Quat;

fn main() -> spin7lab::Result<()> {
    let inst = OneInstanton::new([0.5, 0.0, -0.25, 0.0], 0.7, Quat::new(1.0, 1.0, 0.0, 0.0).normalized())?;

    let f = curvature(&GaugeField4::OneInstanton(inst.clone()))?;
    let x = [0.9, -0.3, 0.2, 1.1];
    let fx = f.eval(x);
    println!("|F| = {:.6}, |F⁺| = {:.2e} at {x:?}", two_form_norm_sqr(&fx).sqrt(), two_form_norm_sqr(&sd_part(&fx)).sqrt());

    let energy = yang_mills_energy(&inst, &radial_rule([0.5, 0.0, -0.25, 0.0], 0.7, 48, (8, 8, 8)));
    println!("energy = {energy:.10}, 8π² = {:.10}", 8.0 * std::f64::consts::PI.powi(2));

    let unit = OneInstanton::unit();
    let dirs = sphere_directions(5);
    println!("\n{:<14} {:>12} {:>10}", "tangent", "|δ_I a|(x)", "decay");
    for a in moduli_tangent_basis(&unit)? {
        let d = delta_i_apply(&unit, &a, 1e-3)?;
        let slope = decay_slope(|y| a.norm_at(y), [0.0; 4], 5.0, 50.0, 24, &dirs);
        let label = a.label.map(|l| l.to_string()).unwrap_or_default();
        println!("{label:<14} {:>12.2e} {slope:>10.3}", d.norm_at(x));
    }
    let slope_f = decay_slope(|y| unit.curvature_norm_sqr(y).sqrt(), [0.0; 4], 5.0, 50.0, 24, &dirs);
    println!("curvature decay {slope_f:.3}");
    Ok(())
}
