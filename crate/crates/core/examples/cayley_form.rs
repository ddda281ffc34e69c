//! The Cayley 4-form on ℝ⁸ and the splitting Λ² = Λ²₇ ⊕ Λ²₂₁.
//!
//! ```text
//! cargo run --example cayley_form
//! ```

use spin7lab::exterior8::{
    g2_line_form, hyperkahler_pair_form, phi0, standard_g2_form, standard_mus, standard_omegas, EigenSignature, Exact, KForm8,
};

fn main() -> spin7lab::Result<()> {
    let phi = phi0();
    println!("Φ₀ has {} terms:", phi.len());
    for (idx, c) in phi.terms() {
        let name: String = idx.iter().map(|i| char::from(b'1' + *i as u8)).collect();
        println!("  {c:>2} e{name}");
    }

    let sig = EigenSignature::of(&phi)?;
    println!("\n*(α∧Φ₀) on Λ²: eigenvalue 3 × {}, eigenvalue −1 × {}", sig.eig3_mult, sig.eig_minus1_mult);
    println!("exact: {}, (T−3)(T+1) = 0: {}, Φ∧Φ = {} vol", sig.exact, sig.minimal_polynomial_holds, sig.phi_wedge_phi);

    let hk = hyperkahler_pair_form(&standard_omegas::<Exact>(), &standard_mus())?;
    let g2 = g2_line_form(&standard_g2_form::<Exact>())?;
    println!("\nhyperkähler pair gives Φ₀: {}", hk.phi() == &phi);
    println!("G₂ line ℝ × ℝ⁷ gives Φ₀:  {}", g2.phi() == &phi);

    // ω₁ − μ₁ lies in Λ²₇ and ω₁ + μ₁ in Λ²₂₁.
    let (w, m) = (&standard_omegas::<Exact>()[0], &standard_mus::<Exact>()[0]);
    let report = |label: &str, a: &KForm8<Exact>| -> spin7lab::Result<()> {
        let p7 = hk.proj7(a)?;
        println!("π₇({label}) = {label}: {}   π₇({label}) = 0: {}", &p7 == a, p7.is_zero());
        Ok(())
    };
    println!();
    report("ω₁−μ₁", &w.sub(m))?;
    report("ω₁+μ₁", &w.add(m))?;
    println!("\nΦ₀ as JSON: {}", phi.to_json());
    Ok(())
}
