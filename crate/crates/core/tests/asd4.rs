use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spin7lab::asd4::*;
use spin7lab::norms::{weighted_sup_norm, WeightSpec};
use spin7lab::numerics::quad::adaptive_simpson;
use spin7lab::numerics::{geomspace, random_unit};
use spin7lab::{Error, Quat};
use std::f64::consts::PI;

fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Point4 {
    std::array::from_fn(|_| rng.random_range(-scale..scale))
}

fn random_framing(rng: &mut ChaCha8Rng) -> Quat {
    Quat::from_array(random_unit::<4, _>(rng))
}

#[test]
fn energy_matches_radial_oracle() {
    // ∫ 48/(1+r²)⁴ 2π² r³ dr with r = tan t becomes 96π² ∫ sin³t cos³t dt
    let oracle = 96.0 * PI * PI * adaptive_simpson(&|t: f64| t.sin().powi(3) * t.cos().powi(3), 0.0, PI / 2.0, 1e-14);
    assert!((oracle - 8.0 * PI * PI).abs() < 1e-9);
    let rule = radial_rule([0.0; 4], 1.0, 48, (8, 8, 8));
    let e = yang_mills_energy(&OneInstanton::unit(), &rule);
    assert!((e - oracle).abs() < 1e-8 * oracle, "{e} vs {oracle}");
}

#[test]
fn energy_is_invariant_under_the_family_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = 8.0 * PI * PI;
    for _ in 0..4 {
        let c = random_point(&mut rng, 1.0);
        let l = rng.random_range(0.3..3.0);
        let inst = OneInstanton::new(c, l, random_framing(&mut rng)).unwrap();
        let rule = radial_rule(c, l, 48, (8, 8, 8));
        let e = yang_mills_energy(&inst, &rule);
        assert!((e / base - 1.0).abs() < 1e-6, "{e}");
    }
}

#[test]
fn asd_residual_for_random_family_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for gauge in [Gauge::Regular, Gauge::Singular] {
        let inst = OneInstanton::with_gauge(random_point(&mut rng, 1.0), rng.random_range(0.2..2.0), random_framing(&mut rng), gauge).unwrap();
        let f = curvature(&GaugeField4::OneInstanton(inst)).unwrap();
        for _ in 0..100 {
            let x = random_point(&mut rng, 3.0);
            let fx = f.eval(x);
            let sd = two_form_norm_sqr(&sd_part(&fx)).sqrt();
            assert!(sd <= 1e-10 * two_form_norm_sqr(&fx).sqrt(), "{gauge:?}: {sd}");
        }
    }
}

#[test]
fn sampled_curvature_agrees_with_analytic() {
    let inst = OneInstanton::unit();
    let sampled = GaugeField4::sampled_from(&inst, 0.01);
    let f = curvature(&sampled).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x = random_point(&mut rng, 2.0);
        let (a, b) = (f.eval(x), inst.curvature(x));
        let diff: f64 = (0..6).map(|k| (a[k] - b[k]).su2_norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-6, "{diff}");
    }
}

#[test]
fn coarse_grid_is_rejected() {
    let g = GaugeField4::sampled_from(&OneInstanton::unit(), 0.2);
    assert!(matches!(curvature(&g), Err(Error::GridTooCoarse { .. })));
}

#[test]
fn flat_field_has_zero_curvature() {
    let f = curvature(&GaugeField4::flat()).unwrap();
    assert_eq!(two_form_norm_sqr(&f.eval([0.3, -0.2, 0.5, 1.0])), 0.0);
}

#[test]
fn nonpositive_scale_rejected() {
    assert!(matches!(OneInstanton::new([0.0; 4], 0.0, Quat::ONE), Err(Error::NonPositiveScale(_))));
    assert!(matches!(OneInstanton::new([0.0; 4], -1.0, Quat::ONE), Err(Error::NonPositiveScale(_))));
}

#[test]
fn curvature_decays_like_r_minus_4() {
    let dirs = sphere_directions(6);
    let inst = OneInstanton::unit();
    let s = decay_slope(|x| inst.curvature_norm_sqr(x).sqrt(), [0.0; 4], 5.0, 50.0, 24, &dirs);
    assert!((s + 4.0).abs() < 0.1, "{s}");
}

#[test]
fn dilation_equivariance() {
    // A_λ(x) = A_1(x/λ)/λ for the centred family
    let one = OneInstanton::unit();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for &l in &[0.25, 0.5, 3.0] {
        let inst = OneInstanton::new([0.0; 4], l, Quat::ONE).unwrap();
        for _ in 0..10 {
            let x = random_point(&mut rng, 2.0);
            let a = inst.potential(x);
            let b = one.potential(x.map(|c| c / l));
            for mu in 0..4 {
                assert!((a[mu] - b[mu].scale(1.0 / l)).max_abs() < 1e-14);
            }
        }
    }
}

#[test]
fn tangent_basis_lies_in_the_kernel() {
    let inst = OneInstanton::unit();
    let basis = moduli_tangent_basis(&inst).unwrap();
    assert_eq!(basis.len(), 8);
    let dirs = sphere_directions(5);
    let radii = geomspace(0.05, 50.0, 32);
    let spec = WeightSpec::new(-4.0, 0.0, 1.0).unwrap();
    for a in &basis {
        let d = delta_i_apply(&inst, a, 1e-3).unwrap();
        let f = sample_radial(|x| d.components(x), [0.0; 4], &radii, &dirs).unwrap();
        let n = weighted_sup_norm(&f, &spec).unwrap();
        assert!(n < 1e-5, "{:?}: {n}", a.label);
    }
}

#[test]
fn tangent_fields_decay() {
    let inst = OneInstanton::unit();
    let basis = moduli_tangent_basis(&inst).unwrap();
    let dirs = sphere_directions(5);
    let env = decay_slope(|x| basis.iter().map(|a| a.norm_at(x)).fold(0.0, f64::max), [0.0; 4], 5.0, 50.0, 24, &dirs);
    assert!((env + 3.0).abs() < 0.1, "{env}");
    for a in &basis[4..] {
        let s = decay_slope(|x| a.norm_at(x), [0.0; 4], 5.0, 50.0, 24, &dirs);
        assert!((s + 3.0).abs() < 0.1, "{:?}: {s}", a.label);
    }
    for a in &basis[..4] {
        let s = decay_slope(|x| a.norm_at(x), [0.0; 4], 5.0, 50.0, 24, &dirs);
        assert!((s + 4.0).abs() < 0.1, "{:?}: {s}", a.label);
    }
}

#[test]
fn gram_matrix_is_nonsingular() {
    let inst = OneInstanton::unit();
    let basis = moduli_tangent_basis(&inst).unwrap();
    let rule = radial_rule([0.0; 4], 1.0, 40, (6, 6, 8));
    let g = gram_matrix(&basis, &rule);
    let m = nalgebra::DMatrix::from_fn(8, 8, |i, j| g[i][j]);
    let eig = m.symmetric_eigen().eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
    assert!(lo > 0.0 && hi / lo < 1e3, "{lo} {hi}");
}

#[test]
fn quaternionic_action_preserves_the_kernel() {
    let inst = OneInstanton::unit();
    let basis = moduli_tangent_basis(&inst).unwrap();
    let dirs = sphere_directions(4);
    let radii = geomspace(0.05, 20.0, 16);
    for k in 0..3 {
        for a in &basis {
            let j = quaternionic_action(k, a);
            let d = delta_i_apply(&inst, &j, 1e-3).unwrap();
            let env = radial_envelope(|x| d.norm_at(x), [0.0; 4], &radii, &dirs);
            let sup = env.iter().cloned().fold(0.0, f64::max);
            assert!(sup < 1e-6, "J{k} {:?}: {sup}", a.label);
        }
    }
}

#[test]
fn delta_of_zero_and_of_a_bump() {
    let inst = OneInstanton::unit();
    let z = delta_i_apply(&inst, &InfinitesimalDeformation::zero(), 1e-3).unwrap();
    assert_eq!(z.norm_at([0.1, 0.2, 0.3, 0.4]), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c: [Quat; 4] = std::array::from_fn(|_| {
        let v = random_unit::<3, _>(&mut rng);
        Quat::imaginary(v[0], v[1], v[2])
    });
    let bump = InfinitesimalDeformation::new(None, move |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let b = if r2 < 1.0 { (-1.0 / (1.0 - r2)).exp() } else { 0.0 };
        c.map(|q| q.scale(b))
    });
    let d = delta_i_apply(&inst, &bump, 1e-3).unwrap();
    assert!(d.norm_at([0.2, -0.1, 0.3, 0.1]) > 1e-3);
}

#[test]
fn incompatible_grid_rejected() {
    let a = InfinitesimalDeformation::zero().with_grid(0.01);
    assert!(matches!(delta_i_apply(&OneInstanton::unit(), &a, 0.02), Err(Error::IncompatibleGrids(_))));
}

#[test]
fn sd_asd_split_of_omega1() {
    let mut w = [Quat::ZERO; 6];
    w[pair4(0, 1)] = Quat::I;
    w[pair4(2, 3)] = Quat::I;
    assert_eq!(sd_part(&w), w);
    assert!(two_form_norm_sqr(&asd_part(&w)) == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sd_and_asd_parts_split_two_forms(v in proptest::collection::vec(-1.0f64..1.0, 24)) {
        let f: TwoForm4 = std::array::from_fn(|k| Quat::new(v[4 * k], v[4 * k + 1], v[4 * k + 2], v[4 * k + 3]));
        let (s, a) = (sd_part(&f), asd_part(&f));
        for k in 0..6 {
            prop_assert!((s[k] + a[k] - f[k]).max_abs() < 1e-15);
        }
        let ss = sd_part(&s);
        for k in 0..6 {
            prop_assert!((ss[k] - s[k]).max_abs() < 1e-15);
        }
        prop_assert!(two_form_norm_sqr(&sd_part(&a)) < 1e-28);
    }

    #[test]
    fn curvature_is_asd_everywhere(x in proptest::array::uniform4(-4.0f64..4.0), l in 0.1f64..5.0) {
        let inst = OneInstanton::new([0.0; 4], l, Quat::ONE).unwrap();
        let f = inst.curvature(x);
        prop_assert!(two_form_norm_sqr(&sd_part(&f)).sqrt() <= 1e-10 * two_form_norm_sqr(&f).sqrt());
        let closed = inst.curvature_norm_sqr(x);
        prop_assert!((two_form_norm_sqr(&f) - closed).abs() <= 1e-10 * closed);
    }
}
