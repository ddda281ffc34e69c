use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spin7lab::asd4::{moduli_tangent_basis, radial_rule, sphere_directions, OneInstanton, Point4};
use spin7lab::exterior8::Spin7Structure;
use spin7lab::glue::{error_field, graft, GluingConfig};
use spin7lab::norms::{weight, WeightSpec};
use spin7lab::numerics::geomspace;
use spin7lab::solve::*;
use spin7lab::{Error, Quat};

fn random_quat(rng: &mut ChaCha8Rng) -> Quat {
    Quat::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Sum of Gaussian bumps with su(2) coefficients in every slot.
fn random_field(rng: &mut ChaCha8Rng, k: u32, dim: usize) -> SeparableField {
    let bumps: Vec<(Point4, f64, Vec<Quat>)> = (0..3)
        .map(|_| {
            let c = std::array::from_fn(|_| rng.random_range(-0.7..0.7));
            let w = rng.random_range(0.6..1.0);
            let q = (0..2 * dim).map(|_| random_quat(rng).im()).collect();
            (c, w, q)
        })
        .collect();
    SeparableField::new(k, dim, move |y| {
        let mut out = vec![Quat::ZERO; 2 * dim];
        for (c, w, q) in &bumps {
            let d2: f64 = (0..4).map(|i| (y[i] - c[i]).powi(2)).sum();
            let g = (-d2 / (w * w)).exp();
            for (o, qi) in out.iter_mut().zip(q) {
                *o += qi.scale(g);
            }
        }
        out
    })
}

fn ball_points(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Point4> {
    (0..n).map(|_| std::array::from_fn(|_| rng.random_range(-radius..radius))).collect()
}

fn scaled(d: &Point4, r: f64) -> Point4 {
    d.map(|v| v * r)
}

#[test]
fn tangent_fields_lie_in_the_kernel() {
    let inst = OneInstanton::unit();
    let op = ModelOperator::instanton(&inst);
    let spec = WeightSpec::new(-4.0, 0.0, 1.0).unwrap();
    let dirs = sphere_directions(3);
    let radii = geomspace(0.05, 20.0, 16);
    for a in moduli_tangent_basis(&inst).unwrap() {
        let f = SeparableField::from_fiber_one_form(0, move |y| a.eval(y)).with_h(0.01).with_stencil(Stencil::Fourth);
        let lf = op.apply(&f).unwrap();
        let worst = radii
            .iter()
            .flat_map(|&r| dirs.iter().map(move |d| (r, scaled(d, r))))
            .map(|(r, y)| weight(&spec, r) * lf.norm_at(y))
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "weighted |L a| = {worst:e}");
    }
}

#[test]
fn nonzero_mode_is_bounded_below() {
    let q: Vec<Quat> = (0..8).map(|i| Quat::imaginary(0.3 * i as f64, 1.0, -0.5)).collect();
    let qc = q.clone();
    let f = SeparableField::from_parts(1, 8, move |_| qc.clone(), |_| vec![Quat::ZERO; 8]);
    let norm_f = f.norm_at([0.0; 4]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts: Vec<Point4> = (0..40).map(|_| scaled(&std::array::from_fn(|_| rng.random_range(-1.0..1.0)), 30.0)).collect();
    let flat = ModelOperator::flat().apply(&f).unwrap();
    for y in &pts {
        assert!((flat.norm_at(*y) - norm_f).abs() < 1e-12);
    }
    let lf = ModelOperator::instanton(&OneInstanton::unit()).apply(&f).unwrap();
    assert!(lf.sup_norm(&pts) >= norm_f - 1e-2);
}

#[test]
fn model_operator_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let op = ModelOperator::instanton(&OneInstanton::unit());
    for _ in 0..5 {
        let (f, g) = (random_field(&mut rng, 1, 8), random_field(&mut rng, 1, 8));
        let sum = f.combine(1.0, &g, 1.0).unwrap();
        let lhs = op.apply(&sum).unwrap();
        let rhs = op.apply(&f).unwrap().combine(1.0, &op.apply(&g).unwrap(), 1.0).unwrap();
        let diff = lhs.combine(1.0, &rhs, -1.0).unwrap();
        let pts = ball_points(&mut rng, 20, 1.5);
        assert!(diff.sup_norm(&pts) < 1e-12 * lhs.sup_norm(&pts).max(1.0));
    }
}

#[test]
fn under_resolved_grid_rejected() {
    let f = SeparableField::zero(0, 8).with_h(0.1);
    let i = OneInstanton::new([0.0; 4], 0.2, Quat::ONE).unwrap();
    assert!(matches!(l_model_apply(&i, &f), Err(Error::GridTooCoarse { .. })));
    assert!(matches!(l_model_apply(&OneInstanton::unit(), &SeparableField::zero(0, 29)), Err(Error::InvalidArgument(_))));
}

/// `∫ ⟨u, v⟩` over ℝ⁴ with the radial product rule.
fn l2(u: &SeparableField, v: &SeparableField) -> f64 {
    let rule = radial_rule([0.0; 4], 1.0, 48, (8, 8, 8));
    rule.integrate(|y| u.eval(y).iter().zip(v.eval(y)).map(|(a, b)| 2.0 * a.dot(b)).sum())
}

#[test]
fn adjoint_is_numerical_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let op = ModelOperator::instanton(&OneInstanton::unit());
    for k in [0, 1] {
        let f = random_field(&mut rng, k, 8);
        let g = random_field(&mut rng, k, 29);
        let lhs = l2(&op.apply(&f).unwrap(), &g);
        let rhs = l2(&f, &op.adjoint(&g).unwrap());
        let scale = l2(&f, &f).sqrt() * l2(&g, &g).sqrt();
        assert!((lhs - rhs).abs() < 1e-3 * scale, "k={k}: {lhs} vs {rhs} (scale {scale})");
    }
}

#[test]
fn weitzenboeck_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = OneInstanton::unit();
    let pts = ball_points(&mut rng, 40, 1.2);
    for k in [0, 1] {
        let f = random_field(&mut rng, k, 8);
        let coarse = weitzenboeck_check(&inst, &f, &pts).unwrap();
        let fine = weitzenboeck_check(&inst, &f.clone().with_h(f.h / 2.0), &pts).unwrap();
        assert!(coarse.residual < 1e-3, "residual {}", coarse.residual);
        let ratio = coarse.residual / fine.residual;
        assert!(ratio >= 3.5, "refinement ratio {ratio}");
    }
}

#[test]
fn weitzenboeck_on_kernel_fields() {
    let inst = OneInstanton::unit();
    let op = ModelOperator::instanton(&inst);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pts = ball_points(&mut rng, 10, 1.5);
    let basis = moduli_tangent_basis(&inst).unwrap();
    for a in basis.into_iter().take(5) {
        let f = SeparableField::from_fiber_one_form(0, move |y| a.eval(y));
        let lll = op.adjoint(&op.apply(&f).unwrap()).unwrap();
        let half = f.clone().with_h(f.h / 2.0);
        let lll_half = op.adjoint(&op.apply(&half).unwrap()).unwrap();
        let (e1, e2) = (lll.sup_norm(&pts), lll_half.sup_norm(&pts));
        assert!(e1 < 1e-2 * f.sup_norm(&pts), "{e1}");
        assert!(e1 / e2 > 3.0, "{e1} -> {e2}");
    }
}

#[test]
fn weitzenboeck_mode_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let op = ModelOperator::instanton(&OneInstanton::unit());
    let pts = ball_points(&mut rng, 20, 1.0);
    let f1 = random_field(&mut rng, 1, 8);
    let f2 = f1.clone().with_mode(2);
    let l1 = op.adjoint(&op.apply(&f1).unwrap()).unwrap();
    let l2 = op.adjoint(&op.apply(&f2).unwrap()).unwrap();
    for y in &pts {
        let (a, b, f) = (l1.eval(*y), l2.eval(*y), f1.eval(*y));
        let shift: f64 = a.iter().zip(&b).map(|(p, q)| (*q - *p).su2_norm_sqr()).sum::<f64>().sqrt();
        let nf: f64 = f.iter().map(|q| q.su2_norm_sqr()).sum::<f64>().sqrt();
        assert!((shift - 3.0 * nf).abs() <= 1e-3 * 3.0 * nf, "{shift} vs {}", 3.0 * nf);
    }
}

#[test]
fn quadratic_term_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts = ball_points(&mut rng, 30, 1.5);
    let zero = SeparableField::zero(0, 8);
    let mut c = 0.0f64;
    for _ in 0..50 {
        let (a, b) = (random_field(&mut rng, 0, 8), random_field(&mut rng, 0, 8));
        assert_eq!(quadratic_apply(&a, &zero).unwrap().sup_norm(&pts), 0.0);
        let (ab, ba) = (quadratic_apply(&a, &b).unwrap(), quadratic_apply(&b, &a).unwrap());
        assert!(ab.combine(1.0, &ba, -1.0).unwrap().sup_norm(&pts) < 1e-12);
        let qa = quadratic_apply(&a, &a).unwrap();
        for y in &pts {
            let na = a.norm_at(*y);
            if na > 1e-3 {
                c = c.max(qa.norm_at(*y) / (na * na));
            }
        }
    }
    println!("pointwise quadratic constant C = {c:.4}");
    assert!(c.is_finite() && c > 0.0 && c <= 1.0);
    assert!(quadratic_apply(&random_field(&mut rng, 1, 8), &random_field(&mut rng, 1, 8)).is_err());
}

fn model() -> RadialModel {
    RadialModel::new(&GluingConfig::new(0.05).unwrap(), RadialModel::DEFAULT_NODES).unwrap()
}

#[test]
fn reduced_operator_matches_eight_dimensions() {
    // A fine radial grid keeps the midpoint discretisation below the tolerance.
    let m = RadialModel::new(&GluingConfig::new(0.05).unwrap(), 8000).unwrap();
    let g = graft(&m.config, &OneInstanton::unit()).unwrap();
    let op = ModelOperator::grafted(&g);
    let x: Vec<f64> = m.r.iter().map(|r| 0.1 * (-(r - 1.0).powi(2)).exp()).collect();
    let (lx, qx) = (m.apply(&x), m.quadratic(&x));
    let e = error_field(&g, &Spin7Structure::standard()).unwrap();
    let d: Point4 = [0.5, -0.5, 0.5, 0.5];
    for j in [3600, 4800, 5600, 6000, 6600, 6800] {
        let r = m.rm[j];
        // The stencil must resolve both r and the instanton scale.
        let lifted = m.lift(&x).with_h(0.002f64.min(r / 40.0));
        let (l8, q8) = (op.apply(&lifted).unwrap(), quadratic_apply(&lifted, &lifted).unwrap());
        let y = scaled(&d, r);
        let v = l8.eval(y);
        assert!(v[0].norm() < 1e-5, "d* part {}", v[0].norm());
        let two_form = |v: &[Quat]| v[1..29].iter().map(|q| q.su2_norm_sqr()).sum::<f64>().sqrt();
        assert!((two_form(&v) - RadialModel::PATTERN_NORM * lx[j].abs()).abs() < 1e-4 * two_form(&v).max(1e-3), "j={j} r={r}: {} vs {}", two_form(&v), RadialModel::PATTERN_NORM * lx[j].abs());
        // The reduced equation is twice the Λ²₇ equation: 2Q ↔ 2r²h², 2π₇F ↔ e.
        let q = 2.0 * two_form(&q8.eval(y));
        assert!((q - RadialModel::PATTERN_NORM * qx[j]).abs() < 1e-4 * q.max(1e-8));
        let pe = 2.0 * e.norm_at(y);
        assert!((pe - RadialModel::PATTERN_NORM * m.error_profile()[j].abs()).abs() < 1e-6 * pe + 1e-10, "j={j}: {pe} vs {}", RadialModel::PATTERN_NORM * m.error_profile()[j].abs());
    }
}

/// Dense LU solve of `L x = y` bordered by the weighted orthogonality
/// condition against the dilation mode.
fn dense_solve(m: &RadialModel, y: &[f64]) -> Vec<f64> {
    let n = m.nodes();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = m.apply(&e);
        for i in 0..n - 1 {
            a[(i, j)] = col[i];
        }
        // Last row: the weighted ⟨x, κ⟩ = 0. `e − P e = ⟨e, κ⟩ κ`.
        let k = m.kernel_mode();
        let p = m.project_kernel(&e);
        let num: f64 = (0..n).map(|i| (e[i] - p[i]) * k[i]).sum();
        a[(n - 1, j)] = num / k.iter().map(|v| v * v).sum::<f64>();
    }
    let mut b = DVector::<f64>::zeros(n);
    for i in 0..n - 1 {
        b[i] = y[i];
    }
    let x = a.lu().solve(&b).expect("bordered system is regular");
    x.iter().copied().collect()
}

#[test]
fn right_inverse_recovers_preimage() {
    let m = RadialModel::new(&GluingConfig::new(0.05).unwrap(), 400).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..5 {
        let a = m.project_kernel(&m.random_domain(&mut rng));
        let y = m.apply(&a);
        let x = m.right_inverse(&y).unwrap();
        let diff: Vec<f64> = x.iter().zip(&a).map(|(p, q)| p - q).collect();
        assert!(m.domain_norm(&diff) < 1e-8 * m.domain_norm(&a), "{} vs {}", m.domain_norm(&diff), m.domain_norm(&a));
        let oracle = dense_solve(&m, &y);
        let diff: Vec<f64> = x.iter().zip(&oracle).map(|(p, q)| p - q).collect();
        assert!(m.domain_norm(&diff) < 1e-8 * m.domain_norm(&a), "oracle {} vs {}", m.domain_norm(&diff), m.domain_norm(&a));
    }
}

#[test]
fn dilation_mode_is_rejected() {
    let m = model();
    let kernel = m.kernel_mode();
    let y: Vec<f64> = (0..m.rm.len()).map(|j| m.rm[j] * 0.5 * (kernel[j] + kernel[j + 1])).collect();
    assert!(matches!(m.right_inverse(&y), Err(Error::KernelComponent { .. })));
    assert!(m.kernel_fraction(m.error_profile()) < RadialModel::KERNEL_THRESHOLD);
}

#[test]
fn right_inverse_norm_is_bounded() {
    let m = model();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let y = m.random_target(&mut rng);
        let x = m.right_inverse(&y).unwrap();
        let lx = m.apply(&x);
        let res: Vec<f64> = lx.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert!(m.target_norm(&res) < 1e-8 * m.target_norm(&y), "{} vs {}", m.target_norm(&res), m.target_norm(&y));
        worst = worst.max(m.domain_norm(&x) / m.target_norm(&y));
    }
    println!("empirical right-inverse constant {worst:.3}");
    assert!(worst.is_finite() && worst < 100.0);
}

#[test]
fn picard_with_zero_error() {
    let m = RadialModel::new(&GluingConfig::new(0.05).unwrap(), 400).unwrap();
    let zero = vec![0.0; m.rm.len()];
    let st = picard_solve(&m, Some(&zero), PicardOptions::default()).unwrap();
    assert!(st.converged);
    assert!(st.iterate.iter().all(|v| *v == 0.0));
    assert!(st.residual_history.len() <= 2);
}

#[test]
fn picard_solves_reduced_problem() {
    let m = model();
    let st = picard_solve(&m, None, PicardOptions::default()).unwrap();
    assert!(st.final_residual() < 1e-8);
    assert!(st.bounded(), "{:?} vs 2·{}", st.iterate_norms, st.re_norm);
    assert!(st.min_contraction() >= 2.0, "{:?}", st.contraction_estimates);
    assert!(st.re_norm <= st.gate);
    let report = correction_report(&m, &st.iterate, 600, 2).unwrap();
    assert!(report.improvement >= 100.0, "{report:?}");
    let json = serde_json::to_string(&st).unwrap();
    let back: FixedPointState = serde_json::from_str(&json).unwrap();
    assert_eq!(back, st);
}

#[test]
fn smallness_gate_enforced() {
    let m = RadialModel::new(&GluingConfig::new(0.05).unwrap(), 400).unwrap();
    let big: Vec<f64> = m.error_profile().iter().map(|v| v * 1e3).collect();
    assert!(matches!(picard_solve(&m, Some(&big), PicardOptions::default()), Err(Error::SmallnessGate { .. })));
}
