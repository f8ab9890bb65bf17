use nalgebra::DVector;
use proptest::prelude::*;
use swlab_core::equations::{calibrated_patch_config, residuals, Configuration};
use swlab_core::gauge::{Connection, GaugeTransform, HermitianMetric, HiggsField, SpinorPair};
use swlab_core::grid::{GridSpec, MetricData, ScalarField};
use swlab_core::linearization::*;
use swlab_core::quillen::{curvature_sum_p, curvature_t_s_identity, identity_p_m};
use swlab_core::rng::FieldRng;
use swlab_core::solver::{newton_coupled, solve_liouville_from, SolverOptions};
use swlab_core::symplectic::*;
use swlab_core::C64;

fn torus(n: usize) -> GridSpec {
    GridSpec::torus(n, n).unwrap()
}

fn random_config(g: GridSpec, rng: &mut FieldRng) -> Configuration {
    let mut p = Configuration::trivial(g);
    p.a = Connection::Smooth(rng.imaginary_one_form(g));
    p.psi = SpinorPair::new(rng.field(g), rng.field(g)).unwrap();
    p.phi = HiggsField::new(rng.field(g));
    p.metric = MetricData::new(
        rng.real_field(g).map(|v| (0.2 * v).exp()),
        rng.real_field(g).scale_re(0.2),
    )
    .unwrap();
    p.h = HermitianMetric::new(rng.real_field(g).map(|v| (0.3 * v).exp())).unwrap();
    p
}

fn random_tangent(g: GridSpec, rng: &mut FieldRng) -> TangentVector {
    TangentVector {
        alpha: rng.imaginary_one_form(g),
        beta: SpinorPair::new(rng.field(g), rng.field(g)).unwrap(),
        gamma: rng.imaginary_one_form(g),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// At solutions of the Dirac rows the field operators compose to zero.
    #[test]
    fn d2_after_d1_vanishes_at_solutions(seed in any::<u64>(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let g = torus(16);
        let mut rng = FieldRng::new(seed, 1);
        let p = dirac_solution_base(g, C64::new(re, im) + 0.1, &rng.field(g)).unwrap();
        let zeta = rng.imaginary_field(g);
        let x = apply_d1(&p, &zeta).unwrap();
        let y = apply_d2(&p, &x).unwrap();
        let scale = 1.0 + x.beta.psi1.sup_norm() + x.alpha.p10.sup_norm();
        prop_assert!(y.sup_norm() < 1e-11 * scale, "{}", y.sup_norm());
    }

    #[test]
    fn symplectic_identities(seed in any::<u64>()) {
        let g = torus(16);
        let mut rng = FieldRng::new(seed, 2);
        let p = random_config(g, &mut rng);
        let x = random_tangent(g, &mut rng);
        let y = random_tangent(g, &mut rng);
        let s = (metric_g(&p, &x, &x).unwrap() * metric_g(&p, &y, &y).unwrap()).sqrt();
        let w = omega(&p, &x, &y).unwrap();
        prop_assert!((w + omega(&p, &y, &x).unwrap()).abs() < 1e-12 * s);
        prop_assert!((metric_g(&p, &acs_apply(&x), &y).unwrap() - w).abs() < 1e-12 * s);
        prop_assert!((omega(&p, &acs_apply(&x), &acs_apply(&y)).unwrap() - w).abs() < 1e-12 * s);
        let u = GaugeTransform::new(rng.imaginary_field(g)).unwrap();
        let pu = p.gauge_act(&u).unwrap();
        let wu = omega(&pu, &gauge_push(&u, &x), &gauge_push(&u, &y)).unwrap();
        prop_assert!((wu - w).abs() < 1e-12 * s);
        let psi0 = Psi0Reference::with_zero_at(g, g.index(1, 1));
        let w0 = omega_psi0(&p, &psi0, &x, &y).unwrap();
        prop_assert!((w0 + omega_psi0(&p, &psi0, &y, &x).unwrap()).abs() < 1e-12 * s);
    }

    #[test]
    fn quillen_identities_and_antisymmetry(seed in any::<u64>()) {
        let g = torus(16);
        let mut rng = FieldRng::new(seed, 3);
        let p = random_config(g, &mut rng);
        let psi0 = Psi0Reference::with_zero_at(g, g.index(4, 9));
        let x = random_tangent(g, &mut rng);
        let y = random_tangent(g, &mut rng);
        let w0 = omega_psi0(&p, &psi0, &x, &y).unwrap();
        let pi = core::f64::consts::PI;
        let a = identity_p_m(&p, &psi0, &x, &y).unwrap();
        prop_assert!((a.lhs - C64::new(0.0, w0 / pi)).norm() < 1e-11 * a.lhs.norm());
        let b = curvature_t_s_identity(&p, &psi0, &x, &y).unwrap();
        prop_assert!((b.identity.lhs - C64::new(0.0, 2.0 * w0 / pi)).norm() < 1e-11 * b.identity.lhs.norm());
        let f = curvature_sum_p(&p, &psi0, &x, &y).unwrap().total;
        let r = curvature_sum_p(&p, &psi0, &y, &x).unwrap().total;
        prop_assert!((f + r).norm() < 1e-12 * f.norm());
    }
}

#[test]
fn assembled_d1_matches_field_operator() {
    let g = torus(8);
    let mut rng = FieldRng::new(4, 0);
    let p = dirac_solution_base(g, C64::new(0.7, -0.2), &rng.field(g)).unwrap();
    let asm = assemble_complex(&p, D2Options::default()).unwrap();
    let c: Vec<f64> = (0..asm.basis.len()).map(|_| rng.normal()).collect();
    let zeta = gauge_from_coords(&asm.basis, &c);
    let x = apply_d1(&p, &zeta).unwrap();
    let want = DVector::from_vec(tangent_to_coords(&asm.basis, &x));
    let got = &asm.d1 * DVector::from_vec(c);
    assert!((got - &want).norm() < 1e-12 * want.norm());
}

#[test]
fn cohomology_of_flat_trivial_point() {
    let g = torus(8);
    let mut p = Configuration::trivial(g);
    p.psi = SpinorPair::zeros(g);
    let asm = assemble_complex(
        &p,
        D2Options {
            t: 0.0,
            ..D2Options::default()
        },
    )
    .unwrap();
    let c = cohomology_dims(&asm, 1e-8);
    assert_eq!((c.h0, c.h1, c.h2), (1, 8, 7));
    assert_eq!(c.euler(), 0);
}

#[test]
fn liouville_solution_is_independent_of_the_start() {
    let g = GridSpec::patch(32, 0.5, 2).unwrap();
    let h = MetricData::hyperbolic(g).h;
    let a = g.half_side();
    let opts = SolverOptions::default();
    let mut sols = Vec::new();
    for (amp, tilt) in [(0.0, 0.0), (0.3, 0.5), (-0.2, -1.0)] {
        let start = ScalarField::from_fn(g, |x, y| {
            C64::new(
                amp * (1.0 - x * x / (a * a)) * (1.0 - y * y / (a * a)) * (1.0 + tilt * y),
                0.0,
            )
        });
        sols.push(solve_liouville_from(&h, 0.5, &start, &opts).unwrap().0);
    }
    assert!(sols[0].max_abs_diff(&sols[1]) < 1e-10);
    assert!(sols[0].max_abs_diff(&sols[2]) < 1e-10);
}

#[test]
fn coupled_newton_from_a_perturbed_solution() {
    let g = GridSpec::patch(24, 0.5, 2).unwrap();
    let mut c = calibrated_patch_config(g).unwrap();
    let noise = FieldRng::new(6, 0).field(g);
    let bump = ScalarField::from_fn(g, |x, y| C64::new(1.0 - 4.0 * (x * x + y * y), 0.0));
    c.psi.psi2bar = &c.psi.psi2bar + &(&bump * &noise).scale_re(1e-3);
    let before = residuals(&c).unwrap().max_sup();
    let out = newton_coupled(&c, &SolverOptions::default()).unwrap();
    assert!(out.converged && !out.degenerate, "{:?}", out.trace);
    let last = out.trace.last().unwrap().residual_sup;
    assert!(last < 1e-10 && last < before, "{before} {last}");
}
