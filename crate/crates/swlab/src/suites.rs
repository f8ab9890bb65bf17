//! The six check suites.
//!
//! Field-level identities run on an `N×N` grid (`--grid`, default 32).
//! Checks built on dense matrices use fixed small grids: the deformation
//! complex and the symplectic probes on `8×8`, the lattice index on `16×16`.
//! The patch suite runs on `N`, `2N` and `4N`.

use std::time::Instant;

use nalgebra::DVector;
use serde_json::json;

use swlab_core::constants::SVD_THRESHOLD;
use swlab_core::equations::{calibrated_patch_config, hyperbolic_patch_config, residuals, Configuration};
use swlab_core::gauge::{
    inner_h, make_uniform_flux_links, Connection, GaugeTransform, HermitianMetric, HiggsField, SpinorPair,
};
use swlab_core::grid::{GridSpec, MetricData, OneForm, Reality, ScalarField};
use swlab_core::linalg::null_space;
use swlab_core::linearization::{
    apply_d1, assemble_complex, cohomology_dims, dimension_formula, dirac_solution_base, riemann_roch_index,
    D2Options, DimensionCase, TangentVector,
};
use swlab_core::quillen::{
    bc_sum_defect, curvature_sum_m, curvature_sum_p, curvature_t_s_identity, identity_p_m,
};
use swlab_core::reduction::{pauli_check, reduction_discrepancy, FourDField};
use swlab_core::rng::FieldRng;
use swlab_core::solver::{liouville_noise_floor, newton_coupled, solve_liouville_from, SolverOptions, Trace};
use swlab_core::symplectic::{
    acs_apply, gauge_orbit_orthogonality, gauge_push, hamiltonian_h_zeta, metric_g, moduli_tangent_basis,
    nondegeneracy, omega, orbit_orthogonal_basis, random_family, Psi0Reference,
};
use swlab_core::{Error, C64};

use crate::config::{HMode, Suite};
use crate::ledger::SuiteOutput;
use crate::record::CheckRecord;
use crate::snapshot::Snapshot;

/// Inputs shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteContext {
    pub grid: usize,
    pub seeds: Vec<u64>,
    pub tol: f64,
    pub h_mode: HMode,
}

/// Suite output plus the snapshots it wants written.
#[derive(Debug, Clone, Default)]
pub struct SuiteRun {
    pub output: SuiteOutput,
    pub snapshots: Vec<(String, Snapshot)>,
}

pub fn run(suite: Suite, ctx: &SuiteContext) -> SuiteRun {
    let mut run = SuiteRun::default();
    match suite {
        Suite::Reduce => reduce(ctx, &mut run),
        Suite::Patch => patch(ctx, &mut run),
        Suite::Liouville => liouville(ctx, &mut run),
        Suite::Index => index(ctx, &mut run),
        Suite::Symplectic => symplectic(ctx, &mut run),
        Suite::Quillen => quillen(ctx, &mut run),
    }
    run
}

/// Runs `f`, turning a core error into a failed record under `id`.
fn guarded(
    out: &mut SuiteOutput,
    id: &str,
    params: &[(&str, serde_json::Value)],
    f: impl FnOnce(&mut SuiteOutput) -> Result<(), Error>,
) {
    let start = Instant::now();
    if let Err(e) = f(out) {
        let mut r = CheckRecord::flag(id, false).param("error", e.to_string());
        for (k, v) in params {
            r = r.param(k, v.clone());
        }
        out.push(r.timed(start));
    }
}

fn torus(n: usize) -> Result<GridSpec, Error> {
    GridSpec::torus(n, n)
}

fn patch_grid(n: usize) -> Result<GridSpec, Error> {
    GridSpec::patch(n, 0.5, 2)
}

const REDUCE_SETS_PER_SEED: usize = 10;

fn reduce(ctx: &SuiteContext, run: &mut SuiteRun) {
    let out = &mut run.output;
    let start = Instant::now();
    let p = pauli_check();
    let worst = p
        .table
        .iter()
        .map(|(_, l, r, _)| (l - r).norm())
        .fold(0.0, f64::max);
    out.push(
        CheckRecord::exact(
            "reduce.pauli",
            vec![worst, p.all_pass() as u8 as f64],
            vec![0.0, 1.0],
        )
        .timed(start),
    );

    for &seed in &ctx.seeds {
        let params = [("seed", json!(seed)), ("grid", json!(ctx.grid))];
        guarded(out, "reduce.discrepancy", &params, |out| {
            let g = torus(ctx.grid)?;
            let mut rng = FieldRng::new(seed, 10);
            let start = Instant::now();
            let mut worst = 0.0f64;
            for k in 0..REDUCE_SETS_PER_SEED {
                let f = FourDField::random(g, &mut rng);
                if k == 0 && seed == ctx.seeds[0] {
                    let fields = [&f.a[0], &f.a[1], &f.a[2], &f.a[3], &f.psi.psi1, &f.psi.psi2bar];
                    run.snapshots.push((
                        "reduce_fields".into(),
                        Snapshot::from_fields(g, &fields).expect("fields share the grid"),
                    ));
                }
                worst = worst.max(reduction_discrepancy(&f)?.max());
            }
            out.push(
                CheckRecord::at_most("reduce.discrepancy", worst, ctx.tol)
                    .param("seed", seed)
                    .param("grid", ctx.grid)
                    .param("sets", REDUCE_SETS_PER_SEED)
                    .timed(start),
            );
            let start = Instant::now();
            let f = FourDField::random(g, &mut rng).with_x3_dependence(&mut rng);
            out.push(
                CheckRecord::at_least("reduce.negative_control", reduction_discrepancy(&f)?.max(), 1e-3)
                    .param("seed", seed)
                    .param("grid", ctx.grid)
                    .timed(start),
            );
            Ok(())
        });
    }
}

fn patch(ctx: &SuiteContext, run: &mut SuiteRun) {
    let out = &mut run.output;
    let sizes = [ctx.grid, 2 * ctx.grid, 4 * ctx.grid];
    guarded(out, "patch.order", &[("grids", json!(sizes))], |out| {
        let start = Instant::now();
        let mut res = Vec::new();
        for n in sizes {
            let c = calibrated_patch_config(patch_grid(n)?)?;
            res.push(residuals(&c)?.max_sup());
            if n == sizes[2] {
                run.snapshots.push((
                    "patch_config".into(),
                    Snapshot::from_config(&c).expect("smooth connection"),
                ));
            }
        }
        let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(
            CheckRecord::at_least("patch.order", min_order, 1.9)
                .param("grids", json!(sizes))
                .param("residuals", json!(res))
                .param("orders", json!(orders))
                .timed(start),
        );
        // 1e-5 at 128², extrapolated at second order to other finest grids.
        let bound = 1e-5 * (128.0 / sizes[2] as f64).powi(2);
        out.push(
            CheckRecord::at_most("patch.finest_residual", res[2], bound)
                .param("grid", sizes[2])
                .timed(start),
        );
        Ok(())
    });

    for &seed in &ctx.seeds {
        guarded(out, "patch.density", &[("seed", json!(seed))], |out| {
            let start = Instant::now();
            let g = patch_grid(ctx.grid)?;
            let mut rng = FieldRng::new(seed, 20);
            let (a, b, c) = (0.3 * rng.complex(), 0.3 * rng.complex(), 0.3 * rng.complex());
            let f = ScalarField::from_fn(g, |x, y| {
                let z = C64::new(x, y);
                a + b * z + c * z * z
            });
            let tilt = rng.symmetric();
            let sigma = ScalarField::from_fn(g, |x, y| C64::new(0.1 * (x * y + tilt * x), 0.0));
            let conf = hyperbolic_patch_config(&f, &f, &sigma)?;
            let d = inner_h(&conf.h, &conf.psi.psi1, &conf.psi.psi1)?;
            let want = f.exp().abs2();
            let rel = d.max_abs_diff(&want) / want.sup_norm();
            out.push(
                CheckRecord::at_most("patch.density", rel, ctx.tol)
                    .param("seed", seed)
                    .timed(start),
            );
            Ok(())
        });
    }
}

fn trace_json(t: &Trace) -> serde_json::Value {
    json!(t
        .records
        .iter()
        .map(|r| json!({"iter": r.iter, "residual_sup": r.residual_sup, "residual_l2": r.residual_l2, "step_length": r.step_length}))
        .collect::<Vec<_>>())
}

fn liouville(ctx: &SuiteContext, run: &mut SuiteRun) {
    let out = &mut run.output;
    let opts = SolverOptions::default();
    for &seed in &ctx.seeds {
        guarded(out, "liouville.residual", &[("seed", json!(seed))], |out| {
            let start = Instant::now();
            let g = patch_grid(ctx.grid)?;
            let h = MetricData::hyperbolic(g).h;
            let mut rng = FieldRng::new(seed, 30);
            let amp = 0.2 + 0.4 * rng.uniform();
            let shift = 0.5 * rng.symmetric();
            let a = g.half_side();
            let bump = ScalarField::from_fn(g, |x, y| {
                C64::new(
                    amp * (1.0 - x * x / (a * a)) * (1.0 - y * y / (a * a)) * (1.0 + shift * x),
                    0.0,
                )
            });
            let (sigma, trace) = solve_liouville_from(&h, 0.5, &bump, &opts)?;
            let last = trace.last().expect("solver records the initial residual");
            let p = |r: CheckRecord| r.param("seed", seed).param("grid", ctx.grid).timed(start);
            out.push(p(CheckRecord::at_most(
                "liouville.residual",
                last.residual_sup,
                1e-10,
            )));
            // σ ≡ 0 solves the continuum problem; the discrete solution is
            // off by the truncation error of K(h).
            let bound = 0.1 * g.dx().powi(2);
            out.push(p(CheckRecord::at_most(
                "liouville.sigma_recovery",
                sigma.sup_norm(),
                bound,
            )));
            let floor = liouville_noise_floor(&h);
            let cq = trace.quadratic_constant(1e-2, floor).unwrap_or(0.0);
            out.push(p(CheckRecord::at_most("liouville.quadratic", cq, 10.0)));
            out.report("trace", json!({"solver": "liouville", "seed": seed, "grid": ctx.grid, "noise_floor": floor, "records": trace_json(&trace)}));
            if seed == ctx.seeds[0] {
                run.snapshots.push((
                    "liouville_sigma".into(),
                    Snapshot::from_fields(g, &[&sigma]).expect("one grid"),
                ));
            }
            Ok(())
        });
    }

    let seed = ctx.seeds[0];
    guarded(out, "liouville.coupled", &[("seed", json!(seed))], |out| {
        let start = Instant::now();
        let g = patch_grid(24)?;
        let mut c = calibrated_patch_config(g)?;
        let mut rng = FieldRng::new(seed, 31);
        let bump = ScalarField::from_fn(g, |x, y| C64::new(1.0 - 4.0 * (x * x + y * y), 0.0));
        let noise = rng.field(g);
        c.psi.psi1 = &c.psi.psi1 + &(&bump * &noise).scale_re(1e-3);
        let res = newton_coupled(&c, &opts)?;
        let last = res.trace.last().map(|r| r.residual_sup).unwrap_or(f64::NAN);
        out.push(
            CheckRecord::flag("liouville.coupled_converged", res.converged && !res.degenerate)
                .param("seed", seed)
                .timed(start),
        );
        out.push(
            CheckRecord::at_most("liouville.coupled_residual", last, 1e-10)
                .param("seed", seed)
                .timed(start),
        );
        out.report(
            "trace",
            json!({"solver": "coupled", "seed": seed, "grid": 24, "records": trace_json(&res.trace)}),
        );
        Ok(())
    });
}

/// Ten `(g, c₁)` pairs for the dimension table.
pub const DIMENSION_TABLE: [(i64, i64); 10] = [
    (0, 0),
    (1, 0),
    (2, 0),
    (2, 1),
    (2, 3),
    (3, -1),
    (3, 2),
    (4, 0),
    (5, 4),
    (10, -2),
];

fn index(ctx: &SuiteContext, run: &mut SuiteRun) {
    let out = &mut run.output;
    for d in -3i64..=3 {
        guarded(out, "index.riemann_roch", &[("degree", json!(d))], |out| {
            let start = Instant::now();
            let g = torus(16)?;
            let r = riemann_roch_index(d, g, SVD_THRESHOLD)?;
            out.push(
                CheckRecord::exact("index.riemann_roch", vec![r.index as f64], vec![d as f64])
                    .param("degree", d)
                    .timed(start),
            );
            out.push(
                CheckRecord::at_least("index.gap_ratio", r.gap_ratio, 1e3)
                    .param("degree", d)
                    .timed(start),
            );
            out.report("index", json!({"degree": d, "n_plus": r.n_plus, "n_minus": r.n_minus, "index": r.index, "gap_ratio": r.gap_ratio}));
            if d == 1 {
                run.snapshots.push((
                    "links_degree_1".into(),
                    Snapshot::from_links(&make_uniform_flux_links(1, g)?),
                ));
            }
            Ok(())
        });
    }

    let start = Instant::now();
    let mut computed = Vec::new();
    let mut expected = Vec::new();
    for (g, c1) in DIMENSION_TABLE {
        for case in [
            DimensionCase::Full,
            DimensionCase::Phi0BothSpinors,
            DimensionCase::Phi0Psi1Zero,
        ] {
            computed.push(dimension_formula(g, c1, case) as f64);
        }
        expected.extend([2 * (g + c1 + 1), 2 * (c1 + 1), g + c1 + 1].map(|v| v as f64));
    }
    out.push(CheckRecord::exact("index.dimension_formula", computed, expected).timed(start));

    for &seed in &ctx.seeds {
        guarded(out, "index.complex", &[("seed", json!(seed))], |out| {
            let start = Instant::now();
            let g = torus(8)?;
            let mut rng = FieldRng::new(seed, 40);
            let p = C64::new(0.5, 0.0) + 0.5 * rng.complex();
            let phibar = rng.field(g);
            let base = dirac_solution_base(g, p, &phibar)?;
            let mut euler = Vec::new();
            let mut h0 = Vec::new();
            for t in [0.0, 0.5, 1.0] {
                let asm = assemble_complex(
                    &base,
                    D2Options {
                        t,
                        ..D2Options::default()
                    },
                )?;
                if t == 1.0 {
                    out.push(
                        CheckRecord::at_most("index.complex_defect", asm.complex_defect(), ctx.tol)
                            .param("seed", seed)
                            .timed(start),
                    );
                }
                let c = cohomology_dims(&asm, SVD_THRESHOLD);
                out.report(
                    "index",
                    json!({"seed": seed, "t": t, "h0": c.h0, "h1": c.h1, "h2": c.h2,
                    "gap_ratio_d1": c.d1.gap_ratio, "gap_ratio_d2": c.d2.gap_ratio}),
                );
                euler.push(c.euler() as f64);
                h0.push(c.h0 as f64);
            }
            out.push(
                CheckRecord::exact("index.homotopy_invariance", euler.clone(), vec![euler[0]; 3])
                    .param("seed", seed)
                    .timed(start),
            );
            out.push(
                CheckRecord::exact("index.h0", vec![h0[1], h0[2]], vec![0.0, 0.0])
                    .param("seed", seed)
                    .timed(start),
            );
            Ok(())
        });
    }
}

fn random_config(g: GridSpec, rng: &mut FieldRng, h_mode: HMode) -> Result<Configuration, Error> {
    let mut p = Configuration::trivial(g);
    p.a = Connection::Smooth(rng.imaginary_one_form(g));
    p.psi = SpinorPair::new(rng.field(g), rng.field(g))?;
    p.phi = HiggsField::new(rng.field(g));
    p.metric = MetricData::new(
        rng.real_field(g).map(|v| (0.2 * v).exp()),
        rng.real_field(g).scale_re(0.2),
    )?;
    if h_mode == HMode::General {
        p.h = HermitianMetric::new(rng.real_field(g).map(|v| (0.3 * v).exp()))?;
    }
    Ok(p)
}

fn random_tangent(g: GridSpec, rng: &mut FieldRng) -> Result<TangentVector, Error> {
    Ok(TangentVector {
        alpha: rng.imaginary_one_form(g),
        beta: SpinorPair::new(rng.field(g), rng.field(g))?,
        gamma: rng.imaginary_one_form(g),
    })
}

fn shift_config(p: &Configuration, x: &TangentVector, s: f64) -> Configuration {
    let mut q = p.clone();
    if let Connection::Smooth(a) = &p.a {
        q.a = Connection::Smooth(OneForm {
            p10: &a.p10 + &x.alpha.p10.scale_re(s),
            p01: &a.p01 + &x.alpha.p01.scale_re(s),
            tag: Reality::UnitaryConnection,
        });
    }
    q.psi = p.psi.add(&x.beta.scale(C64::new(s, 0.0)));
    q
}

/// FNV-1a over the snapshot encoding of a configuration, as hex.
fn basepoint_hash(p: &Configuration) -> String {
    let mut bytes = Vec::new();
    if let Ok(s) = Snapshot::from_config(p) {
        s.write_to(&mut bytes).expect("writing to memory");
    }
    let h = bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ *b as u64).wrapping_mul(0x100_0000_01b3)
    });
    format!("{h:016x}")
}

fn symplectic(ctx: &SuiteContext, run: &mut SuiteRun) {
    let out = &mut run.output;
    for &seed in &ctx.seeds {
        guarded(out, "symplectic.identities", &[("seed", json!(seed))], |out| {
            let start = Instant::now();
            let g = torus(ctx.grid)?;
            let mut rng = FieldRng::new(seed, 50);
            let p = random_config(g, &mut rng, ctx.h_mode)?;
            let x = random_tangent(g, &mut rng)?;
            let y = random_tangent(g, &mut rng)?;
            let hash = basepoint_hash(&p);
            let gxx = metric_g(&p, &x, &x)?;
            let gyy = metric_g(&p, &y, &y)?;
            let scale = (gxx * gyy).sqrt();
            let rec = |r: CheckRecord| {
                r.param("seed", seed)
                    .param("grid", ctx.grid)
                    .param("basepoint_hash", hash.as_str())
                    .timed(start)
            };
            out.push(rec(CheckRecord::at_least(
                "symplectic.g_positive",
                gxx.min(gyy),
                f64::MIN_POSITIVE,
            )));
            let compat = (metric_g(&p, &acs_apply(&x), &y)? - omega(&p, &x, &y)?).abs() / scale;
            out.push(rec(CheckRecord::at_most(
                "symplectic.compatibility",
                compat,
                ctx.tol,
            )));
            let ii = acs_apply(&acs_apply(&x));
            let minus_x = x.scale_re(-1.0);
            let acs_sq = [
                ii.alpha.p10.max_abs_diff(&minus_x.alpha.p10),
                ii.beta.psi1.max_abs_diff(&minus_x.beta.psi1),
                ii.beta.psi2bar.max_abs_diff(&minus_x.beta.psi2bar),
                ii.gamma.p10.max_abs_diff(&minus_x.gamma.p10),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            out.push(rec(CheckRecord::at_most(
                "symplectic.acs_square",
                acs_sq,
                ctx.tol,
            )));
            let anti = (omega(&p, &x, &y)? + omega(&p, &y, &x)?).abs() / scale;
            out.push(rec(CheckRecord::at_most(
                "symplectic.antisymmetry",
                anti,
                ctx.tol,
            )));

            let u = GaugeTransform::new(rng.imaginary_field(g))?;
            let pu = p.gauge_act(&u)?;
            let (xu, yu) = (gauge_push(&u, &x), gauge_push(&u, &y));
            let inv = (omega(&pu, &xu, &yu)? - omega(&p, &x, &y)?)
                .abs()
                .max((metric_g(&pu, &xu, &yu)? - metric_g(&p, &x, &y)?).abs())
                / scale;
            out.push(rec(CheckRecord::at_most(
                "symplectic.gauge_invariance",
                inv,
                ctx.tol,
            )));

            // H_ζ is quadratic along straight lines, so central differences
            // are exact up to rounding.
            let zeta = rng.imaginary_field(g);
            let eps = 1e-3;
            let fd = (hamiltonian_h_zeta(&shift_config(&p, &x, eps), &zeta)?
                - hamiltonian_h_zeta(&shift_config(&p, &x, -eps), &zeta)?)
                / (2.0 * eps);
            let want = omega(&p, &apply_d1(&p, &zeta)?, &x)?;
            out.push(rec(CheckRecord::approx(
                "symplectic.hamiltonian",
                vec![fd],
                vec![want],
                1e-10,
            )));

            // dΩ(X,Y,Z) over constant vector fields by central differences.
            let z = random_tangent(g, &mut rng)?;
            let along = |v: &TangentVector, a: &TangentVector, b: &TangentVector| -> Result<f64, Error> {
                Ok(
                    (omega(&shift_config(&p, v, eps), a, b)? - omega(&shift_config(&p, v, -eps), a, b)?)
                        / (2.0 * eps),
                )
            };
            let d_omega = along(&x, &y, &z)? - along(&y, &x, &z)? + along(&z, &x, &y)?;
            let zz = metric_g(&p, &z, &z)?;
            out.push(rec(CheckRecord::at_most(
                "symplectic.closedness",
                d_omega.abs() / (scale * zz.sqrt()),
                1e-10,
            )));
            Ok(())
        });

        guarded(out, "symplectic.orbit", &[("seed", json!(seed))], |out| {
            let start = Instant::now();
            let g = torus(8)?;
            let mut rng = FieldRng::new(seed, 51);
            let phibar = rng.field(g);
            let base = dirac_solution_base(g, C64::new(0.8, 0.3), &phibar)?;
            let asm = assemble_complex(&base, D2Options::default())?;
            let (kernel, _) = null_space(&asm.d2, SVD_THRESHOLD);
            let x = &kernel * DVector::from_fn(kernel.ncols(), |_, _| rng.normal());
            let zeta = DVector::from_fn(asm.d1.ncols(), |_, _| rng.normal());
            let r = gauge_orbit_orthogonality(&asm, &x, &zeta)?;
            let hash = basepoint_hash(&base);
            let rec = |r: CheckRecord| {
                r.param("seed", seed)
                    .param("grid", 8)
                    .param("basepoint_hash", hash.as_str())
                    .timed(start)
            };
            out.push(rec(CheckRecord::at_most(
                "symplectic.orbit_projection",
                r.orbit_projection,
                1e-8,
            )));
            out.push(rec(CheckRecord::at_most(
                "symplectic.orbit_positive",
                r.projected,
                1e-8,
            )));
            out.push(rec(CheckRecord::at_least(
                "symplectic.orbit_negative",
                r.unprojected,
                1e-3,
            )));

            let psi0 = Psi0Reference::with_zero_at(g, g.index(2, 3));
            let (orth, _) = orbit_orthogonal_basis(&asm, SVD_THRESHOLD);
            let family = random_family(&asm, &orth, 10, &mut rng);
            let nd = nondegeneracy(&base, &psi0, &family)?;
            out.push(rec(CheckRecord::at_least(
                "symplectic.nondegeneracy",
                nd.min_over_max(),
                1e-8,
            )));
            let (tangent, _) = moduli_tangent_basis(&asm, SVD_THRESHOLD);
            let tfam = random_family(&asm, &tangent, tangent.ncols(), &mut rng);
            let tnd = nondegeneracy(&base, &psi0, &tfam)?;
            out.report(
                "symplectic",
                json!({"seed": seed, "orbit": {"orbit_projection": r.orbit_projection,
                "projected": r.projected, "unprojected": r.unprojected},
                "family_singular_values": nd.singular_values, "family_antisymmetry": nd.antisymmetry,
                "moduli_tangent_dim": tangent.ncols(), "moduli_singular_values": tnd.singular_values}),
            );
            Ok(())
        });
    }
}

fn quillen(ctx: &SuiteContext, run: &mut SuiteRun) {
    let out = &mut run.output;
    for &seed in &ctx.seeds {
        guarded(out, "quillen.identities", &[("seed", json!(seed))], |out| {
            let start = Instant::now();
            let g = torus(ctx.grid)?;
            let mut rng = FieldRng::new(seed, 60);
            let p = random_config(g, &mut rng, ctx.h_mode)?;
            let psi0 = Psi0Reference::with_zero_at(g, g.index(2, 3));
            let x = random_tangent(g, &mut rng)?;
            let y = random_tangent(g, &mut rng)?;
            let rec = |r: CheckRecord| {
                r.param("seed", seed)
                    .param("grid", ctx.grid)
                    .param("h_mode", format!("{:?}", ctx.h_mode).to_lowercase())
                    .timed(start)
            };

            let pm = identity_p_m(&p, &psi0, &x, &y)?;
            let ts = curvature_t_s_identity(&p, &psi0, &x, &y)?;
            if ctx.h_mode == HMode::Unit {
                out.push(rec(CheckRecord::at_most(
                    "quillen.pm_identity",
                    pm.rel_err(),
                    ctx.tol,
                )));
                out.push(rec(CheckRecord::at_most(
                    "quillen.ts_identity",
                    ts.identity.rel_err(),
                    ctx.tol,
                )));
            }
            out.report("quillen", json!({"seed": seed, "h_mode": format!("{:?}", ctx.h_mode).to_lowercase(),
                "pm": {"lhs": [pm.lhs.re, pm.lhs.im], "rhs": [pm.rhs.re, pm.rhs.im], "rel_err": pm.rel_err()},
                "ts": {"lhs": [ts.identity.lhs.re, ts.identity.lhs.im], "rhs": [ts.identity.rhs.re, ts.identity.rhs.im],
                       "rel_err": ts.identity.rel_err()}}));

            let sp = curvature_sum_p(&p, &psi0, &x, &y)?;
            let sm = curvature_sum_m(&x, &y)?;
            let cross = sp
                .cross_residual()
                .max(sm.cross_residual())
                .max(bc_sum_defect(&p, &psi0, &x, &y)?);
            out.push(rec(CheckRecord::at_most("quillen.cross_terms", cross, ctx.tol)));
            let si = curvature_sum_p(&p, &psi0, &acs_apply(&x), &acs_apply(&y))?;
            let compat = (si.total - sp.total).norm() / sp.total.norm().max(1e-30);
            out.push(rec(CheckRecord::at_most(
                "quillen.acs_compatibility",
                compat,
                ctx.tol,
            )));
            Ok(())
        });
    }
}
