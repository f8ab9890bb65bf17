//! Newton solvers on the disk patch.
//!
//! `solve_liouville` finds the conformal factor `σ` with `K(e^σh) = −c`,
//! i.e. `Δσ + Δ ln h − 2c h² e^{2σ} = 0` for the curvature normalization of
//! [`curvature_k`], with `σ = 0` on the margin. `newton_coupled` iterates on
//! `(A, Ψ)` directly with a Coulomb-type gauge condition on each update.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::banded::BandMatrix;
use crate::equations::{curvature_k, residuals, Configuration};
use crate::error::{Error, Result, SolverFailure};
use crate::gauge::{Connection, SpinorPair};
use crate::grid::{
    laplacian, same_grid, second_stencil, DomainKind, GridSpec, MetricData, OneForm, Reality, ScalarField,
};
use crate::linearization::{apply_d2, orbit_adjoint, TangentVector};
use crate::C64;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub residual_sup: f64,
    pub residual_l2: f64,
    /// Line-search step taken from this iterate; 0 for the final record.
    pub step_length: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Newton steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// Worst `r_{k+1} / r_k²` over consecutive sup residuals with
    /// `r_k < below` and `r_{k+1} > floor`; `None` when no pair qualifies.
    pub fn quadratic_constant(&self, below: f64, floor: f64) -> Option<f64> {
        self.records
            .windows(2)
            .filter(|w| w[0].residual_sup < below && w[1].residual_sup > floor)
            .map(|w| w[1].residual_sup / (w[0].residual_sup * w[0].residual_sup))
            .reduce(f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub residual_tol: f64,
    /// Step shrink factor of the backtracking line search.
    pub backtrack: f64,
    /// Relative residual accepted from each linear solve.
    pub linear_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iter: 50,
            residual_tol: 1e-10,
            backtrack: 0.5,
            linear_tol: 1e-12,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidOptions(String::from(what)));
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(self.residual_tol > 0.0) {
            return bad("residual_tol must be positive");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack factor must lie in (0, 1)");
        }
        if !(self.linear_tol > 0.0) {
            return bad("linear_tol must be positive");
        }
        Ok(())
    }
}

const MIN_STEP: f64 = 1.0 / 1024.0;

/// Active nodes in row-major order and the inverse map.
struct Unknowns {
    nodes: Vec<usize>,
    slot: Vec<Option<usize>>,
    width: usize,
}

impl Unknowns {
    fn new(grid: &GridSpec) -> Self {
        let nodes: Vec<usize> = grid.active_nodes().collect();
        let mut slot = vec![None; grid.len()];
        for (k, &j) in nodes.iter().enumerate() {
            slot[j] = Some(k);
        }
        Unknowns {
            nodes,
            slot,
            width: grid.nx - 2 * grid.margin,
        }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }
}

fn sup_l2(v: &[f64], cell: f64) -> (f64, f64) {
    let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let l2 = (v.iter().map(|x| x * x).sum::<f64>() * cell).sqrt();
    (sup, l2)
}

/// Liouville residual `K(e^σh) + c` at active nodes, as reported.
fn liouville_residual(h: &ScalarField, sigma: &ScalarField, c: f64) -> Result<ScalarField> {
    let metric = MetricData::new(h.clone(), sigma.clone())?;
    Ok(curvature_k(&metric).map(|k| C64::new(k.re + c, 0.0)))
}

/// Roundoff scale of the reported Liouville residual: ten times machine
/// epsilon times the absolute stencil sum of the Laplacian, scaled by
/// `sup|ln h| ∨ 1` and divided by `2 min h²`. Residuals below it carry no
/// information about the Newton model.
pub fn liouville_noise_floor(h: &ScalarField) -> f64 {
    let dx = h.grid.dx();
    let stencil = 2.0 * 64.0 / (12.0 * dx * dx);
    let ln_sup = h.values.iter().fold(1.0f64, |m, v| m.max(v.re.ln().abs()));
    let h2_min = h.values.iter().fold(f64::INFINITY, |m, v| m.min(v.re * v.re));
    10.0 * f64::EPSILON * stencil * ln_sup / (2.0 * h2_min)
}

/// Solves `K(e^σh) = −c` from `σ = 0`.
pub fn solve_liouville(h: &ScalarField, c: f64, opts: &SolverOptions) -> Result<(ScalarField, Trace)> {
    solve_liouville_from(h, c, &ScalarField::zeros(h.grid), opts)
}

/// As [`solve_liouville`] from the initial guess `sigma0`, whose margin
/// values are replaced by the boundary condition `σ = 0`.
pub fn solve_liouville_from(
    h: &ScalarField,
    c: f64,
    sigma0: &ScalarField,
    opts: &SolverOptions,
) -> Result<(ScalarField, Trace)> {
    opts.validate()?;
    let grid = h.grid;
    grid.require_kind(DomainKind::DiskPatch)?;
    same_grid(&grid, &sigma0.grid)?;
    if !(c >= 0.0) {
        return Err(Error::InvalidOptions(
            "target constant c must be non-negative".into(),
        ));
    }
    if let Some(j) = h.values.iter().position(|v| !(v.re > 0.0) || v.im != 0.0) {
        return Err(Error::InvalidOptions(alloc::format!(
            "h must be real and positive (node {j})"
        )));
    }
    let unknowns = Unknowns::new(&grid);
    let n = unknowns.len();
    let m = unknowns.width;
    let mut sigma = sigma0.map(|v| C64::new(v.re, 0.0));
    for j in 0..grid.len() {
        if !grid.is_active(j) {
            sigma.values[j] = C64::new(0.0, 0.0);
        }
    }
    let ln_h = h.ln();
    let h2 = h.abs2();
    let dx = grid.dx();
    let cell = grid.cell_area();
    let tol = opts.residual_tol * (1.0 + c);

    // G(σ) = Δσ + Δ ln h − 2c h² e^{2σ} at the unknowns.
    let g_of = |s: &ScalarField| -> Vec<f64> {
        let lap = laplacian(&(s + &ln_h));
        unknowns
            .nodes
            .iter()
            .map(|&j| lap.values[j].re - 2.0 * c * h2.values[j].re * (2.0 * s.values[j].re).exp())
            .collect()
    };
    let measure = |s: &ScalarField| -> Result<(f64, f64)> {
        let r = liouville_residual(h, s, c)?;
        let v: Vec<f64> = unknowns.nodes.iter().map(|&j| r.values[j].re).collect();
        Ok(sup_l2(&v, cell))
    };

    let mut trace = Trace::default();
    let (mut sup, mut l2) = measure(&sigma)?;
    for iter in 0..=opts.max_iter {
        if sup <= tol {
            trace.records.push(TraceRecord {
                iter,
                residual_sup: sup,
                residual_l2: l2,
                step_length: 0.0,
            });
            return Ok((sigma, trace));
        }
        if iter == opts.max_iter {
            trace.records.push(TraceRecord {
                iter,
                residual_sup: sup,
                residual_l2: l2,
                step_length: 0.0,
            });
            break;
        }
        let g = g_of(&sigma);
        let mut jac = BandMatrix::zeros(n, 2 * m, 2 * m);
        let w = 1.0 / (12.0 * dx * dx);
        for (k, &j) in unknowns.nodes.iter().enumerate() {
            let (ix, iy) = grid.coords_of(j);
            let (sx, wx) = second_stencil(ix, grid.nx);
            let (sy, wy) = second_stencil(iy, grid.ny);
            for (q, wq) in wx.iter().enumerate().filter(|(_, w)| **w != 0.0) {
                if let Some(col) = unknowns.slot[grid.index(sx + q, iy)] {
                    jac.add(k, col, wq * w);
                }
            }
            for (q, wq) in wy.iter().enumerate().filter(|(_, w)| **w != 0.0) {
                if let Some(col) = unknowns.slot[grid.index(ix, sy + q)] {
                    jac.add(k, col, wq * w);
                }
            }
            jac.add(
                k,
                k,
                -4.0 * c * h2.values[j].re * (2.0 * sigma.values[j].re).exp(),
            );
        }
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let delta = match solve_refined(jac, &rhs, opts.linear_tol) {
            Some(d) => d,
            None => {
                trace.records.push(TraceRecord {
                    iter,
                    residual_sup: sup,
                    residual_l2: l2,
                    step_length: 0.0,
                });
                return Err(Error::Solver {
                    reason: SolverFailure::SingularSystem,
                    trace,
                });
            }
        };
        let mut step = 1.0;
        let (next, next_sup, next_l2) = loop {
            let mut trial = sigma.clone();
            for (k, &j) in unknowns.nodes.iter().enumerate() {
                trial.values[j].re += step * delta[k];
            }
            let (s2, l22) = measure(&trial)?;
            if l22 <= (1.0 - 1e-4 * step) * l2 || step <= MIN_STEP {
                break (trial, s2, l22);
            }
            step *= opts.backtrack;
        };
        trace.records.push(TraceRecord {
            iter,
            residual_sup: sup,
            residual_l2: l2,
            step_length: step,
        });
        sigma = next;
        sup = next_sup;
        l2 = next_l2;
    }
    Err(Error::Solver {
        reason: SolverFailure::NonConvergence,
        trace,
    })
}

/// Direct banded solve with up to three rounds of iterative refinement.
fn solve_refined(a: BandMatrix, b: &[f64], linear_tol: f64) -> Option<Vec<f64>> {
    let keep = a.clone();
    let lu = a.factor()?;
    let mut x = lu.solve(b);
    let norm_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..3 {
        let ax = keep.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let norm_r = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm_r <= linear_tol * norm_b {
            break;
        }
        let dx = lu.solve(&r);
        for (x, d) in x.iter_mut().zip(&dx) {
            *x += d;
        }
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Outcome of [`newton_coupled`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledOutcome {
    /// Final iterate, or the best one seen when not converged.
    pub config: Configuration,
    pub trace: Trace,
    pub converged: bool,
    /// Set when `Ψ ≡ 0` or a Newton system was singular.
    pub degenerate: bool,
}

/// Unknowns per active node: `Re a, Im a, Re β₁, Im β₁, Re b₂, Im b₂`.
const DOF: usize = 6;

fn unit_update(grid: GridSpec, nodes: &[usize], comp: usize, values: &[f64]) -> TangentVector {
    let mut fields = [
        ScalarField::zeros(grid),
        ScalarField::zeros(grid),
        ScalarField::zeros(grid),
    ];
    for (k, &j) in nodes.iter().enumerate() {
        let v = values[DOF * k + comp];
        if v != 0.0 {
            let f = &mut fields[comp / 2];
            if comp % 2 == 0 {
                f.values[j].re += v;
            } else {
                f.values[j].im += v;
            }
        }
    }
    let [a, b1, b2] = fields;
    TangentVector {
        alpha: OneForm::imaginary(a),
        beta: SpinorPair {
            psi1: b1,
            psi2bar: b2,
        },
        gamma: OneForm::zeros(grid),
    }
}

fn update_from(grid: GridSpec, nodes: &[usize], x: &[f64]) -> TangentVector {
    (0..DOF)
        .map(|q| unit_update(grid, nodes, q, x))
        .reduce(|a, b| a.add(&b))
        .expect("six components")
}

/// The linear rows at every node: `Re A`, the gauge density and the real
/// and imaginary parts of both Dirac rows.
fn linear_rows(p: &Configuration, x: &TangentVector) -> Result<[Vec<f64>; DOF]> {
    let y = apply_d2(p, x)?;
    let gauge = orbit_adjoint(p, x)?;
    let re = |f: &ScalarField| f.values.iter().map(|v| v.re).collect::<Vec<f64>>();
    let im = |f: &ScalarField| f.values.iter().map(|v| v.im).collect::<Vec<f64>>();
    Ok([
        re(&y.a.coeff),
        re(&gauge),
        re(&y.c.psi1),
        im(&y.c.psi1),
        re(&y.c.psi2bar),
        im(&y.c.psi2bar),
    ])
}

fn nonlinear_rows(p: &Configuration) -> Result<[Vec<f64>; DOF]> {
    let r = crate::equations::residual_fields(p)?;
    let re = |f: &ScalarField| f.values.iter().map(|v| v.re).collect::<Vec<f64>>();
    let im = |f: &ScalarField| f.values.iter().map(|v| v.im).collect::<Vec<f64>>();
    Ok([
        re(&r.r21.coeff),
        vec![0.0; p.grid().len()],
        re(&r.r23.psi1),
        im(&r.r23.psi1),
        re(&r.r23.psi2bar),
        im(&r.r23.psi2bar),
    ])
}

/// Jacobian of the stacked rows with respect to the nodal unknowns.
/// Every row depends on unknowns within two nodes along its row and column,
/// so probing with the 25 residue classes mod 5 separates all entries.
fn coupled_jacobian(p: &Configuration, unknowns: &Unknowns) -> Result<BandMatrix> {
    let grid = p.grid();
    let n = unknowns.len();
    let band = DOF * 2 * unknowns.width + DOF - 1;
    let mut jac = BandMatrix::zeros(DOF * n, band, band);
    const OFFSETS: [(isize, isize); 9] = [
        (0, 0),
        (1, 0),
        (-1, 0),
        (2, 0),
        (-2, 0),
        (0, 1),
        (0, -1),
        (0, 2),
        (0, -2),
    ];
    for cx in 0..5 {
        for cy in 0..5 {
            let color = |j: usize| {
                let (ix, iy) = grid.coords_of(j);
                ix % 5 == cx && iy % 5 == cy
            };
            for q in 0..DOF {
                let mut probe = vec![0.0; DOF * n];
                for (k, &j) in unknowns.nodes.iter().enumerate() {
                    if color(j) {
                        probe[DOF * k + q] = 1.0;
                    }
                }
                let rows = linear_rows(p, &unit_update(grid, &unknowns.nodes, q, &probe))?;
                for (ki, &i) in unknowns.nodes.iter().enumerate() {
                    let (ix, iy) = grid.coords_of(i);
                    let source = OFFSETS.iter().find_map(|(ox, oy)| {
                        let jx = ix as isize + ox;
                        let jy = iy as isize + oy;
                        if jx < 0 || jy < 0 || jx >= grid.nx as isize || jy >= grid.ny as isize {
                            return None;
                        }
                        let j = grid.index(jx as usize, jy as usize);
                        if color(j) {
                            unknowns.slot[j]
                        } else {
                            None
                        }
                    });
                    if let Some(kj) = source {
                        for (e, row) in rows.iter().enumerate() {
                            let v = row[i];
                            if v != 0.0 {
                                jac.add(DOF * ki + e, DOF * kj + q, v);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(jac)
}

fn apply_update(p: &Configuration, x: &TangentVector) -> Result<Configuration> {
    let a = match &p.a {
        Connection::Smooth(a) => a,
        Connection::Lattice(_) => {
            return Err(Error::InvalidOptions(
                "coupled solve needs a smooth connection".into(),
            ))
        }
    };
    let mut q = p.clone();
    q.a = Connection::Smooth(OneForm {
        p10: &a.p10 + &x.alpha.p10,
        p01: &a.p01 + &x.alpha.p01,
        tag: Reality::UnitaryConnection,
    });
    q.psi = p.psi.add(&x.beta);
    Ok(q)
}

/// Newton iteration for the first and third equations on a patch, with
/// `Φ`, the metric and `H` held fixed and the margin values of `A`, `Ψ`
/// taken from `c0`. Each update `δ` satisfies the gauge condition
/// `d₁*δ = 0` of [`orbit_adjoint`]. Convergence is measured on the
/// combined L² residual.
pub fn newton_coupled(c0: &Configuration, opts: &SolverOptions) -> Result<CoupledOutcome> {
    opts.validate()?;
    let grid = c0.grid();
    grid.require_kind(DomainKind::DiskPatch)?;
    if grid.margin < 2 {
        return Err(Error::InvalidGrid(
            "coupled solve needs a margin of at least 2".into(),
        ));
    }
    let unknowns = Unknowns::new(&grid);
    let degenerate_psi = c0.psi.psi1.sup_norm() == 0.0 && c0.psi.psi2bar.sup_norm() == 0.0;
    let mut p = c0.clone();
    let mut report = residuals(&p)?;
    let mut best = (report.combined_l2(), p.clone());
    let mut trace = Trace::default();
    let mut degenerate = degenerate_psi;
    let mut converged = false;
    for iter in 0..=opts.max_iter {
        let l2 = report.combined_l2();
        if l2 < best.0 {
            best = (l2, p.clone());
        }
        let mut record = TraceRecord {
            iter,
            residual_sup: report.max_sup(),
            residual_l2: l2,
            step_length: 0.0,
        };
        if l2 <= opts.residual_tol {
            converged = true;
            trace.records.push(record);
            break;
        }
        if iter == opts.max_iter {
            trace.records.push(record);
            break;
        }
        let jac = coupled_jacobian(&p, &unknowns)?;
        let f = nonlinear_rows(&p)?;
        let rhs: Vec<f64> = unknowns
            .nodes
            .iter()
            .flat_map(|&j| f.iter().map(move |row| -row[j]))
            .collect();
        let Some(delta) = solve_refined(jac, &rhs, opts.linear_tol) else {
            degenerate = true;
            trace.records.push(record);
            break;
        };
        let full = update_from(grid, &unknowns.nodes, &delta);
        let mut step = 1.0;
        let (next, next_report) = loop {
            let trial = apply_update(&p, &full.scale_re(step))?;
            let r = residuals(&trial)?;
            if r.combined_l2() <= (1.0 - 1e-4 * step) * l2 || step <= MIN_STEP {
                break (trial, r);
            }
            step *= opts.backtrack;
        };
        record.step_length = step;
        trace.records.push(record);
        p = next;
        report = next_report;
    }
    let config = if converged { p } else { best.1 };
    Ok(CoupledOutcome {
        config,
        trace,
        converged,
        degenerate,
    })
}
