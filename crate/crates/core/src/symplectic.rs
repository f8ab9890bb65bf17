//! Metric, almost complex structure and symplectic forms on the space of
//! configurations, the moment map as a Hamiltonian, and probes of the
//! orbit-orthogonality and nondegeneracy statements.
//!
//! For `α = a dz − ā dz̄` the 1-form terms are `∫*α₁∧α₂ = 4∫Re(a₁ā₂)`
//! and `−∫α₁∧α₂ = 4∫Im(a₁ā₂)` in `dx dy`; `ω = 2ρ² dx dy`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::equations::{moment_map, Configuration};
use crate::error::{Error, Result};
use crate::gauge::{inner_h_unchecked, GaugeTransform, HermitianMetric, SpinorPair};
use crate::grid::{
    hodge_star_one_form, integrate_two_form, same_grid, wedge_one_forms, DomainKind, GridSpec, OneForm,
    Reality, ScalarField, TwoForm,
};
use crate::linalg::{null_space, singular_values, RankInfo};
use crate::linearization::{
    apply_d2, tangent_from_coords, tangent_to_coords, ComplexAssembly, TangentVector,
};
use crate::{C64, I};

#[allow(unused_imports)]
use num_traits::Float;

/// The reference section `ψ₀` and the nodes where it vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct Psi0Reference {
    pub psi0: ScalarField,
    pub zero_set: Vec<usize>,
}

impl Psi0Reference {
    pub fn new(psi0: ScalarField) -> Self {
        let zero_set = (0..psi0.grid.len())
            .filter(|&j| psi0.values[j].norm() < 1e-14)
            .collect();
        Psi0Reference { psi0, zero_set }
    }

    /// A section with a single simple zero at `node`: on the torus
    /// `(2 − cos(x−x₀) − cos(y−y₀)) + (i/2) sin(x−x₀) sin(y−y₀)`, on a
    /// patch `z − z₀`.
    pub fn with_zero_at(grid: GridSpec, node: usize) -> Self {
        let (x0, y0) = grid.position(node);
        let psi0 = match grid.kind {
            DomainKind::PeriodicTorus => ScalarField::from_fn(grid, |x, y| {
                let (u, v) = (x - x0, y - y0);
                C64::new(2.0 - u.cos() - v.cos(), 0.5 * u.sin() * v.sin())
            }),
            DomainKind::DiskPatch => ScalarField::from_fn(grid, |x, y| C64::new(x - x0, y - y0)),
        };
        let mut r = Psi0Reference::new(psi0);
        // The profile is exactly zero at the node up to the rounding of x₀.
        r.psi0.values[node] = C64::new(0.0, 0.0);
        if !r.zero_set.contains(&node) {
            r.zero_set.push(node);
            r.zero_set.sort_unstable();
        }
        r
    }

    pub fn weight(&self, h: &HermitianMetric) -> ScalarField {
        inner_h_unchecked(h, &self.psi0, &self.psi0)
    }
}

fn check(p: &Configuration, x: &TangentVector, y: &TangentVector) -> Result<()> {
    same_grid(&p.grid(), &x.grid())?;
    same_grid(&p.grid(), &y.grid())
}

/// `∫ f dx dy`, real part.
fn integrate_re(f: &ScalarField) -> f64 {
    f.integrate().re
}

fn wedge_integral(a: &OneForm, b: &OneForm) -> C64 {
    integrate_two_form(&wedge_one_forms(a, b).expect("grids checked by caller"))
}

/// `Σ β Hη̄` over both stored spinor components.
fn spinor_pairing(h: &HermitianMetric, b: &SpinorPair, e: &SpinorPair) -> ScalarField {
    &inner_h_unchecked(h, &b.psi1, &e.psi1) + &inner_h_unchecked(h, &b.psi2bar, &e.psi2bar)
}

fn omega_density(p: &Configuration) -> ScalarField {
    p.metric.rho().abs2().scale_re(2.0)
}

/// `g(X,Y) = ∫*α₁∧α₂ + ∫Re⟨β,η⟩_H ω + ∫*γ₁∧γ₂`.
pub fn metric_g(p: &Configuration, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    check(p, x, y)?;
    let a = wedge_integral(&hodge_star_one_form(&x.alpha), &y.alpha).re;
    let c = wedge_integral(&hodge_star_one_form(&x.gamma), &y.gamma).re;
    let s = spinor_pairing(&p.h, &x.beta, &y.beta).zip_map(&omega_density(p), |v, w| v.re * w);
    Ok(a + integrate_re(&s) + c)
}

/// `𝓘(α, β, γ) = (*α, iβ, *γ)`.
pub fn acs_apply(x: &TangentVector) -> TangentVector {
    let star = |f: &OneForm| OneForm {
        tag: Reality::ImaginaryValued,
        ..hodge_star_one_form(f)
    };
    TangentVector {
        alpha: star(&x.alpha),
        beta: x.beta.scale(I),
        gamma: star(&x.gamma),
    }
}

/// `Ω(X,Y) = −∫α₁∧α₂ + ∫Re⟨iβ,η⟩_H ω − ∫γ₁∧γ₂`.
pub fn omega(p: &Configuration, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    check(p, x, y)?;
    let a = -wedge_integral(&x.alpha, &y.alpha).re;
    let c = -wedge_integral(&x.gamma, &y.gamma).re;
    let s = spinor_pairing(&p.h, &x.beta.scale(I), &y.beta).zip_map(&omega_density(p), |v, w| v.re * w);
    Ok(a + integrate_re(&s) + c)
}

/// `Ω_ψ₀`: as [`omega`] with the spinor term
/// `(i/2)∫[(β₁Hη̄₁ − β̄₁Hη₁) − (β₂Hη̄₂ − β̄₂Hη₂)]|ψ₀|²_H ω`.
pub fn omega_psi0(
    p: &Configuration,
    psi0: &Psi0Reference,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    check(p, x, y)?;
    same_grid(&p.grid(), &psi0.psi0.grid)?;
    let a = -wedge_integral(&x.alpha, &y.alpha).re;
    let c = -wedge_integral(&x.gamma, &y.gamma).re;
    let h = &p.h;
    let first = inner_h_unchecked(h, &x.beta.psi1, &y.beta.psi1);
    // β₂ = conj(b₂), η₂ = conj(e₂): β₂Hη̄₂ = conj(b₂)He₂.
    let b2e2 = inner_h_unchecked(h, &y.beta.psi2bar, &x.beta.psi2bar);
    let bracket = &(&first - &first.conj()) - &(&b2e2 - &b2e2.conj());
    let weight = &psi0.weight(h) * &omega_density(p);
    let s = (&bracket * &weight).scale(0.5 * I);
    Ok(a + integrate_re(&s) + c)
}

/// Push-forward of a tangent vector by a gauge transformation:
/// `(α, β, γ) ↦ (α, u⁻¹β, γ)`.
pub fn gauge_push(g: &GaugeTransform, x: &TangentVector) -> TangentVector {
    TangentVector {
        alpha: x.alpha.clone(),
        beta: x.beta.mul_field(&g.u_inv()),
        gamma: x.gamma.clone(),
    }
}

/// `H_ζ(p) = ∫ζ·μ(p)`, real for imaginary `ζ`.
pub fn hamiltonian_h_zeta(p: &Configuration, zeta: &ScalarField) -> Result<f64> {
    Ok(hamiltonian_h_zeta_complex(p, zeta)?.re)
}

/// As [`hamiltonian_h_zeta`] without discarding the imaginary part, which
/// vanishes for imaginary `ζ` and unitary `A`.
pub fn hamiltonian_h_zeta_complex(p: &Configuration, zeta: &ScalarField) -> Result<C64> {
    same_grid(&p.grid(), &zeta.grid)?;
    let mu = moment_map(p);
    Ok(integrate_two_form(&TwoForm::new(zeta * &mu.coeff)))
}

/// Block-diagonal Gram matrix of `g` on the coordinates of
/// [`crate::linearization::tangent_to_coords`].
pub fn metric_gram(asm: &ComplexAssembly) -> DMatrix<f64> {
    let basis = &asm.basis;
    let m = basis.len();
    let p = &asm.base;
    let grid = p.grid();
    let cell = grid.cell_area();
    let w: Vec<f64> =
        p.h.h
            .zip_map(&omega_density(p), |h, o| C64::new(h.re * o.re, 0.0))
            .values
            .iter()
            .map(|v| v.re * cell)
            .collect();
    let mut spinor = DMatrix::zeros(m, m);
    for k in 0..m {
        let bk = basis.function(k);
        for l in k..m {
            let bl = basis.function(l);
            let v: f64 = (0..grid.len()).map(|j| w[j] * bk[j] * bl[j]).sum();
            spinor[(k, l)] = v;
            spinor[(l, k)] = v;
        }
    }
    let one_form = 4.0 * grid.cell_area() * grid.len() as f64;
    let mut gram = DMatrix::zeros(8 * m, 8 * m);
    for b in 0..8 {
        let block = b * m;
        if (2..6).contains(&b) {
            gram.view_mut((block, block), (m, m)).copy_from(&spinor);
        } else {
            for k in 0..m {
                gram[(block + k, block + k)] = one_form;
            }
        }
    }
    gram
}

/// Orthonormal basis of the g-orthocomplement of the orbit directions.
pub fn orbit_orthogonal_basis(asm: &ComplexAssembly, threshold: f64) -> (DMatrix<f64>, RankInfo) {
    let constraint = asm.d1.transpose() * metric_gram(asm);
    null_space(&constraint, threshold)
}

/// Orthonormal basis of `ker D₂ ∩ (im D₁)^⊥g`, the numerical tangent
/// space of the moduli space.
pub fn moduli_tangent_basis(asm: &ComplexAssembly, threshold: f64) -> (DMatrix<f64>, RankInfo) {
    let constraint = asm.d1.transpose() * metric_gram(asm);
    let mut stacked = DMatrix::zeros(asm.d2.nrows() + constraint.nrows(), asm.d2.ncols());
    stacked.rows_mut(0, asm.d2.nrows()).copy_from(&asm.d2);
    stacked
        .rows_mut(asm.d2.nrows(), constraint.nrows())
        .copy_from(&constraint);
    null_space(&stacked, threshold)
}

/// Residuals of the orbit-orthogonality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitReport {
    /// Relative size of the g-projection of a pure orbit direction.
    pub orbit_projection: f64,
    /// `|d₂(𝓘X⊥)|` relative to `|X⊥|` for the projected vector.
    pub projected: f64,
    /// First-component residual of `d₂(𝓘X)` relative to `|X|` for the
    /// vector with an orbit component added.
    pub unprojected: f64,
}

impl OrbitReport {
    pub fn pass(&self, positive_tol: f64, negative_min: f64) -> bool {
        self.orbit_projection < positive_tol
            && self.projected < positive_tol
            && self.unprojected > negative_min
    }
}

fn sup_tangent(x: &TangentVector) -> f64 {
    [
        x.alpha.p10.sup_norm(),
        x.beta.psi1.sup_norm(),
        x.beta.psi2bar.sup_norm(),
        x.gamma.p10.sup_norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Checks that `𝓘` maps solution tangents to solution tangents exactly
/// when they are g-orthogonal to the gauge orbit. `x` holds coordinates of
/// a vector in `ker D₂`; `zeta` those of a gauge direction.
pub fn gauge_orbit_orthogonality(
    asm: &ComplexAssembly,
    x: &DVector<f64>,
    zeta: &DVector<f64>,
) -> Result<OrbitReport> {
    let gram = metric_gram(asm);
    let d1 = &asm.d1;
    let normal = d1.transpose() * &gram * d1;
    let chol = normal
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidOptions("orbit directions are linearly dependent (Ψ ≡ 0?)".into()))?;
    let project = |v: &DVector<f64>| -> DVector<f64> {
        let coeff = chol.solve(&(d1.transpose() * &gram * v));
        v - d1 * coeff
    };
    let orbit = d1 * zeta;
    let orbit_projection = project(&orbit).norm() / orbit.norm().max(f64::MIN_POSITIVE);

    let basis = &asm.basis;
    let xp = project(x);
    let xp_field = tangent_from_coords(basis, xp.as_slice());
    let y = apply_d2(&asm.base, &acs_apply(&xp_field))?;
    let projected = y.sup_norm() / sup_tangent(&xp_field).max(f64::MIN_POSITIVE);

    let raw = &xp + &orbit * (xp.norm() / orbit.norm().max(f64::MIN_POSITIVE));
    let raw_field = tangent_from_coords(basis, raw.as_slice());
    let y = apply_d2(&asm.base, &acs_apply(&raw_field))?;
    let unprojected = y.a.coeff.sup_norm() / sup_tangent(&raw_field).max(f64::MIN_POSITIVE);
    Ok(OrbitReport {
        orbit_projection,
        projected,
        unprojected,
    })
}

/// Singular values of the skew Gram matrix `Ω_ψ₀(wᵢ, wⱼ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NondegeneracyReport {
    pub singular_values: Vec<f64>,
    pub antisymmetry: f64,
}

impl NondegeneracyReport {
    pub fn min_over_max(&self) -> f64 {
        let max = self.singular_values.iter().copied().fold(0.0, f64::max);
        let min = self.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub fn full_rank(&self, threshold: f64) -> bool {
        self.min_over_max() > threshold
    }
}

pub fn nondegeneracy(
    p: &Configuration,
    psi0: &Psi0Reference,
    family: &[TangentVector],
) -> Result<NondegeneracyReport> {
    let k = family.len();
    let mut gram = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = omega_psi0(p, psi0, &family[i], &family[j])?;
        }
    }
    let antisymmetry = (&gram + gram.transpose()).abs().max();
    Ok(NondegeneracyReport {
        singular_values: singular_values(&gram),
        antisymmetry,
    })
}

/// `k` random unit combinations of the columns of `basis`, as fields.
pub fn random_family(
    asm: &ComplexAssembly,
    basis: &DMatrix<f64>,
    k: usize,
    rng: &mut crate::rng::FieldRng,
) -> Vec<TangentVector> {
    (0..k)
        .map(|_| {
            let c = DVector::from_fn(basis.ncols(), |_, _| rng.normal());
            let v = basis * c;
            let v = &v / v.norm();
            tangent_from_coords(&asm.basis, v.as_slice())
        })
        .collect()
}

/// Coordinates of a tangent vector, for callers holding fields.
pub fn coords_of(asm: &ComplexAssembly, x: &TangentVector) -> DVector<f64> {
    DVector::from_vec(tangent_to_coords(&asm.basis, x))
}
