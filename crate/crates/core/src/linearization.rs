//! The deformation complex `0 → Ω⁰(iℝ) →d₁→ T𝒮 →d₂→ Ω²(iℝ) ⊕ Ω² ⊕ Ω⁰¹(S) → 0`
//! at a configuration, its numerical cohomology, and the lattice index of
//! `∂̄` on a torus.
//!
//! Both operators carry the homotopy parameter `t`: `d₁ᵗζ = (dζ, −tζΨ, 0)`
//! and `d₂ᵗ` scales every term coupling the variation to `Ψ` or `Φ` by `t`.
//! At `t = 0` the complex splits into the de Rham, `∂` and `∂̄` pieces.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::constants::GAP_RATIO_MIN;
use crate::equations::Configuration;
use crate::error::{Error, Result};
use crate::gauge::{
    covariant_dbar, inner_h_unchecked, make_uniform_flux_links, shift_x, shift_y, SpinorPair,
};
use crate::grid::{
    d_one_form, d_scalar, derivative, same_grid, DomainKind, GridSpec, OneForm, Reality, ScalarField,
    TwoForm, Which,
};
use crate::linalg::{frobenius, rank, rank_from_singular_values, singular_values, RankInfo};
use crate::{C64, I};

#[allow(unused_imports)]
use num_traits::Float;

/// A variation `X = (α, β, γ)` of `(A, Ψ, Φ)`. `beta.psi2bar` is the
/// variation of `ψ̄₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub alpha: OneForm,
    pub beta: SpinorPair,
    pub gamma: OneForm,
}

impl TangentVector {
    pub fn zeros(grid: GridSpec) -> Self {
        TangentVector {
            alpha: OneForm::zeros(grid),
            beta: SpinorPair::zeros(grid),
            gamma: OneForm::zeros(grid),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.alpha.grid()
    }

    /// Largest violation of the reality constraints on `α` and `γ`.
    pub fn reality_defect(&self) -> f64 {
        self.alpha.reality_defect().max(self.gamma.reality_defect())
    }

    pub fn add(&self, other: &TangentVector) -> TangentVector {
        TangentVector {
            alpha: imaginary_sum(&self.alpha, &other.alpha),
            beta: self.beta.add(&other.beta),
            gamma: imaginary_sum(&self.gamma, &other.gamma),
        }
    }

    pub fn scale_re(&self, c: f64) -> TangentVector {
        TangentVector {
            alpha: self.alpha.scale_re(c),
            beta: self.beta.scale(C64::new(c, 0.0)),
            gamma: self.gamma.scale_re(c),
        }
    }
}

fn imaginary_sum(a: &OneForm, b: &OneForm) -> OneForm {
    OneForm {
        p10: &a.p10 + &b.p10,
        p01: &a.p01 + &b.p01,
        tag: Reality::ImaginaryValued,
    }
}

/// Reading of the spinor pairing in the linearized first equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingVariant {
    /// `Re(⟨ψ₁,β₁⟩_H + ⟨ψ₂,β₂⟩_H)`: the differential of the moment map.
    #[default]
    Real,
    /// The pairings without the real part.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2Options {
    pub variant: PairingVariant,
    pub t: f64,
}

impl Default for D2Options {
    fn default() -> Self {
        D2Options {
            variant: PairingVariant::Real,
            t: 1.0,
        }
    }
}

/// The three components of `d₂X`.
#[derive(Debug, Clone, PartialEq)]
pub struct D2Output {
    pub a: TwoForm,
    pub b: TwoForm,
    pub c: SpinorPair,
}

impl D2Output {
    pub fn sup_norm(&self) -> f64 {
        self.a
            .coeff
            .sup_norm()
            .max(self.b.coeff.sup_norm())
            .max(self.c.psi1.sup_norm())
            .max(self.c.psi2bar.sup_norm())
    }
}

fn require_imaginary(zeta: &ScalarField) -> Result<()> {
    let scale = 1.0 + zeta.sup_norm();
    match zeta.values.iter().position(|v| v.re.abs() > 1e-14 * scale) {
        Some(i) => Err(Error::InvalidOptions(alloc::format!(
            "gauge direction must be purely imaginary (node {i})"
        ))),
        None => Ok(()),
    }
}

/// `d₁ζ = (dζ, −ζΨ, 0)`.
pub fn apply_d1(p: &Configuration, zeta: &ScalarField) -> Result<TangentVector> {
    apply_d1_t(p, zeta, 1.0)
}

pub fn apply_d1_t(p: &Configuration, zeta: &ScalarField, t: f64) -> Result<TangentVector> {
    same_grid(&p.grid(), &zeta.grid)?;
    require_imaginary(zeta)?;
    let mut alpha = d_scalar(zeta);
    alpha.tag = Reality::ImaginaryValued;
    let minus = zeta.scale_re(-t);
    Ok(TangentVector {
        alpha,
        beta: p.psi.mul_field(&minus),
        gamma: OneForm::zeros(zeta.grid),
    })
}

pub fn apply_d2(p: &Configuration, x: &TangentVector) -> Result<D2Output> {
    apply_d2_with(p, x, D2Options::default())
}

/// The linearized residuals
///
/// * `A = dα − it·P(Ψ, β) ω`,
/// * `B = ∂γ⁰¹`,
/// * `C = (∂̄ + A⁰¹)β ± ½φ̄β̄ + t(α⁰¹Ψ ∓ ½γ⁰¹Ψ̄)` row by row,
///
/// where `P` is the pairing selected by `opts.variant`. `C` is the
/// derivative of the Dirac residual, so with `t = 1` and the real pairing
/// `d₂` is the differential of the full residual map.
pub fn apply_d2_with(p: &Configuration, x: &TangentVector, opts: D2Options) -> Result<D2Output> {
    let grid = p.grid();
    same_grid(&grid, &x.grid())?;
    let t = opts.t;
    let psi = &p.psi;
    let beta = &x.beta;
    let p1 = inner_h_unchecked(&p.h, &psi.psi1, &beta.psi1);
    let pairing = match opts.variant {
        PairingVariant::Real => (&p1 + &inner_h_unchecked(&p.h, &psi.psi2bar, &beta.psi2bar)).re(),
        // ⟨ψ₂, β₂⟩_H with ψ₂ = conj(ψ̄₂) and β₂ = conj(b₂).
        PairingVariant::Literal => &p1 + &inner_h_unchecked(&p.h, &beta.psi2bar, &psi.psi2bar),
    };
    let rho = p.metric.rho();
    let omega_source = &(&pairing * &rho) * &rho;
    let a = TwoForm::new(&d_one_form(&x.alpha).coeff + &omega_source.scale_re(t));
    let b = TwoForm::new(derivative(&x.gamma.p01, Which::Z));

    let half_phibar = p.phi.phibar().scale_re(0.5);
    let a01 = &x.alpha.p01;
    let g01 = x.gamma.p01.scale_re(0.5);
    let c1 = &(&covariant_dbar(&p.a, &beta.psi1)? + &(&half_phibar * &beta.psi2bar))
        + &(&(a01 * &psi.psi1) - &(&g01 * &psi.psi2bar)).scale_re(t);
    let c2 = &(&covariant_dbar(&p.a, &beta.psi2bar)? - &(&half_phibar * &beta.psi1))
        + &(&(a01 * &psi.psi2bar) + &(&g01 * &psi.psi1)).scale_re(t);
    Ok(D2Output {
        a,
        b,
        c: SpinorPair {
            psi1: c1,
            psi2bar: c2,
        },
    })
}

/// The density `D` with `g(d₁(if), X) = ∫ f·D dx dy` for real `f` vanishing
/// near the boundary: `−4 Im(∂̄a) + 2ρ² Im(⟨ψ₁,β₁⟩_H + ⟨ψ̄₂,b₂⟩_H)` for
/// `α = a dz − ā dz̄`. Its vanishing is the Coulomb-type gauge condition.
pub fn orbit_adjoint(p: &Configuration, x: &TangentVector) -> Result<ScalarField> {
    same_grid(&p.grid(), &x.grid())?;
    let dbar_a = derivative(&x.alpha.p10, Which::ZBar);
    let pairing = &inner_h_unchecked(&p.h, &p.psi.psi1, &x.beta.psi1)
        + &inner_h_unchecked(&p.h, &p.psi.psi2bar, &x.beta.psi2bar);
    let rho2 = p.metric.rho().abs2();
    Ok(dbar_a.zip_map(
        &pairing.zip_map(&rho2, |a, r| C64::new(a.im * r.re, 0.0)),
        |d, s| C64::new(-4.0 * d.im + 2.0 * s.re, 0.0),
    ))
}

/// Real orthonormal trigonometric basis on a torus grid: the constant and
/// `√2 cos(k·x)`, `√2 sin(k·x)` for `0 < |kₓ|, |k_y| < n/2` on a half
/// lattice. Orthonormal for the grid mean, so `∫ bₖ bₗ = (2π)² δₖₗ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBasis {
    pub grid: GridSpec,
    /// Row `k` holds the values of basis function `k`.
    table: Vec<Vec<f64>>,
}

impl RealBasis {
    pub fn new(grid: GridSpec) -> Result<Self> {
        grid.require_kind(DomainKind::PeriodicTorus)?;
        let kx_max = (grid.nx as i64 - 1) / 2;
        let ky_max = (grid.ny as i64 - 1) / 2;
        let mut table = vec![vec![1.0; grid.len()]];
        for kx in 0..=kx_max {
            for ky in -ky_max..=ky_max {
                if kx == 0 && ky <= 0 {
                    continue;
                }
                let mut c = Vec::with_capacity(grid.len());
                let mut s = Vec::with_capacity(grid.len());
                for j in 0..grid.len() {
                    let (x, y) = grid.position(j);
                    let phase = kx as f64 * x + ky as f64 * y;
                    c.push(core::f64::consts::SQRT_2 * phase.cos());
                    s.push(core::f64::consts::SQRT_2 * phase.sin());
                }
                table.push(c);
                table.push(s);
            }
        }
        Ok(RealBasis { grid, table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn function(&self, k: usize) -> &[f64] {
        &self.table[k]
    }

    /// `Σₖ coeffs[k]·bₖ` as a real field.
    pub fn synthesize(&self, coeffs: &[f64]) -> ScalarField {
        let mut v = vec![C64::new(0.0, 0.0); self.grid.len()];
        for (row, c) in self.table.iter().zip(coeffs) {
            if *c != 0.0 {
                for (out, b) in v.iter_mut().zip(row) {
                    out.re += c * b;
                }
            }
        }
        ScalarField {
            grid: self.grid,
            values: v,
        }
    }

    /// Grid-mean projection of the real and imaginary parts of `f`.
    pub fn project(&self, f: &ScalarField) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len() as f64;
        let mut re = Vec::with_capacity(self.len());
        let mut im = Vec::with_capacity(self.len());
        for row in &self.table {
            let mut s = C64::new(0.0, 0.0);
            for (b, v) in row.iter().zip(&f.values) {
                s += v * *b;
            }
            re.push(s.re / n);
            im.push(s.im / n);
        }
        (re, im)
    }

    fn complex_field(&self, re: &[f64], im: &[f64]) -> ScalarField {
        let r = self.synthesize(re);
        let i = self.synthesize(im);
        r.zip_map(&i, |a, b| C64::new(a.re, b.re))
    }
}

/// Real coordinates on the middle space: `[Re a, Im a, Re β₁, Im β₁,
/// Re b₂, Im b₂, Re g, Im g]`, each block of basis size, where
/// `α = a dz − ā dz̄` and `γ = g dz − ḡ dz̄`.
pub fn tangent_from_coords(basis: &RealBasis, v: &[f64]) -> TangentVector {
    let m = basis.len();
    let block = |k: usize| &v[k * m..(k + 1) * m];
    TangentVector {
        alpha: OneForm::imaginary(basis.complex_field(block(0), block(1))),
        beta: SpinorPair {
            psi1: basis.complex_field(block(2), block(3)),
            psi2bar: basis.complex_field(block(4), block(5)),
        },
        gamma: OneForm::imaginary(basis.complex_field(block(6), block(7))),
    }
}

pub fn tangent_to_coords(basis: &RealBasis, x: &TangentVector) -> Vec<f64> {
    let mut out = Vec::with_capacity(8 * basis.len());
    for f in [&x.alpha.p10, &x.beta.psi1, &x.beta.psi2bar, &x.gamma.p10] {
        let (re, im) = basis.project(f);
        out.extend(re);
        out.extend(im);
    }
    out
}

/// Real coordinates on the last space: `[A, Re B, Im B, Re C₁, Im C₁,
/// Re C₂, Im C₂]`. `A` is real for the real pairing.
pub fn output_to_coords(basis: &RealBasis, y: &D2Output) -> Vec<f64> {
    let mut out = Vec::with_capacity(7 * basis.len());
    out.extend(basis.project(&y.a.coeff).0);
    for f in [&y.b.coeff, &y.c.psi1, &y.c.psi2bar] {
        let (re, im) = basis.project(f);
        out.extend(re);
        out.extend(im);
    }
    out
}

/// `ζ = i·Σ cₖbₖ`.
pub fn gauge_from_coords(basis: &RealBasis, c: &[f64]) -> ScalarField {
    basis.synthesize(c).map(|v| I * v)
}

/// Dense real matrices of `d₁ᵗ`, `d₂ᵗ` on the band-limited basis, with
/// `d₂ᵗ` followed by projection onto the same band.
#[derive(Debug, Clone)]
pub struct ComplexAssembly {
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
    pub base: Configuration,
    pub basis: RealBasis,
    pub opts: D2Options,
}

impl ComplexAssembly {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d1.ncols(), self.d1.nrows(), self.d2.nrows())
    }

    /// `‖D₂D₁‖_F / (‖D₂‖_F ‖D₁‖_F)`.
    pub fn complex_defect(&self) -> f64 {
        let prod = &self.d2 * &self.d1;
        frobenius(&prod) / (frobenius(&self.d2) * frobenius(&self.d1)).max(f64::MIN_POSITIVE)
    }
}

/// Assembles the complex at a torus configuration. The literal pairing is
/// rejected: its first component leaves the space of imaginary 2-forms, so
/// it has no matrix on these coordinates.
pub fn assemble_complex(p: &Configuration, opts: D2Options) -> Result<ComplexAssembly> {
    if opts.variant != PairingVariant::Real {
        return Err(Error::InvalidOptions(
            "the literal pairing does not map into imaginary 2-forms".into(),
        ));
    }
    let basis = RealBasis::new(p.grid())?;
    let m = basis.len();
    let mut d1 = DMatrix::zeros(8 * m, m);
    let mut e = vec![0.0; m];
    for k in 0..m {
        e[k] = 1.0;
        let x = apply_d1_t(p, &gauge_from_coords(&basis, &e), opts.t)?;
        d1.set_column(k, &nalgebra::DVector::from_vec(tangent_to_coords(&basis, &x)));
        e[k] = 0.0;
    }
    let mut d2 = DMatrix::zeros(7 * m, 8 * m);
    let mut e = vec![0.0; 8 * m];
    for k in 0..8 * m {
        e[k] = 1.0;
        let y = apply_d2_with(p, &tangent_from_coords(&basis, &e), opts)?;
        d2.set_column(k, &nalgebra::DVector::from_vec(output_to_coords(&basis, &y)));
        e[k] = 0.0;
    }
    Ok(ComplexAssembly {
        d1,
        d2,
        base: p.clone(),
        basis,
        opts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohomologyReport {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub d1: RankInfo,
    pub d2: RankInfo,
}

impl CohomologyReport {
    pub fn reliable(&self) -> bool {
        self.d1.reliable() && self.d2.reliable()
    }

    /// `h0 − h1 + h2`.
    pub fn euler(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }
}

pub fn cohomology_dims(asm: &ComplexAssembly, svd_threshold: f64) -> CohomologyReport {
    let (n0, n1, n2) = asm.dims();
    let r1 = rank(&asm.d1, svd_threshold);
    let r2 = rank(&asm.d2, svd_threshold);
    CohomologyReport {
        h0: n0 - r1.rank,
        h1: (n1 - r2.rank).saturating_sub(r1.rank),
        h2: n2 - r2.rank,
        d1: r1,
        d2: r2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionCase {
    /// Both spinors and the Higgs field present.
    Full,
    /// `Φ = 0`, both spinors present.
    Phi0BothSpinors,
    /// `Φ = 0`, `ψ₁ = 0`.
    Phi0Psi1Zero,
}

pub fn dimension_formula(g: i64, c1: i64, case: DimensionCase) -> i64 {
    match case {
        DimensionCase::Full => 2 * g + 2 * c1 + 2,
        DimensionCase::Phi0BothSpinors => 2 * c1 + 2,
        DimensionCase::Phi0Psi1Zero => g + c1 + 1,
    }
}

/// Result of a lattice index computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexReport {
    pub degree: i64,
    /// Zero modes of positive chirality (holomorphic sections).
    pub n_plus: usize,
    /// Zero modes of negative chirality (the cokernel of `∂̄`).
    pub n_minus: usize,
    pub index: i64,
    pub gap_ratio: f64,
}

impl IndexReport {
    pub fn reliable(&self) -> bool {
        self.gap_ratio >= GAP_RATIO_MIN
    }
}

/// Wilson–Dirac operator in lattice units on two-component sections
/// `(s₊, s₋)` (node-major, component-minor), built from the covariant
/// differences of the links. Its lower-left block is `2∂̄_A`.
pub fn wilson_dirac(links: &crate::gauge::LinkField) -> DMatrix<C64> {
    let g = &links.grid;
    let n = g.len();
    let mut d = DMatrix::from_element(2 * n, 2 * n, C64::new(0.0, 0.0));
    let half = C64::new(0.5, 0.0);
    for j in 0..n {
        let hops = [
            (shift_x(g, j, 1), links.ux[j].conj(), C64::new(1.0, 0.0)),
            (
                shift_x(g, j, -1),
                links.ux[shift_x(g, j, -1)],
                C64::new(-1.0, 0.0),
            ),
            (shift_y(g, j, 1), links.uy[j].conj(), I),
            (shift_y(g, j, -1), links.uy[shift_y(g, j, -1)], -I),
        ];
        for c in 0..2 {
            d[(2 * j + c, 2 * j + c)] += C64::new(2.0, 0.0);
        }
        for (k, u, w) in hops {
            // Wilson term −½ Σ (U s(j±μ) − s(j)) per direction.
            for c in 0..2 {
                d[(2 * j + c, 2 * k + c)] -= half * u;
            }
            // Lower-left ∇₁ + i∇₂, upper-right ∇₁ − i∇₂ with central ∇.
            d[(2 * j + 1, 2 * k)] += half * w * u;
            d[(2 * j, 2 * k + 1)] += half * w.conj() * u;
        }
    }
    d
}

/// `dim ker ∂̄ − dim coker ∂̄` on a degree-`d` torus bundle, counted as the
/// chiral zero modes of the overlap operator
/// `D = 1 + γ₅ sign(γ₅(D_W − 1))`, `γ₅ = diag(1, −1)`.
pub fn riemann_roch_index(d: i64, grid: GridSpec, svd_threshold: f64) -> Result<IndexReport> {
    grid.require_kind(DomainKind::PeriodicTorus)?;
    let links = make_uniform_flux_links(d, grid)?;
    let n = grid.len();
    let mut h = wilson_dirac(&links);
    for i in 0..2 * n {
        h[(i, i)] -= C64::new(1.0, 0.0);
    }
    for j in 0..n {
        for c in 0..2 * n {
            h[(2 * j + 1, c)] = -h[(2 * j + 1, c)];
        }
    }
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let mut vs = v.clone();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = if *lambda >= 0.0 { 1.0 } else { -1.0 };
        vs.column_mut(k).scale_mut(s);
    }
    let mut ov = vs * v.adjoint();
    for j in 0..n {
        for c in 0..2 * n {
            ov[(2 * j + 1, c)] = -ov[(2 * j + 1, c)];
        }
    }
    for i in 0..2 * n {
        ov[(i, i)] += C64::new(1.0, 0.0);
    }
    let chiral = |c: usize| {
        let cols: Vec<usize> = (0..n).map(|j| 2 * j + c).collect();
        ov.select_columns(cols.iter())
    };
    let plus = rank_from_singular_values(&singular_values(&chiral(0)), svd_threshold);
    let minus = rank_from_singular_values(&singular_values(&chiral(1)), svd_threshold);
    let n_plus = n - plus.rank;
    let n_minus = n - minus.rank;
    Ok(IndexReport {
        degree: d,
        n_plus,
        n_minus,
        index: n_plus as i64 - n_minus as i64,
        gap_ratio: plus.gap_ratio.min(minus.gap_ratio),
    })
}

/// A configuration with constant `Ψ = (p, −ip)` and `A⁰¹ = (i/2)φ̄`, which
/// solves the Dirac-type equation exactly for any `φ̄`.
pub fn dirac_solution_base(grid: GridSpec, p: C64, phibar: &ScalarField) -> Result<Configuration> {
    same_grid(&grid, &phibar.grid)?;
    let mut c = Configuration::trivial(grid);
    c.a = crate::gauge::Connection::from_a01(phibar.scale(0.5 * I));
    c.psi = SpinorPair {
        psi1: ScalarField::constant(grid, p),
        psi2bar: ScalarField::constant(grid, -I * p),
    };
    c.phi = crate::gauge::HiggsField::new(phibar.conj());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::FieldRng;

    fn torus(n: usize) -> GridSpec {
        GridSpec::torus(n, n).unwrap()
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = RealBasis::new(torus(8)).unwrap();
        assert_eq!(b.len(), 49);
        for k in [0, 3, 17, 48] {
            let f = b.synthesize(&{
                let mut e = vec![0.0; b.len()];
                e[k] = 1.0;
                e
            });
            let (re, im) = b.project(&f);
            for (l, v) in re.iter().enumerate() {
                assert!((v - if l == k { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
            assert!(im.iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn d2_is_the_derivative_of_the_residual_map() {
        let g = torus(16);
        let mut rng = FieldRng::new(3, 1);
        let mut p = Configuration::trivial(g);
        p.a = crate::gauge::Connection::Smooth(rng.imaginary_one_form(g));
        p.psi = SpinorPair::new(rng.field(g), rng.field(g)).unwrap();
        p.phi = crate::gauge::HiggsField::new(rng.field(g));
        let x = TangentVector {
            alpha: rng.imaginary_one_form(g),
            beta: SpinorPair::new(rng.field(g), rng.field(g)).unwrap(),
            gamma: rng.imaginary_one_form(g),
        };
        let shifted = |eps: f64| {
            let mut q = p.clone();
            if let crate::gauge::Connection::Smooth(a) = &p.a {
                q.a = crate::gauge::Connection::Smooth(imaginary_sum(a, &x.alpha.scale_re(eps)));
            }
            q.psi = p.psi.add(&x.beta.scale(C64::new(eps, 0.0)));
            q.phi = crate::gauge::HiggsField::new(&p.phi.phi + &x.gamma.p10.scale_re(eps));
            crate::equations::residual_fields(&q).unwrap()
        };
        let eps = 1e-3;
        let (rp, rm) = (shifted(eps), shifted(-eps));
        let y = apply_d2(&p, &x).unwrap();
        let fd = |a: &ScalarField, b: &ScalarField| (a - b).scale_re(0.5 / eps);
        assert!(fd(&rp.r21.coeff, &rm.r21.coeff).max_abs_diff(&y.a.coeff) < 1e-9);
        assert!(fd(&rp.r22.coeff, &rm.r22.coeff).max_abs_diff(&y.b.coeff) < 1e-9);
        assert!(fd(&rp.r23.psi1, &rm.r23.psi1).max_abs_diff(&y.c.psi1) < 1e-9);
        assert!(fd(&rp.r23.psi2bar, &rm.r23.psi2bar).max_abs_diff(&y.c.psi2bar) < 1e-9);
    }

    #[test]
    fn complex_property_at_dirac_solution() {
        let g = torus(8);
        let phibar = FieldRng::new(5, 0).field(g);
        let p = dirac_solution_base(g, C64::new(0.7, -0.2), &phibar).unwrap();
        let zeta = FieldRng::new(5, 1).imaginary_field(g);
        let x = apply_d1(&p, &zeta).unwrap();
        assert!(apply_d2(&p, &x).unwrap().sup_norm() < 1e-12);
        let asm = assemble_complex(&p, D2Options::default()).unwrap();
        assert!(asm.complex_defect() < 1e-12, "{}", asm.complex_defect());
    }

    #[test]
    fn first_component_vanishes_on_orbits_only_for_real_pairing() {
        let g = torus(8);
        let mut rng = FieldRng::new(6, 0);
        let mut p = Configuration::trivial(g);
        p.psi = SpinorPair::new(rng.field(g), rng.field(g)).unwrap();
        let x = apply_d1(&p, &rng.imaginary_field(g)).unwrap();
        assert!(apply_d2(&p, &x).unwrap().a.coeff.sup_norm() < 1e-12);
        let literal = D2Options {
            variant: PairingVariant::Literal,
            t: 1.0,
        };
        assert!(apply_d2_with(&p, &x, literal).unwrap().a.coeff.sup_norm() > 1e-3);
    }

    #[test]
    fn decoupled_counts() {
        let g = torus(8);
        let p = dirac_solution_base(g, C64::new(1.0, 0.0), &ScalarField::zeros(g)).unwrap();
        let opts = D2Options {
            t: 0.0,
            ..Default::default()
        };
        let r = cohomology_dims(&assemble_complex(&p, opts).unwrap(), 1e-8);
        assert_eq!((r.h0, r.h1, r.h2), (1, 8, 7));
        assert!(r.reliable());
        let r1 = cohomology_dims(&assemble_complex(&p, D2Options::default()).unwrap(), 1e-8);
        assert_eq!(r1.h0, 0);
        assert_eq!(r1.euler(), r.euler());
    }

    #[test]
    fn formulas() {
        assert_eq!(dimension_formula(2, -2, DimensionCase::Full), 2);
        assert_eq!(dimension_formula(1, 0, DimensionCase::Phi0BothSpinors), 2);
        assert_eq!(dimension_formula(0, 0, DimensionCase::Phi0Psi1Zero), 1);
    }

    #[test]
    fn lattice_index_small() {
        for d in [0, 1, -1] {
            let r = riemann_roch_index(d, torus(8), 1e-8).unwrap();
            assert_eq!(r.index, d, "{r:?}");
            assert!(r.reliable(), "{r:?}");
        }
    }
}
