//! Curvature functionals of the determinant line bundles and the
//! prequantization identities they satisfy.
//!
//! A line bundle whose connection varies by the unitary 1-form `a(X)` along
//! `X` has curvature `𝓕(X, Y) = −(i/2π)∫a(X)∧a(Y)`. The forms built from
//! spinor data use `θ = e^σh dz` and the reference section `ψ₀`.

use core::f64::consts::{PI, SQRT_2};

use crate::equations::Configuration;
use crate::error::Result;
use crate::gauge::{HermitianMetric, SpinorPair};
use crate::grid::{integrate_two_form, same_grid, wedge_one_forms, OneForm, Reality, ScalarField};
use crate::linearization::TangentVector;
use crate::symplectic::{omega_psi0, Psi0Reference};
use crate::{C64, I};

#[allow(unused_imports)]
use num_traits::Float;

/// `B±` from the configuration spinors.
#[derive(Debug, Clone, PartialEq)]
pub struct BFormSet {
    pub b_plus: OneForm,
    pub b_minus: OneForm,
}

/// `b±` from `X`'s spinor variation and `c±` from `Y`'s.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBForms {
    pub b_plus: OneForm,
    pub b_minus: OneForm,
    pub c_plus: OneForm,
    pub c_minus: OneForm,
}

impl TangentBForms {
    pub fn unitarity_defect(&self) -> f64 {
        [&self.b_plus, &self.b_minus, &self.c_plus, &self.c_minus]
            .iter()
            .map(|f| f.reality_defect())
            .fold(0.0, f64::max)
    }
}

/// `(±s̄₂ − s₁)Hψ̄₀ θ̄ + (s̄₁ ∓ s₂)Hψ₀ θ` for a spinor pair `(s₁, s̄₂)`.
fn spinor_form(
    h: &HermitianMetric,
    psi0: &ScalarField,
    rho: &ScalarField,
    s: &SpinorPair,
    sign: f64,
) -> OneForm {
    let h_rho = &h.h * rho;
    let p01 = &(&(&s.psi2bar.scale_re(sign) - &s.psi1) * &psi0.conj()) * &h_rho;
    let p10 = &(&(&s.psi1.conj() - &s.psi2bar.conj().scale_re(sign)) * psi0) * &h_rho;
    OneForm {
        p10,
        p01,
        tag: Reality::ImaginaryValued,
    }
}

pub fn make_b_forms(
    p: &Configuration,
    psi0: &Psi0Reference,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<(BFormSet, TangentBForms)> {
    let grid = p.grid();
    for g in [psi0.psi0.grid, x.grid(), y.grid()] {
        same_grid(&grid, &g)?;
    }
    let rho = p.metric.rho();
    let f = |s: &SpinorPair, sign: f64| spinor_form(&p.h, &psi0.psi0, &rho, s, sign);
    Ok((
        BFormSet {
            b_plus: f(&p.psi, 1.0),
            b_minus: f(&p.psi, -1.0),
        },
        TangentBForms {
            b_plus: f(&x.beta, 1.0),
            b_minus: f(&x.beta, -1.0),
            c_plus: f(&y.beta, 1.0),
            c_minus: f(&y.beta, -1.0),
        },
    ))
}

fn wedge(a: &OneForm, b: &OneForm) -> C64 {
    integrate_two_form(&wedge_one_forms(a, b).expect("shared grid"))
}

/// `−(i/2π)∫a∧b`.
fn line_curvature(a: &OneForm, b: &OneForm) -> C64 {
    -I / (2.0 * PI) * wedge(a, b)
}

fn combine(a: &OneForm, b: &OneForm, ca: f64, cb: f64) -> OneForm {
    OneForm {
        p10: &a.p10.scale_re(ca) + &b.p10.scale_re(cb),
        p01: &a.p01.scale_re(ca) + &b.p01.scale_re(cb),
        tag: Reality::ImaginaryValued,
    }
}

/// A ± pair of curvature functionals summed by quadrature, beside the
/// closed form in which the cross terms have cancelled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSum {
    pub total: C64,
    pub closed_form: C64,
    /// Size of the cross terms carried by the `+` bundles.
    pub cross_magnitude: f64,
}

impl CurvatureSum {
    /// `|total − closed form|` relative to the cross terms.
    pub fn cross_residual(&self) -> f64 {
        (self.total - self.closed_form).norm() / self.cross_magnitude.max(f64::MIN_POSITIVE)
    }
}

/// `𝓕_{ℒ₁⁺} + 𝓕_{ℒ₁⁻} + 𝓕_{ℒ₂⁺} + 𝓕_{ℒ₂⁻}` with
/// `𝓕_{ℒ₁±} = −(i/2π)∫½(α₁ ± b₊)∧½(α₂ ± c₊)` and `b₋, c₋` in `ℒ₂`.
pub fn curvature_sum_p(
    p: &Configuration,
    psi0: &Psi0Reference,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<CurvatureSum> {
    let (_, t) = make_b_forms(p, psi0, x, y)?;
    let (a1, a2) = (&x.alpha, &y.alpha);
    let mut total = C64::new(0.0, 0.0);
    for (b, c) in [(&t.b_plus, &t.c_plus), (&t.b_minus, &t.c_minus)] {
        for s in [1.0, -1.0] {
            total += line_curvature(&combine(a1, b, 0.5, 0.5 * s), &combine(a2, c, 0.5, 0.5 * s));
        }
    }
    let closed_form = -I / (2.0 * PI)
        * (wedge(a1, a2) + 0.5 * (wedge(&t.b_plus, &t.c_plus) + wedge(&t.b_minus, &t.c_minus)));
    let cross = |b: &OneForm, c: &OneForm| (wedge(a1, c) + wedge(b, a2)).norm() / (8.0 * PI);
    Ok(CurvatureSum {
        total,
        closed_form,
        cross_magnitude: cross(&t.b_plus, &t.c_plus) + cross(&t.b_minus, &t.c_minus),
    })
}

/// `𝓕_{𝓜⁺} + 𝓕_{𝓜⁻}` with `𝓕_{𝓜±} = −(i/2π)∫(α₁/√2 ± γ₁)∧(α₂/√2 ± γ₂)`.
pub fn curvature_sum_m(x: &TangentVector, y: &TangentVector) -> Result<CurvatureSum> {
    same_grid(&x.grid(), &y.grid())?;
    let (a1, a2, g1, g2) = (&x.alpha, &y.alpha, &x.gamma, &y.gamma);
    let r = 1.0 / SQRT_2;
    let total = [1.0, -1.0]
        .iter()
        .map(|s| line_curvature(&combine(a1, g1, r, *s), &combine(a2, g2, r, *s)))
        .sum();
    let closed_form = -I / (2.0 * PI) * (wedge(a1, a2) + 2.0 * wedge(g1, g2));
    let cross_magnitude = r * (wedge(a1, g2) + wedge(g1, a2)).norm() / (2.0 * PI);
    Ok(CurvatureSum {
        total,
        closed_form,
        cross_magnitude,
    })
}

/// `lhs` against `rhs` for one identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub lhs: C64,
    pub rhs: C64,
}

impl IdentityReport {
    /// `|lhs − rhs| / max(|lhs|, 1e-30)`.
    pub fn rel_err(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.lhs.norm().max(1e-30)
    }
}

/// `𝓕_𝓟 + 𝓕_𝓜` against `(i/π)Ω_ψ₀`.
pub fn identity_p_m(
    p: &Configuration,
    psi0: &Psi0Reference,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<IdentityReport> {
    let lhs = curvature_sum_p(p, psi0, x, y)?.total + curvature_sum_m(x, y)?.total;
    let rhs = I / PI * omega_psi0(p, psi0, x, y)?;
    Ok(IdentityReport { lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsReport {
    /// `𝓕_𝓣₊ + 𝓕_𝓣₋` with `𝓕_𝓣± = −(i/2π)∫b±∧c±`.
    pub f_t: C64,
    /// `2(𝓕_𝓢₊ + 𝓕_𝓢₋)` with `𝓕_𝓢± = −(i/2π)∫(α₁ ± γ₁)∧(α₂ ± γ₂)`.
    pub f_s: C64,
    pub identity: IdentityReport,
}

/// `𝓕_𝓣 + 𝓕_𝓢` against `(2i/π)Ω_ψ₀`.
pub fn curvature_t_s_identity(
    p: &Configuration,
    psi0: &Psi0Reference,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<TsReport> {
    let (_, t) = make_b_forms(p, psi0, x, y)?;
    let f_t = line_curvature(&t.b_plus, &t.c_plus) + line_curvature(&t.b_minus, &t.c_minus);
    let f_s = 2.0
        * [1.0, -1.0]
            .iter()
            .map(|s| {
                line_curvature(
                    &combine(&x.alpha, &x.gamma, 1.0, *s),
                    &combine(&y.alpha, &y.gamma, 1.0, *s),
                )
            })
            .sum::<C64>();
    let rhs = 2.0 * I / PI * omega_psi0(p, psi0, x, y)?;
    Ok(TsReport {
        f_t,
        f_s,
        identity: IdentityReport { lhs: f_t + f_s, rhs },
    })
}

/// The nodewise form of the ± cancellation: the `dz∧dz̄` coefficient of
/// `b₊∧c₊ + b₋∧c₋` minus `4i Im(β₁Hη̄₁ + b₂Hē₂)|ψ₀|²_H ρ²`, in sup norm
/// relative to the sup of the latter. Vanishes for every `H`.
pub fn bc_sum_defect(
    p: &Configuration,
    psi0: &Psi0Reference,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    let (_, t) = make_b_forms(p, psi0, x, y)?;
    let sum = &wedge_one_forms(&t.b_plus, &t.c_plus)?.coeff + &wedge_one_forms(&t.b_minus, &t.c_minus)?.coeff;
    let h = &p.h;
    let pair = &crate::gauge::inner_h(h, &x.beta.psi1, &y.beta.psi1)?
        + &crate::gauge::inner_h(h, &x.beta.psi2bar, &y.beta.psi2bar)?;
    let weight = &psi0.weight(h) * &p.metric.rho().abs2();
    let want = pair.zip_map(&weight, |v, w| C64::new(0.0, 4.0 * v.im * w.re));
    Ok(sum.max_abs_diff(&want) / want.sup_norm().max(f64::MIN_POSITIVE))
}
