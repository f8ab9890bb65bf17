//! Residuals of the invariant equations on a surface:
//!
//! * `F(A) = (i/2)(|ψ₁|²_H + |ψ₂|²_H) ω`,
//! * `∂Φ⁰¹ = 0`,
//! * `(∂̄ + A⁰¹)ψ₁ + ½φ̄ψ̄₂ = 0` and `−½φ̄ψ₁ + (∂̄ + A⁰¹)ψ̄₂ = 0`, both read
//!   as coefficients of `dz̄`.
//!
//! Curvature uses the normalization `K(ρ) = −(2/ρ²)∂∂̄ ln ρ`, half the
//! classical Gaussian curvature, which is what makes the curvature equation
//! `K(e^σh) = −½(|ψ₁|²_H + |ψ₂|²_H)` equivalent to the first equation for the
//! patch family below.

use crate::error::{Error, Result};
use crate::gauge::{
    covariant_dbar, curvature, gauge_act, Connection, GaugeTransform, HermitianMetric, HiggsField, SpinorPair,
};
use crate::grid::{
    derivative, laplacian, same_grid, DomainKind, GridSpec, MetricData, OneForm, Reality, ScalarField,
    TwoForm, Which,
};
use crate::{C64, I};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub a: Connection,
    pub psi: SpinorPair,
    pub phi: HiggsField,
    pub metric: MetricData,
    pub h: HermitianMetric,
}

impl Configuration {
    pub fn new(
        a: Connection,
        psi: SpinorPair,
        phi: HiggsField,
        metric: MetricData,
        h: HermitianMetric,
    ) -> Result<Self> {
        let g = a.grid();
        for other in [psi.grid(), phi.phi.grid, metric.grid(), h.h.grid] {
            same_grid(&g, &other)?;
        }
        Ok(Configuration {
            a,
            psi,
            phi,
            metric,
            h,
        })
    }

    /// Flat connection, vanishing fields, flat metric, unit `H`.
    pub fn trivial(grid: GridSpec) -> Self {
        Configuration {
            a: Connection::flat(grid),
            psi: SpinorPair::zeros(grid),
            phi: HiggsField::zeros(grid),
            metric: MetricData::flat(grid),
            h: HermitianMetric::unit(grid),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.a.grid()
    }

    pub fn gauge_act(&self, g: &GaugeTransform) -> Result<Self> {
        let (a, psi, phi) = gauge_act(g, (&self.a, &self.psi, &self.phi))?;
        Ok(Configuration {
            a,
            psi,
            phi,
            metric: self.metric.clone(),
            h: self.h.clone(),
        })
    }
}

/// Sup and L² norms over active nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub sup: f64,
    pub l2: f64,
}

impl Norms {
    pub fn of(f: &ScalarField) -> Self {
        Norms {
            sup: f.sup_norm(),
            l2: f.l2_norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualFields {
    pub r21: TwoForm,
    pub r22: TwoForm,
    pub r23: SpinorPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub r21: Norms,
    pub r22: Norms,
    pub r23: [Norms; 2],
}

impl ResidualReport {
    pub fn max_sup(&self) -> f64 {
        self.r21
            .sup
            .max(self.r22.sup)
            .max(self.r23[0].sup)
            .max(self.r23[1].sup)
    }

    /// `(Σ ‖rᵢ‖²_{L²})^{1/2}` over all four residual components.
    pub fn combined_l2(&self) -> f64 {
        (self.r21.l2.powi(2) + self.r22.l2.powi(2) + self.r23[0].l2.powi(2) + self.r23[1].l2.powi(2)).sqrt()
    }
}

/// `μ = F(A) − (i/2)(|ψ₁|²_H + |ψ₂|²_H)ω`; the residual of the first
/// equation under another name.
pub fn moment_map(c: &Configuration) -> TwoForm {
    let f = curvature(&c.a).coeff;
    let density = c.psi.density(&c.h);
    let omega = c.metric.omega().coeff;
    let source = (&density * &omega).scale(0.5 * I);
    TwoForm::new(&f - &source)
}

/// `∂Φ⁰¹ = −∂φ̄ dz∧dz̄`.
pub fn higgs_residual(phi: &HiggsField) -> TwoForm {
    TwoForm::new(-&derivative(&phi.phibar(), Which::Z))
}

/// The two `dz̄` coefficients of the Dirac-type operator applied to `Ψ`.
pub fn dirac_residual(c: &Configuration) -> Result<SpinorPair> {
    let half_phibar = c.phi.phibar().scale_re(0.5);
    let d1 = covariant_dbar(&c.a, &c.psi.psi1)?;
    let d2 = covariant_dbar(&c.a, &c.psi.psi2bar)?;
    Ok(SpinorPair {
        psi1: &d1 + &(&half_phibar * &c.psi.psi2bar),
        psi2bar: &d2 - &(&half_phibar * &c.psi.psi1),
    })
}

pub fn residual_fields(c: &Configuration) -> Result<ResidualFields> {
    Ok(ResidualFields {
        r21: moment_map(c),
        r22: higgs_residual(&c.phi),
        r23: dirac_residual(c)?,
    })
}

pub fn residuals(c: &Configuration) -> Result<ResidualReport> {
    let r = residual_fields(c)?;
    Ok(ResidualReport {
        r21: Norms::of(&r.r21.coeff),
        r22: Norms::of(&r.r22.coeff),
        r23: [Norms::of(&r.r23.psi1), Norms::of(&r.r23.psi2bar)],
    })
}

/// `K(e^σh) = −Δ ln ρ / (2ρ²)` with the grid Laplacian.
pub fn curvature_k(metric: &MetricData) -> ScalarField {
    let rho = metric.rho();
    let lap = laplacian(&rho.ln());
    lap.zip_map(&rho, |l, r| C64::new(-l.re / (2.0 * r.re * r.re), 0.0))
}

/// The connection `∂ ln ρ − ∂̄ ln ρ` induced by the metric.
pub fn metric_connection(metric: &MetricData) -> Connection {
    let ln_rho = metric.rho().ln();
    Connection::Smooth(OneForm {
        p10: derivative(&ln_rho, Which::Z),
        p01: -&derivative(&ln_rho, Which::ZBar),
        tag: Reality::UnitaryConnection,
    })
}

/// `sup |∂̄f|` over active nodes.
pub fn dbar_sup(f: &ScalarField) -> f64 {
    derivative(f, Which::ZBar).sup_norm()
}

/// Closed-form solutions on a hyperbolic patch.
///
/// With `h = 2/(1 − |z|²)`, `ρ = e^σh` and `A = ∂ln ρ − ∂̄ln ρ` (so that
/// `A⁰¹ = −∂̄ ln ρ`), the sections `ψ₁ = e^f ρ`, `ψ̄₂ = e^g ρ` are
/// annihilated by `∂̄ + A⁰¹` for holomorphic `f, g`. The fiber metric
/// `H = ρ⁻²` gives `|ψ₁|²_H = |e^f|²`, so the first equation reduces to
/// `K(ρ) = −½(|e^f|² + |e^g|²)`; at `σ = 0`, `f = g = −ln 2 / 2` this is the
/// identity `K(h) = −½`.
///
/// `f` and `g` are rejected when `sup|∂̄f|` exceeds `dx·(1 + sup|f|)`,
/// which admits second-order truncation error but not genuine
/// antiholomorphic content.
pub fn hyperbolic_patch_config(
    f: &ScalarField,
    g: &ScalarField,
    sigma: &ScalarField,
) -> Result<Configuration> {
    let grid = f.grid;
    grid.require_kind(DomainKind::DiskPatch)?;
    same_grid(&grid, &g.grid)?;
    same_grid(&grid, &sigma.grid)?;
    for s in [f, g] {
        let residual = dbar_sup(s);
        if residual > grid.dx() * (1.0 + s.sup_norm()) {
            return Err(Error::NotHolomorphic { residual });
        }
    }
    let metric = MetricData::new(MetricData::hyperbolic(grid).h, sigma.re())?;
    let rho = metric.rho();
    let a = metric_connection(&metric);
    let psi = SpinorPair {
        psi1: &f.exp() * &rho,
        psi2bar: &g.exp() * &rho,
    };
    let h = HermitianMetric::new(rho.map(|r| C64::new(1.0 / (r.re * r.re), 0.0)))?;
    Configuration::new(a, psi, HiggsField::zeros(grid), metric, h)
}

/// The calibration constant `c* = −ln 2 / 2`.
pub fn calibration_constant() -> f64 {
    -core::f64::consts::LN_2 / 2.0
}

/// The calibrated hyperbolic patch solution at `σ = 0`.
pub fn calibrated_patch_config(grid: GridSpec) -> Result<Configuration> {
    let c = ScalarField::constant(grid, C64::new(calibration_constant(), 0.0));
    hyperbolic_patch_config(&c, &c, &ScalarField::zeros(grid))
}
