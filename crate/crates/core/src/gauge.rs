//! U(1) connections, sections and the gauge group.
//!
//! A connection is either a smooth potential (degree zero, or any patch) or a
//! field of lattice links on the torus, which can carry any degree. Sections
//! are plain node arrays in both cases; the bundle lives in the links.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::constants::CHERN_DEVIATION_LIMIT;
use crate::error::{Error, Result};
use crate::grid::{
    d_one_form, d_scalar, derivative, same_grid, DomainKind, GridSpec, OneForm, Reality, ScalarField,
    TwoForm, Which,
};
use crate::{C64, I};

#[allow(unused_imports)]
use num_traits::Float;

/// Link variables on the directed edges `j → j+x̂` and `j → j+ŷ` of a torus.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkField {
    pub grid: GridSpec,
    pub ux: Vec<C64>,
    pub uy: Vec<C64>,
}

impl LinkField {
    /// Validates unit modulus and integral total flux.
    pub fn new(grid: GridSpec, ux: Vec<C64>, uy: Vec<C64>) -> Result<Self> {
        grid.require_kind(DomainKind::PeriodicTorus)?;
        for v in [&ux, &uy] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    found: v.len(),
                });
            }
            if let Some(i) = v.iter().position(|u| (u.norm() - 1.0).abs() > 1e-12) {
                return Err(Error::NonFinite(i));
            }
        }
        let links = LinkField { grid, ux, uy };
        let (_, deviation) = links.chern();
        if deviation > CHERN_DEVIATION_LIMIT {
            return Err(Error::IllFormedLinks { deviation });
        }
        Ok(links)
    }

    pub fn trivial(grid: GridSpec) -> Result<Self> {
        make_uniform_flux_links(0, grid)
    }

    /// Discretizes a smooth potential with the midpoint rule on each edge.
    pub fn from_potential(a: &OneForm) -> Result<Self> {
        let g = a.grid();
        g.require_kind(DomainKind::PeriodicTorus)?;
        // A(∂ₓ) = a10 + a01 and A(∂ᵧ) = i(a10 − a01).
        let ax: Vec<C64> = (0..g.len()).map(|i| a.p10.values[i] + a.p01.values[i]).collect();
        let ay: Vec<C64> = (0..g.len())
            .map(|i| I * (a.p10.values[i] - a.p01.values[i]))
            .collect();
        let mut ux = Vec::with_capacity(g.len());
        let mut uy = Vec::with_capacity(g.len());
        for j in 0..g.len() {
            let (jx, jy) = (shift_x(&g, j, 1), shift_y(&g, j, 1));
            ux.push(unit(-(0.5 * (ax[j] + ax[jx]) * g.dx()).im));
            uy.push(unit(-(0.5 * (ay[j] + ay[jy]) * g.dy()).im));
        }
        Self::new(g, ux, uy)
    }

    pub fn plaquette_angles(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.len())
            .map(|j| {
                let p = self.ux[j]
                    * self.uy[shift_x(g, j, 1)]
                    * self.ux[shift_y(g, j, 1)].conj()
                    * self.uy[j].conj();
                p.arg()
            })
            .collect()
    }

    /// `(nearest integer to Σθ_p/2π, distance to it)`.
    pub fn chern(&self) -> (i64, f64) {
        let flux: f64 = self.plaquette_angles().iter().sum::<f64>() / (2.0 * PI);
        let d = flux.round();
        (d as i64, (flux - d).abs())
    }

    pub fn degree(&self) -> i64 {
        self.chern().0
    }
}

fn unit(angle: f64) -> C64 {
    C64::new(angle.cos(), angle.sin())
}

pub(crate) fn shift_x(g: &GridSpec, j: usize, s: isize) -> usize {
    let (ix, iy) = g.coords_of(j);
    let nx = g.nx as isize;
    g.index(((ix as isize + s).rem_euclid(nx)) as usize, iy)
}

pub(crate) fn shift_y(g: &GridSpec, j: usize, s: isize) -> usize {
    let (ix, iy) = g.coords_of(j);
    let ny = g.ny as isize;
    g.index(ix, ((iy as isize + s).rem_euclid(ny)) as usize)
}

/// Every plaquette carries angle `2πd/(nx·ny)` (Landau gauge, with the
/// twist on the last column of x-links).
pub fn make_uniform_flux_links(d: i64, grid: GridSpec) -> Result<LinkField> {
    grid.require_kind(DomainKind::PeriodicTorus)?;
    let beta = 2.0 * PI * d as f64 / (grid.nx * grid.ny) as f64;
    let mut ux = alloc::vec![C64::new(1.0, 0.0); grid.len()];
    let mut uy = alloc::vec![C64::new(1.0, 0.0); grid.len()];
    for j in 0..grid.len() {
        let (ix, iy) = grid.coords_of(j);
        uy[j] = unit(beta * ix as f64);
        if ix == grid.nx - 1 {
            ux[j] = unit(-2.0 * PI * d as f64 * iy as f64 / grid.ny as f64);
        }
    }
    LinkField::new(grid, ux, uy)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Connection {
    Smooth(OneForm),
    Lattice(LinkField),
}

impl Connection {
    /// Checks the unitarity relation `conj(A¹⁰) = −A⁰¹`.
    pub fn smooth(potential: OneForm) -> Result<Self> {
        let defect = potential.reality_defect();
        let scale = 1.0 + potential.p10.sup_norm();
        if defect > 1e-12 * scale {
            return Err(Error::InvalidOptions(alloc::format!(
                "potential is not unitary (defect {defect:e})"
            )));
        }
        Ok(Connection::Smooth(OneForm {
            tag: Reality::UnitaryConnection,
            ..potential
        }))
    }

    /// The unitary potential whose `dz̄` coefficient is `a01`.
    pub fn from_a01(a01: ScalarField) -> Self {
        let p10 = -&a01.conj();
        Connection::Smooth(OneForm {
            p10,
            p01: a01,
            tag: Reality::UnitaryConnection,
        })
    }

    pub fn flat(grid: GridSpec) -> Self {
        Self::from_a01(ScalarField::zeros(grid))
    }

    pub fn grid(&self) -> GridSpec {
        match self {
            Connection::Smooth(a) => a.grid(),
            Connection::Lattice(l) => l.grid,
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Connection::Smooth(_) => 0,
            Connection::Lattice(l) => l.degree(),
        }
    }

    pub fn potential(&self) -> Option<&OneForm> {
        match self {
            Connection::Smooth(a) => Some(a),
            Connection::Lattice(_) => None,
        }
    }
}

pub fn curvature(a: &Connection) -> TwoForm {
    match a {
        Connection::Smooth(p) => d_one_form(p),
        Connection::Lattice(l) => {
            let s = 1.0 / (2.0 * l.grid.cell_area());
            let values = l
                .plaquette_angles()
                .into_iter()
                .map(|t| C64::new(t * s, 0.0))
                .collect();
            TwoForm::new(ScalarField { grid: l.grid, values })
        }
    }
}

/// `c₁ = (i/2π)∫F`, rounded, with its distance from the integer.
pub fn chern_number(a: &Connection) -> Result<(i64, f64)> {
    a.grid().require_kind(DomainKind::PeriodicTorus)?;
    let (d, deviation) = match a {
        Connection::Lattice(l) => l.chern(),
        Connection::Smooth(_) => {
            let total = crate::grid::integrate_two_form(&curvature(a));
            let c1 = (I * total / (2.0 * PI)).re;
            let r = c1.round();
            (r as i64, (c1 - r).abs())
        }
    };
    if deviation > CHERN_DEVIATION_LIMIT {
        return Err(Error::IllFormedLinks { deviation });
    }
    Ok((d, deviation))
}

/// Gauge-covariant central differences `(∇ₓs, ∇ᵧs)` for lattice links.
pub fn lattice_covariant_partials(l: &LinkField, s: &ScalarField) -> (Vec<C64>, Vec<C64>) {
    let g = &l.grid;
    let mut dx = Vec::with_capacity(g.len());
    let mut dy = Vec::with_capacity(g.len());
    for j in 0..g.len() {
        let (xp, xm) = (shift_x(g, j, 1), shift_x(g, j, -1));
        let (yp, ym) = (shift_y(g, j, 1), shift_y(g, j, -1));
        dx.push((l.ux[j].conj() * s.values[xp] - l.ux[xm] * s.values[xm]) / (2.0 * g.dx()));
        dy.push((l.uy[j].conj() * s.values[yp] - l.uy[ym] * s.values[ym]) / (2.0 * g.dy()));
    }
    (dx, dy)
}

/// `(∂̄ + A⁰¹)s`.
pub fn covariant_dbar(a: &Connection, s: &ScalarField) -> Result<ScalarField> {
    same_grid(&a.grid(), &s.grid)?;
    Ok(match a {
        Connection::Smooth(p) => &derivative(s, Which::ZBar) + &(&p.p01 * s),
        Connection::Lattice(l) => {
            let (dx, dy) = lattice_covariant_partials(l, s);
            let values = dx.iter().zip(&dy).map(|(x, y)| 0.5 * (x + I * y)).collect();
            ScalarField { grid: s.grid, values }
        }
    })
}

/// As [`covariant_dbar`], rejecting a section declared with another degree.
pub fn covariant_dbar_section(a: &Connection, s: &ScalarField, degree: i64) -> Result<ScalarField> {
    let connection = a.degree();
    if connection != degree {
        return Err(Error::DegreeMismatch {
            section: degree,
            connection,
        });
    }
    covariant_dbar(a, s)
}

/// `Ψ = (ψ₁, ψ̄₂)`, both sections of `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorPair {
    pub psi1: ScalarField,
    pub psi2bar: ScalarField,
}

impl SpinorPair {
    pub fn new(psi1: ScalarField, psi2bar: ScalarField) -> Result<Self> {
        same_grid(&psi1.grid, &psi2bar.grid)?;
        Ok(SpinorPair { psi1, psi2bar })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpinorPair {
            psi1: ScalarField::zeros(grid),
            psi2bar: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.psi1.grid
    }

    pub fn scale(&self, c: C64) -> Self {
        SpinorPair {
            psi1: self.psi1.scale(c),
            psi2bar: self.psi2bar.scale(c),
        }
    }

    pub fn mul_field(&self, f: &ScalarField) -> Self {
        SpinorPair {
            psi1: &self.psi1 * f,
            psi2bar: &self.psi2bar * f,
        }
    }

    pub fn add(&self, other: &SpinorPair) -> Self {
        SpinorPair {
            psi1: &self.psi1 + &other.psi1,
            psi2bar: &self.psi2bar + &other.psi2bar,
        }
    }

    /// `|ψ₁|²_H + |ψ₂|²_H` nodewise.
    pub fn density(&self, h: &HermitianMetric) -> ScalarField {
        let a = inner_h_unchecked(h, &self.psi1, &self.psi1);
        let b = inner_h_unchecked(h, &self.psi2bar, &self.psi2bar);
        &a + &b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMetric {
    pub h: ScalarField,
}

impl HermitianMetric {
    pub fn new(h: ScalarField) -> Result<Self> {
        if let Some(i) = h.values.iter().position(|v| !(v.re > 0.0) || v.im != 0.0) {
            return Err(Error::InvalidOptions(alloc::format!(
                "fiber metric must be real and positive (node {i})"
            )));
        }
        Ok(HermitianMetric { h })
    }

    pub fn unit(grid: GridSpec) -> Self {
        HermitianMetric {
            h: ScalarField::constant(grid, C64::new(1.0, 0.0)),
        }
    }
}

/// `⟨s, t⟩_H = s H t̄` nodewise.
pub fn inner_h(h: &HermitianMetric, s: &ScalarField, t: &ScalarField) -> Result<ScalarField> {
    same_grid(&h.h.grid, &s.grid)?;
    same_grid(&s.grid, &t.grid)?;
    Ok(inner_h_unchecked(h, s, t))
}

pub(crate) fn inner_h_unchecked(h: &HermitianMetric, s: &ScalarField, t: &ScalarField) -> ScalarField {
    let st = s.zip_map(t, |a, b| a * b.conj());
    &st * &h.h
}

/// `Φ = φ dz − φ̄ dz̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiggsField {
    pub phi: ScalarField,
}

impl HiggsField {
    pub fn new(phi: ScalarField) -> Self {
        HiggsField { phi }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        HiggsField {
            phi: ScalarField::zeros(grid),
        }
    }

    pub fn form(&self) -> OneForm {
        OneForm::imaginary(self.phi.clone())
    }

    pub fn phibar(&self) -> ScalarField {
        self.phi.conj()
    }
}

/// `u = e^ζ` with `ζ` purely imaginary.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform {
    pub zeta: ScalarField,
}

impl GaugeTransform {
    pub fn new(zeta: ScalarField) -> Result<Self> {
        if let Some(i) = zeta.values.iter().position(|v| v.re != 0.0) {
            return Err(Error::InvalidOptions(alloc::format!(
                "gauge generator must be purely imaginary (node {i})"
            )));
        }
        Ok(GaugeTransform { zeta })
    }

    pub fn identity(grid: GridSpec) -> Self {
        GaugeTransform {
            zeta: ScalarField::zeros(grid),
        }
    }

    pub fn u(&self) -> ScalarField {
        self.zeta.exp()
    }

    pub fn u_inv(&self) -> ScalarField {
        self.zeta.map(|z| (-z).exp())
    }

    /// Product `u₁u₂`, i.e. acting by `self` then `other`.
    pub fn compose(&self, other: &GaugeTransform) -> GaugeTransform {
        GaugeTransform {
            zeta: &self.zeta + &other.zeta,
        }
    }
}

pub fn gauge_act_connection(g: &GaugeTransform, a: &Connection) -> Result<Connection> {
    same_grid(&g.zeta.grid, &a.grid())?;
    Ok(match a {
        Connection::Smooth(p) => {
            let dz = d_scalar(&g.zeta);
            Connection::Smooth(OneForm {
                p10: &p.p10 + &dz.p10,
                p01: &p.p01 + &dz.p01,
                tag: Reality::UnitaryConnection,
            })
        }
        Connection::Lattice(l) => {
            let u = g.u();
            let grid = &l.grid;
            let ux = (0..grid.len())
                .map(|j| u.values[j] * l.ux[j] * u.values[shift_x(grid, j, 1)].conj())
                .collect();
            let uy = (0..grid.len())
                .map(|j| u.values[j] * l.uy[j] * u.values[shift_y(grid, j, 1)].conj())
                .collect();
            Connection::Lattice(LinkField { grid: *grid, ux, uy })
        }
    })
}

/// `(A, Ψ, Φ) ↦ (A + u⁻¹du, u⁻¹Ψ, Φ)`.
pub fn gauge_act(
    g: &GaugeTransform,
    p: (&Connection, &SpinorPair, &HiggsField),
) -> Result<(Connection, SpinorPair, HiggsField)> {
    let (a, psi, phi) = p;
    same_grid(&g.zeta.grid, &psi.grid())?;
    let a2 = gauge_act_connection(g, a)?;
    let psi2 = psi.mul_field(&g.u_inv());
    Ok((a2, psi2, phi.clone()))
}
