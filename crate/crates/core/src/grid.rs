//! Discretized domains and the complex-coordinate calculus on them.
//!
//! Two domains are supported. The periodic torus is the square `[0, 2π)²`
//! with spectral derivatives. The disk patch is the square `[-a, a]²` with
//! `a = r₀/√2`, so every node lies in the closed disk `|z| ≤ r₀`; the outer
//! `margin` layers are ghost layers used only by derivative stencils, which
//! are fourth-order centered differences (one-sided on the two outer rings).
//!
//! Forms are stored by their `dz` / `dz̄` coefficients. A [`TwoForm`] stores
//! the coefficient of `dz∧dz̄ = −2i dx∧dy`, so an iℝ-valued 2-form has a real
//! coefficient and a real 2-form (such as the area form) an imaginary one.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::fft::{derivative_wavenumber, fft2};
use crate::{C64, I};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    PeriodicTorus,
    DiskPatch,
}

impl DomainKind {
    pub fn code(self) -> u8 {
        match self {
            DomainKind::PeriodicTorus => 0,
            DomainKind::DiskPatch => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(DomainKind::PeriodicTorus),
            1 => Some(DomainKind::DiskPatch),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub kind: DomainKind,
    pub nx: usize,
    pub ny: usize,
    /// Patch radius `r₀` in the unit-disk coordinate; unused on the torus.
    pub radius: f64,
    /// Ghost layers of the patch; zero on the torus.
    pub margin: usize,
}

impl GridSpec {
    pub fn torus(nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec {
            kind: DomainKind::PeriodicTorus,
            nx,
            ny,
            radius: 0.0,
            margin: 0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn patch(n: usize, radius: f64, margin: usize) -> Result<Self> {
        let g = GridSpec {
            kind: DomainKind::DiskPatch,
            nx: n,
            ny: n,
            radius,
            margin,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 || self.ny < 8 || self.nx % 2 != 0 || self.ny % 2 != 0 {
            return Err(Error::InvalidGrid(alloc::format!(
                "node counts must be even and at least 8, got {}x{}",
                self.nx,
                self.ny
            )));
        }
        if self.kind == DomainKind::DiskPatch {
            if !(self.radius > 0.0 && self.radius < 1.0) {
                return Err(Error::InvalidGrid(alloc::format!(
                    "patch radius must lie in (0, 1), got {}",
                    self.radius
                )));
            }
            if self.nx != self.ny {
                return Err(Error::InvalidGrid("patch grids are square".into()));
            }
            if 2 * self.margin + 3 > self.nx {
                return Err(Error::InvalidGrid(alloc::format!(
                    "margin {} leaves no interior on {} nodes",
                    self.margin,
                    self.nx
                )));
            }
        } else if self.margin != 0 {
            return Err(Error::InvalidGrid("the torus has no margin".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_torus(&self) -> bool {
        self.kind == DomainKind::PeriodicTorus
    }

    /// Half side length of the patch square.
    pub fn half_side(&self) -> f64 {
        self.radius / core::f64::consts::SQRT_2
    }

    pub fn dx(&self) -> f64 {
        match self.kind {
            DomainKind::PeriodicTorus => 2.0 * PI / self.nx as f64,
            DomainKind::DiskPatch => 2.0 * self.half_side() / (self.nx - 1) as f64,
        }
    }

    pub fn dy(&self) -> f64 {
        match self.kind {
            DomainKind::PeriodicTorus => 2.0 * PI / self.ny as f64,
            DomainKind::DiskPatch => 2.0 * self.half_side() / (self.ny - 1) as f64,
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords_of(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (ix, iy) = self.coords_of(idx);
        match self.kind {
            DomainKind::PeriodicTorus => (ix as f64 * self.dx(), iy as f64 * self.dy()),
            DomainKind::DiskPatch => {
                let a = self.half_side();
                (-a + ix as f64 * self.dx(), -a + iy as f64 * self.dy())
            }
        }
    }

    pub fn z(&self, idx: usize) -> C64 {
        let (x, y) = self.position(idx);
        C64::new(x, y)
    }

    /// Whether the node takes part in residual norms and integrals.
    pub fn is_active(&self, idx: usize) -> bool {
        if self.is_torus() {
            return true;
        }
        let (ix, iy) = self.coords_of(idx);
        let m = self.margin;
        ix >= m && iy >= m && ix + m < self.nx && iy + m < self.ny
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_active(i))
    }

    pub fn active_count(&self) -> usize {
        if self.is_torus() {
            self.len()
        } else {
            (self.nx - 2 * self.margin) * (self.ny - 2 * self.margin)
        }
    }

    pub fn require_kind(&self, kind: DomainKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: kind,
                found: self.kind,
            })
        }
    }
}

pub fn same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, C64::new(0.0, 0.0))
    }

    pub fn constant(grid: GridSpec, c: C64) -> Self {
        ScalarField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.position(i);
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise combination; panics if the grids differ.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn re(&self) -> Self {
        self.map(|v| C64::new(v.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|v| C64::new(v.im, 0.0))
    }

    pub fn abs2(&self) -> Self {
        self.map(|v| C64::new(v.norm_sqr(), 0.0))
    }

    pub fn exp(&self) -> Self {
        self.map(|v| v.exp())
    }

    pub fn ln(&self) -> Self {
        self.map(|v| v.ln())
    }

    /// Max modulus over active nodes.
    pub fn sup_norm(&self) -> f64 {
        self.grid
            .active_nodes()
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }

    /// `(∫|f|² dx dy)^{1/2}` over active nodes.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.grid.active_nodes().map(|i| self.values[i].norm_sqr()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    /// `∫ f dx dy` over active nodes.
    pub fn integrate(&self) -> C64 {
        let s: C64 = self.grid.active_nodes().map(|i| self.values[i]).sum();
        s * self.grid.cell_area()
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Z,
    ZBar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

fn spectral(f: &ScalarField, mult: impl Fn(f64, f64) -> C64) -> ScalarField {
    let g = f.grid;
    let mut hat = fft2(&f.values, g.nx, g.ny, false);
    for iy in 0..g.ny {
        let ky = derivative_wavenumber(iy, g.ny);
        for ix in 0..g.nx {
            let kx = derivative_wavenumber(ix, g.nx);
            hat[iy * g.nx + ix] *= mult(kx, ky);
        }
    }
    ScalarField {
        grid: g,
        values: fft2(&hat, g.nx, g.ny, true),
    }
}

/// Fourth-order first-derivative stencil at position `k` of `n` as
/// `(first node, weights)`; divide by `12h`. One-sided on the two outer
/// nodes at each end.
pub(crate) fn first_stencil(k: usize, n: usize) -> (usize, [f64; 5]) {
    const LEFT0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const LEFT1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    const CENTER: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    let flip = |w: [f64; 5]| {
        let mut r = [0.0; 5];
        for (i, v) in w.iter().enumerate() {
            r[4 - i] = -v;
        }
        r
    };
    match k {
        0 => (0, LEFT0),
        1 => (0, LEFT1),
        _ if k == n - 1 => (n - 5, flip(LEFT0)),
        _ if k == n - 2 => (n - 5, flip(LEFT1)),
        _ => (k - 2, CENTER),
    }
}

/// Fourth-order second-derivative stencil as `(first node, weights)`;
/// divide by `12h²`.
pub(crate) fn second_stencil(k: usize, n: usize) -> (usize, [f64; 6]) {
    const LEFT0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    const LEFT1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    const CENTER: [f64; 6] = [-1.0, 16.0, -30.0, 16.0, -1.0, 0.0];
    let flip = |w: [f64; 6]| {
        let mut r = [0.0; 6];
        for (i, v) in w.iter().enumerate() {
            r[5 - i] = *v;
        }
        r
    };
    match k {
        0 => (0, LEFT0),
        1 => (0, LEFT1),
        _ if k == n - 1 => (n - 6, flip(LEFT0)),
        _ if k == n - 2 => (n - 6, flip(LEFT1)),
        _ => (k - 2, CENTER),
    }
}

fn line_apply<const W: usize>(
    f: &ScalarField,
    axis: Axis,
    scale: f64,
    stencil: fn(usize, usize) -> (usize, [f64; W]),
) -> ScalarField {
    let g = f.grid;
    let mut out = vec![C64::new(0.0, 0.0); g.len()];
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let (k, n) = match axis {
                Axis::X => (ix, g.nx),
                Axis::Y => (iy, g.ny),
            };
            let (start, w) = stencil(k, n);
            let mut acc = C64::new(0.0, 0.0);
            for (j, wj) in w.iter().enumerate() {
                if *wj != 0.0 {
                    let idx = match axis {
                        Axis::X => g.index(start + j, iy),
                        Axis::Y => g.index(ix, start + j),
                    };
                    acc += f.values[idx] * *wj;
                }
            }
            out[g.index(ix, iy)] = acc * scale;
        }
    }
    ScalarField { grid: g, values: out }
}

fn fd_partial(f: &ScalarField, axis: Axis) -> ScalarField {
    let h = match axis {
        Axis::X => f.grid.dx(),
        Axis::Y => f.grid.dy(),
    };
    line_apply(f, axis, 1.0 / (12.0 * h), first_stencil)
}

fn fd_second(f: &ScalarField, axis: Axis) -> ScalarField {
    let h = match axis {
        Axis::X => f.grid.dx(),
        Axis::Y => f.grid.dy(),
    };
    line_apply(f, axis, 1.0 / (12.0 * h * h), second_stencil)
}

pub fn partial_x(f: &ScalarField) -> ScalarField {
    match f.grid.kind {
        DomainKind::PeriodicTorus => spectral(f, |kx, _| C64::new(0.0, kx)),
        DomainKind::DiskPatch => fd_partial(f, Axis::X),
    }
}

pub fn partial_y(f: &ScalarField) -> ScalarField {
    match f.grid.kind {
        DomainKind::PeriodicTorus => spectral(f, |_, ky| C64::new(0.0, ky)),
        DomainKind::DiskPatch => fd_partial(f, Axis::Y),
    }
}

/// `∂f/∂z = ½(∂ₓ − i∂ᵧ)f` or `∂f/∂z̄ = ½(∂ₓ + i∂ᵧ)f`.
pub fn derivative(f: &ScalarField, which: Which) -> ScalarField {
    match f.grid.kind {
        DomainKind::PeriodicTorus => match which {
            Which::Z => spectral(f, |kx, ky| C64::new(0.5 * ky, 0.5 * kx)),
            Which::ZBar => spectral(f, |kx, ky| C64::new(-0.5 * ky, 0.5 * kx)),
        },
        DomainKind::DiskPatch => {
            let fx = fd_partial(f, Axis::X);
            let fy = fd_partial(f, Axis::Y);
            let s = match which {
                Which::Z => -I,
                Which::ZBar => I,
            };
            fx.zip_map(&fy, |a, b| 0.5 * (a + s * b))
        }
    }
}

/// Flat Laplacian `∂ₓ² + ∂ᵧ²`.
///
/// On the torus the multiplier uses the same Nyquist-free wavenumbers as the
/// first derivatives, so `Δ = 4∂∂̄` holds exactly. On the patch it is the
/// fourth-order stencil along each axis, one-sided on the outer rings.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    match f.grid.kind {
        DomainKind::PeriodicTorus => spectral(f, |kx, ky| C64::new(-(kx * kx + ky * ky), 0.0)),
        DomainKind::DiskPatch => &fd_second(f, Axis::X) + &fd_second(f, Axis::Y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reality {
    /// `p01 = −conj(p10)`: a form with values in iℝ.
    ImaginaryValued,
    /// Same relation, read as a unitary connection potential.
    UnitaryConnection,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub p10: ScalarField,
    pub p01: ScalarField,
    pub tag: Reality,
}

impl OneForm {
    pub fn new(p10: ScalarField, p01: ScalarField, tag: Reality) -> Result<Self> {
        same_grid(&p10.grid, &p01.grid)?;
        Ok(OneForm { p10, p01, tag })
    }

    pub fn general(p10: ScalarField, p01: ScalarField) -> Result<Self> {
        Self::new(p10, p01, Reality::General)
    }

    /// `a dz − ā dz̄`.
    pub fn imaginary(p10: ScalarField) -> Self {
        let p01 = -&p10.conj();
        OneForm {
            p10,
            p01,
            tag: Reality::ImaginaryValued,
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::imaginary(ScalarField::zeros(grid))
    }

    pub fn grid(&self) -> GridSpec {
        self.p10.grid
    }

    /// Largest nodewise violation of `p01 = −conj(p10)`.
    pub fn reality_defect(&self) -> f64 {
        self.p10
            .values
            .iter()
            .zip(&self.p01.values)
            .map(|(a, b)| (b + a.conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &OneForm) -> Result<OneForm> {
        same_grid(&self.grid(), &other.grid())?;
        let tag = if self.tag == other.tag {
            self.tag
        } else {
            Reality::General
        };
        Ok(OneForm {
            p10: &self.p10 + &other.p10,
            p01: &self.p01 + &other.p01,
            tag,
        })
    }

    pub fn scale_re(&self, c: f64) -> OneForm {
        OneForm {
            p10: self.p10.scale_re(c),
            p01: self.p01.scale_re(c),
            tag: self.tag,
        }
    }

    pub fn neg(&self) -> OneForm {
        self.scale_re(-1.0)
    }

    pub fn part10(&self) -> OneForm {
        OneForm {
            p10: self.p10.clone(),
            p01: ScalarField::zeros(self.grid()),
            tag: Reality::General,
        }
    }

    pub fn part01(&self) -> OneForm {
        OneForm {
            p10: ScalarField::zeros(self.grid()),
            p01: self.p01.clone(),
            tag: Reality::General,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    /// Coefficient of `dz∧dz̄`.
    pub coeff: ScalarField,
}

impl TwoForm {
    pub fn new(coeff: ScalarField) -> Self {
        TwoForm { coeff }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        TwoForm {
            coeff: ScalarField::zeros(grid),
        }
    }

    /// Coefficient of `dx∧dy`.
    pub fn dxdy_coeff(&self) -> ScalarField {
        self.coeff.scale(C64::new(0.0, -2.0))
    }
}

/// `∫ w` with `dz∧dz̄ = −2i dx∧dy` and uniform node weights.
pub fn integrate_two_form(w: &TwoForm) -> C64 {
    C64::new(0.0, -2.0) * w.coeff.integrate()
}

/// `df = ∂f dz + ∂̄f dz̄`. The result is tagged imaginary-valued when `f` is.
pub fn d_scalar(f: &ScalarField) -> OneForm {
    let tag = if f.values.iter().all(|v| v.re == 0.0) {
        Reality::ImaginaryValued
    } else {
        Reality::General
    };
    OneForm {
        p10: derivative(f, Which::Z),
        p01: derivative(f, Which::ZBar),
        tag,
    }
}

/// `d(a dz + b dz̄) = (∂b − ∂̄a) dz∧dz̄`.
pub fn d_one_form(a: &OneForm) -> TwoForm {
    let db = derivative(&a.p01, Which::Z);
    let da = derivative(&a.p10, Which::ZBar);
    TwoForm { coeff: &db - &da }
}

/// The Hodge star on 1-forms: `dz ↦ −i dz`, `dz̄ ↦ +i dz̄`.
pub fn hodge_star_one_form(a: &OneForm) -> OneForm {
    OneForm {
        p10: a.p10.scale(-I),
        p01: a.p01.scale(I),
        tag: a.tag,
    }
}

/// The conjugating star `*₁`: `a dz ↦ −ā dz̄` and `b dz̄ ↦ b̄ dz`.
pub fn star1_one_form(a: &OneForm) -> OneForm {
    OneForm {
        p10: a.p01.conj(),
        p01: -&a.p10.conj(),
        tag: Reality::General,
    }
}

pub fn wedge_one_forms(a: &OneForm, b: &OneForm) -> Result<TwoForm> {
    same_grid(&a.grid(), &b.grid())?;
    let coeff = &(&a.p10 * &b.p01) - &(&a.p01 * &b.p10);
    Ok(TwoForm { coeff })
}

/// Conformal metric `h² e^{2σ} |dz|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricData {
    pub h: ScalarField,
    pub sigma: ScalarField,
}

impl MetricData {
    pub fn new(h: ScalarField, sigma: ScalarField) -> Result<Self> {
        same_grid(&h.grid, &sigma.grid)?;
        if let Some(i) = h.values.iter().position(|v| !(v.re > 0.0) || v.im != 0.0) {
            return Err(Error::InvalidOptions(alloc::format!(
                "metric factor h must be real and positive (node {i})"
            )));
        }
        if let Some(i) = sigma.values.iter().position(|v| v.im != 0.0) {
            return Err(Error::InvalidOptions(alloc::format!(
                "conformal exponent sigma must be real (node {i})"
            )));
        }
        Ok(MetricData { h, sigma })
    }

    pub fn flat(grid: GridSpec) -> Self {
        MetricData {
            h: ScalarField::constant(grid, C64::new(1.0, 0.0)),
            sigma: ScalarField::zeros(grid),
        }
    }

    /// `h = 2/(1 − |z|²)` with `σ = 0`.
    pub fn hyperbolic(grid: GridSpec) -> Self {
        let h = ScalarField::from_fn(grid, |x, y| C64::new(2.0 / (1.0 - x * x - y * y), 0.0));
        MetricData {
            h,
            sigma: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.h.grid
    }

    /// `ρ = e^σ h`.
    pub fn rho(&self) -> ScalarField {
        self.h.zip_map(&self.sigma, |h, s| h * s.re.exp())
    }

    /// `ω = i e^{2σ} h² dz∧dz̄`, i.e. `2ρ² dx∧dy`.
    pub fn omega(&self) -> TwoForm {
        TwoForm {
            coeff: self.rho().map(|r| I * r * r),
        }
    }

    /// `θ = e^σ h dz`.
    pub fn coframe(&self) -> OneForm {
        OneForm {
            p10: self.rho(),
            p01: ScalarField::zeros(self.grid()),
            tag: Reality::General,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn torus(n: usize) -> GridSpec {
        GridSpec::torus(n, n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::torus(6, 8).is_err());
        assert!(GridSpec::torus(9, 8).is_err());
        assert!(GridSpec::patch(16, 1.0, 2).is_err());
        assert!(GridSpec::patch(8, 0.5, 3).is_err());
    }

    #[test]
    fn patch_nodes_lie_in_disk() {
        let g = GridSpec::patch(20, 0.7, 2).unwrap();
        assert!((0..g.len()).all(|i| g.z(i).norm() <= 0.7 + 1e-15));
        assert_eq!(g.active_nodes().count(), g.active_count());
    }

    #[test]
    fn fourier_mode_is_eigenfunction() {
        let g = torus(16);
        let f = ScalarField::from_fn(g, |x, y| C64::new(0.0, x + y).exp());
        let fz = derivative(&f, Which::Z);
        let want = f.scale(C64::new(0.5, 0.5));
        assert!(fz.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn constants_are_annihilated() {
        for g in [torus(8), GridSpec::patch(12, 0.5, 2).unwrap()] {
            let f = ScalarField::constant(g, C64::new(2.0, -1.0));
            assert!(derivative(&f, Which::Z).sup_norm() < 1e-12);
            assert!(derivative(&f, Which::ZBar).sup_norm() < 1e-12);
        }
    }

    #[test]
    fn torus_laplacian_is_four_dz_dzbar() {
        let g = torus(16);
        let f = ScalarField::from_fn(g, |x, y| C64::new((3.0 * x).sin() * y.cos(), (x - 2.0 * y).cos()));
        let lap = laplacian(&f);
        let dd = derivative(&derivative(&f, Which::ZBar), Which::Z).scale_re(4.0);
        assert!(lap.max_abs_diff(&dd) < 1e-11);
    }

    #[test]
    fn area_conversions() {
        let g = torus(8);
        let one = TwoForm::new(ScalarField::constant(g, C64::new(1.0, 0.0)));
        let area = 4.0 * PI * PI;
        assert_abs_diff_eq!(integrate_two_form(&one).im, -2.0 * area, epsilon = 1e-12);
        let omega = MetricData::flat(g).omega();
        let v = integrate_two_form(&omega);
        assert_abs_diff_eq!(v.re, 2.0 * area, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coframe_reproduces_area_form() {
        let g = GridSpec::patch(12, 0.6, 2).unwrap();
        let m = MetricData::new(
            MetricData::hyperbolic(g).h,
            ScalarField::from_fn(g, |x, y| C64::new(0.3 * x - y * y, 0.0)),
        )
        .unwrap();
        let theta = m.coframe();
        let theta_bar = star_conj(&theta);
        let w = wedge_one_forms(&theta, &theta_bar).unwrap();
        let iw = w.coeff.scale(I);
        assert!(iw.max_abs_diff(&m.omega().coeff) < 1e-12);
        assert!(m
            .omega()
            .dxdy_coeff()
            .values
            .iter()
            .all(|v| v.re > 0.0 && v.im.abs() < 1e-12));
    }

    fn star_conj(a: &OneForm) -> OneForm {
        OneForm {
            p10: a.p01.conj(),
            p01: a.p10.conj(),
            tag: Reality::General,
        }
    }

    #[test]
    fn star_rules() {
        let g = torus(8);
        let a = OneForm::imaginary(ScalarField::constant(g, C64::new(1.0, 0.0)));
        let s = hodge_star_one_form(&a);
        assert_eq!(s.p10.values[0], -I);
        assert_eq!(s.p01.values[0], -I);
        assert!(s.reality_defect() < 1e-15);
        let b = OneForm::general(
            ScalarField::constant(g, C64::new(1.5, 0.0)),
            ScalarField::zeros(g),
        )
        .unwrap();
        let t = star1_one_form(&b);
        assert_eq!(t.p10.values[3], C64::new(0.0, 0.0));
        assert_eq!(t.p01.values[3], C64::new(-1.5, 0.0));
    }

    #[test]
    fn wedge_of_basis() {
        let g = torus(8);
        let dz = OneForm::general(
            ScalarField::constant(g, C64::new(1.0, 0.0)),
            ScalarField::zeros(g),
        )
        .unwrap();
        let dzb = OneForm::general(
            ScalarField::zeros(g),
            ScalarField::constant(g, C64::new(1.0, 0.0)),
        )
        .unwrap();
        let w = wedge_one_forms(&dz, &dzb).unwrap();
        assert!(w.coeff.values.iter().all(|&v| v == C64::new(1.0, 0.0)));
    }

    #[test]
    fn patch_derivative_of_z_zbar() {
        let g = GridSpec::patch(24, 0.5, 2).unwrap();
        let f = ScalarField::from_fn(g, |x, y| C64::new(x * x + y * y, 0.0));
        let fz = derivative(&f, Which::Z);
        let want = ScalarField::from_fn(g, |x, y| C64::new(x, -y));
        assert!(fz.max_abs_diff(&want) < 1e-12);
    }
}
