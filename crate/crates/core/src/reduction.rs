//! Four-dimensional equations on x₃,x₄-independent data and their reduction
//! to the plane.
//!
//! With `∇ⱼ = ∂ⱼ + iAⱼ` and the modified matrices `I, J, K`, the Dirac
//! equation is `∇₁Ψ = I∇₂Ψ + J∇₃Ψ + K∇₄Ψ` and the curvature equations are
//! `F₁₂ + F₃₄ = ½η₁`, `F₁₃ + F₄₂ = ½η₂`, `F₁₄ + F₂₃ = ½η₃`, with
//! `Fⱼₖ = i(∂ₖAⱼ − ∂ⱼAₖ)`.
//!
//! Reduction sets `φ₁ = −iA₃`, `φ₂ = −iA₄`, `φ̄ = φ₁ − iφ₂`. The
//! comparisons made by [`reduction_discrepancy`]:
//!
//! * the Dirac rows equal `2(∂̄ + A⁰¹)` on the diagonal and `±φ̄` off it;
//! * `r2b − i r2c = 2∂φ̄ = −2·(∂Φ⁰¹ coefficient)`, because the printed
//!   right-hand sides satisfy `η₂ − iη₃ ≡ 0`;
//! * `r2a` equals the planar curvature equation `F = −(i/2)|Ψ|² dx₂∧dx₁`,
//!   converted with `dz∧dz̄ = 2i dx₂∧dx₁`.

use alloc::vec::Vec;

use nalgebra::Matrix2;

use crate::error::Result;
use crate::gauge::{covariant_dbar, curvature, Connection, HiggsField, SpinorPair};
use crate::grid::{derivative, partial_x, partial_y, same_grid, GridSpec, ScalarField, Which};
use crate::rng::FieldRng;
use crate::{C64, I};

/// The matrices `I, J, K` of the modified Dirac operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTriple {
    pub i: Matrix2<C64>,
    pub j: Matrix2<C64>,
    pub k: Matrix2<C64>,
}

impl Default for PauliTriple {
    fn default() -> Self {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        PauliTriple {
            i: Matrix2::new(-I, z, z, -I),
            j: Matrix2::new(z, one, -one, z),
            k: Matrix2::new(z, -I, I, z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliReport {
    /// `(name, computed product, expected product, exact match)`.
    pub table: Vec<(&'static str, Matrix2<C64>, Matrix2<C64>, bool)>,
}

impl PauliReport {
    pub fn all_pass(&self) -> bool {
        self.table.iter().all(|r| r.3)
    }
}

/// Multiplication table of the modified triple: `I² = J² = −Id`,
/// `K² = +Id`, `IJ = K`, `JK = −I`.
pub fn pauli_check() -> PauliReport {
    let p = PauliTriple::default();
    let id = Matrix2::<C64>::identity();
    let rows = [
        ("I*I", p.i * p.i, -id),
        ("J*J", p.j * p.j, -id),
        ("K*K", p.k * p.k, id),
        ("I*J", p.i * p.j, p.k),
        ("J*K", p.j * p.k, -p.i),
    ];
    PauliReport {
        table: rows
            .into_iter()
            .map(|(n, got, want)| (n, got, want, got == want))
            .collect(),
    }
}

/// Injected `∂₃` data, for negative controls only.
#[derive(Debug, Clone, PartialEq)]
pub struct X3Derivative {
    pub da: [ScalarField; 4],
    pub dpsi: SpinorPair,
}

/// Real potentials `A₁..A₄` and spinor `Ψ = (ψ₁, ψ̄₂)` on a planar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FourDField {
    pub a: [ScalarField; 4],
    pub psi: SpinorPair,
    /// `None` for genuinely x₃,x₄-independent data.
    pub x3: Option<X3Derivative>,
}

impl FourDField {
    pub fn new(a: [ScalarField; 4], psi: SpinorPair) -> Result<Self> {
        for f in &a {
            same_grid(&f.grid, &psi.grid())?;
        }
        Ok(FourDField {
            a: a.map(|f| f.re()),
            psi,
            x3: None,
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let z = ScalarField::zeros(grid);
        FourDField {
            a: [z.clone(), z.clone(), z.clone(), z],
            psi: SpinorPair::zeros(grid),
            x3: None,
        }
    }

    pub fn random(grid: GridSpec, rng: &mut FieldRng) -> Self {
        let a = [(); 4].map(|_| rng.real_field(grid));
        let psi = SpinorPair {
            psi1: rng.field(grid),
            psi2bar: rng.field(grid),
        };
        FourDField { a, psi, x3: None }
    }

    pub fn grid(&self) -> GridSpec {
        self.psi.grid()
    }

    /// Adds a small x₃-dependence to every field.
    pub fn with_x3_dependence(mut self, rng: &mut FieldRng) -> Self {
        let g = self.grid();
        let da = [(); 4].map(|_| rng.real_field(g));
        let dpsi = SpinorPair {
            psi1: rng.field(g),
            psi2bar: rng.field(g),
        };
        self.x3 = Some(X3Derivative { da, dpsi });
        self
    }

    /// `η₁ = −i(|ψ₁|² + |ψ₂|²)`.
    pub fn eta1(&self) -> ScalarField {
        (&self.psi.psi1.abs2() + &self.psi.psi2bar.abs2()).scale(-I)
    }

    /// `η₂ = −2i Im(ψ₁ψ₂)`, as printed.
    pub fn eta2(&self) -> ScalarField {
        self.im_psi1_psi2().scale(C64::new(0.0, -2.0))
    }

    /// `η₃ = −2 Im(ψ₁ψ₂)`, as printed.
    pub fn eta3(&self) -> ScalarField {
        self.im_psi1_psi2().scale_re(-2.0)
    }

    fn im_psi1_psi2(&self) -> ScalarField {
        self.psi
            .psi1
            .zip_map(&self.psi.psi2bar, |p1, p2b| C64::new((p1 * p2b.conj()).im, 0.0))
    }

    /// `∂ⱼAₖ` for `j, k ∈ 1..=4` (zero-based), honoring injected `∂₃`.
    fn partial_a(&self, j: usize, k: usize) -> ScalarField {
        match j {
            0 => partial_x(&self.a[k]),
            1 => partial_y(&self.a[k]),
            2 => match &self.x3 {
                Some(x3) => x3.da[k].clone(),
                None => ScalarField::zeros(self.grid()),
            },
            _ => ScalarField::zeros(self.grid()),
        }
    }

    /// `Fⱼₖ = i(∂ₖAⱼ − ∂ⱼAₖ)`, zero-based indices.
    pub fn f(&self, j: usize, k: usize) -> ScalarField {
        (&self.partial_a(k, j) - &self.partial_a(j, k)).scale(I)
    }

    /// `∇ⱼΨ`, zero-based index.
    fn nabla(&self, j: usize) -> SpinorPair {
        let g = self.grid();
        let d = |s: &ScalarField, pick: fn(&SpinorPair) -> &ScalarField| -> ScalarField {
            match j {
                0 => partial_x(s),
                1 => partial_y(s),
                2 => match &self.x3 {
                    Some(x3) => pick(&x3.dpsi).clone(),
                    None => ScalarField::zeros(g),
                },
                _ => ScalarField::zeros(g),
            }
        };
        let ia = self.a[j].scale(I);
        SpinorPair {
            psi1: &d(&self.psi.psi1, |p| &p.psi1) + &(&ia * &self.psi.psi1),
            psi2bar: &d(&self.psi.psi2bar, |p| &p.psi2bar) + &(&ia * &self.psi.psi2bar),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residuals4d {
    /// `∇₁Ψ − I∇₂Ψ − J∇₃Ψ − K∇₄Ψ`.
    pub dirac: SpinorPair,
    pub r2a: ScalarField,
    pub r2b: ScalarField,
    pub r2c: ScalarField,
}

fn apply(m: &Matrix2<C64>, s: &SpinorPair) -> SpinorPair {
    SpinorPair {
        psi1: s.psi1.zip_map(&s.psi2bar, |a, b| m[(0, 0)] * a + m[(0, 1)] * b),
        psi2bar: s.psi1.zip_map(&s.psi2bar, |a, b| m[(1, 0)] * a + m[(1, 1)] * b),
    }
}

fn sub(a: &SpinorPair, b: &SpinorPair) -> SpinorPair {
    SpinorPair {
        psi1: &a.psi1 - &b.psi1,
        psi2bar: &a.psi2bar - &b.psi2bar,
    }
}

pub fn sw_residuals_4d(f: &FourDField) -> Residuals4d {
    let p = PauliTriple::default();
    let n = [0, 1, 2, 3].map(|j| f.nabla(j));
    let dirac = sub(
        &sub(&sub(&n[0], &apply(&p.i, &n[1])), &apply(&p.j, &n[2])),
        &apply(&p.k, &n[3]),
    );
    let half = |e: ScalarField| e.scale_re(0.5);
    let r2a = &(&f.f(0, 1) + &f.f(2, 3)) - &half(f.eta1());
    let r2b = &(&f.f(0, 2) + &f.f(3, 1)) - &half(f.eta2());
    let r2c = &(&f.f(0, 3) + &f.f(1, 2)) - &half(f.eta3());
    Residuals4d { dirac, r2a, r2b, r2c }
}

/// Planar fields `(A, Ψ, Φ)` with `A⁰¹ = (i/2)(A₁ + iA₂)` and
/// `φ̄ = −iA₃ − A₄`.
pub fn reduce_fields(f: &FourDField) -> (Connection, SpinorPair, HiggsField) {
    let a01 = f.a[0].zip_map(&f.a[1], |a1, a2| 0.5 * I * (a1 + I * a2));
    let phibar = f.a[2].zip_map(&f.a[3], |a3, a4| -I * a3 - a4);
    (
        Connection::from_a01(a01),
        f.psi.clone(),
        HiggsField::new(phibar.conj()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionDiscrepancy {
    /// Dirac rows against `2(∂̄ + A⁰¹)ψ ± φ̄ψ`.
    pub dirac: f64,
    /// `r2b − i r2c` against `−2·(∂Φ⁰¹ coefficient)`.
    pub higgs: f64,
    /// `r2a` against the planar curvature equation in `dx₂∧dx₁` form.
    pub curvature: f64,
}

impl ReductionDiscrepancy {
    pub fn max(&self) -> f64 {
        self.dirac.max(self.higgs).max(self.curvature)
    }
}

/// Compares the four-dimensional residuals with the planar ones computed
/// from [`reduce_fields`], node by node.
pub fn reduction_discrepancy(f: &FourDField) -> Result<ReductionDiscrepancy> {
    let r4 = sw_residuals_4d(f);
    let (a, psi, phi) = reduce_fields(f);
    let phibar = phi.phibar();

    let d1 = covariant_dbar(&a, &psi.psi1)?;
    let d2 = covariant_dbar(&a, &psi.psi2bar)?;
    let row1 = &d1.scale_re(2.0) + &(&phibar * &psi.psi2bar);
    let row2 = &d2.scale_re(2.0) - &(&phibar * &psi.psi1);
    let dirac = r4
        .dirac
        .psi1
        .max_abs_diff(&row1)
        .max(r4.dirac.psi2bar.max_abs_diff(&row2));

    // ∂Φ⁰¹ = ∂(−φ̄ dz̄) = −∂φ̄ dz∧dz̄.
    let dphi01 = -&derivative(&phibar, Which::Z);
    let combo = &r4.r2b - &r4.r2c.scale(I);
    let higgs = combo.max_abs_diff(&dphi01.scale_re(-2.0));

    // F = c dz∧dz̄ = 2ic dx₂∧dx₁; the planar equation reads
    // F − (−i/2)|Ψ|² dx₂∧dx₁ = 0.
    let fc = curvature(&a).coeff.scale(C64::new(0.0, 2.0));
    let planar = &fc + &(&psi.psi1.abs2() + &psi.psi2bar.abs2()).scale(0.5 * I);
    let curvature = r4.r2a.max_abs_diff(&planar);

    Ok(ReductionDiscrepancy {
        dirac,
        higgs,
        curvature,
    })
}
