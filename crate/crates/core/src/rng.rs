//! Seeded random fields.
//!
//! Every generator is a ChaCha8 stream keyed by `(seed, stream)`, so suites
//! are reproducible across platforms. Torus fields are band-limited with the
//! strict per-axis cutoff `|k| < n/4`; patch fields are low-order smooth
//! trigonometric sums on the patch square.

use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::fft::{fft2, wavenumber};
use crate::grid::{DomainKind, GridSpec, OneForm, ScalarField};
use crate::C64;

#[allow(unused_imports)]
use num_traits::Float;

pub struct FieldRng {
    inner: ChaCha8Rng,
}

impl FieldRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        FieldRng { inner }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    /// Random smooth complex field of unit-order amplitude.
    pub fn field(&mut self, grid: GridSpec) -> ScalarField {
        match grid.kind {
            DomainKind::PeriodicTorus => self.band_limited(grid),
            DomainKind::DiskPatch => self.patch_smooth(grid),
        }
    }

    pub fn real_field(&mut self, grid: GridSpec) -> ScalarField {
        self.field(grid).re()
    }

    /// Purely imaginary field, e.g. a gauge generator ζ.
    pub fn imaginary_field(&mut self, grid: GridSpec) -> ScalarField {
        self.field(grid).re().scale(crate::I)
    }

    pub fn imaginary_one_form(&mut self, grid: GridSpec) -> OneForm {
        OneForm::imaginary(self.field(grid))
    }

    fn band_limited(&mut self, grid: GridSpec) -> ScalarField {
        let (nx, ny) = (grid.nx, grid.ny);
        let mut hat = alloc::vec![C64::new(0.0, 0.0); grid.len()];
        let mut weight = 0.0;
        for iy in 0..ny {
            let ky = wavenumber(iy, ny);
            if 4 * ky.unsigned_abs() as usize >= ny {
                continue;
            }
            for ix in 0..nx {
                let kx = wavenumber(ix, nx);
                if 4 * kx.unsigned_abs() as usize >= nx {
                    continue;
                }
                let decay = 1.0 / (1.0 + (kx * kx + ky * ky) as f64);
                hat[iy * nx + ix] = self.complex() * decay;
                weight += decay * decay;
            }
        }
        // Inverse transform divides by nx*ny; undo that and normalize to
        // unit RMS amplitude.
        let scale = (nx * ny) as f64 / weight.sqrt();
        let values = fft2(&hat, nx, ny, true).into_iter().map(|v| v * scale).collect();
        ScalarField { grid, values }
    }

    fn patch_smooth(&mut self, grid: GridSpec) -> ScalarField {
        let a = grid.half_side();
        let mut coeffs = [[C64::new(0.0, 0.0); 5]; 5];
        for row in coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = self.complex();
            }
        }
        let k0 = PI / (2.0 * a);
        ScalarField::from_fn(grid, |x, y| {
            let mut s = C64::new(0.0, 0.0);
            for (jy, row) in coeffs.iter().enumerate() {
                for (jx, c) in row.iter().enumerate() {
                    let kx = jx as f64 - 2.0;
                    let ky = jy as f64 - 2.0;
                    let decay = 1.0 / (1.0 + kx * kx + ky * ky);
                    s += c * decay * C64::new(0.0, k0 * (kx * x + ky * y)).exp();
                }
            }
            s * 0.5
        })
    }
}
