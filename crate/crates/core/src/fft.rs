//! Small complex FFT used by the spectral torus calculus.
//!
//! Power-of-two lengths use an iterative radix-2 transform; any other length
//! falls back to a direct DFT, which is fine at the grid sizes used here.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::C64;

#[allow(unused_imports)]
use num_traits::Float;

/// In-place forward (`inverse == false`) or unnormalized inverse transform.
pub fn fft_in_place(data: &mut [C64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, inverse);
    } else {
        let out = dft(data, inverse);
        data.copy_from_slice(&out);
    }
}

fn radix2(data: &mut [C64], inverse: bool) {
    let n = data.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        let twiddles: Vec<C64> = (0..half)
            .map(|k| C64::new((ang * k as f64).cos(), (ang * k as f64).sin()))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half] * twiddles[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

fn dft(data: &[C64], inverse: bool) -> Vec<C64> {
    let n = data.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            data.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (j, &x)| {
                let ang = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                acc + x * C64::new(ang.cos(), ang.sin())
            })
        })
        .collect()
}

/// 2-D transform of a row-major `ny × nx` array (x fastest).
/// The inverse includes the `1/(nx·ny)` normalization.
pub fn fft2(values: &[C64], nx: usize, ny: usize, inverse: bool) -> Vec<C64> {
    assert_eq!(values.len(), nx * ny);
    let mut out = values.to_vec();
    for row in out.chunks_mut(nx) {
        fft_in_place(row, inverse);
    }
    let mut column = vec![C64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            column[iy] = out[iy * nx + ix];
        }
        fft_in_place(&mut column, inverse);
        for iy in 0..ny {
            out[iy * nx + ix] = column[iy];
        }
    }
    if inverse {
        let scale = 1.0 / (nx * ny) as f64;
        for v in &mut out {
            *v *= scale;
        }
    }
    out
}

/// Signed integer wavenumber of FFT bin `k` out of `n`.
pub fn wavenumber(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Wavenumber used for odd-order derivatives: the Nyquist bin is dropped so
/// that real fields stay real.
pub fn derivative_wavenumber(k: usize, n: usize) -> f64 {
    if n % 2 == 0 && k == n / 2 {
        0.0
    } else {
        wavenumber(k, n) as f64
    }
}
