//! Rank decisions and null spaces from singular values.

use alloc::vec::Vec;
use nalgebra::{ComplexField, DMatrix};

use crate::constants::GAP_RATIO_MIN;

/// Outcome of a thresholded rank decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// Smallest kept singular value over the largest dropped one. When
    /// nothing is dropped the denominator is the roundoff scale
    /// `ε·σ_max·dim`; when nothing is kept the ratio is `+∞`.
    pub gap_ratio: f64,
    pub sigma_max: f64,
}

impl RankInfo {
    pub fn reliable(&self) -> bool {
        self.gap_ratio >= GAP_RATIO_MIN
    }
}

/// Decides the rank from singular values (any order) with the relative
/// threshold `σ > threshold·σ_max`.
pub fn rank_from_singular_values(sv: &[f64], threshold: f64) -> RankInfo {
    let mut s: Vec<f64> = sv.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let sigma_max = s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return RankInfo {
            rank: 0,
            gap_ratio: f64::INFINITY,
            sigma_max,
        };
    }
    let rank = s.iter().take_while(|v| **v > threshold * sigma_max).count();
    let floor = f64::EPSILON * sigma_max * s.len() as f64;
    let gap_ratio = if rank == 0 {
        f64::INFINITY
    } else {
        let dropped = s.get(rank).copied().unwrap_or(0.0).max(floor);
        s[rank - 1] / dropped
    };
    RankInfo {
        rank,
        gap_ratio,
        sigma_max,
    }
}

pub fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

pub fn rank<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, threshold: f64) -> RankInfo {
    rank_from_singular_values(&singular_values(m), threshold)
}

/// Orthonormal basis (as columns) of the numerical null space of `m`, plus
/// the rank decision behind it.
pub fn null_space(m: &DMatrix<f64>, threshold: f64) -> (DMatrix<f64>, RankInfo) {
    let n = m.ncols();
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let info = rank_from_singular_values(&sv, threshold);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|a, b| sv[*b].total_cmp(&sv[*a]));
    let kernel: Vec<usize> = order[info.rank..].to_vec();
    let mut basis = DMatrix::zeros(n, kernel.len());
    for (c, &k) in kernel.iter().enumerate() {
        for r in 0..n {
            basis[(r, c)] = vt[(k, r)];
        }
    }
    (basis, info)
}

pub fn frobenius<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    ComplexField::sqrt(m.iter().map(|v| v.clone().modulus_squared()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_gap() {
        let info = rank_from_singular_values(&[1e-14, 3.0, 1.0], 1e-8);
        assert_eq!(info.rank, 2);
        assert!((info.gap_ratio - 1e14).abs() < 1.0);
        assert!(info.reliable());
        let fuzzy = rank_from_singular_values(&[1.0, 1e-7, 1e-9], 1e-8);
        assert_eq!(fuzzy.rank, 2);
        assert!(!fuzzy.reliable());
        assert_eq!(rank_from_singular_values(&[0.0, 0.0], 1e-8).rank, 0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0]);
        let (k, info) = null_space(&m, 1e-8);
        assert_eq!(info.rank, 2);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
