//! Sign conventions shared by every module.
//!
//! Links are `U = exp(−∫A)` along an edge, for `∇ = d + A`. The plaquette
//! angle is `arg(Uₓ(j) Uᵧ(j+x̂) Ūₓ(j+ŷ) Ūᵧ(j))`, the curvature coefficient of
//! `dz∧dz̄` at a node is `θ_p / (2 dx dy)`, and the first Chern number is
//! `c₁ = (i/2π)∫F = Σθ_p / 2π`.

/// Sign relating the `d` passed to `make_uniform_flux_links` to `c₁`.
pub const CHERN_SIGN: i64 = 1;

/// Chern numbers farther than this from an integer flag an ill-formed link
/// field.
pub const CHERN_DEVIATION_LIMIT: f64 = 0.01;

/// Default relative singular-value threshold for rank decisions.
pub const SVD_THRESHOLD: f64 = 1e-8;

/// Gap ratios below this mark a rank decision as unreliable.
pub const GAP_RATIO_MIN: f64 = 1e3;
