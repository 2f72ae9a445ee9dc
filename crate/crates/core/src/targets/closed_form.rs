//! Closed forms of the target functions of the two worked examples.
//!
//! Example 1: `m(ν) = ν m† + (1−ν) m♯` on `ν ∈ [0, 1]`, target the negative
//! orthant of `ℝ²` under `ℓ∞`. Example 2: scalar payoffs `m = (v, w) ∈ [−1, 1]²`,
//! target `{0}`.

/// `φ⋆(ν)` of the first example.
pub fn example1_phi_star(nu: f64) -> f64 {
    if nu <= 0.25 {
        4.0 - nu
    } else if nu <= 0.5 {
        5.0 - 5.0 * nu
    } else if nu <= 0.75 {
        5.0 * nu
    } else {
        3.0 + nu
    }
}

/// `cav[φ⋆] ≡ 4` on the segment.
pub fn example1_cav(_nu: f64) -> f64 {
    4.0
}

/// `α_x(ν)`, the `ℓ∞` distance of the constant play `(x, 1−x)` to the orthant.
pub fn example1_alpha(x: f64, nu: f64) -> f64 {
    let first = 5.0 - x - nu * (5.0 - 4.0 * x);
    let second = 3.0 * x + nu * (5.0 - 4.0 * x);
    first.max(second).max(0.0)
}

/// `φ^{x⋆} = α_1 = max{4 − ν, 3 + ν}`.
pub fn example1_phi_xstar(nu: f64) -> f64 {
    example1_alpha(1.0, nu)
}

/// `φ⋆(v, w)` of the second example.
pub fn example2_phi_star(v: f64, w: f64) -> f64 {
    if v * w > 0.0 {
        v.abs().min(w.abs())
    } else {
        0.0
    }
}

/// `cav[φ⋆](v, w) = 1 − |v − w|/2`.
pub fn example2_cav(v: f64, w: f64) -> f64 {
    1.0 - (v - w).abs() / 2.0
}

/// `α_{1/2}(v, w) = |v + w|/2`.
pub fn example2_alpha_half(v: f64, w: f64) -> f64 {
    (v + w).abs() / 2.0
}

/// `φ^{x⋆}(v, w)` of the second example.
///
/// The five regions partition the square once the first condition reads
/// `|2w − v| ≤ 1` and the last one `v + w ≤ 0`; the decomposition oracle
/// agrees with this reading.
pub fn example2_phi_xstar(v: f64, w: f64) -> f64 {
    let s = v + w;
    if (2.0 * w - v).abs() <= 1.0 && (2.0 * v - w).abs() <= 1.0 {
        (1.0 + s.abs()) / 3.0
    } else if 2.0 * w - v >= 1.0 && s >= 0.0 {
        (1.0 + v) / 2.0
    } else if 2.0 * v - w >= 1.0 && s >= 0.0 {
        (1.0 + w) / 2.0
    } else if 2.0 * w - v <= -1.0 && s <= 0.0 {
        (1.0 - v) / 2.0
    } else {
        (1.0 - w) / 2.0
    }
}
