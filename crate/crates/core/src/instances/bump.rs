//! Scalar bump nonlinearity for the chain instances.
//!
//! The bump is defined by the integral `120 * ∫_1^θ t²(t−1)/(1+t²) dt`. It is
//! zero at `θ = 1` (the coordinate value of the chain minimizer), has a flat
//! spot at `θ = 0` (so chains of exact zeros produce exact-zero gradient
//! entries), and rises steeply away from 1, which is what makes progress along
//! the chain expensive for first-order methods.
//!
//! [`upsilon`] evaluates the closed-form antiderivative; [`upsilon_quadrature`]
//! integrates the defining integrand adaptively and exists so that the closed
//! form can be validated against an independent oracle (the verification suite
//! compares them on a dense grid).

/// Integrand of the defining integral: `t²(t−1)/(1+t²)`.
pub fn bump_integrand(t: f64) -> f64 {
    t * t * (t - 1.0) / (1.0 + t * t)
}

/// Antiderivative of [`bump_integrand`]: `F(t) = t²/2 − t + arctan t − ½ ln(1+t²)`.
///
/// Direct differentiation gives `F'(t) = t − 1 + (1−t)/(1+t²) = t²(t−1)/(1+t²)`.
fn antiderivative(t: f64) -> f64 {
    0.5 * t * t - t + t.atan() - 0.5 * (t * t).ln_1p()
}

/// Bump value: `120 (F(θ) − F(1))` via the closed-form antiderivative.
///
/// Exactly zero at `θ = 1`. Validated against [`upsilon_quadrature`] to
/// 1e-9 absolute on a dense grid by the verification suite.
pub fn upsilon(theta: f64) -> f64 {
    120.0 * (antiderivative(theta) - antiderivative(1.0))
}

/// Bump derivative: `120 θ²(θ−1)/(1+θ²)`, exact by the fundamental theorem
/// of calculus applied to the defining integral.
///
/// Exactly zero at `θ = 0` and `θ = 1`, so exact-zero chain coordinates
/// contribute exact-zero gradient entries.
pub fn upsilon_prime(theta: f64) -> f64 {
    120.0 * theta * theta * (theta - 1.0) / (1.0 + theta * theta)
}

/// Bump second derivative: `120 θ(θ³+3θ−2)/(1+θ²)²`.
///
/// Bounded by 180 in absolute value, which is what makes the bump
/// 180-smooth.
pub fn upsilon_second(theta: f64) -> f64 {
    let t2 = theta * theta;
    let denom = (1.0 + t2) * (1.0 + t2);
    120.0 * theta * (theta * t2 + 3.0 * theta - 2.0) / denom
}

/// Largest possible absolute value of [`upsilon_second`]; the bump is
/// `BUMP_SMOOTHNESS`-smooth.
pub const BUMP_SMOOTHNESS: f64 = 180.0;

/// Bump value by adaptive Simpson quadrature of the defining integral,
/// refined until the local error estimate is below `tol`.
///
/// Independent oracle for [`upsilon`]; slower but derived directly from the
/// integral definition rather than the closed-form antiderivative.
pub fn upsilon_quadrature(theta: f64, tol: f64) -> f64 {
    120.0 * adaptive_simpson(bump_integrand, 1.0, theta, tol / 120.0)
}

/// Adaptive Simpson integration of `f` over `[a, b]` (signed: `b < a` gives
/// the negated integral), with classic error control: a panel is accepted
/// when the two-half refinement changes the estimate by less than `15 × tol`.
///
/// The first [`FORCED_SPLIT_LEVELS`] subdivision levels are unconditional.
/// Coarse and refined panels can agree exactly by coincidence (for example
/// when the integrand vanishes at several panel nodes at once), which would
/// otherwise stop refinement with the error estimate at zero while the true
/// error is large; forcing an initial uniform refinement breaks any such
/// alignment before the error test is trusted.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_panel(a, b, fa, fm, fb);
    adaptive_simpson_rec(&f, a, b, fa, fm, fb, whole, tol.abs(), 48, FORCED_SPLIT_LEVELS)
}

/// Number of initial subdivision levels performed before the acceptance test
/// applies; 6 levels means at least 64 panels span the interval.
const FORCED_SPLIT_LEVELS: u32 = 6;

fn simpson_panel(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    forced: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let refined = left + right;
    if depth == 0 || (forced == 0 && (refined - whole).abs() <= 15.0 * tol) {
        // Richardson extrapolation of the two estimates.
        return refined + (refined - whole) / 15.0;
    }
    let next_forced = forced.saturating_sub(1);
    adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, next_forced)
        + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, next_forced)
}
