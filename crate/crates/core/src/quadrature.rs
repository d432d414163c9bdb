//! Adaptive Simpson quadrature.
//!
//! Every integrand in this crate is piecewise smooth with known kinks, so
//! callers split the interval at those points (see [`integrate_pieces`])
//! and a plain adaptive Simpson rule is enough.

/// Absolute tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Maximum recursion depth of the adaptive rule.
pub const MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[a, b]` to an absolute tolerance of `tol`.
///
/// Returns `0` for an empty interval and `-integrate(f, b, a)` for reversed
/// bounds.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    adaptive(&f, a, m, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let both = left + right;
    let delta = both - whole;
    // stop on convergence, exhausted depth, or when the cell can no longer be split
    if depth == 0 || delta.abs() <= 15.0 * tol || lm <= a || rm >= b {
        return both + delta / 15.0;
    }
    adaptive(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[a, b]` after splitting at every breakpoint strictly
/// inside the interval. The tolerance is shared evenly between pieces.
pub fn integrate_pieces<F>(f: F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return 0.0;
    }
    let mut knots: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut edges = Vec::with_capacity(knots.len() + 2);
    edges.push(a);
    edges.extend(knots);
    edges.push(b);
    let share = tol / (edges.len() - 1) as f64;
    edges
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], share))
        .sum()
}
