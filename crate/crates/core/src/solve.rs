//! Small one-dimensional solvers shared across modules.

/// Finds `x` in `[lo, hi]` with `f(x) = target` for a nondecreasing `f`,
/// bisecting until the bracket is narrower than `rel_width * (hi - lo)`.
pub fn invert_monotone<F>(f: F, target: f64, mut lo: f64, mut hi: f64, rel_width: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let width = (hi - lo) * rel_width;
    // 200 halvings exhaust the f64 mantissa for any finite bracket
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > x_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if x1 >= x2 {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Outcome of [`safeguarded_newton`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootSearch {
    Root(f64),
    /// `f` has the same sign at both ends of the bracket.
    SameSign {
        f_lo: f64,
        f_hi: f64,
    },
    NoConvergence,
}

/// Newton iterations with a central-difference derivative (step `1e-5` of
/// the initial bracket) that fall back to bisection whenever a step leaves
/// the bracket. Stops once `|f(x)| ≤ f_tol` or the bracket collapses.
pub fn safeguarded_newton<F>(f: F, lo: f64, hi: f64, f_tol: f64, max_iter: usize) -> RootSearch
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return RootSearch::Root(a);
    }
    if fb == 0.0 {
        return RootSearch::Root(b);
    }
    if fa.signum() == fb.signum() {
        return RootSearch::SameSign { f_lo: fa, f_hi: fb };
    }
    let step = 1e-5 * (hi - lo);
    let mut x = 0.5 * (a + b);
    for _ in 0..max_iter {
        let fx = f(x);
        if fx.abs() <= f_tol {
            return RootSearch::Root(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if b - a <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return RootSearch::Root(x);
        }
        let slope = (f(x + step) - f(x - step)) / (2.0 * step);
        let newton = x - fx / slope;
        x = if slope.is_finite() && slope != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    RootSearch::NoConvergence
}
