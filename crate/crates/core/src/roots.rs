//! Bracketed scalar root finding: bisection to a near-machine interval,
//! optionally polished by Newton steps that are rejected unless they stay
//! inside the bracket and reduce the residual.

use crate::{Error, Result};

/// Bisection on [lo, hi]; requires f(lo) and f(hi) of opposite sign (either
/// may be zero). Returns a point with interval width at machine resolution.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, what: &'static str) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { what, lo, hi });
    }
    // 80 halvings take any bracket in [-1, 2] below 1 ulp.
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// A few Newton iterations starting from `x0`, constrained to [lo, hi];
/// keeps the best residual seen. Safe to call with an already-converged
/// bisection output.
pub fn newton_polish<F, D>(f: &F, df: &D, x0: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut best = x0;
    let mut best_res = f(x0).abs();
    for _ in 0..4 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = f(x) / d;
        let next = (x - step).clamp(lo, hi);
        if next == x {
            break;
        }
        x = next;
        let res = f(x).abs();
        if res < best_res {
            best = x;
            best_res = res;
        }
    }
    best
}

/// Bisection followed by Newton polish.
pub fn bisect_newton<F, D>(
    f: &F,
    df: &D,
    lo: f64,
    hi: f64,
    what: &'static str,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let x = bisect(f, lo, hi, what)?;
    Ok(newton_polish(f, df, x, lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let df = |x: f64| 2.0 * x;
        let r = bisect_newton(&f, &df, 0.0, 2.0, "sqrt2").unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn rejects_no_bracket() {
        let f = |x: f64| x * x + 1.0;
        assert!(bisect(&f, -1.0, 1.0, "none").is_err());
    }

    #[test]
    fn endpoint_roots() {
        let f = |x: f64| x;
        assert_eq!(bisect(&f, 0.0, 1.0, "zero").unwrap(), 0.0);
        assert_eq!(bisect(&f, -1.0, 0.0, "zero").unwrap(), 0.0);
    }
}
