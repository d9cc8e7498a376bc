//! Safeguarded Newton iteration for scalar equations with a sign change.
//!
//! The solver keeps a bracket `[lo, hi]` with `f(lo) <= 0 <= f(hi)` and takes a
//! Newton step whenever it lands strictly inside the bracket, falling back to
//! bisection otherwise. Every iterate shrinks the bracket, so convergence is
//! guaranteed for continuous `f`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Finds a root of an increasing function on `[lo, hi]`.
///
/// `f` returns the pair `(value, derivative)`. The bracket must satisfy
/// `f(lo) <= 0 <= f(hi)`.
pub fn newton_bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::RootFinding(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::RootFinding(format!(
            "bracket does not straddle a root: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    if flo == 0.0 {
        return Ok(Root { x: lo, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, iterations: 0 });
    }

    let mut x = 0.5 * (lo + hi);
    let mut width = hi - lo;
    for it in 1..=max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(Root { x, iterations: it });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= xtol * (1.0 + x.abs()) {
            return Ok(Root { x: 0.5 * (lo + hi), iterations: it });
        }
        let newton = x - fx / dfx;
        if dfx > 0.0 && (newton - x).abs() <= 0.25 * xtol * (1.0 + x.abs()) && newton > lo && newton < hi {
            return Ok(Root { x: newton, iterations: it });
        }
        // Force a bisection every other step unless Newton halved the bracket.
        let stalled = it % 2 == 0 && hi - lo > 0.5 * width;
        if it % 2 == 0 {
            width = hi - lo;
        }
        let next = if !stalled && dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        // A Newton step that no longer moves the iterate means we are at the
        // resolution limit of f64.
        if next == x {
            return Ok(Root { x, iterations: it });
        }
        x = next;
    }
    Err(Error::RootFinding(format!(
        "no convergence within {max_iter} iterations (bracket [{lo}, {hi}])"
    )))
}

/// Grows `hi` geometrically from `start` until `f(hi) >= 0`.
pub fn expand_upper<F>(mut f: F, start: f64, max_doublings: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut hi = start.max(f64::MIN_POSITIVE);
    for _ in 0..max_doublings {
        if f(hi) >= 0.0 {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::RootFinding(format!("could not bracket a root above {start}")))
}

/// Bisection on a nonincreasing function `g` over `[lo, hi]` with `g(lo) > 0 > g(hi)`.
///
/// Runs until the bracket cannot be split any further in f64 arithmetic.
pub fn bisect_decreasing<G>(mut g: G, mut lo: f64, mut hi: f64, max_iter: usize) -> Root
where
    G: FnMut(f64) -> f64,
{
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let v = g(mid);
        if v == 0.0 {
            return Root { x: mid, iterations };
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Root { x: 0.5 * (lo + hi), iterations }
}
