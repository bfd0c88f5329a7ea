//! Bracketing root finders used as independent oracles for the closed
//! forms elsewhere in the crate.

use alloc::vec::Vec;

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign (or one
/// of them be zero). Stops when the bracket cannot shrink any further in
/// floating point or is narrower than `x_tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, x_tol: f64) -> Option<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if (fa < 0.0) == (fb < 0.0) || fa.is_nan() || fb.is_nan() {
        return None;
    }
    for _ in 0..2000 {
        let mid = a + (b - a) / 2.0;
        if mid <= a || mid >= b || b - a <= x_tol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(a + (b - a) / 2.0)
}

/// Scans consecutive grid points for sign changes of `f` and refines each
/// bracket by bisection. Grid points where `f` is exactly zero are reported
/// as roots. The result follows the grid order.
pub fn sign_change_roots<F: Fn(f64) -> f64>(f: F, grid: &[f64], x_tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let fx = f(x);
        if let Some((px, pf)) = prev {
            if fx == 0.0 {
                roots.push(x);
            } else if pf != 0.0 && (pf < 0.0) != (fx < 0.0) {
                if let Some(r) = bisect(&f, px, x, x_tol) {
                    roots.push(r);
                }
            }
        } else if fx == 0.0 {
            roots.push(x);
        }
        prev = Some((x, fx));
    }
    roots
}
