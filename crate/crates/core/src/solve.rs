//! Deterministic bisection on a monotone predicate.

/// Shrinks `[lo, hi]` until `hi - lo <= tol`, keeping `pred(lo) == false` and
/// `pred(hi) == true`. The caller guarantees both endpoint values.
pub(crate) fn bisect(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut pred: impl FnMut(f64) -> bool,
) -> (f64, f64) {
    debug_assert!(lo <= hi);
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}
