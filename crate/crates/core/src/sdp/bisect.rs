use alloc::vec::Vec;

use crate::{Error, Result};

/// Trace of a bisection run.
#[derive(Clone, Debug, PartialEq)]
pub struct Bisection {
    /// Smallest parameter found feasible (upper end of the final bracket).
    pub value: f64,
    pub iterations: usize,
    /// Bracket width after each iteration.
    pub widths: Vec<f64>,
    /// True when the lower end of the initial bracket was already feasible.
    pub lower_end_feasible: bool,
}

/// Smallest `t` in `[lo, hi]` with `feasible(t)`, for a monotone predicate
/// (infeasible below the threshold, feasible above).
///
/// Stops once the bracket is narrower than `rel_tol * max(1, |hi|)`.
/// `hi` must be feasible; if `lo` is feasible it is returned at once.
pub fn feasibility_bisect<F>(mut feasible: F, lo: f64, hi: f64, rel_tol: f64) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() || !(rel_tol > 0.0) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if feasible(lo)? {
        return Ok(Bisection {
            value: lo,
            iterations: 0,
            widths: Vec::new(),
            lower_end_feasible: true,
        });
    }
    if !feasible(hi)? {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut widths = Vec::new();
    while b - a > rel_tol * b.abs().max(1.0) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if feasible(mid)? {
            b = mid;
        } else {
            a = mid;
        }
        widths.push(b - a);
    }
    Ok(Bisection {
        value: b,
        iterations: widths.len(),
        widths,
        lower_end_feasible: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_threshold_and_halves() {
        let b = feasibility_bisect(|t| Ok(t * t >= 2.0), 1.0, 2.0, 1e-12).unwrap();
        assert!((b.value - libm::sqrt(2.0)).abs() < 1e-11);
        let mut prev = 1.0;
        for w in &b.widths {
            assert!((w - prev / 2.0).abs() <= 1e-15);
            prev = *w;
        }
    }

    #[test]
    fn feasible_lower_end() {
        let b = feasibility_bisect(|_| Ok(true), 1.0, 5.0, 1e-9).unwrap();
        assert_eq!(b.value, 1.0);
        assert!(b.lower_end_feasible);
    }

    #[test]
    fn bad_brackets() {
        assert!(matches!(
            feasibility_bisect(|_| Ok(false), 1.0, 2.0, 1e-9),
            Err(Error::InvalidBracket { .. })
        ));
        assert!(feasibility_bisect(|_| Ok(true), 3.0, 2.0, 1e-9).is_err());
    }
}
