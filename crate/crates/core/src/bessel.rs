//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Values come from Miller's backward recurrence normalised with
//! `J0 + 2 * sum(J_2k) = 1`. Absolute error is below 1e-13 for |x| <= 100,
//! which covers every argument produced by the motif routines.

const RESCALE_ABOVE: f64 = 1e200;

/// Returns `(J0(x), J1(x))`.
pub fn j0_j1(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax < 1e-8 {
        return (1.0 - 0.25 * x * x, 0.5 * x);
    }

    // Start order: even, comfortably past the turning point at k ~ x.
    let start = {
        let n = (ax + 30.0 + 8.0 * ax.cbrt()) as usize;
        n + n % 2
    };

    let mut next = 0.0_f64; // J_{k+1}
    let mut cur = 1e-30_f64; // J_k
    let mut even_sum = 0.0_f64;
    let mut j1 = 0.0_f64;

    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / ax * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        let order = k - 1;
        if order == 1 {
            j1 = cur;
        }
        if order > 0 && order % 2 == 0 {
            even_sum += cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            next /= RESCALE_ABOVE;
            even_sum /= RESCALE_ABOVE;
            j1 /= RESCALE_ABOVE;
        }
    }

    let norm = cur + 2.0 * even_sum;
    let j0 = cur / norm;
    let j1 = j1 / norm;
    (j0, if x < 0.0 { -j1 } else { j1 })
}

pub fn j0(x: f64) -> f64 {
    j0_j1(x).0
}

pub fn j1(x: f64) -> f64 {
    j0_j1(x).1
}

/// Positive zeros of `J0` in increasing order, up to and including `x_max`.
///
/// Sign changes are bracketed on a 0.25 grid (zeros are ~pi apart) and
/// refined by bisection to 1e-14 relative.
pub fn j0_zeros_below(x_max: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    if x_max <= 0.0 {
        return zeros;
    }
    let step = 0.25;
    let mut lo = 0.0;
    let mut f_lo = j0(lo);
    while lo < x_max {
        let hi = (lo + step).min(x_max);
        let f_hi = j0(hi);
        if f_hi == 0.0 {
            zeros.push(hi);
        } else if f_lo.signum() != f_hi.signum() && f_lo != 0.0 {
            zeros.push(bisect(j0, lo, hi, 1e-14));
        }
        lo = hi;
        f_lo = f_hi;
    }
    zeros
}

/// Bisection on a bracketing interval; stops at `rel_tol` relative width.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
