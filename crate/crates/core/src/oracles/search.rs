//! One-dimensional search primitives shared by the oracles.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`. Returns the
/// best point seen, including both endpoints.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let fb = f(hi);
    if fb < best.1 {
        best = (hi, fb);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if b - a <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Bisection on a monotone predicate. `good` satisfies `pred`, `bad` does not;
/// returns the last point known to satisfy it.
pub fn bisect<P: FnMut(f64) -> bool>(mut good: f64, mut bad: f64, mut pred: P) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |k| {
        if k + 1 == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_interior_and_boundary_minima() {
        let (x, v) = golden_min(|x| (x - 0.3).powi(2), -1.0, 2.0);
        assert!((x - 0.3).abs() < 1e-7 && v < 1e-14);
        let (x, _) = golden_min(|x| x, 0.5, 2.0);
        assert_eq!(x, 0.5);
    }

    #[test]
    fn bisect_square_root() {
        let r = bisect(1.0, 2.0, |x| x * x <= 2.0);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v: Vec<f64> = linspace(-1.0, 3.0, 5).collect();
        assert_eq!(v, vec![-1.0, 0.0, 1.0, 2.0, 3.0]);
    }
}
