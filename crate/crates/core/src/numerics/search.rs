use crate::scalar::Real;

/// Maximises a unimodal `f` on `[lo, hi]` by golden-section search until the
/// bracket is narrower than `x_tol`. Returns `(argmax, max)`.
pub fn golden_section_max<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, x_tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::half();
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) * T::half();
    let fx = f(x);
    // The midpoint can lose to the best probe on flat plateaus.
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// `n >= 2` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * T::from_usize_lossy(i) })
        .collect()
}
