//! Real roots of depressed cubics `x^3 + p x + q = 0`.

use std::f64::consts::TAU;

fn eval(p: f64, q: f64, x: f64) -> f64 {
    (x * x + p) * x + q
}

fn newton_polish(p: f64, q: f64, mut x: f64) -> f64 {
    for _ in 0..3 {
        let d = 3.0 * x * x + p;
        if d == 0.0 {
            break;
        }
        let step = eval(p, q, x) / d;
        let next = x - step;
        if !next.is_finite() || eval(p, q, next).abs() > eval(p, q, x).abs() {
            break;
        }
        x = next;
    }
    x
}

/// Real roots in descending order: the trigonometric method when all three
/// are real, Cardano otherwise; each root is refined by Newton steps.
pub fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let disc = 4.0 * p * p * p + 27.0 * q * q;
    let mut roots = if p < 0.0 && disc <= 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - TAU * f64::from(k) / 3.0).cos())
            .collect::<Vec<_>>()
    } else if p == 0.0 {
        vec![(-q).cbrt()]
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    };
    for r in roots.iter_mut() {
        *r = newton_polish(p, q, *r);
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// Largest root of a continuous function in `[lo, hi]` given `f(hi) > 0`:
/// scan down from `hi` in `steps` cells for the first `f <= 0`, then bisect.
pub fn largest_root_by_scan<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize, tol: f64) -> Option<f64> {
    if !(hi > lo) || f(hi) <= 0.0 {
        return None;
    }
    let h = (hi - lo) / steps as f64;
    let mut upper = hi;
    for i in (0..steps).rev() {
        let x = if i == 0 { lo } else { lo + h * i as f64 };
        if f(x) <= 0.0 {
            return Some(bisect(&f, x, upper, tol));
        }
        upper = x;
    }
    None
}

/// Bisection on `[a, b]` with `f(a) <= 0 < f(b)`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            break;
        }
        if f(m) <= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn three_real_roots() {
        // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
        let r = depressed_cubic_roots(-7.0, 6.0);
        assert_eq!(r.len(), 3);
        for (x, y) in r.iter().zip([2.0, 1.0, -3.0]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn support_cubic_roots() {
        // x^3 - L x - 1/4 at L = 1 and at the |a| = 0.5 constant.
        let r = depressed_cubic_roots(-1.0, -0.25);
        for (x, y) in r.iter().zip([1.10715987, -0.26959444, -0.83756544]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-8);
        }
        let l = 2.06347644020277916010;
        let r = depressed_cubic_roots(-l, -0.25);
        for (x, y) in r.iter().zip([1.49360526, -0.12203553, -1.37156973]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-8);
        }
    }

    #[test]
    fn one_real_root() {
        // x^3 + x - 2 = (x - 1)(x^2 + x + 2)
        let r = depressed_cubic_roots(1.0, -2.0);
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(depressed_cubic_roots(0.0, -8.0)[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn scan_finds_largest_root() {
        let f = |x: f64| (x - 0.2) * (x - 0.5) * (x - 0.9);
        let r = largest_root_by_scan(f, 0.0, 2.0, 400, 1e-13).unwrap();
        assert_abs_diff_eq!(r, 0.9, epsilon = 1e-12);
        assert!(largest_root_by_scan(|x: f64| x + 10.0, 0.0, 1.0, 10, 1e-12).is_none());
        assert!(largest_root_by_scan(|x: f64| x - 10.0, 0.0, 1.0, 10, 1e-12).is_none());
    }

    proptest! {
        #[test]
        fn roots_satisfy_cubic(p in -5.0f64..5.0, q in -5.0f64..5.0) {
            let roots = depressed_cubic_roots(p, q);
            prop_assert!(!roots.is_empty());
            let scale = 1.0 + p.abs() + q.abs();
            for x in roots {
                prop_assert!(eval(p, q, x).abs() <= 1e-12 * scale * (1.0 + x.abs().powi(3)));
            }
        }
    }
}
