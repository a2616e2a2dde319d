//! The periodic kernel `1/|ζ - ζ'|² = 1/(4 sin²(x/2))` and its Taylor
//! coefficients, used for far-field expansions.
//!
//! Every derivative is a polynomial in `c = cot(x/2)`: the kernel itself is
//! `(1 + c²)/4` and `dc/dx = -(1 + c²)/2`.

use std::sync::OnceLock;

/// Highest derivative order kept in far-field expansions.
pub const MAX_ORDER: usize = 14;

fn polynomials() -> &'static Vec<Vec<f64>> {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![0.25, 0.0, 0.25]];
        for m in 0..MAX_ORDER {
            let p = &polys[m];
            // derivative with respect to c
            let dp: Vec<f64> = (1..p.len()).map(|k| k as f64 * p[k]).collect();
            // multiply by -(1 + c²)/2
            let mut next = vec![0.0; dp.len() + 2];
            for (k, &a) in dp.iter().enumerate() {
                next[k] -= 0.5 * a;
                next[k + 2] -= 0.5 * a;
            }
            polys.push(next);
        }
        polys
    })
}

/// `1/(4 sin²(x/2))`.
pub fn kernel(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    0.25 / (s * s)
}

/// Taylor coefficients `K^(m)(x)/m!` for `m = 0..=order`.
pub fn taylor_coefficients(x: f64, order: usize, out: &mut [f64]) {
    let polys = polynomials();
    let half = 0.5 * x;
    let c = half.cos() / half.sin();
    let mut factorial = 1.0;
    for m in 0..=order.min(MAX_ORDER) {
        if m > 0 {
            factorial *= m as f64;
        }
        let p = &polys[m];
        let mut acc = 0.0;
        for &coef in p.iter().rev() {
            acc = acc * c + coef;
        }
        out[m] = acc / factorial;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_match_finite_differences() {
        let x = 0.7;
        let mut coefs = [0.0; MAX_ORDER + 1];
        taylor_coefficients(x, MAX_ORDER, &mut coefs);
        assert!((coefs[0] - kernel(x)).abs() < 1e-14);
        let h = 1e-4;
        let d1 = (kernel(x + h) - kernel(x - h)) / (2.0 * h);
        let d2 = (kernel(x + h) - 2.0 * kernel(x) + kernel(x - h)) / (h * h);
        assert!((coefs[1] - d1).abs() < 1e-6 * d1.abs());
        assert!((coefs[2] - d2 / 2.0).abs() < 1e-5 * d2.abs());
    }

    #[test]
    fn series_reproduces_shifted_kernel() {
        let x = 1.3;
        let u: f64 = 0.2;
        let mut coefs = [0.0; MAX_ORDER + 1];
        taylor_coefficients(x, MAX_ORDER, &mut coefs);
        let series: f64 = coefs.iter().enumerate().map(|(m, c)| c * u.powi(m as i32)).sum();
        let exact = kernel(x + u);
        assert!((series - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn odd_symmetry_of_derivatives() {
        let mut a = [0.0; MAX_ORDER + 1];
        let mut b = [0.0; MAX_ORDER + 1];
        taylor_coefficients(0.4, 6, &mut a);
        taylor_coefficients(-0.4, 6, &mut b);
        for m in 0..=6 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a[m] - sign * b[m]).abs() < 1e-9 * a[m].abs().max(1.0));
        }
    }
}
