//! Small scalar numerics shared across the crate: Gauss-Legendre rules and
//! one-dimensional golden-section refinement.

use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed with Newton iteration on the three-term recurrence; accurate to
/// machine precision for the small n used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        // Chebyshev-like initial guess for the k-th positive root.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let d = n as f64 * (p0 - x * p1) / (1.0 - x * x);
    (p1, d)
}

/// The 16-point rule used for panel quadrature, cached process-wide.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Golden-section minimization of `f` on [a, b].
///
/// Assumes a single interior minimum in the bracket; returns (argmin, min).
pub fn golden_min(mut a: f64, mut b: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
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
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Golden-section maximization; returns (argmax, max).
pub fn golden_max(a: f64, b: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (t, v) = golden_min(a, b, rel_tol, |x| -f(x));
    (t, -v)
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        // n-point Gauss rule is exact through degree 2n-1.
        let (x, w) = gauss_legendre(16);
        assert_eq!(x.len(), 16);
        let integral: f64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| wi * xi.powi(30))
            .sum();
        assert_relative_eq!(integral, 2.0 / 31.0, max_relative = 1e-14);
        let weight_sum: f64 = w.iter().sum();
        assert_relative_eq!(weight_sum, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn gl_rule_handles_odd_order() {
        let (x, w) = gauss_legendre(5);
        assert_relative_eq!(x[2], 0.0, epsilon = 1e-15);
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi * xi).sum();
        assert_relative_eq!(integral, 2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        // The argmin of a smooth minimum is resolvable only to ~sqrt(eps);
        // the value itself is accurate to eps.
        let (t, v) = golden_min(-1.0, 5.0, 1e-12, |x| (x - 2.0) * (x - 2.0) + 3.0);
        assert_relative_eq!(t, 2.0, epsilon = 1e-7);
        assert_relative_eq!(v, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.5, 4.5, 6.5, 8.5];
        assert_relative_eq!(ls_slope(&x, &y), 2.0, epsilon = 1e-12);
    }
}
