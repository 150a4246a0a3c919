//! The double-layer kernel, its operator version, and the boundary transforms
//! built on them: the Cauchy realization of `f(A)`, the conjugate-Cauchy
//! transform `g`, and the `S` transforms of scalar and matrix arguments.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::domain::BoundaryPoint;
use crate::error::{Error, Result};
use crate::numrange::MatrixOperator;
use crate::quadrature::{mu_value, BoundaryQuadrature};
use crate::rational::RationalFunction;

/// A transform value with the quadrature error probe: the difference against
/// the rule with halved truncation and doubled panel density.
#[derive(Debug, Clone)]
pub struct TransformResult<T> {
    pub value: T,
    pub quad_error_estimate: f64,
}

/// Double-layer kernel `mu(sigma, z) = (1/pi) d arg(sigma(s) - z) / ds`,
/// strictly positive for `z` in the open domain.
pub fn mu_kernel(bp: &BoundaryPoint, z: Complex64) -> Result<f64> {
    if (bp.sigma - z).norm() < 1e-13 * (1.0 + z.norm() + bp.sigma.norm()) {
        return Err(Error::Singularity(format!(
            "mu kernel evaluated at its singularity sigma = z = {z}"
        )));
    }
    Ok(mu_value(bp, z))
}

/// Operator version of the kernel,
/// `(tau (sigma I - A)^{-1} - conj(tau) (conj(sigma) I - A^*)^{-1}) / (2 pi i)`
/// with `tau` the unit tangent. Hermitian by construction and positive
/// definite whenever the closure of `W(A)` lies in the domain.
pub fn mu_operator(bp: &BoundaryPoint, a: &MatrixOperator) -> Result<DMatrix<Complex64>> {
    let r = resolvent(a, bp.sigma)?;
    Ok(mu_operator_from_resolvent(bp, &r))
}

fn mu_operator_from_resolvent(bp: &BoundaryPoint, r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let c = r * bp.unit_tangent();
    let anti = &c - c.adjoint();
    anti * Complex64::new(0.0, -1.0 / (2.0 * PI))
}

fn resolvent(a: &MatrixOperator, sigma: Complex64) -> Result<DMatrix<Complex64>> {
    let n = a.dim();
    let shifted = DMatrix::from_diagonal_element(n, n, sigma) - a.entries();
    shifted
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical(format!("singular resolvent at sigma = {sigma}")))
}

fn require_vanishing(f: &RationalFunction) -> Result<()> {
    if !f.vanishes_at_infinity() {
        return Err(Error::InvalidInput(
            "Cauchy-type transforms need f(infinity) = 0".into(),
        ));
    }
    Ok(())
}

fn require_valid(f: &RationalFunction, quad: &BoundaryQuadrature) -> Result<()> {
    if !f.valid_for(quad.domain()) {
        return Err(Error::Validity(
            "rational function has a pole in or too close to the closed domain".into(),
        ));
    }
    Ok(())
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Which matrix accumulators a boundary sweep fills.
struct SweepRequest {
    cauchy: bool,
    g: bool,
    s: bool,
}

struct SweepOutput {
    cauchy: Option<DMatrix<Complex64>>,
    g: Option<DMatrix<Complex64>>,
    s: Option<DMatrix<Complex64>>,
}

/// One pass over the rule: a single resolvent solve per node feeds all
/// requested transforms. Summation order is fixed by node index.
fn matrix_sweep(
    f: &RationalFunction,
    rule: &BoundaryQuadrature,
    a: &MatrixOperator,
    req: &SweepRequest,
) -> Result<SweepOutput> {
    let n = a.dim();
    let zero = || DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut cauchy = req.cauchy.then(zero);
    let mut g = req.g.then(zero);
    let mut s = req.s.then(zero);
    let half_i_pi = Complex64::new(0.0, -1.0 / (2.0 * PI)); // 1/(2 pi i)
    for (bp, &w) in rule.nodes().iter().zip(rule.weights()) {
        let r = resolvent(a, bp.sigma)?;
        let tau = bp.unit_tangent();
        let fv = f.eval_raw(bp.sigma);
        if let Some(acc) = cauchy.as_mut() {
            *acc += &r * (half_i_pi * tau * fv * w);
        }
        if let Some(acc) = g.as_mut() {
            *acc += &r * (half_i_pi * tau * fv.conj() * w);
        }
        if let Some(acc) = s.as_mut() {
            let mu = mu_operator_from_resolvent(bp, &r);
            *acc += mu * (fv * w);
        }
    }
    Ok(SweepOutput { cauchy, g, s })
}

/// All three matrix transforms of `f` against `A` in one sweep, with the
/// error probe evaluated on the check rule.
pub struct MatrixTransforms {
    pub cauchy: TransformResult<DMatrix<Complex64>>,
    pub g: TransformResult<DMatrix<Complex64>>,
    pub s: TransformResult<DMatrix<Complex64>>,
}

pub fn matrix_transforms(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
) -> Result<MatrixTransforms> {
    require_vanishing(f)?;
    require_valid(f, quad)?;
    let req = SweepRequest { cauchy: true, g: true, s: true };
    let full = matrix_sweep(f, quad, a, &req)?;
    let probe = match quad.check_rule() {
        Some(rule) => Some(matrix_sweep(f, rule, a, &req)?),
        None => None,
    };
    let wrap = |value: DMatrix<Complex64>, other: Option<&DMatrix<Complex64>>| {
        let est = other.map(|o| frobenius(&(&value - o))).unwrap_or(0.0);
        TransformResult { value, quad_error_estimate: est }
    };
    Ok(MatrixTransforms {
        cauchy: wrap(full.cauchy.unwrap(), probe.as_ref().and_then(|p| p.cauchy.as_ref())),
        g: wrap(full.g.unwrap(), probe.as_ref().and_then(|p| p.g.as_ref())),
        s: wrap(full.s.unwrap(), probe.as_ref().and_then(|p| p.s.as_ref())),
    })
}

/// Quadrature realization of the Cauchy integral
/// `f(A) = (1/2 pi i) integral f(sigma) (sigma I - A)^{-1} d sigma`.
pub fn cauchy_f_matrix(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
) -> Result<TransformResult<DMatrix<Complex64>>> {
    require_vanishing(f)?;
    require_valid(f, quad)?;
    single_matrix_transform(f, quad, a, SweepRequest { cauchy: true, g: false, s: false })
        .map(|(value, est)| TransformResult { value, quad_error_estimate: est })
}

/// `g(A) = (1/2 pi i) integral conj(f(sigma)) (sigma I - A)^{-1} d sigma`.
pub fn g_matrix(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
) -> Result<TransformResult<DMatrix<Complex64>>> {
    require_vanishing(f)?;
    require_valid(f, quad)?;
    single_matrix_transform(f, quad, a, SweepRequest { cauchy: false, g: true, s: false })
        .map(|(value, est)| TransformResult { value, quad_error_estimate: est })
}

/// `S(f, A) = integral f(sigma) mu(sigma, A) ds`; defined for any rational `f`
/// bounded on the domain (no decay needed at infinity).
pub fn s_matrix(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
) -> Result<TransformResult<DMatrix<Complex64>>> {
    require_valid(f, quad)?;
    single_matrix_transform(f, quad, a, SweepRequest { cauchy: false, g: false, s: true })
        .map(|(value, est)| TransformResult { value, quad_error_estimate: est })
}

fn single_matrix_transform(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
    req: SweepRequest,
) -> Result<(DMatrix<Complex64>, f64)> {
    let pick = |out: SweepOutput| {
        out.cauchy.or(out.g).or(out.s).expect("requested accumulator")
    };
    let value = pick(matrix_sweep(f, quad, a, &req)?);
    let est = match quad.check_rule() {
        Some(rule) => {
            let probe = pick(matrix_sweep(f, rule, a, &req)?);
            frobenius(&(&value - &probe))
        }
        None => 0.0,
    };
    Ok((value, est))
}

/// Scalar conjugate-Cauchy transform `g(z) = C(conj f, z)`.
///
/// Interior points evaluate both the Cauchy integral and the identity route
/// `integral conj(f) mu ds - conj(f(z))` and cross-check them; boundary points
/// use the kernel form `integral conj(f(sigma)) mu(sigma, sigma_0) ds`.
pub fn conj_cauchy_g(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    z: Complex64,
    on_boundary: bool,
) -> Result<TransformResult<Complex64>> {
    require_vanishing(f)?;
    require_valid(f, quad)?;
    let domain = quad.domain();
    if !domain.contains_closed(z) {
        return Err(Error::Domain(format!("g evaluation point {z} outside the closed domain")));
    }
    if on_boundary {
        let value = g_boundary_sum(f, quad, z)?;
        let est = match quad.check_rule() {
            Some(rule) => (value - g_boundary_sum(f, rule, z)?).norm(),
            None => 0.0,
        };
        return Ok(TransformResult { value, quad_error_estimate: est });
    }
    if !domain.contains_open(z) {
        return Err(Error::Domain(format!(
            "interior g evaluation requested on the boundary point {z}; pass on_boundary = true"
        )));
    }
    let cauchy = g_interior_cauchy(f, quad, z);
    let mu_route = g_interior_mu_route(f, quad, z)?;
    let mut est = (cauchy - mu_route).norm();
    if let Some(rule) = quad.check_rule() {
        est = est.max((cauchy - g_interior_cauchy(f, rule, z)).norm());
    }
    Ok(TransformResult { value: cauchy, quad_error_estimate: est })
}

fn g_interior_cauchy(f: &RationalFunction, rule: &BoundaryQuadrature, z: Complex64) -> Complex64 {
    let half_i_pi = Complex64::new(0.0, -1.0 / (2.0 * PI));
    let mut acc = Complex64::new(0.0, 0.0);
    for (bp, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += half_i_pi * bp.unit_tangent() * f.eval_raw(bp.sigma).conj() * w
            / (bp.sigma - z);
    }
    acc
}

fn g_interior_mu_route(
    f: &RationalFunction,
    rule: &BoundaryQuadrature,
    z: Complex64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (bp, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += f.eval_raw(bp.sigma).conj() * (mu_value(bp, z) * w);
    }
    Ok(acc - f.eval(z)?.conj())
}

fn g_boundary_sum(
    f: &RationalFunction,
    rule: &BoundaryQuadrature,
    sigma0: Complex64,
) -> Result<Complex64> {
    let domain = rule.domain();
    let coincidence = 1e-13 * (1.0 + sigma0.norm());
    let mut acc = Complex64::new(0.0, 0.0);
    for (bp, &w) in rule.nodes().iter().zip(rule.weights()) {
        let mu = if (bp.sigma - sigma0).norm() < coincidence {
            domain.curvature(bp.param) / (2.0 * PI)
        } else {
            mu_value(bp, sigma0)
        };
        acc += f.eval_raw(bp.sigma).conj() * (mu * w);
    }
    Ok(acc)
}

/// Scalar transform `S(f, z) = integral f(sigma) mu(sigma, z) ds`, satisfying
/// `S(f, z) = f(z) + conj(g(z))` inside the domain.
pub fn s_scalar(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    z: Complex64,
) -> Result<TransformResult<Complex64>> {
    require_valid(f, quad)?;
    if !quad.domain().contains_open(z) {
        return Err(Error::Domain(format!("S(f, z) needs z in the open domain, got {z}")));
    }
    let sum = |rule: &BoundaryQuadrature| -> Complex64 {
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .map(|(bp, &w)| f.eval_raw(bp.sigma) * (mu_value(bp, z) * w))
            .sum()
    };
    let value = sum(quad);
    let est = quad.check_rule().map(|r| (value - sum(r)).norm()).unwrap_or(0.0);
    Ok(TransformResult { value, quad_error_estimate: est })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConvexDomain;
    use crate::quadrature::build_quadrature;
    use crate::rational::{eval_matrix_direct, RationalFunction};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn resolvent_at_minus_one() -> RationalFunction {
        RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0))
    }

    #[test]
    fn mu_kernel_is_the_poisson_kernel_on_the_half_plane() {
        let dom = ConvexDomain::half_plane();
        let bp = dom.boundary_point(0.0);
        // x / (pi (x^2 + (y - s)^2)) at x = 1, y = 0, s = 0.
        assert_relative_eq!(mu_kernel(&bp, c(1.0, 0.0)).unwrap(), 1.0 / PI, epsilon = 1e-15);
        // Straight boundary seen from a boundary point: zero.
        assert_relative_eq!(mu_kernel(&bp, c(0.0, -2.0)).unwrap(), 0.0, epsilon = 1e-15);
        // Reflection symmetry.
        let up = dom.boundary_point(-3.0);
        let down = dom.boundary_point(3.0);
        assert_relative_eq!(
            mu_kernel(&up, c(1.0, 0.0)).unwrap(),
            mu_kernel(&down, c(1.0, 0.0)).unwrap(),
            epsilon = 1e-15
        );
        assert!(mu_kernel(&bp, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn mu_operator_reduces_to_scalar_kernel() {
        let dom = ConvexDomain::half_plane();
        let bp = dom.boundary_point(0.0);
        let a = MatrixOperator::from_rows(1, &[c(1.0, 0.0)]).unwrap();
        let m = mu_operator(&bp, &a).unwrap();
        assert_relative_eq!(m[(0, 0)].re, 1.0 / PI, epsilon = 1e-14);
        assert_relative_eq!(m[(0, 0)].im, 0.0, epsilon = 1e-15);

        // Diagonal matrices give diagonal kernels with scalar entries.
        let d = MatrixOperator::from_rows(
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 1.0)],
        )
        .unwrap();
        let m = mu_operator(&bp, &d).unwrap();
        assert_relative_eq!(m[(0, 0)].re, mu_kernel(&bp, c(1.0, 0.0)).unwrap(), epsilon = 1e-14);
        assert_relative_eq!(m[(1, 1)].re, mu_kernel(&bp, c(2.0, 1.0)).unwrap(), epsilon = 1e-14);
        assert_relative_eq!(m[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        // Hermitian by construction.
        let diff = &m - m.adjoint();
        assert!(frobenius(&diff) < 1e-14);
    }

    #[test]
    fn cauchy_matrix_agrees_with_direct_evaluation() {
        let dom = ConvexDomain::half_plane();
        let f = resolvent_at_minus_one();
        let a = MatrixOperator::from_rows(1, &[c(1.0, 0.0)]).unwrap();
        let quad = build_quadrature(&dom, &[c(1.0, 0.0)], 1e-8).unwrap();
        let got = cauchy_f_matrix(&f, &quad, &a).unwrap();
        assert_relative_eq!(got.value[(0, 0)].re, 0.5, epsilon = 1e-6);
        assert_relative_eq!(got.value[(0, 0)].im, 0.0, epsilon = 1e-6);

        let hy = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let sq = RationalFunction::resolvent_power(c(-1.0, 0.0), 2).unwrap();
        let a = MatrixOperator::from_rows(
            2,
            &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        let quad = build_quadrature(&hy, &[c(1.5, 0.0), c(2.0, 0.0)], 1e-8).unwrap();
        let got = cauchy_f_matrix(&sq, &quad, &a).unwrap();
        let oracle = eval_matrix_direct(&sq, &a).unwrap();
        assert!(frobenius(&(&got.value - &oracle)) < 1e-7);

        // f(infinity) != 0 violates the transform precondition.
        let cayley = RationalFunction::cayley(c(1.0, 0.0));
        assert!(cauchy_f_matrix(&cayley, &quad, &a).is_err());
    }

    #[test]
    fn g_vanishes_on_the_half_plane() {
        let dom = ConvexDomain::half_plane();
        let f = resolvent_at_minus_one();
        let z = c(1.3, 0.4);
        let quad = build_quadrature(&dom, &[z], 1e-7).unwrap();
        let g = conj_cauchy_g(&f, &quad, z, false).unwrap();
        assert!(g.value.norm() < 1e-6, "|g| = {}", g.value.norm());

        // On the half-plane the mass tail decays like 1/m, so foci with
        // larger real part need a looser tail tolerance to stay under the
        // truncation cap.
        let a = MatrixOperator::from_rows(
            2,
            &[c(1.0, 0.0), c(0.3, 0.1), c(0.0, 0.0), c(2.0, -0.2)],
        )
        .unwrap();
        let quad = build_quadrature(&dom, &[c(1.0, 0.0), c(2.0, -0.2)], 1e-7).unwrap();
        let ga = g_matrix(&f, &quad, &a).unwrap();
        assert!(frobenius(&ga.value) < 1e-6);
    }

    #[test]
    fn scalar_identity_links_s_f_and_g() {
        let hy = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let f = resolvent_at_minus_one();
        let z = c(2.0, 0.0);
        let quad = build_quadrature(&hy, &[z], 1e-8).unwrap();
        let s = s_scalar(&f, &quad, z).unwrap();
        let g = conj_cauchy_g(&f, &quad, z, false).unwrap();
        let f_z = f.eval(z).unwrap();
        let resid = (s.value - f_z - g.value.conj()).norm();
        assert!(resid < 1e-6, "identity residual {resid}");
        // Lemma-type bound at alpha = pi/4: |g| <= 1/2 per unit sup norm.
        assert!(g.value.norm() <= 0.5 * crate::rational::sup_norm(&f, &hy).unwrap() + 1e-6);
    }

    #[test]
    fn s_matrix_diagonalizes_on_diagonal_input() {
        let hy = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let f = resolvent_at_minus_one();
        let z1 = c(1.5, 0.2);
        let z2 = c(2.5, -0.4);
        let a = MatrixOperator::from_rows(
            2,
            &[z1, c(0.0, 0.0), c(0.0, 0.0), z2],
        )
        .unwrap();
        let quad = build_quadrature(&hy, &[z1, z2], 1e-8).unwrap();
        let s = s_matrix(&f, &quad, &a).unwrap();
        let s1 = s_scalar(&f, &quad, z1).unwrap();
        let s2 = s_scalar(&f, &quad, z2).unwrap();
        assert_relative_eq!(s.value[(0, 0)].re, s1.value.re, epsilon = 1e-10);
        assert_relative_eq!(s.value[(1, 1)].im, s2.value.im, epsilon = 1e-10);
        assert!(s.value[(0, 1)].norm() < 1e-12);

        // f == 0 maps to the zero matrix.
        let zero = RationalFunction::zero();
        let sz = s_matrix(&zero, &quad, &a).unwrap();
        assert_eq!(frobenius(&sz.value), 0.0);
    }

    #[test]
    fn adjoint_identity_on_the_suite() {
        let hy = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let f = resolvent_at_minus_one();
        let a = MatrixOperator::from_rows(
            2,
            &[c(2.0, 0.0), c(0.4, 0.2), c(0.0, 0.0), c(2.5, -0.3)],
        )
        .unwrap();
        let quad = build_quadrature(&hy, &[c(2.0, 0.0), c(2.5, -0.3)], 1e-8).unwrap();
        let suite = matrix_transforms(&f, &quad, &a).unwrap();
        let direct = eval_matrix_direct(&f, &a).unwrap();
        // S^* = f(A)^* + g(A).
        let resid = frobenius(&(suite.s.value.adjoint() - direct.adjoint() - &suite.g.value));
        assert!(resid < 1e-6, "adjoint identity residual {resid}");
        // The Cauchy route matches the direct evaluation.
        assert!(frobenius(&(&suite.cauchy.value - &direct)) < 1e-6);
        assert!(suite.s.quad_error_estimate.is_finite());
    }
}
