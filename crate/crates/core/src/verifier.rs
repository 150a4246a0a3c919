//! The aperture-angle constant, the quartic root inequality, and the
//! verification operations for the transform bounds: the `g`-bound, the
//! `S`-bound, the Schwenninger product identity, the main spectral-set ratio,
//! and first-order resolvent-regularization convergence.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::numerics::ls_slope;
use crate::numrange::{operator_norm, MatrixOperator};
use crate::quadrature::BoundaryQuadrature;
use crate::rational::{
    eval_matrix_direct, eval_matrix_spectral, mobius_damp, regularize_matrix, sup_norm,
    RationalFunction,
};
use crate::transforms::{conj_cauchy_g, matrix_transforms};

/// Damping parameter used when a function with `f(inf) != 0` enters a bound
/// verification that needs decay at infinity. Kept well away from zero: the
/// damped function decays like `1/(eps |sigma|)` on the boundary, and the
/// truncation tail of the Cauchy-type transforms scales with its reciprocal.
pub const AUTO_DAMP_EPS: f64 = 0.25;

/// The spectral-set constant
/// `K(alpha) = 1 - alpha/pi + sqrt(2 - 4 alpha/pi + alpha^2/pi^2)`,
/// strictly decreasing from `1 + sqrt(2)` at `alpha = 0` to `1` at
/// `alpha = pi/2`.
pub fn k_of_alpha(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && (-1e-15..=FRAC_PI_2 + 1e-15).contains(&alpha)) {
        return Err(Error::Domain(format!("aperture {alpha} outside [0, pi/2]")));
    }
    let r = alpha / PI;
    Ok(1.0 - r + (2.0 - 4.0 * r + r * r).sqrt())
}

/// `C^4 - (2 - 2 alpha/pi) C^3 - (1 - 2 alpha/pi) C^2`; vanishes at
/// `C = K(alpha)`, which is the positive root of the quadratic factor.
pub fn quartic_residual(c: f64, alpha: f64) -> f64 {
    let r = 2.0 * alpha / PI;
    c.powi(4) - (2.0 - r) * c.powi(3) - (1.0 - r) * c.powi(2)
}

/// Result of the `g`-bound verification.
#[derive(Debug, Clone)]
pub struct Lemma1Outcome {
    /// `(1 - 2 alpha/pi) - max |g|` over the boundary samples.
    pub margin: f64,
    /// Largest sampled boundary value of `|g|` for the normalized function.
    pub max_g: f64,
    /// Largest quadrature error probe among the samples.
    pub quad_error: f64,
    /// Number of boundary samples actually used.
    pub samples: usize,
}

/// Boundary parameters used by `verify_lemma1`: `n` values spread over the
/// window `[-w, w]`, snapped to quadrature breakpoints when available so the
/// kernel's removable point sits on a panel edge.
pub fn lemma1_sample_params(quad: &BoundaryQuadrature, n: usize) -> Vec<f64> {
    let w = 10.0f64.min(0.5 * quad.truncation_m());
    let raw: Vec<f64> = (0..n)
        .map(|j| -w + 2.0 * w * (j as f64) / ((n.max(2) - 1) as f64))
        .collect();
    let bps = quad.breakpoints();
    let mut snapped: Vec<f64> = raw
        .into_iter()
        .map(|t| {
            let idx = bps.partition_point(|&b| b < t);
            let lo = bps.get(idx.saturating_sub(1)).copied().unwrap_or(t);
            let hi = bps.get(idx).copied().unwrap_or(t);
            if (t - lo).abs() <= (hi - t).abs() {
                lo
            } else {
                hi
            }
        })
        .collect();
    snapped.sort_by(|a, b| a.total_cmp(b));
    snapped.dedup();
    snapped
}

/// Checks `|g| <= 1 - 2 alpha / pi` on sampled boundary values of the
/// normalized function. The sup norm is computed here, so templates may be
/// passed unnormalized; `f` must vanish at infinity.
pub fn verify_lemma1(
    f: &RationalFunction,
    domain: &ConvexDomain,
    quad: &BoundaryQuadrature,
    n_boundary_samples: usize,
) -> Result<Lemma1Outcome> {
    if !f.vanishes_at_infinity() {
        return Err(Error::InvalidInput("the g-bound needs f(infinity) = 0".into()));
    }
    let bound = 1.0 - 2.0 * domain.aperture() / PI;
    let scale = sup_norm(f, domain)?;
    if scale == 0.0 {
        return Ok(Lemma1Outcome { margin: bound, max_g: 0.0, quad_error: 0.0, samples: 0 });
    }
    let fn_unit = f.scale(Complex64::new(1.0 / scale, 0.0));
    let params = lemma1_sample_params(quad, n_boundary_samples);
    let mut max_g = 0.0f64;
    let mut quad_error = 0.0f64;
    for &t in &params {
        let sigma0 = domain.boundary_point(t).sigma;
        let g = conj_cauchy_g(&fn_unit, quad, sigma0, true)?;
        max_g = max_g.max(g.value.norm());
        quad_error = quad_error.max(g.quad_error_estimate);
    }
    Ok(Lemma1Outcome { margin: bound - max_g, max_g, quad_error, samples: params.len() })
}

/// Result of the `S`-bound verification.
#[derive(Debug, Clone)]
pub struct Lemma2Outcome {
    /// `(2 - 2 alpha/pi) - |S(f, A)|` for the normalized function.
    pub margin: f64,
    pub s_norm: f64,
    pub quad_error: f64,
}

/// Checks `|S(f, A)| <= 2 - 2 alpha / pi` for the normalized function; the
/// containment certificate for `A` is the caller's obligation.
pub fn verify_lemma2(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
) -> Result<Lemma2Outcome> {
    let domain = quad.domain();
    let bound = 2.0 - 2.0 * domain.aperture() / PI;
    let scale = sup_norm(f, domain)?;
    if scale == 0.0 {
        return Ok(Lemma2Outcome { margin: bound, s_norm: 0.0, quad_error: 0.0 });
    }
    let fn_unit = f.scale(Complex64::new(1.0 / scale, 0.0));
    let s = crate::transforms::s_matrix(&fn_unit, quad, a)?;
    let s_norm = operator_norm(&s.value);
    Ok(Lemma2Outcome { margin: bound - s_norm, s_norm, quad_error: s.quad_error_estimate })
}

/// Residual of the product identity
/// `(F* F)^2 = F* F S* F - F* F G F` with `F = f(A)` from the direct path and
/// `S`, `G` from quadrature, normalized by `max(1, |F|^4)`.
pub fn verify_schwenninger(
    f: &RationalFunction,
    quad: &BoundaryQuadrature,
    a: &MatrixOperator,
) -> Result<f64> {
    let scale = sup_norm(f, quad.domain())?;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let fn_unit = f.scale(Complex64::new(1.0 / scale, 0.0));
    let fa = eval_matrix_direct(&fn_unit, a)?;
    let suite = matrix_transforms(&fn_unit, quad, a)?;
    Ok(schwenninger_residual_parts(&fa, &suite.s.value, &suite.g.value))
}

/// The Schwenninger residual from already-computed factors.
pub fn schwenninger_residual_parts(
    fa: &DMatrix<Complex64>,
    s: &DMatrix<Complex64>,
    g: &DMatrix<Complex64>,
) -> f64 {
    let fsf = fa.adjoint() * fa;
    let lhs = &fsf * &fsf;
    let rhs = &fsf * s.adjoint() * fa - &fsf * g * fa;
    let denom = operator_norm(fa).powi(4).max(1.0);
    operator_norm(&(lhs - rhs)) / denom
}

/// Result of the main spectral-set ratio check.
#[derive(Debug, Clone)]
pub struct MainBoundOutcome {
    /// `|f(A)| / sup |f|` for the (possibly damped) function.
    pub ratio: f64,
    pub sup_norm_f: f64,
    pub norm_fa: f64,
    /// Whether Moebius damping was applied because `f(inf) != 0`.
    pub damped: bool,
}

/// Computes the ratio `|f(A)|_2 / sup_domain |f|`, damping `f` first when it
/// does not vanish at infinity. Constructed-normal operators use the spectral
/// evaluation path, which is exact up to the eigendecomposition.
pub fn verify_main_bound(
    f: &RationalFunction,
    a: &MatrixOperator,
    domain: &ConvexDomain,
) -> Result<MainBoundOutcome> {
    let damped = !f.vanishes_at_infinity();
    let fd = if damped { mobius_damp(f, AUTO_DAMP_EPS)? } else { f.clone() };
    let sup = sup_norm(&fd, domain)?;
    if sup == 0.0 {
        return Err(Error::UndefinedRatio("sup |f| vanishes; the ratio is undefined".into()));
    }
    let fa = if a.normal_factors().is_some() {
        eval_matrix_spectral(&fd, a)?
    } else {
        eval_matrix_direct(&fd, a)?
    };
    let norm_fa = operator_norm(&fa);
    Ok(MainBoundOutcome { ratio: norm_fa / sup, sup_norm_f: sup, norm_fa, damped })
}

/// Result of the regularization convergence check.
#[derive(Debug, Clone)]
pub struct RegularizationOutcome {
    /// `(eps, |f(A_eps) - f(A)|_2)` pairs in the order supplied.
    pub samples: Vec<(f64, f64)>,
    /// Least-squares slope of `log err` against `log eps`.
    pub slope: f64,
    /// Whether every error satisfied the a-priori chain bound
    /// `err <= eps |c| (1 + |p| / d(p, domain))^2`.
    pub apriori_ok: bool,
    /// The a-priori factor `|c| (1 + |p| / d(p, domain))^2`.
    pub apriori_factor: f64,
}

/// First-order convergence of `f(A_eps) -> f(A)` for a simple-pole resolvent
/// `f = c / (z - p)` and `A_eps = A (I + eps A)^{-1}`.
pub fn verify_regularization(
    f: &RationalFunction,
    a: &MatrixOperator,
    domain: &ConvexDomain,
    eps_list: &[f64],
) -> Result<RegularizationOutcome> {
    let [term] = f.terms() else {
        return Err(Error::InvalidInput(
            "regularization check needs a single simple-pole resolvent function".into(),
        ));
    };
    if term.order() != 1 || !f.vanishes_at_infinity() {
        return Err(Error::InvalidInput(
            "regularization check needs a simple pole and f(infinity) = 0".into(),
        ));
    }
    if eps_list.len() < 2 {
        return Err(Error::InvalidInput("need at least two eps values to fit a slope".into()));
    }
    let pole = term.location;
    let coeff_norm = term.coeffs[0].norm();
    let dist = -domain.signed_clearance(pole);
    if dist <= 0.0 {
        return Err(Error::Validity(format!("pole {pole} not outside the closed domain")));
    }
    let apriori_factor = coeff_norm * (1.0 + pole.norm() / dist).powi(2);

    let fa = eval_matrix_direct(f, a)?;
    let mut samples = Vec::with_capacity(eps_list.len());
    let mut apriori_ok = true;
    for &eps in eps_list {
        let a_eps = regularize_matrix(a, eps)?;
        let fae = eval_matrix_direct(f, &a_eps)?;
        let err = operator_norm(&(&fae - &fa));
        if err > eps * apriori_factor * (1.0 + 1e-9) {
            apriori_ok = false;
        }
        samples.push((eps, err));
    }
    let fit: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(_, e)| e > 1e-300)
        .map(|(eps, e)| (eps.ln(), e.ln()))
        .collect();
    if fit.len() < 2 {
        return Err(Error::Numerical("regularization errors vanished; slope undefined".into()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
    Ok(RegularizationOutcome { samples, slope: ls_slope(&xs, &ys), apriori_ok, apriori_factor })
}

/// Adjoint-identity residual `|S* - F* - G|_2`, with `F` from the direct path.
pub fn adjoint_residual(
    fa_direct: &DMatrix<Complex64>,
    s: &DMatrix<Complex64>,
    g: &DMatrix<Complex64>,
) -> f64 {
    operator_norm(&(s.adjoint() - fa_direct.adjoint() - g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_quadrature;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k_formula_endpoints_and_midpoint() {
        assert_relative_eq!(k_of_alpha(FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(k_of_alpha(0.0).unwrap(), 1.0 + 2f64.sqrt(), epsilon = 1e-15);
        // K(pi/4) = 3/4 + sqrt(17)/4.
        assert_relative_eq!(
            k_of_alpha(PI / 4.0).unwrap(),
            0.75 + 17f64.sqrt() / 4.0,
            epsilon = 1e-14
        );
        assert!(k_of_alpha(-0.1).is_err());
        assert!(k_of_alpha(2.0).is_err());
    }

    #[test]
    fn quartic_root_property() {
        assert_relative_eq!(quartic_residual(1.0, FRAC_PI_2), 0.0, epsilon = 1e-15);
        assert!(quartic_residual(1.0 + 2f64.sqrt(), 0.0).abs() < 1e-12);
        // Direct arithmetic: 16 - (3/2) 8 - (1/2) 4 = 2.
        assert_relative_eq!(quartic_residual(2.0, PI / 4.0), 2.0, epsilon = 1e-13);
        // Root property along a grid.
        for i in 0..=100 {
            let alpha = FRAC_PI_2 * i as f64 / 100.0;
            let k = k_of_alpha(alpha).unwrap();
            assert!(quartic_residual(k, alpha).abs() < 1e-12, "alpha = {alpha}");
        }
    }

    #[test]
    fn k_is_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let alpha = FRAC_PI_2 * i as f64 / 100.0;
            let k = k_of_alpha(alpha).unwrap();
            assert!(k < prev);
            prev = k;
        }
    }

    #[test]
    fn lemma1_zero_function_gives_exact_margin() {
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let quad = build_quadrature(&dom, &[c(2.0, 0.0)], 1e-8).unwrap();
        let out = verify_lemma1(&RationalFunction::zero(), &dom, &quad, 8).unwrap();
        assert_relative_eq!(out.margin, 0.5, epsilon = 1e-15);
        assert_eq!(out.max_g, 0.0);
    }

    #[test]
    fn lemma1_on_half_plane_sees_vanishing_g() {
        let dom = ConvexDomain::half_plane();
        let f = RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0));
        let sigmas: Vec<Complex64> = (0..9)
            .map(|j| dom.boundary_point(-10.0 + 2.5 * j as f64).sigma)
            .collect();
        let quad = build_quadrature(&dom, &sigmas, 1e-7).unwrap();
        let out = verify_lemma1(&f, &dom, &quad, 9).unwrap();
        assert!(out.max_g <= 1e-6, "max |g| = {}", out.max_g);
        assert!(out.margin >= -1e-6);
    }

    #[test]
    fn lemma1_on_hyperbola_respects_the_bound() {
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let f = RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0));
        let sigmas: Vec<Complex64> = (0..13)
            .map(|j| dom.boundary_point(-3.0 + 0.5 * j as f64).sigma)
            .collect();
        let quad = build_quadrature(&dom, &sigmas, 1e-8).unwrap();
        let out = verify_lemma1(&f, &dom, &quad, 13).unwrap();
        assert!(out.margin >= -1e-6, "margin = {}", out.margin);
        assert!(out.max_g <= 0.5 + 1e-6);
    }

    #[test]
    fn lemma2_scalar_case_respects_the_mass_identity() {
        // For a 1x1 matrix, |S| = |S(f, c)| <= mass = 2 - 2 alpha / pi.
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let f = RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0));
        let a = MatrixOperator::from_rows(1, &[c(2.0, 0.3)]).unwrap();
        let quad = build_quadrature(&dom, &[c(2.0, 0.3)], 1e-8).unwrap();
        let out = verify_lemma2(&f, &quad, &a).unwrap();
        assert!(out.margin >= -1e-6, "margin = {}", out.margin);
        assert!(out.s_norm <= 1.5 + 1e-6);

        let zero = verify_lemma2(&RationalFunction::zero(), &quad, &a).unwrap();
        assert_relative_eq!(zero.margin, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn schwenninger_residual_small_for_normal_diagonal() {
        let dom = ConvexDomain::half_plane();
        let f = RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0));
        let a = MatrixOperator::from_rows(
            2,
            &[c(1.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(0.5, -1.0)],
        )
        .unwrap();
        let quad = build_quadrature(&dom, &[c(1.0, 0.5), c(0.5, -1.0)], 1e-7).unwrap();
        let resid = verify_schwenninger(&f, &quad, &a).unwrap();
        assert!(resid <= 1e-6, "residual = {resid}");
        assert_eq!(verify_schwenninger(&RationalFunction::zero(), &quad, &a).unwrap(), 0.0);
    }

    #[test]
    fn main_bound_von_neumann_case() {
        let dom = ConvexDomain::half_plane();
        let cayley = RationalFunction::cayley(c(1.0, 0.0));
        let a = MatrixOperator::from_rows(
            2,
            &[c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, -2.0)],
        )
        .unwrap();
        let out = verify_main_bound(&cayley, &a, &dom).unwrap();
        assert!(out.damped);
        assert!(out.ratio <= 1.0 + 1e-10, "ratio = {}", out.ratio);

        assert!(matches!(
            verify_main_bound(&RationalFunction::zero(), &a, &dom),
            Err(Error::UndefinedRatio(_))
        ));
    }

    #[test]
    fn regularization_scalar_example() {
        // A = [1], eps = 1: A_eps = 1/2 and |f(A_eps) - f(A)| = 1/6 for f = 1/(1+z).
        let dom = ConvexDomain::half_plane();
        let f = RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0));
        let a = MatrixOperator::from_rows(1, &[c(1.0, 0.0)]).unwrap();
        let out = verify_regularization(&f, &a, &dom, &[1.0, 0.5]).unwrap();
        assert_relative_eq!(out.samples[0].1, 1.0 / 6.0, epsilon = 1e-12);
        assert!(out.apriori_ok);
    }

    #[test]
    fn regularization_slope_is_first_order_for_stiff_diagonal() {
        let dom = ConvexDomain::half_plane();
        let f = RationalFunction::simple_pole(c(-1.0, 0.0), c(1.0, 0.0));
        let a = MatrixOperator::from_rows(
            3,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1e3, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1e6, 0.0),
            ],
        )
        .unwrap();
        let eps: Vec<f64> = (1..=10).map(|k| 2f64.powi(-k)).collect();
        let out = verify_regularization(&f, &a, &dom, &eps).unwrap();
        assert!((0.9..=1.1).contains(&out.slope), "slope = {}", out.slope);
        assert!(out.apriori_ok);
        // Errors decrease monotonically with eps.
        for pair in out.samples.windows(2) {
            assert!(pair[1].1 <= pair[0].1 * (1.0 + 1e-12));
        }
    }
}
