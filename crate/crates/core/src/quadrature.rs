//! Truncated, geometrically graded Gauss-Legendre quadrature on unbounded
//! domain boundaries.
//!
//! All integrals are computed in the curve parameter `t` with the exact
//! speed factor `|sigma'(t)|` in the weights, which is an exact change of
//! variables from arclength. The truncation parameter is chosen from the
//! rotation-deficit tail bound evaluated at the focus points.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::domain::{BoundaryPoint, ConvexDomain};
use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;

/// Hard ceiling for the truncation parameter search.
pub const MAX_TRUNCATION: f64 = 1e8;

/// Tuning knobs for quadrature construction; `default()` is the production
/// rule, the other presets exist for reference oracles and convergence tests.
#[derive(Debug, Clone)]
pub struct QuadratureOptions {
    /// Cap on the panel size at a focus ladder origin.
    pub base_panel: f64,
    /// Gauss-Legendre nodes per panel.
    pub nodes_per_panel: usize,
    /// Use this truncation instead of searching (reference/check rules).
    pub fixed_m: Option<f64>,
    /// Verify the interior mass identity after construction.
    pub mass_gate: bool,
    /// Attach the error-probe rule (half truncation, doubled density).
    pub with_check_rule: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            base_panel: 0.125,
            nodes_per_panel: 16,
            fixed_m: None,
            mass_gate: true,
            with_check_rule: true,
        }
    }
}

/// Truncated node/weight set on a domain boundary.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    domain: ConvexDomain,
    nodes: Vec<BoundaryPoint>,
    /// Arclength weights: Gauss-Legendre panel weights times `|sigma'(t)|`.
    weights: Vec<f64>,
    /// Panel breakpoints (ascending, first = -m, last = m).
    breakpoints: Vec<f64>,
    focus_params: Vec<f64>,
    truncation_m: f64,
    tail_bound: f64,
    target_tol: f64,
    check: Option<Box<BoundaryQuadrature>>,
}

impl BoundaryQuadrature {
    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }
    pub fn nodes(&self) -> &[BoundaryPoint] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
    pub fn focus_params(&self) -> &[f64] {
        &self.focus_params
    }
    pub fn truncation_m(&self) -> f64 {
        self.truncation_m
    }
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
    pub fn target_tol(&self) -> f64 {
        self.target_tol
    }
    /// Error-probe rule: truncation halved, panel density doubled.
    pub fn check_rule(&self) -> Option<&BoundaryQuadrature> {
        self.check.as_deref()
    }

    /// Same scheme sharply refined, used as the oracle in derived-value tests:
    /// double the nodes per panel, quarter the base panel, quadruple the
    /// truncation.
    pub fn reference_rule(&self) -> Result<BoundaryQuadrature> {
        let focus: Vec<Complex64> = self
            .focus_params
            .iter()
            .map(|&t| self.domain.boundary_point(t).sigma)
            .collect();
        build_quadrature_with(
            &self.domain,
            &focus,
            self.target_tol,
            &QuadratureOptions {
                base_panel: 0.125 / 4.0,
                nodes_per_panel: 32,
                fixed_m: Some(self.truncation_m * 4.0),
                mass_gate: false,
                with_check_rule: false,
            },
        )
    }
}

/// Double-layer kernel value `(1/pi) Im(tau / (sigma - z))` with `tau` the
/// unit tangent; evaluated via the cross product for stability near `z`.
pub(crate) fn mu_value(bp: &BoundaryPoint, z: Complex64) -> f64 {
    let u = bp.sigma - z;
    let tau = bp.unit_tangent();
    let d2 = u.norm_sqr();
    (tau.im * u.re - tau.re * u.im) / (PI * d2)
}

/// Builds the production quadrature: truncation from the tail bound at the
/// focus points, graded panels refined near each focus.
pub fn build_quadrature(
    domain: &ConvexDomain,
    focus: &[Complex64],
    target_tol: f64,
) -> Result<BoundaryQuadrature> {
    build_quadrature_with(domain, focus, target_tol, &QuadratureOptions::default())
}

pub fn build_quadrature_with(
    domain: &ConvexDomain,
    focus: &[Complex64],
    target_tol: f64,
    opts: &QuadratureOptions,
) -> Result<BoundaryQuadrature> {
    if focus.is_empty() {
        return Err(Error::InvalidInput("quadrature needs at least one focus point".into()));
    }
    if !(1e-12..=1e-2).contains(&target_tol) {
        return Err(Error::InvalidInput(format!(
            "target tolerance {target_tol} outside [1e-12, 1e-2]"
        )));
    }
    for z in focus {
        if !domain.contains_closed(*z) {
            return Err(Error::Domain(format!("focus point {z} outside the closed domain")));
        }
    }

    struct Focus {
        param: f64,
        h0: f64,
    }
    let mut foci = Vec::with_capacity(focus.len());
    for &z in focus {
        let param = domain.nearest_boundary_param(z);
        let clearance = domain.boundary_distance(z);
        let on_boundary = !domain.contains_open(z) || clearance <= 1e-9 * (1.0 + z.norm());
        let bp = domain.boundary_point(param);
        let acc = domain.boundary_accel(param);
        let mut h0 = opts.base_panel;
        // Keep the first panel below the parameter-space curvature scale.
        if acc.norm() > 0.0 {
            h0 = h0.min(0.5 * bp.speed / acc.norm());
        }
        // And below the parameter distance to an interior focus singularity.
        if !on_boundary {
            h0 = h0.min(0.5 * clearance / bp.speed);
        }
        foci.push(Focus { param, h0: h0.max(1e-6) });
    }

    // Reference interior point for the mass identity; it participates in the
    // truncation rule and the panel grading so its kernel is resolved.
    let z_ref = match focus
        .iter()
        .copied()
        .find(|&z| domain.contains_open(z) && domain.boundary_distance(z) > 1e-9 * (1.0 + z.norm()))
    {
        Some(z) => z,
        None => {
            let central = foci
                .iter()
                .map(|f| f.param)
                .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            let z = domain.boundary_point(central).sigma + Complex64::new(1.0, 0.0);
            let param = domain.nearest_boundary_param(z);
            let speed = domain.boundary_point(param).speed;
            let h0 = opts
                .base_panel
                .min(0.5 * domain.boundary_distance(z) / speed)
                .max(1e-6);
            foci.push(Focus { param, h0 });
            z
        }
    };
    let mut tail_points: Vec<Complex64> = focus.to_vec();
    tail_points.push(z_ref);

    let max_tail = |m: f64| -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in &tail_points {
            worst = worst.max(domain.arg_tail_bound(z, m)?);
        }
        Ok(worst)
    };

    let (m, tail_bound) = match opts.fixed_m {
        Some(m) => (m, max_tail(m)?),
        None => {
            let far = foci.iter().map(|f| f.param.abs()).fold(0.0, f64::max);
            let mut m = 2.0f64.powi(((far + 2.0).log2().ceil() as i32).max(1));
            loop {
                let bound = max_tail(m)?;
                if bound <= target_tol {
                    break (m, bound);
                }
                m *= 2.0;
                if m > MAX_TRUNCATION {
                    return Err(Error::Truncation(format!(
                        "truncation exceeded {MAX_TRUNCATION} before reaching tolerance {target_tol}"
                    )));
                }
            }
        }
    };

    // Panel layout: the span between the extreme focus projections is covered
    // by panels no coarser than the kernel scale of the adjacent foci (every
    // focus parameter is a panel edge); outside the span panels double
    // geometrically out to the truncation.
    let mut anchors: Vec<(f64, f64)> = foci.iter().map(|f| (f.param, f.h0)).collect();
    anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
    anchors.dedup_by(|a, b| {
        if (a.0 - b.0).abs() <= 1e-9 * (1.0 + a.0.abs()) {
            b.1 = b.1.min(a.1);
            true
        } else {
            false
        }
    });

    let mut breakpoints: Vec<f64> = Vec::new();
    for pair in anchors.windows(2) {
        let ((lo, h_lo), (hi, h_hi)) = (pair[0], pair[1]);
        let gap = hi - lo;
        let step = h_lo.min(h_hi).max(gap / 2048.0);
        let n_sub = (gap / step).ceil().max(1.0) as usize;
        for k in 0..n_sub {
            breakpoints.push(lo + gap * (k as f64) / (n_sub as f64));
        }
    }
    breakpoints.push(anchors.last().unwrap().0);
    for &(edge, h0, dir) in &[
        (anchors.last().unwrap().0, anchors.last().unwrap().1, 1.0),
        (anchors[0].0, anchors[0].1, -1.0),
    ] {
        let mut u: f64 = edge;
        let mut h = h0;
        loop {
            u += dir * h;
            h *= 2.0;
            if u.abs() >= m {
                break;
            }
            breakpoints.push(u);
        }
    }
    breakpoints.retain(|u| u.abs() < m);
    breakpoints.push(-m);
    breakpoints.push(m);
    breakpoints.sort_by(|a, b| a.total_cmp(b));
    breakpoints.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));

    let (gl_nodes, gl_weights) = if opts.nodes_per_panel == 16 {
        crate::numerics::gl16().clone()
    } else {
        gauss_legendre(opts.nodes_per_panel)
    };
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in breakpoints.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &w) in gl_nodes.iter().zip(&gl_weights) {
            let bp = domain.boundary_point(mid + half * x);
            weights.push(w * half * bp.speed);
            nodes.push(bp);
        }
    }

    let check = if opts.with_check_rule {
        Some(Box::new(build_quadrature_with(
            domain,
            focus,
            target_tol,
            &QuadratureOptions {
                base_panel: opts.base_panel * 0.5,
                nodes_per_panel: opts.nodes_per_panel,
                fixed_m: Some(0.5 * m),
                mass_gate: false,
                with_check_rule: false,
            },
        )?))
    } else {
        None
    };

    let quad = BoundaryQuadrature {
        domain: domain.clone(),
        nodes,
        weights,
        breakpoints,
        focus_params: foci.iter().map(|f| f.param).collect(),
        truncation_m: m,
        tail_bound,
        target_tol,
        check,
    };

    if opts.mass_gate {
        let expected = 2.0 - 2.0 * domain.aperture() / PI;
        let got = mass(&quad, z_ref, false)?;
        if (got - expected).abs() > 10.0 * target_tol {
            return Err(Error::Numerical(format!(
                "interior mass check failed: got {got}, expected {expected} within {}",
                10.0 * target_tol
            )));
        }
    }
    Ok(quad)
}

/// Quadrature mass `sum w_i mu(node_i, z)`; equals `2 - 2 alpha / pi` for
/// interior points and `1 - 2 alpha / pi` on the boundary, up to tail and
/// panel error. Boundary evaluation expects `z` among the quadrature's focus
/// points so that panels are aligned and refined there.
pub fn mass(quad: &BoundaryQuadrature, z: Complex64, on_boundary: bool) -> Result<f64> {
    let domain = quad.domain();
    if !on_boundary && !domain.contains_open(z) {
        return Err(Error::Domain(format!(
            "interior mass requested for non-interior point {z}"
        )));
    }
    if on_boundary && domain.boundary_distance(z) > 1e-6 * (1.0 + z.norm()) {
        return Err(Error::Domain(format!("boundary mass requested for off-boundary point {z}")));
    }
    let coincidence = 1e-13 * (1.0 + z.norm());
    let mut acc = 0.0;
    for (bp, &w) in quad.nodes().iter().zip(quad.weights()) {
        let gap = (bp.sigma - z).norm();
        if gap < coincidence {
            if on_boundary {
                // Removable singularity of the double-layer kernel on a
                // smooth curve: the limit value is curvature / (2 pi).
                acc += w * domain.curvature(bp.param) / (2.0 * PI);
                continue;
            }
            return Err(Error::Singularity(format!(
                "mass point {z} coincides with a quadrature node"
            )));
        }
        acc += w * mu_value(bp, z);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_plane_interior_mass_is_one() {
        let dom = ConvexDomain::half_plane();
        let quad = build_quadrature(&dom, &[c(1.0, 0.0)], 1e-6).unwrap();
        let got = mass(&quad, c(1.0, 0.0), false).unwrap();
        assert_relative_eq!(got, 1.0, epsilon = 1e-5);
        assert!(quad.tail_bound() <= 1e-6);
        assert!(quad.check_rule().is_some());
    }

    #[test]
    fn hyperbola_masses() {
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let quad = build_quadrature(&dom, &[c(2.0, 0.0)], 1e-8).unwrap();
        // alpha = pi/4: interior mass 3/2.
        assert_relative_eq!(mass(&quad, c(2.0, 0.0), false).unwrap(), 1.5, epsilon = 1e-7);

        // Boundary mass at the vertex: 1 - 2 alpha / pi = 1/2.
        let vertex = c(1.0, 0.0);
        let quad = build_quadrature(&dom, &[vertex], 1e-8).unwrap();
        assert_relative_eq!(mass(&quad, vertex, true).unwrap(), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn parabola_interior_mass_is_two() {
        let dom = ConvexDomain::parabola(1.0).unwrap();
        let quad = build_quadrature(&dom, &[c(2.0, 0.0)], 1e-6).unwrap();
        assert_relative_eq!(mass(&quad, c(2.0, 0.0), false).unwrap(), 2.0, epsilon = 1e-5);
    }

    #[test]
    fn halving_tolerance_never_shrinks_the_rule() {
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let coarse = build_quadrature(&dom, &[c(2.0, 0.0)], 1e-6).unwrap();
        let fine = build_quadrature(&dom, &[c(2.0, 0.0)], 5e-7).unwrap();
        assert!(fine.truncation_m() >= coarse.truncation_m());
        assert!(fine.nodes().len() >= coarse.nodes().len());
    }

    #[test]
    fn focus_outside_domain_is_rejected() {
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        assert!(build_quadrature(&dom, &[c(0.0, 0.0)], 1e-6).is_err());
        assert!(build_quadrature(&dom, &[], 1e-6).is_err());
        assert!(build_quadrature(&dom, &[c(2.0, 0.0)], 1e-1).is_err());
    }

    #[test]
    fn weights_are_positive_and_nodes_sorted() {
        let dom = ConvexDomain::parabola(0.25).unwrap();
        let quad = build_quadrature(&dom, &[c(1.0, 0.0), c(4.0, -1.0)], 1e-7).unwrap();
        assert!(quad.weights().iter().all(|&w| w > 0.0));
        for pair in quad.nodes().windows(2) {
            assert!(pair[0].param < pair[1].param);
        }
    }
}
