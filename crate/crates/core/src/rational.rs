//! Rational functions in pole/residue form, their evaluation at scalars and
//! matrices, sup norms over unbounded domains, and the two epsilon devices:
//! Moebius damping of the function and resolvent regularization of the matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::numerics::golden_max;
use crate::numrange::MatrixOperator;

/// Minimum distance a pole must keep from the closed domain.
pub const POLE_CLEARANCE: f64 = 1e-6;

/// Absolute distance below which scalar evaluation refuses to approach a pole.
pub const POLE_PROXIMITY: f64 = 1e-14;

/// One pole with its residue coefficients: `coeffs[j-1]` multiplies
/// `1 / (z - location)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm {
    pub location: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl PoleTerm {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

/// `f(z) = value_at_infinity + sum_k sum_j c_{k,j} / (z - p_k)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    terms: Vec<PoleTerm>,
    value_at_infinity: Complex64,
}

impl RationalFunction {
    pub fn new(terms: Vec<PoleTerm>, value_at_infinity: Complex64) -> Result<Self> {
        for term in &terms {
            if term.coeffs.is_empty() {
                return Err(Error::InvalidInput("pole term needs at least order 1".into()));
            }
            if !term.location.re.is_finite() || !term.location.im.is_finite() {
                return Err(Error::InvalidInput("pole location must be finite".into()));
            }
            if term
                .coeffs
                .iter()
                .any(|c| !c.re.is_finite() || !c.im.is_finite())
            {
                return Err(Error::InvalidInput("pole coefficients must be finite".into()));
            }
        }
        if !value_at_infinity.re.is_finite() || !value_at_infinity.im.is_finite() {
            return Err(Error::InvalidInput("value at infinity must be finite".into()));
        }
        Ok(RationalFunction { terms, value_at_infinity })
    }

    /// The zero function.
    pub fn zero() -> Self {
        RationalFunction { terms: Vec::new(), value_at_infinity: Complex64::new(0.0, 0.0) }
    }

    /// Constant function.
    pub fn constant(c: Complex64) -> Self {
        RationalFunction { terms: Vec::new(), value_at_infinity: c }
    }

    /// `c / (z - p)`.
    pub fn simple_pole(p: Complex64, c: Complex64) -> Self {
        RationalFunction {
            terms: vec![PoleTerm { location: p, coeffs: vec![c] }],
            value_at_infinity: Complex64::new(0.0, 0.0),
        }
    }

    /// `1 / (z - p)^order`.
    pub fn resolvent_power(p: Complex64, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("resolvent power needs order >= 1".into()));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order];
        coeffs[order - 1] = Complex64::new(1.0, 0.0);
        RationalFunction::new(vec![PoleTerm { location: p, coeffs }], Complex64::new(0.0, 0.0))
    }

    /// Cayley-type quotient `(z - c) / (z + conj(c))`, with `Re c > 0` placing
    /// the pole in the open left half-plane.
    pub fn cayley(c: Complex64) -> Self {
        RationalFunction {
            terms: vec![PoleTerm {
                location: -c.conj(),
                coeffs: vec![Complex64::new(-2.0 * c.re, 0.0)],
            }],
            value_at_infinity: Complex64::new(1.0, 0.0),
        }
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn value_at_infinity(&self) -> Complex64 {
        self.value_at_infinity
    }

    pub fn vanishes_at_infinity(&self) -> bool {
        self.value_at_infinity.norm() == 0.0
    }

    /// All poles are outside the closed domain with positive clearance.
    pub fn valid_for(&self, domain: &ConvexDomain) -> bool {
        self.terms
            .iter()
            .all(|t| domain.signed_clearance(t.location) <= -POLE_CLEARANCE)
    }

    /// Pointwise scaling `s * f`.
    pub fn scale(&self, s: Complex64) -> Self {
        RationalFunction {
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    location: t.location,
                    coeffs: t.coeffs.iter().map(|c| c * s).collect(),
                })
                .collect(),
            value_at_infinity: self.value_at_infinity * s,
        }
    }

    /// Partial-fraction evaluation.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        for t in &self.terms {
            if (z - t.location).norm() < POLE_PROXIMITY {
                return Err(Error::PoleProximity(format!(
                    "evaluation point {z} within {POLE_PROXIMITY} of pole {}",
                    t.location
                )));
            }
        }
        Ok(self.eval_raw(z))
    }

    /// Evaluation without the proximity guard, for quadrature inner loops
    /// after `valid_for` has been established.
    pub(crate) fn eval_raw(&self, z: Complex64) -> Complex64 {
        let mut acc = self.value_at_infinity;
        for t in &self.terms {
            let inv = Complex64::new(1.0, 0.0) / (z - t.location);
            let mut power = Complex64::new(1.0, 0.0);
            for c in &t.coeffs {
                power *= inv;
                acc += c * power;
            }
        }
        acc
    }
}

// --- serialization: {poles: [{re, im, order}], terms: [{re, im}], inf: {re, im}} ---

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PoleRepr {
    re: f64,
    im: f64,
    order: usize,
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    poles: Vec<PoleRepr>,
    terms: Vec<ComplexRepr>,
    inf: ComplexRepr,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = RationalRepr {
            poles: self
                .terms
                .iter()
                .map(|t| PoleRepr { re: t.location.re, im: t.location.im, order: t.order() })
                .collect(),
            terms: self
                .terms
                .iter()
                .flat_map(|t| t.coeffs.iter())
                .map(|c| ComplexRepr { re: c.re, im: c.im })
                .collect(),
            inf: ComplexRepr { re: self.value_at_infinity.re, im: self.value_at_infinity.im },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(deserializer)?;
        let expected: usize = repr.poles.iter().map(|p| p.order).sum();
        if repr.terms.len() != expected {
            return Err(serde::de::Error::custom(format!(
                "terms length {} does not match the sum of pole orders {expected}",
                repr.terms.len()
            )));
        }
        let mut terms = Vec::with_capacity(repr.poles.len());
        let mut cursor = repr.terms.iter();
        for p in &repr.poles {
            if p.order == 0 {
                return Err(serde::de::Error::custom("pole order must be at least 1"));
            }
            let coeffs: Vec<Complex64> = cursor
                .by_ref()
                .take(p.order)
                .map(|c| Complex64::new(c.re, c.im))
                .collect();
            terms.push(PoleTerm { location: Complex64::new(p.re, p.im), coeffs });
        }
        RationalFunction::new(terms, Complex64::new(repr.inf.re, repr.inf.im))
            .map_err(serde::de::Error::custom)
    }
}

/// `f(A)` by factorized shifted solves: each pole contributes
/// `c_{k,j} (-1)^j ((p_k I - A)^{-1})^j` on top of `f(inf) I`.
pub fn eval_matrix_direct(f: &RationalFunction, a: &MatrixOperator) -> Result<DMatrix<Complex64>> {
    let n = a.dim();
    let mut acc = DMatrix::from_diagonal_element(n, n, f.value_at_infinity());
    for term in f.terms() {
        let shifted = DMatrix::from_diagonal_element(n, n, term.location) - a.entries();
        let lu = shifted.lu();
        let mut power = DMatrix::identity(n, n);
        let mut sign = 1.0;
        for c in &term.coeffs {
            power = lu.solve(&power).ok_or_else(|| {
                Error::Numerical(format!("singular shift at pole {}", term.location))
            })?;
            sign = -sign;
            if c.norm() != 0.0 {
                acc += &power * (c * Complex64::new(sign, 0.0));
            }
        }
    }
    if acc.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("matrix evaluation produced non-finite entries".into()));
    }
    Ok(acc)
}

/// Spectral route for constructed-normal operators: `U diag(f(lambda)) U^*`.
pub fn eval_matrix_spectral(f: &RationalFunction, a: &MatrixOperator) -> Result<DMatrix<Complex64>> {
    let factors = a.normal_factors().ok_or_else(|| {
        Error::InvalidInput("spectral evaluation needs a constructed-normal operator".into())
    })?;
    let values: Result<Vec<Complex64>> =
        factors.spectrum.iter().map(|&l| f.eval(l)).collect();
    let diag = DMatrix::from_diagonal(&DVector::from_vec(values?));
    Ok(&factors.unitary * diag * factors.unitary.adjoint())
}

/// Sup norm over the closed domain: by the maximum principle the supremum is
/// attained on the boundary or at infinity. Boundary samples are refined by
/// golden sections; the parameter window grows until `|f|` approaches
/// `|f(inf)|` monotonically on both tails.
pub fn sup_norm(f: &RationalFunction, domain: &ConvexDomain) -> Result<f64> {
    if !f.valid_for(domain) {
        return Err(Error::Validity(
            "sup norm needs every pole at positive distance from the closed domain".into(),
        ));
    }
    let f_inf = f.value_at_infinity().norm();
    let samples = 4096usize;
    let mut window = 64.0f64;
    let boundary_abs = |t: f64| f.eval_raw(domain.boundary_point(t).sigma).norm();

    let grid = loop {
        let grid: Vec<(f64, f64)> = (0..=samples)
            .map(|i| {
                let t = -window + 2.0 * window * (i as f64) / (samples as f64);
                (t, boundary_abs(t))
            })
            .collect();
        // Tail rule: deviation from |f(inf)| must shrink monotonically over the
        // outermost 64 samples on each side (or already sit within 1e-9).
        let tail_settled = |iter: &mut dyn Iterator<Item = usize>| {
            let mut prev = f64::INFINITY;
            let mut ok = true;
            for i in iter {
                let d = (grid[i].1 - f_inf).abs();
                if d > prev * (1.0 + 1e-12) + 1e-15 {
                    ok = false;
                    break;
                }
                prev = d;
            }
            ok || (grid.last().unwrap().1 - f_inf).abs() <= 1e-9
        };
        let right_ok = tail_settled(&mut (samples - 63..=samples));
        let left_ok = tail_settled(&mut (0..=63).rev());
        if (right_ok && left_ok) || window >= 1e8 {
            break grid;
        }
        window *= 2.0;
    };

    let mut best = f_inf;
    let mut refine = |lo: f64, hi: f64| {
        let (_, v) = golden_max(lo, hi, 1e-11, boundary_abs);
        if v > best {
            best = v;
        }
    };
    let step = 2.0 * window / samples as f64;
    for i in 0..=samples {
        let here = grid[i].1;
        let left = if i > 0 { grid[i - 1].1 } else { f64::NEG_INFINITY };
        let right = if i < samples { grid[i + 1].1 } else { f64::NEG_INFINITY };
        if here >= left && here >= right {
            refine(grid[i].0 - step, grid[i].0 + step);
        }
    }
    // Poles close to the boundary create spikes narrower than the sample
    // spacing; seed a refinement at the boundary parameter nearest each pole.
    for term in f.terms() {
        let t = domain.nearest_boundary_param(term.location);
        refine(t - step, t + step);
    }
    Ok(best)
}

/// Moebius damping `f_eps(z) = f(z) / (1 + eps z)`: vanishes at infinity and
/// does not increase the sup norm on domains inside the right half-plane.
pub fn mobius_damp(f: &RationalFunction, eps: f64) -> Result<RationalFunction> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!("damping needs eps > 0, got {eps}")));
    }
    let q = Complex64::new(-1.0 / eps, 0.0);
    let inv_eps = Complex64::new(1.0 / eps, 0.0);
    let mut new_terms: Vec<PoleTerm> = Vec::with_capacity(f.terms().len() + 1);
    let mut q_coeff = f.value_at_infinity() * inv_eps;
    for term in f.terms() {
        let gap = q - term.location;
        if gap.norm() < 1e-12 {
            // The damping pole lands on an existing pole: orders shift up by one.
            let mut coeffs = vec![Complex64::new(0.0, 0.0)];
            coeffs.extend(term.coeffs.iter().map(|c| c * inv_eps));
            new_terms.push(PoleTerm { location: term.location, coeffs });
            continue;
        }
        let order = term.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order];
        for (idx, c) in term.coeffs.iter().enumerate() {
            let j = idx + 1;
            // c/(z-p)^j * (1/eps)/(z-q) expands into lower-order terms at p
            // plus a simple-pole contribution at q.
            for i in 1..=j {
                coeffs[i - 1] -= inv_eps * c / gap.powu((j - i + 1) as u32);
            }
            q_coeff += inv_eps * c / gap.powu(j as u32);
        }
        new_terms.push(PoleTerm { location: term.location, coeffs });
    }
    if q_coeff.norm() != 0.0 || f.terms().is_empty() {
        new_terms.push(PoleTerm { location: q, coeffs: vec![q_coeff] });
    }
    RationalFunction::new(new_terms, Complex64::new(0.0, 0.0))
}

/// Resolvent regularization `A_eps = A (I + eps A)^{-1}`.
pub fn regularize_matrix(a: &MatrixOperator, eps: f64) -> Result<MatrixOperator> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!("regularization needs eps > 0, got {eps}")));
    }
    let n = a.dim();
    let shifted = DMatrix::identity(n, n) + a.entries() * Complex64::new(eps, 0.0);
    let inv = shifted
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("I + eps A is singular".into()))?;
    let reg = a.entries() * inv;
    if let Some(factors) = a.normal_factors() {
        let spectrum: Vec<Complex64> = factors
            .spectrum
            .iter()
            .map(|&l| l / (Complex64::new(1.0, 0.0) + l * eps))
            .collect();
        return MatrixOperator::normal_from_spectrum(factors.unitary.clone(), spectrum);
    }
    MatrixOperator::from_matrix(reg)
}
