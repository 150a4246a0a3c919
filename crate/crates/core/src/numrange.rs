//! Numerical-range support data for finite complex matrices, containment
//! certification against convex domains, and seeded matrix ensembles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};

/// Maximum matrix dimension handled by the crate (desk scale).
pub const MAX_DIM: usize = 512;

/// Relative residual tolerance for cached eigenpairs.
pub const EIGEN_TOL: f64 = 1e-10;

/// Eigendecomposition carried by matrices constructed as normal.
#[derive(Debug, Clone)]
pub struct NormalFactors {
    /// Unitary factor `U`.
    pub unitary: DMatrix<Complex64>,
    /// Spectrum `lambda`, so the matrix is `U diag(lambda) U^*`.
    pub spectrum: Vec<Complex64>,
}

/// Dense complex square matrix with cached spectral data.
#[derive(Debug)]
pub struct MatrixOperator {
    entries: DMatrix<Complex64>,
    normal_factors: Option<NormalFactors>,
    eigenvalues: Mutex<Option<Vec<Complex64>>>,
    support_cache: Mutex<BTreeMap<u64, f64>>,
}

impl Clone for MatrixOperator {
    fn clone(&self) -> Self {
        MatrixOperator {
            entries: self.entries.clone(),
            normal_factors: self.normal_factors.clone(),
            eigenvalues: Mutex::new(self.eigenvalues.lock().unwrap().clone()),
            support_cache: Mutex::new(self.support_cache.lock().unwrap().clone()),
        }
    }
}

impl MatrixOperator {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "operator must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "dimension {} exceeds the desk-scale cap {MAX_DIM}",
                entries.nrows()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("operator entries must be finite".into()));
        }
        Ok(MatrixOperator {
            entries,
            normal_factors: None,
            eigenvalues: Mutex::new(None),
            support_cache: Mutex::new(BTreeMap::new()),
        })
    }

    /// Row-major construction helper.
    pub fn from_rows(n: usize, rows: &[Complex64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                rows.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(n, n, rows))
    }

    /// Builds `U diag(lambda) U^*` and remembers the factors.
    pub fn normal_from_spectrum(unitary: DMatrix<Complex64>, spectrum: Vec<Complex64>) -> Result<Self> {
        let n = spectrum.len();
        if unitary.nrows() != n || unitary.ncols() != n {
            return Err(Error::InvalidInput("unitary factor shape mismatch".into()));
        }
        let diag = DMatrix::from_diagonal(&DVector::from_vec(spectrum.clone()));
        let entries = &unitary * diag * unitary.adjoint();
        let mut op = Self::from_matrix(entries)?;
        op.normal_factors = Some(NormalFactors { unitary, spectrum: spectrum.clone() });
        *op.eigenvalues.lock().unwrap() = Some(spectrum);
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Eigendecomposition when the matrix was constructed as normal.
    pub fn normal_factors(&self) -> Option<&NormalFactors> {
        self.normal_factors.as_ref()
    }

    /// Operator 2-norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        operator_norm(&self.entries)
    }

    /// Spectrum, computed once via the complex Schur form and cached.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        {
            let cached = self.eigenvalues.lock().unwrap();
            if let Some(ev) = cached.as_ref() {
                return Ok(ev.clone());
            }
        }
        let schur = self
            .entries
            .clone()
            .try_schur(1e-14, 100_000)
            .ok_or_else(|| Error::Numerical("complex Schur iteration failed".into()))?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::Numerical("Schur form produced no eigenvalues".into()))?;
        let ev: Vec<Complex64> = ev.iter().copied().collect();
        *self.eigenvalues.lock().unwrap() = Some(ev.clone());
        Ok(ev)
    }

    /// Eigenpairs refined by inverse iteration; each satisfies
    /// `|A v - lambda v| <= EIGEN_TOL * |A|`.
    pub fn eigenpairs(&self) -> Result<Vec<(Complex64, DVector<Complex64>)>> {
        let n = self.dim();
        let scale = self.norm2().max(1e-300);
        let mut out = Vec::with_capacity(n);
        for (j, &lambda) in self.eigenvalues()?.iter().enumerate() {
            // Tiny shift keeps the solve nonsingular at a true eigenvalue.
            let shift = lambda + Complex64::new(1e-13 * scale, 1e-13 * scale);
            let shifted = &self.entries - DMatrix::from_diagonal_element(n, n, shift);
            let lu = shifted.lu();
            let mut v = DVector::from_fn(n, |i, _| {
                Complex64::new(1.0 + ((i + j) % 7) as f64 * 0.1, ((i * 3 + j) % 5) as f64 * 0.1)
            });
            v /= Complex64::new(v.norm(), 0.0);
            let mut ok = false;
            for _ in 0..5 {
                let Some(w) = lu.solve(&v) else { break };
                let nw = w.norm();
                if !nw.is_finite() || nw == 0.0 {
                    break;
                }
                v = w / Complex64::new(nw, 0.0);
                let residual = (&self.entries * &v - &v * lambda).norm();
                if residual <= EIGEN_TOL * scale {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::Numerical(format!(
                    "inverse iteration failed the residual test for eigenvalue {lambda}"
                )));
            }
            out.push((lambda, v));
        }
        Ok(out)
    }

    /// Support function of `W(A)`: the largest eigenvalue of the Hermitian
    /// part of `e^{-i theta} A`.
    pub fn support_value(&self, theta: f64) -> Result<f64> {
        if let Some(v) = self.support_cache.lock().unwrap().get(&theta.to_bits()) {
            return Ok(*v);
        }
        let herm = self.rotated_hermitian_part(theta);
        let eig = herm.symmetric_eigen();
        let v = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if !v.is_finite() {
            return Err(Error::Numerical("Hermitian eigensolve returned non-finite values".into()));
        }
        self.support_cache.lock().unwrap().insert(theta.to_bits(), v);
        Ok(v)
    }

    /// Boundary point of `W(A)` in direction `theta`: the Rayleigh quotient of
    /// a maximizing eigenvector of the rotated Hermitian part.
    pub fn support_point(&self, theta: f64) -> Result<Complex64> {
        let herm = self.rotated_hermitian_part(theta);
        let eig = herm.symmetric_eigen();
        let mut best = 0usize;
        for (k, &val) in eig.eigenvalues.iter().enumerate() {
            if val > eig.eigenvalues[best] {
                best = k;
            }
        }
        let v = eig.eigenvectors.column(best).into_owned();
        let nv = v.norm();
        if nv == 0.0 || !nv.is_finite() {
            return Err(Error::Numerical("degenerate eigenvector".into()));
        }
        let v = v / Complex64::new(nv, 0.0);
        Ok(v.dotc(&(&self.entries * &v)))
    }

    fn rotated_hermitian_part(&self, theta: f64) -> DMatrix<Complex64> {
        let phase = Complex64::from_polar(1.0, -theta);
        let rotated = &self.entries * phase;
        (&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

/// Operator 2-norm of a dense complex matrix.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Boundary samples of `W(A)` over a uniform angle grid. Every returned point
/// is a Rayleigh quotient, hence lies in `W(A)` exactly.
pub fn numrange_boundary(a: &MatrixOperator, n_angles: usize) -> Result<Vec<Complex64>> {
    if n_angles < 8 {
        return Err(Error::InvalidInput(format!(
            "numerical-range sampling needs at least 8 angles, got {n_angles}"
        )));
    }
    (0..n_angles)
        .map(|j| a.support_point(2.0 * PI * j as f64 / n_angles as f64))
        .collect()
}

/// Outcome of a containment check of `W(A)` against a domain.
#[derive(Debug, Clone)]
pub struct ContainmentCertificate {
    pub contained: bool,
    /// Smallest signed clearance over the probes (negative when violated).
    pub margin: f64,
    /// Probe angles with the matching `W(A)` boundary samples.
    pub probes: Vec<(f64, Complex64)>,
}

/// Certifies `W(A)` inside the domain with a sampled boundary plus a
/// support-line cross-check; exact for the half-plane.
pub fn certify_containment(
    a: &MatrixOperator,
    domain: &ConvexDomain,
    n_angles: usize,
) -> Result<ContainmentCertificate> {
    if n_angles < 16 {
        return Err(Error::InvalidInput(format!(
            "containment certification needs at least 16 angles, got {n_angles}"
        )));
    }
    let angles: Vec<f64> = (0..n_angles).map(|j| 2.0 * PI * j as f64 / n_angles as f64).collect();
    let mut probes = Vec::with_capacity(n_angles);
    for &theta in &angles {
        probes.push((theta, a.support_point(theta)?));
    }
    if matches!(domain.kind(), crate::domain::DomainKind::HalfPlane) {
        // lambda_min(Herm A) is the exact distance from W(A) to the boundary.
        let margin = -a.support_value(PI)?;
        return Ok(ContainmentCertificate { contained: margin > 0.0, margin, probes });
    }
    let mut margin = f64::INFINITY;
    for &(_, z) in &probes {
        margin = margin.min(domain.signed_clearance(z));
    }
    // Support-line cross-check in every direction where the domain has a
    // finite support value; catches bulges between probe samples.
    let mut max_violation = f64::NEG_INFINITY;
    for &theta in &angles {
        if let Some(h_dom) = domain.support_value(theta) {
            let h_w = a.support_value(theta)?;
            max_violation = max_violation.max(h_w - h_dom);
        }
    }
    if max_violation > 0.0 {
        margin = margin.min(-max_violation);
    }
    Ok(ContainmentCertificate { contained: margin > 0.0, margin, probes })
}

/// Matrix ensembles emitted by the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Shifted complex Ginibre.
    Ginibre,
    /// Single Jordan block translated into the domain.
    Jordan,
    /// Normal matrix with spectrum sampled inside the domain.
    Normal,
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::Ginibre => "ginibre",
            EnsembleKind::Jordan => "jordan",
            EnsembleKind::Normal => "normal",
        }
    }
}

/// Number of probe angles used by generator certification.
const GEN_ANGLES: usize = 256;

/// Deterministic random matrix with `W(A)` inside the domain at clearance in
/// `[margin, 2 margin]` (shifted-Ginibre ensemble).
pub fn random_matrix_in_domain(
    domain: &ConvexDomain,
    n: usize,
    margin: f64,
    seed: u64,
) -> Result<MatrixOperator> {
    random_matrix_ensemble(domain, EnsembleKind::Ginibre, n, margin, seed)
}

/// Ensemble generator: deterministic in `seed`, certified clearance in
/// `[margin, 2 margin]`.
pub fn random_matrix_ensemble(
    domain: &ConvexDomain,
    kind: EnsembleKind,
    n: usize,
    margin: f64,
    seed: u64,
) -> Result<MatrixOperator> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!("ensemble dimension {n} out of range")));
    }
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::InvalidInput(format!("ensemble margin must be positive, got {margin}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((kind as u64) << 56));
    let (base, factors) = match kind {
        EnsembleKind::Ginibre => (ginibre(n, &mut rng) / Complex64::new((n as f64).sqrt(), 0.0), None),
        EnsembleKind::Jordan => {
            let gamma = 0.5 + rng.random::<f64>();
            let mut j = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for k in 0..n.saturating_sub(1) {
                j[(k, k + 1)] = Complex64::new(gamma, 0.0);
            }
            (j, None)
        }
        EnsembleKind::Normal => {
            let q = unitary_from_ginibre(n, &mut rng);
            let spectrum = sample_spectrum(domain, n, margin, &mut rng)?;
            (q, Some(spectrum))
        }
    };

    let base_op = match (&factors, kind) {
        (Some(spectrum), EnsembleKind::Normal) => {
            MatrixOperator::normal_from_spectrum(base.clone(), spectrum.clone())?
        }
        _ => MatrixOperator::from_matrix(base.clone())?,
    };

    // Clearance responds to a real shift algebraically: the probes and support
    // values of B + sI are those of B translated by s.
    let probes: Vec<Complex64> = numrange_boundary(&base_op, GEN_ANGLES)?;
    let support: Vec<(f64, f64)> = (0..GEN_ANGLES)
        .filter_map(|j| {
            let theta = 2.0 * PI * j as f64 / GEN_ANGLES as f64;
            domain.support_value(theta).map(|h_dom| {
                (theta, h_dom, base_op.support_value(theta))
            })
        })
        .map(|(theta, h_dom, h_w)| h_w.map(|h| (h - h_dom, theta)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|(gap, theta)| (theta, gap))
        .collect();

    let clearance = |s: f64| -> f64 {
        let mut m = f64::INFINITY;
        for &z in &probes {
            m = m.min(domain.signed_clearance(z + Complex64::new(s, 0.0)));
        }
        let mut viol = f64::NEG_INFINITY;
        for &(theta, gap) in &support {
            viol = viol.max(gap + s * theta.cos());
        }
        if viol > 0.0 {
            m = m.min(-viol);
        }
        m
    };

    let lo_target = margin;
    let hi_target = 2.0 * margin;
    let mut iterations = 0usize;
    let mut budget = || -> Result<()> {
        iterations += 1;
        if iterations > 200 {
            Err(Error::Generation(format!(
                "shift bisection exceeded 200 iterations for {} ensemble (n = {n}, seed = {seed})",
                kind.name()
            )))
        } else {
            Ok(())
        }
    };

    // Bracket the window [margin, 2 margin] in the shift variable.
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    let c0 = clearance(0.0);
    if c0 < lo_target {
        let mut step = margin.max(1.0);
        loop {
            budget()?;
            hi = lo + step;
            if clearance(hi) >= lo_target {
                break;
            }
            lo = hi;
            step *= 2.0;
        }
    } else if c0 > hi_target {
        let mut step = margin.max(1.0);
        loop {
            budget()?;
            lo = hi - step;
            if clearance(lo) <= hi_target {
                break;
            }
            hi = lo;
            step *= 2.0;
        }
    }
    // Bisect until the clearance lands in the window.
    let shift = if c0 >= lo_target && c0 <= hi_target {
        0.0
    } else {
        let mut shift;
        loop {
            budget()?;
            shift = 0.5 * (lo + hi);
            let c = clearance(shift);
            if c < lo_target {
                lo = shift;
            } else if c > hi_target {
                hi = shift;
            } else {
                break;
            }
        }
        shift
    };

    let shifted = &base + DMatrix::from_diagonal_element(n, n, Complex64::new(shift, 0.0));
    let op = match factors {
        Some(spectrum) => {
            let moved: Vec<Complex64> =
                spectrum.iter().map(|l| l + Complex64::new(shift, 0.0)).collect();
            MatrixOperator::normal_from_spectrum(base, moved)?
        }
        None => MatrixOperator::from_matrix(shifted)?,
    };
    let cert = certify_containment(&op, domain, GEN_ANGLES)?;
    if !cert.contained {
        return Err(Error::Generation(format!(
            "generated {} matrix failed final certification (margin {})",
            kind.name(),
            cert.margin
        )));
    }
    Ok(op)
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) / 2f64.sqrt()
    })
}

fn unitary_from_ginibre(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = ginibre(n, rng);
    let qr = g.qr();
    qr.q()
}

fn sample_spectrum(
    domain: &ConvexDomain,
    n: usize,
    margin: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Complex64>> {
    let mut spectrum = Vec::with_capacity(n);
    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..200 {
            let t: f64 = rng.random_range(-3.0..3.0);
            let depth: f64 = rng.random_range(1.3 * margin..(1.3 * margin + 2.0));
            let bp = domain.boundary_point(t);
            let candidate = bp.sigma + Complex64::i() * bp.unit_tangent() * depth;
            let clearance = domain.signed_clearance(candidate);
            if clearance >= 1.05 * margin && clearance <= 4.0 + 2.0 * margin {
                accepted = Some(candidate);
                break;
            }
        }
        spectrum.push(accepted.ok_or_else(|| {
            Error::Generation("could not sample an interior eigenvalue".into())
        })?);
    }
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn support_of_diagonal_matrix() {
        let a = MatrixOperator::from_rows(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)])
            .unwrap();
        assert_relative_eq!(a.support_value(0.0).unwrap(), 3.0, epsilon = 1e-12);
        // Singleton numerical range: support of {1} in direction i is Im(1) = 0.
        let one = MatrixOperator::from_rows(1, &[c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(one.support_value(std::f64::consts::FRAC_PI_2).unwrap(), 0.0);
    }

    #[test]
    fn support_of_jordan_cell_is_half() {
        // W([[0,1],[0,0]]) is the closed disk of radius 1/2; the Hermitian
        // part of e^{-i theta} A has eigenvalues +-1/2 for every theta.
        let a = MatrixOperator::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        for theta in [0.0, 0.3, 1.2, 3.0, 5.5] {
            assert_relative_eq!(a.support_value(theta).unwrap(), 0.5, epsilon = 1e-12);
        }
        for z in numrange_boundary(&a, 64).unwrap() {
            assert_relative_eq!(z.norm(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn boundary_of_normal_matrix_stays_in_hull() {
        let a = MatrixOperator::from_rows(2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        for z in numrange_boundary(&a, 8).unwrap() {
            assert!(z.im.abs() < 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&z.re));
        }
        let single = MatrixOperator::from_rows(1, &[c(1.0, 0.0)]).unwrap();
        for z in numrange_boundary(&single, 8).unwrap() {
            assert_relative_eq!(z.re, 1.0);
            assert_relative_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn half_plane_certificate_is_exact() {
        let dom = ConvexDomain::half_plane();
        let a = MatrixOperator::from_rows(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let cert = certify_containment(&a, &dom, 32).unwrap();
        assert!(cert.contained);
        assert_relative_eq!(cert.margin, 1.0, epsilon = 1e-12);

        let neg = MatrixOperator::from_rows(1, &[c(-1.0, 0.0)]).unwrap();
        let cert = certify_containment(&neg, &dom, 32).unwrap();
        assert!(!cert.contained);
        assert_relative_eq!(cert.margin, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn certificate_margin_matches_brute_force_disk_distance() {
        // W(2 I + 0.1 N) is the disk of radius 0.05 centred at 2.
        let dom = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let a = MatrixOperator::from_rows(2, &[c(2.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let cert = certify_containment(&a, &dom, 256).unwrap();
        assert!(cert.contained);
        // Dense minimization over disk boundary x hyperbola parameter.
        let mut brute = f64::INFINITY;
        for i in 0..2000 {
            let phi = 2.0 * PI * i as f64 / 2000.0;
            let z = c(2.0 + 0.05 * phi.cos(), 0.05 * phi.sin());
            brute = brute.min(dom.boundary_distance(z));
        }
        assert_relative_eq!(cert.margin, brute, epsilon = 1e-6);
    }

    #[test]
    fn generator_respects_margin_window() {
        let dom = ConvexDomain::half_plane();
        let a = random_matrix_in_domain(&dom, 1, 1.0, 7).unwrap();
        assert!(a.entries()[(0, 0)].re >= 1.0);

        let hy = ConvexDomain::hyperbola(1.0, 1.0).unwrap();
        let a = random_matrix_in_domain(&hy, 8, 0.1, 1).unwrap();
        let cert = certify_containment(&a, &hy, 256).unwrap();
        assert!(cert.margin >= 0.1 - 1e-9 && cert.margin <= 0.2 + 1e-9, "margin {}", cert.margin);
    }

    #[test]
    fn normal_ensemble_has_interior_spectrum() {
        let pa = ConvexDomain::parabola(1.0).unwrap();
        let a = random_matrix_ensemble(&pa, EnsembleKind::Normal, 4, 0.1, 3).unwrap();
        let factors = a.normal_factors().expect("normal ensemble keeps factors");
        for lambda in &factors.spectrum {
            assert!(pa.contains(*lambda, 0.1), "eigenvalue {lambda} too close to the boundary");
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let hy = ConvexDomain::hyperbola(1.0, 0.5).unwrap();
        let a = random_matrix_ensemble(&hy, EnsembleKind::Jordan, 6, 0.2, 11).unwrap();
        let b = random_matrix_ensemble(&hy, EnsembleKind::Jordan, 6, 0.2, 11).unwrap();
        assert_eq!(a.entries().as_slice().len(), b.entries().as_slice().len());
        for (x, y) in a.entries().iter().zip(b.entries().iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn eigenvalues_meet_residual_invariant() {
        let a = MatrixOperator::from_rows(
            3,
            &[
                c(1.0, 0.2), c(0.3, 0.0), c(0.0, 0.1),
                c(0.0, 0.0), c(2.0, -0.5), c(0.4, 0.0),
                c(0.1, 0.0), c(0.0, 0.0), c(3.0, 0.0),
            ],
        )
        .unwrap();
        let scale = a.norm2();
        for (lambda, v) in a.eigenpairs().unwrap() {
            let residual = (a.entries() * &v - &v * lambda).norm();
            assert!(residual <= EIGEN_TOL * scale);
        }
    }
}
