//! Unbounded smooth convex domains in canonical position.
//!
//! Every domain contains the sector of half-angle `alpha` around the positive
//! real axis and is contained in the open right half-plane (the half-plane
//! itself being the degenerate `alpha = pi/2` case). The boundary carries the
//! counterclockwise orientation, i.e. the interior lies on the left of the
//! direction of travel.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::numerics::golden_min;

/// Shape family of a canonical domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// The open right half-plane `{ Re z > 0 }`.
    HalfPlane,
    /// Right branch interior `{ x + iy : x > a sqrt(1 + y^2/b^2) }`.
    Hyperbola { a: f64, b: f64 },
    /// Parabola interior `{ x + iy : x > y^2 / (4 p) }`.
    Parabola { p: f64 },
}

impl DomainKind {
    pub fn name(&self) -> &'static str {
        match self {
            DomainKind::HalfPlane => "halfplane",
            DomainKind::Hyperbola { .. } => "hyperbola",
            DomainKind::Parabola { .. } => "parabola",
        }
    }
}

/// A point of the boundary curve together with its velocity.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    /// Curve parameter (not arclength).
    pub param: f64,
    /// The boundary point `sigma(t)`.
    pub sigma: Complex64,
    /// Velocity `d sigma / dt`, never zero.
    pub dsigma: Complex64,
    /// `|dsigma|`.
    pub speed: f64,
}

impl BoundaryPoint {
    /// Unit tangent in the direction of increasing parameter.
    pub fn unit_tangent(&self) -> Complex64 {
        self.dsigma / self.speed
    }
}

/// An unbounded smooth convex domain in canonical position.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    kind: DomainKind,
    alpha: f64,
    /// Sign multiplying the imaginary component of the parameterization,
    /// fixed at construction so the interior lies on the left.
    orient: f64,
}

impl ConvexDomain {
    pub fn half_plane() -> Self {
        Self::build(DomainKind::HalfPlane, FRAC_PI_2)
    }

    pub fn hyperbola(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidInput(format!(
                "hyperbola needs a > 0, b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self::build(DomainKind::Hyperbola { a, b }, (b / a).atan()))
    }

    pub fn parabola(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidInput(format!("parabola needs p > 0, got {p}")));
        }
        Ok(Self::build(DomainKind::Parabola { p }, 0.0))
    }

    /// Smooth stand-in for the sharp sector of half-angle `alpha`:
    /// a hyperbola with vertex abscissa 1e-3 and asymptote slope `tan alpha`.
    pub fn sector_approx(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "sector-approx needs alpha in (0, pi/2), got {alpha}"
            )));
        }
        let a = 1e-3;
        Self::hyperbola(a, a * alpha.tan())
    }

    fn build(kind: DomainKind, alpha: f64) -> Self {
        let mut dom = ConvexDomain { kind, alpha, orient: -1.0 };
        if !dom.interior_on_left() {
            dom.orient = 1.0;
            debug_assert!(dom.interior_on_left(), "no orientation keeps the domain on the left");
        }
        dom
    }

    /// Counterclockwise check: nudging a boundary point along `i * tangent`
    /// must land inside the domain.
    fn interior_on_left(&self) -> bool {
        [-1.3, 0.0, 0.7].iter().all(|&t| {
            let bp = self.boundary_point(t);
            let eps = 1e-7 * (1.0 + bp.sigma.norm());
            let probe = bp.sigma + Complex64::i() * bp.unit_tangent() * eps;
            self.contains_open(probe)
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// Half-angle of the widest sector contained in the domain.
    pub fn aperture(&self) -> f64 {
        self.alpha
    }

    /// Boundary parameterization `sigma(t)` with velocity.
    pub fn boundary_point(&self, t: f64) -> BoundaryPoint {
        let s = self.orient;
        let (sigma, dsigma) = match self.kind {
            DomainKind::HalfPlane => (
                Complex64::new(0.0, s * t),
                Complex64::new(0.0, s),
            ),
            DomainKind::Hyperbola { a, b } => (
                Complex64::new(a * t.cosh(), s * b * t.sinh()),
                Complex64::new(a * t.sinh(), s * b * t.cosh()),
            ),
            DomainKind::Parabola { p } => (
                Complex64::new(t * t / (4.0 * p), s * t),
                Complex64::new(t / (2.0 * p), s),
            ),
        };
        BoundaryPoint { param: t, sigma, dsigma, speed: dsigma.norm() }
    }

    /// Second derivative of the parameterization.
    pub fn boundary_accel(&self, t: f64) -> Complex64 {
        let s = self.orient;
        match self.kind {
            DomainKind::HalfPlane => Complex64::new(0.0, 0.0),
            DomainKind::Hyperbola { a, b } => Complex64::new(a * t.cosh(), s * b * t.sinh()),
            DomainKind::Parabola { p } => Complex64::new(1.0 / (2.0 * p), 0.0),
        }
    }

    /// Signed curvature; nonnegative for the counterclockwise orientation.
    pub fn curvature(&self, t: f64) -> f64 {
        let bp = self.boundary_point(t);
        let acc = self.boundary_accel(t);
        (bp.dsigma.conj() * acc).im / bp.speed.powi(3)
    }

    /// Open-set membership via the defining inequality.
    pub fn contains_open(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match self.kind {
            DomainKind::HalfPlane => z.re > 0.0,
            DomainKind::Hyperbola { a, b } => {
                z.re > a * (1.0 + (z.im / b) * (z.im / b)).sqrt()
            }
            DomainKind::Parabola { p } => z.re > z.im * z.im / (4.0 * p),
        }
    }

    /// Membership with Euclidean clearance at least `margin`.
    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        if !self.contains_open(z) {
            return false;
        }
        if margin <= 0.0 {
            return true;
        }
        self.boundary_distance(z) >= margin
    }

    /// Closed-set membership up to a relative tolerance for points that sit
    /// numerically on the boundary.
    pub fn contains_closed(&self, z: Complex64) -> bool {
        self.contains_open(z) || self.boundary_distance(z) <= 1e-9 * (1.0 + z.norm())
    }

    /// Euclidean distance from `z` to the boundary curve.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        self.nearest_boundary(z).1
    }

    /// Clearance with sign: positive inside the open domain, negative outside.
    pub fn signed_clearance(&self, z: Complex64) -> f64 {
        let d = self.boundary_distance(z);
        if self.contains_open(z) {
            d
        } else {
            -d
        }
    }

    /// Parameter of the boundary point nearest to `z`.
    pub fn nearest_boundary_param(&self, z: Complex64) -> f64 {
        self.nearest_boundary(z).0
    }

    fn nearest_boundary(&self, z: Complex64) -> (f64, f64) {
        if let DomainKind::HalfPlane = self.kind {
            // sigma(t) = orient * i t, so the foot of the perpendicular is exact.
            return (self.orient * z.im, z.re.abs());
        }
        let dist = |t: f64| (z - self.boundary_point(t).sigma).norm();
        // Parameter range wide enough that the projection is interior to it.
        let reach = match self.kind {
            DomainKind::Hyperbola { a, b } => ((z.norm() + 4.0 * (a + b + 1.0)) / b).asinh(),
            DomainKind::Parabola { p } => z.norm() + z.im.abs() + 4.0 * (p + 1.0),
            DomainKind::HalfPlane => unreachable!(),
        };
        let n = 64;
        let mut best = (0.0_f64, f64::INFINITY);
        let mut vals = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = -reach + 2.0 * reach * (i as f64) / (n as f64);
            vals.push((t, dist(t)));
        }
        for i in 0..=n {
            let here = vals[i];
            let is_min = (i == 0 || vals[i - 1].1 >= here.1) && (i == n || vals[i + 1].1 >= here.1);
            if !is_min {
                continue;
            }
            let lo = if i == 0 { vals[0].0 - reach / n as f64 } else { vals[i - 1].0 };
            let hi = if i == n { vals[n].0 + reach / n as f64 } else { vals[i + 1].0 };
            let (t, d) = golden_min(lo, hi, 1e-13, dist);
            if d < best.1 {
                best = (t, d);
            }
        }
        best
    }

    /// Support function `h(theta) = sup { Re(e^{-i theta} z) : z in domain }`,
    /// `None` where the supremum is infinite.
    pub fn support_value(&self, theta: f64) -> Option<f64> {
        let c = theta.cos();
        let s = theta.sin();
        match self.kind {
            DomainKind::HalfPlane => {
                if c < 0.0 && s.abs() < 1e-12 {
                    Some(0.0)
                } else {
                    None
                }
            }
            DomainKind::Hyperbola { a, b } => {
                let discr = a * a * c * c - b * b * s * s;
                if c < 0.0 && discr > 0.0 {
                    Some(-discr.sqrt())
                } else {
                    None
                }
            }
            DomainKind::Parabola { p } => {
                if c < 0.0 {
                    Some(p * s * s / (-c))
                } else {
                    None
                }
            }
        }
    }

    /// Unit directions the two boundary ends approach at infinity,
    /// `(plus側, minus側)` for `t -> +inf` and `t -> -inf`.
    fn asymptote_directions(&self) -> (Complex64, Complex64) {
        let s = self.orient;
        match self.kind {
            DomainKind::HalfPlane => (Complex64::new(0.0, s), Complex64::new(0.0, -s)),
            DomainKind::Hyperbola { a, b } => {
                let r = (a * a + b * b).sqrt();
                (
                    Complex64::new(a / r, s * b / r),
                    Complex64::new(a / r, -s * b / r),
                )
            }
            DomainKind::Parabola { .. } => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        }
    }

    fn far_param(&self, z: Complex64, m: f64) -> f64 {
        match self.kind {
            DomainKind::HalfPlane => 2.0 * m + 8.0 * (1.0 + z.norm()),
            DomainKind::Hyperbola { a, b } => {
                let scale = (4e3 * (z.norm() + a + b + 1.0) / a.min(b)).ln();
                (m + 5.0).max(scale)
            }
            DomainKind::Parabola { p } => {
                let c = (8.0 * p * (z.norm() + 2.0)).sqrt() + 4.0 * (p + 1.0) + 2.0 * z.norm();
                (2.0 * m + 10.0).max(c)
            }
        }
    }

    /// Continuously tracked rotation of `arg(sigma(t) - z)` from `t0` to `t1`.
    ///
    /// Steps grow geometrically with |t| and are bisected until each principal
    /// increment is small, which resolves the branch without global unwinding.
    fn track_rotation(&self, z: Complex64, t0: f64, t1: f64) -> f64 {
        if t0 == t1 {
            return 0.0;
        }
        let dir = (t1 - t0).signum();
        let mut cur = t0;
        let mut u_cur = self.boundary_point(cur).sigma - z;
        let mut total = 0.0;
        let mut guard = 0usize;
        while (t1 - cur) * dir > 0.0 {
            guard += 1;
            if guard > 100_000 {
                // Pathological geometry; the accumulated value is still a
                // valid lower bound on the rotation.
                break;
            }
            let mut step = dir * (0.25 + 0.125 * cur.abs());
            if (cur + step - t1) * dir > 0.0 {
                step = t1 - cur;
            }
            let mut next = cur + step;
            let mut u_next = self.boundary_point(next).sigma - z;
            let mut delta = (u_next / u_cur).arg();
            let mut halvings = 0;
            while delta.abs() > 0.5 && halvings < 60 {
                step *= 0.5;
                next = cur + step;
                u_next = self.boundary_point(next).sigma - z;
                delta = (u_next / u_cur).arg();
                halvings += 1;
            }
            total += delta;
            cur = next;
            u_cur = u_next;
        }
        total
    }

    /// Upper bound on the tail mass `integral of mu(sigma(s), z)` over
    /// parameters outside `[-m, m]`, from the rotation deficit of the chord
    /// direction relative to the asymptote directions.
    pub fn arg_tail_bound(&self, z: Complex64, m: f64) -> Result<f64> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidInput(format!("tail bound needs m > 0, got {m}")));
        }
        if !self.contains_closed(z) {
            return Err(Error::Domain(format!(
                "tail bound point {z} lies outside the closed domain"
            )));
        }
        let (asym_plus, asym_minus) = self.asymptote_directions();
        let on_boundary = !self.contains_open(z) || self.boundary_distance(z) <= 1e-11 * (1.0 + z.norm());
        let t_near = if on_boundary { self.nearest_boundary_param(z) } else { 0.0 };

        let tf = self.far_param(z, m);
        let unit_chord = |t: f64| {
            let u = self.boundary_point(t).sigma - z;
            u / u.norm()
        };

        // Plus side: rotation still to come after parameter m.
        let mut plus = if on_boundary && t_near > m {
            let eps = (1e-9 * (1.0 + t_near.abs())).max(1e-12);
            self.track_rotation(z, m, t_near - eps) + self.track_rotation(z, t_near + eps, tf)
        } else {
            self.track_rotation(z, m, tf)
        };
        plus += (asym_plus / unit_chord(tf)).arg();

        // Minus side: rotation accumulated before parameter -m.
        let mut minus = if on_boundary && t_near < -m {
            let eps = (1e-9 * (1.0 + t_near.abs())).max(1e-12);
            self.track_rotation(z, -tf, t_near - eps) + self.track_rotation(z, t_near + eps, -m)
        } else {
            self.track_rotation(z, -tf, -m)
        };
        minus += (unit_chord(-tf) / asym_minus).arg();

        Ok(((plus + minus) / PI).max(0.0))
    }
}
