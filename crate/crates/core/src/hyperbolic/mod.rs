//! Exact-formula layer for the hyperbolic plane in the upper half-plane model.
//!
//! Unit tangent vectors are represented by orientation-preserving isometries
//! ("frames"): the frame `g` stands for the point `g(i)` together with the
//! image of the upward unit vector at `i`. With this convention the geodesic
//! flow for time `t` is right multiplication by [`Isometry::translation`] and
//! turning by an angle is right multiplication by [`Isometry::rotation`].

mod growth;
mod polygon;
mod sheet;

pub use growth::{ball_volume_h3, circle_circumference_h2, sphere_area_h3};
pub use polygon::{ConvexPolygon, RightAngledHexagon};
pub use sheet::{
    build_one_holed_torus, build_pair_of_pants, crossing_isometry, sheet_area, symmetric_torus_trace, Cuff,
    CuffArc, FuchsianSheetRealization, SheetKind, SidePairing, SideRole, Tile,
};

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contractual numerical tolerances. Every field can be overridden.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Renormalize a composed matrix once `|det - 1|` exceeds this.
    pub determinant: f64,
    /// Agreement between declared and realized boundary lengths.
    pub boundary_length: f64,
    /// Gauss-Bonnet agreement of fundamental-domain areas.
    pub area: f64,
    /// Angular tolerance below which an incidence counts as tangential.
    pub tangential: f64,
    /// Relative tolerance of the switch condition and degree comparisons.
    pub degree: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            determinant: 1e-12,
            boundary_length: 1e-9,
            area: 1e-6,
            tangential: 1e-9,
            degree: 1e-9,
        }
    }
}

/// A point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UhpPoint {
    pub x: f64,
    pub y: f64,
}

impl UhpPoint {
    pub const I: UhpPoint = UhpPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if y > 0.0 && x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::OffPlane(y))
        }
    }

    pub fn distance(&self, other: &UhpPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * self.y * other.y);
        arg.max(1.0).acosh()
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// A point of the ideal boundary `R ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IdealPoint {
    Finite(f64),
    Infinity,
}

impl IdealPoint {
    fn from_ratio(num: f64, den: f64) -> Self {
        if den == 0.0 || (num / den).abs() > 1e15 {
            IdealPoint::Infinity
        } else {
            IdealPoint::Finite(num / den)
        }
    }
}

/// An element of PSL(2,R), stored as a unit-determinant matrix up to sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds an isometry from any matrix with positive determinant,
    /// scaling it to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Degenerate(det));
        }
        let s = det.sqrt().recip();
        Ok(Self {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    /// Hyperbolic translation along the imaginary axis by `t` (upward for `t > 0`).
    pub fn translation(t: f64) -> Self {
        let h = 0.5 * t;
        Self {
            a: h.exp(),
            b: 0.0,
            c: 0.0,
            d: (-h).exp(),
        }
    }

    /// Counterclockwise rotation by `theta` about `i`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self {
            a: c,
            b: s,
            c: -s,
            d: c,
        }
    }

    /// The frame based at `p` whose direction makes angle `angle` with the
    /// positive real direction.
    pub fn frame_at(p: UhpPoint, angle: f64) -> Self {
        let r = p.y.sqrt();
        let lift = Self {
            a: r,
            b: p.x / r,
            c: 0.0,
            d: r.recip(),
        };
        lift * Self::rotation(angle - 0.5 * PI)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Translation length `2 arccosh(|tr|/2)`; `None` unless hyperbolic.
    pub fn translation_length(&self) -> Option<f64> {
        let t = self.trace().abs();
        (t > 2.0).then(|| 2.0 * (0.5 * t).acosh())
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`, renormalized when the determinant has drifted.
    pub fn compose(&self, other: &Isometry) -> Self {
        let m = Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        m.renormalized(Tolerances::default().determinant)
    }

    pub fn renormalized(self, threshold: f64) -> Self {
        let det = self.det();
        if (det - 1.0).abs() > threshold && det > 0.0 {
            let s = det.sqrt().recip();
            Self {
                a: self.a * s,
                b: self.b * s,
                c: self.c * s,
                d: self.d * s,
            }
        } else {
            self
        }
    }

    pub fn apply(&self, p: UhpPoint) -> UhpPoint {
        let z = p.to_complex();
        let w = (self.a * z + self.b) / (self.c * z + self.d);
        // The imaginary part is exactly y / |cz + d|^2; use it directly so that
        // points never leave the half-plane through rounding.
        let den = (self.c * z + self.d).norm_sqr();
        UhpPoint {
            x: w.re,
            y: p.y * self.det() / den,
        }
    }

    pub fn apply_ideal(&self, p: IdealPoint) -> IdealPoint {
        match p {
            IdealPoint::Infinity => IdealPoint::from_ratio(self.a, self.c),
            IdealPoint::Finite(x) => IdealPoint::from_ratio(self.a * x + self.b, self.c * x + self.d),
        }
    }

    /// Base point of the frame.
    pub fn base_point(&self) -> UhpPoint {
        self.apply(UhpPoint::I)
    }

    /// Direction of the frame, measured from the positive real direction.
    pub fn direction_angle(&self) -> f64 {
        let arg = Complex64::new(self.d, self.c).arg();
        (0.5 * PI - 2.0 * arg).rem_euclid(2.0 * PI)
    }

    /// If `self` is a rotation about `i`, its angle in `(-π, π]`.
    pub fn rotation_angle(&self) -> f64 {
        let theta = 2.0 * self.b.atan2(self.a);
        wrap_angle(theta)
    }

    /// Equality in PSL(2,R): entrywise within `tol` up to overall sign.
    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        let same = (self.a - other.a).abs() <= tol
            && (self.b - other.b).abs() <= tol
            && (self.c - other.c).abs() <= tol
            && (self.d - other.d).abs() <= tol;
        let flipped = (self.a + other.a).abs() <= tol
            && (self.b + other.b).abs() <= tol
            && (self.c + other.c).abs() <= tol
            && (self.d + other.d).abs() <= tol;
        same || flipped
    }

    /// Commutator `self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Isometry) -> Self {
        *self * *other * self.inverse() * other.inverse()
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

/// An oriented geodesic through `base` leaving at `angle` (radians from the
/// positive real direction).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectedGeodesic {
    pub base: UhpPoint,
    pub angle: f64,
}

impl DirectedGeodesic {
    pub fn new(base: UhpPoint, angle: f64) -> Self {
        Self {
            base,
            angle: angle.rem_euclid(2.0 * PI),
        }
    }

    pub fn frame(&self) -> Isometry {
        Isometry::frame_at(self.base, self.angle)
    }

    /// Backward and forward ideal endpoints.
    pub fn endpoints(&self) -> (IdealPoint, IdealPoint) {
        let g = self.frame();
        (
            g.apply_ideal(IdealPoint::Finite(0.0)),
            g.apply_ideal(IdealPoint::Infinity),
        )
    }

    /// Signed arclength of `base` measured from the point of the geodesic
    /// closest to `i` in the standard frame of [`Self::from_endpoints`].
    pub fn arclength_parameter(&self) -> Result<f64> {
        let (back, fwd) = self.endpoints();
        let std = endpoint_frame(back, fwd)?;
        Ok(std.inverse().apply(self.base).y.ln())
    }

    /// The geodesic from `back` to `fwd`, based at arclength `s` from the
    /// standard point of that geodesic.
    pub fn from_endpoints(back: IdealPoint, fwd: IdealPoint, s: f64) -> Result<Self> {
        let g = endpoint_frame(back, fwd)? * Isometry::translation(s);
        Ok(Self::new(g.base_point(), g.direction_angle()))
    }
}

/// A frame whose upward ray runs from `back` to `fwd`.
fn endpoint_frame(back: IdealPoint, fwd: IdealPoint) -> Result<Isometry> {
    match (back, fwd) {
        (IdealPoint::Finite(u), IdealPoint::Finite(v)) => {
            if (u - v).abs() < f64::EPSILON {
                Err(Error::Geometry("coincident endpoints".into()))
            } else if v > u {
                Isometry::new(v, u, 1.0, 1.0)
            } else {
                Isometry::new(-v, u, -1.0, 1.0)
            }
        }
        (IdealPoint::Finite(u), IdealPoint::Infinity) => Isometry::new(1.0, u, 0.0, 1.0),
        (IdealPoint::Infinity, IdealPoint::Finite(v)) => Isometry::new(v, -1.0, 1.0, 0.0),
        (IdealPoint::Infinity, IdealPoint::Infinity) => {
            Err(Error::Geometry("coincident endpoints".into()))
        }
    }
}

/// The geodesic segment `s ↦ frame(i·e^s)` for `s ∈ [0, length]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub frame: Isometry,
    pub length: f64,
}

impl GeodesicSegment {
    /// Frame at arclength `s` pointing along the segment.
    pub fn frame_at(&self, s: f64) -> Isometry {
        self.frame * Isometry::translation(s)
    }

    pub fn point_at(&self, s: f64) -> UhpPoint {
        self.frame_at(s).base_point()
    }

    pub fn start(&self) -> UhpPoint {
        self.frame.base_point()
    }

    pub fn end(&self) -> UhpPoint {
        self.point_at(self.length)
    }

    /// Signed distance from `p` to the supporting geodesic; positive on the
    /// left of the direction of travel.
    pub fn signed_distance(&self, p: UhpPoint) -> f64 {
        let q = self.frame.inverse().apply(p);
        // Distance to the imaginary axis is asinh(|x|/y).
        (-q.x / q.y).asinh()
    }
}

/// First intersection of the forward ray of `ray` with the segment.
///
/// Returns `(t, s)`: the distance travelled along the ray and the arclength
/// along the segment. Endpoints are accepted within `slack`.
pub fn ray_hit(ray: &Isometry, seg: &GeodesicSegment, slack: f64) -> Option<(f64, f64)> {
    let k = ray.inverse() * seg.frame;
    // Endpoints of the segment's geodesic as seen from the ray's frame.
    let (u, v) = match (
        k.apply_ideal(IdealPoint::Finite(0.0)),
        k.apply_ideal(IdealPoint::Infinity),
    ) {
        (IdealPoint::Finite(u), IdealPoint::Finite(v)) => (u, v),
        _ => return None,
    };
    if u * v >= 0.0 {
        return None;
    }
    let y = (-u * v).sqrt();
    let t = y.ln();
    let s = k.inverse().apply(UhpPoint { x: 0.0, y }).y.ln();
    if s < -slack || s > seg.length + slack {
        return None;
    }
    Some((t, s.clamp(0.0, seg.length)))
}
