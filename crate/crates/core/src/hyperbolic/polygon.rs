use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{GeodesicSegment, Isometry, UhpPoint};
use crate::error::{Error, Result};

/// A compact convex geodesic polygon. Sides run counterclockwise, so the
/// interior lies on the left of every side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub sides: Vec<GeodesicSegment>,
}

impl ConvexPolygon {
    /// Walks a closed polygon: start at frame `start`, traverse each side
    /// length, then turn left by the matching exterior angle.
    pub fn from_turtle(start: Isometry, lengths: &[f64], exterior_angles: &[f64]) -> Result<Self> {
        if lengths.len() != exterior_angles.len() || lengths.len() < 3 {
            return Err(Error::Geometry("polygon needs matching side and angle lists".into()));
        }
        let mut frame = start;
        let mut sides = Vec::with_capacity(lengths.len());
        for (&len, &turn) in lengths.iter().zip(exterior_angles) {
            sides.push(GeodesicSegment { frame, length: len });
            frame = frame * Isometry::translation(len) * Isometry::rotation(turn);
        }
        if !frame.approx_eq(&start, 1e-9 * (1.0 + frame.a.abs().max(frame.d.abs()))) {
            return Err(Error::Geometry("polygon does not close".into()));
        }
        Ok(Self { sides })
    }

    pub fn vertices(&self) -> Vec<UhpPoint> {
        self.sides.iter().map(GeodesicSegment::start).collect()
    }

    /// Interior angle at the start of each side, measured from the frames.
    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.sides.len();
        (0..n)
            .map(|k| {
                let prev = &self.sides[(k + n - 1) % n];
                let arrive = prev.frame_at(prev.length);
                let turn = (arrive.inverse() * self.sides[k].frame).rotation_angle();
                PI - turn
            })
            .collect()
    }

    /// Hyperbolic area by Gauss-Bonnet: `(n − 2)π − Σ interior angles`.
    pub fn area(&self) -> f64 {
        let n = self.sides.len() as f64;
        (n - 2.0) * PI - self.interior_angles().iter().sum::<f64>()
    }

    /// Closed containment test with signed-distance slack `tol`.
    pub fn contains(&self, p: UhpPoint, tol: f64) -> bool {
        self.sides.iter().all(|s| s.signed_distance(p) >= -tol)
    }

    /// Barycenter of the vertices in the hyperboloid model.
    pub fn center(&self) -> UhpPoint {
        let mut acc = [0.0f64; 3];
        for v in self.vertices() {
            let h = to_hyperboloid(v);
            for k in 0..3 {
                acc[k] += h[k];
            }
        }
        let norm = (acc[0] * acc[0] - acc[1] * acc[1] - acc[2] * acc[2]).sqrt();
        from_hyperboloid([acc[0] / norm, acc[1] / norm, acc[2] / norm])
    }

    /// Distance from [`Self::center`] to the farthest vertex.
    pub fn circumradius(&self) -> f64 {
        let c = self.center();
        self.vertices().iter().map(|v| c.distance(v)).fold(0.0, f64::max)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let vs = self.vertices();
        let mut best = 0.0f64;
        for (i, p) in vs.iter().enumerate() {
            for q in &vs[i + 1..] {
                best = best.max(p.distance(q));
            }
        }
        best
    }
}

fn to_hyperboloid(p: UhpPoint) -> [f64; 3] {
    // Upper half-plane -> disk -> hyperboloid.
    let den = p.x * p.x + (p.y + 1.0) * (p.y + 1.0);
    let wx = (p.x * p.x + p.y * p.y - 1.0) / den;
    let wy = -2.0 * p.x / den;
    let r2 = wx * wx + wy * wy;
    let s = 1.0 - r2;
    [(1.0 + r2) / s, 2.0 * wx / s, 2.0 * wy / s]
}

fn from_hyperboloid(h: [f64; 3]) -> UhpPoint {
    let wx = h[1] / (1.0 + h[0]);
    let wy = h[2] / (1.0 + h[0]);
    // Inverse of w = (z − i)/(z + i) is z = i(1 + w)/(1 − w).
    let den = (1.0 - wx) * (1.0 - wx) + wy * wy;
    let x = -2.0 * wy / den;
    let y = (1.0 - wx * wx - wy * wy) / den;
    UhpPoint { x, y }
}

/// Right-angled hexagon with alternate sides `a = [a1, a2, a3]`; `b[k]` is
/// the side opposite `a[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RightAngledHexagon {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl RightAngledHexagon {
    pub fn new(a: [f64; 3]) -> Result<Self> {
        if let Some(&bad) = a.iter().find(|&&x| !(x > 0.0)) {
            return Err(Error::NonPositiveLength(bad));
        }
        let mut b = [0.0; 3];
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let cosh_b = (a[i].cosh() * a[j].cosh() + a[k].cosh()) / (a[i].sinh() * a[j].sinh());
            b[k] = cosh_b.acosh();
        }
        Ok(Self { a, b })
    }

    /// Side lengths in counterclockwise order `a1, b3, a2, b1, a3, b2`.
    pub fn cyclic_sides(&self) -> [f64; 6] {
        let [a1, a2, a3] = self.a;
        let [b1, b2, b3] = self.b;
        [a1, b3, a2, b1, a3, b2]
    }

    /// The hexagon placed with its first side starting at `i`, pointing up.
    pub fn polygon(&self) -> Result<ConvexPolygon> {
        ConvexPolygon::from_turtle(Isometry::IDENTITY, &self.cyclic_sides(), &[0.5 * PI; 6])
    }

    /// The mirror image, counterclockwise order `a1, b2, a3, b1, a2, b3`.
    pub fn mirror_polygon(&self) -> Result<ConvexPolygon> {
        let [a1, a2, a3] = self.a;
        let [b1, b2, b3] = self.b;
        ConvexPolygon::from_turtle(Isometry::IDENTITY, &[a1, b2, a3, b1, a2, b3], &[0.5 * PI; 6])
    }
}
