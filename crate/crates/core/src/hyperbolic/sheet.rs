//! Explicit Fuchsian realizations of the sheet types the simulator supports.
//!
//! Both sheet types are cut into two right-angled hexagons: a pair of pants
//! with cuffs `l1, l2, l3` is the double of the hexagon with alternate sides
//! `l1/2, l2/2, l3/2`, and the one-holed torus is a pants `(c, c, L)` with
//! its two `c`-cuffs glued. Each hexagon keeps its own coordinates; gluings
//! are recorded combinatorially and turned into isometries on demand.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ConvexPolygon, GeodesicSegment, Isometry, RightAngledHexagon};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SheetKind {
    OneHoledTorus,
    PairOfPants,
}

/// What lies across one side of a tile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SideRole {
    /// The whole side is glued to `side` of `tile`, traversed the other way.
    Seam { tile: usize, side: usize },
    /// The side is the arc `[offset, offset + length)` of a cuff circle.
    Cuff { cuff: usize, offset: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub polygon: ConvexPolygon,
    pub roles: Vec<SideRole>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuffArc {
    pub tile: usize,
    pub side: usize,
    pub offset: f64,
    pub length: f64,
}

/// A closed geodesic made of tile sides, oriented with the sheet on its left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cuff {
    pub length: f64,
    pub arcs: Vec<CuffArc>,
    /// `Some((partner, twist))` when glued inside the sheet by
    /// `σ ↦ twist − σ`; `None` for a boundary component of the sheet.
    pub gluing: Option<(usize, f64)>,
}

impl Cuff {
    /// The arc containing circle parameter `sigma` and the arclength along it.
    pub fn locate(&self, sigma: f64) -> (CuffArc, f64) {
        let sigma = sigma.rem_euclid(self.length);
        for arc in &self.arcs {
            if sigma < arc.offset + arc.length {
                return (*arc, (sigma - arc.offset).clamp(0.0, arc.length));
            }
        }
        let last = *self.arcs.last().expect("cuff has arcs");
        (last, last.length)
    }
}

/// A whole-side identification between two tiles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidePairing {
    pub from: (usize, usize),
    pub to: (usize, usize),
    /// Carries coordinates of `from`'s tile to those of `to`'s tile.
    pub isometry: Isometry,
}

/// A discrete isometry group and tiled fundamental domain for one sheet.
///
/// Group elements are expressed in the coordinates of tile 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuchsianSheetRealization {
    pub sheet_id: String,
    pub kind: SheetKind,
    pub generators: Vec<Isometry>,
    /// One hyperbolic element per boundary component.
    pub boundary_axes: Vec<Isometry>,
    pub boundary_lengths: Vec<f64>,
    pub tiles: Vec<Tile>,
    pub cuffs: Vec<Cuff>,
    /// Cuff index of each boundary component, in end order.
    pub boundary_cuffs: Vec<usize>,
}

/// The isometry gluing a point of `src` (at arclength `s`) to the point of
/// `dst` at arclength `s_dst`, sides traversed in opposite directions.
pub fn crossing_isometry(src: &GeodesicSegment, s: f64, dst: &GeodesicSegment, s_dst: f64) -> Isometry {
    dst.frame_at(s_dst) * Isometry::rotation(PI) * src.frame_at(s).inverse()
}

impl FuchsianSheetRealization {
    pub fn area(&self) -> f64 {
        self.tiles.iter().map(|t| t.polygon.area()).sum()
    }

    pub fn side(&self, tile: usize, side: usize) -> &GeodesicSegment {
        &self.tiles[tile].polygon.sides[side]
    }

    /// Translation lengths of the boundary elements.
    pub fn realized_boundary_lengths(&self) -> Vec<f64> {
        self.boundary_axes
            .iter()
            .map(|g| g.translation_length().unwrap_or(0.0))
            .collect()
    }

    /// Whole-side identifications along seams.
    pub fn side_pairings(&self) -> Vec<SidePairing> {
        let mut out = Vec::new();
        for (t, tile) in self.tiles.iter().enumerate() {
            for (k, role) in tile.roles.iter().enumerate() {
                if let SideRole::Seam { tile: t2, side: k2 } = *role {
                    let src = self.side(t, k);
                    let dst = self.side(t2, k2);
                    out.push(SidePairing {
                        from: (t, k),
                        to: (t2, k2),
                        isometry: crossing_isometry(src, 0.0, dst, dst.length),
                    });
                }
            }
        }
        out
    }

    fn seam_isometry(&self, tile: usize, side: usize) -> Result<Isometry> {
        match self.tiles[tile].roles[side] {
            SideRole::Seam { tile: t2, side: k2 } => {
                let dst = self.side(t2, k2);
                Ok(crossing_isometry(self.side(tile, side), 0.0, dst, dst.length))
            }
            SideRole::Cuff { .. } => Err(Error::Geometry("side is not a seam".into())),
        }
    }

    /// Deck transformation of the loop leaving tile 0 through `out_side`
    /// into tile 1 and returning through tile 1's `back_side`.
    fn two_tile_loop(&self, out_side: usize, back_side: usize) -> Result<Isometry> {
        let g1 = self.seam_isometry(0, out_side)?;
        let g2 = self.seam_isometry(1, back_side)?;
        Ok((g2 * g1).inverse())
    }
}

/// Gauss-Bonnet area `2π(2g − 2 + b)` of a hyperbolic surface.
pub fn sheet_area(genus: u32, boundary_count: u32) -> Result<f64> {
    let euler = 2 - 2 * genus as i64 - boundary_count as i64;
    if euler >= 0 {
        return Err(Error::NotHyperbolic {
            genus,
            boundary: boundary_count,
        });
    }
    Ok(-2.0 * PI * euler as f64)
}

/// The common trace `t > 3` of `A`, `B`, `AB` for the one-holed torus with
/// boundary length `l`, the root of `t³ − 3t² + 2 = 2 cosh(l/2)`.
pub fn symmetric_torus_trace(boundary_length: f64) -> Result<f64> {
    if !(boundary_length > 0.0) {
        return Err(Error::NonPositiveLength(boundary_length));
    }
    let k = 2.0 * (0.5 * boundary_length).cosh();
    let f = |t: f64| t * t * (t - 3.0) + 2.0 - k;
    let (mut lo, mut hi) = (3.0, 6.0f64.max((2.0 * k).cbrt() + 1.0));
    assert!(f(lo) < 0.0 && f(hi) > 0.0, "no symmetric trace for L = {boundary_length}");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    // One Newton polish from the bracket midpoint.
    let t = 0.5 * (lo + hi);
    let df = 3.0 * t * t - 6.0 * t;
    Ok(t - f(t) / df)
}

/// Pants with cuff lengths `l1, l2, l3`: two mirror hexagons glued on seams.
pub fn build_pair_of_pants(l1: f64, l2: f64, l3: f64) -> Result<FuchsianSheetRealization> {
    for l in [l1, l2, l3] {
        if !(l > 0.0) {
            return Err(Error::NonPositiveLength(l));
        }
    }
    let hex = RightAngledHexagon::new([0.5 * l1, 0.5 * l2, 0.5 * l3])?;
    let front = hex.polygon()?;
    let back = hex.mirror_polygon()?;
    let [a1, a2, a3] = hex.a;

    // Front order: a1 b3 a2 b1 a3 b2. Back order: a1 b2 a3 b1 a2 b3.
    let front_roles = vec![
        SideRole::Cuff { cuff: 0, offset: 0.0 },
        SideRole::Seam { tile: 1, side: 5 },
        SideRole::Cuff { cuff: 1, offset: 0.0 },
        SideRole::Seam { tile: 1, side: 3 },
        SideRole::Cuff { cuff: 2, offset: 0.0 },
        SideRole::Seam { tile: 1, side: 1 },
    ];
    let back_roles = vec![
        SideRole::Cuff { cuff: 0, offset: a1 },
        SideRole::Seam { tile: 0, side: 5 },
        SideRole::Cuff { cuff: 2, offset: a3 },
        SideRole::Seam { tile: 0, side: 3 },
        SideRole::Cuff { cuff: 1, offset: a2 },
        SideRole::Seam { tile: 0, side: 1 },
    ];
    let cuff = |half: f64, front_side: usize, back_side: usize| Cuff {
        length: 2.0 * half,
        arcs: vec![
            CuffArc { tile: 0, side: front_side, offset: 0.0, length: half },
            CuffArc { tile: 1, side: back_side, offset: half, length: half },
        ],
        gluing: None,
    };
    let cuffs = vec![cuff(a1, 0, 0), cuff(a2, 2, 4), cuff(a3, 4, 2)];

    let mut sheet = FuchsianSheetRealization {
        sheet_id: String::new(),
        kind: SheetKind::PairOfPants,
        generators: Vec::new(),
        boundary_axes: Vec::new(),
        boundary_lengths: vec![l1, l2, l3],
        tiles: vec![
            Tile { polygon: front, roles: front_roles },
            Tile { polygon: back, roles: back_roles },
        ],
        cuffs,
        boundary_cuffs: vec![0, 1, 2],
    };
    // Loops around each cuff: cross the seam after it, come back through the
    // seam before it.
    let g1 = sheet.two_tile_loop(1, 1)?;
    let g2 = sheet.two_tile_loop(3, 5)?;
    let g3 = sheet.two_tile_loop(5, 3)?;
    sheet.generators = vec![g1, g2];
    sheet.boundary_axes = vec![g1, g2, g3];
    Ok(sheet)
}

/// One-holed torus with boundary length `l` at the symmetric point where
/// `A`, `B` and `AB` share the trace [`symmetric_torus_trace`].
pub fn build_one_holed_torus(boundary_length: f64) -> Result<FuchsianSheetRealization> {
    let t = symmetric_torus_trace(boundary_length)?;
    let c = 2.0 * (0.5 * t).acosh();
    let mut sheet = build_pair_of_pants(c, c, boundary_length)?;
    sheet.kind = SheetKind::OneHoledTorus;
    // Twist 0 in this parametrization puts the seam endpoints half a cuff
    // apart, which is the symmetric marking.
    let twist = 0.0;
    sheet.cuffs[0].gluing = Some((1, twist));
    sheet.cuffs[1].gluing = Some((0, twist));
    sheet.boundary_cuffs = vec![2];
    sheet.boundary_lengths = vec![boundary_length];

    let a = sheet.boundary_axes[0];
    // B: cross cuff 0 at a quarter of its length, return through the seam
    // shared by cuffs 1 and 2.
    let sigma = 0.25 * c;
    let (src_arc, s) = sheet.cuffs[0].locate(sigma);
    let (dst_arc, s_dst) = sheet.cuffs[1].locate(twist - sigma);
    let glue = crossing_isometry(
        sheet.side(src_arc.tile, src_arc.side),
        s,
        sheet.side(dst_arc.tile, dst_arc.side),
        s_dst,
    );
    let b = if dst_arc.tile == 0 {
        glue.inverse()
    } else {
        (sheet.seam_isometry(1, 3)? * glue).inverse()
    };
    sheet.generators = vec![a, b];
    sheet.boundary_axes = vec![a.commutator(&b)];
    Ok(sheet)
}
