use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{
    build_one_holed_torus, build_pair_of_pants, crossing_isometry, ConvexPolygon, CuffArc,
    FuchsianSheetRealization, GeodesicSegment, Isometry, SideRole,
};
use crate::surface::{unchecked_mass, validate, BranchedSurfaceSpec, EndRef, Side};

/// How the flow leaves a tile through one of its sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Passage {
    Seam { tile: usize, side: usize },
    Circle { circle: usize, offset: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceTile {
    pub sheet: usize,
    pub polygon: ConvexPolygon,
    pub passages: Vec<Passage>,
    pub area: f64,
}

/// One continuation available at a sheet end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub curve: usize,
    /// Side of the curve the current end is on.
    pub side: Side,
    pub target_circle: usize,
    pub twist: f64,
    pub weight: f64,
    /// `weight / Σ weights` over the end's branches.
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CircleLink {
    /// Glued inside its own sheet by `σ ↦ twist − σ`.
    Internal { partner: usize, twist: f64 },
    /// A sheet end; an empty branch list means a free, reflecting end.
    End { end: EndRef, branches: Vec<Branch> },
}

/// A closed geodesic of some sheet made of tile sides (global indices).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub sheet: usize,
    pub length: f64,
    pub arcs: Vec<CuffArc>,
    pub link: CircleLink,
}

impl Circle {
    pub fn locate(&self, sigma: f64) -> (CuffArc, f64) {
        let sigma = sigma.rem_euclid(self.length);
        for arc in &self.arcs {
            if sigma < arc.offset + arc.length {
                return (*arc, (sigma - arc.offset).clamp(0.0, arc.length));
            }
        }
        let last = *self.arcs.last().expect("circle has arcs");
        (last, last.length)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizedSheet {
    pub id: String,
    pub degree: f64,
    pub area: f64,
    pub realization: FuchsianSheetRealization,
    pub tiles: Vec<usize>,
    /// Global circle index of each end, in end order.
    pub end_circles: Vec<usize>,
}

/// Every sheet of a spec realized as hyperbolic tiles, with all gluings
/// resolved to global tile and circle indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizedSurface {
    pub spec: BranchedSurfaceSpec,
    pub sheets: Vec<RealizedSheet>,
    pub tiles: Vec<SurfaceTile>,
    pub circles: Vec<Circle>,
    pub mass: f64,
}

fn realize_sheet(spec: &BranchedSurfaceSpec, index: usize) -> Result<FuchsianSheetRealization> {
    let sheet = &spec.sheets[index];
    let lengths = sheet
        .boundary_lengths
        .iter()
        .map(|l| spec.resolve(l))
        .collect::<Result<Vec<_>>>()?;
    let mut out = match (sheet.genus, lengths.as_slice()) {
        (1, &[l]) => build_one_holed_torus(l)?,
        (0, &[l1, l2, l3]) => build_pair_of_pants(l1, l2, l3)?,
        _ => {
            return Err(Error::UnsupportedSheet {
                sheet: sheet.id.clone(),
                genus: sheet.genus,
                boundary: sheet.boundary_count(),
            })
        }
    };
    out.sheet_id = sheet.id.clone();
    Ok(out)
}

/// Builds the realized surface. Lengths must all be bound.
pub fn realize(spec: &BranchedSurfaceSpec) -> Result<RealizedSurface> {
    for curve in &spec.branch_curves {
        let length = spec.curve_length(curve)?;
        for end in &curve.crossing_pair {
            if let Some(end_length) = spec.end_length(end) {
                let end_length = spec.resolve(end_length)?;
                if (end_length - length).abs() > 1e-9 * length.max(1.0) {
                    return Err(Error::LengthMismatch {
                        curve: curve.id.clone(),
                        left: length,
                        right: end_length,
                    });
                }
            }
        }
    }
    let report = validate(spec);
    if !report.ok {
        return Err(Error::Invalid(report.summary()));
    }
    let mass = unchecked_mass(spec)?;

    let mut sheets = Vec::with_capacity(spec.sheets.len());
    let mut tiles = Vec::new();
    let mut circles: Vec<Circle> = Vec::new();
    for (index, sheet_spec) in spec.sheets.iter().enumerate() {
        let realization = realize_sheet(spec, index)?;
        let tile_base = tiles.len();
        let circle_base = circles.len();
        for cuff in &realization.cuffs {
            circles.push(Circle {
                sheet: index,
                length: cuff.length,
                arcs: cuff
                    .arcs
                    .iter()
                    .map(|a| CuffArc {
                        tile: a.tile + tile_base,
                        ..*a
                    })
                    .collect(),
                link: match cuff.gluing {
                    Some((partner, twist)) => CircleLink::Internal {
                        partner: partner + circle_base,
                        twist,
                    },
                    None => CircleLink::End {
                        end: EndRef::new(&sheet_spec.id, ""),
                        branches: Vec::new(),
                    },
                },
            });
        }
        for tile in &realization.tiles {
            let passages = tile
                .roles
                .iter()
                .map(|role| match *role {
                    SideRole::Seam { tile, side } => Passage::Seam {
                        tile: tile + tile_base,
                        side,
                    },
                    SideRole::Cuff { cuff, offset } => Passage::Circle {
                        circle: cuff + circle_base,
                        offset,
                    },
                })
                .collect();
            tiles.push(SurfaceTile {
                sheet: index,
                area: tile.polygon.area(),
                polygon: tile.polygon.clone(),
                passages,
            });
        }
        let end_circles: Vec<usize> = realization
            .boundary_cuffs
            .iter()
            .map(|c| c + circle_base)
            .collect();
        for (end_id, &circle) in sheet_spec.boundary_ends.iter().zip(&end_circles) {
            circles[circle].link = CircleLink::End {
                end: EndRef::new(&sheet_spec.id, end_id),
                branches: Vec::new(),
            };
        }
        sheets.push(RealizedSheet {
            id: sheet_spec.id.clone(),
            degree: sheet_spec.cycle_degree,
            area: realization.area(),
            tiles: (tile_base..tile_base + realization.tiles.len()).collect(),
            end_circles,
            realization,
        });
    }

    let end_circle = |end: &EndRef| -> usize {
        let s = spec.sheet_index(&end.sheet).expect("validated");
        let k = spec.sheets[s].end_index(&end.end).expect("validated");
        sheets[s].end_circles[k]
    };
    for end in spec.ends() {
        let incident = spec.incident_curves(&end);
        let total: f64 = incident.iter().map(|&(k, _)| spec.branch_curves[k].degree).sum();
        let branches = incident
            .iter()
            .map(|&(k, side)| {
                let curve = &spec.branch_curves[k];
                Branch {
                    curve: k,
                    side,
                    target_circle: end_circle(curve.end(side.opposite())),
                    twist: spec.twist(&curve.id),
                    weight: curve.degree,
                    probability: curve.degree / total,
                }
            })
            .collect();
        let circle = end_circle(&end);
        circles[circle].link = CircleLink::End { end, branches };
    }

    Ok(RealizedSurface {
        spec: spec.clone(),
        sheets,
        tiles,
        circles,
        mass,
    })
}

impl RealizedSurface {
    pub fn side(&self, tile: usize, side: usize) -> &GeodesicSegment {
        &self.tiles[tile].polygon.sides[side]
    }

    pub fn arc_segment(&self, arc: &CuffArc) -> &GeodesicSegment {
        self.side(arc.tile, arc.side)
    }

    /// Circle of the end on `side` of a curve.
    pub fn curve_circle(&self, curve: usize, side: Side) -> usize {
        let end = self.spec.branch_curves[curve].end(side);
        let s = self.spec.sheet_index(&end.sheet).expect("validated");
        let k = self.spec.sheets[s].end_index(&end.end).expect("validated");
        self.sheets[s].end_circles[k]
    }

    /// The isometry identifying the boundary axis of the curve's left end
    /// with that of its right end, shifted by the curve's twist (or by
    /// `twist` when given). It maps coordinates of the tile holding the
    /// left circle's parameter origin to those of the right circle's.
    pub fn gluing_isometry(&self, curve: usize, twist: Option<f64>) -> Isometry {
        let twist = twist.unwrap_or_else(|| self.spec.twist(&self.spec.branch_curves[curve].id));
        let left = &self.circles[self.curve_circle(curve, Side::Left)];
        let right = &self.circles[self.curve_circle(curve, Side::Right)];
        let src = self.arc_segment(&left.arcs[0]);
        let dst = self.arc_segment(&right.arcs[0]);
        crossing_isometry(src, 0.0, dst, twist)
    }

    /// Crude diameter scale: the sum of the tile diameters.
    pub fn diameter_heuristic(&self) -> f64 {
        self.tiles.iter().map(|t| t.polygon.diameter()).sum()
    }

    pub fn sheet_of_tile(&self, tile: usize) -> &RealizedSheet {
        &self.sheets[self.tiles[tile].sheet]
    }
}
