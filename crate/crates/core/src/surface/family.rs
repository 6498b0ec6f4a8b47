use super::{
    rescale_cycle, BranchCurveSpec, BranchedSurfaceSpec, CurveSource, EndRef, Length, SheetSpec,
};
use crate::error::{Error, Result};

/// End id used by every one-holed-torus sheet of the generated families.
pub const TORUS_END: &str = "e";

/// Shared symbolic length of the generated branch curves.
pub const FAMILY_LENGTH: &str = "a";

/// `n` one-holed tori glued to a solid torus.
///
/// Every torus has cycle degree 1; the `n(n−1)/2` branch curves, one per
/// unordered pair of sheets, have degree `1/(n−1)` with left and right
/// degree 1, and share the length parameter `a`.
pub fn family_tori_on_solid_torus(n: usize) -> Result<BranchedSurfaceSpec> {
    if n < 3 {
        return Err(Error::FamilyTooSmall(n));
    }
    let sheets = (1..=n)
        .map(|k| SheetSpec {
            id: format!("T{k}"),
            genus: 1,
            boundary_ends: vec![TORUS_END.to_string()],
            boundary_lengths: vec![Length::param(FAMILY_LENGTH)],
            cycle_degree: 1.0,
        })
        .collect();
    let degree = 1.0 / (n - 1) as f64;
    let mut branch_curves = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            // Neighbours in the circular order around the solid torus come
            // from boundary circles; the others bridge non-adjacent sheets.
            let adjacent = j == i + 1 || (i == 1 && j == n);
            branch_curves.push(BranchCurveSpec {
                id: format!("b{i}_{j}"),
                length: Length::param(FAMILY_LENGTH),
                degree,
                deg_left: 1.0,
                deg_right: 1.0,
                crossing_pair: [
                    EndRef::new(&format!("T{i}"), TORUS_END),
                    EndRef::new(&format!("T{j}"), TORUS_END),
                ],
                source: if adjacent {
                    CurveSource::BoundaryCircle
                } else {
                    CurveSource::NonadjacentPair
                },
            });
        }
    }
    Ok(BranchedSurfaceSpec {
        sheets,
        branch_curves,
        ..Default::default()
    })
}

/// Three punctured tori on a solid torus with the cycle normalized to
/// degree 2 on sheets and 1 on branch curves.
pub fn duck() -> BranchedSurfaceSpec {
    let base = family_tori_on_solid_torus(3).expect("n = 3 is valid");
    rescale_cycle(&base, 2.0).expect("positive factor")
}
