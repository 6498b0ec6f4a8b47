//! Branched surfaces `BS` together with a fundamental cycle `Z`.
//!
//! A spec lists the sheets (ordinary hyperbolic surfaces with geodesic
//! boundary, each carrying the constant degree of `Z` there) and the branch
//! curves. Every branch curve is one resolved circle: it smoothly joins
//! exactly two sheet ends, and carries its own degree together with the
//! degrees just to its left and right.

mod family;
mod validate;

pub use family::{duck, family_tori_on_solid_torus};
pub use validate::{validate, validate_with, ValidationMode, ValidationReport, Violation};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::sheet_area;

/// A length given either as a number or as the name of a parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Value(f64),
    Param(String),
}

impl Length {
    pub fn param(name: &str) -> Self {
        Length::Param(name.to_string())
    }

    pub fn as_param(&self) -> Option<&str> {
        match self {
            Length::Param(p) => Some(p),
            Length::Value(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetSpec {
    pub id: String,
    pub genus: u32,
    pub boundary_ends: Vec<String>,
    pub boundary_lengths: Vec<Length>,
    pub cycle_degree: f64,
}

impl SheetSpec {
    pub fn boundary_count(&self) -> u32 {
        self.boundary_ends.len() as u32
    }

    pub fn end_index(&self, end: &str) -> Option<usize> {
        self.boundary_ends.iter().position(|e| e == end)
    }

    pub fn area(&self) -> Result<f64> {
        sheet_area(self.genus, self.boundary_count())
    }
}

/// One sheet end, named by sheet id and end id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndRef {
    pub sheet: String,
    pub end: String,
}

impl EndRef {
    pub fn new(sheet: &str, end: &str) -> Self {
        Self {
            sheet: sheet.to_string(),
            end: end.to_string(),
        }
    }
}

impl std::fmt::Display for EndRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.sheet, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSource {
    #[serde(rename = "boundary-circle")]
    BoundaryCircle,
    #[serde(rename = "nonadjacent-pair")]
    NonadjacentPair,
}

/// Which member of a crossing pair an end is. The left side of a curve is
/// the side of the first member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchCurveSpec {
    pub id: String,
    pub length: Length,
    pub degree: f64,
    pub deg_left: f64,
    pub deg_right: f64,
    pub crossing_pair: [EndRef; 2],
    pub source: CurveSource,
}

impl BranchCurveSpec {
    pub fn end(&self, side: Side) -> &EndRef {
        match side {
            Side::Left => &self.crossing_pair[0],
            Side::Right => &self.crossing_pair[1],
        }
    }

    pub fn side_degree(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.deg_left,
            Side::Right => self.deg_right,
        }
    }

    pub fn is_self_gluing(&self) -> bool {
        self.crossing_pair[0] == self.crossing_pair[1]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchedSurfaceSpec {
    pub sheets: Vec<SheetSpec>,
    pub branch_curves: Vec<BranchCurveSpec>,
    #[serde(default)]
    pub twists: BTreeMap<String, f64>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

impl BranchedSurfaceSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn sheet(&self, id: &str) -> Option<&SheetSpec> {
        self.sheets.iter().find(|s| s.id == id)
    }

    pub fn sheet_index(&self, id: &str) -> Option<usize> {
        self.sheets.iter().position(|s| s.id == id)
    }

    pub fn resolve(&self, length: &Length) -> Result<f64> {
        match length {
            Length::Value(v) => Ok(*v),
            Length::Param(name) => self
                .parameters
                .get(name)
                .copied()
                .ok_or_else(|| Error::Unbound(name.clone())),
        }
    }

    pub fn curve_length(&self, curve: &BranchCurveSpec) -> Result<f64> {
        self.resolve(&curve.length)
    }

    /// The declared boundary length of a sheet end, if the end exists.
    pub fn end_length(&self, end: &EndRef) -> Option<&Length> {
        let sheet = self.sheet(&end.sheet)?;
        let k = sheet.end_index(&end.end)?;
        sheet.boundary_lengths.get(k)
    }

    pub fn twist(&self, curve_id: &str) -> f64 {
        self.twists.get(curve_id).copied().unwrap_or(0.0)
    }

    /// Curves incident to `end`, with the side `end` occupies. A curve that
    /// glues an end to itself is listed once, on its left side.
    pub fn incident_curves(&self, end: &EndRef) -> Vec<(usize, Side)> {
        let mut out = Vec::new();
        for (k, curve) in self.branch_curves.iter().enumerate() {
            if &curve.crossing_pair[0] == end {
                out.push((k, Side::Left));
            } else if &curve.crossing_pair[1] == end {
                out.push((k, Side::Right));
            }
        }
        out
    }

    /// Every sheet end in declaration order.
    pub fn ends(&self) -> Vec<EndRef> {
        self.sheets
            .iter()
            .flat_map(|s| s.boundary_ends.iter().map(|e| EndRef::new(&s.id, e)))
            .collect()
    }

    /// Returns a copy with extra parameter bindings applied.
    pub fn with_bindings<'a>(&self, bindings: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let mut out = self.clone();
        for (name, value) in bindings {
            out.parameters.insert(name.to_string(), value);
        }
        out
    }

    /// Whether every curve and boundary length resolves to a number.
    pub fn is_numeric(&self) -> bool {
        self.branch_curves.iter().all(|c| self.resolve(&c.length).is_ok())
            && self
                .sheets
                .iter()
                .flat_map(|s| &s.boundary_lengths)
                .all(|l| self.resolve(l).is_ok())
    }
}

/// Total `Z`-weighted area, `Σ cycle_degree · area(sheet)`.
pub fn mass(spec: &BranchedSurfaceSpec) -> Result<f64> {
    let report = validate(spec);
    if !report.ok {
        return Err(Error::Invalid(report.summary()));
    }
    unchecked_mass(spec)
}

pub(crate) fn unchecked_mass(spec: &BranchedSurfaceSpec) -> Result<f64> {
    spec.sheets
        .iter()
        .map(|s| Ok(s.cycle_degree * s.area()?))
        .sum()
}

/// Multiplies every degree of the cycle (sheets, curves, left and right
/// degrees) by `factor`.
pub fn rescale_cycle(spec: &BranchedSurfaceSpec, factor: f64) -> Result<BranchedSurfaceSpec> {
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(Error::NonPositiveFactor(factor));
    }
    let mut out = spec.clone();
    for sheet in &mut out.sheets {
        sheet.cycle_degree *= factor;
    }
    for curve in &mut out.branch_curves {
        curve.degree *= factor;
        curve.deg_left *= factor;
        curve.deg_right *= factor;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn genus_two() -> BranchedSurfaceSpec {
        BranchedSurfaceSpec {
            sheets: vec![SheetSpec {
                id: "S".into(),
                genus: 2,
                boundary_ends: vec![],
                boundary_lengths: vec![],
                cycle_degree: 1.0,
            }],
            ..Default::default()
        }
    }

    #[test]
    fn masses() {
        assert_relative_eq!(mass(&duck()).unwrap(), 12.0 * PI, epsilon = 1e-12);
        for n in [3, 4, 7, 10] {
            let spec = family_tori_on_solid_torus(n).unwrap();
            assert_relative_eq!(mass(&spec).unwrap(), 2.0 * PI * n as f64, epsilon = 1e-12);
        }
        assert_relative_eq!(mass(&genus_two()).unwrap(), 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn mass_rejects_invalid() {
        let mut spec = duck();
        spec.branch_curves[0].degree = 3.0;
        assert!(matches!(mass(&spec), Err(Error::Invalid(_))));
    }

    #[test]
    fn mass_is_additive() {
        let a = family_tori_on_solid_torus(4).unwrap();
        let mut b = genus_two();
        b.sheets[0].cycle_degree = 0.5;
        let mut union = a.clone();
        union.sheets.extend(b.sheets.iter().cloned());
        assert_relative_eq!(
            mass(&union).unwrap(),
            mass(&a).unwrap() + mass(&b).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rescaling() {
        assert_eq!(rescale_cycle(&duck(), 1.0).unwrap(), duck());
        let doubled = rescale_cycle(&family_tori_on_solid_torus(3).unwrap(), 2.0).unwrap();
        assert_eq!(doubled, duck());
        assert!(rescale_cycle(&duck(), 0.0).is_err());
        assert!(rescale_cycle(&duck(), -1.0).is_err());
        assert!(validate(&rescale_cycle(&duck(), 0.37).unwrap()).ok);
    }

    #[test]
    fn json_round_trip_keeps_field_names() {
        let spec = duck().with_bindings([("a", 6.0)]);
        let text = spec.to_json();
        for key in ["sheets", "branch_curves", "twists", "parameters", "cycle_degree", "deg_left", "crossing_pair"] {
            assert!(text.contains(&format!("\"{key}\"")), "{key}");
        }
        let back = BranchedSurfaceSpec::from_json(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"sheets": [], "branch_curves": [], "extra": 1}"#;
        assert!(BranchedSurfaceSpec::from_json(text).is_err());
    }

    #[test]
    fn resolve_lengths() {
        let spec = duck();
        assert!(matches!(spec.curve_length(&spec.branch_curves[0]), Err(Error::Unbound(_))));
        let bound = spec.with_bindings([("a", 6.0)]);
        assert_eq!(bound.curve_length(&bound.branch_curves[0]).unwrap(), 6.0);
        assert!(bound.is_numeric());
    }
}
