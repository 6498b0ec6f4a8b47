use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BranchedSurfaceSpec, EndRef, Length, Side};
use crate::hyperbolic::Tolerances;

/// Whether left/right degrees must match the adjacent sheets' degrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    #[default]
    Strict,
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub element: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Conditions that do not invalidate the spec: no branch curves at all,
    /// or sheet ends no curve is attached to (reflecting boundary).
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("[{}] {}: {}", v.rule, v.element, v.message))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

struct Collector {
    violations: Vec<Violation>,
    warnings: Vec<Violation>,
}

impl Collector {
    fn fail(&mut self, rule: &str, element: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            rule: rule.into(),
            element: element.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, rule: &str, element: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Violation {
            rule: rule.into(),
            element: element.into(),
            message: message.into(),
        });
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn validate(spec: &BranchedSurfaceSpec) -> ValidationReport {
    validate_with(spec, ValidationMode::Strict, &Tolerances::default())
}

pub fn validate_with(
    spec: &BranchedSurfaceSpec,
    mode: ValidationMode,
    tol: &Tolerances,
) -> ValidationReport {
    let mut out = Collector {
        violations: Vec::new(),
        warnings: Vec::new(),
    };

    for (name, value) in &spec.parameters {
        if !(value.is_finite() && *value > 0.0) {
            out.fail("parameter.positive", name, format!("bound value {value} must be positive"));
        }
    }
    let check_length = |out: &mut Collector, element: &str, length: &Length| match length {
        Length::Value(v) if !(v.is_finite() && *v > 0.0) => {
            out.fail("length.positive", element, format!("length {v} must be positive"))
        }
        _ => {}
    };

    let mut sheet_ids = BTreeSet::new();
    for sheet in &spec.sheets {
        if !sheet_ids.insert(sheet.id.as_str()) {
            out.fail("sheet.duplicate_id", &sheet.id, "sheet id appears more than once");
        }
        let euler = 2 - 2 * sheet.genus as i64 - sheet.boundary_ends.len() as i64;
        if euler >= 0 {
            out.fail(
                "sheet.hyperbolic",
                &sheet.id,
                format!("Euler characteristic {euler} is not negative"),
            );
        }
        if !(sheet.cycle_degree.is_finite() && sheet.cycle_degree > 0.0) {
            out.fail(
                "sheet.degree_positive",
                &sheet.id,
                format!("cycle degree {} must be positive", sheet.cycle_degree),
            );
        }
        if sheet.boundary_lengths.len() != sheet.boundary_ends.len() {
            out.fail(
                "sheet.boundary_lengths",
                &sheet.id,
                format!(
                    "{} ends but {} boundary lengths",
                    sheet.boundary_ends.len(),
                    sheet.boundary_lengths.len()
                ),
            );
        }
        let mut end_ids = BTreeSet::new();
        for end in &sheet.boundary_ends {
            if !end_ids.insert(end.as_str()) {
                out.fail("sheet.duplicate_end", format!("{}/{end}", sheet.id), "end id repeated");
            }
        }
        for (end, length) in sheet.boundary_ends.iter().zip(&sheet.boundary_lengths) {
            check_length(&mut out, &format!("{}/{end}", sheet.id), length);
        }
    }

    let mut curve_ids = BTreeSet::new();
    for curve in &spec.branch_curves {
        let id = curve.id.as_str();
        if !curve_ids.insert(id) {
            out.fail("curve.duplicate_id", id, "curve id appears more than once");
        }
        check_length(&mut out, id, &curve.length);
        let degrees = [curve.degree, curve.deg_left, curve.deg_right];
        if degrees.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            out.fail("curve.degree_positive", id, format!("degrees {degrees:?} must be positive"));
            continue;
        }
        for side in [Side::Left, Side::Right] {
            let side_degree = curve.side_degree(side);
            if curve.degree > side_degree * (1.0 + tol.degree) {
                out.fail(
                    "curve.probability",
                    id,
                    format!(
                        "degree {} exceeds {side:?} degree {side_degree}: crossing probability above 1",
                        curve.degree
                    ),
                );
            }
        }
        for side in [Side::Left, Side::Right] {
            let end = curve.end(side);
            let Some(sheet) = spec.sheet(&end.sheet) else {
                out.fail("curve.unknown_end", id, format!("unknown sheet `{}`", end.sheet));
                continue;
            };
            let Some(k) = sheet.end_index(&end.end) else {
                out.fail("curve.unknown_end", id, format!("sheet `{}` has no end `{}`", end.sheet, end.end));
                continue;
            };
            if mode == ValidationMode::Strict && !close(curve.side_degree(side), sheet.cycle_degree, tol.degree) {
                out.fail(
                    "curve.side_degree",
                    id,
                    format!(
                        "{side:?} degree {} differs from degree {} of adjacent sheet `{}`",
                        curve.side_degree(side),
                        sheet.cycle_degree,
                        sheet.id
                    ),
                );
            }
            if let Some(end_length) = sheet.boundary_lengths.get(k) {
                if !lengths_agree(spec, &curve.length, end_length, tol.boundary_length) {
                    out.fail(
                        "curve.length_match",
                        id,
                        format!("length {:?} differs from boundary length {:?} of {end}", curve.length, end_length),
                    );
                }
            }
        }
    }

    for (curve_id, twist) in &spec.twists {
        let Some(curve) = spec.branch_curves.iter().find(|c| &c.id == curve_id) else {
            out.fail("twist.unknown_curve", curve_id, "twist given for an unknown curve");
            continue;
        };
        let upper = spec.resolve(&curve.length).ok();
        let in_range = *twist >= 0.0 && upper.is_none_or(|l| *twist < l);
        if !twist.is_finite() || !in_range {
            out.fail("twist.range", curve_id, format!("twist {twist} outside [0, length)"));
        }
    }

    // Switch condition at every end that has curves attached.
    let mut incident: BTreeMap<EndRef, f64> = BTreeMap::new();
    for curve in &spec.branch_curves {
        incident
            .entry(curve.crossing_pair[0].clone())
            .and_modify(|d| *d += curve.degree)
            .or_insert(curve.degree);
        if !curve.is_self_gluing() {
            incident
                .entry(curve.crossing_pair[1].clone())
                .and_modify(|d| *d += curve.degree)
                .or_insert(curve.degree);
        }
    }
    for sheet in &spec.sheets {
        for end in &sheet.boundary_ends {
            let key = EndRef::new(&sheet.id, end);
            match incident.get(&key) {
                None => out.warn(
                    "end.free",
                    key.to_string(),
                    "no branch curve attached; the end is a free (reflecting) boundary",
                ),
                Some(&sum) if !close(sum, sheet.cycle_degree, tol.degree) => out.fail(
                    "end.switch_condition",
                    key.to_string(),
                    format!(
                        "incident curve degrees sum to {sum} but the sheet degree is {}",
                        sheet.cycle_degree
                    ),
                ),
                Some(_) => {}
            }
        }
    }

    if spec.branch_curves.is_empty() {
        out.warn("spec.no_curves", "spec", "no branch curves");
    }

    ValidationReport {
        ok: out.violations.is_empty(),
        violations: out.violations,
        warnings: out.warnings,
    }
}

fn lengths_agree(spec: &BranchedSurfaceSpec, a: &Length, b: &Length, tol: f64) -> bool {
    if let (Length::Param(x), Length::Param(y)) = (a, b) {
        if x == y {
            return true;
        }
    }
    match (spec.resolve(a), spec.resolve(b)) {
        (Ok(x), Ok(y)) => close(x, y, tol),
        _ => false,
    }
}
