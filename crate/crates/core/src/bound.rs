//! Growth-rate lower bound for the branched geodesic flow and the branch
//! length bounds it implies.
//!
//! Each branch curve `β` costs `l(β) = −log(deg/dl) − log(deg/dr)`, the
//! information of crossing it once from each side. The exponential growth
//! rate of the `Z`-weighted sphere length is at least
//!
//! ```text
//! 1 + Σ_β c_β · length(β),    c_β = 0.5 · deg(β) · l(β) / mass(Z)
//! ```
//!
//! and it can never exceed the exponent 2 of volume growth in H³, so the
//! lengths satisfy `Σ c_β · length(β) ≤ 1`. Throughout, `mass(Z)`, the
//! cycle-weighted area of the surface, is `Σ deg(sheet) · area(sheet)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::circle_circumference_h2;
use crate::surface::{family_tori_on_solid_torus, unchecked_mass, validate, BranchedSurfaceSpec, Length};

/// `−log(deg/dl) − log(deg/dr)`.
pub fn branch_cost(deg: f64, dl: f64, dr: f64) -> Result<f64> {
    if !(deg > 0.0 && dl > 0.0 && dr > 0.0) {
        return Err(Error::NonPositiveDegree);
    }
    for side in [dl, dr] {
        if deg > side {
            return Err(Error::ProbabilityAboveOne { degree: deg, side });
        }
    }
    Ok(-(deg / dl).ln() - (deg / dr).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveGrowth {
    pub id: String,
    /// `l(β)`.
    pub cost: f64,
    /// `c_β`, growth per unit length of `β`.
    pub coefficient: f64,
    pub length: Option<f64>,
    pub length_param: Option<String>,
}

/// The half-space `Σ c_β x_β ≤ rhs` of admissible length vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRegion {
    pub coefficients: BTreeMap<String, f64>,
    pub rhs: f64,
    /// `1/c_β` per curve; absent when `c_β = 0`.
    pub per_curve_maximum: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub curves: Vec<CurveGrowth>,
    pub mass: f64,
    pub growth_rate: f64,
    pub bound_region: BoundRegion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyCrossCheck>,
}

fn coefficients(spec: &BranchedSurfaceSpec) -> Result<(f64, Vec<CurveGrowth>)> {
    let report = validate(spec);
    if !report.ok {
        return Err(Error::Invalid(report.summary()));
    }
    let mass = unchecked_mass(spec)?;
    let curves = spec
        .branch_curves
        .iter()
        .map(|c| {
            let cost = branch_cost(c.degree, c.deg_left, c.deg_right)?;
            Ok(CurveGrowth {
                id: c.id.clone(),
                cost,
                coefficient: 0.5 * c.degree * cost / mass,
                length: spec.resolve(&c.length).ok(),
                length_param: c.length.as_param().map(str::to_string),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((mass, curves))
}

fn region(curves: &[CurveGrowth]) -> BoundRegion {
    BoundRegion {
        coefficients: curves.iter().map(|c| (c.id.clone(), c.coefficient)).collect(),
        rhs: 1.0,
        per_curve_maximum: curves
            .iter()
            .filter(|c| c.coefficient > 0.0)
            .map(|c| (c.id.clone(), c.coefficient.recip()))
            .collect(),
    }
}

/// Evaluates `1 + Σ c_β length(β)`; every length must be bound.
pub fn growth_rate(spec: &BranchedSurfaceSpec) -> Result<GrowthReport> {
    let (mass, curves) = coefficients(spec)?;
    let mut exponent = 0.0;
    for (curve, spec_curve) in curves.iter().zip(&spec.branch_curves) {
        let length = spec.resolve(&spec_curve.length)?;
        exponent += curve.coefficient * length;
    }
    Ok(GrowthReport {
        bound_region: region(&curves),
        curves,
        mass,
        growth_rate: 1.0 + exponent,
        family: None,
    })
}

/// `2π sinh(r) · exp(r · (growth_rate − 1))`.
pub fn sphere_length_lower_bound(spec: &BranchedSurfaceSpec, r: f64) -> Result<f64> {
    let circle = circle_circumference_h2(r)?;
    let report = growth_rate(spec)?;
    Ok(circle * (r * (report.growth_rate - 1.0)).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMaximum {
    pub id: String,
    pub coefficient: f64,
    /// `1/c_β` with every other length at zero; `None` if unconstrained.
    pub max_length: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterMaximum {
    pub name: String,
    /// Sum of `c_β` over curves using the parameter.
    pub coefficient: f64,
    pub max_length: Option<f64>,
}

/// Explicit length bounds from `Σ c_β length(β) ≤ 1`.
///
/// Every maximum is a supremum: the growth inequality is strict, so the
/// lengths lie strictly below the reported values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub per_curve: Vec<CurveMaximum>,
    pub per_parameter: Vec<ParameterMaximum>,
    /// Common value of all tied lengths at which the growth rate reaches 2.
    /// Numeric curve lengths stay fixed; symbolic ones (or all curves, when
    /// none are symbolic) move together.
    pub uniform_maximum: Option<f64>,
    /// Set when no curve branches, so no constraint arises.
    pub unbounded: bool,
    /// `1 − Σ c_β length(β)` when every length is bound.
    pub slack: Option<f64>,
    pub bound_region: BoundRegion,
}

pub fn frame_length_bound(spec: &BranchedSurfaceSpec) -> Result<BoundResult> {
    let (_, curves) = coefficients(spec)?;
    let unbounded = curves.iter().all(|c| c.coefficient == 0.0);

    let per_curve = curves
        .iter()
        .map(|c| CurveMaximum {
            id: c.id.clone(),
            coefficient: c.coefficient,
            max_length: (c.coefficient > 0.0).then(|| c.coefficient.recip()),
        })
        .collect();

    let mut by_param: BTreeMap<String, f64> = BTreeMap::new();
    for c in &curves {
        if let Some(p) = &c.length_param {
            *by_param.entry(p.clone()).or_default() += c.coefficient;
        }
    }
    let per_parameter = by_param
        .into_iter()
        .map(|(name, coefficient)| ParameterMaximum {
            name,
            coefficient,
            max_length: (coefficient > 0.0).then(|| coefficient.recip()),
        })
        .collect();

    let any_symbolic = spec
        .branch_curves
        .iter()
        .any(|c| matches!(c.length, Length::Param(_)));
    let (mut tied, mut fixed) = (0.0, 0.0);
    for (c, spec_curve) in curves.iter().zip(&spec.branch_curves) {
        match (&spec_curve.length, any_symbolic) {
            (Length::Value(v), true) => fixed += c.coefficient * v,
            _ => tied += c.coefficient,
        }
    }
    let uniform_maximum = (tied > 0.0).then(|| (1.0 - fixed) / tied);

    let slack = curves
        .iter()
        .map(|c| c.length.map(|l| c.coefficient * l))
        .sum::<Option<f64>>()
        .map(|used| 1.0 - used);

    Ok(BoundResult {
        per_curve,
        per_parameter,
        uniform_maximum,
        unbounded,
        slack,
        bound_region: region(&curves),
    })
}

/// The closed form `8π / ((n−1) log(n−1))` stated for the family of `n`
/// tori on a solid torus, kept for side-by-side reporting.
pub fn family_closed_form_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::FamilyTooSmall(n));
    }
    let m = (n - 1) as f64;
    Ok(8.0 * PI / (m * m.ln()))
}

/// Both evaluations of the family bound. `formula_bound` comes from the
/// growth coefficients and equals `4π / log(n−1)`; the closed form is
/// smaller by the factor `(n−1)/2`, so the two agree only at `n = 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCrossCheck {
    pub n: usize,
    pub formula_bound: f64,
    pub closed_form_bound: f64,
    /// `formula_bound / closed_form_bound`.
    pub ratio: f64,
    pub discrepancy: f64,
    pub note: String,
}

pub fn family_cross_check(n: usize) -> Result<FamilyCrossCheck> {
    let closed_form_bound = family_closed_form_bound(n)?;
    let spec = family_tori_on_solid_torus(n)?;
    let formula_bound = frame_length_bound(&spec)?
        .uniform_maximum
        .ok_or_else(|| Error::Geometry("family has no branching".into()))?;
    let discrepancy = formula_bound - closed_form_bound;
    let note = if discrepancy.abs() <= 1e-9 * formula_bound {
        "the growth-coefficient bound and the closed form agree".to_string()
    } else {
        format!(
            "the growth-coefficient bound 4π/log(n−1) and the closed form 8π/((n−1)log(n−1)) \
             differ by the factor (n−1)/2 = {}; the former is primary",
            (n - 1) as f64 / 2.0
        )
    };
    Ok(FamilyCrossCheck {
        n,
        formula_bound,
        closed_form_bound,
        ratio: formula_bound / closed_form_bound,
        discrepancy,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{duck, rescale_cycle, SheetSpec};
    use approx::assert_relative_eq;

    fn bound_duck(a: f64) -> BranchedSurfaceSpec {
        duck().with_bindings([("a", a)])
    }

    fn single_torus() -> BranchedSurfaceSpec {
        BranchedSurfaceSpec {
            sheets: vec![SheetSpec {
                id: "T".into(),
                genus: 1,
                boundary_ends: vec!["e".into()],
                boundary_lengths: vec![Length::Value(3.0)],
                cycle_degree: 1.0,
            }],
            ..Default::default()
        }
    }

    #[test]
    fn costs() {
        assert_relative_eq!(branch_cost(1.0, 2.0, 2.0).unwrap(), 1.38629, epsilon = 1e-5);
        for n in [3usize, 4, 7, 12] {
            let m = (n - 1) as f64;
            assert_relative_eq!(branch_cost(1.0 / m, 1.0, 1.0).unwrap(), 2.0 * m.ln(), epsilon = 1e-12);
        }
        assert_eq!(branch_cost(0.3, 0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(branch_cost(3.0, 2.0, 4.0), Err(Error::ProbabilityAboveOne { .. })));
        assert!(branch_cost(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn duck_rate() {
        for a in [1.0, 6.0, 18.0] {
            let report = growth_rate(&bound_duck(a)).unwrap();
            assert_relative_eq!(report.growth_rate - 1.0, (2f64.ln() / (4.0 * PI)) * a, epsilon = 1e-12);
            assert_relative_eq!((report.growth_rate - 1.0) / a, 0.0551589, max_relative = 1e-5);
        }
    }

    #[test]
    fn unbound_length_rejected() {
        assert!(matches!(growth_rate(&duck()), Err(Error::Unbound(_))));
    }

    #[test]
    fn no_curves_rate_one() {
        let report = growth_rate(&single_torus()).unwrap();
        assert_eq!(report.growth_rate, 1.0);
        let bound = frame_length_bound(&single_torus()).unwrap();
        assert!(bound.unbounded);
        assert!(bound.uniform_maximum.is_none());
        assert_eq!(sphere_length_lower_bound(&single_torus(), 2.0).unwrap(), circle_circumference_h2(2.0).unwrap());
    }

    #[test]
    fn rescaled_family_matches_duck() {
        let family = family_tori_on_solid_torus(3).unwrap().with_bindings([("a", 6.0)]);
        let d = bound_duck(6.0);
        assert!((growth_rate(&family).unwrap().growth_rate - growth_rate(&d).unwrap().growth_rate).abs() < 1e-12);
    }

    #[test]
    fn sphere_bound_direct_evaluation() {
        // Coefficient re-derived by hand: three curves, each 0.5·1·2log2/(12π).
        let coefficient = 3.0 * 0.5 * 1.0 * 2.0 * 2f64.ln() / (12.0 * PI);
        let want = 2.0 * PI * 1f64.sinh() * (6.0 * coefficient).exp();
        let got = sphere_length_lower_bound(&bound_duck(6.0), 1.0).unwrap();
        assert_relative_eq!(got, want, epsilon = 1e-12);
        assert_relative_eq!(6.0 * coefficient, 0.331, epsilon = 1e-3);
    }

    #[test]
    fn sphere_bound_monotone_in_length() {
        let mut last = 0.0;
        for a in [1.0, 2.0, 4.0, 8.0] {
            let v = sphere_length_lower_bound(&bound_duck(a), 3.0).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn duck_frame_bound() {
        let bound = frame_length_bound(&duck()).unwrap();
        let uniform = bound.uniform_maximum.unwrap();
        assert_relative_eq!(uniform, 4.0 * PI / 2f64.ln(), epsilon = 1e-12);
        assert!((uniform - 18.1294).abs() < 1e-3);
        assert!(!bound.unbounded);
        assert!(bound.slack.is_none());
        assert_eq!(bound.per_parameter.len(), 1);
        assert_relative_eq!(bound.per_parameter[0].max_length.unwrap(), uniform, epsilon = 1e-12);
        // Back-substitution.
        let rate = growth_rate(&duck().with_bindings([("a", uniform)])).unwrap().growth_rate;
        assert!((rate - 2.0).abs() < 1e-10);
    }

    #[test]
    fn independent_lengths() {
        let mut spec = bound_duck(6.0);
        for (k, c) in spec.branch_curves.iter_mut().enumerate() {
            c.length = Length::Param(format!("x{k}"));
        }
        for k in 0..3 {
            spec.parameters.insert(format!("x{k}"), 6.0);
        }
        let bound = frame_length_bound(&spec).unwrap();
        for c in &bound.per_curve {
            assert_relative_eq!(c.max_length.unwrap(), 12.0 * PI / 2f64.ln(), epsilon = 1e-12);
        }
        let uniform = bound.uniform_maximum.unwrap();
        let at_uniform = spec.with_bindings(["a", "x0", "x1", "x2"].map(|name| (name, uniform)));
        let rate = growth_rate(&at_uniform).unwrap().growth_rate;
        assert!((rate - 2.0).abs() < 1e-10);
    }

    #[test]
    fn slack_at_bindings() {
        let bound = frame_length_bound(&bound_duck(6.0)).unwrap();
        assert_relative_eq!(bound.slack.unwrap(), 1.0 - 6.0 * 2f64.ln() / (4.0 * PI), epsilon = 1e-12);
    }

    #[test]
    fn closed_form_values() {
        assert_relative_eq!(family_closed_form_bound(3).unwrap(), 4.0 * PI / 2f64.ln(), epsilon = 1e-12);
        assert!((family_closed_form_bound(4).unwrap() - 7.6256).abs() < 1e-3);
        assert!((family_closed_form_bound(7).unwrap() - 2.3378).abs() < 1e-3);
        assert!(family_closed_form_bound(2).is_err());
    }

    #[test]
    fn family_cross_checks() {
        let three = family_cross_check(3).unwrap();
        assert!(three.discrepancy.abs() < 1e-9);
        for n in [4usize, 5, 7, 10] {
            let check = family_cross_check(n).unwrap();
            let m = (n - 1) as f64;
            assert_relative_eq!(check.formula_bound, 4.0 * PI / m.ln(), epsilon = 1e-12);
            assert_relative_eq!(check.ratio, m / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scale_invariance() {
        let base = bound_duck(6.0);
        for factor in [0.1, 0.5, 3.0, 1e3] {
            let scaled = rescale_cycle(&base, factor).unwrap();
            let (a, b) = (growth_rate(&base).unwrap(), growth_rate(&scaled).unwrap());
            assert!((a.growth_rate - b.growth_rate).abs() < 1e-12);
            for (x, y) in a.curves.iter().zip(&b.curves) {
                assert!((x.cost - y.cost).abs() < 1e-12);
                assert!((x.coefficient - y.coefficient).abs() < 1e-12);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rate_is_affine_in_length(a in 0.1..30.0f64) {
                let h = 1e-3;
                let r = |x: f64| growth_rate(&bound_duck(x)).unwrap().growth_rate;
                let slope = (r(a + h) - r(a - h)) / (2.0 * h);
                let report = growth_rate(&bound_duck(a)).unwrap();
                let total: f64 = report.curves.iter().map(|c| c.coefficient).sum();
                prop_assert!((slope - total).abs() < 1e-10);
                prop_assert!(report.growth_rate >= 1.0);
            }

            #[test]
            fn sphere_ratio_is_exponential(a in 0.1..20.0f64, r in 0.0..10.0f64) {
                let spec = bound_duck(a);
                let rate = growth_rate(&spec).unwrap().growth_rate;
                let v = sphere_length_lower_bound(&spec, r).unwrap();
                let circle = circle_circumference_h2(r).unwrap();
                if circle > 0.0 {
                    prop_assert!(((v / circle) / (r * (rate - 1.0)).exp() - 1.0).abs() < 1e-14);
                }
            }

            #[test]
            fn rescale_invariant(n in 3usize..12, factor in 0.01..100.0f64, a in 0.1..10.0f64) {
                let spec = family_tori_on_solid_torus(n).unwrap().with_bindings([("a", a)]);
                let scaled = rescale_cycle(&spec, factor).unwrap();
                let x = growth_rate(&spec).unwrap().growth_rate;
                let y = growth_rate(&scaled).unwrap().growth_rate;
                prop_assert!((x - y).abs() < 1e-12);
                let bx = frame_length_bound(&spec).unwrap().uniform_maximum.unwrap();
                let by = frame_length_bound(&scaled).unwrap().uniform_maximum.unwrap();
                prop_assert!((bx - by).abs() < 1e-12 * bx);
            }
        }
    }
}
