//! Flat CSV reports and the line-delimited event log.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::bound::{BoundResult, GrowthReport};
use crate::sim::{CrossingEvent, SimEstimates};
use crate::surface::Side;

/// `x` rounded to 12 significant digits, printed in shortest form.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

pub const SIM_CSV_HEADER: &str =
    "kind,name,side,count,value,std_error,cost,flux_prediction,half_constant_prediction";

/// One row per curve side, then summary rows, then one row per sphere radius.
pub fn sim_csv(est: &SimEstimates) -> String {
    let mut out = String::new();
    writeln!(out, "{SIM_CSV_HEADER}").unwrap();
    for r in &est.crossing_rates {
        writeln!(
            out,
            "rate,{},{},{},{},{},{},{},{}",
            r.curve,
            side_name(r.side),
            r.count,
            sig12(r.rate),
            sig12(r.std_error),
            sig12(r.cost),
            sig12(r.flux_prediction),
            sig12(r.half_constant_prediction)
        )
        .unwrap();
    }
    let summary = [
        ("seed", est.seed.to_string()),
        ("trajectories", est.trajectories.to_string()),
        ("discarded", est.discarded.to_string()),
    ];
    for (name, count) in summary {
        writeln!(out, "summary,{name},,{count},,,,,").unwrap();
    }
    writeln!(out, "summary,trajectory_length,,,{},,,,", sig12(est.trajectory_length)).unwrap();
    writeln!(out, "summary,crossings,,{},,,,,", est.crossings).unwrap();
    writeln!(out, "summary,total_length,,,{},,,,", sig12(est.total_length)).unwrap();
    writeln!(
        out,
        "summary,entropy_rate,,,{},{},,{},{}",
        sig12(est.entropy_rate),
        sig12(est.entropy_std_error),
        sig12(est.flux_entropy_prediction),
        sig12(est.half_constant_entropy_prediction)
    )
    .unwrap();
    writeln!(out, "summary,entropy_from_crossings,,,{},,,,", sig12(est.entropy_from_crossings)).unwrap();
    for s in &est.sphere {
        writeln!(
            out,
            "sphere,{},{},{},{},{},,{},",
            sig12(s.radius),
            s.sheet,
            s.directions,
            sig12(s.estimate),
            sig12(s.std_error),
            sig12(s.jensen_lower)
        )
        .unwrap();
        writeln!(
            out,
            "sphere_degree_weighted,{},{},{},{},,,,",
            sig12(s.radius),
            s.sheet,
            s.directions,
            sig12(s.degree_weighted)
        )
        .unwrap();
    }
    out
}

pub const BOUND_CSV_HEADER: &str = "kind,name,value,coefficient,cost";

/// Growth coefficients and length maxima as flat rows.
pub fn bound_csv(growth: &GrowthReport, bound: &BoundResult) -> String {
    let mut out = String::new();
    writeln!(out, "{BOUND_CSV_HEADER}").unwrap();
    writeln!(out, "summary,mass,{},,", sig12(growth.mass)).unwrap();
    writeln!(out, "summary,growth_rate,{},,", sig12(growth.growth_rate)).unwrap();
    writeln!(out, "summary,uniform_maximum,{},,", opt(bound.uniform_maximum)).unwrap();
    writeln!(out, "summary,unbounded,{},,", bound.unbounded).unwrap();
    for c in &growth.curves {
        writeln!(out, "curve,{},{},{},{}", c.id, opt(c.length), sig12(c.coefficient), sig12(c.cost)).unwrap();
    }
    for c in &bound.per_curve {
        writeln!(out, "curve_maximum,{},{},{},", c.id, opt(c.max_length), sig12(c.coefficient)).unwrap();
    }
    for p in &bound.per_parameter {
        writeln!(out, "parameter_maximum,{},{},{},", p.name, opt(p.max_length), sig12(p.coefficient)).unwrap();
    }
    if let Some(f) = &growth.family {
        writeln!(out, "family,formula_bound,{},,", sig12(f.formula_bound)).unwrap();
        writeln!(out, "family,closed_form_bound,{},,", sig12(f.closed_form_bound)).unwrap();
        writeln!(out, "family,ratio,{},,", sig12(f.ratio)).unwrap();
    }
    out
}

#[derive(Serialize)]
struct EventLine<'a> {
    trajectory: u64,
    arclength: f64,
    curve: &'a str,
    from: &'a str,
    to: &'a str,
    p: f64,
    side: Side,
    incidence_angle: f64,
}

/// Writes one JSON object per crossing, newline-terminated.
pub fn write_event_log<W: Write>(mut w: W, events: &[CrossingEvent]) -> io::Result<()> {
    for e in events {
        let line = EventLine {
            trajectory: e.trajectory,
            arclength: e.arclength,
            curve: &e.curve,
            from: &e.from_sheet,
            to: &e.to_sheet,
            p: e.probability,
            side: e.side,
            incidence_angle: e.incidence_angle,
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
