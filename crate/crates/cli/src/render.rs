//! Text and JSON renderings. JSON goes through `serde_json::Value`, whose
//! maps are ordered, so every object comes out key-sorted.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use walker_curvature::properties::{PointAnalysis, PropertyEntry, Verdict};
use walker_curvature::suites::SuiteReport;
use walker_curvature::{Curvature, Matrix4, WalkerMetric};

use crate::CliError;

/// Round to 12 significant digits, then print the shortest form.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("float formatting round-trips");
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn point_text(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| sig12(*v)).collect();
    format!("({})", parts.join(", "))
}

fn matrix_text(out: &mut String, m: &Matrix4) {
    for row in &m.0 {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>20}", sig12(*v))).collect();
        let _ = writeln!(out, "  {}", cells.join(""));
    }
}

pub fn metric_json(m: &WalkerMetric) -> Value {
    json!({
        "g33": m.g33().to_string(),
        "g34": m.g34().to_string(),
        "g44": m.g44().to_string(),
        "restricted": m.is_restricted(),
    })
}

pub struct CurvatureView<'a> {
    pub metric: &'a WalkerMetric,
    pub point: [f64; 4],
    pub tensor: &'a Curvature,
    pub ricci_tensor: Matrix4,
    pub ricci_operator: Matrix4,
    pub scalar: f64,
}

pub const NONZERO: f64 = 1e-12;

impl CurvatureView<'_> {
    fn components(&self) -> Vec<([usize; 4], f64)> {
        self.tensor.independent_nonzero(NONZERO).into_iter().map(|(ix, v)| (ix.map(|i| i + 1), v)).collect()
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let m = self.metric;
        let _ = writeln!(out, "metric: g33 = {}, g34 = {}, g44 = {}", m.g33(), m.g34(), m.g44());
        let _ = writeln!(out, "point: {}", point_text(&self.point));
        let components = self.components();
        if components.is_empty() {
            let _ = writeln!(out, "no nonzero components");
        }
        for ([i, j, k, l], v) in components {
            let _ = writeln!(out, "R_{i}{j}{k}{l} = {}", sig12(v));
        }
        let _ = writeln!(out, "Ricci tensor:");
        matrix_text(&mut out, &self.ricci_tensor);
        let _ = writeln!(out, "Ricci operator:");
        matrix_text(&mut out, &self.ricci_operator);
        let _ = writeln!(out, "scalar curvature = {}", sig12(self.scalar));
        out
    }

    pub fn json(&self) -> Value {
        let components: Vec<Value> = self
            .components()
            .into_iter()
            .map(|([i, j, k, l], v)| json!({ "name": format!("R_{i}{j}{k}{l}"), "indices": [i, j, k, l], "value": v }))
            .collect();
        json!({
            "metric": metric_json(self.metric),
            "point": self.point,
            "components": components,
            "ricci_tensor": self.ricci_tensor.0,
            "ricci_operator": self.ricci_operator.0,
            "scalar_curvature": self.scalar,
        })
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
    }
}

fn entry_line(out: &mut String, e: &PropertyEntry) {
    let _ = write!(
        out,
        "  {:<22} {:>22} {:>14}  {}",
        e.property.name(),
        sig12(e.residual),
        sig12(e.threshold),
        verdict(e.verdict)
    );
    if let Some(spec) = &e.spectrum {
        let re: Vec<String> = spec.iter().map(|z| sig12(z.0)).collect();
        let _ = write!(out, "  spectrum {{{}}}", re.join(", "));
    }
    out.push('\n');
}

pub struct ReportView<'a> {
    pub metric: &'a WalkerMetric,
    pub seed: u64,
    pub points: &'a [PointAnalysis],
    pub summary: &'a [PropertyEntry],
    pub violations: &'a [String],
}

impl ReportView<'_> {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let m = self.metric;
        let _ = writeln!(out, "metric: g33 = {}, g34 = {}, g44 = {}", m.g33(), m.g34(), m.g44());
        let _ = writeln!(out, "seed: {}", self.seed);
        let header = format!("  {:<22} {:>22} {:>14}  verdict", "property", "residual", "threshold");
        for a in self.points {
            let _ = writeln!(out, "\npoint {}", point_text(&a.point));
            let _ = writeln!(out, "{header}");
            for e in &a.entries {
                entry_line(&mut out, e);
            }
        }
        let _ = writeln!(out, "\nworst over {} points", self.points.len());
        let _ = writeln!(out, "{header}");
        for e in self.summary {
            entry_line(&mut out, e);
        }
        if self.violations.is_empty() {
            let _ = writeln!(out, "\nimplications: consistent");
        } else {
            let _ = writeln!(out, "\nimplications violated:");
            for v in self.violations {
                let _ = writeln!(out, "  {v}");
            }
        }
        out
    }

    pub fn json(&self) -> Value {
        json!({
            "metric": metric_json(self.metric),
            "seed": self.seed,
            "points": self.points,
            "summary": self.summary,
            "violations": self.violations,
            "consistent": self.violations.is_empty(),
        })
    }
}

pub fn suite_text(r: &SuiteReport) -> String {
    let mut out = String::new();
    let c = &r.calibration;
    let _ = writeln!(
        out,
        "calibration: table sign {}, self-dual is plus {}, spectrum sign {}, operator rows are outputs {}",
        c.table_sign, c.self_dual_is_plus, c.spectrum_sign, c.operator_rows_are_outputs
    );
    for inst in &r.instances {
        let failed: Vec<_> = inst.checks.iter().filter(|c| !c.pass).collect();
        let _ = writeln!(
            out,
            "{} {} ({} checks, {} points)",
            if inst.pass { "PASS" } else { "FAIL" },
            inst.name,
            inst.checks.len(),
            inst.points.len()
        );
        for c in failed {
            let rel = match c.relation {
                walker_curvature::suites::Relation::AtMost => "<=",
                walker_curvature::suites::Relation::AtLeast => ">=",
            };
            let at = c.point.as_deref().map(point_text).unwrap_or_default();
            let _ = writeln!(out, "    {}: {} {rel} {} violated {at}", c.name, sig12(c.value), sig12(c.bound));
            if let Some(note) = &c.note {
                let _ = writeln!(out, "      {note}");
            }
        }
    }
    let _ = writeln!(out, "suite {} seed {}: {}", r.suite, r.seed, if r.pass { "pass" } else { "fail" });
    out
}
