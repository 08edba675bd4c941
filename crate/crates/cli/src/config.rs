//! Metric/connection config files.
//!
//! ```json
//! {
//!   "kind": "walker",
//!   "fields": { "g34": "x1*p + x2*q + s" },
//!   "defs": { "p": "lin_inv(1, 1, 0) * -2", "q": "0", "s": "x3*x4" },
//!   "points": [[0.3, -0.7, 1.1, 0.9]],
//!   "seed": 7,
//!   "thresholds": { "einstein": 1e-9 }
//! }
//! ```
//!
//! `kind` is `walker` (fields `g33`, `g34`, `g44`) or `affine_extension`
//! (fields `gamma33_3` ... `gamma44_4` and `xi33`, `xi34`, `xi44`, all in
//! `x3`, `x4`). Missing fields default to `"0"`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use walker_curvature::affine::{riemannian_extension, AffineConnection2};
use walker_curvature::fields::{parse_field_with, Bindings};
use walker_curvature::properties::{Thresholds, WarpFields};
use walker_curvature::{Error, ParseError, ScalarField, WalkerMetric};

use crate::CliError;

pub const WALKER_FIELDS: [&str; 3] = ["g33", "g34", "g44"];
pub const AFFINE_FIELDS: [&str; 9] =
    ["gamma33_3", "gamma33_4", "gamma34_3", "gamma34_4", "gamma44_3", "gamma44_4", "xi33", "xi34", "xi44"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Walker,
    AffineExtension,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub kind: Kind,
    #[serde(default)]
    pub fields: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub defs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

/// A config with every expression parsed.
pub struct Loaded {
    pub config: MetricConfig,
    pub metric: WalkerMetric,
    /// `p`, `q`, `s` from `defs`, when all three are given.
    pub warp: Option<WarpFields>,
    pub connection: Option<(AffineConnection2, [ScalarField; 3])>,
}

pub fn read(path: &Path) -> Result<MetricConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Parses `defs` in dependency order. A def may refer to other defs; cycles
/// are rejected.
pub fn resolve_defs(defs: &BTreeMap<String, String>, dim: usize) -> Result<Bindings, CliError> {
    fn visit(
        name: &str,
        defs: &BTreeMap<String, String>,
        dim: usize,
        done: &mut Bindings,
        stack: &mut Vec<String>,
    ) -> Result<(), CliError> {
        if done.contains_key(name) {
            return Ok(());
        }
        if stack.iter().any(|s| s == name) {
            stack.push(name.to_string());
            return Err(CliError::Usage(format!("cyclic definitions: {}", stack.join(" -> "))));
        }
        stack.push(name.to_string());
        let src = &defs[name];
        loop {
            match parse_field_with(src, dim, done) {
                Ok(f) => {
                    done.insert(name.to_string(), f);
                    break;
                }
                Err(ParseError::UnknownIdentifier { name: dep, .. }) if defs.contains_key(&dep) => {
                    visit(&dep, defs, dim, done, stack)?;
                }
                Err(e) => return Err(CliError::Usage(format!("def `{name}`: {e}"))),
            }
        }
        stack.pop();
        Ok(())
    }
    let mut done = Bindings::new();
    for name in defs.keys() {
        visit(name, defs, dim, &mut done, &mut Vec::new())?;
    }
    Ok(done)
}

fn parse_fields(config: &MetricConfig, names: &[&str], dim: usize) -> Result<(Bindings, Vec<ScalarField>), CliError> {
    let known: HashSet<&str> = names.iter().copied().collect();
    if let Some(bad) = config.fields.keys().find(|k| !known.contains(k.as_str())) {
        return Err(CliError::Usage(format!("unknown field `{bad}` for kind {:?}", config.kind)));
    }
    let bindings = resolve_defs(&config.defs, dim)?;
    let fields = names
        .iter()
        .map(|name| {
            let src = config.fields.get(*name).map(String::as_str).unwrap_or("0");
            parse_field_with(src, dim, &bindings).map_err(|e| CliError::Usage(format!("field `{name}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((bindings, fields))
}

pub fn load(config: MetricConfig) -> Result<Loaded, CliError> {
    match config.kind {
        Kind::Walker => {
            let (bindings, f) = parse_fields(&config, &WALKER_FIELDS, 4)?;
            let metric = WalkerMetric::new(f[0].clone(), f[2].clone(), f[1].clone());
            let warp = match (bindings.get("p"), bindings.get("q"), bindings.get("s")) {
                (Some(p), Some(q), Some(s)) => Some(WarpFields { p: p.clone(), q: q.clone(), s: s.clone() }),
                _ => None,
            };
            Ok(Loaded { config, metric, warp, connection: None })
        }
        Kind::AffineExtension => {
            let (_, f) = parse_fields(&config, &AFFINE_FIELDS, 2)?;
            let symbols: [ScalarField; 6] = std::array::from_fn(|k| f[k].clone());
            let xi: [ScalarField; 3] = std::array::from_fn(|k| f[6 + k].clone());
            let connection = AffineConnection2::new(symbols).map_err(CliError::from)?;
            let metric = riemannian_extension(&connection, xi.clone()).map_err(CliError::from)?;
            Ok(Loaded { config, metric, warp: None, connection: Some((connection, xi)) })
        }
    }
}

/// The walker-kind config of a deformed Riemannian extension.
pub fn extension_config(loaded: &Loaded) -> Result<MetricConfig, CliError> {
    if loaded.connection.is_none() {
        return Err(CliError::Usage("extend needs an affine_extension config".into()));
    }
    let m = &loaded.metric;
    let fields = WALKER_FIELDS.iter().zip([m.g33(), m.g34(), m.g44()]).map(|(k, f)| (k.to_string(), f.to_string()));
    Ok(MetricConfig {
        kind: Kind::Walker,
        fields: fields.collect(),
        defs: BTreeMap::new(),
        points: loaded.config.points.clone(),
        seed: loaded.config.seed,
        thresholds: loaded.config.thresholds.clone(),
    })
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(d) => CliError::Domain(d.to_string()),
            Error::Sampling(s) => CliError::Domain(s),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use walker_curvature::Point4;

    fn config(json: &str) -> MetricConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn defs_resolve_in_dependency_order() {
        let c = config(r#"{"kind":"walker","fields":{"g34":"x1*p + s"},"defs":{"p":"2*r","r":"x3","s":"p*x4"}}"#);
        let l = load(c).unwrap();
        let pt = Point4::new([1.0, 0.0, 2.0, 3.0]).unwrap();
        assert_eq!(l.metric.g34().eval(&pt).unwrap(), 4.0 + 12.0);
        assert!(l.warp.is_none());
    }

    #[test]
    fn cyclic_defs_are_rejected() {
        let c = config(r#"{"kind":"walker","fields":{"g34":"p"},"defs":{"p":"q + 1","q":"x1*p"}}"#);
        let Err(CliError::Usage(msg)) = load(c) else { panic!("cycle accepted") };
        assert!(msg.contains("cyclic"), "{msg}");
    }

    #[test]
    fn warp_from_defs() {
        let c = config(r#"{"kind":"walker","fields":{"g34":"x1*p + x2*q + s"},"defs":{"p":"1","q":"1","s":"x4^2"}}"#);
        assert!(load(c).unwrap().warp.is_some());
    }

    #[test]
    fn unknown_field_and_key() {
        assert!(load(config(r#"{"kind":"walker","fields":{"g12":"x1"}}"#)).is_err());
        assert!(serde_json::from_str::<MetricConfig>(r#"{"kind":"walker","extra":1}"#).is_err());
        assert!(serde_json::from_str::<MetricConfig>(r#"{"kind":"walker","thresholds":{"bogus":1}}"#).is_err());
    }

    #[test]
    fn affine_fields_must_be_base_only() {
        let c = config(r#"{"kind":"affine_extension","fields":{"gamma34_3":"x1"}}"#);
        assert!(matches!(load(c), Err(CliError::Usage(_))));
    }

    #[test]
    fn extension_round_trips() {
        let c = config(r#"{"kind":"affine_extension","fields":{"gamma34_3":"x3","gamma44_4":"x3","xi33":"x4^2"}}"#);
        let l = load(c).unwrap();
        let walker = load(extension_config(&l).unwrap()).unwrap();
        let pt = Point4::new([0.3, -0.7, 1.1, 0.9]).unwrap();
        let (a, b) = (l.metric.metric_jets(&pt).unwrap(), walker.metric.metric_jets(&pt).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[i][j].value - b[i][j].value).abs() <= 1e-12);
                for k in 0..4 {
                    assert!((a[i][j].grad[k] - b[i][j].grad[k]).abs() <= 1e-12);
                }
            }
        }
        assert!(!walker.metric.g44().is_zero());
    }
}
