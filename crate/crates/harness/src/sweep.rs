//! Cartesian-product parameter sweeps over config fields.
//!
//! Runs are independent and executed on a worker pool; results are gathered
//! back in grid order, so the table does not depend on the worker count.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::error::{HarnessError, Result};
use crate::run::run;

/// `path=v1,v2,...` with a dotted path into the config JSON. Values are
/// parsed as JSON where possible and kept as strings otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

impl FromStr for Axis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |message: &str| HarnessError::Config { path: format!("--axis {s}"), message: message.into() };
        let (path, vals) = s.split_once('=').ok_or_else(|| bad("expected key=v1,v2,..."))?;
        if path.is_empty() {
            return Err(bad("empty key"));
        }
        let values: Vec<Value> = vals
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.into())))
            .collect();
        if values.is_empty() {
            return Err(bad("no values"));
        }
        Ok(Axis { path: path.into(), values })
    }
}

fn set_path(root: &mut Value, path: &str, new: Value) -> Result<()> {
    let missing = || HarnessError::Config { path: path.into(), message: "no such field in the base config".into() };
    let mut cur = root;
    for key in path.split('.') {
        cur = match cur {
            Value::Object(map) => map.get_mut(key).ok_or_else(missing)?,
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| missing())?;
                items.get_mut(i).ok_or_else(missing)?
            }
            _ => return Err(missing()),
        };
    }
    *cur = new;
    Ok(())
}

/// All grid points in row-major order (last axis fastest).
pub fn expand(base: &ScenarioConfig, axes: &[Axis]) -> Result<Vec<(Vec<Value>, ScenarioConfig)>> {
    let base_json = serde_json::to_value(base)?;
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = vec![Value::Null; axes.len()];
        for (k, a) in axes.iter().enumerate().rev() {
            coords[k] = a.values[rem % a.values.len()].clone();
            rem /= a.values.len();
        }
        let mut v = base_json.clone();
        for (a, c) in axes.iter().zip(&coords) {
            set_path(&mut v, &a.path, c.clone())?;
        }
        let mut cfg = ScenarioConfig::from_json(&v.to_string()).map_err(|e| match e {
            HarnessError::Config { path, message } => HarnessError::Config {
                path,
                message: format!("{message} (grid point {idx})"),
            },
            other => other,
        })?;
        if total > 1 {
            cfg.name = format!("{}-{idx:04}", base.name);
        }
        out.push((coords, cfg));
    }
    Ok(out)
}

/// Sweep output: one or more rows per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub failures: usize,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn metric_rows(cfg: &ScenarioConfig) -> std::result::Result<Vec<BTreeMap<String, String>>, String> {
    let r = run(cfg).map_err(|e| e.to_string())?;
    let summary = serde_json::to_value(&r.metadata.summary).map_err(|e| e.to_string())?;
    let mut base = BTreeMap::new();
    if let Value::Object(map) = summary {
        for (k, v) in map {
            if let Value::Array(items) = &v {
                for (i, x) in items.iter().enumerate() {
                    base.insert(format!("{k}_{i}"), cell(x));
                }
            } else {
                base.insert(k, cell(&v));
            }
        }
    }
    match &r.loss {
        Some(rows) if !rows.is_empty() => Ok(rows
            .iter()
            .map(|l| {
                let mut m = base.clone();
                m.insert("strength_to_loss".into(), l.strength_to_loss.to_string());
                m.insert("gamma_t".into(), l.gamma_t.to_string());
                m.insert("infidelity".into(), l.infidelity.to_string());
                m.insert("purity".into(), l.purity.to_string());
                m
            })
            .collect()),
        _ => Ok(vec![base]),
    }
}

/// Runs every grid point on `workers` threads. A failing point becomes a row
/// with `status = error` and does not stop the others.
pub fn sweep(base: &ScenarioConfig, axes: &[Axis], workers: usize) -> Result<SweepTable> {
    let points = expand(base, axes)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config { path: "--workers".into(), message: e.to_string() })?;
    let results: Vec<_> = pool.install(|| points.par_iter().map(|(_, cfg)| metric_rows(cfg)).collect());

    let mut metric_names = BTreeSet::new();
    for rows in results.iter().flatten() {
        for r in rows {
            metric_names.extend(r.keys().cloned());
        }
    }
    let mut columns: Vec<String> = axes.iter().map(|a| a.path.clone()).collect();
    columns.push("status".into());
    columns.extend(metric_names.iter().cloned());
    columns.push("error".into());

    let mut table = Vec::new();
    let mut failures = 0;
    for ((coords, _), res) in points.iter().zip(&results) {
        let lead: Vec<String> = coords.iter().map(cell).collect();
        match res {
            Ok(rows) => {
                for r in rows {
                    let mut row = lead.clone();
                    row.push("ok".into());
                    row.extend(metric_names.iter().map(|k| r.get(k).cloned().unwrap_or_default()));
                    row.push(String::new());
                    table.push(row);
                }
            }
            Err(msg) => {
                failures += 1;
                let mut row = lead.clone();
                row.push("error".into());
                row.extend(metric_names.iter().map(|_| String::new()));
                row.push(msg.clone());
                table.push(row);
            }
        }
    }
    Ok(SweepTable { columns, rows: table, failures })
}

pub fn write_table(table: &SweepTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioConfig {
        ScenarioConfig::from_json(
            r#"{"name": "s", "initial": {"kind": "coherent", "alpha": [1.0, 0.0], "truncation": 12},
                "shaping": {"xi": [0.0, -0.2], "gamma": 1.0, "n_center": 2, "tau": 1.0},
                "evolve": {"n_steps": 200}}"#,
        )
        .unwrap()
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = "shaping.tau=0.5,1,2".parse().unwrap();
        assert_eq!(a.values.len(), 3);
        assert_eq!(a.values[1], serde_json::json!(1));
        assert!("novalue".parse::<Axis>().is_err());
        assert!("k=".parse::<Axis>().is_err());
    }

    #[test]
    fn grid_order_and_unknown_paths() {
        let axes = vec!["shaping.tau=0.5,1".parse().unwrap(), "shaping.n_center=1,2,3".parse().unwrap()];
        let pts = expand(&base(), &axes).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1].1.shaping.as_ref().unwrap().n_center, 2);
        assert_eq!(pts[3].1.shaping.as_ref().unwrap().tau, 1.0);
        let bad = vec!["shaping.nope=1".parse().unwrap()];
        assert!(expand(&base(), &bad).is_err());
    }

    #[test]
    fn one_point_sweep_equals_run() {
        let axes = vec!["shaping.tau=1.0".parse().unwrap()];
        let t = sweep(&base(), &axes, 1).unwrap();
        assert_eq!(t.rows.len(), 1);
        let r = run(&base()).unwrap();
        let col = t.columns.iter().position(|c| c == "mean_m").unwrap();
        assert_eq!(t.rows[0][col], r.metadata.summary.mean_m.unwrap().to_string());
    }

    #[test]
    fn failures_are_isolated() {
        // The large truncation-edge state trips the boundary guard.
        let axes = vec!["shaping.xi.1=-0.2,-40".parse().unwrap()];
        let t = sweep(&base(), &axes, 2).unwrap();
        assert_eq!(t.failures, 1);
        let status = t.columns.iter().position(|c| c == "status").unwrap();
        assert_eq!(t.rows[0][status], "ok");
        assert_eq!(t.rows[1][status], "error");
    }

    #[test]
    fn worker_count_does_not_change_table() {
        let axes = vec!["shaping.n_center=0,1,2,3,4,5".parse().unwrap()];
        assert_eq!(sweep(&base(), &axes, 1).unwrap(), sweep(&base(), &axes, 4).unwrap());
    }
}
