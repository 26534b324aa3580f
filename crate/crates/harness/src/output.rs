//! Result emission. Floats use Rust's shortest round-trip formatting, so
//! identical runs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::run::RunResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

fn csv_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

/// Writes the run's outputs into `dir/<name>/` and returns the files written.
///
/// CSV format gives one file per observable; JSON bundles them into
/// `result.json`. Either way `meta.json` carries the config and its hash.
pub fn write_run(result: &RunResult, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let run_dir = dir.join(&result.metadata.name);
    fs::create_dir_all(&run_dir).map_err(|e| HarnessError::io(&run_dir, e))?;
    let mut written = Vec::new();

    let meta = run_dir.join("meta.json");
    write_file(&meta, serde_json::to_string_pretty(&result.metadata)?.as_bytes())?;
    written.push(meta);

    if format == Format::Json {
        let p = run_dir.join("result.json");
        write_file(&p, serde_json::to_string_pretty(result)?.as_bytes())?;
        written.push(p);
        return Ok(written);
    }

    if let (Some(d), Some(state)) = (&result.distribution, &result.final_state) {
        let p = run_dir.join("distribution.csv");
        let rows = state.amplitudes().iter().enumerate().map(|(m, c)| {
            vec![m.to_string(), d.get(m).to_string(), c.re.to_string(), c.im.to_string()]
        });
        csv_file(&p, &["m", "P", "re_c", "im_c"], rows)?;
        written.push(p);
    }
    if let Some(e) = &result.envelope {
        let p = run_dir.join("envelope.csv");
        let rows = e.probabilities().iter().enumerate().map(|(m, v)| vec![m.to_string(), v.to_string()]);
        csv_file(&p, &["m", "P_envelope"], rows)?;
        written.push(p);
    }
    if let Some(r) = &result.peaks {
        let p = run_dir.join("peaks.csv");
        let rows = r.locations.iter().zip(&r.heights).enumerate().map(|(k, (m, h))| {
            let gap = if k == 0 { String::new() } else { r.spacings[k - 1].to_string() };
            vec![m.to_string(), h.to_string(), gap]
        });
        csv_file(&p, &["m", "P", "spacing"], rows)?;
        written.push(p);
    }
    if let Some(w) = &result.wigner {
        let p = run_dir.join("wigner.csv");
        let g = &w.grid;
        let rows = g.ps.iter().enumerate().flat_map(|(ip, pv)| {
            g.xs.iter()
                .enumerate()
                .map(move |(ix, xv)| vec![xv.to_string(), pv.to_string(), g.get(ix, ip).to_string()])
        });
        csv_file(&p, &["x", "p", "W"], rows)?;
        written.push(p);
    }
    if let Some(rows) = &result.loss {
        let p = run_dir.join("loss.csv");
        let rows = rows.iter().map(|r| {
            vec![
                r.strength_to_loss.to_string(),
                r.gamma_t.to_string(),
                r.t.to_string(),
                r.infidelity.to_string(),
                r.purity.to_string(),
            ]
        });
        csv_file(&p, &["strength_to_loss", "gamma_t", "t", "infidelity", "purity"], rows)?;
        written.push(p);
    }
    if let Some(c) = &result.constraints {
        let p = run_dir.join("constraints.csv");
        let rows = c.constraints.iter().map(|e| {
            vec![e.name.clone(), e.value.to_string(), e.bound.to_string(), e.margin.to_string(), e.pass.to_string()]
        });
        csv_file(&p, &["constraint", "value", "bound", "margin", "pass"], rows)?;
        written.push(p);
    }
    Ok(written)
}
