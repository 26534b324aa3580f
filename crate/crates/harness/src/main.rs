use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use nsopo_core::constraints::{full_report, MaterialSpec};
use nsopo_harness::error::{HarnessError, Result};
use nsopo_harness::sweep::write_table;
use nsopo_harness::{preset, run, sweep, write_run, Axis, Format, ScenarioConfig, PRESETS};

#[derive(Parser)]
#[command(name = "nsopo", version, about = "Number-selective OPO simulator and feasibility calculator")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config file.
    Run { config: PathBuf },
    /// Run a named preset, or print its config with --emit-config.
    Preset {
        /// Preset name; `list` prints the available names.
        name: String,
        #[arg(long)]
        emit_config: bool,
    },
    /// Cartesian-product sweep over config fields.
    Sweep {
        config: PathBuf,
        /// `dotted.path=v1,v2,...`; repeat for more axes.
        #[arg(long, required = true)]
        axis: Vec<String>,
    },
    /// Material feasibility report.
    Constraints { material: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn run_and_write(cfg: &ScenarioConfig, cli: &Cli) -> Result<()> {
    let r = run(cfg)?;
    for p in write_run(&r, &cli.out, cli.format)? {
        info!("wrote {}", p.display());
    }
    if let Some(c) = &r.constraints {
        print!("{}", c.to_table());
    }
    println!("{}", cli.out.join(&r.metadata.name).display());
    Ok(())
}

fn execute(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::from_json(&read(config)?)?;
            run_and_write(&cfg, cli)?;
        }
        Command::Preset { name, .. } if name == "list" => {
            for p in PRESETS {
                println!("{p}");
            }
        }
        Command::Preset { name, emit_config } => {
            let cfg = preset(name)?;
            if *emit_config {
                println!("{}", cfg.to_json());
            } else {
                run_and_write(&cfg, cli)?;
            }
        }
        Command::Sweep { config, axis } => {
            let cfg = ScenarioConfig::from_json(&read(config)?)?;
            let axes = axis.iter().map(|a| a.parse()).collect::<Result<Vec<Axis>>>()?;
            let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let table = sweep(&cfg, &axes, workers)?;
            let dir = cli.out.join(&cfg.name);
            fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
            let path = dir.join("sweep.csv");
            write_table(&table, &path)?;
            if table.failures > 0 {
                log::warn!("{} of the grid points failed; see the error column", table.failures);
            }
            println!("{}", path.display());
        }
        Command::Constraints { material } => {
            let text = read(material)?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let spec: MaterialSpec = serde_path_to_error::deserialize(de)
                .map_err(|e| HarnessError::Config { path: e.path().to_string(), message: e.inner().to_string() })?;
            let report = full_report(&spec).map_err(|e| HarnessError::core("constraint report", e))?;
            fs::create_dir_all(&cli.out).map_err(|e| HarnessError::io(&cli.out, e))?;
            let json = cli.out.join("constraints.json");
            fs::write(&json, serde_json::to_string_pretty(&report)?).map_err(|e| HarnessError::io(&json, e))?;
            print!("{}", report.to_table());
            if !report.overall_pass {
                return Ok(3);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("nsopo").chain(args.iter().copied())).unwrap()
    }

    fn exec(args: &[&str]) -> std::result::Result<u8, i32> {
        execute(&cli(args)).map_err(|e| e.exit_code())
    }

    fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
        let mut out = BTreeMap::new();
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap());
        }
        out
    }

    fn small_loss_config(dir: &Path) -> PathBuf {
        let text = r#"{"name": "small-loss",
            "initial": {"kind": "coherent", "alpha": [1.0, 0.0], "truncation": 12},
            "shaping": {"xi": [0.0, -0.3], "gamma": 0.9, "n_center": 1, "tau": 1.0},
            "loss": {"strength_to_loss": [30, 100, 300], "samples": 9, "n_steps": 180}}"#;
        let p = dir.join("small-loss.json");
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn identical_runs_are_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
        for d in [&a, &b] {
            assert_eq!(exec(&["--out", d.to_str().unwrap(), "preset", "fig2-a"]), Ok(0));
        }
        let fa = files(&a.join("fig2-a"));
        assert!(fa.contains_key("distribution.csv") && fa.contains_key("meta.json"));
        assert_eq!(fa, files(&b.join("fig2-a")));
    }

    #[test]
    fn preset_replays_from_its_metadata() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("first");
        assert_eq!(exec(&["--out", out.to_str().unwrap(), "preset", "fig3-b"]), Ok(0));
        let meta: serde_json::Value =
            serde_json::from_slice(&fs::read(out.join("fig3-b/meta.json")).unwrap()).unwrap();
        let cfg_path = tmp.path().join("replay.json");
        fs::write(&cfg_path, meta["config"].to_string()).unwrap();
        let again = tmp.path().join("again");
        assert_eq!(exec(&["--out", again.to_str().unwrap(), "run", cfg_path.to_str().unwrap()]), Ok(0));
        assert_eq!(files(&out.join("fig3-b")), files(&again.join("fig3-b")));
        assert_eq!(ScenarioConfig::from_json(&meta["config"].to_string()).unwrap(), preset("fig3-b").unwrap());
    }

    #[test]
    fn json_format_bundles_observables() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().to_str().unwrap();
        assert_eq!(exec(&["--out", out, "--format", "json", "preset", "fig2-b"]), Ok(0));
        let f = files(&tmp.path().join("fig2-b"));
        assert_eq!(f.keys().collect::<Vec<_>>(), ["meta.json", "result.json"]);
        let v: serde_json::Value = serde_json::from_slice(&f["result.json"]).unwrap();
        assert!(v["distribution"].is_object() || v["distribution"].is_array());
    }

    #[test]
    fn loss_sweep_gives_monotone_curves() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = small_loss_config(tmp.path());
        let mut tables = Vec::new();
        for workers in ["1", "8"] {
            let out = tmp.path().join(workers);
            let args =
                ["--out", out.to_str().unwrap(), "--workers", workers, "sweep", cfg.to_str().unwrap(), "--axis", "loss.samples=9"];
            assert_eq!(exec(&args), Ok(0));
            tables.push(fs::read(out.join("small-loss/sweep.csv")).unwrap());
        }
        assert_eq!(tables[0], tables[1]);

        let mut rd = csv::Reader::from_reader(tables[0].as_slice());
        let head = rd.headers().unwrap().clone();
        let col = |n: &str| head.iter().position(|h| h == n).unwrap();
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 27);
        for ratio in ["30", "100", "300"] {
            let inf: Vec<f64> = rows
                .iter()
                .filter(|r| &r[col("strength_to_loss")] == ratio)
                .map(|r| r[col("infidelity")].parse().unwrap())
                .collect();
            assert_eq!(inf.len(), 9);
            assert!(inf.windows(2).all(|w| w[1] > w[0]), "{ratio}: {inf:?}");
        }
    }

    #[test]
    fn sweep_grid_with_parallel_workers_matches_serial() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tmp.path().join("c.json");
        fs::write(&cfg, preset("fig2-a").unwrap().to_json()).unwrap();
        let mut tables = Vec::new();
        for workers in ["1", "8"] {
            let out = tmp.path().join(workers);
            let args = [
                "--out",
                out.to_str().unwrap(),
                "--workers",
                workers,
                "sweep",
                cfg.to_str().unwrap(),
                "--axis",
                "shaping.n_center=49,50,51",
                "--axis",
                "shaping.xi.1=-0.09,-0.107",
            ];
            assert_eq!(exec(&args), Ok(0));
            tables.push(fs::read_to_string(out.join("fig2-a/sweep.csv")).unwrap());
        }
        assert_eq!(tables[0], tables[1]);
        assert_eq!(tables[0].lines().count(), 7);
    }

    #[test]
    fn exit_codes() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().to_str().unwrap();

        let bad = tmp.path().join("bad.json");
        fs::write(&bad, r#"{"name": "x", "initial": {"kind": "coherent", "alpha": [1, 0]}}"#).unwrap();
        assert_eq!(exec(&["--out", out, "run", bad.to_str().unwrap()]), Err(1));
        assert_eq!(exec(&["--out", out, "preset", "fig9"]), Err(1));
        assert_eq!(exec(&["--out", out, "run", "/nonexistent/config.json"]), Err(1));

        // Strong shaping pushes weight onto the truncation edge.
        let edge = tmp.path().join("edge.json");
        fs::write(
            &edge,
            r#"{"name": "edge", "initial": {"kind": "coherent", "alpha": [1.0, 0.0], "truncation": 12},
                "shaping": {"xi": [0.0, -40.0], "gamma": 1.0, "n_center": 2, "tau": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(exec(&["--out", out, "run", edge.to_str().unwrap()]), Err(2));

        let material = tmp.path().join("appendix.json");
        fs::write(&material, serde_json::to_string(&nsopo_core::constraints::appendix_spec()).unwrap()).unwrap();
        assert_eq!(exec(&["--out", out, "constraints", material.to_str().unwrap()]), Ok(3));
        assert!(tmp.path().join("constraints.json").exists());
    }

    #[test]
    fn preset_list_and_emit() {
        assert_eq!(exec(&["preset", "list"]), Ok(0));
        assert_eq!(exec(&["preset", "loss-curves", "--emit-config"]), Ok(0));
    }
}
