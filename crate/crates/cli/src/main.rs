use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;

use geotomo::experiment::{run_cells, run_experiment, write_suite_csv, ExperimentConfig, Suite, SuiteOptions};
use geotomo::Exec;

/// Simulate and invert geodesic X-ray transforms of k-differentials on the unit disc.
#[derive(Parser, Debug)]
#[command(name = "geotomo", version)]
struct Args {
    /// key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// euclidean, cpc:R, cnc:R or lens:STRENGTH
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i32>,
    /// ik or ikperp
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a sweep instead of a single experiment (exp1..exp4, comma-separated).
    #[arg(long)]
    suite: Option<String>,
    /// Extra artifacts: any of sino,grids,images (comma-separated).
    #[arg(long)]
    emit: Option<String>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("metric", args.metric.clone()),
        ("k", args.k.map(|v| v.to_string())),
        ("mode", args.mode.clone()),
        ("n", args.n.map(|v| v.to_string())),
        ("dt", args.dt.map(|v| v.to_string())),
        ("iters", args.iters.map(|v| v.to_string())),
        ("emit", args.emit.clone()),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v).with_context(|| format!("--{key}"))?;
        }
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    let exec = if args.sequential { Exec::Sequential } else { Exec::Parallel };

    if let Some(names) = &args.suite {
        let suites = names.split(',').map(str::parse).collect::<geotomo::Result<Vec<Suite>>>()?;
        if suites.is_empty() {
            bail!("--suite needs at least one name");
        }
        let opts = SuiteOptions {
            n: cfg.n,
            dt: cfg.dt,
            iters: cfg.iters,
            k_filter: args.k.map(|k| vec![k]),
            bumps: cfg.bumps.clone(),
            exec,
        };
        let cells: Vec<_> = suites.iter().flat_map(|s| s.cells()).collect();
        let rows = run_cells(&cells, &opts)?;
        fs::create_dir_all(&cfg.out)?;
        let tag = suites.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("_");
        let path = cfg.out.join(format!("suite_{tag}.csv"));
        write_suite_csv(BufWriter::new(File::create(&path)?), &rows)?;
        for r in &rows {
            println!("{} {} k={} {}: rel_l2={} {}", r.cell.suite, r.cell.metric, r.cell.k, r.cell.mode, r.final_rel_l2(), r.regime);
        }
        println!("summary written to {}", path.display());
        return Ok(());
    }

    let outcome = run_experiment(&cfg, exec)?;
    println!("rel_l2={}", outcome.final_rel_l2());
    Ok(())
}
