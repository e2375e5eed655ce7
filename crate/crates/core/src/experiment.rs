//! Experiment driver: config parsing, single runs and the parameter sweeps.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{make_phantom, Bump, PhantomSpec, ScalarGrid};
use crate::io::{write_errors_csv, write_grid_csv, write_pgm, write_sinogram_csv, SinogramHeader};
use crate::jacobi::{boundary_diameter, write_kernel_csv};
use crate::metrics::{MetricModel, Point, LENS_DEFAULT_CENTER, LENS_DEFAULT_SIGMA};
use crate::reconstruction::{ErrorHistory, Mode, ReconstructionConfig, Reconstructor};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EmitFlags {
    pub sinograms: bool,
    pub grids: bool,
    pub images: bool,
}

impl EmitFlags {
    /// Parses a comma-separated subset of `sino,grids,images`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut flags = Self::default();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            match item {
                "sino" => flags.sinograms = true,
                "grids" => flags.grids = true,
                "images" => flags.images = true,
                other => return Err(Error::Parse(format!("unknown emit flag '{other}'"))),
            }
        }
        Ok(flags)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// `euclidean`, `cpc:R`, `cnc:R` or `lens:ℓ`.
    pub metric: String,
    pub lens_sigma: f64,
    pub lens_center: Point,
    pub k: i32,
    pub mode: Mode,
    pub n: usize,
    /// Defaults to `1/n`.
    pub dt: Option<f64>,
    pub iters: usize,
    /// `None` selects the default three-bump phantom.
    pub bumps: Option<Vec<Bump>>,
    pub out: PathBuf,
    pub emit: EmitFlags,
    /// Dump `a, b, q_k/b` along four diameters.
    pub debug_jacobi: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            metric: "euclidean".into(),
            lens_sigma: LENS_DEFAULT_SIGMA,
            lens_center: LENS_DEFAULT_CENTER,
            k: 3,
            mode: Mode::InvertIk,
            n: 128,
            dt: None,
            iters: 10,
            bumps: None,
            out: PathBuf::from("out"),
            emit: EmitFlags::default(),
            debug_jacobi: false,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse(format!("bad value '{value}' for key '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        other => Err(Error::Parse(format!("bad boolean '{other}' for key '{key}'"))),
    }
}

impl ExperimentConfig {
    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut bumps: BTreeMap<usize, [Option<f64>; 4]> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key=value", no + 1)))?;
            cfg.set_with(key.trim(), value.trim(), &mut bumps).map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
        }
        cfg.finish_bumps(bumps)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Applies one `key=value` override (same keys as the file format, bumps excluded).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key.starts_with("bump.") {
            return Err(Error::Parse(format!("'{key}' can only be set in a config file")));
        }
        self.set_with(key, value, &mut BTreeMap::new())
    }

    fn set_with(&mut self, key: &str, value: &str, bumps: &mut BTreeMap<usize, [Option<f64>; 4]>) -> Result<()> {
        match key {
            "metric" => {
                value.parse::<MetricModel>()?;
                self.metric = value.to_string();
            }
            "k" => self.k = parse_value(key, value)?,
            "mode" => self.mode = value.parse()?,
            "n" => self.n = parse_value(key, value)?,
            "dt" => self.dt = Some(parse_value(key, value)?),
            "iters" => self.iters = parse_value(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "emit" => self.emit = EmitFlags::parse(value)?,
            "lens.sigma" => self.lens_sigma = parse_value(key, value)?,
            "lens.cx" => self.lens_center.x = parse_value(key, value)?,
            "lens.cy" => self.lens_center.y = parse_value(key, value)?,
            "debug.jacobi" => self.debug_jacobi = parse_bool(key, value)?,
            _ => {
                let parts: Vec<&str> = key.split('.').collect();
                let [prefix, index, field] = parts[..] else {
                    return Err(Error::Parse(format!("unknown key '{key}'")));
                };
                let slot = match field {
                    "cx" => 0,
                    "cy" => 1,
                    "amp" => 2,
                    "width" => 3,
                    _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
                };
                if prefix != "bump" {
                    return Err(Error::Parse(format!("unknown key '{key}'")));
                }
                let index: usize = parse_value(key, index)?;
                bumps.entry(index).or_default()[slot] = Some(parse_value(key, value)?);
            }
        }
        Ok(())
    }

    fn finish_bumps(&mut self, bumps: BTreeMap<usize, [Option<f64>; 4]>) -> Result<()> {
        if bumps.is_empty() {
            return Ok(());
        }
        let mut list = Vec::with_capacity(bumps.len());
        for (i, fields) in bumps {
            let [Some(cx), Some(cy), Some(amp), Some(width)] = fields else {
                return Err(Error::Parse(format!("bump.{i} needs cx, cy, amp and width")));
            };
            list.push(Bump { center: Point::new(cx, cy), amplitude: amp, width });
        }
        self.bumps = Some(list);
        Ok(())
    }

    pub fn metric_model(&self) -> Result<MetricModel> {
        match self.metric.parse::<MetricModel>()? {
            MetricModel::Lens { strength, .. } => MetricModel::lens_with(strength, self.lens_sigma, self.lens_center),
            m => Ok(m),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(1.0 / self.n as f64)
    }

    pub fn phantom_spec(&self) -> PhantomSpec {
        let mut spec = PhantomSpec::default_for(self.n);
        if let Some(b) = &self.bumps {
            spec.bumps = b.clone();
        }
        spec
    }

    pub fn reconstruction_config(&self) -> ReconstructionConfig {
        let mut rc = ReconstructionConfig::new(self.k, self.mode, self.n);
        rc.dt = self.dt();
        rc.iters = self.iters;
        rc
    }
}

/// Convergence label of an error history.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Converging,
    NotConverging,
    Diverging,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::Converging => "CONV",
            Regime::NotConverging => "NC",
            Regime::Diverging => "DV",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// CONV: final error below 10% and non-increasing over the last three iterates.
/// DV: final error above 30% and strictly increasing over them. NC otherwise.
pub fn classify(rel_l2: &[f64]) -> Regime {
    let Some(&last) = rel_l2.last() else {
        return Regime::NotConverging;
    };
    let tail = &rel_l2[rel_l2.len().saturating_sub(3)..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let increasing = tail.len() > 1 && tail.windows(2).all(|w| w[1] > w[0]);
    if last < 0.10 && non_increasing {
        Regime::Converging
    } else if last > 0.30 && increasing {
        Regime::Diverging
    } else {
        Regime::NotConverging
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub history: ErrorHistory,
    pub reconstruction: ScalarGrid,
    pub truth: ScalarGrid,
}

impl ExperimentOutcome {
    pub fn final_rel_l2(&self) -> f64 {
        self.history.rel_l2.last().copied().unwrap_or(f64::NAN)
    }
}

fn real_parts(g: &ScalarGrid) -> Vec<f64> {
    g.values.iter().map(|v| v.re).collect()
}

/// Phantom, forward data, Neumann inversion and artifacts in `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentOutcome> {
    let metric = cfg.metric_model()?;
    let spec = cfg.phantom_spec();
    let truth = make_phantom(&spec)?;
    let mut rc = cfg.reconstruction_config();
    rc.exec = exec;
    rc.eps_mask = spec.eps_mask;
    fs::create_dir_all(&cfg.out)?;
    log::info!("{metric}, k = {}, mode = {}, n = {}, dt = {}", cfg.k, cfg.mode, cfg.n, rc.dt);
    let recon = Reconstructor::new(metric, rc)?;
    let data = recon.forward(&truth);
    if cfg.emit.sinograms {
        let header = SinogramHeader { n: cfg.n, k: cfg.k, metric: cfg.metric.clone(), dt: cfg.dt() };
        write_sinogram_csv(&cfg.out.join("sinogram"), &data, &header)?;
    }
    if cfg.debug_jacobi {
        for (i, phi) in [0.0, 0.5, 1.0, 1.5].into_iter().enumerate() {
            let (x, theta) = boundary_diameter(phi * std::f64::consts::PI);
            let file = BufWriter::new(File::create(cfg.out.join(format!("jacobi_{i}.csv")))?);
            write_kernel_csv(&metric, Point::new(0.999 * x.x, 0.999 * x.y), theta, cfg.k, 1e-3, file)?;
        }
    }
    let emit = cfg.emit;
    let out = cfg.out.clone();
    let (reconstruction, history) = recon.neumann_with(&data, Some(&truth), |p, s| {
        if emit.grids {
            write_grid_csv(&out.join(format!("recon_iter{p:02}")), s)?;
        }
        Ok(())
    })?;
    write_errors_csv(BufWriter::new(File::create(cfg.out.join("errors.csv"))?), &history)?;
    write_grid_csv(&cfg.out.join("recon"), &reconstruction)?;
    if cfg.emit.images {
        write_pgm(&cfg.out.join("phantom.pgm"), &real_parts(&truth), cfg.n)?;
        write_pgm(&cfg.out.join("recon.pgm"), &real_parts(&reconstruction), cfg.n)?;
        let sino: Vec<f64> = data.values.iter().map(|v| v.norm()).collect();
        write_pgm(&cfg.out.join("sinogram_abs.pgm"), &sino, data.grid.n_alpha())?;
    }
    Ok(ExperimentOutcome { history, reconstruction, truth })
}

/// The four parameter sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// `k ∈ {3, 6, 10}` × `R ∈ {1.2, 1.6, 2.0}` on constant positive curvature.
    Exp1,
    /// The same on constant negative curvature.
    Exp2,
    /// `k = 3`, lens strengths `{0.3, 0.6, 0.9, 1.2}`, inverting `I_k`.
    Exp3,
    /// As `Exp3`, inverting `I_{k,⊥}`.
    Exp4,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exp1" => Ok(Suite::Exp1),
            "exp2" => Ok(Suite::Exp2),
            "exp3" => Ok(Suite::Exp3),
            "exp4" => Ok(Suite::Exp4),
            other => Err(Error::Parse(format!("unknown suite '{other}'"))),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::Exp1 => "exp1",
            Suite::Exp2 => "exp2",
            Suite::Exp3 => "exp3",
            Suite::Exp4 => "exp4",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteCell {
    pub suite: Suite,
    pub metric: String,
    pub k: i32,
    pub mode: Mode,
}

impl Suite {
    pub fn cells(self) -> Vec<SuiteCell> {
        let cell = |metric: String, k: i32, mode: Mode| SuiteCell { suite: self, metric, k, mode };
        match self {
            Suite::Exp1 | Suite::Exp2 => {
                let family = if self == Suite::Exp1 { "cpc" } else { "cnc" };
                let mut out = Vec::new();
                for k in [3, 6, 10] {
                    for r in ["2.0", "1.6", "1.2"] {
                        out.push(cell(format!("{family}:{r}"), k, Mode::InvertIk));
                    }
                }
                out
            }
            Suite::Exp3 | Suite::Exp4 => {
                let mode = if self == Suite::Exp3 { Mode::InvertIk } else { Mode::InvertIkPerp };
                ["0.3", "0.6", "0.9", "1.2"].into_iter().map(|l| cell(format!("lens:{l}"), 3, mode)).collect()
            }
        }
    }
}

/// Overrides shared by every cell of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub n: usize,
    pub dt: Option<f64>,
    pub iters: usize,
    /// Keep only these `k` values.
    pub k_filter: Option<Vec<i32>>,
    pub bumps: Option<Vec<Bump>>,
    pub exec: Exec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { n: 128, dt: None, iters: 10, k_filter: None, bumps: None, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRow {
    pub cell: SuiteCell,
    pub history: ErrorHistory,
    pub regime: Regime,
}

impl SuiteRow {
    pub fn final_rel_l2(&self) -> f64 {
        self.history.rel_l2.last().copied().unwrap_or(f64::NAN)
    }
}

/// Runs the cells, building one backward-trace table per distinct metric.
pub fn run_cells(cells: &[SuiteCell], opts: &SuiteOptions) -> Result<Vec<SuiteRow>> {
    let cells: Vec<&SuiteCell> = cells.iter().filter(|c| opts.k_filter.as_ref().is_none_or(|ks| ks.contains(&c.k))).collect();
    let mut spec = PhantomSpec::default_for(opts.n);
    if let Some(b) = &opts.bumps {
        spec.bumps = b.clone();
    }
    let truth = make_phantom(&spec)?;
    let mut rows: Vec<Option<SuiteRow>> = vec![None; cells.len()];
    let mut metrics: Vec<&str> = cells.iter().map(|c| c.metric.as_str()).collect();
    metrics.sort_unstable();
    metrics.dedup();
    for metric_name in metrics {
        let metric: MetricModel = metric_name.parse()?;
        let mut base: Option<Reconstructor> = None;
        for (i, cell) in cells.iter().enumerate().filter(|(_, c)| c.metric == metric_name) {
            let recon = match &base {
                Some(b) => b.retarget(cell.k, cell.mode),
                None => {
                    let mut rc = ReconstructionConfig::new(cell.k, cell.mode, opts.n);
                    rc.dt = opts.dt.unwrap_or(1.0 / opts.n as f64);
                    rc.iters = opts.iters;
                    rc.exec = opts.exec;
                    rc.eps_mask = spec.eps_mask;
                    let r = Reconstructor::new(metric, rc)?;
                    let first = r.retarget(cell.k, cell.mode);
                    base = Some(r);
                    first
                }
            };
            let (_, history) = recon.neumann(&recon.forward(&truth), Some(&truth))?;
            let regime = classify(&history.rel_l2);
            log::info!("{} {} k={} {}: {:.4} {}", cell.suite, cell.metric, cell.k, cell.mode, history.rel_l2.last().unwrap_or(&f64::NAN), regime);
            rows[i] = Some(SuiteRow { cell: (*cell).clone(), history, regime });
        }
    }
    Ok(rows.into_iter().map(|r| r.expect("every cell runs")).collect())
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<SuiteRow>> {
    run_cells(&suite.cells(), opts)
}

/// `suite,metric,k,mode,final_rel_l2,regime,history` with the history `;`-separated.
pub fn write_suite_csv<W: std::io::Write>(mut w: W, rows: &[SuiteRow]) -> Result<()> {
    writeln!(w, "suite,metric,k,mode,final_rel_l2,regime,history")?;
    for r in rows {
        let hist: Vec<String> = r.history.rel_l2.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{},{},{},{},{},{}", r.cell.suite, r.cell.metric, r.cell.k, r.cell.mode, r.final_rel_l2(), r.regime, hist.join(";"))?;
    }
    Ok(())
}
