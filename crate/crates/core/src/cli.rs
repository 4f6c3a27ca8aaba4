//! Command-line driver: loads a config, runs one scan and writes
//! `grid.csv`, `summary.json` and, for tomography, `tomography.csv` and
//! `rho.json`.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 physics error, 4 I/O.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{map_grid, phi_symmetric_scan, theta_map, thickness_scan, ScanGrid, ScanSummary};
use crate::config::{validate, AxisSpec, ConfigErrors, ResolvedConfig, RunConfig, ScanType};
use crate::error::Error;
use crate::optics::wavelength_from_omega;
use crate::spdc::{split_frequency, Biphoton};
use crate::tomography::{
    fidelity, measure, reconstruct_rho, rho_from_biphoton, schmidt_map, schmidt_number, singlet, DensityMatrix4,
    TomographyRecord,
};

#[derive(Debug, Parser)]
#[command(name = "thinfilm-spdc", version, about = "Photon-pair emission from a nonlinear thin film")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coincidence rate and amplitude matrix for one detector pair.
    Rate(CommonArgs),
    /// Rate over (theta, phi) with the idler opposite the signal.
    PhiSymmetric(CommonArgs),
    /// Rate versus slab thickness.
    Thickness(CommonArgs),
    /// Rate over (theta_s, theta_i) in one plane of incidence.
    ThetaMap(CommonArgs),
    /// Simulated 16-setting polarization tomography.
    Tomography(CommonArgs),
    /// Schmidt number and rate over the idler angles.
    SchmidtMap(CommonArgs),
    /// Rate and Schmidt number versus the signal/idler frequency ratio.
    WavelengthSweep(CommonArgs),
}

impl Command {
    pub fn split(self) -> (ScanType, CommonArgs) {
        match self {
            Command::Rate(a) => (ScanType::Rate, a),
            Command::PhiSymmetric(a) => (ScanType::PhiSymmetric, a),
            Command::Thickness(a) => (ScanType::Thickness, a),
            Command::ThetaMap(a) => (ScanType::ThetaMap, a),
            Command::Tomography(a) => (ScanType::Tomography, a),
            Command::SchmidtMap(a) => (ScanType::SchmidtMap, a),
            Command::WavelengthSweep(a) => (ScanType::WavelengthSweep, a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration; defaults apply to every missing key.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores (overrides `run.threads`).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Validate and print the resolved configuration without computing.
    #[arg(long)]
    pub dry_run: bool,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigErrors),
    Physics { source: Error, thickness_m: f64 },
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Physics { .. } => 3,
            RunError::Io(_) => 4,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid configuration:\n{e}"),
            RunError::Physics { source, thickness_m } => {
                write!(f, "physics error: {source} (slab thickness a = {thickness_m:e} m)")
            }
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

fn io_err(path: &Path, e: impl fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

/// Column-labelled numeric table written as `grid.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Everything a scan produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub grid: Table,
    pub summary: Value,
    pub tomography: Option<TomographyRecord>,
    pub rho: Option<DensityMatrix4>,
    pub warnings: Vec<String>,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub version: &'static str,
    pub timestamp: String,
    pub units: &'static str,
    pub scan: ScanType,
    pub config: ResolvedConfig,
    /// The resolved configuration as TOML; running it reproduces the grid.
    pub config_toml: String,
    pub summary: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<DensityMatrix4>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

/// Loads and validates a configuration file (or the defaults when `path` is
/// `None`) for the given scan.
pub fn load(path: Option<&Path>, scan: Option<ScanType>) -> Result<ResolvedConfig, RunError> {
    let config = match path {
        None => RunConfig::default(),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            let mut c = RunConfig::parse(&text).map_err(RunError::Config)?;
            if let Some(dir) = p.parent() {
                c.rebase_paths(dir);
            }
            c
        }
    };
    validate(&config, scan).map_err(RunError::Config)
}

fn physics(cfg: &ResolvedConfig) -> impl Fn(Error) -> RunError + '_ {
    move |source| RunError::Physics {
        source,
        thickness_m: cfg.thickness_m,
    }
}

fn argmax_json(coords: &[(&str, &AxisSpec)], grid: &ScanGrid) -> Value {
    let mut best = 0;
    for (i, v) in grid.values.iter().enumerate() {
        if *v > grid.values[best] || grid.values[best].is_nan() {
            best = i;
        }
    }
    let mut obj = serde_json::Map::new();
    let mut rem = best;
    let mut idx = vec![0; coords.len()];
    for (d, (_, spec)) in coords.iter().enumerate().rev() {
        idx[d] = rem % spec.count;
        rem /= spec.count;
    }
    for (d, (name, spec)) in coords.iter().enumerate() {
        obj.insert(name.to_string(), json!(spec.value(idx[d])));
    }
    obj.insert("value".into(), json!(grid.values[best]));
    Value::Object(obj)
}

fn grid_rows(coords: &[&AxisSpec], columns: &[&[f64]]) -> Vec<Vec<f64>> {
    let shape: Vec<usize> = coords.iter().map(|a| a.count).collect();
    let total: usize = shape.iter().product();
    (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut idx = vec![0; shape.len()];
            for d in (0..shape.len()).rev() {
                idx[d] = rem % shape[d];
                rem /= shape[d];
            }
            let mut row: Vec<f64> = coords.iter().zip(&idx).map(|(a, &i)| a.value(i)).collect();
            row.extend(columns.iter().map(|c| c[flat]));
            row
        })
        .collect()
}

/// Runs the configured scan on the current rayon pool.
pub fn compute(cfg: &ResolvedConfig) -> Result<Outcome, RunError> {
    let perr = physics(cfg);
    let (base, mut warnings) = cfg.joint_setting().map_err(&perr)?;
    let lp = cfg.wavelength_m;
    let mut tomography = None;
    let mut rho_out = None;
    let angles = [cfg.theta_s_deg, cfg.phi_s_deg, cfg.theta_i_deg, cfg.phi_i_deg];

    let (grid, summary) = match cfg.scan {
        ScanType::Rate => {
            let b = Biphoton::evaluate(&base).map_err(&perr)?;
            let mut t = Table::new(&[
                "theta_s_deg", "phi_s_deg", "theta_i_deg", "phi_i_deg", "rate", "a_hh_re", "a_hh_im", "a_hv_re",
                "a_hv_im", "a_vh_re", "a_vh_im", "a_vv_re", "a_vv_im",
            ]);
            let rate = b.unpolarized_rate();
            let mut row = angles.to_vec();
            row.push(rate);
            for a in b.amplitude_matrix().iter().flatten() {
                row.extend([a.re, a.im]);
            }
            t.rows.push(row);
            (t, json!({ "rate": rate }))
        }
        ScanType::PhiSymmetric => {
            let (ta, pa) = (cfg.axis("theta_deg"), cfg.axis("phi_deg"));
            let grid = phi_symmetric_scan(
                &base,
                cfg.grid_axis("theta_deg").map_err(&perr)?,
                cfg.grid_axis("phi_deg").map_err(&perr)?,
            )
            .map_err(&perr)?;
            let mut t = Table::new(&["theta_deg", "phi_deg", "rate"]);
            t.rows = grid_rows(&[&ta, &pa], &[&grid.values]);
            let peaks: Vec<Value> = (0..pa.count)
                .map(|j| {
                    let col = grid.column(j);
                    let (i, v) = col
                        .iter()
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
                    json!({ "phi_deg": pa.value(j), "peak_theta_deg": ta.value(i), "peak_rate": v })
                })
                .collect();
            let s = json!({
                "argmax": argmax_json(&[("theta_deg", &ta), ("phi_deg", &pa)], &grid),
                "peak_theta_by_phi": peaks,
            });
            (t, s)
        }
        ScanType::Thickness => {
            let ax = cfg.axis("thickness_m");
            let grid = thickness_scan(
                &base,
                cfg.grid_axis("thickness_m").map_err(&perr)?,
                cfg.theta_s_deg.to_radians(),
                cfg.phi_s_deg.to_radians(),
            )
            .map_err(&perr)?;
            let x = ax.values();
            let in_lp: Vec<f64> = x.iter().map(|a| a / lp).collect();
            let mut t = Table::new(&["thickness_m", "thickness_lp", "rate"]);
            t.rows = grid_rows(&[&ax], &[&in_lp, &grid.values]);
            let skip = (1.0 - in_lp[0]).max(0.0);
            let s = ScanSummary::of(&in_lp, &grid.values, skip);
            (t, json!({ "in_pump_wavelengths": s }))
        }
        ScanType::ThetaMap => {
            let (sa, ia) = (cfg.axis("theta_s_deg"), cfg.axis("theta_i_deg"));
            let grid = theta_map(
                &base,
                cfg.grid_axis("theta_s_deg").map_err(&perr)?,
                cfg.grid_axis("theta_i_deg").map_err(&perr)?,
                cfg.phi_s_deg.to_radians(),
            )
            .map_err(&perr)?;
            let mut t = Table::new(&["theta_s_deg", "theta_i_deg", "rate"]);
            t.rows = grid_rows(&[&sa, &ia], &[&grid.values]);
            let s = json!({ "argmax": argmax_json(&[("theta_s_deg", &sa), ("theta_i_deg", &ia)], &grid) });
            (t, s)
        }
        ScanType::Tomography => {
            let b = Biphoton::evaluate(&base).map_err(&perr)?;
            let record = measure(&b);
            let rho = reconstruct_rho(&record).map_err(&perr)?;
            let k = schmidt_number(&rho).map_err(&perr)?;
            let singlet_rho = DensityMatrix4::pure(singlet()).map_err(&perr)?;
            let f = fidelity(&rho, &singlet_rho);
            let rate = b.unpolarized_rate();
            let mut t = Table::new(&[
                "theta_s_deg", "phi_s_deg", "theta_i_deg", "phi_i_deg", "rate", "schmidt", "purity", "singlet_fidelity",
            ]);
            let mut row = angles.to_vec();
            row.extend([rate, k, rho.purity(), f]);
            t.rows.push(row);
            let s = json!({
                "rate": rate,
                "schmidt": k,
                "purity": rho.purity(),
                "singlet_fidelity": f,
                "eigenvalues": rho.eigenvalues(),
            });
            tomography = Some(record);
            rho_out = Some(rho);
            (t, s)
        }
        ScanType::SchmidtMap => {
            let (ta, pa) = (cfg.axis("theta_i_deg"), cfg.axis("phi_i_deg"));
            let map = schmidt_map(
                &base,
                cfg.grid_axis("theta_i_deg").map_err(&perr)?,
                cfg.grid_axis("phi_i_deg").map_err(&perr)?,
            )
            .map_err(&perr)?;
            let mut t = Table::new(&["theta_i_deg", "phi_i_deg", "schmidt", "rate"]);
            t.rows = grid_rows(&[&ta, &pa], &[&map.schmidt.values, &map.rate.values]);
            let coords = [("theta_i_deg", &ta), ("phi_i_deg", &pa)];
            let finite = ScanGrid {
                axes: map.schmidt.axes.clone(),
                values: map
                    .schmidt
                    .values
                    .iter()
                    .map(|v| if v.is_nan() { f64::NEG_INFINITY } else { *v })
                    .collect(),
            };
            let s = json!({
                "argmax_schmidt": argmax_json(&coords, &finite),
                "argmax_rate": argmax_json(&coords, &map.rate),
            });
            (t, s)
        }
        ScanType::WavelengthSweep => {
            let ax = cfg.axis("ratio");
            let axis = cfg.grid_axis("ratio").map_err(&perr)?;
            let omega_p = crate::optics::omega_from_wavelength(lp);
            let points = map_grid(&[axis], |c| {
                let (setting, warn) = cfg.joint_setting_at(c[0])?;
                let b = Biphoton::evaluate(&setting)?;
                let k = match rho_from_biphoton(&b) {
                    Ok(rho) => schmidt_number(&rho)?,
                    Err(Error::UndefinedState) => f64::NAN,
                    Err(e) => return Err(e),
                };
                Ok((b.unpolarized_rate(), k, warn))
            })
            .map_err(&perr)?;
            let mut t = Table::new(&["ratio", "signal_wavelength_m", "idler_wavelength_m", "rate", "schmidt"]);
            for (i, (rate, k, warn)) in points.iter().enumerate() {
                let r = ax.value(i);
                let (ws, wi) = split_frequency(omega_p, r).map_err(&perr)?;
                t.rows
                    .push(vec![r, wavelength_from_omega(ws), wavelength_from_omega(wi), *rate, *k]);
                for w in warn {
                    if !warnings.contains(w) {
                        warnings.push(w.clone());
                    }
                }
            }
            let ks: Vec<f64> = points.iter().map(|p| p.1).filter(|k| k.is_finite()).collect();
            let s = json!({
                "min_schmidt": ks.iter().cloned().fold(f64::INFINITY, f64::min),
                "max_schmidt": ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            });
            (t, s)
        }
    };
    let warnings = warnings
        .into_iter()
        .map(|w| format!("permittivity of {w} extrapolated beyond its table"))
        .collect();
    Ok(Outcome {
        grid,
        summary,
        tomography,
        rho: rho_out,
        warnings,
    })
}

/// Computes on a pool of `cfg.threads` workers and writes every output file
/// into `out`.
pub fn run(cfg: &ResolvedConfig, out: &Path) -> Result<ResultEnvelope, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| RunError::Io(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| compute(cfg))?;

    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut files = vec!["grid.csv".to_string()];
    let grid_path = out.join("grid.csv");
    let f = fs::File::create(&grid_path).map_err(|e| io_err(&grid_path, e))?;
    outcome.grid.write_csv(f).map_err(|e| io_err(&grid_path, e))?;
    if let Some(record) = &outcome.tomography {
        let p = out.join("tomography.csv");
        let f = fs::File::create(&p).map_err(|e| io_err(&p, e))?;
        record.write_csv(f).map_err(|e| io_err(&p, e))?;
        files.push("tomography.csv".into());
    }
    if let Some(rho) = &outcome.rho {
        let p = out.join("rho.json");
        let text = serde_json::to_string_pretty(rho).map_err(|e| io_err(&p, e))?;
        fs::write(&p, text + "\n").map_err(|e| io_err(&p, e))?;
        files.push("rho.json".into());
    }
    files.push("summary.json".into());
    let envelope = ResultEnvelope {
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339(),
        units: "arbitrary",
        scan: cfg.scan,
        config: cfg.clone(),
        config_toml: cfg.to_toml(),
        summary: outcome.summary,
        rho: outcome.rho,
        warnings: outcome.warnings,
        files,
    };
    let p = out.join("summary.json");
    let text = serde_json::to_string_pretty(&envelope).map_err(|e| io_err(&p, e))?;
    fs::write(&p, text + "\n").map_err(|e| io_err(&p, e))?;
    Ok(envelope)
}

/// Parses arguments, runs, reports, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (scan, args) = cli.command.split();
    let result = load(args.config.as_deref(), Some(scan)).and_then(|mut cfg| {
        if let Some(t) = args.threads {
            cfg.threads = t;
        }
        if let Some(o) = &args.out {
            cfg.output_dir = o.clone();
        }
        if args.dry_run {
            print!("{}", cfg.to_toml());
            return Ok(());
        }
        let out = cfg.output_dir.clone();
        let env = run(&cfg, &out)?;
        for w in &env.warnings {
            eprintln!("warning: {w}");
        }
        println!("{} -> {}", cfg.scan, out.display());
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
