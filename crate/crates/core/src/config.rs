//! Run configuration: TOML parsing, defaults and validation.
//!
//! Every physical quantity carries its unit in the key name. Angles are
//! degrees here and radians everywhere else in the crate.
//!
//! ```toml
//! [pump]
//! wavelength_m = 5.0e-7
//! width_per_m = 6.6e5        # or waist_m = 3.0e-6, never both
//!
//! [stack]
//! cladding = "air"
//! slab = "gaas"
//! substrate = "sio2"
//! thickness_m = 5.0e-9
//! dispersion = "flat"        # or "table"
//!
//! [source]
//! ratio = 1.0
//! detection = "medium1"
//!
//! [scan]
//! type = "thickness"
//! theta_s_deg = 45.0
//! axes.thickness_m = { start = 1.0e-6, stop = 2.5e-6, count = 600 }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{Axis, AxisKind};
use crate::greens::DetectionMedium;
use crate::optics::material::{DispersionTable, MaterialLibrary};
use crate::optics::{wavelength_from_omega, LayerStack, Medium, RoleMedia};
use crate::pump::PumpSpec;
use crate::spdc::{split_frequency, Chi2Tensor, JointSetting};

/// The analyses the driver can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanType {
    Rate,
    PhiSymmetric,
    Thickness,
    ThetaMap,
    Tomography,
    SchmidtMap,
    WavelengthSweep,
}

impl ScanType {
    pub const ALL: [ScanType; 7] = [
        ScanType::Rate,
        ScanType::PhiSymmetric,
        ScanType::Thickness,
        ScanType::ThetaMap,
        ScanType::Tomography,
        ScanType::SchmidtMap,
        ScanType::WavelengthSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanType::Rate => "rate",
            ScanType::PhiSymmetric => "phi-symmetric",
            ScanType::Thickness => "thickness",
            ScanType::ThetaMap => "theta-map",
            ScanType::Tomography => "tomography",
            ScanType::SchmidtMap => "schmidt-map",
            ScanType::WavelengthSweep => "wavelength-sweep",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Axis keys the scan reads from `scan.axes`, in grid order.
    pub fn axis_keys(self) -> &'static [&'static str] {
        match self {
            ScanType::Rate | ScanType::Tomography => &[],
            ScanType::PhiSymmetric => &["theta_deg", "phi_deg"],
            ScanType::Thickness => &["thickness_m"],
            ScanType::ThetaMap => &["theta_s_deg", "theta_i_deg"],
            ScanType::SchmidtMap => &["theta_i_deg", "phi_i_deg"],
            ScanType::WavelengthSweep => &["ratio"],
        }
    }
}

impl fmt::Display for ScanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive, evenly spaced axis in the unit named by its key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    /// Coordinate of point `i` in the configured unit.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.stop;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

/// A layer given by material name or by explicit permittivities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LayerSpec {
    Material(String),
    Permittivity {
        eps_pump: [f64; 2],
        eps_signal: [f64; 2],
        eps_idler: [f64; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    /// Pump at the pump wavelength, signal and idler at twice it, for every
    /// frequency split.
    Flat,
    /// Each photon at its own wavelength.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    Medium1,
    Medium3,
}

impl From<Detection> for DetectionMedium {
    fn from(d: Detection) -> Self {
        match d {
            Detection::Medium1 => DetectionMedium::Medium1,
            Detection::Medium3 => DetectionMedium::Medium3,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub wavelength_m: Option<f64>,
    pub width_per_m: Option<f64>,
    pub waist_m: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackSection {
    pub cladding: Option<LayerSpec>,
    pub slab: Option<LayerSpec>,
    pub substrate: Option<LayerSpec>,
    pub thickness_m: Option<f64>,
    pub dispersion: Option<Dispersion>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub chi2: Option<f64>,
    pub ratio: Option<f64>,
    pub detection: Option<Detection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(rename = "type")]
    pub kind: Option<String>,
    pub theta_s_deg: Option<f64>,
    pub phi_s_deg: Option<f64>,
    pub theta_i_deg: Option<f64>,
    pub phi_i_deg: Option<f64>,
    #[serde(default)]
    pub axes: BTreeMap<String, AxisSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub threads: Option<usize>,
}

/// Configuration as written by the user; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub pump: PumpSection,
    #[serde(default)]
    pub stack: StackSection,
    #[serde(default)]
    pub source: SourceSection,
    #[serde(default)]
    pub scan: ScanSection,
    /// Extra dispersion tables: material name to file path, resolved
    /// against the config file's directory.
    #[serde(default)]
    pub materials: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub run: RunSection,
}

/// One validation failure, named by its dotted key.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl ConfigErrors {
    pub fn single(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self(vec![FieldError {
            field: field.into(),
            message: message.into(),
        }])
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.0.iter().any(|e| e.field == field)
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        toml::from_str(text).map_err(|e| ConfigErrors::single("config", e.message().to_string()))
    }

    /// Makes relative material table paths relative to `base`.
    pub fn rebase_paths(&mut self, base: &Path) {
        for path in self.materials.values_mut() {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

/// Fully resolved configuration with every default filled in. Serializes
/// back to a `RunConfig` that resolves to itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub scan: ScanType,
    pub wavelength_m: f64,
    pub width_per_m: f64,
    pub amplitude: f64,
    pub cladding: LayerSpec,
    pub slab: LayerSpec,
    pub substrate: LayerSpec,
    pub thickness_m: f64,
    pub dispersion: Dispersion,
    pub chi2: f64,
    pub ratio: f64,
    pub detection: Detection,
    pub theta_s_deg: f64,
    pub phi_s_deg: f64,
    pub theta_i_deg: f64,
    pub phi_i_deg: f64,
    pub axes: BTreeMap<String, AxisSpec>,
    pub materials: BTreeMap<String, PathBuf>,
    pub output_dir: PathBuf,
    pub threads: usize,
}

pub const DEFAULT_WAVELENGTH: f64 = 500e-9;
pub const DEFAULT_WIDTH: f64 = 6.6e5;

fn default_axis(scan: ScanType, key: &str, wavelength: f64) -> AxisSpec {
    match (scan, key) {
        (_, "theta_deg") | (_, "theta_s_deg") => AxisSpec::new(0.0, 89.0, 90),
        (ScanType::SchmidtMap, "theta_i_deg") => AxisSpec::new(1.0, 89.0, 89),
        (_, "theta_i_deg") => AxisSpec::new(0.0, 89.0, 90),
        (_, "phi_deg") => AxisSpec::new(0.0, 360.0, 73),
        (_, "phi_i_deg") => AxisSpec::new(90.0, 270.0, 181),
        (_, "thickness_m") => AxisSpec::new(2.0 * wavelength, 5.0 * wavelength, 600),
        (_, "ratio") => AxisSpec::new(0.8, 1.5, 15),
        _ => unreachable!("no default for axis {key}"),
    }
}

/// Fills defaults and checks ranges. `scan` overrides `scan.type` only when
/// the file leaves it unset; a mismatch is an error.
pub fn validate(config: &RunConfig, scan: Option<ScanType>) -> Result<ResolvedConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut err = |field: &str, message: String| {
        errors.push(FieldError {
            field: field.to_string(),
            message,
        })
    };

    let file_scan = match config.scan.kind.as_deref() {
        None => None,
        Some(name) => match ScanType::from_name(name) {
            Some(s) => Some(s),
            None => {
                let known: Vec<_> = ScanType::ALL.iter().map(|s| s.name()).collect();
                err("scan.type", format!("unknown scan type `{name}` (expected one of {})", known.join(", ")));
                None
            }
        },
    };
    let kind = match (file_scan, scan) {
        (Some(a), Some(b)) if a != b => {
            err("scan.type", format!("config asks for `{a}` but the command is `{b}`"));
            b
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            if config.scan.kind.is_none() {
                err("scan.type", "no scan type given".into());
            }
            ScanType::Rate
        }
    };

    let positive = |v: f64| v.is_finite() && v > 0.0;
    let wavelength = config.pump.wavelength_m.unwrap_or(DEFAULT_WAVELENGTH);
    if !positive(wavelength) {
        err("pump.wavelength_m", format!("must be positive, got {wavelength}"));
    }
    let width = match (config.pump.width_per_m, config.pump.waist_m) {
        (Some(_), Some(_)) => {
            err("pump.waist_m", "give either pump.width_per_m or pump.waist_m, not both".into());
            DEFAULT_WIDTH
        }
        (Some(w), None) => {
            if !positive(w) {
                err("pump.width_per_m", format!("must be positive, got {w}"));
            }
            w
        }
        (None, Some(waist)) => {
            if !positive(waist) {
                err("pump.waist_m", format!("must be positive, got {waist}"));
                DEFAULT_WIDTH
            } else {
                PumpSpec::width_from_waist(waist)
            }
        }
        (None, None) => DEFAULT_WIDTH,
    };
    let amplitude = config.pump.amplitude.unwrap_or(1.0);
    if !positive(amplitude) {
        err("pump.amplitude", format!("must be positive, got {amplitude}"));
    }

    let thickness = config.stack.thickness_m.unwrap_or(0.01 * wavelength);
    if !positive(thickness) {
        err("stack.thickness_m", format!("must be positive, got {thickness}"));
    }
    let mut library = MaterialLibrary::builtin();
    for (name, path) in &config.materials {
        match DispersionTable::from_path(path) {
            Ok(t) => library.insert(name, t),
            Err(e) => err(&format!("materials.{name}"), e.to_string()),
        }
    }
    let layers = [
        ("stack.cladding", config.stack.cladding.clone().unwrap_or(LayerSpec::Material("air".into()))),
        ("stack.slab", config.stack.slab.clone().unwrap_or(LayerSpec::Material("gaas".into()))),
        ("stack.substrate", config.stack.substrate.clone().unwrap_or(LayerSpec::Material("sio2".into()))),
    ];
    for (field, layer) in &layers {
        match layer {
            LayerSpec::Material(name) if !library.contains(name) => {
                err(field, format!("unknown material `{name}`"));
            }
            LayerSpec::Permittivity {
                eps_pump,
                eps_signal,
                eps_idler,
            } => {
                for (tag, e) in [("eps_pump", eps_pump), ("eps_signal", eps_signal), ("eps_idler", eps_idler)] {
                    if let Err(m) = Medium::new(Complex64::new(e[0], e[1])) {
                        err(&format!("{field}.{tag}"), m.to_string());
                    }
                }
            }
            _ => {}
        }
    }

    let chi2 = config.source.chi2.unwrap_or(1.0);
    if !chi2.is_finite() || chi2 == 0.0 {
        err("source.chi2", format!("must be finite and nonzero, got {chi2}"));
    }
    let ratio = config.source.ratio.unwrap_or(1.0);
    if !positive(ratio) {
        err("source.ratio", format!("must be positive, got {ratio}"));
    }

    let polar = |field: &str, v: f64, errs: &mut dyn FnMut(&str, String)| {
        if !(v.is_finite() && (0.0..90.0).contains(&v)) {
            errs(field, format!("polar angle must lie in [0, 90) degrees, got {v}"));
        }
    };
    let theta_s = config.scan.theta_s_deg.unwrap_or(45.0);
    let phi_s = config.scan.phi_s_deg.unwrap_or(0.0);
    let theta_i = config.scan.theta_i_deg.unwrap_or(theta_s);
    let phi_i = config.scan.phi_i_deg.unwrap_or(phi_s + 180.0);
    polar("scan.theta_s_deg", theta_s, &mut err);
    polar("scan.theta_i_deg", theta_i, &mut err);
    for (field, v) in [("scan.phi_s_deg", phi_s), ("scan.phi_i_deg", phi_i)] {
        if !v.is_finite() {
            err(field, format!("must be finite, got {v}"));
        }
    }

    let wanted = kind.axis_keys();
    for key in config.scan.axes.keys() {
        if !wanted.contains(&key.as_str()) {
            err(
                &format!("scan.axes.{key}"),
                format!("not used by `{kind}` (expected {})", if wanted.is_empty() { "no axes".to_string() } else { wanted.join(", ") }),
            );
        }
    }
    let mut axes = BTreeMap::new();
    for key in wanted {
        let spec = config
            .scan
            .axes
            .get(*key)
            .copied()
            .unwrap_or_else(|| default_axis(kind, key, wavelength));
        let field = format!("scan.axes.{key}");
        if spec.count < 2 {
            err(&field, format!("count must be at least 2, got {}", spec.count));
        }
        if !(spec.start.is_finite() && spec.stop.is_finite() && spec.stop > spec.start) {
            err(&field, format!("must be increasing, got [{}, {}]", spec.start, spec.stop));
        }
        let bad_polar = key.starts_with("theta") && (spec.start < 0.0 || spec.stop >= 90.0);
        let bad_length = *key == "thickness_m" && spec.start <= 0.0;
        let bad_ratio = *key == "ratio" && spec.start <= 0.0;
        if bad_polar {
            err(&field, "polar angles must lie in [0, 90) degrees".into());
        }
        if bad_length || bad_ratio {
            err(&field, "must be positive".into());
        }
        axes.insert(key.to_string(), spec);
    }

    let threads = config.run.threads.unwrap_or(0);
    let output_dir = config.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"));

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    let [cladding, slab, substrate] = layers.map(|(_, l)| l);
    Ok(ResolvedConfig {
        scan: kind,
        wavelength_m: wavelength,
        width_per_m: width,
        amplitude,
        cladding,
        slab,
        substrate,
        thickness_m: thickness,
        dispersion: config.stack.dispersion.unwrap_or(Dispersion::Flat),
        chi2,
        ratio,
        detection: config.source.detection.unwrap_or(Detection::Medium1),
        theta_s_deg: theta_s,
        phi_s_deg: phi_s,
        theta_i_deg: theta_i,
        phi_i_deg: phi_i,
        axes,
        materials: config.materials.clone(),
        output_dir,
        threads,
    })
}

impl ResolvedConfig {
    /// Back to the user-facing form with every key explicit.
    pub fn to_run_config(&self) -> RunConfig {
        RunConfig {
            pump: PumpSection {
                wavelength_m: Some(self.wavelength_m),
                width_per_m: Some(self.width_per_m),
                waist_m: None,
                amplitude: Some(self.amplitude),
            },
            stack: StackSection {
                cladding: Some(self.cladding.clone()),
                slab: Some(self.slab.clone()),
                substrate: Some(self.substrate.clone()),
                thickness_m: Some(self.thickness_m),
                dispersion: Some(self.dispersion),
            },
            source: SourceSection {
                chi2: Some(self.chi2),
                ratio: Some(self.ratio),
                detection: Some(self.detection),
            },
            scan: ScanSection {
                kind: Some(self.scan.name().to_string()),
                theta_s_deg: Some(self.theta_s_deg),
                phi_s_deg: Some(self.phi_s_deg),
                theta_i_deg: Some(self.theta_i_deg),
                phi_i_deg: Some(self.phi_i_deg),
                axes: self.axes.clone(),
            },
            materials: self.materials.clone(),
            output: OutputSection {
                dir: Some(self.output_dir.clone()),
            },
            run: RunSection {
                threads: Some(self.threads),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_run_config()).expect("resolved config is representable as TOML")
    }

    pub fn axis(&self, key: &str) -> AxisSpec {
        self.axes[key]
    }

    /// Crate-internal axis (radians or meters) for a configured key.
    pub fn grid_axis(&self, key: &str) -> crate::error::Result<Axis> {
        let spec = self.axis(key);
        let name = key.trim_end_matches("_deg").trim_end_matches("_m");
        if key.ends_with("_deg") {
            Axis::degrees(name, spec.start, spec.stop, spec.count)
        } else if key.ends_with("_m") {
            Axis::new(name, AxisKind::Length, spec.start, spec.stop, spec.count)
        } else {
            Axis::new(name, AxisKind::Ratio, spec.start, spec.stop, spec.count)
        }
    }

    pub fn pump(&self) -> crate::error::Result<PumpSpec> {
        let mut p = PumpSpec::new(self.wavelength_m, self.width_per_m)?;
        p.amplitude = self.amplitude;
        Ok(p)
    }

    pub fn chi2_tensor(&self) -> Chi2Tensor {
        Chi2Tensor::zinc_blende(self.chi2)
    }

    fn library(&self) -> crate::error::Result<MaterialLibrary> {
        let mut lib = MaterialLibrary::builtin();
        for (name, path) in &self.materials {
            lib.insert(name, DispersionTable::from_path(path)?);
        }
        Ok(lib)
    }

    /// Layer stack for a given frequency split. Returns the names of
    /// layers whose permittivity was extrapolated beyond a table.
    pub fn stack_for_ratio(&self, ratio: f64) -> crate::error::Result<(LayerStack, Vec<String>)> {
        let lib = self.library()?;
        let (ws, wi) = split_frequency(crate::optics::omega_from_wavelength(self.wavelength_m), ratio)?;
        let (ls, li) = match self.dispersion {
            Dispersion::Flat => (2.0 * self.wavelength_m, 2.0 * self.wavelength_m),
            Dispersion::Table => (wavelength_from_omega(ws), wavelength_from_omega(wi)),
        };
        let mut extrapolated = Vec::new();
        let mut role_media = |label: &str, spec: &LayerSpec| -> crate::error::Result<RoleMedia> {
            match spec {
                LayerSpec::Material(name) => {
                    let p = lib.lookup(name, self.wavelength_m)?;
                    let s = lib.lookup(name, ls)?;
                    let i = lib.lookup(name, li)?;
                    if p.extrapolated || s.extrapolated || i.extrapolated {
                        extrapolated.push(format!("{label} ({name})"));
                    }
                    Ok(RoleMedia {
                        pump: p.medium,
                        signal: s.medium,
                        idler: i.medium,
                    })
                }
                LayerSpec::Permittivity {
                    eps_pump,
                    eps_signal,
                    eps_idler,
                } => Ok(RoleMedia {
                    pump: Medium::new(Complex64::new(eps_pump[0], eps_pump[1]))?,
                    signal: Medium::new(Complex64::new(eps_signal[0], eps_signal[1]))?,
                    idler: Medium::new(Complex64::new(eps_idler[0], eps_idler[1]))?,
                }),
            }
        };
        let m1 = role_media("cladding", &self.cladding)?;
        let m2 = role_media("slab", &self.slab)?;
        let m3 = role_media("substrate", &self.substrate)?;
        Ok((LayerStack::new(m1, m2, m3, self.thickness_m)?, extrapolated))
    }

    /// Joint setting at the configured ratio and fixed angles.
    pub fn joint_setting(&self) -> crate::error::Result<(JointSetting, Vec<String>)> {
        self.joint_setting_at(self.ratio)
    }

    pub fn joint_setting_at(&self, ratio: f64) -> crate::error::Result<(JointSetting, Vec<String>)> {
        let (stack, warnings) = self.stack_for_ratio(ratio)?;
        let setting = JointSetting::with_ratio(
            self.pump()?,
            stack,
            self.chi2_tensor(),
            ratio,
            self.detection.into(),
            (self.theta_s_deg.to_radians(), self.phi_s_deg.to_radians()),
            (self.theta_i_deg.to_radians(), self.phi_i_deg.to_radians()),
        )?;
        Ok((setting, warnings))
    }
}
