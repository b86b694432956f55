//! Run configuration: a sectioned key-value text format sharing the SI
//! numeric grammar with netlists.
//!
//! ```text
//! # harvesting chain
//! [chain]
//! frequency = 900M
//! elements = 4
//!
//! [rectifier]
//! stages = 7
//! load_resistance = 22k
//! ```
//!
//! Unknown sections or keys are rejected with their path, and any
//! referenced file (antenna table, diode parameter file) must exist at
//! parse time.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rectenna_core::chain::{ChainConfig, LinkBudget, VoltageConvention};
use rectenna_core::circuit::{DiodeModel, Integration, SolverConfig, SteadyRunConfig};
use rectenna_core::combiner::design_wilkinson;
use rectenna_core::rectifier::{DoublerConfig, ProbeConfig, SourceSpec};
use rectenna_core::rf_link::AntennaModel;
use rectenna_core::si::parse_si;

/// Configuration error with the offending key path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.into(),
    }
}

// --- raw section scanner ---

struct Section {
    name: String,
    entries: Vec<(String, String)>,
}

fn parse_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(format!("line {line_no}"), "unterminated section header"))?
                .trim()
                .to_string();
            if sections.iter().any(|s| s.name == name) {
                return Err(err(format!("[{name}]"), "duplicate section"));
            }
            sections.push(Section {
                name,
                entries: Vec::new(),
            });
            continue;
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| err(format!("line {line_no}"), "key before any [section]"))?;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {line_no}"), "expected 'key = value'"))?;
        let key = key.trim().to_string();
        if section.entries.iter().any(|(k, _)| *k == key) {
            return Err(err(
                format!("[{}] {key}", section.name),
                "duplicate key",
            ));
        }
        section.entries.push((key, value.trim().to_string()));
    }
    Ok(sections)
}

/// Typed access to one section with unknown-key detection.
struct Reader {
    name: String,
    entries: Vec<(String, String)>,
    taken: BTreeSet<String>,
}

impl Reader {
    fn path(&self, key: &str) -> String {
        format!("[{}] {key}", self.name)
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let found = self
            .entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone());
        if found.is_some() {
            self.taken.insert(key.to_string());
        }
        found
    }

    fn number(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => parse_si(&v).map_err(|e| err(self.path(key), e.to_string())),
        }
    }

    fn number_opt(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse_si(&v)
                .map(Some)
                .map_err(|e| err(self.path(key), e.to_string())),
        }
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let v = self.number(key, default as f64)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(err(self.path(key), format!("expected an integer, got {v}")));
        }
        Ok(v as usize)
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(key).as_deref() {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => Err(err(
                self.path(key),
                format!("expected true or false, got '{other}'"),
            )),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        for (key, _) in &self.entries {
            if !self.taken.contains(key) {
                return Err(err(format!("[{}] {key}", self.name), "unknown key"));
            }
        }
        Ok(())
    }
}

// --- resolved configuration ---

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub frequency: f64,
    pub elements: usize,
    pub incident_power_dbm: f64,
    pub match_reference_power_dbm: f64,
    pub efficiency_reference_ohms: f64,
    pub efficiency_convention: VoltageConvention,
    pub mounted_resistor_ohms: Option<f64>,
    pub converter_impedance: Option<(f64, f64)>,
    pub link: Option<FriisLink>,
    pub antenna_table: Option<PathBuf>,
    pub combiner_levels: usize,
    pub combiner_source_ohms: f64,
    pub combiner_load_ohms: f64,
    pub rectifier_stages: usize,
    pub stage_capacitance: f64,
    pub load_resistance: f64,
    pub half_stage: bool,
    pub source_amplitude: f64,
    pub source_resistance: f64,
    /// Standalone rectifier commands may run off the chain frequency.
    pub source_frequency: Option<f64>,
    pub simulate_periods: usize,
    pub diode: DiodeModel,
    pub diode_file: Option<PathBuf>,
    pub solver: SolverConfig,
    pub samples_per_period: usize,
    pub max_settle_periods: usize,
    pub settle_rel_tol: f64,
    pub probe_amplitude: f64,
    pub probe_samples_per_period: usize,
    pub probe_max_periods: usize,
    pub probe_settle_tol: f64,
    pub sweep_from_dbm: f64,
    pub sweep_to_dbm: f64,
    pub sweep_step_db: f64,
    pub sweep_loads: Vec<f64>,
    pub match_zin: Option<(f64, f64)>,
    pub microstrip_z0: f64,
    pub microstrip_eps_r: f64,
    pub microstrip_height: f64,
    pub microstrip_f0: Option<f64>,
    pub output_directory: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriisLink {
    pub transmit_power_dbm: f64,
    pub transmit_gain_dbi: f64,
    pub distance_m: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            frequency: 0.9e9,
            elements: 4,
            incident_power_dbm: 10.0,
            match_reference_power_dbm: 10.0,
            efficiency_reference_ohms: 50.0,
            efficiency_convention: VoltageConvention::Rms,
            mounted_resistor_ohms: None,
            converter_impedance: None,
            link: None,
            antenna_table: None,
            combiner_levels: 2,
            combiner_source_ohms: 50.0,
            combiner_load_ohms: 50.0,
            rectifier_stages: 7,
            stage_capacitance: 10e-12,
            load_resistance: 22e3,
            half_stage: false,
            source_amplitude: 0.5,
            source_resistance: 50.0,
            source_frequency: None,
            simulate_periods: 200,
            diode: DiodeModel::sms7621(),
            diode_file: None,
            solver: SolverConfig::default(),
            samples_per_period: 64,
            max_settle_periods: 8000,
            settle_rel_tol: 1e-4,
            probe_amplitude: 0.1,
            probe_samples_per_period: 64,
            probe_max_periods: 6000,
            probe_settle_tol: 1e-3,
            sweep_from_dbm: -40.0,
            sweep_to_dbm: 40.0,
            sweep_step_db: 10.0,
            sweep_loads: vec![
                100.0, 215.0, 464.0, 1e3, 2.15e3, 4.64e3, 1e4, 2.15e4, 4.64e4, 1e5, 2.15e5,
                4.64e5, 1e6,
            ],
            match_zin: None,
            microstrip_z0: 70.7107,
            microstrip_eps_r: 4.4,
            microstrip_height: 1.6e-3,
            microstrip_f0: None,
            output_directory: PathBuf::from("out"),
        }
    }
}

fn resolve_path(base: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn load_diode_file(path: &Path) -> Result<DiodeModel, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        err(
            "[diode] file",
            format!("cannot read '{}': {e}", path.display()),
        )
    })?;
    let sections = parse_sections(&text)?;
    let mut model = DiodeModel::sms7621();
    let mut seen = false;
    for section in sections {
        if section.name != "diode" {
            return Err(err(
                format!("[{}]", section.name),
                format!("unexpected section in diode file '{}'", path.display()),
            ));
        }
        seen = true;
        let mut reader = Reader {
            name: section.name,
            entries: section.entries,
            taken: BTreeSet::new(),
        };
        read_diode_keys(&mut reader, &mut model)?;
        reader.finish()?;
    }
    if !seen {
        return Err(err(
            "[diode] file",
            format!("'{}' has no [diode] section", path.display()),
        ));
    }
    model
        .validate()
        .map_err(|e| err("[diode]", e.to_string()))?;
    Ok(model)
}

fn read_diode_keys(reader: &mut Reader, model: &mut DiodeModel) -> Result<(), ConfigError> {
    model.saturation_current = reader.number("saturation_current", model.saturation_current)?;
    model.ideality = reader.number("ideality", model.ideality)?;
    model.series_resistance = reader.number("series_resistance", model.series_resistance)?;
    model.junction_capacitance =
        reader.number("junction_capacitance", model.junction_capacitance)?;
    model.thermal_voltage = reader.number("thermal_voltage", model.thermal_voltage)?;
    Ok(())
}

impl RunConfig {
    /// Parse config text. Relative file references resolve against
    /// `base_dir` and must exist.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        let sections = parse_sections(text)?;
        for section in sections {
            let name = section.name.clone();
            let mut r = Reader {
                name: section.name,
                entries: section.entries,
                taken: BTreeSet::new(),
            };
            match name.as_str() {
                "chain" => {
                    config.frequency = r.number("frequency", config.frequency)?;
                    config.elements = r.count("elements", config.elements)?;
                    config.incident_power_dbm =
                        r.number("incident_power_dbm", config.incident_power_dbm)?;
                    config.match_reference_power_dbm = r.number(
                        "match_reference_power_dbm",
                        config.match_reference_power_dbm,
                    )?;
                    config.efficiency_reference_ohms = r.number(
                        "efficiency_reference_ohms",
                        config.efficiency_reference_ohms,
                    )?;
                    config.efficiency_convention = match r.take("efficiency_convention").as_deref()
                    {
                        None | Some("rms") => VoltageConvention::Rms,
                        Some("peak") => VoltageConvention::Peak,
                        Some(other) => {
                            return Err(err(
                                "[chain] efficiency_convention",
                                format!("expected rms or peak, got '{other}'"),
                            ))
                        }
                    };
                    config.mounted_resistor_ohms = r.number_opt("mounted_resistor_ohms")?;
                    let re = r.number_opt("converter_impedance_re")?;
                    let im = r.number_opt("converter_impedance_im")?;
                    config.converter_impedance = match (re, im) {
                        (None, None) => None,
                        (Some(re), im) => Some((re, im.unwrap_or(0.0))),
                        (None, Some(_)) => {
                            return Err(err(
                                "[chain] converter_impedance_im",
                                "given without converter_impedance_re",
                            ))
                        }
                    };
                }
                "link" => {
                    config.link = Some(FriisLink {
                        transmit_power_dbm: r.number("transmit_power_dbm", 30.0)?,
                        transmit_gain_dbi: r.number("transmit_gain_dbi", 0.0)?,
                        distance_m: r.number("distance_m", 1.0)?,
                    });
                }
                "antenna" => {
                    if let Some(path) = r.take("table") {
                        let resolved = resolve_path(base_dir, &path);
                        if !resolved.is_file() {
                            return Err(err(
                                "[antenna] table",
                                format!("file '{}' does not exist", resolved.display()),
                            ));
                        }
                        config.antenna_table = Some(resolved);
                    }
                }
                "combiner" => {
                    config.combiner_levels = r.count("levels", config.combiner_levels)?;
                    config.combiner_source_ohms =
                        r.number("source_ohms", config.combiner_source_ohms)?;
                    config.combiner_load_ohms =
                        r.number("load_ohms", config.combiner_load_ohms)?;
                }
                "rectifier" => {
                    config.rectifier_stages = r.count("stages", config.rectifier_stages)?;
                    config.stage_capacitance =
                        r.number("stage_capacitance", config.stage_capacitance)?;
                    config.load_resistance =
                        r.number("load_resistance", config.load_resistance)?;
                    config.half_stage = r.flag("half_stage", config.half_stage)?;
                    config.source_amplitude =
                        r.number("source_amplitude", config.source_amplitude)?;
                    config.source_resistance =
                        r.number("source_resistance", config.source_resistance)?;
                    config.source_frequency = match r.number_opt("source_frequency")? {
                        Some(f) => Some(f),
                        None => config.source_frequency,
                    };
                    config.simulate_periods =
                        r.count("simulate_periods", config.simulate_periods)?;
                }
                "diode" => {
                    if let Some(path) = r.take("file") {
                        let resolved = resolve_path(base_dir, &path);
                        if !resolved.is_file() {
                            return Err(err(
                                "[diode] file",
                                format!("file '{}' does not exist", resolved.display()),
                            ));
                        }
                        config.diode = load_diode_file(&resolved)?;
                        config.diode_file = Some(resolved);
                        // Inline keys alongside a file reference are ambiguous.
                        if r.entries.len() > 1 {
                            let extra = r
                                .entries
                                .iter()
                                .find(|(k, _)| k != "file")
                                .map(|(k, _)| k.clone())
                                .unwrap_or_default();
                            return Err(err(
                                format!("[diode] {extra}"),
                                "inline diode keys cannot be combined with 'file'",
                            ));
                        }
                    } else {
                        let mut model = config.diode;
                        read_diode_keys(&mut r, &mut model)?;
                        model.validate().map_err(|e| err("[diode]", e.to_string()))?;
                        config.diode = model;
                    }
                }
                "solver" => {
                    config.solver.residual_tol =
                        r.number("residual_tol", config.solver.residual_tol)?;
                    config.solver.rel_step_tol =
                        r.number("rel_step_tol", config.solver.rel_step_tol)?;
                    config.solver.max_iterations =
                        r.count("max_iterations", config.solver.max_iterations)?;
                    config.solver.integration = match r.take("integration").as_deref() {
                        None => config.solver.integration,
                        Some("trapezoidal") => Integration::Trapezoidal,
                        Some("backward_euler") => Integration::BackwardEuler,
                        Some(other) => {
                            return Err(err(
                                "[solver] integration",
                                format!("expected trapezoidal or backward_euler, got '{other}'"),
                            ))
                        }
                    };
                    config.samples_per_period =
                        r.count("samples_per_period", config.samples_per_period)?;
                    config.max_settle_periods =
                        r.count("max_settle_periods", config.max_settle_periods)?;
                    config.settle_rel_tol =
                        r.number("settle_rel_tol", config.settle_rel_tol)?;
                }
                "probe" => {
                    config.probe_amplitude = r.number("amplitude", config.probe_amplitude)?;
                    config.probe_samples_per_period =
                        r.count("samples_per_period", config.probe_samples_per_period)?;
                    config.probe_max_periods =
                        r.count("max_periods", config.probe_max_periods)?;
                    config.probe_settle_tol = r.number("settle_tol", config.probe_settle_tol)?;
                }
                "sweep" => {
                    config.sweep_from_dbm = r.number("from_dbm", config.sweep_from_dbm)?;
                    config.sweep_to_dbm = r.number("to_dbm", config.sweep_to_dbm)?;
                    config.sweep_step_db = r.number("step_db", config.sweep_step_db)?;
                    if let Some(raw) = r.take("loads") {
                        let loads: Result<Vec<f64>, _> = raw
                            .split(',')
                            .map(|t| parse_si(t.trim()))
                            .collect();
                        config.sweep_loads =
                            loads.map_err(|e| err("[sweep] loads", e.to_string()))?;
                    }
                }
                "match" => {
                    let re = r.number_opt("zin_re")?;
                    let im = r.number_opt("zin_im")?;
                    config.match_zin = match (re, im) {
                        (None, None) => None,
                        (Some(re), im) => Some((re, im.unwrap_or(0.0))),
                        (None, Some(_)) => {
                            return Err(err("[match] zin_im", "given without zin_re"))
                        }
                    };
                }
                "microstrip" => {
                    config.microstrip_z0 = r.number("z0", config.microstrip_z0)?;
                    config.microstrip_eps_r = r.number("eps_r", config.microstrip_eps_r)?;
                    config.microstrip_height = r.number("height", config.microstrip_height)?;
                    config.microstrip_f0 = match r.number_opt("f0")? {
                        Some(f) => Some(f),
                        None => config.microstrip_f0,
                    };
                }
                "output" => {
                    if let Some(dir) = r.take("directory") {
                        config.output_directory = PathBuf::from(dir);
                    }
                }
                other => {
                    return Err(err(format!("[{other}]"), "unknown section"));
                }
            }
            r.finish()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err("", format!("cannot read config '{}': {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Canonical text form; `parse(serialize(c))` reproduces `c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[chain]");
        let _ = writeln!(out, "frequency = {}", self.frequency);
        let _ = writeln!(out, "elements = {}", self.elements);
        let _ = writeln!(out, "incident_power_dbm = {}", self.incident_power_dbm);
        let _ = writeln!(
            out,
            "match_reference_power_dbm = {}",
            self.match_reference_power_dbm
        );
        let _ = writeln!(
            out,
            "efficiency_reference_ohms = {}",
            self.efficiency_reference_ohms
        );
        let _ = writeln!(
            out,
            "efficiency_convention = {}",
            match self.efficiency_convention {
                VoltageConvention::Rms => "rms",
                VoltageConvention::Peak => "peak",
            }
        );
        if let Some(r) = self.mounted_resistor_ohms {
            let _ = writeln!(out, "mounted_resistor_ohms = {r}");
        }
        if let Some((re, im)) = self.converter_impedance {
            let _ = writeln!(out, "converter_impedance_re = {re}");
            let _ = writeln!(out, "converter_impedance_im = {im}");
        }
        if let Some(link) = &self.link {
            let _ = writeln!(out, "\n[link]");
            let _ = writeln!(out, "transmit_power_dbm = {}", link.transmit_power_dbm);
            let _ = writeln!(out, "transmit_gain_dbi = {}", link.transmit_gain_dbi);
            let _ = writeln!(out, "distance_m = {}", link.distance_m);
        }
        if let Some(path) = &self.antenna_table {
            let _ = writeln!(out, "\n[antenna]");
            let _ = writeln!(out, "table = {}", path.display());
        }
        let _ = writeln!(out, "\n[combiner]");
        let _ = writeln!(out, "levels = {}", self.combiner_levels);
        let _ = writeln!(out, "source_ohms = {}", self.combiner_source_ohms);
        let _ = writeln!(out, "load_ohms = {}", self.combiner_load_ohms);
        let _ = writeln!(out, "\n[rectifier]");
        let _ = writeln!(out, "stages = {}", self.rectifier_stages);
        let _ = writeln!(out, "stage_capacitance = {}", self.stage_capacitance);
        let _ = writeln!(out, "load_resistance = {}", self.load_resistance);
        let _ = writeln!(out, "half_stage = {}", self.half_stage);
        let _ = writeln!(out, "source_amplitude = {}", self.source_amplitude);
        let _ = writeln!(out, "source_resistance = {}", self.source_resistance);
        if let Some(f) = self.source_frequency {
            let _ = writeln!(out, "source_frequency = {f}");
        }
        let _ = writeln!(out, "simulate_periods = {}", self.simulate_periods);
        if let Some(path) = &self.diode_file {
            let _ = writeln!(out, "\n[diode]");
            let _ = writeln!(out, "file = {}", path.display());
        } else {
            let _ = writeln!(out, "\n[diode]");
            let _ = writeln!(out, "saturation_current = {}", self.diode.saturation_current);
            let _ = writeln!(out, "ideality = {}", self.diode.ideality);
            let _ = writeln!(out, "series_resistance = {}", self.diode.series_resistance);
            let _ = writeln!(
                out,
                "junction_capacitance = {}",
                self.diode.junction_capacitance
            );
            let _ = writeln!(out, "thermal_voltage = {}", self.diode.thermal_voltage);
        }
        let _ = writeln!(out, "\n[solver]");
        let _ = writeln!(out, "residual_tol = {}", self.solver.residual_tol);
        let _ = writeln!(out, "rel_step_tol = {}", self.solver.rel_step_tol);
        let _ = writeln!(out, "max_iterations = {}", self.solver.max_iterations);
        let _ = writeln!(
            out,
            "integration = {}",
            match self.solver.integration {
                Integration::Trapezoidal => "trapezoidal",
                Integration::BackwardEuler => "backward_euler",
            }
        );
        let _ = writeln!(out, "samples_per_period = {}", self.samples_per_period);
        let _ = writeln!(out, "max_settle_periods = {}", self.max_settle_periods);
        let _ = writeln!(out, "settle_rel_tol = {}", self.settle_rel_tol);
        let _ = writeln!(out, "\n[probe]");
        let _ = writeln!(out, "amplitude = {}", self.probe_amplitude);
        let _ = writeln!(
            out,
            "samples_per_period = {}",
            self.probe_samples_per_period
        );
        let _ = writeln!(out, "max_periods = {}", self.probe_max_periods);
        let _ = writeln!(out, "settle_tol = {}", self.probe_settle_tol);
        let _ = writeln!(out, "\n[sweep]");
        let _ = writeln!(out, "from_dbm = {}", self.sweep_from_dbm);
        let _ = writeln!(out, "to_dbm = {}", self.sweep_to_dbm);
        let _ = writeln!(out, "step_db = {}", self.sweep_step_db);
        let loads: Vec<String> = self.sweep_loads.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "loads = {}", loads.join(","));
        if let Some((re, im)) = self.match_zin {
            let _ = writeln!(out, "\n[match]");
            let _ = writeln!(out, "zin_re = {re}");
            let _ = writeln!(out, "zin_im = {im}");
        }
        let _ = writeln!(out, "\n[microstrip]");
        let _ = writeln!(out, "z0 = {}", self.microstrip_z0);
        let _ = writeln!(out, "eps_r = {}", self.microstrip_eps_r);
        let _ = writeln!(out, "height = {}", self.microstrip_height);
        if let Some(f0) = self.microstrip_f0 {
            let _ = writeln!(out, "f0 = {f0}");
        }
        let _ = writeln!(out, "\n[output]");
        let _ = writeln!(out, "directory = {}", self.output_directory.display());
        out
    }

    pub fn antenna_model(&self) -> Result<AntennaModel, ConfigError> {
        match &self.antenna_table {
            None => Ok(AntennaModel::default_resonances()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    err(
                        "[antenna] table",
                        format!("cannot read '{}': {e}", path.display()),
                    )
                })?;
                AntennaModel::from_csv(&text).map_err(|e| err("[antenna] table", e.to_string()))
            }
        }
    }

    /// Rectifier section as a standalone doubler config (own frequency).
    pub fn doubler_config(&self) -> DoublerConfig {
        DoublerConfig {
            stages: self.rectifier_stages,
            diode: self.diode,
            stage_capacitance: self.stage_capacitance,
            load_resistance: self.load_resistance,
            source: SourceSpec {
                amplitude: self.source_amplitude,
                frequency: self.source_frequency.unwrap_or(self.frequency),
                series_resistance: self.source_resistance,
            },
            half_stage: self.half_stage,
        }
    }

    pub fn probe_config(&self) -> ProbeConfig {
        ProbeConfig {
            samples_per_period: self.probe_samples_per_period,
            max_periods: self.probe_max_periods,
            settle_tol: self.probe_settle_tol,
            solver: self.solver,
        }
    }

    pub fn steady_config(&self) -> SteadyRunConfig {
        SteadyRunConfig {
            samples_per_period: self.samples_per_period,
            max_periods: self.max_settle_periods,
            settle_rel_tol: self.settle_rel_tol,
            solver: self.solver,
        }
    }

    /// Assemble the full chain configuration.
    pub fn chain_config(&self) -> Result<ChainConfig, ConfigError> {
        let antenna = self.antenna_model()?;
        let design = design_wilkinson(
            2,
            self.combiner_source_ohms,
            self.combiner_load_ohms,
            self.frequency,
        )
        .map_err(|e| err("[combiner]", e.to_string()))?;
        let mut rectifier = self.doubler_config();
        rectifier.source.frequency = self.frequency;
        let link = match &self.link {
            Some(l) => LinkBudget::Friis {
                transmit_power_dbm: l.transmit_power_dbm,
                transmit_gain_dbi: l.transmit_gain_dbi,
                distance_m: l.distance_m,
            },
            None => LinkBudget::Incident {
                power_dbm: self.incident_power_dbm,
            },
        };
        Ok(ChainConfig {
            antenna,
            element_count: self.elements,
            combiner_tree: vec![design; self.combiner_levels],
            rectifier,
            frequency: self.frequency,
            link,
            mounted_resistor: self.mounted_resistor_ohms,
            converter_impedance: self
                .converter_impedance
                .map(|(re, im)| Complex64::new(re, im)),
            match_reference_power_dbm: self.match_reference_power_dbm,
            efficiency_reference_ohms: self.efficiency_reference_ohms,
            efficiency_convention: self.efficiency_convention,
            probe: self.probe_config(),
            steady: self.steady_config(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_text() {
        let config = RunConfig::parse("", Path::new(".")).unwrap();
        assert_eq!(config, RunConfig::default());
    }

    #[test]
    fn round_trips_through_serialize() {
        let text = "\
[chain]
frequency = 1.29G # hmm, no G suffix; use plain
";
        // 'G' is not in the suffix grammar; expect an error.
        assert!(RunConfig::parse(text, Path::new(".")).is_err());

        let text = "\
[chain]
frequency = 1290M
elements = 2
mounted_resistor_ohms = 47
[combiner]
levels = 1
[rectifier]
stages = 3
load_resistance = 10k
[sweep]
loads = 100,1k,10k
[match]
zin_re = 60
zin_im = -12
";
        let a = RunConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(a.frequency, 1.29e9);
        assert_eq!(a.elements, 2);
        assert_eq!(a.combiner_levels, 1);
        assert_eq!(a.sweep_loads, vec![100.0, 1e3, 1e4]);
        let b = RunConfig::parse(&a.serialize(), Path::new(".")).unwrap();
        assert_eq!(a, b);
        let c = RunConfig::parse(&b.serialize(), Path::new(".")).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn unknown_keys_and_sections_are_named() {
        let e = RunConfig::parse("[chain]\nfrequenzy = 1M\n", Path::new(".")).unwrap_err();
        assert_eq!(e.path, "[chain] frequenzy");
        let e = RunConfig::parse("[rocket]\nthrust = 9\n", Path::new(".")).unwrap_err();
        assert_eq!(e.path, "[rocket]");
    }

    #[test]
    fn missing_referenced_files_fail_at_parse() {
        let e = RunConfig::parse(
            "[antenna]\ntable = nowhere/missing.csv\n",
            Path::new("/tmp"),
        )
        .unwrap_err();
        assert_eq!(e.path, "[antenna] table");
        assert!(e.message.contains("missing.csv"));

        let e = RunConfig::parse("[diode]\nfile = missing.cfg\n", Path::new("/tmp")).unwrap_err();
        assert_eq!(e.path, "[diode] file");
    }

    #[test]
    fn diode_file_conflicts_with_inline_keys() {
        let dir = std::env::temp_dir().join("rectenna_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let diode_path = dir.join("d.cfg");
        std::fs::write(&diode_path, "[diode]\nsaturation_current = 1e-7\n").unwrap();
        let text = format!("[diode]\nfile = {}\nideality = 1.1\n", diode_path.display());
        let e = RunConfig::parse(&text, Path::new(".")).unwrap_err();
        assert!(e.message.contains("cannot be combined"));

        let ok = format!("[diode]\nfile = {}\n", diode_path.display());
        let config = RunConfig::parse(&ok, Path::new(".")).unwrap();
        assert_eq!(config.diode.saturation_current, 1e-7);
    }
}
