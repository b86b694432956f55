//! End-to-end harvesting pipeline: antenna capture, Wilkinson combiner
//! tree, matched junction, rectifier transient, DC output and conversion
//! efficiency, plus the power and load sweeps.
//!
//! Power accounting runs through a ledger: every stage records input,
//! output, dissipated and reflected power, each computed from stage-local
//! physics so the ledger sums are a real consistency check rather than
//! bookkeeping by construction.

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::circuit::{
    run_to_steady_state, CircuitError, DiodeModel, SteadyRunConfig,
};
use crate::combiner::{combine, design_wilkinson, CombinerError, WilkinsonDesign};
use crate::matching::{delivered_power_fraction, matching_resistor, MatchingError};
use crate::rectifier::{
    build_doubler_ladder, estimate_input_impedance_with, DoublerConfig, ProbeConfig,
    RectifierError, SourceSpec,
};
use crate::rf_link::{
    dbi_to_linear, dbm_to_watts, friis_received_power, mismatch_fraction, AntennaModel,
    RfLinkError,
};
use crate::si::format_sig;

/// How RF power reaches the array elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkBudget {
    /// Incident power on an isotropic reference element, dBm; element gain
    /// applies on top. This is the swept quantity of the power sweep.
    Incident { power_dbm: f64 },
    /// Free-space link from a transmitter; received power per element
    /// comes from the Friis equation with the antenna's tabulated gain.
    Friis {
        transmit_power_dbm: f64,
        transmit_gain_dbi: f64,
        distance_m: f64,
    },
}

/// Interpretation of the source voltage in the efficiency ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoltageConvention {
    /// `v_in = sqrt(P * Z_ref)` (the default).
    Rms,
    /// `v_in = sqrt(2 * P * Z_ref)`.
    Peak,
}

/// Full chain description.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub antenna: AntennaModel,
    /// Array size; must equal 2^(combiner tree depth).
    pub element_count: usize,
    /// One 2-way design per tree level, antenna side first.
    pub combiner_tree: Vec<WilkinsonDesign>,
    pub rectifier: DoublerConfig,
    /// Operating frequency, hertz; must lie within the antenna table.
    pub frequency: f64,
    pub link: LinkBudget,
    /// Mounted SMD matching resistor, ohms. Probed at the reference power
    /// when absent.
    pub mounted_resistor: Option<f64>,
    /// Converter input impedance override (the measured value); probed per
    /// run when absent.
    pub converter_impedance: Option<Complex64>,
    /// Incident power at which the mounted resistor is chosen when it is
    /// not given explicitly.
    pub match_reference_power_dbm: f64,
    /// Reference impedance for the efficiency voltage convention, ohms.
    pub efficiency_reference_ohms: f64,
    pub efficiency_convention: VoltageConvention,
    pub probe: ProbeConfig,
    pub steady: SteadyRunConfig,
}

impl ChainConfig {
    /// Default chain at one of the antenna's tabulated resonances: a 2x2
    /// array behind two 2-way combiner levels and the seven-stage ladder
    /// with the shipped Schottky model, 22 kohm load and 10 pF stage
    /// capacitors (small enough that RF-period settling stays tractable;
    /// the rectifier-module default of 100 pF still applies to standalone
    /// ladders).
    pub fn default_at(frequency: f64) -> Self {
        let design = design_wilkinson(2, 50.0, 50.0, frequency).expect("valid default design");
        let mut rectifier = DoublerConfig::new(
            7,
            DiodeModel::sms7621(),
            22e3,
            SourceSpec {
                amplitude: 0.0,
                frequency,
                series_resistance: 50.0,
            },
        );
        rectifier.stage_capacitance = 10e-12;
        Self {
            antenna: AntennaModel::default_resonances(),
            element_count: 4,
            combiner_tree: vec![design, design],
            rectifier,
            frequency,
            link: LinkBudget::Incident { power_dbm: 10.0 },
            mounted_resistor: None,
            converter_impedance: None,
            match_reference_power_dbm: 10.0,
            efficiency_reference_ohms: 50.0,
            efficiency_convention: VoltageConvention::Rms,
            // The junction impedance only means something once the ladder's
            // DC operating point stops drifting, which takes on the order
            // of load-R times stage-C in RF periods.
            probe: ProbeConfig {
                max_periods: 6000,
                ..ProbeConfig::default()
            },
            steady: SteadyRunConfig {
                max_periods: 8000,
                ..SteadyRunConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let depth = self.combiner_tree.len();
        if self.element_count != 1usize << depth {
            return Err(ChainError::InvalidConfig(format!(
                "element count {} does not match combiner tree depth {} (expected {})",
                self.element_count,
                depth,
                1usize << depth
            )));
        }
        for (i, d) in self.combiner_tree.iter().enumerate() {
            if d.n_ways != 2 {
                return Err(ChainError::InvalidConfig(format!(
                    "combiner tree level {i} is {}-way; the tree cascades 2-way blocks",
                    d.n_ways
                )));
            }
        }
        let (min, max) = (self.antenna.min_frequency(), self.antenna.max_frequency());
        if !(self.frequency >= min && self.frequency <= max) {
            return Err(ChainError::InvalidConfig(format!(
                "frequency {:e} outside antenna table range [{min:e}, {max:e}]",
                self.frequency
            )));
        }
        if let Some(r) = self.mounted_resistor {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ChainError::InvalidConfig(format!(
                    "mounted resistor must be positive, got {r}"
                )));
            }
        }
        if !(self.efficiency_reference_ohms > 0.0) {
            return Err(ChainError::InvalidConfig(
                "efficiency reference impedance must be positive".to_string(),
            ));
        }
        self.rectifier
            .validate()
            .map_err(|e| ChainError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self::default_at(0.9e9)
    }
}

#[derive(Debug)]
pub enum ChainError {
    InvalidConfig(String),
    RfLink(RfLinkError),
    Combiner(CombinerError),
    Matching(MatchingError),
    /// A solver stage failed; carries which stage.
    Stage { stage: String, error: String },
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig(m) => write!(f, "invalid chain config: {m}"),
            Self::RfLink(e) => write!(f, "rf link: {e}"),
            Self::Combiner(e) => write!(f, "combiner: {e}"),
            Self::Matching(e) => write!(f, "matching: {e}"),
            Self::Stage { stage, error } => write!(f, "{stage}: {error}"),
        }
    }
}

impl std::error::Error for ChainError {}

impl From<RfLinkError> for ChainError {
    fn from(e: RfLinkError) -> Self {
        Self::RfLink(e)
    }
}

impl From<CombinerError> for ChainError {
    fn from(e: CombinerError) -> Self {
        Self::Combiner(e)
    }
}

impl From<MatchingError> for ChainError {
    fn from(e: MatchingError) -> Self {
        Self::Matching(e)
    }
}

fn stage_err(stage: &str) -> impl Fn(RectifierError) -> ChainError + '_ {
    move |error| ChainError::Stage {
        stage: stage.to_string(),
        error: error.to_string(),
    }
}

fn circuit_stage_err(stage: &str) -> impl Fn(CircuitError) -> ChainError + '_ {
    move |error| ChainError::Stage {
        stage: stage.to_string(),
        error: error.to_string(),
    }
}

/// Conversion efficiency in percent: `100 * v_dc / v_in`.
pub fn efficiency(v_dc: f64, v_in: f64) -> Result<f64, ChainError> {
    if !(v_in > 0.0) {
        return Err(ChainError::InvalidConfig(format!(
            "v_in must be positive, got {v_in}"
        )));
    }
    if v_dc < 0.0 {
        return Err(ChainError::InvalidConfig(format!(
            "v_dc must be non-negative, got {v_dc}"
        )));
    }
    Ok(100.0 * v_dc / v_in)
}

/// One stage of the power ledger; all powers in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerStage {
    pub name: String,
    pub input: f64,
    pub output: f64,
    pub dissipated: f64,
    pub reflected: f64,
}

impl PowerStage {
    pub fn imbalance(&self) -> f64 {
        self.input - self.output - self.dissipated - self.reflected
    }
}

/// Stage-by-stage power accounting for one chain run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerLedger {
    pub stages: Vec<PowerStage>,
}

impl PowerLedger {
    fn push(&mut self, name: &str, input: f64, output: f64, dissipated: f64, reflected: f64) {
        self.stages.push(PowerStage {
            name: name.to_string(),
            input,
            output,
            dissipated,
            reflected,
        });
    }

    /// Worst relative `input - output - dissipated - reflected` across
    /// stages.
    pub fn max_relative_imbalance(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.imbalance().abs() / s.input.abs().max(1e-30))
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,input_W,output_W,dissipated_W,reflected_W\n");
        for s in &self.stages {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.name,
                format_sig(s.input, 6),
                format_sig(s.output, 6),
                format_sig(s.dissipated, 6),
                format_sig(s.reflected, 6)
            );
        }
        out
    }
}

/// Everything a single chain run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    pub v_dc: f64,
    pub efficiency_pct: f64,
    pub settled: bool,
    /// Converter input impedance used at the junction.
    pub converter_impedance: Complex64,
    pub mounted_resistor: f64,
    pub delivered_fraction: f64,
    /// Sine amplitude driving the rectifier ladder.
    pub drive_amplitude: f64,
    /// Input power the efficiency is referenced to, dBm.
    pub reference_power_dbm: f64,
    pub ledger: PowerLedger,
}

/// Per-element available power at the ports and the reference power for
/// the efficiency ratio.
fn element_power(config: &ChainConfig) -> Result<(f64, f64), ChainError> {
    let point = config.antenna.at(config.frequency)?;
    match config.link {
        LinkBudget::Incident { power_dbm } => {
            let p = dbm_to_watts(power_dbm) * dbi_to_linear(point.gain_dbi);
            Ok((p, power_dbm))
        }
        LinkBudget::Friis {
            transmit_power_dbm,
            transmit_gain_dbi,
            distance_m,
        } => {
            let p = friis_received_power(
                dbm_to_watts(transmit_power_dbm),
                transmit_gain_dbi,
                point.gain_dbi,
                config.frequency,
                distance_m,
            );
            Ok((p, crate::rf_link::watts_to_dbm(p)))
        }
    }
}

/// Run antenna capture and the combiner tree, returning the power at the
/// junction and the ledger rows so far.
fn front_end_power(config: &ChainConfig) -> Result<(f64, PowerLedger), ChainError> {
    let mut ledger = PowerLedger::default();
    let point = config.antenna.at(config.frequency)?;
    let (p_element, _) = element_power(config)?;
    let captured = p_element * mismatch_fraction(point.return_loss_db)?;
    let n = config.element_count as f64;
    ledger.push(
        "antenna capture",
        n * p_element,
        n * captured,
        0.0,
        n * (p_element - captured),
    );

    // Coherent in-phase signals as (power, phase) pairs down the tree.
    let mut signals: Vec<(f64, f64)> = vec![(captured, 0.0); config.element_count];
    for (level, design) in config.combiner_tree.iter().enumerate() {
        let mut next = Vec::with_capacity(signals.len() / 2);
        let (mut p_in, mut p_out, mut p_dis, mut p_ref) = (0.0, 0.0, 0.0, 0.0);
        for pair in signals.chunks(2) {
            let to_phasor = |(p, phase): (f64, f64)| {
                Complex64::from_polar((p * design.load_impedance).sqrt(), phase)
            };
            let result = combine(&[to_phasor(pair[0]), to_phasor(pair[1])], design, config.frequency)?;
            p_in += result.input_power;
            p_out += result.output_power;
            p_dis += result.dissipated_in_isolation;
            p_ref += result.reflected_power;
            next.push((result.output_power, result.output.arg()));
        }
        ledger.push(
            &format!("combiner level {}", level + 1),
            p_in,
            p_out,
            p_dis,
            p_ref,
        );
        signals = next;
    }
    Ok((signals[0].0, ledger))
}

/// Available-power sine amplitude for a source with series resistance:
/// `sqrt(8 * P * R_source)`.
fn drive_amplitude(power_w: f64, r_source: f64) -> f64 {
    (8.0 * power_w * r_source).sqrt()
}

/// Resolve the mounted matching resistor for a config: the configured
/// value, or the real part of the converter impedance probed at the
/// reference incident power.
pub fn resolve_matching(config: &ChainConfig) -> Result<f64, ChainError> {
    config.validate()?;
    if let Some(r) = config.mounted_resistor {
        return Ok(r);
    }
    if let Some(z) = config.converter_impedance {
        return Ok(matching_resistor(z)?);
    }
    let mut reference = config.clone();
    reference.link = LinkBudget::Incident {
        power_dbm: config.match_reference_power_dbm,
    };
    let (p_junction, _) = front_end_power(&reference)?;
    let amp = drive_amplitude(p_junction, config.rectifier.source.series_resistance);
    let zin = estimate_input_impedance_with(&config.rectifier, amp, &config.probe)
        .map_err(stage_err("matching reference impedance probe"))?;
    Ok(matching_resistor(zin)?)
}

/// Run the full pipeline once. Resolves the mounted resistor first; use
/// [`run_chain_with_mount`] to reuse a resolved value across many runs.
pub fn run_chain(config: &ChainConfig) -> Result<ChainRun, ChainError> {
    let mount = resolve_matching(config)?;
    run_chain_with_mount(config, mount)
}

/// [`run_chain`] with the mounted matching resistor already resolved.
pub fn run_chain_with_mount(config: &ChainConfig, mounted: f64) -> Result<ChainRun, ChainError> {
    config.validate()?;
    let (_, reference_power_dbm) = element_power(config)?;
    let (p_junction, mut ledger) = front_end_power(config)?;
    let r_source = config.rectifier.source.series_resistance;
    let z_ref = config.efficiency_reference_ohms;
    let p_reference = dbm_to_watts(reference_power_dbm);
    let v_in = match config.efficiency_convention {
        VoltageConvention::Rms => (p_reference * z_ref).sqrt(),
        VoltageConvention::Peak => (2.0 * p_reference * z_ref).sqrt(),
    };

    if p_junction <= 0.0 {
        ledger.push("matching junction", 0.0, 0.0, 0.0, 0.0);
        ledger.push("rectifier", 0.0, 0.0, 0.0, 0.0);
        return Ok(ChainRun {
            v_dc: 0.0,
            efficiency_pct: 0.0,
            settled: true,
            converter_impedance: Complex64::new(0.0, 0.0),
            mounted_resistor: mounted,
            delivered_fraction: 0.0,
            drive_amplitude: 0.0,
            reference_power_dbm,
            ledger,
        });
    }

    // Converter impedance at this operating point (probe amplitude is the
    // junction-available drive before mismatch).
    let zin = match config.converter_impedance {
        Some(z) => z,
        None => {
            let probe_amp = drive_amplitude(p_junction, r_source);
            estimate_input_impedance_with(&config.rectifier, probe_amp, &config.probe)
                .map_err(stage_err("converter impedance probe"))?
        }
    };
    let fraction = delivered_power_fraction(Complex64::new(mounted, 0.0), zin);
    let p_delivered = p_junction * fraction;
    ledger.push(
        "matching junction",
        p_junction,
        p_delivered,
        0.0,
        p_junction - p_delivered,
    );

    let amp = drive_amplitude(p_delivered, r_source);
    let mut rectifier = config.rectifier;
    rectifier.source.amplitude = amp;
    rectifier.source.frequency = config.frequency;
    let netlist = build_doubler_ladder(&rectifier).map_err(stage_err("rectifier build"))?;
    let steady = run_to_steady_state(
        &netlist,
        &rectifier.output_node(),
        1.0 / config.frequency,
        &config.steady,
    )
    .map_err(circuit_stage_err("rectifier transient"))?;
    let v_dc = steady.dc.max(0.0);
    let p_dc = v_dc * v_dc / rectifier.load_resistance;
    ledger.push(
        "rectifier",
        p_delivered,
        p_dc,
        (p_delivered - p_dc).max(0.0),
        0.0,
    );

    Ok(ChainRun {
        v_dc,
        efficiency_pct: efficiency(v_dc, v_in)?,
        settled: steady.settled,
        converter_impedance: zin,
        mounted_resistor: mounted,
        delivered_fraction: fraction,
        drive_amplitude: amp,
        reference_power_dbm,
        ledger,
    })
}

/// One sweep sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub v_dc: f64,
    pub efficiency_pct: f64,
    pub settled: bool,
}

/// Ordered sweep output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// `"power"` or `"load"`.
    pub kind: String,
    pub rows: Vec<SweepRow>,
    /// x of the best efficiency row.
    pub argmax_x: Option<f64>,
    /// Fingerprint of the config that produced the sweep.
    pub config_fingerprint: u64,
}

impl SweepResult {
    /// CSV with a header comment naming the sweep type and config hash:
    /// `x,v_dc_V,efficiency_pct,settled`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# sweep-{} config={:016x}\nx,v_dc_V,efficiency_pct,settled\n",
            self.kind, self.config_fingerprint
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_sig(row.x, 6),
                format_sig(row.v_dc, 6),
                format_sig(row.efficiency_pct, 6),
                row.settled
            );
        }
        out
    }
}

/// FNV-1a over the canonical debug form of the config.
pub fn config_fingerprint(config: &ChainConfig) -> u64 {
    let text = format!("{config:?}");
    let mut hash = 0xcbf29ce484222325u64;
    for b in text.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn failed_row(x: f64) -> SweepRow {
    SweepRow {
        x,
        v_dc: 0.0,
        efficiency_pct: 0.0,
        settled: false,
    }
}

/// Sweep the incident power override from `from_dbm` to `to_dbm` inclusive.
///
/// The mounted matching resistor is resolved once from the base config and
/// held fixed across the sweep; each point re-probes the converter
/// impedance at its own drive level. Failed points are recorded in-row
/// with `settled = false` and the sweep continues.
pub fn sweep_input_power(
    config: &ChainConfig,
    from_dbm: f64,
    to_dbm: f64,
    step_db: f64,
) -> Result<SweepResult, ChainError> {
    if !(from_dbm < to_dbm) {
        return Err(ChainError::InvalidConfig(format!(
            "sweep range must have from < to, got [{from_dbm}, {to_dbm}]"
        )));
    }
    if !(step_db > 0.0) {
        return Err(ChainError::InvalidConfig(format!(
            "sweep step must be positive, got {step_db}"
        )));
    }
    let mounted = resolve_matching(config)?;
    let mut rows = Vec::new();
    let mut k = 0u32;
    loop {
        let x = from_dbm + f64::from(k) * step_db;
        if x > to_dbm + 1e-9 {
            break;
        }
        let mut point = config.clone();
        point.link = LinkBudget::Incident { power_dbm: x };
        let row = match run_chain_with_mount(&point, mounted) {
            Ok(run) => SweepRow {
                x,
                v_dc: run.v_dc,
                efficiency_pct: run.efficiency_pct,
                settled: run.settled,
            },
            Err(_) => failed_row(x),
        };
        rows.push(row);
        k += 1;
    }
    Ok(finish_sweep("power", rows, config))
}

/// Sweep the rectifier load over `loads` (strictly increasing, ohms).
///
/// The mounted resistor stays fixed at the base config's resolution, the
/// hardware-faithful reading of a resistor soldered once; the converter
/// impedance is re-probed for every load.
pub fn sweep_load(config: &ChainConfig, loads: &[f64]) -> Result<SweepResult, ChainError> {
    if loads.is_empty() {
        return Err(ChainError::InvalidConfig("empty load list".to_string()));
    }
    for (i, &r) in loads.iter().enumerate() {
        if !(r > 0.0 && r.is_finite()) {
            return Err(ChainError::InvalidConfig(format!(
                "load {i} must be positive, got {r}"
            )));
        }
        if i > 0 && loads[i - 1] >= r {
            return Err(ChainError::InvalidConfig(
                "loads must be strictly increasing".to_string(),
            ));
        }
    }
    let mounted = resolve_matching(config)?;
    let mut rows = Vec::new();
    for &load in loads {
        let mut point = config.clone();
        point.rectifier.load_resistance = load;
        let row = match run_chain_with_mount(&point, mounted) {
            Ok(run) => SweepRow {
                x: load,
                v_dc: run.v_dc,
                efficiency_pct: run.efficiency_pct,
                settled: run.settled,
            },
            Err(_) => failed_row(load),
        };
        rows.push(row);
    }
    Ok(finish_sweep("load", rows, config))
}

fn finish_sweep(kind: &str, rows: Vec<SweepRow>, config: &ChainConfig) -> SweepResult {
    let argmax_x = rows
        .iter()
        .max_by(|a, b| a.efficiency_pct.total_cmp(&b.efficiency_pct))
        .map(|r| r.x);
    SweepResult {
        kind: kind.to_string(),
        rows,
        argmax_x,
        config_fingerprint: config_fingerprint(config),
    }
}

/// True when `values` never decreases by more than `rel_tol` of the
/// largest magnitude seen.
pub fn is_nondecreasing(values: &[f64], rel_tol: f64) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-30);
    values.windows(2).all(|w| w[1] >= w[0] - rel_tol * scale)
}

/// Unimodality with a plateau tolerance: differences smaller than
/// `rel_tol` of the value scale count as flat, and the sign sequence of
/// the remaining differences may fall (rise-then-fall) at most once and
/// never rise after falling.
pub fn is_unimodal(values: &[f64], rel_tol: f64) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-30);
    let mut seen_fall = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= rel_tol * scale {
            continue;
        }
        if d < 0.0 {
            seen_fall = true;
        } else if seen_fall {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_config() -> ChainConfig {
        // Single element, no combiner levels, 1-stage ladder: fast enough
        // for unit tests.
        let mut config = ChainConfig::default_at(0.9e9);
        config.element_count = 1;
        config.combiner_tree.clear();
        config.rectifier.stages = 1;
        config.rectifier.stage_capacitance = 10e-12;
        config.rectifier.load_resistance = 5e3;
        config.steady.max_periods = 4000;
        config
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(efficiency(1.0, 1.0).unwrap(), 100.0);
        assert_eq!(efficiency(0.0, 3.0).unwrap(), 0.0);
        let v_in = (10.0f64 * 50.0).sqrt();
        let eta = efficiency(1.823, v_in).unwrap();
        assert!((eta - 8.153).abs() < 0.01, "eta = {eta}");
        assert!(efficiency(1.0, 0.0).is_err());
        assert!(efficiency(-0.1, 1.0).is_err());
    }

    #[test]
    fn zero_power_gives_zero_output() {
        let mut config = fast_config();
        config.link = LinkBudget::Incident {
            power_dbm: f64::NEG_INFINITY,
        };
        config.mounted_resistor = Some(50.0);
        let run = run_chain(&config).unwrap();
        assert_eq!(run.v_dc, 0.0);
        assert_eq!(run.efficiency_pct, 0.0);
    }

    #[test]
    fn validation_catches_mismatched_tree() {
        let config = ChainConfig {
            element_count: 8,
            ..ChainConfig::default()
        };
        assert!(matches!(
            config.validate(),
            Err(ChainError::InvalidConfig(_))
        ));
        let config = ChainConfig {
            frequency: 20e9,
            ..ChainConfig::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn chain_runs_and_conserves_power() {
        let mut config = fast_config();
        config.link = LinkBudget::Incident { power_dbm: 10.0 };
        let run = run_chain(&config).unwrap();
        assert!(run.v_dc > 0.0, "v_dc = {}", run.v_dc);
        assert!(run.settled);
        assert!(run.ledger.max_relative_imbalance() < 1e-6);
        assert!(run.delivered_fraction > 0.0 && run.delivered_fraction <= 1.0);
    }

    #[test]
    fn lossless_combiner_tree_quadruples_power() {
        // Perfect match, equal elements at the design frequency: the drive
        // power into the rectifier equals 4x the single-element power.
        let mut config = ChainConfig::default_at(0.9e9);
        config.mounted_resistor = Some(50.0);
        config.converter_impedance = Some(Complex64::new(50.0, 0.0));
        config.link = LinkBudget::Incident { power_dbm: 0.0 };
        config.validate().unwrap();
        let (p_junction, ledger) = front_end_power(&config).unwrap();
        let point = config.antenna.at(config.frequency).unwrap();
        let p_captured = dbm_to_watts(0.0)
            * dbi_to_linear(point.gain_dbi)
            * mismatch_fraction(point.return_loss_db).unwrap();
        assert!(
            ((p_junction - 4.0 * p_captured) / (4.0 * p_captured)).abs() < 1e-6,
            "junction {p_junction:e}, expected {:e}",
            4.0 * p_captured
        );
        assert!(ledger.max_relative_imbalance() < 1e-9);
    }

    #[test]
    fn monotonicity_helpers() {
        assert!(is_nondecreasing(&[1.0, 1.0, 2.0, 3.0], 1e-9));
        assert!(!is_nondecreasing(&[1.0, 0.5], 1e-9));
        assert!(is_unimodal(&[1.0, 2.0, 3.0, 2.0, 1.0], 1e-9));
        assert!(is_unimodal(&[1.0, 2.0, 3.0], 1e-9));
        assert!(is_unimodal(&[3.0, 2.0, 1.0], 1e-9));
        assert!(!is_unimodal(&[1.0, 2.0, 1.0, 2.0], 1e-9));
    }

    #[test]
    fn sweep_validation_and_counts() {
        let mut config = fast_config();
        config.mounted_resistor = Some(50.0);
        assert!(sweep_input_power(&config, 10.0, 0.0, 5.0).is_err());
        assert!(sweep_input_power(&config, 0.0, 10.0, -1.0).is_err());
        assert!(sweep_load(&config, &[100.0, 100.0]).is_err());
        assert!(sweep_load(&config, &[]).is_err());

        let sweep = sweep_input_power(&config, -40.0, 40.0, 10.0).unwrap();
        assert_eq!(sweep.rows.len(), 9);
        let csv = sweep.to_csv();
        assert!(csv.starts_with("# sweep-power config="));
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn singleton_load_sweep_is_its_own_argmax() {
        let mut config = fast_config();
        config.mounted_resistor = Some(50.0);
        let sweep = sweep_load(&config, &[4700.0]).unwrap();
        assert_eq!(sweep.argmax_x, Some(4700.0));
    }
}
