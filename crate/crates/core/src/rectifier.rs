//! Villard voltage-doubler ladders and their input-impedance probe.
//!
//! The canonical ladder is the half-wave Cockcroft-Walton cascade: per
//! stage one pump capacitor and one clamp diode on the AC column, one
//! rectifier diode and one storage capacitor on the DC column, so each
//! stage adds roughly twice the drive amplitude to the open-circuit output.
//! A `half_stage` variant builds single diode-capacitor pairs instead (two
//! pairs make one canonical stage).

use std::fmt;

use num_complex::Complex64;

use crate::circuit::{
    CircuitError, ComponentKind, DiodeModel, Netlist, SineParams, SolverConfig, TransientRunner,
};

/// Drive applied to the ladder input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub amplitude: f64,
    pub frequency: f64,
    /// Source resistance R_0, folded in series with the sine source.
    pub series_resistance: f64,
}

/// Ladder build parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublerConfig {
    /// Stage count n.
    pub stages: usize,
    pub diode: DiodeModel,
    /// Pump and storage capacitance per element, farads.
    pub stage_capacitance: f64,
    /// Load resistance R_L across the output, ohms.
    pub load_resistance: f64,
    pub source: SourceSpec,
    /// Build one diode and one capacitor per stage instead of two of each.
    pub half_stage: bool,
}

pub const DEFAULT_STAGE_CAPACITANCE: f64 = 100e-12;

impl DoublerConfig {
    pub fn new(stages: usize, diode: DiodeModel, load_resistance: f64, source: SourceSpec) -> Self {
        Self {
            stages,
            diode,
            stage_capacitance: DEFAULT_STAGE_CAPACITANCE,
            load_resistance,
            source,
            half_stage: false,
        }
    }

    pub fn validate(&self) -> Result<(), RectifierError> {
        if self.stages < 1 {
            return Err(RectifierError::InvalidConfig(
                "stages must be at least 1".to_string(),
            ));
        }
        if !(self.stage_capacitance > 0.0 && self.stage_capacitance.is_finite()) {
            return Err(RectifierError::InvalidConfig(format!(
                "stage capacitance must be positive, got {}",
                self.stage_capacitance
            )));
        }
        if !(self.load_resistance > 0.0 && self.load_resistance.is_finite()) {
            return Err(RectifierError::InvalidConfig(format!(
                "load resistance must be positive, got {}",
                self.load_resistance
            )));
        }
        if !(self.source.amplitude >= 0.0 && self.source.amplitude.is_finite()) {
            return Err(RectifierError::InvalidConfig(format!(
                "source amplitude must be non-negative, got {}",
                self.source.amplitude
            )));
        }
        if !(self.source.frequency > 0.0 && self.source.frequency.is_finite()) {
            return Err(RectifierError::InvalidConfig(format!(
                "source frequency must be positive, got {}",
                self.source.frequency
            )));
        }
        if !(self.source.series_resistance >= 0.0) {
            return Err(RectifierError::InvalidConfig(format!(
                "source resistance must be non-negative, got {}",
                self.source.series_resistance
            )));
        }
        self.diode
            .validate()
            .map_err(|e| RectifierError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    pub fn period(&self) -> f64 {
        1.0 / self.source.frequency
    }

    /// Node the load sits on; where the DC output is read.
    pub fn output_node(&self) -> String {
        output_node_name(self.stages, self.half_stage)
    }
}

/// Name of the ladder input node (the source terminal after its internal
/// resistance).
pub const INPUT_NODE: &str = "vin";
/// Name of the drive source component.
pub const SOURCE_NAME: &str = "vsrc";

fn output_node_name(stages: usize, half_stage: bool) -> String {
    if !half_stage {
        return format!("stage{stages}_dc");
    }
    // Half-stage ladders end on the last smoothed node; a single pair has
    // no rectified column yet and the output is the clamped AC node.
    match stages {
        1 => "stage1_ac".to_string(),
        p if p % 2 == 0 => format!("stage{}_dc", p / 2),
        p => format!("stage{}_dc", (p - 1) / 2),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RectifierError {
    InvalidConfig(String),
    Circuit(CircuitError),
    /// The impedance probe ran out of periods before consecutive periods
    /// agreed; carries the last (unsettled) estimate.
    ProbeNotSettled {
        last_impedance: Complex64,
        periods: usize,
    },
    /// No fundamental current at the probe plane; impedance undefined.
    NoInputCurrent,
}

impl fmt::Display for RectifierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig(m) => write!(f, "invalid doubler config: {m}"),
            Self::Circuit(e) => write!(f, "{e}"),
            Self::ProbeNotSettled {
                last_impedance,
                periods,
            } => write!(
                f,
                "impedance probe not settled after {periods} periods (last estimate {:.4} + {:.4}j ohm, settled=false)",
                last_impedance.re, last_impedance.im
            ),
            Self::NoInputCurrent => write!(f, "impedance probe saw no fundamental input current"),
        }
    }
}

impl std::error::Error for RectifierError {}

impl From<CircuitError> for RectifierError {
    fn from(e: CircuitError) -> Self {
        Self::Circuit(e)
    }
}

/// Build the ladder netlist for a config.
///
/// Node naming is deterministic: `stage<k>_ac` on the pump column,
/// `stage<k>_dc` on the storage column, `vin` at the source terminal.
pub fn build_doubler_ladder(config: &DoublerConfig) -> Result<Netlist, RectifierError> {
    config.validate()?;
    let mut netlist = Netlist::new();
    netlist
        .add_sine_source(
            SOURCE_NAME,
            INPUT_NODE,
            "0",
            SineParams {
                amplitude: config.source.amplitude,
                frequency: config.source.frequency,
                phase: 0.0,
                series_resistance: config.source.series_resistance,
            },
        )
        .map_err(CircuitError::from)?;

    let pairs = if config.half_stage {
        config.stages
    } else {
        2 * config.stages
    };
    let c = config.stage_capacitance;
    let ac_node = |m: usize| {
        if m == 0 {
            INPUT_NODE.to_string()
        } else {
            format!("stage{m}_ac")
        }
    };
    let dc_node = |m: usize| {
        if m == 0 {
            "0".to_string()
        } else {
            format!("stage{m}_dc")
        }
    };
    for pair in 1..=pairs {
        let m = pair.div_ceil(2);
        if pair % 2 == 1 {
            // Pump capacitor up the AC column plus the clamp diode.
            netlist
                .add_capacitor(&format!("c{m}_pump"), &ac_node(m - 1), &ac_node(m), c)
                .map_err(CircuitError::from)?;
            netlist
                .add_diode(
                    &format!("d{m}_clamp"),
                    &dc_node(m - 1),
                    &ac_node(m),
                    config.diode,
                )
                .map_err(CircuitError::from)?;
        } else {
            // Rectifier diode into the DC column plus the storage capacitor.
            netlist
                .add_diode(&format!("d{m}_rect"), &ac_node(m), &dc_node(m), config.diode)
                .map_err(CircuitError::from)?;
            netlist
                .add_capacitor(&format!("c{m}_store"), &dc_node(m), &dc_node(m - 1), c)
                .map_err(CircuitError::from)?;
        }
    }
    netlist
        .add_resistor("rload", &config.output_node(), "0", config.load_resistance)
        .map_err(CircuitError::from)?;
    netlist.validate().map_err(CircuitError::from)?;
    Ok(netlist)
}

/// Closed-form stage/output relation: `V_out = n*v0*r_l / (n*r0 + r_l)`.
///
/// Monotone nondecreasing in `r_l` and approaching `n*v0` as the load
/// opens.
pub fn analytic_output(n: usize, v0: f64, r0: f64, r_l: f64) -> f64 {
    assert!(n >= 1, "stage count must be at least 1");
    assert!(r_l > 0.0, "load resistance must be positive");
    assert!(r0 >= 0.0, "source resistance must be non-negative");
    let n = n as f64;
    n * v0 * r_l / (n * r0 + r_l)
}

/// Impedance-probe settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub samples_per_period: usize,
    /// Settling budget in source periods.
    pub max_periods: usize,
    /// Consecutive-period relative agreement of the impedance estimate.
    pub settle_tol: f64,
    pub solver: SolverConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            samples_per_period: 64,
            max_periods: 20,
            settle_tol: 1e-3,
            solver: SolverConfig::default(),
        }
    }
}

/// Default probe drive amplitude, volts.
pub const DEFAULT_PROBE_AMPLITUDE: f64 = 0.1;

/// Fundamental-frequency input impedance seen at sine source `source_name`.
///
/// Runs the transient period by period, projects the source-terminal
/// voltage and the current delivered into the circuit onto the fundamental
/// with a single-bin discrete Fourier sum over each whole period, and
/// returns the phasor ratio once consecutive periods agree.
pub fn probe_input_impedance(
    netlist: &Netlist,
    source_name: &str,
    config: &ProbeConfig,
) -> Result<Complex64, RectifierError> {
    let source = netlist
        .component(source_name)
        .ok_or_else(|| RectifierError::InvalidConfig(format!("no source '{source_name}'")))?;
    let (frequency, input_node) = match &source.kind {
        ComponentKind::SineSource(p) => (p.frequency, netlist.node_name(source.positive)),
        _ => {
            return Err(RectifierError::InvalidConfig(format!(
                "'{source_name}' is not a sine source"
            )))
        }
    };
    let input_node = input_node.to_string();
    let period = 1.0 / frequency;
    let spp = config.samples_per_period;
    let dt = period / spp as f64;
    let mut runner = TransientRunner::new(netlist, dt, &config.solver)?;

    let mut z_prev: Option<Complex64> = None;
    let mut last = Complex64::new(0.0, 0.0);
    for p in 1..=config.max_periods {
        let mut v_acc = Complex64::new(0.0, 0.0);
        let mut i_acc = Complex64::new(0.0, 0.0);
        for k in 0..spp {
            runner.step()?;
            let angle = -2.0 * std::f64::consts::PI * k as f64 / spp as f64;
            let rot = Complex64::from_polar(1.0, angle);
            let v = runner.node_voltage(&input_node).unwrap_or(0.0);
            // Branch current flows + terminal -> source; negate for the
            // current delivered into the circuit.
            let i = -runner.source_current(source_name).unwrap_or(0.0);
            v_acc += rot * v;
            i_acc += rot * i;
        }
        let scale = 2.0 / spp as f64;
        let v_ph = v_acc * scale;
        let i_ph = i_acc * scale;
        if i_ph.norm() < 1e-18 {
            return Err(RectifierError::NoInputCurrent);
        }
        let z = v_ph / i_ph;
        last = z;
        if p >= 3 {
            if let Some(prev) = z_prev {
                if (z - prev).norm() <= config.settle_tol * z.norm().max(1e-12) {
                    return Ok(z);
                }
            }
        }
        z_prev = Some(z);
    }
    Err(RectifierError::ProbeNotSettled {
        last_impedance: last,
        periods: config.max_periods,
    })
}

/// Input impedance of the ladder described by `config`, probed at
/// `probe_amplitude` with default probe settings.
pub fn estimate_input_impedance(
    config: &DoublerConfig,
    probe_amplitude: f64,
) -> Result<Complex64, RectifierError> {
    estimate_input_impedance_with(config, probe_amplitude, &ProbeConfig::default())
}

/// [`estimate_input_impedance`] with explicit probe settings.
pub fn estimate_input_impedance_with(
    config: &DoublerConfig,
    probe_amplitude: f64,
    probe: &ProbeConfig,
) -> Result<Complex64, RectifierError> {
    if !(probe_amplitude > 0.0 && probe_amplitude.is_finite()) {
        return Err(RectifierError::InvalidConfig(format!(
            "probe amplitude must be positive, got {probe_amplitude}"
        )));
    }
    let mut probed = *config;
    probed.source.amplitude = probe_amplitude;
    let netlist = build_doubler_ladder(&probed)?;
    probe_input_impedance(&netlist, SOURCE_NAME, probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{run_to_steady_state, ComponentKind, SteadyRunConfig};

    fn test_source(amplitude: f64, frequency: f64) -> SourceSpec {
        SourceSpec {
            amplitude,
            frequency,
            series_resistance: 50.0,
        }
    }

    fn count_kinds(netlist: &Netlist) -> (usize, usize, usize, usize) {
        let mut counts = (0, 0, 0, 0);
        for c in netlist.components() {
            match c.kind {
                ComponentKind::Diode { .. } => counts.0 += 1,
                ComponentKind::Capacitor { .. } => counts.1 += 1,
                ComponentKind::Resistor { .. } => counts.2 += 1,
                ComponentKind::DcSource { .. } | ComponentKind::SineSource(_) => counts.3 += 1,
            }
        }
        counts
    }

    #[test]
    fn single_stage_structure() {
        let config = DoublerConfig::new(1, DiodeModel::sms7621(), 1e6, test_source(1.0, 1e6));
        let netlist = build_doubler_ladder(&config).unwrap();
        let (diodes, caps, resistors, sources) = count_kinds(&netlist);
        assert_eq!(diodes, 2);
        assert_eq!(caps, 2);
        assert_eq!(resistors, 1); // load; the source resistance is internal
        assert_eq!(sources, 1);
        assert_eq!(config.output_node(), "stage1_dc");
    }

    #[test]
    fn seven_stage_structure() {
        let config = DoublerConfig::new(7, DiodeModel::sms7621(), 22e3, test_source(1.0, 9e9));
        let netlist = build_doubler_ladder(&config).unwrap();
        let (diodes, caps, _, _) = count_kinds(&netlist);
        assert_eq!(diodes, 14);
        assert_eq!(caps, 14);
        assert!(netlist.node_id("stage7_dc").is_some());
    }

    #[test]
    fn half_stage_structure() {
        let mut config =
            DoublerConfig::new(7, DiodeModel::sms7621(), 22e3, test_source(1.0, 1e9));
        config.half_stage = true;
        let netlist = build_doubler_ladder(&config).unwrap();
        let (diodes, caps, _, _) = count_kinds(&netlist);
        assert_eq!(diodes, 7);
        assert_eq!(caps, 7);
        assert_eq!(config.output_node(), "stage3_dc");
    }

    #[test]
    fn near_ideal_single_stage_approaches_double_amplitude() {
        // Strong diode, light load: DC output lands just under 2*amplitude.
        // A 1e-3 A saturation current leaks about 1 mA in reverse, so the
        // stage capacitors must hold charge across a period and the source
        // must be stiff: with 50 ohm behind the source the conduction-angle
        // drop alone would eat close to a volt off each peak.
        let diode = DiodeModel::new(1e-3, 1.05, 0.0, 0.0, 0.025852).unwrap();
        let mut config = DoublerConfig::new(
            1,
            diode,
            1e6,
            SourceSpec {
                amplitude: 5.0,
                frequency: 1e6,
                series_resistance: 1.0,
            },
        );
        config.stage_capacitance = 1e-6;
        let netlist = build_doubler_ladder(&config).unwrap();
        let result = run_to_steady_state(
            &netlist,
            &config.output_node(),
            config.period(),
            &SteadyRunConfig {
                max_periods: 10_000,
                settle_rel_tol: 1e-5,
                ..SteadyRunConfig::default()
            },
        )
        .unwrap();
        assert!(result.settled);
        assert!(
            result.dc > 2.0 * 5.0 - 2.0 * 0.3 && result.dc < 2.0 * 5.0,
            "dc = {}",
            result.dc
        );
    }

    #[test]
    fn analytic_output_examples() {
        assert_eq!(analytic_output(1, 1.0, 0.0, 1000.0), 1.0);
        let v = analytic_output(7, 0.37, 50.0, 1e12);
        assert!(((v - 7.0 * 0.37) / (7.0 * 0.37)).abs() < 1e-6);
        let v = analytic_output(7, 0.05, 50.0, 1000.0);
        assert!((v - 7.0 * 0.05 * 1000.0 / 1350.0).abs() < 1e-12);
        assert!((v - 0.25926).abs() < 1e-5);
    }

    #[test]
    fn probe_matches_resistive_reference() {
        // Ladder replaced by a plain 75 ohm resistor.
        let mut netlist = Netlist::new();
        netlist
            .add_sine_source(
                SOURCE_NAME,
                INPUT_NODE,
                "0",
                SineParams {
                    amplitude: 0.1,
                    frequency: 1e6,
                    phase: 0.0,
                    series_resistance: 50.0,
                },
            )
            .unwrap();
        netlist.add_resistor("rdut", INPUT_NODE, "0", 75.0).unwrap();
        let z = probe_input_impedance(&netlist, SOURCE_NAME, &ProbeConfig::default()).unwrap();
        assert!((z.re - 75.0).abs() < 0.075, "re = {}", z.re);
        assert!(z.im.abs() < 0.075, "im = {}", z.im);
    }

    #[test]
    fn probe_matches_capacitive_reference() {
        // 1 nF at 1 MHz: -j/(2 pi f C) = -j 159.15 ohm.
        let mut netlist = Netlist::new();
        netlist
            .add_sine_source(
                SOURCE_NAME,
                INPUT_NODE,
                "0",
                SineParams {
                    amplitude: 0.1,
                    frequency: 1e6,
                    phase: 0.0,
                    series_resistance: 50.0,
                },
            )
            .unwrap();
        netlist
            .add_capacitor("cdut", INPUT_NODE, "0", 1e-9)
            .unwrap();
        let z = probe_input_impedance(&netlist, SOURCE_NAME, &ProbeConfig::default()).unwrap();
        let expected = -1.0 / (2.0 * std::f64::consts::PI * 1e6 * 1e-9);
        assert!(
            ((z.im - expected) / expected).abs() < 0.01,
            "im = {}, expected {expected}",
            z.im
        );
        assert!(z.re.abs() < 0.01 * expected.abs(), "re = {}", z.re);
    }

    #[test]
    fn ladder_impedance_magnitude_shrinks_with_drive() {
        // 100 MHz keeps the DC settling time (load R times stage C) at a
        // few hundred periods; the impedance estimate is only meaningful
        // once the operating point stops drifting.
        let config = DoublerConfig::new(2, DiodeModel::sms7621(), 22e3, test_source(0.1, 1e8));
        let probe = ProbeConfig {
            max_periods: 8000,
            ..ProbeConfig::default()
        };
        let magnitudes: Vec<f64> = [0.05, 0.2, 0.8]
            .iter()
            .map(|&amp| {
                estimate_input_impedance_with(&config, amp, &probe)
                    .unwrap()
                    .norm()
            })
            .collect();
        assert!(
            magnitudes[0] > magnitudes[1] && magnitudes[1] > magnitudes[2],
            "magnitudes {magnitudes:?}"
        );
    }
}
