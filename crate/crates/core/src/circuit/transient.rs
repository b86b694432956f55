//! Fixed-step transient analysis.

use super::mna::{CircuitError, MnaSystem, NewtonStats, SolverConfig};
use super::netlist::Netlist;
use super::waveform::Waveform;

/// A sine source must be sampled with at least this many steps per period.
pub const MIN_STEPS_PER_PERIOD: f64 = 50.0;

/// Step-at-a-time transient driver over one assembled system.
///
/// Starts from the all-zero state (capacitors discharged) with sources
/// applied from the first step onward. Time is derived as `step * dt` so
/// long runs do not accumulate floating-point drift.
pub struct TransientRunner {
    system: MnaSystem,
    dt: f64,
    step_index: u64,
    max_residual: f64,
}

impl TransientRunner {
    pub fn new(netlist: &Netlist, dt: f64, config: &SolverConfig) -> Result<Self, CircuitError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CircuitError::InvalidArgument {
                message: format!("dt must be positive and finite, got {dt}"),
            });
        }
        if let Some(period) = netlist.min_source_period() {
            let max_dt = period / MIN_STEPS_PER_PERIOD;
            if dt > max_dt * (1.0 + 1e-9) {
                return Err(CircuitError::InvalidArgument {
                    message: format!(
                        "dt {dt:e} too coarse: sine period {period:e} requires dt <= {max_dt:e}"
                    ),
                });
            }
        }
        Ok(Self {
            system: MnaSystem::new(netlist, *config)?,
            dt,
            step_index: 0,
            max_residual: 0.0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the most recent accepted sample.
    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    /// Advance one step. On non-convergence the error carries the time stamp.
    pub fn step(&mut self) -> Result<NewtonStats, CircuitError> {
        let t = (self.step_index + 1) as f64 * self.dt;
        let stats = self.system.step_transient(t, self.dt)?;
        self.step_index += 1;
        self.max_residual = self.max_residual.max(stats.residual);
        Ok(stats)
    }

    pub fn node_voltage(&self, name: &str) -> Option<f64> {
        self.system.node_voltage_by_name(name)
    }

    pub fn source_current(&self, name: &str) -> Option<f64> {
        self.system.source_current(name)
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub(crate) fn system(&self) -> &MnaSystem {
        &self.system
    }
}

/// Settings for [`run_to_steady_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyRunConfig {
    pub samples_per_period: usize,
    pub max_periods: usize,
    /// Consecutive-period DC agreement that counts as settled.
    pub settle_rel_tol: f64,
    pub solver: SolverConfig,
}

impl Default for SteadyRunConfig {
    fn default() -> Self {
        Self {
            samples_per_period: 64,
            max_periods: 20_000,
            settle_rel_tol: crate::circuit::waveform::STEADY_SETTLE_REL_TOL,
            solver: SolverConfig::default(),
        }
    }
}

/// Outcome of a run-until-settled transient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyRunResult {
    /// Mean of the node over the last simulated period, volts.
    pub dc: f64,
    /// Max minus min over that period, volts.
    pub ripple: f64,
    /// Whether the consecutive-period DC criterion was met in budget.
    pub settled: bool,
    /// Periods simulated.
    pub periods: usize,
}

/// Step a circuit period by period until the DC value of `node` stops
/// moving (consecutive periods agree within the relative tolerance), or the
/// period budget runs out. Memory use is one period of samples.
///
/// At least three periods are always simulated so the settled flag means
/// what [`crate::circuit::extract_steady_state`] means.
pub fn run_to_steady_state(
    netlist: &Netlist,
    node: &str,
    period: f64,
    config: &SteadyRunConfig,
) -> Result<SteadyRunResult, CircuitError> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(CircuitError::InvalidArgument {
            message: format!("period must be positive, got {period}"),
        });
    }
    if config.samples_per_period < 2 || config.max_periods < 3 {
        return Err(CircuitError::InvalidArgument {
            message: "need at least 2 samples/period and 3 periods".to_string(),
        });
    }
    let spp = config.samples_per_period;
    let dt = period / spp as f64;
    let mut runner = TransientRunner::new(netlist, dt, &config.solver)?;
    if runner.node_voltage(node).is_none() {
        return Err(CircuitError::InvalidArgument {
            message: format!("netlist has no node '{node}'"),
        });
    }
    let mut window = vec![0.0f64; spp];
    let mut dc_prev = f64::NAN;
    let mut last = SteadyRunResult {
        dc: 0.0,
        ripple: 0.0,
        settled: false,
        periods: 0,
    };
    for p in 1..=config.max_periods {
        for slot in window.iter_mut() {
            runner.step()?;
            *slot = runner.node_voltage(node).unwrap_or(0.0);
        }
        let dc = window.iter().sum::<f64>() / spp as f64;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &window {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let settled = p >= 3
            && !dc_prev.is_nan()
            && (dc - dc_prev).abs() <= config.settle_rel_tol * dc.abs().max(1e-9);
        last = SteadyRunResult {
            dc,
            ripple: hi - lo,
            settled,
            periods: p,
        };
        if settled {
            return Ok(last);
        }
        dc_prev = dc;
    }
    Ok(last)
}

/// Run a transient from rest and collect every sample into a [`Waveform`].
///
/// Samples are taken at `t = 0, dt, 2*dt, ...` up to `t_end`.
pub fn run_transient(netlist: &Netlist, dt: f64, t_end: f64) -> Result<Waveform, CircuitError> {
    run_transient_with(netlist, dt, t_end, &SolverConfig::default())
}

/// [`run_transient`] with explicit solver settings.
pub fn run_transient_with(
    netlist: &Netlist,
    dt: f64,
    t_end: f64,
    config: &SolverConfig,
) -> Result<Waveform, CircuitError> {
    let mut runner = TransientRunner::new(netlist, dt, config)?;
    if !(t_end >= dt) {
        return Err(CircuitError::InvalidArgument {
            message: format!("t_end {t_end} must be at least dt {dt}"),
        });
    }
    let steps = ((t_end / dt) + 1e-9).floor() as u64;

    let node_names: Vec<String> = runner
        .system()
        .external_voltages()
        .filter(|(name, _)| *name != "0")
        .map(|(name, _)| name.to_string())
        .collect();
    let source_names: Vec<String> = runner
        .system()
        .source_names()
        .map(str::to_string)
        .collect();
    let mut waveform = Waveform::new(dt, node_names.clone(), source_names.clone());

    let mut node_row = vec![0.0; node_names.len()];
    let mut source_row = vec![0.0; source_names.len()];
    let record = |runner: &TransientRunner,
                  node_row: &mut [f64],
                  source_row: &mut [f64],
                  waveform: &mut Waveform,
                  residual: f64| {
        for (slot, name) in node_row.iter_mut().zip(&node_names) {
            *slot = runner.node_voltage(name).unwrap_or(0.0);
        }
        for (slot, name) in source_row.iter_mut().zip(&source_names) {
            *slot = runner.source_current(name).unwrap_or(0.0);
        }
        waveform.push_sample(node_row, source_row, residual);
    };

    // Initial rest state.
    record(&runner, &mut node_row, &mut source_row, &mut waveform, 0.0);
    for _ in 0..steps {
        let stats = runner.step()?;
        record(
            &runner,
            &mut node_row,
            &mut source_row,
            &mut waveform,
            stats.residual,
        );
    }
    Ok(waveform)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::netlist::SineParams;

    #[test]
    fn rc_charging_matches_closed_form() {
        // 1 V step into R=1k, C=1uF; v_c(t) = 1 - exp(-t/RC).
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 1.0).unwrap();
        n.add_resistor("r1", "in", "out", 1000.0).unwrap();
        n.add_capacitor("c1", "out", "0", 1e-6).unwrap();
        let w = run_transient(&n, 1e-6, 1e-3).unwrap();
        let samples = w.node("out").unwrap();
        let v_end = *samples.last().unwrap();
        let expected = 1.0 - (-1.0f64).exp();
        assert!(
            ((v_end - expected) / expected).abs() < 0.01,
            "v(1ms) = {v_end}, expected about {expected}"
        );
        assert_eq!(samples.len(), 1001);
    }

    #[test]
    fn lone_resistor_tracks_sine_source_exactly() {
        let mut n = Netlist::new();
        n.add_sine_source(
            "vs",
            "out",
            "0",
            SineParams {
                amplitude: 1.0,
                frequency: 1000.0,
                phase: 0.0,
                series_resistance: 0.0,
            },
        )
        .unwrap();
        n.add_resistor("rl", "out", "0", 50.0).unwrap();
        let dt = 1e-5; // 100 steps/period
        let w = run_transient(&n, dt, 2e-3).unwrap();
        let samples = w.node("out").unwrap();
        for (k, &v) in samples.iter().enumerate() {
            let expected = (2.0 * std::f64::consts::PI * 1000.0 * k as f64 * dt).sin();
            assert!(
                (v - expected).abs() < 1e-9,
                "sample {k}: {v} vs {expected}"
            );
        }
    }

    #[test]
    fn backward_euler_is_selectable() {
        use crate::circuit::mna::{Integration, SolverConfig};
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 1.0).unwrap();
        n.add_resistor("r1", "in", "out", 1000.0).unwrap();
        n.add_capacitor("c1", "out", "0", 1e-6).unwrap();
        let config = SolverConfig {
            integration: Integration::BackwardEuler,
            ..SolverConfig::default()
        };
        let w = run_transient_with(&n, 1e-6, 1e-3, &config).unwrap();
        let v_end = *w.node("out").unwrap().last().unwrap();
        let expected = 1.0 - (-1.0f64).exp();
        // First-order rule: looser than trapezoidal but still close at
        // 1000 steps per time constant.
        assert!(((v_end - expected) / expected).abs() < 0.02, "v = {v_end}");
    }

    #[test]
    fn rejects_coarse_dt_for_sine() {
        let mut n = Netlist::new();
        n.add_sine_source(
            "vs",
            "out",
            "0",
            SineParams {
                amplitude: 1.0,
                frequency: 1e6,
                phase: 0.0,
                series_resistance: 0.0,
            },
        )
        .unwrap();
        n.add_resistor("rl", "out", "0", 50.0).unwrap();
        // Period 1us, dt must be <= 20ns.
        assert!(matches!(
            run_transient(&n, 1e-7, 1e-5),
            Err(CircuitError::InvalidArgument { .. })
        ));
    }

    #[test]
    fn rejects_bad_dt_and_t_end() {
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 1.0).unwrap();
        n.add_resistor("r1", "in", "0", 100.0).unwrap();
        assert!(run_transient(&n, 0.0, 1.0).is_err());
        assert!(run_transient(&n, -1e-6, 1.0).is_err());
        assert!(run_transient(&n, 1e-3, 1e-4).is_err());
    }

    #[test]
    fn half_wave_rectifier_matches_dense_reference() {
        use crate::circuit::diode::DiodeModel;
        // Single-diode half-wave rectifier with RC load; steady mean within
        // 2% of a dt/10 reference run.
        let model = DiodeModel::new(1e-8, 1.05, 0.0, 0.0, 0.025852).unwrap();
        let mut n = Netlist::new();
        n.add_sine_source(
            "vs",
            "in",
            "0",
            SineParams {
                amplitude: 2.0,
                frequency: 1e5,
                phase: 0.0,
                series_resistance: 50.0,
            },
        )
        .unwrap();
        n.add_diode("d1", "in", "out", model).unwrap();
        n.add_capacitor("c1", "out", "0", 1e-7).unwrap();
        n.add_resistor("rl", "out", "0", 10_000.0).unwrap();

        let period = 1e-5;
        let t_end = 60.0 * period;
        let spp = 100.0;
        let coarse = run_transient(&n, period / spp, t_end).unwrap();
        let dense = run_transient(&n, period / (10.0 * spp), t_end).unwrap();
        let mean_tail = |w: &Waveform, frac: usize| {
            let s = w.node("out").unwrap();
            let tail = &s[s.len() - s.len() / frac..];
            tail.iter().sum::<f64>() / tail.len() as f64
        };
        let coarse_mean = mean_tail(&coarse, 6);
        let dense_mean = mean_tail(&dense, 6);
        assert!(
            ((coarse_mean - dense_mean) / dense_mean).abs() < 0.02,
            "coarse {coarse_mean}, dense {dense_mean}"
        );
    }
}
