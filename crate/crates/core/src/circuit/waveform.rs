//! Sampled transient results and steady-state extraction.

use std::fmt::Write as _;

use super::mna::CircuitError;

/// Consecutive-period DC agreement required to call a waveform settled.
pub const STEADY_SETTLE_REL_TOL: f64 = 1e-4;

/// Fixed-step sampled node voltages and source branch currents.
///
/// All sequences share one length and one `dt`; sample `k` is at `t = k*dt`
/// with sample 0 the initial (all-zero) state.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    dt: f64,
    node_names: Vec<String>,
    node_samples: Vec<Vec<f64>>,
    source_names: Vec<String>,
    source_samples: Vec<Vec<f64>>,
    max_residual: f64,
}

impl Waveform {
    pub(crate) fn new(
        dt: f64,
        node_names: Vec<String>,
        source_names: Vec<String>,
    ) -> Self {
        let nodes = node_names.len();
        let sources = source_names.len();
        Self {
            dt,
            node_names,
            node_samples: vec![Vec::new(); nodes],
            source_names,
            source_samples: vec![Vec::new(); sources],
            max_residual: 0.0,
        }
    }

    /// Build a single-node waveform from raw samples (test and analysis
    /// helper; no sources).
    pub fn from_samples(dt: f64, node: &str, samples: Vec<f64>) -> Self {
        Self {
            dt,
            node_names: vec![node.to_string()],
            node_samples: vec![samples],
            source_names: Vec::new(),
            source_samples: Vec::new(),
            max_residual: 0.0,
        }
    }

    pub(crate) fn push_sample(&mut self, nodes: &[f64], sources: &[f64], residual: f64) {
        debug_assert_eq!(nodes.len(), self.node_samples.len());
        debug_assert_eq!(sources.len(), self.source_samples.len());
        for (column, &v) in self.node_samples.iter_mut().zip(nodes) {
            column.push(v);
        }
        for (column, &v) in self.source_samples.iter_mut().zip(sources) {
            column.push(v);
        }
        self.max_residual = self.max_residual.max(residual);
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples per sequence.
    pub fn len(&self) -> usize {
        self.node_samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.node_names.iter().map(String::as_str)
    }

    pub fn node(&self, name: &str) -> Option<&[f64]> {
        let idx = self.node_names.iter().position(|n| n == name)?;
        Some(&self.node_samples[idx])
    }

    pub fn source_current(&self, name: &str) -> Option<&[f64]> {
        let idx = self.source_names.iter().position(|n| n == name)?;
        Some(&self.source_samples[idx])
    }

    /// Worst Newton residual over all accepted steps, amperes.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// CSV export: `time_s,node_<id>_V,...` rows for every sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s");
        for name in &self.node_names {
            let _ = write!(out, ",node_{name}_V");
        }
        out.push('\n');
        for k in 0..self.len() {
            let _ = write!(out, "{:e}", k as f64 * self.dt);
            for column in &self.node_samples {
                let _ = write!(out, ",{:e}", column[k]);
            }
            out.push('\n');
        }
        out
    }
}

/// Periodic steady-state summary of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Mean of the final full period, volts.
    pub dc: f64,
    /// Max minus min over the final full period, volts.
    pub ripple: f64,
    /// True when the final two periods agree in DC within the relative
    /// settle tolerance.
    pub settled: bool,
}

/// Extract DC, ripple and a settled flag from the tail of a waveform.
///
/// The waveform must span at least three periods of `period`.
pub fn extract_steady_state(
    waveform: &Waveform,
    node: &str,
    period: f64,
) -> Result<SteadyState, CircuitError> {
    extract_steady_state_with_tol(waveform, node, period, STEADY_SETTLE_REL_TOL)
}

/// [`extract_steady_state`] with an explicit settle tolerance.
pub fn extract_steady_state_with_tol(
    waveform: &Waveform,
    node: &str,
    period: f64,
    settle_rel_tol: f64,
) -> Result<SteadyState, CircuitError> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(CircuitError::InvalidArgument {
            message: format!("period must be positive, got {period}"),
        });
    }
    let samples = waveform.node(node).ok_or_else(|| CircuitError::InvalidArgument {
        message: format!("waveform has no node '{node}'"),
    })?;
    let spp = (period / waveform.dt()).round() as usize;
    if spp < 2 {
        return Err(CircuitError::InvalidArgument {
            message: format!(
                "period {period} too short for dt {}: fewer than 2 samples per period",
                waveform.dt()
            ),
        });
    }
    let len = samples.len();
    if len < 3 * spp + 1 {
        return Err(CircuitError::InvalidArgument {
            message: format!(
                "waveform spans {} samples, need at least 3 periods ({} samples)",
                len,
                3 * spp + 1
            ),
        });
    }
    Ok(steady_of_windows(samples, spp, settle_rel_tol))
}

pub(crate) fn steady_of_windows(samples: &[f64], spp: usize, settle_rel_tol: f64) -> SteadyState {
    let len = samples.len();
    let last = &samples[len - spp..];
    let prev = &samples[len - 2 * spp..len - spp];
    let mean = |w: &[f64]| w.iter().sum::<f64>() / w.len() as f64;
    let dc = mean(last);
    let dc_prev = mean(prev);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in last {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let settled = (dc - dc_prev).abs() <= settle_rel_tol * dc.abs().max(1e-9);
    SteadyState {
        dc,
        ripple: hi - lo,
        settled,
    }
}
