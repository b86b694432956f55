//! Modified nodal analysis with Newton-Raphson.
//!
//! Unknowns are the non-ground node voltages, one internal node per diode
//! with nonzero series resistance, and one branch current per voltage
//! source. The nonlinear KCL residual is assembled directly from component
//! constitutive laws, so "residual below tolerance" means exactly that at
//! every node.
//!
//! Sources stamp as ideal branches with their series resistance folded into
//! the branch equation `v+ - v- - Rs*i = E(t)`, where `i` flows from the +
//! terminal through the source to the - terminal.

use std::collections::BTreeMap;
use std::fmt;

use super::diode::{DiodeModel, JACOBIAN_GMIN};
use super::netlist::{ComponentKind, Netlist, NetlistError, NodeId};
use crate::linalg::{solve_in_place, DenseMatrix};

/// Companion-model integration rule for capacitors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integration {
    /// Second-order, the default; preferred for rectifier ripple accuracy.
    Trapezoidal,
    /// First-order, heavily damped; selectable for debugging.
    BackwardEuler,
}

/// Newton and integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute KCL residual tolerance in amperes (branch rows: volts).
    pub residual_tol: f64,
    /// Relative voltage-step tolerance.
    pub rel_step_tol: f64,
    pub max_iterations: usize,
    pub integration: Integration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-9,
            rel_step_tol: 1e-6,
            max_iterations: 200,
            integration: Integration::Trapezoidal,
        }
    }
}

/// Solver failure.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    Netlist(NetlistError),
    /// The MNA matrix lost rank; usually a node with no DC path.
    Singular { unknown: String },
    NonConvergence {
        /// Transient time stamp, absent for DC.
        time: Option<f64>,
        iterations: usize,
        residual: f64,
    },
    InvalidArgument { message: String },
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Netlist(e) => write!(f, "invalid netlist: {e}"),
            Self::Singular { unknown } => {
                write!(f, "singular MNA matrix at {unknown} (floating in this analysis?)")
            }
            Self::NonConvergence {
                time,
                iterations,
                residual,
            } => match time {
                Some(t) => write!(
                    f,
                    "Newton did not converge at t={t:.3e}s after {iterations} iterations (residual {residual:.3e})"
                ),
                None => write!(
                    f,
                    "Newton did not converge after {iterations} iterations (residual {residual:.3e})"
                ),
            },
            Self::InvalidArgument { message } => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for CircuitError {}

impl From<NetlistError> for CircuitError {
    fn from(e: NetlistError) -> Self {
        Self::Netlist(e)
    }
}

#[derive(Debug, Clone)]
enum UnknownKind {
    Node(String),
    DiodeInternal(String),
    Branch(String),
}

impl UnknownKind {
    fn describe(&self) -> String {
        match self {
            Self::Node(n) => format!("node '{n}'"),
            Self::DiodeInternal(d) => format!("internal node of diode '{d}'"),
            Self::Branch(s) => format!("branch current of source '{s}'"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ResistorEntry {
    a: Option<usize>,
    b: Option<usize>,
    conductance: f64,
}

#[derive(Debug, Clone, Copy)]
struct CapacitorEntry {
    a: Option<usize>,
    b: Option<usize>,
    farads: f64,
    v_prev: f64,
    i_prev: f64,
    // Companion values for the step in progress.
    g_eq: f64,
    i_eq: f64,
}

#[derive(Debug, Clone, Copy)]
struct DiodeEntry {
    /// External anode unknown; `None` is ground.
    anode: Option<usize>,
    /// Junction-side node: internal when the model has series resistance.
    junction: Option<usize>,
    cathode: Option<usize>,
    model: DiodeModel,
    /// 1/Rs between `anode` and `junction`, when Rs > 0.
    series_conductance: Option<f64>,
}

#[derive(Debug, Clone)]
enum SourceDrive {
    Dc(f64),
    Sine {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
}

#[derive(Debug, Clone)]
struct SourceEntry {
    name: String,
    a: Option<usize>,
    b: Option<usize>,
    branch: usize,
    series_resistance: f64,
    drive: SourceDrive,
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Assembled system over one netlist, reusable across many solves.
pub struct MnaSystem {
    unknowns: Vec<UnknownKind>,
    /// Unknown indices that carry a KCL equation (all node-type unknowns).
    n_node_unknowns: usize,
    resistors: Vec<ResistorEntry>,
    capacitors: Vec<CapacitorEntry>,
    diodes: Vec<DiodeEntry>,
    sources: Vec<SourceEntry>,
    /// Declared netlist nodes in declaration order: (name, unknown index).
    external_nodes: Vec<(String, Option<usize>)>,
    pub config: SolverConfig,
    x: Vec<f64>,
    jacobian: DenseMatrix,
    residual: Vec<f64>,
    delta: Vec<f64>,
}

impl MnaSystem {
    pub fn new(netlist: &Netlist, config: SolverConfig) -> Result<Self, CircuitError> {
        netlist.validate()?;
        let mut unknowns: Vec<UnknownKind> = Vec::new();
        let mut node_slot: Vec<Option<usize>> = vec![None; netlist.node_count()];
        let mut external_nodes = Vec::with_capacity(netlist.node_count());
        for (idx, name) in netlist.node_names().enumerate() {
            let id = NodeId(idx);
            if id.is_ground() {
                external_nodes.push((name.to_string(), None));
                continue;
            }
            let slot = unknowns.len();
            unknowns.push(UnknownKind::Node(name.to_string()));
            node_slot[idx] = Some(slot);
            external_nodes.push((name.to_string(), Some(slot)));
        }

        let slot_of = |id: NodeId| -> Option<usize> { node_slot[id.0] };

        let mut resistors = Vec::new();
        let mut capacitors = Vec::new();
        let mut diodes = Vec::new();
        let mut pending_sources = Vec::new();
        for component in netlist.components() {
            let a = slot_of(component.positive);
            let b = slot_of(component.negative);
            match &component.kind {
                ComponentKind::Resistor { ohms } => resistors.push(ResistorEntry {
                    a,
                    b,
                    conductance: 1.0 / ohms,
                }),
                ComponentKind::Capacitor { farads } => capacitors.push(CapacitorEntry {
                    a,
                    b,
                    farads: *farads,
                    v_prev: 0.0,
                    i_prev: 0.0,
                    g_eq: 0.0,
                    i_eq: 0.0,
                }),
                ComponentKind::Diode { model } => {
                    let junction = if model.series_resistance > 0.0 {
                        let slot = unknowns.len();
                        unknowns.push(UnknownKind::DiodeInternal(component.name.clone()));
                        Some(slot)
                    } else {
                        a
                    };
                    if model.junction_capacitance > 0.0 {
                        capacitors.push(CapacitorEntry {
                            a: junction,
                            b,
                            farads: model.junction_capacitance,
                            v_prev: 0.0,
                            i_prev: 0.0,
                            g_eq: 0.0,
                            i_eq: 0.0,
                        });
                    }
                    diodes.push(DiodeEntry {
                        anode: a,
                        junction,
                        cathode: b,
                        model: *model,
                        series_conductance: if model.series_resistance > 0.0 {
                            Some(1.0 / model.series_resistance)
                        } else {
                            None
                        },
                    });
                }
                ComponentKind::DcSource { volts } => {
                    pending_sources.push((component.name.clone(), a, b, 0.0, SourceDrive::Dc(*volts)));
                }
                ComponentKind::SineSource(p) => {
                    pending_sources.push((
                        component.name.clone(),
                        a,
                        b,
                        p.series_resistance,
                        SourceDrive::Sine {
                            amplitude: p.amplitude,
                            omega: 2.0 * std::f64::consts::PI * p.frequency,
                            phase: p.phase,
                        },
                    ));
                }
            }
        }
        let n_node_unknowns = unknowns.len();
        let mut sources = Vec::new();
        for (name, a, b, rs, drive) in pending_sources {
            let branch = unknowns.len();
            unknowns.push(UnknownKind::Branch(name.clone()));
            sources.push(SourceEntry {
                name,
                a,
                b,
                branch,
                series_resistance: rs,
                drive,
            });
        }

        let n = unknowns.len();
        Ok(Self {
            unknowns,
            n_node_unknowns,
            resistors,
            capacitors,
            diodes,
            sources,
            external_nodes,
            config,
            x: vec![0.0; n],
            jacobian: DenseMatrix::zeros(n),
            residual: vec![0.0; n],
            delta: vec![0.0; n],
        })
    }

    fn voltage(&self, slot: Option<usize>) -> f64 {
        slot.map_or(0.0, |i| self.x[i])
    }

    fn drive_value(&self, source: &SourceEntry, time: Option<f64>) -> f64 {
        match (&source.drive, time) {
            (SourceDrive::Dc(v), _) => *v,
            // DC analysis takes a sine source at its zero offset.
            (SourceDrive::Sine { .. }, None) => 0.0,
            (
                SourceDrive::Sine {
                    amplitude,
                    omega,
                    phase,
                },
                Some(t),
            ) => amplitude * (omega * t + phase).sin(),
        }
    }

    /// Refresh capacitor companion values for a step of size `dt` from the
    /// stored state.
    fn prepare_companions(&mut self, dt: f64) {
        for cap in &mut self.capacitors {
            match self.config.integration {
                Integration::Trapezoidal => {
                    let g = 2.0 * cap.farads / dt;
                    cap.g_eq = g;
                    cap.i_eq = -g * cap.v_prev - cap.i_prev;
                }
                Integration::BackwardEuler => {
                    let g = cap.farads / dt;
                    cap.g_eq = g;
                    cap.i_eq = -g * cap.v_prev;
                }
            }
        }
    }

    /// After an accepted step, fold the new voltages into capacitor state.
    fn commit_companions(&mut self) {
        for i in 0..self.capacitors.len() {
            let (a, b, g_eq, i_eq) = {
                let c = &self.capacitors[i];
                (c.a, c.b, c.g_eq, c.i_eq)
            };
            let v = self.voltage(a) - self.voltage(b);
            let cap = &mut self.capacitors[i];
            cap.i_prev = g_eq * v + i_eq;
            cap.v_prev = v;
        }
    }

    /// Node-row KCL residual (sum of currents leaving) and branch-row
    /// voltage residual at the current state.
    fn assemble_residual(&mut self, time: Option<f64>, transient: bool) {
        self.residual.fill(0.0);
        let add = |slot: Option<usize>, value: f64, residual: &mut [f64]| {
            if let Some(i) = slot {
                residual[i] += value;
            }
        };
        for r in &self.resistors {
            let i = r.conductance * (self.voltage(r.a) - self.voltage(r.b));
            add(r.a, i, &mut self.residual);
            add(r.b, -i, &mut self.residual);
        }
        if transient {
            for c in &self.capacitors {
                let i = c.g_eq * (self.voltage(c.a) - self.voltage(c.b)) + c.i_eq;
                add(c.a, i, &mut self.residual);
                add(c.b, -i, &mut self.residual);
            }
        }
        for d in &self.diodes {
            if let Some(gs) = d.series_conductance {
                let i = gs * (self.voltage(d.anode) - self.voltage(d.junction));
                add(d.anode, i, &mut self.residual);
                add(d.junction, -i, &mut self.residual);
            }
            let vj = self.voltage(d.junction) - self.voltage(d.cathode);
            let i = d.model.current(vj);
            add(d.junction, i, &mut self.residual);
            add(d.cathode, -i, &mut self.residual);
        }
        for s in &self.sources {
            let i = self.x[s.branch];
            add(s.a, i, &mut self.residual);
            add(s.b, -i, &mut self.residual);
            let v = self.voltage(s.a) - self.voltage(s.b);
            self.residual[s.branch] =
                v - s.series_resistance * i - self.drive_value(s, time);
        }
    }

    fn assemble_jacobian(&mut self, transient: bool) {
        self.jacobian.clear();
        let stamp_conductance = |jac: &mut DenseMatrix, a: Option<usize>, b: Option<usize>, g: f64| {
            if let Some(i) = a {
                jac.add(i, i, g);
                if let Some(j) = b {
                    jac.add(i, j, -g);
                }
            }
            if let Some(j) = b {
                jac.add(j, j, g);
                if let Some(i) = a {
                    jac.add(j, i, -g);
                }
            }
        };
        for r in &self.resistors {
            stamp_conductance(&mut self.jacobian, r.a, r.b, r.conductance);
        }
        if transient {
            for c in &self.capacitors {
                stamp_conductance(&mut self.jacobian, c.a, c.b, c.g_eq);
            }
        }
        for d in &self.diodes {
            if let Some(gs) = d.series_conductance {
                stamp_conductance(&mut self.jacobian, d.anode, d.junction, gs);
            }
            let vj = self.voltage(d.junction) - self.voltage(d.cathode);
            let g = d.model.conductance(vj).max(JACOBIAN_GMIN);
            stamp_conductance(&mut self.jacobian, d.junction, d.cathode, g);
        }
        for s in &self.sources {
            if let Some(i) = s.a {
                self.jacobian.add(i, s.branch, 1.0);
                self.jacobian.add(s.branch, i, 1.0);
            }
            if let Some(j) = s.b {
                self.jacobian.add(j, s.branch, -1.0);
                self.jacobian.add(s.branch, j, -1.0);
            }
            self.jacobian.add(s.branch, s.branch, -s.series_resistance);
        }
    }

    fn max_residual(&self) -> f64 {
        self.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// One Newton solve at `time` (`None` = DC: capacitors open, sine
    /// sources at zero). For transient steps, [`Self::prepare_companions`]
    /// must have run for the current step.
    fn newton(&mut self, time: Option<f64>, transient: bool) -> Result<NewtonStats, CircuitError> {
        let mut last_residual = f64::INFINITY;
        for iteration in 0..self.config.max_iterations {
            self.assemble_residual(time, transient);
            self.assemble_jacobian(transient);
            self.delta.copy_from_slice(&self.residual);
            for v in &mut self.delta {
                *v = -*v;
            }
            let mut jac = std::mem::replace(&mut self.jacobian, DenseMatrix::zeros(0));
            let solve_result = solve_in_place(&mut jac, &mut self.delta);
            self.jacobian = jac;
            if let Err(col) = solve_result {
                return Err(CircuitError::Singular {
                    unknown: self.unknowns[col.0].describe(),
                });
            }

            // Directional damping: junction voltage may move freely through
            // reverse bias and up to the critical voltage, but climbs past
            // it are rationed per iteration so the exponential cannot blow
            // the linearization.
            let mut alpha: f64 = 1.0;
            for d in &self.diodes {
                let v_now = self.voltage(d.junction) - self.voltage(d.cathode);
                let dv = self.delta_voltage(d.junction) - self.delta_voltage(d.cathode);
                if dv <= 0.0 {
                    continue;
                }
                let ceiling = v_now.max(d.model.critical_voltage()) + d.model.step_limit();
                if v_now + dv > ceiling {
                    alpha = alpha.min((ceiling - v_now) / dv);
                }
            }
            let alpha = alpha.clamp(1e-6, 1.0);

            let mut max_step_ratio = 0.0f64;
            for i in 0..self.x.len() {
                let step = alpha * self.delta[i];
                self.x[i] += step;
                if i < self.n_node_unknowns {
                    let scale = 1.0 + self.x[i].abs();
                    max_step_ratio = max_step_ratio.max(step.abs() / scale);
                }
            }

            self.assemble_residual(time, transient);
            last_residual = self.max_residual();
            if last_residual < self.config.residual_tol
                && max_step_ratio < self.config.rel_step_tol
            {
                return Ok(NewtonStats {
                    iterations: iteration + 1,
                    residual: last_residual,
                });
            }
        }
        Err(CircuitError::NonConvergence {
            time: if transient { time } else { None },
            iterations: self.config.max_iterations,
            residual: last_residual,
        })
    }

    fn delta_voltage(&self, slot: Option<usize>) -> f64 {
        slot.map_or(0.0, |i| self.delta[i])
    }

    /// DC operating point: capacitors open, sine sources at zero offset.
    pub fn solve_dc(&mut self) -> Result<NewtonStats, CircuitError> {
        self.x.fill(0.0);
        self.newton(None, false)
    }

    /// Advance one transient step to absolute time `t` with step `dt`.
    pub fn step_transient(&mut self, t: f64, dt: f64) -> Result<NewtonStats, CircuitError> {
        self.prepare_companions(dt);
        let stats = self.newton(Some(t), true)?;
        self.commit_companions();
        Ok(stats)
    }

    /// Reset all state (voltages and capacitor history) to zero.
    pub fn reset(&mut self) {
        self.x.fill(0.0);
        for c in &mut self.capacitors {
            c.v_prev = 0.0;
            c.i_prev = 0.0;
            c.i_eq = 0.0;
            c.g_eq = 0.0;
        }
    }

    /// Declared netlist nodes (name, voltage), ground included, in
    /// declaration order.
    pub fn external_voltages(&self) -> impl Iterator<Item = (&str, f64)> {
        self.external_nodes
            .iter()
            .map(|(name, slot)| (name.as_str(), self.voltage(*slot)))
    }

    pub fn node_voltage_by_name(&self, name: &str) -> Option<f64> {
        self.external_nodes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, slot)| self.voltage(*slot))
    }

    /// Branch current of a source: positive from + terminal through the
    /// source to the - terminal.
    pub fn source_current(&self, name: &str) -> Option<f64> {
        self.sources
            .iter()
            .find(|s| s.name == name)
            .map(|s| self.x[s.branch])
    }

    pub fn source_names(&self) -> impl Iterator<Item = &str> {
        self.sources.iter().map(|s| s.name.as_str())
    }
}

/// DC operating point of a netlist.
#[derive(Debug, Clone, PartialEq)]
pub struct DcSolution {
    /// Node name -> voltage, ground included at 0.
    pub voltages: BTreeMap<String, f64>,
    /// Source name -> branch current (+ terminal into the source).
    pub source_currents: BTreeMap<String, f64>,
    /// Worst KCL residual of the accepted solution, amperes.
    pub max_residual: f64,
    pub iterations: usize,
}

impl DcSolution {
    pub fn voltage(&self, node: &str) -> Option<f64> {
        self.voltages.get(node).copied()
    }
}

/// Solve the DC operating point with default solver settings.
///
/// Capacitors are treated as open circuits and sine sources sit at their
/// zero DC offset.
pub fn solve_dc(netlist: &Netlist) -> Result<DcSolution, CircuitError> {
    solve_dc_with(netlist, &SolverConfig::default())
}

/// [`solve_dc`] with explicit solver settings.
pub fn solve_dc_with(netlist: &Netlist, config: &SolverConfig) -> Result<DcSolution, CircuitError> {
    let mut system = MnaSystem::new(netlist, *config)?;
    let stats = system.solve_dc()?;
    let voltages = system
        .external_voltages()
        .map(|(n, v)| (n.to_string(), v))
        .collect();
    let source_currents = system
        .source_names()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .into_iter()
        .map(|name| {
            let i = system.source_current(&name).unwrap_or(0.0);
            (name, i)
        })
        .collect();
    Ok(DcSolution {
        voltages,
        source_currents,
        max_residual: stats.residual,
        iterations: stats.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::diode::DiodeModel;

    #[test]
    fn resistor_divider_midpoint() {
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 1.0).unwrap();
        n.add_resistor("r1", "in", "mid", 1000.0).unwrap();
        n.add_resistor("r2", "mid", "0", 1000.0).unwrap();
        let solution = solve_dc(&n).unwrap();
        assert!((solution.voltage("mid").unwrap() - 0.5).abs() < 1e-12);
        assert!((solution.voltage("in").unwrap() - 1.0).abs() < 1e-12);
        // Source delivers 0.5 mA; branch current is the current into the
        // + terminal, so it is negative here.
        assert!((solution.source_currents["v1"] + 0.5e-3).abs() < 1e-12);
    }

    #[test]
    fn all_sources_zero_rests_at_zero() {
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 0.0).unwrap();
        n.add_resistor("r1", "in", "a", 10.0).unwrap();
        n.add_diode("d1", "a", "b", DiodeModel::sms7621()).unwrap();
        n.add_resistor("r2", "b", "0", 47000.0).unwrap();
        let solution = solve_dc(&n).unwrap();
        for v in solution.voltages.values() {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn source_series_resistance_folds_into_branch() {
        // 1 V sine source has zero DC value; DC source with internal 50 ohm
        // feeding 50 ohm load -> load sees 0.5 V.
        let mut n = Netlist::new();
        n.add_sine_source(
            "vs",
            "in",
            "0",
            crate::circuit::netlist::SineParams {
                amplitude: 1.0,
                frequency: 1e6,
                phase: 0.0,
                series_resistance: 50.0,
            },
        )
        .unwrap();
        n.add_resistor("rl", "in", "0", 50.0).unwrap();
        let solution = solve_dc(&n).unwrap();
        // Sine at DC is zero.
        assert!(solution.voltage("in").unwrap().abs() < 1e-12);
    }

    #[test]
    fn floating_dc_node_is_named() {
        // Node reachable only through a capacitor: connected for validation,
        // floating for DC.
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 1.0).unwrap();
        n.add_resistor("r1", "in", "0", 100.0).unwrap();
        n.add_capacitor("c1", "in", "island", 1e-9).unwrap();
        n.add_capacitor("c2", "island", "0", 1e-9).unwrap();
        match solve_dc(&n) {
            Err(CircuitError::Singular { unknown }) => {
                assert!(unknown.contains("island"), "got {unknown}");
            }
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn diode_resistor_operating_point_matches_bisection() {
        // 1 V source, 1 kohm, diode to ground. Root of
        // 1e-8*(exp(v/(1.05*0.02585))-1) = (1-v)/1000.
        let model = DiodeModel::new(1e-8, 1.05, 0.0, 0.0, 0.02585).unwrap();
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 1.0).unwrap();
        n.add_resistor("r1", "in", "d", 1000.0).unwrap();
        n.add_diode("d1", "d", "0", model).unwrap();
        let tight = SolverConfig {
            residual_tol: 1e-13,
            ..SolverConfig::default()
        };
        let solution = solve_dc_with(&n, &tight).unwrap();
        let v = solution.voltage("d").unwrap();

        // Independent bisection oracle on the scalar KCL equation.
        let f = |v: f64| 1e-8 * ((v / (1.05 * 0.02585)).exp() - 1.0) - (1.0 - v) / 1000.0;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!(
            (v - oracle).abs() < 1e-9,
            "solver {v:.12}, oracle {oracle:.12}"
        );
    }

    #[test]
    fn determinism_bitwise() {
        let mut n = Netlist::new();
        n.add_dc_source("v1", "in", "0", 0.8).unwrap();
        n.add_resistor("r1", "in", "d", 220.0).unwrap();
        n.add_diode("d1", "d", "0", DiodeModel::sms7621()).unwrap();
        let a = solve_dc(&n).unwrap();
        let b = solve_dc(&n).unwrap();
        assert_eq!(a, b);
    }
}
