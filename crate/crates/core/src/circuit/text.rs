//! Netlist text format.
//!
//! One component per line: `KIND name node+ node- value...`. `#` starts a
//! comment, blank lines are skipped, numbers use the SI-suffix grammar and
//! ground is node `0`.
//!
//! ```text
//! # half-wave rectifier
//! S vin in 0 1.0 1k 0 50
//! D d1  in out 1e-8 1.05 0 0 25.852m
//! C c1  out 0 1u
//! R rl  out 0 10k
//! ```
//!
//! Kinds: `R`/`resistor`, `C`/`capacitor`, `D`/`diode` (values: Is, n,
//! optional Rs, Cj, Vt), `V`/`dc_source` (volts), `S`/`sine_source`
//! (amplitude, frequency, optional phase, series resistance).

use std::fmt;

use super::diode::{DiodeModel, THERMAL_VOLTAGE_300K};
use super::netlist::{ComponentKind, Netlist, NetlistError, SineParams};
use crate::si::parse_si;

#[derive(Debug, Clone, PartialEq)]
pub enum NetlistParseError {
    Syntax { line: usize, message: String },
    Semantic { line: usize, error: NetlistError },
}

impl fmt::Display for NetlistParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Syntax { line, message } => write!(f, "line {line}: {message}"),
            Self::Semantic { line, error } => write!(f, "line {line}: {error}"),
        }
    }
}

impl std::error::Error for NetlistParseError {}

fn syntax(line: usize, message: impl Into<String>) -> NetlistParseError {
    NetlistParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parse the netlist text format. The result still needs
/// [`Netlist::validate`] before solving; the parser only checks shape.
pub fn parse_netlist(input: &str) -> Result<Netlist, NetlistParseError> {
    let mut netlist = Netlist::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 4 {
            return Err(syntax(
                line_no,
                format!("expected 'KIND name node+ node- value...', got '{}'", line.trim()),
            ));
        }
        let kind = tokens[0].to_ascii_lowercase();
        let name = tokens[1];
        let (pos, neg) = (tokens[2], tokens[3]);
        let values: Result<Vec<f64>, _> = tokens[4..].iter().map(|t| parse_si(t)).collect();
        let values = values.map_err(|e| syntax(line_no, e.to_string()))?;
        let want = |count: usize, what: &str| -> Result<(), NetlistParseError> {
            if values.len() == count {
                Ok(())
            } else {
                Err(syntax(
                    line_no,
                    format!("'{name}' expects {what}, got {} values", values.len()),
                ))
            }
        };
        let semantic = |error: NetlistError| NetlistParseError::Semantic {
            line: line_no,
            error,
        };
        match kind.as_str() {
            "r" | "resistor" => {
                want(1, "one value (ohms)")?;
                netlist
                    .add_resistor(name, pos, neg, values[0])
                    .map_err(semantic)?;
            }
            "c" | "capacitor" => {
                want(1, "one value (farads)")?;
                netlist
                    .add_capacitor(name, pos, neg, values[0])
                    .map_err(semantic)?;
            }
            "v" | "dc_source" => {
                want(1, "one value (volts)")?;
                netlist
                    .add_dc_source(name, pos, neg, values[0])
                    .map_err(semantic)?;
            }
            "d" | "diode" => {
                if !(2..=5).contains(&values.len()) {
                    return Err(syntax(
                        line_no,
                        format!(
                            "'{name}' expects 2-5 values (Is, n, [Rs, Cj, Vt]), got {}",
                            values.len()
                        ),
                    ));
                }
                let model = DiodeModel::new(
                    values[0],
                    values[1],
                    values.get(2).copied().unwrap_or(0.0),
                    values.get(3).copied().unwrap_or(0.0),
                    values.get(4).copied().unwrap_or(THERMAL_VOLTAGE_300K),
                )
                .map_err(|e| syntax(line_no, e.to_string()))?;
                netlist.add_diode(name, pos, neg, model).map_err(semantic)?;
            }
            "s" | "sine_source" => {
                if !(2..=4).contains(&values.len()) {
                    return Err(syntax(
                        line_no,
                        format!(
                            "'{name}' expects 2-4 values (amplitude, frequency, [phase, Rs]), got {}",
                            values.len()
                        ),
                    ));
                }
                let params = SineParams {
                    amplitude: values[0],
                    frequency: values[1],
                    phase: values.get(2).copied().unwrap_or(0.0),
                    series_resistance: values.get(3).copied().unwrap_or(0.0),
                };
                netlist
                    .add_sine_source(name, pos, neg, params)
                    .map_err(semantic)?;
            }
            other => {
                return Err(syntax(line_no, format!("unknown component kind '{other}'")));
            }
        }
    }
    Ok(netlist)
}

/// Dump a netlist back to the text format, one component per line in
/// declaration order.
pub fn netlist_to_text(netlist: &Netlist) -> String {
    let mut out = String::new();
    for c in netlist.components() {
        let pos = netlist.node_name(c.positive);
        let neg = netlist.node_name(c.negative);
        let line = match &c.kind {
            ComponentKind::Resistor { ohms } => {
                format!("R {} {} {} {}", c.name, pos, neg, ohms)
            }
            ComponentKind::Capacitor { farads } => {
                format!("C {} {} {} {}", c.name, pos, neg, farads)
            }
            ComponentKind::DcSource { volts } => {
                format!("V {} {} {} {}", c.name, pos, neg, volts)
            }
            ComponentKind::Diode { model } => format!(
                "D {} {} {} {} {} {} {} {}",
                c.name,
                pos,
                neg,
                model.saturation_current,
                model.ideality,
                model.series_resistance,
                model.junction_capacitance,
                model.thermal_voltage
            ),
            ComponentKind::SineSource(p) => format!(
                "S {} {} {} {} {} {} {}",
                c.name, pos, neg, p.amplitude, p.frequency, p.phase, p.series_resistance
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}
