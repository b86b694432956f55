//! Flat circuit description consumed by the solver.
//!
//! A netlist is a list of two-terminal components between named nodes.
//! Node `0` is ground. Components are kept in insertion order, which makes
//! everything downstream (unknown numbering, waveform columns, text dumps)
//! deterministic.

use std::collections::HashMap;
use std::fmt;

use super::diode::DiodeModel;

/// Index into the netlist's node table. Ground is always `NodeId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const GROUND: NodeId = NodeId(0);

    pub fn is_ground(self) -> bool {
        self.0 == 0
    }
}

/// Sine voltage source parameters: `v(t) = amplitude * sin(2*pi*f*t + phase)`
/// behind `series_resistance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineParams {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub series_resistance: f64,
}

/// Element kinds supported by the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Resistor { ohms: f64 },
    Capacitor { farads: f64 },
    Diode { model: DiodeModel },
    DcSource { volts: f64 },
    SineSource(SineParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    /// Positive terminal (diode anode, source + terminal).
    pub positive: NodeId,
    /// Negative terminal (diode cathode, source - terminal).
    pub negative: NodeId,
    pub kind: ComponentKind,
}

impl Component {
    pub fn is_source(&self) -> bool {
        matches!(
            self.kind,
            ComponentKind::DcSource { .. } | ComponentKind::SineSource(_)
        )
    }
}

/// Netlist construction or validation failure.
#[derive(Debug, Clone, PartialEq)]
pub enum NetlistError {
    /// A resistor or capacitor value must be strictly positive and finite.
    NonPositiveValue {
        component: String,
        value: f64,
    },
    /// Component parameter is not finite.
    NonFiniteValue {
        component: String,
        field: &'static str,
    },
    DuplicateName(String),
    InvalidDiode {
        component: String,
        message: String,
    },
    /// No component references ground, or some nodes cannot reach it.
    NotGrounded {
        floating_nodes: Vec<String>,
    },
    /// Both terminals of a component are the same node.
    ShortedComponent(String),
    EmptyNetlist,
}

impl fmt::Display for NetlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveValue { component, value } => {
                write!(f, "component '{component}' has non-positive value {value}")
            }
            Self::NonFiniteValue { component, field } => {
                write!(f, "component '{component}' has non-finite {field}")
            }
            Self::DuplicateName(name) => write!(f, "duplicate component name '{name}'"),
            Self::InvalidDiode { component, message } => {
                write!(f, "diode '{component}': {message}")
            }
            Self::NotGrounded { floating_nodes } => write!(
                f,
                "nodes not connected to ground: {}",
                floating_nodes.join(", ")
            ),
            Self::ShortedComponent(name) => {
                write!(f, "component '{name}' connects a node to itself")
            }
            Self::EmptyNetlist => write!(f, "netlist has no components"),
        }
    }
}

impl std::error::Error for NetlistError {}

/// A flat circuit: named nodes plus two-terminal components.
#[derive(Debug, Clone, Default)]
pub struct Netlist {
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    components: Vec<Component>,
}

impl Netlist {
    pub fn new() -> Self {
        let mut netlist = Self {
            node_names: Vec::new(),
            node_index: HashMap::new(),
            components: Vec::new(),
        };
        netlist.node_names.push("0".to_string());
        netlist.node_index.insert("0".to_string(), NodeId::GROUND);
        netlist
    }

    /// Intern a node name, creating it on first use. `"0"` is ground.
    pub fn node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.node_index.get(name) {
            return id;
        }
        let id = NodeId(self.node_names.len());
        self.node_names.push(name.to_string());
        self.node_index.insert(name.to_string(), id);
        id
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.node_names[id.0]
    }

    /// All node names in declaration order, ground first.
    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.node_names.iter().map(|s| s.as_str())
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    fn push(&mut self, component: Component) -> Result<(), NetlistError> {
        if self.components.iter().any(|c| c.name == component.name) {
            return Err(NetlistError::DuplicateName(component.name));
        }
        if component.positive == component.negative {
            return Err(NetlistError::ShortedComponent(component.name));
        }
        self.components.push(component);
        Ok(())
    }

    pub fn add_resistor(
        &mut self,
        name: &str,
        positive: &str,
        negative: &str,
        ohms: f64,
    ) -> Result<(), NetlistError> {
        if !(ohms > 0.0 && ohms.is_finite()) {
            return Err(NetlistError::NonPositiveValue {
                component: name.to_string(),
                value: ohms,
            });
        }
        let (p, n) = (self.node(positive), self.node(negative));
        self.push(Component {
            name: name.to_string(),
            positive: p,
            negative: n,
            kind: ComponentKind::Resistor { ohms },
        })
    }

    pub fn add_capacitor(
        &mut self,
        name: &str,
        positive: &str,
        negative: &str,
        farads: f64,
    ) -> Result<(), NetlistError> {
        if !(farads > 0.0 && farads.is_finite()) {
            return Err(NetlistError::NonPositiveValue {
                component: name.to_string(),
                value: farads,
            });
        }
        let (p, n) = (self.node(positive), self.node(negative));
        self.push(Component {
            name: name.to_string(),
            positive: p,
            negative: n,
            kind: ComponentKind::Capacitor { farads },
        })
    }

    pub fn add_diode(
        &mut self,
        name: &str,
        anode: &str,
        cathode: &str,
        model: DiodeModel,
    ) -> Result<(), NetlistError> {
        model.validate().map_err(|e| NetlistError::InvalidDiode {
            component: name.to_string(),
            message: e.to_string(),
        })?;
        let (p, n) = (self.node(anode), self.node(cathode));
        self.push(Component {
            name: name.to_string(),
            positive: p,
            negative: n,
            kind: ComponentKind::Diode { model },
        })
    }

    pub fn add_dc_source(
        &mut self,
        name: &str,
        positive: &str,
        negative: &str,
        volts: f64,
    ) -> Result<(), NetlistError> {
        if !volts.is_finite() {
            return Err(NetlistError::NonFiniteValue {
                component: name.to_string(),
                field: "volts",
            });
        }
        let (p, n) = (self.node(positive), self.node(negative));
        self.push(Component {
            name: name.to_string(),
            positive: p,
            negative: n,
            kind: ComponentKind::DcSource { volts },
        })
    }

    pub fn add_sine_source(
        &mut self,
        name: &str,
        positive: &str,
        negative: &str,
        params: SineParams,
    ) -> Result<(), NetlistError> {
        for (field, v) in [
            ("amplitude", params.amplitude),
            ("frequency", params.frequency),
            ("phase", params.phase),
            ("series_resistance", params.series_resistance),
        ] {
            if !v.is_finite() {
                return Err(NetlistError::NonFiniteValue {
                    component: name.to_string(),
                    field,
                });
            }
        }
        if params.frequency <= 0.0 {
            return Err(NetlistError::NonPositiveValue {
                component: name.to_string(),
                value: params.frequency,
            });
        }
        if params.amplitude < 0.0 || params.series_resistance < 0.0 {
            return Err(NetlistError::NonPositiveValue {
                component: name.to_string(),
                value: params.amplitude.min(params.series_resistance),
            });
        }
        let (p, n) = (self.node(positive), self.node(negative));
        self.push(Component {
            name: name.to_string(),
            positive: p,
            negative: n,
            kind: ComponentKind::SineSource(params),
        })
    }

    /// Check the structural invariants: at least one component, ground
    /// referenced, and every node connected to ground through components.
    pub fn validate(&self) -> Result<(), NetlistError> {
        if self.components.is_empty() {
            return Err(NetlistError::EmptyNetlist);
        }
        // Union-find over nodes; every node must reach ground.
        let n = self.node_names.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for c in &self.components {
            let a = find(&mut parent, c.positive.0);
            let b = find(&mut parent, c.negative.0);
            if a != b {
                parent[a] = b;
            }
        }
        let ground_root = find(&mut parent, 0);
        let floating: Vec<String> = (1..n)
            .filter(|&i| find(&mut parent, i) != ground_root)
            .map(|i| self.node_names[i].clone())
            .collect();
        if !floating.is_empty() {
            return Err(NetlistError::NotGrounded {
                floating_nodes: floating,
            });
        }
        Ok(())
    }

    /// Smallest sine-source period present, if any. The transient step size
    /// must resolve it.
    pub fn min_source_period(&self) -> Option<f64> {
        self.components
            .iter()
            .filter_map(|c| match &c.kind {
                ComponentKind::SineSource(p) => Some(1.0 / p.frequency),
                _ => None,
            })
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }
}
