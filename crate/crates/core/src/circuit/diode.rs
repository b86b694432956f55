//! Shockley diode model with overflow-safe evaluation.

use std::fmt;

/// Exponent argument above which `exp` is continued linearly. Keeps Newton
/// iterates finite when a trial junction voltage overshoots.
pub const EXP_CLAMP: f64 = 40.0;

/// Conductance floor used in Jacobian stamps only. A deeply reverse-biased
/// junction otherwise contributes an exactly-zero conductance and can leave
/// a node without any path in the linearized system. The floor never enters
/// the current evaluation, so converged solutions are unaffected.
pub const JACOBIAN_GMIN: f64 = 1e-12;

/// kT/q at 300 K.
pub const THERMAL_VOLTAGE_300K: f64 = 0.025852;

/// Shockley-equation parameter set for a junction diode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeModel {
    /// Saturation current in amperes.
    pub saturation_current: f64,
    /// Emission coefficient, dimensionless, in [1, 2].
    pub ideality: f64,
    /// Ohmic series resistance in ohms.
    pub series_resistance: f64,
    /// Zero-bias junction capacitance in farads, modeled as a constant
    /// capacitor in parallel with the junction.
    pub junction_capacitance: f64,
    /// Thermal voltage kT/q in volts.
    pub thermal_voltage: f64,
}

/// A parameter violated its allowed range.
#[derive(Debug, Clone, PartialEq)]
pub struct DiodeModelError {
    pub field: &'static str,
    pub value: f64,
}

impl fmt::Display for DiodeModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "diode model field '{}' out of range: {}",
            self.field, self.value
        )
    }
}

impl std::error::Error for DiodeModelError {}

impl DiodeModel {
    pub fn new(
        saturation_current: f64,
        ideality: f64,
        series_resistance: f64,
        junction_capacitance: f64,
        thermal_voltage: f64,
    ) -> Result<Self, DiodeModelError> {
        let model = Self {
            saturation_current,
            ideality,
            series_resistance,
            junction_capacitance,
            thermal_voltage,
        };
        model.validate()?;
        Ok(model)
    }

    /// Skyworks SMS7621 zero-bias Schottky, taken from the manufacturer's
    /// published SPICE model. The same values ship as a config file
    /// (`configs/sms7621_diode.cfg`); this constructor exists for
    /// programmatic use and any of it can be overridden.
    pub fn sms7621() -> Self {
        Self {
            saturation_current: 4e-8,
            ideality: 1.05,
            series_resistance: 12.0,
            junction_capacitance: 0.10e-12,
            thermal_voltage: THERMAL_VOLTAGE_300K,
        }
    }

    pub fn validate(&self) -> Result<(), DiodeModelError> {
        let check = |ok: bool, field: &'static str, value: f64| {
            if ok {
                Ok(())
            } else {
                Err(DiodeModelError { field, value })
            }
        };
        check(
            self.saturation_current > 0.0 && self.saturation_current.is_finite(),
            "saturation_current",
            self.saturation_current,
        )?;
        check(
            (1.0..=2.0).contains(&self.ideality),
            "ideality",
            self.ideality,
        )?;
        check(
            self.series_resistance >= 0.0 && self.series_resistance.is_finite(),
            "series_resistance",
            self.series_resistance,
        )?;
        check(
            self.junction_capacitance >= 0.0 && self.junction_capacitance.is_finite(),
            "junction_capacitance",
            self.junction_capacitance,
        )?;
        check(
            self.thermal_voltage > 0.0 && self.thermal_voltage.is_finite(),
            "thermal_voltage",
            self.thermal_voltage,
        )
    }

    /// Junction current `Is * (exp(v / (n*Vt)) - 1)` at junction voltage `v`.
    ///
    /// The exponent is clamped at [`EXP_CLAMP`] and continued linearly above
    /// it, which keeps the function finite and strictly increasing.
    pub fn current(&self, v: f64) -> f64 {
        let x = v / (self.ideality * self.thermal_voltage);
        self.saturation_current * (limexp(x) - 1.0)
    }

    /// dI/dV at junction voltage `v`; derivative of [`Self::current`]
    /// including the clamped continuation.
    pub fn conductance(&self, v: f64) -> f64 {
        let nvt = self.ideality * self.thermal_voltage;
        let x = v / nvt;
        self.saturation_current / nvt * limexp_derivative(x)
    }

    /// Per-iteration Newton update limit for the junction voltage.
    pub fn step_limit(&self) -> f64 {
        2.0 * self.ideality * self.thermal_voltage
    }

    /// Voltage where the exponential starts to dominate; junction updates
    /// past this point are rationed to [`Self::step_limit`] per iteration,
    /// while travel below it (reverse bias, weak forward) is free.
    pub fn critical_voltage(&self) -> f64 {
        let nvt = self.ideality * self.thermal_voltage;
        nvt * (nvt / (self.saturation_current * std::f64::consts::SQRT_2)).ln()
    }
}

/// exp(x) for x <= EXP_CLAMP, linear continuation with matched slope above.
#[inline]
fn limexp(x: f64) -> f64 {
    if x > EXP_CLAMP {
        EXP_CLAMP.exp() * (1.0 + (x - EXP_CLAMP))
    } else {
        x.exp()
    }
}

#[inline]
fn limexp_derivative(x: f64) -> f64 {
    if x > EXP_CLAMP {
        EXP_CLAMP.exp()
    } else {
        x.exp()
    }
}

/// Free-function form of [`DiodeModel::current`].
pub fn diode_current(model: &DiodeModel, v: f64) -> f64 {
    model.current(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_model() -> DiodeModel {
        DiodeModel::new(1e-8, 1.05, 0.0, 0.0, 0.02585).unwrap()
    }

    #[test]
    fn zero_bias_gives_zero_current() {
        assert_eq!(test_model().current(0.0), 0.0);
    }

    #[test]
    fn ln2_point_returns_saturation_current() {
        let m = test_model();
        let v = m.ideality * m.thermal_voltage * std::f64::consts::LN_2;
        let i = m.current(v);
        assert!((i - m.saturation_current).abs() <= 1e-12 * m.saturation_current);
    }

    #[test]
    fn matches_extended_precision_reference() {
        // Reference for Is=1e-8, n=1.05, Vt=0.02585, v=0.2, computed
        // independently with mpmath at 50-digit working precision:
        // x = 0.2/0.0271425 = 7.36851800681587915...
        // I = 1e-8 * (exp(x) - 1) = 1.5842826632012029e-5
        let m = test_model();
        let i = m.current(0.2);
        let reference = 1.584282663201203e-5;
        assert!(
            ((i - reference) / reference).abs() < 1e-12,
            "got {i:e}, want {reference:e}"
        );
    }

    #[test]
    fn strictly_increasing_across_clamp() {
        let m = test_model();
        let mut prev = f64::NEG_INFINITY;
        // Sweep well past the clamp boundary (x=40 at v ~ 1.086 V here).
        // Deep reverse bias saturates at -Is, where successive f64 values
        // can tie; strict growth is required once the exponential term is
        // resolvable.
        for k in 0..4000 {
            let v = -1.0 + k as f64 * 1e-3;
            let i = m.current(v);
            assert!(i.is_finite());
            if v >= -0.4 {
                assert!(i > prev, "not strictly increasing at v={v}");
            } else {
                assert!(i >= prev, "decreasing at v={v}");
            }
            prev = i;
        }
    }

    #[test]
    fn conductance_matches_finite_difference() {
        let m = test_model();
        for v in [-0.3, 0.0, 0.1, 0.25] {
            let h = 1e-7;
            let fd = (m.current(v + h) - m.current(v - h)) / (2.0 * h);
            let g = m.conductance(v);
            assert!(((g - fd) / fd.max(1e-12)).abs() < 1e-5, "v={v}");
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(DiodeModel::new(0.0, 1.05, 0.0, 0.0, 0.025).is_err());
        assert!(DiodeModel::new(1e-8, 0.9, 0.0, 0.0, 0.025).is_err());
        assert!(DiodeModel::new(1e-8, 2.1, 0.0, 0.0, 0.025).is_err());
        assert!(DiodeModel::new(1e-8, 1.05, -1.0, 0.0, 0.025).is_err());
        assert!(DiodeModel::new(1e-8, 1.05, 0.0, -1e-12, 0.025).is_err());
        assert!(DiodeModel::new(1e-8, 1.05, 0.0, 0.0, 0.0).is_err());
    }
}
