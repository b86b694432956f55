//! Connector-less maximum-power-transfer matching.
//!
//! The converter's input impedance (measured or simulated) picks the SMD
//! resistor mounted in the combining leg. A resistor cannot cancel
//! reactance, so the choice for reactive inputs is the real part, and the
//! residual mismatch shows up in the report's delivered fraction.

use std::fmt;

use num_complex::Complex64;

use crate::si::format_sig;

#[derive(Debug, Clone, PartialEq)]
pub enum MatchingError {
    /// Converter input impedance must have a positive real part.
    NonPositiveRealPart(Complex64),
}

impl fmt::Display for MatchingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveRealPart(z) => write!(
                f,
                "impedance {} + {}j has non-positive real part",
                z.re, z.im
            ),
        }
    }
}

impl std::error::Error for MatchingError {}

/// SMD resistor value for a converter input impedance: its real part.
///
/// For purely resistive inputs this is exactly the rule R = R_L.
pub fn matching_resistor(z_in: Complex64) -> Result<f64, MatchingError> {
    if !(z_in.re > 0.0) {
        return Err(MatchingError::NonPositiveRealPart(z_in));
    }
    Ok(z_in.re)
}

/// Fraction of available power delivered from `z_source` into `z_load`.
///
/// Uses the power-wave reflection coefficient
/// `Gamma = (z_load - conj(z_source)) / (z_load + z_source)`; the fraction
/// `1 - |Gamma|^2` is 1 exactly when the load conjugately matches the source.
pub fn delivered_power_fraction(z_source: Complex64, z_load: Complex64) -> f64 {
    let gamma = (z_load - z_source.conj()) / (z_load + z_source);
    (1.0 - gamma.norm_sqr()).clamp(0.0, 1.0)
}

/// Outcome of the matching procedure for one converter impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    /// Converter input impedance Z_in, ohms.
    pub converter_impedance: Complex64,
    /// Mounted resistor, ohms.
    pub chosen_resistor: f64,
    /// Power fraction delivered across the junction with that resistor.
    pub predicted_delivered_fraction: f64,
}

impl MatchReport {
    pub fn new(z_in: Complex64) -> Result<Self, MatchingError> {
        let chosen = matching_resistor(z_in)?;
        Ok(Self {
            converter_impedance: z_in,
            chosen_resistor: chosen,
            predicted_delivered_fraction: delivered_power_fraction(
                Complex64::new(chosen, 0.0),
                z_in,
            ),
        })
    }

    pub const CSV_HEADER: &'static str =
        "zin_re_ohm,zin_im_ohm,resistor_ohm,delivered_fraction";

    /// One CSV row matching [`Self::CSV_HEADER`], 6 significant digits.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            format_sig(self.converter_impedance.re, 6),
            format_sig(self.converter_impedance.im, 6),
            format_sig(self.chosen_resistor, 6),
            format_sig(self.predicted_delivered_fraction, 6)
        )
    }
}

impl fmt::Display for MatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "converter impedance : {} {} {}j ohm",
            format_sig(self.converter_impedance.re, 6),
            if self.converter_impedance.im < 0.0 { "-" } else { "+" },
            format_sig(self.converter_impedance.im.abs(), 6)
        )?;
        writeln!(
            f,
            "matching resistor   : {} ohm",
            format_sig(self.chosen_resistor, 6)
        )?;
        write!(
            f,
            "delivered fraction  : {}",
            format_sig(self.predicted_delivered_fraction, 6)
        )
    }
}
