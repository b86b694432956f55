//! RF front-end model: unit conversions, free-space link budget, antenna
//! resonance lookup and mismatch loss.

use std::fmt;

use crate::si::parse_si;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// dBm to watts: `10^((p - 30) / 10)`.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

/// Watts to dBm; inverse of [`dbm_to_watts`].
pub fn watts_to_dbm(p_watts: f64) -> f64 {
    10.0 * p_watts.log10() + 30.0
}

/// dBi gain to linear power gain.
pub fn dbi_to_linear(g_dbi: f64) -> f64 {
    10f64.powf(g_dbi / 10.0)
}

/// Friis free-space received power in watts.
///
/// `p_r = p_t * g_t * g_r * (lambda / (4*pi*d))^2` with gains in dBi and
/// `lambda = c / f`.
pub fn friis_received_power(p_t_watts: f64, g_t_dbi: f64, g_r_dbi: f64, f_hz: f64, d_m: f64) -> f64 {
    assert!(d_m > 0.0, "distance must be positive");
    assert!(f_hz > 0.0, "frequency must be positive");
    let lambda = SPEED_OF_LIGHT / f_hz;
    let spreading = lambda / (4.0 * std::f64::consts::PI * d_m);
    p_t_watts * dbi_to_linear(g_t_dbi) * dbi_to_linear(g_r_dbi) * spreading * spreading
}

/// Errors from antenna-model construction and lookup.
#[derive(Debug, Clone, PartialEq)]
pub enum RfLinkError {
    /// Return loss must be <= 0 dB.
    PositiveReturnLoss(f64),
    /// Frequencies must be strictly increasing.
    NonIncreasingFrequency { index: usize },
    EmptyTable,
    /// Lookup frequency outside the tabulated range.
    FrequencyOutOfRange { f_hz: f64, min_hz: f64, max_hz: f64 },
    /// Malformed antenna CSV.
    Csv { line: usize, message: String },
}

impl fmt::Display for RfLinkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PositiveReturnLoss(v) => {
                write!(f, "return loss must be <= 0 dB, got {v}")
            }
            Self::NonIncreasingFrequency { index } => {
                write!(f, "antenna table frequencies must be strictly increasing (row {index})")
            }
            Self::EmptyTable => write!(f, "antenna table is empty"),
            Self::FrequencyOutOfRange { f_hz, min_hz, max_hz } => write!(
                f,
                "frequency {f_hz:e} Hz outside antenna table range [{min_hz:e}, {max_hz:e}]"
            ),
            Self::Csv { line, message } => write!(f, "antenna csv line {line}: {message}"),
        }
    }
}

impl std::error::Error for RfLinkError {}

/// Fraction of incident power delivered past a port with the given return
/// loss: `1 - |Gamma|^2` with `|Gamma| = 10^(RL/20)`.
pub fn mismatch_fraction(return_loss_db: f64) -> Result<f64, RfLinkError> {
    if return_loss_db > 0.0 {
        return Err(RfLinkError::PositiveReturnLoss(return_loss_db));
    }
    let gamma = 10f64.powf(return_loss_db / 20.0);
    Ok(1.0 - gamma * gamma)
}

/// One tabulated antenna operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaBand {
    pub frequency_hz: f64,
    /// Measured S11 at this frequency, dB, <= 0.
    pub return_loss_db: f64,
    pub gain_dbi: f64,
}

/// Interpolated antenna figures at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPoint {
    pub gain_dbi: f64,
    pub return_loss_db: f64,
}

/// Tabulated (frequency, return loss, gain) resonance data with linear
/// interpolation between points. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaModel {
    bands: Vec<AntennaBand>,
}

/// Return-loss depth assumed at each default resonance; the source material
/// reports resonant frequencies but no depths, so this is an explicit,
/// overridable placeholder.
pub const DEFAULT_RETURN_LOSS_DB: f64 = -15.0;
/// Gain assumed at each default resonance; placeholder on the same footing
/// as [`DEFAULT_RETURN_LOSS_DB`].
pub const DEFAULT_GAIN_DBI: f64 = 2.0;

impl AntennaModel {
    pub fn new(bands: Vec<AntennaBand>) -> Result<Self, RfLinkError> {
        if bands.is_empty() {
            return Err(RfLinkError::EmptyTable);
        }
        for (i, band) in bands.iter().enumerate() {
            if band.return_loss_db > 0.0 {
                return Err(RfLinkError::PositiveReturnLoss(band.return_loss_db));
            }
            if i > 0 && bands[i - 1].frequency_hz >= band.frequency_hz {
                return Err(RfLinkError::NonIncreasingFrequency { index: i });
            }
        }
        Ok(Self { bands })
    }

    /// The measured multiband resonances of the 2x2 coplanar monopole array:
    /// 900 MHz (GSM), 1.29 GHz (ISM), 4.1 and 5.6 GHz (WLAN), 6.8 and 9 GHz
    /// (UWB), each at the placeholder depth and gain.
    pub fn default_resonances() -> Self {
        let bands = [0.9e9, 1.29e9, 4.1e9, 5.6e9, 6.8e9, 9.0e9]
            .into_iter()
            .map(|frequency_hz| AntennaBand {
                frequency_hz,
                return_loss_db: DEFAULT_RETURN_LOSS_DB,
                gain_dbi: DEFAULT_GAIN_DBI,
            })
            .collect();
        Self::new(bands).expect("default table is valid")
    }

    pub fn bands(&self) -> &[AntennaBand] {
        &self.bands
    }

    pub fn min_frequency(&self) -> f64 {
        self.bands.first().unwrap().frequency_hz
    }

    pub fn max_frequency(&self) -> f64 {
        self.bands.last().unwrap().frequency_hz
    }

    /// Gain and return loss at `f_hz`, linearly interpolated between
    /// tabulated points and exact at them.
    pub fn at(&self, f_hz: f64) -> Result<AntennaPoint, RfLinkError> {
        let (min, max) = (self.min_frequency(), self.max_frequency());
        if !(f_hz >= min && f_hz <= max) {
            return Err(RfLinkError::FrequencyOutOfRange {
                f_hz,
                min_hz: min,
                max_hz: max,
            });
        }
        let upper = self
            .bands
            .iter()
            .position(|b| b.frequency_hz >= f_hz)
            .expect("f_hz <= max");
        if self.bands[upper].frequency_hz == f_hz || upper == 0 {
            let b = &self.bands[upper];
            return Ok(AntennaPoint {
                gain_dbi: b.gain_dbi,
                return_loss_db: b.return_loss_db,
            });
        }
        let (lo, hi) = (&self.bands[upper - 1], &self.bands[upper]);
        let t = (f_hz - lo.frequency_hz) / (hi.frequency_hz - lo.frequency_hz);
        Ok(AntennaPoint {
            gain_dbi: lo.gain_dbi + t * (hi.gain_dbi - lo.gain_dbi),
            return_loss_db: lo.return_loss_db + t * (hi.return_loss_db - lo.return_loss_db),
        })
    }

    /// Load a table from CSV text: header `freq_hz,return_loss_db,gain_dbi`
    /// then one row per point. Values use the SI-suffix grammar.
    pub fn from_csv(text: &str) -> Result<Self, RfLinkError> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
                Some((i, l)) => break (i, l),
                None => return Err(RfLinkError::EmptyTable),
            }
        };
        let expected = "freq_hz,return_loss_db,gain_dbi";
        if header.1.trim() != expected {
            return Err(RfLinkError::Csv {
                line: header.0 + 1,
                message: format!("expected header '{expected}', got '{}'", header.1.trim()),
            });
        }
        let mut bands = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(RfLinkError::Csv {
                    line: i + 1,
                    message: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| {
                parse_si(s).map_err(|e| RfLinkError::Csv {
                    line: i + 1,
                    message: e.to_string(),
                })
            };
            bands.push(AntennaBand {
                frequency_hz: parse(fields[0])?,
                return_loss_db: parse(fields[1])?,
                gain_dbi: parse(fields[2])?,
            });
        }
        Self::new(bands)
    }

    /// Inverse of [`Self::from_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,return_loss_db,gain_dbi\n");
        for b in &self.bands {
            out.push_str(&format!(
                "{},{},{}\n",
                b.frequency_hz, b.return_loss_db, b.gain_dbi
            ));
        }
        out
    }
}

impl Default for AntennaModel {
    fn default() -> Self {
        Self::default_resonances()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_definitions() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(40.0) - 10.0).abs() < 1e-12);
        assert!((dbm_to_watts(-40.0) - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn dbm_round_trip() {
        for k in 0..=160 {
            let dbm = -100.0 + k as f64;
            let back = watts_to_dbm(dbm_to_watts(dbm));
            assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
        }
    }

    #[test]
    fn friis_isotropic_one_meter() {
        // lambda = 1 m at 299.792458 MHz, d = 1 m: p_r/p_t = (1/4pi)^2.
        let ratio = friis_received_power(1.0, 0.0, 0.0, 299.792458e6, 1.0);
        let expected = (1.0 / (4.0 * std::f64::consts::PI)).powi(2);
        assert!(((ratio - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn friis_inverse_square_and_gain() {
        let p1 = friis_received_power(2.0, 3.0, 1.0, 1e9, 5.0);
        let p2 = friis_received_power(2.0, 3.0, 1.0, 1e9, 10.0);
        let drop_db = 10.0 * (p1 / p2).log10();
        assert!((drop_db - 6.020599913).abs() < 1e-6);

        let p3 = friis_received_power(2.0, 3.0, 4.0, 1e9, 5.0);
        assert!(((p3 / p1) - 10f64.powf(0.3)).abs() < 1e-12);
    }

    #[test]
    fn mismatch_fraction_endpoints() {
        assert_eq!(mismatch_fraction(f64::NEG_INFINITY).unwrap(), 1.0);
        assert_eq!(mismatch_fraction(0.0).unwrap(), 0.0);
        let f = mismatch_fraction(-10.0).unwrap();
        assert!((f - 0.9).abs() < 1e-12);
        assert!(mismatch_fraction(0.1).is_err());
    }

    #[test]
    fn default_table_hits_paper_bands_exactly() {
        let model = AntennaModel::default_resonances();
        let p900 = model.at(0.9e9).unwrap();
        assert_eq!(p900.gain_dbi, DEFAULT_GAIN_DBI);
        assert_eq!(p900.return_loss_db, DEFAULT_RETURN_LOSS_DB);
        let p9g = model.at(9.0e9).unwrap();
        assert_eq!(p9g.gain_dbi, DEFAULT_GAIN_DBI);
        assert!(model.at(10e9).is_err());
        assert!(model.at(0.5e9).is_err());
    }

    #[test]
    fn midpoint_interpolates_linearly() {
        let model = AntennaModel::new(vec![
            AntennaBand {
                frequency_hz: 1e9,
                return_loss_db: -10.0,
                gain_dbi: 1.0,
            },
            AntennaBand {
                frequency_hz: 3e9,
                return_loss_db: -20.0,
                gain_dbi: 3.0,
            },
        ])
        .unwrap();
        let mid = model.at(2e9).unwrap();
        assert!((mid.return_loss_db + 15.0).abs() < 1e-12);
        assert!((mid.gain_dbi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let model = AntennaModel::default_resonances();
        let csv = model.to_csv();
        let back = AntennaModel::from_csv(&csv).unwrap();
        assert_eq!(model, back);
        assert!(AntennaModel::from_csv("bogus\n1,2,3\n").is_err());
    }
}
