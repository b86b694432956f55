//! SI-suffixed number parsing and fixed significant-digit formatting.
//!
//! One numeric grammar is used everywhere a human types a value: netlist
//! files, antenna tables and the CLI config format. A value is an ordinary
//! float literal optionally followed by a single case-sensitive suffix:
//! `k` = 1e3, `M` = 1e6, `m` = 1e-3, `u` = 1e-6, `n` = 1e-9, `p` = 1e-12.

use std::fmt;

/// Error from [`parse_si`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiParseError {
    token: String,
}

impl fmt::Display for SiParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid number '{}'", self.token)
    }
}

impl std::error::Error for SiParseError {}

fn suffix_scale(c: char) -> Option<f64> {
    match c {
        'k' => Some(1e3),
        'M' => Some(1e6),
        'm' => Some(1e-3),
        'u' => Some(1e-6),
        'n' => Some(1e-9),
        'p' => Some(1e-12),
        _ => None,
    }
}

/// Parse a number with an optional SI suffix (`2.2k` -> 2200.0).
pub fn parse_si(token: &str) -> Result<f64, SiParseError> {
    let token = token.trim();
    let err = || SiParseError {
        token: token.to_string(),
    };
    if token.is_empty() {
        return Err(err());
    }
    let (body, scale) = match token.chars().last().and_then(suffix_scale) {
        Some(scale) => (&token[..token.len() - 1], scale),
        None => (token, 1.0),
    };
    let value: f64 = body.parse().map_err(|_| err())?;
    if !value.is_finite() {
        return Err(err());
    }
    Ok(value * scale)
}

/// Format `x` with `digits` significant digits, plain decimal notation where
/// reasonable and exponent notation for extreme magnitudes.
///
/// Used for every numeric column the CLI emits so output files are
/// byte-reproducible.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude < -4 || magnitude >= digits as i32 {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // Rounding can bump the magnitude (9.9999 -> 10.000); one digit extra is harmless.
    s
}
