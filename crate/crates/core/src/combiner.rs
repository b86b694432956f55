//! Wilkinson power combiner design and evaluation.
//!
//! Designs follow the star-resistor N-way form: quarter-wave sections of
//! impedance `sqrt(N * R_L * R_S)` from each output port to the common
//! junction, and one isolation resistor of value `R_L` from each output
//! port to a shared floating star point. For N = 2 the star is equivalent
//! to the familiar single resistor of `2 * R_L` between the split ports.
//!
//! Network evaluation (S-parameters, combining) is implemented for the
//! 2-way building block via even/odd-mode decomposition of ideal lossless
//! lines; larger arrays cascade 2-way blocks in a binary tree.

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::rf_link::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq)]
pub enum CombinerError {
    InvalidArgument { message: String },
    /// S-parameter evaluation only supports the 2-way building block.
    UnsupportedPorts { n_ways: usize },
    InputLengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for CombinerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidArgument { message } => write!(f, "{message}"),
            Self::UnsupportedPorts { n_ways } => write!(
                f,
                "network evaluation supports 2-way combiners only, got {n_ways}-way"
            ),
            Self::InputLengthMismatch { expected, got } => {
                write!(f, "expected {expected} input phasors, got {got}")
            }
        }
    }
}

impl std::error::Error for CombinerError {}

/// N-way Wilkinson combiner record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilkinsonDesign {
    pub n_ways: usize,
    /// Common-port impedance R_S, ohms.
    pub source_impedance: f64,
    /// Per-output-port impedance R_L, ohms.
    pub load_impedance: f64,
    /// Quarter-wave section impedance `sqrt(N * R_L * R_S)`, ohms.
    pub quarter_wave_impedance: f64,
    /// Star-leg isolation resistor, equal to R_L, ohms.
    pub isolation_resistor: f64,
    /// Design center frequency f0, hertz.
    pub center_frequency: f64,
}

/// Design an N-way Wilkinson combiner.
pub fn design_wilkinson(
    n_ways: usize,
    r_s: f64,
    r_l: f64,
    f0: f64,
) -> Result<WilkinsonDesign, CombinerError> {
    if n_ways < 2 {
        return Err(CombinerError::InvalidArgument {
            message: format!("n_ways must be at least 2, got {n_ways}"),
        });
    }
    for (name, v) in [("source impedance", r_s), ("load impedance", r_l), ("f0", f0)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CombinerError::InvalidArgument {
                message: format!("{name} must be positive, got {v}"),
            });
        }
    }
    Ok(WilkinsonDesign {
        n_ways,
        source_impedance: r_s,
        load_impedance: r_l,
        quarter_wave_impedance: (n_ways as f64 * r_l * r_s).sqrt(),
        isolation_resistor: r_l,
        center_frequency: f0,
    })
}

/// Scattering matrix of a combiner at one frequency. Port 1 is the common
/// port (reference R_S); the remaining ports are the splits (reference R_L).
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    pub frequency: f64,
    ports: usize,
    entries: Vec<Complex64>,
}

impl SMatrix {
    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.ports + col]
    }

    /// Largest `|S[i][j] - S[j][i]|`; zero for a reciprocal network.
    pub fn reciprocity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.ports {
            for j in 0..self.ports {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// Most negative eigenvalue of `I - S^H S`, clamped at zero from above.
    /// A passive network keeps this >= 0 up to rounding.
    pub fn passivity_defect(&self) -> f64 {
        let n = self.ports;
        // m = I - S^H S, Hermitian.
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let identity = if i == j { 1.0 } else { 0.0 };
                m[i * n + j] = Complex64::new(identity, 0.0) - acc;
            }
        }
        let min = hermitian_min_eigenvalue(&mut m, n);
        min.min(0.0)
    }

    pub fn is_passive(&self, tol: f64) -> bool {
        self.passivity_defect() >= -tol
    }
}

/// Smallest eigenvalue of an n-by-n Hermitian matrix via cyclic Jacobi
/// rotations. Destroys `m`.
fn hermitian_min_eigenvalue(m: &mut [Complex64], n: usize) -> f64 {
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[idx(p, q)].norm());
            }
        }
        if off < 1e-15 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[idx(p, q)];
                let g_mag = g.norm();
                if g_mag < 1e-300 {
                    continue;
                }
                let phase = g / g_mag;
                let app = m[idx(p, p)].re;
                let aqq = m[idx(q, q)].re;
                let tau = (aqq - app) / (2.0 * g_mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[idx(k, p)];
                    let akq = m[idx(k, q)];
                    m[idx(k, p)] = c * akp - s * phase.conj() * akq;
                    m[idx(k, q)] = s * phase * akp + c * akq;
                    m[idx(p, k)] = m[idx(k, p)].conj();
                    m[idx(q, k)] = m[idx(k, q)].conj();
                }
                let new_pp = c * c * app - 2.0 * c * s * g_mag + s * s * aqq;
                let new_qq = s * s * app + 2.0 * c * s * g_mag + c * c * aqq;
                m[idx(p, p)] = Complex64::new(new_pp, 0.0);
                m[idx(q, q)] = Complex64::new(new_qq, 0.0);
                m[idx(p, q)] = Complex64::new(0.0, 0.0);
                m[idx(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    (0..n).map(|i| m[idx(i, i)].re).fold(f64::INFINITY, f64::min)
}

/// Ideal-line S-parameters of a 2-way design at frequency `f`.
///
/// Even/odd-mode decomposition with lossless lines of electrical length
/// `90 degrees * (f / f0)`. All trigonometry stays in sine/cosine form so
/// half-wave and quarter-wave points are regular.
pub fn sparams(design: &WilkinsonDesign, f: f64) -> Result<SMatrix, CombinerError> {
    if design.n_ways != 2 {
        return Err(CombinerError::UnsupportedPorts {
            n_ways: design.n_ways,
        });
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(CombinerError::InvalidArgument {
            message: format!("frequency must be positive, got {f}"),
        });
    }
    let theta = std::f64::consts::FRAC_PI_2 * (f / design.center_frequency);
    let (s, c) = theta.sin_cos();
    let zq = design.quarter_wave_impedance;
    let rs = design.source_impedance;
    let rl = design.load_impedance;
    let r_iso = design.isolation_resistor;
    let j = Complex64::i();

    // Even mode at a split port: line terminated by 2*R_S.
    let z_even = zq * (2.0 * rs * c + j * (zq * s)) / (zq * c + j * (2.0 * rs * s));
    let gamma_even = (z_even - rl) / (z_even + rl);

    // Odd mode: line shorted at the common node, star resistor leg to the
    // virtual-ground star point, in parallel.
    let z_odd = (j * (zq * s) * r_iso) / (j * (zq * s) + r_iso * c);
    let gamma_odd = (z_odd - rl) / (z_odd + rl);

    // Common port: two line branches in parallel, each terminated R_L.
    let z_branch = zq * (rl * c + j * (zq * s)) / (zq * c + j * (rl * s));
    let z_common = 0.5 * z_branch;
    let s11 = (z_common - rs) / (z_common + rs);

    // Transmission split port -> common port from the even half-circuit.
    let d_even = Complex64::new(c * (1.0 + rl / (2.0 * rs)), s * (zq / (2.0 * rs) + rl / zq));
    let s21 = Complex64::new((rl / rs).sqrt(), 0.0) / d_even;

    let s22 = 0.5 * (gamma_even + gamma_odd);
    let s23 = 0.5 * (gamma_even - gamma_odd);

    let entries = vec![
        s11, s21, s21, //
        s21, s22, s23, //
        s21, s23, s22,
    ];
    Ok(SMatrix {
        frequency: f,
        ports: 3,
        entries,
    })
}

/// Result of coherently combining split-port inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombineResult {
    /// Voltage phasor (RMS convention) incident on the common-port load.
    pub output: Complex64,
    pub output_power: f64,
    /// Power burned in the isolation star, computed from the resistor
    /// voltages rather than wave bookkeeping.
    pub dissipated_in_isolation: f64,
    /// Power re-emitted from the split ports.
    pub reflected_power: f64,
    pub input_power: f64,
}

/// Superpose split-port inputs through the S-matrix at `f`.
///
/// `inputs` are incident RMS voltage phasors at the split ports (reference
/// R_L), so each carries power `|v|^2 / R_L`. The common port is assumed
/// terminated in its reference R_S.
pub fn combine(
    inputs: &[Complex64],
    design: &WilkinsonDesign,
    f: f64,
) -> Result<CombineResult, CombinerError> {
    if inputs.len() != design.n_ways {
        return Err(CombinerError::InputLengthMismatch {
            expected: design.n_ways,
            got: inputs.len(),
        });
    }
    let s = sparams(design, f)?;
    let rl_sqrt = design.load_impedance.sqrt();
    let rs_sqrt = design.source_impedance.sqrt();
    // Normalized incident waves; |a|^2 is power.
    let a2 = inputs[0] / rl_sqrt;
    let a3 = inputs[1] / rl_sqrt;
    let b1 = s.get(0, 1) * a2 + s.get(0, 2) * a3;
    let b2 = s.get(1, 1) * a2 + s.get(1, 2) * a3;
    let b3 = s.get(2, 1) * a2 + s.get(2, 2) * a3;

    let input_power = a2.norm_sqr() + a3.norm_sqr();
    let output_power = b1.norm_sqr();
    let reflected_power = b2.norm_sqr() + b3.norm_sqr();

    // Total split-port voltages give the physical star dissipation:
    // the two R legs in series put |V2 - V3|^2 / (2R) into the star.
    let v2 = (a2 + b2) * rl_sqrt;
    let v3 = (a3 + b3) * rl_sqrt;
    let dissipated = (v2 - v3).norm_sqr() / (2.0 * design.isolation_resistor);

    Ok(CombineResult {
        output: b1 * rs_sqrt,
        output_power,
        dissipated_in_isolation: dissipated,
        reflected_power,
        input_power,
    })
}

// --- Microstrip realization of the quarter-wave sections ---

/// Physical microstrip line for a target impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrostripLine {
    pub width: f64,
    pub effective_eps: f64,
    pub quarter_wave_length: f64,
}

/// Hammerstad effective permittivity for ratio `u = w/h`.
fn microstrip_effective_eps(u: f64, eps_r: f64) -> f64 {
    let base = (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / (1.0 + 12.0 / u).sqrt();
    if u < 1.0 {
        base + (eps_r - 1.0) / 2.0 * 0.04 * (1.0 - u) * (1.0 - u)
    } else {
        base
    }
}

/// Hammerstad characteristic-impedance analysis for ratio `u = w/h`.
pub fn microstrip_analysis(u: f64, eps_r: f64) -> f64 {
    let eps_eff = microstrip_effective_eps(u, eps_r);
    if u <= 1.0 {
        60.0 / eps_eff.sqrt() * (8.0 / u + u / 4.0).ln()
    } else {
        120.0 * std::f64::consts::PI
            / (eps_eff.sqrt() * (u + 1.393 + 0.667 * (u + 1.444).ln()))
    }
}

/// Wheeler/Hammerstad closed-form synthesis seed for `w/h`.
fn microstrip_synthesis_seed(z0: f64, eps_r: f64) -> f64 {
    let a = z0 / 60.0 * ((eps_r + 1.0) / 2.0).sqrt()
        + (eps_r - 1.0) / (eps_r + 1.0) * (0.23 + 0.11 / eps_r);
    let narrow = 8.0 * a.exp() / ((2.0 * a).exp() - 2.0);
    if narrow < 2.0 {
        narrow
    } else {
        let b = 377.0 * std::f64::consts::PI / (2.0 * z0 * eps_r.sqrt());
        2.0 / std::f64::consts::PI
            * (b - 1.0 - (2.0 * b - 1.0).ln()
                + (eps_r - 1.0) / (2.0 * eps_r) * ((b - 1.0).ln() + 0.39 - 0.61 / eps_r))
    }
}

/// Synthesize a microstrip line: width for `z0` on the given substrate and
/// the quarter-wave physical length at `f0`.
///
/// The Wheeler/Hammerstad closed form seeds a bisection against the
/// analysis equations, so re-analysis of the returned width reproduces `z0`
/// essentially exactly.
pub fn microstrip_synthesis(
    z0: f64,
    eps_r: f64,
    substrate_height: f64,
    f0: f64,
) -> Result<MicrostripLine, CombinerError> {
    if !(10.0..=200.0).contains(&z0) {
        return Err(CombinerError::InvalidArgument {
            message: format!("z0 must be within [10, 200] ohm, got {z0}"),
        });
    }
    if !(eps_r >= 1.0 && eps_r.is_finite()) {
        return Err(CombinerError::InvalidArgument {
            message: format!("eps_r must be >= 1, got {eps_r}"),
        });
    }
    if !(substrate_height > 0.0 && substrate_height.is_finite()) {
        return Err(CombinerError::InvalidArgument {
            message: format!("substrate height must be positive, got {substrate_height}"),
        });
    }
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(CombinerError::InvalidArgument {
            message: format!("f0 must be positive, got {f0}"),
        });
    }

    // z0 is strictly decreasing in u; bracket around the closed-form seed.
    let seed = microstrip_synthesis_seed(z0, eps_r).clamp(1e-4, 50.0);
    let (mut lo, mut hi) = (1e-4f64, 60.0f64);
    // Tighten the bracket from the seed when it already straddles.
    if microstrip_analysis(seed, eps_r) > z0 {
        lo = seed;
    } else {
        hi = seed;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if microstrip_analysis(mid, eps_r) > z0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    let effective_eps = microstrip_effective_eps(u, eps_r);
    Ok(MicrostripLine {
        width: u * substrate_height,
        effective_eps,
        quarter_wave_length: SPEED_OF_LIGHT / (4.0 * f0 * effective_eps.sqrt()),
    })
}

/// Export S-matrices as Touchstone-style text: `!` comments, an option line
/// declaring Hz and real/imaginary pairs, one frequency per data line in
/// row-major port order.
pub fn write_touchstone(matrices: &[SMatrix], reference_ohms: f64, comments: &[&str]) -> String {
    let mut out = String::new();
    for comment in comments {
        let _ = writeln!(out, "! {comment}");
    }
    let _ = writeln!(out, "# HZ S RI R {reference_ohms}");
    for m in matrices {
        let _ = write!(out, "{:.6e}", m.frequency);
        for row in 0..m.ports() {
            for col in 0..m.ports() {
                let v = m.get(row, col);
                let _ = write!(out, " {:.9e} {:.9e}", v.re, v.im);
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn design_examples() {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        assert!((d.quarter_wave_impedance - 5000f64.sqrt()).abs() < 1e-9);
        assert_eq!(d.isolation_resistor, 50.0);

        let d = design_wilkinson(4, 50.0, 50.0, 1e9).unwrap();
        assert!((d.quarter_wave_impedance - 100.0).abs() < 1e-9);
        assert_eq!(d.isolation_resistor, 50.0);

        let d = design_wilkinson(2, 50.0, 100.0, 1e9).unwrap();
        assert!((d.quarter_wave_impedance - 100.0).abs() < 1e-9);
        assert_eq!(d.isolation_resistor, 100.0);

        assert!(design_wilkinson(1, 50.0, 50.0, 1e9).is_err());
        assert!(design_wilkinson(2, -1.0, 50.0, 1e9).is_err());
        assert!(design_wilkinson(2, 50.0, 50.0, 0.0).is_err());
    }

    #[test]
    fn closure_is_bit_exact() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let n = 2 + (next() * 6.0) as usize;
            let rs = 1.0 + next() * 200.0;
            let rl = 1.0 + next() * 200.0;
            let d = design_wilkinson(n, rs, rl, 1e9).unwrap();
            assert_eq!(d.quarter_wave_impedance, (n as f64 * rl * rs).sqrt());
            assert_eq!(d.isolation_resistor, rl);
        }
    }

    #[test]
    fn center_frequency_behavior() {
        let d = design_wilkinson(2, 50.0, 50.0, 2.45e9).unwrap();
        let s = sparams(&d, 2.45e9).unwrap();
        let split = 1.0 / 2f64.sqrt();
        assert!((s.get(0, 1).norm() - split).abs() < 1e-6);
        assert!((s.get(0, 2).norm() - split).abs() < 1e-6);
        assert!(s.get(0, 0).norm() < 1e-6);
        assert!(s.get(1, 2).norm() < 1e-6);
        assert!(s.get(1, 1).norm() < 1e-6);
    }

    #[test]
    fn reciprocity_and_passivity_off_center() {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        for k in 1..=40 {
            let f = 0.1e9 * k as f64;
            let s = sparams(&d, f).unwrap();
            assert!(s.reciprocity_defect() < 1e-12, "f={f}");
            assert!(s.is_passive(1e-9), "f={f}: defect {}", s.passivity_defect());
        }
    }

    #[test]
    fn unsupported_port_count() {
        let d = design_wilkinson(4, 50.0, 50.0, 1e9).unwrap();
        assert!(matches!(
            sparams(&d, 1e9),
            Err(CombinerError::UnsupportedPorts { n_ways: 4 })
        ));
    }

    #[test]
    fn combine_rejects_wrong_input_count() {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        let v = Complex64::new(1.0, 0.0);
        assert!(matches!(
            combine(&[v], &d, 1e9),
            Err(CombinerError::InputLengthMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn combine_cases_at_center() {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let r = combine(&[zero, zero], &d, 1e9).unwrap();
        assert_eq!(r.output, zero);
        assert_eq!(r.dissipated_in_isolation, 0.0);

        // Equal in-phase inputs: lossless combining.
        let v = Complex64::new(1.0, 0.0);
        let r = combine(&[v, v], &d, 1e9).unwrap();
        assert!(((r.output_power - r.input_power) / r.input_power).abs() < 1e-9);
        assert!(r.dissipated_in_isolation < 1e-12);
        assert!(r.reflected_power < 1e-12);

        // One driven port: half out, half in the isolation star.
        let r = combine(&[v, zero], &d, 1e9).unwrap();
        assert!((r.output_power / r.input_power - 0.5).abs() < 1e-9);
        assert!(
            ((r.dissipated_in_isolation + r.reflected_power) / r.input_power - 0.5).abs() < 1e-9
        );
    }

    #[test]
    fn energy_conserved_off_center() {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        let inputs = [Complex64::new(0.8, 0.3), Complex64::new(-0.2, 0.5)];
        for k in 1..=30 {
            let f = 0.1e9 * k as f64;
            let r = combine(&inputs, &d, f).unwrap();
            let balance =
                r.input_power - r.output_power - r.reflected_power - r.dissipated_in_isolation;
            assert!(
                balance.abs() <= 1e-9 * r.input_power,
                "f={f}: imbalance {balance:e}"
            );
        }
    }

    #[test]
    fn microstrip_reference_values() {
        // 50 ohm on FR-4 (eps_r 4.4, h 1.6 mm): published calculators give
        // width near 3.06 mm.
        let line = microstrip_synthesis(50.0, 4.4, 1.6e-3, 1e9).unwrap();
        assert!(
            (line.width - 3.06e-3).abs() / 3.06e-3 < 0.05,
            "width {}",
            line.width
        );
        // Round trip.
        let z_back = microstrip_analysis(line.width / 1.6e-3, 4.4);
        assert!((z_back - 50.0).abs() / 50.0 < 0.01);

        // Air line: eps_eff exactly 1, quarter wave = c/(4 f0).
        let air = microstrip_synthesis(50.0, 1.0, 1e-3, 1e9).unwrap();
        assert_eq!(air.effective_eps, 1.0);
        assert!((air.quarter_wave_length - SPEED_OF_LIGHT / 4e9).abs() < 1e-12);

        // Higher impedance is narrower.
        let hi = microstrip_synthesis(70.7107, 4.4, 1.6e-3, 1e9).unwrap();
        assert!(hi.width < line.width);

        assert!(microstrip_synthesis(5.0, 4.4, 1.6e-3, 1e9).is_err());
        assert!(microstrip_synthesis(250.0, 4.4, 1.6e-3, 1e9).is_err());
    }

    #[test]
    fn round_trip_across_impedance_range() {
        for k in 0..=18 {
            let z0 = 30.0 + 5.0 * k as f64;
            for eps_r in [1.0, 2.2, 4.4, 9.8] {
                let line = microstrip_synthesis(z0, eps_r, 1.6e-3, 1e9).unwrap();
                let back = microstrip_analysis(line.width / 1.6e-3, eps_r);
                assert!(
                    (back - z0).abs() / z0 < 0.01,
                    "z0={z0} eps_r={eps_r}: back={back}"
                );
            }
        }
    }

    #[test]
    fn touchstone_layout() {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        let matrices = vec![sparams(&d, 0.5e9).unwrap(), sparams(&d, 1e9).unwrap()];
        let text = write_touchstone(&matrices, 50.0, &["two-way wilkinson"]);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("! "));
        assert_eq!(lines.next().unwrap(), "# HZ S RI R 50");
        let data: Vec<&str> = lines.collect();
        assert_eq!(data.len(), 2);
        // 1 frequency + 9 complex entries = 19 columns.
        assert_eq!(data[0].split_whitespace().count(), 19);
    }

    #[test]
    fn jacobi_eigenvalues_match_known_case() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let mut m = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        let min = hermitian_min_eigenvalue(&mut m, 2);
        assert!((min - 1.0).abs() < 1e-12);
    }
}
