//! Property-based invariants across the library modules.

use num_complex::Complex64;
use proptest::prelude::*;

use rectenna_core::chain::{efficiency, is_unimodal};
use rectenna_core::combiner::{combine, design_wilkinson, sparams};
use rectenna_core::matching::{delivered_power_fraction, matching_resistor};
use rectenna_core::rectifier::analytic_output;
use rectenna_core::rf_link::{
    dbm_to_watts, friis_received_power, mismatch_fraction, watts_to_dbm,
};

proptest! {
    #[test]
    fn dbm_round_trips(p in -100.0f64..60.0) {
        let back = watts_to_dbm(dbm_to_watts(p));
        prop_assert!((back - p).abs() <= 1e-12 * p.abs().max(1.0));
    }

    #[test]
    fn friis_scales_linearly_in_transmit_power(
        p in 1e-6f64..100.0,
        scale in 0.01f64..100.0,
        f in 1e8f64..1e10,
        d in 0.1f64..1e3,
    ) {
        let base = friis_received_power(p, 3.0, 2.0, f, d);
        let scaled = friis_received_power(p * scale, 3.0, 2.0, f, d);
        prop_assert!(((scaled / base) - scale).abs() <= 1e-9 * scale);
    }

    #[test]
    fn mismatch_fraction_monotone_and_bounded(
        a in -80.0f64..0.0,
        b in -80.0f64..0.0,
    ) {
        let fa = mismatch_fraction(a).unwrap();
        let fb = mismatch_fraction(b).unwrap();
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert!((0.0..=1.0).contains(&fb));
        // Deeper return loss (more negative) keeps more power.
        if a < b {
            prop_assert!(fa >= fb);
        }
    }

    #[test]
    fn analytic_output_monotone_in_load_and_homogeneous(
        n in 1usize..10,
        v0 in 0.001f64..10.0,
        r0 in 0.0f64..1e3,
        r_small in 1.0f64..1e5,
        factor in 1.0f64..100.0,
        scale in 0.1f64..50.0,
    ) {
        let r_large = r_small * factor;
        let lo = analytic_output(n, v0, r0, r_small);
        let hi = analytic_output(n, v0, r0, r_large);
        prop_assert!(hi >= lo - 1e-15);
        let scaled = analytic_output(n, v0 * scale, r0, r_small);
        prop_assert!(((scaled / lo) - scale).abs() <= 1e-9 * scale);
    }

    #[test]
    fn wilkinson_closure_forms(
        n in 2usize..8,
        r_s in 1.0f64..500.0,
        r_l in 1.0f64..500.0,
    ) {
        let d = design_wilkinson(n, r_s, r_l, 1e9).unwrap();
        prop_assert_eq!(d.quarter_wave_impedance, (n as f64 * r_l * r_s).sqrt());
        prop_assert_eq!(d.isolation_resistor, r_l);
    }

    #[test]
    fn smatrix_reciprocal_and_passive_across_band(rel_f in 0.1f64..3.0) {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        let s = sparams(&d, rel_f * 1e9).unwrap();
        prop_assert!(s.reciprocity_defect() <= 1e-12);
        prop_assert!(s.is_passive(1e-9));
    }

    #[test]
    fn combine_conserves_power(
        re2 in -1.0f64..1.0, im2 in -1.0f64..1.0,
        re3 in -1.0f64..1.0, im3 in -1.0f64..1.0,
        rel_f in 0.1f64..3.0,
    ) {
        let d = design_wilkinson(2, 50.0, 50.0, 1e9).unwrap();
        let inputs = [Complex64::new(re2, im2), Complex64::new(re3, im3)];
        let r = combine(&inputs, &d, rel_f * 1e9).unwrap();
        let balance = r.input_power - r.output_power - r.reflected_power
            - r.dissipated_in_isolation;
        prop_assert!(balance.abs() <= 1e-9 * r.input_power.max(1e-12));
        prop_assert!(r.dissipated_in_isolation >= -1e-12);
    }

    #[test]
    fn delivered_fraction_bounded_for_passive_impedances(
        rs in 0.1f64..1e4, xs in -1e4f64..1e4,
        rl in 0.1f64..1e4, xl in -1e4f64..1e4,
    ) {
        let f = delivered_power_fraction(
            Complex64::new(rs, xs),
            Complex64::new(rl, xl),
        );
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn resistive_match_composes_to_unity(r in 0.1f64..1e6) {
        let z = Complex64::new(r, 0.0);
        let chosen = matching_resistor(z).unwrap();
        let f = delivered_power_fraction(Complex64::new(chosen, 0.0), z);
        prop_assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn efficiency_is_linear_in_vdc(v_dc in 0.0f64..100.0, v_in in 0.01f64..100.0) {
        let base = efficiency(v_dc, v_in).unwrap();
        let doubled = efficiency(2.0 * v_dc, v_in).unwrap();
        prop_assert!((doubled - 2.0 * base).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn unimodality_accepts_tent_shapes(peak in 1usize..18, len in 2usize..20) {
        let len = len.max(peak + 1);
        let values: Vec<f64> = (0..len)
            .map(|i| {
                let d = (i as f64 - peak as f64).abs();
                10.0 - d
            })
            .collect();
        prop_assert!(is_unimodal(&values, 1e-9));
    }
}
