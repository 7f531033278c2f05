//! Property tests for the projection algebra on randomized fields.

mod common;

use common::{l2_sq, max_coeff_diff, random_scalar, random_velocity};
use projections::{
    baroclinic, barotropic, p_minus, p_minus_complex, p_plus, p_plus_complex, vertical_integral_div,
    ComplexVelocity,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn energy_pythagoras(seed in 0u64..1_000_000) {
        let n = 6;
        let v = random_velocity(n, seed);
        let vbar = barotropic(&v);
        let tilde = baroclinic(&v);
        let total = l2_sq(&v.comp1) + l2_sq(&v.comp2);
        let bar: f64 = vbar.c1.coeffs().iter().chain(vbar.c2.coeffs()).map(|c| c.norm_sqr()).sum();
        let til = l2_sq(&tilde.c1) + l2_sq(&tilde.c2);
        prop_assert!((total - bar - til).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn oscillation_energy_halves(seed in 0u64..1_000_000) {
        let n = 6;
        let v = random_velocity(n, seed);
        let tilde = baroclinic(&v);
        let til = l2_sq(&tilde.c1) + l2_sq(&tilde.c2);
        let up = p_plus(&v);
        let e_up = l2_sq(&up.c1) + l2_sq(&up.c2);
        prop_assert!((e_up - 0.5 * til).abs() <= 1e-12 * til.max(1.0));
    }

    #[test]
    fn projectors_are_idempotent_and_orthogonal(seed in 0u64..1_000_000) {
        let n = 6;
        let f = ComplexVelocity {
            c1: random_scalar(n, seed, 0.3),
            c2: random_scalar(n, seed.wrapping_add(7), 0.3),
        };
        let scale = f.max_abs().max(1.0);
        let pp = p_plus_complex(&f);
        let again = p_plus_complex(&pp);
        prop_assert!(max_coeff_diff(&pp.c1, &again.c1) <= 1e-12 * scale);
        prop_assert!(max_coeff_diff(&pp.c2, &again.c2) <= 1e-12 * scale);
        let cross = p_minus_complex(&pp);
        prop_assert!(cross.max_abs() <= 1e-12 * scale);
        let pm = p_minus_complex(&f);
        let cross2 = p_plus_complex(&pm);
        prop_assert!(cross2.max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn oscillation_parts_sum_back(seed in 0u64..1_000_000) {
        let n = 6;
        let v = random_velocity(n, seed);
        let tilde = baroclinic(&v);
        let up = p_plus(&v);
        let um = p_minus(&v);
        let mut s1 = up.c1.clone();
        s1.axpy(1.0, &um.c1);
        let mut s2 = up.c2.clone();
        s2.axpy(1.0, &um.c2);
        prop_assert!(max_coeff_diff(&s1, &tilde.c1) <= 1e-13);
        prop_assert!(max_coeff_diff(&s2, &tilde.c2) <= 1e-13);
    }

    #[test]
    fn integral_column_sums_vanish(seed in 0u64..1_000_000) {
        // The value at z = 0 is zero, so every horizontal coefficient column
        // of the integral sums to zero.
        let n = 6;
        let tilde = baroclinic(&random_velocity(n, seed));
        let integral = vertical_integral_div(&tilde).unwrap();
        let coeffs = integral.coeffs();
        for i1 in 0..n {
            for i2 in 0..n {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for i3 in 0..n {
                    acc += coeffs[(i1 * n + i2) * n + i3];
                }
                prop_assert!(acc.norm() <= 1e-12 * integral.max_abs().max(1.0));
            }
        }
    }
}
