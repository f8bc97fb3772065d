use proptest::prelude::*;
use radshock_core::baby::baby_reduced;
use radshock_core::gas::{lax_check, shock3_from_amplitude, shock_from_amplitude, ShockFamily};
use radshock_core::reduced::{build_reduced, equilibria, gas_f_direct, gas_f_polynomial};
use radshock_core::{GasConstants, GasState};

fn gamma() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.2), Just(1.4), Just(5.0 / 3.0), Just(2.0), 1.05f64..2.2]
}

fn state() -> impl Strategy<Value = GasState> {
    (0.1f64..10.0, -5.0f64..5.0, 0.1f64..10.0).prop_map(|(r, u, e)| GasState::new(r, u, e).unwrap())
}

proptest! {
    #[test]
    fn jump_identities_hold(left in state(), g in gamma(), la in -4.0f64..-2.0) {
        let a = 10f64.powf(la);
        let consts = GasConstants::with_gamma(g).unwrap();
        let s = shock_from_amplitude(&left, &consts, a).unwrap();
        for r in s.rh_residuals() {
            prop_assert!(r <= 1e-12, "{r:e}");
        }
        prop_assert!(lax_check(&s).admissible);
        prop_assert!(s.right.rho > s.left.rho);
        prop_assert!(0.0 < s.v_plus && s.v_plus < s.v_minus);
        prop_assert!(((s.v_minus - s.v_plus) / (2.0 * a) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn reflection_is_an_involution(left in state(), g in gamma(), la in -4.0f64..-2.0) {
        let consts = GasConstants::with_gamma(g).unwrap();
        let s = shock_from_amplitude(&left, &consts, 10f64.powf(la)).unwrap();
        let back = s.reflected().reflected();
        prop_assert_eq!(back.family, ShockFamily::One);
        for (x, y) in [(back.sigma, s.sigma), (back.j, s.j), (back.c1, s.c1), (back.left.rho, s.left.rho)] {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn three_shock_is_admissible(right in state(), g in gamma(), la in -4.0f64..-2.0) {
        let consts = GasConstants::with_gamma(g).unwrap();
        let s = shock3_from_amplitude(&right, &consts, 10f64.powf(la)).unwrap();
        prop_assert_eq!(s.family, ShockFamily::Three);
        prop_assert!(lax_check(&s).admissible);
        for r in s.rh_residuals() {
            prop_assert!(r <= 1e-12);
        }
    }

    #[test]
    fn expanded_f_matches_product_form(left in state(), g in gamma(), la in -4.0f64..-2.0, t in -1.0f64..1.0) {
        let consts = GasConstants::with_gamma(g).unwrap();
        let s = shock_from_amplitude(&left, &consts, 10f64.powf(la)).unwrap();
        let f = gas_f_polynomial(g, 1.0, s.j, s.c1);
        let v = t * s.a;
        let direct = gas_f_direct(g, 1.0, s.j, s.c1, v);
        prop_assert!((f.eval(v) - direct).abs() <= 1e-11 * direct.abs());
        match build_reduced(&s) {
            Ok(sys) => prop_assert!(sys.discriminant() > 0.0 && sys.f0() == f.eval(0.0)),
            Err(e) => prop_assert!(f.eval(0.0).powi(2) <= 2.0 * s.a * s.a, "{e}"),
        }
    }

    #[test]
    fn baby_equilibria(a in 0.01f64..0.65) {
        let sys = baby_reduced(a).unwrap();
        let eq = equilibria(&sys).unwrap();
        // node value solves w^2 + w + a^2/2 = 0
        prop_assert!((eq.w0 * eq.w0 + eq.w0 + 0.5 * a * a).abs() <= 1e-15);
        prop_assert!(eq.lambda2 < eq.lambda1 && eq.lambda1 < 0.0);
        prop_assert!((eq.mu1 * eq.mu2 + a * a).abs() <= 1e-14);
        prop_assert!(eq.mu2 > 0.0 && eq.mu1 < 0.0);
        prop_assert!(eq.f_prime0 == 0.0 && eq.tangency_slope() == 0.0);
    }
}

#[test]
fn baby_beyond_discriminant_is_refused() {
    for a in [0.71, 0.8, 2.0] {
        assert!(baby_reduced(a).is_err());
    }
}
