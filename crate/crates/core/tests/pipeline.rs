use radshock_core::baby::BabySystem;
use radshock_core::io::{read_json, read_profile, write_json, write_profile};
use radshock_core::pipeline::{run_baby, run_gas, PipelineOptions, Summary};
use radshock_core::{Error, ErrorClass, GasConstants, GasState, Method, Side};

#[test]
fn gas_profiles_pass_every_gate() {
    let cases = [
        (GasState::new(1.0, 0.0, 1.0).unwrap(), 5.0 / 3.0, 1e-3),
        (GasState::new(2.0, 1.0, 0.5).unwrap(), 1.4, 1e-4),
        (GasState::new(1.0, 0.0, 1.0).unwrap(), 1.4, 3e-3),
    ];
    for (left, g, a) in cases {
        let consts = GasConstants::with_gamma(g).unwrap();
        let run = run_gas(&left, &consts, a, &PipelineOptions::default()).unwrap();
        assert!(run.verification.passed(), "{g} {a}: {:?}", run.verification.failed_gates());
        assert!(run.profile.max_increment() < 0.0);
        let fields = run.profile.gas().unwrap();
        assert!(fields.theta.iter().all(|&t| t > 0.0));
    }
}

#[test]
fn baby_profiles_pass_every_gate() {
    for a in [0.1, 0.3, 0.6] {
        let run = run_baby(&BabySystem::centred(a).unwrap(), &PipelineOptions::default()).unwrap();
        assert!(run.verification.passed(), "{a}: {:?}", run.verification.failed_gates());
        assert!(run.profile.max_increment() < 0.0);
    }
}

#[test]
fn refusals_are_classified() {
    let left = GasState::new(1.0, 0.0, 1.0).unwrap();
    let opts = PipelineOptions::default();
    let err = run_gas(&left, &GasConstants::with_gamma(2.3).unwrap(), 1e-3, &opts).unwrap_err();
    assert!(matches!(err, Error::GammaOutOfRange { .. }));
    assert_eq!(err.class(), ErrorClass::Refusal);

    let err = run_gas(&left, &GasConstants::with_gamma(1.4).unwrap(), 0.5, &opts).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Refusal, "{err}");

    let err = run_gas(&left, &GasConstants::with_gamma(1.4).unwrap(), 1e-2, &opts).unwrap_err();
    assert!(matches!(err, Error::NoSmoothProfile { .. }));

    let err = run_baby(&BabySystem::centred(0.8).unwrap(), &opts).unwrap_err();
    assert!(matches!(err, Error::NoSmoothProfile { .. }));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let left = GasState::new(1.0, 0.0, 1.0).unwrap();
    let run = run_gas(&left, &GasConstants::with_gamma(1.4).unwrap(), 1e-3, &PipelineOptions::default()).unwrap();
    let summary = Summary::from_gas(&run);
    write_profile(dir.path().join("p.csv"), &run.profile).unwrap();
    write_json(dir.path().join("s.json"), &summary).unwrap();

    let back: Summary = read_json(dir.path().join("s.json")).unwrap();
    assert_eq!(back.f_coeffs, summary.f_coeffs);
    assert_eq!(back.equilibria, summary.equilibria);
    let p = read_profile(dir.path().join("p.csv"), Some(&back.profile_meta)).unwrap();
    assert_eq!(p.v_hat, run.profile.v_hat);
    assert_eq!(p.gas().unwrap().rho, run.profile.gas().unwrap().rho);
}

#[test]
fn gluing_check_fails_below_second_order_regularity() {
    // f(0) + 4 w0 < 0 here: the expansion only certifies the node ordering
    let left = GasState::new(2.0, 1.0, 0.5).unwrap();
    let err = run_gas(&left, &GasConstants::with_gamma(1.4).unwrap(), 5e-4, &PipelineOptions::default())
        .unwrap_err();
    assert!(matches!(err, Error::GluingFailed { .. }), "{err}");
    assert_eq!(err.class(), ErrorClass::Numerical);
}

fn with_method(m: Method) -> PipelineOptions {
    let mut o = PipelineOptions::default();
    o.manifold.method = m;
    o
}

#[test]
fn explicit_and_stiff_integrators_agree() {
    let left = GasState::new(1.0, 0.0, 1.0).unwrap();
    let consts = GasConstants::with_gamma(5.0 / 3.0).unwrap();
    let a = 1e-3;
    let ex = run_gas(&left, &consts, a, &with_method(Method::Explicit)).unwrap();
    let st = run_gas(&left, &consts, a, &with_method(Method::Stiff)).unwrap();
    assert!(st.verification.passed(), "{:?}", st.verification.failed_gates());
    assert_eq!(ex.profile.len(), st.profile.len());
    let dv = ex
        .profile
        .v_hat
        .iter()
        .zip(&st.profile.v_hat)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(dv < 1e-7 * a, "max |Δv̂| = {dv:e}");
}

#[test]
fn stiff_saddles_switch_integrator() {
    // (f0 / a)^2 is about 7e4 here
    let left = GasState::new(1.0, 0.0, 1.0).unwrap();
    let consts = GasConstants::with_gamma(1.8).unwrap();
    let run = run_gas(&left, &consts, 1e-3, &PipelineOptions::default()).unwrap();
    let ratio = radshock_core::manifold::stiffness_ratio(&run.equilibria, Side::Flat);
    assert!(ratio > PipelineOptions::default().manifold.stiffness_switch, "{ratio}");
    assert!(run.verification.passed(), "{:?}", run.verification.failed_gates());
}

#[test]
fn baby_first_integral_converges_under_refinement() {
    let baby = BabySystem::centred(0.5).unwrap();
    let coarse = PipelineOptions::default();
    let fine = coarse.refined();
    let e1 = run_baby(&baby, &coarse).unwrap().verification.baby_energy.unwrap();
    let e2 = run_baby(&baby, &fine).unwrap().verification.baby_energy.unwrap();
    assert!(e2 < 1e-8 && e1 / e2 >= 4.0, "{e1:e} -> {e2:e}");
}
