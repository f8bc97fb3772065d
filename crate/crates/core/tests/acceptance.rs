//! Acceptance checks. Every criterion prints one `PASS` or `FAIL` line; the
//! binary exits non-zero if any criterion fails.

use rand::{rngs::StdRng, Rng, SeedableRng};
use radshock_core::baby::{baby_reduced, BabySystem};
use radshock_core::error::ErrorClass;
use radshock_core::gas::{shock_from_amplitude, ShockData};
use radshock_core::pipeline::{run_baby, run_gas, GasRun, PipelineOptions};
use radshock_core::reduced::{build_reduced, ReducedSystem};
use radshock_core::verify::{
    expansion_coeffs, integral_residual, n_residual_order, ode_residual,
    q_cross_check, regularity_order,
};
use radshock_core::{GasConstants, GasState};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn desk_left() -> GasState {
    GasState::new(1.0, 0.0, 1.0).unwrap()
}

fn desk_run(opts: &PipelineOptions) -> GasRun {
    run_gas(&desk_left(), &GasConstants::with_gamma(1.4).unwrap(), 1e-3, opts).unwrap()
}

// ---- independent oracles ----------------------------------------------

fn sound_speed(gamma: f64, e: f64) -> f64 {
    (gamma * (gamma - 1.0) * e).sqrt()
}

/// `[j, j C1, j C2]` from one state and the shock speed, straight from the
/// conservation laws.
fn fluxes(s: &GasState, sigma: f64, gamma: f64) -> [f64; 3] {
    let v = s.u - sigma;
    let p = (gamma - 1.0) * s.rho * s.e;
    let m = s.rho * v;
    [m, m * v + p, m * (s.e + 0.5 * v * v) + p * v]
}

/// `W1(V)` from the quadratic formula.
fn w1_oracle(sys: &ReducedSystem, v: f64) -> f64 {
    let f = sys.f(v);
    let a = sys.a;
    let d = f * f + 2.0 * (v * v - a * a);
    (v * v - a * a) / (f + d.sqrt())
}

/// `W1(V) - w0` without cancellation.
fn w1_minus_w0_oracle(sys: &ReducedSystem, w0: f64, v: f64) -> f64 {
    let w1 = w1_oracle(sys, v);
    let f0 = sys.f(0.0);
    (0.5 * v * v - (sys.f(v) - f0) * w1) / (w1 + w0 + f0)
}

fn w0_oracle(f0: f64, a: f64) -> f64 {
    (-f0 + (f0 * f0 - 2.0 * a * a).sqrt()) / 2.0
}

/// `f'(0)` and `f''(0)/2` by central differences of `f`.
fn f_taylor_oracle(sys: &ReducedSystem) -> (f64, f64) {
    let h = 1e-4 * sys.a.max(1e-3);
    let (fp, f0, fm) = (sys.f(h), sys.f(0.0), sys.f(-h));
    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (2.0 * h * h))
}

/// First two coefficients of `W = w0 + w1 V + w2 V^2 + ...` obtained by
/// matching powers of `V` in `V W dW/dV = -W^2 - f W + (V^2 - a^2)/2`.
fn series_oracle(sys: &ReducedSystem) -> (f64, f64, f64) {
    let f0 = sys.f(0.0);
    let (f1, f2) = f_taylor_oracle(sys);
    let w0 = w0_oracle(f0, sys.a);
    let w1 = -f1 * w0 / (f0 + 3.0 * w0);
    let w2 = (0.5 - f1 * w1 - f2 * w0 - 2.0 * w1 * w1) / (f0 + 4.0 * w0);
    (w0, w1, w2)
}

// ---- criteria -----------------------------------------------------------

fn c1_rankine_hugoniot() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let gammas = [1.2, 1.4, 5.0 / 3.0, 2.0];
    let mut worst_rh = 0.0f64;
    let mut worst_amp = 0.0f64;
    let mut bad = Vec::new();
    for i in 0..50 {
        let left = GasState::new(
            rng.gen_range(0.1..=10.0),
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(0.1..=10.0),
        )
        .unwrap();
        let gamma = gammas[i % gammas.len()];
        let a = 10f64.powf(rng.gen_range(-4.0..=-2.0));
        let consts = GasConstants::with_gamma(gamma).unwrap();
        let s = match shock_from_amplitude(&left, &consts, a) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("#{i}: {e}"));
                continue;
            }
        };
        let l = fluxes(&s.left, s.sigma, gamma);
        let r = fluxes(&s.right, s.sigma, gamma);
        for k in 0..3 {
            worst_rh = worst_rh.max((l[k] - r[k]).abs() / l[k].abs());
        }
        let vl = s.left.u - s.sigma;
        let vr = s.right.u - s.sigma;
        worst_amp = worst_amp.max(rel(0.5 * (vl - vr), a));
        let cl = sound_speed(gamma, s.left.e);
        let cr = sound_speed(gamma, s.right.e);
        let lax = s.right.u - cr < s.sigma && s.sigma < s.right.u && s.sigma < s.left.u - cl;
        let compressive = s.right.rho > s.left.rho && 0.0 < vr && vr < vl;
        if !(lax && compressive) {
            bad.push(format!("#{i}: lax {lax}, compressive {compressive}"));
        }
    }
    outcome(
        worst_rh <= 1e-12 && worst_amp <= 1e-10 && bad.is_empty(),
        format!(
            "max RH defect {worst_rh:.2e} (<= 1e-12), amplitude match {worst_amp:.2e} (<= 1e-10), {} inadmissible",
            bad.len()
        ),
    )
}

fn c2_small_shock_limits() -> Outcome {
    let left = desk_left();
    let gamma = 1.4;
    let consts = GasConstants::with_gamma(gamma).unwrap();
    let c = sound_speed(gamma, left.e);
    let p = (gamma - 1.0) * left.rho * left.e;
    let limit = [
        left.u - c,
        left.rho * c,
        c + p / (left.rho * c),
        left.e + 0.5 * c * c + p / left.rho,
    ];
    let err = |s: &ShockData| {
        [s.sigma, s.j, s.c1, s.c2]
            .iter()
            .zip(&limit)
            .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
            .fold(0.0f64, f64::max)
    };
    let errs: Vec<f64> = (2..=4)
        .map(|k| err(&shock_from_amplitude(&left, &consts, 10f64.powi(-k)).unwrap()))
        .collect();
    let orders = [(errs[0] / errs[1]).log10(), (errs[1] / errs[2]).log10()];

    // f(0) -> 4 (γ-1)^5 e^3 / (γ (γ+1) ρ R^4) as a -> 0
    let f0_limit = 4.0 * (gamma - 1.0).powi(5) * left.e.powi(3) / (gamma * (gamma + 1.0) * left.rho);
    let sys = build_reduced(&shock_from_amplitude(&left, &consts, 1e-3).unwrap()).unwrap();
    let f0_err = rel(sys.f0(), f0_limit);
    outcome(
        orders.iter().all(|&o| o >= 0.9) && f0_err <= 0.05,
        format!(
            "orders {:.3}, {:.3} (>= 0.9); f(0) = {:.5e} vs limit {f0_limit:.5e}, error {:.2}% (<= 5%)",
            orders[0],
            orders[1],
            sys.f0(),
            100.0 * f0_err
        ),
    )
}

fn f_prime0_small(gamma: f64) -> f64 {
    let consts = GasConstants::with_gamma(gamma).unwrap();
    let s = shock_from_amplitude(&desk_left(), &consts, 1e-5).unwrap();
    let sys = build_reduced(&s).unwrap();
    f_taylor_oracle(&sys).0
}

fn c3_gamma_threshold() -> Outcome {
    let pos = [1.5, 2.0, 2.2].iter().all(|&g| f_prime0_small(g) > 0.0);
    let neg = [2.23, 2.5].iter().all(|&g| f_prime0_small(g) < 0.0);
    let (mut lo, mut hi) = (2.2, 2.23);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f_prime0_small(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let inside = lo >= 2.215 && hi <= 2.2155;
    outcome(
        pos && neg && inside,
        format!("f'(0) > 0 for 1.5, 2.0, 2.2: {pos}; < 0 for 2.23, 2.5: {neg}; sign change in [{lo:.7}, {hi:.7}]"),
    )
}

fn count_turns(z: &[f64]) -> usize {
    let d: Vec<f64> = z.windows(2).map(|p| p[1] - p[0]).filter(|d| *d != 0.0).collect();
    d.windows(2).filter(|p| (p[0] < 0.0) != (p[1] < 0.0)).count()
}

fn c4_heteroclinic(run: &GasRun) -> Outcome {
    let sys = &run.system;
    let a = sys.a;
    let w0 = run.equilibria.w0;
    let slack = 1e-14 * a.max(w0.abs());

    let term = |t: &radshock_core::Trajectory| {
        let s = t.last();
        s.v.hypot(s.z)
    };
    let terminal = term(&run.flat).max(term(&run.sharp));

    let mut violations = 0usize;
    for s in &run.flat.samples {
        let ok = s.v > 0.0 && s.v < a && s.w <= slack && s.z >= w1_minus_w0_oracle(sys, w0, s.v) - slack;
        violations += usize::from(!ok);
    }
    // V̄: minimiser of W1 on [-a, 0]
    let (mut lo, mut hi) = (-a, 0.0);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if w1_oracle(sys, m1) < w1_oracle(sys, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let vbar = 0.5 * (lo + hi);
    for s in &run.sharp.samples {
        let floor = w1_minus_w0_oracle(sys, w0, s.v.min(vbar));
        let ok = s.v > -a && s.v < 0.0 && s.z >= floor - slack;
        violations += usize::from(!ok);
    }

    let flat_dec = run.flat.samples.windows(2).all(|p| p[1].v < p[0].v);
    let sharp_inc = run.sharp.samples.windows(2).all(|p| p[1].v > p[0].v);
    let z: Vec<f64> = run.sharp.samples.iter().map(|s| s.z).collect();
    let turns = count_turns(&z);
    let zmin = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let interior = zmin < z[0] && zmin < *z.last().unwrap();
    outcome(
        terminal <= 1e-10 && violations == 0 && flat_dec && sharp_inc && turns == 1 && interior,
        format!(
            "terminal distance {terminal:.2e} (<= 1e-10), {violations} containment violations, V♭ decreasing {flat_dec}, V♯ increasing {sharp_inc}, W♯ turning points {turns}"
        ),
    )
}

fn c5_gluing(run: &GasRun) -> Outcome {
    let g = run.profile.meta.glue;
    let sys = &run.system;
    let f0 = sys.f(0.0);
    let (f1, _) = f_taylor_oracle(sys);
    let w0 = w0_oracle(f0, sys.a);
    let target = -f1 * w0 * w0 / (f0 + 3.0 * w0);
    let jump = (g.w_prime_right - g.w_prime_left).abs() / target.abs();
    let el = rel(g.w_prime_left, target);
    let er = rel(g.w_prime_right, target);
    outcome(
        jump <= 1e-6 && el <= 1e-4 && er <= 1e-4,
        format!(
            "|w'(0+) - w'(0-)| / |w'(0)| = {jump:.2e} (<= 1e-6); w'(0-) off by {el:.2e}, w'(0+) off by {er:.2e} (<= 1e-4)"
        ),
    )
}

fn c6_integral(run: &GasRun) -> Outcome {
    let r = integral_residual(&run.profile).unwrap().max;
    let mut bad = run.profile.clone();
    bad.v_hat.iter_mut().for_each(|v| *v *= 1.01);
    let rb = integral_residual(&bad).unwrap().max;
    outcome(
        r <= 1e-5 && rb >= 10.0 * r,
        format!("scaled residual {r:.2e} (<= 1e-5); with v̂ scaled by 1.01: {rb:.2e} ({:.1e}x)", rb / r),
    )
}

fn c7_ode(run: &GasRun) -> Outcome {
    let r0 = ode_residual(&run.profile).unwrap().max;
    let fine = desk_run(&PipelineOptions::default().refined());
    let r1 = ode_residual(&fine.profile).unwrap().max;
    outcome(
        r0 <= 1e-4 && r0 >= 3.0 * r1,
        format!("scaled residual {r0:.2e} (<= 1e-4); refined {r1:.2e}, ratio {:.2} (>= 3)", r0 / r1),
    )
}

fn c8_flux(run: &GasRun) -> Outcome {
    let q = q_cross_check(&run.profile).unwrap().max;
    let ord = n_residual_order(&run.profile, 16).unwrap();
    let second = ord.iter().all(|&o| (o - 2.0).abs() <= 0.2);
    outcome(
        q <= 1e-6 && second,
        format!("algebraic vs convolution q {q:.2e} (<= 1e-6); n residual order {:.3}, {:.3} (2 +- 0.2)", ord[0], ord[1]),
    )
}

fn c9_expansion(run: &GasRun) -> Outcome {
    let (_, w1, w2) = series_oracle(&run.system);
    let fit = match &run.verification.expansion {
        Some(f) => f,
        None => return outcome(false, "no expansion fit available".into()),
    };
    let e1 = rel(fit.fitted[0], w1);
    let e2 = rel(fit.fitted[1], w2);
    let coeffs = expansion_coeffs(&run.system, 3).unwrap();
    let e_rec = rel(coeffs.w[1], w1).max(rel(coeffs.w[2], w2));
    let slopes = run.verification.terminal_slopes.unwrap_or([f64::NAN; 2]);
    let et = rel(slopes[0], w1).max(rel(slopes[1], w1));
    outcome(
        e1 <= 1e-3 && e2 <= 1e-2 && et <= 1e-6 && e_rec <= 1e-6,
        format!(
            "fitted w1 off by {e1:.2e} (<= 1e-3), w2 off by {e2:.2e} (<= 1e-2); recursion vs series {e_rec:.1e}; terminal slopes off by {et:.2e} (<= 1e-6)"
        ),
    )
}

fn c10_baby() -> Outcome {
    let opts = PipelineOptions::default();
    let run = run_baby(&BabySystem::centred(0.5).unwrap(), &opts).unwrap();
    let w0_exact = (-1.0 + 0.5f64.sqrt()) / 2.0;
    let ew0 = rel(run.equilibria.w0, w0_exact);
    let refused = match run_baby(&BabySystem::centred(0.8).unwrap(), &opts) {
        Err(e) => e.class() == ErrorClass::Refusal,
        Ok(_) => false,
    };
    let sys = baby_reduced(0.5).unwrap();
    let coeffs = expansion_coeffs(&sys, 2).unwrap();
    let w1_zero = coeffs.w[1] == 0.0;
    let order = regularity_order(&sys).unwrap();
    let energy = run.verification.baby_energy.unwrap_or(f64::NAN);
    outcome(
        ew0 <= 1e-12 && refused && w1_zero && order == 2 && energy <= 1e-8,
        format!(
            "w0 off by {ew0:.1e} (<= 1e-12); a = 0.8 refused {refused}; w1 = {}; regularity order {order}; first integral {energy:.2e} (<= 1e-8)",
            coeffs.w[1]
        ),
    )
}

fn c11_tails(run: &GasRun) -> Outcome {
    let g = run.profile.gas().unwrap();
    let n = run.profile.len() - 1;
    let (l, r) = (run.shock.left, run.shock.right);
    let d = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
    let state = [
        d(g.rho[0], l.rho),
        d(g.u[0], l.u),
        d(g.e[0], l.e),
        d(g.rho[n], r.rho),
        d(g.u[n], r.u),
        d(g.e[n], r.e),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    let q = g.q[0].abs().max(g.q[n].abs());
    outcome(
        state <= 1e-6 && q <= 1e-8,
        format!("(rho, u, e) tails off by {state:.2e} (<= 1e-6); |q| at tails {q:.2e} (<= 1e-8)"),
    )
}

fn main() {
    let run = desk_run(&PipelineOptions::default());
    let results = [
        ("1 RH exactness", c1_rankine_hugoniot()),
        ("2 small-shock limits", c2_small_shock_limits()),
        ("3 gamma threshold", c3_gamma_threshold()),
        ("4 heteroclinic construction", c4_heteroclinic(&run)),
        ("5 C2 gluing", c5_gluing(&run)),
        ("6 integral residual", c6_integral(&run)),
        ("7 ODE residual", c7_ode(&run)),
        ("8 q cross-check", c8_flux(&run)),
        ("9 expansion theory", c9_expansion(&run)),
        ("10 baby-model oracle", c10_baby()),
        ("11 profile asymptotics", c11_tails(&run)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
