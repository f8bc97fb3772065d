//! End-to-end runs: shock data, reduced system, both trajectories, glued
//! profile, reconstruction and verification.

use serde::{Deserialize, Serialize};

use crate::baby::{baby_energy_check, baby_reduced, reconstruct_baby, BabySystem};
use crate::error::{Error, Result};
use crate::gas::{lax_check, shock_from_amplitude, GasConstants, GasState, LaxReport, ShockData};
use crate::glue::{glue, reconstruct, GlueDiagnostics, GlueOptions, Profile, ProfileMeta};
use crate::manifold::{integrate_manifold_with, ManifoldOptions, Side, Trajectory};
use crate::nullcline::{check_hypotheses, nullclines, HypothesisReport};
use crate::reduced::{build_reduced, equilibria, EquilibriumReport, ReducedSystem};
use crate::verify::{
    conservation_residuals, expansion_coeffs, expansion_fit, gamma_condition, integral_residual,
    n_residual, ode_residual, q_cross_check, regularity_order, ExpansionCoeffs,
    ExpansionFitReport, FitOptions, GammaCondition, ResidualReport,
};

/// Acceptance thresholds of the verification gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Gates {
    /// Integral equation residual, relative to `a^2`.
    pub integral: f64,
    /// Second-order ODE residual, relative to `a^2`.
    pub ode: f64,
    /// Algebraic against convolution flux, relative to `max |q|`.
    pub q_cross: f64,
    /// `-n'' + n - θ^4`, relative to `max |q'|`.
    pub n_residual: f64,
    /// Baby-model first integral, absolute.
    pub baby_energy: f64,
    /// Terminal tangency slope against `w1`, relative.
    pub tangency: f64,
    /// Mass, momentum and energy along the profile, relative.
    pub conservation: [f64; 3],
}

impl Default for Gates {
    fn default() -> Self {
        Self {
            integral: 1e-5,
            ode: 1e-4,
            q_cross: 1e-6,
            n_residual: 1e-3,
            baby_energy: 1e-8,
            tangency: 1e-6,
            conservation: [1e-10, 1e-10, 1e-8],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub manifold: ManifoldOptions,
    pub glue: GlueOptions,
    pub fit: FitOptions,
    pub gates: Gates,
    /// Order `n` of the expansion coefficients (`w_0 ..= w_{n+1}`).
    pub expansion_order: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            manifold: ManifoldOptions::default(),
            glue: GlueOptions::default(),
            fit: FitOptions::default(),
            gates: Gates::default(),
            expansion_order: 3,
        }
    }
}

impl PipelineOptions {
    /// Halve every step: the output spacing, the step cap and the
    /// integrator steps (a factor `2^5` in tolerance for the fifth-order pair).
    pub fn refined(&self) -> Self {
        let mut o = *self;
        o.manifold.rtol /= 32.0;
        o.manifold.max_dxi *= 0.5;
        o.glue.points_per_length *= 2.0;
        o.glue.max_spacing *= 0.5;
        o.glue.spacing = o.glue.spacing.map(|h| 0.5 * h);
        o
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub integral: Option<ResidualReport>,
    pub ode: Option<ResidualReport>,
    pub q_cross: Option<ResidualReport>,
    pub n_residual: Option<ResidualReport>,
    pub conservation: Option<[f64; 3]>,
    pub baby_energy: Option<f64>,
    pub tangency_slope: Option<f64>,
    pub terminal_slopes: Option<[f64; 2]>,
    pub expansion: Option<ExpansionFitReport>,
    pub expansion_error: Option<String>,
    pub gates: Vec<Gate>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn failed_gates(&self) -> Vec<&str> {
        self.gates
            .iter()
            .filter(|g| !g.passed)
            .map(|g| g.name.as_str())
            .collect()
    }

    pub fn gate(&mut self, name: &str, value: f64, threshold: f64) {
        self.gates.push(Gate {
            name: name.to_string(),
            value,
            threshold,
            passed: value <= threshold,
        });
    }
}

/// Every check that needs nothing but the profile (and, for the
/// conservation gate, the shock data).
pub fn verify_profile(
    profile: &Profile,
    shock: Option<&ShockData>,
    coeffs: Option<&ExpansionCoeffs>,
    opts: &PipelineOptions,
) -> Result<VerificationReport> {
    let g = &opts.gates;
    let mut rep = VerificationReport::default();

    let integral = integral_residual(profile)?;
    rep.gate("integral_residual", integral.max, g.integral);
    rep.integral = Some(integral);

    let ode = ode_residual(profile)?;
    rep.gate("ode_residual", ode.max, g.ode);
    rep.ode = Some(ode);

    if profile.gas().is_some() {
        let q = q_cross_check(profile)?;
        rep.gate("q_cross_check", q.max, g.q_cross);
        rep.q_cross = Some(q);
        let n = n_residual(profile)?;
        rep.gate("n_residual", n.max, g.n_residual);
        rep.n_residual = Some(n);
        if let Some(s) = shock {
            let c = conservation_residuals(profile, s)?;
            rep.gate("mass", c[0], g.conservation[0]);
            rep.gate("momentum", c[1], g.conservation[1]);
            rep.gate("energy", c[2], g.conservation[2]);
            rep.conservation = Some(c);
        }
    } else {
        let e = baby_energy_check(profile)?;
        rep.gate("baby_energy", e, g.baby_energy);
        rep.baby_energy = Some(e);
    }

    let glue = profile.meta.glue;
    rep.gate(
        "glue_left",
        (glue.w_prime_left - glue.w_prime_target).abs(),
        glue.tolerance,
    );
    rep.gate(
        "glue_right",
        (glue.w_prime_right - glue.w_prime_target).abs(),
        glue.tolerance,
    );

    if let Some(c) = coeffs {
        match expansion_fit(profile, c, &opts.fit) {
            Ok(fit) => {
                rep.expansion = Some(fit);
            }
            Err(e) => rep.expansion_error = Some(e.to_string()),
        }
    }
    Ok(rep)
}

fn add_tangency(
    rep: &mut VerificationReport,
    sys: &ReducedSystem,
    eq: &EquilibriumReport,
    flat: &Trajectory,
    sharp: &Trajectory,
    gates: &Gates,
) {
    let target = eq.tangency_slope();
    rep.tangency_slope = Some(target);
    let p = Some(eq.lambda2 / eq.lambda1 - 1.0);
    let slopes = [
        flat.terminal_slope_with(sys.a, 1e-8, 1e-5, p),
        sharp.terminal_slope_with(sys.a, 1e-8, 1e-5, p),
    ];
    if let [Ok(sf), Ok(ss)] = slopes {
        rep.terminal_slopes = Some([sf, ss]);
        // absolute floor for the baby model, where the slope is zero
        let scale = target.abs().max(1e-6 * eq.w0.abs() / sys.a);
        let err = ((sf - target).abs()).max((ss - target).abs()) / scale;
        rep.gate("tangency_slope", err, gates.tangency);
    } else {
        rep.gate("tangency_slope", f64::INFINITY, gates.tangency);
    }
}

fn both_sides(
    sys: &ReducedSystem,
    eq: &EquilibriumReport,
    opts: &ManifoldOptions,
) -> Result<(Trajectory, Trajectory)> {
    let nc = nullclines(sys)?;
    let (flat, sharp) = std::thread::scope(|s| {
        let f = s.spawn(|| integrate_manifold_with(sys, eq, &nc, Side::Flat, opts));
        let sh = integrate_manifold_with(sys, eq, &nc, Side::Sharp, opts);
        (f.join().expect("flat-side integration panicked"), sh)
    });
    Ok((flat?, sharp?))
}

#[derive(Debug, Clone)]
pub struct GasRun {
    pub shock: ShockData,
    pub lax: LaxReport,
    pub gamma: GammaCondition,
    pub system: ReducedSystem,
    pub equilibria: EquilibriumReport,
    pub hypotheses: HypothesisReport,
    pub regularity_order: usize,
    pub coeffs: Option<ExpansionCoeffs>,
    pub flat: Trajectory,
    pub sharp: Trajectory,
    pub profile: Profile,
    pub verification: VerificationReport,
}

/// Refusals come first and in a fixed order: `γ` range, shock admissibility,
/// discriminant, node ordering, nullcline hypotheses.
pub fn run_gas(
    left: &GasState,
    consts: &GasConstants,
    a: f64,
    opts: &PipelineOptions,
) -> Result<GasRun> {
    let gamma = gamma_condition(consts);
    if !gamma.satisfied {
        return Err(Error::GammaOutOfRange {
            gamma: consts.gamma,
            threshold: gamma.threshold,
        });
    }
    let shock = shock_from_amplitude(left, consts, a)?;
    let lax = lax_check(&shock);
    let system = build_reduced(&shock)?;
    let eq = equilibria(&system)?;
    let hypotheses = check_hypotheses(&system);
    if let Some(msg) = &hypotheses.first_failure {
        return Err(Error::Hypothesis(msg.clone()));
    }
    let regularity_order = regularity_order(&system)?;
    let coeffs = expansion_coeffs(&system, opts.expansion_order).ok();

    let (flat, sharp) = both_sides(&system, &eq, &opts.manifold)?;
    let profile = glue(&flat, &sharp, &system, &eq, &opts.glue)?;
    let profile = reconstruct(&profile, &shock)?;
    let mut verification = verify_profile(&profile, Some(&shock), coeffs.as_ref(), opts)?;
    add_tangency(&mut verification, &system, &eq, &flat, &sharp, &opts.gates);

    Ok(GasRun {
        shock,
        lax,
        gamma,
        system,
        equilibria: eq,
        hypotheses,
        regularity_order,
        coeffs,
        flat,
        sharp,
        profile,
        verification,
    })
}

#[derive(Debug, Clone)]
pub struct BabyRun {
    pub baby: BabySystem,
    pub system: ReducedSystem,
    pub equilibria: EquilibriumReport,
    pub regularity_order: usize,
    pub coeffs: Option<ExpansionCoeffs>,
    pub flat: Trajectory,
    pub sharp: Trajectory,
    pub profile: Profile,
    pub verification: VerificationReport,
}

pub fn run_baby(baby: &BabySystem, opts: &PipelineOptions) -> Result<BabyRun> {
    let system = baby_reduced(baby.amplitude())?;
    let eq = equilibria(&system)?;
    let regularity_order = regularity_order(&system)?;
    let coeffs = expansion_coeffs(&system, opts.expansion_order.min(regularity_order)).ok();
    let (flat, sharp) = both_sides(&system, &eq, &opts.manifold)?;
    let profile = glue(&flat, &sharp, &system, &eq, &opts.glue)?;
    let profile = reconstruct_baby(&profile, baby);
    let mut verification = verify_profile(&profile, None, coeffs.as_ref(), opts)?;
    add_tangency(&mut verification, &system, &eq, &flat, &sharp, &opts.gates);
    Ok(BabyRun {
        baby: *baby,
        system,
        equilibria: eq,
        regularity_order,
        coeffs,
        flat,
        sharp,
        profile,
        verification,
    })
}

/// Machine-readable record of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub model: String,
    pub a: f64,
    pub shock: Option<ShockData>,
    pub lax: Option<LaxReport>,
    pub gamma_condition: Option<GammaCondition>,
    pub baby: Option<BabySystem>,
    pub f_coeffs: Vec<f64>,
    pub f0: f64,
    pub f_prime0: f64,
    pub discriminant: f64,
    pub equilibria: EquilibriumReport,
    pub hypotheses: Option<HypothesisReport>,
    pub regularity_order: usize,
    pub expansion: Option<ExpansionCoeffs>,
    pub glue: GlueDiagnostics,
    pub profile_meta: ProfileMeta,
    pub grid_points: usize,
    pub trajectory_samples: [usize; 2],
    pub verification: VerificationReport,
    pub passed: bool,
}

impl Summary {
    pub fn from_gas(run: &GasRun) -> Self {
        Self {
            model: "gas".into(),
            a: run.system.a,
            shock: Some(run.shock),
            lax: Some(run.lax),
            gamma_condition: Some(run.gamma),
            baby: None,
            f_coeffs: run.system.f_coeffs(),
            f0: run.equilibria.f0,
            f_prime0: run.equilibria.f_prime0,
            discriminant: run.system.discriminant(),
            equilibria: run.equilibria,
            hypotheses: Some(run.hypotheses.clone()),
            regularity_order: run.regularity_order,
            expansion: run.coeffs.clone(),
            glue: run.profile.meta.glue,
            profile_meta: run.profile.meta.clone(),
            grid_points: run.profile.len(),
            trajectory_samples: [run.flat.samples.len(), run.sharp.samples.len()],
            verification: run.verification.clone(),
            passed: run.verification.passed(),
        }
    }

    pub fn from_baby(run: &BabyRun) -> Self {
        Self {
            model: "baby".into(),
            a: run.system.a,
            shock: None,
            lax: None,
            gamma_condition: None,
            baby: Some(run.baby),
            f_coeffs: run.system.f_coeffs(),
            f0: run.equilibria.f0,
            f_prime0: run.equilibria.f_prime0,
            discriminant: run.system.discriminant(),
            equilibria: run.equilibria,
            hypotheses: None,
            regularity_order: run.regularity_order,
            expansion: run.coeffs.clone(),
            glue: run.profile.meta.glue,
            profile_meta: run.profile.meta.clone(),
            grid_points: run.profile.len(),
            trajectory_samples: [run.flat.samples.len(), run.sharp.samples.len()],
            verification: run.verification.clone(),
            passed: run.verification.passed(),
        }
    }
}
