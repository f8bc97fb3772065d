//! Change of variable from the auxiliary time `η` to the physical variable
//! `ξ`, gluing of the two trajectories at `ξ = 0`, and reconstruction of
//! the gas fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::ShockData;
use crate::manifold::{Side, Trajectory};
use crate::reduced::{EquilibriumReport, ReducedSystem, SystemOrigin};

/// `ln(1e10)`: distance after which the radiation kernel has decayed below
/// `1e-10`.
pub const KERNEL_PADDING: f64 = 23.025850929940457;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlueOptions {
    /// Fixed output spacing; by default `min(max_spacing, L / points_per_length)`
    /// with `L = a / |w0|` the width of the profile.
    pub spacing: Option<f64>,
    pub max_spacing: f64,
    pub points_per_length: f64,
    /// Extension of the grid beyond both trajectory starts.
    pub padding: f64,
    /// Relative tolerance on the one-sided derivatives of `w` at `0`.
    pub match_tol: f64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self {
            spacing: None,
            max_spacing: 0.02,
            points_per_length: 4000.0,
            padding: 30.0,
            match_tol: 1e-4,
        }
    }
}

impl GlueOptions {
    pub fn spacing_for(&self, a: f64, w0: f64) -> f64 {
        self.spacing
            .unwrap_or_else(|| self.max_spacing.min(a / w0.abs() / self.points_per_length))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlueDiagnostics {
    pub w_prime_left: f64,
    pub w_prime_right: f64,
    /// `-f'(0) w0^2 / (f(0) + 3 w0)`.
    pub w_prime_target: f64,
    /// `|D_h - D_2h|` of the one-sided stencils, larger side.
    pub error_estimate: f64,
    /// Base tolerance plus `error_estimate`.
    pub tolerance: f64,
}

impl GlueDiagnostics {
    /// One-sided derivatives of `w` at the glue point measured from
    /// `z = w - w0`, with `base_tol` widened by the stencil error estimate.
    pub fn measure(z: &[f64], zi: usize, h: f64, target: f64, base_tol: f64) -> Result<Self> {
        let (left, right) = one_sided_derivatives(z, zi, h, 1)?;
        let (left2, right2) = one_sided_derivatives(z, zi, h, 2)?;
        let error_estimate = (left - left2).abs().max((right - right2).abs());
        Ok(Self {
            w_prime_left: left,
            w_prime_right: right,
            w_prime_target: target,
            error_estimate,
            tolerance: base_tol + error_estimate,
        })
    }

    pub fn passed(&self) -> bool {
        (self.w_prime_left - self.w_prime_target).abs() <= self.tolerance
            && (self.w_prime_right - self.w_prime_target).abs() <= self.tolerance
    }

    /// Base tolerance used by [`glue`].
    pub fn base_tolerance(match_tol: f64, target: f64, a: f64, w0: f64) -> f64 {
        match_tol * (target.abs() + 1e-3 * w0 * w0 / a)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub a: f64,
    pub w0: f64,
    pub f0: f64,
    pub f_prime0: f64,
    pub spacing: f64,
    pub origin: SystemOrigin,
    pub glue: GlueDiagnostics,
    /// Extents of the two mapped trajectories before padding.
    pub xi_flat_start: f64,
    pub xi_sharp_start: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GasFields {
    pub v: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub e: Vec<f64>,
    pub theta: Vec<f64>,
    pub pressure: Vec<f64>,
    pub q: Vec<f64>,
    pub n: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BabyFields {
    pub u: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PhysicalFields {
    Gas(GasFields),
    Baby(BabyFields),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    /// Uniform grid `k h` containing `0`.
    pub xi: Vec<f64>,
    pub v_hat: Vec<f64>,
    pub w: Vec<f64>,
    /// `w - w0`.
    pub z: Vec<f64>,
    /// Index with `xi == 0`.
    pub zero_index: usize,
    pub meta: ProfileMeta,
    pub fields: Option<PhysicalFields>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.meta.spacing
    }

    pub fn gas(&self) -> Option<&GasFields> {
        match &self.fields {
            Some(PhysicalFields::Gas(g)) => Some(g),
            _ => None,
        }
    }

    pub fn baby(&self) -> Option<&BabyFields> {
        match &self.fields {
            Some(PhysicalFields::Baby(b)) => Some(b),
            _ => None,
        }
    }

    /// Largest forward difference of `v_hat`; negative iff strictly decreasing.
    pub fn max_increment(&self) -> f64 {
        self.v_hat
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Physical coordinate `Ξ(η) = -∫_η^∞ V` at every sample of `traj`. The
/// part beyond the last sample is closed with `-V_end / w0`, from `V' ≈ w0 V`
/// near the node.
pub fn xi_of_eta(traj: &Trajectory, w0: f64) -> Result<Vec<f64>> {
    let s = &traj.samples;
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientSamples(format!("{n} trajectory samples")));
    }
    let mut xi = vec![0.0; n];
    xi[n - 1] = s[n - 1].v / w0;
    for i in (0..n - 1).rev() {
        let h = s[i + 1].eta - s[i].eta;
        let (p, q) = (&s[i], &s[i + 1]);
        let integral = 0.5 * h * (p.v + q.v) + h * h / 12.0 * (p.v * p.w - q.v * q.w);
        xi[i] = xi[i + 1] - integral;
    }
    let ok = |a: f64, b: f64| match traj.side {
        Side::Flat => b > a,
        Side::Sharp => b < a,
    };
    if let Some(i) = (0..n - 1).find(|&i| !ok(xi[i], xi[i + 1])) {
        return Err(Error::NonMonotone {
            side: traj.side,
            index: i,
        });
    }
    Ok(xi)
}

/// Samples of one side in increasing `ξ`, with derivatives for Hermite
/// interpolation.
struct Branch {
    xi: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    z: Vec<f64>,
    dz: Vec<f64>,
}

impl Branch {
    fn build(sys: &ReducedSystem, report: &EquilibriumReport, traj: &Trajectory) -> Result<Self> {
        let w0 = report.w0;
        let xi = xi_of_eta(traj, w0)?;
        let mut b = Branch {
            xi,
            v: Vec::new(),
            dv: Vec::new(),
            z: Vec::new(),
            dz: Vec::new(),
        };
        for s in &traj.samples {
            let f = sys.f(s.v);
            let df = sys.f.eval_increment(s.v);
            let zdot = -s.z * s.z - (2.0 * w0 + f) * s.z - df * w0 + 0.5 * s.v * s.v;
            b.v.push(s.v);
            b.dv.push(s.w);
            b.z.push(s.z);
            b.dz.push(zdot / s.v);
        }
        // the node itself, at ξ = 0
        b.xi.push(0.0);
        b.v.push(0.0);
        b.dv.push(w0);
        b.z.push(0.0);
        b.dz.push(w0 * report.tangency_slope());
        if traj.side == Side::Sharp {
            for col in [&mut b.xi, &mut b.v, &mut b.dv, &mut b.z, &mut b.dz] {
                col.reverse();
            }
        }
        if b.xi.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::NonMonotone {
                side: traj.side,
                index: traj.samples.len(),
            });
        }
        Ok(b)
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.xi[0] && x <= *self.xi.last().unwrap()
    }

    /// Cubic Hermite interpolation of `(v, z)` at `x` inside the branch.
    fn eval(&self, x: f64) -> (f64, f64) {
        let k = self.xi.partition_point(|&t| t <= x).clamp(1, self.xi.len() - 1) - 1;
        let (x0, x1) = (self.xi[k], self.xi[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let herm = |y: &[f64], d: &[f64]| {
            h00 * y[k] + h10 * h * d[k] + h01 * y[k + 1] + h11 * h * d[k + 1]
        };
        (herm(&self.v, &self.dv), herm(&self.z, &self.dz))
    }
}

/// Glue the flat and sharp trajectories at `ξ = 0` and resample on a
/// uniform grid.
pub fn glue(
    flat: &Trajectory,
    sharp: &Trajectory,
    sys: &ReducedSystem,
    report: &EquilibriumReport,
    opts: &GlueOptions,
) -> Result<Profile> {
    if flat.side != Side::Flat || sharp.side != Side::Sharp {
        return Err(Error::Domain("glue expects a flat and a sharp trajectory".into()));
    }
    let a = sys.a;
    let w0 = report.w0;
    let fb = Branch::build(sys, report, flat)?;
    let sb = Branch::build(sys, report, sharp)?;

    let h = opts.spacing_for(a, w0);
    let xi_lo = fb.xi[0] - opts.padding;
    let xi_hi = *sb.xi.last().unwrap() + opts.padding;
    let k_lo = (xi_lo / h).floor() as i64;
    let k_hi = (xi_hi / h).ceil() as i64;

    // saddle linearization beyond the trajectory starts
    let flat_rate = report.mu2 / a;
    let sharp_rate = report.nu2 / a;
    let (fx0, fd, fw) = (fb.xi[0], a - fb.v[0], fb.dv[0]);
    let last = sb.xi.len() - 1;
    let (sx0, sd, sw) = (sb.xi[last], sb.v[last] + a, sb.dv[last]);

    let n = (k_hi - k_lo + 1) as usize;
    let mut xi = Vec::with_capacity(n);
    let mut v_hat = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut zero_index = 0;
    for k in k_lo..=k_hi {
        let x = k as f64 * h;
        let (v, zz) = if k == 0 {
            zero_index = xi.len();
            (0.0, 0.0)
        } else if x < fx0 {
            let r = (flat_rate * (x - fx0)).exp();
            (a - fd * r, fw * r - w0)
        } else if x > sx0 {
            let r = (-sharp_rate * (x - sx0)).exp();
            (-a + sd * r, sw * r - w0)
        } else if x < 0.0 {
            debug_assert!(fb.contains(x));
            fb.eval(x)
        } else {
            sb.eval(x)
        };
        xi.push(x);
        v_hat.push(v);
        z.push(zz);
        w.push(w0 + zz);
    }
    let target = report.glue_derivative();
    let base = GlueDiagnostics::base_tolerance(opts.match_tol, target, a, w0);
    let diag = GlueDiagnostics::measure(&z, zero_index, h, target, base)?;
    if !diag.passed() {
        return Err(Error::GluingFailed {
            left: diag.w_prime_left,
            right: diag.w_prime_right,
            expected: target,
        });
    }

    Ok(Profile {
        xi,
        v_hat,
        w,
        z,
        zero_index,
        meta: ProfileMeta {
            a,
            w0,
            f0: report.f0,
            f_prime0: report.f_prime0,
            spacing: h,
            origin: sys.origin,
            glue: diag,
            xi_flat_start: fx0,
            xi_sharp_start: sx0,
        },
        fields: None,
    })
}

/// One-sided three-point estimates of `w'(0-)` and `w'(0+)` from `z = w - w0`
/// on a uniform grid with `z[zi] = 0`, using every `stride`-th sample.
pub fn one_sided_derivatives(z: &[f64], zi: usize, h: f64, stride: usize) -> Result<(f64, f64)> {
    let m = stride.max(1);
    if zi < 2 * m || zi + 2 * m >= z.len() {
        return Err(Error::InsufficientSamples("grid too short around 0".into()));
    }
    let hm = h * m as f64;
    let right = (-3.0 * z[zi] + 4.0 * z[zi + m] - z[zi + 2 * m]) / (2.0 * hm);
    let left = (3.0 * z[zi] - 4.0 * z[zi - m] + z[zi - 2 * m]) / (2.0 * hm);
    Ok((left, right))
}

/// Gas parameters needed to rebuild the physical fields from `(v̂, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    pub gamma: f64,
    pub r_gas: f64,
    pub j: f64,
    pub c1: f64,
    pub sigma: f64,
}

impl GasParameters {
    pub fn from_shock(shock: &ShockData) -> Self {
        let s = shock.as_one_shock();
        Self {
            gamma: s.consts.gamma,
            r_gas: s.consts.r_gas,
            j: s.j,
            c1: s.c1,
            sigma: s.sigma,
        }
    }

    /// `(v- + v+)/2 = γ C1 / (γ + 1)`.
    pub fn center(&self) -> f64 {
        self.gamma * self.c1 / (self.gamma + 1.0)
    }
}

/// Gas fields along the profile: `ρ = j/v`, `u = v + σ`,
/// `e = (C1 - v) v / (γ - 1)`, `θ = (C1 - v) v / R`, the algebraic flux
/// `q = j(γ+1) / (2(γ-1)) (v - v-)(v - v+)` and `n = θ^4 - q'`.
pub fn reconstruct(profile: &Profile, shock: &ShockData) -> Result<Profile> {
    if shock.family == crate::gas::ShockFamily::Three {
        return Err(Error::Reconstruction(
            "3-shock profiles are obtained by reflecting the 1-shock profile".into(),
        ));
    }
    reconstruct_with(profile, &GasParameters::from_shock(shock))
}

pub fn reconstruct_with(profile: &Profile, gp: &GasParameters) -> Result<Profile> {
    let (gamma, r) = (gp.gamma, gp.r_gas);
    let center = gp.center();
    let a = profile.meta.a;
    let k = gp.j * (gamma + 1.0) / (gamma - 1.0);
    let mut g = GasFields::default();
    for (i, (&vh, &w)) in profile.v_hat.iter().zip(&profile.w).enumerate() {
        let v = vh + center;
        if !(v > 0.0) {
            return Err(Error::Reconstruction(format!("v = {v:e} <= 0 at sample {i}")));
        }
        if !(gp.c1 - v > 0.0) {
            return Err(Error::Reconstruction(format!(
                "C1 - v = {:e} <= 0 at sample {i}",
                gp.c1 - v
            )));
        }
        let theta = (gp.c1 - v) * v / r;
        let e = (gp.c1 - v) * v / (gamma - 1.0);
        let rho = gp.j / v;
        let q = 0.5 * k * (vh - a) * (vh + a);
        let dq = k * vh * w;
        g.v.push(v);
        g.rho.push(rho);
        g.u.push(v + gp.sigma);
        g.e.push(e);
        g.theta.push(theta);
        g.pressure.push((gamma - 1.0) * rho * e);
        g.q.push(q);
        g.n.push(theta.powi(4) - dq);
    }
    let mut out = profile.clone();
    out.fields = Some(PhysicalFields::Gas(g));
    Ok(out)
}
