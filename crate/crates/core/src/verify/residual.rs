//! Residuals of the integral equation, its differentiated second-order
//! form, the radiative flux and the radiation energy along a profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::ShockData;
use crate::glue::{Profile, KERNEL_PADDING};
use crate::reduced::SystemOrigin;
use crate::verify::convolution::{kernel_flux, padded_window};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Largest scaled residual on the window.
    pub max: f64,
    /// Where it is attained.
    pub at_xi: f64,
    /// Scale the raw residual was divided by.
    pub scale: f64,
    pub window: (f64, f64),
}

fn report(xi: &[f64], idx: impl Iterator<Item = usize>, r: impl Fn(usize) -> f64, scale: f64) -> ResidualReport {
    let mut best = (0.0f64, f64::NAN);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in idx {
        lo = lo.min(xi[i]);
        hi = hi.max(xi[i]);
        let v = (r(i) / scale).abs();
        if !(v <= best.0) {
            best = (v, xi[i]);
        }
    }
    ResidualReport {
        max: best.0,
        at_xi: best.1,
        scale,
        window: (lo, hi),
    }
}

#[derive(Debug, Clone, Copy)]
struct Gas {
    gamma: f64,
    r: f64,
    j: f64,
    c1: f64,
    center: f64,
    a: f64,
}

impl Gas {
    fn of(p: &Profile) -> Option<Self> {
        match p.meta.origin {
            SystemOrigin::Gas { gamma, r_gas, j, c1 } => Some(Self {
                gamma,
                r: r_gas,
                j,
                c1,
                center: gamma * c1 / (gamma + 1.0),
                a: p.meta.a,
            }),
            SystemOrigin::Baby => None,
        }
    }

    fn v_minus(&self) -> f64 {
        self.center + self.a
    }

    fn theta_minus(&self) -> f64 {
        let vm = self.v_minus();
        (self.c1 - vm) * vm / self.r
    }

    /// `θ(v)^4 - θ-^4` without cancellation.
    fn theta4_excess(&self, v_hat: f64) -> f64 {
        let v = self.center + v_hat;
        let tm = self.theta_minus();
        let t = (self.c1 - v) * v / self.r;
        let dt = (v_hat - self.a) * (self.c1 - v - self.v_minus()) / self.r;
        dt * (t + tm) * (t * t + tm * tm)
    }

    /// `j (γ+1) / (γ-1)`, so that `q = k (v̂-a)(v̂+a) / 2`.
    fn flux_factor(&self) -> f64 {
        self.j * (self.gamma + 1.0) / (self.gamma - 1.0)
    }
}

fn require_gas(p: &Profile) -> Result<Gas> {
    Gas::of(p).ok_or_else(|| Error::Domain("gas residual requested for a baby-model profile".into()))
}

/// Radiative flux by convolution of `θ^4` (or of `u` for the baby model)
/// over the whole grid.
pub fn flux_by_convolution(p: &Profile) -> Result<Vec<f64>> {
    match Gas::of(p) {
        Some(g) => {
            let src: Vec<f64> = p.v_hat.iter().map(|&v| g.theta4_excess(v)).collect();
            kernel_flux(&p.xi, &src)
        }
        None => kernel_flux(&p.xi, &p.v_hat),
    }
}

/// Residual of `(v - v-)(v - v+) = 2(γ-1)/(j(γ+1)) q[θ^4]`, scaled by `a^2`,
/// on the points at least the kernel padding away from the grid ends. For
/// the baby model the equation is `(v̂ - a)(v̂ + a) = -2 q[v̂]`.
pub fn integral_residual(p: &Profile) -> Result<ResidualReport> {
    let win = padded_window(&p.xi, KERNEL_PADDING)?;
    let q = flux_by_convolution(p)?;
    let a = p.meta.a;
    let coef = match Gas::of(p) {
        Some(g) => 2.0 / g.flux_factor(),
        None => -2.0,
    };
    Ok(report(
        &p.xi,
        win,
        |i| (p.v_hat[i] - a) * (p.v_hat[i] + a) - coef * q[i],
        a * a,
    ))
}

/// Residual of `v̂ v̂'' + v̂'^2 + f(v̂) v̂' - (v̂^2 - a^2)/2` (written in the
/// original velocity for the gas), with `v̂' = w` and `v̂''` by central
/// differences of `w`, scaled by `a^2`.
pub fn ode_residual(p: &Profile) -> Result<ResidualReport> {
    let n = p.len();
    if n < 3 {
        return Err(Error::InsufficientSamples("ODE residual needs three points".into()));
    }
    let h = p.spacing();
    let a = p.meta.a;
    let gas = Gas::of(p);
    let r = |i: usize| {
        let vh = p.v_hat[i];
        let w = p.w[i];
        let vpp = (p.z[i + 1] - p.z[i - 1]) / (2.0 * h);
        match gas {
            Some(g) => {
                let v = g.center + vh;
                let k = 4.0 * (g.gamma - 1.0) / (g.j * (g.gamma + 1.0) * g.r.powi(4));
                (v - g.gamma * g.c1 / (g.gamma + 1.0)) * vpp + w * w
                    - k * (g.c1 - v).powi(3) * v.powi(3) * (g.c1 - 2.0 * v) * w
                    - 0.5 * (vh - a) * (v - (g.center - a))
            }
            None => vh * vpp + w * w + w - 0.5 * (vh - a) * (vh + a),
        }
    };
    Ok(report(&p.xi, 1..n - 1, r, a * a))
}

/// Algebraic flux against the convolution of `θ^4`, relative to `max |q|`.
pub fn q_cross_check(p: &Profile) -> Result<ResidualReport> {
    let g = require_gas(p)?;
    let win = padded_window(&p.xi, KERNEL_PADDING)?;
    let q = flux_by_convolution(p)?;
    let a = p.meta.a;
    let k = g.flux_factor();
    let q_alg = |i: usize| 0.5 * k * (p.v_hat[i] - a) * (p.v_hat[i] + a);
    let q_max = 0.5 * k * a * a;
    Ok(report(&p.xi, win, |i| q_alg(i) - q[i], q_max))
}

/// Residual of `-n'' + n - θ^4` for `n = θ^4 - q'`, with `n''` by central
/// differences over `stride` grid cells, relative to `max |q'|`.
pub fn n_residual_with_stride(p: &Profile, stride: usize) -> Result<ResidualReport> {
    let g = require_gas(p)?;
    let n = p.len();
    let m = stride.max(1);
    if n < 2 * m + 1 {
        return Err(Error::InsufficientSamples("n residual needs 2 stride + 1 points".into()));
    }
    let h = p.spacing() * m as f64;
    let k = g.flux_factor();
    let dq: Vec<f64> = p.v_hat.iter().zip(&p.w).map(|(&v, &w)| k * v * w).collect();
    // n - θ-^4; the constant drops out of every term
    let nn: Vec<f64> = p
        .v_hat
        .iter()
        .zip(&dq)
        .map(|(&v, &d)| g.theta4_excess(v) - d)
        .collect();
    let scale = dq.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    Ok(report(
        &p.xi,
        m..n - m,
        |i| -(nn[i + m] - 2.0 * nn[i] + nn[i - m]) / (h * h) - dq[i],
        scale,
    ))
}

/// Stencil stride for [`n_residual`]: about a thousandth of the profile
/// width `a / max |w|`, and at least one cell.
pub fn n_residual_stride(p: &Profile) -> usize {
    let w_max = p.w.iter().fold(0.0f64, |acc, w| acc.max(w.abs()));
    let width = p.meta.a / w_max;
    let m = (width / (1000.0 * p.spacing())).floor();
    if m.is_finite() && m >= 1.0 {
        (m as usize).min((p.len().saturating_sub(1) / 2).max(1))
    } else {
        1
    }
}

pub fn n_residual(p: &Profile) -> Result<ResidualReport> {
    n_residual_with_stride(p, n_residual_stride(p))
}

/// Observed order of the `n` residual when the difference stencil is
/// halved from `4 stride` to `2 stride` to `stride` cells: returns the two
/// successive `log2` error ratios.
pub fn n_residual_order(p: &Profile, stride: usize) -> Result<[f64; 2]> {
    let r: Vec<f64> = [4 * stride, 2 * stride, stride]
        .iter()
        .map(|&m| n_residual_with_stride(p, m).map(|r| r.max))
        .collect::<Result<_>>()?;
    Ok([(r[0] / r[1]).log2(), (r[1] / r[2]).log2()])
}

/// Pointwise relative defects of `ρv = j`, `ρv^2 + P = j C1` and
/// `ρv(e + v^2/2) + P v + q = j C2`.
pub fn conservation_residuals(p: &Profile, shock: &ShockData) -> Result<[f64; 3]> {
    let f = p
        .gas()
        .ok_or_else(|| Error::Domain("profile has no gas fields".into()))?;
    let s = shock.as_one_shock();
    let mut out = [0.0f64; 3];
    for i in 0..p.len() {
        let v = f.v[i];
        let m = f.rho[i] * v;
        let defects = [
            m / s.j - 1.0,
            (m * v + f.pressure[i]) / (s.j * s.c1) - 1.0,
            (m * (f.e[i] + 0.5 * v * v) + f.pressure[i] * v + f.q[i]) / (s.j * s.c2) - 1.0,
        ];
        for (o, d) in out.iter_mut().zip(defects) {
            *o = o.max(d.abs());
        }
    }
    Ok(out)
}
