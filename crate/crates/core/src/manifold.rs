//! Unstable manifolds of the saddles `(±a, 0)` followed into the node
//! `(0, w0)`.
//!
//! Far from the node the state `(V, W)` is integrated directly. Once
//! `|V| <= a/2` the integration switches to `(V, Z)` with `Z = W - w0`,
//! because `W - w0` eventually drops far below the resolution of `W`
//! itself while the remaining diagnostics (tangency slope, gluing
//! derivative) are read off from `Z`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nullcline::{nullclines, NullclineData};
use crate::ode::{DormandPrince, Flow, IntegrationStats, Integrator, OdeError, OdeSystem, Rosenbrock};
use crate::reduced::{EquilibriumReport, ReducedSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Leaves `(a, 0)`; `V` decreases to `0+`.
    Flat,
    /// Leaves `(-a, 0)`; `V` increases to `0-`.
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub eta: f64,
    pub v: f64,
    pub w: f64,
    /// `W - w0`, carried with full relative precision near the node.
    pub z: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub side: Side,
    pub samples: Vec<TrajectorySample>,
    /// Distance of the last sample to `(0, w0)`.
    pub terminal_error: f64,
    /// Offset along the eigenvector actually used for the start point.
    pub start_offset: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Which integrator follows the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Rosenbrock when the saddle's eigenvalue ratio exceeds `stiffness_switch`.
    Auto,
    Explicit,
    Stiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ManifoldOptions {
    pub rtol: f64,
    /// Absolute floor, as a multiple of `terminal_tol * [a, |w0|]`.
    pub atol: f64,
    /// Start offset along the eigenvector, relative to `a`.
    pub start_offset: f64,
    pub max_halvings: usize,
    /// Stop once `|(V, W) - (0, w0)| <= terminal_tol * max(a, |w0|)`.
    pub terminal_tol: f64,
    /// Containment slack relative to `max(a, |w0|)`.
    pub containment_slack: f64,
    /// Largest step in the physical variable, `|V| dη`.
    pub max_dxi: f64,
    pub max_steps: usize,
    pub method: Method,
    /// `|fast / slow|` saddle eigenvalue ratio above which `Auto` goes stiff.
    pub stiffness_switch: f64,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            start_offset: 1e-6,
            max_halvings: 8,
            terminal_tol: 1e-10,
            containment_slack: 1e-14,
            max_dxi: 0.1,
            max_steps: 2_000_000,
            method: Method::Auto,
            stiffness_switch: 1e4,
        }
    }
}

impl ManifoldOptions {
    /// Tighter integration tolerances and a finer step cap, for refinement studies.
    pub fn refined(&self, factor: f64) -> Self {
        Self {
            rtol: self.rtol / factor,
            max_dxi: self.max_dxi / factor,
            ..*self
        }
    }
}

impl Trajectory {
    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has samples")
    }

    /// Number of strict sign changes of successive increments of `W`.
    pub fn w_turning_points(&self) -> usize {
        let d: Vec<f64> = self
            .samples
            .windows(2)
            .map(|p| p[1].z - p[0].z)
            .filter(|&d| d != 0.0)
            .collect();
        d.windows(2).filter(|p| (p[0] > 0.0) != (p[1] > 0.0)).count()
    }

    pub fn v_strictly_monotone(&self) -> bool {
        self.samples.windows(2).all(|p| match self.side {
            Side::Flat => p[1].v < p[0].v,
            Side::Sharp => p[1].v > p[0].v,
        })
    }

    pub fn w_strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|p| p[1].z < p[0].z)
    }

    /// Limit of `(W - w0) / V` as `V -> 0`: intercept of a least-squares
    /// line through `Z / V` against `V` for `|V|` in `[lo, hi] * a`.
    pub fn terminal_slope(&self, a: f64, lo: f64, hi: f64) -> Result<f64> {
        self.terminal_slope_with(a, lo, hi, None)
    }

    /// As [`Trajectory::terminal_slope`], with an extra `|V|^p` column in the
    /// fit. Near the node `Z/V = w1 + w2 V + K |V|^(ρ-1) + ...` with
    /// `ρ = λ2/λ1`, so `p = ρ - 1` removes the slow non-analytic term when
    /// `ρ < 3`.
    pub fn terminal_slope_with(&self, a: f64, lo: f64, hi: f64, p: Option<f64>) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.v.abs() >= lo * a && s.v.abs() <= hi * a)
            .map(|s| (s.v / a, s.z / s.v))
            .collect();
        let p = p.filter(|&p| p > 0.0 && p < 2.0 && (p - 1.0).abs() > 0.05);
        let cols = if p.is_some() { 3 } else { 2 };
        if pts.len() < cols + 1 {
            return Err(Error::InsufficientSamples(format!(
                "{} samples with |V|/a in [{lo:e}, {hi:e}]",
                pts.len()
            )));
        }
        // columns scaled to unit size at |x| = hi
        let x = DMatrix::from_fn(pts.len(), cols, |i, j| match j {
            0 => 1.0,
            1 => pts[i].0 / hi,
            _ => (pts[i].0.abs() / hi).powf(p.unwrap_or(1.0)),
        });
        let y = DVector::from_fn(pts.len(), |i, _| pts[i].1);
        let sol = x
            .svd(true, true)
            .solve(&y, 1e-14)
            .map_err(|e| Error::InsufficientSamples(e.to_string()))?;
        Ok(sol[0])
    }

    /// Least-squares rate of `ln |(V, Z)|` against `η` over the samples whose
    /// distance to the node lies in `[lo, hi] * scale`.
    pub fn convergence_rate(&self, scale: f64, lo: f64, hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .map(|s| (s.eta, s.v.hypot(s.z)))
            .filter(|&(_, d)| d >= lo * scale && d <= hi * scale)
            .map(|(e, d)| (e, d.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        Some(sxy / sxx)
    }
}

/// Direct form in `(X, W)` with `V = anchor + X`.
struct Direct<'a> {
    sys: &'a ReducedSystem,
    anchor: f64,
    max_dxi: f64,
}

impl OdeSystem<2> for Direct<'_> {
    fn rhs(&self, _t: f64, y: &[f64; 2]) -> [f64; 2] {
        let (x, w) = (y[0], y[1]);
        let v = self.anchor + x;
        [v * w, -w * w - self.sys.f(v) * w + 0.5 * x * (x + 2.0 * self.anchor)]
    }
    fn max_step(&self, y: &[f64; 2]) -> f64 {
        self.max_dxi / (self.anchor + y[0]).abs()
    }
    fn jacobian(&self, _t: f64, y: &[f64; 2]) -> Option<[[f64; 2]; 2]> {
        Some(self.sys.jacobian(self.anchor + y[0], y[1]))
    }
}

/// `(V, Z)` form: `Z' = -Z^2 - (2 w0 + f(V)) Z - (f(V) - f(0)) w0 + V^2 / 2`.
struct NodeFrame<'a> {
    sys: &'a ReducedSystem,
    w0: f64,
    max_dxi: f64,
}

impl OdeSystem<2> for NodeFrame<'_> {
    fn rhs(&self, _t: f64, y: &[f64; 2]) -> [f64; 2] {
        let (v, z) = (y[0], y[1]);
        let f = self.sys.f(v);
        let df = self.sys.f.eval_increment(v);
        [
            v * (z + self.w0),
            -z * z - (2.0 * self.w0 + f) * z - df * self.w0 + 0.5 * v * v,
        ]
    }
    fn max_step(&self, y: &[f64; 2]) -> f64 {
        self.max_dxi / y[0].abs()
    }
    fn jacobian(&self, _t: f64, y: &[f64; 2]) -> Option<[[f64; 2]; 2]> {
        let (v, z) = (y[0], y[1]);
        let fp = self.sys.f.derivative().eval(v);
        Some([
            [z + self.w0, v],
            [-fp * (z + self.w0) + v, -2.0 * z - 2.0 * self.w0 - self.sys.f(v)],
        ])
    }
}

/// Saddle eigenvalue ratio `|fast / slow|` on `side`.
pub fn stiffness_ratio(report: &EquilibriumReport, side: Side) -> f64 {
    match side {
        Side::Flat => (report.mu1 / report.mu2).abs(),
        Side::Sharp => (report.nu1 / report.nu2).abs(),
    }
}

fn integrator(report: &EquilibriumReport, side: Side, opts: &ManifoldOptions, floors: [f64; 2]) -> Integrator<2> {
    let stiff = match opts.method {
        Method::Explicit => false,
        Method::Stiff => true,
        Method::Auto => stiffness_ratio(report, side) > opts.stiffness_switch,
    };
    if stiff {
        let mut rb = Rosenbrock::new(opts.rtol, floors);
        rb.max_steps = opts.max_steps;
        Integrator::Stiff(rb)
    } else {
        let mut dp = DormandPrince::new(opts.rtol, floors);
        dp.max_steps = opts.max_steps;
        Integrator::Explicit(dp)
    }
}

struct Region<'a> {
    side: Side,
    nc: &'a NullclineData,
    a: f64,
    w0: f64,
    slack: f64,
}

impl Region<'_> {
    /// Name of the violated boundary, if any. `z` is `W - w0`.
    fn violation(&self, v: f64, w: f64, z: f64, near_node: bool) -> Option<&'static str> {
        let s = self.slack;
        if !(w <= s) {
            return Some("W = 0");
        }
        match self.side {
            Side::Flat => {
                if !(v < self.a) {
                    return Some("V = a");
                }
                if !(v > 0.0) {
                    return Some("V = 0");
                }
                let below = if near_node {
                    z < self.nc.w1_minus_w0(v, self.w0) - s
                } else {
                    w < self.nc.w1(v) - s
                };
                below.then_some("W = W1(V)")
            }
            Side::Sharp => {
                if !(v > -self.a) {
                    return Some("V = -a");
                }
                if !(v < 0.0) {
                    return Some("V = 0");
                }
                let vbar = self.nc.vbar;
                let floor_at = if v <= vbar { v } else { vbar };
                let below = if near_node {
                    z < self.nc.w1_minus_w0(floor_at, self.w0) - s
                } else {
                    w < self.nc.w1(floor_at) - s
                };
                below.then_some(if v <= vbar { "W = W1(V)" } else { "W = W1(V̄)" })
            }
        }
    }
}

enum Stop {
    Fail(Error),
    /// Containment lost on the very first step: the start offset is too large.
    FirstStep(Error),
}

fn ode_error(side: Side, e: OdeError<Stop, 2>, to_vw: impl Fn([f64; 2]) -> [f64; 2]) -> Stop {
    let integration = |reason: &str, t: f64, y: [f64; 2]| {
        let [v, w] = to_vw(y);
        Error::Integration {
            side,
            reason: reason.to_string(),
            eta: t,
            v,
            w,
        }
    };
    match e {
        OdeError::Observer(s) => s,
        OdeError::StepTooSmall { t, y, h } => {
            Stop::Fail(integration(&format!("step size underflow (h = {h:.3e})"), t, y))
        }
        OdeError::MaxSteps { t, y } => Stop::Fail(integration("step budget exhausted", t, y)),
        OdeError::NonFinite { t, y } => Stop::Fail(integration("non-finite state", t, y)),
    }
}

/// Follow the unstable manifold of `(a, 0)` (flat) or `(-a, 0)` (sharp)
/// into the node.
pub fn integrate_manifold(
    sys: &ReducedSystem,
    report: &EquilibriumReport,
    side: Side,
    opts: &ManifoldOptions,
) -> Result<Trajectory> {
    let nc = nullclines(sys)?;
    integrate_manifold_with(sys, report, &nc, side, opts)
}

pub fn integrate_manifold_with(
    sys: &ReducedSystem,
    report: &EquilibriumReport,
    nc: &NullclineData,
    side: Side,
    opts: &ManifoldOptions,
) -> Result<Trajectory> {
    let mut offset = opts.start_offset * sys.a;
    let mut last_err = None;
    for _ in 0..=opts.max_halvings {
        match attempt(sys, report, nc, side, opts, offset) {
            Ok(t) => return Ok(t),
            Err(Stop::Fail(e)) => return Err(e),
            Err(Stop::FirstStep(e)) => {
                last_err = Some(e);
                offset *= 0.5;
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn attempt(
    sys: &ReducedSystem,
    report: &EquilibriumReport,
    nc: &NullclineData,
    side: Side,
    opts: &ManifoldOptions,
    offset: f64,
) -> std::result::Result<Trajectory, Stop> {
    let a = sys.a;
    let w0 = report.w0;
    let scale = a.max(w0.abs());
    let region = Region {
        side,
        nc,
        a,
        w0,
        slack: opts.containment_slack * scale,
    };

    // Inward-pointing unit eigenvector.
    let (anchor, x_start, w_start) = match side {
        Side::Flat => {
            let n = report.r2[0].hypot(report.r2[1]);
            (a, -offset * report.r2[0] / n, -offset * report.r2[1] / n)
        }
        Side::Sharp => {
            let n = report.big_r2[0].hypot(report.big_r2[1]);
            (-a, -offset * report.big_r2[0] / n, -offset * report.big_r2[1] / n)
        }
    };
    let v_start = anchor + x_start;
    if let Some(boundary) = region.violation(v_start, w_start, w_start - w0, false) {
        return Err(Stop::FirstStep(Error::Containment {
            side,
            boundary,
            eta: 0.0,
            v: v_start,
            w: w_start,
        }));
    }

    let floors = [opts.atol * opts.terminal_tol * a, opts.atol * opts.terminal_tol * w0.abs()];
    let dp = integrator(report, side, opts, floors);

    let mut samples = vec![TrajectorySample {
        eta: 0.0,
        v: v_start,
        w: w_start,
        z: w_start - w0,
    }];
    let mut stats = IntegrationStats {
        accepted: 0,
        rejected: 0,
    };

    let monotone = |prev: f64, v: f64| match side {
        Side::Flat => v < prev,
        Side::Sharp => v > prev,
    };

    // Phase 1: direct form until |V| <= a/2.
    let direct = Direct {
        sys,
        anchor,
        max_dxi: opts.max_dxi,
    };
    let mut prev_x = x_start;
    let slow = 1.0 / report.mu2.max(report.nu2);
    let h0 = match dp {
        Integrator::Stiff(_) => slow * 1e-2,
        Integrator::Explicit(_) => slow.min(1.0 / sys.f0()) * 1e-2,
    };
    let res = dp.integrate(&direct, 0.0, [x_start, w_start], h0, |t, y, _| {
        let first = samples.len() == 1;
        let v = anchor + y[0];
        if let Some(boundary) = region.violation(v, y[1], y[1] - w0, false) {
            let e = Error::Containment {
                side,
                boundary,
                eta: t,
                v,
                w: y[1],
            };
            return Err(if first { Stop::FirstStep(e) } else { Stop::Fail(e) });
        }
        if !monotone(prev_x, y[0]) {
            return Err(Stop::Fail(Error::NonMonotone {
                side,
                index: samples.len(),
            }));
        }
        prev_x = y[0];
        samples.push(TrajectorySample {
            eta: t,
            v,
            w: y[1],
            z: y[1] - w0,
        });
        Ok(if v.abs() <= 0.5 * a {
            Flow::Stop
        } else {
            Flow::Continue
        })
    });
    let (t1, y1, st) = res.map_err(|e| ode_error(side, e, |y| [anchor + y[0], y[1]]))?;
    let y1 = [anchor + y1[0], y1[1]];
    stats.accepted += st.accepted;
    stats.rejected += st.rejected;

    // Phase 2: node frame until the terminal tolerance is met.
    let node = NodeFrame {
        sys,
        w0,
        max_dxi: opts.max_dxi,
    };
    let terminal = opts.terminal_tol * scale;
    let h1 = samples
        .windows(2)
        .last()
        .map(|p| p[1].eta - p[0].eta)
        .unwrap_or(h0);
    let res = dp.integrate(&node, t1, [y1[0], y1[1] - w0], h1, |t, y, _| {
        let prev = samples.last().unwrap();
        let w = w0 + y[1];
        if let Some(boundary) = region.violation(y[0], w, y[1], true) {
            return Err(Stop::Fail(Error::Containment {
                side,
                boundary,
                eta: t,
                v: y[0],
                w,
            }));
        }
        if !monotone(prev.v, y[0]) {
            return Err(Stop::Fail(Error::NonMonotone {
                side,
                index: samples.len(),
            }));
        }
        samples.push(TrajectorySample {
            eta: t,
            v: y[0],
            w,
            z: y[1],
        });
        Ok(if y[0].hypot(y[1]) <= terminal {
            Flow::Stop
        } else {
            Flow::Continue
        })
    });
    let (_, y2, st) = res.map_err(|e| ode_error(side, e, |y| [y[0], w0 + y[1]]))?;
    stats.accepted += st.accepted;
    stats.rejected += st.rejected;

    Ok(Trajectory {
        side,
        samples,
        terminal_error: y2[0].hypot(y2[1]),
        start_offset: offset,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{shock_from_amplitude, GasConstants, GasState};
    use crate::poly::Polynomial;
    use crate::reduced::{build_reduced, equilibria, SystemOrigin};

    fn desk() -> ReducedSystem {
        let consts = GasConstants::with_gamma(1.4).unwrap();
        let left = GasState::new(1.0, 0.0, 1.0).unwrap();
        build_reduced(&shock_from_amplitude(&left, &consts, 1e-3).unwrap()).unwrap()
    }

    #[test]
    fn flat_side_reaches_node() {
        let sys = desk();
        let rep = equilibria(&sys).unwrap();
        let t = integrate_manifold(&sys, &rep, Side::Flat, &ManifoldOptions::default()).unwrap();
        let scale = sys.a.max(rep.w0.abs());
        assert!(t.terminal_error <= 1e-10 * scale);
        assert!(t.v_strictly_monotone());
        assert!(t.w_strictly_decreasing());
        assert!(t.samples.iter().all(|s| s.w < 0.0 && s.v > 0.0 && s.v < sys.a));
        let slope = t.terminal_slope(sys.a, 1e-8, 1e-5).unwrap();
        assert!((slope / rep.tangency_slope() - 1.0).abs() < 1e-6, "{slope} vs {}", rep.tangency_slope());
    }

    #[test]
    fn sharp_side_has_one_turning_point() {
        let sys = desk();
        let rep = equilibria(&sys).unwrap();
        let t = integrate_manifold(&sys, &rep, Side::Sharp, &ManifoldOptions::default()).unwrap();
        assert!(t.v_strictly_monotone());
        assert_eq!(t.w_turning_points(), 1);
        assert!(t.samples.iter().all(|s| s.w < 0.0 && s.v < 0.0 && s.v > -sys.a));
        let slope = t.terminal_slope(sys.a, 1e-8, 1e-5).unwrap();
        assert!((slope / rep.tangency_slope() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn exponential_convergence_at_slow_rate() {
        let sys = desk();
        let rep = equilibria(&sys).unwrap();
        let t = integrate_manifold(&sys, &rep, Side::Flat, &ManifoldOptions::default()).unwrap();
        let scale = sys.a.max(rep.w0.abs());
        let rate = t.convergence_rate(scale, 1e-9, 1e-4).unwrap();
        assert!((rate / rep.lambda1 - 1.0).abs() < 1e-2, "{rate} vs {}", rep.lambda1);
    }

    #[test]
    fn baby_sides_are_mirror_images() {
        let sys = ReducedSystem::new(0.5, Polynomial::constant(1.0), SystemOrigin::Baby).unwrap();
        let rep = equilibria(&sys).unwrap();
        let opts = ManifoldOptions::default();
        let flat = integrate_manifold(&sys, &rep, Side::Flat, &opts).unwrap();
        let sharp = integrate_manifold(&sys, &rep, Side::Sharp, &opts).unwrap();
        assert_eq!(flat.samples.len(), sharp.samples.len());
        for (p, q) in flat.samples.iter().zip(&sharp.samples) {
            assert_eq!(p.v, -q.v);
            assert_eq!(p.w, q.w);
        }
    }

    #[test]
    fn oversized_offset_is_halved() {
        let sys = ReducedSystem::new(0.5, Polynomial::constant(1.0), SystemOrigin::Baby).unwrap();
        let rep = equilibria(&sys).unwrap();
        let opts = ManifoldOptions {
            start_offset: 3.0,
            ..Default::default()
        };
        let t = integrate_manifold(&sys, &rep, Side::Flat, &opts).unwrap();
        assert!(t.start_offset < 3.0 * sys.a);
    }
}
