//! Zero set of the second component of the vector field and the hypotheses
//! under which the trapping regions for the two trajectories exist.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::reduced::ReducedSystem;

/// Grid size for the sign scans.
pub const SCAN_POINTS: usize = 1001;

const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone)]
pub struct NullclineData {
    sys: ReducedSystem,
    f_prime: Polynomial,
    /// Unique minimiser of `W1` on `(-a, 0)`.
    pub vbar: f64,
    /// Set when `f'` vanishes identically, so that `W1' ∝ V` and the
    /// minimiser sits at the boundary `V = 0`.
    pub vbar_degenerate: bool,
}

impl NullclineData {
    pub fn a(&self) -> f64 {
        self.sys.a
    }

    /// `Δ(V) = f(V)^2 + 2(V^2 - a^2)`.
    pub fn delta(&self, v: f64) -> f64 {
        let f = self.sys.f(v);
        let a = self.sys.a;
        f * f + 2.0 * (v - a) * (v + a)
    }

    /// Upper root `(-f + sqrt Δ) / 2`, evaluated as `(V^2 - a^2) / (f + sqrt Δ)`.
    pub fn w1(&self, v: f64) -> f64 {
        let a = self.sys.a;
        (v - a) * (v + a) / (self.sys.f(v) + self.delta(v).sqrt())
    }

    /// Lower root `-f - W1`.
    pub fn w2(&self, v: f64) -> f64 {
        -self.sys.f(v) - self.w1(v)
    }

    /// `W1'(V) = (V - W1 f'(V)) / sqrt Δ`.
    pub fn w1_prime(&self, v: f64) -> f64 {
        self.numerator(v) / self.delta(v).sqrt()
    }

    /// `W1(V) - w0` without cancellation, given `w0 = W1(0)`.
    pub fn w1_minus_w0(&self, v: f64, w0: f64) -> f64 {
        let w1 = self.w1(v);
        let df = self.sys.f.eval_increment(v);
        (0.5 * v * v - df * w1) / (w1 + w0 + self.sys.f0())
    }

    fn numerator(&self, v: f64) -> f64 {
        v - self.w1(v) * self.f_prime.eval(v)
    }

    /// `W1(V̄)`, the lower bound of the sharp-side trapping region.
    pub fn w1_min(&self) -> f64 {
        self.w1(self.vbar)
    }
}

fn grid(a: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -a + 2.0 * a * k as f64 / (n - 1) as f64)
}

pub fn nullclines(sys: &ReducedSystem) -> Result<NullclineData> {
    let a = sys.a;
    let f_prime = sys.f.derivative();
    let mut data = NullclineData {
        sys: sys.clone(),
        f_prime,
        vbar: 0.0,
        vbar_degenerate: false,
    };

    for v in grid(a, SCAN_POINTS) {
        let d = data.delta(v);
        if !(d > 0.0) {
            return Err(Error::Hypothesis(format!(
                "Δ(V) = {d:.3e} <= 0 at V = {v:.6e}"
            )));
        }
        if !(sys.f(v) > 0.0) {
            return Err(Error::Hypothesis(format!("f(V) <= 0 at V = {v:.6e}")));
        }
    }

    if data.f_prime.is_zero() {
        data.vbar_degenerate = true;
        return Ok(data);
    }

    // N(-a) = -a < 0; exactly one sign change is expected, inside (-a, 0).
    let pts: Vec<f64> = grid(a, SCAN_POINTS).collect();
    let signs: Vec<bool> = pts.iter().map(|&v| data.numerator(v) > 0.0).collect();
    let changes: Vec<usize> = (1..pts.len()).filter(|&k| signs[k] != signs[k - 1]).collect();
    if changes.len() != 1 || pts[changes[0]] > 0.0 {
        return Err(Error::Hypothesis(format!(
            "W1' changes sign {} times on [-a, a]; expected once in (-a, 0)",
            changes.len()
        )));
    }
    let (mut lo, mut hi) = (pts[changes[0] - 1], pts[changes[0]].min(0.0));
    if data.numerator(hi) <= 0.0 {
        return Err(Error::Hypothesis("W1'(0) <= 0".into()));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if data.numerator(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    data.vbar = 0.5 * (lo + hi);
    Ok(data)
}

/// Runtime check of every hypothesis of the existence argument, in the
/// order in which they typically fail as the amplitude grows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub discriminant: f64,
    /// `f(0) + 3 w0`, positive iff the node eigenvalues are ordered.
    pub node_margin: f64,
    pub delta_min: f64,
    pub f_min: f64,
    pub f_prime_min: f64,
    pub vbar: Option<f64>,
    /// `min over [V̄, 0] of W1(V̄) - W2(V)`, positive when the sharp-side
    /// region is trapping.
    pub w2_margin: Option<f64>,
    pub first_failure: Option<String>,
}

pub fn check_hypotheses(sys: &ReducedSystem) -> HypothesisReport {
    let a = sys.a;
    let fp = sys.f.derivative();
    let discriminant = sys.discriminant();
    let mut delta_min = f64::INFINITY;
    let mut f_min = f64::INFINITY;
    let mut f_prime_min = f64::INFINITY;
    for v in grid(a, SCAN_POINTS) {
        let f = sys.f(v);
        delta_min = delta_min.min(f * f + 2.0 * (v * v - a * a));
        f_min = f_min.min(f);
        f_prime_min = f_prime_min.min(fp.eval(v));
    }
    let node_margin = sys
        .w0()
        .map(|w0| sys.f0() + 3.0 * w0)
        .unwrap_or(f64::NAN);

    let mut report = HypothesisReport {
        discriminant,
        node_margin,
        delta_min,
        f_min,
        f_prime_min,
        vbar: None,
        w2_margin: None,
        first_failure: None,
    };

    let fail = |msg: String| Some(msg);
    if !(discriminant > 0.0) {
        report.first_failure = fail(format!("discriminant f(0)^2 - 2a^2 = {discriminant:.3e}"));
        return report;
    }
    if !(node_margin > 0.0) {
        report.first_failure = fail(format!("node ordering f(0) + 3 w0 = {node_margin:.3e}"));
        return report;
    }
    if !(f_min > 0.0) {
        report.first_failure = fail(format!("min f = {f_min:.3e}"));
        return report;
    }
    if !fp.is_zero() && !(f_prime_min > 0.0) {
        report.first_failure = fail(format!("min f' = {f_prime_min:.3e}"));
        return report;
    }
    let nc = match nullclines(sys) {
        Ok(nc) => nc,
        Err(e) => {
            report.first_failure = fail(e.to_string());
            return report;
        }
    };
    report.vbar = Some(nc.vbar);
    let w1_min = nc.w1_min();
    let n = 200;
    let margin = (0..=n)
        .map(|k| nc.vbar * (1.0 - k as f64 / n as f64))
        .map(|v| w1_min - nc.w2(v))
        .fold(f64::INFINITY, f64::min);
    report.w2_margin = Some(margin);
    if !(margin > 0.0) {
        report.first_failure = fail(format!("W2 reaches W1(V̄) on [V̄, 0], margin {margin:.3e}"));
    }
    report
}
