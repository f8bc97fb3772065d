//! Expansion `w = Σ w_k v̂^k` of the profile derivative near `v̂ = 0` and
//! its comparison with the computed profile.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::GasConstants;
use crate::glue::Profile;
use crate::reduced::ReducedSystem;

/// Largest regularity order reported; larger orders are reported as this cap.
pub const REGULARITY_CAP: usize = 64;

/// `(4 + √7) / 3 = (√7 + 1) / (√7 - 1)`.
pub const GAMMA_THRESHOLD: f64 = 2.2152504370215302;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoeffs {
    pub order: usize,
    /// `w_0 ..= w_{n+1}`.
    pub w: Vec<f64>,
    /// `b_0 ..= b_n`.
    pub b: Vec<f64>,
    /// `f(0) + (k+2) w0` for `k = 1 ..= n+1`.
    pub denominators: Vec<f64>,
}

impl ExpansionCoeffs {
    /// `Σ_{i<=k} w_i x^i`.
    pub fn partial_sum(&self, k: usize, x: f64) -> f64 {
        self.w[..=k].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Coefficients up to order `n`, i.e. `w_0 ..= w_{n+1}`.
pub fn expansion_coeffs(sys: &ReducedSystem, n: usize) -> Result<ExpansionCoeffs> {
    let w0 = sys.w0()?;
    let f0 = sys.f0();
    let fk = |i: usize| sys.f.taylor_at_zero(i);
    let denom = |k: usize| f0 + (k as f64 + 2.0) * w0;

    let max_order = (1..=REGULARITY_CAP + 2).take_while(|&k| denom(k) > 0.0).last().map(|k| k - 1);
    if let Some(k) = (1..=n + 1).find(|&k| !(denom(k) > 0.0)) {
        return Err(Error::ExpansionOrder {
            requested: n,
            failed_k: k,
            max_order,
        });
    }

    let mut w = vec![w0];
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let bk = match k {
            0 => -fk(1) * w0,
            1 => 0.5 - 2.0 * w[1] * w[1] - fk(1) * w[1] - fk(2) * w0,
            _ => {
                let s1: f64 = (1..=k + 1).map(|i| fk(i) * w[k + 1 - i]).sum();
                let s2: f64 = (1..=k).map(|i| (i as f64 + 1.0) * w[i] * w[k + 1 - i]).sum();
                -s1 - s2
            }
        };
        b.push(bk);
        w.push(bk / denom(k + 1));
    }
    Ok(ExpansionCoeffs {
        order: n,
        w,
        b,
        denominators: (1..=n + 1).map(denom).collect(),
    })
}

/// Largest `n` with `f(0) + (n+4) w0 > 0`, clamped to `[0, REGULARITY_CAP]`.
pub fn regularity_order(sys: &ReducedSystem) -> Result<usize> {
    let w0 = sys.w0()?;
    let f0 = sys.f0();
    Ok((0..=REGULARITY_CAP)
        .rev()
        .find(|&n| f0 + (n as f64 + 4.0) * w0 > 0.0)
        .unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCondition {
    pub satisfied: bool,
    /// `threshold - γ`.
    pub margin: f64,
    pub threshold: f64,
}

pub fn gamma_condition(consts: &GasConstants) -> GammaCondition {
    let g = consts.gamma;
    GammaCondition {
        satisfied: g > 1.0 && g < GAMMA_THRESHOLD,
        margin: GAMMA_THRESHOLD - g,
        threshold: GAMMA_THRESHOLD,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Window `|v̂| / a ∈ [lo, hi]`.
    pub lo: f64,
    pub hi: f64,
    /// Relative size of the sample noise in `w - w0`.
    pub noise: f64,
    pub min_samples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 1e-1,
            noise: 1e-9,
            min_samples: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderTrend {
    pub k: usize,
    /// Least-squares slope of `ln |r_k|` against `ln |v̂|`; positive when the
    /// remainder vanishes with `v̂`.
    pub slope: f64,
    /// Median `|r_k|` per half-decade bin, from large to small `|v̂|`.
    pub bins: Vec<f64>,
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFitReport {
    /// Least-squares `w_1 ..= w_4` from a cubic fit of `(w - w0)/v̂`.
    pub fitted: Vec<f64>,
    pub samples: usize,
    pub remainders: Vec<RemainderTrend>,
}

impl ExpansionFitReport {
    pub fn all_decreasing(&self) -> bool {
        self.remainders.iter().all(|r| r.decreasing)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Compare the profile near `ξ = 0` with the expansion coefficients.
pub fn expansion_fit(
    profile: &Profile,
    coeffs: &ExpansionCoeffs,
    opts: &FitOptions,
) -> Result<ExpansionFitReport> {
    let a = profile.meta.a;
    let w0 = profile.meta.w0;
    let pts: Vec<(f64, f64)> = profile
        .v_hat
        .iter()
        .zip(&profile.z)
        .filter(|(v, _)| v.abs() >= opts.lo * a && v.abs() <= opts.hi * a)
        .map(|(&v, &z)| (v, z))
        .collect();
    let pos = pts.iter().filter(|p| p.0 > 0.0).count();
    let neg = pts.len() - pos;
    if pos < opts.min_samples || neg < opts.min_samples {
        return Err(Error::InsufficientSamples(format!(
            "{pos}/{neg} samples with |v̂|/a in [{:e}, {:e}]; refine the grid near 0",
            opts.lo, opts.hi
        )));
    }

    // (w - w0)/v̂ = Σ_{k=1}^{4} w_k v̂^{k-1}, fitted in x = v̂/a
    let m = pts.len();
    let x = DMatrix::from_fn(m, 4, |i, j| (pts[i].0 / a).powi(j as i32));
    let y = DVector::from_fn(m, |i, _| pts[i].1 / pts[i].0);
    let sol = x
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InsufficientSamples(e.to_string()))?;
    let fitted: Vec<f64> = (0..4).map(|j| sol[j] / a.powi(j as i32)).collect();

    let mut remainders = Vec::new();
    for k in 0..coeffs.w.len() {
        let r: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(v, z)| {
                // w - Σ_{i<=k} w_i v̂^i = z - v̂ Σ_{1<=i<=k} w_i v̂^{i-1}
                let s: f64 = coeffs.w[1..=k].iter().rev().fold(0.0, |acc, &c| acc * v + c);
                (v.abs(), (z - v * s) / v.abs().powi(k as i32))
            })
            .collect();
        let logs: Vec<(f64, f64)> = r
            .iter()
            .filter(|p| p.1 != 0.0)
            .map(|p| (p.0.ln(), p.1.abs().ln()))
            .collect();
        let slope = if logs.len() >= 2 {
            let n = logs.len() as f64;
            let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
            let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            sxy / sxx
        } else {
            f64::NAN
        };

        // half-decade bins over the last decade, large |v̂| first
        let decade_lo = opts.lo * a;
        let edges: Vec<f64> = (0..=2).map(|i| decade_lo * 10f64.powf(1.0 - 0.5 * i as f64)).collect();
        let mut bins = Vec::new();
        for e in edges.windows(2) {
            let mut vals: Vec<f64> = r
                .iter()
                .filter(|p| p.0 <= e[0] && p.0 >= e[1])
                .map(|p| p.1.abs())
                .collect();
            if !vals.is_empty() {
                bins.push(median(&mut vals));
            }
        }
        let floor = |bin: usize| {
            let v = edges[bin + 1];
            opts.noise * w0.abs() / v.powi(k as i32)
        };
        let decreasing = bins
            .windows(2)
            .enumerate()
            .all(|(i, p)| p[1] <= p[0] || p[1] <= floor(i + 1));
        remainders.push(RemainderTrend {
            k,
            slope,
            bins,
            decreasing,
        });
    }

    Ok(ExpansionFitReport {
        fitted,
        samples: m,
        remainders,
    })
}
