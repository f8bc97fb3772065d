//! `q = ½ ∫ e^{-|ξ-y|} sgn(ξ-y) g(y) dy` for piecewise-linear `g`.
//!
//! The kernel is integrated exactly against the linear interpolant of `g` on
//! every cell, and `g` is extended by its end values beyond the grid. Two
//! exponential sweeps give the flux at all grid points in `O(N)`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::glue::KERNEL_PADDING;

fn check_grid(xi: &[f64], g: &[f64]) -> Result<()> {
    if xi.len() != g.len() {
        return Err(Error::Domain(format!(
            "grid has {} points but data has {}",
            xi.len(),
            g.len()
        )));
    }
    if xi.len() < 2 {
        return Err(Error::InsufficientSamples("convolution needs two grid points".into()));
    }
    if xi.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Weights `(α, β)` with `∫_0^h e^{-(h-s)} (g0 + (g1-g0) s/h) ds = α g0 + β g1`.
#[inline]
fn cell_weights(h: f64) -> (f64, f64) {
    let e1 = -(-h).exp_m1();
    let beta = if h < 1e-3 {
        // 1 - (1 - e^{-h})/h, by its series
        h * (0.5 - h * (1.0 / 6.0 - h * (1.0 / 24.0 - h / 120.0)))
    } else {
        1.0 - e1 / h
    };
    (e1 - beta, beta)
}

/// Flux at every grid point.
pub fn kernel_flux(xi: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    check_grid(xi, g)?;
    let n = xi.len();
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    left[0] = g[0];
    for k in 0..n - 1 {
        let h = xi[k + 1] - xi[k];
        let (alpha, beta) = cell_weights(h);
        left[k + 1] = (-h).exp() * left[k] + alpha * g[k] + beta * g[k + 1];
    }
    right[n - 1] = g[n - 1];
    for k in (0..n - 1).rev() {
        let h = xi[k + 1] - xi[k];
        let (alpha, beta) = cell_weights(h);
        right[k] = (-h).exp() * right[k + 1] + alpha * g[k + 1] + beta * g[k];
    }
    Ok(left.iter().zip(&right).map(|(l, r)| 0.5 * (l - r)).collect())
}

/// Indices of the grid points at least `padding` away from both ends.
pub fn padded_window(xi: &[f64], padding: f64) -> Result<Range<usize>> {
    let (lo, hi) = match (xi.first(), xi.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::InsufficientSamples("empty grid".into())),
    };
    let start = xi.partition_point(|&x| x < lo + padding);
    let end = xi.partition_point(|&x| x <= hi - padding);
    if start >= end {
        return Err(Error::Padding {
            xi: 0.5 * (lo + hi),
            required: padding,
            available: 0.5 * (hi - lo),
        });
    }
    Ok(start..end)
}

/// Flux at a single point `x`, which must lie at least [`KERNEL_PADDING`]
/// inside the grid.
pub fn convolution_q(xi: &[f64], g: &[f64], x: f64) -> Result<f64> {
    check_grid(xi, g)?;
    let (lo, hi) = (xi[0], xi[xi.len() - 1]);
    let available = (x - lo).min(hi - x);
    if !(available >= KERNEL_PADDING) {
        return Err(Error::Padding {
            xi: x,
            required: KERNEL_PADDING,
            available,
        });
    }
    let k = xi.partition_point(|&t| t < x);
    if xi[k] == x {
        return Ok(kernel_flux(xi, g)?[k]);
    }
    let t = (x - xi[k - 1]) / (xi[k] - xi[k - 1]);
    let gx = g[k - 1] + t * (g[k] - g[k - 1]);
    let mut xs = xi.to_vec();
    let mut gs = g.to_vec();
    xs.insert(k, x);
    gs.insert(k, gx);
    Ok(kernel_flux(&xs, &gs)?[k])
}
