//! Adaptive one-step integrators: explicit Dormand-Prince 5(4) and a
//! linearly implicit Rosenbrock 4(3) method for stiff stretches.

use nalgebra::{DMatrix, DVector};

/// Autonomous or non-autonomous first-order system of dimension `N`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];

    /// Upper bound on the next step from state `y`.
    fn max_step(&self, _y: &[f64; N]) -> f64 {
        f64::INFINITY
    }

    /// Jacobian `∂f/∂y` (row-major). Finite differences are used when absent.
    fn jacobian(&self, _t: f64, _y: &[f64; N]) -> Option<[[f64; N]; N]> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError<E, const N: usize> {
    StepTooSmall { t: f64, y: [f64; N], h: f64 },
    MaxSteps { t: f64, y: [f64; N] },
    NonFinite { t: f64, y: [f64; N] },
    Observer(E),
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct DormandPrince<const N: usize> {
    pub rtol: f64,
    /// Per-component absolute error floor.
    pub atol: [f64; N],
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl<const N: usize> DormandPrince<N> {
    pub fn new(rtol: f64, atol: [f64; N]) -> Self {
        Self {
            rtol,
            atol,
            h_min: 0.0,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }

    /// Integrate forward from `(t0, y0)` with trial step `h0`, calling
    /// `observe(t, y, dy/dt)` after every accepted step until it returns
    /// [`Flow::Stop`]. Returns the final time and state.
    pub fn integrate<S, F, E>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        h0: f64,
        mut observe: F,
    ) -> Result<(f64, [f64; N], IntegrationStats), OdeError<E, N>>
    where
        S: OdeSystem<N>,
        F: FnMut(f64, &[f64; N], &[f64; N]) -> Result<Flow, E>,
    {
        const SAFETY: f64 = 0.9;
        const BETA: f64 = 0.04;
        const EXPO1: f64 = 0.2 - BETA * 0.75;
        const FAC_MIN: f64 = 0.2;
        const FAC_MAX: f64 = 10.0;

        let mut t = t0;
        let mut y = y0;
        let mut k1 = sys.rhs(t, &y);
        let mut h = h0.abs().min(self.h_max).min(sys.max_step(&y));
        let mut err_old: f64 = 1e-4;
        let mut last_rejected = false;
        let mut stats = IntegrationStats {
            accepted: 0,
            rejected: 0,
        };

        loop {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(OdeError::MaxSteps { t, y });
            }
            if !(h > self.h_min) || t + h == t {
                return Err(OdeError::StepTooSmall { t, y, h });
            }

            let k2 = sys.rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = sys.rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = sys.rhs(
                t + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = sys.rhs(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = sys.rhs(
                t + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = sys.rhs(t + h, &y_new);

            let mut err = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = self.atol[i] + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();

            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                stats.rejected += 1;
                last_rejected = true;
                h *= FAC_MIN;
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(OdeError::NonFinite { t, y });
                }
                continue;
            }

            let fac11 = err.powf(EXPO1);
            if err <= 1.0 {
                let fac = (fac11 / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_next = h / fac;
                if last_rejected {
                    h_next = h_next.min(h);
                }
                err_old = err.max(1e-4);
                t += h;
                y = y_new;
                k1 = k7;
                stats.accepted += 1;
                last_rejected = false;
                match observe(t, &y, &k1) {
                    Ok(Flow::Continue) => {}
                    Ok(Flow::Stop) => return Ok((t, y, stats)),
                    Err(e) => return Err(OdeError::Observer(e)),
                }
                h = h_next.min(self.h_max).min(sys.max_step(&y));
            } else {
                stats.rejected += 1;
                last_rejected = true;
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
    }
}

/// Shampine's L-stable Rosenbrock 4(3) pair for autonomous systems.
#[derive(Debug, Clone)]
pub struct Rosenbrock<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

mod ros {
    pub const GAM: f64 = 0.5;
    pub const A21: f64 = 2.0;
    pub const A31: f64 = 48.0 / 25.0;
    pub const A32: f64 = 6.0 / 25.0;
    pub const C21: f64 = -8.0;
    pub const C31: f64 = 372.0 / 25.0;
    pub const C32: f64 = 12.0 / 5.0;
    pub const C41: f64 = -112.0 / 125.0;
    pub const C42: f64 = -54.0 / 125.0;
    pub const C43: f64 = -2.0 / 5.0;
    pub const B1: f64 = 19.0 / 9.0;
    pub const B2: f64 = 1.0 / 2.0;
    pub const B3: f64 = 25.0 / 108.0;
    pub const B4: f64 = 125.0 / 108.0;
    pub const E1: f64 = 17.0 / 54.0;
    pub const E2: f64 = 7.0 / 36.0;
    pub const E4: f64 = 125.0 / 108.0;
}

fn numerical_jacobian<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    f: &[f64; N],
) -> [[f64; N]; N] {
    let mut jac = [[0.0; N]; N];
    for j in 0..N {
        let dy = f64::EPSILON.sqrt() * y[j].abs().max(1e-8);
        let mut yp = *y;
        yp[j] += dy;
        let fp = sys.rhs(t, &yp);
        for i in 0..N {
            jac[i][j] = (fp[i] - f[i]) / dy;
        }
    }
    jac
}

impl<const N: usize> Rosenbrock<N> {
    pub fn new(rtol: f64, atol: [f64; N]) -> Self {
        Self {
            rtol,
            atol,
            h_min: 0.0,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }

    /// Same contract as [`DormandPrince::integrate`]. The system is treated
    /// as autonomous.
    pub fn integrate<S, F, E>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        h0: f64,
        mut observe: F,
    ) -> Result<(f64, [f64; N], IntegrationStats), OdeError<E, N>>
    where
        S: OdeSystem<N>,
        F: FnMut(f64, &[f64; N], &[f64; N]) -> Result<Flow, E>,
    {
        use ros::*;
        const SAFETY: f64 = 0.9;
        const FAC_MIN: f64 = 0.2;
        const FAC_MAX: f64 = 5.0;

        let mut t = t0;
        let mut y = y0;
        let mut f0 = sys.rhs(t, &y);
        let mut h = h0.abs().min(self.h_max).min(sys.max_step(&y));
        let mut last_rejected = false;
        let mut stats = IntegrationStats {
            accepted: 0,
            rejected: 0,
        };
        let solve_vec = |lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
                         b: [f64; N]|
         -> Option<[f64; N]> {
            let x = lu.solve(&DVector::from_column_slice(&b))?;
            let mut out = [0.0; N];
            out.copy_from_slice(x.as_slice());
            Some(out)
        };

        let mut jac = sys.jacobian(t, &y).unwrap_or_else(|| numerical_jacobian(sys, t, &y, &f0));
        loop {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(OdeError::MaxSteps { t, y });
            }
            if !(h > self.h_min) || t + h == t {
                return Err(OdeError::StepTooSmall { t, y, h });
            }

            let m = DMatrix::<f64>::from_fn(N, N, |i, j| {
                let d = if i == j { 1.0 / (GAM * h) } else { 0.0 };
                d - jac[i][j]
            });
            let lu = m.lu();
            let stages = (|| {
                let g1 = solve_vec(&lu, f0)?;
                let y2 = std::array::from_fn(|i| y[i] + A21 * g1[i]);
                let f2 = sys.rhs(t + h, &y2);
                let g2 = solve_vec(&lu, std::array::from_fn(|i| f2[i] + C21 * g1[i] / h))?;
                let y3 = std::array::from_fn(|i| y[i] + A31 * g1[i] + A32 * g2[i]);
                let f3 = sys.rhs(t + h, &y3);
                let g3 = solve_vec(
                    &lu,
                    std::array::from_fn(|i| f3[i] + (C31 * g1[i] + C32 * g2[i]) / h),
                )?;
                let g4 = solve_vec(
                    &lu,
                    std::array::from_fn(|i| f3[i] + (C41 * g1[i] + C42 * g2[i] + C43 * g3[i]) / h),
                )?;
                Some((g1, g2, g3, g4))
            })();

            let accepted = stages.and_then(|(g1, g2, g3, g4)| {
                let y_new: [f64; N] =
                    std::array::from_fn(|i| y[i] + B1 * g1[i] + B2 * g2[i] + B3 * g3[i] + B4 * g4[i]);
                let mut err = 0.0;
                for i in 0..N {
                    let e = E1 * g1[i] + E2 * g2[i] + E4 * g4[i];
                    let sc = self.atol[i] + self.rtol * y[i].abs().max(y_new[i].abs());
                    err += (e / sc) * (e / sc);
                }
                let err = (err / N as f64).sqrt();
                (err.is_finite() && y_new.iter().all(|v| v.is_finite())).then_some((y_new, err))
            });

            match accepted {
                Some((y_new, err)) if err <= 1.0 => {
                    let mut h_next = h * (SAFETY * err.max(1e-12).powf(-0.25)).clamp(FAC_MIN, FAC_MAX);
                    if last_rejected {
                        h_next = h_next.min(h);
                    }
                    t += h;
                    y = y_new;
                    f0 = sys.rhs(t, &y);
                    stats.accepted += 1;
                    last_rejected = false;
                    match observe(t, &y, &f0) {
                        Ok(Flow::Continue) => {}
                        Ok(Flow::Stop) => return Ok((t, y, stats)),
                        Err(e) => return Err(OdeError::Observer(e)),
                    }
                    jac = sys.jacobian(t, &y).unwrap_or_else(|| numerical_jacobian(sys, t, &y, &f0));
                    h = h_next.min(self.h_max).min(sys.max_step(&y));
                }
                Some((_, err)) => {
                    stats.rejected += 1;
                    last_rejected = true;
                    h *= (SAFETY * err.powf(-1.0 / 3.0)).max(FAC_MIN);
                }
                None => {
                    stats.rejected += 1;
                    last_rejected = true;
                    h *= FAC_MIN;
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(OdeError::NonFinite { t, y });
                    }
                }
            }
        }
    }
}

/// Either integrator behind one call.
#[derive(Debug, Clone)]
pub enum Integrator<const N: usize> {
    Explicit(DormandPrince<N>),
    Stiff(Rosenbrock<N>),
}

impl<const N: usize> Integrator<N> {
    pub fn integrate<S, F, E>(
        &self,
        sys: &S,
        t0: f64,
        y0: [f64; N],
        h0: f64,
        observe: F,
    ) -> Result<(f64, [f64; N], IntegrationStats), OdeError<E, N>>
    where
        S: OdeSystem<N>,
        F: FnMut(f64, &[f64; N], &[f64; N]) -> Result<Flow, E>,
    {
        match self {
            Integrator::Explicit(dp) => dp.integrate(sys, t0, y0, h0, observe),
            Integrator::Stiff(rb) => rb.integrate(sys, t0, y0, h0, observe),
        }
    }
}
