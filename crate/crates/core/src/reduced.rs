//! The planar reduced system
//!
//! ```text
//!     V' = V W
//!     W' = -W^2 - f(V) W + (V^2 - a^2) / 2
//! ```
//!
//! obtained from the traveling-wave equations after centring the velocity,
//! and its equilibria `(a, 0)`, `(-a, 0)` (saddles) and `(0, w0)` (node).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::ShockData;
use crate::poly::Polynomial;

/// Number of monomial coefficients of the gas polynomial `f` (degree 7).
pub const F_COEFFS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SystemOrigin {
    Gas {
        gamma: f64,
        r_gas: f64,
        j: f64,
        c1: f64,
    },
    /// Scalar radiating Burgers model (`f = 1`).
    Baby,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedSystem {
    pub a: f64,
    pub f: Polynomial,
    pub origin: SystemOrigin,
}

/// `f` expanded in monomials from its factored form.
pub fn gas_f_polynomial(gamma: f64, r_gas: f64, j: f64, c1: f64) -> Polynomial {
    let gp1 = gamma + 1.0;
    let scale = 4.0 * (gamma - 1.0) / (j * r_gas.powi(4) * gp1);
    let m = c1 / gp1;
    Polynomial::from_linear_factors(
        scale,
        &[
            (-1.0, m),
            (-1.0, m),
            (-1.0, m),
            (1.0, gamma * m),
            (1.0, gamma * m),
            (1.0, gamma * m),
            (2.0, (gamma - 1.0) * m),
        ],
    )
}

/// `f` evaluated directly from the product form.
pub fn gas_f_direct(gamma: f64, r_gas: f64, j: f64, c1: f64, v: f64) -> f64 {
    let gp1 = gamma + 1.0;
    let m = c1 / gp1;
    4.0 * (gamma - 1.0) / (j * r_gas.powi(4) * gp1)
        * (m - v).powi(3)
        * (v + gamma * m).powi(3)
        * (2.0 * v + (gamma - 1.0) * m)
}

impl ReducedSystem {
    pub fn new(a: f64, f: Polynomial, origin: SystemOrigin) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::Domain(format!("amplitude must be >= 0, got {a}")));
        }
        if a == 0.0 {
            return Err(Error::DegenerateAmplitude);
        }
        Ok(Self { a, f, origin })
    }

    pub fn f0(&self) -> f64 {
        self.f.eval(0.0)
    }

    pub fn f(&self, v: f64) -> f64 {
        self.f.eval(v)
    }

    pub fn f_coeffs(&self) -> Vec<f64> {
        self.f.coeffs_padded(F_COEFFS)
    }

    /// `f^(k)` as a polynomial; identically zero above the degree.
    pub fn f_derivative(&self, k: usize) -> Polynomial {
        self.f.nth_derivative(k)
    }

    /// `f(0)^2 - 2 a^2`, which must be positive for a smooth profile.
    pub fn discriminant(&self) -> f64 {
        let f0 = self.f0();
        f0 * f0 - 2.0 * self.a * self.a
    }

    pub fn check_discriminant(&self) -> Result<()> {
        let d = self.discriminant();
        if !(d > 0.0) {
            return Err(Error::NoSmoothProfile {
                f0: self.f0(),
                a: self.a,
                discriminant: d,
            });
        }
        Ok(())
    }

    /// Node ordinate `w0 = (-f(0) + sqrt(f(0)^2 - 2a^2)) / 2`, in the
    /// cancellation-free form `-a^2 / (f(0) + sqrt(...))`.
    pub fn w0(&self) -> Result<f64> {
        self.check_discriminant()?;
        Ok(-self.a * self.a / (self.f0() + self.discriminant().sqrt()))
    }

    /// Vector field of the desingularized system at `(V, W)`.
    pub fn vector_field(&self, v: f64, w: f64) -> [f64; 2] {
        [
            v * w,
            -w * w - self.f(v) * w + 0.5 * (v - self.a) * (v + self.a),
        ]
    }

    /// Jacobian of [`Self::vector_field`].
    pub fn jacobian(&self, v: f64, w: f64) -> [[f64; 2]; 2] {
        let fp = self.f.derivative().eval(v);
        [[w, v], [-fp * w + v, -2.0 * w - self.f(v)]]
    }
}

pub fn build_reduced(shock: &ShockData) -> Result<ReducedSystem> {
    let s = shock.as_one_shock();
    let c = s.consts;
    let f = gas_f_polynomial(c.gamma, c.r_gas, s.j, s.c1);
    let sys = ReducedSystem::new(
        s.a,
        f,
        SystemOrigin::Gas {
            gamma: c.gamma,
            r_gas: c.r_gas,
            j: s.j,
            c1: s.c1,
        },
    )?;
    sys.check_discriminant()?;
    Ok(sys)
}

/// Equilibria and their linearizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub f0: f64,
    pub f_prime0: f64,
    pub w0: f64,
    /// Saddle `(a, 0)`: `mu1 < 0 < mu2`.
    pub mu1: f64,
    pub mu2: f64,
    /// Saddle `(-a, 0)`: `nu1 < 0 < nu2`.
    pub nu1: f64,
    pub nu2: f64,
    /// Node `(0, w0)`: `lambda2 < lambda1 < 0`.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Unstable eigenvector at `(a, 0)`.
    pub r2: [f64; 2],
    /// Unstable eigenvector at `(-a, 0)`.
    #[serde(rename = "R2")]
    pub big_r2: [f64; 2],
    /// Slow eigenvector at the node.
    pub e1_0: [f64; 2],
    /// Lower-left entry `-f'(0) w0` of the node Jacobian.
    pub b0: f64,
}

impl EquilibriumReport {
    /// Limit slope `(W - w0) / V` of both trajectories at the node.
    pub fn tangency_slope(&self) -> f64 {
        self.b0 / (self.f0 + 3.0 * self.w0)
    }

    /// Common limit `w'(0)` of the glued profile.
    pub fn glue_derivative(&self) -> f64 {
        -self.f_prime0 * self.w0 * self.w0 / (self.f0 + 3.0 * self.w0)
    }
}

/// Unstable eigenvalue of `[[0, ±a], [±a, -fv]]`, i.e. positive root of
/// `x^2 + fv x - a^2`.
fn saddle_unstable(fv: f64, a: f64) -> f64 {
    2.0 * a * a / (fv + (fv * fv + 4.0 * a * a).sqrt())
}

pub fn equilibria(sys: &ReducedSystem) -> Result<EquilibriumReport> {
    let a = sys.a;
    let w0 = sys.w0()?;
    let f0 = sys.f0();
    let f_prime0 = sys.f.derivative().eval(0.0);

    let mu2 = saddle_unstable(sys.f(a), a);
    let nu2 = saddle_unstable(sys.f(-a), a);
    let lambda1 = w0;
    let lambda2 = -2.0 * w0 - f0;
    if !(lambda2 < lambda1 && lambda1 < 0.0) {
        return Err(Error::NodeOrdering { lambda1, lambda2 });
    }
    let b0 = -f_prime0 * w0;
    Ok(EquilibriumReport {
        f0,
        f_prime0,
        w0,
        mu1: -a * a / mu2,
        mu2,
        nu1: -a * a / nu2,
        nu2,
        lambda1,
        lambda2,
        r2: [a, mu2],
        big_r2: [-a, nu2],
        e1_0: [f0 + 3.0 * w0, b0],
        b0,
    })
}
