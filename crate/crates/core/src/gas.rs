//! Gamma-law gas thermodynamics and Rankine-Hugoniot shock data.
//!
//! A 1-shock is parametrized by its amplitude `a = (v- - v+)/2`, where
//! `v = u - sigma` is the velocity in the shock frame. Internally the
//! upstream Mach number `M = v-/c-` is used: for the gamma-law gas the
//! amplitude is `a = c- (M - 1/M) / (gamma + 1)`, which inverts in closed
//! form, so no iterative root-finding is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the three jump identities.
pub const RH_TOLERANCE: f64 = 1e-12;
/// Relative tolerance on the amplitude match.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasConstants {
    pub gamma: f64,
    /// Perfect gas constant.
    pub r_gas: f64,
}

impl GasConstants {
    pub fn new(gamma: f64, r_gas: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::Domain(format!("gamma must be > 1, got {gamma}")));
        }
        if !r_gas.is_finite() || r_gas <= 0.0 {
            return Err(Error::Domain(format!("R must be > 0, got {r_gas}")));
        }
        Ok(Self { gamma, r_gas })
    }

    /// `R = 1`.
    pub fn with_gamma(gamma: f64) -> Result<Self> {
        Self::new(gamma, 1.0)
    }
}

/// Primitive fluid state: density, bulk velocity, specific internal energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub rho: f64,
    pub u: f64,
    pub e: f64,
}

impl GasState {
    pub fn new(rho: f64, u: f64, e: f64) -> Result<Self> {
        let s = Self { rho, u, e };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.u.is_finite() && self.e.is_finite()) {
            return Err(Error::Domain(format!("non-finite state {self:?}")));
        }
        if self.rho <= 0.0 {
            return Err(Error::Domain(format!("density must be > 0, got {}", self.rho)));
        }
        if self.e <= 0.0 {
            return Err(Error::Domain(format!(
                "internal energy must be > 0, got {}",
                self.e
            )));
        }
        Ok(())
    }

    /// Mirror image under `x -> -x`.
    pub fn reflected(&self) -> Self {
        Self {
            u: -self.u,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thermo {
    pub pressure: f64,
    pub temperature: f64,
    pub total_energy: f64,
    pub sound_speed: f64,
}

pub fn thermo(state: &GasState, consts: &GasConstants) -> Result<Thermo> {
    state.validate()?;
    let g = consts.gamma;
    let pressure = (g - 1.0) * state.rho * state.e;
    Ok(Thermo {
        pressure,
        temperature: pressure / (consts.r_gas * state.rho),
        total_energy: state.e + 0.5 * state.u * state.u,
        sound_speed: sound_speed(state.e, g),
    })
}

#[inline]
pub fn sound_speed(e: f64, gamma: f64) -> f64 {
    (gamma * (gamma - 1.0) * e).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockFamily {
    One,
    Three,
}

/// A shock pair together with its jump constants.
///
/// For a 1-shock `v± = u± - sigma > 0`, `j = rho v`, `j C1 = rho v^2 + P`
/// and `j C2 = rho v (e + v^2/2) + P v` on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockData {
    pub family: ShockFamily,
    pub consts: GasConstants,
    pub left: GasState,
    pub right: GasState,
    pub sigma: f64,
    pub j: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    /// Half the velocity jump.
    pub a: f64,
}

impl ShockData {
    /// Midpoint `(v- + v+)/2` of the shock-frame velocities.
    pub fn v_center(&self) -> f64 {
        0.5 * (self.v_minus + self.v_plus)
    }

    /// Relative residuals of the three jump identities evaluated on the
    /// stored states, against the stored `j`, `C1`, `C2`.
    pub fn rh_residuals(&self) -> [f64; 3] {
        let [jl, c1l, c2l] = jump_constants(&self.left, self.sigma, self.consts.gamma);
        let [jr, c1r, c2r] = jump_constants(&self.right, self.sigma, self.consts.gamma);
        let rel = |x: f64, y: f64, s: f64| (x - y).abs() / s.abs();
        [
            rel(jl, self.j, self.j).max(rel(jr, self.j, self.j)),
            rel(jl * c1l, self.j * self.c1, self.j * self.c1)
                .max(rel(jr * c1r, self.j * self.c1, self.j * self.c1)),
            rel(jl * c2l, self.j * self.c2, self.j * self.c2)
                .max(rel(jr * c2r, self.j * self.c2, self.j * self.c2)),
        ]
    }

    /// Mirror the shock under `x -> -x, u -> -u`. A 3-shock becomes a
    /// 1-shock and vice versa; the map is an involution.
    pub fn reflected(&self) -> Self {
        let left = self.right.reflected();
        let right = self.left.reflected();
        let sigma = -self.sigma;
        let [j, c1, c2] = jump_constants(&left, sigma, self.consts.gamma);
        Self {
            family: match self.family {
                ShockFamily::One => ShockFamily::Three,
                ShockFamily::Three => ShockFamily::One,
            },
            consts: self.consts,
            left,
            right,
            sigma,
            j,
            c1,
            c2,
            v_minus: left.u - sigma,
            v_plus: right.u - sigma,
            a: self.a,
        }
    }

    /// The 1-shock representative of this shock.
    pub fn as_one_shock(&self) -> Self {
        match self.family {
            ShockFamily::One => *self,
            ShockFamily::Three => self.reflected(),
        }
    }
}

/// `[j, C1, C2]` computed from a single state and a shock speed.
pub fn jump_constants(state: &GasState, sigma: f64, gamma: f64) -> [f64; 3] {
    let v = state.u - sigma;
    let p = (gamma - 1.0) * state.rho * state.e;
    let j = state.rho * v;
    let c1 = (state.rho * v * v + p) / j;
    let c2 = (j * (state.e + 0.5 * v * v) + p * v) / j;
    [j, c1, c2]
}

/// Build the 1-shock with prescribed amplitude issued from `left`.
pub fn shock_from_amplitude(left: &GasState, consts: &GasConstants, a: f64) -> Result<ShockData> {
    left.validate()?;
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain(format!("amplitude must be > 0, got {a}")));
    }
    let g = consts.gamma;
    let c_left = sound_speed(left.e, g);

    // a (gamma+1)/c = M - 1/M
    let s = (g + 1.0) * a / c_left;
    let mach = 0.5 * (s + (s * s + 4.0).sqrt());
    if !mach.is_finite() || mach <= 1.0 {
        return Err(Error::AmplitudeUnreachable {
            a,
            reason: format!("pre-shock Mach number {mach} is not supersonic"),
        });
    }
    let m2 = mach * mach;

    let v_minus = mach * c_left;
    let sigma = left.u - v_minus;
    let [j, c1, c2] = jump_constants(left, sigma, g);

    let v_plus = v_minus * ((g - 1.0) * m2 + 2.0) / ((g + 1.0) * m2);
    let right = GasState {
        rho: j / v_plus,
        u: v_plus + sigma,
        e: (c1 - v_plus) * v_plus / (g - 1.0),
    };
    right.validate().map_err(|e| Error::AmplitudeUnreachable {
        a,
        reason: format!("right state invalid: {e}"),
    })?;

    let shock = ShockData {
        family: ShockFamily::One,
        consts: *consts,
        left: *left,
        right,
        sigma,
        j,
        c1,
        c2,
        v_minus,
        v_plus,
        a: 0.5 * (v_minus - v_plus),
    };

    if (shock.a - a).abs() > AMPLITUDE_TOLERANCE * a {
        return Err(Error::AmplitudeUnreachable {
            a,
            reason: format!("amplitude mismatch: built {}", shock.a),
        });
    }
    let res = shock.rh_residuals();
    if res.iter().any(|r| !(*r <= RH_TOLERANCE)) {
        return Err(Error::AmplitudeUnreachable {
            a,
            reason: format!("jump identities not satisfied: residuals {res:?}"),
        });
    }
    let lax = lax_check(&shock);
    if !lax.admissible {
        return Err(Error::LaxViolation {
            right_fast: lax.right_fast,
            right_slow: lax.right_slow,
            left: lax.left,
        });
    }
    if !(right.rho > left.rho && 0.0 < v_plus && v_plus < v_minus) {
        return Err(Error::AmplitudeUnreachable {
            a,
            reason: "shock is not compressive".into(),
        });
    }
    Ok(shock)
}

/// Build the 3-shock of amplitude `a` whose upstream (right) state is
/// `right`, by reflecting the 1-shock construction.
pub fn shock3_from_amplitude(right: &GasState, consts: &GasConstants, a: f64) -> Result<ShockData> {
    let one = shock_from_amplitude(&right.reflected(), consts, a)?;
    Ok(one.reflected())
}

/// Signed margins of the Lax inequalities; all three are positive for an
/// admissible shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaxReport {
    pub admissible: bool,
    /// 1-shock: `sigma - (u+ - c+)`; 3-shock: `u- + c- - sigma`.
    pub right_fast: f64,
    /// 1-shock: `u+ - sigma`; 3-shock: `sigma - u-`.
    pub right_slow: f64,
    /// 1-shock: `u- - c- - sigma`; 3-shock: `sigma - (u+ + c+)`.
    pub left: f64,
}

pub fn lax_check(shock: &ShockData) -> LaxReport {
    let g = shock.consts.gamma;
    let cl = sound_speed(shock.left.e, g);
    let cr = sound_speed(shock.right.e, g);
    let (ul, ur, s) = (shock.left.u, shock.right.u, shock.sigma);
    let (right_fast, right_slow, left) = match shock.family {
        ShockFamily::One => (s - (ur - cr), ur - s, ul - cl - s),
        ShockFamily::Three => (ul + cl - s, s - ul, s - (ur + cr)),
    };
    // NaN margins compare false and are rejected.
    let admissible = right_fast > 0.0 && right_slow > 0.0 && left > 0.0;
    LaxReport {
        admissible,
        right_fast,
        right_slow,
        left,
    }
}

/// Vanishing-amplitude limits of the jump constants and of `f(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallShockLimits {
    pub sigma: f64,
    pub j: f64,
    pub c1: f64,
    pub c2: f64,
    pub f0: f64,
}

pub fn small_shock_limits(left: &GasState, consts: &GasConstants) -> Result<SmallShockLimits> {
    left.validate()?;
    let g = consts.gamma;
    let c = sound_speed(left.e, g);
    let c1 = c + (g - 1.0) * left.e / c;
    let j = left.rho * c;
    let f0 = 4.0 * g.powi(3) * (g - 1.0).powi(2) / (consts.r_gas.powi(4) * (g + 1.0).powi(8))
        * c1.powi(7)
        / j;
    Ok(SmallShockLimits {
        sigma: left.u - c,
        j,
        c1,
        c2: g * left.e + 0.5 * c * c,
        f0,
    })
}
