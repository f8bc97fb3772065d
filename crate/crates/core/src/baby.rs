//! Scalar radiating Burgers model `u_t + (u^2/2)_x = K u - u`.
//!
//! A traveling wave `u(x - s t)` with `v̂ = u - s` has the first integral
//! `q = (a^2 - v̂^2)/2` and reduces to the planar system with `f ≡ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glue::{BabyFields, PhysicalFields, Profile, KERNEL_PADDING};
use crate::poly::Polynomial;
use crate::reduced::{ReducedSystem, SystemOrigin};
use crate::verify::convolution::{kernel_flux, padded_window};

/// `1/√2`: the discriminant `1 - 2a^2` vanishes here.
pub const BABY_AMPLITUDE_LIMIT: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BabySystem {
    pub u_minus: f64,
    pub u_plus: f64,
}

impl BabySystem {
    pub fn new(u_minus: f64, u_plus: f64) -> Result<Self> {
        if !(u_minus.is_finite() && u_plus.is_finite()) {
            return Err(Error::Domain("end states must be finite".into()));
        }
        if u_minus == u_plus {
            return Err(Error::DegenerateAmplitude);
        }
        if u_minus < u_plus {
            return Err(Error::Domain(format!(
                "u- = {u_minus} < u+ = {u_plus} is not a compressive Burgers shock"
            )));
        }
        Ok(Self { u_minus, u_plus })
    }

    /// Centred end states `±a`.
    pub fn centred(a: f64) -> Result<Self> {
        Self::new(a, -a)
    }

    pub fn amplitude(&self) -> f64 {
        0.5 * (self.u_minus - self.u_plus)
    }

    pub fn speed(&self) -> f64 {
        0.5 * (self.u_minus + self.u_plus)
    }
}

pub fn baby_reduced(a: f64) -> Result<ReducedSystem> {
    let sys = ReducedSystem::new(a, Polynomial::constant(1.0), SystemOrigin::Baby)?;
    sys.check_discriminant()?;
    Ok(sys)
}

/// Attach `u = v̂ + s` and the first-integral flux `q = (a^2 - v̂^2)/2`.
pub fn reconstruct_baby(profile: &Profile, system: &BabySystem) -> Profile {
    let a = profile.meta.a;
    let s = system.speed();
    let fields = BabyFields {
        u: profile.v_hat.iter().map(|v| v + s).collect(),
        q: profile.v_hat.iter().map(|&v| 0.5 * (a - v) * (a + v)).collect(),
    };
    let mut out = profile.clone();
    out.fields = Some(PhysicalFields::Baby(fields));
    out
}

/// `max |q[u] - (a^2 - v̂^2)/2|` over the padded window, with `q[u]` the
/// convolution flux computed from the profile alone.
pub fn baby_energy_check(profile: &Profile) -> Result<f64> {
    if profile.meta.origin != SystemOrigin::Baby {
        return Err(Error::Domain("energy check applies to baby-model profiles".into()));
    }
    let a = profile.meta.a;
    let q = kernel_flux(&profile.xi, &profile.v_hat)?;
    let win = padded_window(&profile.xi, KERNEL_PADDING)?;
    Ok(win
        .map(|i| (q[i] - 0.5 * (a - profile.v_hat[i]) * (a + profile.v_hat[i])).abs())
        .fold(0.0, f64::max))
}
