//! CSV profile files and JSON summaries.
//!
//! Gas profiles are written with the columns
//! `xi,v_hat,w,v,rho,u,e,theta,P,q,n`, baby-model profiles with
//! `xi,v_hat,w,u,q`; every value carries 17 significant digits so a file
//! read back reproduces the profile bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::baby::baby_reduced;
use crate::error::{Error, Result};
use crate::glue::{
    reconstruct_with, BabyFields, GasFields, GasParameters, GlueDiagnostics,
    GlueOptions, PhysicalFields, Profile, ProfileMeta,
};
use crate::reduced::{equilibria, gas_f_polynomial, ReducedSystem, SystemOrigin};

pub const GAS_COLUMNS: [&str; 11] = ["xi", "v_hat", "w", "v", "rho", "u", "e", "theta", "P", "q", "n"];
pub const BABY_COLUMNS: [&str; 5] = ["xi", "v_hat", "w", "u", "q"];

/// Relative tolerance on the spacing of a file grid.
const GRID_TOL: f64 = 1e-9;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_profile_csv<W: Write>(out: W, p: &Profile) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    match &p.fields {
        Some(PhysicalFields::Gas(g)) => {
            wr.write_record(GAS_COLUMNS)?;
            for i in 0..p.len() {
                let row = [
                    p.xi[i], p.v_hat[i], p.w[i], g.v[i], g.rho[i], g.u[i], g.e[i], g.theta[i],
                    g.pressure[i], g.q[i], g.n[i],
                ];
                wr.write_record(row.iter().map(|&x| fmt(x)))?;
            }
        }
        Some(PhysicalFields::Baby(b)) => {
            wr.write_record(BABY_COLUMNS)?;
            for i in 0..p.len() {
                let row = [p.xi[i], p.v_hat[i], p.w[i], b.u[i], b.q[i]];
                wr.write_record(row.iter().map(|&x| fmt(x)))?;
            }
        }
        None => {
            return Err(Error::Format(
                "profile has no physical fields; reconstruct it before writing".into(),
            ))
        }
    }
    wr.flush()?;
    Ok(())
}

pub fn write_profile(path: impl AsRef<Path>, p: &Profile) -> Result<()> {
    write_profile_csv(BufWriter::new(File::create(path)?), p)
}

enum Kind {
    Gas,
    Baby,
}

/// Read a profile file. With `meta` (the `profile_meta` of the companion
/// summary) the constants come from there; without it they are recovered
/// from the columns themselves. The glue diagnostics are always recomputed
/// from the samples.
pub fn read_profile_csv<R: Read>(input: R, meta: Option<&ProfileMeta>) -> Result<Profile> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let kind = if header == GAS_COLUMNS {
        Kind::Gas
    } else if header == BABY_COLUMNS {
        Kind::Baby
    } else {
        return Err(Error::Format(format!("unrecognised header {header:?}")));
    };
    let ncol = header.len();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); ncol];
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != ncol {
            return Err(Error::Format(format!(
                "row {} has {} fields, expected {ncol}",
                line + 2,
                rec.len()
            )));
        }
        for (c, field) in rec.iter().enumerate() {
            let x: f64 = field.trim().parse().map_err(|_| {
                Error::Format(format!("row {}, column {}: cannot parse {field:?}", line + 2, header[c]))
            })?;
            if !x.is_finite() {
                return Err(Error::Format(format!(
                    "row {}, column {}: non-finite value",
                    line + 2,
                    header[c]
                )));
            }
            cols[c].push(x);
        }
    }
    let xi = cols[0].clone();
    if xi.len() < 5 {
        return Err(Error::InsufficientSamples(format!("{} rows", xi.len())));
    }
    let h = (xi[xi.len() - 1] - xi[0]) / (xi.len() - 1) as f64;
    if !(h > 0.0) || xi.windows(2).any(|p| ((p[1] - p[0]) - h).abs() > GRID_TOL * h) {
        return Err(Error::Format("xi is not a uniform increasing grid".into()));
    }
    let zero_index = xi
        .iter()
        .position(|&x| x == 0.0)
        .ok_or_else(|| Error::Format("grid does not contain xi = 0".into()))?;
    let v_hat = cols[1].clone();
    let w = cols[2].clone();

    let fields = match kind {
        Kind::Gas => PhysicalFields::Gas(GasFields {
            v: cols[3].clone(),
            rho: cols[4].clone(),
            u: cols[5].clone(),
            e: cols[6].clone(),
            theta: cols[7].clone(),
            pressure: cols[8].clone(),
            q: cols[9].clone(),
            n: cols[10].clone(),
        }),
        Kind::Baby => PhysicalFields::Baby(BabyFields {
            u: cols[3].clone(),
            q: cols[4].clone(),
        }),
    };

    let mut meta = match meta {
        Some(m) => {
            if ((m.spacing - h) / m.spacing).abs() > GRID_TOL {
                return Err(Error::Format(format!(
                    "file spacing {h:e} disagrees with summary spacing {:e}",
                    m.spacing
                )));
            }
            m.clone()
        }
        None => derived_meta(&fields, zero_index, &xi, &w, h)?,
    };
    meta.spacing = h;
    let z: Vec<f64> = w.iter().map(|&x| x - meta.w0).collect();
    let base = meta.glue.tolerance - meta.glue.error_estimate;
    meta.glue = GlueDiagnostics::measure(&z, zero_index, h, meta.glue.w_prime_target, base)?;

    Ok(Profile {
        xi,
        v_hat,
        w,
        z,
        zero_index,
        meta,
        fields: Some(fields),
    })
}

pub fn read_profile(path: impl AsRef<Path>, meta: Option<&ProfileMeta>) -> Result<Profile> {
    read_profile_csv(BufReader::new(File::open(path)?), meta)
}

/// Gas constants recovered from the physical columns at `xi = 0`.
pub fn derive_gas_parameters(g: &GasFields, zero_index: usize) -> Result<GasParameters> {
    let i = zero_index;
    let (v, rho, e, theta, p) = (g.v[i], g.rho[i], g.e[i], g.theta[i], g.pressure[i]);
    if !(v > 0.0 && rho > 0.0 && e > 0.0 && theta > 0.0 && p > 0.0) {
        return Err(Error::Format("non-physical state at xi = 0".into()));
    }
    let gm1 = p / (rho * e);
    Ok(GasParameters {
        gamma: 1.0 + gm1,
        r_gas: gm1 * e / theta,
        j: rho * v,
        c1: v + gm1 * e / v,
        sigma: g.u[i] - v,
    })
}

fn derived_meta(
    fields: &PhysicalFields,
    zi: usize,
    xi: &[f64],
    w: &[f64],
    h: f64,
) -> Result<ProfileMeta> {
    let sys = match fields {
        PhysicalFields::Gas(g) => {
            let gp = derive_gas_parameters(g, zi)?;
            let k = gp.j * (gp.gamma + 1.0) / (gp.gamma - 1.0);
            let a = (-2.0 * g.q[zi] / k).sqrt();
            ReducedSystem::new(
                a,
                gas_f_polynomial(gp.gamma, gp.r_gas, gp.j, gp.c1),
                SystemOrigin::Gas {
                    gamma: gp.gamma,
                    r_gas: gp.r_gas,
                    j: gp.j,
                    c1: gp.c1,
                },
            )?
        }
        PhysicalFields::Baby(b) => baby_reduced((2.0 * b.q[zi]).sqrt())?,
    };
    if !sys.a.is_finite() {
        return Err(Error::Format("cannot recover the amplitude from q(0)".into()));
    }
    let eq = equilibria(&sys)?;
    let target = eq.glue_derivative();
    let tol = GlueOptions::default().match_tol;
    Ok(ProfileMeta {
        a: sys.a,
        w0: w[zi],
        f0: eq.f0,
        f_prime0: eq.f_prime0,
        spacing: h,
        origin: sys.origin,
        glue: GlueDiagnostics {
            w_prime_left: f64::NAN,
            w_prime_right: f64::NAN,
            w_prime_target: target,
            error_estimate: 0.0,
            tolerance: GlueDiagnostics::base_tolerance(tol, target, sys.a, eq.w0),
        },
        xi_flat_start: xi[0],
        xi_sharp_start: xi[xi.len() - 1],
    })
}

/// Reduced system described by a profile's metadata.
pub fn system_for_meta(meta: &ProfileMeta) -> Result<ReducedSystem> {
    match meta.origin {
        SystemOrigin::Gas { gamma, r_gas, j, c1 } => {
            ReducedSystem::new(meta.a, gas_f_polynomial(gamma, r_gas, j, c1), meta.origin)
        }
        SystemOrigin::Baby => baby_reduced(meta.a),
    }
}

/// Largest relative mismatch between the physical columns of a gas profile
/// and the fields rebuilt from its `(v̂, w)` columns.
pub fn field_consistency(p: &Profile) -> Result<f64> {
    let g = p
        .gas()
        .ok_or_else(|| Error::Domain("field consistency applies to gas profiles".into()))?;
    let gp = derive_gas_parameters(g, p.zero_index)?;
    let rebuilt = reconstruct_with(p, &gp)?;
    let r = rebuilt.gas().expect("reconstruct_with attaches gas fields");
    let pairs: [(&[f64], &[f64]); 8] = [
        (&g.v, &r.v),
        (&g.rho, &r.rho),
        (&g.u, &r.u),
        (&g.e, &r.e),
        (&g.theta, &r.theta),
        (&g.pressure, &r.pressure),
        (&g.q, &r.q),
        (&g.n, &r.n),
    ];
    let mut worst = 0.0f64;
    for (file, calc) in pairs {
        let scale = calc.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        for (x, y) in file.iter().zip(calc) {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    Ok(worst)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
