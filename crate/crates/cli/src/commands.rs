use std::fs;
use std::path::{Path, PathBuf};

use radshock_core::baby::{baby_reduced, BabySystem};
use radshock_core::gas::shock_from_amplitude;
use radshock_core::io::{
    field_consistency, read_json, read_profile, system_for_meta, write_json, write_profile,
};
use radshock_core::pipeline::{run_baby, run_gas, verify_profile, Summary};
use radshock_core::reduced::{build_reduced, gas_f_polynomial};
use radshock_core::verify::{expansion_coeffs, gamma_condition, regularity_order};
use radshock_core::{GasConstants, Profile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Relative tolerance between the physical columns of a profile file and
/// the fields rebuilt from its `(v̂, w)` columns.
pub const FIELD_CONSISTENCY_TOL: f64 = 1e-10;

/// What a successful command prints on stdout, plus any verification gates
/// that failed (which turn the exit status non-zero).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub stdout: serde_json::Value,
    pub failed_gates: Vec<String>,
}

fn profile_path(out: &Path, format: Format) -> PathBuf {
    match format {
        Format::Csv => out.join("profile.csv"),
        Format::Json => out.join("profile.json"),
    }
}

fn write_run(out: &Path, format: Format, profile: &Profile, summary: &Summary) -> Result<serde_json::Value, CliError> {
    fs::create_dir_all(out)?;
    let p = profile_path(out, format);
    match format {
        Format::Csv => write_profile(&p, profile)?,
        Format::Json => write_json(&p, profile)?,
    }
    let s = out.join("summary.json");
    write_json(&s, summary)?;
    Ok(json!({
        "model": summary.model,
        "a": summary.a,
        "profile": p,
        "summary": s,
        "grid_points": summary.grid_points,
        "passed": summary.passed,
        "failed_gates": summary.verification.failed_gates(),
    }))
}

fn gated(stdout: serde_json::Value, summary: &Summary) -> Outcome {
    Outcome {
        stdout,
        failed_gates: summary
            .verification
            .failed_gates()
            .into_iter()
            .map(String::from)
            .collect(),
    }
}

pub fn cmd_profile(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let consts = GasConstants::new(cfg.gamma, cfg.r_gas)?;
    let run = run_gas(&cfg.left, &consts, cfg.a, &cfg.options)?;
    let summary = Summary::from_gas(&run);
    let stdout = write_run(&cfg.out, cfg.format, &run.profile, &summary)?;
    Ok(gated(stdout, &summary))
}

pub fn cmd_baby(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let run = run_baby(&BabySystem::centred(cfg.a)?, &cfg.options)?;
    let summary = Summary::from_baby(&run);
    let mut stdout = write_run(&cfg.out, cfg.format, &run.profile, &summary)?;
    stdout["w0"] = json!(run.equilibria.w0);
    Ok(gated(stdout, &summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub gamma: f64,
    pub a: f64,
    /// `ok`, `gates_failed`, `refused` or `failed`.
    pub status: String,
    pub f0: Option<f64>,
    pub f_prime0: Option<f64>,
    pub discriminant: Option<f64>,
    pub w0: Option<f64>,
    pub regularity_order: Option<usize>,
    pub integral_residual: Option<f64>,
    pub ode_residual: Option<f64>,
    pub q_cross: Option<f64>,
    pub grid_points: Option<usize>,
    pub error_kind: Option<String>,
    pub error: Option<String>,
}

fn sweep_row(cfg: &RunConfig, index: usize, gamma: f64, a: f64) -> SweepRow {
    let mut row = SweepRow {
        index,
        gamma,
        a,
        status: String::new(),
        f0: None,
        f_prime0: None,
        discriminant: None,
        w0: None,
        regularity_order: None,
        integral_residual: None,
        ode_residual: None,
        q_cross: None,
        grid_points: None,
        error_kind: None,
        error: None,
    };
    let consts = match GasConstants::new(gamma, cfg.r_gas) {
        Ok(c) => c,
        Err(e) => return fail(row, &e.into()),
    };
    // diagnostics of f are reported even where the pipeline refuses
    if let Ok(shock) = shock_from_amplitude(&cfg.left, &consts, a) {
        let f = gas_f_polynomial(gamma, cfg.r_gas, shock.j, shock.c1);
        let f0 = f.eval(0.0);
        row.f0 = Some(f0);
        row.f_prime0 = Some(f.derivative_at_zero(1));
        row.discriminant = Some(f0 * f0 - 2.0 * a * a);
        if let Ok(sys) = build_reduced(&shock) {
            row.w0 = sys.w0().ok();
            row.regularity_order = regularity_order(&sys).ok();
        }
    }
    match run_gas(&cfg.left, &consts, a, &cfg.options) {
        Ok(run) => {
            let v = &run.verification;
            row.integral_residual = v.integral.as_ref().map(|r| r.max);
            row.ode_residual = v.ode.as_ref().map(|r| r.max);
            row.q_cross = v.q_cross.as_ref().map(|r| r.max);
            row.grid_points = Some(run.profile.len());
            if v.passed() {
                row.status = "ok".into();
            } else {
                row.status = "gates_failed".into();
                row.error_kind = Some("gates_failed".into());
                row.error = Some(v.failed_gates().join(" "));
            }
            row
        }
        Err(e) => fail(row, &e.into()),
    }
}

fn fail(mut row: SweepRow, e: &CliError) -> SweepRow {
    row.status = if e.exit_code() == crate::error::EXIT_REFUSAL {
        "refused".into()
    } else {
        "failed".into()
    };
    row.error_kind = Some(e.kind().into());
    row.error = Some(e.to_string());
    row
}

/// Thread cap from `RADSHOCK_THREADS`, if set.
pub fn thread_limit() -> Result<Option<usize>, CliError> {
    match std::env::var("RADSHOCK_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "RADSHOCK_THREADS must be a positive integer, got {s:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Rows are computed independently and returned in input order.
pub fn sweep_rows(cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    let pairs = cfg.sweep_pairs()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        pairs
            .par_iter()
            .enumerate()
            .map(|(i, &(g, a))| sweep_row(cfg, i, g, a))
            .collect()
    }))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = sweep_rows(cfg, thread_limit()?)?;
    fs::create_dir_all(&cfg.out)?;
    let path = match cfg.format {
        Format::Csv => {
            let p = cfg.out.join("sweep.csv");
            let mut w = csv::Writer::from_path(&p)?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
            p
        }
        Format::Json => {
            let p = cfg.out.join("sweep.json");
            write_json(&p, &rows)?;
            p
        }
    };
    let count = |s: &str| rows.iter().filter(|r| r.status == s).count();
    Ok(Outcome {
        stdout: json!({
            "rows": rows.len(),
            "ok": count("ok"),
            "gates_failed": count("gates_failed"),
            "refused": count("refused"),
            "failed": count("failed"),
            "table": path,
        }),
        failed_gates: Vec::new(),
    })
}

/// Recompute every residual of a profile file from the file alone. The
/// companion `summary.json` (explicit, or next to the file) supplies the
/// shock data; without it the constants are recovered from the columns.
pub fn cmd_verify(cfg: &RunConfig, file: &Path, summary: Option<&Path>) -> Result<Outcome, CliError> {
    let summary_path = match summary {
        Some(p) => Some(p.to_path_buf()),
        None => {
            let p = file.parent().unwrap_or(Path::new(".")).join("summary.json");
            p.exists().then_some(p)
        }
    };
    let summary: Option<Summary> = match &summary_path {
        Some(p) => Some(read_json(p)?),
        None => None,
    };
    let meta = summary.as_ref().map(|s| &s.profile_meta);
    let profile: Profile = if file.extension().is_some_and(|e| e == "json") {
        read_json(file)?
    } else {
        read_profile(file, meta)?
    };

    let sys = system_for_meta(&profile.meta)?;
    let order = match regularity_order(&sys) {
        Ok(n) if profile.baby().is_some() => cfg.options.expansion_order.min(n),
        _ => cfg.options.expansion_order,
    };
    let coeffs = expansion_coeffs(&sys, order).ok();
    let shock = summary.as_ref().and_then(|s| s.shock);
    let mut report = verify_profile(&profile, shock.as_ref(), coeffs.as_ref(), &cfg.options)?;
    if profile.gas().is_some() {
        report.gate("field_consistency", field_consistency(&profile)?, FIELD_CONSISTENCY_TOL);
    }
    let failed: Vec<String> = report.failed_gates().into_iter().map(String::from).collect();
    Ok(Outcome {
        stdout: json!({
            "file": file,
            "summary": summary_path,
            "grid_points": profile.len(),
            "passed": failed.is_empty(),
            "verification": report,
        }),
        failed_gates: failed,
    })
}

pub fn cmd_expansion(cfg: &RunConfig, baby: bool) -> Result<Outcome, CliError> {
    let n = cfg.options.expansion_order;
    let (sys, gamma) = if baby {
        (baby_reduced(cfg.a)?, None)
    } else {
        let consts = GasConstants::new(cfg.gamma, cfg.r_gas)?;
        let shock = shock_from_amplitude(&cfg.left, &consts, cfg.a)?;
        (build_reduced(&shock)?, Some(gamma_condition(&consts)))
    };
    let coeffs = expansion_coeffs(&sys, n)?;
    Ok(Outcome {
        stdout: json!({
            "model": if baby { "baby" } else { "gas" },
            "a": sys.a,
            "order": n,
            "gamma_condition": gamma,
            "regularity_order": regularity_order(&sys)?,
            "f_coeffs": sys.f_coeffs(),
            "coefficients": coeffs,
        }),
        failed_gates: Vec::new(),
    })
}
