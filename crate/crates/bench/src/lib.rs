//! Benchmark fixtures.

use radshock_core::gas::shock_from_amplitude;
use radshock_core::pipeline::{run_gas, GasRun, PipelineOptions};
use radshock_core::reduced::build_reduced;
use radshock_core::{GasConstants, GasState, ReducedSystem, ShockData};

pub const DESK_A: f64 = 1e-3;

pub fn desk_left() -> GasState {
    GasState::new(1.0, 0.0, 1.0).expect("valid state")
}

pub fn desk_constants() -> GasConstants {
    GasConstants::with_gamma(1.4).expect("valid gamma")
}

pub fn desk_shock() -> ShockData {
    shock_from_amplitude(&desk_left(), &desk_constants(), DESK_A).expect("desk shock")
}

pub fn desk_system() -> ReducedSystem {
    build_reduced(&desk_shock()).expect("desk system")
}

pub fn desk_run() -> GasRun {
    run_gas(&desk_left(), &desk_constants(), DESK_A, &PipelineOptions::default()).expect("desk run")
}

/// The desk grid and a smooth source on it, for kernel benchmarks.
pub fn kernel_input(run: &GasRun) -> (Vec<f64>, Vec<f64>) {
    let p = &run.profile;
    let g = p.v_hat.iter().map(|v| v * v).collect();
    (p.xi.clone(), g)
}
