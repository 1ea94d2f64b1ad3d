//! Shared fixtures for the benchmarks.

use proca_core::initdata::plane_wave_initial_state;
use proca_core::{GridSpec, Params, ProcaState, Result};

/// Plane-wave initial data on an `n × n × 1` unit grid with the CFL-1/4 step.
pub fn plane_wave_fixture(n: usize) -> Result<(ProcaState, Params)> {
    let grid = GridSpec::unit_periodic(n, n, 1)?;
    let params = Params {
        dt: proca_core::analysis::cfl_timestep(&grid, 0.25, 1.0)?,
        ..Params::default()
    };
    Ok((plane_wave_initial_state(&grid, &params)?, params))
}
