use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use proca_core::analysis::{convergence_order, mode_table, stability_report, ConvergenceOrder};
use proca_core::diagnostics::constraint_c2;
use proca_core::driver::{simulate, simulate_with, PhaseTimings, Termination};
use proca_core::initdata::{plane_wave_initial_state, verify_initial_constraints, InitialConstraintReport};
use proca_core::SchemeKind;

use crate::config::RunConfig;
use crate::output::{write_json, write_modes, write_series, write_snapshot, SCHEMA_VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySummary {
    pub max_radius: f64,
    pub argmax: [isize; 3],
    pub max_growth_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub config: RunConfig,
    pub dt: f64,
    pub steps_taken: u64,
    pub final_valid_time: f64,
    pub termination: Termination,
    pub initial_constraints: InitialConstraintReport,
    pub stability: Option<StabilitySummary>,
    pub timings: PhaseTimings,
    pub snapshots: Vec<PathBuf>,
}

impl RunSummary {
    pub fn solver_failed(&self) -> bool {
        matches!(self.termination, Termination::SolverFailure { .. })
    }
}

fn prepare_dir(cfg: &RunConfig) -> anyhow::Result<()> {
    std::fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    std::fs::write(cfg.out_dir.join("config.toml"), cfg.to_toml()?)?;
    Ok(())
}

/// One simulation; writes `series.csv`, snapshots, `config.toml` and
/// `run.json` under `cfg.out_dir`.
pub fn run(cfg: &RunConfig) -> anyhow::Result<RunSummary> {
    cfg.validate()?;
    let spec = cfg.run_spec()?;
    let grid = cfg.grid()?;
    let initial = plane_wave_initial_state(&grid, &spec.params)?;
    prepare_dir(cfg)?;

    let initial_constraints = verify_initial_constraints(&initial, &spec.params);
    let stability = stability_report(cfg.scheme, &spec.params, cfg.lambda, &grid)
        .ok()
        .map(|r| StabilitySummary {
            max_radius: r.max_radius,
            argmax: r.argmax,
            max_growth_rate: r.max_growth_rate,
        });

    let out = simulate(&spec, initial)?;
    write_series(&cfg.out_dir.join("series.csv"), &out.records)?;
    let mut snapshots = Vec::new();
    for snap in &out.snapshots {
        let (full, diag) = write_snapshot(&cfg.out_dir, snap)?;
        snapshots.push(full);
        snapshots.push(diag);
    }
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        dt: spec.params.dt,
        steps_taken: out.final_state.step,
        final_valid_time: out.final_valid_time,
        termination: out.termination,
        initial_constraints,
        stability,
        timings: out.timings,
        snapshots,
    };
    write_json(&cfg.out_dir.join("run.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub resolution: usize,
    pub scheme: SchemeKind,
    pub final_valid_time: f64,
    pub termination: String,
    pub c2_initial: f64,
    /// `‖C2‖` at each checkpoint, `None` if the run stopped before it.
    pub c2_at: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub base: RunConfig,
    pub resolutions: Vec<usize>,
    pub checkpoints: Vec<f64>,
    pub rows: Vec<SweepRow>,
    /// Observed order of `‖C2(0)‖` across the resolutions.
    pub c2_initial_order: Option<ConvergenceOrder>,
}

/// Runs every `(resolution, scheme)` pair on an `n × n × n3` grid and writes
/// `sweep.csv` and `sweep.json`. A failed run is recorded and the sweep
/// continues.
pub fn sweep(
    base: &RunConfig,
    resolutions: &[usize],
    schemes: &[SchemeKind],
    checkpoints: &[f64],
) -> anyhow::Result<SweepSummary> {
    base.validate()?;
    anyhow::ensure!(!resolutions.is_empty(), "no resolutions given");
    prepare_dir(base)?;

    let mut rows = Vec::new();
    let mut c2_series = Vec::new();
    for &n in resolutions {
        let cfg = RunConfig {
            n1: n,
            n2: n,
            ..base.clone()
        };
        cfg.validate()?;
        let grid = cfg.grid()?;
        for &scheme in schemes {
            let cfg = RunConfig { scheme, ..cfg.clone() };
            let spec = cfg.run_spec()?;
            let initial = plane_wave_initial_state(&grid, &spec.params)?;
            let c2_initial = constraint_c2(&initial, &spec.params).l2_norm();
            let mut c2_at = vec![None; checkpoints.len()];
            let half_dt = 0.5 * spec.params.dt;
            let result = simulate_with(&spec, initial, |_, next, _| {
                for (slot, &t) in c2_at.iter_mut().zip(checkpoints) {
                    if slot.is_none() && (next.time - t).abs() <= half_dt {
                        *slot = Some(constraint_c2(next, &spec.params).l2_norm());
                    }
                }
            });
            let (final_valid_time, termination) = match result {
                Ok(out) => (out.final_valid_time, termination_label(&out.termination)),
                Err(e) => (0.0, format!("error: {e}")),
            };
            rows.push(SweepRow {
                resolution: n,
                scheme,
                final_valid_time,
                termination,
                c2_initial,
                c2_at,
            });
        }
        let params = cfg.params()?;
        let dx = 1.0 / n as f64;
        c2_series.push((dx, constraint_c2(&plane_wave_initial_state(&grid, &params)?, &params).l2_norm()));
    }

    let c2_initial_order = convergence_order(&c2_series).ok();
    write_sweep_csv(&base.out_dir.join("sweep.csv"), &rows, checkpoints, c2_initial_order.as_ref())?;
    let summary = SweepSummary {
        schema_version: SCHEMA_VERSION,
        base: base.clone(),
        resolutions: resolutions.to_vec(),
        checkpoints: checkpoints.to_vec(),
        rows,
        c2_initial_order,
    };
    write_json(&base.out_dir.join("sweep.json"), &summary)?;
    Ok(summary)
}

pub fn termination_label(t: &Termination) -> String {
    match t {
        Termination::Completed => "completed".into(),
        Termination::Diverged { .. } => "diverged".into(),
        Termination::SolverFailure { .. } => "solver_failure".into(),
    }
}

fn write_sweep_csv(
    path: &Path,
    rows: &[SweepRow],
    checkpoints: &[f64],
    order: Option<&ConvergenceOrder>,
) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<String> = ["resolution", "scheme", "final_valid_time", "termination", "c2_initial"]
        .map(String::from)
        .to_vec();
    header.extend(checkpoints.iter().map(|t| format!("c2_t{t}")));
    header.push("c2_initial_order".into());
    w.write_record(&header)?;
    let order = order.map(|o| o.order.to_string()).unwrap_or_default();
    for r in rows {
        let mut rec = vec![
            r.resolution.to_string(),
            r.scheme.to_string(),
            r.final_valid_time.to_string(),
            r.termination.clone(),
            r.c2_initial.to_string(),
        ];
        rec.extend(r.c2_at.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
        rec.push(order.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeSummary {
    pub schema_version: u32,
    pub config: RunConfig,
    pub modes: usize,
    pub min_discriminant: f64,
    pub any_growing: bool,
    pub max_radius_sps: f64,
    pub max_radius_ss: f64,
}

/// Writes `modes.csv` and `analysis.json` for the configured grid.
pub fn analyze(cfg: &RunConfig) -> anyhow::Result<AnalyzeSummary> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    prepare_dir(cfg)?;
    let rows = mode_table(&params, cfg.lambda, &grid)?;
    write_modes(&cfg.out_dir.join("modes.csv"), &rows)?;
    let summary = AnalyzeSummary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        modes: rows.len(),
        min_discriminant: rows.iter().map(|r| r.continuum.discriminant).fold(f64::INFINITY, f64::min),
        any_growing: rows.iter().any(|r| r.continuum.growing || r.modified.growing),
        max_radius_sps: rows.iter().map(|r| r.radius_sps).fold(0.0, f64::max),
        max_radius_ss: rows.iter().map(|r| r.radius_ss).fold(0.0, f64::max),
    };
    write_json(&cfg.out_dir.join("analysis.json"), &summary)?;
    Ok(summary)
}
