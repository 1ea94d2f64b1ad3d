//! Time loop: steps a state to `t_end`, records diagnostics at a fixed
//! cadence, captures snapshots, and stops on divergence or solver failure.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{collect, DiagnosticsContext, DiagnosticsRecord};
use crate::error::{ProcaError, Result};
use crate::grid::{Axis, GridSpec, ScalarField};
use crate::model::{LambdaField, Params, ProcaState};
use crate::scheme::{LinearStepSystem, SchemeKind, SolverConfig, Stepper};

/// Largest field magnitude still counted as a valid state.
pub const DIVERGENCE_CUTOFF: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scheme: SchemeKind,
    pub params: Params,
    pub lambda: LambdaField,
    pub solver: SolverConfig,
    pub t_end: f64,
    /// Record diagnostics every this many steps (and at the first and last
    /// state).
    pub report_every: u64,
    pub snapshot_times: Vec<f64>,
    pub divergence_cutoff: f64,
}

impl RunSpec {
    pub fn new(scheme: SchemeKind, params: Params, t_end: f64) -> Self {
        Self {
            scheme,
            params,
            lambda: LambdaField::Constant(params.lambda0),
            solver: SolverConfig::default(),
            t_end,
            report_every: 10,
            snapshot_times: Vec::new(),
            divergence_cutoff: DIVERGENCE_CUTOFF,
        }
    }

    /// Number of steps to reach `t_end`.
    pub fn n_steps(&self) -> u64 {
        let r = self.t_end / self.params.dt;
        (r - 1e-9 * r.max(1.0)).ceil().max(0.0) as u64
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.solver.validate()?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(ProcaError::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.report_every == 0 {
            return Err(ProcaError::Config("report_every must be positive".into()));
        }
        if !(self.divergence_cutoff > 0.0) {
            return Err(ProcaError::Config("divergence cutoff must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Diverged { step: u64, time: f64, max_abs_field: f64 },
    SolverFailure { step: u64, time: f64, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub requested_time: f64,
    pub step: u64,
    pub time: f64,
    pub a1: ScalarField,
    /// `(x, y, A¹)` along `x = y` in the `i3 = 0` plane; empty unless the
    /// grid is square in the first two axes.
    pub diagonal: Vec<(f64, f64, f64)>,
}

impl Snapshot {
    pub fn capture(requested_time: f64, state: &ProcaState) -> Self {
        let a1 = state.fields.a[0].clone();
        Self {
            requested_time,
            step: state.step,
            time: state.time,
            diagonal: diagonal(&a1),
            a1,
        }
    }
}

fn diagonal(f: &ScalarField) -> Vec<(f64, f64, f64)> {
    let g = f.grid();
    let [n1, n2, _] = g.n();
    if n1 != n2 || g.dx()[0] != g.dx()[1] {
        return Vec::new();
    }
    (0..n1)
        .map(|i| (g.coord(Axis::X, i), g.coord(Axis::Y, i), f.get(i, i, 0)))
        .collect()
}

/// Wall-clock seconds per phase. Informational only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    /// Solver setup, including the per-mode matrices of the spectral solve.
    pub assembly: f64,
    pub solve: f64,
    pub diagnostics: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    /// Last state whose fields stayed finite and under the cutoff.
    pub final_state: ProcaState,
    pub final_valid_time: f64,
    pub termination: Termination,
    pub timings: PhaseTimings,
}

/// Runs `spec` from `initial`. Configuration errors are returned before any
/// stepping; failures during the run end it early and are reported in
/// [`RunOutput::termination`].
pub fn simulate(spec: &RunSpec, initial: ProcaState) -> Result<RunOutput> {
    simulate_with(spec, initial, |_, _, _| {})
}

/// As [`simulate`], calling `observe(prev, next, iterations)` after every
/// accepted step.
pub fn simulate_with(
    spec: &RunSpec,
    initial: ProcaState,
    mut observe: impl FnMut(&ProcaState, &ProcaState, usize),
) -> Result<RunOutput> {
    spec.validate()?;
    let grid: GridSpec = *initial.grid();
    let mut timings = PhaseTimings::default();

    let t0 = Instant::now();
    let system = LinearStepSystem::new(spec.scheme, spec.params, spec.lambda.clone())?;
    let stepper = Stepper::new(system, spec.solver, &grid)?;
    timings.assembly = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let ctx = DiagnosticsContext::new(&initial, spec.params, spec.lambda.clone(), spec.scheme);
    let mut records = vec![collect(None, &initial, &ctx, 0)];
    timings.diagnostics += t0.elapsed().as_secs_f64();

    let half_dt = 0.5 * spec.params.dt;
    let mut pending: Vec<f64> = spec.snapshot_times.clone();
    let mut snapshots = Vec::new();
    let take_snapshots = |state: &ProcaState, pending: &mut Vec<f64>, snapshots: &mut Vec<Snapshot>| {
        pending.retain(|&t| {
            if (state.time - t).abs() <= half_dt {
                snapshots.push(Snapshot::capture(t, state));
                false
            } else {
                true
            }
        });
    };
    take_snapshots(&initial, &mut pending, &mut snapshots);

    let n_steps = spec.n_steps();
    let (start_step, start_time) = (initial.step, initial.time);
    let mut state = initial;
    let mut termination = Termination::Completed;
    for n in 1..=n_steps {
        let t0 = Instant::now();
        let outcome = stepper.step(&state);
        timings.solve += t0.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                termination = Termination::SolverFailure {
                    step: state.step + 1,
                    time: state.time + spec.params.dt,
                    message: e.to_string(),
                };
                break;
            }
        };
        let mut next = outcome.state;
        // avoid accumulating t += dt rounding
        next.time = start_time + (next.step - start_step) as f64 * spec.params.dt;
        let max_abs = next.fields.linf_norm();
        if !(max_abs <= spec.divergence_cutoff) {
            termination = Termination::Diverged {
                step: next.step,
                time: next.time,
                max_abs_field: max_abs,
            };
            break;
        }
        observe(&state, &next, outcome.iterations);

        if n % spec.report_every == 0 || n == n_steps {
            let t0 = Instant::now();
            records.push(collect(Some(&state), &next, &ctx, outcome.iterations));
            timings.diagnostics += t0.elapsed().as_secs_f64();
        }
        take_snapshots(&next, &mut pending, &mut snapshots);
        state = next;
    }

    Ok(RunOutput {
        records,
        snapshots,
        final_valid_time: state.time,
        final_state: state,
        termination,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::plane_wave_initial_state;

    fn setup(n: usize, scheme: SchemeKind, t_end: f64) -> (RunSpec, ProcaState) {
        let g = GridSpec::unit_periodic(n, n, 1).unwrap();
        let params = Params {
            dt: 0.25 / n as f64,
            ..Params::default()
        };
        let s = plane_wave_initial_state(&g, &params).unwrap();
        (RunSpec::new(scheme, params, t_end), s)
    }

    #[test]
    fn step_count_tolerates_rounding() {
        let (mut spec, _) = setup(50, SchemeKind::Sps, 5.0);
        assert_eq!(spec.n_steps(), 1000);
        spec.t_end = 0.0;
        assert_eq!(spec.n_steps(), 0);
        spec.t_end = 0.0051;
        assert_eq!(spec.n_steps(), 2);
    }

    #[test]
    fn zero_length_run_has_one_record() {
        let (spec, s) = setup(16, SchemeKind::Sps, 0.0);
        let out = simulate(&spec, s).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].c1_l2, 0.0);
        assert_eq!(out.termination, Termination::Completed);
        assert_eq!(out.final_valid_time, 0.0);
    }

    #[test]
    fn records_at_cadence_and_final_step() {
        let (mut spec, s) = setup(16, SchemeKind::Ss, 25.0 * 0.25 / 16.0);
        spec.report_every = 10;
        let out = simulate(&spec, s).unwrap();
        let steps: Vec<u64> = out.records.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 10, 20, 25]);
        assert!(out.records[1..].iter().all(|r| r.ss_defect_l2.unwrap() > 0.0));
    }

    #[test]
    fn snapshots_pick_nearest_state() {
        let (mut spec, s) = setup(16, SchemeKind::Sps, 0.2);
        spec.snapshot_times = vec![0.0, 0.1, 0.16, 5.0];
        let out = simulate(&spec, s).unwrap();
        assert_eq!(out.snapshots.len(), 3);
        let dt = spec.params.dt;
        for snap in &out.snapshots {
            assert!((snap.time - snap.requested_time).abs() <= 0.5 * dt);
            assert_eq!(snap.diagonal.len(), 16);
            assert_eq!(snap.diagonal[3].2, snap.a1.get(3, 3, 0));
        }
    }

    #[test]
    fn divergence_stops_the_run() {
        // a cutoff below the initial amplitude trips on the first step
        let (mut spec, s) = setup(16, SchemeKind::Sps, 1.0);
        spec.divergence_cutoff = 0.5 * s.fields.linf_norm();
        let out = simulate(&spec, s).unwrap();
        match out.termination {
            Termination::Diverged { max_abs_field, step, .. } => {
                assert!(max_abs_field > spec.divergence_cutoff);
                assert_eq!(step, 1);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(out.final_state.step, 0);
        assert_eq!(out.final_valid_time, 0.0);
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn solver_failure_is_recorded() {
        let (mut spec, s) = setup(16, SchemeKind::Sps, 0.1);
        spec.solver = SolverConfig {
            max_iter: 1,
            restart: 1,
            ..SolverConfig::iterative(1e-14)
        };
        let out = simulate(&spec, s).unwrap();
        assert!(matches!(out.termination, Termination::SolverFailure { step: 1, .. }));
        assert_eq!(out.final_valid_time, 0.0);
    }

    #[test]
    fn invalid_config_is_rejected_up_front() {
        let (mut spec, s) = setup(8, SchemeKind::Sps, 1.0);
        spec.report_every = 0;
        assert!(simulate(&spec, s.clone()).is_err());
        spec.report_every = 1;
        spec.t_end = -1.0;
        assert!(simulate(&spec, s).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let (spec, s) = setup(16, SchemeKind::Ss, 0.1);
        let a = simulate(&spec, s.clone()).unwrap();
        let b = simulate(&spec, s).unwrap();
        assert_eq!(a.records, b.records);
    }
}
