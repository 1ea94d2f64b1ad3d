//! Implicit Crank–Nicolson steppers for the structure-preserving scheme (SPS)
//! and the standard scheme (SS).
//!
//! Both schemes advance the eight fields by
//!
//! ```text
//! (u⁺ − u) / (cΔt) = L((u⁺ + u) / 2)
//! ```
//!
//! and differ only in the second-derivative terms of the `Πᵢ` row of `L`:
//! SPS composes central first differences, SS uses the compact second
//! difference on the diagonal.

mod krylov;
mod spectral;
mod symbol;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ProcaError, Result};
use crate::grid::{diff2, GridSpec};
use crate::model::{rhs_with, shared_rows, LambdaField, LambdaValues, Params, ProcaFields, ProcaState};

pub use krylov::{solve_iterative, IterativeSolution};
pub use spectral::{Fft3, SpectralSolver};
pub use symbol::{
    amplification_matrix, grid_amplification_matrix, grid_mode_symbols, mode_symbols, signed_index, symbol_matrix, Matrix8, ModeSymbols, Vector8,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Sps,
    Ss,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 2] = [SchemeKind::Sps, SchemeKind::Ss];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Sps => "sps",
            SchemeKind::Ss => "ss",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = ProcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sps" => Ok(SchemeKind::Sps),
            "ss" => Ok(SchemeKind::Ss),
            other => Err(ProcaError::Config(format!("unknown scheme {other:?} (expected sps or ss)"))),
        }
    }
}

/// Spatial operator `L` of the chosen scheme applied to `u`. Ghosts of every
/// input field must be filled; the result has filled ghosts.
pub fn apply_operator(scheme: SchemeKind, params: &Params, lambda: &LambdaValues, u: &ProcaFields) -> ProcaFields {
    match scheme {
        SchemeKind::Sps => rhs_with(u, params, lambda),
        SchemeKind::Ss => {
            let rows = shared_rows(u, params, lambda);
            let inv_p1 = 1.0 / params.p1;
            let pi = [0, 1, 2].map(|i| {
                let mut row = rows.pi_base[i].clone();
                row.axpy(inv_p1, &ss_second_derivatives(&u.a, i));
                row
            });
            ProcaFields {
                a0: rows.a0,
                pi0: rows.pi0,
                a: rows.a,
                pi,
            }
        }
    }
}

/// `δ⟨2⟩ᵐₘ Aᵢ − δ⟨2⟩ᵢₘ Aᵐ` for component `i`.
pub(crate) fn ss_second_derivatives(a: &[crate::grid::ScalarField; 3], i: usize) -> crate::grid::ScalarField {
    let g = *a[0].grid();
    let axes: Vec<_> = g.active_axes().collect();
    let mut out = crate::grid::ScalarField::zeros(&g);
    for &m in &axes {
        out.axpy(1.0, &diff2(&a[i], m, m));
    }
    let ai = crate::grid::Axis::from_index(i);
    if g.n_axis(ai) > 1 {
        for &m in &axes {
            out.axpy(-1.0, &diff2(&a[m.index()], ai, m));
        }
    }
    out
}

/// The implicit linear update of one scheme: `L`, λ and the signed step
/// `cΔt`.
#[derive(Debug, Clone)]
pub struct LinearStepSystem {
    pub scheme: SchemeKind,
    pub params: Params,
    pub lambda: LambdaField,
    dt: f64,
}

impl LinearStepSystem {
    pub fn new(scheme: SchemeKind, params: Params, lambda: LambdaField) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            scheme,
            params,
            lambda,
            dt: params.dt,
        })
    }

    /// The same system stepping backwards in time.
    pub fn reversed(&self) -> Self {
        Self {
            dt: -self.dt,
            ..self.clone()
        }
    }

    /// Signed time step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Signed step in `x⁰`.
    pub fn c_dt(&self) -> f64 {
        self.params.c * self.dt
    }

    /// λ averaged over the step starting at `t`.
    pub fn lambda_mid(&self, grid: &GridSpec, t: f64) -> LambdaValues {
        self.lambda.midpoint(grid, t, t + self.dt)
    }

    pub fn apply(&self, lambda: &LambdaValues, u: &ProcaFields) -> ProcaFields {
        apply_operator(self.scheme, &self.params, lambda, u)
    }

    /// Defect of the update relation `(u⁺ − u)/(cΔt) − L((u⁺ + u)/2)`,
    /// with `L` differencing the time-averaged fields.
    pub fn update_residual(&self, u: &ProcaState, next: &ProcaState) -> ProcaFields {
        let lam = self.lambda_mid(u.grid(), u.time);
        let rate = next.fields.sub(&u.fields).scale(1.0 / self.c_dt());
        let avg = next.fields.add(&u.fields).scale(0.5);
        rate.sub(&self.apply(&lam, &avg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Exact per-mode solve after a discrete Fourier transform.
    Spectral,
    /// Restarted GMRES on the real-space operator.
    Iterative,
}

impl FromStr for SolverKind {
    type Err = ProcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(SolverKind::Spectral),
            "iterative" => Ok(SolverKind::Iterative),
            other => Err(ProcaError::Config(format!(
                "unknown solver {other:?} (expected spectral or iterative)"
            ))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Spectral => "spectral",
            SolverKind::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// Relative residual tolerance of the iterative solver.
    pub tol: f64,
    pub max_iter: usize,
    /// GMRES restart length.
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Spectral,
            tol: 1e-12,
            max_iter: 10_000,
            restart: 40,
        }
    }
}

impl SolverConfig {
    pub fn spectral() -> Self {
        Self::default()
    }

    pub fn iterative(tol: f64) -> Self {
        Self {
            kind: SolverKind::Iterative,
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(ProcaError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 || self.restart == 0 {
            return Err(ProcaError::Config("max_iter and restart must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: ProcaState,
    /// Krylov iterations; zero for the direct spectral solve.
    pub iterations: usize,
    /// Final relative residual of the linear solve (zero for spectral).
    pub residual: f64,
}

/// A scheme bound to a grid and a linear solver. The spectral solver's
/// per-mode amplification matrices are assembled once at construction.
#[derive(Debug)]
pub struct Stepper {
    system: LinearStepSystem,
    solver: SolverConfig,
    grid: GridSpec,
    spectral: Option<SpectralSolver>,
}

impl Stepper {
    pub fn new(system: LinearStepSystem, solver: SolverConfig, grid: &GridSpec) -> Result<Self> {
        solver.validate()?;
        let spectral = match solver.kind {
            SolverKind::Spectral => Some(SpectralSolver::new(&system, grid)?),
            SolverKind::Iterative => None,
        };
        Ok(Self {
            system,
            solver,
            grid: *grid,
            spectral,
        })
    }

    pub fn system(&self) -> &LinearStepSystem {
        &self.system
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Advances `u` by one step.
    pub fn step(&self, u: &ProcaState) -> Result<StepOutcome> {
        let (fields, iterations, residual) = match &self.spectral {
            Some(sp) => (sp.solve(&u.fields), 0, 0.0),
            None => {
                let sol = solve_iterative(&self.system, u, self.solver.tol, self.solver.max_iter, self.solver.restart)?;
                (sol.fields, sol.iterations, sol.residual)
            }
        };
        Ok(StepOutcome {
            state: ProcaState::new(fields, u.step + 1, u.time + self.system.dt()),
            iterations,
            residual,
        })
    }
}

/// One step with a freshly assembled stepper.
pub fn step(u: &ProcaState, system: &LinearStepSystem, solver: &SolverConfig) -> Result<StepOutcome> {
    Stepper::new(system.clone(), *solver, u.grid())?.step(u)
}

/// Direct mode-space solve of one step; requires a constant λ.
pub fn solve_spectral(system: &LinearStepSystem, u: &ProcaState) -> Result<ProcaState> {
    let sp = SpectralSolver::new(system, u.grid())?;
    let fields = sp.solve(&u.fields);
    Ok(ProcaState::new(fields, u.step + 1, u.time + system.dt()))
}
