//! Plane-wave initial data along the diagonal `x + y`, constructed so that
//! both constraints vanish in the continuum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{constraint_c1, constraint_c2};
use crate::error::{ProcaError, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::model::{Params, ProcaFields, ProcaState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveParams {
    pub a: f64,
    pub p1: f64,
    pub p2: f64,
    pub c: f64,
    /// `√(8π² − p1 p2)`.
    pub s: f64,
}

impl PlaneWaveParams {
    pub fn new(params: &Params) -> Result<Self> {
        let arg = 8.0 * PI * PI - params.p1 * params.p2;
        if !(arg > 0.0) {
            return Err(ProcaError::InitialData(format!(
                "8π² − p1·p2 must be positive, got {arg}"
            )));
        }
        if params.p1 == 0.0 {
            return Err(ProcaError::InitialData("p1 must be nonzero".into()));
        }
        Ok(Self {
            a: params.a,
            p1: params.p1,
            p2: params.p2,
            c: params.c,
            s: arg.sqrt(),
        })
    }

    /// The eight fields at `(x, y)`, in `A⁰, Π₀, A¹, A², A³, Π₁, Π₂, Π₃`
    /// order.
    pub fn evaluate(&self, x: f64, y: f64) -> [f64; 8] {
        let Self { a, p1, p2, s, .. } = *self;
        let th = 2.0 * PI * (x + y);
        let (sn, cs) = th.sin_cos();
        let (sn2, cs2) = (2.0 * th).sin_cos();
        let pi2 = PI * PI;
        [
            -2.0 * a * PI * (cs + sn) / s,
            0.0,
            a * cs,
            a * sn,
            a * cs2,
            (-4.0 * a * pi2 * cs + a * (p1 * p2 - 4.0 * pi2) * sn) / (p1 * s),
            (4.0 * a * pi2 * sn + a * (4.0 * pi2 - p1 * p2) * cs) / (p1 * s),
            -2.0 * a * s / p1 * sn2,
        ]
    }
}

/// Samples the plane-wave data at the interior nodes of `grid`; `t = 0`,
/// `ℓ = 0`, ghosts filled.
pub fn plane_wave_initial_state(grid: &GridSpec, params: &Params) -> Result<ProcaState> {
    let pw = PlaneWaveParams::new(params)?;
    let fields: [ScalarField; 8] =
        std::array::from_fn(|j| ScalarField::from_fn(grid, |x| pw.evaluate(x[0], x[1])[j]));
    Ok(ProcaState::new(ProcaFields::from_array(fields), 0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConstraintReport {
    pub c1_l2: f64,
    pub c2_l2: f64,
    /// Largest spacing over the active axes.
    pub dx: f64,
    /// `‖C2‖ / dx²`, roughly resolution independent for second-order
    /// truncation.
    pub c2_over_dx2: f64,
}

/// Reports the constraint norms of `u`; never rejects.
pub fn verify_initial_constraints(u: &ProcaState, params: &Params) -> InitialConstraintReport {
    let g = u.grid();
    let dx = g.active_axes().map(|a| g.dx_axis(a)).fold(0.0, f64::max);
    let c2 = constraint_c2(u, params).l2_norm();
    InitialConstraintReport {
        c1_l2: constraint_c1(u).l2_norm(),
        c2_l2: c2,
        dx,
        c2_over_dx2: if dx > 0.0 { c2 / (dx * dx) } else { 0.0 },
    }
}
