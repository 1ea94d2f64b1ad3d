//! Fixtures and operator-property checks shared by the test targets.
#![allow(dead_code)]

use proca_core::diagnostics::ss_defect;
use proca_core::grid::{diff1, Axis, GridSpec, ScalarField};
use proca_core::initdata::plane_wave_initial_state;
use proca_core::{Params, ProcaFields, ProcaState};
use proptest::prelude::*;

/// Plane-wave initial data on `n × n × 1` with the CFL-1/4 step.
pub fn plane_wave(n: usize) -> (ProcaState, Params) {
    let g = GridSpec::unit_periodic(n, n, 1).unwrap();
    let p = Params {
        dt: 0.25 / n as f64,
        ..Params::default()
    };
    (plane_wave_initial_state(&g, &p).unwrap(), p)
}

/// Interior values in `[-1, 1]` for a grid.
pub fn field_strategy(grid: GridSpec) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(-1.0f64..1.0, grid.interior_len())
        .prop_map(move |v| ScalarField::from_interior(&grid, &v))
}

/// Small grids with two or three active axes and unequal spacings.
pub fn grid_strategy() -> impl Strategy<Value = GridSpec> {
    (3usize..9, 3usize..9, prop_oneof![Just(1usize), 3usize..6], 0.05f64..0.5, 0.05f64..0.5)
        .prop_map(|(n1, n2, n3, d1, d2)| GridSpec::new([n1, n2, n3], [d1, d2, 0.5 * (d1 + d2)], [0.0; 3]).unwrap())
}

pub fn active(grid: &GridSpec) -> Vec<Axis> {
    grid.active_axes().collect()
}

/// `|Σ g·δf ΔV + Σ δg·f ΔV| ≤ 1e-12 ‖f‖‖g‖`.
pub fn check_summation_by_parts(f: &ScalarField, g: &ScalarField, axis: Axis) -> Result<(), TestCaseError> {
    let dv = f.grid().cell_volume();
    let lhs = g.dot(&diff1(f, axis)) * dv;
    let rhs = diff1(g, axis).dot(f) * dv;
    let scale = f.l2_norm() * g.l2_norm();
    prop_assert!(
        (lhs + rhs).abs() <= 1e-12 * scale,
        "axis {axis:?}: {lhs} + {rhs} vs scale {scale}"
    );
    Ok(())
}

/// `op(shift f) = shift(op f)` to 1e-14 relative.
pub fn check_shift_equivariance(
    f: &ScalarField,
    offset: [isize; 3],
    op: impl Fn(&ScalarField) -> ScalarField,
) -> Result<(), TestCaseError> {
    let a = op(&f.shifted(offset));
    let b = op(f).shifted(offset);
    let scale = b.linf_norm().max(f64::MIN_POSITIVE);
    prop_assert!(a.sub(&b).linf_norm() <= 1e-14 * scale);
    Ok(())
}

/// `δᵢδⱼ f = δⱼδᵢ f` to 1e-14 of the stencil scale `‖f‖∞ / (dxᵢ dxⱼ)`.
pub fn check_diff1_commutes(f: &ScalarField, i: Axis, j: Axis) -> Result<(), TestCaseError> {
    let a = diff1(&diff1(f, j), i);
    let b = diff1(&diff1(f, i), j);
    let g = f.grid();
    let scale = f.linf_norm() / (g.dx_axis(i) * g.dx_axis(j));
    prop_assert!(a.sub(&b).linf_norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE));
    Ok(())
}

/// State with only `A¹` nonzero.
pub fn a1_only(grid: &GridSpec, f: impl FnMut([f64; 3]) -> f64) -> ProcaState {
    let mut fields = ProcaFields::zeros(grid);
    fields.a[0] = ScalarField::from_fn(grid, f);
    ProcaState::new(fields, 0, 0.0)
}

/// Defect norms for `A¹ = sin 2π(x+y)` and for `A¹ = sin 2πx`,
/// `A¹ = sin 2πy`.
pub fn defect_witness(n: usize) -> (f64, f64, f64) {
    use std::f64::consts::PI;
    let g = GridSpec::unit_periodic(n, n, 1).unwrap();
    let p = Params::default();
    let diag = a1_only(&g, |x| (2.0 * PI * (x[0] + x[1])).sin());
    let xs = a1_only(&g, |x| (2.0 * PI * x[0]).sin());
    let ys = a1_only(&g, |x| (2.0 * PI * x[1]).sin());
    (
        ss_defect(&diag, &diag, &p).linf_norm(),
        ss_defect(&xs, &xs, &p).linf_norm(),
        ss_defect(&ys, &ys, &p).linf_norm(),
    )
}
