//! Physical parameters and the eight-field Proca state.
//!
//! The spatial metric is the Euclidean identity: upper and lower spatial
//! indices share one storage slot, so `A^i = A_i` and `Π^i = Π_i`.
//! Time derivatives are taken with respect to `x⁰ = c t`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ProcaError, Result};
use crate::grid::{diff1, Axis, GridSpec, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Speed of light.
    pub c: f64,
    /// Kinetic coefficient, nonzero.
    pub p1: f64,
    /// Mass-term coefficient, `c²m²/ħ²` for a physical mass.
    pub p2: f64,
    /// Constant value of the gauge variable λ.
    pub lambda0: f64,
    /// Time step.
    pub dt: f64,
    /// Initial-data amplitude.
    pub a: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            c: 1.0,
            p1: 1.0,
            p2: 1.0,
            lambda0: 0.01,
            dt: 1.0 / 200.0,
            a: 1.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ProcaError::InvalidParams(msg.to_string()));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c must be positive");
        }
        if self.p1 == 0.0 || !self.p1.is_finite() {
            return bad("p1 must be nonzero");
        }
        if !self.p2.is_finite() {
            return bad("p2 must be finite");
        }
        if self.lambda0 == 0.0 || !self.lambda0.is_finite() {
            return bad("lambda must be nonzero");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !self.a.is_finite() {
            return bad("amplitude must be finite");
        }
        Ok(())
    }

    /// Step in `x⁰`, the only combination of `c` and `dt` the schemes see.
    pub fn c_dt(&self) -> f64 {
        self.c * self.dt
    }
}

pub type LambdaFn = dyn Fn(f64, [f64; 3]) -> f64 + Send + Sync;

/// The gauge variable λ: a global constant, or a prescribed function of
/// `(t, x)`.
#[derive(Clone)]
pub enum LambdaField {
    Constant(f64),
    Prescribed(Arc<LambdaFn>),
}

impl fmt::Debug for LambdaField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaField::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            LambdaField::Prescribed(_) => f.write_str("Prescribed(..)"),
        }
    }
}

impl LambdaField {
    pub fn constant(value: f64) -> Result<Self> {
        if value == 0.0 || !value.is_finite() {
            return Err(ProcaError::InvalidParams(format!("lambda must be nonzero, got {value}")));
        }
        Ok(LambdaField::Constant(value))
    }

    /// The function must not vanish anywhere it is sampled.
    pub fn prescribed(f: impl Fn(f64, [f64; 3]) -> f64 + Send + Sync + 'static) -> Self {
        LambdaField::Prescribed(Arc::new(f))
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            LambdaField::Constant(v) => Some(*v),
            LambdaField::Prescribed(_) => None,
        }
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> LambdaValues {
        match self {
            LambdaField::Constant(v) => LambdaValues::Uniform(*v),
            LambdaField::Prescribed(f) => LambdaValues::Field(ScalarField::from_fn(grid, |x| f(t, x))),
        }
    }

    /// `(λ(t0) + λ(t1)) / 2`, the coefficient of the time-averaged `Π₀` in
    /// the implicit `A⁰` update.
    pub fn midpoint(&self, grid: &GridSpec, t0: f64, t1: f64) -> LambdaValues {
        match self {
            LambdaField::Constant(v) => LambdaValues::Uniform(*v),
            LambdaField::Prescribed(f) => {
                LambdaValues::Field(ScalarField::from_fn(grid, |x| 0.5 * (f(t0, x) + f(t1, x))))
            }
        }
    }
}

/// λ sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaValues {
    Uniform(f64),
    Field(ScalarField),
}

impl LambdaValues {
    /// Pointwise product `λ f`.
    pub fn times(&self, f: &ScalarField) -> ScalarField {
        match self {
            LambdaValues::Uniform(v) => f.scale(*v),
            LambdaValues::Field(l) => l.zip_map(f, |a, b| a * b),
        }
    }

    pub fn to_field(&self, grid: &GridSpec) -> ScalarField {
        match self {
            LambdaValues::Uniform(v) => ScalarField::constant(grid, *v),
            LambdaValues::Field(l) => l.clone(),
        }
    }
}

pub const FIELD_NAMES: [&str; 8] = ["A0", "Pi0", "A1", "A2", "A3", "Pi1", "Pi2", "Pi3"];

/// The eight dynamical fields `A⁰, Π₀, Aⁱ, Πᵢ` at one time level. Also used
/// for time derivatives and solver iterates, which share the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcaFields {
    pub a0: ScalarField,
    pub pi0: ScalarField,
    pub a: [ScalarField; 3],
    pub pi: [ScalarField; 3],
}

impl ProcaFields {
    pub fn zeros(grid: &GridSpec) -> Self {
        let z = ScalarField::zeros(grid);
        Self {
            a0: z.clone(),
            pi0: z.clone(),
            a: [z.clone(), z.clone(), z.clone()],
            pi: [z.clone(), z.clone(), z],
        }
    }

    /// Builds from fields in [`FIELD_NAMES`] order.
    pub fn from_array(fields: [ScalarField; 8]) -> Self {
        let [a0, pi0, a1, a2, a3, p1, p2, p3] = fields;
        let g = *a0.grid();
        for f in [&pi0, &a1, &a2, &a3, &p1, &p2, &p3] {
            assert_eq!(*f.grid(), g, "all fields must share one grid");
        }
        Self {
            a0,
            pi0,
            a: [a1, a2, a3],
            pi: [p1, p2, p3],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.a0.grid()
    }

    /// Fields in [`FIELD_NAMES`] order.
    pub fn iter(&self) -> [&ScalarField; 8] {
        let [a1, a2, a3] = &self.a;
        let [p1, p2, p3] = &self.pi;
        [&self.a0, &self.pi0, a1, a2, a3, p1, p2, p3]
    }

    pub fn iter_mut(&mut self) -> [&mut ScalarField; 8] {
        let [a1, a2, a3] = &mut self.a;
        let [p1, p2, p3] = &mut self.pi;
        [&mut self.a0, &mut self.pi0, a1, a2, a3, p1, p2, p3]
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_array(self.iter().map(f))
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        let o = other.iter();
        let mut k = 0;
        Self::from_array(self.iter().map(|s| {
            let r = f(s, o[k]);
            k += 1;
            r
        }))
    }

    pub fn fill_ghosts(&mut self) {
        for f in self.iter_mut() {
            f.fill_ghosts();
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, ScalarField::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, ScalarField::sub)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|f| f.scale(s))
    }

    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.iter_mut().into_iter().zip(other.iter()) {
            a.axpy(alpha, b);
        }
    }

    /// Interior inner product summed over all eight fields.
    pub fn dot(&self, other: &Self) -> f64 {
        self.iter().iter().zip(other.iter()).map(|(a, b)| a.dot(b)).sum()
    }

    /// Unweighted Euclidean norm of the interior values.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Largest interior magnitude over all eight fields.
    pub fn linf_norm(&self) -> f64 {
        self.iter().iter().map(|f| f.linf_norm()).fold(0.0, f64::max)
    }

    /// Per-field interior maxima, in [`FIELD_NAMES`] order.
    pub fn linf_norms(&self) -> [f64; 8] {
        self.iter().map(|f| f.linf_norm())
    }

    pub fn is_finite(&self) -> bool {
        self.iter().iter().all(|f| f.values().iter().all(|v| v.is_finite()))
    }
}

/// Fields plus time metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcaState {
    pub fields: ProcaFields,
    /// Step index ℓ.
    pub step: u64,
    /// Physical time `t`.
    pub time: f64,
}

impl ProcaState {
    pub fn new(fields: ProcaFields, step: u64, time: f64) -> Self {
        Self { fields, step, time }
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self::new(ProcaFields::zeros(grid), 0, 0.0)
    }

    pub fn grid(&self) -> &GridSpec {
        self.fields.grid()
    }
}

/// `Σ_i δ_i F_i` over the axes that carry nonzero differences.
pub(crate) fn divergence(v: &[ScalarField; 3]) -> ScalarField {
    let g = *v[0].grid();
    let mut out = ScalarField::zeros(&g);
    for axis in g.active_axes() {
        out.axpy(1.0, &diff1(&v[axis.index()], axis));
    }
    out
}

/// `Σ_m δ_m δ_m f` with central first differences.
pub(crate) fn wide_laplacian(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    let mut out = ScalarField::zeros(&g);
    for axis in g.active_axes() {
        out.axpy(1.0, &diff1(&diff1(f, axis), axis));
    }
    out
}

/// Gradient with central differences; zero on inactive axes.
pub(crate) fn gradient(f: &ScalarField) -> [ScalarField; 3] {
    Axis::ALL.map(|a| {
        if f.grid().n_axis(a) > 1 {
            diff1(f, a)
        } else {
            ScalarField::zeros(f.grid())
        }
    })
}

/// Rows shared by every scheme: the `A⁰`, `Π₀` and `Aⁱ` right-hand sides and
/// the part of the `Πᵢ` row without second derivatives.
pub(crate) struct SharedRows {
    pub a0: ScalarField,
    pub pi0: ScalarField,
    pub a: [ScalarField; 3],
    /// `p2 Aᵢ - δᵢ Π₀`
    pub pi_base: [ScalarField; 3],
}

pub(crate) fn shared_rows(u: &ProcaFields, params: &Params, lambda: &LambdaValues) -> SharedRows {
    let div_a = divergence(&u.a);
    let div_pi = divergence(&u.pi);
    let grad_a0 = gradient(&u.a0);
    let grad_pi0 = gradient(&u.pi0);

    let a0 = lambda.times(&u.pi0).sub(&div_a);
    let pi0 = u.a0.scale(-params.p2).sub(&div_pi);
    let a = [0, 1, 2].map(|i| u.pi[i].scale(params.p1).sub(&grad_a0[i]));
    let pi_base = [0, 1, 2].map(|i| u.a[i].scale(params.p2).sub(&grad_pi0[i]));
    SharedRows { a0, pi0, a, pi_base }
}

/// Canonical right-hand side with every spatial derivative realized by
/// central first differences (second derivatives as `δ⟨1⟩∘δ⟨1⟩`):
///
/// ```text
/// ∂₀A⁰ = λΠ₀ − δᵢAⁱ
/// ∂₀Π₀ = −p2 A⁰ − δᵢΠⁱ
/// ∂₀Aⁱ = p1 Πⁱ − δⁱA⁰
/// ∂₀Πᵢ = p2 Aᵢ − δᵢΠ₀ + (δⱼδʲAᵢ − δᵢδⱼAʲ) / p1
/// ```
pub fn rhs_with(u: &ProcaFields, params: &Params, lambda: &LambdaValues) -> ProcaFields {
    let rows = shared_rows(u, params, lambda);
    let div_a = divergence(&u.a);
    let grad_div_a = gradient(&div_a);
    let inv_p1 = 1.0 / params.p1;
    let pi = [0, 1, 2].map(|i| {
        let curl_curl = wide_laplacian(&u.a[i]).sub(&grad_div_a[i]);
        let mut row = rows.pi_base[i].clone();
        row.axpy(inv_p1, &curl_curl);
        row
    });
    ProcaFields {
        a0: rows.a0,
        pi0: rows.pi0,
        a: rows.a,
        pi,
    }
}

/// Time derivative (with respect to `x⁰`) of `state`, λ sampled at the
/// state's time. Ghosts of every input field must be filled.
pub fn continuum_rhs(state: &ProcaState, params: &Params, lambda: &LambdaField) -> ProcaFields {
    let lv = lambda.sample(state.grid(), state.time);
    rhs_with(&state.fields, params, &lv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::unit_periodic(16, 12, 1).unwrap()
    }

    fn smooth(g: &GridSpec, k: f64, phase: f64) -> ScalarField {
        ScalarField::from_fn(g, |x| (2.0 * PI * (x[0] + k * x[1]) + phase).sin() + 0.3 * (2.0 * PI * x[1]).cos())
    }

    fn sample_fields(g: &GridSpec, seed: f64) -> ProcaFields {
        ProcaFields::from_array([0, 1, 2, 3, 4, 5, 6, 7].map(|j| smooth(g, 1.0 + (j % 3) as f64, seed + j as f64)))
    }

    #[test]
    fn zero_state_has_zero_derivative() {
        let g = grid();
        let s = ProcaState::zeros(&g);
        let r = continuum_rhs(&s, &Params::default(), &LambdaField::Constant(0.01));
        assert_eq!(r.linf_norm(), 0.0);
    }

    #[test]
    fn constant_pi0_drives_only_a0() {
        let g = grid();
        let mut s = ProcaState::zeros(&g);
        s.fields.pi0 = ScalarField::constant(&g, 1.0);
        let r = continuum_rhs(&s, &Params::default(), &LambdaField::Constant(0.01));
        assert!(r.a0.interior().iter().all(|&v| v == 0.01));
        assert_eq!(r.pi0.linf_norm(), 0.0);
        for i in 0..3 {
            assert_eq!(r.a[i].linf_norm(), 0.0);
            assert_eq!(r.pi[i].linf_norm(), 0.0);
        }
    }

    #[test]
    fn rhs_is_linear() {
        let g = grid();
        let p = Params { p1: 1.3, p2: 0.7, ..Params::default() };
        let lam = LambdaValues::Uniform(0.02);
        let u = sample_fields(&g, 0.1);
        let v = sample_fields(&g, 1.7);
        let (alpha, beta) = (0.37, -2.1);
        let combo = u.scale(alpha).add(&v.scale(beta));
        let lhs = rhs_with(&combo, &p, &lam);
        let rhs = rhs_with(&u, &p, &lam).scale(alpha).add(&rhs_with(&v, &p, &lam).scale(beta));
        let scale = lhs.linf_norm();
        assert!(lhs.sub(&rhs).linf_norm() <= 1e-13 * scale);
    }

    #[test]
    fn prescribed_lambda_enters_a0_row_pointwise() {
        let g = grid();
        let mut s = ProcaState::zeros(&g);
        s.time = 2.0;
        s.fields.pi0 = ScalarField::constant(&g, 3.0);
        let lam = LambdaField::prescribed(|t, x| 0.01 + 0.001 * t + 0.1 * x[0]);
        let r = continuum_rhs(&s, &Params::default(), &lam);
        g.for_each_interior(|_, [i1, i2, i3]| {
            let x = g.position(i1, i2, i3);
            let want = 3.0 * (0.012 + 0.1 * x[0]);
            assert!((r.a0.get(i1, i2, i3) - want).abs() < 1e-15);
        });
    }

    #[test]
    fn params_validation() {
        assert!(Params::default().validate().is_ok());
        assert!(Params { p1: 0.0, ..Params::default() }.validate().is_err());
        assert!(Params { lambda0: 0.0, ..Params::default() }.validate().is_err());
        assert!(Params { dt: 0.0, ..Params::default() }.validate().is_err());
        assert!(LambdaField::constant(0.0).is_err());
    }
}
