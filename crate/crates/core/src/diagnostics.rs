//! Constraints, discrete Hamiltonians and the residuals of the discrete
//! constraint-propagation and energy identities.
//!
//! Everything is evaluated on the interior set `D` only. Residual functions
//! take two consecutive accepted states and the parameters the step used;
//! the step size is `c·dt` from [`Params`].

use serde::{Deserialize, Serialize};

use crate::grid::{diff1, diff2, diff_bwd, diff_fwd, Axis, GridSpec, ScalarField};
use crate::model::{divergence, wide_laplacian, LambdaField, Params, ProcaState};
use crate::scheme::SchemeKind;

/// `C₁ = Π₀`.
pub fn constraint_c1(u: &ProcaState) -> ScalarField {
    u.fields.pi0.clone()
}

/// `C₂ = −p2 A⁰ − δᵢΠⁱ`, the discrete Gauss law.
pub fn constraint_c2(u: &ProcaState, params: &Params) -> ScalarField {
    u.fields.a0.scale(-params.p2).sub(&divergence(&u.fields.pi))
}

/// `out[m][n] = op(A_n, m)`, zero along single-cell axes.
fn vector_gradient(u: &ProcaState, op: fn(&ScalarField, Axis) -> ScalarField) -> [[ScalarField; 3]; 3] {
    let g = *u.grid();
    Axis::ALL.map(|m| {
        [0, 1, 2].map(|n| {
            if g.n_axis(m) > 1 {
                op(&u.fields.a[n], m)
            } else {
                ScalarField::zeros(&g)
            }
        })
    })
}

fn pointwise(grid: &GridSpec, mut f: impl FnMut(usize) -> f64) -> ScalarField {
    let mut out = ScalarField::zeros(grid);
    grid.for_each_interior(|idx, _| out.values_mut()[idx] = f(idx));
    out.fill_ghosts();
    out
}

/// Terms common to both densities that involve no derivatives of `Aⁱ`:
/// `½λΠ₀² − Π₀ δₘAᵐ + (p1/2)ΠₘΠᵐ − Πᵐ δₘA⁰ + (p2/2)(A⁰)² − (p2/2)AₘAᵐ`.
fn base_density(u: &ProcaState, params: &Params, lambda: &LambdaField) -> ScalarField {
    let g = *u.grid();
    let f = &u.fields;
    let lam = lambda.sample(&g, u.time).to_field(&g);
    let div_a = divergence(&f.a);
    let grad_a0 = crate::model::gradient(&f.a0);
    pointwise(&g, |i| {
        let pi0 = f.pi0.values()[i];
        let a0 = f.a0.values()[i];
        let mut h = 0.5 * lam.values()[i] * pi0 * pi0 - pi0 * div_a.values()[i] + 0.5 * params.p2 * a0 * a0;
        for m in 0..3 {
            let pm = f.pi[m].values()[i];
            let am = f.a[m].values()[i];
            h += 0.5 * params.p1 * pm * pm - pm * grad_a0[m].values()[i] - 0.5 * params.p2 * am * am;
        }
        h
    })
}

/// `(1/2p1)[(δₘAⁿ)(δᵐAₙ) − (δₙAᵐ)(δₘAⁿ)]` summed over `m, n`, for a given
/// gradient tensor; `weight` is 1 for SPS and ½ for each SS one-sided term.
fn gradient_energy(g: &[[ScalarField; 3]; 3], i: usize) -> f64 {
    let mut s = 0.0;
    for m in 0..3 {
        for n in 0..3 {
            let gmn = g[m][n].values()[i];
            s += gmn * gmn - g[n][m].values()[i] * gmn;
        }
    }
    s
}

/// Energy density of the structure-preserving scheme (central differences).
pub fn hamiltonian_density_sps(u: &ProcaState, params: &Params, lambda: &LambdaField) -> ScalarField {
    let base = base_density(u, params, lambda);
    let grad = vector_gradient(u, diff1);
    let k = 0.5 / params.p1;
    pointwise(u.grid(), |i| base.values()[i] + k * gradient_energy(&grad, i))
}

/// Energy density of the standard scheme: the gradient terms are averages of
/// forward and backward differences.
pub fn hamiltonian_density_ss(u: &ProcaState, params: &Params, lambda: &LambdaField) -> ScalarField {
    let base = base_density(u, params, lambda);
    let fwd = vector_gradient(u, diff_fwd);
    let bwd = vector_gradient(u, diff_bwd);
    let k = 0.25 / params.p1;
    pointwise(u.grid(), |i| {
        base.values()[i] + k * (gradient_energy(&fwd, i) + gradient_energy(&bwd, i))
    })
}

pub fn hamiltonian_density(u: &ProcaState, params: &Params, lambda: &LambdaField, kind: SchemeKind) -> ScalarField {
    match kind {
        SchemeKind::Sps => hamiltonian_density_sps(u, params, lambda),
        SchemeKind::Ss => hamiltonian_density_ss(u, params, lambda),
    }
}

/// `H_C = Σ_D ℋ ΔV` with the density matching `kind`.
pub fn total_hamiltonian(u: &ProcaState, params: &Params, lambda: &LambdaField, kind: SchemeKind) -> f64 {
    hamiltonian_density(u, params, lambda, kind).sum() * u.grid().cell_volume()
}

/// `(C₁⁺ − C₁)/(cΔt) − (C₂⁺ + C₂)/2`.
pub fn residual_id22(prev: &ProcaState, next: &ProcaState, params: &Params) -> ScalarField {
    let inv = 1.0 / params.c_dt();
    let rate = constraint_c1(next).sub(&constraint_c1(prev)).scale(inv);
    let avg = constraint_c2(next, params).add(&constraint_c2(prev, params)).scale(0.5);
    rate.sub(&avg)
}

/// `(C₂⁺ − C₂)/(cΔt) + (p2/4)(λ⁺ + λ)(C₁⁺ + C₁) − ½ δᵢδⁱ(C₁⁺ + C₁)`.
///
/// Vanishes for SPS steps. For SS steps it equals [`ss_defect`].
pub fn residual_id23(prev: &ProcaState, next: &ProcaState, params: &Params, lambda: &LambdaField) -> ScalarField {
    let g = *prev.grid();
    let inv = 1.0 / params.c_dt();
    let rate = constraint_c2(next, params).sub(&constraint_c2(prev, params)).scale(inv);
    let c1_sum = constraint_c1(next).add(&constraint_c1(prev));
    let lam_sum = lambda
        .sample(&g, next.time)
        .to_field(&g)
        .add(&lambda.sample(&g, prev.time).to_field(&g));
    let mass = lam_sum.zip_map(&c1_sum, |l, c| -0.25 * params.p2 * l * c);
    let lap = wide_laplacian(&c1_sum).scale(0.5);
    rate.sub(&mass.add(&lap))
}

/// Constraint source injected into the `C₂` rate by an SS step:
///
/// ```text
/// −(δ⟨1⟩ᵢ δ⟨2⟩ᵐₘ − δ⟨1⟩ₘ δ⟨2⟩ᵐᵢ)(Aⁱ⁺ + Aⁱ) / (2 p1)
/// ```
///
/// Terms with `i = m` cancel; the rest survive because compact and composed
/// second differences do not commute with `δ⟨1⟩`.
pub fn ss_defect(prev: &ProcaState, next: &ProcaState, params: &Params) -> ScalarField {
    let g = *prev.grid();
    let axes: Vec<Axis> = g.active_axes().collect();
    let sum = [0, 1, 2].map(|i| next.fields.a[i].add(&prev.fields.a[i]));
    let mut out = ScalarField::zeros(&g);
    for &i in &axes {
        let s = &sum[i.index()];
        for &m in &axes {
            if m == i {
                continue;
            }
            out.axpy(1.0, &diff1(&diff2(s, m, m), i));
            out.axpy(-1.0, &diff1(&diff2(s, m, i), m));
        }
    }
    out.scale(-0.5 / params.p1)
}

/// Discrete energy balance of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResidual {
    /// `(H_C⁺ − H_C)/(cΔt)`.
    pub rate: f64,
    /// `Σ_D (ΔV/4)((λ⁺ − λ)/(cΔt))((C₁⁺)² + (C₁)²)`.
    pub lambda_term: f64,
    /// `rate − lambda_term`.
    pub value: f64,
    /// False for SS, where the balance is reported without any guarantee.
    pub guaranteed: bool,
}

pub fn residual_id25(
    prev: &ProcaState,
    next: &ProcaState,
    params: &Params,
    lambda: &LambdaField,
    kind: SchemeKind,
) -> EnergyResidual {
    let g = *prev.grid();
    let inv = 1.0 / params.c_dt();
    let h0 = total_hamiltonian(prev, params, lambda, kind);
    let h1 = total_hamiltonian(next, params, lambda, kind);
    let rate = (h1 - h0) * inv;
    let dl = lambda
        .sample(&g, next.time)
        .to_field(&g)
        .sub(&lambda.sample(&g, prev.time).to_field(&g));
    let c1n = constraint_c1(next);
    let c1p = constraint_c1(prev);
    let mut lambda_term = 0.0;
    g.for_each_interior(|i, _| {
        let (a, b) = (c1n.values()[i], c1p.values()[i]);
        lambda_term += dl.values()[i] * (a * a + b * b);
    });
    lambda_term *= 0.25 * g.cell_volume() * inv;
    EnergyResidual {
        rate,
        lambda_term,
        value: rate - lambda_term,
        guaranteed: kind == SchemeKind::Sps,
    }
}

/// Per-step scalars written to the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub time: f64,
    pub c1_l2: f64,
    pub c2_l2: f64,
    pub hc: f64,
    pub hc_rel_err: f64,
    pub id22_res: f64,
    pub id23_res: f64,
    pub id25_res: f64,
    pub ss_defect_l2: Option<f64>,
    pub solver_iters: usize,
    pub max_abs_a1: f64,
    pub max_abs_field: f64,
}

/// Everything a record needs besides the two states.
#[derive(Debug, Clone)]
pub struct DiagnosticsContext {
    pub params: Params,
    pub lambda: LambdaField,
    pub kind: SchemeKind,
    /// `H_C` at the initial time.
    pub hc0: f64,
}

impl DiagnosticsContext {
    pub fn new(initial: &ProcaState, params: Params, lambda: LambdaField, kind: SchemeKind) -> Self {
        let hc0 = total_hamiltonian(initial, &params, &lambda, kind);
        Self {
            params,
            lambda,
            kind,
            hc0,
        }
    }

    /// `|H_C − H_C(0)| / |H_C(0)|`, or the absolute error when
    /// `|H_C(0)| < 1e-14`.
    pub fn hc_rel_err(&self, hc: f64) -> f64 {
        let err = (hc - self.hc0).abs();
        if self.hc0.abs() < 1e-14 {
            err
        } else {
            err / self.hc0.abs()
        }
    }
}

/// Assembles one record for `next`. Without a previous state (the initial
/// row) the identity residuals are reported as zero.
pub fn collect(prev: Option<&ProcaState>, next: &ProcaState, ctx: &DiagnosticsContext, solver_iters: usize) -> DiagnosticsRecord {
    let p = &ctx.params;
    let hc = total_hamiltonian(next, p, &ctx.lambda, ctx.kind);
    let (id22, id23, id25, defect) = match prev {
        Some(prev) => {
            let defect = (ctx.kind == SchemeKind::Ss).then(|| ss_defect(prev, next, p).l2_norm());
            (
                residual_id22(prev, next, p).linf_norm(),
                residual_id23(prev, next, p, &ctx.lambda).linf_norm(),
                residual_id25(prev, next, p, &ctx.lambda, ctx.kind).value,
                defect,
            )
        }
        None => (0.0, 0.0, 0.0, (ctx.kind == SchemeKind::Ss).then_some(0.0)),
    };
    DiagnosticsRecord {
        step: next.step,
        time: next.time,
        c1_l2: constraint_c1(next).l2_norm(),
        c2_l2: constraint_c2(next, p).l2_norm(),
        hc,
        hc_rel_err: ctx.hc_rel_err(hc),
        id22_res: id22,
        id23_res: id23,
        id25_res: id25,
        ss_defect_l2: defect,
        solver_iters,
        max_abs_a1: next.fields.a[0].linf_norm(),
        max_abs_field: next.fields.linf_norm(),
    }
}
