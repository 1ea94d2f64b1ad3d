//! Fourier symbols of the stencils and the per-mode update matrices.
//!
//! On a periodic grid every stencil is translation invariant, so a plane wave
//! `exp(i h·x)` is an eigenfunction:
//!
//! ```text
//! diff1      ↦ i sin(h dx) / dx
//! diff2 (ii) ↦ −4 sin²(h dx / 2) / dx²
//! ```
//!
//! Field order in every vector and matrix is `A⁰, Π₀, A¹, A², A³, Π₁, Π₂, Π₃`.

use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::SchemeKind;
use crate::error::{ProcaError, Result};
use crate::grid::GridSpec;
use crate::model::Params;

pub type Matrix8 = SMatrix<Complex64, 8, 8>;
pub type Vector8 = SVector<Complex64, 8>;

const A0: usize = 0;
const PI0: usize = 1;
const A: [usize; 3] = [2, 3, 4];
const PI_: [usize; 3] = [5, 6, 7];

/// Per-axis stencil symbols for one wavevector. Axes with a single cell have
/// both symbols zero, matching the vanishing real-space differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSymbols {
    /// Wavevector in radians per unit length.
    pub h: [f64; 3],
    /// `sin(h dx)/dx`; the central difference acts as multiplication by
    /// `i * first`.
    pub first: [f64; 3],
    /// `−4 sin²(h dx/2)/dx²`, the compact second difference.
    pub compact: [f64; 3],
}

impl ModeSymbols {
    /// `Σ first²`, the squared modified wavenumber of the central difference.
    pub fn first_sq(&self) -> f64 {
        self.first.iter().map(|s| s * s).sum()
    }
}

/// Symbols for an arbitrary wavevector `h`.
pub fn mode_symbols(grid: &GridSpec, h: [f64; 3]) -> ModeSymbols {
    let n = grid.n();
    let dx = grid.dx();
    let mut first = [0.0; 3];
    let mut compact = [0.0; 3];
    for a in 0..3 {
        if n[a] > 1 {
            first[a] = (h[a] * dx[a]).sin() / dx[a];
            let s = (0.5 * h[a] * dx[a]).sin();
            compact[a] = -4.0 * s * s / (dx[a] * dx[a]);
        }
    }
    ModeSymbols { h, first, compact }
}

/// Signed integer wavenumber of DFT index `k` on `n` points.
pub fn signed_index(k: usize, n: usize) -> isize {
    if 2 * k > n {
        k as isize - n as isize
    } else {
        k as isize
    }
}

/// `sin(2π k / n)` with exact zeros at `k ≡ 0` and `2k ≡ n`, and exact odd
/// symmetry in `k`, so real fields stay conjugate symmetric in mode space.
fn sin_two_pi_frac(k: isize, n: usize) -> f64 {
    let n_i = n as isize;
    let k = k.rem_euclid(n_i);
    if k == 0 || 2 * k == n_i {
        return 0.0;
    }
    let (sign, kk) = if 2 * k > n_i { (-1.0, n_i - k) } else { (1.0, k) };
    sign * (2.0 * PI * kk as f64 / n as f64).sin()
}

/// Symbols of the grid-representable mode with signed wavenumbers `k`.
pub fn grid_mode_symbols(grid: &GridSpec, k: [isize; 3]) -> ModeSymbols {
    let n = grid.n();
    let dx = grid.dx();
    let ext = grid.extent();
    let mut out = ModeSymbols {
        h: [0.0; 3],
        first: [0.0; 3],
        compact: [0.0; 3],
    };
    for a in 0..3 {
        out.h[a] = 2.0 * PI * k[a] as f64 / ext[a];
        if n[a] > 1 {
            out.first[a] = sin_two_pi_frac(k[a], n[a]) / dx[a];
            // sin²(π k/n) = (1 − cos(2π k/n)) / 2, evaluated on |k| for evenness
            let s = (PI * k[a].unsigned_abs() as f64 / n[a] as f64).sin();
            out.compact[a] = -4.0 * s * s / (dx[a] * dx[a]);
        }
    }
    out
}

/// The matrix `M(h)` with `∂₀ û = M(h) û` for the scheme's spatial operator.
pub fn symbol_matrix(scheme: SchemeKind, params: &Params, lambda: f64, sym: &ModeSymbols) -> Matrix8 {
    let c = |re: f64| Complex64::new(re, 0.0);
    let d = sym.first.map(|s| Complex64::new(0.0, s));
    let inv_p1 = 1.0 / params.p1;
    let mut m = Matrix8::zeros();

    m[(A0, PI0)] = c(lambda);
    m[(PI0, A0)] = c(-params.p2);
    for i in 0..3 {
        m[(A0, A[i])] -= d[i];
        m[(PI0, PI_[i])] -= d[i];
        m[(A[i], PI_[i])] += c(params.p1);
        m[(A[i], A0)] -= d[i];
        m[(PI_[i], PI0)] -= d[i];
        m[(PI_[i], A[i])] += c(params.p2);
        for k in 0..3 {
            match scheme {
                SchemeKind::Sps => {
                    m[(PI_[i], A[i])] += d[k] * d[k] * inv_p1;
                    m[(PI_[i], A[k])] -= d[i] * d[k] * inv_p1;
                }
                SchemeKind::Ss => {
                    m[(PI_[i], A[i])] += c(sym.compact[k] * inv_p1);
                    let mixed = if i == k { c(sym.compact[i]) } else { d[i] * d[k] };
                    m[(PI_[i], A[k])] -= mixed * inv_p1;
                }
            }
        }
    }
    m
}

/// `G = (I − τM)⁻¹ (I + τM)`, `τ = cΔt/2`.
pub(crate) fn cayley(m: &Matrix8, tau: f64, h: [f64; 3]) -> Result<Matrix8> {
    let id = Matrix8::identity();
    let t = Complex64::new(tau, 0.0);
    let lhs = id - m * t;
    let rhs = id + m * t;
    let lu = lhs.lu();
    let u = lu.u();
    let scale = lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_pivot = (0..8).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-13 * scale) {
        return Err(ProcaError::SingularMode { wavevector: h });
    }
    lu.solve(&rhs).ok_or(ProcaError::SingularMode { wavevector: h })
}

/// Amplification matrix of one step for wavevector `h` (radians per unit
/// length), with `τ = c·dt/2` from `params`.
pub fn amplification_matrix(
    scheme: SchemeKind,
    params: &Params,
    lambda: f64,
    grid: &GridSpec,
    h: [f64; 3],
) -> Result<Matrix8> {
    let sym = mode_symbols(grid, h);
    let m = symbol_matrix(scheme, params, lambda, &sym);
    cayley(&m, 0.5 * params.c_dt(), h)
}

/// Amplification matrix of the grid mode with signed wavenumbers `k`, using
/// the exact grid symbols the spectral solver uses.
pub fn grid_amplification_matrix(
    scheme: SchemeKind,
    params: &Params,
    lambda: f64,
    grid: &GridSpec,
    k: [isize; 3],
) -> Result<Matrix8> {
    let sym = grid_mode_symbols(grid, k);
    let m = symbol_matrix(scheme, params, lambda, &sym);
    cayley(&m, 0.5 * params.c_dt(), sym.h)
}
