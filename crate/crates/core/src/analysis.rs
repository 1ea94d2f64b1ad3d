//! Mode analysis: constraint-propagation eigenvalues, CFL bookkeeping,
//! convergence orders and measured spectral radii of the discrete update.

use nalgebra::Schur;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ProcaError, Result};
use crate::grid::GridSpec;
use crate::model::Params;
use crate::scheme::{grid_amplification_matrix, grid_mode_symbols, signed_index, Matrix8, SchemeKind};

/// Eigen-analysis of the 2×2 constraint system `(C1, C2)` for one
/// wavevector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintModeReport {
    pub h: [f64; 3],
    /// `p2 λ + h·h`.
    pub discriminant: f64,
    pub eigenvalues: [Complex64; 2],
    pub growing: bool,
}

/// Eigenvalues of `[[0, 1], [−p2 λ − h·h, 0]]`.
pub fn constraint_eigenvalues(h: [f64; 3], p2: f64, lambda: f64) -> ConstraintModeReport {
    let hh: f64 = h.iter().map(|x| x * x).sum();
    constraint_eigenvalues_hh(h, hh, p2, lambda)
}

fn constraint_eigenvalues_hh(h: [f64; 3], hh: f64, p2: f64, lambda: f64) -> ConstraintModeReport {
    let disc = p2 * lambda + hh;
    let eigenvalues = if disc >= 0.0 {
        let w = disc.sqrt();
        [Complex64::new(0.0, w), Complex64::new(0.0, -w)]
    } else {
        let w = (-disc).sqrt();
        [Complex64::new(w, 0.0), Complex64::new(-w, 0.0)]
    };
    ConstraintModeReport {
        h,
        discriminant: disc,
        eigenvalues,
        growing: disc < 0.0,
    }
}

/// `dt = cfl · min(dx over active axes) / c`.
pub fn cfl_timestep(grid: &GridSpec, cfl: f64, c: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl.is_finite()) {
        return Err(ProcaError::InvalidParams(format!("cfl must be positive, got {cfl}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(ProcaError::InvalidParams(format!("c must be positive, got {c}")));
    }
    let dx = grid
        .active_axes()
        .map(|a| grid.dx_axis(a))
        .fold(f64::INFINITY, f64::min);
    if !dx.is_finite() {
        return Err(ProcaError::InvalidGrid("no axis with more than one cell".into()));
    }
    Ok(cfl * dx / c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOrder {
    /// Order from the two finest resolutions.
    pub order: f64,
    /// Orders of successive pairs, coarse to fine.
    pub pairwise: Vec<f64>,
    /// False when the errors do not decrease with the spacing.
    pub monotone: bool,
}

/// Observed order `ln(e_coarse / e_fine) / ln(dx_coarse / dx_fine)` from
/// `(spacing, error)` pairs in any order.
pub fn convergence_order(series: &[(f64, f64)]) -> Result<ConvergenceOrder> {
    if series.len() < 2 {
        return Err(ProcaError::InvalidParams("need at least two resolutions".into()));
    }
    if series.iter().any(|&(dx, e)| !(dx > 0.0) || !(e > 0.0)) {
        return Err(ProcaError::InvalidParams("spacings and errors must be positive".into()));
    }
    let mut s = series.to_vec();
    s.sort_by(|a, b| b.0.total_cmp(&a.0));
    if s.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(ProcaError::InvalidParams("duplicate spacing".into()));
    }
    let pairwise: Vec<f64> = s
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    let monotone = s.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(ConvergenceOrder {
        order: *pairwise.last().expect("two or more points"),
        pairwise,
        monotone,
    })
}

/// Eigenvalues of a complex 8×8 matrix from its Schur form.
pub fn eigenvalues(m: &Matrix8) -> Option<[Complex64; 8]> {
    let schur = Schur::try_new(*m, 1e-15, 100_000)?;
    let (_, t) = schur.unpack();
    let mut out = [Complex64::default(); 8];
    let mut i = 0;
    while i < 8 {
        let split = i == 7 || t[(i + 1, i)].norm() <= 1e-14 * (t[(i, i)].norm() + t[(i + 1, i + 1)].norm());
        if split {
            out[i] = t[(i, i)];
            i += 1;
        } else {
            // unreduced 2×2 block
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = (a + d) * 0.5;
            let root = (half_tr * half_tr - (a * d - b * c)).sqrt();
            out[i] = half_tr + root;
            out[i + 1] = half_tr - root;
            i += 2;
        }
    }
    Some(out)
}

/// Largest eigenvalue modulus. Falls back to the power oracle if the Schur
/// iteration does not converge.
pub fn spectral_radius(m: &Matrix8) -> f64 {
    match eigenvalues(m) {
        Some(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => power_radius(m, 32),
    }
}

/// `‖G^(2^squarings)‖^(2^−squarings)` by repeated normalized squaring.
pub fn power_radius(m: &Matrix8, squarings: u32) -> f64 {
    let mut b = *m;
    let mut log_c = 0.0f64;
    let n0 = b.norm();
    if n0 == 0.0 {
        return 0.0;
    }
    b /= Complex64::new(n0, 0.0);
    log_c += n0.ln();
    for _ in 0..squarings {
        b = b * b;
        let nb = b.norm();
        if nb == 0.0 {
            return 0.0;
        }
        b /= Complex64::new(nb, 0.0);
        log_c = 2.0 * log_c + nb.ln();
    }
    (log_c / 2f64.powi(squarings as i32)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRadius {
    pub k: [isize; 3],
    pub h: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub scheme: SchemeKind,
    pub modes: Vec<ModeRadius>,
    pub max_radius: f64,
    pub argmax: [isize; 3],
    /// `ln(max_radius) / (c dt)`, the fastest growth rate in `x⁰`.
    pub max_growth_rate: f64,
}

fn grid_modes(grid: &GridSpec) -> Vec<[isize; 3]> {
    let n = grid.n();
    let mut out = Vec::with_capacity(grid.interior_len());
    for k3 in 0..n[2] {
        for k2 in 0..n[1] {
            for k1 in 0..n[0] {
                out.push([signed_index(k1, n[0]), signed_index(k2, n[1]), signed_index(k3, n[2])]);
            }
        }
    }
    out
}

/// Spectral radius of the one-step amplification matrix for every
/// representable mode of `grid`, in DFT storage order.
pub fn stability_report(scheme: SchemeKind, params: &Params, lambda: f64, grid: &GridSpec) -> Result<StabilityReport> {
    let modes = grid_modes(grid)
        .into_par_iter()
        .map(|k| {
            let g = grid_amplification_matrix(scheme, params, lambda, grid, k)?;
            Ok(ModeRadius {
                k,
                h: grid_mode_symbols(grid, k).h,
                radius: spectral_radius(&g),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = modes
        .iter()
        .fold(&modes[0], |b, m| if m.radius > b.radius { m } else { b });
    Ok(StabilityReport {
        scheme,
        max_radius: best.radius,
        argmax: best.k,
        max_growth_rate: best.radius.ln() / params.c_dt(),
        modes,
    })
}

/// One row of the mode table: the constraint eigenvalues under both readings
/// of the wavevector, and the amplification radius of each scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub k: [isize; 3],
    /// Continuum wavevector `2πk / L`.
    pub continuum: ConstraintModeReport,
    /// Same analysis with `h·h` replaced by the central-difference modified
    /// wavenumber `Σ sin²(h dx)/dx²`.
    pub modified: ConstraintModeReport,
    pub radius_sps: f64,
    pub radius_ss: f64,
}

pub fn mode_table(params: &Params, lambda: f64, grid: &GridSpec) -> Result<Vec<ModeRow>> {
    grid_modes(grid)
        .into_par_iter()
        .map(|k| {
            let sym = grid_mode_symbols(grid, k);
            let radius = |s| grid_amplification_matrix(s, params, lambda, grid, k).map(|g| spectral_radius(&g));
            Ok(ModeRow {
                k,
                continuum: constraint_eigenvalues(sym.h, params.p2, lambda),
                modified: constraint_eigenvalues_hh(sym.h, sym.first_sq(), params.p2, lambda),
                radius_sps: radius(SchemeKind::Sps)?,
                radius_ss: radius(SchemeKind::Ss)?,
            })
        })
        .collect()
}
