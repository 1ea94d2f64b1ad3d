//! Direct solve of the implicit update in mode space.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::symbol::{cayley, grid_mode_symbols, signed_index, symbol_matrix, Matrix8, Vector8};
use super::LinearStepSystem;
use crate::error::{ProcaError, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::model::ProcaFields;

/// Separable 3-D FFT over interior arrays in grid storage order (axis 1
/// fastest). The inverse is normalized.
#[derive(Clone)]
pub struct Fft3 {
    n: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: n.map(|k| planner.plan_fft_forward(k)),
            inverse: n.map(|k| planner.plan_fft_inverse(k)),
        }
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.forward);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.inverse);
        let s = 1.0 / self.len() as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(buf.len(), self.len());
        let [n1, n2, n3] = self.n;
        if n1 > 1 {
            plans[0].process(buf);
        }
        let strided = |buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>, len: usize, stride: usize, starts: &mut dyn Iterator<Item = usize>| {
            let mut line = vec![Complex64::default(); len];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            for s in starts {
                for (j, z) in line.iter_mut().enumerate() {
                    *z = buf[s + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (j, z) in line.iter().enumerate() {
                    buf[s + j * stride] = *z;
                }
            }
        };
        if n2 > 1 {
            let mut starts = (0..n3).flat_map(|k3| (0..n1).map(move |k1| k3 * n1 * n2 + k1));
            strided(buf, &plans[1], n2, n1, &mut starts);
        }
        if n3 > 1 {
            let mut starts = 0..n1 * n2;
            strided(buf, &plans[2], n3, n1 * n2, &mut starts);
        }
    }
}

/// Per-mode amplification matrices of one system on one grid.
#[derive(Debug)]
pub struct SpectralSolver {
    grid: GridSpec,
    fft: Fft3,
    gains: Vec<Matrix8>,
    /// `(m, mirror(m))` for every mode with `m <= mirror(m)`, where the
    /// mirror carries the negated wavevector.
    pairs: Vec<(usize, usize)>,
}

impl SpectralSolver {
    pub fn new(system: &LinearStepSystem, grid: &GridSpec) -> Result<Self> {
        let lambda = system.lambda.constant_value().ok_or_else(|| {
            ProcaError::Config("the spectral solver requires a constant lambda; use the iterative solver".into())
        })?;
        let n = grid.n();
        let tau = 0.5 * system.c_dt();
        let mirror = |m: usize| {
            let k = [m % n[0], (m / n[0]) % n[1], m / (n[0] * n[1])];
            let r = [0, 1, 2].map(|a| (n[a] - k[a]) % n[a]);
            r[0] + n[0] * (r[1] + n[1] * r[2])
        };
        let pairs: Vec<(usize, usize)> = (0..grid.interior_len())
            .map(|m| (m, mirror(m)))
            .filter(|&(m, mm)| m <= mm)
            .collect();
        let half = pairs
            .par_iter()
            .map(|&(m, _)| {
                let k = [m % n[0], (m / n[0]) % n[1], m / (n[0] * n[1])];
                let ks = [0, 1, 2].map(|a| signed_index(k[a], n[a]));
                let sym = grid_mode_symbols(grid, ks);
                let mm = symbol_matrix(system.scheme, &system.params, lambda, &sym);
                cayley(&mm, tau, sym.h)
            })
            .collect::<Result<Vec<_>>>()?;
        // G(−h) = conj G(h) because every symbol is exactly odd or even in h
        let mut gains = vec![Matrix8::zeros(); grid.interior_len()];
        for (&(m, mm), g) in pairs.iter().zip(half) {
            gains[mm] = g.map(|z| z.conj());
            gains[m] = g;
        }
        Ok(Self {
            grid: *grid,
            fft: Fft3::new(n),
            gains,
            pairs,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Amplification matrix of DFT mode index `m` (storage order).
    pub fn gain(&self, m: usize) -> &Matrix8 {
        &self.gains[m]
    }

    /// Mode coefficients of the eight fields, interleaved per mode.
    pub fn to_modes(&self, u: &ProcaFields) -> Vec<Vector8> {
        let bufs: Vec<Vec<Complex64>> = u
            .iter()
            .into_par_iter()
            .map(|f| {
                let mut b: Vec<Complex64> = f.interior().into_iter().map(|v| Complex64::new(v, 0.0)).collect();
                self.fft.forward(&mut b);
                b
            })
            .collect();
        (0..self.gains.len())
            .map(|m| Vector8::from_fn(|j, _| bufs[j][m]))
            .collect()
    }

    /// Inverse of [`to_modes`](Self::to_modes). Returns the fields and the
    /// largest discarded imaginary part.
    pub fn from_modes(&self, modes: &[Vector8]) -> (ProcaFields, f64) {
        let out: Vec<(ScalarField, f64)> = (0..8usize)
            .into_par_iter()
            .map(|j| {
                let mut b: Vec<Complex64> = modes.iter().map(|v| v[j]).collect();
                self.fft.inverse(&mut b);
                let imag = b.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
                let re: Vec<f64> = b.iter().map(|z| z.re).collect();
                (ScalarField::from_interior(&self.grid, &re), imag)
            })
            .collect();
        let imag = out.iter().fold(0.0f64, |m, (_, i)| m.max(*i));
        let fields: Vec<ScalarField> = out.into_iter().map(|(f, _)| f).collect();
        let arr: [ScalarField; 8] = fields.try_into().expect("eight fields");
        (ProcaFields::from_array(arr), imag)
    }

    /// Solves `(I − τL) u⁺ = (I + τL) u` exactly, mode by mode.
    ///
    /// Fields are transformed in pairs packed as `f + i g`, and the gains are
    /// applied on half of the spectrum; the other half follows by conjugate
    /// symmetry, so the output is real by construction.
    pub fn solve(&self, u: &ProcaFields) -> ProcaFields {
        let f = u.iter();
        let packed: Vec<Vec<Complex64>> = (0..4usize)
            .into_par_iter()
            .map(|p| {
                let (a, b) = (f[2 * p].interior(), f[2 * p + 1].interior());
                let mut z: Vec<Complex64> = a.iter().zip(&b).map(|(&x, &y)| Complex64::new(x, y)).collect();
                self.fft.forward(&mut z);
                z
            })
            .collect();

        let half_i = Complex64::new(0.0, -0.5);
        let out: Vec<Vector8> = self
            .pairs
            .par_iter()
            .map(|&(m, mm)| {
                let v = Vector8::from_fn(|j, _| {
                    let (z, zc) = (packed[j / 2][m], packed[j / 2][mm].conj());
                    if j % 2 == 0 {
                        (z + zc) * 0.5
                    } else {
                        (z - zc) * half_i
                    }
                });
                self.gains[m] * v
            })
            .collect();

        let i = Complex64::i();
        let mut bufs = vec![vec![Complex64::default(); self.gains.len()]; 4];
        for (&(m, mm), w) in self.pairs.iter().zip(&out) {
            for (p, buf) in bufs.iter_mut().enumerate() {
                let (a, b) = (w[2 * p], w[2 * p + 1]);
                buf[m] = a + i * b;
                buf[mm] = a.conj() + i * b.conj();
            }
        }
        let halves: Vec<(ScalarField, ScalarField)> = bufs
            .into_par_iter()
            .map(|mut z| {
                self.fft.inverse(&mut z);
                let re: Vec<f64> = z.iter().map(|c| c.re).collect();
                let im: Vec<f64> = z.iter().map(|c| c.im).collect();
                (
                    ScalarField::from_interior(&self.grid, &re),
                    ScalarField::from_interior(&self.grid, &im),
                )
            })
            .collect();
        let mut fields = Vec::with_capacity(8);
        for (a, b) in halves {
            fields.push(a);
            fields.push(b);
        }
        let arr: [ScalarField; 8] = fields.try_into().expect("eight fields");
        ProcaFields::from_array(arr)
    }

    /// Unpacked form of [`solve`](Self::solve): one transform per field and
    /// a gain per mode. Also returns the largest imaginary part discarded by
    /// the inverse transform.
    pub fn solve_reference(&self, u: &ProcaFields) -> (ProcaFields, f64) {
        let mut modes = self.to_modes(u);
        modes
            .par_iter_mut()
            .zip(self.gains.par_iter())
            .for_each(|(v, g)| *v = g * *v);
        self.from_modes(&modes)
    }
}
