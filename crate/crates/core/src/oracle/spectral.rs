//! FFT free-flight propagation on uniform grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Sample `i` of an `n`-point grid with spacing `dz` sits at `(i - n/2)·dz + shift`.
pub(crate) fn coords(n: usize, dz: f64, shift: f64) -> Vec<f64> {
    (0..n).map(|i| (i as f64 - (n / 2) as f64) * dz + shift).collect()
}

/// Angular wavenumbers in FFT order.
pub(crate) fn wavenumbers(n: usize, dz: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * dz);
    (0..n)
        .map(|m| if m < n / 2 { m as f64 * dk } else { (m as f64 - n as f64) * dk })
        .collect()
}

/// Spectral multiplier `exp(-i s k²/2)` of a free flight with dispersion `s`.
fn flight_phases(n: usize, dz: f64, s: f64) -> Vec<C64> {
    wavenumbers(n, dz).into_iter().map(|k| C64::from_polar(1.0, -0.5 * s * k * k)).collect()
}

pub(crate) struct Plan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Plan {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plan { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub(crate) fn forward(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
    }

    /// Normalized inverse.
    pub(crate) fn inverse(&self, buf: &mut [C64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// Free flight of every contiguous `n`-sample row of `data`.
    fn flight_rows(&self, data: &mut [C64], phases: &[C64]) {
        let scale = 1.0 / self.n as f64;
        data.par_chunks_mut(self.n).for_each_init(
            || vec![C64::from(0.0); self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())],
            |scratch, row| {
                self.fwd.process_with_scratch(row, scratch);
                row.iter_mut().zip(phases).for_each(|(v, p)| *v *= p * scale);
                self.inv.process_with_scratch(row, scratch);
            },
        );
    }
}

fn transpose(src: &[C64], dst: &mut [C64], n: usize) {
    dst.par_chunks_mut(n).enumerate().for_each(|(c, row)| {
        for (r, v) in row.iter_mut().enumerate() {
            *v = src[r * n + c];
        }
    });
}

/// Free flight of a row-major `n × n` two-particle field (both axes share
/// the spacing `dz`) with dispersion `s` per particle.
pub(crate) fn flight_2d(field: &mut Vec<C64>, n: usize, dz: f64, s: f64) {
    let plan = Plan::new(n);
    let phases = flight_phases(n, dz, s);
    let mut tmp = vec![C64::from(0.0); n * n];
    plan.flight_rows(field, &phases);
    transpose(field, &mut tmp, n);
    plan.flight_rows(&mut tmp, &phases);
    transpose(&tmp, field, n);
}

/// Free flight of a single line.
pub(crate) fn flight_1d(buf: &mut [C64], dz: f64, s: f64) {
    let plan = Plan::new(buf.len());
    plan.flight_rows(buf, &flight_phases(buf.len(), dz, s));
}

pub(crate) fn norm_sq(buf: &[C64], dz: f64) -> f64 {
    buf.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz
}

/// Position and momentum moments of a sampled state.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Moments {
    pub mean: f64,
    pub var: f64,
    pub k_mean: f64,
    pub k_var: f64,
    /// Symmetrized covariance `⟨(z-z̄)(k-k̄) + (k-k̄)(z-z̄)⟩/2`.
    pub cov: f64,
}

impl Moments {
    pub(crate) fn of(buf: &[C64], dz: f64, shift: f64) -> Self {
        let n = buf.len();
        let z = coords(n, dz, shift);
        let k = wavenumbers(n, dz);
        let plan = Plan::new(n);
        let w: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
        let mean = buf.iter().zip(&z).map(|(v, z)| v.norm_sqr() * z).sum::<f64>() / w;
        let var = buf.iter().zip(&z).map(|(v, z)| v.norm_sqr() * (z - mean).powi(2)).sum::<f64>() / w;
        let mut spec = buf.to_vec();
        plan.forward(&mut spec);
        let ws: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
        let k_mean = spec.iter().zip(&k).map(|(v, k)| v.norm_sqr() * k).sum::<f64>() / ws;
        let k_var =
            spec.iter().zip(&k).map(|(v, k)| v.norm_sqr() * (k - k_mean).powi(2)).sum::<f64>() / ws;
        // -i f' in position space
        let mut deriv: Vec<C64> = spec.iter().zip(&k).map(|(v, k)| v * *k).collect();
        plan.inverse(&mut deriv);
        let zk = buf
            .iter()
            .zip(&deriv)
            .zip(&z)
            .map(|((f, d), z)| (f.conj() * d).re * z)
            .sum::<f64>()
            / w;
        Moments { mean, var, k_mean, k_var, cov: zk - mean * k_mean }
    }

    /// Mean and standard deviation after a free flight with dispersion `s`.
    pub(crate) fn after(&self, s: f64) -> (f64, f64) {
        let var = self.var + 2.0 * s * self.cov + s * s * self.k_var;
        (self.mean + s * self.k_mean, var.max(0.0).sqrt())
    }
}

/// Trigonometric interpolant of a periodic sampled function.
pub(crate) struct SpectralInterpolant {
    spec: Vec<C64>,
    dz: f64,
    start: f64,
}

const RESYNC: usize = 256;

impl SpectralInterpolant {
    pub(crate) fn new(buf: &[C64], dz: f64, shift: f64) -> Self {
        let n = buf.len();
        let mut spec = buf.to_vec();
        Plan::new(n).forward(&mut spec);
        let scale = 1.0 / n as f64;
        spec.iter_mut().for_each(|v| *v *= scale);
        SpectralInterpolant { spec, dz, start: shift - (n / 2) as f64 * dz }
    }

    pub(crate) fn eval(&self, z: f64) -> C64 {
        let n = self.spec.len();
        let half = n / 2;
        let delta = 2.0 * PI * (z - self.start) / (n as f64 * self.dz);
        let step = C64::from_polar(1.0, delta);
        let mut low = C64::from(0.0);
        let mut high = C64::from(0.0);
        let mut w = C64::from(1.0);
        for (m, f) in self.spec.iter().enumerate() {
            if m % RESYNC == 0 {
                w = C64::from_polar(1.0, delta * m as f64);
            }
            if m < half {
                low += f * w;
            } else {
                high += f * w;
            }
            w *= step;
        }
        low + high * C64::from_polar(1.0, -delta * n as f64)
    }
}
