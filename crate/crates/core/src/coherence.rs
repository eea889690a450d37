//! Particle 2's reduced density matrix, its l1 coherence, and the duality
//! report combining it with particle 1's path distinguishability.
//!
//! Matrices are expressed in the n-dimensional basis of particle 2's
//! conditioned modes, so the evolution operators never appear explicitly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::discrimination::{distinguishability, DetectorGram};
use crate::error::{Error, Result};
use crate::C64;

/// Slack below which the duality sum counts as saturated, and above one at
/// which it counts as violated.
pub const DUALITY_TOL: f64 = 1e-9;

/// Largest `|⟨ψ_j|ψ_k⟩|` for which the conditioned modes count as an
/// orthonormal basis and the matrix route applies.
pub const ORTHOGONALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and PSD.
    pub fn new(rho: DMatrix<C64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::domain("density matrix must be square and non-empty"));
        }
        let herm = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::domain(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr - C64::from(1.0)).norm() > 1e-12 {
            return Err(Error::domain(format!("density matrix trace {tr} != 1")));
        }
        let min = rho.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::domain(format!("density matrix not PSD (min eigenvalue {min:e})")));
        }
        Ok(DensityMatrix { rho })
    }

    pub fn n(&self) -> usize {
        self.rho.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.rho[(i, j)].norm());
                }
            }
        }
        m
    }
}

/// Particle 2's state without coincidence conditioning: `diag(c_k²)`.
pub fn unconditional_rho(det: &DetectorGram) -> DensityMatrix {
    let c = det.probs();
    let rho = DMatrix::from_fn(det.n(), det.n(), |i, j| {
        if i == j {
            C64::from(c[i] * c[i])
        } else {
            C64::from(0.0)
        }
    });
    DensityMatrix { rho }
}

/// Particle 2's state given particle 1 was found at D1.
///
/// `envelopes[k] = |⟨z_D1|U1|φ_k⟩|` and `phases[k]` its argument (plus any
/// extra path phase). Elements are
/// `c_j c_k ⟨d_k|d_j⟩ e^{i(ph_j - ph_k)} a_j a_k / Σ c_m² a_m²`.
pub fn conditional_rho(
    det: &DetectorGram,
    envelopes: &[f64],
    phases: &[f64],
) -> Result<DensityMatrix> {
    let n = det.n();
    if envelopes.len() != n || phases.len() != n {
        return Err(Error::domain(format!(
            "expected {n} envelopes and phases, got {} and {}",
            envelopes.len(),
            phases.len()
        )));
    }
    if envelopes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::domain("envelopes must be finite and nonnegative"));
    }
    let c = det.probs();
    let den: f64 = (0..n).map(|m| (c[m] * envelopes[m]).powi(2)).sum();
    if !(den > 0.0) {
        return Err(Error::Degenerate("particle 1 never reaches D1 (all envelopes vanish)".into()));
    }
    let w: Vec<C64> = (0..n).map(|k| C64::from_polar(c[k] * envelopes[k], phases[k])).collect();
    let rho =
        DMatrix::from_fn(n, n, |j, k| w[j] * w[k].conj() * det.overlap(j, k).conj() / den);
    Ok(DensityMatrix { rho })
}

/// Normalized l1 coherence `(1/(n-1)) Σ_{i≠j} |ρ_ij|`.
pub fn coherence(rho: &DensityMatrix) -> f64 {
    let n = rho.n();
    if n < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += rho.get(i, j).norm();
            }
        }
    }
    s / (n as f64 - 1.0)
}

/// Path distinguishability of particle 1 against particle 2's coherence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub d_q1: f64,
    /// Coherence from the conditioned density matrix; absent when particle 2's
    /// conditioned modes are not mutually orthogonal.
    pub c2_matrix: Option<f64>,
    /// Coherence extracted from the coincidence fringes.
    pub c2_pattern: Option<f64>,
    /// `d_q1 + c2_matrix`.
    pub sum: Option<f64>,
    /// `1 - sum`.
    pub slack: Option<f64>,
    /// `d_q1 + c2_pattern`, informational.
    pub pattern_sum: Option<f64>,
    pub saturated: bool,
    /// `sum > 1 + DUALITY_TOL`.
    pub violation: bool,
    pub matrix_route_applicable: bool,
}

impl DualityReport {
    /// Drops the matrix route, keeping only the fringe-based coherence.
    pub fn without_matrix_route(mut self) -> Self {
        self.c2_matrix = None;
        self.sum = None;
        self.slack = None;
        self.saturated = false;
        self.violation = false;
        self.matrix_route_applicable = false;
        self
    }
}

pub fn duality_report(
    det: &DetectorGram,
    envelopes: &[f64],
    phases: &[f64],
    pattern_c2: Option<f64>,
) -> Result<DualityReport> {
    let d_q1 = distinguishability(det);
    let c2 = coherence(&conditional_rho(det, envelopes, phases)?);
    let sum = d_q1 + c2;
    let a0 = envelopes[0];
    let equal = envelopes.iter().all(|a| (a - a0).abs() <= DUALITY_TOL * a0.max(1.0));
    Ok(DualityReport {
        d_q1,
        c2_matrix: Some(c2),
        c2_pattern: pattern_c2,
        sum: Some(sum),
        slack: Some(1.0 - sum),
        pattern_sum: pattern_c2.map(|c| d_q1 + c),
        saturated: equal && (sum - 1.0).abs() <= DUALITY_TOL,
        violation: sum > 1.0 + DUALITY_TOL,
        matrix_route_applicable: true,
    })
}
