//! Brute-force reference: the two-particle wavefunction sampled on a grid
//! and propagated spectrally, with no Gaussian algebra after sampling.
//!
//! The pair is sampled at the source, flown to the slit plane on a 2D grid,
//! projected onto each slit mode by quadrature, and each branch is then
//! carried to the detector planes on its own zero-padded 1D grid.

mod spectral;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{coherence, DensityMatrix};
use crate::discrimination::DetectorGram;
use crate::error::{Error, Result};
use crate::gaussian::{make_epr_state, slit_mode, Geometry, SourceParams};
use crate::pattern::{intensity_parts, interp, local_maxima, validate_grid, PatternMeta, PatternResult, PRIMARY_SUPPORT};
use crate::C64;

use spectral::{coords, flight_1d, flight_2d, norm_sq, Moments, SpectralInterpolant};

/// Probability allowed in the absorbing band before a branch counts as escaped.
pub const EDGE_TOL: f64 = 1e-8;
/// Largest 1D line used for a post-slit leg.
pub const MAX_LINE: usize = 1 << 23;
/// Samples required per period of the finest fringe.
pub const MIN_SAMPLES_PER_FRINGE: f64 = 8.0;

fn default_min_samples() -> f64 {
    8.0
}

/// Square grid of `points × points` samples over `[-extent, extent)²`; the
/// outer `padding` fraction of each axis is a smooth absorbing taper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extent: f64,
    pub points: usize,
    pub padding: f64,
    /// Samples required across the full slit width `2ε`.
    #[serde(default = "default_min_samples")]
    pub min_samples_per_slit: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { extent: 25.6, points: 2048, padding: 0.25, min_samples_per_slit: 8.0 }
    }
}

impl GridSpec {
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    fn inner(&self) -> f64 {
        self.extent * (1.0 - self.padding)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.extent.is_finite() && self.extent > 0.0) {
            return Err(Error::Grid(format!("extent must be > 0, got {}", self.extent)));
        }
        if self.points < 256 || !self.points.is_power_of_two() {
            return Err(Error::Grid(format!(
                "points must be a power of two >= 256, got {}",
                self.points
            )));
        }
        if !(0.0..=0.25).contains(&self.padding) {
            return Err(Error::Grid(format!("padding must lie in [0, 0.25], got {}", self.padding)));
        }
        if !(self.min_samples_per_slit.is_finite() && self.min_samples_per_slit > 0.0) {
            return Err(Error::Grid("min_samples_per_slit must be > 0".into()));
        }
        Ok(())
    }

    /// Checks that the grid resolves and contains the slit array.
    pub fn check_geometry(&self, geo: &Geometry) -> Result<()> {
        self.validate()?;
        geo.validate()?;
        let dz = self.spacing();
        let samples = 2.0 * geo.slit_width / dz;
        if samples < self.min_samples_per_slit {
            return Err(Error::Resolution(format!(
                "slit width 2ε = {} spans {samples:.2} samples, need {}",
                2.0 * geo.slit_width,
                self.min_samples_per_slit
            )));
        }
        let reach = geo
            .slit_centers()
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max)
            + 8.0 * geo.slit_width;
        if reach > self.inner() {
            return Err(Error::Grid(format!(
                "slit array reaches |z| = {reach} beyond the untapered region {}",
                self.inner()
            )));
        }
        Ok(())
    }

    /// Taper weight at `z`: one inside, smoothly to zero across the band.
    fn taper(&self, z: f64) -> f64 {
        if self.padding == 0.0 {
            return 1.0;
        }
        let inner = self.inner();
        let x = (z.abs() - inner) / (self.extent - inner);
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
            f(1.0 - x) / (f(1.0 - x) + f(x))
        }
    }
}

/// Relative norm change across one propagation leg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegCheck {
    pub leg: String,
    pub residual: f64,
    /// Samples of the line the leg ran on.
    pub line: usize,
}

/// The pair after the source-to-slit flight, on the 2D grid.
struct SlitPlaneField {
    field: Vec<C64>,
    z: Vec<f64>,
    dz: f64,
    grid: GridSpec,
    check: LegCheck,
}

impl SlitPlaneField {
    fn new(src: &SourceParams, s: f64, grid: &GridSpec) -> Result<Self> {
        let state = make_epr_state(src)?;
        let n = grid.points;
        let dz = grid.spacing();
        let z = coords(n, dz, 0.0);
        let taper: Vec<f64> = z.iter().map(|&z| grid.taper(z)).collect();
        let mut field = vec![C64::from(0.0); n * n];
        field.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                let t = taper[i] * taper[j];
                if t > 0.0 {
                    *v = state.eval(z[i], z[j]) * t;
                }
            }
        });
        let before = norm_sq(&field, dz * dz);
        flight_2d(&mut field, n, dz, s);
        let after = norm_sq(&field, dz * dz);
        let check = LegCheck { leg: "source to slits".into(), residual: (after - before).abs() / before, line: n };
        Ok(SlitPlaneField { field, z, dz, grid: *grid, check })
    }

    /// `∫ φ_k(z1) Ψ(z1, z2) dz1` for a real slit mode.
    fn project(&self, geo: &Geometry, k: usize) -> Result<Vec<C64>> {
        let phi = slit_mode(k, geo)?;
        let n = self.z.len();
        let weights: Vec<f64> = self.z.iter().map(|&z| phi.eval(z).re * self.dz).collect();
        let peak = weights.iter().cloned().fold(0.0, f64::max);
        let mut out = vec![C64::from(0.0); n];
        for (i, w) in weights.iter().enumerate() {
            if w.abs() <= 1e-30 * peak {
                continue;
            }
            let row = &self.field[i * n..(i + 1) * n];
            out.iter_mut().zip(row).for_each(|(o, v)| *o += v * w);
        }
        Ok(out)
    }

    fn band_fraction(&self, buf: &[C64]) -> f64 {
        let inner = self.grid.inner();
        let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
        let band: f64 =
            buf.iter().zip(&self.z).filter(|(_, z)| z.abs() > inner).map(|(v, _)| v.norm_sqr()).sum();
        band / total
    }
}

/// Free flight of a line sampled on the base grid, evaluated at `eval`.
fn carry(
    samples: &[C64],
    dz: f64,
    s: f64,
    eval: &[f64],
    leg: &str,
) -> Result<(Vec<C64>, LegCheck)> {
    let n = samples.len();
    let m0 = Moments::of(samples, dz, 0.0);
    let (mean1, sd1) = m0.after(s);
    let reach = [
        n as f64 * dz / 2.0,
        m0.mean.abs() + 12.0 * m0.var.sqrt(),
        mean1.abs() + 12.0 * sd1,
        eval.iter().map(|z| z.abs()).fold(0.0, f64::max) + 2.0 * dz,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let needed = (2.0 * reach / dz).ceil() as usize;
    let line = needed.next_power_of_two().max(n);
    if line > MAX_LINE {
        return Err(Error::Resolution(format!(
            "{leg}: spreading needs {line} samples, above the limit {MAX_LINE}"
        )));
    }
    let mut buf = vec![C64::from(0.0); line];
    let off = line / 2 - n / 2;
    buf[off..off + n].copy_from_slice(samples);
    let before = norm_sq(&buf, dz);
    flight_1d(&mut buf, dz, s);
    let after = norm_sq(&buf, dz);

    let band = line / 20;
    let edge: f64 = buf[..band].iter().chain(&buf[line - band..]).map(|v| v.norm_sqr()).sum::<f64>() * dz;
    if edge > EDGE_TOL * after {
        return Err(Error::Escaped(format!("{leg}: {:.3e} of the norm reached the line edge", edge / after)));
    }
    let interp = SpectralInterpolant::new(&buf, dz, 0.0);
    let values = eval.par_iter().map(|&z| interp.eval(z)).collect();
    Ok((values, LegCheck { leg: leg.into(), residual: (after - before).abs() / before, line }))
}

/// Everything the grid propagation produced.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub pattern: PatternResult,
    /// Particle 2's conditioned state in the symmetrically orthonormalized
    /// basis of its numerical branch modes.
    pub rho: DensityMatrix,
    /// Slit amplitudes from the projection, normalized so `Σ w² = 1`.
    pub geometric_weights: Vec<f64>,
    /// Numerical `⟨ψ_i|ψ_j⟩` at the slit plane.
    pub partner_overlaps: Vec<Vec<C64>>,
    /// `⟨z1_detect|U1|φ_k⟩`.
    pub detector_amplitudes: Vec<C64>,
    pub legs: Vec<LegCheck>,
    /// Branch amplitudes at the pattern points without the path phases.
    pub branch_fields: Vec<Vec<C64>>,
    pub grid: GridSpec,
}

impl OracleRun {
    pub fn coherence(&self) -> f64 {
        coherence(&self.rho)
    }

    pub fn max_unitarity_residual(&self) -> f64 {
        self.legs.iter().map(|l| l.residual).fold(0.0, f64::max)
    }

    /// Incoherent pattern estimated by averaging the coincidence intensity
    /// over uniformly random path phases.
    pub fn monte_carlo_incoherent(&self, det: &DetectorGram, samples: usize, seed: u64) -> Vec<f64> {
        let n = self.branch_fields.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<Vec<C64>> = (0..samples)
            .map(|_| {
                (0..n).map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect()
            })
            .collect();
        (0..self.pattern.z2.len())
            .into_par_iter()
            .map_init(
                || vec![C64::from(0.0); n],
                |amps, i| {
                    let mut acc = 0.0;
                    for d in &draws {
                        for k in 0..n {
                            amps[k] = self.branch_fields[k][i] * d[k];
                        }
                        let (diag, cross) = intensity_parts(amps, det);
                        acc += diag + cross;
                    }
                    acc / samples.max(1) as f64
                },
            )
            .collect()
    }
}

fn check_inputs(geo: &Geometry, det: &DetectorGram, phases: &[f64]) -> Result<()> {
    if det.n() != geo.n || phases.len() != geo.n {
        return Err(Error::domain(format!(
            "geometry has {} slits but the detector has {} states and {} phases were given",
            geo.n,
            det.n(),
            phases.len()
        )));
    }
    Ok(())
}

/// Numerically conditioned and normalized partner branches at the slit
/// plane, with their raw slit amplitudes.
fn partner_branches(
    plane: &SlitPlaneField,
    geo: &Geometry,
) -> Result<(Vec<Vec<C64>>, Vec<f64>)> {
    let mut modes = Vec::with_capacity(geo.n);
    let mut raw = Vec::with_capacity(geo.n);
    for k in 1..=geo.n {
        let mut psi = plane.project(geo, k)?;
        let w = norm_sq(&psi, plane.dz).sqrt();
        if !(w > 0.0) {
            return Err(Error::Degenerate(format!("slit {k} receives no amplitude on the grid")));
        }
        let band = plane.band_fraction(&psi);
        if band > EDGE_TOL {
            return Err(Error::Escaped(format!(
                "partner branch of slit {k} has {band:.3e} of its weight in the absorbing band"
            )));
        }
        psi.iter_mut().for_each(|v| *v /= w);
        modes.push(psi);
        raw.push(w);
    }
    Ok((modes, raw))
}

/// Adjacent branches beat at the difference of their mean wavenumbers,
/// which free flight conserves.
fn check_fringes(modes: &[Vec<C64>], dz: f64) -> Result<()> {
    let k: Vec<f64> = modes.iter().map(|m| Moments::of(m, dz, 0.0).k_mean).collect();
    for (j, w) in k.windows(2).enumerate() {
        let dk = (w[1] - w[0]).abs();
        if dk > 0.0 {
            let samples = 2.0 * std::f64::consts::PI / dk / dz;
            if samples < MIN_SAMPLES_PER_FRINGE {
                return Err(Error::Resolution(format!(
                    "fringe between slits {} and {} spans {samples:.2} samples, need {MIN_SAMPLES_PER_FRINGE}",
                    j + 1,
                    j + 2
                )));
            }
        }
    }
    Ok(())
}

/// Propagates the pair through the slit array on `grid` and evaluates the
/// coincidence pattern at `z2`.
pub fn propagate_pair(
    src: &SourceParams,
    geo: &Geometry,
    det: &DetectorGram,
    phases: &[f64],
    z2: &[f64],
    grid: &GridSpec,
) -> Result<OracleRun> {
    src.validate()?;
    grid.check_geometry(geo)?;
    check_inputs(geo, det, phases)?;
    validate_grid(z2)?;
    let n = geo.n;
    let plane = SlitPlaneField::new(src, geo.dispersion(geo.l2), grid)?;
    let dz = plane.dz;
    let (modes, raw) = partner_branches(&plane, geo)?;
    check_fringes(&modes, dz)?;
    let total = raw.iter().map(|w| w * w).sum::<f64>().sqrt();
    let geometric_weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let overlaps: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| modes[i].iter().zip(&modes[j]).map(|(a, b)| a.conj() * b).sum::<C64>() * dz)
                .collect()
        })
        .collect();

    let s1 = geo.dispersion(geo.l1);
    let mut legs = vec![plane.check.clone()];
    let mut detector_amplitudes = Vec::with_capacity(n);
    let mut partner_at_d2 = Vec::with_capacity(n);
    for k in 1..=n {
        let phi = slit_mode(k, geo)?;
        let samples: Vec<C64> = plane.z.iter().map(|&z| phi.eval(z)).collect();
        let (a, leg) = carry(&samples, dz, s1, &[geo.z1_detect], &format!("slit {k} to D1"))?;
        detector_amplitudes.push(a[0]);
        legs.push(leg);
        let (p, leg) = carry(&modes[k - 1], dz, s1, z2, &format!("partner {k} to D2"))?;
        partner_at_d2.push(p);
        legs.push(leg);
    }
    drop(plane);

    let c = det.probs();
    let branch_fields: Vec<Vec<C64>> = (0..n)
        .map(|k| partner_at_d2[k].iter().map(|v| c[k] * detector_amplitudes[k] * v).collect())
        .collect();
    let (intensity, incoherent): (Vec<f64>, Vec<f64>) = (0..z2.len())
        .into_par_iter()
        .map_init(
            || vec![C64::from(0.0); n],
            |amps, i| {
                for k in 0..n {
                    amps[k] = branch_fields[k][i] * C64::from_polar(1.0, phases[k]);
                }
                let (diag, cross) = intensity_parts(amps, det);
                (diag + cross, diag)
            },
        )
        .unzip();

    let weights: Vec<C64> =
        (0..n).map(|k| c[k] * C64::from_polar(1.0, phases[k]) * detector_amplitudes[k]).collect();
    let rho = conditioned_state(&weights, det, &overlaps)?;

    Ok(OracleRun {
        pattern: PatternResult {
            z2: z2.to_vec(),
            intensity,
            incoherent,
            meta: PatternMeta {
                n,
                source: *src,
                geometry: geo.clone(),
                phases: phases.to_vec(),
                origin: "oracle".into(),
            },
        },
        rho,
        geometric_weights,
        partner_overlaps: overlaps,
        detector_amplitudes,
        legs,
        branch_fields,
        grid: *grid,
    })
}

/// `S^{1/2} W S^{1/2}` normalized, with `W_lm = w_l conj(w_m) ⟨d_m|d_l⟩`.
fn conditioned_state(w: &[C64], det: &DetectorGram, overlaps: &[Vec<C64>]) -> Result<DensityMatrix> {
    let n = w.len();
    let s = DMatrix::from_fn(n, n, |i, j| 0.5 * (overlaps[i][j] + overlaps[j][i].conj()));
    let eig = s.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Degenerate("numerical partner modes are linearly dependent".into()));
    }
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from(l.sqrt())));
    let sqrt_s = &eig.eigenvectors * root * eig.eigenvectors.adjoint();
    let wm = DMatrix::from_fn(n, n, |l, m| w[l] * w[m].conj() * det.overlap(l, m).conj());
    let mut rho = &sqrt_s * wm * &sqrt_s;
    rho = (&rho + rho.adjoint()) * C64::from(0.5);
    let tr = rho.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Degenerate("particle 1 never reaches D1 on the grid".into()));
    }
    DensityMatrix::new(rho / C64::from(tr))
}

/// Partner of slit `k` alone, propagated by the oracle to D2 and sampled at
/// `z2`; unit norm.
pub fn single_slit_partner(
    src: &SourceParams,
    geo: &Geometry,
    k: usize,
    z2: &[f64],
    grid: &GridSpec,
) -> Result<Vec<C64>> {
    src.validate()?;
    grid.check_geometry(geo)?;
    let plane = SlitPlaneField::new(src, geo.dispersion(geo.l2), grid)?;
    let mut psi = plane.project(geo, k)?;
    let w = norm_sq(&psi, plane.dz).sqrt();
    if !(w > 0.0) {
        return Err(Error::Degenerate(format!("slit {k} receives no amplitude on the grid")));
    }
    psi.iter_mut().for_each(|v| *v /= w);
    carry(&psi, plane.dz, geo.dispersion(geo.l1), z2, "partner to D2").map(|(v, _)| v)
}

/// One-particle marginals of the freely evolved pair, no slits.
#[derive(Debug, Clone)]
pub struct FreeMarginals {
    pub z: Vec<f64>,
    pub particle1: Vec<f64>,
    pub particle2: Vec<f64>,
    pub residual: f64,
}

/// Evolves the sampled pair by dispersion `t_eff` per particle.
pub fn free_pair_marginals(src: &SourceParams, t_eff: f64, grid: &GridSpec) -> Result<FreeMarginals> {
    src.validate()?;
    grid.validate()?;
    let plane = SlitPlaneField::new(src, t_eff, grid)?;
    let n = grid.points;
    let dz = plane.dz;
    let particle1: Vec<f64> = plane
        .field
        .par_chunks(n)
        .map(|row| row.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz)
        .collect();
    let mut particle2 = vec![0.0; n];
    for row in plane.field.chunks(n) {
        particle2.iter_mut().zip(row).for_each(|(p, v)| *p += v.norm_sqr() * dz);
    }
    Ok(FreeMarginals { z: plane.z, particle1, particle2, residual: plane.check.residual })
}

/// Agreement metrics between two patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternComparison {
    /// `‖a - b‖₂ / ‖a‖₂` over the common points.
    pub relative_l2: f64,
    pub max_abs_error: f64,
    /// `max |a - b| / max |a|`.
    pub max_relative_error: f64,
    /// Largest distance from a fringe maximum of `a` to the nearest one of `b`.
    pub fringe_offset: Option<f64>,
    /// Difference in `(r_max - r_min)/(r_max + r_min)` of `intensity/incoherent`.
    pub visibility_delta: f64,
    pub points: usize,
}

fn ratio_visibility(intensity: &[f64], incoherent: &[f64]) -> f64 {
    let peak = incoherent.iter().cloned().fold(0.0, f64::max);
    let (lo, hi) = intensity
        .iter()
        .zip(incoherent)
        .filter(|(_, &c)| c >= PRIMARY_SUPPORT * peak && c > 0.0)
        .map(|(i, c)| i / c)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    if hi + lo > 0.0 && hi.is_finite() {
        (hi - lo) / (hi + lo)
    } else {
        0.0
    }
}

/// Fringe maxima: local maxima of `intensity / incoherent` where the
/// incoherent intensity is within its support.
fn ratio_maxima(z: &[f64], intensity: &[f64], incoherent: &[f64]) -> Vec<f64> {
    let peak = incoherent.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> =
        (0..z.len()).filter(|&i| incoherent[i] >= PRIMARY_SUPPORT * peak && incoherent[i] > 0.0).collect();
    let zs: Vec<f64> = keep.iter().map(|&i| z[i]).collect();
    let rs: Vec<f64> = keep.iter().map(|&i| intensity[i] / incoherent[i]).collect();
    let lo = rs.iter().cloned().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = rs.iter().map(|r| r - lo).collect();
    local_maxima(&zs, &shifted, 1e-6)
}

/// Compares `b` against the reference `a`, interpolating `b` linearly onto
/// the points of `a` that fall inside its range.
pub fn compare_patterns(a: &PatternResult, b: &PatternResult) -> Result<PatternComparison> {
    validate_grid(&a.z2)?;
    validate_grid(&b.z2)?;
    let same = a.z2.len() == b.z2.len()
        && a.z2.iter().zip(&b.z2).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0));
    let mut z = Vec::new();
    let mut ia = Vec::new();
    let mut ib = Vec::new();
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    for (i, &x) in a.z2.iter().enumerate() {
        let (vb, wb) = if same {
            (b.intensity[i], b.incoherent[i])
        } else {
            match (interp(&b.z2, &b.intensity, x), interp(&b.z2, &b.incoherent, x)) {
                (Some(v), Some(w)) => (v, w),
                _ => continue,
            }
        };
        z.push(x);
        ia.push(a.intensity[i]);
        ca.push(a.incoherent[i]);
        ib.push(vb);
        cb.push(wb);
    }
    if z.len() < 3 {
        return Err(Error::IncompatibleDomain(format!(
            "patterns share only {} points ([{}, {}] vs [{}, {}])",
            z.len(),
            a.z2[0],
            a.z2[a.z2.len() - 1],
            b.z2[0],
            b.z2[b.z2.len() - 1]
        )));
    }
    let norm_a = ia.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = ia.iter().zip(&ib).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let max_abs_error = ia.iter().zip(&ib).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let peak = ia.iter().map(|v| v.abs()).fold(0.0, f64::max);

    let ma = ratio_maxima(&z, &ia, &ca);
    let mb = ratio_maxima(&z, &ib, &cb);
    let fringe_offset = (!ma.is_empty() && !mb.is_empty()).then(|| {
        ma.iter()
            .map(|x| mb.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    });
    let visibility_delta =
        (ratio_visibility(&ia, &ca) - ratio_visibility(&ib, &cb)).abs();
    Ok(PatternComparison {
        relative_l2: if norm_a > 0.0 { diff / norm_a } else { diff },
        max_abs_error,
        max_relative_error: if peak > 0.0 { max_abs_error / peak } else { max_abs_error },
        fringe_offset,
        visibility_delta,
        points: z.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::default().validate().is_ok());
        let bad = |f: fn(&mut GridSpec)| {
            let mut g = GridSpec::default();
            f(&mut g);
            matches!(g.validate(), Err(Error::Grid(_)))
        };
        assert!(bad(|g| g.points = 1000));
        assert!(bad(|g| g.points = 128));
        assert!(bad(|g| g.padding = 0.3));
        assert!(bad(|g| g.extent = -1.0));
    }

    #[test]
    fn taper_is_smooth_step() {
        let g = GridSpec::default();
        assert_eq!(g.taper(0.0), 1.0);
        assert_eq!(g.taper(g.inner()), 1.0);
        assert_eq!(g.taper(g.extent), 0.0);
        let mid = 0.5 * (g.inner() + g.extent);
        assert!((g.taper(mid) - 0.5).abs() < 1e-15);
        assert!((g.taper(-mid) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coarse_grid_rejected_for_narrow_slits() {
        let geo = Geometry {
            n: 2,
            slit_spacing: 1.0,
            slit_width: 0.05,
            l1: 1.0,
            l2: 1.0,
            lambda: 1.0,
            z1_detect: 0.0,
            offset: -1.5,
        };
        let g = GridSpec { extent: 25.6, points: 1024, padding: 0.25, min_samples_per_slit: 8.0 };
        assert!(matches!(g.check_geometry(&geo), Err(Error::Resolution(_))));
    }
}
