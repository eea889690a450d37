//! Coincidence interference pattern of particle 2 and the fringe-based
//! coherence extraction.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrimination::DetectorGram;
use crate::error::{Error, Result};
use crate::gaussian::{check_regime, Geometry, Regime, SlitDecomposition, SourceParams};
use crate::C64;

/// Incoherent intensity below this fraction of its peak is ignored when
/// locating the primary maximum.
pub const PRIMARY_SUPPORT: f64 = 0.1;

/// Default number of pattern samples.
pub const DEFAULT_POINTS: usize = 4001;
/// Default half-span of the pattern grid, in fringe periods.
pub const DEFAULT_PERIODS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternMeta {
    pub n: usize,
    pub source: SourceParams,
    pub geometry: Geometry,
    pub phases: Vec<f64>,
    /// Producer of the pattern (`analytic`, `oracle`, ...).
    pub origin: String,
}

/// Sampled coincidence intensity and its phase-averaged counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub z2: Vec<f64>,
    pub intensity: Vec<f64>,
    pub incoherent: Vec<f64>,
    pub meta: PatternMeta,
}

pub(crate) fn validate_grid(z2: &[f64]) -> Result<()> {
    if z2.is_empty() {
        return Err(Error::Grid("detector grid is empty".into()));
    }
    if z2.iter().any(|z| !z.is_finite()) {
        return Err(Error::Grid("detector grid has non-finite entries".into()));
    }
    if z2.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("detector grid must be strictly increasing".into()));
    }
    Ok(())
}

fn check_inputs(geo: &Geometry, det: &DetectorGram, phases: &[f64]) -> Result<()> {
    if det.n() != geo.n {
        return Err(Error::domain(format!(
            "detector has {} states but the geometry has {} slits",
            det.n(),
            geo.n
        )));
    }
    if phases.len() != geo.n {
        return Err(Error::domain(format!("expected {} path phases, got {}", geo.n, phases.len())));
    }
    Ok(())
}

/// Evenly spaced grid of `points` samples spanning `±periods` fringe periods
/// around the pattern center.
pub fn default_grid(
    src: &SourceParams,
    geo: &Geometry,
    points: usize,
    periods: f64,
) -> Result<Vec<f64>> {
    let dec = SlitDecomposition::new(src, geo)?;
    let period = dec.fringe_period().ok_or_else(|| {
        Error::Grid("no fringes: the conditioned modes carry no relative phase slope".into())
    })?;
    let centers: f64 = dec.partner_modes_at_detector.iter().map(|g| g.center).sum();
    let mid = centers / dec.n() as f64;
    Ok(linspace(mid - periods * period, mid + periods * period, points))
}

pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.5 * (a + b)],
        _ => {
            let h = (b - a) / (points - 1) as f64;
            (0..points).map(|i| a + i as f64 * h).collect()
        }
    }
}

/// `(diagonal, cross)` parts of `Σ_jk conj(A_j) A_k ⟨d_j|d_k⟩`.
pub(crate) fn intensity_parts(amps: &[C64], det: &DetectorGram) -> (f64, f64) {
    let n = amps.len();
    let diag: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let mut cross = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            cross += 2.0 * (amps[j].conj() * amps[k] * det.overlap(j, k)).re;
        }
    }
    (diag, cross)
}

/// Coincidence intensity `|Ψ(z1_detect, z2)|²` traced over the detector,
/// summed from the evolved slit branches.
///
/// Branch `k` carries amplitude `det.probs()[k]`, the extra phase
/// `phases[k]`, and the exact conditioned modes of both particles.
pub fn coincidence_pattern(
    src: &SourceParams,
    geo: &Geometry,
    det: &DetectorGram,
    phases: &[f64],
    z2: &[f64],
) -> Result<PatternResult> {
    check_inputs(geo, det, phases)?;
    validate_grid(z2)?;
    let dec = SlitDecomposition::new(src, geo)?;
    let (intensity, incoherent) = evaluate_branches(&dec, det, phases, z2);
    Ok(PatternResult {
        z2: z2.to_vec(),
        intensity,
        incoherent,
        meta: PatternMeta {
            n: geo.n,
            source: *src,
            geometry: geo.clone(),
            phases: phases.to_vec(),
            origin: "analytic".into(),
        },
    })
}

fn evaluate_branches(
    dec: &SlitDecomposition,
    det: &DetectorGram,
    phases: &[f64],
    z2: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = dec.n();
    let pairs: Vec<(f64, f64)> = z2
        .par_iter()
        .map_init(
            || vec![C64::from(0.0); n],
            |amps, &z| {
                dec.branch_amplitudes(z, det.probs(), phases, amps);
                let (diag, cross) = intensity_parts(amps, det);
                (diag + cross, diag)
            },
        )
        .collect();
    pairs.into_iter().unzip()
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// Per-slit envelopes and all three cross-phase terms.
    Full,
    /// Common broad envelope and only the z2-linear cross phase.
    BroadEnvelope,
}

/// How the closed-form constants are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transcription {
    /// Literal: γ = ε² + 1/σ² inserted into `γ⁴π² + λ²D²` and
    /// `β = γ² + λ²D²/π²γ²`, offset phases `∝ (k² - j²)`, prefactor as printed.
    Printed,
    /// Dimensionally consistent: `γ²π² + λ²D²`, `β = γ + λ²D²/π²γ`, offset
    /// phases `∝ (μ_j² - μ_k²)`, complex detector overlaps, unit-norm
    /// prefactor `2/(π√(αβ))`.
    Rederived,
}

/// Strong-entanglement closed form of the coincidence pattern.
pub fn closed_form_pattern(
    src: &SourceParams,
    geo: &Geometry,
    det: &DetectorGram,
    phases: &[f64],
    z2: &[f64],
    form: ClosedForm,
    transcription: Transcription,
) -> Result<Vec<f64>> {
    src.validate()?;
    geo.validate()?;
    check_inputs(geo, det, phases)?;
    validate_grid(z2)?;
    check_regime(src, geo, Regime::Strong)?;

    let eps = geo.slit_width;
    let eps2 = eps * eps;
    let lam = geo.lambda;
    let l1 = geo.l1;
    let d = geo.effective_distance();
    let gamma = eps2 + 1.0 / (src.sigma * src.sigma);
    let s0 = geo.dispersion(geo.l2);
    let alpha = eps2 + (lam * l1 / (PI * eps)).powi(2);
    let mu = geo.slit_centers();
    let c = det.probs();
    let n = geo.n;

    let (beta, lin_den, pref, offset_sign) = match transcription {
        Transcription::Printed => {
            let beta = gamma * gamma + (lam * d / (PI * gamma)).powi(2);
            let lin_den = gamma.powi(4) * PI * PI + (lam * d).powi(2);
            let gr = gamma;
            let gi = 4.0 * s0;
            let ct = 1.0
                / (PI.sqrt()
                    * C64::new(eps, lam * l1 / (eps * PI)).sqrt()
                    * C64::new(gr.sqrt() + gi / gr.sqrt(), lam * l1 / (PI * gr.sqrt())).sqrt());
            (beta, lin_den, ct.norm_sqr(), 1.0)
        }
        Transcription::Rederived => {
            let beta = gamma + (lam * d / PI).powi(2) / gamma;
            let lin_den = gamma * gamma * PI * PI + (lam * d).powi(2);
            (beta, lin_den, 2.0 / (PI * (alpha * beta).sqrt()), -1.0)
        }
    };
    let off_den1 = eps2 * eps2 * PI * PI + (lam * l1).powi(2);

    let value = |z: f64| -> f64 {
        let mut diag = 0.0;
        let mut cross = 0.0;
        for k in 0..n {
            let (ek, zk) = match form {
                ClosedForm::Full => ((-2.0 * (z - mu[k]).powi(2) / beta).exp(), 1.0),
                ClosedForm::BroadEnvelope => (1.0, 1.0),
            };
            diag += c[k] * c[k] * (-2.0 * mu[k] * mu[k] / alpha).exp() * ek * zk;
            for j in 0..n {
                if j == k {
                    continue;
                }
                let g = det.overlap(j, k);
                let mut arg = 2.0 * PI * (mu[k] - mu[j]) * z * lam * d / lin_den
                    + phases[j]
                    - phases[k];
                if form == ClosedForm::Full {
                    let dm2 = offset_sign * (mu[k] * mu[k] - mu[j] * mu[j]);
                    arg += PI * dm2 * lam * l1 / off_den1 + PI * dm2 * lam * d / lin_den;
                }
                let (mag, extra) = match transcription {
                    Transcription::Printed => (g.norm(), 0.0),
                    Transcription::Rederived => (g.norm(), -g.arg()),
                };
                let env = match form {
                    ClosedForm::Full => {
                        (-(z - mu[j]).powi(2) / beta - (z - mu[k]).powi(2) / beta).exp()
                    }
                    ClosedForm::BroadEnvelope => 1.0,
                };
                cross += c[j]
                    * c[k]
                    * mag
                    * (-(mu[k] * mu[k] + mu[j] * mu[j]) / alpha).exp()
                    * env
                    * (arg + extra).cos();
            }
        }
        let common = match form {
            ClosedForm::Full => 1.0,
            ClosedForm::BroadEnvelope => (-2.0 * z * z / beta).exp(),
        };
        pref * common * (diag + cross)
    };
    Ok(z2.par_iter().map(|&z| value(z)).collect())
}

/// Fringe-based coherence at the primary maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryMaximum {
    pub z2: f64,
    /// `I_max / I_inc` at `z2`.
    pub ratio: f64,
    pub coherence: f64,
}

/// Locates the primary maximum as the largest `intensity / incoherent` over
/// the region where the incoherent intensity is at least [`PRIMARY_SUPPORT`]
/// of its peak, refined by a parabola through its neighbours.
pub fn primary_maximum(p: &PatternResult) -> Result<PrimaryMaximum> {
    let n = p.meta.n;
    if n < 2 {
        return Err(Error::Extraction("need at least two paths".into()));
    }
    let len = p.z2.len();
    if len != p.intensity.len() || len != p.incoherent.len() {
        return Err(Error::Extraction("pattern arrays differ in length".into()));
    }
    let peak = p.incoherent.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Extraction("incoherent intensity vanishes on the grid".into()));
    }
    let floor = PRIMARY_SUPPORT * peak;
    let ratio: Vec<Option<f64>> = p
        .intensity
        .iter()
        .zip(&p.incoherent)
        .map(|(&i, &inc)| (inc >= floor && inc > 0.0).then(|| i / inc))
        .collect();
    let (best, rmax) = ratio
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let rmin = ratio.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let coherence = |r: f64| (r - 1.0) / (n as f64 - 1.0);
    if rmax - rmin <= 1e-12 * rmax.abs().max(1.0) {
        // Flat ratio: no fringes to refine.
        return Ok(PrimaryMaximum { z2: p.z2[best], ratio: rmax, coherence: coherence(rmax) });
    }
    let neighbour = |i: Option<usize>| i.and_then(|i| ratio.get(i).copied().flatten());
    let (Some(left), Some(right)) = (neighbour(best.checked_sub(1)), neighbour(Some(best + 1)))
    else {
        return Err(Error::Extraction(format!(
            "maximum at z2 = {} lies on the edge of the usable grid; widen the grid",
            p.z2[best]
        )));
    };
    let (x0, x1, x2) = (p.z2[best - 1], p.z2[best], p.z2[best + 1]);
    let (z, r) = parabola_vertex((x0, left), (x1, rmax), (x2, right));
    Ok(PrimaryMaximum { z2: z, ratio: r, coherence: coherence(r) })
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when they are collinear.
pub(crate) fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if !(curv < 0.0) {
        return b;
    }
    // y = y1 + d·(x - x1) + curv·(x - x1)(x - x̃) in Newton form around x1.
    let slope_at_x1 = d01 + curv * (x1 - x0);
    let dx = -slope_at_x1 / (2.0 * curv);
    (x1 + dx, y1 + slope_at_x1 * dx + curv * dx * dx)
}

/// `(1/(n-1))·(I_max - I_inc)/I_inc` at the primary maximum.
pub fn coherence_from_pattern(p: &PatternResult) -> Result<f64> {
    primary_maximum(p).map(|m| m.coherence)
}

/// Closed-form fringe coherence
/// `(1/(n-1)) Σ_{j≠k} c_j c_k |G_jk| e^{-(μ_j²+μ_k²)/α} / Σ c_k² e^{-2μ_k²/α}`.
pub fn closed_form_coherence(det: &DetectorGram, geo: &Geometry) -> f64 {
    let eps = geo.slit_width;
    let alpha = eps * eps + (geo.lambda * geo.l1 / (PI * eps)).powi(2);
    let mu = geo.slit_centers();
    let c = det.probs();
    let n = geo.n;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n {
        den += c[k] * c[k] * (-2.0 * mu[k] * mu[k] / alpha).exp();
        for j in 0..n {
            if j != k {
                num += c[j]
                    * c[k]
                    * det.overlap(j, k).norm()
                    * (-(mu[j] * mu[j] + mu[k] * mu[k]) / alpha).exp();
            }
        }
    }
    num / den / (n as f64 - 1.0)
}

impl PatternResult {
    pub fn cross_term(&self) -> Vec<f64> {
        self.intensity.iter().zip(&self.incoherent).map(|(i, c)| i - c).collect()
    }

    /// `z2,intensity,incoherent` with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z2,intensity,incoherent\n");
        for ((z, i), c) in self.z2.iter().zip(&self.intensity).zip(&self.incoherent) {
            let _ = writeln!(out, "{z:.11e},{i:.11e},{c:.11e}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({ "schema": 1, "pattern": self });
        serde_json::to_string_pretty(&doc).expect("pattern serializes")
    }

    /// Local maxima of the intensity above `1e-3` of the peak, parabola-refined.
    pub fn fringe_maxima(&self) -> Vec<f64> {
        local_maxima(&self.z2, &self.intensity, 1e-3)
    }

    /// Line plot of both curves with the fringe maxima marked.
    pub fn to_svg(&self) -> String {
        let (w, h, m) = (900.0, 420.0, 50.0);
        let zmin = self.z2[0];
        let zmax = *self.z2.last().unwrap();
        let ymax = self.intensity.iter().chain(&self.incoherent).cloned().fold(0.0, f64::max);
        let ymax = if ymax > 0.0 { ymax } else { 1.0 };
        let span = if zmax > zmin { zmax - zmin } else { 1.0 };
        let sx = |z: f64| m + (z - zmin) / span * (w - 2.0 * m);
        let sy = |y: f64| h - m - y / ymax * (h - 2.0 * m);
        let line = |ys: &[f64]| {
            self.z2
                .iter()
                .zip(ys)
                .map(|(&z, &y)| format!("{:.2},{:.2}", sx(z), sy(y)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<line x1="{m}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
            y0 = h - m,
            x1 = w - m
        );
        let _ = writeln!(svg, r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{y0}" stroke="black"/>"#, y0 = h - m);
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="gray" stroke-dasharray="4 3" points="{}"/>"#,
            line(&self.incoherent)
        );
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="navy" points="{}"/>"#, line(&self.intensity));
        for z in self.fringe_maxima() {
            let y = interp(&self.z2, &self.intensity, z).unwrap_or(0.0);
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="crimson"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{z:.3}</text>"#,
                sx(z),
                sy(y),
                sx(z),
                sy(y) - 6.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{m}" y="{}" font-size="12">z2 ∈ [{zmin:.3}, {zmax:.3}]; solid: coincidence, dashed: incoherent</text>"#,
            h - 15.0
        );
        svg.push_str("</svg>\n");
        svg
    }
}

pub(crate) fn local_maxima(z: &[f64], y: &[f64], rel_floor: f64) -> Vec<f64> {
    let peak = y.iter().cloned().fold(0.0, f64::max);
    let floor = rel_floor * peak;
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] >= floor && y[i] > y[i - 1] && y[i] >= y[i + 1])
        .map(|i| parabola_vertex((z[i - 1], y[i - 1]), (z[i], y[i]), (z[i + 1], y[i + 1])).0)
        .collect()
}

/// Linear interpolation; `None` outside the sampled range.
pub(crate) fn interp(z: &[f64], y: &[f64], x: f64) -> Option<f64> {
    if z.is_empty() || x < z[0] || x > *z.last().unwrap() {
        return None;
    }
    let i = z.partition_point(|&v| v <= x);
    if i == 0 {
        return Some(y[0]);
    }
    if i >= z.len() {
        return Some(*y.last().unwrap());
    }
    let t = (x - z[i - 1]) / (z[i] - z[i - 1]);
    Some(y[i - 1] + t * (y[i] - y[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::uniform_gram;

    fn strong() -> (SourceParams, Geometry) {
        let src = SourceParams::new(1.0, 100.0).unwrap();
        let geo = Geometry {
            n: 3,
            slit_spacing: 1.0,
            slit_width: 0.1,
            l1: 10.0,
            l2: 3.0,
            lambda: 1.0,
            z1_detect: 0.0,
            offset: Geometry::centered_offset(3, 1.0),
        };
        (src, geo)
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(validate_grid(&[]), Err(Error::Grid(_))));
        assert!(matches!(validate_grid(&[0.0, 1.0, 0.5]), Err(Error::Grid(_))));
        assert!(matches!(validate_grid(&[0.0, 0.0]), Err(Error::Grid(_))));
        assert!(validate_grid(&[-1.0, 0.0, 2.0]).is_ok());
    }

    #[test]
    fn orthogonal_detector_has_no_fringes() {
        let (src, geo) = strong();
        let det = uniform_gram(3, 0.0).unwrap();
        let z = linspace(-20.0, 20.0, 801);
        let p = coincidence_pattern(&src, &geo, &det, &[0.0; 3], &z).unwrap();
        assert!(p.cross_term().iter().all(|c| c.abs() < 1e-12));
        assert_eq!(coherence_from_pattern(&p).unwrap(), 0.0);
    }

    #[test]
    fn intensity_nonnegative_and_incoherent_matches_envelope_sum() {
        let (src, geo) = strong();
        let det = uniform_gram(3, 0.8).unwrap();
        let z = linspace(-30.0, 30.0, 1201);
        let p = coincidence_pattern(&src, &geo, &det, &[0.3, -1.0, 2.0], &z).unwrap();
        assert!(p.intensity.iter().all(|&i| i >= -1e-18));
        let dec = SlitDecomposition::new(&src, &geo).unwrap();
        let a = dec.detector_amplitudes();
        for (i, &zz) in z.iter().enumerate() {
            let env: f64 = (0..3)
                .map(|k| {
                    (det.probs()[k] * a[k] * dec.partner_modes_at_detector[k].eval(zz)).norm_sqr()
                })
                .sum();
            assert!((p.incoherent[i] - env).abs() <= 1e-12 * env.max(1e-300));
        }
    }

    #[test]
    fn symmetric_setup_gives_even_pattern() {
        let (src, geo) = strong();
        let det = uniform_gram(3, 0.6).unwrap();
        let z = linspace(-25.0, 25.0, 1001);
        let p = coincidence_pattern(&src, &geo, &det, &[0.0; 3], &z).unwrap();
        let peak = p.intensity.iter().cloned().fold(0.0, f64::max);
        for i in 0..z.len() {
            let j = z.len() - 1 - i;
            assert!((p.intensity[i] - p.intensity[j]).abs() <= 1e-9 * peak);
        }
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let (src, geo) = strong();
        let det = uniform_gram(2, 0.5).unwrap();
        assert!(coincidence_pattern(&src, &geo, &det, &[0.0; 2], &[0.0, 1.0]).is_err());
        let det = uniform_gram(3, 0.5).unwrap();
        assert!(coincidence_pattern(&src, &geo, &det, &[0.0; 2], &[0.0, 1.0]).is_err());
        assert!(coincidence_pattern(&src, &geo, &det, &[0.0; 3], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn parabola_vertex_exact_for_quadratics() {
        let f = |x: f64| 3.0 - 2.0 * (x - 0.37).powi(2);
        let (x, y) = parabola_vertex((0.0, f(0.0)), (0.3, f(0.3)), (0.9, f(0.9)));
        assert!((x - 0.37).abs() < 1e-12);
        assert!((y - 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_regime_enforced() {
        let (mut src, geo) = strong();
        src.omega = 2.0;
        let det = uniform_gram(3, 0.5).unwrap();
        let r = closed_form_pattern(
            &src,
            &geo,
            &det,
            &[0.0; 3],
            &[0.0],
            ClosedForm::Full,
            Transcription::Rederived,
        );
        assert!(matches!(r, Err(Error::Regime(_))));
    }

    #[test]
    fn closed_forms_constructive_at_center_for_two_centered_slits() {
        let (src, mut geo) = strong();
        geo.n = 2;
        geo.offset = Geometry::centered_offset(2, 1.0);
        let det = uniform_gram(2, 1.0).unwrap();
        for form in [ClosedForm::Full, ClosedForm::BroadEnvelope] {
            for tr in [Transcription::Printed, Transcription::Rederived] {
                let z = linspace(-0.5, 0.5, 101);
                let v = closed_form_pattern(&src, &geo, &det, &[0.0; 2], &z, form, tr).unwrap();
                let best = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(v[50], best, "{form:?} {tr:?}");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let (src, geo) = strong();
        let det = uniform_gram(3, 0.5).unwrap();
        let p = coincidence_pattern(&src, &geo, &det, &[0.0; 3], &[-1.0, 0.0, 1.0]).unwrap();
        let csv = p.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("z2,intensity,incoherent"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 3);
        // 12 significant digits: d.ddddddddddd e±x
        assert_eq!(row[0], "-1.00000000000e0");
        let back: PatternResult = serde_json::from_value(
            serde_json::from_str::<serde_json::Value>(&p.to_json()).unwrap()["pattern"].clone(),
        )
        .unwrap();
        assert_eq!(back, p);
        assert!(p.to_svg().starts_with("<svg"));
    }

    #[test]
    fn interp_and_maxima() {
        let z = linspace(0.0, 10.0, 1001);
        let y: Vec<f64> = z.iter().map(|x| (x * PI).cos().powi(2)).collect();
        let m = local_maxima(&z, &y, 1e-3);
        for (i, x) in m.iter().enumerate() {
            assert!((x - (i + 1) as f64).abs() < 1e-4, "{x}");
        }
        assert_eq!(interp(&z, &y, -1.0), None);
        assert!((interp(&z, &[1.0; 1001], 3.3).unwrap() - 1.0).abs() < 1e-15);
    }
}
