//! Exact complex-Gaussian algebra for the pair state, from the source
//! through the slit plane to both detectors.
//!
//! Every wavefunction handled here is a Gaussian `exp(-p z² + q z + r)` (or
//! its two-particle analogue), so free flight, slit projection and overlaps
//! are closed-form operations on the coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Source parameters of the generalized EPR state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Momentum spread σ (inverse length).
    pub sigma: f64,
    /// Position spread Ω (length).
    pub omega: f64,
}

impl SourceParams {
    pub fn new(sigma: f64, omega: f64) -> Result<Self> {
        let src = SourceParams { sigma, omega };
        src.validate()?;
        Ok(src)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::domain(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::domain(format!("omega must be > 0, got {}", self.omega)));
        }
        Ok(())
    }

    /// `4Ω²σ²`; the pair state factorizes when this equals one.
    pub fn correlation_product(&self) -> f64 {
        4.0 * self.omega * self.omega * self.sigma * self.sigma
    }

    pub fn is_singular(&self) -> bool {
        (self.correlation_product() - 1.0).abs() <= 1e-12
    }
}

/// Slit array, propagation distances and detector placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Number of slits.
    pub n: usize,
    /// Slit spacing z0.
    #[serde(rename = "z0")]
    pub slit_spacing: f64,
    /// Slit width ε.
    #[serde(rename = "epsilon")]
    pub slit_width: f64,
    /// Slit plane to detector D1.
    #[serde(rename = "L1")]
    pub l1: f64,
    /// Source to slit plane.
    #[serde(rename = "L2")]
    pub l2: f64,
    /// de Broglie wavelength.
    pub lambda: f64,
    /// Fixed position of D1.
    #[serde(default)]
    pub z1_detect: f64,
    /// Global shift of the slit array; slit k sits at `k·z0 + offset`.
    #[serde(default)]
    pub offset: f64,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("need at least 2 slits, got {}", self.n)));
        }
        let positive = [
            ("z0", self.slit_spacing),
            ("epsilon", self.slit_width),
            ("lambda", self.lambda),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("L1", self.l1), ("L2", self.l2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !self.z1_detect.is_finite() || !self.offset.is_finite() {
            return Err(Error::domain("z1_detect and offset must be finite"));
        }
        Ok(())
    }

    /// Center of slit `k` (1-based).
    pub fn slit_center(&self, k: usize) -> f64 {
        k as f64 * self.slit_spacing + self.offset
    }

    pub fn slit_centers(&self) -> Vec<f64> {
        (1..=self.n).map(|k| self.slit_center(k)).collect()
    }

    /// Offset that places the array symmetrically about z = 0.
    pub fn centered_offset(n: usize, z0: f64) -> f64 {
        -(n as f64 + 1.0) / 2.0 * z0
    }

    /// Dispersion parameter `ħt/m = λL/2π` for a flight of length `l`.
    pub fn dispersion(&self, l: f64) -> f64 {
        self.lambda * l / (2.0 * PI)
    }

    /// Total propagation length seen by particle 2's conditioned modes,
    /// `D = L1 + 2·L2`.
    pub fn effective_distance(&self) -> f64 {
        self.l1 + 2.0 * self.l2
    }
}

/// `exp(-p z² + q z + r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct QuadExp {
    pub p: C64,
    pub q: C64,
    pub r: C64,
}

impl QuadExp {
    pub fn eval(&self, z: f64) -> C64 {
        (-self.p * z * z + self.q * z + self.r).exp()
    }

    pub fn conj(&self) -> Self {
        QuadExp { p: self.p.conj(), q: self.q.conj(), r: self.r.conj() }
    }

    pub fn mul(&self, o: &QuadExp) -> Self {
        QuadExp { p: self.p + o.p, q: self.q + o.q, r: self.r + o.r }
    }

    /// ∫ f dz over the real line; requires Re p > 0.
    pub fn integral(&self) -> C64 {
        (C64::from(PI) / self.p).sqrt() * (self.q * self.q / (4.0 * self.p) + self.r).exp()
    }

    pub fn norm_sq(&self) -> f64 {
        let pr = self.p.re;
        (PI / (2.0 * pr)).sqrt() * (self.q.re * self.q.re / (2.0 * pr) + 2.0 * self.r.re).exp()
    }

    /// Free flight with dispersion parameter `s = ħt/m`: in the form
    /// `exp(-(z-c)²/w)` the width moves to `w + 2is` and the complex center stays.
    pub fn free_evolve(&self, s: f64) -> Self {
        if s == 0.0 {
            return *self;
        }
        let w = self.p.inv();
        let c = self.q / (2.0 * self.p);
        let r0 = self.r + self.q * self.q / (4.0 * self.p);
        let w2 = w + 2.0 * I * s;
        QuadExp {
            p: w2.inv(),
            q: 2.0 * c / w2,
            r: r0 + 0.5 * (w.ln() - w2.ln()) - c * c / w2,
        }
    }
}

/// Single-particle Gaussian mode
/// `amp · e^{iθ} · exp(-(z-μ)²/Γ + iκ(z-μ))`.
///
/// `center` is the intensity centroid and `wavenumber` the mean momentum,
/// so conditioned modes whose exponent has a complex center are still
/// represented exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian1D {
    pub amp: C64,
    pub center: f64,
    pub gamma_c: C64,
    #[serde(default)]
    pub wavenumber: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Gaussian1D {
    pub fn new(amp: C64, center: f64, gamma_c: C64, wavenumber: f64, phase: f64) -> Result<Self> {
        if !(gamma_c.re > 0.0) || !gamma_c.im.is_finite() {
            return Err(Error::domain(format!("Re(gamma) must be > 0, got {gamma_c}")));
        }
        Ok(Gaussian1D { amp, center, gamma_c, wavenumber, phase })
    }

    /// Unit-norm mode with the given center and complex width.
    pub fn normalized(center: f64, gamma_c: C64) -> Result<Self> {
        Gaussian1D::new(C64::from(1.0), center, gamma_c, 0.0, 0.0).map(|g| g.normalize())
    }

    pub(crate) fn to_quad(self) -> QuadExp {
        let p = self.gamma_c.inv();
        let mu = self.center;
        QuadExp {
            p,
            q: 2.0 * mu * p + I * self.wavenumber,
            r: self.amp.ln() + I * self.phase - mu * mu * p - I * self.wavenumber * mu,
        }
    }

    pub(crate) fn from_quad(f: QuadExp, phase: f64) -> Self {
        let mu = f.q.re / (2.0 * f.p.re);
        let kappa = f.q.im - 2.0 * mu * f.p.im;
        let amp = (f.r + mu * mu * f.p + I * kappa * mu - I * phase).exp();
        Gaussian1D { amp, center: mu, gamma_c: f.p.inv(), wavenumber: kappa, phase }
    }

    pub fn eval(&self, z: f64) -> C64 {
        self.to_quad().eval(z)
    }

    pub fn norm_sq(&self) -> f64 {
        self.to_quad().norm_sq()
    }

    pub fn normalize(mut self) -> Self {
        self.amp /= self.norm_sq().sqrt();
        self
    }

    /// `⟨self|other⟩ = ∫ conj(self) · other dz`.
    pub fn inner(&self, other: &Gaussian1D) -> C64 {
        self.to_quad().conj().mul(&other.to_quad()).integral()
    }

    /// Standard deviation of `|g|²`.
    pub fn intensity_width(&self) -> f64 {
        (1.0 / (4.0 * self.gamma_c.inv().re)).sqrt()
    }
}

/// Pair state `norm · exp(-(z1-z2)²/a - (z1+z2)²/b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleGaussian {
    pub norm: C64,
    /// Complex width of the relative-coordinate factor (length²).
    pub a: C64,
    /// Complex width of the center-of-mass factor (length²).
    pub b: C64,
}

impl TwoParticleGaussian {
    pub fn eval(&self, z1: f64, z2: f64) -> C64 {
        let u = z1 - z2;
        let v = z1 + z2;
        self.norm * (-u * u / self.a - v * v / self.b).exp()
    }

    /// ∫∫|Ψ|² dz1 dz2 (the Jacobian of (z1,z2) → (z1-z2, z1+z2) is 2).
    pub fn norm_sq(&self) -> f64 {
        let ra = self.a.inv().re;
        let rb = self.b.inv().re;
        self.norm.norm_sqr() * 0.5 * (PI / (2.0 * ra)).sqrt() * (PI / (2.0 * rb)).sqrt()
    }
}

/// Generalized EPR state at the source, normalized to one.
///
/// The relative-coordinate width is `1/σ²` and the center-of-mass width
/// `4Ω²`; unit norm fixes the prefactor at `√(2σ/πΩ)`.
pub fn make_epr_state(src: &SourceParams) -> Result<TwoParticleGaussian> {
    src.validate()?;
    let a = C64::from(1.0 / (src.sigma * src.sigma));
    let b = C64::from(4.0 * src.omega * src.omega);
    let norm = C64::from((2.0 * src.sigma / (PI * src.omega)).sqrt());
    Ok(TwoParticleGaussian { norm, a, b })
}

/// Free evolution of both particles under `p1²/2m + p2²/2m` for a time with
/// `ħt/m = t_eff`.
///
/// Both the relative and the center-of-mass coordinates carry an effective
/// mass `m/2`, so both widths shift by `4i·t_eff`.
pub fn evolve_pair(state: &TwoParticleGaussian, t_eff: f64) -> Result<TwoParticleGaussian> {
    if !(t_eff.is_finite() && t_eff >= 0.0) {
        return Err(Error::domain(format!("t_eff must be >= 0, got {t_eff}")));
    }
    if !(state.a.re > 0.0 && state.b.re > 0.0) {
        return Err(Error::domain("pair state is not normalizable"));
    }
    let shift = 4.0 * I * t_eff;
    let a = state.a + shift;
    let b = state.b + shift;
    let norm = state.norm * (state.a / a).sqrt() * (state.b / b).sqrt();
    Ok(TwoParticleGaussian { norm, a, b })
}

/// Transmitted mode of slit `k` (1-based): a unit-norm real Gaussian of
/// width parameter ε² centered on the slit.
pub fn slit_mode(k: usize, geo: &Geometry) -> Result<Gaussian1D> {
    if k == 0 || k > geo.n {
        return Err(Error::SlitIndex { index: k, n: geo.n });
    }
    let eps = geo.slit_width;
    let amp = C64::from((2.0 / PI).powf(0.25) / eps.sqrt());
    Gaussian1D::new(amp, geo.slit_center(k), C64::from(eps * eps), 0.0, 0.0)
}

/// Projects particle 1 onto the mode of slit `k`.
///
/// Returns the norm `c_k` of `⟨φ_k|Ψ⟩` (not yet renormalized over the
/// slits) and the normalized conditioned state `ψ_k(z2)` of particle 2.
pub fn condition_on_slit(
    state: &TwoParticleGaussian,
    k: usize,
    geo: &Geometry,
) -> Result<(f64, Gaussian1D)> {
    let phi = slit_mode(k, geo)?;
    let ia = state.a.inv();
    let ib = state.b.inv();
    let diff = ia - ib;
    if diff.norm() <= 1e-12 * (ia + ib).norm() {
        return Err(Error::Singular(
            "4Ω²σ² = 1: the pair state factorizes and every slit conditions particle 2 identically"
                .into(),
        ));
    }
    let eps2 = geo.slit_width * geo.slit_width;
    let mu = phi.center;
    // Gaussian integral over z1 of φ_k(z1)·Ψ(z1, z2).
    let big_a = 1.0 / eps2 + ia + ib;
    let overlap = QuadExp {
        p: (ia + ib) - diff * diff / big_a,
        q: 2.0 * mu * diff / (eps2 * big_a),
        r: mu * mu / (eps2 * eps2 * big_a) - mu * mu / eps2
            + (state.norm * phi.amp * (C64::from(PI) / big_a).sqrt()).ln(),
    };
    let weight = overlap.norm_sq().sqrt();
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(Error::Degenerate(format!("slit {k} receives no amplitude")));
    }
    let psi = Gaussian1D::from_quad(overlap, 0.0).normalize();
    Ok((weight, psi))
}

/// Fresnel flight over distance `l`: `Γ → Γ + iLλ/π`, unit norm preserved.
pub fn fresnel_evolve(g: &Gaussian1D, l: f64, lambda: f64) -> Result<Gaussian1D> {
    if !(l.is_finite() && l >= 0.0) {
        return Err(Error::domain(format!("propagation distance must be >= 0, got {l}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("wavelength must be > 0, got {lambda}")));
    }
    let phase = g.phase;
    let mut bare = *g;
    bare.phase = 0.0;
    let s = lambda * l / (2.0 * PI);
    Ok(Gaussian1D::from_quad(bare.to_quad().free_evolve(s), phase))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Strong,
    Weak,
}

/// Minimum `Ω / max(ε, 1/σ)` accepted as strong entanglement.
pub const STRONG_RATIO: f64 = 10.0;
/// Maximum `|Ωσ - 1|` accepted as weak entanglement.
pub const WEAK_WINDOW: f64 = 0.1;

pub fn check_regime(src: &SourceParams, geo: &Geometry, regime: Regime) -> Result<()> {
    match regime {
        Regime::Strong => {
            let scale = geo.slit_width.max(1.0 / src.sigma);
            if src.omega < STRONG_RATIO * scale {
                return Err(Error::Regime(format!(
                    "strong entanglement needs Ω >= {STRONG_RATIO}·max(ε, 1/σ) = {}, got Ω = {}",
                    STRONG_RATIO * scale,
                    src.omega
                )));
            }
        }
        Regime::Weak => {
            let dev = (src.omega * src.sigma - 1.0).abs();
            if dev > WEAK_WINDOW {
                return Err(Error::Regime(format!(
                    "weak entanglement needs |Ωσ - 1| <= {WEAK_WINDOW}, got {dev}"
                )));
            }
        }
    }
    Ok(())
}

/// Limiting form of particle 2's conditioned width at the slit plane.
///
/// Strong: `ε² + 1/σ² + 4i·ħt0/m`. Weak: `1/(2σ²) + 2i·ħt0/m`.
pub fn gamma_limit(src: &SourceParams, geo: &Geometry, regime: Regime) -> Result<C64> {
    src.validate()?;
    geo.validate()?;
    check_regime(src, geo, regime)?;
    let s0 = geo.dispersion(geo.l2);
    let sig2 = src.sigma * src.sigma;
    Ok(match regime {
        Regime::Strong => C64::new(geo.slit_width * geo.slit_width + 1.0 / sig2, 4.0 * s0),
        Regime::Weak => C64::new(1.0 / (2.0 * sig2), 2.0 * s0),
    })
}

/// Exact conditioned width Γ at the slit plane (common to all slits).
pub fn exact_gamma(src: &SourceParams, geo: &Geometry) -> Result<C64> {
    geo.validate()?;
    let pair = evolve_pair(&make_epr_state(src)?, geo.dispersion(geo.l2))?;
    let (_, psi) = condition_on_slit(&pair, 1, geo)?;
    Ok(psi.gamma_c)
}

/// The closed-form slit-center scale `z0'` as printed for the conditioned modes.
/// Exact when `L2 = 0`.
pub fn printed_center_scale(src: &SourceParams, geo: &Geometry) -> f64 {
    let p = src.correlation_product();
    let om2 = src.omega * src.omega;
    let eps2 = geo.slit_width * geo.slit_width;
    geo.slit_spacing
        / ((p + 1.0) / (p - 1.0) + 4.0 * eps2 / (4.0 * om2 - 1.0 / (src.sigma * src.sigma)))
}

/// The closed-form conditioned width Γ as printed. Agrees with
/// [`exact_gamma`] at `L2 = 0` and in the strong limit.
pub fn printed_gamma(src: &SourceParams, geo: &Geometry) -> C64 {
    let s0 = geo.dispersion(geo.l2);
    let sig2 = src.sigma * src.sigma;
    let om2 = src.omega * src.omega;
    let eps2 = geo.slit_width * geo.slit_width;
    let t = 2.0 * I * s0;
    let num = 1.0 / sig2 + (1.0 + 1.0 / (4.0 * sig2 * om2)) * (eps2 + t);
    let den = 1.0 + 1.0 / (4.0 * om2 * sig2) + eps2 / om2 + t / om2;
    num / den + t
}

/// The pair state propagated to the slit plane and split into its slit
/// branches, each branch also carried to the detector planes.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitDecomposition {
    pub pair_at_slits: TwoParticleGaussian,
    /// Geometric path amplitudes `c_k`, renormalized so `Σ c_k² = 1`.
    pub weights: Vec<f64>,
    /// Slit modes `φ_k` at the slit plane.
    pub slit_modes: Vec<Gaussian1D>,
    /// Conditioned partner modes `ψ_k` at the slit-crossing time.
    pub partner_modes: Vec<Gaussian1D>,
    /// `φ_k` after the flight to D1.
    pub slit_modes_at_detector: Vec<Gaussian1D>,
    /// `ψ_k` after the same flight time.
    pub partner_modes_at_detector: Vec<Gaussian1D>,
    pub z1_detect: f64,
}

impl SlitDecomposition {
    pub fn new(src: &SourceParams, geo: &Geometry) -> Result<Self> {
        geo.validate()?;
        let pair = evolve_pair(&make_epr_state(src)?, geo.dispersion(geo.l2))?;
        let mut weights = Vec::with_capacity(geo.n);
        let mut slit_modes = Vec::with_capacity(geo.n);
        let mut partner_modes = Vec::with_capacity(geo.n);
        for k in 1..=geo.n {
            let (w, psi) = condition_on_slit(&pair, k, geo)?;
            weights.push(w);
            slit_modes.push(slit_mode(k, geo)?);
            partner_modes.push(psi);
        }
        let total = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        weights.iter_mut().for_each(|w| *w /= total);
        let slit_modes_at_detector = slit_modes
            .iter()
            .map(|g| fresnel_evolve(g, geo.l1, geo.lambda))
            .collect::<Result<Vec<_>>>()?;
        let partner_modes_at_detector = partner_modes
            .iter()
            .map(|g| fresnel_evolve(g, geo.l1, geo.lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(SlitDecomposition {
            pair_at_slits: pair,
            weights,
            slit_modes,
            partner_modes,
            slit_modes_at_detector,
            partner_modes_at_detector,
            z1_detect: geo.z1_detect,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// `⟨z1_detect|U1|φ_k⟩` for every slit.
    pub fn detector_amplitudes(&self) -> Vec<C64> {
        self.slit_modes_at_detector.iter().map(|g| g.eval(self.z1_detect)).collect()
    }

    /// Magnitudes and phases of [`Self::detector_amplitudes`].
    pub fn envelopes(&self) -> (Vec<f64>, Vec<f64>) {
        self.detector_amplitudes().iter().map(|a| (a.norm(), a.arg())).unzip()
    }

    /// Largest `|⟨ψ_j|ψ_k⟩|` over distinct pairs.
    pub fn max_partner_overlap(&self) -> f64 {
        let m = &self.partner_modes;
        let mut worst = 0.0f64;
        for j in 0..m.len() {
            for k in (j + 1)..m.len() {
                worst = worst.max(m[j].inner(&m[k]).norm());
            }
        }
        worst
    }

    /// Fringe period of adjacent-slit cross terms in z2 at D2.
    pub fn fringe_period(&self) -> Option<f64> {
        let m = &self.partner_modes_at_detector;
        if m.len() < 2 {
            return None;
        }
        let slope = (m[1].to_quad().q - m[0].to_quad().q).im.abs();
        (slope > 1e-300).then(|| 2.0 * PI / slope)
    }

    /// Branch amplitudes `c_k e^{iθ_k} φ_k(z1_detect) ψ_k(z2)` at D2 position `z2`.
    pub fn branch_amplitudes(&self, z2: f64, probs: &[f64], phases: &[f64], out: &mut [C64]) {
        let det = self.detector_amplitudes();
        for k in 0..self.n() {
            out[k] = probs[k]
                * C64::from_polar(1.0, phases[k])
                * det[k]
                * self.partner_modes_at_detector[k].eval(z2);
        }
    }
}
