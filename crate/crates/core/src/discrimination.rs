//! Which-path detector states and their unambiguous-discrimination bound.
//!
//! The detector enters only through the Gram matrix `G_ij = ⟨d_i|d_j⟩` of
//! its n states together with the path amplitudes `c_k`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Acceptance tolerance for Hermiticity, unit diagonal and PSD checks.
pub const GRAM_TOL: f64 = 1e-10;

/// Detector-state Gram matrix plus path amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorGram {
    /// Row-major `⟨d_i|d_j⟩`, each entry a `[re, im]` pair in JSON.
    gram: Vec<Vec<C64>>,
    /// Path amplitudes `c_k ≥ 0` with `Σ c_k² = 1`.
    probs: Vec<f64>,
}

/// One failed check in a [`GramReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GramIssue {
    NotSquare,
    DimensionMismatch { gram: usize, probs: usize },
    TooSmall(usize),
    NotHermitian(f64),
    DiagonalNotUnit(f64),
    OverlapExceedsOne { i: usize, j: usize, modulus: f64 },
    NotPositiveSemidefinite(f64),
    NegativeAmplitude(usize),
    AmplitudesNotNormalized(f64),
    NonFinite,
}

/// Outcome of [`validate_gram`]; never an error by itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub diagonal_deviation: f64,
    pub issues: Vec<GramIssue>,
}

impl GramReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks a candidate Gram matrix and amplitude vector.
pub fn validate_gram(gram: &[Vec<C64>], probs: &[f64]) -> GramReport {
    let n = gram.len();
    let mut issues = Vec::new();
    let report = |issues: Vec<GramIssue>, h, e, d| GramReport {
        hermiticity_residual: h,
        min_eigenvalue: e,
        diagonal_deviation: d,
        issues,
    };
    if gram.iter().any(|row| row.len() != n) {
        issues.push(GramIssue::NotSquare);
        return report(issues, f64::NAN, f64::NAN, f64::NAN);
    }
    if gram.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite())
        || probs.iter().any(|p| !p.is_finite())
    {
        issues.push(GramIssue::NonFinite);
        return report(issues, f64::NAN, f64::NAN, f64::NAN);
    }
    if n < 2 {
        issues.push(GramIssue::TooSmall(n));
    }
    if probs.len() != n {
        issues.push(GramIssue::DimensionMismatch { gram: n, probs: probs.len() });
    }

    let mut herm = 0.0f64;
    let mut diag = 0.0f64;
    for i in 0..n {
        diag = diag.max((gram[i][i] - C64::from(1.0)).norm());
        for j in 0..n {
            herm = herm.max((gram[i][j] - gram[j][i].conj()).norm());
            let m = gram[i][j].norm();
            if i != j && m > 1.0 + GRAM_TOL {
                issues.push(GramIssue::OverlapExceedsOne { i, j, modulus: m });
            }
        }
    }
    if herm > GRAM_TOL {
        issues.push(GramIssue::NotHermitian(herm));
    }
    if diag > GRAM_TOL {
        issues.push(GramIssue::DiagonalNotUnit(diag));
    }

    let min_eig = if n == 0 {
        f64::NAN
    } else {
        // Eigenvalues of the Hermitian part; a non-Hermitian input is already flagged.
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (gram[i][j] + gram[j][i].conj()));
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    };
    if min_eig < -GRAM_TOL {
        issues.push(GramIssue::NotPositiveSemidefinite(min_eig));
    }

    for (k, &p) in probs.iter().enumerate() {
        if p < 0.0 {
            issues.push(GramIssue::NegativeAmplitude(k));
        }
    }
    let norm_dev = (probs.iter().map(|p| p * p).sum::<f64>() - 1.0).abs();
    if norm_dev > GRAM_TOL {
        issues.push(GramIssue::AmplitudesNotNormalized(norm_dev));
    }
    report(issues, herm, min_eig, diag)
}

impl DetectorGram {
    /// Validated constructor.
    pub fn new(gram: Vec<Vec<C64>>, probs: Vec<f64>) -> Result<Self> {
        let report = validate_gram(&gram, &probs);
        if !report.is_valid() {
            return Err(Error::InvalidDetector(format!("{:?}", report.issues)));
        }
        Ok(DetectorGram { gram, probs })
    }

    /// Parses `{"gram": [[[re, im], ...], ...], "probs": [...]}` and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DetectorGram = serde_json::from_str(text)
            .map_err(|e| Error::InvalidDetector(format!("malformed detector JSON: {e}")))?;
        DetectorGram::new(raw.gram, raw.probs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("detector serializes")
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn gram(&self) -> &[Vec<C64>] {
        &self.gram
    }

    /// `⟨d_i|d_j⟩`, zero-based.
    pub fn overlap(&self, i: usize, j: usize) -> C64 {
        self.gram[i][j]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Replaces the path amplitudes; they are renormalized to unit length.
    pub fn with_probs(mut self, probs: Vec<f64>) -> Result<Self> {
        let total = probs.iter().map(|p| p * p).sum::<f64>().sqrt();
        if !(total > 0.0) {
            return Err(Error::InvalidDetector("path amplitudes are all zero".into()));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let report = validate_gram(&self.gram, &probs);
        if !report.is_valid() {
            return Err(Error::InvalidDetector(format!("{:?}", report.issues)));
        }
        self.probs = probs;
        Ok(self)
    }

    /// Simultaneous relabeling of paths: new path `i` is old path `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let gram = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.gram[i][j]).collect())
            .collect();
        let probs = perm.iter().map(|&i| self.probs[i]).collect();
        DetectorGram { gram, probs }
    }
}

/// Detector with common overlap `s` between every pair of states and equal
/// path amplitudes `1/√n`.
pub fn uniform_gram(n: usize, s: f64) -> Result<DetectorGram> {
    if n < 2 {
        return Err(Error::domain(format!("detector dimension must be >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("common overlap must lie in [0, 1], got {s}")));
    }
    let gram = (0..n)
        .map(|i| (0..n).map(|j| C64::from(if i == j { 1.0 } else { s })).collect())
        .collect();
    DetectorGram::new(gram, vec![1.0 / (n as f64).sqrt(); n])
}

/// Gram matrix of `n` random complex unit vectors in `C^n`, equal amplitudes.
pub fn random_gram(n: usize, seed: u64) -> Result<DetectorGram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_gram_with(n, &mut rng)
}

pub(crate) fn random_gram_with<R: rand::Rng>(n: usize, rng: &mut R) -> Result<DetectorGram> {
    if n < 2 {
        return Err(Error::domain(format!("detector dimension must be >= 2, got {n}")));
    }
    let vectors: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            let v: Vec<C64> = (0..n)
                .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / norm).collect()
        })
        .collect();
    let gram = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        C64::from(1.0)
                    } else {
                        vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum()
                    }
                })
                .collect()
        })
        .collect();
    DetectorGram::new(gram, vec![1.0 / (n as f64).sqrt(); n])
}

/// Random unit-length nonnegative amplitude vector.
pub fn random_probs<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total = raw.iter().map(|p| p * p).sum::<f64>().sqrt();
    raw.into_iter().map(|p| p / total).collect()
}

/// Random detector: random Gram and random amplitudes.
pub fn random_detector<R: rand::Rng>(n: usize, rng: &mut R) -> Result<DetectorGram> {
    let probs = random_probs(n, rng);
    random_gram_with(n, rng)?.with_probs(probs)
}

/// Path distinguishability `1 - (1/(n-1)) Σ_{i≠j} c_i c_j |⟨d_i|d_j⟩|`.
pub fn distinguishability(det: &DetectorGram) -> f64 {
    1.0 - overlap_sum(det) / (det.n() as f64 - 1.0)
}

/// `Σ_{i≠j} c_i c_j |⟨d_i|d_j⟩|`.
pub(crate) fn overlap_sum(det: &DetectorGram) -> f64 {
    let c = det.probs();
    let mut s = 0.0;
    for i in 0..det.n() {
        for j in 0..det.n() {
            if i != j {
                s += c[i] * c[j] * det.overlap(i, j).norm();
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_gram_limits() {
        let orth = uniform_gram(3, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(orth.overlap(i, j), C64::from(want));
            }
        }
        let ones = uniform_gram(3, 1.0).unwrap();
        assert!(ones.gram().iter().flatten().all(|z| *z == C64::from(1.0)));
        assert!(uniform_gram(3, 1.2).is_err());
        assert!(uniform_gram(3, -0.1).is_err());
        assert!(uniform_gram(1, 0.5).is_err());
    }

    #[test]
    fn uniform_gram_min_eigenvalue() {
        let d = uniform_gram(4, 0.3).unwrap();
        let report = validate_gram(d.gram(), d.probs());
        assert!((report.min_eigenvalue - 0.7).abs() < 1e-12);
    }

    #[test]
    fn identity_is_valid() {
        let d = uniform_gram(5, 0.0).unwrap();
        assert!(validate_gram(d.gram(), d.probs()).is_valid());
    }

    #[test]
    fn oversized_overlap_is_rejected() {
        let mut g = uniform_gram(3, 0.0).unwrap().gram().to_vec();
        g[0][1] = C64::from(1.5);
        g[1][0] = C64::from(1.5);
        let report = validate_gram(&g, &[1.0 / 3f64.sqrt(); 3]);
        assert!(!report.is_valid());
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, GramIssue::OverlapExceedsOne { i: 0, j: 1, .. })));
        assert!(DetectorGram::new(g, vec![1.0 / 3f64.sqrt(); 3]).is_err());
    }

    #[test]
    fn non_hermitian_and_bad_amplitudes_reported() {
        let mut g = uniform_gram(2, 0.2).unwrap().gram().to_vec();
        g[0][1] = C64::new(0.2, 0.1);
        let report = validate_gram(&g, &[0.5, 0.5]);
        assert!(report.issues.iter().any(|i| matches!(i, GramIssue::NotHermitian(_))));
        assert!(report.issues.iter().any(|i| matches!(i, GramIssue::AmplitudesNotNormalized(_))));
        let ragged = vec![vec![C64::from(1.0)], vec![C64::from(0.0), C64::from(1.0)]];
        assert_eq!(validate_gram(&ragged, &[1.0, 0.0]).issues, vec![GramIssue::NotSquare]);
    }

    #[test]
    fn random_gram_is_valid() {
        for seed in 0..20 {
            let d = random_gram(5, seed).unwrap();
            let r = validate_gram(d.gram(), d.probs());
            assert!(r.is_valid(), "{:?}", r.issues);
            assert!(r.min_eigenvalue >= -1e-10);
        }
    }

    #[test]
    fn distinguishability_examples() {
        for n in 2..6 {
            assert_eq!(distinguishability(&uniform_gram(n, 0.0).unwrap()), 1.0);
        }
        let same = uniform_gram(2, 1.0).unwrap();
        assert!(distinguishability(&same).abs() < 1e-15);
        let half = uniform_gram(3, 0.5).unwrap();
        assert!((distinguishability(&half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let d = random_gram(3, 7).unwrap();
        let back = DetectorGram::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let text = r#"{"gram": [[[1,0],[2,0]],[[2,0],[1,0]]], "probs": [0.7071067811865476, 0.7071067811865476]}"#;
        assert!(matches!(DetectorGram::from_json(text), Err(Error::InvalidDetector(_))));
        assert!(DetectorGram::from_json("{").is_err());
    }

    proptest! {
        #[test]
        fn distinguishability_in_unit_interval(n in 2usize..8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_detector(n, &mut rng).unwrap();
            let dq = distinguishability(&d);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&dq));
        }

        #[test]
        fn distinguishability_permutation_invariant(n in 2usize..7, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_detector(n, &mut rng).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left(seed as usize % n);
            perm.swap(0, n - 1);
            let p = d.permuted(&perm);
            prop_assert!((distinguishability(&d) - distinguishability(&p)).abs() < 1e-13);
        }

        #[test]
        fn distinguishability_phase_invariant(n in 2usize..7, seed in any::<u64>(), phi in 0.0..6.3f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_detector(n, &mut rng).unwrap();
            // Rephasing the detector states: |d_k⟩ → e^{ikφ}|d_k⟩.
            let gram = (0..n).map(|i| (0..n).map(|j| {
                d.overlap(i, j) * C64::from_polar(1.0, phi * (j as f64 - i as f64))
            }).collect()).collect();
            let r = DetectorGram::new(gram, d.probs().to_vec()).unwrap();
            prop_assert!((distinguishability(&d) - distinguishability(&r)).abs() < 1e-13);
        }

        #[test]
        fn larger_uniform_overlap_never_increases_distinguishability(
            n in 2usize..7, s in 0.0..1.0f64, ds in 0.0..1.0f64
        ) {
            let t = (s + ds * (1.0 - s)).min(1.0);
            let lo = distinguishability(&uniform_gram(n, s).unwrap());
            let hi = distinguishability(&uniform_gram(n, t).unwrap());
            prop_assert!(hi <= lo + 1e-15);
        }
    }

    #[test]
    fn single_overlap_increase_monotone() {
        // Raising |G_01| with everything else fixed (kept PSD) lowers D.
        let probs = vec![0.6, 0.48, 0.64];
        let mut last = f64::INFINITY;
        for step in 0..=10 {
            let x = 0.1 * step as f64 * 0.9;
            let mut g = uniform_gram(3, 0.05).unwrap().gram().to_vec();
            g[0][1] = C64::from(x);
            g[1][0] = C64::from(x);
            let d = DetectorGram::new(g, probs.clone()).unwrap();
            let dq = distinguishability(&d);
            assert!(dq <= last);
            last = dq;
        }
    }
}
