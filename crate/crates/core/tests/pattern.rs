use std::f64::consts::PI;

use ghostsim_core::pattern::{closed_form_coherence, default_grid, linspace, primary_maximum, Transcription};
use ghostsim_core::*;
use proptest::prelude::*;

fn centered(n: usize, z0: f64, l1: f64, l2: f64) -> Geometry {
    Geometry {
        n,
        slit_spacing: z0,
        slit_width: 0.1,
        l1,
        l2,
        lambda: 1.0,
        z1_detect: 0.0,
        offset: Geometry::centered_offset(n, z0),
    }
}

/// Twice the mean spacing of the sign changes of the cross term; these
/// do not move with the branch envelopes.
fn measured_period(p: &PatternResult) -> f64 {
    let x = p.cross_term();
    let zeros: Vec<f64> = (1..x.len())
        .filter(|&i| x[i - 1].signum() != x[i].signum())
        .map(|i| p.z2[i - 1] - x[i - 1] * (p.z2[i] - p.z2[i - 1]) / (x[i] - x[i - 1]))
        .collect();
    assert!(zeros.len() >= 3, "too few fringes: {zeros:?}");
    2.0 * (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64
}

#[test]
fn two_slit_fringe_period() {
    let src = SourceParams::new(1.0, 100.0).unwrap();
    let geo = centered(2, 1.0, 10.0, 3.0);
    let det = uniform_gram(2, 1.0).unwrap();
    let z = linspace(-30.0, 30.0, 6001);
    let p = coincidence_pattern(&src, &geo, &det, &[0.0; 2], &z).unwrap();
    let got = measured_period(&p);

    let d = geo.effective_distance();
    let lam = geo.lambda;
    // γ read as a length: γ² = ε² + 1/σ².
    let g2 = 0.01 + 1.0;
    let want = 2.0 * PI * (g2 * g2 * PI * PI + lam * lam * d * d) / (2.0 * PI * geo.slit_spacing * lam * d);
    assert!((got - want).abs() / want < 1e-3, "period {got} vs {want}");
    // The literal reading with γ = ε² + 1/σ² raised to the fourth power.
    let g = g2;
    let literal = (g.powi(4) * PI * PI + lam * lam * d * d) / (geo.slit_spacing * lam * d);
    println!("two-slit period: measured {got:.6}, γ-as-length {want:.6}, literal {literal:.6}");
}

#[test]
fn broad_envelope_form_tracks_full_form() {
    let src = SourceParams::new(10.0, 100.0).unwrap();
    let geo = centered(2, 1.0, 1000.0, 100.0);
    let det = uniform_gram(2, 0.7).unwrap();
    let dec = SlitDecomposition::new(&src, &geo).unwrap();
    let period = dec.fringe_period().unwrap();
    let z = linspace(-2.5 * period, 2.5 * period, 1001);
    for tr in [Transcription::Printed, Transcription::Rederived] {
        let full = closed_form_pattern(&src, &geo, &det, &[0.0; 2], &z, ClosedForm::Full, tr).unwrap();
        let broad =
            closed_form_pattern(&src, &geo, &det, &[0.0; 2], &z, ClosedForm::BroadEnvelope, tr).unwrap();
        let peak = full.iter().cloned().fold(0.0, f64::max);
        let dev = full.iter().zip(&broad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
        assert!(dev < 1e-3, "{tr:?}: {dev:e}");
    }
}

#[test]
fn closed_form_cross_validation() {
    let src = SourceParams::new(1.0, 100.0).unwrap();
    let mut geo = centered(3, 1.0, 10.0, 3.0);
    geo.offset += 0.3; // off-center slits exercise the offset phase terms
    let det = uniform_gram(3, 0.5).unwrap();
    let phases = [0.0, 0.4, -0.2];
    let z = default_grid(&src, &geo, 2001, 5.0).unwrap();
    let exact = coincidence_pattern(&src, &geo, &det, &phases, &z).unwrap();
    let peak = exact.intensity.iter().cloned().fold(0.0, f64::max);
    let mut report = Vec::new();
    for tr in [Transcription::Rederived, Transcription::Printed] {
        let cf = closed_form_pattern(&src, &geo, &det, &phases, &z, ClosedForm::Full, tr).unwrap();
        let dev =
            exact.intensity.iter().zip(&cf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
        report.push((tr, dev));
    }
    println!("closed form vs exact pattern (max deviation / peak): {report:?}");
    // The rederived form is the strong limit of the exact pattern.
    assert!(report[0].1 < 1e-3, "{report:?}");
    // The literal transcription is off by more than the regime error.
    assert!(report[1].1 > 10.0 * report[0].1, "{report:?}");
}

fn ratio_at(src: &SourceParams, geo: &Geometry, det: &DetectorGram, z: f64) -> f64 {
    let p = coincidence_pattern(src, geo, det, &vec![0.0; geo.n], &[z]).unwrap();
    p.intensity[0] / p.incoherent[0]
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn extraction_matches_exact_ratio_maximum() {
    let src = SourceParams::new(10.0, 100.0).unwrap();
    let mut runs = Vec::new();
    for (n, s, shift) in [(2, 0.3, 0.0), (3, 0.8, 0.37), (4, 0.55, -0.2)] {
        let mut geo = centered(n, 1.0, 1000.0, 100.0);
        geo.offset += shift;
        let det = uniform_gram(n, s).unwrap();
        let z = default_grid(&src, &geo, 4001, 10.0).unwrap();
        let p = coincidence_pattern(&src, &geo, &det, &vec![0.0; n], &z).unwrap();
        let m = primary_maximum(&p).unwrap();
        let h = z[1] - z[0];
        let best = golden_max(|x| ratio_at(&src, &geo, &det, x), m.z2 - 2.0 * h, m.z2 + 2.0 * h);
        let exact = (best - 1.0) / (n as f64 - 1.0);
        assert!((m.coherence - exact).abs() < 1e-6, "n={n}: {} vs {exact}", m.coherence);
        let limit = closed_form_coherence(&det, &geo);
        assert!((m.coherence - limit).abs() < 1e-4, "n={n}: {} vs {limit}", m.coherence);
        runs.push((n, m.coherence, limit));
    }
    println!("pattern coherence vs strong-limit formula: {runs:?}");
}

#[test]
fn coherence_grows_toward_one_with_distance() {
    let src = SourceParams::new(10.0, 100.0).unwrap();
    let det = uniform_gram(3, 1.0).unwrap();
    let mut last = 0.0;
    for l1 in [2.0, 5.0, 20.0, 1000.0] {
        let geo = centered(3, 1.0, l1, 100.0);
        let z = default_grid(&src, &geo, 4001, 10.0).unwrap();
        let c = coherence_from_pattern(&coincidence_pattern(&src, &geo, &det, &[0.0; 3], &z).unwrap())
            .unwrap();
        assert!(c > last, "L1={l1}: {c} <= {last}");
        last = c;
    }
    assert!(last > 0.9999, "{last}");
}

#[test]
fn narrow_grid_gives_extraction_error() {
    let src = SourceParams::new(1.0, 100.0).unwrap();
    let geo = centered(3, 1.0, 10.0, 3.0);
    let det = uniform_gram(3, 0.5).unwrap();
    // A window on the flank of the central fringe has no interior maximum.
    let z = linspace(1.0, 2.0, 50);
    let p = coincidence_pattern(&src, &geo, &det, &[0.0; 3], &z).unwrap();
    assert!(matches!(primary_maximum(&p), Err(Error::Extraction(_))));
}

fn strong_source() -> impl Strategy<Value = SourceParams> {
    (0.5f64..20.0, 1.0f64..5.0).prop_map(|(sigma, m)| {
        // Ω ≥ 10·max(ε, 1/σ) with ε = 0.1
        let omega = 10.0 * m * (0.1f64).max(1.0 / sigma);
        SourceParams::new(sigma, omega).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn centered_pattern_is_even(
        src in strong_source(),
        n in 2usize..6,
        s in 0.0f64..=1.0,
        l1 in 1.0f64..50.0,
        l2 in 0.0f64..10.0,
    ) {
        let geo = centered(n, 1.0, l1, l2);
        let det = uniform_gram(n, s).unwrap();
        let z = linspace(-15.0, 15.0, 601);
        let p = coincidence_pattern(&src, &geo, &det, &vec![0.0; n], &z).unwrap();
        let peak = p.intensity.iter().cloned().fold(0.0, f64::max);
        for i in 0..z.len() {
            let j = z.len() - 1 - i;
            prop_assert!((p.intensity[i] - p.intensity[j]).abs() <= 1e-9 * peak);
        }
    }

    // Equal amplitudes and a uniform detector overlap: the fringe bound and
    // the duality bound both hold for the pattern route.
    #[test]
    fn fringe_and_duality_bounds_uniform_detector(
        src in strong_source(),
        n in 2usize..6,
        s in 0.0f64..=1.0,
        l1 in 1.0f64..100.0,
        l2 in 0.0f64..10.0,
    ) {
        let geo = centered(n, 1.0, l1, l2);
        let det = uniform_gram(n, s).unwrap();
        let z = default_grid(&src, &geo, 2001, 6.0).unwrap();
        let p = coincidence_pattern(&src, &geo, &det, &vec![0.0; n], &z).unwrap();
        let c2 = coherence_from_pattern(&p).unwrap();
        prop_assert!(c2 <= s + 1e-9, "c2 {} > bound {}", c2, s);
        prop_assert!(c2 + distinguishability(&det) <= 1.0 + 1e-6);
        prop_assert!(p.intensity.iter().all(|&v| v >= 0.0));
    }
}
