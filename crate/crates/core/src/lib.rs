//! Entangled-pair n-slit ghost interference with a which-path detector.
//!
//! Particle 1 of a momentum-entangled pair crosses an n-slit and marks a
//! path detector; particle 2 never meets a slit but shows n-slit fringes
//! when counted in coincidence with a fixed detector behind the slits.
//! This crate computes particle 1's path distinguishability and particle 2's
//! coherence by two independent routes (the conditioned density matrix and
//! the coincidence fringe pattern) and checks them against a brute-force
//! spectral propagation of the full two-particle wavefunction.
//!
//! Units: every length is in one arbitrary unit and time never appears; a
//! free flight over distance `L` at wavelength `λ` is the dispersion
//! parameter `ħt/m = λL/2π`.

pub mod coherence;
pub mod discrimination;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod pattern;

pub use coherence::{
    coherence, conditional_rho, duality_report, unconditional_rho, DensityMatrix, DualityReport,
};
pub use discrimination::{
    distinguishability, random_gram, uniform_gram, validate_gram, DetectorGram, GramReport,
};
pub use error::{Error, Result};
pub use gaussian::{
    condition_on_slit, evolve_pair, fresnel_evolve, gamma_limit, make_epr_state, slit_mode,
    Gaussian1D, Geometry, Regime, SlitDecomposition, SourceParams, TwoParticleGaussian,
};
pub use oracle::{
    compare_patterns, free_pair_marginals, propagate_pair, single_slit_partner, GridSpec, OracleRun,
    PatternComparison,
};
pub use pattern::{
    closed_form_coherence, closed_form_pattern, coherence_from_pattern, coincidence_pattern, default_grid,
    primary_maximum, ClosedForm, PatternResult, PrimaryMaximum, Transcription,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
