//! Set Membership function identification from noisy samples: envelope
//! estimators with guaranteed worst-case error bounds, hypothesis
//! falsification, minimax parametric fitting, and hybrid parametric +
//! Set Membership estimators.

pub mod adversarial;
pub mod data;
pub mod envelope;
pub mod error;
pub mod falsification;
pub mod grid;
pub mod parametric;
pub mod psm;
pub mod synth;

mod linprog;

pub use adversarial::{adversarial_interpolant, demonstrate_unreliability, AdversarialInterpolant};
pub use data::{
    build_regressors, points_from_csv, BoundingBox, Dataset, HypothesesConfig, NormQ, NormSpec,
    RegressorConfig, Sample, SmHypotheses,
};
pub use envelope::{Band, Envelope, ErrorReport, Uncertainty};
pub use error::{Error, Result};
pub use falsification::{
    datum_consistent, falsification_curve, falsify, falsify_via_envelope, FalsificationCurve,
    FalsificationEvent, InflationPolicy, StreamState, Verdict,
};
pub use parametric::{
    fit_least_squares, fit_linf, gaussian_delta, pp_falsify, suboptimality_certificate,
    BasisFamily, Certificate, ConfidenceBound, GradBound, ParametricModel,
};
pub use psm::{build_psm, psm_falsify, residual_dataset, PsmEstimator, ResidualDataset};
pub use synth::{SyntheticTruth, TruthFn};
