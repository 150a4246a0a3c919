//! Boundary-integral functional calculus on unbounded smooth convex domains.
//!
//! The crate models canonical convex domains (half-plane, hyperbola branch,
//! parabola interior), computes numerical-range data for finite complex
//! matrices, evaluates rational functions of matrices both directly and by
//! contour quadrature over the unbounded boundary, and verifies the
//! quantitative inequalities that connect them (double-layer mass identities,
//! the `g`-transform bound, the `S`-transform bound, and the aperture-angle
//! spectral-set constant).

pub mod campaign;
pub mod domain;
pub mod error;
pub(crate) mod numerics;
pub mod numrange;
pub mod quadrature;
pub mod rational;
pub mod transforms;
pub mod verifier;

pub use campaign::{
    run_campaign, trial_violates, Aggregate, BoundReport, CampaignConfig, DomainConfig,
    DomainSummary, EnsembleConfig, FunctionTemplate, OutputConfig, Tolerances, TrialRecord,
};
pub use domain::{BoundaryPoint, ConvexDomain, DomainKind};
pub use error::{Error, Result};
pub use quadrature::{build_quadrature, build_quadrature_with, mass, BoundaryQuadrature, QuadratureOptions};
pub use rational::{
    eval_matrix_direct, eval_matrix_spectral, mobius_damp, regularize_matrix, sup_norm,
    PoleTerm, RationalFunction,
};
pub use transforms::{
    cauchy_f_matrix, conj_cauchy_g, g_matrix, matrix_transforms, mu_kernel, mu_operator,
    s_matrix, s_scalar, MatrixTransforms, TransformResult,
};
pub use verifier::{
    adjoint_residual, k_of_alpha, quartic_residual, verify_lemma1, verify_lemma2,
    verify_main_bound, verify_regularization, verify_schwenninger, Lemma1Outcome, Lemma2Outcome,
    MainBoundOutcome, RegularizationOutcome,
};
pub use numrange::{
    certify_containment, numrange_boundary, random_matrix_ensemble, random_matrix_in_domain,
    ContainmentCertificate, EnsembleKind, MatrixOperator,
};
