//! Campaign configuration, trial records, and the verification campaign
//! runner that sweeps domains x ensembles x function templates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::numrange::{numrange_boundary, random_matrix_ensemble, EnsembleKind};
use crate::quadrature::{build_quadrature, BoundaryQuadrature};
use crate::rational::{eval_matrix_direct, mobius_damp, sup_norm, RationalFunction};
use crate::transforms::matrix_transforms;
use crate::verifier::{
    adjoint_residual, k_of_alpha, schwenninger_residual_parts, verify_lemma1, AUTO_DAMP_EPS,
};

/// Domain descriptor as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainConfig {
    Halfplane,
    Hyperbola { a: f64, b: f64 },
    Parabola { p: f64 },
    /// Smooth hyperbolic stand-in for the sharp sector of half-angle `alpha`.
    SectorApprox { alpha: f64 },
}

impl DomainConfig {
    pub fn build(&self) -> Result<ConvexDomain> {
        match *self {
            DomainConfig::Halfplane => Ok(ConvexDomain::half_plane()),
            DomainConfig::Hyperbola { a, b } => ConvexDomain::hyperbola(a, b),
            DomainConfig::Parabola { p } => ConvexDomain::parabola(p),
            DomainConfig::SectorApprox { alpha } => ConvexDomain::sector_approx(alpha),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DomainConfig::Halfplane => "halfplane",
            DomainConfig::Hyperbola { .. } => "hyperbola",
            DomainConfig::Parabola { .. } => "parabola",
            DomainConfig::SectorApprox { .. } => "sector-approx",
        }
    }
}

/// One ensemble block of the campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    pub n: usize,
    pub count: usize,
    pub margin: f64,
}

/// Numerical tolerances of a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Quadrature tail/panel tolerance.
    pub quad: f64,
    /// Margin violations are flagged below `-bound_slack_factor * quad`.
    pub bound_slack_factor: f64,
    /// Angle count for numerical-range sampling and certification.
    pub n_angles: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quad: 1e-8, bound_slack_factor: 10.0, n_angles: 256 }
    }
}

/// Output file destinations; all optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
}

/// A rational-function template with its report label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionTemplate {
    pub label: String,
    #[serde(flatten)]
    pub function: RationalFunction,
}

/// Full campaign description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub domains: Vec<DomainConfig>,
    pub ensembles: Vec<EnsembleConfig>,
    pub functions: Vec<FunctionTemplate>,
    pub tolerances: Tolerances,
    pub seed: u64,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl CampaignConfig {
    /// The shipped default campaign: three domain families, a 60/20/20
    /// Ginibre/Jordan/normal ensemble mix of 100 matrices per domain, and
    /// four function templates.
    pub fn default_verification() -> Self {
        let functions = vec![
            FunctionTemplate {
                label: "resolvent".into(),
                function: RationalFunction::simple_pole(
                    Complex64::new(-1.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ),
            },
            FunctionTemplate {
                label: "cayley".into(),
                function: RationalFunction::cayley(Complex64::new(1.0, 0.0)),
            },
            FunctionTemplate {
                label: "squared-resolvent".into(),
                function: RationalFunction::resolvent_power(Complex64::new(-2.0, 0.0), 2)
                    .expect("static template"),
            },
            FunctionTemplate {
                label: "three-pole".into(),
                function: RationalFunction::new(
                    vec![
                        crate::rational::PoleTerm {
                            location: Complex64::new(-1.5, 1.2),
                            coeffs: vec![Complex64::new(0.8, -0.3)],
                        },
                        crate::rational::PoleTerm {
                            location: Complex64::new(-0.7, -2.1),
                            coeffs: vec![Complex64::new(-0.4, 0.9)],
                        },
                        crate::rational::PoleTerm {
                            location: Complex64::new(-2.5, 0.4),
                            coeffs: vec![Complex64::new(1.1, 0.6)],
                        },
                    ],
                    Complex64::new(0.0, 0.0),
                )
                .expect("static template"),
            },
        ];
        CampaignConfig {
            domains: vec![
                DomainConfig::Halfplane,
                DomainConfig::Hyperbola { a: 1.0, b: 1.0 },
                DomainConfig::Parabola { p: 0.25 },
            ],
            ensembles: vec![
                EnsembleConfig { kind: EnsembleKind::Ginibre, n: 8, count: 60, margin: 0.15 },
                EnsembleConfig { kind: EnsembleKind::Jordan, n: 6, count: 20, margin: 0.15 },
                EnsembleConfig { kind: EnsembleKind::Normal, n: 8, count: 20, margin: 0.15 },
            ],
            functions,
            tolerances: Tolerances { quad: 1e-7, bound_slack_factor: 10.0, n_angles: 256 },
            seed: 9201,
            outputs: OutputConfig::default(),
        }
    }
}

/// Per-trial results; one row of the campaign CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub domain_kind: String,
    pub alpha: f64,
    pub n: usize,
    pub ensemble: String,
    pub function_id: String,
    pub sup_norm_f: f64,
    #[serde(rename = "norm_fA")]
    pub norm_fa: f64,
    pub ratio: f64,
    pub k_alpha: f64,
    pub ratio_over_k: f64,
    pub lemma1_margin: f64,
    pub lemma2_margin: f64,
    pub schwenninger_residual: f64,
    pub adjoint_residual: f64,
    pub quad_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Exact folds over the trial records of one scope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub max_ratio: f64,
    pub min_margin_lemma1: f64,
    pub min_margin_lemma2: f64,
    pub max_schwenninger_residual: f64,
    pub violations: u64,
}

impl Aggregate {
    fn fold(trials: &[TrialRecord], tol: f64) -> Aggregate {
        let mut agg = Aggregate {
            max_ratio: f64::NEG_INFINITY,
            min_margin_lemma1: f64::INFINITY,
            min_margin_lemma2: f64::INFINITY,
            max_schwenninger_residual: f64::NEG_INFINITY,
            violations: 0,
        };
        for t in trials {
            if t.error.is_some() {
                continue;
            }
            agg.max_ratio = agg.max_ratio.max(t.ratio);
            agg.min_margin_lemma1 = agg.min_margin_lemma1.min(t.lemma1_margin);
            agg.min_margin_lemma2 = agg.min_margin_lemma2.min(t.lemma2_margin);
            agg.max_schwenninger_residual =
                agg.max_schwenninger_residual.max(t.schwenninger_residual);
            if trial_violates(t, tol) {
                agg.violations += 1;
            }
        }
        agg
    }
}

/// A trial violates when a lemma margin drops below the slack, an identity
/// residual exceeds it, or the main ratio exceeds `K(alpha)` beyond 1e-6.
pub fn trial_violates(t: &TrialRecord, tol: f64) -> bool {
    t.lemma1_margin < -tol
        || t.lemma2_margin < -tol
        || t.schwenninger_residual > tol
        || t.adjoint_residual > tol
        || t.ratio_over_k > 1.0 + 1e-6
}

/// Per-domain roll-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSummary {
    pub domain: DomainConfig,
    pub alpha: f64,
    pub k_alpha: f64,
    pub aggregate: Aggregate,
}

/// The campaign report: per-domain summaries, the flat trial list, and the
/// overall aggregate. `max_ratio` is the empirical lower bound on the
/// spectral-set constant; the report never claims tightness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub seed: u64,
    pub quad_tol: f64,
    pub violation_tolerance: f64,
    pub sections: Vec<DomainSummary>,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub hard_failures: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

struct PreparedTemplate {
    label: String,
    /// Damped (when needed) and normalized to unit sup norm.
    unit: RationalFunction,
    /// Sup norm of the damped template before normalization.
    sup: f64,
    lemma1_margin: f64,
    lemma1_quad_error: f64,
}

const TRANSFORM_FOCI: usize = 16;
const LEMMA1_SAMPLES: usize = 17;

fn prepare_templates(
    config: &CampaignConfig,
    domain: &ConvexDomain,
) -> Result<Vec<PreparedTemplate>> {
    // One boundary quadrature focused at the g-sampling points serves every
    // template of this domain.
    let window = 8.0f64;
    let sigmas: Vec<Complex64> = (0..LEMMA1_SAMPLES)
        .map(|j| {
            let t = -window + 2.0 * window * (j as f64) / ((LEMMA1_SAMPLES - 1) as f64);
            domain.boundary_point(t).sigma
        })
        .collect();
    let quad = build_quadrature(domain, &sigmas, config.tolerances.quad)?;
    config
        .functions
        .iter()
        .map(|template| {
            let damped = if template.function.vanishes_at_infinity() {
                template.function.clone()
            } else {
                mobius_damp(&template.function, AUTO_DAMP_EPS)?
            };
            let sup = sup_norm(&damped, domain)?;
            if sup == 0.0 {
                return Err(Error::UndefinedRatio(format!(
                    "template {} vanishes identically",
                    template.label
                )));
            }
            let unit = damped.scale(Complex64::new(1.0 / sup, 0.0));
            let l1 = verify_lemma1(&unit, domain, &quad, LEMMA1_SAMPLES)?;
            Ok(PreparedTemplate {
                label: template.label.clone(),
                unit,
                sup,
                lemma1_margin: l1.margin,
                lemma1_quad_error: l1.quad_error,
            })
        })
        .collect()
}

struct SlotDescriptor {
    ensemble: EnsembleConfig,
    seed: u64,
}

fn run_slot(
    domain: &ConvexDomain,
    quad_tol: f64,
    slot: &SlotDescriptor,
    templates: &[PreparedTemplate],
    alpha: f64,
    k_alpha: f64,
    domain_kind: &str,
) -> Vec<TrialRecord> {
    let blank = |label: &str| TrialRecord {
        trial_id: 0,
        seed: slot.seed,
        domain_kind: domain_kind.to_string(),
        alpha,
        n: slot.ensemble.n,
        ensemble: slot.ensemble.kind.name().to_string(),
        function_id: label.to_string(),
        sup_norm_f: f64::NAN,
        norm_fa: f64::NAN,
        ratio: f64::NAN,
        k_alpha,
        ratio_over_k: f64::NAN,
        lemma1_margin: f64::NAN,
        lemma2_margin: f64::NAN,
        schwenninger_residual: f64::NAN,
        adjoint_residual: f64::NAN,
        quad_error: f64::NAN,
        error: None,
    };
    let fail_all = |message: String| -> Vec<TrialRecord> {
        templates
            .iter()
            .map(|t| {
                let mut r = blank(&t.label);
                r.error = Some(message.clone());
                r
            })
            .collect()
    };

    let prep = || -> Result<(crate::numrange::MatrixOperator, BoundaryQuadrature)> {
        let a = random_matrix_ensemble(
            domain,
            slot.ensemble.kind,
            slot.ensemble.n,
            slot.ensemble.margin,
            slot.seed,
        )?;
        let foci = numrange_boundary(&a, TRANSFORM_FOCI)?;
        let quad = build_quadrature(domain, &foci, quad_tol)?;
        Ok((a, quad))
    };
    let (a, quad) = match prep() {
        Ok(v) => v,
        Err(e) => return fail_all(e.to_string()),
    };

    let bound2 = 2.0 - 2.0 * alpha / PI;
    templates
        .iter()
        .map(|t| {
            let mut rec = blank(&t.label);
            rec.lemma1_margin = t.lemma1_margin;
            let mut run = || -> Result<()> {
                let fa = eval_matrix_direct(&t.unit, &a)?;
                let suite = matrix_transforms(&t.unit, &quad, &a)?;
                let ratio = crate::numrange::operator_norm(&fa);
                rec.sup_norm_f = t.sup;
                rec.norm_fa = t.sup * ratio;
                rec.ratio = ratio;
                rec.ratio_over_k = ratio / k_alpha;
                rec.lemma2_margin = bound2 - crate::numrange::operator_norm(&suite.s.value);
                rec.schwenninger_residual =
                    schwenninger_residual_parts(&fa, &suite.s.value, &suite.g.value);
                rec.adjoint_residual = adjoint_residual(&fa, &suite.s.value, &suite.g.value);
                rec.quad_error = suite
                    .cauchy
                    .quad_error_estimate
                    .max(suite.g.quad_error_estimate)
                    .max(suite.s.quad_error_estimate)
                    .max(t.lemma1_quad_error);
                Ok(())
            };
            if let Err(e) = run() {
                rec.error = Some(e.to_string());
            }
            rec
        })
        .collect()
}

/// Executes the full campaign. Deterministic in the master seed: records are
/// ordered by (domain, ensemble, slot, template) and slot seeds are derived
/// by hashing, so thread count does not affect the report.
pub fn run_campaign(config: &CampaignConfig) -> Result<BoundReport> {
    if config.domains.is_empty() {
        return Err(Error::InvalidInput("campaign needs at least one domain".into()));
    }
    let quad_tol = config.tolerances.quad;
    let tol = config.tolerances.bound_slack_factor * quad_tol;
    let mut trials: Vec<TrialRecord> = Vec::new();
    let mut sections = Vec::new();

    for (d_idx, dc) in config.domains.iter().enumerate() {
        let domain = dc.build()?;
        let alpha = domain.aperture();
        let k_alpha = k_of_alpha(alpha)?;
        let templates = prepare_templates(config, &domain)?;

        let mut slots = Vec::new();
        for (e_idx, ens) in config.ensembles.iter().enumerate() {
            for j in 0..ens.count {
                let mix = ((d_idx as u64) << 40) ^ ((e_idx as u64) << 20) ^ (j as u64);
                slots.push(SlotDescriptor {
                    ensemble: *ens,
                    seed: splitmix64(config.seed ^ splitmix64(mix)),
                });
            }
        }

        let domain_trials: Vec<Vec<TrialRecord>> = slots
            .par_iter()
            .map(|slot| {
                run_slot(&domain, quad_tol, slot, &templates, alpha, k_alpha, dc.kind_name())
            })
            .collect();

        let start = trials.len();
        trials.extend(domain_trials.into_iter().flatten());
        let aggregate = Aggregate::fold(&trials[start..], tol);
        sections.push(DomainSummary { domain: *dc, alpha, k_alpha, aggregate });
    }

    for (i, t) in trials.iter_mut().enumerate() {
        t.trial_id = i as u64;
    }
    let aggregate = Aggregate::fold(&trials, tol);
    let hard_failures = trials.iter().filter(|t| t.error.is_some()).count() as u64;
    Ok(BoundReport {
        seed: config.seed,
        quad_tol,
        violation_tolerance: tol,
        sections,
        trials,
        aggregate,
        hard_failures,
    })
}


#[cfg(test)]
mod timing {
    use super::*;

    #[test]
    #[ignore]
    fn default_campaign_timing() {
        let config = CampaignConfig::default_verification();
        let t0 = std::time::Instant::now();
        let report = run_campaign(&config).unwrap();
        println!(
            "default campaign: {} trials in {:?}, violations {}, failures {}, max ratio {:.6}",
            report.trials.len(),
            t0.elapsed(),
            report.aggregate.violations,
            report.hard_failures,
            report.aggregate.max_ratio
        );
        for s in &report.sections {
            println!(
                "  {}: alpha={:.4} K={:.4} max_ratio={:.6} minL1={:.2e} minL2={:.2e} maxSchw={:.2e} viol={}",
                s.domain.kind_name(), s.alpha, s.k_alpha, s.aggregate.max_ratio,
                s.aggregate.min_margin_lemma1, s.aggregate.min_margin_lemma2,
                s.aggregate.max_schwenninger_residual, s.aggregate.violations
            );
        }
    }
}
