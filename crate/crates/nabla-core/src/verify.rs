//! Randomized verification suites: seeded scenes, parallel trials,
//! deterministic reports.
//!
//! Every trial draws its scene from `seed + trial_index`, so the report is
//! byte-identical across runs and thread schedules. Engine errors inside a
//! trial are recorded as failures instead of aborting the run.

use crate::covariant::{covariant_derivative_k, iterate_covariant_oracle};
use crate::error::{Error, Result};
use crate::fractional::{
    check_contraction_commutes, check_semigroup, frac_covariant, vandermonde_multinomial_check,
    TensorSeries,
};
use crate::geometry::Connection;
use crate::manifest::scene_digest;
use crate::pq::{
    check_derivative_expansion, check_orthogonality, check_transformation_law, ExpansionVariant,
    PqKind, PqTable,
};
use crate::scalar::{Backend, Scalar};
use crate::scenegen::{random_scene, rng_for, ScenePlan};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Pq,
    Covariant,
    Fractional,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Pq => "pq",
            Suite::Covariant => "covariant",
            Suite::Fractional => "fractional",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(text: &str) -> Result<Suite> {
        match text {
            "pq" => Ok(Suite::Pq),
            "covariant" => Ok(Suite::Covariant),
            "fractional" => Ok(Suite::Fractional),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite \"{other}\" (expected pq, covariant, fractional, or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub dim_max: usize,
    pub k_max: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Failure {
    pub identity: String,
    pub scene_digest: String,
    pub indices: Vec<i64>,
    pub residual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub format: u32,
    pub suite: String,
    pub trials: u64,
    pub seed: u64,
    pub dim_max: usize,
    pub k_max: usize,
    pub failures: Vec<Failure>,
    /// Wall-clock seconds; kept out of the serialized report so identical
    /// inputs give byte-identical output.
    #[serde(skip)]
    pub elapsed: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the configured suite over `trials` seeded scenes in parallel.
pub fn run_verify(config: &VerifyConfig) -> VerifyReport {
    let started = Instant::now();
    let failures: Vec<Failure> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    VerifyReport {
        format: 1,
        suite: config.suite.name().to_string(),
        trials: config.trials,
        seed: config.seed,
        dim_max: config.dim_max,
        k_max: config.k_max,
        failures,
        elapsed: started.elapsed().as_secs_f64(),
    }
}

fn run_trial(config: &VerifyConfig, trial: u64) -> Vec<Failure> {
    let mut out = Vec::new();
    let suites: &[Suite] = match config.suite {
        Suite::All => &[Suite::Pq, Suite::Covariant, Suite::Fractional],
        Suite::Pq => &[Suite::Pq],
        Suite::Covariant => &[Suite::Covariant],
        Suite::Fractional => &[Suite::Fractional],
    };
    for &suite in suites {
        let result = match suite {
            Suite::Pq => pq_trial(config, trial),
            Suite::Covariant => covariant_trial(config, trial),
            Suite::Fractional => fractional_trial(config, trial),
            Suite::All => unreachable!(),
        };
        match result {
            Ok(failures) => out.extend(failures),
            Err(e) => out.push(Failure {
                identity: format!("engine error in {} suite: {e}", suite.name()),
                scene_digest: String::new(),
                indices: vec![trial as i64],
                residual: String::new(),
            }),
        }
    }
    out
}

fn residual_of_matrix(m: &crate::jet::JetMatrix) -> String {
    m.max_abs_coeff().to_string()
}

fn residual_of_series(t: &TensorSeries) -> String {
    let mut best = Scalar::zero(t.backend());
    for c in t.components() {
        let a = c.max_abs_coeff();
        if a.partial_cmp(&best) == Some(std::cmp::Ordering::Greater) {
            best = a;
        }
    }
    best.to_string()
}

fn pq_trial(config: &VerifyConfig, trial: u64) -> Result<Vec<Failure>> {
    let mut rng = rng_for(config.seed, trial);
    let plan = ScenePlan {
        dim_max: config.dim_max,
        k_max: config.k_max,
        valence: None,
        with_transition: true,
        series_exact: false,
    };
    let scene = random_scene(&mut rng, &plan);
    let digest = scene_digest(&scene)?;
    let mut failures = Vec::new();

    let p = PqTable::build(PqKind::P, &scene, config.k_max)?;
    let q = PqTable::build(PqKind::Q, &scene, config.k_max)?;

    for k in 0..=config.k_max {
        let residual = check_orthogonality(&p, &q, k)?;
        if !residual.is_zero() {
            failures.push(Failure {
                identity: "orthogonality (2.5)".into(),
                scene_digest: digest.clone(),
                indices: vec![k as i64],
                residual: residual_of_matrix(&residual),
            });
        }
    }

    for l in 0..=config.k_max {
        for k in 1..=(config.k_max - l) {
            for (variant, name) in [
                (ExpansionVariant::PQ, "derivative expansion (2.3)"),
                (ExpansionVariant::QP, "derivative expansion (2.4)"),
            ] {
                let residual = check_derivative_expansion(&p, &q, l, k, variant)?;
                if !residual.is_zero() {
                    failures.push(Failure {
                        identity: name.into(),
                        scene_digest: digest.clone(),
                        indices: vec![l as i64, k as i64],
                        residual: residual_of_matrix(&residual),
                    });
                }
            }
        }
    }

    for l in 0..=config.k_max {
        for (kind, name) in [
            (PqKind::P, "transformation law (2.1)"),
            (PqKind::Q, "transformation law (2.2)"),
        ] {
            let residual = check_transformation_law(&scene, l, kind)?;
            if !residual.is_zero() {
                failures.push(Failure {
                    identity: name.into(),
                    scene_digest: digest.clone(),
                    indices: vec![l as i64],
                    residual: residual_of_matrix(&residual),
                });
            }
        }
    }

    Ok(failures)
}

fn covariant_trial(config: &VerifyConfig, trial: u64) -> Result<Vec<Failure>> {
    let mut rng = rng_for(config.seed, trial);
    let p_val = rng.gen_range(0..=2usize);
    let q_val = rng.gen_range(0..=2usize);
    let plan = ScenePlan {
        dim_max: config.dim_max,
        k_max: config.k_max,
        valence: Some((p_val, q_val)),
        with_transition: false,
        series_exact: false,
    };
    let mut scene = random_scene(&mut rng, &plan);
    let flat = rng.gen_bool(0.2);
    if flat {
        scene.connection = Connection::flat(scene.dim(), scene.backend);
    }
    let digest = scene_digest(&scene)?;
    let mut failures = Vec::new();

    let p = PqTable::build(PqKind::P, &scene, config.k_max)?;
    let q = PqTable::build(PqKind::Q, &scene, config.k_max)?;
    let field = scene.field.as_ref().expect("plan attaches a field");

    for k in 1..=config.k_max {
        let closed = covariant_derivative_k(field, &p, &q, k)?;
        let iterated = iterate_covariant_oracle(field, p.level(1)?, k)?;
        let difference = closed.sub(&iterated)?;
        if !difference.is_zero() {
            failures.push(Failure {
                identity: "theorem 1 (3.1) vs iterated (3.3)".into(),
                scene_digest: digest.clone(),
                indices: vec![k as i64, p_val as i64, q_val as i64],
                residual: difference.max_abs_coeff().to_string(),
            });
        }
        if flat {
            let mut plain = field.clone();
            for _ in 0..k {
                plain = plain.diff()?;
            }
            let flat_difference = closed.sub(&plain)?;
            if !flat_difference.is_zero() {
                failures.push(Failure {
                    identity: "flat reduction (integer order)".into(),
                    scene_digest: digest.clone(),
                    indices: vec![k as i64],
                    residual: flat_difference.max_abs_coeff().to_string(),
                });
            }
        }
    }

    Ok(failures)
}

fn fractional_trial(config: &VerifyConfig, trial: u64) -> Result<Vec<Failure>> {
    let mut rng = rng_for(config.seed, trial);
    let levels = config.k_max.min(4);
    let plan = ScenePlan {
        dim_max: config.dim_max.min(2),
        k_max: levels,
        valence: Some((1, 1)),
        with_transition: false,
        series_exact: true,
    };
    let mut scene = random_scene(&mut rng, &plan);
    if rng.gen_bool(0.2) {
        scene.connection = Connection::flat(scene.dim(), scene.backend);
    }
    let digest = scene_digest(&scene)?;
    let mut failures = Vec::new();

    let p = PqTable::build(PqKind::P, &scene, levels)?;
    let q = PqTable::build(PqKind::Q, &scene, levels)?;
    let field = scene.field.as_ref().expect("plan attaches a field");
    let a = TensorSeries::from_jets(field)?;
    let int = |n: i64| Scalar::from_i64(n, Backend::Rational);

    for alpha in 0..=levels as i64 {
        for beta in 0..=(levels as i64 - alpha) {
            let residual = check_semigroup(&a, &p, &q, &int(alpha), &int(beta), levels)?;
            if !residual.is_zero() {
                failures.push(Failure {
                    identity: "semigroup (4.6)".into(),
                    scene_digest: digest.clone(),
                    indices: vec![alpha, beta],
                    residual: residual_of_series(&residual),
                });
            }
        }
    }

    for alpha in 0..=levels.min(3) as i64 {
        let residual = check_contraction_commutes(&a, &p, &q, &int(alpha), levels)?;
        if !residual.is_zero() {
            failures.push(Failure {
                identity: "contraction commutes (4 ii)".into(),
                scene_digest: digest.clone(),
                indices: vec![alpha],
                residual: residual_of_series(&residual),
            });
        }
    }

    if scene.connection.is_flat() {
        for alpha in 0..=levels as i64 {
            let derived = frac_covariant(&a, &p, &q, &int(alpha), levels)?;
            let plain = a.frac_diff(&int(alpha))?;
            let residual = derived.value.sub(&plain)?;
            if !residual.is_zero() {
                failures.push(Failure {
                    identity: "flat reduction (fractional)".into(),
                    scene_digest: digest.clone(),
                    indices: vec![alpha],
                    residual: residual_of_series(&residual),
                });
            }
        }
    }

    for round in 0..3 {
        let alpha = Scalar::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        let beta = Scalar::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        let slots = rng.gen_range(1..=3usize);
        let budget = 5usize;
        let mut remaining = budget;
        let mut parts = Vec::with_capacity(slots);
        for _ in 0..slots {
            let part = rng.gen_range(0..=remaining.min(3));
            parts.push(part);
            remaining -= part;
        }
        let split_at = rng.gen_range(0..=parts.len());
        let (k_parts, l_parts) = parts.split_at(split_at);
        let (lhs, rhs) = vandermonde_multinomial_check(&alpha, &beta, k_parts, l_parts)?;
        if lhs != rhs {
            failures.push(Failure {
                identity: "multinomial identity (4.7)".into(),
                scene_digest: digest.clone(),
                indices: vec![round],
                residual: (lhs - rhs).to_string(),
            });
        }
    }

    Ok(failures)
}
