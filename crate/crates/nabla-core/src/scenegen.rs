//! Seeded random inputs for the verification suites: polynomial
//! connections of degree at most 2 with small rational coefficients,
//! polynomial curves, tensor fields, invertible polynomial transitions,
//! and constant-coefficient ODE systems.
//!
//! Two order budgets. Identity checks on jets hold on every truncated
//! prefix, so those scenes only need a couple of orders beyond the deepest
//! table level. Series checks reread truncated jets as exact polynomials,
//! so the order must dominate the true degree: level k of the table grows
//! to degree k*d1 (d1 = degree of the level-1 symbol in s), hence
//! `order >= levels*(d1+1) + field degree + slack`.

use crate::geometry::{ChartTransition, Connection, Curve, Scene, TensorFieldJet};
use crate::jet::Jet;
use crate::ode::{LinearSystem, SampleGrid};
use crate::poly::MultiPoly;
use crate::scalar::{Backend, Scalar};
use crate::series::GenPowerSeries;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per-trial generator: `seed + trial`, independent of scheduling.
pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}

/// Nonzero rational with numerator in [-3,3] and denominator in {1,2,3}.
fn small_rational(rng: &mut impl Rng) -> Scalar {
    let numer = *[-3i64, -2, -1, 1, 2, 3].as_slice().pick(rng);
    let denom = *[1i64, 2, 3].as_slice().pick(rng);
    Scalar::ratio(numer, denom)
}

trait Pick<T> {
    fn pick(&self, rng: &mut impl Rng) -> &T;
}

impl<T> Pick<T> for [T] {
    fn pick(&self, rng: &mut impl Rng) -> &T {
        &self[rng.gen_range(0..self.len())]
    }
}

/// Up to `terms` monomials of total degree <= `max_degree` in `arity`
/// variables, never the zero polynomial.
fn random_poly(rng: &mut impl Rng, arity: usize, max_degree: u32, terms: usize) -> MultiPoly {
    let mut poly = MultiPoly::zero(arity, Backend::Rational);
    let count = rng.gen_range(1..=terms);
    for _ in 0..count {
        let mut exps = vec![0u32; arity];
        let degree = rng.gen_range(0..=max_degree);
        for _ in 0..degree {
            exps[rng.gen_range(0..arity)] += 1;
        }
        let monomial = MultiPoly::from_terms(arity, Backend::Rational, vec![(exps, small_rational(rng))])
            .expect("arity is fixed");
        poly = poly.add(&monomial).expect("same backend");
    }
    if poly.is_zero() {
        // Coefficients of equal monomials may cancel; fall back to a constant.
        return MultiPoly::constant(arity, small_rational(rng));
    }
    poly
}

/// Connection with each symbol nonzero at the given density.
pub fn random_connection(rng: &mut impl Rng, dim: usize, density: f64) -> Connection {
    let mut conn = Connection::flat(dim, Backend::Rational);
    for i in 0..dim {
        for j in 0..dim {
            for l in 0..dim {
                if rng.gen_bool(density) {
                    let poly = random_poly(rng, dim, 2, 2);
                    conn.set_gamma(i, j, l, poly).expect("matching arity");
                }
            }
        }
    }
    conn
}

/// Polynomial curve of degree <= `max_degree` with nonzero velocity.
pub fn random_curve(
    rng: &mut impl Rng,
    dim: usize,
    order: usize,
    base: &Scalar,
    max_degree: usize,
) -> Curve {
    let coords = (0..dim)
        .map(|_| {
            let mut coeffs = vec![Scalar::zero(Backend::Rational); order + 1];
            for (m, c) in coeffs.iter_mut().enumerate().take(max_degree + 1) {
                if m == 1 || rng.gen_bool(0.7) {
                    *c = small_rational(rng);
                }
            }
            Jet::new(coeffs, base.clone()).expect("uniform backend")
        })
        .collect();
    Curve::new(coords).expect("uniform jets")
}

/// Dense random tensor field of the given valence, components of degree
/// <= 2 in the curve parameter.
pub fn random_field(
    rng: &mut impl Rng,
    dim: usize,
    p: usize,
    q: usize,
    order: usize,
    base: &Scalar,
) -> TensorFieldJet {
    let mut field = TensorFieldJet::zero(dim, p, q, order, base.clone());
    let count = dim.pow((p + q) as u32);
    for flat in 0..count {
        let mut coeffs = vec![Scalar::zero(Backend::Rational); order + 1];
        for c in coeffs.iter_mut().take(3) {
            if rng.gen_bool(0.8) {
                *c = small_rational(rng);
            }
        }
        let idx = field.unflatten(flat);
        field.set(&idx, Jet::new(coeffs, base.clone()).expect("uniform backend"));
    }
    field
}

fn compose_maps(outer: &[MultiPoly], inner: &[MultiPoly]) -> Vec<MultiPoly> {
    outer
        .iter()
        .map(|p| p.compose(inner).expect("matching arity"))
        .collect()
}

fn identity_map(dim: usize) -> Vec<MultiPoly> {
    (0..dim)
        .map(|v| MultiPoly::variable(dim, v, Backend::Rational))
        .collect()
}

/// Exactly invertible polynomial transition: in dimension 1 an affine map,
/// otherwise a short product of translations, linear shears, and quadratic
/// shears (all unimodular, all with polynomial inverses).
pub fn random_transition(rng: &mut impl Rng, dim: usize) -> ChartTransition {
    let be = Backend::Rational;
    if rng.gen_bool(0.2) {
        return ChartTransition::identity(dim, be);
    }
    if dim == 1 {
        let a = small_rational(rng);
        let b = small_rational(rng);
        let x = MultiPoly::variable(1, 0, be);
        let forward = x
            .scale(&a)
            .and_then(|ax| ax.add(&MultiPoly::constant(1, b.clone())))
            .expect("same backend");
        let inverse = x
            .sub(&MultiPoly::constant(1, b))
            .and_then(|t| t.scale(&Scalar::one(be).checked_div(&a)?))
            .expect("a is nonzero");
        return ChartTransition::new(vec![forward], vec![inverse]).expect("dims match");
    }

    let mut forward = identity_map(dim);
    let mut inverse = identity_map(dim);
    let ops = rng.gen_range(1..=2);
    for _ in 0..ops {
        let target = rng.gen_range(0..dim);
        let source = (target + rng.gen_range(1..dim)) % dim;
        let c = small_rational(rng);
        let x_t = MultiPoly::variable(dim, target, be);
        let x_s = MultiPoly::variable(dim, source, be);
        let bump = match rng.gen_range(0..3) {
            0 => MultiPoly::constant(dim, c.clone()),
            1 => x_s.scale(&c).expect("same backend"),
            _ => x_s.mul(&x_s).and_then(|sq| sq.scale(&c)).expect("same backend"),
        };
        let mut op_fwd = identity_map(dim);
        op_fwd[target] = x_t.add(&bump).expect("same backend");
        let mut op_inv = identity_map(dim);
        op_inv[target] = x_t.sub(&bump).expect("same backend");
        forward = compose_maps(&op_fwd, &forward);
        inverse = compose_maps(&inverse, &op_inv);
    }
    ChartTransition::new(forward, inverse).expect("dims match")
}

/// What a generated scene must support.
#[derive(Debug, Clone, Copy)]
pub struct ScenePlan {
    pub dim_max: usize,
    /// Deepest P/Q level the caller will request.
    pub k_max: usize,
    /// Tensor valence of the attached field, if any.
    pub valence: Option<(usize, usize)>,
    pub with_transition: bool,
    /// Series-exact scenes sit at base 0 with the degree-dominating order;
    /// jet scenes use `k_max + 2` and a possibly shifted base point.
    pub series_exact: bool,
}

pub fn random_scene(rng: &mut impl Rng, plan: &ScenePlan) -> Scene {
    let dim = rng.gen_range(1..=plan.dim_max);
    let backend = Backend::Rational;
    let connection = random_connection(rng, dim, 0.6);

    let (base_point, curve_degree, order);
    if plan.series_exact {
        base_point = Scalar::zero(backend);
        curve_degree = 1;
        let d1 = connection.max_degree() * curve_degree;
        let field_degree = 2;
        order = plan.k_max * (d1 + 1) + field_degree + 4;
    } else {
        base_point = [Scalar::zero(backend), Scalar::ratio(1, 2), Scalar::from_i64(-1, backend)]
            .as_slice()
            .pick(rng)
            .clone();
        curve_degree = 2;
        order = plan.k_max + 2;
    }

    let curve = random_curve(rng, dim, order, &base_point, curve_degree);
    let field = plan
        .valence
        .map(|(p, q)| random_field(rng, dim, p, q, order, &base_point));
    let transition = plan.with_transition.then(|| random_transition(rng, dim));

    let scene = Scene {
        connection,
        curve,
        field,
        transition,
        order,
        backend,
        base_point,
    };
    debug_assert!(scene.validate().is_ok());
    scene
}

/// Constant-coefficient system with entries of magnitude <= 3/2 (keeps the
/// solution series convergent on [0,1]) and polynomial right side.
pub fn random_system(
    rng: &mut impl Rng,
    dim: usize,
    order_of_system: u8,
    n_trunc: usize,
    backend: Backend,
) -> LinearSystem {
    let jet_order = n_trunc + 3;
    let base = Scalar::zero(Backend::Rational);
    let entries: Vec<Jet> = (0..dim * dim)
        .map(|_| {
            let numer = *[-3i64, -2, -1, 0, 1, 2, 3].as_slice().pick(rng);
            let value = Scalar::ratio(numer, 2);
            Jet::constant(value, jet_order, base.clone()).expect("same backend")
        })
        .collect();
    let mut f = crate::jet::JetMatrix::from_entries(dim, entries).expect("square");
    let g: Vec<GenPowerSeries> = (0..dim)
        .map(|_| {
            let mut series = GenPowerSeries::zero(Backend::Rational);
            for e in 0..=2i64 {
                if rng.gen_bool(0.7) {
                    let term = GenPowerSeries::monomial(
                        small_rational(rng),
                        Scalar::from_i64(e, Backend::Rational),
                    )
                    .expect("exponent in range");
                    series = series.add(&term).expect("same backend");
                }
            }
            series
        })
        .collect();
    let grid = SampleGrid {
        start: 0.0,
        stop: 1.0,
        step: 0.1,
    };
    let (f, g) = match backend {
        Backend::Rational => (f, g),
        Backend::Float64 => {
            f = f.to_float_backend();
            (f, g.iter().map(GenPowerSeries::to_float_backend).collect())
        }
    };
    LinearSystem::new(order_of_system, f, g, grid).expect("consistent by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::{emit_manifest, load_manifest};

    #[test]
    fn scenes_are_reproducible() {
        let plan = ScenePlan {
            dim_max: 3,
            k_max: 4,
            valence: Some((1, 1)),
            with_transition: true,
            series_exact: false,
        };
        let a = random_scene(&mut rng_for(7, 3), &plan);
        let b = random_scene(&mut rng_for(7, 3), &plan);
        assert_eq!(a, b);
        let c = random_scene(&mut rng_for(7, 4), &plan);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_scenes_validate_and_round_trip() {
        let plan = ScenePlan {
            dim_max: 3,
            k_max: 3,
            valence: Some((2, 1)),
            with_transition: true,
            series_exact: false,
        };
        for trial in 0..20 {
            let scene = random_scene(&mut rng_for(99, trial), &plan);
            scene.validate().unwrap();
            let text = emit_manifest(&scene).unwrap();
            let back = load_manifest(&text).unwrap();
            assert_eq!(scene, back, "trial {trial}");
        }
    }

    #[test]
    fn series_exact_scenes_sit_at_base_zero() {
        let plan = ScenePlan {
            dim_max: 2,
            k_max: 4,
            valence: Some((1, 1)),
            with_transition: false,
            series_exact: true,
        };
        for trial in 0..10 {
            let scene = random_scene(&mut rng_for(5, trial), &plan);
            assert!(scene.base_point.is_zero());
            let d1 = scene.connection.max_degree();
            assert!(scene.order >= plan.k_max * (d1 + 1) + 2);
        }
    }

    #[test]
    fn transitions_have_exact_inverses() {
        for trial in 0..30 {
            let mut rng = rng_for(11, trial);
            let dim = rng.gen_range(1..=3);
            let t = random_transition(&mut rng, dim);
            assert!(t.is_exact_inverse_pair().unwrap(), "trial {trial} dim {dim}");
        }
    }

    #[test]
    fn systems_are_well_formed() {
        for trial in 0..10 {
            let mut rng = rng_for(3, trial);
            let sys = random_system(&mut rng, 2, 1, 20, Backend::Float64);
            assert_eq!(sys.dim(), 2);
            assert_eq!(sys.backend(), Backend::Float64);
        }
    }
}
