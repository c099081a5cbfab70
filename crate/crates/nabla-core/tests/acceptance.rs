//! Acceptance gate: one test per criterion, each printing a single
//! PASS line with the scale and tolerance it ran at.

use nabla_core::covariant::{covariant_derivative_k, iterate_covariant_oracle};
use nabla_core::fractional::{
    check_contraction_commutes, check_semigroup, frac_covariant, vandermonde_multinomial_check,
    TensorSeries,
};
use nabla_core::geometry::{ChartTransition, Connection, Curve, Scene};
use nabla_core::jet::{Jet, JetMatrix};
use nabla_core::ode::{solve_first_order, solve_second_order, LinearSystem, SampleGrid};
use nabla_core::poly::MultiPoly;
use nabla_core::pq::{check_derivative_expansion, check_orthogonality, check_transformation_law};
use nabla_core::pq::{ExpansionVariant, PqKind, PqTable};
use nabla_core::scalar::{Backend, Scalar};
use nabla_core::scenegen::{random_scene, random_system, rng_for, ScenePlan};
use nabla_core::series::GenPowerSeries;
use std::time::Instant;

fn r(n: i64) -> Scalar {
    Scalar::from_i64(n, Backend::Rational)
}

fn tables(scene: &Scene, k_max: usize) -> (PqTable, PqTable) {
    (
        PqTable::build(PqKind::P, scene, k_max).expect("P table"),
        PqTable::build(PqKind::Q, scene, k_max).expect("Q table"),
    )
}

#[test]
fn criterion_01_orthogonality() {
    let started = Instant::now();
    let plan = ScenePlan {
        dim_max: 3,
        k_max: 6,
        valence: None,
        with_transition: false,
        series_exact: false,
    };
    for trial in 0..200u64 {
        let scene = random_scene(&mut rng_for(101, trial), &plan);
        let (p, q) = tables(&scene, 6);
        for k in 0..=6 {
            let residual = check_orthogonality(&p, &q, k).expect("orthogonality check");
            assert!(
                residual.is_zero(),
                "trial {trial}, k = {k}: residual {}",
                residual.max_abs_coeff()
            );
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1}s, budget 60s");
    println!("[criterion 01] PASS orthogonality (2.5): 200 scenes, dim <= 3, k <= 6, exact, {elapsed:.1}s");
}

#[test]
fn criterion_02_theorem_one_vs_iterated_oracle() {
    let started = Instant::now();
    let valences: Vec<(usize, usize)> = (0..=2)
        .flat_map(|p| (0..=2).map(move |q| (p, q)))
        .collect();
    for trial in 0..100u64 {
        let valence = valences[trial as usize % valences.len()];
        let plan = ScenePlan {
            dim_max: 3,
            k_max: 4,
            valence: Some(valence),
            with_transition: false,
            series_exact: false,
        };
        let scene = random_scene(&mut rng_for(202, trial), &plan);
        let (p, q) = tables(&scene, 4);
        let field = scene.field.as_ref().expect("field attached");
        for k in 1..=4 {
            let closed = covariant_derivative_k(field, &p, &q, k).expect("closed formula");
            let iterated =
                iterate_covariant_oracle(field, p.level(1).expect("level 1"), k).expect("oracle");
            let difference = closed.sub(&iterated).expect("same shape");
            assert!(
                difference.is_zero(),
                "trial {trial}, valence {valence:?}, k = {k}: residual {}",
                difference.max_abs_coeff()
            );
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "took {elapsed:.1}s, budget 120s");
    println!("[criterion 02] PASS theorem 1 (3.1) vs iterated oracle (3.3): 100 scenes, p,q <= 2, k <= 4, exact, {elapsed:.1}s");
}

#[test]
fn criterion_03_derivative_expansions() {
    let started = Instant::now();
    let plan = ScenePlan {
        dim_max: 3,
        k_max: 6,
        valence: None,
        with_transition: false,
        series_exact: false,
    };
    for trial in 0..50u64 {
        let scene = random_scene(&mut rng_for(303, trial), &plan);
        let (p, q) = tables(&scene, 6);
        for l in 0..=6usize {
            for k in 0..=(6 - l) {
                for variant in [ExpansionVariant::PQ, ExpansionVariant::QP] {
                    let residual =
                        check_derivative_expansion(&p, &q, l, k, variant).expect("expansion");
                    assert!(
                        residual.is_zero(),
                        "trial {trial}, l = {l}, k = {k}, {variant:?}: residual {}",
                        residual.max_abs_coeff()
                    );
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 03] PASS derivative expansions (2.3)/(2.4): 50 scenes, l + k <= 6, exact, {elapsed:.1}s");
}

fn linear_transition(dim: usize) -> ChartTransition {
    let be = Backend::Rational;
    let var = |v: usize| MultiPoly::variable(dim, v, be);
    let (forward, inverse): (Vec<MultiPoly>, Vec<MultiPoly>) = match dim {
        1 => (
            vec![var(0).scale(&r(2)).unwrap()],
            vec![var(0).scale(&Scalar::ratio(1, 2)).unwrap()],
        ),
        2 => (
            // M = [[2, 1], [1, 1]], inverse [[1, -1], [-1, 2]].
            vec![
                var(0).scale(&r(2)).unwrap().add(&var(1)).unwrap(),
                var(0).add(&var(1)).unwrap(),
            ],
            vec![
                var(0).sub(&var(1)).unwrap(),
                var(1).scale(&r(2)).unwrap().sub(&var(0)).unwrap(),
            ],
        ),
        _ => (
            // Upper unitriangular [[1,1,0],[0,1,1],[0,0,1]].
            vec![
                var(0).add(&var(1)).unwrap(),
                var(1).add(&var(2)).unwrap(),
                var(2),
            ],
            vec![
                var(0).sub(&var(1)).unwrap().add(&var(2)).unwrap(),
                var(1).sub(&var(2)).unwrap(),
                var(2),
            ],
        ),
    };
    ChartTransition::new(forward, inverse).expect("dims match")
}

#[test]
fn criterion_04_transformation_laws() {
    let started = Instant::now();
    let plan = ScenePlan {
        dim_max: 3,
        k_max: 5,
        valence: None,
        with_transition: false,
        series_exact: false,
    };
    // Identity and constant-linear transitions on random scenes, l <= 5.
    for trial in 0..20u64 {
        let mut scene = random_scene(&mut rng_for(404, trial), &plan);
        let transitions = [
            ChartTransition::identity(scene.dim(), Backend::Rational),
            linear_transition(scene.dim()),
        ];
        for transition in transitions {
            scene.transition = Some(transition);
            scene.validate().expect("valid scene");
            for l in 0..=5 {
                for kind in [PqKind::P, PqKind::Q] {
                    let residual =
                        check_transformation_law(&scene, l, kind).expect("transformation law");
                    assert!(
                        residual.is_zero(),
                        "trial {trial}, l = {l}, {kind:?}: residual {}",
                        residual.max_abs_coeff()
                    );
                }
            }
        }
    }

    // One dim-1 polynomial (affine) transition whose transformed connection
    // is polynomial: x' = 2x + 3 over Gamma = x.
    let order = 8;
    let mut connection = Connection::flat(1, Backend::Rational);
    connection
        .set_gamma(0, 0, 0, MultiPoly::variable(1, 0, Backend::Rational))
        .unwrap();
    let x = MultiPoly::variable(1, 0, Backend::Rational);
    let forward = x.scale(&r(2)).unwrap().add(&MultiPoly::constant(1, r(3))).unwrap();
    let inverse = x
        .sub(&MultiPoly::constant(1, r(3)))
        .unwrap()
        .scale(&Scalar::ratio(1, 2))
        .unwrap();
    let scene = Scene {
        connection,
        curve: Curve::new(vec![Jet::variable(order, r(0))]).unwrap(),
        field: None,
        transition: Some(ChartTransition::new(vec![forward], vec![inverse]).unwrap()),
        order,
        backend: Backend::Rational,
        base_point: r(0),
    };
    scene.validate().expect("valid scene");
    for l in 0..=5 {
        for kind in [PqKind::P, PqKind::Q] {
            let residual = check_transformation_law(&scene, l, kind).expect("transformation law");
            assert!(
                residual.is_zero(),
                "dim-1 affine, l = {l}, {kind:?}: residual {}",
                residual.max_abs_coeff()
            );
        }
    }

    // A genuinely nonlinear (quadratic shear) transition in dim 2.
    let be = Backend::Rational;
    let x0 = MultiPoly::variable(2, 0, be);
    let x1 = MultiPoly::variable(2, 1, be);
    let shear_fwd = vec![x0.clone(), x1.sub(&x0.mul(&x0).unwrap()).unwrap()];
    let shear_inv = vec![x0.clone(), x1.add(&x0.mul(&x0).unwrap()).unwrap()];
    let mut connection = Connection::flat(2, be);
    connection.set_gamma(0, 0, 1, x1.clone()).unwrap();
    connection.set_gamma(1, 1, 0, MultiPoly::constant(2, r(2))).unwrap();
    let order = 12;
    let s = Jet::variable(order, r(0));
    let scene = Scene {
        connection,
        curve: Curve::new(vec![s.clone(), s.mul(&s).unwrap()]).unwrap(),
        field: None,
        transition: Some(ChartTransition::new(shear_fwd, shear_inv).unwrap()),
        order,
        backend: be,
        base_point: r(0),
    };
    scene.validate().expect("valid scene");
    for l in 0..=5 {
        for kind in [PqKind::P, PqKind::Q] {
            let residual = check_transformation_law(&scene, l, kind).expect("transformation law");
            assert!(
                residual.is_zero(),
                "quadratic shear, l = {l}, {kind:?}: residual {}",
                residual.max_abs_coeff()
            );
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 04] PASS transformation laws (2.1)/(2.2): identity + linear (l <= 5) on 20 scenes, dim-1 affine with polynomial transformed connection, dim-2 quadratic shear, exact, {elapsed:.1}s");
}

#[test]
fn criterion_05_semigroup() {
    let started = Instant::now();
    let plan = ScenePlan {
        dim_max: 2,
        k_max: 4,
        valence: Some((1, 1)),
        with_transition: false,
        series_exact: true,
    };
    for trial in 0..25u64 {
        let scene = random_scene(&mut rng_for(505, trial), &plan);
        let (p, q) = tables(&scene, 4);
        let a = TensorSeries::from_jets(scene.field.as_ref().unwrap()).expect("series field");
        for alpha in 0..=4i64 {
            for beta in 0..=(4 - alpha) {
                let residual = check_semigroup(&a, &p, &q, &r(alpha), &r(beta), 4)
                    .expect("semigroup check");
                assert!(
                    residual.is_zero(),
                    "trial {trial}, alpha = {alpha}, beta = {beta}"
                );
            }
        }
    }

    // Half-order composition d^(1/2) d^(1/2) s = 1 on a flat float scene.
    let order = 10;
    let base = Scalar::Float(0.0);
    let scene = Scene {
        connection: Connection::flat(1, Backend::Float64),
        curve: Curve::new(vec![Jet::variable(order, base.clone())]).unwrap(),
        field: None,
        transition: None,
        order,
        backend: Backend::Float64,
        base_point: base,
    };
    let (p, q) = tables(&scene, 6);
    let s_field = TensorSeries::from_components(
        1,
        1,
        0,
        vec![GenPowerSeries::monomial(Scalar::Float(1.0), Scalar::Float(1.0)).unwrap()],
    )
    .unwrap();
    let half = Scalar::Float(0.5);
    let residual = check_semigroup(&s_field, &p, &q, &half, &half, 6).expect("half-order");
    let worst = residual.components()[0].max_abs_coeff().to_f64();
    assert!(worst <= 1e-12, "half-order residual {worst}");

    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 05] PASS semigroup (4.6): integer alpha + beta <= 4 on 25 scenes exact; d^(1/2) d^(1/2) s = 1 within 1e-12, {elapsed:.1}s");
}

#[test]
fn criterion_06_multinomial_identity() {
    let started = Instant::now();
    // Every slot shape with sum(k) + sum(l) <= 5, p, q <= 2, integer orders.
    let mut shapes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let tuples = |slots: usize, budget: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..slots {
            let mut next = Vec::new();
            for prefix in &out {
                let used: usize = prefix.iter().sum();
                for part in 0..=(budget - used) {
                    let mut grown = prefix.clone();
                    grown.push(part);
                    next.push(grown);
                }
            }
            out = next;
        }
        out
    };
    for p in 0..=2usize {
        for q in 0..=2usize {
            for k in tuples(p, 5) {
                let used: usize = k.iter().sum();
                for l in tuples(q, 5 - used) {
                    shapes.push((k.clone(), l));
                }
            }
        }
    }
    let mut checked = 0u64;
    for alpha in 0..=4i64 {
        for beta in 0..=4i64 {
            for (k, l) in &shapes {
                let (lhs, rhs) =
                    vandermonde_multinomial_check(&r(alpha), &r(beta), k, l).expect("identity");
                assert_eq!(lhs, rhs, "alpha = {alpha}, beta = {beta}, k = {k:?}, l = {l:?}");
                checked += 1;
            }
        }
    }

    // Random rational order pairs.
    let mut rng = rng_for(606, 0);
    use rand::Rng;
    for _ in 0..20 {
        let alpha = Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        let beta = Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        let shape = &shapes[rng.gen_range(0..shapes.len())];
        let (lhs, rhs) = vandermonde_multinomial_check(&alpha, &beta, &shape.0, &shape.1)
            .expect("identity");
        assert_eq!(lhs, rhs, "alpha = {alpha}, beta = {beta}, shape = {shape:?}");
    }

    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 06] PASS multinomial identity (4.7): {checked} integer cases (alpha, beta <= 4, sum <= 5) + 20 rational pairs, exact, {elapsed:.1}s");
}

/// Classical fixed-step RK4 for y' = g(s) - f(s) y with y(0) = 0,
/// recording every step.
fn rk4_path(sys: &LinearSystem, stop: f64, steps: usize) -> Vec<(f64, Vec<f64>)> {
    let dim = sys.dim();
    let f_at = |s: f64| -> Vec<f64> {
        let s = Scalar::Float(s);
        sys.coefficients()
            .entries()
            .iter()
            .map(|jet| jet.eval(&s).expect("float eval").to_f64())
            .collect()
    };
    let g_at = |s: f64| -> Vec<f64> {
        sys.right_side().iter().map(|g| g.eval_f64(s)).collect()
    };
    let deriv = |s: f64, y: &[f64]| -> Vec<f64> {
        let f = f_at(s);
        let g = g_at(s);
        (0..dim)
            .map(|i| g[i] - (0..dim).map(|j| f[i * dim + j] * y[j]).sum::<f64>())
            .collect()
    };
    let h = stop / steps as f64;
    let mut y = vec![0.0; dim];
    let mut out = vec![(0.0, y.clone())];
    for step in 0..steps {
        let s = step as f64 * h;
        let k1 = deriv(s, &y);
        let mid1: Vec<f64> = (0..dim).map(|i| y[i] + 0.5 * h * k1[i]).collect();
        let k2 = deriv(s + 0.5 * h, &mid1);
        let mid2: Vec<f64> = (0..dim).map(|i| y[i] + 0.5 * h * k2[i]).collect();
        let k3 = deriv(s + 0.5 * h, &mid2);
        let end: Vec<f64> = (0..dim).map(|i| y[i] + h * k3[i]).collect();
        let k4 = deriv(s + h, &end);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(((step + 1) as f64 * h, y.clone()));
    }
    out
}

#[test]
fn criterion_07_first_order_systems() {
    let started = Instant::now();

    // f = 1, g = 1, N = 20 against the closed form 1 - exp(-s).
    let f = JetMatrix::from_entries(1, vec![Jet::constant(r(1), 24, r(0)).unwrap()]).unwrap();
    let grid = SampleGrid { start: 0.0, stop: 1.0, step: 0.1 };
    let sys = LinearSystem::new(1, f, vec![GenPowerSeries::constant(r(1))], grid).unwrap();
    let out = solve_first_order(&sys, 20).expect("solve");
    let mut worst: f64 = 0.0;
    for &(s, ref row) in &out.samples {
        worst = worst.max((row[0] - (1.0 - (-s).exp())).abs());
    }
    assert!(worst <= 1e-9, "closed-form error {worst}");

    // Ten random constant 2x2 systems against an RK4 oracle.
    let steps = 2000usize;
    let per_grid = steps / 10;
    let mut worst_rk = 0.0f64;
    for trial in 0..10u64 {
        let sys = random_system(&mut rng_for(707, trial), 2, 1, 30, Backend::Float64);
        let out = solve_first_order(&sys, 30).expect("solve");
        assert!(!out.solution.diverging, "trial {trial} flagged diverging");
        let path = rk4_path(&sys, 1.0, steps);
        for (g, &(s, ref row)) in out.samples.iter().enumerate() {
            let (rk_s, ref rk_y) = path[g * per_grid];
            assert!((s - rk_s).abs() < 1e-9);
            for i in 0..2 {
                worst_rk = worst_rk.max((row[i] - rk_y[i]).abs());
            }
        }
    }
    assert!(worst_rk <= 1e-6, "RK4 disagreement {worst_rk}");

    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 07] PASS first-order systems (5.1): unit system within 1e-9 of 1 - exp(-s); 10 random 2x2 systems within 1e-6 of RK4, {elapsed:.1}s");
}

#[test]
fn criterion_08_second_order_systems() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for trial in 0..10u64 {
        let sys = random_system(&mut rng_for(808, trial), 2, 2, 25, Backend::Float64);
        let out = solve_second_order(&sys, 25).expect("solve");
        for &n in &out.residual_norms {
            worst = worst.max(n);
        }
    }
    assert!(worst <= 1e-8, "substitution residual {worst}");
    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 08] PASS second-order systems (5.2): substitution residual <= 1e-8 on [0,1] at N = 25 for 10 seeded systems (worst {worst:.2e}), {elapsed:.1}s");
}

#[test]
fn criterion_09_flat_reductions() {
    let started = Instant::now();

    // Integer orders, rational backend, exact.
    for trial in 0..25u64 {
        let plan = ScenePlan {
            dim_max: 3,
            k_max: 4,
            valence: Some((1, 1)),
            with_transition: false,
            series_exact: false,
        };
        let mut scene = random_scene(&mut rng_for(909, trial), &plan);
        scene.connection = Connection::flat(scene.dim(), scene.backend);
        let (p, q) = tables(&scene, 4);
        let field = scene.field.as_ref().unwrap();
        for k in 1..=4usize {
            let closed = covariant_derivative_k(field, &p, &q, k).expect("closed");
            let mut plain = field.clone();
            for _ in 0..k {
                plain = plain.diff().expect("enough order");
            }
            let difference = closed.sub(&plain).expect("same shape");
            assert!(difference.is_zero(), "trial {trial}, k = {k}");
        }
    }

    // Fractional orders, float backend, tolerance 1e-12.
    let order = 12;
    let base = Scalar::Float(0.0);
    let scene = Scene {
        connection: Connection::flat(2, Backend::Float64),
        curve: Curve::new(vec![Jet::variable(order, base.clone()), Jet::variable(order, base.clone())]).unwrap(),
        field: None,
        transition: None,
        order,
        backend: Backend::Float64,
        base_point: base,
    };
    let (p, q) = tables(&scene, 4);
    // Exponents start at 2 so every tested order keeps beta - alpha > -1.
    let fl = |x: f64| Scalar::Float(x);
    let comps = vec![
        GenPowerSeries::from_terms(Backend::Float64, vec![(fl(2.0), fl(2.0)), (fl(3.0), fl(-0.5))]).unwrap(),
        GenPowerSeries::monomial(fl(1.5), fl(4.0)).unwrap(),
        GenPowerSeries::monomial(fl(1.0), fl(2.0)).unwrap(),
        GenPowerSeries::monomial(fl(-2.0), fl(2.5)).unwrap(),
    ];
    let a = TensorSeries::from_components(2, 1, 1, comps).unwrap();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.5, -0.5, 2.5] {
        let derived = frac_covariant(&a, &p, &q, &fl(alpha), 4).expect("flat fractional");
        let plain = a.frac_diff(&fl(alpha)).expect("componentwise");
        let residual = derived.value.sub(&plain).expect("same shape");
        for c in residual.components() {
            worst = worst.max(c.max_abs_coeff().to_f64().abs());
        }
    }
    assert!(worst <= 1e-12, "fractional flat residual {worst}");

    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 09] PASS flat reductions: nabla^k = d^k exact on 25 scenes (k <= 4); nabla^alpha = d^alpha within 1e-12 for half-orders, {elapsed:.1}s");
}

#[test]
fn criterion_10_contraction_commutes() {
    let started = Instant::now();
    let plan = ScenePlan {
        dim_max: 2,
        k_max: 3,
        valence: Some((1, 1)),
        with_transition: false,
        series_exact: true,
    };
    for trial in 0..25u64 {
        let scene = random_scene(&mut rng_for(1010, trial), &plan);
        let (p, q) = tables(&scene, 3);
        let a = TensorSeries::from_jets(scene.field.as_ref().unwrap()).expect("series field");
        for alpha in 0..=3i64 {
            let residual =
                check_contraction_commutes(&a, &p, &q, &r(alpha), 3).expect("contraction check");
            assert!(residual.is_zero(), "trial {trial}, alpha = {alpha}");
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!("[criterion 10] PASS contraction property (4 ii): integer alpha <= 3 on (1,1) tensors, 25 scenes, exact, {elapsed:.1}s");
}
