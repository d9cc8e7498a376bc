//! Model families that have no registry entry: two-dimensional prox-linear
//! and the stochastic proximal point method.

use bregopt::driver::{self, SolverConfig};
use bregopt::legendre::{build_composite_legendre, LegendreFunction};
use bregopt::models::{DataRow, ModelConstants, ModelFamily, ModelOracle, OracleData, Regime, Sample, SampleSpace};
use bregopt::problems::{self, ProblemInstance, RunDefaults};
use bregopt::subproblem::Regularizer;
use bregopt::Point;
use nalgebra::dvector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rows(seed: u64, m: usize) -> Vec<DataRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| DataRow { a: dvector![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], b: rng.random_range(0.5..1.5) })
        .collect()
}

fn defaults() -> RunDefaults {
    RunDefaults { alpha: 1.0, lambda: None, strongly_convex: false, seed: 1, horizons: vec![], seeds: 1 }
}

/// `|⟨a, x⟩² − b|` in two dimensions, with the same kernel as the 1-D registry instance.
fn prox_linear_2d() -> ProblemInstance {
    let rows = rows(21, 12);
    let w = vec![1.0 / rows.len() as f64; rows.len()];
    let l2: Vec<f64> = rows.iter().map(|r| r.a.norm_squared()).collect();
    let tau = 4.0 / 3.0 * l2.iter().sum::<f64>() / l2.len() as f64;
    let lip: Vec<f64> = l2.iter().map(|l| 2.0_f64.sqrt() * l).collect();
    let rms = (lip.iter().map(|l| l * l).sum::<f64>() / lip.len() as f64).sqrt();
    ProblemInstance {
        id: "PL2".into(),
        description: "two-dimensional robust phase retrieval".into(),
        oracle: ModelOracle {
            regime: Regime::A,
            constants: ModelConstants { tau, lip_bound: rms, lip_per_sample: lip, ..Default::default() },
            sample_space: SampleSpace::Finite { weights: w },
            data: OracleData::ProxLinear { rows },
        },
        regularizer: Regularizer::zero(),
        phi: build_composite_legendre(&[1.0], &[0.0, 0.0, 4.0]).unwrap(),
        x0: dvector![1.5, -1.0],
        optimum: None,
        defaults: defaults(),
    }
}

/// `|⟨a, x⟩ − b|` with the function itself as the model.
fn proximal_point() -> ProblemInstance {
    let rows = rows(22, 12);
    let w = vec![1.0 / rows.len() as f64; rows.len()];
    let lip: Vec<f64> = rows.iter().map(|r| 2.0_f64.sqrt() * r.a.norm()).collect();
    let rms = (lip.iter().map(|l| l * l).sum::<f64>() / lip.len() as f64).sqrt();
    ProblemInstance {
        id: "PP".into(),
        description: "robust regression by stochastic proximal point".into(),
        oracle: ModelOracle {
            regime: Regime::A,
            constants: ModelConstants { lip_bound: rms, lip_per_sample: lip, ..Default::default() },
            sample_space: SampleSpace::Finite { weights: w },
            data: OracleData::AbsLinear { rows },
        },
        regularizer: Regularizer::zero(),
        phi: LegendreFunction::euclidean(),
        x0: dvector![2.0, 2.0],
        optimum: None,
        defaults: defaults(),
    }
}

#[test]
fn declared_constants_validate() {
    for p in [prox_linear_2d(), proximal_point()] {
        let report = problems::validate(&p, 2000, &mut ChaCha8Rng::seed_from_u64(3));
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", p.id);
    }
}

#[test]
fn proximal_point_model_is_the_sample_function() {
    let p = proximal_point();
    assert_eq!(p.oracle.family(), ModelFamily::ProximalPoint);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..12 {
        let xi = Sample::index(i);
        let x = Point::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
        let y = Point::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
        let m = p.oracle.model_value(&x, &y, &xi).unwrap();
        assert!((m - p.oracle.f_sample(&y, &xi)).abs() <= 1e-12 * (1.0 + m.abs()));
    }
}

fn certified_run(p: &ProblemInstance) -> driver::RunTrace {
    let mut config = SolverConfig::for_problem(p, 400, 9);
    config.check_probes = 50;
    let trace = driver::run(p, &config).unwrap();
    assert!(trace.steps.iter().all(|s| s.three_point_residual >= -1e-8));
    trace
}

#[test]
fn prox_linear_approaches_stationarity() {
    // Nonconvex: the run may settle at a local minimizer, so measure D(x̂, x).
    let p = prox_linear_2d();
    let trace = certified_run(&p);
    let at = |x: &Point| {
        let xhat = bregopt::envelope::bregman_prox_point(&p, &p.phi, x, trace.lambda, &Default::default()).unwrap();
        p.phi.bregman(&xhat, x).unwrap()
    };
    let (start, end) = (at(&p.x0), at(trace.iterates.last().unwrap()));
    assert!(end < 0.2 * start, "D(x̂, x): {start} -> {end}");
}

#[test]
fn proximal_point_closes_the_gap() {
    let p = proximal_point();
    let trace = certified_run(&p);
    let best = problems::brute_force_min(&p, (-3.0, 3.0), 1e-2).unwrap().value;
    let start = p.objective(&p.x0) - best;
    let end = p.objective(trace.iterates.last().unwrap()) - best;
    assert!(end < 0.05 * start, "gap {start} -> {end}");
}
