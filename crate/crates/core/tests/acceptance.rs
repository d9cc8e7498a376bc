//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::time::Instant;

use bregopt::driver::{self, Schedule, SolverConfig, SweepOptions, SweepResult, TstarMode};
use bregopt::envelope::{self, EnvelopeOptions, EnvelopePath, FnComposite};
use bregopt::legendre::{build_poly_legendre, eval_poly, LegendreFunction};
use bregopt::models::{self, Sample};
use bregopt::problems::{self, ProblemInstance};
use bregopt::subproblem::{self, ProxOptions, Regularizer};
use bregopt::{numdiff, Point};
use nalgebra::{dvector, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Criterion = (&'static str, fn() -> Outcome);

const HORIZONS: [usize; 4] = [64, 256, 1024, 4096];

fn gaussian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Point {
    Point::from_fn(d, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn growth_lower_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let n = rng.random_range(0..=4);
        let mut p: Vec<f64> = (0..=n).map(|_| if rng.random_bool(0.7) { rng.random_range(0.0..2.0) } else { 0.0 }).collect();
        p[n] += 0.1;
        let phi = build_poly_legendre(&p)?;
        for _ in 0..1000 {
            let d = rng.random_range(1..=4);
            let x = gaussian(&mut rng, d, 1.5);
            let y = gaussian(&mut rng, d, 1.5);
            let div = phi.bregman(&y, &x)?;
            let lower = 0.5 * (eval_poly(&p, x.norm()) + eval_poly(&p, y.norm())) * (x - &y).norm_squared();
            worst = worst.min((div - lower) / (1.0 + div.abs()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst >= -1e-9 && secs < 5.0, format!("min relative slack {worst:.2e} over 20000 pairs in {secs:.2}s")))
}

fn three_point_contract() -> Outcome {
    let mut steps = 0;
    let mut worst = f64::INFINITY;
    for p in problems::registry() {
        for seed in 0..2 {
            let mut config = SolverConfig::for_problem(&p, 100, seed);
            config.check_probes = 100;
            let trace = driver::run(&p, &config)?;
            steps += trace.steps.len();
            worst = trace.steps.iter().map(|s| s.three_point_residual).fold(worst, f64::min);
        }
    }
    // Negative control: move one P1 minimizer and require a violation.
    let p = problems::p1();
    let trace = driver::run(&p, &SolverConfig::for_problem(&p, 10, 0))?;
    let (x, eta) = (&trace.iterates[3], trace.etas[3]);
    let model = p.oracle.model_at(x, &Sample::index(trace.steps[3].xi))?;
    let step = subproblem::prox_step(&model, &p.regularizer, &p.phi, x, eta, p.oracle.constants.rho, &ProxOptions::default())?;
    let bad = &step.minimizer + dvector![0.05];
    let mut probes = subproblem::random_probes(&p.regularizer, &p.phi, &step.minimizer, 100, &mut ChaCha8Rng::seed_from_u64(9));
    probes.push(step.minimizer.clone());
    let g = |y: &Point| eta * (model.value(y) + p.regularizer.value(y));
    let control = subproblem::check_three_point(g, &p.phi, x, &bad, &probes, eta * p.oracle.constants.rho)?;
    let detected = control.min_residual < -1e-8 * (1.0 + control.scale);
    Ok((
        worst >= -1e-8 && detected,
        format!("{steps} steps, min residual {worst:.2e}; perturbed step residual {:.2e}", control.min_residual),
    ))
}

fn envelope_gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let opts = EnvelopeOptions::default();
    let lambda = 0.3;
    let weakly = |x: &Point| x.iter().map(|v| v.sin() + 0.25 * v * v).sum::<f64>();
    let weakly_grad = |x: &Point| x.map(|v| v.cos() + 0.5 * v);
    let convex = |x: &Point| 0.5 * (x - dvector![0.3, 0.7, 1.1]).norm_squared();
    let convex_grad = |x: &Point| x - dvector![0.3, 0.7, 1.1];
    let kernels: Vec<(&str, LegendreFunction, bool)> = vec![
        ("euclidean", LegendreFunction::euclidean(), false),
        ("poly_growth", LegendreFunction::poly_growth(&[1.0, 0.5])?, false),
        ("norm_power_sum", LegendreFunction::norm_power_sum(&[1.0, 0.0, 0.5])?, false),
        ("shannon_entropy", LegendreFunction::shannon_entropy(), true),
        ("burg", LegendreFunction::burg(), true),
    ];
    let (mut worst_grad, mut worst_paths, mut n) = (0.0_f64, 0.0_f64, 0);
    for (_, phi, orthant) in &kernels {
        for _ in 0..20 {
            let x = if *orthant {
                Point::from_fn(3, |_, _| rng.random_range(0.3..2.0))
            } else {
                gaussian(&mut rng, 3, 1.5)
            };
            let (grad, fd, direct, conj) = if *orthant {
                let f = FnComposite { dim: 3, f: convex, grad: convex_grad, hessian: Some(|_: &Point| DMatrix::identity(3, 3)), regularizer: Regularizer::zero(), weak: 0.0 };
                envelope_pair(&f, phi, &x, lambda, &opts)?
            } else {
                let f = FnComposite { dim: 3, f: weakly, grad: weakly_grad, hessian: None, regularizer: Regularizer::zero(), weak: 1.0 };
                envelope_pair(&f, phi, &x, lambda, &opts)?
            };
            worst_grad = worst_grad.max((&fd - &grad).norm() / grad.norm().max(1e-3));
            worst_paths = worst_paths.max((direct - conj).abs() / direct.abs().max(1.0));
            n += 1;
        }
    }
    Ok((
        worst_grad <= 1e-5 && worst_paths <= 1e-6,
        format!("{n} points, {} kernels: max FD rel error {worst_grad:.2e}, direct vs conjugate {worst_paths:.2e}", kernels.len()),
    ))
}

fn envelope_pair<C: envelope::Composite>(f: &C, phi: &LegendreFunction, x: &Point, lambda: f64, opts: &EnvelopeOptions) -> Result<(Point, Point, f64, f64), Box<dyn std::error::Error>> {
    let grad = envelope::envelope_gradient(f, phi, x, lambda, opts)?;
    let fd = numdiff::gradient(|y| envelope::envelope_value(f, phi, y, lambda, EnvelopePath::Direct, opts).unwrap_or(f64::NAN), x);
    let direct = envelope::envelope_value(f, phi, x, lambda, EnvelopePath::Direct, opts)?;
    let conj = envelope::envelope_value(f, phi, x, lambda, EnvelopePath::Conjugate, opts)?;
    Ok((grad, fd, direct, conj))
}

fn sweep(p: &ProblemInstance, schedule: Option<Schedule>) -> Result<SweepResult, Box<dyn std::error::Error>> {
    let mut template = SolverConfig::for_problem(p, 0, 0);
    if let Some(s) = schedule {
        template.schedule = s;
    }
    Ok(driver::sweep(p, &SweepOptions { horizons: HORIZONS.to_vec(), n_seeds: 20, base_seed: 1000, mode: TstarMode::Full, threads: Some(1), template })?)
}

fn slope_line(res: &SweepResult) -> String {
    let means: Vec<String> = res.summary.iter().map(|s| format!("{:.2e}", s.mean)).collect();
    format!("slope {:.3} (r² {:.3}), means [{}]", res.fit.slope.unwrap_or(f64::NAN), res.fit.r2.unwrap_or(f64::NAN), means.join(", "))
}

fn rate_weakly_convex() -> Outcome {
    let start = Instant::now();
    let p = problems::p1();
    let res = sweep(&p, Some(Schedule::ConstantAlpha { alpha: p.defaults.alpha }))?;
    let secs = start.elapsed().as_secs_f64();
    let ok = res.fit.slope.is_some_and(|s| s <= -0.40) && secs < 600.0;
    Ok((ok, format!("{} in {secs:.1}s", slope_line(&res))))
}

fn within_bound(res: &SweepResult, bound: impl Fn(usize) -> Result<f64, Box<dyn std::error::Error>>) -> Result<(bool, String), Box<dyn std::error::Error>> {
    let mut ok = true;
    let mut parts = Vec::new();
    for s in &res.summary {
        let b = bound(s.horizon)?;
        ok &= s.mean - 3.0 * s.std_error <= b;
        parts.push(format!("{:.1e}<={:.1e}", s.mean, b));
    }
    Ok((ok, parts.join(" ")))
}

fn rate_convex() -> Outcome {
    let p = problems::p3();
    let res = sweep(&p, None)?;
    let (bounded, detail) = within_bound(&res, |t| {
        let config = SolverConfig::for_problem(&p, t, 0);
        let etas = driver::step_sizes(&p, &config, driver::resolve_lambda(&p, &config)?)?;
        Ok(driver::convex_bound(&p, &etas)?)
    })?;
    let ok = res.fit.slope.is_some_and(|s| s <= -0.35) && bounded;
    Ok((ok, format!("{}; gap vs bound {detail}", slope_line(&res))))
}

fn rate_strongly_convex() -> Outcome {
    let p = problems::p4();
    let mu = p.constants().mu;
    let res = sweep(&p, Some(Schedule::StronglyConvexMu { mu }))?;
    let (bounded, detail) = within_bound(&res, |t| Ok(driver::strongly_convex_bound(&p, t, mu)?))?;
    let ok = res.fit.slope.is_some_and(|s| s <= -0.80) && bounded;
    Ok((ok, format!("{}; gap vs bound {detail}", slope_line(&res))))
}

fn rate_mirror_descent() -> Outcome {
    let p = problems::p2();
    let res = sweep(&p, Some(Schedule::ConstantAlpha { alpha: p.defaults.alpha }))?;
    Ok((res.fit.slope.is_some_and(|s| s <= -0.40), slope_line(&res)))
}

fn model_constants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let p1 = problems::p1();
    let xs = problems::sample_points(&p1, 10_000, &mut rng);
    let ys = problems::sample_points(&p1, 10_000, &mut rng);
    let mut one_sided = true;
    for (x, y) in xs.iter().zip(&ys) {
        one_sided &= models::verify_one_sided(&p1.oracle, &p1.phi, x, y, 1, &mut rng)?.pass;
    }
    let pairs: Vec<(Point, Point)> = xs.into_iter().zip(ys).collect();
    let lip = models::verify_lipschitz(&p1.oracle, &p1.phi, &pairs)?;

    let p2 = problems::p2();
    let xs = problems::sample_points(&p2, 10_000, &mut rng);
    let ys = problems::sample_points(&p2, 10_000, &mut rng);
    let pairs: Vec<(Point, Point)> = xs.into_iter().zip(ys).collect();
    let smooth = models::verify_relative_smoothness(&p2.oracle, &p2.phi, &pairs)?;
    let mut variance = true;
    for (x, _) in pairs.iter().take(20) {
        variance &= models::verify_variance(&p2.oracle, &p2.phi, x, 5000, &mut rng)?.pass;
    }
    Ok((
        one_sided && lip.pass && smooth.pass && variance,
        format!(
            "P1 one-sided {one_sided}, Lipschitz max ratio to L(ξ) {:.3} over {} pairs, √E L² = {:.3} vs 𝖫 = {:.3}; P2 smoothness violations ({:.1e}, {:.1e}), variance {variance}",
            lip.max_relative, lip.pairs_checked, lip.rms_lipschitz, lip.claimed_l, smooth.max_lower_violation, smooth.max_upper_violation
        ),
    ))
}

fn tstar_law() -> Outcome {
    let etas: Vec<f64> = (0..10).map(|t| 0.4 / (1.0 + 0.3 * t as f64)).collect();
    let rho = 2.0;
    let weights = driver::tstar_weights(&etas, rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let n = 100_000;
    let mut counts = vec![0usize; etas.len()];
    for _ in 0..n {
        counts[driver::sample_tstar(&etas, rho, &mut rng)?] += 1;
    }
    let stat: f64 = counts.iter().zip(&weights).map(|(&c, w)| (c as f64 - n as f64 * w).powi(2) / (n as f64 * w)).sum();
    let p_value = 1.0 - ChiSquared::new((etas.len() - 1) as f64)?.cdf(stat);
    Ok((p_value >= 1e-3, format!("χ² = {stat:.2} on {} dof, p = {p_value:.3}", etas.len() - 1)))
}

fn reduction_identity() -> Outcome {
    let p = problems::quadratic_instance();
    let mut ok = true;
    for (seed, etas) in [(1, vec![0.2; 41]), (2, (0..41).map(|t| 0.25 / (1.0 + t as f64).sqrt()).collect())] {
        let mut config = SolverConfig::new(40, seed, Schedule::Explicit { etas });
        config.lambda = Some(0.3);
        let trace = driver::run_model_based(&p, &config)?;
        let mut x = p.x0.clone();
        for (t, xt) in trace.iterates.iter().enumerate() {
            ok &= *xt == x;
            if t < trace.etas.len() {
                x = &x - p.oracle.f_subgradient(&x) * trace.etas[t];
            }
        }
    }
    Ok((ok, "constant and decreasing schedules, 41 iterates each, bitwise".into()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 growth lower bound", growth_lower_bound),
        ("2 three-point contract", three_point_contract),
        ("3 envelope gradient", envelope_gradient_check),
        ("4 rate P1 (weakly convex)", rate_weakly_convex),
        ("5 rate P3 (convex)", rate_convex),
        ("6 rate P4 (strongly convex)", rate_strongly_convex),
        ("7 rate P2 (mirror descent)", rate_mirror_descent),
        ("8 model constants", model_constants),
        ("9 t* sampling law", tstar_law),
        ("10 reduction identity", reduction_identity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
