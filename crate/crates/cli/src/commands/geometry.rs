use gradcompass::geometry::{
    analytic_fprime0, displacement_capped_lr, f_of_eps, perturbed_decrease_check, run_sgd_epochs,
    theorem3_xi_threshold, AnchorSet, QuadraticEnsemble, SgdManifest,
};
use gradcompass::linalg::norm;
use gradcompass::RngStream;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::json;

use super::require;
use crate::args::{GeometryArgs, Suite};
use crate::error::CliResult;
use crate::manifest::Outputs;

/// ε grid for the decrease check: 1e-6·r to 1e-2·r, four points per decade.
const GRID_POINTS: usize = 17;
/// Central-difference step for f'(0), relative to the nearest anchor distance.
const FD_STEP: f64 = 1e-5;
/// Step for the perturbed decrease check, relative to the nearest anchor distance.
const PERTURBED_STEP: f64 = 1e-4;

#[derive(Serialize)]
struct Lemma2Row {
    trial: usize,
    d: usize,
    n_b: usize,
    min_distance: f64,
    colinear: bool,
    fprime_analytic: f64,
    fprime_fd: f64,
    grid_decreasing: bool,
}

#[derive(Serialize)]
struct Theorem3Row {
    trial: usize,
    d: usize,
    n_b: usize,
    threshold: f64,
    xi_norm: f64,
    eps: f64,
    before: f64,
    after: f64,
    decreased: bool,
}

pub fn run(a: &GeometryArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    match a.suite {
        Suite::Lemma2 => lemma2(a, out),
        Suite::Theorem3 => theorem3(a, out),
        Suite::Corollary1 => corollary1(a, out),
    }
}

fn check_battery(a: &GeometryArgs) -> CliResult<()> {
    require(a.trials >= 1, || "--trials must be positive".into())?;
    require(a.max_d >= 2, || format!("--max-d must be at least 2, got {}", a.max_d))?;
    require(a.max_nb >= 2, || format!("--max-nb must be at least 2, got {}", a.max_nb))
}

/// Anchors scattered around a random center, with the current point drawn separately.
fn random_anchor_set(stream: RngStream, max_d: usize, max_nb: usize) -> CliResult<AnchorSet> {
    let mut rng = stream.rng();
    let d = rng.random_range(2..=max_d);
    let n_b = rng.random_range(2..=max_nb);
    let spread: f64 = rng.random_range(0.1..3.0);
    let center: Vec<f64> = (0..d).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect();
    let anchors = (0..n_b)
        .map(|_| center.iter().map(|c| c + spread * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let w = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(AnchorSet::new(anchors, w)?)
}

fn lemma2(a: &GeometryArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    check_battery(a)?;
    let root = RngStream::new(a.common.seed, 0);
    let mut w = out.csv_writer("lemma2.csv")?;
    let mut failures = 0;
    for trial in 0..a.trials {
        let set = random_anchor_set(root.child(trial as u64), a.max_d, a.max_nb)?;
        let r = set.min_distance();
        let s = set.direction_sum();
        let f0 = f_of_eps(&set, 0.0, &s)?;
        let grid_decreasing = (0..GRID_POINTS).all(|k| {
            let eps = 10f64.powf(-6.0 + 0.25 * k as f64) * r;
            f_of_eps(&set, eps, &s).is_ok_and(|f| f < f0)
        });
        let h = FD_STEP * r;
        let back: Vec<f64> = s.iter().map(|x| -x).collect();
        let fprime_fd = (f_of_eps(&set, h, &s)? - f_of_eps(&set, h, &back)?) / (2.0 * h);
        let colinear = set.is_colinear();
        if !colinear && !grid_decreasing {
            failures += 1;
        }
        w.serialize(Lemma2Row {
            trial,
            d: set.dim(),
            n_b: set.n_b(),
            min_distance: r,
            colinear,
            fprime_analytic: analytic_fprime0(&set),
            fprime_fd,
            grid_decreasing,
        })?;
    }
    w.flush()?;
    Ok(json!({ "suite": "lemma2", "trials": a.trials, "grid_failures": failures }))
}

fn theorem3(a: &GeometryArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    check_battery(a)?;
    require(a.xi_fraction >= 0.0 && a.xi_fraction < 1.0, || {
        format!("--xi-fraction must lie in [0, 1), got {}", a.xi_fraction)
    })?;
    let root = RngStream::new(a.common.seed, 0);
    let mut w = out.csv_writer("theorem3.csv")?;
    let (mut decreased, mut skipped) = (0, 0);
    for trial in 0..a.trials {
        let set = random_anchor_set(root.child(trial as u64), a.max_d, a.max_nb)?;
        let threshold = theorem3_xi_threshold(&set);
        if threshold.is_nan() || threshold <= 0.0 {
            skipped += 1;
            continue;
        }
        let mut rng = RngStream::new(a.common.seed, 1).child(trial as u64).rng();
        let raw: Vec<f64> = (0..set.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let scale = a.xi_fraction * threshold / norm(&raw);
        let pert: Vec<f64> = raw.iter().map(|x| x * scale).collect();
        let eps = PERTURBED_STEP * set.min_distance();
        let check = perturbed_decrease_check(&set, &pert, eps)?;
        decreased += usize::from(check.decreased);
        w.serialize(Theorem3Row {
            trial,
            d: set.dim(),
            n_b: set.n_b(),
            threshold,
            xi_norm: norm(&pert),
            eps,
            before: check.rhs,
            after: check.lhs,
            decreased: check.decreased,
        })?;
    }
    w.flush()?;
    Ok(json!({ "suite": "theorem3", "trials": a.trials, "decreased": decreased, "skipped_colinear": skipped }))
}

fn corollary1(a: &GeometryArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    require(a.dim >= 2, || format!("--dim must be at least 2, got {}", a.dim))?;
    require(a.n_b >= 2, || format!("--n-b must be at least 2, got {}", a.n_b))?;
    require(a.max_condition >= 1.0, || format!("--max-condition must be at least 1, got {}", a.max_condition))?;
    require(a.displacement > 0.0 && a.displacement < 1.0, || {
        format!("--displacement must lie in (0, 1), got {}", a.displacement)
    })?;

    let mut rng = RngStream::new(a.common.seed, 0).rng();
    let center: Vec<f64> = (0..a.dim).map(|j| if j == 0 { a.offset } else { 0.0 }).collect();
    let anchors: Vec<Vec<f64>> = (0..a.n_b)
        .map(|_| center.iter().map(|c| c + rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let ens = QuadraticEnsemble::with_random_hessians(anchors, a.max_condition, RngStream::new(a.common.seed, 1))?;
    let w0 = vec![0.0; a.dim];
    let lr = displacement_capped_lr(&ens, &w0, a.displacement)?;
    let stream = RngStream::new(a.common.seed, 2);
    let trace = run_sgd_epochs(&ens, &w0, lr, a.epochs, stream)?;

    trace.write_csv(std::fs::File::create(out.path("sgd_trace.csv"))?)?;
    out.write_json("sgd_manifest.json", &SgdManifest::new(&ens, &trace, stream))?;
    let k = trace.kappa_anchor();
    let (mut run, mut longest) = (0, 0);
    for p in k.windows(2) {
        run = if p[1] < p[0] { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    eprintln!(
        "lr {lr:.3e}: κ̂ {:.4} → {:.4}, longest decreasing run {longest}",
        k[0],
        k[k.len() - 1]
    );
    Ok(json!({
        "suite": "corollary1",
        "lr": lr,
        "stopped_early": trace.stopped_early,
        "longest_decreasing_run": longest,
        "alignment_checks": trace.alignment_checks,
        "alignment_violations": trace.alignment_violations,
    }))
}
