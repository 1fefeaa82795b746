//! The six experiment drivers. Each replicate draws its own rng stream
//! derived from (seed, replicate), so record sets are independent of the
//! worker count.

use anyhow::{Context, Result};
use rand::Rng;

use gros::aggregate::{choose_k, partition_indices, AbsMetric, CandidatePool};
use gros::bandits::{simulate_run, BanditEnv, Policy, VariancePlugin, MATCHED_WIDTH_VARIANCE};
use gros::clustering::{
    classification_error, kmeans, random_init_centers, robust_kmeans, FitOptions,
};
use gros::metrics::{l2_grid_distance, GridFunction};
use gros::regression::{nw_estimate, ranw_fit, KernelSpec, RegressionSample};
use gros::samplers::{
    sample_circle_scenarios, sample_ring_mixture, sample_skew_t_noise, sample_student_mixture,
    sample_student_rewards, RandomState, SkewTParams,
};
use gros::sets::{hausdorff_to_unit_disk, rchull_fit};
use gros::topology::{finite_w1, rips_persistence, robust_diagram};

use crate::config::{Experiment, RunConfig};
use crate::records::{normalize, Record};

/// Stream offset for the Monte-Carlo oracle of the core check, clear of
/// every replicate stream.
const ORACLE_STREAM: u64 = u64::MAX - 1;

pub fn run_experiment(cfg: &RunConfig) -> Result<Vec<Record>> {
    let state = RandomState::new(cfg.seed);
    let per_replicate: Vec<Result<Vec<Record>>> =
        gros::exec::map_replicates(cfg.replicates, cfg.parallelism, |r| {
            let child = state.child(r as u64);
            replicate_records(cfg, r, &child)
                .with_context(|| format!("{} replicate {r}", cfg.experiment.id()))
        });
    let mut records = Vec::new();
    if cfg.experiment == Experiment::CoreCheck {
        records.extend(core_check_oracle(cfg, &state)?);
    }
    for batch in per_replicate {
        records.extend(batch?);
    }
    normalize(&mut records);
    Ok(records)
}

fn replicate_records(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    match cfg.experiment {
        Experiment::CoreCheck => core_check_replicate(cfg, r, state),
        Experiment::Kmeans => kmeans_replicate(cfg, r, state),
        Experiment::Bandits => bandits_replicate(cfg, r, state),
        Experiment::Regression => regression_replicate(cfg, r, state),
        Experiment::Sets => sets_replicate(cfg, r, state),
        Experiment::Tda => tda_replicate(cfg, r, state),
    }
}

/// Mean of the squared group-mean deviation, the `E d^2(mu_1, mu)` plug-in
/// of the concentration bound, from an independent stream.
fn core_check_oracle(cfg: &RunConfig, state: &RandomState) -> Result<Vec<Record>> {
    let k = choose_k(cfg.delta)?;
    let group_size = cfg.sample_size / k;
    let mut rng = state.child(ORACLE_STREAM).rng();
    let trials = 100_000;
    let mut sum = 0.0;
    for _ in 0..trials {
        let draws = sample_student_rewards(cfg.shift, cfg.reward_df, group_size, &mut rng);
        let mean = draws.iter().sum::<f64>() / group_size as f64;
        sum += (mean - cfg.shift).powi(2);
    }
    let e_d2 = sum / trials as f64;
    let id = cfg.experiment.id();
    Ok(vec![
        Record::new(id, 0, "oracle", "e_d2", e_d2),
        Record::new(id, 0, "oracle", "threshold", 6.0 * e_d2.sqrt()),
    ])
}

fn core_check_replicate(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    let k = choose_k(cfg.delta)?;
    let mut rng = state.rng();
    let data = sample_student_rewards(cfg.shift, cfg.reward_df, cfg.sample_size, &mut rng);
    let groups = partition_indices(data.len(), k, &mut rng)?;
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&i| data[i]).sum::<f64>() / g.len() as f64)
        .collect();
    let pool = CandidatePool::new(&means, AbsMetric)?;
    let selected = means[pool.select_index().selected_index];
    let id = cfg.experiment.id();
    Ok(vec![Record::new(
        id,
        r,
        "gros",
        "abs_deviation",
        (selected - cfg.shift).abs(),
    )])
}

fn kmeans_replicate(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    let mut rng = state.rng();
    let labeled = sample_student_mixture(cfg.sample_size, &mut rng);
    let points: Vec<[f64; 2]> = labeled.iter().map(|p| p.point).collect();
    let truth: Vec<usize> = labeled.iter().map(|p| p.label).collect();
    // Both fits start from the same centers so the comparison isolates the
    // update rule.
    let init = random_init_centers(&points, cfg.clusters, &mut rng);
    let opts = FitOptions::default();
    let plain = kmeans(&points, cfg.clusters, Some(init.clone()), opts, &mut rng)?;
    let robust = robust_kmeans(
        &points,
        cfg.clusters,
        cfg.k_groups,
        Some(init),
        opts,
        &mut rng,
    )?;
    let id = cfg.experiment.id();
    Ok(vec![
        Record::new(
            id,
            r,
            "kmeans",
            "classification_error",
            classification_error(&truth, &plain.assignments, cfg.clusters)?,
        ),
        Record::new(
            id,
            r,
            "robustkm",
            "classification_error",
            classification_error(&truth, &robust.assignments, cfg.clusters)?,
        ),
    ])
}

fn bandits_replicate(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    let env = BanditEnv::student(cfg.arm_means.clone(), cfg.reward_df);
    let id = cfg.experiment.id();
    let mut records = Vec::with_capacity(4 * cfg.horizon);
    for (policy, label, stream) in [(Policy::Ucb, "ucb", 0), (Policy::Rucb, "rucb", 1)] {
        let mut rng = state.child(stream).rng();
        // The robust index runs with its width calibrated to the UCB
        // width, so the two policies differ only in how they estimate the
        // arm means.
        let run = simulate_run(
            &env,
            policy,
            cfg.horizon,
            cfg.warmup,
            VariancePlugin::Fixed(MATCHED_WIDTH_VARIANCE),
            &mut rng,
        );
        for t in 0..cfg.horizon {
            records.push(Record::new(
                id,
                r,
                label,
                format!("cumulative_reward_t{}", t + 1),
                run.cumulative_reward[t],
            ));
            records.push(Record::new(
                id,
                r,
                label,
                format!("pseudo_regret_t{}", t + 1),
                run.pseudo_regret[t],
            ));
        }
    }
    Ok(records)
}

/// The regression target `m(x) = 4 sin(3x)` on its design domain [0, 5].
pub fn regression_truth(grid: &GridFunction) -> GridFunction {
    GridFunction::new(
        grid.grid_start,
        grid.grid_step,
        grid.nodes().map(|x| 4.0 * (3.0 * x).sin()).collect(),
    )
}

fn regression_replicate(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    let mut rng = state.rng();
    let xs: Vec<f64> = (0..cfg.sample_size)
        .map(|_| rng.gen_range(0.0..5.0))
        .collect();
    let params = SkewTParams::new(cfg.sigma, cfg.nu, cfg.xi, cfg.kappa);
    let noise = sample_skew_t_noise(cfg.sample_size, &params, &mut rng)?;
    let ys: Vec<f64> = xs
        .iter()
        .zip(&noise)
        .map(|(x, e)| 4.0 * (3.0 * x).sin() + e)
        .collect();
    let sample = RegressionSample::new(xs, ys);
    let grid = GridFunction::zeros(0.0, 5.0, cfg.grid_nodes);
    let truth = regression_truth(&grid);
    let spec = KernelSpec::new(cfg.bandwidth);

    let plain = nw_estimate(&sample, &spec, &grid)?;
    let fit = ranw_fit(&sample, cfg.k_groups, &spec, &grid, &mut rng)?;
    let metric = format!("d2_error_sigma{}_xi{}", cfg.sigma, cfg.xi);
    let id = cfg.experiment.id();
    // Mean error of the individual group fits: the per-group baseline the
    // aggregation improves on.
    let mut group_err = 0.0;
    for c in &fit.candidates {
        group_err += l2_grid_distance(c, &truth)?;
    }
    group_err /= fit.candidates.len() as f64;
    Ok(vec![
        Record::new(id, r, "groupnw", &metric, group_err),
        Record::new(id, r, "nw", &metric, l2_grid_distance(&plain, &truth)?),
        Record::new(
            id,
            r,
            "ranw_global",
            &metric,
            l2_grid_distance(&fit.global, &truth)?,
        ),
        Record::new(
            id,
            r,
            "ranw_pointwise",
            &metric,
            l2_grid_distance(&fit.pointwise, &truth)?,
        ),
    ])
}

fn sets_replicate(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    let mut rng = state.rng();
    let points = sample_ring_mixture(cfg.sample_size, cfg.lambda, &mut rng)?;
    let (selected, _, full) = rchull_fit(&points, cfg.k_groups, &mut rng)?;
    let id = cfg.experiment.id();
    Ok(vec![
        Record::new(
            id,
            r,
            "chull",
            "hausdorff",
            hausdorff_to_unit_disk(&full.polygon),
        ),
        Record::new(
            id,
            r,
            "rchull",
            "hausdorff",
            hausdorff_to_unit_disk(&selected.polygon),
        ),
    ])
}

fn tda_replicate(cfg: &RunConfig, r: usize, state: &RandomState) -> Result<Vec<Record>> {
    let mut rng = state.rng();
    let scenarios = sample_circle_scenarios(&mut rng);
    let baseline = rips_persistence(&scenarios.baseline, cfg.threshold)?;
    let id = cfg.experiment.id();
    let mut records = Vec::with_capacity(4);
    for (s, points) in [(1, &scenarios.scenario1), (2, &scenarios.scenario2)] {
        let plain = rips_persistence(points, cfg.threshold)?;
        let (robust, _) = robust_diagram(points, cfg.k_groups, cfg.threshold, &mut rng)?;
        let metric = format!("w1_scenario{s}");
        records.push(Record::new(
            id,
            r,
            "plain",
            &metric,
            finite_w1(&plain, &baseline),
        ));
        records.push(Record::new(
            id,
            r,
            "robust",
            &metric,
            finite_w1(&robust, &baseline),
        ));
    }
    Ok(records)
}
