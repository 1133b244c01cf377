//! Monte-Carlo checks of the data generators and the bootstrap.

mod common;

use common::noise;
use specop_core::bootstrap::{self, BootstrapPlan, Studentization};
use specop_core::rng::substream;
use specop_core::simulate::{brownian_bridge, FmaModel};
use specop_core::{Grid, WeightKernel};

fn bridge_cov(u: f64, v: f64) -> f64 {
    u.min(v) - u * v
}

#[test]
fn bridge_covariance() {
    let grid = Grid::midpoints(9);
    let k = grid.len();
    let n = 50_000;
    let mut rng = substream(1, 0);
    let mut acc = vec![0.0; k * k];
    for _ in 0..n {
        let b = brownian_bridge(&grid, &mut rng);
        for i in 0..k {
            for j in 0..k {
                acc[i * k + j] += b[i] * b[j];
            }
        }
    }
    let pts = grid.points();
    for i in 0..k {
        for j in 0..k {
            let emp = acc[i * k + j] / n as f64;
            assert!((emp - bridge_cov(pts[i], pts[j])).abs() <= 0.01, "({i},{j}) {emp}");
        }
    }
}

#[test]
fn lag0_covariance_of_y() {
    // r_Y(s,s) = c(s,s) + (A₁ c A₁ᵀ)(s,s) for bridge covariance c
    let model = FmaModel::standard(0.0, 4).with_smoothing(None);
    let k = model.k();
    let pts = model.grid().points().to_vec();
    let psi = model.psi_matrix();
    let w = 1.0 / k as f64;
    let expected: Vec<f64> = (0..k)
        .map(|i| {
            let mut acc = bridge_cov(pts[i], pts[i]);
            for a in 0..k {
                for b in 0..k {
                    acc += w * w * psi[i * k + a] * bridge_cov(pts[a], pts[b]) * psi[i * k + b];
                }
            }
            acc
        })
        .collect();
    let n = 20_000;
    let mut acc = vec![0.0; k];
    for rep in 0..n {
        let (_, y) = model.gen_pair_seeded(5, rep).unwrap();
        for (a, v) in acc.iter_mut().zip(y.row(0)) {
            *a += v * v;
        }
    }
    for (a, e) in acc.iter().zip(&expected) {
        assert!((a / n as f64 - e).abs() <= 0.02);
    }
}

#[test]
fn lag2_autocovariance_grows_with_a2() {
    // trace of the lag-2 autocovariance of X at t = 2, compared across a₂
    let k = 21;
    let reps = 5_000;
    let lag2_trace = |a2: f64| -> Vec<f64> {
        let model = FmaModel::standard(a2, 4).with_smoothing(None);
        (0..reps)
            .map(|rep| {
                let (x, _) = model.gen_pair_seeded(9, rep).unwrap();
                x.row(2).iter().zip(x.row(0)).map(|(a, b)| a * b).sum::<f64>() / k as f64
            })
            .collect()
    };
    let with = lag2_trace(1.0);
    let without = lag2_trace(0.0);
    let diff: Vec<f64> = with.iter().zip(&without).map(|(a, b)| a - b).collect();
    let mean = diff.iter().sum::<f64>() / reps as f64;
    let var = diff.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let se = (var / reps as f64).sqrt();
    assert!(mean >= 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn generation_is_deterministic() {
    let model = FmaModel::standard(0.4, 20);
    assert_eq!(model.gen_pair_seeded(3, 7).unwrap(), model.gen_pair_seeded(3, 7).unwrap());
    assert_ne!(model.gen_pair_seeded(3, 7).unwrap(), model.gen_pair_seeded(3, 8).unwrap());
}

#[test]
fn bootstrap_statistic_is_centered() {
    // E[√b T U*] ≈ μ̂₀/√b, so the replicate mean of t* is near zero
    let x = noise(100, 5, 41).center();
    let y = noise(100, 5, 42).center();
    let b = 0.2;
    let plan = BootstrapPlan::new(600, 11);
    let prepared = bootstrap::prepare(&x, &y, b, &WeightKernel::epanechnikov(), &plan).unwrap();
    let sb = b.sqrt();
    let total: f64 = (0..plan.replicates as u64)
        .map(|i| sb * 100.0 * prepared.context.replicate_indexed(11, i).unwrap().u_star)
        .sum();
    let mean = total / plan.replicates as f64;
    let target = prepared.result.mu0_hat / sb;
    assert!((mean - target).abs() <= 0.1 * target, "mean {mean}, target {target}");
}

#[test]
fn plugin_and_full_share_draws() {
    let x = noise(60, 3, 1).center();
    let y = noise(60, 3, 2).center();
    let w = WeightKernel::epanechnikov();
    let mut plan = BootstrapPlan::new(50, 4);
    let full = bootstrap::run(&x, &y, 0.3, &w, &plan).unwrap();
    plan.studentization = Studentization::Plugin;
    let plugin = bootstrap::run(&x, &y, 0.3, &w, &plan).unwrap();
    assert_eq!(full.result.t_stat, plugin.result.t_stat);
    assert_ne!(full.distribution.sorted(), plugin.distribution.sorted());
    let p = plugin.result.p_value.unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn identical_inputs_give_zero_statistic() {
    let x = noise(40, 4, 12).center();
    let out = bootstrap::run(&x, &x, 0.3, &WeightKernel::epanechnikov(), &BootstrapPlan::new(99, 1)).unwrap();
    assert_eq!(out.result.u_stat, 0.0);
    assert!(out.result.q_profile.iter().all(|&q| q == 0.0));
    assert!(out.result.d_map.iter().all(|&d| d == 0.0));
    assert!(out.result.p_value.unwrap() >= 0.5);
}

#[test]
fn bootstrap_is_reproducible() {
    let x = noise(50, 3, 5).center();
    let y = noise(50, 3, 6).center();
    let w = WeightKernel::epanechnikov();
    let plan = BootstrapPlan::new(40, 99);
    let a = bootstrap::run(&x, &y, 0.25, &w, &plan).unwrap();
    let b = bootstrap::run(&x, &y, 0.25, &w, &plan).unwrap();
    assert_eq!(a.result, b.result);
    assert_eq!(a.distribution, b.distribution);
}
