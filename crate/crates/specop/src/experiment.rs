//! Monte-Carlo size/power tables and null-distribution studies.

use std::io::Write;

use specop_core::bootstrap::{self, BootstrapDistribution, Studentization};
use specop_core::rng::derive_seed;
use specop_core::simulate::{self, FmaModel};
use specop_core::{stats, Grid, GridPolicy, WeightKernel};

use crate::error::{CliError, CliResult};
use crate::parallel;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lens: Vec<usize>,
    pub a2: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub alphas: Vec<f64>,
    pub repetitions: usize,
    pub replicates: usize,
    pub master_seed: u64,
    /// `None` turns curve smoothing off.
    pub n_basis: Option<usize>,
    pub grid_points: usize,
    pub grid_policy: GridPolicy,
    pub studentization: Studentization,
    pub kernel: WeightKernel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lens: vec![100],
            a2: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            bandwidths: vec![0.2],
            alphas: vec![0.01, 0.05, 0.10],
            repetitions: 500,
            replicates: 1000,
            master_seed: 0,
            n_basis: Some(simulate::DEFAULT_BASIS),
            grid_points: simulate::DEFAULT_GRID_POINTS,
            grid_policy: GridPolicy::Midpoint,
            studentization: Studentization::Full,
            kernel: WeightKernel::epanechnikov(),
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("{key}: cannot parse {s:?}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.trim().parse().map_err(|_| CliError::Usage(format!("{key}: cannot parse {value:?}")))
}

pub fn parse_studentization(s: &str) -> CliResult<Studentization> {
    match s {
        "full" => Ok(Studentization::Full),
        "plugin" => Ok(Studentization::Plugin),
        _ => Err(CliError::Usage(format!("unknown studentization {s:?} (full|plugin)"))),
    }
}

pub fn parse_grid_policy(s: &str) -> CliResult<GridPolicy> {
    match s {
        "midpoint" => Ok(GridPolicy::Midpoint),
        "endpoint" => Ok(GridPolicy::Endpoint),
        _ => Err(CliError::Usage(format!("unknown grid policy {s:?} (midpoint|endpoint)"))),
    }
}

pub fn parse_kernel(s: &str) -> CliResult<WeightKernel> {
    WeightKernel::by_name(s).ok_or_else(|| CliError::Usage(format!("unknown kernel {s:?}")))
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. List keys take comma-separated values.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "T" => self.lens = parse_list(key, value)?,
            "a2" => self.a2 = parse_list(key, value)?,
            "b" => self.bandwidths = parse_list(key, value)?,
            "alpha" => self.alphas = parse_list(key, value)?,
            "R" => self.repetitions = parse_one(key, value)?,
            "B" => self.replicates = parse_one(key, value)?,
            "seed" => self.master_seed = parse_one(key, value)?,
            "n_basis" => {
                let n: usize = parse_one(key, value)?;
                self.n_basis = (n > 0).then_some(n);
            }
            "k" => self.grid_points = parse_one(key, value)?,
            "grid" => self.grid_policy = parse_grid_policy(value.trim())?,
            "studentization" => self.studentization = parse_studentization(value.trim())?,
            "kernel" => self.kernel = parse_kernel(value.trim())?,
            _ => return Err(CliError::Usage(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Flat `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> CliResult<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value).map_err(|e| CliError::Usage(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.lens.is_empty() || self.a2.is_empty() || self.bandwidths.is_empty() || self.alphas.is_empty() {
            return Err(CliError::Usage("T, a2, b and alpha lists must be non-empty".into()));
        }
        if self.repetitions == 0 || self.replicates == 0 {
            return Err(CliError::Usage("R and B must be at least 1".into()));
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(CliError::Usage("alpha levels must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn model(&self, a2: f64, len: usize) -> FmaModel {
        FmaModel::new(a2, len, Grid::equidistant(self.grid_points, self.grid_policy)).with_smoothing(self.n_basis)
    }
}

/// Data seed of a `(T, a₂)` cell. Bandwidths share it, so rows that differ
/// only in `b` are computed from the same simulated pairs.
pub fn cell_seed(master: u64, len: usize, a2: f64) -> u64 {
    derive_seed(derive_seed(master, len as u64), a2.to_bits())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub len: usize,
    pub b: f64,
    pub a2: f64,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
}

impl CellResult {
    /// `(rate, standard error)` with rejection when `p <= α`.
    pub fn rejection(&self, alpha: f64) -> (f64, f64) {
        stats::rejection_rate(&self.p_values, alpha)
    }
}

pub fn run_cell(cfg: &ExperimentConfig, len: usize, b: f64, a2: f64, pool: &rayon::ThreadPool) -> CliResult<CellResult> {
    let model = cfg.model(a2, len);
    let seed = cell_seed(cfg.master_seed, len, a2);
    let outcomes = parallel::map_indexed(pool, cfg.repetitions, |rep| {
        simulate::run_repetition(&model, b, &cfg.kernel, cfg.replicates, cfg.studentization, seed, rep)
    })?;
    Ok(CellResult {
        len,
        b,
        a2,
        t_stats: outcomes.iter().map(|o| o.t_stat).collect(),
        p_values: outcomes.iter().map(|o| o.p_value).collect(),
    })
}

/// Every `(T, b, a₂)` cell, in that nesting order.
pub fn run_table(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> CliResult<Vec<CellResult>> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &len in &cfg.lens {
        for &b in &cfg.bandwidths {
            for &a2 in &cfg.a2 {
                cells.push(run_cell(cfg, len, b, a2, pool)?);
            }
        }
    }
    Ok(cells)
}

/// One row per cell: rejection rate per α, then the Monte-Carlo standard errors.
pub fn write_table<W: Write>(mut out: W, cfg: &ExperimentConfig, cells: &[CellResult]) -> std::io::Result<()> {
    let rates: Vec<String> = cfg.alphas.iter().map(|a| format!("alpha={a}")).collect();
    let ses: Vec<String> = cfg.alphas.iter().map(|a| format!("se_alpha={a}")).collect();
    writeln!(out, "T,b,a2,R,B,{},{}", rates.join(","), ses.join(","))?;
    for c in cells {
        let r: Vec<(f64, f64)> = cfg.alphas.iter().map(|&a| c.rejection(a)).collect();
        let rate: Vec<String> = r.iter().map(|x| format!("{:.4}", x.0)).collect();
        let se: Vec<String> = r.iter().map(|x| format!("{:.4}", x.1)).collect();
        writeln!(out, "{},{},{},{},{},{},{}", c.len, c.b, c.a2, c.p_values.len(), cfg.replicates, rate.join(","), se.join(","))?;
    }
    Ok(())
}

pub fn write_p_values<W: Write>(mut out: W, cells: &[CellResult]) -> std::io::Result<()> {
    writeln!(out, "T,b,a2,rep,t_stat,p_value")?;
    for c in cells {
        for (rep, (t, p)) in c.t_stats.iter().zip(&c.p_values).enumerate() {
            writeln!(out, "{},{},{},{rep},{t:.16e},{p:.16e}", c.len, c.b, c.a2)?;
        }
    }
    Ok(())
}

/// Exact null draws of `t_U` and full bootstrap arrays for some of the datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDensity {
    pub len: usize,
    pub b: f64,
    pub exact: Vec<f64>,
    /// Repetition indices whose bootstrap arrays were computed.
    pub datasets: Vec<u64>,
    /// `t*` in replicate order, one array per chosen dataset.
    pub bootstrap: Vec<BootstrapDistribution>,
}

const LABEL_DATASET_CHOICE: u64 = 0x5EED_DA7A;

/// `count` distinct indices from `0..n`, chosen by hashing under `seed`.
pub fn choose_datasets(seed: u64, n: usize, count: usize) -> Vec<u64> {
    let key = derive_seed(seed, LABEL_DATASET_CHOICE);
    let mut idx: Vec<u64> = (0..n as u64).collect();
    idx.sort_by_key(|&i| derive_seed(key, i));
    idx.truncate(count.min(n));
    idx
}

/// Null model (`a₂ = 0`) at a single `(T, b)`: `R` exact draws and `B`
/// bootstrap draws for each of `datasets` randomly chosen repetitions.
pub fn run_null_density(cfg: &ExperimentConfig, datasets: usize, pool: &rayon::ThreadPool) -> CliResult<NullDensity> {
    cfg.validate()?;
    if cfg.lens.len() != 1 || cfg.bandwidths.len() != 1 {
        return Err(CliError::Usage("the null-density study takes exactly one T and one b".into()));
    }
    let (len, b) = (cfg.lens[0], cfg.bandwidths[0]);
    let model = cfg.model(0.0, len);
    let seed = cell_seed(cfg.master_seed, len, 0.0);
    let exact = parallel::map_indexed(pool, cfg.repetitions, |rep| simulate::null_statistic(&model, b, &cfg.kernel, seed, rep))?;
    let chosen = choose_datasets(cfg.master_seed, cfg.repetitions, datasets);
    let mut arrays = Vec::with_capacity(chosen.len());
    for &rep in &chosen {
        let (x, y) = model.gen_pair_seeded(seed, rep)?;
        let plan = simulate::repetition_plan(seed, rep, cfg.replicates, cfg.studentization);
        let prepared = bootstrap::prepare(&x.center(), &y.center(), b, &cfg.kernel, &plan)?;
        let reps = parallel::map_indexed(pool, plan.replicates, |i| prepared.context.replicate_indexed(plan.master_seed, i))?;
        arrays.push(BootstrapDistribution::from_replicates(&reps));
    }
    Ok(NullDensity { len, b, exact, datasets: chosen, bootstrap: arrays })
}

pub fn write_exact<W: Write>(mut out: W, d: &NullDensity) -> std::io::Result<()> {
    writeln!(out, "rep,t_stat")?;
    for (i, t) in d.exact.iter().enumerate() {
        writeln!(out, "{i},{t:.16e}")?;
    }
    Ok(())
}

pub fn write_bootstrap_draws<W: Write>(mut out: W, d: &NullDensity) -> std::io::Result<()> {
    writeln!(out, "dataset,index,t_star")?;
    for (rep, dist) in d.datasets.iter().zip(&d.bootstrap) {
        for (i, t) in dist.t_star.iter().enumerate() {
            writeln!(out, "{rep},{i},{t:.16e}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_defaults() {
        let mut c = ExperimentConfig::default();
        c.apply_file("# desk run\nT = 50, 100\nb=0.3\nR = 10 # short\nn_basis = 0\nstudentization = plugin\n").unwrap();
        assert_eq!(c.lens, vec![50, 100]);
        assert_eq!(c.bandwidths, vec![0.3]);
        assert_eq!(c.repetitions, 10);
        assert_eq!(c.n_basis, None);
        assert_eq!(c.studentization, Studentization::Plugin);
        assert!(c.apply_file("nonsense = 1").is_err());
        assert!(c.apply_file("T 50").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        c.validate().unwrap();
        c.a2.clear();
        assert!(c.validate().is_err());
        let c = ExperimentConfig { replicates: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn dataset_choice_is_distinct_and_seeded() {
        let a = choose_datasets(1, 50, 10);
        let mut s = a.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 10);
        assert_eq!(a, choose_datasets(1, 50, 10));
        assert_ne!(a, choose_datasets(2, 50, 10));
        assert_eq!(choose_datasets(1, 3, 10).len(), 3);
    }

    #[test]
    fn small_table_shape() {
        let cfg = ExperimentConfig {
            lens: vec![20],
            a2: vec![0.0, 1.0],
            bandwidths: vec![0.4],
            repetitions: 3,
            replicates: 9,
            ..Default::default()
        };
        let pool = parallel::pool(2).unwrap();
        let cells = run_table(&cfg, &pool).unwrap();
        assert_eq!(cells.len(), 2);
        let mut out = Vec::new();
        write_table(&mut out, &cfg, &cells).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next().unwrap(), "T,b,a2,R,B,alpha=0.01,alpha=0.05,alpha=0.1,se_alpha=0.01,se_alpha=0.05,se_alpha=0.1");
        assert_eq!(text.lines().count(), 3);
        for c in &cells {
            let r: Vec<f64> = [0.01, 0.05, 0.10].iter().map(|&a| c.rejection(a).0).collect();
            assert!(r[0] <= r[1] && r[1] <= r[2]);
        }
    }
}
