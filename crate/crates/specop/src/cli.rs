//! Argument parsing and subcommand dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use specop_core::bandwidth;
use specop_core::bootstrap::Studentization;
use specop_core::GridPolicy;

use crate::error::{CliError, CliResult};
use crate::experiment::{self, ExperimentConfig};
use crate::export;
use crate::io::{self, CsvOptions};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::parallel;
use crate::pipeline::{self, AnalysisOptions, Calibration, Smoothing};

#[derive(Debug, Parser)]
#[command(name = "specop", version, about = "Test whether two functional time series share a spectral density operator")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bootstrap test of equal spectral density operators.
    Test(TestArgs),
    /// Frequency profile and grid map of the distance, without calibration.
    Diagnose(DiagnoseArgs),
    /// Cross-validated bandwidth selection.
    Cv(CvArgs),
    /// Monte-Carlo size and power tables, or a null-distribution study.
    Simulate(SimulateArgs),
    /// Write one simulated pair of curve files.
    Generate(GenerateArgs),
    /// Re-run a previous invocation from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudentizationArg {
    Full,
    Plugin,
}

impl From<StudentizationArg> for Studentization {
    fn from(s: StudentizationArg) -> Self {
        match s {
            StudentizationArg::Full => Studentization::Full,
            StudentizationArg::Plugin => Studentization::Plugin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrationArg {
    Bootstrap,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Midpoint,
    Endpoint,
}

impl From<GridArg> for GridPolicy {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Midpoint => GridPolicy::Midpoint,
            GridArg::Endpoint => GridPolicy::Endpoint,
        }
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Curves of the first series, one per row.
    pub x: PathBuf,
    /// Curves of the second series.
    pub y: PathBuf,
    /// Field delimiter of both files.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Grid used when a file carries no `# grid:` comment.
    #[arg(long, value_enum, default_value_t = GridArg::Midpoint)]
    pub grid: GridArg,
    /// Fourier basis size for curve smoothing; 0 disables. Default: 21 when the grid has at least 21 points.
    #[arg(long)]
    pub n_basis: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimationArgs {
    /// Smoothing bandwidth in (0, π); chosen by cross-validation when absent.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value = "epanechnikov-2pi")]
    pub kernel: String,
    /// Let the smoothing window wrap around ±π.
    #[arg(long)]
    pub wrap_frequencies: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimation: EstimationArgs,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, env = "SPECOP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = StudentizationArg::Full)]
    pub studentization: StudentizationArg,
    #[arg(long, value_enum, default_value_t = CalibrationArg::Bootstrap)]
    pub calibration: CalibrationArg,
    /// Directory for result files and the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write every bootstrap replicate to `bootstrap.csv`.
    #[arg(long)]
    pub dump_bootstrap: bool,
    /// Also write both spectral estimates as JSON.
    #[arg(long)]
    pub dump_estimates: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimation: EstimationArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "epanechnikov-2pi")]
    pub kernel: String,
    /// Explicit ascending bandwidth grid; overrides the log-spaced grid.
    #[arg(long, value_delimiter = ',')]
    pub b_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = bandwidth::DEFAULT_GRID_MIN)]
    pub b_min: f64,
    #[arg(long, default_value_t = bandwidth::DEFAULT_GRID_MAX)]
    pub b_max: f64,
    #[arg(long, default_value_t = bandwidth::DEFAULT_GRID_POINTS)]
    pub b_points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "T", value_delimiter = ',')]
    pub lens: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub a2: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Repetitions per cell (exact draws in the null-density study).
    #[arg(long = "R")]
    pub repetitions: Option<usize>,
    #[arg(long = "B")]
    pub replicates: Option<usize>,
    #[arg(long, env = "SPECOP_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Fourier basis size for the simulated curves; 0 disables.
    #[arg(long)]
    pub n_basis: Option<usize>,
    /// Grid size of the simulated curves.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub grid: Option<GridArg>,
    #[arg(long, value_enum)]
    pub studentization: Option<StudentizationArg>,
    #[arg(long)]
    pub kernel: Option<String>,
    /// Run the null-density study with this many bootstrap datasets instead of the table.
    #[arg(long)]
    pub null_density: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long = "T")]
    pub len: usize,
    #[arg(long, default_value_t = 0.0)]
    pub a2: f64,
    #[arg(long, env = "SPECOP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Repetition index under the seed.
    #[arg(long, default_value_t = 0)]
    pub rep: u64,
    #[arg(long, default_value_t = 21)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = GridArg::Midpoint)]
    pub grid: GridArg,
    /// Fourier basis size; 0 disables.
    #[arg(long, default_value_t = 21)]
    pub n_basis: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (without the program name) and runs the subcommand.
/// Writes the primary result to `stdout`.
pub fn run<W: Write>(args: &[String], stdout: &mut W) -> CliResult<()> {
    let argv = std::iter::once("specop".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    dispatch(cli.command, stdout)
}

pub fn dispatch<W: Write>(command: Command, stdout: &mut W) -> CliResult<()> {
    match command {
        Command::Test(a) => cmd_test(&a, stdout),
        Command::Diagnose(a) => cmd_diagnose(&a, stdout),
        Command::Cv(a) => cmd_cv(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Generate(a) => cmd_generate(&a),
        Command::Replay(a) => cmd_replay(&a, stdout),
    }
}

fn delimiter_byte(c: char) -> CliResult<u8> {
    u8::try_from(c).ok().filter(u8::is_ascii).ok_or_else(|| CliError::Usage(format!("delimiter {c:?} must be one ASCII character")))
}

fn absolute(p: &Path) -> String {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, f: impl FnOnce(&mut std::io::BufWriter<fs::File>) -> std::io::Result<()>) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn emit<W: Write>(stdout: &mut W, text: &str) -> CliResult<()> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("results serialize") + "\n"
}

impl InputArgs {
    fn csv(&self) -> CliResult<CsvOptions> {
        Ok(CsvOptions { delimiter: delimiter_byte(self.delimiter)?, grid_policy: self.grid.into() })
    }

    fn argv(&self) -> Vec<String> {
        let mut v = vec![
            absolute(&self.x),
            absolute(&self.y),
            "--delimiter".into(),
            self.delimiter.to_string(),
            "--grid".into(),
            value_name(self.grid),
        ];
        if let Some(n) = self.n_basis {
            v.extend(["--n-basis".into(), n.to_string()]);
        }
        v
    }
}

impl EstimationArgs {
    fn argv(&self) -> Vec<String> {
        let mut v = vec!["--kernel".into(), self.kernel.clone()];
        if let Some(b) = self.b {
            v.extend(["--b".into(), b.to_string()]);
        }
        if self.wrap_frequencies {
            v.push("--wrap-frequencies".into());
        }
        v
    }
}

fn analysis_options(input: &InputArgs, est: &EstimationArgs) -> CliResult<AnalysisOptions> {
    Ok(AnalysisOptions {
        b: est.b,
        kernel: experiment::parse_kernel(&est.kernel)?,
        wrap_frequencies: est.wrap_frequencies,
        smoothing: Smoothing::from_flag(input.n_basis),
        csv: input.csv()?,
        ..Default::default()
    })
}

impl TestArgs {
    fn argv(&self) -> Vec<String> {
        let mut v = vec!["test".to_string()];
        v.extend(self.input.argv());
        v.extend(self.estimation.argv());
        v.extend([
            "--B".into(),
            self.replicates.to_string(),
            "--alpha".into(),
            self.alpha.to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--studentization".into(),
            value_name(self.studentization),
            "--calibration".into(),
            value_name(self.calibration),
        ]);
        if let Some(out) = &self.out {
            v.extend(["--out".into(), absolute(out)]);
        }
        if self.dump_bootstrap {
            v.push("--dump-bootstrap".into());
        }
        if self.dump_estimates {
            v.push("--dump-estimates".into());
        }
        v
    }
}

fn cmd_test<W: Write>(a: &TestArgs, stdout: &mut W) -> CliResult<()> {
    let mut opts = analysis_options(&a.input, &a.estimation)?;
    opts.replicates = a.replicates;
    opts.seed = a.seed;
    opts.workers = a.workers;
    opts.alpha = a.alpha;
    opts.studentization = a.studentization.into();
    opts.calibration = match a.calibration {
        CalibrationArg::Bootstrap => Calibration::Bootstrap,
        CalibrationArg::Gaussian => Calibration::Gaussian,
    };
    let (x, y, n_basis) = pipeline::load_pair(&a.input.x, &a.input.y, &opts)?;
    let run = pipeline::run_test(&x, &y, n_basis, &opts)?;
    let json = to_json(&run.report);
    emit(stdout, &json)?;

    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_file(&dir.join("result.json"), |w| w.write_all(json.as_bytes()))?;
        write_file(&dir.join("q_profile.csv"), |w| export::write_q_profile(w, &run.report.result))?;
        write_file(&dir.join("d_map.csv"), |w| export::write_d_map(w, &run.report.result, x.grid().points()))?;
        if let Some(cv) = &run.cv {
            write_file(&dir.join("cv.csv"), |w| export::write_cv(w, cv))?;
        }
        if a.dump_bootstrap {
            if let Some(dist) = &run.distribution {
                write_file(&dir.join("bootstrap.csv"), |w| export::write_bootstrap(w, dist))?;
            }
        }
        if a.dump_estimates {
            for (name, est) in [("estimate_x.json", &run.fx), ("estimate_y.json", &run.fy)] {
                let text = serde_json::to_string(&export::EstimateRecord::new(est)).expect("estimate serializes");
                write_file(&dir.join(name), |w| w.write_all(text.as_bytes()))?;
            }
        }
        let mut m = RunManifest::new("test", &a.argv());
        m.param("b", run.report.result.b)
            .param("b_source", format!("{:?}", run.report.b_source).to_lowercase())
            .param("B", a.replicates)
            .param("kernel", opts.kernel.name())
            .param("seed", a.seed)
            .param("grid", value_name(a.input.grid))
            .param("n_basis", n_basis.map_or("off".to_string(), |n| n.to_string()))
            .param("studentization", value_name(a.studentization))
            .param("calibration", value_name(a.calibration))
            .param("wrap_frequencies", a.estimation.wrap_frequencies);
        m.add_input(&a.input.x)?;
        m.add_input(&a.input.y)?;
        m.write(dir)?;
    }
    Ok(())
}

fn cmd_diagnose<W: Write>(a: &DiagnoseArgs, stdout: &mut W) -> CliResult<()> {
    let opts = analysis_options(&a.input, &a.estimation)?;
    let (x, y, n_basis) = pipeline::load_pair(&a.input.x, &a.input.y, &opts)?;
    let (result, source) = pipeline::diagnose(&x, &y, &opts)?;
    create_dir(&a.out)?;
    write_file(&a.out.join("q_profile.csv"), |w| export::write_q_profile(w, &result))?;
    write_file(&a.out.join("d_map.csv"), |w| export::write_d_map(w, &result, x.grid().points()))?;

    let mut argv = vec!["diagnose".to_string()];
    argv.extend(a.input.argv());
    argv.extend(a.estimation.argv());
    argv.extend(["--out".into(), absolute(&a.out)]);
    let mut m = RunManifest::new("diagnose", &argv);
    m.param("b", result.b)
        .param("b_source", format!("{source:?}").to_lowercase())
        .param("kernel", opts.kernel.name())
        .param("n_basis", n_basis.map_or("off".to_string(), |n| n.to_string()));
    m.add_input(&a.input.x)?;
    m.add_input(&a.input.y)?;
    m.write(&a.out)?;

    let summary = serde_json::json!({
        "b": result.b,
        "b_source": source,
        "t_stat": result.t_stat,
        "u_stat": result.u_stat,
        "theta0_hat": result.theta0_hat,
        "q_profile": a.out.join("q_profile.csv"),
        "d_map": a.out.join("d_map.csv"),
    });
    emit(stdout, &to_json(&summary))
}

fn cmd_cv<W: Write>(a: &CvArgs, stdout: &mut W) -> CliResult<()> {
    let kernel = experiment::parse_kernel(&a.kernel)?;
    let opts = AnalysisOptions { kernel, smoothing: Smoothing::from_flag(a.input.n_basis), csv: a.input.csv()?, ..Default::default() };
    let (x, y, n_basis) = pipeline::load_pair(&a.input.x, &a.input.y, &opts)?;
    let grid = match &a.b_grid {
        Some(g) => g.clone(),
        None => {
            if !(a.b_min > 0.0 && a.b_min <= a.b_max && a.b_points >= 1) {
                return Err(CliError::Usage("need 0 < b-min <= b-max and b-points >= 1".into()));
            }
            bandwidth::log_grid(a.b_min, a.b_max, a.b_points)
        }
    };
    let cv = bandwidth::select(&x, &y, &grid, &kernel)?;
    let json = to_json(&cv);
    emit(stdout, &json)?;
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_file(&dir.join("cv.csv"), |w| export::write_cv(w, &cv))?;
        write_file(&dir.join("cv.json"), |w| w.write_all(json.as_bytes()))?;
        let mut argv = vec!["cv".to_string()];
        argv.extend(a.input.argv());
        argv.extend(["--kernel".into(), a.kernel.clone()]);
        let list: Vec<String> = grid.iter().map(|b| b.to_string()).collect();
        argv.extend(["--b-grid".into(), list.join(","), "--out".into(), absolute(dir)]);
        let mut m = RunManifest::new("cv", &argv);
        m.param("b_cv", cv.b_cv)
            .param("grid_points", grid.len())
            .param("kernel", kernel.name())
            .param("n_basis", n_basis.map_or("off".to_string(), |n| n.to_string()));
        m.add_input(&a.input.x)?;
        m.add_input(&a.input.y)?;
        m.write(dir)?;
    }
    Ok(())
}

impl SimulateArgs {
    fn config(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            cfg.apply_file(&text)?;
        }
        if let Some(v) = &self.lens {
            cfg.lens = v.clone();
        }
        if let Some(v) = &self.a2 {
            cfg.a2 = v.clone();
        }
        if let Some(v) = &self.b {
            cfg.bandwidths = v.clone();
        }
        if let Some(v) = &self.alpha {
            cfg.alphas = v.clone();
        }
        if let Some(v) = self.repetitions {
            cfg.repetitions = v;
        }
        if let Some(v) = self.replicates {
            cfg.replicates = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(n) = self.n_basis {
            cfg.n_basis = (n > 0).then_some(n);
        }
        if let Some(k) = self.k {
            cfg.grid_points = k;
        }
        if let Some(g) = self.grid {
            cfg.grid_policy = g.into();
        }
        if let Some(s) = self.studentization {
            cfg.studentization = s.into();
        }
        if let Some(k) = &self.kernel {
            cfg.kernel = experiment::parse_kernel(k)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Fully resolved simulate invocation, independent of any config file.
fn simulate_argv(cfg: &ExperimentConfig, null_density: Option<usize>, out: Option<&Path>) -> Vec<String> {
    let mut v = vec![
        "simulate".to_string(),
        "--T".into(),
        join(&cfg.lens),
        "--a2".into(),
        join(&cfg.a2),
        "--b".into(),
        join(&cfg.bandwidths),
        "--alpha".into(),
        join(&cfg.alphas),
        "--R".into(),
        cfg.repetitions.to_string(),
        "--B".into(),
        cfg.replicates.to_string(),
        "--seed".into(),
        cfg.master_seed.to_string(),
        "--n-basis".into(),
        cfg.n_basis.unwrap_or(0).to_string(),
        "--k".into(),
        cfg.grid_points.to_string(),
        "--grid".into(),
        format!("{:?}", cfg.grid_policy).to_lowercase(),
        "--studentization".into(),
        format!("{:?}", cfg.studentization).to_lowercase(),
        "--kernel".into(),
        cfg.kernel.name().to_string(),
    ];
    if let Some(d) = null_density {
        v.extend(["--null-density".into(), d.to_string()]);
    }
    if let Some(out) = out {
        v.extend(["--out".into(), absolute(out)]);
    }
    v
}

fn cmd_simulate<W: Write>(a: &SimulateArgs, stdout: &mut W) -> CliResult<()> {
    let cfg = a.config()?;
    let pool = parallel::pool(a.workers)?;
    let argv = simulate_argv(&cfg, a.null_density, a.out.as_deref());
    let mut manifest = RunManifest::new("simulate", &argv);
    manifest
        .param("T", join(&cfg.lens))
        .param("a2", join(&cfg.a2))
        .param("b", join(&cfg.bandwidths))
        .param("alpha", join(&cfg.alphas))
        .param("R", cfg.repetitions)
        .param("B", cfg.replicates)
        .param("seed", cfg.master_seed)
        .param("n_basis", cfg.n_basis.map_or("off".to_string(), |n| n.to_string()))
        .param("k", cfg.grid_points)
        .param("kernel", cfg.kernel.name())
        .param("studentization", format!("{:?}", cfg.studentization).to_lowercase());
    if let Some(path) = &a.config {
        manifest.add_input(path)?;
    }

    if let Some(datasets) = a.null_density {
        let dir = a.out.as_ref().ok_or_else(|| CliError::Usage("--null-density needs --out".into()))?;
        let d = experiment::run_null_density(&cfg, datasets, &pool)?;
        create_dir(dir)?;
        write_file(&dir.join("exact.csv"), |w| experiment::write_exact(w, &d))?;
        write_file(&dir.join("bootstrap.csv"), |w| experiment::write_bootstrap_draws(w, &d))?;
        manifest.param("datasets", join(&d.datasets));
        manifest.write(dir)?;
        let summary = serde_json::json!({
            "T": d.len,
            "b": d.b,
            "exact_draws": d.exact.len(),
            "datasets": d.datasets,
            "bootstrap_draws": d.bootstrap.iter().map(|b| b.len()).sum::<usize>(),
        });
        return emit(stdout, &to_json(&summary));
    }

    let cells = experiment::run_table(&cfg, &pool)?;
    let mut table = Vec::new();
    experiment::write_table(&mut table, &cfg, &cells).expect("writing to memory");
    emit(stdout, std::str::from_utf8(&table).expect("ASCII table"))?;
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_file(&dir.join("rejection.csv"), |w| w.write_all(&table))?;
        write_file(&dir.join("p_values.csv"), |w| experiment::write_p_values(w, &cells))?;
        manifest.write(dir)?;
    }
    Ok(())
}

fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let cfg = ExperimentConfig {
        n_basis: (a.n_basis > 0).then_some(a.n_basis),
        grid_points: a.k,
        grid_policy: a.grid.into(),
        ..Default::default()
    };
    let (x, y) = cfg.model(a.a2, a.len).gen_pair_seeded(a.seed, a.rep)?;
    create_dir(&a.out)?;
    io::write_csv_file(&a.out.join("x.csv"), &x)?;
    io::write_csv_file(&a.out.join("y.csv"), &y)
}

fn cmd_replay<W: Write>(a: &ReplayArgs, stdout: &mut W) -> CliResult<()> {
    let m = RunManifest::read(&a.manifest)?;
    if m.tool != env!("CARGO_PKG_NAME") {
        return Err(CliError::Usage(format!("{} was not written by this tool", a.manifest.display())));
    }
    if m.version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest written by version {}, running {}", m.version, env!("CARGO_PKG_VERSION"));
    }
    m.verify_inputs()?;
    let mut argv = m.argv.clone();
    if let Some(out) = &a.out {
        argv.extend(["--out".into(), absolute(out)]);
    }
    run(&argv, stdout)
}

/// Location of the manifest for a run directory.
pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join(MANIFEST_FILE)
}
