use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use wavspec::config::{DescentName, EstimatorName, ModelSpec, RunConfig};
use wavspec::run::{load_series, run_estimate, OutputOptions};
use wavspec::{io, studies};

const EXIT_INVALID: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "wavspec", version, about = "Positive wavelet spectral density estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a series and write it as single-column CSV.
    Simulate(Common),
    /// Run one estimation and write CSV artifacts plus report.json.
    Estimate(Common),
    /// Exceedance frequencies of one empirical coefficient against the deviation bound.
    DeviationStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        x: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        /// Detail level (default: j0).
        #[arg(long)]
        level: Option<u32>,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Median KL divergence against sample size, with a log-log slope.
    RateStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048,4096")]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
    },
    /// Wavelet estimate against the oracle-dimension histogram over several seeds.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelName {
    Benchmark,
    WhiteNoise,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration; flags given explicitly override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelName>,
    /// Variance of the white-noise model.
    #[arg(long, default_value_t = 1.0)]
    variance: f64,
    /// Single-column CSV series used instead of simulating.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    estimator: Option<EstimatorName>,
    /// Smoothness for the linear estimator.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    grid_j: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    descent: Option<DescentName>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV files.
    #[arg(long)]
    gnuplot: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        match self.model {
            Some(ModelName::Benchmark) => cfg.model = ModelSpec::Benchmark,
            Some(ModelName::WhiteNoise) => cfg.model = ModelSpec::WhiteNoise { variance: self.variance },
            None => {}
        }
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        set!(
            n => cfg.n,
            seed => cfg.seed,
            estimator => cfg.estimator,
            s => cfg.smoothness,
            filter => cfg.filter,
            delta => cfg.delta,
            b => cfg.b,
            kappa => cfg.kappa,
            r => cfg.r,
            eta => cfg.eta,
            tol => cfg.solver.tol,
            max_iters => cfg.solver.max_iters,
            descent => cfg.solver.descent,
            out => cfg.out,
        );
        if self.input.is_some() {
            cfg.input = self.input.clone();
        }
        if self.grid_j.is_some() {
            cfg.grid_j = self.grid_j;
        }
        cfg.estimator_config()?;
        Ok(cfg)
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn gnuplot(dir: &Path, body: &str) -> Result<()> {
    let head = "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 1000,600\n";
    std::fs::write(dir.join("plot.gp"), format!("{head}{body}\n"))?;
    Ok(())
}

fn execute(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Simulate(common) => {
            let cfg = common.resolve()?;
            let series = load_series(&cfg)?;
            prepare_out(&cfg.out)?;
            let path = cfg.out.join("series.csv");
            io::write_series(&path, &series)?;
            println!("wrote {} samples to {}", series.len(), path.display());
            Ok(0)
        }
        Command::Estimate(common) => {
            let cfg = common.resolve()?;
            let report = run_estimate(&cfg, OutputOptions { gnuplot: common.gnuplot })?;
            println!(
                "{}: n={} levels={:?} min={:.4e} max={:.4e} psd={} converged={}",
                report.estimator,
                report.n,
                report.levels.as_ref().map(|l| (l.j0, l.j1)),
                report.estimate.min,
                report.estimate.max,
                report.covariance.psd,
                report.converged()
            );
            if let (Some(kl), Some(l2)) = (report.metrics.kl, report.metrics.l2) {
                println!("kl={kl:.5} l2={l2:.5}");
            }
            println!("artifacts in {}", cfg.out.display());
            Ok(if report.converged() { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::DeviationStudy { common, x, reps, level, k } => {
            let cfg = common.resolve()?;
            let study = studies::run_deviation_study(&cfg.model.params()?, cfg.n, cfg.seed, &x, reps, level, k)?;
            prepare_out(&cfg.out)?;
            io::write_rows(&cfg.out.join("deviation.csv"), &study.rows)?;
            io::write_json(&cfg.out.join("deviation.json"), &study)?;
            if common.gnuplot {
                gnuplot(
                    &cfg.out,
                    "set output 'deviation.png'\nset xlabel 'x'\nset logscale y\n\
                     plot 'deviation.csv' using 1:4 with linespoints title 'empirical', \
                     '' using 1:5 with lines title '2 exp(-x)'",
                )?;
            }
            for r in &study.rows {
                println!("x={:<5} empirical={:.4} bound={:.4}", r.x, r.empirical, r.bound);
            }
            Ok(0)
        }
        Command::RateStudy { common, n_values, reps } => {
            let cfg = common.resolve()?;
            let study = studies::run_rate_study(&cfg.model.params()?, &cfg.estimator_config()?, &n_values, reps, cfg.seed)?;
            prepare_out(&cfg.out)?;
            io::write_rows(&cfg.out.join("rate.csv"), &study.rows)?;
            io::write_json(&cfg.out.join("rate.json"), &study)?;
            if common.gnuplot {
                gnuplot(
                    &cfg.out,
                    "set output 'rate.png'\nset logscale xy\nset xlabel 'n'\n\
                     plot 'rate.csv' using 1:4 with linespoints title 'median KL'",
                )?;
            }
            for r in &study.rows {
                println!("n={:<6} median_kl={:.5} iqr={:.5}", r.n, r.median_kl, r.iqr);
            }
            println!("log-log slope {:.3}", study.log_log_slope);
            let failed: usize = study.rows.iter().map(|r| r.non_converged).sum();
            Ok(if failed == 0 { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::Compare { common, seeds } => {
            let cfg = common.resolve()?;
            let study = studies::run_compare(&cfg.model.params()?, &cfg.estimator_config()?, cfg.n, seeds, cfg.seed)?;
            prepare_out(&cfg.out)?;
            io::write_rows(&cfg.out.join("compare.csv"), &study.rows)?;
            io::write_json(&cfg.out.join("compare.json"), &study)?;
            if common.gnuplot {
                gnuplot(
                    &cfg.out,
                    "set output 'compare.png'\nset xlabel 'replication'\nset ylabel 'L2 error'\n\
                     plot 'compare.csv' using 0:2 with points title 'wavelet', \
                     '' using 0:7 with points title 'histogram (oracle m)'",
                )?;
            }
            println!(
                "peaks captured: wavelet {}/{seeds}, histogram {}/{seeds}",
                study.wavelet_peak_captures, study.histogram_peak_captures
            );
            println!(
                "median L2: wavelet {:.5}, histogram {:.5}",
                study.wavelet_median_l2, study.histogram_median_l2
            );
            let failed = study.rows.iter().filter(|r| !r.wavelet_converged).count();
            Ok(if failed == 0 { 0 } else { EXIT_NOT_CONVERGED })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
