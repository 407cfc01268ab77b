use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use moneta_core::cointegration::johansen_test;
use moneta_core::dynamics::{fevd, impulse_response};
use moneta_core::fixture::{synthetic_quarterly, FIXTURE_LEN, FIXTURE_SEED};
use moneta_core::multiplier::{sign_region, sign_region_csv, DeltaScenario, MultiplierParams};
use moneta_core::pipeline::{multiplier_report, run_pipeline, PipelineConfig};
use moneta_core::regression::static_regression;
use moneta_core::report::{self, Rendered};
use moneta_core::series::{difference, read_frame, seasonal_adjust, SeriesFrame};
use moneta_core::unit_root::{adf_test, DetSpec, LagChoice};
use moneta_core::var::lag_order_table;
use moneta_core::vecm::{fit_vecm, stability_check};
use moneta_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "moneta",
    version,
    about = "Money-multiplier time-series analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full workflow from a config file and write a report bundle.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Extra or replacement group, `name=col1,col2,...`.
        #[arg(long = "group", value_name = "NAME=COLS")]
        groups: Vec<String>,
    },
    /// Augmented Dickey-Fuller test on one column.
    Adf {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        column: String,
        /// nc, c or ct.
        #[arg(long, default_value = "c")]
        spec: DetSpec,
        /// Fixed augmentation lags; otherwise chosen by SC up to --adf-max-lag.
        #[arg(long)]
        lags: Option<usize>,
        #[arg(long, default_value_t = 0)]
        diff: usize,
    },
    /// VAR lag-order selection table.
    Lagselect {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Johansen trace and maximum-eigenvalue tests.
    Johansen {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Fit a VECM and print the error-correction equations.
    Vecm {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Orthogonalized impulse responses as CSV.
    Irf {
        #[command(flatten)]
        data: DataArgs,
        /// Cholesky ordering; defaults to the column order.
        #[arg(long, value_delimiter = ',')]
        ordering: Vec<String>,
    },
    /// Forecast-error variance decomposition.
    Fevd {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',')]
        ordering: Vec<String>,
    },
    /// Static OLS of the first column on the others.
    Regress {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Multiplier levels, sensitivities and scenario effects.
    Multiplier {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        t: f64,
        /// `name:dk,dr,dt`; repeatable.
        #[arg(long = "scenario", value_name = "NAME:DK,DR,DT")]
        scenarios: Vec<String>,
        /// Write the sign map of dm1/dk over an (r, t) grid to this CSV.
        #[arg(long)]
        sign_grid: Option<PathBuf>,
    },
    /// Write the seeded synthetic quarterly dataset.
    Genfixture {
        #[arg(long, default_value = "synthetic_quarterly.csv")]
        output: PathBuf,
        #[arg(long, default_value_t = FIXTURE_SEED)]
        seed: u64,
        #[arg(long, default_value_t = FIXTURE_LEN)]
        len: usize,
    },
}

/// Flags that mirror config keys.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    det_case: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    var_lag: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seasonal_adjust: Option<bool>,
    #[arg(long)]
    adf_max_lag: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut PipelineConfig) -> Result<()> {
        let here = Path::new("");
        let mut set = |k: &str, v: Option<String>| match v {
            Some(v) => cfg.set(k, &v, here),
            None => Ok(()),
        };
        set("data", self.data.as_ref().map(|p| p.display().to_string()))?;
        set(
            "output",
            self.output.as_ref().map(|p| p.display().to_string()),
        )?;
        set("max_lag", self.max_lag.map(|v| v.to_string()))?;
        set("det_case", self.det_case.clone())?;
        set("rank", self.rank.map(|v| v.to_string()))?;
        set("var_lag", self.var_lag.map(|v| v.to_string()))?;
        set("horizon", self.horizon.map(|v| v.to_string()))?;
        set(
            "seasonal_adjust",
            self.seasonal_adjust.map(|v| v.to_string()),
        )?;
        set("adf_max_lag", self.adf_max_lag.map(|v| v.to_string()))?;
        Ok(())
    }
}

/// Data selection shared by the single-step subcommands.
#[derive(Args)]
struct DataArgs {
    /// Optional config supplying defaults for the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group from the config to analyze; the first group by default.
    #[arg(long)]
    group: Option<String>,
    /// Columns to analyze; overrides --group.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Print CSV instead of aligned text.
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    overrides: Overrides,
}

struct Prepared {
    cfg: PipelineConfig,
    frame: SeriesFrame,
    csv: bool,
}

impl DataArgs {
    fn prepare(&self) -> Result<Prepared> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig {
                seasonal_adjust: false,
                ..Default::default()
            },
        };
        self.overrides.apply(&mut cfg)?;
        if cfg.data.as_os_str().is_empty() {
            return Err(Error::Config(
                "no data file: pass --data or --config".into(),
            ));
        }
        let cols: Vec<String> = if !self.columns.is_empty() {
            self.columns.clone()
        } else {
            let group = match &self.group {
                Some(g) => cfg
                    .groups
                    .iter()
                    .find(|(name, _)| name == g)
                    .ok_or_else(|| Error::Config(format!("no group `{g}` in config")))?,
                None => cfg.groups.first().ok_or_else(|| {
                    Error::Config("pass --columns, or --config with a group".into())
                })?,
            };
            group.1.clone()
        };
        if !cfg.data.exists() {
            return Err(Error::FileNotFound(cfg.data.clone()));
        }
        let mut frame = read_frame(&cfg.data)?.select(&cols)?;
        if cfg.seasonal_adjust {
            frame = frame.map_columns(seasonal_adjust)?;
        }
        Ok(Prepared {
            cfg,
            frame,
            csv: self.csv,
        })
    }
}

impl Prepared {
    fn emit(&self, r: &Rendered) {
        print!("{}", if self.csv { &r.csv } else { &r.text });
    }

    fn var_lag(&self) -> Result<usize> {
        match self.cfg.var_lag {
            Some(p) => Ok(p),
            None => Ok(lag_order_table(&self.frame, self.cfg.max_lag, true)?
                .selected
                .aic
                .max(1)),
        }
    }

    fn rank(&self, p: usize) -> Result<usize> {
        match self.cfg.rank {
            Some(r) => Ok(r),
            None => Ok(johansen_test(&self.frame, p, self.cfg.det_case)?.selected_rank),
        }
    }

    fn ordering(&self, given: &[String]) -> Vec<String> {
        if given.is_empty() {
            return self.frame.names().iter().map(|s| s.to_string()).collect();
        }
        let suffix = if self.cfg.seasonal_adjust { "_sa" } else { "" };
        given.iter().map(|g| format!("{g}{suffix}")).collect()
    }
}

fn parse_scenario(s: &str) -> Result<(String, DeltaScenario)> {
    let bad = || Error::Config(format!("scenario `{s}`: expected NAME:DK,DR,DT"));
    let (name, rest) = s.split_once(':').ok_or_else(bad)?;
    let v: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    match v[..] {
        [dk, dr, dt] => Ok((name.to_string(), DeltaScenario::new(dk, dr, dt))),
        _ => Err(bad()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            config,
            overrides,
            groups,
        } => {
            let mut cfg = PipelineConfig::from_file(&config)?;
            overrides.apply(&mut cfg)?;
            for g in &groups {
                let (name, cols) = g
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("--group `{g}`: expected NAME=COLS")))?;
                cfg.set(&format!("group.{}", name.trim()), cols, Path::new(""))?;
            }
            let bundle = run_pipeline(&cfg)?;
            println!(
                "wrote {} sections to {} (config_hash {})",
                bundle.sections.len(),
                cfg.output.display(),
                bundle.config_hash
            );
        }
        Command::Adf {
            data,
            column,
            spec,
            lags,
            diff,
        } => {
            let mut data = data;
            data.columns = vec![column];
            let prep = data.prepare()?;
            let series = &prep.frame.columns()[0];
            let series = if diff > 0 {
                difference(series, diff)?
            } else {
                series.clone()
            };
            let choice = match lags {
                Some(l) => LagChoice::Fixed(l),
                None => LagChoice::Auto {
                    max_lag: prep.cfg.adf_max_lag,
                },
            };
            let r = adf_test(&series, spec, choice)?;
            prep.emit(&report::adf_table(&[(series.name().to_string(), r)]));
        }
        Command::Lagselect { data } => {
            let prep = data.prepare()?;
            let t = lag_order_table(&prep.frame, prep.cfg.max_lag, true)?;
            prep.emit(&report::lag_table(&t));
        }
        Command::Johansen { data } => {
            let prep = data.prepare()?;
            let p = prep.var_lag()?;
            let j = johansen_test(&prep.frame, p, prep.cfg.det_case)?;
            prep.emit(&report::johansen_table(&j));
        }
        Command::Vecm { data } => {
            let prep = data.prepare()?;
            let p = prep.var_lag()?;
            let m = fit_vecm(&prep.frame, p, prep.rank(p)?, prep.cfg.det_case)?;
            if prep.csv {
                print!("{}", report::vecm_csv(&m));
            } else {
                print!("{}", report::ecm_text(&m));
                let s = stability_check(&m)?;
                println!(
                    "companion roots: {} unit root(s), expected {}; {}",
                    s.unit_root_count,
                    s.expected_unit_roots,
                    if s.stable { "stable" } else { "NOT stable" }
                );
            }
        }
        Command::Irf { data, ordering } => {
            let prep = data.prepare()?;
            let p = prep.var_lag()?;
            let m = fit_vecm(&prep.frame, p, prep.rank(p)?, prep.cfg.det_case)?;
            let irf = impulse_response(&m, prep.cfg.horizon, &prep.ordering(&ordering))?;
            print!("{}", irf.to_csv());
        }
        Command::Fevd { data, ordering } => {
            let prep = data.prepare()?;
            let p = prep.var_lag()?;
            let m = fit_vecm(&prep.frame, p, prep.rank(p)?, prep.cfg.det_case)?;
            let f = fevd(&m, prep.cfg.horizon, &prep.ordering(&ordering))?;
            prep.emit(&report::fevd_tables(&f));
        }
        Command::Regress { data } => {
            let prep = data.prepare()?;
            let names: Vec<String> = prep.frame.names().iter().map(|s| s.to_string()).collect();
            let r = static_regression(&prep.frame, &names[0], &names[1..])?;
            prep.emit(&report::regression_table(&r));
        }
        Command::Multiplier {
            k,
            r,
            t,
            scenarios,
            sign_grid,
        } => {
            let params = MultiplierParams::new(k, r, t)?;
            let scenarios = scenarios
                .iter()
                .map(|s| parse_scenario(s))
                .collect::<Result<Vec<_>>>()?;
            print!("{}", multiplier_report(&params, &scenarios)?.to_text());
            if let Some(path) = sign_grid {
                let r_grid: Vec<f64> = (1..=99).map(|i| i as f64 / 100.0).collect();
                let t_grid: Vec<f64> = (0..=100).map(|i| i as f64 / 10.0).collect();
                fs::write(&path, sign_region_csv(&sign_region(&r_grid, &t_grid)?))?;
            }
        }
        Command::Genfixture { output, seed, len } => {
            synthetic_quarterly(seed, len)?.write_file(&output)?;
            println!("wrote {len} quarters to {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
