//! Configuration and orchestration of the full analysis, and the report
//! bundle it writes.
//!
//! Config files are flat `key = value` text with `#` comments:
//!
//! ```text
//! data = synthetic_quarterly.csv
//! group.narrow = m1,MDI,k,t,e
//! group.broad = m2,MDI,k,t,e
//! max_lag = 4
//! det_case = unrestricted_constant
//! horizon = 20
//! ```
//!
//! Relative `data` and `output` paths are resolved against the config
//! file's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::cointegration::{johansen_test, DetCase};
use crate::dynamics::{fevd, impulse_response};
use crate::error::{Error, Result};
use crate::multiplier::{
    delta_estimate, gradient, multipliers, DeltaEstimate, DeltaScenario, MultiplierParams,
};
use crate::regression::static_regression;
use crate::report::{self, Rendered};
use crate::series::{difference, read_frame, seasonal_adjust, seasonal_factors, SeriesFrame};
use crate::unit_root::{adf_test, DetSpec, LagChoice};
use crate::var::lag_order_table;
use crate::vecm::{companion_eigenvalues, fit_vecm, stability_check};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub data: PathBuf,
    /// `(name, columns)` in file order.
    pub groups: Vec<(String, Vec<String>)>,
    pub max_lag: usize,
    pub det_case: DetCase,
    pub rank: Option<usize>,
    /// Lag order of the levels VAR; chosen by AIC when absent.
    pub var_lag: Option<usize>,
    pub horizon: usize,
    pub seasonal_adjust: bool,
    pub output: PathBuf,
    pub adf_max_lag: usize,
    pub adf_levels: DetSpec,
    pub adf_diffs: DetSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            data: PathBuf::new(),
            groups: Vec::new(),
            max_lag: 4,
            det_case: DetCase::UnrestrictedConstant,
            rank: None,
            var_lag: None,
            horizon: 20,
            seasonal_adjust: true,
            output: PathBuf::from("bundle"),
            adf_max_lag: 8,
            adf_levels: DetSpec::CONSTANT,
            adf_diffs: DetSpec::NONE,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::Config(format!(
            "`{key}` expects a non-negative integer, got `{value}`"
        ))
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "`{key}` expects true or false, got `{value}`"
        ))),
    }
}

impl PipelineConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key `{key}`",
                    n + 1
                )));
            }
            cfg.set(key, value.trim(), base_dir)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::FileNotFound(path.to_path_buf()));
        }
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
    }

    /// Set one key, replacing any earlier value. Relative paths are joined
    /// onto `base_dir`.
    pub fn set(&mut self, key: &str, value: &str, base_dir: &Path) -> Result<()> {
        match key {
            "data" => self.data = base_dir.join(value),
            "output" => self.output = base_dir.join(value),
            "max_lag" => self.max_lag = parse_num(key, value)?,
            "det_case" => self.det_case = value.parse()?,
            "rank" => self.rank = Some(parse_num(key, value)?),
            "var_lag" => self.var_lag = Some(parse_num(key, value)?),
            "horizon" => self.horizon = parse_num(key, value)?,
            "seasonal_adjust" => self.seasonal_adjust = parse_bool(key, value)?,
            "adf_max_lag" => self.adf_max_lag = parse_num(key, value)?,
            "adf_levels" => self.adf_levels = value.parse()?,
            "adf_diffs" => self.adf_diffs = value.parse()?,
            k if k.starts_with("group.") => {
                let name = &k["group.".len()..];
                if name.is_empty() || name.contains(['/', '\\']) {
                    return Err(Error::Config(format!("invalid group name `{name}`")));
                }
                let cols: Vec<String> = value
                    .split(',')
                    .map(|c| c.trim().to_string())
                    .filter(|c| !c.is_empty())
                    .collect();
                match self.groups.iter_mut().find(|(g, _)| g == name) {
                    Some(g) => g.1 = cols,
                    None => self.groups.push((name.to_string(), cols)),
                }
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.data.as_os_str().is_empty() {
            return Err(Error::Config("missing `data`".into()));
        }
        if self.groups.is_empty() {
            return Err(Error::Config("no `group.<name>` entries".into()));
        }
        for (name, cols) in &self.groups {
            if cols.len() < 2 {
                return Err(Error::Config(format!(
                    "group `{name}` needs at least two columns"
                )));
            }
            for (i, c) in cols.iter().enumerate() {
                if cols[..i].contains(c) {
                    return Err(Error::Config(format!(
                        "group `{name}` repeats column `{c}`"
                    )));
                }
            }
        }
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.max_lag < 1 {
            return Err(Error::Config("max_lag must be >= 1".into()));
        }
        if self.var_lag == Some(0) {
            return Err(Error::Config("var_lag must be >= 1".into()));
        }
        Ok(())
    }

    /// Effective settings as sorted `(key, value)` pairs, defaults included
    /// and `output` excluded.
    pub fn canonical_entries(&self) -> Vec<(String, String)> {
        let spec = |d: DetSpec| match (d.constant(), d.trend()) {
            (true, true) => "ct",
            (true, false) => "c",
            _ => "nc",
        };
        let opt = |v: Option<usize>| v.map_or_else(|| "auto".to_string(), |v| v.to_string());
        let mut out = vec![
            ("adf_diffs".to_string(), spec(self.adf_diffs).to_string()),
            ("adf_levels".to_string(), spec(self.adf_levels).to_string()),
            ("adf_max_lag".to_string(), self.adf_max_lag.to_string()),
            ("data".to_string(), self.data.display().to_string()),
            ("det_case".to_string(), self.det_case.as_str().to_string()),
            ("horizon".to_string(), self.horizon.to_string()),
            ("max_lag".to_string(), self.max_lag.to_string()),
            ("rank".to_string(), opt(self.rank)),
            (
                "seasonal_adjust".to_string(),
                self.seasonal_adjust.to_string(),
            ),
            ("var_lag".to_string(), opt(self.var_lag)),
        ];
        out.extend(
            self.groups
                .iter()
                .map(|(g, cols)| (format!("group.{g}"), cols.join(","))),
        );
        out.sort();
        out
    }

    /// SHA-256 of [`Self::canonical_entries`] written as `key = value` lines.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical_entries() {
            h.update(format!("{k} = {v}\n"));
        }
        hex::encode(h.finalize())
    }

    /// Union of all group columns in first-appearance order.
    pub fn all_columns(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, cols) in &self.groups {
            for c in cols {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectionStatus {
    Ok,
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFile {
    /// Path relative to the bundle directory.
    pub path: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub group: Option<String>,
    pub name: &'static str,
    pub status: SectionStatus,
    pub files: Vec<ReportFile>,
}

impl Section {
    fn stage(&self) -> String {
        match &self.group {
            Some(g) => format!("{g}/{}", self.name),
            None => self.name.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub config_hash: String,
    pub data_sha256: String,
    pub sections: Vec<Section>,
}

pub const GLOBAL_STAGES: [&str; 4] = ["load", "seasonal_adjust", "descriptive", "adf"];
pub const GROUP_STAGES: [&str; 7] = [
    "lag_selection",
    "johansen",
    "vecm",
    "stability",
    "irf",
    "fevd",
    "regression",
];

impl ReportBundle {
    pub fn section(&self, group: Option<&str>, name: &str) -> Option<&Section> {
        self.sections
            .iter()
            .find(|s| s.group.as_deref() == group && s.name == name)
    }

    pub fn is_complete(&self) -> bool {
        self.sections
            .iter()
            .all(|s| !matches!(s.status, SectionStatus::Failed(_)))
    }

    pub fn manifest(&self) -> String {
        let mut out = format!(
            "# config_hash: {}\ndata_sha256 = {}\n",
            self.config_hash, self.data_sha256
        );
        for s in &self.sections {
            let status = match &s.status {
                SectionStatus::Ok => "ok".to_string(),
                SectionStatus::Skipped(r) => format!("skipped: {r}"),
                SectionStatus::Failed(e) => format!("FAILED: {e}"),
            };
            let files: Vec<&str> = s.files.iter().map(|f| f.path.as_str()).collect();
            out.push_str(&format!("{} : {status}", s.stage()));
            if !files.is_empty() {
                out.push_str(&format!(" [{}]", files.join(", ")));
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for s in &self.sections {
            for f in &s.files {
                let path = dir.join(&f.path);
                if let Some(parent) = path.parent() {
                    fs::create_dir_all(parent)?;
                }
                fs::write(path, &f.contents)?;
            }
        }
        fs::write(dir.join("manifest.txt"), self.manifest())?;
        Ok(())
    }
}

struct SectionBuilder<'a> {
    hash: &'a str,
    group: Option<String>,
    sections: Vec<Section>,
    error: Option<Error>,
}

impl<'a> SectionBuilder<'a> {
    fn new(hash: &'a str, group: Option<String>) -> Self {
        Self {
            hash,
            group,
            sections: Vec::new(),
            error: None,
        }
    }

    fn file(&self, name: &str, body: &str) -> ReportFile {
        let path = match &self.group {
            Some(g) => format!("{g}/{name}"),
            None => name.to_string(),
        };
        ReportFile {
            path,
            contents: format!("# config_hash: {}\n{body}", self.hash),
        }
    }

    fn rendered(&self, stem: &str, r: &Rendered) -> Vec<ReportFile> {
        vec![
            self.file(&format!("{stem}.txt"), &r.text),
            self.file(&format!("{stem}.csv"), &r.csv),
        ]
    }

    /// Run a stage unless an earlier one failed; `f` returns the stage value
    /// and its files.
    fn run<T>(
        &mut self,
        name: &'static str,
        f: impl FnOnce(&Self) -> Result<(T, Vec<ReportFile>)>,
    ) -> Option<T> {
        if let Some(e) = &self.error {
            let stage = match e {
                Error::Stage { stage, .. } => stage.clone(),
                _ => String::new(),
            };
            self.skip(name, format!("stage `{stage}` failed"));
            return None;
        }
        let mut section = Section {
            group: self.group.clone(),
            name,
            status: SectionStatus::Ok,
            files: Vec::new(),
        };
        match f(self) {
            Ok((value, files)) => {
                section.files = files;
                self.sections.push(section);
                Some(value)
            }
            Err(e) => {
                let e = e.at_stage(section.stage());
                section.status = SectionStatus::Failed(e.root().to_string());
                self.sections.push(section);
                self.error = Some(e);
                None
            }
        }
    }

    fn skip(&mut self, name: &'static str, reason: String) {
        self.sections.push(Section {
            group: self.group.clone(),
            name,
            status: SectionStatus::Skipped(reason),
            files: Vec::new(),
        });
    }
}

/// Build the whole bundle in memory. The error, if any, is the first failed
/// stage; the bundle then holds everything that completed.
pub fn build_bundle(config: &PipelineConfig) -> (ReportBundle, Option<Error>) {
    let hash = config.hash();
    let mut data_sha256 = String::new();
    let mut sb = SectionBuilder::new(&hash, None);

    let loaded = sb.run("load", |_| {
        let bytes = fs::read(&config.data).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(config.data.clone()),
            _ => Error::Io(e),
        })?;
        data_sha256 = hex::encode(Sha256::digest(&bytes));
        let frame = read_frame(&config.data)?.select(&config.all_columns())?;
        Ok((frame, vec![]))
    });
    let adjusted = loaded.and_then(|frame| {
        if config.seasonal_adjust {
            sb.run("seasonal_adjust", |sb| {
                let adj = frame.map_columns(seasonal_adjust)?;
                let factors = frame
                    .columns()
                    .iter()
                    .map(|c| Ok((c.name().to_string(), seasonal_factors(c)?)))
                    .collect::<Result<Vec<_>>>()?;
                let mut buf = Vec::new();
                adj.write_csv(&mut buf)?;
                let body = String::from_utf8(buf).expect("csv output is utf-8");
                let mut files = vec![sb.file("adjusted.csv", &body)];
                files.extend(sb.rendered("seasonal_factors", &report::seasonal_factors(&factors)));
                Ok((adj, files))
            })
        } else {
            sb.skip("seasonal_adjust", "disabled in config".into());
            Some(frame)
        }
    });
    let suffix = if config.seasonal_adjust { "_sa" } else { "" };

    if let Some(frame) = &adjusted {
        sb.run("descriptive", |sb| {
            Ok((
                (),
                sb.rendered("descriptive", &report::descriptive_stats(frame)),
            ))
        });
        sb.run("adf", |sb| {
            let lags = LagChoice::Auto {
                max_lag: config.adf_max_lag,
            };
            let mut rows = Vec::new();
            for col in frame.columns() {
                rows.push((
                    col.name().to_string(),
                    adf_test(col, config.adf_levels, lags)?,
                ));
                let d = difference(col, 1)?;
                rows.push((d.name().to_string(), adf_test(&d, config.adf_diffs, lags)?));
            }
            Ok(((), sb.rendered("adf", &report::adf_table(&rows))))
        });
    } else {
        for name in &GLOBAL_STAGES[2..] {
            sb.run(name, |_| Ok(((), vec![])));
        }
    }
    let mut sections = sb.sections;
    let mut first_error = sb.error;

    let group_results: Vec<(Vec<Section>, Option<Error>)> = match &adjusted {
        Some(frame) => std::thread::scope(|s| {
            let handles: Vec<_> = config
                .groups
                .iter()
                .map(|(name, cols)| {
                    let hash = &hash;
                    s.spawn(move || run_group(config, hash, frame, name, cols, suffix))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("group worker panicked"))
                .collect()
        }),
        None => config
            .groups
            .iter()
            .map(|(name, _)| {
                let mut gb = SectionBuilder::new(&hash, Some(name.clone()));
                for stage in GROUP_STAGES {
                    gb.skip(stage, "data not loaded".into());
                }
                (gb.sections, None)
            })
            .collect(),
    };
    for (secs, err) in group_results {
        sections.extend(secs);
        if first_error.is_none() {
            first_error = err;
        }
    }
    (
        ReportBundle {
            config_hash: hash,
            data_sha256,
            sections,
        },
        first_error,
    )
}

fn run_group(
    config: &PipelineConfig,
    hash: &str,
    frame: &SeriesFrame,
    group: &str,
    cols: &[String],
    suffix: &str,
) -> (Vec<Section>, Option<Error>) {
    let mut gb = SectionBuilder::new(hash, Some(group.to_string()));
    let names: Vec<String> = cols.iter().map(|c| format!("{c}{suffix}")).collect();
    let frame = match frame.select(&names) {
        Ok(f) => f,
        Err(e) => {
            gb.run("lag_selection", |_| -> Result<((), _)> { Err(e) });
            for stage in &GROUP_STAGES[1..] {
                gb.run(stage, |_| Ok(((), vec![])));
            }
            return (gb.sections, gb.error);
        }
    };
    let frame = &frame;

    let p = gb.run("lag_selection", |gb| {
        let table = lag_order_table(frame, config.max_lag, true)?;
        let p = config.var_lag.unwrap_or(table.selected.aic.max(1));
        Ok((p, gb.rendered("lag_selection", &report::lag_table(&table))))
    });
    let rank = p.and_then(|p| {
        gb.run("johansen", |gb| {
            let j = johansen_test(frame, p, config.det_case)?;
            let rank = config.rank.unwrap_or(j.selected_rank);
            Ok((
                (p, rank),
                gb.rendered("johansen", &report::johansen_table(&j)),
            ))
        })
    });
    let model = rank.and_then(|(p, rank)| {
        gb.run("vecm", |gb| {
            let m = fit_vecm(frame, p, rank, config.det_case)?;
            let files = vec![
                gb.file("ecm.txt", &report::ecm_text(&m)),
                gb.file("vecm.csv", &report::vecm_csv(&m)),
            ];
            Ok((m, files))
        })
    });
    let model = model.as_ref();
    gb.run("stability", |gb| {
        let m = model.expect("vecm stage succeeded");
        let rep = stability_check(m)?;
        let roots = companion_eigenvalues(m)?;
        let r = report::stability(&rep, &roots);
        Ok((
            (),
            vec![
                gb.file("stability.txt", &r.text),
                gb.file("roots.csv", &r.csv),
            ],
        ))
    });
    gb.run("irf", |gb| {
        let m = model.expect("vecm stage succeeded");
        let irf = impulse_response(m, config.horizon, &m.column_names)?;
        Ok(((), vec![gb.file("irf.csv", &report::irf_csv(&irf))]))
    });
    gb.run("fevd", |gb| {
        let m = model.expect("vecm stage succeeded");
        let f = fevd(m, config.horizon, &m.column_names)?;
        Ok(((), gb.rendered("fevd", &report::fevd_tables(&f))))
    });
    gb.run("regression", |gb| {
        let r = static_regression(frame, &names[0], &names[1..])?;
        Ok(((), gb.rendered("regression", &report::regression_table(&r))))
    });
    (gb.sections, gb.error)
}

/// Run every stage and write the bundle to `config.output`. On failure the
/// partial bundle is still written, and the first failed stage is returned.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle> {
    config.validate()?;
    let (bundle, error) = build_bundle(config);
    bundle.write(&config.output)?;
    match error {
        Some(e) => Err(e),
        None => Ok(bundle),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    pub params: MultiplierParams,
    pub scenarios: Vec<(String, DeltaEstimate)>,
}

impl MultiplierReport {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        format!(
            "k = {}, r = {}, t = {}\n{}",
            p.k(),
            p.r(),
            p.t(),
            report::multiplier_text(&multipliers(p), &gradient(p), &self.scenarios)
        )
    }
}

/// Levels, sensitivities and per-scenario effects at `params`.
pub fn multiplier_report(
    params: &MultiplierParams,
    scenarios: &[(String, DeltaScenario)],
) -> Result<MultiplierReport> {
    let scenarios = scenarios
        .iter()
        .map(|(name, s)| {
            delta_estimate(params, s)
                .map(|d| (name.clone(), d))
                .map_err(|e| Error::InvalidParams(format!("scenario `{name}`: {}", e.root())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiplierReport {
        params: *params,
        scenarios,
    })
}
