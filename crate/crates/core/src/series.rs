//! Quarterly time-series containers, CSV ingestion, seasonal adjustment and
//! construction of the monetary ratios used by the models.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A calendar quarter. Orders lexicographically by (year, quarter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeriodIndex {
    year: i32,
    quarter: u8,
}

impl PeriodIndex {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidPeriod(format!("{year}Q{quarter}")));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn quarter(&self) -> u8 {
        self.quarter
    }

    /// The period `n` quarters later.
    pub fn advance(&self, n: usize) -> Self {
        let idx = self.year as i64 * 4 + (self.quarter as i64 - 1) + n as i64;
        Self {
            year: idx.div_euclid(4) as i32,
            quarter: (idx.rem_euclid(4) + 1) as u8,
        }
    }

    /// The immediately following quarter.
    pub fn next(&self) -> Self {
        self.advance(1)
    }
}

impl fmt::Display for PeriodIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for PeriodIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPeriod(s.to_string());
        let (year, quarter) = s.trim().split_once(['Q', 'q']).ok_or_else(bad)?;
        let year: i32 = year.parse().map_err(|_| bad())?;
        let quarter: u8 = quarter.parse().map_err(|_| bad())?;
        PeriodIndex::new(year, quarter).map_err(|_| bad())
    }
}

/// A named, gap-free quarterly series of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    start: PeriodIndex,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, start: PeriodIndex, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InvalidSeries(format!("`{name}` is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "`{name}` has a non-finite value at {}",
                start.advance(i)
            )));
        }
        Ok(Self {
            name,
            start,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> PeriodIndex {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Period of `values[i]`.
    pub fn period(&self, i: usize) -> PeriodIndex {
        self.start.advance(i)
    }

    pub fn end(&self) -> PeriodIndex {
        self.period(self.len() - 1)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    fn is_aligned_with(&self, other: &TimeSeries) -> bool {
        self.start == other.start && self.len() == other.len()
    }
}

/// Aligned multi-series panel: every column shares one start and one length.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFrame {
    columns: Vec<TimeSeries>,
}

impl SeriesFrame {
    pub fn new(columns: Vec<TimeSeries>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::InvalidSeries("frame has no columns".into()))?;
        for c in &columns[1..] {
            if !c.is_aligned_with(first) {
                return Err(Error::MisalignedSeries(format!(
                    "`{}` ({}, {} obs) vs `{}` ({}, {} obs)",
                    c.name,
                    c.start,
                    c.len(),
                    first.name,
                    first.start,
                    first.len()
                )));
            }
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::SchemaMismatch(format!(
                    "duplicate column name `{}`",
                    c.name
                )));
            }
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[TimeSeries] {
        &self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    /// Number of observations per column.
    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> PeriodIndex {
        self.columns[0].start()
    }

    pub fn column(&self, name: &str) -> Option<&TimeSeries> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Sub-frame with the named columns, in the order given.
    pub fn select(&self, names: &[impl AsRef<str>]) -> Result<SeriesFrame> {
        let cols = names
            .iter()
            .map(|n| {
                self.column(n.as_ref()).cloned().ok_or_else(|| {
                    Error::SchemaMismatch(format!("column `{}` not found", n.as_ref()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SeriesFrame::new(cols)
    }

    /// Apply `f` to every column.
    pub fn map_columns(&self, f: impl Fn(&TimeSeries) -> Result<TimeSeries>) -> Result<Self> {
        SeriesFrame::new(self.columns.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    /// Observations as a (length × columns) matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.n_columns(), |i, j| {
            self.columns[j].values[i]
        })
    }

    /// Write as `period,<name1>,...` CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["period".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.len() {
            let mut row = vec![self.start().advance(i).to_string()];
            row.extend(self.columns.iter().map(|c| c.values[i].to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(File::create(path)?)
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::SchemaMismatch(format!("malformed csv: {other:?}")),
    }
}

/// Load a frame whose header must equal `period` followed by `schema`.
pub fn load_frame(path: impl AsRef<Path>, schema: &[impl AsRef<str>]) -> Result<SeriesFrame> {
    let frame = read_frame(path)?;
    let found = frame.names();
    let wanted: Vec<&str> = schema.iter().map(|s| s.as_ref()).collect();
    if found != wanted {
        return Err(Error::SchemaMismatch(format!(
            "expected columns {wanted:?}, found {found:?}"
        )));
    }
    Ok(frame)
}

/// Load a frame taking column names from the file's header.
pub fn read_frame(path: impl AsRef<Path>) -> Result<SeriesFrame> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    parse_frame(file)
}

/// Parse `period,<name1>,...` CSV from any reader.
pub fn parse_frame<R: Read>(reader: R) -> Result<SeriesFrame> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("period") || header.len() < 2 {
        return Err(Error::SchemaMismatch(format!(
            "header must be `period,<name>,...`, found {header:?}"
        )));
    }
    let names = &header[1..];
    let mut start = None;
    let mut expected: Option<PeriodIndex> = None;
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); names.len()];

    for (row_no, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = row_no + 2;
        let period: PeriodIndex = record.get(0).unwrap_or("").parse()?;
        if let Some(exp) = expected {
            if period != exp {
                return Err(Error::GapInPeriods {
                    expected: exp,
                    found: period,
                });
            }
        } else {
            start = Some(period);
        }
        expected = Some(period.next());
        for (j, name) in names.iter().enumerate() {
            let cell = record.get(j + 1).unwrap_or("");
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NonNumericCell {
                    row,
                    column: name.clone(),
                    value: cell.to_string(),
                })?;
            data[j].push(value);
        }
    }
    let start = start.ok_or_else(|| Error::InvalidSeries("file has no data rows".into()))?;
    let cols = names
        .iter()
        .zip(data)
        .map(|(n, v)| TimeSeries::new(n.clone(), start, v))
        .collect::<Result<Vec<_>>>()?;
    SeriesFrame::new(cols)
}

fn check_aligned(series: &[&TimeSeries]) -> Result<()> {
    let first = series[0];
    for s in &series[1..] {
        if !s.is_aligned_with(first) {
            return Err(Error::MisalignedSeries(format!(
                "`{}` and `{}`",
                first.name, s.name
            )));
        }
    }
    Ok(())
}

/// Digital-payment scale: (online payments + card transfers + card
/// consumption) / GDP, elementwise.
pub fn build_mdi(
    online_pay: &TimeSeries,
    card_transfer: &TimeSeries,
    card_consumption: &TimeSeries,
    gdp: &TimeSeries,
) -> Result<TimeSeries> {
    check_aligned(&[online_pay, card_transfer, card_consumption, gdp])?;
    let values = (0..gdp.len())
        .map(|i| {
            let g = gdp.values[i];
            if g <= 0.0 {
                return Err(Error::NonPositiveDenominator {
                    series: gdp.name.clone(),
                    period: gdp.period(i),
                });
            }
            Ok((online_pay.values[i] + card_transfer.values[i] + card_consumption.values[i]) / g)
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new("MDI", gdp.start, values)
}

/// Cash leakage rate `k = M0 / deposits` and time-to-demand deposit ratio
/// `t = (M2 - M1) / (M1 - M0)`.
pub fn build_ratios(
    m0: &TimeSeries,
    m1: &TimeSeries,
    m2: &TimeSeries,
    deposits: &TimeSeries,
) -> Result<(TimeSeries, TimeSeries)> {
    check_aligned(&[m0, m1, m2, deposits])?;
    let n = m0.len();
    let mut k = Vec::with_capacity(n);
    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        let dep = deposits.values[i];
        if dep <= 0.0 {
            return Err(Error::DivisionByZero {
                quantity: "k".into(),
                period: m0.period(i),
            });
        }
        let demand = m1.values[i] - m0.values[i];
        if demand == 0.0 {
            return Err(Error::DivisionByZero {
                quantity: "t".into(),
                period: m0.period(i),
            });
        }
        k.push(m0.values[i] / dep);
        t.push((m2.values[i] - m1.values[i]) / demand);
    }
    Ok((
        TimeSeries::new("k", m0.start, k)?,
        TimeSeries::new("t", m0.start, t)?,
    ))
}

/// Quarterly seasonal factors by the multiplicative ratio-to-centered-moving-
/// average method, indexed by quarter - 1. Their product is 1.
pub fn seasonal_factors(series: &TimeSeries) -> Result<[f64; 4]> {
    let n = series.len();
    if n < 8 {
        return Err(Error::SeriesTooShort {
            required: 8,
            actual: n,
        });
    }
    if let Some(i) = series.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveValue {
            series: series.name.clone(),
            period: series.period(i),
        });
    }
    let y = &series.values;
    let mut sums = [0.0; 4];
    let mut counts = [0usize; 4];
    for i in 2..n - 2 {
        // 2x4 centered moving average
        let ma = (0.5 * y[i - 2] + y[i - 1] + y[i] + y[i + 1] + 0.5 * y[i + 2]) / 4.0;
        let q = series.period(i).quarter() as usize - 1;
        sums[q] += y[i] / ma;
        counts[q] += 1;
    }
    let mut factors = [0.0; 4];
    for q in 0..4 {
        factors[q] = sums[q] / counts[q] as f64;
    }
    let geo_mean = factors.iter().map(|f| f.ln()).sum::<f64>() / 4.0;
    let scale = geo_mean.exp();
    for f in &mut factors {
        *f /= scale;
    }
    Ok(factors)
}

/// Divide out multiplicative quarterly seasonality.
pub fn seasonal_adjust(series: &TimeSeries) -> Result<TimeSeries> {
    let factors = seasonal_factors(series)?;
    let values = series
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v / factors[series.period(i).quarter() as usize - 1])
        .collect();
    TimeSeries::new(format!("{}_sa", series.name), series.start, values)
}

/// `order`-th difference; the result starts `order` quarters later.
pub fn difference(series: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if order == 0 {
        return Err(Error::InvalidParams("difference order must be >= 1".into()));
    }
    if series.len() <= order {
        return Err(Error::SeriesTooShort {
            required: order + 1,
            actual: series.len(),
        });
    }
    let mut v = series.values.clone();
    for _ in 0..order {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    TimeSeries::new(format!("D{}", series.name), series.start.advance(order), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(y: i32, q: u8) -> PeriodIndex {
        PeriodIndex::new(y, q).unwrap()
    }

    fn ts(name: &str, v: &[f64]) -> TimeSeries {
        TimeSeries::new(name, q(2010, 1), v.to_vec()).unwrap()
    }

    #[test]
    fn period_parse_and_advance() {
        let p: PeriodIndex = "2010Q1".parse().unwrap();
        assert_eq!(p, q(2010, 1));
        assert_eq!(p.advance(5), q(2011, 2));
        assert_eq!(q(2010, 4).next(), q(2011, 1));
        assert!("2010Q5".parse::<PeriodIndex>().is_err());
        assert!("2010-01".parse::<PeriodIndex>().is_err());
        assert!(q(2010, 4) < q(2011, 1));
        assert_eq!(q(2015, 3).to_string(), "2015Q3");
    }

    #[test]
    fn time_series_rejects_non_finite() {
        assert!(TimeSeries::new("x", q(2010, 1), vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new("x", q(2010, 1), vec![]).is_err());
    }

    #[test]
    fn frame_rejects_misaligned_and_duplicates() {
        let a = ts("a", &[1.0, 2.0]);
        let b = TimeSeries::new("b", q(2010, 2), vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            SeriesFrame::new(vec![a.clone(), b]),
            Err(Error::MisalignedSeries(_))
        ));
        assert!(matches!(
            SeriesFrame::new(vec![a.clone(), a]),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn mdi_examples() {
        let m = build_mdi(
            &ts("a", &[2.0, 0.0]),
            &ts("b", &[3.0, 0.0]),
            &ts("c", &[5.0, 0.0]),
            &ts("gdp", &[10.0, 7.0]),
        )
        .unwrap();
        assert_eq!(m.values(), &[1.0, 0.0]);
        let err = build_mdi(
            &ts("a", &[1.0]),
            &ts("b", &[1.0]),
            &ts("c", &[1.0]),
            &ts("gdp", &[0.0]),
        );
        assert!(matches!(err, Err(Error::NonPositiveDenominator { .. })));
        let err = build_mdi(
            &ts("a", &[1.0, 1.0]),
            &ts("b", &[1.0]),
            &ts("c", &[1.0]),
            &ts("gdp", &[1.0]),
        );
        assert!(matches!(err, Err(Error::MisalignedSeries(_))));
    }

    #[test]
    fn ratio_examples() {
        let (k, t) = build_ratios(
            &ts("m0", &[10.0]),
            &ts("m1", &[40.0]),
            &ts("m2", &[100.0]),
            &ts("dep", &[50.0]),
        )
        .unwrap();
        assert_eq!(k.values(), &[0.2]);
        assert_eq!(t.values(), &[2.0]);

        let err = build_ratios(
            &ts("m0", &[10.0, 10.0]),
            &ts("m1", &[40.0, 10.0]),
            &ts("m2", &[100.0, 20.0]),
            &ts("dep", &[50.0, 50.0]),
        );
        match err {
            Err(Error::DivisionByZero { period, .. }) => assert_eq!(period, q(2010, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn difference_examples() {
        let s = ts("x", &[1.0, 3.0, 6.0, 10.0]);
        let d1 = difference(&s, 1).unwrap();
        assert_eq!(d1.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(d1.start(), q(2010, 2));
        assert_eq!(difference(&s, 2).unwrap().values(), &[1.0, 1.0]);
        assert!(matches!(
            difference(&ts("x", &[1.0]), 1),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn seasonal_adjust_constant_is_identity() {
        let s = ts("c", &[3.5; 12]);
        let adj = seasonal_adjust(&s).unwrap();
        for v in adj.values() {
            assert!((v - 3.5).abs() < 1e-12);
        }
    }

    #[test]
    fn seasonal_adjust_rejections() {
        assert!(matches!(
            seasonal_adjust(&ts("x", &[1.0; 7])),
            Err(Error::SeriesTooShort { .. })
        ));
        let mut v = vec![1.0; 10];
        v[4] = -1.0;
        assert!(matches!(
            seasonal_adjust(&ts("x", &v)),
            Err(Error::NonPositiveValue { .. })
        ));
    }

    fn seasonal_fixture(start: PeriodIndex, n: usize) -> (TimeSeries, Vec<f64>) {
        let s = [0.9, 1.1, 1.0, 1.0 / 0.99];
        let trend: Vec<f64> = (0..n).map(|i| 1.02f64.powi(i as i32)).collect();
        let values = (0..n)
            .map(|i| trend[i] * s[start.advance(i).quarter() as usize - 1])
            .collect();
        (TimeSeries::new("x", start, values).unwrap(), trend)
    }

    #[test]
    fn seasonal_adjust_recovers_trend() {
        for start in [q(2010, 1), q(2010, 3)] {
            let (s, trend) = seasonal_fixture(start, 40);
            let adj = seasonal_adjust(&s).unwrap();
            for (a, t) in adj.values()[2..38].iter().zip(&trend[2..38]) {
                let rel = (a / t - 1.0).abs();
                assert!(rel < 0.01, "rel={rel}");
            }
        }
    }

    #[test]
    fn seasonal_adjust_is_nearly_idempotent() {
        let (s, _) = seasonal_fixture(q(2010, 1), 40);
        let once = seasonal_adjust(&s).unwrap();
        let twice = seasonal_adjust(&once).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((b / a - 1.0).abs() < 0.005);
        }
    }

    #[test]
    fn csv_rejections() {
        let blank = "period,a,b\n2010Q1,1,2\n2010Q2,,3\n";
        assert!(matches!(
            parse_frame(blank.as_bytes()),
            Err(Error::NonNumericCell { row: 3, .. })
        ));
        let gap = "period,a\n2015Q1,1\n2015Q2,2\n2015Q4,3\n";
        match parse_frame(gap.as_bytes()) {
            Err(Error::GapInPeriods { expected, found }) => {
                assert_eq!(expected, q(2015, 3));
                assert_eq!(found, q(2015, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn load_frame_checks_schema_and_existence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "period,a,b\n2010Q1,1,2\n2010Q2,3,4\n").unwrap();
        assert_eq!(load_frame(&path, &["a", "b"]).unwrap().len(), 2);
        assert!(matches!(
            load_frame(&path, &["b", "a"]),
            Err(Error::SchemaMismatch(_))
        ));
        assert!(matches!(
            load_frame(dir.path().join("missing.csv"), &["a"]),
            Err(Error::FileNotFound(_))
        ));
    }
}
