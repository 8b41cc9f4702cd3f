//! Measured data, bounding boxes, hypothesis parameters, and regressor
//! construction for dynamic series.

use std::io::{Read, Write};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One measured pair: input vector `u` and scalar output `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    u: Vec<f64>,
    y: f64,
}

impl Sample {
    /// Builds a sample, rejecting NaN and infinite coordinates.
    pub fn new(u: Vec<f64>, y: f64) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::EmptyInput("sample input vector"));
        }
        if !y.is_finite() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "sample coordinates".into(),
            });
        }
        Ok(Self { u, y })
    }

    pub fn input(&self) -> &[f64] {
        &self.u
    }

    pub fn output(&self) -> f64 {
        self.y
    }

    pub fn input_dim(&self) -> usize {
        self.u.len()
    }
}

/// Euclidean distance between two input vectors of equal dimension.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Ordered collection of samples sharing one input dimension.
#[derive(Debug)]
pub struct Dataset {
    samples: Vec<Sample>,
    dim: usize,
    bounds: OnceLock<BoundingBox>,
}

impl Clone for Dataset {
    fn clone(&self) -> Self {
        Self {
            samples: self.samples.clone(),
            dim: self.dim,
            bounds: self.bounds.clone(),
        }
    }
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::EmptyInput("dataset"));
        };
        let dim = first.input_dim();
        for s in &samples {
            if s.input_dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.input_dim(),
                });
            }
        }
        Ok(Self {
            samples,
            dim,
            bounds: OnceLock::new(),
        })
    }

    /// Convenience constructor from raw `(u, y)` pairs.
    pub fn from_rows(rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let samples = rows
            .iter()
            .map(|(u, y)| Sample::new(u.clone(), *y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    /// Scalar-input shorthand used heavily in tests.
    pub fn from_scalar_rows(rows: &[(f64, f64)]) -> Result<Self> {
        let samples = rows
            .iter()
            .map(|&(u, y)| Sample::new(vec![u], y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, k: usize) -> &Sample {
        &self.samples[k]
    }

    /// Smallest axis-aligned box containing every input, computed once and
    /// cached.
    pub fn bounding_box(&self) -> &BoundingBox {
        self.bounds.get_or_init(|| {
            let mut lower = self.samples[0].input().to_vec();
            let mut upper = lower.clone();
            for s in &self.samples[1..] {
                for (i, &x) in s.input().iter().enumerate() {
                    lower[i] = lower[i].min(x);
                    upper[i] = upper[i].max(x);
                }
            }
            BoundingBox::new(lower, upper).expect("sample coordinates are finite")
        })
    }

    /// Appends a sample, invalidating the cached box.
    pub fn push(&mut self, sample: Sample) -> Result<()> {
        if sample.input_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: sample.input_dim(),
            });
        }
        self.samples.push(sample);
        self.bounds = OnceLock::new();
        Ok(())
    }

    /// Parses a dataset from CSV with header `u1,...,u<n>,y`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let headers = rdr.headers().map_err(|e| Error::Csv {
            row: 0,
            column: 0,
            message: e.to_string(),
        })?;
        let dim = validate_header(headers, true)?;

        let mut samples = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let row = idx + 1;
            let record = record.map_err(|e| Error::Csv {
                row,
                column: 0,
                message: e.to_string(),
            })?;
            if record.len() != dim + 1 {
                return Err(Error::Csv {
                    row,
                    column: record.len(),
                    message: format!("expected {} cells, found {}", dim + 1, record.len()),
                });
            }
            let mut values = Vec::with_capacity(dim + 1);
            for (col, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| Error::Csv {
                    row,
                    column: col + 1,
                    message: format!("non-numeric cell {cell:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv {
                        row,
                        column: col + 1,
                        message: format!("non-finite cell {cell:?}"),
                    });
                }
                values.push(v);
            }
            let y = values.pop().expect("row has dim+1 cells");
            samples.push(Sample::new(values, y)?);
        }
        if samples.is_empty() {
            return Err(Error::EmptyInput("csv dataset: no data rows"));
        }
        Self::new(samples)
    }

    /// Writes CSV that [`Dataset::from_csv`] parses back bit-exactly.
    pub fn to_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("u{i}")).collect();
        header.push("y".into());
        writeln!(writer, "{}", header.join(","))?;
        for s in &self.samples {
            let mut cells: Vec<String> = s.input().iter().map(|&x| fmt_f64(x)).collect();
            cells.push(fmt_f64(s.output()));
            writeln!(writer, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Renders an `f64` with 17 significant digits, enough for exact round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Checks a `u1,...,u<n>[,y]` header and returns the input dimension.
fn validate_header(headers: &csv::StringRecord, expect_y: bool) -> Result<usize> {
    let cols: Vec<&str> = headers.iter().collect();
    let dim = if expect_y {
        if cols.last().map(|c| c.eq_ignore_ascii_case("y")) != Some(true) {
            return Err(Error::Csv {
                row: 0,
                column: cols.len(),
                message: format!("last header column must be 'y', found {:?}", cols.last()),
            });
        }
        cols.len().saturating_sub(1)
    } else {
        cols.len()
    };
    if dim == 0 {
        return Err(Error::Csv {
            row: 0,
            column: 1,
            message: "header has no input columns".into(),
        });
    }
    for (i, col) in cols[..dim].iter().enumerate() {
        let expected = format!("u{}", i + 1);
        if !col.eq_ignore_ascii_case(&expected) {
            return Err(Error::Csv {
                row: 0,
                column: i + 1,
                message: format!("expected header column {expected:?}, found {col:?}"),
            });
        }
    }
    Ok(dim)
}

/// Parses input points (no `y` column) from CSV with header `u1,...,u<n>`.
pub fn points_from_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Csv {
        row: 0,
        column: 0,
        message: e.to_string(),
    })?;
    let dim = validate_header(headers, false)?;
    let mut points = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Csv {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if record.len() != dim {
            return Err(Error::Csv {
                row,
                column: record.len(),
                message: format!("expected {} cells, found {}", dim, record.len()),
            });
        }
        let mut point = Vec::with_capacity(dim);
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                row,
                column: col + 1,
                message: format!("non-numeric cell {cell:?}"),
            })?;
            point.push(v);
        }
        points.push(point);
    }
    Ok(points)
}

/// Per-coordinate interval hull of the measured inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::EmptyInput("bounding box"));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("box bound in dimension {i}"),
                });
            }
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "box dimension {i} has lower {lo} > upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.lower[i] == self.upper[i]
    }

    /// Indices of dimensions with nonzero width.
    pub fn nondegenerate_dims(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.is_degenerate(i)).collect()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter()
                .enumerate()
                .all(|(i, &x)| self.lower[i] <= x && x <= self.upper[i])
    }

    /// Grows the box to cover `u`.
    pub fn extend_to(&mut self, u: &[f64]) {
        debug_assert_eq!(u.len(), self.dim());
        for (i, &x) in u.iter().enumerate() {
            self.lower[i] = self.lower[i].min(x);
            self.upper[i] = self.upper[i].max(x);
        }
    }

    /// Euclidean length of the box diagonal.
    pub fn diameter(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i).powi(2)).sum::<f64>().sqrt()
    }

    /// Volume over the nondegenerate dimensions only.
    pub fn nondegenerate_volume(&self) -> f64 {
        self.nondegenerate_dims()
            .iter()
            .map(|&i| self.width(i))
            .product()
    }
}

/// Gradient-norm bound `gamma` and disturbance amplitude bound `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmHypotheses {
    gamma: f64,
    epsilon: f64,
}

impl SmHypotheses {
    pub fn new(gamma: f64, epsilon: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        Ok(Self { gamma, epsilon })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Which L_q norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormQ {
    One,
    Two,
    Inf,
}

impl NormQ {
    pub fn is_integral(self) -> bool {
        !matches!(self, NormQ::Inf)
    }
}

impl std::fmt::Display for NormQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormQ::One => write!(f, "1"),
            NormQ::Two => write!(f, "2"),
            NormQ::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for NormQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormQ::One => s.serialize_u8(1),
            NormQ::Two => s.serialize_u8(2),
            NormQ::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for NormQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u8),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(1) => Ok(NormQ::One),
            Raw::Num(2) => Ok(NormQ::Two),
            Raw::Text(t) if t.eq_ignore_ascii_case("inf") => Ok(NormQ::Inf),
            Raw::Num(n) => Err(serde::de::Error::custom(format!("q must be 1, 2 or \"inf\", got {n}"))),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("q must be 1, 2 or \"inf\", got {t:?}"))),
        }
    }
}

pub const DEFAULT_GRID_RESOLUTION: usize = 201;

/// Norm index plus the uniform grid density used to approximate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub q: NormQ,
    pub grid_resolution: usize,
}

impl NormSpec {
    pub fn new(q: NormQ, grid_resolution: usize) -> Result<Self> {
        if grid_resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid_resolution must be at least 2, got {grid_resolution}"
            )));
        }
        Ok(Self { q, grid_resolution })
    }

    pub fn with_default_resolution(q: NormQ) -> Self {
        Self {
            q,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
        }
    }
}

/// JSON configuration bundle: hypotheses plus norm selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesesConfig {
    pub gamma: f64,
    pub epsilon: f64,
    pub q: NormQ,
    pub grid_resolution: usize,
}

impl HypothesesConfig {
    pub fn hypotheses(&self) -> Result<SmHypotheses> {
        SmHypotheses::new(self.gamma, self.epsilon)
    }

    pub fn norm_spec(&self) -> Result<NormSpec> {
        NormSpec::new(self.q, self.grid_resolution)
    }
}

/// Lag structure for converting a dynamic series into static regression data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegressorConfig {
    /// Lag order m >= 1.
    pub lag: usize,
    /// Dimension of each raw input vector.
    pub input_count: usize,
}

impl RegressorConfig {
    pub fn new(lag: usize, input_count: usize) -> Result<Self> {
        if lag < 1 {
            return Err(Error::InvalidParameter("lag order must be >= 1".into()));
        }
        if input_count < 1 {
            return Err(Error::InvalidParameter("input_count must be >= 1".into()));
        }
        Ok(Self { lag, input_count })
    }

    /// Dimension of each regressor: m + n_u * (m + 1).
    pub fn regressor_dim(&self) -> usize {
        self.lag + self.input_count * (self.lag + 1)
    }
}

/// Assembles lagged regressors: sample j pairs output y_j with the vector
/// [y_{j-1},...,y_{j-m}, u_j(1),...,u_{j-m}(1), ..., u_j(n),...,u_{j-m}(n)].
pub fn build_regressors(
    y_series: &[f64],
    u_series: &[Vec<f64>],
    cfg: RegressorConfig,
) -> Result<Dataset> {
    if y_series.len() != u_series.len() {
        return Err(Error::SeriesLengthMismatch {
            y_len: y_series.len(),
            u_len: u_series.len(),
        });
    }
    let n = y_series.len();
    let m = cfg.lag;
    if n <= m {
        return Err(Error::SeriesTooShort { lag: m, len: n });
    }
    for (j, u) in u_series.iter().enumerate() {
        if u.len() != cfg.input_count {
            return Err(Error::DimensionMismatch {
                expected: cfg.input_count,
                got: u_series[j].len(),
            });
        }
    }

    let mut samples = Vec::with_capacity(n - m);
    for j in m..n {
        let mut r = Vec::with_capacity(cfg.regressor_dim());
        for back in 1..=m {
            r.push(y_series[j - back]);
        }
        for i in 0..cfg.input_count {
            for back in 0..=m {
                r.push(u_series[j - back][i]);
            }
        }
        samples.push(Sample::new(r, y_series[j])?);
    }
    Dataset::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parses_single_input() {
        let d = Dataset::from_csv("u1,y\n0,0\n1,1".as_bytes()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.input_dim(), 1);
        assert_eq!(d.sample(1).input(), &[1.0]);
        assert_eq!(d.sample(1).output(), 1.0);
    }

    #[test]
    fn csv_parses_two_inputs_single_row() {
        let d = Dataset::from_csv("u1,u2,y\n0,0,5".as_bytes()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.input_dim(), 2);
        assert_eq!(d.sample(0).output(), 5.0);
    }

    #[test]
    fn csv_reports_non_numeric_cell_position() {
        let err = Dataset::from_csv("u1,y\n0,abc".as_bytes()).unwrap_err();
        match err {
            Error::Csv { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csv_rejects_bad_header_and_empty_file() {
        assert!(matches!(
            Dataset::from_csv("a,b\n0,0".as_bytes()).unwrap_err(),
            Error::Csv { row: 0, .. }
        ));
        assert!(Dataset::from_csv("u1,y\n".as_bytes()).is_err());
        assert!(Dataset::from_csv("".as_bytes()).is_err());
    }

    #[test]
    fn csv_rejects_inconsistent_row_width() {
        let err = Dataset::from_csv("u1,u2,y\n0,1,2\n3,4".as_bytes()).unwrap_err();
        match err {
            Error::Csv { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let d = Dataset::from_rows(&[
            (vec![0.1, -2.75], 1.0 / 3.0),
            (vec![std::f64::consts::PI, 1e-300], -7.123456789012345e20),
        ])
        .unwrap();
        let mut buf = Vec::new();
        d.to_csv(&mut buf).unwrap();
        let back = Dataset::from_csv(buf.as_slice()).unwrap();
        assert_eq!(back.samples(), d.samples());
    }

    #[test]
    fn bounding_box_is_coordinatewise_hull() {
        let d = Dataset::from_scalar_rows(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.0)]).unwrap();
        let b = d.bounding_box();
        assert_eq!(b.lower(), &[0.0]);
        assert_eq!(b.upper(), &[1.0]);

        let d2 = Dataset::from_rows(&[(vec![0.0, 5.0], 0.0), (vec![2.0, 1.0], 0.0)]).unwrap();
        let b2 = d2.bounding_box();
        assert_eq!(b2.lower(), &[0.0, 1.0]);
        assert_eq!(b2.upper(), &[2.0, 5.0]);
    }

    #[test]
    fn single_sample_box_is_fully_degenerate() {
        let d = Dataset::from_rows(&[(vec![3.0, -2.0], 9.0)]).unwrap();
        let b = d.bounding_box();
        assert_eq!(b.lower(), &[3.0, -2.0]);
        assert_eq!(b.upper(), &[3.0, -2.0]);
        assert!(b.is_degenerate(0) && b.is_degenerate(1));
        assert!(b.nondegenerate_dims().is_empty());
    }

    #[test]
    fn box_contains_every_sample() {
        let d = Dataset::from_rows(&[
            (vec![0.3, -1.0], 0.0),
            (vec![-2.0, 4.0], 1.0),
            (vec![1.5, 0.0], 2.0),
        ])
        .unwrap();
        let b = d.bounding_box();
        for s in d.samples() {
            assert!(b.contains(s.input()));
        }
    }

    #[test]
    fn regressors_follow_lag_layout() {
        let y = [1.0, 2.0, 3.0];
        let u = vec![vec![10.0], vec![20.0], vec![30.0]];
        let cfg = RegressorConfig::new(1, 1).unwrap();
        let d = build_regressors(&y, &u, cfg).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.sample(0).input(), &[1.0, 20.0, 10.0]);
        assert_eq!(d.sample(0).output(), 2.0);
        assert_eq!(d.sample(1).input(), &[2.0, 30.0, 20.0]);
        assert_eq!(d.sample(1).output(), 3.0);
        assert_eq!(d.input_dim(), cfg.regressor_dim());
    }

    #[test]
    fn regressors_zero_case() {
        let y = [0.0, 0.0];
        let u = vec![vec![0.0], vec![0.0]];
        let d = build_regressors(&y, &u, RegressorConfig::new(1, 1).unwrap()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.sample(0).input(), &[0.0, 0.0, 0.0]);
        assert_eq!(d.sample(0).output(), 0.0);
    }

    #[test]
    fn regressors_reject_short_or_mismatched_series() {
        let cfg = RegressorConfig::new(3, 1).unwrap();
        let y = [1.0, 2.0, 3.0];
        let u = vec![vec![0.0], vec![0.0], vec![0.0]];
        assert!(matches!(
            build_regressors(&y, &u, cfg).unwrap_err(),
            Error::SeriesTooShort { .. }
        ));
        let cfg1 = RegressorConfig::new(1, 1).unwrap();
        assert!(matches!(
            build_regressors(&y, &u[..2], cfg1).unwrap_err(),
            Error::SeriesLengthMismatch { .. }
        ));
    }

    #[test]
    fn regressor_entries_match_cited_lags_multi_input() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let u = vec![
            vec![10.0, -1.0],
            vec![20.0, -2.0],
            vec![30.0, -3.0],
            vec![40.0, -4.0],
        ];
        let cfg = RegressorConfig::new(2, 2).unwrap();
        let d = build_regressors(&y, &u, cfg).unwrap();
        // j = 3 (0-based 2): [y2, y1, u3(1), u2(1), u1(1), u3(2), u2(2), u1(2)]
        assert_eq!(
            d.sample(0).input(),
            &[2.0, 1.0, 30.0, 20.0, 10.0, -3.0, -2.0, -1.0]
        );
        assert_eq!(d.len(), y.len() - cfg.lag);
    }

    #[test]
    fn hypotheses_reject_negative_values() {
        assert!(SmHypotheses::new(-0.1, 0.0).is_err());
        assert!(SmHypotheses::new(0.0, -1.0).is_err());
        assert!(SmHypotheses::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn norm_q_serde_matches_config_schema() {
        let cfg: HypothesesConfig =
            serde_json::from_str(r#"{"gamma":1.5,"epsilon":0.1,"q":"inf","grid_resolution":201}"#)
                .unwrap();
        assert_eq!(cfg.q, NormQ::Inf);
        let cfg2: HypothesesConfig =
            serde_json::from_str(r#"{"gamma":1,"epsilon":0,"q":2,"grid_resolution":11}"#).unwrap();
        assert_eq!(cfg2.q, NormQ::Two);
        let json = serde_json::to_string(&cfg2).unwrap();
        assert!(json.contains("\"q\":2"));
    }

    #[test]
    fn samples_reject_non_finite() {
        assert!(Sample::new(vec![f64::NAN], 0.0).is_err());
        assert!(Sample::new(vec![0.0], f64::INFINITY).is_err());
    }
}
