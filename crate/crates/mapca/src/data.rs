//! Reading delimited numeric tables and turning them into covariance
//! estimates.
//!
//! The accepted dialect is deliberately small: one record per line, a
//! fixed single-character delimiter, an optional header line, and an
//! optional non-numeric label column that is skipped. Every remaining cell
//! must parse as a finite number; errors carry the exact file, line, and
//! column so bad cells are easy to find.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::invariance::Rescaling;
use crate::mat::Mat;
use crate::spectra::SymmetricMatrix;

/// Errors from reading or validating tabular input.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{row}:{col}: cannot parse {token:?} as a number")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        token: String,
    },
    #[error("{path}:{row}:{col}: non-finite value {token:?}")]
    NonFinite {
        path: String,
        row: usize,
        col: usize,
        token: String,
    },
    #[error("{path}:{row}: expected {expected} columns, found {found}")]
    RaggedRow {
        path: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("need at least 2 data rows, found {rows}")]
    TooFewRows { rows: usize },
    #[error("no numeric columns found")]
    NoColumns,
    #[error("{path}: file contains no data")]
    EmptyFile { path: String },
    #[error("label column {index} out of range for {cols} columns")]
    LabelColumnOutOfRange { index: usize, cols: usize },
    #[error("value at row {row}, column {col} is not finite")]
    NonFiniteValue { row: usize, col: usize },
    #[error("{context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
}

/// Dialect options for [`load_csv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    /// Treat the first non-blank line as column names.
    pub has_header: bool,
    pub delimiter: char,
    /// Zero-based raw column to skip as a row label.
    pub label_column: Option<usize>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            delimiter: ',',
            label_column: None,
        }
    }
}

/// An observations-by-variables table with named columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    values: Mat,
    column_names: Vec<String>,
}

impl Dataset {
    pub fn new(values: Mat, column_names: Vec<String>) -> Result<Self, DataError> {
        if values.cols() == 0 {
            return Err(DataError::NoColumns);
        }
        if values.rows() < 2 {
            return Err(DataError::TooFewRows {
                rows: values.rows(),
            });
        }
        if column_names.len() != values.cols() {
            return Err(DataError::DimensionMismatch {
                context: "column names",
                expected: values.cols(),
                actual: column_names.len(),
            });
        }
        for i in 0..values.rows() {
            for j in 0..values.cols() {
                if !values.get(i, j).is_finite() {
                    return Err(DataError::NonFiniteValue {
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
        }
        Ok(Dataset {
            values,
            column_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

fn display_path(path: &Path) -> String {
    path.display().to_string()
}

struct ParsedLine {
    line_number: usize,
    cells: Vec<f64>,
}

/// Loads a delimited numeric table.
pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: display_path(path),
        source,
    })?;

    let mut raw_width: Option<usize> = None;
    let mut header: Option<Vec<String>> = None;
    let mut want_header = options.has_header;
    let mut rows: Vec<ParsedLine> = Vec::new();

    for (index, line) in text.lines().enumerate() {
        let line_number = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(options.delimiter).collect();
        match raw_width {
            None => {
                if let Some(label) = options.label_column {
                    if label >= cells.len() {
                        return Err(DataError::LabelColumnOutOfRange {
                            index: label,
                            cols: cells.len(),
                        });
                    }
                }
                raw_width = Some(cells.len());
            }
            Some(expected) => {
                if cells.len() != expected {
                    return Err(DataError::RaggedRow {
                        path: display_path(path),
                        row: line_number,
                        expected,
                        found: cells.len(),
                    });
                }
            }
        }
        if want_header {
            want_header = false;
            header = Some(
                cells
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| Some(*c) != options.label_column)
                    .map(|(_, name)| name.trim().to_string())
                    .collect(),
            );
            continue;
        }
        let mut parsed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if Some(c) == options.label_column {
                continue;
            }
            let token = cell.trim();
            let value: f64 = token.parse().map_err(|_| DataError::Parse {
                path: display_path(path),
                row: line_number,
                col: c + 1,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DataError::NonFinite {
                    path: display_path(path),
                    row: line_number,
                    col: c + 1,
                    token: token.to_string(),
                });
            }
            parsed.push(value);
        }
        rows.push(ParsedLine {
            line_number,
            cells: parsed,
        });
    }

    let width = match rows.first() {
        Some(first) => first.cells.len(),
        None => {
            return Err(DataError::TooFewRows { rows: 0 });
        }
    };
    if width == 0 {
        return Err(DataError::NoColumns);
    }
    if rows.len() < 2 {
        return Err(DataError::TooFewRows { rows: rows.len() });
    }

    let mut values = Mat::zeros(rows.len(), width);
    for (i, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.cells.len(), width);
        let _ = row.line_number;
        for (j, &v) in row.cells.iter().enumerate() {
            values.set(i, j, v);
        }
    }
    let column_names = match header {
        Some(names) => names,
        None => (1..=width).map(|j| format!("col{j}")).collect(),
    };
    Dataset::new(values, column_names)
}

/// Column means subtracted; returns the centered table and the means.
pub fn center(dataset: &Dataset) -> (Mat, Vec<f64>) {
    let n = dataset.n_rows();
    let p = dataset.n_cols();
    let x = dataset.values();
    let mut means = vec![0.0_f64; p];
    for (j, mean) in means.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            acc += x.get(i, j);
        }
        *mean = acc / n as f64;
    }
    let mut centered = Mat::zeros(n, p);
    for i in 0..n {
        for (j, &mean) in means.iter().enumerate() {
            centered.set(i, j, x.get(i, j) - mean);
        }
    }
    (centered, means)
}

/// Divisor used when averaging the centered cross products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceDenominator {
    /// Unbiased: divide by `n - 1`.
    NMinusOne,
    /// Maximum likelihood: divide by `n`.
    N,
}

impl CovarianceDenominator {
    pub fn divisor(&self, n_rows: usize) -> f64 {
        match self {
            CovarianceDenominator::NMinusOne => (n_rows - 1) as f64,
            CovarianceDenominator::N => n_rows as f64,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CovarianceDenominator::NMinusOne => "n-1",
            CovarianceDenominator::N => "n",
        }
    }
}

impl fmt::Display for CovarianceDenominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Sample covariance with its provenance.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub sigma: SymmetricMatrix,
    pub means: Vec<f64>,
    pub denominator: CovarianceDenominator,
}

/// Centers the table and forms the covariance with the chosen divisor.
pub fn center_and_covariance_with(
    dataset: &Dataset,
    denominator: CovarianceDenominator,
) -> CovarianceEstimate {
    let (centered, means) = center(dataset);
    let n = dataset.n_rows();
    let p = dataset.n_cols();
    let divisor = denominator.divisor(n);
    let mut sigma = Mat::zeros(p, p);
    for j in 0..p {
        for k in j..p {
            let mut acc = 0.0;
            for i in 0..n {
                acc += centered.get(i, j) * centered.get(i, k);
            }
            let value = acc / divisor;
            sigma.set(j, k, value);
            sigma.set(k, j, value);
        }
    }
    let sigma = SymmetricMatrix::new(sigma).expect("covariance of a finite dataset is finite");
    CovarianceEstimate {
        sigma,
        means,
        denominator,
    }
}

/// [`center_and_covariance_with`] using the unbiased `n - 1` divisor.
pub fn center_and_covariance(dataset: &Dataset) -> CovarianceEstimate {
    center_and_covariance_with(dataset, CovarianceDenominator::NMinusOne)
}

/// Multiplies each column by its scale, as a change of units would.
pub fn apply_rescaling(dataset: &Dataset, c: &Rescaling) -> Result<Dataset, DataError> {
    let p = dataset.n_cols();
    if c.len() != p {
        return Err(DataError::DimensionMismatch {
            context: "rescaling",
            expected: p,
            actual: c.len(),
        });
    }
    let scales = c.scales();
    let x = dataset.values();
    let mut out = Mat::zeros(dataset.n_rows(), p);
    for i in 0..dataset.n_rows() {
        for (j, &scale) in scales.iter().enumerate() {
            out.set(i, j, x.get(i, j) * scale);
        }
    }
    Dataset::new(out, dataset.column_names().to_vec())
}

/// Loads a square numeric matrix (no header, no labels) and symmetrizes
/// it, e.g. a user-supplied metric.
pub fn load_matrix_csv(path: &Path, delimiter: char) -> Result<SymmetricMatrix, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: display_path(path),
        source,
    })?;
    let mut width: Option<usize> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_number = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(delimiter).collect();
        if let Some(expected) = width {
            if cells.len() != expected {
                return Err(DataError::RaggedRow {
                    path: display_path(path),
                    row: line_number,
                    expected,
                    found: cells.len(),
                });
            }
        } else {
            width = Some(cells.len());
        }
        let mut parsed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let token = cell.trim();
            let value: f64 = token.parse().map_err(|_| DataError::Parse {
                path: display_path(path),
                row: line_number,
                col: c + 1,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DataError::NonFinite {
                    path: display_path(path),
                    row: line_number,
                    col: c + 1,
                    token: token.to_string(),
                });
            }
            parsed.push(value);
        }
        rows.push(parsed);
    }
    let width = width.ok_or_else(|| DataError::EmptyFile {
        path: display_path(path),
    })?;
    if rows.len() != width {
        return Err(DataError::DimensionMismatch {
            context: "square matrix rows",
            expected: width,
            actual: rows.len(),
        });
    }
    let mat = Mat::from_rows(&rows);
    Ok(SymmetricMatrix::new(mat).expect("validated square finite matrix"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().expect("create temp file");
        file.write_all(contents.as_bytes()).expect("write temp file");
        file
    }

    #[test]
    fn loads_with_header() {
        let file = write_temp("x,y\n0,0\n1,0\n0,1\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.n_cols(), 2);
        assert_eq!(d.column_names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(d.values().get(1, 0), 1.0);
    }

    #[test]
    fn loads_without_header() {
        let file = write_temp("1,2\n3,4\n");
        let options = CsvOptions {
            has_header: false,
            ..CsvOptions::default()
        };
        let d = load_csv(file.path(), &options).unwrap();
        assert_eq!(d.column_names(), &["col1".to_string(), "col2".to_string()]);
        assert_eq!(d.values().get(0, 1), 2.0);
    }

    #[test]
    fn skips_blank_lines_and_trims_cells() {
        let file = write_temp("x,y\n\n 1 , 2 \n\n3,4\n\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.values().get(0, 0), 1.0);
    }

    #[test]
    fn accepts_scientific_notation() {
        let file = write_temp("a,b\n1e-3,2.5E2\n-4e0,0\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        assert_eq!(d.values().get(0, 0), 1e-3);
        assert_eq!(d.values().get(0, 1), 250.0);
    }

    #[test]
    fn rejects_non_numeric_cell_with_location() {
        let file = write_temp("x,y\n1,2\n3,oops\n");
        let err = load_csv(file.path(), &CsvOptions::default()).unwrap_err();
        match err {
            DataError::Parse { row, col, token, .. } => {
                assert_eq!(row, 3);
                assert_eq!(col, 2);
                assert_eq!(token, "oops");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nan_cell_as_non_finite() {
        let file = write_temp("x,y\n1,2\nNaN,4\n");
        let err = load_csv(file.path(), &CsvOptions::default()).unwrap_err();
        match err {
            DataError::NonFinite { row, col, .. } => {
                assert_eq!(row, 3);
                assert_eq!(col, 1);
            }
            other => panic!("expected non-finite error, got {other:?}"),
        }
        let file = write_temp("x,y\n1,inf\n3,4\n");
        assert!(matches!(
            load_csv(file.path(), &CsvOptions::default()),
            Err(DataError::NonFinite { .. })
        ));
    }

    #[test]
    fn rejects_ragged_rows() {
        let file = write_temp("x,y\n1,2\n3,4,5\n");
        let err = load_csv(file.path(), &CsvOptions::default()).unwrap_err();
        match err {
            DataError::RaggedRow {
                row,
                expected,
                found,
                ..
            } => {
                assert_eq!(row, 3);
                assert_eq!(expected, 2);
                assert_eq!(found, 3);
            }
            other => panic!("expected ragged-row error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_single_row() {
        let file = write_temp("x,y\n1,2\n");
        assert!(matches!(
            load_csv(file.path(), &CsvOptions::default()),
            Err(DataError::TooFewRows { rows: 1 })
        ));
        let empty = write_temp("");
        assert!(matches!(
            load_csv(empty.path(), &CsvOptions::default()),
            Err(DataError::TooFewRows { rows: 0 })
        ));
    }

    #[test]
    fn missing_file_reports_io_error() {
        let err = load_csv(Path::new("/nonexistent/input.csv"), &CsvOptions::default())
            .unwrap_err();
        assert!(matches!(err, DataError::Io { .. }));
    }

    #[test]
    fn label_column_is_skipped() {
        let file = write_temp("name,x,y\na,1,2\nb,3,4\n");
        let options = CsvOptions {
            label_column: Some(0),
            ..CsvOptions::default()
        };
        let d = load_csv(file.path(), &options).unwrap();
        assert_eq!(d.n_cols(), 2);
        assert_eq!(d.column_names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(d.values().get(1, 0), 3.0);
    }

    #[test]
    fn label_column_out_of_range() {
        let file = write_temp("x,y\n1,2\n3,4\n");
        let options = CsvOptions {
            label_column: Some(5),
            ..CsvOptions::default()
        };
        assert!(matches!(
            load_csv(file.path(), &options),
            Err(DataError::LabelColumnOutOfRange { index: 5, cols: 2 })
        ));
    }

    #[test]
    fn tab_delimiter() {
        let file = write_temp("x\ty\n1\t2\n3\t4\n");
        let options = CsvOptions {
            delimiter: '\t',
            ..CsvOptions::default()
        };
        let d = load_csv(file.path(), &options).unwrap();
        assert_eq!(d.values().get(1, 1), 4.0);
    }

    #[test]
    fn covariance_closed_form_three_points() {
        // rows (0,0), (1,0), (0,1): Σ = [[1/3, -1/6], [-1/6, 1/3]]
        let file = write_temp("x,y\n0,0\n1,0\n0,1\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        let est = center_and_covariance(&d);
        assert!((est.means[0] - 1.0 / 3.0).abs() <= 1e-15);
        assert!((est.sigma.get(0, 0) - 1.0 / 3.0).abs() <= 1e-15);
        assert!((est.sigma.get(0, 1) + 1.0 / 6.0).abs() <= 1e-15);
        assert!((est.sigma.get(1, 1) - 1.0 / 3.0).abs() <= 1e-15);
        assert_eq!(est.denominator, CovarianceDenominator::NMinusOne);
    }

    #[test]
    fn covariance_closed_form_two_points() {
        // rows (0,0), (2,2): means (1,1), Σ = [[2,2],[2,2]] with n-1
        let file = write_temp("x,y\n0,0\n2,2\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        let est = center_and_covariance(&d);
        assert_eq!(est.means, vec![1.0, 1.0]);
        assert_eq!(est.sigma.get(0, 0), 2.0);
        assert_eq!(est.sigma.get(0, 1), 2.0);
        assert_eq!(est.sigma.get(1, 1), 2.0);
        // maximum-likelihood divisor halves everything
        let ml = center_and_covariance_with(&d, CovarianceDenominator::N);
        assert_eq!(ml.sigma.get(0, 0), 1.0);
        assert_eq!(ml.denominator.label(), "n");
    }

    #[test]
    fn covariance_is_exactly_symmetric() {
        let file = write_temp("a,b,c\n1,2,3\n4,5,6\n7,8,10\n2,0,1\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        let est = center_and_covariance(&d);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(est.sigma.get(i, j), est.sigma.get(j, i));
            }
        }
    }

    #[test]
    fn constant_column_gives_zero_variance() {
        let file = write_temp("x,y\n1,5\n2,5\n3,5\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        let est = center_and_covariance(&d);
        assert_eq!(est.sigma.get(1, 1), 0.0);
        assert_eq!(est.sigma.get(0, 1), 0.0);
    }

    #[test]
    fn rescaling_commutes_with_covariance() {
        let file = write_temp("a,b,c\n1,2,3\n4,5,6\n7,8,10\n2,0,1\n-1,3,2\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        let c = Rescaling::new(vec![0.394, 2.205, 0.394]).unwrap();
        let direct = center_and_covariance(&apply_rescaling(&d, &c).unwrap());
        let via_sigma =
            crate::invariance::rescale_covariance(&center_and_covariance(&d).sigma, &c).unwrap();
        let scale = via_sigma.max_abs();
        assert!(
            direct.sigma.as_mat().max_abs_diff(via_sigma.as_mat()) <= 1e-12 * scale,
            "rescaling data then estimating must match rescaling the estimate"
        );
    }

    #[test]
    fn apply_rescaling_checks_dimensions() {
        let file = write_temp("x,y\n1,2\n3,4\n");
        let d = load_csv(file.path(), &CsvOptions::default()).unwrap();
        let c = Rescaling::new(vec![1.0]).unwrap();
        assert!(matches!(
            apply_rescaling(&d, &c),
            Err(DataError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn loads_square_matrix() {
        let file = write_temp("2,1\n1,2\n");
        let m = load_matrix_csv(file.path(), ',').unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.get(0, 1), 1.0);
    }

    #[test]
    fn matrix_loader_rejects_non_square() {
        let file = write_temp("1,2\n3,4\n5,6\n");
        assert!(matches!(
            load_matrix_csv(file.path(), ','),
            Err(DataError::DimensionMismatch { .. })
        ));
        let empty = write_temp("\n\n");
        assert!(matches!(
            load_matrix_csv(empty.path(), ','),
            Err(DataError::EmptyFile { .. })
        ));
    }

    #[test]
    fn dataset_constructor_validates() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(Dataset::new(m.clone(), vec!["a".into(), "b".into()]).is_ok());
        assert!(matches!(
            Dataset::new(m.clone(), vec!["a".into()]),
            Err(DataError::DimensionMismatch { .. })
        ));
        let short = Mat::from_rows(&[vec![1.0, 2.0]]);
        assert!(matches!(
            Dataset::new(short, vec!["a".into(), "b".into()]),
            Err(DataError::TooFewRows { rows: 1 })
        ));
        let mut bad = m;
        bad.set(0, 0, f64::NAN);
        assert!(matches!(
            Dataset::new(bad, vec!["a".into(), "b".into()]),
            Err(DataError::NonFiniteValue { row: 1, col: 1 })
        ));
    }
}
