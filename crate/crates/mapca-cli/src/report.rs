//! Serializable report types and the number formatting shared by every
//! output path.
//!
//! All floating-point values are rounded to 12 significant digits at
//! report construction, so identical inputs always produce byte-identical
//! JSON and CSV artifacts. Non-finite values become `null` in JSON and
//! `inf`/`-inf`/`nan` in CSV.

use serde::Serialize;

/// Rounds to 12 significant digits; collapses `-0.0` to `0.0` and passes
/// non-finite values through.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn round_vec(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&x| round_sig12(x)).collect()
}

/// Shortest decimal representation of the rounded value, for CSV cells.
pub fn fmt_csv(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{}", round_sig12(x))
}

/// Pretty JSON with a trailing newline; field order follows the struct
/// declaration, so the bytes are stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub rows: usize,
    pub columns: Vec<String>,
    pub metric: String,
    pub covariance_denominator: String,
    pub eigenvalues: Vec<f64>,
    pub condition_number: f64,
    pub variance_explained: Vec<f64>,
    /// One loading vector per component, largest eigenvalue first.
    pub components: Vec<Vec<f64>>,
    pub degenerate: Vec<bool>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub kappa: f64,
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub input: String,
    pub metric_family: String,
    pub entries: Vec<SweepRow>,
}

#[derive(Debug, Serialize)]
pub struct InvarianceJson {
    pub input: String,
    pub metric: String,
    pub scales: Vec<f64>,
    pub verdict: String,
    pub eigenvalues_original: Vec<f64>,
    pub eigenvalues_rescaled: Vec<f64>,
    pub eigenvalue_deviation: f64,
    pub loading_deviation: Option<f64>,
    pub metric_condition_holds: bool,
    pub metric_condition_residual: f64,
    pub pc1_coefficient_ratio: Option<Vec<f64>>,
    pub skipped_components: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct SslRow {
    pub method: String,
    pub metric: String,
    pub beta: Option<f64>,
    pub kappa: f64,
}

#[derive(Debug, Serialize)]
pub struct SslTableReport {
    pub input: String,
    pub rows: Vec<SslRow>,
}

#[derive(Debug, Serialize)]
pub struct BallPanelJson {
    pub metric: String,
    pub metric_matrix: Vec<Vec<f64>>,
    pub kappa: f64,
    pub eigenvalues: Vec<f64>,
    /// Principal axes as Euclidean-unit directions scaled by the square
    /// root of their eigenvalue.
    pub axes: Vec<Vec<f64>>,
    /// Boundary samples as `[theta, x, y]` rows.
    pub boundary: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct BallReport {
    pub input: String,
    pub dims: Vec<usize>,
    pub points: usize,
    pub panels: Vec<BallPanelJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)] // the literal is the expected rounded output
    fn rounding_keeps_twelve_significant_digits() {
        assert_eq!(round_sig12(0.0), 0.0);
        assert_eq!(round_sig12(-0.0), 0.0);
        assert!(round_sig12(-0.0).is_sign_positive());
        assert_eq!(round_sig12(1.0), 1.0);
        assert_eq!(round_sig12(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_sig12(-1.0 / 3.0), -0.333333333333);
        assert_eq!(round_sig12(1.00000000000049), 1.0);
        assert_eq!(round_sig12(123456789012345.0), 123456789012000.0);
        assert!(round_sig12(f64::INFINITY).is_infinite());
        assert!(round_sig12(f64::NAN).is_nan());
    }

    #[test]
    fn csv_formatting_is_shortest_and_names_non_finite() {
        assert_eq!(fmt_csv(1.5), "1.5");
        assert_eq!(fmt_csv(-0.0), "0");
        assert_eq!(fmt_csv(f64::INFINITY), "inf");
        assert_eq!(fmt_csv(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_csv(f64::NAN), "nan");
        assert_eq!(fmt_csv(0.25), "0.25");
    }

    #[test]
    fn json_bytes_are_stable_and_order_preserving() {
        let report = SslTableReport {
            input: "x.csv".to_string(),
            rows: vec![SslRow {
                method: "Standard PCA".to_string(),
                metric: "identity".to_string(),
                beta: Some(0.0),
                kappa: 4.0,
            }],
        };
        let first = to_json(&report);
        let second = to_json(&report);
        assert_eq!(first, second);
        let input_pos = first.find("\"input\"").unwrap();
        let rows_pos = first.find("\"rows\"").unwrap();
        assert!(input_pos < rows_pos, "fields must keep declaration order");
        assert!(first.ends_with('\n'));
    }

    #[test]
    fn non_finite_serializes_as_null() {
        #[derive(Serialize)]
        struct Holder {
            value: f64,
        }
        let text = serde_json::to_string(&Holder {
            value: f64::INFINITY,
        })
        .unwrap();
        assert_eq!(text, r#"{"value":null}"#);
    }
}
