//! Subcommand implementations: load data, run the analysis library, and
//! emit reports as JSON, CSV, or human-readable tables.

use std::path::Path;

use mapca::data::{
    center_and_covariance, load_csv, load_matrix_csv, CovarianceEstimate, CsvOptions, Dataset,
};
use mapca::invariance::{verify_invariance_with_floor, Rescaling, Verdict};
use mapca::mat::Mat;
use mapca::metrics::{build_metric_with_floor, MetricSpec, ParsedMetric};
use mapca::solver::{beta_sweep_with_floor, solve_mapca};
use mapca::spectra::SymmetricMatrix;
use mapca::ssl::correspondence_table_with_floor;

use crate::ball::{unit_ball_panels, BallPanel};
use crate::report::{
    fmt_csv, round_sig12, round_vec, to_json, AnalysisReport, BallPanelJson, BallReport,
    InvarianceJson, SslRow, SslTableReport, SweepReport, SweepRow,
};
use crate::{
    parse_delimiter, parse_dims, parse_float_list, spd_floor_from_env, AnalyzeArgs, BallArgs,
    Cli, CliError, Command, InputOptions, SslTableArgs, SweepArgs, VerifyInvarianceArgs,
};

/// Runs the parsed command line to completion.
pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let floor = spd_floor_from_env()?;
    match &cli.command {
        Command::Analyze(args) => analyze(args, floor),
        Command::Sweep(args) => sweep(args, floor),
        Command::VerifyInvariance(args) => verify_invariance_cmd(args, floor),
        Command::SslTable(args) => ssl_table(args, floor),
        Command::Ball(args) => ball_cmd(args, floor),
    }
}

fn load_dataset(input: &InputOptions) -> Result<(Dataset, char), CliError> {
    let delimiter = parse_delimiter(&input.delimiter)?;
    let options = CsvOptions {
        has_header: !input.no_header,
        delimiter,
        label_column: input.label_column,
    };
    let dataset = load_csv(&input.input, &options)?;
    Ok((dataset, delimiter))
}

fn resolve_metric_spec(raw: &str, delimiter: char) -> Result<MetricSpec, CliError> {
    let parsed: ParsedMetric = raw.parse().map_err(CliError::Input)?;
    match parsed {
        ParsedMetric::Spec(spec) => Ok(spec),
        ParsedMetric::ExplicitPath(path) => {
            let matrix = load_matrix_csv(Path::new(&path), delimiter)?;
            Ok(MetricSpec::Explicit(matrix))
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|err| CliError::Input(format!("failed to write {}: {err}", path.display())))
}

fn is_json_path(path: &Path) -> bool {
    path.extension()
        .map(|ext| ext.eq_ignore_ascii_case("json"))
        .unwrap_or(false)
}

fn emit_warnings(warnings: &[String]) {
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_csv(v))
        .collect::<Vec<_>>()
        .join(", ")
}

fn analyze(args: &AnalyzeArgs, floor: f64) -> Result<(), CliError> {
    let (dataset, delimiter) = load_dataset(&args.input)?;
    let est = center_and_covariance(&dataset);
    let spec = resolve_metric_spec(&args.metric, delimiter)?;
    let metric = build_metric_with_floor(&est.sigma, &spec, floor)?;
    let solution = solve_mapca(&est.sigma, &metric)?;
    emit_warnings(&solution.metric.warnings);

    let p = dataset.n_cols();
    let components = (0..p)
        .map(|i| round_vec(&solution.loadings.col(i)))
        .collect();
    let report = AnalysisReport {
        input: args.input.input.display().to_string(),
        rows: dataset.n_rows(),
        columns: dataset.column_names().to_vec(),
        metric: args.metric.clone(),
        covariance_denominator: est.denominator.label().to_string(),
        eigenvalues: round_vec(&solution.eigenvalues),
        condition_number: round_sig12(solution.condition_number),
        variance_explained: round_vec(&solution.variance_explained),
        components,
        degenerate: solution.degenerate.clone(),
        warnings: solution.metric.warnings.clone(),
    };
    let json = to_json(&report);
    match &args.output {
        Some(path) => write_text(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let p = rows.first().map(|r| r.eigenvalues.len()).unwrap_or(0);
    let mut out = String::from("beta,kappa");
    for j in 1..=p {
        out.push_str(&format!(",lambda_{j}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_csv(row.beta));
        out.push(',');
        out.push_str(&fmt_csv(row.kappa));
        for &lambda in &row.eigenvalues {
            out.push(',');
            out.push_str(&fmt_csv(lambda));
        }
        out.push('\n');
    }
    out
}

fn sweep(args: &SweepArgs, floor: f64) -> Result<(), CliError> {
    let (dataset, _) = load_dataset(&args.input)?;
    let est = center_and_covariance(&dataset);
    let betas = parse_float_list(&args.betas, "betas")?;
    let entries = beta_sweep_with_floor(&est.sigma, &betas, floor)?;
    let rows: Vec<SweepRow> = entries
        .iter()
        .map(|entry| {
            emit_warnings(&entry.warnings);
            SweepRow {
                beta: round_sig12(entry.beta),
                kappa: round_sig12(entry.kappa),
                eigenvalues: round_vec(&entry.eigenvalues),
                warnings: entry.warnings.clone(),
            }
        })
        .collect();
    match &args.output {
        Some(path) if is_json_path(path) => {
            let report = SweepReport {
                input: args.input.input.display().to_string(),
                metric_family: "power".to_string(),
                entries: rows,
            };
            write_text(path, &to_json(&report))
        }
        Some(path) => write_text(path, &sweep_csv(&rows)),
        None => {
            println!("{:>8}  {:>12}", "beta", "kappa");
            for row in &rows {
                println!("{:>8.3}  {:>12.3}", row.beta, row.kappa);
            }
            Ok(())
        }
    }
}

fn verify_invariance_cmd(args: &VerifyInvarianceArgs, floor: f64) -> Result<(), CliError> {
    let expected: Option<Verdict> = match &args.expect {
        Some(raw) => Some(raw.parse().map_err(CliError::Input)?),
        None => None,
    };
    let (dataset, delimiter) = load_dataset(&args.input)?;
    let est = center_and_covariance(&dataset);
    let spec = resolve_metric_spec(&args.metric, delimiter)?;
    let scales = parse_float_list(&args.scales, "scales")?;
    let c = Rescaling::new(scales).map_err(|err| CliError::Input(err.to_string()))?;
    let report = verify_invariance_with_floor(&est.sigma, &spec, &c, floor)?;

    let json = InvarianceJson {
        input: args.input.input.display().to_string(),
        metric: args.metric.clone(),
        scales: round_vec(c.scales()),
        verdict: report.verdict.name().to_string(),
        eigenvalues_original: round_vec(&report.eigenvalues_original),
        eigenvalues_rescaled: round_vec(&report.eigenvalues_rescaled),
        eigenvalue_deviation: round_sig12(report.eigenvalue_dev),
        loading_deviation: if report.loading_dev.is_nan() {
            None
        } else {
            Some(round_sig12(report.loading_dev))
        },
        metric_condition_holds: report.condition_holds,
        metric_condition_residual: round_sig12(report.condition_residual),
        pc1_coefficient_ratio: report.pc1_ratio.as_deref().map(round_vec),
        skipped_components: report.skipped_components.clone(),
    };
    match &args.output {
        Some(path) => write_text(path, &to_json(&json))?,
        None => print_invariance_summary(&json),
    }

    if let Some(expected) = expected {
        if expected != report.verdict {
            return Err(CliError::ExpectMismatch {
                expected,
                actual: report.verdict,
            });
        }
    }
    Ok(())
}

fn print_invariance_summary(j: &InvarianceJson) {
    println!("metric: {}", j.metric);
    println!("scales: {}", fmt_list(&j.scales));
    println!("verdict: {}", j.verdict);
    println!("eigenvalues before: {}", fmt_list(&j.eigenvalues_original));
    println!("eigenvalues after:  {}", fmt_list(&j.eigenvalues_rescaled));
    println!("eigenvalue deviation: {:.3e}", j.eigenvalue_deviation);
    match j.loading_deviation {
        Some(dev) => println!("loading deviation: {dev:.3e}"),
        None => println!("loading deviation: n/a (all components degenerate)"),
    }
    println!(
        "metric transformation condition: {} (residual {:.3e})",
        if j.metric_condition_holds {
            "holds"
        } else {
            "violated"
        },
        j.metric_condition_residual
    );
    if let Some(ratio) = &j.pc1_coefficient_ratio {
        println!("leading-loading coefficient ratio: {}", fmt_list(ratio));
    }
    if !j.skipped_components.is_empty() {
        let indices: Vec<String> = j
            .skipped_components
            .iter()
            .map(|i| i.to_string())
            .collect();
        println!("degenerate components skipped: {}", indices.join(", "));
    }
}

fn ssl_table(args: &SslTableArgs, floor: f64) -> Result<(), CliError> {
    let (dataset, _) = load_dataset(&args.input)?;
    let est = center_and_covariance(&dataset);
    let table = correspondence_table_with_floor(&est.sigma, floor)?;
    let rows: Vec<SslRow> = table
        .iter()
        .map(|row| SslRow {
            method: row.method.display_name().to_string(),
            metric: row.metric.label(),
            beta: row.beta.map(round_sig12),
            kappa: round_sig12(row.kappa),
        })
        .collect();
    match &args.output {
        Some(path) => {
            let report = SslTableReport {
                input: args.input.input.display().to_string(),
                rows,
            };
            write_text(path, &to_json(&report))
        }
        None => {
            println!("{:<24} {:<10} {:>6} {:>12}", "method", "metric", "beta", "kappa");
            for row in &rows {
                let beta = row
                    .beta
                    .map(|b| format!("{b}"))
                    .unwrap_or_else(|| "-".to_string());
                println!(
                    "{:<24} {:<10} {:>6} {:>12.3}",
                    row.method, row.metric, beta, row.kappa
                );
            }
            Ok(())
        }
    }
}

fn submatrix2(sigma: &SymmetricMatrix, a: usize, b: usize) -> SymmetricMatrix {
    let rows = vec![
        vec![sigma.get(a, a), sigma.get(a, b)],
        vec![sigma.get(b, a), sigma.get(b, b)],
    ];
    SymmetricMatrix::new(Mat::from_rows(&rows)).expect("submatrix of a finite matrix")
}

fn panel_to_json(panel: &BallPanel) -> BallPanelJson {
    BallPanelJson {
        metric: panel.metric_label.clone(),
        metric_matrix: vec![
            vec![round_sig12(panel.metric.get(0, 0)), round_sig12(panel.metric.get(0, 1))],
            vec![round_sig12(panel.metric.get(1, 0)), round_sig12(panel.metric.get(1, 1))],
        ],
        kappa: round_sig12(panel.kappa),
        eigenvalues: round_vec(&panel.eigenvalues),
        axes: panel
            .axes
            .iter()
            .map(|axis| vec![round_sig12(axis[0]), round_sig12(axis[1])])
            .collect(),
        boundary: panel
            .boundary
            .iter()
            .map(|pt| vec![round_sig12(pt.theta), round_sig12(pt.x), round_sig12(pt.y)])
            .collect(),
    }
}

fn ball_csv(panels: &[BallPanel]) -> String {
    let mut out = String::from("metric,theta,x,y\n");
    for panel in panels {
        for point in &panel.boundary {
            out.push_str(&panel.metric_label);
            out.push(',');
            out.push_str(&fmt_csv(point.theta));
            out.push(',');
            out.push_str(&fmt_csv(point.x));
            out.push(',');
            out.push_str(&fmt_csv(point.y));
            out.push('\n');
        }
    }
    out
}

fn ball_cmd(args: &BallArgs, floor: f64) -> Result<(), CliError> {
    if args.points < 8 {
        return Err(CliError::Input(format!(
            "points must be at least 8, got {}",
            args.points
        )));
    }
    let (dataset, delimiter) = load_dataset(&args.input)?;
    let (a, b) = parse_dims(&args.dims)?;
    let p = dataset.n_cols();
    for idx in [a, b] {
        if idx >= p {
            return Err(CliError::Input(format!(
                "dimension {idx} out of range for {p} variables"
            )));
        }
    }
    let CovarianceEstimate { sigma, .. } = center_and_covariance(&dataset);
    let sub = submatrix2(&sigma, a, b);
    let specs: Vec<(String, MetricSpec)> = args
        .metrics
        .split(',')
        .map(|raw| {
            let raw = raw.trim();
            Ok((raw.to_string(), resolve_metric_spec(raw, delimiter)?))
        })
        .collect::<Result<_, CliError>>()?;
    let panels = unit_ball_panels(&sub, &specs, args.points, floor)?;
    match &args.output {
        Some(path) if is_json_path(path) => {
            let report = BallReport {
                input: args.input.input.display().to_string(),
                dims: vec![a, b],
                points: args.points,
                panels: panels.iter().map(panel_to_json).collect(),
            };
            write_text(path, &to_json(&report))
        }
        Some(path) => write_text(path, &ball_csv(&panels)),
        None => {
            println!(
                "{:<16} {:>10} {:>24}",
                "metric", "kappa", "axis lengths"
            );
            for panel in &panels {
                let lengths: Vec<String> = panel
                    .axes
                    .iter()
                    .map(|axis| format!("{:.3}", (axis[0] * axis[0] + axis[1] * axis[1]).sqrt()))
                    .collect();
                println!(
                    "{:<16} {:>10.3} {:>24}",
                    panel.metric_label,
                    panel.kappa,
                    lengths.join(", ")
                );
            }
            Ok(())
        }
    }
}
