//! CSV ingestion, command dispatch, and report rendering behind the
//! `dea-bench` binary.

use std::path::{Path, PathBuf};

use crate::data::{validate_dataset, Dataset, DmuRecord, RawDataset, TargetVector};
use crate::dea::{Engine, LayerAssignment, TargetPlan, DEFAULT_ALPHAS};
use crate::error::{Error, Result};
use crate::oracle::{FrontierFaces, TwoStepOracle};

/// Largest disagreement between a solver objective and its oracle that still
/// counts as certified.
pub const CERTIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Peel the data into performance levels.
    Classify,
    /// Closest targets on the first frontier for every inefficient unit.
    Targets,
    /// Intermediate and final targets across two frontiers.
    TwoStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub command: Command,
    pub alphas: Vec<f64>,
    pub depth: usize,
    /// Restrict the report to these unit ids.
    pub dmus: Option<Vec<String>>,
    pub format: Format,
    pub certify: bool,
    pub feas_tol: Option<f64>,
    pub opt_tol: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command, input_path: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            command,
            alphas: DEFAULT_ALPHAS.to_vec(),
            depth: 2,
            dmus: None,
            format: Format::Csv,
            certify: false,
            feas_tol: None,
            opt_tol: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(&a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidAlpha(a));
        }
        if self.depth == 0 {
            return Err(Error::InvalidProblem("--depth must be at least 1".into()));
        }
        if self.command == Command::TwoStep && self.depth < 2 {
            return Err(Error::InvalidProblem(
                "two-step needs --depth of at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Process exit status for a failed run: 3 for solver trouble, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_solver_failure() {
        3
    } else {
        2
    }
}

pub fn parse_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_csv_str(&text)
}

pub fn parse_csv_str(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::MalformedHeader(e.to_string()))?
        .clone();

    if header.get(0) != Some("id") {
        return Err(Error::MalformedHeader("first column must be `id`".into()));
    }
    let mut input_names = Vec::new();
    let mut output_names = Vec::new();
    for field in header.iter().skip(1) {
        if let Some(name) = field.strip_prefix("in:") {
            if !output_names.is_empty() {
                return Err(Error::MalformedHeader(format!(
                    "input column `{field}` after an output column"
                )));
            }
            input_names.push(name.to_string());
        } else if let Some(name) = field.strip_prefix("out:") {
            output_names.push(name.to_string());
        } else {
            return Err(Error::MalformedHeader(format!(
                "column `{field}` lacks an `in:` or `out:` prefix"
            )));
        }
    }
    if input_names.is_empty() || output_names.is_empty() {
        return Err(Error::MalformedHeader(
            "need at least one `in:` and one `out:` column".into(),
        ));
    }
    if let Some(name) = input_names
        .iter()
        .chain(&output_names)
        .find(|n| n.is_empty())
    {
        return Err(Error::MalformedHeader(format!(
            "empty variable name `{name}`"
        )));
    }

    let m = input_names.len();
    let mut dmus = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::Parse {
                row,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut values = Vec::with_capacity(record.len() - 1);
        for (c, field) in record.iter().enumerate().skip(1) {
            let value = field.parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("`{field}` is not a number"),
            })?;
            values.push(value);
        }
        let outputs = values.split_off(m);
        dmus.push(DmuRecord::new(&record[0], values, outputs));
    }
    validate_dataset(RawDataset {
        input_names,
        output_names,
        dmus,
    })
}

/// Renders `ds` in the schema `parse_csv` reads, with round-trip precision.
pub fn write_dataset_csv(ds: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("id".to_string())
        .chain(ds.input_names().iter().map(|n| format!("in:{n}")))
        .chain(ds.output_names().iter().map(|n| format!("out:{n}")));
    w.write_record(header).expect("in-memory write");
    for d in ds.dmus() {
        let row = std::iter::once(d.id.clone())
            .chain(d.inputs.iter().chain(&d.outputs).map(|v| v.to_string()));
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(usize),
    Num(f64),
    Flag(bool),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    /// Machine name used in CSV headers and JSON keys.
    pub key: String,
    /// Human header used in markdown.
    pub label: String,
}

impl Column {
    fn new(key: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<Column>,
    pub rows: Vec<ReportRow>,
}

fn markdown_number(v: f64) -> String {
    let s = format!("{v:.3}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.columns.iter().map(|c| c.key.as_str()))
                .expect("in-memory write");
            for row in &report.rows {
                w.write_record(row.cells.iter().map(|cell| match cell {
                    Cell::Text(t) => t.clone(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(v) => v.to_string(),
                    Cell::Flag(b) => b.to_string(),
                    Cell::Empty => String::new(),
                }))
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
        Format::Markdown => {
            let mut out = String::new();
            let labels: Vec<&str> = report.columns.iter().map(|c| c.label.as_str()).collect();
            out.push_str(&format!("| {} |\n", labels.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(labels.len())));
            for row in &report.rows {
                let cells: Vec<String> = row
                    .cells
                    .iter()
                    .map(|cell| match cell {
                        Cell::Text(t) => t.replace('|', "\\|"),
                        Cell::Int(i) => i.to_string(),
                        Cell::Num(v) => markdown_number(*v),
                        Cell::Flag(true) => "yes".into(),
                        Cell::Flag(false) => "no".into(),
                        Cell::Empty => "-".into(),
                    })
                    .collect();
                out.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
            out
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = report
                .rows
                .iter()
                .map(|row| {
                    let object = report
                        .columns
                        .iter()
                        .zip(&row.cells)
                        .map(|(col, cell)| {
                            let value = match cell {
                                Cell::Text(t) => serde_json::Value::from(t.as_str()),
                                Cell::Int(i) => serde_json::Value::from(*i),
                                Cell::Num(v) => serde_json::Number::from_f64(*v)
                                    .map(serde_json::Value::Number)
                                    .unwrap_or(serde_json::Value::Null),
                                Cell::Flag(b) => serde_json::Value::from(*b),
                                Cell::Empty => serde_json::Value::Null,
                            };
                            (col.key.clone(), value)
                        })
                        .collect();
                    serde_json::Value::Object(object)
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&rows).expect("plain values");
            text.push('\n');
            text
        }
    }
}

/// A rendered report plus the number of rows whose certification failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub text: String,
    pub certification_failures: usize,
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let ds = parse_csv(&config.input_path)?;
    run_on(&ds, config)
}

/// Same as [`run`] on an already parsed dataset; `input_path` is ignored.
pub fn run_on(ds: &Dataset, config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let selected = selection(ds, config.dmus.as_deref())?;
    let engine = Engine::with_tolerances(config.feas_tol, config.opt_tol);
    let mut failures = 0;
    let report = match config.command {
        Command::Classify => {
            let layers = engine.peel_layers(ds, config.depth)?;
            classify_report(ds, &layers, &selected)
        }
        Command::Targets => targets_report(&engine, ds, &selected, config.certify, &mut failures)?,
        Command::TwoStep => {
            let layers = engine.peel_layers(ds, config.depth)?;
            two_step_report(&engine, ds, &layers, &selected, config, &mut failures)?
        }
    };
    let text = emit_report(&report, config.format);
    Ok(RunOutput {
        report,
        text,
        certification_failures: failures,
    })
}

/// Per-unit inclusion flags.
fn selection(ds: &Dataset, filter: Option<&[String]>) -> Result<Vec<bool>> {
    match filter {
        None => Ok(vec![true; ds.len()]),
        Some(ids) => {
            let mut keep = vec![false; ds.len()];
            for id in ids {
                keep[ds.index_of(id)?] = true;
            }
            Ok(keep)
        }
    }
}

fn vector_columns(ds: &Dataset, key: &str, label: &str) -> Vec<Column> {
    ds.input_names()
        .iter()
        .chain(ds.output_names())
        .map(|n| Column::new(format!("{key}:{n}"), format!("{label} {n}")))
        .collect()
}

fn vector_cells(v: &TargetVector) -> impl Iterator<Item = Cell> + '_ {
    v.components().map(Cell::Num)
}

fn certify_columns(columns: &mut Vec<Column>) {
    columns.push(Column::new("oracle", "oracle"));
    columns.push(Column::new("certified", "certified"));
}

fn certify_cells(cells: &mut Vec<Cell>, ours: f64, oracle: f64, failures: &mut usize) {
    let ok = (ours - oracle).abs() <= CERTIFY_TOL;
    if !ok {
        *failures += 1;
    }
    cells.push(Cell::Num(oracle));
    cells.push(Cell::Flag(ok));
}

fn classify_report(ds: &Dataset, layers: &LayerAssignment, selected: &[bool]) -> Report {
    let rows = (0..ds.len())
        .filter(|&j| selected[j])
        .map(|j| ReportRow {
            cells: vec![
                Cell::Text(ds.dmu(j).id.clone()),
                Cell::Int(layers.level_of(j)),
            ],
        })
        .collect();
    Report {
        columns: vec![Column::new("id", "DMU"), Column::new("level", "level")],
        rows,
    }
}

fn targets_report(
    engine: &Engine,
    ds: &Dataset,
    selected: &[bool],
    certify: bool,
    failures: &mut usize,
) -> Result<Report> {
    let all: Vec<usize> = (0..ds.len()).collect();
    let e = engine.classify_efficient(ds, &all)?;
    let faces = if certify {
        Some(FrontierFaces::new(engine, ds, &e)?)
    } else {
        None
    };

    let mut columns = vec![Column::new("id", "DMU")];
    columns.extend(vector_columns(ds, "actual", "actual"));
    columns.extend(vector_columns(ds, "target", "target"));
    columns.push(Column::new("gap", "gap"));
    if certify {
        certify_columns(&mut columns);
    }

    let mut rows = Vec::new();
    for j in (0..ds.len()).filter(|&j| selected[j] && e.binary_search(&j).is_err()) {
        let t = engine.closest_targets(ds, &e, j)?;
        let mut cells = vec![Cell::Text(ds.dmu(j).id.clone())];
        cells.extend(vector_cells(&ds.dmu(j).bundle()));
        cells.extend(vector_cells(&t.target));
        cells.push(Cell::Num(t.objective));
        if let Some(faces) = &faces {
            let (_, oracle) = faces.closest(engine, ds, &ds.dmu(j).bundle())?;
            certify_cells(&mut cells, t.objective, oracle, failures);
        }
        rows.push(ReportRow { cells });
    }
    Ok(Report { columns, rows })
}

fn two_step_report(
    engine: &Engine,
    ds: &Dataset,
    layers: &LayerAssignment,
    selected: &[bool],
    config: &RunConfig,
    failures: &mut usize,
) -> Result<Report> {
    let e = layers.first();
    let e1 = layers.second().expect("depth checked");
    let oracle = if config.certify {
        Some(TwoStepOracle::new(engine, ds, e, e1)?)
    } else {
        None
    };

    let mut columns = vec![
        Column::new("id", "DMU"),
        Column::new("level", "level"),
        Column::new("alpha", "alpha"),
    ];
    columns.extend(vector_columns(ds, "step1", "1st step"));
    columns.extend(vector_columns(ds, "step2", "2nd step"));
    columns.push(Column::new("gap1", "gap 1st"));
    columns.push(Column::new("gap2", "gap 2nd"));
    columns.push(Column::new("total", "total"));
    if config.certify {
        certify_columns(&mut columns);
    }

    // second-level rows have a single step, so their total is the whole gap
    let row = |plan: &TargetPlan, alpha: Option<f64>| -> Vec<Cell> {
        let mut cells = vec![
            Cell::Text(plan.dmu_id.clone()),
            Cell::Int(layers.level_of(plan.dmu)),
            alpha.map_or(Cell::Empty, Cell::Num),
        ];
        cells.extend(vector_cells(&plan.intermediate));
        cells.extend(vector_cells(&plan.final_target));
        cells.push(Cell::Num(plan.gaps.step1));
        cells.push(Cell::Num(plan.gaps.step2));
        cells.push(Cell::Num(match alpha {
            Some(_) => plan.objective(),
            None => plan.gaps.step1 + plan.gaps.step2,
        }));
        cells
    };

    let mut rows = Vec::new();
    for j in (0..ds.len()).filter(|&j| selected[j]) {
        match layers.level_of(j) {
            1 => {}
            2 => {
                let plan = engine.benchmark_level2(ds, e, e1, j)?;
                let mut cells = row(&plan, None);
                if let Some(oracle) = &oracle {
                    let (_, direct) = oracle.outer().closest(engine, ds, &ds.dmu(j).bundle())?;
                    certify_cells(&mut cells, plan.gaps.step2, direct, failures);
                }
                rows.push(ReportRow { cells });
            }
            _ => {
                for &alpha in &config.alphas {
                    let plan = engine.two_step_targets(ds, e, e1, j, alpha)?;
                    let mut cells = row(&plan, Some(alpha));
                    if let Some(oracle) = &oracle {
                        let value = oracle.two_step(j, alpha)?;
                        certify_cells(&mut cells, plan.objective(), value.objective, failures);
                    }
                    rows.push(ReportRow { cells });
                }
            }
        }
    }
    Ok(Report { columns, rows })
}
