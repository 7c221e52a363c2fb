use std::path::Path;

use crate::error::{Error, Result};

use super::study::{StudyResult, StudyRow};

pub const CSV_HEADER: [&str; 14] = [
    "kind",
    "n_fine",
    "n_coarse",
    "h",
    "H",
    "N",
    "err_fv_fine",
    "err_fv_coarse",
    "err_nirb",
    "eps_proxy",
    "t_offline_s",
    "t_online_s",
    "t_fine_solve_s",
    "nested",
];

/// Columns that hold wall-clock times.
pub const TIMING_COLUMNS: [&str; 3] = ["t_offline_s", "t_online_s", "t_fine_solve_s"];

const PLOT_SCRIPT: &str = r#"set datafile separator ','
set datafile columnheaders
set logscale xy
set format xy '%g'
set key top left
set xlabel 'h'
set ylabel 'relative error'
set terminal pngcairo size 800,600
set output 'study.png'
plot 'study.csv' using 'h':'err_fv_fine' with linespoints title 'FV fine', \
     '' using 'h':'err_fv_coarse' with linespoints title 'FV coarse', \
     '' using 'h':'err_nirb' with linespoints title 'NIRB'
"#;

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn record(row: &StudyRow) -> [String; 14] {
    [
        row.kind.to_string(),
        row.n_fine.to_string(),
        row.n_coarse.to_string(),
        float(row.h),
        float(row.big_h),
        row.basis_size.to_string(),
        float(row.err_fv_fine),
        float(row.err_fv_coarse),
        float(row.err_nirb),
        float(row.eps_proxy),
        float(row.t_offline_s),
        float(row.t_online_s),
        float(row.t_fine_solve_s),
        row.nested.to_string(),
    ]
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("study csv: {e}"))
}

pub fn study_csv(result: &StudyResult) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in &result.rows {
        writer.write_record(record(row)).map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn parse_study_csv(text: &str) -> Result<StudyResult> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    let rows = reader
        .deserialize::<StudyRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(csv_error)?;
    Ok(StudyResult { rows })
}

pub fn read_study_csv(path: &Path) -> Result<StudyResult> {
    parse_study_csv(&std::fs::read_to_string(path)?)
}

pub fn plot_script() -> &'static str {
    PLOT_SCRIPT
}

/// Writes `study.csv` and `plot.gp` into `out_dir`, creating it if needed.
pub fn emit_outputs(result: &StudyResult, out_dir: &Path) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument("study result has no rows".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("study.csv"), study_csv(result)?)?;
    std::fs::write(out_dir.join("plot.gp"), PLOT_SCRIPT)?;
    Ok(())
}
