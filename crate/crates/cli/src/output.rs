//! Files written by `run` and `emit`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::config::Method;
use crate::run::{ComparisonRecord, Summary};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown record field `{0}`")]
    UnknownField(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.display().to_string(), source }
}

/// Six significant digits, fixed notation unless the magnitude is extreme.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade, e.g. 9.999996 → 10.0000
    let exp = if format!("{:.5e}", x.abs()).ends_with(&format!("e{}", exp + 1)) { exp + 1 } else { exp };
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per state; method values in config order. Full round-trip precision.
pub fn write_records_csv<W: Write>(methods: &[Method], records: &[ComparisonRecord], w: W) -> Result<(), OutputError> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header: Vec<String> = ["state_index", "state_seed", "s_c", "s_ab", "rank_c"].map(String::from).to_vec();
    header.extend(methods.iter().map(|m| format!("delta_s_{m}")));
    header.extend(["relative_error", "relative_to", "relative_error_flagged", "notes"].map(String::from));
    wtr.write_record(&header)?;
    for r in records {
        let mut row = vec![r.state_index.to_string(), r.state_seed.to_string(), r.s_c.to_string(), r.s_ab.to_string(), r.rank_c.to_string()];
        row.extend(methods.iter().map(|&m| opt(r.delta_s(m))));
        row.push(opt(r.relative_error));
        row.push(r.relative_to.map(|m| m.to_string()).unwrap_or_default());
        row.push(r.relative_error_flagged.to_string());
        let notes: Vec<String> =
            r.methods.iter().filter_map(|o| o.note.as_ref().map(|n| format!("{}: {n}", o.method))).collect();
        row.push(notes.join("; "));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| OutputError::Csv(e.into()))?;
    Ok(())
}

pub fn write_timings_csv<W: Write>(methods: &[Method], records: &[ComparisonRecord], w: W) -> Result<(), OutputError> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["state_index".to_string()];
    header.extend(methods.iter().map(|m| format!("seconds_{m}")));
    wtr.write_record(&header)?;
    for r in records {
        let mut row = vec![r.state_index.to_string()];
        row.extend(methods.iter().map(|&m| {
            r.methods.iter().find(|o| o.method == m).map(|o| format!("{:.6}", o.seconds)).unwrap_or_default()
        }));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| OutputError::Csv(e.into()))?;
    Ok(())
}

/// Looks up a numeric field of a record: a top-level field or a method name.
pub fn record_field(r: &ComparisonRecord, field: &str) -> Result<Option<f64>, OutputError> {
    Ok(match field {
        "state_index" | "index" => Some(r.state_index as f64),
        "s_c" => Some(r.s_c),
        "s_ab" => Some(r.s_ab),
        "rank_c" => Some(r.rank_c as f64),
        "relative_error" => r.relative_error,
        // the reference permutation value used for the relative error
        "perm" => r.relative_to.and_then(|m| r.delta_s(m)),
        other => {
            let name = other.strip_prefix("delta_s_").unwrap_or(other);
            let m: Method = name.parse().map_err(|_| OutputError::UnknownField(field.into()))?;
            r.delta_s(m)
        }
    })
}

fn check_field(field: &str) -> Result<(), OutputError> {
    const PLAIN: [&str; 7] = ["state_index", "index", "s_c", "s_ab", "rank_c", "relative_error", "perm"];
    let name = field.strip_prefix("delta_s_").unwrap_or(field);
    if PLAIN.contains(&field) || name.parse::<Method>().is_ok() {
        Ok(())
    } else {
        Err(OutputError::UnknownField(field.into()))
    }
}

/// Two whitespace-separated columns, one line per record with both values present.
pub fn emit_dat<W: Write>(records: &[ComparisonRecord], x: &str, y: &str, mut w: W) -> Result<usize, OutputError> {
    // field names are checked even when there are no records
    check_field(x)?;
    check_field(y)?;
    let mut lines = 0;
    let mut out = String::new();
    for r in records {
        if let (Some(a), Some(b)) = (record_field(r, x)?, record_field(r, y)?) {
            out.push_str(&format!("{} {}\n", format_sig6(a), format_sig6(b)));
            lines += 1;
        }
    }
    w.write_all(out.as_bytes()).map_err(|source| OutputError::Io { path: "<dat>".into(), source })?;
    Ok(lines)
}

pub fn emit_dat_file(records: &[ComparisonRecord], x: &str, y: &str, path: &Path) -> Result<usize, OutputError> {
    let mut buf = Vec::new();
    let n = emit_dat(records, x, y, &mut buf)?;
    fs::write(path, buf).map_err(io_err(path))?;
    Ok(n)
}

pub fn write_summary_json(summary: &Summary, path: &Path) -> Result<(), OutputError> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_summary_json(path: &Path) -> Result<Summary, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Files produced by a run, relative to the output directory.
pub const RUN_FILES: [&str; 5] = ["records.csv", "summary.json", "timings.csv", "perm_vs_adam.dat", "relative_error.dat"];

pub fn write_run_outputs(summary: &Summary, dir: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let methods = &summary.config.methods;
    let records = &summary.records;

    let mut buf = Vec::new();
    write_records_csv(methods, records, &mut buf)?;
    let p = dir.join("records.csv");
    fs::write(&p, buf).map_err(io_err(&p))?;

    let mut buf = Vec::new();
    write_timings_csv(methods, records, &mut buf)?;
    let p = dir.join("timings.csv");
    fs::write(&p, buf).map_err(io_err(&p))?;

    write_summary_json(summary, &dir.join("summary.json"))?;
    emit_dat_file(records, "perm", "adam", &dir.join("perm_vs_adam.dat"))?;
    emit_dat_file(records, "state_index", "relative_error", &dir.join("relative_error.dat"))?;
    Ok(())
}
