use std::io::Write;
use std::path::Path;

use catlens::ValidationReport;
use serde::Serialize;

use crate::Format;

#[derive(Serialize)]
struct ReportDoc<'a> {
    verdict: &'static str,
    violations: Vec<ViolationDoc<'a>>,
}

#[derive(Serialize)]
struct ViolationDoc<'a> {
    law: &'a str,
    witness: &'a [String],
}

pub fn verdict(report: &ValidationReport) -> &'static str {
    if report.is_valid() {
        "valid"
    } else {
        "invalid"
    }
}

/// Renders a report; `notes` only appear in the text form.
pub fn render_report(report: &ValidationReport, notes: &[String], format: Format) -> String {
    match format {
        Format::Json => {
            let doc = ReportDoc {
                verdict: verdict(report),
                violations: report
                    .violations()
                    .iter()
                    .map(|v| ViolationDoc { law: &v.law, witness: &v.witness })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("verdict: {}\n", verdict(report));
            if !report.is_valid() {
                s.push_str(&format!("violations: {}\n", report.violations().len()));
                for v in report.violations() {
                    s.push_str(&format!("  {v}\n"));
                }
            }
            for n in notes {
                s.push_str(&format!("note: {n}\n"));
            }
            s
        }
    }
}

/// Replaces `path` with `contents` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
