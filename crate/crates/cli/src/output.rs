//! Atomic artifact writing: everything lands via write-temp-then-rename so
//! a crashed run never leaves a half-written report behind.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use pbtk_core::VerificationReport;

use crate::runner::CsvFile;

/// Full report document: run metadata plus the check entries and summary.
#[derive(Serialize)]
pub struct ReportDoc<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub tolerance: f64,
    pub report: &'a VerificationReport,
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d).map_err(|e| format!("cannot create {}: {e}", d.display()))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| format!("cannot create temp file near {}: {e}", path.display()))?;
    tmp.write_all(bytes)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| format!("cannot persist {}: {e}", path.display()))?;
    Ok(())
}

pub fn write_report(path: &Path, doc: &ReportDoc) -> Result<(), String> {
    let mut bytes = serde_json::to_vec_pretty(doc).map_err(|e| e.to_string())?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_csvs(dir: &Path, csvs: &[CsvFile]) -> Result<(), String> {
    for csv in csvs {
        let mut text = csv.lines.join("\n");
        text.push('\n');
        write_atomic(&dir.join(&csv.name), text.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_creates_parents_and_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.txt");
        write_atomic(&path, b"payload").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"payload");
    }

    #[test]
    fn report_serialization_is_stable() {
        let mut rep = VerificationReport::new();
        rep.push("check-a", 1e-13, 1e-10, "ctx");
        let doc = ReportDoc {
            command: "pf",
            seed: 7,
            tolerance: 1e-10,
            report: &rep,
        };
        let a = serde_json::to_vec_pretty(&doc).unwrap();
        let b = serde_json::to_vec_pretty(&doc).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("\"summary\""));
        assert!(text.contains("\"check-a\""));
    }
}
