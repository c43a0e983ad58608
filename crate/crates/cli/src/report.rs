//! Report files. Floating-point values in CSV are written with 17
//! significant digits; infinite distances use the `inf` sentinel.

use std::path::Path;

use cfs_core::linalg::CMatrix;
use cfs_core::Tolerances;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub name: String,
    pub content: String,
}

/// The files produced by one command; the first is the primary report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportBundle {
    pub files: Vec<ReportFile>,
}

impl ReportBundle {
    pub fn push(&mut self, name: &str, content: String) {
        self.files.push(ReportFile {
            name: name.into(),
            content,
        });
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.content.as_str())
    }

    pub fn primary(&self) -> &str {
        self.files.first().map_or("", |f| f.content.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> CliResult<()> {
        let io = |p: &Path, e: std::io::Error| CliError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for f in &self.files {
            let p = dir.join(&f.name);
            std::fs::write(&p, &f.content).map_err(|e| io(&p, e))?;
        }
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Comment line embedding the tolerances, for CSV and DOT headers.
pub fn tolerance_comment(prefix: &str, tol: &Tolerances) -> String {
    format!(
        "{prefix} tolerances: eig_rel={} imag_rel={} zero_abs={}\n",
        num(tol.eig_rel),
        num(tol.imag_rel),
        num(tol.zero_abs)
    )
}

/// Square CSV table labelled by ids in both directions.
pub fn labelled_matrix(ids: &[String], cell: impl Fn(usize, usize) -> String) -> String {
    let mut s = String::from("id");
    for id in ids {
        s.push(',');
        s.push_str(id);
    }
    s.push('\n');
    for (i, id) in ids.iter().enumerate() {
        s.push_str(id);
        for j in 0..ids.len() {
            s.push(',');
            s.push_str(&cell(i, j));
        }
        s.push('\n');
    }
    s
}

/// Complex matrix as nested `[re, im]` rows for JSON reports.
pub fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}
