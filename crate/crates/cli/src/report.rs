//! Exit codes, atomic file output, CSV and SVG writers.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use brs_core::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: msg.into() }
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_INFEASIBLE, message: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NegativeVolume(_)
            | Error::TrivialCharacter
            | Error::ZeroGamma
            | Error::ConditionViolated(_)
            | Error::InconsistentConstraints => EXIT_INFEASIBLE,
            Error::IdentityFailure(_) | Error::NegativeIndicator(_) | Error::CertificateFailure { .. } => EXIT_PROPERTY,
            _ => EXIT_CONFIG,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::config(format!("i/o: {e}"))
    }
}

/// Writes via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Comma-separated text with a header and LF line endings.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        debug_assert!(row.iter().all(|f| !f.contains(',') && !f.contains('\n')));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Line chart of (x, y) points as a standalone SVG document.
pub fn svg_polyline(title: &str, points: &[(f64, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let coords: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str(&format!("<title>{}</title>\n", escape(title)));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<line x1=\"{PAD}\" y1=\"{z:.2}\" x2=\"{:.2}\" y2=\"{z:.2}\" stroke=\"#999\"/>\n",
        W - PAD,
        z = sy(0.0)
    ));
    s.push_str(&format!("<line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{:.2}\" stroke=\"#999\"/>\n", H - PAD));
    s.push_str(&format!(
        "<text x=\"{PAD}\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        escape(title)
    ));
    s.push_str(&format!(
        "<text x=\"{PAD}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\">N from {x0} to {x1}; y from {y0:.4} to {y1:.4}</text>\n",
        H - 12.0
    ));
    s.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    ));
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
