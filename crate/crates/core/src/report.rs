//! Run reports and their on-disk form: `report.json`, `tables/*.csv` and
//! `plots/*.svg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{LabError, Result};
use crate::functionals::{DirichletEnergy, NormReport};
use crate::solver::SolutionMeta;
use crate::verifier::{CurvePoint, Verdict};

/// Result of one configured item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outcome {
    Solution(SolutionMeta),
    Norm(NormReport),
    /// `(r, M_ν(u, r))` rows.
    Means { nu: f64, rows: Vec<(f64, f64)> },
    Energy(DirichletEnergy),
    Verdict(Verdict),
    Error { kind: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub id: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Everything that may differ between two runs of the same configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub timestamp: String,
    pub version: String,
    pub workers: usize,
    pub runtimes_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub items: Vec<ItemResult>,
    pub environment: Environment,
}

impl Report {
    pub fn verdicts(&self) -> impl Iterator<Item = (&str, &Verdict)> {
        self.items.iter().filter_map(|i| match &i.outcome {
            Outcome::Verdict(v) => Some((i.id.as_str(), v)),
            _ => None,
        })
    }

    pub fn errors(&self) -> impl Iterator<Item = (&str, &str)> {
        self.items.iter().filter_map(|i| match &i.outcome {
            Outcome::Error { message, .. } => Some((i.id.as_str(), message.as_str())),
            _ => None,
        })
    }

    /// 0 if every verdict passed and no item failed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        let failed = self.verdicts().any(|(_, v)| !v.pass) || self.errors().next().is_some();
        if failed {
            2
        } else {
            0
        }
    }

    /// JSON without the environment block; identical for equal configs.
    pub fn deterministic_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Body<'a> {
            config: &'a RunConfig,
            items: &'a [ItemResult],
        }
        to_json(&Body {
            config: &self.config,
            items: &self.items,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Parse(format!("report: {e}")))
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| LabError::Parse(format!("serializing report: {e}")))
}

/// Optional outputs besides `report.json`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { csv: true, svg: true }
    }
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| LabError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(&path, text).map_err(|source| LabError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

/// `r,M_nu,rhs_bound,slack` rows; `slack = rhs_bound − M_nu`.
pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut s = String::from("r,M_nu,rhs_bound,slack\n");
    for p in curve {
        let _ = writeln!(s, "{},{},{},{}", p.r, p.lhs, p.rhs, p.rhs - p.lhs);
    }
    s
}

fn means_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("r,M_nu,rhs_bound,slack\n");
    for (r, m) in rows {
        let _ = writeln!(s, "{r},{m},,");
    }
    s
}

pub fn shells_csv(shells: &[(f64, f64)]) -> String {
    let mut s = String::from("eps,integral\n");
    for (e, v) in shells {
        let _ = writeln!(s, "{e},{v}");
    }
    s
}

/// Line plot of the given `(label, points)` curves, one polyline each.
pub fn svg_plot(title: &str, curves: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 48.0;
    let pts = curves.iter().flat_map(|c| c.1.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let colors = ["steelblue", "firebrick", "seagreen", "purple"];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    let _ = writeln!(s, r#"<text x="{M}" y="{}" font-size="12">{x0:.3}</text>"#, H - M + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{x1:.3}</text>"#, W - M, H - M + 16.0);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="12">{y0:.3e}</text>"#, H - M);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="12">{y1:.3e}</text>"#, M + 4.0);
    for (k, (label, points)) in curves.iter().enumerate() {
        let color = colors[k % colors.len()];
        let coords: Vec<String> = points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            W - M - 120.0,
            M + 16.0 * (k as f64 + 1.0),
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes the report under `dir` and returns the written paths. Emission is
/// sequential and deterministic apart from the environment block.
pub fn emit(report: &Report, dir: &Path, formats: Formats) -> Result<Vec<PathBuf>> {
    let mut written = vec![write(dir.join("report.json"), &(report.to_json()? + "\n"))?];
    for item in &report.items {
        let stem = file_stem(&item.id);
        match &item.outcome {
            Outcome::Verdict(v) => {
                if formats.csv && !v.curve.is_empty() {
                    written.push(write(dir.join("tables").join(format!("{stem}.csv")), &curve_csv(&v.curve))?);
                }
                if formats.csv && !v.shells.is_empty() {
                    written.push(write(dir.join("tables").join(format!("{stem}_shells.csv")), &shells_csv(&v.shells))?);
                }
                if formats.svg && !v.curve.is_empty() {
                    let lhs = v.curve.iter().map(|p| (p.r, p.lhs)).collect();
                    let rhs = v.curve.iter().map(|p| (p.r, p.rhs)).collect();
                    let svg = svg_plot(&format!("{} {}", v.theorem, item.id), &[("M_nu", lhs), ("bound", rhs)]);
                    written.push(write(dir.join("plots").join(format!("{stem}.svg")), &svg)?);
                }
            }
            Outcome::Means { rows, .. } => {
                if formats.csv {
                    written.push(write(dir.join("tables").join(format!("{stem}.csv")), &means_csv(rows))?);
                }
                if formats.svg {
                    let svg = svg_plot(&item.id, &[("M_nu", rows.clone())]);
                    written.push(write(dir.join("plots").join(format!("{stem}.svg")), &svg)?);
                }
            }
            Outcome::Energy(e) if formats.csv => {
                written.push(write(dir.join("tables").join(format!("{stem}_shells.csv")), &shells_csv(&e.shells))?);
            }
            _ => {}
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schema() {
        let c = curve_csv(&[CurvePoint { r: 0.5, lhs: 1.0, rhs: 1.5 }]);
        let mut lines = c.lines();
        assert_eq!(lines.next(), Some("r,M_nu,rhs_bound,slack"));
        assert_eq!(lines.next(), Some("0.5,1,1.5,0.5"));
    }

    #[test]
    fn svg_has_one_polyline_per_curve() {
        let s = svg_plot("t", &[("a", vec![(0.0, 1.0), (1.0, 2.0)]), ("b", vec![(0.0, 0.0), (1.0, f64::INFINITY)])]);
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.starts_with("<svg"));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = write(PathBuf::from("/proc/definitely/not/here.json"), "x").unwrap_err();
        assert!(err.to_string().contains("/proc/definitely/not"), "{err}");
    }
}
