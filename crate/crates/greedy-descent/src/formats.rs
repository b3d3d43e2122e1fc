//! Text formats: dictionary and covering CSV with a `#` header line, trace
//! CSVs, and plain numeric matrices. Floats are written with 17 significant
//! digits, so every file parses back to the same bits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use greedy_descent_core::descent::DescentTrace;
use greedy_descent_core::dictionary::{CoverTarget, CoveringSpec};
use greedy_descent_core::{Dictionary, SmoothSpace, Trace};

use crate::error::{io_err, HarnessError, Result};

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(path: &Path, line: usize, reason: impl Into<String>) -> HarnessError {
    HarnessError::Format { path: path.to_path_buf(), line, reason: reason.into() }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, text).map_err(io_err(path))
}

// `# key=value key=value ...`; the last key swallows the rest of the line
fn parse_header(path: &Path, line: &str, last: &str) -> Result<BTreeMap<String, String>> {
    let body = line.strip_prefix('#').ok_or_else(|| format_err(path, 1, "expected a `#` header line"))?.trim();
    let (head, tail) = match body.find(&format!("{last}=")) {
        Some(i) => (&body[..i], Some(&body[i + last.len() + 1..])),
        None => (body, None),
    };
    let mut map = BTreeMap::new();
    for tok in head.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| format_err(path, 1, format!("malformed header token `{tok}`")))?;
        map.insert(k.to_string(), v.to_string());
    }
    if let Some(t) = tail {
        map.insert(last.to_string(), t.trim().to_string());
    }
    Ok(map)
}

fn header_value<T: std::str::FromStr>(path: &Path, map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = map.get(key).ok_or_else(|| format_err(path, 1, format!("header is missing `{key}=`")))?;
    raw.parse().map_err(|_| format_err(path, 1, format!("header `{key}={raw}` does not parse")))
}

/// Parses numeric rows after the header; each row keeps its 1-based file line.
fn numeric_rows(path: &Path, text: &str, skip_header: bool) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            format_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| format_err(path, line, format!("`{f}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, vals));
    }
    Ok(rows)
}

fn row_line(values: &[f64]) -> String {
    values.iter().map(|v| float(*v)).collect::<Vec<_>>().join(",")
}

pub fn dictionary_to_csv(dict: &Dictionary) -> String {
    let mut s = format!("# d={} N={} p={} label={}\n", dict.dim(), dict.len(), dict.space().p(), dict.label());
    for a in dict.atoms() {
        s.push_str(&row_line(a));
        s.push('\n');
    }
    s
}

/// Atoms as written, before any dictionary invariant is checked.
pub struct RawDictionary {
    pub space: SmoothSpace,
    pub label: String,
    pub atoms: Vec<Vec<f64>>,
}

impl RawDictionary {
    pub fn into_dictionary(self) -> Result<Dictionary> {
        Ok(Dictionary::new(self.space, self.atoms, self.label)?)
    }
}

pub fn parse_dictionary_raw(path: &Path, text: &str) -> Result<RawDictionary> {
    let first = text.lines().next().ok_or_else(|| format_err(path, 1, "empty file"))?;
    let h = parse_header(path, first, "label")?;
    let d: usize = header_value(path, &h, "d")?;
    let n: usize = header_value(path, &h, "N")?;
    let p: f64 = header_value(path, &h, "p")?;
    let space = SmoothSpace::lp(d, p).map_err(|e| format_err(path, 1, e.to_string()))?;
    let rows = numeric_rows(path, text, false)?;
    if rows.len() != n {
        return Err(format_err(path, 1, format!("header declares N={n} atoms, found {}", rows.len())));
    }
    let mut atoms = Vec::with_capacity(n);
    for (line, r) in rows {
        if r.len() != d {
            return Err(format_err(path, line, format!("expected {d} entries, found {}", r.len())));
        }
        atoms.push(r);
    }
    Ok(RawDictionary { space, label: h.get("label").cloned().unwrap_or_default(), atoms })
}

pub fn read_dictionary(path: &Path) -> Result<Dictionary> {
    parse_dictionary_raw(path, &read_text(path)?)?.into_dictionary()
}

pub fn covering_to_csv(cov: &CoveringSpec) -> String {
    let mut s = format!(
        "# d={} N={} radius={} target={}\n",
        cov.dim(),
        cov.centers().len(),
        float(cov.radius()),
        cov.target().as_str()
    );
    for c in cov.centers() {
        s.push_str(&row_line(c));
        s.push('\n');
    }
    s
}

pub fn parse_covering(path: &Path, text: &str) -> Result<CoveringSpec> {
    let first = text.lines().next().ok_or_else(|| format_err(path, 1, "empty file"))?;
    let h = parse_header(path, first, "target")?;
    let d: usize = header_value(path, &h, "d")?;
    let n: usize = header_value(path, &h, "N")?;
    let radius: f64 = header_value(path, &h, "radius")?;
    let target = match h.get("target").map(String::as_str) {
        Some("sphere") => CoverTarget::UnitSphere,
        Some("ball") => CoverTarget::UnitBall,
        other => return Err(format_err(path, 1, format!("target must be `sphere` or `ball`, got {other:?}"))),
    };
    let rows = numeric_rows(path, text, false)?;
    if rows.len() != n {
        return Err(format_err(path, 1, format!("header declares N={n} centers, found {}", rows.len())));
    }
    let centers = rows.into_iter().map(|(_, r)| r).collect();
    Ok(CoveringSpec::new(d, centers, radius, target)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub selected_index: i64,
    pub residual_norm: f64,
    pub coeff_l1: f64,
}

pub const TRACE_HEADER: &str = "iter,selected_index,residual_norm,coeff_l1";
pub const DESCENT_HEADER: &str = "iter,selected_index,energy,energy_gap";

pub fn trace_to_csv(trace: &Trace) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for st in &trace.steps {
        let _ = writeln!(s, "{},{},{},{}", st.m, st.selected, float(st.residual_norm), float(st.coeff_l1));
    }
    s
}

fn check_header(path: &Path, text: &str, expected: &str) -> Result<()> {
    match text.lines().next() {
        Some(h) if h.trim() == expected => Ok(()),
        Some(h) => Err(format_err(path, 1, format!("expected header `{expected}`, found `{}`", h.trim()))),
        None => Err(format_err(path, 1, "empty file")),
    }
}

fn int_field(path: &Path, line: usize, v: f64) -> Result<i64> {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Ok(v as i64)
    } else {
        Err(format_err(path, line, format!("`{v}` is not an integer")))
    }
}

pub fn parse_trace(path: &Path, text: &str) -> Result<Vec<TraceRow>> {
    check_header(path, text, TRACE_HEADER)?;
    numeric_rows(path, text, true)?
        .into_iter()
        .map(|(line, r)| {
            if r.len() != 4 {
                return Err(format_err(path, line, "expected 4 fields"));
            }
            Ok(TraceRow {
                iter: int_field(path, line, r[0])? as usize,
                selected_index: int_field(path, line, r[1])?,
                residual_norm: r[2],
                coeff_l1: r[3],
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentRow {
    pub iter: usize,
    pub selected_index: i64,
    pub energy: f64,
    pub energy_gap: Option<f64>,
}

pub fn descent_to_csv(trace: &DescentTrace) -> String {
    let mut s = String::from(DESCENT_HEADER);
    s.push('\n');
    for st in &trace.steps {
        let gap = st.energy_gap.map(float).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{}", st.m, st.selected, float(st.energy), gap);
    }
    s
}

pub fn parse_descent(path: &Path, text: &str) -> Result<Vec<DescentRow>> {
    check_header(path, text, DESCENT_HEADER)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| format_err(path, e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 4 {
            return Err(format_err(path, line, "expected 4 fields"));
        }
        let num = |f: &str| f.parse::<f64>().map_err(|_| format_err(path, line, format!("`{f}` is not a number")));
        rows.push(DescentRow {
            iter: int_field(path, line, num(&rec[0])?)? as usize,
            selected_index: int_field(path, line, num(&rec[1])?)?,
            energy: num(&rec[2])?,
            energy_gap: if rec[3].is_empty() { None } else { Some(num(&rec[3])?) },
        });
    }
    Ok(rows)
}

pub fn matrix_to_csv(rows: &[Vec<f64>]) -> String {
    rows.iter().map(|r| row_line(r) + "\n").collect()
}

/// `k` rows of `n` comma-separated numbers.
pub fn parse_matrix(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    let rows = numeric_rows(path, text, false)?;
    let width = rows.first().map(|r| r.1.len()).ok_or_else(|| format_err(path, 1, "empty matrix"))?;
    rows.into_iter()
        .map(|(line, r)| {
            if r.len() == width {
                Ok(r)
            } else {
                Err(format_err(path, line, format!("expected {width} columns, found {}", r.len())))
            }
        })
        .collect()
}

/// A single comma-separated row.
pub fn parse_vector(path: &Path, text: &str) -> Result<Vec<f64>> {
    let mut rows = numeric_rows(path, text, false)?;
    if rows.len() != 1 {
        return Err(format_err(path, 1, format!("expected one row, found {}", rows.len())));
    }
    Ok(rows.remove(0).1)
}
