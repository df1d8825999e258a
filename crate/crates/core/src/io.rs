//! Flat `key = value` configuration, CSV tables with a provenance comment,
//! plain-text manifests and minimal SVG line plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::propagator::Backend;
use crate::wave::{InitialData, WaveFunction};

/// Experiment configuration: an ordered set of `key = value` pairs.
///
/// Every typed lookup records the value it resolved (including defaults), so
/// writing the config back out after a run gives the full set of inputs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new() -> Self {
        ExperimentConfig::default()
    }

    /// Parse lines `key = value`; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got '{raw}'", n + 1)))?;
            let k = k.trim();
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(Error::Config(format!("line {}: bad key '{k}'", n + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(ExperimentConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        ExperimentConfig::parse(&fs::read_to_string(path)?)
    }

    /// Apply `key=value` overrides.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{p}' is not key=value")))?;
            self.set(k.trim(), v.trim());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Typed value of `key`, inserting `default` when absent.
    pub fn get_or<T: FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T> {
        match self.values.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse {key} = '{v}'"))),
            None => {
                self.values.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    /// Whitespace- or comma-separated list of numbers.
    pub fn list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.values.get(key) {
            Some(v) => v
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::Config(format!("cannot parse {key} entry '{s}'")))
                })
                .collect(),
            None => {
                let text = default.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
                self.values.insert(key.to_string(), text);
                Ok(default.to_vec())
            }
        }
    }

    /// `m`, `c`, `hbar`, `dt`, `omega`, `x0`, validated.
    pub fn physical_params(&mut self) -> Result<PhysicalParams> {
        let d = PhysicalParams::default();
        let p = PhysicalParams {
            m: self.get_or("m", d.m)?,
            c: self.get_or("c", d.c)?,
            hbar: self.get_or("hbar", d.hbar)?,
            dt: self.get_or("dt", d.dt)?,
            omega: self.get_or("omega", d.omega)?,
            x0: self.get_or("x0", d.x0)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn backend(&mut self) -> Result<Backend> {
        let s: String = self.get_or("backend", "fft".to_string())?;
        s.parse()
    }

    /// `initial = gaussian σ [center [cutoff]] | box a b | slits a b c d … |
    /// bump center half_width | kink half_width`.
    pub fn initial_data(&mut self, default: &str) -> Result<InitialData> {
        let s: String = self.get_or("initial", default.to_string())?;
        parse_initial(&s)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub fn parse_initial(s: &str) -> Result<InitialData> {
    let mut it = s.split_whitespace();
    let kind = it.next().unwrap_or("");
    let nums: Vec<f64> = it
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("bad number '{t}' in initial data '{s}'")))
        })
        .collect::<Result<_>>()?;
    let need = |n: usize| {
        if nums.len() < n {
            Err(Error::Config(format!("initial data '{s}' needs {n} numbers")))
        } else {
            Ok(())
        }
    };
    let data = match kind {
        "gaussian" => {
            need(1)?;
            let sigma = nums[0];
            InitialData::Gaussian {
                sigma,
                center: nums.get(1).copied().unwrap_or(0.0),
                cutoff: nums.get(2).copied().unwrap_or(10.0 * sigma),
            }
        }
        "box" => {
            need(2)?;
            InitialData::Box(vec![(nums[0], nums[1])])
        }
        "slits" => {
            if nums.len() < 2 || !nums.len().is_multiple_of(2) {
                return Err(Error::Config(format!("slits need pairs of endpoints: '{s}'")));
            }
            InitialData::Box(nums.chunks(2).map(|c| (c[0], c[1])).collect())
        }
        "bump" => {
            need(2)?;
            InitialData::Bump {
                center: nums[0],
                half_width: nums[1],
            }
        }
        "kink" => {
            need(1)?;
            InitialData::Kink { half_width: nums[0] }
        }
        _ => return Err(Error::Config(format!("unknown initial data '{s}'"))),
    };
    // reject inverted intervals, non-positive widths
    if data.support().is_empty() || data.support().measure() <= 0.0 {
        return Err(Error::Parameter(format!("initial data '{s}' has empty support")));
    }
    Ok(data)
}

/// Values recorded in the comment line of every CSV file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvMeta {
    pub xi: Option<f64>,
    pub eps: Option<f64>,
    pub w: Option<usize>,
}

impl CsvMeta {
    pub fn none() -> Self {
        CsvMeta {
            xi: None,
            eps: None,
            w: None,
        }
    }

    pub fn line(&self) -> String {
        let f = |v: Option<f64>| v.map_or("none".to_string(), |v| v.to_string());
        format!(
            "# xi={} eps={} W={}",
            f(self.xi),
            f(self.eps),
            self.w.map_or("none".to_string(), |w| w.to_string())
        )
    }
}

/// Comment line, header row, then one row per record. Numbers are printed in
/// shortest round-trip form so identical inputs give identical bytes.
pub fn write_csv(path: &Path, meta: &CsvMeta, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut buf = meta.line().into_bytes();
    buf.push(b'\n');
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            if r.len() != header.len() {
                return Err(Error::Data(format!(
                    "row has {} fields, header {}",
                    r.len(),
                    header.len()
                )));
            }
            w.write_record(r.iter().map(f64::to_string))?;
        }
        w.flush()?;
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Read a CSV written by [`write_csv`]: header names and numeric rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Data(format!("non-numeric field '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Snapshot as `x,re,im,abs2`.
pub fn write_snapshot(path: &Path, meta: &CsvMeta, psi: &WaveFunction) -> Result<()> {
    let rows: Vec<Vec<f64>> = psi
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![psi.x(i), v.re, v.im, v.norm_sqr()])
        .collect();
    write_csv(path, meta, &["x", "re", "im", "abs2"], &rows)
}

/// Inverse of [`write_snapshot`]; the nodes must be uniformly spaced.
pub fn read_snapshot(path: &Path) -> Result<WaveFunction> {
    let (header, rows) = read_csv(path)?;
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("{}: missing column '{name}'", path.display())))
    };
    let (cx, cr, ci) = (col("x")?, col("re")?, col("im")?);
    if rows.len() < 2 {
        return Err(Error::Data(format!("{}: need at least two nodes", path.display())));
    }
    let origin = rows[0][cx];
    let dx = (rows[rows.len() - 1][cx] - origin) / (rows.len() - 1) as f64;
    for (i, r) in rows.iter().enumerate() {
        if (r[cx] - (origin + i as f64 * dx)).abs() > 1e-6 * dx {
            return Err(Error::Data(format!(
                "{}: node {i} is off the uniform grid",
                path.display()
            )));
        }
    }
    let values = rows.iter().map(|r| Complex64::new(r[cr], r[ci])).collect();
    WaveFunction::new(origin, dx, values, 0.0)
}

/// `key = value` lines, no nesting.
pub fn write_manifest(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k} = {v}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// A named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.to_string(),
            points,
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Self-contained SVG line plot with axes, tick labels and a legend.
pub fn svg_line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 440.0);
    let (l, r, t, b) = (70.0, 20.0, 40.0, 50.0);
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| l + (x - x0) / (x1 - x0) * (w - l - r);
    let py = |y: f64| h - b - (y - y0) / (y1 - y0) * (h - t - b);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - l - r,
        h - t - b
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            px(fx),
            h - b + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 6.0,
            py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + w - r) / 2.0,
        h - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (t + h - b) / 2.0,
        (t + h - b) / 2.0,
        escape(ylabel)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = t + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            w - r - 150.0,
            w - r - 130.0,
            w - r - 124.0,
            ly + 4.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{:.4}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_and_records_defaults() {
        let mut c =
            ExperimentConfig::parse("# two slits\nc = 2\ninitial = slits -1 0 2 3  # gap (0,2)\n\nbackend=direct\n")
                .unwrap();
        let p = c.physical_params().unwrap();
        assert_eq!(p.c, 2.0);
        assert_eq!(c.backend().unwrap(), Backend::Direct);
        assert_eq!(
            c.initial_data("box -1 1").unwrap(),
            InitialData::Box(vec![(-1.0, 0.0), (2.0, 3.0)])
        );
        let w: usize = c.get_or("W", 64).unwrap();
        assert_eq!(w, 64);
        let text = c.to_text();
        assert!(text.contains("W = 64\n") && text.contains("hbar = 1\n"));
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            ExperimentConfig::parse("no equals sign"),
            Err(Error::Config(_))
        ));
        let mut c = ExperimentConfig::parse("c = fast").unwrap();
        assert!(matches!(c.physical_params(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::parse("c = -1").unwrap();
        assert!(matches!(c.physical_params(), Err(Error::Parameter(_))));
        assert!(parse_initial("box 1").is_err());
        assert!(parse_initial("slits 0 1 2").is_err());
        assert!(parse_initial("triangle 1").is_err());
        let mut c = ExperimentConfig::new();
        c.apply_overrides(["dt=0.5", "xi_list = 25,100"]).unwrap();
        assert_eq!(c.list_or("xi_list", &[]).unwrap(), vec![25.0, 100.0]);
        assert!(c.apply_overrides(["dt"]).is_err());
    }

    #[test]
    fn snapshot_round_trip_and_comment_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let psi = WaveFunction::from_fn(-1.0, 0.25, 9, |x| Complex64::new(x, 1.0 - x * x));
        let meta = CsvMeta {
            xi: Some(100.0),
            eps: None,
            w: Some(64),
        };
        write_snapshot(&path, &meta, &psi).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# xi=100 eps=none W=64\nx,re,im,abs2\n"));
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.values, psi.values);
        assert_eq!((back.origin, back.dx), (psi.origin, psi.dx));
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let s = svg_line_plot(
            "C(xi)",
            "xi",
            "C",
            &[
                Series::new("Re", vec![(0.0, 0.0), (1.0, 0.2)]),
                Series::new("Im <", vec![(0.0, 0.1), (1.0, f64::NAN)]),
            ],
        );
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("Im &lt;") && s.ends_with("</svg>\n"));
    }
}
