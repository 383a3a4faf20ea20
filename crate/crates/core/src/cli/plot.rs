use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::CliError;
use crate::error::Error;

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 420.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const DASHES: [&str; 4] = ["", "6 3", "2 3", "8 3 2 3"];

/// Which columns to draw and how to scale them.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Restrict to these study ids; empty keeps every row.
    pub studies: Vec<String>,
    pub title: String,
}

impl PlotSpec {
    pub fn log_log(x: &str, y: &str) -> Self {
        Self {
            x: x.into(),
            y: y.into(),
            log_x: true,
            log_y: true,
            studies: Vec::new(),
            title: String::new(),
        }
    }
}

/// Parsed study CSV: header names and raw cells.
#[derive(Clone, Debug)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| io("csv", e))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| io("csv", e))?;
        Ok(Self { headers, rows })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io(&path.display().to_string(), e))?;
        Self::parse(&text)
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, name: &str) -> Result<usize, CliError> {
        self.column(name)
            .ok_or_else(|| CliError::Study(Error::MissingColumn(name.into())))
    }

    fn study_ids(&self) -> Vec<&str> {
        match self.column("study_id") {
            Some(c) => self.rows.iter().map(|r| r[c].as_str()).collect(),
            None => Vec::new(),
        }
    }
}

fn io(path: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.into(),
        message: e.to_string(),
    }
}

/// Two panels for the commutator study, one otherwise.
pub fn auto_specs(table: &Table) -> Vec<PlotSpec> {
    let ids = table.study_ids();
    if ids.contains(&"taylor_term") && ids.contains(&"key_commutator") {
        return vec![
            PlotSpec {
                x: "T".into(),
                y: "error".into(),
                log_x: false,
                log_y: false,
                studies: vec!["taylor_term".into()],
                title: "(a) Taylor term norm vs t".into(),
            },
            PlotSpec {
                studies: vec!["key_commutator".into()],
                title: "(b) key commutator sup-norm vs h".into(),
                ..PlotSpec::log_log("h", "error")
            },
        ];
    }
    let has_h = table
        .column("h")
        .map(|c| table.rows.iter().any(|r| !r[c].is_empty()))
        .unwrap_or(false);
    vec![PlotSpec::log_log(if has_h { "h" } else { "M" }, "error")]
}

struct Series {
    label: String,
    color: &'static str,
    dash: &'static str,
    points: Vec<(f64, f64)>,
}

type SeriesKey = (String, Option<usize>);

fn collect_series(table: &Table, spec: &PlotSpec) -> Result<Vec<Series>, CliError> {
    let xc = table.require(&spec.x)?;
    let yc = table.require(&spec.y)?;
    let sc = table.column("study_id");
    let nc = table.column("N");
    let mut groups: BTreeMap<SeriesKey, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &table.rows {
        let id = sc.map(|c| r[c].clone()).unwrap_or_default();
        if !spec.studies.is_empty() && !spec.studies.contains(&id) {
            continue;
        }
        let (Ok(x), Ok(y)) = (r[xc].parse::<f64>(), r[yc].parse::<f64>()) else {
            continue;
        };
        let usable = x.is_finite() && y.is_finite() && (!spec.log_x || x > 0.0) && (!spec.log_y || y > 0.0);
        if !usable {
            continue;
        }
        let n = nc.and_then(|c| r[c].parse::<usize>().ok());
        groups.entry((id, n)).or_default().push((x, y));
    }
    let ns: Vec<Option<usize>> = {
        let mut v: Vec<_> = groups.keys().map(|k| k.1).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    };
    let ids: Vec<String> = {
        let mut v: Vec<_> = groups.keys().map(|k| k.0.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    Ok(groups
        .into_iter()
        .map(|((id, n), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            let color = match n {
                Some(_) => PALETTE[ns.iter().position(|m| *m == n).unwrap_or(0) % PALETTE.len()],
                None => "#555555",
            };
            let dash = DASHES[ids.iter().position(|i| *i == id).unwrap_or(0) % DASHES.len()];
            let label = match n {
                Some(n) => format!("{id} N={n}"),
                None => id,
            };
            Series { label, color, dash, points }
        })
        .collect())
}

/// Axis mapping from data to pixel coordinates.
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0, log };
        }
        if log {
            let (mut l, mut h) = (lo.floor(), hi.ceil());
            if h <= l {
                l -= 0.5;
                h += 0.5;
            }
            return Self { lo: l, hi: h, log };
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
            return Self { lo: lo - pad, hi: hi + pad, log };
        }
        let step = nice_step(hi - lo);
        Self {
            lo: (lo / step).floor() * step,
            hi: (hi / step).ceil() * step,
            log,
        }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let span = (self.hi - self.lo).round().max(1.0) as i64;
            let every = (span / 8 + 1).max(1);
            let first = self.lo.ceil() as i64;
            let last = self.hi.floor() as i64;
            (first..=last)
                .filter(|k| (k - first) % every == 0)
                .map(|k| (10f64.powi(k as i32), format!("1e{k}")))
                .collect()
        } else {
            let step = nice_step(self.hi - self.lo);
            let digits = (-step.log10().floor()).max(0.0) as usize;
            let count = ((self.hi - self.lo) / step).round() as i64;
            (0..=count)
                .map(|i| {
                    let v = self.lo + i as f64 * step;
                    (v, format!("{v:.digits$}"))
                })
                .collect()
        }
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(svg: &mut String, x0: f64, spec: &PlotSpec, series: &[Series]) {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let ax = Axis::fit(all().map(|p| p.0), spec.log_x);
    let ay = Axis::fit(all().map(|p| p.1), spec.log_y);
    let (left, top) = (x0 + MARGIN_L, MARGIN_T);
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let px = |v: f64| left + ax.unit(v) * w;
    let py = |v: f64| top + (1.0 - ay.unit(v)) * h;

    let _ = writeln!(
        svg,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#000000"/>"##
    );
    for (v, label) in ax.ticks() {
        let x = px(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000"/><text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{label}</text>"##,
            top + h,
            top + h + 5.0,
            top + h + 20.0
        );
    }
    for (v, label) in ay.ticks() {
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="#000000"/><text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{label}</text>"##,
            left - 5.0,
            left - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        left + w / 2.0,
        top + h + 42.0,
        escape(&spec.x)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        x0 + 18.0,
        top + h / 2.0,
        x0 + 18.0,
        top + h / 2.0,
        escape(&spec.y)
    );
    if !spec.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="15" text-anchor="middle">{}</text>"#,
            left + w / 2.0,
            top - 14.0,
            escape(&spec.title)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let dash = if s.dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{}""#, s.dash)
        };
        if s.points.len() > 1 {
            let pts: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                pts.join(" "),
                s.color
            );
        }
        if s.points.len() <= 40 {
            for p in &s.points {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                    px(p.0),
                    py(p.1),
                    s.color
                );
            }
        }
        let ly = top + 16.0 + 16.0 * i as f64;
        let lx = left + w - 170.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 22.0,
            s.color,
            lx + 28.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
}

/// Renders one panel per spec side by side.
pub fn render_svg(table: &Table, specs: &[PlotSpec]) -> Result<String, CliError> {
    let width = PANEL_W * specs.len().max(1) as f64;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{PANEL_H:.0}\" viewBox=\"0 0 {width:.0} {PANEL_H:.0}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
    );
    for (i, spec) in specs.iter().enumerate() {
        let series = collect_series(table, spec)?;
        draw_panel(&mut svg, i as f64 * PANEL_W, spec, &series);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads a study CSV and writes its figure to `out`. Without specs the
/// layout is chosen from the study ids present.
pub fn emit_plot(csv_path: &Path, specs: Option<&[PlotSpec]>, out: &Path) -> Result<(), CliError> {
    let table = Table::read(csv_path)?;
    let auto;
    let specs = match specs {
        Some(s) => s,
        None => {
            auto = auto_specs(&table);
            &auto
        }
    };
    let svg = render_svg(&table, specs)?;
    std::fs::write(out, svg).map_err(|e| io(&out.display().to_string(), e))
}
