//! Minimal SVG line charts for sweep results.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::io::Read;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("row {row}: column '{column}' value '{value}' is not a number")]
    NotNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("no data rows to plot")]
    Empty,
    #[error("log-scale x axis needs positive x values, found {0}")]
    NonPositiveLogX(f64),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct ChartOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
}

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Groups `x`/`y` columns of a CSV by the `series` column. Series keep the
/// order of their first row; points are sorted by x.
pub fn series_from_csv<R: Read>(
    reader: R,
    x: &str,
    y: &str,
    series: &str,
) -> Result<Vec<Series>, ChartError> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ChartError::UnknownColumn(name.to_string()))
    };
    let (xi, yi, si) = (column(x)?, column(y)?, column(series)?);

    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let number = |idx: usize, name: &str| {
            let raw = rec.get(idx).unwrap_or("");
            raw.trim()
                .parse::<f64>()
                .map_err(|_| ChartError::NotNumeric {
                    row: i + 2,
                    column: name.to_string(),
                    value: raw.to_string(),
                })
        };
        let point = (number(xi, x)?, number(yi, y)?);
        let key = rec.get(si).unwrap_or("").to_string();
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(point);
    }
    if order.is_empty() {
        return Err(ChartError::Empty);
    }
    Ok(order
        .into_iter()
        .map(|name| {
            let mut points = groups.remove(&name).unwrap_or_default();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { name, points }
        })
        .collect())
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn linear_ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let step = nice_step(hi - lo);
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let count = ((end - start) / step).round() as usize;
    let ticks = (0..=count).map(|i| start + i as f64 * step).collect();
    (start, end, ticks)
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:e}")
    } else {
        let s = format!("{:.6}", v);
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    ticks: Vec<f64>,
}

impl Axis {
    fn fraction(&self, v: f64) -> f64 {
        let (v, lo, hi) = if self.log {
            (v.log10(), self.lo.log10(), self.hi.log10())
        } else {
            (v, self.lo, self.hi)
        };
        (v - lo) / (hi - lo)
    }
}

fn x_axis(lo: f64, hi: f64, log: bool) -> Axis {
    if log {
        let (mut a, mut b) = (lo.log10().floor(), hi.log10().ceil());
        if a == b {
            a -= 1.0;
            b += 1.0;
        }
        let ticks = (a as i32..=b as i32).map(|e| 10f64.powi(e)).collect();
        Axis {
            lo: 10f64.powf(a),
            hi: 10f64.powf(b),
            log,
            ticks,
        }
    } else {
        let (lo, hi) = if lo == hi {
            (lo - 1.0, hi + 1.0)
        } else {
            (lo, hi)
        };
        let (lo, hi, ticks) = linear_ticks(lo, hi);
        Axis { lo, hi, log, ticks }
    }
}

/// Renders one polyline per series with axes, ticks and a legend.
pub fn render_svg(series: &[Series], opts: &ChartOptions) -> Result<String, ChartError> {
    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .collect();
    if points.is_empty() {
        return Err(ChartError::Empty);
    }
    if opts.log_x {
        if let Some(&(x, _)) = points.iter().find(|p| p.0.is_nan() || p.0 <= 0.0) {
            return Err(ChartError::NonPositiveLogX(x));
        }
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| {
        points.iter().map(pick).fold(init, f)
    };
    let xmin = fold(f64::min, f64::INFINITY, |p| p.0);
    let xmax = fold(f64::max, f64::NEG_INFINITY, |p| p.0);
    let ymin = fold(f64::min, 0.0, |p| p.1);
    let ymax = fold(f64::max, f64::NEG_INFINITY, |p| p.1);

    let xa = x_axis(xmin, xmax, opts.log_x);
    let ya = {
        let hi = if ymax <= ymin { ymin + 1.0 } else { ymax };
        let (lo, hi, ticks) = linear_ticks(ymin, hi);
        Axis {
            lo,
            hi,
            log: false,
            ticks,
        }
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xa.fraction(x) * plot_w;
    let py = |y: f64| TOP + (1.0 - ya.fraction(y)) * plot_h;

    let mut svg = String::new();
    // writing into a String cannot fail
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !opts.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&opts.title)
        );
    }

    let _ = writeln!(
        svg,
        r##"<g class="grid" stroke="#dddddd" stroke-width="1">"##
    );
    for &t in &xa.ticks {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
            TOP + plot_h
        );
    }
    for &t in &ya.ticks {
        let y = py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#,
            LEFT + plot_w
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r##"<rect class="frame" x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333333"/>"##
    );
    let _ = writeln!(svg, r#"<g class="x-ticks" text-anchor="middle">"#);
    for &t in &xa.ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            px(t),
            TOP + plot_h + 18.0,
            escape(&tick_label(t))
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="y-ticks" text-anchor="end">"#);
    for &t in &ya.ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT - 8.0,
            py(t) + 4.0,
            escape(&tick_label(t))
        );
    }
    let _ = writeln!(svg, "</g>");
    let x_caption = if opts.log_x {
        format!("{} (log scale)", opts.x_label)
    } else {
        opts.x_label.clone()
    };
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&x_caption)
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&opts.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-series="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            escape(&s.name),
            coords.join(" ")
        );
    }

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = TOP + 10.0 + i as f64 * 20.0;
        let x = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="3"/>"#,
            x + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 30.0,
            y + 4.0,
            escape(&s.name)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}
