use super::color::Rgb;
use super::svg::{esc, num, Doc};
use super::{RenderError, Result};
use crate::analysis::Series;

/// One line of a plot. A NaN `y` breaks the line.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl From<&Series> for PlotSeries {
    /// Missing x positions become gaps.
    fn from(s: &Series) -> Self {
        let mut points = s.points.clone();
        points.extend(s.missing.iter().map(|&x| (x, f64::NAN)));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            name: s.name.clone(),
            points,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 480.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 340.0;

const PALETTE: [Rgb; 10] = [
    Rgb(0x1f, 0x77, 0xb4),
    Rgb(0xff, 0x7f, 0x0e),
    Rgb(0x2c, 0xa0, 0x2c),
    Rgb(0xd6, 0x27, 0x28),
    Rgb(0x94, 0x67, 0xbd),
    Rgb(0x8c, 0x56, 0x4b),
    Rgb(0xe3, 0x77, 0xc2),
    Rgb(0x7f, 0x7f, 0x7f),
    Rgb(0xbc, 0xbd, 0x22),
    Rgb(0x17, 0xbe, 0xcf),
];

/// Data range padded by 5% on each side; a degenerate range is widened to
/// `±1` around its value.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi == lo {
        (lo - 1.0, hi + 1.0)
    } else {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    }
}

/// Tick step from the 1-2-5 sequence nearest (in ratio) to a fifth of the
/// span.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .min_by(|a: &f64, b: &f64| (a / norm).ln().abs().total_cmp(&(b / norm).ln().abs()))
        .expect("non-empty");
    f * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    if step < 1e-3 || v.abs() >= 1e7 {
        format!("{v:.2e}")
    } else {
        num(v)
    }
}

/// Line plot with axes, 1-2-5 ticks and a legend, 640x400 px.
pub fn render_plot(series: &[PlotSeries], title: &str, x_label: &str, y_label: &str) -> Result<String> {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            if !x.is_finite() || y.is_infinite() {
                return Err(RenderError::InvalidArgument(format!(
                    "series {:?} has a non-finite point ({x}, {y})",
                    s.name
                )));
            }
            xs = (xs.0.min(x), xs.1.max(x));
            if !y.is_nan() {
                ys = (ys.0.min(y), ys.1.max(y));
            }
        }
    }
    if xs.0 > xs.1 || ys.0 > ys.1 {
        return Err(RenderError::InvalidArgument("nothing to plot".into()));
    }
    let (x0, x1) = padded(xs.0, xs.1);
    let (y0, y1) = padded(ys.0, ys.1);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let py = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut doc = Doc::pixels(WIDTH, HEIGHT, title);
    doc.line(format!(
        "<rect class=\"frame\" x=\"{LEFT}\" y=\"{TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#404040\"/>",
        RIGHT - LEFT,
        BOTTOM - TOP
    ));
    let x_step = tick_step(x1 - x0);
    for t in ticks(x0, x1) {
        let x = px(t);
        doc.line(format!(
            "<line class=\"tick\" x1=\"{0}\" y1=\"{BOTTOM}\" x2=\"{0}\" y2=\"{1}\" stroke=\"#404040\"/>",
            num(x),
            BOTTOM + 5.0
        ));
        doc.text(x, BOTTOM + 16.0, 11.0, "middle", "tick-label", &tick_label(t, x_step));
    }
    let y_step = tick_step(y1 - y0);
    for t in ticks(y0, y1) {
        let y = py(t);
        doc.line(format!(
            "<line class=\"grid\" x1=\"{LEFT}\" y1=\"{0}\" x2=\"{RIGHT}\" y2=\"{0}\" stroke=\"#e0e0e0\"/>",
            num(y)
        ));
        doc.text(LEFT - 6.0, y, 11.0, "end", "tick-label", &tick_label(t, y_step));
    }
    doc.text((LEFT + RIGHT) / 2.0, 20.0, 14.0, "middle", "title", title);
    doc.text((LEFT + RIGHT) / 2.0, BOTTOM + 38.0, 12.0, "middle", "x-label", x_label);
    let (cx, cy) = (18.0, (TOP + BOTTOM) / 2.0);
    doc.line(format!(
        "<text class=\"y-label\" x=\"{cx}\" y=\"{cy}\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"central\" transform=\"rotate(-90 {cx} {cy})\">{}</text>",
        esc(y_label)
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        // NaN splits the polyline into runs
        for run in s.points.split(|p| p.1.is_nan()).filter(|r| !r.is_empty()) {
            let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{},{}", num(px(x)), num(py(y)))).collect();
            doc.line(format!(
                "<polyline class=\"series\" data-series=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                esc(&s.name),
                pts.join(" ")
            ));
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        doc.line(format!(
            "<line class=\"legend-swatch\" x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{color}\" stroke-width=\"3\"/>",
            RIGHT + 15.0,
            num(ly),
            RIGHT + 35.0
        ));
        doc.text(RIGHT + 40.0, ly, 11.0, "start", "legend", &s.name);
    }
    Ok(doc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(name: &str, pts: &[(f64, f64)]) -> PlotSeries {
        PlotSeries {
            name: name.into(),
            points: pts.to_vec(),
        }
    }

    #[test]
    fn steps_follow_1_2_5() {
        assert_eq!(tick_step(10.0), 2.0);
        assert_eq!(tick_step(1.0), 0.2);
        assert_eq!(tick_step(30.0), 5.0);
        assert_eq!(tick_step(1.1), 0.2);
        assert_eq!(tick_step(4.0), 1.0);
        assert_eq!(ticks(-0.1, 2.1), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn degenerate_range_is_widened() {
        assert_eq!(padded(3.0, 3.0), (2.0, 4.0));
        let svg = render_plot(&[line("flat", &[(1.0, 5.0), (2.0, 5.0)])], "t", "x", "y").unwrap();
        // y = 5 sits mid-height
        assert!(svg.contains(",190"));
    }

    #[test]
    fn gaps_split_lines() {
        let s = Series {
            name: "d".into(),
            points: vec![(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)],
            missing: vec![3.0],
        };
        let p = PlotSeries::from(&s);
        assert!(p.points[2].1.is_nan());
        let svg = render_plot(&[p], "t", "x", "y").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn legend_and_palette() {
        let svg = render_plot(
            &[line("a", &[(0.0, 0.0), (1.0, 1.0)]), line("b<", &[(0.0, 1.0), (1.0, 0.0)])],
            "two",
            "x",
            "y",
        )
        .unwrap();
        assert!(svg.contains("stroke=\"#1f77b4\""));
        assert!(svg.contains("stroke=\"#ff7f0e\""));
        assert!(svg.contains(">b&lt;</text>"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("width=\"640\" height=\"400\""));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(render_plot(&[], "t", "x", "y").is_err());
        assert!(render_plot(&[line("a", &[(f64::NAN, 1.0)])], "t", "x", "y").is_err());
        assert!(render_plot(&[line("a", &[(1.0, f64::INFINITY)])], "t", "x", "y").is_err());
        assert!(render_plot(&[line("a", &[(1.0, f64::NAN)])], "t", "x", "y").is_err());
    }
}
