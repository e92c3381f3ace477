use std::fmt::Write;

/// Formats with at most three decimals, trailing zeros removed and no
/// negative zero.
pub(crate) fn num(v: f64) -> String {
    let mut s = format!("{v:.3}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub(crate) fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Axis-aligned bounds accumulated from points.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    pub fn empty() -> Self {
        Self {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    pub fn add(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn add_box(&mut self, x: f64, y: f64, half: f64) {
        self.add(x - half, y - half);
        self.add(x + half, y + half);
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

/// An SVG document under construction.
pub(crate) struct Doc {
    out: String,
}

impl Doc {
    /// Starts a document whose `viewBox` is `bounds`, displayed
    /// `width_px` wide.
    pub fn new(bounds: Bounds, width_px: f64, title: &str) -> Self {
        let (w, h) = (bounds.width(), bounds.height());
        let height_px = if w > 0.0 { width_px * h / w } else { width_px };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">",
            num(bounds.min_x),
            num(bounds.min_y),
            num(w),
            num(h),
            num(width_px),
            num(height_px.round())
        );
        let _ = writeln!(out, "<title>{}</title>", esc(title));
        Self { out }
    }

    /// Starts a document in pixel units.
    pub fn pixels(width: f64, height: f64, title: &str) -> Self {
        let mut b = Bounds::empty();
        b.add(0.0, 0.0);
        b.add(width, height);
        Self::new(b, width, title)
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, class: &str, content: &str) {
        let _ = writeln!(
            self.out,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"{anchor}\" dominant-baseline=\"central\">{}</text>",
            num(x),
            num(y),
            num(size),
            esc(content)
        );
    }

    pub fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// `points` attribute text for a polygon.
pub(crate) fn points_attr(points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|&(x, y)| format!("{},{}", num(x), num(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Vertices of a flat-topped hexagon with circumradius `r`.
pub(crate) fn hexagon(cx: f64, cy: f64, r: f64) -> Vec<(f64, f64)> {
    (0..6)
        .map(|i| {
            let a = std::f64::consts::PI / 3.0 * i as f64;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}
