use super::color::{color_for, ColorScale, Rgb, Scope, MISSING_COLOR};
use super::core_map::cell_shape;
use super::svg::{esc, num, Bounds, Doc};
use super::{RenderError, Result};
use crate::model::{AssemblyView, ReactorType, RodKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssemblyViewKind {
    /// Rod layout colored by rod kind.
    #[default]
    Geometry,
    /// One feature at one axial level on a color scale.
    Data,
}

/// Rectangular block of pin positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyViewSpec {
    pub kind: AssemblyViewKind,
    /// 1-based; level 1 is the lowest.
    pub axial_level: usize,
    /// Required for [`AssemblyViewKind::Data`]. With a geometry view it only
    /// adds the axial strip.
    pub feature: Option<String>,
    pub time: f64,
    pub scope: Scope,
    /// Draw only these pins; `None` draws the whole assembly.
    pub window: Option<Window>,
}

impl Default for AssemblyViewSpec {
    fn default() -> Self {
        Self {
            kind: AssemblyViewKind::Geometry,
            axial_level: 1,
            feature: None,
            time: 0.0,
            scope: Scope::SelectedLevel,
            window: None,
        }
    }
}

const COOLANT: &str = "#cfe8ff";
const EMPTY_FILL: &str = "#ffffff";
const STRIP_FILL: &str = "#e0e0e0";
const HIGHLIGHT: &str = "#d62728";

fn kind_color(kind: RodKind) -> Rgb {
    match kind {
        RodKind::Fuel => Rgb(0xd6, 0x27, 0x28),
        RodKind::Control => Rgb(0x1f, 0x3a, 0x93),
        RodKind::Poison => Rgb(0x7b, 0x2d, 0x8e),
        RodKind::Empty => Rgb(0xff, 0xff, 0xff),
        RodKind::Reflector => Rgb(0x7f, 0x7f, 0x7f),
    }
}

fn check_feature(view: &AssemblyView<'_>, feature: &str) -> Result<()> {
    if view.features().contains(feature) {
        Ok(())
    } else {
        Err(RenderError::NotFound(format!(
            "feature {feature:?} not present in {:?}",
            view.def().name()
        )))
    }
}

fn check_level(view: &AssemblyView<'_>, feature: &str, time: f64, level: usize) -> Result<usize> {
    check_feature(view, feature)?;
    let levels = view.axial_levels(feature, time);
    if level == 0 || level > levels {
        return Err(RenderError::InvalidArgument(format!(
            "axial level {level} outside 1..={levels} for {feature:?} at t = {time}"
        )));
    }
    Ok(levels)
}

/// Every value a pin holds for `feature` at `time`, in ascending z.
fn pin_profile(view: &AssemblyView<'_>, row: usize, col: usize, feature: &str, time: f64) -> Vec<f64> {
    view.axial_series(row, col, feature, time)
        .map(|s| s.into_iter().map(|p| p.value).collect())
        .unwrap_or_default()
}

/// Row-major values at one axial level: `None` where no rod is placed,
/// `Some(NaN)` where a rod has no value at that level.
pub fn level_values(view: &AssemblyView<'_>, feature: &str, time: f64, level: usize) -> Result<Vec<Option<f64>>> {
    check_level(view, feature, time, level)?;
    let n = view.size();
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            out.push(view.rod_at(r, c).map(|_| {
                pin_profile(view, r, c, feature, time)
                    .get(level - 1)
                    .copied()
                    .unwrap_or(f64::NAN)
            }));
        }
    }
    Ok(out)
}

fn assembly_values<'a>(view: &'a AssemblyView<'_>, feature: &'a str, time: f64) -> impl Iterator<Item = f64> + 'a {
    view.data_pins()
        .into_iter()
        .flat_map(move |(r, c)| pin_profile(view, r, c, feature, time))
}

/// Color scale for `feature` at `level`, spanning the population chosen by
/// `scope`.
pub fn color_scale(
    view: &AssemblyView<'_>,
    feature: &str,
    time: f64,
    level: usize,
    scope: Scope,
) -> Result<ColorScale> {
    Ok(match scope {
        Scope::SelectedLevel => ColorScale::spanning(
            level_values(view, feature, time, level)?.into_iter().flatten(),
            scope,
        ),
        Scope::WholeAssembly => {
            check_level(view, feature, time, level)?;
            ColorScale::spanning(assembly_values(view, feature, time), scope)
        }
        Scope::AllAssemblies => {
            check_level(view, feature, time, level)?;
            let reactor = view.reactor();
            let views: Vec<_> = (0..reactor.assembly_defs().len())
                .filter_map(|i| reactor.assembly_view(i))
                .collect();
            ColorScale::spanning(views.iter().flat_map(|v| assembly_values(v, feature, time)), scope)
        }
    })
}

fn resolve_window(size: usize, window: Option<Window>) -> Result<Window> {
    let w = window.unwrap_or(Window {
        row0: 0,
        col0: 0,
        rows: size,
        cols: size,
    });
    let fits = |start: usize, len: usize| len > 0 && start.checked_add(len).is_some_and(|end| end <= size);
    if !fits(w.row0, w.rows) || !fits(w.col0, w.cols) {
        return Err(RenderError::InvalidArgument(format!(
            "window rows {}+{} cols {}+{} outside {size}x{size} assembly",
            w.row0, w.rows, w.col0, w.cols
        )));
    }
    Ok(w)
}

/// Pin map of one assembly.
///
/// Geometry views draw each rod as a circle of its outer radius over a
/// coolant background. Data views draw one square (PWR) or hexagon (SFR)
/// per position, colored by the value at `axial_level`; positions without
/// a value are gray. When a feature is given, an axial strip to the right
/// marks the selected level (level 1 at the bottom).
pub fn render_assembly(view: &AssemblyView<'_>, spec: &AssemblyViewSpec) -> Result<String> {
    let n = view.size();
    let win = resolve_window(n, spec.window)?;
    let feature = spec.feature.as_deref();
    let (values, scale, levels) = match (spec.kind, feature) {
        (AssemblyViewKind::Data, None) => {
            return Err(RenderError::InvalidArgument("data view needs a feature".into()));
        }
        (AssemblyViewKind::Data, Some(f)) => {
            let values = level_values(view, f, spec.time, spec.axial_level)?;
            let scale = color_scale(view, f, spec.time, spec.axial_level, spec.scope)?;
            (values, Some(scale), view.axial_levels(f, spec.time))
        }
        (AssemblyViewKind::Geometry, Some(f)) => {
            let levels = check_level(view, f, spec.time, spec.axial_level)?;
            (Vec::new(), None, levels)
        }
        (AssemblyViewKind::Geometry, None) => (Vec::new(), None, 0),
    };

    let kind = view.reactor().reactor_type();
    let p = view.def().rod_pitch();
    let hex_radius = p / 3f64.sqrt();
    let half = match kind {
        ReactorType::Pwr => p / 2.0,
        ReactorType::Sfr => hex_radius,
    };
    let cells: Vec<(usize, usize)> = (win.row0..win.row0 + win.rows)
        .flat_map(|r| (win.col0..win.col0 + win.cols).map(move |c| (r, c)))
        .collect();
    let mut grid_bounds = Bounds::empty();
    for &(r, c) in &cells {
        let (x, y) = view.pin_center(r, c);
        grid_bounds.add_box(x, y, half);
    }
    let strip_w = 0.6 * p;
    let strip_x = grid_bounds.max_x + 0.5 * p;
    let mut bounds = grid_bounds;
    if levels > 0 {
        bounds.add(strip_x + strip_w, grid_bounds.max_y);
    }
    let pad = 0.25 * p;
    bounds.add(bounds.min_x - pad, bounds.min_y - pad);
    bounds.add(bounds.max_x + pad, bounds.max_y + pad);

    let mut title = format!("{} ({})", view.def().name(), view.def().assembly_type());
    if let Some(f) = feature {
        title.push_str(&format!(", {f} level {}/{levels}", spec.axial_level));
    }
    let mut doc = Doc::new(bounds, 480.0, &title);
    let sw = num(0.02 * p);

    match (spec.kind, scale) {
        (AssemblyViewKind::Data, Some(scale)) => {
            doc.line(format!(
                "<desc>scale {} {} {}</desc>",
                num(scale.min),
                num(scale.max),
                scale.scope
            ));
            for &(r, c) in &cells {
                let attrs = match values[r * n + c] {
                    None => format!(
                        "class=\"empty\" data-row=\"{r}\" data-col=\"{c}\" fill=\"{EMPTY_FILL}\" stroke=\"#c8c8c8\" stroke-width=\"{sw}\""
                    ),
                    Some(v) => {
                        let fill = if v.is_nan() { MISSING_COLOR } else { color_for(v, &scale) };
                        let shown = if v.is_nan() { "nan".to_string() } else { format!("{v:?}") };
                        format!(
                            "class=\"pin\" data-row=\"{r}\" data-col=\"{c}\" data-label=\"{}\" data-value=\"{shown}\" fill=\"{fill}\" stroke=\"#404040\" stroke-width=\"{sw}\"",
                            esc(&view.label(r, c))
                        )
                    }
                };
                doc.line(cell_shape(kind, view.pin_center(r, c), p, hex_radius, &attrs));
            }
        }
        _ => {
            doc.line(format!(
                "<rect class=\"coolant\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{COOLANT}\"/>",
                num(grid_bounds.min_x),
                num(grid_bounds.min_y),
                num(grid_bounds.width()),
                num(grid_bounds.height())
            ));
            for &(r, c) in &cells {
                let Some(rod) = view.rod_at(r, c) else { continue };
                let (x, y) = view.pin_center(r, c);
                doc.line(format!(
                    "<circle class=\"pin\" data-row=\"{r}\" data-col=\"{c}\" data-label=\"{}\" data-kind=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"#404040\" stroke-width=\"{sw}\"/>",
                    esc(&view.label(r, c)),
                    rod.kind().as_str(),
                    num(x),
                    num(y),
                    num(rod.outer_radius()),
                    kind_color(rod.kind())
                ));
            }
        }
    }

    if levels > 0 {
        let h = grid_bounds.height() / levels as f64;
        for level in 1..=levels {
            let y = grid_bounds.max_y - level as f64 * h;
            let selected = level == spec.axial_level;
            doc.line(format!(
                "<rect class=\"axial-level{}\" data-level=\"{level}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                if selected { " selected" } else { "" },
                num(strip_x),
                num(y),
                num(strip_w),
                num(h),
                if selected { HIGHLIGHT } else { STRIP_FILL }
            ));
        }
    }
    Ok(doc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AssemblyType;
    use crate::samples::{self, AXIAL_POWER, GUIDE_TUBES, PWR_AXIAL_LEVELS, PWR_FUEL_PINS};

    fn data_spec(level: usize) -> AssemblyViewSpec {
        AssemblyViewSpec {
            kind: AssemblyViewKind::Data,
            axial_level: level,
            feature: Some(AXIAL_POWER.into()),
            ..Default::default()
        }
    }

    #[test]
    fn level_values_mark_missing_and_empty() {
        let r = samples::pwr_3a();
        let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
        let vals = level_values(&v, AXIAL_POWER, 0.0, 28).unwrap();
        assert_eq!(vals.len(), 289);
        assert!(vals.iter().all(Option::is_some));
        let nan = vals.iter().filter(|x| x.unwrap().is_nan()).count();
        assert_eq!(nan, 289 - PWR_FUEL_PINS);
        let (gr, gc) = GUIDE_TUBES[0];
        assert!(vals[gr * 17 + gc].unwrap().is_nan());
    }

    #[test]
    fn data_view_shapes() {
        let r = samples::pwr_3a();
        let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
        let svg = render_assembly(&v, &data_spec(28)).unwrap();
        assert_eq!(svg.matches("class=\"pin\"").count(), 289);
        assert_eq!(svg.matches("fill=\"#808080\"").count(), 289 - PWR_FUEL_PINS);
        assert_eq!(svg.matches("class=\"axial-level").count(), PWR_AXIAL_LEVELS);
        assert_eq!(svg.matches("axial-level selected\" data-level=\"28\"").count(), 1);
        // the extremes of the level take the ends of the hue range
        assert!(svg.contains("fill=\"#0000ff\""));
        assert!(svg.contains("fill=\"#ff0000\""));
    }

    #[test]
    fn scopes_widen_the_scale() {
        let r = samples::pwr_3a();
        let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
        let lvl = color_scale(&v, AXIAL_POWER, 0.0, 1, Scope::SelectedLevel).unwrap();
        let all = color_scale(&v, AXIAL_POWER, 0.0, 1, Scope::WholeAssembly).unwrap();
        assert!(all.min <= lvl.min && all.max >= lvl.max);
        assert!(all.max > lvl.max);
        let everything = color_scale(&v, AXIAL_POWER, 0.0, 1, Scope::AllAssemblies).unwrap();
        assert_eq!((everything.min, everything.max), (all.min, all.max));
    }

    #[test]
    fn argument_errors() {
        let r = samples::pwr_3a();
        let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
        assert!(matches!(render_assembly(&v, &data_spec(0)), Err(RenderError::InvalidArgument(_))));
        assert!(matches!(render_assembly(&v, &data_spec(50)), Err(RenderError::InvalidArgument(_))));
        let mut spec = data_spec(1);
        spec.feature = Some("Flux".into());
        assert!(matches!(render_assembly(&v, &spec), Err(RenderError::NotFound(_))));
        spec.feature = None;
        assert!(render_assembly(&v, &spec).is_err());
        let spec = AssemblyViewSpec {
            window: Some(Window { row0: 10, col0: 0, rows: 8, cols: 1 }),
            ..Default::default()
        };
        assert!(render_assembly(&v, &spec).is_err());
    }

    #[test]
    fn geometry_window() {
        let r = samples::pwr_3a();
        let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
        let spec = AssemblyViewSpec {
            window: Some(Window { row0: 0, col0: 0, rows: 9, cols: 9 }),
            ..Default::default()
        };
        let svg = render_assembly(&v, &spec).unwrap();
        assert_eq!(svg.matches("<circle class=\"pin\"").count(), 81);
        assert!(!svg.contains("axial-level"));
        assert!(svg.contains("data-kind=\"control\""));
        assert!(svg.contains("viewBox=\"-0.315 -0.315 11.97 11.97\""));
    }

    #[test]
    fn sfr_data_uses_hexagons() {
        let r = samples::sfr7();
        let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
        let spec = AssemblyViewSpec {
            kind: AssemblyViewKind::Data,
            feature: Some(samples::SFR_FEATURE.into()),
            ..Default::default()
        };
        let svg = render_assembly(&v, &spec).unwrap();
        assert_eq!(svg.matches("<polygon class=\"pin\"").count(), 7);
    }
}
