use super::color::Rgb;
use super::svg::{esc, hexagon, num, points_attr, Bounds, Doc};
use super::{RenderError, Result};
use crate::model::{lattice_point, AssemblyType, Lattice, Reactor, ReactorType};

/// Fixed fill per assembly type.
pub fn assembly_color(ty: AssemblyType) -> Rgb {
    match ty {
        AssemblyType::Fuel => Rgb(0x2c, 0xa0, 0x2c),
        AssemblyType::ControlBank | AssemblyType::Control => Rgb(0xff, 0xd7, 0x00),
        AssemblyType::IncoreInstrument => Rgb(0x1f, 0x77, 0xb4),
        AssemblyType::RodCluster => Rgb(0xff, 0x7f, 0x0e),
        AssemblyType::Reflector => Rgb(0x7f, 0x7f, 0x7f),
        AssemblyType::Shield => Rgb(0x94, 0x67, 0xbd),
        AssemblyType::Test => Rgb(0x17, 0xbe, 0xcf),
    }
}

const EMPTY_FILL: &str = "#f4f4f4";
const EMPTY_STROKE: &str = "#c8c8c8";
const STROKE: &str = "#404040";
const SELECTED: &str = "#d62728";

/// Which type to show at a cell: the requested one, or with `None` the first
/// allowed type present there.
/// Cell outline centered on `(x, y)`: a square of side `pitch` or a
/// flat-topped hexagon with circumradius `hex_radius`.
pub(super) fn cell_shape(
    reactor_type: ReactorType,
    (x, y): (f64, f64),
    pitch: f64,
    hex_radius: f64,
    attrs: &str,
) -> String {
    match reactor_type {
        ReactorType::Pwr => format!(
            "<rect {attrs} x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
            num(x - pitch / 2.0),
            num(y - pitch / 2.0),
            num(pitch),
            num(pitch)
        ),
        ReactorType::Sfr => format!(
            "<polygon {attrs} points=\"{}\"/>",
            points_attr(&hexagon(x, y, hex_radius))
        ),
    }
}

/// Core map: one square (PWR) or flat-topped hexagon (SFR) per grid cell,
/// row labels on the left and column labels on top.
///
/// With `assembly_type` set, only that type's grid is drawn; with `None`,
/// each cell shows the first type in grid order that occupies it. Occupied
/// cells carry `class="cell"`, empty ones `class="empty"`. `selected` is
/// outlined.
pub fn render_core(
    reactor: &Reactor,
    assembly_type: Option<AssemblyType>,
    selected: Option<(usize, usize)>,
) -> Result<String> {
    let kind = reactor.reactor_type();
    if let Some(t) = assembly_type {
        if reactor.grid(t).is_none() {
            return Err(RenderError::NotFound(format!("{kind} reactors have no {t} grid")));
        }
    }
    let n = reactor.size();
    if let Some((r, c)) = selected {
        if r >= n || c >= n {
            return Err(RenderError::InvalidArgument(format!(
                "selected cell ({r}, {c}) outside {n}x{n} core"
            )));
        }
    }
    let p = reactor.lattice().pitch();
    let hex_radius = match reactor.lattice() {
        Lattice::Square { .. } => p / 2.0,
        Lattice::Hex { flat_to_flat, .. } => flat_to_flat / 3f64.sqrt(),
    };
    let center = |r: isize, c: isize| lattice_point(kind, p, r as f64, c as f64);

    // label cells sit one step outside the grid
    let mut bounds = Bounds::empty();
    for r in -1..n as isize {
        for c in -1..n as isize {
            if r >= 0 || c >= 0 {
                let (x, y) = center(r, c);
                bounds.add_box(x, y, hex_radius);
            }
        }
    }
    let pad = 0.25 * p;
    bounds.add(bounds.min_x - pad, bounds.min_y - pad);
    bounds.add(bounds.max_x + pad, bounds.max_y + pad);

    let title = match assembly_type {
        Some(t) => format!("{} core, {t} assemblies", reactor.name()),
        None => format!("{} core, all assemblies", reactor.name()),
    };
    let mut doc = Doc::new(bounds, 480.0, &title);
    let sw = num(0.02 * p);
    for r in 0..n {
        for c in 0..n {
            let xy = center(r as isize, c as isize);
            let attrs = match reactor.cell_assembly(assembly_type, r, c) {
                Some((t, def)) => format!(
                    "class=\"cell\" data-row=\"{r}\" data-col=\"{c}\" data-label=\"{}\" data-type=\"{t}\" data-def=\"{def}\" fill=\"{}\" stroke=\"{STROKE}\" stroke-width=\"{sw}\"",
                    esc(&reactor.labels().cell_label(r, c)),
                    assembly_color(t)
                ),
                None => format!(
                    "class=\"empty\" data-row=\"{r}\" data-col=\"{c}\" fill=\"{EMPTY_FILL}\" stroke=\"{EMPTY_STROKE}\" stroke-width=\"{sw}\""
                ),
            };
            doc.line(cell_shape(kind, xy, p, hex_radius, &attrs));
        }
    }
    let fs = 0.3 * p;
    for (r, label) in reactor.labels().rows().iter().enumerate() {
        let (x, y) = center(r as isize, -1);
        doc.text(x, y, fs, "middle", "row-label", label);
    }
    for (c, label) in reactor.labels().cols().iter().enumerate() {
        let (x, y) = center(-1, c as isize);
        doc.text(x, y, fs, "middle", "col-label", label);
    }
    if let Some((r, c)) = selected {
        let attrs = format!(
            "class=\"selected\" fill=\"none\" stroke=\"{SELECTED}\" stroke-width=\"{}\"",
            num(0.06 * p)
        );
        doc.line(cell_shape(kind, center(r as isize, c as isize), p, hex_radius, &attrs));
    }
    Ok(doc.finish())
}
