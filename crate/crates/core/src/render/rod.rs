use super::color::{color_for, ColorScale, Rgb, Scope};
use super::svg::{esc, num, Bounds, Doc};
use super::{RenderError, Result};
use crate::model::{AxialPoint, Material, Phase, RodDef};

/// Fill for a ring by material: gases yellow, fuels red, cladding and
/// structural metals green, anything else gray. Fuel names are checked
/// first, so "UO2 cladding" still reads as fuel.
pub fn material_color(material: &Material) -> Rgb {
    let name = material.name().to_ascii_lowercase();
    let has = |keys: &[&str]| keys.iter().any(|k| name.contains(k));
    if material.phase() == Phase::Gas {
        Rgb(0xff, 0xe1, 0x19)
    } else if has(&["fuel", "uo2", "mox", "u-zr"]) {
        Rgb(0xd6, 0x27, 0x28)
    } else if has(&["clad", "zirc", "zr", "steel", "ss", "ht9"]) {
        Rgb(0x2c, 0xa0, 0x2c)
    } else {
        Rgb(0x7f, 0x7f, 0x7f)
    }
}

const MM: f64 = 10.0;

fn circle_path(r: f64) -> String {
    // two arcs, starting at the rightmost point
    format!(
        "M {} 0 A {} {} 0 1 0 {} 0 A {} {} 0 1 0 {} 0 Z",
        num(r),
        num(r),
        num(r),
        num(-r),
        num(r),
        num(r),
        num(r)
    )
}

/// Radial cross-section of a rod at height `z`, centered on the origin.
/// Coordinates are in mm so thin gaps keep their width at three decimals.
///
/// Each ring is a filled circle or annulus colored by material. A height
/// no block covers shows a dashed outline instead. With `data`, the point
/// nearest in z is drawn as a colored band around the rod plus a value
/// label; the band's scale spans all of `data`.
pub fn render_rod(rod: &RodDef, z: f64, data: Option<&[AxialPoint]>) -> Result<String> {
    if rod.blocks().is_empty() {
        return Err(RenderError::InvalidArgument(format!("rod {:?} has no blocks", rod.name())));
    }
    if z.is_nan() {
        return Err(RenderError::InvalidArgument("z is NaN".into()));
    }
    let data = match data {
        Some([]) => {
            return Err(RenderError::InvalidArgument("empty axial data".into()));
        }
        Some(points) if points.iter().any(|p| !p.z.is_finite()) => {
            return Err(RenderError::InvalidArgument("axial data has a non-finite z".into()));
        }
        other => other,
    };
    let radius = rod.outer_radius() * MM;
    let reach = if data.is_some() { 1.6 * radius } else { 1.1 * radius };
    let mut bounds = Bounds::empty();
    bounds.add_box(0.0, 0.0, reach);
    let mut doc = Doc::new(bounds, 320.0, &format!("{} at z = {}", rod.name(), num(z)));
    let sw = num(0.01 * radius);

    // the top face belongs to the block ending there
    let top = rod.blocks().iter().map(|b| b.z_end()).fold(f64::NEG_INFINITY, f64::max);
    let block = rod
        .block_at(z)
        .or_else(|| (z == top).then(|| rod.blocks().iter().rev().find(|b| b.z_end() == top)).flatten());
    match block {
        None => doc.line(format!(
            "<circle class=\"empty-cross-section\" cx=\"0\" cy=\"0\" r=\"{}\" fill=\"none\" stroke=\"#7f7f7f\" stroke-width=\"{sw}\" stroke-dasharray=\"{} {}\"/>",
            num(radius),
            num(0.08 * radius),
            num(0.08 * radius)
        )),
        Some(block) => {
            for ring in block.rings() {
                let fill = material_color(ring.material());
                let common = format!(
                    "class=\"ring\" data-material=\"{}\" data-inner-cm=\"{:?}\" data-outer-cm=\"{:?}\" fill=\"{fill}\" stroke=\"#404040\" stroke-width=\"{sw}\"",
                    esc(ring.material().name()),
                    ring.inner_radius(),
                    ring.outer_radius()
                );
                if ring.inner_radius() == 0.0 {
                    doc.line(format!(
                        "<circle {common} cx=\"0\" cy=\"0\" r=\"{}\"/>",
                        num(ring.outer_radius() * MM)
                    ));
                } else {
                    doc.line(format!(
                        "<path {common} fill-rule=\"evenodd\" d=\"{} {}\"/>",
                        circle_path(ring.outer_radius() * MM),
                        circle_path(ring.inner_radius() * MM)
                    ));
                }
            }
        }
    }

    if let Some(points) = data {
        let nearest = points
            .iter()
            .min_by(|a, b| (a.z - z).abs().total_cmp(&(b.z - z).abs()))
            .expect("non-empty");
        let scale = ColorScale::spanning(points.iter().map(|p| p.value), Scope::WholeAssembly);
        doc.line(format!(
            "<circle class=\"data-band\" data-z=\"{}\" data-value=\"{:?}\" cx=\"0\" cy=\"0\" r=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            num(nearest.z),
            nearest.value,
            num(1.2 * radius),
            color_for(nearest.value, &scale),
            num(0.12 * radius)
        ));
        doc.text(
            0.0,
            1.45 * radius,
            0.18 * radius,
            "middle",
            "data-label",
            &format!("{} at z = {}", num(nearest.value), num(nearest.z)),
        );
    }
    Ok(doc.finish())
}
