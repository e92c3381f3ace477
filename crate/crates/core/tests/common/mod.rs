//! Golden artifacts shared by the golden-file and acceptance targets.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under `tests/golden/`.

#![allow(dead_code)]

use std::path::PathBuf;

use corelens::model::AssemblyType;
use corelens::nrdf::{self, FileBuilder, NrdfNode};
use corelens::render::{self, AssemblyViewKind, AssemblyViewSpec, PlotSeries, Scope, Window};
use corelens::samples::{self, AXIAL_POWER, PWR_FUEL_HEIGHT};

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// The five render goldens, freshly generated.
pub fn render_goldens() -> Vec<(&'static str, Vec<u8>)> {
    let r = samples::pwr_3a();
    let view = r.assembly_view_at(AssemblyType::Fuel, 1, 1).expect("3a fuel assembly");
    let core = render::render_core(&r, None, None).expect("core");
    let quarter = render::render_assembly(
        &view,
        &AssemblyViewSpec {
            kind: AssemblyViewKind::Geometry,
            axial_level: 1,
            window: Some(Window { row0: 0, col0: 0, rows: 9, cols: 9 }),
            ..Default::default()
        },
    )
    .expect("quarter geometry");
    let level28 = render::render_assembly(
        &view,
        &AssemblyViewSpec {
            kind: AssemblyViewKind::Data,
            axial_level: 28,
            feature: Some(AXIAL_POWER.into()),
            scope: Scope::SelectedLevel,
            ..Default::default()
        },
    )
    .expect("level 28 data view");
    let rod = render::render_rod(&samples::pwr_fuel_rod(), PWR_FUEL_HEIGHT / 2.0, None).expect("rod");
    let series: Vec<PlotSeries> = ["B2", "E4", "H7"]
        .iter()
        .map(|label| {
            let (row, col) = view.find_pin(label).expect("pin label");
            PlotSeries {
                name: (*label).into(),
                points: view
                    .axial_series(row, col, AXIAL_POWER, 0.0)
                    .expect("series")
                    .iter()
                    .map(|p| (p.z, p.value))
                    .collect(),
            }
        })
        .collect();
    let plot = render::render_plot(&series, "Axial Power", "height (cm)", "relative power").expect("plot");
    vec![
        ("core_3a.svg", core.into_bytes()),
        ("assembly_3a_quarter_geometry.svg", quarter.into_bytes()),
        ("assembly_3a_level28.svg", level28.into_bytes()),
        ("rod_fuel.svg", rod.into_bytes()),
        ("plot_axial_b2_e4_h7.svg", plot.into_bytes()),
    ]
}

/// Three NRDF files used for truncation and mutation runs.
pub fn nrdf_goldens() -> Vec<(&'static str, Vec<u8>)> {
    let empty = FileBuilder::new().finish(NrdfNode::root());
    let sfr = nrdf::store_reactor(&samples::sfr7());
    let skeleton = nrdf::store_reactor(&samples::pwr_3a_skeleton());
    [("empty.nrdf", empty), ("sfr7.nrdf", sfr), ("pwr_3a_skeleton.nrdf", skeleton)]
        .into_iter()
        .map(|(name, f)| (name, nrdf::to_bytes(&f).expect("encode")))
        .collect()
}

/// Compares `bytes` with the stored golden, or rewrites it under
/// `UPDATE_GOLDEN`. Returns a description of the mismatch, if any.
pub fn check_golden(name: &str, bytes: &[u8]) -> Result<(), String> {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).map_err(|e| e.to_string())?;
        std::fs::write(&path, bytes).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let stored = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if stored == bytes {
        return Ok(());
    }
    let at = stored.iter().zip(bytes).position(|(a, b)| a != b).unwrap_or(stored.len().min(bytes.len()));
    Err(format!(
        "{name}: differs from golden at byte {at} ({} stored vs {} generated bytes)",
        stored.len(),
        bytes.len()
    ))
}
