use super::{AnalysisError, Matrix, Result};
use crate::model::AssemblyView;

/// One row per data-bearing pin (row-major), holding the pin's axial values
/// of `feature` at `time` in ascending z. Labels are the pins' grid labels.
///
/// Pins with no data at all are skipped; a data-bearing pin without the
/// feature, or with a different level count, is a shape error.
pub fn pin_feature_vectors(view: &AssemblyView<'_>, feature: &str, time: f64) -> Result<(Vec<String>, Matrix)> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, c) in view.data_pins() {
        let label = view.label(r, c);
        let series = view.axial_series(r, c, feature, time).map_err(|_| {
            AnalysisError::Shape(format!("pin {label} has no {feature:?} data at t={time}"))
        })?;
        if let Some(first) = rows.first() {
            if first.len() != series.len() {
                return Err(AnalysisError::Shape(format!(
                    "pin {label} has {} levels, pin {} has {}",
                    series.len(),
                    labels[0],
                    first.len()
                )));
            }
        }
        rows.push(series.iter().map(|p| p.value).collect());
        labels.push(label);
    }
    Ok((labels, Matrix::from_rows(&rows)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AssemblyDef, AssemblyType, DataEntry, Material, MaterialBlock, Phase, ReactorBuilder, Ring, RodDef, RodKind};

    fn reactor(levels: &[(usize, usize, usize)]) -> crate::model::Reactor {
        let mut b = ReactorBuilder::pwr("r", 1, 10.0).unwrap();
        b.add_unit("u").unwrap();
        let m = Material::new("UO2", Phase::Solid).unwrap();
        let block = MaterialBlock::new(0.0, 1.0, vec![Ring::new(m, 0.0, 0.4, 1.0).unwrap()]).unwrap();
        b.add_rod_def(RodDef::new("f", RodKind::Fuel, vec![block]).unwrap()).unwrap();
        let mut def = AssemblyDef::new("a", AssemblyType::Fuel, 3, 1.0).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                def.set_rod(r, c, Some(0)).unwrap();
            }
        }
        for &(r, c, n) in levels {
            for k in 0..n {
                let e = DataEntry::new((r * 10 + c + k) as f64, 0.0, 0, [0.0, 0.0, k as f64], 0.0);
                def.add_pin_data(r, c, "P", e).unwrap();
            }
        }
        let i = b.add_assembly_def(def).unwrap();
        b.set_assembly(AssemblyType::Fuel, 0, 0, i).unwrap();
        b.freeze().unwrap()
    }

    #[test]
    fn rows_per_data_pin() {
        let r = reactor(&[(0, 0, 49), (1, 2, 49), (2, 1, 49)]);
        let (labels, m) = pin_feature_vectors(&r.assembly_view(0).unwrap(), "P", 0.0).unwrap();
        assert_eq!(labels, vec!["A1", "B3", "C2"]);
        assert_eq!((m.rows(), m.cols()), (3, 49));
        assert_eq!(m.get(1, 2), 14.0);
    }

    #[test]
    fn empty_and_errors() {
        let r = reactor(&[]);
        let (labels, m) = pin_feature_vectors(&r.assembly_view(0).unwrap(), "P", 0.0).unwrap();
        assert!(labels.is_empty());
        assert_eq!((m.rows(), m.cols()), (0, 0));

        let r = reactor(&[(0, 0, 3), (1, 1, 2)]);
        let e = pin_feature_vectors(&r.assembly_view(0).unwrap(), "P", 0.0).unwrap_err();
        assert!(matches!(e, AnalysisError::Shape(ref m) if m.contains("B2")), "{e}");

        let r = reactor(&[(0, 0, 3)]);
        let e = pin_feature_vectors(&r.assembly_view(0).unwrap(), "Q", 0.0).unwrap_err();
        assert!(matches!(e, AnalysisError::Shape(ref m) if m.contains("A1")), "{e}");
    }
}
