use std::fmt::Write;

use super::registry::ParamsExt;
use super::{
    AnalysisError, AnalysisResult, AnalysisTool, Matrix, ParamKind, ParamSpec, ParamValue, Params, Result, Series,
    Table,
};
use crate::model::{AssemblyView, AxialPoint};

/// Mean of every `feature` value at `time` over the data-bearing pins that
/// carry the feature.
fn assembly_mean(view: &AssemblyView<'_>, feature: &str, time: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (r, c) in view.data_pins() {
        if let Ok(entries) = view.pin_entries(r, c, feature, time) {
            sum += entries.iter().map(|e| e.value).sum::<f64>();
            n += entries.len();
        }
    }
    let mean = sum / n as f64;
    if n == 0 || !mean.is_finite() || mean == 0.0 {
        return Err(AnalysisError::InvalidArgument(format!(
            "assembly {:?} has no usable {feature:?} data at t={time} to normalize by",
            view.def().name()
        )));
    }
    Ok(mean)
}

fn series_at(view: &AssemblyView<'_>, label: &str, feature: &str, time: f64) -> Result<Vec<AxialPoint>> {
    let (r, c) = view.find_pin(label)?;
    if view.def().rod_at(r, c).is_none() {
        return Err(AnalysisError::NotFound(format!(
            "pin {label} is empty in {:?}",
            view.def().name()
        )));
    }
    Ok(view.axial_series(r, c, feature, time)?)
}

/// Percentage difference between the normalized pin series of `input` and
/// `reference`.
///
/// Each assembly is scaled independently so that the mean of `feature` over
/// all its data-bearing pins and levels is 1. Then, per pin and level,
/// `diff = 100 * (in - ref) / ref`. Reference values of zero become gaps,
/// listed in [`Series::missing`] and stored as NaN in the table. An empty
/// `pins` list selects every data-bearing pin of `input` that has the
/// feature.
pub fn pin_diff(
    input: &AssemblyView<'_>,
    reference: &AssemblyView<'_>,
    feature: &str,
    pins: &[String],
    time: f64,
) -> Result<AnalysisResult> {
    if input.size() != reference.size() {
        return Err(AnalysisError::Shape(format!(
            "assemblies differ in size: {0}x{0} vs {1}x{1}",
            input.size(),
            reference.size()
        )));
    }
    let pins: Vec<String> = if pins.is_empty() {
        input
            .data_pins()
            .into_iter()
            .filter(|&(r, c)| input.pin_has_feature(r, c, feature))
            .map(|(r, c)| input.label(r, c))
            .collect()
    } else {
        pins.to_vec()
    };
    let mi = assembly_mean(input, feature, time)?;
    let mr = assembly_mean(reference, feature, time)?;

    let mut result = AnalysisResult::new("pin_diff");
    result.auto_plot = true;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(pins.len());
    let mut csv = String::from("pin,level,z,input_normalized,reference_normalized,percent_difference\n");
    for label in &pins {
        let a = series_at(input, label, feature, time)?;
        let b = series_at(reference, label, feature, time)?;
        if a.len() != b.len() {
            return Err(AnalysisError::Shape(format!(
                "pin {label}: {} input levels vs {} reference levels",
                a.len(),
                b.len()
            )));
        }
        let mut series = Series::new(label.clone(), Vec::with_capacity(a.len()));
        let mut row = Vec::with_capacity(a.len());
        for (k, (p, q)) in a.iter().zip(&b).enumerate() {
            let x = p.value / mi;
            let y = q.value / mr;
            let d = if y == 0.0 { f64::NAN } else { 100.0 * (x - y) / y };
            if d.is_nan() {
                series.missing.push(p.z);
            } else {
                series.points.push((p.z, d));
            }
            row.push(d);
            let _ = writeln!(csv, "{label},{},{:?},{x:?},{y:?},{d:?}", k + 1, p.z);
        }
        result.series.push(series);
        rows.push(row);
    }
    let levels = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut values = Matrix::new(rows.len(), levels, vec![f64::NAN; rows.len() * levels])?;
    for (i, row) in rows.iter().enumerate() {
        values.row_mut(i)[..row.len()].copy_from_slice(row);
    }
    let col_labels = (1..=levels).map(|k| k.to_string()).collect();
    result
        .tables
        .push(Table::new("percent_difference", pins.clone(), col_labels, values)?);
    result.add_artifact("pin_diff.csv", csv.into_bytes())?;
    Ok(result)
}

/// Registry adapter for [`pin_diff`]; takes `[input, reference]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PinDiffTool;

impl AnalysisTool for PinDiffTool {
    fn name(&self) -> &str {
        "pin_diff"
    }

    fn description(&self) -> &str {
        "Normalized percentage difference of pin axial series between an input and a reference assembly"
    }

    fn params(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::new("feature", ParamKind::Str, ParamValue::Str("Axial Power".into()), "feature to compare"),
            ParamSpec::new(
                "pins",
                ParamKind::Str,
                ParamValue::Str(String::new()),
                "comma-separated pin labels; empty means every pin with data",
            ),
            ParamSpec::new("time", ParamKind::Float, ParamValue::Float(0.0), "time in seconds"),
        ]
    }

    fn is_default(&self) -> bool {
        true
    }

    fn run(&self, assemblies: &[AssemblyView<'_>], params: &Params) -> Result<AnalysisResult> {
        let [input, reference] = assemblies else {
            return Err(AnalysisError::InvalidArgument(format!(
                "pin_diff takes an input and a reference assembly, got {}",
                assemblies.len()
            )));
        };
        let pins: Vec<String> = params
            .str_param("pins")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        pin_diff(input, reference, params.str_param("feature"), &pins, params.float_param("time"))
    }
}
