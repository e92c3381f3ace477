//! Response bodies. `serde_json` maps are ordered by key, so every object
//! serializes with sorted keys; non-finite floats become `null`.

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use corelens::analysis::{AnalysisResult, ParamKind, ParamSpec, ParamValue, ToolInfo};
use corelens::model::{AssemblyDef, AssemblyType, GridLabels, Lattice, Reactor, RodDef};
use serde_json::{json, Map, Value};

use crate::SCHEMA_VERSION;

pub fn respond(body: Value) -> Response {
    respond_with(StatusCode::OK, body)
}

/// Serializes `body` with `schema_version` added.
pub fn respond_with(status: StatusCode, mut body: Value) -> Response {
    if let Value::Object(map) = &mut body {
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
    }
    let bytes = serde_json::to_vec(&body).expect("JSON values always serialize");
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

pub fn num(v: f64) -> Value {
    Value::from(v)
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

pub fn labels(l: &GridLabels) -> Value {
    json!({ "rows": l.rows(), "cols": l.cols() })
}

pub fn lattice(l: Lattice) -> Value {
    match l {
        Lattice::Square { assembly_pitch } => json!({ "kind": "square", "pitch": num(assembly_pitch) }),
        Lattice::Hex {
            lattice_pitch,
            flat_to_flat,
        } => json!({ "kind": "hex", "pitch": num(lattice_pitch), "flat_to_flat": num(flat_to_flat) }),
    }
}

pub fn rod_summary(index: usize, rod: &RodDef) -> Value {
    json!({
        "index": index,
        "name": rod.name(),
        "kind": rod.kind().as_str(),
        "pressure": opt_num(rod.pressure()),
        "outer_radius": num(rod.outer_radius()),
        "blocks": rod.blocks().len(),
    })
}

fn assembly_summary(reactor: &Reactor, index: usize, def: &AssemblyDef) -> Value {
    let view = reactor.assembly_view(index).expect("index within defs");
    let features: Map<String, Value> = view
        .features()
        .into_iter()
        .map(|f| {
            let times = view.times(f);
            let levels = view.axial_levels(f, times.first().copied().unwrap_or(0.0));
            let times: Vec<Value> = times.into_iter().map(num).collect();
            (f.to_owned(), json!({ "times": times, "levels": levels }))
        })
        .collect();
    json!({
        "index": index,
        "name": def.name(),
        "type": def.assembly_type().as_str(),
        "size": def.size(),
        "rod_pitch": num(def.rod_pitch()),
        "duct_thickness": opt_num(def.duct_thickness()),
        "pins": def.rod_grid().occupied().count(),
        "data_pins": view.data_pins().len(),
        "features": features,
    })
}

pub fn reactor_summary(r: &Reactor) -> Value {
    let grids: Vec<Value> = AssemblyType::allowed(r.reactor_type())
        .iter()
        .map(|&t| json!({ "type": t.as_str(), "placed": r.grid(t).map_or(0, |g| g.occupied().count()) }))
        .collect();
    json!({
        "name": r.name(),
        "type": r.reactor_type().as_str(),
        "size": r.size(),
        "lattice": lattice(r.lattice()),
        "labels": labels(r.labels()),
        "units": r.units(),
        "grids": grids,
        "rod_defs": r.rod_defs().iter().enumerate().map(|(i, d)| rod_summary(i, d)).collect::<Vec<_>>(),
        "assembly_defs": r
            .assembly_defs()
            .iter()
            .enumerate()
            .map(|(i, d)| assembly_summary(r, i, d))
            .collect::<Vec<_>>(),
    })
}

pub fn param_value(v: &ParamValue) -> Value {
    match v {
        ParamValue::Int(i) => (*i).into(),
        ParamValue::Float(f) => num(*f),
        ParamValue::Str(s) => s.as_str().into(),
    }
}

fn param_spec(p: &ParamSpec) -> Value {
    let mut v = json!({
        "name": p.name,
        "kind": p.kind.name(),
        "default": param_value(&p.default),
        "help": p.help,
    });
    if let ParamKind::Choice(options) = &p.kind {
        v["choices"] = json!(options);
    }
    v
}

pub fn tool(t: &ToolInfo) -> Value {
    json!({
        "name": t.name,
        "description": t.description,
        "default": t.is_default,
        "params": t.params.iter().map(param_spec).collect::<Vec<_>>(),
    })
}

pub fn timestamp(r: &AnalysisResult) -> String {
    r.created_at.to_rfc3339()
}

pub fn result(id: &str, r: &AnalysisResult) -> Value {
    let tables: Vec<Value> = r
        .tables
        .iter()
        .map(|t| {
            let m = t.values();
            let rows: Vec<Vec<Value>> = (0..m.rows()).map(|i| m.row(i).iter().copied().map(num).collect()).collect();
            json!({
                "name": t.name(),
                "row_labels": t.row_labels(),
                "col_labels": t.col_labels(),
                "values": rows,
            })
        })
        .collect();
    let series: Vec<Value> = r
        .series
        .iter()
        .map(|s| {
            json!({
                "name": s.name,
                "points": s.points.iter().map(|&(x, y)| json!([num(x), num(y)])).collect::<Vec<_>>(),
                "missing": s.missing.iter().copied().map(num).collect::<Vec<_>>(),
            })
        })
        .collect();
    let artifacts: Vec<Value> = r
        .artifacts()
        .iter()
        .map(|a| json!({ "filename": a.filename, "size_bytes": a.bytes.len() }))
        .collect();
    json!({
        "result_id": id,
        "tool": r.tool,
        "created_at": timestamp(r),
        "auto_plot": r.auto_plot,
        "tables": tables,
        "series": series,
        "artifacts": artifacts,
    })
}

/// JSON request value to a tool parameter. Arrays of strings join with
/// commas, so `pins` may be sent either way.
pub fn to_param(name: &str, v: &Value) -> Result<ParamValue, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(ParamValue::Int)
            .or_else(|| n.as_f64().map(ParamValue::Float))
            .ok_or_else(|| format!("parameter {name:?}: number out of range")),
        Value::String(s) => Ok(ParamValue::Str(s.clone())),
        Value::Array(items) => items
            .iter()
            .map(|i| i.as_str().ok_or_else(|| format!("parameter {name:?}: arrays must hold strings")))
            .collect::<Result<Vec<_>, _>>()
            .map(|parts| ParamValue::Str(parts.join(","))),
        _ => Err(format!("parameter {name:?}: expected a number, string or array of strings")),
    }
}
