use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header;
use axum::response::{Html, IntoResponse, Response};
use corelens::analysis::Params;
use corelens::model::{AssemblyType, AssemblyView, Reactor};
use corelens::render::{
    self, assembly_color, color_scale, level_values, AssemblyViewKind, AssemblyViewSpec, Scope,
};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::ApiError;
use crate::json::{self, num, respond};
use crate::session::Session;

type Shared = State<Arc<Session>>;
type Q = Query<BTreeMap<String, String>>;
type ApiResult = Result<Response, ApiError>;

const INDEX_HTML: &str = include_str!("index.html");

pub async fn index() -> Html<&'static str> {
    Html(INDEX_HTML)
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

fn parse<T: FromStr>(what: &str, raw: &str) -> Result<T, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::invalid_param(format!("{what}: cannot parse {raw:?}")))
}

fn finite(what: &str, raw: &str) -> Result<f64, ApiError> {
    let v: f64 = parse(what, raw)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ApiError::invalid_param(format!("{what} must be finite")))
    }
}

/// A grid type this reactor has.
fn assembly_type(reactor: &Reactor, raw: &str) -> Result<AssemblyType, ApiError> {
    let t = AssemblyType::from_str(raw).map_err(|e| ApiError::invalid_param(e.to_string()))?;
    if reactor.grid(t).is_none() {
        return Err(ApiError::not_found(format!("{} reactors have no {t} grid", reactor.reactor_type())));
    }
    Ok(t)
}

/// `type` query parameter; absent or `all` means the composite view.
fn type_filter(reactor: &Reactor, q: &BTreeMap<String, String>) -> Result<Option<AssemblyType>, ApiError> {
    match q.get("type").map(String::as_str) {
        None | Some("") | Some("all") => Ok(None),
        Some(raw) => assembly_type(reactor, raw).map(Some),
    }
}

fn core_cell(reactor: &Reactor, row: &str, col: &str) -> Result<(usize, usize), ApiError> {
    let (r, c): (usize, usize) = (parse("row", row)?, parse("col", col)?);
    let n = reactor.size();
    if r >= n || c >= n {
        return Err(ApiError::invalid_param(format!("cell ({r}, {c}) outside {n}x{n} core")));
    }
    Ok((r, c))
}

pub async fn files(State(s): Shared) -> Response {
    let files: Vec<Value> = s
        .files()
        .iter()
        .map(|f| {
            json!({
                "id": f.id,
                "name": f.name,
                "path": f.path.display().to_string(),
                "size_bytes": f.size_bytes,
                "reactors": f.reactors.iter().map(Reactor::name).collect::<Vec<_>>(),
            })
        })
        .collect();
    respond(json!({ "files": files }))
}

pub async fn reactors(State(s): Shared, Path(fid): Path<String>) -> ApiResult {
    let file = s.file(&fid)?;
    let reactors: Vec<Value> = file.reactors.iter().map(json::reactor_summary).collect();
    Ok(respond(json!({ "file": fid, "reactors": reactors })))
}

pub async fn core(State(s): Shared, Path((fid, rname)): Path<(String, String)>, Query(q): Q) -> ApiResult {
    let reactor = s.reactor(&fid, &rname)?;
    let only = type_filter(reactor, &q)?;
    let n = reactor.size();
    let mut cells = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if let Some((t, d)) = reactor.cell_assembly(only, r, c) {
                cells.push(json!({
                    "row": r,
                    "col": c,
                    "label": reactor.labels().cell_label(r, c),
                    "type": t.as_str(),
                    "def": d,
                }));
            }
        }
    }
    let colors: Map<String, Value> = AssemblyType::allowed(reactor.reactor_type())
        .iter()
        .map(|&t| (t.as_str().to_owned(), assembly_color(t).hex().into()))
        .collect();
    Ok(respond(json!({
        "file": fid,
        "reactor": rname,
        "reactor_type": reactor.reactor_type().as_str(),
        "type": only.map(AssemblyType::as_str),
        "size": n,
        "lattice": json::lattice(reactor.lattice()),
        "labels": json::labels(reactor.labels()),
        "cells": cells,
        "colors": colors,
    })))
}

/// Feature, time, level and scope chosen by query parameters, with
/// defaults: the first feature, its first time, level 1, selected level.
struct DataQuery {
    feature: String,
    time: f64,
    level: usize,
    scope: Scope,
}

fn data_query(view: &AssemblyView<'_>, q: &BTreeMap<String, String>) -> Result<Option<DataQuery>, ApiError> {
    let features = view.features();
    let feature = match q.get("feature") {
        Some(f) if !features.contains(f.as_str()) => {
            return Err(ApiError::not_found(format!("no feature {f:?} in this assembly")));
        }
        Some(f) => f.clone(),
        None => match features.first() {
            Some(f) => (*f).to_owned(),
            None => return Ok(None),
        },
    };
    let time = match q.get("time") {
        Some(raw) => finite("time", raw)?,
        None => view.times(&feature).first().copied().unwrap_or(0.0),
    };
    let level = q.get("level").map_or(Ok(1), |raw| parse("level", raw))?;
    let scope = q
        .get("norm")
        .map_or(Ok(Scope::SelectedLevel), |raw| raw.parse().map_err(ApiError::from))?;
    Ok(Some(DataQuery {
        feature,
        time,
        level,
        scope,
    }))
}

/// z of every level, read from a pin holding the most levels.
fn level_z(view: &AssemblyView<'_>, feature: &str, time: f64) -> Vec<Value> {
    view.data_pins()
        .into_iter()
        .filter_map(|(r, c)| view.axial_series(r, c, feature, time).ok())
        .max_by_key(Vec::len)
        .map(|s| s.into_iter().map(|p| num(p.z)).collect())
        .unwrap_or_default()
}

fn grid_rows<T>(n: usize, mut cell: impl FnMut(usize, usize) -> T) -> Vec<Vec<T>> {
    (0..n).map(|r| (0..n).map(|c| cell(r, c)).collect()).collect()
}

pub async fn assembly(
    State(s): Shared,
    Path((fid, rname, atype, row, col)): Path<(String, String, String, String, String)>,
    Query(q): Q,
) -> ApiResult {
    let reactor = s.reactor(&fid, &rname)?;
    let t = assembly_type(reactor, &atype)?;
    let (row, col) = core_cell(reactor, &row, &col)?;
    let view = reactor
        .assembly_view_at(t, row, col)
        .ok_or_else(|| ApiError::not_found(format!("no {t} assembly at ({row}, {col})")))?;
    let def = view.def();
    let n = view.size();
    let mut body = json!({
        "file": fid,
        "reactor": rname,
        "type": t.as_str(),
        "row": row,
        "col": col,
        "cell_label": reactor.labels().cell_label(row, col),
        "def": { "index": view.def_index(), "name": def.name(), "rod_pitch": num(def.rod_pitch()) },
        "size": n,
        "labels": json::labels(def.labels()),
        "occupied": grid_rows(n, |r, c| view.rod_at(r, c).is_some()),
        "kinds": grid_rows(n, |r, c| view.rod_at(r, c).map(|rod| rod.kind().as_str())),
        "features": view.features().into_iter().collect::<Vec<_>>(),
    });
    let Some(dq) = data_query(&view, &q)? else {
        for key in ["feature", "time", "times", "level", "levels", "level_z", "norm", "values", "scale"] {
            body[key] = Value::Null;
        }
        return Ok(respond(body));
    };
    let values = level_values(&view, &dq.feature, dq.time, dq.level)?;
    let scale = color_scale(&view, &dq.feature, dq.time, dq.level, dq.scope)?;
    body["feature"] = dq.feature.as_str().into();
    body["time"] = num(dq.time);
    body["times"] = view.times(&dq.feature).into_iter().map(num).collect();
    body["level"] = dq.level.into();
    body["levels"] = view.axial_levels(&dq.feature, dq.time).into();
    body["level_z"] = level_z(&view, &dq.feature, dq.time).into();
    body["norm"] = dq.scope.as_str().into();
    body["values"] = grid_rows(n, |r, c| json::opt_num(values[r * n + c])).into();
    body["scale"] = json!({ "min": num(scale.min), "max": num(scale.max), "scope": scale.scope.as_str() });
    Ok(respond(body))
}

pub async fn rod(
    State(s): Shared,
    Path((fid, rname, arow, acol, prow, pcol)): Path<(String, String, String, String, String, String)>,
    Query(q): Q,
) -> ApiResult {
    let reactor = s.reactor(&fid, &rname)?;
    let only = type_filter(reactor, &q)?;
    let (arow, acol) = core_cell(reactor, &arow, &acol)?;
    let (t, d) = reactor
        .cell_assembly(only, arow, acol)
        .ok_or_else(|| ApiError::not_found(format!("no assembly at ({arow}, {acol})")))?;
    let view = reactor.assembly_view(d as usize).expect("placed defs exist");
    let (prow, pcol): (usize, usize) = (parse("prow", &prow)?, parse("pcol", &pcol)?);
    if prow >= view.size() || pcol >= view.size() {
        return Err(ApiError::invalid_param(format!(
            "pin ({prow}, {pcol}) outside {0}x{0} assembly",
            view.size()
        )));
    }
    let rod = view
        .rod_at(prow, pcol)
        .ok_or_else(|| ApiError::not_found(format!("no rod at pin {}", view.label(prow, pcol))))?;
    let rod_index = view.def().rod_at(prow, pcol).expect("rod present") as usize;

    let ring_json = |g: &corelens::model::Ring| {
        json!({
            "material": g.material().name(),
            "phase": g.material().phase().as_str(),
            "inner_radius": num(g.inner_radius()),
            "outer_radius": num(g.outer_radius()),
        })
    };
    let blocks: Vec<Value> = rod
        .blocks()
        .iter()
        .map(|b| {
            json!({
                "z_start": num(b.z_start()),
                "z_end": num(b.z_end()),
                "rings": b.rings().iter().map(ring_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let z = match q.get("z") {
        Some(raw) => finite("z", raw)?,
        None => match (rod.blocks().first(), rod.blocks().last()) {
            (Some(a), Some(b)) => 0.5 * (a.z_start() + b.z_end()),
            _ => 0.0,
        },
    };
    let rings: Vec<Value> = rod.block_at(z).map_or_else(Vec::new, |b| b.rings().iter().map(ring_json).collect());
    let time = q.get("time").map(|raw| finite("time", raw)).transpose()?;

    let mut series = Map::new();
    for f in view.features() {
        if !view.pin_has_feature(prow, pcol, f) {
            continue;
        }
        let times = view.times(f);
        let t = time.unwrap_or_else(|| times.first().copied().unwrap_or(0.0));
        let points: Vec<Value> = view
            .axial_series(prow, pcol, f, t)
            .map(|s| {
                s.into_iter()
                    .map(|p| json!({ "z": num(p.z), "value": num(p.value), "uncertainty": num(p.uncertainty) }))
                    .collect()
            })
            .unwrap_or_default();
        series.insert(f.to_owned(), json!({ "time": num(t), "points": points }));
    }

    let mut rod_json = json::rod_summary(rod_index, rod);
    rod_json["height"] = num(rod.height());
    Ok(respond(json!({
        "file": fid,
        "reactor": rname,
        "assembly": { "type": t.as_str(), "row": arow, "col": acol, "def": d },
        "pin": { "row": prow, "col": pcol, "label": view.label(prow, pcol) },
        "rod": rod_json,
        "blocks": blocks,
        "z": num(z),
        "in_gap": rod.block_at(z).is_none(),
        "rings": rings,
        "series": series,
    })))
}

fn svg(body: String) -> Response {
    ([(header::CONTENT_TYPE, "image/svg+xml")], body).into_response()
}

pub async fn core_svg(State(s): Shared, Path((fid, rname)): Path<(String, String)>, Query(q): Q) -> ApiResult {
    let reactor = s.reactor(&fid, &rname)?;
    let only = type_filter(reactor, &q)?;
    let selected = match (q.get("row"), q.get("col")) {
        (Some(r), Some(c)) => Some(core_cell(reactor, r, c)?),
        _ => None,
    };
    Ok(svg(render::render_core(reactor, only, selected)?))
}

pub async fn assembly_svg(
    State(s): Shared,
    Path((fid, rname, atype, row, col)): Path<(String, String, String, String, String)>,
    Query(q): Q,
) -> ApiResult {
    let reactor = s.reactor(&fid, &rname)?;
    let t = assembly_type(reactor, &atype)?;
    let (row, col) = core_cell(reactor, &row, &col)?;
    let view = reactor
        .assembly_view_at(t, row, col)
        .ok_or_else(|| ApiError::not_found(format!("no {t} assembly at ({row}, {col})")))?;
    let kind = match q.get("view").map(String::as_str) {
        None | Some("geometry") => AssemblyViewKind::Geometry,
        Some("data") => AssemblyViewKind::Data,
        Some(other) => return Err(ApiError::invalid_param(format!("view must be geometry or data, got {other:?}"))),
    };
    let spec = match data_query(&view, &q)? {
        Some(dq) => AssemblyViewSpec {
            kind,
            axial_level: dq.level,
            feature: Some(dq.feature),
            time: dq.time,
            scope: dq.scope,
            window: None,
        },
        None => AssemblyViewSpec {
            kind,
            ..Default::default()
        },
    };
    Ok(svg(render::render_assembly(&view, &spec)?))
}

pub async fn tools(State(s): Shared) -> Response {
    let tools: Vec<Value> = s.registry().list().iter().map(json::tool).collect();
    respond(json!({ "tools": tools }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunRequest {
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    assemblies: Vec<AssemblyRef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssemblyRef {
    file: String,
    reactor: String,
    #[serde(rename = "type", default)]
    assembly_type: Option<String>,
    row: usize,
    col: usize,
}

pub async fn run_tool(State(s): Shared, Path(name): Path<String>, body: Bytes) -> ApiResult {
    if s.registry().get(&name).is_none() {
        return Err(ApiError::not_found(format!("no analysis tool {name:?}")));
    }
    let req: RunRequest = if body.is_empty() {
        RunRequest {
            params: Map::new(),
            assemblies: Vec::new(),
        }
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::malformed_body(e.to_string()))?
    };
    let params: Params = req
        .params
        .iter()
        .map(|(k, v)| json::to_param(k, v).map(|p| (k.clone(), p)))
        .collect::<Result<_, _>>()
        .map_err(ApiError::invalid_param)?;

    let session = Arc::clone(&s);
    let outcome = tokio::task::spawn_blocking(move || -> Result<(String, Value), ApiError> {
        let mut views = Vec::with_capacity(req.assemblies.len());
        for a in &req.assemblies {
            let reactor = session.reactor(&a.file, &a.reactor)?;
            let only = match a.assembly_type.as_deref() {
                None | Some("all") => None,
                Some(raw) => Some(assembly_type(reactor, raw)?),
            };
            let (_, d) = reactor.cell_assembly(only, a.row, a.col).ok_or_else(|| {
                ApiError::not_found(format!("no assembly at ({}, {}) in {:?}", a.row, a.col, a.reactor))
            })?;
            views.push(reactor.assembly_view(d as usize).expect("placed defs exist"));
        }
        let result = session.registry().run(&name, &views, &params)?;
        let id = session.store_result(result.clone());
        let body = json::result(&id, &result);
        Ok((id, body))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?;
    let (_, body) = outcome?;
    Ok(respond(body))
}

pub async fn results(State(s): Shared) -> Response {
    let results: Vec<Value> = s
        .result_index()
        .into_iter()
        .map(|(id, tool, created_at)| json!({ "result_id": id, "tool": tool, "created_at": created_at }))
        .collect();
    respond(json!({ "results": results }))
}

pub async fn result(State(s): Shared, Path(id): Path<String>) -> ApiResult {
    let r = s
        .result(&id)
        .ok_or_else(|| ApiError::not_found(format!("no result {id:?}")))?;
    Ok(respond(json::result(&id, &r)))
}
