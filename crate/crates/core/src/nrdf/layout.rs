//! Mapping between [`Reactor`]s and NRDF node trees.
//!
//! ```text
//! /reactors/<name>   @reactor_type @size (@assembly_pitch | @lattice_pitch @flat_to_flat)
//!   units            names:u32[n]
//!   labels           rows:u32[n] cols:u32[n]
//!   rod_defs/<i>     @name @kind [@pressure]
//!     blocks/<j>     @z_start @z_end
//!       rings/<k>    @material @phase @inner_radius @outer_radius @height
//!   assembly_defs/<i> @name @assembly_type @size @rod_pitch [@duct_thickness] rod_grid:i64[s,s]
//!     labels
//!     features       per-pin data, with pin:u32[n,2] arrays
//!     own_features   assembly-level data
//!   grids            <assembly type>:i64[n,n] for every allowed type
//!   features
//! ```
//!
//! Any part may carry a `features` child. `features/<feature>` holds
//! `times:f64[T]` and children `t0..t{T-1}` with `value`, `uncertainty`,
//! `units_id` and `position` arrays. String-valued arrays hold heap indices.
//! Grid cells use -1 for "empty". A `features` node is written only when the
//! provider holds data.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{Array, ArrayData, AttrValue, FileBuilder, NrdfError, NrdfFile, NrdfNode, Result};
use crate::model::{
    AssemblyDef, AssemblyType, DataEntry, DataProvider, GridLabels, Lattice, Material, MaterialBlock, ModelError,
    Phase, Reactor, ReactorBuilder, Ring, RodDef, RodKind,
};

/// Encodes one reactor as a complete file.
pub fn store_reactor(reactor: &Reactor) -> NrdfFile {
    store_reactors(std::slice::from_ref(reactor)).expect("a single reactor has a unique name")
}

/// Encodes several reactors under `/reactors`. Names must be unique.
pub fn store_reactors(reactors: &[Reactor]) -> Result<NrdfFile> {
    let mut seen = HashSet::new();
    for r in reactors {
        if !seen.insert(r.name()) {
            return Err(NrdfError::Layout(format!("duplicate reactor name {:?}", r.name())));
        }
    }
    let mut b = FileBuilder::new();
    let mut root = NrdfNode::root();
    let mut list = b.node("reactors");
    for r in reactors {
        list.children.push(encode_reactor(&mut b, r));
    }
    root.children.push(list);
    Ok(b.finish(root))
}

fn encode_reactor(b: &mut FileBuilder, r: &Reactor) -> NrdfNode {
    let mut node = b.node(r.name());
    b.attr_str(&mut node, "reactor_type", r.reactor_type().as_str());
    b.attr(&mut node, "size", AttrValue::U32(r.size() as u32));
    match r.lattice() {
        Lattice::Square { assembly_pitch } => b.attr(&mut node, "assembly_pitch", AttrValue::F64(assembly_pitch)),
        Lattice::Hex {
            lattice_pitch,
            flat_to_flat,
        } => {
            b.attr(&mut node, "lattice_pitch", AttrValue::F64(lattice_pitch));
            b.attr(&mut node, "flat_to_flat", AttrValue::F64(flat_to_flat));
        }
    }

    let mut units = b.node("units");
    let ids: Vec<u32> = r.units().iter().map(|u| b.intern(u)).collect();
    b.array(&mut units, "names", vec![ids.len() as u64], ArrayData::U32(ids));
    node.children.push(units);
    node.children.push(encode_labels(b, r.labels()));

    let mut rods = b.node("rod_defs");
    for (i, rod) in r.rod_defs().iter().enumerate() {
        rods.children.push(encode_rod(b, i, rod));
    }
    node.children.push(rods);

    let mut defs = b.node("assembly_defs");
    for (i, def) in r.assembly_defs().iter().enumerate() {
        defs.children.push(encode_assembly(b, i, def));
    }
    node.children.push(defs);

    let mut grids = b.node("grids");
    for (ty, grid) in r.grids() {
        let n = grid.size() as u64;
        let cells = grid.cells().iter().map(|c| c.map_or(-1, i64::from)).collect();
        b.array(&mut grids, ty.as_str(), vec![n, n], ArrayData::I64(cells));
    }
    node.children.push(grids);

    if let Some(f) = encode_features(b, "features", &[(None, r.data())]) {
        node.children.push(f);
    }
    node
}

fn encode_labels(b: &mut FileBuilder, labels: &GridLabels) -> NrdfNode {
    let mut node = b.node("labels");
    let rows: Vec<u32> = labels.rows().iter().map(|s| b.intern(s)).collect();
    let cols: Vec<u32> = labels.cols().iter().map(|s| b.intern(s)).collect();
    b.array(&mut node, "rows", vec![rows.len() as u64], ArrayData::U32(rows));
    b.array(&mut node, "cols", vec![cols.len() as u64], ArrayData::U32(cols));
    node
}

fn push_features(b: &mut FileBuilder, node: &mut NrdfNode, data: &DataProvider) {
    if let Some(f) = encode_features(b, "features", &[(None, data)]) {
        node.children.push(f);
    }
}

fn encode_rod(b: &mut FileBuilder, index: usize, rod: &RodDef) -> NrdfNode {
    let mut node = b.node(&index.to_string());
    b.attr_str(&mut node, "name", rod.name());
    b.attr_str(&mut node, "kind", rod.kind().as_str());
    if let Some(p) = rod.pressure() {
        b.attr(&mut node, "pressure", AttrValue::F64(p));
    }
    let mut blocks = b.node("blocks");
    for (j, block) in rod.blocks().iter().enumerate() {
        let mut bn = b.node(&j.to_string());
        b.attr(&mut bn, "z_start", AttrValue::F64(block.z_start()));
        b.attr(&mut bn, "z_end", AttrValue::F64(block.z_end()));
        let mut rings = b.node("rings");
        for (k, ring) in block.rings().iter().enumerate() {
            let mut rn = b.node(&k.to_string());
            b.attr_str(&mut rn, "material", ring.material().name());
            b.attr_str(&mut rn, "phase", ring.material().phase().as_str());
            b.attr(&mut rn, "inner_radius", AttrValue::F64(ring.inner_radius()));
            b.attr(&mut rn, "outer_radius", AttrValue::F64(ring.outer_radius()));
            b.attr(&mut rn, "height", AttrValue::F64(ring.height()));
            push_features(b, &mut rn, ring.data());
            rings.children.push(rn);
        }
        bn.children.push(rings);
        push_features(b, &mut bn, block.data());
        blocks.children.push(bn);
    }
    node.children.push(blocks);
    push_features(b, &mut node, rod.data());
    node
}

fn encode_assembly(b: &mut FileBuilder, index: usize, def: &AssemblyDef) -> NrdfNode {
    let mut node = b.node(&index.to_string());
    b.attr_str(&mut node, "name", def.name());
    b.attr_str(&mut node, "assembly_type", def.assembly_type().as_str());
    b.attr(&mut node, "size", AttrValue::U32(def.size() as u32));
    b.attr(&mut node, "rod_pitch", AttrValue::F64(def.rod_pitch()));
    if let Some(t) = def.duct_thickness() {
        b.attr(&mut node, "duct_thickness", AttrValue::F64(t));
    }
    let n = def.size() as u64;
    let cells = def.rod_grid().cells().iter().map(|c| c.map_or(-1, i64::from)).collect();
    b.array(&mut node, "rod_grid", vec![n, n], ArrayData::I64(cells));
    node.children.push(encode_labels(b, def.labels()));

    let pins: Vec<(Option<[u32; 2]>, &DataProvider)> = def
        .provider_grid()
        .occupied()
        .map(|(r, c, p)| (Some([r as u32, c as u32]), p))
        .collect();
    if let Some(f) = encode_features(b, "features", &pins) {
        node.children.push(f);
    }
    if let Some(f) = encode_features(b, "own_features", &[(None, def.data())]) {
        node.children.push(f);
    }
    node
}

/// Merges `sources` feature by feature and time by time. Entries keep the
/// order of `sources`, then insertion order within each source. A `pin`
/// array is written when the sources carry pin coordinates.
fn encode_features(
    b: &mut FileBuilder,
    name: &str,
    sources: &[(Option<[u32; 2]>, &DataProvider)],
) -> Option<NrdfNode> {
    let features: BTreeSet<&str> = sources.iter().flat_map(|(_, p)| p.features()).collect();
    if features.is_empty() {
        return None;
    }
    let with_pins = sources.iter().any(|(pin, _)| pin.is_some());
    let mut node = b.node(name);
    for feature in features {
        let mut times: Vec<f64> = sources.iter().flat_map(|(_, p)| p.times(feature)).collect();
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| a.to_bits() == b.to_bits());

        let mut fnode = b.node(feature);
        b.array(&mut fnode, "times", vec![times.len() as u64], ArrayData::F64(times.clone()));
        for (i, &t) in times.iter().enumerate() {
            let mut value = Vec::new();
            let mut unc = Vec::new();
            let mut units = Vec::new();
            let mut pos = Vec::new();
            let mut pins = Vec::new();
            for (pin, p) in sources {
                for e in p.entries(feature, t).unwrap_or(&[]) {
                    value.push(e.value);
                    unc.push(e.uncertainty);
                    units.push(e.units_id);
                    pos.extend_from_slice(&e.position);
                    if let Some(rc) = pin {
                        pins.extend_from_slice(rc);
                    }
                }
            }
            let n = value.len() as u64;
            let mut tn = b.node(&format!("t{i}"));
            b.array(&mut tn, "value", vec![n], ArrayData::F64(value));
            b.array(&mut tn, "uncertainty", vec![n], ArrayData::F64(unc));
            b.array(&mut tn, "units_id", vec![n], ArrayData::U32(units));
            b.array(&mut tn, "position", vec![n, 3], ArrayData::F64(pos));
            if with_pins {
                b.array(&mut tn, "pin", vec![n, 2], ArrayData::U32(pins));
            }
            fnode.children.push(tn);
        }
        node.children.push(fnode);
    }
    Some(node)
}

/// Decodes every reactor under `/reactors`, in file order.
pub fn load_reactors(file: &NrdfFile) -> Result<Vec<Reactor>> {
    let cx = Ctx::new(file);
    let list = cx.child(&file.root, "reactors", "/")?;
    let mut seen = HashSet::new();
    list.children
        .iter()
        .map(|node| {
            let name = cx.name(node);
            if !seen.insert(name) {
                return Err(layout(format!("duplicate reactor name {name:?}")));
            }
            cx.reactor(node)
        })
        .collect()
}

/// Decodes the file's only reactor.
pub fn load_reactor(file: &NrdfFile) -> Result<Reactor> {
    let mut all = load_reactors(file)?;
    match all.len() {
        1 => Ok(all.pop().expect("one reactor")),
        n => Err(layout(format!("expected exactly one reactor, found {n}"))),
    }
}

fn layout(msg: impl Into<String>) -> NrdfError {
    NrdfError::Layout(msg.into())
}

fn model_err(path: &str) -> impl Fn(ModelError) -> NrdfError + '_ {
    move |e| layout(format!("{path}: {e}"))
}

struct Ctx<'a> {
    file: &'a NrdfFile,
    index: HashMap<&'a str, u32>,
}

impl<'a> Ctx<'a> {
    fn new(file: &'a NrdfFile) -> Self {
        let index = file
            .strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u32))
            .collect();
        Self { file, index }
    }

    fn name(&self, node: &NrdfNode) -> &'a str {
        self.file.node_name(node)
    }

    fn string(&self, idx: u32, path: &str) -> Result<&'a str> {
        self.file
            .string(idx)
            .ok_or_else(|| layout(format!("{path}: string index {idx} outside heap")))
    }

    fn attr(&self, node: &NrdfNode, name: &str) -> Option<AttrValue> {
        let id = *self.index.get(name)?;
        node.attr(id).copied()
    }

    fn req(&self, node: &NrdfNode, name: &str, path: &str) -> Result<AttrValue> {
        self.attr(node, name)
            .ok_or_else(|| layout(format!("{path}: missing attribute {name:?}")))
    }

    fn wrong_type(&self, name: &str, path: &str, want: &str, got: AttrValue) -> NrdfError {
        layout(format!("{path}: attribute {name:?} is {}, expected {want}", got.type_name()))
    }

    fn f64(&self, node: &NrdfNode, name: &str, path: &str) -> Result<f64> {
        match self.req(node, name, path)? {
            AttrValue::F64(v) => Ok(v),
            other => Err(self.wrong_type(name, path, "f64", other)),
        }
    }

    fn opt_f64(&self, node: &NrdfNode, name: &str, path: &str) -> Result<Option<f64>> {
        match self.attr(node, name) {
            None => Ok(None),
            Some(AttrValue::F64(v)) => Ok(Some(v)),
            Some(other) => Err(self.wrong_type(name, path, "f64", other)),
        }
    }

    fn u32(&self, node: &NrdfNode, name: &str, path: &str) -> Result<u32> {
        match self.req(node, name, path)? {
            AttrValue::U32(v) => Ok(v),
            other => Err(self.wrong_type(name, path, "u32", other)),
        }
    }

    fn str(&self, node: &NrdfNode, name: &str, path: &str) -> Result<&'a str> {
        match self.req(node, name, path)? {
            AttrValue::Str(i) => self.string(i, path),
            other => Err(self.wrong_type(name, path, "str", other)),
        }
    }

    fn opt_child<'n>(&self, node: &'n NrdfNode, name: &str) -> Option<&'n NrdfNode> {
        let id = *self.index.get(name)?;
        node.child(id)
    }

    fn child<'n>(&self, node: &'n NrdfNode, name: &str, path: &str) -> Result<&'n NrdfNode> {
        self.opt_child(node, name)
            .ok_or_else(|| layout(format!("{path}: missing child {name:?}")))
    }

    fn array<'n>(&self, node: &'n NrdfNode, name: &str, dims: &[u64], path: &str) -> Result<&'n Array> {
        let arr = self
            .index
            .get(name)
            .and_then(|&id| node.array(id))
            .ok_or_else(|| layout(format!("{path}: missing array {name:?}")))?;
        if arr.dims != dims {
            return Err(layout(format!(
                "{path}: array {name:?} has dims {:?}, expected {dims:?}",
                arr.dims
            )));
        }
        Ok(arr)
    }

    fn f64s<'n>(&self, node: &'n NrdfNode, name: &str, dims: &[u64], path: &str) -> Result<&'n [f64]> {
        match &self.array(node, name, dims, path)?.data {
            ArrayData::F64(v) => Ok(v),
            other => Err(layout(format!(
                "{path}: array {name:?} is {}, expected f64",
                other.element_type().name()
            ))),
        }
    }

    fn u32s<'n>(&self, node: &'n NrdfNode, name: &str, dims: &[u64], path: &str) -> Result<&'n [u32]> {
        match &self.array(node, name, dims, path)?.data {
            ArrayData::U32(v) => Ok(v),
            other => Err(layout(format!(
                "{path}: array {name:?} is {}, expected u32",
                other.element_type().name()
            ))),
        }
    }

    fn i64s<'n>(&self, node: &'n NrdfNode, name: &str, dims: &[u64], path: &str) -> Result<&'n [i64]> {
        match &self.array(node, name, dims, path)?.data {
            ArrayData::I64(v) => Ok(v),
            other => Err(layout(format!(
                "{path}: array {name:?} is {}, expected i64",
                other.element_type().name()
            ))),
        }
    }

    fn strings(&self, ids: &[u32], path: &str) -> Result<Vec<String>> {
        ids.iter().map(|&i| self.string(i, path).map(str::to_owned)).collect()
    }

    /// Children named `0, 1, 2, ...` in order.
    fn indexed<'n>(&self, node: &'n NrdfNode, path: &str) -> Result<&'n [NrdfNode]> {
        for (i, c) in node.children.iter().enumerate() {
            if self.name(c) != i.to_string() {
                return Err(layout(format!(
                    "{path}: child {i} is named {:?}, expected \"{i}\"",
                    self.name(c)
                )));
            }
        }
        Ok(&node.children)
    }

    fn labels(&self, node: &NrdfNode, size: usize, path: &str) -> Result<GridLabels> {
        let path = format!("{path}/labels");
        let n = self.child(node, "labels", &path)?;
        let rows = self.strings(self.u32s(n, "rows", &[size as u64], &path)?, &path)?;
        let cols = self.strings(self.u32s(n, "cols", &[size as u64], &path)?, &path)?;
        GridLabels::new(rows, cols).map_err(model_err(&path))
    }

    fn size(&self, node: &NrdfNode, path: &str) -> Result<usize> {
        Ok(self.u32(node, "size", path)? as usize)
    }

    fn reactor(&self, node: &NrdfNode) -> Result<Reactor> {
        let name = self.name(node);
        let path = format!("/reactors/{name}");
        let path = path.as_str();
        let ty = self.str(node, "reactor_type", path)?;
        let size = self.size(node, path)?;
        let lattice = match ty {
            "PWR" => Lattice::Square {
                assembly_pitch: self.f64(node, "assembly_pitch", path)?,
            },
            "SFR" => Lattice::Hex {
                lattice_pitch: self.f64(node, "lattice_pitch", path)?,
                flat_to_flat: self.f64(node, "flat_to_flat", path)?,
            },
            other => return Err(layout(format!("{path}: unknown reactor type {other:?}"))),
        };
        let err = model_err(path);
        let mut b = ReactorBuilder::new(name, lattice, size).map_err(&err)?;
        b.set_labels(self.labels(node, size, path)?).map_err(&err)?;

        let units_path = format!("{path}/units");
        let units_node = self.child(node, "units", path)?;
        let ids = match self.attr_free_array(units_node, "names", &units_path)? {
            ArrayData::U32(v) => v,
            _ => return Err(layout(format!("{units_path}: names must be u32"))),
        };
        for (k, unit) in self.strings(ids, &units_path)?.into_iter().enumerate() {
            if b.add_unit(&unit).map_err(&err)? as usize != k {
                return Err(layout(format!("{units_path}: duplicate unit {unit:?}")));
            }
        }

        let rods_path = format!("{path}/rod_defs");
        for (i, rn) in self.indexed(self.child(node, "rod_defs", path)?, &rods_path)?.iter().enumerate() {
            let rod = self.rod(rn, &format!("{rods_path}/{i}"))?;
            b.add_rod_def(rod).map_err(&err)?;
        }

        let defs_path = format!("{path}/assembly_defs");
        for (i, an) in self.indexed(self.child(node, "assembly_defs", path)?, &defs_path)?.iter().enumerate() {
            let def = self.assembly(an, &format!("{defs_path}/{i}"))?;
            b.add_assembly_def(def).map_err(&err)?;
        }

        let grids_path = format!("{path}/grids");
        let grids = self.child(node, "grids", path)?;
        let allowed = AssemblyType::allowed(lattice.reactor_type());
        if grids.arrays.len() != allowed.len() {
            return Err(layout(format!(
                "{grids_path}: expected {} grids, found {}",
                allowed.len(),
                grids.arrays.len()
            )));
        }
        for &ty in allowed {
            let cells = self.i64s(grids, ty.as_str(), &[size as u64, size as u64], &grids_path)?;
            for (i, &v) in cells.iter().enumerate() {
                if let Some(def) = cell_index(v, &grids_path)? {
                    b.set_assembly(ty, i / size, i % size, def)
                        .map_err(model_err(&grids_path))?;
                }
            }
        }

        if let Some(f) = self.opt_child(node, "features") {
            self.features_into(f, &format!("{path}/features"), false, |_, feature, e| {
                b.data_mut().add_data(feature, e)
            })?;
        }
        b.freeze().map_err(&err)
    }

    fn attr_free_array<'n>(&self, node: &'n NrdfNode, name: &str, path: &str) -> Result<&'n ArrayData> {
        let arr = self
            .index
            .get(name)
            .and_then(|&id| node.array(id))
            .ok_or_else(|| layout(format!("{path}: missing array {name:?}")))?;
        if arr.dims.len() != 1 {
            return Err(layout(format!("{path}: array {name:?} must be one-dimensional")));
        }
        Ok(&arr.data)
    }

    fn optional_features(
        &self,
        node: &NrdfNode,
        path: &str,
        target: &mut DataProvider,
    ) -> Result<()> {
        if let Some(f) = self.opt_child(node, "features") {
            self.features_into(f, &format!("{path}/features"), false, |_, feature, e| {
                target.add_data(feature, e)
            })?;
        }
        Ok(())
    }

    fn rod(&self, node: &NrdfNode, path: &str) -> Result<RodDef> {
        let name = self.str(node, "name", path)?;
        let kind: RodKind = self.str(node, "kind", path)?.parse().map_err(model_err(path))?;
        let blocks_path = format!("{path}/blocks");
        let mut blocks = Vec::new();
        for (j, bn) in self.indexed(self.child(node, "blocks", path)?, &blocks_path)?.iter().enumerate() {
            let bpath = format!("{blocks_path}/{j}");
            let rings_path = format!("{bpath}/rings");
            let mut rings = Vec::new();
            for (k, rn) in self.indexed(self.child(bn, "rings", &bpath)?, &rings_path)?.iter().enumerate() {
                let rpath = format!("{rings_path}/{k}");
                let phase: Phase = self.str(rn, "phase", &rpath)?.parse().map_err(model_err(&rpath))?;
                let material = Material::new(self.str(rn, "material", &rpath)?, phase).map_err(model_err(&rpath))?;
                let mut ring = Ring::new(
                    material,
                    self.f64(rn, "inner_radius", &rpath)?,
                    self.f64(rn, "outer_radius", &rpath)?,
                    self.f64(rn, "height", &rpath)?,
                )
                .map_err(model_err(&rpath))?;
                self.optional_features(rn, &rpath, ring.data_mut())?;
                rings.push(ring);
            }
            let mut block = MaterialBlock::new(self.f64(bn, "z_start", &bpath)?, self.f64(bn, "z_end", &bpath)?, rings)
                .map_err(model_err(&bpath))?;
            self.optional_features(bn, &bpath, block.data_mut())?;
            blocks.push(block);
        }
        let mut rod = RodDef::new(name, kind, blocks).map_err(model_err(path))?;
        if let Some(p) = self.opt_f64(node, "pressure", path)? {
            rod = rod.with_pressure(p).map_err(model_err(path))?;
        }
        self.optional_features(node, path, rod.data_mut())?;
        Ok(rod)
    }

    fn assembly(&self, node: &NrdfNode, path: &str) -> Result<AssemblyDef> {
        let err = model_err(path);
        let ty: AssemblyType = self.str(node, "assembly_type", path)?.parse().map_err(&err)?;
        let size = self.size(node, path)?;
        let mut def = AssemblyDef::new(self.str(node, "name", path)?, ty, size, self.f64(node, "rod_pitch", path)?)
            .map_err(&err)?
            .with_labels(self.labels(node, size, path)?)
            .map_err(&err)?;
        if let Some(t) = self.opt_f64(node, "duct_thickness", path)? {
            def = def.with_duct_thickness(t).map_err(&err)?;
        }
        let cells = self.i64s(node, "rod_grid", &[size as u64, size as u64], path)?;
        for (i, &v) in cells.iter().enumerate() {
            if let Some(rod) = cell_index(v, path)? {
                def.set_rod(i / size, i % size, Some(rod)).map_err(&err)?;
            }
        }
        if let Some(f) = self.opt_child(node, "features") {
            self.features_into(f, &format!("{path}/features"), true, |pin, feature, e| {
                let (r, c) = pin.expect("pin arrays requested");
                def.add_pin_data(r, c, feature, e)
            })?;
        }
        if let Some(f) = self.opt_child(node, "own_features") {
            self.features_into(f, &format!("{path}/own_features"), false, |_, feature, e| {
                def.data_mut().add_data(feature, e)
            })?;
        }
        Ok(def)
    }

    /// Decodes a `features` node, handing every entry to `sink` in file order.
    fn features_into(
        &self,
        node: &NrdfNode,
        path: &str,
        with_pins: bool,
        mut sink: impl FnMut(Option<(usize, usize)>, &'a str, DataEntry) -> Result<(), ModelError>,
    ) -> Result<()> {
        let mut seen = HashSet::new();
        for fnode in &node.children {
            let feature = self.name(fnode);
            let fpath = format!("{path}/{feature}");
            if !seen.insert(feature) {
                return Err(layout(format!("{path}: feature {feature:?} appears twice")));
            }
            let times = match self.attr_free_array(fnode, "times", &fpath)? {
                ArrayData::F64(v) => v,
                _ => return Err(layout(format!("{fpath}: times must be f64"))),
            };
            if !times.windows(2).all(|w| w[0] < w[1]) {
                return Err(layout(format!("{fpath}: times must be strictly increasing")));
            }
            if fnode.children.len() != times.len() {
                return Err(layout(format!(
                    "{fpath}: {} time nodes for {} times",
                    fnode.children.len(),
                    times.len()
                )));
            }
            for (i, (tnode, &time)) in fnode.children.iter().zip(times).enumerate() {
                let tpath = format!("{fpath}/t{i}");
                if self.name(tnode) != format!("t{i}") {
                    return Err(layout(format!("{fpath}: child {i} is named {:?}", self.name(tnode))));
                }
                let n = match self.attr_free_array(tnode, "value", &tpath)? {
                    ArrayData::F64(v) => v.len() as u64,
                    _ => return Err(layout(format!("{tpath}: value must be f64"))),
                };
                if n == 0 {
                    return Err(layout(format!("{tpath}: empty time bucket")));
                }
                let value = self.f64s(tnode, "value", &[n], &tpath)?;
                let unc = self.f64s(tnode, "uncertainty", &[n], &tpath)?;
                let units = self.u32s(tnode, "units_id", &[n], &tpath)?;
                let pos = self.f64s(tnode, "position", &[n, 3], &tpath)?;
                let pins = if with_pins {
                    Some(self.u32s(tnode, "pin", &[n, 2], &tpath)?)
                } else {
                    None
                };
                for j in 0..n as usize {
                    let entry = DataEntry::new(
                        value[j],
                        unc[j],
                        units[j],
                        [pos[3 * j], pos[3 * j + 1], pos[3 * j + 2]],
                        time,
                    );
                    let pin = pins.map(|p| (p[2 * j] as usize, p[2 * j + 1] as usize));
                    sink(pin, feature, entry).map_err(model_err(&tpath))?;
                }
            }
        }
        Ok(())
    }
}

fn cell_index(v: i64, path: &str) -> Result<Option<u32>> {
    match v {
        -1 => Ok(None),
        0..=0xFFFF_FFFE => Ok(Some(v as u32)),
        _ => Err(layout(format!("{path}: invalid grid cell value {v}"))),
    }
}
