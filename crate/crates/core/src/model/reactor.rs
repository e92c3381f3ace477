use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use super::{
    make_default_labels, AssemblyDef, AssemblyType, AssemblyView, DataProvider, Grid, GridLabels, ModelError, Result,
    RodDef,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReactorType {
    Pwr,
    Sfr,
}

impl ReactorType {
    pub fn as_str(self) -> &'static str {
        match self {
            ReactorType::Pwr => "PWR",
            ReactorType::Sfr => "SFR",
        }
    }
}

impl fmt::Display for ReactorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReactorType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PWR" => Ok(ReactorType::Pwr),
            "SFR" => Ok(ReactorType::Sfr),
            other => Err(ModelError::InvalidArgument(format!("unknown reactor type {other:?}"))),
        }
    }
}

/// Core lattice geometry, lengths in cm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lattice {
    /// PWR: square assemblies on a square grid.
    Square { assembly_pitch: f64 },
    /// SFR: hexagonal assemblies on an axial-coordinate (rhombic) grid. Every
    /// assembly shares the core's flat-to-flat distance.
    Hex { lattice_pitch: f64, flat_to_flat: f64 },
}

impl Lattice {
    pub fn reactor_type(&self) -> ReactorType {
        match self {
            Lattice::Square { .. } => ReactorType::Pwr,
            Lattice::Hex { .. } => ReactorType::Sfr,
        }
    }

    /// Center-to-center distance between neighbouring assemblies.
    pub fn pitch(&self) -> f64 {
        match *self {
            Lattice::Square { assembly_pitch } => assembly_pitch,
            Lattice::Hex { lattice_pitch, .. } => lattice_pitch,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let valid = match *self {
            Lattice::Square { assembly_pitch } => ok(assembly_pitch),
            Lattice::Hex {
                lattice_pitch,
                flat_to_flat,
            } => ok(lattice_pitch) && ok(flat_to_flat),
        };
        if valid {
            Ok(())
        } else {
            Err(ModelError::InvalidArgument(format!("invalid lattice dimensions {self:?}")))
        }
    }
}

/// Shared construction-phase state of a reactor.
#[derive(Debug, Clone, PartialEq)]
struct Parts {
    name: String,
    lattice: Lattice,
    size: usize,
    labels: GridLabels,
    units: Vec<String>,
    rod_defs: Vec<RodDef>,
    assembly_defs: Vec<AssemblyDef>,
    grids: BTreeMap<AssemblyType, Grid<u32>>,
    data: DataProvider,
}

/// Mutable construction phase of a [`Reactor`]. Call [`freeze`](Self::freeze)
/// to validate and obtain the immutable reactor.
#[derive(Debug, Clone)]
pub struct ReactorBuilder {
    parts: Parts,
}

impl ReactorBuilder {
    pub fn new(name: impl Into<String>, lattice: Lattice, size: usize) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::InvalidArgument("reactor name is empty".into()));
        }
        lattice.validate()?;
        let labels = make_default_labels(size)?;
        let grids = AssemblyType::allowed(lattice.reactor_type())
            .iter()
            .map(|&t| (t, Grid::new(size)))
            .collect();
        Ok(Self {
            parts: Parts {
                name,
                lattice,
                size,
                labels,
                units: Vec::new(),
                rod_defs: Vec::new(),
                assembly_defs: Vec::new(),
                grids,
                data: DataProvider::new(),
            },
        })
    }

    pub fn pwr(name: impl Into<String>, size: usize, assembly_pitch: f64) -> Result<Self> {
        Self::new(name, Lattice::Square { assembly_pitch }, size)
    }

    pub fn sfr(name: impl Into<String>, size: usize, lattice_pitch: f64, flat_to_flat: f64) -> Result<Self> {
        Self::new(
            name,
            Lattice::Hex {
                lattice_pitch,
                flat_to_flat,
            },
            size,
        )
    }

    pub fn set_labels(&mut self, labels: GridLabels) -> Result<()> {
        if labels.len() != self.parts.size {
            return Err(ModelError::InvalidArgument(format!(
                "{} labels for a core of size {}",
                labels.len(),
                self.parts.size
            )));
        }
        self.parts.labels = labels;
        Ok(())
    }

    /// Returns the index of `name` in the units table, adding it if new.
    pub fn add_unit(&mut self, name: &str) -> Result<u32> {
        if name.is_empty() {
            return Err(ModelError::InvalidArgument("unit name is empty".into()));
        }
        if let Some(i) = self.parts.units.iter().position(|u| u == name) {
            return Ok(i as u32);
        }
        self.parts.units.push(name.to_owned());
        Ok((self.parts.units.len() - 1) as u32)
    }

    pub fn add_rod_def(&mut self, rod: RodDef) -> Result<u32> {
        if self.parts.rod_defs.iter().any(|r| r.name() == rod.name()) {
            return Err(ModelError::InvalidArgument(format!("duplicate rod name {:?}", rod.name())));
        }
        self.parts.rod_defs.push(rod);
        Ok((self.parts.rod_defs.len() - 1) as u32)
    }

    pub fn rod_def_mut(&mut self, index: u32) -> Option<&mut RodDef> {
        self.parts.rod_defs.get_mut(index as usize)
    }

    pub fn add_assembly_def(&mut self, def: AssemblyDef) -> Result<u32> {
        check_assembly_def(&self.parts, &def)?;
        self.parts.assembly_defs.push(def);
        Ok((self.parts.assembly_defs.len() - 1) as u32)
    }

    /// Mutable access to a definition already added. Rod indices are
    /// re-checked at [`freeze`](Self::freeze).
    pub fn assembly_def_mut(&mut self, index: u32) -> Option<&mut AssemblyDef> {
        self.parts.assembly_defs.get_mut(index as usize)
    }

    /// Places assembly definition `def_index` in the grid for `assembly_type`.
    /// Other types' grids are untouched.
    pub fn set_assembly(&mut self, assembly_type: AssemblyType, row: usize, col: usize, def_index: u32) -> Result<()> {
        let reactor_type = self.parts.lattice.reactor_type();
        let def = self.parts.assembly_defs.get(def_index as usize).ok_or_else(|| {
            ModelError::InvalidArgument(format!("assembly definition {def_index} does not exist"))
        })?;
        if def.assembly_type() != assembly_type {
            return Err(ModelError::TypeError(format!(
                "assembly {:?} is {}, not {}",
                def.name(),
                def.assembly_type(),
                assembly_type
            )));
        }
        let grid = self.parts.grids.get_mut(&assembly_type).ok_or_else(|| {
            ModelError::TypeError(format!("{reactor_type} reactors have no {assembly_type} assemblies"))
        })?;
        grid.set(row, col, Some(def_index))?;
        Ok(())
    }

    pub fn clear_assembly(&mut self, assembly_type: AssemblyType, row: usize, col: usize) -> Result<()> {
        let grid = self
            .parts
            .grids
            .get_mut(&assembly_type)
            .ok_or_else(|| ModelError::TypeError(format!("no {assembly_type} grid")))?;
        grid.set(row, col, None)?;
        Ok(())
    }

    pub fn data_mut(&mut self) -> &mut DataProvider {
        &mut self.parts.data
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn size(&self) -> usize {
        self.parts.size
    }

    pub fn reactor_type(&self) -> ReactorType {
        self.parts.lattice.reactor_type()
    }

    /// Validates every invariant and ends the construction phase.
    pub fn freeze(self) -> Result<Reactor> {
        validate(&self.parts)?;
        Ok(Reactor { parts: self.parts })
    }
}

fn check_assembly_def(parts: &Parts, def: &AssemblyDef) -> Result<()> {
    let reactor_type = parts.lattice.reactor_type();
    if !def.assembly_type().is_allowed_in(reactor_type) {
        return Err(ModelError::TypeError(format!(
            "{reactor_type} reactors cannot hold {} assemblies",
            def.assembly_type()
        )));
    }
    if def.duct_thickness().is_some() && reactor_type != ReactorType::Sfr {
        return Err(ModelError::InvalidArgument(format!(
            "assembly {:?}: duct thickness applies to SFR assemblies only",
            def.name()
        )));
    }
    for (row, col, &rod) in def.rod_grid().occupied() {
        if rod as usize >= parts.rod_defs.len() {
            return Err(ModelError::InvalidArgument(format!(
                "assembly {:?}: rod index {rod} at ({row}, {col}) does not resolve",
                def.name()
            )));
        }
    }
    for (row, col, _) in def.provider_grid().occupied() {
        if !def.rod_grid().is_occupied(row, col) {
            return Err(ModelError::InvalidArgument(format!(
                "assembly {:?}: data at empty position ({row}, {col})",
                def.name()
            )));
        }
    }
    Ok(())
}

fn validate(parts: &Parts) -> Result<()> {
    parts.lattice.validate()?;
    if parts.labels.len() != parts.size {
        return Err(ModelError::InvalidArgument("core labels do not match core size".into()));
    }
    let mut seen = HashSet::new();
    for u in &parts.units {
        if !seen.insert(u.as_str()) {
            return Err(ModelError::InvalidArgument(format!("duplicate unit {u:?}")));
        }
    }
    let mut seen = HashSet::new();
    for r in &parts.rod_defs {
        if !seen.insert(r.name()) {
            return Err(ModelError::InvalidArgument(format!("duplicate rod name {:?}", r.name())));
        }
    }
    for def in &parts.assembly_defs {
        check_assembly_def(parts, def)?;
    }
    let expected: Vec<_> = AssemblyType::allowed(parts.lattice.reactor_type()).to_vec();
    let present: Vec<_> = parts.grids.keys().copied().collect();
    if present.len() != expected.len() || !expected.iter().all(|t| parts.grids.contains_key(t)) {
        return Err(ModelError::InvalidArgument(format!(
            "grid types {present:?} do not match {expected:?}"
        )));
    }
    for (ty, grid) in &parts.grids {
        if grid.size() != parts.size {
            return Err(ModelError::InvalidArgument(format!("{ty} grid has the wrong size")));
        }
        for (row, col, &idx) in grid.occupied() {
            let def = parts.assembly_defs.get(idx as usize).ok_or_else(|| {
                ModelError::InvalidArgument(format!("{ty} grid ({row}, {col}) references missing definition {idx}"))
            })?;
            if def.assembly_type() != *ty {
                return Err(ModelError::TypeError(format!(
                    "{ty} grid ({row}, {col}) holds a {} assembly",
                    def.assembly_type()
                )));
            }
        }
    }
    let units = parts.units.len();
    let check_units = |p: &DataProvider, owner: &str| -> Result<()> {
        match p.max_units_id() {
            Some(id) if id as usize >= units => Err(ModelError::InvalidArgument(format!(
                "{owner}: units id {id} outside units table of length {units}"
            ))),
            _ => Ok(()),
        }
    };
    check_units(&parts.data, "reactor")?;
    for rod in &parts.rod_defs {
        for p in rod.providers() {
            check_units(p, rod.name())?;
        }
    }
    for def in &parts.assembly_defs {
        check_units(def.data(), def.name())?;
        for (_, _, p) in def.provider_grid().occupied() {
            check_units(p, def.name())?;
        }
    }
    Ok(())
}

/// A frozen reactor: the root of the part hierarchy.
///
/// Immutable once built, so it can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Reactor {
    parts: Parts,
}

impl Reactor {
    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn reactor_type(&self) -> ReactorType {
        self.parts.lattice.reactor_type()
    }

    pub fn lattice(&self) -> Lattice {
        self.parts.lattice
    }

    pub fn size(&self) -> usize {
        self.parts.size
    }

    pub fn labels(&self) -> &GridLabels {
        &self.parts.labels
    }

    pub fn units(&self) -> &[String] {
        &self.parts.units
    }

    pub fn rod_defs(&self) -> &[RodDef] {
        &self.parts.rod_defs
    }

    pub fn assembly_defs(&self) -> &[AssemblyDef] {
        &self.parts.assembly_defs
    }

    pub fn grids(&self) -> &BTreeMap<AssemblyType, Grid<u32>> {
        &self.parts.grids
    }

    pub fn grid(&self, assembly_type: AssemblyType) -> Option<&Grid<u32>> {
        self.parts.grids.get(&assembly_type)
    }

    pub fn data(&self) -> &DataProvider {
        &self.parts.data
    }

    pub fn assembly_at(&self, assembly_type: AssemblyType, row: usize, col: usize) -> Option<&AssemblyDef> {
        let idx = *self.grid(assembly_type)?.get(row, col)?;
        self.parts.assembly_defs.get(idx as usize)
    }

    /// Type and def index shown at a core cell: those of `only`, or with
    /// `None` the first type in grid order that occupies the cell.
    pub fn cell_assembly(&self, only: Option<AssemblyType>, row: usize, col: usize) -> Option<(AssemblyType, u32)> {
        let types = match only {
            Some(ref t) => std::slice::from_ref(t),
            None => AssemblyType::allowed(self.reactor_type()),
        };
        types.iter().find_map(|&t| self.grid(t)?.get(row, col).map(|&d| (t, d)))
    }

    pub fn assembly_view_at(&self, assembly_type: AssemblyType, row: usize, col: usize) -> Option<AssemblyView<'_>> {
        let idx = *self.grid(assembly_type)?.get(row, col)?;
        self.assembly_view(idx as usize)
    }

    pub fn assembly_view(&self, def_index: usize) -> Option<AssemblyView<'_>> {
        (def_index < self.parts.assembly_defs.len()).then(|| AssemblyView::new(self, def_index))
    }

    /// Number of placed assemblies over all type grids.
    pub fn placed_count(&self) -> usize {
        self.parts.grids.values().map(Grid::occupied_count).sum()
    }

    /// Returns to the construction phase with a copy of this reactor.
    pub fn to_builder(&self) -> ReactorBuilder {
        ReactorBuilder {
            parts: self.parts.clone(),
        }
    }
}
