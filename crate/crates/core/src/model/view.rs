use std::collections::BTreeSet;

use super::{AssemblyDef, DataEntry, DataProvider, ModelError, Reactor, ReactorType, Result, RodDef};

/// One point of an axial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialPoint {
    pub z: f64,
    pub value: f64,
    pub uncertainty: f64,
}

/// An assembly definition seen through its owning reactor, so rod indices
/// and rod-attached data can be resolved.
#[derive(Debug, Clone, Copy)]
pub struct AssemblyView<'a> {
    reactor: &'a Reactor,
    def_index: usize,
}

impl<'a> AssemblyView<'a> {
    pub(crate) fn new(reactor: &'a Reactor, def_index: usize) -> Self {
        Self { reactor, def_index }
    }

    pub fn reactor(&self) -> &'a Reactor {
        self.reactor
    }

    pub fn def(&self) -> &'a AssemblyDef {
        &self.reactor.assembly_defs()[self.def_index]
    }

    pub fn def_index(&self) -> usize {
        self.def_index
    }

    pub fn size(&self) -> usize {
        self.def().size()
    }

    pub fn rod_at(&self, row: usize, col: usize) -> Option<&'a RodDef> {
        let idx = self.def().rod_at(row, col)?;
        self.reactor.rod_defs().get(idx as usize)
    }

    pub fn label(&self, row: usize, col: usize) -> String {
        self.def().labels().cell_label(row, col)
    }

    pub fn find_pin(&self, label: &str) -> Result<(usize, usize)> {
        self.def()
            .labels()
            .find_cell(label)
            .ok_or_else(|| ModelError::NotFound(format!("no pin labelled {label:?} in {:?}", self.def().name())))
    }

    /// Providers that answer queries for a pin: the assembly-held one first,
    /// then the rod's own.
    fn pin_providers(&self, row: usize, col: usize) -> (Option<&'a DataProvider>, Option<&'a DataProvider>) {
        let grid = self.def().provider_at(row, col);
        let rod = self.rod_at(row, col).map(RodDef::data).filter(|p| !p.is_empty());
        (grid, rod)
    }

    /// The provider that owns `feature` at a pin. Assembly-held data wins
    /// when both carry the same feature.
    fn provider_for(&self, row: usize, col: usize, feature: &str) -> Option<&'a DataProvider> {
        let (grid, rod) = self.pin_providers(row, col);
        grid.filter(|p| p.has_feature(feature))
            .or_else(|| rod.filter(|p| p.has_feature(feature)))
    }

    pub fn pin_has_feature(&self, row: usize, col: usize, feature: &str) -> bool {
        self.provider_for(row, col, feature).is_some()
    }

    pub fn pin_entries(&self, row: usize, col: usize, feature: &str, time: f64) -> Result<&'a [DataEntry]> {
        if self.def().rod_at(row, col).is_none() {
            return Err(ModelError::NotFound(format!(
                "no rod at ({row}, {col}) in {:?}",
                self.def().name()
            )));
        }
        self.provider_for(row, col, feature)
            .and_then(|p| p.entries(feature, time))
            .ok_or_else(|| {
                ModelError::NotFound(format!(
                    "pin {} has no {feature:?} data at t={time}",
                    self.label(row, col)
                ))
            })
    }

    /// Axial profile of a pin, sorted by ascending z.
    pub fn axial_series(&self, row: usize, col: usize, feature: &str, time: f64) -> Result<Vec<AxialPoint>> {
        let mut series: Vec<AxialPoint> = self
            .pin_entries(row, col, feature, time)?
            .iter()
            .map(|e| AxialPoint {
                z: e.z(),
                value: e.value,
                uncertainty: e.uncertainty,
            })
            .collect();
        series.sort_by(|a, b| a.z.total_cmp(&b.z));
        Ok(series)
    }

    /// Occupied positions carrying any data, row-major.
    pub fn data_pins(&self) -> Vec<(usize, usize)> {
        self.def()
            .rod_grid()
            .occupied()
            .filter(|&(r, c, _)| {
                let (grid, rod) = self.pin_providers(r, c);
                grid.is_some() || rod.is_some()
            })
            .map(|(r, c, _)| (r, c))
            .collect()
    }

    /// Every feature available on any pin.
    pub fn features(&self) -> BTreeSet<&'a str> {
        let mut out = BTreeSet::new();
        for (r, c, _) in self.def().rod_grid().occupied() {
            let (grid, rod) = self.pin_providers(r, c);
            out.extend(grid.into_iter().chain(rod).flat_map(|p| p.features()));
        }
        out
    }

    /// Times at which any pin has `feature`, ascending.
    pub fn times(&self, feature: &str) -> Vec<f64> {
        let mut times: Vec<f64> = Vec::new();
        for (r, c, _) in self.def().rod_grid().occupied() {
            if let Some(p) = self.provider_for(r, c, feature) {
                times.extend(p.times(feature));
            }
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }

    /// Largest number of axial points any pin stores for `feature` at `time`.
    pub fn axial_levels(&self, feature: &str, time: f64) -> usize {
        self.def()
            .rod_grid()
            .occupied()
            .filter_map(|(r, c, _)| self.provider_for(r, c, feature)?.entries(feature, time))
            .map(<[DataEntry]>::len)
            .max()
            .unwrap_or(0)
    }

    /// Pin center `(x, y)` in cm relative to the assembly origin. Square
    /// lattices for PWRs; axial hex coordinates (column = q, row = r) for SFRs.
    pub fn pin_center(&self, row: usize, col: usize) -> (f64, f64) {
        pin_center(self.reactor.reactor_type(), self.def().rod_pitch(), row, col)
    }
}

pub(crate) fn pin_center(reactor_type: ReactorType, pitch: f64, row: usize, col: usize) -> (f64, f64) {
    lattice_point(reactor_type, pitch, row as f64, col as f64)
}

/// [`pin_center`] extended to fractional and negative grid coordinates.
pub(crate) fn lattice_point(reactor_type: ReactorType, pitch: f64, r: f64, c: f64) -> (f64, f64) {
    match reactor_type {
        ReactorType::Pwr => ((c + 0.5) * pitch, (r + 0.5) * pitch),
        ReactorType::Sfr => (pitch * (c * 3f64.sqrt() / 2.0), pitch * (r + c / 2.0)),
    }
}
