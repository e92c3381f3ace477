use std::fmt;
use std::str::FromStr;

use super::{make_default_labels, DataEntry, DataProvider, Grid, GridLabels, ModelError, ReactorType, Result};

/// Assembly types across both reactor families.
///
/// `Fuel` is shared; the others belong to exactly one family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssemblyType {
    Fuel,
    ControlBank,
    IncoreInstrument,
    RodCluster,
    Control,
    Reflector,
    Shield,
    Test,
}

const PWR_TYPES: [AssemblyType; 4] = [
    AssemblyType::Fuel,
    AssemblyType::ControlBank,
    AssemblyType::IncoreInstrument,
    AssemblyType::RodCluster,
];

const SFR_TYPES: [AssemblyType; 5] = [
    AssemblyType::Fuel,
    AssemblyType::Control,
    AssemblyType::Reflector,
    AssemblyType::Shield,
    AssemblyType::Test,
];

impl AssemblyType {
    pub const ALL: [AssemblyType; 8] = [
        AssemblyType::Fuel,
        AssemblyType::ControlBank,
        AssemblyType::IncoreInstrument,
        AssemblyType::RodCluster,
        AssemblyType::Control,
        AssemblyType::Reflector,
        AssemblyType::Shield,
        AssemblyType::Test,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AssemblyType::Fuel => "fuel",
            AssemblyType::ControlBank => "control_bank",
            AssemblyType::IncoreInstrument => "incore_instrument",
            AssemblyType::RodCluster => "rod_cluster",
            AssemblyType::Control => "control",
            AssemblyType::Reflector => "reflector",
            AssemblyType::Shield => "shield",
            AssemblyType::Test => "test",
        }
    }

    /// Types a reactor of the given family can hold, in grid order.
    pub fn allowed(reactor_type: ReactorType) -> &'static [AssemblyType] {
        match reactor_type {
            ReactorType::Pwr => &PWR_TYPES,
            ReactorType::Sfr => &SFR_TYPES,
        }
    }

    pub fn is_allowed_in(self, reactor_type: ReactorType) -> bool {
        Self::allowed(reactor_type).contains(&self)
    }
}

impl fmt::Display for AssemblyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssemblyType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        AssemblyType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ModelError::NotFound(format!("unknown assembly type {s:?}")))
    }
}

/// Geometry template of an assembly plus the per-pin data stored on it.
///
/// Rod positions hold indices into the owning reactor's rod definitions.
/// Pin data providers live here, keyed by grid location, and may only sit on
/// occupied positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyDef {
    name: String,
    assembly_type: AssemblyType,
    size: usize,
    rod_pitch: f64,
    duct_thickness: Option<f64>,
    rod_grid: Grid<u32>,
    provider_grid: Grid<DataProvider>,
    labels: GridLabels,
    data: DataProvider,
}

impl AssemblyDef {
    pub fn new(name: impl Into<String>, assembly_type: AssemblyType, size: usize, rod_pitch: f64) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::InvalidArgument("assembly name is empty".into()));
        }
        if !(rod_pitch.is_finite() && rod_pitch > 0.0) {
            return Err(ModelError::InvalidArgument(format!("rod pitch {rod_pitch} must be positive")));
        }
        let labels = make_default_labels(size)?;
        Ok(Self {
            name,
            assembly_type,
            size,
            rod_pitch,
            duct_thickness: None,
            rod_grid: Grid::new(size),
            provider_grid: Grid::new(size),
            labels,
            data: DataProvider::new(),
        })
    }

    pub fn with_labels(mut self, labels: GridLabels) -> Result<Self> {
        if labels.len() != self.size {
            return Err(ModelError::InvalidArgument(format!(
                "{} labels for a {}x{} assembly",
                labels.len(),
                self.size,
                self.size
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Duct wall thickness in cm (SFR assemblies only).
    pub fn with_duct_thickness(mut self, thickness: f64) -> Result<Self> {
        if !(thickness.is_finite() && thickness >= 0.0) {
            return Err(ModelError::InvalidArgument(format!("duct thickness {thickness} is invalid")));
        }
        self.duct_thickness = Some(thickness);
        Ok(self)
    }

    /// Places (or with `None`, removes) a rod; removing a rod drops its pin data.
    pub fn set_rod(&mut self, row: usize, col: usize, rod: Option<u32>) -> Result<()> {
        let cleared = rod.is_none();
        self.rod_grid.set(row, col, rod)?;
        if cleared {
            self.provider_grid.set(row, col, None)?;
        }
        Ok(())
    }

    /// Replaces the pin data at an occupied position. An empty provider clears it.
    pub fn set_provider(&mut self, row: usize, col: usize, provider: DataProvider) -> Result<()> {
        self.require_rod(row, col)?;
        let value = (!provider.is_empty()).then_some(provider);
        self.provider_grid.set(row, col, value)?;
        Ok(())
    }

    pub fn add_pin_data(&mut self, row: usize, col: usize, feature: &str, entry: DataEntry) -> Result<()> {
        self.require_rod(row, col)?;
        match self.provider_grid.get_mut(row, col) {
            Some(p) => p.add_data(feature, entry),
            None => {
                let mut p = DataProvider::new();
                p.add_data(feature, entry)?;
                self.provider_grid.set(row, col, Some(p))?;
                Ok(())
            }
        }
    }

    fn require_rod(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.size || col >= self.size {
            return Err(ModelError::InvalidArgument(format!(
                "pin ({row}, {col}) outside {0}x{0} assembly",
                self.size
            )));
        }
        if !self.rod_grid.is_occupied(row, col) {
            return Err(ModelError::NotFound(format!(
                "no rod at {} in assembly {:?}",
                self.labels.cell_label(row, col),
                self.name
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn assembly_type(&self) -> AssemblyType {
        self.assembly_type
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rod_pitch(&self) -> f64 {
        self.rod_pitch
    }

    pub fn duct_thickness(&self) -> Option<f64> {
        self.duct_thickness
    }

    pub fn labels(&self) -> &GridLabels {
        &self.labels
    }

    pub fn rod_grid(&self) -> &Grid<u32> {
        &self.rod_grid
    }

    pub fn rod_at(&self, row: usize, col: usize) -> Option<u32> {
        self.rod_grid.get(row, col).copied()
    }

    pub fn provider_grid(&self) -> &Grid<DataProvider> {
        &self.provider_grid
    }

    pub fn provider_at(&self, row: usize, col: usize) -> Option<&DataProvider> {
        self.provider_grid.get(row, col)
    }

    /// Data attached to the assembly as a whole rather than to a pin.
    pub fn data(&self) -> &DataProvider {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DataProvider {
        &mut self.data
    }
}
