use std::fmt;
use std::str::FromStr;

use super::{DataProvider, ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Gas,
    Liquid,
    Solid,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Gas => "gas",
            Phase::Liquid => "liquid",
            Phase::Solid => "solid",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gas" => Ok(Phase::Gas),
            "liquid" => Ok(Phase::Liquid),
            "solid" => Ok(Phase::Solid),
            other => Err(ModelError::InvalidArgument(format!("unknown phase {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Material {
    name: String,
    phase: Phase,
}

impl Material {
    pub fn new(name: impl Into<String>, phase: Phase) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::InvalidArgument("material name is empty".into()));
        }
        Ok(Self { name, phase })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }
}

/// Annulus of a single material, radii and height in cm.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    material: Material,
    inner_radius: f64,
    outer_radius: f64,
    height: f64,
    data: DataProvider,
}

impl Ring {
    pub fn new(material: Material, inner_radius: f64, outer_radius: f64, height: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && outer_radius.is_finite() && height.is_finite()) {
            return Err(ModelError::InvalidArgument("ring dimensions must be finite".into()));
        }
        if !(0.0 <= inner_radius && inner_radius < outer_radius) {
            return Err(ModelError::InvalidArgument(format!(
                "ring radii [{inner_radius}, {outer_radius}) are not an annulus"
            )));
        }
        if height <= 0.0 {
            return Err(ModelError::InvalidArgument(format!("ring height {height} must be positive")));
        }
        Ok(Self {
            material,
            inner_radius,
            outer_radius,
            height,
            data: DataProvider::new(),
        })
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        self.inner_radius <= r && r < self.outer_radius
    }

    pub fn data(&self) -> &DataProvider {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DataProvider {
        &mut self.data
    }
}

/// Axial segment `[z_start, z_end)` of a rod made of concentric rings.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialBlock {
    z_start: f64,
    z_end: f64,
    rings: Vec<Ring>,
    data: DataProvider,
}

impl MaterialBlock {
    /// Rings are sorted by inner radius and must not overlap.
    pub fn new(z_start: f64, z_end: f64, mut rings: Vec<Ring>) -> Result<Self> {
        if !(z_start.is_finite() && z_end.is_finite() && z_start < z_end) {
            return Err(ModelError::InvalidArgument(format!(
                "block extent [{z_start}, {z_end}) is empty or not finite"
            )));
        }
        rings.sort_by(|a, b| a.inner_radius.total_cmp(&b.inner_radius));
        for pair in rings.windows(2) {
            if pair[0].outer_radius > pair[1].inner_radius {
                return Err(ModelError::InvalidArgument(format!(
                    "rings [{}, {}) and [{}, {}) overlap",
                    pair[0].inner_radius, pair[0].outer_radius, pair[1].inner_radius, pair[1].outer_radius
                )));
            }
        }
        Ok(Self {
            z_start,
            z_end,
            rings,
            data: DataProvider::new(),
        })
    }

    pub fn z_start(&self) -> f64 {
        self.z_start
    }

    pub fn z_end(&self) -> f64 {
        self.z_end
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn rings_mut(&mut self) -> &mut [Ring] {
        &mut self.rings
    }

    pub fn contains_z(&self, z: f64) -> bool {
        self.z_start <= z && z < self.z_end
    }

    pub fn ring_at_radius(&self, r: f64) -> Option<&Ring> {
        // rings are sorted and disjoint: the candidate is the last ring starting at or below r
        let idx = self.rings.partition_point(|ring| ring.inner_radius <= r);
        let ring = self.rings.get(idx.checked_sub(1)?)?;
        ring.contains_radius(r).then_some(ring)
    }

    pub fn outer_radius(&self) -> f64 {
        self.rings.last().map_or(0.0, |r| r.outer_radius)
    }

    pub fn data(&self) -> &DataProvider {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DataProvider {
        &mut self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RodKind {
    Fuel,
    Control,
    Poison,
    Empty,
    Reflector,
}

impl RodKind {
    pub const ALL: [RodKind; 5] = [
        RodKind::Fuel,
        RodKind::Control,
        RodKind::Poison,
        RodKind::Empty,
        RodKind::Reflector,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RodKind::Fuel => "fuel",
            RodKind::Control => "control",
            RodKind::Poison => "poison",
            RodKind::Empty => "empty",
            RodKind::Reflector => "reflector",
        }
    }
}

impl fmt::Display for RodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RodKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        RodKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::InvalidArgument(format!("unknown rod kind {s:?}")))
    }
}

/// A rod (or SFR pin) template shared by every grid position that uses it.
#[derive(Debug, Clone, PartialEq)]
pub struct RodDef {
    name: String,
    kind: RodKind,
    blocks: Vec<MaterialBlock>,
    pressure: Option<f64>,
    data: DataProvider,
}

impl RodDef {
    /// Blocks are sorted by `z_start` and must not overlap axially.
    pub fn new(name: impl Into<String>, kind: RodKind, mut blocks: Vec<MaterialBlock>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::InvalidArgument("rod name is empty".into()));
        }
        blocks.sort_by(|a, b| a.z_start.total_cmp(&b.z_start));
        for pair in blocks.windows(2) {
            if pair[0].z_end > pair[1].z_start {
                return Err(ModelError::InvalidArgument(format!(
                    "rod {name:?}: blocks [{}, {}) and [{}, {}) overlap",
                    pair[0].z_start, pair[0].z_end, pair[1].z_start, pair[1].z_end
                )));
            }
        }
        Ok(Self {
            name,
            kind,
            blocks,
            pressure: None,
            data: DataProvider::new(),
        })
    }

    /// Internal pressure in MPa.
    pub fn with_pressure(mut self, pressure: f64) -> Result<Self> {
        if !(pressure.is_finite() && pressure >= 0.0) {
            return Err(ModelError::InvalidArgument(format!("pressure {pressure} is invalid")));
        }
        self.pressure = Some(pressure);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> RodKind {
        self.kind
    }

    pub fn blocks(&self) -> &[MaterialBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [MaterialBlock] {
        &mut self.blocks
    }

    pub fn pressure(&self) -> Option<f64> {
        self.pressure
    }

    /// Distance from the bottom of the lowest block to the top of the highest.
    pub fn height(&self) -> f64 {
        match (self.blocks.first(), self.blocks.iter().map(|b| b.z_end).reduce(f64::max)) {
            (Some(first), Some(top)) => top - first.z_start,
            _ => 0.0,
        }
    }

    pub fn block_at(&self, z: f64) -> Option<&MaterialBlock> {
        let idx = self.blocks.partition_point(|b| b.z_start <= z);
        let block = self.blocks.get(idx.checked_sub(1)?)?;
        block.contains_z(z).then_some(block)
    }

    /// The ring occupying radius `r` at height `z`, if any.
    pub fn ring_at(&self, z: f64, r: f64) -> Option<&Ring> {
        self.block_at(z)?.ring_at_radius(r)
    }

    pub fn outer_radius(&self) -> f64 {
        self.blocks.iter().map(MaterialBlock::outer_radius).fold(0.0, f64::max)
    }

    pub fn data(&self) -> &DataProvider {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DataProvider {
        &mut self.data
    }

    pub(crate) fn providers(&self) -> impl Iterator<Item = &DataProvider> + '_ {
        std::iter::once(&self.data).chain(
            self.blocks
                .iter()
                .flat_map(|b| std::iter::once(&b.data).chain(b.rings.iter().map(|r| &r.data))),
        )
    }
}

/// Free-function form of [`RodDef::ring_at`].
pub fn ring_at(rod: &RodDef, z: f64, r: f64) -> Option<&Ring> {
    rod.ring_at(z, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fuel_rod() -> RodDef {
        let fuel = Material::new("UO2", Phase::Solid).unwrap();
        let gas = Material::new("He", Phase::Gas).unwrap();
        let clad = Material::new("Zircaloy-4", Phase::Solid).unwrap();
        let block = MaterialBlock::new(
            0.0,
            10.0,
            vec![
                Ring::new(clad, 0.42, 0.48, 10.0).unwrap(),
                Ring::new(fuel, 0.0, 0.4, 10.0).unwrap(),
                Ring::new(gas, 0.4, 0.42, 10.0).unwrap(),
            ],
        )
        .unwrap();
        RodDef::new("fuel", RodKind::Fuel, vec![block]).unwrap()
    }

    #[test]
    fn ring_lookup_examples() {
        let rod = fuel_rod();
        assert_eq!(rod.ring_at(5.0, 0.41).unwrap().material().name(), "He");
        assert_eq!(rod.ring_at(5.0, 0.0).unwrap().material().name(), "UO2");
        assert_eq!(rod.ring_at(5.0, 0.45).unwrap().material().name(), "Zircaloy-4");
        assert!(rod.ring_at(5.0, 0.48).is_none());
        assert!(rod.ring_at(5.0, 1.0).is_none());
        assert!(rod.ring_at(10.0, 0.1).is_none());
        assert!(rod.ring_at(-0.1, 0.1).is_none());
    }

    #[test]
    fn rings_sorted_on_construction() {
        let rod = fuel_rod();
        let radii: Vec<f64> = rod.blocks()[0].rings().iter().map(|r| r.inner_radius()).collect();
        assert_eq!(radii, vec![0.0, 0.4, 0.42]);
    }

    #[test]
    fn overlapping_rings_rejected() {
        let m = Material::new("m", Phase::Solid).unwrap();
        let rings = vec![
            Ring::new(m.clone(), 0.0, 0.5, 1.0).unwrap(),
            Ring::new(m, 0.4, 0.6, 1.0).unwrap(),
        ];
        assert!(MaterialBlock::new(0.0, 1.0, rings).is_err());
    }

    #[test]
    fn bad_ring_dimensions_rejected() {
        let m = Material::new("m", Phase::Liquid).unwrap();
        assert!(Ring::new(m.clone(), 0.5, 0.5, 1.0).is_err());
        assert!(Ring::new(m.clone(), -0.1, 0.5, 1.0).is_err());
        assert!(Ring::new(m, 0.0, 0.5, 0.0).is_err());
        assert!(Material::new("", Phase::Gas).is_err());
    }

    #[test]
    fn height_spans_blocks_with_gap() {
        let m = Material::new("m", Phase::Solid).unwrap();
        let b1 = MaterialBlock::new(10.0, 20.0, vec![Ring::new(m.clone(), 0.0, 1.0, 10.0).unwrap()]).unwrap();
        let b2 = MaterialBlock::new(25.0, 40.0, vec![Ring::new(m, 0.0, 1.0, 15.0).unwrap()]).unwrap();
        let rod = RodDef::new("r", RodKind::Poison, vec![b2, b1]).unwrap();
        assert_eq!(rod.height(), 30.0);
        assert!(rod.block_at(22.0).is_none());
        assert_eq!(rod.block_at(25.0).unwrap().z_start(), 25.0);
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let m = Material::new("m", Phase::Solid).unwrap();
        let b1 = MaterialBlock::new(0.0, 20.0, vec![Ring::new(m.clone(), 0.0, 1.0, 1.0).unwrap()]).unwrap();
        let b2 = MaterialBlock::new(10.0, 30.0, vec![Ring::new(m, 0.0, 1.0, 1.0).unwrap()]).unwrap();
        assert!(RodDef::new("r", RodKind::Fuel, vec![b1, b2]).is_err());
    }

    #[test]
    fn kind_and_phase_strings() {
        for k in RodKind::ALL {
            assert_eq!(k.as_str().parse::<RodKind>().unwrap(), k);
        }
        assert_eq!("gas".parse::<Phase>().unwrap(), Phase::Gas);
        assert!("plasma".parse::<Phase>().is_err());
    }
}
