//! Synthetic reactors for demos, benchmarks and tests.
//!
//! None of the values here come from a physical simulation. Shapes are chosen
//! to resemble a beginning-of-life PWR assembly (cosine axial power with a
//! mild radial tilt) so plots and comparisons look plausible.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    pin_center, AssemblyDef, AssemblyType, DataEntry, DataProvider, GridLabels, Material, MaterialBlock, Phase,
    Reactor, ReactorBuilder, ReactorType, Result, Ring, RodDef, RodKind,
};

/// Pins per side of a PWR fuel assembly.
pub const PWR_ASSEMBLY_SIZE: usize = 17;
/// Rod pitch of a PWR fuel assembly, cm.
pub const PWR_ROD_PITCH: f64 = 1.26;
/// Core assembly pitch, cm.
pub const PWR_ASSEMBLY_PITCH: f64 = 21.5;
/// Active fuel height, cm.
pub const PWR_FUEL_HEIGHT: f64 = 365.76;
/// Axial levels of the 3a sample.
pub const PWR_AXIAL_LEVELS: usize = 49;
/// Fuel pins in a 17x17 assembly with 24 guide tubes and 1 instrument tube.
pub const PWR_FUEL_PINS: usize = 264;

pub const AXIAL_POWER: &str = "Axial Power";
pub const TOTAL_POWER: &str = "Total Power";

/// Guide-tube positions of a 17x17 assembly, zero-based `(row, col)`.
pub const GUIDE_TUBES: [(usize, usize); 24] = [
    (2, 5),
    (2, 8),
    (2, 11),
    (3, 3),
    (3, 13),
    (5, 2),
    (5, 5),
    (5, 8),
    (5, 11),
    (5, 14),
    (8, 2),
    (8, 5),
    (8, 11),
    (8, 14),
    (11, 2),
    (11, 5),
    (11, 8),
    (11, 11),
    (11, 14),
    (13, 3),
    (13, 13),
    (14, 5),
    (14, 8),
    (14, 11),
];
/// Instrument-tube position of a 17x17 assembly.
pub const INSTRUMENT_TUBE: (usize, usize) = (8, 8);

fn mat(name: &str, phase: Phase) -> Material {
    Material::new(name, phase).expect("static material")
}

fn rod(name: &str, kind: RodKind, height: f64, rings: &[(&str, Phase, f64, f64)]) -> RodDef {
    let rings = rings
        .iter()
        .map(|&(m, p, r0, r1)| Ring::new(mat(m, p), r0, r1, height).expect("static ring"))
        .collect();
    let block = MaterialBlock::new(0.0, height, rings).expect("static block");
    RodDef::new(name, kind, vec![block]).expect("static rod")
}

/// UO2 fuel, helium gap, Zircaloy cladding.
pub fn pwr_fuel_rod() -> RodDef {
    rod(
        "UO2 fuel rod",
        RodKind::Fuel,
        PWR_FUEL_HEIGHT,
        &[
            ("UO2", Phase::Solid, 0.0, 0.4096),
            ("He", Phase::Gas, 0.4096, 0.418),
            ("Zircaloy-4", Phase::Solid, 0.418, 0.475),
        ],
    )
    .with_pressure(2.0)
    .expect("static pressure")
}

/// Silver-indium-cadmium absorber in stainless steel.
pub fn pwr_control_rod() -> RodDef {
    rod(
        "AIC control rod",
        RodKind::Control,
        PWR_FUEL_HEIGHT,
        &[
            ("AIC", Phase::Solid, 0.0, 0.382),
            ("He", Phase::Gas, 0.382, 0.386),
            ("SS304", Phase::Solid, 0.386, 0.484),
        ],
    )
}

/// Water-filled Zircaloy tube.
pub fn pwr_instrument_tube() -> RodDef {
    rod(
        "instrument tube",
        RodKind::Empty,
        PWR_FUEL_HEIGHT,
        &[
            ("Water", Phase::Liquid, 0.0, 0.559),
            ("Zircaloy-4", Phase::Solid, 0.559, 0.605),
        ],
    )
}

fn pwr_poison_rod() -> RodDef {
    rod(
        "Pyrex poison rod",
        RodKind::Poison,
        PWR_FUEL_HEIGHT,
        &[
            ("Pyrex", Phase::Solid, 0.214, 0.427),
            ("SS304", Phase::Solid, 0.427, 0.484),
        ],
    )
}

fn pwr_guide_tube() -> RodDef {
    rod(
        "guide tube",
        RodKind::Empty,
        PWR_FUEL_HEIGHT,
        &[
            ("Water", Phase::Liquid, 0.0, 0.561),
            ("Zircaloy-4", Phase::Solid, 0.561, 0.602),
        ],
    )
}

/// Fills a 17x17 def: fuel everywhere, `guide` at the guide-tube positions,
/// `instrument` at the center.
fn fill_17x17(def: &mut AssemblyDef, fuel: Option<u32>, guide: u32, instrument: Option<u32>) {
    for r in 0..PWR_ASSEMBLY_SIZE {
        for c in 0..PWR_ASSEMBLY_SIZE {
            def.set_rod(r, c, fuel).expect("in bounds");
        }
    }
    for &(r, c) in &GUIDE_TUBES {
        def.set_rod(r, c, Some(guide)).expect("in bounds");
    }
    def.set_rod(INSTRUMENT_TUBE.0, INSTRUMENT_TUBE.1, instrument)
        .expect("in bounds");
}

/// Axial z-center of level `k` (zero-based) out of `levels`.
pub fn level_z(k: usize, levels: usize) -> f64 {
    (k as f64 + 0.5) * PWR_FUEL_HEIGHT / levels as f64
}

/// Relative power shape: extrapolated cosine axially, bowl-shaped radially.
fn power_shape(row: usize, col: usize, z: f64) -> f64 {
    let h = PWR_FUEL_HEIGHT;
    let ext = 12.0;
    let axial = (PI * (z + ext) / (h + 2.0 * ext)).sin() * (1.0 + 0.08 * (PI * z / h).cos());
    let dx = (col as f64 - 8.0) / 8.0;
    let dy = (row as f64 - 8.0) / 8.0;
    let near_water = GUIDE_TUBES
        .iter()
        .filter(|&&(r, c)| r.abs_diff(row) <= 1 && c.abs_diff(col) <= 1)
        .count() as f64;
    let radial = 1.0 + 0.06 * (dx * dx + dy * dy) + 0.015 * near_water;
    axial * radial
}

fn is_fuel_position(row: usize, col: usize) -> bool {
    (row, col) != INSTRUMENT_TUBE && !GUIDE_TUBES.contains(&(row, col))
}

/// Attaches axial and total power to every fuel pin of `def`. `perturb`
/// maps `(value) -> (value, uncertainty)`.
fn add_power_data(
    def: &mut AssemblyDef,
    levels: usize,
    units_id: u32,
    mut perturb: impl FnMut(f64) -> (f64, f64),
) -> Result<()> {
    for r in 0..PWR_ASSEMBLY_SIZE {
        for c in 0..PWR_ASSEMBLY_SIZE {
            if !is_fuel_position(r, c) {
                continue;
            }
            let (x, y) = pin_center(ReactorType::Pwr, PWR_ROD_PITCH, r, c);
            let mut total = 0.0;
            let mut total_unc = 0.0f64;
            for k in 0..levels {
                let z = level_z(k, levels);
                let (v, u) = perturb(power_shape(r, c, z));
                total += v;
                total_unc += u * u;
                def.add_pin_data(r, c, AXIAL_POWER, DataEntry::new(v, u, units_id, [x, y, z], 0.0))?;
            }
            let n = levels as f64;
            def.add_pin_data(
                r,
                c,
                TOTAL_POWER,
                DataEntry::new(total / n, total_unc.sqrt() / n, units_id, [x, y, PWR_FUEL_HEIGHT / 2.0], 0.0),
            )?;
        }
    }
    Ok(())
}

/// The 3x3 demonstration core: one 17x17 fuel assembly in the center, with
/// control banks around it and an in-core instrument sharing the center
/// cell. Carries geometry only.
pub fn pwr_3a_skeleton() -> Reactor {
    pwr_3a_builder("3a").0.freeze().expect("valid sample")
}

/// Indices of the sample's fuel assembly def and the units it uses.
fn pwr_3a_builder(name: &str) -> (ReactorBuilder, u32) {
    let mut b = ReactorBuilder::pwr(name, 3, PWR_ASSEMBLY_PITCH).expect("valid core");
    let fuel = b.add_rod_def(pwr_fuel_rod()).expect("unique");
    let control = b.add_rod_def(pwr_control_rod()).expect("unique");
    let instrument = b.add_rod_def(pwr_instrument_tube()).expect("unique");

    let mut fa = AssemblyDef::new("17x17 fuel assembly", AssemblyType::Fuel, 17, PWR_ROD_PITCH).expect("valid");
    fill_17x17(&mut fa, Some(fuel), control, Some(instrument));
    let fa = b.add_assembly_def(fa).expect("valid");

    let mut cb = AssemblyDef::new("control bank", AssemblyType::ControlBank, 17, PWR_ROD_PITCH).expect("valid");
    fill_17x17(&mut cb, None, control, None);
    let cb = b.add_assembly_def(cb).expect("valid");

    let mut ii = AssemblyDef::new("in-core instrument", AssemblyType::IncoreInstrument, 17, PWR_ROD_PITCH)
        .expect("valid");
    ii.set_rod(INSTRUMENT_TUBE.0, INSTRUMENT_TUBE.1, Some(instrument))
        .expect("in bounds");
    let ii = b.add_assembly_def(ii).expect("valid");

    for r in 0..3 {
        for c in 0..3 {
            if (r, c) == (1, 1) {
                b.set_assembly(AssemblyType::Fuel, r, c, fa).expect("valid");
                b.set_assembly(AssemblyType::IncoreInstrument, r, c, ii).expect("valid");
            } else {
                b.set_assembly(AssemblyType::ControlBank, r, c, cb).expect("valid");
            }
        }
    }
    (b, fa)
}

/// [`pwr_3a_skeleton`] with 49-level "Axial Power" and one-level "Total
/// Power" on all 264 fuel pins of the center assembly.
pub fn pwr_3a() -> Reactor {
    let (mut b, fa) = pwr_3a_builder("3a");
    let units = b.add_unit("relative").expect("valid");
    let def = b.assembly_def_mut(fa).expect("exists");
    add_power_data(def, PWR_AXIAL_LEVELS, units, |v| (v, 0.0)).expect("valid data");
    b.freeze().expect("valid sample")
}

/// A second, independent-looking solution of the 3a sample: a different
/// absolute scale, small seeded noise and nonzero uncertainties.
pub fn pwr_3a_perturbed(seed: u64) -> Reactor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut b, fa) = pwr_3a_builder("3a reference");
    let units = b.add_unit("W/cm").expect("valid");
    let scale = 178.0;
    let def = b.assembly_def_mut(fa).expect("exists");
    add_power_data(def, PWR_AXIAL_LEVELS, units, |v| {
        let noisy = v * scale * (1.0 + rng.random_range(-0.02..0.02));
        (noisy, noisy * 0.004)
    })
    .expect("valid data");
    b.freeze().expect("valid sample")
}

/// Feature stored on the seven-pin SFR sample.
pub const SFR_FEATURE: &str = "Random Data";
/// Axial levels of the seven-pin SFR sample.
pub const SFR_AXIAL_LEVELS: usize = 10;

/// Rhombic 3x3 cells forming a seven-cell hexagon: the corners (0,0) and
/// (2,2) fall outside.
pub fn hex7_cells() -> impl Iterator<Item = (usize, usize)> {
    (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).filter(|&rc| rc != (0, 0) && rc != (2, 2))
}

/// A seven-assembly SFR core around a seven-pin fuel assembly carrying
/// seeded random data.
pub fn sfr7() -> Reactor {
    let height = 100.0;
    let mut b = ReactorBuilder::sfr("sfr7", 3, 12.0, 11.6).expect("valid core");
    let units = b.add_unit("arbitrary").expect("valid");
    let pin = b
        .add_rod_def(rod(
            "MOX pin",
            RodKind::Fuel,
            height,
            &[
                ("MOX", Phase::Solid, 0.0, 0.3),
                ("Na", Phase::Liquid, 0.3, 0.32),
                ("HT9", Phase::Solid, 0.32, 0.37),
            ],
        ))
        .expect("unique");
    let absorber = b
        .add_rod_def(rod(
            "B4C pin",
            RodKind::Control,
            height,
            &[("B4C", Phase::Solid, 0.0, 0.33), ("HT9", Phase::Solid, 0.33, 0.37)],
        ))
        .expect("unique");
    let reflector = b
        .add_rod_def(rod("HT9 rod", RodKind::Reflector, height, &[("HT9", Phase::Solid, 0.0, 0.4)]))
        .expect("unique");

    let make = |name: &str, ty: AssemblyType, rod: u32| {
        let mut def = AssemblyDef::new(name, ty, 3, 0.9)
            .and_then(|d| d.with_duct_thickness(0.3))
            .expect("valid");
        for (r, c) in hex7_cells() {
            def.set_rod(r, c, Some(rod)).expect("in bounds");
        }
        def
    };
    let mut fuel = make("7-pin fuel", AssemblyType::Fuel, pin);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (r, c) in hex7_cells() {
        let (x, y) = pin_center(ReactorType::Sfr, 0.9, r, c);
        for k in 0..SFR_AXIAL_LEVELS {
            let z = (k as f64 + 0.5) * height / SFR_AXIAL_LEVELS as f64;
            let v: f64 = rng.random_range(0.5..1.5);
            fuel.add_pin_data(r, c, SFR_FEATURE, DataEntry::new(v, 0.0, units, [x, y, z], 0.0))
                .expect("valid");
        }
    }
    let fuel = b.add_assembly_def(fuel).expect("valid");
    let control = b
        .add_assembly_def(make("7-pin control", AssemblyType::Control, absorber))
        .expect("valid");
    let refl = b
        .add_assembly_def(make("7-rod reflector", AssemblyType::Reflector, reflector))
        .expect("valid");
    for (r, c) in hex7_cells() {
        match (r, c) {
            (1, 1) => b.set_assembly(AssemblyType::Fuel, r, c, fuel),
            (0, 1) => b.set_assembly(AssemblyType::Control, r, c, control),
            _ => b.set_assembly(AssemblyType::Reflector, r, c, refl),
        }
        .expect("valid");
    }
    b.freeze().expect("valid sample")
}

/// Benchmark core: `assemblies` distinct 17x17 fuel assembly defs (264
/// fuel pins each) sharing five rod defs, with two features of `levels`
/// axial levels on every fuel pin.
pub fn bench_reactor(assemblies: usize, levels: usize) -> Result<Reactor> {
    let size = (1..).find(|s| s * s >= assemblies.max(1)).expect("finite");
    let mut b = ReactorBuilder::pwr("bench", size, PWR_ASSEMBLY_PITCH)?;
    let units = b.add_unit("relative")?;
    let fuel = b.add_rod_def(pwr_fuel_rod())?;
    let control = b.add_rod_def(pwr_control_rod())?;
    let instrument = b.add_rod_def(pwr_instrument_tube())?;
    let poison = b.add_rod_def(pwr_poison_rod())?;
    let guide = b.add_rod_def(pwr_guide_tube())?;
    let z: Vec<f64> = (0..levels).map(|k| level_z(k, levels)).collect();
    for i in 0..assemblies {
        let mut def = AssemblyDef::new(format!("fuel assembly {i}"), AssemblyType::Fuel, 17, PWR_ROD_PITCH)?;
        let water = match i % 3 {
            0 => guide,
            1 => poison,
            _ => control,
        };
        fill_17x17(&mut def, Some(fuel), water, Some(instrument));
        let tilt = 1.0 + 0.001 * i as f64;
        for r in 0..PWR_ASSEMBLY_SIZE {
            for c in 0..PWR_ASSEMBLY_SIZE {
                if !is_fuel_position(r, c) {
                    continue;
                }
                let (x, y) = pin_center(ReactorType::Pwr, PWR_ROD_PITCH, r, c);
                let mut p = DataProvider::new();
                for &zk in &z {
                    let v = power_shape(r, c, zk) * tilt;
                    p.add_data(AXIAL_POWER, DataEntry::new(v, 0.0, units, [x, y, zk], 0.0))?;
                    p.add_data("Fast Flux", DataEntry::new(v * 3.1e13, v * 1e11, units, [x, y, zk], 0.0))?;
                }
                def.set_provider(r, c, p)?;
            }
        }
        let idx = b.add_assembly_def(def)?;
        b.set_assembly(AssemblyType::Fuel, i / size, i % size, idx)?;
    }
    b.freeze()
}

/// Assemblies needed to hold `pins` fuel pins.
pub fn bench_assemblies_for(pins: usize) -> usize {
    pins.div_ceil(PWR_FUEL_PINS).max(1)
}

const FEATURE_NAMES: [&str; 6] = ["Axial Power", "Total Power", "Flux", "Temperature", "Burnup", "Cross sections"];
const UNIT_NAMES: [&str; 4] = ["W/cm", "K", "n/cm2/s", "MWd/kg"];
const MATERIALS: [(&str, Phase); 5] = [
    ("UO2", Phase::Solid),
    ("He", Phase::Gas),
    ("Zircaloy-4", Phase::Solid),
    ("Na", Phase::Liquid),
    ("HT9", Phase::Solid),
];

fn random_provider<R: Rng>(rng: &mut R, units: u32, max_features: usize, xy: (f64, f64)) -> DataProvider {
    let mut p = DataProvider::new();
    let n_features = rng.random_range(1..=max_features);
    let times: Vec<f64> = {
        let n = rng.random_range(1..=3);
        let mut t: Vec<f64> = [0.0, 1.5, 86400.0, 3.25e6].into_iter().take(n).collect();
        if rng.random_bool(0.5) {
            t.reverse();
        }
        t
    };
    for f in FEATURE_NAMES.iter().take(n_features) {
        let levels = rng.random_range(1..=4);
        for &t in &times {
            for k in 0..levels {
                let e = DataEntry::new(
                    rng.random_range(-10.0..1e3),
                    rng.random_range(0.0..1.0),
                    rng.random_range(0..units),
                    [xy.0, xy.1, k as f64 * rng.random_range(0.5..20.0)],
                    t,
                );
                p.add_data(f, e).expect("valid entry");
            }
        }
    }
    p
}

fn random_rod<R: Rng>(rng: &mut R, name: String, units: u32) -> RodDef {
    let mut blocks = Vec::new();
    let mut z = rng.random_range(-5.0..5.0);
    for _ in 0..rng.random_range(1..=2) {
        let z_end = z + rng.random_range(1.0..50.0);
        let mut rings = Vec::new();
        let mut r = if rng.random_bool(0.3) { rng.random_range(0.0..0.1) } else { 0.0 };
        for _ in 0..rng.random_range(1..=3) {
            let outer = r + rng.random_range(0.01..0.3);
            let (m, p) = MATERIALS[rng.random_range(0..MATERIALS.len())];
            let mut ring = Ring::new(mat(m, p), r, outer, z_end - z).expect("valid ring");
            if rng.random_bool(0.1) {
                *ring.data_mut() = random_provider(rng, units, 2, (0.0, 0.0));
            }
            rings.push(ring);
            r = outer + if rng.random_bool(0.2) { 0.01 } else { 0.0 };
        }
        let mut block = MaterialBlock::new(z, z_end, rings).expect("valid block");
        if rng.random_bool(0.1) {
            *block.data_mut() = random_provider(rng, units, 2, (0.0, 0.0));
        }
        blocks.push(block);
        z = z_end + if rng.random_bool(0.3) { 1.0 } else { 0.0 };
    }
    let kind = RodKind::ALL[rng.random_range(0..RodKind::ALL.len())];
    let mut rod = RodDef::new(name, kind, blocks).expect("valid rod");
    if rng.random_bool(0.5) {
        rod = rod.with_pressure(rng.random_range(0.1..16.0)).expect("valid pressure");
    }
    if rng.random_bool(0.2) {
        *rod.data_mut() = random_provider(rng, units, 2, (0.0, 0.0));
    }
    rod
}

/// A random valid reactor: core size 1 to 17, either family, one to five
/// features and one to three times on pin data.
pub fn random_reactor<R: Rng>(rng: &mut R) -> Reactor {
    let size = rng.random_range(1..=17);
    let sfr = rng.random_bool(0.5);
    let mut b = if sfr {
        ReactorBuilder::sfr("random sfr", size, rng.random_range(5.0..20.0), rng.random_range(4.0..19.0))
    } else {
        ReactorBuilder::pwr("random pwr", size, rng.random_range(5.0..25.0))
    }
    .expect("valid core");
    if rng.random_bool(0.3) {
        let rows = (0..size).map(|i| format!("R{i}")).collect();
        let cols = (0..size).map(|i| format!("C{}", size - i)).collect();
        b.set_labels(GridLabels::new(rows, cols).expect("unique labels")).expect("sized");
    }
    let n_units = rng.random_range(1..=UNIT_NAMES.len());
    for u in &UNIT_NAMES[..n_units] {
        b.add_unit(u).expect("unique");
    }
    let units = n_units as u32;
    let n_rods = rng.random_range(1..=3);
    for i in 0..n_rods {
        b.add_rod_def(random_rod(rng, format!("rod {i}"), units)).expect("unique");
    }
    let reactor_type = b.reactor_type();
    let allowed = AssemblyType::allowed(reactor_type);
    let pitch = rng.random_range(0.5..2.0);
    let max_features = rng.random_range(1..=5);
    for i in 0..rng.random_range(0..=3) {
        let ty = allowed[rng.random_range(0..allowed.len())];
        let asize = rng.random_range(1..=5);
        let mut def = AssemblyDef::new(format!("assembly {i}"), ty, asize, pitch).expect("valid");
        if sfr && rng.random_bool(0.5) {
            def = def.with_duct_thickness(rng.random_range(0.0..0.5)).expect("valid");
        }
        for r in 0..asize {
            for c in 0..asize {
                if rng.random_bool(0.8) {
                    def.set_rod(r, c, Some(rng.random_range(0..n_rods))).expect("in bounds");
                    if rng.random_bool(0.6) {
                        let xy = pin_center(reactor_type, pitch, r, c);
                        def.set_provider(r, c, random_provider(rng, units, max_features, xy))
                            .expect("occupied");
                    }
                }
            }
        }
        if rng.random_bool(0.2) {
            *def.data_mut() = random_provider(rng, units, 2, (0.0, 0.0));
        }
        let idx = b.add_assembly_def(def).expect("valid");
        for _ in 0..rng.random_range(0..=size * size) {
            let (r, c) = (rng.random_range(0..size), rng.random_range(0..size));
            b.set_assembly(ty, r, c, idx).expect("valid");
        }
    }
    if rng.random_bool(0.3) {
        *b.data_mut() = random_provider(rng, units, 2, (0.0, 0.0));
    }
    b.freeze().expect("valid random reactor")
}
