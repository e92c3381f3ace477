//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use corelens::analysis::{kmeans, pin_diff, Matrix};
use corelens::model::{AssemblyDef, AssemblyType, DataEntry, Reactor, ReactorBuilder};
use corelens::nrdf::{self, NrdfError};
use corelens::samples::{self, AXIAL_POWER, TOTAL_POWER};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("round-trip fidelity", round_trip),
        ("performance envelope", performance),
        ("diff identity and scale invariance", diff_invariance),
        ("diff hand case", diff_hand_case),
        ("k-means correctness", kmeans_exhaustive),
        ("parser robustness", parser_robustness),
        ("render determinism", render_determinism),
        ("3a sample pipeline shapes", pipeline_shapes),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| Err(panic_message(&e)));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    let msg = e
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
    format!("panicked: {}", msg.unwrap_or_default())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..1000 {
        let r = samples::random_reactor(&mut rng);
        let bytes = nrdf::to_bytes(&nrdf::store_reactor(&r)).map_err(|e| format!("reactor {i}: {e}"))?;
        let back = nrdf::from_bytes(&bytes)
            .and_then(|f| nrdf::load_reactor(&f))
            .map_err(|e| format!("reactor {i}: {e}"))?;
        ensure(back == r, || format!("reactor {i} differs after a round trip"))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("1000 reactors, 0 failures in {took:.2?}"))
}

fn performance() -> Outcome {
    let assemblies = samples::bench_assemblies_for(52_800);
    let r = samples::bench_reactor(assemblies, 49).map_err(|e| e.to_string())?;
    let pins: usize = r.assembly_defs().iter().map(|d| d.rod_grid().occupied().count()).sum();
    let features = r.assembly_view(0).ok_or("no assembly")?.features().len();

    let start = Instant::now();
    let bytes = nrdf::to_bytes(&nrdf::store_reactor(&r)).map_err(|e| e.to_string())?;
    let write = start.elapsed();
    let start = Instant::now();
    let file = nrdf::from_bytes(&bytes).map_err(|e| e.to_string())?;
    let back = nrdf::load_reactor(&file).map_err(|e| e.to_string())?;
    let read = start.elapsed();

    ensure(back == r, || "bench reactor differs after a round trip".into())?;
    ensure(write < Duration::from_secs(10), || format!("write took {write:?}"))?;
    ensure(read < Duration::from_secs(10), || format!("read took {read:?}"))?;
    let fuel_pins = assemblies * samples::PWR_FUEL_PINS;
    ensure(fuel_pins >= 52_800, || format!("only {fuel_pins} fuel pins"))?;
    ensure(features == 2, || format!("{features} features"))?;

    // five rod payloads serve every pin position in the file
    let reactor = &file.root.children[0].children[0];
    let child_count = |name: &str| {
        file.string_index(name)
            .and_then(|i| reactor.child(i))
            .map(|n| n.children.len())
            .unwrap_or(0)
    };
    let rods = child_count("rod_defs");
    ensure(rods == 5, || format!("{rods} rod_def nodes"))?;

    // one assembly def placed in many cells is stored once
    let shared = |count: usize| -> Result<(usize, usize), String> {
        let side = 15;
        let mut b = ReactorBuilder::pwr("dedup", side, samples::PWR_ASSEMBLY_PITCH).map_err(|e| e.to_string())?;
        let rod = b.add_rod_def(samples::pwr_fuel_rod()).map_err(|e| e.to_string())?;
        let mut def = AssemblyDef::new("shared", AssemblyType::Fuel, 17, samples::PWR_ROD_PITCH).map_err(|e| e.to_string())?;
        for i in 0..289 {
            def.set_rod(i / 17, i % 17, Some(rod)).map_err(|e| e.to_string())?;
        }
        let d = b.add_assembly_def(def).map_err(|e| e.to_string())?;
        for i in 0..count {
            b.set_assembly(AssemblyType::Fuel, i / side, i % side, d).map_err(|e| e.to_string())?;
        }
        let f = nrdf::store_reactor(&b.freeze().map_err(|e| e.to_string())?);
        let defs = f.root.children[0].children[0]
            .child(f.string_index("assembly_defs").ok_or("no assembly_defs")?)
            .ok_or("no assembly_defs")?
            .children
            .len();
        Ok((nrdf::to_bytes(&f).map_err(|e| e.to_string())?.len(), defs))
    };
    let (one, defs_one) = shared(1)?;
    let (many, defs_many) = shared(200)?;
    ensure(defs_one == 1 && defs_many == 1, || "shared def stored more than once".into())?;
    ensure(many < one + 16 * 200, || format!("200 placements cost {} bytes", many - one))?;

    Ok(format!(
        "{pins} rod positions ({fuel_pins} fuel pins), {} bytes, write {write:.2?}, read {read:.2?}, \
         {rods} rod defs, shared def x200 adds {} bytes",
        bytes.len(),
        many - one
    ))
}

/// One fuel assembly, `n x n`, pin `i` holding `series[i]` times `scale`.
fn grid_assembly(n: usize, series: &[Vec<f64>], scale: f64) -> Result<Reactor, String> {
    let s = |e: corelens::model::ModelError| e.to_string();
    let mut b = ReactorBuilder::pwr("t", 1, 21.5).map_err(s)?;
    b.add_unit("W").map_err(s)?;
    let rod = b.add_rod_def(samples::pwr_fuel_rod()).map_err(s)?;
    let mut def = AssemblyDef::new("a", AssemblyType::Fuel, n, 1.26).map_err(s)?;
    for (i, values) in series.iter().enumerate() {
        def.set_rod(i / n, i % n, Some(rod)).map_err(s)?;
        for (k, &v) in values.iter().enumerate() {
            def.add_pin_data(i / n, i % n, AXIAL_POWER, DataEntry::new(v * scale, 0.0, 0, [0.0, 0.0, k as f64], 0.0))
                .map_err(s)?;
        }
    }
    let d = b.add_assembly_def(def).map_err(s)?;
    b.set_assembly(AssemblyType::Fuel, 0, 0, d).map_err(s)?;
    b.freeze().map_err(s)
}

fn percent_table(a: &Reactor, b: &Reactor) -> Result<Vec<f64>, String> {
    let (va, vb) = (a.assembly_view(0).ok_or("no assembly")?, b.assembly_view(0).ok_or("no assembly")?);
    let res = pin_diff(&va, &vb, AXIAL_POWER, &[], 0.0).map_err(|e| e.to_string())?;
    Ok(res.table("percent_difference").ok_or("no table")?.values().as_slice().to_vec())
}

fn diff_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for case in 0..200 {
        let n = rng.random_range(1..=5);
        let levels = rng.random_range(1..=49);
        let mut gen = || (0..n * n).map(|_| (0..levels).map(|_| rng.random_range(0.05..5.0)).collect()).collect::<Vec<Vec<f64>>>();
        let (sa, sb) = (gen(), gen());
        let (c, d) = (10f64.powf(rng.random_range(-3.0..3.0)), 10f64.powf(rng.random_range(-3.0..3.0)));
        let a = grid_assembly(n, &sa, 1.0)?;
        let identity = percent_table(&a, &a)?;
        ensure(identity.iter().all(|&v| v == 0.0), || format!("case {case}: pin_diff(A, A) not exactly 0"))?;
        let base = percent_table(&a, &grid_assembly(n, &sb, 1.0)?)?;
        let scaled = percent_table(&grid_assembly(n, &sa, c)?, &grid_assembly(n, &sb, d)?)?;
        for (p, q) in base.iter().zip(&scaled) {
            ensure((p - q).abs() <= 1e-12 * p.abs().max(1.0), || format!("case {case}: {p} vs {q} (c={c}, d={d})"))?;
        }
        checked += base.len();
    }
    Ok(format!("200 random pairs, {checked} pin-levels within 1e-12 relative"))
}

fn diff_hand_case() -> Outcome {
    let input = grid_assembly(1, &[vec![1.0, 3.0]], 1.0)?;
    let reference = grid_assembly(1, &[vec![2.0, 2.0]], 1.0)?;
    let got = percent_table(&input, &reference)?;
    ensure(got == [-50.0, 50.0], || format!("got {got:?}"))?;
    Ok("[1, 3] vs [2, 2] gives [-50, 50] exactly".into())
}

/// Minimum inertia over every partition of the rows into exactly `k`
/// non-empty clusters, enumerated as restricted growth strings.
fn exhaustive_inertia(p: &Matrix, k: usize) -> f64 {
    fn cost(p: &Matrix, labels: &[usize], k: usize) -> f64 {
        let d = p.cols();
        let mut total = 0.0;
        for j in 0..k {
            let members: Vec<&[f64]> = (0..p.rows()).filter(|&i| labels[i] == j).map(|i| p.row(i)).collect();
            let mean: Vec<f64> = (0..d).map(|c| members.iter().map(|m| m[c]).sum::<f64>() / members.len() as f64).collect();
            total += members.iter().map(|m| m.iter().zip(&mean).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sum::<f64>();
        }
        total
    }
    fn walk(p: &Matrix, k: usize, labels: &mut Vec<usize>, used: usize, best: &mut f64) {
        let n = p.rows();
        if labels.len() == n {
            if used == k {
                *best = best.min(cost(p, labels, k));
            }
            return;
        }
        // not enough rows left to open the remaining clusters
        if k - used > n - labels.len() {
            return;
        }
        for j in 0..(used + 1).min(k) {
            labels.push(j);
            walk(p, k, labels, used.max(j + 1), best);
            labels.pop();
        }
    }
    let mut best = f64::INFINITY;
    walk(p, k, &mut Vec::new(), 0, &mut best);
    best
}

fn kmeans_exhaustive() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut runs = 0;
    let mut worst = 0.0f64;
    for case in 0..20 {
        let n = rng.random_range(1..=8);
        let d = rng.random_range(1..=2);
        let k = rng.random_range(1..=n);
        let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let p = Matrix::new(n, d, data).map_err(|e| e.to_string())?;
        let oracle = exhaustive_inertia(&p, k);
        let mut best = f64::INFINITY;
        for seed in 0..10 {
            let fit = kmeans(&p, k, seed, 300).map_err(|e| format!("case {case}: {e}"))?;
            runs += 1;
            for w in fit.history.windows(2) {
                ensure(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), || {
                    format!("case {case} seed {seed}: inertia rose {:?}", fit.history)
                })?;
            }
            best = best.min(fit.inertia);
        }
        let gap = (best - oracle).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("case {case} (n={n}, d={d}, k={k}): best {best} vs oracle {oracle}"))?;
    }
    Ok(format!("20 instances, {runs} runs monotone, worst gap to oracle {worst:.1e}"))
}

fn parser_robustness() -> Outcome {
    let goldens = common::nrdf_goldens();
    let mut offsets = 0;
    for (name, bytes) in &goldens {
        let stored = std::fs::read(common::golden_dir().join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(&stored == bytes, || format!("{name} differs from the committed golden"))?;
        for cut in 0..bytes.len() {
            let outcome = panic::catch_unwind(|| nrdf::from_bytes(&bytes[..cut]));
            match outcome {
                Err(e) => return Err(format!("{name} cut at {cut}: {}", panic_message(&e))),
                Ok(Ok(_)) => return Err(format!("{name} cut at {cut} parsed")),
                Ok(Err(NrdfError::Corrupt { .. })) => {}
                Ok(Err(e)) => return Err(format!("{name} cut at {cut}: unexpected error kind {e}")),
            }
            offsets += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mutations = 100_000;
    let (mut parsed, mut rejected) = (0, 0);
    for i in 0..mutations {
        let (name, base) = &goldens[i % goldens.len()];
        let mut bytes = base.clone();
        match rng.random_range(0..4) {
            0 => {
                for _ in 0..rng.random_range(1..=4) {
                    let at = rng.random_range(0..bytes.len());
                    bytes[at] = rng.random();
                }
            }
            1 => {
                let at = rng.random_range(0..bytes.len());
                bytes[at] ^= 1 << rng.random_range(0..8);
            }
            2 => {
                // overwrite a little-endian word, the usual length/offset width
                let at = rng.random_range(0..bytes.len().saturating_sub(4).max(1));
                let v: u32 = match rng.random_range(0..3) {
                    0 => u32::MAX,
                    1 => rng.random_range(0..64),
                    _ => rng.random(),
                };
                for (j, b) in v.to_le_bytes().into_iter().enumerate() {
                    if let Some(slot) = bytes.get_mut(at + j) {
                        *slot = b;
                    }
                }
            }
            _ => {
                let at = rng.random_range(0..=bytes.len());
                let extra: Vec<u8> = (0..rng.random_range(1..16)).map(|_| rng.random()).collect();
                bytes.splice(at..at, extra);
            }
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
            nrdf::from_bytes(&bytes).map(|f| nrdf::load_reactors(&f).is_ok())
        }));
        match outcome {
            Err(e) => return Err(format!("mutation {i} of {name}: {}", panic_message(&e))),
            Ok(Ok(_)) => parsed += 1,
            Ok(Err(_)) => rejected += 1,
        }
    }
    Ok(format!(
        "{offsets} truncations all Corrupt; {mutations} mutations crash-free ({rejected} rejected, {parsed} still parsed)"
    ))
}

fn render_determinism() -> Outcome {
    let first = common::render_goldens();
    let second = common::render_goldens();
    ensure(first == second, || "two runs in one process differ".into())?;
    for (name, bytes) in &first {
        common::check_golden(name, bytes)?;
    }
    let names: Vec<_> = first.iter().map(|(n, _)| *n).collect();
    Ok(format!("{} goldens byte-stable: {}", names.len(), names.join(", ")))
}

fn pipeline_shapes() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("3a.nrdf");
    std::fs::write(&path, nrdf::to_bytes(&nrdf::store_reactor(&samples::pwr_3a())).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    let r = nrdf::load_reactor(&nrdf::from_bytes(&bytes).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let view = r.assembly_view_at(AssemblyType::Fuel, 1, 1).ok_or("no fuel assembly at B2")?;
    ensure(view.size() == 17, || format!("assembly is {0}x{0}", view.size()))?;
    let levels = view.axial_levels(AXIAL_POWER, 0.0);
    ensure(levels == 49, || format!("{levels} axial levels"))?;
    let features: Vec<String> = view.features().into_iter().map(String::from).collect();
    ensure(features == [AXIAL_POWER, TOTAL_POWER], || format!("features {features:?}"))?;
    let pins = view.data_pins().len();
    ensure(pins == samples::PWR_FUEL_PINS, || format!("{pins} data-bearing pins"))?;
    Ok(format!("17x17, {levels} levels, {pins} fuel pins, features {features:?}"))
}
