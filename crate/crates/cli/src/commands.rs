use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use corelens::analysis::{AnalysisResult, ParamValue, Params, Registry};
use corelens::ingest::ingest_csv;
use corelens::model::{AssemblyType, AssemblyView, ModelError, Reactor};
use corelens::nrdf::{self, DumpMode, NrdfFile};
use corelens::render::{self, AssemblyViewKind, AssemblyViewSpec, PlotSeries, Scope};
use corelens::samples;

use crate::{output_path, Cli, CliError, Command, ConvertFormat, Norm, Preset, Select, View};

type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Dump { file, full } => {
            let nrdf = read_nrdf(file)?;
            let mode = if *full { DumpMode::Full } else { DumpMode::Tree };
            print!("{}", nrdf::dump(&nrdf, mode));
            Ok(())
        }
        Command::Info { file } => {
            let reactors = read_reactors(file)?;
            print!("{}", info(&reactors));
            Ok(())
        }
        Command::Convert {
            format: ConvertFormat::Csv {
                csv,
                reactor_spec,
                output,
            },
        } => convert_csv(cli, csv, reactor_spec, output),
        Command::Diff {
            input,
            reference,
            feature,
            pins,
            plot,
            time,
            select,
        } => diff(cli, input, reference, feature, pins, plot.as_deref(), *time, select),
        Command::Cluster {
            file,
            feature,
            k,
            seed,
            max_iter,
            time,
            select,
        } => cluster(cli, file, feature, *k, *seed, *max_iter, *time, select),
        Command::Render { .. } => render_view(cli),
        Command::GenSample { preset, output } => {
            let reactor = match preset {
                Preset::Pwr3a => samples::pwr_3a(),
                Preset::Sfr7 => samples::sfr7(),
            };
            let path = output_path(cli, output);
            let bytes = write_nrdf(&nrdf::store_reactor(&reactor), &path)?;
            println!("wrote {} ({bytes} bytes)", path.display());
            Ok(())
        }
        Command::Bench { pins, levels } => bench(cli, *pins, *levels),
        Command::Serve { port, files } => {
            require_inputs(files)?;
            corelens_server::serve_blocking(files, *port, |addr| {
                println!("serving {} file(s) on http://{addr}", files.len());
            })?;
            Ok(())
        }
    }
}

fn require_inputs(paths: &[PathBuf]) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            return Err(CliError::Io {
                path: p.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            });
        }
    }
    Ok(())
}

fn read_nrdf(path: &Path) -> Result<NrdfFile> {
    let file = File::open(path).map_err(CliError::io(path))?;
    nrdf::read_file(BufReader::new(file)).map_err(CliError::nrdf(path))
}

fn read_reactors(path: &Path) -> Result<Vec<Reactor>> {
    let file = read_nrdf(path)?;
    nrdf::load_reactors(&file).map_err(CliError::nrdf(path))
}

/// Writes through a sibling temporary file so a failed write never leaves a
/// truncated output behind.
fn write_nrdf(file: &NrdfFile, path: &Path) -> Result<u64> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    let mut sink = BufWriter::new(tmp);
    let n = nrdf::write_file(file, &mut sink).map_err(CliError::nrdf(path))?;
    let tmp = sink.into_inner().map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(n)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    std::fs::write(path, text).map_err(CliError::io(path))
}

fn info(reactors: &[Reactor]) -> String {
    let mut out = String::new();
    for r in reactors {
        let n = r.size();
        let _ = writeln!(out, "reactor {:?}", r.name());
        let _ = writeln!(out, "  type: {}", r.reactor_type().as_str());
        let _ = writeln!(out, "  core: {n}x{n}, pitch {} cm", r.lattice().pitch());
        for (t, grid) in r.grids() {
            let _ = writeln!(out, "  grid {t}: {} placed", grid.occupied_count());
        }
        let _ = writeln!(out, "  rod defs: {}", r.rod_defs().len());
        for (i, rod) in r.rod_defs().iter().enumerate() {
            let _ = writeln!(
                out,
                "    [{i}] {} ({}), {} block(s), height {} cm",
                rod.name(),
                rod.kind().as_str(),
                rod.blocks().len(),
                rod.height()
            );
        }
        let _ = writeln!(out, "  assembly defs: {}", r.assembly_defs().len());
        for i in 0..r.assembly_defs().len() {
            let view = r.assembly_view(i).expect("index in range");
            let def = view.def();
            let s = def.size();
            let _ = writeln!(
                out,
                "    [{i}] {} ({}), {s}x{s}, {} pin(s) with data",
                def.name(),
                def.assembly_type(),
                view.data_pins().len()
            );
            for f in view.features() {
                let times = view.times(f);
                let levels = times.first().map_or(0, |&t| view.axial_levels(f, t));
                let times: Vec<String> = times.iter().map(|t| t.to_string()).collect();
                let unit = if levels == 1 { "level" } else { "levels" };
                let _ = writeln!(out, "      {f}: {levels} axial {unit}, times [{}]", times.join(", "));
            }
        }
    }
    out
}

fn convert_csv(cli: &Cli, csv: &Path, skeleton: &Path, output: &Path) -> Result<()> {
    require_inputs(&[csv.to_path_buf(), skeleton.to_path_buf()])?;
    let skel = nrdf::load_reactor(&read_nrdf(skeleton)?).map_err(CliError::nrdf(skeleton))?;
    let source = File::open(csv).map_err(CliError::io(csv))?;
    let reactor = ingest_csv(&skel, BufReader::new(source)).map_err(|source| CliError::Ingest {
        path: csv.to_path_buf(),
        source,
    })?;
    let path = output_path(cli, output);
    let bytes = write_nrdf(&nrdf::store_reactor(&reactor), &path)?;
    println!("wrote {} ({bytes} bytes)", path.display());
    Ok(())
}

fn pick_reactor<'a>(reactors: &'a [Reactor], name: Option<&str>, path: &Path) -> Result<&'a Reactor> {
    match name {
        Some(n) => reactors
            .iter()
            .find(|r| r.name() == n)
            .ok_or_else(|| ModelError::NotFound(format!("no reactor {n:?} in {}", path.display())).into()),
        None => match reactors {
            [one] => Ok(one),
            _ => Err(CliError::Usage(format!(
                "{} holds {} reactors; choose one with --reactor",
                path.display(),
                reactors.len()
            ))),
        },
    }
}

/// The assembly chosen by `select`: the named cell, otherwise the first
/// placed fuel assembly, otherwise the first placed assembly of any type.
fn pick_assembly<'a>(reactor: &'a Reactor, select: &Select) -> Result<(AssemblyView<'a>, String)> {
    let only = select
        .assembly_type
        .as_deref()
        .map(AssemblyType::from_str)
        .transpose()?;
    let cell = match &select.assembly {
        Some(label) => reactor
            .labels()
            .find_cell(label)
            .ok_or_else(|| ModelError::NotFound(format!("no core cell labelled {label:?}")))?,
        None => {
            let mut grids: Vec<_> = reactor.grids().iter().filter(|(t, _)| only.is_none_or(|o| o == **t)).collect();
            grids.sort_by_key(|(t, _)| **t != AssemblyType::Fuel);
            grids
                .iter()
                .find_map(|(_, g)| g.occupied().next().map(|(r, c, _)| (r, c)))
                .ok_or_else(|| ModelError::NotFound(format!("reactor {:?} has no placed assemblies", reactor.name())))?
        }
    };
    let (_, def) = reactor
        .cell_assembly(only, cell.0, cell.1)
        .ok_or_else(|| ModelError::NotFound(format!("no assembly at {}", reactor.labels().cell_label(cell.0, cell.1))))?;
    let view = reactor.assembly_view(def as usize).expect("placed defs exist");
    Ok((view, reactor.labels().cell_label(cell.0, cell.1)))
}

fn save_artifacts(cli: &Cli, result: &AnalysisResult) -> Result<()> {
    if let Some(dir) = &cli.out_dir {
        for path in result.write_artifacts(dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn diff(
    cli: &Cli,
    input: &Path,
    reference: &Path,
    feature: &str,
    pins: &[String],
    plot: Option<&Path>,
    time: f64,
    select: &Select,
) -> Result<()> {
    require_inputs(&[input.to_path_buf(), reference.to_path_buf()])?;
    let a = read_reactors(input)?;
    let b = read_reactors(reference)?;
    let (va, _) = pick_assembly(pick_reactor(&a, select.reactor.as_deref(), input)?, select)?;
    let (vb, cell) = pick_assembly(pick_reactor(&b, select.reactor.as_deref(), reference)?, select)?;

    let mut params = Params::new();
    params.insert("feature".into(), ParamValue::Str(feature.into()));
    params.insert("pins".into(), ParamValue::Str(pins.join(",")));
    params.insert("time".into(), ParamValue::Float(time));
    let result = Registry::with_builtins().run("pin_diff", &[va, vb], &params)?;
    let table = result.table("percent_difference").expect("pin_diff table");

    // One row per axial level, one column per pin.
    let values = table.values();
    let z = result.series.first().map(|s| {
        let mut z: Vec<f64> = s.points.iter().map(|p| p.0).chain(s.missing.iter().copied()).collect();
        z.sort_by(f64::total_cmp);
        z.dedup();
        z
    });
    let mut out = format!("# {feature} % difference, assembly {cell}, t={time}\nlevel,z");
    for pin in table.row_labels() {
        out.push(',');
        out.push_str(pin);
    }
    out.push('\n');
    for (j, level) in table.col_labels().iter().enumerate() {
        let zj = z.as_ref().and_then(|z| z.get(j)).map_or(String::new(), |v| format!("{v:.3}"));
        let _ = write!(out, "{level},{zj}");
        for i in 0..values.rows() {
            let v = values.get(i, j);
            if v.is_nan() {
                out.push_str(",NaN");
            } else {
                let _ = write!(out, ",{v:.6}");
            }
        }
        out.push('\n');
    }
    print!("{out}");

    if let Some(p) = plot {
        let series: Vec<PlotSeries> = result.series.iter().map(PlotSeries::from).collect();
        let svg = render::render_plot(&series, &format!("{feature} % difference"), "z (cm)", "% difference")?;
        let path = output_path(cli, p);
        write_text(&path, &svg)?;
        println!("wrote {}", path.display());
    }
    save_artifacts(cli, &result)
}

#[allow(clippy::too_many_arguments)]
fn cluster(
    cli: &Cli,
    file: &Path,
    feature: &str,
    k: usize,
    seed: u64,
    max_iter: usize,
    time: f64,
    select: &Select,
) -> Result<()> {
    require_inputs(&[file.to_path_buf()])?;
    let reactors = read_reactors(file)?;
    let (view, cell) = pick_assembly(pick_reactor(&reactors, select.reactor.as_deref(), file)?, select)?;
    let as_int = |v: u64, name: &str| {
        i64::try_from(v).map_err(|_| CliError::Usage(format!("--{name} is too large")))
    };
    let mut params = Params::new();
    params.insert("feature".into(), ParamValue::Str(feature.into()));
    params.insert("k".into(), ParamValue::Int(as_int(k as u64, "k")?));
    params.insert("seed".into(), ParamValue::Int(seed as i64));
    params.insert("max_iter".into(), ParamValue::Int(as_int(max_iter as u64, "max-iter")?));
    params.insert("time".into(), ParamValue::Float(time));
    let result = Registry::with_builtins().run("kmeans", &[view], &params)?;

    let assigned = result.table("assignments").expect("kmeans table");
    let inertia = result
        .series
        .first()
        .and_then(|s| s.points.last())
        .map_or(f64::NAN, |p| p.1);
    let steps = result.series.first().map_or(0, |s| s.points.len().saturating_sub(1));
    let mut out = format!("# kmeans k={k} seed={seed} on {feature}, assembly {cell}\n");
    let _ = writeln!(out, "# inertia {inertia:.6} after {steps} update step(s)");
    let mut sizes = vec![0usize; k];
    out.push_str("pin,cluster\n");
    for (i, pin) in assigned.row_labels().iter().enumerate() {
        let c = assigned.values().get(i, 0) as usize;
        if let Some(n) = sizes.get_mut(c) {
            *n += 1;
        }
        let _ = writeln!(out, "{pin},{c}");
    }
    for (c, n) in sizes.iter().enumerate() {
        let _ = writeln!(out, "# cluster {c}: {n} pin(s)");
    }
    print!("{out}");
    save_artifacts(cli, &result)
}

fn render_view(cli: &Cli) -> Result<()> {
    let Command::Render {
        file,
        view,
        output,
        feature,
        level,
        norm,
        time,
        pin,
        z,
        select,
    } = &cli.command
    else {
        unreachable!("called for render only");
    };
    require_inputs(std::slice::from_ref(file))?;
    let reactors = read_reactors(file)?;
    let reactor = pick_reactor(&reactors, select.reactor.as_deref(), file)?;
    let svg = match view {
        View::Core => {
            let only = select
                .assembly_type
                .as_deref()
                .map(AssemblyType::from_str)
                .transpose()?;
            let selected = match &select.assembly {
                Some(label) => Some(
                    reactor
                        .labels()
                        .find_cell(label)
                        .ok_or_else(|| ModelError::NotFound(format!("no core cell labelled {label:?}")))?,
                ),
                None => None,
            };
            render::render_core(reactor, only, selected)?
        }
        View::Assembly => {
            let (v, _) = pick_assembly(reactor, select)?;
            let spec = AssemblyViewSpec {
                kind: if feature.is_some() {
                    AssemblyViewKind::Data
                } else {
                    AssemblyViewKind::Geometry
                },
                axial_level: *level,
                feature: feature.clone(),
                time: *time,
                scope: match norm {
                    Norm::SelectedLevel => Scope::SelectedLevel,
                    Norm::WholeAssembly => Scope::WholeAssembly,
                    Norm::AllAssemblies => Scope::AllAssemblies,
                },
                window: None,
            };
            render::render_assembly(&v, &spec)?
        }
        View::Rod => {
            let (v, _) = pick_assembly(reactor, select)?;
            let label = pin
                .as_deref()
                .ok_or_else(|| CliError::Usage("--pin is required for the rod view".into()))?;
            let (r, c) = v.find_pin(label)?;
            let rod = v
                .rod_at(r, c)
                .ok_or_else(|| ModelError::NotFound(format!("no rod at pin {label}")))?;
            let z = z.unwrap_or_else(|| match (rod.blocks().first(), rod.blocks().last()) {
                (Some(a), Some(b)) => 0.5 * (a.z_start() + b.z_end()),
                _ => 0.0,
            });
            let data = match feature {
                Some(f) => Some(v.axial_series(r, c, f, *time)?),
                None => None,
            };
            render::render_rod(rod, z, data.as_deref())?
        }
    };
    let path = output_path(cli, output);
    write_text(&path, &svg)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn bench(cli: &Cli, pins: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(CliError::Usage("--levels must be positive".into()));
    }
    let assemblies = samples::bench_assemblies_for(pins);
    let t0 = Instant::now();
    let reactor = samples::bench_reactor(assemblies, levels)?;
    let build = t0.elapsed();
    if cli.verbose > 0 {
        eprintln!("built {assemblies} assemblies in {:.3} s", build.as_secs_f64());
    }

    let scratch;
    let path = match &cli.out_dir {
        Some(dir) => dir.join("bench.nrdf"),
        None => {
            scratch = tempfile::tempdir().map_err(CliError::io(Path::new(".")))?;
            scratch.path().join("bench.nrdf")
        }
    };

    let t1 = Instant::now();
    let file = nrdf::store_reactor(&reactor);
    let bytes = write_nrdf(&file, &path)?;
    let write = t1.elapsed();
    drop(file);

    let t2 = Instant::now();
    let back = read_reactors(&path)?;
    let read = t2.elapsed();

    let fuel_pins = assemblies * samples::PWR_FUEL_PINS;
    println!("assemblies: {assemblies}");
    println!("fuel pins: {fuel_pins}");
    println!("axial levels: {levels}");
    println!("file size: {bytes} bytes ({:.1} MB)", bytes as f64 / 1e6);
    println!("write: {:.3} s", write.as_secs_f64());
    println!("read: {:.3} s", read.as_secs_f64());
    if back.len() != 1 || back[0].assembly_defs().len() != assemblies {
        return Err(CliError::Io {
            path,
            source: std::io::Error::other("benchmark file did not read back intact"),
        });
    }
    let _ = std::io::stdout().flush();
    Ok(())
}
