use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use corelens::ingest::CSV_HEADER;
use corelens::nrdf;
use corelens::samples;

const BIN: &str = env!("CARGO_BIN_EXE_corelens");

fn corelens(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = corelens(dir, args);
    assert_eq!(o.status.code(), Some(0), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

fn sample(dir: &Path, preset: &str) -> PathBuf {
    let name = format!("{preset}.nrdf");
    ok(dir, &["gen-sample", "--preset", preset, "-o", &name]);
    dir.join(name)
}

#[test]
fn convert_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let skel = nrdf::to_bytes(&nrdf::store_reactor(&samples::pwr_3a_skeleton())).unwrap();
    std::fs::write(dir.path().join("skel.nrdf"), skel).unwrap();
    let mut csv = CSV_HEADER.join(",") + "\n";
    for (k, z) in [5.0, 15.0, 25.0].iter().enumerate() {
        for pin in ["B,2", "H,7", "E,4"] {
            csv.push_str(&format!("{pin},{z},0,Axial Power,{},0.01,W/cm\n", 1.0 + k as f64 * 0.1));
        }
    }
    std::fs::write(dir.path().join("pins.csv"), csv).unwrap();

    let args = |out: &'static str| ["convert", "csv", "pins.csv", "--reactor-spec", "skel.nrdf", "-o", out];
    ok(dir.path(), &args("one.nrdf"));
    ok(dir.path(), &args("two.nrdf"));
    let one = std::fs::read(dir.path().join("one.nrdf")).unwrap();
    let two = std::fs::read(dir.path().join("two.nrdf")).unwrap();
    assert_eq!(one, two);

    let r = nrdf::load_reactor(&nrdf::from_bytes(&one).unwrap()).unwrap();
    let v = r.assembly_view(0).unwrap();
    assert_eq!(v.data_pins().len(), 3);
    assert_eq!(v.axial_levels("Axial Power", 0.0), 3);
}

#[test]
fn convert_reports_bad_csv_as_file_error() {
    let dir = tempfile::tempdir().unwrap();
    let skel = nrdf::to_bytes(&nrdf::store_reactor(&samples::pwr_3a_skeleton())).unwrap();
    std::fs::write(dir.path().join("skel.nrdf"), skel).unwrap();
    std::fs::write(dir.path().join("bad.csv"), "row,col\nB,2\n").unwrap();
    let o = corelens(dir.path(), &["convert", "csv", "bad.csv", "--reactor-spec", "skel.nrdf", "-o", "x.nrdf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
    assert!(!dir.path().join("x.nrdf").exists());
}

#[test]
fn bad_magic_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.nrdf"), b"HDF\x89 not this format").unwrap();
    for cmd in ["info", "dump"] {
        let o = corelens(dir.path(), &[cmd, "bad.nrdf"]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("not an NRDF file"), "{}", stderr(&o));
        assert!(stdout(&o).is_empty());
    }
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = corelens(dir.path(), &["info", "nowhere.nrdf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere.nrdf"));
}

#[test]
fn info_on_3a_sample() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    let out = ok(dir.path(), &["info", "3a.nrdf"]);
    assert!(out.contains("type: PWR"), "{out}");
    assert!(out.contains("17x17"), "{out}");
    assert!(out.contains("264 pin(s) with data"), "{out}");
    assert!(out.contains("Axial Power: 49 axial levels"), "{out}");
    assert!(out.contains("Total Power: 1 axial level,"), "{out}");
}

#[test]
fn diff_with_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    let out = ok(
        dir.path(),
        &["diff", "3a.nrdf", "3a.nrdf", "--feature", "Axial Power", "--pins", "B2,E4,H7", "--plot", "d.svg"],
    );
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#') && !l.starts_with("wrote")).collect();
    assert_eq!(rows[0], "level,z,B2,E4,H7");
    assert_eq!(rows.len(), 1 + 49);
    for row in &rows[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 5);
        for c in &cells[2..] {
            assert_eq!(c.parse::<f64>().unwrap(), 0.0, "{row}");
        }
    }
    let svg = std::fs::read_to_string(dir.path().join("d.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn diff_against_perturbed_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    let perturbed = samples::pwr_3a_perturbed(7);
    std::fs::write(dir.path().join("p.nrdf"), nrdf::to_bytes(&nrdf::store_reactor(&perturbed)).unwrap()).unwrap();
    let out = ok(dir.path(), &["--out-dir", "arts", "diff", "p.nrdf", "3a.nrdf", "--feature", "Axial Power", "--pins", "H7"]);

    let reference = samples::pwr_3a();
    let expected = corelens::analysis::pin_diff(
        &perturbed.assembly_view(0).unwrap(),
        &reference.assembly_view(0).unwrap(),
        "Axial Power",
        &["H7".to_owned()],
        0.0,
    )
    .unwrap();
    let table = expected.table("percent_difference").unwrap();
    let printed: Vec<f64> = out
        .lines()
        .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(printed.len(), table.col_labels().len());
    assert!(printed.iter().any(|v| *v != 0.0));
    for (j, p) in printed.iter().enumerate() {
        assert!((p - table.values().get(0, j)).abs() <= 5e-7, "level {}", j + 1);
    }
    let arts: Vec<_> = std::fs::read_dir(dir.path().join("arts")).unwrap().collect();
    assert_eq!(arts.len(), 1);
}

#[test]
fn shape_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    sample(dir.path(), "sfr7");
    let o = corelens(dir.path(), &["diff", "3a.nrdf", "sfr7.nrdf", "--feature", "Axial Power"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("shape"), "{}", stderr(&o));
}

#[test]
fn unknown_pin_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    let o = corelens(dir.path(), &["diff", "3a.nrdf", "3a.nrdf", "--feature", "Axial Power", "--pins", "Z99"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &[],
        &["diff", "a.nrdf"],
        &["render", "x.nrdf", "--view", "side", "-o", "x.svg"],
        &["gen-sample", "--preset", "9z", "-o", "x.nrdf"],
    ] {
        let o = corelens(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let help = ok(dir.path(), &["--help"]);
    for cmd in ["dump", "info", "convert", "diff", "cluster", "render", "gen-sample", "bench", "serve"] {
        assert!(help.contains(cmd), "{cmd} missing from help");
    }
    assert!(ok(dir.path(), &["--version"]).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn cluster_prints_assignments_and_writes_artifact() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    let args = ["--out-dir", "out", "cluster", "3a.nrdf", "--feature", "Axial Power", "--k", "3", "--seed", "4"];
    let first = ok(dir.path(), &args);
    let assignments = |s: &str| -> Vec<String> {
        s.lines()
            .skip_while(|l| *l != "pin,cluster")
            .skip(1)
            .take_while(|l| !l.starts_with('#'))
            .map(str::to_owned)
            .collect()
    };
    let a = assignments(&first);
    assert_eq!(a.len(), samples::PWR_FUEL_PINS);
    let clusters: std::collections::BTreeSet<&str> = a.iter().map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(clusters.len(), 3);
    assert_eq!(assignments(&ok(dir.path(), &args)), a);

    let csv: Vec<_> = std::fs::read_dir(dir.path().join("out")).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!csv.is_empty());
    let body = std::fs::read_to_string(&csv[0]).unwrap();
    assert_eq!(body.lines().skip(1).map(str::to_owned).collect::<Vec<_>>(), a);

    let o = corelens(dir.path(), &["cluster", "3a.nrdf", "--feature", "Axial Power", "--k", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn render_every_view() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "3a");
    sample(dir.path(), "sfr7");
    ok(dir.path(), &["render", "3a.nrdf", "--view", "core", "-o", "core.svg"]);
    ok(dir.path(), &["render", "sfr7.nrdf", "--view", "core", "-o", "hex.svg"]);
    ok(dir.path(), &["render", "3a.nrdf", "--view", "assembly", "-o", "geom.svg"]);
    ok(
        dir.path(),
        &["render", "3a.nrdf", "--view", "assembly", "--feature", "Axial Power", "--level", "28", "--norm", "whole-assembly", "-o", "data.svg"],
    );
    ok(dir.path(), &["render", "3a.nrdf", "--view", "rod", "--pin", "H7", "--feature", "Axial Power", "-o", "rod.svg"]);

    let reactor = samples::pwr_3a();
    let core = std::fs::read_to_string(dir.path().join("core.svg")).unwrap();
    assert_eq!(core, corelens::render::render_core(&reactor, None, None).unwrap());
    let hex = std::fs::read_to_string(dir.path().join("hex.svg")).unwrap();
    assert_eq!(hex, corelens::render::render_core(&samples::sfr7(), None, None).unwrap());
    for f in ["geom.svg", "data.svg", "rod.svg"] {
        let s = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"), "{f}");
    }

    let o = corelens(dir.path(), &["render", "3a.nrdf", "--view", "assembly", "--feature", "Axial Power", "--level", "50", "-o", "x.svg"]);
    assert_eq!(o.status.code(), Some(3));
    let o = corelens(dir.path(), &["render", "3a.nrdf", "--view", "rod", "-o", "x.svg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_dir_resolves_relative_outputs() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--out-dir", "nested/o", "gen-sample", "--preset", "sfr7", "-o", "s.nrdf"]);
    assert!(dir.path().join("nested/o/s.nrdf").is_file());
}

#[test]
fn dump_tree_and_full() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "sfr7");
    let tree = ok(dir.path(), &["dump", "sfr7.nrdf"]);
    let full = ok(dir.path(), &["dump", "--full", "sfr7.nrdf"]);
    assert!(tree.starts_with('/'));
    assert!(tree.contains("reactor_type:str=\"SFR\""));
    assert!(full.len() > tree.len());
    let file = nrdf::from_bytes(&std::fs::read(dir.path().join("sfr7.nrdf")).unwrap()).unwrap();
    assert_eq!(full, nrdf::dump(&file, nrdf::DumpMode::Full));
}

#[test]
fn small_bench_reports_timings() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["--out-dir", ".", "bench", "--pins", "600", "--levels", "5"]);
    assert!(out.contains("assemblies: 3"), "{out}");
    assert!(out.contains("fuel pins: 792"), "{out}");
    for key in ["write: ", "read: ", "file size: "] {
        assert!(out.contains(key), "{out}");
    }
    let size = std::fs::metadata(dir.path().join("bench.nrdf")).unwrap().len();
    assert!(out.contains(&format!("file size: {size} bytes")), "{out}");
}

#[test]
fn serve_answers_http() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path(), "sfr7");
    let mut child = Command::new(BIN)
        .current_dir(dir.path())
        .args(["serve", "--port", "0", "sfr7.nrdf"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_owned();

    let mut conn = TcpStream::connect(&addr).unwrap();
    write!(conn, "GET /api/files HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    conn.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();

    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"sfr7\""), "{response}");
    assert!(response.contains("\"schema_version\":1"), "{response}");
}

#[test]
fn serve_rejects_bad_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.nrdf"), b"nope").unwrap();
    let o = corelens(dir.path(), &["serve", "--port", "0", "bad.nrdf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not an NRDF file"));
}
