//! End-to-end checks of the command-line surface: exit codes, file
//! formats, and byte-identical output across runs and thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steinerflow"))
}

fn run_in(dir: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.current_dir(dir).args(args);
    if let Some(t) = threads {
        cmd.env("STEINERFLOW_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn demo_writes_polygon_and_reports_area() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["demo", "ushape", "--out", "u.poly"], None);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("area 7"), "stdout: {stdout}");
    let text = std::fs::read_to_string(dir.path().join("u.poly")).unwrap();
    let p = steinerflow::io::parse_polygon(&text).unwrap();
    assert_eq!(p.area(), 7.0);
}

#[test]
fn demo_unknown_name_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["demo", "heptagon"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symmetrize_missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["symmetrize", "--input", "nope.poly"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symmetrize_ushape_centers_strips() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["demo", "ushape", "--out", "u.poly"], None).status.success());
    let out = run_in(
        dir.path(),
        &["symmetrize", "--input", "u.poly", "--angle", "0", "--out", "sym.csv", "--strips", "32"],
        None,
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("area before 7"), "stdout: {stdout}");
    let csv = std::fs::read_to_string(dir.path().join("sym.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("y_mid,intervals"));
    for line in lines {
        let intervals = line.split(',').nth(1).unwrap();
        // single centered interval per strip: "-a:a"
        let (a, b) = intervals.split_once(':').unwrap();
        assert_eq!(intervals.matches(':').count(), 1, "line: {line}");
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a + b).abs() < 1e-12, "not centered: {line}");
    }
}

#[test]
fn flow_disk_passes_and_is_thread_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "flow",
        "--demo",
        "disk64",
        "--directions",
        "2",
        "--horizon",
        "2",
        "--snapshots",
        "7",
        "--strips",
        "48",
        "--grid-resolution",
        "48",
        "--out",
        "flow.csv",
        "--dump-torsion-field",
        "torsion.txt",
    ];
    let out1 = run_in(dir.path(), &args, Some("1"));
    assert!(out1.status.success(), "stderr: {}", String::from_utf8_lossy(&out1.stderr));
    // field dump: rectangular text grid of torsion values
    let dump = std::fs::read_to_string(dir.path().join("torsion.txt")).unwrap();
    let widths: Vec<usize> = dump.lines().map(|l| l.split(' ').count()).collect();
    assert!(widths.len() > 10 && widths.iter().all(|&w| w == widths[0]));
    assert!(dump.split_whitespace().all(|v| v.parse::<f64>().unwrap() >= 0.0));
    let csv1 = std::fs::read(dir.path().join("flow.csv")).unwrap();
    let out4 = run_in(dir.path(), &args, Some("4"));
    assert!(out4.status.success());
    let csv4 = std::fs::read(dir.path().join("flow.csv")).unwrap();
    assert_eq!(csv1, csv4, "snapshot CSV differs across thread counts");
    let text = String::from_utf8(csv1).unwrap();
    assert!(text.starts_with("t_global,phase,area,n_walls,lambda,torsion,x,y\n"));
    assert_eq!(text.lines().count(), 8);
    let stdout = String::from_utf8(out1.stdout).unwrap();
    assert!(stdout.contains("monotonicity: PASS"), "stdout: {stdout}");
}

#[test]
fn flow_ushape_logs_wall_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "flow",
            "--demo",
            "ushape",
            "--directions",
            "1",
            "--angle",
            "0",
            "--horizon",
            "1.5",
            "--snapshots",
            "9",
            "--strips",
            "64",
            "--grid-resolution",
            "64",
        ],
        None,
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("wall start"), "stdout: {stdout}");
    assert!(stdout.contains("wall end"), "stdout: {stdout}");
    // the wall begins at the merge batch containing t = ln 2
    let line = stdout.lines().find(|l| l.contains("wall start")).unwrap();
    assert!(line.contains("t_flow=0.693"), "line: {line}");
}

#[test]
fn diagram_corpus_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    assert!(run_in(
        dir.path(),
        &["demo", "lshape", "--out", "corpus/l.poly"],
        None
    )
    .status
    .success());
    // a two-component domain: two equal disks
    let two_disks = {
        use steinerflow::geometry::{Point, Polygon};
        let ring = |cx: f64| -> Vec<Point> {
            (0..32)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
                    Point::new(cx + t.cos(), t.sin())
                })
                .collect()
        };
        Polygon::new(vec![ring(0.0), ring(3.0)]).unwrap()
    };
    steinerflow::io::write_polygon(&corpus.join("two_disks.poly"), &two_disks).unwrap();

    let out = run_in(
        dir.path(),
        &[
            "diagram",
            "--corpus",
            "corpus",
            "--out-csv",
            "diagram.csv",
            "--out-svg",
            "diagram.svg",
            "--family-n",
            "2",
            "--snapshots",
            "4",
            "--directions",
            "2",
            "--horizon",
            "2",
            "--strips",
            "48",
            "--grid-resolution",
            "64",
        ],
        None,
    );
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("diagram.csv")).unwrap();
    assert!(csv.starts_with("x,y,d,source,t_global,n\n"));
    // both computed and analytic-family points are present
    assert!(csv.contains("computed"));
    assert!(csv.contains("analytic-family"));
    // the two-disk flow starts near (0.5, 0.5)
    let points = steinerflow::io::parse_diagram_csv(&csv).unwrap();
    let near_half = points.iter().any(|p| {
        matches!(p.source, steinerflow::diagram::PointSource::Computed { t_global } if t_global == 0.0)
            && (p.x - 0.5).abs() < 0.05
            && (p.y - 0.5).abs() < 0.05
    });
    assert!(near_half, "no computed point near (0.5, 0.5)");
    let svg = std::fs::read_to_string(dir.path().join("diagram.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    // verify accepts the produced CSV
    let ok = run_in(dir.path(), &["verify", "--input", "diagram.csv"], None);
    assert!(ok.status.success(), "stdout: {}", String::from_utf8_lossy(&ok.stdout));

    // and rejects a doctored point breaking Kohler-Jobin
    let mut bad = csv.clone();
    bad.push_str("0.9,0.2,2,computed,0.5,\n");
    std::fs::write(dir.path().join("bad.csv"), &bad).unwrap();
    let rej = run_in(dir.path(), &["verify", "--input", "bad.csv"], None);
    assert_eq!(rej.status.code(), Some(1));
}

#[test]
fn diagram_empty_corpus_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("empty")).unwrap();
    let out = run_in(
        dir.path(),
        &["diagram", "--corpus", "empty", "--out-csv", "d.csv", "--out-svg", "d.svg"],
        None,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert_eq!(csv, "x,y,d,source,t_global,n\n");
}

#[test]
fn bounds_rows_match_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["bounds", "--samples", "2", "--out-csv", "b.csv", "--out-svg", "b.svg"],
        None,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "x,kj,h_lower,bfnt");
    assert_eq!(lines[1], "0,0,0,0");
    let row1: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row1[0], 1.0);
    assert_eq!(row1[1], 1.0);
    assert_eq!(row1[2], 1.0);
    assert!((row1[3] - 1.1794).abs() < 1e-4);
    // byte-identical across repeat runs
    let again = run_in(dir.path(), &["bounds", "--samples", "2", "--out-csv", "b2.csv", "--out-svg", "b2.svg"], None);
    assert!(again.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("b.csv")).unwrap(),
        std::fs::read(dir.path().join("b2.csv")).unwrap()
    );
}

#[test]
fn config_file_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "n_strips = 16\n").unwrap();
    assert!(run_in(dir.path(), &["demo", "two_rects", "--out", "t.poly"], None).status.success());
    // config file sets 16 strips
    let out = run_in(
        dir.path(),
        &["symmetrize", "--input", "t.poly", "--out", "s.csv", "--config", "run.cfg"],
        None,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
    // explicit flag wins over the file
    let out = run_in(
        dir.path(),
        &[
            "symmetrize",
            "--input",
            "t.poly",
            "--out",
            "s2.csv",
            "--config",
            "run.cfg",
            "--strips",
            "8",
        ],
        None,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("s2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
}
