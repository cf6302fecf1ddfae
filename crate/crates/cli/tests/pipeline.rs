use std::path::Path;
use std::process::{Command, Output};

use meshplace::{generate_region, parse_region, serialize_region, CoverState, Region, RegionGenParams};
use meshplace_cli::output::{depth_color, parse_positions, read_ppm, CURVE_HEADER};

fn meshplace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshplace"))
        .args(args)
        .output()
        .expect("spawn meshplace")
}

fn ok(args: &[&str]) -> String {
    let out = meshplace(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read_region(path: &Path) -> Region {
    parse_region(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn small_reduce(dir: &Path) {
    let d = dir.display().to_string();
    ok(&["reduce", "-o", &d, "--seeds", "5", "--grid", "90x80", "--interest-blobs", "5"]);
}

#[test]
fn curve_rows_recompute_from_region_and_positions() {
    let tmp = tempfile::tempdir().unwrap();
    small_reduce(tmp.path());
    let seed = tmp.path().join("seed-5");
    let region = read_region(&seed.join("region.region"));
    let csv = std::fs::read_to_string(seed.join("min-single.csv")).unwrap();
    let logs = parse_positions(&std::fs::read_to_string(seed.join("min-single.positions")).unwrap()).unwrap();

    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CURVE_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), logs.len());
    assert!(rows.len() >= 2);

    for (row, positions) in rows.iter().zip(&logs) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0].parse::<usize>().unwrap(), positions.len());

        // Independent recount by direct distance checks; every cover=0 cell
        // counts towards the optional fraction, placeable or not.
        let (mut req, mut opt) = (0usize, 0usize);
        for y in 0..region.height() {
            for x in 0..region.width() {
                let covered = positions.iter().any(|p| {
                    let (dx, dy) = (x as i64 - p.x as i64, y as i64 - p.y as i64);
                    dx * dx + dy * dy < 64
                });
                let cell = meshplace::Cell::new(x, y);
                if covered && region.cover(cell) {
                    req += 1;
                } else if covered {
                    opt += 1;
                }
            }
        }
        let required = req as f64 / region.interest_count() as f64;
        let optional = opt as f64 / region.optional_count().max(1) as f64;
        assert_eq!(fields[1], format!("{required:.4}"), "row {row}");
        assert_eq!(fields[2], format!("{optional:.4}"), "row {row}");
        assert_eq!(fields[3].parse::<usize>().unwrap(), req);
        assert_eq!(fields[4], "min-single");
        assert_eq!(fields[5], "5");
    }
}

#[test]
fn ppm_maps_back_to_depth_buckets() {
    let tmp = tempfile::tempdir().unwrap();
    small_reduce(tmp.path());
    let seed = tmp.path().join("seed-5");
    let region = read_region(&seed.join("region.region"));
    let csv = std::fs::read_to_string(seed.join("min-single.csv")).unwrap();
    let logs = parse_positions(&std::fs::read_to_string(seed.join("min-single.positions")).unwrap()).unwrap();
    let summary = std::fs::read_to_string(tmp.path().join("summary.txt")).unwrap();
    let nr_opt: usize = summary
        .lines()
        .find(|l| l.starts_with("5 min-single"))
        .and_then(|l| l.split_whitespace().nth(4))
        .unwrap()
        .parse()
        .unwrap();
    let row = csv.lines().skip(1).position(|l| l.starts_with(&format!("{nr_opt},"))).unwrap();
    let state = CoverState::with_routers(&region, 8, &logs[row]).unwrap();

    let (w, h, px) = read_ppm(&std::fs::read(seed.join("min-single.ppm")).unwrap()).unwrap();
    assert_eq!((w, h), (region.width(), region.height()));
    for (i, &p) in px.iter().enumerate() {
        let cell = region.cell_at(i);
        let expect = depth_color(region.cover(cell), region.place(cell), state.depth(cell));
        assert_eq!(p, expect, "pixel {cell}");
    }

    // render reproduces the same image from the logged placement.
    let out = tmp.path().join("again.ppm");
    ok(&[
        "render",
        "--region",
        &seed.join("region.region").display().to_string(),
        "--positions",
        &seed.join("min-single.positions").display().to_string(),
        "--line",
        &row.to_string(),
        "-o",
        &out.display().to_string(),
    ]);
    assert_eq!(std::fs::read(out).unwrap(), std::fs::read(seed.join("min-single.ppm")).unwrap());
}

#[test]
fn empty_seed_list_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = meshplace(&["reduce", "--seeds", "", "-o", &tmp.path().display().to_string()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn bad_region_file_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.region");
    std::fs::write(&path, "3 2\nIIo\nIqI\n").unwrap();
    let out = meshplace(&["oracle", "--region", &path.display().to_string(), "--routers", "1"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn generate_matches_library() {
    let stdout = ok(&["generate", "--grid", "60x50", "--seed", "9", "--interest-blobs", "4"]);
    let params = RegionGenParams {
        width: 60,
        height: 50,
        interest_blob_count: 4,
        seed: 9,
        ..Default::default()
    };
    assert_eq!(stdout.trim_end(), serialize_region(&generate_region(&params).unwrap()));
}

#[test]
fn oracle_subcommand_finds_centre() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("tiny.region");
    std::fs::write(&path, "3 3\nIII\nIII\nIII\n").unwrap();
    let stdout = ok(&["oracle", "--region", &path.display().to_string(), "--routers", "1", "--radius", "2"]);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("best_f=9 interest=9 evaluated=9"));
    assert_eq!(lines.next(), Some("1,1"));
}

#[test]
fn solve_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().display().to_string();
    let stdout = ok(&["solve", "-o", &d, "--seeds", "2", "--grid", "60x60", "--interest-blobs", "3", "--routers", "6"]);
    assert!(stdout.starts_with("routers=6 "), "{stdout}");
    let logs = parse_positions(&std::fs::read_to_string(tmp.path().join("solve.positions")).unwrap()).unwrap();
    assert_eq!(logs.len(), 1);
    assert_eq!(logs[0].len(), 6);
    let region = read_region(&tmp.path().join("region.region"));
    assert!(logs[0].iter().all(|&c| region.is_eligible(c)));
}
