//! File writers: depth images, coverage curves and placement logs.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use meshplace::{Cell, CoverState, ReductionReport, Region};

pub const BLACK: [u8; 3] = [0, 0, 0];
pub const DARK_GRAY: [u8; 3] = [64, 64, 64];
pub const BLOCKED_GRAY: [u8; 3] = [32, 32, 32];
pub const BLUE: [u8; 3] = [0, 0, 255];
pub const RED: [u8; 3] = [255, 0, 0];
pub const WHITE: [u8; 3] = [255, 255, 255];

/// Pixel color for one cell.
///
/// | depth | cell                    | color            |
/// |-------|-------------------------|------------------|
/// | 0     | cover = 1               | black            |
/// | 0     | cover = 0, place = 1    | dark gray 64     |
/// | 0     | cover = 0, place = 0    | gray 32          |
/// | 1     | any                     | blue             |
/// | 2     | any                     | red              |
/// | ≥ 3   | any                     | white            |
pub fn depth_color(cover: bool, place: bool, depth: u16) -> [u8; 3] {
    match (depth, cover, place) {
        (0, true, _) => BLACK,
        (0, false, true) => DARK_GRAY,
        (0, false, false) => BLOCKED_GRAY,
        (1, ..) => BLUE,
        (2, ..) => RED,
        _ => WHITE,
    }
}

/// Binary P6 pixmap bytes, one pixel per cell, rows top to bottom.
pub fn depth_image(region: &Region, state: &CoverState<'_>) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", region.width(), region.height());
    let mut bytes = Vec::with_capacity(header.len() + 3 * region.cell_count());
    bytes.extend_from_slice(header.as_bytes());
    let (cover, place) = (region.cover_flags(), region.place_flags());
    for (i, &d) in state.depths().iter().enumerate() {
        bytes.extend_from_slice(&depth_color(cover[i], place[i], d));
    }
    bytes
}

pub fn render_depth_image(region: &Region, state: &CoverState<'_>, path: &Path) -> Result<()> {
    std::fs::write(path, depth_image(region, state))
        .with_context(|| format!("writing {}", path.display()))
}

/// Parses a P6 pixmap back into `(width, height, pixels)`.
pub fn read_ppm(bytes: &[u8]) -> Result<(usize, usize, Vec<[u8; 3]>)> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            bail!("truncated PPM header");
        }
        fields.push(std::str::from_utf8(&bytes[start..pos])?.to_string());
    }
    pos += 1;
    if fields[0] != "P6" || fields[3] != "255" {
        bail!("expected a P6 pixmap with maxval 255");
    }
    let (w, h): (usize, usize) = (fields[1].parse()?, fields[2].parse()?);
    let data = bytes.get(pos..).ok_or_else(|| anyhow!("missing pixel data"))?;
    if data.len() != 3 * w * h {
        bail!("pixel data has {} bytes, expected {}", data.len(), 3 * w * h);
    }
    Ok((w, h, data.chunks(3).map(|c| [c[0], c[1], c[2]]).collect()))
}

pub const CURVE_HEADER: &str = "router_count,required_fraction,optional_fraction,f,strategy,seed";

/// One CSV row per reduction step, in descending router count.
pub fn coverage_curve_csv(report: &ReductionReport, seed: u64) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for s in &report.steps {
        writeln!(
            out,
            "{},{:.4},{:.4},{},{},{}",
            s.router_count, s.required_fraction, s.optional_fraction, s.f, s.strategy, seed
        )
        .unwrap();
    }
    out
}

pub fn emit_coverage_curve(report: &ReductionReport, seed: u64, path: &Path) -> Result<()> {
    if report.steps.is_empty() {
        bail!("reduction report has no steps");
    }
    std::fs::write(path, coverage_curve_csv(report, seed))
        .with_context(|| format!("writing {}", path.display()))
}

/// Space-separated `x,y` pairs.
pub fn positions_line(positions: &[Cell]) -> String {
    positions.iter().map(Cell::to_string).collect::<Vec<_>>().join(" ")
}

/// One line per reduction step, aligned with the CSV rows.
pub fn positions_log(report: &ReductionReport) -> String {
    let mut out = String::new();
    for s in &report.steps {
        out.push_str(&positions_line(&s.placement.positions));
        out.push('\n');
    }
    out
}

pub fn parse_positions_line(line: &str) -> Result<Vec<Cell>> {
    line.split_whitespace()
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| anyhow!("expected x,y but found {pair:?}"))?;
            Ok(Cell::new(x.parse()?, y.parse()?))
        })
        .collect()
}

pub fn parse_positions(text: &str) -> Result<Vec<Vec<Cell>>> {
    text.lines()
        .enumerate()
        .map(|(n, l)| parse_positions_line(l).with_context(|| format!("positions line {}", n + 1)))
        .collect()
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents.as_ref())
        .with_context(|| format!("writing {}", path.display()))
}
