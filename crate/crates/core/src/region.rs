//! Gridded region model.
//!
//! A region is the bounding rectangle of the area to serve, split into square
//! elementary cells. Each cell carries two independent flags: `cover` (the
//! cell requires signal) and `place` (a router may be installed there).
//! Coordinates are `x` = column, `y` = row, origin at the top-left.
//!
//! # Text format
//!
//! ```text
//! <width> <height>
//! <row 0: width characters>
//! ...
//! <row height-1>
//! ```
//!
//! | char | cover | place | class               |
//! |------|-------|-------|---------------------|
//! | `I`  | 1     | 1     | `Interest`          |
//! | `i`  | 1     | 0     | `InterestNoPlace`   |
//! | `o`  | 0     | 1     | `OptionalPlaceable` |
//! | `x`  | 0     | 0     | `OptionalBlocked`   |

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::SolverRng;

/// A grid cell position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    /// Requires coverage, router allowed.
    Interest,
    /// Requires coverage, no router allowed.
    InterestNoPlace,
    /// Coverage optional, router allowed.
    OptionalPlaceable,
    /// Coverage optional, no router allowed.
    OptionalBlocked,
}

impl CellClass {
    pub fn from_flags(cover: bool, place: bool) -> Self {
        match (cover, place) {
            (true, true) => CellClass::Interest,
            (true, false) => CellClass::InterestNoPlace,
            (false, true) => CellClass::OptionalPlaceable,
            (false, false) => CellClass::OptionalBlocked,
        }
    }

    /// `(cover, place)`.
    pub fn flags(self) -> (bool, bool) {
        match self {
            CellClass::Interest => (true, true),
            CellClass::InterestNoPlace => (true, false),
            CellClass::OptionalPlaceable => (false, true),
            CellClass::OptionalBlocked => (false, false),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            CellClass::Interest => 'I',
            CellClass::InterestNoPlace => 'i',
            CellClass::OptionalPlaceable => 'o',
            CellClass::OptionalBlocked => 'x',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(CellClass::Interest),
            'i' => Some(CellClass::InterestNoPlace),
            'o' => Some(CellClass::OptionalPlaceable),
            'x' => Some(CellClass::OptionalBlocked),
            _ => None,
        }
    }
}

/// Immutable grid with per-cell `cover` and `place` flags, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    width: usize,
    height: usize,
    cover: Vec<bool>,
    place: Vec<bool>,
}

impl Region {
    /// Builds a region from row-major flag vectors.
    ///
    /// Rejects mismatched dimensions and regions without any cell that both
    /// requires coverage and accepts a router.
    pub fn new(width: usize, height: usize, cover: Vec<bool>, place: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "region dimensions must be positive, got {width}x{height}"
            )));
        }
        let n = width * height;
        if cover.len() != n || place.len() != n {
            return Err(Error::InvalidParameter(format!(
                "flag matrices must hold {n} cells (cover {}, place {})",
                cover.len(),
                place.len()
            )));
        }
        if !cover.iter().zip(&place).any(|(&c, &p)| c && p) {
            return Err(Error::NoEligibleCell);
        }
        Ok(Self {
            width,
            height,
            cover,
            place,
        })
    }

    /// Builds a region where every cell has the same class.
    pub fn uniform(width: usize, height: usize, class: CellClass) -> Result<Self> {
        let (c, p) = class.flags();
        Self::new(width, height, vec![c; width * height], vec![p; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        cell.y * self.width + cell.x
    }

    #[inline]
    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn check_bounds(&self, cell: Cell) -> Result<()> {
        if cell.x < self.width && cell.y < self.height {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                x: cell.x as i64,
                y: cell.y as i64,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Row-major cover flags.
    pub fn cover_flags(&self) -> &[bool] {
        &self.cover
    }

    /// Row-major place flags.
    pub fn place_flags(&self) -> &[bool] {
        &self.place
    }

    #[inline]
    pub fn cover(&self, cell: Cell) -> bool {
        self.cover[self.index(cell)]
    }

    #[inline]
    pub fn place(&self, cell: Cell) -> bool {
        self.place[self.index(cell)]
    }

    /// A router may sit here: coverage required and placement allowed.
    #[inline]
    pub fn is_eligible(&self, cell: Cell) -> bool {
        let i = self.index(cell);
        self.cover[i] && self.place[i]
    }

    pub fn class(&self, cell: Cell) -> CellClass {
        let i = self.index(cell);
        CellClass::from_flags(self.cover[i], self.place[i])
    }

    /// Number of cells requiring coverage (`Σ Cover`).
    pub fn interest_count(&self) -> usize {
        self.cover.iter().filter(|&&c| c).count()
    }

    /// Number of cells with `cover = 0`, placeable or not.
    pub fn optional_count(&self) -> usize {
        self.cell_count() - self.interest_count()
    }

    /// Cells with `cover = 1` and `place = 1`, row-major.
    pub fn eligible_cells(&self) -> Vec<Cell> {
        (0..self.cell_count())
            .filter(|&i| self.cover[i] && self.place[i])
            .map(|i| self.cell_at(i))
            .collect()
    }
}

/// Class of the cell at column `x`, row `y`.
pub fn cell_class(region: &Region, x: usize, y: usize) -> Result<CellClass> {
    let cell = Cell::new(x, y);
    region.check_bounds(cell)?;
    Ok(region.class(cell))
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses the `.region` text format. Lines and columns in errors are 1-based.
/// A single trailing newline and `\r\n` line endings are tolerated.
pub fn parse_region(text: &str) -> Result<Region> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "missing header line \"width height\""))?;
    let mut fields = header.split_whitespace();
    let mut dim = |name: &str| -> Result<usize> {
        let tok = fields
            .next()
            .ok_or_else(|| parse_err(1, 1, format!("header is missing {name}")))?;
        let col = header.find(tok).map_or(1, |p| p + 1);
        match tok.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(parse_err(1, col, format!("{name} must be a positive integer, got {tok:?}"))),
        }
    };
    let width = dim("width")?;
    let height = dim("height")?;
    if fields.next().is_some() {
        return Err(parse_err(1, 1, "header has extra fields; expected \"width height\""));
    }

    let mut cover = Vec::with_capacity(width * height);
    let mut place = Vec::with_capacity(width * height);
    let mut rows = 0;
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        if rows == height {
            if line.trim().is_empty() {
                continue;
            }
            return Err(parse_err(lineno, 1, format!("expected {height} rows, found more")));
        }
        let mut count = 0;
        for (col, ch) in line.chars().enumerate() {
            if count == width {
                return Err(parse_err(lineno, col + 1, format!("row longer than width {width}")));
            }
            let class = CellClass::from_char(ch)
                .ok_or_else(|| parse_err(lineno, col + 1, format!("unknown cell character {ch:?}")))?;
            let (c, p) = class.flags();
            cover.push(c);
            place.push(p);
            count += 1;
        }
        if count != width {
            return Err(parse_err(
                lineno,
                count + 1,
                format!("row has {count} cells, expected {width}"),
            ));
        }
        rows += 1;
    }
    if rows != height {
        return Err(parse_err(rows + 2, 1, format!("expected {height} rows, found {rows}")));
    }
    Region::new(width, height, cover, place)
}

/// Canonical text form: header plus rows, newline-separated, no trailing newline.
pub fn serialize_region(region: &Region) -> String {
    let mut out = String::with_capacity(region.cell_count() + region.height + 16);
    out.push_str(&format!("{} {}", region.width, region.height));
    for y in 0..region.height {
        out.push('\n');
        for x in 0..region.width {
            out.push(region.class(Cell::new(x, y)).to_char());
        }
    }
    out
}

/// Parameters for the random blob-based region generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGenParams {
    pub width: usize,
    pub height: usize,
    pub interest_blob_count: usize,
    /// Inclusive `[min, max]` radius in cells.
    pub interest_blob_radius_range: (usize, usize),
    pub prohibited_blob_count: usize,
    pub prohibited_blob_radius_range: (usize, usize),
    pub seed: u64,
}

impl Default for RegionGenParams {
    fn default() -> Self {
        Self {
            width: 200,
            height: 200,
            interest_blob_count: 12,
            interest_blob_radius_range: (8, 20),
            prohibited_blob_count: 5,
            prohibited_blob_radius_range: (4, 10),
            seed: 42,
        }
    }
}

impl RegionGenParams {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
        }
        for (name, (lo, hi)) in [
            ("interest", self.interest_blob_radius_range),
            ("prohibited", self.prohibited_blob_radius_range),
        ] {
            if lo == 0 || lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "{name} blob radius range must satisfy 0 < min <= max, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// A disc stamped by the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blob {
    pub center_x: i64,
    pub center_y: i64,
    pub radius: i64,
    /// `true` for an interest blob, `false` for a prohibited one.
    pub interest: bool,
}

impl Blob {
    pub fn contains(&self, x: i64, y: i64) -> bool {
        let (dx, dy) = (x - self.center_x, y - self.center_y);
        dx * dx + dy * dy < self.radius * self.radius
    }
}

/// Draws the blob sequence for `params`: interest blobs first, then
/// prohibited ones. Centres are uniform over the grid.
pub fn generate_blobs(params: &RegionGenParams) -> Result<Vec<Blob>> {
    params.validate()?;
    let mut rng = SolverRng::seed_from_u64(params.seed);
    let mut draw = |(lo, hi): (usize, usize), interest: bool| Blob {
        center_x: rng.random_range(0..params.width) as i64,
        center_y: rng.random_range(0..params.height) as i64,
        radius: rng.random_range(lo..=hi) as i64,
        interest,
    };
    let mut blobs = Vec::with_capacity(params.interest_blob_count + params.prohibited_blob_count);
    for _ in 0..params.interest_blob_count {
        blobs.push(draw(params.interest_blob_radius_range, true));
    }
    for _ in 0..params.prohibited_blob_count {
        blobs.push(draw(params.prohibited_blob_radius_range, false));
    }
    Ok(blobs)
}

/// Generates a region from circular blobs.
///
/// Background cells are optional and placeable. Interest blobs are stamped
/// first, then prohibited blobs overwrite whatever they touch. A blob of
/// radius `R` centred at `c` holds the cells with `|p - c|² < R²`.
pub fn generate_region(params: &RegionGenParams) -> Result<Region> {
    let blobs = generate_blobs(params)?;
    let (w, h) = (params.width, params.height);
    let mut cover = vec![false; w * h];
    let mut place = vec![true; w * h];
    for blob in &blobs {
        let r = blob.radius;
        for y in (blob.center_y - r + 1).max(0)..(blob.center_y + r).min(h as i64) {
            for x in (blob.center_x - r + 1).max(0)..(blob.center_x + r).min(w as i64) {
                if blob.contains(x, y) {
                    let i = y as usize * w + x as usize;
                    cover[i] = blob.interest;
                    place[i] = blob.interest;
                }
            }
        }
    }
    Region::new(w, h, cover, place)
}
