//! Disc geometry and cover-depth bookkeeping.
//!
//! A router at cell `p` covers every in-bounds cell `q` with
//! `|q - p|² < r²` (strict). [`CoverState`] keeps the per-cell depth (how many
//! routers cover the cell) and the fitness, the count of interest cells with
//! depth at least one, up to date under add, remove and move operations.

use crate::error::{Error, Result};
use crate::region::{Cell, Region};

/// Lattice offsets of the open disc `dx² + dy² < r²`, ordered by `dy` then `dx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscOffsets {
    radius: u32,
    offsets: Vec<(i32, i32)>,
}

impl DiscOffsets {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    #[inline]
    pub fn contains(&self, dx: i32, dy: i32) -> bool {
        let r = self.radius as i64;
        (dx as i64).pow(2) + (dy as i64).pow(2) < r * r
    }
}

pub fn disc_offsets(r: u32) -> Result<DiscOffsets> {
    if r < 1 {
        return Err(Error::InvalidParameter("disc radius must be at least 1".into()));
    }
    let ri = r as i32;
    let r2 = (r as i64) * (r as i64);
    let mut offsets = Vec::new();
    for dy in -(ri - 1)..ri {
        for dx in -(ri - 1)..ri {
            if (dx as i64).pow(2) + (dy as i64).pow(2) < r2 {
                offsets.push((dx, dy));
            }
        }
    }
    Ok(DiscOffsets { radius: r, offsets })
}

/// Coverage fractions for one placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageMetrics {
    pub required_fraction: f64,
    pub optional_fraction: f64,
    pub covered_interest_cells: usize,
    pub router_count: usize,
}

/// Cover depth matrix plus cached fitness for one region and radius.
#[derive(Debug, Clone)]
pub struct CoverState<'r> {
    region: &'r Region,
    offsets: DiscOffsets,
    depth: Vec<u16>,
    fitness: usize,
}

impl<'r> CoverState<'r> {
    /// Empty state: no routers, zero depth everywhere.
    pub fn new(region: &'r Region, radius: u32) -> Result<Self> {
        Ok(Self {
            region,
            offsets: disc_offsets(radius)?,
            depth: vec![0; region.cell_count()],
            fitness: 0,
        })
    }

    pub fn with_routers(region: &'r Region, radius: u32, positions: &[Cell]) -> Result<Self> {
        let mut state = Self::new(region, radius)?;
        for &p in positions {
            state.add_router(p)?;
        }
        Ok(state)
    }

    pub fn region(&self) -> &'r Region {
        self.region
    }

    pub fn offsets(&self) -> &DiscOffsets {
        &self.offsets
    }

    pub fn radius(&self) -> u32 {
        self.offsets.radius
    }

    /// Cached fitness: interest cells with depth ≥ 1.
    pub fn fitness(&self) -> usize {
        self.fitness
    }

    pub fn depth(&self, cell: Cell) -> u16 {
        self.depth[self.region.index(cell)]
    }

    /// Row-major depth matrix.
    pub fn depths(&self) -> &[u16] {
        &self.depth
    }

    /// In-bounds cells of the disc centred at `center`, as row-major indices.
    pub fn disc_cells(&self, center: Cell) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = (center.x as i64, center.y as i64);
        let w = self.region.width();
        self.offsets.offsets.iter().filter_map(move |&(dx, dy)| {
            let (x, y) = (cx + dx as i64, cy + dy as i64);
            self.region
                .contains(x, y)
                .then(|| y as usize * w + x as usize)
        })
    }

    /// Adds a router at `pos`; returns the fitness gain (cells going 0 → 1).
    pub fn add_router(&mut self, pos: Cell) -> Result<i64> {
        self.region.check_bounds(pos)?;
        for i in self.disc_cells(pos) {
            if self.depth[i] == u16::MAX {
                let c = self.region.cell_at(i);
                return Err(Error::Inconsistent {
                    x: c.x,
                    y: c.y,
                    message: "cover depth overflow".into(),
                });
            }
        }
        let cover = self.region.cover_flags();
        let mut gained = 0i64;
        let (cx, cy) = (pos.x as i64, pos.y as i64);
        let w = self.region.width();
        for &(dx, dy) in &self.offsets.offsets {
            let (x, y) = (cx + dx as i64, cy + dy as i64);
            if !self.region.contains(x, y) {
                continue;
            }
            let i = y as usize * w + x as usize;
            if self.depth[i] == 0 && cover[i] {
                gained += 1;
            }
            self.depth[i] += 1;
        }
        self.fitness += gained as usize;
        Ok(gained)
    }

    /// Removes a router at `pos`; returns the fitness change (≤ 0).
    ///
    /// Fails without mutating if some disc cell already has depth zero, which
    /// means no router was accounted at `pos`.
    pub fn remove_router(&mut self, pos: Cell) -> Result<i64> {
        self.region.check_bounds(pos)?;
        if let Some(i) = self.disc_cells(pos).find(|&i| self.depth[i] == 0) {
            let c = self.region.cell_at(i);
            return Err(Error::Inconsistent {
                x: c.x,
                y: c.y,
                message: format!("removing router at {pos} would make depth negative"),
            });
        }
        let cover = self.region.cover_flags();
        let mut lost = 0i64;
        let (cx, cy) = (pos.x as i64, pos.y as i64);
        let w = self.region.width();
        for &(dx, dy) in &self.offsets.offsets {
            let (x, y) = (cx + dx as i64, cy + dy as i64);
            if !self.region.contains(x, y) {
                continue;
            }
            let i = y as usize * w + x as usize;
            self.depth[i] -= 1;
            if self.depth[i] == 0 && cover[i] {
                lost += 1;
            }
        }
        self.fitness -= lost as usize;
        Ok(-lost)
    }

    /// Cells only in the `from` disc and cells only in the `to` disc.
    fn symmetric_difference(&self, from: Cell, to: Cell) -> (Vec<usize>, Vec<usize>) {
        let shift_x = to.x as i64 - from.x as i64;
        let shift_y = to.y as i64 - from.y as i64;
        let r = self.offsets.radius as i64;
        let disjoint = shift_x * shift_x + shift_y * shift_y >= 4 * r * r;
        let w = self.region.width();
        let collect = |center: Cell, sign: i64| -> Vec<usize> {
            let (cx, cy) = (center.x as i64, center.y as i64);
            self.offsets
                .offsets
                .iter()
                .filter(|&&(dx, dy)| {
                    // Offset relative to the other disc's centre.
                    let ox = dx as i64 - sign * shift_x;
                    let oy = dy as i64 - sign * shift_y;
                    disjoint || ox * ox + oy * oy >= r * r
                })
                .filter_map(|&(dx, dy)| {
                    let (x, y) = (cx + dx as i64, cy + dy as i64);
                    self.region
                        .contains(x, y)
                        .then(|| y as usize * w + x as usize)
                })
                .collect()
        };
        (collect(from, 1), collect(to, -1))
    }

    /// Fitness change of moving a router from `from` to `to`, without applying it.
    pub fn move_delta(&self, from: Cell, to: Cell) -> Result<i64> {
        self.region.check_bounds(from)?;
        self.region.check_bounds(to)?;
        if from == to {
            return Ok(0);
        }
        let (leaving, entering) = self.symmetric_difference(from, to);
        let cover = self.region.cover_flags();
        let mut delta = 0i64;
        for &i in &leaving {
            match self.depth[i] {
                0 => {
                    let c = self.region.cell_at(i);
                    return Err(Error::Inconsistent {
                        x: c.x,
                        y: c.y,
                        message: format!("no router accounted at {from}"),
                    });
                }
                1 if cover[i] => delta -= 1,
                _ => {}
            }
        }
        for &i in &entering {
            if self.depth[i] == 0 && cover[i] {
                delta += 1;
            }
        }
        Ok(delta)
    }

    /// Moves a router from `from` to `to`, touching only the cells whose
    /// depth changes. Equivalent to `remove_router(from)` then `add_router(to)`.
    pub fn move_router(&mut self, from: Cell, to: Cell) -> Result<i64> {
        let delta = self.move_delta(from, to)?;
        if from == to {
            return Ok(0);
        }
        let (leaving, entering) = self.symmetric_difference(from, to);
        if let Some(&i) = entering.iter().find(|&&i| self.depth[i] == u16::MAX) {
            let c = self.region.cell_at(i);
            return Err(Error::Inconsistent {
                x: c.x,
                y: c.y,
                message: "cover depth overflow".into(),
            });
        }
        for i in leaving {
            self.depth[i] -= 1;
        }
        for i in entering {
            self.depth[i] += 1;
        }
        self.fitness = (self.fitness as i64 + delta) as usize;
        Ok(delta)
    }

    /// Recomputes fitness from the depth matrix.
    pub fn fitness_full(&self) -> usize {
        self.depth
            .iter()
            .zip(self.region.cover_flags())
            .filter(|&(&d, &c)| d > 0 && c)
            .count()
    }

    pub fn metrics(&self, router_count: usize) -> CoverageMetrics {
        let cover = self.region.cover_flags();
        let optional_covered = self
            .depth
            .iter()
            .zip(cover)
            .filter(|&(&d, &c)| d > 0 && !c)
            .count();
        let interest = self.region.interest_count();
        let optional = self.region.optional_count();
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        CoverageMetrics {
            required_fraction: ratio(self.fitness, interest),
            optional_fraction: ratio(optional_covered, optional),
            covered_interest_cells: self.fitness,
            router_count,
        }
    }
}

/// Connected components of the router graph where two routers are linked
/// iff their Euclidean distance is strictly below `link_radius`.
pub fn connectivity_components(positions: &[Cell], link_radius: u32) -> Result<usize> {
    if link_radius < 1 {
        return Err(Error::InvalidParameter("link radius must be at least 1".into()));
    }
    let n = positions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let limit = (link_radius as i64).pow(2);
    let mut components = n;
    for i in 0..n {
        for j in i + 1..n {
            let dx = positions[i].x as i64 - positions[j].x as i64;
            let dy = positions[i].y as i64 - positions[j].y as i64;
            if dx * dx + dy * dy < limit {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
        }
    }
    Ok(components)
}
