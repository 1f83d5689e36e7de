//! Parallel 3D thinning: erode a binary mask to a 1-voxel-wide skeleton
//! while preserving its topology.
//!
//! Each pass runs six subiterations, one per face direction in a fixed
//! order. A subiteration freezes the grid, collects every foreground voxel
//! that (a) has a background face-neighbor in the current direction, (b) is
//! not a curve endpoint, and (c) is a simple point, then walks the
//! candidates in scan order and deletes each one that is *still* simple and
//! not an endpoint in the partially updated grid. The sequential recheck is
//! what makes the parallel collection safe: two adjacent candidates cannot
//! both vanish if removing the first would break the topology at the
//! second. Passes repeat until nothing changes.
//!
//! Simplicity uses the two-number characterization for (26, 6) connectivity:
//! a foreground voxel is simple iff its 3x3x3 neighborhood satisfies both
//! - exactly one 26-connected foreground component (center excluded), and
//! - exactly one 6-connected background component within the 18-neighborhood
//!   that touches a face-neighbor of the center.

use rayon::prelude::*;

use crate::error::Result;
use crate::skeleton::{graph_from_skeleton_voxels, SkeletonGraph};
use crate::volume::{Volume, VolumeData};

/// Flat index of offset (dx, dy, dz) in the 3x3x3 neighborhood cube,
/// each delta in {-1, 0, 1}.
const fn cube_index(dx: i32, dy: i32, dz: i32) -> usize {
    ((dx + 1) + 3 * (dy + 1) + 9 * (dz + 1)) as usize
}

const CENTER: usize = cube_index(0, 0, 0);
const CENTER_BIT: u32 = 1 << CENTER;

const fn cube_offset(i: usize) -> (i32, i32, i32) {
    (
        (i % 3) as i32 - 1,
        ((i / 3) % 3) as i32 - 1,
        (i / 9) as i32 - 1,
    )
}

/// Bitmask of the 18-neighborhood: offsets at city-block distance 1 or 2.
const N18_MASK: u32 = {
    let mut m = 0u32;
    let mut i = 0;
    while i < 27 {
        let (dx, dy, dz) = cube_offset(i);
        let d = dx.abs() + dy.abs() + dz.abs();
        if d == 1 || d == 2 {
            m |= 1 << i;
        }
        i += 1;
    }
    m
};

/// Bitmask of the six face-neighbors.
const FACE_MASK: u32 = {
    let mut m = 0u32;
    let mut i = 0;
    while i < 27 {
        let (dx, dy, dz) = cube_offset(i);
        if dx.abs() + dy.abs() + dz.abs() == 1 {
            m |= 1 << i;
        }
        i += 1;
    }
    m
};

/// 26-adjacency within the cube: positions at Chebyshev distance 1.
const ADJ26: [u32; 27] = {
    let mut table = [0u32; 27];
    let mut i = 0;
    while i < 27 {
        let (ix, iy, iz) = cube_offset(i);
        let mut j = 0;
        while j < 27 {
            if i != j {
                let (jx, jy, jz) = cube_offset(j);
                let dx = (ix - jx).abs();
                let dy = (iy - jy).abs();
                let dz = (iz - jz).abs();
                if dx <= 1 && dy <= 1 && dz <= 1 {
                    table[i] |= 1 << j;
                }
            }
            j += 1;
        }
        i += 1;
    }
    table
};

/// 6-adjacency within the cube, restricted to the 18-neighborhood on both
/// ends (the background component count is defined inside that set).
const ADJ6_N18: [u32; 27] = {
    let mut table = [0u32; 27];
    let mut i = 0;
    while i < 27 {
        if N18_MASK & (1 << i) != 0 {
            let (ix, iy, iz) = cube_offset(i);
            let mut j = 0;
            while j < 27 {
                if N18_MASK & (1 << j) != 0 && i != j {
                    let (jx, jy, jz) = cube_offset(j);
                    let d = (ix - jx).abs() + (iy - jy).abs() + (iz - jz).abs();
                    if d == 1 {
                        table[i] |= 1 << j;
                    }
                }
                j += 1;
            }
        }
        i += 1;
    }
    table
};

/// Subiteration order: +z, -z, +y, -y, +x, -x. Any fixed order yields a
/// valid skeleton; this one is part of the deterministic contract.
const DIRECTIONS: [usize; 6] = [
    cube_index(0, 0, 1),
    cube_index(0, 0, -1),
    cube_index(0, 1, 0),
    cube_index(0, -1, 0),
    cube_index(1, 0, 0),
    cube_index(-1, 0, 0),
];

/// Union of `adj[i]` over the set bits of `set`.
fn dilate(set: u32, adj: &[u32; 27]) -> u32 {
    let mut out = 0;
    let mut rest = set;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= adj[i];
    }
    out
}

/// Number of connected components of `set` under the given adjacency.
fn component_count(mut set: u32, adj: &[u32; 27]) -> u32 {
    let mut count = 0;
    while set != 0 {
        let mut comp = set & set.wrapping_neg(); // lowest set bit as seed
        loop {
            let grown = (comp | dilate(comp, adj)) & set;
            if grown == comp {
                break;
            }
            comp = grown;
        }
        set &= !comp;
        count += 1;
    }
    count
}

/// Number of 6-connected background components in the 18-neighborhood that
/// contain a face-neighbor of the center.
fn background_face_components(mask: u32) -> u32 {
    let mut bg = !mask & N18_MASK;
    let mut count = 0;
    while bg != 0 {
        let mut comp = bg & bg.wrapping_neg();
        loop {
            let grown = (comp | dilate(comp, &ADJ6_N18)) & bg;
            if grown == comp {
                break;
            }
            comp = grown;
        }
        bg &= !comp;
        if comp & FACE_MASK != 0 {
            count += 1;
        }
    }
    count
}

/// Whether deleting the center voxel preserves local topology. `mask` is the
/// 3x3x3 neighborhood as a 27-bit foreground bitmask (bit = `cube_index`).
fn is_simple(mask: u32) -> bool {
    let fg = mask & !CENTER_BIT;
    if component_count(fg, &ADJ26) != 1 {
        return false;
    }
    background_face_components(mask) == 1
}

/// Curve endpoint: at most one foreground voxel among the 26 neighbors.
fn is_endpoint(mask: u32) -> bool {
    (mask & !CENTER_BIT).count_ones() <= 1
}

/// Working grid with a 1-voxel background border so neighborhood reads never
/// need bounds checks.
struct Grid {
    nx: usize,
    ny: usize,
    nz: usize,
    data: Vec<u8>,
    /// Flat-index deltas of the 27 cube offsets.
    deltas: [isize; 27],
}

impl Grid {
    fn from_volume(v: &Volume) -> Self {
        let [dx, dy, dz] = v.dims();
        let (nx, ny, nz) = (dx + 2, dy + 2, dz + 2);
        let src = match v.data() {
            VolumeData::U8(d) => d,
            VolumeData::F32(_) => unreachable!("caller checked dtype"),
        };
        let mut data = vec![0u8; nx * ny * nz];
        for z in 0..dz {
            for y in 0..dy {
                let s = v.index(0, y, z);
                let t = (1) + nx * ((y + 1) + ny * (z + 1));
                data[t..t + dx].copy_from_slice(&src[s..s + dx]);
            }
        }
        let mut deltas = [0isize; 27];
        for (i, d) in deltas.iter_mut().enumerate() {
            let (ox, oy, oz) = cube_offset(i);
            *d = ox as isize + (nx as isize) * (oy as isize + (ny as isize) * oz as isize);
        }
        Grid {
            nx,
            ny,
            nz,
            data,
            deltas,
        }
    }

    fn into_volume(self, dims: [usize; 3], spacing: [f64; 3]) -> Result<Volume> {
        let [dx, dy, dz] = dims;
        let mut out = vec![0u8; dx * dy * dz];
        for z in 0..dz {
            for y in 0..dy {
                let s = 1 + self.nx * ((y + 1) + self.ny * (z + 1));
                let t = dx * (y + dy * z);
                out[t..t + dx].copy_from_slice(&self.data[s..s + dx]);
            }
        }
        Volume::from_u8(dims, spacing, out)
    }

    #[inline]
    fn neighborhood(&self, i: usize) -> u32 {
        let mut mask = 0u32;
        for (bit, &d) in self.deltas.iter().enumerate() {
            let j = (i as isize + d) as usize;
            mask |= (self.data[j] as u32) << bit;
        }
        mask
    }

    /// Candidates for one subiteration, in flat scan order: foreground,
    /// background face-neighbor in `dir`, not an endpoint, simple.
    fn collect_candidates(&self, dir: usize) -> Vec<usize> {
        let (nx, ny) = (self.nx, self.ny);
        let slab = nx * ny;
        let face_delta = self.deltas[dir];
        let per_slice: Vec<Vec<usize>> = (1..self.nz - 1)
            .into_par_iter()
            .map(|z| {
                let mut out = Vec::new();
                for y in 1..ny - 1 {
                    let row = nx * (y + ny * z);
                    for x in 1..nx - 1 {
                        let i = row + x;
                        if self.data[i] == 0 {
                            continue;
                        }
                        if self.data[(i as isize + face_delta) as usize] != 0 {
                            continue; // not a border voxel in this direction
                        }
                        let mask = self.neighborhood(i);
                        if !is_endpoint(mask) && is_simple(mask) {
                            out.push(i);
                        }
                    }
                }
                out
            })
            .collect();
        debug_assert!(slab > 0);
        per_slice.concat()
    }

    /// One full pass of six subiterations. Returns the number of deletions.
    fn pass(&mut self) -> usize {
        let mut deleted = 0;
        for dir in DIRECTIONS {
            let candidates = self.collect_candidates(dir);
            for i in candidates {
                // Earlier deletions in this subiteration may have changed the
                // neighborhood; only delete if doing so is still safe now.
                let mask = self.neighborhood(i);
                if !is_endpoint(mask) && is_simple(mask) {
                    self.data[i] = 0;
                    deleted += 1;
                }
            }
        }
        deleted
    }
}

/// Thin a binary mask to a unit-width, topology-preserving skeleton.
/// Deterministic: the result depends only on the input voxels.
pub fn thin_volume(v: &Volume) -> Result<Volume> {
    v.as_u8()?;
    let mut grid = Grid::from_volume(v);
    while grid.pass() > 0 {}
    grid.into_volume(v.dims(), v.spacing())
}

/// Whether a mask is fully thinned: every foreground voxel is either a curve
/// endpoint or not simple, so no further deletion is possible.
pub fn is_thin(v: &Volume) -> Result<bool> {
    v.as_u8()?;
    let grid = Grid::from_volume(v);
    let (nx, ny, nz) = (grid.nx, grid.ny, grid.nz);
    let ok = (1..nz - 1).into_par_iter().all(|z| {
        for y in 1..ny - 1 {
            for x in 1..nx - 1 {
                let i = x + nx * (y + ny * z);
                if grid.data[i] == 0 {
                    continue;
                }
                let mask = grid.neighborhood(i);
                if !is_endpoint(mask) && is_simple(mask) {
                    return false;
                }
            }
        }
        true
    });
    Ok(ok)
}

/// Thin a mask and read the result back as a skeleton graph.
pub fn skeletonize(v: &Volume) -> Result<SkeletonGraph> {
    graph_from_skeleton_voxels(&thin_volume(v)?)
}
