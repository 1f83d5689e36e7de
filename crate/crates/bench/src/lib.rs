//! Deterministic fixtures for the pipeline benchmarks: synthetic tubular
//! volumes at three sizes, generated once per benchmark setup.

use tubetopo_core::{generate_phantom, PhantomSpec, PhantomTruth};

pub fn fixture(dims: [usize; 3], loops: &[usize], tube_radius: f64, seed: u64) -> PhantomTruth {
    generate_phantom(&PhantomSpec {
        seed,
        dims,
        loops_per_component: loops.to_vec(),
        tube_radius,
        jitter: 0.0,
    })
    .expect("benchmark fixture generates")
}

/// One looped component in a 64^3 volume.
pub fn small() -> PhantomTruth {
    fixture([64, 64, 64], &[1], 2.5, 11)
}

/// Two components, three loops total, in a 96^3 volume.
pub fn medium() -> PhantomTruth {
    fixture([96, 96, 96], &[2, 1], 2.5, 11)
}

/// Five components in a 128-voxel-wide volume with thicker tubes.
pub fn large() -> PhantomTruth {
    fixture([128, 96, 96], &[1, 1, 0, 0, 0], 3.0, 11)
}
