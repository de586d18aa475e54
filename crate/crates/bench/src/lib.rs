//! Benchmark-only crate; see `benches/`.

use blowlab_core::{random_band_limited, Lattice, VelocityField};

/// Random band-limited field used as benchmark input.
pub fn bench_field(n: usize, seed: u64) -> VelocityField {
    let lattice = Lattice::cube(n).expect("even n >= 8");
    let kmax = lattice.k_unit() * (n / 4) as f64;
    random_band_limited(lattice, 1.0, kmax, 1.0, seed).expect("band contains lattice points")
}
