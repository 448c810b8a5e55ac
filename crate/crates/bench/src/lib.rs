//! Shared setup for the kernel benchmarks; see `benches/kernels.rs`.

use lamebic::{EllipticModulus, Grid, LameConfig};

pub fn default_grid() -> Grid {
    Grid::new(40.0, 8001).expect("valid grid")
}

pub fn default_lame() -> LameConfig {
    LameConfig::new(2, EllipticModulus::new(0.5).expect("valid m")).expect("valid j")
}
