//! Hexagonal QAM performance toolbox.
//!
//! Constructs constellations on the hexagonal lattice, evaluates closed-form
//! symbol-error-probability approximations for AWGN and flat Rayleigh fading,
//! and checks them against an exact polygon-quadrature oracle and a seeded
//! Monte Carlo link simulator.
//!
//! Modules:
//! * [`lattice`] — constellation shapes, neighbour statistics, decision regions
//! * [`gaussian`] — Q-function, Gauss-Hermite quadrature, correction factor
//! * [`sep`] — the closed-form SEP expressions and their parameter sets
//! * [`oracle`] — exact SEP by adaptive integration over decision regions
//! * [`sim`] — seeded, batch-parallel Monte Carlo estimation
//! * [`report`] — SNR sweeps, error columns, published-reference comparison

pub mod error;
pub mod gaussian;
pub mod geom;
pub mod lattice;
pub mod oracle;
pub mod report;
pub mod sep;
pub mod sim;

pub use error::{Error, Result};
pub use gaussian::{
    correction_c_closed, correction_c_numeric, q_func, CorrectionMethod, CorrectionValue,
    QuadratureSpec,
};
pub use geom::Vec2;
pub use lattice::{
    build_constellation, decision_regions, neighbor_stats, Constellation, ConstellationKind,
    DecisionRegion, LatticeIndex, NeighborStats,
};
pub use oracle::{exact_sep_awgn, exact_sep_rayleigh, ExactMethod, ExactSep};
pub use report::{sweep, table2_report, ReferenceTable, SweepOptions, SweepRow, Table2Report};
pub use sep::{
    b_table, resolve_params, sep_3psk_exact, sep_hqam_closed, sep_hqam_corrected,
    sep_hqam_rayleigh, sep_nn_awgn, BSource, SepParams, SnrPoint,
};
pub use sim::{simulate, Channel, SimConfig, SimEstimate};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cap the rayon worker pool. Affects throughput only; all results are
/// combined by deterministic ordered reduction and do not depend on the
/// thread count. Must be called before the first parallel operation to
/// take effect; later calls are ignored.
pub fn set_worker_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}
