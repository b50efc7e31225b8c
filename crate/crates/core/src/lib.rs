//! Exact-arithmetic toolkit for the volume of a union of axis-aligned
//! integer boxes, its special-case instance classes (hypervolume, cubes,
//! unit cubes, grounded), and executable volume-preserving reductions
//! between those classes.
//!
//! Coordinates are signed 64-bit integers and volumes are arbitrary-
//! precision integers, so every identity in this crate holds with
//! tolerance zero. The brute-force grid oracle in [`solvers`] is the
//! trusted ground truth; the sweep solvers and every reduction are checked
//! against it exactly.

pub mod error;
pub mod exact;
pub mod geom;
pub mod harness;
pub mod io;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
pub use exact::ExactVolume;
pub use geom::{
    box_volume, classify, clip_box, endpoints, normalize_translate, satisfies, AxisBox, BoxSet,
    ClassTag, Coord,
};
pub use harness::{
    bench_suite, gen_instance, instance_digest, verify_reduction, verify_reduction_capped,
    BenchAlgo, BenchConfig, BenchRow, GenSpec, ReductionKind, VerifyReport, GENERATOR_ID,
};
pub use reductions::{
    build_staircase, default_shrink_n_min, evaluate_plan, reduce_cube_to_unitcube,
    reduce_hypervolume_to_unitcube, reduce_kmp_to_grounded, reshape_cube, shrink_split,
    shrink_split_with_min, solve_with_shrink, PlanTerm, StaircaseParts, VolumePlan,
};
pub use solvers::{
    volume, volume_grid_oracle, volume_grid_oracle_capped, volume_interval_union, volume_sweep,
    Algo, DEFAULT_ORACLE_CELL_CAP,
};
