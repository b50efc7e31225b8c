//! Seeded instance generators, reduction verification, and benchmark rows.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::exact::ExactVolume;
use crate::geom::{satisfies, AxisBox, BoxSet, ClassTag, Coord};
use crate::reductions::{
    default_shrink_n_min, reduce_cube_to_unitcube, reduce_hypervolume_to_unitcube,
    reduce_kmp_to_grounded, shrink_split, solve_with_shrink, VolumePlan,
};
use crate::solvers::{
    volume_grid_oracle_capped, volume_sweep, DEFAULT_ORACLE_CELL_CAP,
};

/// Identity of the PRNG scheme, recorded in machine-readable output so
/// instances can be regenerated elsewhere.
pub const GENERATOR_ID: &str = "chacha8:seed64:stream0=global,stream(1+i)=box-i";

/// Parameters of a seeded random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub class: ClassTag,
    pub d: usize,
    pub n: usize,
    pub coord_max: Coord,
    pub seed: u64,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic seeded instance satisfying `spec.class`. Identical specs
/// produce identical instances; each box draws from its own PRNG stream.
pub fn gen_instance(spec: &GenSpec) -> BoxSet {
    assert!(spec.d >= 1, "dimension must be at least 1");
    assert!(spec.coord_max >= 1, "coord_max must be at least 1");
    let grounded_dims = match spec.class {
        ClassTag::Hypervolume => spec.d,
        ClassTag::Grounded(k) => {
            assert!(k <= spec.d, "grounded arity exceeds dimension");
            k
        }
        _ => 0,
    };
    let global_side = match spec.class {
        ClassTag::UnitCube => stream_rng(spec.seed, 0).gen_range(1..=spec.coord_max),
        _ => 0,
    };
    let boxes = (0..spec.n)
        .map(|i| {
            let mut rng = stream_rng(spec.seed, 1 + i as u64);
            let mut lo = Vec::with_capacity(spec.d);
            let mut hi = Vec::with_capacity(spec.d);
            match spec.class {
                ClassTag::Cube | ClassTag::UnitCube => {
                    let side = if spec.class == ClassTag::UnitCube {
                        global_side
                    } else {
                        rng.gen_range(1..=spec.coord_max)
                    };
                    for _ in 0..spec.d {
                        let c = rng.gen_range(0..=spec.coord_max);
                        lo.push(c);
                        hi.push(c + side);
                    }
                }
                _ => {
                    for dim in 0..spec.d {
                        if dim < grounded_dims {
                            lo.push(0);
                            hi.push(rng.gen_range(1..=spec.coord_max));
                        } else {
                            let a = rng.gen_range(0..spec.coord_max);
                            lo.push(a);
                            hi.push(rng.gen_range(a + 1..=spec.coord_max));
                        }
                    }
                }
            }
            AxisBox::new(lo, hi).expect("generated bounds are ordered")
        })
        .collect();
    BoxSet::new(spec.d, boxes).expect("generated boxes match the dimension")
}

/// The reductions the harness can exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    HypToUnitcube,
    CubeToUnitcube,
    KmpToGrounded(usize),
    Shrink,
}

impl ReductionKind {
    pub fn label(&self) -> String {
        match self {
            ReductionKind::HypToUnitcube => "hyp-to-unitcube".into(),
            ReductionKind::CubeToUnitcube => "cube-to-unitcube".into(),
            ReductionKind::KmpToGrounded(k) => format!("kmp-to-grounded(k={k})"),
            ReductionKind::Shrink => "shrink".into(),
        }
    }

    /// Instance class random verification should generate.
    pub fn source_class(&self) -> ClassTag {
        match self {
            ReductionKind::HypToUnitcube => ClassTag::Hypervolume,
            ReductionKind::CubeToUnitcube => ClassTag::Cube,
            ReductionKind::KmpToGrounded(_) | ReductionKind::Shrink => ClassTag::General,
        }
    }
}

/// Outcome of checking one reduction on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub reduction: String,
    pub instance_digest: String,
    pub source_volume: Option<ExactVolume>,
    pub plan_volume: Option<ExactVolume>,
    pub class_ok: bool,
    pub size_ok: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// SHA-256 of the canonical JSON form of the instance (sorted keys,
/// decimal integers), hex-encoded.
pub fn instance_digest(m: &BoxSet) -> String {
    let value = serde_json::to_value(m).expect("instances serialize");
    let text = serde_json::to_string(&value).expect("values render");
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the named reduction for `m`, evaluates it, and checks value,
/// class, and size bounds. The three plan reductions are evaluated with the
/// grid oracle; `shrink` instances are sized far beyond the oracle guard,
/// so that arm uses the sweep solver on both sides.
pub fn verify_reduction(kind: ReductionKind, m: &BoxSet) -> VerifyReport {
    verify_reduction_capped(kind, m, DEFAULT_ORACLE_CELL_CAP)
}

pub fn verify_reduction_capped(kind: ReductionKind, m: &BoxSet, oracle_cap: u64) -> VerifyReport {
    let mut report = VerifyReport {
        reduction: kind.label(),
        instance_digest: instance_digest(m),
        source_volume: None,
        plan_volume: None,
        class_ok: false,
        size_ok: false,
        pass: false,
        reason: None,
    };
    let n_eff = m.without_degenerate().len();

    let fail = |mut r: VerifyReport, reason: String| {
        r.reason = Some(reason);
        r
    };

    if kind == ReductionKind::Shrink {
        report.source_volume = Some(volume_sweep(m));
        let (pieces, note) = match shrink_split(m) {
            Ok(out) => out,
            Err(e) => return fail(report, e.to_string()),
        };
        let d = m.dim();
        let bound = n_eff - n_eff / (3 * d);
        report.size_ok =
            pieces.len() <= 2 * d + 1 && pieces.iter().all(|p| p.len() <= bound);
        report.class_ok = true;
        let mut total = note.unwrap_or_else(ExactVolume::zero);
        for p in &pieces {
            total += volume_sweep(p);
        }
        report.plan_volume = Some(total);
        report.pass = report.size_ok
            && report.class_ok
            && report.plan_volume == report.source_volume;
        if !report.pass && report.reason.is_none() {
            report.reason = Some("shrink output violates its contract".into());
        }
        return report;
    }

    let oracle = |m: &BoxSet| volume_grid_oracle_capped(m, oracle_cap);
    report.source_volume = match oracle(m) {
        Ok(v) => Some(v),
        Err(e) => return fail(report, e.to_string()),
    };
    let built = match kind {
        ReductionKind::HypToUnitcube => reduce_hypervolume_to_unitcube(m),
        ReductionKind::CubeToUnitcube => reduce_cube_to_unitcube(m),
        ReductionKind::KmpToGrounded(k) => reduce_kmp_to_grounded(m, k),
        ReductionKind::Shrink => unreachable!(),
    };
    let plan: VolumePlan = match built {
        Ok(p) => p,
        Err(e) => return fail(report, e.to_string()),
    };

    report.class_ok = plan.validate().is_ok();
    report.size_ok = match kind {
        ReductionKind::HypToUnitcube => {
            plan.terms.len() == 2 && plan.terms.iter().all(|t| t.instance.len() <= n_eff + 1)
        }
        ReductionKind::CubeToUnitcube => {
            plan.terms.len() == 2 * n_eff
                && plan.terms.iter().all(|t| t.instance.len() <= n_eff)
        }
        ReductionKind::KmpToGrounded(k) => {
            plan.terms.len() == 1 << k
                && plan.terms.iter().all(|t| {
                    t.instance.dim() == m.dim() + k && t.instance.len() <= (2 * k + 1) * n_eff
                })
        }
        ReductionKind::Shrink => unreachable!(),
    };
    match plan.evaluate_with(oracle) {
        Ok(v) => report.plan_volume = Some(v),
        Err(e) => return fail(report, e.to_string()),
    }
    report.pass =
        report.class_ok && report.size_ok && report.plan_volume == report.source_volume;
    report
}

/// Solver selector for benchmark rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchAlgo {
    Auto,
    Sweep,
    Oracle { cap: u64 },
    Shrink { n_min: Option<usize> },
}

impl BenchAlgo {
    fn label(&self) -> &'static str {
        match self {
            BenchAlgo::Auto => "auto",
            BenchAlgo::Sweep => "sweep",
            BenchAlgo::Oracle { .. } => "oracle",
            BenchAlgo::Shrink { .. } => "shrink",
        }
    }
}

/// One benchmark request: a solver, a list of instance specs, repetitions.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algo: BenchAlgo,
    pub specs: Vec<GenSpec>,
    pub reps: u32,
}

/// One benchmark measurement. Guard violations become rows with `error`
/// set; the run continues.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub algo: String,
    pub class: String,
    pub d: usize,
    pub n: usize,
    pub coord_max: Coord,
    pub seed: u64,
    pub rep: u32,
    pub nanos: u128,
    pub volume: Option<ExactVolume>,
    pub error: Option<String>,
    pub generator: String,
}

/// Runs every config and returns machine-readable rows with nanosecond
/// wall times. Volumes are deterministic; timings are whatever the clock
/// says.
pub fn bench_suite(configs: &[BenchConfig]) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for cfg in configs {
        for spec in &cfg.specs {
            let m = gen_instance(spec);
            for rep in 0..cfg.reps {
                let start = Instant::now();
                let outcome: Result<ExactVolume> = match cfg.algo {
                    BenchAlgo::Auto | BenchAlgo::Sweep => Ok(volume_sweep(&m)),
                    BenchAlgo::Oracle { cap } => volume_grid_oracle_capped(&m, cap),
                    BenchAlgo::Shrink { n_min } => solve_with_shrink(
                        &m,
                        |p| Ok(volume_sweep(p)),
                        n_min.unwrap_or_else(|| default_shrink_n_min(spec.d)),
                    ),
                };
                let nanos = start.elapsed().as_nanos();
                let (volume, error) = match outcome {
                    Ok(v) => (Some(v), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                rows.push(BenchRow {
                    algo: cfg.algo.label().into(),
                    class: spec.class.to_string(),
                    d: spec.d,
                    n: spec.n,
                    coord_max: spec.coord_max,
                    seed: spec.seed,
                    rep,
                    nanos,
                    volume,
                    error,
                    generator: GENERATOR_ID.into(),
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::classify;

    #[test]
    fn generator_is_deterministic() {
        let spec = GenSpec {
            class: ClassTag::UnitCube,
            d: 2,
            n: 5,
            coord_max: 100,
            seed: 7,
        };
        assert_eq!(gen_instance(&spec), gen_instance(&spec));
        let other = GenSpec { seed: 8, ..spec };
        assert_ne!(gen_instance(&spec), gen_instance(&other));
    }

    #[test]
    fn generator_empty_instance() {
        let spec = GenSpec {
            class: ClassTag::Hypervolume,
            d: 2,
            n: 0,
            coord_max: 10,
            seed: 1,
        };
        assert!(gen_instance(&spec).is_empty());
    }

    #[test]
    fn generator_respects_class() {
        for (class, d) in [
            (ClassTag::General, 3),
            (ClassTag::Hypervolume, 2),
            (ClassTag::Cube, 3),
            (ClassTag::UnitCube, 2),
            (ClassTag::Grounded(1), 3),
            (ClassTag::Grounded(2), 3),
        ] {
            for seed in 0..5 {
                let m = gen_instance(&GenSpec {
                    class,
                    d,
                    n: 4,
                    coord_max: 9,
                    seed,
                });
                assert!(
                    classify(&m).contains(&class),
                    "{class} not satisfied by seed {seed}: {m:?}"
                );
            }
        }
    }

    #[test]
    fn digest_is_stable_and_injective_enough() {
        let a = gen_instance(&GenSpec {
            class: ClassTag::General,
            d: 2,
            n: 3,
            coord_max: 10,
            seed: 0,
        });
        let b = gen_instance(&GenSpec {
            class: ClassTag::General,
            d: 2,
            n: 3,
            coord_max: 10,
            seed: 1,
        });
        assert_eq!(instance_digest(&a), instance_digest(&a));
        assert_ne!(instance_digest(&a), instance_digest(&b));
        assert_eq!(instance_digest(&a).len(), 64);
    }

    #[test]
    fn verify_examples() {
        let m = crate::geom::BoxSet::new(
            2,
            vec![
                AxisBox::from_intervals(&[(0, 1), (0, 2)]).unwrap(),
                AxisBox::from_intervals(&[(0, 2), (0, 1)]).unwrap(),
            ],
        )
        .unwrap();
        let r = verify_reduction(ReductionKind::HypToUnitcube, &m);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.source_volume, Some(ExactVolume::from(3i64)));
        assert_eq!(r.plan_volume, Some(ExactVolume::from(3i64)));

        let m = crate::geom::BoxSet::new(
            1,
            vec![
                AxisBox::from_intervals(&[(0, 1)]).unwrap(),
                AxisBox::from_intervals(&[(2, 3)]).unwrap(),
            ],
        )
        .unwrap();
        let r = verify_reduction(ReductionKind::KmpToGrounded(1), &m);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.source_volume, Some(ExactVolume::from(2i64)));

        // class gate: cube reduction on a non-cube instance
        let m = crate::geom::BoxSet::new(
            2,
            vec![AxisBox::from_intervals(&[(0, 1), (0, 2)]).unwrap()],
        )
        .unwrap();
        let r = verify_reduction(ReductionKind::CubeToUnitcube, &m);
        assert!(!r.pass);
        assert!(r.reason.unwrap().contains("cube"));
    }

    #[test]
    fn verify_shrink_on_seeded_instance() {
        let m = gen_instance(&GenSpec {
            class: ClassTag::General,
            d: 2,
            n: 48,
            coord_max: 64,
            seed: 3,
        });
        let r = verify_reduction(ReductionKind::Shrink, &m);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn bench_rows_are_deterministic_and_guarded() {
        let spec = GenSpec {
            class: ClassTag::General,
            d: 2,
            n: 30,
            coord_max: 40,
            seed: 5,
        };
        let rows = bench_suite(&[
            BenchConfig {
                algo: BenchAlgo::Sweep,
                specs: vec![spec],
                reps: 3,
            },
            BenchConfig {
                algo: BenchAlgo::Oracle { cap: 1000 },
                specs: vec![spec],
                reps: 1,
            },
        ]);
        assert_eq!(rows.len(), 4);
        let volumes: Vec<_> = rows[..3].iter().map(|r| r.volume.clone()).collect();
        assert!(volumes.windows(2).all(|w| w[0] == w[1]));
        let guard_row = &rows[3];
        assert!(guard_row.volume.is_none());
        assert!(guard_row.error.as_ref().unwrap().contains("too large"));
    }

    #[test]
    fn bench_sweep_matches_oracle_rows() {
        let spec = GenSpec {
            class: ClassTag::General,
            d: 3,
            n: 8,
            coord_max: 12,
            seed: 11,
        };
        let rows = bench_suite(&[
            BenchConfig {
                algo: BenchAlgo::Sweep,
                specs: vec![spec],
                reps: 1,
            },
            BenchConfig {
                algo: BenchAlgo::Oracle {
                    cap: DEFAULT_ORACLE_CELL_CAP,
                },
                specs: vec![spec],
                reps: 1,
            },
        ]);
        assert_eq!(rows[0].volume, rows[1].volume);
    }
}
