//! Volume-preserving reductions between instance classes.
//!
//! Every reduction emits a [`VolumePlan`]: a constant plus signed, weighted
//! sub-instances whose solver-evaluated combination equals the source
//! instance's volume. One evaluator works for all of them, and each plan is
//! checkable against the brute-force oracle with tolerance zero.
//!
//! The staircase construction is the pivot of the grounding reduction: it
//! turns a chain of interval endpoints into interior-disjoint planar boxes
//! so that interval containment becomes box containment. `shrink_split` is
//! the self-reduction that cuts an instance into a bounded number of
//! strictly smaller pieces of the same class.

use crate::error::{Error, Result};
use crate::exact::ExactVolume;
use crate::geom::{
    box_volume, classify, endpoints, normalize_translate, satisfies, AxisBox, BoxSet, ClassTag,
    Coord,
};

/// One signed term of a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanTerm {
    pub coeff: i64,
    pub instance: BoxSet,
}

/// Constant plus signed sub-instances; evaluating the plan with any exact
/// solver yields the source instance's volume. Every term instance must
/// satisfy `claimed_class`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumePlan {
    pub constant: ExactVolume,
    pub terms: Vec<PlanTerm>,
    pub claimed_class: ClassTag,
}

impl VolumePlan {
    /// Checks that every term instance satisfies the claimed class.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            if !satisfies(&t.instance, &self.claimed_class) {
                return Err(Error::PlanIntegrity(format!(
                    "term {i} does not satisfy class {}",
                    self.claimed_class
                )));
            }
        }
        Ok(())
    }

    /// `constant + sum(coeff * solver(instance))` without class validation.
    pub fn evaluate_with<F>(&self, mut solver: F) -> Result<ExactVolume>
    where
        F: FnMut(&BoxSet) -> Result<ExactVolume>,
    {
        let mut total = self.constant.clone();
        for t in &self.terms {
            total += solver(&t.instance)? * t.coeff;
        }
        Ok(total)
    }
}

/// Validates the plan's class claim, then evaluates it with `solver`.
pub fn evaluate_plan<F>(plan: &VolumePlan, solver: F) -> Result<ExactVolume>
where
    F: FnMut(&BoxSet) -> Result<ExactVolume>,
{
    plan.validate()?;
    plan.evaluate_with(solver)
}

/// The staircase construction over one endpoint chain `0 = x_1 < ... < x_m`:
/// boxes `A_i = [m-i-1, m-i] x [x_i, x_{i+1}]`, the grounded envelope boxes
/// `C_[x_j,x_k] = [0, m-j] x [0, x_k]`, and the sandwich sets `t0`/`t1`.
#[derive(Debug, Clone)]
pub struct StaircaseParts {
    xs: Vec<Coord>,
    /// `A_1 ... A_{m-1}`, pairwise interior-disjoint.
    pub a_boxes: Vec<AxisBox>,
    /// Union of all `C_[x_i,x_i]`; measure-0 intersection with the staircase.
    pub t0: BoxSet,
    /// Union of all `C_[x_i,x_{i+1}]`; covers the staircase exactly.
    pub t1: BoxSet,
}

impl StaircaseParts {
    /// Number of endpoints.
    pub fn m(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[Coord] {
        &self.xs
    }

    /// Embedding of the interval `[x_j, x_k]` (1-based, `j <= k <= m`).
    pub fn embed(&self, j: usize, k: usize) -> Result<AxisBox> {
        let m = self.m();
        if j == 0 || k < j || k > m {
            return Err(Error::InvalidParameter(format!(
                "embed indices must satisfy 1 <= j <= k <= {m}, got ({j},{k})"
            )));
        }
        AxisBox::from_intervals(&[(0, (m - j) as Coord), (0, self.xs[k - 1])])
    }
}

/// Builds the staircase for a strictly increasing chain starting at 0.
pub fn build_staircase(xs: &[Coord]) -> Result<StaircaseParts> {
    if xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "staircase needs at least two endpoints".into(),
        ));
    }
    if xs[0] != 0 {
        return Err(Error::InvalidParameter(
            "staircase endpoints must start at 0".into(),
        ));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "staircase endpoints must be strictly increasing".into(),
        ));
    }
    let m = xs.len();
    let mut a_boxes = Vec::with_capacity(m - 1);
    for i in 1..m {
        // A_i = [m-i-1, m-i] x [x_i, x_{i+1}] with i 1-based
        a_boxes.push(AxisBox::from_intervals(&[
            ((m - i - 1) as Coord, (m - i) as Coord),
            (xs[i - 1], xs[i]),
        ])?);
    }
    let parts = StaircaseParts {
        xs: xs.to_vec(),
        a_boxes,
        t0: BoxSet::empty(2)?,
        t1: BoxSet::empty(2)?,
    };
    let t0 = BoxSet::new(
        2,
        (1..=m)
            .map(|i| parts.embed(i, i))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let t1 = BoxSet::new(
        2,
        (1..m)
            .map(|i| parts.embed(i, i + 1))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(StaircaseParts { t0, t1, ..parts })
}

/// Extends every grounded box to a cube of side `delta` (the largest
/// coordinate), growing only away from the positive orthant, and isolates
/// the orthant with one extra cube `C = [0,delta]^d`:
/// `vol(m) = delta^d + vol(cubes) - vol(cubes + C)`.
pub fn reduce_hypervolume_to_unitcube(m: &BoxSet) -> Result<VolumePlan> {
    if !satisfies(m, &ClassTag::Hypervolume) {
        return Err(Error::NotInClass {
            required: ClassTag::Hypervolume,
        });
    }
    let d = m.dim();
    let pruned = m.without_degenerate();
    if pruned.is_empty() {
        return Ok(VolumePlan {
            constant: ExactVolume::zero(),
            terms: Vec::new(),
            claimed_class: ClassTag::UnitCube,
        });
    }
    let delta: Coord = pruned
        .boxes()
        .iter()
        .flat_map(|b| b.hi().iter().copied())
        .max()
        .expect("non-empty");
    let cubes: Vec<AxisBox> = pruned
        .boxes()
        .iter()
        .map(|b| {
            let lo = b
                .hi()
                .iter()
                .map(|&h| h.checked_sub(delta).ok_or(Error::CoordinateOverflow))
                .collect::<Result<Vec<_>>>()?;
            AxisBox::new(lo, b.hi().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let with_c = {
        let mut v = cubes.clone();
        v.push(AxisBox::new(vec![0; d], vec![delta; d])?);
        v
    };
    Ok(VolumePlan {
        constant: ExactVolume::from(delta).pow(d as u32),
        terms: vec![
            PlanTerm {
                coeff: 1,
                instance: BoxSet::new(d, cubes)?,
            },
            PlanTerm {
                coeff: -1,
                instance: BoxSet::new(d, with_c)?,
            },
        ],
        claimed_class: ClassTag::UnitCube,
    })
}

/// Reshapes cube `b` into a cube with `c`'s side length whose intersection
/// with `c` is unchanged. Requires `side(b) >= side(c)`. Per dimension the
/// result anchors at `b`'s low side, at its high side, or covers `c`.
pub fn reshape_cube(b: &AxisBox, c: &AxisBox) -> Result<AxisBox> {
    if b.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: b.dim(),
        });
    }
    let s = c.side(0);
    if b.side(0) < s {
        return Err(Error::InvalidParameter(
            "reshape target must not be larger than the source cube".into(),
        ));
    }
    let mut lo = Vec::with_capacity(b.dim());
    let mut hi = Vec::with_capacity(b.dim());
    for i in 0..b.dim() {
        let (bl, bh) = (b.lo()[i] as i128, b.hi()[i] as i128);
        let (cl, ch) = (c.lo()[i] as i128, c.hi()[i] as i128);
        let (a, z) = if bl >= cl {
            (bl, bl + s)
        } else if bh <= ch {
            (bh - s, bh)
        } else {
            (cl, ch)
        };
        // the result stays inside [bl, bh] union [cl, ch], so it fits
        lo.push(Coord::try_from(a).map_err(|_| Error::CoordinateOverflow)?);
        hi.push(Coord::try_from(z).map_err(|_| Error::CoordinateOverflow)?);
    }
    AxisBox::new(lo, hi)
}

/// Peels the smallest cube `C` off the instance `n` times. Each round
/// reshapes every other cube to `C`'s side without changing its restriction
/// to `C`, so the pair of terms `(+1, reshaped + C)`, `(-1, reshaped)`
/// contributes exactly the volume covered by `C` and nothing else.
pub fn reduce_cube_to_unitcube(m: &BoxSet) -> Result<VolumePlan> {
    if !satisfies(m, &ClassTag::Cube) {
        return Err(Error::NotInClass {
            required: ClassTag::Cube,
        });
    }
    let d = m.dim();
    let mut cubes: Vec<AxisBox> = m.without_degenerate().boxes().to_vec();
    let mut terms = Vec::with_capacity(2 * cubes.len());
    while !cubes.is_empty() {
        let idx = (0..cubes.len())
            .min_by_key(|&i| (cubes[i].side(0), i))
            .expect("non-empty");
        let c = cubes[idx].clone();
        let reshaped: Vec<AxisBox> = cubes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, b)| reshape_cube(b, &c))
            .collect::<Result<Vec<_>>>()?;
        let mut with_c = reshaped.clone();
        with_c.push(c);
        terms.push(PlanTerm {
            coeff: 1,
            instance: BoxSet::new(d, with_c)?,
        });
        terms.push(PlanTerm {
            coeff: -1,
            instance: BoxSet::new(d, reshaped)?,
        });
        cubes.remove(idx);
    }
    Ok(VolumePlan {
        constant: ExactVolume::zero(),
        terms,
        claimed_class: ClassTag::UnitCube,
    })
}

/// Reduces a general instance in dimension `d` to `2^k` instances of
/// `Grounded(2k)` in dimension `d+k`.
///
/// Each of the first `k` dimensions is doubled through its staircase: a box
/// becomes the product of its per-dimension envelope boxes `C` and its
/// untouched trailing projection. The staircase region is isolated by the
/// sandwich sets lifted to dimension `d+k`, and inclusion-exclusion over
/// which dimensions use the covering sandwich (`t1`) rather than the flat
/// one (`t0`) recovers the volume:
/// `vol(m) = vol(A) + sum over S of (-1)^|S| vol(D_S + C_M)`.
pub fn reduce_kmp_to_grounded(m: &BoxSet, k: usize) -> Result<VolumePlan> {
    let d = m.dim();
    if k < 1 || k > d {
        return Err(Error::InvalidParameter(format!(
            "grounding arity k={k} out of range 1..={d}"
        )));
    }
    let claimed = ClassTag::Grounded(2 * k);
    let pruned = m.without_degenerate();
    if pruned.is_empty() {
        return Ok(VolumePlan {
            constant: ExactVolume::zero(),
            terms: Vec::new(),
            claimed_class: claimed,
        });
    }
    let (inst, _) = normalize_translate(&pruned)?;

    let staircases: Vec<StaircaseParts> = (0..k)
        .map(|i| build_staircase(&endpoints(&inst, i)))
        .collect::<Result<Vec<_>>>()?;

    let max_coord = inst
        .boxes()
        .iter()
        .flat_map(|b| b.hi().iter().copied())
        .max()
        .expect("non-empty");
    let delta = staircases
        .iter()
        .map(|s| s.m() as Coord)
        .fold(max_coord, Coord::max);

    let target_dim = d + k;
    let omega = (0 as Coord, delta);

    // C_B = C^(1) x ... x C^(k) x trailing projection of B
    let mut c_m = Vec::with_capacity(inst.len());
    for b in inst.boxes() {
        let mut iv = Vec::with_capacity(target_dim);
        for (i, st) in staircases.iter().enumerate() {
            let j = st.xs().binary_search(&b.lo()[i]).expect("endpoint present") + 1;
            let kk = st.xs().binary_search(&b.hi()[i]).expect("endpoint present") + 1;
            let c = st.embed(j, kk)?;
            iv.push((c.lo()[0], c.hi()[0]));
            iv.push((c.lo()[1], c.hi()[1]));
        }
        for i in k..d {
            iv.push((b.lo()[i], b.hi()[i]));
        }
        c_m.push(AxisBox::from_intervals(&iv)?);
    }

    // lift of a planar sandwich box into dimensions (2i, 2i+1) of the target
    let lift = |i: usize, planar: &AxisBox| -> Result<AxisBox> {
        let mut iv = vec![omega; target_dim];
        iv[2 * i] = (planar.lo()[0], planar.hi()[0]);
        iv[2 * i + 1] = (planar.lo()[1], planar.hi()[1]);
        AxisBox::from_intervals(&iv)
    };

    let constant = staircases.iter().fold(
        ExactVolume::from(delta).pow((d - k) as u32),
        |acc, st| acc * ExactVolume::from(*st.xs().last().expect("m >= 2")),
    );

    let mut terms = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let mut boxes = Vec::new();
        for (i, st) in staircases.iter().enumerate() {
            let sandwich = if mask & (1 << i) != 0 { &st.t1 } else { &st.t0 };
            for planar in sandwich.boxes() {
                boxes.push(lift(i, planar)?);
            }
        }
        boxes.extend(c_m.iter().cloned());
        terms.push(PlanTerm {
            coeff: if mask.count_ones() % 2 == 0 { 1 } else { -1 },
            instance: BoxSet::new(target_dim, boxes)?,
        });
    }

    Ok(VolumePlan {
        constant,
        terms,
        claimed_class: claimed,
    })
}

/// Default pass-through threshold for [`shrink_split`]: below `12 * d`
/// boxes the split quantiles are too coarse to help.
pub fn default_shrink_n_min(d: usize) -> usize {
    12 * d
}

/// One level of the instance shrinker with the default threshold.
pub fn shrink_split(m: &BoxSet) -> Result<(Vec<BoxSet>, Option<ExactVolume>)> {
    shrink_split_with_min(m, default_shrink_n_min(m.dim()))
}

/// Splits `m` into at most `2d+1` sub-instances, each with at most
/// `ceil((1 - 1/(3d)) * n)` boxes, whose volumes (plus an optional trivial
/// note) sum to `vol(m)`.
///
/// For each dimension in turn the residual instance is cut at the
/// `(1-a)n`-th and `(1+a)n`-th of its `2n` sorted coordinates (`a = 1/(3d)`)
/// into a left, right, and middle piece. Side pieces are emitted; the middle
/// is carried forward. If the final residual contains a box equal to the
/// whole middle cell, its volume is the residual's volume and is returned
/// as `note` instead of a piece. Emitted pieces are re-translated to the
/// origin so grounded inputs yield grounded pieces.
///
/// Instances with fewer than `n_min` boxes pass through unchanged.
pub fn shrink_split_with_min(
    m: &BoxSet,
    n_min: usize,
) -> Result<(Vec<BoxSet>, Option<ExactVolume>)> {
    if m.len() < n_min {
        return Ok((vec![m.clone()], None));
    }
    let d = m.dim();
    let mut pieces = Vec::new();
    let mut residual = m.without_degenerate();
    let mut cell = Vec::with_capacity(d);
    for dim in 0..d {
        let n = residual.len();
        if n == 0 {
            break;
        }
        let mut zs: Vec<Coord> = Vec::with_capacity(2 * n);
        for b in residual.boxes() {
            zs.push(b.lo()[dim]);
            zs.push(b.hi()[dim]);
        }
        zs.sort_unstable();
        // 1-based quantile indices a = z_ceil((1-a)n), b = z_floor((1+a)n)
        let lo_idx = (n - n / (3 * d)).clamp(1, 2 * n);
        let hi_idx = (n + n / (3 * d)).clamp(1, 2 * n);
        let (a, b) = (zs[lo_idx - 1], zs[hi_idx - 1]);

        emit_piece(&mut pieces, clip_to_slab(&residual, dim, Coord::MIN, a))?;
        emit_piece(&mut pieces, clip_to_slab(&residual, dim, b, Coord::MAX))?;
        residual = clip_to_slab(&residual, dim, a, b);
        cell.push((a, b));
    }

    if residual.is_empty() {
        return Ok((pieces, None));
    }
    let cell_box = AxisBox::from_intervals(&cell).expect("quantiles satisfy a <= b");
    if residual.boxes().iter().any(|b| *b == cell_box) {
        // every residual box lies inside the cell, so the union is the cell
        return Ok((pieces, Some(box_volume(&cell_box))));
    }
    emit_piece(&mut pieces, residual)?;
    Ok((pieces, None))
}

fn clip_to_slab(src: &BoxSet, dim: usize, lo: Coord, hi: Coord) -> BoxSet {
    let boxes = src
        .boxes()
        .iter()
        .filter_map(|bx| bx.clip(dim, lo, hi))
        .filter(|bx| !bx.is_degenerate())
        .collect();
    BoxSet::new(src.dim(), boxes).expect("clipped boxes keep the dimension")
}

fn emit_piece(pieces: &mut Vec<BoxSet>, piece: BoxSet) -> Result<()> {
    if !piece.is_empty() {
        let (normalized, _) = normalize_translate(&piece)?;
        pieces.push(normalized);
    }
    Ok(())
}

/// Recursively applies [`shrink_split_with_min`] until every piece has at
/// most `n_min` boxes, then sums `base` over the pieces and the notes.
pub fn solve_with_shrink<F>(m: &BoxSet, mut base: F, n_min: usize) -> Result<ExactVolume>
where
    F: FnMut(&BoxSet) -> Result<ExactVolume>,
{
    // below 3d boxes the split no longer strictly shrinks; fall to base
    let floor = n_min.max(3 * m.dim());
    let mut total = ExactVolume::zero();
    let mut stack = vec![m.clone()];
    while let Some(cur) = stack.pop() {
        if cur.len() <= floor {
            total += base(&cur)?;
            continue;
        }
        let (pieces, note) = shrink_split_with_min(&cur, floor)?;
        if let Some(v) = note {
            total += v;
        }
        stack.extend(pieces);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{volume_grid_oracle, volume_sweep};

    fn bx(iv: &[(Coord, Coord)]) -> AxisBox {
        AxisBox::from_intervals(iv).unwrap()
    }

    fn set(dim: usize, boxes: &[AxisBox]) -> BoxSet {
        BoxSet::new(dim, boxes.to_vec()).unwrap()
    }

    fn ev(v: i64) -> ExactVolume {
        ExactVolume::from(v)
    }

    fn oracle(m: &BoxSet) -> Result<ExactVolume> {
        volume_grid_oracle(m)
    }

    #[test]
    fn staircase_smallest_case() {
        let st = build_staircase(&[0, 1]).unwrap();
        assert_eq!(st.m(), 2);
        assert_eq!(st.a_boxes, vec![bx(&[(0, 1), (0, 1)])]);
        assert_eq!(
            st.t0.boxes(),
            &[bx(&[(0, 1), (0, 0)]), bx(&[(0, 0), (0, 1)])]
        );
        assert_eq!(oracle(&st.t0).unwrap(), ev(0));
        assert_eq!(st.t1.boxes(), &[bx(&[(0, 1), (0, 1)])]);
        assert_eq!(st.embed(1, 2).unwrap(), bx(&[(0, 1), (0, 1)]));
    }

    #[test]
    fn staircase_four_endpoints() {
        let st = build_staircase(&[0, 1, 2, 3]).unwrap();
        assert_eq!(
            st.a_boxes,
            vec![
                bx(&[(2, 3), (0, 1)]),
                bx(&[(1, 2), (1, 2)]),
                bx(&[(0, 1), (2, 3)]),
            ]
        );
        let a_union = set(2, &st.a_boxes);
        assert_eq!(oracle(&a_union).unwrap(), ev(3));
        assert_eq!(st.embed(1, 2).unwrap(), bx(&[(0, 3), (0, 1)]));
        assert_eq!(st.embed(3, 4).unwrap(), bx(&[(0, 1), (0, 3)]));
        // the full-interval envelope contains every step
        let full = st.embed(1, 4).unwrap();
        assert_eq!(full, bx(&[(0, 3), (0, 3)]));
        for a in &st.a_boxes {
            assert!(full.contains_box(a));
        }
    }

    #[test]
    fn staircase_containment_is_the_index_rule() {
        let st = build_staircase(&[0, 2, 3, 7, 11]).unwrap();
        let m = st.m();
        for j in 1..=m {
            for k in j..=m {
                let c = st.embed(j, k).unwrap();
                for (i0, a) in st.a_boxes.iter().enumerate() {
                    let i = i0 + 1;
                    assert_eq!(
                        c.contains_box(a),
                        j <= i && i < k,
                        "j={j} k={k} i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn staircase_rejects_bad_input() {
        assert!(build_staircase(&[0]).is_err());
        assert!(build_staircase(&[1, 2]).is_err());
        assert!(build_staircase(&[0, 2, 2]).is_err());
        assert!(build_staircase(&[0, 3, 1]).is_err());
    }

    #[test]
    fn hypervolume_reduction_worked_example() {
        let m = set(2, &[bx(&[(0, 1), (0, 2)]), bx(&[(0, 2), (0, 1)])]);
        assert_eq!(oracle(&m).unwrap(), ev(3));
        let plan = reduce_hypervolume_to_unitcube(&m).unwrap();
        assert_eq!(plan.constant, ev(4));
        assert_eq!(plan.terms.len(), 2);
        assert_eq!(
            plan.terms[0].instance.boxes(),
            &[bx(&[(-1, 1), (0, 2)]), bx(&[(0, 2), (-1, 1)])]
        );
        assert_eq!(oracle(&plan.terms[0].instance).unwrap(), ev(7));
        assert_eq!(oracle(&plan.terms[1].instance).unwrap(), ev(8));
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(3));
        plan.validate().unwrap();
    }

    #[test]
    fn hypervolume_reduction_fixed_points() {
        // a single full box is its own cube
        let m = set(3, &[bx(&[(0, 4), (0, 4), (0, 4)])]);
        let plan = reduce_hypervolume_to_unitcube(&m).unwrap();
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(64));

        let m = set(1, &[bx(&[(0, 1)])]);
        let plan = reduce_hypervolume_to_unitcube(&m).unwrap();
        assert_eq!(plan.constant, ev(1));
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(1));
    }

    #[test]
    fn hypervolume_reduction_rejects_other_classes() {
        let m = set(1, &[bx(&[(1, 2)])]);
        assert_eq!(
            reduce_hypervolume_to_unitcube(&m).unwrap_err(),
            Error::NotInClass {
                required: ClassTag::Hypervolume
            }
        );
    }

    #[test]
    fn reshape_cases() {
        let c = bx(&[(0, 2), (0, 2)]);
        // anchor at lo in both dimensions
        assert_eq!(
            reshape_cube(&bx(&[(1, 4), (1, 4)]), &c).unwrap(),
            bx(&[(1, 3), (1, 3)])
        );
        // anchor at hi
        assert_eq!(
            reshape_cube(&bx(&[(-3, 1), (-3, 1)]), &c).unwrap(),
            bx(&[(-1, 1), (-1, 1)])
        );
        // covering case collapses onto c's extent
        assert_eq!(
            reshape_cube(&bx(&[(-1, 3), (0, 4)]), &c).unwrap(),
            bx(&[(0, 2), (0, 2)])
        );
    }

    #[test]
    fn reshape_preserves_restriction() {
        let c = bx(&[(0, 2), (0, 2), (0, 2)]);
        let b = bx(&[(-1, 3), (1, 5), (-4, 0)]);
        let r = reshape_cube(&b, &c).unwrap();
        assert!(r.is_cube());
        assert_eq!(r.side(0), c.side(0));
        assert_eq!(b.intersection(&c), r.intersection(&c));
    }

    #[test]
    fn cube_reduction_worked_example() {
        let m = set(2, &[bx(&[(0, 2), (0, 2)]), bx(&[(1, 4), (1, 4)])]);
        assert_eq!(oracle(&m).unwrap(), ev(12));
        let plan = reduce_cube_to_unitcube(&m).unwrap();
        assert_eq!(plan.terms.len(), 4);
        // round 1: C = [0,2]^2, the other cube reshapes to [1,3]^2
        assert_eq!(
            plan.terms[0].instance.boxes(),
            &[bx(&[(1, 3), (1, 3)]), bx(&[(0, 2), (0, 2)])]
        );
        assert_eq!(oracle(&plan.terms[0].instance).unwrap(), ev(7));
        assert_eq!(oracle(&plan.terms[1].instance).unwrap(), ev(4));
        // round 2: the remaining cube alone
        assert_eq!(oracle(&plan.terms[2].instance).unwrap(), ev(9));
        assert_eq!(oracle(&plan.terms[3].instance).unwrap(), ev(0));
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(12));
        plan.validate().unwrap();
    }

    #[test]
    fn cube_reduction_small_cases() {
        let lone = set(2, &[bx(&[(0, 1), (0, 1)])]);
        let plan = reduce_cube_to_unitcube(&lone).unwrap();
        assert_eq!(plan.terms.len(), 2);
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(1));

        let disjoint = set(2, &[bx(&[(0, 1), (0, 1)]), bx(&[(5, 6), (5, 6)])]);
        let plan = reduce_cube_to_unitcube(&disjoint).unwrap();
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(2));

        assert_eq!(
            reduce_cube_to_unitcube(&set(2, &[bx(&[(0, 1), (0, 2)])])).unwrap_err(),
            Error::NotInClass {
                required: ClassTag::Cube
            }
        );
    }

    #[test]
    fn grounded_reduction_single_interval() {
        let m = set(1, &[bx(&[(0, 1)])]);
        let plan = reduce_kmp_to_grounded(&m, 1).unwrap();
        assert_eq!(plan.constant, ev(1));
        assert_eq!(plan.terms.len(), 2);
        assert_eq!(plan.claimed_class, ClassTag::Grounded(2));
        for t in &plan.terms {
            assert_eq!(t.instance.dim(), 2);
        }
        assert_eq!(oracle(&plan.terms[0].instance).unwrap(), ev(1));
        assert_eq!(oracle(&plan.terms[1].instance).unwrap(), ev(1));
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(1));
    }

    #[test]
    fn grounded_reduction_two_intervals() {
        let m = set(1, &[bx(&[(0, 1)]), bx(&[(2, 3)])]);
        let plan = reduce_kmp_to_grounded(&m, 1).unwrap();
        assert_eq!(plan.constant, ev(3));
        assert_eq!(plan.terms.len(), 2);
        assert_eq!(plan.terms[0].coeff, 1);
        assert_eq!(plan.terms[1].coeff, -1);
        assert_eq!(oracle(&plan.terms[0].instance).unwrap(), ev(5));
        assert_eq!(oracle(&plan.terms[1].instance).unwrap(), ev(6));
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(2));
        plan.validate().unwrap();
    }

    #[test]
    fn grounded_reduction_structure_and_value_d2_k2() {
        use crate::harness::{gen_instance, GenSpec};
        for seed in 0..10 {
            let m = gen_instance(&GenSpec {
                class: ClassTag::General,
                d: 2,
                n: 4,
                coord_max: 8,
                seed,
            });
            let plan = reduce_kmp_to_grounded(&m, 2).unwrap();
            assert_eq!(plan.terms.len(), 4);
            for t in &plan.terms {
                assert_eq!(t.instance.dim(), 4);
                assert!(t.instance.len() <= 5 * m.len());
                assert!(satisfies(&t.instance, &ClassTag::Grounded(4)));
            }
            assert_eq!(
                evaluate_plan(&plan, oracle).unwrap(),
                oracle(&m).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn grounded_reduction_edge_cases() {
        let m = set(1, &[bx(&[(0, 1)])]);
        assert!(matches!(
            reduce_kmp_to_grounded(&m, 0).unwrap_err(),
            Error::InvalidParameter(_)
        ));
        assert!(matches!(
            reduce_kmp_to_grounded(&m, 2).unwrap_err(),
            Error::InvalidParameter(_)
        ));
        let empty = BoxSet::empty(2).unwrap();
        let plan = reduce_kmp_to_grounded(&empty, 1).unwrap();
        assert!(plan.terms.is_empty());
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), ev(0));
    }

    #[test]
    fn grounded_reduction_handles_negative_coordinates() {
        let m = set(2, &[bx(&[(-5, -2), (-1, 3)]), bx(&[(-3, 1), (0, 2)])]);
        let plan = reduce_kmp_to_grounded(&m, 1).unwrap();
        assert_eq!(evaluate_plan(&plan, oracle).unwrap(), oracle(&m).unwrap());
    }

    #[test]
    fn evaluate_plan_examples() {
        let constant_only = VolumePlan {
            constant: ev(5),
            terms: Vec::new(),
            claimed_class: ClassTag::General,
        };
        assert_eq!(evaluate_plan(&constant_only, oracle).unwrap(), ev(5));

        let one_term = VolumePlan {
            constant: ev(0),
            terms: vec![PlanTerm {
                coeff: 1,
                instance: set(2, &[bx(&[(0, 1), (0, 1)])]),
            }],
            claimed_class: ClassTag::General,
        };
        assert_eq!(evaluate_plan(&one_term, oracle).unwrap(), ev(1));

        let bad_claim = VolumePlan {
            claimed_class: ClassTag::UnitCube,
            ..one_term.clone()
        };
        let bad = VolumePlan {
            terms: vec![PlanTerm {
                coeff: 1,
                instance: set(2, &[bx(&[(0, 1), (0, 2)])]),
            }],
            ..bad_claim
        };
        assert!(matches!(
            evaluate_plan(&bad, oracle).unwrap_err(),
            Error::PlanIntegrity(_)
        ));
    }

    #[test]
    fn shrink_passes_small_instances_through() {
        let m = set(1, &[bx(&[(0, 1)]), bx(&[(2, 3)])]);
        let (pieces, note) = shrink_split(&m).unwrap();
        assert_eq!(pieces, vec![m]);
        assert!(note.is_none());
    }

    #[test]
    fn shrink_detects_trivial_residual() {
        // every box spans the middle slab in every dimension
        let boxes: Vec<AxisBox> = (0..40).map(|_| bx(&[(0, 100), (0, 100)])).collect();
        let m = set(2, &boxes);
        let (pieces, note) = shrink_split(&m).unwrap();
        assert!(pieces.is_empty());
        assert_eq!(note, Some(ev(10_000)));

        // extra boxes strictly inside the cell are absorbed by the note
        let mut boxes: Vec<AxisBox> = (0..36).map(|_| bx(&[(0, 100), (0, 100)])).collect();
        boxes.extend((0..4).map(|_| bx(&[(10, 20), (10, 20)])));
        let m = set(2, &boxes);
        let (pieces, note) = shrink_split(&m).unwrap();
        assert!(pieces.is_empty());
        assert_eq!(note, Some(ev(10_000)));
        assert_eq!(volume_sweep(&m), ev(10_000));
    }

    #[test]
    fn shrink_volume_and_size_bounds_on_seeded_instances() {
        use crate::harness::{gen_instance, GenSpec};
        for seed in 0..10 {
            let m = gen_instance(&GenSpec {
                class: ClassTag::General,
                d: 2,
                n: 40,
                coord_max: 60,
                seed,
            });
            let (pieces, note) = shrink_split(&m).unwrap();
            assert!(pieces.len() <= 5);
            let bound = 40 - 40 / 6;
            for p in &pieces {
                assert!(p.len() <= bound, "piece has {} boxes", p.len());
            }
            let mut total = note.unwrap_or_else(ExactVolume::zero);
            for p in &pieces {
                total += volume_sweep(p);
            }
            assert_eq!(total, volume_sweep(&m), "seed {seed}");
        }
    }

    #[test]
    fn shrink_preserves_groundedness() {
        use crate::harness::{gen_instance, GenSpec};
        let m = gen_instance(&GenSpec {
            class: ClassTag::Grounded(1),
            d: 2,
            n: 30,
            coord_max: 50,
            seed: 9,
        });
        let (pieces, _) = shrink_split_with_min(&m, 24).unwrap();
        assert!(!pieces.is_empty());
        for p in &pieces {
            assert!(
                satisfies(p, &ClassTag::Grounded(1)),
                "piece lost groundedness: {p:?}"
            );
        }
    }

    #[test]
    fn solve_with_shrink_matches_sweep() {
        use crate::harness::{gen_instance, GenSpec};
        let base = |m: &BoxSet| Ok(volume_sweep(m));
        let empty = BoxSet::empty(2).unwrap();
        assert_eq!(solve_with_shrink(&empty, base, 8).unwrap(), ev(0));

        for seed in 0..5 {
            let m = gen_instance(&GenSpec {
                class: ClassTag::General,
                d: 2,
                n: 60,
                coord_max: 100,
                seed,
            });
            assert_eq!(
                solve_with_shrink(&m, base, 8).unwrap(),
                volume_sweep(&m),
                "seed {seed}"
            );
        }
    }
}
