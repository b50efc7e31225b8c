//! Exact volume-of-union solvers.
//!
//! [`volume_grid_oracle`] is the trusted ground truth: it compresses the
//! coordinates of each dimension and enumerates every elementary grid cell,
//! so its correctness is immediate from the definition of the measure. It
//! is deliberately brute force and guarded by a configurable cell cap.
//!
//! [`volume_sweep`] is the general solver: sort-and-merge in one dimension,
//! a plane sweep over a counted segment tree in two, and a recursive sweep
//! of the last dimension above that. Everything returns the same exact
//! integers; solver choice is purely a performance policy.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::ExactVolume;
use crate::geom::{endpoints, BoxSet, Coord};

/// Default cell cap for the grid oracle; override per call or, in the CLI,
/// with `KLEEBOX_ORACLE_CELL_CAP`.
pub const DEFAULT_ORACLE_CELL_CAP: u64 = 2_000_000;

/// Solver selector for [`volume`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    /// Interval union for d=1, sweep otherwise.
    Auto,
    Oracle,
    Sweep,
}

/// Exact accumulator: i128 fast path with a big-integer spill.
struct ExactAcc {
    small: i128,
    big: BigInt,
}

impl ExactAcc {
    fn new() -> Self {
        ExactAcc {
            small: 0,
            big: BigInt::from(0),
        }
    }

    fn add_i128(&mut self, v: i128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = v;
            }
        }
    }

    fn add_product(&mut self, a: i128, b: i128) {
        match a.checked_mul(b) {
            Some(p) => self.add_i128(p),
            None => self.big += BigInt::from(a) * b,
        }
    }

    fn finish(self) -> ExactVolume {
        ExactVolume::from(self.big + self.small)
    }
}

fn product_i128(factors: impl Iterator<Item = i128>) -> Option<i128> {
    let mut acc = 1i128;
    for f in factors {
        acc = acc.checked_mul(f)?;
    }
    Some(acc)
}

/// Brute-force coordinate-compression oracle with the default cell cap.
pub fn volume_grid_oracle(m: &BoxSet) -> Result<ExactVolume> {
    volume_grid_oracle_capped(m, DEFAULT_ORACLE_CELL_CAP)
}

/// Brute-force oracle: compress coordinates per dimension, mark every grid
/// cell covered by some box, and sum the marked cell volumes.
///
/// Cells are half-open `[x_j, x_{j+1})` per axis, so they partition the
/// bounding box exactly and degenerate boxes contribute nothing.
pub fn volume_grid_oracle_capped(m: &BoxSet, cap: u64) -> Result<ExactVolume> {
    let d = m.dim();
    if m.is_empty() {
        return Ok(ExactVolume::zero());
    }
    let grids: Vec<Vec<Coord>> = (0..d).map(|i| endpoints(m, i)).collect();
    let mut cells: u128 = 1;
    for g in &grids {
        if g.len() < 2 {
            return Ok(ExactVolume::zero());
        }
        cells = cells.saturating_mul((g.len() - 1) as u128);
    }
    if cells > cap as u128 {
        return Err(Error::OracleTooLarge { cells, cap });
    }

    let cells_per: Vec<usize> = grids.iter().map(|g| g.len() - 1).collect();
    let mut strides = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cells_per[i + 1];
    }
    let mut covered = vec![false; cells as usize];

    for b in m.boxes() {
        let mut ranges = Vec::with_capacity(d);
        let mut empty = false;
        for i in 0..d {
            let lo = grids[i].binary_search(&b.lo()[i]).expect("endpoint present");
            let hi = grids[i].binary_search(&b.hi()[i]).expect("endpoint present");
            if lo == hi {
                empty = true;
                break;
            }
            ranges.push(lo..hi);
        }
        if empty {
            continue;
        }
        let mut idx: Vec<usize> = ranges.iter().map(|r| r.start).collect();
        loop {
            let flat: usize = idx.iter().zip(&strides).map(|(&j, &s)| j * s).sum();
            covered[flat] = true;
            // odometer increment over the box's cell ranges
            let mut dim = d;
            loop {
                if dim == 0 {
                    break;
                }
                dim -= 1;
                idx[dim] += 1;
                if idx[dim] < ranges[dim].end {
                    break;
                }
                idx[dim] = ranges[dim].start;
            }
            if dim == 0 && idx[0] == ranges[0].start {
                break;
            }
        }
    }

    let sides: Vec<Vec<i128>> = grids
        .iter()
        .map(|g| g.windows(2).map(|w| (w[1] - w[0]) as i128).collect())
        .collect();
    let mut acc = ExactAcc::new();
    let mut idx = vec![0usize; d];
    for flat in 0..cells as usize {
        if covered[flat] {
            match product_i128(idx.iter().enumerate().map(|(i, &j)| sides[i][j])) {
                Some(p) => acc.add_i128(p),
                None => {
                    let mut big = BigInt::from(1);
                    for (i, &j) in idx.iter().enumerate() {
                        big *= sides[i][j];
                    }
                    acc.big += big;
                }
            }
        }
        let mut dim = d;
        while dim > 0 {
            dim -= 1;
            idx[dim] += 1;
            if idx[dim] < cells_per[dim] {
                break;
            }
            idx[dim] = 0;
        }
    }
    Ok(acc.finish())
}

/// Exact union length of a one-dimensional instance by sort-and-merge.
pub fn volume_interval_union(m: &BoxSet) -> Result<ExactVolume> {
    if m.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: m.dim(),
        });
    }
    Ok(interval_union_1d(m))
}

fn interval_union_1d(m: &BoxSet) -> ExactVolume {
    let mut iv: Vec<(Coord, Coord)> = m
        .boxes()
        .iter()
        .map(|b| (b.lo()[0], b.hi()[0]))
        .filter(|&(a, b)| a < b)
        .collect();
    iv.sort_unstable();
    let mut acc = ExactAcc::new();
    let mut cur: Option<(Coord, Coord)> = None;
    for (a, b) in iv {
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                acc.add_i128(cb as i128 - ca as i128);
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((ca, cb)) = cur {
        acc.add_i128(cb as i128 - ca as i128);
    }
    acc.finish()
}

/// Segment tree over elementary slabs; each node keeps a coverage counter
/// and the covered length below it. No pushdown is needed because counts
/// are only ever queried at the root.
struct CoverTree {
    ys: Vec<Coord>,
    count: Vec<i32>,
    cov: Vec<i128>,
}

impl CoverTree {
    fn new(ys: Vec<Coord>) -> Self {
        let slabs = ys.len().saturating_sub(1);
        let size = 4 * slabs.max(1);
        CoverTree {
            ys,
            count: vec![0; size],
            cov: vec![0; size],
        }
    }

    fn slabs(&self) -> usize {
        self.ys.len().saturating_sub(1)
    }

    fn add(&mut self, lo: usize, hi: usize, delta: i32) {
        if lo < hi && self.slabs() > 0 {
            self.update(1, 0, self.slabs(), lo, hi, delta);
        }
    }

    fn update(&mut self, node: usize, nl: usize, nr: usize, ql: usize, qr: usize, delta: i32) {
        if qr <= nl || nr <= ql {
            return;
        }
        if ql <= nl && nr <= qr {
            self.count[node] += delta;
        } else {
            let mid = (nl + nr) / 2;
            self.update(2 * node, nl, mid, ql, qr, delta);
            self.update(2 * node + 1, mid, nr, ql, qr, delta);
        }
        self.cov[node] = if self.count[node] > 0 {
            self.ys[nr] as i128 - self.ys[nl] as i128
        } else if nr - nl == 1 {
            0
        } else {
            self.cov[2 * node] + self.cov[2 * node + 1]
        };
    }

    fn covered(&self) -> i128 {
        if self.slabs() == 0 {
            0
        } else {
            self.cov[1]
        }
    }
}

fn sweep_2d(m: &BoxSet) -> ExactVolume {
    let ys = endpoints(m, 1);
    if ys.len() < 2 {
        return ExactVolume::zero();
    }
    struct Event {
        x: Coord,
        delta: i32,
        lo: usize,
        hi: usize,
    }
    let mut events = Vec::with_capacity(2 * m.len());
    for b in m.boxes() {
        let lo = ys.binary_search(&b.lo()[1]).expect("endpoint present");
        let hi = ys.binary_search(&b.hi()[1]).expect("endpoint present");
        if lo == hi || b.lo()[0] == b.hi()[0] {
            continue;
        }
        events.push(Event {
            x: b.lo()[0],
            delta: 1,
            lo,
            hi,
        });
        events.push(Event {
            x: b.hi()[0],
            delta: -1,
            lo,
            hi,
        });
    }
    if events.is_empty() {
        return ExactVolume::zero();
    }
    events.sort_by_key(|e| e.x);
    let mut tree = CoverTree::new(ys);
    let mut acc = ExactAcc::new();
    let mut cur_x = events[0].x;
    for e in &events {
        if e.x != cur_x {
            acc.add_product(tree.covered(), e.x as i128 - cur_x as i128);
            cur_x = e.x;
        }
        tree.add(e.lo, e.hi, e.delta);
    }
    acc.finish()
}

fn sweep_nd(m: &BoxSet) -> ExactVolume {
    let d = m.dim();
    let last = d - 1;
    let es = endpoints(m, last);
    if es.len() < 2 {
        return ExactVolume::zero();
    }
    let mut total = ExactVolume::zero();
    for w in es.windows(2) {
        let (a, b) = (w[0], w[1]);
        let active: Vec<_> = m
            .boxes()
            .iter()
            .filter(|bx| bx.lo()[last] <= a && bx.hi()[last] >= b)
            .map(|bx| {
                crate::geom::AxisBox::new(bx.lo()[..last].to_vec(), bx.hi()[..last].to_vec())
                    .expect("projection of a valid box")
            })
            .collect();
        if active.is_empty() {
            continue;
        }
        let slice = BoxSet::new(last, active).expect("projected instance");
        let v = volume_sweep(&slice);
        total += ExactVolume::from(BigInt::from(b as i128 - a as i128) * v.into_bigint());
    }
    total
}

/// Exact volume of the union by plane sweep; works for any dimension.
pub fn volume_sweep(m: &BoxSet) -> ExactVolume {
    match m.dim() {
        1 => interval_union_1d(m),
        2 => sweep_2d(m),
        _ => sweep_nd(m),
    }
}

/// Dispatching volume entry point; all algorithms agree exactly.
pub fn volume(m: &BoxSet, algo: Algo) -> Result<ExactVolume> {
    match algo {
        Algo::Auto => Ok(volume_sweep(m)),
        Algo::Oracle => volume_grid_oracle(m),
        Algo::Sweep => Ok(volume_sweep(m)),
    }
}
