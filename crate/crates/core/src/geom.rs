//! Boxes, instances, class predicates, and elementary transforms.
//!
//! An [`AxisBox`] is a closed product of integer intervals; degenerate
//! (zero-width) sides are legal everywhere and simply have volume 0. A
//! [`BoxSet`] is an instance: a dimension plus a list of boxes, with no
//! class assumption attached. Class membership is a pure predicate,
//! reported by [`classify`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::ExactVolume;

/// Signed integer coordinate. Arithmetic on coordinates is checked; a
/// result outside the `i64` range surfaces as `CoordinateOverflow`.
pub type Coord = i64;

/// Closed axis-aligned box `[lo_0,hi_0] x ... x [lo_{d-1},hi_{d-1}]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AxisBox {
    lo: Vec<Coord>,
    hi: Vec<Coord>,
}

impl AxisBox {
    /// Requires equal lengths >= 1 and `lo[i] <= hi[i]` everywhere.
    pub fn new(lo: Vec<Coord>, hi: Vec<Coord>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (i, (&a, &b)) in lo.iter().zip(hi.iter()).enumerate() {
            if a > b {
                return Err(Error::InvertedBounds { dim: i });
            }
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn from_intervals(intervals: &[(Coord, Coord)]) -> Result<Self> {
        let lo = intervals.iter().map(|&(a, _)| a).collect();
        let hi = intervals.iter().map(|&(_, b)| b).collect();
        AxisBox::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Coord] {
        &self.lo
    }

    pub fn hi(&self) -> &[Coord] {
        &self.hi
    }

    /// Side length in dimension `i`, exact in `i128`.
    pub fn side(&self, i: usize) -> i128 {
        self.hi[i] as i128 - self.lo[i] as i128
    }

    /// True iff some side has zero width (volume 0).
    pub fn is_degenerate(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a == b)
    }

    /// True iff all side lengths are equal.
    pub fn is_cube(&self) -> bool {
        let s = self.side(0);
        (1..self.dim()).all(|i| self.side(i) == s)
    }

    pub fn volume(&self) -> ExactVolume {
        box_volume(self)
    }

    /// Componentwise translation by `offset` (added), checked.
    pub fn translated(&self, offset: &[Coord]) -> Result<Self> {
        if offset.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: offset.len(),
            });
        }
        let shift = |v: &[Coord]| -> Result<Vec<Coord>> {
            v.iter()
                .zip(offset)
                .map(|(&c, &o)| c.checked_add(o).ok_or(Error::CoordinateOverflow))
                .collect()
        };
        Ok(AxisBox {
            lo: shift(&self.lo)?,
            hi: shift(&self.hi)?,
        })
    }

    /// Intersection with the slab `lo <= x_dim <= hi`; `None` iff empty.
    /// A zero-width result is still a box.
    pub fn clip(&self, dim: usize, lo: Coord, hi: Coord) -> Option<Self> {
        assert!(lo <= hi, "slab must satisfy lo <= hi");
        assert!(dim < self.dim(), "slab dimension out of range");
        let new_lo = self.lo[dim].max(lo);
        let new_hi = self.hi[dim].min(hi);
        if new_lo > new_hi {
            return None;
        }
        let mut b = self.clone();
        b.lo[dim] = new_lo;
        b.hi[dim] = new_hi;
        Some(b)
    }

    /// Componentwise intersection; `None` iff empty in some dimension.
    pub fn intersection(&self, other: &AxisBox) -> Option<AxisBox> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let a = self.lo[i].max(other.lo[i]);
            let b = self.hi[i].min(other.hi[i]);
            if a > b {
                return None;
            }
            lo.push(a);
            hi.push(b);
        }
        Some(AxisBox { lo, hi })
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }
}

impl fmt::Debug for AxisBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b) in self.lo.iter().zip(&self.hi) {
            if !first {
                write!(f, "x")?;
            }
            write!(f, "[{a},{b}]")?;
            first = false;
        }
        Ok(())
    }
}

/// A KMP instance: dimension plus an ordered list of boxes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoxSet {
    dim: usize,
    boxes: Vec<AxisBox>,
}

impl BoxSet {
    pub fn new(dim: usize, boxes: Vec<AxisBox>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
        }
        Ok(BoxSet { dim, boxes })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        BoxSet::new(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn translated(&self, offset: &[Coord]) -> Result<Self> {
        let boxes = self
            .boxes
            .iter()
            .map(|b| b.translated(offset))
            .collect::<Result<Vec<_>>>()?;
        Ok(BoxSet {
            dim: self.dim,
            boxes,
        })
    }

    /// Copy with all zero-volume boxes removed; the union is unchanged.
    pub fn without_degenerate(&self) -> BoxSet {
        BoxSet {
            dim: self.dim,
            boxes: self
                .boxes
                .iter()
                .filter(|b| !b.is_degenerate())
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Debug for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoxSet(d={}, {:?})", self.dim, self.boxes)
    }
}

/// Instance class predicates. A `BoxSet` may satisfy several tags at once;
/// the inclusion chain is `UnitCube => Cube`, `Grounded(k+1) => Grounded(k)`,
/// and `Grounded(d) <=> Hypervolume`, with `Grounded(0)` holding always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassTag {
    General,
    Hypervolume,
    Cube,
    UnitCube,
    Grounded(usize),
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::General => write!(f, "general"),
            ClassTag::Hypervolume => write!(f, "hypervolume"),
            ClassTag::Cube => write!(f, "cube"),
            ClassTag::UnitCube => write!(f, "unitcube"),
            ClassTag::Grounded(k) => write!(f, "grounded-{k}"),
        }
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(ClassTag::General),
            "hypervolume" => Ok(ClassTag::Hypervolume),
            "cube" => Ok(ClassTag::Cube),
            "unitcube" => Ok(ClassTag::UnitCube),
            _ => {
                if let Some(k) = s.strip_prefix("grounded-") {
                    let k = k
                        .parse::<usize>()
                        .map_err(|_| Error::Malformed(format!("bad class tag {s:?}")))?;
                    Ok(ClassTag::Grounded(k))
                } else {
                    Err(Error::Malformed(format!("bad class tag {s:?}")))
                }
            }
        }
    }
}

/// Volume of a single box: the product of its side lengths.
pub fn box_volume(b: &AxisBox) -> ExactVolume {
    let mut acc: i128 = 1;
    let mut big: Option<num_bigint::BigInt> = None;
    for i in 0..b.dim() {
        let s = b.side(i);
        match big {
            None => match acc.checked_mul(s) {
                Some(v) => acc = v,
                None => big = Some(num_bigint::BigInt::from(acc) * s),
            },
            Some(ref mut bg) => *bg *= s,
        }
    }
    match big {
        None => ExactVolume::from(acc),
        Some(bg) => ExactVolume::from(bg),
    }
}

/// Translate so the per-dimension minimum lower coordinate is exactly 0.
/// Returns the translated instance and the subtracted offset vector.
pub fn normalize_translate(m: &BoxSet) -> Result<(BoxSet, Vec<Coord>)> {
    if m.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let d = m.dim();
    let mut offset = vec![Coord::MAX; d];
    for b in m.boxes() {
        for i in 0..d {
            offset[i] = offset[i].min(b.lo()[i]);
        }
    }
    let neg = offset
        .iter()
        .map(|&v| v.checked_neg().ok_or(Error::CoordinateOverflow))
        .collect::<Result<Vec<_>>>()?;
    Ok((m.translated(&neg)?, offset))
}

/// True iff `m` satisfies the predicate named by `tag`. All predicates are
/// vacuously true on the empty instance.
pub fn satisfies(m: &BoxSet, tag: &ClassTag) -> bool {
    match tag {
        ClassTag::General => true,
        ClassTag::Hypervolume => satisfies(m, &ClassTag::Grounded(m.dim())),
        ClassTag::Grounded(k) => {
            *k <= m.dim()
                && m.boxes()
                    .iter()
                    .all(|b| b.lo()[..*k].iter().all(|&c| c == 0))
        }
        ClassTag::Cube => m.boxes().iter().all(AxisBox::is_cube),
        ClassTag::UnitCube => {
            if !satisfies(m, &ClassTag::Cube) {
                return false;
            }
            match m.boxes().first() {
                None => true,
                Some(first) => {
                    let s = first.side(0);
                    m.boxes().iter().all(|b| b.side(0) == s)
                }
            }
        }
    }
}

/// All class tags `m` satisfies. `Grounded(k)` is reported for the maximal
/// `k` and every smaller one; `Grounded(d)` also reports `Hypervolume`.
pub fn classify(m: &BoxSet) -> BTreeSet<ClassTag> {
    let mut tags = BTreeSet::new();
    tags.insert(ClassTag::General);
    let d = m.dim();
    let mut kmax = 0;
    while kmax < d && satisfies(m, &ClassTag::Grounded(kmax + 1)) {
        kmax += 1;
    }
    for k in 0..=kmax {
        tags.insert(ClassTag::Grounded(k));
    }
    if kmax == d {
        tags.insert(ClassTag::Hypervolume);
    }
    if satisfies(m, &ClassTag::Cube) {
        tags.insert(ClassTag::Cube);
        if satisfies(m, &ClassTag::UnitCube) {
            tags.insert(ClassTag::UnitCube);
        }
    }
    tags
}

/// Intersection of `b` with a coordinate slab; see [`AxisBox::clip`].
pub fn clip_box(b: &AxisBox, dim: usize, lo: Coord, hi: Coord) -> Option<AxisBox> {
    b.clip(dim, lo, hi)
}

/// Strictly increasing, duplicate-free list of every `lo` and `hi` value
/// of dimension `dim`. Empty for an empty instance.
pub fn endpoints(m: &BoxSet, dim: usize) -> Vec<Coord> {
    let mut xs: Vec<Coord> = Vec::with_capacity(2 * m.len());
    for b in m.boxes() {
        xs.push(b.lo()[dim]);
        xs.push(b.hi()[dim]);
    }
    xs.sort_unstable();
    xs.dedup();
    xs
}
