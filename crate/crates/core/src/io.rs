//! JSON serialization for instances and plans.
//!
//! Instance files look like `{"dim": 2, "boxes": [{"lo": [0,0], "hi":
//! [2,3]}]}`. Coordinates within the 53-bit safe range are plain JSON
//! numbers; anything larger is written as a decimal string so consumers
//! that read JSON numbers as doubles cannot silently round. Volumes are
//! always decimal strings. Parsing validates `lo <= hi` and dimensions.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactVolume;
use crate::geom::{AxisBox, BoxSet, ClassTag, Coord};
use crate::reductions::{PlanTerm, VolumePlan};

/// Largest magnitude emitted as a JSON number; `2^53 - 1`.
pub const MAX_SAFE_JSON_INT: i64 = (1 << 53) - 1;

struct CoordSer(Coord);

impl Serialize for CoordSer {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.abs() <= MAX_SAFE_JSON_INT {
            s.serialize_i64(self.0)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

struct CoordVec(Vec<Coord>);

impl<'de> Deserialize<'de> for CoordVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CoordVec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of integers (numbers or decimal strings)")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<CoordVec, A::Error> {
                #[derive(Deserialize)]
                #[serde(untagged)]
                enum Raw {
                    Num(i64),
                    Str(String),
                }
                let mut out = Vec::new();
                while let Some(raw) = seq.next_element::<Raw>()? {
                    out.push(match raw {
                        Raw::Num(v) => v,
                        Raw::Str(s) => s
                            .parse::<i64>()
                            .map_err(|e| de::Error::custom(format!("bad coordinate {s:?}: {e}")))?,
                    });
                }
                Ok(CoordVec(out))
            }
        }
        d.deserialize_seq(V)
    }
}

impl Serialize for AxisBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("lo", &SeqOf(self.lo()))?;
        map.serialize_entry("hi", &SeqOf(self.hi()))?;
        map.end()
    }
}

struct SeqOf<'a>(&'a [Coord]);

impl Serialize for SeqOf<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for &c in self.0 {
            seq.serialize_element(&CoordSer(c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for AxisBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: CoordVec,
            hi: CoordVec,
        }
        let raw = Raw::deserialize(d)?;
        AxisBox::new(raw.lo.0, raw.hi.0).map_err(de::Error::custom)
    }
}

impl Serialize for BoxSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("dim", &self.dim())?;
        map.serialize_entry("boxes", self.boxes())?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for BoxSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            boxes: Vec<AxisBox>,
        }
        let raw = Raw::deserialize(d)?;
        BoxSet::new(raw.dim, raw.boxes).map_err(de::Error::custom)
    }
}

impl Serialize for ExactVolume {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactVolume {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExactVolume::from(v)),
            Raw::Str(s) => s.parse::<ExactVolume>().map_err(de::Error::custom),
        }
    }
}

impl Serialize for ClassTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ClassTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<ClassTag>().map_err(de::Error::custom)
    }
}

impl Serialize for PlanTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("coeff", &self.coeff)?;
        map.serialize_entry("instance", &self.instance)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for PlanTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            coeff: i64,
            instance: BoxSet,
        }
        let raw = Raw::deserialize(d)?;
        Ok(PlanTerm {
            coeff: raw.coeff,
            instance: raw.instance,
        })
    }
}

impl Serialize for VolumePlan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("constant", &self.constant)?;
        map.serialize_entry("claimed_class", &self.claimed_class)?;
        map.serialize_entry("terms", &self.terms)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for VolumePlan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            constant: ExactVolume,
            claimed_class: ClassTag,
            terms: Vec<PlanTerm>,
        }
        let raw = Raw::deserialize(d)?;
        Ok(VolumePlan {
            constant: raw.constant,
            claimed_class: raw.claimed_class,
            terms: raw.terms,
        })
    }
}

pub fn instance_to_json(m: &BoxSet) -> String {
    serde_json::to_string(m).expect("instances serialize")
}

pub fn instance_from_json(text: &str) -> Result<BoxSet> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn plan_to_json(p: &VolumePlan) -> String {
    serde_json::to_string(p).expect("plans serialize")
}

pub fn plan_from_json(text: &str) -> Result<VolumePlan> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}
