//! Acceptable model families: indexed, same-length, with membership testers
//! that compile to machine programs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{ordinal_width, BitString, StringSet, MAX_SET_LEN};
use crate::complexity::Lab;
use crate::error::{check_cap, Error, Result};
use crate::machine::{Cond, Op, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Index `center * (n + 1) + radius`.
    HammingBalls,
    /// Index `2^|u| - 1 + value(u)` for prefix `u`.
    Cylinders,
    FullSpace,
}

pub fn builtin_families() -> [Family; 3] {
    [Family::HammingBalls, Family::Cylinders, Family::FullSpace]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityMode {
    /// `CD^m` of the set, by search.
    Measured,
    /// Bit length of the index, an upper-bound description.
    Declared,
}

impl fmt::Display for ComplexityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexityMode::Measured => "measured",
            ComplexityMode::Declared => "declared",
        })
    }
}

impl FromStr for ComplexityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measured" => Ok(ComplexityMode::Measured),
            "declared" => Ok(ComplexityMode::Declared),
            _ => Err(Error::Invalid(format!("unknown complexity mode {s:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" | "balls" | "hamming" => Ok(Family::HammingBalls),
            "cylinder" | "cylinders" => Ok(Family::Cylinders),
            "full" => Ok(Family::FullSpace),
            _ => Err(Error::Invalid(format!("unknown family {s:?}"))),
        }
    }
}

fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

impl Family {
    pub fn keyword(self) -> &'static str {
        match self {
            Family::HammingBalls => "ball",
            Family::Cylinders => "cylinder",
            Family::FullSpace => "full",
        }
    }

    pub fn index_count(self, n: usize) -> u64 {
        match self {
            Family::HammingBalls => (n as u64 + 1) << n,
            Family::Cylinders => (2u64 << n) - 1,
            Family::FullSpace => 1,
        }
    }

    /// `p(n)`: the index count is at most `2^p(n)`.
    pub fn index_bits(self, n: usize) -> usize {
        ordinal_width(self.index_count(n))
    }

    fn check(self, n: usize, i: u64) -> Result<()> {
        check_cap("input length", n, MAX_SET_LEN)?;
        if i >= self.index_count(n) {
            return Err(Error::Invalid(format!("{self} index {i} out of range for n = {n}")));
        }
        Ok(())
    }

    pub fn ball_index(n: usize, center: u64, radius: usize) -> u64 {
        center * (n as u64 + 1) + radius as u64
    }

    pub fn cylinder_index(prefix: &BitString) -> u64 {
        (1u64 << prefix.len()) - 1 + prefix.to_u64()
    }

    fn ball_parts(n: usize, i: u64) -> (u64, usize) {
        (i / (n as u64 + 1), (i % (n as u64 + 1)) as usize)
    }

    fn cylinder_prefix(i: u64) -> BitString {
        let len = 63 - (i + 1).leading_zeros() as usize;
        BitString::from_u64(i + 1 - (1 << len), len)
    }

    pub fn member(self, n: usize, i: u64, x: u64) -> bool {
        match self {
            Family::HammingBalls => {
                let (c, r) = Self::ball_parts(n, i);
                hamming(c, x) as usize <= r
            }
            Family::Cylinders => {
                let u = Self::cylinder_prefix(i);
                x >> (n - u.len()) == u.to_u64()
            }
            Family::FullSpace => true,
        }
    }

    pub fn set(self, n: usize, i: u64) -> Result<StringSet> {
        self.check(n, i)?;
        Ok(StringSet::from_fn(n, |x| self.member(n, i, x)))
    }

    /// Every `(index, set)` in index order.
    pub fn sets(self, n: usize) -> Result<Vec<(u64, StringSet)>> {
        check_cap("input length", n, MAX_SET_LEN)?;
        (0..self.index_count(n)).map(|i| Ok((i, self.set(n, i)?))).collect()
    }

    /// Work cells the compiled tester needs.
    pub fn space_bound(self, n: usize, i: u64) -> usize {
        match self {
            Family::HammingBalls => Self::ball_parts(n, i).1 + 1,
            Family::Cylinders | Family::FullSpace => 1,
        }
    }

    /// A program deciding the indexed set.
    pub fn compile_membership(self, n: usize, i: u64) -> Result<Program> {
        self.check(n, i)?;
        let ops = match self {
            Family::FullSpace => vec![Op::Acc],
            Family::Cylinders => {
                let mut ops: Vec<Op> = Self::cylinder_prefix(i).bits().iter().map(|&b| Op::Exp(b)).collect();
                ops.push(Op::Acc);
                ops
            }
            Family::HammingBalls => {
                let (center, r) = Self::ball_parts(n, i);
                let mut ops = vec![Op::WMove(true); r];
                ops.push(Op::Write(true));
                ops.extend(std::iter::repeat_n(Op::WMove(false), r));
                // per position: skip on a match; on a mismatch reject at the
                // marker, otherwise advance the counter
                let body = ops.len();
                let len = body + 4 * n + 1;
                for j in 0..n {
                    let c = center >> (n - 1 - j) & 1 == 1;
                    let pc = body + 4 * j;
                    let cond = if c { Cond::In1 } else { Cond::In0 };
                    ops.push(Op::Jump {
                        cond,
                        back: false,
                        dist: 2,
                    });
                    ops.push(Op::Jump {
                        cond: Cond::Work1,
                        back: false,
                        dist: (len - pc - 2) as u32,
                    });
                    ops.push(Op::WMove(true));
                    ops.push(Op::Skip);
                }
                ops.push(Op::Acc);
                debug_assert_eq!(ops.len(), len);
                ops
            }
        };
        Program::from_ops(ops).map_err(|e| Error::Invalid(e.to_string()))
    }

    /// As [`Family::compile_membership`], refusing testers that need more than `m` cells.
    pub fn compile_within(self, n: usize, i: u64, m: usize) -> Result<Program> {
        let need = self.space_bound(n, i);
        if need > m {
            return Err(Error::Cap {
                resource: "compiled tester space",
                requested: need as u64,
                cap: m as u64,
            });
        }
        self.compile_membership(n, i)
    }

    /// Declaration in the family DSL.
    pub fn declaration(self, n: usize, i: u64) -> String {
        match self {
            Family::HammingBalls => {
                let (c, r) = Self::ball_parts(n, i);
                format!("ball center={} radius={r}", BitString::from_u64(c, n))
            }
            Family::Cylinders => format!("cylinder prefix={} n={n}", Self::cylinder_prefix(i)),
            Family::FullSpace => format!("full n={n}"),
        }
    }
}

/// One indexed family member, parsed from or printed as a DSL line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub family: Family,
    pub n: usize,
    pub index: u64,
}

impl Member {
    pub fn set(&self) -> Result<StringSet> {
        self.family.set(self.n, self.index)
    }
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family.declaration(self.n, self.index))
    }
}

impl FromStr for Member {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut words = line.split_whitespace();
        let family: Family = words
            .next()
            .ok_or_else(|| Error::Invalid("empty declaration".into()))?
            .parse()?;
        let mut fields = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("expected key=value, got {w:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("{family} declaration needs {k}=")))
        };
        let bits = |k: &str| -> Result<BitString> {
            get(k)?
                .parse()
                .map_err(|_| Error::Invalid(format!("{k} must be a bit string")))
        };
        let num = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|_| Error::Invalid(format!("{k} must be a number")))
        };
        let member = match family {
            Family::HammingBalls => {
                let c = bits("center")?;
                let n = c.len();
                let r = num("radius")?;
                if r > n {
                    return Err(Error::Invalid(format!("radius {r} exceeds n = {n}")));
                }
                Member {
                    family,
                    n,
                    index: Family::ball_index(n, c.to_u64(), r),
                }
            }
            Family::Cylinders => {
                let u = bits("prefix")?;
                let n = match fields.get("n") {
                    Some(_) => num("n")?,
                    None => u.len(),
                };
                if u.len() > n {
                    return Err(Error::Invalid(format!("prefix longer than n = {n}")));
                }
                Member {
                    family,
                    n,
                    index: Family::cylinder_index(&u),
                }
            }
            Family::FullSpace => Member {
                family,
                n: num("n")?,
                index: 0,
            },
        };
        check_cap("input length", member.n, MAX_SET_LEN)?;
        Ok(member)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySlice {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub i: usize,
    pub j: usize,
    pub mode: ComplexityMode,
    /// Sorted indices of the qualifying members.
    pub members: Vec<u64>,
}

impl FamilySlice {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn sets(&self) -> Vec<StringSet> {
        self.members
            .iter()
            .map(|&i| self.family.set(self.n, i).expect("slice indices are in range"))
            .collect()
    }

    /// The sorted index list, one per line.
    pub fn export(&self) -> String {
        self.members.iter().map(|i| format!("{i}\n")).collect()
    }
}

/// Complexity of a member under `mode`; `None` when above the search cap.
pub fn member_complexity(lab: &Lab, family: Family, n: usize, m: usize, i: u64, mode: ComplexityMode) -> Result<Option<usize>> {
    match mode {
        ComplexityMode::Declared => Ok(Some(64 - i.leading_zeros() as usize)),
        ComplexityMode::Measured => Ok(lab.cd_set(&family.set(n, i)?, m)?.value()),
    }
}

/// `A^{i,j}_{n,m}`: members with complexity at most `i` and `|A| <= 2^j`.
pub fn build_slice(lab: &Lab, family: Family, n: usize, m: usize, i: usize, j: usize, mode: ComplexityMode) -> Result<FamilySlice> {
    if mode == ComplexityMode::Measured {
        check_cap("slice complexity threshold", i, lab.cap())?;
    }
    let mut members = Vec::new();
    for (idx, set) in family.sets(n)? {
        if j < 64 && set.len() as u64 > 1u64 << j {
            continue;
        }
        if member_complexity(lab, family, n, m, idx, mode)?.is_some_and(|c| c <= i) {
            members.push(idx);
        }
    }
    Ok(FamilySlice {
        family,
        n,
        m,
        i,
        j,
        mode,
        members,
    })
}
