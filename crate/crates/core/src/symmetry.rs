//! Symmetry of information for pairs of sets.
//!
//! Forward: a pair program built from a program for `A` and a program for
//! `B` given `A`. Reverse: with `D` the pairs of complexity at most `k` and
//! `D_A` those with first component `A`, `(A, B)` is described given `A` by
//! its ordinal in `D_A`, and `A` by its ordinal among the first components
//! `U` with `|D_U| >= 2^t`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{StringSet, MAX_SET_LEN};
use crate::certificate::{ordinal_payload, CertifiedDescription, DecoderId};
use crate::complexity::{ComplexityValue, Lab};
use crate::error::{check_cap, Error, Result};
use crate::machine::{decides_pair, peak_space, Oracle, Program, COMBINATOR_OVERHEAD};

/// Every pair of subsets of `{0,1}^n`.
pub fn full_pool(n: usize) -> Result<Vec<(StringSet, StringSet)>> {
    check_cap("pool string length", 2 * n, MAX_SET_LEN)?;
    let sets: Vec<StringSet> = (0..1u64 << (1 << n)).map(|m| StringSet::from_mask(n, m)).collect();
    Ok(sets.iter().flat_map(|&a| sets.iter().map(move |&b| (a, b))).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairMember {
    pub a: StringSet,
    pub b: StringSet,
    pub cd: usize,
    /// First program deciding the pair.
    pub witness: Program,
}

/// `D`: pool pairs with `CD^m(U, V) <= k`, in the canonical order of their
/// first deciding programs.
#[derive(Clone, Debug, Serialize)]
pub struct PairFamily {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub members: Vec<PairMember>,
}

pub fn build_pair_family(lab: &Lab, pool: &[(StringSet, StringSet)], n: usize, m: usize, k: usize) -> Result<PairFamily> {
    check_cap("pair complexity bound", k, lab.cap())?;
    let found: Vec<Option<PairMember>> = pool
        .par_iter()
        .map(|&(a, b)| {
            if a.n() != n || b.n() != n {
                return Err(Error::Invalid("pool pair over the wrong length".into()));
            }
            Ok(match lab.cd_pair(&a, &b, m)? {
                ComplexityValue::Finite { value, witness } if value <= k => Some(PairMember {
                    a,
                    b,
                    cd: value,
                    witness,
                }),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    let mut members: Vec<PairMember> = found.into_iter().flatten().collect();
    members.sort_by(|x, y| x.witness.canonical_key().cmp(&y.witness.canonical_key()));
    members.dedup_by(|x, y| x.a == y.a && x.b == y.b);
    Ok(PairFamily { n, m, k, members })
}

impl PairFamily {
    /// `D_A` as positions in `D`.
    pub fn slice_by_first(&self, a: &StringSet) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i].a == *a).collect()
    }

    /// Distinct first components in order of first occurrence, with `|D_U|`.
    pub fn first_components(&self) -> Vec<(StringSet, usize)> {
        let mut order: Vec<StringSet> = Vec::new();
        let mut sizes: HashMap<u64, usize> = HashMap::new();
        for p in &self.members {
            let e = sizes.entry(p.a.mask()).or_insert(0);
            if *e == 0 {
                order.push(p.a);
            }
            *e += 1;
        }
        order.into_iter().map(|u| (u, sizes[&u.mask()])).collect()
    }

    /// First components `U` with `|D_U| >= 2^t`, in order of first occurrence.
    pub fn heavy_first(&self, t: usize) -> Vec<StringSet> {
        self.first_components()
            .into_iter()
            .filter(|&(_, s)| s >= 1 << t)
            .map(|(u, _)| u)
            .collect()
    }
}

/// `t` with `2^t <= |D_A| < 2^{t+1}`; `None` for an empty slice.
pub fn slice_exponent(size: usize) -> Option<usize> {
    (size > 0).then(|| (usize::BITS - 1 - size.leading_zeros()) as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct ForwardReport {
    pub a: StringSet,
    pub b: StringSet,
    pub cd_a: ComplexityValue,
    pub cd_b_given_a: ComplexityValue,
    /// `Pair(witness of A, witness of B given A)`.
    pub composite: Program,
    pub composite_len: usize,
    pub p: usize,
    pub composite_decides: bool,
    pub cd_pair_p: ComplexityValue,
    pub cd_pair_upper: usize,
    /// `CD^p(A, B) - CD^m(A) - CD^m(B|A)`, using the upper bound.
    pub slack: i64,
    /// `log2(CD^p(A, B) + m + n)`, with the upper bound.
    pub log_term: f64,
    pub required_c: f64,
}

impl ForwardReport {
    pub fn holds_with(&self, c: f64) -> bool {
        self.slack as f64 <= c * self.log_term + 1e-9
    }
}

/// Checks `CD^p(A, B) <= CD^m(A) + CD^m(B|A) + c log(...)` by building the
/// pair program and measuring its space.
pub fn soi_forward(lab: &Lab, a: &StringSet, b: &StringSet, m: usize) -> Result<ForwardReport> {
    let n = a.n();
    let cd_a = lab.cd_set(a, m)?;
    let cd_b_given_a = lab.cd_set_cond(b, a, m)?;
    let (Some(wa), Some(wb)) = (cd_a.witness(), cd_b_given_a.witness()) else {
        return Err(Error::NonEvaluable("a component exceeds the program-length cap".into()));
    };
    let composite = Program::pair(wa.clone(), wb.clone());
    let room = (2 * m + 2 * n).min(lab.caps().space);
    let p = peak_space(&composite, 2 * n, room, Oracle::None)
        .ok_or_else(|| Error::Invalid("pair program does not halt within 2m + 2n".into()))?
        .max(m)
        .min(lab.caps().space);
    let composite_decides = decides_pair(&composite, n, p, Oracle::None) == Some((*a, *b));
    let cd_pair_p = lab.cd_pair(a, b, p)?;
    let composite_len = composite.len();
    let mut cd_pair_upper = cd_pair_p.value().unwrap_or(usize::MAX);
    if composite_decides {
        cd_pair_upper = cd_pair_upper.min(composite_len);
    }
    debug_assert_eq!(composite_len, wa.len() + wb.len() + COMBINATOR_OVERHEAD);
    let slack = cd_pair_upper as i64 - wa.len() as i64 - wb.len() as i64;
    let log_term = ((cd_pair_upper + m + n) as f64).log2();
    Ok(ForwardReport {
        a: *a,
        b: *b,
        cd_a,
        cd_b_given_a,
        composite,
        composite_len,
        p,
        composite_decides,
        cd_pair_p,
        cd_pair_upper,
        slack,
        required_c: slack.max(0) as f64 / log_term,
        log_term,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReverseReport {
    pub k: usize,
    pub t: usize,
    pub slice_size: usize,
    /// `(A, B)` given `A`: ordinal in `D_A`, `t + 1` bits.
    pub b_given_a: CertifiedDescription,
    /// `A`: ordinal among heavy first components, `k - t + 1` bits.
    pub a: CertifiedDescription,
    pub heavy_first: usize,
    /// `heavy_first <= 2^{k-t+1}`.
    pub heavy_bound_ok: bool,
}

fn params(desc: CertifiedDescription, d: &PairFamily, t: usize) -> CertifiedDescription {
    desc.param("n", d.n as u64)
        .param("m", d.m as u64)
        .param("k", d.k as u64)
        .param("t", t as u64)
        .label("pool", "all")
}

pub fn soi_reverse(d: &PairFamily, a: &StringSet, b: &StringSet) -> Result<ReverseReport> {
    let slice = d.slice_by_first(a);
    let t = slice_exponent(slice.len()).ok_or_else(|| Error::Invalid("(A, B) is not in D".into()))?;
    let ordinal = slice
        .iter()
        .position(|&i| d.members[i].b == *b)
        .ok_or_else(|| Error::Invalid("(A, B) is not in D".into()))?;
    let heavy = d.heavy_first(t);
    let a_ordinal = heavy
        .iter()
        .position(|u| u == a)
        .expect("A is heavy at its own exponent");
    let b_given_a = params(
        CertifiedDescription::new(DecoderId::PairGivenFirst, ordinal_payload(ordinal as u64, t + 1)),
        d,
        t,
    );
    let a_desc = params(
        CertifiedDescription::new(
            DecoderId::HeavyFirstComponent,
            ordinal_payload(a_ordinal as u64, d.k - t + 1),
        ),
        d,
        t,
    );
    let heavy_first = heavy.len();
    Ok(ReverseReport {
        k: d.k,
        t,
        slice_size: slice.len(),
        b_given_a,
        a: a_desc,
        heavy_bound_ok: heavy_first as u128 <= 1u128 << (d.k - t + 1),
        heavy_first,
    })
}

fn rebuild(lab: &Lab, desc: &CertifiedDescription) -> Result<PairFamily> {
    if desc.labels.get("pool").map(String::as_str) != Some("all") {
        return Err(Error::Invalid("only the full pool can be rebuilt".into()));
    }
    let n = desc.require("n")? as usize;
    build_pair_family(lab, &full_pool(n)?, n, desc.require("m")? as usize, desc.require("k")? as usize)
}

/// Decodes `(A, B)` from its ordinal in `D_A`; `A` is available only as a
/// membership oracle.
pub fn decode_pair_given_first(lab: &Lab, desc: &CertifiedDescription, oracle: &dyn Fn(u64) -> bool) -> Result<(StringSet, StringSet)> {
    desc.expect_decoder(DecoderId::PairGivenFirst)?;
    let d = rebuild(lab, desc)?;
    let is_a = |u: &StringSet| (0..1u64 << d.n).all(|y| u.contains(y) == oracle(y));
    d.members
        .iter()
        .filter(|p| is_a(&p.a))
        .nth(desc.payload.to_u64() as usize)
        .map(|p| (p.a, p.b))
        .ok_or_else(|| Error::Invalid("ordinal beyond D_A".into()))
}

pub fn decode_heavy_first(lab: &Lab, desc: &CertifiedDescription) -> Result<StringSet> {
    desc.expect_decoder(DecoderId::HeavyFirstComponent)?;
    let d = rebuild(lab, desc)?;
    d.heavy_first(desc.require("t")? as usize)
        .get(desc.payload.to_u64() as usize)
        .copied()
        .ok_or_else(|| Error::Invalid("ordinal beyond the heavy first components".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        assert_eq!(slice_exponent(0), None);
        assert_eq!(slice_exponent(1), Some(0));
        assert_eq!(slice_exponent(5), Some(2));
    }

    #[test]
    fn pool_size() {
        assert_eq!(full_pool(2).unwrap().len(), 256);
        assert!(full_pool(4).is_err());
    }
}
