//! Model improvement: conditional indexing of models given `x`, selection of
//! an improved model through a good subfamily, and a scanner gathering
//! evidence on whether improved models always exist.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{ordinal_width, BitString, StringSet};
use crate::certificate::{ordinal_payload, CertifiedDescription, DecoderId};
use crate::complexity::{deficiencies, Interval, Lab};
use crate::error::{Error, Result};
use crate::families::{build_slice, member_complexity, ComplexityMode, Family, FamilySlice};
use crate::nwgen::{certify_member, choose_subfamily, ChosenSubfamily, SearchContext, Strategy};
use crate::subfamily::Instance;

/// A family member that is the starting model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Model {
    pub family: Family,
    pub n: usize,
    pub index: u64,
}

impl Model {
    pub fn new(family: Family, n: usize, index: u64) -> Self {
        Self { family, n, index }
    }

    pub fn set(&self) -> Result<StringSet> {
        self.family.set(self.n, self.index)
    }
}

/// `(i, j)` of a model: its complexity under `mode` and `ceil(log2 |A|)`,
/// the smallest slice holding it.
pub fn model_class(lab: &Lab, a: Model, m: usize, mode: ComplexityMode) -> Result<(usize, usize)> {
    let set = a.set()?;
    if set.is_empty() {
        return Err(Error::Invalid("the empty set is not a model".into()));
    }
    let j = ordinal_width(set.len() as u64);
    let i = member_complexity(lab, a.family, a.n, m, a.index, mode)?
        .ok_or_else(|| Error::Cap {
            resource: "model complexity",
            requested: lab.cap() as u64 + 1,
            cap: lab.cap() as u64,
        })?;
    Ok((i, j))
}

/// The slice of models not worse than `A`, and the indices in it that
/// contain `x` (the set `A'`).
pub fn not_worse_models(lab: &Lab, a: Model, x: &BitString, m: usize, mode: ComplexityMode) -> Result<(FamilySlice, Vec<u64>)> {
    let (i, j) = model_class(lab, a, m, mode)?;
    let slice = build_slice(lab, a.family, a.n, m, i, j, mode)?;
    let y = x.to_u64();
    let holders = slice
        .members
        .iter()
        .copied()
        .filter(|&idx| a.family.member(a.n, idx, y))
        .collect();
    Ok((slice, holders))
}

fn check_member(a: Model, x: &BitString) -> Result<()> {
    if x.len() != a.n || !a.set()?.contains(x.to_u64()) {
        return Err(Error::Invalid(format!("{x} is not in the model")));
    }
    Ok(())
}

/// Ordinal of `A` within `A'` in index order, written in
/// `ceil(log2 |A'|)` bits. Decoded with `x` available.
pub fn conditional_index(lab: &Lab, a: Model, x: &BitString, m: usize, mode: ComplexityMode) -> Result<CertifiedDescription> {
    check_member(a, x)?;
    let (slice, holders) = not_worse_models(lab, a, x, m, mode)?;
    let ordinal = holders
        .iter()
        .position(|&idx| idx == a.index)
        .ok_or_else(|| Error::Invalid("the model is not among the not-worse models".into()))?;
    Ok(
        CertifiedDescription::new(
            DecoderId::ConditionalIndex,
            ordinal_payload(ordinal as u64, ordinal_width(holders.len() as u64)),
        )
        .param("n", a.n as u64)
        .param("m", m as u64)
        .param("i", slice.i as u64)
        .param("j", slice.j as u64)
        .label("family", a.family.keyword())
        .label("mode", mode.to_string()),
    )
}

pub fn decode_conditional_index(lab: &Lab, desc: &CertifiedDescription, x: &BitString) -> Result<Model> {
    desc.expect_decoder(DecoderId::ConditionalIndex)?;
    let family: Family = label(desc, "family")?.parse()?;
    let mode: ComplexityMode = label(desc, "mode")?.parse()?;
    let n = desc.require("n")? as usize;
    if x.len() != n {
        return Err(Error::Invalid("condition has the wrong length".into()));
    }
    let slice = build_slice(
        lab,
        family,
        n,
        desc.require("m")? as usize,
        desc.require("i")? as usize,
        desc.require("j")? as usize,
        mode,
    )?;
    let y = x.to_u64();
    let idx = slice
        .members
        .iter()
        .copied()
        .filter(|&idx| family.member(n, idx, y))
        .nth(desc.payload.to_u64() as usize)
        .ok_or_else(|| Error::Invalid("ordinal beyond the not-worse models".into()))?;
    Ok(Model::new(family, n, idx))
}

fn label(desc: &CertifiedDescription, k: &str) -> Result<String> {
    desc.labels
        .get(k)
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("certificate lacks label {k}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct Improvement {
    pub a: Model,
    pub b: Model,
    pub b_set: StringSet,
    pub i: usize,
    pub j: usize,
    /// `floor(log2 |A'|)`.
    pub k: usize,
    pub slice_size: usize,
    pub a_prime_size: usize,
    /// Description of `A` given `x`.
    pub a_given_x: CertifiedDescription,
    /// Description of `B` without `x`.
    pub certificate: CertifiedDescription,
    pub chosen: ChosenSubfamily,
    /// `floor(log2 |B|) <= floor(log2 |A|) + 1`.
    pub size_ok: bool,
    /// `payload - (i - k)`, the part of the description beyond `i - k`.
    pub excess: f64,
    /// `2 log2(n + k)`, the logarithmic allowance for the excess.
    pub log_allowance: f64,
}

/// Finds `B` containing `x` as the first member of a good subfamily of the
/// slice of models not worse than `A`, at heavy threshold `2^k` with
/// `k = floor(log2 |A'|)`.
pub fn improve_model(
    lab: &Lab,
    a: Model,
    x: &BitString,
    m: usize,
    mode: ComplexityMode,
    strategy: Strategy,
    ctx: &SearchContext,
) -> Result<Improvement> {
    check_member(a, x)?;
    let a_given_x = conditional_index(lab, a, x, m, mode)?;
    let (slice, holders) = not_worse_models(lab, a, x, m, mode)?;
    let k = 63 - (holders.len() as u64).leading_zeros() as usize;
    let inst = Instance::new(&slice, k)?;
    let chosen = choose_subfamily(&inst, strategy, ctx)?;
    let y = x.to_u64();
    let pos = slice
        .members
        .iter()
        .zip(&chosen.mask)
        .position(|(&idx, &on)| on && a.family.member(a.n, idx, y))
        .ok_or_else(|| Error::NotFound(format!("no chosen model contains {x}")))?;
    let b = Model::new(a.family, a.n, slice.members[pos]);
    let b_set = b.set()?;
    let certificate = certify_member(&slice, &inst, &chosen, b.index, ctx)?;
    let a_class = a.set()?.size_class().expect("models are nonempty");
    let size_ok = b_set.size_class().is_some_and(|c| c <= a_class + 1);
    Ok(Improvement {
        a,
        b,
        b_set,
        i: slice.i,
        j: slice.j,
        k,
        slice_size: slice.len(),
        a_prime_size: holders.len(),
        a_given_x,
        excess: certificate.payload_len() as f64 - (slice.i as f64 - k as f64),
        log_allowance: 2.0 * ((a.n + k) as f64).log2(),
        certificate,
        chosen,
        size_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub x: String,
    pub a: u64,
    pub log_a: f64,
    pub d_lo: Option<f64>,
    pub d_hi: Option<f64>,
    /// Model containing `x` with the smallest upper end of `delta`.
    pub best_b: u64,
    pub delta_lo: Option<f64>,
    pub delta_hi: Option<f64>,
    pub gap_lo: Option<f64>,
    pub gap_hi: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisScan {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub slack_budget: f64,
    pub rows: Vec<ScanRow>,
    /// Largest lower end of the gap over all rows.
    pub worst_gap_lo: Option<f64>,
    /// Largest upper end; `None` when some row has no finite upper end.
    pub worst_gap_hi: Option<f64>,
    /// Rows whose gap certainly exceeds the budget.
    pub exceeding: usize,
    /// Rows whose gap is certainly within the budget.
    pub within: usize,
    pub undetermined: usize,
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
}

/// For every `x` and model `A` containing it: `min_B delta^{p,m}(x, B) - d^p(x|A)`
/// over models `B` containing `x`, as an interval.
pub fn hypothesis_scan(lab: &Lab, family: Family, n: usize, m: usize, p: usize, slack_budget: f64) -> Result<HypothesisScan> {
    let sets = family.sets(n)?;
    let sets = &sets;
    // deficiency intervals per (x, model)
    let pairs: Vec<(u64, usize)> = (0..1u64 << n)
        .flat_map(|x| (0..sets.len()).filter(move |&t| sets[t].1.contains(x)).map(move |t| (x, t)))
        .collect();
    let reports: Vec<(Interval, Interval)> = pairs
        .par_iter()
        .map(|&(x, t)| {
            let r = deficiencies(lab, &BitString::from_u64(x, n), &sets[t].1, p, p, m)?;
            Ok((r.d_range, r.delta_range))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for x in 0..1u64 << n {
        let mine: Vec<usize> = (0..pairs.len()).filter(|&r| pairs[r].0 == x).collect();
        // the best B minimizes the upper end of delta, ties to the lower end
        let best = *mine
            .iter()
            .min_by(|&&r, &&s| {
                let key = |r: usize| (reports[r].1.hi.unwrap_or(f64::INFINITY), reports[r].1.lo.unwrap_or(f64::NEG_INFINITY));
                key(r).partial_cmp(&key(s)).expect("deficiencies are finite or absent")
            })
            .expect("every string lies in some model");
        let delta_lo = mine.iter().map(|&r| reports[r].1.lo).fold(None, min_opt);
        let delta_hi = reports[best].1.hi;
        for &r in &mine {
            let d = reports[r].0;
            rows.push(ScanRow {
                x: BitString::from_u64(x, n).to_string(),
                a: sets[pairs[r].1].0,
                log_a: sets[pairs[r].1].1.log_size(),
                d_lo: d.lo,
                d_hi: d.hi,
                best_b: sets[pairs[best].1].0,
                delta_lo,
                delta_hi,
                gap_lo: delta_lo.zip(d.hi).map(|(a, b)| a - b),
                gap_hi: delta_hi.zip(d.lo).map(|(a, b)| a - b),
            });
        }
    }
    let worst_gap_lo = rows.iter().filter_map(|r| r.gap_lo).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
    let worst_gap_hi = rows
        .iter()
        .map(|r| r.gap_hi)
        .try_fold(f64::NEG_INFINITY, |a, v| v.map(|v| a.max(v)));
    let exceeding = rows.iter().filter(|r| r.gap_lo.is_some_and(|g| g > slack_budget)).count();
    let within = rows.iter().filter(|r| r.gap_hi.is_some_and(|g| g <= slack_budget)).count();
    Ok(HypothesisScan {
        family,
        n,
        m,
        p,
        slack_budget,
        undetermined: rows.len() - exceeding - within,
        rows,
        worst_gap_lo,
        worst_gap_hi,
        exceeding,
        within,
    })
}
