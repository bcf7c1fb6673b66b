//! Random subfamilies of a slice and the properties they must satisfy.
//!
//! A slice member belongs to `B` independently with probability
//! `q = min(1, 2^{-k}(n+2) ln 2)`. `B` is good if it is small, either overall
//! (property (1)) or per part of `2^k` consecutive slots (property (1*)), and
//! if it hits every heavy string, one contained in at least `2^k` slice
//! members (property (2)).

mod circuit;
pub mod tail;

pub use circuit::Circuit;
pub use tail::{binomial_tail, coverage_tail, Dyadic, CoverageTail, TailChain};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::StringSet;
use crate::error::{check_cap, Error, Result};
use crate::families::FamilySlice;

/// A slice prepared for subfamily experiments at heavy threshold `2^k`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub i: usize,
    pub k: usize,
    pub sets: Vec<StringSet>,
    heavy: Vec<(u64, Vec<usize>)>,
}

impl Instance {
    pub fn new(slice: &FamilySlice, k: usize) -> Result<Self> {
        Self::from_sets(slice.sets(), slice.n, slice.i, k)
    }

    pub fn from_sets(sets: Vec<StringSet>, n: usize, i: usize, k: usize) -> Result<Self> {
        check_cap("heavy threshold exponent", k, 62)?;
        check_cap("slice complexity threshold", i, 62)?;
        if let Some(s) = sets.iter().find(|s| s.n() != n) {
            return Err(Error::Invalid(format!("slice mixes lengths {} and {n}", s.n())));
        }
        let heavy = (0..1u64 << n)
            .filter_map(|y| {
                let holders: Vec<usize> = (0..sets.len()).filter(|&t| sets[t].contains(y)).collect();
                (holders.len() as u64 >= 1 << k).then_some((y, holders))
            })
            .collect();
        Ok(Self { n, i, k, sets, heavy })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `min(1, 2^{-k}(n+2) ln 2)`.
    pub fn q(&self) -> f64 {
        inclusion_probability(self.k, self.n)
    }

    /// Heavy strings with the members containing each.
    pub fn heavy(&self) -> &[(u64, Vec<usize>)] {
        &self.heavy
    }

    /// Slots after padding the slice up to `2^i` entries.
    pub fn slots(&self) -> usize {
        self.len().max(1 << self.i)
    }

    /// Parts of `2^k` slots each.
    pub fn parts(&self) -> usize {
        self.slots().div_ceil(1 << self.k)
    }

    /// Property (1) bound `2^{i-k+2} (n+k)^2 ln 2`.
    pub fn bound1(&self) -> f64 {
        2f64.powi(self.i as i32 - self.k as i32 + 2) * ((self.n + self.k) as f64).powi(2) * std::f64::consts::LN_2
    }

    /// Property (1*) per-part bound `(n+k)^2`.
    pub fn bound1_star(&self) -> usize {
        (self.n + self.k).pow(2)
    }

    /// Whether `|slice| <= 2^i`, which the Markov step of the success bound needs.
    pub fn meets_preconditions(&self) -> bool {
        self.len() <= 1 << self.i
    }

    pub fn sample(&self, seed: u64) -> Subfamily {
        self.sample_stream(seed, 0)
    }

    pub fn sample_stream(&self, seed: u64, stream: u64) -> Subfamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let q = self.q();
        Subfamily {
            mask: (0..self.len()).map(|_| rng.gen_bool(q)).collect(),
            seed,
            q,
        }
    }

    pub fn check(&self, mask: &[bool]) -> PropertyVerdict {
        assert_eq!(mask.len(), self.len(), "mask length must equal slice size");
        let size = mask.iter().filter(|&&b| b).count();
        let per = 1usize << self.k;
        let mut worst_part = (0usize, 0usize);
        for (p, chunk) in mask.chunks(per).enumerate() {
            let c = chunk.iter().filter(|&&b| b).count();
            if c > worst_part.1 {
                worst_part = (p, c);
            }
        }
        let uncovered = self
            .heavy
            .iter()
            .find(|(_, holders)| !holders.iter().any(|&t| mask[t]))
            .map(|(y, _)| *y);
        let bound1 = self.bound1();
        let prop1 = (size as f64) <= bound1;
        let prop1_star = worst_part.1 <= self.bound1_star();
        PropertyVerdict {
            prop1,
            prop1_star,
            prop2: uncovered.is_none(),
            size,
            bound1,
            over_full_part: (!prop1_star).then_some(worst_part.0),
            uncovered,
        }
    }

    pub fn circuit(&self) -> Circuit {
        Circuit {
            n: self.n,
            clauses: self.heavy.clone(),
        }
    }
}

pub fn inclusion_probability(k: usize, n: usize) -> f64 {
    (2f64.powi(-(k as i32)) * (n as f64 + 2.0) * std::f64::consts::LN_2).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subfamily {
    /// One bit per slice member.
    pub mask: Vec<bool>,
    pub seed: u64,
    pub q: f64,
}

impl Subfamily {
    pub fn members(&self) -> Vec<usize> {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(t, _)| t).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyVerdict {
    pub prop1: bool,
    pub prop1_star: bool,
    pub prop2: bool,
    pub size: usize,
    pub bound1: f64,
    /// A part holding more than `(n+k)^2` chosen members.
    pub over_full_part: Option<usize>,
    /// A heavy string no chosen member contains.
    pub uncovered: Option<u64>,
}

impl PropertyVerdict {
    pub fn good(&self) -> bool {
        self.prop1_star && self.prop2
    }
}

pub fn sample_subfamily(slice: &FamilySlice, k: usize, seed: u64) -> Result<Subfamily> {
    if slice.is_empty() {
        return Err(Error::Invalid("cannot sample from an empty slice".into()));
    }
    Ok(Instance::new(slice, k)?.sample(seed))
}

pub fn check_properties(slice: &FamilySlice, b: &Subfamily, k: usize) -> Result<PropertyVerdict> {
    let inst = Instance::new(slice, k)?;
    if b.mask.len() != inst.len() {
        return Err(Error::Invalid("subfamily mask does not match the slice".into()));
    }
    Ok(inst.check(&b.mask))
}

pub fn build_prop2_circuit(slice: &FamilySlice, k: usize) -> Result<Circuit> {
    Ok(Instance::new(slice, k)?.circuit())
}

pub const MIN_TRIALS: usize = 100;

#[derive(Clone, Debug, Serialize)]
pub struct SuccessEstimate {
    pub trials: usize,
    pub seed: u64,
    pub q: f64,
    pub slice_size: usize,
    pub heavy_strings: usize,
    pub preconditions: bool,
    /// Frequency of `(1) and (2)`.
    pub freq_1_and_2: f64,
    /// Frequency of `(1*) and (2)`.
    pub freq_1star_and_2: f64,
    /// `sqrt(p0 (1 - p0) / trials)` at `p0 = 1/2`.
    pub sigma_half: f64,
    /// `sqrt(p0 (1 - p0) / trials)` at `p0 = 1/3`.
    pub sigma_third: f64,
    pub meets_half: bool,
    pub meets_third: bool,
    /// Samples where (1*) held but (1) did not; always zero.
    pub star_without_1: usize,
}

/// Monte Carlo success rates; trial `t` samples stream `t` of `seed`.
pub fn estimate_success(inst: &Instance, trials: usize, seed: u64) -> Result<SuccessEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::Invalid(format!(
            "{trials} trials is too few; at least {MIN_TRIALS} are needed"
        )));
    }
    let counts = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let v = inst.check(&inst.sample_stream(seed, t).mask);
            [
                (v.prop1 && v.prop2) as usize,
                (v.prop1_star && v.prop2) as usize,
                (v.prop1_star && !v.prop1) as usize,
            ]
        })
        .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let n = trials as f64;
    let sigma = |p0: f64| (p0 * (1.0 - p0) / n).sqrt();
    let f12 = counts[0] as f64 / n;
    let f1s2 = counts[1] as f64 / n;
    let (sh, st) = (sigma(0.5), sigma(1.0 / 3.0));
    Ok(SuccessEstimate {
        trials,
        seed,
        q: inst.q(),
        slice_size: inst.len(),
        heavy_strings: inst.heavy.len(),
        preconditions: inst.meets_preconditions(),
        freq_1_and_2: f12,
        freq_1star_and_2: f1s2,
        sigma_half: sh,
        sigma_third: st,
        meets_half: f12 >= 0.5 - 3.0 * sh,
        meets_third: f1s2 >= 1.0 / 3.0 - 3.0 * st,
        star_without_1: counts[2],
    })
}
