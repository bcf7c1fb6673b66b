//! A toy Nisan–Wigderson generator and the first-good-seed search built on it.
//!
//! A design is a list of `ℓ`-subsets of the seed positions with small
//! pairwise intersections; output bit `t` is a fixed predicate applied to the
//! seed restricted to subset `t`. Seeds are scanned in lexicographic order and
//! the first one whose image is a good subfamily wins, so the subfamily is
//! described by the search parameters alone.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{ordinal_width, BitString, StringSet};
use crate::certificate::{ordinal_payload, CertifiedDescription, DecoderId};
use crate::complexity::Lab;
use crate::error::{check_cap, Error, Result};
use crate::families::{build_slice, ComplexityMode, Family, FamilySlice};
use crate::subfamily::{Instance, PropertyVerdict};

/// Longest seed scanned exhaustively.
pub const MAX_SEED_BITS: usize = 24;
/// Largest slice the brute-force mask search accepts.
pub const MAX_BRUTEFORCE_SLICE: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NwDesign {
    /// Seed length `f`.
    pub seed_len: usize,
    /// Subset size `ℓ`.
    pub subset_len: usize,
    /// Declared bound on pairwise intersections.
    pub bound: usize,
    pub subsets: Vec<Vec<usize>>,
    /// `"polynomial q=…"` or `"greedy"`.
    pub construction: String,
}

impl NwDesign {
    pub fn output_len(&self) -> usize {
        self.subsets.len()
    }

    /// Largest pairwise intersection, by direct count.
    pub fn max_intersection(&self) -> usize {
        let mut worst = 0;
        for (a, s) in self.subsets.iter().enumerate() {
            for t in &self.subsets[a + 1..] {
                worst = worst.max(s.iter().filter(|x| t.contains(x)).count());
            }
        }
        worst
    }

    pub fn is_valid(&self) -> bool {
        self.subsets
            .iter()
            .all(|s| s.len() == self.subset_len && s.iter().all(|&x| x < self.seed_len))
            && self.max_intersection() <= self.bound
    }
}

/// One subset per line, positions separated by spaces.
impl fmt::Display for NwDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# f={} l={} bound={} {}", self.seed_len, self.subset_len, self.bound, self.construction)?;
        for s in &self.subsets {
            let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", v.join(" "))?;
        }
        Ok(())
    }
}

/// Arithmetic in GF(q) for the supported prime and binary-extension orders.
#[derive(Clone, Copy, Debug)]
struct Field {
    q: usize,
    /// Reduction polynomial for `q = 2^e`, zero for primes.
    modulus: usize,
}

impl Field {
    fn new(q: usize) -> Option<Self> {
        match q {
            2 | 3 | 5 | 7 | 11 | 13 => Some(Self { q, modulus: 0 }),
            4 => Some(Self { q, modulus: 0b111 }),
            8 => Some(Self { q, modulus: 0b1011 }),
            16 => Some(Self { q, modulus: 0b10011 }),
            _ => None,
        }
    }

    fn add(self, a: usize, b: usize) -> usize {
        if self.modulus == 0 {
            (a + b) % self.q
        } else {
            a ^ b
        }
    }

    fn mul(self, a: usize, b: usize) -> usize {
        if self.modulus == 0 {
            return a * b % self.q;
        }
        let mut r = 0;
        let (mut a, mut b) = (a, b);
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & self.q != 0 {
                a ^= self.modulus;
            }
        }
        r
    }
}

/// Builds a design with `outputs` subsets. Uses polynomials of degree at most
/// `bound` over GF(ℓ) when `f = ℓ²`, and a greedy lexicographic scan of
/// `ℓ`-subsets otherwise.
pub fn make_design(seed_len: usize, outputs: usize, subset_len: usize, bound: usize) -> Result<NwDesign> {
    if subset_len > seed_len {
        return Err(Error::Invalid(format!(
            "subset size {subset_len} exceeds the seed length {seed_len}"
        )));
    }
    if outputs == 0 {
        return Err(Error::Invalid("a design needs at least one output".into()));
    }
    if outputs == 1 {
        return Ok(NwDesign {
            seed_len,
            subset_len,
            bound,
            subsets: vec![(0..subset_len).collect()],
            construction: "single".into(),
        });
    }
    if let Some(field) = Field::new(subset_len).filter(|_| seed_len == subset_len * subset_len) {
        let q = subset_len;
        // distinct polynomials of degree < q are distinct functions
        let degree = (0..q.min(bound + 1)).find(|&d| (q as f64).powi(d as i32 + 1) >= outputs as f64);
        if let Some(d) = degree {
            let subsets = (0..outputs)
                .map(|mut idx| {
                    let coeffs: Vec<usize> = (0..=d)
                        .map(|_| {
                            let c = idx % q;
                            idx /= q;
                            c
                        })
                        .collect();
                    (0..q)
                        .map(|a| {
                            let v = coeffs.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, a), c));
                            a * q + v
                        })
                        .collect()
                })
                .collect();
            return Ok(NwDesign {
                seed_len,
                subset_len,
                bound,
                subsets,
                construction: format!("polynomial q={q} degree={d}"),
            });
        }
    }
    greedy_design(seed_len, outputs, subset_len, bound)
}

fn greedy_design(seed_len: usize, outputs: usize, subset_len: usize, bound: usize) -> Result<NwDesign> {
    check_cap("design seed length", seed_len, MAX_SEED_BITS)?;
    let mut chosen: Vec<u32> = Vec::new();
    let full: u64 = 1 << seed_len;
    let mut s: u64 = (1 << subset_len) - 1;
    while s < full && chosen.len() < outputs {
        let cand = s as u32;
        if chosen.iter().all(|&c| (c & cand).count_ones() as usize <= bound) {
            chosen.push(cand);
        }
        if s == 0 {
            break;
        }
        // next subset of the same size (Gosper)
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    if chosen.len() < outputs {
        return Err(Error::NotFound(format!(
            "only {} subsets of size {subset_len} in [0, {seed_len}) have pairwise intersections <= {bound}; {outputs} needed",
            chosen.len()
        )));
    }
    Ok(NwDesign {
        seed_len,
        subset_len,
        bound,
        subsets: chosen
            .iter()
            .map(|&c| (0..seed_len).filter(|&x| c >> x & 1 == 1).collect())
            .collect(),
        construction: "greedy".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HardPredicate {
    pub arity: usize,
    /// Entry `v` is the value on the input whose bits, first argument most
    /// significant, spell `v`.
    pub table: Vec<bool>,
    pub name: String,
}

impl HardPredicate {
    pub fn from_fn(arity: usize, name: &str, f: impl Fn(u64) -> bool) -> Self {
        Self {
            arity,
            table: (0..1u64 << arity).map(f).collect(),
            name: name.into(),
        }
    }

    /// Inner product of the two halves, xor the last bit for odd arity.
    pub fn inner_product(arity: usize) -> Self {
        Self::from_fn(arity, "ip", |v| {
            let bit = |i: usize| v >> (arity - 1 - i) & 1;
            let mut acc = 0;
            for i in 0..arity / 2 {
                acc ^= bit(2 * i) & bit(2 * i + 1);
            }
            if arity % 2 == 1 {
                acc ^= bit(arity - 1);
            }
            acc == 1
        })
    }

    pub fn parity(arity: usize) -> Self {
        Self::from_fn(arity, "parity", |v| v.count_ones() % 2 == 1)
    }

    pub fn majority(arity: usize) -> Self {
        Self::from_fn(arity, "majority", |v| 2 * v.count_ones() as usize > arity)
    }

    pub fn constant(arity: usize, value: bool) -> Self {
        Self::from_fn(arity, if value { "const1" } else { "const0" }, |_| value)
    }

    /// `ip`, `parity`, `majority`, `const0`, `const1`, or a truth table of
    /// `2^arity` bits.
    pub fn parse(spec: &str, arity: usize) -> Result<Self> {
        check_cap("predicate arity", arity, 16)?;
        Ok(match spec {
            "ip" => Self::inner_product(arity),
            "parity" => Self::parity(arity),
            "majority" => Self::majority(arity),
            "const0" => Self::constant(arity, false),
            "const1" => Self::constant(arity, true),
            bits => {
                let t = BitString::from_str(bits)
                    .map_err(|_| Error::Invalid(format!("unknown predicate {spec:?}")))?;
                if t.len() != 1 << arity {
                    return Err(Error::Invalid(format!(
                        "truth table has {} entries, arity {arity} needs {}",
                        t.len(),
                        1 << arity
                    )));
                }
                Self {
                    arity,
                    table: t.bits().to_vec(),
                    name: "table".into(),
                }
            }
        })
    }

    pub fn eval(&self, args: &[bool]) -> bool {
        let v = args.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        self.table[v]
    }

    pub fn table_string(&self) -> String {
        BitString::from_bits(self.table.clone()).to_string()
    }
}

/// `G(seed)`: bit `t` is the predicate on the seed restricted to subset `t`.
pub fn nw_generate(design: &NwDesign, predicate: &HardPredicate, seed: &BitString) -> Result<BitString> {
    if seed.len() != design.seed_len {
        return Err(Error::Invalid(format!(
            "seed has {} bits, the design needs {}",
            seed.len(),
            design.seed_len
        )));
    }
    if predicate.arity != design.subset_len {
        return Err(Error::Invalid("predicate arity differs from the subset size".into()));
    }
    Ok(generate(design, predicate, seed.bits()))
}

fn generate(design: &NwDesign, predicate: &HardPredicate, seed: &[bool]) -> BitString {
    let mut args = vec![false; design.subset_len];
    BitString::from_bits(
        design
            .subsets
            .iter()
            .map(|s| {
                for (a, &x) in args.iter_mut().zip(s) {
                    *a = seed[x];
                }
                predicate.eval(&args)
            })
            .collect(),
    )
}

/// Generator plus the rule turning its output into a subfamily mask.
#[derive(Clone, Debug, Serialize)]
pub struct SearchSpec {
    pub design: NwDesign,
    pub predicate: HardPredicate,
    /// Generator bits read per slice member.
    pub bits_per_member: usize,
}

impl SearchSpec {
    /// Field size 4 (seed length 16) when it fits, otherwise the greedy
    /// construction; inner-product predicate; the fewest bits per member
    /// with `q 2^r >= 1`.
    pub fn default_for(inst: &Instance) -> Result<Self> {
        let q = inst.q();
        let r = (1..=16).find(|&r| q * (1u64 << r) as f64 >= 1.0).unwrap_or(16);
        let design = make_design(16, (inst.len() * r).max(1), 4, 3)?;
        Ok(Self {
            design,
            predicate: HardPredicate::inner_product(4),
            bits_per_member: r,
        })
    }

    pub fn new(design: NwDesign, predicate: HardPredicate, bits_per_member: usize) -> Result<Self> {
        if predicate.arity != design.subset_len {
            return Err(Error::Invalid("predicate arity differs from the subset size".into()));
        }
        if bits_per_member == 0 || bits_per_member > 16 {
            return Err(Error::Invalid("bits per member must be in 1..=16".into()));
        }
        Ok(Self {
            design,
            predicate,
            bits_per_member,
        })
    }

    /// Member `t` is included when its `r` bits read below `round(q 2^r)`.
    pub fn mask(&self, output: &BitString, members: usize, q: f64) -> Vec<bool> {
        let r = self.bits_per_member;
        let threshold = (q * (1u64 << r) as f64).round() as u64;
        (0..members)
            .map(|t| {
                let v = output.bits()[t * r..(t + 1) * r]
                    .iter()
                    .fold(0u64, |a, &b| a << 1 | b as u64);
                v < threshold
            })
            .collect()
    }

    fn check(&self, members: usize) -> Result<()> {
        check_cap("seed length", self.design.seed_len, MAX_SEED_BITS)?;
        let need = members * self.bits_per_member;
        if self.design.output_len() < need {
            return Err(Error::Invalid(format!(
                "generator outputs {} bits, the slice needs {need}",
                self.design.output_len()
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!(
            "f={} l={} bound={} r={} predicate={}",
            self.design.seed_len, self.design.subset_len, self.design.bound, self.bits_per_member, self.predicate.name
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedSearch {
    pub seed: BitString,
    /// Seeds examined in order before success, inclusive.
    pub seeds_scanned: u64,
    pub mask: Vec<bool>,
    pub verdict: PropertyVerdict,
    /// Bits the scan keeps live: one seed, one generator output, one mask.
    pub scan_memory_bits: usize,
}

/// First seed, in lexicographic order, whose image passes (1*) and (2).
pub fn derandomized_search(inst: &Instance, spec: &SearchSpec) -> Result<SeedSearch> {
    spec.check(inst.len())?;
    let f = spec.design.seed_len;
    let q = inst.q();
    let found = (0..1u64 << f).into_par_iter().find_first(|&s| {
        let out = generate(&spec.design, &spec.predicate, BitString::from_u64(s, f).bits());
        inst.check(&spec.mask(&out, inst.len(), q)).good()
    });
    let s = found.ok_or_else(|| Error::NotFound(format!("none of the 2^{f} seeds yields a good subfamily")))?;
    let seed = BitString::from_u64(s, f);
    let out = generate(&spec.design, &spec.predicate, seed.bits());
    let mask = spec.mask(&out, inst.len(), q);
    let verdict = inst.check(&mask);
    Ok(SeedSearch {
        seed,
        seeds_scanned: s + 1,
        mask,
        verdict,
        scan_memory_bits: f + spec.design.output_len() + inst.len(),
    })
}

/// Lexicographically first good mask, member 0 as the most significant bit.
pub fn bruteforce_search(inst: &Instance) -> Result<(Vec<bool>, PropertyVerdict)> {
    let l = inst.len();
    check_cap("slice size for brute force", l, MAX_BRUTEFORCE_SLICE)?;
    let to_mask = |v: u64| -> Vec<bool> { (0..l).map(|t| v >> (l - 1 - t) & 1 == 1).collect() };
    let v = (0..1u64 << l)
        .into_par_iter()
        .find_first(|&v| inst.check(&to_mask(v)).good())
        .ok_or_else(|| Error::NotFound("no good subfamily exists".into()))?;
    let mask = to_mask(v);
    let verdict = inst.check(&mask);
    Ok((mask, verdict))
}

/// First Monte Carlo trial (stream `t` of `seed`) whose sample is good.
pub fn monte_carlo_search(inst: &Instance, seed: u64, max_trials: u64) -> Result<(u64, Vec<bool>, PropertyVerdict)> {
    let t = (0..max_trials)
        .into_par_iter()
        .find_first(|&t| inst.check(&inst.sample_stream(seed, t).mask).good())
        .ok_or_else(|| Error::NotFound(format!("no good sample in {max_trials} trials")))?;
    let mask = inst.sample_stream(seed, t).mask;
    let verdict = inst.check(&mask);
    Ok((t, mask, verdict))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Bruteforce,
    Nw,
    Mc,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Bruteforce => "bruteforce",
            Strategy::Nw => "nw",
            Strategy::Mc => "mc",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bruteforce" => Ok(Strategy::Bruteforce),
            "nw" => Ok(Strategy::Nw),
            "mc" => Ok(Strategy::Mc),
            _ => Err(Error::Invalid(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Payload width for an ordinal in a subfamily satisfying (1*):
/// `ceil(log2 min(parts (n+k)^2, |slice|))`.
pub fn ordinal_payload_width(inst: &Instance) -> usize {
    ordinal_width((inst.parts() * inst.bound1_star()).min(inst.len()) as u64)
}

/// Good subfamily chosen by `strategy`, with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct ChosenSubfamily {
    pub strategy: Strategy,
    pub mask: Vec<bool>,
    pub verdict: PropertyVerdict,
    pub seed: Option<BitString>,
    /// Monte Carlo trial index, which the decoder must be told.
    pub trial: Option<u64>,
}

/// Options for reproducing a subfamily search; fixed per experiment.
#[derive(Clone, Debug)]
pub struct SearchContext {
    pub spec: Option<SearchSpec>,
    pub mc_seed: u64,
    pub mc_trials: u64,
}

impl Default for SearchContext {
    fn default() -> Self {
        Self {
            spec: None,
            mc_seed: 0,
            mc_trials: 10_000,
        }
    }
}

impl SearchContext {
    fn spec_for(&self, inst: &Instance) -> Result<SearchSpec> {
        match &self.spec {
            Some(s) => Ok(s.clone()),
            None => SearchSpec::default_for(inst),
        }
    }
}

pub fn choose_subfamily(inst: &Instance, strategy: Strategy, ctx: &SearchContext) -> Result<ChosenSubfamily> {
    Ok(match strategy {
        Strategy::Bruteforce => {
            let (mask, verdict) = bruteforce_search(inst)?;
            ChosenSubfamily {
                strategy,
                mask,
                verdict,
                seed: None,
                trial: None,
            }
        }
        Strategy::Nw => {
            let r = derandomized_search(inst, &ctx.spec_for(inst)?)?;
            ChosenSubfamily {
                strategy,
                mask: r.mask,
                verdict: r.verdict,
                seed: Some(r.seed),
                trial: None,
            }
        }
        Strategy::Mc => {
            let (t, mask, verdict) = monte_carlo_search(inst, ctx.mc_seed, ctx.mc_trials)?;
            ChosenSubfamily {
                strategy,
                mask,
                verdict,
                seed: None,
                trial: Some(t),
            }
        }
    })
}

/// Describes `target` (a slice index) as its ordinal among the chosen
/// members. Parameters `(n, m, i, j, k)` are charged; the Monte Carlo trial
/// index is charged too since the decoder cannot find it alone.
pub fn certify_member(slice: &FamilySlice, inst: &Instance, chosen: &ChosenSubfamily, target: u64, ctx: &SearchContext) -> Result<CertifiedDescription> {
    let pos = slice
        .members
        .iter()
        .position(|&i| i == target)
        .ok_or_else(|| Error::Invalid(format!("index {target} is not in the slice")))?;
    if !chosen.mask[pos] {
        return Err(Error::Invalid(format!("index {target} is not in the chosen subfamily")));
    }
    let ordinal = chosen.mask[..pos].iter().filter(|&&b| b).count() as u64;
    let width = ordinal_payload_width(inst);
    let mut d = CertifiedDescription::new(DecoderId::SubfamilyOrdinal, ordinal_payload(ordinal, width))
        .param("n", slice.n as u64)
        .param("m", slice.m as u64)
        .param("i", slice.i as u64)
        .param("j", slice.j as u64)
        .param("k", inst.k as u64)
        .label("family", slice.family.keyword())
        .label("mode", slice.mode.to_string())
        .label("strategy", chosen.strategy.to_string());
    match chosen.strategy {
        Strategy::Nw => d = d.label("generator", ctx.spec_for(inst)?.label()),
        Strategy::Mc => {
            d = d
                .param("trial", chosen.trial.expect("Monte Carlo choices carry a trial"))
                .label("mc_seed", ctx.mc_seed.to_string())
        }
        Strategy::Bruteforce => {}
    }
    Ok(d)
}

/// Rebuilds the slice and the subfamily from the parameters and returns the
/// described set with its slice index.
pub fn decode_member(lab: &Lab, desc: &CertifiedDescription, ctx: &SearchContext) -> Result<(u64, StringSet)> {
    desc.expect_decoder(DecoderId::SubfamilyOrdinal)?;
    let label = |k: &str| {
        desc.labels
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("certificate lacks label {k}")))
    };
    let family: Family = label("family")?.parse()?;
    let mode: ComplexityMode = label("mode")?.parse()?;
    let strategy: Strategy = label("strategy")?.parse()?;
    let n = desc.require("n")? as usize;
    let m = desc.require("m")? as usize;
    let i = desc.require("i")? as usize;
    let j = desc.require("j")? as usize;
    let k = desc.require("k")? as usize;
    let slice = build_slice(lab, family, n, m, i, j, mode)?;
    let inst = Instance::new(&slice, k)?;
    let mask = match strategy {
        Strategy::Mc => {
            let t = desc.require("trial")?;
            let seed: u64 = label("mc_seed")?
                .parse()
                .map_err(|_| Error::Invalid("bad mc_seed label".into()))?;
            inst.sample_stream(seed, t).mask
        }
        _ => choose_subfamily(&inst, strategy, ctx)?.mask,
    };
    let ordinal = desc.payload.to_u64() as usize;
    let pos = mask
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .nth(ordinal)
        .map(|(p, _)| p)
        .ok_or_else(|| Error::Invalid("ordinal beyond the subfamily".into()))?;
    let idx = slice.members[pos];
    Ok((idx, family.set(n, idx)?))
}

/// Fractions of good subfamilies under the generator (over all seeds) and
/// under independent inclusion with the same rounded probability (over all
/// masks, weighted).
#[derive(Clone, Debug, Serialize)]
pub struct SeedQuality {
    pub good_seed_fraction: f64,
    pub good_mask_fraction: f64,
    pub difference: f64,
}

pub fn seed_quality(inst: &Instance, spec: &SearchSpec) -> Result<SeedQuality> {
    spec.check(inst.len())?;
    let l = inst.len();
    check_cap("slice size for brute force", l, MAX_BRUTEFORCE_SLICE)?;
    let f = spec.design.seed_len;
    let q = inst.q();
    let good_seeds = (0..1u64 << f)
        .into_par_iter()
        .filter(|&s| {
            let out = generate(&spec.design, &spec.predicate, BitString::from_u64(s, f).bits());
            inst.check(&spec.mask(&out, l, q)).good()
        })
        .count();
    let r = spec.bits_per_member;
    let threshold = (q * (1u64 << r) as f64).round() as u64;
    let pin = (threshold.min(1 << r) as f64) / (1u64 << r) as f64;
    let good_mass: f64 = (0..1u64 << l)
        .into_par_iter()
        .map(|v| {
            let mask: Vec<bool> = (0..l).map(|t| v >> t & 1 == 1).collect();
            if inst.check(&mask).good() {
                let ones = v.count_ones() as i32;
                pin.powi(ones) * (1.0 - pin).powi(l as i32 - ones)
            } else {
                0.0
            }
        })
        .sum();
    let gs = good_seeds as f64 / (1u64 << f) as f64;
    Ok(SeedQuality {
        good_seed_fraction: gs,
        good_mask_fraction: good_mass,
        difference: (gs - good_mass).abs(),
    })
}
