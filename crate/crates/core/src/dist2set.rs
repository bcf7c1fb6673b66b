//! From a space-bounded sampler to a small set model.
//!
//! The pipeline brackets `P(x)` between `2^{-k}` and `2^{-k+1}`, builds a
//! randomized tester accepting strings whose estimated probability clears
//! `3 2^{-k-3}`, derandomizes it by an exact majority over its random tapes,
//! and returns the set the deterministic tester accepts.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::bits::{BitString, StringSet, MAX_SET_LEN};
use crate::certificate::{CertifiedDescription, DecoderId};
use crate::error::{check_cap, Error, Result};
use crate::machine::{assemble, disassemble, run, Cond, MachineConfig, Op, Outcome, Program};

/// Longest random tape enumerated.
pub const MAX_TAPE_LEN: usize = 16;
/// Largest `N R` for which a tester's own tapes are enumerated.
pub const MAX_TESTER_TAPE: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sampler {
    pub program: Program,
    /// Output length.
    pub n: usize,
    pub tape_len: usize,
    pub space: usize,
}

impl Sampler {
    pub fn new(program: Program, n: usize, tape_len: usize, space: usize) -> Result<Self> {
        check_cap("random tape length", tape_len, MAX_TAPE_LEN)?;
        check_cap("output length", n, MAX_SET_LEN)?;
        if space == 0 {
            return Err(Error::Invalid("a sampler needs at least one work cell".into()));
        }
        Ok(Self {
            program,
            n,
            tape_len,
            space,
        })
    }

    /// The complexity charge: the program length in bits.
    pub fn charge(&self) -> usize {
        self.program.len()
    }

    pub fn run_tape(&self, tape: &[bool]) -> Outcome {
        run(&self.program, &MachineConfig::new(self.space, &[]).with_random_tape(tape)).outcome
    }

    /// A header line `sampler n=3 R=3 m=1` followed by assembly.
    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines();
        let header = lines
            .by_ref()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .ok_or_else(|| Error::Invalid("empty sampler".into()))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("sampler") {
            return Err(Error::Invalid("sampler text must start with `sampler n=.. R=.. m=..`".into()));
        }
        let mut fields = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("bad header field {w:?}")))?;
            let v: usize = v.parse().map_err(|_| Error::Invalid(format!("bad number in {w:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("sampler header lacks {k}")))
        };
        let body: Vec<&str> = lines.collect();
        let program = assemble(&body.join("\n")).map_err(|e| Error::Invalid(e.to_string()))?;
        Self::new(program, get("n")?, get("R")?, get("m")?)
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sampler n={} R={} m={}", self.n, self.tape_len, self.space)?;
        f.write_str(&disassemble(&self.program))
    }
}

/// The output of every tape and the resulting exact distribution.
#[derive(Clone, Debug, Serialize)]
pub struct InducedDistribution {
    pub n: usize,
    pub tape_len: usize,
    /// Output of tape `t`, whose bits read `t` most significant first.
    pub outputs: Vec<u64>,
    /// Tapes producing each output; probabilities are these over `2^R`.
    pub counts: BTreeMap<u64, u64>,
}

impl InducedDistribution {
    pub fn tapes(&self) -> u64 {
        1 << self.tape_len
    }

    pub fn count(&self, y: u64) -> u64 {
        self.counts.get(&y).copied().unwrap_or(0)
    }

    pub fn probability(&self, y: u64) -> f64 {
        self.count(y) as f64 / self.tapes() as f64
    }

    pub fn support(&self) -> Vec<u64> {
        self.counts.keys().copied().collect()
    }
}

fn tape_bits(t: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| t >> (len - 1 - i) & 1 == 1).collect()
}

pub fn exact_distribution(s: &Sampler) -> Result<InducedDistribution> {
    let outputs = (0..1u64 << s.tape_len)
        .into_par_iter()
        .map(|t| match s.run_tape(&tape_bits(t, s.tape_len)) {
            Outcome::Output(y) if y.len() == s.n => Ok(y.to_u64()),
            Outcome::Output(y) => Err(Error::Invalid(format!(
                "sampler printed {} bits on tape {t}, expected {}",
                y.len(),
                s.n
            ))),
            other => Err(Error::Invalid(format!("sampler ends in {other:?} on tape {t}"))),
        })
        .collect::<Result<Vec<u64>>>()?;
    let mut counts = BTreeMap::new();
    for &y in &outputs {
        *counts.entry(y).or_insert(0) += 1;
    }
    Ok(InducedDistribution {
        n: s.n,
        tape_len: s.tape_len,
        outputs,
        counts,
    })
}

/// Samples needed so that `2 exp(-2 N eps^2) <= 1/3`.
pub fn hoeffding_samples(epsilon: f64) -> u64 {
    (6f64.ln() / (2.0 * epsilon * epsilon)).ceil() as u64
}

/// `log2` of the sample count the unscaled construction uses, `100 k^2`.
pub fn nominal_samples_log2(k: usize) -> u64 {
    100 * (k * k) as u64
}

fn hits(dist: &InducedDistribution, y: u64, samples: u64, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(y);
    let tapes = dist.tapes();
    (0..samples)
        .filter(|_| dist.outputs[rng.gen_range(0..tapes) as usize] == y)
        .count() as u64
}

/// Frequency of `y` over `samples` uniformly drawn tapes (ChaCha8, stream `y`).
pub fn estimate_freq(dist: &InducedDistribution, y: u64, samples: u64, seed: u64) -> f64 {
    hits(dist, y, samples, seed) as f64 / samples as f64
}

/// The randomized test "estimated `P(y)` is at least `3 2^{-k-3}`".
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdTester {
    pub k: usize,
    pub epsilon: f64,
    pub samples: u64,
}

impl ThresholdTester {
    /// `eps = 2^{-k-3}`, the distance from the threshold to either guarantee
    /// region.
    pub fn new(k: usize) -> Self {
        Self::with_epsilon(k, 2f64.powi(-(k as i32) - 3))
    }

    pub fn with_epsilon(k: usize, epsilon: f64) -> Self {
        Self {
            k,
            epsilon,
            samples: hoeffding_samples(epsilon),
        }
    }

    pub fn with_samples(k: usize, samples: u64) -> Self {
        Self {
            k,
            epsilon: (6f64.ln() / (2.0 * samples as f64)).sqrt(),
            samples,
        }
    }

    pub fn threshold(&self) -> f64 {
        3.0 * 2f64.powi(-(self.k as i32) - 3)
    }

    /// Fewest hits accepted: `ceil(3 N / 2^{k+3})`.
    pub fn min_hits(&self) -> u64 {
        let den = 1u128 << (self.k + 3);
        (3 * self.samples as u128).div_ceil(den) as u64
    }

    /// One run of `f(y)` on fresh randomness.
    pub fn run(&self, dist: &InducedDistribution, y: u64, seed: u64) -> bool {
        hits(dist, y, self.samples, seed) >= self.min_hits()
    }

    /// `Pr[f(y) = 1]`, from the binomial tail.
    pub fn accept_probability(&self, dist: &InducedDistribution, y: u64) -> f64 {
        let p = dist.probability(y);
        let b = Binomial::new(p, self.samples).expect("probabilities lie in [0, 1]");
        b.sf(self.min_hits() - 1)
    }

    /// `f^(y)`: whether `Pr[f(y) = 1] >= 1/2`, decided exactly.
    pub fn derandomized(&self, dist: &InducedDistribution, y: u64) -> bool {
        majority_at_least(self.samples, dist.count(y), dist.tape_len, self.min_hits())
    }

    /// `Pr[f(y) = 1]` as a fraction of the tester's `2^{N R}` tapes, by running
    /// the sampler on every block of every tape.
    pub fn accept_fraction_by_tapes(&self, dist: &InducedDistribution, y: u64) -> Result<(u64, u64)> {
        let total_bits = self.samples as usize * dist.tape_len;
        check_cap("tester tape length", total_bits, MAX_TESTER_TAPE)?;
        let r = dist.tape_len;
        let block = (1u64 << r) - 1;
        let accepted = (0..1u64 << total_bits)
            .into_par_iter()
            .filter(|&tape| {
                let h = (0..self.samples as usize)
                    .filter(|&b| dist.outputs[(tape >> (b * r) & block) as usize] == y)
                    .count() as u64;
                h >= self.min_hits()
            })
            .count() as u64;
        Ok((accepted, 1 << total_bits))
    }
}

/// Whether `Pr[Bin(N, c/2^r) >= t] >= 1/2`. A binomial median lies between
/// `floor(Np)` and `ceil(Np)`, so only `t` near `Np` needs the tail, and only
/// a tail within `1e-6` of `1/2` is summed exactly.
pub fn majority_at_least(samples: u64, c: u64, r: usize, t: u64) -> bool {
    let whole = 1u64 << r;
    if t == 0 {
        return true;
    }
    if c == 0 || t > samples {
        return false;
    }
    if c == whole {
        return true;
    }
    let np = samples as u128 * c as u128;
    let floor = (np >> r) as u64;
    let ceil = np.div_ceil(whole as u128) as u64;
    if t <= floor {
        return true;
    }
    if t >= ceil + 2 {
        return false;
    }
    // the floating tail settles every case not within rounding of 1/2
    let p = c as f64 / whole as f64;
    let approx = Binomial::new(p, samples).expect("p lies in [0, 1]").sf(t - 1);
    if (approx - 0.5).abs() > 1e-6 {
        return approx > 0.5;
    }
    let tail = exact_tail(samples, c, r, t);
    tail * 2u32 >= BigUint::one() << (r * samples as usize)
}

/// `sum_{i >= t} C(N, i) c^i (2^r - c)^{N-i}`.
pub fn exact_tail(samples: u64, c: u64, r: usize, t: u64) -> BigUint {
    let d = (1u64 << r) - c;
    let n = samples;
    if t > n {
        return BigUint::zero();
    }
    if d == 0 {
        return num_traits::pow(BigUint::from(c), n as usize);
    }
    let mut term = num_integer::binomial(BigUint::from(n), BigUint::from(t))
        * num_traits::pow(BigUint::from(c), t as usize)
        * num_traits::pow(BigUint::from(d), (n - t) as usize);
    let mut sum = term.clone();
    for i in t..n {
        term = term * (n - i) * c / ((i + 1) * d);
        sum += &term;
    }
    sum
}

/// `f^` over all strings of length `n`.
pub fn derandomize(tester: &ThresholdTester, dist: &InducedDistribution) -> StringSet {
    StringSet::from_fn(dist.n, |y| tester.derandomized(dist, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dist2SetPath {
    /// No sampler available: `{x}`.
    Singleton,
    /// `k > n`: the whole space.
    FullSpace,
    /// `{y : f^(y) = 1}`.
    Threshold,
}

#[derive(Clone, Debug, Serialize)]
pub struct Dist2Set {
    pub x: BitString,
    pub path: Dist2SetPath,
    /// Tapes producing `x` and the tape length.
    pub count: u64,
    pub tape_len: usize,
    pub p_x: f64,
    pub k: usize,
    pub set: StringSet,
    pub tester: Option<ThresholdTester>,
    pub certificate: CertifiedDescription,
    /// `2^{-k+1} > P(x) >= 2^{-k}`.
    pub bracket_ok: bool,
    /// `|A| <= 2^{k+2}`.
    pub size_ok: bool,
}

/// Smallest `k` with `c / 2^r >= 2^{-k}`.
pub fn bracket(c: u64, r: usize) -> Result<usize> {
    if c == 0 {
        return Err(Error::Invalid("P(x) = 0: no bracket exists".into()));
    }
    Ok(r - (63 - c.leading_zeros() as usize))
}

fn singleton(x: &BitString) -> Dist2Set {
    Dist2Set {
        x: x.clone(),
        path: Dist2SetPath::Singleton,
        count: 1,
        tape_len: 0,
        p_x: 1.0,
        k: 0,
        set: StringSet::singleton(x.len(), x.to_u64()),
        tester: None,
        certificate: CertifiedDescription::new(DecoderId::SamplerThreshold, x.clone())
            .param("n", x.len() as u64)
            .label("path", "singleton"),
        bracket_ok: true,
        size_ok: true,
    }
}

/// The pipeline with `k` and `f^` computed exactly.
pub fn distribution_to_set(x: &BitString, s: Option<&Sampler>) -> Result<Dist2Set> {
    let Some(s) = s else {
        return Ok(singleton(x));
    };
    let dist = exact_distribution(s)?;
    to_set(x, s, &dist, |tester| derandomize(tester, &dist))
}

/// The same pipeline with `f^` replaced by single runs of `f` seeded by
/// `seed` (stream `y` for string `y`).
pub fn distribution_to_set_estimated(x: &BitString, s: &Sampler, seed: u64) -> Result<Dist2Set> {
    let dist = exact_distribution(s)?;
    to_set(x, s, &dist, |tester| StringSet::from_fn(dist.n, |y| tester.run(&dist, y, seed)))
}

fn to_set(
    x: &BitString,
    s: &Sampler,
    dist: &InducedDistribution,
    accept: impl Fn(&ThresholdTester) -> StringSet,
) -> Result<Dist2Set> {
    if x.len() != s.n {
        return Err(Error::Invalid(format!("x has {} bits, the sampler prints {}", x.len(), s.n)));
    }
    let c = dist.count(x.to_u64());
    let k = bracket(c, s.tape_len)?;
    let p_x = dist.probability(x.to_u64());
    let bracket_ok = p_x >= 2f64.powi(-(k as i32)) && p_x < 2f64.powi(1 - k as i32);
    let base = CertifiedDescription::new(DecoderId::SamplerThreshold, BitString::new())
        .param("n", s.n as u64)
        .param("k", k as u64);
    let (path, set, tester, certificate) = if k > s.n {
        (
            Dist2SetPath::FullSpace,
            StringSet::full(s.n),
            None,
            base.label("path", "full"),
        )
    } else {
        let tester = ThresholdTester::new(k);
        let mut cert = base
            .param("m", s.space as u64)
            .param("r", s.tape_len as u64)
            .label("path", "threshold");
        cert.payload = s.program.code().clone();
        (Dist2SetPath::Threshold, accept(&tester), Some(tester), cert)
    };
    let size_ok = k + 2 >= 64 || set.len() as u64 <= 1 << (k + 2);
    Ok(Dist2Set {
        x: x.clone(),
        path,
        count: c,
        tape_len: s.tape_len,
        p_x,
        k,
        set,
        tester,
        certificate,
        bracket_ok,
        size_ok,
    })
}

/// Rebuilds the set from a certificate of the exact pipeline.
pub fn decode_sampler_set(desc: &CertifiedDescription) -> Result<StringSet> {
    desc.expect_decoder(DecoderId::SamplerThreshold)?;
    let n = desc.require("n")? as usize;
    match desc.labels.get("path").map(String::as_str) {
        Some("singleton") => Ok(StringSet::singleton(n, desc.payload.to_u64())),
        Some("full") => Ok(StringSet::full(n)),
        Some("threshold") => {
            let program = Program::parse(&desc.payload).map_err(|e| Error::Invalid(e.to_string()))?;
            let s = Sampler::new(program, n, desc.require("r")? as usize, desc.require("m")? as usize)?;
            let dist = exact_distribution(&s)?;
            Ok(derandomize(&ThresholdTester::new(desc.require("k")? as usize), &dist))
        }
        other => Err(Error::Invalid(format!("unknown path {other:?}"))),
    }
}

enum Tree {
    Leaf(Vec<Option<bool>>),
    Branch(Box<Tree>, Box<Tree>),
}

impl Tree {
    /// Random bits read on the longest path.
    fn depth(&self) -> usize {
        match self {
            Tree::Leaf(bits) => bits.iter().filter(|b| b.is_none()).count(),
            Tree::Branch(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn compile(&self, ops: &mut Vec<Op>) {
        match self {
            Tree::Leaf(bits) => {
                ops.extend(bits.iter().map(|b| b.map_or(Op::Rout, Op::Out)));
                ops.push(Op::Halt);
            }
            Tree::Branch(zero, one) => {
                let mut left = Vec::new();
                zero.compile(&mut left);
                ops.push(Op::Jump {
                    cond: Cond::Rand1,
                    back: false,
                    dist: left.len() as u32,
                });
                ops.extend(left);
                one.compile(ops);
            }
        }
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize, budget: usize) -> Tree {
    if budget > 0 && rng.gen_bool(0.55) {
        let a = random_tree(rng, n, budget - 1);
        let b = random_tree(rng, n, budget - 1);
        return Tree::Branch(Box::new(a), Box::new(b));
    }
    let mut left = budget;
    Tree::Leaf(
        (0..n)
            .map(|_| {
                if left > 0 && rng.gen_bool(0.3) {
                    left -= 1;
                    None
                } else {
                    Some(rng.gen_bool(0.5))
                }
            })
            .collect(),
    )
}

/// A random sampler: a decision tree on random bits whose leaves print
/// constants or copied random bits. Reads at most `max_tape` bits.
pub fn random_sampler(n: usize, max_tape: usize, seed: u64) -> Result<Sampler> {
    check_cap("random tape length", max_tape, MAX_TAPE_LEN)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = random_tree(&mut rng, n, max_tape);
    let mut ops = Vec::new();
    tree.compile(&mut ops);
    let program = Program::from_ops(ops).map_err(|e| Error::Invalid(e.to_string()))?;
    Sampler::new(program, n, tree.depth(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_count() {
        assert_eq!(hoeffding_samples(0.1), 90);
        assert_eq!(nominal_samples_log2(3), 900);
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket(8, 3).unwrap(), 0);
        assert_eq!(bracket(3, 3).unwrap(), 2);
        assert_eq!(bracket(1, 3).unwrap(), 3);
        assert!(bracket(0, 3).is_err());
    }

    #[test]
    fn majority_matches_direct_tail() {
        for r in 1..=3 {
            for c in 0..=1u64 << r {
                for n in 1..=9u64 {
                    for t in 0..=n + 1 {
                        let total = BigUint::one() << (r * n as usize);
                        let direct = exact_tail(n, c, r, t) * 2u32 >= total;
                        assert_eq!(majority_at_least(n, c, r, t), direct, "n={n} c={c} r={r} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn sampler_text_round_trip() {
        let s = random_sampler(3, 4, 11).unwrap();
        let back = Sampler::parse(&s.to_string()).unwrap();
        assert_eq!(back, s);
    }
}
