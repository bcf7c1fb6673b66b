//! Exact space-bounded distinguishing complexity by exhaustive search.
//!
//! A [`Lab`] enumerates every program up to the length cap once and then
//! builds, per `(n, m, oracle)`, a table from each decided set to its first
//! decider in (length, lexicographic) order. String, set and conditional
//! complexities are lookups in those tables. Nothing here ever claims a value
//! is infinite; a missing entry is reported as [`ComplexityValue::AboveCap`].

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{gamma_len, BitString, StringSet, MAX_SET_LEN};
use crate::certificate::{CertifiedDescription, DecoderId};
use crate::error::{check_cap, Error, Result};
use crate::machine::{
    check_input_len, check_space, decides, decides_pair, distinguishes, enumerate_programs, peak_space, Caps,
    Oracle, Program, COMBINATOR_OVERHEAD,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComplexityValue {
    Finite { value: usize, witness: Program },
    /// No program of length at most `cap` qualifies. Not a claim of infinity.
    AboveCap { cap: usize },
}

impl ComplexityValue {
    pub fn value(&self) -> Option<usize> {
        match self {
            ComplexityValue::Finite { value, .. } => Some(*value),
            ComplexityValue::AboveCap { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Program> {
        match self {
            ComplexityValue::Finite { witness, .. } => Some(witness),
            ComplexityValue::AboveCap { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value().is_some()
    }

    /// Smallest value consistent with the search.
    pub fn lower(&self) -> usize {
        match self {
            ComplexityValue::Finite { value, .. } => *value,
            ComplexityValue::AboveCap { cap } => cap + 1,
        }
    }

    pub fn value_or_err(&self, what: &str) -> Result<usize> {
        self.value()
            .ok_or_else(|| Error::NonEvaluable(format!("{what} exceeds the program-length cap")))
    }

    fn interval(&self) -> Interval {
        match self {
            ComplexityValue::Finite { value, .. } => Interval::point(*value as f64),
            ComplexityValue::AboveCap { cap } => Interval {
                lo: Some(*cap as f64 + 1.0),
                hi: None,
            },
        }
    }
}

/// Closed interval with possibly infinite ends (`None`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Self { lo: Some(v), hi: Some(v) }
    }

    fn add(self, o: Self) -> Self {
        Self {
            lo: self.lo.zip(o.lo).map(|(a, b)| a + b),
            hi: self.hi.zip(o.hi).map(|(a, b)| a + b),
        }
    }

    fn neg(self) -> Self {
        Self {
            lo: self.hi.map(|v| -v),
            hi: self.lo.map(|v| -v),
        }
    }
}

type TableKey = (usize, usize, Option<u64>);

/// First decider of every set decidable within the cap, for one `(n, m, oracle)`.
#[derive(Debug)]
pub struct SetTable {
    pub n: usize,
    pub m: usize,
    pub oracle: Option<StringSet>,
    decided: Vec<Option<StringSet>>,
    first: HashMap<u64, u32>,
}

impl SetTable {
    /// `(set, index of its canonical witness)` sorted by set mask.
    pub fn entries(&self) -> Vec<(StringSet, usize)> {
        let mut v: Vec<_> = self
            .first
            .iter()
            .map(|(&mask, &i)| (StringSet::from_mask(self.n, mask), i as usize))
            .collect();
        v.sort_by_key(|(s, _)| s.mask());
        v
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }
}

#[derive(Debug)]
struct PairTable {
    first: HashMap<(u64, u64), u32>,
}

/// Memoizing search context shared by every module.
pub struct Lab {
    caps: Caps,
    programs: Vec<Program>,
    oracle_free: Vec<bool>,
    tables: Mutex<HashMap<TableKey, Arc<SetTable>>>,
    pairs: Mutex<HashMap<(usize, usize), Arc<PairTable>>>,
    cache_dir: Option<PathBuf>,
}

impl std::fmt::Debug for Lab {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lab")
            .field("caps", &self.caps)
            .field("programs", &self.programs.len())
            .finish()
    }
}

impl Lab {
    pub fn new(caps: Caps) -> Result<Self> {
        let programs = enumerate_programs(caps.program_len, &caps)?;
        let oracle_free = programs.iter().map(|p| !p.queries_outer_oracle()).collect();
        Ok(Self {
            caps,
            programs,
            oracle_free,
            tables: Mutex::new(HashMap::new()),
            pairs: Mutex::new(HashMap::new()),
            cache_dir: None,
        })
    }

    /// Persists oracle-free set tables and pair tables under `dir`. Unreadable
    /// or mismatched cache files are ignored and rebuilt.
    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    fn cache_file(&self, kind: &str, n: usize, m: usize) -> Option<PathBuf> {
        let c = &self.caps;
        self.cache_dir.as_ref().map(|d| {
            d.join(format!(
                "{kind}-L{}-I{}-S{}-n{n}-m{m}.bin",
                c.program_len, c.input_len, c.space
            ))
        })
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn cap(&self) -> usize {
        self.caps.program_len
    }

    /// Every program searched, in canonical order.
    pub fn programs(&self) -> &[Program] {
        &self.programs
    }

    fn check(&self, n: usize, m: usize) -> Result<()> {
        check_input_len(n, &self.caps)?;
        check_space(m, &self.caps)
    }

    pub fn table(&self, n: usize, m: usize, oracle: Option<&StringSet>) -> Result<Arc<SetTable>> {
        self.check(n, m)?;
        if let Some(o) = oracle {
            if o.n() != n {
                return Err(Error::Invalid(format!(
                    "oracle over {}-bit strings used with {n}-bit inputs",
                    o.n()
                )));
            }
        }
        let key = (n, m, oracle.map(|o| o.mask()));
        if let Some(t) = self.tables.lock().expect("table lock").get(&key) {
            return Ok(t.clone());
        }
        let base = match oracle {
            Some(_) => Some(self.table(n, m, None)?),
            None => None,
        };
        let answer = match oracle {
            Some(o) => Oracle::Set(o),
            None => Oracle::None,
        };
        let file = oracle.is_none().then(|| self.cache_file("sets", n, m)).flatten();
        let cached = file.as_deref().and_then(|f| load_decided(f, n, self.programs.len()));
        let decided: Vec<Option<StringSet>> = match cached {
            Some(d) => d,
            None => {
                let d: Vec<Option<StringSet>> = self
                    .programs
                    .par_iter()
                    .enumerate()
                    .map(|(i, p)| match &base {
                        Some(b) if self.oracle_free[i] => b.decided[i],
                        _ => decides(p, n, m, answer),
                    })
                    .collect();
                if let Some(f) = &file {
                    store_decided(f, &d);
                }
                d
            }
        };
        let mut first = HashMap::new();
        for (i, d) in decided.iter().enumerate() {
            if let Some(s) = d {
                first.entry(s.mask()).or_insert(i as u32);
            }
        }
        let table = Arc::new(SetTable {
            n,
            m,
            oracle: oracle.copied(),
            decided,
            first,
        });
        self.tables
            .lock()
            .expect("table lock")
            .entry(key)
            .or_insert(table.clone());
        Ok(table)
    }

    fn lookup(&self, t: &SetTable, a: &StringSet) -> ComplexityValue {
        match t.first.get(&a.mask()) {
            Some(&i) => {
                let witness = self.programs[i as usize].clone();
                ComplexityValue::Finite {
                    value: witness.len(),
                    witness,
                }
            }
            None => ComplexityValue::AboveCap { cap: self.cap() },
        }
    }

    /// `CD^m(x)`.
    pub fn cd_string(&self, x: &BitString, m: usize) -> Result<ComplexityValue> {
        self.check(x.len(), m)?;
        self.cd_set(&StringSet::singleton(x.len(), x.to_u64()), m)
    }

    /// `CD^m(A)`.
    pub fn cd_set(&self, a: &StringSet, m: usize) -> Result<ComplexityValue> {
        let t = self.table(a.n(), m, None)?;
        Ok(self.lookup(&t, a))
    }

    /// `CD^m(x | A)`: `A` answers oracle queries.
    pub fn cd_cond(&self, x: &BitString, a: &StringSet, m: usize) -> Result<ComplexityValue> {
        self.check(x.len(), m)?;
        self.cd_set_cond(&StringSet::singleton(x.len(), x.to_u64()), a, m)
    }

    /// `CD^m(B | A)`.
    pub fn cd_set_cond(&self, b: &StringSet, a: &StringSet, m: usize) -> Result<ComplexityValue> {
        if a.n() != b.n() {
            return Err(Error::Invalid("sets over different lengths".into()));
        }
        let t = self.table(b.n(), m, Some(a))?;
        Ok(self.lookup(&t, b))
    }

    /// `CD^m(A, B)`: shortest program mapping `a‖b` to `(a ∈ A, b ∈ B)`.
    pub fn cd_pair(&self, a: &StringSet, b: &StringSet, m: usize) -> Result<ComplexityValue> {
        let n = a.n();
        if b.n() != n {
            return Err(Error::Invalid("sets over different lengths".into()));
        }
        check_cap("pair input length", 2 * n, MAX_SET_LEN.min(self.caps.input_len))?;
        check_space(m, &self.caps)?;
        let key = (n, m);
        let cached = self.pairs.lock().expect("pair lock").get(&key).cloned();
        let t = match cached {
            Some(t) => t,
            None => {
                let file = self.cache_file("pairs", n, m);
                let first = match file.as_deref().and_then(|f| load_pairs(f, self.programs.len())) {
                    Some(first) => first,
                    None => {
                        let decided: Vec<_> = self
                            .programs
                            .par_iter()
                            .map(|p| decides_pair(p, n, m, Oracle::None))
                            .collect();
                        let mut first = HashMap::new();
                        for (i, d) in decided.iter().enumerate() {
                            if let Some((x, y)) = d {
                                first.entry((x.mask(), y.mask())).or_insert(i as u32);
                            }
                        }
                        if let Some(f) = &file {
                            store_pairs(f, &first);
                        }
                        first
                    }
                };
                let t = Arc::new(PairTable { first });
                self.pairs.lock().expect("pair lock").entry(key).or_insert(t.clone());
                t
            }
        };
        Ok(match t.first.get(&(a.mask(), b.mask())) {
            Some(&i) => {
                let witness = self.programs[i as usize].clone();
                ComplexityValue::Finite {
                    value: witness.len(),
                    witness,
                }
            }
            None => ComplexityValue::AboveCap { cap: self.cap() },
        })
    }

    /// `CD^m(y)` for every `y` of length `n`, indexed by value.
    pub fn all_strings(&self, n: usize, m: usize) -> Result<Vec<ComplexityValue>> {
        let t = self.table(n, m, None)?;
        Ok((0..1u64 << n)
            .map(|y| self.lookup(&t, &StringSet::singleton(n, y)))
            .collect())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) {
    let Some(dir) = path.parent() else { return };
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    if std::fs::write(&tmp, bytes).is_ok() && std::fs::rename(&tmp, path).is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
}

fn store_decided(path: &Path, decided: &[Option<StringSet>]) {
    let mut bytes = Vec::with_capacity(decided.len() * 9);
    for d in decided {
        bytes.push(d.is_some() as u8);
        bytes.extend_from_slice(&d.map_or(0, |s| s.mask()).to_le_bytes());
    }
    write_atomic(path, &bytes);
}

fn load_decided(path: &Path, n: usize, programs: usize) -> Option<Vec<Option<StringSet>>> {
    let bytes = std::fs::read(path).ok()?;
    if bytes.len() != programs * 9 {
        return None;
    }
    bytes
        .chunks_exact(9)
        .map(|c| {
            let mask = u64::from_le_bytes(c[1..].try_into().ok()?);
            match c[0] {
                0 => Some(None),
                1 => Some(Some(StringSet::from_mask(n, mask))),
                _ => None,
            }
        })
        .collect()
}

fn store_pairs(path: &Path, first: &HashMap<(u64, u64), u32>) {
    let mut rows: Vec<_> = first.iter().map(|(&(a, b), &i)| (i, a, b)).collect();
    rows.sort_unstable();
    let mut bytes = Vec::with_capacity(rows.len() * 20);
    for (i, a, b) in rows {
        bytes.extend_from_slice(&i.to_le_bytes());
        bytes.extend_from_slice(&a.to_le_bytes());
        bytes.extend_from_slice(&b.to_le_bytes());
    }
    write_atomic(path, &bytes);
}

fn load_pairs(path: &Path, programs: usize) -> Option<HashMap<(u64, u64), u32>> {
    let bytes = std::fs::read(path).ok()?;
    if bytes.len() % 20 != 0 {
        return None;
    }
    let mut first = HashMap::new();
    for c in bytes.chunks_exact(20) {
        let i = u32::from_le_bytes(c[..4].try_into().ok()?);
        if i as usize >= programs {
            return None;
        }
        let a = u64::from_le_bytes(c[4..12].try_into().ok()?);
        let b = u64::from_le_bytes(c[12..].try_into().ok()?);
        first.insert((a, b), i);
    }
    Some(first)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeficiencyReport {
    pub log_size: f64,
    pub cd_cond: ComplexityValue,
    pub cd_set: ComplexityValue,
    pub cd_string: ComplexityValue,
    /// Space bounds `(a, b, d)`.
    pub spaces: [usize; 3],
    pub evaluable: bool,
    /// `log|A| - CD^a(x|A)`, when every component is below the cap.
    pub d: Option<f64>,
    /// `CD^b(A) + log|A| - CD^d(x)`, when every component is below the cap.
    pub delta: Option<f64>,
    pub d_range: Interval,
    pub delta_range: Interval,
    /// Whether `a >= n` and `d >= 2 max(b, n)`, the regime where both
    /// deficiencies are expected to be nonnegative up to the machine constant.
    pub proviso: bool,
    pub d_nonnegative: Option<bool>,
    pub delta_nonnegative: Option<bool>,
}

impl DeficiencyReport {
    /// Recomputes `d` and `delta` from the component values.
    pub fn recompute(&self) -> (Option<f64>, Option<f64>) {
        let (a, b, d) = (self.cd_cond.value(), self.cd_set.value(), self.cd_string.value());
        (
            a.map(|a| self.log_size - a as f64),
            b.zip(d).map(|(b, d)| b as f64 + self.log_size - d as f64),
        )
    }
}

/// Both deficiencies of `x` in `A` under space bounds `a`, `b`, `d`.
pub fn deficiencies(lab: &Lab, x: &BitString, set: &StringSet, a: usize, b: usize, d: usize) -> Result<DeficiencyReport> {
    if set.n() != x.len() || !set.contains(x.to_u64()) {
        return Err(Error::Invalid(format!("{x} is not a member of the model")));
    }
    let cd_cond = lab.cd_cond(x, set, a)?;
    let cd_set = lab.cd_set(set, b)?;
    let cd_string = lab.cd_string(x, d)?;
    let log_size = set.log_size();
    let l = Interval::point(log_size);
    let d_range = l.add(cd_cond.interval().neg());
    let delta_range = cd_set.interval().add(l).add(cd_string.interval().neg());
    let evaluable = cd_cond.is_finite() && cd_set.is_finite() && cd_string.is_finite();
    let n = x.len();
    let proviso = a >= n && d >= 2 * b.max(n);
    let mut report = DeficiencyReport {
        log_size,
        cd_cond,
        cd_set,
        cd_string,
        spaces: [a, b, d],
        evaluable,
        d: None,
        delta: None,
        d_range,
        delta_range,
        proviso,
        d_nonnegative: None,
        delta_nonnegative: None,
    };
    let (dv, deltav) = report.recompute();
    report.d = dv;
    report.delta = deltav;
    if proviso {
        report.d_nonnegative = dv.map(|v| v >= 0.0);
        report.delta_nonnegative = deltav.map(|v| v >= 0.0);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub t: usize,
    /// `#{x : CD^m(x) < t}`.
    pub count: u64,
    pub bound: u64,
}

/// Counting invariant rows `t = 0..=t_max` for length `n` and space `m`.
pub fn counting_table(lab: &Lab, n: usize, m: usize, t_max: usize) -> Result<Vec<CountRow>> {
    check_cap("counting threshold", t_max, lab.cap() + 1)?;
    let values = lab.all_strings(n, m)?;
    Ok((0..=t_max)
        .map(|t| CountRow {
            t,
            count: values
                .iter()
                .filter(|v| v.value().is_some_and(|c| c < t))
                .count() as u64,
            bound: 1u64 << t,
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodExplanation {
    pub x: BitString,
    pub k: usize,
    pub set: StringSet,
    pub description: CertifiedDescription,
    /// `log2(k + m)`, the scale the description length is compared against.
    pub log_k_m: f64,
}

impl GoodExplanation {
    /// Constant `c` with `|description| = c + log(k + m)`.
    pub fn fitted_constant(&self) -> f64 {
        self.description.total_len() as f64 - self.log_k_m
    }
}

/// `A = {y : CD^m(y) <= k}` with `k = CD^m(x)`.
pub fn good_explanation(lab: &Lab, x: &BitString, m: usize) -> Result<GoodExplanation> {
    let k = lab.cd_string(x, m)?.value_or_err("CD^m(x)")?;
    let n = x.len();
    let set = explanation_set(lab, n, m, k)?;
    let description = CertifiedDescription::new(DecoderId::GoodExplanation, BitString::new())
        .param("n", n as u64)
        .param("m", m as u64)
        .param("k", k as u64);
    Ok(GoodExplanation {
        x: x.clone(),
        k,
        set,
        description,
        log_k_m: ((k + m) as f64).log2(),
    })
}

fn explanation_set(lab: &Lab, n: usize, m: usize, k: usize) -> Result<StringSet> {
    let values = lab.all_strings(n, m)?;
    Ok(StringSet::from_fn(n, |y| {
        values[y as usize].value().is_some_and(|c| c <= k)
    }))
}

/// Rebuilds the set from `(n, m, k)` alone.
pub fn decode_good_explanation(lab: &Lab, desc: &CertifiedDescription) -> Result<StringSet> {
    desc.expect_decoder(DecoderId::GoodExplanation)?;
    let n = desc.require("n")? as usize;
    let m = desc.require("m")? as usize;
    let k = desc.require("k")? as usize;
    explanation_set(lab, n, m, k)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcatReport {
    pub x: BitString,
    pub set: StringSet,
    pub m: usize,
    pub cd_cond: ComplexityValue,
    pub cd_set: ComplexityValue,
    /// `Compose(set witness, conditional witness)`.
    pub composite: Program,
    pub composite_len: usize,
    /// Measured space of the composite, the bound `p`.
    pub p: usize,
    pub composite_distinguishes: bool,
    /// `CD^p(x)` from the search (may be above the cap).
    pub cd_p: ComplexityValue,
    /// Best certified upper bound on `CD^p(x)`.
    pub cd_p_upper: usize,
    /// `CD^p(x) - CD^m(x|A) - CD^m(A)`, using the upper bound.
    pub slack: i64,
    /// `log2(CD^m(A) + n)`.
    pub log_term: f64,
    /// Smallest `c` making the inequality hold on this instance.
    pub required_c: f64,
    /// `c` the composite alone certifies: its fixed overhead over the log term.
    pub construction_c: f64,
}

impl ConcatReport {
    pub fn holds_with(&self, c: f64) -> bool {
        self.slack as f64 <= c * self.log_term + 1e-9
    }
}

/// Checks `CD^p(x) <= CD^m(x|A) + CD^m(A) + c log(CD^m(A) + n)` by building
/// the composite program and measuring its space.
pub fn verify_concat_bound(lab: &Lab, x: &BitString, set: &StringSet, m: usize) -> Result<ConcatReport> {
    let n = x.len();
    let cd_cond = lab.cd_cond(x, set, m)?;
    let cd_set = lab.cd_set(set, m)?;
    let (Some(cond_w), Some(set_w)) = (cd_cond.witness(), cd_set.witness()) else {
        return Err(Error::NonEvaluable(
            "a component of the concatenation bound exceeds the program-length cap".into(),
        ));
    };
    let composite = Program::compose(set_w.clone(), cond_w.clone());
    let room = (2 * m).min(lab.caps().space);
    let p = peak_space(&composite, n, room, Oracle::None)
        .ok_or_else(|| Error::Invalid("composite program does not halt within 2m".into()))?
        .max(m)
        .min(lab.caps().space);
    let composite_distinguishes = distinguishes(&composite, x, p, Oracle::None);
    let cd_p = lab.cd_string(x, p)?;
    let composite_len = composite.len();
    let mut cd_p_upper = cd_p.value().unwrap_or(usize::MAX);
    if composite_distinguishes {
        cd_p_upper = cd_p_upper.min(composite_len);
    }
    let a = cond_w.len();
    let b = set_w.len();
    debug_assert_eq!(composite_len, a + b + COMBINATOR_OVERHEAD);
    let slack = cd_p_upper as i64 - a as i64 - b as i64;
    let log_term = ((b + n) as f64).log2();
    let required_c = (slack.max(0) as f64) / log_term;
    Ok(ConcatReport {
        x: x.clone(),
        set: *set,
        m,
        cd_cond,
        cd_set,
        composite,
        composite_len,
        p,
        composite_distinguishes,
        cd_p,
        cd_p_upper,
        slack,
        log_term,
        required_c,
        construction_c: COMBINATOR_OVERHEAD as f64 / log_term,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependentPair {
    pub n: usize,
    pub m: usize,
    pub x: BitString,
    pub y: BitString,
    /// `CD^m(x | {y}) + CD^m(y | {x})`, lower ends for values above the cap.
    pub independence: usize,
    pub set: StringSet,
    pub deficiencies: DeficiencyReport,
    /// Certified lower bound on `delta - d`.
    pub gap_lower: Option<f64>,
}

/// Picks `x != y` maximizing conditional independence, then evaluates both
/// deficiencies of `x` in `{0,1}^n \ {y}`. Ties go to the smallest `(x, y)`.
pub fn independent_pair_example(lab: &Lab, n: usize, m: usize) -> Result<IndependentPair> {
    check_input_len(n, lab.caps())?;
    if n == 0 {
        return Err(Error::Invalid("need at least two strings".into()));
    }
    let size = 1u64 << n;
    let mut cond = vec![vec![0usize; size as usize]; size as usize];
    for y in 0..size {
        let t = lab.table(n, m, Some(&StringSet::singleton(n, y)))?;
        for x in 0..size {
            cond[x as usize][y as usize] = lab.lookup(&t, &StringSet::singleton(n, x)).lower();
        }
    }
    let mut best: Option<(usize, u64, u64)> = None;
    for x in 0..size {
        for y in 0..size {
            if x == y {
                continue;
            }
            let score = cond[x as usize][y as usize] + cond[y as usize][x as usize];
            if best.is_none_or(|(s, _, _)| score > s) {
                best = Some((score, x, y));
            }
        }
    }
    let (independence, x, y) = best.expect("n >= 1 gives a pair");
    let mut set = StringSet::full(n);
    set.remove(y);
    let xb = BitString::from_u64(x, n);
    let report = deficiencies(lab, &xb, &set, m, m, m)?;
    let gap_lower = report.delta_range.lo.zip(report.d_range.hi).map(|(a, b)| a - b);
    Ok(IndependentPair {
        n,
        m,
        x: xb,
        y: BitString::from_u64(y, n),
        independence,
        set,
        deficiencies: report,
        gap_lower,
    })
}

/// Gamma-coded length of the parameters `(n, m, k)`.
pub fn parameter_bits(n: usize, m: usize, k: usize) -> usize {
    [n, m, k].iter().map(|&v| gamma_len(v as u64 + 1)).sum()
}
