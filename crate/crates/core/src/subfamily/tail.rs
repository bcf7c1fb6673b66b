//! Exact evaluation of the binomial tail chain behind property (1*).
//!
//! `p` is carried as a dyadic interval `[lo, hi] / 2^bits`, so every
//! quantity is an integer over a power of two and every comparison is exact.
//! Irrational parameters (through `ln 2`) are bracketed, and an inequality
//! is reported as holding only if it holds across the whole bracket.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Fractional bits used for `ln 2` brackets.
pub const LN2_BITS: u32 = 128;

/// `p` in `[lo, hi] / 2^bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub lo: BigUint,
    pub hi: BigUint,
    pub bits: u32,
}

impl Dyadic {
    pub fn exact(num: u64, bits: u32) -> Self {
        Self {
            lo: num.into(),
            hi: num.into(),
            bits,
        }
    }

    pub fn scale(&self) -> BigUint {
        BigUint::one() << self.bits
    }

    pub fn lo_f64(&self) -> f64 {
        ratio_f64(&self.lo, &self.scale())
    }

    pub fn hi_f64(&self) -> f64 {
        ratio_f64(&self.hi, &self.scale())
    }
}

/// `ln 2` in `[lo, hi] / 2^LN2_BITS`, from `ln 2 = sum_{j>=1} 1 / (j 2^j)`.
pub fn ln2_bracket() -> Dyadic {
    // floor of each term at 2^(D + 16), then round outward
    let d = LN2_BITS + 16;
    let terms = d as u64 + 8;
    let one = BigUint::one() << d;
    let mut sum = BigUint::zero();
    for j in 1..=terms {
        sum += (&one >> j as usize) / j;
    }
    // each floor loses < 1 unit; the tail past `terms` is below 2^(d - terms)
    let slack = BigUint::from(terms + 2);
    let lo = &sum >> 16usize;
    let hi = ((sum + slack) >> 16usize) + 1u32;
    Dyadic {
        lo,
        hi,
        bits: LN2_BITS,
    }
}

/// `2^{-k} (n + 2) ln 2`, unclamped.
pub fn inclusion_probability(k: u32, n: u64) -> Dyadic {
    let ln2 = ln2_bracket();
    Dyadic {
        lo: ln2.lo * n.saturating_add(2),
        hi: ln2.hi * n.saturating_add(2),
        bits: ln2.bits + k,
    }
}

pub(crate) fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let top = |x: &BigUint| {
        let shift = x.bits().saturating_sub(60);
        ((x >> shift).to_f64().expect("60-bit value fits"), shift as i32)
    };
    let ((a, sa), (b, sb)) = (top(num), top(den));
    a / b * 2f64.powi(sa - sb)
}

/// `log2(num / den)`; `-inf` for zero.
pub fn log2_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return f64::NEG_INFINITY;
    }
    fn log2(x: &BigUint) -> f64 {
        let bits = x.bits();
        let shift = bits.saturating_sub(60);
        let top = (x >> shift).to_f64().expect("60-bit value fits");
        top.log2() + shift as f64
    }
    log2(num) - log2(den)
}

fn binom(w: u64, i: u64) -> BigUint {
    if i > w {
        return BigUint::zero();
    }
    let i = i.min(w - i);
    let mut c = BigUint::one();
    for t in 0..i {
        c = c * (w - t) / (t + 1);
    }
    c
}

fn pow(b: &BigUint, e: u64) -> BigUint {
    num_traits::pow(b.clone(), e as usize)
}

/// Exact interval `[lo, hi] / den` for a nonnegative quantity.
#[derive(Clone, Debug)]
pub struct Bracket {
    pub lo: BigUint,
    pub hi: BigUint,
    pub den: BigUint,
}

impl Bracket {
    fn le(&self, other: &Bracket) -> bool {
        &self.hi * &other.den <= &other.lo * &self.den
    }

    fn lt_pow2(&self, e: u64) -> bool {
        // hi / den < 2^{-e}
        (&self.hi << e as usize) < self.den
    }

    pub fn log2(&self) -> [f64; 2] {
        [log2_ratio(&self.lo, &self.den), log2_ratio(&self.hi, &self.den)]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailChain {
    pub w: u64,
    pub v: u64,
    pub p: [f64; 2],
    /// `log2` brackets of the tail and each bound in the chain.
    pub exact_sum_log2: [f64; 2],
    pub term_bound_log2: [f64; 2],
    pub drop_factor_bound_log2: [f64; 2],
    pub factorial_bound_log2: [f64; 2],
    /// `sum <= w C(w,v) p^v (1-p)^{w-v} <= w C(w,v) p^v <= w (wp)^v / v!`.
    pub chain: [bool; 3],
    /// Same chain with strict inequalities.
    pub strict: [bool; 3],
    #[serde(skip)]
    pub exact_sum: Bracket,
    #[serde(skip)]
    pub factorial_bound: Bracket,
}

/// Evaluates `sum_{i=v}^{w} C(w,i) p^i (1-p)^{w-i}` and the bounds after it.
/// Refuses unless `w p <= v` holds for every `p` in the bracket.
pub fn binomial_tail(w: u64, p: &Dyadic, v: u64) -> Result<TailChain> {
    let q = p.scale();
    if p.hi > q || p.lo > p.hi {
        return Err(Error::Invalid("p must lie in [0, 1]".into()));
    }
    if &p.hi * w > &q * v {
        return Err(Error::Invalid(format!(
            "precondition w p <= v fails: w = {w}, p <= {:.6}, v = {v}",
            p.hi_f64()
        )));
    }
    let den = pow(&q, w);
    // the tail grows with p
    let tail = |pn: &BigUint| -> BigUint {
        let rest = &q - pn;
        let mut s = BigUint::zero();
        for i in v..=w {
            s += binom(w, i) * pow(pn, i) * pow(&rest, w - i);
        }
        s
    };
    let exact_sum = Bracket {
        lo: tail(&p.lo),
        hi: tail(&p.hi),
        den: den.clone(),
    };
    let c = binom(w, v) * w;
    let drop = w.saturating_sub(v);
    let term_bound = Bracket {
        lo: &c * pow(&p.lo, v) * pow(&(&q - &p.hi), drop),
        hi: &c * pow(&p.hi, v) * pow(&(&q - &p.lo), drop),
        den: den.clone(),
    };
    let qv = pow(&q, v);
    let drop_factor_bound = Bracket {
        lo: &c * pow(&p.lo, v),
        hi: &c * pow(&p.hi, v),
        den: qv.clone(),
    };
    let fact: BigUint = (1..=v).map(BigUint::from).product();
    let wv1 = pow(&BigUint::from(w), v + 1);
    let factorial_bound = Bracket {
        lo: &wv1 * pow(&p.lo, v),
        hi: &wv1 * pow(&p.hi, v),
        den: &qv * &fact,
    };
    // the last two steps are structural: (1-p)^{w-v} <= 1 and w!/(w-v)! <= w^v
    let falling: BigUint = (0..v.min(w + 1)).map(|t| BigUint::from(w.saturating_sub(t))).product();
    let falling_le = falling <= pow(&BigUint::from(w), v);
    let chain = [exact_sum.le(&term_bound), true, falling_le];
    let strict = [
        &exact_sum.hi * &term_bound.den < &term_bound.lo * &exact_sum.den,
        drop > 0 && p.lo > BigUint::zero() && !c.is_zero(),
        falling < pow(&BigUint::from(w), v),
    ];
    Ok(TailChain {
        w,
        v,
        p: [p.lo_f64(), p.hi_f64()],
        exact_sum_log2: exact_sum.log2(),
        term_bound_log2: term_bound.log2(),
        drop_factor_bound_log2: drop_factor_bound.log2(),
        factorial_bound_log2: factorial_bound.log2(),
        chain,
        strict,
        exact_sum,
        factorial_bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageTail {
    pub k: u32,
    pub n: u64,
    pub chain: TailChain,
    /// `w (wp)^v / v! < 2^{-2n}` across the whole bracket.
    pub final_below: bool,
    /// `wp < 10 n`.
    pub wp_below_10n: bool,
    /// `log2` of the printed intermediate `2^k (10n)^v / v!`.
    pub printed_bound_log2: f64,
    /// Whether the printed intermediate is itself below `2^{-2n}`.
    pub printed_bound_below: bool,
}

/// The chain instantiated with `w = 2^k`, `p = min(1, 2^{-k}(n+2) ln 2)`,
/// `v = (n+k)^2`.
pub fn coverage_tail(k: u32, n: u64) -> Result<CoverageTail> {
    let w = 1u64 << k;
    let v = (n + k as u64).pow(2);
    let mut p = inclusion_probability(k, n);
    // sampling clamps q at 1
    let one = p.scale();
    if p.hi > one {
        p.hi = one.clone();
        p.lo = p.lo.min(one);
    }
    let chain = binomial_tail(w, &p, v)?;
    let final_below = chain.factorial_bound.lt_pow2(2 * n);
    let wp_hi = &p.hi * w;
    let wp_below_10n = wp_hi < p.scale() * (10 * n);
    let fact: BigUint = (1..=v).map(BigUint::from).product();
    let printed = pow(&BigUint::from(10 * n), v) << k as usize;
    let printed_bound_log2 = log2_ratio(&printed, &fact);
    let printed_bound_below = (printed << (2 * n) as usize) < fact;
    Ok(CoverageTail {
        k,
        n,
        chain,
        final_below,
        wp_below_10n,
        printed_bound_log2,
        printed_bound_below,
    })
}

/// `2^n * 2^{-n-2}` as a reduced fraction.
pub fn union_bound(n: u32) -> (BigUint, BigUint) {
    let num = BigUint::one() << n as usize;
    let den = BigUint::one() << (n + 2) as usize;
    let g = num.gcd(&den);
    (num / &g, den / g)
}

/// Whether `(1 - q)^{2^k} <= 2^{-n-2}` for every `q` in the bracket of
/// `min(1, 2^{-k}(n+2) ln 2)`.
pub fn miss_bound_holds(k: u32, n: u64) -> bool {
    let p = inclusion_probability(k, n);
    let scale = p.scale();
    if p.lo >= scale {
        return true;
    }
    let miss = pow(&(&scale - &p.lo), 1 << k);
    (miss << (n + 2) as usize) <= pow(&scale, 1 << k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_bracket_is_tight() {
        let b = ln2_bracket();
        assert!(b.lo < b.hi);
        assert!(&b.hi - &b.lo < BigUint::from(64u32));
        assert!((b.lo_f64() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn empty_tail_when_v_exceeds_w() {
        let t = binomial_tail(4, &Dyadic::exact(1, 2), 5).unwrap();
        assert!(t.exact_sum.hi.is_zero());
        assert!(t.chain.iter().all(|&c| c));
    }

    #[test]
    fn precondition_is_named() {
        let e = binomial_tail(8, &Dyadic::exact(3, 2), 1).unwrap_err();
        assert!(e.to_string().contains("w p <= v"));
    }

    #[test]
    fn union_bound_is_a_quarter() {
        for n in 0..20 {
            assert_eq!(union_bound(n), (1u32.into(), 4u32.into()));
        }
    }
}
