//! Decodable descriptions standing in for "complexity at most L" claims.
//!
//! A [`CertifiedDescription`] is a payload plus the small integer parameters
//! its decoder needs. The payload length is the measured claim; parameters
//! are charged separately (Elias gamma, one code per value) so the
//! logarithmic overhead is visible in reports.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::{gamma_len, BitString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderId {
    /// `{y : CD^m(y) <= k}` from `(n, m, k)`.
    GoodExplanation,
    /// Ordinal of a model among the not-worse models containing `x`.
    ConditionalIndex,
    /// Ordinal of a set within the first good subfamily of a slice.
    SubfamilyOrdinal,
    /// The set `{y : f^(y) = 1}` of a sampler's derandomized tester.
    SamplerThreshold,
    /// Ordinal of a pair within `D_A`, decoded with `A` as oracle.
    PairGivenFirst,
    /// Ordinal of `A` among the heavy first components of `D`.
    HeavyFirstComponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedDescription {
    pub decoder: DecoderId,
    pub payload: BitString,
    /// Integer parameters the decoder reads; charged as gamma codes.
    pub params: BTreeMap<String, u64>,
    /// Identity of the decoding context (family, mode, strategy). Fixed per
    /// decoder, not charged.
    pub labels: BTreeMap<String, String>,
}

impl CertifiedDescription {
    pub fn new(decoder: DecoderId, payload: BitString) -> Self {
        Self {
            decoder,
            payload,
            params: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: u64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn label(mut self, name: &str, value: impl Into<String>) -> Self {
        self.labels.insert(name.to_string(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.params.get(name).copied()
    }

    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }

    /// Bits needed to write every parameter self-delimitingly.
    pub fn param_bits(&self) -> usize {
        self.params.values().map(|&v| gamma_len(v + 1)).sum()
    }

    pub fn total_len(&self) -> usize {
        self.payload_len() + self.param_bits()
    }

    pub(crate) fn require(&self, name: &str) -> crate::Result<u64> {
        self.get(name)
            .ok_or_else(|| crate::Error::Invalid(format!("certificate lacks parameter {name}")))
    }

    pub(crate) fn expect_decoder(&self, want: DecoderId) -> crate::Result<()> {
        if self.decoder == want {
            Ok(())
        } else {
            Err(crate::Error::Invalid(format!(
                "certificate for {:?} given to the {want:?} decoder",
                self.decoder
            )))
        }
    }
}

/// Writes `ordinal` in exactly `width` bits.
pub fn ordinal_payload(ordinal: u64, width: usize) -> BitString {
    assert!(width >= 64 || ordinal < 1 << width, "ordinal {ordinal} does not fit {width} bits");
    BitString::from_u64(ordinal, width)
}
