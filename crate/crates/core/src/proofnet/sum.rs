//! Idempotent formal sums of nets.

use std::collections::BTreeMap;

use super::{canonical_key, Net};

/// A set of nets up to the structural equivalence; empty is the zero net.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetSum {
    summands: BTreeMap<String, Net>,
}

impl NetSum {
    pub fn zero() -> NetSum {
        NetSum::default()
    }

    pub fn single(n: Net) -> NetSum {
        let mut s = NetSum::zero();
        s.push(n);
        s
    }

    /// Adds a summand; returns false if an equivalent one was present.
    pub fn push(&mut self, n: Net) -> bool {
        let k = canonical_key(&n);
        self.push_keyed(k, n)
    }

    pub fn push_keyed(&mut self, key: String, n: Net) -> bool {
        if self.summands.contains_key(&key) {
            return false;
        }
        self.summands.insert(key, n);
        true
    }

    pub fn extend(&mut self, other: NetSum) {
        for (k, n) in other.summands {
            self.summands.entry(k).or_insert(n);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Summands ordered by canonical key.
    pub fn nets(&self) -> impl DoubleEndedIterator<Item = &Net> {
        self.summands.values()
    }

    pub fn keyed(&self) -> impl Iterator<Item = (&str, &Net)> {
        self.summands.iter().map(|(k, n)| (k.as_str(), n))
    }

    pub fn keys(&self) -> Vec<&str> {
        self.summands.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, n: &Net) -> bool {
        self.summands.contains_key(&canonical_key(n))
    }

    pub fn contains_key(&self, k: &str) -> bool {
        self.summands.contains_key(k)
    }

    pub fn into_nets(self) -> Vec<Net> {
        self.summands.into_values().collect()
    }
}

impl FromIterator<Net> for NetSum {
    fn from_iter<I: IntoIterator<Item = Net>>(iter: I) -> Self {
        let mut s = NetSum::zero();
        for n in iter {
            s.push(n);
        }
        s
    }
}
