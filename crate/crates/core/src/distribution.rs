//! Joint distributions over outcome strings.

use std::fmt;
use std::ops::Add;

use indexmap::IndexMap;
use num_traits::Zero;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::rational::{self, Prob};

/// A probability value that a distribution can hold: `f64` for the quantum
/// engine, [`Prob`] for the exact ontic engine.
pub trait ProbValue: Clone + Zero + Add<Output = Self> + PartialOrd + fmt::Debug {
    fn to_f64(&self) -> f64;
    fn render(&self) -> String;
    fn to_json(&self) -> serde_json::Value;
}

impl ProbValue for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        format!("{self:.12}")
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

impl ProbValue for Prob {
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }

    fn render(&self) -> String {
        rational::format(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rational::format(self))
    }
}

/// Probability of every outcome string of a measurement sequence, in
/// enumeration order (outcome order of the first measurement varies slowest).
/// Zero-probability strings are kept so tables stay complete.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<P> {
    entries: IndexMap<Vec<String>, P>,
}

impl<P: ProbValue> OutcomeDistribution<P> {
    pub fn new() -> Self {
        Self {
            entries: IndexMap::new(),
        }
    }

    /// The distribution of the empty sequence: a single empty string with
    /// probability one.
    pub fn certain(one: P) -> Self {
        let mut d = Self::new();
        d.push(Vec::new(), one);
        d
    }

    pub fn push(&mut self, outcomes: Vec<String>, p: P) {
        let slot = self.entries.entry(outcomes).or_insert_with(P::zero);
        *slot = slot.clone() + p;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], &P)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Probability of one outcome string; strings never produced count as zero.
    pub fn prob(&self, outcomes: &[&str]) -> P {
        self.entries
            .iter()
            .find(|(k, _)| k.len() == outcomes.len() && k.iter().zip(outcomes).all(|(a, b)| a == b))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(P::zero)
    }

    pub fn total(&self) -> P {
        self.entries.values().fold(P::zero(), |acc, v| acc + v.clone())
    }

    /// Sum over all strings satisfying `pred`.
    pub fn sum_where(&self, pred: impl Fn(&[String]) -> bool) -> P {
        self.entries
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(P::zero(), |acc, (_, v)| acc + v.clone())
    }

    /// Marginal probability that position `index` shows `outcome`.
    pub fn marginal(&self, index: usize, outcome: &str) -> P {
        self.sum_where(|k| k.get(index).is_some_and(|o| o == outcome))
    }

    /// Largest absolute entrywise difference against another distribution,
    /// treating missing strings as zero.
    pub fn max_abs_diff<Q: ProbValue>(&self, other: &OutcomeDistribution<Q>) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in self.iter() {
            let refs: Vec<&str> = k.iter().map(String::as_str).collect();
            worst = worst.max((v.to_f64() - other.prob(&refs).to_f64()).abs());
        }
        for (k, v) in other.iter() {
            let refs: Vec<&str> = k.iter().map(String::as_str).collect();
            worst = worst.max((v.to_f64() - self.prob(&refs).to_f64()).abs());
        }
        worst
    }

    pub fn map<Q: ProbValue>(&self, mut f: impl FnMut(&P) -> Q) -> OutcomeDistribution<Q> {
        OutcomeDistribution {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        }
    }
}

impl<P: ProbValue> Default for OutcomeDistribution<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl OutcomeDistribution<f64> {
    /// Snaps every entry onto a small rational. The flag is false if any entry
    /// had to keep its raw binary value.
    pub fn rationalize(&self) -> (OutcomeDistribution<Prob>, bool) {
        let mut exact = true;
        let d = self.map(|&p| {
            let (r, ok) = rational::rationalize(p);
            exact &= ok;
            r
        });
        (d, exact)
    }
}

struct Row<'a, P>(&'a [String], &'a P);

impl<P: ProbValue> Serialize for Row<'_, P> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Row", 2)?;
        st.serialize_field("outcomes", self.0)?;
        st.serialize_field("p", &self.1.to_json())?;
        st.end()
    }
}

impl<P: ProbValue> Serialize for OutcomeDistribution<P> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (k, v) in self.iter() {
            seq.serialize_element(&Row(k, v))?;
        }
        seq.end()
    }
}

impl<P: ProbValue> fmt::Display for OutcomeDistribution<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .iter()
            .map(|(k, _)| outcome_string(k).chars().count())
            .max()
            .unwrap_or(0)
            .max(8);
        writeln!(f, "{:<width$}  probability", "outcomes")?;
        for (k, v) in self.iter() {
            writeln!(f, "{:<width$}  {}", outcome_string(k), v.render())?;
        }
        Ok(())
    }
}

pub fn outcome_string(outcomes: &[String]) -> String {
    if outcomes.is_empty() {
        "()".to_string()
    } else {
        format!("({})", outcomes.join(","))
    }
}
