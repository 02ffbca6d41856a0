//! Operational statistics: the tables every classicality check reads.

use std::fmt;

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::Result;
use crate::labels;
use crate::ontic::{self, OnticModel, Preparation};
use crate::quantum::{self, Ket, QuantumScenario};
use crate::rational::{self, Prob};
use crate::validation::{ValidationReport, ViolationKind};

/// A two-outcome measurement read as a yes/no question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxQuestion {
    pub measurement: String,
    pub hit: String,
    pub miss: String,
}

impl BoxQuestion {
    pub fn new(measurement: &str, hit: &str, miss: &str) -> Self {
        Self {
            measurement: measurement.into(),
            hit: hit.into(),
            miss: miss.into(),
        }
    }
}

/// Which measurements play Bob's two box openings and Alice's post-selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub first: BoxQuestion,
    pub second: BoxQuestion,
    pub post: BoxQuestion,
    pub nothing: String,
}

impl Roles {
    pub fn three_box() -> Self {
        Self {
            first: BoxQuestion::new(labels::M1, labels::BOX1, labels::NOT_BOX1),
            second: BoxQuestion::new(labels::M2, labels::BOX2, labels::NOT_BOX2),
            post: BoxQuestion::new(labels::MA, labels::A, labels::NOT_A),
            nothing: labels::N.into(),
        }
    }

    pub fn boxes(&self) -> [&BoxQuestion; 2] {
        [&self.first, &self.second]
    }

    /// Sequences whose distributions make up [`OperationalStats`].
    pub fn sequences(&self) -> Vec<Vec<&str>> {
        let (a, b, f) = (
            self.first.measurement.as_str(),
            self.second.measurement.as_str(),
            self.post.measurement.as_str(),
        );
        vec![vec![a, f], vec![b, f], vec![f], vec![a, b], vec![b, a], vec![a, a], vec![b, b]]
    }
}

pub fn sequence_key(seq: &[&str]) -> String {
    seq.join(",")
}

/// Joint probabilities of one box question and the post-selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    #[serde(with = "rational::serde_prob")]
    pub hit_post: Prob,
    #[serde(with = "rational::serde_prob")]
    pub miss_post: Prob,
    #[serde(with = "rational::serde_prob")]
    pub hit_not_post: Prob,
    #[serde(with = "rational::serde_prob")]
    pub miss_not_post: Prob,
}

impl JointTable {
    pub fn new(hit_post: Prob, miss_post: Prob, hit_not_post: Prob, miss_not_post: Prob) -> Self {
        Self {
            hit_post,
            miss_post,
            hit_not_post,
            miss_not_post,
        }
    }

    fn from_distribution(d: &OutcomeDistribution<Prob>, q: &BoxQuestion, post: &BoxQuestion) -> Self {
        Self {
            hit_post: d.prob(&[&q.hit, &post.hit]),
            miss_post: d.prob(&[&q.miss, &post.hit]),
            hit_not_post: d.prob(&[&q.hit, &post.miss]),
            miss_not_post: d.prob(&[&q.miss, &post.miss]),
        }
    }

    pub fn entries(&self) -> [&Prob; 4] {
        [&self.hit_post, &self.miss_post, &self.hit_not_post, &self.miss_not_post]
    }

    pub fn total(&self) -> Prob {
        self.entries().into_iter().sum()
    }

    /// Marginal probability of the post-selected outcome.
    pub fn post(&self) -> Prob {
        &self.hit_post + &self.miss_post
    }

    pub fn not_post(&self) -> Prob {
        &self.hit_not_post + &self.miss_not_post
    }

    pub fn hit(&self) -> Prob {
        &self.hit_post + &self.hit_not_post
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperationalStats {
    pub roles: Roles,
    pub first: JointTable,
    pub second: JointTable,
    #[serde(with = "rational::serde_prob")]
    pub p_n_a: Prob,
    /// Further sequence distributions, keyed by comma-joined measurement labels.
    pub extra: IndexMap<String, OutcomeDistribution<Prob>>,
    /// False when some float entry could not be snapped onto a small rational;
    /// zero tests then use [`rational::FLOAT_TOLERANCE`].
    pub exact: bool,
}

impl OperationalStats {
    pub fn from_tables(roles: Roles, first: JointTable, second: JointTable, p_n_a: Prob) -> Self {
        Self {
            roles,
            first,
            second,
            p_n_a,
            extra: IndexMap::new(),
            exact: true,
        }
    }

    fn assemble(roles: &Roles, mut run: impl FnMut(&[&str]) -> Result<(OutcomeDistribution<Prob>, bool)>) -> Result<Self> {
        let mut exact = true;
        let mut extra = IndexMap::new();
        for seq in roles.sequences() {
            let (d, ok) = run(&seq)?;
            exact &= ok;
            extra.insert(sequence_key(&seq), d);
        }
        let get = |seq: [&str; 2]| &extra[&sequence_key(&seq)];
        let post = roles.post.measurement.as_str();
        let first = JointTable::from_distribution(get([&roles.first.measurement, post]), &roles.first, &roles.post);
        let second = JointTable::from_distribution(get([&roles.second.measurement, post]), &roles.second, &roles.post);
        let p_n_a = extra[post].prob(&[&roles.post.hit]);
        Ok(Self {
            roles: roles.clone(),
            first,
            second,
            p_n_a,
            extra,
            exact,
        })
    }

    pub fn from_ontic(model: &OnticModel, prep: &Preparation, roles: &Roles) -> Result<Self> {
        Self::assemble(roles, |seq| Ok((ontic::sequence_distribution(model, prep, seq)?, true)))
    }

    /// Statistics of the quantum engine, snapped onto rationals.
    pub fn from_quantum(scenario: &QuantumScenario, state: &Ket, roles: &Roles) -> Result<Self> {
        Self::assemble(roles, |seq| {
            Ok(quantum::sequence_distribution_from(scenario, state, seq)?.rationalize())
        })
    }

    pub fn sequence(&self, seq: &[&str]) -> Option<&OutcomeDistribution<Prob>> {
        self.extra.get(&sequence_key(seq))
    }

    pub fn table(&self, which: Which) -> &JointTable {
        match which {
            Which::First => &self.first,
            Which::Second => &self.second,
        }
    }

    pub fn p_n_not_a(&self) -> Prob {
        rational::one() - &self.p_n_a
    }

    /// Zero test honoring [`OperationalStats::exact`].
    pub fn is_zero(&self, x: &Prob) -> bool {
        if self.exact {
            x.is_zero()
        } else {
            rational::to_f64(x).abs() <= rational::FLOAT_TOLERANCE
        }
    }

    /// `x < 0` beyond tolerance.
    pub fn is_negative(&self, x: &Prob) -> bool {
        x.is_negative() && !self.is_zero(x)
    }

    /// `x > 0` beyond tolerance.
    pub fn is_positive(&self, x: &Prob) -> bool {
        x.is_positive() && !self.is_zero(x)
    }

    /// Joint tables sum to one and every entry lies in `[0, 1]`.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let one = rational::one();
        let checks = [
            (&self.roles.first.measurement, &self.first),
            (&self.roles.second.measurement, &self.second),
        ];
        for (label, table) in checks {
            let residual = table.total() - &one;
            if !self.is_zero(&residual) {
                report.push_exact(ViolationKind::RowSum, label.as_str(), &residual);
            }
            for p in table.entries() {
                if self.is_negative(p) || self.is_positive(&(p - &one)) {
                    report.push_exact(ViolationKind::NegativeEntry, label.as_str(), p);
                }
            }
        }
        if self.is_negative(&self.p_n_a) || self.is_positive(&(&self.p_n_a - &one)) {
            report.push_exact(ViolationKind::NegativeEntry, "P_N", &self.p_n_a);
        }
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

impl fmt::Display for OperationalStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.roles;
        for (q, t) in [(&r.first, &self.first), (&r.second, &self.second)] {
            let p = &r.post;
            let m = &q.measurement;
            writeln!(f, "{m}:")?;
            for (a, b, v) in [
                (&q.hit, &p.hit, &t.hit_post),
                (&q.miss, &p.hit, &t.miss_post),
                (&q.hit, &p.miss, &t.hit_not_post),
                (&q.miss, &p.miss, &t.miss_not_post),
            ] {
                writeln!(f, "  P_{m}({a},{b}) = {}", rational::format(v))?;
            }
        }
        writeln!(
            f,
            "{}: P_{}({}) = {}",
            r.nothing,
            r.nothing,
            r.post.hit,
            rational::format(&self.p_n_a)
        )
    }
}
