//! Finite ontic models.
//!
//! A model is a set of ontic states and, for each measurement, an outcome
//! function `ξ(q | λ)` and a disturbance kernel `γ(λ' | q, λ)`. Preparations
//! are probability vectors over the states. Everything is exact.
//!
//! Kernel rows exist for every `(state, outcome)` pair. Rows whose outcome
//! has `ξ = 0` are never consulted and default to the point mass on the
//! source state.

use indexmap::IndexMap;
use num_traits::{One, Signed, Zero};

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::labels;
use crate::rational::{self, Prob};
use crate::validation::{ValidationReport, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Preparation {
    weights: Vec<Prob>,
}

impl Preparation {
    /// Builds a preparation, requiring nonnegative weights that sum to one.
    pub fn new(weights: Vec<Prob>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::NegativeWeight(rational::format(w)));
        }
        let total: Prob = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::WeightsNotNormalized(rational::format(&total)));
        }
        Ok(Self { weights })
    }

    /// Builds a preparation without checks; [`validate_model`] style reports
    /// are the caller's responsibility.
    pub fn unchecked(weights: Vec<Prob>) -> Self {
        Self { weights }
    }

    pub fn point(n_states: usize, index: usize) -> Self {
        let mut weights = vec![Prob::zero(); n_states];
        weights[index] = Prob::one();
        Self { weights }
    }

    pub fn uniform(n_states: usize) -> Self {
        let w = rational::ratio(1, n_states as i64);
        Self {
            weights: vec![w; n_states],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Prob] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &Prob {
        &self.weights[index]
    }

    pub fn total(&self) -> Prob {
        self.weights.iter().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, _)| i)
    }

    pub fn is_point_mass_on(&self, index: usize) -> bool {
        self.weights
            .iter()
            .enumerate()
            .all(|(i, w)| if i == index { w.is_one() } else { w.is_zero() })
    }

    /// Rescales to total weight one. Fails on an all-zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::WeightsNotNormalized("0".into()));
        }
        Ok(Self {
            weights: self.weights.iter().map(|w| w / &total).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnticMeasurement {
    pub outcomes: Vec<String>,
    /// `xi[state][outcome]`
    pub xi: Vec<Vec<Prob>>,
    /// `gamma[state][outcome]`, a distribution over post-measurement states.
    pub gamma: Vec<Vec<Preparation>>,
}

impl OnticMeasurement {
    /// A measurement with all-zero outcome table and identity kernels, to be
    /// filled in with [`OnticMeasurement::set`].
    pub fn blank(n_states: usize, outcomes: &[&str]) -> Self {
        let k = outcomes.len();
        Self {
            outcomes: outcomes.iter().map(|s| s.to_string()).collect(),
            xi: vec![vec![Prob::zero(); k]; n_states],
            gamma: (0..n_states)
                .map(|s| vec![Preparation::point(n_states, s); k])
                .collect(),
        }
    }

    /// Sets `ξ(outcome | state) = p` and the kernel row for that pair.
    pub fn set(&mut self, state: usize, outcome: usize, p: Prob, update: Preparation) -> &mut Self {
        self.xi[state][outcome] = p;
        self.gamma[state][outcome] = update;
        self
    }

    pub fn n_states(&self) -> usize {
        self.xi.len()
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }

    fn require_outcome(&self, label: &str) -> Result<usize> {
        self.outcome_index(label).ok_or_else(|| Error::UnknownOutcome {
            measurement: String::new(),
            outcome: label.to_string(),
        })
    }

    /// `ξ(q | λ) = 1`, exactly.
    pub fn certain(&self, state: usize, outcome: usize) -> bool {
        self.xi[state][outcome].is_one()
    }

    /// Unnormalized post-measurement weights for one outcome:
    /// `Σ_λ0 w(λ0) ξ(q|λ0) γ(λ|q,λ0)`. The total is the outcome's probability.
    fn push_forward(&self, weights: &[Prob], outcome: usize) -> Vec<Prob> {
        let n = self.n_states();
        let mut out = vec![Prob::zero(); n];
        for (src, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let xi = &self.xi[src][outcome];
            if xi.is_zero() {
                continue;
            }
            let flow = w * xi;
            for (dst, g) in self.gamma[src][outcome].weights().iter().enumerate() {
                if !g.is_zero() {
                    out[dst] += &flow * g;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnticModel {
    pub states: Vec<String>,
    pub measurements: IndexMap<String, OnticMeasurement>,
    pub do_nothing_label: String,
}

impl OnticModel {
    pub fn new(states: Vec<String>) -> Self {
        Self {
            states,
            measurements: IndexMap::new(),
            do_nothing_label: labels::N.to_string(),
        }
    }

    pub fn with_measurement(mut self, label: &str, m: OnticMeasurement) -> Self {
        self.measurements.insert(label.to_string(), m);
        self
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    pub fn measurement(&self, label: &str) -> Result<&OnticMeasurement> {
        self.measurements
            .get(label)
            .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))
    }

    /// Preparation from `(state label, weight)` pairs; unlisted states get 0.
    pub fn preparation(&self, pairs: &[(&str, Prob)]) -> Result<Preparation> {
        let mut weights = vec![Prob::zero(); self.n_states()];
        for (label, w) in pairs {
            weights[self.state_index(label)?] += w;
        }
        Preparation::new(weights)
    }

    pub fn point(&self, label: &str) -> Result<Preparation> {
        Ok(Preparation::point(self.n_states(), self.state_index(label)?))
    }

    /// Label/weight pairs of a preparation's support, for display.
    pub fn describe(&self, prep: &Preparation) -> Vec<(String, Prob)> {
        prep.support()
            .map(|i| (self.states[i].clone(), prep.weight(i).clone()))
            .collect()
    }
}

fn check_states(prep: &Preparation, m: &OnticMeasurement) -> Result<()> {
    if prep.len() != m.n_states() {
        return Err(Error::StateSetMismatch {
            expected: m.n_states(),
            found: prep.len(),
        });
    }
    Ok(())
}

/// Reports every outcome row or kernel row not summing to one, every negative
/// entry, duplicate state labels and tables whose shape disagrees with the
/// state list.
pub fn validate_model(m: &OnticModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = m.n_states();
    for (i, s) in m.states.iter().enumerate() {
        if m.states[..i].contains(s) {
            report.push(ViolationKind::DuplicateLabel, format!("state {s}"), 0.0);
        }
    }
    for (label, meas) in &m.measurements {
        let k = meas.outcomes.len();
        if meas.xi.len() != n || meas.gamma.len() != n {
            report.push(ViolationKind::Dimension, label.as_str(), 0.0);
            continue;
        }
        for (i, o) in meas.outcomes.iter().enumerate() {
            if meas.outcomes[..i].contains(o) {
                report.push(ViolationKind::DuplicateLabel, format!("{label}/{o}"), 0.0);
            }
        }
        for (src, state) in m.states.iter().enumerate() {
            let row = &meas.xi[src];
            if row.len() != k || meas.gamma[src].len() != k {
                report.push(ViolationKind::Dimension, format!("{label}[{state}]"), 0.0);
                continue;
            }
            for (q, p) in row.iter().enumerate() {
                if p.is_negative() {
                    report.push_exact(
                        ViolationKind::NegativeEntry,
                        format!("{label}: xi({}|{state})", meas.outcomes[q]),
                        p,
                    );
                }
            }
            let sum: Prob = row.iter().sum();
            if !sum.is_one() {
                report.push_exact(
                    ViolationKind::RowSum,
                    format!("{label}: xi(.|{state})"),
                    &(sum - Prob::one()),
                );
            }
            for (q, g) in meas.gamma[src].iter().enumerate() {
                let loc = format!("{label}: gamma(.|{},{state})", meas.outcomes[q]);
                if g.len() != n {
                    report.push(ViolationKind::Dimension, loc, 0.0);
                    continue;
                }
                if let Some(w) = g.weights().iter().find(|w| w.is_negative()) {
                    report.push_exact(ViolationKind::NegativeEntry, loc.clone(), w);
                }
                let total = g.total();
                if !total.is_one() {
                    report.push_exact(ViolationKind::RowSum, loc, &(total - Prob::one()));
                }
            }
        }
    }
    report
}

/// `P(q) = Σ_λ μ(λ) ξ(q|λ)` for every outcome, in outcome order.
pub fn outcome_probability(prep: &Preparation, m: &OnticMeasurement) -> Result<IndexMap<String, Prob>> {
    check_states(prep, m)?;
    Ok(m.outcomes
        .iter()
        .enumerate()
        .map(|(q, label)| {
            let p = prep
                .weights()
                .iter()
                .zip(&m.xi)
                .map(|(w, row)| w * &row[q])
                .sum();
            (label.clone(), p)
        })
        .collect())
}

/// Probability of outcome `q` and the preparation conditioned on it.
pub fn evolve_preparation(prep: &Preparation, m: &OnticMeasurement, q: &str) -> Result<(Prob, Preparation)> {
    check_states(prep, m)?;
    let outcome = m.require_outcome(q)?;
    let pushed = m.push_forward(prep.weights(), outcome);
    let p: Prob = pushed.iter().sum();
    if p.is_zero() {
        return Err(Error::ZeroProbabilityOutcome(q.to_string()));
    }
    let post = pushed.into_iter().map(|w| w / &p).collect();
    Ok((p, Preparation::unchecked(post)))
}

/// Exact joint distribution of a measurement sequence, enumerating every
/// branch. The do-nothing label contributes no outcome.
pub fn sequence_distribution(m: &OnticModel, prep: &Preparation, seq: &[&str]) -> Result<OutcomeDistribution<Prob>> {
    let steps = seq
        .iter()
        .filter(|l| **l != m.do_nothing_label)
        .map(|l| m.measurement(l))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = steps.first() {
        check_states(prep, first)?;
    }
    let mut out = OutcomeDistribution::new();
    let mut prefix = Vec::with_capacity(steps.len());
    chain(&steps, prep.weights().to_vec(), &mut prefix, &mut out);
    Ok(out)
}

// Carries the unnormalized measure down the branch; its total at the leaf is
// the probability of the outcome string.
fn chain(
    steps: &[&OnticMeasurement],
    weights: Vec<Prob>,
    prefix: &mut Vec<String>,
    out: &mut OutcomeDistribution<Prob>,
) {
    let Some((m, rest)) = steps.split_first() else {
        out.push(prefix.clone(), weights.iter().sum());
        return;
    };
    for (q, label) in m.outcomes.iter().enumerate() {
        prefix.push(label.clone());
        chain(rest, m.push_forward(&weights, q), prefix, out);
        prefix.pop();
    }
}

/// Convex combination of preparations.
pub fn mix_preparations(parts: &[(Prob, Preparation)]) -> Result<Preparation> {
    if let Some((w, _)) = parts.iter().find(|(w, _)| w.is_negative()) {
        return Err(Error::NegativeWeight(rational::format(w)));
    }
    let total: Prob = parts.iter().map(|(w, _)| w).sum();
    if !total.is_one() {
        return Err(Error::WeightsNotNormalized(rational::format(&total)));
    }
    let n = parts.first().map_or(0, |(_, p)| p.len());
    let mut weights = vec![Prob::zero(); n];
    for (w, p) in parts {
        if p.len() != n {
            return Err(Error::StateSetMismatch {
                expected: n,
                found: p.len(),
            });
        }
        for (acc, x) in weights.iter_mut().zip(p.weights()) {
            *acc += w * x;
        }
    }
    Ok(Preparation::unchecked(weights))
}

/// True iff every kernel row that can be reached (`ξ > 0`) leaves the state
/// where it was.
pub fn is_nim(m: &OnticMeasurement) -> bool {
    m.xi.iter().enumerate().all(|(src, row)| {
        row.iter()
            .enumerate()
            .all(|(q, p)| p.is_zero() || m.gamma[src][q].is_point_mass_on(src))
    })
}
