//! Classicality diagnostics over operational statistics and ontic models.
//!
//! Box questions follow [`Roles`]: the first box question plays box 1, the
//! second plays box 2, and box 3 holds every state answering both negatively.

use std::fmt;

use indexmap::IndexMap;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ontic::{self, OnticModel, Preparation};
use crate::rational::{self, int, one, zero, Prob};
use crate::stats::{OperationalStats, Roles, Which};
use crate::zoo::NamedModel;

/// `Σ_j P_M(A, q_j) − P_N(A)` for both box measurements. Zero means the
/// measurement cannot be detected by the post-selection.
pub fn ndm_gap(stats: &OperationalStats) -> IndexMap<String, Prob> {
    [Which::First, Which::Second]
        .into_iter()
        .map(|w| {
            let label = measurement_of(stats, w).to_string();
            (label, stats.table(w).post() - &stats.p_n_a)
        })
        .collect()
}

fn measurement_of(stats: &OperationalStats, which: Which) -> &str {
    match which {
        Which::First => &stats.roles.first.measurement,
        Which::Second => &stats.roles.second.measurement,
    }
}

fn gaps_vanish(stats: &OperationalStats) -> bool {
    ndm_gap(stats).values().all(|g| stats.is_zero(g))
}

/// `P_M1(1|A) + P_M2(2|A)`.
pub fn pps_score(stats: &OperationalStats) -> Result<Prob> {
    let mut score = zero();
    for w in [Which::First, Which::Second] {
        let t = stats.table(w);
        let post = t.post();
        if post.is_zero() {
            return Err(Error::UndefinedConditional(measurement_of(stats, w).to_string()));
        }
        score += &t.hit_post / post;
    }
    Ok(score)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PpsVerdict {
    /// Score above one with both measurements undetectable.
    TruePps,
    /// Score above one, but some intervening measurement is detectable.
    NotTruePps,
    NoParadox,
    /// A post-selection conditional is undefined.
    Undefined,
}

pub fn pps_verdict(stats: &OperationalStats) -> PpsVerdict {
    match pps_score(stats) {
        Err(_) => PpsVerdict::Undefined,
        Ok(score) => {
            if !stats.is_positive(&(score - one())) {
                PpsVerdict::NoParadox
            } else if gaps_vanish(stats) {
                PpsVerdict::TruePps
            } else {
                PpsVerdict::NotTruePps
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NimBound {
    pub holds: bool,
    #[serde(with = "rational::serde_prob")]
    pub slack: Prob,
}

/// `P_N(A) − P_M1(A,1) − P_M2(A,2)`. Negative slack rules out every
/// non-invasive model of these statistics.
pub fn nim_bound_check(stats: &OperationalStats) -> NimBound {
    let slack = &stats.p_n_a - &stats.first.hit_post - &stats.second.hit_post;
    NimBound {
        holds: !stats.is_negative(&slack),
        slack,
    }
}

/// Observed Leggett-Garg value `4(P_N(A) − P_M1(A,1) − P_M2(A,2)) − 1`.
pub fn lgi_value(stats: &OperationalStats) -> Prob {
    int(4) * nim_bound_check(stats).slack - one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LgiVerdict {
    Violated,
    Satisfied,
    /// Below −1, but a box measurement is detectable, so the observed value
    /// does not test the inequality.
    DetectableDisturbance,
}

impl fmt::Display for LgiVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LgiVerdict::Violated => "VIOLATED",
            LgiVerdict::Satisfied => "satisfied",
            LgiVerdict::DetectableDisturbance => "not a test (detectable disturbance)",
        })
    }
}

pub fn lgi_verdict(stats: &OperationalStats) -> LgiVerdict {
    let below = stats.is_negative(&(lgi_value(stats) + one()));
    match (below, gaps_vanish(stats)) {
        (false, _) => LgiVerdict::Satisfied,
        (true, true) => LgiVerdict::Violated,
        (true, false) => LgiVerdict::DetectableDisturbance,
    }
}

/// `|P_mixed(hit) − P_direct(hit)|` where the mixed value infers Bob's result
/// from the post-selection conditionals weighted by the undisturbed `P_N`.
pub fn counterfactual_consistency(stats: &OperationalStats, measurement: &str) -> Result<Prob> {
    let which = if measurement == stats.roles.first.measurement {
        Which::First
    } else if measurement == stats.roles.second.measurement {
        Which::Second
    } else {
        return Err(Error::UnknownMeasurement(measurement.to_string()));
    };
    let t = stats.table(which);
    let (post, not_post) = (t.post(), t.not_post());
    if post.is_zero() || not_post.is_zero() {
        return Err(Error::UndefinedConditional(measurement.to_string()));
    }
    let mixed = &t.hit_post / post * &stats.p_n_a + &t.hit_not_post / not_post * stats.p_n_not_a();
    Ok((mixed - t.hit()).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleOccupancy {
    /// Mean of the two orders, i.e. the rate at which Bob sees both balls when
    /// he picks the order uniformly.
    #[serde(with = "rational::serde_prob")]
    pub value: Prob,
    #[serde(with = "rational::serde_prob")]
    pub first_then_second: Prob,
    #[serde(with = "rational::serde_prob")]
    pub second_then_first: Prob,
}

/// Probability that opening both boxes finds a ball in each. Needs the
/// two-measurement sequences in `stats.extra`.
pub fn double_occupancy(stats: &OperationalStats) -> Result<DoubleOccupancy> {
    let r = &stats.roles;
    let (a, b) = (&r.first, &r.second);
    let lookup = |seq: [&str; 2], outcomes: [&str; 2]| {
        stats
            .sequence(&seq)
            .map(|d| d.prob(&outcomes))
            .ok_or_else(|| Error::UnknownMeasurement(seq.join(",")))
    };
    let ab = lookup([&a.measurement, &b.measurement], [&a.hit, &b.hit])?;
    let ba = lookup([&b.measurement, &a.measurement], [&b.hit, &a.hit])?;
    Ok(DoubleOccupancy {
        value: (&ab + &ba) / int(2),
        first_then_second: ab,
        second_then_first: ba,
    })
}

/// Probability that an immediate repeat of each box measurement disagrees
/// with the first result. Zero for repeatable measurements.
pub fn repeat_disagreement(stats: &OperationalStats) -> IndexMap<String, Prob> {
    stats
        .roles
        .boxes()
        .into_iter()
        .filter_map(|q| {
            let m = q.measurement.as_str();
            let d = stats.sequence(&[m, m])?;
            Some((m.to_string(), d.prob(&[&q.hit, &q.miss]) + d.prob(&[&q.miss, &q.hit])))
        })
        .collect()
}

/// Split of a preparation into box-definite parts: `μ = Σ p_i ν_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub weights: [Prob; 3],
    /// `None` where the weight is zero.
    pub components: [Option<Preparation>; 3],
}

impl Decomposition {
    pub fn recombine(&self) -> Result<Preparation> {
        let parts: Vec<(Prob, Preparation)> = self
            .weights
            .iter()
            .zip(&self.components)
            .filter_map(|(w, c)| c.as_ref().map(|c| (w.clone(), c.clone())))
            .collect();
        ontic::mix_preparations(&parts)
    }
}

/// Box of an ontic state, or `None` if it answers some box question
/// stochastically or claims both boxes.
fn box_of(model: &OnticModel, roles: &Roles, state: usize) -> Result<Option<usize>> {
    let mut hits = [false; 2];
    for (slot, q) in hits.iter_mut().zip(roles.boxes()) {
        let m = model.measurement(&q.measurement)?;
        let hit = m.outcome_index(&q.hit).ok_or_else(|| Error::UnknownOutcome {
            measurement: q.measurement.clone(),
            outcome: q.hit.clone(),
        })?;
        let xi = &m.xi[state][hit];
        if xi.is_one() {
            *slot = true;
        } else if !xi.is_zero() {
            return Ok(None);
        }
    }
    Ok(match hits {
        [true, false] => Some(0),
        [false, true] => Some(1),
        [false, false] => Some(2),
        [true, true] => None,
    })
}

/// Partitions the support of `prep` by box. `None` if some support state is
/// not box-definite.
pub fn macrorealist_decomposition(model: &OnticModel, prep: &Preparation, roles: &Roles) -> Result<Option<Decomposition>> {
    let n = model.n_states();
    let mut parts: [Vec<Prob>; 3] = std::array::from_fn(|_| vec![zero(); n]);
    for s in prep.support() {
        let Some(b) = box_of(model, roles, s)? else {
            return Ok(None);
        };
        parts[b][s] = prep.weight(s).clone();
    }
    let weights: [Prob; 3] = std::array::from_fn(|b| parts[b].iter().sum());
    let components = std::array::from_fn(|b| {
        if weights[b].is_zero() {
            None
        } else {
            Some(Preparation::unchecked(parts[b].iter().map(|w| w / &weights[b]).collect()))
        }
    });
    Ok(Some(Decomposition { weights, components }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MrClass {
    #[serde(rename = "MR1")]
    Mr1,
    #[serde(rename = "MR2")]
    Mr2,
    #[serde(rename = "MR3")]
    Mr3,
    #[serde(rename = "not-macrorealist")]
    NotMacrorealist,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl fmt::Display for MrClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MrClass::Mr1 => "MR1",
            MrClass::Mr2 => "MR2",
            MrClass::Mr3 => "MR3",
            MrClass::NotMacrorealist => "not-macrorealist",
            MrClass::Undetermined => "undetermined",
        })
    }
}

fn support_within(inner: &Preparation, outer: &Preparation) -> bool {
    inner.support().all(|s| !outer.weight(s).is_zero())
}

/// Compares each box component `ν_i` (with `p_i > 0`) against the eigenstate
/// preparation `μ_i`. Equal everywhere is MR1, same supports MR2, a novel
/// state MR3. A missing eigenstate preparation leaves the class undetermined
/// unless some other box already shows a novel state.
pub fn classify_mr(
    model: &OnticModel,
    prep: &Preparation,
    eigen: [Option<&Preparation>; 3],
    roles: &Roles,
) -> Result<MrClass> {
    let Some(dec) = macrorealist_decomposition(model, prep, roles)? else {
        return Ok(MrClass::NotMacrorealist);
    };
    let mut missing = false;
    let mut differs = false;
    for (nu, mu) in dec.components.iter().zip(eigen) {
        let Some(nu) = nu else { continue };
        let Some(mu) = mu else {
            missing = true;
            continue;
        };
        if !support_within(nu, mu) {
            return Ok(MrClass::Mr3);
        }
        differs |= nu != mu;
    }
    Ok(match (missing, differs) {
        (true, _) => MrClass::Undetermined,
        (false, true) => MrClass::Mr2,
        (false, false) => MrClass::Mr1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NimWitness {
    /// 1-based box number.
    #[serde(rename = "box")]
    pub box_number: usize,
    pub measurement: String,
    pub outcome: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NimCheck {
    pub nim1: bool,
    pub nim2: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nim1_witness: Option<NimWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nim2_witness: Option<NimWitness>,
    /// True when judged from the decomposition; false when judged from the
    /// kernels directly because no decomposition exists.
    pub from_decomposition: bool,
}

fn first_difference(model: &OnticModel, a: &Preparation, b: &Preparation) -> Option<String> {
    (0..model.n_states())
        .find(|&s| a.weight(s) != b.weight(s))
        .map(|s| model.states[s].clone())
}

/// NIM1: finding the ball in box `i` leaves exactly `ν_i`. NIM2: not finding
/// it leaves the renormalized mixture of the other components. Without a
/// decomposition both are judged on the kernels: every reachable hit (miss)
/// transition from the support must leave the state unchanged.
pub fn nim1_nim2_check(
    model: &OnticModel,
    prep: &Preparation,
    decomposition: Option<&Decomposition>,
    roles: &Roles,
) -> Result<NimCheck> {
    let mut check = NimCheck {
        nim1: true,
        nim2: true,
        nim1_witness: None,
        nim2_witness: None,
        from_decomposition: decomposition.is_some(),
    };
    for (b, q) in roles.boxes().into_iter().enumerate() {
        let m = model.measurement(&q.measurement)?;
        let witness = |outcome: &str, state: String| NimWitness {
            box_number: b + 1,
            measurement: q.measurement.clone(),
            outcome: outcome.to_string(),
            state,
        };
        let Some(dec) = decomposition else {
            for s in prep.support() {
                for (outcome, is_hit) in [(&q.hit, true), (&q.miss, false)] {
                    let k = m.outcome_index(outcome).ok_or_else(|| Error::UnknownOutcome {
                        measurement: q.measurement.clone(),
                        outcome: outcome.clone(),
                    })?;
                    if m.xi[s][k].is_zero() || m.gamma[s][k].is_point_mass_on(s) {
                        continue;
                    }
                    let w = Some(witness(outcome, model.states[s].clone()));
                    if is_hit && check.nim1 {
                        check.nim1 = false;
                        check.nim1_witness = w;
                    } else if !is_hit && check.nim2 {
                        check.nim2 = false;
                        check.nim2_witness = w;
                    }
                }
            }
            continue;
        };
        let p = &dec.weights[b];
        if check.nim1 {
            if let Some(nu) = &dec.components[b] {
                let (_, post) = ontic::evolve_preparation(prep, m, &q.hit)?;
                if let Some(state) = first_difference(model, &post, nu) {
                    check.nim1 = false;
                    check.nim1_witness = Some(witness(&q.hit, state));
                }
            }
        }
        if check.nim2 && !p.is_one() {
            let rest: Vec<(Prob, Preparation)> = (0..3)
                .filter(|&j| j != b)
                .filter_map(|j| dec.components[j].as_ref().map(|c| (&dec.weights[j] / (one() - p), c.clone())))
                .collect();
            let expected = ontic::mix_preparations(&rest)?;
            let (_, post) = ontic::evolve_preparation(prep, m, &q.miss)?;
            if let Some(state) = first_difference(model, &post, &expected) {
                check.nim2 = false;
                check.nim2_witness = Some(witness(&q.miss, state));
            }
        }
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenGap {
    pub preparation: String,
    pub measurement: String,
    #[serde(with = "rational::serde_prob")]
    pub gap: Prob,
}

/// `|Σ_q P_M(q, A) − P_N(A)|` for every eigenstate preparation of the model
/// and both box measurements, using whichever engine the model has.
pub fn check_eigenstate_ndm(model: &NamedModel) -> Result<Vec<EigenGap>> {
    let mut out = Vec::new();
    for name in model.eigen_preparations.iter().flatten() {
        let stats = model.stats(Some(name))?;
        for (measurement, gap) in ndm_gap(&stats) {
            out.push(EigenGap {
                preparation: name.clone(),
                measurement,
                gap: gap.abs(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub p: [String; 3],
    /// Sparse `state → weight` maps; empty where `p_i = 0`.
    pub nu: [IndexMap<String, String>; 3],
}

impl DecompositionSummary {
    fn new(model: &OnticModel, dec: &Decomposition) -> Self {
        Self {
            p: std::array::from_fn(|i| rational::format(&dec.weights[i])),
            nu: std::array::from_fn(|i| {
                dec.components[i]
                    .as_ref()
                    .map(|c| {
                        model
                            .describe(c)
                            .into_iter()
                            .map(|(s, w)| (s, rational::format(&w)))
                            .collect()
                    })
                    .unwrap_or_default()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalityReport {
    pub model: String,
    pub preparation: String,
    #[serde(with = "rational::serde_prob_map")]
    pub ndm_gaps: IndexMap<String, Prob>,
    #[serde(with = "rational::serde_opt_prob")]
    pub pps_score: Option<Prob>,
    pub pps_verdict: PpsVerdict,
    pub nim_bound: NimBound,
    #[serde(with = "rational::serde_prob")]
    pub lgi_value: Prob,
    pub lgi_verdict: LgiVerdict,
    /// Largest counterfactual gap over the box measurements with defined
    /// conditionals.
    #[serde(with = "rational::serde_opt_prob")]
    pub consistency_gap: Option<Prob>,
    #[serde(with = "rational::serde_prob_map")]
    pub consistency_gaps: IndexMap<String, Prob>,
    pub double_occupancy: DoubleOccupancy,
    #[serde(with = "rational::serde_prob_map")]
    pub repeat_disagreement: IndexMap<String, Prob>,
    pub mr_class: MrClass,
    pub decomposition: Option<DecompositionSummary>,
    pub nim: Option<NimCheck>,
    pub eigenstate_ndm: Vec<EigenGap>,
    /// MR1 with every eigenstate gap zero: such a model cannot violate the
    /// inequality.
    pub mr1_with_eigenstate_ndm: bool,
    /// The above together with an observed violation. Never expected.
    pub mr1_contradiction: bool,
    pub exact: bool,
}

impl ClassicalityReport {
    /// The operational part of the report. Ontic-only fields stay empty.
    pub fn from_stats(model: &str, preparation: &str, stats: &OperationalStats) -> Result<Self> {
        let mut consistency_gaps = IndexMap::new();
        for q in stats.roles.boxes() {
            if let Ok(g) = counterfactual_consistency(stats, &q.measurement) {
                consistency_gaps.insert(q.measurement.clone(), g);
            }
        }
        Ok(Self {
            model: model.to_string(),
            preparation: preparation.to_string(),
            ndm_gaps: ndm_gap(stats),
            pps_score: pps_score(stats).ok(),
            pps_verdict: pps_verdict(stats),
            nim_bound: nim_bound_check(stats),
            lgi_value: lgi_value(stats),
            lgi_verdict: lgi_verdict(stats),
            consistency_gap: consistency_gaps.values().max().cloned(),
            consistency_gaps,
            double_occupancy: double_occupancy(stats)?,
            repeat_disagreement: repeat_disagreement(stats),
            mr_class: MrClass::Undetermined,
            decomposition: None,
            nim: None,
            eigenstate_ndm: Vec::new(),
            mr1_with_eigenstate_ndm: false,
            mr1_contradiction: false,
            exact: stats.exact,
        })
    }

    pub fn for_model(model: &NamedModel, prep: Option<&str>) -> Result<Self> {
        let prep_name = prep.unwrap_or(&model.default_preparation);
        let stats = model.stats(Some(prep_name))?;
        let mut report = Self::from_stats(&model.name, prep_name, &stats)?;
        report.eigenstate_ndm = check_eigenstate_ndm(model)?;
        if let Ok(o) = model.ontic() {
            let mu = model.ontic_preparation(Some(prep_name))?;
            let dec = macrorealist_decomposition(&o.model, mu, &model.roles)?;
            report.decomposition = dec.as_ref().map(|d| DecompositionSummary::new(&o.model, d));
            report.nim = Some(nim1_nim2_check(&o.model, mu, dec.as_ref(), &model.roles)?);
            report.mr_class = classify_mr(&o.model, mu, model.eigen_ontic_preparations()?, &model.roles)?;
        }
        let eigen_ndm = report.eigenstate_ndm.iter().all(|g| stats.is_zero(&g.gap));
        report.mr1_with_eigenstate_ndm = report.mr_class == MrClass::Mr1 && eigen_ndm;
        report.mr1_contradiction = report.mr1_with_eigenstate_ndm && report.lgi_verdict == LgiVerdict::Violated;
        Ok(report)
    }

    /// True when nothing in the report rules out a classical account. A failed
    /// NIM bound alone does not count: invasive classical models fail it too,
    /// and then the NDM gaps show the disturbance.
    pub fn passes(&self) -> bool {
        self.lgi_verdict != LgiVerdict::Violated
            && self.pps_verdict != PpsVerdict::TruePps
            && self.double_occupancy.value.is_zero()
            && !self.mr1_contradiction
    }
}

fn fmt_gaps(map: &IndexMap<String, Prob>) -> String {
    if map.is_empty() {
        return "undefined".into();
    }
    map.iter()
        .map(|(k, v)| format!("{k}: {}", rational::format(v)))
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for ClassicalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, k: &str, v: String| writeln!(f, "{k:<22}{v}");
        row(f, "model", self.model.clone())?;
        row(f, "preparation", self.preparation.clone())?;
        row(f, "NDM gaps", fmt_gaps(&self.ndm_gaps))?;
        let verdict = match self.pps_verdict {
            PpsVerdict::TruePps => "true PPS paradox",
            PpsVerdict::NotTruePps => "NOT a true PPS paradox (detectable measurement)",
            PpsVerdict::NoParadox => "no paradox",
            PpsVerdict::Undefined => "undefined",
        };
        let score = self.pps_score.as_ref().map_or("undefined".into(), rational::format);
        row(f, "PPS score", format!("{score}  {verdict}"))?;
        let bound = if self.nim_bound.holds {
            "holds"
        } else {
            "fails: no non-invasive model"
        };
        row(f, "NIM bound slack", format!("{}  {bound}", rational::format(&self.nim_bound.slack)))?;
        row(f, "LGI value", format!("{}  {}", rational::format(&self.lgi_value), self.lgi_verdict))?;
        row(f, "consistency gaps", fmt_gaps(&self.consistency_gaps))?;
        let d = &self.double_occupancy;
        let flag = if d.value.is_zero() { "" } else { "  TWO BALLS" };
        row(
            f,
            "double occupancy",
            format!(
                "{} (orders: {}, {}){flag}",
                rational::format(&d.value),
                rational::format(&d.first_then_second),
                rational::format(&d.second_then_first)
            ),
        )?;
        let unstable = self.repeat_disagreement.values().any(|v| !v.is_zero());
        let note = if unstable { "  unstable on repetition" } else { "" };
        row(f, "repeat disagreement", format!("{}{note}", fmt_gaps(&self.repeat_disagreement)))?;
        row(f, "MR class", self.mr_class.to_string())?;
        if let Some(dec) = &self.decomposition {
            row(f, "decomposition p", dec.p.join(", "))?;
        }
        match &self.nim {
            Some(n) => {
                let w = |ok: bool, wit: &Option<NimWitness>| match (ok, wit) {
                    (true, _) => "holds".to_string(),
                    (false, Some(w)) => format!("fails (box {}, {} {} at {})", w.box_number, w.measurement, w.outcome, w.state),
                    (false, None) => "fails".to_string(),
                };
                row(f, "NIM1", w(n.nim1, &n.nim1_witness))?;
                row(f, "NIM2", w(n.nim2, &n.nim2_witness))?;
            }
            None => row(f, "NIM1 / NIM2", "n/a".into())?,
        }
        if self.eigenstate_ndm.is_empty() {
            row(f, "eigenstate NDM", "no eigenstate preparations".into())?;
        } else {
            let worst = self.eigenstate_ndm.iter().map(|g| &g.gap).max().cloned().unwrap_or_else(zero);
            row(f, "eigenstate NDM", format!("max gap {}", rational::format(&worst)))?;
        }
        if self.mr1_contradiction {
            row(f, "MR1 contradiction", "yes".into())?;
        }
        if !self.exact {
            row(f, "note", "values rounded from floating point".into())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::stats::JointTable;
    use crate::zoo;

    fn synthetic(hit_a: Prob, p_n_a: Prob) -> OperationalStats {
        let rest = one() - &hit_a;
        let t = JointTable::new(hit_a, zero(), zero(), rest);
        OperationalStats::from_tables(Roles::three_box(), t.clone(), t, p_n_a)
    }

    #[test]
    fn boundary_cases() {
        let s = synthetic(ratio(1, 10), ratio(1, 5));
        assert_eq!(lgi_value(&s), -one());
        assert_eq!(lgi_verdict(&s), LgiVerdict::Satisfied);
        let s = synthetic(zero(), zero());
        let b = nim_bound_check(&s);
        assert!(b.holds);
        assert_eq!(b.slack, zero());
        assert!(matches!(pps_score(&s), Err(Error::UndefinedConditional(_))));
    }

    #[test]
    fn half_conditionals_are_no_paradox() {
        let t = JointTable::new(ratio(1, 4), ratio(1, 4), zero(), ratio(1, 2));
        let s = OperationalStats::from_tables(Roles::three_box(), t.clone(), t, ratio(1, 2));
        assert_eq!(pps_score(&s).unwrap(), one());
        assert_eq!(pps_verdict(&s), PpsVerdict::NoParadox);
    }

    #[test]
    fn independent_outcomes_are_consistent() {
        let t = JointTable::new(ratio(1, 6), ratio(1, 3), ratio(1, 6), ratio(1, 3));
        let s = OperationalStats::from_tables(Roles::three_box(), t.clone(), t, ratio(1, 2));
        assert_eq!(counterfactual_consistency(&s, "M1").unwrap(), zero());
        assert!(counterfactual_consistency(&s, "M9").is_err());
    }

    #[test]
    fn decomposition_of_a_box_one_point_mass() {
        let m = zoo::mr3_model();
        let o = m.ontic().unwrap();
        let dec = macrorealist_decomposition(&o.model, &o.model.point("λ1").unwrap(), &m.roles)
            .unwrap()
            .unwrap();
        assert_eq!(dec.weights, [one(), zero(), zero()]);
    }

    #[test]
    fn point_mass_eigenstates_are_mr1() {
        let m = zoo::mr3_model();
        let o = m.ontic().unwrap();
        let mu = [o.model.point("λ1").unwrap(), o.model.point("λ5").unwrap(), o.model.point("λ9").unwrap()];
        let prep = ontic::mix_preparations(&[
            (ratio(1, 3), mu[0].clone()),
            (ratio(1, 3), mu[1].clone()),
            (ratio(1, 3), mu[2].clone()),
        ])
        .unwrap();
        let class = classify_mr(&o.model, &prep, [Some(&mu[0]), Some(&mu[1]), Some(&mu[2])], &m.roles).unwrap();
        assert_eq!(class, MrClass::Mr1);
    }

    #[test]
    fn disturbing_toy_model_has_an_eigenstate_gap() {
        // Opening box 1 on a box-1 state knocks the ball onto a state that
        // passes the post-selection.
        let mut m = zoo::mr3_model();
        if let zoo::ModelKind::Ontic(o) = &mut m.kind {
            let m1 = o.model.measurements.get_mut("M1").unwrap();
            m1.gamma[0][0] = Preparation::point(16, 1);
        }
        let gaps = check_eigenstate_ndm(&m).unwrap();
        assert!(gaps.iter().any(|g| g.gap.is_positive()));
    }

    #[test]
    fn report_renders_as_text_and_json() {
        let r = ClassicalityReport::for_model(&zoo::quantum_three_box(), None).unwrap();
        let text = r.to_string();
        assert!(text.contains("-13/9  VIOLATED"));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["lgi_value"], "-13/9");
        assert_eq!(json["mr_class"], "undetermined");
    }
}
