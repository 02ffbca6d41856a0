//! The seven reference models, each with its preparations and the statistics
//! it is expected to produce.

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::labels;
use crate::ontic::{self, OnticMeasurement, OnticModel, Preparation};
use crate::quantum::{self, Ket, QuantumScenario};
use crate::rational::{self, one, ratio, zero, Prob};
use crate::stats::{BoxQuestion, JointTable, OperationalStats, Roles};

pub const QUANTUM_THREE_BOX: &str = "quantum_three_box";
pub const CHEATING: &str = "cheating";
pub const MR3: &str = "mr3";
pub const MR2: &str = "mr2";
pub const KIRKPATRICK: &str = "kirkpatrick";
pub const RAVON_VAIDMAN: &str = "ravon_vaidman";
pub const LEIFER_SPEKKENS: &str = "leifer_spekkens";

pub const MODEL_NAMES: [&str; 7] = [
    QUANTUM_THREE_BOX,
    CHEATING,
    MR3,
    MR2,
    KIRKPATRICK,
    RAVON_VAIDMAN,
    LEIFER_SPEKKENS,
];

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSystem {
    pub scenario: QuantumScenario,
    pub kets: IndexMap<String, Ket>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnticSystem {
    pub model: OnticModel,
    pub preparations: IndexMap<String, Preparation>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Quantum(QuantumSystem),
    Ontic(OnticSystem),
}

/// A distribution from either engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AnyDistribution {
    Exact(OutcomeDistribution<Prob>),
    Real(OutcomeDistribution<f64>),
}

impl std::fmt::Display for AnyDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnyDistribution::Exact(d) => d.fmt(f),
            AnyDistribution::Real(d) => d.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedModel {
    pub name: String,
    pub kind: ModelKind,
    pub roles: Roles,
    pub default_preparation: String,
    /// Preparation names of the box eigenstates, box 1 to box 3.
    pub eigen_preparations: [Option<String>; 3],
    pub expected_stats: Option<OperationalStats>,
}

impl NamedModel {
    pub fn is_quantum(&self) -> bool {
        matches!(self.kind, ModelKind::Quantum(_))
    }

    pub fn preparation_names(&self) -> Vec<&str> {
        match &self.kind {
            ModelKind::Quantum(q) => q.kets.keys().map(String::as_str).collect(),
            ModelKind::Ontic(o) => o.preparations.keys().map(String::as_str).collect(),
        }
    }

    fn resolve<'a>(&'a self, prep: Option<&'a str>) -> &'a str {
        prep.unwrap_or(&self.default_preparation)
    }

    pub fn ontic(&self) -> Result<&OnticSystem> {
        match &self.kind {
            ModelKind::Ontic(o) => Ok(o),
            ModelKind::Quantum(_) => Err(Error::WrongModelKind("ontic")),
        }
    }

    pub fn quantum(&self) -> Result<&QuantumSystem> {
        match &self.kind {
            ModelKind::Quantum(q) => Ok(q),
            ModelKind::Ontic(_) => Err(Error::WrongModelKind("quantum")),
        }
    }

    pub fn ontic_preparation(&self, prep: Option<&str>) -> Result<&Preparation> {
        let name = self.resolve(prep);
        self.ontic()?
            .preparations
            .get(name)
            .ok_or_else(|| Error::UnknownPreparation(name.to_string()))
    }

    pub fn ket(&self, prep: Option<&str>) -> Result<&Ket> {
        let name = self.resolve(prep);
        self.quantum()?
            .kets
            .get(name)
            .ok_or_else(|| Error::UnknownPreparation(name.to_string()))
    }

    /// Eigenstate preparations that exist, with their box index.
    pub fn eigen_ontic_preparations(&self) -> Result<[Option<&Preparation>; 3]> {
        let mut out = [None; 3];
        for (slot, name) in out.iter_mut().zip(&self.eigen_preparations) {
            if let Some(name) = name {
                *slot = Some(self.ontic_preparation(Some(name))?);
            }
        }
        Ok(out)
    }

    pub fn stats(&self, prep: Option<&str>) -> Result<OperationalStats> {
        match &self.kind {
            ModelKind::Quantum(q) => OperationalStats::from_quantum(&q.scenario, self.ket(prep)?, &self.roles),
            ModelKind::Ontic(o) => OperationalStats::from_ontic(&o.model, self.ontic_preparation(prep)?, &self.roles),
        }
    }

    pub fn sequence(&self, prep: Option<&str>, seq: &[&str]) -> Result<AnyDistribution> {
        match &self.kind {
            ModelKind::Quantum(q) => Ok(AnyDistribution::Real(quantum::sequence_distribution_from(
                &q.scenario,
                self.ket(prep)?,
                seq,
            )?)),
            ModelKind::Ontic(o) => Ok(AnyDistribution::Exact(ontic::sequence_distribution(
                &o.model,
                self.ontic_preparation(prep)?,
                seq,
            )?)),
        }
    }

    /// Labels of every measurement, including the do-nothing label.
    pub fn measurement_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = match &self.kind {
            ModelKind::Quantum(q) => q.scenario.measurements.keys().cloned().collect(),
            ModelKind::Ontic(o) => o.model.measurements.keys().cloned().collect(),
        };
        out.push(self.roles.nothing.clone());
        out
    }
}

fn three_box_expected() -> OperationalStats {
    let t = JointTable::new(ratio(1, 9), zero(), ratio(2, 9), ratio(2, 3));
    OperationalStats::from_tables(Roles::three_box(), t.clone(), t, ratio(1, 9))
}

fn three_box_kets(initial: &Ket) -> IndexMap<String, Ket> {
    let k = |a: &[f64]| Ket::from_real(a).expect("nonzero amplitudes");
    [
        ("1+2+3", initial.clone()),
        ("1", Ket::basis(3, 0)),
        ("2", Ket::basis(3, 1)),
        ("3", Ket::basis(3, 2)),
        ("1+3", k(&[1.0, 0.0, 1.0])),
        ("2+3", k(&[0.0, 1.0, 1.0])),
    ]
    .into_iter()
    .map(|(n, ket)| (n.to_string(), ket))
    .collect()
}

fn box_eigen_names() -> [Option<String>; 3] {
    [Some("1".into()), Some("2".into()), Some("3".into())]
}

pub fn quantum_three_box() -> NamedModel {
    let scenario = quantum::build_three_box_scenario();
    let kets = three_box_kets(&scenario.initial);
    NamedModel {
        name: QUANTUM_THREE_BOX.into(),
        kind: ModelKind::Quantum(QuantumSystem { scenario, kets }),
        roles: Roles::three_box(),
        default_preparation: "1+2+3".into(),
        eigen_preparations: box_eigen_names(),
        expected_stats: Some(three_box_expected()),
    }
}

fn lambda_states(range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("λ{i}")).collect()
}

/// Deterministic measurement: state `s` gives outcome `outcome[s]` and moves
/// to `target[s]`.
fn deterministic(outcomes: &[&str], outcome: &[usize], target: &[usize]) -> OnticMeasurement {
    let n = outcome.len();
    let mut m = OnticMeasurement::blank(n, outcomes);
    for s in 0..n {
        m.set(s, outcome[s], one(), Preparation::point(n, target[s]));
    }
    m
}

fn preparation(n: usize, parts: &[(usize, Prob)]) -> Preparation {
    let mut w = vec![zero(); n];
    for (i, p) in parts {
        w[*i] += p;
    }
    Preparation::new(w).expect("normalized preparation")
}

pub fn cheating_model() -> NamedModel {
    let identity: Vec<usize> = (0..4).collect();
    let model = OnticModel::new(lambda_states(1..=4))
        .with_measurement(labels::M1, deterministic(&[labels::BOX1, labels::NOT_BOX1], &[0, 1, 1, 0], &identity))
        .with_measurement(labels::M2, deterministic(&[labels::BOX2, labels::NOT_BOX2], &[1, 0, 1, 0], &identity))
        .with_measurement(labels::MA, deterministic(&[labels::A, labels::NOT_A], &[1, 1, 1, 0], &identity));
    let plus = preparation(4, &[(0, ratio(2, 9)), (1, ratio(2, 9)), (2, ratio(4, 9)), (3, ratio(1, 9))]);
    NamedModel {
        name: CHEATING.into(),
        kind: ModelKind::Ontic(OnticSystem {
            model,
            preparations: [("plus".to_string(), plus)].into_iter().collect(),
        }),
        roles: Roles::three_box(),
        default_preparation: "plus".into(),
        eigen_preparations: [None, None, None],
        expected_stats: Some(three_box_expected()),
    }
}

/// The sixteen-state model without preparations. States 1-4 hold the ball in
/// box 1, 5-8 in box 2, 9-16 in box 3.
pub fn sixteen_state_model() -> OnticModel {
    let box_of = |s: usize| match s {
        0..=3 => 0,
        4..=7 => 1,
        _ => 2,
    };
    let m1_out: Vec<usize> = (0..16).map(|s| usize::from(box_of(s) != 0)).collect();
    let m2_out: Vec<usize> = (0..16).map(|s| usize::from(box_of(s) != 1)).collect();
    let a_states = [2, 3, 6, 7, 10, 11, 13, 16];
    let ma_out: Vec<usize> = (1..=16).map(|s| usize::from(!a_states.contains(&s))).collect();
    let m1_target = [1, 2, 1, 2, 5, 6, 7, 8, 9, 10, 9, 10, 13, 14, 13, 14].map(|s: usize| s - 1);
    let m2_target = [1, 2, 3, 4, 5, 6, 5, 6, 9, 10, 11, 12, 9, 10, 11, 12].map(|s: usize| s - 1);
    let identity: Vec<usize> = (0..16).collect();
    OnticModel::new(lambda_states(1..=16))
        .with_measurement(labels::M1, deterministic(&[labels::BOX1, labels::NOT_BOX1], &m1_out, &m1_target))
        .with_measurement(labels::M2, deterministic(&[labels::BOX2, labels::NOT_BOX2], &m2_out, &m2_target))
        .with_measurement(labels::MA, deterministic(&[labels::A, labels::NOT_A], &ma_out, &identity))
}

// Pairs use one-based state numbers.
fn sixteen(parts: &[(usize, Prob)]) -> Preparation {
    let shifted: Vec<(usize, Prob)> = parts.iter().map(|(s, p)| (s - 1, p.clone())).collect();
    preparation(16, &shifted)
}

fn superposition_preparations() -> Vec<(&'static str, Preparation)> {
    vec![
        (
            "1+3",
            sixteen(&[(1, ratio(2, 6)), (4, ratio(1, 6)), (9, ratio(2, 6)), (12, ratio(1, 6))]),
        ),
        (
            "2+3",
            sixteen(&[(5, ratio(2, 6)), (8, ratio(1, 6)), (9, ratio(2, 6)), (14, ratio(1, 6))]),
        ),
        (
            "1+2+3",
            sixteen(&[
                (1, ratio(2, 9)),
                (4, ratio(1, 9)),
                (5, ratio(2, 9)),
                (8, ratio(1, 9)),
                (9, ratio(2, 9)),
                (16, ratio(1, 9)),
            ]),
        ),
    ]
}

fn sixteen_state_named(name: &str, eigen: Vec<(&'static str, Preparation)>) -> NamedModel {
    let preparations = eigen
        .into_iter()
        .chain(superposition_preparations())
        .map(|(n, p)| (n.to_string(), p))
        .collect();
    NamedModel {
        name: name.into(),
        kind: ModelKind::Ontic(OnticSystem {
            model: sixteen_state_model(),
            preparations,
        }),
        roles: Roles::three_box(),
        default_preparation: "1+2+3".into(),
        eigen_preparations: box_eigen_names(),
        expected_stats: Some(three_box_expected()),
    }
}

pub fn mr3_model() -> NamedModel {
    sixteen_state_named(
        MR3,
        vec![
            ("1", sixteen(&[(1, ratio(2, 3)), (2, ratio(1, 3))])),
            ("2", sixteen(&[(5, ratio(2, 3)), (6, ratio(1, 3))])),
            ("3", sixteen(&[(9, ratio(2, 3)), (10, ratio(1, 3))])),
        ],
    )
}

/// Preparation-contextual weights of the eigenstate preparations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mr2Params {
    #[serde(with = "rational::serde_prob")]
    pub a1: Prob,
    #[serde(with = "rational::serde_prob")]
    pub a2: Prob,
    #[serde(with = "rational::serde_prob")]
    pub a: Prob,
    #[serde(with = "rational::serde_prob")]
    pub b: Prob,
    #[serde(with = "rational::serde_prob")]
    pub c: Prob,
}

impl Mr2Params {
    pub fn all(p: Prob) -> Self {
        Self {
            a1: p.clone(),
            a2: p.clone(),
            a: p.clone(),
            b: p.clone(),
            c: p,
        }
    }

    /// All parameters positive, `a1 < 1/3`, `a2 < 1/3`, `a + b + c < 1/3`.
    pub fn check(&self) -> Result<()> {
        let third = ratio(1, 3);
        for (name, v) in [("a1", &self.a1), ("a2", &self.a2), ("a", &self.a), ("b", &self.b), ("c", &self.c)] {
            if !v.is_positive() {
                return Err(Error::ParameterConstraint(format!("{name} = {} must be > 0", rational::format(v))));
            }
        }
        for (name, v) in [("a1", self.a1.clone()), ("a2", self.a2.clone()), ("a+b+c", &self.a + &self.b + &self.c)] {
            if v >= third {
                return Err(Error::ParameterConstraint(format!("{name} = {} must be < 1/3", rational::format(&v))));
            }
        }
        Ok(())
    }
}

impl Default for Mr2Params {
    fn default() -> Self {
        Self::all(ratio(1, 100))
    }
}

pub fn mr2_model(params: &Mr2Params) -> Result<NamedModel> {
    params.check()?;
    let (a1, a2) = (&params.a1, &params.a2);
    let s = &params.a + &params.b + &params.c;
    let two_thirds = ratio(2, 3);
    let third = ratio(1, 3);
    let eigen = vec![
        (
            "1",
            sixteen(&[(1, &two_thirds - a1), (2, &third - a1), (3, a1.clone()), (4, a1.clone())]),
        ),
        (
            "2",
            sixteen(&[(5, &two_thirds - a2), (6, &third - a2), (7, a2.clone()), (8, a2.clone())]),
        ),
        (
            "3",
            sixteen(&[
                (9, &two_thirds - &s),
                (10, &third - &s),
                (11, params.a.clone()),
                (12, params.a.clone()),
                (13, params.b.clone()),
                (14, params.b.clone()),
                (15, params.c.clone()),
                (16, params.c.clone()),
            ]),
        ),
    ];
    Ok(sixteen_state_named(MR2, eigen))
}

/// One row of a stochastic table: `(outcome index, probability, target state)`.
type Row = Vec<(usize, Prob, usize)>;

fn stochastic(n: usize, outcomes: &[&str], rows: Vec<Row>) -> OnticMeasurement {
    let mut m = OnticMeasurement::blank(n, outcomes);
    for (s, row) in rows.into_iter().enumerate() {
        for (q, p, t) in row {
            m.set(s, q, p, Preparation::point(n, t));
        }
    }
    m
}

// Both card games share one table shape; only the first-row odds differ.
fn card_game(name: &str, hit: Prob, expected: JointTable) -> NamedModel {
    let miss = one() - &hit;
    let half = || ratio(1, 2);
    let m1 = stochastic(
        5,
        &[labels::BOX1, labels::NOT_BOX1],
        vec![
            vec![(0, hit.clone(), 1), (1, miss.clone(), 3)],
            vec![(1, one(), 1)],
            vec![(0, one(), 2)],
            vec![(0, one(), 3)],
            vec![(0, half(), 4), (1, half(), 4)],
        ],
    );
    let m2 = stochastic(
        5,
        &[labels::BOX2, labels::NOT_BOX2],
        vec![
            vec![(0, hit, 2), (1, miss, 4)],
            vec![(0, one(), 1)],
            vec![(1, one(), 2)],
            vec![(0, half(), 3), (1, half(), 3)],
            vec![(1, one(), 4)],
        ],
    );
    let ma = stochastic(
        5,
        &[labels::A, labels::NOT_A],
        vec![
            vec![(1, one(), 0)],
            vec![(0, half(), 1), (1, half(), 1)],
            vec![(0, half(), 2), (1, half(), 2)],
            vec![(1, one(), 3)],
            vec![(1, one(), 4)],
        ],
    );
    let model = OnticModel::new(lambda_states(0..=4))
        .with_measurement(labels::M1, m1)
        .with_measurement(labels::M2, m2)
        .with_measurement(labels::MA, ma);
    NamedModel {
        name: name.into(),
        kind: ModelKind::Ontic(OnticSystem {
            model,
            preparations: [("initial".to_string(), Preparation::point(5, 0))].into_iter().collect(),
        }),
        roles: Roles::three_box(),
        default_preparation: "initial".into(),
        eigen_preparations: [None, None, None],
        expected_stats: Some(OperationalStats::from_tables(Roles::three_box(), expected.clone(), expected, zero())),
    }
}

pub fn kirkpatrick_model() -> NamedModel {
    card_game(
        KIRKPATRICK,
        ratio(1, 4),
        JointTable::new(ratio(1, 8), zero(), ratio(1, 8), ratio(3, 4)),
    )
}

pub fn ravon_vaidman_model() -> NamedModel {
    card_game(
        RAVON_VAIDMAN,
        ratio(1, 3),
        JointTable::new(ratio(1, 6), zero(), ratio(1, 6), ratio(2, 3)),
    )
}

pub const M_L: &str = "M_L";
pub const M_R: &str = "M_R";
pub const M_T: &str = "M_T";

pub fn leifer_spekkens_roles() -> Roles {
    Roles {
        first: BoxQuestion::new(M_L, "L", "¬L"),
        second: BoxQuestion::new(M_R, "R", "¬R"),
        post: BoxQuestion::new(M_T, "T", "¬T"),
        nothing: labels::N.into(),
    }
}

/// Ball in a square box. Shaking a compartment that holds the ball rattles it
/// into either position of that compartment; an empty compartment leaves it be.
/// The top states answer the top question positively.
pub fn leifer_spekkens_model() -> NamedModel {
    let (bl, br, tl, tr) = (0, 1, 2, 3);
    let mix = |a: usize, b: usize| preparation(4, &[(a, ratio(1, 2)), (b, ratio(1, 2))]);
    let mut ml = OnticMeasurement::blank(4, &["L", "¬L"]);
    ml.set(bl, 0, one(), mix(bl, tl))
        .set(tl, 0, one(), mix(bl, tl))
        .set(br, 1, one(), Preparation::point(4, br))
        .set(tr, 1, one(), Preparation::point(4, tr));
    let mut mr = OnticMeasurement::blank(4, &["R", "¬R"]);
    mr.set(br, 0, one(), mix(br, tr))
        .set(tr, 0, one(), mix(br, tr))
        .set(bl, 1, one(), Preparation::point(4, bl))
        .set(tl, 1, one(), Preparation::point(4, tl));
    let mut mt = OnticMeasurement::blank(4, &["T", "¬T"]);
    mt.set(tl, 0, one(), mix(tl, tr))
        .set(tr, 0, one(), mix(tl, tr))
        .set(bl, 1, one(), Preparation::point(4, bl))
        .set(br, 1, one(), Preparation::point(4, br));
    let states = ["bottom_left", "bottom_right", "top_left", "top_right"];
    let model = OnticModel::new(states.iter().map(|s| s.to_string()).collect())
        .with_measurement(M_L, ml)
        .with_measurement(M_R, mr)
        .with_measurement(M_T, mt);
    let preparations = [
        ("bottom", mix(bl, br)),
        ("bottom_left", Preparation::point(4, bl)),
        ("bottom_right", Preparation::point(4, br)),
    ]
    .into_iter()
    .map(|(n, p)| (n.to_string(), p))
    .collect();
    let t = JointTable::new(ratio(1, 4), zero(), ratio(1, 4), ratio(1, 2));
    NamedModel {
        name: LEIFER_SPEKKENS.into(),
        kind: ModelKind::Ontic(OnticSystem { model, preparations }),
        roles: leifer_spekkens_roles(),
        default_preparation: "bottom".into(),
        eigen_preparations: [Some("bottom_left".into()), Some("bottom_right".into()), None],
        expected_stats: Some(OperationalStats::from_tables(leifer_spekkens_roles(), t.clone(), t, zero())),
    }
}

pub fn by_name(name: &str) -> Result<NamedModel> {
    match name {
        QUANTUM_THREE_BOX => Ok(quantum_three_box()),
        CHEATING => Ok(cheating_model()),
        MR3 => Ok(mr3_model()),
        MR2 => mr2_model(&Mr2Params::default()),
        KIRKPATRICK => Ok(kirkpatrick_model()),
        RAVON_VAIDMAN => Ok(ravon_vaidman_model()),
        LEIFER_SPEKKENS => Ok(leifer_spekkens_model()),
        other => Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
    }
}

pub fn all_models() -> Vec<NamedModel> {
    MODEL_NAMES.iter().map(|n| by_name(n).expect("built-in model")).collect()
}

/// Whether the model's own statistics agree with its expected tables.
pub fn matches_expected(model: &NamedModel) -> Result<bool> {
    let Some(expected) = &model.expected_stats else {
        return Ok(true);
    };
    let got = model.stats(None)?;
    Ok(got.first == expected.first && got.second == expected.second && got.p_n_a == expected.p_n_a)
}

/// Preparation weights as a sparse `(label, weight)` map, for display.
pub fn describe_preparation(model: &OnticModel, prep: &Preparation) -> IndexMap<String, Prob> {
    model.describe(prep).into_iter().filter(|(_, w)| !w.is_zero()).collect()
}
