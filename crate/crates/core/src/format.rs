//! JSON model files.
//!
//! One format covers both model kinds, told apart by `kind`. Rationals are
//! `"num/den"` strings and complex numbers `[re, im]` pairs. Ontic outcome
//! tables are sparse (missing entries are 0) and so are kernels (missing rows
//! leave the state where it is).

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontic::{self, OnticMeasurement, OnticModel, Preparation};
use crate::quantum::{self, CMatrix, Ket, ProjectiveMeasurement, QuantumScenario, C64};
use crate::rational::{self, Prob};
use crate::stats::{JointTable, OperationalStats, Roles};
use crate::validation::{ValidationReport, ViolationKind};
use crate::zoo::{ModelKind, NamedModel, OnticSystem, QuantumSystem};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub name: String,
    #[serde(flatten)]
    pub body: ModelBody,
    pub roles: Roles,
    pub default_preparation: String,
    #[serde(default)]
    pub eigen_preparations: [Option<String>; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_stats: Option<ExpectedStats>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub metadata: IndexMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelBody {
    Quantum {
        dim: usize,
        measurements: IndexMap<String, QuantumMeasurementFile>,
        kets: IndexMap<String, Vec<[f64; 2]>>,
    },
    Ontic {
        states: Vec<String>,
        measurements: IndexMap<String, OnticMeasurementFile>,
        /// `preparation → state → weight`; unlisted states weigh 0.
        preparations: IndexMap<String, IndexMap<String, String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumOutcomeFile {
    pub label: String,
    pub projector: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumMeasurementFile {
    pub outcomes: Vec<QuantumOutcomeFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub state: String,
    pub outcome: String,
    /// `target state → weight`.
    pub to: IndexMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnticMeasurementFile {
    pub outcomes: Vec<String>,
    /// `state → outcome → probability`.
    pub xi: IndexMap<String, IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<KernelRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedStats {
    pub first: JointTable,
    pub second: JointTable,
    #[serde(with = "rational::serde_prob")]
    pub p_n_a: Prob,
}

fn complex(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn sparse(model: &OnticModel, weights: &[Prob]) -> IndexMap<String, String> {
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(i, w)| (model.states[i].clone(), rational::format(w)))
        .collect()
}

impl ModelFile {
    pub fn from_named(m: &NamedModel) -> Self {
        let body = match &m.kind {
            ModelKind::Quantum(q) => ModelBody::Quantum {
                dim: q.scenario.dim,
                measurements: q
                    .scenario
                    .measurements
                    .iter()
                    .map(|(label, pm)| {
                        let outcomes = pm
                            .outcomes
                            .iter()
                            .map(|(o, p)| QuantumOutcomeFile {
                                label: o.clone(),
                                projector: p.rows().iter().map(|r| r.iter().map(complex).collect()).collect(),
                            })
                            .collect();
                        (label.clone(), QuantumMeasurementFile { outcomes })
                    })
                    .collect(),
                kets: q
                    .kets
                    .iter()
                    .map(|(n, k)| (n.clone(), k.amplitudes().iter().map(complex).collect()))
                    .collect(),
            },
            ModelKind::Ontic(o) => {
                let model = &o.model;
                let measurements = model
                    .measurements
                    .iter()
                    .map(|(label, om)| {
                        let mut xi = IndexMap::new();
                        let mut gamma = Vec::new();
                        for (s, state) in model.states.iter().enumerate() {
                            let mut row = IndexMap::new();
                            for (q, outcome) in om.outcomes.iter().enumerate() {
                                let p = &om.xi[s][q];
                                if p.is_zero() {
                                    continue;
                                }
                                row.insert(outcome.clone(), rational::format(p));
                                let g = &om.gamma[s][q];
                                if !g.is_point_mass_on(s) {
                                    gamma.push(KernelRow {
                                        state: state.clone(),
                                        outcome: outcome.clone(),
                                        to: sparse(model, g.weights()),
                                    });
                                }
                            }
                            xi.insert(state.clone(), row);
                        }
                        (
                            label.clone(),
                            OnticMeasurementFile {
                                outcomes: om.outcomes.clone(),
                                xi,
                                gamma,
                            },
                        )
                    })
                    .collect();
                ModelBody::Ontic {
                    states: model.states.clone(),
                    measurements,
                    preparations: o
                        .preparations
                        .iter()
                        .map(|(n, p)| (n.clone(), sparse(model, p.weights())))
                        .collect(),
                }
            }
        };
        ModelFile {
            format_version: FORMAT_VERSION,
            name: m.name.clone(),
            body,
            roles: m.roles.clone(),
            default_preparation: m.default_preparation.clone(),
            eigen_preparations: m.eigen_preparations.clone(),
            expected_stats: m.expected_stats.as_ref().map(|s| ExpectedStats {
                first: s.first.clone(),
                second: s.second.clone(),
                p_n_a: s.p_n_a.clone(),
            }),
            metadata: IndexMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        Ok(file)
    }

    /// Builds the model. Malformed numbers are parse errors; labels that
    /// point nowhere and structural problems land in the report, and the
    /// offending entries are skipped.
    pub fn into_named(self) -> Result<(NamedModel, ValidationReport)> {
        let mut report = ValidationReport::default();
        let kind = match self.body {
            ModelBody::Quantum { dim, measurements, kets } => {
                quantum_kind(dim, measurements, kets, &self.default_preparation, &mut report)?
            }
            ModelBody::Ontic {
                states,
                measurements,
                preparations,
            } => ontic_kind(states, measurements, preparations, &mut report)?,
        };
        let roles = self.roles;
        let expected_stats = self
            .expected_stats
            .map(|e| OperationalStats::from_tables(roles.clone(), e.first, e.second, e.p_n_a));
        let model = NamedModel {
            name: self.name,
            kind,
            roles,
            default_preparation: self.default_preparation,
            eigen_preparations: self.eigen_preparations,
            expected_stats,
        };
        check_references(&model, &mut report);
        Ok((model, report))
    }
}

/// Every label a model file mentions outside its tables must exist.
fn check_references(m: &NamedModel, report: &mut ValidationReport) {
    let preps = m.preparation_names();
    for name in std::iter::once(&m.default_preparation).chain(m.eigen_preparations.iter().flatten()) {
        if !preps.contains(&name.as_str()) {
            report.push(ViolationKind::DanglingLabel, format!("preparation {name}"), 0.0);
        }
    }
    let outcomes_of = |label: &str| -> Option<Vec<String>> {
        match &m.kind {
            ModelKind::Quantum(q) => q
                .scenario
                .measurements
                .get(label)
                .map(|pm| pm.labels().map(String::from).collect()),
            ModelKind::Ontic(o) => o.model.measurements.get(label).map(|om| om.outcomes.clone()),
        }
    };
    let r = &m.roles;
    for q in [&r.first, &r.second, &r.post] {
        match outcomes_of(&q.measurement) {
            None => report.push(ViolationKind::DanglingLabel, format!("roles: measurement {}", q.measurement), 0.0),
            Some(outs) => {
                for o in [&q.hit, &q.miss] {
                    if !outs.contains(o) {
                        report.push(ViolationKind::DanglingLabel, format!("roles: {}/{o}", q.measurement), 0.0);
                    }
                }
                if outs.len() != 2 {
                    report.push(ViolationKind::Dimension, format!("roles: {} needs two outcomes", q.measurement), 0.0);
                }
            }
        }
    }
}

fn parse_prob(s: &str, location: &str) -> Result<Prob> {
    rational::parse(s).map_err(|e| Error::Parse(format!("{location}: {e}")))
}

fn parse_matrix(rows: &[Vec<[f64; 2]>]) -> Option<CMatrix> {
    CMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)).collect())
            .collect(),
    )
    .ok()
}

fn quantum_kind(
    dim: usize,
    measurements: IndexMap<String, QuantumMeasurementFile>,
    kets: IndexMap<String, Vec<[f64; 2]>>,
    default: &str,
    report: &mut ValidationReport,
) -> Result<ModelKind> {
    let mut built = IndexMap::new();
    for (label, mf) in measurements {
        let mut outcomes = Vec::new();
        for o in mf.outcomes {
            match parse_matrix(&o.projector) {
                Some(p) => outcomes.push((o.label, p)),
                None => report.push(ViolationKind::Dimension, format!("{label}/{}", o.label), 0.0),
            }
        }
        built.insert(label.clone(), ProjectiveMeasurement::new(label, outcomes));
    }
    let kets: IndexMap<String, Ket> = kets
        .into_iter()
        .map(|(n, a)| (n, Ket::unchecked(a.iter().map(|[re, im]| C64::new(*re, *im)).collect())))
        .collect();
    for (name, k) in &kets {
        if k.dim() != dim {
            report.push(ViolationKind::Dimension, format!("ket {name}"), 0.0);
        }
        let residual = (k.norm() - 1.0).abs();
        if residual > quantum::TOLERANCE && name != default {
            report.push(ViolationKind::Normalization, format!("ket {name}"), residual);
        }
    }
    let initial = kets.get(default).cloned().unwrap_or_else(|| Ket::basis(dim.max(1), 0));
    let scenario = QuantumScenario {
        dim,
        initial,
        measurements: built,
        do_nothing_label: crate::labels::N.into(),
    };
    report.extend(quantum::validate_scenario(&scenario));
    Ok(ModelKind::Quantum(QuantumSystem { scenario, kets }))
}

fn ontic_kind(
    states: Vec<String>,
    measurements: IndexMap<String, OnticMeasurementFile>,
    preparations: IndexMap<String, IndexMap<String, String>>,
    report: &mut ValidationReport,
) -> Result<ModelKind> {
    let n = states.len();
    let index = |s: &str| states.iter().position(|x| x == s);
    let mut model = OnticModel::new(states.clone());
    for (label, mf) in measurements {
        let outcome_refs: Vec<&str> = mf.outcomes.iter().map(String::as_str).collect();
        let mut m = OnticMeasurement::blank(n, &outcome_refs);
        for (state, row) in &mf.xi {
            let Some(s) = index(state) else {
                report.push(ViolationKind::DanglingLabel, format!("{label}: xi state {state}"), 0.0);
                continue;
            };
            for (outcome, p) in row {
                let p = parse_prob(p, &format!("{label}: xi({outcome}|{state})"))?;
                match m.outcome_index(outcome) {
                    Some(q) => m.xi[s][q] = p,
                    None => report.push(ViolationKind::DanglingLabel, format!("{label}: outcome {outcome}"), 0.0),
                }
            }
        }
        for row in &mf.gamma {
            let loc = format!("{label}: gamma(.|{},{})", row.outcome, row.state);
            let (Some(s), Some(q)) = (index(&row.state), m.outcome_index(&row.outcome)) else {
                report.push(ViolationKind::DanglingLabel, loc, 0.0);
                continue;
            };
            let mut w = vec![Prob::zero(); n];
            for (target, p) in &row.to {
                let p = parse_prob(p, &loc)?;
                match index(target) {
                    Some(t) => w[t] += p,
                    None => report.push(ViolationKind::DanglingLabel, format!("{loc}: target {target}"), 0.0),
                }
            }
            m.gamma[s][q] = Preparation::unchecked(w);
        }
        model.measurements.insert(label, m);
    }
    report.extend(ontic::validate_model(&model));
    let mut preps = IndexMap::new();
    for (name, weights) in preparations {
        let mut w = vec![Prob::zero(); n];
        for (state, p) in &weights {
            let p = parse_prob(p, &format!("preparation {name}"))?;
            match index(state) {
                Some(s) => w[s] += p,
                None => report.push(ViolationKind::DanglingLabel, format!("preparation {name}: state {state}"), 0.0),
            }
        }
        let prep = Preparation::unchecked(w);
        if let Some(neg) = prep.weights().iter().find(|w| w.is_negative()) {
            report.push_exact(ViolationKind::NegativeEntry, format!("preparation {name}"), neg);
        }
        let residual = prep.total() - rational::one();
        if !residual.is_zero() {
            report.push_exact(ViolationKind::RowSum, format!("preparation {name}"), &residual);
        }
        preps.insert(name, prep);
    }
    Ok(ModelKind::Ontic(OnticSystem {
        model,
        preparations: preps,
    }))
}

/// Parses and builds a model file in one step.
pub fn import(text: &str) -> Result<(NamedModel, ValidationReport)> {
    ModelFile::from_json(text)?.into_named()
}

pub fn export(model: &NamedModel) -> String {
    ModelFile::from_named(model).to_json()
}
