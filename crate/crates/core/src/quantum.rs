//! Finite-dimensional pure-state simulation with projective measurements.
//!
//! States are kets in double precision. Measurements update the state by
//! projecting onto the observed outcome's subspace and renormalizing.

use indexmap::IndexMap;
use num_complex::Complex64;

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::labels;
use crate::validation::{ValidationReport, ViolationKind};

pub const TOLERANCE: f64 = 1e-9;

/// Branches whose probability falls below this are dropped by [`measure`].
pub const NEGLIGIBLE: f64 = 1e-12;

pub type C64 = Complex64;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let dim = a.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    /// Projector onto a single basis state.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(index, index)] = C64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim.max(1)).map(<[C64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    /// Builds a ket, rejecting amplitude vectors whose norm is off by more
    /// than [`TOLERANCE`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let ket = Self { amplitudes };
        let residual = (ket.norm() - 1.0).abs();
        if residual > TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "ket is not normalized (|norm - 1| = {residual:.3e})"
            )));
        }
        Ok(ket)
    }

    /// Builds a ket without checking normalization; use [`validate_scenario`]
    /// to report problems.
    pub fn unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    /// Normalizes a real amplitude vector.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.iter().map(|a| C64::new(a / norm, 0.0)).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest amplitude difference. Global phase counts.
    pub fn max_diff(&self, other: &Ket) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨ψ|P|ψ⟩`, real part.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        let applied = op.apply(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let residual = matrix
            .adjoint()
            .mul(&matrix)
            .max_diff(&CMatrix::identity(matrix.dim()));
        if residual > TOLERANCE {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    /// Householder reflection exchanging two real unit vectors.
    pub fn reflection_between(from: &Ket, to: &Ket) -> Result<Self> {
        if from.dim() != to.dim() {
            return Err(Error::DimensionMismatch {
                expected: from.dim(),
                found: to.dim(),
            });
        }
        let v: Vec<C64> = from
            .amplitudes()
            .iter()
            .zip(to.amplitudes())
            .map(|(a, b)| a - b)
            .collect();
        let vv: f64 = v.iter().map(C64::norm_sqr).sum();
        let id = CMatrix::identity(from.dim());
        if vv < NEGLIGIBLE {
            return Ok(Self { matrix: id });
        }
        let h = id.add(&CMatrix::outer(&v, &v).scale(-2.0 / vv));
        Self::new(h)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    pub name: String,
    pub outcomes: Vec<(String, CMatrix)>,
}

impl ProjectiveMeasurement {
    pub fn new(name: impl Into<String>, outcomes: Vec<(String, CMatrix)>) -> Self {
        Self {
            name: name.into(),
            outcomes,
        }
    }

    /// Two-outcome measurement `{P, I - P}`.
    pub fn binary(name: &str, hit: &str, miss: &str, projector: CMatrix) -> Self {
        let complement = CMatrix::identity(projector.dim()).add(&projector.scale(-1.0));
        Self::new(
            name,
            vec![(hit.to_string(), projector), (miss.to_string(), complement)],
        )
    }

    pub fn dim(&self) -> usize {
        self.outcomes.first().map_or(0, |(_, p)| p.dim())
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumScenario {
    pub dim: usize,
    pub initial: Ket,
    pub measurements: IndexMap<String, ProjectiveMeasurement>,
    pub do_nothing_label: String,
}

impl QuantumScenario {
    pub fn measurement(&self, label: &str) -> Result<&ProjectiveMeasurement> {
        self.measurements
            .get(label)
            .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))
    }
}

/// One outcome of a measurement together with its probability and the
/// renormalized post-measurement state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    pub outcome: String,
    pub probability: f64,
    pub post_state: Ket,
}

/// `(|1⟩ + |2⟩ + |3⟩)/√3`, the state after the initial shuffle.
pub fn three_box_initial_state() -> Ket {
    Ket::from_real(&[1.0, 1.0, 1.0]).expect("nonzero")
}

/// `(|1⟩ + |2⟩ - |3⟩)/√3`, the state the final shuffle sends to `|3⟩`.
pub fn three_box_final_state() -> Ket {
    Ket::from_real(&[1.0, 1.0, -1.0]).expect("nonzero")
}

/// A shuffle taking `|3⟩` to the equal superposition of all three boxes.
pub fn initial_shuffle() -> Unitary {
    Unitary::reflection_between(&Ket::basis(3, 2), &three_box_initial_state())
        .expect("reflection is unitary")
}

/// A shuffle taking `(|1⟩ + |2⟩ - |3⟩)/√3` to `|3⟩`.
pub fn final_shuffle() -> Unitary {
    Unitary::reflection_between(&three_box_final_state(), &Ket::basis(3, 2))
        .expect("reflection is unitary")
}

/// The three-box protocol. The final shuffle is folded into `MA`, which
/// projects onto `(|1⟩ + |2⟩ - |3⟩)/√3` instead of `|3⟩`.
pub fn build_three_box_scenario() -> QuantumScenario {
    let dim = 3;
    let psi_f = three_box_final_state();
    let m1 = ProjectiveMeasurement::binary(
        labels::M1,
        labels::BOX1,
        labels::NOT_BOX1,
        CMatrix::basis_projector(dim, 0),
    );
    let m2 = ProjectiveMeasurement::binary(
        labels::M2,
        labels::BOX2,
        labels::NOT_BOX2,
        CMatrix::basis_projector(dim, 1),
    );
    let ma = ProjectiveMeasurement::binary(
        labels::MA,
        labels::A,
        labels::NOT_A,
        CMatrix::outer(psi_f.amplitudes(), psi_f.amplitudes()),
    );
    let measurements = [m1, m2, ma]
        .into_iter()
        .map(|m| (m.name.clone(), m))
        .collect();
    QuantumScenario {
        dim,
        initial: apply_unitary(&Ket::basis(dim, 2), &initial_shuffle()).expect("dims match"),
        measurements,
        do_nothing_label: labels::N.to_string(),
    }
}

pub fn apply_unitary(state: &Ket, u: &Unitary) -> Result<Ket> {
    if state.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: state.dim(),
        });
    }
    Ok(Ket::unchecked(u.matrix.apply(state.amplitudes())))
}

/// Born probabilities and Lüders post-states for each outcome with
/// probability at least [`NEGLIGIBLE`].
pub fn measure(state: &Ket, m: &ProjectiveMeasurement) -> Result<Vec<MeasurementBranch>> {
    if state.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: state.dim(),
        });
    }
    let mut branches = Vec::with_capacity(m.outcomes.len());
    for (label, projector) in &m.outcomes {
        let projected = projector.apply(state.amplitudes());
        let probability: f64 = projected.iter().map(C64::norm_sqr).sum();
        if probability < NEGLIGIBLE {
            continue;
        }
        let scale = 1.0 / probability.sqrt();
        branches.push(MeasurementBranch {
            outcome: label.clone(),
            probability,
            post_state: Ket::unchecked(projected.into_iter().map(|a| a * scale).collect()),
        });
    }
    Ok(branches)
}

/// Joint distribution of a measurement sequence applied to the scenario's
/// initial state. The do-nothing label contributes no outcome.
pub fn sequence_distribution(s: &QuantumScenario, seq: &[&str]) -> Result<OutcomeDistribution<f64>> {
    sequence_distribution_from(s, &s.initial, seq)
}

/// As [`sequence_distribution`], starting from an arbitrary state.
pub fn sequence_distribution_from(
    s: &QuantumScenario,
    state: &Ket,
    seq: &[&str],
) -> Result<OutcomeDistribution<f64>> {
    let steps = seq
        .iter()
        .filter(|l| **l != s.do_nothing_label)
        .map(|l| s.measurement(l))
        .collect::<Result<Vec<_>>>()?;
    let mut out = OutcomeDistribution::new();
    let mut prefix = Vec::with_capacity(steps.len());
    chain(&steps, Some(state), 1.0, &mut prefix, &mut out)?;
    Ok(out)
}

fn chain(
    steps: &[&ProjectiveMeasurement],
    state: Option<&Ket>,
    weight: f64,
    prefix: &mut Vec<String>,
    out: &mut OutcomeDistribution<f64>,
) -> Result<()> {
    let Some((m, rest)) = steps.split_first() else {
        out.push(prefix.clone(), if state.is_some() { weight } else { 0.0 });
        return Ok(());
    };
    let branches = match state {
        Some(state) => measure(state, m)?,
        None => Vec::new(),
    };
    for label in m.labels() {
        prefix.push(label.to_string());
        match branches.iter().find(|b| b.outcome == label) {
            Some(b) => chain(rest, Some(&b.post_state), weight * b.probability, prefix, out)?,
            None => chain(rest, None, 0.0, prefix, out)?,
        }
        prefix.pop();
    }
    Ok(())
}

/// Reports every violated invariant of a scenario with its largest residual.
pub fn validate_scenario(s: &QuantumScenario) -> ValidationReport {
    let mut report = ValidationReport::default();
    if s.initial.dim() != s.dim {
        report.push(
            ViolationKind::Dimension,
            "initial",
            (s.initial.dim() as f64 - s.dim as f64).abs(),
        );
    }
    let residual = (s.initial.norm() - 1.0).abs();
    if residual > TOLERANCE {
        report.push(ViolationKind::Normalization, "initial", residual);
    }
    for (label, m) in &s.measurements {
        if m.outcomes.iter().any(|(_, p)| p.dim() != s.dim) {
            report.push(ViolationKind::Dimension, label.as_str(), 0.0);
            continue;
        }
        let mut sum = CMatrix::zeros(s.dim);
        for (outcome, p) in &m.outcomes {
            let herm = p.max_diff(&p.adjoint());
            if herm > TOLERANCE {
                report.push(ViolationKind::Hermiticity, format!("{label}/{outcome}"), herm);
            }
            let idem = p.mul(p).max_diff(p);
            if idem > TOLERANCE {
                report.push(ViolationKind::Idempotence, format!("{label}/{outcome}"), idem);
            }
            sum = sum.add(p);
        }
        let completeness = sum.max_diff(&CMatrix::identity(s.dim));
        if completeness > TOLERANCE {
            report.push(ViolationKind::Completeness, label.as_str(), completeness);
        }
    }
    report
}
