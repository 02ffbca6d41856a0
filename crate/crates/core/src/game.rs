//! Monte Carlo play of the box game.
//!
//! Each round Alice prepares the model's preparation, Bob applies his choice
//! of box measurements, and Alice post-selects. Rounds draw from their own
//! ChaCha8 stream (`seed`, stream = round index), so a round's result does
//! not depend on which other rounds were played or in what order.
//!
//! Bob's options:
//! - `N`: no measurement. A control round for the umpire; no bet.
//! - one box: Alice post-selects; on `A` a bet is placed and Alice wins it
//!   iff Bob found the ball.
//! - two looks in a row: the round ends at once. Bob wins if he found a ball
//!   both times in different boxes, or got different answers from the same
//!   box twice; otherwise Alice wins.

use std::fmt;

use indexmap::IndexMap;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classicality;
use crate::error::{Error, Result};
use crate::ontic::OnticModel;
use crate::quantum::{self, Ket, QuantumScenario};
use crate::rational::{self, Prob};
use crate::stats::{BoxQuestion, Roles};
use crate::zoo::{ModelKind, NamedModel};

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

/// Rounds per choice below which the umpire refuses to compare frequencies.
pub const MIN_UMPIRE_ROUNDS: usize = 30;

/// Box 0 is the first box question of the model's roles, box 1 the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Nothing,
    Open(u8),
    Twice(u8, u8),
}

impl Choice {
    pub fn label(&self, roles: &Roles) -> String {
        let m = |b: u8| roles.boxes()[usize::from(b)].measurement.clone();
        match *self {
            Choice::Nothing => roles.nothing.clone(),
            Choice::Open(b) => m(b),
            Choice::Twice(a, b) => format!("{},{}", m(a), m(b)),
        }
    }

    /// Parses `N`, a box measurement label, or two labels joined by a comma.
    pub fn parse(s: &str, roles: &Roles) -> Result<Self> {
        let index = |label: &str| {
            roles
                .boxes()
                .iter()
                .position(|q| q.measurement == label.trim())
                .map(|i| i as u8)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown choice {s:?}")))
        };
        let s = s.trim();
        if s == roles.nothing {
            return Ok(Choice::Nothing);
        }
        match s.split_once(',') {
            Some((a, b)) => Ok(Choice::Twice(index(a)?, index(b)?)),
            None => Ok(Choice::Open(index(s)?)),
        }
    }

    fn measurements(&self) -> Vec<u8> {
        match *self {
            Choice::Nothing => vec![],
            Choice::Open(b) => vec![b],
            Choice::Twice(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum BobStrategy {
    /// Control round with probability `p_control`, otherwise the first box
    /// with probability `p_first` and the second box otherwise.
    RandomBox { p_first: f64, p_control: f64 },
    Fixed { choice: Choice },
    /// With probability `q` look in both boxes, in random order; otherwise
    /// open one box at random.
    CheatCheck { q: f64 },
}

impl BobStrategy {
    pub fn random_box(p_first: f64) -> Self {
        BobStrategy::RandomBox { p_first, p_control: 0.0 }
    }

    pub fn check(&self) -> Result<()> {
        let probs: Vec<f64> = match self {
            BobStrategy::RandomBox { p_first, p_control } => vec![*p_first, *p_control],
            BobStrategy::Fixed { .. } => vec![],
            BobStrategy::CheatCheck { q } => vec![*q],
        };
        match probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            Some(p) => Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]"))),
            None => Ok(()),
        }
    }

    fn choose(&self, rng: &mut impl Rng) -> Choice {
        match *self {
            BobStrategy::RandomBox { p_first, p_control } => {
                if rng.random::<f64>() < p_control {
                    Choice::Nothing
                } else if rng.random::<f64>() < p_first {
                    Choice::Open(0)
                } else {
                    Choice::Open(1)
                }
            }
            BobStrategy::Fixed { choice } => choice,
            BobStrategy::CheatCheck { q } => {
                let both = rng.random::<f64>() < q;
                let first = rng.random::<bool>();
                match (both, first) {
                    (true, true) => Choice::Twice(0, 1),
                    (true, false) => Choice::Twice(1, 0),
                    (false, true) => Choice::Open(0),
                    (false, false) => Choice::Open(1),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub index: u64,
    pub choice: String,
    pub bob_outcomes: Vec<String>,
    /// Absent when the round ended before post-selection.
    pub alice_outcome: Option<String>,
    pub bet_placed: bool,
    /// Defined iff a bet was placed.
    pub alice_won: Option<bool>,
    pub immediate_win: Option<Party>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub schema_version: u32,
    pub model: String,
    pub preparation: String,
    pub seed: u64,
    /// Alice's outcome that places a bet.
    pub post_selection: String,
    pub strategy: Option<BobStrategy>,
    pub rounds: Vec<Round>,
}

impl GameTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    /// One row per round. `bob_outcomes` is `;`-separated; empty cells mean
    /// "not applicable".
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "index",
            "choice",
            "bob_outcomes",
            "alice_outcome",
            "bet_placed",
            "alice_won",
            "immediate_win",
        ])
        .expect("write to memory");
        for r in &self.rounds {
            w.write_record([
                r.index.to_string(),
                r.choice.clone(),
                r.bob_outcomes.join(";"),
                r.alice_outcome.clone().unwrap_or_default(),
                r.bet_placed.to_string(),
                r.alice_won.map(|b| b.to_string()).unwrap_or_default(),
                r.immediate_win.map(|p| p.to_string()).unwrap_or_default(),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
    }
}

/// Outcome labels, response rows and transition kernels of one measurement.
type SampledMeasurement = (Vec<String>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>);

/// Floating-point copy of an ontic model for sampling.
#[derive(Debug, Clone)]
struct OnticSampler {
    prep: Vec<f64>,
    measurements: IndexMap<String, SampledMeasurement>,
}

impl OnticSampler {
    fn new(model: &OnticModel, prep: &[Prob]) -> Self {
        let f = |row: &[Prob]| row.iter().map(rational::to_f64).collect::<Vec<_>>();
        let measurements = model
            .measurements
            .iter()
            .map(|(label, m)| {
                let xi = m.xi.iter().map(|r| f(r)).collect();
                let gamma = m
                    .gamma
                    .iter()
                    .map(|row| row.iter().map(|g| f(g.weights())).collect())
                    .collect();
                (label.clone(), (m.outcomes.clone(), xi, gamma))
            })
            .collect();
        Self {
            prep: f(prep),
            measurements,
        }
    }
}

#[derive(Debug, Clone)]
enum Sampler {
    Ontic(OnticSampler),
    Quantum(QuantumScenario, Ket),
}

#[derive(Debug, Clone)]
enum Physical {
    Ontic(usize),
    Quantum(Ket),
}

fn sample_index(weights: &[f64], rng: &mut impl Rng) -> usize {
    let u = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

impl Sampler {
    fn prepare(&self, rng: &mut impl Rng) -> Physical {
        match self {
            Sampler::Ontic(o) => Physical::Ontic(sample_index(&o.prep, rng)),
            Sampler::Quantum(_, ket) => Physical::Quantum(ket.clone()),
        }
    }

    // Only the physical state and the measurement label go in: Alice's
    // post-selection cannot see Bob's choice.
    fn measure(&self, state: Physical, label: &str, rng: &mut impl Rng) -> Result<(String, Physical)> {
        match (self, state) {
            (Sampler::Ontic(o), Physical::Ontic(s)) => {
                let (outcomes, xi, gamma) = o
                    .measurements
                    .get(label)
                    .ok_or_else(|| Error::UnknownMeasurement(label.to_string()))?;
                let q = sample_index(&xi[s], rng);
                let next = sample_index(&gamma[s][q], rng);
                Ok((outcomes[q].clone(), Physical::Ontic(next)))
            }
            (Sampler::Quantum(scenario, _), Physical::Quantum(ket)) => {
                let branches = quantum::measure(&ket, scenario.measurement(label)?)?;
                let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
                let b = branches
                    .into_iter()
                    .nth(sample_index(&probs, rng))
                    .expect("some branch has weight");
                Ok((b.outcome, Physical::Quantum(b.post_state)))
            }
            _ => unreachable!("state kind follows the sampler"),
        }
    }
}

/// A model and preparation ready for play.
#[derive(Debug, Clone)]
pub struct Game {
    pub model: String,
    pub preparation: String,
    pub roles: Roles,
    sampler: Sampler,
}

pub fn round_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

impl Game {
    pub fn new(model: &NamedModel, prep: Option<&str>) -> Result<Self> {
        let name = prep.unwrap_or(&model.default_preparation).to_string();
        let sampler = match &model.kind {
            ModelKind::Ontic(o) => Sampler::Ontic(OnticSampler::new(
                &o.model,
                model.ontic_preparation(Some(&name))?.weights(),
            )),
            ModelKind::Quantum(q) => Sampler::Quantum(q.scenario.clone(), model.ket(Some(&name))?.clone()),
        };
        Ok(Self {
            model: model.name.clone(),
            preparation: name,
            roles: model.roles.clone(),
            sampler,
        })
    }

    /// Plays one round with a given choice on the round's own stream.
    pub fn play_round(&self, choice: Choice, seed: u64, index: u64) -> Result<Round> {
        let mut rng = round_rng(seed, index);
        self.play_with(choice, index, &mut rng)
    }

    fn play_with(&self, choice: Choice, index: u64, rng: &mut ChaCha8Rng) -> Result<Round> {
        let mut state = self.sampler.prepare(rng);
        let boxes = self.roles.boxes();
        let mut bob_outcomes = Vec::new();
        for b in choice.measurements() {
            let (o, next) = self.sampler.measure(state, &boxes[usize::from(b)].measurement, rng)?;
            bob_outcomes.push(o);
            state = next;
        }
        let mut round = Round {
            index,
            choice: choice.label(&self.roles),
            bob_outcomes,
            alice_outcome: None,
            bet_placed: false,
            alice_won: None,
            immediate_win: None,
        };
        if let Choice::Twice(a, b) = choice {
            let (qa, qb) = (boxes[usize::from(a)], boxes[usize::from(b)]);
            let hit = |q: &BoxQuestion, o: &str| o == q.hit;
            let (oa, ob) = (&round.bob_outcomes[0], &round.bob_outcomes[1]);
            let bob_wins = if a == b {
                oa != ob
            } else {
                hit(qa, oa) && hit(qb, ob)
            };
            round.immediate_win = Some(if bob_wins { Party::Bob } else { Party::Alice });
            return Ok(round);
        }
        let (outcome, _) = self.sampler.measure(state, &self.roles.post.measurement, rng)?;
        if let Choice::Open(b) = choice {
            if outcome == self.roles.post.hit {
                round.bet_placed = true;
                round.alice_won = Some(round.bob_outcomes[0] == boxes[usize::from(b)].hit);
            }
        }
        round.alice_outcome = Some(outcome);
        Ok(round)
    }

    pub fn play(&self, strategy: &BobStrategy, n: usize, seed: u64) -> Result<GameTranscript> {
        if n == 0 {
            return Err(Error::InvalidArgument("at least one round is required".into()));
        }
        strategy.check()?;
        let one = |i: u64| {
            let mut rng = round_rng(seed, i);
            let choice = strategy.choose(&mut rng);
            self.play_with(choice, i, &mut rng)
        };
        #[cfg(feature = "parallel")]
        let rounds = {
            use rayon::prelude::*;
            (0..n as u64).into_par_iter().map(one).collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let rounds = (0..n as u64).map(one).collect::<Result<Vec<_>>>()?;
        Ok(GameTranscript {
            schema_version: TRANSCRIPT_SCHEMA_VERSION,
            model: self.model.clone(),
            preparation: self.preparation.clone(),
            seed,
            post_selection: self.roles.post.hit.clone(),
            strategy: Some(strategy.clone()),
            rounds,
        })
    }
}

/// Plays `n` rounds from the model's default preparation.
pub fn play_rounds(model: &NamedModel, strategy: &BobStrategy, n: usize, seed: u64) -> Result<GameTranscript> {
    Game::new(model, None)?.play(strategy, n, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ledger {
    #[serde(with = "rational::serde_prob")]
    pub odds: Prob,
    pub rounds: usize,
    pub bets_placed: usize,
    pub alice_wins: usize,
    pub bob_wins: usize,
    pub immediate_alice: usize,
    pub immediate_bob: usize,
    /// Stakes won by Alice on placed bets: one per win, minus `odds` per loss.
    #[serde(with = "rational::serde_prob")]
    pub net_to_alice: Prob,
    /// Immediate wins settle at one stake each.
    pub immediate_net_to_alice: i64,
}

impl Ledger {
    /// Fraction of placed bets Alice won.
    pub fn alice_win_rate(&self) -> Option<f64> {
        (self.bets_placed > 0).then(|| self.alice_wins as f64 / self.bets_placed as f64)
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22}{}", "rounds", self.rounds)?;
        writeln!(f, "{:<22}{}", "bets placed", self.bets_placed)?;
        writeln!(f, "{:<22}{} / {}", "alice / bob wins", self.alice_wins, self.bob_wins)?;
        if let Some(r) = self.alice_win_rate() {
            writeln!(f, "{:<22}{:.4}", "alice win rate", r)?;
        }
        writeln!(
            f,
            "{:<22}{} / {}",
            "immediate alice / bob", self.immediate_alice, self.immediate_bob
        )?;
        writeln!(f, "{:<22}{} (odds {})", "net to alice", rational::format(&self.net_to_alice), rational::format(&self.odds))?;
        writeln!(f, "{:<22}{}", "immediate net", self.immediate_net_to_alice)
    }
}

/// Aggregates a transcript. `odds` is what Bob collects per stake when Alice
/// loses a bet and must exceed one.
pub fn settle_bets(t: &GameTranscript, odds: &Prob) -> Result<Ledger> {
    if *odds <= rational::one() {
        return Err(Error::InvalidArgument(format!("odds {} must exceed 1", rational::format(odds))));
    }
    let count = |pred: &dyn Fn(&Round) -> bool| t.rounds.iter().filter(|r| pred(r)).count();
    let bets_placed = count(&|r| r.bet_placed);
    let alice_wins = count(&|r| r.alice_won == Some(true));
    let bob_wins = count(&|r| r.alice_won == Some(false));
    let immediate_alice = count(&|r| r.immediate_win == Some(Party::Alice));
    let immediate_bob = count(&|r| r.immediate_win == Some(Party::Bob));
    let net_to_alice = rational::int(alice_wins as i64) - odds * rational::int(bob_wins as i64);
    Ok(Ledger {
        odds: odds.clone(),
        rounds: t.rounds.len(),
        bets_placed,
        alice_wins,
        bob_wins,
        immediate_alice,
        immediate_bob,
        net_to_alice,
        immediate_net_to_alice: immediate_alice as i64 - immediate_bob as i64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChoiceFrequency {
    pub choice: String,
    pub rounds: usize,
    pub post_selected: usize,
    pub frequency: f64,
    /// Binomial standard error of `frequency`.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UmpireReport {
    pub choices: Vec<ChoiceFrequency>,
    /// Some pair of choices differs by more than three combined standard errors.
    pub flagged: bool,
    /// The most separated pair and its separation in standard errors.
    pub worst_pair: Option<(String, String, f64)>,
}

impl fmt::Display for UmpireReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12}{:>8}{:>10}{:>12}{:>10}", "choice", "rounds", "post-sel", "P(A)", "sigma")?;
        for c in &self.choices {
            writeln!(
                f,
                "{:<12}{:>8}{:>10}{:>12.6}{:>10.6}",
                c.choice, c.rounds, c.post_selected, c.frequency, c.sigma
            )?;
        }
        let verdict = if self.flagged {
            "FLAGGED: frequencies differ"
        } else {
            "consistent"
        };
        writeln!(f, "umpire: {verdict}")
    }
}

fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Empirical post-selection rate for every choice that reached Alice's
/// measurement. Every such choice needs [`MIN_UMPIRE_ROUNDS`] rounds.
pub fn umpire_frequencies(t: &GameTranscript) -> Result<UmpireReport> {
    let mut tally: IndexMap<&str, (usize, usize)> = IndexMap::new();
    for r in &t.rounds {
        let Some(outcome) = &r.alice_outcome else {
            continue;
        };
        let e = tally.entry(r.choice.as_str()).or_default();
        e.0 += 1;
        if *outcome == t.post_selection {
            e.1 += 1;
        }
    }
    if tally.is_empty() {
        return Err(Error::InsufficientRounds {
            choice: "any".into(),
            needed: MIN_UMPIRE_ROUNDS,
            found: 0,
        });
    }
    let mut choices = Vec::new();
    for (choice, (n, a)) in tally {
        if n < MIN_UMPIRE_ROUNDS {
            return Err(Error::InsufficientRounds {
                choice: choice.to_string(),
                needed: MIN_UMPIRE_ROUNDS,
                found: n,
            });
        }
        let p = a as f64 / n as f64;
        choices.push(ChoiceFrequency {
            choice: choice.to_string(),
            rounds: n,
            post_selected: a,
            frequency: p,
            sigma: binomial_sigma(p, n),
        });
    }
    let mut worst: Option<(String, String, f64)> = None;
    let mut flagged = false;
    for (i, x) in choices.iter().enumerate() {
        for y in &choices[i + 1..] {
            let diff = (x.frequency - y.frequency).abs();
            let se = x.sigma.hypot(y.sigma);
            let z = if se > 0.0 {
                diff / se
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            flagged |= z > 3.0;
            if worst.as_ref().is_none_or(|w| z > w.2) {
                worst = Some((x.choice.clone(), y.choice.clone(), z));
            }
        }
    }
    Ok(UmpireReport {
        choices,
        flagged,
        worst_pair: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheatCheck {
    #[serde(with = "rational::serde_prob")]
    pub exact: Prob,
    pub empirical: f64,
    pub rounds: usize,
    pub both_seen: usize,
    pub sigma: f64,
}

/// Bob looks in both boxes every round (order uniform) and counts how often
/// he finds two balls, next to the exact double-occupancy value.
pub fn cheat_check(model: &NamedModel, n: usize, seed: u64) -> Result<CheatCheck> {
    let t = play_rounds(model, &BobStrategy::CheatCheck { q: 1.0 }, n, seed)?;
    let exact = classicality::double_occupancy(&model.stats(None)?)?.value;
    let both_seen = t.rounds.iter().filter(|r| r.immediate_win == Some(Party::Bob)).count();
    let empirical = both_seen as f64 / n as f64;
    let sigma = binomial_sigma(rational::to_f64(&exact), n);
    Ok(CheatCheck {
        exact,
        empirical,
        rounds: n,
        both_seen,
        sigma,
    })
}

/// Distance of an empirical frequency from an exact probability in binomial
/// standard errors of the exact value. Zero-variance cases count as infinitely
/// far unless they agree exactly.
pub fn sigma_distance(count: usize, n: usize, exact: &Prob) -> f64 {
    let p = rational::to_f64(exact);
    let empirical = count as f64 / n as f64;
    let sigma = binomial_sigma(p, n);
    let diff = (empirical - p).abs();
    if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 || exact.is_zero() && count == 0 {
        0.0
    } else {
        f64::INFINITY
    }
}
