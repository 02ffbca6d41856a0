use indexmap::IndexMap;
use num_traits::{One, Zero};
use pps_core::classicality::{self, LgiVerdict, MrClass};
use pps_core::game::{self, BobStrategy};
use pps_core::ontic::{self, OnticMeasurement, OnticModel, Preparation};
use pps_core::quantum::{self, Ket};
use pps_core::rational::{int, one, ratio, zero, Prob};
use pps_core::stats::{JointTable, OperationalStats, Roles};
use pps_core::zoo::{self, ModelKind, NamedModel, OnticSystem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LABELS: [(&str, [&str; 2]); 3] = [("M1", ["1", "¬1"]), ("M2", ["2", "¬2"]), ("MA", ["A", "¬A"])];

fn random_preparation(rng: &mut ChaCha8Rng, support: &[usize], n: usize) -> Preparation {
    let mut w = vec![zero(); n];
    let raw: Vec<i64> = support.iter().map(|_| rng.random_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    for (s, r) in support.iter().zip(raw) {
        w[*s] = ratio(r, total);
    }
    Preparation::new(w).unwrap()
}

fn random_prob(rng: &mut ChaCha8Rng) -> Prob {
    ratio(rng.random_range(0..=6), 6)
}

/// Arbitrary two-outcome measurements with random kernels.
fn random_model(seed: u64, n: usize, invasive: bool) -> OnticModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..n).collect();
    let mut model = OnticModel::new((0..n).map(|i| format!("s{i}")).collect());
    for (label, outcomes) in LABELS {
        let mut m = OnticMeasurement::blank(n, &outcomes);
        for s in 0..n {
            let p = random_prob(&mut rng);
            for (q, pq) in [p.clone(), one() - p].into_iter().enumerate() {
                let update = if invasive {
                    random_preparation(&mut rng, &all, n)
                } else {
                    Preparation::point(n, s)
                };
                m.set(s, q, pq, update);
            }
        }
        model = model.with_measurement(label, m);
    }
    model
}

fn sequences() -> Vec<Vec<&'static str>> {
    let mut out = vec![vec![]];
    for a in ["M1", "M2", "MA"] {
        out.push(vec![a]);
        for b in ["M1", "M2", "MA"] {
            out.push(vec![a, b]);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributions_are_exact_and_chain(seed in any::<u64>(), n in 1usize..6) {
        let model = random_model(seed, n, true);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let prep = random_preparation(&mut rng, &(0..n).collect::<Vec<_>>(), n);
        for seq in sequences() {
            let d = ontic::sequence_distribution(&model, &prep, &seq).unwrap();
            prop_assert!(d.total().is_one());
            if let [m] = seq[..] {
                let single = ontic::outcome_probability(&prep, model.measurement(m).unwrap()).unwrap();
                for (q, p) in single {
                    prop_assert_eq!(d.prob(&[&q]), p);
                }
            }
        }
    }

    #[test]
    fn distributions_are_affine_in_the_preparation(seed in any::<u64>(), n in 1usize..6, t in 0i64..=10) {
        let model = random_model(seed, n, true);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let all: Vec<usize> = (0..n).collect();
        let mu = random_preparation(&mut rng, &all, n);
        let nu = random_preparation(&mut rng, &all, n);
        let t = ratio(t, 10);
        let mix = ontic::mix_preparations(&[(t.clone(), mu.clone()), (one() - &t, nu.clone())]).unwrap();
        for seq in sequences() {
            let dm = ontic::sequence_distribution(&model, &mu, &seq).unwrap();
            let dn = ontic::sequence_distribution(&model, &nu, &seq).unwrap();
            let dx = ontic::sequence_distribution(&model, &mix, &seq).unwrap();
            for (k, p) in dx.iter() {
                let refs: Vec<&str> = k.iter().map(String::as_str).collect();
                prop_assert_eq!(p.clone(), &t * dm.prob(&refs) + (one() - &t) * dn.prob(&refs));
            }
        }
    }

    #[test]
    fn nim_sequences_stay_in_the_support(seed in any::<u64>(), n in 1usize..7, steps in 1usize..5) {
        let model = random_model(seed, n, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let support: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.6)).collect();
        prop_assume!(!support.is_empty());
        let prep = random_preparation(&mut rng, &support, n);
        let mut current = prep.clone();
        for _ in 0..steps {
            let (label, _) = LABELS[rng.random_range(0..3)];
            let m = model.measurement(label).unwrap();
            prop_assert!(ontic::is_nim(m));
            let live: Vec<String> = ontic::outcome_probability(&current, m)
                .unwrap()
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|(q, _)| q)
                .collect();
            let q = &live[rng.random_range(0..live.len())];
            current = ontic::evolve_preparation(&current, m, q).unwrap().1;
            prop_assert!(current.support().all(|s| support.contains(&s)));
        }
    }

    #[test]
    fn pps_score_stays_in_range(seed in any::<u64>(), n in 1usize..6) {
        let model = random_model(seed, n, true);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let prep = random_preparation(&mut rng, &(0..n).collect::<Vec<_>>(), n);
        let stats = OperationalStats::from_ontic(&model, &prep, &Roles::three_box()).unwrap();
        prop_assert!(stats.validate().is_valid());
        if let Ok(score) = classicality::pps_score(&stats) {
            prop_assert!(score >= zero() && score <= int(2));
        }
        let lgi = classicality::lgi_value(&stats);
        prop_assert_eq!(lgi, int(4) * classicality::nim_bound_check(&stats).slack - one());
    }

    /// With zero NDM gaps, a violated inequality and a score above one are the
    /// same statement.
    #[test]
    fn lgi_violation_iff_score_above_one(
        h1 in 0i64..=60, m1 in 0i64..=60, h2 in 0i64..=60, post_share in 1i64..=60,
    ) {
        let den = 60;
        let post = ratio(post_share, den);
        let split = |hit: i64| {
            let hit_post = ratio(hit.min(post_share), den);
            let miss_post = &post - &hit_post;
            let rest = one() - &post;
            let hit_not = &rest * ratio(m1, 60);
            let miss_not = &rest - &hit_not;
            JointTable::new(hit_post, miss_post, hit_not, miss_not)
        };
        let stats = OperationalStats::from_tables(Roles::three_box(), split(h1), split(h2), post.clone());
        prop_assert!(classicality::ndm_gap(&stats).values().all(Zero::is_zero));
        let violated = classicality::lgi_value(&stats) < -one();
        let score = classicality::pps_score(&stats).unwrap();
        prop_assert_eq!(violated, score > one());
    }

    #[test]
    fn mr1_models_with_eigen_ndm_respect_the_bound(seed in any::<u64>()) {
        let named = random_mr1_model(seed);
        let sys = named.ontic().unwrap();
        let prep = &sys.preparations["mix"];
        let eigen = named.eigen_ontic_preparations().unwrap();
        let class = classicality::classify_mr(&sys.model, prep, eigen, &named.roles).unwrap();
        prop_assert_eq!(class, MrClass::Mr1);
        let gaps = classicality::check_eigenstate_ndm(&named).unwrap();
        prop_assert!(gaps.iter().all(|g| g.gap.is_zero()));
        let stats = named.stats(Some("mix")).unwrap();
        prop_assert!(classicality::lgi_value(&stats) >= -one());
        let report = classicality::ClassicalityReport::for_model(&named, Some("mix")).unwrap();
        prop_assert!(report.mr1_with_eigenstate_ndm && !report.mr1_contradiction);
    }

    #[test]
    fn leifer_spekkens_never_violates_undisturbed(weights in proptest::collection::vec(0i64..=8, 4)) {
        prop_assume!(weights.iter().any(|w| *w > 0));
        let named = zoo::leifer_spekkens_model();
        let sys = named.ontic().unwrap();
        let total: i64 = weights.iter().sum();
        let prep = Preparation::new(weights.iter().map(|w| ratio(*w, total)).collect()).unwrap();
        let stats = OperationalStats::from_ontic(&sys.model, &prep, &named.roles).unwrap();
        prop_assert_ne!(classicality::lgi_verdict(&stats), LgiVerdict::Violated);
        if classicality::ndm_gap(&stats).values().all(Zero::is_zero) {
            prop_assert!(classicality::lgi_value(&stats) >= -one());
        }
    }

    #[test]
    fn quantum_distributions_normalize_and_repeat(
        amps in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        prop_assume!(amps.iter().map(|a| a * a).sum::<f64>() > 1e-3);
        let scenario = quantum::build_three_box_scenario();
        let ket = Ket::from_real(&amps).unwrap();
        for seq in sequences() {
            let d = quantum::sequence_distribution_from(&scenario, &ket, &seq).unwrap();
            prop_assert!((d.total() - 1.0).abs() < 1e-9);
        }
        for (m, [hit, miss]) in LABELS {
            let d = quantum::sequence_distribution_from(&scenario, &ket, &[m, m]).unwrap();
            prop_assert!(d.prob(&[hit, miss]) < 1e-9 && d.prob(&[miss, hit]) < 1e-9);
            for b in quantum::measure(&ket, scenario.measurement(m).unwrap()).unwrap() {
                prop_assert!((b.post_state.norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn games_are_reproducible(seed in any::<u64>(), model in 0usize..7) {
        let named = zoo::all_models().swap_remove(model);
        let strategy = BobStrategy::CheatCheck { q: 0.5 };
        let a = game::play_rounds(&named, &strategy, 200, seed).unwrap();
        let b = game::play_rounds(&named, &strategy, 200, seed).unwrap();
        prop_assert_eq!(&a, &b);
        for r in &a.rounds {
            prop_assert_eq!(r.alice_won.is_some(), r.bet_placed);
        }
        let ledger = game::settle_bets(&a, &ratio(2, 1)).unwrap();
        prop_assert_eq!(ledger.alice_wins + ledger.bob_wins, ledger.bets_placed);
    }
}

/// Boxes are read off deterministically; a box measurement may shuffle the
/// state, but only among states of the same box that answer `MA` alike.
fn random_mr1_model(seed: u64) -> NamedModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boxes = Vec::new();
    let mut answers = Vec::new();
    for b in 0..3 {
        for _ in 0..rng.random_range(1..=3) {
            boxes.push(b);
            answers.push(ratio(rng.random_range(0..=2), 2));
        }
    }
    let n = boxes.len();
    let class = |s: usize| -> Vec<usize> {
        (0..n).filter(|t| boxes[*t] == boxes[s] && answers[*t] == answers[s]).collect()
    };
    let mut model = OnticModel::new((0..n).map(|i| format!("s{i}")).collect());
    for (b, (label, outcomes)) in LABELS.iter().enumerate() {
        let mut m = OnticMeasurement::blank(n, outcomes);
        for s in 0..n {
            if b == 2 {
                m.set(s, 0, answers[s].clone(), Preparation::point(n, s));
                m.set(s, 1, one() - &answers[s], Preparation::point(n, s));
            } else {
                let q = usize::from(boxes[s] != b);
                m.set(s, q, one(), random_preparation(&mut rng, &class(s), n));
            }
        }
        model = model.with_measurement(label, m);
    }
    let mut preparations = IndexMap::new();
    let mut parts = Vec::new();
    for b in 0..3 {
        let members: Vec<usize> = (0..n).filter(|s| boxes[*s] == b).collect();
        let mu = random_preparation(&mut rng, &members, n);
        parts.push((ratio(rng.random_range(1..=5), 1), mu.clone()));
        preparations.insert((b + 1).to_string(), mu);
    }
    let total: Prob = parts.iter().map(|(w, _)| w.clone()).sum();
    let parts: Vec<_> = parts.into_iter().map(|(w, mu)| (w / &total, mu)).collect();
    preparations.insert("mix".into(), ontic::mix_preparations(&parts).unwrap());
    NamedModel {
        name: "random_mr1".into(),
        kind: ModelKind::Ontic(OnticSystem { model, preparations }),
        roles: Roles::three_box(),
        default_preparation: "mix".into(),
        eigen_preparations: [Some("1".into()), Some("2".into()), Some("3".into())],
        expected_stats: None,
    }
}
