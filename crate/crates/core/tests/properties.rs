use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tmdp_core::agents::{SmootherState, Transition, WolfAgent, WolfParams};
use tmdp_core::beliefs::{BloomConditionalModel, BloomParams, DirichletBelief, MarkovMixtureModel};
use tmdp_core::env::{AdversaryReward, GridEpisode, GridWorld, Memory1State, Move, PayoffBimatrix};
use tmdp_core::harness::{agent_rng, resolve_config, run_experiment};
use tmdp_core::scalar::is_distribution;
use tmdp_core::tmdp::{
    apply_operator_h, apply_operator_hbar, fixed_point_iterate, q_update_independent, q_update_joint, BeliefTable,
    JointQTable, LearningParams, QTable, SupNorm, TmdpSpec,
};

fn case(seed: u64, ns: usize, na: usize, nb: usize) -> (ChaCha8Rng, TmdpSpec<f64>, BeliefTable<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = TmdpSpec::random(&mut rng, ns, na, nb, 5.0);
    let belief = BeliefTable::random(&mut rng, ns, nb);
    (rng, spec, belief)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_contracts(seed in any::<u64>(), ns in 1usize..6, na in 1usize..4, nb in 1usize..4, gamma in 0.01f64..0.999) {
        let (mut rng, spec, belief) = case(seed, ns, na, nb);
        let q1 = JointQTable::random(&mut rng, ns, na, nb, 20.0);
        let q2 = JointQTable::random(&mut rng, ns, na, nb, 20.0);
        let d = apply_operator_h(&q1, &spec, &belief, gamma).unwrap()
            .sup_dist(&apply_operator_h(&q2, &spec, &belief, gamma).unwrap());
        prop_assert!(d <= gamma * q1.sup_dist(&q2) + 1e-9);
    }

    #[test]
    fn hbar_contracts(seed in any::<u64>(), ns in 1usize..6, na in 1usize..4, nb in 1usize..4, gamma in 0.01f64..0.999) {
        let (mut rng, spec, belief) = case(seed, ns, na, nb);
        let q1 = QTable::random(&mut rng, ns, na, 20.0);
        let q2 = QTable::random(&mut rng, ns, na, 20.0);
        let d = apply_operator_hbar(&q1, &spec, &belief, gamma).unwrap()
            .sup_dist(&apply_operator_hbar(&q2, &spec, &belief, gamma).unwrap());
        prop_assert!(d <= gamma * q1.sup_dist(&q2) + 1e-9);
    }

    #[test]
    fn residuals_shrink_geometrically(seed in any::<u64>(), ns in 1usize..5, na in 1usize..4, nb in 1usize..4, gi in 0usize..3) {
        let gamma = [0.5, 0.9, 0.99][gi];
        let (_, spec, belief) = case(seed, ns, na, nb);
        let fp = fixed_point_iterate(
            |q: &JointQTable<f64>| apply_operator_h(q, &spec, &belief, gamma),
            JointQTable::new(ns, na, nb),
            1e-6,
            20_000,
        ).unwrap();
        let r0 = fp.residuals[0];
        for (k, r) in fp.residuals.iter().enumerate() {
            prop_assert!(*r <= gamma.powi(k as i32) * r0 * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn updates_touch_one_entry(seed in any::<u64>(), s in 0usize..3, a in 0usize..2, b in 0usize..3, r in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = LearningParams::new(0.3, 0.9, 0.1).unwrap();
        let q0 = QTable::random(&mut rng, 3, 2, 5.0);
        let mut q = q0.clone();
        q_update_independent(&mut q, s, a, r, (s + 1) % 3, &params).unwrap();
        let changed = q0.values().iter().zip(q.values()).filter(|(x, y)| x != y).count();
        prop_assert!(changed <= 1);
        let j0 = JointQTable::random(&mut rng, 3, 2, 3, 5.0);
        let belief = BeliefTable::random(&mut rng, 3, 3);
        let mut j = j0.clone();
        q_update_joint(&mut j, s, a, b, r, (s + 2) % 3, &belief, &params).unwrap();
        let changed = j0.values().iter().zip(j.values()).filter(|(x, y)| x != y).count();
        prop_assert!(changed <= 1);
        for (i, (x, y)) in j0.values().iter().zip(j.values()).enumerate() {
            if i != (s * 2 + a) * 3 + b {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn point_mass_belief_is_plain_joint_update(seed in any::<u64>(), b_fixed in 0usize..3, r in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = LearningParams::new(0.25, 0.9, 0.0).unwrap();
        let mut q = JointQTable::random(&mut rng, 2, 3, 3, 5.0);
        let expected = {
            let cont = (0..3).map(|a2| q.get(1, a2, b_fixed)).fold(f64::NEG_INFINITY, f64::max);
            0.75 * q.get(0, 1, 2) + 0.25 * (r + 0.9 * cont)
        };
        q_update_joint(&mut q, 0, 1, 2, r, 1, &BeliefTable::point_mass(2, 3, b_fixed), &params).unwrap();
        prop_assert!((q.get(0, 1, 2) - expected).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_predictive_and_forget(actions in prop::collection::vec(0usize..4, 0..300), lambda in 0.05f64..0.999) {
        let mut plain = DirichletBelief::symmetric(4, 1.0, 1.0).unwrap();
        let mut unit = DirichletBelief::symmetric(4, 1.0, 1.0).unwrap();
        let mut forget = DirichletBelief::symmetric(4, 1.0, lambda).unwrap();
        for &a in &actions {
            plain.observe(a).unwrap();
            unit.forget_observe(a).unwrap();
            forget.forget_observe(a).unwrap();
            prop_assert!(is_distribution(&forget.predictive().unwrap()));
        }
        prop_assert_eq!(plain.pseudocounts(), unit.pseudocounts());
        let k = actions.len() as i32;
        let closed = lambda.powi(k) * 4.0 + (1.0 - lambda.powi(k)) / (1.0 - lambda);
        prop_assert!((forget.total() - closed).abs() < 1e-9);
    }

    #[test]
    fn bloom_never_undercounts(stream in prop::collection::vec((0usize..5000, 0usize..3), 1..2000)) {
        let params = BloomParams { capacity: 500, ..BloomParams::default() };
        let mut model = BloomConditionalModel::<f64>::new(3, params, 1.0, 1.0).unwrap();
        let mut exact = std::collections::HashMap::new();
        for &(s, b) in &stream {
            model.update(s, b).unwrap();
            *exact.entry((s, b)).or_insert(0u32) += 1;
        }
        for (&(s, b), &n) in &exact {
            prop_assert!(model.approx_count(s, b).unwrap() >= n);
        }
        for &(s, _) in stream.iter().take(50) {
            prop_assert!(is_distribution(&model.conditional_predictive(s).unwrap()));
        }
    }

    #[test]
    fn mixture_predictive_is_distribution(steps in prop::collection::vec((0usize..3, 0usize..2, 0usize..3), 1..200), w in 0.0f64..1.0) {
        let weights = [w / 2.0, w / 2.0, 1.0 - w];
        let mut m = MarkovMixtureModel::<f64>::new(weights, 3, 2, 3, 1.0, 1.0).unwrap();
        let (mut pa, mut pb) = (None, None);
        for &(s, a, b) in &steps {
            prop_assert!(is_distribution(&m.mixture_predictive(pa, pb, s).unwrap()));
            m.observe(pa, pb, s, b).unwrap();
            pa = Some(a);
            pb = Some(b);
        }
    }

    #[test]
    fn smoother_stays_on_simplex(choices in prop::collection::vec(0usize..3, 0..500), alpha in 0.01f64..0.99) {
        let mut st = SmootherState::new(3, alpha).unwrap();
        for &c in &choices {
            st.observe(c).unwrap();
            prop_assert!(is_distribution(st.p()));
            prop_assert!(st.least_likely() < 3);
        }
    }

    #[test]
    fn wolf_policies_stay_on_simplex(seed in any::<u64>(), rewards in prop::collection::vec(-5.0f64..5.0, 1..300)) {
        let params = LearningParams::new(0.3, 0.9, 0.1).unwrap();
        let mut w = WolfAgent::new(2, 3, params, WolfParams::new(0.05, 0.2).unwrap(), agent_rng(seed, 1));
        let mut s = 0;
        for &r in &rewards {
            let a = w.act(s).unwrap();
            prop_assert!(a < 3);
            let s_next = (s + a) % 2;
            let t = Transition { s, a, b: 0, reward: r, opp_reward: -r, s_next, terminal: false, revealed: None };
            w.observe(&t).unwrap();
            prop_assert!(is_distribution(w.policy(s)));
            prop_assert!(is_distribution(w.average_policy(s)));
            s = s_next;
        }
    }

    #[test]
    fn grid_returns_are_bounded(moves in prop::collection::vec(0usize..4, 60), target in 0usize..2) {
        let world = GridWorld::default_layout();
        let mut ep = GridEpisode::new(&world);
        let mut total = 0.0;
        let mut reached = None;
        for &m in &moves {
            if ep.is_done() {
                break;
            }
            let step = ep.grid_step(&world, Move::from_index(m).unwrap(), target, AdversaryReward::ZeroSum).unwrap();
            total += step.r_dm;
            reached = reached.or(step.reached);
        }
        prop_assert!(ep.is_done());
        prop_assert!(ep.grid_step(&world, Move::Up, target, AdversaryReward::ZeroSum).is_err());
        let shortest = world.shortest_path(0).unwrap().min(world.shortest_path(1).unwrap()) as f64;
        prop_assert!(total <= 50.0 - shortest);
        prop_assert!(total >= -100.0);
        if reached.is_none() {
            prop_assert_eq!(total, -50.0);
        }
    }
}

#[test]
fn matrix_lookup_is_pure() {
    let g = PayoffBimatrix::chicken();
    let first = g.matrix_step(1, 0).unwrap();
    assert!((0..1_000_000).all(|_| g.matrix_step(1, 0).unwrap() == first));
}

#[test]
fn memory1_encoding_is_a_bijection() {
    for (nr, nc) in [(2, 2), (3, 2), (2, 4)] {
        let m = Memory1State { n_rows: nr, n_cols: nc };
        let mut seen = vec![false; m.n_states()];
        for a in 0..nr {
            for b in 0..nc {
                let s = m.encode(a, b).unwrap();
                assert!(s != Memory1State::INITIAL && !seen[s]);
                seen[s] = true;
                assert_eq!(m.decode(s).unwrap(), Some((a, b)));
            }
        }
        assert!(seen[1..].iter().all(|&x| x));
        assert_eq!(m.decode(0).unwrap(), None);
    }
}

#[test]
fn decay_follows_the_cadence() {
    let cfg = resolve_config(Some("foe_spatial_l2"), None, &["episodes=200".into(), "eval_window=10".into(), "seeds=1".into()]).unwrap();
    let log = &run_experiment(&cfg).unwrap()[0];
    for r in &log.records {
        let k = (r.step / 10) as i32;
        assert!((r.eps_dm - 0.99 * 0.995f64.powi(k)).abs() < 1e-12, "round {}", r.step);
        assert_eq!(r.eps_opp, 0.0);
    }
}

#[test]
fn permuting_seeds_permutes_logs() {
    let base = ["steps=300".to_string(), "eval_window=30".to_string()];
    let run = |list: &str| {
        let mut sets = base.to_vec();
        sets.push(format!("seed_list={list}"));
        run_experiment(&resolve_config(Some("chicken_wolf_l2"), None, &sets).unwrap()).unwrap()
    };
    let fwd = run("[1, 2, 3]");
    let rev = run("[3, 2, 1]");
    for (i, log) in fwd.iter().enumerate() {
        assert_eq!(*log, rev[2 - i]);
    }
}
