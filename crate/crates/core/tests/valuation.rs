use fairshare_core::analysis::spearman;
use fairshare_core::outcome::OutcomeMapping;
use fairshare_core::valuation::{
    infl_ip, normalize, oracle_one_step, parse_scores, score_batch, value_random, write_scores, ToyInstance,
};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn oracle_gap_matches_second_order_term() {
    let toy = ToyInstance::random(31, 5, 40, 20);
    for eta in [1e-2, 1e-3, 1e-4] {
        for train in &toy.train {
            let g = toy.model.gradient(train).unwrap();
            let curvature = toy.test.iter().map(|t| dot(&t.features, &g).powi(2)).sum::<f64>() / toy.test.len() as f64;
            let gap = oracle_one_step(&toy.model, train, &toy.test, eta).unwrap()
                - eta * infl_ip(&toy.model, train, &toy.test).unwrap();
            assert!((gap + 0.5 * eta * eta * curvature).abs() < 1e-10, "eta {eta}: {gap}");
        }
    }
}

#[test]
fn first_order_error_shrinks_quadratically() {
    let toy = ToyInstance::random(32, 5, 100, 20);
    let error = |eta: f64| -> f64 {
        toy.train
            .iter()
            .map(|d| {
                (oracle_one_step(&toy.model, d, &toy.test, eta).unwrap() - eta * infl_ip(&toy.model, d, &toy.test).unwrap())
                    .abs()
            })
            .sum::<f64>()
    };
    let (e2, e3, e4) = (error(1e-2), error(1e-3), error(1e-4));
    assert!(e2 / e3 >= 5.0 && e3 / e4 >= 5.0, "{e2} {e3} {e4}");
}

#[test]
fn influence_ranks_like_the_oracle() {
    for seed in 0..5 {
        let toy = ToyInstance::random(seed, 5, 100, 20);
        let infl: Vec<f64> = toy.influence_scores().unwrap().into_iter().map(|s| s.1).collect();
        let oracle: Vec<f64> = toy.oracle_scores(1e-3).unwrap().into_iter().map(|s| s.1).collect();
        assert!(spearman(&infl, &oracle).unwrap() >= 0.95, "seed {seed}");
    }
}

#[test]
fn toy_rejects_bad_inputs() {
    let toy = ToyInstance::random(1, 3, 2, 2);
    assert!(infl_ip(&toy.model, &toy.train[0], &[]).is_err());
    assert!(oracle_one_step(&toy.model, &toy.train[0], &toy.test, 0.0).is_err());
}

#[test]
fn spearman_known_values() {
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    // ranks (1.5, 1.5, 3) and (1, 2, 3): Pearson = 0.866...
    assert!((spearman(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap() - 0.75f64.sqrt()).abs() < 1e-12);
    assert!(spearman(&[1.0], &[1.0]).is_err());
    assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
}

#[test]
fn score_file_round_trip() {
    let scores = score_batch("buyer-0", [("a", 0.25), ("b", -3.0), ("c", 1e-17), ("d", 7.5)]);
    let mut buf = Vec::new();
    write_scores(&mut buf, &scores).unwrap();
    assert_eq!(parse_scores(std::str::from_utf8(&buf).unwrap()).unwrap(), scores);
}

#[test]
fn score_parsing_errors_carry_line_numbers() {
    let text = "{\"dataset_id\":\"a\",\"buyer_id\":\"b\",\"score\":1}\n{\"dataset_id\":\"a\",\"buyer_id\":\"b\",\"score\":\"x\"}";
    assert!(matches!(parse_scores(text), Err(fairshare_core::Error::Parse { line: 2, .. })));
    let text = "{\"dataset_id\":\"a\",\"buyer_id\":\"b\",\"score\":\"2.5\"}";
    assert_eq!(parse_scores(text).unwrap()[0].raw, 2.5);
}

#[test]
fn outcome_mapping_round_trips_through_json() {
    let mapping = OutcomeMapping::MultiTask {
        theta: vec![0.5, 2.0],
        epsilon: 0.1,
        per_task: vec![
            OutcomeMapping::Linear { gamma: 2.0, beta: 0.0 },
            OutcomeMapping::Discrete { thresholds: vec![0.0, 0.5, 1.0], rewards: vec![0.0, 1.0] },
        ],
    };
    mapping.validate().unwrap();
    let back: OutcomeMapping = serde_json::from_str(&serde_json::to_string(&mapping).unwrap()).unwrap();
    assert_eq!(back, mapping);
    assert!((mapping.map_tasks(&[0.5, 0.7]).unwrap() - (0.5 * 1.0 + 2.0 * 1.0 + 0.1)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn spearman_is_invariant_under_monotone_maps(xs in prop::collection::vec(-5.0..5.0f64, 3..40), seed in any::<u64>()) {
        let ys: Vec<f64> = value_random(&vec!["d"; xs.len()], "b", seed).into_iter().map(|s| s.raw).collect();
        if let Ok(rho) = spearman(&xs, &ys) {
            let ex: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
            prop_assert!((spearman(&ex, &ys).unwrap() - rho).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&rho));
            prop_assert!((spearman(&ys, &xs).unwrap() - rho).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_scores_lie_in_unit_interval(raw in prop::collection::vec(-1e6..1e6f64, 0..30)) {
        let n = normalize(&raw);
        prop_assert_eq!(n.len(), raw.len());
        prop_assert!(n.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn linear_mapping_is_monotone(gamma in 0.01..10.0f64, beta in -5.0..5.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let m = OutcomeMapping::Linear { gamma, beta };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(m.map(lo).unwrap() <= m.map(hi).unwrap());
    }
}
