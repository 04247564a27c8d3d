use super::*;
use crate::rng::seeded;

const BROKEN_BY_PATH_REPLACEMENT: [Notion; 9] = [
    Notion::Srl,
    Notion::Sro,
    Notion::TwoSl,
    Notion::TwoRl,
    Notion::SmlPair,
    Notion::Smo,
    Notion::RmlPair,
    Notion::Rmo,
    Notion::MoLen,
];

fn config(relays: &[&str], corrupted: &[&str], max_path: usize) -> ScenarioConfig {
    ScenarioConfig {
        users: vec!["A".into(), "B".into()],
        relays: relays.iter().map(|s| s.to_string()).collect(),
        corrupted: corrupted.iter().map(|s| s.to_string()).collect(),
        max_path,
    }
}

#[test]
fn replacement_paths_share_the_honest_relay() {
    let cfg = config(&["H", "X1", "X2", "X3"], &["X1", "X2", "X3"], 4);
    let mut rng = seeded(1);
    for _ in 0..1000 {
        let mut batch = vec![Communication::new("A", "B", b"m", &[]), Communication::new("B", "A", b"n", &[])];
        replace_paths(&mut batch, &cfg, &mut rng).unwrap();
        for c in &batch {
            assert!(c.path.contains(&"H".to_string()));
            assert!((1..=4).contains(&c.path.len()));
        }
    }
    let dead = config(&["X1", "X2"], &["X1", "X2"], 4);
    let mut batch = vec![Communication::new("A", "B", b"m", &[])];
    assert_eq!(replace_paths(&mut batch, &dead, &mut rng), Err(NotionError::NoHonestRelayAvailable));
}

#[test]
fn corrupt_senders_keep_their_paths() {
    let cfg = config(&["H", "X"], &["A"], 3);
    let mut batch = vec![Communication::new("A", "B", b"m", &["X", "X"])];
    replace_paths(&mut batch, &cfg, &mut seeded(2)).unwrap();
    assert_eq!(batch[0].path, vec!["X".to_string(), "X".to_string()]);
}

#[test]
fn standard_attacks_are_admissible() {
    for n in Notion::ALL {
        let setup = standard_attack(n, AdversaryClass::PathReplacement);
        let pair = setup.strategy.propose();
        assert!(validate(n, setup.game.corruption, &pair, &setup.game.config.corrupted), "{n}");
    }
}

#[test]
fn invalid_pairs_are_refused() {
    let mut setup = standard_attack(Notion::Srl, AdversaryClass::PathReplacement);
    setup.game.notion = Notion::Mo;
    assert!(matches!(
        run_notion_game(&setup.game, setup.strategy.as_ref(), 10, 0),
        Err(NotionError::InvalidPair { .. })
    ));
}

#[test]
fn random_guess_has_no_advantage() {
    let setup = standard_attack(Notion::Srl, AdversaryClass::PathReplacement);
    let guess = RandomGuess { pair: setup.strategy.propose() };
    let r = run_notion_game(&setup.game, &guess, 10_000, 3).unwrap();
    assert!(r.advantage <= 3.0 * r.sigma, "{r:?}");
}

#[test]
fn attacks_win_with_path_replacement() {
    for n in BROKEN_BY_PATH_REPLACEMENT {
        let setup = standard_attack(n, AdversaryClass::PathReplacement);
        let r = run_notion_game(&setup.game, setup.strategy.as_ref(), 300, 4).unwrap();
        assert!(r.advantage >= 0.45, "{n}: {r:?}");
    }
}

#[test]
fn restricted_class_hides_linking() {
    for n in [Notion::Sml, Notion::Rml, Notion::Srl] {
        let setup = standard_attack(n, AdversaryClass::Restricted);
        let r = run_notion_game(&setup.game, setup.strategy.as_ref(), 2000, 5).unwrap();
        assert!(r.advantage <= 3.0 * r.sigma, "{n}: {r:?}");
    }
}

#[test]
fn same_seed_same_report() {
    let setup = standard_attack(Notion::Sro, AdversaryClass::Restricted);
    let a = run_notion_game(&setup.game, setup.strategy.as_ref(), 200, 6).unwrap();
    let b = run_notion_game(&setup.game, setup.strategy.as_ref(), 200, 6).unwrap();
    assert_eq!(a.wins, b.wins);
}

#[test]
fn message_swap_leaves_trace_unchanged() {
    let setup = standard_attack(Notion::Mo, AdversaryClass::PathReplacement);
    let pair = setup.strategy.propose();
    assert_eq!(mo_trace_equality(&setup.game, &pair, 100, 7).unwrap(), 100);
    let mut open = setup.game.clone();
    open.corruption = Corruption::NoCorruptSender;
    open.config.corrupted.insert("B".to_string());
    assert!(mo_trace_equality(&open, &pair, 100, 7).unwrap() < 100);
}

#[test]
fn frequency_bound_value() {
    let bound = sfl_bound(10, 5, 20, 6);
    let q: f64 = 4.0 / 19.0;
    assert!((bound - (1.0 - (0.1 + q.powi(6) + q.powi(5) / 19.0))).abs() < 1e-15);
    assert!(bound > 0.899 && bound < 0.9);
}

#[test]
fn notion_names_parse() {
    for n in Notion::ALL {
        assert_eq!(n.name().parse::<Notion>().unwrap(), n);
    }
    assert_eq!("2sl".parse::<Notion>().unwrap(), Notion::TwoSl);
    assert!("XYZ".parse::<Notion>().is_err());
}
