use super::*;
use crate::rng::{derive, seeded};
use crate::scheme::scheme_by_name;

fn spec(game: GameId, scheme: &str, trials: u64) -> GameSpec {
    GameSpec::new(game, scheme, trials, 7)
}

fn within_3_sigma(r: &GameReport) -> bool {
    r.advantage <= 3.0 * r.sigma
}

#[test]
fn layer_unlinkability_view_matches_definition() {
    let scheme = scheme_by_name("sphinx-ae", &SuiteParams::lab()).unwrap();
    for b in 0..2 {
        for i in 0..20 {
            let mut rng = derive(1, "lu-view", i);
            let t = run_trial(GameId::Lu, scheme.as_ref(), 8, &NullGuess, b, &mut rng).unwrap();
            let j = t.input.j;
            let ChallengeView::Linked { onion, processed } = &t.view else { panic!("LU view") };
            let expected_first = if b == 0 { &t.layers[0] } else { &t.alt_layers[t.k - 1] };
            assert_eq!(onion, expected_first);
            assert_eq!(t.alt_path[t.k - 1..t.k - 1 + j], t.input.path[..j]);
            match processed {
                OracleAnswer::Relay { next, onion } => {
                    assert_eq!(next, &t.input.path[j]);
                    assert_eq!(onion, &t.layers[j]);
                }
                other => panic!("unexpected {other:?}"),
            }
            // The adversary never sees a layer strictly between the first
            // layer and the honest router's output.
            for layer in &t.layers[1..j] {
                assert_ne!(layer, onion);
            }
        }
    }
}

struct HonestReceiver;

impl Distinguisher for HonestReceiver {
    fn name(&self) -> String {
        "honest-receiver".into()
    }

    fn choose(&self, ctx: &AdversaryContext<'_>, _: &mut Oracle<'_>, rng: &mut LabRng) -> ChallengeInput {
        ChallengeInput { message: b"to the end".to_vec(), path: ctx.path_around(3, 3, rng), j: 3, modification: None }
    }

    fn guess(&self, _: &AdversaryContext<'_>, _: &ChallengeInput, _: &ChallengeView, _: &mut Oracle<'_>, _: &mut LabRng) -> usize {
        0
    }
}

#[test]
fn honest_receiver_position_yields_the_message() {
    let scheme = scheme_by_name("sphinx-ae", &SuiteParams::lab()).unwrap();
    let mut rng = seeded(3);
    let t = run_trial(GameId::Lu, scheme.as_ref(), 8, &HonestReceiver, 0, &mut rng).unwrap();
    let ChallengeView::Linked { processed, .. } = &t.view else { panic!("LU view") };
    assert_eq!(processed, &OracleAnswer::Receive { message: b"to the end".to_vec() });
    let err = run_trial(GameId::Ti, scheme.as_ref(), 8, &HonestReceiver, 0, &mut rng).unwrap_err();
    assert!(matches!(err, GameError::InvalidAdversaryInput(_)));
}

#[test]
fn tail_view_keeps_tail_and_message() {
    let scheme = scheme_by_name("sphinx-fixed", &SuiteParams::lab()).unwrap();
    for i in 0..20 {
        let mut rng = derive(2, "ti-view", i);
        let t = run_trial(GameId::Ti, scheme.as_ref(), 8, &NullGuess, 1, &mut rng).unwrap();
        let j = t.input.j;
        assert_eq!(t.alt_path[t.k - 1..], t.input.path[j - 1..]);
        assert_eq!(t.alt_message, t.input.message);
        let ChallengeView::Tail { onion, next } = &t.view else { panic!("TI view") };
        assert_eq!(onion, &t.alt_layers[t.k]);
        assert_eq!(next, &t.input.path[j]);
    }
}

#[test]
fn oracle_refuses_excluded_onions() {
    let scheme = scheme_by_name("sphinx-fixed", &SuiteParams::lab()).unwrap();
    let mut rng = seeded(4);
    let names = crate::scheme::Network::names(4);
    let net = crate::scheme::Network::generate(scheme.as_ref(), &names, &mut rng);
    let path: Vec<String> = vec![names[0].clone(), names[1].clone()];
    let layers = scheme.form_onion(b"x", &path, &net.dir, &mut rng).unwrap();
    let node = &net.nodes[&names[0]];
    let flipped = Modification::FlipPayloadTail { bytes: 1 }.apply(scheme.as_ref(), &layers[0]);

    let mut oracle = Oracle::new(scheme.as_ref(), node);
    oracle.restrict(OraclePolicy::ExcludeExact, vec![layers[0].clone()]);
    assert_eq!(oracle.query(&layers[0]), OracleAnswer::Refused);
    assert!(matches!(oracle.query(&flipped), OracleAnswer::Relay { .. }));

    oracle.restrict(OraclePolicy::ExcludeDuplicates, vec![layers[0].clone()]);
    assert_eq!(oracle.query(&flipped), OracleAnswer::Refused);
    let mut garbage = layers[0].clone();
    garbage.0[0] ^= 1;
    assert_eq!(oracle.query(&garbage), OracleAnswer::Bottom);
    assert_eq!(oracle.log.len(), 4);
}

#[test]
fn modification_must_preserve_duplicates() {
    struct BadF;
    impl Distinguisher for BadF {
        fn name(&self) -> String {
            "bad-f".into()
        }
        fn choose(&self, ctx: &AdversaryContext<'_>, _: &mut Oracle<'_>, rng: &mut LabRng) -> ChallengeInput {
            let path = ctx.path_around(3, 2, rng);
            ChallengeInput { message: b"m".to_vec(), path, j: 2, modification: Some(Modification::FlipByte { offset: 0 }) }
        }
        fn guess(&self, _: &AdversaryContext<'_>, _: &ChallengeInput, _: &ChallengeView, _: &mut Oracle<'_>, _: &mut LabRng) -> usize {
            0
        }
    }
    let err = run_game(&spec(GameId::OsMod, "sphinx-ae", 4), &BadF).unwrap_err();
    assert_eq!(err, GameError::InvalidModificationFn);
}

#[test]
fn adapted_sphinx_resists_the_suite() {
    let params = SuiteParams::lab();
    for game in GameId::ALL {
        for d in distinguisher_suite("sphinx-ae", &params) {
            let r = run_game(&spec(game, "sphinx-ae", 600), d.as_ref()).unwrap();
            assert!(within_3_sigma(&r), "{game} {}: {r:?}", d.name());
        }
    }
}

#[test]
fn identifier_links_layers_but_not_onion_security() {
    let lu = run_game(&spec(GameId::Lu, "broken2", 400), &IdScan).unwrap();
    assert!(lu.advantage >= 0.49, "{lu:?}");
    for d in distinguisher_suite("broken2", &SuiteParams::lab()) {
        let os = run_game(&spec(GameId::Os, "broken2", 400), d.as_ref()).unwrap();
        assert!(within_3_sigma(&os), "{}: {os:?}", d.name());
    }
}

#[test]
fn embedded_path_breaks_tail_indistinguishability() {
    let reader = PathReader::new("sphinx-ae", &SuiteParams::lab()).unwrap();
    let r = run_game(&spec(GameId::Ti, "broken1", 400), &reader).unwrap();
    assert!(r.advantage >= 0.49, "{r:?}");
    let control = run_game(&spec(GameId::Ti, "sphinx-ae", 400), &reader).unwrap();
    assert!(within_3_sigma(&control), "{control:?}");
}

#[test]
fn zero_padding_breaks_tail_indistinguishability() {
    let probe = PathLengthProbe { params: SuiteParams::lab() };
    let flawed = run_game(&spec(GameId::Ti, "sphinx-flawed", 1000), &probe).unwrap();
    assert!(flawed.advantage >= 0.3, "{flawed:?}");
    let fixed = run_game(&spec(GameId::Ti, "sphinx-fixed", 1000), &probe).unwrap();
    assert!(within_3_sigma(&fixed), "{fixed:?}");
}

#[test]
fn malleable_payload_loses_os_lu_and_os_mod() {
    let os = run_game(&spec(GameId::Os, "sphinx-malleable", 400), &TagAndQuery).unwrap();
    let lu = run_game(&spec(GameId::Lu, "sphinx-malleable", 400), &TagAndQuery).unwrap();
    let osm = run_game(&spec(GameId::OsMod, "sphinx-malleable", 400), &TagAndQuery).unwrap();
    assert!(os.advantage >= 0.45, "{os:?}");
    assert!(lu.advantage >= os.advantage - 0.05, "{lu:?}");
    assert!(osm.advantage >= 0.45, "{osm:?}");
    let dup = run_game(&spec(GameId::LuDup, "sphinx-malleable", 400), &TagAndQuery).unwrap();
    assert!(within_3_sigma(&dup), "{dup:?}");
    let ae = run_game(&spec(GameId::OsMod, "sphinx-ae", 400), &TagAndQuery).unwrap();
    assert!(within_3_sigma(&ae), "{ae:?}");
}

#[test]
fn wrap_resistance_blocks_identity_copy() {
    let params = SuiteParams::lab();
    let plain = run_wr("sphinx-ae", &params, &IdentityCopy, 200, 9).unwrap();
    assert_eq!(plain.successes, 200);
    let wrapped = run_wr("wr(sphinx-ae)", &params, &IdentityCopy, 200, 9).unwrap();
    assert_eq!(wrapped.successes, 0);
    let random = run_wr("wr(sphinx-ae)", &params, &RandomForgery, 200, 9).unwrap();
    assert_eq!(random.successes, 0);
    let replay = run_wr("sphinx-ae", &params, &ReplayPrevious, 50, 9).unwrap();
    assert_eq!((replay.successes, replay.rejected), (0, 50));
}

#[test]
fn integrity_chain_stops_at_the_bound() {
    let params = SuiteParams::lab();
    let scheme = integrity_scheme(&params, 4).unwrap();
    let honest = run_integrity_check(&scheme, CraftedOnion::Honest, 8, 30, 1).unwrap();
    assert_eq!((honest.delivered, honest.max_relayed), (30, 4));
    let over = run_integrity_check(&scheme, CraftedOnion::Overlong, 8, 30, 1).unwrap();
    assert_eq!(over.aborted_at.get(&5), Some(&30));
    assert_eq!(over.drops.get("BadTag"), Some(&30));
    let stuffed = run_integrity_check(&scheme, CraftedOnion::Stuffed, 8, 30, 1).unwrap();
    assert_eq!(stuffed.aborted_at.get(&1), Some(&30));
    assert_eq!(stuffed.drops.get("BadLength"), Some(&30));
}

#[test]
fn game_names_parse() {
    for g in GameId::ALL {
        assert_eq!(g.name().parse::<GameId>().unwrap(), g);
    }
    assert!("nope".parse::<GameId>().is_err());
}

#[test]
fn same_seed_same_report() {
    let a = run_game(&spec(GameId::Lu, "sphinx-ae", 50), &RandomBit).unwrap();
    let b = run_game(&spec(GameId::Lu, "sphinx-ae", 50), &RandomBit).unwrap();
    assert_eq!(a.wins, b.wins);
}
