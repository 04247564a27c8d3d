use super::{Batch, Communication, Corruption, Notion, ScenarioPair};
use crate::ideal::Party;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Sender,
    Receiver,
    Message,
}

fn get(c: &Communication, f: Field) -> &[u8] {
    match f {
        Field::Sender => c.sender.as_bytes(),
        Field::Receiver => c.receiver.as_bytes(),
        Field::Message => &c.message,
    }
}

/// Equal in every field outside `free`.
fn equal_except(a: &Communication, b: &Communication, free: &[Field]) -> bool {
    let open = |f: Field| free.contains(&f);
    a.path == b.path
        && (open(Field::Sender) || a.sender == b.sender)
        && (open(Field::Receiver) || a.receiver == b.receiver)
        && (open(Field::Message) || a.message == b.message)
}

fn positionwise(b0: &Batch, b1: &Batch, free: &[Field]) -> bool {
    b0.len() == b1.len() && b0.iter().zip(b1).all(|(x, y)| equal_except(x, y, free))
}

fn differing(b0: &Batch, b1: &Batch) -> Vec<usize> {
    (0..b0.len()).filter(|&i| b0[i] != b1[i]).collect()
}

fn counts<'a>(b: &'a Batch, f: impl Fn(&'a Communication) -> &'a Party) -> BTreeMap<&'a Party, usize> {
    let mut m = BTreeMap::new();
    for c in b {
        *m.entry(f(c)).or_insert(0) += 1;
    }
    m
}

type Pair<'a> = (&'a [u8], &'a [u8]);

fn fields_of(c: &Communication, f: (Field, Field)) -> Pair<'_> {
    (get(c, f.0), get(c, f.1))
}

/// `{(A,B),(C,D)}` against `{(A,D),(C,B)}` with `A ≠ C` and `B ≠ D`.
fn mixed(s0: [Pair<'_>; 2], s1: [Pair<'_>; 2]) -> bool {
    let [(a, b), (c, d)] = s0;
    if a == c || b == d {
        return false;
    }
    let want: BTreeSet<Pair<'_>> = [(a, d), (c, b)].into();
    let got: BTreeSet<Pair<'_>> = s1.into();
    want == got
}

/// Exactly two positions differ; at those positions only the two `fields`
/// change and they form the mixing shape.
fn mixed_pair(b0: &Batch, b1: &Batch, fields: (Field, Field)) -> bool {
    if !positionwise(b0, b1, &[fields.0, fields.1]) {
        return false;
    }
    match differing(b0, b1).as_slice() {
        [] => true,
        &[p, q] => mixed([fields_of(&b0[p], fields), fields_of(&b0[q], fields)], [fields_of(&b1[p], fields), fields_of(&b1[q], fields)]),
        _ => false,
    }
}

/// Positions where any batch differs from the first, provided every batch
/// differs from it only in the `free` fields.
fn aligned(batches: &[&Batch], free: &[Field]) -> Option<Vec<usize>> {
    let first = batches[0];
    if !batches.iter().all(|b| positionwise(first, b, free)) {
        return None;
    }
    let pos: BTreeSet<usize> = batches.iter().flat_map(|b| differing(first, b)).collect();
    Some(pos.into_iter().collect())
}

/// One of the two communications of each scenario is simulated.
fn observability(pair: &ScenarioPair, fields: (Field, Field)) -> bool {
    let [s0, s1] = &pair.scenarios;
    if s0.alternatives.len() != 2 || s1.alternatives.len() != 2 {
        return false;
    }
    let all = [&s0.alternatives[0], &s0.alternatives[1], &s1.alternatives[0], &s1.alternatives[1]];
    let Some(pos) = aligned(&all, &[fields.0, fields.1]) else { return false };
    match pos.as_slice() {
        [] => true,
        &[p] => mixed([fields_of(&all[0][p], fields), fields_of(&all[1][p], fields)], [fields_of(&all[2][p], fields), fields_of(&all[3][p], fields)]),
        _ => false,
    }
}

/// Two communications share the field `f` in scenario 0 and differ in it
/// in scenario 1.
fn twice(pair: &ScenarioPair, f: Field) -> bool {
    let [s0, s1] = &pair.scenarios;
    if s0.alternatives.len() != 2 || s1.alternatives.len() != 2 {
        return false;
    }
    let all = [&s0.alternatives[0], &s0.alternatives[1], &s1.alternatives[0], &s1.alternatives[1]];
    let Some(pos) = aligned(&all, &[f]) else { return false };
    match pos.as_slice() {
        [] => true,
        &[p, q] => {
            let v = |b: &Batch| (get(&b[p], f).to_vec(), get(&b[q], f).to_vec());
            let (x0, y0) = v(all[0]);
            let (x1, y1) = v(all[1]);
            if !(x0 == y0 && x1 == y1 && x0 != x1) {
                return false;
            }
            let (a, c) = (x0, x1);
            let want: BTreeSet<(Vec<u8>, Vec<u8>)> = [(a.clone(), c.clone()), (c, a)].into();
            let got: BTreeSet<(Vec<u8>, Vec<u8>)> = [v(all[2]), v(all[3])].into();
            want == got
        }
        _ => false,
    }
}

/// Messages grouped by sender or receiver, as a sorted family of sorted message lists.
fn partition(b: &Batch, by_sender: bool) -> Vec<Vec<&[u8]>> {
    let mut groups: BTreeMap<&Party, Vec<&[u8]>> = BTreeMap::new();
    for c in b {
        let k = if by_sender { &c.sender } else { &c.receiver };
        groups.entry(k).or_default().push(&c.message);
    }
    let mut out: Vec<Vec<&[u8]>> = groups
        .into_values()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}

fn single(pair: &ScenarioPair) -> Option<(&Batch, &Batch)> {
    let [s0, s1] = &pair.scenarios;
    match (s0.alternatives.as_slice(), s1.alternatives.as_slice()) {
        ([b0], [b1]) => Some((b0, b1)),
        _ => None,
    }
}

fn shape_valid(notion: Notion, pair: &ScenarioPair) -> bool {
    use Field::*;
    let batches: Vec<&Batch> = pair.batches().collect();
    if batches.is_empty() || batches.iter().any(|b| b.len() != batches[0].len()) {
        return false;
    }
    if batches.iter().all(|b| *b == batches[0]) && pair.scenarios.iter().all(|s| !s.alternatives.is_empty()) {
        return true;
    }
    match notion {
        Notion::Sro => return observability(pair, (Sender, Receiver)),
        Notion::Smo => return observability(pair, (Sender, Message)),
        Notion::Rmo => return observability(pair, (Receiver, Message)),
        Notion::TwoSl => return twice(pair, Sender),
        Notion::TwoRl => return twice(pair, Receiver),
        _ => {}
    }
    let Some((b0, b1)) = single(pair) else { return false };
    match notion {
        Notion::Mo => positionwise(b0, b1, &[Message]),
        Notion::MoLen => {
            positionwise(b0, b1, &[Message]) && b0.iter().zip(b1).all(|(x, y)| x.message.len() == y.message.len())
        }
        Notion::Sml => positionwise(b0, b1, &[Sender]) && counts(b0, |c| &c.sender) == counts(b1, |c| &c.sender),
        Notion::Rml => {
            positionwise(b0, b1, &[Receiver]) && counts(b0, |c| &c.receiver) == counts(b1, |c| &c.receiver)
        }
        Notion::Srl => mixed_pair(b0, b1, (Sender, Receiver)),
        Notion::SmlPair => mixed_pair(b0, b1, (Sender, Message)),
        Notion::RmlPair => mixed_pair(b0, b1, (Receiver, Message)),
        Notion::SflP => positionwise(b0, b1, &[Sender]) && partition(b0, true) == partition(b1, true),
        Notion::RflP => positionwise(b0, b1, &[Receiver]) && partition(b0, false) == partition(b1, false),
        Notion::Sro | Notion::Smo | Notion::Rmo | Notion::TwoSl | Notion::TwoRl => unreachable!(),
    }
}

fn corruption_valid(option: Corruption, pair: &ScenarioPair, corrupted: &BTreeSet<Party>) -> bool {
    let bad = |p: &Party| corrupted.contains(p);
    match option {
        Corruption::None => pair.batches().flatten().all(|c| !bad(&c.sender) && !bad(&c.receiver)),
        Corruption::NoCorruptSender => pair.batches().flatten().all(|c| !bad(&c.sender)),
        Corruption::Standard => {
            let batches: Vec<&Batch> = pair.batches().collect();
            batches.iter().all(|x| {
                batches.iter().all(|y| {
                    x.iter().zip(y.iter()).all(|(a, b)| {
                        let same = a.message == b.message;
                        (!bad(&a.sender) || (a.sender == b.sender && same))
                            && (!bad(&a.receiver) || (a.receiver == b.receiver && same))
                    })
                })
            })
        }
    }
}

/// Whether a scenario pair is admissible for `notion` under the corruption
/// option, given the set of corrupted parties.
pub fn validate(notion: Notion, option: Corruption, pair: &ScenarioPair, corrupted: &BTreeSet<Party>) -> bool {
    shape_valid(notion, pair) && corruption_valid(option, pair, corrupted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notions::Scenario;

    fn c(s: &str, r: &str, m: &[u8]) -> Communication {
        Communication::new(s, r, m, &["H"])
    }

    fn pair(b0: Batch, b1: Batch) -> ScenarioPair {
        ScenarioPair::new(Scenario::single(b0), Scenario::single(b1))
    }

    fn ok(n: Notion, p: &ScenarioPair) -> bool {
        validate(n, Corruption::None, p, &BTreeSet::new())
    }

    #[test]
    fn identical_batches_are_valid_everywhere() {
        let b = vec![c("A", "B", b"x"), c("C", "D", b"y")];
        let p = pair(b.clone(), b.clone());
        let alt = ScenarioPair::new(Scenario::choice(vec![b.clone(), b.clone()]), Scenario::choice(vec![b.clone(), b]));
        for n in Notion::ALL {
            assert!(ok(n, &p), "{n}");
            assert!(ok(n, &alt), "{n}");
        }
    }

    #[test]
    fn message_change_is_mo_only() {
        let p = pair(vec![c("A", "B", b"x")], vec![c("A", "B", b"y")]);
        assert!(ok(Notion::Mo, &p));
        assert!(ok(Notion::MoLen, &p));
        assert!(!ok(Notion::Sml, &p));
        assert!(!ok(Notion::Srl, &p));
        let longer = pair(vec![c("A", "B", b"x")], vec![c("A", "B", b"yy")]);
        assert!(ok(Notion::Mo, &longer));
        assert!(!ok(Notion::MoLen, &longer));
    }

    #[test]
    fn sender_swaps_need_equal_counts() {
        let p = pair(vec![c("A", "B", b"1"), c("C", "B", b"2")], vec![c("C", "B", b"1"), c("A", "B", b"2")]);
        assert!(ok(Notion::Sml, &p));
        let unbalanced = pair(vec![c("A", "B", b"1"), c("C", "B", b"2")], vec![c("A", "B", b"1"), c("A", "B", b"2")]);
        assert!(!ok(Notion::Sml, &unbalanced));
        assert!(!ok(Notion::Rml, &p));
    }

    #[test]
    fn mixing_shape_for_sender_receiver() {
        let mut b0 = vec![c("E", "F", b"0"), c("A", "B", b"1"), c("C", "D", b"2")];
        let mut b1 = vec![c("E", "F", b"0"), c("A", "D", b"1"), c("C", "B", b"2")];
        assert!(ok(Notion::Srl, &pair(b0.clone(), b1.clone())));
        b1[2].message = b"3".to_vec();
        assert!(!ok(Notion::Srl, &pair(b0.clone(), b1.clone())));
        b1[2] = c("A", "B", b"2");
        assert!(!ok(Notion::Srl, &pair(b0.clone(), b1)));
        b0[1].path = vec!["X".into()];
        assert!(!ok(Notion::Srl, &pair(b0, vec![c("E", "F", b"0"), c("A", "D", b"1"), c("C", "B", b"2")])));
    }

    #[test]
    fn pair_notions() {
        let sm = pair(vec![c("A", "R", b"1"), c("C", "R", b"2")], vec![c("A", "R", b"2"), c("C", "R", b"1")]);
        assert!(ok(Notion::SmlPair, &sm));
        assert!(!ok(Notion::RmlPair, &sm));
        let rm = pair(vec![c("A", "B", b"1"), c("A", "D", b"2")], vec![c("A", "B", b"2"), c("A", "D", b"1")]);
        assert!(ok(Notion::RmlPair, &rm));
    }

    #[test]
    fn observability_and_twice_shapes() {
        let sro = ScenarioPair::new(
            Scenario::choice(vec![vec![c("A", "B", b"m")], vec![c("C", "D", b"m")]]),
            Scenario::choice(vec![vec![c("A", "D", b"m")], vec![c("C", "B", b"m")]]),
        );
        assert!(ok(Notion::Sro, &sro));
        assert!(!ok(Notion::Smo, &sro));
        let two = ScenarioPair::new(
            Scenario::choice(vec![vec![c("A", "B", b"1"), c("A", "D", b"2")], vec![c("C", "B", b"1"), c("C", "D", b"2")]]),
            Scenario::choice(vec![vec![c("A", "B", b"1"), c("C", "D", b"2")], vec![c("C", "B", b"1"), c("A", "D", b"2")]]),
        );
        assert!(ok(Notion::TwoSl, &two));
        assert!(!ok(Notion::TwoRl, &two));
        assert!(!ok(Notion::Sro, &two));
    }

    #[test]
    fn frequency_partitions() {
        let b0 = vec![c("A", "X", b"1"), c("C", "Y", b"2"), c("C", "Y", b"3")];
        let b1 = vec![c("C", "X", b"1"), c("A", "Y", b"2"), c("A", "Y", b"3")];
        assert!(ok(Notion::SflP, &pair(b0.clone(), b1)));
        let split = vec![c("C", "X", b"1"), c("A", "Y", b"2"), c("C", "Y", b"3")];
        assert!(!ok(Notion::SflP, &pair(b0, split)));
    }

    #[test]
    fn corruption_options() {
        let p = pair(vec![c("A", "R", b"1")], vec![c("A", "R", b"2")]);
        let r: BTreeSet<Party> = ["R".to_string()].into();
        assert!(!validate(Notion::Mo, Corruption::None, &p, &r));
        assert!(validate(Notion::Mo, Corruption::NoCorruptSender, &p, &r));
        assert!(!validate(Notion::Mo, Corruption::Standard, &p, &r));
        let a: BTreeSet<Party> = ["A".to_string()].into();
        assert!(!validate(Notion::Mo, Corruption::NoCorruptSender, &p, &a));
    }
}
