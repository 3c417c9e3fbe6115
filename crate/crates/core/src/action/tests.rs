use super::*;
use crate::word::parse_word;
use proptest::prelude::*;

fn g(sys: &AutomatonSystem, s: &str) -> GroupElement {
    sys.parse_element(s).unwrap()
}

/// Applies a generator word letter by letter from the raw tables, without
/// any of the library's reduction or restriction bookkeeping.
fn brute_image(table: &[(&str, [(usize, &str); 2])], word: &str, w: &[usize]) -> Vec<usize> {
    let mut out = w.to_vec();
    for gen in word.chars().rev() {
        out = brute_gen(table, &gen.to_string(), &out);
    }
    out
}

fn brute_gen(table: &[(&str, [(usize, &str); 2])], gen: &str, w: &[usize]) -> Vec<usize> {
    if w.is_empty() || gen == "e" {
        return w.to_vec();
    }
    let row = &table.iter().find(|(n, _)| *n == gen).unwrap().1;
    let (y, r) = row[w[0]];
    let mut out = vec![y];
    out.extend(brute_image(table, r, &w[1..]));
    out
}

const GRIG: &[(&str, [(usize, &str); 2])] = &[
    ("a", [(1, ""), (0, "")]),
    ("b", [(0, "a"), (1, "c")]),
    ("c", [(0, "a"), (1, "d")]),
    ("d", [(0, ""), (1, "b")]),
];

fn all_words(n: usize) -> Vec<Vec<usize>> {
    (0..1usize << n).map(|m| (0..n).map(|i| (m >> (n - 1 - i)) & 1).collect()).collect()
}

#[test]
fn grigorchuk_letter_actions() {
    let sys = grigorchuk();
    assert_eq!(sys.act_letter(&g(&sys, "a"), 0).unwrap(), (1, g(&sys, "e")));
    assert_eq!(sys.act_letter(&g(&sys, "e"), 1).unwrap(), (1, g(&sys, "e")));
    assert_eq!(sys.act_letter(&g(&sys, "b"), 1).unwrap(), (1, g(&sys, "c")));
    assert!(matches!(
        sys.act_letter(&g(&sys, "b"), 2),
        Err(Error::InvalidLetter { letter: 2, size: 2 })
    ));
}

#[test]
fn grigorchuk_word_actions() {
    let sys = grigorchuk();
    let w = parse_word("111110").unwrap();
    let (img, r) = act_word(&sys, &g(&sys, "b"), &w).unwrap();
    assert_eq!(img, w);
    assert!(sys.is_identity(&r).unwrap());
    let (img, r) = act_word(&sys, &g(&sys, "a"), &[0, 1]).unwrap();
    assert_eq!(img, vec![1, 1]);
    assert!(r.is_empty());
    let (img, r) = act_word(&sys, &g(&sys, "bcd"), &[]).unwrap();
    assert!(img.is_empty());
    assert_eq!(r, g(&sys, "bcd"));
}

#[test]
fn grigorchuk_equalities() {
    let sys = grigorchuk();
    assert!(sys.equal(&g(&sys, "bc"), &g(&sys, "d")).unwrap());
    assert!(sys.equal(&g(&sys, "aa"), &g(&sys, "e")).unwrap());
    assert!(!sys.equal(&g(&sys, "b"), &g(&sys, "c")).unwrap());
    // Brute force: b and c first differ on 100.
    let differ: Vec<_> = (1..=3)
        .flat_map(all_words)
        .filter(|w| brute_image(GRIG, "b", w) != brute_image(GRIG, "c", w))
        .collect();
    assert_eq!(differ.first().unwrap(), &vec![1, 0, 0]);
}

#[test]
fn generators_are_involutions() {
    let sys = grigorchuk();
    for i in 0..4 {
        assert!(sys.is_involution(i));
    }
    assert_eq!(g(&sys, "a^-1"), g(&sys, "a"));
    let odo = odometer2();
    assert!(!odo.is_involution(0));
    assert_eq!(odo.format_elem(&odo.inv(&g(&odo, "t"))), "t^-1");
    assert_eq!(g(&sys, "a^2"), g(&sys, "e"));
    assert!(sys.equal(&g(&sys, "b^3c"), &g(&sys, "d")).unwrap());
    assert_eq!(odo.format_elem(&g(&odo, "t^-2")), odo.format_elem(&odo.inv(&g(&odo, "t^2"))));
    assert!(sys.parse_element("a^x").is_err());
}

#[test]
fn nuclei() {
    let sys = grigorchuk();
    let names: Vec<String> = sys.nucleus().unwrap().elements().iter().map(|x| sys.format_elem(x)).collect();
    assert_eq!(names, ["e", "a", "b", "c", "d"]);
    let odo = odometer2();
    let names: Vec<String> = odo.nucleus().unwrap().elements().iter().map(|x| odo.format_elem(x)).collect();
    assert_eq!(names, ["e", "t", "t^-1"]);
    let trivial = AutomatonSystem::new(
        "trivial",
        2,
        vec![GeneratorSpec::new("s", &[(0, &[]), (1, &[])])],
        vec![],
    )
    .unwrap();
    assert_eq!(trivial.nucleus().unwrap().len(), 1);
}

#[test]
fn odometer_nucleus_table_by_hand() {
    // t·0 = 1 (e), t·1 = 0 (t); t^-1·0 = 1 (t^-1), t^-1·1 = 0 (e).
    let odo = odometer2();
    let n = odo.nucleus().unwrap();
    assert_eq!(n.transition(1, 0), (1, 0));
    assert_eq!(n.transition(1, 1), (0, 1));
    assert_eq!(n.transition(2, 0), (1, 2));
    assert_eq!(n.transition(2, 1), (0, 0));
}

#[test]
fn infinite_words() {
    let sys = grigorchuk();
    let ones = EventuallyPeriodic::constant(1);
    assert_eq!(act_infinite(&sys, &g(&sys, "b"), &ones).unwrap(), ones);
    let w = EventuallyPeriodic::parse("01(10)").unwrap();
    assert_eq!(act_infinite(&sys, &g(&sys, "e"), &w).unwrap(), w);
    let odo = odometer2();
    let img = act_infinite(&odo, &g(&odo, "t"), &ones).unwrap();
    assert_eq!(img, EventuallyPeriodic::constant(0));
}

#[test]
fn infinite_action_matches_unrolled_prefix() {
    let sys = grigorchuk();
    for word in ["b", "cab", "dacab"] {
        for w in ["(1)", "0(1)", "1(01)", "110(0)"] {
            let x = EventuallyPeriodic::parse(w).unwrap();
            let img = act_infinite(&sys, &g(&sys, word), &x).unwrap();
            assert_eq!(img.prefix(50), brute_image(GRIG, word, &x.prefix(50)), "{word} on {w}");
        }
    }
    let odo = odometer2();
    let img = act_infinite(&odo, &g(&odo, "t"), &EventuallyPeriodic::constant(1)).unwrap();
    assert!(img.prefix(50).iter().all(|&x| x == 0));
}

#[test]
fn fixed_predicates() {
    let sys = grigorchuk();
    assert!(is_strongly_fixed(&sys, &g(&sys, "d"), &[0]).unwrap());
    assert!(!is_strongly_fixed(&sys, &g(&sys, "b"), &[1]).unwrap());
    assert!(is_fixed(&sys, &g(&sys, "b"), &[1]).unwrap());
    for w in all_words(4) {
        assert!(is_fixed(&sys, &g(&sys, "e"), &w).unwrap());
    }
}

#[test]
fn msfw_examples() {
    let sys = grigorchuk();
    let d = enumerate_msfw(&sys, &g(&sys, "d"), 7).unwrap();
    assert_eq!(d, vec![parse_word("0").unwrap(), parse_word("1110").unwrap(), parse_word("1111110").unwrap()]);
    assert!(enumerate_msfw(&sys, &g(&sys, "a"), 12).unwrap().is_empty());
    let b = enumerate_msfw(&sys, &g(&sys, "b"), 9).unwrap();
    let expected: Vec<_> = [2, 5, 8].iter().map(|&k| [vec![1; k], vec![0]].concat()).collect();
    assert_eq!(b, expected);
    assert!(matches!(
        enumerate_msfw(&sys, &g(&sys, "bb"), 3),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn a_fixes_no_nonempty_word_by_brute_force() {
    for n in 1..=8 {
        for w in all_words(n) {
            assert_ne!(brute_image(GRIG, "a", &w), w);
        }
    }
}

#[test]
fn msfw_families_for_bcd() {
    let sys = grigorchuk();
    for (name, r) in [("b", 2), ("c", 1), ("d", 0)] {
        for n in 0..=4 {
            let got = enumerate_msfw(&sys, &g(&sys, name), 3 * n + 3).unwrap();
            let want: Vec<_> = (0..=n)
                .map(|i| 3 * i + r)
                .filter(|&k| k + 1 <= 3 * n + 3)
                .map(|k| [vec![1; k], vec![0]].concat())
                .collect();
            assert_eq!(got, want, "{name} n={n}");
        }
    }
}

#[test]
fn hausdorff_verdicts() {
    let sys = grigorchuk();
    let nuc = sys.nucleus().unwrap().elements().to_vec();
    match hausdorff_test(&sys, &nuc).unwrap() {
        HausdorffVerdict::NonHausdorff(w) => {
            assert_eq!(sys.format_elem(&w.element), "b");
            assert!(w.prefix.is_empty());
            assert_eq!(w.cycle, vec![1, 1, 1]);
            let states: Vec<_> = w.cycle_states.iter().map(|x| sys.format_elem(x)).collect();
            assert_eq!(states, ["b", "c", "d"]);
            assert_eq!(w.exit, vec![1, 1, 0]);
            for n in 0..5 {
                assert!(is_msfw(&sys, &w.element, &w.family_member(n)).unwrap());
            }
        }
        v => panic!("unexpected {v:?}"),
    }
    let odo = odometer2();
    let nuc = odo.nucleus().unwrap().elements().to_vec();
    assert_eq!(hausdorff_test(&odo, &nuc).unwrap(), HausdorffVerdict::Hausdorff);
    let t = g(&odo, "t");
    for n in 1..=8 {
        for w in all_words(n) {
            assert!(!is_fixed(&odo, &t, &w).unwrap());
        }
    }
    let trivial = AutomatonSystem::new("trivial", 2, vec![], vec![]).unwrap();
    let nuc = trivial.nucleus().unwrap().elements().to_vec();
    assert_eq!(hausdorff_test(&trivial, &nuc).unwrap(), HausdorffVerdict::Hausdorff);
}

#[test]
fn faithfulness() {
    let sys = grigorchuk();
    match faithfulness_probe(&sys, 3) {
        Faithfulness::Faithful { nucleus_size, relations } => {
            assert_eq!(nucleus_size, 5);
            assert!(relations.contains(&"bcd".to_string()));
        }
        v => panic!("unexpected {v:?}"),
    }
    let bad = AutomatonSystem::new(
        "bad",
        2,
        vec![
            GeneratorSpec::new("a", &[(1, &[]), (0, &[])]),
            GeneratorSpec::new("s", &[(0, &[]), (1, &[])]),
        ],
        vec![],
    )
    .unwrap();
    assert_eq!(
        faithfulness_probe(&bad, 3),
        Faithfulness::NotFaithful { generator: "s".into() }
    );
    let redundant = AutomatonSystem::new(
        "grig+",
        2,
        vec![
            GeneratorSpec::new("a", &[(1, &[]), (0, &[])]),
            GeneratorSpec::new("b", &[(0, &["a"]), (1, &["c"])]),
            GeneratorSpec::new("c", &[(0, &["a"]), (1, &["d"])]),
            GeneratorSpec::new("d", &[(0, &[]), (1, &["b"])]),
            GeneratorSpec::new("B", &[(0, &["a"]), (1, &["c"])]),
        ],
        vec![],
    )
    .unwrap();
    assert!(redundant.equal(&g(&redundant, "B"), &g(&redundant, "b")).unwrap());
    assert!(matches!(faithfulness_probe(&redundant, 2), Faithfulness::Faithful { .. }));
}

#[test]
fn omega_faithfulness() {
    let sys = grigorchuk();
    let fs = vec![g(&sys, "b"), g(&sys, "c"), g(&sys, "d")];
    let x = EventuallyPeriodic::constant(1);
    match omega_faithful_probe(&sys, &fs, &x, 8).unwrap() {
        OmegaFaithfulness::FailureWitness { cycle_start, cycle_len, .. } => {
            assert_eq!((cycle_start, cycle_len), (0, 3));
        }
        v => panic!("unexpected {v:?}"),
    }
    // Exhaustive check: at prefixes 1^m, m = 0..6, every word up to length 6
    // is fixed by one of the restrictions of b, c, d.
    for m in 0..=6 {
        let restricted: Vec<_> = ["b", "c", "d"]
            .iter()
            .map(|s| restrict(&sys, &g(&sys, s), &vec![1; m]).unwrap())
            .collect();
        for n in 1..=6 {
            for w in all_words(n) {
                assert!(restricted.iter().any(|h| is_fixed(&sys, h, &w).unwrap()));
            }
        }
    }
    assert!(matches!(
        omega_faithful_probe(&sys, &[g(&sys, "a")], &x, 4),
        Err(Error::Precondition(_))
    ));
    let odo = odometer2();
    assert!(matches!(
        omega_faithful_probe(&odo, &[g(&odo, "t")], &EventuallyPeriodic::constant(0), 4),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn omega_faithful_holds_for_a_single_element() {
    // d fixes 1^∞ without strongly fixing any prefix; its restrictions along
    // 1s are d, b, c, each of which moves 00 or 0.
    let sys = grigorchuk();
    let v = omega_faithful_probe(&sys, &[g(&sys, "d")], &EventuallyPeriodic::constant(1), 6).unwrap();
    assert_eq!(v, OmegaFaithfulness::HoldsAt(0));
}

#[test]
fn spec_files() {
    let json = r#"{"alphabet": 2, "generators": [
        {"name": "t", "table": [{"image": 1}, {"image": 0, "restriction": ["t"]}]}]}"#;
    let sys = parse_spec(json, SpecFormat::Json).unwrap();
    assert_eq!(sys.nucleus().unwrap().len(), 3);
    let toml = r#"
        name = "grig"
        alphabet = 2
        relations = ["bc=d"]
        [[generators]]
        name = "a"
        table = [{image = 1}, {image = 0}]
        [[generators]]
        name = "b"
        table = [{image = 0, restriction = "a"}, {image = 1, restriction = "c"}]
        [[generators]]
        name = "c"
        table = [{image = 0, restriction = "a"}, {image = 1, restriction = "d"}]
        [[generators]]
        name = "d"
        table = [{image = 0}, {image = 1, restriction = "b"}]
    "#;
    let sys = parse_spec(toml, SpecFormat::Toml).unwrap();
    assert_eq!(sys.nucleus().unwrap().len(), 5);
    assert!(matches!(parse_spec("{", SpecFormat::Json), Err(Error::Parse(_))));
    let bad = r#"{"alphabet": 2, "generators": [{"name": "t", "table": [{"image": 1}, {"image": 1}]}]}"#;
    assert!(matches!(parse_spec(bad, SpecFormat::Json), Err(Error::InvalidSystem(_))));
    let unknown = r#"{"alphabet": 2, "generators": [{"name": "t", "table": [{"image": 1}, {"image": 0, "restriction": ["u"]}]}]}"#;
    assert!(matches!(parse_spec(unknown, SpecFormat::Json), Err(Error::UnknownGenerator(_))));
}

fn grig_word() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 0..7)
        .prop_map(|v| v.into_iter().collect())
}

fn bin_word(max: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0usize..2, 0..max)
}

proptest! {
    #[test]
    fn cocycle_law(u in grig_word(), v in grig_word(), x in 0usize..2) {
        let sys = grigorchuk();
        let (gu, gv) = (g(&sys, &u), g(&sys, &v));
        let (y, r) = sys.act_letter(&sys.mul(&gu, &gv), x).unwrap();
        let (y1, r1) = sys.act_letter(&gv, x).unwrap();
        let (y2, r2) = sys.act_letter(&gu, y1).unwrap();
        prop_assert_eq!(y, y2);
        prop_assert!(sys.equal(&r, &sys.mul(&r2, &r1)).unwrap());
    }

    #[test]
    fn word_action_splits(u in grig_word(), a in bin_word(6), b in bin_word(6)) {
        let sys = grigorchuk();
        let gu = g(&sys, &u);
        let ab = [a.clone(), b.clone()].concat();
        let (img, r) = act_word(&sys, &gu, &ab).unwrap();
        prop_assert_eq!(img.len(), ab.len());
        let (ia, ra) = act_word(&sys, &gu, &a).unwrap();
        let (ib, rb) = act_word(&sys, &ra, &b).unwrap();
        prop_assert_eq!(img, [ia, ib].concat());
        prop_assert!(sys.equal(&r, &rb).unwrap());
    }

    #[test]
    fn equality_matches_brute_force(u in grig_word(), v in grig_word()) {
        let sys = grigorchuk();
        let eq = sys.equal(&g(&sys, &u), &g(&sys, &v)).unwrap();
        let brute = (0..=5).flat_map(all_words).all(|w| brute_image(GRIG, &u, &w) == brute_image(GRIG, &v, &w));
        // Elements of the Grigorchuk group are determined by their action on
        // level 5 only up to the stabilizer; equality implies agreement, and
        // for these short words the converse holds too.
        prop_assert_eq!(eq, brute);
        prop_assert_eq!(eq, sys.key(&g(&sys, &u)).unwrap() == sys.key(&g(&sys, &v)).unwrap());
    }

    #[test]
    fn msfw_lists_are_minimal_and_prefix_free(u in grig_word()) {
        let sys = grigorchuk();
        let gu = g(&sys, &u);
        prop_assume!(!sys.is_identity(&gu).unwrap());
        let ws = enumerate_msfw(&sys, &gu, 8).unwrap();
        for (i, w) in ws.iter().enumerate() {
            prop_assert!(is_strongly_fixed(&sys, &gu, w).unwrap());
            for k in 0..w.len() {
                prop_assert!(!is_strongly_fixed(&sys, &gu, &w[..k]).unwrap());
            }
            for v in &ws[i + 1..] {
                prop_assert!(!v.starts_with(w) && !w.starts_with(v));
                prop_assert!(w < v);
            }
        }
    }
}
