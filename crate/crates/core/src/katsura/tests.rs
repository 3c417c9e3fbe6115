use super::*;
use crate::action::{act_word, enumerate_msfw, is_msfw};
use proptest::prelude::*;

fn paper() -> KatsuraTriple {
    KatsuraTriple::paper().unwrap()
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Fixing decided on a long finite prefix: moved letter, zero restriction or
/// neither.
fn brute_kind(t: &KatsuraTriple, l: i64, x: &EventuallyPeriodic) -> FixedKind {
    let n = x.preperiod().len() + 80 * x.period().len();
    let mut m = big(l);
    for i in 0..n {
        if m.is_zero() {
            return FixedKind::TriviallyFixed;
        }
        let e = x.letter(i);
        let (y, r) = t.act_letter(&m, e).unwrap();
        if y != e {
            return FixedKind::NotFixed;
        }
        m = r;
    }
    FixedKind::Fixed
}

#[test]
fn paper_graph_shape() {
    let t = paper();
    assert_eq!(t.families().len(), 8);
    assert_eq!(t.alphabet_size(), 11);
    assert!(t.has_two_adic_shape());
    assert!(t.is_irreducible());
    assert_eq!(t.edge_name(0), "e11^0");
    assert_eq!(t.edge_by_name("e13").map(|e| t.family_of(e).b), Ok(0));
    verify_table_binding().unwrap();
}

#[test]
fn table_lines_reproduce() {
    let t = paper();
    for (x, y, q) in TABLE_LINES {
        let (img, r) = t.kats_act(&big(1), t.edge_by_name(x).unwrap()).unwrap();
        assert_eq!((t.edge_name(img), r), (y.to_string(), big(q)), "{x}");
    }
}

#[test]
fn invalid_matrices_rejected() {
    let bad = [
        (vec![vec![1, -1], vec![1, 1]], vec![vec![0, 0], vec![0, 0]]),
        (vec![vec![1, 0], vec![1, 1]], vec![vec![0, 3], vec![0, 0]]),
        (vec![vec![1, 1], vec![0, 0]], vec![vec![0, 0], vec![0, 0]]),
        (vec![vec![1, 1]], vec![vec![0]]),
    ];
    for (a, b) in bad {
        assert!(matches!(KatsuraTriple::new("bad", a, b), Err(Error::Katsura(_))));
    }
}

#[test]
fn reducible_matrix_is_not_minimal() {
    let t = KatsuraTriple::new("diag", vec![vec![2, 0], vec![0, 2]], vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert!(!t.is_irreducible());
}

#[test]
fn negative_and_large_actions() {
    let t = paper();
    let e0 = t.edge_by_name("e11^0").unwrap();
    let e1 = t.edge_by_name("e11^1").unwrap();
    // -1 + 0 = -1·2 + 1
    assert_eq!(t.kats_act(&big(-1), e0).unwrap(), (e1, big(-1)));
    // -1 + 1 = 0·2 + 0
    assert_eq!(t.kats_act(&big(-1), e1).unwrap(), (e0, big(0)));
    let e12 = t.edge_by_name("e12").unwrap();
    assert_eq!(t.kats_act(&big(-7), e12).unwrap(), (e12, big(-14)));
    let huge = BigInt::from(1u8) << 200;
    assert_eq!(t.kats_act(&huge, e12).unwrap().1, &huge * 2);
}

#[test]
fn infinite_actions() {
    let t = paper();
    let x = t.infinite_path("", "e23 e32").unwrap();
    assert_eq!(t.kats_act_infinite(&big(1), &x).unwrap(), x);
    let y = t.infinite_path("", "e11^0").unwrap();
    let img = t.kats_act_infinite(&big(1), &y).unwrap();
    assert_eq!(img, t.infinite_path("e11^1", "e11^0").unwrap());
    // -1 flips every loop letter forever.
    let img = t.kats_act_infinite(&big(-1), &y).unwrap();
    assert_eq!(img, t.infinite_path("", "e11^1").unwrap());
}

#[test]
fn lattice_reduction() {
    assert_eq!(kats_lattice_reduce(-7), Ok(LatticeClass::Odd));
    assert_eq!(kats_lattice_reduce(12), Ok(LatticeClass::Pow2(2)));
    assert_eq!(kats_lattice_reduce(-8), Ok(LatticeClass::Pow2(3)));
    assert!(kats_lattice_reduce(0).is_err());
}

#[test]
fn lattice_witnesses_separate_powers() {
    let t = paper();
    for n in 0..5usize {
        let x = t.lattice_witness(n).unwrap();
        assert!(t.kats_fixed(1 << (n + 1), &x).unwrap(), "n = {n}");
        assert!(!t.kats_fixed(1 << n, &x).unwrap(), "n = {n}");
        assert_eq!(brute_kind(&t, 1 << (n + 1), &x), FixedKind::TriviallyFixed);
        assert_eq!(brute_kind(&t, 1 << n, &x), FixedKind::NotFixed);
    }
}

#[test]
fn alpha_family_is_minimal_strongly_fixed() {
    let t = paper();
    for k in 1..=5 {
        let a = t.alpha_k(k).unwrap();
        assert_eq!(a.len(), 2 * k + 1);
        assert!(is_msfw(&t, &big(1), &a).unwrap(), "k = {k}");
        let (img, r) = act_word(&t, &big(1), &a).unwrap();
        assert_eq!((img, r), (a.clone(), big(0)));
    }
    let all = enumerate_msfw(&t, &big(1), 11).unwrap();
    for k in 1..=5 {
        assert!(all.contains(&t.alpha_k(k).unwrap()));
    }
    assert!(all.len() >= 5);
}

#[test]
fn condition_s_cases() {
    let t = paper();
    let cases: [(&[i64], &str, &str); 4] = [
        (&[1, -3], "k = n", "F_1 ∖ TF_1"),
        (&[1, 4], "0 < k < n", "F_1 ∖ TF_2^2"),
        (&[2, 4], "k = 0", "F_2^1 ∖ TF_2^2"),
        (&[-8], "k = 0", "F_2^3 ∖ TF_2^3"),
    ];
    for v in 0..3 {
        let samples = t.condition_s_samples(v, 60, 7).unwrap();
        let mut checker = ConditionSChecker::new(&t, v, samples).unwrap();
        for (ls, case, red) in cases {
            match checker.check(ls).unwrap() {
                ConditionS::Satisfied { case: c, reduction, .. } => {
                    assert_eq!((c.as_str(), reduction.as_str()), (case, red));
                }
                other => panic!("{ls:?} at {v}: {other:?}"),
            }
        }
        assert!(checker.check(&[]).is_err());
        assert!(checker.check(&[2, 2]).is_err());
        assert!(checker.check(&[0]).is_err());
    }
}

#[test]
fn condition_s_sees_the_difference() {
    let t = paper();
    let samples = t.condition_s_samples(0, 40, 1).unwrap();
    let mut checker = ConditionSChecker::new(&t, 0, samples).unwrap();
    match checker.check(&[2, 4]).unwrap() {
        ConditionS::Satisfied { in_difference, .. } => assert!(in_difference > 0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn subsets_count() {
    assert_eq!(ell_subsets(8, 3).len(), 16 + 120 + 560);
}

#[test]
fn spec_file_loading() {
    let dir = std::env::temp_dir().join(format!("kats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("k.json");
    std::fs::write(&json, r#"{"A": [[2,1,0],[1,2,1],[1,1,2]], "B": [[1,2,0],[2,1,2],[0,2,1]]}"#).unwrap();
    assert_eq!(KatsuraTriple::load(&json).unwrap().alphabet_size(), 11);
    let toml = dir.join("k.toml");
    std::fs::write(&toml, "A = [[2]]\nB = [[1]]\n").unwrap();
    assert_eq!(KatsuraTriple::load(&toml).unwrap().alphabet_size(), 2);
    std::fs::write(&json, r#"{"A": [[2]]}"#).unwrap();
    assert!(matches!(KatsuraTriple::load(&json), Err(Error::Parse(_))));
}

fn path_strategy() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 0usize..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cocycle_law(m in -1000i64..1000, m2 in -1000i64..1000, e in 0usize..11) {
        let t = paper();
        let (e2, q2) = t.act_letter(&big(m2), e).unwrap();
        let (e1, q1) = t.act_letter(&big(m), e2).unwrap();
        let (e12, q12) = t.act_letter(&big(m + m2), e).unwrap();
        prop_assert_eq!(e12, e1);
        prop_assert_eq!(q12, q1 + q2);
    }

    #[test]
    fn division_identity(m in -1000i64..1000, e in 0usize..11) {
        let t = paper();
        let f = t.family_of(e).clone();
        let n = (e - t.first_edge[t.edges[e].0]) as i64;
        let (y, q) = t.act_letter(&big(m), e).unwrap();
        let r = (y - t.first_edge[t.edges[e].0]) as i64;
        prop_assert!(0 <= r && r < f.count);
        prop_assert_eq!(big(m * f.b + n), q * f.count + r);
        prop_assert_eq!(t.family_of(y), &f);
    }

    #[test]
    fn two_adic_rule_matches_simulation((seed, v) in path_strategy(), l in -64i64..64) {
        prop_assume!(l != 0);
        let t = paper();
        for x in t.sample_paths(v, 3, seed).unwrap() {
            let fast = t.two_adic_kind(&big(l), &x).unwrap();
            prop_assert_eq!(fast, t.fixed_kind(&big(l), &x).unwrap());
            prop_assert_eq!(fast, brute_kind(&t, l, &x));
            let rep = kats_lattice_reduce(l).unwrap().representative();
            prop_assert_eq!(fast, t.two_adic_kind(&rep, &x).unwrap());
        }
    }

    #[test]
    fn infinite_action_matches_prefixes((seed, v) in path_strategy(), m in -40i64..40) {
        let t = paper();
        for x in t.sample_paths(v, 2, seed).unwrap() {
            let img = t.kats_act_infinite(&big(m), &x).unwrap();
            let n = x.preperiod().len() + 30 * x.period().len();
            let (w, _) = act_word(&t, &big(m), &x.prefix(n)).unwrap();
            prop_assert_eq!(img.prefix(n), w);
        }
    }
}

#[test]
fn block_decomposition() {
    let t = paper();
    let p = t.path("e11^0 e11^1 e21 e32 e33^0 e23").unwrap();
    let d = t.decompose(&p);
    assert_eq!(d.blocks.len(), 4);
    assert!(matches!(&d.blocks[0], PathBlock::Loops(w) if w.len() == 2));
    assert!(matches!(&d.blocks[1], PathBlock::NonLoops(w) if w.len() == 2));
    assert_eq!(d.concat(), p);
    assert!(t.decompose(&[]).blocks.is_empty());
}

#[test]
fn block_actions() {
    let t = paper();
    // k·2^{|w|} fixes a loop word w and leaves k.
    let w = t.path("e11^1 e11^0 e11^1").unwrap();
    for k in [-3i64, 0, 1, 5] {
        assert_eq!(t.kats_act_path(&big(k * 8), &w).unwrap(), (w.clone(), big(k)));
    }
    let v = t.path("e21 e32 e13").unwrap();
    assert_eq!(t.kats_act_path(&big(7), &v).unwrap(), (v.clone(), big(0)));
    let v = t.path("e12 e21 e32").unwrap();
    assert_eq!(t.kats_act_path(&big(-5), &v).unwrap(), (v.clone(), big(-40)));
    for e in 0..t.alphabet_size() {
        assert_eq!(t.kats_act(&big(0), e).unwrap(), (e, big(0)));
    }
    assert_eq!(t.kats_act(&big(1), t.edge_by_name("e13").unwrap()).unwrap().1, big(0));
}

#[test]
fn fixing_examples() {
    let t = paper();
    let x = t.infinite_path("", "e23 e32").unwrap();
    for l in [-5i64, 1, 2, 8, 96] {
        assert!(t.kats_fixed(l, &x).unwrap());
        assert!(!t.kats_trivially_fixed(l, &x).unwrap());
        assert_eq!(t.kats_act_infinite(&big(l), &x).unwrap(), x);
    }
    let y = t.infinite_path("e11^0 e21", "e12 e21").unwrap();
    for l in [1i64, 3, -7] {
        assert!(!t.kats_fixed(l, &y).unwrap());
    }
    assert!(t.kats_fixed(2, &y).unwrap());
    assert_eq!(kats_lattice_reduce(5), Ok(LatticeClass::Odd));
    assert_eq!(kats_lattice_reduce(1), Ok(LatticeClass::Odd));
    assert!(t.kats_fixed(0, &x).is_err());
}

#[test]
fn condition_s_listed_sets() {
    let t = paper();
    let expect: [(&[i64], &str, &str); 3] = [
        (&[1, 3], "k = n", "F_1 ∖ TF_1"),
        (&[2, 4], "k = 0", "F_2^1 ∖ TF_2^2"),
        (&[1, 2], "0 < k < n", "F_1 ∖ TF_2^1"),
    ];
    for (ls, case, red) in expect {
        match kats_condition_s(&t, ls, 0, 30, 3).unwrap() {
            ConditionS::Satisfied { case: c, reduction, .. } => assert_eq!((c.as_str(), reduction.as_str()), (case, red)),
            other => panic!("{other:?}"),
        }
    }
}
