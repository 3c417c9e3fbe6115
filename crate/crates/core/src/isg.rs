//! The inverse semigroup of triples `(α, g, β)` with zero, acting on
//! cylinders by `θ_{(α,g,β)}(βw) = α(g·w)`.

use std::fmt;

use crate::action::{act_infinite, act_word, check_word, SelfSimilar};
use crate::error::{Error, Result};
use crate::word::{EventuallyPeriodic, Word};

/// A nonzero triple `(α, g, β)`. The zero element is `None` in
/// [`TripleElement`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple<E> {
    pub alpha: Word,
    pub g: E,
    pub beta: Word,
}

/// `None` is the zero of the semigroup.
pub type TripleElement<E> = Option<Triple<E>>;

/// Hashable canonical form of a triple: words plus the element's key.
pub type TripleKey<K> = (Word, K, Word);

impl<E> Triple<E> {
    /// Builds a triple, checking letters, the path convention and (for
    /// graphs) that `α` and `β` end at the same vertex.
    pub fn new<S>(sys: &S, alpha: Word, g: E, beta: Word) -> Result<Self>
    where
        S: SelfSimilar<Elem = E> + ?Sized,
    {
        check_word(sys, &alpha)?;
        check_word(sys, &beta)?;
        if let (Some(&a), Some(&b)) = (alpha.last(), beta.last()) {
            if sys.source(a) != sys.source(b) {
                return Err(Error::InvalidWord(format!(
                    "{} and {} end at different vertices",
                    sys.format_word(&alpha),
                    sys.format_word(&beta)
                )));
            }
        }
        Ok(Triple { alpha, g, beta })
    }
}

pub fn triple_key<S: SelfSimilar + ?Sized>(sys: &S, t: &Triple<S::Elem>) -> Result<TripleKey<S::Key>> {
    Ok((t.alpha.clone(), sys.key(&t.g)?, t.beta.clone()))
}

/// Words equal and group elements equal as automorphisms.
pub fn triple_eq<S: SelfSimilar + ?Sized>(sys: &S, s: &TripleElement<S::Elem>, t: &TripleElement<S::Elem>) -> Result<bool> {
    match (s, t) {
        (None, None) => Ok(true),
        (Some(s), Some(t)) => Ok(s.alpha == t.alpha && s.beta == t.beta && sys.equal(&s.g, &t.g)?),
        _ => Ok(false),
    }
}

/// Product in the inverse semigroup.
pub fn isg_mul<S: SelfSimilar + ?Sized>(
    sys: &S,
    s: &TripleElement<S::Elem>,
    t: &TripleElement<S::Elem>,
) -> Result<TripleElement<S::Elem>> {
    let (Some(s), Some(t)) = (s, t) else {
        return Ok(None);
    };
    if let Some(eps) = t.alpha.strip_prefix(s.beta.as_slice()) {
        // γ = βε: (α(g·ε), g|_ε h, δ)
        let (img, r) = act_word(sys, &s.g, eps)?;
        let mut alpha = s.alpha.clone();
        alpha.extend(img);
        return Ok(Some(Triple {
            alpha,
            g: sys.mul(&r, &t.g),
            beta: t.beta.clone(),
        }));
    }
    if let Some(eps) = s.beta.strip_prefix(t.alpha.as_slice()) {
        // β = γε: (α, g (h⁻¹|_ε)⁻¹, δ(h⁻¹·ε))
        let hinv = sys.inv(&t.g);
        let (img, r) = act_word(sys, &hinv, eps)?;
        let mut beta = t.beta.clone();
        beta.extend(img);
        return Ok(Some(Triple {
            alpha: s.alpha.clone(),
            g: sys.mul(&s.g, &sys.inv(&r)),
            beta,
        }));
    }
    Ok(None)
}

pub fn isg_star<S: SelfSimilar + ?Sized>(sys: &S, s: &TripleElement<S::Elem>) -> TripleElement<S::Elem> {
    s.as_ref().map(|s| Triple {
        alpha: s.beta.clone(),
        g: sys.inv(&s.g),
        beta: s.alpha.clone(),
    })
}

/// `s ≤ t` iff `t s* s = s`.
pub fn isg_leq<S: SelfSimilar + ?Sized>(sys: &S, s: &TripleElement<S::Elem>, t: &TripleElement<S::Elem>) -> Result<bool> {
    let ss = isg_mul(sys, &isg_star(sys, s), s)?;
    triple_eq(sys, &isg_mul(sys, t, &ss)?, s)
}

pub fn is_idempotent<S: SelfSimilar + ?Sized>(sys: &S, s: &TripleElement<S::Elem>) -> Result<bool> {
    match s {
        None => Ok(true),
        Some(s) => Ok(s.alpha == s.beta && sys.is_identity(&s.g)?),
    }
}

/// `θ_{(α,g,β)}(βw) = α(g·w)`.
pub fn theta_apply<S: SelfSimilar + ?Sized>(
    sys: &S,
    s: &Triple<S::Elem>,
    w: &EventuallyPeriodic,
) -> Result<EventuallyPeriodic> {
    if !w.starts_with(&s.beta) {
        return Err(Error::InvalidArgument(format!(
            "{w} is not in the domain cylinder of {}",
            fmt_triple(sys, s)
        )));
    }
    Ok(act_infinite(sys, &s.g, &w.drop_prefix(s.beta.len()))?.prepend(&s.alpha))
}

/// `(α, g, β)` with words written as by the system.
pub fn fmt_triple<S: SelfSimilar + ?Sized>(sys: &S, t: &Triple<S::Elem>) -> String {
    format!(
        "({}, {}, {})",
        sys.format_word(&t.alpha),
        sys.format_elem(&t.g),
        sys.format_word(&t.beta)
    )
}

impl<E: fmt::Debug> fmt::Display for Triple<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {:?}, {})",
            crate::word::format_word(&self.alpha),
            self.g,
            crate::word::format_word(&self.beta)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{grigorchuk, AutomatonSystem, GroupElement};
    use crate::word::parse_word;
    use proptest::prelude::*;

    fn t(sys: &AutomatonSystem, a: &str, g: &str, b: &str) -> TripleElement<GroupElement> {
        Some(Triple::new(sys, parse_word(a).unwrap(), sys.parse_element(g).unwrap(), parse_word(b).unwrap()).unwrap())
    }

    #[test]
    fn multiplication_examples() {
        let sys = grigorchuk();
        let s = t(&sys, "01", "bc", "10");
        let u = t(&sys, "10", "a", "1");
        assert!(triple_eq(&sys, &isg_mul(&sys, &s, &u).unwrap(), &t(&sys, "01", "bca", "1")).unwrap());
        // θ_t maps 1w to 01w and θ_s strips the 0.
        assert_eq!(isg_mul(&sys, &t(&sys, "", "e", "0"), &t(&sys, "01", "e", "1")).unwrap(), t(&sys, "1", "e", "1"));
        assert_eq!(isg_mul(&sys, &t(&sys, "0", "e", "0"), &t(&sys, "1", "e", "1")).unwrap(), None);
        assert_eq!(isg_mul(&sys, &None, &s).unwrap(), None);
    }

    #[test]
    fn star_and_order() {
        let sys = grigorchuk();
        let s = t(&sys, "0", "b", "11");
        assert_eq!(isg_star(&sys, &s), t(&sys, "11", "b", "0"));
        assert_eq!(isg_star(&sys, &None::<Triple<GroupElement>>), None);
        assert_eq!(isg_star(&sys, &isg_star(&sys, &s)), s);
        assert!(isg_leq(&sys, &t(&sys, "0", "e", "0"), &t(&sys, "", "e", "")).unwrap());
        assert!(isg_leq(&sys, &s, &s).unwrap());
        assert!(isg_leq(&sys, &t(&sys, "110", "e", "110"), &t(&sys, "", "b", "")).unwrap());
        assert!(!isg_leq(&sys, &t(&sys, "11", "e", "11"), &t(&sys, "", "b", "")).unwrap());
    }

    #[test]
    fn theta_examples() {
        let sys = grigorchuk();
        let ones = EventuallyPeriodic::constant(1);
        let b = t(&sys, "", "b", "").unwrap();
        assert_eq!(theta_apply(&sys, &b, &ones).unwrap(), ones);
        let w = EventuallyPeriodic::parse("01(10)").unwrap();
        let shift = t(&sys, "1", "e", "01").unwrap();
        assert_eq!(theta_apply(&sys, &shift, &w).unwrap(), EventuallyPeriodic::parse("1(10)").unwrap());
        let s = t(&sys, "0", "a", "1").unwrap();
        let x = EventuallyPeriodic::parse("1(0)").unwrap();
        assert_eq!(theta_apply(&sys, &s, &x).unwrap(), EventuallyPeriodic::parse("01(0)").unwrap());
        assert!(theta_apply(&sys, &s, &EventuallyPeriodic::constant(0)).is_err());
    }

    fn arb_triple() -> impl Strategy<Value = (Vec<usize>, String, Vec<usize>)> {
        (
            proptest::collection::vec(0usize..2, 0..4),
            proptest::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 0..5)
                .prop_map(|v| v.into_iter().collect::<String>()),
            proptest::collection::vec(0usize..2, 0..4),
        )
    }

    fn mk(sys: &AutomatonSystem, (a, g, b): &(Vec<usize>, String, Vec<usize>)) -> TripleElement<GroupElement> {
        Some(Triple::new(sys, a.clone(), sys.parse_element(g).unwrap(), b.clone()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn inverse_semigroup_laws(x in arb_triple()) {
            let sys = grigorchuk();
            let s = mk(&sys, &x);
            let st = isg_star(&sys, &s);
            let sss = isg_mul(&sys, &isg_mul(&sys, &s, &st).unwrap(), &s).unwrap();
            prop_assert!(triple_eq(&sys, &sss, &s).unwrap());
            let tst = isg_mul(&sys, &isg_mul(&sys, &st, &s).unwrap(), &st).unwrap();
            prop_assert!(triple_eq(&sys, &tst, &st).unwrap());
            prop_assert!(is_idempotent(&sys, &isg_mul(&sys, &st, &s).unwrap()).unwrap());
        }

        #[test]
        fn star_reverses_products(x in arb_triple(), y in arb_triple()) {
            let sys = grigorchuk();
            let (s, u) = (mk(&sys, &x), mk(&sys, &y));
            let lhs = isg_star(&sys, &isg_mul(&sys, &s, &u).unwrap());
            let rhs = isg_mul(&sys, &isg_star(&sys, &u), &isg_star(&sys, &s)).unwrap();
            prop_assert!(triple_eq(&sys, &lhs, &rhs).unwrap());
        }

        #[test]
        fn multiplication_is_associative(x in arb_triple(), y in arb_triple(), z in arb_triple()) {
            let sys = grigorchuk();
            let (s, u, v) = (mk(&sys, &x), mk(&sys, &y), mk(&sys, &z));
            let l = isg_mul(&sys, &isg_mul(&sys, &s, &u).unwrap(), &v).unwrap();
            let r = isg_mul(&sys, &s, &isg_mul(&sys, &u, &v).unwrap()).unwrap();
            prop_assert!(triple_eq(&sys, &l, &r).unwrap());
        }

        #[test]
        fn idempotents_are_diagonal_identities(x in arb_triple()) {
            // Faithful action: (α, g, α) is idempotent iff g = 1.
            let sys = grigorchuk();
            let s = mk(&sys, &x);
            let e = isg_mul(&sys, &s, &s).unwrap();
            let idem = triple_eq(&sys, &e, &s).unwrap();
            let t = s.unwrap();
            prop_assert_eq!(idem, t.alpha == t.beta && sys.is_identity(&t.g).unwrap());
        }

        #[test]
        fn theta_is_an_action(
            x in arb_triple(),
            y in arb_triple(),
            tail in proptest::collection::vec(0usize..2, 0..3),
            per in proptest::collection::vec(0usize..2, 1..3),
        ) {
            let sys = grigorchuk();
            let (s, u) = (mk(&sys, &x), mk(&sys, &y));
            let Some(su) = isg_mul(&sys, &s, &u).unwrap() else { return Ok(()); };
            let mut pre = su.beta.clone();
            pre.extend(tail);
            let w = EventuallyPeriodic::new(pre, per).unwrap();
            let direct = theta_apply(&sys, &su, &w).unwrap();
            let step = theta_apply(&sys, u.as_ref().unwrap(), &w).unwrap();
            let two = theta_apply(&sys, s.as_ref().unwrap(), &step).unwrap();
            prop_assert_eq!(direct, two);
        }
    }
}
