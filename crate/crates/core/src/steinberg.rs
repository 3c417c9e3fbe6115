//! Steinberg algebra elements `Σ c_B 1_B` over basic bisections, their
//! convolution, pointwise values, region decomposition and the singular
//! support test.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::action::{parse_sys_word, SelfSimilar};
use crate::coeff::{Field, Scalar};
use crate::error::{Error, Result};
use crate::germs::{bis_mul, fmt_germ, germ_in, BasicBisection, Germ, PointSet, RegionGraph};
use crate::isg::{fmt_triple, triple_key, Triple, TripleKey};
use crate::word::Word;

/// A finite formal sum `Σ c_B 1_B`, keyed by normalized bisections; stored
/// coefficients are never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement<E, K: Ord> {
    field: Field,
    terms: BTreeMap<TripleKey<K>, (Triple<E>, Scalar)>,
}

impl<E: Clone, K: Ord + Clone> AlgebraElement<E, K> {
    pub fn zero(field: Field) -> Self {
        AlgebraElement {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Formally zero (no stored terms).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in key order.
    pub fn terms(&self) -> impl Iterator<Item = (&Triple<E>, &Scalar)> {
        self.terms.values().map(|(t, c)| (t, c))
    }

    /// Adds `c · 1_B`.
    pub fn add_term<S>(&mut self, sys: &S, b: BasicBisection<E>, c: Scalar) -> Result<()>
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        if c.field() != self.field {
            return Err(Error::FieldMismatch(c.field().to_string(), self.field.to_string()));
        }
        let key = triple_key(sys, &b)?;
        let sum = match self.terms.get(&key) {
            Some((_, old)) => old.add(&c)?,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, (b, sum));
        }
        Ok(())
    }

    /// `c · 1_B`.
    pub fn basis<S>(sys: &S, b: BasicBisection<E>, c: Scalar) -> Result<Self>
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        let mut f = Self::zero(c.field());
        f.add_term(sys, b, c)?;
        Ok(f)
    }

    pub fn from_terms<S>(sys: &S, field: Field, terms: impl IntoIterator<Item = (BasicBisection<E>, Scalar)>) -> Result<Self>
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        let mut f = Self::zero(field);
        for (b, c) in terms {
            f.add_term(sys, b, c)?;
        }
        Ok(f)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, (t, c)) in &other.terms {
            let sum = match out.terms.get(k) {
                Some((_, old)) => old.add(c)?,
                None => c.clone(),
            };
            if sum.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(k.clone(), (t.clone(), sum));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        if c.field() != self.field {
            return Err(Error::FieldMismatch(c.field().to_string(), self.field.to_string()));
        }
        let mut out = Self::zero(self.field);
        for (k, (t, a)) in &self.terms {
            let v = a.mul(c)?;
            if !v.is_zero() {
                out.terms.insert(k.clone(), (t.clone(), v));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.field.from_i64(-1))?)
    }

    /// `f * g`, the bilinear extension of `1_B * 1_D = 1_{BD}`.
    pub fn convolve<S>(&self, sys: &S, other: &Self) -> Result<Self>
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        self.check(other)?;
        let mut out = Self::zero(self.field);
        for (b, c) in self.terms() {
            for (d, e) in other.terms() {
                if let Some(bd) = bis_mul(sys, b, d)? {
                    out.add_term(sys, bd, c.mul(e)?)?;
                }
            }
        }
        Ok(out)
    }

    /// `f(γ) = Σ { c_B : γ ∈ B }`.
    pub fn evaluate<S>(&self, sys: &S, g: &Germ<E>) -> Result<Scalar>
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        let mut acc = self.field.zero();
        for (b, c) in self.terms() {
            if germ_in(sys, g, b)? {
                acc = acc.add(c)?;
            }
        }
        Ok(acc)
    }

    /// JSON list of `{alpha, g, beta, coefficient}`.
    pub fn to_json<S>(&self, sys: &S) -> Value
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        Value::Array(
            self.terms()
                .map(|(t, c)| {
                    json!({
                        "alpha": sys.format_word(&t.alpha),
                        "g": sys.format_elem(&t.g),
                        "beta": sys.format_word(&t.beta),
                        "coefficient": c.to_string(),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json<S>(sys: &S, field: Field, v: &Value) -> Result<Self>
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Parse("algebra element must be a JSON list".into()))?;
        let mut f = Self::zero(field);
        for item in items {
            let get = |name: &str| -> Result<String> {
                match item.get(name) {
                    Some(Value::String(s)) => Ok(s.clone()),
                    Some(Value::Number(n)) => Ok(n.to_string()),
                    _ => Err(Error::Parse(format!("term is missing `{name}`"))),
                }
            };
            let t = Triple::new(
                sys,
                parse_sys_word(sys, &get("alpha")?)?,
                sys.parse_elem(&get("g")?)?,
                parse_sys_word(sys, &get("beta")?)?,
            )?;
            f.add_term(sys, t, field.parse_scalar(&get("coefficient")?)?)?;
        }
        Ok(f)
    }

    pub fn format<S>(&self, sys: &S) -> String
    where
        S: SelfSimilar<Elem = E, Key = K> + ?Sized,
    {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms()
            .map(|(t, c)| format!("{c}·1{}", fmt_triple(sys, t)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// One set `M_J = ∩_{j∈J} B_j ∖ ∪_{i∉J} B_i` of the decomposition, described
/// through the germs `[B_{min J}; v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region<E> {
    /// Indices of the bisections containing the region.
    pub members: Vec<usize>,
    /// Indices of the bisections excluded from it.
    pub excluded: Vec<usize>,
    /// `B_{min J}`; every germ of the region is `[base; v]` for a source `v`.
    pub base: Triple<E>,
    pub value: Scalar,
    /// A source cylinder `C(μ)` with `Θ(base, C(μ)) ⊆ M_J`, if the region
    /// has nonempty interior.
    pub interior: Option<Word>,
    /// Sources of the region's germs.
    pub points: PointSet,
}

/// `f = Σ_J c_J 1_{M_J}` over the nonempty regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionDecomposition<E> {
    pub sets: Vec<Triple<E>>,
    pub regions: Vec<Region<E>>,
}

/// Largest number of terms accepted by [`disjointify`] (at most `2^16` regions).
pub const MAX_DISJOINTIFY_TERMS: usize = 16;

/// Splits the support of `f` into the regions `M_J`.
pub fn disjointify<S: SelfSimilar + ?Sized>(
    sys: &S,
    f: &AlgebraElement<S::Elem, S::Key>,
) -> Result<RegionDecomposition<S::Elem>> {
    let sets: Vec<Triple<S::Elem>> = f.terms().map(|(t, _)| t.clone()).collect();
    let coeffs: Vec<Scalar> = f.terms().map(|(_, c)| c.clone()).collect();
    let n = sets.len();
    if n > MAX_DISJOINTIFY_TERMS {
        return Err(Error::undecided("regions (2^terms)", 1 << MAX_DISJOINTIFY_TERMS));
    }
    let mut regions = Vec::new();
    for j0 in 0..n {
        let graph = RegionGraph::build(sys, &sets[j0], &sets[j0].beta, &sets)?;
        let rest: Vec<usize> = (j0 + 1..n).collect();
        for mask in 0u32..(1 << rest.len()) {
            let mut members = vec![j0];
            members.extend(rest.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i));
            let inside = |i: usize| members.contains(&i);
            let points = graph.points(
                |s| (0..n).all(|i| inside(i) || !s[i].is_covered()),
                |s| members.iter().all(|&i| s[i].is_covered()),
            );
            if points == PointSet::Empty {
                continue;
            }
            let interior = graph
                .find_node(|s| (0..n).all(|i| if inside(i) { s[i].is_covered() } else { s[i].is_dead() }))
                .map(|v| graph.word_to(v));
            let mut value = f.field().zero();
            for &i in &members {
                value = value.add(&coeffs[i])?;
            }
            regions.push(Region {
                excluded: (0..n).filter(|&i| !inside(i)).collect(),
                members,
                base: sets[j0].clone(),
                value,
                interior,
                points,
            });
        }
    }
    Ok(RegionDecomposition { sets, regions })
}

/// Verdict of [`singular_test`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportVerdict<E> {
    /// `f` vanishes at every germ.
    Zero,
    /// A region with nonzero value contains the open set `Θ(base, C(μ))`.
    NonsingularCertificate { region: Region<E>, value: Scalar },
    /// The support is nonempty with empty interior; lists its germs when
    /// there are finitely many.
    Singular { points: Option<Vec<Germ<E>>> },
    Undecided { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport<E> {
    pub verdict: SupportVerdict<E>,
    pub trace: Vec<String>,
}

/// Decides whether `supp(f)` has empty interior. Each region `M_J` is open
/// intersected with closed, so the support has empty interior exactly when
/// every region with nonzero value does.
pub fn singular_test<S: SelfSimilar + ?Sized>(
    sys: &S,
    f: &AlgebraElement<S::Elem, S::Key>,
) -> Result<SupportReport<S::Elem>> {
    let mut trace = Vec::new();
    if f.is_zero() {
        trace.push("no terms".to_string());
        return Ok(SupportReport {
            verdict: SupportVerdict::Zero,
            trace,
        });
    }
    let dec = match disjointify(sys, f) {
        Ok(d) => d,
        Err(e) if e.is_bound() => {
            return Ok(SupportReport {
                verdict: SupportVerdict::Undecided { reason: e.to_string() },
                trace,
            })
        }
        Err(e) => return Err(e),
    };
    let mut points = Some(Vec::new());
    let mut nonzero = 0;
    for r in &dec.regions {
        trace.push(format!(
            "region J = {:?}: value {}, {}",
            r.members,
            r.value,
            match &r.interior {
                Some(mu) => format!("contains the cylinder over {}", sys.format_word(mu)),
                None => "empty interior".to_string(),
            }
        ));
        if r.value.is_zero() {
            continue;
        }
        nonzero += 1;
        if r.interior.is_some() {
            return Ok(SupportReport {
                verdict: SupportVerdict::NonsingularCertificate {
                    value: r.value.clone(),
                    region: r.clone(),
                },
                trace,
            });
        }
        match (&r.points, &mut points) {
            (PointSet::Finite(ws), Some(acc)) => {
                for w in ws {
                    acc.push(Germ {
                        triple: r.base.clone(),
                        word: w.clone(),
                    });
                }
            }
            _ => points = None,
        }
    }
    let verdict = if nonzero == 0 {
        trace.push("every region with nonzero value is empty".to_string());
        SupportVerdict::Zero
    } else {
        if let Some(ps) = &points {
            trace.push(format!(
                "support = {{{}}}",
                ps.iter().map(|g| fmt_germ(sys, g)).collect::<Vec<_>>().join(", ")
            ));
        }
        SupportVerdict::Singular { points }
    };
    Ok(SupportReport { verdict, trace })
}

/// Points of a region as germs.
pub fn region_germs<E: Clone>(r: &Region<E>) -> Option<Vec<Germ<E>>> {
    match &r.points {
        PointSet::Finite(ws) => Some(
            ws.iter()
                .map(|w| Germ {
                    triple: r.base.clone(),
                    word: w.clone(),
                })
                .collect(),
        ),
        PointSet::Empty => Some(Vec::new()),
        PointSet::Infinite => None,
    }
}
