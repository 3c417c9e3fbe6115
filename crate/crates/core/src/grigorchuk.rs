//! Computations specific to the Grigorchuk group: the germs `z_g` over `1^∞`,
//! the bisections `U_{g,m}`, the six intersection identities, region values
//! of the nucleus family and the lower bound on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{enumerate_msfw, grigorchuk, restrict, AutomatonSystem, ElementKey, GroupElement, SelfSimilar};
use crate::coeff::{AbsValue, Field, Scalar};
use crate::error::{Error, Result};
use crate::germs::{germ_in, germ_in_closure, restrict_bisection, BasicBisection, Germ};
use crate::isg::Triple;
use crate::steinberg::AlgebraElement;
use crate::word::{EventuallyPeriodic, Word};

/// The nucleus elements that fix `1^∞`, in the order used for coefficient
/// vectors.
pub const FAMILY: [&str; 4] = ["e", "b", "c", "d"];

pub type GrigElement = AlgebraElement<GroupElement, ElementKey>;

/// Rejects systems whose generators do not act as the Grigorchuk generators.
pub fn ensure_grigorchuk(sys: &AutomatonSystem) -> Result<()> {
    let reference = grigorchuk();
    let same = sys.alphabet_size() == 2
        && sys.generator_names() == reference.generator_names()
        && reference.generator_names().iter().all(|name| {
            let (g, h) = (sys.generator(name), reference.generator(name));
            matches!((g, h), (Ok(g), Ok(h)) if (0..2).all(|x| {
                match (sys.act_letter(&g, x), reference.act_letter(&h, x)) {
                    (Ok((y1, r1)), Ok((y2, r2))) => y1 == y2 && sys.format_elem(&r1) == reference.format_elem(&r2),
                    _ => false,
                }
            }))
        });
    if same {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{} is not the Grigorchuk group", sys.name())))
    }
}

fn ones(n: usize) -> Word {
    vec![1; n]
}

/// `U_{g,m} = Θ((∅, g, ∅), C(1^m))`.
pub fn u_gm(sys: &AutomatonSystem, g: &GroupElement, m: usize) -> Result<BasicBisection<GroupElement>> {
    restrict_bisection(sys, &Triple::new(sys, vec![], g.clone(), vec![])?, &ones(m))
}

/// `U'_{g,m} = Θ((∅, g, ∅), C(1^m 0))`.
pub fn u_prime_gm(sys: &AutomatonSystem, g: &GroupElement, m: usize) -> Result<BasicBisection<GroupElement>> {
    let mut w = ones(m);
    w.push(0);
    restrict_bisection(sys, &Triple::new(sys, vec![], g.clone(), vec![])?, &w)
}

/// `z_g = [(∅, g, ∅); 1^∞]`.
pub fn z_germ(sys: &AutomatonSystem, g: &GroupElement) -> Result<Germ<GroupElement>> {
    Germ::new(sys, Triple::new(sys, vec![], g.clone(), vec![])?, EventuallyPeriodic::constant(1))
}

fn family_elems(sys: &AutomatonSystem) -> Result<Vec<GroupElement>> {
    FAMILY.iter().map(|g| sys.parse_element(g)).collect()
}

/// Whether the closure of a bisection meets `{z_e, z_b, z_c, z_d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZFamily {
    AllFour,
    None,
}

/// Checks closure membership of each of the four points; they must agree.
pub fn closure_ze_family(sys: &AutomatonSystem, b: &BasicBisection<GroupElement>) -> Result<ZFamily> {
    ensure_grigorchuk(sys)?;
    let mut hits = Vec::new();
    for g in family_elems(sys)? {
        hits.push(germ_in_closure(sys, &z_germ(sys, &g)?, b)?);
    }
    match (hits.iter().all(|&h| h), hits.iter().any(|&h| h)) {
        (true, _) => Ok(ZFamily::AllFour),
        (_, false) => Ok(ZFamily::None),
        _ => Err(Error::Precondition(format!("closure meets only part of the z-family: {hits:?}"))),
    }
}

/// For `B` whose closure contains the z-family: the `h ∈ {e,b,c,d}` and depth
/// `n` with `Θ(B, C(1^n)) = U_{h,n}`.
pub fn reduce_at_infinity(sys: &AutomatonSystem, b: &BasicBisection<GroupElement>) -> Result<(GroupElement, usize)> {
    if closure_ze_family(sys, b)? != ZFamily::AllFour {
        return Err(Error::Precondition("closure does not contain z_e".into()));
    }
    let k = b.beta.len();
    let family = family_elems(sys)?;
    for m in 0..=sys.bounds().depth.max(64) {
        let r = restrict(sys, &b.g, &ones(m))?;
        if !family.iter().any(|f| sys.equal(f, &r).unwrap_or(false)) {
            continue;
        }
        let n = k + m;
        for h in &family {
            if sys.equal(&restrict(sys, h, &ones(n))?, &r)? {
                return Ok((h.clone(), n));
            }
        }
    }
    Err(Error::undecided("contraction depth along 1^∞", sys.bounds().depth.max(64)))
}

/// `U_{g,m} ∩ U_{h,m} = ∪ { U'_{g,j} : j ≥ m, j ≡ residue (mod 3) }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairIdentity {
    pub g: &'static str,
    pub h: &'static str,
    pub residue: usize,
}

/// The six identities for pairs from `{e, b, c, d}`.
pub const PAIR_IDENTITIES: [PairIdentity; 6] = [
    PairIdentity { g: "b", h: "e", residue: 2 },
    PairIdentity { g: "c", h: "e", residue: 1 },
    PairIdentity { g: "d", h: "e", residue: 0 },
    PairIdentity { g: "c", h: "d", residue: 2 },
    PairIdentity { g: "b", h: "d", residue: 1 },
    PairIdentity { g: "c", h: "b", residue: 0 },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub identity: PairIdentity,
    pub m: usize,
    /// `g⁻¹h`, whose minimal strongly fixed words are `1^j 0` with
    /// `j ≡ residue`.
    pub relative: String,
    pub msfw_length: usize,
    pub msfw_matches: bool,
    pub samples: usize,
    pub counterexamples: Vec<String>,
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        self.msfw_matches && self.counterexamples.is_empty()
    }
}

fn random_word(rng: &mut ChaCha8Rng) -> EventuallyPeriodic {
    let pre: Word = (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..2)).collect();
    let per: Word = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..2)).collect();
    EventuallyPeriodic::new(pre, per).expect("nonempty period")
}

/// Sample germs near `1^∞`: sources `1^j 0 x` and `1^j x` on bases drawn from
/// the family and from `a`.
fn sample_germ(sys: &AutomatonSystem, rng: &mut ChaCha8Rng, bases: &[GroupElement], m: usize) -> Result<Germ<GroupElement>> {
    let g = bases[rng.gen_range(0..bases.len())].clone();
    let j = rng.gen_range(0..m + 10);
    let mut head = ones(j);
    if rng.gen_bool(0.85) {
        head.push(0);
    }
    let word = random_word(rng).prepend(&head);
    Germ::new(sys, Triple::new(sys, vec![], g, vec![])?, word)
}

/// Checks one identity at depth `m`: minimal strongly fixed words of `g⁻¹h`
/// up to a length bound, and two-sided membership on `samples` germs.
pub fn check_pair_identity(
    sys: &AutomatonSystem,
    id: PairIdentity,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<PairCheck> {
    ensure_grigorchuk(sys)?;
    let g = sys.parse_element(id.g)?;
    let h = sys.parse_element(id.h)?;
    let rel = sys.mul(&sys.inv(&g), &h);
    let msfw_length = m + 12;
    let found = enumerate_msfw(sys, &rel, msfw_length)?;
    let expected: Vec<Word> = (0..msfw_length)
        .filter(|j| j % 3 == id.residue)
        .map(|j| {
            let mut w = ones(j);
            w.push(0);
            w
        })
        .collect();
    let mut sorted = found.clone();
    sorted.sort();
    let mut exp_sorted = expected;
    exp_sorted.sort();
    let ug = u_gm(sys, &g, m)?;
    let uh = u_gm(sys, &h, m)?;
    let a = sys.parse_element("a")?;
    let bases = [g.clone(), h.clone(), sys.identity(), a];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexamples = Vec::new();
    for _ in 0..samples {
        let germ = sample_germ(sys, &mut rng, &bases, m)?;
        let lhs = germ_in(sys, &germ, &ug)? && germ_in(sys, &germ, &uh)?;
        // A source 1^j 0 x lies only in the cylinder of U'_{g,j}.
        let j = (0..).take_while(|&i| germ.word.letter(i) == 1).take(1000).count();
        let rhs = j < 1000 && j >= m && j % 3 == id.residue && germ_in(sys, &germ, &u_prime_gm(sys, &g, j)?)?;
        if lhs != rhs {
            counterexamples.push(crate::germs::fmt_germ(sys, &germ));
        }
    }
    Ok(PairCheck {
        identity: id,
        m,
        relative: sys.format_elem(&rel),
        msfw_length,
        msfw_matches: sorted == exp_sorted,
        samples,
        counterexamples,
    })
}

/// `Σ_g c_g 1_{U_{g,m}}` for coefficients of `(e, b, c, d)`.
pub fn nucleus_family(sys: &AutomatonSystem, field: Field, coeffs: &[Scalar; 4], m: usize) -> Result<GrigElement> {
    let mut f = GrigElement::zero(field);
    for (g, c) in family_elems(sys)?.iter().zip(coeffs) {
        f.add_term(sys, u_gm(sys, g, m)?, c.clone())?;
    }
    Ok(f)
}

/// Values of a nucleus-family element on its six open regions and at the
/// four points `z_e, z_b, z_c, z_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrigValues {
    /// `c_e+c_b, c_e+c_c, c_e+c_d, c_c+c_d, c_b+c_d, c_c+c_b`.
    pub regions: [Scalar; 6],
    pub points: [Scalar; 4],
}

pub fn grig_region_values(coeffs: &[Scalar; 4]) -> Result<GrigValues> {
    let [e, b, c, d] = coeffs;
    Ok(GrigValues {
        regions: [e.add(b)?, e.add(c)?, e.add(d)?, c.add(d)?, b.add(d)?, c.add(b)?],
        points: coeffs.clone(),
    })
}

/// Exact singularity of a nucleus-family element: singular iff every region
/// value vanishes and some point value does not.
pub fn family_is_singular(coeffs: &[Scalar; 4]) -> Result<bool> {
    let v = grig_region_values(coeffs)?;
    Ok(v.regions.iter().all(Scalar::is_zero) && v.points.iter().any(|x| !x.is_zero()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBound {
    /// Index into [`GrigValues::regions`].
    pub region: usize,
    pub value: Scalar,
    pub bound: AbsValue,
}

/// A region on which `|f| ≥ |c_e|/4`, using `K₁ + K₂ − K₆ = 2c_e`.
pub fn lower_bound_certificate(coeffs: &[Scalar; 4]) -> Result<LowerBound> {
    if coeffs[0].is_zero() {
        return Err(Error::Precondition("the coefficient of e must be nonzero".into()));
    }
    let v = grig_region_values(coeffs)?;
    let two_ce = v.regions[0].add(&v.regions[1])?.sub(&v.regions[5])?;
    if two_ce != coeffs[0].add(&coeffs[0])? {
        return Err(Error::Precondition("region identity failed".into()));
    }
    let mut best = 0;
    for i in 1..6 {
        if v.regions[i].abs()? > v.regions[best].abs()? {
            best = i;
        }
    }
    let bound = coeffs[0].abs()?.div_int(4);
    if v.regions[best].abs()? < bound {
        return Err(Error::Precondition("bound not attained".into()));
    }
    Ok(LowerBound {
        region: best,
        value: v.regions[best].clone(),
        bound,
    })
}

#[cfg(test)]
mod tests;
