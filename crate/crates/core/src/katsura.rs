//! Katsura triples `(ℤ, E_A, φ)` from integer matrices `A`, `B`: the graph
//! `E_A`, the action and cocycle by division with remainder, fixed paths and
//! their 2-adic classes, and the fixator condition checked vertex by vertex.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{Bounds, SelfSimilar};
use crate::error::{Error, Result};
use crate::word::{EventuallyPeriodic, Letter, Word};

/// Name of the built-in triple.
pub const PAPER_PRESET: &str = "katsura-paper";

/// The matrices of the built-in triple.
pub fn paper_matrices() -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    (
        vec![vec![2, 1, 0], vec![1, 2, 1], vec![1, 1, 2]],
        vec![vec![1, 2, 0], vec![2, 1, 2], vec![0, 2, 1]],
    )
}

/// All edges from vertex `source` to vertex `range` (1-based in names);
/// `count = A[range][source]` and the action uses `b = B[range][source]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeFamily {
    pub source: usize,
    pub range: usize,
    pub count: i64,
    pub b: i64,
}

impl EdgeFamily {
    pub fn is_loop(&self) -> bool {
        self.source == self.range
    }
}

/// JSON/TOML input: `{"A": [[...]], "B": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatsuraSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct KatsuraTriple {
    name: String,
    a: Vec<Vec<i64>>,
    b: Vec<Vec<i64>>,
    families: Vec<EdgeFamily>,
    /// Letter → (family, index within family).
    edges: Vec<(usize, i64)>,
    first_edge: Vec<usize>,
    bounds: Bounds,
}

/// The seven action/cocycle lines for `1 ∈ ℤ` on the built-in triple, as
/// (edge name, image name, cocycle).
pub const TABLE_LINES: [(&str, &str, i64); 7] = [
    ("e11^0", "e11^1", 0),
    ("e11^1", "e11^0", 1),
    ("e12", "e12", 2),
    ("e21", "e21", 2),
    ("e32", "e32", 2),
    ("e23", "e23", 2),
    ("e13", "e13", 0),
];

/// Checks the edge/matrix binding by reproducing the table lines (loops at
/// every vertex) on the built-in triple.
pub fn verify_table_binding() -> Result<()> {
    static GATE: OnceLock<Result<()>> = OnceLock::new();
    GATE.get_or_init(|| {
        let (a, b) = paper_matrices();
        let t = KatsuraTriple::build(PAPER_PRESET, a, b)?;
        let one = BigInt::one();
        let mut lines: Vec<(String, String, i64)> = TABLE_LINES
            .iter()
            .map(|(x, y, q)| (x.to_string(), y.to_string(), *q))
            .collect();
        for i in 2..=3 {
            lines.push((format!("e{i}{i}^0"), format!("e{i}{i}^1"), 0));
            lines.push((format!("e{i}{i}^1"), format!("e{i}{i}^0"), 1));
        }
        for (x, y, q) in lines {
            let e = t.edge_by_name(&x)?;
            let (img, cocycle) = t.act_letter(&one, e)?;
            if t.edge_name(img) != y || cocycle != BigInt::from(q) {
                return Err(Error::Katsura(format!(
                    "edge binding gate failed: 1·{x} = {}, φ = {cocycle}; expected {y}, {q}",
                    t.edge_name(img)
                )));
            }
        }
        Ok(())
    })
    .clone()
}

impl KatsuraTriple {
    /// Builds the triple after the binding gate passes.
    pub fn new(name: &str, a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> Result<Self> {
        verify_table_binding()?;
        Self::build(name, a, b)
    }

    pub fn paper() -> Result<Self> {
        let (a, b) = paper_matrices();
        Self::new(PAPER_PRESET, a, b)
    }

    pub fn from_spec(spec: &KatsuraSpec) -> Result<Self> {
        Self::new(spec.name.as_deref().unwrap_or("katsura"), spec.a.clone(), spec.b.clone())
    }

    /// Reads `{"A": ..., "B": ...}` from JSON, or TOML for `.toml` paths.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let spec: KatsuraSpec = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?
        };
        Self::from_spec(&spec)
    }

    fn build(name: &str, a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().chain(&b).any(|r| r.len() != n) || b.len() != n {
            return Err(Error::Katsura("A and B must be square matrices of the same size".into()));
        }
        let mut families = Vec::new();
        let mut edges = Vec::new();
        let mut first_edge = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (count, bb) = (a[j][i], b[j][i]);
                if count < 0 {
                    return Err(Error::Katsura(format!("negative entry A[{}][{}]", j + 1, i + 1)));
                }
                if count == 0 {
                    if bb != 0 {
                        return Err(Error::Katsura(format!(
                            "B[{}][{}] = {bb} where A has no edges",
                            j + 1,
                            i + 1
                        )));
                    }
                    continue;
                }
                first_edge.push(edges.len());
                for k in 0..count {
                    edges.push((families.len(), k));
                }
                families.push(EdgeFamily {
                    source: i,
                    range: j,
                    count,
                    b: bb,
                });
            }
        }
        for v in 0..n {
            if !families.iter().any(|f| f.range == v) {
                return Err(Error::Katsura(format!("vertex {} receives no edge", v + 1)));
            }
        }
        Ok(KatsuraTriple {
            name: name.to_string(),
            a,
            b,
            families,
            edges,
            first_edge,
            bounds: Bounds::default(),
        })
    }

    pub fn set_bounds(&mut self, bounds: Bounds) {
        self.bounds = bounds;
    }

    pub fn matrices(&self) -> (&[Vec<i64>], &[Vec<i64>]) {
        (&self.a, &self.b)
    }

    pub fn families(&self) -> &[EdgeFamily] {
        &self.families
    }

    pub fn family_of(&self, e: Letter) -> &EdgeFamily {
        &self.families[self.edges[e].0]
    }

    pub fn edge_name(&self, e: Letter) -> String {
        let (f, k) = self.edges[e];
        let fam = &self.families[f];
        let sep = if self.a.len() > 9 { "_" } else { "" };
        let base = format!("e{}{sep}{}", fam.source + 1, fam.range + 1);
        if fam.count > 1 {
            format!("{base}^{k}")
        } else {
            base
        }
    }

    pub fn edge_by_name(&self, name: &str) -> Result<Letter> {
        (0..self.edges.len())
            .find(|&e| self.edge_name(e) == name)
            .ok_or_else(|| Error::Katsura(format!("no edge named {name}")))
    }

    /// Parses space-separated edge names.
    pub fn path(&self, s: &str) -> Result<Word> {
        let w = s.split_whitespace().map(|t| self.edge_by_name(t)).collect::<Result<Word>>()?;
        crate::action::check_word(self, &w)?;
        Ok(w)
    }

    /// `pre (period)^∞` from edge-name strings.
    pub fn infinite_path(&self, pre: &str, period: &str) -> Result<EventuallyPeriodic> {
        let w = EventuallyPeriodic::new(self.path(pre)?, self.path(period)?)?;
        crate::action::check_infinite(self, &w)?;
        Ok(w)
    }

    /// `(m·e, φ(m, e))`.
    pub fn kats_act(&self, m: &BigInt, e: Letter) -> Result<(Letter, BigInt)> {
        self.act_letter(m, e)
    }

    /// `(m·μ, φ(m, μ))`.
    pub fn kats_act_path(&self, m: &BigInt, path: &[Letter]) -> Result<(Word, BigInt)> {
        crate::action::act_word(self, m, path)
    }

    /// `m·x` for an eventually periodic path.
    pub fn kats_act_infinite(&self, m: &BigInt, x: &EventuallyPeriodic) -> Result<EventuallyPeriodic> {
        crate::action::check_infinite(self, x)?;
        self.act_eventually_periodic(m, x)
    }

    /// Whether `m` and all its later restrictions act trivially on every
    /// repetition of `period`: `m` is divisible by the product `P` of the
    /// period's edge counts and, prime by prime, the product of its `b`
    /// entries is at least as divisible as `P`.
    fn stable_on_period(&self, m: &BigInt, period: &[Letter]) -> bool {
        let mut counts = BigInt::one();
        let mut bs = BigInt::one();
        for &e in period {
            let f = self.family_of(e);
            counts *= f.count;
            bs *= f.b;
        }
        if bs.is_zero() || !(m % &counts).is_zero() {
            return false;
        }
        let mut rest = counts.clone();
        let mut p = BigInt::from(2);
        while rest > BigInt::one() {
            if (&rest % &p).is_zero() {
                let (mut vc, mut vb) = (0, 0);
                while (&rest % &p).is_zero() {
                    rest /= &p;
                    vc += 1;
                }
                let mut t = bs.abs();
                while (&t % &p).is_zero() {
                    t /= &p;
                    vb += 1;
                }
                if vb < vc {
                    return false;
                }
            }
            p += 1;
        }
        true
    }

    /// How `ℓ` fixes an infinite path, by exact simulation.
    pub fn fixed_kind(&self, l: &BigInt, x: &EventuallyPeriodic) -> Result<FixedKind> {
        let bound = self.bounds.states;
        let pre = x.preperiod().len();
        let mut seen = HashMap::new();
        let mut m = l.clone();
        for i in 0..bound {
            if m.is_zero() {
                return Ok(FixedKind::TriviallyFixed);
            }
            if i >= pre && (i - pre) % x.period().len() == 0 && self.stable_on_period(&m, x.period()) {
                return Ok(FixedKind::Fixed);
            }
            if seen.insert((m.clone(), x.phase(i)), i).is_some() {
                return Ok(FixedKind::Fixed);
            }
            let e = x.letter(i);
            let (y, r) = self.act_letter(&m, e)?;
            if y != e {
                return Ok(FixedKind::NotFixed);
            }
            m = r;
        }
        Err(Error::NonContracting(bound))
    }

    /// True when loops carry `(count, b) = (2, 1)` and other edges `(1, 0)`
    /// or `(1, 2)`, so fixing is governed by the 2-adic valuation alone.
    pub fn has_two_adic_shape(&self) -> bool {
        self.families.iter().all(|f| {
            if f.is_loop() {
                f.count == 2 && f.b == 1
            } else {
                f.count == 1 && (f.b == 0 || f.b == 2)
            }
        })
    }

    /// Fixing by the length inequality: the 2-adic valuation of the running
    /// cocycle starts at `v₂(ℓ)`, each loop needs it positive and lowers it
    /// by one, each other edge raises it by one, and an edge with `b = 0`
    /// makes the rest trivially fixed.
    pub fn two_adic_kind(&self, l: &BigInt, x: &EventuallyPeriodic) -> Result<FixedKind> {
        if !self.has_two_adic_shape() {
            return Err(Error::Precondition("the 2-adic fixing rule needs loops (2, 1) and edges (1, 0|2)".into()));
        }
        if l.is_zero() {
            return Err(Error::InvalidArgument("ℓ must be nonzero".into()));
        }
        crate::action::check_infinite(self, x)?;
        let mut val = l.trailing_zeros().unwrap_or(0) as i64;
        let pre = x.preperiod().len();
        let per = x.period().len();
        let mut at_period = val;
        for i in 0..pre + per {
            if i == pre {
                at_period = val;
            }
            let f = self.family_of(x.letter(i));
            if f.is_loop() {
                if val == 0 {
                    return Ok(FixedKind::NotFixed);
                }
                val -= 1;
            } else if f.b == 0 {
                return Ok(FixedKind::TriviallyFixed);
            } else {
                val += 1;
            }
        }
        Ok(if val >= at_period { FixedKind::Fixed } else { FixedKind::NotFixed })
    }

    /// `x ∈ F_ℓ`.
    pub fn kats_fixed(&self, l: i64, x: &EventuallyPeriodic) -> Result<bool> {
        Ok(self.two_adic_kind(&BigInt::from(l), x)? != FixedKind::NotFixed)
    }

    /// `x ∈ TF_ℓ`.
    pub fn kats_trivially_fixed(&self, l: i64, x: &EventuallyPeriodic) -> Result<bool> {
        Ok(self.two_adic_kind(&BigInt::from(l), x)? == FixedKind::TriviallyFixed)
    }

    /// `α^(k) = (e23 e32)^k e13`.
    pub fn alpha_k(&self, k: usize) -> Result<Word> {
        let mut s = "e23 e32 ".repeat(k);
        s.push_str("e13");
        self.path(&s)
    }

    /// `(e11)^{n+1} e21 e32 e13 (e21 e12)^∞`, with `e11` read as `e11^0`.
    pub fn lattice_witness(&self, n: usize) -> Result<EventuallyPeriodic> {
        let mut pre = "e11^0 ".repeat(n + 1);
        pre.push_str("e21 e32 e13");
        self.infinite_path(&pre, "e21 e12")
    }

    /// The matrix `A` is irreducible (its graph is strongly connected).
    pub fn is_irreducible(&self) -> bool {
        let n = self.a.len();
        let reach = |from: usize, forward: bool| {
            let mut seen = vec![false; n];
            seen[from] = true;
            let mut queue = VecDeque::from([from]);
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    let edge = if forward { self.a[i][j] > 0 } else { self.a[j][i] > 0 };
                    if edge && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            seen.iter().all(|&s| s)
        };
        reach(0, true) && reach(0, false)
    }

    /// Loop edge at vertex `v`, if any.
    fn loop_at(&self, v: usize) -> Option<Letter> {
        self.families
            .iter()
            .position(|f| f.is_loop() && f.source == v)
            .map(|f| self.first_edge[f])
    }

    /// Random eventually periodic paths at vertex `v` (first edge has range
    /// `v`); loops are drawn with probability `loop_p`.
    pub fn sample_paths(&self, v: usize, count: usize, seed: u64) -> Result<Vec<EventuallyPeriodic>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let loop_p = [0.1, 0.3, 0.5][out.len() % 3];
            let pre_len = rng.gen_range(0..8);
            let per_len = rng.gen_range(1..6);
            let mut w: Word = Vec::new();
            let mut at = v;
            for _ in 0..pre_len + per_len {
                let e = self.random_edge_into(&mut rng, at, loop_p);
                w.push(e);
                at = self.family_of(e).source;
            }
            let back = self.walk_to(at, self.family_of(w[pre_len]).range)?;
            w.extend(back);
            let x = EventuallyPeriodic::new(w[..pre_len].to_vec(), w[pre_len..].to_vec())?;
            crate::action::check_infinite(self, &x)?;
            out.push(x);
        }
        Ok(out)
    }

    fn random_edge_into(&self, rng: &mut ChaCha8Rng, v: usize, loop_p: f64) -> Letter {
        let all: Vec<Letter> = (0..self.edges.len()).filter(|&e| self.family_of(e).range == v).collect();
        let (loops, others): (Vec<Letter>, Vec<Letter>) = all.iter().partition(|&&e| self.family_of(e).is_loop());
        let pool = if others.is_empty() || (!loops.is_empty() && rng.gen_bool(loop_p)) {
            &loops
        } else {
            &others
        };
        pool[rng.gen_range(0..pool.len())]
    }

    /// A shortest path continuing from a path whose last edge has source
    /// `from`, ending at an edge whose source is `to`.
    fn walk_to(&self, from: usize, to: usize) -> Result<Word> {
        if from == to {
            return Ok(Vec::new());
        }
        let n = self.a.len();
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut queue = VecDeque::from([from]);
        let mut seen = vec![false; n];
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for e in (0..self.edges.len()).filter(|&e| self.family_of(e).range == u) {
                let s = self.family_of(e).source;
                if !seen[s] {
                    seen[s] = true;
                    prev[s] = Some((u, e));
                    queue.push_back(s);
                }
            }
        }
        if !seen[to] {
            return Err(Error::Katsura(format!("vertex {} cannot be reached", to + 1)));
        }
        let mut w = Vec::new();
        let mut at = to;
        while let Some((u, e)) = prev[at] {
            w.push(e);
            at = u;
            if at == from {
                break;
            }
        }
        w.reverse();
        Ok(w)
    }
}

impl SelfSimilar for KatsuraTriple {
    type Elem = BigInt;
    type Key = BigInt;

    fn name(&self) -> &str {
        &self.name
    }

    fn alphabet_size(&self) -> usize {
        self.edges.len()
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn identity(&self) -> BigInt {
        BigInt::zero()
    }

    fn mul(&self, g: &BigInt, h: &BigInt) -> BigInt {
        g + h
    }

    fn inv(&self, g: &BigInt) -> BigInt {
        -g
    }

    /// `m·b + n = q·count + r` with `0 ≤ r < count` gives `(e^r, q)`.
    fn act_letter(&self, m: &BigInt, e: Letter) -> Result<(Letter, BigInt)> {
        if e >= self.edges.len() {
            return Err(Error::InvalidLetter {
                letter: e,
                size: self.edges.len(),
            });
        }
        let (f, n) = self.edges[e];
        let fam = &self.families[f];
        let t = m * fam.b + n;
        let (q, r) = t.div_mod_floor(&BigInt::from(fam.count));
        let r = r.to_usize().expect("remainder below the edge count");
        Ok((self.first_edge[f] + r, q))
    }

    fn key(&self, g: &BigInt) -> Result<BigInt> {
        Ok(g.clone())
    }

    fn equal(&self, g: &BigInt, h: &BigInt) -> Result<bool> {
        Ok(g == h)
    }

    fn is_identity(&self, g: &BigInt) -> Result<bool> {
        Ok(g.is_zero())
    }

    fn format_elem(&self, g: &BigInt) -> String {
        g.to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<BigInt> {
        let s = s.trim();
        if s == "e" {
            return Ok(BigInt::zero());
        }
        s.parse().map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
    }

    fn act_eventually_periodic(&self, m: &BigInt, x: &EventuallyPeriodic) -> Result<EventuallyPeriodic> {
        let bound = self.bounds.states;
        let pre = x.preperiod().len();
        let mut seen: HashMap<(BigInt, usize), usize> = HashMap::new();
        let mut out = Vec::new();
        let mut cur = m.clone();
        for i in 0..bound {
            let settled = cur.is_zero()
                || (i >= pre && (i - pre) % x.period().len() == 0 && self.stable_on_period(&cur, x.period()));
            if settled {
                return Ok(x.drop_prefix(i).prepend(&out));
            }
            if let Some(j) = seen.insert((cur.clone(), x.phase(i)), i) {
                return Ok(EventuallyPeriodic::from_cycle(&out, j, i - j));
            }
            let (y, r) = self.act_letter(&cur, x.letter(i))?;
            out.push(y);
            cur = r;
        }
        Err(Error::NonContracting(bound))
    }

    fn format_letter(&self, x: Letter) -> String {
        self.edge_name(x)
    }

    fn source(&self, x: Letter) -> usize {
        self.family_of(x).source
    }

    fn range(&self, x: Letter) -> usize {
        self.family_of(x).range
    }

    fn vertex_count(&self) -> usize {
        self.a.len()
    }
}

/// Maximal alternating blocks of a finite path: runs of loops and runs of
/// non-loop edges, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathDecomposition {
    pub blocks: Vec<PathBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PathBlock {
    Loops(Word),
    NonLoops(Word),
}

impl PathBlock {
    pub fn word(&self) -> &Word {
        match self {
            PathBlock::Loops(w) | PathBlock::NonLoops(w) => w,
        }
    }
}

impl PathDecomposition {
    pub fn concat(&self) -> Word {
        self.blocks.iter().flat_map(|b| b.word().iter().copied()).collect()
    }
}

impl KatsuraTriple {
    pub fn decompose(&self, path: &[Letter]) -> PathDecomposition {
        let mut blocks: Vec<PathBlock> = Vec::new();
        for &e in path {
            let is_loop = self.family_of(e).is_loop();
            match blocks.last_mut() {
                Some(PathBlock::Loops(w)) if is_loop => w.push(e),
                Some(PathBlock::NonLoops(w)) if !is_loop => w.push(e),
                _ => blocks.push(if is_loop { PathBlock::Loops(vec![e]) } else { PathBlock::NonLoops(vec![e]) }),
            }
        }
        PathDecomposition { blocks }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedKind {
    NotFixed,
    /// Fixed, with every restriction nonzero.
    Fixed,
    /// Fixed, and some prefix is strongly fixed.
    TriviallyFixed,
}

/// `F_ℓ = F_{2^n}` and `TF_ℓ = TF_{2^n}` for `n = v₂(ℓ)`; `n = 0` is the odd class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum LatticeClass {
    Odd,
    Pow2(u32),
}

impl LatticeClass {
    pub fn exponent(self) -> u32 {
        match self {
            LatticeClass::Odd => 0,
            LatticeClass::Pow2(n) => n,
        }
    }

    /// `1` or `2^n`.
    pub fn representative(self) -> BigInt {
        BigInt::one() << self.exponent()
    }

    pub fn label(self) -> String {
        match self {
            LatticeClass::Odd => "1".to_string(),
            LatticeClass::Pow2(n) => format!("2^{n}"),
        }
    }
}

pub fn kats_lattice_reduce(l: i64) -> Result<LatticeClass> {
    if l == 0 {
        return Err(Error::InvalidArgument("ℓ must be nonzero".into()));
    }
    let n = l.trailing_zeros();
    Ok(if n == 0 { LatticeClass::Odd } else { LatticeClass::Pow2(n) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ConditionS {
    Satisfied {
        /// `k = n`, `0 < k < n` or `k = 0`, with `k` the number of odd ℓ.
        case: String,
        /// `∩ F_ℓ ∖ TF_ℓ` as `F_a ∖ TF_b`.
        reduction: String,
        /// `F_b` with `TF_b` its interior.
        interior: String,
        samples: usize,
        in_difference: usize,
    },
    Violated {
        witness: String,
        reason: String,
    },
}

impl ConditionS {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConditionS::Satisfied { .. })
    }
}

/// Checks the fixator condition for many ℓ-sets at one vertex against a
/// fixed sample of paths, caching fixing decisions.
pub struct ConditionSChecker<'a> {
    triple: &'a KatsuraTriple,
    vertex: usize,
    samples: Vec<EventuallyPeriodic>,
    /// Approximating points `μ (loop)^∞` for prefixes `μ` of each sample.
    probes: Vec<Vec<EventuallyPeriodic>>,
    cache: HashMap<(BigInt, usize, usize), FixedKind>,
}

/// Prefix lengths used for the approximating points.
const PROBE_DEPTH: usize = 8;

impl<'a> ConditionSChecker<'a> {
    pub fn new(triple: &'a KatsuraTriple, vertex: usize, samples: Vec<EventuallyPeriodic>) -> Result<Self> {
        if vertex >= triple.vertex_count() {
            return Err(Error::InvalidArgument(format!("no vertex {}", vertex + 1)));
        }
        let mut probes = Vec::new();
        for x in &samples {
            if x.letter(0) >= triple.alphabet_size() || triple.range(x.letter(0)) != vertex {
                return Err(Error::InvalidArgument(format!("{x} does not start at vertex {}", vertex + 1)));
            }
            let mut ps = Vec::new();
            for l in 0..=PROBE_DEPTH {
                let mu = x.prefix(l);
                let at = mu.last().map_or(vertex, |&e| triple.source(e));
                if let Some(e) = triple.loop_at(at) {
                    ps.push(EventuallyPeriodic::constant(e).prepend(&mu));
                }
            }
            probes.push(ps);
        }
        Ok(ConditionSChecker {
            triple,
            vertex,
            samples,
            probes,
            cache: HashMap::new(),
        })
    }

    /// `slot = 0` is the sample itself, `slot = p + 1` its `p`-th probe.
    fn kind(&mut self, l: &BigInt, sample: usize, slot: usize) -> Result<FixedKind> {
        let key = (l.clone(), sample, slot);
        if let Some(&k) = self.cache.get(&key) {
            return Ok(k);
        }
        let x = if slot == 0 { &self.samples[sample] } else { &self.probes[sample][slot - 1] };
        let k = self.triple.fixed_kind(l, x)?;
        self.cache.insert(key, k);
        Ok(k)
    }

    pub fn check(&mut self, ls: &[i64]) -> Result<ConditionS> {
        if ls.is_empty() {
            return Err(Error::InvalidArgument("ℓ-set must be nonempty".into()));
        }
        let mut sorted = ls.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ls.len() {
            return Err(Error::InvalidArgument("ℓ values must be distinct".into()));
        }
        let classes = ls.iter().map(|&l| kats_lattice_reduce(l)).collect::<Result<Vec<_>>>()?;
        let k = classes.iter().filter(|c| **c == LatticeClass::Odd).count();
        let n = ls.len();
        let lo = *classes.iter().min().expect("nonempty");
        let hi = *classes.iter().max().expect("nonempty");
        let case = if k == n {
            "k = n"
        } else if k > 0 {
            "0 < k < n"
        } else {
            "k = 0"
        };
        let reduction = format!("F_{} ∖ TF_{}", lo.label(), hi.label());
        let (lo_rep, hi_rep) = (lo.representative(), hi.representative());
        let big: Vec<BigInt> = ls.iter().map(|&l| BigInt::from(l)).collect();
        let mut in_difference = 0;
        for s in 0..self.samples.len() {
            let mut kinds = Vec::with_capacity(n);
            for (l, c) in big.iter().zip(&classes) {
                let kd = self.kind(l, s, 0)?;
                if kd != self.kind(&c.representative(), s, 0)? {
                    return Ok(self.violated(s, format!("ℓ = {l} and {} fix it differently", c.label())));
                }
                kinds.push(kd);
            }
            let lhs = kinds.iter().all(|&kd| kd == FixedKind::Fixed);
            let rhs = self.kind(&lo_rep, s, 0)? != FixedKind::NotFixed
                && self.kind(&hi_rep, s, 0)? != FixedKind::TriviallyFixed;
            if lhs != rhs {
                return Ok(self.violated(s, format!("membership in {reduction} disagrees")));
            }
            if !lhs {
                continue;
            }
            in_difference += 1;
            if self.kind(&hi_rep, s, 0)? == FixedKind::TriviallyFixed {
                return Ok(self.violated(s, format!("lies in TF_{}", hi.label())));
            }
            for p in 0..self.probes[s].len() {
                for l in &big {
                    if self.kind(l, s, p + 1)? != FixedKind::NotFixed {
                        return Ok(self.violated(
                            s,
                            format!(
                                "approximating point {} is fixed by {l}",
                                self.triple.format_path(&self.probes[s][p])
                            ),
                        ));
                    }
                }
            }
        }
        Ok(ConditionS::Satisfied {
            case: case.to_string(),
            reduction,
            interior: format!("interior of F_{} = TF_{}", hi.label(), hi.label()),
            samples: self.samples.len(),
            in_difference,
        })
    }

    fn violated(&self, s: usize, reason: String) -> ConditionS {
        ConditionS::Violated {
            witness: format!("{} at vertex {}", self.triple.format_path(&self.samples[s]), self.vertex + 1),
            reason,
        }
    }
}

impl KatsuraTriple {
    /// Edge names of an infinite path, `pre (period)`.
    pub fn format_path(&self, x: &EventuallyPeriodic) -> String {
        let pre = if x.preperiod().is_empty() {
            String::new()
        } else {
            format!("{} ", self.format_word(x.preperiod()))
        };
        format!("{pre}({})", self.format_word(x.period()))
    }

    /// Samples at `vertex`: the lattice witnesses (at vertex 1), the loop-free
    /// cycles and `count` random paths.
    pub fn condition_s_samples(&self, vertex: usize, count: usize, seed: u64) -> Result<Vec<EventuallyPeriodic>> {
        let mut out = Vec::new();
        if self.has_two_adic_shape() && self.a == paper_matrices().0 && self.b == paper_matrices().1 {
            if vertex == 0 {
                for n in 0..5 {
                    out.push(self.lattice_witness(n)?);
                }
            }
            for (pre, per) in [
                ("", "e23 e32"),
                ("", "e32 e23"),
                ("", "e12 e21"),
                ("", "e21 e12"),
                ("e13", "e21 e12"),
                ("e12 e21", "e11^0"),
            ] {
                if let Ok(x) = self.infinite_path(pre, per) {
                    if self.range(x.letter(0)) == vertex {
                        out.push(x);
                    }
                }
            }
        }
        out.extend(self.sample_paths(vertex, count, seed)?);
        Ok(out)
    }
}

/// Single-set form of [`ConditionSChecker::check`].
pub fn kats_condition_s(triple: &KatsuraTriple, ls: &[i64], vertex: usize, samples: usize, seed: u64) -> Result<ConditionS> {
    let s = triple.condition_s_samples(vertex, samples, seed)?;
    ConditionSChecker::new(triple, vertex, s)?.check(ls)
}

/// All subsets of `{±1, …, ±max}` with between one and `size` elements.
pub fn ell_subsets(max: i64, size: usize) -> Vec<Vec<i64>> {
    let pool: Vec<i64> = (1..=max).flat_map(|l| [l, -l]).collect();
    let mut out = Vec::new();
    fn rec(pool: &[i64], start: usize, size: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == size {
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, i + 1, size, cur, out);
            cur.pop();
        }
    }
    rec(&pool, 0, size, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests;
