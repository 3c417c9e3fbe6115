//! The groupoid of germs: normalized basic bisections, germ equality,
//! membership and closure membership, and a status automaton that describes
//! how finitely many bisections meet a cylinder of a base bisection.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::action::{
    act_word, check_infinite, extends_to_strongly_fixed, next_letters, path_context, SelfSimilar,
};
use crate::error::{Error, Result};
use crate::isg::{fmt_triple, isg_mul, isg_star, theta_apply, triple_key, Triple, TripleKey};
use crate::word::{EventuallyPeriodic, Letter, Word};

/// `Θ((α, g, β), C(β))`. Every triple is stored in this normalized form, so
/// the source cylinder is exactly `C(β)`.
pub type BasicBisection<E> = Triple<E>;

/// `Θ(t, C(βη))`, normalized to `(α(g·η), g|_η, βη)`.
pub fn restrict_bisection<S: SelfSimilar + ?Sized>(
    sys: &S,
    t: &Triple<S::Elem>,
    eta: &[Letter],
) -> Result<BasicBisection<S::Elem>> {
    let (img, r) = act_word(sys, &t.g, eta)?;
    let mut alpha = t.alpha.clone();
    alpha.extend(img);
    let mut beta = t.beta.clone();
    beta.extend_from_slice(eta);
    Triple::new(sys, alpha, r, beta)
}

/// `Θ(s)Θ(t) = Θ(st)`; `None` for the empty product.
pub fn bis_mul<S: SelfSimilar + ?Sized>(
    sys: &S,
    b: &BasicBisection<S::Elem>,
    d: &BasicBisection<S::Elem>,
) -> Result<Option<BasicBisection<S::Elem>>> {
    isg_mul(sys, &Some(b.clone()), &Some(d.clone()))
}

pub fn bis_inv<S: SelfSimilar + ?Sized>(sys: &S, b: &BasicBisection<S::Elem>) -> BasicBisection<S::Elem> {
    isg_star(sys, &Some(b.clone())).expect("nonzero triple")
}

/// A germ `[t; w]` with `w` in the source cylinder of `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Germ<E> {
    pub triple: Triple<E>,
    pub word: EventuallyPeriodic,
}

impl<E: Clone> Germ<E> {
    pub fn new<S>(sys: &S, triple: Triple<E>, word: EventuallyPeriodic) -> Result<Self>
    where
        S: SelfSimilar<Elem = E> + ?Sized,
    {
        check_infinite(sys, &word)?;
        if !word.starts_with(&triple.beta) {
            return Err(Error::InvalidArgument(format!(
                "{word} does not start with {}",
                sys.format_word(&triple.beta)
            )));
        }
        Ok(Germ { triple, word })
    }
}

impl<E: fmt::Debug> fmt::Display for Germ<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}]", self.triple, self.word)
    }
}

pub fn fmt_germ<S: SelfSimilar + ?Sized>(sys: &S, g: &Germ<S::Elem>) -> String {
    format!("[{}; {}]", fmt_triple(sys, &g.triple), g.word)
}

/// Source of a germ.
pub fn germ_source<E>(g: &Germ<E>) -> &EventuallyPeriodic {
    &g.word
}

/// Range of a germ.
pub fn germ_range<S: SelfSimilar + ?Sized>(sys: &S, g: &Germ<S::Elem>) -> Result<EventuallyPeriodic> {
    theta_apply(sys, &g.triple, &g.word)
}

pub fn germ_inverse<S: SelfSimilar + ?Sized>(sys: &S, g: &Germ<S::Elem>) -> Result<Germ<S::Elem>> {
    Ok(Germ {
        word: germ_range(sys, g)?,
        triple: bis_inv(sys, &g.triple),
    })
}

/// `γ₁γ₂`, defined when the source of `γ₁` is the range of `γ₂`.
pub fn germ_compose<S: SelfSimilar + ?Sized>(
    sys: &S,
    g1: &Germ<S::Elem>,
    g2: &Germ<S::Elem>,
) -> Result<Option<Germ<S::Elem>>> {
    if germ_range(sys, g2)? != g1.word {
        return Ok(None);
    }
    let t = bis_mul(sys, &g1.triple, &g2.triple)?
        .ok_or_else(|| Error::Precondition("composable germs with zero product".into()))?;
    Ok(Some(Germ {
        triple: t,
        word: g2.word.clone(),
    }))
}

/// Germ equality: same point, and both triples agree after restricting to
/// some prefix of it.
pub fn germ_eq<S: SelfSimilar + ?Sized>(sys: &S, a: &Germ<S::Elem>, b: &Germ<S::Elem>) -> Result<bool> {
    if a.word != b.word {
        return Ok(false);
    }
    let (s, t) = (&a.triple, &b.triple);
    if s.alpha.len() as isize - s.beta.len() as isize != t.alpha.len() as isize - t.beta.len() as isize {
        return Ok(false);
    }
    let w = &a.word;
    let n = s.beta.len().max(t.beta.len());
    let mu = w.prefix(n);
    let (r1, mut h1) = act_word(sys, &s.g, &mu[s.beta.len()..])?;
    let (r2, mut h2) = act_word(sys, &t.g, &mu[t.beta.len()..])?;
    let mut range1 = s.alpha.clone();
    range1.extend(r1);
    let mut range2 = t.alpha.clone();
    range2.extend(r2);
    if range1 != range2 {
        return Ok(false);
    }
    let bound = sys.bounds().states;
    let mut seen = HashSet::new();
    for i in n..n + bound {
        if sys.equal(&h1, &h2)? {
            return Ok(true);
        }
        if !seen.insert((sys.key(&h1)?, sys.key(&h2)?, w.phase(i))) {
            return Ok(false);
        }
        let x = w.letter(i);
        let (y1, n1) = sys.act_letter(&h1, x)?;
        let (y2, n2) = sys.act_letter(&h2, x)?;
        if y1 != y2 {
            return Ok(false);
        }
        h1 = n1;
        h2 = n2;
    }
    Err(Error::undecided("germ equality steps", bound))
}

/// `γ ∈ B`.
pub fn germ_in<S: SelfSimilar + ?Sized>(sys: &S, g: &Germ<S::Elem>, b: &BasicBisection<S::Elem>) -> Result<bool> {
    if !g.word.starts_with(&b.beta) {
        return Ok(false);
    }
    germ_eq(
        sys,
        &Germ {
            triple: b.clone(),
            word: g.word.clone(),
        },
        g,
    )
}

/// `γ ∈ closure(B)`: along the common tail, the relative element
/// `h⁻¹ g|_…` fixes every letter and every prefix extends to a word it
/// strongly fixes. Works for any relative lengths of the two source words.
pub fn germ_in_closure<S: SelfSimilar + ?Sized>(
    sys: &S,
    g: &Germ<S::Elem>,
    b: &BasicBisection<S::Elem>,
) -> Result<bool> {
    let (z, w) = (&g.triple, &g.word);
    if !w.starts_with(&b.beta) {
        return Ok(false);
    }
    if z.alpha.len() as isize - z.beta.len() as isize != b.alpha.len() as isize - b.beta.len() as isize {
        return Ok(false);
    }
    let n = z.beta.len().max(b.beta.len());
    let mu = w.prefix(n);
    let (r0, h) = act_word(sys, &z.g, &mu[z.beta.len()..])?;
    let (r1, gg) = act_word(sys, &b.g, &mu[b.beta.len()..])?;
    let mut range0 = z.alpha.clone();
    range0.extend(r0);
    let mut range1 = b.alpha.clone();
    range1.extend(r1);
    if range0 != range1 {
        return Ok(false);
    }
    let mut k = sys.mul(&sys.inv(&h), &gg);
    let bound = sys.bounds().states;
    let mut seen = HashSet::new();
    for i in n..n + bound {
        let last = if i == 0 { None } else { Some(w.letter(i - 1)) };
        if sys.is_identity(&k)? {
            return Ok(true);
        }
        if !seen.insert((sys.key(&k)?, w.phase(i))) {
            return Ok(true);
        }
        if !extends_to_strongly_fixed(sys, &k, last)? {
            return Ok(false);
        }
        let x = w.letter(i);
        let (y, r) = sys.act_letter(&k, x)?;
        if y != x {
            return Ok(false);
        }
        k = r;
    }
    Err(Error::undecided("closure test steps", bound))
}

/// How a bisection meets the cylinder below a node of a [`RegionGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status<E> {
    /// The node is still shorter than the bisection's source word.
    Waiting,
    /// No point below the node lies in the bisection.
    Dead,
    /// Every point below the node lies in the bisection.
    Covered,
    /// A point `v` below lies in the bisection iff some prefix of the rest of
    /// `v` is strongly fixed by this relative element.
    Pending(E),
}

impl<E> Status<E> {
    pub fn is_covered(&self) -> bool {
        matches!(self, Status::Covered)
    }

    pub fn is_dead(&self) -> bool {
        matches!(self, Status::Dead)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum StatusKey<K> {
    Waiting,
    Dead,
    Covered,
    Pending(K),
}

type StateKey<K> = (Vec<StatusKey<K>>, Option<Word>, Option<usize>);

/// Finite points of a region, or the fact that there are infinitely many.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointSet {
    Empty,
    Finite(Vec<EventuallyPeriodic>),
    Infinite,
}

/// For a base bisection `B₀ = (α₀, g₀, β₀)` and a cylinder `C(μ₀) ⊆ C(β₀)`,
/// the automaton whose paths are the points `v ∈ C(μ₀)` and whose states
/// record, for each listed bisection `Bᵢ`, whether the germ `[B₀; v]` lies
/// in `Bᵢ`.
pub struct RegionGraph<E> {
    base: Triple<E>,
    start: Word,
    pub statuses: Vec<Vec<Status<E>>>,
    pub edges: Vec<Vec<(Letter, usize)>>,
    parent: Vec<Option<(usize, Letter)>>,
}

struct Builder<'a, S: SelfSimilar + ?Sized> {
    sys: &'a S,
    base: &'a Triple<S::Elem>,
    sets: &'a [Triple<S::Elem>],
    extends: HashMap<(S::Key, Option<usize>), bool>,
}

impl<S: SelfSimilar + ?Sized> Builder<'_, S> {
    fn classify(&mut self, k: S::Elem, last: Option<Letter>) -> Result<Status<S::Elem>> {
        if self.sys.is_identity(&k)? {
            return Ok(Status::Covered);
        }
        let key = (self.sys.key(&k)?, path_context(self.sys, last));
        let ok = match self.extends.get(&key) {
            Some(&b) => b,
            None => {
                let b = extends_to_strongly_fixed(self.sys, &k, last)?;
                self.extends.insert(key, b);
                b
            }
        };
        Ok(if ok { Status::Pending(k) } else { Status::Dead })
    }

    /// Status of set `i` at node `μ`, computed from scratch.
    fn status_at(&mut self, mu: &[Letter], i: usize) -> Result<Status<S::Elem>> {
        let b = &self.sets[i];
        if mu.len() < b.beta.len() {
            return Ok(if b.beta.starts_with(mu) { Status::Waiting } else { Status::Dead });
        }
        if !mu.starts_with(&b.beta) {
            return Ok(Status::Dead);
        }
        let (r0, h0) = act_word(self.sys, &self.base.g, &mu[self.base.beta.len()..])?;
        let (r1, h1) = act_word(self.sys, &b.g, &mu[b.beta.len()..])?;
        if self.base.alpha.len() + r0.len() != b.alpha.len() + r1.len()
            || self.base.alpha.iter().chain(&r0).ne(b.alpha.iter().chain(&r1))
        {
            return Ok(Status::Dead);
        }
        let k = self.sys.mul(&self.sys.inv(&h0), &h1);
        self.classify(k, mu.last().copied())
    }

    fn step(&mut self, st: &Status<S::Elem>, x: Letter) -> Result<Status<S::Elem>> {
        Ok(match st {
            Status::Pending(k) => {
                let (y, r) = self.sys.act_letter(k, x)?;
                if y != x {
                    Status::Dead
                } else {
                    self.classify(r, Some(x))?
                }
            }
            other => other.clone(),
        })
    }

    fn key(&self, sts: &[Status<S::Elem>], prefix: &Option<Word>, last: Option<Letter>) -> Result<StateKey<S::Key>> {
        let ks = sts
            .iter()
            .map(|s| {
                Ok(match s {
                    Status::Waiting => StatusKey::Waiting,
                    Status::Dead => StatusKey::Dead,
                    Status::Covered => StatusKey::Covered,
                    Status::Pending(k) => StatusKey::Pending(self.sys.key(k)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((ks, prefix.clone(), path_context(self.sys, last)))
    }
}

impl<E: Clone> RegionGraph<E> {
    /// Explores every reachable state.
    pub fn build<S>(sys: &S, base: &Triple<E>, mu: &[Letter], sets: &[Triple<E>]) -> Result<Self>
    where
        S: SelfSimilar<Elem = E> + ?Sized,
    {
        if !mu.starts_with(&base.beta) {
            return Err(Error::InvalidArgument("start word must extend the base source word".into()));
        }
        crate::action::check_word(sys, mu)?;
        let mut b = Builder {
            sys,
            base,
            sets,
            extends: HashMap::new(),
        };
        let bound = sys.bounds().states;
        let init = (0..sets.len()).map(|i| b.status_at(mu, i)).collect::<Result<Vec<_>>>()?;
        let waiting = |sts: &[Status<E>]| sts.iter().any(|s| matches!(s, Status::Waiting));
        let prefix0 = waiting(&init).then(|| mu.to_vec());
        let mut graph = RegionGraph {
            base: base.clone(),
            start: mu.to_vec(),
            statuses: Vec::new(),
            edges: Vec::new(),
            parent: Vec::new(),
        };
        let mut index = HashMap::new();
        let mut meta: Vec<(Option<Word>, Option<Letter>)> = Vec::new();
        index.insert(b.key(&init, &prefix0, mu.last().copied())?, 0);
        graph.statuses.push(init);
        graph.edges.push(Vec::new());
        graph.parent.push(None);
        meta.push((prefix0, mu.last().copied()));
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let (prefix, last) = meta[v].clone();
            for x in next_letters(sys, last) {
                let mut next = Vec::with_capacity(sets.len());
                let ext = prefix.as_ref().map(|p| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                });
                for (i, st) in graph.statuses[v].clone().iter().enumerate() {
                    next.push(match (st, &ext) {
                        (Status::Waiting, Some(q)) => b.status_at(q, i)?,
                        _ => b.step(st, x)?,
                    });
                }
                let nprefix = if waiting(&next) { ext } else { None };
                let key = b.key(&next, &nprefix, Some(x))?;
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        if graph.statuses.len() >= bound {
                            return Err(Error::undecided("region automaton states", bound));
                        }
                        let j = graph.statuses.len();
                        index.insert(key, j);
                        graph.statuses.push(next);
                        graph.edges.push(Vec::new());
                        graph.parent.push(Some((v, x)));
                        meta.push((nprefix, Some(x)));
                        queue.push_back(j);
                        j
                    }
                };
                graph.edges[v].push((x, j));
            }
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.statuses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statuses.is_empty()
    }

    pub fn base(&self) -> &Triple<E> {
        &self.base
    }

    /// The finite word leading to node `v`.
    pub fn word_to(&self, mut v: usize) -> Word {
        let mut w = Vec::new();
        while let Some((p, x)) = self.parent[v] {
            w.push(x);
            v = p;
        }
        w.reverse();
        let mut out = self.start.clone();
        out.extend(w);
        out
    }

    /// A node whose statuses satisfy `pred`, if any: the cylinder below it
    /// then lies in the region described by `pred`.
    pub fn find_node(&self, pred: impl Fn(&[Status<E>]) -> bool) -> Option<usize> {
        (0..self.len()).find(|&v| pred(&self.statuses[v]))
    }

    /// Points (infinite paths from the start) that never leave `allowed` and
    /// eventually stay in `target`. `target` must be preserved by moves that
    /// stay in `allowed`.
    pub fn points(
        &self,
        allowed: impl Fn(&[Status<E>]) -> bool,
        target: impl Fn(&[Status<E>]) -> bool,
    ) -> PointSet {
        let n = self.len();
        let ok: Vec<bool> = (0..n).map(|v| allowed(&self.statuses[v])).collect();
        let mut inf: Vec<bool> = (0..n).map(|v| ok[v] && target(&self.statuses[v])).collect();
        loop {
            let mut changed = false;
            for v in 0..n {
                if inf[v] && !self.edges[v].iter().any(|&(_, j)| inf[j]) {
                    inf[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut rev = vec![Vec::new(); n];
        for v in 0..n {
            for &(_, j) in &self.edges[v] {
                rev[j].push(v);
            }
        }
        let mut live = inf.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| live[v]).collect();
        while let Some(j) = queue.pop_front() {
            for &v in &rev[j] {
                if ok[v] && !live[v] {
                    live[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if !live[0] {
            return PointSet::Empty;
        }
        let succ: Vec<Vec<(Letter, usize)>> = (0..n)
            .map(|v| self.edges[v].iter().copied().filter(|&(_, j)| live[j]).collect())
            .collect();
        let on_cycle = cycle_nodes(&succ, &live);
        if (0..n).any(|v| live[v] && on_cycle[v] && succ[v].len() > 1) {
            return PointSet::Infinite;
        }
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((v, path)) = stack.pop() {
            if on_cycle[v] {
                let mut cyc = Vec::new();
                let mut u = v;
                loop {
                    let (x, j) = succ[u][0];
                    cyc.push(x);
                    u = j;
                    if u == v {
                        break;
                    }
                }
                let mut pre = self.start.clone();
                pre.extend(path);
                out.push(EventuallyPeriodic::new(pre, cyc).expect("nonempty cycle"));
                continue;
            }
            for &(x, j) in succ[v].iter().rev() {
                let mut p = path.clone();
                p.push(x);
                stack.push((j, p));
            }
        }
        out.sort();
        out.dedup();
        PointSet::Finite(out)
    }
}

/// Nodes (among `live`) that lie on a cycle of `succ`.
fn cycle_nodes(succ: &[Vec<(Letter, usize)>], live: &[bool]) -> Vec<bool> {
    let n = succ.len();
    let mut out = vec![false; n];
    for v in 0..n {
        if !live[v] {
            continue;
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = succ[v].iter().map(|&(_, j)| j).collect();
        while let Some(u) = stack.pop() {
            if u == v {
                out[v] = true;
                break;
            }
            if seen[u] {
                continue;
            }
            seen[u] = true;
            stack.extend(succ[u].iter().map(|&(_, j)| j));
        }
    }
    out
}

/// Verdict of [`regular_open_test`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionVerdict<E> {
    RegularOpen,
    /// The germ lies in the interior of the closure but not in the set.
    NotRegularOpen(Germ<E>),
    Undecided { depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenRegionReport<E> {
    pub verdict: RegionVerdict<E>,
    pub trace: Vec<String>,
}

/// Periods tried for witness germs: `1^∞`, `0^∞`, `(01)^∞`.
pub fn default_witness_periods() -> Vec<EventuallyPeriodic> {
    vec![
        EventuallyPeriodic::constant(1),
        EventuallyPeriodic::constant(0),
        EventuallyPeriodic::new(vec![], vec![0, 1]).expect("nonempty period"),
    ]
}

/// All paths of length `n` that may follow `last`, in lexicographic order.
pub(crate) fn paths_after<S: SelfSimilar + ?Sized>(sys: &S, last: Option<Letter>, n: usize, limit: usize) -> Option<Vec<Word>> {
    let mut level = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &level {
            let l = w.last().copied().or(last);
            for x in next_letters(sys, l) {
                let mut v: Word = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        if next.len() > limit {
            return None;
        }
        level = next;
    }
    Some(level)
}

/// Tries to split the sets into clopen boxes `s⁻¹C(σ) ∩ r⁻¹C(ρ)` so that no
/// box meets two different bisections.
fn box_separated<S: SelfSimilar + ?Sized>(sys: &S, sets: &[Triple<S::Elem>], extra: usize) -> Result<bool> {
    let max_beta = sets.iter().map(|t| t.beta.len()).max().unwrap_or(0);
    let max_alpha = sets.iter().map(|t| t.alpha.len()).max().unwrap_or(0);
    let shift = sets
        .iter()
        .map(|t| t.beta.len() as isize - t.alpha.len() as isize)
        .max()
        .unwrap_or(0);
    let l0 = max_beta.max((max_alpha as isize + shift).max(0) as usize);
    for l in l0..=l0 + extra {
        let r = (l as isize - shift) as usize;
        let mut boxes: HashMap<(Word, Word), TripleKey<S::Key>> = HashMap::new();
        let mut clash = false;
        'sets: for t in sets {
            let Some(etas) = paths_after(sys, t.beta.last().copied(), l - t.beta.len(), sys.bounds().states) else {
                return Ok(false);
            };
            for eta in etas {
                let piece = restrict_bisection(sys, t, &eta)?;
                let bx = (piece.beta.clone(), piece.alpha[..r].to_vec());
                let key = triple_key(sys, &piece)?;
                match boxes.get(&bx) {
                    Some(k) if *k != key => {
                        clash = true;
                        break 'sets;
                    }
                    Some(_) => {}
                    None => {
                        boxes.insert(bx, key);
                    }
                }
            }
        }
        if !clash {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Certifies `z ∈ interior(closure(∪ sets))` by finding a cylinder around it
/// whose points outside `∪ sets` are finitely many and all in the closure.
fn certify_interior<S: SelfSimilar + ?Sized>(
    sys: &S,
    z: &Germ<S::Elem>,
    sets: &[Triple<S::Elem>],
    depth: usize,
    trace: &mut Vec<String>,
) -> Result<bool> {
    let l0 = sets.iter().map(|t| t.beta.len()).max().unwrap_or(0).max(z.triple.beta.len());
    for extra in 0..=depth {
        let mu = z.word.prefix(l0 + extra);
        let graph = match RegionGraph::build(sys, &z.triple, &mu, sets) {
            Ok(g) => g,
            Err(e) if e.is_bound() => return Ok(false),
            Err(e) => return Err(e),
        };
        let uncovered = graph.points(|s| !s.iter().any(Status::is_covered), |_| true);
        if let PointSet::Finite(points) = uncovered {
            let mut all = true;
            for p in &points {
                let germ = Germ {
                    triple: z.triple.clone(),
                    word: p.clone(),
                };
                let mut inside = false;
                for b in sets {
                    if germ_in_closure(sys, &germ, b)? {
                        inside = true;
                        break;
                    }
                }
                if !inside {
                    all = false;
                    break;
                }
            }
            if all {
                trace.push(format!(
                    "neighbourhood C({}) of the witness: points outside the union are {{{}}}, each in the closure",
                    sys.format_word(&mu),
                    points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
                ));
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Decides whether `∪ sets` is regular open (equal to the interior of its
/// closure), or returns `Undecided`.
///
/// Witnesses are germs `[(α(g·η), g|_η k⁻¹, βη); βη w]` for a set
/// `(α, g, β)`, `|η| ≤ depth`, `k` a non-identity nucleus element and `w`
/// one of `periods`: such a germ lies in the closure of `(α, g, β)` exactly
/// when every prefix of `w` extends to a word strongly fixed by `k`.
pub fn regular_open_test<S: SelfSimilar + ?Sized>(
    sys: &S,
    sets: &[BasicBisection<S::Elem>],
    depth: usize,
    periods: &[EventuallyPeriodic],
) -> Result<OpenRegionReport<S::Elem>> {
    let mut trace = Vec::new();
    let mut seen = HashSet::new();
    let mut uniq = Vec::new();
    for t in sets {
        if seen.insert(triple_key(sys, t)?) {
            uniq.push(t.clone());
        }
    }
    let done = |verdict, trace| Ok(OpenRegionReport { verdict, trace });
    if uniq.is_empty() {
        trace.push("empty union".to_string());
        return done(RegionVerdict::RegularOpen, trace);
    }
    if uniq.len() == 1 {
        trace.push("a single basic compact open bisection of a faithful action".to_string());
        return done(RegionVerdict::RegularOpen, trace);
    }
    if box_separated(sys, &uniq, depth)? {
        trace.push("clopen source/range boxes separate the bisections; each piece is a basic bisection".to_string());
        return done(RegionVerdict::RegularOpen, trace);
    }
    let nucleus = sys.nucleus_elements();
    if let Ok(nuc) = &nucleus {
        if let Ok(crate::action::HausdorffVerdict::Hausdorff) = crate::action::hausdorff_test(sys, nuc) {
            trace.push("the groupoid is Hausdorff, so compact open sets are clopen".to_string());
            return done(RegionVerdict::RegularOpen, trace);
        }
    }
    let Ok(nuc) = nucleus else {
        trace.push("no nucleus available for the witness search".to_string());
        return done(RegionVerdict::Undecided { depth }, trace);
    };
    let ks: Vec<S::Elem> = nuc
        .into_iter()
        .filter(|k| !sys.is_identity(k).unwrap_or(true))
        .collect();
    let mut tried = HashSet::new();
    for len in 0..=depth {
        for b in &uniq {
            let Some(etas) = paths_after(sys, b.beta.last().copied(), len, sys.bounds().states) else {
                continue;
            };
            for eta in etas {
                let piece = restrict_bisection(sys, b, &eta)?;
                for k in &ks {
                    for w in periods {
                        let word = w.prepend(&piece.beta);
                        if check_infinite(sys, &word).is_err() {
                            continue;
                        }
                        let triple = Triple {
                            alpha: piece.alpha.clone(),
                            g: sys.mul(&piece.g, &sys.inv(k)),
                            beta: piece.beta.clone(),
                        };
                        let z = Germ { triple, word };
                        if !tried.insert((triple_key(sys, &z.triple)?, z.word.clone())) {
                            continue;
                        }
                        if !germ_in_closure(sys, &z, b)? {
                            continue;
                        }
                        let mut inside = false;
                        for d in &uniq {
                            if germ_in(sys, &z, d)? {
                                inside = true;
                                break;
                            }
                        }
                        if inside {
                            continue;
                        }
                        trace.push(format!(
                            "candidate {} lies in the closure of {} but in no listed bisection",
                            fmt_germ(sys, &z),
                            fmt_triple(sys, b)
                        ));
                        if certify_interior(sys, &z, &uniq, depth, &mut trace)? {
                            return done(RegionVerdict::NotRegularOpen(z), trace);
                        }
                        trace.pop();
                    }
                }
            }
        }
    }
    trace.push(format!("no certified witness with |η| ≤ {depth}"));
    done(RegionVerdict::Undecided { depth }, trace)
}
