//! Self-similar actions on words: the [`SelfSimilar`] interface, generic
//! word/infinite-word actions, fixed-word predicates and the fixed-word graph
//! used for Hausdorffness.

mod automaton;
mod builtin;
mod probes;
mod spec_file;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{EventuallyPeriodic, Letter, Word};

pub use automaton::{AutomatonSystem, ElementKey, GeneratorSpec, GroupElement, Nucleus};
pub use builtin::{builtin, grigorchuk, odometer2, BUILTIN_NAMES};
pub use probes::{faithfulness_probe, omega_faithful_probe, Faithfulness, OmegaFaithfulness};
pub use spec_file::{load_spec, parse_spec, GeneratorEntry, RestrictionWord, SpecFormat, SystemSpec, TableEntry};

/// Search limits. Exceeding one is reported as an error or an `Undecided`
/// verdict, never as a guessed answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Pair cache size for pair-recursion equality.
    pub pairs: usize,
    /// Element count for the nucleus computation.
    pub nucleus: usize,
    /// Word-search depth.
    pub depth: usize,
    /// States visited by cycle detection and graph searches.
    pub states: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            pairs: 100_000,
            nucleus: 10_000,
            depth: 12,
            states: 100_000,
        }
    }
}

/// A length-preserving action of a group on the paths of a finite graph
/// (a one-vertex graph for ordinary alphabets), with restriction cocycle.
///
/// Products act right to left: `mul(g, h)` acts by `h` first.
pub trait SelfSimilar {
    /// Representation of group elements (not canonical).
    type Elem: Clone + Debug + PartialEq + Eq + Hash + PartialOrd + Ord + Send + Sync;
    /// Canonical form: `key(g) == key(h)` iff `g` and `h` act identically.
    type Key: Clone + Debug + PartialEq + Eq + Hash + PartialOrd + Ord + Send + Sync;

    fn name(&self) -> &str;
    fn alphabet_size(&self) -> usize;
    fn bounds(&self) -> &Bounds;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem;
    fn inv(&self, g: &Self::Elem) -> Self::Elem;

    /// `(g·x, g|_x)`.
    fn act_letter(&self, g: &Self::Elem, x: Letter) -> Result<(Letter, Self::Elem)>;

    fn key(&self, g: &Self::Elem) -> Result<Self::Key>;

    fn equal(&self, g: &Self::Elem, h: &Self::Elem) -> Result<bool> {
        Ok(self.key(g)? == self.key(h)?)
    }

    fn is_identity(&self, g: &Self::Elem) -> Result<bool> {
        self.equal(g, &self.identity())
    }

    fn format_elem(&self, g: &Self::Elem) -> String;

    /// `g·w` for an eventually periodic word. The default detects a repeated
    /// (restriction, position) pair, which terminates for contracting actions.
    fn act_eventually_periodic(&self, g: &Self::Elem, w: &EventuallyPeriodic) -> Result<EventuallyPeriodic> {
        act_infinite_by_cycles(self, g, w)
    }

    /// Inverse of [`SelfSimilar::format_elem`].
    fn parse_elem(&self, s: &str) -> Result<Self::Elem> {
        Err(Error::Parse(format!("{} cannot parse elements (`{s}`)", self.name())))
    }

    /// The nucleus, when the action is known to be contracting.
    fn nucleus_elements(&self) -> Result<Vec<Self::Elem>> {
        Err(Error::Precondition(format!("{} has no computed nucleus", self.name())))
    }

    fn format_letter(&self, x: Letter) -> String {
        x.to_string()
    }

    /// Source vertex of an edge; paths read `x y` only when `source(x) == range(y)`.
    fn source(&self, _x: Letter) -> usize {
        0
    }

    fn range(&self, _x: Letter) -> usize {
        0
    }

    /// Number of vertices of the underlying graph.
    fn vertex_count(&self) -> usize {
        1
    }

    fn format_word(&self, w: &[Letter]) -> String {
        if (0..self.alphabet_size()).all(|x| self.format_letter(x) == x.to_string()) {
            crate::word::format_word(w)
        } else if w.is_empty() {
            "∅".to_string()
        } else {
            w.iter().map(|&x| self.format_letter(x)).collect::<Vec<_>>().join(" ")
        }
    }
}

/// Inverse of [`SelfSimilar::format_word`].
pub fn parse_sys_word<S: SelfSimilar + ?Sized>(sys: &S, s: &str) -> Result<Word> {
    if (0..sys.alphabet_size()).all(|x| sys.format_letter(x) == x.to_string()) {
        let w = crate::word::parse_word(s)?;
        check_word(sys, &w)?;
        return Ok(w);
    }
    let s = s.trim();
    if s.is_empty() || s == "∅" || s == "-" {
        return Ok(Vec::new());
    }
    let w = s
        .split_whitespace()
        .map(|t| {
            (0..sys.alphabet_size())
                .find(|&x| sys.format_letter(x) == t)
                .ok_or_else(|| Error::Parse(format!("unknown letter `{t}`")))
        })
        .collect::<Result<Word>>()?;
    check_word(sys, &w)?;
    Ok(w)
}

/// Letters that may follow a path whose last letter is `last`.
pub fn next_letters<S: SelfSimilar + ?Sized>(sys: &S, last: Option<Letter>) -> Vec<Letter> {
    (0..sys.alphabet_size())
        .filter(|&y| last.map_or(true, |x| sys.source(x) == sys.range(y)))
        .collect()
}

/// The part of a path's history that constrains its continuations: the
/// source of its last edge, or nothing on one-vertex graphs.
pub fn path_context<S: SelfSimilar + ?Sized>(sys: &S, last: Option<Letter>) -> Option<usize> {
    if sys.vertex_count() == 1 {
        None
    } else {
        last.map(|x| sys.source(x))
    }
}

/// Checks letters and the path convention.
pub fn check_word<S: SelfSimilar + ?Sized>(sys: &S, w: &[Letter]) -> Result<()> {
    for (i, &x) in w.iter().enumerate() {
        if x >= sys.alphabet_size() {
            return Err(Error::InvalidLetter {
                letter: x,
                size: sys.alphabet_size(),
            });
        }
        if i > 0 && sys.source(w[i - 1]) != sys.range(x) {
            return Err(Error::InvalidWord(format!(
                "{} cannot follow {}",
                sys.format_letter(x),
                sys.format_letter(w[i - 1])
            )));
        }
    }
    Ok(())
}

/// Checks an infinite word, including the wrap-around of its period.
pub fn check_infinite<S: SelfSimilar + ?Sized>(sys: &S, w: &EventuallyPeriodic) -> Result<()> {
    check_word(sys, &w.prefix(w.n_phases() + w.period().len()))
}

/// `(g·α, g|_α)`.
pub fn act_word<S: SelfSimilar + ?Sized>(sys: &S, g: &S::Elem, w: &[Letter]) -> Result<(Word, S::Elem)> {
    let mut cur = g.clone();
    let mut out = Vec::with_capacity(w.len());
    for &x in w {
        let (y, r) = sys.act_letter(&cur, x)?;
        out.push(y);
        cur = r;
    }
    Ok((out, cur))
}

pub fn restrict<S: SelfSimilar + ?Sized>(sys: &S, g: &S::Elem, w: &[Letter]) -> Result<S::Elem> {
    Ok(act_word(sys, g, w)?.1)
}

/// `g·w` for an eventually periodic `w`.
pub fn act_infinite<S: SelfSimilar + ?Sized>(
    sys: &S,
    g: &S::Elem,
    w: &EventuallyPeriodic,
) -> Result<EventuallyPeriodic> {
    sys.act_eventually_periodic(g, w)
}

/// `g·w` by cycle detection on (restriction, position class).
pub fn act_infinite_by_cycles<S: SelfSimilar + ?Sized>(
    sys: &S,
    g: &S::Elem,
    w: &EventuallyPeriodic,
) -> Result<EventuallyPeriodic> {
    if !w.letters_below(sys.alphabet_size()) {
        return Err(Error::InvalidWord(format!("{w} has letters outside the alphabet")));
    }
    let bound = sys.bounds().states;
    let mut seen: HashMap<(S::Key, usize), usize> = HashMap::new();
    let mut out = Vec::new();
    let mut cur = g.clone();
    for i in 0..=bound {
        let state = (sys.key(&cur)?, w.phase(i));
        if let Some(&j) = seen.get(&state) {
            return Ok(EventuallyPeriodic::from_cycle(&out, j, i - j));
        }
        seen.insert(state, i);
        let (y, r) = sys.act_letter(&cur, w.letter(i))?;
        out.push(y);
        cur = r;
    }
    Err(Error::NonContracting(bound))
}

pub fn is_fixed<S: SelfSimilar + ?Sized>(sys: &S, g: &S::Elem, w: &[Letter]) -> Result<bool> {
    Ok(act_word(sys, g, w)?.0 == w)
}

pub fn is_strongly_fixed<S: SelfSimilar + ?Sized>(sys: &S, g: &S::Elem, w: &[Letter]) -> Result<bool> {
    let (img, r) = act_word(sys, g, w)?;
    Ok(img == w && sys.is_identity(&r)?)
}

/// Strongly fixed with no strongly fixed proper prefix. The empty word is
/// never minimal strongly fixed for a nontrivial element.
pub fn is_msfw<S: SelfSimilar + ?Sized>(sys: &S, g: &S::Elem, w: &[Letter]) -> Result<bool> {
    let mut cur = g.clone();
    if w.is_empty() || sys.is_identity(&cur)? {
        return Ok(false);
    }
    for (i, &x) in w.iter().enumerate() {
        let (y, r) = sys.act_letter(&cur, x)?;
        if y != x {
            return Ok(false);
        }
        cur = r;
        let id = sys.is_identity(&cur)?;
        if id {
            return Ok(i + 1 == w.len());
        }
    }
    Ok(false)
}

/// All minimal strongly fixed words of length at most `max_len`, in
/// lexicographic order.
pub fn enumerate_msfw<S: SelfSimilar + ?Sized>(sys: &S, g: &S::Elem, max_len: usize) -> Result<Vec<Word>> {
    if sys.is_identity(g)? {
        return Err(Error::Precondition(
            "minimal strongly fixed words are defined for non-identity elements".into(),
        ));
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    msfw_dfs(sys, g, max_len, &mut path, &mut out)?;
    Ok(out)
}

fn msfw_dfs<S: SelfSimilar + ?Sized>(
    sys: &S,
    g: &S::Elem,
    max_len: usize,
    path: &mut Word,
    out: &mut Vec<Word>,
) -> Result<()> {
    if path.len() >= max_len {
        return Ok(());
    }
    for x in next_letters(sys, path.last().copied()) {
        let (y, r) = sys.act_letter(g, x)?;
        if y != x {
            continue;
        }
        path.push(x);
        if sys.is_identity(&r)? {
            out.push(path.clone());
        } else {
            msfw_dfs(sys, &r, max_len, path, out)?;
        }
        path.pop();
    }
    Ok(())
}

/// The graph of fixed letters: vertices are (restriction, last edge source),
/// an edge `x` from `h` to `h|_x` whenever `h·x = x`. Identity vertices are
/// sinks.
pub struct FixedGraph<S: SelfSimilar + ?Sized> {
    pub nodes: Vec<S::Elem>,
    pub is_identity: Vec<bool>,
    pub edges: Vec<Vec<(Letter, usize)>>,
    parent: Vec<Option<(usize, Letter)>>,
}

impl<S: SelfSimilar + ?Sized> FixedGraph<S> {
    /// Explores everything reachable from `g` (after a path ending in `last`).
    pub fn explore(sys: &S, g: &S::Elem, last: Option<Letter>) -> Result<Self> {
        let bound = sys.bounds().states;
        let mut index: HashMap<(S::Key, Option<usize>), usize> = HashMap::new();
        let mut graph = FixedGraph {
            nodes: Vec::new(),
            is_identity: Vec::new(),
            edges: Vec::new(),
            parent: Vec::new(),
        };
        let mut ctx = Vec::new();
        index.insert((sys.key(g)?, path_context(sys, last)), 0);
        graph.push(sys, g.clone(), None)?;
        ctx.push(last);
        let mut i = 0;
        while i < graph.nodes.len() {
            if !graph.is_identity[i] {
                let h = graph.nodes[i].clone();
                for x in next_letters(sys, ctx[i]) {
                    let (y, r) = sys.act_letter(&h, x)?;
                    if y != x {
                        continue;
                    }
                    let k = (sys.key(&r)?, path_context(sys, Some(x)));
                    let j = match index.get(&k) {
                        Some(&j) => j,
                        None => {
                            if graph.nodes.len() >= bound {
                                return Err(Error::undecided("fixed-word graph states", bound));
                            }
                            let j = graph.nodes.len();
                            index.insert(k, j);
                            graph.push(sys, r, Some((i, x)))?;
                            ctx.push(Some(x));
                            j
                        }
                    };
                    graph.edges[i].push((x, j));
                }
            }
            i += 1;
        }
        Ok(graph)
    }

    fn push(&mut self, sys: &S, g: S::Elem, parent: Option<(usize, Letter)>) -> Result<()> {
        self.is_identity.push(sys.is_identity(&g)?);
        self.nodes.push(g);
        self.edges.push(Vec::new());
        self.parent.push(parent);
        Ok(())
    }

    /// Letters of the exploration-tree path from the start to `v`.
    pub fn path_to(&self, mut v: usize) -> Word {
        let mut w = Vec::new();
        while let Some((p, x)) = self.parent[v] {
            w.push(x);
            v = p;
        }
        w.reverse();
        w
    }

    /// Vertices from which an identity vertex is reachable.
    pub fn reaches_identity(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut rev = vec![Vec::new(); n];
        for (i, es) in self.edges.iter().enumerate() {
            for &(_, j) in es {
                rev[j].push(i);
            }
        }
        let mut ok = self.is_identity.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| ok[i]).collect();
        while let Some(j) = queue.pop_front() {
            for &i in &rev[j] {
                if !ok[i] {
                    ok[i] = true;
                    queue.push_back(i);
                }
            }
        }
        ok
    }

    /// Shortest path (letters, vertices after each letter) from `from` to the
    /// first vertex satisfying `target`, using at least one edge.
    fn shortest(&self, from: usize, target: impl Fn(usize) -> bool) -> Option<(Word, Vec<usize>)> {
        let n = self.nodes.len();
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &(x, j) in &self.edges[from] {
            if !seen[j] {
                seen[j] = true;
                prev[j] = Some((from, x));
                queue.push_back(j);
            }
        }
        while let Some(v) = queue.pop_front() {
            if target(v) {
                let mut letters = Vec::new();
                let mut verts = Vec::new();
                let mut u = v;
                loop {
                    let (p, x) = prev[u].expect("bfs predecessor");
                    letters.push(x);
                    verts.push(u);
                    if p == from {
                        break;
                    }
                    u = p;
                }
                letters.reverse();
                verts.reverse();
                return Some((letters, verts));
            }
            for &(x, j) in &self.edges[v] {
                if !seen[j] {
                    seen[j] = true;
                    prev[j] = Some((v, x));
                    queue.push_back(j);
                }
            }
        }
        None
    }
}

/// True when some (possibly empty) word `ξ`, allowed after `last`, has
/// `g·ξ = ξ` and `g|_ξ = 1`.
pub fn extends_to_strongly_fixed<S: SelfSimilar + ?Sized>(
    sys: &S,
    g: &S::Elem,
    last: Option<Letter>,
) -> Result<bool> {
    if sys.is_identity(g)? {
        return Ok(true);
    }
    let graph = FixedGraph::explore(sys, g, last)?;
    Ok(graph.is_identity.iter().any(|&b| b))
}

/// Pumping witness for infinitely many minimal strongly fixed words:
/// `prefix · cycle^n · exit` is minimal strongly fixed for `element`, all n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HausdorffWitness<E> {
    pub element: E,
    pub prefix: Word,
    pub cycle: Word,
    /// Restrictions visited around the cycle, starting at the cycle entry.
    pub cycle_states: Vec<E>,
    pub exit: Word,
}

impl<E> HausdorffWitness<E> {
    pub fn family_member(&self, n: usize) -> Word {
        let mut w = self.prefix.clone();
        for _ in 0..n {
            w.extend_from_slice(&self.cycle);
        }
        w.extend_from_slice(&self.exit);
        w
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HausdorffVerdict<E> {
    Hausdorff,
    NonHausdorff(HausdorffWitness<E>),
    Undecided { bound: usize },
}

/// Looks for a non-identity cycle in the fixed-word graph of `g` that can
/// reach the identity. Returns `None` when `g` has finitely many minimal
/// strongly fixed words.
pub fn msfw_pumping_witness<S: SelfSimilar + ?Sized>(
    sys: &S,
    g: &S::Elem,
) -> Result<Option<HausdorffWitness<S::Elem>>> {
    if sys.is_identity(g)? {
        return Ok(None);
    }
    let graph = FixedGraph::explore(sys, g, None)?;
    let live = graph.reaches_identity();
    for v in 0..graph.nodes.len() {
        if graph.is_identity[v] || !live[v] {
            continue;
        }
        let Some((cycle, verts)) = graph.shortest(v, |u| u == v) else {
            continue;
        };
        let (exit, _) = graph
            .shortest(v, |u| graph.is_identity[u])
            .expect("live vertex reaches the identity");
        let mut cycle_states = vec![graph.nodes[v].clone()];
        cycle_states.extend(verts[..verts.len() - 1].iter().map(|&u| graph.nodes[u].clone()));
        return Ok(Some(HausdorffWitness {
            element: g.clone(),
            prefix: graph.path_to(v),
            cycle,
            cycle_states,
            exit,
        }));
    }
    Ok(None)
}

/// Hausdorffness of the germ groupoid: some element among `candidates` (the
/// nucleus, for contracting actions) has infinitely many minimal strongly
/// fixed words iff the groupoid is not Hausdorff.
pub fn hausdorff_test<S: SelfSimilar + ?Sized>(sys: &S, candidates: &[S::Elem]) -> Result<HausdorffVerdict<S::Elem>> {
    for g in candidates {
        match msfw_pumping_witness(sys, g) {
            Ok(Some(w)) => return Ok(HausdorffVerdict::NonHausdorff(w)),
            Ok(None) => {}
            Err(Error::Undecided { bound, .. }) => return Ok(HausdorffVerdict::Undecided { bound }),
            Err(e) => return Err(e),
        }
    }
    Ok(HausdorffVerdict::Hausdorff)
}

/// Distinct elements up to equality, keeping first occurrences.
pub fn dedup_elems<S: SelfSimilar + ?Sized>(sys: &S, elems: &[S::Elem]) -> Result<Vec<S::Elem>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in elems {
        if seen.insert(sys.key(g)?) {
            out.push(g.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
