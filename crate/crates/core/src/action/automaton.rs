use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{Bounds, SelfSimilar};
use crate::error::{Error, Result};
use crate::word::Letter;

type Sym = u32;

/// A reduced generator word. Symbols `0..k` are generators, `k..2k` their
/// formal inverses (involutions always use the generator symbol). The
/// rightmost symbol acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(Vec<Sym>);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(Vec::new())
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn shortlex(&self) -> (usize, &[Sym]) {
        (self.0.len(), &self.0)
    }
}

/// Canonical form of an element of a contracting group: the portrait down to
/// the first level where every restriction lies in the nucleus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ElementKey {
    depth: u32,
    perm: Vec<u32>,
    states: Vec<u32>,
}

impl ElementKey {
    /// Nucleus index, for elements of the nucleus.
    pub fn nucleus_index(&self) -> Option<usize> {
        (self.depth == 0).then(|| self.states[0] as usize)
    }
}

/// One generator of an automaton group: for each letter `x`, the image of
/// `x` and the restriction as a word in generator names (leftmost acts last).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub table: Vec<(Letter, Vec<String>)>,
}

impl GeneratorSpec {
    pub fn new(name: &str, table: &[(Letter, &[&str])]) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            table: table
                .iter()
                .map(|(y, r)| (*y, r.iter().map(|s| s.to_string()).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct SymData {
    image: Vec<Letter>,
    restr: Vec<Vec<Sym>>,
}

/// The nucleus: the finite restriction-closed set every element eventually
/// restricts into, sorted by (length, word).
#[derive(Debug, Clone)]
pub struct Nucleus {
    elements: Vec<GroupElement>,
    table: Vec<Vec<(Letter, usize)>>,
}

impl Nucleus {
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `(n_i·x, index of n_i|_x)`.
    pub fn transition(&self, i: usize, x: Letter) -> (Letter, usize) {
        self.table[i][x]
    }
}

/// An automaton group acting on words over `0..alphabet`.
pub struct AutomatonSystem {
    name: String,
    alphabet: usize,
    names: Vec<String>,
    syms: Vec<SymData>,
    inverse: Vec<Sym>,
    relations: Vec<String>,
    bounds: Bounds,
    nucleus: OnceLock<std::result::Result<Nucleus, Error>>,
    fingerprints: Mutex<HashMap<GroupElement, Vec<Letter>>>,
    nucleus_lookup: Mutex<HashMap<GroupElement, Option<usize>>>,
    keys: Mutex<HashMap<GroupElement, ElementKey>>,
}

impl fmt::Debug for AutomatonSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomatonSystem")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("generators", &self.names)
            .finish()
    }
}

fn invert_perm(p: &[Letter]) -> Vec<Letter> {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

impl AutomatonSystem {
    pub fn new(name: &str, alphabet: usize, gens: Vec<GeneratorSpec>, relations: Vec<String>) -> Result<Self> {
        Self::with_bounds(name, alphabet, gens, relations, Bounds::default())
    }

    pub fn with_bounds(
        name: &str,
        alphabet: usize,
        gens: Vec<GeneratorSpec>,
        relations: Vec<String>,
        bounds: Bounds,
    ) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidSystem(format!("alphabet size {alphabet} < 2")));
        }
        let k = gens.len();
        let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() || n == "e" || n.contains(['^', '*', ' ', '.']) {
                return Err(Error::InvalidSystem(format!("bad generator name `{n}`")));
            }
            if !seen.insert(n.clone()) {
                return Err(Error::InvalidSystem(format!("duplicate generator `{n}`")));
            }
        }
        let lookup = |s: &str| -> Result<Sym> {
            let (base, inverse) = match s.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (s, false),
            };
            let i = names
                .iter()
                .position(|n| n == base)
                .ok_or_else(|| Error::UnknownGenerator(s.to_string()))? as Sym;
            Ok(if inverse { i + k as Sym } else { i })
        };
        let mut syms = Vec::with_capacity(2 * k);
        for g in &gens {
            if g.table.len() != alphabet {
                return Err(Error::InvalidSystem(format!(
                    "generator `{}` has {} table rows, expected {alphabet}",
                    g.name,
                    g.table.len()
                )));
            }
            let image: Vec<Letter> = g.table.iter().map(|(y, _)| *y).collect();
            let mut hit = vec![false; alphabet];
            for &y in &image {
                if y >= alphabet || hit[y] {
                    return Err(Error::InvalidSystem(format!(
                        "generator `{}` does not permute the alphabet",
                        g.name
                    )));
                }
                hit[y] = true;
            }
            let restr = g
                .table
                .iter()
                .map(|(_, w)| w.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            syms.push(SymData { image, restr });
        }
        let flip = |s: Sym| if (s as usize) < k { s + k as Sym } else { s - k as Sym };
        for i in 0..k {
            let image = invert_perm(&syms[i].image);
            let mut restr = vec![Vec::new(); alphabet];
            for x in 0..alphabet {
                let y = syms[i].image[x];
                restr[y] = syms[i].restr[x].iter().rev().map(|&s| flip(s)).collect();
            }
            syms.push(SymData { image, restr });
        }
        let inverse: Vec<Sym> = (0..2 * k as Sym).map(flip).collect();
        let mut sys = AutomatonSystem {
            name: name.to_string(),
            alphabet,
            names,
            syms,
            inverse,
            relations,
            bounds,
            nucleus: OnceLock::new(),
            fingerprints: Mutex::new(HashMap::new()),
            nucleus_lookup: Mutex::new(HashMap::new()),
            keys: Mutex::new(HashMap::new()),
        };
        for s in 0..sys.syms.len() {
            for x in 0..alphabet {
                let w = sys.syms[s].restr[x].clone();
                sys.syms[s].restr[x] = sys.reduce(&w);
            }
        }
        let involutions: Vec<bool> = (0..k as Sym)
            .map(|s| sys.pair_equal(&sys.reduce(&[s, s]), &[]).unwrap_or(false))
            .collect();
        for s in 0..k {
            if involutions[s] {
                sys.inverse[s] = s as Sym;
                sys.inverse[s + k] = s as Sym;
            }
        }
        for s in 0..sys.syms.len() {
            for x in 0..alphabet {
                let w = sys.syms[s].restr[x].clone();
                sys.syms[s].restr[x] = sys.reduce(&w);
            }
        }
        Ok(sys)
    }

    /// Replaces the search limits; must be called before the nucleus is used.
    pub fn set_bounds(&mut self, bounds: Bounds) {
        self.bounds = bounds;
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn generator(&self, name: &str) -> Result<GroupElement> {
        self.parse_element(name)
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.names.len() as Sym).map(|s| GroupElement(vec![s])).collect()
    }

    /// True when the generator squares to the identity.
    pub fn is_involution(&self, generator: usize) -> bool {
        self.inverse[generator] == generator as Sym
    }

    fn canonical_sym(&self, s: Sym) -> Sym {
        let k = self.names.len() as Sym;
        if s >= k && self.inverse[(s - k) as usize] == s - k {
            s - k
        } else {
            s
        }
    }

    fn reduce(&self, w: &[Sym]) -> Vec<Sym> {
        let mut out: Vec<Sym> = Vec::with_capacity(w.len());
        for &s in w {
            let s = self.canonical_sym(s);
            if out.last() == Some(&self.inverse[s as usize]) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        out
    }

    fn act_syms(&self, w: &[Sym], x: Letter) -> (Letter, Vec<Sym>) {
        let mut cur = x;
        let mut parts: Vec<&[Sym]> = Vec::with_capacity(w.len());
        for &s in w.iter().rev() {
            let d = &self.syms[s as usize];
            parts.push(&d.restr[cur]);
            cur = d.image[cur];
        }
        let mut r = Vec::new();
        for p in parts.iter().rev() {
            r.extend_from_slice(p);
        }
        (cur, self.reduce(&r))
    }

    /// Pair recursion: the largest relation compatible with letter actions
    /// and restrictions. Decides equality whenever the reachable pair set is
    /// finite.
    fn pair_equal(&self, g: &[Sym], h: &[Sym]) -> Result<bool> {
        if g == h {
            return Ok(true);
        }
        let mut seen: HashSet<(Vec<Sym>, Vec<Sym>)> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((g.to_vec(), h.to_vec()));
        queue.push_back((g.to_vec(), h.to_vec()));
        while let Some((u, v)) = queue.pop_front() {
            for x in 0..self.alphabet {
                let (y1, u1) = self.act_syms(&u, x);
                let (y2, v1) = self.act_syms(&v, x);
                if y1 != y2 {
                    return Ok(false);
                }
                if u1 == v1 {
                    continue;
                }
                let pair = (u1, v1);
                if seen.contains(&pair) {
                    continue;
                }
                if seen.len() >= self.bounds.pairs {
                    return Err(Error::undecided("equality pair cache", self.bounds.pairs));
                }
                seen.insert(pair.clone());
                queue.push_back(pair);
            }
        }
        Ok(true)
    }

    fn fingerprint_depth(&self) -> usize {
        let mut d = 1;
        while d < 4 && self.alphabet.pow(d as u32 + 1) <= 64 {
            d += 1;
        }
        d
    }

    /// Images of all words of a fixed small length; equal elements have equal
    /// fingerprints.
    fn fingerprint(&self, g: &GroupElement) -> Vec<Letter> {
        if let Some(f) = self.fingerprints.lock().unwrap().get(g) {
            return f.clone();
        }
        let d = self.fingerprint_depth();
        let mut level = vec![(Vec::<Letter>::new(), g.0.clone())];
        for _ in 0..d {
            let mut next = Vec::with_capacity(level.len() * self.alphabet);
            for (img, h) in &level {
                for x in 0..self.alphabet {
                    let (y, r) = self.act_syms(h, x);
                    let mut w = img.clone();
                    w.push(y);
                    next.push((w, r));
                }
            }
            level = next;
        }
        let f: Vec<Letter> = level.into_iter().flat_map(|(w, _)| w).collect();
        self.fingerprints.lock().unwrap().insert(g.clone(), f.clone());
        f
    }

    /// Parses `e`, `1`, `∅` (identity), `bc`, `b*c`, `b c`, `t^-1`, `a^2`.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "1" || s == "∅" {
            return Ok(GroupElement::identity());
        }
        let k = self.names.len() as Sym;
        let tokens: Vec<String> = if s.contains(['*', ' ', '·']) {
            s.split(['*', ' ', '·']).filter(|t| !t.is_empty()).map(String::from).collect()
        } else if self.names.iter().all(|n| n.chars().count() == 1) {
            let chars: Vec<char> = s.chars().collect();
            let mut out = Vec::new();
            let mut i = 0;
            while i < chars.len() {
                let mut t = chars[i].to_string();
                i += 1;
                if chars.get(i) == Some(&'^') {
                    t.push('^');
                    i += 1;
                    if chars.get(i) == Some(&'-') {
                        t.push('-');
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        t.push(chars[i]);
                        i += 1;
                    }
                }
                out.push(t);
            }
            out
        } else {
            vec![s.to_string()]
        };
        let mut w = Vec::new();
        for t in tokens {
            if t == "e" {
                continue;
            }
            let (base, power) = match t.split_once('^') {
                Some((b, p)) => (
                    b,
                    p.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{t}`")))?,
                ),
                None => (t.as_str(), 1),
            };
            let i = self
                .names
                .iter()
                .position(|n| n == base)
                .ok_or_else(|| Error::UnknownGenerator(t.clone()))? as Sym;
            let sym = if power < 0 { i + k } else { i };
            w.extend(std::iter::repeat(sym).take(power.unsigned_abs() as usize));
        }
        Ok(GroupElement(self.reduce(&w)))
    }

    /// Element from raw symbols (reduced on the way in).
    pub fn element_from_symbols(&self, syms: &[u32]) -> Result<GroupElement> {
        let n = self.syms.len() as Sym;
        if let Some(&s) = syms.iter().find(|&&s| s >= n) {
            return Err(Error::InvalidArgument(format!("symbol {s} out of range")));
        }
        Ok(GroupElement(self.reduce(syms)))
    }

    pub fn nucleus(&self) -> Result<&Nucleus> {
        self.nucleus
            .get_or_init(|| self.compute_nucleus())
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn compute_nucleus(&self) -> Result<Nucleus> {
        let mut start = vec![GroupElement::identity()];
        for s in 0..self.syms.len() as Sym {
            start.push(GroupElement(self.reduce(&[s])));
        }
        let mut current = self.eventual_part(&start)?;
        loop {
            if current.len() * current.len() > self.bounds.nucleus {
                return Err(Error::ContractionNotCertified(self.bounds.nucleus));
            }
            let mut cand = current.clone();
            for a in &current {
                for b in &current {
                    cand.push(self.mul(a, b));
                }
            }
            let next = self.eventual_part(&cand)?;
            let mut reg = Registry::new(self, &current);
            let mut grew = false;
            for g in next {
                if reg.find(&g)?.is_none() {
                    reg.insert(g.clone());
                    current.push(g);
                    grew = true;
                }
            }
            if current.len() > self.bounds.nucleus {
                return Err(Error::ContractionNotCertified(self.bounds.nucleus));
            }
            if !grew {
                break;
            }
        }
        current.sort_by(|a, b| a.shortlex().cmp(&b.shortlex()));
        let reg = Registry::new(self, &current);
        let mut table = Vec::with_capacity(current.len());
        for g in &current {
            let mut row = Vec::with_capacity(self.alphabet);
            for x in 0..self.alphabet {
                let (y, r) = self.act_syms(&g.0, x);
                let j = reg
                    .find(&GroupElement(r))?
                    .expect("nucleus is closed under restriction");
                row.push((y, j));
            }
            table.push(row);
        }
        Ok(Nucleus {
            elements: current,
            table,
        })
    }

    /// Restriction closure of `start`, deduplicated, pruned to the elements
    /// reachable from a cycle of the restriction graph.
    fn eventual_part(&self, start: &[GroupElement]) -> Result<Vec<GroupElement>> {
        let mut reg = Registry::new(self, &[]);
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        for g in start {
            if reg.find(g)?.is_none() {
                reg.insert(g.clone());
                edges.push(Vec::new());
                queue.push_back(reg.elems.len() - 1);
            }
        }
        while let Some(i) = queue.pop_front() {
            for x in 0..self.alphabet {
                let (_, r) = self.act_syms(&reg.elems[i].0, x);
                let r = GroupElement(r);
                let j = match reg.find(&r)? {
                    Some(j) => j,
                    None => {
                        if reg.elems.len() >= self.bounds.nucleus {
                            return Err(Error::ContractionNotCertified(self.bounds.nucleus));
                        }
                        reg.insert(r);
                        edges.push(Vec::new());
                        queue.push_back(reg.elems.len() - 1);
                        reg.elems.len() - 1
                    }
                };
                edges[i].push(j);
            }
        }
        let on_cycle = nodes_on_cycles(&edges);
        let mut keep = vec![false; edges.len()];
        let mut queue: VecDeque<usize> = (0..edges.len()).filter(|&i| on_cycle[i]).collect();
        for &i in &queue {
            keep[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for &j in &edges[i] {
                if !keep[j] {
                    keep[j] = true;
                    queue.push_back(j);
                }
            }
        }
        Ok(reg
            .elems
            .into_iter()
            .zip(keep)
            .filter_map(|(g, k)| k.then_some(g))
            .collect())
    }

    /// Index of the nucleus element equal to `g`, if any.
    pub fn nucleus_index(&self, g: &GroupElement) -> Result<Option<usize>> {
        if let Some(r) = self.nucleus_lookup.lock().unwrap().get(g) {
            return Ok(*r);
        }
        let nuc = self.nucleus()?;
        let f = self.fingerprint(g);
        let mut found = None;
        for (i, n) in nuc.elements.iter().enumerate() {
            if self.fingerprint(n) == f && self.pair_equal(&n.0, &g.0)? {
                found = Some(i);
                break;
            }
        }
        self.nucleus_lookup.lock().unwrap().insert(g.clone(), found);
        Ok(found)
    }

    fn compute_key(&self, g: &GroupElement) -> Result<ElementKey> {
        const MAX_LEVEL: usize = 1 << 16;
        let mut level: Vec<(u32, GroupElement)> = vec![(0, g.clone())];
        let mut depth = 0u32;
        loop {
            let mut states = Vec::with_capacity(level.len());
            for (_, h) in &level {
                match self.nucleus_index(h)? {
                    Some(i) => states.push(i as u32),
                    None => break,
                }
            }
            if states.len() == level.len() {
                return Ok(ElementKey {
                    depth,
                    perm: level.iter().map(|(p, _)| *p).collect(),
                    states,
                });
            }
            if level.len() * self.alphabet > MAX_LEVEL {
                return Err(Error::undecided("portrait size", MAX_LEVEL));
            }
            let mut next = Vec::with_capacity(level.len() * self.alphabet);
            for (p, h) in &level {
                for x in 0..self.alphabet {
                    let (y, r) = self.act_syms(&h.0, x);
                    next.push((p * self.alphabet as u32 + y as u32, GroupElement(r)));
                }
            }
            level = next;
            depth += 1;
        }
    }

    /// Smallest element, in (length, word) order, of `n_i`'s nucleus class.
    pub fn nucleus_element(&self, i: usize) -> Result<GroupElement> {
        self.nucleus()?
            .elements
            .get(i)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("nucleus index {i} out of range")))
    }
}

/// Elements deduplicated up to equality, bucketed by fingerprint.
struct Registry<'a> {
    sys: &'a AutomatonSystem,
    elems: Vec<GroupElement>,
    exact: HashMap<GroupElement, usize>,
    buckets: HashMap<Vec<Letter>, Vec<usize>>,
}

impl<'a> Registry<'a> {
    fn new(sys: &'a AutomatonSystem, init: &[GroupElement]) -> Self {
        let mut r = Registry {
            sys,
            elems: Vec::new(),
            exact: HashMap::new(),
            buckets: HashMap::new(),
        };
        for g in init {
            r.insert(g.clone());
        }
        r
    }

    fn find(&self, g: &GroupElement) -> Result<Option<usize>> {
        if let Some(&i) = self.exact.get(g) {
            return Ok(Some(i));
        }
        if let Some(bucket) = self.buckets.get(&self.sys.fingerprint(g)) {
            for &i in bucket {
                if self.sys.pair_equal(&self.elems[i].0, &g.0)? {
                    return Ok(Some(i));
                }
            }
        }
        Ok(None)
    }

    fn insert(&mut self, g: GroupElement) {
        let i = self.elems.len();
        self.buckets.entry(self.sys.fingerprint(&g)).or_default().push(i);
        self.exact.insert(g.clone(), i);
        self.elems.push(g);
    }
}

/// Vertices lying on a directed cycle (Tarjan's strongly connected components).
fn nodes_on_cycles(edges: &[Vec<usize>]) -> Vec<bool> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut result = vec![false; n];
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < edges[v].len() {
                let w = edges[v][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    let cyclic = comp.len() > 1 || edges[v].contains(&v);
                    for w in comp {
                        result[w] = cyclic;
                    }
                }
            }
        }
    }
    result
}

impl SelfSimilar for AutomatonSystem {
    type Elem = GroupElement;
    type Key = ElementKey;

    fn name(&self) -> &str {
        &self.name
    }

    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn identity(&self) -> GroupElement {
        GroupElement::identity()
    }

    fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let mut w = g.0.clone();
        w.extend_from_slice(&h.0);
        GroupElement(self.reduce(&w))
    }

    fn parse_elem(&self, s: &str) -> Result<GroupElement> {
        self.parse_element(s)
    }

    fn nucleus_elements(&self) -> Result<Vec<GroupElement>> {
        Ok(self.nucleus()?.elements.clone())
    }

    fn inv(&self, g: &GroupElement) -> GroupElement {
        let w: Vec<Sym> = g.0.iter().rev().map(|&s| self.inverse[s as usize]).collect();
        GroupElement(self.reduce(&w))
    }

    fn act_letter(&self, g: &GroupElement, x: Letter) -> Result<(Letter, GroupElement)> {
        if x >= self.alphabet {
            return Err(Error::InvalidLetter {
                letter: x,
                size: self.alphabet,
            });
        }
        let (y, r) = self.act_syms(&g.0, x);
        Ok((y, GroupElement(r)))
    }

    fn key(&self, g: &GroupElement) -> Result<ElementKey> {
        if let Some(k) = self.keys.lock().unwrap().get(g) {
            return Ok(k.clone());
        }
        let k = self.compute_key(g)?;
        self.keys.lock().unwrap().insert(g.clone(), k.clone());
        Ok(k)
    }

    fn equal(&self, g: &GroupElement, h: &GroupElement) -> Result<bool> {
        self.pair_equal(&g.0, &h.0)
    }

    fn is_identity(&self, g: &GroupElement) -> Result<bool> {
        if g.is_empty() {
            return Ok(true);
        }
        if let Some(k) = self.keys.lock().unwrap().get(g) {
            // The identity is always the first nucleus element.
            return Ok(k.nucleus_index() == Some(0));
        }
        self.pair_equal(&g.0, &[])
    }

    fn format_elem(&self, g: &GroupElement) -> String {
        if g.is_empty() {
            return "e".to_string();
        }
        let k = self.names.len();
        let parts: Vec<String> = g
            .0
            .iter()
            .map(|&s| {
                let s = s as usize;
                if s < k {
                    self.names[s].clone()
                } else {
                    format!("{}^-1", self.names[s - k])
                }
            })
            .collect();
        let compact = self.names.iter().all(|n| n.chars().count() == 1);
        parts.join(if compact { "" } else { "*" })
    }
}
