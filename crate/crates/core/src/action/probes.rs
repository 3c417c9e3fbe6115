use std::collections::{HashMap, HashSet};

use super::{next_letters, path_context, AutomatonSystem, SelfSimilar};
use crate::error::{Error, Result};
use crate::word::{EventuallyPeriodic, Letter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Faithfulness {
    /// Every generator acts nontrivially and the nucleus elements are
    /// pairwise distinct. `relations` lists reduced generator words up to the
    /// probe length that act trivially; they are relations of the group, not
    /// failures of faithfulness.
    Faithful { nucleus_size: usize, relations: Vec<String> },
    NotFaithful { generator: String },
    Undecided { reason: String },
}

/// Checks that each generator acts nontrivially, then records the short
/// relations (reduced words of length at most `depth`, capped at 4).
pub fn faithfulness_probe(sys: &AutomatonSystem, depth: usize) -> Faithfulness {
    for g in sys.generators() {
        match sys.is_identity(&g) {
            Ok(true) => {
                return Faithfulness::NotFaithful {
                    generator: sys.format_elem(&g),
                }
            }
            Ok(false) => {}
            Err(e) => return Faithfulness::Undecided { reason: e.to_string() },
        }
    }
    let nucleus_size = match sys.nucleus() {
        Ok(n) => n.len(),
        Err(e) => return Faithfulness::Undecided { reason: e.to_string() },
    };
    let k = sys.generator_names().len() as u32;
    let mut relations = Vec::new();
    let mut seen = HashSet::new();
    let mut level = vec![Vec::<u32>::new()];
    for _ in 0..depth.min(4) {
        let mut next = Vec::new();
        for w in &level {
            for s in 0..2 * k {
                let mut v = w.clone();
                v.push(s);
                let Ok(g) = sys.element_from_symbols(&v) else { continue };
                if g.len() != v.len() || !seen.insert(g.clone()) {
                    continue;
                }
                match sys.is_identity(&g) {
                    Ok(true) => relations.push(sys.format_elem(&g)),
                    Ok(false) => next.push(v),
                    Err(e) => return Faithfulness::Undecided { reason: e.to_string() },
                }
            }
        }
        level = next;
    }
    Faithfulness::Faithful { nucleus_size, relations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OmegaFaithfulness<E> {
    /// For every prefix of length at least `n`, some word is moved by all
    /// restricted elements.
    HoldsAt(usize),
    /// Along the periodic part of the word, the restricted elements cycle
    /// through `stuck`, and no finite word is moved by all of them.
    FailureWitness {
        cycle_start: usize,
        cycle_len: usize,
        stuck: Vec<E>,
    },
    Undecided {
        bound: usize,
    },
}

/// Decides whether some finite word (allowed after `last`) is moved by every
/// element of `elems`. `None` when the search hits `depth`.
fn common_mover<S: SelfSimilar + ?Sized>(
    sys: &S,
    elems: &[S::Elem],
    last: Option<Letter>,
    depth: usize,
) -> Result<Option<bool>> {
    type State<K> = (Vec<K>, Option<usize>);
    let start = elems.to_vec();
    let mut seen: HashSet<State<S::Key>> = HashSet::new();
    let mut frontier = vec![(start, last)];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for (alive, last) in frontier {
            if alive.is_empty() {
                return Ok(Some(true));
            }
            let mut keys = Vec::with_capacity(alive.len());
            for g in &alive {
                if sys.is_identity(g)? {
                    keys.clear();
                    break;
                }
                keys.push(sys.key(g)?);
            }
            if keys.is_empty() {
                continue;
            }
            keys.sort();
            keys.dedup();
            if !seen.insert((keys, path_context(sys, last))) {
                continue;
            }
            if seen.len() > sys.bounds().states {
                return Ok(None);
            }
            for y in next_letters(sys, last) {
                let mut rest = Vec::new();
                for g in &alive {
                    let (z, r) = sys.act_letter(g, y)?;
                    if z == y {
                        rest.push(r);
                    }
                }
                next.push((rest, Some(y)));
            }
        }
        if next.is_empty() {
            return Ok(Some(false));
        }
        frontier = next;
    }
    Ok(if frontier.iter().any(|(a, _)| a.is_empty()) {
        Some(true)
    } else {
        None
    })
}

/// Probes the condition "for all long enough prefixes `μ` of `x` some `ξ`
/// has `f|_μ·ξ ≠ ξ` for every `f` in `fs`". Requires every prefix of `x` to
/// be fixed but not strongly fixed by every `f`.
pub fn omega_faithful_probe<S: SelfSimilar + ?Sized>(
    sys: &S,
    fs: &[S::Elem],
    x: &EventuallyPeriodic,
    depth: usize,
) -> Result<OmegaFaithfulness<S::Elem>> {
    if fs.is_empty() {
        return Err(Error::Precondition("empty element set".into()));
    }
    super::check_infinite(sys, x)?;
    for f in fs {
        if sys.is_identity(f)? {
            return Err(Error::Precondition(format!("{} is the identity", sys.format_elem(f))));
        }
    }
    let bound = sys.bounds().states;
    let mut seen: HashMap<(Vec<S::Key>, usize), usize> = HashMap::new();
    let mut tuples: Vec<Vec<S::Elem>> = Vec::new();
    let mut cur = fs.to_vec();
    let (start, len) = loop {
        let i = tuples.len();
        if i > bound {
            return Ok(OmegaFaithfulness::Undecided { bound });
        }
        let keys = cur.iter().map(|g| sys.key(g)).collect::<Result<Vec<_>>>()?;
        if let Some(&j) = seen.get(&(keys.clone(), x.phase(i))) {
            break (j, i - j);
        }
        seen.insert((keys, x.phase(i)), i);
        tuples.push(cur.clone());
        let a = x.letter(i);
        let mut next = Vec::with_capacity(cur.len());
        for (f, g) in fs.iter().zip(&cur) {
            let (b, r) = sys.act_letter(g, a)?;
            if b != a {
                return Err(Error::Precondition(format!(
                    "{} does not fix the prefix of length {} of {x}",
                    sys.format_elem(f),
                    i + 1
                )));
            }
            if sys.is_identity(&r)? {
                return Err(Error::Precondition(format!(
                    "{} strongly fixes the prefix of length {} of {x}",
                    sys.format_elem(f),
                    i + 1
                )));
            }
            next.push(r);
        }
        cur = next;
    };
    let mut verdicts = Vec::with_capacity(tuples.len());
    for (i, t) in tuples.iter().enumerate() {
        let last = if i == 0 { None } else { Some(x.letter(i - 1)) };
        verdicts.push(common_mover(sys, t, last, depth)?);
    }
    let cyc = &verdicts[start..start + len];
    if cyc.iter().all(|v| *v == Some(true)) {
        let n = (0..start).rev().find(|&i| verdicts[i] != Some(true)).map_or(0, |i| i + 1);
        return Ok(OmegaFaithfulness::HoldsAt(n));
    }
    if let Some(off) = cyc.iter().position(|v| *v == Some(false)) {
        return Ok(OmegaFaithfulness::FailureWitness {
            cycle_start: start,
            cycle_len: len,
            stuck: tuples[start + off].clone(),
        });
    }
    Ok(OmegaFaithfulness::Undecided { bound: depth })
}
