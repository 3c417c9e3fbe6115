//! Finite words and eventually periodic infinite words over a finite alphabet.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letters are indices `0..alphabet_size` (edges, for graph systems).
pub type Letter = usize;

/// A finite word. The empty word is the empty vector.
pub type Word = Vec<Letter>;

/// Writes a word as digits when every letter is below 10, otherwise as
/// dot-separated indices. The empty word is written `∅`.
pub fn format_word(w: &[Letter]) -> String {
    if w.is_empty() {
        return "∅".to_string();
    }
    if w.iter().all(|&x| x < 10) {
        w.iter().map(|x| char::from(b'0' + *x as u8)).collect()
    } else {
        w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Inverse of [`format_word`]; also accepts `""`, `-` and `∅` for the empty word.
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() || s == "∅" || s == "-" {
        return Ok(Vec::new());
    }
    if s.contains('.') {
        return s
            .split('.')
            .map(|t| {
                t.trim()
                    .parse::<Letter>()
                    .map_err(|_| Error::Parse(format!("bad word `{s}`")))
            })
            .collect();
    }
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as Letter)
                .ok_or_else(|| Error::Parse(format!("bad word `{s}`")))
        })
        .collect()
}

/// `pre · period^∞`, stored canonically: the period is primitive and the
/// preperiod as short as possible, so structural equality is word equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventuallyPeriodic {
    pre: Word,
    period: Word,
}

fn primitive_root(w: &[Letter]) -> Word {
    let n = w.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| w[i] == w[i - d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

impl EventuallyPeriodic {
    pub fn new(pre: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidWord("empty period".into()));
        }
        let mut period = primitive_root(&period);
        let mut pre = pre;
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Ok(EventuallyPeriodic { pre, period })
    }

    /// The constant word `x^∞`.
    pub fn constant(x: Letter) -> Self {
        EventuallyPeriodic {
            pre: Vec::new(),
            period: vec![x],
        }
    }

    /// Parses `pre(period)`, e.g. `01(1)` for 0 1 1 1 ..., or `(01)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_end_matches("^inf").trim_end_matches("^ω");
        let (pre, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Parse(format!("expected `pre(period)`, got `{s}`")))?;
        let period = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing `)` in `{s}`")))?;
        EventuallyPeriodic::new(parse_word(pre)?, parse_word(period)?)
    }

    pub fn preperiod(&self) -> &[Letter] {
        &self.pre
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn letter(&self, i: usize) -> Letter {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| self.letter(i)).collect()
    }

    pub fn starts_with(&self, w: &[Letter]) -> bool {
        w.iter().enumerate().all(|(i, &x)| self.letter(i) == x)
    }

    /// The word with its first `n` letters removed.
    pub fn drop_prefix(&self, n: usize) -> Self {
        if n <= self.pre.len() {
            return EventuallyPeriodic::new(self.pre[n..].to_vec(), self.period.clone())
                .expect("nonempty period");
        }
        let k = (n - self.pre.len()) % self.period.len();
        let mut period = self.period.clone();
        period.rotate_left(k);
        EventuallyPeriodic::new(Vec::new(), period).expect("nonempty period")
    }

    pub fn prepend(&self, w: &[Letter]) -> Self {
        let mut pre = w.to_vec();
        pre.extend_from_slice(&self.pre);
        EventuallyPeriodic::new(pre, self.period.clone()).expect("nonempty period")
    }

    /// Position class of index `i`: positions with the same phase see the same
    /// suffix.
    pub fn phase(&self, i: usize) -> usize {
        if i < self.pre.len() {
            i
        } else {
            self.pre.len() + (i - self.pre.len()) % self.period.len()
        }
    }

    /// Number of distinct phases (`|pre| + |period|`).
    pub fn n_phases(&self) -> usize {
        self.pre.len() + self.period.len()
    }

    /// True when every letter is in `0..size`.
    pub fn letters_below(&self, size: usize) -> bool {
        self.pre.iter().chain(&self.period).all(|&x| x < size)
    }

    /// Builds the canonical word from an output sequence in which the suffix
    /// from `start` on repeats with period `len`.
    pub fn from_cycle(out: &[Letter], start: usize, len: usize) -> Self {
        EventuallyPeriodic::new(out[..start].to_vec(), out[start..start + len].to_vec())
            .expect("nonempty period")
    }
}

impl fmt::Display for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = if self.pre.is_empty() {
            String::new()
        } else {
            format_word(&self.pre)
        };
        write!(f, "{pre}({})", format_word(&self.period))
    }
}
