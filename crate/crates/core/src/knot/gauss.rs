use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::KnotError;

/// Whether a strand passes over or under at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pass {
    Over,
    Under,
}

impl Pass {
    pub fn flipped(self) -> Pass {
        match self {
            Pass::Over => Pass::Under,
            Pass::Under => Pass::Over,
        }
    }

    fn sign(self) -> char {
        match self {
            Pass::Over => '+',
            Pass::Under => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GaussEntry {
    pub label: u32,
    pub pass: Pass,
}

/// Crossing sequence met while traversing a knot diagram.
///
/// Every label appears exactly twice, once `Over` and once `Under`. The empty
/// code is the unknot. Text form is `1- 2+ 3- 1+ 2- 3+` (`+` over, `-` under).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussCode {
    entries: Vec<GaussEntry>,
}

impl GaussCode {
    /// Builds a code after checking the pairing invariants.
    pub fn new(entries: Vec<GaussEntry>) -> Result<Self, KnotError> {
        let mut seen: HashMap<u32, Vec<Pass>> = HashMap::new();
        for e in &entries {
            if e.label == 0 {
                return Err(KnotError::MalformedToken("0".into()));
            }
            seen.entry(e.label).or_default().push(e.pass);
        }
        let mut labels: Vec<_> = seen.into_iter().collect();
        labels.sort_by_key(|(l, _)| *l);
        for (label, passes) in labels {
            if passes.len() != 2 {
                return Err(KnotError::LabelCount { label, count: passes.len() });
            }
            if passes[0] == passes[1] {
                return Err(KnotError::SamePassTwice { label });
            }
        }
        Ok(GaussCode { entries })
    }

    /// Builds a code from `(label, pass)` pairs emitted by a traversal and
    /// renumbers labels by first appearance.
    pub(crate) fn from_traversal(entries: Vec<GaussEntry>) -> Result<Self, KnotError> {
        Self::new(entries).map(|c| c.relabeled())
    }

    pub fn entries(&self) -> &[GaussEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// c(K) of this diagram: entry count / 2.
    pub fn crossing_count(&self) -> usize {
        self.entries.len() / 2
    }

    /// Renumbers labels 1, 2, ... in order of first appearance.
    pub fn relabeled(&self) -> GaussCode {
        GaussCode { entries: relabel(self.entries.iter().copied()) }
    }

    /// Every pass flipped (the mirror diagram).
    pub fn mirrored(&self) -> GaussCode {
        GaussCode {
            entries: self
                .entries
                .iter()
                .map(|e| GaussEntry { label: e.label, pass: e.pass.flipped() })
                .collect(),
        }
    }

    /// Lexicographically smallest representative over cyclic rotations,
    /// traversal reversal and first-appearance relabeling. Mirror images are
    /// not identified.
    pub fn canonical(&self) -> GaussCode {
        let n = self.entries.len();
        if n == 0 {
            return GaussCode::default();
        }
        let mut best: Option<Vec<GaussEntry>> = None;
        for reverse in [false, true] {
            for start in 0..n {
                let seq = (0..n).map(|k| {
                    let idx = if reverse { (start + n - k) % n } else { (start + k) % n };
                    self.entries[idx]
                });
                let candidate = relabel(seq);
                if best.as_ref().is_none_or(|b| candidate < *b) {
                    best = Some(candidate);
                }
            }
        }
        GaussCode { entries: best.unwrap_or_default() }
    }

    /// True if both codes describe the same traversal up to the canonical orbit.
    pub fn equivalent(&self, other: &GaussCode) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}

fn relabel(seq: impl Iterator<Item = GaussEntry>) -> Vec<GaussEntry> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    seq.map(|e| {
        let next = map.len() as u32 + 1;
        let label = *map.entry(e.label).or_insert(next);
        GaussEntry { label, pass: e.pass }
    })
    .collect()
}

/// Parses whitespace-separated `<label><+|->` tokens.
pub fn parse_gauss_code(text: &str) -> Result<GaussCode, KnotError> {
    let mut entries = Vec::new();
    for token in text.split_whitespace() {
        let (digits, pass) = if let Some(d) = token.strip_suffix('+') {
            (d, Pass::Over)
        } else if let Some(d) = token.strip_suffix('-').or_else(|| token.strip_suffix('\u{2212}')) {
            (d, Pass::Under)
        } else {
            return Err(KnotError::MalformedToken(token.to_string()));
        };
        let label: u32 = digits
            .parse()
            .ok()
            .filter(|l| *l > 0 && digits.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| KnotError::MalformedToken(token.to_string()))?;
        entries.push(GaussEntry { label, pass });
    }
    GaussCode::new(entries)
}

/// Canonical representative of `code`; see [`GaussCode::canonical`].
pub fn canonicalize(code: &GaussCode) -> GaussCode {
    code.canonical()
}

impl FromStr for GaussCode {
    type Err = KnotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gauss_code(s)
    }
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", e.label, e.pass.sign())?;
        }
        Ok(())
    }
}

impl Serialize for GaussCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_gauss_code(&text).map_err(serde::de::Error::custom)
    }
}
