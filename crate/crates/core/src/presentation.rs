//! Homogeneous quadratic presentations and the divisibility validator.
//!
//! A presentation is an alphabet plus relations `ab = cd` between words of
//! length two. The monoid it defines is the quotient of the free monoid by the
//! congruence those pairs generate. Because every relation preserves length,
//! each congruence class is finite and the word problem is decidable by
//! enumeration (see [`crate::element`]).
//!
//! [`validate_divisibility`] decides whether the presented monoid is a (left)
//! divisibility monoid, using Kuske's local conditions on words of length at
//! most three.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::element::{ClassBudget, Engine, Monoid};
use crate::error::{Error, Result};
use crate::lattice::divisor_lattice;

/// Index of a generator in its [`Alphabet`].
pub type Generator = u8;

/// Largest supported alphabet. Pair indices and permutation masks assume it.
pub const MAX_RANK: usize = 16;

/// A finite sequence of generator indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Generator>);

impl Word {
    pub fn new(letters: Vec<Generator>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(g: Generator) -> Self {
        Word(vec![g])
    }

    pub fn concat(&self, other: &[Generator]) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(other);
        Word(letters)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn into_vec(self) -> Vec<Generator> {
        self.0
    }
}

impl Deref for Word {
    type Target = [Generator];

    fn deref(&self) -> &[Generator] {
        &self.0
    }
}

impl From<Vec<Generator>> for Word {
    fn from(letters: Vec<Generator>) -> Self {
        Word(letters)
    }
}

impl From<&[Generator]> for Word {
    fn from(letters: &[Generator]) -> Self {
        Word(letters.to_vec())
    }
}

/// Ordered, duplicate-free list of generator names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for s in &symbols {
            check_generator_name(s)?;
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateGenerator(s.clone()));
            }
        }
        if symbols.len() > MAX_RANK {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: format!("at most {MAX_RANK} generators are supported"),
            });
        }
        Ok(Alphabet { symbols })
    }

    /// `x y z t u v w` for small ranks, `g7 g8 ...` beyond.
    pub fn standard(rank: usize) -> Self {
        const NAMES: [&str; 7] = ["x", "y", "z", "t", "u", "v", "w"];
        let symbols = (0..rank)
            .map(|i| match NAMES.get(i) {
                Some(name) => (*name).to_string(),
                None => format!("g{i}"),
            })
            .collect();
        Alphabet { symbols }
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, g: Generator) -> &str {
        &self.symbols[g as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Generator> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| i as Generator)
    }

    /// Space-separated names; the empty word renders as `1`.
    pub fn render(&self, letters: &[Generator]) -> String {
        if letters.is_empty() {
            return "1".to_string();
        }
        letters
            .iter()
            .map(|&g| self.name(g))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses `"x y z"`, `"1"`, or (when every generator name is a single
    /// character) the compact form `"xyz"`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Word::empty());
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut letters = Vec::new();
        for token in &tokens {
            match self.index_of(token) {
                Some(g) => letters.push(g),
                None if tokens.len() == 1 && self.symbols.iter().all(|s| s.chars().count() == 1) => {
                    for c in token.chars() {
                        let g = self
                            .index_of(c.encode_utf8(&mut [0; 4]))
                            .ok_or_else(|| Error::UnknownGenerator(c.to_string()))?;
                        letters.push(g);
                    }
                }
                None => return Err(Error::UnknownGenerator(token.to_string())),
            }
        }
        Ok(Word(letters))
    }
}

fn check_generator_name(name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name == "1"
        || name.contains(|c: char| c.is_whitespace() || c == '=' || c == '#' || c == ':');
    if bad {
        Err(Error::InvalidGeneratorName(name.to_string()))
    } else {
        Ok(())
    }
}

/// One relation `left = right` between words of length two, stored with the
/// lexicographically smaller side first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationPair {
    pub left: [Generator; 2],
    pub right: [Generator; 2],
}

impl RelationPair {
    /// Returns `None` for the trivial relation `w = w`.
    pub fn new(a: [Generator; 2], b: [Generator; 2]) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(RelationPair { left: a, right: b }),
            std::cmp::Ordering::Greater => Some(RelationPair { left: b, right: a }),
            std::cmp::Ordering::Equal => None,
        }
    }
}

/// A homogeneous quadratic presentation `<Σ : relations>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticPresentation {
    alphabet: Alphabet,
    relations: Vec<RelationPair>,
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: Vec<String>,
    #[serde(default)]
    relations: Vec<[Vec<String>; 2]>,
}

impl QuadraticPresentation {
    pub fn new(alphabet: Alphabet, relations: impl IntoIterator<Item = RelationPair>) -> Result<Self> {
        let rank = alphabet.rank();
        let mut set = BTreeSet::new();
        for r in relations {
            for &g in r.left.iter().chain(r.right.iter()) {
                if g as usize >= rank {
                    return Err(Error::UnknownGenerator(format!("#{g}")));
                }
            }
            set.insert(r);
        }
        Ok(QuadraticPresentation {
            alphabet,
            relations: set.into_iter().collect(),
        })
    }

    /// Builds a presentation from named relation sides, e.g.
    /// `from_relations(&["x","y"], &[("x y", "y x")])`.
    pub fn from_relations(generators: &[&str], relations: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Alphabet::new(generators.iter().copied())?;
        let mut pairs = Vec::new();
        for (i, (l, r)) in relations.iter().enumerate() {
            let l = relation_side(&alphabet.parse_word(l)?, l, i + 1)?;
            let r = relation_side(&alphabet.parse_word(r)?, r, i + 1)?;
            pairs.extend(RelationPair::new(l, r));
        }
        QuadraticPresentation::new(alphabet, pairs)
    }

    /// Presentation whose length-two classes are exactly `classes`
    /// (each class is joined to its first member).
    pub fn from_classes(alphabet: Alphabet, classes: &[Vec<[Generator; 2]>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for class in classes {
            if let Some((&first, rest)) = class.split_first() {
                pairs.extend(rest.iter().filter_map(|&w| RelationPair::new(first, w)));
            }
        }
        QuadraticPresentation::new(alphabet, pairs)
    }

    /// Parses the text format, or the JSON format when the input starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            parse_text(text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PresentationJson = serde_json::from_str(text)?;
        let alphabet = Alphabet::new(raw.generators)?;
        let mut pairs = Vec::new();
        for (i, [l, r]) in raw.relations.iter().enumerate() {
            let side = |names: &Vec<String>| -> Result<[Generator; 2]> {
                let letters = names
                    .iter()
                    .map(|n| alphabet.index_of(n).ok_or_else(|| Error::UnknownGenerator(n.clone())))
                    .collect::<Result<Vec<_>>>()?;
                relation_side(&Word(letters), &names.join(" "), i + 1)
            };
            pairs.extend(RelationPair::new(side(l)?, side(r)?));
        }
        QuadraticPresentation::new(alphabet, pairs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let side = |w: [Generator; 2]| -> Vec<String> {
            w.iter().map(|&g| self.alphabet.name(g).to_string()).collect()
        };
        let raw = PresentationJson {
            generators: self.alphabet.symbols().to_vec(),
            relations: self.relations.iter().map(|r| [side(r.left), side(r.right)]).collect(),
        };
        serde_json::to_value(raw).expect("presentation serializes")
    }

    /// Text form accepted by [`QuadraticPresentation::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("generators: {}\nrelations:\n", self.alphabet.symbols().join(" "));
        for r in &self.relations {
            out.push_str(&format!(
                "{} = {}\n",
                self.alphabet.render(&r.left),
                self.alphabet.render(&r.right)
            ));
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn relations(&self) -> &[RelationPair] {
        &self.relations
    }

    /// The presentation of the opposite monoid (every word read backwards).
    pub fn opposite(&self) -> Self {
        let rev = |[a, b]: [Generator; 2]| [b, a];
        let pairs = self
            .relations
            .iter()
            .filter_map(|r| RelationPair::new(rev(r.left), rev(r.right)));
        QuadraticPresentation::new(self.alphabet.clone(), pairs).expect("same alphabet")
    }

    /// Relabels generator `g` as `perm[g]`, keeping the alphabet names.
    pub fn permuted(&self, perm: &[Generator]) -> Self {
        let map = |[a, b]: [Generator; 2]| [perm[a as usize], perm[b as usize]];
        let pairs = self
            .relations
            .iter()
            .filter_map(|r| RelationPair::new(map(r.left), map(r.right)));
        QuadraticPresentation::new(self.alphabet.clone(), pairs).expect("same alphabet")
    }
}

impl fmt::Display for QuadraticPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|r| {
                format!(
                    "{}={}",
                    self.alphabet.render(&r.left).replace(' ', ""),
                    self.alphabet.render(&r.right).replace(' ', "")
                )
            })
            .collect();
        write!(f, "<{} : {}>", self.alphabet.symbols().join(","), rels.join(", "))
    }
}

fn relation_side(w: &Word, raw: &str, line: usize) -> Result<[Generator; 2]> {
    match **w {
        [a, b] => Ok([a, b]),
        _ => Err(Error::RelationLength {
            line,
            side: raw.trim().to_string(),
            len: w.len(),
        }),
    }
}

fn parse_text(text: &str) -> Result<QuadraticPresentation> {
    let mut alphabet: Option<Alphabet> = None;
    let mut in_relations = false;
    let mut pairs = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let column_of = |needle: &str| raw_line.find(needle).map_or(1, |c| raw_line[..c].chars().count() + 1);

        if let Some(rest) = line.strip_prefix("generators:") {
            if alphabet.is_some() {
                return Err(Error::Syntax {
                    line: line_no,
                    column: 1,
                    message: "repeated `generators:` line".into(),
                });
            }
            alphabet = Some(Alphabet::new(rest.split_whitespace())?);
            continue;
        }
        let Some(alphabet) = alphabet.as_ref() else {
            return Err(Error::Syntax {
                line: line_no,
                column: 1,
                message: "expected `generators:`".into(),
            });
        };
        let mut line = line;
        if let Some(rest) = line.strip_prefix("relations:") {
            if in_relations {
                return Err(Error::Syntax {
                    line: line_no,
                    column: 1,
                    message: "repeated `relations:` line".into(),
                });
            }
            in_relations = true;
            line = rest.trim();
            if line.is_empty() {
                continue;
            }
        }
        if !in_relations {
            return Err(Error::Syntax {
                line: line_no,
                column: 1,
                message: "expected `relations:`".into(),
            });
        }

        let sides: Vec<&str> = line.split('=').collect();
        if sides.len() != 2 {
            return Err(Error::Syntax {
                line: line_no,
                column: column_of(line),
                message: "expected a relation of the form `a b = c d`".into(),
            });
        }
        let mut parsed = [[0; 2]; 2];
        for (slot, side) in parsed.iter_mut().zip(&sides) {
            let tokens: Vec<&str> = side.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::RelationLength {
                    line: line_no,
                    side: side.trim().to_string(),
                    len: tokens.len(),
                });
            }
            let mut letters = Vec::new();
            for token in tokens {
                let g = alphabet.index_of(token).ok_or_else(|| Error::UnknownGenerator(token.to_string()))?;
                letters.push(g);
            }
            *slot = relation_side(&Word(letters), side, line_no)?;
        }
        pairs.extend(RelationPair::new(parsed[0], parsed[1]));
    }

    let alphabet = alphabet.ok_or(Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `generators:` line".into(),
    })?;
    QuadraticPresentation::new(alphabet, pairs)
}

/// The partition of all length-two words induced by the relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairClasses {
    rank: usize,
    class_of: Vec<usize>,
    classes: Vec<Vec<[Generator; 2]>>,
}

impl PairClasses {
    pub fn new(p: &QuadraticPresentation) -> Self {
        let n = p.rank();
        let index = |[a, b]: [Generator; 2]| a as usize * n + b as usize;
        let mut uf = UnionFind::<usize>::new(n * n);
        for r in p.relations() {
            uf.union(index(r.left), index(r.right));
        }
        // Class ids follow the smallest member, so numbering is canonical.
        let mut id_of_root = BTreeMap::new();
        let mut class_of = Vec::with_capacity(n * n);
        let mut classes: Vec<Vec<[Generator; 2]>> = Vec::new();
        for w in 0..n * n {
            let root = uf.find(w);
            let id = *id_of_root.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            class_of.push(id);
            classes[id].push([(w / n) as Generator, (w % n) as Generator]);
        }
        PairClasses { rank: n, class_of, classes }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn class_index(&self, w: [Generator; 2]) -> usize {
        self.class_of[w[0] as usize * self.rank + w[1] as usize]
    }

    pub fn equivalent(&self, u: [Generator; 2], v: [Generator; 2]) -> bool {
        self.class_index(u) == self.class_index(v)
    }

    /// Members of the class of `w`, in increasing order.
    pub fn class_of(&self, w: [Generator; 2]) -> &[[Generator; 2]] {
        &self.classes[self.class_index(w)]
    }

    pub fn classes(&self) -> &[Vec<[Generator; 2]>] {
        &self.classes
    }

    /// Classes with at least two members.
    pub fn nontrivial(&self) -> impl Iterator<Item = &Vec<[Generator; 2]>> {
        self.classes.iter().filter(|c| c.len() > 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "base-cancel-left")]
    BaseCancelLeft,
    #[serde(rename = "base-cancel-right")]
    BaseCancelRight,
    #[serde(rename = "K-i")]
    KuskeI,
    #[serde(rename = "K-ii")]
    KuskeII,
    #[serde(rename = "K-iii")]
    KuskeIII,
}

impl ConditionId {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::BaseCancelLeft => "base-cancel-left",
            ConditionId::BaseCancelRight => "base-cancel-right",
            ConditionId::KuskeI => "K-i",
            ConditionId::KuskeII => "K-ii",
            ConditionId::KuskeIII => "K-iii",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: ConditionId,
    /// Rendered words witnessing the failure.
    pub witness: Vec<String>,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    pub fn has(&self, condition: ConditionId) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    /// The condition that failed first, if any.
    pub fn first_condition(&self) -> Option<ConditionId> {
        self.violations.first().map(|v| v.condition)
    }
}

/// Decides whether `p` presents a left divisibility monoid.
///
/// Stages run in order (base cancellativity, K-iii, K-ii, K-i) and the
/// report stops after the first stage that produces violations; every
/// witness of that stage is listed.
pub fn validate_divisibility(p: &QuadraticPresentation) -> ValidationReport {
    validate_with_budget(p, ClassBudget::default())
}

pub fn validate_with_budget(p: &QuadraticPresentation, budget: ClassBudget) -> ValidationReport {
    let classes = PairClasses::new(p);
    let alphabet = p.alphabet();
    let n = p.rank() as Generator;
    let render = |w: &[Generator]| alphabet.render(w);
    let mut violations = Vec::new();
    let notes = vec![
        "K-iv holds by construction: the monoid is the quotient of the free monoid by the length-2 congruence".to_string(),
        "length-1 classes are singletons, so the generators are exactly the irreducible elements".to_string(),
    ];
    let finish = |violations: Vec<Violation>| ValidationReport {
        verdict: if violations.is_empty() { Verdict::Accepted } else { Verdict::Rejected },
        violations,
        notes: notes.clone(),
    };

    // Base cancellativity: xy ~ xz or yx ~ zx forces y = z.
    for class in classes.classes() {
        for (i, u) in class.iter().enumerate() {
            for v in &class[i + 1..] {
                if u[0] == v[0] {
                    violations.push(Violation {
                        condition: ConditionId::BaseCancelLeft,
                        witness: vec![render(u), render(v)],
                        message: format!("{} = {} shares the first letter", render(u), render(v)),
                    });
                }
                if u[1] == v[1] {
                    violations.push(Violation {
                        condition: ConditionId::BaseCancelRight,
                        witness: vec![render(u), render(v)],
                        message: format!("{} = {} shares the last letter", render(u), render(v)),
                    });
                }
            }
        }
    }
    if !violations.is_empty() {
        return finish(violations);
    }

    // K-iii: xy = x'y', xz = x'z', y != z imply x = x'.
    for x in 0..n {
        for x2 in (x + 1)..n {
            let mut linked = Vec::new();
            for y in 0..n {
                for y2 in 0..n {
                    if classes.equivalent([x, y], [x2, y2]) {
                        linked.push(([x, y], [x2, y2]));
                    }
                }
            }
            if linked.len() > 1 {
                let (a, b) = linked[0];
                let (c, d) = linked[1];
                violations.push(Violation {
                    condition: ConditionId::KuskeIII,
                    witness: vec![render(&a), render(&b), render(&c), render(&d)],
                    message: format!(
                        "{} = {} and {} = {} with distinct second letters, but {} != {}",
                        render(&a),
                        render(&b),
                        render(&c),
                        render(&d),
                        alphabet.name(x),
                        alphabet.name(x2)
                    ),
                });
            }
        }
    }
    if !violations.is_empty() {
        return finish(violations);
    }

    let monoid = Monoid::with_budget(p.clone(), budget).with_engine_unchecked(Engine::Enumeration);

    // Canonical forms of all words of length three.
    let mut triple_nf = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let w = Word(vec![x, y, z]);
                match monoid.normal_form(&w) {
                    Ok(e) => {
                        triple_nf.insert([x, y, z], e.word().clone());
                    }
                    Err(err) => {
                        violations.push(Violation {
                            condition: ConditionId::KuskeI,
                            witness: vec![render(&w)],
                            message: format!("word problem aborted: {err}"),
                        });
                        return finish(violations);
                    }
                }
            }
        }
    }

    // K-ii: xyz = xy'z' or yzx = y'z'x imply yz = y'z'.
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for y2 in 0..n {
                    for z2 in 0..n {
                        if [y, z] >= [y2, z2] || classes.equivalent([y, z], [y2, z2]) {
                            continue;
                        }
                        let left = triple_nf[&[x, y, z]] == triple_nf[&[x, y2, z2]];
                        let right = triple_nf[&[y, z, x]] == triple_nf[&[y2, z2, x]];
                        if left || right {
                            let (u, v) = if left {
                                (vec![x, y, z], vec![x, y2, z2])
                            } else {
                                (vec![y, z, x], vec![y2, z2, x])
                            };
                            violations.push(Violation {
                                condition: ConditionId::KuskeII,
                                witness: vec![render(&u), render(&v)],
                                message: format!(
                                    "{} = {} but {} != {}",
                                    render(&u),
                                    render(&v),
                                    render(&[y, z]),
                                    render(&[y2, z2])
                                ),
                            });
                        }
                    }
                }
            }
        }
    }
    if !violations.is_empty() {
        return finish(violations);
    }

    // K-i: every lattice of left divisors of a length-three word is distributive.
    let tops: BTreeSet<Word> = triple_nf.values().cloned().collect();
    for top in tops {
        let name = render(&top);
        let element = match monoid.normal_form(&top) {
            Ok(e) => e,
            Err(err) => {
                violations.push(k_i(name, format!("word problem aborted: {err}")));
                continue;
            }
        };
        let lattice = match divisor_lattice(&monoid, &element).and_then(|d| d.to_finite_lattice()) {
            Ok(l) => l,
            Err(err) => {
                violations.push(k_i(name, format!("divisor poset unavailable: {err}")));
                continue;
            }
        };
        if let Some(missing) = lattice.lattice_failure() {
            violations.push(k_i(
                name.clone(),
                format!(
                    "the divisors of {name} are not a lattice: {} and {} have no {}",
                    lattice.id(missing.a),
                    lattice.id(missing.b),
                    missing.kind
                ),
            ));
        } else if let Some([a, b, c]) = lattice.distributivity_failure() {
            violations.push(k_i(
                name.clone(),
                format!(
                    "the lattice of divisors of {name} is not distributive at ({}, {}, {})",
                    lattice.id(a),
                    lattice.id(b),
                    lattice.id(c)
                ),
            ));
        }
    }
    finish(violations)
}

fn k_i(top: String, message: String) -> Violation {
    Violation {
        condition: ConditionId::KuskeI,
        witness: vec![top],
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m35() -> QuadraticPresentation {
        QuadraticPresentation::parse("generators: x y z\nrelations:\n x x = y z\n y y = z x\n z z = x y").unwrap()
    }

    #[test]
    fn parses_commutation_square() {
        let p = QuadraticPresentation::parse("generators: x y\nrelations:\n x y = y x").unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relations().len(), 1);
        assert_eq!(p.relations()[0], RelationPair { left: [0, 1], right: [1, 0] });
    }

    #[test]
    fn parses_m35_with_comments() {
        let p = QuadraticPresentation::parse(
            "# the fifth rank-3 monoid\ngenerators: x y z\n\nrelations:\n x x = y z\n y y = z x\n z z = x y\n",
        )
        .unwrap();
        assert_eq!(p, m35());
        assert_eq!(p.relations().len(), 3);
    }

    #[test]
    fn relation_may_follow_header() {
        let p = QuadraticPresentation::parse("generators: x y z\nrelations: x x = y z\ny y = z x\nz z = x y").unwrap();
        assert_eq!(p, m35());
    }

    #[test]
    fn rejects_long_relation_side() {
        let err = QuadraticPresentation::parse("generators: x y\nrelations:\n x y z = y x").unwrap_err();
        assert!(matches!(err, Error::RelationLength { line: 3, len: 3, .. }), "{err}");
        let err = QuadraticPresentation::parse("generators: x y\nrelations:\n x q = y x").unwrap_err();
        assert!(matches!(err, Error::UnknownGenerator(ref g) if g == "q"), "{err}");
        let err = QuadraticPresentation::parse("generators: x y z\nrelations:\n x y z = y x").unwrap_err();
        assert!(matches!(err, Error::RelationLength { line: 3, len: 3, .. }), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_syntax() {
        assert!(matches!(
            QuadraticPresentation::parse("generators: x x"),
            Err(Error::DuplicateGenerator(_))
        ));
        assert!(matches!(
            QuadraticPresentation::parse("relations:\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            QuadraticPresentation::parse("generators: x y\nx y = y x"),
            Err(Error::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            QuadraticPresentation::parse("generators: x y\nrelations:\nx y = y x = x x"),
            Err(Error::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn normalizes_and_dedups_relations() {
        let p = QuadraticPresentation::from_relations(&["x", "y"], &[("y x", "x y"), ("x y", "y x"), ("x x", "x x")])
            .unwrap();
        assert_eq!(p.relations(), &[RelationPair { left: [0, 1], right: [1, 0] }]);
    }

    #[test]
    fn json_round_trip() {
        let p = m35();
        let json = p.to_json().to_string();
        assert_eq!(QuadraticPresentation::parse(&json).unwrap(), p);
        assert_eq!(QuadraticPresentation::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn pair_classes_of_m35() {
        let classes = PairClasses::new(&m35());
        let mut got: Vec<Vec<String>> = classes
            .classes()
            .iter()
            .map(|c| c.iter().map(|w| m35().alphabet().render(w).replace(' ', "")).collect())
            .collect();
        got.sort();
        let want: Vec<Vec<&str>> = vec![
            vec!["xx", "yz"],
            vec!["xy", "zz"],
            vec!["xz"],
            vec!["yx"],
            vec!["yy", "zx"],
            vec!["zy"],
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn free_monoid_has_singleton_classes() {
        let p = QuadraticPresentation::from_relations(&["x", "y", "z"], &[]).unwrap();
        let classes = PairClasses::new(&p);
        assert_eq!(classes.classes().len(), 9);
        assert_eq!(classes.nontrivial().count(), 0);
        assert!(validate_divisibility(&p).accepted());
    }

    #[test]
    fn rank_zero_is_accepted() {
        let p = QuadraticPresentation::parse("generators:\nrelations:\n").unwrap();
        assert_eq!(p.rank(), 0);
        assert!(validate_divisibility(&p).accepted());
    }

    #[test]
    fn kuske_iii_rejects_doubly_linked_pair() {
        let p = QuadraticPresentation::from_relations(&["x", "y"], &[("x x", "y y"), ("x y", "y x")]).unwrap();
        let report = validate_divisibility(&p);
        assert!(!report.accepted());
        assert_eq!(report.first_condition(), Some(ConditionId::KuskeIII));
    }

    #[test]
    fn base_cancellativity_fails_fast() {
        let p = QuadraticPresentation::from_relations(&["x", "y"], &[("x x", "x y")]).unwrap();
        let report = validate_divisibility(&p);
        assert_eq!(report.first_condition(), Some(ConditionId::BaseCancelLeft));
        assert_eq!(report.violations[0].witness, vec!["x x", "x y"]);
        let p = QuadraticPresentation::from_relations(&["x", "y"], &[("x x", "y x")]).unwrap();
        assert_eq!(validate_divisibility(&p).first_condition(), Some(ConditionId::BaseCancelRight));
    }

    #[test]
    fn non_distributive_cube_is_rejected_at_xxx() {
        let p = QuadraticPresentation::from_relations(&["x", "y", "z"], &[("x x", "y z"), ("x y", "z z")]).unwrap();
        let report = validate_divisibility(&p);
        assert!(!report.accepted());
        assert!(report.violations.iter().all(|v| v.condition == ConditionId::KuskeI));
        assert!(report.violations.iter().any(|v| v.witness == vec!["x x x".to_string()]));
    }

    #[test]
    fn non_trace_divisibility_monoids_are_accepted() {
        for rels in [
            vec![("x y", "y z")],
            vec![("x x", "y z")],
            vec![("x x", "y z"), ("y x", "z z")],
        ] {
            let p = QuadraticPresentation::from_relations(&["x", "y", "z"], &rels).unwrap();
            let report = validate_divisibility(&p);
            assert!(report.accepted(), "{p}: {:?}", report.violations);
        }
        assert!(validate_divisibility(&m35()).accepted());
    }

    #[test]
    fn report_serializes_condition_ids() {
        let p = QuadraticPresentation::from_relations(&["x", "y"], &[("x x", "y y"), ("x y", "y x")]).unwrap();
        let json = serde_json::to_value(validate_divisibility(&p)).unwrap();
        assert_eq!(json["verdict"], "rejected");
        assert_eq!(json["violations"][0]["condition"], "K-iii");
    }

    #[test]
    fn parse_word_forms() {
        let a = Alphabet::standard(3);
        assert_eq!(a.parse_word("x y z").unwrap(), Word(vec![0, 1, 2]));
        assert_eq!(a.parse_word("xyz").unwrap(), Word(vec![0, 1, 2]));
        assert_eq!(a.parse_word("1").unwrap(), Word::empty());
        assert_eq!(a.render(&[]), "1");
        assert!(a.parse_word("x q").is_err());
    }
}
