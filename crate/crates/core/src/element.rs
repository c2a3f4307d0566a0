//! Word problem and divisibility calculus.
//!
//! Elements are congruence classes, represented by their lexicographically
//! least word under the alphabet order. Two engines compute the same answers:
//!
//! * [`Engine::Enumeration`] enumerates congruence classes explicitly. It is
//!   exact on any presentation (within [`ClassBudget`]) and is the reference.
//! * [`Engine::Reversing`] folds words through the residue table of pairs of
//!   generators, using `(ab)\c = b\(a\c)` and `c\(ab) = (c\a)((a\c)\b)`. It
//!   runs in time polynomial in word length, but it is only sound on validated
//!   divisibility presentations, so it can only be selected through validation.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::presentation::{validate_with_budget, Generator, PairClasses, QuadraticPresentation, Word};

static NEXT_MONOID_ID: AtomicU64 = AtomicU64::new(1);

const NF_CACHE_LIMIT: usize = 1 << 21;

/// Limits on the enumeration engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassBudget {
    /// Largest congruence class enumerated before giving up.
    pub max_class_size: usize,
    /// Longest element considered while searching for common multiples.
    pub max_search_length: usize,
}

impl Default for ClassBudget {
    fn default() -> Self {
        ClassBudget {
            max_class_size: 100_000,
            max_search_length: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Enumeration,
    Reversing,
}

/// An element of a presented monoid, held as its canonical word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    owner: u64,
    word: Word,
}

impl Element {
    pub fn word(&self) -> &Word {
        &self.word
    }

    /// Number of letters; relations preserve it.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

/// Shortlex order: by length, then lexicographically.
impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.owner.cmp(&other.owner))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `(c\g, g\c)` for each pair of distinct generators admitting a common
/// right multiple of length two.
#[derive(Clone, Debug)]
struct ResidueTable {
    rank: usize,
    table: Vec<Option<(Generator, Generator)>>,
}

impl ResidueTable {
    fn new(classes: &PairClasses) -> Self {
        let rank = classes.rank();
        let mut table = vec![None; rank * rank];
        for class in classes.classes() {
            for u in class {
                for v in class {
                    if u[0] != v[0] && table[u[0] as usize * rank + v[0] as usize].is_none() {
                        table[u[0] as usize * rank + v[0] as usize] = Some((u[1], v[1]));
                    }
                }
            }
        }
        ResidueTable { rank, table }
    }

    fn get(&self, c: Generator, g: Generator) -> Option<(Generator, Generator)> {
        self.table[c as usize * self.rank + g as usize]
    }

    /// Returns `(x\w, w\x)`, with `None` standing for the identity in the
    /// second component, or `None` when `x` and `w` have no common multiple.
    fn sweep(&self, x: Generator, w: &[Generator]) -> Option<(Vec<Generator>, Option<Generator>)> {
        let mut rest = Some(x);
        let mut out = Vec::with_capacity(w.len());
        for &g in w {
            match rest {
                None => out.push(g),
                Some(c) if c == g => rest = None,
                Some(c) => {
                    let (c_g, g_c) = self.get(c, g)?;
                    out.push(c_g);
                    rest = Some(g_c);
                }
            }
        }
        Some((out, rest))
    }

    /// Returns `(u\v, v\u)` as words, or `None` when `u` and `v` have no
    /// common right multiple.
    fn reverse(&self, u: &[Generator], v: &[Generator]) -> Option<(Vec<Generator>, Vec<Generator>)> {
        let mut current = v.to_vec();
        let mut back = Vec::with_capacity(u.len());
        for &x in u {
            let (x_cur, cur_x) = self.sweep(x, &current)?;
            back.extend(cur_x);
            current = x_cur;
        }
        Some((current, back))
    }

    /// Smallest generator left-dividing `w`, with the quotient.
    fn first_divisor(&self, w: &[Generator]) -> (Generator, Vec<Generator>) {
        for g in 0..self.rank as Generator {
            if let Some((quotient, None)) = self.sweep(g, w) {
                return (g, quotient);
            }
        }
        unreachable!("the first letter of a nonempty word always divides it")
    }

    fn lex_normal_form(&self, w: &[Generator]) -> Vec<Generator> {
        let mut rest = w.to_vec();
        let mut out = Vec::with_capacity(w.len());
        while !rest.is_empty() {
            let (g, quotient) = self.first_divisor(&rest);
            out.push(g);
            rest = quotient;
        }
        out
    }
}

/// A presented monoid with its word-problem machinery.
pub struct Monoid {
    id: u64,
    presentation: QuadraticPresentation,
    classes: PairClasses,
    budget: ClassBudget,
    engine: Engine,
    residues: ResidueTable,
    nf_cache: RwLock<HashMap<Word, Word>>,
    class_cache: RwLock<ClassCache>,
}

/// Congruence classes keyed by normal form, capped by total word count.
#[derive(Default)]
struct ClassCache {
    classes: HashMap<Word, Arc<BTreeSet<Word>>>,
    words: usize,
}

impl Clone for Monoid {
    /// Clones share the presentation identity, so their elements interoperate.
    fn clone(&self) -> Self {
        Monoid {
            id: self.id,
            presentation: self.presentation.clone(),
            classes: self.classes.clone(),
            budget: self.budget,
            engine: self.engine,
            residues: self.residues.clone(),
            nf_cache: RwLock::new(HashMap::new()),
            class_cache: RwLock::default(),
        }
    }
}

impl std::fmt::Debug for Monoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Monoid")
            .field("id", &self.id)
            .field("presentation", &self.presentation.to_string())
            .field("engine", &self.engine)
            .finish()
    }
}

impl Monoid {
    /// Enumeration-backed monoid; valid for any presentation.
    pub fn new(presentation: QuadraticPresentation) -> Self {
        Self::with_budget(presentation, ClassBudget::default())
    }

    pub fn with_budget(presentation: QuadraticPresentation, budget: ClassBudget) -> Self {
        let classes = PairClasses::new(&presentation);
        let residues = ResidueTable::new(&classes);
        Monoid {
            id: NEXT_MONOID_ID.fetch_add(1, AtomicOrdering::Relaxed),
            presentation,
            classes,
            budget,
            engine: Engine::Enumeration,
            residues,
            nf_cache: RwLock::new(HashMap::new()),
            class_cache: RwLock::default(),
        }
    }

    /// Validates the presentation and selects the reversing engine.
    pub fn divisibility(presentation: QuadraticPresentation) -> Result<Self> {
        Self::divisibility_with_budget(presentation, ClassBudget::default())
    }

    pub fn divisibility_with_budget(presentation: QuadraticPresentation, budget: ClassBudget) -> Result<Self> {
        let report = validate_with_budget(&presentation, budget);
        if !report.accepted() {
            return Err(Error::NotDivisibility(report.violations.len()));
        }
        Ok(Self::with_budget(presentation, budget).with_engine_unchecked(Engine::Reversing))
    }

    /// Switches engine. Selecting [`Engine::Reversing`] validates first.
    pub fn with_engine(self, engine: Engine) -> Result<Self> {
        if engine == Engine::Reversing && self.engine != Engine::Reversing {
            let report = validate_with_budget(&self.presentation, self.budget);
            if !report.accepted() {
                return Err(Error::NotDivisibility(report.violations.len()));
            }
        }
        Ok(self.with_engine_unchecked(engine))
    }

    pub(crate) fn with_engine_unchecked(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn budget(&self) -> ClassBudget {
        self.budget
    }

    pub fn presentation(&self) -> &QuadraticPresentation {
        &self.presentation
    }

    pub fn pair_classes(&self) -> &PairClasses {
        &self.classes
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    pub fn identity(&self) -> Element {
        self.wrap(Word::empty())
    }

    pub fn generator(&self, g: Generator) -> Element {
        assert!((g as usize) < self.rank(), "generator index out of range");
        self.wrap(Word::letter(g))
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.rank() as Generator).map(|g| self.generator(g)).collect()
    }

    /// Parses generator names (see [`crate::presentation::Alphabet::parse_word`]).
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let w = self.presentation.alphabet().parse_word(text)?;
        self.normal_form(&w)
    }

    pub fn render(&self, e: &Element) -> String {
        self.presentation.alphabet().render(e.word())
    }

    pub fn render_word(&self, w: &[Generator]) -> String {
        self.presentation.alphabet().render(w)
    }

    fn wrap(&self, word: Word) -> Element {
        Element { owner: self.id, word }
    }

    fn own(&self, e: &Element) -> Result<()> {
        if e.owner == self.id {
            Ok(())
        } else {
            Err(Error::ForeignElement)
        }
    }

    fn check_word(&self, w: &[Generator]) -> Result<()> {
        match w.iter().find(|&&g| g as usize >= self.rank()) {
            Some(g) => Err(Error::UnknownGenerator(format!("#{g}"))),
            None => Ok(()),
        }
    }

    /// All words congruent to `w`.
    pub fn congruence_class(&self, w: &Word) -> Result<BTreeSet<Word>> {
        self.check_word(w)?;
        let mut seen: HashSet<Vec<Generator>> = HashSet::new();
        seen.insert(w.to_vec());
        let mut stack = vec![w.to_vec()];
        while let Some(u) = stack.pop() {
            for i in 0..u.len().saturating_sub(1) {
                let pair = [u[i], u[i + 1]];
                for &alt in self.classes.class_of(pair) {
                    if alt == pair {
                        continue;
                    }
                    let mut v = u.clone();
                    v[i] = alt[0];
                    v[i + 1] = alt[1];
                    if seen.insert(v.clone()) {
                        if seen.len() > self.budget.max_class_size {
                            return Err(Error::ClassBudgetExceeded {
                                word: self.render_word(w),
                                limit: self.budget.max_class_size,
                            });
                        }
                        stack.push(v);
                    }
                }
            }
        }
        Ok(seen.into_iter().map(Word::from).collect())
    }

    pub fn normal_form(&self, w: &Word) -> Result<Element> {
        self.check_word(w)?;
        let canonical = match self.engine {
            Engine::Reversing => Word::from(self.residues.lex_normal_form(w)),
            Engine::Enumeration => self.enumerated_normal_form(w)?,
        };
        Ok(self.wrap(canonical))
    }

    fn enumerated_normal_form(&self, w: &Word) -> Result<Word> {
        if w.len() < 2 {
            return Ok(w.clone());
        }
        if let Some(hit) = self.nf_cache.read().expect("cache lock").get(w) {
            return Ok(hit.clone());
        }
        let class = self.congruence_class(w)?;
        let least = class.iter().next().expect("class contains w").clone();
        let mut cache = self.nf_cache.write().expect("cache lock");
        if cache.len() + class.len() <= NF_CACHE_LIMIT {
            for member in class {
                cache.insert(member, least.clone());
            }
        }
        Ok(least)
    }

    /// The congruence class of an element, memoised.
    fn element_class(&self, e: &Element) -> Result<Arc<BTreeSet<Word>>> {
        if let Some(hit) = self.class_cache.read().expect("cache lock").classes.get(&e.word) {
            return Ok(hit.clone());
        }
        let class = Arc::new(self.congruence_class(&e.word)?);
        let mut cache = self.class_cache.write().expect("cache lock");
        if cache.words + class.len() <= NF_CACHE_LIMIT {
            cache.words += class.len();
            cache.classes.insert(e.word.clone(), class.clone());
        }
        Ok(class)
    }

    pub fn element(&self, letters: &[Generator]) -> Result<Element> {
        self.normal_form(&Word::from(letters))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.own(a)?;
        self.own(b)?;
        self.normal_form(&a.word.concat(&b.word))
    }

    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a Element>) -> Result<Element> {
        let mut letters = Vec::new();
        for f in factors {
            self.own(f)?;
            letters.extend_from_slice(f.word());
        }
        self.normal_form(&Word::from(letters))
    }

    /// Whether `b` is a left divisor of `a`, i.e. `a = b·d` for some `d`.
    pub fn left_divides(&self, b: &Element, a: &Element) -> Result<bool> {
        self.own(a)?;
        self.own(b)?;
        if b.len() > a.len() {
            return Ok(false);
        }
        if b.is_identity() || b == a {
            return Ok(true);
        }
        match self.engine {
            Engine::Reversing => Ok(matches!(self.residues.reverse(a.word(), b.word()), Some((a_b, _)) if a_b.is_empty())),
            Engine::Enumeration => Ok(self.enumerated_left_split(b, a)?.is_some()),
        }
    }

    /// A class member of `a` whose prefix represents `b`, split after the prefix.
    fn enumerated_left_split(&self, b: &Element, a: &Element) -> Result<Option<Word>> {
        let b_class = self.element_class(b)?;
        let k = b.len();
        Ok(self
            .element_class(a)?
            .iter()
            .find(|w| b_class.contains(&Word::from(&w[..k])))
            .map(|w| Word::from(&w[k..])))
    }

    pub fn right_divides(&self, b: &Element, a: &Element) -> Result<bool> {
        self.own(a)?;
        self.own(b)?;
        if b.len() > a.len() {
            return Ok(false);
        }
        match self.engine {
            Engine::Reversing => Ok(self.right_divisors(a)?.contains(b)),
            Engine::Enumeration => {
                let b_class = self.element_class(b)?;
                let k = a.len() - b.len();
                Ok(self
                    .element_class(a)?
                    .iter()
                    .any(|w| b_class.contains(&Word::from(&w[k..]))))
            }
        }
    }

    /// Whether `a = c·b·d` for some `c, d`.
    pub fn divides(&self, b: &Element, a: &Element) -> Result<bool> {
        self.own(a)?;
        self.own(b)?;
        if b.len() > a.len() {
            return Ok(false);
        }
        match self.engine {
            Engine::Reversing => {
                for (_, quotient) in self.left_divisors_with_quotients(a)? {
                    if self.left_divides(b, &quotient)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Engine::Enumeration => {
                let b_class = self.element_class(b)?;
                let k = b.len();
                Ok(self
                    .element_class(a)?
                    .iter()
                    .any(|w| (0..=w.len() - k).any(|i| b_class.contains(&Word::from(&w[i..i + k])))))
            }
        }
    }

    /// The unique `d` with `b·d = a`.
    pub fn left_quotient(&self, b: &Element, a: &Element) -> Result<Element> {
        self.own(a)?;
        self.own(b)?;
        let not_a_divisor = || Error::NotADivisor {
            divisor: self.render(b),
            element: self.render(a),
        };
        if b.len() > a.len() {
            return Err(not_a_divisor());
        }
        match self.engine {
            Engine::Reversing => match self.residues.reverse(a.word(), b.word()) {
                Some((a_b, b_a)) if a_b.is_empty() => self.normal_form(&Word::from(b_a)),
                _ => Err(not_a_divisor()),
            },
            Engine::Enumeration => match self.enumerated_left_split(b, a)? {
                Some(suffix) => self.normal_form(&suffix),
                None => Err(not_a_divisor()),
            },
        }
    }

    /// The set of left divisors of `a`, including `1` and `a`.
    pub fn left_divisors(&self, a: &Element) -> Result<BTreeSet<Element>> {
        self.own(a)?;
        match self.engine {
            Engine::Reversing => Ok(self.left_divisors_with_quotients(a)?.into_iter().map(|(d, _)| d).collect()),
            Engine::Enumeration => {
                let mut prefixes = BTreeSet::new();
                for w in self.element_class(a)?.iter() {
                    for k in 0..=w.len() {
                        prefixes.insert(Word::from(&w[..k]));
                    }
                }
                prefixes.iter().map(|p| self.normal_form(p)).collect()
            }
        }
    }

    /// Pairs `(d, d\a)` over the left divisors `d` of `a`.
    pub fn left_divisors_with_quotients(&self, a: &Element) -> Result<Vec<(Element, Element)>> {
        self.own(a)?;
        if self.engine == Engine::Enumeration {
            return self
                .left_divisors(a)?
                .into_iter()
                .map(|d| {
                    let q = self.left_quotient(&d, a)?;
                    Ok((d, q))
                })
                .collect();
        }
        let mut out = vec![(self.identity(), a.clone())];
        let mut seen: HashSet<Word> = HashSet::from([Word::empty()]);
        let mut frontier = vec![(Word::empty(), a.word().to_vec())];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (d, q) in frontier {
                for g in 0..self.rank() as Generator {
                    if let Some((quotient, None)) = self.residues.sweep(g, &q) {
                        let e = self.normal_form(&d.concat(&[g]))?;
                        if seen.insert(e.word.clone()) {
                            let quotient = self.normal_form(&Word::from(quotient))?;
                            out.push((e.clone(), quotient.clone()));
                            next.push((e.word, quotient.word.into_vec()));
                        }
                    }
                }
            }
            frontier = next;
        }
        out.sort();
        Ok(out)
    }

    /// The set of right divisors of `a`.
    pub fn right_divisors(&self, a: &Element) -> Result<BTreeSet<Element>> {
        self.own(a)?;
        match self.engine {
            Engine::Reversing => Ok(self.left_divisors_with_quotients(a)?.into_iter().map(|(_, q)| q).collect()),
            Engine::Enumeration => {
                let mut suffixes = BTreeSet::new();
                for w in self.element_class(a)?.iter() {
                    for k in 0..=w.len() {
                        suffixes.insert(Word::from(&w[k..]));
                    }
                }
                suffixes.iter().map(|s| self.normal_form(s)).collect()
            }
        }
    }

    /// Left gcd `a ∧ b`: the greatest common left divisor.
    pub fn left_gcd(&self, a: &Element, b: &Element) -> Result<Element> {
        self.own(a)?;
        self.own(b)?;
        match self.engine {
            Engine::Reversing => {
                let mut gcd = Vec::new();
                let (mut qa, mut qb) = (a.word().to_vec(), b.word().to_vec());
                'grow: loop {
                    for g in 0..self.rank() as Generator {
                        if let (Some((na, None)), Some((nb, None))) = (self.residues.sweep(g, &qa), self.residues.sweep(g, &qb)) {
                            gcd.push(g);
                            qa = na;
                            qb = nb;
                            continue 'grow;
                        }
                    }
                    break;
                }
                self.normal_form(&Word::from(gcd))
            }
            Engine::Enumeration => {
                let da = self.left_divisors(a)?;
                let common: Vec<Element> = self.left_divisors(b)?.into_iter().filter(|d| da.contains(d)).collect();
                let mut maximal = Vec::new();
                for c in &common {
                    let mut dominated = false;
                    for d in &common {
                        if d.len() > c.len() && self.left_divides(c, d)? {
                            dominated = true;
                            break;
                        }
                    }
                    if !dominated {
                        maximal.push(c.clone());
                    }
                }
                match maximal.as_slice() {
                    [m] => Ok(m.clone()),
                    _ => Err(Error::NoUniqueGcd(self.render(a), self.render(b))),
                }
            }
        }
    }

    /// Right lcm `a ∨ b`, or `None` when `a` and `b` have no common right multiple.
    ///
    /// The enumeration engine searches the multiples `a·d` with `‖d‖ ≤ ‖b‖`
    /// level by level; on validated presentations any lcm lies in that range.
    /// On other presentations the answer is best-effort.
    pub fn right_lcm(&self, a: &Element, b: &Element) -> Result<Option<Element>> {
        self.own(a)?;
        self.own(b)?;
        match self.engine {
            Engine::Reversing => match self.residues.reverse(a.word(), b.word()) {
                Some((a_b, _)) => Ok(Some(self.normal_form(&a.word().concat(&a_b))?)),
                None => Ok(None),
            },
            Engine::Enumeration => {
                // lcm is symmetric; extend the longer element by at most the shorter's length.
                let (base, other) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                let mut level: BTreeSet<Element> = BTreeSet::from([base.clone()]);
                for k in 0..=other.len() {
                    if base.len() + k > self.budget.max_search_length {
                        return Err(Error::SearchBudgetExceeded {
                            limit: self.budget.max_search_length,
                        });
                    }
                    let other_class = self.element_class(other)?;
                    let mut hits = Vec::new();
                    for e in &level {
                        let class = self.element_class(e)?;
                        if class.iter().any(|w| other_class.contains(&Word::from(&w[..other.len()]))) {
                            hits.push(e.clone());
                        }
                    }
                    match hits.len() {
                        0 => {}
                        1 => return Ok(hits.pop()),
                        _ => return Err(Error::MultipleMinimalMultiples(self.render(a), self.render(b))),
                    }
                    if k == other.len() {
                        break;
                    }
                    let mut next = BTreeSet::new();
                    for e in &level {
                        for g in 0..self.rank() as Generator {
                            next.insert(self.normal_form(&e.word().concat(&[g]))?);
                        }
                    }
                    level = next;
                }
                Ok(None)
            }
        }
    }

    /// Residue `a\b`: the unique `c` with `a ∨ b = a·c`.
    pub fn residue(&self, a: &Element, b: &Element) -> Result<Option<Element>> {
        self.own(a)?;
        self.own(b)?;
        match self.engine {
            Engine::Reversing => match self.residues.reverse(a.word(), b.word()) {
                Some((a_b, _)) => Ok(Some(self.normal_form(&Word::from(a_b))?)),
                None => Ok(None),
            },
            Engine::Enumeration => match self.right_lcm(a, b)? {
                Some(lcm) => Ok(Some(self.left_quotient(a, &lcm)?)),
                None => Ok(None),
            },
        }
    }

    /// Right lcm of a finite set; `Some(1)` for the empty set.
    pub fn right_lcm_all<'a>(&self, elements: impl IntoIterator<Item = &'a Element>) -> Result<Option<Element>> {
        let mut acc = self.identity();
        for e in elements {
            match self.right_lcm(&acc, e)? {
                Some(l) => acc = l,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }
}
