//! Enumeration of quadratic presentations up to generator relabelling, and
//! classification of the divisibility monoids among them.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::delta::quasi_center;
use crate::element::{ClassBudget, Monoid};
use crate::error::{Error, Result};
use crate::garside::is_garside;
use crate::lattice::HasseFormat;
use crate::presentation::{validate_with_budget, Alphabet, Generator, PairClasses, QuadraticPresentation};

/// Pruning applied while building partitions of Σ².
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pruning {
    /// Every set partition of Σ².
    None,
    /// Classes are partial matchings: distinct first letters and distinct
    /// last letters within a class.
    #[default]
    Matching,
    /// Matching, and for `x != x′` at most one class holds words starting
    /// with `x` and with `x′`.
    MatchingAndK3,
}

/// Length-2 classes in a relabelling-invariant form: the lexicographically
/// least sorted list of sorted nontrivial classes over all permutations of
/// the generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalPresentation {
    pub rank: usize,
    pub encoding: Vec<Vec<[Generator; 2]>>,
}

impl CanonicalPresentation {
    /// The presentation on the standard alphabet `x, y, z, t, …`.
    pub fn presentation(&self) -> QuadraticPresentation {
        QuadraticPresentation::from_classes(Alphabet::standard(self.rank), &self.encoding)
            .expect("canonical encodings only contain valid generators")
    }
}

fn encode(classes: &[Vec<[Generator; 2]>], perm: &[Generator]) -> Vec<Vec<[Generator; 2]>> {
    let mut out: Vec<Vec<[Generator; 2]>> = classes
        .iter()
        .map(|c| {
            let mut mapped: Vec<[Generator; 2]> =
                c.iter().map(|&[a, b]| [perm[a as usize], perm[b as usize]]).collect();
            mapped.sort_unstable();
            mapped
        })
        .collect();
    out.sort_unstable();
    out
}

fn permutations(rank: usize) -> Vec<Vec<Generator>> {
    (0..rank as Generator).permutations(rank).collect()
}

fn canonical_encoding(classes: &[Vec<[Generator; 2]>], perms: &[Vec<Generator>]) -> Vec<Vec<[Generator; 2]>> {
    perms
        .iter()
        .map(|p| encode(classes, p))
        .min()
        .unwrap_or_default()
}

pub fn canonical_form(p: &QuadraticPresentation) -> CanonicalPresentation {
    let classes: Vec<Vec<[Generator; 2]>> = PairClasses::new(p).nontrivial().cloned().collect();
    CanonicalPresentation {
        rank: p.rank(),
        encoding: canonical_encoding(&classes, &permutations(p.rank())),
    }
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub pruning: Pruning,
    /// Thread count; `None` uses all available cores.
    pub workers: Option<usize>,
    pub time_budget: Option<Duration>,
    pub class_budget: ClassBudget,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            pruning: Pruning::MatchingAndK3,
            workers: None,
            time_budget: Some(Duration::from_secs(600)),
            class_budget: ClassBudget::default(),
        }
    }
}

impl CensusOptions {
    fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::Verification(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

struct Undo {
    class: usize,
    opened: bool,
    firsts: u32,
    seconds: u32,
    links: Vec<usize>,
}

/// Backtracking state for restricted growth strings over the pairs of Σ²,
/// indexed `x·n + y`.
struct Search {
    n: usize,
    pruning: Pruning,
    assigned: Vec<u8>,
    firsts: Vec<u32>,
    seconds: Vec<u32>,
    links: Vec<Option<usize>>,
    undo: Vec<Undo>,
}

impl Search {
    fn new(n: usize, pruning: Pruning) -> Self {
        Search {
            n,
            pruning,
            assigned: Vec::with_capacity(n * n),
            firsts: Vec::new(),
            seconds: Vec::new(),
            links: vec![None; n * n],
            undo: Vec::new(),
        }
    }

    fn open_classes(&self) -> usize {
        self.firsts.len()
    }

    /// Puts the next pair into `class`, or returns false if pruning forbids it.
    fn push(&mut self, class: usize) -> bool {
        let w = self.assigned.len();
        let (x, y) = (w / self.n, w % self.n);
        let opened = class == self.open_classes();
        let (firsts, seconds) = if opened { (0, 0) } else { (self.firsts[class], self.seconds[class]) };
        let mut new_links = Vec::new();
        if self.pruning != Pruning::None {
            if firsts & 1 << x != 0 || seconds & 1 << y != 0 {
                return false;
            }
            if self.pruning == Pruning::MatchingAndK3 {
                for x2 in (0..self.n).filter(|&x2| firsts & 1 << x2 != 0) {
                    let key = x.min(x2) * self.n + x.max(x2);
                    match self.links[key] {
                        Some(other) if other != class => return false,
                        Some(_) => {}
                        None => new_links.push(key),
                    }
                }
            }
        }
        if opened {
            self.firsts.push(0);
            self.seconds.push(0);
        }
        for &key in &new_links {
            self.links[key] = Some(class);
        }
        self.firsts[class] |= 1 << x;
        self.seconds[class] |= 1 << y;
        self.assigned.push(class as u8);
        self.undo.push(Undo {
            class,
            opened,
            firsts,
            seconds,
            links: new_links,
        });
        true
    }

    fn pop(&mut self) {
        let u = self.undo.pop().expect("pop matches a push");
        self.assigned.pop();
        for key in u.links {
            self.links[key] = None;
        }
        if u.opened {
            self.firsts.pop();
            self.seconds.pop();
        } else {
            self.firsts[u.class] = u.firsts;
            self.seconds[u.class] = u.seconds;
        }
    }

    fn nontrivial_classes(&self) -> Vec<Vec<[Generator; 2]>> {
        let mut classes = vec![Vec::new(); self.open_classes()];
        for (w, &c) in self.assigned.iter().enumerate() {
            classes[c as usize].push([(w / self.n) as Generator, (w % self.n) as Generator]);
        }
        classes.retain(|c| c.len() > 1);
        classes
    }

    /// All extensions of the current prefix by `depth` more pairs.
    fn prefixes(&mut self, depth: usize, out: &mut Vec<Vec<u8>>) {
        if depth == 0 || self.assigned.len() == self.n * self.n {
            out.push(self.assigned.clone());
            return;
        }
        for c in 0..=self.open_classes() {
            if self.push(c) {
                self.prefixes(depth - 1, out);
                self.pop();
            }
        }
    }

    fn leaves(&mut self, ctx: &LeafContext, found: &mut HashSet<Vec<Vec<[Generator; 2]>>>) -> Result<()> {
        if ctx.abort.load(Ordering::Relaxed) {
            return Ok(());
        }
        if self.assigned.len() == self.n * self.n {
            found.insert(canonical_encoding(&self.nontrivial_classes(), &ctx.perms));
            if let Some(limit) = ctx.deadline {
                if found.len() % 64 == 0 && Instant::now() > limit {
                    ctx.abort.store(true, Ordering::Relaxed);
                }
            }
            return Ok(());
        }
        for c in 0..=self.open_classes() {
            if self.push(c) {
                self.leaves(ctx, found)?;
                self.pop();
            }
        }
        Ok(())
    }
}

struct LeafContext {
    perms: Vec<Vec<Generator>>,
    deadline: Option<Instant>,
    abort: AtomicBool,
}

fn check_rank(rank: usize) -> Result<()> {
    if rank > 5 {
        return Err(Error::Verification(format!(
            "census is limited to rank 5; rank {rank} requested"
        )));
    }
    Ok(())
}

/// One representative per relabelling class of partitions of Σ² admitted by
/// `options.pruning`, sorted by encoding.
pub fn enumerate_presentations(rank: usize, options: &CensusOptions) -> Result<Vec<CanonicalPresentation>> {
    check_rank(rank)?;
    let started = Instant::now();
    let ctx = LeafContext {
        perms: permutations(rank),
        deadline: options.time_budget.map(|d| started + d),
        abort: AtomicBool::new(false),
    };
    let mut root = Search::new(rank, options.pruning);
    let mut prefixes = Vec::new();
    root.prefixes((rank * rank).min(6), &mut prefixes);

    let found = options.run(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut search = Search::new(rank, options.pruning);
                for &c in prefix {
                    let ok = search.push(c as usize);
                    debug_assert!(ok);
                }
                let mut found = HashSet::new();
                search.leaves(&ctx, &mut found).map(|_| found)
            })
            .try_reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                Ok(a)
            })
    })??;
    if ctx.abort.load(Ordering::Relaxed) {
        return Err(Error::TimeBudgetExceeded {
            seconds: options.time_budget.map_or(0, |d| d.as_secs()),
        });
    }
    let mut out: Vec<CanonicalPresentation> = found
        .into_iter()
        .map(|encoding| CanonicalPresentation { rank, encoding })
        .collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusEntry {
    pub presentation: String,
    pub encoding: Vec<Vec<[Generator; 2]>>,
    pub divisibility: bool,
    /// Condition of the first violation, for rejected presentations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected_by: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub garside: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub garside_witness: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypercube: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simple_lattice_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_center_rank: Option<usize>,
    /// Whether the opposite presentation lies in the same relabelling class.
    pub self_opposite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Validation, Garside detection and quasi-center of one presentation.
pub fn classify(p: &QuadraticPresentation, budget: ClassBudget) -> CensusEntry {
    let canonical = canonical_form(p);
    let standard = canonical.presentation();
    let report = validate_with_budget(&standard, budget);
    let mut entry = CensusEntry {
        presentation: standard.to_string(),
        self_opposite: canonical_form(&standard.opposite()) == canonical,
        encoding: canonical.encoding,
        divisibility: report.accepted(),
        rejected_by: report.first_condition().map(|c| c.to_string()),
        garside: None,
        garside_witness: None,
        delta: None,
        hypercube: None,
        simple_lattice_size: None,
        quasi_center_rank: None,
        error: None,
    };
    if !entry.divisibility {
        return entry;
    }
    if let Err(e) = fill_divisibility_fields(&standard, budget, &mut entry) {
        entry.error = Some(e.to_string());
    }
    entry
}

fn fill_divisibility_fields(p: &QuadraticPresentation, budget: ClassBudget, entry: &mut CensusEntry) -> Result<()> {
    let monoid = Monoid::divisibility_with_budget(p.clone(), budget)?;
    let garside = is_garside(&monoid)?;
    entry.garside = Some(garside.is_garside);
    entry.garside_witness = garside
        .witness
        .map(|(a, b)| [p.alphabet().name(a).to_string(), p.alphabet().name(b).to_string()]);
    entry.delta = garside.delta.as_ref().map(|d| monoid.render(d));
    entry.hypercube = garside.hypercube;
    entry.simple_lattice_size = garside.simple_lattice.as_ref().map(|l| l.len());
    entry.quasi_center_rank = Some(quasi_center(&monoid)?.rank());
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub rank: usize,
    /// Relabelling classes produced by the search.
    pub examined: usize,
    pub divisibility: usize,
    pub garside_divisibility: usize,
    /// Rejected classes by the first failing condition.
    pub rejected_by_condition: BTreeMap<String, usize>,
    /// Quasi-center ranks of the Garside divisibility monoids, ascending.
    pub garside_quasi_center_ranks: Vec<usize>,
    /// Divisibility monoids only, ordered by encoding.
    pub entries: Vec<CensusEntry>,
}

pub fn census(rank: usize, options: &CensusOptions) -> Result<CensusReport> {
    let started = Instant::now();
    let candidates = enumerate_presentations(rank, options)?;
    let budget = options.class_budget;
    let entries: Vec<CensusEntry> = options.run(|| {
        candidates
            .par_iter()
            .map(|c| classify(&c.presentation(), budget))
            .collect()
    })?;
    if let Some(limit) = options.time_budget {
        if started.elapsed() > limit {
            return Err(Error::TimeBudgetExceeded { seconds: limit.as_secs() });
        }
    }
    let mut rejected_by_condition = BTreeMap::new();
    for e in &entries {
        if let Some(c) = &e.rejected_by {
            *rejected_by_condition.entry(c.clone()).or_insert(0) += 1;
        }
    }
    let entries: Vec<CensusEntry> = entries.into_iter().filter(|e| e.divisibility).collect();
    let mut garside_quasi_center_ranks: Vec<usize> = entries
        .iter()
        .filter(|e| e.garside == Some(true))
        .filter_map(|e| e.quasi_center_rank)
        .collect();
    garside_quasi_center_ranks.sort_unstable();
    Ok(CensusReport {
        rank,
        examined: candidates.len(),
        divisibility: entries.len(),
        garside_divisibility: entries.iter().filter(|e| e.garside == Some(true)).count(),
        rejected_by_condition,
        garside_quasi_center_ranks,
        entries,
    })
}

/// Relabelling classes of all set partitions of Σ² accepted by the
/// validator, with no pruning at all. Meant as an oracle for small ranks.
pub fn brute_force_divisibility(rank: usize, budget: ClassBudget) -> Result<BTreeSet<CanonicalPresentation>> {
    let options = CensusOptions {
        pruning: Pruning::None,
        time_budget: None,
        ..CensusOptions::default()
    };
    Ok(enumerate_presentations(rank, &options)?
        .into_par_iter()
        .filter(|c| validate_with_budget(&c.presentation(), budget).accepted())
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

impl CensusReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rank: {}", self.rank);
        let _ = writeln!(out, "examined: {}", self.examined);
        let _ = writeln!(out, "divisibility: {}", self.divisibility);
        let _ = writeln!(out, "garside_divisibility: {}", self.garside_divisibility);
        for (condition, count) in &self.rejected_by_condition {
            let _ = writeln!(out, "rejected {condition}: {count}");
        }
        let _ = writeln!(out, "garside quasi-center ranks: {:?}", self.garside_quasi_center_ranks);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<4} {:<7} {:<9} {:<8} {:<3} presentation", "#", "garside", "delta", "|simple|", "qc");
        for (i, e) in self.entries.iter().enumerate() {
            let garside = match e.garside {
                Some(true) => "yes",
                Some(false) => "no",
                None => "?",
            };
            let _ = writeln!(
                out,
                "{:<4} {:<7} {:<9} {:<8} {:<3} {}{}",
                i + 1,
                garside,
                e.delta.as_deref().unwrap_or("-"),
                e.simple_lattice_size.map_or("-".into(), |s| s.to_string()),
                e.quasi_center_rank.map_or("-".into(), |r| r.to_string()),
                e.presentation,
                if e.self_opposite { "" } else { "  (opposite not isomorphic)" },
            );
        }
        out
    }

    /// Writes `entry-NNN.txt` for every entry and `entry-NNN-delta.dot` for
    /// Garside entries.
    pub fn dump(&self, dir: &Path, budget: ClassBudget) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (i, e) in self.entries.iter().enumerate() {
            let canonical = CanonicalPresentation {
                rank: self.rank,
                encoding: e.encoding.clone(),
            };
            let p = canonical.presentation();
            std::fs::write(dir.join(format!("entry-{:03}.txt", i + 1)), p.to_text())?;
            if e.garside == Some(true) {
                let monoid = Monoid::divisibility_with_budget(p, budget)?;
                if let Some(lattice) = is_garside(&monoid)?.simple_lattice {
                    std::fs::write(
                        dir.join(format!("entry-{:03}-delta.dot", i + 1)),
                        lattice.export_hasse(HasseFormat::Dot)?,
                    )?;
                }
            }
        }
        Ok(())
    }
}
