//! Right local deltas via the Υ-iteration, quasi-centrality and the quasi-center.

use std::collections::BTreeSet;

use crate::element::{Element, Monoid};
use crate::error::{Error, Result};
use crate::presentation::Generator;

/// A residue `c\b` that does not exist, with `c ∈ Σ ∪ {1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingResidue {
    pub c: Element,
    pub b: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpsilonTrace {
    /// `Υ_0(a) = {a} ⊆ Υ_1(a) ⊆ …`; the last stage is the fixpoint unless
    /// `failure` is set, in which case it is the stage being extended.
    pub stages: Vec<BTreeSet<Element>>,
    pub failure: Option<MissingResidue>,
}

impl UpsilonTrace {
    pub fn fixpoint(&self) -> Option<&BTreeSet<Element>> {
        match self.failure {
            None => self.stages.last(),
            Some(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDeltaOutcome {
    pub delta: Option<Element>,
    pub trace: UpsilonTrace,
}

impl LocalDeltaOutcome {
    pub fn exists(&self) -> bool {
        self.delta.is_some()
    }
}

/// Iterates `Υ_i(a) = {c\b : c ∈ Σ∪{1}, b ∈ Υ_{i-1}(a)}` until it stabilises or
/// some residue is missing. Candidates `c` are tried in the order `1, x, y, …`
/// and `b` in shortlex order, so the reported failure is deterministic.
pub fn upsilon_iteration(monoid: &Monoid, a: &Element) -> Result<UpsilonTrace> {
    let sigma1: Vec<Element> = std::iter::once(monoid.identity()).chain(monoid.generators()).collect();
    let mut stages = vec![BTreeSet::from([a.clone()])];
    loop {
        let previous = stages.last().expect("stage 0 is always present");
        let mut next = BTreeSet::new();
        let mut failure = None;
        'search: for c in &sigma1 {
            for b in previous {
                match monoid.residue(c, b)? {
                    Some(r) => {
                        next.insert(r);
                    }
                    None => {
                        failure = Some(MissingResidue {
                            c: c.clone(),
                            b: b.clone(),
                        });
                        break 'search;
                    }
                }
            }
        }
        if failure.is_some() || next == *previous {
            return Ok(UpsilonTrace { stages, failure });
        }
        stages.push(next);
    }
}

/// `Δ(a)`, the right lcm of the Υ fixpoint, when it exists.
pub fn local_delta(monoid: &Monoid, a: &Element) -> Result<LocalDeltaOutcome> {
    let trace = upsilon_iteration(monoid, a)?;
    let delta = match trace.fixpoint() {
        None => None,
        Some(set) => match monoid.right_lcm_all(set)? {
            Some(d) => Some(d),
            None => {
                return Err(Error::Verification(format!(
                    "Υ fixpoint of `{}` has no right lcm",
                    monoid.render(a)
                )))
            }
        },
    };
    Ok(LocalDeltaOutcome { delta, trace })
}

/// If `aΣ = Σa`, the permutation `x ↦ x′` with `x·a = a·x′`.
pub fn is_quasi_central(monoid: &Monoid, a: &Element) -> Result<Option<Vec<Generator>>> {
    let rank = monoid.rank();
    let mut image = Vec::with_capacity(rank);
    let mut hit = vec![false; rank];
    for x in monoid.generators() {
        let xa = monoid.multiply(&x, a)?;
        if !monoid.left_divides(a, &xa)? {
            return Ok(None);
        }
        let quotient = monoid.left_quotient(a, &xa)?;
        let [g] = quotient.word()[..] else {
            return Ok(None);
        };
        if std::mem::replace(&mut hit[g as usize], true) {
            return Ok(None);
        }
        image.push(g);
    }
    Ok(Some(image))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCenterDescription {
    /// Distinct local deltas of the generators, in shortlex order.
    pub generators: Vec<Element>,
    /// `Δ(x)` for each generator `x`, or `None` when it does not exist.
    pub generator_map: Vec<Option<Element>>,
}

impl QuasiCenterDescription {
    /// The quasi-center is free abelian of this rank.
    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Minimal generating set of the quasi-center, with its free abelian
/// structure checked on the generators.
pub fn quasi_center(monoid: &Monoid) -> Result<QuasiCenterDescription> {
    let mut generator_map = Vec::with_capacity(monoid.rank());
    for x in monoid.generators() {
        generator_map.push(local_delta(monoid, &x)?.delta);
    }
    let generators: Vec<Element> = generator_map
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let fail = |what: String| Err(Error::Verification(what));
    for g in &generators {
        if is_quasi_central(monoid, g)?.is_none() {
            return fail(format!("local delta `{}` is not quasi-central", monoid.render(g)));
        }
    }
    for (i, g) in generators.iter().enumerate() {
        for h in &generators[i + 1..] {
            let (rg, rh) = (monoid.render(g), monoid.render(h));
            if !monoid.left_gcd(g, h)?.is_identity() {
                return fail(format!("distinct local deltas `{rg}` and `{rh}` have a nontrivial gcd"));
            }
            if monoid.multiply(g, h)? != monoid.multiply(h, g)? {
                return fail(format!("local deltas `{rg}` and `{rh}` do not commute"));
            }
            if monoid.residue(g, h)?.as_ref() != Some(h) || monoid.residue(h, g)?.as_ref() != Some(g) {
                return fail(format!("residues of `{rg}` and `{rh}` are not each other"));
            }
        }
    }
    Ok(QuasiCenterDescription {
        generators,
        generator_map,
    })
}
