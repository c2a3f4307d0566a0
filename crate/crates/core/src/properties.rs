//! Sampled checks of the divisibility calculus, local deltas and the
//! quasi-center on a concrete monoid.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delta::{is_quasi_central, local_delta, quasi_center};
use crate::element::{Element, Engine, Monoid};
use crate::error::Result;
use crate::lattice::divisor_lattice;
use crate::presentation::{Generator, Word};

/// Which elements and tuples the checks run on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplingPlan {
    pub seed: u64,
    /// Every element up to this length joins the pool.
    pub exhaustive_length: usize,
    /// Random products of generators added to the pool.
    pub random_products: usize,
    pub random_length: usize,
    /// Every pair of pool elements up to this length is checked.
    pub exhaustive_pair_length: usize,
    /// Every triple of pool elements up to this length is checked.
    pub exhaustive_triple_length: usize,
    pub random_pairs: usize,
    pub random_triples: usize,
    /// Pool elements up to this length also get their divisor lattice checked.
    pub lattice_length: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            seed: 0,
            exhaustive_length: 4,
            random_products: 200,
            random_length: 8,
            exhaustive_pair_length: 2,
            exhaustive_triple_length: 1,
            random_pairs: 400,
            random_triples: 400,
            lattice_length: 4,
        }
    }
}

impl SamplingPlan {
    /// A reduced plan for the enumeration engine, whose cost grows with
    /// class sizes.
    pub fn short() -> Self {
        SamplingPlan {
            exhaustive_length: 3,
            random_products: 0,
            random_length: 3,
            random_pairs: 60,
            random_triples: 60,
            lattice_length: 3,
            ..SamplingPlan::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SamplingPlan { seed, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyViolation {
    pub property: String,
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    pub presentation: String,
    pub pool_size: usize,
    /// Number of instances checked, per property.
    pub checked: BTreeMap<String, usize>,
    pub violations: Vec<PropertyViolation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: PropertyReport) {
        for (k, v) in other.checked {
            *self.checked.entry(k).or_insert(0) += v;
        }
        self.violations.extend(other.violations);
        self.pool_size = self.pool_size.max(other.pool_size);
    }
}

const MAX_VIOLATIONS_PER_PROPERTY: usize = 10;

struct Recorder<'m> {
    monoid: &'m Monoid,
    report: PropertyReport,
}

impl<'m> Recorder<'m> {
    fn check(&mut self, property: &str, holds: bool, witness: &[&Element], detail: impl FnOnce() -> String) {
        *self.report.checked.entry(property.to_string()).or_insert(0) += 1;
        if holds {
            return;
        }
        let seen = self.report.violations.iter().filter(|v| v.property == property).count();
        if seen < MAX_VIOLATIONS_PER_PROPERTY {
            self.report.violations.push(PropertyViolation {
                property: property.to_string(),
                witness: witness.iter().map(|e| self.monoid.render(e)).collect(),
                detail: detail(),
            });
        }
    }
}

/// Memoised local deltas and quasi-centrality over the sample.
struct Deltas<'m> {
    monoid: &'m Monoid,
    delta: BTreeMap<Element, Option<Element>>,
    central: BTreeMap<Element, bool>,
}

impl<'m> Deltas<'m> {
    fn delta(&mut self, a: &Element) -> Result<Option<Element>> {
        if let Some(d) = self.delta.get(a) {
            return Ok(d.clone());
        }
        let d = local_delta(self.monoid, a)?.delta;
        self.delta.insert(a.clone(), d.clone());
        Ok(d)
    }

    fn central(&mut self, a: &Element) -> Result<bool> {
        if let Some(&c) = self.central.get(a) {
            return Ok(c);
        }
        let c = is_quasi_central(self.monoid, a)?.is_some();
        self.central.insert(a.clone(), c);
        Ok(c)
    }
}

/// All elements of length at most `plan.exhaustive_length` plus seeded random
/// products, in shortlex order.
pub fn sample_pool(monoid: &Monoid, plan: &SamplingPlan) -> Result<Vec<Element>> {
    let rank = monoid.rank() as Generator;
    let mut pool = BTreeSet::new();
    let mut layer = vec![Vec::new()];
    for _ in 0..=plan.exhaustive_length {
        for w in &layer {
            pool.insert(monoid.element(w)?);
        }
        layer = layer
            .iter()
            .flat_map(|w| (0..rank).map(move |g| [w.as_slice(), &[g]].concat()))
            .collect();
    }
    if rank > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        for _ in 0..plan.random_products {
            let len = rng.gen_range(1..=plan.random_length.max(1));
            let word: Vec<Generator> = (0..len).map(|_| rng.gen_range(0..rank)).collect();
            pool.insert(monoid.element(&word)?);
        }
    }
    Ok(pool.into_iter().collect())
}

fn lift<T, U>(a: Option<T>, f: impl FnOnce(T) -> Result<Option<U>>) -> Result<Option<U>> {
    match a {
        Some(a) => f(a),
        None => Ok(None),
    }
}

/// Runs every property on `monoid` with the given plan.
pub fn run_checks(monoid: &Monoid, plan: &SamplingPlan) -> Result<PropertyReport> {
    let pool = sample_pool(monoid, plan)?;
    let mut rec = Recorder {
        monoid,
        report: PropertyReport {
            presentation: monoid.presentation().to_string(),
            pool_size: pool.len(),
            ..PropertyReport::default()
        },
    };
    let mut deltas = Deltas {
        monoid,
        delta: BTreeMap::new(),
        central: BTreeMap::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed.wrapping_add(1));

    let short = |len: usize| pool.iter().filter(move |e| e.len() <= len).collect::<Vec<_>>();
    let mut pairs: Vec<[&Element; 2]> = short(plan.exhaustive_pair_length)
        .into_iter()
        .cartesian_product(short(plan.exhaustive_pair_length))
        .map(|(a, b)| [a, b])
        .collect();
    let mut triples: Vec<[&Element; 3]> = itertools::iproduct!(
        short(plan.exhaustive_triple_length),
        short(plan.exhaustive_triple_length),
        short(plan.exhaustive_triple_length)
    )
    .map(|(a, b, c)| [a, b, c])
    .collect();
    for _ in 0..plan.random_pairs {
        pairs.push([&pool[rng.gen_range(0..pool.len())], &pool[rng.gen_range(0..pool.len())]]);
    }
    for _ in 0..plan.random_triples {
        triples.push([
            &pool[rng.gen_range(0..pool.len())],
            &pool[rng.gen_range(0..pool.len())],
            &pool[rng.gen_range(0..pool.len())],
        ]);
    }

    unary_checks(monoid, &pool, plan, &mut rec, &mut deltas)?;
    for [a, b] in &pairs {
        pair_checks(monoid, a, b, &mut rec, &mut deltas)?;
    }
    for [a, b, c] in &triples {
        calculus_identities(monoid, a, b, c, &mut rec)?;
    }
    quasi_center_checks(monoid, &pool, &mut rng, &mut rec, &mut deltas)?;
    Ok(rec.report)
}

fn unary_checks(
    m: &Monoid,
    pool: &[Element],
    plan: &SamplingPlan,
    rec: &mut Recorder,
    deltas: &mut Deltas,
) -> Result<()> {
    for a in pool {
        rec.check("conicity", a.is_identity() == a.is_empty(), &[a], || "identity has length 0".into());

        let delta = deltas.delta(a)?;
        let central = deltas.central(a)?;
        rec.check("quasi-central-iff-fixpoint", central == (delta.as_ref() == Some(a)), &[a], || {
            format!("quasi-central: {central}, local delta: {:?}", delta.as_ref().map(|d| m.render(d)))
        });
        if let Some(d) = &delta {
            let d_central = deltas.central(d)?;
            rec.check("delta-quasi-central", d_central, &[a, d], || "local delta is not quasi-central".into());
            let dd = deltas.delta(d)?;
            rec.check("delta-idempotent", dd.as_ref() == Some(d), &[a, d], || {
                format!("delta of delta is {:?}", dd.as_ref().map(|e| m.render(e)))
            });
            let below = m.left_divides(a, d)?;
            rec.check("element-divides-delta", below, &[a, d], || "a does not left-divide its delta".into());
        }

        if a.len() <= plan.lattice_length {
            let lattice = divisor_lattice(m, a)?;
            let finite = lattice.to_finite_lattice()?;
            rec.check("divisor-lattice-distributive", finite.is_distributive(), &[a], || {
                "divisor lattice is not a distributive lattice".into()
            });
            rec.check("divisor-lattice-height", finite.height() == a.len(), &[a], || {
                format!("height {} for length {}", finite.height(), a.len())
            });
        }
    }
    Ok(())
}

fn pair_checks(m: &Monoid, a: &Element, b: &Element, rec: &mut Recorder, deltas: &mut Deltas) -> Result<()> {
    let lcm = m.right_lcm(a, b)?;
    let a_b = m.residue(a, b)?;
    let b_a = m.residue(b, a)?;
    rec.check(
        "lcm-existence",
        lcm.is_some() == a_b.is_some() && lcm.is_some() == b_a.is_some(),
        &[a, b],
        || "lcm and residues disagree on existence".into(),
    );
    if let (Some(l), Some(ab), Some(ba)) = (&lcm, &a_b, &b_a) {
        let left = m.multiply(a, ab)?;
        let right = m.multiply(b, ba)?;
        rec.check("lcm-residue", &left == l && &right == l, &[a, b], || {
            format!("a(a\\b) = {}, b(b\\a) = {}, lcm = {}", m.render(&left), m.render(&right), m.render(l))
        });
    }
    if let Some(r) = &b_a {
        rec.check("residue-length", r.len() <= a.len(), &[b, a], || {
            format!("|b\\a| = {} exceeds |a| = {}", r.len(), a.len())
        });
    }

    for (name, divides) in [
        ("left-antisymmetry", Monoid::left_divides as fn(&Monoid, &Element, &Element) -> Result<bool>),
        ("right-antisymmetry", Monoid::right_divides),
    ] {
        let both = divides(m, a, b)? && divides(m, b, a)?;
        rec.check(name, !both || a == b, &[a, b], || "mutual divisors differ".into());
    }

    let g = m.left_gcd(a, b)?;
    rec.check("gcd-commutative", g == m.left_gcd(b, a)?, &[a, b], || "a∧b != b∧a".into());
    rec.check("gcd-idempotent", m.left_gcd(a, a)? == *a, &[a], || "a∧a != a".into());
    rec.check(
        "gcd-is-common-divisor",
        m.left_divides(&g, a)? && m.left_divides(&g, b)?,
        &[a, b, &g],
        || "gcd does not divide both".into(),
    );

    if let (Some(da), Some(db)) = (deltas.delta(a)?, deltas.delta(b)?) {
        let joined = lcm.as_ref().map(|l| deltas.delta(l)).transpose()?.flatten();
        let expected = m.right_lcm(&da, &db)?;
        rec.check(
            "delta-of-lcm",
            lcm.is_some() && joined.is_some() && joined == expected,
            &[a, b],
            || {
                format!(
                    "Δ(a∨b) = {:?}, Δ(a)∨Δ(b) = {:?}",
                    joined.as_ref().map(|e| m.render(e)),
                    expected.as_ref().map(|e| m.render(e))
                )
            },
        );
    }
    Ok(())
}

fn calculus_identities(m: &Monoid, a: &Element, b: &Element, c: &Element, rec: &mut Recorder) -> Result<()> {
    let res = |u: &Element, v: &Element| m.residue(u, v);
    let lcm = |u: &Element, v: &Element| m.right_lcm(u, v);
    let render = |e: &Option<Element>| e.as_ref().map_or("none".to_string(), |e| m.render(e));
    let ab = m.multiply(a, b)?;
    let ac = m.multiply(a, c)?;

    // (ab)∨(ac) = a(b∨c)
    let lhs = lcm(&ab, &ac)?;
    let rhs = lift(lcm(b, c)?, |bc| m.multiply(a, &bc).map(Some))?;
    rec.check("calculus-lcm-of-left-multiples", lhs == rhs, &[a, b, c], || {
        format!("{} vs {}", render(&lhs), render(&rhs))
    });

    // c\(ab) = (c\a)((a\c)\b)
    let lhs = res(c, &ab)?;
    let rhs = match (res(c, a)?, res(a, c)?) {
        (Some(ca), Some(ac_)) => lift(res(&ac_, b)?, |t| m.multiply(&ca, &t).map(Some))?,
        _ => None,
    };
    rec.check("calculus-residue-into-product", lhs == rhs, &[a, b, c], || {
        format!("{} vs {}", render(&lhs), render(&rhs))
    });

    // (ab)\c = b\(a\c)
    let lhs = res(&ab, c)?;
    let rhs = lift(res(a, c)?, |t| res(b, &t))?;
    rec.check("calculus-residue-of-product", lhs == rhs, &[a, b, c], || {
        format!("{} vs {}", render(&lhs), render(&rhs))
    });

    // (a∨b)\c = (a\b)\(a\c) = (b\a)\(b\c)
    let lhs = lift(lcm(a, b)?, |l| res(&l, c))?;
    let mid = match (res(a, b)?, res(a, c)?) {
        (Some(x), Some(y)) => res(&x, &y)?,
        _ => None,
    };
    let rhs = match (res(b, a)?, res(b, c)?) {
        (Some(x), Some(y)) => res(&x, &y)?,
        _ => None,
    };
    rec.check("calculus-residue-of-lcm", lhs == mid && mid == rhs, &[a, b, c], || {
        format!("{} vs {} vs {}", render(&lhs), render(&mid), render(&rhs))
    });

    // c\(a∨b) = (c\a)∨(c\b)
    let lhs = lift(lcm(a, b)?, |l| res(c, &l))?;
    let rhs = match (res(c, a)?, res(c, b)?) {
        (Some(x), Some(y)) => lcm(&x, &y)?,
        _ => None,
    };
    rec.check("calculus-residue-into-lcm", lhs == rhs, &[a, b, c], || {
        format!("{} vs {}", render(&lhs), render(&rhs))
    });

    let g = m.left_gcd(&m.left_gcd(a, b)?, c)?;
    let h = m.left_gcd(a, &m.left_gcd(b, c)?)?;
    rec.check("gcd-associative", g == h, &[a, b, c], || format!("{} vs {}", m.render(&g), m.render(&h)));
    Ok(())
}

fn quasi_center_checks(
    m: &Monoid,
    pool: &[Element],
    rng: &mut ChaCha8Rng,
    rec: &mut Recorder,
    deltas: &mut Deltas,
) -> Result<()> {
    let qc = quasi_center(m)?;

    // Dichotomy for generators admitting local deltas.
    for (x, dx) in qc.generator_map.iter().enumerate() {
        for (y, dy) in qc.generator_map.iter().enumerate().skip(x + 1) {
            if let (Some(dx), Some(dy)) = (dx, dy) {
                let coprime = m.left_gcd(dx, dy)?.is_identity();
                let (gx, gy) = (m.generator(x as Generator), m.generator(y as Generator));
                rec.check("delta-dichotomy", dx == dy || coprime, &[&gx, &gy], || {
                    "local deltas neither equal nor coprime".into()
                });
            }
        }
    }

    // Free abelian structure: commuting, coprime generators with distinct
    // products for distinct exponent vectors.
    for (g, h) in qc.generators.iter().tuple_combinations() {
        let commute = m.multiply(g, h)? == m.multiply(h, g)?;
        let coprime = m.left_gcd(g, h)?.is_identity();
        let residue = m.residue(g, h)?.as_ref() == Some(h);
        rec.check("free-abelian-relations", commute && coprime && residue, &[g, h], || {
            format!("commute {commute}, coprime {coprime}, g\\h = h {residue}")
        });
    }
    let k = qc.rank();
    let mut products: BTreeMap<Element, Vec<usize>> = BTreeMap::new();
    let mut central_sample: BTreeSet<Element> = BTreeSet::new();
    for exponents in (0..k).map(|_| 0..3usize).multi_cartesian_product() {
        let mut e = m.identity();
        for (g, &n) in qc.generators.iter().zip(&exponents) {
            for _ in 0..n {
                e = m.multiply(&e, g)?;
            }
        }
        let clash = products.insert(e.clone(), exponents.clone());
        rec.check("free-abelian-exponents", clash.is_none(), &[&e], || {
            format!("exponents {:?} and {exponents:?} give the same element", clash.unwrap_or_default())
        });
        central_sample.insert(e);
    }
    for a in pool {
        if deltas.central(a)? {
            central_sample.insert(a.clone());
        }
    }

    // Quasi-central b: divisibility is one-sided, divisors have local deltas
    // dividing b, and factorizations are all-or-nothing quasi-central.
    for b in &central_sample {
        let central = deltas.central(b)?;
        rec.check("quasi-center-closed", central, &[b], || "product of quasi-center generators is not quasi-central".into());
        let mut candidates: Vec<Element> = m.left_divisors(b)?.into_iter().collect();
        for _ in 0..20.min(pool.len()) {
            candidates.push(pool[rng.gen_range(0..pool.len())].clone());
        }
        for a in &candidates {
            let two_sided = m.divides(a, b)?;
            let left = m.left_divides(a, b)?;
            let right = m.right_divides(a, b)?;
            rec.check("indifferent-divisibility", two_sided == left && left == right, &[a, b], || {
                format!("divides {two_sided}, left {left}, right {right}")
            });
            if two_sided {
                let holds = match deltas.delta(a)? {
                    Some(d) => m.left_divides(&d, b)?,
                    None => false,
                };
                rec.check("delta-of-divisor-divides", holds, &[a, b], || {
                    "divisor of a quasi-central element lacks a local delta dividing it".into()
                });
            }
        }
        for (d, q) in m.left_divisors_with_quotients(b)? {
            let (cd, cq) = (deltas.central(&d)?, deltas.central(&q)?);
            rec.check("straight-factorization", cd == cq, &[b, &d, &q], || {
                format!("left factor quasi-central {cd}, right factor {cq}")
            });
        }
    }
    Ok(())
}

/// Compares the two word-problem engines on every pair of elements of length
/// at most `plan.exhaustive_pair_length + 1`, plus random pairs of elements up
/// to length 4.
pub fn cross_engine_agreement(monoid: &Monoid, plan: &SamplingPlan) -> Result<PropertyReport> {
    let p = monoid.presentation().clone();
    let fast = Monoid::with_budget(p.clone(), monoid.budget()).with_engine(Engine::Reversing)?;
    let slow = Monoid::with_budget(p, monoid.budget()).with_engine(Engine::Enumeration)?;
    let mut rec = Recorder {
        monoid: &fast,
        report: PropertyReport {
            presentation: fast.presentation().to_string(),
            ..PropertyReport::default()
        },
    };
    let short_plan = SamplingPlan {
        exhaustive_length: 4,
        random_products: 0,
        ..plan.clone()
    };
    let words: Vec<Word> = sample_pool(&slow, &short_plan)?
        .into_iter()
        .map(|e| e.word().clone())
        .collect();
    rec.report.pool_size = words.len();

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed.wrapping_add(2));
    let pair_len = plan.exhaustive_pair_length + 1;
    let mut pairs: Vec<(usize, usize)> = (0..words.len())
        .cartesian_product(0..words.len())
        .filter(|&(i, j)| words[i].len() <= pair_len && words[j].len() <= pair_len)
        .collect();
    if !words.is_empty() {
        for _ in 0..plan.random_pairs {
            pairs.push((rng.gen_range(0..words.len()), rng.gen_range(0..words.len())));
        }
    }
    let render = |e: &Option<Element>| e.as_ref().map_or("none".to_string(), |e| fast.render(e));

    for w in &words {
        let (a, b) = (fast.normal_form(w)?, slow.normal_form(w)?);
        let (x, y) = (fast.left_divisors(&a)?, slow.left_divisors(&b)?);
        let same_divisors = x.iter().map(|e| e.word()).eq(y.iter().map(|e| e.word()));
        rec.check("engines-normal-form", a.word() == b.word(), &[&a], || fast.render_word(b.word()));
        rec.check("engines-left-divisors", same_divisors, &[&a], || "left divisor sets differ".into());
    }
    for (i, j) in pairs {
        let (a1, b1) = (fast.normal_form(&words[i])?, fast.normal_form(&words[j])?);
        let (a2, b2) = (slow.normal_form(&words[i])?, slow.normal_form(&words[j])?);
        let word = |e: Option<Element>| e.map(|e| e.word().clone());
        let l1 = fast.right_lcm(&a1, &b1)?;
        let l2 = word(slow.right_lcm(&a2, &b2)?);
        rec.check("engines-lcm", word(l1.clone()) == l2, &[&a1, &b1], || render(&l1));
        let r1 = fast.residue(&a1, &b1)?;
        let r2 = word(slow.residue(&a2, &b2)?);
        rec.check("engines-residue", word(r1.clone()) == r2, &[&a1, &b1], || render(&r1));
        let g1 = fast.left_gcd(&a1, &b1)?;
        let g2 = slow.left_gcd(&a2, &b2)?;
        rec.check("engines-gcd", g1.word() == g2.word(), &[&a1, &b1], || fast.render(&g1));
        let d1 = fast.divides(&a1, &b1)?;
        let d2 = slow.divides(&a2, &b2)?;
        let r1 = fast.right_divides(&a1, &b1)?;
        let r2 = slow.right_divides(&a2, &b2)?;
        rec.check("engines-divides", d1 == d2 && r1 == r2, &[&a1, &b1], || {
            format!("divides {d1}/{d2}, right {r1}/{r2}")
        });
    }
    Ok(rec.report)
}

/// The full suite: the fast engine on `plan`, the enumeration engine on the
/// short plan, and the cross-engine comparison.
pub fn full_suite(monoid: &Monoid, plan: &SamplingPlan) -> Result<PropertyReport> {
    let p = monoid.presentation().clone();
    let fast = Monoid::with_budget(p.clone(), monoid.budget()).with_engine(Engine::Reversing)?;
    let slow = Monoid::with_budget(p, monoid.budget()).with_engine(Engine::Enumeration)?;
    let mut report = run_checks(&fast, plan)?;
    report.merge(run_checks(&slow, &SamplingPlan::short().with_seed(plan.seed))?);
    report.merge(cross_engine_agreement(&fast, plan)?);
    Ok(report)
}
