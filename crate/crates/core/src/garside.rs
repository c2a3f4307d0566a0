//! Garside detection, minimal Garside element and the simple-element lattice.

use std::collections::BTreeSet;

use crate::delta::local_delta;
use crate::element::{Element, Monoid};
use crate::error::{Error, Result};
use crate::lattice::{divisor_lattice, DivisorLattice};
use crate::presentation::Generator;

#[derive(Clone, Debug)]
pub struct GarsideReport {
    pub is_garside: bool,
    /// First generator pair, in lexicographic order, without a common multiple.
    pub witness: Option<(Generator, Generator)>,
    pub delta: Option<Element>,
    pub simple_lattice: Option<DivisorLattice>,
    pub hypercube: Option<bool>,
}

fn first_pair_without_lcm(monoid: &Monoid) -> Result<Option<(Generator, Generator)>> {
    let rank = monoid.rank() as Generator;
    for x in 0..rank {
        for y in x + 1..rank {
            if monoid.right_lcm(&monoid.generator(x), &monoid.generator(y))?.is_none() {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// `Δ = ∨ Δ(x)`, checked against `∨ x`. Errors with `NotGarside` when some
/// pair of generators has no common multiple.
pub fn minimal_garside_element(monoid: &Monoid) -> Result<Element> {
    if let Some((x, y)) = first_pair_without_lcm(monoid)? {
        let alphabet = monoid.presentation().alphabet();
        return Err(Error::NotGarside(alphabet.name(x).into(), alphabet.name(y).into()));
    }
    let mut deltas = Vec::with_capacity(monoid.rank());
    for x in monoid.generators() {
        match local_delta(monoid, &x)?.delta {
            Some(d) => deltas.push(d),
            None => {
                return Err(Error::Verification(format!(
                    "generator `{}` has no local delta although all generator lcms exist",
                    monoid.render(&x)
                )))
            }
        }
    }
    let delta = monoid
        .right_lcm_all(&deltas)?
        .ok_or_else(|| Error::Verification("local deltas of the generators have no common multiple".into()))?;
    let join_of_atoms = monoid
        .right_lcm_all(&monoid.generators())?
        .ok_or_else(|| Error::Verification("generators have no common multiple".into()))?;
    if delta != join_of_atoms {
        return Err(Error::Verification(format!(
            "join of local deltas `{}` differs from join of generators `{}`",
            monoid.render(&delta),
            monoid.render(&join_of_atoms)
        )));
    }
    Ok(delta)
}

pub fn is_garside(monoid: &Monoid) -> Result<GarsideReport> {
    if let Some(pair) = first_pair_without_lcm(monoid)? {
        return Ok(GarsideReport {
            is_garside: false,
            witness: Some(pair),
            delta: None,
            simple_lattice: None,
            hypercube: None,
        });
    }
    let delta = minimal_garside_element(monoid)?;
    let lattice = divisor_lattice(monoid, &delta)?;
    let finite = lattice.to_finite_lattice()?;
    if !finite.is_hypercube() || lattice.len() != 1usize << monoid.rank() {
        return Err(Error::Verification(format!(
            "simple elements below `{}` do not form a hypercube of dimension {}",
            monoid.render(&delta),
            monoid.rank()
        )));
    }
    Ok(GarsideReport {
        is_garside: true,
        witness: None,
        delta: Some(delta),
        simple_lattice: Some(lattice),
        hypercube: Some(true),
    })
}

/// The divisors of a Garside element, checked to be the same on both sides
/// and to contain every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GarsideDivisors {
    pub divisors: BTreeSet<Element>,
}

pub fn garside_divisor_properties(monoid: &Monoid, delta: &Element) -> Result<GarsideDivisors> {
    let left = monoid.left_divisors(delta)?;
    let right = monoid.right_divisors(delta)?;
    if left != right {
        return Err(Error::Verification(format!(
            "left and right divisors of `{}` differ",
            monoid.render(delta)
        )));
    }
    if let Some(x) = monoid.generators().into_iter().find(|x| !left.contains(x)) {
        return Err(Error::Verification(format!(
            "generator `{}` does not divide `{}`",
            monoid.render(&x),
            monoid.render(delta)
        )));
    }
    Ok(GarsideDivisors { divisors: left })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Engine;
    use crate::presentation::QuadraticPresentation;

    fn monoids(generators: &[&str], relations: &[(&str, &str)]) -> Vec<Monoid> {
        let p = QuadraticPresentation::from_relations(generators, relations).unwrap();
        vec![
            Monoid::divisibility(p.clone()).unwrap(),
            Monoid::new(p).with_engine(Engine::Enumeration).unwrap(),
        ]
    }

    #[test]
    fn m35_is_garside_with_cube() {
        for m in monoids(&["x", "y", "z"], &[("x x", "y z"), ("y y", "z x"), ("z z", "x y")]) {
            let report = is_garside(&m).unwrap();
            let cube = m.parse_element("x x x").unwrap();
            assert!(report.is_garside);
            assert_eq!(report.delta, Some(cube.clone()));
            let lattice = report.simple_lattice.unwrap();
            assert_eq!(lattice.len(), 8);
            assert_eq!(lattice.covers().len(), 12);
            assert_eq!(report.hypercube, Some(true));
            assert_eq!(garside_divisor_properties(&m, &cube).unwrap().divisors.len(), 8);
        }
    }

    #[test]
    fn non_garside_witnesses() {
        for m in monoids(&["x", "y"], &[]) {
            let report = is_garside(&m).unwrap();
            assert!(!report.is_garside);
            assert_eq!(report.witness, Some((0, 1)));
            assert!(matches!(minimal_garside_element(&m), Err(Error::NotGarside(..))));
        }
        for m in monoids(&["x", "y", "z"], &[("x y", "y z"), ("y x", "z y")]) {
            assert_eq!(is_garside(&m).unwrap().witness, Some((0, 2)));
        }
    }

    #[test]
    fn small_garside_elements() {
        for m in monoids(&["x", "y"], &[("x y", "y x")]) {
            let delta = minimal_garside_element(&m).unwrap();
            assert_eq!(m.render(&delta), "x y");
            let names: Vec<String> = garside_divisor_properties(&m, &delta)
                .unwrap()
                .divisors
                .iter()
                .map(|d| m.render(d))
                .collect();
            assert_eq!(names, ["1", "x", "y", "x y"]);
        }
        for m in monoids(&["x", "y"], &[("x x", "y y")]) {
            let delta = minimal_garside_element(&m).unwrap();
            assert_eq!(m.render(&delta), "x x");
            assert_eq!(garside_divisor_properties(&m, &delta).unwrap().divisors.len(), 4);
        }
    }

    #[test]
    fn non_garside_element_is_rejected() {
        let m = &monoids(&["x", "y"], &[("x y", "y x")])[0];
        assert!(garside_divisor_properties(m, &m.generator(0)).is_err());
    }
}
