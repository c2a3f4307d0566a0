//! Divisor lattices, finite lattice checks and Hasse diagram export.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::element::{Element, Monoid};
use crate::error::{Error, Result};
use crate::presentation::Generator;

/// A covering edge `upper = lower · generator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cover {
    pub lower: usize,
    pub upper: usize,
    pub generator: Generator,
}

/// The poset `↓(a)` of left divisors of `a`, with generator-labelled covers.
#[derive(Clone, Debug)]
pub struct DivisorLattice {
    elements: Vec<Element>,
    names: Vec<String>,
    generator_names: Vec<String>,
    covers: Vec<Cover>,
}

/// Builds `↓(a)`, ordered by left divisibility. Elements are sorted by length,
/// then by canonical word, so the bottom is index 0 and the top is last.
pub fn divisor_lattice(monoid: &Monoid, a: &Element) -> Result<DivisorLattice> {
    let elements: Vec<Element> = monoid.left_divisors(a)?.into_iter().collect();
    let mut covers = BTreeSet::new();
    for (i, u) in elements.iter().enumerate() {
        if u.len() == a.len() {
            continue;
        }
        for g in 0..monoid.rank() as Generator {
            let v = monoid.multiply(u, &monoid.generator(g))?;
            if let Ok(j) = elements.binary_search(&v) {
                covers.insert(Cover {
                    lower: i,
                    upper: j,
                    generator: g,
                });
            }
        }
    }
    Ok(DivisorLattice {
        names: elements.iter().map(|e| monoid.render(e)).collect(),
        generator_names: monoid.presentation().alphabet().symbols().to_vec(),
        elements,
        covers: covers.into_iter().collect(),
    })
}

impl DivisorLattice {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn bottom(&self) -> &Element {
        &self.elements[0]
    }

    pub fn top(&self) -> &Element {
        self.elements.last().expect("a divisor lattice contains its top")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn to_finite_lattice(&self) -> Result<FiniteLattice> {
        FiniteLattice::new(
            self.names.clone(),
            self.covers
                .iter()
                .map(|c| (c.lower, c.upper, Some(self.generator_names[c.generator as usize].clone())))
                .collect(),
        )
    }

    pub fn export_hasse(&self, format: HasseFormat) -> Result<String> {
        self.to_finite_lattice()?.export(format)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HasseFormat {
    Dot,
    Json,
}

impl FromStr for HasseFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(HasseFormat::Dot),
            "json" => Ok(HasseFormat::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Meet,
    Join,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Meet => "meet",
            BoundKind::Join => "join",
        })
    }
}

/// A pair of elements lacking a meet or a join.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MissingBound {
    pub kind: BoundKind,
    pub a: usize,
    pub b: usize,
}

struct BoundTables {
    meet: Vec<Option<usize>>,
    join: Vec<Option<usize>>,
}

/// A finite poset given by its covers, with lattice property checks.
pub struct FiniteLattice {
    ids: Vec<String>,
    covers: Vec<(usize, usize)>,
    labels: Vec<Option<String>>,
    leq: Vec<Vec<bool>>,
    bounds: OnceLock<BoundTables>,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    elements: Vec<Value>,
    covers: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

fn id_of(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl FiniteLattice {
    /// Checks that ids are distinct, covers reference known elements and the
    /// order is acyclic. Bottom and top are not required here; their absence
    /// shows up as a missing meet or join.
    pub fn new(ids: Vec<String>, covers: Vec<(usize, usize, Option<String>)>) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidLattice("no elements".into()));
        }
        let distinct: BTreeSet<&String> = ids.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidLattice("duplicate element id".into()));
        }
        let mut succ = vec![Vec::new(); n];
        for &(u, v, _) in &covers {
            if u >= n || v >= n {
                return Err(Error::InvalidLattice(format!("cover ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidLattice(format!("self-loop at `{}`", ids[u])));
            }
            succ[u].push(v);
        }

        // Kahn's algorithm; leftover vertices mean a cycle.
        let mut indegree = vec![0usize; n];
        for s in &succ {
            for &v in s {
                indegree[v] += 1;
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in &succ[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    order.push(v);
                }
            }
        }
        if order.len() != n {
            return Err(Error::InvalidLattice("covers contain a cycle".into()));
        }

        let mut leq = vec![vec![false; n]; n];
        for &u in order.iter().rev() {
            leq[u][u] = true;
            for &v in &succ[u] {
                let (row_u, row_v) = if u < v {
                    let (lo, hi) = leq.split_at_mut(v);
                    (&mut lo[u], &hi[0])
                } else {
                    let (lo, hi) = leq.split_at_mut(u);
                    (&mut hi[0], &lo[v])
                };
                for (a, &b) in row_u.iter_mut().zip(row_v.iter()) {
                    *a |= b;
                }
            }
        }

        let (covers, labels) = covers.into_iter().map(|(u, v, l)| ((u, v), l)).unzip();
        Ok(FiniteLattice {
            ids,
            covers,
            labels,
            leq,
            bounds: OnceLock::new(),
        })
    }

    /// Reads `{"elements":[ids],"covers":[[u,v],...]}`; a cover may carry a
    /// label as a third entry, or labels may come as a parallel `labels` array.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LatticeJson = serde_json::from_str(text)?;
        let ids: Vec<String> = raw.elements.iter().map(id_of).collect();
        let index = |v: &Value| -> Result<usize> {
            let id = id_of(v);
            ids.iter()
                .position(|x| *x == id)
                .ok_or_else(|| Error::InvalidLattice(format!("cover references unknown element `{id}`")))
        };
        let mut covers = Vec::new();
        for (i, c) in raw.covers.iter().enumerate() {
            let (u, v, label) = match c.as_slice() {
                [u, v] => (u, v, None),
                [u, v, l] => (u, v, Some(id_of(l))),
                _ => return Err(Error::InvalidLattice(format!("cover #{i} must be [u, v] or [u, v, label]"))),
            };
            let label = label.or_else(|| raw.labels.as_ref().and_then(|ls| ls.get(i).cloned()));
            covers.push((index(u)?, index(v)?, label));
        }
        FiniteLattice::new(ids, covers)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// The least element, if there is exactly one minimal element.
    pub fn bottom(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&b| (0..n).all(|x| self.leq[b][x]))
    }

    pub fn top(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&t| (0..n).all(|x| self.leq[x][t]))
    }

    fn tables(&self) -> &BoundTables {
        self.bounds.get_or_init(|| {
            let n = self.len();
            let mut meet = vec![None; n * n];
            let mut join = vec![None; n * n];
            for a in 0..n {
                for b in a..n {
                    let lower: Vec<usize> = (0..n).filter(|&k| self.leq[k][a] && self.leq[k][b]).collect();
                    let m = lower.iter().copied().find(|&k| lower.iter().all(|&l| self.leq[l][k]));
                    let upper: Vec<usize> = (0..n).filter(|&k| self.leq[a][k] && self.leq[b][k]).collect();
                    let j = upper.iter().copied().find(|&k| upper.iter().all(|&l| self.leq[k][l]));
                    meet[a * n + b] = m;
                    meet[b * n + a] = m;
                    join[a * n + b] = j;
                    join[b * n + a] = j;
                }
            }
            BoundTables { meet, join }
        })
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.tables().meet[a * self.len() + b]
    }

    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.tables().join[a * self.len() + b]
    }

    /// First pair (in index order) lacking a meet or a join.
    pub fn lattice_failure(&self) -> Option<MissingBound> {
        let n = self.len();
        for a in 0..n {
            for b in a..n {
                if self.meet(a, b).is_none() {
                    return Some(MissingBound { kind: BoundKind::Meet, a, b });
                }
                if self.join(a, b).is_none() {
                    return Some(MissingBound { kind: BoundKind::Join, a, b });
                }
            }
        }
        None
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice_failure().is_none()
    }

    /// A triple violating `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`. Only meaningful
    /// on lattices; returns `None` when some bound is missing.
    pub fn distributivity_failure(&self) -> Option<[usize; 3]> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let lhs = self.join(b, c).and_then(|bc| self.meet(a, bc));
                    let rhs = match (self.meet(a, b), self.meet(a, c)) {
                        (Some(ab), Some(ac)) => self.join(ab, ac),
                        _ => None,
                    };
                    if let (Some(l), Some(r)) = (lhs, rhs) {
                        if l != r {
                            return Some([a, b, c]);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.is_lattice() && self.distributivity_failure().is_none()
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<usize> {
        let Some(bottom) = self.bottom() else {
            return Vec::new();
        };
        let n = self.len();
        (0..n)
            .filter(|&a| a != bottom && (0..n).all(|x| x == bottom || x == a || !(self.leq[x][a])))
            .collect()
    }

    /// Whether `e ↦ {atoms below e}` is an order isomorphism onto the full
    /// powerset of the atoms.
    pub fn is_hypercube(&self) -> bool {
        if !self.is_lattice() {
            return false;
        }
        let atoms = self.atoms();
        if atoms.len() >= 63 || self.len() != 1usize << atoms.len() {
            return false;
        }
        let masks: Vec<u64> = (0..self.len())
            .map(|e| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| self.leq[a][e])
                    .fold(0u64, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let distinct: BTreeSet<u64> = masks.iter().copied().collect();
        if distinct.len() != self.len() {
            return false;
        }
        (0..self.len()).all(|e| (0..self.len()).all(|f| self.leq[e][f] == (masks[e] & !masks[f] == 0)))
    }

    /// Length of the longest chain.
    pub fn height(&self) -> usize {
        let n = self.len();
        // Longest path in the cover DAG; rows of `leq` give a topological order
        // by counting predecessors.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (0..n).filter(|&u| self.leq[u][v]).count());
        let mut depth = vec![0usize; n];
        for &v in &order {
            for &(a, b) in &self.covers {
                if b == v {
                    depth[v] = depth[v].max(depth[a] + 1);
                }
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Deterministic DOT or JSON rendering; nodes and edges keep index order.
    pub fn export(&self, format: HasseFormat) -> Result<String> {
        let mut edges: Vec<(usize, usize, Option<&String>)> = self
            .covers
            .iter()
            .zip(&self.labels)
            .map(|(&(u, v), l)| (u, v, l.as_ref()))
            .collect();
        edges.sort();
        match format {
            HasseFormat::Dot => {
                let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=plaintext];\n");
                for (i, id) in self.ids.iter().enumerate() {
                    out.push_str(&format!("  n{i} [label=\"{}\"];\n", escape(id)));
                }
                for (u, v, label) in edges {
                    match label {
                        Some(l) => out.push_str(&format!("  n{u} -> n{v} [label=\"{}\"];\n", escape(l))),
                        None => out.push_str(&format!("  n{u} -> n{v};\n")),
                    }
                }
                out.push_str("}\n");
                Ok(out)
            }
            HasseFormat::Json => {
                let all_labelled = edges.iter().all(|e| e.2.is_some());
                let raw = LatticeJson {
                    elements: self.ids.iter().cloned().map(Value::String).collect(),
                    covers: edges
                        .iter()
                        .map(|&(u, v, _)| vec![Value::String(self.ids[u].clone()), Value::String(self.ids[v].clone())])
                        .collect(),
                    labels: all_labelled.then(|| edges.iter().map(|e| e.2.cloned().unwrap_or_default()).collect()),
                };
                Ok(serde_json::to_string_pretty(&raw)?)
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::QuadraticPresentation;

    fn lattice(n: usize, covers: &[(usize, usize)]) -> FiniteLattice {
        FiniteLattice::new(
            (0..n).map(|i| i.to_string()).collect(),
            covers.iter().map(|&(u, v)| (u, v, None)).collect(),
        )
        .unwrap()
    }

    fn square() -> FiniteLattice {
        lattice(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    fn cube() -> FiniteLattice {
        let mut covers = Vec::new();
        for s in 0..8usize {
            for bit in 0..3 {
                if s & (1 << bit) == 0 {
                    covers.push((s, s | 1 << bit));
                }
            }
        }
        lattice(8, &covers)
    }

    #[test]
    fn square_is_a_boolean_lattice() {
        let l = square();
        assert!(l.is_lattice());
        assert!(l.is_distributive());
        assert!(l.is_hypercube());
        assert_eq!(l.height(), 2);
        assert_eq!(l.meet(1, 2), Some(0));
        assert_eq!(l.join(1, 2), Some(3));
    }

    #[test]
    fn antichain_without_top_is_not_a_lattice() {
        let l = lattice(3, &[(0, 1), (0, 2)]);
        assert_eq!(l.top(), None);
        let missing = l.lattice_failure().unwrap();
        assert_eq!((missing.kind, missing.a, missing.b), (BoundKind::Join, 1, 2));
        assert!(!l.is_hypercube());
    }

    #[test]
    fn diamond_is_not_distributive() {
        let l = lattice(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]);
        assert!(l.is_lattice());
        assert!(!l.is_distributive());
        assert!(l.distributivity_failure().is_some());
    }

    #[test]
    fn pentagon_is_not_distributive() {
        let l = lattice(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]);
        assert!(l.is_lattice());
        assert!(!l.is_distributive());
    }

    #[test]
    fn cubes_and_chains() {
        assert!(cube().is_distributive());
        assert!(cube().is_hypercube());
        assert_eq!(cube().height(), 3);
        assert!(lattice(2, &[(0, 1)]).is_hypercube());
        assert!(!lattice(3, &[(0, 1), (1, 2)]).is_hypercube());
        assert!(lattice(3, &[(0, 1), (1, 2)]).is_distributive());
        assert_eq!(lattice(1, &[]).height(), 0);
        assert!(lattice(1, &[]).is_hypercube());
    }

    #[test]
    fn structural_errors() {
        assert!(FiniteLattice::new(vec![], vec![]).is_err());
        assert!(FiniteLattice::new(vec!["a".into(), "b".into()], vec![(0, 1, None), (1, 0, None)]).is_err());
        assert!(FiniteLattice::new(vec!["a".into(), "a".into()], vec![]).is_err());
        assert!(FiniteLattice::from_json(r#"{"elements":[],"covers":[]}"#).is_err());
        assert!("svg".parse::<HasseFormat>().is_err());
    }

    #[test]
    fn square_dot_export() {
        let p = QuadraticPresentation::from_relations(&["x", "y"], &[("x y", "y x")]).unwrap();
        let m = Monoid::new(p);
        let top = m.parse_element("x y").unwrap();
        let d = divisor_lattice(&m, &top).unwrap();
        assert_eq!(d.names(), ["1", "x", "y", "x y"]);
        let dot = d.export_hasse(HasseFormat::Dot).unwrap();
        assert_eq!(dot.matches("[label=").count(), 8);
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("n0 -> n1 [label=\"x\"]"));
        assert!(dot.contains("n1 -> n3 [label=\"y\"]"));
        assert_eq!(dot, d.export_hasse(HasseFormat::Dot).unwrap());
    }

    #[test]
    fn json_round_trip_preserves_order() {
        let p = QuadraticPresentation::from_relations(&["x", "y", "z"], &[("x x", "y z"), ("y y", "z x"), ("z z", "x y")])
            .unwrap();
        let m = Monoid::new(p);
        let delta = m.parse_element("x x x").unwrap();
        let l = divisor_lattice(&m, &delta).unwrap().to_finite_lattice().unwrap();
        let back = FiniteLattice::from_json(&l.export(HasseFormat::Json).unwrap()).unwrap();
        assert_eq!(back.ids(), l.ids());
        for a in 0..l.len() {
            for b in 0..l.len() {
                assert_eq!(back.leq(a, b), l.leq(a, b));
            }
        }
        assert!(back.is_hypercube());
    }

    #[test]
    fn unlabelled_json_import() {
        let l = FiniteLattice::from_json(r#"{"elements":[0,1,2,3],"covers":[[0,1],[0,2],[1,3],[2,3]]}"#).unwrap();
        assert!(l.is_hypercube());
        let l = FiniteLattice::from_json(r#"{"elements":["1","x"],"covers":[["1","x","x"]]}"#).unwrap();
        assert!(l.export(HasseFormat::Dot).unwrap().contains("label=\"x\""));
    }
}
