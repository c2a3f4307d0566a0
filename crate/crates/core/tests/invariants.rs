use divmon_core::{
    canonical_form, census, classify, divisor_lattice, Alphabet, CanonicalPresentation, CensusOptions, ClassBudget,
    Element, Engine, FiniteLattice, Generator, HasseFormat, Monoid, QuadraticPresentation, RelationPair,
};
use proptest::prelude::*;
use std::sync::OnceLock;

fn rank3_divisibility() -> &'static [QuadraticPresentation] {
    static CELL: OnceLock<Vec<QuadraticPresentation>> = OnceLock::new();
    CELL.get_or_init(|| {
        census(3, &CensusOptions::default())
            .unwrap()
            .entries
            .into_iter()
            .map(|e| CanonicalPresentation { rank: 3, encoding: e.encoding }.presentation())
            .collect()
    })
}

fn arb_presentation() -> impl Strategy<Value = QuadraticPresentation> {
    (2usize..=4).prop_flat_map(|rank| {
        let g = 0..rank as Generator;
        prop::collection::vec((g.clone(), g.clone(), g.clone(), g), 0..5).prop_map(move |rels| {
            let pairs = rels.into_iter().filter_map(|(a, b, c, d)| RelationPair::new([a, b], [c, d]));
            QuadraticPresentation::new(Alphabet::standard(rank), pairs).unwrap()
        })
    })
}

fn arb_word(rank: usize, max: usize) -> impl Strategy<Value = Vec<Generator>> {
    prop::collection::vec(0..rank as Generator, 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engines_agree(index in 0usize..15, a in arb_word(3, 5), b in arb_word(3, 4)) {
        let p = rank3_divisibility()[index % rank3_divisibility().len()].clone();
        let fast = Monoid::divisibility(p.clone()).unwrap();
        let slow = Monoid::new(p).with_engine(Engine::Enumeration).unwrap();
        let (fa, fb) = (fast.element(&a).unwrap(), fast.element(&b).unwrap());
        let (sa, sb) = (slow.element(&a).unwrap(), slow.element(&b).unwrap());
        prop_assert_eq!(fa.word(), sa.word());
        let word = |e: Option<Element>| e.map(|e| e.word().clone());
        prop_assert_eq!(word(fast.right_lcm(&fa, &fb).unwrap()), word(slow.right_lcm(&sa, &sb).unwrap()));
        prop_assert_eq!(word(fast.residue(&fa, &fb).unwrap()), word(slow.residue(&sa, &sb).unwrap()));
        let (fg, sg) = (fast.left_gcd(&fa, &fb).unwrap(), slow.left_gcd(&sa, &sb).unwrap());
        prop_assert_eq!(fg.word(), sg.word());
        prop_assert_eq!(fast.left_divides(&fb, &fa).unwrap(), slow.left_divides(&sb, &sa).unwrap());
    }

    #[test]
    fn divisor_lattices_are_graded_and_distributive(index in 0usize..15, a in arb_word(3, 5)) {
        let p = rank3_divisibility()[index % rank3_divisibility().len()].clone();
        let m = Monoid::divisibility(p).unwrap();
        let a = m.element(&a).unwrap();
        let lattice = divisor_lattice(&m, &a).unwrap().to_finite_lattice().unwrap();
        prop_assert!(lattice.is_distributive());
        prop_assert_eq!(lattice.height(), a.len());
        let back = FiniteLattice::from_json(&lattice.export(HasseFormat::Json).unwrap()).unwrap();
        prop_assert_eq!(back.len(), lattice.len());
        for i in 0..lattice.len() {
            for j in 0..lattice.len() {
                prop_assert_eq!(back.leq(i, j), lattice.leq(i, j));
            }
        }
    }

    #[test]
    fn canonical_form_ignores_relabelling(p in arb_presentation(), seed in any::<u64>()) {
        let rank = p.rank();
        let mut perm: Vec<Generator> = (0..rank as Generator).collect();
        // Fisher-Yates driven by the seed.
        let mut s = seed;
        for i in (1..rank).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let c = canonical_form(&p);
        prop_assert_eq!(&canonical_form(&p.permuted(&perm)), &c);
        prop_assert_eq!(canonical_form(&c.presentation()), c);
    }

    #[test]
    fn classification_ignores_relabelling(p in arb_presentation()) {
        let rank = p.rank();
        let reversed: Vec<Generator> = (0..rank as Generator).rev().collect();
        let a = classify(&p, ClassBudget::default());
        let b = classify(&p.permuted(&reversed), ClassBudget::default());
        prop_assert_eq!(a.encoding, b.encoding);
        prop_assert_eq!(a.divisibility, b.divisibility);
        prop_assert_eq!(a.garside, b.garside);
        prop_assert_eq!(a.quasi_center_rank, b.quasi_center_rank);
        prop_assert_eq!(a.simple_lattice_size, b.simple_lattice_size);
    }

    #[test]
    fn text_and_json_round_trip(p in arb_presentation()) {
        prop_assert_eq!(&QuadraticPresentation::parse(&p.to_text()).unwrap(), &p);
        let json = serde_json::to_string(&p.to_json()).unwrap();
        prop_assert_eq!(&QuadraticPresentation::parse(&json).unwrap(), &p);
    }
}

#[test]
fn census_is_deterministic_across_worker_counts() {
    let one = census(3, &CensusOptions { workers: Some(1), ..CensusOptions::default() }).unwrap();
    let four = census(3, &CensusOptions { workers: Some(4), ..CensusOptions::default() }).unwrap();
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());
    assert_eq!(one.to_text(), four.to_text());
}
