//! Order-theory properties checked against brute-force definitions.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use stable_lattice::constraints::{constraints_from_lattice, filter_lower_sets, JoinConstraint};
use stable_lattice::fixtures;
use stable_lattice::generate;
use stable_lattice::order::{
    canonical_partial_rep, check_order_isomorphism, check_set_embedding, find_order_isomorphism,
    hasse_dot, is_distributive, join_irreducibles, lattice_from_order, lower_sets, ElementSet,
    Lattice, Poset,
};

use common::*;

fn poset_from_bits(n: usize, bits: u64) -> Poset {
    let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut pairs = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits >> k & 1 == 1 {
                pairs.push((elements[i].clone(), elements[j].clone()));
            }
            k += 1;
        }
    }
    Poset::from_pairs(&elements, &pairs).unwrap()
}

fn leq(p: &Poset) -> impl Fn(&str, &str) -> bool + '_ {
    move |x, y| p.leq_ids(x, y).unwrap()
}

/// Least upper bound by brute force over the order relation.
fn brute_join(p: &Poset, xs: &[String]) -> Option<String> {
    let ub: Vec<&String> = p
        .elements()
        .iter()
        .filter(|u| xs.iter().all(|x| p.leq_ids(x, u).unwrap()))
        .collect();
    ub.iter()
        .find(|u| ub.iter().all(|v| p.leq_ids(u, v).unwrap()))
        .map(|u| (*u).clone())
}

fn brute_meet(p: &Poset, x: &str, y: &str) -> Option<String> {
    let lb: Vec<&String> = p
        .elements()
        .iter()
        .filter(|u| p.leq_ids(u, x).unwrap() && p.leq_ids(u, y).unwrap())
        .collect();
    lb.iter()
        .find(|u| lb.iter().all(|v| p.leq_ids(v, u).unwrap()))
        .map(|u| (*u).clone())
}

fn brute_join_irreducibles(l: &Lattice) -> BTreeSet<String> {
    let p = l.poset();
    let bottom = &p.elements()[l.bottom()];
    p.elements()
        .iter()
        .filter(|x| *x != bottom)
        .filter(|x| {
            let below: Vec<String> = p
                .elements()
                .iter()
                .filter(|y| p.leq_ids(y, x).unwrap() && y != x)
                .cloned()
                .collect();
            brute_join(p, &below).as_ref() != Some(*x)
        })
        .cloned()
        .collect()
}

fn satisfied(jc: &JoinConstraint, t: &ElementSet) -> bool {
    let alpha = jc.alpha_groups.iter().all(|g| g.iter().any(|x| t.contains(x)));
    !alpha || jc.beta_ids.is_subset(t)
}

fn random_lattice(seed: u64) -> Lattice {
    generate::random_lattice(&mut generate::rng(seed), 8, 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lower_sets_match_brute_force(n in 0usize..8, bits in any::<u64>()) {
        let p = poset_from_bits(n, bits);
        let got: BTreeSet<ElementSet> = lower_sets(&p, 63).unwrap().into_iter().collect();
        prop_assert_eq!(got, brute_lower_sets(p.elements(), leq(&p)));
    }

    #[test]
    fn covers_are_gapless_strict_pairs(n in 1usize..8, bits in any::<u64>()) {
        let p = poset_from_bits(n, bits);
        let covers: BTreeSet<(String, String)> = p.cover_ids().into_iter().collect();
        for x in p.elements() {
            for y in p.elements() {
                let strict = x != y && p.leq_ids(x, y).unwrap();
                let gap = p.elements().iter().any(|z| {
                    z != x && z != y && p.leq_ids(x, z).unwrap() && p.leq_ids(z, y).unwrap()
                });
                prop_assert_eq!(covers.contains(&(x.clone(), y.clone())), strict && !gap);
            }
        }
        let dot = hasse_dot(&p, "p");
        prop_assert_eq!(dot.matches("->").count(), covers.len());
    }

    #[test]
    fn lattice_tables_match_brute_force(seed in any::<u64>()) {
        let l = random_lattice(seed);
        let p = l.poset();
        for x in p.elements() {
            for y in p.elements() {
                prop_assert_eq!(Some(l.join_ids(x, y).unwrap()), brute_join(p, &[x.clone(), y.clone()]));
                prop_assert_eq!(Some(l.meet_ids(x, y).unwrap()), brute_meet(p, x, y));
            }
        }
    }

    #[test]
    fn join_irreducibles_match_definition(seed in any::<u64>()) {
        let l = random_lattice(seed);
        let (ji, _) = join_irreducibles(&l).unwrap();
        prop_assert_eq!(ji.into_iter().collect::<BTreeSet<_>>(), brute_join_irreducibles(&l));
    }

    #[test]
    fn partial_representation_is_an_embedding(seed in any::<u64>()) {
        let l = random_lattice(seed);
        let rep = canonical_partial_rep(&l).unwrap();
        let (ji, _) = join_irreducibles(&l).unwrap();
        prop_assert!(check_set_embedding(&rep, l.poset()).is_ok());
        prop_assert!(rep[&l.elements()[l.bottom()]].is_empty());
        prop_assert_eq!(&rep[&l.elements()[l.top()]], &ji.iter().cloned().collect::<ElementSet>());
        // Every element is the join of the irreducibles below it.
        for (x, r) in &rep {
            let members: Vec<String> = r.iter().cloned().collect();
            let join = if members.is_empty() { l.elements()[l.bottom()].clone() } else { brute_join(l.poset(), &members).unwrap() };
            prop_assert_eq!(&join, x);
        }
    }

    #[test]
    fn lattice_constraints_cut_exactly_the_image(seed in any::<u64>()) {
        let l = random_lattice(seed);
        let (_, jp) = join_irreducibles(&l).unwrap();
        let d = lower_sets(&jp, 63).unwrap();
        let omega = constraints_from_lattice(&l).unwrap();
        let kept: BTreeSet<ElementSet> = filter_lower_sets(&d, &omega).into_iter().collect();
        let brute: BTreeSet<ElementSet> = d.iter().filter(|t| omega.iter().all(|c| satisfied(c, t))).cloned().collect();
        prop_assert_eq!(&kept, &brute);
        let image: BTreeSet<ElementSet> = canonical_partial_rep(&l).unwrap().into_values().collect();
        prop_assert_eq!(kept, image);
    }

    #[test]
    fn distributive_iff_birkhoff_count(seed in any::<u64>()) {
        let l = random_lattice(seed);
        let (_, jp) = join_irreducibles(&l).unwrap();
        let birkhoff = lower_sets(&jp, 63).unwrap().len() == l.len();
        prop_assert_eq!(is_distributive(&l).is_ok(), birkhoff);
    }

    #[test]
    fn isomorphism_search_matches_brute_force(n in 1usize..6, a in any::<u64>(), b in any::<u64>()) {
        let p = poset_from_bits(n, a);
        let q = poset_from_bits(n, b);
        let found = find_order_isomorphism(&p, &q);
        let brute = brute_isomorphic(p.elements(), q.elements(), |x, y| p.leq_ids(x, y).unwrap(), |x, y| q.leq_ids(x, y).unwrap());
        prop_assert_eq!(found.is_some(), brute);
        if let Some(map) = found {
            prop_assert!(check_order_isomorphism(&map, &p, &q).is_ok());
        }
    }
}

#[test]
fn small_lattices_are_pairwise_non_isomorphic() {
    for n in 1..=6 {
        let ls = generate::all_lattices(n);
        for (i, a) in ls.iter().enumerate() {
            for b in &ls[i + 1..] {
                assert!(find_order_isomorphism(a.poset(), b.poset()).is_none());
            }
        }
    }
}

#[test]
fn named_lattices_distributivity() {
    assert!(is_distributive(&fixtures::boolean(3)).is_ok());
    assert!(is_distributive(&fixtures::chain(4)).is_ok());
    assert!(is_distributive(&fixtures::pentagon()).is_err());
    assert!(is_distributive(&fixtures::diamond()).is_err());
    assert!(is_distributive(&fixtures::six_element_lattice()).is_err());
}

#[test]
fn non_lattice_is_rejected() {
    // Two incomparable maximal elements have no join.
    let p = Poset::from_pairs(&ids(&["0", "a", "b"]), &[("0".into(), "a".into()), ("0".into(), "b".into())]).unwrap();
    assert!(lattice_from_order(&p).is_err());
}

#[test]
fn cyclic_relation_is_rejected() {
    let r = Poset::from_pairs(&ids(&["a", "b"]), &[("a".into(), "b".into()), ("b".into(), "a".into())]);
    assert!(r.is_err());
}
