//! Seeded random instances and exhaustive small-lattice enumeration, used by
//! the test suites and the `selftest` command.
//!
//! Generators are fixture sources, not uniform samplers.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antimatroid::AntimatroidFamily;
use crate::order::{lattice_from_order, set_cmp, validate_poset, ElementSet, Lattice};

/// The deterministic generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lattice ids `x0, x1, …`, zero-padded to a common width.
fn element_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("x{i:0width$}")).collect()
}

/// The lattice of a family of sets ordered by containment.
fn containment_lattice(sets: &[u32]) -> Lattice {
    let ids = element_ids(sets.len());
    let rel: Vec<Vec<bool>> = sets
        .iter()
        .map(|&a| sets.iter().map(|&b| a & !b == 0).collect())
        .collect();
    let p = validate_poset(&ids, &rel).expect("containment is a partial order");
    lattice_from_order(&p).expect("intersection-closed family with a top is a lattice")
}

/// A random lattice with at most `max_elements` elements.
///
/// Draws a few random subsets of a `bits`-element set, closes them under
/// intersection and adds the full set; every finite lattice arises this way.
/// Draws that overshoot `max_elements` are retried.
pub fn random_lattice(rng: &mut impl Rng, max_elements: usize, bits: u32) -> Lattice {
    assert!(max_elements >= 1 && (1..=16).contains(&bits));
    let full = (1u32 << bits) - 1;
    loop {
        let draws = rng.gen_range(1..=max_elements);
        let mut family: BTreeSet<u32> = BTreeSet::from([full]);
        for _ in 0..draws {
            family.insert(rng.gen_range(0..=full));
        }
        loop {
            let current: Vec<u32> = family.iter().copied().collect();
            let before = family.len();
            for &a in &current {
                for &b in &current {
                    family.insert(a & b);
                }
            }
            if family.len() == before || family.len() > max_elements {
                break;
            }
        }
        if family.len() <= max_elements {
            let mut sets: Vec<u32> = family.into_iter().collect();
            sets.sort_by_key(|s| (s.count_ones(), *s));
            return containment_lattice(&sets);
        }
    }
}

/// Canonical form of an order relation on `n` elements (bottom first, top
/// last): the lexicographically least relation matrix over permutations of
/// the middle elements.
fn canonical_form(rel: &[Vec<bool>]) -> Vec<bool> {
    let n = rel.len();
    let middle: Vec<usize> = (1..n.saturating_sub(1)).collect();
    let mut best: Option<Vec<bool>> = None;
    for_each_permutation(&middle, &mut |perm| {
        let mut order = vec![0];
        order.extend_from_slice(perm);
        if n > 1 {
            order.push(n - 1);
        }
        let flat: Vec<bool> = order
            .iter()
            .flat_map(|&i| order.iter().map(move |&j| rel[i][j]))
            .collect();
        if best.as_ref().is_none_or(|b| flat < *b) {
            best = Some(flat);
        }
    });
    best.unwrap_or_default()
}

fn for_each_permutation(items: &[usize], f: &mut impl FnMut(&[usize])) {
    fn go(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            go(v, k + 1, f);
            v.swap(k, i);
        }
    }
    go(&mut items.to_vec(), 0, f);
}

/// All lattices with exactly `n` elements, one per isomorphism class.
///
/// Every order on the `n − 2` middle elements is tried with a bottom and a top
/// added; the results are filtered to lattices and deduplicated by canonical
/// form.
pub fn all_lattices(n: usize) -> Vec<Lattice> {
    assert!((1..=7).contains(&n), "exhaustive generation is for tiny sizes");
    let ids = element_ids(n);
    if n == 1 {
        let p = validate_poset(&ids, &[vec![true]]).expect("singleton");
        return vec![lattice_from_order(&p).expect("singleton lattice")];
    }
    let m = n - 2;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let choices = 3usize.pow(pairs.len() as u32);
    for code in 0..choices {
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            rel[i][i] = true;
            rel[0][i] = true;
            rel[i][n - 1] = true;
        }
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => rel[i + 1][j + 1] = true,
                2 => rel[j + 1][i + 1] = true,
                _ => {}
            }
            c /= 3;
        }
        let Ok(p) = validate_poset(&ids, &rel) else {
            continue;
        };
        let Ok(l) = lattice_from_order(&p) else {
            continue;
        };
        if seen.insert(canonical_form(&rel)) {
            out.push(l);
        }
    }
    out
}

/// A random antimatroid on ground `g1, g2, …` (`n` elements).
///
/// The feasible family is the union closure of the prefixes of a few random
/// repetition-free words, one of which covers the whole ground set. Prefixes
/// are accessible and unions of accessible sets stay accessible, so the
/// result always satisfies the axioms.
pub fn random_antimatroid(rng: &mut impl Rng, n: usize) -> AntimatroidFamily {
    assert!(n <= 16);
    let ground: Vec<String> = (1..=n).map(|i| format!("g{i}")).collect();
    let mut family: BTreeSet<u32> = BTreeSet::from([0]);
    let words = rng.gen_range(1..=3);
    for w in 0..words {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let len = if w == 0 { n } else { rng.gen_range(0..=n) };
        let mut prefix = 0u32;
        for &x in &perm[..len] {
            prefix |= 1 << x;
            family.insert(prefix);
        }
    }
    loop {
        let current: Vec<u32> = family.iter().copied().collect();
        let before = family.len();
        for &a in &current {
            for &b in &current {
                family.insert(a | b);
            }
        }
        if family.len() == before {
            break;
        }
    }
    let mut feasible: Vec<ElementSet> = family
        .into_iter()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| ground[i].clone()).collect())
        .collect();
    feasible.sort_by(set_cmp);
    AntimatroidFamily { ground, feasible }
}

/// A random simple graph on vertices `v1, …, vn`, each edge present with
/// probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> (Vec<String>, Vec<(String, String)>) {
    let vertices: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
    }
    (vertices, edges)
}
