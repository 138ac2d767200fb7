//! Reference instances with known answers: small lattices, a seven-firm
//! one-to-one market with ten stable matchings and its augmentation by one
//! join constraint, and a four-element antimatroid.

use std::collections::BTreeMap;

use crate::antimatroid::AntimatroidFamily;
use crate::constraints::JoinConstraint;
use crate::error::Result;
use crate::market::{ChoiceFunctionSpec, Matching, MatchingMarket, Pair};
use crate::order::{lattice_from_order, ElementSet, Lattice, Poset};
use crate::realize::{RealizedBase, Rotation, RotationPoset};

fn ids(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn set(v: &[&str]) -> ElementSet {
    v.iter().map(|s| s.to_string()).collect()
}

fn lattice(elements: &[&str], covers: &[(&str, &str)]) -> Lattice {
    let pairs: Vec<(String, String)> = covers
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let p = Poset::from_pairs(&ids(elements), &pairs).expect("fixture poset");
    lattice_from_order(&p).expect("fixture lattice")
}

/// Six-element non-distributive lattice: `a` bottom, `f` top, `b` and `c`
/// above `a`, `d` and `e` above `c`, and `f` above `b`, `d`, `e`.
pub fn six_element_lattice() -> Lattice {
    lattice(
        &["a", "b", "c", "d", "e", "f"],
        &[
            ("a", "b"),
            ("a", "c"),
            ("c", "d"),
            ("c", "e"),
            ("b", "f"),
            ("d", "f"),
            ("e", "f"),
        ],
    )
}

/// The pentagon: `bot < x < y < top` and `bot < z < top`.
pub fn pentagon() -> Lattice {
    lattice(
        &["bot", "x", "y", "z", "top"],
        &[("bot", "x"), ("x", "y"), ("y", "top"), ("bot", "z"), ("z", "top")],
    )
}

/// The diamond: three incomparable atoms between a bottom and a top.
pub fn diamond() -> Lattice {
    lattice(
        &["bot", "x", "y", "z", "top"],
        &[
            ("bot", "x"),
            ("bot", "y"),
            ("bot", "z"),
            ("x", "top"),
            ("y", "top"),
            ("z", "top"),
        ],
    )
}

/// A chain `x1 < x2 < … < xn`.
pub fn chain(n: usize) -> Lattice {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let covers: Vec<(&str, &str)> = refs.windows(2).map(|w| (w[0], w[1])).collect();
    lattice(&refs, &covers)
}

/// The lattice of subsets of `{1..n}` under inclusion; elements are named by
/// their members, e.g. `{}`, `{1}`, `{1,2}`.
pub fn boolean(n: usize) -> Lattice {
    let name = |m: usize| {
        let members: Vec<String> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", members.join(","))
    };
    let names: Vec<String> = (0..1usize << n).map(name).collect();
    let mut pairs = Vec::new();
    for a in 0..1usize << n {
        for i in 0..n {
            if a >> i & 1 == 0 {
                pairs.push((names[a].clone(), names[a | 1 << i].clone()));
            }
        }
    }
    let p = Poset::from_pairs(&names, &pairs).expect("boolean poset");
    lattice_from_order(&p).expect("boolean lattice")
}

/// Expected `x ↦ {join-irreducibles below x}` table of [`six_element_lattice`].
pub fn six_element_partial_rep() -> BTreeMap<String, ElementSet> {
    [
        ("a", set(&[])),
        ("b", set(&["b"])),
        ("c", set(&["c"])),
        ("d", set(&["c", "d"])),
        ("e", set(&["c", "e"])),
        ("f", set(&["b", "c", "d", "e"])),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Expected lower sets of the join-irreducibles of [`six_element_lattice`]
/// that survive its join constraints.
pub fn six_element_filtered() -> Vec<ElementSet> {
    vec![
        set(&[]),
        set(&["b"]),
        set(&["c"]),
        set(&["c", "d"]),
        set(&["c", "e"]),
        set(&["b", "c", "d", "e"]),
    ]
}

fn f(i: usize) -> String {
    format!("f{i}")
}

fn w(i: usize) -> String {
    format!("w{i}")
}

fn pairs(v: &[(usize, usize)]) -> std::collections::BTreeSet<Pair> {
    v.iter().map(|&(a, b)| (f(a), w(b))).collect()
}

/// Seven firms and seven workers with strict preferences over single partners.
pub fn golden_market() -> MatchingMarket {
    let firm_lists: [&[usize]; 7] = [&[5, 1], &[7, 4, 2], &[2, 3], &[6, 3, 4], &[1, 5], &[3, 6], &[4, 7]];
    let worker_lists: [&[usize]; 7] = [&[1, 5], &[2, 3], &[3, 4, 6], &[4, 2, 7], &[5, 1], &[6, 4], &[7, 2]];
    let mut m = MatchingMarket::new((1..=7).map(f).collect(), (1..=7).map(w).collect());
    for (i, list) in firm_lists.iter().enumerate() {
        let ranked: Vec<String> = list.iter().map(|&j| w(j)).collect();
        m.choice.insert(f(i + 1), ChoiceFunctionSpec::singletons(&ranked));
    }
    for (j, list) in worker_lists.iter().enumerate() {
        let ranked: Vec<String> = list.iter().map(|&i| f(i)).collect();
        m.choice.insert(w(j + 1), ChoiceFunctionSpec::singletons(&ranked));
    }
    m
}

/// The ten stable matchings of [`golden_market`]; entry `i` is the `(i+1)`-th in
/// the reference listing (entry 0 worker-optimal, entry 9 firm-optimal).
pub fn golden_stable() -> [Matching; 10] {
    let rows: [[usize; 7]; 10] = [
        [1, 2, 3, 4, 5, 6, 7],
        [5, 2, 3, 4, 1, 6, 7],
        [1, 4, 2, 3, 5, 6, 7],
        [5, 4, 2, 3, 1, 6, 7],
        [1, 4, 2, 6, 5, 3, 7],
        [1, 7, 2, 3, 5, 6, 4],
        [5, 4, 2, 6, 1, 3, 7],
        [5, 7, 2, 3, 1, 6, 4],
        [1, 7, 2, 6, 5, 3, 4],
        [5, 7, 2, 6, 1, 3, 4],
    ];
    rows.map(|r| Matching {
        pairs: r.iter().enumerate().map(|(i, &j)| (f(i + 1), w(j))).collect(),
    })
}

/// The four rotations of [`golden_market`] in reference order, named after the
/// join-irreducible of [`six_element_lattice`] each one realizes.
pub fn golden_rotations() -> [Rotation; 4] {
    let rot = |id: &str, plus: &[(usize, usize)], minus: &[(usize, usize)]| Rotation {
        id: id.to_string(),
        plus: pairs(plus),
        minus: pairs(minus),
    };
    [
        rot("c", &[(2, 4), (3, 2), (4, 3)], &[(2, 2), (3, 3), (4, 4)]),
        rot("b", &[(1, 5), (5, 1)], &[(1, 1), (5, 5)]),
        rot("d", &[(4, 6), (6, 3)], &[(4, 3), (6, 6)]),
        rot("e", &[(2, 7), (7, 4)], &[(2, 4), (7, 7)]),
    ]
}

/// [`golden_market`] as a realization of the join-irreducibles of
/// [`six_element_lattice`] (`c < d`, `c < e`, `b` isolated).
pub fn golden_base() -> Result<RealizedBase> {
    let rotations: BTreeMap<String, Rotation> = golden_rotations()
        .into_iter()
        .map(|r| (r.id.clone(), r))
        .collect();
    let poset = Poset::from_pairs(
        &ids(&["b", "c", "d", "e"]),
        &[("c".into(), "d".into()), ("c".into(), "e".into())],
    )?;
    Ok(RealizedBase {
        market: golden_market(),
        phi: ["b", "c", "d", "e"]
            .iter()
            .map(|x| (x.to_string(), x.to_string()))
            .collect(),
        rotation_poset: RotationPoset {
            poset,
            rotations,
            mu_w: golden_stable()[0].clone(),
        },
    })
}

/// "If `b` and `c` occur then `d` and `e` occur" — the constraint enforcing
/// `b ∨ c = f`.
pub fn golden_worked_constraint() -> JoinConstraint {
    JoinConstraint::conjunctive(set(&["b", "c"]), set(&["d", "e"]))
}

/// Indices (0-based into [`golden_stable`]) of the matchings satisfying
/// [`golden_worked_constraint`].
pub const GOLDEN_SURVIVORS: [usize; 7] = [0, 1, 2, 4, 5, 8, 9];

/// The seven stable matchings after augmenting [`golden_market`] with
/// [`golden_worked_constraint`], in the order of [`GOLDEN_SURVIVORS`]. Fresh agents
/// are `w0#1`, `f0#1` and copies `w3#1`, `w4#1`, `w6#1`, `w7#1`.
pub fn golden_augmented_stable() -> [Matching; 7] {
    let base = golden_stable();
    let copies = ["w3#1", "w4#1", "w6#1", "w7#1"];
    let with = |i: usize, extra: Vec<(String, String)>| {
        let mut m = base[i].clone();
        m.pairs.extend(extra);
        m
    };
    let aux = |firms: &[usize]| -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = firms.iter().map(|&i| (f(i), "w0#1".to_string())).collect();
        v.extend(copies.iter().map(|c| ("f0#1".to_string(), c.to_string())));
        v
    };
    [
        with(0, aux(&[1, 2, 3, 4, 5])),
        with(1, aux(&[2, 3, 4])),
        with(2, aux(&[1, 5])),
        with(4, aux(&[1, 5])),
        with(5, aux(&[1, 5])),
        with(8, aux(&[1, 5])),
        with(
            9,
            vec![
                ("f2".into(), "w7#1".into()),
                ("f4".into(), "w6#1".into()),
                ("f6".into(), "w3#1".into()),
                ("f7".into(), "w4#1".into()),
                ("f0#1".into(), "w0#1".into()),
            ],
        ),
    ]
}

/// Expected preference lists of the new worker copies.
pub fn golden_augmented_copy_lists() -> BTreeMap<String, Vec<String>> {
    [("w3#1", "f6"), ("w4#1", "f7"), ("w6#1", "f4"), ("w7#1", "f2")]
        .into_iter()
        .map(|(c, firm)| (c.to_string(), vec!["f0#1".to_string(), firm.to_string()]))
        .collect()
}

/// Expected auxiliary pairs of the base firms after the augmentation.
pub fn golden_augmented_aux_pairs() -> BTreeMap<String, Vec<Pair>> {
    (1..=7)
        .map(|i| {
            let v = if i <= 5 {
                vec![(w(i), "w0#1".to_string())]
            } else {
                Vec::new()
            };
            (f(i), v)
        })
        .collect()
}

/// Antimatroid on `{a, b, c, d}` with paths `{a}`, `{b}`, `{a,c}`, `{a,c,d}`.
pub fn four_element_antimatroid() -> AntimatroidFamily {
    AntimatroidFamily {
        ground: ids(&["a", "b", "c", "d"]),
        feasible: vec![
            set(&[]),
            set(&["a"]),
            set(&["b"]),
            set(&["a", "b"]),
            set(&["a", "c"]),
            set(&["a", "b", "c"]),
            set(&["a", "c", "d"]),
            set(&["a", "b", "c", "d"]),
        ],
    }
}

/// Named small graphs: `(vertices, edges)`.
pub fn graph(name: &str) -> Option<(Vec<String>, Vec<(String, String)>)> {
    let cycle = |n: usize| {
        let v: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let e = (0..n).map(|i| (v[i].clone(), v[(i + 1) % n].clone())).collect();
        (v, e)
    };
    match name {
        "K3" => Some(cycle(3)),
        "C4" => Some(cycle(4)),
        "C5" => Some(cycle(5)),
        "P3" => {
            let v = ids(&["v1", "v2", "v3"]);
            let e = vec![(v[0].clone(), v[1].clone()), (v[1].clone(), v[2].clone())];
            Some((v, e))
        }
        _ => None,
    }
}
