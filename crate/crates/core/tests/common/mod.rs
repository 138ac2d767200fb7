//! Brute-force oracles shared by the integration tests. They use only the
//! data types and `ChoiceFunctionSpec::choose`, never the library's own
//! stability, enumeration or order code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use stable_lattice::market::{Matching, MatchingMarket, Pair};
use stable_lattice::order::ElementSet;

pub fn set(v: &[&str]) -> ElementSet {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn ids(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn choose(m: &MatchingMarket, agent: &str, t: &BTreeSet<String>) -> BTreeSet<String> {
    match m.choice.get(agent) {
        Some(spec) => spec.choose(t),
        None => BTreeSet::new(),
    }
}

fn partners(mu: &Matching, agent: &str, firm: bool) -> BTreeSet<String> {
    mu.pairs
        .iter()
        .filter(|(f, w)| if firm { f == agent } else { w == agent })
        .map(|(f, w)| if firm { w.clone() } else { f.clone() })
        .collect()
}

/// Individual rationality plus absence of blocking pairs, from the definitions.
pub fn is_stable(m: &MatchingMarket, mu: &Matching) -> bool {
    for f in &m.firms {
        let p = partners(mu, f, true);
        if choose(m, f, &p) != p {
            return false;
        }
    }
    for w in &m.workers {
        let p = partners(mu, w, false);
        if choose(m, w, &p) != p {
            return false;
        }
    }
    for f in &m.firms {
        let pf = partners(mu, f, true);
        for w in &m.workers {
            if pf.contains(w) {
                continue;
            }
            let mut tf = pf.clone();
            tf.insert(w.clone());
            if !choose(m, f, &tf).contains(w) {
                continue;
            }
            let mut tw = partners(mu, w, false);
            tw.insert(f.clone());
            if choose(m, w, &tw).contains(f) {
                return false;
            }
        }
    }
    true
}

/// Pairs that can occur in an individually rational matching of a market with
/// substitutable choice functions: each side accepts the other alone.
pub fn candidate_pairs(m: &MatchingMarket) -> Vec<Pair> {
    let mut out = Vec::new();
    for f in &m.firms {
        for w in &m.workers {
            let sw = BTreeSet::from([w.clone()]);
            let sf = BTreeSet::from([f.clone()]);
            if choose(m, f, &sw).contains(w) && choose(m, w, &sf).contains(f) {
                out.push((f.clone(), w.clone()));
            }
        }
    }
    out
}

/// Every stable matching, by checking every subset of the candidate pairs.
pub fn brute_force_stable(m: &MatchingMarket, max_pairs: usize) -> Option<Vec<Matching>> {
    let pairs = candidate_pairs(m);
    if pairs.len() > max_pairs {
        return None;
    }
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mu = Matching {
            pairs: (0..pairs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pairs[i].clone())
                .collect(),
        };
        if is_stable(m, &mu) {
            out.push(mu);
        }
    }
    out.sort();
    Some(out)
}

/// `mu ≤ nu` in the firms' order: every firm picks its `nu` set from the union.
pub fn firms_weakly_prefer(m: &MatchingMarket, nu: &Matching, mu: &Matching) -> bool {
    m.firms.iter().all(|f| {
        let a = partners(mu, f, true);
        let b = partners(nu, f, true);
        let u: BTreeSet<String> = a.union(&b).cloned().collect();
        choose(m, f, &u) == b
    })
}

/// The same comparison from the workers' side: every worker picks its `mu` set.
pub fn workers_weakly_prefer(m: &MatchingMarket, mu: &Matching, nu: &Matching) -> bool {
    m.workers.iter().all(|w| {
        let a = partners(mu, w, false);
        let b = partners(nu, w, false);
        let u: BTreeSet<String> = a.union(&b).cloned().collect();
        choose(m, w, &u) == a
    })
}

/// All subsets of `ground` (as sorted sets).
pub fn all_subsets(ground: &[String]) -> Vec<ElementSet> {
    (0u64..1 << ground.len())
        .map(|m| {
            (0..ground.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| ground[i].clone())
                .collect()
        })
        .collect()
}

/// Lower sets of the order `leq` on `elements`, by brute force.
pub fn brute_lower_sets(elements: &[String], leq: impl Fn(&str, &str) -> bool) -> BTreeSet<ElementSet> {
    all_subsets(elements)
        .into_iter()
        .filter(|s| {
            s.iter()
                .all(|x| elements.iter().all(|y| !leq(y, x) || s.contains(y)))
        })
        .collect()
}

/// Is there a bijection `a → b` preserving and reflecting the given orders?
pub fn brute_isomorphic<A: Clone, B: Clone>(
    a: &[A],
    b: &[B],
    leq_a: impl Fn(&A, &A) -> bool,
    leq_b: impl Fn(&B, &B) -> bool,
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok = (0..n).all(|i| (0..n).all(|j| leq_a(&a[i], &a[j]) == leq_b(&b[perm[i]], &b[perm[j]])));
        if ok {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Maximum independent set size by brute force.
pub fn independence_number(vertices: &[String], edges: &[(String, String)]) -> i64 {
    all_subsets(vertices)
        .into_iter()
        .filter(|s| edges.iter().all(|(a, b)| !(s.contains(a) && s.contains(b))))
        .map(|s| s.len() as i64)
        .max()
        .unwrap_or(0)
}

/// Antimatroid check from the axioms, over explicit sets.
pub fn is_antimatroid(ground: &[String], feasible: &[ElementSet]) -> bool {
    let fam: BTreeSet<&ElementSet> = feasible.iter().collect();
    let full: ElementSet = ground.iter().cloned().collect();
    if !fam.contains(&full) || !fam.contains(&ElementSet::new()) {
        return false;
    }
    for a in &fam {
        for b in &fam {
            let u: ElementSet = a.union(b).cloned().collect();
            if !fam.contains(&u) {
                return false;
            }
        }
        if !a.is_empty()
            && !a.iter().any(|x| {
                let mut s = (*a).clone();
                s.remove(x);
                fam.contains(&s)
            })
        {
            return false;
        }
    }
    true
}

/// Elements whose removal keeps a feasible set feasible.
pub fn brute_endpoints(feasible: &[ElementSet], s: &ElementSet) -> ElementSet {
    s.iter()
        .filter(|x| {
            let mut t = s.clone();
            t.remove(*x);
            feasible.contains(&t)
        })
        .cloned()
        .collect()
}

/// Map from each lattice element to the matching it should be sent to, as
/// strings, for comparisons in assertions.
pub fn pairs_of(mu: &Matching) -> Vec<(String, String)> {
    mu.pairs.iter().cloned().collect()
}

pub fn count_by<K: Ord, T>(items: &[T], key: impl Fn(&T) -> K) -> BTreeMap<K, usize> {
    let mut out = BTreeMap::new();
    for t in items {
        *out.entry(key(t)).or_insert(0) += 1;
    }
    out
}
