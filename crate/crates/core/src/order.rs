//! Finite posets and lattices.
//!
//! Elements are opaque string ids. Every constructor re-sorts elements
//! lexicographically so that indices, iteration order and serialized output
//! are canonical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{Error, Result};

/// A set of element ids.
pub type ElementSet = BTreeSet<String>;

/// Default bound on the number of poset elements for [`lower_sets`].
pub const DEFAULT_ELEMENT_BOUND: usize = 20;

/// Canonical order on sets: by size, then lexicographically on sorted members.
pub fn set_cmp<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

/// A finite partially ordered set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<Vec<bool>>,
}

/// Validates a relation matrix over `elements` (where `leq[i][j]` means
/// `elements[i] <= elements[j]`) and returns the poset it defines.
pub fn validate_poset(elements: &[String], leq: &[Vec<bool>]) -> Result<Poset> {
    let n = elements.len();
    if leq.len() != n || leq.iter().any(|row| row.len() != n) {
        return Err(Error::Schema(format!(
            "relation matrix must be {n}x{n} to match the element list"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
    for w in order.windows(2) {
        if elements[w[0]] == elements[w[1]] {
            return Err(Error::DuplicateId(elements[w[0]].clone()));
        }
    }
    let sorted: Vec<String> = order.iter().map(|&i| elements[i].clone()).collect();
    let rel: Vec<Vec<bool>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| leq[i][j]).collect())
        .collect();

    for i in 0..n {
        if !rel[i][i] {
            return Err(Error::NotReflexive { x: sorted[i].clone() });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rel[i][j] && rel[j][i] {
                return Err(Error::NotAntisymmetric {
                    x: sorted[i].clone(),
                    y: sorted[j].clone(),
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !rel[i][j] {
                continue;
            }
            for k in 0..n {
                if rel[j][k] && !rel[i][k] {
                    return Err(Error::NotTransitive {
                        x: sorted[i].clone(),
                        y: sorted[j].clone(),
                        z: sorted[k].clone(),
                    });
                }
            }
        }
    }
    Ok(Poset::from_sorted(sorted, rel))
}

impl Poset {
    fn from_sorted(elements: Vec<String>, leq: Vec<Vec<bool>>) -> Poset {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Poset {
            elements,
            index,
            leq,
        }
    }

    /// The trivial (antichain) order on `elements`.
    pub fn trivial(elements: &[String]) -> Result<Poset> {
        Poset::from_pairs(elements, &[])
    }

    /// Builds a poset from generating pairs `(x, y)` meaning `x <= y`.
    /// Reflexive and transitive closure are added; antisymmetry is validated.
    pub fn from_pairs(elements: &[String], pairs: &[(String, String)]) -> Result<Poset> {
        let n = elements.len();
        let pos: HashMap<&str, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i))
            .collect();
        if pos.len() != n {
            let mut seen = BTreeSet::new();
            for e in elements {
                if !seen.insert(e) {
                    return Err(Error::DuplicateId(e.clone()));
                }
            }
        }
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for (x, y) in pairs {
            let lookup = |id: &String| {
                pos.get(id.as_str()).copied().ok_or_else(|| Error::UnknownId {
                    id: id.clone(),
                    context: "order pair".into(),
                })
            };
            let (i, j) = (lookup(x)?, lookup(y)?);
            rel[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        validate_poset(elements, &rel)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Element ids in canonical (lexicographic) order.
    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn id(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownId {
            id: id.to_string(),
            context: "poset element".into(),
        })
    }

    /// `i <= j` by index.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// `i < j` by index.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// `x <= y` by id.
    pub fn leq_ids(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.leq(self.require(x)?, self.require(y)?))
    }

    /// Covering pairs `(lower, upper)` by index, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) && !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Covering pairs `(lower, upper)` by id.
    pub fn cover_ids(&self) -> Vec<(String, String)> {
        self.covers()
            .into_iter()
            .map(|(i, j)| (self.elements[i].clone(), self.elements[j].clone()))
            .collect()
    }

    /// All strict relations `(x, y)` with `x < y`, by id.
    pub fn strict_pairs(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) {
                    out.push((self.elements[i].clone(), self.elements[j].clone()));
                }
            }
        }
        out
    }

    /// The order restricted to `subset`.
    pub fn induced(&self, subset: &[String]) -> Result<Poset> {
        let idx: Vec<usize> = subset
            .iter()
            .map(|s| self.require(s))
            .collect::<Result<_>>()?;
        let rel: Vec<Vec<bool>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.leq(i, j)).collect())
            .collect();
        validate_poset(subset, &rel)
    }

    /// Elements of `s` not strictly below another element of `s`.
    pub fn maximal_elements(&self, s: &ElementSet) -> Result<ElementSet> {
        let idx: Vec<usize> = s.iter().map(|x| self.require(x)).collect::<Result<_>>()?;
        Ok(idx
            .iter()
            .filter(|&&i| !idx.iter().any(|&j| self.lt(i, j)))
            .map(|&i| self.elements[i].clone())
            .collect())
    }

    /// Returns a witness `(present, missing)` if `s` is not downward closed.
    pub fn lower_closure_violation(&self, s: &ElementSet) -> Result<Option<(String, String)>> {
        for x in s {
            let i = self.require(x)?;
            for j in 0..self.len() {
                if self.lt(j, i) && !s.contains(&self.elements[j]) {
                    return Ok(Some((x.clone(), self.elements[j].clone())));
                }
            }
        }
        Ok(None)
    }

    /// The principal down-set of `x`, including `x`.
    pub fn down_set(&self, x: &str) -> Result<ElementSet> {
        let i = self.require(x)?;
        Ok((0..self.len())
            .filter(|&j| self.leq(j, i))
            .map(|j| self.elements[j].clone())
            .collect())
    }

    /// Indices in a linear extension (smaller elements first, ties by id).
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        let below = |i: usize| (0..self.len()).filter(|&j| self.lt(j, i)).count();
        order.sort_by_key(|&i| (below(i), i));
        order
    }
}

/// A finite lattice with precomputed join and meet tables (by index into the
/// poset's canonical element order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    poset: Poset,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
    top: usize,
    bottom: usize,
}

fn unique_extreme(p: &Poset, candidates: &[usize], least: bool) -> Option<usize> {
    candidates.iter().copied().find(|&c| {
        candidates
            .iter()
            .all(|&o| if least { p.leq(c, o) } else { p.leq(o, c) })
    })
}

/// Computes join and meet tables of `p`, failing if some pair lacks a least
/// upper bound or greatest lower bound.
pub fn lattice_from_order(p: &Poset) -> Result<Lattice> {
    let n = p.len();
    if n == 0 {
        return Err(Error::Schema("a lattice needs at least one element".into()));
    }
    let mut join = vec![vec![0; n]; n];
    let mut meet = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let ub: Vec<usize> = (0..n).filter(|&k| p.leq(i, k) && p.leq(j, k)).collect();
            let lb: Vec<usize> = (0..n).filter(|&k| p.leq(k, i) && p.leq(k, j)).collect();
            let jn = unique_extreme(p, &ub, true).ok_or_else(|| Error::NotALattice {
                x: p.id(i).to_string(),
                y: p.id(j).to_string(),
                bound: "least upper bound",
                candidates: ub
                    .iter()
                    .filter(|&&u| !ub.iter().any(|&v| p.lt(v, u)))
                    .map(|&u| p.id(u).to_string())
                    .collect(),
            })?;
            let mt = unique_extreme(p, &lb, false).ok_or_else(|| Error::NotALattice {
                x: p.id(i).to_string(),
                y: p.id(j).to_string(),
                bound: "greatest lower bound",
                candidates: lb
                    .iter()
                    .filter(|&&u| !lb.iter().any(|&v| p.lt(u, v)))
                    .map(|&u| p.id(u).to_string())
                    .collect(),
            })?;
            join[i][j] = jn;
            join[j][i] = jn;
            meet[i][j] = mt;
            meet[j][i] = mt;
        }
    }
    let top = (0..n).find(|&t| (0..n).all(|k| p.leq(k, t))).ok_or_else(|| {
        Error::TableMismatch("no top element".into())
    })?;
    let bottom = (0..n).find(|&b| (0..n).all(|k| p.leq(b, k))).ok_or_else(|| {
        Error::TableMismatch("no bottom element".into())
    })?;
    Ok(Lattice {
        poset: p.clone(),
        join,
        meet,
        top,
        bottom,
    })
}

/// Builds a lattice from join and meet tables given by id, where
/// `join[i][j]` is the join of `elements[i]` and `elements[j]`.
/// The order is derived from the join table and cross-checked against both tables.
pub fn lattice_from_tables(
    elements: &[String],
    join: &[Vec<String>],
    meet: &[Vec<String>],
) -> Result<Lattice> {
    let n = elements.len();
    let shape_ok = |t: &[Vec<String>]| t.len() == n && t.iter().all(|r| r.len() == n);
    if !shape_ok(join) || !shape_ok(meet) {
        return Err(Error::Schema(format!(
            "join and meet tables must be {n}x{n}"
        )));
    }
    let known: BTreeSet<&String> = elements.iter().collect();
    for id in join.iter().chain(meet.iter()).flatten() {
        if !known.contains(id) {
            return Err(Error::UnknownId {
                id: id.clone(),
                context: "join/meet table".into(),
            });
        }
    }
    let rel: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| join[i][j] == elements[j]).collect())
        .collect();
    let lattice = lattice_from_order(&validate_poset(elements, &rel)?)?;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (&elements[i], &elements[j]);
            if lattice.join_ids(x, y)? != join[i][j] {
                return Err(Error::TableMismatch(format!(
                    "join of `{x}` and `{y}` is `{}` but the table says `{}`",
                    lattice.join_ids(x, y)?,
                    join[i][j]
                )));
            }
            if lattice.meet_ids(x, y)? != meet[i][j] {
                return Err(Error::TableMismatch(format!(
                    "meet of `{x}` and `{y}` is `{}` but the table says `{}`",
                    lattice.meet_ids(x, y)?,
                    meet[i][j]
                )));
            }
        }
    }
    Ok(lattice)
}

impl Lattice {
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        self.poset.elements()
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn join_ids(&self, x: &str, y: &str) -> Result<String> {
        let (i, j) = (self.poset.require(x)?, self.poset.require(y)?);
        Ok(self.poset.id(self.join(i, j)).to_string())
    }

    pub fn meet_ids(&self, x: &str, y: &str) -> Result<String> {
        let (i, j) = (self.poset.require(x)?, self.poset.require(y)?);
        Ok(self.poset.id(self.meet(i, j)).to_string())
    }

    /// Join of a set of elements; the join of the empty set is the bottom.
    pub fn join_all<'a>(&self, ids: impl IntoIterator<Item = &'a String>) -> Result<String> {
        let mut acc = self.bottom;
        for id in ids {
            acc = self.join(acc, self.poset.require(id)?);
        }
        Ok(self.poset.id(acc).to_string())
    }

    /// The join table by id, rows and columns in canonical element order.
    pub fn join_table(&self) -> Vec<Vec<String>> {
        self.table(&self.join)
    }

    /// The meet table by id, rows and columns in canonical element order.
    pub fn meet_table(&self) -> Vec<Vec<String>> {
        self.table(&self.meet)
    }

    fn table(&self, t: &[Vec<usize>]) -> Vec<Vec<String>> {
        t.iter()
            .map(|row| row.iter().map(|&k| self.poset.id(k).to_string()).collect())
            .collect()
    }
}

/// Join-irreducible elements (exactly one lower cover) and the order induced on them.
pub fn join_irreducibles(l: &Lattice) -> Result<(Vec<String>, Poset)> {
    let p = l.poset();
    let mut lower_covers = vec![0usize; p.len()];
    for (_, upper) in p.covers() {
        lower_covers[upper] += 1;
    }
    let ids: Vec<String> = (0..p.len())
        .filter(|&i| lower_covers[i] == 1)
        .map(|i| p.id(i).to_string())
        .collect();
    let induced = p.induced(&ids)?;
    Ok((ids, induced))
}

/// All downward-closed subsets of `p`, in canonical set order.
pub fn lower_sets(p: &Poset, bound: usize) -> Result<Vec<ElementSet>> {
    let n = p.len();
    if n > bound || n > 63 {
        return Err(Error::EnumerationBoundExceeded {
            size: n,
            bound: bound.min(63),
        });
    }
    let order = p.linear_extension();
    let below: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| p.lt(j, i))
                .fold(0u64, |m, j| m | (1 << j))
        })
        .collect();
    let mut masks = Vec::new();
    fn rec(pos: usize, cur: u64, order: &[usize], below: &[u64], out: &mut Vec<u64>) {
        if pos == order.len() {
            out.push(cur);
            return;
        }
        let i = order[pos];
        rec(pos + 1, cur, order, below, out);
        if below[i] & !cur == 0 {
            rec(pos + 1, cur | (1 << i), order, below, out);
        }
    }
    rec(0, 0, &order, &below, &mut masks);
    let mut sets: Vec<ElementSet> = masks
        .into_iter()
        .map(|m| {
            (0..n)
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| p.id(i).to_string())
                .collect()
        })
        .collect();
    sets.sort_by(set_cmp);
    Ok(sets)
}

/// The table `x -> {x' in X_j : x' <= x}` mapping each lattice element to a
/// lower set of its join-irreducibles.
pub fn canonical_partial_rep(l: &Lattice) -> Result<BTreeMap<String, ElementSet>> {
    let (ji, _) = join_irreducibles(l)?;
    let p = l.poset();
    let mut out = BTreeMap::new();
    for x in p.elements() {
        let rep: ElementSet = ji
            .iter()
            .filter(|j| p.leq_ids(j, x).unwrap_or(false))
            .cloned()
            .collect();
        out.insert(x.clone(), rep);
    }
    Ok(out)
}

/// Why a map fails to be an order-embedding or order-isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderViolation {
    #[error("no image given for `{x}`")]
    MissingImage { x: String },
    #[error("image `{target}` of `{x}` is not a target element")]
    UnknownTarget { x: String, target: String },
    #[error("order not preserved for (`{x}`, `{y}`): source <= is {src_leq}, image <= is {dst_leq}")]
    Order {
        x: String,
        y: String,
        src_leq: bool,
        dst_leq: bool,
    },
    #[error("target `{missing}` is not in the image")]
    NotSurjective { missing: String },
}

fn check_embedding_by<T>(
    src: &Poset,
    map: &BTreeMap<String, T>,
    image_leq: impl Fn(&T, &T) -> bool,
) -> std::result::Result<(), OrderViolation> {
    let mut imgs = Vec::with_capacity(src.len());
    for x in src.elements() {
        match map.get(x) {
            Some(t) => imgs.push(t),
            None => return Err(OrderViolation::MissingImage { x: x.clone() }),
        }
    }
    for i in 0..src.len() {
        for j in 0..src.len() {
            let s = src.leq(i, j);
            let d = image_leq(imgs[i], imgs[j]);
            if s != d {
                return Err(OrderViolation::Order {
                    x: src.id(i).to_string(),
                    y: src.id(j).to_string(),
                    src_leq: s,
                    dst_leq: d,
                });
            }
        }
    }
    Ok(())
}

/// Checks `x <= y  <=>  f(x) <= f(y)` for all pairs of `src`.
pub fn check_order_embedding(
    map: &BTreeMap<String, String>,
    src: &Poset,
    dst: &Poset,
) -> std::result::Result<(), OrderViolation> {
    for x in src.elements() {
        if let Some(t) = map.get(x) {
            if !dst.contains(t) {
                return Err(OrderViolation::UnknownTarget {
                    x: x.clone(),
                    target: t.clone(),
                });
            }
        }
    }
    check_embedding_by(src, map, |a, b| dst.leq_ids(a, b).unwrap_or(false))
}

/// Order-embedding plus surjectivity onto the elements of `dst`.
pub fn check_order_isomorphism(
    map: &BTreeMap<String, String>,
    src: &Poset,
    dst: &Poset,
) -> std::result::Result<(), OrderViolation> {
    check_order_embedding(map, src, dst)?;
    let image: BTreeSet<&String> = src.elements().iter().filter_map(|x| map.get(x)).collect();
    match dst.elements().iter().find(|t| !image.contains(t)) {
        Some(t) => Err(OrderViolation::NotSurjective { missing: t.clone() }),
        None => Ok(()),
    }
}

/// Checks that `map` is an order-embedding into sets ordered by containment
/// (`x <= y  <=>  f(x) ⊆ f(y)`).
pub fn check_set_embedding(
    map: &BTreeMap<String, ElementSet>,
    src: &Poset,
) -> std::result::Result<(), OrderViolation> {
    check_embedding_by(src, map, |a, b| a.is_subset(b))
}

/// Containment embedding whose image is exactly `family`.
pub fn check_set_isomorphism(
    map: &BTreeMap<String, ElementSet>,
    src: &Poset,
    family: &[ElementSet],
) -> std::result::Result<(), OrderViolation> {
    check_set_embedding(map, src)?;
    let image: BTreeSet<&ElementSet> = map.values().collect();
    if let Some(x) = src
        .elements()
        .iter()
        .find(|x| !family.contains(&map[x.as_str()]))
    {
        return Err(OrderViolation::UnknownTarget {
            x: x.clone(),
            target: format!("{:?}", map[x.as_str()]),
        });
    }
    match family.iter().find(|t| !image.contains(t)) {
        Some(t) => Err(OrderViolation::NotSurjective {
            missing: format!("{t:?}"),
        }),
        None => Ok(()),
    }
}

/// Checks `a ∨ (b ∧ c) = (a ∨ b) ∧ (a ∨ c)` for every triple; returns a
/// failing triple otherwise.
pub fn is_distributive(l: &Lattice) -> std::result::Result<(), (String, String, String)> {
    let n = l.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = l.join(a, l.meet(b, c));
                let rhs = l.meet(l.join(a, b), l.join(a, c));
                if lhs != rhs {
                    let id = |k: usize| l.poset().id(k).to_string();
                    return Err((id(a), id(b), id(c)));
                }
            }
        }
    }
    Ok(())
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering of the Hasse diagram: cover edges only, drawn bottom-up.
pub fn hasse_dot(p: &Poset, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", dot_quote(name));
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=box];");
    for e in p.elements() {
        let _ = writeln!(out, "  {};", dot_quote(e));
    }
    for (lo, hi) in p.cover_ids() {
        let _ = writeln!(out, "  {} -> {};", dot_quote(&lo), dot_quote(&hi));
    }
    out.push_str("}\n");
    out
}

/// Searches for an order-isomorphism from `src` onto `dst` by backtracking,
/// assigning elements in a linear extension of `src` and pruning by the
/// sizes of down- and up-sets. Returns `None` when none exists.
pub fn find_order_isomorphism(src: &Poset, dst: &Poset) -> Option<BTreeMap<String, String>> {
    let n = src.len();
    if n != dst.len() {
        return None;
    }
    let profile = |p: &Poset, i: usize| {
        let below = (0..n).filter(|&j| p.leq(j, i)).count();
        let above = (0..n).filter(|&j| p.leq(i, j)).count();
        (below, above)
    };
    let sp: Vec<_> = (0..n).map(|i| profile(src, i)).collect();
    let dp: Vec<_> = (0..n).map(|i| profile(dst, i)).collect();
    let order = src.linear_extension();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        k: usize,
        order: &[usize],
        src: &Poset,
        dst: &Poset,
        sp: &[(usize, usize)],
        dp: &[(usize, usize)],
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let x = order[k];
        for y in 0..dst.len() {
            if used[y] || sp[x] != dp[y] {
                continue;
            }
            let consistent = order[..k].iter().all(|&z| {
                src.leq(z, x) == dst.leq(image[z], y) && src.leq(x, z) == dst.leq(y, image[z])
            });
            if !consistent {
                continue;
            }
            image[x] = y;
            used[y] = true;
            if go(k + 1, order, src, dst, sp, dp, image, used) {
                return true;
            }
            used[y] = false;
        }
        false
    }

    if !go(0, &order, src, dst, &sp, &dp, &mut image, &mut used) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| (src.id(i).to_string(), dst.id(image[i]).to_string()))
            .collect(),
    )
}
