//! Antimatroids, their path posets, and the reduction of minimum-cost
//! feasible sets to minimum-cost stable matchings.
//!
//! Feasible sets are handled internally as bit masks over the ground set, so
//! ground sets are limited to 64 elements (all searches here are exhaustive
//! anyway).

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::augment::{omega_extend, project_xi, ExtendableMarket};
use crate::constraints::{uncomplement, ComplementJoinConstraint, JoinConstraint};
use crate::error::{Error, Result};
use crate::market::{enumerate_stable, Matching, MatchingMarket, Pair};
use crate::order::{set_cmp, ElementSet};
use crate::realize::{antichain_base, psi_s, RealizedBase};

/// Exact pair cost.
pub type Rational = Ratio<i64>;
/// Integer costs on ground elements.
pub type GroundCosts = BTreeMap<String, i64>;
/// Exact costs on firm-worker pairs; unlisted pairs cost zero.
pub type PairCosts = BTreeMap<Pair, Rational>;

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Min,
    Max,
}

/// A set system given by its ground set and feasible sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntimatroidFamily {
    pub ground: Vec<String>,
    pub feasible: Vec<ElementSet>,
}

/// A feasible set with exactly one endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub set: ElementSet,
    pub endpoint: String,
}

/// All paths of an antimatroid; their order is containment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPoset {
    pub ground: Vec<String>,
    pub paths: Vec<Path>,
}

impl PathPoset {
    /// Paths whose endpoint is `x`.
    pub fn ending_at<'a>(&'a self, x: &'a str) -> impl Iterator<Item = &'a Path> + 'a {
        self.paths.iter().filter(move |p| p.endpoint == x)
    }

    /// Paths contained in `set`.
    pub fn within<'a>(&'a self, set: &'a ElementSet) -> impl Iterator<Item = &'a Path> + 'a {
        self.paths.iter().filter(move |p| p.set.is_subset(set))
    }
}

/// Bit-mask view of a ground set.
struct Ground<'a> {
    ids: &'a [String],
    pos: BTreeMap<&'a str, usize>,
}

impl<'a> Ground<'a> {
    fn new(ids: &'a [String]) -> Result<Ground<'a>> {
        if ids.len() > 64 {
            return Err(Error::GroundTooLarge(ids.len()));
        }
        let mut pos = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if pos.insert(id.as_str(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(Ground { ids, pos })
    }

    fn full(&self) -> u64 {
        if self.ids.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.ids.len()) - 1
        }
    }

    fn mask(&self, s: &ElementSet) -> Result<u64> {
        s.iter().try_fold(0u64, |m, x| {
            self.pos
                .get(x.as_str())
                .map(|&i| m | 1 << i)
                .ok_or_else(|| Error::UnknownId {
                    id: x.clone(),
                    context: "ground element".into(),
                })
        })
    }

    fn set(&self, m: u64) -> ElementSet {
        (0..self.ids.len())
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| self.ids[i].clone())
            .collect()
    }
}

fn sorted_sets(mut v: Vec<ElementSet>) -> Vec<ElementSet> {
    v.sort_by(set_cmp);
    v.dedup();
    v
}

/// Checks the three antimatroid axioms: the ground set is feasible, unions of
/// feasible sets are feasible, and every nonempty feasible set has an element
/// whose removal leaves a feasible set.
pub fn validate_antimatroid(fam: &AntimatroidFamily) -> Result<()> {
    let g = Ground::new(&fam.ground)?;
    let masks: BTreeSet<u64> = fam
        .feasible
        .iter()
        .map(|s| g.mask(s))
        .collect::<Result<_>>()?;
    let bad = |msg: String| Err(Error::InvalidAntimatroid(msg));
    if !masks.contains(&g.full()) {
        return bad("the ground set is not feasible".into());
    }
    for &a in &masks {
        for &b in &masks {
            if a < b && !masks.contains(&(a | b)) {
                return bad(format!(
                    "union of {:?} and {:?} is not feasible",
                    g.set(a),
                    g.set(b)
                ));
            }
        }
    }
    for &a in &masks {
        if a != 0 && endpoint_mask(a, &masks) == 0 {
            return bad(format!("{:?} has no removable element", g.set(a)));
        }
    }
    Ok(())
}

fn endpoint_mask(a: u64, masks: &BTreeSet<u64>) -> u64 {
    let mut out = 0;
    let mut rest = a;
    while rest != 0 {
        let bit = rest & rest.wrapping_neg();
        if masks.contains(&(a & !bit)) {
            out |= bit;
        }
        rest &= !bit;
    }
    out
}

/// Elements `g ∈ G` such that `G ∖ {g}` is feasible.
pub fn endpoints(fam: &AntimatroidFamily, set: &ElementSet) -> Result<ElementSet> {
    let g = Ground::new(&fam.ground)?;
    let masks: BTreeSet<u64> = fam
        .feasible
        .iter()
        .map(|s| g.mask(s))
        .collect::<Result<_>>()?;
    Ok(g.set(endpoint_mask(g.mask(set)?, &masks)))
}

/// The paths (feasible sets with exactly one endpoint), in canonical order.
/// Cross-checked against the characterization "nonempty and not the union of
/// two other feasible sets"; a disagreement means the input is not an
/// antimatroid.
pub fn compute_path_poset(fam: &AntimatroidFamily) -> Result<PathPoset> {
    validate_antimatroid(fam)?;
    let g = Ground::new(&fam.ground)?;
    let masks: BTreeSet<u64> = fam
        .feasible
        .iter()
        .map(|s| g.mask(s))
        .collect::<Result<_>>()?;
    let mut paths = Vec::new();
    for &a in &masks {
        let ends = endpoint_mask(a, &masks);
        let by_endpoint = ends.count_ones() == 1;
        let proper: Vec<u64> = masks.iter().copied().filter(|&b| b != a && b & !a == 0).collect();
        let is_union = proper
            .iter()
            .any(|&b| proper.iter().any(|&c| b | c == a));
        let by_union = a != 0 && !is_union;
        if by_endpoint != by_union {
            return Err(Error::InvalidAntimatroid(format!(
                "path characterizations disagree on {:?}",
                g.set(a)
            )));
        }
        if by_endpoint {
            paths.push(Path {
                set: g.set(a),
                endpoint: g.set(ends).into_iter().next().expect("one endpoint"),
            });
        }
    }
    paths.sort_by(|p, q| set_cmp(&p.set, &q.set).then_with(|| p.endpoint.cmp(&q.endpoint)));
    Ok(PathPoset {
        ground: fam.ground.clone(),
        paths,
    })
}

/// All unions of paths (including the empty union), in canonical order.
pub fn family_from_path_poset(pp: &PathPoset) -> Result<AntimatroidFamily> {
    let g = Ground::new(&pp.ground)?;
    let mut seen: BTreeSet<u64> = BTreeSet::from([0]);
    let mut frontier = vec![0u64];
    let path_masks: Vec<u64> = pp.paths.iter().map(|p| g.mask(&p.set)).collect::<Result<_>>()?;
    while let Some(a) = frontier.pop() {
        for &p in &path_masks {
            let b = a | p;
            if seen.insert(b) {
                frontier.push(b);
            }
        }
    }
    Ok(AntimatroidFamily {
        ground: pp.ground.clone(),
        feasible: sorted_sets(seen.into_iter().map(|m| g.set(m)).collect()),
    })
}

/// One complement join constraint per ground element `x`: if `x` is present,
/// then for some path `G` ending at `x`, the endpoints of all paths inside
/// `G` are present. Repeated endpoints within a group are merged.
pub fn antimatroid_constraints(pp: &PathPoset) -> Vec<ComplementJoinConstraint> {
    let mut ground = pp.ground.clone();
    ground.sort();
    ground
        .iter()
        .map(|x| {
            let groups = pp
                .ending_at(x)
                .map(|g| pp.within(&g.set).map(|sub| sub.endpoint.clone()).collect())
                .collect();
            ComplementJoinConstraint::new(BTreeSet::from([x.clone()]), groups)
        })
        .collect()
}

/// Subsets of `ground` satisfying every complement constraint, canonical order.
pub fn filter_subsets(ground: &[String], omega: &[ComplementJoinConstraint]) -> Result<Vec<ElementSet>> {
    let g = Ground::new(ground)?;
    if ground.len() > 24 {
        return Err(Error::EnumerationBoundExceeded {
            size: ground.len(),
            bound: 24,
        });
    }
    let sets = (0..=g.full())
        .map(|m| g.set(m))
        .filter(|t| omega.iter().all(|c| crate::constraints::satisfies_complement(t, c)))
        .collect();
    Ok(sorted_sets(sets))
}

/// Edge id for the vertices `u`, `v` (ordered).
pub fn edge_id(u: &str, v: &str) -> String {
    if u <= v {
        format!("{u}~{v}")
    } else {
        format!("{v}~{u}")
    }
}

/// The antimatroid on vertices plus edges whose feasible sets are those in
/// which every included edge has an included endpoint, with weights
/// `1 − deg(v)` on vertices and `1` on edges. Its maximum feasible weight
/// equals the independence number of the graph.
pub fn independent_set_antimatroid(
    vertices: &[String],
    edges: &[(String, String)],
) -> Result<(AntimatroidFamily, GroundCosts)> {
    let vset: BTreeSet<&String> = vertices.iter().collect();
    if vset.len() != vertices.len() {
        let mut seen = BTreeSet::new();
        let dup = vertices.iter().find(|v| !seen.insert(*v)).expect("duplicate");
        return Err(Error::DuplicateId(dup.clone()));
    }
    let mut edge_ids: BTreeMap<String, (String, String)> = BTreeMap::new();
    for (u, v) in edges {
        for x in [u, v] {
            if !vset.contains(x) {
                return Err(Error::UnknownId {
                    id: x.clone(),
                    context: "edge endpoint".into(),
                });
            }
        }
        if u == v {
            return Err(Error::Schema(format!("self-loop at `{u}`")));
        }
        let id = edge_id(u, v);
        if vset.contains(&id) || edge_ids.insert(id.clone(), (u.clone(), v.clone())).is_some() {
            return Err(Error::DuplicateId(id));
        }
    }
    let mut ground: Vec<String> = vertices.to_vec();
    ground.extend(edge_ids.keys().cloned());
    let g = Ground::new(&ground)?;
    let vmask: Vec<u64> = vertices.iter().enumerate().map(|(i, _)| 1u64 << i).collect();
    let emask: Vec<(u64, u64)> = edge_ids
        .values()
        .map(|(u, v)| {
            let iu = vertices.iter().position(|x| x == u).unwrap();
            let iv = vertices.iter().position(|x| x == v).unwrap();
            (vmask[iu], vmask[iv])
        })
        .collect();
    let nv = vertices.len();
    let mut feasible = Vec::new();
    for m in 0..=g.full() {
        let ok = emask
            .iter()
            .enumerate()
            .all(|(k, (a, b))| m >> (nv + k) & 1 == 0 || m & (a | b) != 0);
        if ok {
            feasible.push(g.set(m));
        }
    }
    let mut weights = GroundCosts::new();
    for v in vertices {
        let deg = edge_ids.values().filter(|(a, b)| a == v || b == v).count() as i64;
        weights.insert(v.clone(), 1 - deg);
    }
    for e in edge_ids.keys() {
        weights.insert(e.clone(), 1);
    }
    Ok((
        AntimatroidFamily {
            ground,
            feasible: sorted_sets(feasible),
        },
        weights,
    ))
}

fn ground_cost(c: &GroundCosts, set: &ElementSet) -> i64 {
    set.iter().map(|x| c.get(x).copied().unwrap_or(0)).sum()
}

/// Best feasible set by brute force; ties go to the first set in canonical
/// order. Elements without a cost count as zero.
pub fn min_cost_feasible(fam: &AntimatroidFamily, c: &GroundCosts, sense: Sense) -> (ElementSet, i64) {
    let mut sets = fam.feasible.clone();
    sets.sort_by(set_cmp);
    let mut best: Option<(ElementSet, i64)> = None;
    for s in sets {
        let v = ground_cost(c, &s);
        let better = match (&best, sense) {
            (None, _) => true,
            (Some((_, b)), Sense::Min) => v < *b,
            (Some((_, b)), Sense::Max) => v > *b,
        };
        if better {
            best = Some((s, v));
        }
    }
    best.unwrap_or_default()
}

/// Spreads the cost of each ground element evenly over the lost pairs of its
/// rotation: `c'(f, w) = c(x) / |ρ⁻|` for `(f, w) ∈ ρ⁻`, `ρ = φ(x)`.
pub fn transfer_costs(base: &RealizedBase, c: &GroundCosts) -> Result<PairCosts> {
    let mut out = PairCosts::new();
    for (x, r) in &base.phi {
        let rot = &base.rotation_poset.rotations[r];
        let cost = c.get(x).copied().unwrap_or(0);
        let share = Rational::new(cost, rot.minus.len() as i64);
        for pair in &rot.minus {
            if out.insert(pair.clone(), share).is_some() {
                return Err(Error::OverlappingRotationAgents {
                    agent: format!("{pair:?}"),
                    rotations: vec![r.clone()],
                });
            }
        }
    }
    for x in c.keys() {
        if !base.phi.contains_key(x) {
            return Err(Error::UnknownId {
                id: x.clone(),
                context: "cost element".into(),
            });
        }
    }
    Ok(out)
}

/// `c'(μ)`: the sum of the recorded pair costs over `μ`.
pub fn pair_cost(c: &PairCosts, mu: &Matching) -> Rational {
    mu.pairs
        .iter()
        .filter_map(|p| c.get(p))
        .fold(Rational::from_integer(0), |a, b| a + b)
}

/// The matching market built from an antimatroid, with its pair costs.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub extension: ExtendableMarket,
    pub pair_costs: PairCosts,
    /// The join constraints applied (the un-complemented path constraints).
    pub constraints: Vec<JoinConstraint>,
}

impl Reduction {
    pub fn market(&self) -> &MatchingMarket {
        &self.extension.market
    }

    /// The feasible set represented by a stable matching: the ground elements
    /// whose rotations have *not* been applied.
    pub fn recover(&self, mu: &Matching) -> Result<ElementSet> {
        let base = &self.extension.base;
        let applied = psi_s(&base.rotation_poset, &project_xi(&self.extension, mu)?)?;
        let inv = base.phi_inverse();
        let chosen: ElementSet = applied.iter().map(|r| inv[r].clone()).collect();
        Ok(base.phi.keys().filter(|x| !chosen.contains(*x)).cloned().collect())
    }
}

/// Builds a market whose stable matchings correspond to the feasible sets of
/// the antimatroid, with pair costs such that every stable matching costs as
/// much as its feasible set.
pub fn reduce_to_matching(pp: &PathPoset, c: &GroundCosts) -> Result<Reduction> {
    let base = antichain_base(&pp.ground)?;
    let constraints: Vec<JoinConstraint> = antimatroid_constraints(pp)
        .iter()
        .map(uncomplement)
        .collect();
    let extension = omega_extend(&base, &constraints)?;
    let pair_costs = transfer_costs(&base, c)?;
    Ok(Reduction {
        extension,
        pair_costs,
        constraints,
    })
}

/// Best stable matching under `c` by enumeration; ties go to the first
/// matching in canonical order.
pub fn min_cost_stable(
    m: &MatchingMarket,
    c: &PairCosts,
    sense: Sense,
    node_bound: u64,
) -> Result<(Matching, Rational)> {
    let all = enumerate_stable(m, node_bound)?;
    let mut best: Option<(Matching, Rational)> = None;
    for mu in all {
        let v = pair_cost(c, &mu);
        let better = match (&best, sense) {
            (None, _) => true,
            (Some((_, b)), Sense::Min) => v < *b,
            (Some((_, b)), Sense::Max) => v > *b,
        };
        if better {
            best = Some((mu, v));
        }
    }
    Ok(best.expect("every market has a stable matching"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> ElementSet {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn missing_ground_set_is_rejected() {
        let fam = AntimatroidFamily {
            ground: ids(&["a", "b"]),
            feasible: vec![s(&[]), s(&["a"])],
        };
        assert!(matches!(
            validate_antimatroid(&fam),
            Err(Error::InvalidAntimatroid(_))
        ));
    }

    #[test]
    fn union_failure_names_both_sets() {
        let fam = AntimatroidFamily {
            ground: ids(&["a", "b"]),
            feasible: vec![s(&[]), s(&["a"]), s(&["b"])],
        };
        match validate_antimatroid(&fam) {
            Err(Error::InvalidAntimatroid(msg)) => assert!(msg.contains("not feasible")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_element_path() {
        let fam = AntimatroidFamily {
            ground: ids(&["x"]),
            feasible: vec![s(&[]), s(&["x"])],
        };
        let pp = compute_path_poset(&fam).unwrap();
        assert_eq!(pp.paths, vec![Path { set: s(&["x"]), endpoint: "x".into() }]);
        assert_eq!(family_from_path_poset(&pp).unwrap().feasible, fam.feasible);
    }

    #[test]
    fn element_in_no_path_is_excluded() {
        let pp = PathPoset {
            ground: ids(&["x"]),
            paths: vec![],
        };
        let omega = antimatroid_constraints(&pp);
        assert!(omega[0].alpha_c_groups.is_empty());
        assert_eq!(filter_subsets(&pp.ground, &omega).unwrap(), vec![s(&[])]);
    }

    #[test]
    fn transfer_halves_odd_costs() {
        let base = antichain_base(&ids(&["x"])).unwrap();
        let c: GroundCosts = [("x".to_string(), 1)].into();
        let pc = transfer_costs(&base, &c).unwrap();
        assert_eq!(pc.len(), 2);
        assert!(pc.values().all(|v| *v == Rational::new(1, 2)));
    }
}
