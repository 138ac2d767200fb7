//! One-to-one markets with prescribed rotations.
//!
//! A rotation is the difference between a stable matching and one of its
//! immediate successors in the Blair order. In a one-to-one market the
//! stable matchings correspond exactly to the lower sets of the rotation
//! poset: starting from the worker-optimal matching, apply the rotations of
//! a lower set by adding their `plus` pairs and removing their `minus` pairs.
//!
//! [`antichain_base`] builds a market whose rotation poset is an antichain on
//! given ids: one independent four-agent swap gadget per id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{stable_lattice, ChoiceFunctionSpec, Matching, MatchingMarket, Pair};
use crate::order::{validate_poset, ElementSet, Poset};

/// A minimal difference between a stable matching and an immediate successor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rotation {
    pub id: String,
    /// Pairs gained when the rotation is applied.
    pub plus: BTreeSet<Pair>,
    /// Pairs lost when the rotation is applied.
    pub minus: BTreeSet<Pair>,
}

impl Rotation {
    /// Firms appearing in the lost pairs.
    pub fn minus_firms(&self) -> BTreeSet<String> {
        self.minus.iter().map(|(f, _)| f.clone()).collect()
    }

    /// Workers appearing in the gained pairs.
    pub fn plus_workers(&self) -> BTreeSet<String> {
        self.plus.iter().map(|(_, w)| w.clone()).collect()
    }
}

/// Rotations of a one-to-one market ordered by precedence, together with the
/// worker-optimal stable matching they are applied to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationPoset {
    pub poset: Poset,
    pub rotations: BTreeMap<String, Rotation>,
    pub mu_w: Matching,
}

/// A one-to-one market together with an order-isomorphism `phi` from a poset
/// onto its rotation poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedBase {
    pub market: MatchingMarket,
    /// Poset element id → rotation id.
    pub phi: BTreeMap<String, String>,
    pub rotation_poset: RotationPoset,
}

impl RealizedBase {
    /// Inverse of `phi`.
    pub fn phi_inverse(&self) -> BTreeMap<String, String> {
        self.phi.iter().map(|(x, r)| (r.clone(), x.clone())).collect()
    }
}

/// Agent ids of the swap gadget for element `id`: `(firms, workers)`.
pub fn gadget_agents(id: &str) -> ([String; 2], [String; 2]) {
    (
        [format!("{id}.f1"), format!("{id}.f2")],
        [format!("{id}.w1"), format!("{id}.w2")],
    )
}

/// A market with one swap gadget per id. Its rotation poset is the antichain
/// on `ids` (rotation ids equal element ids), so its stable matchings
/// correspond to all subsets of `ids`. An empty id list yields the empty
/// market, whose only stable matching is the empty one.
pub fn antichain_base(ids: &[String]) -> Result<RealizedBase> {
    let mut sorted: Vec<String> = ids.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId(w[0].clone()));
    }
    let mut firms = Vec::new();
    let mut workers = Vec::new();
    let mut choice = BTreeMap::new();
    let mut rotations = BTreeMap::new();
    let mut mu_w = BTreeSet::new();
    for id in &sorted {
        let ([f1, f2], [w1, w2]) = gadget_agents(id);
        choice.insert(f1.clone(), ChoiceFunctionSpec::singletons(&[&w2, &w1]));
        choice.insert(f2.clone(), ChoiceFunctionSpec::singletons(&[&w1, &w2]));
        choice.insert(w1.clone(), ChoiceFunctionSpec::singletons(&[&f1, &f2]));
        choice.insert(w2.clone(), ChoiceFunctionSpec::singletons(&[&f2, &f1]));
        let minus = BTreeSet::from([(f1.clone(), w1.clone()), (f2.clone(), w2.clone())]);
        let plus = BTreeSet::from([(f1.clone(), w2.clone()), (f2.clone(), w1.clone())]);
        mu_w.extend(minus.iter().cloned());
        rotations.insert(
            id.clone(),
            Rotation {
                id: id.clone(),
                plus,
                minus,
            },
        );
        firms.extend([f1, f2]);
        workers.extend([w1, w2]);
    }
    let market = MatchingMarket {
        firms,
        workers,
        choice,
    };
    market.validate()?;
    let phi = sorted.iter().map(|x| (x.clone(), x.clone())).collect();
    Ok(RealizedBase {
        market,
        phi,
        rotation_poset: RotationPoset {
            poset: Poset::trivial(&sorted)?,
            rotations,
            mu_w: Matching { pairs: mu_w },
        },
    })
}

/// Fails with `NotOneToOne` unless every agent uses a list of single partners.
pub fn check_one_to_one(m: &MatchingMarket) -> Result<()> {
    for a in m.firms.iter().chain(&m.workers) {
        if !m.spec(a).is_singleton_list() {
            return Err(Error::NotOneToOne { agent: a.clone() });
        }
    }
    Ok(())
}

/// Zero-padded id for the `i`-th (1-based) of `n` extracted rotations.
fn rotation_id(i: usize, n: usize) -> String {
    let width = n.to_string().len();
    format!("r{i:0width$}")
}

/// Enumerates the stable matchings of a one-to-one market and reads off its
/// rotations from the covering pairs of the Blair lattice. Rotations are
/// named `r1`, `r2`, … in canonical order of their `(minus, plus)` pair sets.
pub fn extract_rotations(m: &MatchingMarket, node_bound: u64) -> Result<RotationPoset> {
    check_one_to_one(m)?;
    let sl = stable_lattice(m, node_bound)?;
    let p = sl.lattice.poset();
    let n = p.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut found: BTreeSet<(BTreeSet<Pair>, BTreeSet<Pair>)> = BTreeSet::new();
    let diff = |a: usize, b: usize| -> (BTreeSet<Pair>, BTreeSet<Pair>) {
        let (lo, hi) = (&sl.matchings[a].pairs, &sl.matchings[b].pairs);
        (
            lo.difference(hi).cloned().collect(),
            hi.difference(lo).cloned().collect(),
        )
    };
    for (lo, hi) in p.covers() {
        succ[lo].push(hi);
        found.insert(diff(lo, hi));
    }
    let keys: Vec<(BTreeSet<Pair>, BTreeSet<Pair>)> = found.into_iter().collect();
    let k = keys.len();
    let ids: Vec<String> = (1..=k).map(|i| rotation_id(i, k)).collect();
    let key_index: BTreeMap<&(BTreeSet<Pair>, BTreeSet<Pair>), usize> =
        keys.iter().enumerate().map(|(i, key)| (key, i)).collect();

    // Occurrence sets: the rotations applied on any path up from the bottom.
    let bottom = sl.lattice.bottom();
    let mut occ: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    occ[bottom] = Some(BTreeSet::new());
    let mut queue = VecDeque::from([bottom]);
    while let Some(lo) = queue.pop_front() {
        let base = occ[lo].clone().expect("queued nodes have occurrence sets");
        for &hi in &succ[lo] {
            let r = key_index[&diff(lo, hi)];
            if base.contains(&r) {
                return Err(Error::NonLatticeStructure(format!(
                    "rotation {} occurs twice on a chain",
                    ids[r]
                )));
            }
            let mut next = base.clone();
            next.insert(r);
            match &occ[hi] {
                None => {
                    occ[hi] = Some(next);
                    queue.push_back(hi);
                }
                Some(existing) if *existing != next => {
                    return Err(Error::NonLatticeStructure(format!(
                        "matching {} is reached with different rotation sets",
                        p.id(hi)
                    )));
                }
                Some(_) => {}
            }
        }
    }
    let occ: Vec<BTreeSet<usize>> = occ
        .into_iter()
        .map(|o| o.ok_or_else(|| Error::NonLatticeStructure("unreachable matching".into())))
        .collect::<Result<_>>()?;
    let rel: Vec<Vec<bool>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| occ.iter().all(|s| !s.contains(&b) || s.contains(&a)))
                .collect()
        })
        .collect();
    let poset = validate_poset(&ids, &rel).map_err(|e| Error::NonLatticeStructure(e.to_string()))?;
    let rotations = keys
        .into_iter()
        .zip(&ids)
        .map(|((minus, plus), id)| {
            (
                id.clone(),
                Rotation {
                    id: id.clone(),
                    plus,
                    minus,
                },
            )
        })
        .collect();
    Ok(RotationPoset {
        poset,
        rotations,
        mu_w: sl.matchings[bottom].clone(),
    })
}

impl RotationPoset {
    fn rotation(&self, id: &str) -> Result<&Rotation> {
        self.rotations.get(id).ok_or_else(|| Error::UnknownId {
            id: id.to_string(),
            context: "rotation".into(),
        })
    }

    /// All rotation ids.
    pub fn ids(&self) -> ElementSet {
        self.rotations.keys().cloned().collect()
    }
}

/// The matching obtained from the worker-optimal matching by applying the
/// rotations in the lower set `r`.
pub fn psi_s_inverse(rp: &RotationPoset, r: &ElementSet) -> Result<Matching> {
    for id in r {
        rp.rotation(id)?;
    }
    if let Some((present, missing)) = rp.poset.lower_closure_violation(r)? {
        return Err(Error::NotLowerClosed { present, missing });
    }
    let mut pairs = rp.mu_w.pairs.clone();
    for id in r {
        pairs.extend(rp.rotations[id].plus.iter().cloned());
    }
    for id in r {
        for pair in &rp.rotations[id].minus {
            pairs.remove(pair);
        }
    }
    Ok(Matching { pairs })
}

/// The lower set of rotations representing the stable matching `mu`.
///
/// Each firm moves along a chain of partners: its worker-optimal partner,
/// then the partner gained by each rotation that takes a pair of that firm
/// away, in precedence order. The position of `mu(f)` on the chain tells
/// which of the firm's rotations have been applied. The result is verified by
/// reconstructing `mu`.
pub fn psi_s(rp: &RotationPoset, mu: &Matching) -> Result<ElementSet> {
    let rank: BTreeMap<&str, usize> = rp
        .poset
        .linear_extension()
        .into_iter()
        .enumerate()
        .map(|(pos, i)| (rp.poset.id(i), pos))
        .collect();
    let mut by_firm: BTreeMap<&str, Vec<&Rotation>> = BTreeMap::new();
    for rot in rp.rotations.values() {
        for (f, _) in &rot.minus {
            by_firm.entry(f.as_str()).or_default().push(rot);
        }
    }
    let mut applied = ElementSet::new();
    for (f, rots) in by_firm.iter_mut() {
        rots.sort_by_key(|r| rank[r.id.as_str()]);
        let partner_after = |rot: &Rotation| {
            rot.plus
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, w)| w.clone())
        };
        let mut chain: Vec<Option<String>> = vec![rp.mu_w.of_firm(f).into_iter().next()];
        chain.extend(rots.iter().map(|r| partner_after(r)));
        let current = mu.of_firm(f);
        if current.len() > 1 {
            return Err(Error::NotRepresentable(format!("firm {f} has several partners")));
        }
        let current = current.into_iter().next();
        let pos = chain.iter().position(|c| *c == current).ok_or_else(|| {
            Error::NotRepresentable(format!("partner of firm {f} lies on none of its rotations"))
        })?;
        applied.extend(rots[..pos].iter().map(|r| r.id.clone()));
    }
    let rebuilt = psi_s_inverse(rp, &applied).map_err(|e| match e {
        Error::NotLowerClosed { present, missing } => Error::NotRepresentable(format!(
            "rotation set is not lower closed ({present} requires {missing})"
        )),
        other => other,
    })?;
    if rebuilt != *mu {
        return Err(Error::NotRepresentable(
            "applying the inferred rotations does not reproduce the matching".into(),
        ));
    }
    Ok(applied)
}
