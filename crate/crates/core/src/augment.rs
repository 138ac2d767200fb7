//! Enforcing join constraints on a stable-matching lattice by market surgery.
//!
//! An [`ExtendableMarket`] is a market derived from a one-to-one base market
//! by a sequence of [`augment`] steps. Each step adds an auxiliary worker and
//! firm plus copies of some base workers, and rewires choice functions so
//! that exactly the stable matchings whose rotation set violates the given
//! join constraint disappear. Projecting the new stable matchings back onto
//! the base market ([`project_xi`]) is an order-embedding whose image is the
//! set of base stable matchings satisfying every applied constraint.
//!
//! [`synthesize_from_lattice`] chains everything: it realizes an arbitrary
//! finite lattice as the stable-matching lattice of a constructed market.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::constraints::{constraints_from_lattice, validate_join_constraint, JoinConstraint};
use crate::error::{Error, Result};
use crate::market::{
    blair_lattice, enumerate_stable, is_stable, ChoiceFunctionSpec, GammaSpec, Matching,
    MatchingMarket, Pair, StableLattice,
};
use crate::order::{canonical_partial_rep, check_order_isomorphism, join_irreducibles, ElementSet, Lattice};
use crate::realize::{antichain_base, psi_s, RealizedBase, RotationPoset};

/// A market obtained from a one-to-one base by zero or more augmentations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendableMarket {
    pub market: MatchingMarket,
    pub base: RealizedBase,
    /// Regular worker → the base worker it copies (identity on base workers).
    pub copy_map: BTreeMap<String, String>,
    pub aux_workers: BTreeSet<String>,
    pub aux_firms: BTreeSet<String>,
    /// Base firm → its auxiliary pairs `(anchor base worker, aux worker)`.
    pub a_f: BTreeMap<String, Vec<Pair>>,
    /// Number of augmentations applied so far (the fresh-id counter).
    pub augment_count: usize,
    /// The constraints applied, in order.
    pub applied: Vec<JoinConstraint>,
}

impl ExtendableMarket {
    /// The base market viewed as an extension of itself.
    pub fn from_base(base: RealizedBase) -> ExtendableMarket {
        let copy_map = base
            .market
            .workers
            .iter()
            .map(|w| (w.clone(), w.clone()))
            .collect();
        let a_f = base
            .market
            .firms
            .iter()
            .map(|f| (f.clone(), Vec::new()))
            .collect();
        ExtendableMarket {
            market: base.market.clone(),
            base,
            copy_map,
            aux_workers: BTreeSet::new(),
            aux_firms: BTreeSet::new(),
            a_f,
            augment_count: 0,
            applied: Vec::new(),
        }
    }

    /// All regular workers copying base worker `w` (including `w` itself).
    pub fn copies(&self, w: &str) -> BTreeSet<String> {
        self.copy_map
            .iter()
            .filter(|(_, b)| *b == w)
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn is_base_firm(&self, f: &str) -> bool {
        self.base.market.is_firm(f)
    }
}

/// A join constraint over base rotation ids with the agent sets it induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RotationJoinConstraint {
    pub constraint: JoinConstraint,
    /// Rotations appearing in α.
    pub pi_alpha: ElementSet,
    /// Rotations appearing in β.
    pub pi_beta: ElementSet,
    /// For each α rotation, the firms of its lost pairs.
    pub f_rho: BTreeMap<String, BTreeSet<String>>,
    /// For each β rotation, the workers of its gained pairs.
    pub w_rho: BTreeMap<String, BTreeSet<String>>,
    pub f_alpha: BTreeSet<String>,
    pub w_beta: BTreeSet<String>,
}

/// Computes the agent sets of `jc` and checks that the α arguments form an
/// antichain whose rotations involve disjoint firm sets.
pub fn derive_sets(jc: &JoinConstraint, rp: &RotationPoset) -> Result<RotationJoinConstraint> {
    validate_join_constraint(jc, &rp.poset).map_err(|e| match e {
        Error::AlphaArgumentsComparable { x, y } => Error::ArgumentsNotAntichain { x, y },
        other => other,
    })?;
    let pi_alpha = jc.alpha_arguments();
    let pi_beta = jc.beta_ids.clone();
    let f_rho: BTreeMap<String, BTreeSet<String>> = pi_alpha
        .iter()
        .map(|r| (r.clone(), rp.rotations[r].minus_firms()))
        .collect();
    let w_rho: BTreeMap<String, BTreeSet<String>> = pi_beta
        .iter()
        .map(|r| (r.clone(), rp.rotations[r].plus_workers()))
        .collect();
    let mut owner: BTreeMap<&String, Vec<String>> = BTreeMap::new();
    for (r, fs) in &f_rho {
        for f in fs {
            owner.entry(f).or_default().push(r.clone());
        }
    }
    if let Some((f, rots)) = owner.iter().find(|(_, rots)| rots.len() > 1) {
        return Err(Error::OverlappingRotationAgents {
            agent: (*f).clone(),
            rotations: rots.clone(),
        });
    }
    let f_alpha = f_rho.values().flatten().cloned().collect();
    let w_beta = w_rho.values().flatten().cloned().collect();
    Ok(RotationJoinConstraint {
        constraint: jc.clone(),
        pi_alpha,
        pi_beta,
        f_rho,
        w_rho,
        f_alpha,
        w_beta,
    })
}

fn base_list(base: &RealizedBase, agent: &str) -> Vec<String> {
    base.market.spec(agent).ranked().unwrap_or_default()
}

/// Applies the join-constraint augmentation for `rjc` to `em`.
///
/// With `k = augment_count + 1`, adds an auxiliary worker `w0#k`, an
/// auxiliary firm `f0#k` and a copy `w#k` of every worker `w` gained by a β
/// rotation:
/// * `w0#k` selects every offered α firm, and also `f0#k` when no rotation
///   group of α is blocked by the offer;
/// * `f0#k` takes `w0#k` alone when offered, else the offered new copies;
/// * copy `w#k` ranks `f0#k` first, then the tail of `w`'s base list starting
///   at the least preferred firm that gains `w` in a β rotation;
/// * each α firm gets the auxiliary pair (worker it loses, `w0#k`);
/// * every base firm ranks copy classes in its base order (regular choice).
pub fn augment(em: &ExtendableMarket, rjc: &RotationJoinConstraint) -> Result<ExtendableMarket> {
    let k = em.augment_count + 1;
    let rp = &em.base.rotation_poset;
    let w0 = format!("w0#{k}");
    let f0 = format!("f0#{k}");
    let copies: BTreeMap<String, String> = rjc
        .w_beta
        .iter()
        .map(|w| (format!("{w}#{k}"), w.clone()))
        .collect();
    let mut taken: BTreeSet<&String> = em.market.firms.iter().chain(&em.market.workers).collect();
    for id in [&w0, &f0].into_iter().chain(copies.keys()) {
        if !taken.insert(id) {
            return Err(Error::FreshIdCollision(id.clone()));
        }
    }

    let mut next = em.clone();
    let market = &mut next.market;
    market.firms.push(f0.clone());
    market.workers.push(w0.clone());
    market.workers.extend(copies.keys().cloned());

    market.choice.insert(
        w0.clone(),
        ChoiceFunctionSpec::Triggered {
            watch: rjc.f_alpha.clone(),
            trigger: f0.clone(),
            gamma: GammaSpec {
                alpha: rjc.constraint.alpha_groups.clone(),
                f_rho: rjc.f_rho.clone(),
            },
        },
    );
    market.choice.insert(
        f0.clone(),
        ChoiceFunctionSpec::IfElse {
            priority: w0.clone(),
            else_set: copies.keys().cloned().collect(),
        },
    );
    for (copy, w) in &copies {
        let list = base_list(&em.base, w);
        let gains: BTreeSet<&String> = rjc
            .pi_beta
            .iter()
            .flat_map(|r| rp.rotations[r].plus.iter())
            .filter(|(_, x)| x == w)
            .map(|(f, _)| f)
            .collect();
        let start = list
            .iter()
            .rposition(|f| gains.contains(f))
            .ok_or_else(|| Error::InvalidSpec {
                agent: w.clone(),
                reason: "no β rotation gains this worker with a listed firm".into(),
            })?;
        let mut ranked = vec![f0.clone()];
        ranked.extend(list[start..].iter().cloned());
        market
            .choice
            .insert(copy.clone(), ChoiceFunctionSpec::singletons(&ranked));
        next.copy_map.insert(copy.clone(), w.clone());
    }
    for f in &rjc.f_alpha {
        let lost = rjc
            .pi_alpha
            .iter()
            .flat_map(|r| rp.rotations[r].minus.iter())
            .find(|(g, _)| g == f)
            .map(|(_, w)| w.clone())
            .expect("every α firm loses a pair in some α rotation");
        next.a_f.entry(f.clone()).or_default().push((lost, w0.clone()));
    }
    for f in &em.base.market.firms {
        let tiers = base_list(&em.base, f)
            .iter()
            .map(|w| next.copies(w))
            .collect();
        let aux_pairs = next.a_f.get(f).cloned().unwrap_or_default();
        next.market
            .choice
            .insert(f.clone(), ChoiceFunctionSpec::Regular { tiers, aux_pairs });
    }
    next.aux_workers.insert(w0);
    next.aux_firms.insert(f0);
    next.augment_count = k;
    next.applied.push(rjc.constraint.clone());
    next.market.validate()?;
    Ok(next)
}

/// Projects a matching of `after` (one augmentation past `before`) onto
/// `before`: pairs over earlier agents are kept, pairs with a new copy are
/// mapped to its base worker, and pairs with the new auxiliary agents are
/// dropped.
pub fn project_zeta(before: &ExtendableMarket, after: &ExtendableMarket, mu: &Matching) -> Matching {
    let old_firms: BTreeSet<&String> = before.market.firms.iter().collect();
    let old_workers: BTreeSet<&String> = before.market.workers.iter().collect();
    let pairs = mu
        .pairs
        .iter()
        .filter(|(f, _)| old_firms.contains(f))
        .filter_map(|(f, w)| {
            if old_workers.contains(w) {
                Some((f.clone(), w.clone()))
            } else if !after.aux_workers.contains(w) {
                after.copy_map.get(w).map(|b| (f.clone(), b.clone()))
            } else {
                None
            }
        })
        .collect();
    Matching { pairs }
}

/// The projection onto the base market without the stability check.
pub fn project_xi_unchecked(em: &ExtendableMarket, mu: &Matching) -> Matching {
    let pairs = mu
        .pairs
        .iter()
        .filter(|(f, _)| em.is_base_firm(f))
        .filter_map(|(f, w)| em.copy_map.get(w).map(|b| (f.clone(), b.clone())))
        .collect();
    Matching { pairs }
}

/// Projects a matching of the extension onto the base market: base-firm pairs
/// with regular workers, each worker replaced by the base worker it copies.
/// Fails with `ProjectionNotStable` if the result is unstable in the base.
pub fn project_xi(em: &ExtendableMarket, mu: &Matching) -> Result<Matching> {
    let out = project_xi_unchecked(em, mu);
    if !is_stable(&em.base.market, &out)? {
        return Err(Error::ProjectionNotStable(format!("{:?}", out.pairs)));
    }
    Ok(out)
}

/// Applies `omega` in order, starting from the base as an extension of itself.
pub fn omega_extend(base: &RealizedBase, omega: &[JoinConstraint]) -> Result<ExtendableMarket> {
    let mut em = ExtendableMarket::from_base(base.clone());
    for jc in omega {
        let rjc = derive_sets(jc, &base.rotation_poset)?;
        em = augment(&em, &rjc)?;
    }
    Ok(em)
}

/// One named verification outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: &str, failure: Option<String>) -> Check {
        Check {
            name: name.to_string(),
            passed: failure.is_none(),
            witness: failure,
        }
    }
}

/// Outcome of [`verify_extension`].
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    pub stable_in_extension: usize,
    pub stable_in_base: usize,
    pub expected_image: usize,
    pub checks: Vec<Check>,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Enumerates both markets and checks that projection onto the base is an
/// order-embedding of the extension's stable lattice whose image is exactly
/// the base stable matchings satisfying every constraint of `omega`, and that
/// the image contains the base top and bottom.
pub fn verify_extension(
    base: &RealizedBase,
    em: &ExtendableMarket,
    omega: &[JoinConstraint],
    node_bound: u64,
) -> Result<ExtensionReport> {
    let ext = blair_lattice(&em.market, enumerate_stable(&em.market, node_bound)?)?;
    let base_all = enumerate_stable(&base.market, node_bound)?;
    let base_lat = blair_lattice(&base.market, base_all.clone())?;
    let rp = &base.rotation_poset;

    let mut expected = BTreeSet::new();
    for mu in &base_all {
        let r = psi_s(rp, mu)?;
        if omega.iter().all(|c| c.is_satisfied(&r)) {
            expected.insert(mu.clone());
        }
    }
    let images: Vec<Matching> = ext
        .matchings
        .iter()
        .map(|mu| project_xi_unchecked(em, mu))
        .collect();
    let mut checks = Vec::new();

    let unstable = images
        .iter()
        .find(|mu| !is_stable(&base.market, mu).unwrap_or(false));
    checks.push(Check::new(
        "projections_stable",
        unstable.map(|mu| format!("{:?}", mu.pairs)),
    ));

    let image: BTreeSet<Matching> = images.iter().cloned().collect();
    let image_failure = if image == expected {
        None
    } else {
        let extra = image.difference(&expected).next();
        let missing = expected.difference(&image).next();
        Some(format!(
            "unexpected: {:?}; missing: {:?}",
            extra.map(|m| &m.pairs),
            missing.map(|m| &m.pairs)
        ))
    };
    checks.push(Check::new("image_matches_constraints", image_failure));

    checks.push(Check::new(
        "projection_injective",
        (image.len() != images.len())
            .then(|| format!("{} matchings project to {} images", images.len(), image.len())),
    ));

    let mut order_failure = None;
    let ep = ext.lattice.poset();
    let bp = base_lat.lattice.poset();
    'outer: for i in 0..images.len() {
        for j in 0..images.len() {
            let (Some(bi), Some(bj)) = (base_lat.index_of(&images[i]), base_lat.index_of(&images[j]))
            else {
                order_failure = Some("projection outside the base stable set".to_string());
                break 'outer;
            };
            if ep.leq(i, j) != bp.leq(bi, bj) {
                order_failure = Some(format!("order differs on ({}, {})", ext.id(i), ext.id(j)));
                break 'outer;
            }
        }
    }
    checks.push(Check::new("order_embedding", order_failure));

    let top = &base_lat.matchings[base_lat.lattice.top()];
    let bottom = &base_lat.matchings[base_lat.lattice.bottom()];
    let ends_failure = match (image.contains(top), image.contains(bottom)) {
        (true, true) => None,
        (t, b) => Some(format!("top present: {t}, bottom present: {b}")),
    };
    checks.push(Check::new("top_and_bottom_in_image", ends_failure));

    Ok(ExtensionReport {
        stable_in_extension: ext.matchings.len(),
        stable_in_base: base_all.len(),
        expected_image: expected.len(),
        checks,
    })
}

/// A market realizing a given lattice, with the verified isomorphism.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub extension: ExtendableMarket,
    /// The constraints applied: order constraints first, then lattice constraints.
    pub constraints: Vec<JoinConstraint>,
    /// Lattice element → stable matching of the synthesized market.
    pub iso: BTreeMap<String, Matching>,
    pub stable: StableLattice,
}

impl Synthesis {
    /// Lattice element → id of its stable matching in [`Synthesis::stable`].
    pub fn element_ids(&self) -> BTreeMap<String, String> {
        self.iso
            .iter()
            .filter_map(|(x, mu)| self.stable.index_of(mu).map(|i| (x.clone(), self.stable.id(i))))
            .collect()
    }
}

/// Realizes `l` as the stable-matching lattice of a constructed market.
///
/// The join-irreducibles `X_j` of `l` each get a swap gadget; order
/// constraints `q ⇒ p` (for covers `p ≺ q` in `X_j`) cut the gadgets' Boolean
/// lattice down to the lower sets of `X_j`, and the constraints of
/// [`constraints_from_lattice`] cut those down to the image of `l`. The map
/// from elements to stable matchings is recovered by matching rotation sets,
/// then checked to be an order-isomorphism.
pub fn synthesize_from_lattice(l: &Lattice, node_bound: u64) -> Result<Synthesis> {
    let (xj, xj_poset) = join_irreducibles(l)?;
    let base = antichain_base(&xj)?;
    let phi = &base.phi;
    let transport = |jc: &JoinConstraint| {
        JoinConstraint::new(
            jc.alpha_groups
                .iter()
                .map(|g| g.iter().map(|x| phi[x].clone()).collect())
                .collect(),
            jc.beta_ids.iter().map(|x| phi[x].clone()).collect(),
        )
    };
    let mut order: Vec<JoinConstraint> = xj_poset
        .cover_ids()
        .into_iter()
        .map(|(p, q)| JoinConstraint::conjunctive([q].into(), [p].into()))
        .collect();
    order.sort();
    let mut constraints: Vec<JoinConstraint> = order.iter().map(&transport).collect();
    constraints.extend(constraints_from_lattice(l)?.iter().map(&transport));

    let extension = omega_extend(&base, &constraints)?;
    let all = enumerate_stable(&extension.market, node_bound)?;
    let stable = blair_lattice(&extension.market, all)?;

    let mut by_rotations: BTreeMap<ElementSet, usize> = BTreeMap::new();
    for (i, mu) in stable.matchings.iter().enumerate() {
        let r = psi_s(&base.rotation_poset, &project_xi(&extension, mu)?)?;
        if by_rotations.insert(r, i).is_some() {
            return Err(Error::IsomorphismFailure(
                "two stable matchings share a rotation set".into(),
            ));
        }
    }
    let rep = canonical_partial_rep(l)?;
    let mut iso = BTreeMap::new();
    let mut ids = BTreeMap::new();
    for (x, set) in &rep {
        let r: ElementSet = set.iter().map(|e| phi[e].clone()).collect();
        let i = *by_rotations.get(&r).ok_or_else(|| {
            Error::IsomorphismFailure(format!("no stable matching represents element {x}"))
        })?;
        iso.insert(x.clone(), stable.matchings[i].clone());
        ids.insert(x.clone(), stable.id(i));
    }
    check_order_isomorphism(&ids, l.poset(), stable.lattice.poset())
        .map_err(|v| Error::IsomorphismFailure(v.to_string()))?;
    Ok(Synthesis {
        extension,
        constraints,
        iso,
        stable,
    })
}
