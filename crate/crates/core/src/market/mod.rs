//! Matching markets whose agents use one of four data-driven choice-function
//! families, together with stability checks, deferred acceptance, the Blair
//! order and an exhaustive stable-matching enumerator.

mod compiled;
mod deferred;
mod enumerate;
pub mod path_independence;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{lattice_from_order, validate_poset, Lattice};

pub(crate) use compiled::CompiledMarket;
pub use deferred::{deferred_acceptance, Side};
pub use enumerate::{enumerate_stable, DEFAULT_NODE_BOUND};

/// A firm-worker pair.
pub type Pair = (String, String);

/// The α-part of a join constraint over rotation ids together with the firm
/// set of each rotation; evaluates to `α({ρ : F_ρ ∩ T = ∅})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub alpha: Vec<BTreeSet<String>>,
    pub f_rho: BTreeMap<String, BTreeSet<String>>,
}

impl GammaSpec {
    /// Union of all rotation firm sets.
    pub fn full_watch(&self) -> BTreeSet<String> {
        self.f_rho.values().flatten().cloned().collect()
    }

    /// Rotations none of whose firms are offered.
    pub fn untouched(&self, t: &BTreeSet<String>) -> BTreeSet<String> {
        self.f_rho
            .iter()
            .filter(|(_, fs)| fs.iter().all(|f| !t.contains(f)))
            .map(|(r, _)| r.clone())
            .collect()
    }

    pub fn eval(&self, t: &BTreeSet<String>) -> bool {
        let free = self.untouched(t);
        self.alpha
            .iter()
            .all(|g| g.iter().any(|r| free.contains(r)))
    }
}

/// A choice function, described by data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChoiceFunctionSpec {
    /// Returns the first listed set contained in the offer, else nothing.
    PreferenceList { list: Vec<BTreeSet<String>> },
    /// Selects the offered watched firms, plus the trigger firm when γ holds.
    Triggered {
        watch: BTreeSet<String>,
        trigger: String,
        #[serde(flatten)]
        gamma: GammaSpec,
    },
    /// Selects the priority worker alone if offered, else the offered part of `else_set`.
    IfElse {
        priority: String,
        else_set: BTreeSet<String>,
    },
    /// Selects the best offered tier, plus auxiliary workers whose anchor
    /// worker's tier is at least as good as the selected tier.
    Regular {
        tiers: Vec<BTreeSet<String>>,
        aux_pairs: Vec<Pair>,
    },
}

impl ChoiceFunctionSpec {
    /// A strict preference list over single partners.
    pub fn singletons<S: AsRef<str>>(ids: &[S]) -> Self {
        ChoiceFunctionSpec::PreferenceList {
            list: ids
                .iter()
                .map(|s| BTreeSet::from([s.as_ref().to_string()]))
                .collect(),
        }
    }

    /// Applies the choice function to an offered set.
    pub fn choose(&self, t: &BTreeSet<String>) -> BTreeSet<String> {
        match self {
            ChoiceFunctionSpec::PreferenceList { list } => list
                .iter()
                .find(|s| s.is_subset(t))
                .cloned()
                .unwrap_or_default(),
            ChoiceFunctionSpec::Triggered {
                watch,
                trigger,
                gamma,
            } => {
                let mut out: BTreeSet<String> = t.intersection(watch).cloned().collect();
                if t.contains(trigger) && gamma.eval(t) {
                    out.insert(trigger.clone());
                }
                out
            }
            ChoiceFunctionSpec::IfElse { priority, else_set } => {
                if t.contains(priority) {
                    BTreeSet::from([priority.clone()])
                } else {
                    t.intersection(else_set).cloned().collect()
                }
            }
            ChoiceFunctionSpec::Regular { tiers, aux_pairs } => {
                let best = tiers.iter().position(|tier| !tier.is_disjoint(t));
                let mut out: BTreeSet<String> = match best {
                    Some(i) => tiers[i].intersection(t).cloned().collect(),
                    None => BTreeSet::new(),
                };
                for (anchor, aux) in aux_pairs {
                    if !t.contains(aux) {
                        continue;
                    }
                    let anchor_tier = tiers.iter().position(|tier| tier.contains(anchor));
                    let admitted = match (best, anchor_tier) {
                        (None, _) => true,
                        (Some(i), Some(l)) => l <= i,
                        (Some(_), None) => false,
                    };
                    if admitted {
                        out.insert(aux.clone());
                    }
                }
                out
            }
        }
    }

    /// Partners that can ever be chosen.
    pub fn choosable(&self) -> BTreeSet<String> {
        match self {
            ChoiceFunctionSpec::PreferenceList { list } => list.iter().flatten().cloned().collect(),
            ChoiceFunctionSpec::Triggered { watch, trigger, .. } => {
                let mut s = watch.clone();
                s.insert(trigger.clone());
                s
            }
            ChoiceFunctionSpec::IfElse { priority, else_set } => {
                let mut s = else_set.clone();
                s.insert(priority.clone());
                s
            }
            ChoiceFunctionSpec::Regular { tiers, aux_pairs } => tiers
                .iter()
                .flatten()
                .cloned()
                .chain(aux_pairs.iter().map(|(_, a)| a.clone()))
                .collect(),
        }
    }

    /// Partners that can be chosen or can influence the choice.
    pub fn relevant_universe(&self) -> BTreeSet<String> {
        let mut u = self.choosable();
        if let ChoiceFunctionSpec::Triggered { gamma, .. } = self {
            u.extend(gamma.full_watch());
        }
        u
    }

    /// Is this a strict list over single partners?
    pub fn is_singleton_list(&self) -> bool {
        matches!(self, ChoiceFunctionSpec::PreferenceList { list } if list.iter().all(|s| s.len() == 1))
    }

    /// The ranked partners of a singleton preference list.
    pub fn ranked(&self) -> Option<Vec<String>> {
        match self {
            ChoiceFunctionSpec::PreferenceList { list } if self.is_singleton_list() => {
                Some(list.iter().filter_map(|s| s.iter().next().cloned()).collect())
            }
            _ => None,
        }
    }
}

/// A two-sided market.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingMarket {
    pub firms: Vec<String>,
    pub workers: Vec<String>,
    /// Agents without an entry choose nothing.
    pub choice: BTreeMap<String, ChoiceFunctionSpec>,
}

static EMPTY_SPEC: ChoiceFunctionSpec = ChoiceFunctionSpec::PreferenceList { list: Vec::new() };

/// A set of firm-worker pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: BTreeSet<Pair>,
}

impl Matching {
    pub fn new<I, F, W>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (F, W)>,
        F: Into<String>,
        W: Into<String>,
    {
        Matching {
            pairs: pairs.into_iter().map(|(f, w)| (f.into(), w.into())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, f: &str, w: &str) -> bool {
        self.pairs.contains(&(f.to_string(), w.to_string()))
    }

    /// Workers matched to firm `f`.
    pub fn of_firm(&self, f: &str) -> BTreeSet<String> {
        self.pairs
            .iter()
            .filter(|(a, _)| a == f)
            .map(|(_, w)| w.clone())
            .collect()
    }

    /// Firms matched to worker `w`.
    pub fn of_worker(&self, w: &str) -> BTreeSet<String> {
        self.pairs
            .iter()
            .filter(|(_, b)| b == w)
            .map(|(f, _)| f.clone())
            .collect()
    }
}

/// Outcome of [`blair_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlairOrder {
    Equal,
    Greater,
    Less,
    Incomparable,
}

impl MatchingMarket {
    pub fn new(firms: Vec<String>, workers: Vec<String>) -> Self {
        MatchingMarket {
            firms,
            workers,
            choice: BTreeMap::new(),
        }
    }

    pub fn agent_count(&self) -> usize {
        self.firms.len() + self.workers.len()
    }

    pub fn is_firm(&self, id: &str) -> bool {
        self.firms.iter().any(|f| f == id)
    }

    pub fn is_worker(&self, id: &str) -> bool {
        self.workers.iter().any(|w| w == id)
    }

    /// The spec of `agent` (an empty list when none is recorded).
    pub fn spec(&self, agent: &str) -> &ChoiceFunctionSpec {
        self.choice.get(agent).unwrap_or(&EMPTY_SPEC)
    }

    /// Checks agent declarations and that every spec only references agents of
    /// the opposite side with a family suited to its side.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for id in self.firms.iter().chain(&self.workers) {
            if !seen.insert(id) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let firms: BTreeSet<&String> = self.firms.iter().collect();
        let workers: BTreeSet<&String> = self.workers.iter().collect();
        for (agent, spec) in &self.choice {
            let is_firm = firms.contains(agent);
            if !is_firm && !workers.contains(agent) {
                return Err(Error::UnknownId {
                    id: agent.clone(),
                    context: "choice function owner".into(),
                });
            }
            let opposite = if is_firm { &workers } else { &firms };
            let bad = |reason: String| Error::InvalidSpec {
                agent: agent.clone(),
                reason,
            };
            let check = |id: &String| -> Result<()> {
                if opposite.contains(id) {
                    Ok(())
                } else {
                    Err(bad(format!("`{id}` is not an agent of the opposite side")))
                }
            };
            match spec {
                ChoiceFunctionSpec::PreferenceList { list } => {
                    for (i, s) in list.iter().enumerate() {
                        if s.is_empty() {
                            return Err(bad("empty preference-list entry".into()));
                        }
                        if list[..i].contains(s) {
                            return Err(bad("repeated preference-list entry".into()));
                        }
                        s.iter().try_for_each(check)?;
                    }
                }
                ChoiceFunctionSpec::Triggered {
                    watch,
                    trigger,
                    gamma,
                } => {
                    if is_firm {
                        return Err(bad("triggered choice functions belong to workers".into()));
                    }
                    watch.iter().try_for_each(check)?;
                    check(trigger)?;
                    gamma.f_rho.values().flatten().try_for_each(check)?;
                    for r in gamma.alpha.iter().flatten() {
                        if !gamma.f_rho.contains_key(r) {
                            return Err(bad(format!("rotation `{r}` has no firm set")));
                        }
                    }
                }
                ChoiceFunctionSpec::IfElse { priority, else_set } => {
                    if !is_firm {
                        return Err(bad("if-else choice functions belong to firms".into()));
                    }
                    check(priority)?;
                    else_set.iter().try_for_each(check)?;
                }
                ChoiceFunctionSpec::Regular { tiers, aux_pairs } => {
                    if !is_firm {
                        return Err(bad("regular choice functions belong to firms".into()));
                    }
                    let mut in_tiers = BTreeSet::new();
                    for w in tiers.iter().flatten() {
                        check(w)?;
                        if !in_tiers.insert(w) {
                            return Err(bad(format!("`{w}` appears in two tiers")));
                        }
                    }
                    let mut aux_seen = BTreeSet::new();
                    for (anchor, aux) in aux_pairs {
                        if !in_tiers.contains(anchor) {
                            return Err(bad(format!("anchor `{anchor}` lies in no tier")));
                        }
                        check(aux)?;
                        if !aux_seen.insert(aux) {
                            return Err(bad(format!("`{aux}` appears in two auxiliary pairs")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `C_agent(t)`, rejecting partners that are not agents of the opposite side.
    pub fn choose(&self, agent: &str, t: &BTreeSet<String>) -> Result<BTreeSet<String>> {
        let is_firm = self.is_firm(agent);
        if !is_firm && !self.is_worker(agent) {
            return Err(Error::UnknownId {
                id: agent.to_string(),
                context: "agent".into(),
            });
        }
        for p in t {
            let ok = if is_firm { self.is_worker(p) } else { self.is_firm(p) };
            if !ok {
                return Err(Error::UnknownPartnerId {
                    agent: agent.to_string(),
                    partner: p.clone(),
                });
            }
        }
        Ok(self.spec(agent).choose(t))
    }

    /// The partners of `agent` under `mu`.
    pub fn partners(&self, mu: &Matching, agent: &str) -> BTreeSet<String> {
        if self.is_firm(agent) {
            mu.of_firm(agent)
        } else {
            mu.of_worker(agent)
        }
    }

    fn check_matching(&self, mu: &Matching) -> Result<()> {
        for (f, w) in &mu.pairs {
            if !self.is_firm(f) || !self.is_worker(w) {
                return Err(Error::UnknownId {
                    id: format!("({f}, {w})"),
                    context: "matching pair".into(),
                });
            }
        }
        Ok(())
    }
}

/// Returns the first agent (firms, then workers) that rejects part of its
/// assignment, or `None` when `mu` is individually rational.
pub fn individual_rationality_witness(m: &MatchingMarket, mu: &Matching) -> Result<Option<String>> {
    m.check_matching(mu)?;
    for a in m.firms.iter().chain(&m.workers) {
        let assigned = m.partners(mu, a);
        if m.spec(a).choose(&assigned) != assigned {
            return Ok(Some(a.clone()));
        }
    }
    Ok(None)
}

/// `C_a(μ(a)) = μ(a)` for every agent.
pub fn is_individually_rational(m: &MatchingMarket, mu: &Matching) -> Result<bool> {
    Ok(individual_rationality_witness(m, mu)?.is_none())
}

/// Pairs outside `mu` in which each side demands the other.
pub fn blocking_pairs(m: &MatchingMarket, mu: &Matching) -> Result<Vec<Pair>> {
    m.check_matching(mu)?;
    let c = CompiledMarket::new(m)?;
    let cm = c.encode(mu);
    Ok(c
        .blocking_pairs(&cm)
        .into_iter()
        .map(|(f, w)| (c.firms[f].clone(), c.workers[w].clone()))
        .collect())
}

/// Individually rational with no blocking pair.
pub fn is_stable(m: &MatchingMarket, mu: &Matching) -> Result<bool> {
    m.check_matching(mu)?;
    let c = CompiledMarket::new(m)?;
    Ok(c.is_stable(&c.encode(mu)))
}

/// Blair order: `μ ⪰ μ'` iff every firm chooses `μ(f)` from `μ(f) ∪ μ'(f)`.
pub fn blair_compare(m: &MatchingMarket, mu: &Matching, nu: &Matching) -> Result<BlairOrder> {
    m.check_matching(mu)?;
    m.check_matching(nu)?;
    if mu == nu {
        return Ok(BlairOrder::Equal);
    }
    let c = CompiledMarket::new(m)?;
    let (a, b) = (c.encode(mu), c.encode(nu));
    Ok(match (c.firm_prefers(&a, &b), c.firm_prefers(&b, &a)) {
        (true, false) => BlairOrder::Greater,
        (false, true) => BlairOrder::Less,
        (true, true) => BlairOrder::Equal,
        (false, false) => BlairOrder::Incomparable,
    })
}

/// Stable matchings together with the lattice of their Blair order.
/// Lattice element `m<i>` (zero-padded) is `matchings[i]`.
#[derive(Debug, Clone)]
pub struct StableLattice {
    pub matchings: Vec<Matching>,
    pub lattice: Lattice,
}

impl StableLattice {
    /// The lattice element id of `matchings[i]`.
    pub fn id(&self, i: usize) -> String {
        matching_id(i, self.matchings.len())
    }

    pub fn index_of(&self, mu: &Matching) -> Option<usize> {
        self.matchings.binary_search(mu).ok()
    }
}

/// `true` when every worker chooses its `mu`-assignment from the union with
/// its `nu`-assignment.
pub fn workers_prefer(m: &MatchingMarket, mu: &Matching, nu: &Matching) -> Result<bool> {
    m.check_matching(mu)?;
    m.check_matching(nu)?;
    let c = CompiledMarket::new(m)?;
    Ok(c.worker_prefers(&c.encode(mu), &c.encode(nu)))
}

/// Zero-padded lattice id for the `i`-th of `n` matchings.
pub fn matching_id(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("m{i:0width$}")
}

/// Builds the Blair order over a canonical list of stable matchings.
pub fn blair_lattice(m: &MatchingMarket, matchings: Vec<Matching>) -> Result<StableLattice> {
    let c = CompiledMarket::new(m)?;
    let enc: Vec<_> = matchings.iter().map(|mu| c.encode(mu)).collect();
    let n = matchings.len();
    let ids: Vec<String> = (0..n).map(|i| matching_id(i, n)).collect();
    let rel: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || c.firm_prefers(&enc[j], &enc[i])).collect())
        .collect();
    let poset = validate_poset(&ids, &rel).map_err(|e| Error::NonLatticeStructure(e.to_string()))?;
    let lattice = lattice_from_order(&poset).map_err(|e| Error::NonLatticeStructure(e.to_string()))?;
    Ok(StableLattice { matchings, lattice })
}

/// Enumerates the stable matchings and orders them by the Blair order.
pub fn stable_lattice(m: &MatchingMarket, node_bound: u64) -> Result<StableLattice> {
    let all = enumerate_stable(m, node_bound)?;
    blair_lattice(m, all)
}
