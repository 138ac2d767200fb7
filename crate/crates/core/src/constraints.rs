//! Join constraints and their complements over a representation poset.
//!
//! A join constraint reads "if α(T) then β(T)", where α is a conjunction of
//! disjunction groups and β a conjunction of indicator arguments. Empty
//! conjunctions evaluate to true and empty disjunctions to false.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{canonical_partial_rep, join_irreducibles, ElementSet, Lattice, Poset};

/// "If every group of `alpha_groups` meets T, then T contains all of `beta_ids`."
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JoinConstraint {
    #[serde(rename = "alpha")]
    pub alpha_groups: Vec<ElementSet>,
    #[serde(rename = "beta")]
    pub beta_ids: ElementSet,
}

/// "If T meets `beta_c_ids`, then T contains some group of `alpha_c_groups`."
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComplementJoinConstraint {
    #[serde(rename = "beta_c")]
    pub beta_c_ids: ElementSet,
    #[serde(rename = "alpha_c")]
    pub alpha_c_groups: Vec<ElementSet>,
}

/// Result of evaluating a join constraint on a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub alpha: bool,
    pub beta: bool,
    pub satisfied: bool,
}

fn canonical_groups(mut groups: Vec<ElementSet>) -> Vec<ElementSet> {
    groups.sort();
    groups.dedup();
    groups
}

impl JoinConstraint {
    /// Builds a constraint in canonical form (groups sorted and deduplicated).
    pub fn new(alpha_groups: Vec<ElementSet>, beta_ids: ElementSet) -> Self {
        JoinConstraint {
            alpha_groups: canonical_groups(alpha_groups),
            beta_ids,
        }
    }

    /// α as a conjunction of single arguments.
    pub fn conjunctive(alpha: ElementSet, beta: ElementSet) -> Self {
        JoinConstraint::new(
            alpha.into_iter().map(|a| BTreeSet::from([a])).collect(),
            beta,
        )
    }

    pub fn canonical(self) -> Self {
        JoinConstraint::new(self.alpha_groups, self.beta_ids)
    }

    /// All ids appearing in α.
    pub fn alpha_arguments(&self) -> ElementSet {
        self.alpha_groups.iter().flatten().cloned().collect()
    }

    /// All ids referenced by the constraint.
    pub fn arguments(&self) -> ElementSet {
        let mut all = self.alpha_arguments();
        all.extend(self.beta_ids.iter().cloned());
        all
    }

    pub fn alpha(&self, t: &ElementSet) -> bool {
        self.alpha_groups
            .iter()
            .all(|g| g.iter().any(|x| t.contains(x)))
    }

    pub fn beta(&self, t: &ElementSet) -> bool {
        self.beta_ids.iter().all(|x| t.contains(x))
    }

    /// Evaluates without checking ids against a poset.
    pub fn eval(&self, t: &ElementSet) -> Evaluation {
        let alpha = self.alpha(t);
        let beta = self.beta(t);
        Evaluation {
            alpha,
            beta,
            satisfied: !alpha || beta,
        }
    }

    pub fn is_satisfied(&self, t: &ElementSet) -> bool {
        !self.alpha(t) || self.beta(t)
    }
}

/// Evaluates `jc` on `t`, requiring every referenced id to belong to `rep`.
pub fn eval_join_constraint(jc: &JoinConstraint, t: &ElementSet, rep: &Poset) -> Result<Evaluation> {
    for id in jc.arguments().iter().chain(t.iter()) {
        if !rep.contains(id) {
            return Err(Error::UnknownId {
                id: id.clone(),
                context: "join constraint argument".into(),
            });
        }
    }
    Ok(jc.eval(t))
}

/// Confirms that the α arguments of `jc` form an antichain of `rep`.
pub fn validate_join_constraint(jc: &JoinConstraint, rep: &Poset) -> Result<()> {
    for id in jc.arguments() {
        if !rep.contains(&id) {
            return Err(Error::UnknownId {
                id,
                context: "join constraint argument".into(),
            });
        }
    }
    let args: Vec<String> = jc.alpha_arguments().into_iter().collect();
    for x in &args {
        for y in &args {
            if x != y && rep.leq_ids(x, y)? {
                return Err(Error::AlphaArgumentsComparable {
                    x: x.clone(),
                    y: y.clone(),
                });
            }
        }
    }
    Ok(())
}

/// One constraint per unordered pair `{x, y}`: α is the conjunction over the
/// maximal join-irreducibles below `x` or `y`, β the conjunction over those
/// below `x ∨ y`. The bottom/bottom pair (empty α) is dropped and exact
/// duplicates are removed; the result is sorted.
pub fn constraints_from_lattice(l: &Lattice) -> Result<Vec<JoinConstraint>> {
    let rep = canonical_partial_rep(l)?;
    let (_, xj) = join_irreducibles(l)?;
    let el = l.elements();
    let mut out = BTreeSet::new();
    for i in 0..el.len() {
        for j in i..el.len() {
            let union: ElementSet = rep[&el[i]].union(&rep[&el[j]]).cloned().collect();
            let alpha = xj.maximal_elements(&union)?;
            if alpha.is_empty() {
                continue;
            }
            let beta = rep[l.poset().id(l.join(i, j))].clone();
            out.insert(JoinConstraint::conjunctive(alpha, beta));
        }
    }
    Ok(out.into_iter().collect())
}

/// Keeps the sets satisfying every constraint, preserving order.
pub fn filter_lower_sets(d: &[ElementSet], omega: &[JoinConstraint]) -> Vec<ElementSet> {
    d.iter()
        .filter(|t| omega.iter().all(|c| c.is_satisfied(t)))
        .cloned()
        .collect()
}

/// De Morgan dual: β^c is the disjunction of β's ids, α^c the disjunction over
/// α's groups of the conjunction within each group.
pub fn complement(jc: &JoinConstraint) -> ComplementJoinConstraint {
    ComplementJoinConstraint {
        beta_c_ids: jc.beta_ids.clone(),
        alpha_c_groups: canonical_groups(jc.alpha_groups.clone()),
    }
}

/// Inverse of [`complement`].
pub fn uncomplement(cjc: &ComplementJoinConstraint) -> JoinConstraint {
    JoinConstraint::new(cjc.alpha_c_groups.clone(), cjc.beta_c_ids.clone())
}

impl ComplementJoinConstraint {
    pub fn new(beta_c_ids: ElementSet, alpha_c_groups: Vec<ElementSet>) -> Self {
        ComplementJoinConstraint {
            beta_c_ids,
            alpha_c_groups: canonical_groups(alpha_c_groups),
        }
    }

    pub fn beta_c(&self, t: &ElementSet) -> bool {
        self.beta_c_ids.iter().any(|x| t.contains(x))
    }

    pub fn alpha_c(&self, t: &ElementSet) -> bool {
        self.alpha_c_groups
            .iter()
            .any(|g| g.iter().all(|x| t.contains(x)))
    }
}

/// `¬β^c(T) ∨ α^c(T)`.
pub fn satisfies_complement(t: &ElementSet, cjc: &ComplementJoinConstraint) -> bool {
    !cjc.beta_c(t) || cjc.alpha_c(t)
}
