//! Verification of substitutability and consistency.
//!
//! Both properties reduce to one-element steps: for every offer `S` and every
//! `b ∈ S`,
//! * substitutability: `C(S) ∖ {b} ⊆ C(S ∖ {b})`;
//! * consistency: `b ∉ C(S)` implies `C(S ∖ {b}) = C(S)`.
//!
//! Exhaustive mode checks every subset of the universe. Choice functions of
//! the triggered, if-else and regular families treat certain partners as
//! interchangeable clones: the output contains all offered members of such a
//! class or none, and depends on the offer only through which classes are
//! present. Path independence then holds on the full universe iff it holds on
//! one representative per class, so for those families the exhaustive check
//! runs over class representatives ("quotient" mode). Universes that remain
//! too large are sampled.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::ChoiceFunctionSpec;

/// How the check was carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PiMode {
    /// Every subset of the relevant universe.
    Exhaustive,
    /// Every subset of one representative per clone class.
    Quotient,
    /// Random subsets.
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct PiReport {
    pub mode: PiMode,
    pub universe: usize,
    pub classes: usize,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum PiViolation {
    #[error("choice from {set:?} is {chosen:?}, not a subset of the offer")]
    NotSubset {
        set: Vec<String>,
        chosen: Vec<String>,
    },
    #[error("substitutability: `{lost}` is chosen from {set:?} but not after removing `{removed}`")]
    Substitutability {
        set: Vec<String>,
        removed: String,
        lost: String,
    },
    #[error("consistency: removing rejected `{removed}` from {set:?} changes the choice from {before:?} to {after:?}")]
    Consistency {
        set: Vec<String>,
        removed: String,
        before: Vec<String>,
        after: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct PiConfig {
    /// Largest universe (after clone reduction) checked exhaustively.
    pub exhaustive_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for PiConfig {
    fn default() -> Self {
        PiConfig {
            exhaustive_limit: 16,
            samples: 20_000,
            seed: 0,
        }
    }
}

/// Partition of `universe` into clone classes for `spec` (singletons when the
/// family gives no structure).
pub fn clone_classes(spec: &ChoiceFunctionSpec, universe: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let mut groups: Vec<BTreeSet<String>> = Vec::new();
    match spec {
        ChoiceFunctionSpec::PreferenceList { .. } => {}
        ChoiceFunctionSpec::Triggered {
            watch,
            trigger,
            gamma,
        } => {
            let mut owner: BTreeMap<&String, usize> = BTreeMap::new();
            let mut shared = BTreeSet::new();
            for fs in gamma.f_rho.values() {
                for f in fs {
                    if owner.insert(f, 0).is_some() {
                        shared.insert(f.clone());
                    }
                }
            }
            for fs in gamma.f_rho.values() {
                if fs.is_subset(watch) && fs.is_disjoint(&shared) && !fs.contains(trigger) {
                    groups.push(fs.clone());
                }
            }
            let plain: BTreeSet<String> = watch
                .iter()
                .filter(|f| !owner.contains_key(f) && *f != trigger)
                .cloned()
                .collect();
            groups.push(plain);
        }
        ChoiceFunctionSpec::IfElse { priority, else_set } => {
            let mut rest = else_set.clone();
            rest.remove(priority);
            groups.push(rest);
        }
        ChoiceFunctionSpec::Regular { tiers, aux_pairs } => {
            let aux: BTreeSet<&String> = aux_pairs.iter().map(|(_, a)| a).collect();
            let tiered: BTreeSet<&String> = tiers.iter().flatten().collect();
            for tier in tiers {
                groups.push(tier.iter().filter(|w| !aux.contains(w)).cloned().collect());
            }
            let mut by_anchor_tier: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
            for (anchor, a) in aux_pairs {
                if tiered.contains(a) {
                    continue;
                }
                if let Some(t) = tiers.iter().position(|tier| tier.contains(anchor)) {
                    by_anchor_tier.entry(t).or_default().insert(a.clone());
                }
            }
            groups.extend(by_anchor_tier.into_values());
        }
    }
    let mut covered = BTreeSet::new();
    let mut classes = Vec::new();
    for g in groups {
        let g: BTreeSet<String> = g
            .into_iter()
            .filter(|x| universe.contains(x) && !covered.contains(x))
            .collect();
        if !g.is_empty() {
            covered.extend(g.iter().cloned());
            classes.push(g);
        }
    }
    for x in universe {
        if !covered.contains(x) {
            classes.push(BTreeSet::from([x.clone()]));
        }
    }
    classes.sort();
    classes
}

/// Checks `spec` over `universe` (normally its relevant universe).
pub fn check_path_independence(
    spec: &ChoiceFunctionSpec,
    universe: &BTreeSet<String>,
    cfg: &PiConfig,
) -> Result<PiReport, PiViolation> {
    let classes = clone_classes(spec, universe);
    let choose = |t: &BTreeSet<String>| spec.choose(t);
    if universe.len() <= cfg.exhaustive_limit {
        let u: Vec<String> = universe.iter().cloned().collect();
        let checked = exhaustive(&u, &choose)?;
        return Ok(PiReport {
            mode: PiMode::Exhaustive,
            universe: universe.len(),
            classes: classes.len(),
            checked,
        });
    }
    if classes.len() <= cfg.exhaustive_limit {
        let reps: Vec<String> = classes
            .iter()
            .map(|c| c.iter().next().expect("nonempty class").clone())
            .collect();
        let checked = exhaustive(&reps, &choose)?;
        return Ok(PiReport {
            mode: PiMode::Quotient,
            universe: universe.len(),
            classes: classes.len(),
            checked,
        });
    }
    let u: Vec<String> = universe.iter().cloned().collect();
    let checked = sampled(&u, &choose, cfg)?;
    Ok(PiReport {
        mode: PiMode::Sampled,
        universe: universe.len(),
        classes: classes.len(),
        checked,
    })
}

/// Checks an arbitrary choice function over `universe`: exhaustively when
/// `|universe| ≤ exhaustive_limit`, by sampling otherwise.
pub fn check_choice_fn(
    universe: &[String],
    choose: impl Fn(&BTreeSet<String>) -> BTreeSet<String>,
    cfg: &PiConfig,
) -> Result<PiReport, PiViolation> {
    let (mode, checked) = if universe.len() <= cfg.exhaustive_limit {
        (PiMode::Exhaustive, exhaustive(universe, &choose)?)
    } else {
        (PiMode::Sampled, sampled(universe, &choose, cfg)?)
    };
    Ok(PiReport {
        mode,
        universe: universe.len(),
        classes: universe.len(),
        checked,
    })
}

fn to_set(u: &[String], mask: u64) -> BTreeSet<String> {
    (0..u.len())
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| u[i].clone())
        .collect()
}

fn to_mask(u: &[String], s: &BTreeSet<String>) -> Option<u64> {
    let mut m = 0;
    for x in s {
        m |= 1 << u.iter().position(|y| y == x)?;
    }
    Some(m)
}

fn names(u: &[String], mask: u64) -> Vec<String> {
    to_set(u, mask).into_iter().collect()
}

fn exhaustive(
    u: &[String],
    choose: &impl Fn(&BTreeSet<String>) -> BTreeSet<String>,
) -> Result<usize, PiViolation> {
    let n = u.len();
    assert!(n < 32, "exhaustive path-independence checks need a small universe");
    let total = 1u64 << n;
    let mut table = Vec::with_capacity(total as usize);
    for s in 0..total {
        let chosen = choose(&to_set(u, s));
        match to_mask(u, &chosen) {
            Some(c) if c & !s == 0 => table.push(c),
            _ => {
                return Err(PiViolation::NotSubset {
                    set: names(u, s),
                    chosen: chosen.into_iter().collect(),
                })
            }
        }
    }
    for s in 0..total {
        let cs = table[s as usize];
        for b in 0..n {
            if s >> b & 1 == 0 {
                continue;
            }
            let t = s & !(1 << b);
            check_step(u, s, b, cs, table[t as usize])?;
        }
    }
    Ok(total as usize)
}

fn check_step(u: &[String], s: u64, b: usize, cs: u64, ct: u64) -> Result<(), PiViolation> {
    let kept = cs & !(1 << b);
    if kept & !ct != 0 {
        let lost = (0..u.len()).find(|&i| (kept & !ct) >> i & 1 == 1).unwrap();
        return Err(PiViolation::Substitutability {
            set: names(u, s),
            removed: u[b].clone(),
            lost: u[lost].clone(),
        });
    }
    if cs >> b & 1 == 0 && ct != cs {
        return Err(PiViolation::Consistency {
            set: names(u, s),
            removed: u[b].clone(),
            before: names(u, cs),
            after: names(u, ct),
        });
    }
    Ok(())
}

fn sampled(
    u: &[String],
    choose: &impl Fn(&BTreeSet<String>) -> BTreeSet<String>,
    cfg: &PiConfig,
) -> Result<usize, PiViolation> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.samples {
        let s: BTreeSet<String> = u.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let chosen = choose(&s);
        if !chosen.is_subset(&s) {
            return Err(PiViolation::NotSubset {
                set: s.into_iter().collect(),
                chosen: chosen.into_iter().collect(),
            });
        }
        if s.is_empty() {
            continue;
        }
        let b = s.iter().nth(rng.gen_range(0..s.len())).unwrap().clone();
        let mut t = s.clone();
        t.remove(&b);
        let after = choose(&t);
        if let Some(lost) = chosen.iter().find(|x| **x != b && !after.contains(*x)) {
            return Err(PiViolation::Substitutability {
                set: s.iter().cloned().collect(),
                removed: b,
                lost: lost.clone(),
            });
        }
        if !chosen.contains(&b) && after != chosen {
            return Err(PiViolation::Consistency {
                set: s.into_iter().collect(),
                removed: b,
                before: chosen.into_iter().collect(),
                after: after.into_iter().collect(),
            });
        }
    }
    Ok(cfg.samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn broken_choice_yields_substitutability_witness() {
        let u = vec!["a".to_string(), "b".to_string()];
        let broken = |t: &BTreeSet<String>| {
            if t.len() == 2 {
                set(&["a"])
            } else {
                BTreeSet::new()
            }
        };
        match check_choice_fn(&u, broken, &PiConfig::default()) {
            Err(PiViolation::Substitutability { lost, .. }) => assert_eq!(lost, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn responsive_list_passes() {
        let spec = ChoiceFunctionSpec::PreferenceList {
            list: vec![set(&["w1", "w2"]), set(&["w1"]), set(&["w2"])],
        };
        let r = check_path_independence(&spec, &spec.relevant_universe(), &PiConfig::default())
            .unwrap();
        assert_eq!(r.mode, PiMode::Exhaustive);
    }

    #[test]
    fn non_responsive_list_fails() {
        let spec = ChoiceFunctionSpec::PreferenceList {
            list: vec![set(&["a", "b"]), set(&["c"]), set(&["a"])],
        };
        assert!(check_path_independence(&spec, &spec.relevant_universe(), &PiConfig::default())
            .is_err());
    }

    #[test]
    fn large_regular_uses_quotient() {
        let tiers: Vec<BTreeSet<String>> = (0..3)
            .map(|t| (0..8).map(|k| format!("w{t}_{k}")).collect())
            .collect();
        let aux_pairs = (0..6)
            .map(|k| (format!("w{}_0", k % 3), format!("x{k}")))
            .collect();
        let spec = ChoiceFunctionSpec::Regular { tiers, aux_pairs };
        let r = check_path_independence(&spec, &spec.relevant_universe(), &PiConfig::default())
            .unwrap();
        assert_eq!(r.mode, PiMode::Quotient);
        assert_eq!(r.classes, 6);
    }
}
