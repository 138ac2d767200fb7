//! Index-based form of a market used by the hot loops (stability checks,
//! deferred acceptance, enumeration). Partner sets are sorted index vectors.

use std::collections::HashMap;

use super::{ChoiceFunctionSpec, Matching, MatchingMarket};
use crate::error::Result;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) enum CChoice {
    List(Vec<Vec<usize>>),
    Triggered {
        watch: Vec<bool>,
        trigger: usize,
        groups: Vec<Vec<usize>>,
        rho_firms: Vec<Vec<usize>>,
    },
    IfElse {
        priority: usize,
        else_set: Vec<bool>,
    },
    Regular {
        tier_of: Vec<u32>,
        aux_tier: Vec<u32>,
    },
}

fn contains(sorted: &[usize], x: usize) -> bool {
    sorted.binary_search(&x).is_ok()
}

impl CChoice {
    fn compile(spec: &ChoiceFunctionSpec, opposite: &HashMap<String, usize>) -> CChoice {
        let n = opposite.len();
        let ix = |id: &String| opposite[id];
        match spec {
            ChoiceFunctionSpec::PreferenceList { list } => CChoice::List(
                list.iter()
                    .map(|s| {
                        let mut v: Vec<usize> = s.iter().map(ix).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect(),
            ),
            ChoiceFunctionSpec::Triggered {
                watch,
                trigger,
                gamma,
            } => {
                let mut w = vec![false; n];
                for f in watch {
                    w[ix(f)] = true;
                }
                let rho_ids: Vec<&String> = gamma.f_rho.keys().collect();
                let rho_firms = gamma
                    .f_rho
                    .values()
                    .map(|fs| {
                        let mut v: Vec<usize> = fs.iter().map(ix).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                let groups = gamma
                    .alpha
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|r| rho_ids.binary_search(&r).expect("validated rotation id"))
                            .collect()
                    })
                    .collect();
                CChoice::Triggered {
                    watch: w,
                    trigger: ix(trigger),
                    groups,
                    rho_firms,
                }
            }
            ChoiceFunctionSpec::IfElse { priority, else_set } => {
                let mut e = vec![false; n];
                for w in else_set {
                    e[ix(w)] = true;
                }
                CChoice::IfElse {
                    priority: ix(priority),
                    else_set: e,
                }
            }
            ChoiceFunctionSpec::Regular { tiers, aux_pairs } => {
                let mut tier_of = vec![NONE; n];
                for (i, tier) in tiers.iter().enumerate() {
                    for w in tier {
                        tier_of[ix(w)] = i as u32;
                    }
                }
                let mut aux_tier = vec![NONE; n];
                for (anchor, aux) in aux_pairs {
                    aux_tier[ix(aux)] = tier_of[ix(anchor)];
                }
                CChoice::Regular { tier_of, aux_tier }
            }
        }
    }

    /// Applies the choice function to a sorted offer; returns a sorted subset.
    pub(crate) fn choose(&self, t: &[usize]) -> Vec<usize> {
        match self {
            CChoice::List(list) => list
                .iter()
                .find(|s| s.iter().all(|&x| contains(t, x)))
                .cloned()
                .unwrap_or_default(),
            CChoice::Triggered {
                watch,
                trigger,
                groups,
                rho_firms,
            } => {
                let mut out: Vec<usize> = t.iter().copied().filter(|&f| watch[f]).collect();
                if !watch[*trigger] && contains(t, *trigger) {
                    let fires = groups.iter().all(|g| {
                        g.iter()
                            .any(|&r| rho_firms[r].iter().all(|&f| !contains(t, f)))
                    });
                    if fires {
                        let pos = out.binary_search(trigger).unwrap_err();
                        out.insert(pos, *trigger);
                    }
                }
                out
            }
            CChoice::IfElse { priority, else_set } => {
                if contains(t, *priority) {
                    vec![*priority]
                } else {
                    t.iter().copied().filter(|&w| else_set[w]).collect()
                }
            }
            CChoice::Regular { tier_of, aux_tier } => {
                let best = t.iter().map(|&w| tier_of[w]).min().unwrap_or(NONE);
                t.iter()
                    .copied()
                    .filter(|&w| {
                        (best != NONE && tier_of[w] == best)
                            || (aux_tier[w] != NONE && (best == NONE || aux_tier[w] <= best))
                    })
                    .collect()
            }
        }
    }
}

/// A matching as per-agent sorted partner lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Encoded {
    pub firm: Vec<Vec<usize>>,
    pub worker: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledMarket {
    pub firms: Vec<String>,
    pub workers: Vec<String>,
    pub fidx: HashMap<String, usize>,
    pub widx: HashMap<String, usize>,
    pub fch: Vec<CChoice>,
    pub wch: Vec<CChoice>,
    /// Partners each firm can ever choose, sorted.
    pub f_choosable: Vec<Vec<usize>>,
    /// Partners each worker can ever choose, sorted.
    pub w_choosable: Vec<Vec<usize>>,
}

pub(crate) fn with_added(v: &[usize], x: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    if let Err(p) = out.binary_search(&x) {
        out.insert(p, x);
    }
    out
}

pub(crate) fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

impl CompiledMarket {
    pub(crate) fn new(m: &MatchingMarket) -> Result<CompiledMarket> {
        m.validate()?;
        let fidx: HashMap<String, usize> = m
            .firms
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        let widx: HashMap<String, usize> = m
            .workers
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let build = |agents: &[String], opp: &HashMap<String, usize>| {
            let ch: Vec<CChoice> = agents
                .iter()
                .map(|a| CChoice::compile(m.spec(a), opp))
                .collect();
            let choosable: Vec<Vec<usize>> = agents
                .iter()
                .map(|a| {
                    let mut v: Vec<usize> = m.spec(a).choosable().iter().map(|p| opp[p]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            (ch, choosable)
        };
        let (fch, f_choosable) = build(&m.firms, &widx);
        let (wch, w_choosable) = build(&m.workers, &fidx);
        Ok(CompiledMarket {
            firms: m.firms.clone(),
            workers: m.workers.clone(),
            fidx,
            widx,
            fch,
            wch,
            f_choosable,
            w_choosable,
        })
    }

    /// Encodes a matching whose ids were already checked against the market.
    pub(crate) fn encode(&self, mu: &Matching) -> Encoded {
        let mut firm = vec![Vec::new(); self.firms.len()];
        let mut worker = vec![Vec::new(); self.workers.len()];
        for (f, w) in &mu.pairs {
            let (i, j) = (self.fidx[f], self.widx[w]);
            firm[i].push(j);
            worker[j].push(i);
        }
        firm.iter_mut().for_each(|v| v.sort_unstable());
        worker.iter_mut().for_each(|v| v.sort_unstable());
        Encoded { firm, worker }
    }

    pub(crate) fn encode_pairs(&self, pairs: &[(usize, usize)]) -> Encoded {
        let mut firm = vec![Vec::new(); self.firms.len()];
        let mut worker = vec![Vec::new(); self.workers.len()];
        for &(i, j) in pairs {
            firm[i].push(j);
            worker[j].push(i);
        }
        firm.iter_mut().for_each(|v| v.sort_unstable());
        worker.iter_mut().for_each(|v| v.sort_unstable());
        Encoded { firm, worker }
    }

    pub(crate) fn decode_pairs(&self, pairs: &[(usize, usize)]) -> Matching {
        Matching {
            pairs: pairs
                .iter()
                .map(|&(i, j)| (self.firms[i].clone(), self.workers[j].clone()))
                .collect(),
        }
    }

    pub(crate) fn is_individually_rational(&self, e: &Encoded) -> bool {
        e.firm
            .iter()
            .enumerate()
            .all(|(i, s)| self.fch[i].choose(s) == *s)
            && e
                .worker
                .iter()
                .enumerate()
                .all(|(j, s)| self.wch[j].choose(s) == *s)
    }

    pub(crate) fn blocking_pairs(&self, e: &Encoded) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, cand) in self.f_choosable.iter().enumerate() {
            for &j in cand {
                if contains(&e.firm[i], j) || !contains(&self.w_choosable[j], i) {
                    continue;
                }
                if contains(&self.fch[i].choose(&with_added(&e.firm[i], j)), j)
                    && contains(&self.wch[j].choose(&with_added(&e.worker[j], i)), i)
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub(crate) fn has_blocking_pair(&self, e: &Encoded) -> bool {
        self.f_choosable.iter().enumerate().any(|(i, cand)| {
            cand.iter().any(|&j| {
                !contains(&e.firm[i], j)
                    && contains(&self.w_choosable[j], i)
                    && contains(&self.fch[i].choose(&with_added(&e.firm[i], j)), j)
                    && contains(&self.wch[j].choose(&with_added(&e.worker[j], i)), i)
            })
        })
    }

    pub(crate) fn is_stable(&self, e: &Encoded) -> bool {
        self.is_individually_rational(e) && !self.has_blocking_pair(e)
    }

    /// Every firm chooses its `a`-assignment from the union with its `b`-assignment.
    pub(crate) fn firm_prefers(&self, a: &Encoded, b: &Encoded) -> bool {
        (0..self.firms.len())
            .all(|i| self.fch[i].choose(&sorted_union(&a.firm[i], &b.firm[i])) == a.firm[i])
    }

    /// Every worker chooses its `a`-assignment from the union with its `b`-assignment.
    pub(crate) fn worker_prefers(&self, a: &Encoded, b: &Encoded) -> bool {
        (0..self.workers.len())
            .all(|j| self.wch[j].choose(&sorted_union(&a.worker[j], &b.worker[j])) == a.worker[j])
    }
}
