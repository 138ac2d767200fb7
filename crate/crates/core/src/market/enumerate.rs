//! Exhaustive enumeration of stable matchings.
//!
//! Contracts are the firm-worker pairs each side could ever choose. For a set
//! `A` of contracts available to firms, let
//! `G(A) = E ∖ R_W(E ∖ R_F(A))`, where `R_F`/`R_W` collect the contracts each
//! side rejects. With path-independent choice functions `G` is monotone, and
//! every stable matching equals `C_F(A)` for some fixed point `A = G(A)`
//! (and conversely). The search walks intervals `[L, U]` known to contain all
//! remaining fixed points, tightening them with `L ← L ∪ G(L)` and
//! `U ← U ∩ G(U)` and branching on one undecided contract. Every candidate
//! found is re-checked for stability before it is reported.

use std::collections::BTreeSet;

use super::compiled::CompiledMarket;
use super::{Matching, MatchingMarket};
use crate::error::{Error, Result};

/// Default bound on explored search nodes.
pub const DEFAULT_NODE_BOUND: u64 = 1_000_000_000;

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Bits {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn union(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }

    fn intersect(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn minus(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

struct Contracts<'a> {
    c: &'a CompiledMarket,
    /// Contract `k` is `pairs[k] = (firm, worker)`.
    pairs: Vec<(usize, usize)>,
    /// Per firm: its contracts, sorted by worker.
    by_firm: Vec<Vec<usize>>,
    /// Per worker: its contracts, sorted by firm.
    by_worker: Vec<Vec<usize>>,
    all: Bits,
}

impl<'a> Contracts<'a> {
    fn new(c: &'a CompiledMarket) -> Contracts<'a> {
        let mut pairs = Vec::new();
        for (f, cand) in c.f_choosable.iter().enumerate() {
            for &w in cand {
                if c.w_choosable[w].binary_search(&f).is_ok() {
                    pairs.push((f, w));
                }
            }
        }
        let mut by_firm = vec![Vec::new(); c.firms.len()];
        let mut by_worker = vec![Vec::new(); c.workers.len()];
        for (k, &(f, w)) in pairs.iter().enumerate() {
            by_firm[f].push(k);
            by_worker[w].push(k);
        }
        let all = Bits::full(pairs.len());
        Contracts {
            c,
            pairs,
            by_firm,
            by_worker,
            all,
        }
    }

    /// Contracts in `a` chosen by their firm (`firms = true`) or worker.
    fn chosen(&self, a: &Bits, firms: bool) -> Bits {
        let mut out = Bits::empty(self.pairs.len());
        let (groups, choices) = if firms {
            (&self.by_firm, &self.c.fch)
        } else {
            (&self.by_worker, &self.c.wch)
        };
        for (agent, ks) in groups.iter().enumerate() {
            let avail: Vec<usize> = ks.iter().copied().filter(|&k| a.contains(k)).collect();
            if avail.is_empty() {
                continue;
            }
            let partner = |k: usize| {
                if firms {
                    self.pairs[k].1
                } else {
                    self.pairs[k].0
                }
            };
            let offer: Vec<usize> = avail.iter().map(|&k| partner(k)).collect();
            let pick = choices[agent].choose(&offer);
            for &k in &avail {
                if pick.binary_search(&partner(k)).is_ok() {
                    out.insert(k);
                }
            }
        }
        out
    }

    fn step(&self, a: &Bits) -> Bits {
        let rf = a.minus(&self.chosen(a, true));
        let xw = self.all.minus(&rf);
        let rw = xw.minus(&self.chosen(&xw, false));
        self.all.minus(&rw)
    }
}

/// Returns every stable matching of `m`, sorted canonically. Fails with
/// `SearchBoundExceeded` after exploring `node_bound` search nodes.
pub fn enumerate_stable(m: &MatchingMarket, node_bound: u64) -> Result<Vec<Matching>> {
    let c = CompiledMarket::new(m)?;
    let found = enumerate_compiled(&c, node_bound)?;
    let mut out: Vec<Matching> = found.iter().map(|p| c.decode_pairs(p)).collect();
    out.sort();
    Ok(out)
}

/// Tightens `[lo, hi]` to `lo ← lo ∪ G(lo)`, `hi ← hi ∩ G(hi)` until stable.
/// Returns `false` when the interval becomes empty.
fn tighten(k: &Contracts, lo: &mut Bits, hi: &mut Bits) -> bool {
    loop {
        let nlo = lo.union(&k.step(lo));
        let nhi = hi.intersect(&k.step(hi));
        if !nlo.is_subset(&nhi) {
            return false;
        }
        if nlo == *lo && nhi == *hi {
            return true;
        }
        *lo = nlo;
        *hi = nhi;
    }
}

/// Settles undecided contracts whose inclusion (or exclusion) alone empties
/// the interval. Returns `false` when the interval itself is empty.
fn probe(k: &Contracts, lo: &mut Bits, hi: &mut Bits) -> bool {
    let n = k.pairs.len();
    let mut changed = true;
    while changed {
        changed = false;
        for e in 0..n {
            if !hi.contains(e) || lo.contains(e) {
                continue;
            }
            let (mut l1, mut h1) = (lo.clone(), hi.clone());
            l1.insert(e);
            if !tighten(k, &mut l1, &mut h1) {
                hi.remove(e);
                if !tighten(k, lo, hi) {
                    return false;
                }
                changed = true;
                continue;
            }
            let (mut l2, mut h2) = (lo.clone(), hi.clone());
            h2.remove(e);
            if !tighten(k, &mut l2, &mut h2) {
                *lo = l1;
                *hi = h1;
                changed = true;
            }
        }
    }
    true
}

pub(crate) fn enumerate_compiled(
    c: &CompiledMarket,
    node_bound: u64,
) -> Result<BTreeSet<Vec<(usize, usize)>>> {
    let k = Contracts::new(c);
    let n = k.pairs.len();
    let mut found = BTreeSet::new();
    let mut stack = vec![(Bits::empty(n), Bits::full(n))];
    let mut nodes: u64 = 0;
    while let Some((mut lo, mut hi)) = stack.pop() {
        nodes += 1;
        if nodes > node_bound {
            return Err(Error::SearchBoundExceeded { explored: nodes - 1 });
        }
        if !tighten(&k, &mut lo, &mut hi) || !probe(&k, &mut lo, &mut hi) {
            continue;
        }
        match hi.minus(&lo).first() {
            None => {
                if k.step(&lo) == lo {
                    let chosen = k.chosen(&lo, true);
                    let pairs: Vec<(usize, usize)> =
                        (0..n).filter(|&i| chosen.contains(i)).map(|i| k.pairs[i]).collect();
                    let enc = c.encode_pairs(&pairs);
                    if c.is_stable(&enc) {
                        found.insert(pairs);
                    }
                }
            }
            Some(e) => {
                let mut without = hi.clone();
                without.remove(e);
                let mut with = lo.clone();
                with.insert(e);
                stack.push((lo, without));
                stack.push((with, hi));
            }
        }
    }
    Ok(found)
}
