//! Cumulative-offer deferred acceptance with simultaneous rounds.

use serde::{Deserialize, Serialize};

use super::compiled::{CChoice, CompiledMarket};
use super::{Matching, MatchingMarket};
use crate::error::{Error, Result};

/// The proposing side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Firms,
    Workers,
}

/// Runs deferred acceptance. Each proposer offers to its choice among the
/// receivers that have not rejected it; each receiver keeps its choice among
/// the current offers and permanently rejects the rest. Stops when a round
/// produces no rejection. Fails after `4·|F|·|W|` rounds.
pub fn deferred_acceptance(m: &MatchingMarket, proposing: Side) -> Result<Matching> {
    let c = CompiledMarket::new(m)?;
    let pairs = run(&c, proposing)?;
    Ok(c.decode_pairs(&pairs))
}

pub(crate) fn run(c: &CompiledMarket, proposing: Side) -> Result<Vec<(usize, usize)>> {
    let (pch, pcand, rch): (&[CChoice], &[Vec<usize>], &[CChoice]) = match proposing {
        Side::Firms => (&c.fch, &c.f_choosable, &c.wch),
        Side::Workers => (&c.wch, &c.w_choosable, &c.fch),
    };
    let n_recv = rch.len();
    let cap = (4 * c.firms.len() * c.workers.len()).max(1);
    let mut rejected: Vec<Vec<bool>> = vec![vec![false; n_recv]; pch.len()];
    for round in 0.. {
        if round > cap {
            return Err(Error::NonConvergence { rounds: cap });
        }
        let mut offers: Vec<Vec<usize>> = vec![Vec::new(); n_recv];
        for (p, ch) in pch.iter().enumerate() {
            let avail: Vec<usize> = pcand[p]
                .iter()
                .copied()
                .filter(|&r| !rejected[p][r])
                .collect();
            for r in ch.choose(&avail) {
                offers[r].push(p);
            }
        }
        let mut any = false;
        let mut held = Vec::new();
        for (r, offered) in offers.iter().enumerate() {
            let keep = rch[r].choose(offered);
            for &p in offered {
                if keep.binary_search(&p).is_ok() {
                    held.push((p, r));
                } else {
                    rejected[p][r] = true;
                    any = true;
                }
            }
        }
        if !any {
            let mut pairs: Vec<(usize, usize)> = match proposing {
                Side::Firms => held,
                Side::Workers => held.into_iter().map(|(w, f)| (f, w)).collect(),
            };
            pairs.sort_unstable();
            return Ok(pairs);
        }
    }
    unreachable!("the round loop only exits by returning")
}
