//! Acceptance suite: one pass/fail line per criterion, each with its own
//! runtime limit. Reference data is transcribed here rather than taken from
//! the library's fixtures, and results are cross-checked with the brute-force
//! oracles in `common`.
//!
//! Run with `cargo test -p stable-lattice --test acceptance -- --nocapture`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use stable_lattice::antimatroid::{
    antimatroid_constraints, compute_path_poset, endpoints, family_from_path_poset, filter_subsets,
    independent_set_antimatroid, min_cost_stable, reduce_to_matching, validate_antimatroid, AntimatroidFamily,
    GroundCosts, Rational, Sense,
};
use stable_lattice::augment::{augment, derive_sets, project_xi, synthesize_from_lattice, ExtendableMarket};
use stable_lattice::constraints::{constraints_from_lattice, filter_lower_sets, JoinConstraint};
use stable_lattice::generate;
use stable_lattice::market::path_independence::{check_path_independence, PiConfig, PiMode};
use stable_lattice::market::{
    deferred_acceptance, enumerate_stable, ChoiceFunctionSpec, Side, Matching, MatchingMarket, DEFAULT_NODE_BOUND};
use stable_lattice::order::{
    canonical_partial_rep, check_order_isomorphism, join_irreducibles, lattice_from_order, lower_sets, ElementSet,
    Lattice, Poset,
};
use stable_lattice::realize::{antichain_base, extract_rotations, psi_s, psi_s_inverse, RealizedBase, RotationPoset};

use common::*;

/// Agents of a synthesized market never exceed `AGENT_FACTOR · |X|⁴`.
const AGENT_FACTOR: f64 = 8.0;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn m(pairs: &[(&str, &str)]) -> Matching {
    Matching::new(pairs.iter().copied())
}

/// The six-element non-distributive lattice: bottom `a`, atoms `b` and `c`,
/// `d` and `e` above `c`, top `f`.
fn six_element() -> Lattice {
    let el = ids(&["a", "b", "c", "d", "e", "f"]);
    let pairs: Vec<(String, String)> = [("a", "b"), ("a", "c"), ("c", "d"), ("c", "e"), ("b", "f"), ("d", "f"), ("e", "f")]
        .iter()
        .map(|(x, y)| (x.to_string(), y.to_string()))
        .collect();
    lattice_from_order(&Poset::from_pairs(&el, &pairs).unwrap()).unwrap()
}

fn order_lattice(el: &[&str], pairs: &[(&str, &str)]) -> Lattice {
    let pairs: Vec<(String, String)> = pairs.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect();
    lattice_from_order(&Poset::from_pairs(&ids(el), &pairs).unwrap()).unwrap()
}

/// The seven-by-seven worked market with strict singleton lists.
fn worked_market() -> MatchingMarket {
    let lists: [(&str, &[&str]); 14] = [
        ("f1", &["w5", "w1"]),
        ("f2", &["w7", "w4", "w2"]),
        ("f3", &["w2", "w3"]),
        ("f4", &["w6", "w3", "w4"]),
        ("f5", &["w1", "w5"]),
        ("f6", &["w3", "w6"]),
        ("f7", &["w4", "w7"]),
        ("w1", &["f1", "f5"]),
        ("w2", &["f2", "f3"]),
        ("w3", &["f3", "f4", "f6"]),
        ("w4", &["f4", "f2", "f7"]),
        ("w5", &["f5", "f1"]),
        ("w6", &["f6", "f4"]),
        ("w7", &["f7", "f2"]),
    ];
    let firms = (1..=7).map(|i| format!("f{i}")).collect();
    let workers = (1..=7).map(|i| format!("w{i}")).collect();
    let mut market = MatchingMarket::new(firms, workers);
    for (a, list) in lists {
        market.choice.insert(a.to_string(), ChoiceFunctionSpec::singletons(list));
    }
    market
}

/// The ten stable matchings of the worked market, `μ₁ … μ₁₀`.
fn worked_stable() -> Vec<Matching> {
    let rows: [[&str; 7]; 10] = [
        ["w1", "w2", "w3", "w4", "w5", "w6", "w7"],
        ["w5", "w2", "w3", "w4", "w1", "w6", "w7"],
        ["w1", "w4", "w2", "w3", "w5", "w6", "w7"],
        ["w5", "w4", "w2", "w3", "w1", "w6", "w7"],
        ["w1", "w4", "w2", "w6", "w5", "w3", "w7"],
        ["w1", "w7", "w2", "w3", "w5", "w6", "w4"],
        ["w5", "w4", "w2", "w6", "w1", "w3", "w7"],
        ["w5", "w7", "w2", "w3", "w1", "w6", "w4"],
        ["w1", "w7", "w2", "w6", "w5", "w3", "w4"],
        ["w5", "w7", "w2", "w6", "w1", "w3", "w4"],
    ];
    rows.iter()
        .map(|row| Matching {
            pairs: row.iter().enumerate().map(|(i, w)| (format!("f{}", i + 1), w.to_string())).collect(),
        })
        .collect()
}

/// The four rotations `(ρ⁺, ρ⁻)` of the worked market, `ρ₁ … ρ₄`.
fn worked_rotations() -> Vec<(Matching, Matching)> {
    vec![
        (m(&[("f2", "w4"), ("f3", "w2"), ("f4", "w3")]), m(&[("f2", "w2"), ("f3", "w3"), ("f4", "w4")])),
        (m(&[("f1", "w5"), ("f5", "w1")]), m(&[("f1", "w1"), ("f5", "w5")])),
        (m(&[("f4", "w6"), ("f6", "w3")]), m(&[("f4", "w3"), ("f6", "w6")])),
        (m(&[("f2", "w7"), ("f7", "w4")]), m(&[("f2", "w4"), ("f7", "w7")])),
    ]
}

/// Library rotation id of each worked rotation `ρ₁ … ρ₄`.
fn rotation_names(rp: &RotationPoset) -> Result<Vec<String>, String> {
    worked_rotations()
        .iter()
        .enumerate()
        .map(|(i, (plus, minus))| {
            rp.rotations
                .iter()
                .find(|(_, r)| r.plus == plus.pairs && r.minus == minus.pairs)
                .map(|(id, _)| id.clone())
                .ok_or_else(|| format!("rotation {} not extracted", i + 1))
        })
        .collect()
}

/// Auxiliary and copy agents of the first augmentation.
const W0: &str = "w0#1";
const F0: &str = "f0#1";

fn copy(w: &str) -> String {
    format!("{w}#1")
}

/// The seven stable matchings after the worked augmentation, in the order
/// `μ₁″, μ₂″, μ₃″, μ₅″, μ₆″, μ₉″, μ₁₀″`, with the base matching each projects to.
fn worked_augmented() -> Vec<(Matching, usize)> {
    let all_copies: Vec<(String, String)> =
        ["w3", "w4", "w6", "w7"].iter().map(|w| (F0.to_string(), copy(w))).collect();
    let build = |base: &[(&str, &str)], aux: &[&str], copies: bool| {
        let mut pairs: BTreeSet<(String, String)> = base.iter().map(|(f, w)| (f.to_string(), w.to_string())).collect();
        pairs.extend(aux.iter().map(|f| (f.to_string(), W0.to_string())));
        if copies {
            pairs.extend(all_copies.iter().cloned());
        }
        Matching { pairs }
    };
    let stable = worked_stable();
    let base = |i: usize| -> Vec<(&str, &str)> {
        stable[i - 1].pairs.iter().map(|(f, w)| (f.as_str(), w.as_str())).collect()
    };
    let mut out = vec![
        (build(&base(1), &["f1", "f2", "f3", "f4", "f5"], true), 1),
        (build(&base(2), &["f2", "f3", "f4"], true), 2),
        (build(&base(3), &["f1", "f5"], true), 3),
        (build(&base(5), &["f1", "f5"], true), 5),
        (build(&base(6), &["f1", "f5"], true), 6),
        (build(&base(9), &["f1", "f5"], true), 9),
    ];
    let mut top = build(&base(10), &[], false);
    top.pairs.extend(
        [("f2", "w7"), ("f4", "w6"), ("f6", "w3"), ("f7", "w4")]
            .iter()
            .map(|(f, w)| (f.to_string(), copy(w))),
    );
    top.pairs.insert((F0.to_string(), W0.to_string()));
    out.push((top, 10));
    out
}

/// The four-element antimatroid with paths `{a}`, `{b}`, `{a,c}`, `{a,c,d}`.
fn four_element_antimatroid() -> AntimatroidFamily {
    let feasible = [
        &[][..],
        &["a"],
        &["b"],
        &["a", "b"],
        &["a", "c"],
        &["a", "b", "c"],
        &["a", "c", "d"],
        &["a", "b", "c", "d"],
    ];
    AntimatroidFamily {
        ground: ids(&["a", "b", "c", "d"]),
        feasible: feasible.iter().map(|s| set(s)).collect(),
    }
}

fn named_graph(name: &str) -> (Vec<String>, Vec<(String, String)>) {
    let (n, edges): (usize, &[(usize, usize)]) = match name {
        "K3" => (3, &[(1, 2), (1, 3), (2, 3)]),
        "P3" => (3, &[(1, 2), (2, 3)]),
        "C4" => (4, &[(1, 2), (2, 3), (3, 4), (1, 4)]),
        "C5" => (5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]),
        _ => unreachable!(),
    };
    (
        (1..=n).map(|i| format!("v{i}")).collect(),
        edges.iter().map(|(a, b)| (format!("v{a}"), format!("v{b}"))).collect(),
    )
}

/// Choice induced by a list of sets: the first listed set inside the offer.
fn from_list(list: &[ElementSet], t: &ElementSet) -> ElementSet {
    list.iter().find(|s| s.is_subset(t)).cloned().unwrap_or_default()
}

fn by_decreasing_size(items: &[String]) -> Vec<ElementSet> {
    let mut subsets: Vec<ElementSet> = all_subsets(items).into_iter().filter(|s| !s.is_empty()).collect();
    subsets.sort_by_key(|s| std::cmp::Reverse(s.len()));
    subsets
}

fn list_matches(market: &MatchingMarket, agent: &str, list: &[ElementSet]) -> Result<(), String> {
    let universe: Vec<String> = list.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let declared = market.spec(agent).relevant_universe();
    ensure!(declared.iter().eq(universe.iter()), "{agent}: universe {declared:?}");
    for t in all_subsets(&universe) {
        let got = market.choose(agent, &t).map_err(fail)?;
        ensure!(got == from_list(list, &t), "{agent} offered {t:?} chooses {got:?}");
    }
    Ok(())
}

/// Path independence straight from the definition, `C(S ∪ T) = C(C(S) ∪ T)`.
fn brute_path_independent(spec: &ChoiceFunctionSpec, universe: &[String]) -> bool {
    let subsets = all_subsets(universe);
    subsets.iter().all(|s| {
        let cs = spec.choose(s);
        subsets.iter().all(|t| {
            let st: ElementSet = s.union(t).cloned().collect();
            let ct: ElementSet = cs.union(t).cloned().collect();
            spec.choose(&st) == spec.choose(&ct)
        })
    })
}

fn criterion_1() -> Outcome {
    let rep = canonical_partial_rep(&six_element()).map_err(fail)?;
    let table: BTreeMap<String, ElementSet> = [
        ("a", &[][..]),
        ("b", &["b"]),
        ("c", &["c"]),
        ("d", &["c", "d"]),
        ("e", &["c", "e"]),
        ("f", &["b", "c", "d", "e"]),
    ]
    .iter()
    .map(|(x, s)| (x.to_string(), set(s)))
    .collect();
    ensure!(rep == table, "table differs: {rep:?}");
    Ok("six rows match".into())
}

fn criterion_2() -> Outcome {
    let l = six_element();
    let (_, xj) = join_irreducibles(&l).map_err(fail)?;
    let d = lower_sets(&xj, 1 << 20).map_err(fail)?;
    ensure!(d.len() == 10, "{} lower sets", d.len());
    let kept = filter_lower_sets(&d, &constraints_from_lattice(&l).map_err(fail)?);
    let want: BTreeSet<ElementSet> = [&[][..], &["b"], &["c"], &["c", "d"], &["c", "e"], &["b", "c", "d", "e"]]
        .iter()
        .map(|s| set(s))
        .collect();
    let got: BTreeSet<ElementSet> = kept.iter().cloned().collect();
    ensure!(got == want && kept.len() == 6, "filtered family {kept:?}");
    let leq = |x: &String, y: &String| l.poset().leq_ids(x, y).unwrap();
    ensure!(
        brute_isomorphic(l.elements(), &kept, leq, |a: &ElementSet, b: &ElementSet| a.is_subset(b)),
        "containment order is not isomorphic to the lattice"
    );
    Ok("6 of 10 lower sets kept; order-isomorphic".into())
}

fn criterion_3() -> Outcome {
    let market = worked_market();
    let got = enumerate_stable(&market, DEFAULT_NODE_BOUND).map_err(fail)?;
    let want: BTreeSet<Matching> = worked_stable().into_iter().collect();
    ensure!(got.len() == 10 && got.iter().cloned().collect::<BTreeSet<_>>() == want, "stable set differs");
    let oracle = brute_force_stable(&market, 24).ok_or("oracle too large")?;
    ensure!(oracle.into_iter().collect::<BTreeSet<_>>() == want, "oracle disagrees");
    let rp = extract_rotations(&market, DEFAULT_NODE_BOUND).map_err(fail)?;
    ensure!(rp.rotations.len() == 4, "{} rotations", rp.rotations.len());
    let r = rotation_names(&rp)?;
    let strict: BTreeSet<(String, String)> = rp.poset.strict_pairs().into_iter().collect();
    let expected: BTreeSet<(String, String)> =
        [(r[0].clone(), r[2].clone()), (r[0].clone(), r[3].clone())].into();
    ensure!(strict == expected, "precedence {strict:?}");
    let stable = worked_stable();
    ensure!(deferred_acceptance(&market, Side::Firms).map_err(fail)? == stable[9], "firm-proposing result");
    ensure!(deferred_acceptance(&market, Side::Workers).map_err(fail)? == stable[0], "worker-proposing result");
    Ok("10 matchings, 4 rotations, 2 precedences, both extremes".into())
}

fn worked_base() -> Result<(RealizedBase, Vec<String>), String> {
    let market = worked_market();
    let rp = extract_rotations(&market, DEFAULT_NODE_BOUND).map_err(fail)?;
    let names = rotation_names(&rp)?;
    let phi = rp.rotations.keys().map(|r| (r.clone(), r.clone())).collect();
    Ok((RealizedBase { market, phi, rotation_poset: rp }, names))
}

fn criterion_4(markets: &mut Vec<(String, MatchingMarket)>) -> Outcome {
    let (base, r) = worked_base()?;
    let jc = JoinConstraint::conjunctive(
        [r[0].clone(), r[1].clone()].into(),
        [r[2].clone(), r[3].clone()].into(),
    );
    let rjc = derive_sets(&jc, &base.rotation_poset).map_err(fail)?;
    ensure!(rjc.f_alpha == set(&["f1", "f2", "f3", "f4", "f5"]), "F_alpha {:?}", rjc.f_alpha);
    ensure!(rjc.w_beta == set(&["w3", "w4", "w6", "w7"]), "W_beta {:?}", rjc.w_beta);
    let em = augment(&ExtendableMarket::from_base(base.clone()), &rjc).map_err(fail)?;
    let mk = &em.market;

    for (f, w) in [("f1", "w1"), ("f2", "w2"), ("f3", "w3"), ("f4", "w4"), ("f5", "w5")] {
        ensure!(em.a_f.get(f) == Some(&vec![(w.to_string(), W0.to_string())]), "A_{f} = {:?}", em.a_f.get(f));
    }
    for f in ["f6", "f7"] {
        ensure!(em.a_f.get(f).is_none_or(Vec::is_empty), "A_{f} should be empty");
    }

    let mut w0 = by_decreasing_size(&ids(&["f1", "f2", "f3", "f4", "f5"]));
    w0.push(set(&[F0]));
    list_matches(mk, W0, &w0)?;
    let mut f0 = vec![set(&[W0])];
    f0.extend(by_decreasing_size(&["w3", "w4", "w6", "w7"].map(copy)));
    list_matches(mk, F0, &f0)?;
    for (w, f) in [("w3", "f6"), ("w4", "f7"), ("w6", "f4"), ("w7", "f2")] {
        list_matches(mk, &copy(w), &[set(&[F0]), set(&[f])])?;
    }
    list_matches(mk, "f1", &[set(&["w5"]), set(&[W0, "w1"]), set(&["w1"]), set(&[W0])])?;
    let (w4c, w7c) = (copy("w4"), copy("w7"));
    list_matches(
        mk,
        "f7",
        &[
            set(&["w4", &w4c]),
            set(&["w4"]),
            set(&[&w4c]),
            set(&["w7", &w7c]),
            set(&["w7"]),
            set(&[&w7c]),
        ],
    )?;
    for w in &base.market.workers {
        ensure!(mk.spec(w) == base.market.spec(w), "worker {w} changed");
    }

    let got = enumerate_stable(mk, DEFAULT_NODE_BOUND).map_err(fail)?;
    let want = worked_augmented();
    let want_set: BTreeSet<Matching> = want.iter().map(|(mu, _)| mu.clone()).collect();
    ensure!(got.len() == 7, "{} stable matchings", got.len());
    ensure!(got.iter().cloned().collect::<BTreeSet<_>>() == want_set, "augmented stable set differs");
    let stable = worked_stable();
    for (mu, i) in &want {
        ensure!(is_stable(mk, mu), "oracle rejects the image of mu_{i}");
        ensure!(project_xi(&em, mu).map_err(fail)? == stable[i - 1], "projection of mu_{i}''");
    }
    markets.push(("worked augmentation".into(), em.market.clone()));
    Ok("sets, A table, P'' lists and 7 matchings with projections {1,2,3,5,6,9,10}".into())
}

fn synthesis_lattices() -> Vec<(String, Lattice)> {
    let mut out = vec![
        ("six-element".to_string(), six_element()),
        ("N5".to_string(), order_lattice(&["0", "a", "b", "c", "1"], &[("0", "a"), ("a", "b"), ("0", "c"), ("b", "1"), ("c", "1")])),
        ("M3".to_string(), order_lattice(&["0", "a", "b", "c", "1"], &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")])),
    ];
    for n in 1..=5 {
        for (i, l) in generate::all_lattices(n).into_iter().enumerate() {
            out.push((format!("size-{n}/{i}"), l));
        }
    }
    let mut rng = generate::rng(0);
    for i in 0..50 {
        out.push((format!("random/{i}"), generate::random_lattice(&mut rng, 8, 5)));
    }
    out
}

fn criterion_5(markets: &mut Vec<(String, MatchingMarket)>) -> Outcome {
    let counts: Vec<usize> = (1..=5).map(|n| generate::all_lattices(n).len()).collect();
    ensure!(counts == [1, 1, 1, 2, 5], "lattice counts by size {counts:?}");
    let lattices = synthesis_lattices();
    let mut worst = 0.0f64;
    for (name, l) in &lattices {
        let s = synthesize_from_lattice(l, DEFAULT_NODE_BOUND).map_err(|e| format!("{name}: {e}"))?;
        check_order_isomorphism(&s.element_ids(), l.poset(), s.stable.lattice.poset())
            .map_err(|e| format!("{name}: {e}"))?;
        let mk = &s.extension.market;
        ensure!(s.stable.matchings.len() == l.len(), "{name}: {} stable matchings", s.stable.matchings.len());
        for x in l.elements() {
            ensure!(is_stable(mk, &s.iso[x]), "{name}: image of {x} is unstable");
            for y in l.elements() {
                let want = l.poset().leq_ids(x, y).unwrap();
                ensure!(firms_weakly_prefer(mk, &s.iso[y], &s.iso[x]) == want, "{name}: order on ({x}, {y})");
            }
        }
        let ratio = mk.agent_count() as f64 / (l.len() as f64).powi(4);
        ensure!(ratio <= AGENT_FACTOR, "{name}: {} agents for {} elements", mk.agent_count(), l.len());
        worst = worst.max(ratio);
        markets.push((name.clone(), mk.clone()));
    }
    Ok(format!(
        "{} lattices; c = {AGENT_FACTOR}, max observed agents/|X|^4 = {worst:.3}",
        lattices.len()
    ))
}

fn criterion_6(markets: &[(String, MatchingMarket)]) -> Outcome {
    let cfg = PiConfig::default();
    let (mut exhaustive, mut quotient, mut oracle, mut largest) = (0, 0, 0, 0);
    for (name, mk) in markets {
        for (agent, spec) in &mk.choice {
            let universe = spec.relevant_universe();
            let report = check_path_independence(spec, &universe, &cfg).map_err(|v| format!("{name}/{agent}: {v}"))?;
            match report.mode {
                PiMode::Exhaustive => exhaustive += 1,
                PiMode::Quotient => quotient += 1,
                PiMode::Sampled => return Err(format!("{name}/{agent}: only sampled")),
            }
            largest = largest.max(universe.len());
            if universe.len() <= 6 {
                let u: Vec<String> = universe.into_iter().collect();
                ensure!(brute_path_independent(spec, &u), "{name}/{agent}: oracle finds a violation");
                oracle += 1;
            }
        }
    }
    Ok(format!(
        "{exhaustive} exhaustive, {quotient} over clone classes, {oracle} re-checked by definition; largest universe {largest}"
    ))
}

fn criterion_7() -> Outcome {
    let check = |fam: &AntimatroidFamily| -> Result<(), String> {
        ensure!(is_antimatroid(&fam.ground, &fam.feasible), "oracle rejects the family");
        validate_antimatroid(fam).map_err(fail)?;
        let pp = compute_path_poset(fam).map_err(fail)?;
        let want: BTreeSet<ElementSet> = fam.feasible.iter().cloned().collect();
        let filtered = filter_subsets(&fam.ground, &antimatroid_constraints(&pp)).map_err(fail)?;
        ensure!(filtered.iter().cloned().collect::<BTreeSet<_>>() == want && filtered.len() == want.len(), "filtering differs on {:?}", fam.feasible);
        let rebuilt = family_from_path_poset(&pp).map_err(fail)?;
        ensure!(rebuilt.feasible.iter().cloned().collect::<BTreeSet<_>>() == want, "paths do not rebuild the family");
        Ok(())
    };
    let fam = four_element_antimatroid();
    check(&fam)?;
    ensure!(endpoints(&fam, &set(&["a", "c", "d"])).map_err(fail)? == set(&["d"]), "endpoints of {{a,c,d}}");
    ensure!(brute_endpoints(&fam.feasible, &set(&["a", "c", "d"])) == set(&["d"]), "oracle endpoints of {{a,c,d}}");
    let pp = compute_path_poset(&fam).map_err(fail)?;
    for (s, e) in [(&["a"][..], "a"), (&["a", "c"], "c"), (&["a", "c", "d"], "d")] {
        ensure!(pp.paths.iter().any(|p| p.set == set(s) && p.endpoint == e), "no path {s:?} ending at {e}");
    }
    let mut rng = generate::rng(0);
    for i in 0..100 {
        check(&generate::random_antimatroid(&mut rng, i % 7))?;
    }
    Ok("fixture and 100 random antimatroids".into())
}

fn cost(c: &GroundCosts, s: &ElementSet) -> i64 {
    s.iter().map(|x| c.get(x).copied().unwrap_or(0)).sum()
}

fn criterion_8() -> Outcome {
    let mut graphs: Vec<(String, (Vec<String>, Vec<(String, String)>))> =
        ["K3", "P3", "C4", "C5"].iter().map(|g| (g.to_string(), named_graph(g))).collect();
    let mut rng = generate::rng(0);
    for i in 0..25 {
        graphs.push((format!("random/{i}"), generate::random_graph(&mut rng, 1 + i % 5, 0.5)));
    }
    for (name, (v, e)) in &graphs {
        let (fam, w) = independent_set_antimatroid(v, e).map_err(fail)?;
        let pp = compute_path_poset(&fam).map_err(fail)?;
        let red = reduce_to_matching(&pp, &w).map_err(fail)?;
        for sense in [Sense::Min, Sense::Max] {
            let values = fam.feasible.iter().map(|s| cost(&w, s));
            let best = match sense {
                Sense::Min => values.min(),
                Sense::Max => values.max(),
            }
            .unwrap();
            let (mu, value) = min_cost_stable(red.market(), &red.pair_costs, sense, DEFAULT_NODE_BOUND)
                .map_err(|e| format!("{name}: {e}"))?;
            ensure!(is_stable(red.market(), &mu), "{name}: optimum is unstable");
            ensure!(value == Rational::from_integer(best), "{name} {sense:?}: {value} vs {best}");
            let s = red.recover(&mu).map_err(fail)?;
            ensure!(fam.feasible.contains(&s), "{name}: recovered {s:?} is infeasible");
            ensure!(cost(&w, &s) == best, "{name}: recovered set is not optimal");
            if sense == Sense::Max {
                ensure!(best == independence_number(v, e), "{name}: max weight {best}");
            }
        }
    }
    Ok(format!("{} graphs, both senses", graphs.len()))
}

fn round_trip(market: &MatchingMarket, rp: &RotationPoset) -> Result<usize, String> {
    let d = brute_lower_sets(rp.poset.elements(), |x, y| rp.poset.leq_ids(x, y).unwrap());
    for t in &d {
        let mu = psi_s_inverse(rp, t).map_err(fail)?;
        ensure!(&psi_s(rp, &mu).map_err(fail)? == t, "round trip fails on {t:?}");
    }
    let stable = enumerate_stable(market, DEFAULT_NODE_BOUND).map_err(fail)?;
    let images: Vec<ElementSet> = stable.iter().map(|mu| psi_s(rp, mu)).collect::<Result<_, _>>().map_err(fail)?;
    ensure!(images.iter().cloned().collect::<BTreeSet<_>>() == d && images.len() == d.len(), "image is not every lower set");
    for (a, mu) in images.iter().zip(&stable) {
        for (b, nu) in images.iter().zip(&stable) {
            ensure!(a.is_subset(b) == firms_weakly_prefer(market, nu, mu), "order differs on {a:?}, {b:?}");
        }
    }
    Ok(d.len())
}

fn criterion_9() -> Outcome {
    let mut total = 0;
    let (base, _) = worked_base()?;
    total += round_trip(&base.market, &base.rotation_poset)?;
    let mut count = 1;
    for k in 0..=5 {
        let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let b = antichain_base(&names).map_err(fail)?;
        total += round_trip(&b.market, &b.rotation_poset)?;
        let extracted = extract_rotations(&b.market, DEFAULT_NODE_BOUND).map_err(fail)?;
        total += round_trip(&b.market, &extracted)?;
        count += 1;
    }
    Ok(format!("{count} one-to-one markets, {total} rotation sets"))
}

struct Line {
    id: usize,
    passed: bool,
    text: String,
}

fn run(id: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    let took = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (false, format!("{d}; over the {limit:?} limit")),
        Err(e) => (false, e),
    };
    let text = format!(
        "criterion {id}: {} ({detail}) [{} ms]",
        if passed { "PASS" } else { "FAIL" },
        took.as_millis()
    );
    println!("{text}");
    Line { id, passed, text }
}

#[test]
fn acceptance() {
    let mut markets = Vec::new();
    let lines = vec![
        run(1, Duration::from_secs(1), criterion_1),
        run(2, Duration::from_secs(1), criterion_2),
        run(3, Duration::from_secs(5), criterion_3),
        run(4, Duration::from_secs(30), || criterion_4(&mut markets)),
        run(5, Duration::from_secs(600), || criterion_5(&mut markets)),
        run(6, Duration::from_secs(120), || criterion_6(&markets)),
        run(7, Duration::from_secs(120), criterion_7),
        run(8, Duration::from_secs(600), criterion_8),
        run(9, Duration::from_secs(60), criterion_9),
    ];
    let failed: Vec<&Line> = lines.iter().filter(|l| !l.passed).collect();
    assert!(
        failed.is_empty(),
        "failed criteria {:?}:\n{}",
        failed.iter().map(|l| l.id).collect::<Vec<_>>(),
        failed.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join("\n")
    );
}
