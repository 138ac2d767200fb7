//! The fixture acceptance suite run by the `selftest` command.
//!
//! Each criterion re-derives a reference result with the library and
//! compares it with the hand-entered fixtures in [`crate::fixtures`] or with
//! a brute-force computation. Failures carry a witness.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::Serialize;

use crate::antimatroid::{
    antimatroid_constraints, compute_path_poset, endpoints, family_from_path_poset, filter_subsets,
    independent_set_antimatroid, min_cost_feasible, min_cost_stable, reduce_to_matching,
    validate_antimatroid, GroundCosts, Rational, Sense,
};
use crate::augment::{augment, derive_sets, project_xi, synthesize_from_lattice, ExtendableMarket};
use crate::constraints::{constraints_from_lattice, filter_lower_sets};
use crate::fixtures;
use crate::generate;
use crate::market::path_independence::{check_path_independence, PiConfig};
use crate::market::{deferred_acceptance, enumerate_stable, stable_lattice, MatchingMarket, Side};
use crate::order::{
    canonical_partial_rep, check_order_isomorphism, check_set_isomorphism, join_irreducibles,
    lower_sets, ElementSet, Lattice,
};
use crate::realize::{antichain_base, extract_rotations, psi_s, psi_s_inverse, RealizedBase};

/// Sizes and bounds for a suite run.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub node_bound: u64,
    pub element_bound: usize,
    pub seed: u64,
    pub random_lattices: usize,
    pub random_antimatroids: usize,
    pub random_graphs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            node_bound: crate::market::DEFAULT_NODE_BOUND,
            element_bound: 1 << 20,
            seed: 0,
            random_lattices: 50,
            random_antimatroids: 100,
            random_graphs: 25,
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Summary on success, witness on failure.
    pub detail: String,
    pub millis: u128,
}

type Outcome = std::result::Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs every criterion in order.
pub fn run(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    let criteria: [(u8, &str, fn(&SuiteConfig) -> Outcome); 9] = [
        (1, "partial representation table", partial_rep),
        (2, "constraint filtering", filtering),
        (3, "golden one-to-one market", golden_market),
        (4, "golden augmentation", golden_augmentation),
        (5, "lattice synthesis", synthesis_suite),
        (6, "path independence of augmented choice functions", path_independence),
        (7, "antimatroid paths and constraints", antimatroid_suite),
        (8, "antimatroid reduction optimum", reduction_suite),
        (9, "rotation representation round trip", representation),
    ];
    criteria
        .iter()
        .map(|(id, name, f)| {
            let start = Instant::now();
            let outcome = f(cfg);
            let millis = start.elapsed().as_millis();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CriterionResult {
                id: *id,
                name: name.to_string(),
                passed,
                detail,
                millis,
            }
        })
        .collect()
}

fn partial_rep(_: &SuiteConfig) -> Outcome {
    let got = canonical_partial_rep(&fixtures::six_element_lattice()).map_err(err)?;
    let want = fixtures::six_element_partial_rep();
    if got == want {
        Ok(format!("{} rows match", got.len()))
    } else {
        Err(format!("got {got:?}"))
    }
}

fn filtering(cfg: &SuiteConfig) -> Outcome {
    let l = fixtures::six_element_lattice();
    let (_, p) = join_irreducibles(&l).map_err(err)?;
    let d = lower_sets(&p, cfg.element_bound).map_err(err)?;
    let omega = constraints_from_lattice(&l).map_err(err)?;
    let kept = filter_lower_sets(&d, &omega);
    let mut want = fixtures::six_element_filtered();
    want.sort_by(crate::order::set_cmp);
    if kept != want {
        return Err(format!("filtered family {kept:?}"));
    }
    let rep = canonical_partial_rep(&l).map_err(err)?;
    check_set_isomorphism(&rep, l.poset(), &kept).map_err(err)?;
    Ok(format!("{} of {} lower sets survive", kept.len(), d.len()))
}

fn golden_market(cfg: &SuiteConfig) -> Outcome {
    let m = fixtures::golden_market();
    let got = enumerate_stable(&m, cfg.node_bound).map_err(err)?;
    let mut want = fixtures::golden_stable().to_vec();
    want.sort();
    if got != want {
        return Err(format!("{} stable matchings, expected 10", got.len()));
    }
    let rp = extract_rotations(&m, cfg.node_bound).map_err(err)?;
    let found: BTreeSet<_> = rp.rotations.values().map(|r| (&r.plus, &r.minus)).collect();
    let golden = fixtures::golden_rotations();
    let expected: BTreeSet<_> = golden.iter().map(|r| (&r.plus, &r.minus)).collect();
    if found != expected {
        return Err("rotation pair sets differ".into());
    }
    // Order: the rotation named `c` precedes `d` and `e`, nothing else.
    let by_pairs: BTreeMap<_, _> = rp
        .rotations
        .values()
        .map(|r| ((r.plus.clone(), r.minus.clone()), r.id.clone()))
        .collect();
    let name: BTreeMap<String, String> = golden
        .iter()
        .map(|r| (by_pairs[&(r.plus.clone(), r.minus.clone())].clone(), r.id.clone()))
        .collect();
    let strict: BTreeSet<(String, String)> = rp
        .poset
        .strict_pairs()
        .into_iter()
        .map(|(a, b)| (name[&a].clone(), name[&b].clone()))
        .collect();
    let want_order = BTreeSet::from([("c".to_string(), "d".to_string()), ("c".to_string(), "e".to_string())]);
    if strict != want_order {
        return Err(format!("rotation order {strict:?}"));
    }
    let stable = fixtures::golden_stable();
    let fo = deferred_acceptance(&m, Side::Firms).map_err(err)?;
    let wo = deferred_acceptance(&m, Side::Workers).map_err(err)?;
    if fo != stable[9] || wo != stable[0] {
        return Err("deferred acceptance optima differ".into());
    }
    Ok("10 matchings, 4 rotations, both optima".into())
}

/// The golden base augmented once by the worked constraint.
fn golden_extension() -> crate::Result<ExtendableMarket> {
    let base = fixtures::golden_base()?;
    let rjc = derive_sets(&fixtures::golden_worked_constraint(), &base.rotation_poset)?;
    augment(&ExtendableMarket::from_base(base), &rjc)
}

fn golden_augmentation(cfg: &SuiteConfig) -> Outcome {
    let base = fixtures::golden_base().map_err(err)?;
    let rjc = derive_sets(&fixtures::golden_worked_constraint(), &base.rotation_poset).map_err(err)?;
    let f_alpha: BTreeSet<String> = (1..=5).map(|i| format!("f{i}")).collect();
    let w_beta: BTreeSet<String> = [3, 4, 6, 7].iter().map(|i| format!("w{i}")).collect();
    if rjc.f_alpha != f_alpha || rjc.w_beta != w_beta {
        return Err(format!("F_alpha {:?}, W_beta {:?}", rjc.f_alpha, rjc.w_beta));
    }
    let em = augment(&ExtendableMarket::from_base(base.clone()), &rjc).map_err(err)?;
    if em.a_f != fixtures::golden_augmented_aux_pairs() {
        return Err(format!("aux pairs {:?}", em.a_f));
    }
    for (copy, list) in fixtures::golden_augmented_copy_lists() {
        let got = em.market.spec(&copy).ranked();
        if got.as_ref() != Some(&list) {
            return Err(format!("list of {copy} is {got:?}"));
        }
    }
    let got = enumerate_stable(&em.market, cfg.node_bound).map_err(err)?;
    let mut want = fixtures::golden_augmented_stable().to_vec();
    want.sort();
    if got != want {
        return Err(format!("{} stable matchings, expected 7", got.len()));
    }
    let stable = fixtures::golden_stable();
    let images: BTreeSet<_> = got
        .iter()
        .map(|mu| project_xi(&em, mu))
        .collect::<crate::Result<_>>()
        .map_err(err)?;
    let expected: BTreeSet<_> = fixtures::GOLDEN_SURVIVORS.iter().map(|&i| stable[i].clone()).collect();
    if images != expected {
        return Err("projections differ from the surviving matchings".into());
    }
    Ok("sets, lists, aux pairs and 7 matchings match".into())
}

/// Lattices of the synthesis suite: the named fixtures, every lattice with at
/// most five elements and seeded random lattices with at most eight.
pub fn synthesis_lattices(cfg: &SuiteConfig) -> Vec<(String, Lattice)> {
    let mut out = vec![
        ("six-element".to_string(), fixtures::six_element_lattice()),
        ("pentagon".to_string(), fixtures::pentagon()),
        ("diamond".to_string(), fixtures::diamond()),
    ];
    for n in 1..=5 {
        for (i, l) in generate::all_lattices(n).into_iter().enumerate() {
            out.push((format!("size{n}-{i}"), l));
        }
    }
    let mut rng = generate::rng(cfg.seed);
    for i in 0..cfg.random_lattices {
        out.push((format!("random-{i}"), generate::random_lattice(&mut rng, 8, 5)));
    }
    out
}

fn synthesis_suite(cfg: &SuiteConfig) -> Outcome {
    let mut worst = 0.0f64;
    let lattices = synthesis_lattices(cfg);
    for (name, l) in &lattices {
        let s = synthesize_from_lattice(l, cfg.node_bound).map_err(|e| format!("{name}: {e}"))?;
        check_order_isomorphism(&s.element_ids(), l.poset(), s.stable.lattice.poset())
            .map_err(|e| format!("{name}: {e}"))?;
        let ratio = s.extension.market.agent_count() as f64 / (l.len() as f64).powi(4);
        worst = worst.max(ratio);
    }
    Ok(format!(
        "{} lattices realized; max agents/|X|^4 = {worst:.3}",
        lattices.len()
    ))
}

/// Every augmented market of criteria 4 and 5.
fn augmented_markets(cfg: &SuiteConfig) -> crate::Result<Vec<(String, MatchingMarket)>> {
    let mut out = vec![("golden".to_string(), golden_extension()?.market)];
    for (name, l) in synthesis_lattices(cfg) {
        out.push((name, synthesize_from_lattice(&l, cfg.node_bound)?.extension.market));
    }
    Ok(out)
}

fn path_independence(cfg: &SuiteConfig) -> Outcome {
    let pi = PiConfig::default();
    let mut checked = 0usize;
    for (name, m) in augmented_markets(cfg).map_err(err)? {
        for (agent, spec) in &m.choice {
            check_path_independence(spec, &spec.relevant_universe(), &pi)
                .map_err(|v| format!("{name}/{agent}: {v}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} choice functions"))
}

fn antimatroid_suite(cfg: &SuiteConfig) -> Outcome {
    let fam = fixtures::four_element_antimatroid();
    validate_antimatroid(&fam).map_err(err)?;
    let s = |v: &[&str]| -> ElementSet { v.iter().map(|x| x.to_string()).collect() };
    if endpoints(&fam, &s(&["a", "c", "d"])).map_err(err)? != s(&["d"]) {
        return Err("{a,c,d} should have endpoint d only".into());
    }
    let pp = compute_path_poset(&fam).map_err(err)?;
    for (set, end) in [(s(&["a"]), "a"), (s(&["a", "c"]), "c"), (s(&["a", "c", "d"]), "d")] {
        if !pp.paths.iter().any(|p| p.set == set && p.endpoint == end) {
            return Err(format!("missing path {set:?} ending at {end}"));
        }
    }
    let check = |fam: &crate::antimatroid::AntimatroidFamily| -> Outcome {
        let pp = compute_path_poset(fam).map_err(err)?;
        let filtered = filter_subsets(&fam.ground, &antimatroid_constraints(&pp)).map_err(err)?;
        let rebuilt = family_from_path_poset(&pp).map_err(err)?;
        let mut want = fam.feasible.clone();
        want.sort_by(crate::order::set_cmp);
        if filtered != want || rebuilt.feasible != want {
            return Err(format!("filtering disagrees on {:?}", fam.feasible));
        }
        Ok(String::new())
    };
    check(&fam)?;
    let mut rng = generate::rng(cfg.seed);
    for i in 0..cfg.random_antimatroids {
        let fam = generate::random_antimatroid(&mut rng, i % 7);
        check(&fam)?;
    }
    Ok(format!("fixture plus {} random antimatroids", cfg.random_antimatroids))
}

fn independence_number(vertices: &[String], edges: &[(String, String)]) -> i64 {
    let n = vertices.len();
    let idx = |v: &String| vertices.iter().position(|x| x == v).expect("vertex");
    let e: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (idx(a), idx(b))).collect();
    (0u32..1 << n)
        .filter(|m| e.iter().all(|&(a, b)| m >> a & 1 == 0 || m >> b & 1 == 0))
        .map(|m| m.count_ones() as i64)
        .max()
        .unwrap_or(0)
}

fn reduction_suite(cfg: &SuiteConfig) -> Outcome {
    let mut graphs: Vec<(String, (Vec<String>, Vec<(String, String)>))> = ["K3", "P3", "C4", "C5"]
        .iter()
        .map(|n| (n.to_string(), fixtures::graph(n).expect("named graph")))
        .collect();
    let mut rng = generate::rng(cfg.seed);
    for i in 0..cfg.random_graphs {
        let n = 1 + i % 5;
        graphs.push((format!("random-{i}"), generate::random_graph(&mut rng, n, 0.5)));
    }
    for (name, (v, e)) in &graphs {
        let (fam, weights) = independent_set_antimatroid(v, e).map_err(err)?;
        let pp = compute_path_poset(&fam).map_err(err)?;
        let red = reduce_to_matching(&pp, &weights).map_err(err)?;
        for sense in [Sense::Min, Sense::Max] {
            let (_, want) = min_cost_feasible(&fam, &weights, sense);
            let (mu, got) =
                min_cost_stable(red.market(), &red.pair_costs, sense, cfg.node_bound).map_err(err)?;
            if got != Rational::from_integer(want) {
                return Err(format!("{name} {sense:?}: matching optimum {got}, feasible optimum {want}"));
            }
            let set = red.recover(&mu).map_err(err)?;
            if !fam.feasible.contains(&set) || cost(&weights, &set) != want {
                return Err(format!("{name} {sense:?}: recovered set {set:?} is not optimal"));
            }
            if sense == Sense::Max && want != independence_number(v, e) {
                return Err(format!("{name}: max weight {want} differs from the independence number"));
            }
        }
    }
    Ok(format!("{} graphs, both senses", graphs.len()))
}

fn cost(c: &GroundCosts, s: &ElementSet) -> i64 {
    s.iter().map(|x| c.get(x).copied().unwrap_or(0)).sum()
}

/// Checks that `ψ_S` and its inverse are mutually inverse and order-preserving
/// on one base.
pub fn check_round_trip(base: &RealizedBase, node_bound: u64, element_bound: usize) -> Outcome {
    let rp = &base.rotation_poset;
    let d = lower_sets(&rp.poset, element_bound).map_err(err)?;
    for r in &d {
        let mu = psi_s_inverse(rp, r).map_err(err)?;
        let back = psi_s(rp, &mu).map_err(err)?;
        if &back != r {
            return Err(format!("{r:?} maps back to {back:?}"));
        }
    }
    let sl = stable_lattice(&base.market, node_bound).map_err(err)?;
    let mut map = BTreeMap::new();
    for (i, mu) in sl.matchings.iter().enumerate() {
        map.insert(sl.id(i), psi_s(rp, mu).map_err(err)?);
    }
    check_set_isomorphism(&map, sl.lattice.poset(), &d).map_err(err)?;
    Ok(format!("{} lower sets", d.len()))
}

fn representation(cfg: &SuiteConfig) -> Outcome {
    let ids = |n: usize| -> Vec<String> { (1..=n).map(|i| format!("p{i}")).collect() };
    let mut bases = vec![("golden".to_string(), fixtures::golden_base().map_err(err)?)];
    let m = fixtures::golden_market();
    let extracted = extract_rotations(&m, cfg.node_bound).map_err(err)?;
    bases.push((
        "golden-extracted".to_string(),
        RealizedBase {
            market: m,
            phi: extracted.rotations.keys().map(|r| (r.clone(), r.clone())).collect(),
            rotation_poset: extracted,
        },
    ));
    for n in 0..=4 {
        bases.push((format!("antichain-{n}"), antichain_base(&ids(n)).map_err(err)?));
    }
    let mut total = 0;
    for (name, b) in &bases {
        check_round_trip(b, cfg.node_bound, cfg.element_bound).map_err(|e| format!("{name}: {e}"))?;
        total += 1;
    }
    Ok(format!("{total} one-to-one markets"))
}
