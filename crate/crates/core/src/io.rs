//! JSON documents exchanged with the command-line front end.
//!
//! Every document carries a schema version field `"v": 1` and a `"kind"`
//! tag. Inputs written by hand may omit `"kind"` when the shape is
//! unambiguous (lattices, markets, antimatroids, graphs, costs); the version
//! field is always required. All outputs are canonically ordered so that
//! identical inputs produce byte-identical files.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::antimatroid::{AntimatroidFamily, GroundCosts, Path, PairCosts, PathPoset, Rational, Reduction};
use crate::augment::{ExtendableMarket, Synthesis};
use crate::constraints::JoinConstraint;
use crate::error::{Error, Result};
use crate::market::{Matching, MatchingMarket, Pair};
use crate::order::{lattice_from_order, lattice_from_tables, ElementSet, Lattice, Poset};
use crate::realize::{RealizedBase, Rotation, RotationPoset};

/// The schema version written into and required from every document.
pub const SCHEMA_VERSION: u64 = 1;

/// Parses `text`, checks the version field and, when `kind` is given and the
/// document names a kind, that it matches.
pub fn parse_document(text: &str) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(map) = value else {
        return Err(Error::Schema("document must be a JSON object".into()));
    };
    match map.get("v") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(map),
        Some(v) => Err(Error::Schema(format!("unsupported schema version {v}"))),
        None => Err(Error::Schema("missing schema version field \"v\"".into())),
    }
}

/// The `"kind"` tag of a document, if any.
pub fn kind_of(doc: &Map<String, Value>) -> Option<&str> {
    doc.get("kind").and_then(Value::as_str)
}

fn expect_kind(doc: &Map<String, Value>, accepted: &[&str]) -> Result<()> {
    match kind_of(doc) {
        Some(k) if !accepted.contains(&k) => Err(Error::Schema(format!(
            "expected a document of kind {accepted:?}, found `{k}`"
        ))),
        _ => Ok(()),
    }
}

fn body<T: DeserializeOwned>(doc: &Map<String, Value>) -> Result<T> {
    let mut m = doc.clone();
    m.remove("v");
    m.remove("kind");
    Ok(serde_json::from_value(Value::Object(m))?)
}

/// Serializes `payload` (which must serialize to an object) with the version
/// and kind fields prepended, as pretty-printed JSON with a trailing newline.
pub fn write_document<T: Serialize>(kind: &str, payload: &T) -> Result<String> {
    let Value::Object(fields) = serde_json::to_value(payload)? else {
        return Err(Error::Schema("document payload must be an object".into()));
    };
    let mut out = Map::new();
    out.insert("v".into(), Value::from(SCHEMA_VERSION));
    out.insert("kind".into(), Value::from(kind));
    out.extend(fields);
    let mut text = serde_json::to_string_pretty(&Value::Object(out))?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------- lattices

/// A lattice or poset given by its order or by join/meet tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderDoc {
    Order {
        elements: Vec<String>,
        /// Pairs `[x, y]` meaning `x <= y`; closed reflexively and transitively on load.
        leq: Vec<Pair>,
    },
    Tables {
        elements: Vec<String>,
        join: Vec<Vec<String>>,
        meet: Vec<Vec<String>>,
    },
}

impl OrderDoc {
    /// Strict order pairs of `p`.
    pub fn from_poset(p: &Poset) -> OrderDoc {
        OrderDoc::Order {
            elements: p.elements().to_vec(),
            leq: p.strict_pairs(),
        }
    }

    pub fn poset(&self) -> Result<Poset> {
        match self {
            OrderDoc::Order { elements, leq } => Poset::from_pairs(elements, leq),
            OrderDoc::Tables { .. } => Ok(self.lattice()?.poset().clone()),
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match self {
            OrderDoc::Order { .. } => lattice_from_order(&self.poset()?),
            OrderDoc::Tables {
                elements,
                join,
                meet,
            } => lattice_from_tables(elements, join, meet),
        }
    }
}

pub fn read_lattice(text: &str) -> Result<Lattice> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["lattice", "poset"])?;
    body::<OrderDoc>(&doc)?.lattice()
}

pub fn write_lattice(l: &Lattice) -> Result<String> {
    write_document("lattice", &OrderDoc::from_poset(l.poset()))
}

// ----------------------------------------------------------------- markets

/// Reads a market, either a bare market document or the market embedded in
/// any bundle (realized base, extension, synthesis or reduction).
pub fn read_market(text: &str) -> Result<MatchingMarket> {
    let doc = parse_document(text)?;
    let market: MatchingMarket = match kind_of(&doc) {
        None | Some("market") => body(&doc)?,
        Some("realized_base" | "extension" | "synthesis" | "reduction") => {
            serde_json::from_value(doc.get("market").cloned().ok_or_else(|| {
                Error::Schema("bundle has no `market` field".into())
            })?)?
        }
        Some(k) => return Err(Error::Schema(format!("document of kind `{k}` holds no market"))),
    };
    market.validate()?;
    Ok(market)
}

pub fn write_market(m: &MatchingMarket) -> Result<String> {
    write_document("market", m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingsDoc {
    pub count: usize,
    pub matchings: Vec<Matching>,
}

pub fn write_matchings(ms: &[Matching]) -> Result<String> {
    write_document(
        "matchings",
        &MatchingsDoc {
            count: ms.len(),
            matchings: ms.to_vec(),
        },
    )
}

pub fn read_matchings(text: &str) -> Result<Vec<Matching>> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["matchings"])?;
    Ok(body::<MatchingsDoc>(&doc)?.matchings)
}

// --------------------------------------------------------------- rotations

/// A rotation poset: rotations, their strict precedence pairs and the
/// worker-optimal matching they apply to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationsDoc {
    pub mu_w: Matching,
    pub rotations: Vec<Rotation>,
    /// Pairs `[r, s]` meaning `r` precedes `s`.
    pub precedes: Vec<Pair>,
}

impl RotationsDoc {
    pub fn from_poset(rp: &RotationPoset) -> RotationsDoc {
        RotationsDoc {
            mu_w: rp.mu_w.clone(),
            rotations: rp.rotations.values().cloned().collect(),
            precedes: rp.poset.strict_pairs(),
        }
    }

    pub fn to_poset(&self) -> Result<RotationPoset> {
        let ids: Vec<String> = self.rotations.iter().map(|r| r.id.clone()).collect();
        let poset = Poset::from_pairs(&ids, &self.precedes)?;
        let rotations = self
            .rotations
            .iter()
            .map(|r| (r.id.clone(), r.clone()))
            .collect();
        Ok(RotationPoset {
            poset,
            rotations,
            mu_w: self.mu_w.clone(),
        })
    }
}

pub fn write_rotations(rp: &RotationPoset) -> Result<String> {
    write_document("rotations", &RotationsDoc::from_poset(rp))
}

pub fn read_rotations(text: &str) -> Result<RotationPoset> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["rotations"])?;
    body::<RotationsDoc>(&doc)?.to_poset()
}

/// A one-to-one market with its rotation poset and the element → rotation map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedBaseDoc {
    pub market: MatchingMarket,
    #[serde(flatten)]
    pub rotations: RotationsDoc,
    pub phi: BTreeMap<String, String>,
}

impl RealizedBaseDoc {
    pub fn from_base(b: &RealizedBase) -> RealizedBaseDoc {
        RealizedBaseDoc {
            market: b.market.clone(),
            rotations: RotationsDoc::from_poset(&b.rotation_poset),
            phi: b.phi.clone(),
        }
    }

    /// Rebuilds the base, checking that the market is well formed and that
    /// `phi` is a bijection onto the rotation ids.
    pub fn to_base(&self) -> Result<RealizedBase> {
        self.market.validate()?;
        let rotation_poset = self.rotations.to_poset()?;
        let targets: BTreeSet<&String> = self.phi.values().collect();
        let ids: BTreeSet<&String> = rotation_poset.rotations.keys().collect();
        if targets.len() != self.phi.len() || targets != ids {
            return Err(Error::Schema("phi must be a bijection onto the rotation ids".into()));
        }
        Ok(RealizedBase {
            market: self.market.clone(),
            phi: self.phi.clone(),
            rotation_poset,
        })
    }
}

pub fn write_realized_base(b: &RealizedBase) -> Result<String> {
    write_document("realized_base", &RealizedBaseDoc::from_base(b))
}

pub fn read_realized_base(text: &str) -> Result<RealizedBase> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["realized_base"])?;
    body::<RealizedBaseDoc>(&doc)?.to_base()
}

// -------------------------------------------------------------- extensions

/// An augmented market with all bookkeeping needed to project its matchings
/// back onto the base and to apply further augmentations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionDoc {
    pub market: MatchingMarket,
    pub copy_map: BTreeMap<String, String>,
    pub aux_workers: BTreeSet<String>,
    pub aux_firms: BTreeSet<String>,
    pub a_f: BTreeMap<String, Vec<Pair>>,
    pub augment_count: usize,
    pub applied: Vec<JoinConstraint>,
    pub base: RealizedBaseDoc,
}

impl ExtensionDoc {
    pub fn from_extension(em: &ExtendableMarket) -> ExtensionDoc {
        ExtensionDoc {
            market: em.market.clone(),
            copy_map: em.copy_map.clone(),
            aux_workers: em.aux_workers.clone(),
            aux_firms: em.aux_firms.clone(),
            a_f: em.a_f.clone(),
            augment_count: em.augment_count,
            applied: em.applied.clone(),
            base: RealizedBaseDoc::from_base(&em.base),
        }
    }

    pub fn to_extension(&self) -> Result<ExtendableMarket> {
        self.market.validate()?;
        let base = self.base.to_base()?;
        for (copy, orig) in &self.copy_map {
            if !self.market.is_worker(copy) || !base.market.is_worker(orig) {
                return Err(Error::Schema(format!(
                    "copy map entry `{copy}` → `{orig}` does not name a worker and a base worker"
                )));
            }
        }
        Ok(ExtendableMarket {
            market: self.market.clone(),
            base,
            copy_map: self.copy_map.clone(),
            aux_workers: self.aux_workers.clone(),
            aux_firms: self.aux_firms.clone(),
            a_f: self.a_f.clone(),
            augment_count: self.augment_count,
            applied: self.applied.clone(),
        })
    }
}

/// A synthesized market: the extension, the lattice it realizes and the
/// element → stable matching table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisDoc {
    #[serde(flatten)]
    pub extension: ExtensionDoc,
    pub lattice: OrderDoc,
    pub iso: BTreeMap<String, Matching>,
}

pub fn write_synthesis(l: &Lattice, s: &Synthesis) -> Result<String> {
    write_document(
        "synthesis",
        &SynthesisDoc {
            extension: ExtensionDoc::from_extension(&s.extension),
            lattice: OrderDoc::from_poset(l.poset()),
            iso: s.iso.clone(),
        },
    )
}

pub fn write_extension(em: &ExtendableMarket) -> Result<String> {
    write_document("extension", &ExtensionDoc::from_extension(em))
}

/// Reads the extension held by an extension, synthesis or reduction bundle.
pub fn read_extension(text: &str) -> Result<ExtendableMarket> {
    let doc = parse_document(text)?;
    match kind_of(&doc) {
        Some("extension") => body::<ExtensionDoc>(&doc)?.to_extension(),
        Some("synthesis") => body::<SynthesisDoc>(&doc)?.extension.to_extension(),
        Some("reduction") => body::<ReductionDoc>(&doc)?.extension.to_extension(),
        _ => Err(Error::Schema("expected an extension, synthesis or reduction bundle".into())),
    }
}

pub fn read_synthesis(text: &str) -> Result<SynthesisDoc> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["synthesis"])?;
    body(&doc)
}

// ------------------------------------------------------------- antimatroids

/// An antimatroid given by its feasible sets or by its paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AntimatroidDoc {
    Feasible {
        ground: Vec<String>,
        feasible: Vec<ElementSet>,
    },
    Paths {
        ground: Vec<String>,
        paths: Vec<Path>,
    },
}

/// Either description of an antimatroid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AntimatroidInput {
    Family(AntimatroidFamily),
    Paths(PathPoset),
}

pub fn read_antimatroid(text: &str) -> Result<AntimatroidInput> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["antimatroid"])?;
    Ok(match body::<AntimatroidDoc>(&doc)? {
        AntimatroidDoc::Feasible { ground, feasible } => {
            AntimatroidInput::Family(AntimatroidFamily { ground, feasible })
        }
        AntimatroidDoc::Paths { ground, paths } => AntimatroidInput::Paths(PathPoset { ground, paths }),
    })
}

pub fn write_antimatroid(fam: &AntimatroidFamily) -> Result<String> {
    write_document(
        "antimatroid",
        &AntimatroidDoc::Feasible {
            ground: fam.ground.clone(),
            feasible: fam.feasible.clone(),
        },
    )
}

/// An undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<Pair>,
}

pub fn read_graph(text: &str) -> Result<GraphDoc> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["graph"])?;
    body(&doc)
}

pub fn write_graph(g: &GraphDoc) -> Result<String> {
    write_document("graph", g)
}

// ------------------------------------------------------------------- costs

/// Integer costs on ground elements, or exact rational costs on pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Costs {
    Ground(GroundCosts),
    Pairs(PairCosts),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CostsDoc {
    Ground { ground: GroundCosts },
    Pairs { pairs: Vec<(String, String, i64, i64)> },
}

fn pair_rows(c: &PairCosts) -> Vec<(String, String, i64, i64)> {
    c.iter()
        .map(|((f, w), r)| (f.clone(), w.clone(), *r.numer(), *r.denom()))
        .collect()
}

pub fn read_costs(text: &str) -> Result<Costs> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["costs"])?;
    Ok(match body::<CostsDoc>(&doc)? {
        CostsDoc::Ground { ground } => Costs::Ground(ground),
        CostsDoc::Pairs { pairs } => {
            let mut out = PairCosts::new();
            for (f, w, num, den) in pairs {
                if den == 0 {
                    return Err(Error::Schema(format!("zero denominator for pair ({f}, {w})")));
                }
                if out.insert((f.clone(), w.clone()), Ratio::new(num, den)).is_some() {
                    return Err(Error::Schema(format!("pair ({f}, {w}) listed twice")));
                }
            }
            Costs::Pairs(out)
        }
    })
}

pub fn write_costs(c: &Costs) -> Result<String> {
    match c {
        Costs::Ground(g) => write_document("costs", &CostsDoc::Ground { ground: g.clone() }),
        Costs::Pairs(p) => write_document("costs", &CostsDoc::Pairs { pairs: pair_rows(p) }),
    }
}

/// Serializes an exact value as `[numerator, denominator]`.
pub fn rational_json(r: &Rational) -> Value {
    Value::from(vec![*r.numer(), *r.denom()])
}

// -------------------------------------------------------------- reductions

/// The market of a cost-preserving reduction from an antimatroid, with its
/// pair costs and the table mapping rotations back to ground elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionDoc {
    #[serde(flatten)]
    pub extension: ExtensionDoc,
    pub ground: Vec<String>,
    pub ground_costs: GroundCosts,
    /// Rows `[firm, worker, numerator, denominator]`.
    pub pair_costs: Vec<(String, String, i64, i64)>,
    /// Rotation id → ground element; a stable matching corresponds to the
    /// ground elements whose rotations it has not applied.
    pub recover: BTreeMap<String, String>,
}

pub fn write_reduction(r: &Reduction, ground_costs: &GroundCosts) -> Result<String> {
    write_document(
        "reduction",
        &ReductionDoc {
            extension: ExtensionDoc::from_extension(&r.extension),
            ground: r.extension.base.phi.keys().cloned().collect(),
            ground_costs: ground_costs.clone(),
            pair_costs: pair_rows(&r.pair_costs),
            recover: r.extension.base.phi_inverse(),
        },
    )
}

pub fn read_reduction(text: &str) -> Result<Reduction> {
    let doc = parse_document(text)?;
    expect_kind(&doc, &["reduction"])?;
    let d: ReductionDoc = body(&doc)?;
    let extension = d.extension.to_extension()?;
    let mut pair_costs = PairCosts::new();
    for (f, w, num, den) in d.pair_costs {
        if den == 0 {
            return Err(Error::Schema(format!("zero denominator for pair ({f}, {w})")));
        }
        pair_costs.insert((f, w), Ratio::new(num, den));
    }
    let constraints = extension.applied.clone();
    Ok(Reduction {
        extension,
        pair_costs,
        constraints,
    })
}
