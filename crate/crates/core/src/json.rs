//! JSON documents for inputs and reports.
//!
//! Fractions travel as strings (`"1/2"`), elements as coordinate arrays, and
//! element-keyed maps use the array text as key (`{"[2]": "1/2"}`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::abelian::{Character, CocycleTable, Coset, Element, FiniteAbelianGroup, Phase, Subgroup};
use crate::crossed::CrossedProductBlocks;
use crate::diagram::{DiagramEdge, EnrichedBratteliDiagram};
use crate::equivalence::{Certificate, CertificateKind, Verdict, Witness};
use crate::error::{invalid, Error, Result};
use crate::invariant::{InvariantData, PointedValue};
use crate::k0::{IntMatrix, K0Description, RankOneForm};
use crate::qsys::{FusionTable, QSystem, QSystemSet, SimpleBimodule};

pub fn element_key(a: &Element) -> String {
    let c: Vec<String> = a.coords().iter().map(u64::to_string).collect();
    format!("[{}]", c.join(","))
}

fn parse_key(g: &FiniteAbelianGroup, key: &str) -> Result<Element> {
    let coords: Vec<i64> = serde_json::from_str(key).map_err(|_| Error::InvalidInput(format!("bad element key {key:?}")))?;
    g.element(&coords)
}

fn parse_phase(s: &str) -> Result<Phase> {
    s.trim().parse::<Phase>().map_err(|_| Error::InvalidInput(format!("bad fraction {s:?}")))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|_| Error::InvalidInput(format!("bad fraction {s:?}")))
}

fn coords(a: &Element) -> Vec<i64> {
    a.coords().iter().map(|&c| c as i64).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub cyclic_factors: Vec<i64>,
}

impl GroupDoc {
    pub fn of(g: &FiniteAbelianGroup) -> Self {
        Self { cyclic_factors: g.factors().iter().map(|&f| f as i64).collect() }
    }

    pub fn build(&self) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::new(&self.cyclic_factors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleEntry {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupDoc {
    pub generators: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<CocycleEntry>>,
}

impl SubgroupDoc {
    pub fn of(h: &Subgroup) -> Self {
        Self { generators: h.generators().iter().map(coords).collect(), cocycle: None }
    }

    pub fn build(&self, g: &FiniteAbelianGroup) -> Result<Subgroup> {
        let gens: Vec<Element> = self.generators.iter().map(|c| g.element(c)).collect::<Result<_>>()?;
        Subgroup::generated_by(g, &gens)
    }

    /// The Q-system, validating any cocycle.
    pub fn qsystem(&self, g: &FiniteAbelianGroup) -> Result<QSystem> {
        let h = self.build(g)?;
        match &self.cocycle {
            None => Ok(QSystem::untwisted(&h)),
            Some(entries) => {
                let parsed = entries
                    .iter()
                    .map(|e| Ok(((g.element(&e.a)?, g.element(&e.b)?), parse_phase(&e.value)?)))
                    .collect::<Result<Vec<_>>>()?;
                QSystem::with_cocycle(CocycleTable::from_entries(&h, parsed))
            }
        }
    }

    /// The subgroup of an untwisted Q-system; twisted ones are unsupported.
    pub fn untwisted(&self, g: &FiniteAbelianGroup) -> Result<Subgroup> {
        let q = self.qsystem(g)?;
        q.require_untwisted()?;
        Ok(q.subgroup().clone())
    }
}

pub type CharacterMap = BTreeMap<String, String>;

/// Values on a generating set of the domain.
pub fn character_map(chi: &Character) -> CharacterMap {
    chi.domain()
        .generators()
        .iter()
        .map(|a| (element_key(a), chi.value(a).expect("generator in domain").to_string()))
        .collect()
}

pub fn parse_character(domain: &Subgroup, map: &CharacterMap) -> Result<Character> {
    let g = domain.parent();
    let assigned = map
        .iter()
        .map(|(k, v)| Ok((parse_key(g, k)?, parse_phase(v)?)))
        .collect::<Result<Vec<_>>>()?;
    if assigned.is_empty() {
        if domain.order() == 1 {
            return Ok(Character::trivial(domain));
        }
        return invalid(format!("character on {domain} needs values"));
    }
    let mut with_zero = assigned;
    with_zero.push((g.zero(), Phase::from_integer(0)));
    Character::from_assignments(domain, &with_zero)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterDoc {
    pub theta: CharacterMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleDoc {
    pub source_generators: Vec<Vec<i64>>,
    pub target_generators: Vec<Vec<i64>>,
    pub coset_rep: Vec<i64>,
    #[serde(default)]
    pub character: CharacterMap,
}

impl BimoduleDoc {
    pub fn of(s: &SimpleBimodule) -> Self {
        Self {
            source_generators: SubgroupDoc::of(s.source()).generators,
            target_generators: SubgroupDoc::of(s.target()).generators,
            coset_rep: coords(s.coset().rep()),
            character: character_map(s.character()),
        }
    }

    pub fn build(&self, g: &FiniteAbelianGroup) -> Result<SimpleBimodule> {
        let sub = |gens: &Vec<Vec<i64>>| SubgroupDoc { generators: gens.clone(), cocycle: None }.build(g);
        let (h, k) = (sub(&self.source_generators)?, sub(&self.target_generators)?);
        let coset = Coset::of(&h.sum(&k), &g.element(&self.coset_rep)?);
        let chi = parse_character(&h.intersect(&k), &self.character)?;
        SimpleBimodule::new(&h, &k, coset, chi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<usize>,
    pub bimodule: BimoduleDoc,
    #[serde(default = "one")]
    pub multiplicity: u64,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

/// Homogeneous shorthand (`vertex` + `edge`) or full form (`levels` + `edges`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub group: GroupDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<SubgroupDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<Vec<EdgeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<SubgroupDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Vec<EdgeDoc>>>,
    #[serde(default = "yes")]
    pub stationary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_weights: Option<Vec<u64>>,
}

impl DiagramDoc {
    pub fn build(&self) -> Result<EnrichedBratteliDiagram> {
        let g = self.group.build()?;
        let weights = self.generator_weights.clone();
        match (&self.vertex, &self.edge, &self.levels, &self.edges) {
            (Some(v), Some(es), None, None) => {
                if !self.stationary {
                    return invalid("the homogeneous shorthand is always stationary");
                }
                let h = v.untwisted(&g)?;
                let edges = es.iter().map(|e| Ok((e.bimodule.build(&g)?, e.multiplicity))).collect::<Result<Vec<_>>>()?;
                EnrichedBratteliDiagram::homogeneous(&g, &h, edges, weights)
            }
            (None, None, Some(levels), Some(blocks)) => {
                let levels = levels
                    .iter()
                    .map(|l| l.iter().map(|v| v.untwisted(&g)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let edges = blocks
                    .iter()
                    .map(|b| {
                        b.iter()
                            .map(|e| {
                                Ok(DiagramEdge {
                                    from: e.from.unwrap_or(0),
                                    to: e.to.unwrap_or(0),
                                    bimodule: e.bimodule.build(&g)?,
                                    multiplicity: e.multiplicity,
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                EnrichedBratteliDiagram::new(&g, levels, edges, self.stationary, weights)
            }
            _ => invalid("a diagram needs either \"vertex\" and \"edge\" or \"levels\" and \"edges\""),
        }
    }

    /// Full-form document of a diagram.
    pub fn of(d: &EnrichedBratteliDiagram) -> Self {
        let levels = d.levels().iter().map(|l| l.iter().map(SubgroupDoc::of).collect()).collect();
        let edges = d
            .edges()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|e| EdgeDoc {
                        from: Some(e.from),
                        to: Some(e.to),
                        bimodule: BimoduleDoc::of(&e.bimodule),
                        multiplicity: e.multiplicity,
                    })
                    .collect()
            })
            .collect();
        Self {
            group: GroupDoc::of(d.group()),
            vertex: None,
            edge: None,
            levels: Some(levels),
            edges: Some(edges),
            stationary: d.is_stationary(),
            generator_weights: Some(d.generator_weights().to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl MatrixDoc {
    pub fn of(m: &IntMatrix, labels: Vec<String>) -> Result<Self> {
        let rows = m.to_i64_rows().ok_or_else(|| Error::ResourceLimit("matrix entry exceeds 64 bits".into()))?;
        Ok(Self { rows, labels })
    }

    pub fn build(&self) -> Result<IntMatrix> {
        IntMatrix::from_rows(&self.rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankOneDoc {
    pub lambda: String,
    pub v: Vec<String>,
    pub primes: Vec<u64>,
    pub scale: String,
}

impl RankOneDoc {
    fn of(r: &RankOneForm, normalization: &BigRational) -> Self {
        let scale = crate::k0::s_free_part(&(&r.localization().scale * normalization), &r.primes);
        Self {
            lambda: r.lambda.to_string(),
            v: r.v.iter().map(BigInt::to_string).collect(),
            primes: r.primes.clone(),
            scale: scale.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum K0Doc {
    RankOne {
        #[serde(flatten)]
        form: RankOneDoc,
        display: String,
    },
    DirectSum {
        blocks: Vec<RankOneDoc>,
        partition: Vec<Vec<usize>>,
        display: String,
    },
    Opaque {
        rows: Vec<Vec<String>>,
        rank: usize,
    },
}

impl K0Doc {
    pub fn of(d: &K0Description, normalization: &BigRational) -> Self {
        match d {
            K0Description::RankOne(r) => {
                let form = RankOneDoc::of(r, normalization);
                let display = if normalization == &BigRational::from_integer(1.into()) {
                    d.to_string()
                } else {
                    format!("{}*Z[1/{}]", form.scale, r.lambda)
                };
                K0Doc::RankOne { form, display }
            }
            K0Description::DirectSum(ds) => K0Doc::DirectSum {
                blocks: ds.blocks.iter().map(|b| RankOneDoc::of(b, normalization)).collect(),
                partition: ds.partition.clone(),
                display: d.to_string(),
            },
            K0Description::Opaque(m) => K0Doc::Opaque {
                rows: m.to_rows().iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect(),
                rank: d.rank(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub name: String,
    pub subgroup: SubgroupDoc,
    pub k0: Option<K0Doc>,
    pub matrix: Option<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub index: usize,
    pub label: String,
    pub source: String,
    pub target: String,
    pub multiplier: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointedDoc {
    Rational(String),
    Vector(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantDoc {
    pub group: GroupDoc,
    pub objects: Vec<ObjectDoc>,
    pub morphisms: Vec<MorphismDoc>,
    pub pointed: PointedDoc,
}

impl InvariantDoc {
    pub fn of(inv: &InvariantData) -> Result<Self> {
        let t = inv.table();
        let objects = inv
            .objects()
            .iter()
            .map(|o| {
                let matrix = match o.diagram.tail() {
                    Some(m) => {
                        let labels = o.diagram.bases.last().expect("levels").iter().map(|&(_, i)| t.label(i)).collect();
                        Some(MatrixDoc::of(m, labels)?)
                    }
                    None => None,
                };
                Ok(ObjectDoc {
                    name: o.name.clone(),
                    subgroup: SubgroupDoc::of(t.qsystems().subgroup(o.index)),
                    k0: o.k0.as_ref().map(|k| K0Doc::of(k, &o.normalization)),
                    matrix,
                })
            })
            .collect::<Result<_>>()?;
        let names: Vec<&String> = inv.objects().iter().map(|o| &o.name).collect();
        let morphisms = inv
            .morphisms()
            .iter()
            .map(|m| MorphismDoc {
                index: m.simple,
                label: m.label.clone(),
                source: names[m.source].clone(),
                target: names[m.target].clone(),
                multiplier: m.multiplier.as_ref().map(ToString::to_string),
            })
            .collect();
        let pointed = match inv.pointed() {
            PointedValue::Rational(q) => PointedDoc::Rational(q.to_string()),
            PointedValue::Vector(v) => PointedDoc::Vector(v.iter().map(BigInt::to_string).collect()),
        };
        Ok(Self { group: GroupDoc::of(inv.group()), objects, morphisms, pointed })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub object: String,
    pub kind: String,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase", deny_unknown_fields)]
pub enum VerdictDoc {
    Equivalent { witness: serde_json::Map<String, serde_json::Value> },
    Inequivalent { certificate: CertificateDoc },
    Unknown { reason: String },
}

impl VerdictDoc {
    pub fn of(v: &Verdict) -> Self {
        match v {
            Verdict::Equivalent(w) => VerdictDoc::Equivalent {
                witness: w.names.iter().zip(&w.values).map(|(n, u)| (n.clone(), u.to_string().into())).collect(),
            },
            Verdict::Inequivalent(c) => VerdictDoc::Inequivalent {
                certificate: CertificateDoc { object: c.object.clone(), kind: c.kind.as_str().into(), details: c.details.clone() },
            },
            Verdict::Unknown(r) => VerdictDoc::Unknown { reason: r.clone() },
        }
    }

    pub fn build(&self) -> Result<Verdict> {
        Ok(match self {
            VerdictDoc::Equivalent { witness } => {
                let mut w = Witness { names: Vec::new(), values: Vec::new() };
                for (k, v) in witness {
                    let s = v.as_str().ok_or_else(|| Error::InvalidInput("witness values are fraction strings".into()))?;
                    w.names.push(k.clone());
                    w.values.push(parse_rational(s)?);
                }
                Verdict::Equivalent(w)
            }
            VerdictDoc::Inequivalent { certificate: c } => {
                let kind = [
                    CertificateKind::Rank,
                    CertificateKind::PrimeSet,
                    CertificateKind::ConstraintInconsistency,
                    CertificateKind::UnitObstruction,
                    CertificateKind::PointedObstruction,
                ]
                .into_iter()
                .find(|k| k.as_str() == c.kind)
                .ok_or_else(|| Error::InvalidInput(format!("unknown certificate kind {:?}", c.kind)))?;
                Verdict::Inequivalent(Certificate { object: c.object.clone(), kind, details: c.details.clone() })
            }
            VerdictDoc::Unknown { reason } => Verdict::Unknown(reason.clone()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub index: usize,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimpleDoc {
    pub index: usize,
    pub label: String,
    pub bimodule: BimoduleDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionTableDoc {
    pub group: GroupDoc,
    pub simples: Vec<SimpleDoc>,
    /// `"i,j"` to the summands of `simples[i] ⊠ simples[j]`.
    pub products: BTreeMap<String, Vec<ProductEntry>>,
}

impl FusionTableDoc {
    pub fn of(t: &FusionTable) -> Self {
        let simples = t
            .simples()
            .iter()
            .enumerate()
            .map(|(i, s)| SimpleDoc { index: i, label: t.label(i), bimodule: BimoduleDoc::of(s) })
            .collect();
        let products = t
            .products()
            .iter()
            .map(|(&(i, j), p)| {
                (format!("{i},{j}"), p.iter().map(|&(index, multiplicity)| ProductEntry { index, multiplicity }).collect())
            })
            .collect();
        Self { group: GroupDoc::of(t.group()), simples, products }
    }

    /// Look up a product by labels.
    pub fn product_labels(&self, a: &str, b: &str) -> Option<Vec<(String, u64)>> {
        let i = self.simples.iter().find(|s| s.label == a)?.index;
        let j = self.simples.iter().find(|s| s.label == b)?.index;
        let p = self.products.get(&format!("{i},{j}"))?;
        Some(p.iter().map(|e| (self.simples[e.index].label.clone(), e.multiplicity)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QSystemDoc {
    pub name: String,
    pub generators: Vec<Vec<i64>>,
    pub order: u64,
    pub cyclic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QSystemsDoc {
    pub group: GroupDoc,
    pub qsystems: Vec<QSystemDoc>,
    pub warning: Option<String>,
}

impl QSystemsDoc {
    pub fn of(qs: &QSystemSet) -> Self {
        let qsystems = (0..qs.len())
            .map(|i| {
                let h = qs.subgroup(i);
                QSystemDoc { name: qs.name(i), generators: SubgroupDoc::of(h).generators, order: h.order(), cyclic: h.is_cyclic() }
            })
            .collect();
        Self { group: GroupDoc::of(qs.group()), qsystems, warning: qs.warning().map(str::to_string) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub size: usize,
    pub orbit: usize,
    pub character: CharacterMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossedDoc {
    /// Each orbit as the representatives of its points in `G/K`.
    pub orbits: Vec<Vec<Vec<i64>>>,
    pub stabilizer: SubgroupDoc,
    pub blocks: Vec<BlockDoc>,
    pub rank: usize,
}

impl CrossedDoc {
    pub fn of(b: &CrossedProductBlocks) -> Self {
        Self {
            orbits: b.orbits.iter().map(|o| o.iter().map(|&i| coords(b.points[i].rep())).collect()).collect(),
            stabilizer: SubgroupDoc::of(&b.stabilizer),
            blocks: b
                .blocks
                .iter()
                .map(|x| BlockDoc { size: x.size, orbit: x.orbit, character: character_map(&x.character) })
                .collect(),
            rank: b.blocks.len(),
        }
    }
}

/// Parse a document from text, mapping schema errors to invalid input.
pub fn from_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed document: {e}")))
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(doc: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}
