//! The pointed invariant of an enriched Bratteli diagram.
//!
//! For each representative Q-system `P` the diagram induces a Bratteli system
//! whose level-`n` basis is `hom(Q_v → P)` over the vertices `v` of level `n`;
//! its limit is `F̂(P)`. Each simple bimodule `X: P → Q` induces a ladder
//! `x ↦ x ⊠ X` between two such systems, and the pointed value is the class of
//! the generator in `F̂(1_C)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::abelian::Subgroup;
use crate::diagram::EnrichedBratteliDiagram;
use crate::error::{internal, invalid, Error, Result};
use crate::k0::{morphism_multiplier, s_free_part, stationary_k0, value_map, IntMatrix, K0Description, ScaledLocalization, StationarySystem};
use crate::qsys::{fusion_table, simple_bimodules, FusionTable, SimpleBimodule};

/// Level basis `hom(Q_v → P)`: the simple `Q_v – P` bimodules in canonical order.
pub fn hom_basis(p: &Subgroup, v: &Subgroup) -> Vec<SimpleBimodule> {
    simple_bimodules(v, p)
}

/// Bratteli system computing `F̂(P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectDiagram {
    /// Per level, `(vertex, table index)` of each basis element.
    pub bases: Vec<Vec<(usize, usize)>>,
    /// `maps[n]` sends level `n` to level `n+1`; for stationary diagrams the
    /// last map is the repeating square block on the last level.
    pub maps: Vec<IntMatrix>,
    pub stationary: bool,
}

impl ObjectDiagram {
    /// The repeating block, if the diagram is stationary.
    pub fn tail(&self) -> Option<&IntMatrix> {
        if self.stationary {
            self.maps.last()
        } else {
            None
        }
    }

    /// Push a level-0 vector through the non-repeating prefix.
    pub fn push_to_tail(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let prefix = if self.stationary { self.maps.len() - 1 } else { self.maps.len() };
        let mut x = x.to_vec();
        for m in &self.maps[..prefix] {
            x = m.apply(&x)?;
        }
        Ok(x)
    }
}

fn vertex_index(table: &FusionTable, v: &Subgroup) -> Result<usize> {
    table
        .qsystems()
        .index_of(v)
        .ok_or_else(|| Error::InvalidInput(format!("vertex {v} is not a representative Q-system")))
}

fn level_basis(table: &FusionTable, level: &[Subgroup], p: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (vi, v) in level.iter().enumerate() {
        for idx in table.block(vertex_index(table, v)?, p) {
            out.push((vi, idx));
        }
    }
    Ok(out)
}

fn position(basis: &[(usize, usize)], vertex: usize, idx: usize) -> Result<usize> {
    basis
        .iter()
        .position(|&b| b == (vertex, idx))
        .ok_or_else(|| Error::InternalConsistency("fusion product left the level basis".into()))
}

/// The Bratteli system of `P` (a representative index).
pub fn object_diagram(table: &FusionTable, d: &EnrichedBratteliDiagram, p: usize) -> Result<ObjectDiagram> {
    let bases: Vec<Vec<(usize, usize)>> =
        d.levels().iter().map(|level| level_basis(table, level, p)).collect::<Result<_>>()?;
    let mut maps = Vec::with_capacity(d.edges().len());
    for (n, block) in d.edges().iter().enumerate() {
        let cols = &bases[n];
        let rows = bases.get(n + 1).unwrap_or(&bases[n]);
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for e in block {
            let ei = table
                .index_of(&e.bimodule)
                .ok_or_else(|| Error::InvalidInput("edge bimodule is not between representatives".into()))?;
            for (c, &(vx, x)) in cols.iter().enumerate() {
                if vx != e.from {
                    continue;
                }
                let prod = table.product(ei, x).ok_or_else(|| Error::InternalConsistency("edge does not compose".into()))?;
                for &(y, mult) in prod {
                    let r = position(rows, e.to, y)?;
                    let cur = m.get(r, c).clone();
                    m.set(r, c, cur + BigInt::from(e.multiplicity * mult));
                }
            }
        }
        maps.push(m);
    }
    Ok(ObjectDiagram { bases, maps, stationary: d.is_stationary() })
}

/// Per-level ladder matrices of `X` (a table index), checked to intertwine.
pub fn morphism_matrices(
    table: &FusionTable,
    x: usize,
    source: &ObjectDiagram,
    target: &ObjectDiagram,
) -> Result<Vec<IntMatrix>> {
    let mut mats = Vec::with_capacity(source.bases.len());
    for (cols, rows) in source.bases.iter().zip(&target.bases) {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (c, &(v, y)) in cols.iter().enumerate() {
            let prod = table.product(y, x).ok_or_else(|| Error::InvalidComposition("ladder does not compose".into()))?;
            for &(z, mult) in prod {
                let r = position(rows, v, z)?;
                let cur = m.get(r, c).clone();
                m.set(r, c, cur + BigInt::from(mult));
            }
        }
        mats.push(m);
    }
    for n in 0..source.maps.len() {
        let next = mats.get(n + 1).unwrap_or(&mats[n]);
        if next.mul(&source.maps[n])? != target.maps[n].mul(&mats[n])? {
            return internal(format!("ladder of {} fails to intertwine at level {n}", table.label(x)));
        }
    }
    Ok(mats)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectInvariant {
    pub index: usize,
    pub name: String,
    pub diagram: ObjectDiagram,
    /// `None` when the diagram is not eventually stationary.
    pub k0: Option<K0Description>,
    /// Extra factor applied to the value map; `1` unless rescaled.
    pub normalization: BigRational,
}

impl ObjectInvariant {
    pub fn rank_one(&self) -> Option<&crate::k0::RankOneForm> {
        self.k0.as_ref().and_then(K0Description::as_rank_one)
    }

    /// Image of the normalized value map.
    pub fn localization(&self) -> Option<ScaledLocalization> {
        self.rank_one().map(|r| {
            let loc = r.localization();
            ScaledLocalization { scale: s_free_part(&(&loc.scale * &self.normalization), &loc.primes), primes: loc.primes }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismInvariant {
    pub simple: usize,
    pub label: String,
    pub source: usize,
    pub target: usize,
    pub multiplier: Option<BigRational>,
    /// Ladder matrix on the repeating (or last) level.
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointedValue {
    Rational(BigRational),
    /// Level-0 weight vector, when `F̂(1_C)` is not identified.
    Vector(Vec<BigInt>),
}

impl std::fmt::Display for PointedValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointedValue::Rational(q) => write!(f, "{q}"),
            PointedValue::Vector(v) => {
                let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

/// `(F̂, [A])` restricted to representatives and simple bimodules.
#[derive(Clone, Debug)]
pub struct InvariantData {
    table: Arc<FusionTable>,
    objects: Vec<ObjectInvariant>,
    morphisms: Vec<MorphismInvariant>,
    pointed: PointedValue,
}

impl InvariantData {
    pub fn table(&self) -> &Arc<FusionTable> {
        &self.table
    }

    pub fn group(&self) -> &crate::abelian::FiniteAbelianGroup {
        self.table.group()
    }

    pub fn objects(&self) -> &[ObjectInvariant] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[MorphismInvariant] {
        &self.morphisms
    }

    pub fn pointed(&self) -> &PointedValue {
        &self.pointed
    }

    pub fn multiplier(&self, simple: usize) -> Option<&BigRational> {
        self.morphisms[simple].multiplier.as_ref()
    }

    pub fn ranks(&self) -> Vec<Option<usize>> {
        self.objects.iter().map(|o| o.k0.as_ref().map(K0Description::rank)).collect()
    }

    /// Multiply the value map of each object by `factors[P] > 0`.
    ///
    /// Multipliers become `q·c_Q/c_P` and the pointed value `c_{1}·p`.
    pub fn rescaled(&self, factors: &[BigRational]) -> Result<InvariantData> {
        if factors.len() != self.objects.len() || factors.iter().any(|c| c <= &BigRational::zero()) {
            return invalid("one positive factor per representative is required");
        }
        let mut out = self.clone();
        for (o, c) in out.objects.iter_mut().zip(factors) {
            o.normalization = &o.normalization * c;
        }
        for m in &mut out.morphisms {
            if let Some(q) = &m.multiplier {
                m.multiplier = Some(q * &factors[m.target] / &factors[m.source]);
            }
        }
        if let PointedValue::Rational(p) = &out.pointed {
            out.pointed = PointedValue::Rational(p * &factors[0]);
        }
        Ok(out)
    }

    /// `q(X)·q(Y) = Σ m_Z·q(Z)` over every table product with identified factors,
    /// and `q(id) = 1`.
    pub fn check_functoriality(&self) -> Result<()> {
        for (&(i, j), prod) in self.table.products() {
            let (Some(a), Some(b)) = (self.multiplier(i), self.multiplier(j)) else { continue };
            let mut sum = BigRational::zero();
            let mut complete = true;
            for &(z, m) in prod {
                match self.multiplier(z) {
                    Some(q) => sum += q * BigRational::from_integer(m.into()),
                    None => complete = false,
                }
            }
            if complete && a * b != sum {
                return internal(format!(
                    "multipliers of {} and {} do not compose",
                    self.table.label(i),
                    self.table.label(j)
                ));
            }
        }
        for m in &self.morphisms {
            let s = self.table.simple(m.simple);
            if s.source() == s.target() && s.coset().rep().is_zero() && s.character().is_trivial() {
                if let Some(q) = &m.multiplier {
                    if !q.is_one() {
                        return internal(format!("identity {} has multiplier {q}", m.label));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Compute the invariant against a prebuilt fusion table.
pub fn compute_invariant_with(table: Arc<FusionTable>, d: &EnrichedBratteliDiagram) -> Result<InvariantData> {
    if table.group() != d.group() {
        return invalid("diagram and fusion table live over different groups");
    }
    let reps = table.qsystems().len();
    let objects: Vec<ObjectInvariant> = (0..reps)
        .into_par_iter()
        .map(|p| {
            let diagram = object_diagram(&table, d, p)?;
            let k0 = match diagram.tail() {
                Some(a) => {
                    let labels = diagram.bases.last().expect("nonempty").iter().map(|&(_, i)| table.label(i)).collect();
                    Some(stationary_k0(&StationarySystem::new(a.clone(), labels)?))
                }
                None => None,
            };
            Ok(ObjectInvariant { index: p, name: table.qsystems().name(p), diagram, k0, normalization: BigRational::one() })
        })
        .collect::<Result<_>>()?;

    let qs = table.qsystems();
    let morphisms: Vec<MorphismInvariant> = (0..table.simples().len())
        .into_par_iter()
        .map(|x| {
            let s = table.simple(x);
            let source = qs.index_of(s.source()).expect("representative");
            let target = qs.index_of(s.target()).expect("representative");
            let mats = morphism_matrices(&table, x, &objects[source].diagram, &objects[target].diagram)?;
            let matrix = mats.last().expect("at least one level").clone();
            let multiplier = match (objects[source].rank_one(), objects[target].rank_one()) {
                (Some(a), Some(b)) => morphism_multiplier(a, b, &matrix)?,
                _ => None,
            };
            Ok(MorphismInvariant { simple: x, label: table.label(x), source, target, multiplier, matrix })
        })
        .collect::<Result<_>>()?;

    let unit = &objects[0];
    let weights: Vec<BigInt> = d.generator_weights().iter().map(|&w| BigInt::from(w)).collect();
    let pointed = match unit.rank_one() {
        Some(form) => PointedValue::Rational(value_map(form, 0, &unit.diagram.push_to_tail(&weights)?)?),
        None => PointedValue::Vector(weights),
    };

    let inv = InvariantData { table, objects, morphisms, pointed };
    inv.check_functoriality()?;
    Ok(inv)
}

/// Compute the invariant, building (or reusing) the fusion table of the group.
pub fn compute_invariant(d: &EnrichedBratteliDiagram, max_group_order: u64) -> Result<InvariantData> {
    compute_invariant_with(fusion_table(d.group(), max_group_order)?, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::qsys::identity_bimodule;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn z4() -> (FiniteAbelianGroup, Arc<FusionTable>) {
        let g = FiniteAbelianGroup::cyclic(4);
        let t = fusion_table(&g, 64).unwrap();
        (g, t)
    }

    fn self_loop(t: &FusionTable, v: usize, pick: impl Fn(&SimpleBimodule) -> bool, mult: u64) -> EnrichedBratteliDiagram {
        let h = t.qsystems().subgroup(v);
        let edges = simple_bimodules(h, h).into_iter().filter(|s| pick(s)).map(|s| (s, mult)).collect();
        EnrichedBratteliDiagram::homogeneous(t.group(), h, edges, None).unwrap()
    }

    fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
        m.to_i64_rows().unwrap()
    }

    #[test]
    fn hom_basis_examples() {
        let (_, t) = z4();
        let qs = t.qsystems();
        let labels = |p: usize, v: usize| -> Vec<String> {
            hom_basis(qs.subgroup(p), qs.subgroup(v)).iter().map(|s| qs.label(s).unwrap()).collect()
        };
        assert_eq!(labels(0, 1), ["M_{2-1,0}", "M_{2-1,1}"]);
        assert_eq!(labels(0, 0), ["M_{1-1,0}", "M_{1-1,1}", "M_{1-1,2}", "M_{1-1,3}"]);
        let triv = FiniteAbelianGroup::cyclic(1);
        let e = Subgroup::trivial(&triv);
        assert_eq!(hom_basis(&e, &e).len(), 1);
    }

    #[test]
    fn object_diagram_examples() {
        let (_, t) = z4();
        let g = self_loop(&t, 1, |_| true, 1);
        assert_eq!(rows(object_diagram(&t, &g, 0).unwrap().tail().unwrap()), [[2, 2], [2, 2]]);
        let f = self_loop(&t, 0, |_| true, 1);
        assert_eq!(rows(object_diagram(&t, &f, 2).unwrap().tail().unwrap()), [[4]]);
        let trivial_group = FiniteAbelianGroup::cyclic(1);
        let tt = fusion_table(&trivial_group, 64).unwrap();
        let d = self_loop(&tt, 0, |_| true, 1);
        assert_eq!(rows(object_diagram(&tt, &d, 0).unwrap().tail().unwrap()), [[1]]);
    }

    #[test]
    fn morphism_matrix_examples() {
        let (_, t) = z4();
        let qs = t.qsystems();
        let g = self_loop(&t, 1, |_| true, 1);
        let (o1, o2) = (object_diagram(&t, &g, 0).unwrap(), object_diagram(&t, &g, 1).unwrap());
        let x = t.index_of(&simple_bimodules(qs.subgroup(0), qs.subgroup(1))[0]).unwrap();
        let m = &morphism_matrices(&t, x, &o1, &o2).unwrap()[0];
        // column of M_{2-1,0}: M_{2-2,0}^triv + M_{2-2,0}^sign
        let col: Vec<(String, i64)> = o2.bases[0]
            .iter()
            .enumerate()
            .map(|(r, &(_, i))| (t.label(i), m.get(r, 0).try_into().unwrap()))
            .filter(|(_, c)| *c != 0)
            .collect();
        assert_eq!(col, [("M_{2-2,0}^triv".to_string(), 1), ("M_{2-2,0}^sign".to_string(), 1)]);

        let id = t.index_of(&identity_bimodule(qs.subgroup(1))).unwrap();
        assert_eq!(morphism_matrices(&t, id, &o2, &o2).unwrap()[0], IntMatrix::identity(4));

        let f = self_loop(&t, 0, |_| true, 1);
        let (p1, p3) = (object_diagram(&t, &f, 0).unwrap(), object_diagram(&t, &f, 2).unwrap());
        let x13 = t.index_of(&simple_bimodules(qs.subgroup(0), qs.subgroup(2))[0]).unwrap();
        assert_eq!(rows(&morphism_matrices(&t, x13, &p1, &p3).unwrap()[0]), [[1, 1, 1, 1]]);
    }

    fn row(inv: &InvariantData) -> Vec<BigRational> {
        // one representative per family, in table order
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for m in inv.morphisms() {
            if !seen.contains(&(m.source, m.target)) {
                seen.push((m.source, m.target));
                out.push(m.multiplier.clone().unwrap());
            }
        }
        out
    }

    #[test]
    fn worked_invariants() {
        let (_, t) = z4();
        let f = compute_invariant_with(t.clone(), &self_loop(&t, 0, |_| true, 1)).unwrap();
        let expect: Vec<BigRational> = [1, 2, 4, 1, 1, 2, 1, 1, 1].iter().map(|&n| q(n, 1)).collect();
        assert_eq!(row(&f), expect);
        assert_eq!(f.pointed(), &PointedValue::Rational(q(1, 1)));
        for o in f.objects() {
            assert_eq!(o.k0.as_ref().unwrap().to_string(), "Z[1/4]");
        }

        let g = compute_invariant_with(t.clone(), &self_loop(&t, 1, |_| true, 1)).unwrap();
        let expect: Vec<BigRational> = [1, 1, 2, 2, 1, 2, 2, 1, 1].iter().map(|&n| q(n, 1)).collect();
        assert_eq!(row(&g), expect);
        assert_eq!(g.pointed(), &PointedValue::Rational(q(1, 1)));

        let e = compute_invariant_with(t.clone(), &self_loop(&t, 2, |s| s.character().is_trivial(), 4)).unwrap();
        assert_eq!(e.ranks(), [Some(1), Some(2), Some(4)]);
        assert_eq!(e.pointed(), &PointedValue::Rational(q(1, 1)));
    }

    #[test]
    fn rescale_moves_multipliers() {
        let (_, t) = z4();
        let f = compute_invariant_with(t.clone(), &self_loop(&t, 0, |_| true, 1)).unwrap();
        let r = f.rescaled(&[q(3, 1), q(1, 2), q(5, 7)]).unwrap();
        let x13 = t.block(0, 2)[0];
        assert_eq!(r.multiplier(x13).unwrap(), &(q(4, 1) * q(5, 7) / q(3, 1)));
        assert_eq!(r.pointed(), &PointedValue::Rational(q(3, 1)));
        r.check_functoriality().unwrap();
        assert!(f.rescaled(&[q(1, 1)]).is_err());
    }

    #[test]
    fn prefix_levels_are_pushed() {
        let (g, t) = z4();
        let qs = t.qsystems();
        let (q1, q2) = (qs.subgroup(0).clone(), qs.subgroup(1).clone());
        // level 0 at Q₂, then one M_{1-2,0} edge into a repeating Q₁ vertex
        let edge = |b: SimpleBimodule| crate::diagram::DiagramEdge { from: 0, to: 0, bimodule: b, multiplicity: 1 };
        let into = edge(simple_bimodules(&q1, &q2)[0].clone());
        let loops: Vec<_> = simple_bimodules(&q1, &q1).into_iter().map(edge).collect();
        let d = EnrichedBratteliDiagram::new(&g, vec![vec![q2], vec![q1]], vec![vec![into], loops], true, None).unwrap();
        let inv = compute_invariant_with(t.clone(), &d).unwrap();
        // weights (1,1) on M_{2-1,0}, M_{2-1,1} land on Σ_g M_{1-1,g}, value 4/4
        assert_eq!(inv.pointed(), &PointedValue::Rational(q(1, 1)));
        assert_eq!(inv.objects()[0].diagram.maps[0].rows(), 4);
    }

    #[test]
    fn non_stationary_stays_unidentified() {
        let (g, t) = z4();
        let q3 = t.qsystems().subgroup(2).clone();
        let e = crate::diagram::DiagramEdge { from: 0, to: 0, bimodule: identity_bimodule(&q3), multiplicity: 2 };
        let d = EnrichedBratteliDiagram::new(&g, vec![vec![q3.clone()], vec![q3]], vec![vec![e]], false, None).unwrap();
        let inv = compute_invariant_with(t, &d).unwrap();
        assert!(inv.objects().iter().all(|o| o.k0.is_none()));
        assert!(matches!(inv.pointed(), PointedValue::Vector(_)));
    }
}
