//! Enriched Bratteli diagrams with Q-system vertices and bimodule edges.
//!
//! An edge from vertex `v` at level `n` to vertex `w` at level `n+1` carries a
//! `Q_w – Q_v` bimodule: its source is the Q-system of `w` and its target the
//! Q-system of `v`. Acting on the level basis `hom(Q_v → P)` it is
//! precomposition, `x ↦ e ⊠ x`.
//!
//! A stationary diagram lists `levels[0..m]` and `m` edge blocks; the last
//! block maps `levels[m-1]` to itself and repeats forever. A non-stationary
//! diagram lists `m-1` blocks and is only a finite level list.
//!
//! Worked heterogeneous example over `Z/4`: level 0 holds `Q₂`, level 1 holds
//! `Q₁`. An edge from the `Q₂` vertex to the `Q₁` vertex must be one of the
//! `Q₁ – Q₂` bimodules `M_{1-2,k}`, and it sends the level-0 basis element
//! `M_{2-1,j}` of `hom(Q₂ → Q₁)` to `M_{1-2,k} ⊠ M_{2-1,j}`, a sum of `M_{1-1,g}`.

use crate::abelian::{FiniteAbelianGroup, Subgroup};
use crate::error::{invalid, Result};
use crate::qsys::{simple_bimodules, SimpleBimodule};

/// One edge between adjacent levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramEdge {
    pub from: usize,
    pub to: usize,
    pub bimodule: SimpleBimodule,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnrichedBratteliDiagram {
    group: FiniteAbelianGroup,
    levels: Vec<Vec<Subgroup>>,
    edges: Vec<Vec<DiagramEdge>>,
    stationary: bool,
    generator_weights: Vec<u64>,
}

/// Size of the level-0 hom basis of the trivial Q-system at a vertex.
fn unit_block(group: &FiniteAbelianGroup, v: &Subgroup) -> usize {
    simple_bimodules(v, &Subgroup::trivial(group)).len()
}

impl EnrichedBratteliDiagram {
    /// A single repeating vertex with a block of self-edges.
    pub fn homogeneous(
        group: &FiniteAbelianGroup,
        vertex: &Subgroup,
        edges: Vec<(SimpleBimodule, u64)>,
        generator_weights: Option<Vec<u64>>,
    ) -> Result<Self> {
        let block = edges
            .into_iter()
            .map(|(bimodule, multiplicity)| DiagramEdge { from: 0, to: 0, bimodule, multiplicity })
            .collect();
        Self::new(group, vec![vec![vertex.clone()]], vec![block], true, generator_weights)
    }

    pub fn new(
        group: &FiniteAbelianGroup,
        levels: Vec<Vec<Subgroup>>,
        edges: Vec<Vec<DiagramEdge>>,
        stationary: bool,
        generator_weights: Option<Vec<u64>>,
    ) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(Vec::is_empty) {
            return invalid("every level needs at least one vertex");
        }
        if levels.iter().flatten().any(|v| v.parent() != group) {
            return invalid("vertex Q-system lives in a different group");
        }
        let expected = if stationary { levels.len() } else { levels.len() - 1 };
        if edges.len() != expected {
            return invalid(format!(
                "{} levels need {expected} edge blocks, got {}",
                levels.len(),
                edges.len()
            ));
        }
        for (n, block) in edges.iter().enumerate() {
            let from = &levels[n];
            let to = levels.get(n + 1).unwrap_or(&levels[n]);
            let mut reached = vec![false; to.len()];
            for e in block {
                if e.from >= from.len() || e.to >= to.len() {
                    return invalid(format!("edge in block {n} references a missing vertex"));
                }
                if e.multiplicity == 0 {
                    return invalid(format!("edge in block {n} has multiplicity zero"));
                }
                if e.bimodule.source() != &to[e.to] || e.bimodule.target() != &from[e.from] {
                    return invalid(format!(
                        "edge {}->{} in block {n} must carry a bimodule from the later vertex to the earlier one",
                        e.from, e.to
                    ));
                }
                reached[e.to] = true;
            }
            if let Some(w) = reached.iter().position(|r| !r) {
                return invalid(format!("vertex {w} after block {n} has no incoming edge"));
            }
        }
        let sizes: Vec<usize> = levels[0].iter().map(|v| unit_block(group, v)).collect();
        let total: usize = sizes.iter().sum();
        let generator_weights = generator_weights.unwrap_or_else(|| vec![1; total]);
        if generator_weights.len() != total {
            return invalid(format!("expected {total} generator weights, got {}", generator_weights.len()));
        }
        let mut at = 0;
        for (i, s) in sizes.iter().enumerate() {
            if generator_weights[at..at + s].iter().all(|&w| w == 0) {
                return invalid(format!("generator weights vanish on level-0 vertex {i}"));
            }
            at += s;
        }
        Ok(Self { group: group.clone(), levels, edges, stationary, generator_weights })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn levels(&self) -> &[Vec<Subgroup>] {
        &self.levels
    }

    /// `edges()[n]` connects level `n` to level `n+1` (or to itself for the repeat block).
    pub fn edges(&self) -> &[Vec<DiagramEdge>] {
        &self.edges
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn generator_weights(&self) -> &[u64] {
        &self.generator_weights
    }

    /// Vertices of the level reached by block `n`.
    pub fn next_level(&self, n: usize) -> &[Subgroup] {
        self.levels.get(n + 1).unwrap_or(&self.levels[n])
    }

    /// Every distinct vertex Q-system.
    pub fn vertex_subgroups(&self) -> Vec<Subgroup> {
        let mut v: Vec<Subgroup> = self.levels.iter().flatten().cloned().collect();
        v.sort();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsys::{identity_bimodule, qsystems};

    #[test]
    fn homogeneous_diagrams() {
        let g = FiniteAbelianGroup::cyclic(4);
        let qs = qsystems(&g, 64).unwrap();
        let q1 = qs.subgroup(0);
        let edges: Vec<_> = simple_bimodules(q1, q1).into_iter().map(|s| (s, 1)).collect();
        let f = EnrichedBratteliDiagram::homogeneous(&g, q1, edges, None).unwrap();
        assert_eq!(f.generator_weights(), &[1, 1, 1, 1]);
        assert!(f.is_stationary());

        let q2 = qs.subgroup(1);
        let e = vec![(identity_bimodule(q2), 1)];
        let d = EnrichedBratteliDiagram::homogeneous(&g, q2, e.clone(), None).unwrap();
        assert_eq!(d.generator_weights().len(), 2);
        assert!(EnrichedBratteliDiagram::homogeneous(&g, q2, e.clone(), Some(vec![0, 0])).is_err());
        assert!(EnrichedBratteliDiagram::homogeneous(&g, q2, e.clone(), Some(vec![1])).is_err());
        assert!(EnrichedBratteliDiagram::homogeneous(&g, q2, e, Some(vec![0, 3])).is_ok());
    }

    #[test]
    fn orientation_enforced() {
        let g = FiniteAbelianGroup::cyclic(4);
        let qs = qsystems(&g, 64).unwrap();
        let (q1, q2) = (qs.subgroup(0), qs.subgroup(1));
        let good = simple_bimodules(q1, q2)[0].clone();
        let bad = simple_bimodules(q2, q1)[0].clone();
        let levels = vec![vec![q2.clone()], vec![q1.clone()]];
        let edge = |b: &SimpleBimodule| vec![vec![DiagramEdge { from: 0, to: 0, bimodule: b.clone(), multiplicity: 1 }]];
        assert!(EnrichedBratteliDiagram::new(&g, levels.clone(), edge(&good), false, None).is_ok());
        assert!(EnrichedBratteliDiagram::new(&g, levels, edge(&bad), false, None).is_err());
    }

    #[test]
    fn structure_checks() {
        let g = FiniteAbelianGroup::cyclic(4);
        let qs = qsystems(&g, 64).unwrap();
        let q3 = qs.subgroup(2);
        let id = identity_bimodule(q3);
        let e = |to: usize, m: u64| DiagramEdge { from: 0, to, bimodule: id.clone(), multiplicity: m };
        // unreachable second vertex
        let levels = vec![vec![q3.clone()], vec![q3.clone(), q3.clone()]];
        assert!(EnrichedBratteliDiagram::new(&g, levels.clone(), vec![vec![e(0, 1)]], false, None).is_err());
        assert!(EnrichedBratteliDiagram::new(&g, levels, vec![vec![e(0, 1), e(1, 1)]], false, None).is_ok());
        // zero multiplicity and wrong block count
        let one = vec![vec![q3.clone()]];
        assert!(EnrichedBratteliDiagram::new(&g, one.clone(), vec![vec![e(0, 0)]], true, None).is_err());
        assert!(EnrichedBratteliDiagram::new(&g, one, vec![], true, None).is_err());
    }
}
