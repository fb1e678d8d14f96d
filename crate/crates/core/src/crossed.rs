//! Finite crossed products `C(G/K) ⋊ H` and twisted group algebras.
//!
//! This path uses only orbits, stabilizers and characters, never the fusion
//! engine, so its `K₀` ranks are an independent check on bimodule counts.

use crate::abelian::{coset_space, dual_characters, Character, Coset, Element, FiniteAbelianGroup, Phase, Subgroup, CocycleTable, validate_2cocycle, reduce_phase};
use crate::cyclotomic::{root_of_unity, CyclotomicNumber};
use crate::error::{invalid, Result};

/// One matrix block `M_size(C)` of the crossed product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedBlock {
    /// Index into `orbits`.
    pub orbit: usize,
    pub character: Character,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedProductBlocks {
    /// Points of `X = G/K`.
    pub points: Vec<Coset>,
    pub acting: Subgroup,
    /// Each orbit as indices into `points`.
    pub orbits: Vec<Vec<usize>>,
    pub stabilizer: Subgroup,
    pub blocks: Vec<CrossedBlock>,
}

impl CrossedProductBlocks {
    /// `dim C(X) ⋊ H = |X|·|H|`.
    pub fn dimension(&self) -> u64 {
        self.points.len() as u64 * self.acting.order()
    }

    /// `Σ size²` over the blocks.
    pub fn block_dimension(&self) -> u64 {
        self.blocks.iter().map(|b| (b.size * b.size) as u64).sum()
    }
}

/// Decompose `C(G/K) ⋊ H` with `H` acting by translation and trivial twist.
pub fn crossed_product_blocks(g: &FiniteAbelianGroup, k: &Subgroup, h: &Subgroup) -> Result<CrossedProductBlocks> {
    if k.parent() != g || h.parent() != g {
        return invalid("subgroups must live in the given group");
    }
    let points = coset_space(g, k)?;
    let find = |x: &Element| points.iter().position(|c| c.contains(x)).expect("cosets cover the group");
    let mut orbit_of = vec![usize::MAX; points.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..points.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut orbit: Vec<usize> = h.elements().iter().map(|a| find(&g.add(points[i].rep(), a))).collect();
        orbit.sort();
        orbit.dedup();
        for &j in &orbit {
            orbit_of[j] = orbits.len();
        }
        orbits.push(orbit);
    }
    // translation by a fixes x + K iff a ∈ K
    let stabilizer = h.intersect(k);
    let chars = dual_characters(&stabilizer);
    let blocks = orbits
        .iter()
        .enumerate()
        .flat_map(|(o, orbit)| {
            chars.iter().map(move |c| CrossedBlock { orbit: o, character: c.clone(), size: orbit.len() })
        })
        .collect();
    Ok(CrossedProductBlocks { points, acting: h.clone(), orbits, stabilizer, blocks })
}

/// Rank of `K₀` of a finite-dimensional algebra: its number of blocks.
pub fn k0_rank(b: &CrossedProductBlocks) -> usize {
    b.blocks.len()
}

/// `C_μ[H]` with `u_a·u_b = e^{2πi μ(a,b)} u_{a+b}`.
#[derive(Clone, Debug)]
pub struct TwistedGroupAlgebra {
    domain: Subgroup,
    /// `table[a][b] = (index of a+b, μ(a,b))`.
    table: Vec<Vec<(usize, Phase)>>,
}

pub fn twisted_group_algebra(mu: &CocycleTable) -> Result<TwistedGroupAlgebra> {
    if !validate_2cocycle(mu)? {
        return invalid("not a normalized 2-cocycle");
    }
    let h = mu.domain();
    let g = h.parent();
    let table = h
        .elements()
        .iter()
        .map(|a| {
            h.elements()
                .iter()
                .map(|b| (h.position(&g.add(a, b)).expect("closed"), mu.get(a, b).expect("total")))
                .collect()
        })
        .collect();
    Ok(TwistedGroupAlgebra { domain: h.clone(), table })
}

impl TwistedGroupAlgebra {
    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn dimension(&self) -> usize {
        self.table.len()
    }

    /// Structure constant of `u_a·u_b` by positions in the domain.
    pub fn product(&self, a: usize, b: usize) -> (usize, Phase) {
        self.table[a][b]
    }

    /// `(u_a u_b) u_c = u_a (u_b u_c)` on every basis triple.
    pub fn is_associative(&self) -> bool {
        let n = self.dimension();
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    let (ab, p1) = self.product(a, b);
                    let (abc, p2) = self.product(ab, c);
                    let (bc, q1) = self.product(b, c);
                    let (abc2, q2) = self.product(a, bc);
                    abc == abc2 && reduce_phase(p1 + p2) == reduce_phase(q1 + q2)
                })
            })
        })
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dimension();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    fn order(&self) -> u64 {
        self.table.iter().flatten().fold(1u64, |acc, (_, p)| num_integer::lcm(acc, *p.denom() as u64))
    }

    /// Dimension of the center, by exact elimination of `u_g z = z u_g`.
    pub fn center_dimension(&self) -> Result<usize> {
        let n = self.dimension();
        let e = self.order();
        // coefficient of u_{g+h} in u_g z − z u_g is c_h (ζ^{μ(g,h)} − ζ^{μ(h,g)})
        let mut rows: Vec<Vec<CyclotomicNumber>> = Vec::new();
        for g in 0..n {
            let mut block = vec![vec![CyclotomicNumber::zero(e); n]; n];
            for h in 0..n {
                let (gh, p) = self.table[g][h];
                let (_, q) = self.table[h][g];
                block[gh][h] = &root_of_unity(p, e)? - &root_of_unity(q, e)?;
            }
            rows.extend(block.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())));
        }
        Ok(n - rank(rows, n))
    }
}

fn rank(mut m: Vec<Vec<CyclotomicNumber>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot_inv = m[r][c].inv().expect("nonzero element of a field");
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] * &pivot_inv;
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &d;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::subgroups;
    use num_rational::Rational64;

    fn sub(g: &FiniteAbelianGroup, gens: &[&[i64]]) -> Subgroup {
        let els: Vec<Element> = gens.iter().map(|c| g.element(c).unwrap()).collect();
        Subgroup::generated_by(g, &els).unwrap()
    }

    #[test]
    fn z4_examples() {
        let g = FiniteAbelianGroup::cyclic(4);
        let b = crossed_product_blocks(&g, &Subgroup::trivial(&g), &sub(&g, &[&[2]])).unwrap();
        assert_eq!(b.orbits, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(b.blocks.iter().map(|x| x.size).collect::<Vec<_>>(), [2, 2]);
        assert_eq!(k0_rank(&b), 2);
        assert_eq!(b.block_dimension(), b.dimension());

        let whole = Subgroup::whole(&g);
        let point = crossed_product_blocks(&g, &whole, &Subgroup::trivial(&g)).unwrap();
        assert_eq!(k0_rank(&point), 1);
        assert_eq!(point.blocks[0].size, 1);

        let group_algebra = crossed_product_blocks(&g, &whole, &whole).unwrap();
        assert_eq!(k0_rank(&group_algebra), 4);
        assert!(group_algebra.blocks.iter().all(|x| x.size == 1));
    }

    #[test]
    fn dimension_identity() {
        for factors in [vec![4], vec![6], vec![2, 2], vec![8], vec![12], vec![2, 4]] {
            let g = FiniteAbelianGroup::new(&factors).unwrap();
            let subs = subgroups(&g, 64).unwrap();
            for k in &subs {
                for h in &subs {
                    let b = crossed_product_blocks(&g, k, h).unwrap();
                    assert_eq!(b.block_dimension(), b.dimension());
                    let covered: usize = b.orbits.iter().map(Vec::len).sum();
                    assert_eq!(covered, b.points.len());
                }
            }
        }
    }

    #[test]
    fn twisted_algebras() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let a = twisted_group_algebra(&CocycleTable::trivial(&Subgroup::whole(&z2))).unwrap();
        assert!(a.is_commutative() && a.is_associative());
        assert_eq!(a.center_dimension().unwrap(), 2);

        let klein = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let h = Subgroup::whole(&klein);
        let mu = CocycleTable::from_fn(&h, |x, y| Rational64::new((x.coords()[1] * y.coords()[0]) as i64, 2));
        let t = twisted_group_algebra(&mu).unwrap();
        assert!(t.is_associative());
        assert!(!t.is_commutative());
        assert_eq!(t.center_dimension().unwrap(), 1);
        assert_eq!(twisted_group_algebra(&CocycleTable::trivial(&h)).unwrap().center_dimension().unwrap(), 4);

        let one = twisted_group_algebra(&CocycleTable::trivial(&Subgroup::trivial(&z2))).unwrap();
        assert_eq!((one.dimension(), one.center_dimension().unwrap()), (1, 1));

        let bad = CocycleTable::from_fn(&h, |x, _| Rational64::new(x.coords()[0] as i64, 2));
        assert!(twisted_group_algebra(&bad).is_err());
    }

    #[test]
    fn every_validated_cocycle_is_associative() {
        // all cochains of Z/2 x Z/2 with values in {0, 1/2}, normalized
        let klein = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let h = Subgroup::whole(&klein);
        let free: Vec<(usize, usize)> = (1..4).flat_map(|a| (1..4).map(move |b| (a, b))).collect();
        let mut found = 0;
        for bits in 0u32..(1 << free.len()) {
            let mu = CocycleTable::from_fn(&h, |x, y| {
                let (a, b) = (h.position(x).unwrap(), h.position(y).unwrap());
                match free.iter().position(|&p| p == (a, b)) {
                    Some(i) if bits >> i & 1 == 1 => Rational64::new(1, 2),
                    _ => Rational64::from_integer(0),
                }
            });
            if validate_2cocycle(&mu).unwrap() {
                found += 1;
                assert!(twisted_group_algebra(&mu).unwrap().is_associative());
            }
        }
        assert!(found > 1);
    }
}
