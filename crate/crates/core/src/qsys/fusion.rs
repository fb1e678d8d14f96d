//! The fusion product `S₁ ⊠_K S₂` and the per-group fusion table.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::abelian::{dual_characters, Coset, FiniteAbelianGroup};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{internal, Error, Result};

use super::model::{realize, BimoduleModel};
use super::{qsystems, QSystemSet, SimpleBimodule};

/// Simple summands with positive multiplicities, in canonical order.
pub type Multiset = Vec<(SimpleBimodule, u64)>;

/// Decompose `S₁ ⊠_K S₂` into simples.
pub fn fuse(s1: &SimpleBimodule, s2: &SimpleBimodule) -> Result<Multiset> {
    if s1.target() != s2.source() {
        return Err(Error::InvalidComposition(format!(
            "middle Q-systems differ: {} vs {}",
            s1.target(),
            s2.source()
        )));
    }
    fuse_realized(&realize(s1)?, &realize(s2)?)
}

/// Decompose the relative tensor product of two explicit models.
///
/// For every `(H+L)`-coset `Γ₃ ⊆ Γ₁ + Γ₂` with representative `g₃` and every
/// character `χ₃` of `H ∩ L`, the multiplicity is
/// `|H∩L|⁻¹ Σ_t χ̄₃(t) · Tr((t, −t) ∘ e)` on the degree-`g₃` component, where
/// `e = |K|⁻¹ Σ_k ρ(k) ⊗ λ(−k)` projects onto the relative tensor product.
/// Traces are summed as exact cyclotomic numbers; a non-integer result is an
/// internal error.
pub fn fuse_realized(m1: &BimoduleModel, m2: &BimoduleModel) -> Result<Multiset> {
    let (s1, s2) = (m1.simple(), m2.simple());
    if s1.target() != s2.source() {
        return Err(Error::InvalidComposition(format!(
            "middle Q-systems differ: {} vs {}",
            s1.target(),
            s2.source()
        )));
    }
    let g = s1.group();
    let e = g.exponent();
    let (h, k, l) = (s1.source(), s1.target(), s2.target());
    let hl = h.intersect(l);
    let sum_hl = h.sum(l);
    let chars = dual_characters(&hl);

    let mut outer: Vec<Coset> = Vec::new();
    for a in s1.coset().members() {
        for b in s2.coset().members() {
            let c = Coset::of(&sum_hl, &g.add(a, b));
            if !outer.contains(&c) {
                outer.push(c);
            }
        }
    }
    outer.sort();

    let denom = BigRational::from_integer(BigInt::from(k.order() * hl.order()));
    let mut out = Multiset::new();
    for gamma in outer {
        let g3 = gamma.rep();
        let pairs: Vec<(usize, usize)> = (0..m1.dim())
            .filter_map(|i1| m2.index_of_degree(&g.sub(g3, m1.degree(i1))).map(|i2| (i1, i2)))
            .collect();

        // counts[t][j] = number of diagonal hits with phase ζ^j
        let mut counts = vec![vec![0i64; e as usize]; hl.elements().len()];
        for (ti, t) in hl.elements().iter().enumerate() {
            let lt = m1.left(t).expect("t in H");
            let rt = m2.right(&g.neg(t)).expect("t in L");
            for kk in k.elements() {
                let rk = m1.right(kk).expect("k in K");
                let lk = m2.left(&g.neg(kk)).expect("k in K");
                for &(i1, i2) in &pairs {
                    let a = rk[i1];
                    let b = lt[a.target];
                    if b.target != i1 {
                        continue;
                    }
                    let c = lk[i2];
                    let d = rt[c.target];
                    if d.target != i2 {
                        continue;
                    }
                    counts[ti][((a.exponent + b.exponent + c.exponent + d.exponent) % e) as usize] += 1;
                }
            }
        }

        for chi in &chars {
            let mut total = vec![0i64; e as usize];
            for (ti, theta) in chi.values().iter().enumerate() {
                let shift = (theta * Rational64::from_integer(e as i64)).to_integer() as u64 % e;
                for (j, &c) in counts[ti].iter().enumerate() {
                    if c != 0 {
                        total[((j as u64 + e - shift) % e) as usize] += c;
                    }
                }
            }
            let value = CyclotomicNumber::from_exponent_counts(e, &total).scale(&denom.recip());
            let m = match value.as_integer() {
                Some(m) if !m.is_negative() => m,
                _ => return internal(format!("fusion multiplicity {value} is not a nonnegative integer")),
            };
            let m = m.to_u64().ok_or_else(|| Error::InternalConsistency("multiplicity overflow".into()))?;
            if m > 0 {
                let simple = SimpleBimodule {
                    source: h.clone(),
                    target: l.clone(),
                    coset: gamma.clone(),
                    character: chi.clone(),
                };
                out.push((simple, m));
            }
        }
    }

    let lhs: u64 = out.iter().map(|(s, m)| m * s.dimension() as u64).sum();
    let product = (m1.dim() * m2.dim()) as u64;
    if lhs * k.order() != product {
        return internal(format!("dimension conservation fails: {lhs}·{} vs {product}", k.order()));
    }
    Ok(out)
}

/// All fusion products of simple bimodules between representatives of a group.
#[derive(Debug)]
pub struct FusionTable {
    qsystems: QSystemSet,
    simples: Vec<SimpleBimodule>,
    index: HashMap<SimpleBimodule, usize>,
    products: BTreeMap<(usize, usize), Vec<(usize, u64)>>,
}

/// The memoized fusion table of `group`, built on first request.
pub fn fusion_table(group: &FiniteAbelianGroup, max_order: u64) -> Result<Arc<FusionTable>> {
    static CACHE: OnceLock<Mutex<HashMap<FiniteAbelianGroup, Arc<FusionTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if group.order() > max_order {
        return Err(Error::ResourceLimit(format!(
            "group order {} exceeds the bound {max_order}",
            group.order()
        )));
    }
    if let Some(t) = cache.lock().expect("cache poisoned").get(group) {
        return Ok(t.clone());
    }
    let table = Arc::new(FusionTable::build(group, max_order)?);
    cache.lock().expect("cache poisoned").insert(group.clone(), table.clone());
    Ok(table)
}

impl FusionTable {
    /// Compute every composable product. Pairs are filled in parallel.
    pub fn build(group: &FiniteAbelianGroup, max_order: u64) -> Result<Self> {
        let qs = qsystems(group, max_order)?;
        let simples = qs.all_simples();
        let index: HashMap<SimpleBimodule, usize> = simples.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let models = simples.par_iter().map(realize).collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(usize, usize)> = (0..simples.len())
            .flat_map(|i| (0..simples.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| simples[i].target() == simples[j].source())
            .collect();
        let filled = pairs
            .par_iter()
            .map(|&(i, j)| {
                let prod = fuse_realized(&models[i], &models[j])?;
                Ok(((i, j), prod.into_iter().map(|(s, m)| (index[&s], m)).collect::<Vec<_>>()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { qsystems: qs, simples, index, products: filled.into_iter().collect() })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.qsystems.group()
    }

    pub fn qsystems(&self) -> &QSystemSet {
        &self.qsystems
    }

    pub fn simples(&self) -> &[SimpleBimodule] {
        &self.simples
    }

    pub fn simple(&self, i: usize) -> &SimpleBimodule {
        &self.simples[i]
    }

    pub fn index_of(&self, s: &SimpleBimodule) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn label(&self, i: usize) -> String {
        self.qsystems.label(&self.simples[i]).expect("table simples are between representatives")
    }

    /// `(index, multiplicity)` summands of `simples[i] ⊠ simples[j]`, if composable.
    pub fn product(&self, i: usize, j: usize) -> Option<&[(usize, u64)]> {
        self.products.get(&(i, j)).map(Vec::as_slice)
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), Vec<(usize, u64)>> {
        &self.products
    }

    /// Product of two simples looked up by value.
    pub fn fuse(&self, a: &SimpleBimodule, b: &SimpleBimodule) -> Result<Multiset> {
        let (i, j) = match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => (i, j),
            _ => return fuse(a, b),
        };
        match self.product(i, j) {
            Some(p) => Ok(p.iter().map(|&(x, m)| (self.simples[x].clone(), m)).collect()),
            None => Err(Error::InvalidComposition(format!(
                "{} and {} do not share a middle Q-system",
                self.label(i),
                self.label(j)
            ))),
        }
    }

    /// Indices of simples with the given source and target representatives.
    pub fn block(&self, source: usize, target: usize) -> Vec<usize> {
        let (h, k) = (self.qsystems.subgroup(source), self.qsystems.subgroup(target));
        (0..self.simples.len())
            .filter(|&i| self.simples[i].source() == h && self.simples[i].target() == k)
            .collect()
    }

    /// Rows (simples into `middle`) and columns (simples out of `middle`) of
    /// the composition table over a middle Q-system.
    pub fn middle_table(&self, middle: usize) -> (Vec<usize>, Vec<usize>) {
        let m = self.qsystems.subgroup(middle);
        let rows = (0..self.simples.len()).filter(|&i| self.simples[i].target() == m).collect();
        let cols = (0..self.simples.len()).filter(|&i| self.simples[i].source() == m).collect();
        (rows, cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{subgroups, Subgroup};
    use crate::qsys::{dual, identity_bimodule, realize_at, simple_bimodules};

    fn labels(qs: &QSystemSet, m: &Multiset) -> Vec<String> {
        m.iter()
            .flat_map(|(s, k)| std::iter::repeat_n(qs.label(s).unwrap(), *k as usize))
            .collect()
    }

    #[test]
    fn z4_examples() {
        let g = FiniteAbelianGroup::cyclic(4);
        let qs = qsystems(&g, 64).unwrap();
        let (q1, q2, q3) = (qs.subgroup(0), qs.subgroup(1), qs.subgroup(2));
        let m21 = &simple_bimodules(q2, q1)[0];
        let m12 = &simple_bimodules(q1, q2)[0];
        assert_eq!(labels(&qs, &fuse(m21, m12).unwrap()), ["M_{2-2,0}^triv", "M_{2-2,0}^sign"]);

        let m13 = &simple_bimodules(q1, q3)[0];
        let m31 = &simple_bimodules(q3, q1)[0];
        assert_eq!(labels(&qs, &fuse(m13, m31).unwrap()), ["M_{1-1,0}", "M_{1-1,1}", "M_{1-1,2}", "M_{1-1,3}"]);

        assert!(matches!(fuse(m12, m13), Err(Error::InvalidComposition(_))));
    }

    #[test]
    fn unit_and_dual_laws() {
        for n in [4u64, 6] {
            let g = FiniteAbelianGroup::cyclic(n);
            let subs = subgroups(&g, 64).unwrap();
            for h in &subs {
                for k in &subs {
                    for s in simple_bimodules(h, k) {
                        assert_eq!(fuse(&identity_bimodule(h), &s).unwrap(), vec![(s.clone(), 1)]);
                        assert_eq!(fuse(&s, &identity_bimodule(k)).unwrap(), vec![(s.clone(), 1)]);
                        let prod = fuse(&s, &dual(&s)).unwrap();
                        let id = identity_bimodule(h);
                        assert_eq!(prod.iter().find(|(x, _)| x == &id).map(|p| p.1), Some(1));
                    }
                }
            }
        }
    }

    #[test]
    fn base_point_invariance() {
        for factors in [vec![4], vec![2, 2], vec![6]] {
            let g = FiniteAbelianGroup::new(&factors).unwrap();
            let subs = subgroups(&g, 64).unwrap();
            for h in &subs {
                for k in &subs {
                    for l in &subs {
                        for s1 in simple_bimodules(h, k) {
                            for s2 in simple_bimodules(k, l) {
                                let canonical = fuse(&s1, &s2).unwrap();
                                let d1 = s1.coset().members().last().unwrap();
                                let d2 = s2.coset().members().last().unwrap();
                                let moved = fuse_realized(&realize_at(&s1, d1).unwrap(), &realize_at(&s2, d2).unwrap()).unwrap();
                                assert_eq!(canonical, moved);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_group_table() {
        let g = FiniteAbelianGroup::cyclic(1);
        let t = FusionTable::build(&g, 64).unwrap();
        assert_eq!(t.simples().len(), 1);
        assert_eq!(t.product(0, 0), Some(&[(0usize, 1u64)][..]));
    }

    #[test]
    fn table_is_memoized() {
        let g = FiniteAbelianGroup::cyclic(4);
        let a = fusion_table(&g, 64).unwrap();
        let b = fusion_table(&g, 64).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(fusion_table(&FiniteAbelianGroup::cyclic(8), 4).is_err());
        let (rows, cols) = a.middle_table(0);
        assert_eq!((rows.len(), cols.len()), (7, 7));
        let (rows, cols) = a.middle_table(1);
        assert_eq!((rows.len(), cols.len()), (8, 8));
        let q2 = Subgroup::generated_by(&g, &[g.element(&[2]).unwrap()]).unwrap();
        assert_eq!(a.block(1, 1).len(), simple_bimodules(&q2, &q2).len());
    }
}
