//! Q-systems in `Hilb(G)` and the simple bimodules between them.
//!
//! For abelian `G` with trivial associator, a connected untwisted Q-system is
//! the group algebra `C[H]` of a subgroup `H`, and a simple `H–K` bimodule is a
//! coset `Γ` of `H + K` together with a character of `H ∩ K`. A bimodule
//! `S: H → K` has `H` acting on the left and `K` on the right; composition
//! `S₁ ⊠_K S₂` needs `S₁.target == S₂.source`.

mod fusion;
mod model;
mod oracle;

use std::fmt;

use crate::abelian::{
    coset_space, dual_characters, schur_trivial, subgroups, validate_2cocycle, Character, CocycleTable, Coset,
    FiniteAbelianGroup, Subgroup,
};
use crate::error::{invalid, Error, Result};

pub use fusion::{fuse, fuse_realized, fusion_table, FusionTable, Multiset};
pub use model::{realize, realize_at, BimoduleModel, Monomial};
pub use oracle::float_oracle_fuse;

/// A connected Q-system `(H, μ)`. Only `μ = 0` is supported by the fusion engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSystem {
    subgroup: Subgroup,
    cocycle: CocycleTable,
}

impl QSystem {
    pub fn untwisted(subgroup: &Subgroup) -> Self {
        Self { subgroup: subgroup.clone(), cocycle: CocycleTable::trivial(subgroup) }
    }

    /// A Q-system with an explicit cocycle, which must validate.
    pub fn with_cocycle(cocycle: CocycleTable) -> Result<Self> {
        if !validate_2cocycle(&cocycle)? {
            return invalid("cocycle fails normalization or the 2-cocycle identity");
        }
        Ok(Self { subgroup: cocycle.domain().clone(), cocycle })
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn cocycle(&self) -> &CocycleTable {
        &self.cocycle
    }

    /// Dimension of `C[H]`.
    pub fn dimension(&self) -> u64 {
        self.subgroup.order()
    }

    pub fn is_untwisted(&self) -> bool {
        self.cocycle.is_trivial()
    }

    pub(crate) fn require_untwisted(&self) -> Result<()> {
        if self.is_untwisted() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("Q-system on {} carries a nontrivial cocycle", self.subgroup)))
        }
    }
}

/// The representative Q-systems of a group, one per subgroup.
///
/// Index 0 is always the trivial Q-system `1_C`. Labels are 1-based in
/// displayed names (`Q1`, `M_{1-2,0}`, …).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSystemSet {
    group: FiniteAbelianGroup,
    items: Vec<QSystem>,
    warning: Option<String>,
}

/// All untwisted Q-systems of `group`, ordered as `subgroups(group)`.
pub fn qsystems(group: &FiniteAbelianGroup, max_order: u64) -> Result<QSystemSet> {
    let subs = subgroups(group, max_order)?;
    let twisted: Vec<String> = subs.iter().filter(|h| !schur_trivial(h)).map(|h| h.to_string()).collect();
    let warning = (!twisted.is_empty()).then(|| {
        format!(
            "representative set is incomplete: twisted Q-systems exist over non-cyclic subgroups {} and are unsupported",
            twisted.join(", ")
        )
    });
    Ok(QSystemSet { group: group.clone(), items: subs.iter().map(QSystem::untwisted).collect(), warning })
}

impl QSystemSet {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn items(&self) -> &[QSystem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&QSystem> {
        self.items.get(i)
    }

    pub fn subgroup(&self, i: usize) -> &Subgroup {
        &self.items[i].subgroup
    }

    /// Completeness warning when some subgroup admits twisted Q-systems.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.items.iter().position(|q| &q.subgroup == h)
    }

    /// `Q{i}` with a 1-based index.
    pub fn name(&self, i: usize) -> String {
        format!("Q{}", i + 1)
    }

    /// Every simple bimodule between representatives, grouped by
    /// `(source, target)` in index order.
    pub fn all_simples(&self) -> Vec<SimpleBimodule> {
        let mut out = Vec::new();
        for p in &self.items {
            for q in &self.items {
                out.extend(simple_bimodules(&p.subgroup, &q.subgroup));
            }
        }
        out
    }

    /// Display name `M_{i-j,k}^ℓ` keyed to this ordering.
    pub fn label(&self, s: &SimpleBimodule) -> Result<String> {
        let i = self
            .index_of(&s.source)
            .ok_or_else(|| Error::InvalidInput(format!("{} is not a representative", s.source)))?;
        let j = self
            .index_of(&s.target)
            .ok_or_else(|| Error::InvalidInput(format!("{} is not a representative", s.target)))?;
        let mut out = format!("M_{{{}-{}", i + 1, j + 1);
        if self.group.order() / s.coset.len() as u64 > 1 {
            out.push_str(&format!(",{}", s.coset.rep()));
        }
        out.push('}');
        let stab = s.character.domain();
        if stab.order() > 1 {
            let sup = if s.character.is_trivial() {
                "triv".to_string()
            } else if stab.order() == 2 {
                "sign".to_string()
            } else {
                let k = dual_characters(stab)
                    .iter()
                    .position(|c| c == &s.character)
                    .expect("character of the stabilizer");
                format!("chi{k}")
            };
            out.push('^');
            out.push_str(&sup);
        }
        Ok(out)
    }
}

/// The isomorphism class `(Γ, χ)` of a simple `H–K` bimodule.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleBimodule {
    source: Subgroup,
    target: Subgroup,
    coset: Coset,
    character: Character,
}

impl SimpleBimodule {
    /// Validate and build. `coset` must be a coset of `H + K` and the
    /// character must live on `H ∩ K`.
    pub fn new(source: &Subgroup, target: &Subgroup, coset: Coset, character: Character) -> Result<Self> {
        if source.parent() != target.parent() {
            return invalid("source and target live in different groups");
        }
        let sum = source.sum(target);
        if Coset::of(&sum, coset.rep()) != coset {
            return invalid(format!("{:?} is not a coset of {sum}", coset.members()));
        }
        if character.domain() != &source.intersect(target) {
            return invalid("character must be defined on the intersection of source and target");
        }
        Ok(Self { source: source.clone(), target: target.clone(), coset, character })
    }

    pub fn source(&self) -> &Subgroup {
        &self.source
    }

    pub fn target(&self) -> &Subgroup {
        &self.target
    }

    pub fn coset(&self) -> &Coset {
        &self.coset
    }

    pub fn character(&self) -> &Character {
        &self.character
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.source.parent()
    }

    /// `|Γ| = |H + K|`, the total dimension of the graded object.
    pub fn dimension(&self) -> usize {
        self.coset.len()
    }
}

impl fmt::Display for SimpleBimodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} on {}+{} with {}", self.source, self.target, self.coset.rep(), self.source.sum(&self.target), self.character)
    }
}

/// All simple `H–K` bimodules, ordered by coset representative and then by
/// character.
pub fn simple_bimodules(h: &Subgroup, k: &Subgroup) -> Vec<SimpleBimodule> {
    let g = h.parent();
    let sum = h.sum(k);
    let chars = dual_characters(&h.intersect(k));
    let cosets = coset_space(g, &sum).expect("H + K is a subgroup of G");
    let mut out = Vec::with_capacity(cosets.len() * chars.len());
    for c in &cosets {
        for chi in &chars {
            out.push(SimpleBimodule { source: h.clone(), target: k.clone(), coset: c.clone(), character: chi.clone() });
        }
    }
    out
}

/// The unit `C[H]` as an `H–H` bimodule.
pub fn identity_bimodule(h: &Subgroup) -> SimpleBimodule {
    SimpleBimodule {
        source: h.clone(),
        target: h.clone(),
        coset: Coset::of(h, &h.parent().zero()),
        character: Character::trivial(h),
    }
}

/// The conjugate bimodule `(−Γ, χ̄)`, a `K–H` bimodule.
pub fn dual(s: &SimpleBimodule) -> SimpleBimodule {
    SimpleBimodule {
        source: s.target.clone(),
        target: s.source.clone(),
        coset: s.coset.neg(s.group()),
        character: s.character.conj(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{Element, DEFAULT_MAX_GROUP_ORDER};

    fn z4() -> (FiniteAbelianGroup, QSystemSet) {
        let g = FiniteAbelianGroup::cyclic(4);
        let qs = qsystems(&g, DEFAULT_MAX_GROUP_ORDER).unwrap();
        (g, qs)
    }

    fn el(g: &FiniteAbelianGroup, x: i64) -> Element {
        g.element(&[x]).unwrap()
    }

    #[test]
    fn z4_qsystems() {
        let (_, qs) = z4();
        assert_eq!(qs.len(), 3);
        let orders: Vec<u64> = qs.items().iter().map(|q| q.dimension()).collect();
        assert_eq!(orders, vec![1, 2, 4]);
        assert!(qs.warning().is_none());
    }

    #[test]
    fn klein_qsystems_warn() {
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let qs = qsystems(&g, DEFAULT_MAX_GROUP_ORDER).unwrap();
        assert_eq!(qs.len(), 5);
        assert!(qs.warning().is_some());
    }

    #[test]
    fn trivial_group_qsystems() {
        let g = FiniteAbelianGroup::cyclic(1);
        let qs = qsystems(&g, DEFAULT_MAX_GROUP_ORDER).unwrap();
        assert_eq!(qs.len(), 1);
        assert_eq!(qs.all_simples().len(), 1);
    }

    #[test]
    fn z4_two_two_simples() {
        let (g, qs) = z4();
        let q2 = qs.subgroup(1);
        let simples = simple_bimodules(q2, q2);
        let labels: Vec<String> = simples.iter().map(|s| qs.label(s).unwrap()).collect();
        assert_eq!(labels, ["M_{2-2,0}^triv", "M_{2-2,0}^sign", "M_{2-2,1}^triv", "M_{2-2,1}^sign"]);
        assert_eq!(simples[2].coset().members(), &[el(&g, 1), el(&g, 3)]);
    }

    #[test]
    fn trivial_source_target_simples() {
        let (_, qs) = z4();
        let q1 = qs.subgroup(0);
        let labels: Vec<String> = simple_bimodules(q1, q1).iter().map(|s| qs.label(s).unwrap()).collect();
        assert_eq!(labels, ["M_{1-1,0}", "M_{1-1,1}", "M_{1-1,2}", "M_{1-1,3}"]);
        let q3 = qs.subgroup(2);
        let labels: Vec<String> = simple_bimodules(q3, q3).iter().map(|s| qs.label(s).unwrap()).collect();
        assert_eq!(labels, ["M_{3-3}^triv", "M_{3-3}^chi1", "M_{3-3}^chi2", "M_{3-3}^chi3"]);
    }

    #[test]
    fn z6_mixed_pair_has_one_simple() {
        let g = FiniteAbelianGroup::cyclic(6);
        let h = Subgroup::generated_by(&g, &[el(&g, 3)]).unwrap();
        let k = Subgroup::generated_by(&g, &[el(&g, 2)]).unwrap();
        let s = simple_bimodules(&h, &k);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].dimension(), 6);
    }

    #[test]
    fn simple_counts_match_formula() {
        for factors in [vec![4], vec![6], vec![2, 2], vec![8], vec![12], vec![2, 4]] {
            let g = FiniteAbelianGroup::new(&factors).unwrap();
            for h in subgroups(&g, 64).unwrap() {
                for k in subgroups(&g, 64).unwrap() {
                    let expect = g.order() / h.sum(&k).order() * h.intersect(&k).order();
                    assert_eq!(simple_bimodules(&h, &k).len() as u64, expect);
                }
            }
        }
    }

    #[test]
    fn identity_and_dual_examples() {
        let (g, qs) = z4();
        let q2 = qs.subgroup(1);
        assert_eq!(qs.label(&identity_bimodule(q2)).unwrap(), "M_{2-2,0}^triv");
        assert_eq!(qs.label(&identity_bimodule(qs.subgroup(2))).unwrap(), "M_{3-3}^triv");
        let q1 = qs.subgroup(0);
        let m11 = simple_bimodules(q1, q1);
        assert_eq!(dual(&m11[1]), m11[3]);
        let m22 = simple_bimodules(q2, q2);
        assert_eq!(dual(&m22[3]), m22[3]);
        let id = identity_bimodule(q2);
        assert_eq!(dual(&id), id);
        assert!(SimpleBimodule::new(q1, q2, Coset::of(q1, &el(&g, 1)), Character::trivial(q1)).is_err());
    }

    #[test]
    fn multi_factor_labels() {
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let qs = qsystems(&g, 64).unwrap();
        let q1 = qs.subgroup(0);
        let labels: Vec<String> = simple_bimodules(q1, q1).iter().map(|s| qs.label(s).unwrap()).collect();
        assert_eq!(labels[3], "M_{1-1,(1,1)}");
    }

    #[test]
    fn twisted_qsystem_is_flagged() {
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let h = Subgroup::whole(&g);
        let mu = CocycleTable::from_fn(&h, |a, b| num_rational::Rational64::new((a.coords()[1] * b.coords()[0]) as i64, 2));
        let q = QSystem::with_cocycle(mu).unwrap();
        assert!(!q.is_untwisted());
        assert!(matches!(q.require_untwisted(), Err(Error::Unsupported(_))));
    }
}
