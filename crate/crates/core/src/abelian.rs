//! Finite abelian groups `Z/m₁ × … × Z/m_r`, their subgroups, cosets and
//! `Q/Z`-valued characters.
//!
//! Elements are integer vectors reduced componentwise. The canonical order on
//! elements is lexicographic, which coincides with the mixed-radix index order
//! used internally (first factor most significant). Every list this module
//! returns is sorted in that order, so serialized output is deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};

/// A point of `Q/Z`, stored as a reduced fraction in `[0, 1)`.
pub type Phase = Rational64;

/// Reduce a rational modulo 1 into `[0, 1)`.
pub fn reduce_phase(r: Rational64) -> Phase {
    let fl = r.floor();
    r - fl
}

/// Default bound on group order for subgroup enumeration.
pub const DEFAULT_MAX_GROUP_ORDER: u64 = 512;

/// A group element as a reduced coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<u64>);

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// `G = Z/m₁ × … × Z/m_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    exponent: u64,
    order: u64,
}

impl FiniteAbelianGroup {
    /// Build a group from its cyclic factors. Factors must be at least 1.
    pub fn new(cyclic_factors: &[i64]) -> Result<Self> {
        if cyclic_factors.is_empty() {
            return invalid("a group needs at least one cyclic factor");
        }
        let mut factors = Vec::with_capacity(cyclic_factors.len());
        let mut exponent = 1u64;
        let mut order = 1u64;
        for &m in cyclic_factors {
            if m < 1 {
                return invalid(format!("cyclic factor {m} must be >= 1"));
            }
            let m = m as u64;
            factors.push(m);
            exponent = exponent.lcm(&m);
            order = order
                .checked_mul(m)
                .ok_or_else(|| Error::ResourceLimit("group order overflows u64".into()))?;
        }
        Ok(Self { factors, exponent, order })
    }

    /// The cyclic group `Z/n`.
    pub fn cyclic(n: u64) -> Self {
        Self::new(&[n as i64]).expect("n >= 1")
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.factors.len()])
    }

    /// Reduce an arbitrary integer vector into the group.
    pub fn element(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.factors.len() {
            return invalid(format!(
                "element {:?} has {} coordinates, group has {} factors",
                coords,
                coords.len(),
                self.factors.len()
            ));
        }
        Ok(Element(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u64)
                .collect(),
        ))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        )
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    /// `n·a`.
    pub fn scale(&self, a: &Element, n: u64) -> Element {
        Element(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &m)| ((x as u128 * n as u128) % m as u128) as u64)
                .collect(),
        )
    }

    pub fn order_of(&self, a: &Element) -> u64 {
        a.0.iter()
            .zip(&self.factors)
            .fold(1u64, |acc, (&x, &m)| acc.lcm(&(m / x.gcd(&m))))
    }

    /// Mixed-radix index; agrees with the lexicographic order on elements.
    pub fn index_of(&self, a: &Element) -> usize {
        a.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&x, &m)| acc * m as usize + x as usize)
    }

    pub fn element_at(&self, mut index: usize) -> Element {
        let mut coords = vec![0u64; self.factors.len()];
        for (slot, &m) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (index % m as usize) as u64;
            index /= m as usize;
        }
        Element(coords)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        (0..self.order as usize).map(|i| self.element_at(i)).collect()
    }

    pub fn contains(&self, a: &Element) -> bool {
        a.0.len() == self.factors.len() && a.0.iter().zip(&self.factors).all(|(&x, &m)| x < m)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A subgroup, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    elements: Vec<Element>,
}

impl Subgroup {
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Self { parent: group.clone(), elements: vec![group.zero()] }
    }

    pub fn whole(group: &FiniteAbelianGroup) -> Self {
        Self { parent: group.clone(), elements: group.elements() }
    }

    /// The subgroup generated by `generators`.
    pub fn generated_by(group: &FiniteAbelianGroup, generators: &[Element]) -> Result<Self> {
        for g in generators {
            if !group.contains(g) {
                return invalid(format!("{g} is not an element of {group}"));
            }
        }
        let mut seen: BTreeSet<Element> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(group.zero());
        queue.push_back(group.zero());
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = group.add(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(Self { parent: group.clone(), elements: seen.into_iter().collect() })
    }

    /// Accept an explicit element list, checking closure.
    pub fn from_elements(group: &FiniteAbelianGroup, elements: &[Element]) -> Result<Self> {
        let set: BTreeSet<Element> = elements.iter().cloned().collect();
        if !set.contains(&group.zero()) {
            return invalid("subgroup must contain the identity");
        }
        for a in &set {
            if !group.contains(a) {
                return invalid(format!("{a} is not an element of {group}"));
            }
            if !set.contains(&group.neg(a)) {
                return invalid(format!("set is not closed under negation at {a}"));
            }
            for b in &set {
                if !set.contains(&group.add(a, b)) {
                    return invalid(format!("set is not closed under addition at {a} + {b}"));
                }
            }
        }
        Ok(Self { parent: group.clone(), elements: set.into_iter().collect() })
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.elements.binary_search(a).is_ok()
    }

    /// Position of `a` in the sorted element list.
    pub fn position(&self, a: &Element) -> Option<usize> {
        self.elements.binary_search(a).ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.elements.iter().all(|a| other.contains(a))
    }

    /// `H + K`.
    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        let g = &self.parent;
        let set: BTreeSet<Element> = self
            .elements
            .iter()
            .flat_map(|a| other.elements.iter().map(move |b| g.add(a, b)))
            .collect();
        Subgroup { parent: g.clone(), elements: set.into_iter().collect() }
    }

    /// `H ∩ K`.
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            parent: self.parent.clone(),
            elements: self.elements.iter().filter(|a| other.contains(a)).cloned().collect(),
        }
    }

    /// A small generating set, chosen greedily in element order.
    pub fn generators(&self) -> Vec<Element> {
        let g = &self.parent;
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(g);
        // prefer high-order elements so cyclic groups get a single generator
        let mut candidates: Vec<&Element> = self.elements.iter().collect();
        candidates.sort_by_key(|a| std::cmp::Reverse(g.order_of(a)));
        for a in candidates {
            if !span.contains(a) {
                gens.push(a.clone());
                span = Subgroup::generated_by(g, &gens).expect("members of the parent group");
                if span.order() == self.order() {
                    break;
                }
            }
        }
        gens
    }

    /// True iff a single element generates the subgroup.
    pub fn is_cyclic(&self) -> bool {
        let g = &self.parent;
        self.elements.iter().any(|a| g.order_of(a) == self.order())
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All subgroups of `group`, sorted by order and then by element list.
///
/// Fails with a resource-limit error when `|G|` exceeds `max_order`.
pub fn subgroups(group: &FiniteAbelianGroup, max_order: u64) -> Result<Vec<Subgroup>> {
    if group.order() > max_order {
        return Err(Error::ResourceLimit(format!(
            "group order {} exceeds the enumeration bound {}",
            group.order(),
            max_order
        )));
    }
    let n = group.order() as usize;
    let elements = group.elements();
    let add = |i: usize, j: usize| group.index_of(&group.add(&elements[i], &elements[j]));

    // S + <g> is the union of the cosets S + m·g up to the first m with m·g ∈ S
    let join = |members: &[bool], g: usize| -> Vec<bool> {
        let mut out = members.to_vec();
        let base: Vec<usize> = (0..n).filter(|&i| members[i]).collect();
        let mut shift = g;
        while !out[shift] {
            for &s in &base {
                out[add(s, shift)] = true;
            }
            shift = add(shift, g);
        }
        out
    };

    let mut trivial = vec![false; n];
    trivial[0] = true;
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    found.insert(vec![0]);
    queue.push_back(trivial);
    while let Some(s) = queue.pop_front() {
        for g in 0..n {
            if s[g] {
                continue;
            }
            let t = join(&s, g);
            let key: Vec<usize> = (0..n).filter(|&i| t[i]).collect();
            if found.insert(key) {
                queue.push_back(t);
            }
        }
    }
    let mut out: Vec<Subgroup> = found
        .into_iter()
        .map(|idx| Subgroup {
            parent: group.clone(),
            elements: idx.into_iter().map(|i| elements[i].clone()).collect(),
        })
        .collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(out)
}

/// Whether `H²(H, U(1))` vanishes; for finite abelian `H` this is cyclicity.
pub fn schur_trivial(h: &Subgroup) -> bool {
    h.is_cyclic()
}

/// A homomorphism `χ: D → Q/Z` with `χ(x) = exp(2πi·θ(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    domain: Subgroup,
    // aligned with domain.elements()
    values: Vec<Phase>,
}

impl Character {
    pub fn trivial(domain: &Subgroup) -> Self {
        Self { domain: domain.clone(), values: vec![Phase::zero(); domain.elements.len()] }
    }

    /// Extend a partial assignment multiplicatively over the whole domain.
    ///
    /// The assigned elements must generate the domain and the assignment must
    /// be consistent with the group law; both are checked.
    pub fn from_assignments(domain: &Subgroup, assigned: &[(Element, Phase)]) -> Result<Self> {
        let g = &domain.parent;
        let exp = Rational64::from_integer(g.exponent() as i64);
        for (a, theta) in assigned {
            if !domain.contains(a) {
                return invalid(format!("character assigns a value to {a}, outside {domain}"));
            }
            if !(theta * exp).is_integer() {
                return invalid(format!(
                    "character value {theta} at {a} has denominator not dividing exponent {}",
                    g.exponent()
                ));
            }
        }
        let mut values: BTreeMap<Element, Phase> = BTreeMap::new();
        values.insert(g.zero(), Phase::zero());
        let mut queue = VecDeque::from([g.zero()]);
        while let Some(x) = queue.pop_front() {
            let vx = values[&x];
            for (a, theta) in assigned {
                let y = g.add(&x, a);
                let vy = reduce_phase(vx + theta);
                match values.get(&y) {
                    Some(&existing) if existing != vy => {
                        return invalid(format!(
                            "character assignment is not multiplicative at {y}: {existing} vs {vy}"
                        ));
                    }
                    Some(_) => {}
                    None => {
                        values.insert(y.clone(), vy);
                        queue.push_back(y);
                    }
                }
            }
        }
        if values.len() != domain.elements.len() {
            return invalid(format!("assigned elements do not generate {domain}"));
        }
        Ok(Self { domain: domain.clone(), values: values.into_values().collect() })
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn values(&self) -> &[Phase] {
        &self.values
    }

    pub fn value(&self, a: &Element) -> Option<Phase> {
        self.domain.position(a).map(|i| self.values[i])
    }

    /// `(element, θ)` pairs in element order.
    pub fn table(&self) -> impl Iterator<Item = (&Element, Phase)> {
        self.domain.elements.iter().zip(self.values.iter().copied())
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn conj(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| reduce_phase(-v)).collect(),
        }
    }

    /// Pointwise product; domains must agree.
    pub fn mul(&self, other: &Character) -> Result<Self> {
        if self.domain != other.domain {
            return invalid("cannot multiply characters on different domains");
        }
        Ok(Self {
            domain: self.domain.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| reduce_phase(a + b)).collect(),
        })
    }

    pub fn restrict(&self, sub: &Subgroup) -> Result<Self> {
        let values = sub
            .elements
            .iter()
            .map(|a| self.value(a).ok_or_else(|| Error::InvalidInput(format!("{a} not in domain"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { domain: sub.clone(), values })
    }

    /// Verify `θ(x+y) = θ(x)+θ(y)`, `θ(0) = 0`, and the denominator bound.
    pub fn is_homomorphism(&self) -> bool {
        let g = &self.domain.parent;
        let exp = Rational64::from_integer(g.exponent() as i64);
        if self.value(&g.zero()) != Some(Phase::zero()) {
            return false;
        }
        if self.values.iter().any(|v| !(v * exp).is_integer()) {
            return false;
        }
        self.table().all(|(a, va)| {
            self.table()
                .all(|(b, vb)| self.value(&g.add(a, b)) == Some(reduce_phase(va + vb)))
        })
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.table().map(|(a, v)| format!("{a}:{v}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// All `|H|` characters of `H`, sorted lexicographically by value vector.
pub fn dual_characters(h: &Subgroup) -> Vec<Character> {
    let g = &h.parent;
    let gens = h.generators();
    let orders: Vec<u64> = gens.iter().map(|a| g.order_of(a)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0u64; gens.len()];
    loop {
        let assigned: Vec<(Element, Phase)> = gens
            .iter()
            .zip(&choice)
            .zip(&orders)
            .map(|((a, &j), &ord)| (a.clone(), Rational64::new(j as i64, ord as i64)))
            .collect();
        if let Ok(chi) = Character::from_assignments(h, &assigned) {
            out.push(chi);
        }
        // odometer over generator images
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                out.sort_by(|a, b| a.values.cmp(&b.values));
                out.dedup();
                return out;
            }
            choice[pos] += 1;
            if choice[pos] < orders[pos] {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// A coset `rep + D`, with `rep` the lexicographically least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    rep: Element,
    members: Vec<Element>,
}

impl Coset {
    /// The coset of `d` containing `a`.
    pub fn of(d: &Subgroup, a: &Element) -> Self {
        let g = &d.parent;
        let mut members: Vec<Element> = d.elements.iter().map(|x| g.add(a, x)).collect();
        members.sort();
        Self { rep: members[0].clone(), members }
    }

    pub fn rep(&self) -> &Element {
        &self.rep
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.members.binary_search(a).is_ok()
    }

    pub fn neg(&self, group: &FiniteAbelianGroup) -> Self {
        let mut members: Vec<Element> = self.members.iter().map(|a| group.neg(a)).collect();
        members.sort();
        Self { rep: members[0].clone(), members }
    }
}

/// `G/D` as a list of cosets, ordered by representative.
pub fn coset_space(group: &FiniteAbelianGroup, d: &Subgroup) -> Result<Vec<Coset>> {
    if d.parent != *group {
        return invalid(format!("{d} is not a subgroup of {group}"));
    }
    let mut covered = vec![false; group.order() as usize];
    let mut out = Vec::new();
    for a in group.elements() {
        if covered[group.index_of(&a)] {
            continue;
        }
        let c = Coset::of(d, &a);
        for m in &c.members {
            covered[group.index_of(m)] = true;
        }
        out.push(c);
    }
    Ok(out)
}

/// Phase exponents of a 2-cochain `μ: H × H → Q/Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    domain: Subgroup,
    values: BTreeMap<(Element, Element), Phase>,
}

impl CocycleTable {
    pub fn trivial(domain: &Subgroup) -> Self {
        Self::from_fn(domain, |_, _| Phase::zero())
    }

    pub fn from_fn(domain: &Subgroup, mut f: impl FnMut(&Element, &Element) -> Phase) -> Self {
        let mut values = BTreeMap::new();
        for a in &domain.elements {
            for b in &domain.elements {
                values.insert((a.clone(), b.clone()), reduce_phase(f(a, b)));
            }
        }
        Self { domain: domain.clone(), values }
    }

    /// Build from explicit entries; the table may be partial.
    pub fn from_entries(domain: &Subgroup, entries: impl IntoIterator<Item = ((Element, Element), Phase)>) -> Self {
        Self {
            domain: domain.clone(),
            values: entries.into_iter().map(|(k, v)| (k, reduce_phase(v))).collect(),
        }
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn get(&self, a: &Element, b: &Element) -> Option<Phase> {
        self.values.get(&(a.clone(), b.clone())).copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }
}

/// Check normalization and the 2-cocycle identity at every triple.
///
/// A table that is not total on `H × H` is rejected as invalid input.
pub fn validate_2cocycle(t: &CocycleTable) -> Result<bool> {
    let h = &t.domain;
    let g = &h.parent;
    let n = h.elements.len();
    if t.values.len() != n * n || h.elements.iter().any(|a| h.elements.iter().any(|b| t.get(a, b).is_none())) {
        return invalid("cocycle table is not total on H x H");
    }
    let mu = |a: &Element, b: &Element| t.get(a, b).expect("total table");
    let zero = g.zero();
    for a in &h.elements {
        if !mu(&zero, a).is_zero() || !mu(a, &zero).is_zero() {
            return Ok(false);
        }
    }
    for a in &h.elements {
        for b in &h.elements {
            let ab = g.add(a, b);
            for c in &h.elements {
                let bc = g.add(b, c);
                let lhs = reduce_phase(mu(a, b) + mu(&ab, c));
                let rhs = reduce_phase(mu(b, c) + mu(a, &bc));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
