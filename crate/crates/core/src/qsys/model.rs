//! Explicit graded models of simple bimodules.
//!
//! The model of `(Γ, χ)` at base point `d ∈ Γ` is the induced module with one
//! basis vector per `γ ∈ Γ`, written `e_{(h,k)}` for the lexicographically
//! least `(h, k) ∈ H × K` with `h + d + k = γ`. Vectors for other
//! representatives are identified through `e_{(h+t, k−t)} = χ(t)·e_{(h,k)}`
//! for `t ∈ H ∩ K`, so every action is monomial with root-of-unity entries.

use std::collections::HashMap;

use crate::abelian::{Element, Subgroup};
use crate::error::{internal, invalid, Result};

use super::SimpleBimodule;

/// `e_i ↦ ζ_e^exponent · e_target`, with `e` the exponent of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub target: usize,
    pub exponent: u64,
}

/// Basis, grading and actions of a realized simple bimodule.
#[derive(Clone, Debug)]
pub struct BimoduleModel {
    simple: SimpleBimodule,
    base_point: Element,
    basis: Vec<(Element, Element)>,
    degrees: Vec<Element>,
    by_degree: HashMap<Element, usize>,
    // left[a][i] for a in source order, right[b][i] for b in target order
    left: Vec<Vec<Monomial>>,
    right: Vec<Vec<Monomial>>,
}

/// Realize at the canonical base point, the coset representative.
pub fn realize(s: &SimpleBimodule) -> Result<BimoduleModel> {
    realize_at(s, s.coset().rep())
}

/// Realize with an arbitrary base point `d ∈ Γ`.
pub fn realize_at(s: &SimpleBimodule, base_point: &Element) -> Result<BimoduleModel> {
    if !s.coset().contains(base_point) {
        return invalid(format!("base point {base_point} is not in the coset"));
    }
    let g = s.group();
    let e = g.exponent();
    let (h, k) = (s.source(), s.target());
    let degrees: Vec<Element> = s.coset().members().to_vec();
    let by_degree: HashMap<Element, usize> = degrees.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();

    let section = |gamma: &Element| -> (Element, Element) {
        let rest = g.sub(gamma, base_point);
        h.elements()
            .iter()
            .find_map(|a| {
                let b = g.sub(&rest, a);
                k.contains(&b).then(|| (a.clone(), b))
            })
            .expect("every member of the coset has a section")
    };
    let basis: Vec<(Element, Element)> = degrees.iter().map(section).collect();

    let chi_exp = |t: &Element| -> u64 {
        let theta = s.character().value(t).expect("t lies in the stabilizer");
        (theta * num_rational::Rational64::from_integer(e as i64)).to_integer() as u64 % e
    };

    let act = |shift_by: &Subgroup, left: bool| -> Vec<Vec<Monomial>> {
        shift_by
            .elements()
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .zip(&degrees)
                    .map(|((bh, _), gamma)| {
                        let moved = g.add(gamma, a);
                        let j = by_degree[&moved];
                        let (h2, _) = &basis[j];
                        // left: (a+h, k) = (h'+t, k'−t); right: (h, k+b) = (h'+t, k'−t)
                        let t = if left { g.sub(&g.add(a, bh), h2) } else { g.sub(bh, h2) };
                        Monomial { target: j, exponent: chi_exp(&t) }
                    })
                    .collect()
            })
            .collect()
    };
    let left = act(h, true);
    let right = act(k, false);
    Ok(BimoduleModel { simple: s.clone(), base_point: base_point.clone(), basis, degrees, by_degree, left, right })
}

impl BimoduleModel {
    pub fn simple(&self) -> &SimpleBimodule {
        &self.simple
    }

    pub fn base_point(&self) -> &Element {
        &self.base_point
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Section representatives `(h, k)` per basis vector.
    pub fn basis(&self) -> &[(Element, Element)] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> &Element {
        &self.degrees[i]
    }

    pub fn index_of_degree(&self, g: &Element) -> Option<usize> {
        self.by_degree.get(g).copied()
    }

    /// Left action of `a ∈ H`.
    pub fn left(&self, a: &Element) -> Option<&[Monomial]> {
        self.simple.source().position(a).map(|i| self.left[i].as_slice())
    }

    /// Right action of `b ∈ K`.
    pub fn right(&self, b: &Element) -> Option<&[Monomial]> {
        self.simple.target().position(b).map(|i| self.right[i].as_slice())
    }

    /// Check grading, shifts, commutation and the stabilizer scalar.
    pub fn check(&self) -> Result<()> {
        let s = &self.simple;
        let g = s.group();
        let e = g.exponent();
        let mut seen: Vec<&Element> = self.degrees.iter().collect();
        seen.sort();
        seen.dedup();
        if seen.len() != s.coset().len() || self.degrees.iter().any(|x| !s.coset().contains(x)) {
            return internal("grading is not a bijection onto the coset");
        }
        for (i, (h, k)) in self.basis.iter().enumerate() {
            if g.add(&g.add(h, &self.base_point), k) != self.degrees[i] {
                return internal("section does not match the grading");
            }
        }
        for a in s.source().elements() {
            for b in s.target().elements() {
                let (la, rb) = (self.left(a).unwrap(), self.right(b).unwrap());
                for i in 0..self.dim() {
                    if self.degrees[la[i].target] != g.add(&self.degrees[i], a)
                        || self.degrees[rb[i].target] != g.add(&self.degrees[i], b)
                    {
                        return internal("action does not shift the grading");
                    }
                    let x = la[i];
                    let y = rb[x.target];
                    let p = rb[i];
                    let q = la[p.target];
                    if y.target != q.target || (x.exponent + y.exponent) % e != (p.exponent + q.exponent) % e {
                        return internal("left and right actions do not commute");
                    }
                }
            }
        }
        for t in s.character().domain().elements() {
            let chi = s.character().value(t).unwrap();
            let expect = (chi * num_rational::Rational64::from_integer(e as i64)).to_integer() as u64 % e;
            let (lt, rt) = (self.left(t).unwrap(), self.right(&g.neg(t)).unwrap());
            for i in 0..self.dim() {
                let x = lt[i];
                let y = rt[x.target];
                if y.target != i || (x.exponent + y.exponent) % e != expect {
                    return internal("stabilizer does not act by the character");
                }
            }
        }
        Ok(())
    }
}
