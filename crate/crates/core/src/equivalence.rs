//! Deciding isomorphism of pointed invariants.
//!
//! A witness is one positive rational `u_P` per representative with
//! `u_Q·f₁(m) = f₂(m)·u_P` for every simple `m: P → Q`, `u_{1}·p₁ = p₂`, and
//! `u_P·r₁/r₂` an `S`-unit. Negative answers only ever cite limit ranks, prime
//! sets, or exact contradictions among these equations, none of which depend on
//! how the value maps are normalized.

use std::collections::VecDeque;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{internal, invalid, Result};
use crate::invariant::{InvariantData, PointedValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Rank,
    PrimeSet,
    ConstraintInconsistency,
    UnitObstruction,
    PointedObstruction,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::Rank => "rank",
            CertificateKind::PrimeSet => "prime-set",
            CertificateKind::ConstraintInconsistency => "constraint-inconsistency",
            CertificateKind::UnitObstruction => "unit-obstruction",
            CertificateKind::PointedObstruction => "pointed-obstruction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub object: String,
    pub kind: CertificateKind,
    pub details: String,
}

/// `u_P` per representative, in representative order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub names: Vec<String>,
    pub values: Vec<BigRational>,
}

impl Witness {
    pub fn get(&self, name: &str) -> Option<&BigRational> {
        self.names.iter().position(|n| n == name).map(|i| &self.values[i])
    }

    pub fn inverse(&self) -> Witness {
        Witness { names: self.names.clone(), values: self.values.iter().map(|u| u.recip()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent(Witness),
    Inequivalent(Certificate),
    Unknown(String),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Equivalent(_) => "equivalent",
            Verdict::Inequivalent(_) => "inequivalent",
            Verdict::Unknown(_) => "unknown",
        }
    }

    /// Process exit code for the command line.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Equivalent(_) => 0,
            Verdict::Inequivalent(_) => 3,
            Verdict::Unknown(_) => 4,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent(w) => {
                let parts: Vec<String> = w.names.iter().zip(&w.values).map(|(n, u)| format!("{n}={u}")).collect();
                write!(f, "EQUIVALENT witness {}", parts.join(" "))
            }
            Verdict::Inequivalent(c) => write!(f, "INEQUIVALENT at {}: {} ({})", c.object, c.kind.as_str(), c.details),
            Verdict::Unknown(r) => write!(f, "UNKNOWN: {r}"),
        }
    }
}

fn same_shape(a: &InvariantData, b: &InvariantData) -> Result<()> {
    if a.group() != b.group() {
        return invalid("invariants live over different groups");
    }
    if a.objects().len() != b.objects().len() || a.morphisms().len() != b.morphisms().len() {
        return invalid("invariants have different representative sets");
    }
    Ok(())
}

fn identical(a: &InvariantData, b: &InvariantData) -> bool {
    a.objects().iter().zip(b.objects()).all(|(x, y)| x.k0 == y.k0 && x.normalization == y.normalization)
        && a.morphisms().iter().zip(b.morphisms()).all(|(x, y)| x.multiplier == y.multiplier && x.matrix == y.matrix)
        && a.pointed() == b.pointed()
}

fn names(a: &InvariantData) -> Vec<String> {
    a.objects().iter().map(|o| o.name.clone()).collect()
}

fn cert(object: &str, kind: CertificateKind, details: String) -> Verdict {
    Verdict::Inequivalent(Certificate { object: object.to_string(), kind, details })
}

fn structural(a: &InvariantData, b: &InvariantData) -> Option<Verdict> {
    for (x, y) in a.objects().iter().zip(b.objects()) {
        let (Some(k1), Some(k2)) = (&x.k0, &y.k0) else { continue };
        if k1.rank() != k2.rank() {
            return Some(cert(&x.name, CertificateKind::Rank, format!("{} != {}", k1.rank(), k2.rank())));
        }
        if let (Some(p1), Some(p2)) = (k1.block_primes(), k2.block_primes()) {
            if p1 != p2 {
                return Some(cert(&x.name, CertificateKind::PrimeSet, format!("{p1:?} != {p2:?}")));
            }
        }
    }
    None
}

/// Decide whether two invariants over the same group are isomorphic.
pub fn compare(a: &InvariantData, b: &InvariantData) -> Result<Verdict> {
    same_shape(a, b)?;
    if let Some(v) = structural(a, b) {
        return Ok(v);
    }
    let n = a.objects().len();
    let all_rank_one = a.objects().iter().chain(b.objects()).all(|o| o.rank_one().is_some());
    if !all_rank_one {
        if identical(a, b) {
            return Ok(Verdict::Equivalent(Witness { names: names(a), values: vec![BigRational::one(); n] }));
        }
        return Ok(Verdict::Unknown("some objects are not identified as rank one".into()));
    }

    // u_Q = (f₂/f₁)·u_P along every simple morphism with nonzero multipliers
    let mut adj: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); n];
    for (m1, m2) in a.morphisms().iter().zip(b.morphisms()) {
        let (f1, f2) = (m1.multiplier.clone().expect("rank one"), m2.multiplier.clone().expect("rank one"));
        match (f1.is_zero(), f2.is_zero()) {
            (true, true) => continue,
            (false, false) => {}
            _ => {
                return Ok(cert(
                    &m1.label,
                    CertificateKind::ConstraintInconsistency,
                    format!("multiplier {f1} cannot match {f2}"),
                ))
            }
        }
        let ratio = &f2 / &f1;
        adj[m1.source].push((m1.target, ratio.clone()));
        adj[m1.target].push((m1.source, ratio.recip()));
    }
    let mut u: Vec<Option<BigRational>> = vec![None; n];
    let mut component = vec![usize::MAX; n];
    for root in 0..n {
        if u[root].is_some() {
            continue;
        }
        u[root] = Some(BigRational::one());
        component[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            let up = u[p].clone().expect("visited");
            for (q, r) in &adj[p] {
                if u[*q].is_none() {
                    u[*q] = Some(&up * r);
                    component[*q] = root;
                    queue.push_back(*q);
                }
            }
        }
    }
    let mut u: Vec<BigRational> = u.into_iter().map(|x| x.expect("every object visited")).collect();
    for (m1, m2) in a.morphisms().iter().zip(b.morphisms()) {
        let (f1, f2) = (m1.multiplier.as_ref().unwrap(), m2.multiplier.as_ref().unwrap());
        if &u[m1.target] * f1 != f2 * &u[m1.source] {
            return Ok(cert(
                &m1.label,
                CertificateKind::ConstraintInconsistency,
                format!("u_{}*{f1} != {f2}*u_{}", a.objects()[m1.target].name, a.objects()[m1.source].name),
            ));
        }
    }

    let mut factor: Vec<Option<BigRational>> = vec![None; n];
    match (a.pointed(), b.pointed()) {
        (PointedValue::Rational(p1), PointedValue::Rational(p2)) => {
            if p1.is_zero() || p2.is_zero() {
                if p1 != p2 {
                    return Ok(cert(&a.objects()[0].name, CertificateKind::PointedObstruction, format!("{p1} vs {p2}")));
                }
            } else {
                factor[component[0]] = Some(p2 / (&u[0] * p1));
            }
        }
        _ => return internal("rank-one unit object without a rational pointed value"),
    }
    for root in 0..n {
        if component[root] == root && factor[root].is_none() {
            // free component: match the scales at its root
            let (r1, r2) = (a.objects()[root].localization().unwrap(), b.objects()[root].localization().unwrap());
            factor[root] = Some(&r2.scale / (&u[root] * &r1.scale));
        }
    }
    for p in 0..n {
        u[p] = &u[p] * factor[component[p]].as_ref().unwrap();
    }

    for (p, up) in u.iter().enumerate() {
        let name = &a.objects()[p].name;
        if !up.is_positive() {
            let kind = if component[p] == component[0] { CertificateKind::PointedObstruction } else { CertificateKind::UnitObstruction };
            return Ok(cert(name, kind, format!("u = {up} is not positive")));
        }
        let (r1, r2) = (a.objects()[p].localization().unwrap(), b.objects()[p].localization().unwrap());
        let ratio = up * &r1.scale / &r2.scale;
        if !r1.is_s_unit(&ratio) {
            return Ok(cert(name, CertificateKind::UnitObstruction, format!("{ratio} is not a unit of Z[1/S]")));
        }
    }

    let witness = Witness { names: names(a), values: u };
    if !verify_witness(a, b, &witness) {
        return internal("constructed witness fails verification");
    }
    Ok(Verdict::Equivalent(witness))
}

/// Replay every naturality, positivity, `S`-unit and pointedness equation.
pub fn verify_witness(a: &InvariantData, b: &InvariantData, w: &Witness) -> bool {
    if same_shape(a, b).is_err() || w.values.len() != a.objects().len() || w.values.iter().any(|u| !u.is_positive()) {
        return false;
    }
    let u = &w.values;
    for (p, (x, y)) in a.objects().iter().zip(b.objects()).enumerate() {
        match (x.localization(), y.localization()) {
            (Some(r1), Some(r2)) => {
                if r1.primes != r2.primes || !r1.is_s_unit(&(&u[p] * &r1.scale / &r2.scale)) {
                    return false;
                }
            }
            _ => {
                if x.k0 != y.k0 || x.diagram.tail() != y.diagram.tail() || !u[p].is_one() {
                    return false;
                }
            }
        }
    }
    for (m1, m2) in a.morphisms().iter().zip(b.morphisms()) {
        match (&m1.multiplier, &m2.multiplier) {
            (Some(f1), Some(f2)) => {
                if &u[m1.target] * f1 != f2 * &u[m1.source] {
                    return false;
                }
            }
            _ => {
                if m1.matrix != m2.matrix || !u[m1.source].is_one() || !u[m1.target].is_one() {
                    return false;
                }
            }
        }
    }
    match (a.pointed(), b.pointed()) {
        (PointedValue::Rational(p1), PointedValue::Rational(p2)) => &u[0] * p1 == *p2,
        (PointedValue::Vector(v1), PointedValue::Vector(v2)) => v1 == v2 && u[0].is_one(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::diagram::EnrichedBratteliDiagram;
    use crate::invariant::compute_invariant_with;
    use crate::qsys::{fusion_table, simple_bimodules, FusionTable, SimpleBimodule};
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn inv(t: &Arc<FusionTable>, v: usize, pick: impl Fn(&SimpleBimodule) -> bool, mult: u64) -> InvariantData {
        let h = t.qsystems().subgroup(v);
        let edges = simple_bimodules(h, h).into_iter().filter(|s| pick(s)).map(|s| (s, mult)).collect();
        let d = EnrichedBratteliDiagram::homogeneous(t.group(), h, edges, None).unwrap();
        compute_invariant_with(t.clone(), &d).unwrap()
    }

    fn z4() -> Arc<FusionTable> {
        fusion_table(&FiniteAbelianGroup::cyclic(4), 64).unwrap()
    }

    #[test]
    fn f_and_g_are_equivalent() {
        let t = z4();
        let (f, g) = (inv(&t, 0, |_| true, 1), inv(&t, 1, |_| true, 1));
        let v = compare(&f, &g).unwrap();
        let Verdict::Equivalent(w) = &v else { panic!("{v}") };
        assert_eq!(w.values, [q(1, 1), q(1, 2), q(1, 2)]);
        assert_eq!(w.names, ["Q1", "Q2", "Q3"]);
        assert!(verify_witness(&f, &g, w));
        let ones = Witness { names: w.names.clone(), values: vec![q(1, 1); 3] };
        assert!(!verify_witness(&f, &g, &ones));
        // the unpointed witness (2, 1, 1) is natural but moves the pointed class
        let alpha = Witness { names: w.names.clone(), values: vec![q(2, 1), q(1, 1), q(1, 1)] };
        assert!(!verify_witness(&f, &g, &alpha));

        let back = compare(&g, &f).unwrap();
        assert_eq!(back, Verdict::Equivalent(w.inverse()));
    }

    #[test]
    fn g_and_h_are_equivalent() {
        let t = z4();
        let (g, h) = (inv(&t, 1, |_| true, 1), inv(&t, 2, |_| true, 1));
        let Verdict::Equivalent(w) = compare(&g, &h).unwrap() else { panic!() };
        assert!(verify_witness(&g, &h, &w));
    }

    #[test]
    fn e_and_f_differ_in_rank() {
        let t = z4();
        let e = inv(&t, 2, |s| s.character().is_trivial(), 4);
        let f = inv(&t, 0, |_| true, 1);
        let v = compare(&e, &f).unwrap();
        assert_eq!(
            v,
            Verdict::Inequivalent(Certificate { object: "Q2".into(), kind: CertificateKind::Rank, details: "2 != 1".into() })
        );
        assert_eq!(v.exit_code(), 3);
    }

    #[test]
    fn reflexive() {
        let t = z4();
        for d in [inv(&t, 0, |_| true, 1), inv(&t, 2, |s| s.character().is_trivial(), 4)] {
            let Verdict::Equivalent(w) = compare(&d, &d).unwrap() else { panic!() };
            assert!(w.values.iter().all(One::is_one));
            assert!(verify_witness(&d, &d, &w));
        }
    }

    #[test]
    fn prime_sets_separate() {
        let t = z4();
        let f = inv(&t, 0, |_| true, 1);
        let f3 = inv(&t, 0, |_| true, 3);
        let v = compare(&f, &f3).unwrap();
        assert!(matches!(&v, Verdict::Inequivalent(c) if c.kind == CertificateKind::PrimeSet), "{v}");
    }

    #[test]
    fn weights_can_obstruct() {
        // F with generator weights (1,0,0,0) has pointed value 1/4; Z[1/4] absorbs it
        let t = z4();
        let h = t.qsystems().subgroup(0);
        let edges: Vec<_> = simple_bimodules(h, h).into_iter().map(|s| (s, 1)).collect();
        let d = EnrichedBratteliDiagram::homogeneous(t.group(), h, edges.clone(), Some(vec![1, 0, 0, 0])).unwrap();
        let light = compute_invariant_with(t.clone(), &d).unwrap();
        let f = inv(&t, 0, |_| true, 1);
        assert!(matches!(compare(&f, &light).unwrap(), Verdict::Equivalent(_)));
        // weight 3 is not a 2-unit multiple of 1
        let d3 = EnrichedBratteliDiagram::homogeneous(t.group(), h, edges, Some(vec![3, 0, 0, 0])).unwrap();
        let heavy = compute_invariant_with(t.clone(), &d3).unwrap();
        let v = compare(&f, &heavy).unwrap();
        assert!(matches!(&v, Verdict::Inequivalent(c) if c.kind == CertificateKind::UnitObstruction), "{v}");
    }

    #[test]
    fn rescaling_keeps_verdicts() {
        let t = z4();
        let (f, g, h) = (inv(&t, 0, |_| true, 1), inv(&t, 1, |_| true, 1), inv(&t, 2, |_| true, 1));
        let e = inv(&t, 2, |s| s.character().is_trivial(), 4);
        let c1 = [q(3, 1), q(2, 5), q(7, 4)];
        let c2 = [q(1, 6), q(9, 1), q(1, 1)];
        for (x, y) in [(&f, &g), (&g, &h), (&e, &f), (&f, &f)] {
            let base = compare(x, y).unwrap();
            let scaled = compare(&x.rescaled(&c1).unwrap(), &y.rescaled(&c2).unwrap()).unwrap();
            assert_eq!(base.tag(), scaled.tag());
        }
    }
}
