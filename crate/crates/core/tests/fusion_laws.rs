use std::collections::BTreeMap;

use qsys_k0::abelian::{coset_space, dual_characters, Character, Coset, Phase};
use qsys_k0::{dual, fuse, fusion_table, identity_bimodule, simple_bimodules, FiniteAbelianGroup, FusionTable, SimpleBimodule, Subgroup};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

type Counts = BTreeMap<usize, u64>;

fn expand(t: &FusionTable, left: &Counts, right: &Counts) -> Counts {
    let mut out = Counts::new();
    for (&a, &ma) in left {
        for (&b, &mb) in right {
            for &(z, m) in t.product(a, b).expect("composable") {
                *out.entry(z).or_default() += ma * mb * m;
            }
        }
    }
    out
}

fn single(i: usize) -> Counts {
    Counts::from([(i, 1)])
}

fn assoc(t: &FusionTable, a: usize, b: usize, c: usize) -> bool {
    let ab = expand(t, &single(a), &single(b));
    let bc = expand(t, &single(b), &single(c));
    expand(t, &ab, &single(c)) == expand(t, &single(a), &bc)
}

fn composable_after(t: &FusionTable, a: usize) -> Vec<usize> {
    let mid = t.simple(a).target();
    (0..t.simples().len()).filter(|&b| t.simple(b).source() == mid).collect()
}

#[test]
fn associativity_exhaustive_z4() {
    let t = fusion_table(&FiniteAbelianGroup::cyclic(4), 64).unwrap();
    let mut triples = 0;
    for a in 0..t.simples().len() {
        for b in composable_after(&t, a) {
            for c in composable_after(&t, b) {
                assert!(assoc(&t, a, b, c), "{} {} {}", t.label(a), t.label(b), t.label(c));
                triples += 1;
            }
        }
    }
    assert!(triples > 1000);
}

#[test]
fn associativity_random_z6() {
    let t = fusion_table(&FiniteAbelianGroup::cyclic(6), 64).unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let all: Vec<usize> = (0..t.simples().len()).collect();
    for _ in 0..2000 {
        let a = *all.choose(&mut rng).unwrap();
        let b = *composable_after(&t, a).choose(&mut rng).unwrap();
        let c = *composable_after(&t, b).choose(&mut rng).unwrap();
        assert!(assoc(&t, a, b, c), "{} {} {}", t.label(a), t.label(b), t.label(c));
    }
}

fn mult(m: &[(SimpleBimodule, u64)], s: &SimpleBimodule) -> u64 {
    m.iter().filter(|(x, _)| x == s).map(|(_, k)| *k).sum()
}

#[test]
fn unit_and_dual_laws_z4() {
    let g = FiniteAbelianGroup::cyclic(4);
    let t = fusion_table(&g, 64).unwrap();
    for s in t.simples() {
        let (l, r) = (identity_bimodule(s.source()), identity_bimodule(s.target()));
        assert_eq!(fuse(&l, s).unwrap(), vec![(s.clone(), 1)]);
        assert_eq!(fuse(s, &r).unwrap(), vec![(s.clone(), 1)]);
        assert_eq!(dual(&dual(s)), *s);
        for u in t.simples() {
            if u.source() == s.source() && u.target() == s.target() {
                let expect = u64::from(u == s);
                assert_eq!(mult(&fuse(s, &dual(u)).unwrap(), &l), expect);
            }
        }
    }
}

#[test]
fn frobenius_reciprocity() {
    for f in [vec![4], vec![6], vec![2, 2]] {
        let t = fusion_table(&FiniteAbelianGroup::new(&f).unwrap(), 64).unwrap();
        for (&(i, j), prod) in t.products() {
            let (x, y) = (t.simple(i), t.simple(j));
            for z in t.simples() {
                if z.source() != x.source() || z.target() != y.target() {
                    continue;
                }
                let m: u64 = prod.iter().filter(|p| t.simple(p.0) == z).map(|p| p.1).sum();
                assert_eq!(m, mult(&t.fuse(z, &dual(y)).unwrap(), x));
                assert_eq!(m, mult(&t.fuse(&dual(x), z).unwrap(), y));
            }
        }
    }
}

/// Multiplicities from the orbit count of the `K`-action on degree pairs and
/// the character of `H ∩ L` on the fibre, without building any model.
fn mackey(a: &SimpleBimodule, b: &SimpleBimodule) -> Vec<(SimpleBimodule, u64)> {
    let g = a.group();
    let (h, k, l) = (a.source(), a.target(), b.target());
    let n = h.sum(k).intersect(&k.sum(l)).order();
    let d = h.intersect(k).intersect(l);
    let hl = h.intersect(l);
    let (num, den) = (n * d.order(), k.order() * hl.order());
    assert_eq!(num % den, 0);
    let m = num / den;
    let target = a.character().restrict(&d).unwrap().mul(&b.character().restrict(&d).unwrap()).unwrap();
    let hkl = h.sum(k).sum(l);
    let base = g.add(a.coset().rep(), b.coset().rep());
    let mut out = Vec::new();
    for gamma in coset_space(g, &h.sum(l)).unwrap() {
        if !hkl.contains(&g.sub(gamma.rep(), &base)) {
            continue;
        }
        for chi in dual_characters(&hl) {
            if chi.restrict(&d).unwrap() == target {
                out.push((SimpleBimodule::new(h, l, gamma.clone(), chi).unwrap(), m));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn closed_form_agrees() {
    for f in [vec![4], vec![6], vec![8], vec![2, 2], vec![2, 4], vec![12], vec![3, 3]] {
        let t = fusion_table(&FiniteAbelianGroup::new(&f).unwrap(), 512).unwrap();
        for &(i, j) in t.products().keys() {
            let mut got = t.fuse(t.simple(i), t.simple(j)).unwrap();
            got.sort();
            assert_eq!(got, mackey(t.simple(i), t.simple(j)), "{f:?}: {} x {}", t.label(i), t.label(j));
        }
    }
}

fn sorted(mut m: Vec<(SimpleBimodule, u64)>) -> Vec<(SimpleBimodule, u64)> {
    m.sort();
    m
}

#[test]
fn prime_cyclic_rules() {
    for p in [2u64, 3, 5] {
        let g = FiniteAbelianGroup::cyclic(p);
        let (q1, q2) = (Subgroup::trivial(&g), Subgroup::whole(&g));
        let el = |x: u64| g.element(&[x as i64]).unwrap();
        let m11 = |x: u64| SimpleBimodule::new(&q1, &q1, Coset::of(&q1, &el(x)), Character::trivial(&q1)).unwrap();
        let pi = |x: u64| Character::from_assignments(&q2, &[(el(1), Phase::new(x as i64, p as i64))]).unwrap();
        let m22 = |x: u64| SimpleBimodule::new(&q2, &q2, Coset::of(&q2, &g.zero()), pi(x)).unwrap();
        let m21 = SimpleBimodule::new(&q2, &q1, Coset::of(&q2, &g.zero()), Character::trivial(&q1)).unwrap();
        let m12 = SimpleBimodule::new(&q1, &q2, Coset::of(&q2, &g.zero()), Character::trivial(&q1)).unwrap();
        assert_eq!(simple_bimodules(&q1, &q1).len() as u64, p);
        assert_eq!(simple_bimodules(&q2, &q2).len() as u64, p);

        for x in 0..p {
            for y in 0..p {
                assert_eq!(fuse(&m11(x), &m11(y)).unwrap(), vec![(m11((x + y) % p), 1)]);
                assert_eq!(fuse(&m22(x), &m22(y)).unwrap(), vec![(m22((x + y) % p), 1)]);
            }
            assert_eq!(fuse(&m21, &m11(x)).unwrap(), vec![(m21.clone(), 1)]);
            assert_eq!(fuse(&m22(x), &m21).unwrap(), vec![(m21.clone(), 1)]);
            assert_eq!(fuse(&m12, &m22(x)).unwrap(), vec![(m12.clone(), 1)]);
        }
        assert_eq!(sorted(fuse(&m21, &m12).unwrap()), sorted((0..p).map(|x| (m22(x), 1)).collect()));
        assert_eq!(sorted(fuse(&m12, &m21).unwrap()), sorted((0..p).map(|x| (m11(x), 1)).collect()));
    }
}
