//! Floating-point cross-check of the fusion engine.
//!
//! Builds dense complex models from scratch with a different section
//! (lexicographically largest representative, largest base point), forms the
//! full tensor product, and reads multiplicities off
//! `Tr(P_{g₃} · Π_{χ₃} · e)` before rounding.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::abelian::{coset_space, dual_characters, Character, Element, Subgroup};
use crate::error::{Error, Result};

use super::{Multiset, SimpleBimodule};

const TOLERANCE: f64 = 1e-6;

struct Dense {
    n: usize,
    data: Vec<Complex64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    fn at(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.n + c]
    }

    fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    fn mul(&self, o: &Dense) -> Dense {
        let mut out = Dense::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.data[i * self.n + j] += a * o.get(k, j);
                }
            }
        }
        out
    }

    fn kron(a: &Dense, b: &Dense) -> Dense {
        let n = a.n * b.n;
        let mut out = Dense::zeros(n);
        for i in 0..a.n {
            for j in 0..a.n {
                let x = a.get(i, j);
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for p in 0..b.n {
                    for q in 0..b.n {
                        *out.at(i * b.n + p, j * b.n + q) = x * b.get(p, q);
                    }
                }
            }
        }
        out
    }

    fn add_scaled(&mut self, o: &Dense, s: Complex64) {
        for (x, y) in self.data.iter_mut().zip(&o.data) {
            *x += s * y;
        }
    }
}

fn phase(chi: &Character, t: &Element) -> Complex64 {
    let theta = chi.value(t).expect("element of the stabilizer");
    let x = *theta.numer() as f64 / *theta.denom() as f64;
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

struct FloatModel {
    degrees: Vec<Element>,
    left: Vec<Dense>,
    right: Vec<Dense>,
}

fn float_model(s: &SimpleBimodule) -> FloatModel {
    let g = s.group();
    let (h, k) = (s.source(), s.target());
    let degrees = s.coset().members().to_vec();
    let base = degrees.last().expect("nonempty coset").clone();
    let n = degrees.len();
    let pos = |x: &Element| degrees.iter().position(|y| y == x).expect("degree in coset");
    let section: Vec<Element> = degrees
        .iter()
        .map(|gamma| {
            let rest = g.sub(gamma, &base);
            h.elements().iter().rev().find(|a| k.contains(&g.sub(&rest, a))).expect("section").clone()
        })
        .collect();
    let build = |sub: &Subgroup, left: bool| -> Vec<Dense> {
        sub.elements()
            .iter()
            .map(|a| {
                let mut m = Dense::zeros(n);
                for i in 0..n {
                    let j = pos(&g.add(&degrees[i], a));
                    let t = if left { g.sub(&g.add(a, &section[i]), &section[j]) } else { g.sub(&section[i], &section[j]) };
                    *m.at(j, i) = phase(s.character(), &t);
                }
                m
            })
            .collect()
    };
    let left = build(h, true);
    let right = build(k, false);
    FloatModel { degrees, left, right }
}

fn identity(n: usize) -> Dense {
    let mut m = Dense::zeros(n);
    for i in 0..n {
        *m.at(i, i) = Complex64::new(1.0, 0.0);
    }
    m
}

/// Decompose `S₁ ⊠_K S₂` in complex floating point; used only as a test oracle.
pub fn float_oracle_fuse(s1: &SimpleBimodule, s2: &SimpleBimodule) -> Result<Multiset> {
    if s1.target() != s2.source() {
        return Err(Error::InvalidComposition("middle Q-systems differ".into()));
    }
    let g = s1.group();
    let (h, k, l) = (s1.source(), s1.target(), s2.target());
    let (x1, x2) = (float_model(s1), float_model(s2));
    let (n1, n2) = (x1.degrees.len(), x2.degrees.len());
    let n = n1 * n2;
    let (id1, id2) = (identity(n1), identity(n2));

    let mut e = Dense::zeros(n);
    for (ki, kk) in k.elements().iter().enumerate() {
        let neg = k.position(&g.neg(kk)).expect("subgroup closed under negation");
        let term = Dense::kron(&x1.right[ki], &x2.left[neg]);
        e.add_scaled(&term, Complex64::new(1.0 / k.order() as f64, 0.0));
    }

    let hl = h.intersect(l);
    let mut out = Multiset::new();
    for gamma in coset_space(g, &h.sum(l))? {
        let g3 = gamma.rep();
        let mut proj = Dense::zeros(n);
        for i in 0..n1 {
            for j in 0..n2 {
                if &g.add(&x1.degrees[i], &x2.degrees[j]) == g3 {
                    *proj.at(i * n2 + j, i * n2 + j) = Complex64::new(1.0, 0.0);
                }
            }
        }
        for chi in dual_characters(&hl) {
            let mut pi = Dense::zeros(n);
            for t in hl.elements() {
                let lt = Dense::kron(&x1.left[h.position(t).unwrap()], &id2);
                let rt = Dense::kron(&id1, &x2.right[l.position(&g.neg(t)).unwrap()]);
                pi.add_scaled(&lt.mul(&rt), phase(&chi, t).conj() / hl.order() as f64);
            }
            let m = proj.mul(&pi).mul(&e);
            let tr: Complex64 = (0..n).map(|i| m.get(i, i)).sum();
            let rounded = tr.re.round();
            if (tr - Complex64::new(rounded, 0.0)).norm() > TOLERANCE || rounded < 0.0 {
                return Err(Error::OracleFailure(format!("trace {tr} is not a nonnegative integer")));
            }
            if rounded > 0.0 {
                let simple = SimpleBimodule::new(h, l, gamma.clone(), chi.clone())?;
                out.push((simple, rounded as u64));
            }
        }
    }
    Ok(out)
}
