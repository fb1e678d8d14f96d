//! Exact arithmetic in `Q(ζ_e) = Q[x]/Φ_e(x)`.
//!
//! Elements are coefficient vectors of length `φ(e)` in the power basis
//! `1, x, …, x^{φ(e)-1}`. Reduction is canonical, so equality is coefficient
//! equality. Per-order data (the cyclotomic polynomial and the reductions of
//! `x^k` for `k < e`) is computed once and shared.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::{reduce_phase, Phase};
use crate::error::{invalid, Result};

struct FieldData {
    order: u64,
    degree: usize,
    // x^k mod Φ_e for 0 <= k < e
    powers: Vec<Vec<i64>>,
    modulus: Vec<i64>,
}

fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn field(order: u64) -> Arc<FieldData> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FieldData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().expect("cache poisoned").get(&order) {
        return f.clone();
    }
    let modulus = cyclotomic_polynomial(order);
    let degree = modulus.len() - 1;
    let mut powers = Vec::with_capacity(order as usize);
    let mut cur = vec![0i64; degree.max(1)];
    cur[0] = 1;
    for _ in 0..order {
        powers.push(cur[..degree].to_vec());
        // multiply by x and reduce the overflow coefficient
        let mut next = vec![0i64; degree + 1];
        next[1..=degree].copy_from_slice(&cur[..degree]);
        let top = next[degree];
        if top != 0 {
            for (j, &m) in modulus.iter().enumerate() {
                next[j] -= top * m;
            }
        }
        cur = next[..degree.max(1)].to_vec();
        if degree == 0 {
            cur = vec![1];
        }
    }
    let data = Arc::new(FieldData { order, degree, powers, modulus });
    cache.lock().expect("cache poisoned").insert(order, data.clone());
    data
}

/// Euler's totient, the degree of `Q(ζ_e)`.
pub fn totient(e: u64) -> usize {
    field(e).degree
}

/// An element of `Q(ζ_e)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(order: u64) -> Self {
        let f = field(order);
        Self { order, coeffs: vec![BigRational::zero(); f.degree] }
    }

    pub fn from_integer(order: u64, n: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(order: u64, q: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = q;
        z
    }

    /// `ζ_e^k` for any integer `k`.
    pub fn zeta_power(order: u64, k: i64) -> Self {
        let f = field(order);
        let k = k.rem_euclid(order as i64) as usize;
        Self {
            order,
            coeffs: f.powers[k].iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect(),
        }
    }

    /// `Σ_k counts[k]·ζ_e^k`, the image of an integer group-ring element.
    pub fn from_exponent_counts(order: u64, counts: &[i64]) -> Self {
        let f = field(order);
        let mut acc = vec![0i64; f.degree];
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (a, &p) in acc.iter_mut().zip(&f.powers[k % order as usize]) {
                *a += c * p;
            }
        }
        Self { order, coeffs: acc.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect() }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `Some(n)` iff this number is exactly the integer constant `n`.
    pub fn as_integer(&self) -> Option<BigInt> {
        let (c0, rest) = self.coeffs.split_first()?;
        if rest.iter().all(|c| c.is_zero()) && c0.is_integer() {
            Some(c0.to_integer())
        } else {
            None
        }
    }

    /// Re-express in `Q(ζ_m)` for a multiple `m` of the current order.
    pub fn lift(&self, m: u64) -> Result<Self> {
        if !m.is_multiple_of(self.order) {
            return invalid(format!("cannot lift from order {} to {m}", self.order));
        }
        if m == self.order {
            return Ok(self.clone());
        }
        let step = (m / self.order) as i64;
        let mut out = Self::zero(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = &out + &Self::zeta_power(m, step * i as i64).scale(c);
        }
        Ok(out)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let m = a.order.lcm(&b.order);
        (a.lift(m).expect("lcm"), b.lift(m).expect("lcm"))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Complex conjugate, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &Self::zeta_power(self.order, -(i as i64)).scale(c);
            }
        }
        out
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let f = field(self.order);
        let modulus: Vec<BigRational> =
            f.modulus.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
        let s = poly::inverse_mod(&self.coeffs, &modulus)?;
        let mut coeffs = vec![BigRational::zero(); f.degree];
        for (slot, c) in coeffs.iter_mut().zip(s) {
            *slot = c;
        }
        Some(Self { order: self.order, coeffs })
    }

    /// Floating-point evaluation at `exp(2πi/e)`.
    pub fn to_complex(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.order as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += p * c.to_f64().unwrap_or(f64::NAN);
            p *= w;
        }
        acc
    }
}

/// `exp(2πiθ)` as an element of `Q(ζ_e)`; the denominator of `θ` must divide `e`.
pub fn root_of_unity(theta: Phase, e: u64) -> Result<CyclotomicNumber> {
    if e == 0 {
        return invalid("cyclotomic order must be positive");
    }
    let scaled = reduce_phase(theta) * Rational64::from_integer(e as i64);
    if !scaled.is_integer() {
        return invalid(format!("denominator of {theta} does not divide {e}"));
    }
    Ok(CyclotomicNumber::zeta_power(e, scaled.to_integer()))
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b) = CyclotomicNumber::common(self, rhs);
        CyclotomicNumber { order: a.order, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b) = CyclotomicNumber::common(self, rhs);
        let f = field(a.order);
        let mut out = vec![BigRational::zero(); f.degree];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                let red = &f.powers[(i + j) % f.order as usize];
                for (o, &p) in out.iter_mut().zip(red) {
                    if p != 0 {
                        *o += &xy * BigInt::from(p);
                    }
                }
            }
        }
        CyclotomicNumber { order: a.order, coeffs: out }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $m(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0 (z = zeta_{})", self.order)
        } else {
            write!(f, "{} (z = zeta_{})", terms.join(" + "), self.order)
        }
    }
}

mod poly {
    use super::*;

    fn trim(p: &mut Vec<BigRational>) {
        while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }

    fn is_zero(p: &[BigRational]) -> bool {
        p.iter().all(|c| c.is_zero())
    }

    fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let mut b = b.to_vec();
        trim(&mut b);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (vec![BigRational::zero()], r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = &r[i + db] / &lead;
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
            q[i] = c;
        }
        r.truncate(db.max(1));
        trim(&mut r);
        (q, r)
    }

    fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigRational::zero) - b.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect()
    }

    /// `s` with `s·a ≡ 1 (mod m)`, assuming `gcd(a, m)` is a unit.
    pub(super) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
        let (mut r0, mut r1) = (m.to_vec(), divrem(a, m).1);
        let (mut s0, mut s1) = (vec![BigRational::zero()], vec![BigRational::one()]);
        // invariant: s_i·a ≡ r_i (mod m)
        while !is_zero(&r1) {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let mut g = r0;
        trim(&mut g);
        if g.len() != 1 || g[0].is_zero() {
            return None;
        }
        let c = g[0].clone();
        let mut s = divrem(&s0, m).1;
        for x in s.iter_mut() {
            *x = &*x / &c;
        }
        Some(s)
    }
}

impl CyclotomicNumber {
    /// Sign-insensitive check used by tests comparing against float evaluation.
    pub fn approx_eq_complex(&self, z: Complex64, tol: f64) -> bool {
        (self.to_complex() - z).norm() <= tol * (1.0 + z.norm())
    }

    pub fn is_negative_integer(&self) -> bool {
        self.as_integer().is_some_and(|n| n.is_negative())
    }
}
