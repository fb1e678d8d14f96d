//! Ordered `K₀` of stationary Bratteli systems.
//!
//! Connecting matrices act on column vectors: level-`n` coordinates `x` map to
//! `A·x` at level `n+1`, so `A[new][old]` counts edges. A rank-one system is
//! identified with a scaled localization `r·Z[1/S] ⊂ Q` through the
//! normalization `val_n(x) = λ^{-n}·(v·x)/(v·𝟙)`, where `v` is the primitive
//! left eigenvector spanning the row space of `A^b`.
//!
//! Multipliers depend on that normalization; ranks and prime sets do not.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

/// A dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return invalid("matrix rows have different lengths");
        }
        Ok(Self { rows: r, cols: c, data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect() })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return invalid("matrix rows have different lengths");
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Rows as machine integers, when every entry fits.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|x| x.to_i64()).collect()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.rows {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            ));
        }
        let mut out = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += a * o.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return invalid("cannot add matrices of different shapes");
        }
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() })
    }

    pub fn pow(&self, e: u32) -> Result<IntMatrix> {
        if !self.is_square() {
            return invalid("only square matrices have powers");
        }
        let mut out = IntMatrix::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `A·x` for a column vector.
    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return invalid(format!("vector of length {} does not match {} columns", x.len(), self.cols));
        }
        Ok((0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    /// `v·A` for a row vector.
    pub fn apply_left(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return invalid(format!("vector of length {} does not match {} rows", v.len(), self.rows));
        }
        Ok((0..self.cols).map(|c| (0..self.rows).map(|r| &v[r] * self.get(r, c)).sum()).collect())
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Rank over `Q`.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..self.rows {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[rank][c];
                    for j in c..self.cols {
                        let d = &f * &m[rank][j];
                        m[r][j] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| format!("[{}]", self.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// A nonnegative square connecting matrix with basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationarySystem {
    matrix: IntMatrix,
    labels: Vec<String>,
}

impl StationarySystem {
    pub fn new(matrix: IntMatrix, labels: Vec<String>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return invalid("a stationary system needs a nonempty square matrix");
        }
        if !matrix.is_nonnegative() {
            return invalid("connecting matrices must be nonnegative");
        }
        if labels.len() != matrix.rows() {
            return invalid("one label per basis vector is required");
        }
        Ok(Self { matrix, labels })
    }

    /// Unlabelled system; labels are `0..b`.
    pub fn unlabelled(matrix: IntMatrix) -> Result<Self> {
        let labels = (0..matrix.rows()).map(|i| i.to_string()).collect();
        Self::new(matrix, labels)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }
}

/// `r·Z[1/S]` with positive cone `r·Z[1/S] ∩ Q≥0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledLocalization {
    pub scale: BigRational,
    pub primes: Vec<u64>,
}

impl ScaledLocalization {
    /// True iff `q` is a unit of `Z[1/S]`, i.e. `±` a product of primes in `S`.
    pub fn is_s_unit(&self, q: &BigRational) -> bool {
        !q.is_zero() && s_free_part(q, &self.primes).abs().is_one()
    }
}

impl fmt::Display for ScaledLocalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.primes.is_empty() {
            "Z".to_string()
        } else {
            let p: Vec<String> = self.primes.iter().map(u64::to_string).collect();
            format!("Z[1/{}]", p.join(","))
        };
        if self.scale.is_one() {
            write!(f, "{base}")
        } else {
            write!(f, "{}*{base}", self.scale)
        }
    }
}

/// A system whose stabilized image is one-dimensional with integer eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneForm {
    pub lambda: BigInt,
    pub v: Vec<BigInt>,
    pub primes: Vec<u64>,
    pub matrix: IntMatrix,
}

impl RankOneForm {
    /// `v·𝟙`.
    pub fn weight(&self) -> BigInt {
        self.v.iter().sum()
    }

    /// The image of the value map.
    pub fn localization(&self) -> ScaledLocalization {
        let r = BigRational::new(BigInt::one(), self.weight());
        ScaledLocalization { scale: s_free_part(&r, &self.primes), primes: self.primes.clone() }
    }
}

impl fmt::Display for RankOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = self.localization();
        let base = if self.lambda.is_one() { "Z".to_string() } else { format!("Z[1/{}]", self.lambda) };
        if loc.scale.is_one() {
            write!(f, "{base}")
        } else {
            write!(f, "{}*{base}", loc.scale)
        }
    }
}

/// Independent rank-one blocks on a partition of the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSumForm {
    pub blocks: Vec<RankOneForm>,
    pub partition: Vec<Vec<usize>>,
}

/// The identified form of a limit group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum K0Description {
    RankOne(RankOneForm),
    DirectSum(DirectSumForm),
    Opaque(IntMatrix),
}

impl K0Description {
    pub fn variant(&self) -> &'static str {
        match self {
            K0Description::RankOne(_) => "rank_one",
            K0Description::DirectSum(_) => "direct_sum",
            K0Description::Opaque(_) => "opaque",
        }
    }

    pub fn as_rank_one(&self) -> Option<&RankOneForm> {
        match self {
            K0Description::RankOne(r) => Some(r),
            _ => None,
        }
    }

    /// Rational rank of the limit.
    pub fn rank(&self) -> usize {
        match self {
            K0Description::RankOne(_) => 1,
            K0Description::DirectSum(d) => d.blocks.len(),
            K0Description::Opaque(m) => limit_rank_of(m),
        }
    }

    /// Prime set of each rank-one block; `None` for opaque objects.
    pub fn block_primes(&self) -> Option<Vec<Vec<u64>>> {
        match self {
            K0Description::RankOne(r) => Some(vec![r.primes.clone()]),
            K0Description::DirectSum(d) => {
                let mut v: Vec<Vec<u64>> = d.blocks.iter().map(|b| b.primes.clone()).collect();
                v.sort();
                Some(v)
            }
            K0Description::Opaque(_) => None,
        }
    }
}

impl fmt::Display for K0Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            K0Description::RankOne(r) => write!(f, "{r}"),
            K0Description::DirectSum(d) => {
                let parts: Vec<String> = d.blocks.iter().map(|b| b.to_string()).collect();
                if parts.iter().all(|p| p == &parts[0]) {
                    write!(f, "{}^{}", parts[0], parts.len())
                } else {
                    write!(f, "{}", parts.join(" + "))
                }
            }
            K0Description::Opaque(m) => write!(f, "lim {m}"),
        }
    }
}

pub(crate) fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= n {
        let bp = BigInt::from(p);
        if (&n % &bp).is_zero() {
            out.push(p);
            while (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor fits u64"));
    }
    out
}

/// Remove every prime of `primes` from numerator and denominator.
pub fn s_free_part(q: &BigRational, primes: &[u64]) -> BigRational {
    let strip = |mut n: BigInt| {
        for &p in primes {
            let bp = BigInt::from(p);
            while !n.is_zero() && (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        n
    };
    BigRational::new(strip(q.numer().clone()), strip(q.denom().clone()))
}

fn rank_one(a: &IntMatrix) -> Option<RankOneForm> {
    let b = a.rows();
    let p = a.pow(b as u32).ok()?;
    if p.rank() != 1 {
        return None;
    }
    let row = (0..b).map(|r| p.row(r)).find(|r| r.iter().any(|x| !x.is_zero()))?;
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let v: Vec<BigInt> = row.iter().map(|x| x / &g).collect();
    let va = a.apply_left(&v).ok()?;
    let j = v.iter().position(|x| !x.is_zero())?;
    if !(&va[j] % &v[j]).is_zero() {
        return None;
    }
    let lambda = &va[j] / &v[j];
    if !lambda.is_positive() || va.iter().zip(&v).any(|(x, y)| x != &(&lambda * y)) {
        return None;
    }
    let primes = prime_factors(&lambda);
    Some(RankOneForm { lambda, v, primes, matrix: a.clone() })
}

fn components(a: &IntMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        let mut members = Vec::new();
        comp[s] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..n {
                if comp[j] == usize::MAX && (!a.get(i, j).is_zero() || !a.get(j, i).is_zero()) {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort();
        out.push(members);
    }
    out
}

/// Identify the limit group of a stationary system.
pub fn stationary_k0(sys: &StationarySystem) -> K0Description {
    let a = sys.matrix();
    if let Some(r) = rank_one(a) {
        return K0Description::RankOne(r);
    }
    let parts = components(a);
    if parts.len() > 1 {
        let blocks: Option<Vec<RankOneForm>> = parts.iter().map(|idx| rank_one(&a.submatrix(idx))).collect();
        if let Some(blocks) = blocks {
            return K0Description::DirectSum(DirectSumForm { blocks, partition: parts });
        }
    }
    K0Description::Opaque(a.clone())
}

/// `val_n(x) = λ^{-n}·(v·x)/(v·𝟙)`.
pub fn value_map(desc: &RankOneForm, level: u32, x: &[BigInt]) -> Result<BigRational> {
    if x.len() != desc.v.len() {
        return invalid(format!("vector of length {} does not match basis size {}", x.len(), desc.v.len()));
    }
    let dot: BigInt = desc.v.iter().zip(x).map(|(a, b)| a * b).sum();
    let denom = desc.weight() * num_traits::pow(desc.lambda.clone(), level as usize);
    Ok(BigRational::new(dot, denom))
}

/// The scalar `q` with `val_Q(M·x) = q·val_P(x)`, if `M` intertwines the two
/// ladders and maps `v_P`-lines to `v_Q`-lines.
pub fn morphism_multiplier(p: &RankOneForm, q: &RankOneForm, m: &IntMatrix) -> Result<Option<BigRational>> {
    if m.rows() != q.v.len() || m.cols() != p.v.len() {
        return Err(Error::InvalidInput(format!(
            "morphism matrix is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            q.v.len(),
            p.v.len()
        )));
    }
    if q.matrix.mul(m)? != m.mul(&p.matrix)? {
        return Ok(None);
    }
    let w = m.apply_left(&q.v)?;
    if w.iter().all(Zero::is_zero) {
        return Ok(Some(BigRational::zero()));
    }
    if p.lambda != q.lambda {
        return Ok(None);
    }
    let j = p.v.iter().position(|x| !x.is_zero()).expect("v is nonzero");
    let c = BigRational::new(w[j].clone(), p.v[j].clone());
    if w.iter().zip(&p.v).any(|(x, y)| BigRational::from_integer(x.clone()) != &c * y) {
        return Ok(None);
    }
    Ok(Some(c * BigRational::new(p.weight(), q.weight())))
}

fn limit_rank_of(a: &IntMatrix) -> usize {
    a.pow(a.rows() as u32).map(|p| p.rank()).unwrap_or(0)
}

/// Rank of `A^b` over `Q`, the rational rank of the limit group.
pub fn limit_rank(sys: &StationarySystem) -> usize {
    limit_rank_of(sys.matrix())
}

/// A shift equivalence `RA = BR`, `SB = AS`, `SR = A^l`, `RS = B^l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftEquivalence {
    pub r: IntMatrix,
    pub s: IntMatrix,
    pub lag: u32,
}

/// Largest number of candidate matrices enumerated per unknown.
pub const SHIFT_SEARCH_CAP: u64 = 1 << 20;

fn enumerate(rows: usize, cols: usize, bound: u64, mut keep: impl FnMut(&IntMatrix) -> bool) -> Vec<IntMatrix> {
    let cells = rows * cols;
    let mut digits = vec![0u64; cells];
    let mut out = Vec::new();
    loop {
        let m = IntMatrix {
            rows,
            cols,
            data: digits.iter().map(|&d| BigInt::from(d)).collect(),
        };
        if keep(&m) {
            out.push(m);
        }
        let mut pos = cells;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] <= bound {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Search for a shift equivalence with lag at most `lag_bound` and entries at
/// most `entry_bound`. `None` is inconclusive, never a proof of inequivalence.
pub fn shift_equivalent_bounded(a: &IntMatrix, b: &IntMatrix, lag_bound: u32, entry_bound: u64) -> Option<ShiftEquivalence> {
    if !a.is_square() || !b.is_square() || lag_bound == 0 {
        return None;
    }
    if a == b {
        return Some(ShiftEquivalence { r: IntMatrix::identity(a.rows()), s: a.clone(), lag: 1 });
    }
    let (n, m) = (a.rows(), b.rows());
    let candidates = (entry_bound + 1).checked_pow((n * m) as u32)?;
    if candidates > SHIFT_SEARCH_CAP {
        return None;
    }
    let rs = enumerate(m, n, entry_bound, |r| !r.is_zero() && r.mul(a).ok() == b.mul(r).ok());
    let ss = enumerate(n, m, entry_bound, |s| !s.is_zero() && s.mul(b).ok() == a.mul(s).ok());
    for lag in 1..=lag_bound {
        let (al, bl) = (a.pow(lag).ok()?, b.pow(lag).ok()?);
        for r in &rs {
            for s in &ss {
                if s.mul(r).ok()? == al && r.mul(s).ok()? == bl {
                    return Some(ShiftEquivalence { r: r.clone(), s: s.clone(), lag });
                }
            }
        }
    }
    None
}
