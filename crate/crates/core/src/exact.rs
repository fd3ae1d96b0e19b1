//! Exact arithmetic: big rationals, sums of square roots, and integer linear algebra.
//!
//! Every boolean with theorem-level consequences (distinct-eigenvalue counts,
//! span ranks, fusion decisions) is computed here without tolerances.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    // Direct division loses nothing for the magnitudes we meet; fall back on
    // shifting for huge numerators/denominators.
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(60);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only if it lies within `tol` of `x`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    for den in 1..=max_den {
        let num = (x * den as f64).round();
        if num.abs() > 9.0e15 {
            return None;
        }
        if (num / den as f64 - x).abs() <= tol {
            return Some(ratio(num as i64, den));
        }
    }
    None
}

/// Splits `m > 0` as `s² · r` with `r` squarefree. Gives up (returns `None`)
/// when a large cofactor cannot be certified.
pub fn squarefree_split(m: u128) -> Option<(u128, u128)> {
    if m == 0 {
        return None;
    }
    let mut rest = m;
    let mut square = 1u128;
    let mut free = 1u128;
    let mut p = 2u128;
    while p <= 1_000_000 && p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= p;
        }
        if e % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        let root = isqrt(rest);
        if root * root == rest {
            square *= root;
        } else if p * p > rest {
            free *= rest;
        } else {
            return None;
        }
    }
    Some((square, free))
}

fn isqrt(m: u128) -> u128 {
    if m < 2 {
        return m;
    }
    let mut x = (m as f64).sqrt() as u128;
    while x * x > m {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= m {
        x += 1;
    }
    x
}

/// A finite sum `Σ q_r √r` over squarefree integers `r`.
///
/// `r = 1` carries the rational part; negative radicands are imaginary
/// (`√-7 = i√7`). Distinct squarefree radicands are linearly independent over
/// the rationals, so equality of two `Surd`s is decided exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    terms: BTreeMap<i64, Rational>,
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut s = Surd::zero();
        s.add_term(1, q);
        s
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(rat(n))
    }

    /// Principal square root of a rational.
    pub fn sqrt_of(q: &Rational) -> Option<Self> {
        if q.is_zero() {
            return Some(Surd::zero());
        }
        let prod = (q.numer() * q.denom()).abs();
        let prod = prod.to_u128()?;
        let (square, free) = squarefree_split(prod)?;
        let free = i64::try_from(free).ok()?;
        let key = if q.is_negative() { -free } else { free };
        let coeff = Rational::new(BigInt::from(square), q.denom().clone());
        let mut s = Surd::zero();
        s.add_term(key, coeff);
        Some(s)
    }

    fn add_term(&mut self, key: i64, q: Rational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// True when no imaginary radicand survives.
    pub fn is_real(&self) -> bool {
        self.terms.keys().all(|&r| r > 0)
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for (r, q) in out.terms.iter_mut() {
            if *r < 0 {
                *q = -q.clone();
            }
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Surd::zero();
        for (&r, c) in &self.terms {
            out.add_term(r, c * q);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(&r, q)| (r, q))
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (&r, q) in &self.terms {
            let c = rational_to_f64(q);
            let root = (r.unsigned_abs() as f64).sqrt();
            if r > 0 {
                z.re += c * root;
            } else {
                z.im += c * root;
            }
        }
        z
    }
}

fn mul_radicands(a: i64, b: i64) -> (Rational, i64) {
    let (ua, ub) = (a.unsigned_abs() as u128, b.unsigned_abs() as u128);
    let g = ua.gcd(&ub);
    let t = (ua / g) * (ub / g);
    let coeff = rat(g as i64);
    match (a < 0, b < 0) {
        (true, true) => (-coeff, t as i64),
        (true, false) | (false, true) => (coeff, -(t as i64)),
        (false, false) => (coeff, t as i64),
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (&r, q) in &rhs.terms {
            out.add_term(r, q.clone());
        }
        out
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        &self + &rhs
    }
}

impl AddAssign<&Surd> for Surd {
    fn add_assign(&mut self, rhs: &Surd) {
        for (&r, q) in &rhs.terms {
            self.add_term(r, q.clone());
        }
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        self.scale(&rat(-1))
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        &self - &rhs
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (&a, qa) in &self.terms {
            for (&b, qb) in &rhs.terms {
                let (c, key) = if a == 1 {
                    (rat(1), b)
                } else if b == 1 {
                    (rat(1), a)
                } else {
                    mul_radicands(a, b)
                };
                out.add_term(key, qa * qb * c);
            }
        }
        out
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<(&i64, &Rational)> = self.terms.iter().collect();
        order.sort_by_key(|(&r, _)| (r != 1, r.unsigned_abs(), r < 0));
        for (idx, (&r, q)) in order.into_iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            if r == 1 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt({r})")?;
            } else {
                write!(f, "{mag}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Row-reduced integer basis that accepts vectors one at a time and reports
/// whether each new vector is independent of the ones already accepted.
///
/// Reduction is fraction-free: rows are kept primitive (content 1).
#[derive(Clone, Debug, Default)]
pub struct IncrementalBasis {
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IncrementalBasis {
    pub fn new() -> Self {
        IncrementalBasis::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let a = row[*pivot].clone();
            let b = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x * &a - r * &b;
            }
            make_primitive(&mut v);
        }
        v
    }

    /// Returns true (and keeps the vector) iff `v` is outside the current span.
    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        let v = self.reduce(v);
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                // Clear the new pivot column from existing rows to stay reduced.
                for (_, row) in self.rows.iter_mut() {
                    if row[pivot].is_zero() {
                        continue;
                    }
                    let a = v[pivot].clone();
                    let b = row[pivot].clone();
                    for (x, r) in row.iter_mut().zip(&v) {
                        *x = &*x * &a - r * &b;
                    }
                    make_primitive(row);
                }
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: Vec<BigInt>) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g > BigInt::one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

pub fn integer_rank<I>(vectors: I) -> usize
where
    I: IntoIterator<Item = Vec<BigInt>>,
{
    let mut basis = IncrementalBasis::new();
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Solves the square system `a · x = b` over the rationals; `None` when `a` is singular.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let (pivot_row, target) = if r < col {
                    let (lo, hi) = m.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = m.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (x, p) in target.iter_mut().zip(pivot_row) {
                    *x = &*x - &f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Dense square integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    size: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(size: usize) -> Self {
        IntMatrix { size, data: vec![BigInt::zero(); size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = IntMatrix::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let size = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| BigInt::from(x))).collect();
        IntMatrix { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.size + c]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.size).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn add_assign(&mut self, other: &IntMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.size;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        let n = self.size;
        (0..n)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, x) in self.data[i * n..(i + 1) * n].iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Degree of the minimal polynomial of `m`: the first power that falls into
/// the span of the lower powers, vectorized into `size²` coordinates.
pub fn minimal_polynomial_degree(m: &IntMatrix) -> usize {
    let mut basis = IncrementalBasis::new();
    let mut power = IntMatrix::identity(m.size());
    loop {
        if !basis.insert(power.entries().to_vec()) {
            return basis.rank();
        }
        power = power.mul(m);
    }
}
