//! Floating-point machinery for the character table: a double-double type for
//! the extended working precision, complex Gaussian elimination, and
//! left-eigenrow extraction with Newton refinement.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};

/// Unevaluated sum `hi + lo` of two doubles (about 106 bits of mantissa).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::new(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        let q = (self / o).to_f64().trunc();
        self - o * DoubleDouble::new(q)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::new(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::new)
    }
}

/// Real scalar usable as the working precision.
pub trait Working: Num + Copy + PartialOrd + Neg<Output = Self> + Send + Sync {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Working for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Working for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
}

fn to_c64<T: Working>(z: Complex<T>) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

fn from_c64<T: Working>(z: Complex64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_complex<T: Working>(mut a: Vec<Vec<Complex<T>>>, mut b: Vec<Complex<T>>) -> Option<Vec<Complex<T>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            a[r][col].norm_sqr().partial_cmp(&a[s][col].norm_sqr()).unwrap_or(Ordering::Equal)
        })?;
        if a[pivot][col].norm_sqr().is_zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] = a[r][c] - f * v;
            }
            let v = b[col];
            b[r] = b[r] - f * v;
        }
    }
    let mut x = vec![Complex::<T>::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc = acc - a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// Eigenvalues of a real square matrix (Schur form, double precision).
pub fn eigenvalues(m: &[Vec<f64>]) -> Vec<Complex64> {
    let n = m.len();
    let flat: Vec<f64> = m.iter().flatten().copied().collect();
    let mat = DMatrix::from_row_slice(n, n, &flat);
    mat.complex_eigenvalues().iter().copied().collect()
}

/// Left eigenrow `w` of `m` for the eigenvalue near `lambda`, normalized so
/// `w[0] = 1`, found by inverse iteration in double precision.
pub fn left_eigenrow(m: &[Vec<f64>], lambda: Complex64) -> Option<Vec<Complex64>> {
    let n = m.len();
    let scale = m.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let shift = lambda + Complex64::new(scale * 1e-11, scale * 1e-11);
    // (M - μI)^T x = v
    let system: Vec<Vec<Complex64>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|l| {
                    let v = Complex64::new(m[l][c], 0.0);
                    if l == c {
                        v - shift
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3)).collect();
    for _ in 0..3 {
        x = solve_complex(system.clone(), x)?;
        let norm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        x.iter_mut().for_each(|z| *z /= norm);
    }
    if x[0].norm() < 1e-12 {
        return None;
    }
    let lead = x[0];
    Some(x.into_iter().map(|z| z / lead).collect())
}

/// Newton refinement of the pair `(w, λ)` solving `w M = λ w`, `w[0] = 1`,
/// carried out in the working precision `T`.
pub fn refine_eigenpair<T: Working>(
    m: &[Vec<f64>],
    w: &[Complex64],
    lambda: Complex64,
    iterations: usize,
) -> Option<(Vec<Complex64>, Complex64)> {
    let n = m.len();
    let mt: Vec<Vec<Complex<T>>> =
        m.iter().map(|row| row.iter().map(|&v| Complex::new(T::from_f64(v), T::zero())).collect()).collect();
    let mut w: Vec<Complex<T>> = w.iter().map(|&z| from_c64(z)).collect();
    let mut lam: Complex<T> = from_c64(lambda);
    for _ in 0..iterations {
        // F_c = Σ_l w_l M[l][c] - λ w_c
        let f: Vec<Complex<T>> = (0..n)
            .map(|c| {
                let mut acc = Complex::<T>::zero();
                for l in 0..n {
                    acc = acc + w[l] * mt[l][c];
                }
                acc - lam * w[c]
            })
            .collect();
        // Unknowns: w_1..w_{n-1}, λ.
        let jac: Vec<Vec<Complex<T>>> = (0..n)
            .map(|c| {
                let mut row: Vec<Complex<T>> = (1..n)
                    .map(|k| if k == c { mt[k][c] - lam } else { mt[k][c] })
                    .collect();
                row.push(-w[c]);
                row
            })
            .collect();
        let rhs: Vec<Complex<T>> = f.iter().map(|&z| -z).collect();
        let delta = solve_complex(jac, rhs)?;
        for k in 1..n {
            w[k] = w[k] + delta[k - 1];
        }
        lam = lam + delta[n - 1];
    }
    Some((w.into_iter().map(to_c64).collect(), to_c64(lam)))
}
