//! Character tables through the regular representation of the Bose–Mesner
//! algebra, exact distinct-eigenvalue counts, and spectra of relation unions.
//!
//! `B_i` is the matrix of left multiplication by `A_i` on the basis
//! `A_0, …, A_d`, so `(B_i)[l][j] = p_{i,j}^l`. A row vector `w` with `w_0 = 1`
//! that is a left eigenrow of every `B_i` lists the values of a character of the
//! algebra, i.e. it is a row of `P`.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::{minimal_polynomial_degree, rat, snap_rational, IntMatrix, Rational, Surd};
use crate::numeric::{self, DoubleDouble};
use crate::scheme::{IntersectionTensor, Scheme, SchemeError};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("could not separate the common eigenrows after {attempts} random combinations")]
    EigenSeparationFailure { attempts: usize },
    #[error("multiplicity of row {row} is {value}, not an integer")]
    MultiplicityNotIntegral { row: usize, value: f64 },
    #[error("rows {first} and {second} give eigenvalues {gap:e} apart, too close to cluster reliably")]
    ClusteringAmbiguity { first: usize, second: usize, gap: f64 },
    #[error("relation union must be a nonempty subset of 1..={d}")]
    BadUnion { d: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    F64,
    DoubleDouble,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralOptions {
    pub seed: u64,
    pub precision: Precision,
    pub max_retries: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { seed: DEFAULT_SEED, precision: Precision::F64, max_retries: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionMatrix {
    pub index: usize,
    pub rows: Vec<Vec<i64>>,
}

impl IntersectionMatrix {
    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.rows)
    }
}

pub fn intersection_matrices(t: &IntersectionTensor) -> Result<Vec<IntersectionMatrix>, SpectraError> {
    if let Some((i, j, l)) = t.first_noncommuting() {
        return Err(SchemeError::NonCommutative { i, j, l }.into());
    }
    let dim = t.dim();
    Ok((0..dim)
        .map(|i| IntersectionMatrix {
            index: i,
            rows: (0..dim).map(|l| (0..dim).map(|j| t.get(i, j, l) as i64).collect()).collect(),
        })
        .collect())
}

/// `B_Λ = Σ_{i∈Λ} B_i` as an exact integer matrix.
pub fn union_matrix(s: &Scheme, lambda: &[usize]) -> Result<IntMatrix, SpectraError> {
    check_union(s.d(), lambda)?;
    s.require_commutative()?;
    let t = s.tensor();
    let dim = t.dim();
    let mut rows = vec![vec![0i64; dim]; dim];
    for &i in lambda {
        for (l, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += t.get(i, j, l) as i64;
            }
        }
    }
    Ok(IntMatrix::from_rows(&rows))
}

pub(crate) fn check_union(d: usize, lambda: &[usize]) -> Result<(), SpectraError> {
    if lambda.is_empty() || lambda.iter().any(|&i| i == 0 || i > d) {
        return Err(SpectraError::BadUnion { d });
    }
    Ok(())
}

/// Number of distinct eigenvalues of `A_Λ`: the degree of the minimal
/// polynomial of `B_Λ` over the rationals.
pub fn distinct_eigenvalue_count(s: &Scheme, lambda: &[usize]) -> Result<usize, SpectraError> {
    let mut sorted = lambda.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(minimal_polynomial_degree(&union_matrix(s, &sorted)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    RationalExact,
    QuadraticExact,
    Floating,
}

/// Character table `P` (rows are eigenspaces, columns are relations) with
/// multiplicities.
#[derive(Clone, Debug)]
pub struct EigenTable {
    pub n: usize,
    pub valencies: Vec<u64>,
    pub p: Vec<Vec<Complex64>>,
    pub exact: Vec<Vec<Option<Surd>>>,
    pub multiplicities: Vec<u64>,
    pub raw_multiplicities: Vec<f64>,
    pub eigen_basis: Vec<Vec<Complex64>>,
    pub tolerance: f64,
    pub precision: Precision,
}

impl EigenTable {
    /// Assembles a table from given entries; multiplicities are recomputed.
    pub fn from_entries(
        n: usize,
        valencies: Vec<u64>,
        p: Vec<Vec<Complex64>>,
        exact: Vec<Vec<Option<Surd>>>,
        tolerance: f64,
    ) -> Result<Self, SpectraError> {
        let (multiplicities, raw_multiplicities) = multiplicities(&p, &valencies, n)?;
        Ok(EigenTable {
            n,
            valencies,
            eigen_basis: p.clone(),
            p,
            exact,
            multiplicities,
            raw_multiplicities,
            tolerance,
            precision: Precision::F64,
        })
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    pub fn d(&self) -> usize {
        self.p.len() - 1
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.p[row][col]
    }

    pub fn exactness(&self, row: usize, col: usize) -> Exactness {
        match &self.exact[row][col] {
            Some(s) if s.is_rational() => Exactness::RationalExact,
            Some(_) => Exactness::QuadraticExact,
            None => Exactness::Floating,
        }
    }

    /// Exact entry sum over `cols` in `row`, when every summand is exact.
    pub fn exact_row_sum(&self, row: usize, cols: impl IntoIterator<Item = usize>) -> Option<Surd> {
        let mut acc = Surd::zero();
        for c in cols {
            acc += self.exact[row][c].as_ref()?;
        }
        Some(acc)
    }

    pub fn row_sum(&self, row: usize, cols: impl IntoIterator<Item = usize>) -> Complex64 {
        cols.into_iter().map(|c| self.p[row][c]).sum()
    }

    /// Row sums over all columns; every row but the first should vanish.
    pub fn row_sum_report(&self) -> Vec<RowSum> {
        (0..self.size())
            .map(|j| RowSum {
                row: j,
                exact: self.exact_row_sum(j, 0..self.size()),
                value: self.row_sum(j, 0..self.size()),
            })
            .collect()
    }

    /// Largest deviation of `‖w B_i − p_i w‖` over rows and relations.
    pub fn max_residual(&self, mats: &[IntersectionMatrix]) -> f64 {
        let mut worst = 0.0f64;
        for w in &self.p {
            for (i, b) in mats.iter().enumerate() {
                for c in 0..w.len() {
                    let lhs: Complex64 = (0..w.len()).map(|l| w[l] * b.rows[l][c] as f64).sum();
                    worst = worst.max((lhs - w[i] * w[c]).norm());
                }
            }
        }
        worst
    }
}

#[derive(Clone, Debug)]
pub struct RowSum {
    pub row: usize,
    pub exact: Option<Surd>,
    pub value: Complex64,
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl Serialize for EigenTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let flat: Vec<[f64; 2]> = self.p.iter().flatten().map(|z| [clean(z.re), clean(z.im)]).collect();
        let tags: Vec<Exactness> =
            (0..self.size()).flat_map(|r| (0..self.size()).map(move |c| (r, c))).map(|(r, c)| self.exactness(r, c)).collect();
        let mut st = serializer.serialize_struct("EigenTable", 3)?;
        st.serialize_field("P", &flat)?;
        st.serialize_field("multiplicities", &self.multiplicities)?;
        st.serialize_field("exactness", &tags)?;
        st.end()
    }
}

/// `m_j = n / Σ_i |p_i(j)|² / k_i`, rounded after an integrality check.
pub fn multiplicities(p: &[Vec<Complex64>], valencies: &[u64], n: usize) -> Result<(Vec<u64>, Vec<f64>), SpectraError> {
    let mut rounded = Vec::with_capacity(p.len());
    let mut raw = Vec::with_capacity(p.len());
    for (j, row) in p.iter().enumerate() {
        let denom: f64 = row.iter().zip(valencies).map(|(z, &k)| z.norm_sqr() / k as f64).sum();
        let m = n as f64 / denom;
        let r = m.round();
        if !m.is_finite() || (m - r).abs() > 1e-6 || r < 1.0 {
            return Err(SpectraError::MultiplicityNotIntegral { row: j, value: m });
        }
        rounded.push(r as u64);
        raw.push(m);
    }
    if rounded.iter().sum::<u64>() != n as u64 {
        let (row, value) = raw.iter().copied().enumerate().next_back().unwrap_or((0, 0.0));
        return Err(SpectraError::MultiplicityNotIntegral { row, value });
    }
    Ok((rounded, raw))
}

fn cmp_desc(a: f64, b: f64, tol: f64) -> Ordering {
    if (a - b).abs() <= tol {
        Ordering::Equal
    } else if a > b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Row order below the valency row: by column 1 (real part, then imaginary
/// part) descending, ties broken by the following columns.
pub(crate) fn row_order(a: &[Complex64], b: &[Complex64], tol: f64) -> Ordering {
    for c in 1..a.len() {
        let o = cmp_desc(a[c].re, b[c].re, tol).then(cmp_desc(a[c].im, b[c].im, tol));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Snaps one column of `P` to rational or quadratic surds where possible.
pub fn snap_column(values: &[Complex64], tol: f64) -> Vec<Option<Surd>> {
    values.iter().enumerate().map(|(j, &z)| snap_entry(values, j, z, tol)).collect()
}

fn snap_entry(values: &[Complex64], j: usize, z: Complex64, tol: f64) -> Option<Surd> {
    let close = |s: &Surd| (s.to_complex() - z).norm() <= tol * (1.0 + z.norm());
    if z.im.abs() <= tol {
        if let Some(q) = snap_rational(z.re, 2, tol * (1.0 + z.re.abs())) {
            return Some(Surd::from_rational(q));
        }
        // Real quadratic irrational: its Galois conjugate is another eigenvalue
        // of the same relation, hence sits in the same column.
        for (k, &w) in values.iter().enumerate() {
            if k == j || w.im.abs() > tol {
                continue;
            }
            let scale = 1.0 + z.re.abs() + w.re.abs();
            let (Some(sum), Some(prod)) = (
                snap_rational(z.re + w.re, 2, tol * scale),
                snap_rational(z.re * w.re, 4, tol * scale * scale),
            ) else {
                continue;
            };
            let disc: Rational = &sum * &sum - rat(4) * &prod;
            if disc <= rat(0) {
                continue;
            }
            let Some(root) = Surd::sqrt_of(&(disc / rat(4))) else { continue };
            let half = Surd::from_rational(sum / rat(2));
            for cand in [&half + &root, &half - &root] {
                if !cand.is_rational() && close(&cand) {
                    return Some(cand);
                }
            }
        }
        return None;
    }
    let scale = 1.0 + z.norm();
    let u = snap_rational(2.0 * z.re, 2, tol * scale)?;
    let v = snap_rational(4.0 * z.im * z.im, 2, tol * scale * scale)?;
    let root = Surd::sqrt_of(&(-v / rat(4)))?;
    let root = if z.im < 0.0 { -root } else { root };
    let cand = Surd::from_rational(u / rat(2)) + root;
    close(&cand).then_some(cand)
}

struct Attempt {
    rows: Vec<Vec<Complex64>>,
    precision: Precision,
}

fn attempt_rows(mats: &[Vec<Vec<f64>>], valencies: &[u64], c: &[i64], precision: Precision) -> Option<Attempt> {
    let dim = valencies.len();
    let m: Vec<Vec<f64>> = (0..dim)
        .map(|l| (0..dim).map(|j| (1..dim).map(|i| c[i] as f64 * mats[i][l][j]).sum()).collect())
        .collect();
    let scale = m.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut eig = numeric::eigenvalues(&m);
    if eig.len() != dim {
        return None;
    }
    eig.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)));
    for a in 0..dim {
        for b in a + 1..dim {
            if (eig[a] - eig[b]).norm() < 1e-6 * scale {
                return None;
            }
        }
    }
    let mut rows = Vec::with_capacity(dim);
    for &lam in &eig {
        let w = numeric::left_eigenrow(&m, lam)?;
        let (w, _) = match precision {
            Precision::F64 => numeric::refine_eigenpair::<f64>(&m, &w, lam, 3)?,
            Precision::DoubleDouble => numeric::refine_eigenpair::<DoubleDouble>(&m, &w, lam, 4)?,
        };
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        rows.push(w);
    }
    // Each row must be a common eigenrow of every B_i with eigenvalue w_i.
    let kmax = valencies.iter().copied().max().unwrap_or(1) as f64;
    for w in &rows {
        for (i, b) in mats.iter().enumerate() {
            for col in 0..dim {
                let lhs: Complex64 = (0..dim).map(|l| w[l] * b[l][col]).sum();
                if (lhs - w[i] * w[col]).norm() > 1e-8 * kmax * kmax {
                    return None;
                }
            }
        }
    }
    Some(Attempt { rows, precision })
}

/// Computes `P` by diagonalizing a random integer combination of the `B_i`.
pub fn character_table(s: &Scheme, opts: &SpectralOptions) -> Result<EigenTable, SpectraError> {
    s.require_commutative()?;
    let mats: Vec<Vec<Vec<f64>>> = intersection_matrices(s.tensor())?
        .iter()
        .map(|b| b.rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect())
        .collect();
    let valencies = s.valencies().to_vec();
    let dim = valencies.len();
    let n = s.n();
    let kmax = valencies.iter().copied().max().unwrap_or(1) as f64;
    if dim == 1 {
        return EigenTable::from_entries(n, valencies, vec![vec![Complex64::new(1.0, 0.0)]], vec![vec![Some(Surd::from_int(1))]], SNAP_TOLERANCE);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let attempts = opts.max_retries.max(1);
    let mut found = None;
    for attempt in 0..attempts {
        let mut c = vec![0i64; dim];
        while c[1..].iter().all(|&v| v == 0) {
            for v in c.iter_mut().skip(1) {
                *v = rng.gen_range(-10..=10);
            }
        }
        let precision = if attempt == 0 { opts.precision } else { Precision::DoubleDouble };
        if let Some(a) = attempt_rows(&mats, &valencies, &c, precision) {
            found = Some(a);
            break;
        }
    }
    let Attempt { rows, precision } = found.ok_or(SpectraError::EigenSeparationFailure { attempts })?;
    let tolerance = match precision {
        Precision::F64 => SNAP_TOLERANCE * kmax,
        Precision::DoubleDouble => 1e-12 * kmax,
    };

    let trivial = rows
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let da: f64 = a.iter().zip(&valencies).map(|(z, &k)| (z - k as f64).norm()).sum();
            let db: f64 = b.iter().zip(&valencies).map(|(z, &k)| (z - k as f64).norm()).sum();
            da.partial_cmp(&db).unwrap_or(Ordering::Equal)
        })
        .map(|(j, _)| j)
        .unwrap_or(0);
    let mut rest: Vec<Vec<Complex64>> =
        rows.iter().enumerate().filter(|&(j, _)| j != trivial).map(|(_, r)| r.clone()).collect();
    rest.sort_by(|a, b| row_order(a, b, tolerance));
    let mut basis = vec![valencies.iter().map(|&k| Complex64::new(k as f64, 0.0)).collect::<Vec<_>>()];
    basis.extend(rest);

    let mut exact = vec![vec![None; dim]; dim];
    for col in 0..dim {
        let column: Vec<Complex64> = basis.iter().map(|r| r[col]).collect();
        for (j, e) in snap_column(&column, SNAP_TOLERANCE).into_iter().enumerate() {
            exact[j][col] = e;
        }
    }
    let p: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|c| exact[j][c].as_ref().map_or(basis[j][c], Surd::to_complex)).collect())
        .collect();
    let (multiplicities, raw_multiplicities) = multiplicities(&p, &valencies, n)?;
    Ok(EigenTable { n, valencies, p, exact, multiplicities, raw_multiplicities, eigen_basis: basis, tolerance, precision })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Closeness {
    Same,
    Distinct,
    /// Numerically distinct but within ten times the tolerance.
    Ambiguous(f64),
}

/// Compares two table values: exactly when both are exact, otherwise against
/// `tol` with an ambiguity band up to `10·tol`.
pub fn closeness(a: &Complex64, ea: Option<&Surd>, b: &Complex64, eb: Option<&Surd>, tol: f64) -> Closeness {
    if let (Some(x), Some(y)) = (ea, eb) {
        return if x == y { Closeness::Same } else { Closeness::Distinct };
    }
    let gap = (a - b).norm();
    if gap <= tol {
        Closeness::Same
    } else if gap < 10.0 * tol {
        Closeness::Ambiguous(gap)
    } else {
        Closeness::Distinct
    }
}

/// One eigenvalue of `A_Λ` with the rows of `P` it collects.
#[derive(Clone, Debug, Serialize)]
pub struct UnionEigenvalue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub exact: Option<Surd>,
    pub multiplicity: u64,
    pub rows: Vec<usize>,
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [clean(z.re), clean(z.im)].serialize(s)
}

/// Eigenvalues `Σ_{i∈Λ} p_i(j)` of `A_Λ` merged across rows, in first-row order.
pub fn union_spectrum(e: &EigenTable, lambda: &[usize]) -> Result<Vec<UnionEigenvalue>, SpectraError> {
    check_union(e.d(), lambda)?;
    let mut cols = lambda.to_vec();
    cols.sort_unstable();
    cols.dedup();
    let sums: Vec<(Complex64, Option<Surd>)> =
        (0..e.size()).map(|j| (e.row_sum(j, cols.iter().copied()), e.exact_row_sum(j, cols.iter().copied()))).collect();
    let tol = e.tolerance;
    let mut out: Vec<UnionEigenvalue> = Vec::new();
    let mut owner = vec![usize::MAX; sums.len()];
    for j in 0..sums.len() {
        for k in 0..j {
            let same = match closeness(&sums[j].0, sums[j].1.as_ref(), &sums[k].0, sums[k].1.as_ref(), tol) {
                Closeness::Same => true,
                Closeness::Distinct => false,
                Closeness::Ambiguous(gap) => return Err(SpectraError::ClusteringAmbiguity { first: k, second: j, gap }),
            };
            if same {
                owner[j] = owner[k];
                break;
            }
        }
        if owner[j] == usize::MAX {
            owner[j] = out.len();
            out.push(UnionEigenvalue { value: sums[j].0, exact: sums[j].1.clone(), multiplicity: 0, rows: Vec::new() });
        }
        let slot = &mut out[owner[j]];
        slot.multiplicity += e.multiplicities[j];
        slot.rows.push(j);
    }
    Ok(out)
}

/// Union spectrum that recomputes the table in extended precision when the
/// double-precision clustering is ambiguous.
pub fn union_spectrum_escalating(
    s: &Scheme,
    e: &EigenTable,
    lambda: &[usize],
    opts: &SpectralOptions,
) -> Result<Vec<UnionEigenvalue>, SpectraError> {
    match union_spectrum(e, lambda) {
        Err(SpectraError::ClusteringAmbiguity { .. }) if e.precision == Precision::F64 => {
            let hi = character_table(s, &SpectralOptions { precision: Precision::DoubleDouble, ..*opts })?;
            union_spectrum(&hi, lambda)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{verify_axioms, ColorMatrix};

    fn circulant(n: usize, d: usize, f: impl Fn(usize) -> usize) -> Scheme {
        verify_axioms(&ColorMatrix::from_fn(n, d, |x, y| f((y + n - x) % n)).unwrap()).unwrap()
    }

    fn pentagon() -> Scheme {
        circulant(5, 2, |k| [0, 1, 2, 2, 1][k])
    }

    fn qr7() -> Scheme {
        circulant(7, 2, |k| [0, 1, 1, 2, 1, 2, 2][k])
    }

    fn approx(a: Complex64, re: f64, im: f64) -> bool {
        (a - Complex64::new(re, im)).norm() < 1e-10
    }

    #[test]
    fn complete_graph_matrices_and_table() {
        let k6 = circulant(6, 1, |k| usize::from(k != 0));
        let b = intersection_matrices(k6.tensor()).unwrap();
        assert_eq!(b[0].rows, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(b[1].rows, vec![vec![0, 5], vec![1, 4]]);
        let e = character_table(&k6, &SpectralOptions::default()).unwrap();
        assert!(approx(e.p[1][1], -1.0, 0.0));
        assert_eq!(e.multiplicities, vec![1, 5]);
        assert_eq!(e.exactness(1, 1), Exactness::RationalExact);
    }

    #[test]
    fn pentagon_matrix_and_counts() {
        let s = pentagon();
        let b = intersection_matrices(s.tensor()).unwrap();
        assert_eq!(b[1].rows, vec![vec![0, 2, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(distinct_eigenvalue_count(&s, &[1]).unwrap(), 3);
        assert_eq!(distinct_eigenvalue_count(&s, &[1, 2]).unwrap(), 2);
        let e = character_table(&s, &SpectralOptions::default()).unwrap();
        assert_eq!(e.multiplicities, vec![1, 2, 2]);
        assert_eq!(e.exact[1][1].as_ref().unwrap().to_string(), "-1/2+1/2*sqrt(5)");
        assert_eq!(e.exactness(1, 2), Exactness::QuadraticExact);
    }

    #[test]
    fn tournament_table_rows_are_ordered() {
        let e = character_table(&qr7(), &SpectralOptions::default()).unwrap();
        let h = 7f64.sqrt() / 2.0;
        assert!(approx(e.p[0][1], 3.0, 0.0));
        assert!(approx(e.p[1][1], -0.5, h) && approx(e.p[1][2], -0.5, -h));
        assert!(approx(e.p[2][1], -0.5, -h) && approx(e.p[2][2], -0.5, h));
        assert_eq!(e.multiplicities, vec![1, 3, 3]);
        assert_eq!(e.exact[1][1].as_ref().unwrap().to_string(), "-1/2+1/2*sqrt(-7)");
        for r in e.row_sum_report().iter().skip(1) {
            assert!(r.exact.as_ref().unwrap().is_zero());
        }
    }

    #[test]
    fn extended_precision_agrees() {
        let s = qr7();
        let lo = character_table(&s, &SpectralOptions::default()).unwrap();
        let hi = character_table(&s, &SpectralOptions { precision: Precision::DoubleDouble, ..Default::default() }).unwrap();
        assert_eq!(hi.precision, Precision::DoubleDouble);
        for (a, b) in lo.p.iter().flatten().zip(hi.p.iter().flatten()) {
            assert!((a - b).norm() < 1e-12);
        }
        let b = intersection_matrices(s.tensor()).unwrap();
        assert!(hi.max_residual(&b) < 1e-12);
    }

    #[test]
    fn union_spectrum_clusters() {
        let s = pentagon();
        let e = character_table(&s, &SpectralOptions::default()).unwrap();
        let all = union_spectrum(&e, &[1, 2]).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].multiplicity, 1);
        assert_eq!(all[1].multiplicity, 4);
        assert_eq!(all[1].exact, Some(Surd::from_int(-1)));
        assert!(matches!(union_spectrum(&e, &[]), Err(SpectraError::BadUnion { .. })));
        assert!(matches!(union_spectrum(&e, &[3]), Err(SpectraError::BadUnion { .. })));
    }

    #[test]
    fn json_layout() {
        let e = character_table(&circulant(3, 1, |k| usize::from(k != 0)), &SpectralOptions::default()).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["P"].as_array().unwrap().len(), 4);
        assert_eq!(v["P"][3], serde_json::json!([-1.0, 0.0]));
        assert_eq!(v["multiplicities"], serde_json::json!([1, 2]));
        assert_eq!(v["exactness"][0], "rational-exact");
    }

    #[test]
    fn one_point_scheme() {
        let s = verify_axioms(&ColorMatrix::from_fn(1, 0, |_, _| 0).unwrap()).unwrap();
        let e = character_table(&s, &SpectralOptions::default()).unwrap();
        assert_eq!(e.multiplicities, vec![1]);
    }
}
