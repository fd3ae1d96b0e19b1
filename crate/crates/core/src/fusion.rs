//! Admissible partitions, fusion tests (direct and spectral), amorphicity,
//! the amorphic normal form, and matching idempotents with the symmetrization.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::Surd;
use crate::scheme::{symmetrize, verify_axioms, Scheme, SchemeError};
use crate::spectra::{character_table, closeness, row_order, Closeness, EigenTable, SpectraError, SpectralOptions};

pub const MAX_ENUMERATION_CLASSES: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("{d} classes exceeds the enumeration limit of {max}")]
    TooManyClasses { d: usize, max: usize },
    #[error("partition is not admissible: {reason}")]
    NotAdmissible { reason: String },
    #[error("fusion is not a scheme: {0}")]
    NotAScheme(SchemeError),
    #[error("rows {first} and {second} have block sums {gap:e} apart, too close to decide")]
    ToleranceAmbiguity { first: usize, second: usize, gap: f64 },
    #[error("character table cannot be brought to the amorphic normal form")]
    NormalFormUnreachable,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("idempotent matching is ambiguous: {0}")]
    MatchingAmbiguous(String),
}

/// Blocks `Λ_0 = {0}, Λ_1, …, Λ_e` closed under transposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmissiblePartition {
    blocks: Vec<Vec<usize>>,
    transpose_closure: Vec<usize>,
}

impl Serialize for AdmissiblePartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl AdmissiblePartition {
    /// Validates `blocks` (with or without the leading `{0}`) against `s`.
    pub fn new(s: &Scheme, blocks: Vec<Vec<usize>>) -> Result<Self, FusionError> {
        let d = s.d();
        let bad = |reason: &str| FusionError::NotAdmissible { reason: reason.to_string() };
        let mut blocks: Vec<Vec<usize>> = blocks.into_iter().filter(|b| b != &[0]).collect();
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(bad("empty block"));
        }
        blocks.sort();
        let mut seen = vec![false; d + 1];
        for &i in blocks.iter().flatten() {
            if i == 0 || i > d {
                return Err(bad("index outside 1..=d"));
            }
            if seen[i] {
                return Err(bad("index repeated"));
            }
            seen[i] = true;
        }
        if seen.iter().skip(1).any(|&x| !x) {
            return Err(bad("blocks do not cover every class"));
        }
        blocks.insert(0, vec![0]);
        let mut closure = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let mut t: Vec<usize> = b.iter().map(|&i| s.transpose_of(i)).collect();
            t.sort_unstable();
            match blocks.iter().position(|c| *c == t) {
                Some(p) => closure.push(p),
                None => return Err(bad("transposed block is not a block")),
            }
        }
        Ok(AdmissiblePartition { blocks, transpose_closure: closure })
    }

    /// The partition merging each class with its transpose.
    pub fn symmetrization(s: &Scheme) -> Self {
        let blocks = (1..=s.d())
            .filter(|&i| s.transpose_of(i) >= i)
            .map(|i| if s.transpose_of(i) == i { vec![i] } else { vec![i, s.transpose_of(i)] })
            .collect();
        AdmissiblePartition::new(s, blocks).expect("transpose pairs form an admissible partition")
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn transpose_closure(&self) -> &[usize] {
        &self.transpose_closure
    }

    /// Number of non-diagonal blocks.
    pub fn e(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Old class index to block index.
    pub fn color_map(&self) -> Vec<usize> {
        let d = self.blocks.iter().flatten().count() - 1;
        let mut map = vec![0; d + 1];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                map[i] = b;
            }
        }
        map
    }
}

fn set_partitions(d: usize) -> Vec<Vec<Vec<usize>>> {
    // Restricted growth strings over 1..=d.
    let mut out = Vec::new();
    let mut rgs = vec![0usize; d];
    fn rec(pos: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if pos == rgs.len() {
            let mut blocks = vec![Vec::new(); max + 1];
            for (i, &b) in rgs.iter().enumerate() {
                blocks[b].push(i + 1);
            }
            out.push(blocks);
            return;
        }
        let limit = if pos == 0 { 0 } else { max + 1 };
        for b in 0..=limit {
            rgs[pos] = b;
            rec(pos + 1, max.max(b), rgs, out);
        }
    }
    if d == 0 {
        return vec![Vec::new()];
    }
    rec(0, 0, &mut rgs, &mut out);
    out
}

/// All admissible partitions, blocks ordered by smallest element and the list
/// in lexicographic order of block lists.
pub fn enumerate_admissible_partitions(s: &Scheme) -> Result<Vec<AdmissiblePartition>, FusionError> {
    let d = s.d();
    if d > MAX_ENUMERATION_CLASSES {
        return Err(FusionError::TooManyClasses { d, max: MAX_ENUMERATION_CLASSES });
    }
    let mut out: Vec<AdmissiblePartition> =
        set_partitions(d).into_iter().filter_map(|blocks| AdmissiblePartition::new(s, blocks).ok()).collect();
    out.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(out)
}

/// Merges classes along `pi` and re-verifies the axioms.
pub fn fuse_direct(s: &Scheme, pi: &AdmissiblePartition) -> Result<Scheme, FusionError> {
    let fused = s.color().recolor(&pi.color_map(), pi.e())?;
    verify_axioms(&fused).map_err(FusionError::NotAScheme)
}

#[derive(Clone, Debug, Serialize)]
pub struct FusionWitness {
    pub block: usize,
    pub rows: (usize, usize),
    pub sums: ([f64; 2], [f64; 2]),
    pub distinct_signatures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FusionVerdict {
    pub partition: AdmissiblePartition,
    pub is_scheme: bool,
    pub dual: Option<Vec<Vec<usize>>>,
    #[serde(skip)]
    pub fused_table: Option<EigenTable>,
    pub witness: Option<FusionWitness>,
}

type Signature = Vec<(Complex64, Option<Surd>)>;

fn signature(e: &EigenTable, row: usize, pi: &AdmissiblePartition) -> Signature {
    pi.blocks
        .iter()
        .map(|b| (e.row_sum(row, b.iter().copied()), e.exact_row_sum(row, b.iter().copied())))
        .collect()
}

fn compare_signatures(a: &Signature, b: &Signature, tol: f64) -> Closeness {
    let mut result = Closeness::Same;
    for ((x, ex), (y, ey)) in a.iter().zip(b) {
        match closeness(x, ex.as_ref(), y, ey.as_ref(), tol) {
            Closeness::Distinct => return Closeness::Distinct,
            Closeness::Ambiguous(g) => result = Closeness::Ambiguous(g),
            Closeness::Same => {}
        }
    }
    result
}

/// Spectral fusion test: rows of `P` are grouped by their block-sum
/// signatures; the fusion is a scheme iff there are exactly `e + 1` groups and
/// the trivial row stands alone.
pub fn bannai_muzychuk_check(e: &EigenTable, pi: &AdmissiblePartition) -> Result<FusionVerdict, FusionError> {
    let sigs: Vec<Signature> = (0..e.size()).map(|j| signature(e, j, pi)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in 0..sigs.len() {
        let mut home = None;
        for (g, members) in groups.iter().enumerate() {
            match compare_signatures(&sigs[j], &sigs[members[0]], e.tolerance) {
                Closeness::Same => {
                    home = Some(g);
                    break;
                }
                Closeness::Ambiguous(gap) => {
                    return Err(FusionError::ToleranceAmbiguity { first: members[0], second: j, gap })
                }
                Closeness::Distinct => {}
            }
        }
        match home {
            Some(g) => groups[g].push(j),
            None => groups.push(vec![j]),
        }
    }
    let is_scheme = groups.len() == pi.blocks.len() && groups[0] == [0];
    if !is_scheme {
        let witness = if groups.len() > pi.blocks.len() {
            let (a, b) = (groups[pi.blocks.len() - 1][0], groups[pi.blocks.len()][0]);
            let block = (0..pi.blocks.len())
                .find(|&k| compare_signatures(&vec![sigs[a][k].clone()], &vec![sigs[b][k].clone()], e.tolerance) != Closeness::Same)
                .unwrap_or(0);
            let z = |v: Complex64| [v.re, v.im];
            Some(FusionWitness {
                block,
                rows: (a, b),
                sums: (z(sigs[a][block].0), z(sigs[b][block].0)),
                distinct_signatures: groups.len(),
            })
        } else {
            let a = groups[0][0];
            let b = groups[0].get(1).copied().unwrap_or(a);
            Some(FusionWitness { block: 0, rows: (a, b), sums: ([1.0, 0.0], [1.0, 0.0]), distinct_signatures: groups.len() })
        };
        return Ok(FusionVerdict { partition: pi.clone(), is_scheme, dual: None, fused_table: None, witness });
    }

    let valencies: Vec<u64> = pi.blocks.iter().map(|b| b.iter().map(|&i| e.valencies[i]).sum()).collect();
    let mut order: Vec<usize> = (1..groups.len()).collect();
    let first_rows: Vec<Vec<Complex64>> = groups.iter().map(|g| sigs[g[0]].iter().map(|v| v.0).collect()).collect();
    order.sort_by(|&a, &b| row_order(&first_rows[a], &first_rows[b], e.tolerance));
    order.insert(0, 0);
    let dual: Vec<Vec<usize>> = order.iter().map(|&g| groups[g].clone()).collect();
    let p: Vec<Vec<Complex64>> = order.iter().map(|&g| first_rows[g].clone()).collect();
    let exact: Vec<Vec<Option<Surd>>> = order.iter().map(|&g| sigs[groups[g][0]].iter().map(|v| v.1.clone()).collect()).collect();
    let mut fused = EigenTable::from_entries(e.n, valencies, p, exact, e.tolerance)?;
    fused.precision = e.precision;
    let summed: Vec<u64> = dual.iter().map(|g| g.iter().map(|&j| e.multiplicities[j]).sum()).collect();
    debug_assert_eq!(summed, fused.multiplicities);
    fused.multiplicities = summed;
    Ok(FusionVerdict { partition: pi.clone(), is_scheme, dual: Some(dual), fused_table: Some(fused), witness: None })
}

#[derive(Clone, Debug, Serialize)]
pub struct AmorphicVerdict {
    pub amorphic: bool,
    pub partitions_checked: usize,
    pub failing_partition: Option<AdmissiblePartition>,
}

/// Amorphic iff every admissible partition fuses to a scheme (exact check).
pub fn is_amorphic(s: &Scheme) -> Result<AmorphicVerdict, FusionError> {
    let parts = enumerate_admissible_partitions(s)?;
    let mut checked = 0;
    for pi in parts {
        checked += 1;
        if fuse_direct(s, &pi).is_err() {
            return Ok(AmorphicVerdict { amorphic: false, partitions_checked: checked, failing_partition: Some(pi) });
        }
    }
    Ok(AmorphicVerdict { amorphic: true, partitions_checked: checked, failing_partition: None })
}

/// Character table arranged so that column `i` deviates from its common value
/// `a_i` only on row `i`, where it equals `b_i`.
#[derive(Clone, Debug, Serialize)]
pub struct NormalForm {
    /// `row_perm[r]` is the original row placed at position `r`.
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    #[serde(skip)]
    pub table: Vec<Vec<Complex64>>,
    #[serde(skip)]
    pub exact: Vec<Vec<Option<Surd>>>,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub a_exact: Vec<Option<Surd>>,
    pub b_exact: Vec<Option<Surd>>,
}

impl NormalForm {
    pub fn a_value(&self, i: usize) -> Complex64 {
        Complex64::new(self.a[i - 1][0], self.a[i - 1][1])
    }

    pub fn b_value(&self, i: usize) -> Complex64 {
        Complex64::new(self.b[i - 1][0], self.b[i - 1][1])
    }
}

fn same_entry(e: &EigenTable, r1: usize, r2: usize, c: usize) -> bool {
    closeness(&e.p[r1][c], e.exact[r1][c].as_ref(), &e.p[r2][c], e.exact[r2][c].as_ref(), e.tolerance) == Closeness::Same
}

/// Row `deviant[i]` is the one placed at position `i`; checks the shape.
fn fits_shape(e: &EigenTable, deviant: &[usize]) -> bool {
    let d = e.d();
    for i in 1..=d {
        let bi = deviant[i];
        let others: Vec<usize> = (1..=d).filter(|&r| r != i).map(|r| deviant[r]).collect();
        if let Some(&first) = others.first() {
            if others.iter().any(|&r| !same_entry(e, r, first, i)) || same_entry(e, bi, first, i) {
                return false;
            }
        }
    }
    true
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Finds the row order bringing an amorphic table to its normal form. Columns
/// keep their order; brute force over row orders for `d ≤ 5`, deviating-entry
/// detection beyond.
pub fn amorphic_normal_form(e: &EigenTable) -> Result<NormalForm, FusionError> {
    let d = e.d();
    if d == 0 {
        return Err(FusionError::NormalFormUnreachable);
    }
    let mut perm: Vec<usize> = (0..=d).collect();
    let found = if d <= 5 {
        let mut rows: Vec<usize> = (1..=d).collect();
        let mut hit = None;
        loop {
            perm[1..].copy_from_slice(&rows);
            if fits_shape(e, &perm) {
                hit = Some(perm.clone());
                break;
            }
            if !next_permutation(&mut rows) {
                break;
            }
        }
        hit
    } else {
        let mut assigned = vec![0usize; d + 1];
        let mut ok = true;
        for i in 1..=d {
            // The deviating row is the one whose entry disagrees with most others.
            let dev: Vec<usize> =
                (1..=d).filter(|&r| (1..=d).filter(|&q| q != r && !same_entry(e, r, q, i)).count() == d - 1).collect();
            if dev.len() == 1 {
                assigned[i] = dev[0];
            } else {
                ok = false;
                break;
            }
        }
        let mut sorted = assigned[1..].to_vec();
        sorted.sort_unstable();
        if ok && sorted == (1..=d).collect::<Vec<_>>() && fits_shape(e, &assigned) {
            Some(assigned)
        } else {
            None
        }
    };
    let row_perm = found.ok_or(FusionError::NormalFormUnreachable)?;
    let table: Vec<Vec<Complex64>> = row_perm.iter().map(|&r| e.p[r].clone()).collect();
    let exact: Vec<Vec<Option<Surd>>> = row_perm.iter().map(|&r| e.exact[r].clone()).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut a_exact = Vec::new();
    let mut b_exact = Vec::new();
    for i in 1..=d {
        let other = if i == 1 { 2.min(d) } else { 1 };
        let (av, ae) = if other == i { (Complex64::new(f64::NAN, 0.0), None) } else { (table[other][i], exact[other][i].clone()) };
        a.push([av.re, av.im]);
        a_exact.push(ae);
        b.push([table[i][i].re, table[i][i].im]);
        b_exact.push(exact[i][i].clone());
    }
    Ok(NormalForm { row_perm, col_perm: (0..=d).collect(), table, exact, a, b, a_exact, b_exact })
}

/// Largest `|a_i + b_j − a_j − b_i|` over `i < j`, and whether every
/// difference vanishes exactly when all values are exact.
pub fn cross_sum_deviation(nf: &NormalForm) -> (f64, Option<bool>) {
    let d = nf.a.len();
    let mut worst = 0.0f64;
    let mut exact_ok = Some(true);
    for i in 1..=d {
        for j in i + 1..=d {
            let v = nf.a_value(i) + nf.b_value(j) - nf.a_value(j) - nf.b_value(i);
            worst = worst.max(v.norm());
            let ex = (|| {
                let s = nf.a_exact[i - 1].as_ref()? + nf.b_exact[j - 1].as_ref()?;
                let t = nf.a_exact[j - 1].as_ref()? + nf.b_exact[i - 1].as_ref()?;
                Some(s == t)
            })();
            exact_ok = match (exact_ok, ex) {
                (Some(acc), Some(v)) => Some(acc && v),
                _ => None,
            };
        }
    }
    (worst, exact_ok)
}

/// Correspondence between the rows of the symmetrization's table and the rows
/// of the table of a scheme with exactly one transpose pair.
#[derive(Clone, Debug, Serialize)]
pub struct IdempotentMatching {
    #[serde(skip)]
    pub table: EigenTable,
    #[serde(skip)]
    pub sym_table: EigenTable,
    #[serde(skip)]
    pub symmetrization: Scheme,
    /// Old class index to symmetrization class index.
    pub class_map: Vec<usize>,
    /// `groups[j]` lists the rows of the table that fuse into row `j` of the
    /// symmetrization's table.
    pub groups: Vec<Vec<usize>>,
    pub split_row: usize,
    pub split_pair: (usize, usize),
    pub pair: (usize, usize),
    pub conjugate: bool,
}

impl IdempotentMatching {
    /// Whether row `j` of the symmetrization's table stays primitive.
    pub fn is_primitive(&self, j: usize) -> bool {
        self.groups[j].len() == 1
    }
}

pub fn idempotent_matching(x: &Scheme, opts: &SpectralOptions) -> Result<IdempotentMatching, FusionError> {
    let pairs = x.nonsymmetric_pairs();
    if pairs.len() != 1 {
        return Err(FusionError::Precondition(format!("expected exactly one transpose pair, found {}", pairs.len())));
    }
    let pair = pairs[0];
    let (sym, class_map) = symmetrize(x)?;
    let table = character_table(x, opts)?;
    let sym_table = character_table(&sym, opts)?;
    let pi = AdmissiblePartition::symmetrization(x);
    let verdict = bannai_muzychuk_check(&table, &pi)?;
    let (Some(dual), Some(fused)) = (verdict.dual, verdict.fused_table) else {
        return Err(FusionError::MatchingAmbiguous("symmetrization did not pass the spectral fusion test".into()));
    };
    let tol = table.tolerance.max(sym_table.tolerance);
    let mut groups = vec![Vec::new(); sym_table.size()];
    for (g, rows) in dual.iter().enumerate() {
        let hits: Vec<usize> = (0..sym_table.size())
            .filter(|&j| {
                (0..sym_table.size()).all(|c| {
                    closeness(&fused.p[g][c], fused.exact[g][c].as_ref(), &sym_table.p[j][c], sym_table.exact[j][c].as_ref(), tol)
                        == Closeness::Same
                })
            })
            .collect();
        if hits.len() != 1 {
            return Err(FusionError::MatchingAmbiguous(format!("fused row {g} matches {} rows", hits.len())));
        }
        if !groups[hits[0]].is_empty() {
            return Err(FusionError::MatchingAmbiguous(format!("row {} matched twice", hits[0])));
        }
        groups[hits[0]] = rows.clone();
    }
    let split: Vec<usize> = (0..groups.len()).filter(|&j| groups[j].len() == 2).collect();
    if split.len() != 1 || groups.iter().any(|g| g.is_empty() || g.len() > 2) {
        return Err(FusionError::MatchingAmbiguous("expected exactly one row to split in two".into()));
    }
    let split_row = split[0];
    let (r1, r2) = (groups[split_row][0], groups[split_row][1]);
    let conjugate = (0..table.size()).all(|c| (table.p[r1][c] - table.p[r2][c].conj()).norm() <= tol);
    Ok(IdempotentMatching {
        table,
        sym_table,
        symmetrization: sym,
        class_map,
        groups,
        split_row,
        split_pair: (r1, r2),
        pair,
        conjugate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::ColorMatrix;

    fn circulant(n: usize, d: usize, f: impl Fn(usize) -> usize) -> Scheme {
        verify_axioms(&ColorMatrix::from_fn(n, d, |x, y| f((y + n - x) % n)).unwrap()).unwrap()
    }

    #[test]
    fn partitions_of_small_schemes() {
        let c5 = circulant(5, 2, |k| [0, 1, 2, 2, 1][k]);
        let parts = enumerate_admissible_partitions(&c5).unwrap();
        let blocks: Vec<_> = parts.iter().map(|p| p.blocks().to_vec()).collect();
        assert_eq!(blocks, vec![vec![vec![0], vec![1], vec![2]], vec![vec![0], vec![1, 2]]]);
        let qr7 = circulant(7, 2, |k| [0, 1, 1, 2, 1, 2, 2][k]);
        let parts = enumerate_admissible_partitions(&qr7).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].transpose_closure(), &[0, 2, 1]);
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (d, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(d).len(), b);
        }
    }

    #[test]
    fn fusion_verdicts_agree_on_thin_cyclic_scheme() {
        // Z_6 thin scheme: class of (x, y) is y − x.
        let z6 = circulant(6, 5, |k| k);
        let e = character_table(&z6, &SpectralOptions::default()).unwrap();
        let mut agree = 0;
        for pi in enumerate_admissible_partitions(&z6).unwrap() {
            let direct = fuse_direct(&z6, &pi).is_ok();
            let spectral = bannai_muzychuk_check(&e, &pi).unwrap();
            assert_eq!(direct, spectral.is_scheme, "{:?}", pi.blocks());
            agree += 1;
        }
        assert!(agree > 10);
    }

    #[test]
    fn total_partition_gives_complete_graph() {
        let c5 = circulant(5, 2, |k| [0, 1, 2, 2, 1][k]);
        let total = AdmissiblePartition::new(&c5, vec![vec![1, 2]]).unwrap();
        let k5 = fuse_direct(&c5, &total).unwrap();
        assert_eq!(k5.d(), 1);
        let e = character_table(&c5, &SpectralOptions::default()).unwrap();
        let v = bannai_muzychuk_check(&e, &total).unwrap();
        assert_eq!(v.dual.unwrap(), vec![vec![0], vec![1, 2]]);
        let f = v.fused_table.unwrap();
        assert_eq!(f.exact[1][1], Some(Surd::from_int(-1)));
        assert_eq!(f.multiplicities, vec![1, 4]);
    }

    #[test]
    fn pentagon_normal_form() {
        let c5 = circulant(5, 2, |k| [0, 1, 2, 2, 1][k]);
        assert!(is_amorphic(&c5).unwrap().amorphic);
        let e = character_table(&c5, &SpectralOptions::default()).unwrap();
        let nf = amorphic_normal_form(&e).unwrap();
        assert_eq!(nf.row_perm.len(), 3);
        assert!(cross_sum_deviation(&nf).0 < 1e-9);
    }

    #[test]
    fn matching_requires_one_pair() {
        let qr7 = circulant(7, 2, |k| [0, 1, 1, 2, 1, 2, 2][k]);
        let m = idempotent_matching(&qr7, &SpectralOptions::default()).unwrap();
        assert_eq!(m.split_row, 1);
        assert!(m.conjugate);
        assert!(m.is_primitive(0) && !m.is_primitive(1));
        let z5 = circulant(5, 4, |k| k);
        assert!(matches!(idempotent_matching(&z5, &SpectralOptions::default()), Err(FusionError::Precondition(_))));
    }
}
