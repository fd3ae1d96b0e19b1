//! Scheme builders, the bundled catalog, file ingestion and the batch runner.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fusion::{amorphic_normal_form, bannai_muzychuk_check, enumerate_admissible_partitions, fuse_direct, is_amorphic, cross_sum_deviation};
use crate::generator::{
    check_theorem_4class, check_theorem_amorphic, check_theorem_fission, check_theorem_one_pair, check_theorem_skew,
    find_generating_unions, verify_witnesses, TheoremVerdict,
};
use crate::scheme::{intersection_numbers, verify_axioms, ColorMatrix, Scheme, SchemeError, MAX_POINTS};
use crate::spectra::{character_table, distinct_eigenvalue_count, SpectralOptions};
use crate::srg::{connectivity_classification, params_from_eigen, srg_params_from_scheme};

pub const MAX_SCHURIAN_DEGREE: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("{0} is not a prime power")]
    NotPrimePower(usize),
    #[error("{m} does not divide {q} - 1")]
    BadDivisor { q: usize, m: usize },
    #[error("coset groups must partition 0..{m}")]
    BadGrouping { m: usize },
    #[error("builder produced an invalid scheme: {0}")]
    AxiomFailure(SchemeError),
    #[error("generator {index} is not a permutation of 0..{n}")]
    BadPermutation { index: usize, n: usize },
    #[error("group is not transitive: orbit of 0 has {orbit} of {n} points")]
    NotTransitive { orbit: usize, n: usize },
    #[error("orbital scheme is not commutative")]
    NotCommutative,
    #[error("{n} points exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
}

/// Finite field `GF(p^k)` with elements encoded as base-`p` digit strings.
struct Field {
    p: usize,
    q: usize,
    log: Vec<usize>,
}

fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = q;
    let mut k = 0;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

impl Field {
    fn new(q: usize) -> Option<Field> {
        let (p, k) = prime_power(q)?;
        let digits = |mut x: usize| {
            let mut v = vec![0usize; k];
            for d in v.iter_mut() {
                *d = x % p;
                x /= p;
            }
            v
        };
        let encode = |v: &[usize]| v.iter().rev().fold(0usize, |acc, &d| acc * p + d);
        // Try monic moduli x^k + f(x) in order until some element has order q − 1.
        for tail in 0..q {
            let f = digits(tail);
            let mul = |a: usize, b: usize| {
                let (a, b) = (digits(a), digits(b));
                let mut prod = vec![0usize; 2 * k];
                for i in 0..k {
                    for j in 0..k {
                        prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
                    }
                }
                for deg in (k..2 * k).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        prod[deg] = 0;
                        for i in 0..k {
                            prod[deg - k + i] = (prod[deg - k + i] + (p - f[i]) * c) % p;
                        }
                    }
                }
                encode(&prod[..k])
            };
            for g in 2.min(q - 1)..q {
                let mut x = 1usize;
                let mut log = vec![usize::MAX; q];
                let mut ok = true;
                for e in 0..q - 1 {
                    if log[x] != usize::MAX || x == 0 {
                        ok = false;
                        break;
                    }
                    log[x] = e;
                    x = mul(x, g);
                }
                if ok && x == 1 {
                    return Some(Field { p, q, log });
                }
            }
            if k == 1 {
                break;
            }
        }
        None
    }

    fn sub(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while place < self.q {
            let d = (a % self.p + self.p - b % self.p) % self.p;
            out += d * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }
}

/// Cyclotomic scheme on `GF(q)`: the class of `(x, y)` is the coset of `y − x`
/// modulo the subgroup of index `m` in the multiplicative group.
pub fn build_cyclotomic(q: usize, m: usize) -> Result<Scheme, CatalogError> {
    let singletons: Vec<Vec<usize>> = (0..m).map(|j| vec![j]).collect();
    build_cyclotomic_fusion(q, m, &singletons)
}

/// Merges the index-`m` cosets `g^j·H` according to `groups` (a partition of
/// `0..m`); the result is canonicalized and must pass the axioms.
pub fn build_cyclotomic_fusion(q: usize, m: usize, groups: &[Vec<usize>]) -> Result<Scheme, CatalogError> {
    let field = Field::new(q).ok_or(CatalogError::NotPrimePower(q))?;
    if m == 0 || !(q - 1).is_multiple_of(m) {
        return Err(CatalogError::BadDivisor { q, m });
    }
    if q > MAX_POINTS {
        return Err(CatalogError::TooLarge { n: q, max: MAX_POINTS });
    }
    let mut class_of = vec![usize::MAX; m];
    for (g, members) in groups.iter().enumerate() {
        for &j in members {
            if j >= m || class_of[j] != usize::MAX {
                return Err(CatalogError::BadGrouping { m });
            }
            class_of[j] = g + 1;
        }
    }
    if class_of.contains(&usize::MAX) {
        return Err(CatalogError::BadGrouping { m });
    }
    let color = ColorMatrix::from_fn(q, groups.len(), |x, y| if x == y { 0 } else { class_of[field.log[field.sub(y, x)] % m] })
        .map_err(CatalogError::AxiomFailure)?;
    finish(color)
}

fn finish(color: ColorMatrix) -> Result<Scheme, CatalogError> {
    let s = verify_axioms(&color).map_err(CatalogError::AxiomFailure)?;
    Ok(s.canonicalize().0)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Orbital scheme of the permutation group generated by `gens` on `0..n`.
pub fn build_schurian(n: usize, gens: &[Vec<usize>]) -> Result<Scheme, CatalogError> {
    if n > MAX_SCHURIAN_DEGREE {
        return Err(CatalogError::TooLarge { n, max: MAX_SCHURIAN_DEGREE });
    }
    for (index, g) in gens.iter().enumerate() {
        let mut seen = vec![false; n];
        if g.len() != n || g.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(CatalogError::BadPermutation { index, n });
        }
    }
    let mut orbit = vec![false; n];
    orbit[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for g in gens {
            if !orbit[g[x]] {
                orbit[g[x]] = true;
                stack.push(g[x]);
            }
        }
    }
    let reached = orbit.iter().filter(|&&b| b).count();
    if reached != n {
        return Err(CatalogError::NotTransitive { orbit: reached, n });
    }
    let mut uf = UnionFind((0..n * n).collect());
    for x in 0..n {
        for y in 0..n {
            for g in gens {
                uf.union(x * n + y, g[x] * n + g[y]);
            }
        }
    }
    let mut label = vec![usize::MAX; n * n];
    let diag = uf.find(0);
    label[diag] = 0;
    let mut next = 1;
    let mut entries = vec![0usize; n * n];
    for (pos, slot) in entries.iter_mut().enumerate() {
        let r = uf.find(pos);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        *slot = label[r];
    }
    let color = ColorMatrix::from_fn(n, next - 1, |x, y| entries[x * n + y]).map_err(CatalogError::AxiomFailure)?;
    let s = verify_axioms(&color).map_err(CatalogError::AxiomFailure)?;
    if !s.is_commutative() {
        return Err(CatalogError::NotCommutative);
    }
    Ok(s.canonicalize().0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductKind {
    Direct,
    /// `s1` on the blocks, `s2` inside each block.
    Wreath,
}

pub fn build_product(s1: &Scheme, s2: &Scheme, kind: ProductKind) -> Result<Scheme, CatalogError> {
    let (n1, n2) = (s1.n(), s2.n());
    let n = n1 * n2;
    if n > MAX_POINTS {
        return Err(CatalogError::TooLarge { n, max: MAX_POINTS });
    }
    let (c1, c2) = (s1.color(), s2.color());
    let (d1, d2) = (s1.d(), s2.d());
    let color = match kind {
        ProductKind::Direct => ColorMatrix::from_fn(n, (d1 + 1) * (d2 + 1) - 1, |x, y| {
            c1.get(x / n2, y / n2) * (d2 + 1) + c2.get(x % n2, y % n2)
        }),
        ProductKind::Wreath => ColorMatrix::from_fn(n, d1 + d2, |x, y| {
            if x / n2 == y / n2 {
                c2.get(x % n2, y % n2)
            } else {
                d2 + c1.get(x / n2, y / n2)
            }
        }),
    }
    .map_err(CatalogError::AxiomFailure)?;
    finish(color)
}

pub fn trivial_scheme() -> Scheme {
    verify_axioms(&ColorMatrix::from_fn(1, 0, |_, _| 0).expect("one point")).expect("one point")
}

pub fn complete_scheme(n: usize) -> Result<Scheme, CatalogError> {
    finish(ColorMatrix::from_fn(n, 1, |x, y| usize::from(x != y)).map_err(CatalogError::AxiomFailure)?)
}

/// Thin scheme of the cyclic group: the class of `(x, y)` is `y − x mod n`.
pub fn cyclic_group_scheme(n: usize) -> Result<Scheme, CatalogError> {
    finish(ColorMatrix::from_fn(n, n - 1, |x, y| (y + n - x) % n).map_err(CatalogError::AxiomFailure)?)
}

/// Translation scheme on `Z_m^2` whose classes are the orbits of the matrix
/// group generated by `mats` (2×2, row-vector action) on nonzero vectors.
pub fn build_affine_plane(m: usize, mats: &[[[usize; 2]; 2]]) -> Result<Scheme, CatalogError> {
    let n = m * m;
    let mut gens: Vec<Vec<usize>> = mats
        .iter()
        .map(|a| {
            (0..n)
                .map(|v| {
                    let (x, y) = (v / m, v % m);
                    let nx = (x * a[0][0] + y * a[1][0]) % m;
                    let ny = (x * a[0][1] + y * a[1][1]) % m;
                    nx * m + ny
                })
                .collect()
        })
        .collect();
    gens.push((0..n).map(|v| (v / m) * m + (v % m + 1) % m).collect());
    gens.push((0..n).map(|v| ((v / m + 1) % m) * m + v % m).collect());
    build_schurian(n, &gens)
}

/// Permutation action of `S_5` on the ten 2-subsets of `{0..4}`.
pub fn petersen_scheme() -> Result<Scheme, CatalogError> {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let act = |perm: [usize; 5]| pairs.iter().map(|&(a, b)| index(perm[a], perm[b])).collect::<Vec<_>>();
    build_schurian(10, &[act([1, 2, 3, 4, 0]), act([1, 0, 2, 3, 4])])
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub scheme: Scheme,
    pub provenance: String,
}

fn entry(id: impl Into<String>, provenance: impl Into<String>, s: Result<Scheme, CatalogError>) -> CatalogEntry {
    let id = id.into();
    let scheme = s.unwrap_or_else(|e| panic!("catalog entry {id} failed to build: {e}"));
    CatalogEntry { id, scheme, provenance: provenance.into() }
}

fn cyc(q: usize, m: usize) -> CatalogEntry {
    entry(format!("cyclotomic-{q}-{m}"), format!("cyclotomic q={q} m={m}"), build_cyclotomic(q, m))
}

fn wreath(id: &str, outer: Result<Scheme, CatalogError>, inner: Result<Scheme, CatalogError>) -> CatalogEntry {
    let s = outer.and_then(|o| inner.and_then(|i| build_product(&o, &i, ProductKind::Wreath)));
    entry(id, format!("wreath product {id}"), s)
}

fn direct(id: &str, a: Result<Scheme, CatalogError>, b: Result<Scheme, CatalogError>) -> CatalogEntry {
    let s = a.and_then(|a| b.and_then(|b| build_product(&a, &b, ProductKind::Direct)));
    entry(id, format!("direct product {id}"), s)
}

/// The bundled desk-scale catalog, sorted by id.
pub fn default_catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for q in [5usize, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        for m in [2usize, 3, 4] {
            if (q - 1) % m == 0 {
                out.push(cyc(q, m));
            }
        }
    }
    // Semi-primitive extension fields give amorphic symmetric schemes.
    for (q, m) in [(9, 4), (16, 3), (16, 5), (25, 3), (25, 6)] {
        out.push(cyc(q, m));
    }

    let t3 = || build_cyclotomic(3, 2);
    let t7 = || build_cyclotomic(7, 2);
    let k = complete_scheme;
    out.push(wreath("wreath-T7-K2", t7(), k(2)));
    out.push(wreath("wreath-T7-K3", t7(), k(3)));
    out.push(wreath("wreath-T3-K2", t3(), k(2)));
    out.push(wreath("wreath-T3-K3", t3(), k(3)));
    out.push(wreath("wreath-K2-T3", k(2), t3()));
    out.push(wreath("wreath-K3-T7", k(3), t7()));
    out.push(wreath("wreath-T7-C5", t7(), build_cyclotomic(5, 2)));
    out.push(wreath("wreath-C5-T3", build_cyclotomic(5, 2), t3()));
    out.push(wreath(
        "wreath-T3-K2-K3",
        t3().and_then(|t| build_product(&t, &complete_scheme(2)?, ProductKind::Wreath)),
        k(3),
    ));
    out.push(wreath("wreath-K2-K5", k(2), k(5)));
    out.push(direct("direct-C5-K2", build_cyclotomic(5, 2), k(2)));
    out.push(direct("direct-T3-K2", t3(), k(2)));
    out.push(direct("direct-T3-T3", t3(), t3()));

    out.push(entry("schurian-petersen", "S5 on 2-subsets", petersen_scheme()));
    out.push(entry("schurian-S5-natural", "S5 on 5 points", build_schurian(5, &[vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]])));
    out.push(entry("schurian-C5", "Z5 regular action", build_schurian(5, &[vec![1, 2, 3, 4, 0]])));
    out.push(entry("schurian-D5", "dihedral group on 5 points", build_schurian(5, &[vec![1, 2, 3, 4, 0], vec![0, 4, 3, 2, 1]])));
    out.push(entry(
        "schurian-F21",
        "Frobenius group of order 21 on 7 points",
        build_schurian(7, &[(0..7).map(|x| (x + 1) % 7).collect(), (0..7).map(|x| 2 * x % 7).collect()]),
    ));
    out.push(entry(
        "schurian-Z9-cubes",
        "Z9 extended by multiplication by 4",
        build_schurian(9, &[(0..9).map(|x| (x + 1) % 9).collect(), (0..9).map(|x| 4 * x % 9).collect()]),
    ));
    out.push(entry("affine-Z3xZ3-unipotent", "Z3^2 translations with <[[1,1],[0,1]]>", build_affine_plane(3, &[[[1, 1], [0, 1]]])));
    out.push(entry("cyclic-Z6", "thin scheme of Z6", cyclic_group_scheme(6)));
    out.push(entry(
        "affine-Z4xZ4-one-pair",
        "Z4^2 translations with <[[1,0],[3,3]], [[3,3],[0,1]]>",
        build_affine_plane(4, &[[[1, 0], [3, 3]], [[3, 3], [0, 1]]]),
    ));
    out.push(entry("affine-Z4xZ4-five-class", "Z4^2 translations with <[[3,2],[3,3]]>", build_affine_plane(4, &[[[3, 2], [3, 3]]])));
    out.push(entry("affine-Z7xZ7-skew", "Z7^2 translations with <[[5,5],[4,3]]>", build_affine_plane(7, &[[[5, 5], [4, 3]]])));
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Reads every regular file in `dir` (sorted by name) as a scheme file.
pub fn load_directory(dir: &Path) -> std::io::Result<Vec<(String, Result<CatalogEntry, String>)>> {
    let mut names: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .map(|e| e.path())
        .collect();
    names.sort();
    let mut out = Vec::new();
    for path in names {
        let id = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let loaded = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|text| ColorMatrix::parse(&text).map_err(|e| e.to_string()))
            .and_then(|c| verify_axioms(&c).map_err(|e| e.to_string()))
            .map(|scheme| CatalogEntry { id: id.clone(), scheme, provenance: path.display().to_string() });
        out.push((id, loaded));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Check {
    #[serde(rename = "axioms")]
    Axioms,
    #[serde(rename = "spectra")]
    Spectra,
    #[serde(rename = "fusion")]
    Fusion,
    #[serde(rename = "amorphic")]
    Amorphic,
    #[serde(rename = "generators")]
    Generators,
    #[serde(rename = "T1.2")]
    T12,
    #[serde(rename = "T1.3")]
    T13,
    #[serde(rename = "T1.4")]
    T14,
    #[serde(rename = "T3.1")]
    T31,
    #[serde(rename = "T4.1")]
    T41,
    #[serde(rename = "srg")]
    Srg,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Axioms,
        Check::Spectra,
        Check::Fusion,
        Check::Amorphic,
        Check::Generators,
        Check::T12,
        Check::T13,
        Check::T14,
        Check::T31,
        Check::T41,
        Check::Srg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Axioms => "axioms",
            Check::Spectra => "spectra",
            Check::Fusion => "fusion",
            Check::Amorphic => "amorphic",
            Check::Generators => "generators",
            Check::T12 => "T1.2",
            Check::T13 => "T1.3",
            Check::T14 => "T1.4",
            Check::T31 => "T3.1",
            Check::T41 => "T4.1",
            Check::Srg => "srg",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.iter().copied().find(|c| c.name().eq_ignore_ascii_case(s))
    }

    pub fn is_theorem(self) -> bool {
        matches!(self, Check::T12 | Check::T13 | Check::T14 | Check::T31 | Check::T41)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    pub check: Check,
    pub applicable: bool,
    pub holds: Option<bool>,
    pub evidence: Value,
    pub error: Option<String>,
}

impl Record {
    fn from_verdict(id: &str, check: Check, v: TheoremVerdict) -> Record {
        Record { id: id.to_string(), check, applicable: v.applicable, holds: v.holds, evidence: v.evidence, error: None }
    }

    fn error(id: &str, check: Check, e: impl ToString) -> Record {
        Record { id: id.to_string(), check, applicable: false, holds: None, evidence: Value::Null, error: Some(e.to_string()) }
    }

    pub fn failed(&self) -> bool {
        self.holds == Some(false)
    }
}

/// Largest class count for which the fusion and generator sweeps run.
pub const SWEEP_MAX_CLASSES: usize = 6;

fn check_axioms(s: &Scheme) -> (bool, Value) {
    let n = s.n();
    let k = s.valencies();
    let t = s.tensor();
    let recomputed = verify_axioms(s.color()).map(|v| v.tensor() == t).unwrap_or(false) && intersection_numbers(s) == *t;
    let sum_ok = k.iter().sum::<u64>() == n as u64;
    let transpose_ok = (0..=s.d()).all(|i| k[i] == k[s.transpose_of(i)]);
    let row_sums = (0..=s.d()).all(|i| (0..=s.d()).all(|l| (0..=s.d()).map(|j| t.get(i, j, l)).sum::<u64>() == k[i]));
    let mut counts = vec![0u64; s.d() + 1];
    for x in 0..n {
        for y in s.color().row(x) {
            counts[y] += 1;
        }
    }
    let counting = (0..=s.d()).all(|i| counts[i] == n as u64 * k[i]);
    let holds = recomputed && sum_ok && transpose_ok && row_sums && counting;
    (
        holds,
        json!({"n": n, "d": s.d(), "valencies": k, "transpose": s.transpose_map(), "kind": s.class_kind(),
               "commutative": s.is_commutative(), "recomputed": recomputed, "row_sums": row_sums, "relation_counts": counting}),
    )
}

fn check_spectra(s: &Scheme, opts: &SpectralOptions) -> Result<(bool, Value), String> {
    let e = character_table(s, opts).map_err(|e| e.to_string())?;
    let mut sums_vanish = true;
    let mut worst_sum = 0.0f64;
    for r in e.row_sum_report().iter().skip(1) {
        match &r.exact {
            Some(x) => sums_vanish &= x.is_zero(),
            None => {
                worst_sum = worst_sum.max(r.value.norm());
                sums_vanish &= r.value.norm() < 1e-8;
            }
        }
    }
    let worst_mult = e.raw_multiplicities.iter().map(|m| (m - m.round()).abs()).fold(0.0, f64::max);
    let mult_ok = worst_mult < 1e-6 && e.multiplicities.iter().sum::<u64>() == s.n() as u64;
    let mut cross = true;
    let mut unions = 0;
    if s.d() <= SWEEP_MAX_CLASSES {
        for l in crate::generator::all_unions(s.d()) {
            let exact = distinct_eigenvalue_count(s, &l).map_err(|e| e.to_string())?;
            let clusters = crate::spectra::union_spectrum_escalating(s, &e, &l, opts).map_err(|e| e.to_string())?.len();
            cross &= exact == clusters;
            unions += 1;
        }
    }
    Ok((
        sums_vanish && mult_ok && cross,
        json!({"table": e, "row_sums_vanish": sums_vanish, "max_floating_row_sum": worst_sum,
               "max_multiplicity_deviation": worst_mult, "multiplicities_ok": mult_ok,
               "unions_cross_checked": unions, "counts_match_clusters": cross}),
    ))
}

fn check_fusion(s: &Scheme, opts: &SpectralOptions) -> Result<(bool, bool, Value), String> {
    if s.d() > 5 {
        return Ok((false, true, json!({"reason": "more than 5 classes"})));
    }
    let e = character_table(s, opts).map_err(|e| e.to_string())?;
    let mut agree = 0;
    let mut disagree = Vec::new();
    let mut fusions = 0;
    for pi in enumerate_admissible_partitions(s).map_err(|e| e.to_string())? {
        let direct = fuse_direct(s, &pi);
        let spectral = bannai_muzychuk_check(&e, &pi).map_err(|e| e.to_string())?;
        if direct.is_ok() == spectral.is_scheme {
            agree += 1;
        } else {
            disagree.push(pi.clone());
        }
        if let (Ok(f), Some(table)) = (direct, spectral.fused_table) {
            fusions += 1;
            let fe = character_table(&f, opts).map_err(|e| e.to_string())?;
            let dev = crate::generator::align_tables(&table, &fe).unwrap_or(f64::INFINITY);
            if dev > 1e-8 {
                disagree.push(pi);
            }
        }
    }
    Ok((true, disagree.is_empty(), json!({"partitions": agree + disagree.len(), "agree": agree, "fusions": fusions, "disagreements": disagree})))
}

fn check_amorphic(s: &Scheme, opts: &SpectralOptions) -> Result<(bool, Value), String> {
    let v = is_amorphic(s).map_err(|e| e.to_string())?;
    let mut ev = json!({"amorphic": v.amorphic, "partitions_checked": v.partitions_checked, "failing_partition": v.failing_partition});
    let mut holds = true;
    if v.amorphic && s.is_symmetric() && s.d() >= 2 {
        let e = character_table(s, opts).map_err(|e| e.to_string())?;
        match amorphic_normal_form(&e) {
            Ok(nf) => {
                let (dev, exact) = cross_sum_deviation(&nf);
                holds &= dev < 1e-8 && exact != Some(false);
                ev["normal_form"] = json!(nf);
                ev["cross_sum_deviation"] = json!(dev);
            }
            Err(err) => {
                holds = false;
                ev["normal_form_error"] = json!(err.to_string());
            }
        }
        // Every transpose-closed 2-block fusion is a strongly regular graph.
        let mut srg_ok = true;
        for l in crate::generator::all_unions(s.d()) {
            if l.len() < s.d() {
                srg_ok &= srg_params_from_scheme(s, &l).is_ok();
            }
        }
        holds &= srg_ok;
        ev["two_block_unions_strongly_regular"] = json!(srg_ok);
    }
    Ok((holds, ev))
}

fn check_generators(s: &Scheme) -> Result<(bool, bool, Value), String> {
    if s.d() > SWEEP_MAX_CLASSES {
        return Ok((false, true, json!({"reason": "more than 6 classes"})));
    }
    let search = find_generating_unions(s).map_err(|e| e.to_string())?;
    let consistent = search.reports.iter().all(|r| r.consistent(s.d()));
    let mut witnesses_checked = 0;
    let mut witnesses_ok = true;
    for r in &search.reports {
        if let Some(ok) = verify_witnesses(s, r) {
            witnesses_checked += 1;
            witnesses_ok &= ok;
        }
    }
    Ok((
        true,
        consistent && witnesses_ok,
        json!({"unions": search.reports.len(), "generating": search.generating.len(), "minimal": search.minimal,
               "criteria_agree": consistent, "witnesses_checked": witnesses_checked, "witnesses_ok": witnesses_ok}),
    ))
}

fn check_srg(s: &Scheme, opts: &SpectralOptions) -> Result<(bool, bool, Value), String> {
    if s.d() > SWEEP_MAX_CLASSES {
        return Ok((false, true, json!({"reason": "more than 6 classes"})));
    }
    let mut graphs = Vec::new();
    let mut holds = true;
    for l in crate::generator::all_unions(s.d()) {
        if l.len() == s.d() || l.iter().any(|&i| !l.contains(&s.transpose_of(i))) {
            continue;
        }
        let Ok(p) = srg_params_from_scheme(s, &l) else { continue };
        let (lam, mu) = params_from_eigen(p.k, &p.r, &p.s);
        let round_trip = !p.connected || (lam == crate::exact::Surd::from_int(p.lambda as i64) && mu == crate::exact::Surd::from_int(p.mu as i64));
        let c = connectivity_classification(s, &l, opts).map_err(|e| e.to_string())?;
        let three = !p.connected || distinct_eigenvalue_count(s, &l).map_err(|e| e.to_string())? == 3;
        let bound = p.r.to_complex().re <= p.k as f64 + 1e-9 && p.s.to_complex().re < p.k as f64;
        let equiv = c.components_match_multiplicity
            && c.minus_one_matches != Some(false)
            && (c.components > 1) == c.spectrum_is_k_and_minus_one
            && p.connected == (c.components == 1);
        let ok = round_trip && three && bound && equiv;
        holds &= ok;
        graphs.push(json!({"union": l, "params": p, "connectivity": c, "ok": ok}));
    }
    Ok((!graphs.is_empty(), holds, json!({"graphs": graphs})))
}

fn run_check(entry: &CatalogEntry, check: Check, opts: &SpectralOptions) -> Record {
    let s = &entry.scheme;
    let id = entry.id.as_str();
    let plain = |r: Result<(bool, bool, Value), String>| match r {
        Ok((applicable, holds, evidence)) => Record {
            id: id.to_string(),
            check,
            applicable,
            holds: applicable.then_some(holds),
            evidence,
            error: None,
        },
        Err(e) => Record::error(id, check, e),
    };
    let always = |r: Result<(bool, Value), String>| plain(r.map(|(h, v)| (true, h, v)));
    let verdict = |r: Result<TheoremVerdict, crate::generator::GeneratorError>| match r {
        Ok(v) => Record::from_verdict(id, check, v),
        Err(e) => Record::error(id, check, e),
    };
    match check {
        Check::Axioms => always(Ok(check_axioms(s))),
        Check::Spectra => always(check_spectra(s, opts)),
        Check::Fusion => plain(check_fusion(s, opts)),
        Check::Amorphic => always(check_amorphic(s, opts)),
        Check::Generators => plain(check_generators(s)),
        Check::T12 => verdict(check_theorem_one_pair(s)),
        Check::T13 => verdict(check_theorem_amorphic(s, opts)),
        Check::T14 => verdict(check_theorem_4class(s)),
        Check::T31 => verdict(check_theorem_fission(s, opts)),
        Check::T41 => verdict(check_theorem_skew(s, opts)),
        Check::Srg => plain(check_srg(s, opts)),
    }
}

/// Runs `checks` over `entries` on `workers` threads. Records come back
/// sorted by entry id and then check, whatever the worker count.
pub fn run_catalog(entries: &[CatalogEntry], checks: &[Check], opts: &SpectralOptions, workers: usize) -> Vec<Record> {
    let jobs: Vec<(&CatalogEntry, Check)> = entries.iter().flat_map(|e| checks.iter().map(move |&c| (e, c))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let mut records: Vec<Record> = pool.install(|| jobs.par_iter().map(|(e, c)| run_check(e, *c, opts)).collect());
    records.sort_by(|a, b| a.id.cmp(&b.id).then(a.check.cmp(&b.check)));
    records
}

/// Like [`run_catalog`], but entries that failed to load become a single
/// `axioms` error record each instead of being analyzed.
pub fn run_loaded(loaded: &[(String, Result<CatalogEntry, String>)], checks: &[Check], opts: &SpectralOptions, workers: usize) -> Vec<Record> {
    let good: Vec<CatalogEntry> = loaded.iter().filter_map(|(_, e)| e.as_ref().ok().cloned()).collect();
    let mut records = run_catalog(&good, checks, opts, workers);
    for (id, e) in loaded {
        if let Err(msg) = e {
            records.push(Record::error(id, Check::Axioms, msg));
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id).then(a.check.cmp(&b.check)));
    records
}

/// Process exit status for a finished sweep: 2 on any input error, 1 on any
/// failing theorem verdict, else 0.
pub fn exit_code(records: &[Record]) -> i32 {
    if records.iter().any(|r| r.error.is_some()) {
        2
    } else if records.iter().any(|r| r.check.is_theorem() && r.failed()) {
        1
    } else {
        0
    }
}

pub fn to_json_lines(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
