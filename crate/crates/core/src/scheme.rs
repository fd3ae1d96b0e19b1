//! Color matrices, axiom verification, intersection numbers and symmetrization.
//!
//! A scheme on `n` points with `d` classes is given by its color matrix: entry
//! `(x, y)` is the index of the relation containing the pair. Index 0 is the
//! diagonal.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub const MAX_POINTS: usize = 4096;
pub const MAX_CLASSES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    NonSquareBody { line: usize, expected: usize, found: usize },
    #[error("expected {expected} matrix rows, found {found}")]
    WrongRowCount { expected: usize, found: usize },
    #[error("line {line}, column {column}: unparsable entry {token:?}")]
    BadEntry { line: usize, column: usize, token: String },
    #[error("row {row}, column {column}: entry {value} outside 0..={d}")]
    OutOfRangeEntry { row: usize, column: usize, value: usize, d: usize },
    #[error("row {row}: diagonal entry is {value}, expected 0")]
    NonzeroDiagonal { row: usize, value: usize },
    #[error("row {row}, column {column}: off-diagonal entry is 0")]
    ZeroOffDiagonal { row: usize, column: usize },
    #[error("relation index {index} never occurs")]
    MissingRelation { index: usize },
    #[error("{n} points with {d} classes exceeds the supported size")]
    TooLarge { n: usize, d: usize },
    #[error(
        "transpose of relation {index} is not a relation: ({}, {}) maps to {first} but ({}, {}) maps to {second}",
        first_arc.1, first_arc.0, second_arc.1, second_arc.0
    )]
    TransposeNotRelation {
        index: usize,
        first_arc: (usize, usize),
        first: usize,
        second_arc: (usize, usize),
        second: usize,
    },
    #[error(
        "p[{i}][{j}]^{l} is not constant: pair {:?} has {first_count} but pair {:?} has {second_count}",
        first_pair, second_pair
    )]
    InconsistentIntersectionNumber {
        i: usize,
        j: usize,
        l: usize,
        first_pair: (usize, usize),
        first_count: u64,
        second_pair: (usize, usize),
        second_count: u64,
    },
    #[error("scheme is not commutative: p[{i}][{j}]^{l} != p[{j}][{i}]^{l}")]
    NonCommutative { i: usize, j: usize, l: usize },
    #[error("symmetrization failed to verify: {0}")]
    SymmetrizationNotScheme(Box<SchemeError>),
}

/// Raw relation-index matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColorMatrix {
    n: usize,
    d: usize,
    entries: Vec<u8>,
}

impl ColorMatrix {
    /// Builds a color matrix from a generator `f(x, y)`, checking the invariants.
    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(usize, usize) -> usize) -> Result<Self, SchemeError> {
        if n == 0 || n > MAX_POINTS || d > MAX_CLASSES {
            return Err(SchemeError::TooLarge { n, d });
        }
        let mut entries = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let v = f(x, y);
                if v > d {
                    return Err(SchemeError::OutOfRangeEntry { row: x, column: y, value: v, d });
                }
                entries.push(v as u8);
            }
        }
        let c = ColorMatrix { n, d, entries };
        c.check_invariants()?;
        Ok(c)
    }

    pub fn from_rows(d: usize, rows: &[Vec<usize>]) -> Result<Self, SchemeError> {
        let n = rows.len();
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SchemeError::NonSquareBody { line: x + 2, expected: n, found: row.len() });
            }
        }
        ColorMatrix::from_fn(n, d, |x, y| rows[x][y])
    }

    fn check_invariants(&self) -> Result<(), SchemeError> {
        let mut seen = vec![false; self.d + 1];
        for x in 0..self.n {
            for y in 0..self.n {
                let v = self.get(x, y);
                if x == y && v != 0 {
                    return Err(SchemeError::NonzeroDiagonal { row: x, value: v });
                }
                if x != y && v == 0 {
                    return Err(SchemeError::ZeroOffDiagonal { row: x, column: y });
                }
                seen[v] = true;
            }
        }
        if let Some(index) = seen.iter().position(|s| !s) {
            return Err(SchemeError::MissingRelation { index });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.entries[x * self.n + y] as usize
    }

    pub fn row(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.entries[x * self.n..(x + 1) * self.n].iter().map(|&v| v as usize)
    }

    /// Recolors with `map[old] = new`; `map` must send 0 to 0 and be onto `0..=new_d`.
    pub fn recolor(&self, map: &[usize], new_d: usize) -> Result<ColorMatrix, SchemeError> {
        ColorMatrix::from_fn(self.n, new_d, |x, y| map[self.get(x, y)])
    }

    /// First arc `(x, y)` in row-major order carrying each color.
    pub fn first_arcs(&self) -> Vec<(usize, usize)> {
        let mut first = vec![None; self.d + 1];
        let mut left = self.d + 1;
        'outer: for x in 0..self.n {
            for y in 0..self.n {
                let v = self.get(x, y);
                if first[v].is_none() {
                    first[v] = Some((x, y));
                    left -= 1;
                    if left == 0 {
                        break 'outer;
                    }
                }
            }
        }
        first.into_iter().map(|a| a.expect("every color occurs")).collect()
    }

    /// Parses the text scheme format: header `n d`, then `n` rows of `n` indices.
    /// Lines starting with `#` and blank lines are skipped.
    pub fn parse(text: &str) -> Result<ColorMatrix, SchemeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or(SchemeError::MalformedHeader { line: 1, reason: "empty input".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(SchemeError::MalformedHeader {
                line: hline,
                reason: format!("expected \"n d\", found {} fields", fields.len()),
            });
        }
        let parse_num = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|_| SchemeError::MalformedHeader {
                line: hline,
                reason: format!("{what} is not a nonnegative integer: {s:?}"),
            })
        };
        let n = parse_num(fields[0], "n")?;
        let d = parse_num(fields[1], "d")?;
        if n == 0 {
            return Err(SchemeError::MalformedHeader { line: hline, reason: "n must be positive".into() });
        }
        if n > MAX_POINTS || d > MAX_CLASSES {
            return Err(SchemeError::TooLarge { n, d });
        }
        let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n);
        for (line, body) in lines {
            if rows.len() == n {
                return Err(SchemeError::WrongRowCount { expected: n, found: rows.len() + 1 });
            }
            let mut row = Vec::with_capacity(n);
            for (col, tok) in body.split_whitespace().enumerate() {
                let v = tok.parse::<usize>().map_err(|_| SchemeError::BadEntry {
                    line,
                    column: col,
                    token: tok.to_string(),
                })?;
                if v > d {
                    return Err(SchemeError::OutOfRangeEntry { row: rows.len(), column: col, value: v, d });
                }
                row.push(v);
            }
            if row.len() != n {
                return Err(SchemeError::NonSquareBody { line, expected: n, found: row.len() });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(SchemeError::WrongRowCount { expected: n, found: rows.len() });
        }
        ColorMatrix::from_rows(d, &rows)
    }

    pub fn to_text(&self) -> String {
        let width = if self.d >= 10 { 2 } else { 1 };
        let mut out = format!("{} {}\n", self.n, self.d);
        for x in 0..self.n {
            let row: Vec<String> = self.row(x).map(|v| format!("{v:>width$}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Intersection numbers `p[i][j][l]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionTensor {
    dim: usize,
    p: Vec<u64>,
    commutative: bool,
}

impl IntersectionTensor {
    fn zeros(dim: usize) -> Self {
        IntersectionTensor { dim, p: vec![0; dim * dim * dim], commutative: true }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.dim + j) * self.dim + l
    }

    /// `p_{i,j}^l`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> u64 {
        self.p[self.idx(i, j, l)]
    }

    /// Number of relations, `d + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn first_noncommuting(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for l in 0..self.dim {
                    if self.get(i, j, l) != self.get(j, i, l) {
                        return Some((i, j, l));
                    }
                }
            }
        }
        None
    }

    fn permuted(&self, old_to_new: &[usize]) -> IntersectionTensor {
        let mut out = IntersectionTensor::zeros(self.dim);
        out.commutative = self.commutative;
        for i in 0..self.dim {
            for j in 0..self.dim {
                for l in 0..self.dim {
                    let k = out.idx(old_to_new[i], old_to_new[j], old_to_new[l]);
                    out.p[k] = self.get(i, j, l);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    Symmetric,
    Nonsymmetric,
    SkewSymmetric,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassKind::Symmetric => "symmetric",
            ClassKind::Nonsymmetric => "nonsymmetric",
            ClassKind::SkewSymmetric => "skew-symmetric",
        })
    }
}

/// A color matrix that satisfies the association-scheme axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    color: ColorMatrix,
    transpose: Vec<usize>,
    valencies: Vec<u64>,
    tensor: IntersectionTensor,
}

impl Scheme {
    pub fn color(&self) -> &ColorMatrix {
        &self.color
    }

    pub fn n(&self) -> usize {
        self.color.n
    }

    pub fn d(&self) -> usize {
        self.color.d
    }

    /// `i ↦ i'`.
    pub fn transpose_map(&self) -> &[usize] {
        &self.transpose
    }

    pub fn transpose_of(&self, i: usize) -> usize {
        self.transpose[i]
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valencies
    }

    pub fn tensor(&self) -> &IntersectionTensor {
        &self.tensor
    }

    pub fn is_commutative(&self) -> bool {
        self.tensor.commutative
    }

    pub fn require_commutative(&self) -> Result<(), SchemeError> {
        match self.tensor.first_noncommuting() {
            Some((i, j, l)) => Err(SchemeError::NonCommutative { i, j, l }),
            None => Ok(()),
        }
    }

    pub fn symmetric_flags(&self) -> Vec<bool> {
        self.transpose.iter().enumerate().map(|(i, &t)| i == t).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn class_kind(&self) -> ClassKind {
        let symmetric = (1..=self.d()).filter(|&i| self.transpose[i] == i).count();
        if symmetric == self.d() {
            ClassKind::Symmetric
        } else if symmetric == 0 {
            ClassKind::SkewSymmetric
        } else {
            ClassKind::Nonsymmetric
        }
    }

    /// Transpose pairs `(i, i')` with `i < i'`.
    pub fn nonsymmetric_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.d()).filter(|&i| self.transpose[i] > i).map(|i| (i, self.transpose[i])).collect()
    }

    /// Relabels classes by `old_to_new` (a permutation fixing 0).
    pub fn relabel(&self, old_to_new: &[usize]) -> Scheme {
        assert_eq!(old_to_new.len(), self.d() + 1);
        assert_eq!(old_to_new[0], 0, "relabeling must fix the diagonal");
        let mut new_to_old = vec![usize::MAX; old_to_new.len()];
        for (old, &new) in old_to_new.iter().enumerate() {
            new_to_old[new] = old;
        }
        assert!(new_to_old.iter().all(|&o| o != usize::MAX), "relabeling must be a permutation");
        let color = ColorMatrix {
            n: self.color.n,
            d: self.color.d,
            entries: self.color.entries.iter().map(|&v| old_to_new[v as usize] as u8).collect(),
        };
        let transpose = new_to_old.iter().map(|&old| old_to_new[self.transpose[old]]).collect();
        let valencies = new_to_old.iter().map(|&old| self.valencies[old]).collect();
        Scheme { color, transpose, valencies, tensor: self.tensor.permuted(old_to_new) }
    }

    /// Canonical relation order: symmetric classes and transpose pairs are
    /// ordered by valency, then by their first arc in row-major order; within a
    /// pair the class holding the first arc comes first.
    pub fn canonical_order(&self) -> Vec<usize> {
        let arcs = self.color.first_arcs();
        let mut units: Vec<(u64, (usize, usize), Vec<usize>)> = Vec::new();
        for i in 1..=self.d() {
            let t = self.transpose[i];
            if t < i {
                continue;
            }
            if t == i {
                units.push((self.valencies[i], arcs[i], vec![i]));
            } else {
                let (first, second) = if arcs[i] < arcs[t] { (i, t) } else { (t, i) };
                units.push((self.valencies[i], arcs[first], vec![first, second]));
            }
        }
        units.sort();
        let mut old_to_new = vec![0; self.d() + 1];
        let mut next = 1;
        for (_, _, members) in units {
            for m in members {
                old_to_new[m] = next;
                next += 1;
            }
        }
        old_to_new
    }

    pub fn canonicalize(&self) -> (Scheme, Vec<usize>) {
        let order = self.canonical_order();
        (self.relabel(&order), order)
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_order().iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Text form with canonical ordering applied.
    pub fn to_text(&self) -> String {
        self.canonicalize().0.color.to_text()
    }
}

/// Checks the scheme axioms (diagonal, partition, transposes, constant counts) and builds the scheme. Non-commutative schemes are
/// accepted and flagged through [`IntersectionTensor::is_commutative`].
pub fn verify_axioms(c: &ColorMatrix) -> Result<Scheme, SchemeError> {
    let transpose = transpose_map(c)?;
    let tensor = compute_tensor(c)?;
    let dim = c.d + 1;
    let valencies: Vec<u64> = (0..dim).map(|i| tensor.get(i, transpose[i], 0)).collect();
    Ok(Scheme { color: c.clone(), transpose, valencies, tensor })
}

fn transpose_map(c: &ColorMatrix) -> Result<Vec<usize>, SchemeError> {
    let arcs = c.first_arcs();
    let transpose: Vec<usize> = arcs.iter().map(|&(x, y)| c.get(y, x)).collect();
    for x in 0..c.n {
        for y in 0..c.n {
            let i = c.get(x, y);
            let t = c.get(y, x);
            if t != transpose[i] {
                return Err(SchemeError::TransposeNotRelation {
                    index: i,
                    first_arc: arcs[i],
                    first: transpose[i],
                    second_arc: (x, y),
                    second: t,
                });
            }
        }
    }
    Ok(transpose)
}

/// Reads `p[i][j][l]` off the first arc of each relation, then checks every
/// other pair against it.
fn compute_tensor(c: &ColorMatrix) -> Result<IntersectionTensor, SchemeError> {
    let n = c.n;
    let dim = c.d + 1;
    let mut tensor = IntersectionTensor::zeros(dim);
    let arcs = c.first_arcs();
    for (l, &(x, y)) in arcs.iter().enumerate() {
        for z in 0..n {
            let k = tensor.idx(c.get(x, z), c.get(z, y), l);
            tensor.p[k] += 1;
        }
    }
    let mut counts = vec![0u64; n * dim * dim];
    for x in 0..n {
        counts.iter_mut().for_each(|v| *v = 0);
        for z in 0..n {
            let a = c.get(x, z);
            let zrow = &c.entries[z * n..(z + 1) * n];
            for (y, &b) in zrow.iter().enumerate() {
                counts[(y * dim + a) * dim + b as usize] += 1;
            }
        }
        for y in 0..n {
            let l = c.get(x, y);
            let block = &counts[y * dim * dim..(y + 1) * dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let expected = tensor.get(i, j, l);
                    if block[i * dim + j] != expected {
                        return Err(SchemeError::InconsistentIntersectionNumber {
                            i,
                            j,
                            l,
                            first_pair: arcs[l],
                            first_count: expected,
                            second_pair: (x, y),
                            second_count: block[i * dim + j],
                        });
                    }
                }
            }
        }
    }
    tensor.commutative = tensor.first_noncommuting().is_none();
    Ok(tensor)
}

/// Recomputes the intersection tensor from the color matrix.
pub fn intersection_numbers(s: &Scheme) -> IntersectionTensor {
    compute_tensor(&s.color).expect("validated scheme")
}

/// The fusion merging every relation with its transpose. Returns the new
/// scheme and the map from old indices to new ones; new indices follow the
/// smallest old index of each merged class.
pub fn symmetrize(s: &Scheme) -> Result<(Scheme, Vec<usize>), SchemeError> {
    if s.is_symmetric() {
        return Ok((s.clone(), (0..=s.d()).collect()));
    }
    let mut map = vec![0; s.d() + 1];
    let mut next = 0;
    for i in 1..=s.d() {
        let t = s.transpose_of(i);
        if t < i {
            map[i] = map[t];
        } else {
            next += 1;
            map[i] = next;
        }
    }
    let color = s.color.recolor(&map, next)?;
    let sym = verify_axioms(&color).map_err(|e| SchemeError::SymmetrizationNotScheme(Box::new(e)))?;
    Ok((sym, map))
}
