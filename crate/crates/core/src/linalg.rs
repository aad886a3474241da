//! Exact sparse linear algebra on bidegree slices.
//!
//! Every choice of a basis vector or a particular solution goes through one
//! pivot rule: columns are processed left to right and the pivot of a column is
//! the remaining row of smallest original index. Reduced row echelon forms
//! are unique, so kernels, preimages and complements are reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Monomial, Polynomial, Var, VariableTable};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse vector: `(index, value)` pairs sorted by index, no zeros stored.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Default upper bound on the number of monomials in one slice.
pub const DEFAULT_SLICE_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> SparseMatrix {
        SparseMatrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> SparseMatrix {
        debug_assert!(cols.iter().all(|c| c.iter().all(|(r, v)| *r < nrows && !v.is_zero())));
        SparseMatrix { nrows, cols }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> SparseMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|c| {
                (0..nrows).filter(|&r| !rows[r][c].is_zero()).map(|r| (r, rows[r][c].clone())).collect()
            })
            .collect();
        SparseMatrix { nrows, cols }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix { nrows: n, cols: (0..n).map(|i| vec![(i, Scalar::one())]).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.cols[c].binary_search_by_key(&r, |(i, _)| *i) {
            Ok(k) => self.cols[c][k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// All nonzero entries as `((row, col), value)` in column-major order.
    pub fn entries(&self) -> Vec<((usize, usize), Scalar)> {
        let mut out = Vec::new();
        for (c, col) in self.cols.iter().enumerate() {
            out.extend(col.iter().map(|(r, v)| ((*r, c), v.clone())));
        }
        out
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (c, xc) in x {
            for (r, v) in &self.cols[*c] {
                *acc.entry(*r).or_insert_with(Scalar::zero) += v * xc;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Appends the given vectors as further columns.
    pub fn with_columns(&self, extra: &[SparseVec]) -> SparseMatrix {
        let mut cols = self.cols.clone();
        cols.extend(extra.iter().cloned());
        SparseMatrix { nrows: self.nrows, cols }
    }
}

/// Reduced row echelon form: `rows[k]` has a leading one in column
/// `pivots[k]`, and every pivot column is zero outside its pivot row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonForm {
    pub ncols: usize,
    pub pivots: Vec<usize>,
    pub rows: Vec<SparseVec>,
    /// Original row index chosen as pivot for each pivot column.
    pub pivot_rows: Vec<usize>,
}

impl EchelonForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivots.binary_search(&c).is_ok()
    }
}

type IntRow = Vec<(usize, BigInt)>;

fn integer_row(row: &SparseVec) -> IntRow {
    let mut l = BigInt::one();
    for (_, v) in row {
        l = l.lcm(v.denom());
    }
    let r: IntRow = row.iter().map(|(c, v)| (*c, v.numer() * (&l / v.denom()))).collect();
    make_primitive(r)
}

fn make_primitive(mut row: IntRow) -> IntRow {
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            return row;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    row
}

/// `p·a − q·b` for sparse integer rows, with the result made primitive.
fn combine(a: &IntRow, p: &BigInt, b: &IntRow, q: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push((a[i].0, p * &a[i].1));
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, -(q * &b[j].1)));
            j += 1;
        } else {
            let v = p * &a[i].1 - q * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(out)
}

/// Row-major copy of the matrix.
fn rows_of(m: &SparseMatrix) -> Vec<SparseVec> {
    let mut rows = vec![Vec::new(); m.nrows];
    for (c, col) in m.cols.iter().enumerate() {
        for (r, v) in col {
            rows[*r].push((c, v.clone()));
        }
    }
    rows
}

/// Reduced row echelon form under the fixed pivot rule. Elimination runs on
/// primitive integer rows; only the final normalization divides.
pub fn echelon(m: &SparseMatrix) -> EchelonForm {
    let rows: Vec<IntRow> = rows_of(m).iter().map(integer_row).collect();
    let mut rows: Vec<Option<IntRow>> = rows.into_iter().map(Some).collect();
    // unassigned rows bucketed by their leading column
    let mut buckets: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if let Some(first) = r.as_ref().and_then(|r| r.first()) {
            buckets.entry(first.0).or_default().insert(i);
        }
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pivot_data: Vec<IntRow> = Vec::new();
    while let Some((c, members)) = buckets.pop_first() {
        let mut members = members.into_iter();
        let p_idx = members.next().expect("bucket is nonempty");
        let prow = rows[p_idx].take().expect("row present");
        let p = prow[0].1.clone();
        for i in members {
            let row = rows[i].take().expect("row present");
            let a = row[0].1.clone();
            let g = p.gcd(&a);
            let reduced = combine(&row, &(&p / &g), &prow, &(&a / &g));
            debug_assert!(reduced.first().is_none_or(|e| e.0 > c));
            if let Some(first) = reduced.first() {
                buckets.entry(first.0).or_default().insert(i);
                rows[i] = Some(reduced);
            }
        }
        pivots.push((c, p_idx));
        pivot_data.push(prow);
    }
    // back substitution in rationals, last pivot first
    let pivot_index: HashMap<usize, usize> = pivots.iter().enumerate().map(|(k, (c, _))| (*c, k)).collect();
    let mut reduced: Vec<SparseVec> = vec![Vec::new(); pivots.len()];
    for k in (0..pivots.len()).rev() {
        let row = &pivot_data[k];
        let lead = Scalar::from_integer(row[0].1.clone());
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        acc.insert(row[0].0, Scalar::one());
        for (c, v) in &row[1..] {
            let v = Scalar::from_integer(v.clone()) / &lead;
            match pivot_index.get(c) {
                Some(&j) => {
                    for (cc, w) in &reduced[j] {
                        if cc == c {
                            continue;
                        }
                        *acc.entry(*cc).or_insert_with(Scalar::zero) -= &v * w;
                    }
                }
                None => {
                    *acc.entry(*c).or_insert_with(Scalar::zero) += v;
                }
            }
        }
        reduced[k] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }
    EchelonForm {
        ncols: m.ncols(),
        pivots: pivots.iter().map(|(c, _)| *c).collect(),
        pivot_rows: pivots.iter().map(|(_, r)| *r).collect(),
        rows: reduced,
    }
}

/// Basis of the null space: one vector per free column `j`, with coordinate
/// one at `j`, zero at the other free columns.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let e = echelon(m);
    kernel_from_echelon(&e)
}

pub fn kernel_from_echelon(e: &EchelonForm) -> Vec<SparseVec> {
    let mut per_free: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for c in 0..e.ncols {
        if !e.is_pivot(c) {
            per_free.insert(c, vec![(c, Scalar::one())]);
        }
    }
    for (k, row) in e.rows.iter().enumerate() {
        for (c, v) in row {
            if let Some(vec) = per_free.get_mut(c) {
                vec.push((e.pivots[k], -v.clone()));
            }
        }
    }
    per_free
        .into_values()
        .map(|mut v| {
            v.sort_by_key(|(i, _)| *i);
            v
        })
        .collect()
}

/// Canonical solution of `M·x = b` (free coordinates zero), or `None`.
pub fn solve_preimage(m: &SparseMatrix, b: &SparseVec) -> Result<Option<SparseVec>> {
    Ok(solve_many(m, std::slice::from_ref(b))?.pop().expect("one right-hand side"))
}

/// Solves `M·x = b` for several right-hand sides at once.
pub fn solve_many(m: &SparseMatrix, bs: &[SparseVec]) -> Result<Vec<Option<SparseVec>>> {
    for b in bs {
        if b.iter().any(|(i, _)| *i >= m.nrows()) {
            return Err(Error::Dimension(format!(
                "right-hand side index out of range for {} rows",
                m.nrows()
            )));
        }
    }
    let n = m.ncols();
    let e = echelon(&m.with_columns(bs));
    let mut out = Vec::with_capacity(bs.len());
    for k in 0..bs.len() {
        let col = n + k;
        let mut x = Vec::new();
        let mut ok = true;
        for (r, row) in e.rows.iter().enumerate() {
            let entry = row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1);
            let Some(v) = entry else { continue };
            if e.pivots[r] >= n {
                ok = false;
                break;
            }
            x.push((e.pivots[r], v.clone()));
        }
        if ok {
            x.sort_by_key(|(i, _)| *i);
            out.push(Some(x));
        } else {
            out.push(None);
        }
    }
    Ok(out)
}

/// Indices of the cycles whose classes form a basis of the cycle span modulo
/// the column span of `boundaries`, chosen greedily in the given order.
pub fn homology_complement_indices(boundaries: &SparseMatrix, cycles: &[SparseVec]) -> Vec<usize> {
    let n = boundaries.ncols();
    let e = echelon(&boundaries.with_columns(cycles));
    e.pivots.iter().filter(|&&c| c >= n).map(|&c| c - n).collect()
}

pub fn homology_complement(boundaries: &SparseMatrix, cycles: &[SparseVec]) -> Vec<SparseVec> {
    homology_complement_indices(boundaries, cycles).into_iter().map(|i| cycles[i].clone()).collect()
}

pub fn rank(m: &SparseMatrix) -> usize {
    echelon(m).rank()
}

/// Monomials of one bidegree of a table, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceBasis {
    pub coh_degree: i64,
    pub internal_degree: i64,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl SliceBasis {
    pub fn new(coh_degree: i64, internal_degree: i64, mut monomials: Vec<Monomial>) -> SliceBasis {
        monomials.sort();
        monomials.dedup();
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        SliceBasis { coh_degree, internal_degree, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of a polynomial lying in this slice.
    pub fn coordinates(&self, p: &Polynomial) -> Result<SparseVec> {
        let mut v = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let Some(i) = self.position(m) else {
                return Err(Error::Invalid(format!(
                    "monomial {m:?} outside slice ({}, {})",
                    self.coh_degree, self.internal_degree
                )));
            };
            v.push((i, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    pub fn polynomial(&self, v: &SparseVec) -> Polynomial {
        v.iter().map(|(i, c)| (self.monomials[*i].clone(), c.clone())).collect()
    }
}

/// Enumerates the slice of the given bidegree using coordinates of level at
/// most `level_cap`.
pub fn enumerate_basis(
    table: &VariableTable,
    coh_degree: i64,
    internal_degree: i64,
    level_cap: u32,
) -> Result<SliceBasis> {
    enumerate_basis_capped(table, coh_degree, internal_degree, level_cap, usize::MAX)
}

pub fn enumerate_basis_capped(
    table: &VariableTable,
    coh_degree: i64,
    internal_degree: i64,
    level_cap: u32,
    cap: usize,
) -> Result<SliceBasis> {
    let vars = table.coords(level_cap);
    let degs: Vec<i64> = vars.iter().map(|v| table.internal_degree(*v)).collect();
    if let Some(i) = degs.iter().position(|d| *d < 1) {
        return Err(Error::Invalid(format!(
            "variable {} has internal degree {} < 1",
            table.name(vars[i]),
            degs[i]
        )));
    }
    // best[k] = largest level/degree ratio among vars[k..], for pruning on the
    // cohomological degree still to be produced
    let mut best: Vec<(i64, i64)> = vec![(0, 1); vars.len() + 1];
    for k in (0..vars.len()).rev() {
        let cand = (vars[k].level() as i64, degs[k]);
        let prev = best[k + 1];
        best[k] = if cand.0 * prev.1 > prev.0 * cand.1 { cand } else { prev };
    }
    let mut out = Vec::new();
    let mut current: Vec<(Var, u32)> = Vec::new();
    let mut ctx = Enum { vars: &vars, degs: &degs, best: &best, out: &mut out, cap };
    ctx.go(0, -coh_degree, internal_degree, &mut current)?;
    Ok(SliceBasis::new(coh_degree, internal_degree, out))
}

struct Enum<'a> {
    vars: &'a [Var],
    degs: &'a [i64],
    best: &'a [(i64, i64)],
    out: &'a mut Vec<Monomial>,
    cap: usize,
}

impl Enum<'_> {
    /// `need_level`: sum of levels still required; `need_deg`: internal degree
    /// still required.
    fn go(&mut self, k: usize, need_level: i64, need_deg: i64, cur: &mut Vec<(Var, u32)>) -> Result<()> {
        if need_deg == 0 && need_level == 0 {
            self.out.push(Monomial::from_sorted(cur.clone()));
            if self.out.len() > self.cap {
                return Err(Error::ResourceLimit { size: self.out.len(), cap: self.cap });
            }
            return Ok(());
        }
        if k == self.vars.len() || need_deg <= 0 || need_level < 0 {
            return Ok(());
        }
        let (bl, bd) = self.best[k];
        if need_level * bd > need_deg * bl {
            return Ok(());
        }
        let v = self.vars[k];
        let d = self.degs[k];
        let l = v.level() as i64;
        let max_e = if v.is_odd() { 1 } else { need_deg / d };
        for e in (1..=max_e).rev() {
            let (nl, nd) = (need_level - l * e, need_deg - d * e);
            if nl < 0 || nd < 0 {
                continue;
            }
            cur.push((v, e as u32));
            self.go(k + 1, nl, nd, cur)?;
            cur.pop();
        }
        self.go(k + 1, need_level, need_deg, cur)
    }
}

/// Matrix of a linear map between two slices: column `j` holds the
/// coordinates of `f(domain[j])`.
pub fn matrix_of_map(
    f: impl Fn(&Monomial) -> Polynomial,
    domain: &SliceBasis,
    codomain: &SliceBasis,
) -> Result<SparseMatrix> {
    let cols = domain
        .monomials
        .iter()
        .map(|m| codomain.coordinates(&f(m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(codomain.len(), cols))
}

/// Dense integer-valued helper used by tests and small callers.
pub fn to_dense(m: &SparseMatrix) -> Vec<Vec<Scalar>> {
    let mut d = vec![vec![Scalar::zero(); m.ncols()]; m.nrows()];
    for ((r, c), v) in m.entries() {
        d[r][c] = v;
    }
    d
}

/// Scales a vector to primitive integers with a positive leading entry.
pub fn primitive_vec(v: &SparseVec) -> SparseVec {
    if v.is_empty() {
        return Vec::new();
    }
    let int = integer_row(v);
    let flip = int[0].1.is_negative();
    int.into_iter().map(|(i, x)| (i, Scalar::from_integer(if flip { -x } else { x }))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&dense(&[&[1, 1]])), vec![vec![(0, int(-1)), (1, int(1))]]);
        assert!(kernel_basis(&dense(&[&[2, 1], &[1, 1]])).is_empty());
        let z = SparseMatrix::zeros(2, 3);
        assert_eq!(kernel_basis(&z).len(), 3);
    }

    #[test]
    fn preimage_examples() {
        let m = dense(&[&[2]]);
        assert_eq!(solve_preimage(&m, &vec![(0, int(3))]).unwrap(), Some(vec![(0, frac(3, 2))]));
        assert_eq!(solve_preimage(&m, &vec![]).unwrap(), Some(vec![]));
        let m = dense(&[&[1, 1]]);
        assert_eq!(solve_preimage(&m, &vec![(0, int(1))]).unwrap(), Some(vec![(0, int(1))]));
        let m = dense(&[&[1, 0], &[1, 0]]);
        assert_eq!(solve_preimage(&m, &vec![(0, int(1))]).unwrap(), None);
        assert!(solve_preimage(&m, &vec![(5, int(1))]).is_err());
    }

    #[test]
    fn complement_examples() {
        let cycles = vec![vec![(0, int(1))], vec![(1, int(1))]];
        let full = SparseMatrix::identity(2);
        assert!(homology_complement(&full, &cycles).is_empty());
        let none = SparseMatrix::zeros(2, 0);
        assert_eq!(homology_complement(&none, &cycles), cycles);
    }

    #[test]
    fn echelon_is_reduced() {
        let m = dense(&[&[0, 2, 4, 1], &[1, 1, 1, 1], &[1, 3, 5, 2]]);
        let e = echelon(&m);
        assert_eq!(e.pivots, vec![0, 1]);
        for (k, row) in e.rows.iter().enumerate() {
            assert_eq!(row[0], (e.pivots[k], int(1)));
            for (j, p) in e.pivots.iter().enumerate() {
                if j != k {
                    assert!(row.iter().all(|(c, _)| c != p));
                }
            }
        }
    }

    #[test]
    fn slice_enumeration() {
        let mut t = VariableTable::standard(&[1, 1]);
        let b = enumerate_basis(&t, 0, 2, 0).unwrap();
        assert_eq!(b.monomials.len(), 3);
        assert_eq!(b.monomials[0], Monomial::from_sorted(vec![(Var::coord(0, 0), 2)]));
        t.push(1, 2);
        t.push(1, 2);
        let b = enumerate_basis(&t, -1, 2, 1).unwrap();
        assert_eq!(b.monomials, vec![Monomial::var(Var::coord(1, 0)), Monomial::var(Var::coord(1, 1))]);
        let b = enumerate_basis(&t, 1, 1, 1).unwrap();
        assert!(b.is_empty());
        let b = enumerate_basis(&t, -2, 4, 1).unwrap();
        assert_eq!(b.len(), 1);
        let mut bad = VariableTable::standard(&[1]);
        bad.push(1, 0);
        assert!(enumerate_basis(&bad, 0, 1, 1).is_err());
    }
}
