//! Poisson structures on `S`, Poisson ideals and their obstruction tensors.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::algebra::{DerivativeSide, Monomial, Polynomial, Var, VariableTable};
use crate::error::{Error, Result};
use crate::linalg::{self, EchelonForm, SliceBasis, SparseMatrix, SparseVec};
use crate::scalar::{self, Scalar};

/// The bracket `{x_i, x_j} = Λ_ij` of internal degree `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    table: VariableTable,
    degree: i64,
    lambda: BTreeMap<(usize, usize), Polynomial>,
}

impl PoissonStructure {
    /// Builds the structure from entries `(i, j, Λ_ij)`; entries with `i > j`
    /// are stored as `(j, i, −Λ)`. Degrees and the level-0 restriction are
    /// checked; the Jacobi identity is not (see [`jacobi_check`]).
    pub fn new(
        table: &VariableTable,
        degree: i64,
        entries: impl IntoIterator<Item = (usize, usize, Polynomial)>,
    ) -> Result<PoissonStructure> {
        let table = table.base();
        let n = table.n_base();
        let mut lambda: BTreeMap<(usize, usize), Polynomial> = BTreeMap::new();
        for (i, j, value) in entries {
            if i >= n || j >= n {
                return Err(Error::Invalid(format!("bracket index ({i}, {j}) out of range")));
            }
            if !value.uses_only(|v| v.level() == 0 && !v.is_dual()) {
                return Err(Error::Invalid("bracket entries must lie in S".into()));
            }
            if i == j {
                if !value.is_zero() {
                    return Err(Error::Invalid(format!("{{x{0}, x{0}}} must vanish", i + 1)));
                }
                continue;
            }
            let expected = table.base_degrees()[i] + table.base_degrees()[j] + degree;
            if let Some(d) = value.internal_degree(&table) {
                if d != expected {
                    return Err(Error::Invalid(format!(
                        "{{{}, {}}} has degree {d}, expected {expected}",
                        table.name(Var::coord(0, i as u32)),
                        table.name(Var::coord(0, j as u32))
                    )));
                }
            } else if !value.is_zero() {
                return Err(Error::Invalid("bracket entries must be homogeneous".into()));
            }
            let (key, value) = if i < j { ((i, j), value) } else { ((j, i), -value) };
            let slot = lambda.entry(key).or_default();
            *slot += &value;
        }
        lambda.retain(|_, v| !v.is_zero());
        Ok(PoissonStructure { table, degree, lambda })
    }

    pub fn zero(table: &VariableTable, degree: i64) -> PoissonStructure {
        PoissonStructure { table: table.base(), degree, lambda: BTreeMap::new() }
    }

    pub fn table(&self) -> &VariableTable {
        &self.table
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.table.n_base()
    }

    /// `Λ_ij` for any ordered pair.
    pub fn lambda(&self, i: usize, j: usize) -> Polynomial {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.lambda.get(&(i, j)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => -self.lambda.get(&(j, i)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Equal => Polynomial::zero(),
        }
    }

    /// Nonzero entries with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Polynomial)> {
        self.lambda.iter()
    }

    pub fn x(&self, i: usize) -> Polynomial {
        Polynomial::var(Var::coord(0, i as u32))
    }

    /// `{a, b} = Σ Λ_ij ∂a/∂x_i ∂b/∂x_j` for `a, b ∈ S`.
    pub fn bracket(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
        for p in [a, b] {
            if !p.uses_only(|v| v.level() == 0 && !v.is_dual()) {
                return Err(Error::Invalid("bracket arguments must lie in S".into()));
            }
        }
        Ok(self.bracket_unchecked(a, b))
    }

    pub(crate) fn bracket_unchecked(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let da: Vec<Polynomial> = (0..self.n()).map(|i| self.partial(a, i)).collect();
        let db: Vec<Polynomial> = (0..self.n()).map(|i| self.partial(b, i)).collect();
        let mut out = Polynomial::zero();
        for (&(i, j), l) in &self.lambda {
            if !da[i].is_zero() && !db[j].is_zero() {
                out += &l.mul(&da[i]).mul(&db[j]);
            }
            if !da[j].is_zero() && !db[i].is_zero() {
                out -= &l.mul(&da[j]).mul(&db[i]);
            }
        }
        out
    }

    fn partial(&self, p: &Polynomial, i: usize) -> Polynomial {
        p.partial(Var::coord(0, i as u32), DerivativeSide::Left)
    }

    /// Hamiltonian-type bracket `{x_i, a}`.
    pub fn bracket_with_x(&self, i: usize, a: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for j in 0..self.n() {
            let l = self.lambda(i, j);
            if l.is_zero() {
                continue;
            }
            let d = self.partial(a, j);
            if !d.is_zero() {
                out += &l.mul(&d);
            }
        }
        out
    }
}

/// A triple with nonvanishing Jacobiator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiFailure {
    pub triple: (usize, usize, usize),
    pub jacobiator: Polynomial,
}

/// Σ_cyc {x_i, {x_j, x_k}} for all `i < j < k`; empty means Jacobi holds.
pub fn jacobi_check(p: &PoissonStructure) -> Vec<JacobiFailure> {
    let n = p.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut jac = p.bracket_with_x(i, &p.lambda(j, k));
                jac += &p.bracket_with_x(j, &p.lambda(k, i));
                jac += &p.bracket_with_x(k, &p.lambda(i, j));
                if !jac.is_zero() {
                    out.push(JacobiFailure { triple: (i, j, k), jacobiator: jac });
                }
            }
        }
    }
    out
}

/// Homogeneous generators `f_1, …, f_k` of an ideal contained in `𝔪`.
#[derive(Clone, Debug)]
pub struct IdealPresentation {
    table: VariableTable,
    generators: Vec<Polynomial>,
    degrees: Vec<i64>,
    slices: Arc<Mutex<HashMap<i64, Arc<IdealSlice>>>>,
}

impl PartialEq for IdealPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.generators == other.generators
    }
}

/// The degree-`d` part of the ideal: all products `m·f_ν` of degree `d`.
#[derive(Debug)]
pub struct IdealSlice {
    pub basis: SliceBasis,
    /// Column labels `(ν, m)` of `matrix`, ordered by `ν` then `m`.
    pub columns: Vec<(usize, Monomial)>,
    pub matrix: SparseMatrix,
    /// Reduced echelon form of the spanning vectors taken as rows.
    row_space: EchelonForm,
}

impl IdealSlice {
    pub fn dim(&self) -> usize {
        self.row_space.rank()
    }

    /// Canonical remainder of a coordinate vector modulo the ideal.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
        for (k, row) in self.row_space.rows.iter().enumerate() {
            let Some(c) = acc.get(&self.row_space.pivots[k]).cloned() else { continue };
            for (col, x) in row {
                let slot = acc.entry(*col).or_insert_with(Scalar::zero);
                *slot -= &c * x;
            }
            acc.retain(|_, x| !x.is_zero());
        }
        acc.into_iter().collect()
    }
}

impl IdealPresentation {
    pub fn new(table: &VariableTable, generators: Vec<Polynomial>) -> Result<IdealPresentation> {
        let table = table.base();
        let mut degrees = Vec::with_capacity(generators.len());
        for (mu, f) in generators.iter().enumerate() {
            if f.is_zero() {
                return Err(Error::Invalid(format!("generator f{} is zero", mu + 1)));
            }
            if !f.uses_only(|v| v.level() == 0 && !v.is_dual()) {
                return Err(Error::Invalid(format!("generator f{} must lie in S", mu + 1)));
            }
            let Some(d) = f.internal_degree(&table) else {
                return Err(Error::Invalid(format!("generator f{} is not homogeneous", mu + 1)));
            };
            if d < 1 || f.terms().any(|(m, _)| m.is_one()) {
                return Err(Error::Invalid(format!("generator f{} is not in the maximal ideal", mu + 1)));
            }
            degrees.push(d);
        }
        Ok(IdealPresentation { table, generators, degrees, slices: Arc::default() })
    }

    pub fn empty(table: &VariableTable) -> IdealPresentation {
        IdealPresentation::new(table, Vec::new()).expect("empty ideal")
    }

    pub fn table(&self) -> &VariableTable {
        &self.table
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// The linear algebra of the degree-`d` part, cached.
    pub fn slice(&self, d: i64) -> Arc<IdealSlice> {
        if let Some(s) = self.slices.lock().expect("cache lock").get(&d) {
            return s.clone();
        }
        let slice = Arc::new(self.build_slice(d));
        self.slices.lock().expect("cache lock").insert(d, slice.clone());
        slice
    }

    fn build_slice(&self, d: i64) -> IdealSlice {
        let basis = linalg::enumerate_basis(&self.table, 0, d, 0).expect("positive degrees");
        let mut columns = Vec::new();
        let mut cols = Vec::new();
        for (nu, f) in self.generators.iter().enumerate() {
            let e = d - self.degrees[nu];
            if e < 0 {
                continue;
            }
            let multipliers = linalg::enumerate_basis(&self.table, 0, e, 0).expect("positive degrees");
            for m in multipliers.monomials {
                let prod = Polynomial::term(m.clone(), Scalar::one()).mul(f);
                cols.push(basis.coordinates(&prod).expect("product stays in the slice"));
                columns.push((nu, m));
            }
        }
        let matrix = SparseMatrix::from_columns(basis.len(), cols);
        let row_space = linalg::echelon(&transpose(&matrix));
        IdealSlice { basis, columns, matrix, row_space }
    }

    /// Canonical normal form of a polynomial in `S` modulo the ideal.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let mut by_degree: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for (m, c) in p.terms() {
            by_degree.entry(m.internal_degree(&self.table)).or_default().add_term(m.clone(), c.clone());
        }
        let mut out = Polynomial::zero();
        for (d, part) in by_degree {
            if d < 1 || self.generators.is_empty() {
                out += &part;
                continue;
            }
            let slice = self.slice(d);
            let v = slice.basis.coordinates(&part).expect("degree slice");
            out += &slice.basis.polynomial(&slice.reduce(&v));
        }
        out
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }

    /// Writes a homogeneous `p ∈ I` as `Σ c_ν f_ν` with the canonical choice
    /// of coefficients; `None` if `p ∉ I`.
    pub fn express(&self, p: &Polynomial, d: i64) -> Option<Vec<Polynomial>> {
        let mut coeffs = vec![Polynomial::zero(); self.generators.len()];
        if p.is_zero() {
            return Some(coeffs);
        }
        let slice = self.slice(d);
        let v = slice.basis.coordinates(p).ok()?;
        let x = linalg::solve_preimage(&slice.matrix, &v).ok()??;
        for (k, c) in x {
            let (nu, m) = &slice.columns[k];
            coeffs[*nu].add_term(m.clone(), c);
        }
        Some(coeffs)
    }
}

pub(crate) fn transpose(m: &SparseMatrix) -> SparseMatrix {
    let mut cols: Vec<SparseVec> = vec![Vec::new(); m.nrows()];
    for c in 0..m.ncols() {
        for (r, v) in m.column(c) {
            cols[*r].push((c, v.clone()));
        }
    }
    SparseMatrix::from_columns(m.ncols(), cols)
}

/// `Z_{iμ}^ν` with `{x_i, f_μ} = Σ_ν Z_{iμ}^ν f_ν`; indices are zero-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZTensor {
    entries: BTreeMap<(usize, usize, usize), Polynomial>,
}

impl ZTensor {
    pub fn new(entries: impl IntoIterator<Item = ((usize, usize, usize), Polynomial)>) -> ZTensor {
        let mut z = ZTensor::default();
        for (k, v) in entries {
            z.add(k, &v);
        }
        z
    }

    fn add(&mut self, key: (usize, usize, usize), v: &Polynomial) {
        let slot = self.entries.entry(key).or_default();
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, i: usize, mu: usize, nu: usize) -> Polynomial {
        self.entries.get(&(i, mu, nu)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Polynomial)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `k×k` matrix `(Z_i)_μ^ν` for fixed `i`.
    pub fn matrix(&self, i: usize, k: usize) -> Vec<Vec<Polynomial>> {
        (0..k).map(|mu| (0..k).map(|nu| self.get(i, mu, nu)).collect()).collect()
    }

    /// Checks `Σ_ν Z_{iμ}^ν f_ν = {x_i, f_μ}` for every `(i, μ)`; returns the
    /// failing pairs.
    pub fn defect(&self, p: &PoissonStructure, ideal: &IdealPresentation) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..p.n() {
            for (mu, f) in ideal.generators().iter().enumerate() {
                let mut lhs = Polynomial::zero();
                for (nu, g) in ideal.generators().iter().enumerate() {
                    let z = self.get(i, mu, nu);
                    if !z.is_zero() {
                        lhs += &z.mul(g);
                    }
                }
                if lhs != p.bracket_with_x(i, f) {
                    bad.push((i, mu));
                }
            }
        }
        bad
    }
}

/// Canonical solution of `{x_i, f_μ} = Σ_ν Z_{iμ}^ν f_ν`.
pub fn solve_z(p: &PoissonStructure, ideal: &IdealPresentation) -> Result<ZTensor> {
    let mut z = ZTensor::default();
    for i in 0..p.n() {
        for (mu, f) in ideal.generators().iter().enumerate() {
            let target = p.bracket_with_x(i, f);
            if target.is_zero() {
                continue;
            }
            let d = p.table().base_degrees()[i] + ideal.degrees()[mu] + p.degree();
            let Some(coeffs) = ideal.express(&target, d) else {
                return Err(Error::NotPoissonIdeal { i: i + 1, mu: mu + 1 });
            };
            for (nu, c) in coeffs.into_iter().enumerate() {
                z.add((i, mu, nu), &c);
            }
        }
    }
    Ok(z)
}

pub fn casimir_check(p: &PoissonStructure, f: &Polynomial) -> bool {
    (0..p.n()).all(|i| p.bracket_with_x(i, f).is_zero())
}

pub fn poisson_ideal_check(p: &PoissonStructure, ideal: &IdealPresentation) -> bool {
    solve_z(p, ideal).is_ok()
}

/// `𝒜_{μν}^λ = Σ_i (∂f_μ/∂x_i Z_{iν}^λ + ∂f_ν/∂x_i Z_{iμ}^λ)`, indexed `[μ][ν][λ]`.
pub fn a_tensor(p: &PoissonStructure, ideal: &IdealPresentation, z: &ZTensor) -> Vec<Vec<Vec<Polynomial>>> {
    let k = ideal.len();
    let grads: Vec<Vec<Polynomial>> = ideal
        .generators()
        .iter()
        .map(|f| (0..p.n()).map(|i| f.partial(Var::coord(0, i as u32), DerivativeSide::Left)).collect())
        .collect();
    let mut out = vec![vec![vec![Polynomial::zero(); k]; k]; k];
    for mu in 0..k {
        for nu in mu..k {
            for lam in 0..k {
                let mut acc = Polynomial::zero();
                for i in 0..p.n() {
                    acc += &grads[mu][i].mul(&z.get(i, nu, lam));
                    acc += &grads[nu][i].mul(&z.get(i, mu, lam));
                }
                out[nu][mu][lam] = acc.clone();
                out[mu][nu][lam] = acc;
            }
        }
    }
    out
}

/// Matrices indexed by pairs `i < j` of coordinates.
pub type PairTensor = BTreeMap<(usize, usize), Vec<Vec<Polynomial>>>;

/// The two summands of the Maurer–Cartan residue: the coboundary part
/// `{x_i,Z_j} − {x_j,Z_i} − Σ_k ∂Λ_ij/∂x_k Z_k` and the commutator `[Z_i,Z_j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MCParts {
    pub delta: PairTensor,
    pub commutator: PairTensor,
}

pub fn mc_parts(p: &PoissonStructure, ideal: &IdealPresentation, z: &ZTensor) -> MCParts {
    let n = p.n();
    let k = ideal.len();
    let mut delta = PairTensor::new();
    let mut commutator = PairTensor::new();
    for i in 0..n {
        for j in i + 1..n {
            let lam = p.lambda(i, j);
            let dl: Vec<Polynomial> =
                (0..n).map(|l| lam.partial(Var::coord(0, l as u32), DerivativeSide::Left)).collect();
            let mut d = vec![vec![Polynomial::zero(); k]; k];
            let mut c = vec![vec![Polynomial::zero(); k]; k];
            for mu in 0..k {
                for nu in 0..k {
                    let mut acc = p.bracket_with_x(i, &z.get(j, mu, nu));
                    acc -= &p.bracket_with_x(j, &z.get(i, mu, nu));
                    for (l, dlam) in dl.iter().enumerate() {
                        if !dlam.is_zero() {
                            acc -= &dlam.mul(&z.get(l, mu, nu));
                        }
                    }
                    d[mu][nu] = acc;
                    let mut comm = Polynomial::zero();
                    for lam_ in 0..k {
                        comm += &z.get(i, mu, lam_).mul(&z.get(j, lam_, nu));
                        comm -= &z.get(j, mu, lam_).mul(&z.get(i, lam_, nu));
                    }
                    c[mu][nu] = comm;
                }
            }
            delta.insert((i, j), d);
            commutator.insert((i, j), c);
        }
    }
    MCParts { delta, commutator }
}

/// `M_ij = δ_Poiss Z(dx_i, dx_j) − [Z_i, Z_j]` for `i < j`.
pub fn mc_residue(p: &PoissonStructure, ideal: &IdealPresentation, z: &ZTensor) -> PairTensor {
    let parts = mc_parts(p, ideal, z);
    combine_pairs(&parts.delta, &scalar::int(1), &parts.commutator, &scalar::int(-1))
}

/// Entrywise reduction modulo the ideal.
pub fn mc_residue_mod_ideal(residue: &PairTensor, ideal: &IdealPresentation) -> PairTensor {
    residue
        .iter()
        .map(|(k, m)| (*k, m.iter().map(|row| row.iter().map(|e| ideal.reduce(e)).collect()).collect()))
        .collect()
}

/// Curvature of the connection `∇_t`: `t·δZ + t²·[Z,Z]`.
pub fn connection_curvature(p: &PoissonStructure, ideal: &IdealPresentation, z: &ZTensor, t: &Scalar) -> PairTensor {
    let parts = mc_parts(p, ideal, z);
    combine_pairs(&parts.delta, t, &parts.commutator, &(t * t))
}

fn combine_pairs(a: &PairTensor, s: &Scalar, b: &PairTensor, t: &Scalar) -> PairTensor {
    a.iter()
        .map(|(key, ma)| {
            let mb = &b[key];
            let m = ma
                .iter()
                .zip(mb)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| &x.scale(s) + &y.scale(t)).collect())
                .collect();
            (*key, m)
        })
        .collect()
}

pub fn pair_tensor_is_zero(t: &PairTensor) -> bool {
    t.values().all(|m| m.iter().all(|r| r.iter().all(Polynomial::is_zero)))
}

/// Multivectors on `S`: polynomials in `x_i` and the level-0 duals `ξ^i`.
pub type Multivector = Polynomial;

/// `X(dx_{a_1}, …, dx_{a_m})`: the coefficient of `ξ^{a_1}⋯ξ^{a_m}` read with
/// right derivatives.
pub fn evaluate_multivector(x: &Multivector, args: &[usize]) -> Polynomial {
    let mut acc = x.clone();
    for &a in args.iter().rev() {
        acc = acc.partial(Var::dual(0, a as u32), DerivativeSide::Right);
    }
    acc.filter(|m| !m.has_dual())
}

pub fn multivector_arity(x: &Multivector) -> Option<usize> {
    let mut it = x.terms().map(|(m, _)| m.factors().iter().filter(|(v, _)| v.is_dual()).count());
    let first = it.next()?;
    it.all(|a| a == first).then_some(first)
}

/// Builds `Σ_{a_0<…<a_m} c(a) ξ^{a_0}⋯ξ^{a_m}` from a component function.
fn assemble(n: usize, arity: usize, mut component: impl FnMut(&[usize]) -> Polynomial) -> Multivector {
    let mut out = Polynomial::zero();
    for combo in combinations(n, arity) {
        let c = component(&combo);
        if c.is_zero() {
            continue;
        }
        let word: Vec<(Var, u32)> = combo.iter().map(|&a| (Var::dual(0, a as u32), 1)).collect();
        let word = Polynomial::term(Monomial::from_sorted(word), Scalar::one());
        out += &c.mul(&word);
    }
    out
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The Poisson cohomology codifferential by the alternating-sum formula,
/// for multivectors of arity at most 3:
///
/// ```text
/// (δX)(α_0,…,α_m) = Σ_j (−1)^j ρ(α_j) X(…α̂_j…) + Σ_{k<l} (−1)^{k+l} X([α_k,α_l], …α̂_k…α̂_l…)
/// ```
///
/// with `ρ(dx_i) = {x_i, ·}` and `[dx_i, dx_j] = dΛ_ij`.
pub fn poisson_codifferential(p: &PoissonStructure, x: &Multivector) -> Result<Multivector> {
    if x.is_zero() {
        return Ok(Polynomial::zero());
    }
    let arity = multivector_arity(x).ok_or_else(|| Error::Invalid("multivector must have a single arity".into()))?;
    if arity > 3 {
        return Err(Error::Invalid("direct codifferential is implemented up to arity 3".into()));
    }
    if !x.uses_only(|v| v.level() == 0) {
        return Err(Error::Invalid("multivectors live on level 0".into()));
    }
    let n = p.n();
    let dl: BTreeMap<(usize, usize), Vec<Polynomial>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| {
            let l = p.lambda(i, j);
            ((i, j), (0..n).map(|k| l.partial(Var::coord(0, k as u32), DerivativeSide::Left)).collect())
        })
        .collect();
    Ok(assemble(n, arity + 1, |alpha| {
        let mut acc = Polynomial::zero();
        for j in 0..alpha.len() {
            let rest: Vec<usize> = alpha.iter().enumerate().filter(|(t, _)| *t != j).map(|(_, a)| *a).collect();
            let v = p.bracket_with_x(alpha[j], &evaluate_multivector(x, &rest));
            if j % 2 == 0 {
                acc += &v;
            } else {
                acc -= &v;
            }
        }
        for k in 0..alpha.len() {
            for l in k + 1..alpha.len() {
                let rest: Vec<usize> =
                    alpha.iter().enumerate().filter(|(t, _)| *t != k && *t != l).map(|(_, a)| *a).collect();
                let grad = &dl[&(alpha[k], alpha[l])];
                let mut v = Polynomial::zero();
                for (c, g) in grad.iter().enumerate() {
                    if g.is_zero() {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend(&rest);
                    v += &g.mul(&evaluate_multivector(x, &args));
                }
                if (k + l) % 2 == 0 {
                    acc += &v;
                } else {
                    acc -= &v;
                }
            }
        }
        acc
    }))
}

/// Outcome of the transition check for a change of generators `g = N·f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionReport {
    /// `(i, μ, ν)` where `Z ≢ −M·δN` modulo the ideal.
    pub via_n: Vec<(usize, usize, usize)>,
    /// `(i, μ, ν)` where `Z ≢ (δM)·N` modulo the ideal.
    pub via_m: Vec<(usize, usize, usize)>,
}

impl TransitionReport {
    pub fn passed(&self) -> bool {
        self.via_n.is_empty() && self.via_m.is_empty()
    }
}

/// Compares `Z` with the tensors induced by mutually inverse transition
/// matrices `N` (with `g = N·f` Casimir modulo `I`) and `M` (with `f = M·g`).
pub fn transition_z_check(
    p: &PoissonStructure,
    ideal: &IdealPresentation,
    z: &ZTensor,
    n_mat: &[Vec<Polynomial>],
    m_mat: &[Vec<Polynomial>],
) -> Result<TransitionReport> {
    let k = ideal.len();
    let square = |a: &[Vec<Polynomial>]| a.len() == k && a.iter().all(|r| r.len() == k);
    if !square(n_mat) || !square(m_mat) {
        return Err(Error::Dimension(format!("transition matrices must be {k}×{k}")));
    }
    let f = ideal.generators();
    for (alpha, row) in n_mat.iter().enumerate() {
        let mut g = Polynomial::zero();
        for (mu, c) in row.iter().enumerate() {
            g += &c.mul(&f[mu]);
        }
        if !g.is_zero() && g.internal_degree(p.table()).is_none() {
            return Err(Error::Precondition(format!("g{} is not homogeneous", alpha + 1)));
        }
        for i in 0..p.n() {
            if !ideal.contains(&p.bracket_with_x(i, &g)) {
                return Err(Error::Precondition(format!("g{} is not Casimir modulo I", alpha + 1)));
            }
        }
    }
    let prod = |a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]| -> Vec<Vec<Polynomial>> {
        (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| {
                        let mut acc = Polynomial::zero();
                        for t in 0..k {
                            acc += &a[r][t].mul(&b[t][c]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    for (a, b) in [(m_mat, n_mat), (n_mat, m_mat)] {
        let mn = prod(a, b);
        for (r, row) in mn.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                let target = if r == c { e - &Polynomial::one() } else { e.clone() };
                if !ideal.contains(&target) {
                    return Err(Error::Precondition("transition matrices are not inverse modulo I".into()));
                }
            }
        }
    }
    let mut report = TransitionReport { via_n: Vec::new(), via_m: Vec::new() };
    for i in 0..p.n() {
        let dn: Vec<Vec<Polynomial>> =
            n_mat.iter().map(|r| r.iter().map(|e| p.bracket_with_x(i, e)).collect()).collect();
        let dm: Vec<Vec<Polynomial>> =
            m_mat.iter().map(|r| r.iter().map(|e| p.bracket_with_x(i, e)).collect()).collect();
        let lhs_n = prod(m_mat, &dn);
        let lhs_m = prod(&dm, n_mat);
        for mu in 0..k {
            for nu in 0..k {
                let zi = z.get(i, mu, nu);
                if !ideal.contains(&(&zi + &lhs_n[mu][nu])) {
                    report.via_n.push((i, mu, nu));
                }
                if !ideal.contains(&(&zi - &lhs_m[mu][nu])) {
                    report.via_m.push((i, mu, nu));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    fn kleinian_a(n: i64) -> (VariableTable, PoissonStructure, IdealPresentation) {
        let t = VariableTable::new(&[("x1", 2), ("x2", n), ("x3", n)]).unwrap();
        let q = |s: &str| parse(s, &t).unwrap();
        let p = PoissonStructure::new(
            &t,
            -2,
            vec![
                (0, 1, q(&format!("-{n}*x2"))),
                (0, 2, q(&format!("{n}*x3"))),
                (1, 2, q(&format!("{}*x1^{}", n * n, n - 1))),
            ],
        )
        .unwrap();
        let i = IdealPresentation::new(&t, vec![q(&format!("x2*x3 - x1^{n}"))]).unwrap();
        (t, p, i)
    }

    #[test]
    fn kleinian_relation_is_casimir() {
        let (t, p, i) = kleinian_a(3);
        assert!(jacobi_check(&p).is_empty());
        assert!(casimir_check(&p, &i.generators()[0]));
        assert!(solve_z(&p, &i).unwrap().is_zero());
        let x2 = parse("x2", &t).unwrap();
        assert_eq!(p.bracket(&parse("x1", &t).unwrap(), &x2).unwrap(), parse("-3*x2", &t).unwrap());
    }

    #[test]
    fn broken_bracket_reports_jacobiator() {
        let t = VariableTable::standard(&[1, 1, 1]);
        let q = |s: &str| parse(s, &t).unwrap();
        let p = PoissonStructure::new(&t, -1, vec![(0, 1, q("x1")), (0, 2, q("x2"))]).unwrap();
        let report = jacobi_check(&p);
        assert_eq!(report.len(), 1);
        // {x1,{x2,x3}} + {x2,{x3,x1}} + {x3,{x1,x2}} = 0 + {x2,-x2} + {x3,x1} = -x2
        assert_eq!(report[0].jacobiator, q("-x2"));
    }

    #[test]
    fn monomial_ideal_z_and_residue() {
        let t = VariableTable::standard(&[1, 1]);
        let q = |s: &str| parse(s, &t).unwrap();
        let p = PoissonStructure::new(&t, 0, vec![(0, 1, q("x1*x2"))]).unwrap();
        let i = IdealPresentation::new(&t, vec![q("x1^2"), q("x1*x2")]).unwrap();
        let z = solve_z(&p, &i).unwrap();
        assert!(z.defect(&p, &i).is_empty());
        let paper = ZTensor::new([
            ((1, 0, 1), q("-2*x1")),
            ((0, 1, 1), q("x1")),
            ((1, 1, 1), q("-x2")),
        ]);
        assert!(paper.defect(&p, &i).is_empty());
        let a = a_tensor(&p, &i, &paper);
        assert!(a.iter().flatten().flatten().all(Polynomial::is_zero));
        assert!(pair_tensor_is_zero(&mc_residue(&p, &i, &paper)));
    }

    #[test]
    fn reduction_modulo_ideal() {
        let t = VariableTable::standard(&[1, 1]);
        let q = |s: &str| parse(s, &t).unwrap();
        let i = IdealPresentation::new(&t, vec![q("x1^2"), q("x1*x2")]).unwrap();
        assert!(i.contains(&q("x1^3 - 2*x1*x2^2")));
        assert_eq!(i.reduce(&q("x1^2 + x2^2 + x1")), q("x2^2 + x1"));
        assert!(!i.contains(&q("x2^3")));
    }

    #[test]
    fn codifferential_of_vector_field_matches_coboundary_formula() {
        let t = VariableTable::standard(&[1, 1, 1]);
        let q = |s: &str| parse(s, &t).unwrap();
        let p = PoissonStructure::new(&t, -1, vec![(0, 1, q("x3")), (1, 2, q("x1")), (2, 0, q("x2"))]).unwrap();
        let x = q("x1^2*@x1 + x2*x3*@x2 - x1*@x3");
        let dx = poisson_codifferential(&p, &x).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let xi = evaluate_multivector(&x, &[i]);
            let xj = evaluate_multivector(&x, &[j]);
            let mut expected = &p.bracket_with_x(i, &xj) - &p.bracket_with_x(j, &xi);
            let lam = p.lambda(i, j);
            for k in 0..3 {
                let g = lam.partial(Var::coord(0, k), DerivativeSide::Left);
                expected -= &g.mul(&evaluate_multivector(&x, &[k as usize]));
            }
            assert_eq!(evaluate_multivector(&dx, &[i, j]), expected);
        }
        let ddx = poisson_codifferential(&p, &dx).unwrap();
        assert!(ddx.is_zero());
    }
}
