//! Problem documents and built-in example families.
//!
//! A [`ProblemInput`] is the JSON shape read by the command line tool. The
//! constructors in this module emit typed [`Problem`]s for the graded Poisson
//! algebras used throughout the test suites; each can be turned back into a
//! document with [`Problem::to_input`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse, serialize, DerivativeSide, Monomial, Polynomial, Var, VariableTable};
use crate::error::{Error, Result};
use crate::poisson::{jacobi_check, solve_z, IdealPresentation, PoissonStructure, ZTensor};
use crate::resolvent::TruncationParams;
use crate::scalar::{int, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub degree: i64,
}

/// One bracket entry `{x_i, x_j} = value`, indices 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub i: usize,
    pub j: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketSpec {
    pub degree: i64,
    pub entries: Vec<EntrySpec>,
}

/// One component `Z_{iμ}^ν`, indices 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZEntrySpec {
    pub i: usize,
    pub mu: usize,
    pub nu: usize,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub koszul: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<i64>,
}

/// The on-disk problem document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInput {
    pub variables: Vec<VariableSpec>,
    pub bracket: BracketSpec,
    #[serde(default)]
    pub ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<ZEntrySpec>>,
    #[serde(default)]
    pub options: ProblemOptions,
}

impl ProblemInput {
    pub fn from_json(text: &str) -> Result<ProblemInput> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem documents serialize")
    }
}

/// A parsed problem: bracket, ideal, optional explicit `Z` and options.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub poisson: PoissonStructure,
    pub ideal: IdealPresentation,
    pub z: Option<ZTensor>,
    pub options: ProblemOptions,
}

impl Problem {
    pub fn from_input(input: &ProblemInput) -> Result<Problem> {
        let vars: Vec<(&str, i64)> = input.variables.iter().map(|v| (v.name.as_str(), v.degree)).collect();
        let table = VariableTable::new(&vars)?;
        let n = table.n_base();
        let index = |k: usize, what: &str, bound: usize| {
            if k == 0 || k > bound {
                Err(Error::Invalid(format!("{what} index {k} out of range 1..={bound}")))
            } else {
                Ok(k - 1)
            }
        };
        let mut entries = Vec::new();
        for e in &input.bracket.entries {
            entries.push((index(e.i, "bracket", n)?, index(e.j, "bracket", n)?, parse(&e.value, &table)?));
        }
        let poisson = PoissonStructure::new(&table, input.bracket.degree, entries)?;
        let generators = input.ideal.iter().map(|f| parse(f, &table)).collect::<Result<Vec<_>>>()?;
        let ideal = IdealPresentation::new(&table, generators)?;
        let z = match &input.z {
            None => None,
            Some(list) => {
                let k = ideal.len();
                let mut entries = Vec::new();
                for e in list {
                    let key = (index(e.i, "z", n)?, index(e.mu, "z", k)?, index(e.nu, "z", k)?);
                    entries.push((key, parse(&e.value, &table)?));
                }
                Some(ZTensor::new(entries))
            }
        };
        Ok(Problem {
            name: input.options.name.clone().unwrap_or_else(|| "problem".into()),
            poisson,
            ideal,
            z,
            options: input.options.clone(),
        })
    }

    pub fn to_input(&self) -> ProblemInput {
        let t = self.table();
        let variables = (0..t.n_base())
            .map(|i| {
                let v = Var::coord(0, i as u32);
                VariableSpec { name: t.name(v), degree: t.internal_degree(v) }
            })
            .collect();
        let entries = self
            .poisson
            .entries()
            .map(|(&(i, j), v)| EntrySpec { i: i + 1, j: j + 1, value: serialize(v, t) })
            .collect();
        let z = self.z.as_ref().map(|z| {
            z.entries()
                .map(|(&(i, mu, nu), v)| ZEntrySpec { i: i + 1, mu: mu + 1, nu: nu + 1, value: serialize(v, t) })
                .collect()
        });
        let mut options = self.options.clone();
        options.name = Some(self.name.clone());
        ProblemInput {
            variables,
            bracket: BracketSpec { degree: self.poisson.degree(), entries },
            ideal: self.ideal.generators().iter().map(|f| serialize(f, t)).collect(),
            z,
            options,
        }
    }

    pub fn table(&self) -> &VariableTable {
        self.poisson.table()
    }

    /// The explicit `Z` if one was supplied, otherwise the canonical solution.
    pub fn z_tensor(&self) -> Result<ZTensor> {
        match &self.z {
            Some(z) => Ok(z.clone()),
            None => solve_z(&self.poisson, &self.ideal),
        }
    }

    /// Truncation from the problem options, overridden by the arguments.
    pub fn truncation(&self, max_level: Option<u32>, max_degree: Option<i64>) -> TruncationParams {
        let top = self.ideal.degrees().iter().copied().max().unwrap_or(0);
        let level = max_level.or(self.options.max_level).unwrap_or(4);
        let degree = max_degree.or(self.options.max_degree).unwrap_or(top * (level as i64 + 1));
        TruncationParams::new(level, degree)
    }

    fn with(mut self, max_level: u32, max_degree: i64) -> Problem {
        self.options.max_level = Some(max_level);
        self.options.max_degree = Some(max_degree);
        self
    }
}

fn named(name: &str) -> ProblemOptions {
    ProblemOptions { name: Some(name.into()), ..ProblemOptions::default() }
}

fn p(table: &VariableTable, text: &str) -> Polynomial {
    parse(text, table).unwrap_or_else(|e| panic!("built-in polynomial `{text}`: {e}"))
}

fn build(
    name: &str,
    table: &VariableTable,
    degree: i64,
    entries: &[(usize, usize, &str)],
    ideal: &[&str],
) -> Result<Problem> {
    let poisson = PoissonStructure::new(table, degree, entries.iter().map(|&(i, j, v)| (i - 1, j - 1, p(table, v))))?;
    let ideal = IdealPresentation::new(table, ideal.iter().map(|f| p(table, f)).collect())?;
    Ok(Problem { name: name.into(), poisson, ideal, z: None, options: named(name) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kleinian {
    A,
    D,
    E6,
    E7,
    E8,
}

/// Kleinian singularity with its bracket table. `param` is the `N` of the
/// `A` and `D` families and is ignored for the exceptional types.
pub fn kleinian(kind: Kleinian, param: u32) -> Result<Problem> {
    let n = param as i64;
    let deg = |d: [i64; 3]| VariableTable::standard(&d);
    let (name, table, entries, relation) = match kind {
        Kleinian::A => {
            if param < 2 {
                return Err(Error::Invalid("type A needs N ≥ 2".into()));
            }
            let t = deg([2, n, n]);
            let e = vec![
                (1, 2, format!("-{n}*x2")),
                (1, 3, format!("{n}*x3")),
                (2, 3, format!("{}*x1^{}", n * n, n - 1)),
            ];
            (format!("kleinian-A{n}"), t, e, format!("x2*x3 - x1^{n}"))
        }
        Kleinian::D => {
            if param < 2 {
                return Err(Error::Invalid("type D needs N ≥ 2".into()));
            }
            let t = deg([4, 2 * n, 2 * n + 2]);
            let e = vec![
                (1, 2, format!("-{}*x3", 4 * n)),
                (1, 3, format!("-{}*x1*x2", 4 * n)),
                (2, 3, format!("{}*x2^2 - {}*x1^{n}", 2 * n, 4 * n * (2 * n + 2))),
            ];
            (format!("kleinian-D{n}"), t, e, format!("x1*x2^2 - x3^2 - 4*x1^{}", n + 1))
        }
        Kleinian::E6 => {
            let e = vec![(1, 2, "-8*x3".into()), (1, 3, "-12*x2^2".into()), (2, 3, "-1728*x1^3".into())];
            ("kleinian-E6".into(), deg([6, 8, 12]), e, "x3^2 - x2^3 + 108*x1^4".into())
        }
        Kleinian::E7 => {
            let e = vec![(1, 2, "16*x3".into()), (1, 3, "8*x1^3 - 2592*x2^2".into()), (2, 3, "-24*x1^2*x2".into())];
            ("kleinian-E7".into(), deg([8, 12, 18]), e, "x1^3*x2 - x3^2 - 108*x2^3".into())
        }
        Kleinian::E8 => {
            let e = vec![(1, 2, "20*x3".into()), (1, 3, "-30*x2^2".into()), (2, 3, "-86400*x1^4".into())];
            ("kleinian-E8".into(), deg([12, 20, 30]), e, "x2^3 + x3^2 - 1728*x1^5".into())
        }
    };
    let entries: Vec<(usize, usize, &str)> = entries.iter().map(|(i, j, v)| (*i, *j, v.as_str())).collect();
    let top = relation_degree(&table, &relation);
    Ok(build(&name, &table, -2, &entries, &[&relation])?.with(3, 2 * top))
}

fn relation_degree(table: &VariableTable, f: &str) -> i64 {
    p(table, f).internal_degree(table).unwrap_or(0)
}

fn monomial(exponents: &[u32]) -> Polynomial {
    let factors = exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| (Var::coord(0, i as u32), e))
        .collect();
    Polynomial::term(Monomial::from_sorted(factors), int(1))
}

fn x(i: usize) -> Polynomial {
    Polynomial::var(Var::coord(0, i as u32))
}

fn check_antisymmetric(c: &[Vec<i64>]) -> Result<()> {
    let n = c.len();
    for (i, row) in c.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!("row {} of c has length {}", i + 1, row.len())));
        }
        for j in 0..n {
            if row[j] != -c[j][i] {
                return Err(Error::Invalid(format!("c is not antisymmetric at ({}, {})", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

fn monomial_ideal(table: &VariableTable, exponents: &[Vec<u32>]) -> Result<IdealPresentation> {
    let n = table.n_base();
    if let Some(m) = exponents.iter().find(|m| m.len() != n) {
        return Err(Error::Dimension(format!("exponent vector of length {} for {n} variables", m.len())));
    }
    IdealPresentation::new(table, exponents.iter().map(|m| monomial(m)).collect())
}

/// `Λ_ij = c_ij x_i x_j` on `k[x_1..x_n]` in degree one, with a monomial
/// ideal and the closed-form diagonal `Z_{iμ}^μ = (e_i, m_μ) x_i`.
pub fn diagonal_monomial(c: &[Vec<i64>], exponents: &[Vec<u32>]) -> Result<Problem> {
    check_antisymmetric(c)?;
    let n = c.len();
    let table = VariableTable::standard(&vec![1; n]);
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if c[i][j] != 0 {
                entries.push((i, j, x(i).mul(&x(j)).scale(&int(c[i][j]))));
            }
        }
    }
    let poisson = PoissonStructure::new(&table, 0, entries)?;
    let ideal = monomial_ideal(&table, exponents)?;
    let z = diagonal_z(n, exponents, |i, m| x(i).scale(&int((0..n).map(|j| c[i][j] * m[j] as i64).sum())));
    let koszul = exponents.iter().all(|m| m.iter().sum::<u32>() == 2);
    let top = ideal.degrees().iter().copied().max().unwrap_or(1);
    let options = ProblemOptions { koszul: Some(koszul), max_level: Some(4), max_degree: Some(top + 4), ..named("diagonal") };
    Ok(Problem { name: "diagonal".into(), poisson, ideal, z: Some(z), options })
}

fn diagonal_z(n: usize, exponents: &[Vec<u32>], weight: impl Fn(usize, &[u32]) -> Polynomial) -> ZTensor {
    let mut entries = Vec::new();
    for i in 0..n {
        for (mu, m) in exponents.iter().enumerate() {
            entries.push(((i, mu, mu), weight(i, m)));
        }
    }
    ZTensor::new(entries)
}

/// The closed form `𝒜_{μν}^λ = (m_μ, m_ν)(f_μ δ_ν^λ − f_ν δ_μ^λ)` of a
/// diagonal bracket, with `(a, b) = Σ c_ij a_i b_j`.
pub fn diagonal_a_closed_form(c: &[Vec<i64>], exponents: &[Vec<u32>]) -> Vec<Vec<Vec<Polynomial>>> {
    let k = exponents.len();
    let n = c.len();
    let pairing = |a: &[u32], b: &[u32]| -> i64 {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| c[i][j] * a[i] as i64 * b[j] as i64).sum()
    };
    let mut a = vec![vec![vec![Polynomial::zero(); k]; k]; k];
    for mu in 0..k {
        for nu in 0..k {
            let w = int(pairing(&exponents[mu], &exponents[nu]));
            a[mu][nu][nu] += &monomial(&exponents[mu]).scale(&w);
            a[mu][nu][mu] -= &monomial(&exponents[nu]).scale(&w);
        }
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Volterra {
    Deg0,
    Deg1,
}

/// Volterra lattice brackets on `k[x_1..x_n]` with a monomial ideal and the
/// closed-form diagonal `Z`.
pub fn volterra(n: usize, flavor: Volterra, exponents: &[Vec<u32>]) -> Result<Problem> {
    if n < 2 {
        return Err(Error::Invalid("the Volterra lattice needs n ≥ 2".into()));
    }
    let table = VariableTable::standard(&vec![1; n]);
    let mut entries = Vec::new();
    for i in 0..n - 1 {
        let prod = x(i).mul(&x(i + 1));
        match flavor {
            Volterra::Deg0 => entries.push((i, i + 1, prod)),
            Volterra::Deg1 => {
                entries.push((i, i + 1, prod.mul(&(&x(i) + &x(i + 1)))));
                if i + 2 < n {
                    entries.push((i, i + 2, prod.mul(&x(i + 2))));
                }
            }
        }
    }
    let degree = match flavor {
        Volterra::Deg0 => 0,
        Volterra::Deg1 => 1,
    };
    let poisson = PoissonStructure::new(&table, degree, entries)?;
    let ideal = monomial_ideal(&table, exponents)?;
    let e = |m: &[u32], j: isize| -> i64 {
        if j < 0 || j as usize >= n {
            0
        } else {
            m[j as usize] as i64
        }
    };
    let z = diagonal_z(n, exponents, |i, m| {
        let i_ = i as isize;
        let xi = |d: isize| if i_ + d < 0 || (i_ + d) as usize >= n { Polynomial::zero() } else { x((i_ + d) as usize) };
        match flavor {
            Volterra::Deg0 => {
                let w = e(m, i_ + 1) - e(m, i_ - 1);
                x(i).scale(&int(w))
            }
            Volterra::Deg1 => {
                let mut z = x(i).mul(&xi(1)).scale(&int(e(m, i_ + 1) + e(m, i_ + 2)));
                z -= &x(i).mul(&xi(-1)).scale(&int(e(m, i_ - 1) + e(m, i_ - 2)));
                z += &x(i).mul(&x(i)).scale(&int(e(m, i_ + 1) - e(m, i_ - 1)));
                z
            }
        }
    });
    let name = match flavor {
        Volterra::Deg0 => "volterra-deg0",
        Volterra::Deg1 => "volterra-deg1",
    };
    let top = ideal.degrees().iter().copied().max().unwrap_or(1);
    let options = ProblemOptions { max_level: Some(4), max_degree: Some(top + 4), ..named(name) };
    Ok(Problem { name: name.into(), poisson, ideal, z: Some(z), options })
}

fn apply_derivation(coeffs: &[Polynomial], f: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero();
    for (l, a) in coeffs.iter().enumerate() {
        if !a.is_zero() {
            out += &a.mul(&f.partial(Var::coord(0, l as u32), DerivativeSide::Left));
        }
    }
    out
}

fn determinant(m: &[Vec<Polynomial>]) -> Polynomial {
    match m.len() {
        0 => Polynomial::one(),
        1 => m[0][0].clone(),
        n => {
            let mut out = Polynomial::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, v)| v.clone()).collect()).collect();
                let term = m[0][col].mul(&determinant(&minor));
                if col % 2 == 0 {
                    out += &term;
                } else {
                    out -= &term;
                }
            }
            out
        }
    }
}

fn times_laurent(p: &Polynomial, g: &[i64]) -> Option<Polynomial> {
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        let mut factors = Vec::new();
        for (i, &gi) in g.iter().enumerate() {
            let e = m.exponent(Var::coord(0, i as u32)) as i64 + gi;
            if e < 0 {
                return None;
            }
            if e > 0 {
                factors.push((Var::coord(0, i as u32), e as u32));
            }
        }
        out.add_term(Monomial::from_sorted(factors), c.clone());
    }
    Some(out)
}

fn derivation_degree(table: &VariableTable, coeffs: &[Polynomial]) -> Result<i64> {
    let mut degree = None;
    for (l, a) in coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let d = a
            .internal_degree(table)
            .ok_or_else(|| Error::Invalid("derivation coefficients must be homogeneous".into()))?
            - table.base_degrees()[l];
        if degree.replace(d).is_some_and(|old| old != d) {
            return Err(Error::Invalid("derivation is not homogeneous".into()));
        }
    }
    degree.ok_or_else(|| Error::Invalid("zero derivation".into()))
}

/// Determinantal bracket `Λ_ij = g·Det(X^ν(f_μ) | X^ν(x_i) | X^ν(x_j))` for
/// `k` functions and `k+2` pairwise commuting derivations `X^ν = Σ_l a_l ∂_l`
/// given by their coefficient vectors. `g` is a Laurent monomial given by its
/// exponents; every entry must come out polynomial.
pub fn determinantal(
    table: &VariableTable,
    fs: &[Polynomial],
    derivations: &[Vec<Polynomial>],
    g: &[i64],
) -> Result<Problem> {
    let table = table.base();
    let n = table.n_base();
    let k = fs.len();
    if derivations.len() != k + 2 {
        return Err(Error::Dimension(format!("{k} functions need {} derivations, got {}", k + 2, derivations.len())));
    }
    if g.len() != n || derivations.iter().any(|d| d.len() != n) {
        return Err(Error::Dimension(format!("expected vectors of length {n}")));
    }
    for (a, x) in derivations.iter().enumerate() {
        for y in &derivations[a + 1..] {
            let commutes = (0..n).all(|l| apply_derivation(x, &y[l]) == apply_derivation(y, &x[l]));
            if !commutes {
                return Err(Error::Invalid("derivations do not commute pairwise".into()));
            }
        }
    }
    let mut degree: i64 = g.iter().zip(table.base_degrees()).map(|(e, d)| e * d).sum();
    for f in fs {
        degree += f.internal_degree(&table).ok_or_else(|| Error::Invalid("functions must be homogeneous".into()))?;
    }
    for d in derivations {
        degree += derivation_degree(&table, d)?;
    }
    let head: Vec<Vec<Polynomial>> = fs.iter().map(|f| derivations.iter().map(|d| apply_derivation(d, f)).collect()).collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = head.clone();
            m.push(derivations.iter().map(|d| d[i].clone()).collect());
            m.push(derivations.iter().map(|d| d[j].clone()).collect());
            let value = times_laurent(&determinant(&m), g)
                .ok_or_else(|| Error::Invalid(format!("Λ_{}{} is not polynomial", i + 1, j + 1)))?;
            entries.push((i, j, value));
        }
    }
    let poisson = PoissonStructure::new(&table, degree, entries)?;
    let ideal = IdealPresentation::new(&table, fs.to_vec())?;
    Ok(Problem { name: "determinantal".into(), poisson, ideal, z: None, options: named("determinantal") })
}

/// Coordinate derivations `∂/∂x_1, …, ∂/∂x_n`.
pub fn coordinate_derivations(n: usize) -> Vec<Vec<Polynomial>> {
    (0..n).map(|a| (0..n).map(|l| if a == l { Polynomial::one() } else { Polynomial::zero() }).collect()).collect()
}

/// Linear bracket `{x_i, x_j} = Σ_k c_ij^k x_k` from `(i, j, k, c)` with
/// 1-based indices; all variables have degree 1.
pub fn linear_poisson(n: usize, constants: &[(usize, usize, usize, Scalar)]) -> Result<PoissonStructure> {
    let table = VariableTable::standard(&vec![1; n]);
    let mut lambda: BTreeMap<(usize, usize), Polynomial> = BTreeMap::new();
    for (i, j, k, c) in constants {
        if [*i, *j, *k].iter().any(|&a| a == 0 || a > n) {
            return Err(Error::Invalid(format!("structure constant index ({i}, {j}, {k}) out of range")));
        }
        *lambda.entry((i - 1, j - 1)).or_default() += &x(k - 1).scale(c);
    }
    let mut upper: BTreeMap<(usize, usize), Polynomial> = BTreeMap::new();
    for (&(i, j), v) in &lambda {
        let mirror = lambda.get(&(j, i));
        let consistent = if i == j { v.is_zero() } else { mirror.is_none_or(|w| w == &-v.clone()) };
        if !consistent {
            return Err(Error::Invalid(format!("structure constants are not antisymmetric at ({}, {})", i + 1, j + 1)));
        }
        if i < j {
            upper.insert((i, j), v.clone());
        } else if i > j {
            upper.entry((j, i)).or_insert_with(|| -v.clone());
        }
    }
    let p = PoissonStructure::new(&table, -1, upper.into_iter().map(|((i, j), v)| (i, j, v)))?;
    if !jacobi_check(&p).is_empty() {
        return Err(Error::Invalid("structure constants fail the Jacobi identity".into()));
    }
    Ok(p)
}

/// Harmonic polynomials of degree two in the `so₃` coadjoint representation.
pub fn so3_harmonic2() -> Result<Problem> {
    let consts = [(1, 2, 3, int(1)), (2, 3, 1, int(1)), (3, 1, 2, int(1))];
    let poisson = linear_poisson(3, &consts)?;
    let t = poisson.table().clone();
    let gens = ["x1*x2", "x1*x3", "x2*x3", "x1^2 - x2^2", "x1^2 - x3^2"];
    let ideal = IdealPresentation::new(&t, gens.iter().map(|f| p(&t, f)).collect())?;
    let options = ProblemOptions { max_level: Some(3), max_degree: Some(6), ..named("so3-harmonic2") };
    Ok(Problem { name: "so3-harmonic2".into(), poisson, ideal, z: None, options })
}

/// The nine `2×2` minors of a generic `3×3` matrix under the `gl₃` bracket.
pub fn gl3_minors2() -> Result<Problem> {
    let mut vars = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            vars.push((format!("x{i}{j}"), 1));
        }
    }
    let t = VariableTable::new(&vars)?;
    let idx = |i: usize, j: usize| 3 * (i - 1) + (j - 1);
    let mut entries = Vec::new();
    for (i, j, k, l) in itertools4() {
        let (a, b) = (idx(i, j), idx(k, l));
        if a >= b {
            continue;
        }
        let mut v = Polynomial::zero();
        if j == k {
            v += &x(idx(i, l));
        }
        if l == i {
            v -= &x(idx(k, j));
        }
        entries.push((a, b, v));
    }
    let poisson = PoissonStructure::new(&t, -1, entries)?;
    let mut gens = Vec::new();
    for r in 1..=3 {
        for c in 1..=3 {
            let rows: Vec<usize> = (1..=3).filter(|&a| a != r).collect();
            let cols: Vec<usize> = (1..=3).filter(|&a| a != c).collect();
            gens.push(
                &x(idx(rows[0], cols[0])).mul(&x(idx(rows[1], cols[1])))
                    - &x(idx(rows[0], cols[1])).mul(&x(idx(rows[1], cols[0]))),
            );
        }
    }
    let ideal = IdealPresentation::new(&t, gens)?;
    let options = ProblemOptions { koszul: Some(true), max_level: Some(2), max_degree: Some(4), ..named("gl3-minors2") };
    Ok(Problem { name: "gl3-minors2".into(), poisson, ideal, z: None, options })
}

fn itertools4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (1..=3).flat_map(|i| (1..=3).flat_map(move |j| (1..=3).flat_map(move |k| (1..=3).map(move |l| (i, j, k, l)))))
}

const CIRCLE_BRACKET: &[(usize, usize, &str)] = &[
    (1, 3, "-x3"),
    (1, 4, "x4"),
    (1, 7, "-x7"),
    (1, 8, "x8"),
    (2, 5, "-x5"),
    (2, 6, "x6"),
    (2, 7, "x7"),
    (2, 8, "-x8"),
    (3, 4, "2*x1 + x2"),
    (3, 6, "x7"),
    (3, 8, "x5"),
    (4, 5, "-x8"),
    (4, 7, "-x6"),
    (5, 6, "x1 + 2*x2"),
    (5, 7, "x3"),
    (6, 8, "-x4"),
    (7, 8, "-x1 + x2"),
];

const CIRCLE_IDEAL: &[&str] = &[
    "x3*x6 - x1*x7 - x2*x7",
    "x1*x6 - x4*x7",
    "x4*x5 - x1*x8 - x2*x8",
    "x1*x5 - x3*x8",
    "x2*x4 - x6*x8",
    "x2*x3 - x5*x7",
    "x2^2 - x5*x6 + x7*x8",
    "x1*x2 - x7*x8",
    "x1^2 - x3*x4 + x7*x8",
];

/// `(i, μ, [(ν, c)])`, 1-based.
type ZRow = (usize, usize, &'static [(usize, i64)]);

/// `{x_i, f_μ} = Σ c f_ν`.
const CIRCLE_Z: &[ZRow] = &[
    (1, 1, &[(1, -1)]),
    (1, 3, &[(3, 1)]),
    (1, 5, &[(5, 1)]),
    (1, 6, &[(6, -1)]),
    (2, 1, &[(1, 1)]),
    (2, 2, &[(2, 1)]),
    (2, 3, &[(3, -1)]),
    (2, 4, &[(4, -1)]),
    (3, 2, &[(1, 1)]),
    (3, 3, &[(4, 1)]),
    (3, 5, &[(7, 1), (8, 2)]),
    (3, 8, &[(6, 1)]),
    (3, 9, &[(6, -1)]),
    (4, 1, &[(2, -1)]),
    (4, 4, &[(3, -1)]),
    (4, 6, &[(7, -1), (8, -2)]),
    (4, 8, &[(5, -1)]),
    (4, 9, &[(5, 1)]),
    (5, 1, &[(6, 1)]),
    (5, 2, &[(8, 2), (9, 1)]),
    (5, 5, &[(3, 1)]),
    (5, 7, &[(4, -1)]),
    (5, 8, &[(4, 1)]),
    (6, 3, &[(5, -1)]),
    (6, 4, &[(8, -2), (9, -1)]),
    (6, 6, &[(1, -1)]),
    (6, 7, &[(2, 1)]),
    (6, 8, &[(2, -1)]),
    (7, 3, &[(7, -1), (9, 1)]),
    (7, 4, &[(6, -1)]),
    (7, 5, &[(2, 1)]),
    (7, 7, &[(1, 1)]),
    (7, 9, &[(1, -1)]),
    (8, 1, &[(7, 1), (9, -1)]),
    (8, 2, &[(5, 1)]),
    (8, 6, &[(4, -1)]),
    (8, 7, &[(3, -1)]),
    (8, 9, &[(3, 1)]),
];

/// The symplectic circle quotient with weights `(−1, 1, 1)`, with its
/// bracket table, nine quadrics and constant `Z`.
pub fn circle_m111() -> Result<Problem> {
    let t = VariableTable::standard(&[2; 8]);
    let mut problem = build("circle-m111", &t, -2, CIRCLE_BRACKET, CIRCLE_IDEAL)?;
    let entries = CIRCLE_Z
        .iter()
        .flat_map(|&(i, mu, row)| row.iter().map(move |&(nu, c)| ((i - 1, mu - 1, nu - 1), Polynomial::constant(int(c)))));
    problem.z = Some(ZTensor::new(entries));
    Ok(problem.with(2, 8))
}

/// Angular momentum reduction of two particles in three dimensions: ten
/// quadratic invariants and eleven relations.
pub fn angular_momentum() -> Result<Problem> {
    // Inner products ⟨u, v⟩ of q1, q2, p1, p2 in the order of the variables.
    const PAIRS: [(usize, usize); 10] = [(0, 0), (0, 1), (1, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];
    // ω(q_m, p_l) = δ_ml, with q1, q2, p1, p2 numbered 0..4.
    let omega = |a: usize, b: usize| -> i64 {
        match (a, b) {
            (0, 2) | (1, 3) => 1,
            (2, 0) | (3, 1) => -1,
            _ => 0,
        }
    };
    let inner = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        x(PAIRS.iter().position(|&q| q == key).expect("all pairs are listed"))
    };
    let t = VariableTable::standard(&[2; 10]);
    let mut entries = Vec::new();
    for (i, &(u, v)) in PAIRS.iter().enumerate() {
        for (j, &(w, z)) in PAIRS.iter().enumerate().skip(i + 1) {
            let mut value = Polynomial::zero();
            for (c, a, b) in [(omega(u, w), v, z), (omega(u, z), v, w), (omega(v, w), u, z), (omega(v, z), u, w)] {
                if c != 0 {
                    value += &inner(a, b).scale(&int(c));
                }
            }
            entries.push((i, j, value));
        }
    }
    let poisson = PoissonStructure::new(&t, -2, entries)?;
    let gens = [
        "-x4*x9 + x5*x8 - x6*x10 + x7*x9",
        "-x2*x9 - x3*x10 + x5*x6 + x7*x7",
        "-x2*x8 - x3*x9 + x4*x6 + x6*x7",
        "-x1*x9 - x2*x10 + x4*x5 + x5*x7",
        "-x1*x8 + x3*x10 + x4*x4 - x7*x7",
        "-x1*x6 + x2*x4 - x2*x7 + x3*x5",
        "-x3*x8*x10 + x3*x9*x9 + x6*x6*x10 - 2*x6*x7*x9 + x7*x7*x8",
        "x2*x6*x10 - 2*x2*x7*x9 - x3*x4*x10 + x3*x5*x9 - x3*x7*x10 + x4*x7*x7 + x7*x7*x7",
        "x1*x6*x6 - x2*x2*x8 - 2*x2*x3*x9 + 2*x2*x6*x7 - x3*x3*x10 + x3*x7*x7",
        "-x1*x3*x10 + x1*x7*x7 + x2*x2*x10 - 2*x2*x5*x7 + x3*x5*x5",
        "x1*x3*x6*x10 - x1*x6*x7*x7 - x2*x2*x6*x10 + 2*x2*x2*x7*x9 - x2*x3*x5*x9 \
         + 2*x2*x3*x7*x10 - 2*x2*x7*x7*x7 - x3*x3*x5*x10 + x3*x5*x7*x7",
    ];
    let ideal = IdealPresentation::new(&t, gens.iter().map(|f| p(&t, f)).collect())?;
    let options = ProblemOptions { max_level: Some(2), max_degree: Some(10), ..named("angular-momentum") };
    Ok(Problem { name: "angular-momentum".into(), poisson, ideal, z: None, options })
}

/// `{x1, x2} = x1 x2 (x1 + x2)` with `I = (x1², x1 x2)`: a degree-one bracket
/// whose ideal is Poisson although no diagonal closed form applies.
pub fn counter_candidate() -> Result<Problem> {
    let t = VariableTable::standard(&[1, 1]);
    Ok(build("counter-candidate", &t, 1, &[(1, 2, "x1^2*x2 + x1*x2^2")], &["x1^2", "x1*x2"])?.with(4, 8))
}

/// Two quadratic monomials with the non-diagonal `Z` whose `π` sequence is
/// tabulated in `fixtures/monomial_pair.txt`.
pub fn monomial_pair() -> Result<Problem> {
    let t = VariableTable::standard(&[1, 1]);
    let mut problem = build("monomial-pair", &t, 0, &[(1, 2, "x1*x2")], &["x1^2", "x1*x2"])?;
    let z = [((0, 1, 1), "x1"), ((1, 0, 1), "-2*x1"), ((1, 1, 1), "-x2")];
    problem.z = Some(ZTensor::new(z.iter().map(|&(k, v)| (k, p(&t, v)))));
    Ok(problem.with(6, 8))
}

/// The same ideal with the closed-form diagonal `Z`.
pub fn monomial_pair_diagonal() -> Result<Problem> {
    let mut problem = diagonal_monomial(&[vec![0, 1], vec![-1, 0]], &[vec![2, 0], vec![1, 1]])?;
    problem.name = "monomial-pair-diagonal".into();
    problem.options.name = Some(problem.name.clone());
    Ok(problem.with(6, 8))
}

/// `x1 x2, x3 x4` under the neighbour bracket `{x_i, x_i+1} = x_i x_i+1`.
pub fn neighbour_ci() -> Result<Problem> {
    let c = |i: usize, j: usize| match j as i64 - i as i64 {
        1 => 1,
        -1 => -1,
        _ => 0,
    };
    let c: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| c(i, j)).collect()).collect();
    let mut problem = diagonal_monomial(&c, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]])?;
    problem.name = "neighbour-ci".into();
    problem.options.name = Some(problem.name.clone());
    Ok(problem.with(8, 10))
}

/// `f1 = x1 x2 x3`, `f2 = x2 x3 x4` with coordinate derivations and
/// `g = (x2 x3)⁻¹`.
pub fn casimir_pair() -> Result<Problem> {
    let t = VariableTable::standard(&[1; 4]);
    let fs = [p(&t, "x1*x2*x3"), p(&t, "x2*x3*x4")];
    let mut problem = determinantal(&t, &fs, &coordinate_derivations(4), &[0, -1, -1, 0])?;
    problem.name = "casimir-pair".into();
    problem.options.name = Some(problem.name.clone());
    Ok(problem.with(8, 14))
}

/// A named built-in example.
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> Result<Problem>,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<Problem> {
        (self.build)()
    }
}

pub fn entries() -> Vec<CatalogEntry> {
    fn e(name: &'static str, summary: &'static str, build: fn() -> Result<Problem>) -> CatalogEntry {
        CatalogEntry { name, summary, build }
    }
    vec![
        e("kleinian-A2", "type A with N = 2", || kleinian(Kleinian::A, 2)),
        e("kleinian-A4", "type A with N = 4", || kleinian(Kleinian::A, 4)),
        e("kleinian-D3", "type D with N = 3", || kleinian(Kleinian::D, 3)),
        e("kleinian-E6", "type E6", || kleinian(Kleinian::E6, 0)),
        e("kleinian-E7", "type E7", || kleinian(Kleinian::E7, 0)),
        e("kleinian-E8", "type E8", || kleinian(Kleinian::E8, 0)),
        e("monomial-pair", "x1^2, x1*x2 with {x1,x2} = x1*x2, non-diagonal Z", monomial_pair),
        e("monomial-pair-diagonal", "x1^2, x1*x2 with {x1,x2} = x1*x2, diagonal Z", monomial_pair_diagonal),
        e("neighbour-ci", "complete intersection x1*x2, x3*x4 under the neighbour bracket", neighbour_ci),
        e("casimir-pair", "determinantal bracket of x1*x2*x3, x2*x3*x4", casimir_pair),
        e("so3-harmonic2", "harmonic quadrics under so3", so3_harmonic2),
        e("gl3-minors2", "2x2 minors of a generic 3x3 matrix under gl3", gl3_minors2),
        e("circle-m111", "symplectic circle quotient with weights (-1, 1, 1)", circle_m111),
        e("angular-momentum", "two particles in three dimensions, zero angular momentum", angular_momentum),
        e("volterra-deg0", "Volterra lattice n = 5, f = x1*x3*x5", || volterra(5, Volterra::Deg0, &[vec![1, 0, 1, 0, 1]])),
        e("volterra-deg1", "cubic Volterra bracket n = 4, f = x1*x3", || volterra(4, Volterra::Deg1, &[vec![1, 0, 1, 0]])),
        e("counter-candidate", "{x1,x2} = x1*x2*(x1+x2) on x1^2, x1*x2", counter_candidate),
    ]
}

/// Looks up a built-in example. Besides the listed names, `kleinian-A<N>` and
/// `kleinian-D<N>` accept any valid parameter.
pub fn by_name(name: &str) -> Result<Problem> {
    if let Some(entry) = entries().into_iter().find(|e| e.name == name) {
        return entry.build();
    }
    let family = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<u32>().ok());
    if let Some(n) = family("kleinian-A") {
        return kleinian(Kleinian::A, n);
    }
    if let Some(n) = family("kleinian-D") {
        return kleinian(Kleinian::D, n);
    }
    Err(Error::Invalid(format!("unknown example `{name}`")))
}

/// A tabulated `π` sequence together with the resolvent it lives on.
#[derive(Clone, Debug)]
pub struct PiFixture {
    pub table: VariableTable,
    /// `π₀`, the resolvent differential as a multiderivation.
    pub pi0: Polynomial,
    /// `π₁, π₂, …`
    pub pis: Vec<Polynomial>,
}

impl PiFixture {
    /// `π₀, π₁, …` as one slice, the shape expected by the verifier.
    pub fn sequence(&self) -> Vec<Polynomial> {
        std::iter::once(self.pi0.clone()).chain(self.pis.iter().cloned()).collect()
    }
}

fn fixture_text(name: &str) -> Option<String> {
    let pair = include_str!("../fixtures/monomial_pair.txt");
    let text = match name {
        "monomial-pair" => pair.to_string(),
        "monomial-pair-diagonal" => {
            let resolvent: String =
                pair.lines().filter(|l| l.starts_with("levels") || l.starts_with("pi0")).map(|l| format!("{l}\n")).collect();
            resolvent + include_str!("../fixtures/monomial_pair_diagonal.txt")
        }
        "neighbour-ci" => include_str!("../fixtures/neighbour_ci.txt").to_string(),
        "casimir-pair" => include_str!("../fixtures/casimir_pair.txt").to_string(),
        _ => return None,
    };
    Some(text)
}

/// Names with a tabulated `π` sequence.
pub const FIXTURES: [&str; 4] = ["monomial-pair", "monomial-pair-diagonal", "neighbour-ci", "casimir-pair"];

/// Loads the tabulated sequence for a built-in example. Internal degrees of
/// the resolvent variables are recovered from `π₀`.
pub fn pi_fixture(name: &str) -> Result<PiFixture> {
    let text = fixture_text(name).ok_or_else(|| Error::Invalid(format!("no π fixture for `{name}`")))?;
    PiFixture::parse(by_name(name)?.table(), &text)
}

impl PiFixture {
    /// Parses the text format: `levels = c₁ c₂ …`, then `pi0 = …`,
    /// `pi1 = …` and so on, with `#` comments.
    pub fn parse(base: &VariableTable, text: &str) -> Result<PiFixture> {
        let mut levels = Vec::new();
        let mut items = BTreeMap::new();
        for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
            let (key, value) = line
                .split_once(" = ")
                .ok_or_else(|| Error::Invalid(format!("malformed fixture line `{line}`")))?;
            if key == "levels" {
                for c in value.split_whitespace() {
                    levels.push(c.parse::<usize>().map_err(|_| Error::Invalid(format!("bad level count `{c}`")))?);
                }
            } else {
                items.insert(key.to_string(), value.to_string());
            }
        }
        let pi0_text = items.get("pi0").ok_or_else(|| Error::Invalid("fixture lacks pi0".into()))?;
        let table = resolvent_table(base, &levels, |t| parse(pi0_text, t))?;
        let pi0 = parse(pi0_text, &table)?;
        let mut pis = Vec::new();
        for m in 1.. {
            match items.get(&format!("pi{m}")) {
                Some(s) => pis.push(parse(s, &table)?),
                None => break,
            }
        }
        Ok(PiFixture { table, pi0, pis })
    }
}

/// Extends `base` by `levels[m-1]` variables of level `m`, with internal
/// degrees read off the differential `π₀` that `read_pi0` parses.
pub fn resolvent_table(
    base: &VariableTable,
    levels: &[usize],
    read_pi0: impl Fn(&VariableTable) -> Result<Polynomial>,
) -> Result<VariableTable> {
    let base = base.base();
    let mut probe = base.clone();
    for (m, &count) in levels.iter().enumerate() {
        probe.open_level(m as u32 + 1);
        for _ in 0..count {
            probe.push(m as u32 + 1, 0);
        }
    }
    let degrees = resolvent_degrees(&base, &read_pi0(&probe)?)?;
    let mut table = base.clone();
    for (m, &count) in levels.iter().enumerate() {
        table.open_level(m as u32 + 1);
        for j in 0..count {
            let v = Var::coord(m as u32 + 1, j as u32);
            let d = degrees.get(&v).copied().ok_or_else(|| Error::Invalid(format!("π₀ has no image for {}", probe.name(v))))?;
            table.push(m as u32 + 1, d);
        }
    }
    Ok(table)
}

/// `deg X = deg d(X)` read off the terms `d(X)·ξ_X` of `π₀`, level by level.
fn resolvent_degrees(base: &VariableTable, pi0: &Polynomial) -> Result<BTreeMap<Var, i64>> {
    let mut terms: Vec<(Var, &Monomial)> = pi0
        .terms()
        .map(|(m, _)| {
            let duals: Vec<Var> = m.factors().iter().map(|(v, _)| *v).filter(|v| v.is_dual()).collect();
            match duals.as_slice() {
                [d] => Ok((d.partner(), m)),
                _ => Err(Error::Invalid("π₀ terms must carry exactly one dual".into())),
            }
        })
        .collect::<Result<_>>()?;
    terms.sort_by_key(|(v, _)| v.level());
    let mut degrees: BTreeMap<Var, i64> = BTreeMap::new();
    for (v, m) in terms {
        let mut d = 0;
        for &(w, e) in m.factors().iter().filter(|(w, _)| !w.is_dual()) {
            let dw = if w.level() == 0 {
                base.internal_degree(w)
            } else {
                *degrees.get(&w).ok_or_else(|| Error::Invalid("π₀ is not triangular".into()))?
            };
            d += dw * e as i64;
        }
        if degrees.insert(v, d).is_some_and(|old| old != d) {
            return Err(Error::Invalid("π₀ is not homogeneous".into()));
        }
    }
    Ok(degrees)
}
