//! The perturbation recursion for `π = Σ π_m`, derived higher brackets and
//! the L∞-algebroid they induce on the cotangent complex.
//!
//! Each step solves `∂π_{m+1} = −A_m/2` where `A_m` is the filtration-degree
//! `m+2` part of `⟦π^{≤m}, π^{≤m}⟧`. The equation splits over dual words
//! `w`: the leading part of `⟦π₀, c·w⟧` is `(∂c)·w`, so each coefficient is a
//! preimage problem on one bidegree slice of the resolvent.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse, serialize, DerivativeSide, Monomial, Polynomial, Var, VariableTable};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poisson::{IdealPresentation, PoissonStructure, ZTensor};
use crate::resolvent::{project_to_a, Resolvent, TruncationParams};
use crate::scalar::{self, Scalar};
use crate::schouten::{
    augmentation, bracket, filtration_component, pi0_of, schouten_bracket, split_by_word, FiltrationWindow,
    Multiderivation,
};

/// `π₁ = Σ_{i<j} Λ_ij ξ^i ξ^j`.
pub fn pi1(p: &PoissonStructure) -> Multiderivation {
    let mut out = Polynomial::zero();
    for (&(i, j), l) in p.entries() {
        if i < j {
            let w = Polynomial::var(Var::dual(0, i as u32)).mul(&Polynomial::var(Var::dual(0, j as u32)));
            out += &l.mul(&w);
        }
    }
    out
}

/// `π₂ = −Σ Z_{iμ}^ν y_ν ξ^i η^μ`.
pub fn pi2(z: &ZTensor) -> Multiderivation {
    let mut out = Polynomial::zero();
    for (&(i, mu, nu), c) in z.entries() {
        let t = c
            .mul(&Polynomial::var(Var::coord(1, nu as u32)))
            .mul(&Polynomial::var(Var::dual(0, i as u32)))
            .mul(&Polynomial::var(Var::dual(1, mu as u32)));
        out -= &t;
    }
    out
}

/// A residue sector left unsolved because its coefficient degree exceeds the
/// truncation bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedSector {
    pub word: String,
    pub internal_degree: i64,
}

/// Step `m` of the recursion: the residue before and after adding `π_{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCertificate {
    pub m: u32,
    /// Terms of `A_m` within the degree bound.
    pub before: usize,
    /// Terms of `A_m + 2·⟦π₀, π_{m+1}⟧_{m+2}` within the degree bound.
    pub after: usize,
    /// Terms of `⟦π^{≤m}, π^{≤m}⟧` below filtration degree `m+2`.
    pub low: usize,
    pub skipped: Vec<SkippedSector>,
}

impl ResidueCertificate {
    pub fn passed(&self) -> bool {
        self.after == 0 && self.low == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiSequence {
    pub table: VariableTable,
    pub params: TruncationParams,
    /// `π₀, π₁, …, π_M`.
    pub pis: Vec<Multiderivation>,
    pub certificates: Vec<ResidueCertificate>,
}

impl PiSequence {
    pub fn max_m(&self) -> u32 {
        self.pis.len() as u32 - 1
    }

    pub fn pi(&self, m: u32) -> &Multiderivation {
        &self.pis[m as usize]
    }

    /// `π₀ + π₁ + … + π_M`.
    pub fn total(&self) -> Multiderivation {
        let mut out = Polynomial::zero();
        for p in &self.pis {
            out += p;
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.certificates.iter().all(ResidueCertificate::passed)
    }

    pub fn to_document(&self) -> PiDocument {
        PiDocument {
            params: self.params,
            levels: level_counts(&self.table),
            pis: self
                .pis
                .iter()
                .enumerate()
                .map(|(m, p)| PiRecord { m: m as u32, terms: word_terms(p, &self.table) })
                .collect(),
            certificates: self.certificates.clone(),
        }
    }
}

fn level_counts(table: &VariableTable) -> Vec<usize> {
    (1..=table.max_level()).map(|m| table.level_len(m)).collect()
}

fn word_terms(p: &Multiderivation, table: &VariableTable) -> Vec<WordTerm> {
    split_by_word(p)
        .into_iter()
        .map(|(w, c)| WordTerm { word: w.display(table), coefficient: serialize(&c, table) })
        .collect()
}

/// One dual word and its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordTerm {
    pub word: String,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiRecord {
    pub m: u32,
    pub terms: Vec<WordTerm>,
}

/// Serialized `π`-sequence. `levels` holds the number of resolvent variables
/// per level so that names resolve against the right table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiDocument {
    pub params: TruncationParams,
    pub levels: Vec<usize>,
    pub pis: Vec<PiRecord>,
    #[serde(default)]
    pub certificates: Vec<ResidueCertificate>,
}

impl PiDocument {
    /// Parses the records against `table`, which must carry the same level
    /// counts.
    pub fn multiderivations(&self, table: &VariableTable) -> Result<Vec<Multiderivation>> {
        if level_counts(table) != self.levels {
            return Err(Error::Invalid(format!(
                "π-sequence expects level counts {:?}, table has {:?}",
                self.levels,
                level_counts(table)
            )));
        }
        let mut out = Vec::with_capacity(self.pis.len());
        for (k, rec) in self.pis.iter().enumerate() {
            if rec.m as usize != k {
                return Err(Error::Invalid(format!("record {k} is labelled π{}", rec.m)));
            }
            let mut p = Polynomial::zero();
            for t in &rec.terms {
                let w = parse(&t.word, table)?;
                let c = parse(&t.coefficient, table)?;
                p += &c.mul(&w);
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Internal degree of each coefficient sector of `a`, keyed by dual word.
fn sectors(a: &Polynomial, table: &VariableTable) -> BTreeMap<(i64, Monomial), Polynomial> {
    let mut out: BTreeMap<(i64, Monomial), Polynomial> = BTreeMap::new();
    for (w, c) in split_by_word(a) {
        for (m, x) in c.terms() {
            let d = m.internal_degree(table);
            out.entry((d, w.clone())).or_default().add_term(m.clone(), x.clone());
        }
    }
    out
}

fn within_bound(a: &Polynomial, table: &VariableTable, max_degree: i64) -> Polynomial {
    a.filter(|m| m.split_dual().0.internal_degree(table) <= max_degree)
}

/// `π₀` restricted to filtration degree `≤ m+1` plus `π₁ + … + π_m`.
fn truncated_sum(pis: &[Multiderivation], m: u32) -> Multiderivation {
    let mut p = pis[0].filter(|t| t.fd() <= m + 1);
    for q in &pis[1..=m as usize] {
        p += q;
    }
    p
}

/// Solves for `π_{m+1}` given `π₀, …, π_m` (`pis.len() == m+1`, `m ≥ 2`).
pub fn next_pi(r: &Resolvent, pis: &[Multiderivation], m: u32) -> Result<(Multiderivation, ResidueCertificate)> {
    if m < 2 || pis.len() != m as usize + 1 {
        return Err(Error::Precondition(format!("next_pi at m = {m} needs π₀..π_m ({} given)", pis.len())));
    }
    if r.max_level() < m {
        return Err(Error::Precondition(format!("resolvent built to level {}, need {m}", r.max_level())));
    }
    let table = r.table();
    let bound = r.params().max_degree;
    let p = truncated_sum(pis, m);
    let full = schouten_bracket(&p, &p, FiltrationWindow::new(0, m + 2));
    let low = within_bound(&full.filter(|t| t.fd() < m + 2), table, bound);
    if !low.is_zero() {
        return Err(Error::Precondition(format!(
            "π^{{≤{m}}} is not a solution below filtration degree {}: {} residual terms",
            m + 2,
            low.len()
        )));
    }
    let a = filtration_component(&full, m + 2);
    let coh = 1 - m as i64;

    let mut skipped = Vec::new();
    let mut by_degree: BTreeMap<i64, Vec<(Monomial, Polynomial)>> = BTreeMap::new();
    for ((d, w), c) in sectors(&a, table) {
        if c.coh_degree() != Some(coh) {
            return Err(Error::Precondition(format!(
                "sector {} has coefficient of cohomological degree {:?}, expected {coh}",
                w.display(table),
                c.coh_degree()
            )));
        }
        if d > bound {
            skipped.push(SkippedSector { word: w.display(table), internal_degree: d });
            continue;
        }
        if !r.apply(&c).is_zero() {
            return Err(Error::Cocycle(format!(
                "m = {m}, word {}, internal degree {d}",
                w.display(table)
            )));
        }
        by_degree.entry(d).or_default().push((w, c));
    }

    let half = -scalar::frac(1, 2);
    let cap = r.max_level();
    let mut next = Polynomial::zero();
    for (d, items) in by_degree {
        let domain = r.slice(coh - 1, d, cap)?;
        let codomain = r.slice(coh, d, cap)?;
        let matrix = r.d_matrix(&domain, &codomain)?;
        let rhs = items
            .iter()
            .map(|(_, c)| codomain.coordinates(&c.scale(&half)))
            .collect::<Result<Vec<_>>>()?;
        let sols = linalg::solve_many(&matrix, &rhs)?;
        for ((w, _), sol) in items.iter().zip(sols) {
            let Some(x) = sol else {
                return Err(Error::NoSolution(format!(
                    "m = {m}, word {}, internal degree {d}",
                    w.display(table)
                )));
            };
            let c = domain.polynomial(&x);
            next += &c.mul(&Polynomial::term(w.clone(), Scalar::one()));
        }
    }

    let pi0 = pis[0].filter(|t| t.fd() <= m + 1);
    let after = residue_after(&a, &pi0, &next, m, table, bound);
    let cert = ResidueCertificate { m, before: within_bound(&a, table, bound).len(), after, low: 0, skipped };
    Ok((next, cert))
}

fn residue_after(
    a: &Polynomial,
    pi0: &Multiderivation,
    next: &Multiderivation,
    m: u32,
    table: &VariableTable,
    bound: i64,
) -> usize {
    let d = schouten_bracket(pi0, next, FiltrationWindow::exactly(m + 2));
    let mut res = a.clone();
    res.add_scaled(&d, &scalar::int(2));
    within_bound(&res, table, bound).len()
}

/// The `π₂` step as a certificate: `A₁ + 2⟦π₀, π₂⟧₃` must vanish.
fn check_first_step(r: &Resolvent, pis: &[Multiderivation]) -> ResidueCertificate {
    let table = r.table();
    let bound = r.params().max_degree;
    let p = truncated_sum(pis, 1);
    let full = schouten_bracket(&p, &p, FiltrationWindow::new(0, 3));
    let low = within_bound(&full.filter(|t| t.fd() < 3), table, bound).len();
    let a = filtration_component(&full, 3);
    let d = schouten_bracket(&pis[0], &pis[2], FiltrationWindow::exactly(3));
    let mut res = a.clone();
    res.add_scaled(&d, &scalar::int(2));
    ResidueCertificate {
        m: 1,
        before: within_bound(&a, table, bound).len(),
        after: within_bound(&res, table, bound).len(),
        low,
        skipped: Vec::new(),
    }
}

/// Certificate that `⟦π^{≤M}, π^{≤M}⟧` vanishes below filtration degree `M+2`.
pub fn final_certificate(r: &Resolvent, pis: &[Multiderivation]) -> ResidueCertificate {
    let m = pis.len() as u32 - 1;
    let table = r.table();
    let bound = r.params().max_degree;
    let p = truncated_sum(pis, m);
    let low = schouten_bracket(&p, &p, FiltrationWindow::new(0, m + 1));
    ResidueCertificate { m, before: 0, after: 0, low: within_bound(&low, table, bound).len(), skipped: Vec::new() }
}

/// Runs the recursion on an existing resolvent up to `π_M`, `M = r.max_level()`.
pub fn compute_pi_on(r: &Resolvent, p: &PoissonStructure, z: &ZTensor) -> Result<PiSequence> {
    let max = r.max_level().max(2);
    let mut pis = vec![pi0_of(r), pi1(p), pi2(z)];
    let mut certificates = vec![check_first_step(r, &pis)];
    if !certificates[0].passed() {
        return Err(Error::Invalid("Z does not satisfy {x_i, f_μ} = Σ_ν Z_{iμ}^ν f_ν".into()));
    }
    for m in 2..max {
        let (next, cert) = next_pi(r, &pis, m)?;
        pis.push(next);
        certificates.push(cert);
    }
    if r.max_level() >= max {
        certificates.push(final_certificate(r, &pis));
    }
    Ok(PiSequence { table: r.table().clone(), params: r.params(), pis, certificates })
}

/// Builds the resolvent to `trunc.max_level` and runs the recursion.
pub fn compute_pi(
    p: &PoissonStructure,
    ideal: &IdealPresentation,
    z: &ZTensor,
    trunc: TruncationParams,
) -> Result<PiSequence> {
    let r = Resolvent::build(ideal, TruncationParams { max_level: trunc.max_level.max(2), ..trunc })?;
    compute_pi_on(&r, p, z)
}

fn word_length(m: &Monomial) -> u32 {
    m.factors().iter().filter(|(v, _)| v.is_dual()).map(|(_, e)| e).sum()
}

/// `{a₁,…,a_m}_m = (−1)^{m−1} (−1)^{Σ(m−i)|a_i|} ε⟦…⟦π,a₁⟧,…,a_m⟧`.
pub fn derived_bracket(pi: &Multiderivation, args: &[Polynomial]) -> Result<Polynomial> {
    let m = args.len() as u32;
    if m == 0 {
        return Err(Error::Invalid("derived brackets need at least one argument".into()));
    }
    let mut sign_exp = m as i64 - 1;
    for (i, a) in args.iter().enumerate() {
        if a.is_zero() {
            return Ok(Polynomial::zero());
        }
        if a.terms().any(|(t, _)| t.has_dual()) {
            return Err(Error::Invalid("bracket arguments must lie in R".into()));
        }
        let deg = a
            .coh_degree()
            .ok_or_else(|| Error::Invalid(format!("argument {} is not homogeneous", i + 1)))?;
        sign_exp += (m as i64 - 1 - i as i64) * deg;
    }
    let mut acc = pi.filter(|t| word_length(t) == m);
    for (k, a) in args.iter().enumerate() {
        let left = m - k as u32 - 1;
        acc = bracket(&acc, a).filter(|t| word_length(t) == left);
    }
    let out = augmentation(&acc);
    Ok(if sign_exp.rem_euclid(2) == 1 { -out } else { out })
}

/// `{a₁,…,a_m}_m` from a computed sequence.
pub fn higher_bracket(seq: &PiSequence, args: &[Polynomial]) -> Result<Polynomial> {
    if args.len() as u32 > seq.max_m() + 1 {
        return Err(Error::Precondition(format!(
            "arity {} exceeds the computed range (π up to π{})",
            args.len(),
            seq.max_m()
        )));
    }
    derived_bracket(&seq.total(), args)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    ResolventBracket,
    AlgebroidBracket,
    Anchor,
}

/// Either an element of `A` (anchors) or a form `Σ c_k dX_k` with
/// coefficients in `A` (algebroid brackets).
#[derive(Clone, Debug, PartialEq)]
pub enum BracketValue {
    Element(Polynomial),
    Form(BTreeMap<Var, Polynomial>),
}

impl BracketValue {
    pub fn is_zero(&self) -> bool {
        match self {
            BracketValue::Element(p) => p.is_zero(),
            BracketValue::Form(f) => f.is_empty(),
        }
    }

    pub fn display(&self, table: &VariableTable) -> String {
        match self {
            BracketValue::Element(p) => p.display(table),
            BracketValue::Form(f) if f.is_empty() => "0".into(),
            BracketValue::Form(f) => f
                .iter()
                .map(|(v, c)| format!("({})·d{}", c.display(table), table.name(*v)))
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

/// Nonzero values of one bracket on generator tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable {
    pub arity: usize,
    pub flavor: Flavor,
    pub entries: BTreeMap<Vec<Var>, BracketValue>,
}

impl BracketTable {
    fn new(arity: usize, flavor: Flavor) -> BracketTable {
        BracketTable { arity, flavor, entries: BTreeMap::new() }
    }

    fn insert(&mut self, key: Vec<Var>, value: BracketValue) {
        if !value.is_zero() {
            self.entries.insert(key, value);
        }
    }

    pub fn get(&self, key: &[Var]) -> Option<&BracketValue> {
        self.entries.get(key)
    }
}

/// Reduction `R → A`: drops terms involving resolvent variables of level `≥ 1`
/// and normalizes modulo `I`.
pub fn kappa(p: &Polynomial, ideal: &IdealPresentation) -> Polynomial {
    project_to_a(p, ideal)
}

/// `κ(dG) = Σ_k κ(∂⃗G/∂X_k) dX_k`.
pub fn kappa_d(g: &Polynomial, ideal: &IdealPresentation) -> BTreeMap<Var, Polynomial> {
    let mut vars: Vec<Var> = g.terms().flat_map(|(m, _)| m.factors().iter().map(|(v, _)| *v)).collect();
    vars.sort();
    vars.dedup();
    let mut out = BTreeMap::new();
    for v in vars {
        let c = kappa(&g.partial(v, DerivativeSide::Left), ideal);
        if !c.is_zero() {
            out.insert(v, c);
        }
    }
    out
}

/// Nondecreasing tuples of `k` generators with total internal degree at most
/// `bound`.
fn tuples(gens: &[(Var, i64)], k: usize, bound: i64) -> Vec<Vec<Var>> {
    fn go(gens: &[(Var, i64)], start: usize, k: usize, left: i64, cur: &mut Vec<Var>, out: &mut Vec<Vec<Var>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..gens.len() {
            if gens[i].1 <= left {
                cur.push(gens[i].0);
                go(gens, i, k, left - gens[i].1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(gens, 0, k, bound, &mut Vec::new(), &mut out);
    out
}

fn generators(table: &VariableTable) -> Vec<(Var, i64)> {
    table.coords(table.max_level()).into_iter().map(|v| (v, table.internal_degree(v))).collect()
}

/// `{X_{j₁},…,X_{j_m}}_m` on every nondecreasing generator tuple with total
/// internal degree at most `degree_bound`.
pub fn resolvent_brackets(seq: &PiSequence, m: usize, degree_bound: i64) -> Result<BracketTable> {
    let pi = seq.total();
    let mut t = BracketTable::new(m, Flavor::ResolventBracket);
    for key in tuples(&generators(&seq.table), m, degree_bound) {
        let args: Vec<Polynomial> = key.iter().map(|v| Polynomial::var(*v)).collect();
        let v = derived_bracket(&pi, &args)?;
        t.insert(key, BracketValue::Element(v));
    }
    Ok(t)
}

/// `[dX_{j₁},…,dX_{j_m}]_m = κ d{X_{j₁},…,X_{j_m}}_m`.
pub fn algebroid_brackets(
    seq: &PiSequence,
    ideal: &IdealPresentation,
    m: usize,
    degree_bound: i64,
) -> Result<BracketTable> {
    let pi = seq.total();
    let mut t = BracketTable::new(m, Flavor::AlgebroidBracket);
    for key in tuples(&generators(&seq.table), m, degree_bound) {
        let args: Vec<Polynomial> = key.iter().map(|v| Polynomial::var(*v)).collect();
        let g = derived_bracket(&pi, &args)?;
        t.insert(key, BracketValue::Form(kappa_d(&g, ideal)));
    }
    Ok(t)
}

/// `ρ_m(dX_{j₁},…,dX_{j_{m−1}}, x_i) = κ{X_{j₁},…,X_{j_{m−1}}, x_i}_m`; keys
/// end with the level-0 coordinate.
pub fn anchor(seq: &PiSequence, ideal: &IdealPresentation, m: usize, degree_bound: i64) -> Result<BracketTable> {
    if m == 0 {
        return Err(Error::Invalid("anchors have arity at least 1".into()));
    }
    let pi = seq.total();
    let mut t = BracketTable::new(m, Flavor::Anchor);
    let n = seq.table.n_base();
    for key in tuples(&generators(&seq.table), m - 1, degree_bound) {
        for i in 0..n {
            let mut args: Vec<Polynomial> = key.iter().map(|v| Polynomial::var(*v)).collect();
            args.push(Polynomial::var(Var::coord(0, i as u32)));
            let g = derived_bracket(&pi, &args)?;
            let mut full = key.clone();
            full.push(Var::coord(0, i as u32));
            t.insert(full, BracketValue::Element(kappa(&g, ideal)));
        }
    }
    Ok(t)
}

/// The two-term dg Lie algebroid `⊕A ε_μ → ⊕A e_i` of a complete
/// intersection. `e_i` is keyed by `x_i` and `ε_μ` by `y_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConormalAlgebroid {
    pub differential: BracketTable,
    pub brackets: BracketTable,
    pub anchor: BracketTable,
}

/// Conormal algebroid from `Λ`, `f` and `Z`; fails unless the Koszul complex
/// is exact up to internal degree `max_degree`.
pub fn conormal_algebroid(
    p: &PoissonStructure,
    ideal: &IdealPresentation,
    z: &ZTensor,
    max_degree: i64,
) -> Result<ConormalAlgebroid> {
    let r = Resolvent::build(ideal, TruncationParams::new(2, max_degree))?;
    if r.table().level_len(2) != 0 {
        return Err(Error::Precondition(format!(
            "not a complete intersection: {} Koszul syzygies up to degree {max_degree}",
            r.table().level_len(2)
        )));
    }
    let n = p.n();
    let e = |i: usize| Var::coord(0, i as u32);
    let eps = |mu: usize| Var::coord(1, mu as u32);

    let mut differential = BracketTable::new(1, Flavor::AlgebroidBracket);
    for (mu, f) in ideal.generators().iter().enumerate() {
        let form: BTreeMap<Var, Polynomial> = (0..n)
            .map(|i| (e(i), ideal.reduce(&f.partial(e(i), DerivativeSide::Left))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        differential.insert(vec![eps(mu)], BracketValue::Form(form));
    }

    let mut brackets = BracketTable::new(2, Flavor::AlgebroidBracket);
    for i in 0..n {
        for j in i..n {
            let l = p.lambda(i, j);
            let form: BTreeMap<Var, Polynomial> = (0..n)
                .map(|k| (e(k), ideal.reduce(&l.partial(e(k), DerivativeSide::Left))))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            brackets.insert(vec![e(i), e(j)], BracketValue::Form(form));
        }
        for mu in 0..ideal.len() {
            let form: BTreeMap<Var, Polynomial> = (0..ideal.len())
                .map(|nu| (eps(nu), ideal.reduce(&z.get(i, mu, nu))))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            brackets.insert(vec![e(i), eps(mu)], BracketValue::Form(form));
        }
    }

    let mut anchor = BracketTable::new(2, Flavor::Anchor);
    for i in 0..n {
        for k in 0..n {
            anchor.insert(vec![e(i), e(k)], BracketValue::Element(ideal.reduce(&p.lambda(i, k))));
        }
    }
    Ok(ConormalAlgebroid { differential, brackets, anchor })
}

/// Fraction of terms of `π_m` whose coefficient lies in `𝔞²`.
pub fn a_squared_statistics(pi: &Multiderivation) -> (usize, usize) {
    let words = split_by_word(pi);
    let total = words.len();
    let inside = words.values().filter(|c| crate::resolvent::in_a_squared(c)).count();
    (inside, total)
}
