//! Independent checkers for the structures produced by the recursion:
//! L∞ identities, the homotopy-anchor module identities, certification of
//! externally supplied `π`-sequences, and the CI and Koszul reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{serialize, Polynomial, Var, VariableTable};
use crate::error::{Error, Result};
use crate::perturbation::{algebroid_brackets, compute_pi, derived_bracket, kappa, kappa_d, pi1, BracketValue};
use crate::poisson::{casimir_check, IdealPresentation, PoissonStructure, ZTensor};
use crate::resolvent::{Resolvent, TruncationParams};
use crate::schouten::{
    bracket, euler_xdegree, filtration_component, schouten_bracket, split_by_word, FiltrationWindow,
    Multiderivation, XDegree,
};

/// All `(q, r)`-unshuffles of `{0,…,q+r−1}` in lexicographic order: images
/// ascending on the first `q` and on the last `r` positions.
pub fn unshuffles(q: usize, r: usize) -> Vec<Vec<usize>> {
    let n = q + r;
    crate::poisson::combinations(n, q)
        .into_iter()
        .map(|first| {
            let mut sigma = first.clone();
            sigma.extend((0..n).filter(|k| !first.contains(k)));
            sigma
        })
        .collect()
}

/// `(−1)^σ`.
pub fn permutation_sign(sigma: &[usize]) -> i8 {
    let mut inv = 0usize;
    for a in 0..sigma.len() {
        for b in a + 1..sigma.len() {
            if sigma[a] > sigma[b] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Koszul sign of reordering `x_0,…,x_{n−1}` into `x_{σ(0)},…,x_{σ(n−1)}`:
/// every pair of elements whose order is reversed contributes `|x||x'|`.
pub fn koszul_sign(sigma: &[usize], degrees: &[i64]) -> Result<i8> {
    if sigma.len() != degrees.len() {
        return Err(Error::Dimension(format!(
            "permutation of length {} with {} degrees",
            sigma.len(),
            degrees.len()
        )));
    }
    let mut odd = 0i64;
    for a in 0..sigma.len() {
        for b in a + 1..sigma.len() {
            if sigma[a] > sigma[b] {
                odd += degrees[sigma[a]] * degrees[sigma[b]];
            }
        }
    }
    Ok(if odd.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Which form of the higher Jacobi identities to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityForm {
    /// Antisymmetric brackets of degree `2−m` on `L`.
    Linfty,
    /// Symmetric brackets of degree `1` on `L[1]`; inputs carry degree `|a|−1`.
    Shifted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityFailure {
    pub tuple: Vec<Polynomial>,
    pub value: Polynomial,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub checked: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn degree_of(a: &Polynomial) -> Result<i64> {
    if a.is_zero() {
        return Ok(0);
    }
    a.coh_degree().ok_or_else(|| Error::Invalid("identity inputs must be homogeneous".into()))
}

/// Evaluates the arity-`m` identity on each tuple (`|tuple| = m`).
pub fn linfty_identity_check(
    oracle: &dyn Fn(&[Polynomial]) -> Result<Polynomial>,
    m: usize,
    tuples: &[Vec<Polynomial>],
    form: IdentityForm,
) -> Result<IdentityReport> {
    let mut report = IdentityReport::default();
    for tuple in tuples {
        if tuple.len() != m {
            return Err(Error::Dimension(format!("tuple of length {} for arity {m}", tuple.len())));
        }
        let mut degs = Vec::with_capacity(m);
        for a in tuple {
            let d = degree_of(a)?;
            degs.push(if form == IdentityForm::Shifted { d - 1 } else { d });
        }
        let mut total = Polynomial::zero();
        for q in 1..=m {
            let p = m + 1 - q;
            for sigma in unshuffles(q, p - 1) {
                let mut sign = koszul_sign(&sigma, &degs)? as i64;
                if form == IdentityForm::Linfty {
                    sign *= permutation_sign(&sigma) as i64;
                    if (q * (p - 1)) % 2 == 1 {
                        sign = -sign;
                    }
                }
                let inner_args: Vec<Polynomial> = sigma[..q].iter().map(|&k| tuple[k].clone()).collect();
                let inner = oracle(&inner_args)?;
                if inner.is_zero() {
                    continue;
                }
                let mut outer_args = vec![inner];
                outer_args.extend(sigma[q..].iter().map(|&k| tuple[k].clone()));
                let v = oracle(&outer_args)?;
                if sign > 0 {
                    total += &v;
                } else {
                    total -= &v;
                }
            }
        }
        report.checked += 1;
        if !total.is_zero() {
            report.failures.push(IdentityFailure { tuple: tuple.clone(), value: total });
        }
    }
    Ok(report)
}

/// The shifted brackets `l_m` obtained from `{…}_m` by décalage.
pub fn shifted_oracle<'a>(
    oracle: &'a dyn Fn(&[Polynomial]) -> Result<Polynomial>,
) -> impl Fn(&[Polynomial]) -> Result<Polynomial> + 'a {
    move |args: &[Polynomial]| {
        let m = args.len() as i64;
        let mut e = 0i64;
        for (i, a) in args.iter().enumerate() {
            e += (m - 1 - i as i64) * degree_of(a)?;
        }
        let v = oracle(args)?;
        Ok(if e.rem_euclid(2) == 1 { -v } else { v })
    }
}

/// Nondecreasing tuples of resolvent generators of level at most `max_level`
/// with total internal degree at most `degree_bound`.
pub fn generator_tuples(table: &VariableTable, m: usize, max_level: u32, degree_bound: i64) -> Vec<Vec<Polynomial>> {
    let gens: Vec<(Var, i64)> = table
        .coords(max_level.min(table.max_level()))
        .into_iter()
        .map(|v| (v, table.internal_degree(v)))
        .collect();
    fn go(gens: &[(Var, i64)], start: usize, m: usize, left: i64, cur: &mut Vec<Var>, out: &mut Vec<Vec<Var>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..gens.len() {
            if gens[i].1 <= left {
                cur.push(gens[i].0);
                go(gens, i, m, left - gens[i].1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&gens, 0, m, degree_bound, &mut Vec::new(), &mut out);
    out.into_iter().map(|t| t.into_iter().map(Polynomial::var).collect()).collect()
}

/// Generator tuples on which a sequence `π₀, …, π_M` certifies the identities:
/// the residues fix `⟦π,π⟧` through filtration degree `M+1`, so a tuple
/// qualifies when `Σ (level + 1) ≤ M + 1`.
pub fn certified_tuples(table: &VariableTable, m: usize, max_pi: u32, degree_bound: i64) -> Vec<Vec<Polynomial>> {
    let weight = |t: &Vec<Polynomial>| -> u32 { t.iter().map(|a| a.max_level() + 1).sum() };
    generator_tuples(table, m, max_pi, degree_bound).into_iter().filter(|t| weight(t) <= max_pi + 1).collect()
}

/// An argument of the extended operations `k_m` on `𝕃 ⊕ A`.
#[derive(Clone, Debug, PartialEq)]
enum ModuleArg {
    Form(BTreeMap<Var, Polynomial>),
    Function(Polynomial),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleFailure {
    pub law: String,
    pub inputs: Vec<String>,
    pub value: Polynomial,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModuleReport {
    pub checked: usize,
    pub failures: Vec<ModuleFailure>,
}

impl ModuleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Homotopy anchor identities and the `A`-linearity and Leibniz laws on the
/// cotangent complex. Each tuple lists `m−1` generators; `functions` are the
/// test elements of `A` placed in the last slot.
pub fn module_identity_check(
    pi: &Multiderivation,
    table: &VariableTable,
    ideal: &IdealPresentation,
    m: usize,
    tuples: &[Vec<Var>],
    functions: &[Polynomial],
) -> Result<ModuleReport> {
    let mut report = ModuleReport::default();
    let show = |v: &Var| format!("d{}", table.name(*v));
    let rho = |xs: &[Var], a: &Polynomial| -> Result<Polynomial> {
        let mut args: Vec<Polynomial> = xs.iter().map(|v| Polynomial::var(*v)).collect();
        args.push(a.clone());
        Ok(kappa(&derived_bracket(pi, &args)?, ideal))
    };
    for xs in tuples {
        if xs.len() + 1 != m {
            return Err(Error::Dimension(format!("{} generators for arity {m}", xs.len())));
        }
        for a in functions {
            // ρ₁ = 0
            if m == 1 {
                let v = rho(&[], a)?;
                report.checked += 1;
                if !v.is_zero() {
                    report.failures.push(ModuleFailure { law: "rho1".into(), inputs: vec![serialize(a, table)], value: v });
                }
            }
            // Leibniz in the function slot
            for b in functions {
                let ab = a.mul(b);
                let lhs = rho(xs, &ab)?;
                let rhs = &rho(xs, a)?.mul(b) + &a.mul(&rho(xs, b)?);
                let v = ideal.reduce(&(&lhs - &rhs));
                report.checked += 1;
                if !v.is_zero() {
                    report.failures.push(ModuleFailure {
                        law: "leibniz".into(),
                        inputs: xs.iter().map(show).chain([serialize(a, table), serialize(b, table)]).collect(),
                        value: v,
                    });
                }
            }
            if m >= 2 {
                let v = module_identity(pi, ideal, xs, a)?;
                report.checked += 1;
                if !v.is_zero() {
                    report.failures.push(ModuleFailure {
                        law: "anchor-identity".into(),
                        inputs: xs.iter().map(show).chain([serialize(a, table)]).collect(),
                        value: v,
                    });
                }
            }
        }
        // A-linearity in the first slot: d(x_j·X) = x_j dX + X dx_j
        if m >= 2 && xs[0].level() >= 1 {
            for j in 0..table.n_base() {
                let xj = Polynomial::var(Var::coord(0, j as u32));
                for b in functions {
                    let mut args: Vec<Polynomial> = vec![xj.mul(&Polynomial::var(xs[0]))];
                    args.extend(xs[1..].iter().map(|v| Polynomial::var(*v)));
                    args.push(b.clone());
                    let lhs = kappa(&derived_bracket(pi, &args)?, ideal);
                    let rhs = ideal.reduce(&xj.mul(&rho(xs, b)?));
                    let v = ideal.reduce(&(&lhs - &rhs));
                    report.checked += 1;
                    if !v.is_zero() {
                        report.failures.push(ModuleFailure {
                            law: "a-linearity".into(),
                            inputs: xs.iter().map(show).chain([serialize(b, table)]).collect(),
                            value: v,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Left-hand side of the module identity on `(dX_1,…,dX_{m−1}, a)`.
fn module_identity(pi: &Multiderivation, ideal: &IdealPresentation, xs: &[Var], a: &Polynomial) -> Result<Polynomial> {
    let m = xs.len() + 1;
    let mut args: Vec<ModuleArg> =
        xs.iter().map(|v| ModuleArg::Form(BTreeMap::from([(*v, Polynomial::one())]))).collect();
    args.push(ModuleArg::Function(a.clone()));
    let degs: Vec<i64> = xs.iter().map(|v| v.coh_degree()).chain([0]).collect();
    let mut total = Polynomial::zero();
    for q in 1..=m {
        let p = m + 1 - q;
        for sigma in unshuffles(q, p - 1) {
            let mut sign = koszul_sign(&sigma, &degs)? as i64 * permutation_sign(&sigma) as i64;
            if (q * (p - 1)) % 2 == 1 {
                sign = -sign;
            }
            let inner: Vec<&ModuleArg> = sigma[..q].iter().map(|&k| &args[k]).collect();
            let rest: Vec<&ModuleArg> = sigma[q..].iter().map(|&k| &args[k]).collect();
            let v = compose(pi, ideal, &inner, &rest)?;
            if sign > 0 {
                total += &v;
            } else {
                total -= &v;
            }
        }
    }
    Ok(ideal.reduce(&total))
}

/// `k_p(k_q(inner), rest…)`, which lands in `A` whenever exactly one argument
/// is a function.
fn compose(pi: &Multiderivation, ideal: &IdealPresentation, inner: &[&ModuleArg], rest: &[&ModuleArg]) -> Result<Polynomial> {
    let forms = |xs: &[&ModuleArg]| -> Vec<BTreeMap<Var, Polynomial>> {
        xs.iter()
            .filter_map(|a| match a {
                ModuleArg::Form(f) => Some(f.clone()),
                ModuleArg::Function(_) => None,
            })
            .collect()
    };
    let function = |xs: &[&ModuleArg]| -> Option<Polynomial> {
        xs.iter().find_map(|a| match a {
            ModuleArg::Function(p) => Some(p.clone()),
            ModuleArg::Form(_) => None,
        })
    };
    match function(inner) {
        Some(a) => {
            // inner anchor lands in A, the outer bracket becomes an anchor with
            // the function moved to the last slot
            let inner_forms = forms(inner);
            let value = anchor_on_forms(pi, ideal, &inner_forms, &a)?;
            let outer_forms = forms(rest);
            let mut v = anchor_on_forms(pi, ideal, &outer_forms, &value)?;
            // moving an even element past p−1 others in an antisymmetric bracket
            if outer_forms.len() % 2 == 1 {
                v = -v;
            }
            Ok(v)
        }
        None => {
            let a = function(rest).expect("one argument is a function");
            let inner_forms = forms(inner);
            let vars: Vec<Var> = inner_forms.iter().map(|f| *f.keys().next().expect("generator form")).collect();
            let args: Vec<Polynomial> = vars.iter().map(|v| Polynomial::var(*v)).collect();
            let form = kappa_d(&derived_bracket(pi, &args)?, ideal);
            let mut outer = vec![form];
            outer.extend(forms(rest));
            anchor_on_forms(pi, ideal, &outer, &a)
        }
    }
}

/// `ρ(Σ c dX, …, a)` extended `A`-linearly in every form slot.
fn anchor_on_forms(
    pi: &Multiderivation,
    ideal: &IdealPresentation,
    forms: &[BTreeMap<Var, Polynomial>],
    a: &Polynomial,
) -> Result<Polynomial> {
    let mut total = Polynomial::zero();
    let mut expand = vec![(Vec::<Var>::new(), Polynomial::one())];
    for f in forms {
        let mut next = Vec::new();
        for (vars, c) in &expand {
            for (v, x) in f {
                let mut vs = vars.clone();
                vs.push(*v);
                next.push((vs, c.mul(x)));
            }
        }
        expand = next;
    }
    for (vars, c) in expand {
        let mut args: Vec<Polynomial> = vars.iter().map(|v| Polynomial::var(*v)).collect();
        args.push(a.clone());
        total += &c.mul(&kappa(&derived_bracket(pi, &args)?, ideal));
    }
    Ok(ideal.reduce(&total))
}

/// A residue sector that fails to vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorWitness {
    pub m: u32,
    pub fd: u32,
    pub word: String,
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStatus {
    pub name: String,
    pub passed: bool,
    #[serde(default)]
    pub witnesses: Vec<String>,
}

impl CheckStatus {
    fn new(name: &str, passed: bool, witnesses: Vec<String>) -> CheckStatus {
        CheckStatus { name: name.into(), passed, witnesses }
    }
}

/// Deterministic certification document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub input_hash: String,
    pub params: TruncationParams,
    pub checks: Vec<CheckStatus>,
    pub failing_sectors: Vec<SectorWitness>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn status(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }
}

fn hash_inputs(p: &PoissonStructure, ideal: &IdealPresentation, table: &VariableTable, pis: &[Multiderivation]) -> String {
    let mut h = Sha256::new();
    for (&(i, j), l) in p.entries() {
        h.update(format!("{i},{j}:{}\n", serialize(l, p.table())));
    }
    for f in ideal.generators() {
        h.update(format!("f:{}\n", serialize(f, ideal.table())));
    }
    for (m, q) in pis.iter().enumerate() {
        h.update(format!("pi{m}:{}\n", serialize(q, table)));
    }
    hex::encode(h.finalize())
}

/// Images of the resolvent variables read off `π₀ = Σ F_j ξ_j`.
pub fn images_from_pi0(pi0: &Multiderivation) -> Result<BTreeMap<Var, Polynomial>> {
    let mut out: BTreeMap<Var, Polynomial> = BTreeMap::new();
    for (w, c) in split_by_word(pi0) {
        match w.factors() {
            [(v, 1)] if v.level() >= 1 => {
                out.insert(v.partner(), c);
            }
            _ => return Err(Error::Invalid("π₀ must be linear in duals of resolvent variables".into())),
        }
    }
    Ok(out)
}

/// Certifies a supplied sequence `π₀, π₁, …, π_M` against the problem:
/// structural agreement of `π₀` and `π₁`, `⟦π₀,π₀⟧ = 0`, and every residue
/// equation up to the supplied length. With `pairwise`, also checks
/// `⟦π_i, π_j⟧ = 0` for `1 ≤ i ≤ j ≤ M`.
pub fn verify_pi_sequence(
    p: &PoissonStructure,
    ideal: &IdealPresentation,
    table: &VariableTable,
    pis: &[Multiderivation],
    pairwise: bool,
) -> Result<Certificate> {
    if pis.len() < 2 {
        return Err(Error::Invalid("a π-sequence needs at least π₀ and π₁".into()));
    }
    if table.base() != *p.table() {
        return Err(Error::Invalid("π-sequence variables do not extend the problem's coordinates".into()));
    }
    let images = images_from_pi0(&pis[0])?;
    let level1: Vec<Polynomial> = (0..table.level_len(1) as u32)
        .map(|mu| images.get(&Var::coord(1, mu)).cloned().unwrap_or_default())
        .collect();
    if level1 != ideal.generators() {
        return Err(Error::Invalid("level-1 images of π₀ differ from the ideal generators".into()));
    }
    let mut checks = Vec::new();
    let pi0_sq = bracket(&pis[0], &pis[0]);
    checks.push(CheckStatus::new(
        "pi0-differential",
        pi0_sq.is_zero(),
        if pi0_sq.is_zero() { vec![] } else { vec![format!("{} terms", pi0_sq.len())] },
    ));
    let expected1 = pi1(p);
    checks.push(CheckStatus::new("pi1-matches-bracket", pis[1] == expected1, vec![]));

    let big_m = pis.len() as u32 - 1;
    let mut failing = Vec::new();
    for m in 1..=big_m {
        let mut sum = pis[0].filter(|t| t.fd() <= m + 1);
        for q in &pis[1..=m as usize] {
            sum += q;
        }
        let mut res = schouten_bracket(&sum, &sum, FiltrationWindow::new(0, m + 2));
        if m < big_m {
            let pi0 = pis[0].filter(|t| t.fd() <= m + 1);
            let d = schouten_bracket(&pi0, &pis[m as usize + 1], FiltrationWindow::exactly(m + 2));
            res.add_scaled(&d, &crate::scalar::int(2));
        } else {
            res = res.filter(|t| t.fd() < m + 2);
        }
        for fd in 0..=m + 2 {
            let comp = filtration_component(&res, fd);
            for (w, c) in split_by_word(&comp) {
                failing.push(SectorWitness { m, fd, word: w.display(table), terms: c.len() });
            }
        }
    }
    let witnesses: Vec<String> =
        failing.iter().map(|s| format!("m={} fd={} {} ({} terms)", s.m, s.fd, s.word, s.terms)).collect();
    checks.push(CheckStatus::new("residues", failing.is_empty(), witnesses));

    if pairwise {
        let mut bad = Vec::new();
        for i in 1..=big_m as usize {
            for j in i..=big_m as usize {
                if !bracket(&pis[i], &pis[j]).is_zero() {
                    bad.push(format!("[[pi{i},pi{j}]]"));
                }
            }
        }
        checks.push(CheckStatus::new("pairwise-commuting", bad.is_empty(), bad));
    }

    Ok(Certificate {
        input_hash: hash_inputs(p, ideal, table, pis),
        params: TruncationParams::new(big_m, 0),
        checks,
        failing_sectors: failing,
    })
}

/// Outcome of the triviality check for Casimir complete intersections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CiVerdict {
    Pass,
    Fail,
    /// Casimir generators without the complete-intersection hypothesis:
    /// only `π₂ = 0` is asserted.
    Partial,
    PreconditionFailed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiReport {
    pub casimir: bool,
    pub complete_intersection: bool,
    pub z_zero: bool,
    pub pi2_zero: bool,
    pub higher_pis_zero: bool,
    pub algebroid_trivial: bool,
    pub verdict: CiVerdict,
}

pub fn ci_triviality_check(
    p: &PoissonStructure,
    ideal: &IdealPresentation,
    z: &ZTensor,
    trunc: TruncationParams,
) -> Result<CiReport> {
    let casimir = ideal.generators().iter().all(|f| casimir_check(p, f));
    let probe = Resolvent::build(ideal, TruncationParams::new(2, trunc.max_degree))?;
    let complete_intersection = probe.table().level_len(2) == 0;
    let mut report = CiReport {
        casimir,
        complete_intersection,
        z_zero: z.is_zero(),
        pi2_zero: false,
        higher_pis_zero: false,
        algebroid_trivial: false,
        verdict: CiVerdict::PreconditionFailed,
    };
    if !casimir {
        return Ok(report);
    }
    let seq = compute_pi(p, ideal, z, trunc)?;
    report.pi2_zero = seq.pi(2).is_zero();
    if !complete_intersection {
        report.verdict = if report.pi2_zero { CiVerdict::Partial } else { CiVerdict::Fail };
        return Ok(report);
    }
    report.higher_pis_zero = seq.pis[2..].iter().all(Polynomial::is_zero);
    let bound = trunc.max_degree;
    let table = algebroid_brackets(&seq, ideal, 2, bound)?;
    let mut trivial = true;
    for (key, value) in &table.entries {
        let expected = if key.iter().all(|v| v.level() == 0) {
            let l = p.lambda(key[0].index() as usize, key[1].index() as usize);
            BracketValue::Form(kappa_d(&l, ideal))
        } else {
            BracketValue::Form(BTreeMap::new())
        };
        if *value != expected {
            trivial = false;
        }
    }
    for m in 3..=seq.max_m() as usize + 1 {
        if !algebroid_brackets(&seq, ideal, m, bound)?.entries.is_empty() {
            trivial = false;
        }
    }
    report.algebroid_trivial = trivial;
    report.verdict = if report.z_zero && report.pi2_zero && report.higher_pis_zero && trivial {
        CiVerdict::Pass
    } else {
        CiVerdict::Fail
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub expected: u32,
    /// `(m, x-degree)` for every nonzero `π_m`, `m ≥ 1`.
    pub degrees: Vec<(u32, XDegree)>,
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|(_, d)| *d == XDegree::Homogeneous(self.expected))
    }
}

/// Euler x-degree of every nonzero `π_m`, `m ≥ 1`, against `p + 2`.
pub fn koszul_homogeneity_check(pis: &[Multiderivation], bracket_degree: i64) -> Result<HomogeneityReport> {
    let expected = u32::try_from(bracket_degree + 2)
        .map_err(|_| Error::Invalid(format!("bracket degree {bracket_degree} gives a negative x-degree")))?;
    let degrees = pis
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, q)| !q.is_zero())
        .map(|(m, q)| (m as u32, euler_xdegree(q)))
        .collect();
    Ok(HomogeneityReport { expected, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unshuffle_lists() {
        assert_eq!(unshuffles(2, 1), vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 2, 0]]);
        assert_eq!(unshuffles(3, 0), vec![vec![0, 1, 2]]);
        assert_eq!(unshuffles(2, 2).len(), 6);
    }

    #[test]
    fn koszul_signs() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[2, 0, 1], &[0, 2, 4]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0, 2], &[1, 1, 0]).unwrap(), -1);
        assert!(koszul_sign(&[0, 1], &[1]).is_err());
    }
}
