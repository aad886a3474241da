//! Randomized property suites shared by the `properties` and `acceptance`
//! test targets. Every suite runs at least [`CASES`] deterministic cases and
//! returns the first counterexample as an error string.

#![allow(dead_code)]

use std::collections::BTreeSet;

use pinf_core::algebra::{normalize_monomial, DerivativeSide, Polynomial, Var, VariableTable};
use pinf_core::catalog::{self, Kleinian};
use pinf_core::linalg::{self, SparseMatrix, SparseVec};
use pinf_core::perturbation::{compute_pi, derived_bracket, PiSequence};
use pinf_core::poisson::{poisson_codifferential, solve_z, IdealPresentation, PoissonStructure};
use pinf_core::resolvent::{project_to_a, Resolvent, TruncationParams};
use pinf_core::scalar::int;
use pinf_core::schouten::{bracket, lichnerowicz, pi0_of, LICHNEROWICZ_SIGNS};
use pinf_core::verify::{
    certified_tuples, linfty_identity_check, shifted_oracle, unshuffles, IdentityForm,
};
use pinf_core::{parse, serialize, Result as CoreResult};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 100;

/// Outcome of one suite: the number of cases run, or the failure.
pub type Outcome = Result<u32, String>;

fn run<S>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map(|_| CASES).map_err(|e| e.to_string())
}

fn ok<T>(r: CoreResult<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// A raw element: terms of (coefficient, word of (pool index, exponent)).
type Raw = Vec<(i64, Vec<(usize, u32)>)>;

fn raw(pool: usize, terms: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec(
        ((-3i64..=3).prop_filter("nonzero", |c| *c != 0), prop::collection::vec((0..pool, 1u32..=2), 0..=3)),
        1..=terms,
    )
}

fn build(raw: &Raw, pool: &[Var]) -> Polynomial {
    let mut out = Polynomial::zero();
    for (c, word) in raw {
        let mut t = Polynomial::constant(int(*c));
        for &(k, e) in word {
            t = t.mul(&Polynomial::var(pool[k % pool.len()]).pow(e));
        }
        out += &t;
    }
    out
}

/// Keeps the terms sharing the cohomological degree of the first one.
fn homogeneous(p: Polynomial) -> Polynomial {
    let Some(d) = p.terms().next().map(|(m, _)| m.coh_degree()) else { return p };
    p.filter(|m| m.coh_degree() == d)
}

fn degree(p: &Polynomial) -> i64 {
    p.coh_degree().unwrap_or(0)
}

fn sign(e: i64) -> Polynomial {
    Polynomial::constant(int(if e.rem_euclid(2) == 0 { 1 } else { -1 }))
}

/// Two base coordinates of degree 1 and one or two coordinates on levels 1–3.
fn sample_table() -> VariableTable {
    let mut t = VariableTable::standard(&[1, 1]);
    t.push(1, 2);
    t.push(1, 2);
    t.push(2, 3);
    t.push(3, 4);
    t
}

fn full_pool(t: &VariableTable, cap: u32) -> Vec<Var> {
    let coords = t.coords(cap);
    let duals: Vec<Var> = coords.iter().map(|v| v.partner()).collect();
    coords.into_iter().chain(duals).collect()
}

// --- core algebra -------------------------------------------------------

pub fn super_product_signs() -> Outcome {
    let t = sample_table();
    let pool = full_pool(&t, 3);
    run((raw(pool.len(), 3), raw(pool.len(), 3), raw(pool.len(), 3)), |(a, b, c)| {
        let a = homogeneous(build(&a, &pool));
        let b = homogeneous(build(&b, &pool));
        let c = build(&c, &pool);
        let ab = a.mul(&b);
        let ba = b.mul(&a).mul(&sign(degree(&a) * degree(&b)));
        prop_assert_eq!(&ab, &ba, "graded commutativity");
        prop_assert_eq!(ab.mul(&c), a.mul(&b.mul(&c)), "associativity");
        for (m, _) in ab.terms() {
            prop_assert_eq!(normalize_monomial(m.factors()), (m.clone(), 1));
        }
        Ok(())
    })
}

pub fn derivative_leibniz() -> Outcome {
    let t = sample_table();
    let pool = full_pool(&t, 3);
    let n = pool.len();
    run((raw(n, 3), raw(n, 3), 0..n), |(a, b, k)| {
        let a = homogeneous(build(&a, &pool));
        let b = homogeneous(build(&b, &pool));
        let v = pool[k];
        let dv = v.coh_degree();
        let left = a.mul(&b).partial(v, DerivativeSide::Left);
        let expect = a.partial(v, DerivativeSide::Left).mul(&b)
            + a.mul(&b.partial(v, DerivativeSide::Left)).mul(&sign(dv * degree(&a)));
        prop_assert_eq!(left, expect, "left Leibniz");
        let right = a.mul(&b).partial(v, DerivativeSide::Right);
        let expect = a.mul(&b.partial(v, DerivativeSide::Right))
            + a.partial(v, DerivativeSide::Right).mul(&b).mul(&sign(dv * degree(&b)));
        prop_assert_eq!(right, expect, "right Leibniz");
        Ok(())
    })
}

pub fn even_sides_agree() -> Outcome {
    let t = sample_table();
    let pool: Vec<Var> = full_pool(&t, 3).into_iter().filter(|v| !v.is_odd()).collect();
    let n = pool.len();
    run((raw(n, 4), 0..n), |(a, k)| {
        let a = build(&a, &pool);
        prop_assert_eq!(a.partial(pool[k], DerivativeSide::Left), a.partial(pool[k], DerivativeSide::Right));
        Ok(())
    })
}

pub fn serialization_round_trip() -> Outcome {
    let t = sample_table();
    let pool = full_pool(&t, 3);
    run(raw(pool.len(), 5), |a| {
        let a = build(&a, &pool);
        let text = serialize(&a, &t);
        prop_assert_eq!(ok(parse(&text, &t))?, a, "{}", text);
        Ok(())
    })
}

// --- linear algebra -------------------------------------------------------

fn dense() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -2i64..=2], c), r)
    })
}

fn matrix(rows: &[Vec<i64>]) -> SparseMatrix {
    SparseMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>())
}

pub fn rank_nullity() -> Outcome {
    run(dense(), |rows| {
        let m = matrix(&rows);
        let kernel = linalg::kernel_basis(&m);
        prop_assert_eq!(linalg::rank(&m) + kernel.len(), m.ncols());
        for k in &kernel {
            prop_assert!(m.mul_vec(k).is_empty(), "kernel vector not annihilated");
        }
        Ok(())
    })
}

pub fn preimages() -> Outcome {
    let case = dense().prop_flat_map(|rows| {
        let c = rows[0].len();
        (Just(rows), prop::collection::vec(-2i64..=2, c))
    });
    run(case, |(rows, x)| {
        let m = matrix(&rows);
        let x: SparseVec = x.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, int(*v))).collect();
        let b = m.mul_vec(&x);
        let y = ok(linalg::solve_preimage(&m, &b))?;
        prop_assert!(y.is_some(), "image vector has no preimage");
        prop_assert_eq!(m.mul_vec(&y.unwrap()), b);
        Ok(())
    })
}

pub fn homology_complements() -> Outcome {
    let case = (dense(), dense()).prop_filter("same height", |(a, b)| a.len() == b.len());
    run(case, |(b, c)| {
        let boundaries = matrix(&b);
        let cycles = matrix(&c);
        let cols: Vec<SparseVec> = (0..cycles.ncols()).map(|j| cycles.column(j).clone()).collect();
        let chosen = linalg::homology_complement(&boundaries, &cols);
        let both = boundaries.with_columns(&cols);
        prop_assert_eq!(chosen.len(), linalg::rank(&both) - linalg::rank(&boundaries));
        prop_assert_eq!(linalg::rank(&boundaries.with_columns(&chosen)), linalg::rank(&both));
        Ok(())
    })
}

// --- Poisson structures ---------------------------------------------------

/// Diagonal brackets `{x_i,x_j} = c_ij x_i x_j` on four variables.
fn diagonal(c: &[i64; 6]) -> PoissonStructure {
    let t = VariableTable::standard(&[1; 4]);
    let mut entries = Vec::new();
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            let x = |a: usize| Polynomial::var(Var::coord(0, a as u32));
            entries.push((i, j, x(i).mul(&x(j)).scale(&int(c[k]))));
            k += 1;
        }
    }
    PoissonStructure::new(&t, 0, entries).expect("diagonal brackets are valid")
}

/// One of: a random diagonal structure, the Volterra bracket, `so(3)` or E₆.
fn structure(kind: usize, c: &[i64; 6]) -> PoissonStructure {
    match kind {
        0 => diagonal(c),
        1 => catalog::by_name("volterra-deg1").unwrap().poisson,
        2 => catalog::so3_harmonic2().unwrap().poisson,
        _ => catalog::kleinian(Kleinian::E6, 0).unwrap().poisson,
    }
}

fn coefficients() -> impl Strategy<Value = [i64; 6]> {
    prop::array::uniform6(-2i64..=2)
}

pub fn poisson_bracket_laws() -> Outcome {
    run((0usize..4, coefficients(), raw(4, 3), raw(4, 3), raw(4, 3)), |(kind, c, a, b, d)| {
        let p = structure(kind, &c);
        let t = p.table().clone();
        let pool = t.coords(0);
        let [a, b, d] = [a, b, d].map(|r| build(&r, &pool));
        let ab = ok(p.bracket(&a, &b))?;
        prop_assert_eq!(&ab, &-ok(p.bracket(&b, &a))?, "antisymmetry");
        let lhs = ok(p.bracket(&a, &b.mul(&d)))?;
        prop_assert_eq!(lhs, ab.mul(&d) + b.mul(&ok(p.bracket(&a, &d))?), "Leibniz");
        let a = a.filter(|m| m == a.terms().next().unwrap().0);
        let b = b.filter(|m| m == b.terms().next().unwrap().0);
        let ab = ok(p.bracket(&a, &b))?;
        if !ab.is_zero() {
            let expect = a.internal_degree(&t).unwrap() + b.internal_degree(&t).unwrap() + p.degree();
            prop_assert_eq!(ab.internal_degree(&t), Some(expect), "degree additivity");
        }
        Ok(())
    })
}

/// Terms of (coefficient, coordinate word, indices of the ξ factors).
type RawMultivector = Vec<(i64, Vec<(usize, u32)>, Vec<usize>)>;

fn multivector(arity: usize, n: usize) -> impl Strategy<Value = RawMultivector> {
    prop::collection::vec(
        (
            (-3i64..=3).prop_filter("nonzero", |c| *c != 0),
            prop::collection::vec((0..n, 1u32..=2), 0..=2),
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), arity.min(n)),
        ),
        1..=3,
    )
}

fn build_multivector(raw: &RawMultivector, n: usize) -> Polynomial {
    let mut out = Polynomial::zero();
    for (c, word, xi) in raw {
        let mut t = Polynomial::constant(int(*c));
        for &(k, e) in word {
            t = t.mul(&Polynomial::var(Var::coord(0, (k % n) as u32)).pow(e));
        }
        for &k in xi {
            t = t.mul(&Polynomial::var(Var::dual(0, (k % n) as u32)));
        }
        out += &t;
    }
    out
}

fn multivector_case() -> impl Strategy<Value = (usize, [i64; 6], usize, RawMultivector)> {
    (0usize..4, coefficients(), 0usize..=3).prop_flat_map(|(kind, c, arity)| {
        let n = if kind >= 2 { 3 } else { 4 };
        (Just(kind), Just(c), Just(arity), multivector(arity, n))
    })
}

pub fn codifferential_squares_to_zero() -> Outcome {
    run(multivector_case(), |(kind, c, arity, x)| {
        let p = structure(kind, &c);
        let x = build_multivector(&x, p.n());
        if arity <= 2 {
            let dx = ok(poisson_codifferential(&p, &x))?;
            prop_assert!(ok(poisson_codifferential(&p, &dx))?.is_zero(), "δ² ≠ 0");
            if !dx.is_zero() && x.internal_degree(p.table()).is_some() {
                let t = p.table();
                prop_assert_eq!(dx.internal_degree(t), x.internal_degree(t).map(|d| d + p.degree()), "δ degree");
            }
        }
        prop_assert!(lichnerowicz(&p, &lichnerowicz(&p, &x)).is_zero(), "⟦π₁,⟦π₁,X⟧⟧ ≠ 0");
        Ok(())
    })
}

pub fn lichnerowicz_matches_codifferential() -> Outcome {
    run(multivector_case(), |(kind, c, arity, x)| {
        let p = structure(kind, &c);
        let x = build_multivector(&x, p.n());
        let expect = ok(poisson_codifferential(&p, &x))?.scale(&int(LICHNEROWICZ_SIGNS[arity]));
        prop_assert_eq!(lichnerowicz(&p, &x), expect, "arity {}", arity);
        Ok(())
    })
}

/// Random exponent vectors for diagonal brackets on monomial ideals.
fn monomial_ideal() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<u32>>)> {
    (2usize..=4, 1usize..=3).prop_flat_map(|(n, k)| {
        let gens = prop::collection::vec(prop::collection::vec(0u32..=2, n), k)
            .prop_filter("nonconstant", |g| g.iter().all(|e| e.iter().any(|x| *x > 0) && e.iter().sum::<u32>() <= 4));
        let c = prop::collection::vec(prop::collection::vec(-2i64..=2, n), n);
        (c, gens)
    })
}

fn antisymmetrize(c: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = c.len();
    (0..n).map(|i| (0..n).map(|j| if i < j { c[i][j] } else if i > j { -c[j][i] } else { 0 }).collect()).collect()
}

pub fn solve_z_reexpands() -> Outcome {
    run(monomial_ideal(), |(c, gens)| {
        let problem = ok(catalog::diagonal_monomial(&antisymmetrize(&c), &gens))?;
        let z = ok(solve_z(&problem.poisson, &problem.ideal))?;
        prop_assert!(z.defect(&problem.poisson, &problem.ideal).is_empty());
        Ok(())
    })
}

// --- resolvents -----------------------------------------------------------

type RawIdeal = (usize, Vec<(i64, Vec<u32>, Vec<u32>)>);

/// Minimally generated monomial and binomial ideals in two to four variables.
fn random_ideal() -> impl Strategy<Value = RawIdeal> {
    (2usize..=4)
        .prop_flat_map(|n| {
            let monomial = prop::collection::vec(0u32..=2, n).prop_filter("nonconstant", |e| e.iter().any(|x| *x > 0));
            // a monomial, optionally minus another of the same degree
            let generator = (0i64..=1, monomial.clone(), monomial);
            (Just(n), prop::collection::vec(generator, 2..=4))
        })
        .prop_filter("minimal generating set", |(n, gens)| ideal_of(*n, gens).is_some_and(|i| i.len() >= 2))
}

fn ideal_of(n: usize, gens: &[(i64, Vec<u32>, Vec<u32>)]) -> Option<IdealPresentation> {
    let t = VariableTable::standard(&vec![1; n]);
    let mono = |e: &[u32]| {
        e.iter().enumerate().fold(Polynomial::one(), |acc, (i, &k)| acc.mul(&Polynomial::var(Var::coord(0, i as u32)).pow(k)))
    };
    let mut out = Vec::new();
    for (binomial, a, b) in gens {
        let mut f = mono(a);
        if *binomial == 1 && a.iter().sum::<u32>() == b.iter().sum::<u32>() {
            f -= &mono(b);
        }
        if !f.is_zero() && !out.contains(&f) {
            out.push(f);
        }
    }
    // minimal models need a minimal generating set
    for k in 0..out.len() {
        let others: Vec<Polynomial> = out.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f.clone()).collect();
        if !others.is_empty() && IdealPresentation::new(&t, others).ok()?.contains(&out[k]) {
            return None;
        }
    }
    IdealPresentation::new(&t, out).ok()
}

pub fn resolvent_invariants() -> Outcome {
    run(random_ideal(), |(n, gens)| {
        let ideal = ideal_of(n, &gens).expect("filtered by the strategy");
        let params = TruncationParams::new(3, 5);
        let r = ok(Resolvent::build(&ideal, params))?;
        prop_assert!(r.check_d_squared().is_empty(), "∂² ≠ 0");
        prop_assert!(r.minimality_violations().is_empty(), "not minimal");
        prop_assert!(ok(r.exactness_failures())?.is_empty(), "homology below degree 0");
        for d in 0..=5 {
            prop_assert_eq!(ok(r.h0_dim(d))?, r.hilbert_slice(d), "H⁰ in degree {}", d);
        }
        prop_assert_eq!(ok(Resolvent::build(&ideal, params))?, r, "nondeterministic build");
        Ok(())
    })
}

// --- Schouten calculus ----------------------------------------------------

pub fn schouten_axioms() -> Outcome {
    let t = sample_table();
    let pool = full_pool(&t, 3);
    let n = pool.len();
    run((raw(n, 2), raw(n, 2), raw(n, 2)), |(x, y, z)| {
        let [x, y, z] = [x, y, z].map(|r| homogeneous(build(&r, &pool)));
        let (dx, dy) = (degree(&x), degree(&y));
        prop_assert_eq!(x.mul(&y), y.mul(&x).mul(&sign(dx * dy)), "axiom 1");
        let xy = bracket(&x, &y);
        prop_assert_eq!(&xy, &-bracket(&y, &x).mul(&sign((dx - 1) * (dy - 1))), "axiom 2");
        let lhs = bracket(&x, &y.mul(&z));
        let rhs = xy.mul(&z) + y.mul(&bracket(&x, &z)).mul(&sign(dy * (dx - 1)));
        prop_assert_eq!(lhs, rhs, "axiom 3");
        let lhs = bracket(&x, &bracket(&y, &z));
        let rhs = bracket(&xy, &z) + bracket(&y, &bracket(&x, &z)).mul(&sign((dx - 1) * (dy - 1)));
        prop_assert_eq!(lhs, rhs, "axiom 4");
        Ok(())
    })
}

fn min_fd(p: &Polynomial) -> Option<u32> {
    p.terms().map(|(m, _)| m.fd()).min()
}

/// Highest level among the variables of `p`, duals included.
fn top_level(p: &Polynomial) -> u32 {
    p.terms().flat_map(|(m, _)| m.factors().iter().map(|(v, _)| v.level())).max().unwrap_or(0)
}

fn fd_component(p: Polynomial) -> Polynomial {
    let first = p.terms().next().map(|(m, _)| m.fd());
    match first {
        Some(f) => p.filter(|m| m.fd() == f),
        None => p,
    }
}

pub fn filtration_bounds() -> Outcome {
    let problem = catalog::monomial_pair().unwrap();
    let r = Resolvent::build(&problem.ideal, TruncationParams::new(4, 8)).unwrap();
    let pi0 = pi0_of(&r);
    let t = r.table().clone();
    run((0u32..=3, raw(16, 3), raw(16, 3)), move |(cap, x, y)| {
        let pool = full_pool(&t, cap);
        let wrap = |raw: &Raw| raw.iter().map(|(c, w)| (*c, w.iter().map(|&(k, e)| (k % pool.len(), e)).collect())).collect::<Raw>();
        let x = fd_component(build(&wrap(&x), &pool));
        let y = fd_component(build(&wrap(&y), &pool));
        let Some(p) = min_fd(&x) else { return Ok(()) };
        let pi0r = pi0.filter(|m| top_level(&Polynomial::term(m.clone(), int(1))) <= cap);
        let rest = &bracket(&pi0r, &x) - &r.apply(&x);
        prop_assert!(rest.terms().all(|(m, _)| m.fd() > p), "⟦π₀,X⟧ − ∂X leaves 𝓕^(p+1)");
        if let Some(q) = min_fd(&y) {
            let floor = (p + q) as i64 - 1 - top_level(&x).min(top_level(&y)) as i64;
            let xy = bracket(&x, &y);
            prop_assert!(xy.terms().all(|(m, _)| m.fd() as i64 >= floor), "⟦𝓕^p,𝓕^q⟧ below the bound");
        }
        Ok(())
    })
}

// --- higher brackets ------------------------------------------------------

fn monomial_pair_sequence() -> PiSequence {
    let problem = catalog::monomial_pair().unwrap();
    compute_pi(&problem.poisson, &problem.ideal, &problem.z_tensor().unwrap(), TruncationParams::new(4, 8)).unwrap()
}

/// Homogeneous single terms of `R` on levels `≤ cap`.
fn r_element(raw: &Raw, t: &VariableTable, cap: u32) -> Polynomial {
    let pool = t.coords(cap);
    let wrapped: Raw = raw.iter().take(1).map(|(c, w)| (*c, w.iter().map(|&(k, e)| (k % pool.len(), e)).collect())).collect();
    build(&wrapped, &pool)
}

pub fn higher_bracket_laws() -> Outcome {
    let seq = monomial_pair_sequence();
    let pi = seq.total();
    let problem = catalog::monomial_pair().unwrap();
    let t = seq.table.clone();
    let case = (1usize..=3, prop::collection::vec(raw(8, 1), 3), raw(8, 1), raw(8, 1), raw(2, 1), raw(2, 1));
    run(case, move |(m, args, b, c, sa, sb)| {
        let mut args: Vec<Polynomial> = args.iter().take(m - 1).map(|a| r_element(a, &t, 2)).collect();
        let (b, c) = (r_element(&b, &t, 2), r_element(&c, &t, 2));
        let sum: i64 = args.iter().map(degree).sum();
        let with = |last: &Polynomial, args: &mut Vec<Polynomial>| {
            args.push(last.clone());
            let v = derived_bracket(&pi, args);
            args.pop();
            v
        };
        let lhs = ok(with(&b.mul(&c), &mut args))?;
        let rhs = ok(with(&b, &mut args))?.mul(&c)
            + b.mul(&ok(with(&c, &mut args))?).mul(&sign(degree(&b) * (2 - m as i64 + sum)));
        prop_assert_eq!(&lhs, &rhs, "Leibniz in the last slot");
        args.push(b.clone());
        let v = ok(derived_bracket(&pi, &args))?;
        if !v.is_zero() {
            let coh: i64 = args.iter().map(degree).sum::<i64>() + 2 - m as i64;
            prop_assert_eq!(v.coh_degree(), Some(coh), "bracket degree");
            let internal: i64 = args.iter().map(|a| a.internal_degree(&t).unwrap()).sum();
            prop_assert_eq!(v.internal_degree(&t), Some(internal), "internal degree with p = 0");
        }
        if m == 2 {
            let (a, b) = (r_element(&sa, &t, 0), r_element(&sb, &t, 0));
            let lhs = ok(derived_bracket(&pi, &[a.clone(), b.clone()]))?;
            let diff = &lhs - &ok(problem.poisson.bracket(&a, &b))?;
            prop_assert!(project_to_a(&diff, &problem.ideal).is_zero(), "{{a,b}}₂ ≢ {{a,b}} mod I");
        }
        Ok(())
    })
}

// --- L∞ checker -----------------------------------------------------------

pub fn unshuffle_counts() -> Outcome {
    run((0usize..=5, 0usize..=5), |(q, r)| {
        let all = unshuffles(q, r);
        let binomial = (1..=q).fold(1usize, |acc, i| acc * (r + i) / i);
        prop_assert_eq!(all.len(), binomial);
        let distinct: BTreeSet<_> = all.iter().collect();
        prop_assert_eq!(distinct.len(), all.len());
        for s in &all {
            prop_assert!(s[..q].windows(2).all(|w| w[0] < w[1]) && s[q..].windows(2).all(|w| w[0] < w[1]));
            let mut sorted = s.clone();
            sorted.sort();
            prop_assert_eq!(sorted, (0..q + r).collect::<Vec<_>>());
        }
        Ok(())
    })
}

/// Sorted display key of an argument tuple.
fn key(args: &[Polynomial], t: &VariableTable) -> Vec<String> {
    let mut k: Vec<String> = args.iter().map(|a| a.display(t)).collect();
    k.sort();
    k
}

pub fn decalage_consistency() -> Outcome {
    let seq = monomial_pair_sequence();
    let pi = seq.total();
    let t = seq.table.clone();
    let tuples: Vec<Vec<Vec<Polynomial>>> = (1..=3).map(|m| certified_tuples(&t, m, 4, 8)).collect();
    run((1usize..=3, any::<prop::sample::Index>(), any::<bool>(), prop::collection::vec(any::<prop::sample::Index>(), 4)), |(m, target, flip, picks)| {
        let pool = &tuples[m - 1];
        let target = key(&pool[target.index(pool.len())], &t);
        let oracle = |a: &[Polynomial]| {
            let v = derived_bracket(&pi, a)?;
            Ok(if flip && key(a, &t) == target { -v } else { v })
        };
        let sample: Vec<Vec<Polynomial>> = picks.iter().map(|i| pool[i.index(pool.len())].clone()).collect();
        let plain = ok(linfty_identity_check(&oracle, m, &sample, IdentityForm::Linfty))?;
        let shifted = ok(linfty_identity_check(&shifted_oracle(&oracle), m, &sample, IdentityForm::Shifted))?;
        let a: Vec<_> = plain.failures.iter().map(|f| f.tuple.clone()).collect();
        let b: Vec<_> = shifted.failures.iter().map(|f| f.tuple.clone()).collect();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

/// Outcome of the sign-mutation experiment: fixtures killed out of fixtures run.
pub struct MutationScore {
    pub killed: usize,
    pub total: usize,
    pub survivors: Vec<String>,
}

/// Length of the π sequence behind the mutation experiment.
const MUTATION_M: u32 = 6;

/// Highest arity swept by the identity checker.
const SWEEP_ARITY: usize = 5;

fn mutation_sequence() -> CoreResult<PiSequence> {
    let problem = catalog::monomial_pair()?;
    compute_pi(&problem.poisson, &problem.ideal, &problem.z_tensor()?, TruncationParams::new(MUTATION_M, 8))
}

/// Flips the sign of the derived bracket on one argument tuple at a time and
/// counts the mutants the identity checker rejects. Fixtures are tuples with a
/// nonzero bracket, drawn round-robin from arities 1–3.
pub fn sign_mutations(count: usize) -> CoreResult<MutationScore> {
    let seq = mutation_sequence()?;
    let pi = seq.total();
    let t = &seq.table;
    let sweep: Vec<Vec<Vec<Polynomial>>> =
        (1..=SWEEP_ARITY).map(|m| certified_tuples(t, m, MUTATION_M, 8)).collect();
    let mut pools = Vec::new();
    for tuples in &sweep[..3] {
        let mut nonzero = Vec::new();
        for tuple in tuples {
            if !derived_bracket(&pi, tuple)?.is_zero() {
                nonzero.push(tuple.clone());
            }
        }
        pools.push(nonzero.into_iter());
    }
    let mut fixtures = Vec::new();
    while fixtures.len() < count {
        let before = fixtures.len();
        for pool in pools.iter_mut() {
            if let Some(f) = pool.next() {
                if fixtures.len() < count {
                    fixtures.push(f);
                }
            }
        }
        if fixtures.len() == before {
            break;
        }
    }
    let mut score = MutationScore { killed: 0, total: fixtures.len(), survivors: Vec::new() };
    for fixture in &fixtures {
        let target = key(fixture, t);
        let oracle = |a: &[Polynomial]| {
            let v = derived_bracket(&pi, a)?;
            Ok(if key(a, t) == target { -v } else { v })
        };
        let mut killed = false;
        for (k, tuples) in sweep.iter().enumerate() {
            if !linfty_identity_check(&oracle, k + 1, tuples, IdentityForm::Linfty)?.passed() {
                killed = true;
                break;
            }
        }
        if killed {
            score.killed += 1;
        } else {
            score.survivors.push(target.join(", "));
        }
    }
    Ok(score)
}

/// The unmutated brackets satisfy the full sweep.
pub fn unmutated_sweep_passes() -> CoreResult<bool> {
    let seq = mutation_sequence()?;
    let pi = seq.total();
    let oracle = |a: &[Polynomial]| derived_bracket(&pi, a);
    for m in 1..=SWEEP_ARITY {
        let tuples = certified_tuples(&seq.table, m, MUTATION_M, 8);
        if !linfty_identity_check(&oracle, m, &tuples, IdentityForm::Linfty)?.passed() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub type Suite = (&'static str, fn() -> Outcome);

/// Suites backing the property criterion, by name.
pub fn criterion_suites() -> Vec<Suite> {
    vec![
        ("super-product sign laws", super_product_signs),
        ("derivative Leibniz", derivative_leibniz),
        ("∂² = 0 on constructed resolvents", resolvent_invariants),
        ("Schouten axioms (1)-(4)", schouten_axioms),
        ("filtration bounds", filtration_bounds),
        ("δ² = 0", codifferential_squares_to_zero),
        ("⟦π₁,·⟧ against the codifferential", lichnerowicz_matches_codifferential),
    ]
}
