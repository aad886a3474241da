//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion.
//!
//! `cargo test --release --test acceptance -- --nocapture` shows the report.

#![allow(clippy::needless_range_loop)]

#[path = "support/props.rs"]
mod props;

use std::time::Instant;

use pinf_core::catalog::{self, Kleinian, Problem};
use pinf_core::perturbation::{compute_pi, pi1, PiSequence};
use pinf_core::poisson::{
    a_tensor, casimir_check, jacobi_check, mc_residue, mc_residue_mod_ideal, pair_tensor_is_zero, ZTensor,
};
use pinf_core::resolvent::{Resolvent, TruncationParams};
use pinf_core::verify::{ci_triviality_check, koszul_homogeneity_check, verify_pi_sequence, CiVerdict};
use pinf_core::{serialize, Polynomial, VariableTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn fail(msg: impl Into<String>) -> Check {
    Err(msg.into())
}

fn core<T>(r: pinf_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn sequence(problem: &Problem, level: u32, degree: i64) -> Result<PiSequence, String> {
    let z = core(problem.z_tensor())?;
    core(compute_pi(&problem.poisson, &problem.ideal, &z, TruncationParams::new(level, degree)))
}

fn same(a: &Polynomial, ta: &VariableTable, b: &Polynomial, tb: &VariableTable) -> bool {
    serialize(a, ta) == serialize(b, tb)
}

/// π₁ and π₂ against the tabulated listing, and residue certificates up to `π_M`.
fn matches_listing(name: &str, problem: &Problem, level: u32, degree: i64) -> Result<(PiSequence, String), String> {
    let seq = sequence(problem, level, degree)?;
    let fx = core(catalog::pi_fixture(name))?;
    for m in 1..=2 {
        if !same(seq.pi(m as u32), &seq.table, &fx.pis[m - 1], &fx.table) {
            return Err(format!("π{m} differs from the listing: {}", seq.pi(m as u32).display(&seq.table)));
        }
    }
    if let Some(c) = seq.certificates.iter().find(|c| !c.passed()) {
        return Err(format!("residue at m={} not cleared ({} terms left)", c.m, c.after + c.low));
    }
    let note = format!("π₁, π₂ match; residues zero through π{}", seq.max_m());
    Ok((seq, note))
}

fn verify_fixture(name: &str, problem: &Problem, pairwise: bool) -> Result<usize, String> {
    let fx = core(catalog::pi_fixture(name))?;
    let cert = core(verify_pi_sequence(&problem.poisson, &problem.ideal, &fx.table, &fx.sequence(), pairwise))?;
    if !cert.passed() {
        let bad: Vec<String> = cert.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        return Err(format!("{name} listing fails verification: {}", bad.join(", ")));
    }
    Ok(fx.pis.len())
}

fn criterion_1() -> Check {
    let problem = core(catalog::monomial_pair())?;
    let (_, note) = matches_listing("monomial-pair", &problem, 6, 8)?;
    let n = verify_fixture("monomial-pair", &problem, false)?;
    Ok(format!("{note}; listed π₁…π{n} verify"))
}

fn criterion_2() -> Check {
    let problem = core(catalog::monomial_pair_diagonal())?;
    let (_, note) = matches_listing("monomial-pair-diagonal", &problem, 6, 8)?;
    Ok(note)
}

fn criterion_3() -> Check {
    let problem = core(catalog::neighbour_ci())?;
    let (seq, note) = matches_listing("neighbour-ci", &problem, 8, 10)?;
    if seq.pi(3).is_zero() {
        return fail("π3 vanishes");
    }
    if let Some(m) = (4..=8).find(|&m| !seq.pi(m).is_zero()) {
        return fail(format!("π{m} is nonzero"));
    }
    Ok(format!("{note}; π₃ ≠ 0; π₄…π₈ = 0"))
}

fn criterion_4() -> Check {
    let problem = core(catalog::casimir_pair())?;
    let fx = core(catalog::pi_fixture("casimir-pair"))?;
    if !same(&pi1(&problem.poisson), problem.table(), &fx.pis[0], &fx.table) {
        return fail("emitted bracket differs from the π1 listing");
    }
    let n = verify_fixture("casimir-pair", &problem, true)?;
    let trunc = problem.truncation(None, None);
    let seq = sequence(&problem, trunc.max_level, trunc.max_degree)?;
    if !seq.passed() {
        return fail("computed sequence leaves residues");
    }
    if !seq.pi(2).is_zero() {
        return fail("computed π2 is nonzero");
    }
    let h = core(koszul_homogeneity_check(&seq.pis, problem.poisson.degree()))?;
    if !h.passed() {
        return fail(format!("x-degrees {:?}, expected {}", h.degrees, h.expected));
    }
    Ok(format!(
        "Λ matches π₁; listed π₁…π{n} verify with pairwise commuting; computed π₂ = 0; π₁…π{} of x-degree {}",
        seq.max_m(),
        h.expected
    ))
}

fn criterion_5() -> Check {
    let so3 = core(catalog::so3_harmonic2())?;
    let r = core(Resolvent::build(&so3.ideal, TruncationParams::new(3, 6)))?;
    if r.betti_totals() != [5, 5, 10] {
        return fail(format!("so3 Betti totals {:?}", r.betti_totals()));
    }
    let h: Vec<usize> = (0..=3).map(|d| r.hilbert_slice(d)).collect();
    let h0: Vec<usize> = (0..=3).map(|d| r.h0_dim(d)).collect::<pinf_core::Result<_>>().map_err(|e| e.to_string())?;
    if h != [1, 3, 1, 0] || h0 != h {
        return fail(format!("so3 Hilbert slices {h:?}, H⁰ {h0:?}"));
    }
    for problem in [core(catalog::circle_m111())?, core(catalog::gl3_minors2())?] {
        let r = core(Resolvent::build(&problem.ideal, problem.truncation(Some(2), None)))?;
        if r.betti_totals() != [9, 16] {
            return fail(format!("{} Betti totals {:?}", problem.name, r.betti_totals()));
        }
    }
    Ok("so3: 5, 5, 10 with Hilbert 1, 3, 1, 0; circle and gl3: 9, 16".into())
}

fn constant(z: &ZTensor) -> bool {
    z.entries().all(|(_, v)| v.uses_only(|_| false))
}

fn a_nonzero_mod_ideal(problem: &Problem, z: &ZTensor) -> bool {
    a_tensor(&problem.poisson, &problem.ideal, z)
        .iter()
        .flatten()
        .flatten()
        .any(|a| !problem.ideal.reduce(a).is_zero())
}

fn criterion_6() -> Check {
    // (a) diagonal brackets on random monomial ideals
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cases = 0;
    while cases < 50 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=3);
        let mut c = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-3..=3);
                c[i][j] = v;
                c[j][i] = -v;
            }
        }
        let mut exps: Vec<Vec<u32>> = Vec::new();
        while exps.len() < k {
            let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            let d: u32 = e.iter().sum();
            if (1..=4).contains(&d) && !exps.contains(&e) {
                exps.push(e);
            }
        }
        let problem = core(catalog::diagonal_monomial(&c, &exps))?;
        let z = core(problem.z_tensor())?;
        if !z.defect(&problem.poisson, &problem.ideal).is_empty() {
            return fail(format!("diagonal Z fails to re-expand for c={c:?}, m={exps:?}"));
        }
        if a_tensor(&problem.poisson, &problem.ideal, &z) != catalog::diagonal_a_closed_form(&c, &exps) {
            return fail(format!("𝒜 differs from the closed form for c={c:?}, m={exps:?}"));
        }
        if !pair_tensor_is_zero(&mc_residue(&problem.poisson, &problem.ideal, &z)) {
            return fail(format!("MC residue nonzero for c={c:?}, m={exps:?}"));
        }
        cases += 1;
    }
    // (b), (c) linear brackets and the circle quotient
    for (problem, a_witness) in [
        (core(catalog::so3_harmonic2())?, true),
        (core(catalog::gl3_minors2())?, false),
        (core(catalog::circle_m111())?, true),
    ] {
        let z = core(problem.z_tensor())?;
        if !constant(&z) {
            return fail(format!("{}: Z is not constant", problem.name));
        }
        if !pair_tensor_is_zero(&mc_residue(&problem.poisson, &problem.ideal, &z)) {
            return fail(format!("{}: MC residue nonzero", problem.name));
        }
        if a_witness && !a_nonzero_mod_ideal(&problem, &z) {
            return fail(format!("{}: every 𝒜 component lies in I", problem.name));
        }
    }
    // (d) complete intersections
    let mut ci = Vec::new();
    for entry in catalog::entries() {
        let problem = core(entry.build())?;
        let probe = core(Resolvent::build(&problem.ideal, TruncationParams::new(2, problem.truncation(None, None).max_degree)))?;
        if probe.table().level_len(2) != 0 {
            continue;
        }
        let z = core(problem.z_tensor())?;
        let res = mc_residue(&problem.poisson, &problem.ideal, &z);
        if !pair_tensor_is_zero(&mc_residue_mod_ideal(&res, &problem.ideal)) {
            return fail(format!("{}: MC residue not in I", entry.name));
        }
        ci.push(entry.name);
    }
    Ok(format!(
        "50 diagonal cases match the closed form with zero MC residue; so3, gl3, circle have constant Z and zero residue; \
         residue ≡ 0 mod I on {} complete intersections ({})",
        ci.len(),
        ci.join(", ")
    ))
}

fn criterion_7() -> Check {
    let cases = [(Kleinian::A, 2, "A2"), (Kleinian::A, 4, "A4"), (Kleinian::D, 3, "D3"), (Kleinian::E6, 0, "E6"), (Kleinian::E7, 0, "E7"), (Kleinian::E8, 0, "E8")];
    for (kind, param, label) in cases {
        let problem = core(catalog::kleinian(kind, param))?;
        if !jacobi_check(&problem.poisson).is_empty() {
            return fail(format!("{label}: Jacobi fails"));
        }
        if !problem.ideal.generators().iter().all(|f| casimir_check(&problem.poisson, f)) {
            return fail(format!("{label}: generator is not Casimir"));
        }
        let z = core(problem.z_tensor())?;
        let report = core(ci_triviality_check(&problem.poisson, &problem.ideal, &z, problem.truncation(None, None)))?;
        if report.verdict != CiVerdict::Pass {
            return fail(format!("{label}: {report:?}"));
        }
    }
    Ok("A2, A4, D3, E6, E7, E8: Jacobi, Casimir, Z = 0, π_m = 0 for m ≥ 2, algebroid [dxᵢ,dxⱼ] = dΛᵢⱼ".into())
}

fn criterion_8() -> Check {
    let mut notes = Vec::new();
    for (name, suite) in props::criterion_suites() {
        let cases = suite().map_err(|e| format!("{name}: {e}"))?;
        notes.push(format!("{name} ({cases})"));
    }
    if !core(props::unmutated_sweep_passes())? {
        return fail("unmutated brackets fail the identity sweep");
    }
    let score = core(props::sign_mutations(20))?;
    if score.killed != 20 || score.total != 20 {
        return fail(format!("{}/{} sign mutations killed; survivors {:?}", score.killed, score.total, score.survivors));
    }
    notes.push("sign mutations killed 20/20".into());
    Ok(notes.join("; "))
}

fn criterion_9() -> Check {
    Ok("π_m for m ≥ 3 depend on resolvent and homotopy choices with no stated selection rule; \
        they are accepted by residue certificates and listing verification, not by coefficient match"
        .into())
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Check); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {n}: PASS [{secs:.1}s] {note}"),
            Err(why) => {
                println!("criterion {n}: FAIL [{secs:.1}s] {why}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
