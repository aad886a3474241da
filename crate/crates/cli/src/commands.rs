use std::io::Read;
use std::path::Path;

use pinf_core::catalog::{self, PiFixture, Problem, ProblemInput};
use pinf_core::perturbation::{algebroid_brackets, anchor, higher_bracket, resolvent_brackets, BracketTable, PiDocument};
use pinf_core::poisson::{
    a_tensor, casimir_check, connection_curvature, jacobi_check, mc_residue, mc_residue_mod_ideal, PairTensor,
};
use pinf_core::resolvent::TruncationParams;
use pinf_core::verify::verify_pi_sequence;
use pinf_core::{parse, scalar, serialize, Error, Polynomial, Result, VariableTable};
use serde_json::{json, Map, Value};

use crate::cache::Cache;
use crate::{Format, RunConfig};

pub struct Report {
    pub text: String,
    pub doc: Map<String, Value>,
    pub passed: bool,
}

impl Report {
    fn new(input: Option<&ProblemInput>) -> Report {
        let doc = match input.map(serde_json::to_value) {
            Some(Ok(Value::Object(m))) => m,
            _ => Map::new(),
        };
        Report { text: String::new(), doc, passed: true }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn section(&mut self, key: &str, value: Value) {
        self.doc.insert(key.into(), value);
    }

    fn status(&mut self) {
        let s = if self.passed { "PASS" } else { "FAIL" };
        self.line(format!("status: {s}"));
        self.section("passed", Value::Bool(self.passed));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Doc => serde_json::to_string_pretty(&self.doc).expect("reports serialize") + "\n",
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn load(config: &RunConfig) -> Result<(ProblemInput, Problem)> {
    let path = config.input.as_ref().ok_or_else(|| Error::Invalid("missing input".into()))?;
    let input = ProblemInput::from_json(&read_input(path)?)?;
    let problem = Problem::from_input(&input)?;
    Ok((input, problem))
}

fn truncation(config: &RunConfig, problem: &Problem, report: &mut Report) -> TruncationParams {
    let params = problem.truncation(config.max_level, config.max_degree);
    report.line(format!("truncation: levels {} maxdeg {}", params.max_level, params.max_degree));
    report.section("truncation", json!(params));
    params
}

fn cache(config: &RunConfig) -> Cache {
    Cache::new(config.cache.clone())
}

fn var_name(t: &VariableTable, i: usize) -> String {
    t.name(pinf_core::Var::coord(0, i as u32))
}

pub fn check(config: &RunConfig) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let t = problem.table();
    let p = &problem.poisson;
    r.line(format!("problem: {}", problem.name));
    let vars: Vec<String> = (0..t.n_base()).map(|i| format!("{} ({})", var_name(t, i), t.base_degrees()[i])).collect();
    r.line(format!("variables: {}", vars.join(", ")));
    r.line(format!("bracket degree: {}", p.degree()));
    for (mu, f) in problem.ideal.generators().iter().enumerate() {
        r.line(format!("f{} = {} (degree {})", mu + 1, serialize(f, t), problem.ideal.degrees()[mu]));
    }
    let jac = jacobi_check(p);
    if jac.is_empty() {
        r.line("jacobi: ok");
    } else {
        r.passed = false;
        for f in &jac {
            let (i, j, k) = f.triple;
            r.line(format!(
                "jacobi: FAILED on ({}, {}, {}): {}",
                var_name(t, i),
                var_name(t, j),
                var_name(t, k),
                serialize(&f.jacobiator, t)
            ));
        }
    }
    let jac_doc: Vec<Value> = jac
        .iter()
        .map(|f| json!({"triple": [f.triple.0 + 1, f.triple.1 + 1, f.triple.2 + 1], "value": serialize(&f.jacobiator, t)}))
        .collect();
    let (ideal_ok, witness, z_defect) = match problem.z_tensor() {
        Ok(z) => (true, None, z.defect(p, &problem.ideal)),
        Err(Error::NotPoissonIdeal { i, mu }) => (false, Some((i, mu)), Vec::new()),
        Err(e) => return Err(e),
    };
    match witness {
        None => r.line("poisson ideal: ok"),
        Some((i, mu)) => {
            r.passed = false;
            r.line(format!("poisson ideal: FAILED, {{{}, f{mu}}} is not in I", var_name(t, i - 1)));
        }
    }
    if problem.z.is_some() {
        if z_defect.is_empty() {
            r.line("explicit Z: ok");
        } else {
            r.passed = false;
            for (i, mu) in &z_defect {
                r.line(format!("explicit Z: FAILED for {{{}, f{}}}", var_name(t, *i), mu + 1));
            }
        }
    }
    let casimir: Vec<bool> = problem.ideal.generators().iter().map(|f| casimir_check(p, f)).collect();
    for (mu, c) in casimir.iter().enumerate() {
        let s = if *c { "is" } else { "is not" };
        r.line(format!("generator f{} {s} Casimir", mu + 1));
    }
    r.section(
        "check",
        json!({
            "jacobi_failures": jac_doc,
            "poisson_ideal": ideal_ok,
            "poisson_ideal_witness": witness.map(|(i, mu)| json!({"i": i, "mu": mu})),
            "z_defect": z_defect.iter().map(|(i, mu)| json!({"i": i + 1, "mu": mu + 1})).collect::<Vec<_>>(),
            "casimir": casimir,
            "generator_degrees": problem.ideal.degrees(),
        }),
    );
    r.status();
    Ok(r)
}

fn pair_tensor(t: &VariableTable, tensor: &PairTensor) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (&(i, j), m) in tensor {
        for (mu, row) in m.iter().enumerate() {
            for (nu, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.push((format!("({},{};{},{})", i + 1, j + 1, mu + 1, nu + 1), serialize(v, t)));
                }
            }
        }
    }
    out
}

fn emit_pairs(r: &mut Report, label: &str, key: &str, entries: Vec<(String, String)>) {
    if entries.is_empty() {
        r.line(format!("{label}: 0"));
    }
    for (k, v) in &entries {
        r.line(format!("{label}{k} = {v}"));
    }
    let map: Map<String, Value> = entries.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    r.section(key, Value::Object(map));
}

pub fn tensors(config: &RunConfig, t_param: Option<&str>) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let t = problem.table();
    let p = &problem.poisson;
    let ideal = &problem.ideal;
    let z = problem.z_tensor()?;
    let z_entries = z.entries().map(|(&(i, mu, nu), v)| (format!("({},{};{})", i + 1, mu + 1, nu + 1), serialize(v, t))).collect();
    emit_pairs(&mut r, "Z", "z_tensor", z_entries);
    let a = a_tensor(p, ideal, &z);
    let mut a_entries = Vec::new();
    let mut a_mod = Vec::new();
    for (mu, plane) in a.iter().enumerate() {
        for (nu, row) in plane.iter().enumerate() {
            for (la, v) in row.iter().enumerate() {
                let key = format!("({},{};{})", mu + 1, nu + 1, la + 1);
                if !v.is_zero() {
                    a_entries.push((key.clone(), serialize(v, t)));
                }
                let red = ideal.reduce(v);
                if !red.is_zero() {
                    a_mod.push((key, serialize(&red, t)));
                }
            }
        }
    }
    emit_pairs(&mut r, "A", "a_tensor", a_entries);
    emit_pairs(&mut r, "A mod I ", "a_tensor_mod_ideal", a_mod);
    let residue = mc_residue(p, ideal, &z);
    emit_pairs(&mut r, "MC", "mc_residue", pair_tensor(t, &residue));
    emit_pairs(&mut r, "MC mod I ", "mc_residue_mod_ideal", pair_tensor(t, &mc_residue_mod_ideal(&residue, ideal)));
    if let Some(text) = t_param {
        let q = scalar::parse(text).ok_or_else(|| Error::Invalid(format!("`{text}` is not a rational number")))?;
        let curvature = connection_curvature(p, ideal, &z, &q);
        r.section("t", Value::String(scalar::format(&q)));
        emit_pairs(&mut r, "F", "curvature", pair_tensor(t, &curvature));
    }
    r.status();
    Ok(r)
}

pub fn resolve(config: &RunConfig) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let params = truncation(config, &problem, &mut r);
    let res = cache(config).resolvent(&problem, params)?;
    let t = res.table();
    r.line(format!("betti totals: {:?}", res.betti_totals()));
    for (m, row) in res.betti() {
        let cells: Vec<String> = row.iter().map(|(d, c)| format!("{c}@{d}")).collect();
        r.line(format!("level {m}: {}", cells.join(" ")));
    }
    let d2 = res.check_d_squared();
    let minimal = res.minimality_violations();
    let exact = res.exactness_failures()?;
    r.passed = d2.is_empty() && minimal.is_empty() && exact.is_empty();
    r.line(format!("d^2 = 0: {}", if d2.is_empty() { "ok" } else { "FAILED" }));
    r.line(format!("minimal: {}", if minimal.is_empty() { "ok" } else { "FAILED" }));
    for v in &minimal {
        r.line(format!("  non-minimal image of {}", t.name(*v)));
    }
    r.line(format!("exact within bounds: {}", if exact.is_empty() { "ok" } else { "FAILED" }));
    for (coh, d) in &exact {
        r.line(format!("  homology in cohomological degree {coh}, internal degree {d}"));
    }
    r.section(
        "resolvent",
        json!({
            "betti": res.betti_totals(),
            "document": res.to_document(),
            "d_squared_ok": d2.is_empty(),
            "minimal": minimal.is_empty(),
            "exactness_failures": exact,
        }),
    );
    r.status();
    Ok(r)
}

pub fn pi(config: &RunConfig) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let params = truncation(config, &problem, &mut r);
    let z = problem.z_tensor()?;
    let seq = cache(config).pi_sequence(&problem, &z, params)?;
    let t = &seq.table;
    r.line(format!("resolvent levels: {:?}", (1..=t.max_level()).map(|m| t.level_len(m)).collect::<Vec<_>>()));
    r.line(format!("pi0: {} terms", seq.pis[0].len()));
    for (m, q) in seq.pis.iter().enumerate().skip(1) {
        r.line(format!("pi{m} = {}", serialize(q, t)));
    }
    for c in &seq.certificates {
        let verdict = if c.passed() { "ok" } else { "FAILED" };
        r.line(format!(
            "residue m={}: before {} after {} low {} skipped {} {verdict}",
            c.m,
            c.before,
            c.after,
            c.low,
            c.skipped.len()
        ));
        for s in &c.skipped {
            r.line(format!("  skipped sector {} at degree {}", s.word, s.internal_degree));
        }
    }
    r.passed = seq.passed();
    r.section("pi", json!(seq.to_document()));
    r.status();
    Ok(r)
}

fn bracket_table(r: &mut Report, t: &VariableTable, label: &str, table: &BracketTable) -> Value {
    let mut map = Map::new();
    if table.entries.is_empty() {
        r.line(format!("{label}: all zero"));
    }
    for (key, value) in &table.entries {
        let names: Vec<String> = key.iter().map(|v| t.name(*v)).collect();
        let shown = value.display(t);
        r.line(format!("{label}({}) = {shown}", names.join(", ")));
        map.insert(names.join(","), Value::String(shown));
    }
    Value::Object(map)
}

pub fn bracket(config: &RunConfig, arity: usize, args: &[String]) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let params = truncation(config, &problem, &mut r);
    if arity == 0 {
        return Err(Error::Invalid("--arity must be at least 1".into()));
    }
    if !args.is_empty() && args.len() != arity {
        return Err(Error::Invalid(format!("--arity {arity} needs {arity} arguments, got {}", args.len())));
    }
    let z = problem.z_tensor()?;
    let seq = cache(config).pi_sequence(&problem, &z, params)?;
    let t = &seq.table;
    if args.is_empty() {
        let table = resolvent_brackets(&seq, arity, params.max_degree)?;
        let v = bracket_table(&mut r, t, "l", &table);
        r.section("bracket", json!({"arity": arity, "table": v}));
    } else {
        let parsed = args.iter().map(|a| parse(a, t)).collect::<Result<Vec<Polynomial>>>()?;
        let value = higher_bracket(&seq, &parsed)?;
        let shown = serialize(&value, t);
        r.line(format!("{{{}}}_{arity} = {shown}", args.join(", ")));
        r.section("bracket", json!({"arity": arity, "args": args, "value": shown}));
    }
    r.status();
    Ok(r)
}

pub fn algebroid(config: &RunConfig, arity: usize) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let params = truncation(config, &problem, &mut r);
    if arity == 0 {
        return Err(Error::Invalid("--arity must be at least 1".into()));
    }
    let z = problem.z_tensor()?;
    let seq = cache(config).pi_sequence(&problem, &z, params)?;
    let t = &seq.table;
    let brackets = algebroid_brackets(&seq, &problem.ideal, arity, params.max_degree)?;
    let anchors = anchor(&seq, &problem.ideal, arity, params.max_degree)?;
    let b = bracket_table(&mut r, t, "bracket", &brackets);
    let a = bracket_table(&mut r, t, "anchor", &anchors);
    r.section("algebroid", json!({"arity": arity, "brackets": b, "anchors": a}));
    r.status();
    Ok(r)
}

fn load_sequence(problem: &Problem, path: &Path) -> Result<(VariableTable, Vec<Polynomial>)> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(&text)?;
        let doc_value = value.get("pi").cloned().unwrap_or(value);
        let doc: PiDocument = serde_json::from_value(doc_value)?;
        let table = catalog::resolvent_table(problem.table(), &doc.levels, |t| {
            doc.multiderivations(t)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::Invalid("π-sequence is empty".into()))
        })?;
        let pis = doc.multiderivations(&table)?;
        Ok((table, pis))
    } else {
        let fixture = PiFixture::parse(problem.table(), &text)?;
        let pis = fixture.sequence();
        Ok((fixture.table, pis))
    }
}

pub fn verify(config: &RunConfig, pi_path: &Path, pairwise: bool) -> Result<Report> {
    let (input, problem) = load(config)?;
    let mut r = Report::new(Some(&input));
    let (table, pis) = load_sequence(&problem, pi_path)?;
    let cert = verify_pi_sequence(&problem.poisson, &problem.ideal, &table, &pis, pairwise)?;
    r.line(format!("pi0..pi{} loaded", pis.len() - 1));
    for c in &cert.checks {
        r.line(format!("{}: {}", c.name, if c.passed { "ok" } else { "FAILED" }));
        for w in &c.witnesses {
            r.line(format!("  {w}"));
        }
    }
    for s in &cert.failing_sectors {
        r.line(format!("  failing sector m={} fd={} word {} ({} terms)", s.m, s.fd, s.word, s.terms));
    }
    r.line(format!("input hash: {}", cert.input_hash));
    r.passed = cert.passed();
    r.section("certificate", json!(cert));
    r.status();
    Ok(r)
}

pub fn examples_list(_config: &RunConfig) -> Result<Report> {
    let mut r = Report::new(None);
    let mut list = Vec::new();
    for e in catalog::entries() {
        r.line(format!("{:<24} {}", e.name, e.summary));
        list.push(json!({"name": e.name, "summary": e.summary}));
    }
    r.section("examples", Value::Array(list));
    Ok(r)
}

pub fn examples_emit(name: &str) -> Result<Report> {
    let input = catalog::by_name(name)?.to_input();
    let mut r = Report::new(Some(&input));
    r.text = input.to_json() + "\n";
    Ok(r)
}
