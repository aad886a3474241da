//! Koszul complex and the level-by-level minimal model `(R, ∂)` of `S/I`.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Monomial, Polynomial, Var, VariableTable};
use crate::error::{Error, Result};
use crate::linalg::{self, SliceBasis, SparseMatrix, DEFAULT_SLICE_CAP};
use crate::poisson::IdealPresentation;
use crate::scalar::Scalar;

/// All guarantees hold up to level `max_level` and internal degree `max_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub max_level: u32,
    pub max_degree: i64,
    #[serde(default = "default_cap")]
    pub slice_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_SLICE_CAP
}

impl TruncationParams {
    pub fn new(max_level: u32, max_degree: i64) -> TruncationParams {
        TruncationParams { max_level, max_degree, slice_cap: DEFAULT_SLICE_CAP }
    }
}

/// One adjoined variable and the cycle it kills.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjunction {
    pub var: Var,
    pub internal_degree: i64,
    /// Index of the chosen cycle among the kernel basis of its slice.
    pub cycle_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resolvent {
    table: VariableTable,
    ideal: IdealPresentation,
    differential: BTreeMap<Var, Polynomial>,
    params: TruncationParams,
    provenance: Vec<Adjunction>,
}

/// Level-1 stage: one odd `y_μ` per generator with `∂y_μ = f_μ`.
pub fn koszul_complex(ideal: &IdealPresentation, params: TruncationParams) -> Resolvent {
    let mut table = ideal.table().clone();
    table.open_level(1);
    let mut differential = BTreeMap::new();
    for (f, &d) in ideal.generators().iter().zip(ideal.degrees()) {
        let v = table.push(1, d);
        differential.insert(v, f.clone());
    }
    Resolvent { table, ideal: ideal.clone(), differential, params, provenance: Vec::new() }
}

impl Resolvent {
    /// Koszul complex extended level by level up to `params.max_level`.
    pub fn build(ideal: &IdealPresentation, params: TruncationParams) -> Result<Resolvent> {
        let mut r = koszul_complex(ideal, params);
        for m in 2..=params.max_level {
            r.extend_level(m)?;
        }
        Ok(r)
    }

    /// Rebuilds a resolvent from explicit differential images, e.g. a cache
    /// file or a published listing. `levels[m-1]` lists the internal degrees of
    /// the level-`m` variables in adjunction order.
    pub fn from_parts(
        ideal: &IdealPresentation,
        levels: &[Vec<i64>],
        images: Vec<Polynomial>,
        params: TruncationParams,
    ) -> Result<Resolvent> {
        let mut table = ideal.table().clone();
        let mut vars = Vec::new();
        for (m, degs) in levels.iter().enumerate() {
            table.open_level(m as u32 + 1);
            for &d in degs {
                vars.push(table.push(m as u32 + 1, d));
            }
        }
        if vars.len() != images.len() {
            return Err(Error::Dimension(format!("{} variables but {} images", vars.len(), images.len())));
        }
        let differential: BTreeMap<Var, Polynomial> = vars.into_iter().zip(images).collect();
        for (v, f) in &differential {
            if f.coh_degree().is_some_and(|c| c != v.coh_degree() + 1) {
                return Err(Error::Invalid(format!("image of {} has the wrong cohomological degree", table.name(*v))));
            }
            if !f.uses_only(|u| !u.is_dual() && u.level() < v.level()) {
                return Err(Error::Invalid(format!("image of {} uses variables of its own level", table.name(*v))));
            }
        }
        let r = Resolvent { table, ideal: ideal.clone(), differential, params, provenance: Vec::new() };
        if let Some(bad) = r.check_d_squared().first() {
            return Err(Error::Invalid(format!("∂² ≠ 0 on {}", r.table.name(bad.var))));
        }
        Ok(r)
    }

    pub fn table(&self) -> &VariableTable {
        &self.table
    }

    pub fn ideal(&self) -> &IdealPresentation {
        &self.ideal
    }

    pub fn params(&self) -> TruncationParams {
        self.params
    }

    pub fn provenance(&self) -> &[Adjunction] {
        &self.provenance
    }

    pub fn max_level(&self) -> u32 {
        self.table.max_level()
    }

    /// `∂x` for a coordinate; zero on `S`.
    pub fn differential(&self, v: Var) -> Polynomial {
        self.differential.get(&v).cloned().unwrap_or_default()
    }

    /// Nonzero differential images in variable order.
    pub fn images(&self) -> impl Iterator<Item = (&Var, &Polynomial)> {
        self.differential.iter()
    }

    pub fn level_vars(&self, m: u32) -> Vec<Var> {
        (0..self.table.level_len(m) as u32).map(|j| Var::coord(m, j)).collect()
    }

    /// `∂ = Σ F_j ∂⃗/∂x_j`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            self.apply_monomial(m, c, &mut out);
        }
        out
    }

    fn apply_monomial(&self, m: &Monomial, c: &Scalar, out: &mut Polynomial) {
        for &(v, _) in m.factors() {
            let Some(f) = self.differential.get(&v) else { continue };
            let d = m.derivative(v, true).expect("factor present");
            let mut coeff = c * Scalar::from_integer(d.factor.into());
            if d.negative {
                coeff = -coeff;
            }
            for (fm, fc) in f.terms() {
                if let Some((prod, neg)) = fm.mul(&d.rest) {
                    let x = fc * &coeff;
                    out.add_term(prod, if neg { -x } else { x });
                }
            }
        }
    }

    /// Generators whose image is not a cycle; empty means `∂² = 0`
    /// (∂² is a derivation, so generators suffice).
    pub fn check_d_squared(&self) -> Vec<DSquaredFailure> {
        self.differential
            .iter()
            .filter_map(|(v, f)| {
                let dd = self.apply(f);
                (!dd.is_zero()).then(|| DSquaredFailure {
                    var: *v,
                    coh_degree: v.coh_degree() + 2,
                    internal_degree: self.table.internal_degree(*v),
                    value: dd,
                })
            })
            .collect()
    }

    /// Minimality: level-1 images in `𝔪`, higher images in `𝔫²`.
    pub fn minimality_violations(&self) -> Vec<Var> {
        self.differential
            .iter()
            .filter(|(v, f)| if v.level() == 1 { !in_maximal_ideal(f) } else { !in_n_squared(f) })
            .map(|(v, _)| *v)
            .collect()
    }

    pub(crate) fn slice(&self, coh: i64, d: i64, level_cap: u32) -> Result<SliceBasis> {
        linalg::enumerate_basis_capped(&self.table, coh, d, level_cap, self.params.slice_cap)
    }

    pub(crate) fn d_matrix(&self, domain: &SliceBasis, codomain: &SliceBasis) -> Result<SparseMatrix> {
        let mut cols = Vec::with_capacity(domain.len());
        for m in &domain.monomials {
            let mut image = Polynomial::zero();
            self.apply_monomial(m, &Scalar::one(), &mut image);
            cols.push(codomain.coordinates(&image)?);
        }
        Ok(SparseMatrix::from_columns(codomain.len(), cols))
    }

    /// Adjoins level `m`, killing `H^{−m+1}` in internal degrees up to the
    /// truncation bound, in ascending degree.
    pub fn extend_level(&mut self, m: u32) -> Result<()> {
        if m < 2 || m != self.table.max_level() + 1 {
            return Err(Error::Precondition(format!(
                "level {m} cannot follow level {}",
                self.table.max_level()
            )));
        }
        self.table.open_level(m);
        let coh = -(m as i64) + 1;
        for d in 1..=self.params.max_degree {
            let cycles_slice = self.slice(coh, d, m - 1)?;
            if cycles_slice.is_empty() {
                continue;
            }
            let target = self.slice(coh + 1, d, m - 1)?;
            let cycles = linalg::kernel_basis(&self.d_matrix(&cycles_slice, &target)?);
            if cycles.is_empty() {
                continue;
            }
            let sources = self.slice(coh - 1, d, m)?;
            let boundaries = self.d_matrix(&sources, &cycles_slice)?;
            let chosen = linalg::homology_complement_indices(&boundaries, &cycles);
            for k in chosen {
                let image = cycles_slice.polynomial(&cycles[k]).primitive();
                let v = self.table.push(m, d);
                self.differential.insert(v, image);
                self.provenance.push(Adjunction { var: v, internal_degree: d, cycle_index: k });
            }
        }
        if self.params.max_level < m {
            self.params.max_level = m;
        }
        Ok(())
    }

    /// `dim H^{coh}` of the current algebra in internal degree `d`.
    pub fn homology_dim(&self, coh: i64, d: i64) -> Result<usize> {
        let cap = self.table.max_level();
        let here = self.slice(coh, d, cap)?;
        if here.is_empty() {
            return Ok(0);
        }
        let next = self.slice(coh + 1, d, cap)?;
        let prev = self.slice(coh - 1, d, cap)?;
        let z = here.len() - linalg::rank(&self.d_matrix(&here, &next)?);
        let b = linalg::rank(&self.d_matrix(&prev, &here)?);
        Ok(z - b)
    }

    /// Sectors `(coh, d)` with `−M+1 ≤ coh ≤ −1` and `d ≤ D` carrying homology.
    pub fn exactness_failures(&self) -> Result<Vec<(i64, i64)>> {
        let mut out = Vec::new();
        for level in 2..=self.table.max_level() {
            let coh = -(level as i64) + 1;
            for d in 1..=self.params.max_degree {
                if self.homology_dim(coh, d)? != 0 {
                    out.push((coh, d));
                }
            }
        }
        Ok(out)
    }

    /// `|𝓘_m|` per level and internal degree.
    pub fn betti(&self) -> BTreeMap<u32, BTreeMap<i64, usize>> {
        let mut out: BTreeMap<u32, BTreeMap<i64, usize>> = BTreeMap::new();
        for m in 1..=self.table.max_level() {
            let row = out.entry(m).or_default();
            for v in self.level_vars(m) {
                *row.entry(self.table.internal_degree(v)).or_default() += 1;
            }
        }
        out
    }

    pub fn betti_totals(&self) -> Vec<usize> {
        (1..=self.table.max_level()).map(|m| self.table.level_len(m)).collect()
    }

    /// `dim (S/I)_d`.
    pub fn hilbert_slice(&self, d: i64) -> usize {
        hilbert_slice(&self.ideal, d)
    }

    /// `dim` of the cokernel of `∂: R^{−1} → R^0 = S` in degree `d`.
    pub fn h0_dim(&self, d: i64) -> Result<usize> {
        let s = self.slice(0, d, 0)?;
        let src = self.slice(-1, d, 1)?;
        Ok(s.len() - linalg::rank(&self.d_matrix(&src, &s)?))
    }

    /// Hash of everything the construction depends on.
    pub fn input_hash(ideal: &IdealPresentation, params: &TruncationParams) -> String {
        let t = ideal.table();
        let mut h = Sha256::new();
        for i in 0..t.n_base() {
            let v = Var::coord(0, i as u32);
            h.update(format!("var {} {}\n", t.name(v), t.internal_degree(v)));
        }
        for f in ideal.generators() {
            h.update(format!("gen {}\n", f.display(t)));
        }
        h.update(format!("trunc {} {} {}\n", params.max_level, params.max_degree, params.slice_cap));
        hex::encode(h.finalize())
    }

    pub fn to_document(&self) -> ResolventDocument {
        let levels = (1..=self.table.max_level())
            .map(|m| self.level_vars(m).into_iter().map(|v| self.table.internal_degree(v)).collect())
            .collect();
        let images = self
            .table
            .coords(self.table.max_level())
            .into_iter()
            .filter(|v| v.level() >= 1)
            .map(|v| ImageEntry { name: self.table.name(v), value: self.differential(v).display(&self.table) })
            .collect();
        ResolventDocument {
            input_hash: Resolvent::input_hash(&self.ideal, &self.params),
            params: self.params,
            levels,
            images,
        }
    }

    /// Reloads a cached resolvent, rejecting documents built from other input.
    pub fn from_document(ideal: &IdealPresentation, doc: &ResolventDocument) -> Result<Resolvent> {
        if doc.input_hash != Resolvent::input_hash(ideal, &doc.params) {
            return Err(Error::Invalid("cached resolvent belongs to different input".into()));
        }
        let mut table = ideal.table().clone();
        for (m, degs) in doc.levels.iter().enumerate() {
            table.open_level(m as u32 + 1);
            for &d in degs {
                table.push(m as u32 + 1, d);
            }
        }
        let images = doc
            .images
            .iter()
            .map(|e| crate::algebra::parse(&e.value, &table))
            .collect::<Result<Vec<_>>>()?;
        let mut r = Resolvent::from_parts(ideal, &doc.levels, images, doc.params)?;
        r.provenance.clear();
        Ok(r)
    }

    /// Cotangent complex `Ω_R ⊗_R A`: `∂(dX_j) = Σ_k κ(∂⃗F_j/∂X_k) dX_k`
    /// with coefficients reduced modulo `I`.
    pub fn cotangent_complex(&self) -> CotangentComplex {
        let generators = self.table.coords(self.table.max_level());
        let mut entries = BTreeMap::new();
        for (&v, f) in &self.differential {
            for &u in &generators {
                if u.level() + 1 != v.level() {
                    continue;
                }
                let c = project_to_a(&f.partial(u, crate::algebra::DerivativeSide::Left), &self.ideal);
                if !c.is_zero() {
                    entries.insert((v, u), c);
                }
            }
        }
        CotangentComplex { generators, entries }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSquaredFailure {
    pub var: Var,
    pub coh_degree: i64,
    pub internal_degree: i64,
    pub value: Polynomial,
}

/// `R → A`: drop every term containing a higher-level variable, then reduce
/// modulo `I`.
pub fn project_to_a(p: &Polynomial, ideal: &IdealPresentation) -> Polynomial {
    ideal.reduce(&p.filter(|m| m.max_level() == 0 && !m.has_dual()))
}

/// Free `A`-module on `dX_j` with its differential matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CotangentComplex {
    pub generators: Vec<Var>,
    /// `(j, k) ↦` coefficient of `dX_k` in `∂(dX_j)`.
    pub entries: BTreeMap<(Var, Var), Polynomial>,
}

impl CotangentComplex {
    pub fn image(&self, v: Var) -> Vec<(Var, Polynomial)> {
        self.entries.range((v, Var::coord(0, 0))..).take_while(|((a, _), _)| *a == v).map(|((_, b), c)| (*b, c.clone())).collect()
    }

    /// Generators whose image under `∂²` is nonzero modulo `I`.
    pub fn d_squared_failures(&self, ideal: &IdealPresentation) -> Vec<Var> {
        let mut bad = Vec::new();
        for &v in &self.generators {
            let mut acc: BTreeMap<Var, Polynomial> = BTreeMap::new();
            for (u, c) in self.image(v) {
                for (w, e) in self.image(u) {
                    *acc.entry(w).or_default() += &c.mul(&e);
                }
            }
            if acc.values().any(|p| !ideal.contains(p)) {
                bad.push(v);
            }
        }
        bad
    }
}

pub fn in_maximal_ideal(p: &Polynomial) -> bool {
    p.terms().all(|(m, _)| !m.is_one())
}

/// Every monomial has length at least two.
pub fn in_n_squared(p: &Polynomial) -> bool {
    p.terms().all(|(m, _)| m.length() >= 2)
}

/// `𝔞 = ker(R → S)`: every monomial contains a higher-level coordinate.
pub fn in_a(p: &Polynomial) -> bool {
    p.terms().all(|(m, _)| a_weight(m) >= 1)
}

pub fn in_a_squared(p: &Polynomial) -> bool {
    p.terms().all(|(m, _)| a_weight(m) >= 2)
}

fn a_weight(m: &Monomial) -> u32 {
    m.factors().iter().filter(|(v, _)| !v.is_dual() && v.level() >= 1).map(|(_, e)| e).sum()
}

/// `dim S_d − dim (I ∩ S_d)`.
pub fn hilbert_slice(ideal: &IdealPresentation, d: i64) -> usize {
    let Ok(s) = linalg::enumerate_basis(ideal.table(), 0, d, 0) else { return 0 };
    if d < 1 || ideal.is_empty() {
        return s.len();
    }
    s.len() - ideal.slice(d).dim()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub name: String,
    pub value: String,
}

/// Deterministic cache file for a resolvent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolventDocument {
    pub input_hash: String,
    pub params: TruncationParams,
    pub levels: Vec<Vec<i64>>,
    pub images: Vec<ImageEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    fn ideal(degs: &[i64], gens: &[&str]) -> IdealPresentation {
        let t = VariableTable::standard(degs);
        IdealPresentation::new(&t, gens.iter().map(|g| parse(g, &t).unwrap()).collect()).unwrap()
    }

    #[test]
    fn monomial_pair_level_two() {
        let i = ideal(&[1, 1], &["x1^2", "x1*x2"]);
        let r = Resolvent::build(&i, TruncationParams::new(3, 6)).unwrap();
        assert_eq!(r.betti_totals(), vec![2, 1, 1]);
        let x2 = Var::coord(2, 0);
        assert_eq!(r.differential(x2), parse("x1*X1_2 - x2*X1_1", r.table()).unwrap());
        assert!(r.check_d_squared().is_empty());
        assert!(r.minimality_violations().is_empty());
        assert!(r.exactness_failures().unwrap().is_empty());
    }

    #[test]
    fn complete_intersection_stops_at_level_one() {
        let i = ideal(&[1, 1, 1, 1], &["x1*x2", "x3*x4"]);
        let r = Resolvent::build(&i, TruncationParams::new(3, 8)).unwrap();
        assert_eq!(r.betti_totals(), vec![2, 0, 0]);
    }

    #[test]
    fn koszul_leibniz() {
        let i = ideal(&[1, 1, 1, 1], &["x1*x2", "x3*x4"]);
        let r = koszul_complex(&i, TruncationParams::new(1, 4));
        let t = r.table();
        let y1y2 = parse("X1_1*X1_2", t).unwrap();
        assert_eq!(r.apply(&y1y2), parse("x1*x2*X1_2 - x3*x4*X1_1", t).unwrap());
        assert!(r.apply(&parse("x1", t).unwrap()).is_zero());
    }

    #[test]
    fn hilbert_of_principal_ideal() {
        let i = ideal(&[1], &["x1^2"]);
        let dims: Vec<usize> = (0..3).map(|d| hilbert_slice(&i, d)).collect();
        assert_eq!(dims, vec![1, 1, 0]);
    }

    #[test]
    fn document_round_trip() {
        let i = ideal(&[1, 1], &["x1^2", "x1*x2"]);
        let r = Resolvent::build(&i, TruncationParams::new(4, 6)).unwrap();
        let doc = r.to_document();
        let back = Resolvent::from_document(&i, &doc).unwrap();
        assert_eq!(back.to_document(), doc);
        let other = ideal(&[1, 1], &["x1^2", "x2^2"]);
        assert!(Resolvent::from_document(&other, &doc).is_err());
    }

    #[test]
    fn cotangent_of_hypersurface() {
        let i = ideal(&[1, 1], &["x1*x2"]);
        let r = koszul_complex(&i, TruncationParams::new(1, 4));
        let c = r.cotangent_complex();
        let image = c.image(Var::coord(1, 0));
        let t = r.table();
        assert_eq!(image, vec![(Var::coord(0, 0), parse("x2", t).unwrap()), (Var::coord(0, 1), parse("x1", t).unwrap())]);
        assert!(c.d_squared_failures(&i).is_empty());
    }
}
